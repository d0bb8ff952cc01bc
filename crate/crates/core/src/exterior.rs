//! The complexified exterior algebra of a 6-dimensional space with an almost
//! complex structure, on the 64-element monomial basis.
//!
//! Bits 0–2 of a [`Monomial`] select ξ₁, ξ₂, ξ₃ and bits 3–5 select
//! ξ̄₁, ξ̄₂, ξ̄₃. Generators inside a monomial are ordered
//! ξ₁ < ξ₂ < ξ₃ < ξ̄₁ < ξ̄₂ < ξ̄₃, and monomials are orthonormal.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::ser::{Serialize, SerializeMap, Serializer};
use thiserror::Error;

use crate::scalar::{Field, Scalar, ScalarError};

/// Number of basis monomials.
pub const DIM: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("bad monomial {0:?}")]
    BadMonomial(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Parity of a degree or an operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: usize) -> Parity {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn bit(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, o: Parity) -> Parity {
        Parity::of(self.bit() + o.bit())
    }

    /// True when both are odd, i.e. (−1)^{|a||b|} = −1.
    pub fn both_odd(self, o: Parity) -> bool {
        self == Parity::Odd && o == Parity::Odd
    }
}

/// A basis monomial ξ_I ∧ ξ̄_J as a 6-bit mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub u8);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);
    pub const TOP: Monomial = Monomial(63);

    pub fn all() -> impl Iterator<Item = Monomial> {
        (0..DIM as u8).map(Monomial)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Holomorphic degree.
    pub fn p(self) -> usize {
        (self.0 & 0b000111).count_ones() as usize
    }

    /// Antiholomorphic degree.
    pub fn q(self) -> usize {
        (self.0 & 0b111000).count_ones() as usize
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Wedge of two monomials: the product monomial and its reordering sign.
    pub fn wedge(self, o: Monomial) -> Option<(Monomial, bool)> {
        if self.0 & o.0 != 0 {
            return None;
        }
        let mut swaps = 0;
        for j in 0..6 {
            if o.0 & (1 << j) != 0 {
                swaps += (self.0 >> (j + 1)).count_ones();
            }
        }
        Some((Monomial(self.0 | o.0), swaps % 2 == 1))
    }

    /// Complex conjugate: the swapped monomial and whether the sign flips.
    pub fn conj(self) -> (Monomial, bool) {
        let swapped = ((self.0 & 0b000111) << 3) | (self.0 >> 3);
        (Monomial(swapped), (self.p() * self.q()) % 2 == 1)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        let mut first = true;
        for b in 0..6 {
            if self.0 & (1 << b) != 0 {
                if !first {
                    write!(f, "^")?;
                }
                let (letter, k) = if b < 3 { ('x', b + 1) } else { ('y', b - 2) };
                write!(f, "{letter}{k}")?;
                first = false;
            }
        }
        Ok(())
    }
}

impl FromStr for Monomial {
    type Err = FormError;

    /// Parses "x1^x2^y3" (any order, sign must be handled by the caller
    /// through [`parse_monomial_signed`]) or "1".
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match parse_monomial_signed(s)? {
            (m, false) => Ok(m),
            (_, true) => Err(FormError::BadMonomial(format!("{s} is not in canonical order"))),
        }
    }
}

/// Parses a product of generators in any order, returning the canonical
/// monomial and whether reordering flips the sign.
pub fn parse_monomial_signed(s: &str) -> Result<(Monomial, bool), FormError> {
    let bad = || FormError::BadMonomial(s.to_string());
    let t = s.trim();
    if t == "1" {
        return Ok((Monomial::ONE, false));
    }
    let mut acc = Monomial::ONE;
    let mut neg = false;
    for part in t.split('^') {
        let part = part.trim();
        let mut chars = part.chars();
        let offset = match chars.next() {
            Some('x') => 0,
            Some('y') => 3,
            _ => return Err(bad()),
        };
        let k: u8 = chars.as_str().parse().map_err(|_| bad())?;
        if !(1..=3).contains(&k) {
            return Err(bad());
        }
        let g = Monomial(1 << (offset + k - 1));
        let (m, flip) = acc.wedge(g).ok_or_else(bad)?;
        acc = m;
        neg ^= flip;
    }
    Ok((acc, neg))
}

/// A form: dense coefficient vector on the monomial basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Form<F> {
    coeffs: Vec<F>,
}

impl<F: Field> Form<F> {
    pub fn zero() -> Self {
        Form { coeffs: vec![F::zero(); DIM] }
    }

    pub fn one() -> Self {
        Self::monomial(Monomial::ONE, F::one())
    }

    pub fn monomial(m: Monomial, c: F) -> Self {
        let mut f = Self::zero();
        f.coeffs[m.index()] = c;
        f
    }

    /// ξ_k for k in 1..=3.
    pub fn xi(k: usize) -> Self {
        assert!((1..=3).contains(&k));
        Self::monomial(Monomial(1 << (k - 1)), F::one())
    }

    /// ξ̄_k for k in 1..=3.
    pub fn xi_bar(k: usize) -> Self {
        assert!((1..=3).contains(&k));
        Self::monomial(Monomial(1 << (k + 2)), F::one())
    }

    /// The generator with bit index 0..6.
    pub fn generator(bit: usize) -> Self {
        Self::monomial(Monomial(1 << bit), F::one())
    }

    pub fn from_coeffs(coeffs: Vec<F>) -> Self {
        assert_eq!(coeffs.len(), DIM);
        Form { coeffs }
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, m: Monomial) -> &F {
        &self.coeffs[m.index()]
    }

    pub fn set(&mut self, m: Monomial, c: F) {
        self.coeffs[m.index()] = c;
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &F)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_structural_zero())
            .map(|(k, c)| (Monomial(k as u8), c))
    }

    pub fn add(&self, o: &Self) -> Self {
        Form { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.add_ref(b)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Form { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.sub_ref(b)).collect() }
    }

    pub fn neg(&self) -> Self {
        Form { coeffs: self.coeffs.iter().map(F::neg_ref).collect() }
    }

    pub fn scale(&self, c: &F) -> Self {
        Form { coeffs: self.coeffs.iter().map(|a| a.mul_ref(c)).collect() }
    }

    pub fn wedge(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, a) in self.terms() {
            for (mb, b) in o.terms() {
                if let Some((m, neg)) = ma.wedge(mb) {
                    let t = a.mul_ref(b);
                    let slot = &mut out.coeffs[m.index()];
                    *slot = if neg { slot.sub_ref(&t) } else { slot.add_ref(&t) };
                }
            }
        }
        out
    }

    /// Wedge power a ∧ a ∧ … (n factors); `power(0)` is 1.
    pub fn power(&self, n: usize) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc.wedge(self))
    }

    fn filtered(&self, keep: impl Fn(Monomial) -> bool) -> Self {
        Form {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if keep(Monomial(k as u8)) { c.clone() } else { F::zero() })
                .collect(),
        }
    }

    /// The (p,q)-component.
    pub fn bigrade(&self, p: usize, q: usize) -> Self {
        self.filtered(|m| m.p() == p && m.q() == q)
    }

    /// The degree-k component.
    pub fn degree_part(&self, k: usize) -> Self {
        self.filtered(|m| m.degree() == k)
    }

    /// The bidegree if all nonzero terms share one.
    pub fn pure_bidegree(&self) -> Option<(usize, usize)> {
        let mut it = self.terms().map(|(m, _)| (m.p(), m.q()));
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }

    /// The degree if all nonzero terms share one.
    pub fn pure_degree(&self) -> Option<usize> {
        let mut it = self.terms().map(|(m, _)| m.degree());
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }

    /// Parity of a form whose terms all have the same degree parity.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms().map(|(m, _)| Parity::of(m.degree()));
        let first = it.next().unwrap_or(Parity::Even);
        it.all(|b| b == first).then_some(first)
    }

    pub fn conj(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in self.terms() {
            let (mc, neg) = m.conj();
            let v = c.conj();
            out.coeffs[mc.index()] = if neg { v.neg_ref() } else { v };
        }
        out
    }

    /// (a + ā)/2.
    pub fn re(&self) -> Self {
        let half = F::from_scalar(&Scalar::ratio(1, 2));
        self.add(&self.conj()).scale(&half)
    }

    /// (a − ā)/(2i).
    pub fn im(&self) -> Self {
        let k = F::from_scalar(&"-1/2 i".parse().expect("constant"));
        self.sub(&self.conj()).scale(&k)
    }

    /// ⟨a, b⟩ = Σ a_m · conj(b_m).
    pub fn inner(&self, o: &Self) -> F {
        self.coeffs
            .iter()
            .zip(&o.coeffs)
            .filter(|(a, b)| !a.is_structural_zero() && !b.is_structural_zero())
            .fold(F::zero(), |acc, (a, b)| acc.add_ref(&a.mul_ref(&b.conj())))
    }

    /// Exact zero test (tolerance-based in float mode).
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(F::is_zero)
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(F::magnitude).fold(0.0, f64::max)
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Form<G> {
        Form { coeffs: self.coeffs.iter().map(f).collect() }
    }
}

impl Form<Scalar> {
    pub fn to_float(&self) -> Form<Complex64> {
        self.map(Scalar::to_complex)
    }

    /// Reads a form from a map of monomial strings to scalar strings.
    pub fn from_strings<'a>(
        entries: impl IntoIterator<Item = (&'a str, &'a str)>,
        disc: u32,
    ) -> Result<Self, FormError> {
        let mut out = Self::zero_in(disc);
        for (m, c) in entries {
            let (mono, neg) = parse_monomial_signed(m)?;
            let v = Scalar::parse_in(c, disc)?;
            let v = if neg { v.neg_ref() } else { v };
            out.coeffs[mono.index()] = out.coeffs[mono.index()].add_ref(&v);
        }
        Ok(out)
    }

    fn zero_in(disc: u32) -> Self {
        Form { coeffs: vec![Scalar::zero_in(disc); DIM] }
    }
}

impl<F: Field> fmt::Display for Form<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "({}) {}", c.render(), m)?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl<F: Field> Serialize for Form<F> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<_> = self.terms().collect();
        let mut map = s.serialize_map(Some(terms.len()))?;
        for (m, c) in terms {
            map.serialize_entry(&m.to_string(), &c.render())?;
        }
        map.end()
    }
}

/// ω = i Σ ξ_k ∧ ξ̄_k, the Hermitian form of the unit coframe.
pub fn kahler_form<F: Field>() -> Form<F> {
    (1..=3).fold(Form::zero(), |acc, k| acc.add(&Form::xi(k).wedge(&Form::xi_bar(k)))).scale(&F::i())
}

/// ξ₁ ∧ ξ₂ ∧ ξ₃.
pub fn holomorphic_volume<F: Field>() -> Form<F> {
    Form::xi(1).wedge(&Form::xi(2)).wedge(&Form::xi(3))
}

/// ω³/6 for the standard ω of [`kahler_form`].
pub fn volume_form<F: Field>() -> Form<F> {
    kahler_form::<F>().power(3).scale(&F::from_scalar(&Scalar::ratio(1, 6)))
}

#[cfg(test)]
mod tests {
    use super::*;

    type S = Scalar;

    fn sc(x: &str) -> S {
        x.parse().unwrap()
    }

    #[test]
    fn alternation_and_order() {
        let x1 = Form::<S>::xi(1);
        assert!(x1.wedge(&x1).is_zero());
        let p = x1.wedge(&Form::xi_bar(1));
        assert_eq!(p, Form::monomial(Monomial(0b001001), S::one()));
        let q = Form::<S>::xi_bar(1).wedge(&x1);
        assert_eq!(q, p.neg());
    }

    #[test]
    fn omega_cubed() {
        // With ω = iΣξξ̄, ω³ = 6 i³ ξ₁ξ̄₁ξ₂ξ̄₂ξ₃ξ̄₃ = −6i times that product.
        let w3 = kahler_form::<S>().power(3);
        let prod = (1..=3).fold(Form::<S>::one(), |a, k| a.wedge(&Form::xi(k)).wedge(&Form::xi_bar(k)));
        assert_eq!(w3, prod.scale(&sc("-6 i")));
    }

    #[test]
    fn volume_is_unit() {
        let vol = volume_form::<S>();
        assert_eq!(vol.inner(&vol), S::one());
        assert_eq!(vol.bigrade(3, 3), vol);
        assert_eq!(vol.conj(), vol);
    }

    #[test]
    fn bigrading() {
        let w = kahler_form::<S>();
        assert_eq!(w.bigrade(1, 1), w);
        let om = holomorphic_volume::<S>();
        assert_eq!(om.bigrade(3, 0), om);
        assert!(om.bigrade(0, 3).is_zero());
        assert_eq!(om.re().bigrade(0, 3), om.conj().scale(&sc("1/2")));
        let total = (0..=3)
            .flat_map(|p| (0..=3).map(move |q| (p, q)))
            .fold(Form::<S>::zero(), |a, (p, q)| a.add(&w.add(&om).bigrade(p, q)));
        assert_eq!(total, w.add(&om));
    }

    #[test]
    fn inner_products() {
        assert_eq!(Form::<S>::xi(1).inner(&Form::xi(1)), S::one());
        assert_eq!(Form::<S>::xi(1).inner(&Form::xi_bar(1)), S::zero());
        let w = kahler_form::<S>();
        assert_eq!(w.inner(&w), sc("3"));
    }

    #[test]
    fn omega_is_real() {
        let w = kahler_form::<S>();
        assert_eq!(w.conj(), w);
        assert!(w.im().is_zero());
    }

    #[test]
    fn wedge_associative_and_conj_multiplicative() {
        for a in Monomial::all() {
            for b in Monomial::all() {
                let fa = Form::<S>::monomial(a, S::one());
                let fb = Form::<S>::monomial(b, sc("i"));
                assert_eq!(fa.wedge(&fb).conj(), fa.conj().wedge(&fb.conj()));
                for c in [Monomial(1), Monomial(9), Monomial(36), Monomial(7)] {
                    let fc = Form::<S>::monomial(c, S::one());
                    assert_eq!(fa.wedge(&fb).wedge(&fc), fa.wedge(&fb.wedge(&fc)));
                }
            }
        }
    }

    #[test]
    fn graded_commutative() {
        for a in Monomial::all() {
            for b in Monomial::all() {
                let fa = Form::<S>::monomial(a, S::one());
                let fb = Form::<S>::monomial(b, S::one());
                let lhs = fa.wedge(&fb);
                let rhs = fb.wedge(&fa);
                if a.degree() * b.degree() % 2 == 1 {
                    assert_eq!(lhs, rhs.neg());
                } else {
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn conj_involution() {
        for m in Monomial::all() {
            let f = Form::<S>::monomial(m, sc("1 + 2 i"));
            assert_eq!(f.conj().conj(), f);
        }
    }

    #[test]
    fn monomial_strings() {
        for m in Monomial::all() {
            assert_eq!(m.to_string().parse::<Monomial>().unwrap(), m);
        }
        assert_eq!(parse_monomial_signed("y1^x1").unwrap(), (Monomial(0b001001), true));
        assert!("x1^x1".parse::<Monomial>().is_err());
        assert!("z2".parse::<Monomial>().is_err());
    }

    #[test]
    fn forms_from_strings() {
        let w = Form::from_strings([("x1^y1", "i"), ("x2^y2", "i"), ("y3^x3", "-i")], 3).unwrap();
        assert_eq!(w, kahler_form());
        let json = serde_json::to_string(&w).unwrap();
        assert_eq!(json, r#"{"x1^y1":"i","x2^y2":"i","x3^y3":"i"}"#);
    }
}
