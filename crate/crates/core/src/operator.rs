//! Parity-graded linear operators on the exterior algebra.
//!
//! A [`LinOp`] is a 64×64 matrix in the monomial basis together with a
//! declared [`Parity`]. Supercommutators refuse operators without one.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::exterior::{Form, Monomial, Parity, DIM};
use crate::scalar::{Field, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OpError {
    #[error("operator {0} has no definite parity")]
    MixedParity(String),
    #[error("entry {row} <- {col} contradicts declared parity {parity:?}")]
    ParityMismatch { row: Monomial, col: Monomial, parity: Parity },
    #[error("derivation image of generator {bit} has wrong parity")]
    GeneratorImage { bit: usize },
}

/// Linear endomorphism of Λ*(V); `entries[r * 64 + c]` is the coefficient of
/// monomial r in the image of monomial c.
#[derive(Clone, Debug, PartialEq)]
pub struct LinOp<F> {
    entries: Vec<F>,
    parity: Option<Parity>,
}

fn degree_shift(r: usize, c: usize) -> Parity {
    Parity::of(Monomial(r as u8).degree() + Monomial(c as u8).degree())
}

impl<F: Field> LinOp<F> {
    pub fn zero(parity: Parity) -> Self {
        LinOp { entries: vec![F::zero(); DIM * DIM], parity: Some(parity) }
    }

    pub fn identity() -> Self {
        Self::diagonal(|_| F::one())
    }

    /// Diagonal operator with entries given per monomial.
    pub fn diagonal(f: impl Fn(Monomial) -> F) -> Self {
        let mut op = Self::zero(Parity::Even);
        for m in Monomial::all() {
            op.entries[m.index() * DIM + m.index()] = f(m);
        }
        op
    }

    /// Multiplication by a function of the bidegree.
    pub fn grading(f: impl Fn(usize, usize) -> F) -> Self {
        Self::diagonal(|m| f(m.p(), m.q()))
    }

    /// Builds an operator from its matrix, checking the declared parity.
    pub fn new(entries: Vec<F>, parity: Option<Parity>) -> Result<Self, OpError> {
        assert_eq!(entries.len(), DIM * DIM);
        let op = LinOp { entries, parity };
        if let Some(par) = parity {
            for (r, c, _) in op.nonzeros() {
                if degree_shift(r, c) != par {
                    return Err(OpError::ParityMismatch {
                        row: Monomial(r as u8),
                        col: Monomial(c as u8),
                        parity: par,
                    });
                }
            }
        }
        Ok(op)
    }

    /// Builds an operator from the images of the basis monomials.
    pub fn from_images(images: impl Fn(Monomial) -> Form<F>, parity: Option<Parity>) -> Result<Self, OpError> {
        let mut entries = vec![F::zero(); DIM * DIM];
        for m in Monomial::all() {
            let img = images(m);
            for (r, v) in img.coeffs().iter().enumerate() {
                entries[r * DIM + m.index()] = v.clone();
            }
        }
        Self::new(entries, parity)
    }

    pub fn parity(&self) -> Option<Parity> {
        self.parity
    }

    /// Parity, or an error naming the operator.
    pub fn require_parity(&self, name: &str) -> Result<Parity, OpError> {
        self.parity.ok_or_else(|| OpError::MixedParity(name.to_string()))
    }

    pub fn entry(&self, row: Monomial, col: Monomial) -> &F {
        &self.entries[row.index() * DIM + col.index()]
    }

    pub fn entries(&self) -> &[F] {
        &self.entries
    }

    fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, &F)> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_structural_zero())
            .map(|(k, v)| (k / DIM, k % DIM, v))
    }

    fn is_structurally_zero(&self) -> bool {
        self.entries.iter().all(F::is_structural_zero)
    }

    pub fn apply(&self, x: &Form<F>) -> Form<F> {
        let mut out = vec![F::zero(); DIM];
        for (c, xc) in x.coeffs().iter().enumerate() {
            if xc.is_structural_zero() {
                continue;
            }
            for (r, slot) in out.iter_mut().enumerate() {
                let a = &self.entries[r * DIM + c];
                if !a.is_structural_zero() {
                    *slot = slot.add_ref(&a.mul_ref(xc));
                }
            }
        }
        Form::from_coeffs(out)
    }

    /// The composition self ∘ o.
    pub fn compose(&self, o: &Self) -> Self {
        let mut cols: Vec<Vec<(usize, &F)>> = vec![Vec::new(); DIM];
        for (r, k, v) in self.nonzeros() {
            cols[k].push((r, v));
        }
        let mut entries = vec![F::zero(); DIM * DIM];
        for (k, c, b) in o.nonzeros() {
            for &(r, a) in &cols[k] {
                let slot = &mut entries[r * DIM + c];
                *slot = slot.add_ref(&a.mul_ref(b));
            }
        }
        let parity = match (self.parity, o.parity) {
            (Some(a), Some(b)) => Some(a.add(b)),
            _ => None,
        };
        LinOp { entries, parity }
    }

    fn combine(&self, o: &Self, f: impl Fn(&F, &F) -> F) -> Self {
        let entries = self
            .entries
            .iter()
            .zip(&o.entries)
            .map(|(a, b)| if b.is_structural_zero() { a.clone() } else { f(a, b) })
            .collect();
        let parity = if self.parity == o.parity || o.is_structurally_zero() {
            self.parity
        } else if self.is_structurally_zero() {
            o.parity
        } else {
            None
        };
        LinOp { entries, parity }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.combine(o, F::add_ref)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.combine(o, F::sub_ref)
    }

    pub fn neg(&self) -> Self {
        LinOp { entries: self.entries.iter().map(F::neg_ref).collect(), parity: self.parity }
    }

    pub fn scale(&self, c: &F) -> Self {
        LinOp { entries: self.entries.iter().map(|a| a.mul_ref(c)).collect(), parity: self.parity }
    }

    /// {A, B} = AB − (−1)^{|A||B|} BA.
    pub fn supercommutator(&self, o: &Self) -> Result<Self, OpError> {
        let pa = self.require_parity("left operand")?;
        let pb = o.require_parity("right operand")?;
        let ab = self.compose(o);
        let ba = o.compose(self);
        let mut out = if pa.both_odd(pb) { ab.add(&ba) } else { ab.sub(&ba) };
        out.parity = Some(pa.add(pb));
        Ok(out)
    }

    /// Plain commutator AB − BA.
    pub fn commutator(&self, o: &Self) -> Self {
        self.compose(o).sub(&o.compose(self))
    }

    /// Plain anticommutator AB + BA.
    pub fn anticommutator(&self, o: &Self) -> Self {
        self.compose(o).add(&o.compose(self))
    }

    /// Conjugate transpose with respect to the orthonormal monomial basis.
    pub fn adjoint(&self) -> Self {
        let mut entries = vec![F::zero(); DIM * DIM];
        for (r, c, v) in self.nonzeros() {
            entries[c * DIM + r] = v.conj();
        }
        LinOp { entries, parity: self.parity }
    }

    /// The operator x ↦ conj(A(conj x)).
    pub fn conjugate(&self) -> Self {
        let mut entries = vec![F::zero(); DIM * DIM];
        for (r, c, v) in self.nonzeros() {
            let (rc, nr) = Monomial(r as u8).conj();
            let (cc, nc) = Monomial(c as u8).conj();
            let w = v.conj();
            entries[rc.index() * DIM + cc.index()] = if nr != nc { w.neg_ref() } else { w };
        }
        LinOp { entries, parity: self.parity }
    }

    /// The part of the operator shifting bidegree by (dp, dq).
    pub fn bidegree_component(&self, dp: i32, dq: i32) -> Self {
        let mut entries = vec![F::zero(); DIM * DIM];
        for (r, c, v) in self.nonzeros() {
            let (mr, mc) = (Monomial(r as u8), Monomial(c as u8));
            if mr.p() as i32 - mc.p() as i32 == dp && mr.q() as i32 - mc.q() as i32 == dq {
                entries[r * DIM + c] = v.clone();
            }
        }
        let parity = Some(Parity::of((dp + dq).unsigned_abs() as usize));
        LinOp { entries, parity }
    }

    /// All bidegree shifts carried by a nonzero entry, sorted.
    pub fn bidegree_support(&self) -> Vec<(i32, i32)> {
        let mut out: Vec<(i32, i32)> = self
            .nonzeros()
            .filter(|(_, _, v)| !v.is_zero())
            .map(|(r, c, _)| {
                let (mr, mc) = (Monomial(r as u8), Monomial(c as u8));
                (mr.p() as i32 - mc.p() as i32, mr.q() as i32 - mc.q() as i32)
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// True when the operator maps each Λ^{p,q} into itself.
    pub fn preserves_bigrading(&self) -> bool {
        self.bidegree_support().iter().all(|&s| s == (0, 0))
    }

    /// The operator precomposed with the projection onto Λ^{p,q}.
    pub fn restrict(&self, p: usize, q: usize) -> Self {
        let mut out = self.clone();
        for (k, v) in out.entries.iter_mut().enumerate() {
            let c = Monomial((k % DIM) as u8);
            if c.p() != p || c.q() != q {
                *v = F::zero();
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(F::is_zero)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(F::magnitude).fold(0.0, f64::max)
    }

    /// Multiplication L_a by a form, x ↦ a ∧ x.
    pub fn mult(a: &Form<F>) -> Self {
        let parity = a.parity();
        let mut entries = vec![F::zero(); DIM * DIM];
        for (ma, v) in a.terms() {
            for c in Monomial::all() {
                if let Some((r, neg)) = ma.wedge(c) {
                    let slot = &mut entries[r.index() * DIM + c.index()];
                    *slot = if neg { slot.sub_ref(v) } else { slot.add_ref(v) };
                }
            }
        }
        LinOp { entries, parity }
    }

    /// The adjoint Λ_a of multiplication by a.
    pub fn contraction(a: &Form<F>) -> Self {
        Self::mult(a).adjoint()
    }

    /// Extends images of the six generators (bits 0..6) to the unique
    /// derivation of the given parity vanishing on scalars.
    pub fn derivation_extend(images: &[Form<F>; 6], parity: Parity) -> Result<Self, OpError> {
        for (bit, img) in images.iter().enumerate() {
            match img.parity() {
                Some(p) if p == parity.add(Parity::Odd) || img.terms().next().is_none() => {}
                _ => return Err(OpError::GeneratorImage { bit }),
            }
        }
        let mut entries = vec![F::zero(); DIM * DIM];
        for m in Monomial::all() {
            let mut image = Form::<F>::zero();
            let mut prefix = Monomial::ONE;
            for bit in 0..6 {
                if m.0 & (1 << bit) == 0 {
                    continue;
                }
                let suffix = Monomial(m.0 & !((1u8 << (bit + 1)) - 1));
                let odd_past = parity == Parity::Odd && prefix.degree() % 2 == 1;
                let term = Form::monomial(prefix, F::one())
                    .wedge(&images[bit])
                    .wedge(&Form::monomial(suffix, F::one()));
                image = if odd_past { image.sub(&term) } else { image.add(&term) };
                prefix = Monomial(prefix.0 | (1 << bit));
            }
            for (r, v) in image.coeffs().iter().enumerate() {
                entries[r * DIM + m.index()] = v.clone();
            }
        }
        Self::new(entries, Some(parity))
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> LinOp<G> {
        LinOp { entries: self.entries.iter().map(f).collect(), parity: self.parity }
    }

    /// Sparse triplets (row monomial, column monomial, value).
    pub fn triplets(&self) -> Vec<Triplet> {
        self.nonzeros()
            .map(|(r, c, v)| Triplet {
                row: Monomial(r as u8).to_string(),
                col: Monomial(c as u8).to_string(),
                value: v.render(),
            })
            .collect()
    }
}

impl LinOp<Scalar> {
    pub fn to_float(&self) -> LinOp<Complex64> {
        self.map(Scalar::to_complex)
    }
}

/// One nonzero matrix entry in serialized form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Triplet {
    pub row: String,
    pub col: String,
    pub value: String,
}

impl<F: Field> fmt::Display for LinOp<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in self.triplets() {
            writeln!(f, "{} <- {}: {}", t.row, t.col, t.value)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{holomorphic_volume, kahler_form};

    type S = Scalar;
    type Op = LinOp<S>;

    fn sc(x: &str) -> S {
        x.parse().unwrap()
    }

    fn odd_samples() -> Vec<Op> {
        vec![
            Op::mult(&Form::xi(1)),
            Op::contraction(&Form::xi_bar(2)),
            Op::mult(&holomorphic_volume()).add(&Op::contraction(&Form::xi(3).scale(&sc("i")))),
        ]
    }

    #[test]
    fn square_of_odd_operator() {
        for a in odd_samples() {
            let lhs = a.supercommutator(&a).unwrap();
            assert_eq!(lhs, a.compose(&a).scale(&sc("2")));
        }
    }

    #[test]
    fn lefschetz_bracket() {
        let w = kahler_form::<S>();
        let h = Op::mult(&w).supercommutator(&Op::contraction(&w)).unwrap();
        assert_eq!(h, Op::grading(|p, q| S::from_i64(p as i64 + q as i64 - 3)));
    }

    #[test]
    fn multiplications_commute() {
        let a = Op::mult(&Form::xi(1));
        let b = Op::mult(&Form::xi_bar(1));
        assert!(a.supercommutator(&b).unwrap().is_zero());
    }

    #[test]
    fn mixed_parity_rejected() {
        let mixed = Op::mult(&Form::one().add(&Form::xi(1)));
        assert_eq!(mixed.parity(), None);
        assert!(mixed.supercommutator(&Op::identity()).is_err());
        assert!(Op::new(Op::mult(&Form::xi(1)).entries().to_vec(), Some(Parity::Even)).is_err());
    }

    #[test]
    fn adjoint_properties() {
        assert_eq!(Op::identity().adjoint(), Op::identity());
        let w = kahler_form::<S>();
        let lam = Op::mult(&w).adjoint();
        assert_eq!(lam.apply(&w), Form::one().scale(&sc("3")));
        let a = Op::mult(&Form::xi(2).scale(&sc("1 + i")));
        let b = Op::contraction(&holomorphic_volume()).add(&Op::mult(&Form::xi_bar(3)));
        assert_eq!(a.adjoint().adjoint(), a);
        assert_eq!(a.compose(&b).adjoint(), b.adjoint().compose(&a.adjoint()));
        let x = Form::<S>::xi(1).wedge(&Form::xi_bar(3)).add(&Form::xi(2).scale(&sc("2 i")));
        let y = Form::<S>::xi(1).wedge(&Form::xi(2)).wedge(&Form::xi_bar(3));
        assert_eq!(a.apply(&x).inner(&y), x.inner(&a.adjoint().apply(&y)));
    }

    #[test]
    fn conjugate_involution() {
        let a = Op::mult(&holomorphic_volume().scale(&sc("i")));
        assert_eq!(a.conjugate().conjugate(), a);
        assert_eq!(a.conjugate(), Op::mult(&holomorphic_volume().scale(&sc("i")).conj()));
    }

    #[test]
    fn bidegree_components_sum() {
        let w = kahler_form::<S>();
        let l = Op::mult(&w);
        assert_eq!(l.bidegree_component(1, 1), l);
        let mix = l.add(&Op::contraction(&w)).add(&Op::identity());
        let sum = mix
            .bidegree_support()
            .iter()
            .fold(Op::zero(Parity::Even), |acc, &(dp, dq)| acc.add(&mix.bidegree_component(dp, dq)));
        assert_eq!(sum, mix);
    }

    #[test]
    fn derivation_leibniz() {
        let mut imgs: [Form<S>; 6] = std::array::from_fn(|_| Form::zero());
        imgs[3] = Form::xi(2).wedge(&Form::xi(3));
        imgs[4] = Form::xi(1).wedge(&Form::xi(3)).neg();
        imgs[5] = Form::xi(1).wedge(&Form::xi(2));
        let n = Op::derivation_extend(&imgs, Parity::Odd).unwrap();
        for a in Monomial::all() {
            for b in Monomial::all() {
                let fa = Form::monomial(a, S::one());
                let fb = Form::monomial(b, S::one());
                let lhs = n.apply(&fa.wedge(&fb));
                let second = fa.wedge(&n.apply(&fb));
                let rhs = if a.degree() % 2 == 1 {
                    n.apply(&fa).wedge(&fb).sub(&second)
                } else {
                    n.apply(&fa).wedge(&fb).add(&second)
                };
                assert_eq!(lhs, rhs);
            }
        }
        // Leibniz expansion of the table on ξ̄₁∧ξ̄₂.
        let v = n.apply(&Form::xi_bar(1).wedge(&Form::xi_bar(2)));
        let expect = Form::xi(2)
            .wedge(&Form::xi(3))
            .wedge(&Form::xi_bar(2))
            .add(&Form::xi_bar(1).wedge(&Form::xi(1)).wedge(&Form::xi(3)));
        assert_eq!(v, expect);
        assert!(n.apply(&Form::one()).is_zero());
    }

    #[test]
    fn derivation_rejects_bad_images() {
        let mut imgs: [Form<S>; 6] = std::array::from_fn(|_| Form::zero());
        imgs[0] = Form::xi(2);
        assert!(Op::derivation_extend(&imgs, Parity::Odd).is_err());
        let zero: [Form<S>; 6] = std::array::from_fn(|_| Form::zero());
        assert!(Op::derivation_extend(&zero, Parity::Odd).unwrap().is_zero());
    }

    #[test]
    fn graded_jacobi() {
        let a = Op::mult(&Form::xi(1)).add(&Op::contraction(&Form::xi_bar(1)));
        let b = Op::contraction(&kahler_form());
        let c = Op::mult(&holomorphic_volume()).add(&Op::contraction(&Form::xi(2)));
        for (x, y, z) in [(&a, &b, &c), (&b, &c, &a), (&c, &a, &b), (&a, &a, &c)] {
            let lhs = x.supercommutator(&y.supercommutator(z).unwrap()).unwrap();
            let first = x.supercommutator(y).unwrap().supercommutator(z).unwrap();
            let second = y.supercommutator(&x.supercommutator(z).unwrap()).unwrap();
            let sign = x.parity().unwrap().both_odd(y.parity().unwrap());
            let rhs = if sign { first.sub(&second) } else { first.add(&second) };
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn triplets_are_sparse() {
        let l = Op::mult(&Form::xi(1));
        assert_eq!(l.triplets().len(), 32);
        assert_eq!(l.triplets()[0], Triplet { row: "x1".into(), col: "1".into(), value: "1".into() });
    }
}
