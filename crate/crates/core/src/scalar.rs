//! Scalars: exact elements of ℚ(i, √D) and a floating-point stand-in.
//!
//! Every numeric routine in the crate is generic over [`Field`], which is
//! implemented by the exact [`Scalar`] and by [`Complex64`] for float mode.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

mod rational;
use rational::Q;
use thiserror::Error;

/// Discriminant used when none is given.
pub const DEFAULT_D: u32 = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse scalar {0:?}: {1}")]
    Parse(String, String),
    #[error("field discriminant {0} must be a square-free integer ≥ 2")]
    BadDiscriminant(u32),
}

/// Arithmetic needed by forms, operators and elimination.
pub trait Field: Clone + fmt::Debug + Send + Sync + 'static {
    /// True when `is_zero` is an exact test.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    /// The imaginary unit.
    fn i() -> Self;
    fn from_i64(n: i64) -> Self;
    /// Embeds an exact scalar.
    fn from_scalar(s: &Scalar) -> Self;

    /// Exact zero test for [`Scalar`]; for floats, a pivot threshold.
    fn is_zero(&self) -> bool;
    /// True only for an exact (bitwise) zero; used to skip work.
    fn is_structural_zero(&self) -> bool;

    fn add_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn inv(&self) -> Result<Self, ScalarError>;
    fn conj(&self) -> Self;

    /// Modulus as a float.
    fn magnitude(&self) -> f64;
    /// Real part as a float.
    fn re_f64(&self) -> f64;
    /// Exact string for [`Scalar`], decimal for floats.
    fn render(&self) -> String;

    fn div_ref(&self, other: &Self) -> Result<Self, ScalarError> {
        Ok(self.mul_ref(&other.inv()?))
    }
}

/// Gaussian rational x + y i.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Gauss {
    re: Q,
    im: Q,
}

impl Gauss {
    fn zero() -> Self {
        Gauss { re: Q::zero(), im: Q::zero() }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn add(&self, o: &Gauss) -> Gauss {
        Gauss { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    fn sub(&self, o: &Gauss) -> Gauss {
        Gauss { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    fn neg(&self) -> Gauss {
        Gauss { re: -&self.re, im: -&self.im }
    }

    fn mul(&self, o: &Gauss) -> Gauss {
        if self.is_zero() || o.is_zero() {
            return Gauss::zero();
        }
        if self.im.is_zero() && o.im.is_zero() {
            return Gauss { re: &self.re * &o.re, im: Q::zero() };
        }
        Gauss {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn scale(&self, k: &Q) -> Gauss {
        Gauss { re: &self.re * k, im: &self.im * k }
    }

    fn conj(&self) -> Gauss {
        Gauss { re: self.re.clone(), im: -&self.im }
    }

    fn inv(&self) -> Option<Gauss> {
        let n = &self.re * &self.re + &self.im * &self.im;
        if n.is_zero() {
            return None;
        }
        Some(Gauss { re: &self.re / &n, im: &(-&self.im) / &n })
    }
}

/// Exact element a + b·i + c·r + d·i·r of ℚ(i, √D), where r = √D.
///
/// ```
/// use nkhodge::scalar::{Field, Scalar};
/// let x: Scalar = "1/2 + 3 i r".parse().unwrap();
/// assert_eq!(x.to_string(), "1/2 + 3 i r");
/// assert_eq!((x.clone() * x.conj()).to_string(), "109/4");
/// ```
#[derive(Clone)]
pub struct Scalar {
    rat: Gauss,
    rad: Gauss,
    disc: u32,
}

fn rat(n: i64, d: i64) -> Q {
    Q::from_big(BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn is_square_free(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u32;
    while k.saturating_mul(k) <= n {
        if n.is_multiple_of(k * k) {
            return false;
        }
        k += 1;
    }
    true
}

impl Scalar {
    pub fn zero_in(disc: u32) -> Self {
        Scalar { rat: Gauss::zero(), rad: Gauss::zero(), disc }
    }

    /// The rational number n/d.
    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar { rat: Gauss { re: rat(n, d), im: Q::zero() }, rad: Gauss::zero(), disc: DEFAULT_D }
    }

    /// Builds a + b i + c r + d i r with the default discriminant.
    pub fn from_parts(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        let q = Q::from_big;
        Scalar { rat: Gauss { re: q(a), im: q(b) }, rad: Gauss { re: q(c), im: q(d) }, disc: DEFAULT_D }
    }

    /// √D as a scalar.
    pub fn sqrt_d(disc: u32) -> Result<Self, ScalarError> {
        if !is_square_free(disc) {
            return Err(ScalarError::BadDiscriminant(disc));
        }
        Ok(Scalar {
            rat: Gauss::zero(),
            rad: Gauss { re: Q::one(), im: Q::zero() },
            disc,
        })
    }

    /// Parses a scalar string in the field ℚ(i, √disc).
    pub fn parse_in(s: &str, disc: u32) -> Result<Self, ScalarError> {
        if !is_square_free(disc) {
            return Err(ScalarError::BadDiscriminant(disc));
        }
        let err = |m: &str| ScalarError::Parse(s.to_string(), m.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty"));
        }
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = compact.as_bytes();
        for (k, &ch) in bytes.iter().enumerate() {
            if k > start && (ch == b'+' || ch == b'-') && !matches!(bytes[k - 1], b'/' | b'+' | b'-') {
                terms.push(&compact[start..k]);
                start = k;
            }
        }
        terms.push(&compact[start..]);
        let mut out = Scalar::zero_in(disc);
        for term in terms {
            let (sign, body) = match term.as_bytes().first() {
                Some(b'+') => (1, &term[1..]),
                Some(b'-') => (-1, &term[1..]),
                _ => (1, term),
            };
            let unit_start = body
                .char_indices()
                .find(|(_, c)| *c == 'i' || *c == 'r')
                .map(|(k, _)| k)
                .unwrap_or(body.len());
            let (coeff, units) = body.split_at(unit_start);
            let mut has_i = false;
            let mut has_r = false;
            for c in units.chars() {
                match c {
                    'i' if !has_i => has_i = true,
                    'r' if !has_r => has_r = true,
                    '*' => {}
                    _ => return Err(err("bad unit suffix")),
                }
            }
            let coeff = coeff.trim_end_matches('*');
            let q = if coeff.is_empty() {
                if units.is_empty() {
                    return Err(err("empty term"));
                }
                Q::one()
            } else {
                parse_rational(coeff).ok_or_else(|| err("bad rational"))?
            };
            let q = if sign < 0 { -q } else { q };
            let slot = match (has_r, has_i) {
                (false, false) => &mut out.rat.re,
                (false, true) => &mut out.rat.im,
                (true, false) => &mut out.rad.re,
                (true, true) => &mut out.rad.im,
            };
            *slot += q;
        }
        Ok(out)
    }

    pub fn discriminant(&self) -> u32 {
        self.disc
    }

    /// Components (a, b, c, d) of a + b i + c r + d i r.
    pub fn parts(&self) -> [BigRational; 4] {
        [&self.rat.re, &self.rat.im, &self.rad.re, &self.rad.im].map(Q::to_big)
    }

    /// True when the value lies in ℚ.
    pub fn is_rational(&self) -> bool {
        self.rat.im.is_zero() && self.rad.is_zero()
    }

    /// True when the value is fixed by complex conjugation.
    pub fn is_real(&self) -> bool {
        self.rat.im.is_zero() && self.rad.im.is_zero()
    }

    fn merge_disc(&self, o: &Scalar) -> u32 {
        match (self.rad.is_zero(), o.rad.is_zero()) {
            (false, false) => {
                assert_eq!(self.disc, o.disc, "scalars from different fields ℚ(i,√{}) and ℚ(i,√{})", self.disc, o.disc);
                self.disc
            }
            (false, true) => self.disc,
            (true, false) => o.disc,
            (true, true) => self.disc.max(o.disc),
        }
    }

    /// Field norm down to ℚ(i): (x + y r)(x − y r) = x² − D y².
    fn rel_norm(&self) -> Gauss {
        let d = Q::from_integer(i64::from(self.disc));
        self.rat.mul(&self.rat).sub(&self.rad.mul(&self.rad).scale(&d))
    }

    /// Decimal approximation for human-readable output.
    pub fn to_decimal(&self) -> String {
        render_complex(self.to_complex())
    }

    pub fn to_complex(&self) -> Complex64 {
        let r = f64::from(self.disc).sqrt();
        Complex64::new(
            self.rat.re.to_f64() + r * self.rad.re.to_f64(),
            self.rat.im.to_f64() + r * self.rad.im.to_f64(),
        )
    }
}

fn parse_rational(s: &str) -> Option<Q> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().ok()?;
            let d: BigInt = d.parse().ok()?;
            if num_traits::Zero::is_zero(&d) {
                return None;
            }
            Some(Q::from_big(BigRational::new(n, d)))
        }
        None => Some(Q::from_big(BigRational::from_integer(s.parse().ok()?))),
    }
}

fn render_complex(z: Complex64) -> String {
    let re = if z.re == 0.0 { 0.0 } else { z.re };
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    if im == 0.0 {
        format!("{re:.6}")
    } else if re == 0.0 {
        format!("{im:.6}i")
    } else {
        format!("{re:.6}{im:+.6}i")
    }
}

impl PartialEq for Scalar {
    fn eq(&self, o: &Self) -> bool {
        self.rat == o.rat && self.rad == o.rad && (self.rad.is_zero() || self.disc == o.disc)
    }
}

impl Eq for Scalar {}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = [
            (&self.rat.re, ""),
            (&self.rat.im, " i"),
            (&self.rad.re, " r"),
            (&self.rad.im, " i r"),
        ];
        let mut first = true;
        for (q, unit) in terms {
            if q.is_zero() {
                continue;
            }
            let mag = q.abs();
            let body = if mag.is_one() && !unit.is_empty() {
                unit.trim_start().to_string()
            } else {
                format!("{mag}{unit}")
            };
            match (first, q.is_negative()) {
                (true, false) => write!(f, "{body}")?,
                (true, true) => write!(f, "-{body}")?,
                (false, false) => write!(f, " + {body}")?,
                (false, true) => write!(f, " - {body}")?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl FromStr for Scalar {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scalar::parse_in(s, DEFAULT_D)
    }
}

impl Field for Scalar {
    const EXACT: bool = true;

    fn zero() -> Self {
        Scalar::zero_in(DEFAULT_D)
    }

    fn one() -> Self {
        Scalar::ratio(1, 1)
    }

    fn i() -> Self {
        Scalar { rat: Gauss { re: Q::zero(), im: Q::one() }, rad: Gauss::zero(), disc: DEFAULT_D }
    }

    fn from_i64(n: i64) -> Self {
        Scalar::ratio(n, 1)
    }

    fn from_scalar(s: &Scalar) -> Self {
        s.clone()
    }

    fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.rad.is_zero()
    }

    fn is_structural_zero(&self) -> bool {
        Field::is_zero(self)
    }

    fn add_ref(&self, o: &Self) -> Self {
        if Field::is_zero(o) {
            return self.clone();
        }
        if Field::is_zero(self) {
            return o.clone();
        }
        Scalar { rat: self.rat.add(&o.rat), rad: self.rad.add(&o.rad), disc: self.merge_disc(o) }
    }

    fn sub_ref(&self, o: &Self) -> Self {
        if Field::is_zero(o) {
            return self.clone();
        }
        Scalar { rat: self.rat.sub(&o.rat), rad: self.rad.sub(&o.rad), disc: self.merge_disc(o) }
    }

    fn mul_ref(&self, o: &Self) -> Self {
        let disc = self.merge_disc(o);
        if self.rad.is_zero() && o.rad.is_zero() {
            return Scalar { rat: self.rat.mul(&o.rat), rad: Gauss::zero(), disc };
        }
        let d = Q::from_integer(i64::from(disc));
        Scalar {
            rat: self.rat.mul(&o.rat).add(&self.rad.mul(&o.rad).scale(&d)),
            rad: self.rat.mul(&o.rad).add(&self.rad.mul(&o.rat)),
            disc,
        }
    }

    fn neg_ref(&self) -> Self {
        Scalar { rat: self.rat.neg(), rad: self.rad.neg(), disc: self.disc }
    }

    fn inv(&self) -> Result<Self, ScalarError> {
        // (x + y r)⁻¹ = (x − y r) / (x² − D y²); the denominator is nonzero
        // because √D ∉ ℚ(i) for square-free D ≥ 2.
        let n = self.rel_norm().inv().ok_or(ScalarError::DivisionByZero)?;
        Ok(Scalar { rat: self.rat.mul(&n), rad: self.rad.neg().mul(&n), disc: self.disc })
    }

    fn conj(&self) -> Self {
        Scalar { rat: self.rat.conj(), rad: self.rad.conj(), disc: self.disc }
    }

    fn magnitude(&self) -> f64 {
        self.to_complex().norm()
    }

    fn re_f64(&self) -> f64 {
        self.to_complex().re
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

/// Pivot threshold for floating-point elimination.
pub const FLOAT_PIVOT_TOL: f64 = 1e-9;

impl Field for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn i() -> Self {
        Complex64::new(0.0, 1.0)
    }

    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }

    fn from_scalar(s: &Scalar) -> Self {
        s.to_complex()
    }

    fn is_zero(&self) -> bool {
        self.norm() <= FLOAT_PIVOT_TOL
    }

    fn is_structural_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }

    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }

    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }

    fn neg_ref(&self) -> Self {
        -self
    }

    fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_structural_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Complex64::new(1.0, 0.0) / self)
    }

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn re_f64(&self) -> f64 {
        self.re
    }

    fn render(&self) -> String {
        render_complex(*self)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl std::ops::$tr for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                self.$f(&o)
            }
        }
        impl std::ops::$tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                self.$f(o)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

impl std::ops::Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

/// Sign of a real scalar, or `None` if it is not real.
pub fn real_sign(x: &Scalar) -> Option<Ordering> {
    if !x.is_real() {
        return None;
    }
    // a + c√D compared with 0: decide via squares when signs differ.
    let (a, c) = (&x.rat.re, &x.rad.re);
    let d = Q::from_integer(i64::from(x.disc));
    let sa = a.cmp(&Q::zero());
    let sc = c.cmp(&Q::zero());
    Some(match (sa, sc) {
        (Ordering::Equal, s) | (s, Ordering::Equal) => s,
        (s, t) if s == t => s,
        (s, _) => {
            let lhs = a * a;
            let rhs = c * c * d;
            match lhs.cmp(&rhs) {
                Ordering::Greater => s,
                Ordering::Less => s.reverse(),
                Ordering::Equal => Ordering::Equal,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn gaussian_norm() {
        assert_eq!(s("1 + i") * s("1 - i"), s("2"));
    }

    #[test]
    fn radical_squares() {
        let r = Scalar::sqrt_d(3).unwrap();
        assert_eq!(&r * &r, s("3"));
    }

    #[test]
    fn inverse_of_i() {
        assert_eq!(s("i").inv().unwrap(), s("-i"));
        assert_eq!(s("0").inv(), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn inverse_with_radical() {
        let x = s("1/2 - 2 r + 3/5 i r");
        assert_eq!(x.mul_ref(&x.inv().unwrap()), s("1"));
    }

    #[test]
    fn conjugation() {
        assert_eq!(s("i").conj(), s("-i"));
        assert_eq!(s("2 + 3 i r").conj(), s("2 - 3 i r"));
        assert_eq!(s("5/7").conj(), s("5/7"));
    }

    #[test]
    fn round_trip_strings() {
        for x in ["0", "1", "-1/2 i", "1/3 r", "2 - i + 3/4 r - i r", "-i r"] {
            assert_eq!(s(x).to_string(), x);
        }
        assert_eq!(s("1/2 + -1/3 i").to_string(), "1/2 - 1/3 i");
        assert_eq!(s("2*i*r").to_string(), "2 i r");
    }

    #[test]
    fn parse_errors() {
        assert!("".parse::<Scalar>().is_err());
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("3q".parse::<Scalar>().is_err());
        assert!(Scalar::parse_in("1", 4).is_err());
    }

    #[test]
    fn other_discriminants() {
        let r = Scalar::parse_in("r", 5).unwrap();
        assert_eq!(r.mul_ref(&r), s("5"));
        assert!((r.magnitude() - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn real_signs() {
        assert_eq!(real_sign(&s("1 - r")), Some(Ordering::Less));
        assert_eq!(real_sign(&s("2 - r")), Some(Ordering::Greater));
        assert_eq!(real_sign(&s("-2 + r")), Some(Ordering::Less));
        assert_eq!(real_sign(&s("i")), None);
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(s("1/2 i").to_decimal(), "0.500000i");
        assert_eq!(s("r").to_decimal(), "1.732051");
    }
}
