//! Rationals with an `i64` fast path and a `BigRational` fallback.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug)]
pub(crate) enum Q {
    Small(Rational64),
    Big(Box<BigRational>),
}

impl Q {
    pub fn zero() -> Q {
        Q::Small(Rational64::zero())
    }

    pub fn one() -> Q {
        Q::Small(Rational64::one())
    }

    pub fn from_integer(n: i64) -> Q {
        Q::Small(Rational64::from_integer(n))
    }

    /// Demotes to the small form when numerator and denominator fit.
    pub fn from_big(b: BigRational) -> Q {
        match (b.numer().to_i64(), b.denom().to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN => Q::Small(Rational64::new_raw(n, d)),
            _ => Q::Big(Box::new(b)),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Q::Small(r) => BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom())),
            Q::Big(b) => (**b).clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Q::Small(r) => r.is_zero(),
            Q::Big(b) => b.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Q::Small(r) => r.is_one(),
            Q::Big(b) => b.is_one(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Q::Small(r) => r.is_negative(),
            Q::Big(b) => b.is_negative(),
        }
    }

    pub fn abs(&self) -> Q {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Q::Small(r) => *r.numer() as f64 / *r.denom() as f64,
            Q::Big(b) => b.to_f64().unwrap_or_else(|| {
                b.numer().to_f64().unwrap_or(f64::NAN) / b.denom().to_f64().unwrap_or(f64::NAN)
            }),
        }
    }

    fn small_or_big(
        &self,
        o: &Q,
        small: impl Fn(&Rational64, &Rational64) -> Option<Rational64>,
        big: impl Fn(BigRational, BigRational) -> BigRational,
    ) -> Q {
        if let (Q::Small(a), Q::Small(b)) = (self, o) {
            if let Some(c) = small(a, b) {
                if *c.numer() != i64::MIN {
                    return Q::Small(c);
                }
            }
        }
        Q::from_big(big(self.to_big(), o.to_big()))
    }
}

impl PartialEq for Q {
    fn eq(&self, o: &Q) -> bool {
        match (self, o) {
            (Q::Small(a), Q::Small(b)) => a == b,
            _ => self.to_big() == o.to_big(),
        }
    }
}

impl Eq for Q {}

impl PartialOrd for Q {
    fn partial_cmp(&self, o: &Q) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Q {
    fn cmp(&self, o: &Q) -> Ordering {
        match (self, o) {
            (Q::Small(a), Q::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&o.to_big()),
        }
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Q::Small(r) => write!(f, "{r}"),
            Q::Big(b) => write!(f, "{b}"),
        }
    }
}

impl Add for &Q {
    type Output = Q;
    fn add(self, o: &Q) -> Q {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        self.small_or_big(o, |a, b| a.checked_add(b), |a, b| a + b)
    }
}

impl Sub for &Q {
    type Output = Q;
    fn sub(self, o: &Q) -> Q {
        if o.is_zero() {
            return self.clone();
        }
        self.small_or_big(o, |a, b| a.checked_sub(b), |a, b| a - b)
    }
}

impl Mul for &Q {
    type Output = Q;
    fn mul(self, o: &Q) -> Q {
        self.small_or_big(o, |a, b| a.checked_mul(b), |a, b| a * b)
    }
}

impl Div for &Q {
    type Output = Q;
    fn div(self, o: &Q) -> Q {
        assert!(!o.is_zero(), "rational division by zero");
        self.small_or_big(o, |a, b| a.checked_div(b), |a, b| a / b)
    }
}

impl Neg for &Q {
    type Output = Q;
    fn neg(self) -> Q {
        match self {
            Q::Small(r) => Q::Small(-r),
            Q::Big(b) => Q::from_big(-(**b).clone()),
        }
    }
}

impl Add for Q {
    type Output = Q;
    fn add(self, o: Q) -> Q {
        &self + &o
    }
}

impl Sub for Q {
    type Output = Q;
    fn sub(self, o: Q) -> Q {
        &self - &o
    }
}

impl Mul for Q {
    type Output = Q;
    fn mul(self, o: Q) -> Q {
        &self * &o
    }
}

impl Mul<&Q> for Q {
    type Output = Q;
    fn mul(self, o: &Q) -> Q {
        &self * o
    }
}

impl Neg for Q {
    type Output = Q;
    fn neg(self) -> Q {
        -&self
    }
}

impl AddAssign for Q {
    fn add_assign(&mut self, o: Q) {
        *self = &*self + &o;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = Q::from_integer(i64::MAX);
        let sum = &big + &big;
        assert!(matches!(sum, Q::Big(_)));
        let back = &sum - &big;
        assert!(matches!(back, Q::Small(_)));
        assert_eq!(back, big);
        let sq = &big * &big;
        assert_eq!(&sq / &big, big);
    }

    #[test]
    fn small_arithmetic() {
        let a = Q::Small(Rational64::new(1, 3));
        let b = Q::Small(Rational64::new(-1, 6));
        assert_eq!((&a + &b).to_string(), "1/6");
        assert_eq!((&a * &b).to_string(), "-1/18");
        assert!((-&a).is_negative());
        assert_eq!(a.cmp(&b), Ordering::Greater);
    }
}
