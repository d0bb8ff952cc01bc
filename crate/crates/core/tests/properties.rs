//! Algebraic laws on random exact data.

use nkhodge::exterior::{Form, Monomial};
use nkhodge::operator::LinOp;
use nkhodge::scalar::{Field, Scalar};
use proptest::prelude::*;

fn scalar() -> impl Strategy<Value = Scalar> {
    (-5i64..=5, 1i64..=4, -5i64..=5, 1i64..=4).prop_map(|(a, b, c, d)| {
        Scalar::ratio(a, b).add_ref(&Scalar::ratio(c, d).mul_ref(&Scalar::i()))
    })
}

fn form() -> impl Strategy<Value = Form<Scalar>> {
    prop::collection::vec((0u8..64, scalar()), 1..5).prop_map(|terms| {
        let mut f = Form::<Scalar>::zero();
        for (m, c) in terms {
            let m = Monomial(m);
            f.set(m, f.coeff(m).add_ref(&c));
        }
        f
    })
}

fn homogeneous_form() -> impl Strategy<Value = Form<Scalar>> {
    (form(), 0usize..=6).prop_map(|(f, k)| f.degree_part(k))
}

fn sign(k: usize, l: usize) -> Scalar {
    if (k * l).is_multiple_of(2) {
        Scalar::one()
    } else {
        Scalar::one().neg_ref()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn field_laws(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(a.mul_ref(&b.add_ref(&c)), a.mul_ref(&b).add_ref(&a.mul_ref(&c)));
        prop_assert_eq!(a.mul_ref(&b), b.mul_ref(&a));
        if !a.is_zero() {
            prop_assert_eq!(a.mul_ref(&a.inv().unwrap()), Scalar::one());
        }
        prop_assert_eq!(a.mul_ref(&b).conj(), a.conj().mul_ref(&b.conj()));
    }

    #[test]
    fn wedge_is_associative(a in form(), b in form(), c in form()) {
        prop_assert_eq!(a.wedge(&b).wedge(&c), a.wedge(&b.wedge(&c)));
    }

    #[test]
    fn wedge_is_graded_commutative(a in homogeneous_form(), b in homogeneous_form()) {
        let (k, l) = (a.pure_degree().unwrap_or(0), b.pure_degree().unwrap_or(0));
        prop_assert_eq!(a.wedge(&b), b.wedge(&a).scale(&sign(k, l)));
    }

    #[test]
    fn adjoint_is_an_involution(a in form(), b in form()) {
        let op = LinOp::mult(&a).compose(&LinOp::contraction(&b.degree_part(1)));
        prop_assert_eq!(op.adjoint().adjoint(), op.clone());
        prop_assert_eq!(op.conjugate().conjugate(), op);
    }

    #[test]
    fn multiplication_adjoint_pairs(a in homogeneous_form(), x in form(), y in form()) {
        let l = LinOp::mult(&a);
        prop_assert_eq!(l.apply(&x).inner(&y), x.inner(&l.adjoint().apply(&y)));
    }

    #[test]
    fn super_jacobi(a in homogeneous_form(), b in homogeneous_form(), c in form()) {
        let x = LinOp::mult(&a);
        let y = LinOp::contraction(&b.degree_part(1));
        let z = LinOp::mult(&c.degree_part(2)).compose(&y);
        let bx = |p: &LinOp<Scalar>, q: &LinOp<Scalar>| p.supercommutator(q).unwrap();
        // {X, {Y, Z}} = {{X, Y}, Z} + (−1)^{|X||Y|} {Y, {X, Z}}
        let lhs = bx(&x, &bx(&y, &z));
        let px = x.parity().unwrap().bit();
        let py = y.parity().unwrap().bit();
        let rhs = bx(&bx(&x, &y), &z).add(&bx(&y, &bx(&x, &z)).scale(&sign(px, py)));
        prop_assert_eq!(lhs, rhs);
    }
}
