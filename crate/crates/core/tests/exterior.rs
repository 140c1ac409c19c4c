mod common;

use common::*;
use hktkit_core::catalog::RXH7_SALAMON;
use hktkit_core::exterior::monomials_of_degree;
use hktkit_core::{Error, Form, LieAlgebra, Monomial, Scalar};
use num_traits::Zero;
use proptest::prelude::*;

fn rxh() -> LieAlgebra {
    LieAlgebra::parse_salamon(RXH7_SALAMON).unwrap()
}

fn wedge_all(idx: &[usize]) -> Form {
    idx.iter().fold(Form::one(), |acc, &k| acc.wedge(&e(k)))
}

#[test]
fn salamon_parses_rxh7() {
    let a = rxh();
    assert_eq!(a.dim(), 8);
    assert_eq!(a.d(&e(6)), wedge_all(&[1, 2]).add(&wedge_all(&[3, 4])));
    assert_eq!(a.d(&e(7)), wedge_all(&[1, 3]).sub(&wedge_all(&[2, 4])));
    assert_eq!(a.d(&e(8)), wedge_all(&[1, 4]).add(&wedge_all(&[2, 3])));
    for k in 1..=5 {
        assert!(a.d(&e(k)).is_zero());
    }
    assert_eq!(a.to_salamon().as_deref(), Some(RXH7_SALAMON));
}

#[test]
fn salamon_abelian_and_errors() {
    let a = LieAlgebra::parse_salamon("0,0,0,0,0,0,0,0").unwrap();
    assert!(a.is_abelian());
    assert_eq!(LieAlgebra::parse_salamon("0,0,12").unwrap_err(), Error::Dimension(3));
    assert!(matches!(LieAlgebra::parse_salamon("0,0,0,1x"), Err(Error::Parse { .. })));
    assert!(matches!(LieAlgebra::parse_salamon("0,0,0,15"), Err(Error::Parse { .. })));
    assert!(matches!(LieAlgebra::parse_salamon("0,0,0,11"), Err(Error::Parse { .. })));
}

#[test]
fn salamon_coefficients() {
    let a = LieAlgebra::parse_salamon("0,0,0,2*12-1/2*13").unwrap();
    let expected = wedge_all(&[1, 2]).scale(&s(2)).sub(&wedge_all(&[1, 3]).scale(&q(1, 2)));
    assert_eq!(a.d(&e(4)), expected);
}

#[test]
fn structured_format_matches_salamon() {
    let text = "dim = 8\n# the quaternionic Heisenberg part\nd e^6 = e^1^e^2 + e^3∧e^4\nd e^7 = e^1^e^3 - e^2^e^4\nd e^8 = e^1^e^4 + e^2^e^3\n";
    assert_eq!(LieAlgebra::parse_structured(text).unwrap(), rxh());
    assert!(LieAlgebra::parse_structured("d e^1 = e^2^e^3\n").is_err());
    assert!(LieAlgebra::parse_structured("dim = 4\nd e^5 = e^1^e^2\n").is_err());
}

#[test]
fn wedge_basics() {
    let m = wedge_all(&[1, 2]);
    let terms: Vec<_> = m.terms().collect();
    assert_eq!(terms.len(), 1);
    assert_eq!(*terms[0].0, Monomial::from_indices(&[0, 1]).unwrap());
    assert_eq!(terms[0].1, &s(1));
    assert_eq!(e(2).wedge(&e(1)), m.neg());
    let x = e(1).add(&e(2));
    assert!(x.wedge(&x).is_zero());
}

#[test]
fn leibniz_example() {
    let a = rxh();
    let lhs = a.d(&e(6).wedge(&e(7)));
    let d6 = wedge_all(&[1, 2]).add(&wedge_all(&[3, 4]));
    let d7 = wedge_all(&[1, 3]).sub(&wedge_all(&[2, 4]));
    let expected = d6.wedge(&e(7)).sub(&e(6).wedge(&d7));
    assert_eq!(lhs, expected);
    assert!(a.d(&e(1)).is_zero());
}

#[test]
fn jacobi() {
    let a = rxh();
    assert!(a.check_jacobi().holds);
    assert!(a.is_nilpotent());
    assert!(LieAlgebra::abelian(8).unwrap().check_jacobi().holds);

    let bad = LieAlgebra::parse_salamon("0,0,0,0,0,12+34,16,0").unwrap();
    let outcome = bad.check_jacobi();
    assert!(!outcome.holds);
    assert_eq!(outcome.first_failure, Some(7));
    assert_eq!(bad.d(&bad.d(&e(7))), wedge_all(&[1, 3, 4]).neg());
}

#[test]
fn top_integration() {
    let a = rxh();
    assert_eq!(a.integrate_top(&wedge_all(&[1, 2, 3, 4, 5, 6, 7, 8])), s(1));
    assert_eq!(a.integrate_top(&wedge_all(&[2, 1, 3, 4, 5, 6, 7, 8])), s(-1));
    assert!(a.integrate_top(&wedge_all(&[1, 2, 3, 4, 5, 6, 7])).is_zero());
}

#[test]
fn nilpotency_of_solvable_example() {
    assert!(!LieAlgebra::parse_salamon("0,12,13,14").unwrap().is_nilpotent());
}

fn form_strategy(dim: usize, k: usize) -> impl Strategy<Value = Form> {
    let basis = monomials_of_degree(dim, k);
    let n = basis.len();
    prop::collection::vec((0..n, -3i64..=3, -3i64..=3), 0..5).prop_map(move |terms| {
        let mut f = Form::zero();
        for (idx, re, im) in terms {
            f.add_term(basis[idx], &Scalar::from_int(re) + &Scalar::from_int(im).mul_i());
        }
        f
    })
}

fn sign(k: usize, l: usize) -> Scalar {
    if k * l % 2 == 0 {
        s(1)
    } else {
        s(-1)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graded_commutativity(
        (k, l, a, b) in (0usize..4, 0usize..4)
            .prop_flat_map(|(k, l)| (Just(k), Just(l), form_strategy(8, k), form_strategy(8, l)))
    ) {
        prop_assert_eq!(a.wedge(&b), b.wedge(&a).scale(&sign(k, l)));
    }

    #[test]
    fn wedge_associative(a in form_strategy(8, 1), b in form_strategy(8, 2), c in form_strategy(8, 2)) {
        prop_assert_eq!(a.wedge(&b).wedge(&c), a.wedge(&b.wedge(&c)));
    }

    #[test]
    fn d_is_a_graded_derivation(a in form_strategy(8, 2), b in form_strategy(8, 3)) {
        let alg = rxh();
        let lhs = alg.d(&a.wedge(&b));
        let rhs = alg.d(&a).wedge(&b).add(&a.wedge(&alg.d(&b)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn d_squares_to_zero(a in form_strategy(8, 3)) {
        let alg = rxh();
        prop_assert!(alg.d(&alg.d(&a)).is_zero());
    }

    #[test]
    fn stokes_on_unimodular_algebra(a in form_strategy(8, 7)) {
        let alg = rxh();
        prop_assert!(alg.integrate_top(&alg.d(&a)).is_zero());
    }
}
