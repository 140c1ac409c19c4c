mod common;

use common::*;
use hktkit_core::cohomology::{del_del_j, dolbeault_h};
use hktkit_core::hkt::{
    self, find_hkt_form, find_non_gauduchon_form, find_obstruction_witness, find_phi, hermitian_matrix,
    is_quaternionic_gauduchon, is_real_20, metric_from_omega, positivity, proportional, real_20, real_structure,
    CriterionRegistry, HktAnswer, HktContext, HktCriterion, Positivity, SearchConfig, Verdict,
};
use hktkit_core::hypercomplex::Instance;
use hktkit_core::linalg::Matrix;
use hktkit_core::{Error, Form, Scalar};
use num_traits::Zero;

/// `(e^1 - i e^2)∧(e^3 - i e^4) + (e^5 - i e^6)∧(e^7 - i e^8)` in the real basis.
fn flat_real() -> Form {
    let pair = |a: usize| one_form(8, &[(a, s(1)), (a + 1, -i())]);
    pair(1).wedge(&pair(3)).add(&pair(5).wedge(&pair(7)))
}

/// Dual frame vectors in the real basis: column `b` is `x_b`, with
/// `φ^a(x_b) = δ_ab`, so the matrix is `(P^T)^{-1}`.
fn frame_vectors(inst: &Instance) -> Matrix {
    inst.frame().p().transpose().inverse().unwrap()
}

/// A real-basis 2-form evaluated on two complex vectors.
fn evaluate(x: &Form, u: &[Scalar], v: &[Scalar]) -> Scalar {
    let mut acc = Scalar::zero();
    for (m, c) in x.terms() {
        let idx = m.indices();
        let (r, s) = (idx[0], idx[1]);
        let val = &(&u[r] * &v[s]) - &(&u[s] * &v[r]);
        acc += &(c * &val);
    }
    acc
}

/// `η(x_a, J x̄_b)` computed from the real-basis form, the vector action
/// `J^T` and the dual frame: an oracle for the Hermitian matrix.
fn hermitian_oracle(inst: &Instance, eta: &Form) -> Matrix {
    let h = inst.half();
    let x = frame_vectors(inst);
    let jv = inst.structure().j_mat().transpose();
    let real = inst.from_frame(eta);
    let mut out = Matrix::zeros(h, h);
    for a in 0..h {
        for b in 0..h {
            let xa = x.column(a);
            let xb_bar: Vec<Scalar> = x.column(b).iter().map(Scalar::conj).collect();
            out.set(a, b, evaluate(&real, &xa, &jv.apply(&xb_bar)));
        }
    }
    out
}

/// `g(x_a, x̄_b)` for a real symmetric `g`.
fn metric_on_frame(inst: &Instance, g: &Matrix) -> Matrix {
    let h = inst.half();
    let x = frame_vectors(inst);
    let mut out = Matrix::zeros(h, h);
    for a in 0..h {
        for b in 0..h {
            let xb_bar: Vec<Scalar> = x.column(b).iter().map(Scalar::conj).collect();
            let gx = g.apply(&xb_bar);
            let mut acc = Scalar::zero();
            for (u, w) in x.column(a).iter().zip(&gx) {
                acc += &(u * w);
            }
            out.set(a, b, acc);
        }
    }
    out
}

fn all_principal_minors_positive(m: &Matrix) -> bool {
    let n = m.rows();
    (1u64..1 << n).all(|mask| {
        let idx: Vec<usize> = (0..n).filter(|k| mask >> k & 1 == 1).collect();
        let sub = Matrix::from_rows(
            idx.iter()
                .map(|&r| idx.iter().map(|&c| m.get(r, c).clone()).collect())
                .collect(),
        );
        sub.determinant().is_positive_real()
    })
}

#[test]
fn reality() {
    let inst = torus();
    let flat = inst.to_frame(&flat_real());
    assert!(is_real_20(&inst, &flat).unwrap());
    assert!(!is_real_20(&inst, &flat.scale(&i())).unwrap());
    let third = rxh7(1, 3);
    for m in third.basis(2, 0) {
        let eta = Form::monomial(m, &s(1) + &i());
        let sym = eta.add(&real_structure(&third, &eta));
        assert!(is_real_20(&third, &sym).unwrap());
    }
    assert!(matches!(
        is_real_20(&inst, &Form::one()),
        Err(Error::BidegreeMismatch { .. })
    ));
}

/// The printed flat form is the negative of the Euclidean metric's form, so
/// it is negative definite; its negative is the strictly positive one.
#[test]
fn flat_form_sign() {
    let inst = torus();
    let flat = inst.to_frame(&flat_real());
    assert_eq!(positivity(&inst, &flat).unwrap(), Positivity::None);
    let euclidean = flat.neg();
    assert_eq!(positivity(&inst, &euclidean).unwrap(), Positivity::Strict);
    assert_eq!(hkt::omega_from_metric(&inst, &Matrix::identity(8)), euclidean);
    assert_eq!(hkt::real_metric_from_omega(&inst, &euclidean).unwrap(), Matrix::identity(8));
}

#[test]
fn hermitian_matrix_matches_oracle() {
    for inst in [torus(), rxh7(1, 3), rxh7(3, 4)] {
        for eta in real_20(&inst).unwrap() {
            assert_eq!(hermitian_matrix(&inst, &eta).unwrap(), hermitian_oracle(&inst, &eta));
        }
    }
}

/// `Ω(x, J ȳ) = 2 g(x, ȳ)` for the form of a metric.
#[test]
fn metric_relation() {
    for inst in [torus(), rxh7(1, 2), rxh7(1, 3)] {
        let g = hkt::averaged_metric(inst.structure());
        let omega = hkt::omega_from_metric(&inst, &g);
        let h = metric_from_omega(&inst, &omega).unwrap();
        assert_eq!(h, metric_on_frame(&inst, &g).scale(&s(2)));
        assert_eq!(hkt::real_metric_from_omega(&inst, &omega).unwrap(), g);
    }
    let torus = torus();
    let euclidean = torus.to_frame(&flat_real()).neg();
    let h = metric_from_omega(&torus, &euclidean).unwrap();
    assert_eq!(h, metric_on_frame(&torus, &Matrix::identity(8)).scale(&s(2)));
    let normalized = metric_on_frame(&torus, &Matrix::identity(8));
    for a in 0..4 {
        for b in 0..4 {
            let expected = if a == b { normalized.get(a, a).clone() } else { Scalar::zero() };
            assert_eq!(normalized.get(a, b), &expected);
        }
    }
}

#[test]
fn metric_zero_and_scaling() {
    let inst = rxh7(1, 2);
    assert!(metric_from_omega(&inst, &Form::zero()).unwrap().is_zero());
    let omega = hkt::averaged_omega(&inst);
    let c = q(5, 3);
    assert_eq!(
        metric_from_omega(&inst, &omega.scale(&c)).unwrap(),
        metric_from_omega(&inst, &omega).unwrap().scale(&c)
    );
}

#[test]
fn strict_iff_positive_definite() {
    for inst in [rxh7(1, 2), rxh7(1, 3)] {
        let gens = real_20(&inst).unwrap();
        let omega = hkt::averaged_omega(&inst);
        for (k, g) in gens.iter().enumerate() {
            for c in [-3i64, -1, 1, 4] {
                let eta = omega.add(&g.scale(&Scalar::ratio(c, (k + 1) as i64)));
                let strict = positivity(&inst, &eta).unwrap() == Positivity::Strict;
                let h = hermitian_oracle(&inst, &eta);
                assert_eq!(strict, all_principal_minors_positive(&h));
            }
        }
    }
}

#[test]
fn decomposable_witness_is_semi_positive() {
    let inst = rxh7(1, 3);
    let c = s(-2);
    let first = one_form(8, &[(1, s(1)), (2, -(&i() * &c))]);
    let second = one_form(8, &[(3, s(1)), (4, -i())]);
    let eta = inst.to_frame(&first.wedge(&second));
    assert_eq!(positivity(&inst, &eta).unwrap(), Positivity::Semi);
    assert_eq!(positivity(&inst, &eta.neg()).unwrap(), Positivity::None);
    let omega = hkt::averaged_omega(&inst);
    assert_eq!(positivity(&inst, &omega.neg()).unwrap(), Positivity::None);
    assert!(matches!(positivity(&inst, &eta.scale(&i())), Err(Error::NotReal)));
}

#[test]
fn phi_examples() {
    let inst = torus();
    let phi = find_phi(&inst).unwrap().phi.unwrap();
    let pair = |a: usize| one_form(8, &[(a, s(1)), (a + 1, -i())]);
    let decomposable = inst.to_frame(&pair(1).wedge(&pair(3)).wedge(&pair(5)).wedge(&pair(7)));
    let ratio = proportional(&phi, &decomposable).unwrap();
    assert!(ratio.is_real());
    assert!(is_phi_valid(&inst, &decomposable));

    for inst in [rxh7(1, 2), rxh7(1, 3)] {
        let outcome = find_phi(&inst).unwrap();
        let phi = outcome.phi.unwrap();
        assert!(is_phi_valid(&inst, &phi));
        let omega2 = hkt::averaged_omega(&inst).power(2);
        assert!(proportional(&omega2, &phi).unwrap().is_positive_real());
    }

    let outcome = find_phi(&solv4()).unwrap();
    assert!(outcome.phi.is_none());
    assert!(outcome.reason.is_some());
}

fn is_phi_valid(inst: &Instance, phi: &Form) -> bool {
    inst.delbar(phi).is_zero() && inst.j(phi) == inst.conj(phi) && !phi.is_zero()
}

fn decide(inst: &Instance, registry: &CriterionRegistry) -> Result<hktkit_core::hkt::HktDecision, Error> {
    let ctx = HktContext {
        instance: inst,
        phi: find_phi(inst).unwrap().phi,
        h01: dolbeault_h(inst, 0, 1).unwrap().dimension,
        search: SearchConfig::default(),
        allow_non_nilpotent: false,
    };
    registry.decide(&ctx)
}

#[test]
fn parity_verdicts() {
    let parity = CriterionRegistry::builtin().select(&["parity".to_string()]).unwrap();
    assert_eq!(decide(&rxh7(1, 2), &parity).unwrap().verdict.hkt, HktAnswer::Yes);
    assert_eq!(decide(&rxh7(1, 3), &parity).unwrap().verdict.hkt, HktAnswer::No);
    assert_eq!(decide(&torus(), &parity).unwrap().verdict.hkt, HktAnswer::Yes);
    assert_eq!(decide(&solv4(), &parity).unwrap().verdict.hkt, HktAnswer::Unknown);
}

#[test]
fn hkt_form_search() {
    for inst in [torus(), rxh7(1, 2)] {
        let hit = find_hkt_form(&inst, SearchConfig::default()).unwrap().hit.unwrap();
        assert!(inst.del(&hit.form).is_zero());
        assert_eq!(positivity(&inst, &hit.form).unwrap(), Positivity::Strict);
    }
    let torus = torus();
    let hit = find_hkt_form(&torus, SearchConfig::default()).unwrap().hit.unwrap();
    let euclidean = torus.to_frame(&flat_real()).neg();
    assert!(hkt::positive_multiple(&hit.form, &euclidean).is_some());

    let third = rxh7(1, 3);
    let outcome = find_hkt_form(&third, SearchConfig { bound: 3, ..SearchConfig::default() }).unwrap();
    assert!(outcome.hit.is_none());
}

#[test]
fn obstruction_witnesses() {
    let third = rxh7(1, 3);
    let w = find_obstruction_witness(&third, SearchConfig::default()).unwrap().hit.unwrap().form;
    assert_eq!(real_structure(&third, &w), w);
    assert!(third.del(&w).is_zero());
    let seed = third.to_frame(&one_form(8, &[(7, s(1)), (8, -i())]));
    let expected = third.component(&third.d(&seed), 2, 0);
    assert!(hkt::positive_multiple(&w, &expected).is_some());
    assert_eq!(third.to_frame(&third.from_frame(&expected)), expected);
    assert_eq!(positivity(&third, &w).unwrap(), Positivity::Semi);

    for inst in [rxh7(1, 2), torus()] {
        let outcome = find_obstruction_witness(&inst, SearchConfig { bound: 4, ..SearchConfig::default() }).unwrap();
        assert!(outcome.hit.is_none());
    }
}

#[test]
fn quaternionic_gauduchon() {
    let half = rxh7(1, 2);
    let omega = find_hkt_form(&half, SearchConfig::default()).unwrap().hit.unwrap().form;
    assert!(is_quaternionic_gauduchon(&half, &omega).unwrap());
    let torus = torus();
    assert!(is_quaternionic_gauduchon(&torus, &torus.to_frame(&flat_real()).neg()).unwrap());
    assert!(matches!(
        is_quaternionic_gauduchon(&torus, &torus.to_frame(&flat_real())),
        Err(Error::NotPositive)
    ));

    let third = rxh7(1, 3);
    let omega = hkt::averaged_omega(&third);
    assert!(!third.del(&omega).is_zero());
    assert!(is_quaternionic_gauduchon(&third, &omega).unwrap());
    for eta in real_20(&third).unwrap() {
        assert!(del_del_j(&third, &eta).is_zero());
    }
    let outcome = find_non_gauduchon_form(&third, SearchConfig { bound: 2, ..SearchConfig::default() }).unwrap();
    assert!(outcome.hit.is_none());
}

#[test]
fn invariant_functions_are_pluriharmonic() {
    for inst in [torus(), rxh7(1, 3)] {
        assert!(del_del_j(&inst, &Form::constant(q(7, 2))).is_zero());
    }
}

#[test]
fn verdict_coherence_on_catalog() {
    let registry = CriterionRegistry::builtin();
    for (inst, expected) in [
        (torus(), HktAnswer::Yes),
        (rxh7(1, 2), HktAnswer::Yes),
        (rxh7(1, 3), HktAnswer::No),
        (rxh7(3, 4), HktAnswer::No),
    ] {
        let decision = decide(&inst, &registry).unwrap();
        assert_eq!(decision.verdict.hkt, expected);
        for (name, v) in &decision.per_criterion {
            assert!(v.hkt == expected || v.hkt == HktAnswer::Unknown, "{name}");
        }
    }
}

struct AlwaysNo;

impl HktCriterion for AlwaysNo {
    fn name(&self) -> &'static str {
        "always-no"
    }
    fn evaluate(&self, _ctx: &HktContext<'_>) -> hktkit_core::Result<Verdict> {
        Ok(Verdict {
            hkt: HktAnswer::No,
            basis: Some(self.name().into()),
            witness: None,
            notes: Vec::new(),
        })
    }
}

#[test]
fn conflicting_criteria_are_a_consistency_error() {
    let mut registry = CriterionRegistry::builtin().select(&["parity".to_string()]).unwrap();
    registry.register(Box::new(AlwaysNo));
    assert_eq!(registry.names(), vec!["parity", "always-no"]);
    let err = decide(&rxh7(1, 2), &registry).unwrap_err();
    assert!(matches!(err, Error::Consistency(_)));
    assert_eq!(err.exit_code(), 3);
    assert!(matches!(
        CriterionRegistry::builtin().select(&["nope".to_string()]),
        Err(Error::UnknownCriterion(_))
    ));
}
