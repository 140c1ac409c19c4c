mod common;

use common::*;
use hktkit_core::exterior::operator_matrix;
use hktkit_core::hkt::{self, find_hkt_form, find_obstruction_witness, find_phi, SearchConfig};
use hktkit_core::hypercomplex::Instance;
use hktkit_core::qdolbeault::{
    bicomplex_isomorphism_check, g_map, gauduchon_equivalence_check, kappa, omega_i_ratio, plus_project, r_map,
    reality_phase, transported_positive, v_map_check, weight_decompose, weighted_dimension, Su2Action, VMaps,
    LAMBDA_N2,
};
use hktkit_core::{Error, Form, Scalar};
use num_traits::One;

fn basis_forms(inst: &Instance, k: usize) -> Vec<Form> {
    inst.basis_of_degree(k).into_iter().map(|m| Form::monomial(m, Scalar::one())).collect()
}

#[test]
fn sl2_relations_in_every_degree() {
    for inst in [torus(), rxh7(1, 3), solv4()] {
        let action = Su2Action::new(&inst);
        for k in 0..=inst.dim() {
            assert!(action.relation_failures(&inst, k).is_empty(), "degree {k}");
        }
    }
}

#[test]
fn cartan_acts_by_bidegree() {
    let inst = rxh7(2, 3);
    let action = Su2Action::new(&inst);
    for k in 0..=4 {
        for x in basis_forms(&inst, k) {
            let (p, q) = inst.bidegrees(&x)[0];
            let w = Scalar::from_int(p as i64 - q as i64);
            assert_eq!(action.h(&x), x.scale(&w));
        }
    }
}

#[test]
fn weights_match_clebsch_gordan() {
    for inst in [torus(), rxh7(2, 3)] {
        let action = Su2Action::new(&inst);
        for k in 0..=8 {
            let table = weight_decompose(&inst, &action, k).unwrap();
            assert_eq!(weighted_dimension(&table), inst.basis_of_degree(k).len(), "sum rule in degree {k}");
            let got: Vec<(usize, usize)> = table.into_iter().collect();
            assert_eq!(got, clebsch_gordan(2, k), "degree {k}");
        }
    }
    let inst = solv4();
    let action = Su2Action::new(&inst);
    for k in 0..=4 {
        let got: Vec<(usize, usize)> = weight_decompose(&inst, &action, k).unwrap().into_iter().collect();
        assert_eq!(got, clebsch_gordan(1, k), "n = 1, degree {k}");
    }
}

#[test]
fn small_weight_tables() {
    let inst = torus();
    let action = Su2Action::new(&inst);
    let w0: Vec<_> = weight_decompose(&inst, &action, 0).unwrap().into_iter().collect();
    assert_eq!(w0, vec![(0, 1)]);
    let w1: Vec<_> = weight_decompose(&inst, &action, 1).unwrap().into_iter().collect();
    assert_eq!(w1, vec![(1, 4)]);
    let w2: Vec<_> = weight_decompose(&inst, &action, 2).unwrap().into_iter().collect();
    assert_eq!(w2, vec![(0, 10), (2, 6)]);
}

fn weight_zero_11_form(inst: &Instance, action: &Su2Action) -> Form {
    let basis = inst.basis(1, 1);
    let c = operator_matrix(&basis, &basis, |x| action.casimir(x)).unwrap();
    let kernel = c.kernel();
    assert!(!kernel.is_empty());
    Form::from_coordinates(&basis, &kernel[0])
}

#[test]
fn projection_examples() {
    let inst = torus();
    let action = Su2Action::new(&inst);
    for x in basis_forms(&inst, 1) {
        assert_eq!(plus_project(&inst, &action, &x).unwrap(), x);
    }
    let omega_i = hkt::omega_i_from_omega(&inst, &hkt::averaged_omega(&inst)).unwrap();
    let projected = plus_project(&inst, &action, &omega_i).unwrap();
    assert!(!projected.is_zero());
    assert_eq!(action.casimir(&projected), projected.scale(&Scalar::from_int(8)));

    let zero_weight = weight_zero_11_form(&inst, &action);
    assert!(plus_project(&inst, &action, &zero_weight).unwrap().is_zero());
    assert!(r_map(&inst, &action, &zero_weight, 1, 1).unwrap().is_zero());
}

#[test]
fn projection_is_idempotent_and_equivariant() {
    let inst = rxh7(1, 3);
    let action = Su2Action::new(&inst);
    for k in [2, 3] {
        for x in basis_forms(&inst, k).into_iter().step_by(9) {
            let p = plus_project(&inst, &action, &x).unwrap();
            assert_eq!(plus_project(&inst, &action, &p).unwrap(), p);
            for (lhs, rhs) in [
                (action.e(&x), action.e(&p)),
                (action.f(&x), action.f(&p)),
                (action.h(&x), action.h(&p)),
            ] {
                assert_eq!(plus_project(&inst, &action, &lhs).unwrap(), rhs);
            }
        }
    }
}

#[test]
fn r_map_examples() {
    let inst = rxh7(1, 2);
    let action = Su2Action::new(&inst);
    for m in inst.basis(2, 0) {
        let x = Form::monomial(m, Scalar::one());
        assert_eq!(r_map(&inst, &action, &x, 2, 0).unwrap(), x);
    }
    for m in inst.basis(3, 0) {
        let x = Form::monomial(m, Scalar::one());
        let y = g_map(&inst, &action, &x, 1, 2).unwrap();
        assert_eq!(r_map(&inst, &action, &y, 1, 2).unwrap(), x);
    }
    let bad = Form::monomial(inst.basis(2, 0)[0], Scalar::one());
    assert!(matches!(r_map(&inst, &action, &bad, 1, 1), Err(Error::BidegreeMismatch { .. })));
}

#[test]
fn omega_i_corresponds_to_omega() {
    let half = rxh7(1, 2);
    let hkt_form = find_hkt_form(&half, SearchConfig::default()).unwrap().hit.unwrap().form;
    for (inst, omega) in [
        (torus(), None),
        (rxh7(1, 3), None),
        (rxh7(1, 2), Some(hkt_form)),
    ] {
        let omega = omega.unwrap_or_else(|| hkt::averaged_omega(&inst));
        let action = Su2Action::new(&inst);
        assert_eq!(omega_i_ratio(&inst, &action, &omega).unwrap(), Some(kappa()));
    }
}

#[test]
fn bicomplex_isomorphism() {
    for inst in [torus(), rxh7(1, 2), rxh7(1, 3), solv4()] {
        let action = Su2Action::new(&inst);
        assert!(bicomplex_isomorphism_check(&inst, &action).unwrap().holds());
    }
}

fn maps(inst: &Instance) -> VMaps<'_> {
    let phi = find_phi(inst).unwrap().phi.unwrap();
    VMaps::new(inst, &phi).unwrap()
}

#[test]
fn v_map_properties() {
    for inst in [torus(), rxh7(1, 2), rxh7(1, 3)] {
        let maps = maps(&inst);
        let check = v_map_check(&maps).unwrap();
        assert!(check.passes(), "{:?}", check.failures);
        assert_eq!(check.lambda, Some(Scalar::from_int(LAMBDA_N2)));
        let v00 = maps.v(&Form::one(), 0, 0).unwrap();
        let g = g_map(&inst, maps.action(), maps.phi(), 2, 2).unwrap();
        assert_eq!(v00, g.scale(&Scalar::from_int(LAMBDA_N2)));
    }
}

#[test]
fn v_map_rejects_bad_input() {
    let inst = torus();
    let maps = maps(&inst);
    assert!(maps.v(&Form::one(), 3, 0).is_err());
    let x = Form::monomial(inst.basis(1, 0)[0], Scalar::one());
    assert!(maps.v(&x, 0, 0).is_err());
    assert!(VMaps::new(&inst, &x).is_err());
}

#[test]
fn reality_phases() {
    assert_eq!(reality_phase(2, 1), -i());
    assert_eq!(reality_phase(2, 2), Scalar::one());
    assert_eq!(reality_phase(2, 0), Scalar::one());
}

#[test]
fn positivity_transport_on_witness() {
    let inst = rxh7(1, 3);
    let maps = maps(&inst);
    let witness = find_obstruction_witness(&inst, SearchConfig::default()).unwrap().hit.unwrap().form;
    assert!(transported_positive(&maps, &witness).unwrap());
    assert!(!transported_positive(&maps, &witness.neg()).unwrap());
    let omega = hkt::averaged_omega(&inst);
    assert!(transported_positive(&maps, &omega).unwrap());
}

#[test]
fn gauduchon_equivalence() {
    let frozen = [
        (torus(), Scalar::ratio(1, 12)),
        (rxh7(1, 2), Scalar::ratio(1, 21)),
        (rxh7(1, 3), Scalar::ratio(1, 63)),
    ];
    for (inst, ratio) in frozen {
        let omega = hkt::averaged_omega(&inst);
        let maps = maps(&inst);
        let check = gauduchon_equivalence_check(&maps, &omega).unwrap();
        assert!(check.holds(), "{check:?}");
        assert!(check.quaternionic_gauduchon && check.gauduchon);
        assert_eq!(check.ratio, Some(ratio));
        assert!(matches!(
            gauduchon_equivalence_check(&maps, &omega.neg()),
            Err(Error::NotPositive)
        ));
    }

    let half = rxh7(1, 2);
    let hkt_form = find_hkt_form(&half, SearchConfig::default()).unwrap().hit.unwrap().form;
    let maps = maps(&half);
    let check = gauduchon_equivalence_check(&maps, &hkt_form).unwrap();
    assert!(check.holds() && check.quaternionic_gauduchon);
}
