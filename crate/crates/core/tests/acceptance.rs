mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};

use common::*;
use hktkit_core::catalog::Catalog;
use hktkit_core::cohomology::{
    ddj_lemma_check, degree_exact_sequence_check, del_del_j, dolbeault_h, duality_gram, qae_h, qbc_h,
};
use hktkit_core::hkt::{
    self, find_hkt_form, find_obstruction_witness, find_phi, positive_multiple, positivity, CriterionRegistry,
    HktAnswer, HktContext, Positivity, SearchConfig,
};
use hktkit_core::hypercomplex::Instance;
use hktkit_core::qdolbeault::{
    bicomplex_isomorphism_check, kappa, r_map, v_map_check, weight_decompose, Su2Action, VMaps,
};
use hktkit_core::report::{run, Command, InstanceDescriptor, RunOptions};
use hktkit_core::scalar::rational;
use hktkit_core::{Form, Scalar};

fn catalog_instances() -> Vec<(String, Instance)> {
    let mut out = vec![("torus8".to_string(), torus())];
    for (p, q) in SWEEP {
        out.push((format!("rxh7({p}/{q})"), rxh7(p, q)));
    }
    out.push(("solv4".to_string(), solv4()));
    out
}

fn phi_of(inst: &Instance) -> Option<Form> {
    find_phi(inst).unwrap().phi
}

fn parity(inst: &Instance) -> HktAnswer {
    let registry = CriterionRegistry::builtin().select(&["parity".to_string()]).unwrap();
    let ctx = HktContext {
        instance: inst,
        phi: phi_of(inst),
        h01: dolbeault_h(inst, 0, 1).unwrap().dimension,
        search: SearchConfig::default(),
        allow_non_nilpotent: false,
    };
    registry.decide(&ctx).unwrap().verdict.hkt
}

fn criterion_1() {
    for (p, q) in SWEEP {
        let h01 = dolbeault_h(&rxh7(p, q), 0, 1).unwrap().dimension;
        let expected = if (p, q) == (1, 2) { 4 } else { 3 };
        assert_eq!(h01, expected, "h01 at t={p}/{q}");
    }
}

fn criterion_2() {
    for (p, q) in SWEEP {
        let expected = if (p, q) == (1, 2) { HktAnswer::Yes } else { HktAnswer::No };
        assert_eq!(parity(&rxh7(p, q)), expected, "parity at t={p}/{q}");
    }

    let half = rxh7(1, 2);
    let hit = find_hkt_form(&half, SearchConfig::default()).unwrap().hit.expect("HKT form at t=1/2");
    assert!(half.del(&hit.form).is_zero());
    assert_eq!(hit.positivity, Positivity::Strict);
    assert_eq!(positivity(&half, &hit.form).unwrap(), Positivity::Strict);

    let third = rxh7(1, 3);
    let witness = find_obstruction_witness(&third, SearchConfig::default())
        .unwrap()
        .hit
        .expect("obstruction witness at t=1/3");
    let seed = third.to_frame(&one_form(8, &[(7, s(1)), (8, -i())]));
    let expected = third.component(&third.d(&seed), 2, 0);
    assert!(!expected.is_zero());
    assert!(
        positive_multiple(&witness.form, &expected).is_some(),
        "witness is not a positive multiple of the (2,0)-part of d(e7 - i e8)"
    );
    assert_ne!(positivity(&third, &witness.form).unwrap(), Positivity::None);
}

fn assert_operator_identities(name: &str, inst: &Instance) {
    let h = inst.half();
    for p in 0..=h {
        for q in 0..=h {
            for m in inst.basis(p, q) {
                let x = Form::monomial(m, Scalar::from_int(1));
                assert!(inst.d(&inst.d(&x)).is_zero(), "{name}: d^2 on {m}");
                let dx = inst.d(&x);
                assert_eq!(dx, inst.del(&x).add(&inst.delbar(&x)), "{name}: d = del + delbar on {m}");
                assert!(inst.del(&inst.del(&x)).is_zero(), "{name}: del^2 on {m}");
                assert!(inst.delbar(&inst.delbar(&x)).is_zero(), "{name}: delbar^2 on {m}");
                assert!(inst.del_j(&inst.del_j(&x)).is_zero(), "{name}: del_J^2 on {m}");
                let anti = inst.del(&inst.del_j(&x)).add(&inst.del_j(&inst.del(&x)));
                assert!(anti.is_zero(), "{name}: del del_J + del_J del on {m}");
            }
        }
    }
}

fn criterion_3() {
    for (name, inst) in catalog_instances() {
        assert_operator_identities(&name, &inst);
    }
}

fn criterion_4() {
    for (name, inst) in catalog_instances() {
        let action = Su2Action::new(&inst);
        let check = bicomplex_isomorphism_check(&inst, &action).unwrap();
        assert!(check.holds(), "{name}: {:?}", check.failures);
    }
    let half = rxh7(1, 2);
    let action = Su2Action::new(&half);
    let omega = find_hkt_form(&half, SearchConfig::default()).unwrap().hit.unwrap().form;
    let omega_i = hkt::omega_i_from_omega(&half, &omega).unwrap();
    let r = r_map(&half, &action, &omega_i, 1, 1).unwrap();
    assert_eq!(r, omega.scale(&kappa()), "R_(1,1)(omega_I) != kappa * Omega");
}

fn criterion_5() {
    let inst = torus();
    let action = Su2Action::new(&inst);
    for k in 0..=4 {
        let table = weight_decompose(&inst, &action, k).unwrap();
        let got: Vec<(usize, usize)> = table.into_iter().collect();
        assert_eq!(got, clebsch_gordan(2, k), "degree {k}");
    }
    let two = clebsch_gordan(2, 2);
    assert_eq!(two, vec![(0, 10), (2, 6)]);
    let dims: usize = two.iter().map(|(w, m)| m * (w + 1)).sum();
    assert_eq!(dims, 28);
    let rxh = rxh7(1, 3);
    let action = Su2Action::new(&rxh);
    for k in 0..=4 {
        let got: Vec<(usize, usize)> = weight_decompose(&rxh, &action, k).unwrap().into_iter().collect();
        assert_eq!(got, clebsch_gordan(2, k), "rxh7 degree {k}");
    }
}

fn criterion_6() {
    for (name, inst) in catalog_instances() {
        let Some(phi) = phi_of(&inst) else { continue };
        let top = 2 * inst.n();
        for p in 0..=top {
            let bc = qbc_h(&inst, p).unwrap().dimension;
            let ae = qae_h(&inst, top - p).unwrap().dimension;
            assert_eq!(bc, ae, "{name}: BC^{p} vs AE^{}", top - p);
            let gram = duality_gram(&inst, p, &phi).unwrap();
            assert_eq!(gram.rows(), bc);
            assert_eq!(gram.cols(), bc);
            assert_eq!(gram.rank(), bc, "{name}: Gram in degree {p} is singular");
        }
    }
}

fn criterion_7() {
    for (p, q) in SWEEP {
        let inst = rxh7(p, q);
        let h01 = dolbeault_h(&inst, 0, 1).unwrap().dimension;
        let lemma = ddj_lemma_check(&inst).unwrap();
        assert_eq!(lemma.holds, h01 % 2 == 0, "t={p}/{q}");
        if lemma.holds {
            assert!(lemma.witness.is_none());
            continue;
        }
        let w = lemma.witness.expect("witness on failure");
        assert!(!w.is_zero());
        assert!(inst.del_j(&w).is_zero(), "witness not del_J-closed");
        let basis20 = inst.basis(2, 0);
        let target = w.coordinates(&basis20).unwrap();
        let del_cols: Vec<Vec<Scalar>> = inst
            .basis(1, 0)
            .into_iter()
            .map(|m| inst.del(&Form::monomial(m, Scalar::from_int(1))).coordinates(&basis20).unwrap())
            .collect();
        assert!(solve_in_span(&del_cols, &target).is_some(), "witness not del-exact");
        let ddj_cols = vec![del_del_j(&inst, &Form::one()).coordinates(&basis20).unwrap()];
        assert!(solve_in_span(&ddj_cols, &target).is_none(), "witness is del del_J-exact");
    }
}

fn criterion_8() {
    let half = rxh7(1, 2);
    let omega = find_hkt_form(&half, SearchConfig::default()).unwrap().hit.unwrap().form;
    assert!(hkt::is_quaternionic_gauduchon(&half, &omega).unwrap());
    let phi = phi_of(&half).unwrap();
    let check = degree_exact_sequence_check(&half, &omega, &phi).unwrap();
    assert!(check.passes(), "t=1/2: {check:?}");
    assert!(check.degree_vanishes(), "deg does not vanish at t=1/2");

    let third = rxh7(1, 3);
    let omega = hkt::averaged_omega(&third);
    assert_eq!(positivity(&third, &omega).unwrap(), Positivity::Strict);
    assert!(hkt::is_quaternionic_gauduchon(&third, &omega).unwrap());
    let phi = phi_of(&third).unwrap();
    let check = degree_exact_sequence_check(&third, &omega, &phi).unwrap();
    assert!(check.passes(), "t=1/3: {check:?}");
}

fn criterion_9() {
    for (name, inst) in catalog_instances() {
        let Some(phi) = phi_of(&inst) else { continue };
        let maps = VMaps::new(&inst, &phi).unwrap();
        let check = v_map_check(&maps).unwrap();
        assert!(check.injective && check.intertwines_del && check.intertwines_del_j, "{name}: {check:?}");
        assert!(check.reality && check.factorizes, "{name}: {check:?}");
        let lambda = check.lambda.clone().expect("lambda");
        assert!(lambda.is_positive_real(), "{name}: lambda = {lambda}");
        assert!(check.passes(), "{name}: {:?}", check.failures);
    }
}

fn criterion_10() {
    let catalog = Catalog::builtin();
    let opts = RunOptions::default();
    let descs = [
        InstanceDescriptor::builtin("torus8", None),
        InstanceDescriptor::builtin("rxh7", Some(rational(1, 2))),
        InstanceDescriptor::builtin("rxh7", Some(rational(1, 3))),
        InstanceDescriptor::builtin("solv4", None),
    ];
    for desc in &descs {
        let a = run(desc, Command::Full, &catalog, &opts).unwrap().to_json();
        let b = run(desc, Command::Full, &catalog, &opts).unwrap().to_json();
        assert_eq!(a, b, "{} differs between runs", desc.id);
    }
}

fn main() {
    let criteria: [(&str, fn()); 10] = [
        ("h01 regression on rxh7", criterion_1),
        ("HKT verdicts, form and witness", criterion_2),
        ("differential identities", criterion_3),
        ("bicomplex isomorphism and R(omega_I)", criterion_4),
        ("weight tables vs Clebsch-Gordan", criterion_5),
        ("Bott-Chern / Aeppli duality", criterion_6),
        ("del del_J-lemma vs parity", criterion_7),
        ("degree exact sequence", criterion_8),
        ("V-map properties and lambda", criterion_9),
        ("deterministic full reports", criterion_10),
    ];
    let mut failed = Vec::new();
    for (k, (label, f)) in criteria.iter().enumerate() {
        let n = k + 1;
        match catch_unwind(AssertUnwindSafe(f)) {
            Ok(()) => println!("PASS criterion {n}: {label}"),
            Err(_) => {
                println!("FAIL criterion {n}: {label}");
                failed.push(n);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
