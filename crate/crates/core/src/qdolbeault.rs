//! The su(2)-action on invariant forms, its weight decomposition, the
//! quaternionic Dolbeault quotient and the maps `V_{p,q}`.
//!
//! Everything here works on frame forms. The generators are the derivation
//! extensions `A_L` of `I, J, K` acting on 1-forms, combined as
//!
//! ```text
//! H = -i·A_I,   E = (A_J - i·A_K)/2,   F = -(A_J + i·A_K)/2
//! ```
//!
//! so that `H = p - q` on `Λ^{p,q}`, `E` raises `p - q` by 2, and
//! `[H,E] = 2E`, `[H,F] = -2F`, `[E,F] = H`. On 1-forms `E` is `J` on
//! `Λ^{0,1}` and vanishes on `Λ^{1,0}`.
//!
//! The isomorphism `Λ^{p+q,0} → Λ^{p,q}_+` is represented by
//! `G_{p,q}(η) = (-1)^q p!/(p+q)! F^q η`, and `R` (projection to the top
//! isotypic part followed by the inverse) by `R(x) = (-1)^q/q! E^q(P x)`.
//! With these normalizations the quotient differentials correspond to `∂`
//! and `∂_J` with constant 1.
//!
//! Since (1,0)-forms are the `+i` eigenforms, the phase that turns
//! `V_{p,p}` of a real form into a real, positivity-preserving form is
//! `(-i)^{(n-p)²}`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::exterior::{operator_matrix, Form, Monomial};
use crate::hkt;
use crate::hypercomplex::{ComplexStructure, Instance};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// `λ` in `V_{0,0}(1) = λ·G_{n,n}(Φ)` for `n = 2`, measured on the flat torus.
pub const LAMBDA_N2: i64 = 6;

/// `R_{1,1}(ω_I) = κ·Ω` with `κ = i` for every metric of an `Ω`.
pub fn kappa() -> Scalar {
    Scalar::i()
}

/// `(-i)^{(n-p)²}`.
pub fn reality_phase(n: usize, p: usize) -> Scalar {
    (-Scalar::i()).pow(((n - p) * (n - p)) as u32)
}

/// Derivation images of the sl(2) generators on frame 1-forms.
#[derive(Clone, Debug)]
pub struct Su2Action {
    h: Vec<Form>,
    e: Vec<Form>,
    f: Vec<Form>,
}

impl Su2Action {
    pub fn new(inst: &Instance) -> Self {
        let a_i = inst.images(ComplexStructure::I);
        let a_j = inst.images(ComplexStructure::J);
        let a_k = inst.images(ComplexStructure::K);
        let minus_i = -Scalar::i();
        let half = Scalar::ratio(1, 2);
        let h = a_i.iter().map(|x| x.scale(&minus_i)).collect();
        let e = a_j
            .iter()
            .zip(a_k)
            .map(|(j, k)| j.add(&k.scale(&minus_i)).scale(&half))
            .collect();
        let f = a_j
            .iter()
            .zip(a_k)
            .map(|(j, k)| j.add(&k.scale(&Scalar::i())).scale(&-half.clone()))
            .collect();
        Su2Action { h, e, f }
    }

    pub fn h(&self, x: &Form) -> Form {
        x.derivation(&self.h)
    }

    pub fn e(&self, x: &Form) -> Form {
        x.derivation(&self.e)
    }

    pub fn f(&self, x: &Form) -> Form {
        x.derivation(&self.f)
    }

    pub fn e_pow(&self, x: &Form, k: usize) -> Form {
        (0..k).fold(x.clone(), |acc, _| self.e(&acc))
    }

    pub fn f_pow(&self, x: &Form, k: usize) -> Form {
        (0..k).fold(x.clone(), |acc, _| self.f(&acc))
    }

    /// `H² + 2EF + 2FE`, which is `w(w+2)` on `V_w`.
    pub fn casimir(&self, x: &Form) -> Form {
        let hh = self.h(&self.h(x));
        let ef = self.e(&self.f(x));
        let fe = self.f(&self.e(x));
        let two = Scalar::from_int(2);
        hh.add(&ef.add(&fe).scale(&two))
    }

    /// Violations of the sl(2) relations on the frame monomials of degree `k`.
    pub fn relation_failures(&self, inst: &Instance, k: usize) -> Vec<String> {
        let two = Scalar::from_int(2);
        let mut out = Vec::new();
        for m in inst.basis_of_degree(k) {
            let x = Form::monomial(m, Scalar::one());
            let he = self.h(&self.e(&x)).sub(&self.e(&self.h(&x)));
            if he != self.e(&x).scale(&two) {
                out.push(format!("[H,E] != 2E on {m}"));
            }
            let hf = self.h(&self.f(&x)).sub(&self.f(&self.h(&x)));
            if hf != self.f(&x).scale(&-two.clone()) {
                out.push(format!("[H,F] != -2F on {m}"));
            }
            let ef = self.e(&self.f(&x)).sub(&self.f(&self.e(&x)));
            if ef != self.h(&x) {
                out.push(format!("[E,F] != H on {m}"));
            }
            let (p, q) = inst.bidegree(m);
            let w = Scalar::from_int(p as i64 - q as i64);
            if self.h(&x) != x.scale(&w) {
                out.push(format!("H is not p - q on {m}"));
            }
        }
        out
    }
}

fn casimir_value(w: usize) -> Scalar {
    Scalar::from_int((w * (w + 2)) as i64)
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

fn signed_ratio(negative: bool, num: BigInt, den: BigInt) -> Scalar {
    let r = BigRational::new(num, den);
    Scalar::real(if negative { -r } else { r })
}

/// Multiplicity of `V_w` in `Λ^k`, for each weight `w` that occurs.
pub type WeightTable = BTreeMap<usize, usize>;

/// Multiplicities in degree `k`: `V_w` is counted by the Casimir eigenspace
/// `w(w+2)` inside the `H`-eigenspace `w`, which is `Λ^{(k+w)/2,(k-w)/2}`.
pub fn weight_decompose(inst: &Instance, action: &Su2Action, k: usize) -> Result<WeightTable> {
    let h = inst.half();
    let mut table = WeightTable::new();
    if k > inst.dim() {
        return Ok(table);
    }
    for w in (k % 2..=k).step_by(2) {
        let p = (k + w) / 2;
        let q = (k - w) / 2;
        if p > h {
            continue;
        }
        let basis = inst.basis(p, q);
        let c = operator_matrix(&basis, &basis, |x| action.casimir(x))?;
        let shifted = c.sub(&Matrix::identity(basis.len()).scale(&casimir_value(w)));
        let mult = basis.len() - shifted.rank();
        if mult > 0 {
            table.insert(w, mult);
        }
    }
    Ok(table)
}

/// `Σ_w mult(w)·(w+1)`.
pub fn weighted_dimension(table: &WeightTable) -> usize {
    table.iter().map(|(w, m)| m * (w + 1)).sum()
}

/// Projection of a homogeneous frame form onto the top isotypic component
/// of its degree, by Lagrange interpolation in the Casimir.
pub fn plus_project(inst: &Instance, action: &Su2Action, x: &Form) -> Result<Form> {
    let degrees = x.degrees();
    if degrees.len() > 1 {
        return Err(Error::Unsupported("plus_project needs a homogeneous form".into()));
    }
    let Some(&k) = degrees.first() else {
        return Ok(Form::zero());
    };
    let top = casimir_value(k);
    let mut out = Form::zero();
    for ((p, q), part) in inst.split(x) {
        let lowest = p.abs_diff(q);
        let mut y = part;
        for w in (lowest..k).step_by(2) {
            let cw = casimir_value(w);
            let scale = (&top - &cw).inv().expect("distinct Casimir values");
            y = action.casimir(&y).sub(&y.scale(&cw)).scale(&scale);
        }
        out.add_assign(&y);
    }
    Ok(out)
}

/// `R: Λ^{p,q} → Λ^{p+q,0}`, vanishing exactly on weight below `p + q`.
pub fn r_map(inst: &Instance, action: &Su2Action, x: &Form, p: usize, q: usize) -> Result<Form> {
    inst.expect_bidegree(x, p, q)?;
    let projected = plus_project(inst, action, x)?;
    let c = signed_ratio(q % 2 == 1, BigInt::one(), factorial(q));
    Ok(action.e_pow(&projected, q).scale(&c))
}

/// Representative in `Λ^{p,q}` of the class corresponding to `η ∈ Λ^{p+q,0}`.
pub fn g_map(inst: &Instance, action: &Su2Action, eta: &Form, p: usize, q: usize) -> Result<Form> {
    inst.expect_bidegree(eta, p + q, 0)?;
    let c = signed_ratio(q % 2 == 1, factorial(p), factorial(p + q));
    Ok(action.f_pow(eta, q).scale(&c))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BicomplexCheck {
    pub failures: Vec<String>,
}

impl BicomplexCheck {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks on spanning sets that `d` preserves the weight-deficient ideal
/// and that the bidegree parts of the quotient differential correspond to
/// `∂` and `∂_J` under `G`/`R`.
pub fn bicomplex_isomorphism_check(inst: &Instance, action: &Su2Action) -> Result<BicomplexCheck> {
    let h = inst.half();
    let mut failures = Vec::new();
    for k in 0..=h {
        for eta_m in inst.basis(k, 0) {
            let eta = Form::monomial(eta_m, Scalar::one());
            let del = inst.del(&eta);
            let del_j = inst.del_j(&eta);
            for q in 0..=k {
                let p = k - q;
                let rep = g_map(inst, action, &eta, p, q)?;
                let d_rep = inst.d(&rep);
                if p < h {
                    let up = r_map(inst, action, &inst.component(&d_rep, p + 1, q), p + 1, q)?;
                    if up != del {
                        failures.push(format!("d^(1,0) from ({p},{q}) on {eta_m} is not del"));
                    }
                }
                if q < h {
                    let right = r_map(inst, action, &inst.component(&d_rep, p, q + 1), p, q + 1)?;
                    if right != del_j {
                        failures.push(format!("d^(0,1) from ({p},{q}) on {eta_m} is not del_J"));
                    }
                }
            }
        }
    }
    // d of a weight-deficient form stays weight-deficient.
    for k in 0..inst.dim() {
        for m in inst.basis_of_degree(k) {
            let x = Form::monomial(m, Scalar::one());
            let low = x.sub(&plus_project(inst, action, &x)?);
            if low.is_zero() {
                continue;
            }
            if !plus_project(inst, action, &inst.d(&low))?.is_zero() {
                failures.push(format!("d leaves the weight-deficient ideal at {m}"));
            }
        }
    }
    Ok(BicomplexCheck { failures })
}

/// The maps `V_{p,q}: Λ^{p+q,0} → Λ^{n+p,n+q}` for a fixed `Φ`, defined by
/// `V(η)∧α = η∧R(α)∧Φ̄` for all `α ∈ Λ^{n-p,n-q}`.
pub struct VMaps<'a> {
    inst: &'a Instance,
    action: Su2Action,
    phi: Form,
    solvers: BTreeMap<(usize, usize), VSolver>,
}

struct VSolver {
    /// Inverse of the pairing `(b_j, α_i) ↦ ∫ b_j∧α_i`.
    inverse: Matrix,
    /// `R(α_i)∧Φ̄` per test form.
    rhs: Vec<Form>,
    codomain: Vec<Monomial>,
}

impl<'a> VMaps<'a> {
    pub fn new(inst: &'a Instance, phi: &Form) -> Result<Self> {
        let n = inst.n();
        inst.expect_bidegree(phi, 2 * n, 0)?;
        let action = Su2Action::new(inst);
        let phi_bar = inst.conj(phi);
        let mut solvers = BTreeMap::new();
        for p in 0..=n {
            for q in 0..=n {
                let codomain = inst.basis(n + p, n + q);
                let tests = inst.basis(n - p, n - q);
                let mut pairing = Matrix::zeros(tests.len(), codomain.len());
                for (i, a) in tests.iter().enumerate() {
                    let alpha = Form::monomial(*a, Scalar::one());
                    for (j, b) in codomain.iter().enumerate() {
                        let top = Form::monomial(*b, Scalar::one()).wedge(&alpha);
                        pairing.set(i, j, inst.integrate(&top));
                    }
                }
                let inverse = pairing.inverse().ok_or_else(|| {
                    Error::Underdetermined(format!("test-form pairing for V_({p},{q}) is degenerate"))
                })?;
                let rhs = tests
                    .iter()
                    .map(|a| {
                        let alpha = Form::monomial(*a, Scalar::one());
                        Ok(r_map(inst, &action, &alpha, n - p, n - q)?.wedge(&phi_bar))
                    })
                    .collect::<Result<Vec<_>>>()?;
                solvers.insert((p, q), VSolver { inverse, rhs, codomain });
            }
        }
        Ok(VMaps {
            inst,
            action,
            phi: phi.clone(),
            solvers,
        })
    }

    pub fn instance(&self) -> &Instance {
        self.inst
    }

    pub fn action(&self) -> &Su2Action {
        &self.action
    }

    pub fn phi(&self) -> &Form {
        &self.phi
    }

    pub fn v(&self, eta: &Form, p: usize, q: usize) -> Result<Form> {
        let solver = self
            .solvers
            .get(&(p, q))
            .ok_or_else(|| Error::Unsupported(format!("V_({p},{q}) needs p, q <= n")))?;
        self.inst.expect_bidegree(eta, p + q, 0)?;
        let b: Vec<Scalar> = solver
            .rhs
            .iter()
            .map(|r| self.inst.integrate(&eta.wedge(r)))
            .collect();
        Ok(Form::from_coordinates(&solver.codomain, &solver.inverse.apply(&b)))
    }

    /// Matrix of `V_{p,q}` on the frame basis of `Λ^{p+q,0}`.
    pub fn matrix(&self, p: usize, q: usize) -> Result<Matrix> {
        let n = self.inst.n();
        operator_matrix(
            &self.inst.basis(p + q, 0),
            &self.inst.basis(n + p, n + q),
            |x| self.v(x, p, q).expect("bidegree is fixed by the basis"),
        )
    }

    /// `λ` with `V_{0,0}(1) = λ·G_{n,n}(Φ)`, if the two are proportional.
    pub fn lambda(&self) -> Result<Option<Scalar>> {
        let n = self.inst.n();
        let lhs = self.v(&Form::one(), 0, 0)?;
        let rhs = g_map(self.inst, &self.action, &self.phi, n, n)?;
        Ok(hkt::proportional(&lhs, &rhs))
    }
}

/// `κ` with `R_{1,1}(ω_I) = κ·Ω` for the metric of a strictly positive `Ω`.
pub fn omega_i_ratio(inst: &Instance, action: &Su2Action, omega: &Form) -> Result<Option<Scalar>> {
    let omega_i = hkt::omega_i_from_omega(inst, omega)?;
    let r = r_map(inst, action, &omega_i, 1, 1)?;
    Ok(hkt::proportional(&r, omega))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VMapCheck {
    pub injective: bool,
    pub intertwines_del: bool,
    pub intertwines_del_j: bool,
    pub reality: bool,
    pub factorizes: bool,
    pub lambda: Option<Scalar>,
    pub failures: Vec<String>,
}

impl VMapCheck {
    pub fn passes(&self) -> bool {
        self.failures.is_empty()
            && self
                .lambda
                .as_ref()
                .is_some_and(|l| l.is_positive_real())
    }
}

/// Injectivity, intertwining with `∂`/`∂_J`, reality transport for
/// `(-i)^{(n-p)²} V_{p,p}`, the factorization `V_{p,q}(η) = G_{p,q}(η)∧V_{0,0}(1)`
/// and the constant `λ`, all on frame bases.
pub fn v_map_check(maps: &VMaps<'_>) -> Result<VMapCheck> {
    let inst = maps.instance();
    let action = maps.action();
    let n = inst.n();
    let mut out = VMapCheck {
        lambda: maps.lambda()?,
        ..Default::default()
    };
    let v00 = maps.v(&Form::one(), 0, 0)?;
    for p in 0..=n {
        for q in 0..=n {
            let k = p + q;
            let m = maps.matrix(p, q)?;
            if m.rank() != m.cols() {
                out.failures.push(format!("V_({p},{q}) is not injective"));
            }
            for b in inst.basis(k, 0) {
                let eta = Form::monomial(b, Scalar::one());
                let v = maps.v(&eta, p, q)?;
                if g_map(inst, action, &eta, p, q)?.wedge(&v00) != v {
                    out.failures.push(format!("V_({p},{q}) does not factor through V_(0,0)(1) on {b}"));
                }
                if p < n {
                    let lhs = maps.v(&inst.del(&eta), p + 1, q)?;
                    if lhs != inst.del(&v) {
                        out.failures.push(format!("V_({},{q}) del != del V_({p},{q}) on {b}", p + 1));
                    }
                }
                if q < n {
                    let lhs = maps.v(&inst.del_j(&eta), p, q + 1)?;
                    if lhs != inst.delbar(&v) {
                        out.failures.push(format!("V_({p},{}) del_J != delbar V_({p},{q}) on {b}", q + 1));
                    }
                }
            }
        }
        let phase = reality_phase(n, p);
        let basis: Vec<Form> = inst
            .basis(2 * p, 0)
            .into_iter()
            .map(|b| Form::monomial(b, Scalar::one()))
            .collect();
        for eta in hkt::real_points(inst, &basis, 2 * p)? {
            let v = maps.v(&eta, p, p)?.scale(&phase);
            if inst.conj(&v) != v {
                out.failures.push(format!("phased V_({p},{p}) of a real form is not real"));
            }
            let w = maps.v(&eta.scale(&Scalar::i()), p, p)?.scale(&phase);
            if inst.conj(&w) == w {
                out.failures.push(format!("phased V_({p},{p}) of a non-real form is real"));
            }
        }
    }
    let has = |s: &str| out.failures.iter().any(|f| f.contains(s));
    out.injective = !has("injective");
    out.intertwines_del = !has(" del != ");
    out.intertwines_del_j = !has("del_J");
    out.reality = !has("phased");
    out.factorizes = !has("factor");
    Ok(out)
}

/// The positive `(2n, 2n)` frame form `Π_a (i φ^a∧φ̄^a)`.
pub fn positive_volume(inst: &Instance) -> Form {
    let h = inst.half();
    (0..h).fold(Form::one(), |acc, a| {
        let pair = Form::generator(a).wedge(&Form::generator(a + h)).scale(&Scalar::i());
        acc.wedge(&pair)
    })
}

/// Weak positivity of a real `(n+1, n+1)` form when `n ≤ 2`: the Hermitian
/// form `(β, γ) ↦ ∫ v∧iβ∧γ̄` on `Λ^{n-1,0}`, measured against the positive
/// volume, is positive semidefinite (for `n = 1` this is the sign of `v`).
pub fn weakly_positive(inst: &Instance, v: &Form) -> Result<bool> {
    let n = inst.n();
    if n > 2 {
        return Err(Error::Unsupported("weak positivity is implemented for n <= 2".into()));
    }
    let vol = inst.integrate(&positive_volume(inst));
    let basis = inst.basis(n - 1, 0);
    let mut m = Matrix::zeros(basis.len(), basis.len());
    for (a, x) in basis.iter().enumerate() {
        for (b, y) in basis.iter().enumerate() {
            let beta = Form::monomial(*x, Scalar::i());
            let gamma_bar = inst.conj(&Form::monomial(*y, Scalar::one()));
            let value = &inst.integrate(&v.wedge(&beta).wedge(&gamma_bar)) / &vol;
            m.set(a, b, value);
        }
    }
    if m.conj_transpose() != m {
        return Err(Error::NotReal);
    }
    Ok(hkt::principal_minors_nonnegative(&m))
}

/// Weak positivity of `(-i)^{(n-1)²} V_{1,1}(η)` for a real `η ∈ Λ^{2,0}`.
pub fn transported_positive(maps: &VMaps<'_>, eta: &Form) -> Result<bool> {
    let inst = maps.instance();
    let v = maps.v(eta, 1, 1)?.scale(&reality_phase(inst.n(), 1));
    weakly_positive(inst, &v)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GauduchonEquivalence {
    /// `ρ` with `(-i)^{(n-1)²} V_{n-1,n-1}(Ω^{n-1}) = ρ·ω_I^{2n-1}`.
    pub ratio: Option<Scalar>,
    pub quaternionic_gauduchon: bool,
    pub gauduchon: bool,
}

impl GauduchonEquivalence {
    pub fn holds(&self) -> bool {
        self.ratio.as_ref().is_some_and(|r| r.is_positive_real())
            && self.quaternionic_gauduchon == self.gauduchon
    }
}

/// Compares `∂∂_J Ω^{n-1} = 0` with `∂∂̄ ω_I^{2n-1} = 0` and measures the
/// proportionality of the phased `V_{n-1,n-1}(Ω^{n-1})` to `ω_I^{2n-1}`.
pub fn gauduchon_equivalence_check(maps: &VMaps<'_>, omega: &Form) -> Result<GauduchonEquivalence> {
    let inst = maps.instance();
    let n = inst.n();
    if hkt::positivity(inst, omega)? != hkt::Positivity::Strict {
        return Err(Error::NotPositive);
    }
    let omega_i = hkt::omega_i_from_omega(inst, omega)?;
    let top = omega_i.power(2 * n - 1);
    let power = omega.power(n - 1);
    let v = maps.v(&power, n - 1, n - 1)?.scale(&reality_phase(n, n - 1));
    Ok(GauduchonEquivalence {
        ratio: hkt::proportional(&v, &top),
        quaternionic_gauduchon: crate::cohomology::del_del_j(inst, &power).is_zero(),
        gauduchon: inst.del(&inst.delbar(&top)).is_zero(),
    })
}
