//! Real and positive (2,0)-forms, the holomorphic form `Φ`, quaternionic
//! Gauduchon forms, and the HKT existence criteria.
//!
//! Vectors: `x_a` is the frame vector dual to `φ^a`, so `x_0..x_{2n-1}` span
//! `T^{1,0}`. Structures act on vectors by duality, `θ(L X) = (Lθ)(X)`, so in
//! the real basis `L_vec = L^T` for the form matrix `L`.
//! A 2-form evaluates on frame vectors by
//! `(φ^i∧φ^j)(x_u, x_v) = δ_iu δ_jv - δ_iv δ_ju`.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::cohomology::{del_del_j, LinearMap};
use crate::error::{Error, Result};
use crate::exterior::{Form, Monomial};
use crate::hypercomplex::{ComplexStructure, HypercomplexStructure, Instance};
use crate::linalg::{Matrix, Subspace};
use crate::scalar::Scalar;

/// `η(x_a, x_b)` for a frame 2-form.
fn evaluate_on_frame(eta: &Form, a: usize, b: usize) -> Scalar {
    match a.cmp(&b) {
        std::cmp::Ordering::Equal => Scalar::zero(),
        std::cmp::Ordering::Less => eta.coefficient(Monomial::generator(a).wedge(Monomial::generator(b)).expect("distinct").1),
        std::cmp::Ordering::Greater => -eta.coefficient(Monomial::generator(b).wedge(Monomial::generator(a)).expect("distinct").1),
    }
}

/// `H_ab = η(x_a, J x̄_b)` for `η ∈ Λ^{2,0}`.
pub fn hermitian_matrix(inst: &Instance, eta: &Form) -> Result<Matrix> {
    inst.expect_bidegree(eta, 2, 0)?;
    let h = inst.half();
    let mut out = Matrix::zeros(h, h);
    for a in 0..h {
        for b in 0..h {
            // J x̄_b = Σ_m [coefficient of φ^{b+h} in J φ^m] x_m; only m < h pairs with η.
            let mut acc = Scalar::zero();
            for m in 0..h {
                let c = inst.j_coefficient(m, b + h);
                if !c.is_zero() {
                    acc += &(&c * &evaluate_on_frame(eta, a, m));
                }
            }
            out.set(a, b, acc);
        }
    }
    Ok(out)
}

/// The Hermitian matrix of `Ω`; for an HKT form it is twice the metric on
/// `T^{1,0}`.
pub fn metric_from_omega(inst: &Instance, omega: &Form) -> Result<Matrix> {
    hermitian_matrix(inst, omega)
}

/// `σ(η) = J(conj η)`.
pub fn real_structure(inst: &Instance, eta: &Form) -> Form {
    inst.j(&inst.conj(eta))
}

pub fn is_real_20(inst: &Instance, eta: &Form) -> Result<bool> {
    inst.expect_bidegree(eta, 2, 0)?;
    Ok(&real_structure(inst, eta) == eta)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Positivity {
    Strict,
    Semi,
    None,
}

impl fmt::Display for Positivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Positivity::Strict => "strict",
            Positivity::Semi => "semi",
            Positivity::None => "none",
        })
    }
}

fn submatrix(m: &Matrix, idx: &[usize]) -> Matrix {
    Matrix::from_rows(
        idx.iter()
            .map(|&r| idx.iter().map(|&c| m.get(r, c).clone()).collect())
            .collect(),
    )
}

pub fn leading_minors_positive(m: &Matrix) -> bool {
    (1..=m.rows()).all(|k| {
        let idx: Vec<usize> = (0..k).collect();
        submatrix(m, &idx).determinant().is_positive_real()
    })
}

pub fn principal_minors_nonnegative(m: &Matrix) -> bool {
    let n = m.rows();
    (1u64..1 << n).all(|mask| {
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        submatrix(m, &idx).determinant().is_nonnegative_real()
    })
}

fn classify(h: &Matrix) -> Positivity {
    if leading_minors_positive(h) {
        Positivity::Strict
    } else if !h.is_zero() && principal_minors_nonnegative(h) {
        Positivity::Semi
    } else {
        Positivity::None
    }
}

/// Positivity of a real (2,0)-form through its Hermitian matrix.
pub fn positivity(inst: &Instance, eta: &Form) -> Result<Positivity> {
    if !is_real_20(inst, eta)? {
        return Err(Error::NotReal);
    }
    let h = hermitian_matrix(inst, eta)?;
    if h.conj_transpose() != h {
        return Err(Error::Consistency(
            "Hermitian matrix of a real form is not Hermitian".into(),
        ));
    }
    Ok(classify(&h))
}

/// Action on vectors in the real basis.
pub fn vector_matrix(l: &Matrix) -> Matrix {
    l.transpose()
}

/// `Σ_L L_vec^T L_vec` over `L ∈ {1, I, J, K}`: a metric for which all three
/// structures are orthogonal.
pub fn averaged_metric(structure: &HypercomplexStructure) -> Matrix {
    let dim = structure.dim();
    let mut g = Matrix::identity(dim);
    for which in ComplexStructure::ALL {
        let v = vector_matrix(structure.matrix(which));
        g = g.add(&v.transpose().mul(&v));
    }
    g
}

/// Real-basis 2-form with `ω(e_a, e_b) = w[a][b]`.
fn two_form_of(w: &Matrix) -> Form {
    let mut f = Form::zero();
    for a in 0..w.rows() {
        for b in a + 1..w.cols() {
            let m = Monomial::generator(a).wedge(Monomial::generator(b)).expect("distinct").1;
            f.add_term(m, w.get(a, b).clone());
        }
    }
    f
}

fn matrix_of_two_form(f: &Form, dim: usize) -> Matrix {
    let mut w = Matrix::zeros(dim, dim);
    for (m, c) in f.terms() {
        let idx = m.indices();
        w.set(idx[0], idx[1], c.clone());
        w.set(idx[1], idx[0], -c);
    }
    w
}

/// `ω_L(X, Y) = g(L X, Y)` in the real basis.
pub fn fundamental_form(structure: &HypercomplexStructure, g: &Matrix, which: ComplexStructure) -> Form {
    two_form_of(&vector_matrix(structure.matrix(which)).transpose().mul(g))
}

/// The (2,0)-form `Ω = ω_J - i ω_K` of a metric, as a frame form. Since
/// (1,0)-forms are the `+i` eigenforms, `ω_J + i ω_K` is its conjugate,
/// of type (0,2). `Ω(x, J ȳ) = 2 g(x, ȳ)` on `T^{1,0}`.
pub fn omega_from_metric(inst: &Instance, g: &Matrix) -> Form {
    let s = inst.structure();
    let wj = inst.to_frame(&fundamental_form(s, g, ComplexStructure::J));
    let wk = inst.to_frame(&fundamental_form(s, g, ComplexStructure::K));
    wj.sub(&wk.scale(&Scalar::i()))
}

/// Real-basis metric with `Re Ω = ω_J`.
pub fn real_metric_from_omega(inst: &Instance, omega: &Form) -> Result<Matrix> {
    if !is_real_20(inst, omega)? {
        return Err(Error::NotReal);
    }
    let e_form = inst.from_frame(omega);
    let real_part = e_form.add(&e_form.conj()).scale(&Scalar::ratio(1, 2));
    let w = matrix_of_two_form(&real_part, inst.dim());
    // W_J = J_vec^T g and J_vec^T = J squares to -1.
    let g = inst.structure().j_mat().mul(&w).scale(&-Scalar::one());
    if g.transpose() != g {
        return Err(Error::Consistency("metric from Ω is not symmetric".into()));
    }
    Ok(g)
}

/// `ω_I` of the metric determined by `Ω`, as a frame form.
pub fn omega_i_from_omega(inst: &Instance, omega: &Form) -> Result<Form> {
    let g = real_metric_from_omega(inst, omega)?;
    Ok(inst.to_frame(&fundamental_form(inst.structure(), &g, ComplexStructure::I)))
}

/// `Ω` of the averaged metric.
pub fn averaged_omega(inst: &Instance) -> Form {
    omega_from_metric(inst, &averaged_metric(inst.structure()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiOutcome {
    pub phi: Option<Form>,
    pub reason: Option<String>,
    /// `∫ Φ ∧ conj Φ` when `Φ` exists.
    pub volume: Option<Scalar>,
}

/// The generator of `Λ^{2n,0}` made real (`J Φ = conj Φ`) and positive
/// (a positive multiple of `Ω^n` for positive `Ω`), if it is `∂̄`-closed.
pub fn find_phi(inst: &Instance) -> Result<PhiOutcome> {
    let none = |reason: &str| PhiOutcome {
        phi: None,
        reason: Some(reason.to_string()),
        volume: None,
    };
    let top = inst.top_holomorphic();
    let phi0 = Form::monomial(top, Scalar::one());
    if !inst.delbar(&phi0).is_zero() {
        return Ok(none("the generator of the top holomorphic forms is not delbar-closed"));
    }
    let conj0 = inst.conj(&phi0);
    let anti = *conj0.terms().next().expect("nonzero").0;
    let mu = &inst.j(&phi0).coefficient(anti) / &conj0.coefficient(anti);
    if mu.norm_sqr() != BigRational::one() {
        return Ok(none("J does not act on the top holomorphic forms by a unit scalar"));
    }
    // c·Φ0 is real iff conj(c) = c·μ.
    let mut c = if mu == -Scalar::one() {
        Scalar::i()
    } else {
        Scalar::one() + mu.conj()
    };
    let reference = averaged_omega(inst).power(inst.half() / 2);
    let r = reference.coefficient(top);
    if r.is_zero() {
        return Err(Error::Consistency("averaged Ω^n vanishes".into()));
    }
    let ratio = &c / &r;
    if !ratio.is_real() {
        return Err(Error::Consistency(
            "averaged Ω^n is not a real multiple of Φ".into(),
        ));
    }
    if ratio.re().is_negative() {
        c = -c;
    }
    let lead = if c.re().is_zero() { c.im().abs() } else { c.re().abs() };
    c = c.scale(&lead.recip());
    let phi = phi0.scale(&c);
    if real_structure(inst, &phi) != phi {
        return Err(Error::Consistency("Φ failed its reality check".into()));
    }
    let volume = inst.integrate(&phi.wedge(&inst.conj(&phi)));
    Ok(PhiOutcome {
        phi: Some(phi),
        reason: None,
        volume: Some(volume),
    })
}

/// `∂∂_J Ω^{n-1} = 0` for a strictly positive `Ω`.
pub fn is_quaternionic_gauduchon(inst: &Instance, omega: &Form) -> Result<bool> {
    if positivity(inst, omega)? != Positivity::Strict {
        return Err(Error::NotPositive);
    }
    Ok(del_del_j(inst, &omega.power(inst.n() - 1)).is_zero())
}

/// Real points `{η ∈ span : σ(η) = η}` of a complex span inside `Λ^{k,0}`,
/// as a rational basis. `span` must be linearly independent.
pub fn real_points(inst: &Instance, span: &[Form], k: usize) -> Result<Vec<Form>> {
    let basis = inst.basis(k, 0);
    let dim = basis.len();
    let m = span.len();
    let mut columns: Vec<Vec<Scalar>> = Vec::with_capacity(2 * m);
    let mut generators = Vec::with_capacity(2 * m);
    for b in span {
        for g in [b.clone(), b.scale(&Scalar::i())] {
            let defect = real_structure(inst, &g).sub(&g).coordinates(&basis)?;
            let mut col: Vec<Scalar> = defect.iter().map(|c| Scalar::real(c.re().clone())).collect();
            col.extend(defect.iter().map(|c| Scalar::real(c.im().clone())));
            columns.push(col);
            generators.push(g);
        }
    }
    if m == 0 {
        return Ok(Vec::new());
    }
    let kernel = Matrix::from_columns(2 * dim, &columns).kernel();
    Ok(kernel
        .iter()
        .map(|coeffs| {
            let mut f = Form::zero();
            for (g, c) in generators.iter().zip(coeffs) {
                f.add_scaled(g, c);
            }
            f
        })
        .collect())
}

fn forms_from_subspace(basis: &[Monomial], s: &Subspace) -> Vec<Form> {
    s.basis().iter().map(|v| Form::from_coordinates(basis, v)).collect()
}

/// Real `∂`-closed (2,0)-forms.
pub fn closed_real_20(inst: &Instance) -> Result<Vec<Form>> {
    let map = LinearMap::of(inst, (2, 0), (3, 0), |f| inst.del(f))?;
    real_points(inst, &forms_from_subspace(map.domain(), map.kernel()), 2)
}

/// Real (2,0)-forms with `∂∂_J η = 0`.
pub fn ddj_closed_real_20(inst: &Instance) -> Result<Vec<Form>> {
    let map = LinearMap::of(inst, (2, 0), (4, 0), |f| del_del_j(inst, f))?;
    real_points(inst, &forms_from_subspace(map.domain(), map.kernel()), 2)
}

/// All real (2,0)-forms.
pub fn real_20(inst: &Instance) -> Result<Vec<Form>> {
    let basis = inst.basis(2, 0);
    let span: Vec<Form> = basis.iter().map(|m| Form::monomial(*m, Scalar::one())).collect();
    real_points(inst, &span, 2)
}

/// Real elements of `∂(Λ^{1,0})`.
pub fn exact_real_20(inst: &Instance) -> Result<Vec<Form>> {
    let map = LinearMap::of(inst, (1, 0), (2, 0), |f| inst.del(f))?;
    real_points(inst, &forms_from_subspace(map.codomain(), map.image()), 2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Largest coefficient magnitude tried.
    pub bound: i64,
    /// Stop after this many lattice points.
    pub max_candidates: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            bound: 8,
            max_candidates: 20_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchHit {
    pub form: Form,
    pub coefficients: Vec<i64>,
    pub positivity: Positivity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub hit: Option<SearchHit>,
    pub candidates: u64,
    pub exhausted: bool,
}

fn float_matrix(m: &Matrix) -> Vec<(f64, f64)> {
    (0..m.rows())
        .flat_map(|r| (0..m.cols()).map(move |c| (r, c)))
        .map(|(r, c)| m.get(r, c).to_f64_pair())
        .collect()
}

/// Cholesky pivots of a Hermitian matrix in floating point; a screen only.
fn float_positive_definite(h: &[(f64, f64)], n: usize) -> bool {
    let mut a = h.to_vec();
    for k in 0..n {
        let pivot = a[k * n + k].0;
        if pivot <= 1e-9 {
            return false;
        }
        for i in k + 1..n {
            let (lr, li) = a[i * n + k];
            for j in k + 1..n {
                // a_ij -= a_ik conj(a_jk) / a_kk
                let (kr, ki) = a[j * n + k];
                let pr = lr * kr + li * ki;
                let pi = li * kr - lr * ki;
                a[i * n + j].0 -= pr / pivot;
                a[i * n + j].1 -= pi / pivot;
            }
        }
    }
    true
}

/// Lattice points of the shell `max|x_i| = s`, enumerated lexicographically.
fn shell_point(index: u64, s: i64, m: usize) -> Option<Vec<i64>> {
    let radix = (2 * s + 1) as u64;
    let mut digits = vec![0i64; m];
    let mut rest = index;
    for slot in digits.iter_mut().rev() {
        *slot = (rest % radix) as i64 - s;
        rest /= radix;
    }
    digits.iter().any(|d| d.abs() == s).then_some(digits)
}

/// Searches integer combinations of `generators` for a form of the wanted
/// positivity, shell by shell; within the first successful shell the
/// lexicographically smallest coefficient vector wins.
pub fn cone_search(
    inst: &Instance,
    generators: &[Form],
    want: Positivity,
    config: SearchConfig,
) -> Result<SearchOutcome> {
    let m = generators.len();
    if m == 0 || want == Positivity::None {
        return Ok(SearchOutcome {
            hit: None,
            candidates: 0,
            exhausted: true,
        });
    }
    let mats: Vec<Matrix> = generators
        .iter()
        .map(|g| hermitian_matrix(inst, g))
        .collect::<Result<_>>()?;
    let floats: Vec<Vec<(f64, f64)>> = mats.iter().map(float_matrix).collect();
    let h = inst.half();
    let combine = |x: &[i64]| -> Matrix {
        let mut acc = Matrix::zeros(h, h);
        for (c, mat) in x.iter().zip(&mats) {
            if *c != 0 {
                acc = acc.add(&mat.scale(&Scalar::from_int(*c)));
            }
        }
        acc
    };
    let accept = |x: &[i64]| -> bool {
        match want {
            Positivity::Strict => {
                let mut f = vec![(0.0, 0.0); h * h];
                for (c, fm) in x.iter().zip(&floats) {
                    for (slot, v) in f.iter_mut().zip(fm) {
                        slot.0 += *c as f64 * v.0;
                        slot.1 += *c as f64 * v.1;
                    }
                }
                float_positive_definite(&f, h) && leading_minors_positive(&combine(x))
            }
            _ => classify(&combine(x)) == Positivity::Semi,
        }
    };
    let mut tried = 0u64;
    for s in 1..=config.bound {
        let radix = (2 * s + 1) as u64;
        let Some(total) = radix.checked_pow(m as u32) else {
            return Ok(SearchOutcome { hit: None, candidates: tried, exhausted: false });
        };
        let inner = (2 * s - 1) as u64;
        let shell_size = total - inner.pow(m as u32);
        if tried + shell_size > config.max_candidates {
            return Ok(SearchOutcome { hit: None, candidates: tried, exhausted: false });
        }
        tried += shell_size;
        let found = (0..total)
            .into_par_iter()
            .filter_map(|idx| shell_point(idx, s, m))
            .find_first(|x| accept(x));
        if let Some(x) = found {
            let mut form = Form::zero();
            for (c, g) in x.iter().zip(generators) {
                form.add_scaled(g, &Scalar::from_int(*c));
            }
            let positivity = positivity(inst, &form)?;
            return Ok(SearchOutcome {
                hit: Some(SearchHit {
                    form,
                    coefficients: x,
                    positivity,
                }),
                candidates: tried,
                exhausted: false,
            });
        }
    }
    Ok(SearchOutcome {
        hit: None,
        candidates: tried,
        exhausted: true,
    })
}

/// A strictly positive `∂`-closed real (2,0)-form, if the search finds one.
pub fn find_hkt_form(inst: &Instance, config: SearchConfig) -> Result<SearchOutcome> {
    cone_search(inst, &closed_real_20(inst)?, Positivity::Strict, config)
}

/// A nonzero positive `∂`-exact real (2,0)-form (only meaningful for n = 2).
pub fn find_obstruction_witness(inst: &Instance, config: SearchConfig) -> Result<SearchOutcome> {
    cone_search(inst, &exact_real_20(inst)?, Positivity::Semi, config)
}

/// A strictly positive real (2,0)-form with `∂∂_J Ω = 0` (n = 2).
pub fn find_gauduchon_form(inst: &Instance, config: SearchConfig) -> Result<SearchOutcome> {
    if inst.n() != 2 {
        return Err(Error::Unsupported(
            "the Gauduchon condition is linear only for n = 2".into(),
        ));
    }
    cone_search(inst, &ddj_closed_real_20(inst)?, Positivity::Strict, config)
}

/// A strictly positive real (2,0)-form with `∂∂_J Ω^{n-1} ≠ 0`.
pub fn find_non_gauduchon_form(inst: &Instance, config: SearchConfig) -> Result<SearchOutcome> {
    let all = real_20(inst)?;
    let outcome = cone_search(inst, &all, Positivity::Strict, config)?;
    // Prefer the averaged Ω, then perturb the first hit along non-closed directions.
    let avg = averaged_omega(inst);
    let mut seeds = vec![avg];
    if let Some(hit) = &outcome.hit {
        seeds.push(hit.form.clone());
    }
    for seed in seeds {
        for g in std::iter::once(Form::zero()).chain(all.iter().cloned()) {
            for scale in [1i64, -1] {
                let candidate = seed.add(&g.scale(&Scalar::ratio(scale, 8)));
                if positivity(inst, &candidate)? == Positivity::Strict
                    && !del_del_j(inst, &candidate.power(inst.n() - 1)).is_zero()
                {
                    return Ok(SearchOutcome {
                        hit: Some(SearchHit {
                            form: candidate,
                            coefficients: Vec::new(),
                            positivity: Positivity::Strict,
                        }),
                        candidates: outcome.candidates,
                        exhausted: false,
                    });
                }
            }
        }
    }
    Ok(SearchOutcome {
        hit: None,
        candidates: outcome.candidates,
        exhausted: false,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HktAnswer {
    Yes,
    No,
    Unknown,
}

impl HktAnswer {
    pub fn as_str(self) -> &'static str {
        match self {
            HktAnswer::Yes => "yes",
            HktAnswer::No => "no",
            HktAnswer::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub hkt: HktAnswer,
    /// Name of the criterion that decided, if any.
    pub basis: Option<String>,
    pub witness: Option<Form>,
    pub notes: Vec<String>,
}

impl Verdict {
    fn unknown(notes: Vec<String>) -> Verdict {
        Verdict {
            hkt: HktAnswer::Unknown,
            basis: None,
            witness: None,
            notes,
        }
    }
}

/// Data shared by all criteria for one instance.
pub struct HktContext<'a> {
    pub instance: &'a Instance,
    pub phi: Option<Form>,
    pub h01: usize,
    pub search: SearchConfig,
    /// Accept non-nilpotent algebras for the parity criterion.
    pub allow_non_nilpotent: bool,
}

pub trait HktCriterion: Send + Sync {
    fn name(&self) -> &'static str;
    fn evaluate(&self, ctx: &HktContext<'_>) -> Result<Verdict>;
}

/// Parity of `h^{0,1}`: decisive for n = 2 with `Φ`; for larger n only an
/// odd value is conclusive.
pub struct ParityCriterion;

impl HktCriterion for ParityCriterion {
    fn name(&self) -> &'static str {
        "parity"
    }

    fn evaluate(&self, ctx: &HktContext<'_>) -> Result<Verdict> {
        let inst = ctx.instance;
        let mut notes = Vec::new();
        if ctx.phi.is_none() {
            notes.push("no holomorphic real top form, parity criterion does not apply".into());
            return Ok(Verdict::unknown(notes));
        }
        if !inst.is_nilpotent() && !ctx.allow_non_nilpotent {
            notes.push("algebra is not nilpotent; invariant cohomology may differ from the manifold's".into());
            return Ok(Verdict::unknown(notes));
        }
        let even = ctx.h01 % 2 == 0;
        let hkt = match (inst.n(), even) {
            (2, true) => HktAnswer::Yes,
            (_, false) => HktAnswer::No,
            _ => {
                notes.push("even h^{0,1} is not conclusive for n > 2".into());
                HktAnswer::Unknown
            }
        };
        Ok(Verdict {
            hkt,
            basis: (hkt != HktAnswer::Unknown).then(|| self.name().to_string()),
            witness: None,
            notes,
        })
    }
}

pub struct ExplicitFormCriterion;

impl HktCriterion for ExplicitFormCriterion {
    fn name(&self) -> &'static str {
        "explicit-form"
    }

    fn evaluate(&self, ctx: &HktContext<'_>) -> Result<Verdict> {
        let inst = ctx.instance;
        let outcome = find_hkt_form(inst, ctx.search)?;
        let Some(hit) = outcome.hit else {
            return Ok(Verdict::unknown(vec![format!(
                "no strictly positive closed form among {} lattice points",
                outcome.candidates
            )]));
        };
        if positivity(inst, &hit.form)? != Positivity::Strict || !inst.del(&hit.form).is_zero() {
            return Err(Error::Consistency("HKT form failed revalidation".into()));
        }
        Ok(Verdict {
            hkt: HktAnswer::Yes,
            basis: Some(self.name().to_string()),
            witness: Some(hit.form),
            notes: vec![format!("coefficients {:?}", hit.coefficients)],
        })
    }
}

pub struct ObstructionCriterion;

impl HktCriterion for ObstructionCriterion {
    fn name(&self) -> &'static str {
        "obstruction-witness"
    }

    fn evaluate(&self, ctx: &HktContext<'_>) -> Result<Verdict> {
        let inst = ctx.instance;
        if inst.n() != 2 {
            return Ok(Verdict::unknown(vec![
                "positive exact witnesses are searched only for n = 2".into(),
            ]));
        }
        let outcome = find_obstruction_witness(inst, ctx.search)?;
        let Some(hit) = outcome.hit else {
            return Ok(Verdict::unknown(vec![format!(
                "no positive exact form among {} lattice points",
                outcome.candidates
            )]));
        };
        let exact = LinearMap::of(inst, (1, 0), (2, 0), |f| inst.del(f))?;
        let coords = hit.form.coordinates(exact.codomain())?;
        if positivity(inst, &hit.form)? != Positivity::Semi || !exact.image().contains(&coords) {
            return Err(Error::Consistency("obstruction witness failed revalidation".into()));
        }
        Ok(Verdict {
            hkt: HktAnswer::No,
            basis: Some(self.name().to_string()),
            witness: Some(hit.form),
            notes: vec![format!("coefficients {:?}", hit.coefficients)],
        })
    }
}

pub struct CriterionRegistry {
    criteria: Vec<Box<dyn HktCriterion>>,
}

impl Default for CriterionRegistry {
    fn default() -> Self {
        CriterionRegistry::builtin()
    }
}

impl CriterionRegistry {
    pub fn empty() -> Self {
        CriterionRegistry {
            criteria: Vec::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut r = CriterionRegistry::empty();
        r.register(Box::new(ParityCriterion));
        r.register(Box::new(ExplicitFormCriterion));
        r.register(Box::new(ObstructionCriterion));
        r
    }

    pub fn register(&mut self, c: Box<dyn HktCriterion>) {
        self.criteria.retain(|x| x.name() != c.name());
        self.criteria.push(c);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.criteria.iter().map(|c| c.name()).collect()
    }

    /// Keeps only the named criteria, in the given order.
    pub fn select(mut self, names: &[String]) -> Result<Self> {
        let mut picked = Vec::new();
        for n in names {
            let pos = self
                .criteria
                .iter()
                .position(|c| c.name() == n)
                .ok_or_else(|| Error::UnknownCriterion(n.clone()))?;
            picked.push(self.criteria.remove(pos));
        }
        Ok(CriterionRegistry { criteria: picked })
    }

    /// Runs every criterion; the first decisive answer wins and all decisive
    /// answers must agree.
    pub fn decide(&self, ctx: &HktContext<'_>) -> Result<HktDecision> {
        let mut results = Vec::new();
        for c in &self.criteria {
            results.push((c.name().to_string(), c.evaluate(ctx)?));
        }
        let decisive: Vec<&(String, Verdict)> = results
            .iter()
            .filter(|(_, v)| v.hkt != HktAnswer::Unknown)
            .collect();
        if let Some((first, v)) = decisive.first() {
            if let Some((other, w)) = decisive.iter().find(|(_, w)| w.hkt != v.hkt) {
                return Err(Error::Consistency(format!(
                    "criterion {first} says {} but {other} says {}",
                    v.hkt.as_str(),
                    w.hkt.as_str()
                )));
            }
        }
        let mut verdict = match decisive.first() {
            Some((_, v)) => v.clone(),
            None => Verdict::unknown(Vec::new()),
        };
        if verdict.witness.is_none() {
            verdict.witness = decisive.iter().find_map(|(_, v)| v.witness.clone());
        }
        Ok(HktDecision {
            verdict,
            per_criterion: results,
        })
    }
}

#[derive(Clone, Debug)]
pub struct HktDecision {
    pub verdict: Verdict,
    pub per_criterion: Vec<(String, Verdict)>,
}

/// `c` with `a = c·b` and `c` a positive rational, if there is one.
pub fn positive_multiple(a: &Form, b: &Form) -> Option<Scalar> {
    let (m, bc) = b.terms().next()?;
    let c = &a.coefficient(*m) / bc;
    (c.is_positive_real() && &b.scale(&c) == a).then_some(c)
}

/// `a = c·b` for some scalar `c`; returns `c`.
pub fn proportional(a: &Form, b: &Form) -> Option<Scalar> {
    if b.is_zero() {
        return a.is_zero().then(Scalar::zero);
    }
    let (m, bc) = b.terms().next()?;
    let c = &a.coefficient(*m) / bc;
    (&b.scale(&c) == a).then_some(c)
}
