//! Dolbeault, quaternionic Bott–Chern and Aeppli cohomology of the complex
//! of invariant forms, the duality pairing, the degree map and the
//! `∂∂_J`-lemma on `Λ^{2,0}`.
//!
//! Forms here are frame forms of an [`Instance`].

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exterior::{Form, Monomial};
use crate::hypercomplex::Instance;
use crate::linalg::{unit_vector, Matrix, Subspace};
use crate::scalar::Scalar;

/// A matrix between two monomial bases.
#[derive(Clone, Debug)]
pub struct LinearMap {
    domain: Vec<Monomial>,
    codomain: Vec<Monomial>,
    matrix: Matrix,
    kernel: Subspace,
    image: Subspace,
}

impl LinearMap {
    pub fn new(domain: Vec<Monomial>, codomain: Vec<Monomial>, matrix: Matrix) -> Result<Self> {
        assert_eq!((matrix.rows(), matrix.cols()), (codomain.len(), domain.len()));
        let kernel = Subspace::kernel_of(&matrix);
        let image = Subspace::column_space(&matrix);
        if kernel.dim() + image.dim() != domain.len() {
            return Err(Error::Consistency(format!(
                "rank {} + nullity {} != {}",
                image.dim(),
                kernel.dim(),
                domain.len()
            )));
        }
        Ok(LinearMap {
            domain,
            codomain,
            matrix,
            kernel,
            image,
        })
    }

    /// Matrix of a frame operator between two bidegrees.
    pub fn of(
        inst: &Instance,
        src: (usize, usize),
        dst: (usize, usize),
        op: impl Fn(&Form) -> Form,
    ) -> Result<Self> {
        let domain = inst.basis(src.0, src.1);
        let codomain = inst.basis(dst.0, dst.1);
        let matrix = crate::exterior::operator_matrix(&domain, &codomain, op)?;
        LinearMap::new(domain, codomain, matrix)
    }

    pub fn domain(&self) -> &[Monomial] {
        &self.domain
    }

    pub fn codomain(&self) -> &[Monomial] {
        &self.codomain
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.image.dim()
    }

    pub fn kernel(&self) -> &Subspace {
        &self.kernel
    }

    pub fn image(&self) -> &Subspace {
        &self.image
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyGroup {
    pub label: String,
    pub dimension: usize,
    /// Frame forms representing a basis of the group.
    pub representatives: Vec<Form>,
}

fn forms_of(basis: &[Monomial], vectors: &[Vec<Scalar>]) -> Vec<Form> {
    vectors
        .iter()
        .map(|v| Form::from_coordinates(basis, v))
        .collect()
}

fn quotient(label: String, basis: &[Monomial], cycles: &Subspace, boundaries: &Subspace) -> Result<CohomologyGroup> {
    if !cycles.contains_subspace(boundaries) {
        return Err(Error::Consistency(format!(
            "{label}: boundaries are not cycles"
        )));
    }
    let reps = cycles.quotient_representatives(boundaries);
    Ok(CohomologyGroup {
        label,
        dimension: cycles.dim() - boundaries.dim(),
        representatives: forms_of(basis, &reps),
    })
}

/// Image of an operator from a bidegree that may not exist (`p` or `q`
/// negative), as a subspace of the target.
fn image_from(
    inst: &Instance,
    src: Option<(usize, usize)>,
    dst: (usize, usize),
    op: impl Fn(&Form) -> Form,
) -> Result<Subspace> {
    let target = inst.basis(dst.0, dst.1).len();
    match src {
        Some(s) => Ok(LinearMap::of(inst, s, dst, op)?.image().clone()),
        None => Ok(Subspace::zero(target)),
    }
}

fn kernel_of(inst: &Instance, src: (usize, usize), dst: (usize, usize), op: impl Fn(&Form) -> Form) -> Result<Subspace> {
    if inst.basis(dst.0, dst.1).is_empty() {
        return Ok(Subspace::full(inst.basis(src.0, src.1).len()));
    }
    Ok(LinearMap::of(inst, src, dst, op)?.kernel().clone())
}

fn below(x: usize, by: usize) -> Option<usize> {
    x.checked_sub(by)
}

/// `∂∂_J` on frame forms.
pub fn del_del_j(inst: &Instance, x: &Form) -> Form {
    inst.del(&inst.del_j(x))
}

/// `H^{p,q}_{∂̄}` of the invariant complex.
pub fn dolbeault_h(inst: &Instance, p: usize, q: usize) -> Result<CohomologyGroup> {
    let basis = inst.basis(p, q);
    let cycles = kernel_of(inst, (p, q), (p, q + 1), |f| inst.delbar(f))?;
    let boundaries = image_from(inst, below(q, 1).map(|q1| (p, q1)), (p, q), |f| inst.delbar(f))?;
    quotient(format!("H^{{{p},{q}}}_dolbeault"), &basis, &cycles, &boundaries)
}

/// `H^{p,0}_∂` on invariant forms: `ker ∂ / im ∂` inside `Λ^{•,0}`.
pub fn del_h(inst: &Instance, p: usize) -> Result<CohomologyGroup> {
    let basis = inst.basis(p, 0);
    let cycles = kernel_of(inst, (p, 0), (p + 1, 0), |f| inst.del(f))?;
    let boundaries = image_from(inst, below(p, 1).map(|p1| (p1, 0)), (p, 0), |f| inst.del(f))?;
    quotient(format!("H^{{{p},0}}_del"), &basis, &cycles, &boundaries)
}

/// Subspaces of `Λ^{p,0}` used by the quaternionic Bott–Chern and Aeppli groups.
pub struct QuaternionicSpaces {
    pub basis: Vec<Monomial>,
    /// `ker ∂ ∩ ker ∂_J`.
    pub closed: Subspace,
    /// `im ∂∂_J` from `Λ^{p-2,0}`.
    pub ddj_exact: Subspace,
    /// `ker ∂∂_J`.
    pub ddj_closed: Subspace,
    /// `im ∂ + im ∂_J` from `Λ^{p-1,0}`.
    pub exact: Subspace,
}

pub fn quaternionic_spaces(inst: &Instance, p: usize) -> Result<QuaternionicSpaces> {
    let basis = inst.basis(p, 0);
    let ker_del = kernel_of(inst, (p, 0), (p + 1, 0), |f| inst.del(f))?;
    let ker_del_j = kernel_of(inst, (p, 0), (p + 1, 0), |f| inst.del_j(f))?;
    let ddj_exact = image_from(inst, below(p, 2).map(|p2| (p2, 0)), (p, 0), |f| del_del_j(inst, f))?;
    let ddj_closed = kernel_of(inst, (p, 0), (p + 2, 0), |f| del_del_j(inst, f))?;
    let prev = below(p, 1).map(|p1| (p1, 0));
    let exact = image_from(inst, prev, (p, 0), |f| inst.del(f))?
        .sum(&image_from(inst, prev, (p, 0), |f| inst.del_j(f))?);
    Ok(QuaternionicSpaces {
        basis,
        closed: ker_del.intersection(&ker_del_j),
        ddj_exact,
        ddj_closed,
        exact,
    })
}

/// Quaternionic Bott–Chern group `H^{p,0}_BC`.
pub fn qbc_h(inst: &Instance, p: usize) -> Result<CohomologyGroup> {
    let s = quaternionic_spaces(inst, p)?;
    quotient(format!("H^{{{p},0}}_BC"), &s.basis, &s.closed, &s.ddj_exact)
}

/// Quaternionic Aeppli group `H^{p,0}_AE`.
pub fn qae_h(inst: &Instance, p: usize) -> Result<CohomologyGroup> {
    let s = quaternionic_spaces(inst, p)?;
    quotient(format!("H^{{{p},0}}_AE"), &s.basis, &s.ddj_closed, &s.exact)
}

pub fn hodge_table(inst: &Instance) -> Result<BTreeMap<(usize, usize), usize>> {
    let h = inst.half();
    let cells: Vec<(usize, usize)> = (0..=h).flat_map(|p| (0..=h).map(move |q| (p, q))).collect();
    let dims: Vec<Result<usize>> = cells
        .par_iter()
        .map(|&(p, q)| dolbeault_h(inst, p, q).map(|g| g.dimension))
        .collect();
    cells.into_iter().zip(dims).map(|(c, d)| Ok((c, d?))).collect()
}

pub fn qbc_table(inst: &Instance) -> Result<Vec<CohomologyGroup>> {
    (0..=inst.half()).into_par_iter().map(|p| qbc_h(inst, p)).collect()
}

pub fn qae_table(inst: &Instance) -> Result<Vec<CohomologyGroup>> {
    (0..=inst.half()).into_par_iter().map(|p| qae_h(inst, p)).collect()
}

/// `∫ a ∧ b ∧ conj(Φ)` for `a ∈ Λ^{p,0}`, `b ∈ Λ^{2n-p,0}`.
pub fn duality_pairing(inst: &Instance, a: &Form, b: &Form, phi: &Form) -> Result<Scalar> {
    let h = inst.half();
    let p = pure_holomorphic_degree(inst, a)?;
    inst.expect_bidegree(b, h.saturating_sub(p), 0)?;
    if p > h {
        return Err(Error::BidegreeMismatch {
            expected: (h, 0),
            found: vec![(p, 0)],
        });
    }
    Ok(inst.integrate(&a.wedge(b).wedge(&inst.conj(phi))))
}

/// The `p` with `x ∈ Λ^{p,0}`; zero forms count as degree 0.
fn pure_holomorphic_degree(inst: &Instance, x: &Form) -> Result<usize> {
    let found = inst.bidegrees(x);
    match found.as_slice() {
        [] => Ok(0),
        [(p, 0)] => Ok(*p),
        _ => Err(Error::BidegreeMismatch {
            expected: (found.first().map_or(0, |b| b.0), 0),
            found,
        }),
    }
}

/// Gram matrix of the pairing between `H^{p,0}_BC` and `H^{2n-p,0}_AE`
/// representatives.
pub fn duality_gram(inst: &Instance, p: usize, phi: &Form) -> Result<Matrix> {
    let bc = qbc_h(inst, p)?;
    let ae = qae_h(inst, inst.half() - p)?;
    let mut g = Matrix::zeros(bc.dimension, ae.dimension);
    for (i, a) in bc.representatives.iter().enumerate() {
        for (j, b) in ae.representatives.iter().enumerate() {
            g.set(i, j, duality_pairing(inst, a, b, phi)?);
        }
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DdjLemma {
    pub holds: bool,
    /// An element of `im ∂ ∩ ker ∂_J` outside `im ∂∂_J` when the lemma fails.
    pub witness: Option<Form>,
}

/// Whether `im ∂ ∩ ker ∂_J ⊆ im ∂∂_J` inside `Λ^{2,0}`.
pub fn ddj_lemma_check(inst: &Instance) -> Result<DdjLemma> {
    let basis = inst.basis(2, 0);
    let im_del = image_from(inst, Some((1, 0)), (2, 0), |f| inst.del(f))?;
    let ker_del_j = kernel_of(inst, (2, 0), (3, 0), |f| inst.del_j(f))?;
    let im_ddj = image_from(inst, Some((0, 0)), (2, 0), |f| del_del_j(inst, f))?;
    let candidates = im_del.intersection(&ker_del_j);
    let outside = Subspace::extend_basis(&im_ddj, candidates.basis());
    Ok(DdjLemma {
        holds: outside.is_empty(),
        witness: outside.first().map(|v| Form::from_coordinates(&basis, v)),
    })
}

/// `∂∂_J Ω^{n-1} = 0`.
pub fn is_gauduchon_condition(inst: &Instance, omega: &Form) -> bool {
    del_del_j(inst, &omega.power(inst.n() - 1)).is_zero()
}

/// `deg α = ∫ ∂α ∧ Ω^{n-1} ∧ conj(Φ)` for `α ∈ Λ^{1,0}`.
pub fn degree(inst: &Instance, alpha: &Form, omega: &Form, phi: &Form) -> Result<Scalar> {
    inst.expect_bidegree(alpha, 1, 0)?;
    if !is_gauduchon_condition(inst, omega) {
        return Err(Error::NotGauduchon);
    }
    Ok(degree_unchecked(inst, alpha, omega, phi))
}

fn degree_unchecked(inst: &Instance, alpha: &Form, omega: &Form, phi: &Form) -> Scalar {
    let top = inst
        .del(alpha)
        .wedge(&omega.power(inst.n() - 1))
        .wedge(&inst.conj(phi));
    inst.integrate(&top)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactSequenceCheck {
    /// `H^{1,0}_∂ → H^{1,0}_AE` is injective.
    pub injective: bool,
    /// `ker deg = ker(∂ : H^{1,0}_AE → H^{2,0}_BC)`.
    pub kernels_agree: bool,
    /// `deg` vanishes on `im ∂ + im ∂_J` from constants.
    pub well_defined: bool,
    /// `deg` on the representatives of `H^{1,0}_AE`.
    pub degrees: Vec<Scalar>,
    pub dim_ae: usize,
    pub dim_del: usize,
}

impl ExactSequenceCheck {
    pub fn passes(&self) -> bool {
        self.injective && self.kernels_agree && self.well_defined
    }

    pub fn degree_vanishes(&self) -> bool {
        self.degrees.iter().all(Scalar::is_zero)
    }
}

/// Exactness of `0 → H^{1,0}_∂ → H^{1,0}_AE → C` with the degree map.
pub fn degree_exact_sequence_check(
    inst: &Instance,
    omega: &Form,
    phi: &Form,
) -> Result<ExactSequenceCheck> {
    if !is_gauduchon_condition(inst, omega) {
        return Err(Error::NotGauduchon);
    }
    let basis = inst.basis(1, 0);
    let q1 = quaternionic_spaces(inst, 1)?;
    let q2 = quaternionic_spaces(inst, 2)?;
    let ker_del = kernel_of(inst, (1, 0), (2, 0), |f| inst.del(f))?;
    let im_del0 = image_from(inst, Some((0, 0)), (1, 0), |f| inst.del(f))?;

    // H^{1,0}_∂ = ker ∂ / im ∂ maps to ker ∂∂_J / (im ∂ + im ∂_J).
    let injective = q1.ddj_closed.contains_subspace(&ker_del)
        && im_del0.contains_subspace(&ker_del.intersection(&q1.exact));

    let deg_of = |v: &[Scalar]| degree_unchecked(inst, &Form::from_coordinates(&basis, v), omega, phi);
    let well_defined = q1.exact.basis().iter().all(|v| deg_of(v).is_zero());

    // Kernel of deg on ker ∂∂_J, as a subspace of Λ^{1,0}.
    let closed_basis = q1.ddj_closed.basis().to_vec();
    let values: Vec<Scalar> = closed_basis.iter().map(|v| deg_of(v)).collect();
    let functional = Matrix::from_rows(vec![values.clone()]);
    let ker_deg: Vec<Vec<Scalar>> = if closed_basis.is_empty() {
        Vec::new()
    } else {
        let coeffs = if values.iter().all(Scalar::is_zero) {
            (0..closed_basis.len()).map(|i| unit_vector(closed_basis.len(), i)).collect()
        } else {
            functional.kernel()
        };
        coeffs
            .iter()
            .map(|c| combine(&closed_basis, c))
            .collect()
    };
    let ker_deg = Subspace::span(basis.len(), &ker_deg);

    // α ∈ ker ∂∂_J whose ∂-image is ∂∂_J-exact in Λ^{2,0}.
    let del_map = LinearMap::of(inst, (1, 0), (2, 0), |f| inst.del(f))?;
    let ker_class = q2.ddj_exact.preimage(del_map.matrix()).intersection(&q1.ddj_closed);
    let kernels_agree = ker_deg.sum(&q1.exact) == ker_class.sum(&q1.exact);

    let ae = qae_h(inst, 1)?;
    let degrees = ae
        .representatives
        .iter()
        .map(|a| degree_unchecked(inst, a, omega, phi))
        .collect();
    Ok(ExactSequenceCheck {
        injective,
        kernels_agree,
        well_defined,
        degrees,
        dim_ae: ae.dimension,
        dim_del: del_h(inst, 1)?.dimension,
    })
}

fn combine(vectors: &[Vec<Scalar>], coeffs: &[Scalar]) -> Vec<Scalar> {
    let len = vectors.first().map_or(0, Vec::len);
    let mut out = vec![Scalar::zero(); len];
    for (v, c) in vectors.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(v) {
            *o += &(x * c);
        }
    }
    out
}

/// Zero-set comparison for `α ↦ ∫ ∂α ∧ ∂_J α ∧ conj(Φ)` on the subspace
/// `{α ∈ Λ^{1,0} : ∂α ∧ Ω = 0}`, in a bilinear and a conjugated variant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HodgeRiemannCheck {
    pub primitive_dim: usize,
    pub closed_dim: usize,
    /// Radical of `B(α, β) = ∫ ∂α ∧ ∂_J β ∧ conj(Φ)` equals `ker ∂ ∩ P`.
    pub bilinear_radical_is_kernel: bool,
    /// `h(α, β) = ∫ ∂α ∧ J(conj ∂β) ∧ conj(Φ)` is semidefinite on `P` with
    /// radical `ker ∂ ∩ P`, so its zero set is exactly that kernel.
    pub hermitian_zero_set_is_kernel: bool,
}

pub fn hodge_riemann_check(inst: &Instance, omega: &Form, phi: &Form) -> Result<HodgeRiemannCheck> {
    let basis = inst.basis(1, 0);
    let primitive = kernel_of(inst, (1, 0), (4, 0), |f| inst.del(f).wedge(omega))?;
    let ker_del = kernel_of(inst, (1, 0), (2, 0), |f| inst.del(f))?;
    let closed = ker_del.intersection(&primitive);
    let pb = primitive.basis().to_vec();
    let forms: Vec<Form> = forms_of(&basis, &pb);
    let phibar = inst.conj(phi);
    let m = forms.len();
    let mut bilinear = Matrix::zeros(m, m);
    let mut hermitian = Matrix::zeros(m, m);
    for (i, a) in forms.iter().enumerate() {
        let da = inst.del(a);
        for (j, b) in forms.iter().enumerate() {
            let db = inst.del(b);
            bilinear.set(i, j, inst.integrate(&da.wedge(&inst.del_j(b)).wedge(&phibar)));
            let twisted = inst.j(&inst.conj(&db));
            hermitian.set(i, j, inst.integrate(&da.wedge(&twisted).wedge(&phibar)));
        }
    }
    let radical = |g: &Matrix| -> Subspace {
        let coeffs = g.kernel();
        Subspace::span(basis.len(), &coeffs.iter().map(|c| combine(&pb, c)).collect::<Vec<_>>())
    };
    let bilinear_radical_is_kernel = m == 0 || radical(&bilinear.transpose()) == closed;
    let hermitian_zero_set_is_kernel =
        m == 0 || (radical(&hermitian.transpose()) == closed && semidefinite_up_to_phase(&hermitian));
    Ok(HodgeRiemannCheck {
        primitive_dim: primitive.dim(),
        closed_dim: closed.dim(),
        bilinear_radical_is_kernel,
        hermitian_zero_set_is_kernel,
    })
}

/// Whether `g`, rescaled by its first nonzero diagonal entry, is a
/// Hermitian matrix of fixed sign.
fn semidefinite_up_to_phase(g: &Matrix) -> bool {
    let Some(reference) = (0..g.rows()).map(|i| g.get(i, i)).find(|d| !d.is_zero()) else {
        return g.is_zero();
    };
    let normalized = g.scale(&reference.inv().expect("nonzero"));
    if normalized.conj_transpose() != normalized {
        return false;
    }
    crate::hkt::principal_minors_nonnegative(&normalized)
        || crate::hkt::principal_minors_nonnegative(&normalized.scale(&-Scalar::one()))
}
