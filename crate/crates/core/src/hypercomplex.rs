//! Hypercomplex structures on the dual of a Lie algebra, the Hodge
//! bigrading they induce, and the operators `∂`, `∂̄`, `∂_J`.
//!
//! Structure matrices act on 1-forms with column `k` holding the image of
//! `e^k`, so `K = I·J` is an ordinary matrix product.
//!
//! All operator work happens in an adapted complex frame: `φ^0..φ^{2n-1}`
//! span the `+i` eigenspace of `I` on complexified 1-forms (the (1,0)-forms)
//! and `φ^{a+2n} = conj(φ^a)`. A frame monomial then has bidegree
//! (number of low indices, number of high indices).

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_traits::One;

use crate::error::{Error, Result};
use crate::exterior::{monomials_of_degree, operator_matrix, Form, LieAlgebra, Monomial};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HypercomplexStructure {
    n: usize,
    i_mat: Matrix,
    j_mat: Matrix,
    k_mat: Matrix,
}

impl HypercomplexStructure {
    /// Builds from the matrices of `I` and `J` (column `k` = image of `e^k`).
    /// Only the shape is checked here; see [`HypercomplexStructure::validate`].
    pub fn new(i_mat: Matrix, j_mat: Matrix) -> Result<Self> {
        let dim = i_mat.rows();
        if dim == 0 || dim % 4 != 0 {
            return Err(Error::Dimension(dim));
        }
        for (name, m) in [("I", &i_mat), ("J", &j_mat)] {
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::InvalidStructure(vec![format!(
                    "{name} is {}x{}, expected {dim}x{dim}",
                    m.rows(),
                    m.cols()
                )]));
            }
        }
        let k_mat = i_mat.mul(&j_mat);
        Ok(HypercomplexStructure {
            n: dim / 4,
            i_mat,
            j_mat,
            k_mat,
        })
    }

    /// Builds from row lists where row `k` lists the coefficients of the
    /// image of `e^{k+1}`.
    pub fn from_image_rows(i_rows: Vec<Vec<Scalar>>, j_rows: Vec<Vec<Scalar>>) -> Result<Self> {
        for rows in [&i_rows, &j_rows] {
            let len = rows.len();
            if rows.iter().any(|r| r.len() != len) {
                return Err(Error::InvalidStructure(vec![
                    "structure matrix is not square".into(),
                ]));
            }
        }
        HypercomplexStructure::new(
            Matrix::from_rows(i_rows).transpose(),
            Matrix::from_rows(j_rows).transpose(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        4 * self.n
    }

    pub fn i_mat(&self) -> &Matrix {
        &self.i_mat
    }

    pub fn j_mat(&self) -> &Matrix {
        &self.j_mat
    }

    pub fn k_mat(&self) -> &Matrix {
        &self.k_mat
    }

    pub fn matrix(&self, which: ComplexStructure) -> &Matrix {
        match which {
            ComplexStructure::I => &self.i_mat,
            ComplexStructure::J => &self.j_mat,
            ComplexStructure::K => &self.k_mat,
        }
    }

    /// Rows listing the image of each generator, the transport layout.
    pub fn image_rows(&self, which: ComplexStructure) -> Vec<Vec<Scalar>> {
        let t = self.matrix(which).transpose();
        (0..t.rows()).map(|r| t.row(r).to_vec()).collect()
    }

    /// Quaternion relations, checked exactly. Returns the violated ones.
    pub fn validate(&self) -> Vec<String> {
        let minus_id = Matrix::identity(self.dim()).scale(&-Scalar::one());
        let mut out = Vec::new();
        if !self.i_mat.is_real() || !self.j_mat.is_real() {
            out.push("non-real entries".to_string());
        }
        if self.i_mat.mul(&self.i_mat) != minus_id {
            out.push("I squared".to_string());
        }
        if self.j_mat.mul(&self.j_mat) != minus_id {
            out.push("J squared".to_string());
        }
        if self.i_mat.mul(&self.j_mat) != self.j_mat.mul(&self.i_mat).scale(&-Scalar::one()) {
            out.push("IJ = -JI".to_string());
        }
        out
    }

    /// Action of `which` on a real-basis form, extended multiplicatively.
    pub fn extend(&self, which: ComplexStructure, x: &Form) -> Form {
        x.transform(&column_forms(self.matrix(which)))
    }

    /// `J` extended multiplicatively to all degrees.
    pub fn extend_j(&self, x: &Form) -> Form {
        self.extend(ComplexStructure::J, x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ComplexStructure {
    I,
    J,
    K,
}

impl ComplexStructure {
    pub const ALL: [ComplexStructure; 3] =
        [ComplexStructure::I, ComplexStructure::J, ComplexStructure::K];

    pub fn name(self) -> &'static str {
        match self {
            ComplexStructure::I => "I",
            ComplexStructure::J => "J",
            ComplexStructure::K => "K",
        }
    }
}

/// 1-forms given by the columns of `m`.
fn column_forms(m: &Matrix) -> Vec<Form> {
    (0..m.cols()).map(|c| Form::linear(&m.column(c))).collect()
}

/// An adapted frame for one complex structure: `P` has the frame 1-forms as
/// columns in the real basis.
#[derive(Clone, Debug)]
pub struct ComplexFrame {
    half: usize,
    p: Matrix,
    p_inv: Matrix,
    to_frame: Vec<Form>,
    from_frame: Vec<Form>,
}

impl ComplexFrame {
    /// Frame whose first half spans the `+i` eigenspace of `l`.
    pub fn new(l: &Matrix) -> Result<Self> {
        let dim = l.rows();
        let shifted = l.sub(&Matrix::identity(dim).scale(&Scalar::i()));
        let holomorphic = shifted.kernel();
        if holomorphic.len() * 2 != dim {
            return Err(Error::InvalidStructure(vec![
                "+i eigenspace has the wrong dimension".into(),
            ]));
        }
        let mut columns = holomorphic.clone();
        columns.extend(
            holomorphic
                .iter()
                .map(|v| v.iter().map(Scalar::conj).collect::<Vec<_>>()),
        );
        let p = Matrix::from_columns(dim, &columns);
        let p_inv = p.inverse().ok_or_else(|| {
            Error::InvalidStructure(vec!["eigenframe is singular".into()])
        })?;
        // e^k = Σ_a p_inv[a][k] φ^a.
        let to_frame = column_forms(&p_inv);
        let from_frame = column_forms(&p);
        Ok(ComplexFrame {
            half: dim / 2,
            p,
            p_inv,
            to_frame,
            from_frame,
        })
    }

    pub fn p(&self) -> &Matrix {
        &self.p
    }

    pub fn p_inv(&self) -> &Matrix {
        &self.p_inv
    }

    pub fn to_frame(&self, x: &Form) -> Form {
        x.transform(&self.to_frame)
    }

    pub fn from_frame(&self, x: &Form) -> Form {
        x.transform(&self.from_frame)
    }

    pub fn bidegree(&self, m: Monomial) -> (usize, usize) {
        let low = (1u64 << self.half) - 1;
        (
            (m.0 & low).count_ones() as usize,
            (m.0 >> self.half).count_ones() as usize,
        )
    }

    /// Frame images of `d φ^a`.
    fn differentials(&self, algebra: &LieAlgebra) -> Vec<Form> {
        self.from_frame
            .iter()
            .map(|phi| self.to_frame(&algebra.d(phi)))
            .collect()
    }
}

/// Whether `d` of every (1,0)-form of `l` has no (0,2) part.
pub fn is_integrable(algebra: &LieAlgebra, l: &Matrix) -> Result<bool> {
    let frame = ComplexFrame::new(l)?;
    let diffs = frame.differentials(algebra);
    Ok(diffs[..frame.half]
        .iter()
        .all(|f| f.terms().all(|(m, _)| frame.bidegree(*m) != (0, 2))))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Integrability {
    pub i: bool,
    pub j: bool,
    pub k: bool,
}

impl Integrability {
    pub fn all(&self) -> bool {
        self.i && self.j && self.k
    }
}

pub fn check_integrability(
    algebra: &LieAlgebra,
    structure: &HypercomplexStructure,
) -> Result<Integrability> {
    Ok(Integrability {
        i: is_integrable(algebra, structure.i_mat())?,
        j: is_integrable(algebra, structure.j_mat())?,
        k: is_integrable(algebra, structure.k_mat())?,
    })
}

/// Bidegree components of a form.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BigradedForm {
    pub components: BTreeMap<(usize, usize), Form>,
}

impl BigradedForm {
    pub fn total(&self) -> Form {
        let mut out = Form::zero();
        for f in self.components.values() {
            out.add_assign(f);
        }
        out
    }

    pub fn component(&self, p: usize, q: usize) -> Form {
        self.components.get(&(p, q)).cloned().unwrap_or_default()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct InstanceOptions {
    /// Skip the `d² = 0` check.
    pub unchecked_jacobi: bool,
}

/// A validated Lie algebra with an integrable hypercomplex structure,
/// together with its adapted frame and frame-level operator data.
#[derive(Debug)]
pub struct Instance {
    algebra: LieAlgebra,
    structure: HypercomplexStructure,
    frame: ComplexFrame,
    det_p: Scalar,
    d_images: Vec<Form>,
    i_images: Vec<Form>,
    j_images: Vec<Form>,
    k_images: Vec<Form>,
    nilpotent: bool,
    j_inverse_cache: Vec<OnceLock<Matrix>>,
}

impl Instance {
    pub fn new(algebra: LieAlgebra, structure: HypercomplexStructure) -> Result<Self> {
        Instance::with_options(algebra, structure, InstanceOptions::default())
    }

    pub fn with_options(
        algebra: LieAlgebra,
        structure: HypercomplexStructure,
        options: InstanceOptions,
    ) -> Result<Self> {
        if algebra.dim() != structure.dim() {
            return Err(Error::InvalidStructure(vec![format!(
                "algebra has dimension {} but the structure acts on {}",
                algebra.dim(),
                structure.dim()
            )]));
        }
        let violations = structure.validate();
        if !violations.is_empty() {
            return Err(Error::InvalidStructure(violations));
        }
        if !options.unchecked_jacobi {
            if let Some(k) = algebra.check_jacobi().first_failure {
                return Err(Error::Jacobi(k));
            }
        }
        let integrability = check_integrability(&algebra, &structure)?;
        for (ok, name) in [
            (integrability.i, "I"),
            (integrability.j, "J"),
            (integrability.k, "K"),
        ] {
            if !ok {
                return Err(Error::NotIntegrable(name.into()));
            }
        }
        let frame = ComplexFrame::new(structure.i_mat())?;
        let det_p = frame.p().determinant();
        let d_images = frame.differentials(&algebra);
        let images = |m: &Matrix| -> Vec<Form> {
            let forms = column_forms(m);
            frame
                .from_frame
                .iter()
                .map(|phi| frame.to_frame(&phi.transform(&forms)))
                .collect()
        };
        let i_images = images(structure.i_mat());
        let j_images = images(structure.j_mat());
        let k_images = images(structure.k_mat());
        let nilpotent = algebra.is_nilpotent();
        let n = structure.n();
        let slots = (2 * n + 1) * (2 * n + 1);
        Ok(Instance {
            algebra,
            structure,
            frame,
            det_p,
            d_images,
            i_images,
            j_images,
            k_images,
            nilpotent,
            j_inverse_cache: (0..slots).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn structure(&self) -> &HypercomplexStructure {
        &self.structure
    }

    pub fn frame(&self) -> &ComplexFrame {
        &self.frame
    }

    /// Quaternionic dimension.
    pub fn n(&self) -> usize {
        self.structure.n()
    }

    /// Complex dimension `2n` of `(M, I)`.
    pub fn half(&self) -> usize {
        2 * self.structure.n()
    }

    pub fn dim(&self) -> usize {
        4 * self.structure.n()
    }

    pub fn is_nilpotent(&self) -> bool {
        self.nilpotent
    }

    pub fn bidegree(&self, m: Monomial) -> (usize, usize) {
        self.frame.bidegree(m)
    }

    /// Frame monomials of bidegree `(p, q)`, lexicographic.
    pub fn basis(&self, p: usize, q: usize) -> Vec<Monomial> {
        let h = self.half();
        if p > h || q > h {
            return Vec::new();
        }
        let lows = monomials_of_degree(h, p);
        let highs = monomials_of_degree(h, q);
        let mut out: Vec<Monomial> = lows
            .iter()
            .flat_map(|a| highs.iter().map(move |b| Monomial(a.0 | (b.0 << h))))
            .collect();
        out.sort();
        out
    }

    /// Frame monomials of total degree `k`.
    pub fn basis_of_degree(&self, k: usize) -> Vec<Monomial> {
        monomials_of_degree(self.dim(), k)
    }

    /// The frame 1-form `φ^a` as a frame form.
    pub fn frame_generator(&self, a: usize) -> Form {
        Form::generator(a)
    }

    pub fn to_frame(&self, x: &Form) -> Form {
        self.frame.to_frame(x)
    }

    pub fn from_frame(&self, x: &Form) -> Form {
        self.frame.from_frame(x)
    }

    pub fn split(&self, x: &Form) -> BTreeMap<(usize, usize), Form> {
        let mut out: BTreeMap<(usize, usize), Form> = BTreeMap::new();
        for (m, c) in x.terms() {
            out.entry(self.bidegree(*m))
                .or_default()
                .add_term(*m, c.clone());
        }
        out
    }

    pub fn component(&self, x: &Form, p: usize, q: usize) -> Form {
        x.filter(|m| self.bidegree(m) == (p, q))
    }

    /// Bidegrees present in a frame form.
    pub fn bidegrees(&self, x: &Form) -> Vec<(usize, usize)> {
        self.split(x).into_keys().collect()
    }

    /// Ensures a frame form is of pure bidegree `(p, q)` (zero allowed).
    pub fn expect_bidegree(&self, x: &Form, p: usize, q: usize) -> Result<()> {
        let found = self.bidegrees(x);
        if found.iter().any(|&b| b != (p, q)) {
            return Err(Error::BidegreeMismatch {
                expected: (p, q),
                found,
            });
        }
        Ok(())
    }

    /// Hodge components of a real-basis form, returned in the real basis.
    pub fn bidegree_split(&self, x: &Form) -> BigradedForm {
        BigradedForm {
            components: self
                .split(&self.to_frame(x))
                .into_iter()
                .map(|(k, f)| (k, self.from_frame(&f)))
                .collect(),
        }
    }

    /// Chevalley–Eilenberg `d` on frame forms.
    pub fn d(&self, x: &Form) -> Form {
        x.derivation(&self.d_images)
    }

    /// The `(p+1, q)` part of `d` on each `(p, q)` component.
    pub fn del(&self, x: &Form) -> Form {
        self.shifted_part(x, 1, 0)
    }

    /// The `(p, q+1)` part of `d` on each `(p, q)` component.
    pub fn delbar(&self, x: &Form) -> Form {
        self.shifted_part(x, 0, 1)
    }

    fn shifted_part(&self, x: &Form, dp: usize, dq: usize) -> Form {
        let mut out = Form::zero();
        for ((p, q), part) in self.split(x) {
            out.add_assign(&self.component(&self.d(&part), p + dp, q + dq));
        }
        out
    }

    /// `J⁻¹ ∘ ∂̄ ∘ J`.
    pub fn del_j(&self, x: &Form) -> Form {
        self.j_inv(&self.delbar(&self.j(x)))
    }

    /// Multiplicative `J` on frame forms.
    pub fn j(&self, x: &Form) -> Form {
        x.transform(&self.j_images)
    }

    pub fn apply(&self, which: ComplexStructure, x: &Form) -> Form {
        x.transform(self.images(which))
    }

    /// Frame images of the generators under `which`.
    pub fn images(&self, which: ComplexStructure) -> &[Form] {
        match which {
            ComplexStructure::I => &self.i_images,
            ComplexStructure::J => &self.j_images,
            ComplexStructure::K => &self.k_images,
        }
    }

    /// Coefficient of `φ^l` in `J φ^m`.
    pub fn j_coefficient(&self, m: usize, l: usize) -> Scalar {
        self.j_images[m].coefficient(Monomial::generator(l))
    }

    /// Inverse of multiplicative `J`, computed per bidegree as a genuine
    /// matrix inverse.
    pub fn j_inv(&self, x: &Form) -> Form {
        let mut out = Form::zero();
        for ((p, q), part) in self.split(x) {
            // J maps (q, p) onto (p, q); invert that block.
            let inv = self.j_inverse_block(p, q);
            let coords = part
                .coordinates(&self.basis(p, q))
                .expect("component lies in its own basis");
            out.add_assign(&Form::from_coordinates(&self.basis(q, p), &inv.apply(&coords)));
        }
        out
    }

    fn j_inverse_block(&self, p: usize, q: usize) -> &Matrix {
        let slot = p * (self.half() + 1) + q;
        self.j_inverse_cache[slot].get_or_init(|| {
            let m = operator_matrix(&self.basis(q, p), &self.basis(p, q), |f| self.j(f))
                .expect("J swaps bidegrees");
            m.inverse().expect("J is invertible")
        })
    }

    /// Complex conjugation of a frame form: `φ^a ↔ φ^{a±2n}`.
    pub fn conj(&self, x: &Form) -> Form {
        let h = self.half();
        let low = (1u64 << h) - 1;
        let mut out = Form::zero();
        for (m, c) in x.terms() {
            let lo = m.0 & low;
            let hi = m.0 >> h;
            let swapped = Monomial(hi | (lo << h));
            let sign_negative = (lo.count_ones() * hi.count_ones()) % 2 == 1;
            let v = c.conj();
            out.add_term(swapped, if sign_negative { -v } else { v });
        }
        out
    }

    /// `∫` of a frame form, with `∫ e^1∧…∧e^{4n} = 1`.
    pub fn integrate(&self, x: &Form) -> Scalar {
        let top = Monomial((1u64 << self.dim()) - 1);
        &x.coefficient(top) * &self.det_p
    }

    /// Matrix of a frame operator from bidegree `src` to bidegree `dst`.
    pub fn matrix(
        &self,
        src: (usize, usize),
        dst: (usize, usize),
        op: impl Fn(&Form) -> Form,
    ) -> Result<Matrix> {
        operator_matrix(&self.basis(src.0, src.1), &self.basis(dst.0, dst.1), op)
    }

    /// Verifies that `d` has only `(p+1,q)` and `(p,q+1)` parts on every
    /// frame monomial.
    pub fn d_splits_by_type(&self) -> bool {
        (0..=self.dim()).all(|k| {
            self.basis_of_degree(k).into_iter().all(|m| {
                let (p, q) = self.bidegree(m);
                self.d(&Form::monomial(m, Scalar::one()))
                    .terms()
                    .all(|(t, _)| {
                        let b = self.bidegree(*t);
                        b == (p + 1, q) || b == (p, q + 1)
                    })
            })
        })
    }

    /// Top frame monomial of bidegree `(2n, 0)`.
    pub fn top_holomorphic(&self) -> Monomial {
        Monomial((1u64 << self.half()) - 1)
    }

    pub fn det_p(&self) -> &Scalar {
        &self.det_p
    }
}
