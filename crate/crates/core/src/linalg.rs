//! Dense exact linear algebra over [`Scalar`].
//!
//! Everything here is Gaussian elimination in one form or another. The
//! matrices that occur in practice are at most a few hundred rows, so the
//! dense representation is the simplest one that stays fast enough.

use std::fmt;

use num_traits::{One, Zero};

use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<Scalar>]) -> Self {
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(Scalar::is_real)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn conj(&self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(Scalar::conj).collect(),
        }
    }

    pub fn conj_transpose(&self) -> Matrix {
        self.conj().transpose()
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch in product");
        let mut out = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j) + &(a * b);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = Scalar::zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    /// Horizontal concatenation `[self | o]`.
    pub fn hstack(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.rows, o.rows);
        let mut m = Matrix::zeros(self.rows, self.cols + o.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self.get(r, c).clone());
            }
            for c in 0..o.cols {
                m.set(r, self.cols + c, o.get(r, c).clone());
            }
        }
        m
    }

    /// Vertical concatenation.
    pub fn vstack(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.cols);
        let mut data = self.data.clone();
        data.extend(o.data.iter().cloned());
        Matrix {
            rows: self.rows + o.rows,
            cols: self.cols,
            data,
        }
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m.get(row, col).inv().expect("nonzero pivot");
            for c in col..m.cols {
                let v = m.get(row, c) * &inv;
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let f = m.get(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                for c in col..m.cols {
                    let sub = &f * m.get(row, c);
                    if sub.is_zero() {
                        continue;
                    }
                    let v = m.get(r, c) - &sub;
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        self.rref().1.len()
    }

    /// Basis of the null space, one vector per free column, in canonical form.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![Scalar::zero(); self.cols];
            v[free] = Scalar::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r.get(row, free);
            }
            basis.push(v);
        }
        basis
    }

    pub fn determinant(&self) -> Scalar {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Scalar::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m.get(r, col).is_zero()) else {
                return Scalar::zero();
            };
            if p != col {
                m.swap_rows(p, col);
                det = -det;
            }
            let pivot = m.get(col, col).clone();
            det = &det * &pivot;
            let inv = pivot.inv().expect("nonzero pivot");
            for r in col + 1..n {
                let f = m.get(r, col) * &inv;
                if f.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = m.get(r, c) - &(&f * m.get(col, c));
                    m.set(r, c, v);
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let (r, pivots) = self.hstack(&Matrix::identity(n)).rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    /// Solves `self · x = b`. Returns the particular solution with free
    /// variables set to zero, or `None` when inconsistent.
    pub fn solve(&self, b: &[Scalar]) -> Option<Solution> {
        assert_eq!(b.len(), self.rows);
        let rhs = Matrix::from_columns(self.rows, &[b.to_vec()]);
        let (r, pivots) = self.hstack(&rhs).rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(row, self.cols).clone();
        }
        Some(Solution {
            unique: pivots.len() == self.cols,
            x,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub x: Vec<Scalar>,
    pub unique: bool,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// A linear subspace of `Scalar^ambient`, stored as the rows of a reduced
/// echelon basis so that equality of subspaces is equality of bases.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace::span(
            ambient,
            &(0..ambient)
                .map(|i| unit_vector(ambient, i))
                .collect::<Vec<_>>(),
        )
    }

    pub fn span(ambient: usize, vectors: &[Vec<Scalar>]) -> Self {
        if vectors.is_empty() {
            return Subspace::zero(ambient);
        }
        let (r, pivots) = Matrix::from_rows(vectors.to_vec()).rref();
        let basis = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        Subspace {
            ambient,
            basis,
            pivots,
        }
    }

    /// Column space of a matrix.
    pub fn column_space(m: &Matrix) -> Self {
        let cols: Vec<_> = (0..m.cols()).map(|c| m.column(c)).collect();
        Subspace::span(m.rows(), &cols)
    }

    /// Null space of a matrix.
    pub fn kernel_of(m: &Matrix) -> Self {
        Subspace::span(m.cols(), &m.kernel())
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.basis
    }

    /// Residue of `v` after reduction against the echelon basis.
    fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut w = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            let f = w[p].clone();
            if f.is_zero() {
                continue;
            }
            for (wi, ri) in w.iter_mut().zip(row) {
                if !ri.is_zero() {
                    *wi -= &(&f * ri);
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        assert_eq!(v.len(), self.ambient);
        self.reduce(v).iter().all(Scalar::is_zero)
    }

    pub fn contains_subspace(&self, o: &Subspace) -> bool {
        o.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, o: &Subspace) -> Subspace {
        let mut all = self.basis.clone();
        all.extend(o.basis.iter().cloned());
        Subspace::span(self.ambient, &all)
    }

    pub fn intersection(&self, o: &Subspace) -> Subspace {
        if self.dim() == 0 || o.dim() == 0 {
            return Subspace::zero(self.ambient);
        }
        let a = Matrix::from_columns(self.ambient, &self.basis);
        let b = Matrix::from_columns(self.ambient, &o.basis).scale(&-Scalar::one());
        let coeffs = a.hstack(&b).kernel();
        let vectors: Vec<_> = coeffs
            .iter()
            .map(|c| a.apply(&c[..self.dim()]))
            .collect();
        Subspace::span(self.ambient, &vectors)
    }

    /// `{x : m·x ∈ self}`.
    pub fn preimage(&self, m: &Matrix) -> Subspace {
        assert_eq!(m.rows(), self.ambient);
        if self.dim() == 0 {
            return Subspace::kernel_of(m);
        }
        let b = Matrix::from_columns(self.ambient, &self.basis).scale(&-Scalar::one());
        let vectors: Vec<_> = m
            .hstack(&b)
            .kernel()
            .into_iter()
            .map(|v| v[..m.cols()].to_vec())
            .collect();
        Subspace::span(m.cols(), &vectors)
    }

    /// Vectors from `candidates` (in order) that extend `base` to a basis of
    /// `base + span(candidates)`.
    pub fn extend_basis(base: &Subspace, candidates: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
        let mut acc = base.clone();
        let mut picked = Vec::new();
        for c in candidates {
            if !acc.contains(c) {
                acc = acc.sum(&Subspace::span(acc.ambient, &[c.clone()]));
                picked.push(c.clone());
            }
        }
        picked
    }

    /// Representatives of a basis of `self / sub` (requires `sub ⊆ self`).
    pub fn quotient_representatives(&self, sub: &Subspace) -> Vec<Vec<Scalar>> {
        Subspace::extend_basis(sub, &self.basis)
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {})", self.dim(), self.ambient)
    }
}

pub fn unit_vector(n: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); n];
    v[i] = Scalar::one();
    v
}
