#![allow(dead_code)]

use hktkit_core::catalog::Catalog;
use hktkit_core::hypercomplex::Instance;
use hktkit_core::linalg::Matrix;
use hktkit_core::scalar::rational;
use hktkit_core::{Form, LieAlgebra, Scalar};
use num_traits::Zero;

pub const SWEEP: [(i64, i64); 5] = [(1, 4), (1, 3), (1, 2), (2, 3), (3, 4)];

pub fn build(family: &str, t: Option<(i64, i64)>) -> Instance {
    let catalog = Catalog::builtin();
    let t = t.map(|(p, q)| rational(p, q));
    let (algebra, structure) = catalog.get(family).unwrap().build(t.as_ref()).unwrap();
    Instance::new(algebra, structure).unwrap()
}

pub fn rxh7(p: i64, q: i64) -> Instance {
    build("rxh7", Some((p, q)))
}

pub fn torus() -> Instance {
    build("torus8", None)
}

pub fn solv4() -> Instance {
    build("solv4", None)
}

pub fn s(n: i64) -> Scalar {
    Scalar::from_int(n)
}

pub fn q(n: i64, d: i64) -> Scalar {
    Scalar::ratio(n, d)
}

pub fn i() -> Scalar {
    Scalar::i()
}

/// Real-basis 1-form `Σ c_k e^{k+1}` from `(index, coefficient)` pairs, 1-based.
pub fn one_form(dim: usize, terms: &[(usize, Scalar)]) -> Form {
    let mut coeffs = vec![Scalar::zero(); dim];
    for (k, c) in terms {
        coeffs[k - 1] = c.clone();
    }
    Form::linear(&coeffs)
}

pub fn e(k: usize) -> Form {
    Form::generator(k - 1)
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, j| acc * (n - j) / (j + 1))
}

/// Clebsch–Gordan count for `Λ^k(V_1 ⊗ C^{2n})`: the `H`-weights of the
/// 1-forms are `+1` and `-1`, each `2n` times, so the weight `w` space of
/// `Λ^k` has dimension `N(w) = C(2n,a)·C(2n,b)` with `a - b = w`,
/// `a + b = k`, and `V_w` occurs `N(w) - N(w+2)` times.
pub fn clebsch_gordan(n: usize, k: usize) -> Vec<(usize, usize)> {
    let m = 2 * n;
    let count = |w: usize| -> usize {
        if w > k || (k - w) % 2 != 0 {
            return 0;
        }
        binomial(m, (k + w) / 2) * binomial(m, (k - w) / 2)
    };
    (k % 2..=k)
        .step_by(2)
        .map(|w| (w, count(w) - count(w + 2)))
        .filter(|&(_, mult)| mult > 0)
        .collect()
}

/// Lie bracket on the dual basis: `e^k([e_a, e_b]) = -de^k(e_a, e_b)`.
fn bracket(algebra: &LieAlgebra, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
    let dim = algebra.dim();
    algebra
        .differentials()
        .iter()
        .map(|dk| {
            let mut acc = Scalar::zero();
            for (m, c) in dk.terms() {
                let idx = m.indices();
                let (a, b) = (idx[0], idx[1]);
                let val = &(&x[a] * &y[b]) - &(&x[b] * &y[a]);
                acc = &acc - &(c * &val);
            }
            acc
        })
        .take(dim)
        .collect()
}

fn sub(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Vanishing of the Nijenhuis tensor of a form-level almost complex
/// structure `l` (columns are images of `e^k`), evaluated on real basis
/// vectors with the vector action `l^T`.
pub fn nijenhuis_vanishes(algebra: &LieAlgebra, l: &Matrix) -> bool {
    let dim = algebra.dim();
    let lv = l.transpose();
    let basis: Vec<Vec<Scalar>> = (0..dim).map(|k| hktkit_core::linalg::unit_vector(dim, k)).collect();
    for a in 0..dim {
        for b in a + 1..dim {
            let x = &basis[a];
            let y = &basis[b];
            let lx = lv.apply(x);
            let ly = lv.apply(y);
            let t1 = bracket(algebra, &lx, &ly);
            let t2 = lv.apply(&bracket(algebra, &lx, y));
            let t3 = lv.apply(&bracket(algebra, x, &ly));
            let t4 = bracket(algebra, x, y);
            let n = sub(&sub(&sub(&t1, &t2), &t3), &t4);
            if n.iter().any(|c| !c.is_zero()) {
                return false;
            }
        }
    }
    true
}

/// Coordinates of `target` in the span of `columns`, if it lies there.
pub fn solve_in_span(columns: &[Vec<Scalar>], target: &[Scalar]) -> Option<Vec<Scalar>> {
    if columns.is_empty() {
        return target.iter().all(Scalar::is_zero).then(Vec::new);
    }
    let m = Matrix::from_columns(target.len(), columns);
    m.solve(target).map(|s| s.x)
}
