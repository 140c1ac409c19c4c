//! The exterior algebra of a finite-dimensional space with a fixed basis,
//! and the Chevalley–Eilenberg differential of a Lie algebra on it.
//!
//! Basis monomials are bitmasks: bit `k` set means the generator with
//! 0-based index `k` is present. Generators are printed 1-based (`e^1`).

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Subspace};
use crate::scalar::{format_rational, parse_rational, Scalar};

/// Largest supported number of generators.
pub const MAX_GENERATORS: usize = 64;

/// Ordered by degree, then lexicographically by index tuple.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub u64);

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                std::cmp::Ordering::Equal
            } else if self.0 >> diff.trailing_zeros() & 1 == 1 {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn generator(k: usize) -> Monomial {
        assert!(k < MAX_GENERATORS);
        Monomial(1 << k)
    }

    /// Builds a monomial from strictly increasing 0-based indices.
    pub fn from_indices(indices: &[usize]) -> Option<Monomial> {
        let mut bits = 0u64;
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return None;
            }
        }
        for &k in indices {
            if k >= MAX_GENERATORS {
                return None;
            }
            bits |= 1 << k;
        }
        Some(Monomial(bits))
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, k: usize) -> bool {
        self.0 >> k & 1 == 1
    }

    /// 0-based indices in increasing order.
    pub fn indices(self) -> Vec<usize> {
        (0..MAX_GENERATORS).filter(|&k| self.contains(k)).collect()
    }

    pub fn without(self, k: usize) -> Monomial {
        Monomial(self.0 & !(1 << k))
    }

    /// Number of generators of `self` strictly below index `k`.
    pub fn rank_below(self, k: usize) -> usize {
        (self.0 & ((1u64 << k) - 1)).count_ones() as usize
    }

    /// `self ∧ other = sign · (self | other)`, or `None` if they share a generator.
    pub fn wedge(self, other: Monomial) -> Option<(bool, Monomial)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // Each generator j of `other` must pass every generator of `self` above j.
        let mut swaps = 0u32;
        let mut b = other.0;
        while b != 0 {
            let j = b.trailing_zeros();
            swaps += (self.0 >> j).count_ones();
            b &= b - 1;
        }
        Some((swaps % 2 == 1, Monomial(self.0 | other.0)))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.indices().iter().map(|k| format!("e^{}", k + 1)).collect();
        write!(f, "{}", parts.join("∧"))
    }
}

/// All monomials of degree `k` in `dim` generators, in lexicographic order
/// of their index tuples.
pub fn monomials_of_degree(dim: usize, k: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, dim: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Monomial>) {
        if cur.len() == k {
            out.push(Monomial::from_indices(cur).expect("increasing"));
            return;
        }
        for i in start..dim {
            if dim - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, dim, k, cur, out);
            cur.pop();
        }
    }
    rec(0, dim, k, &mut current, &mut out);
    out
}

/// A (possibly inhomogeneous) element of the exterior algebra.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Form {
    terms: BTreeMap<Monomial, Scalar>,
}

impl Form {
    pub fn zero() -> Form {
        Form::default()
    }

    pub fn constant(c: Scalar) -> Form {
        Form::monomial(Monomial::ONE, c)
    }

    pub fn one() -> Form {
        Form::constant(Scalar::one())
    }

    pub fn generator(k: usize) -> Form {
        Form::monomial(Monomial::generator(k), Scalar::one())
    }

    pub fn monomial(m: Monomial, c: Scalar) -> Form {
        let mut f = Form::zero();
        f.add_term(m, c);
        f
    }

    /// Linear combination of generators.
    pub fn linear(coeffs: &[Scalar]) -> Form {
        let mut f = Form::zero();
        for (k, c) in coeffs.iter().enumerate() {
            f.add_term(Monomial::generator(k), c.clone());
        }
        f
    }

    /// Form with the given coordinates in the given basis.
    pub fn from_coordinates(basis: &[Monomial], coords: &[Scalar]) -> Form {
        assert_eq!(basis.len(), coords.len());
        let mut f = Form::zero();
        for (m, c) in basis.iter().zip(coords) {
            f.add_term(*m, c.clone());
        }
        f
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: Monomial) -> Scalar {
        self.terms.get(&m).cloned().unwrap_or_default()
    }

    /// Coordinates in `basis`; terms outside the basis are an error.
    pub fn coordinates(&self, basis: &[Monomial]) -> Result<Vec<Scalar>> {
        let mut out = vec![Scalar::zero(); basis.len()];
        let index: BTreeMap<Monomial, usize> =
            basis.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        for (m, c) in &self.terms {
            let i = index.get(m).ok_or_else(|| {
                Error::Consistency(format!("term {m} outside the expected basis"))
            })?;
            out[*i] = c.clone();
        }
        Ok(out)
    }

    /// Sorted list of degrees that occur.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(|m| m.degree()).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn homogeneous_part(&self, k: usize) -> Form {
        self.filter(|m| m.degree() == k)
    }

    pub fn filter(&self, keep: impl Fn(Monomial) -> bool) -> Form {
        Form {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(**m))
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Form {
        if s.is_zero() {
            return Form::zero();
        }
        Form {
            terms: self.terms.iter().map(|(m, c)| (*m, c * s)).collect(),
        }
    }

    /// Coefficient-wise complex conjugation.
    pub fn conj(&self) -> Form {
        Form {
            terms: self.terms.iter().map(|(m, c)| (*m, c.conj())).collect(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(Scalar::is_real)
    }

    pub fn add(&self, o: &Form) -> Form {
        let mut r = self.clone();
        r.add_assign(o);
        r
    }

    pub fn add_assign(&mut self, o: &Form) {
        for (m, c) in &o.terms {
            self.add_term(*m, c.clone());
        }
    }

    pub fn add_scaled(&mut self, o: &Form, s: &Scalar) {
        if s.is_zero() {
            return;
        }
        for (m, c) in &o.terms {
            self.add_term(*m, c * s);
        }
    }

    pub fn sub(&self, o: &Form) -> Form {
        let mut r = self.clone();
        r.add_scaled(o, &-Scalar::one());
        r
    }

    pub fn neg(&self) -> Form {
        self.scale(&-Scalar::one())
    }

    pub fn wedge(&self, o: &Form) -> Form {
        let mut r = Form::zero();
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                if let Some((negative, m)) = a.wedge(*b) {
                    let v = x * y;
                    r.add_term(m, if negative { -v } else { v });
                }
            }
        }
        r
    }

    pub fn power(&self, k: usize) -> Form {
        let mut r = Form::one();
        for _ in 0..k {
            r = r.wedge(self);
        }
        r
    }

    /// Extends a map on generators by the Leibniz rule, with the sign of
    /// moving `image(e^j)` to the front past the generators before `e^j`.
    /// This is the graded rule both for `d` (2-form images) and for
    /// degree-zero derivations (1-form images).
    pub fn derivation(&self, images: &[Form]) -> Form {
        let mut r = Form::zero();
        for (m, c) in &self.terms {
            for j in m.indices() {
                let img = &images[j];
                if img.is_zero() {
                    continue;
                }
                let rest = Form::monomial(m.without(j), Scalar::one());
                let mut piece = img.wedge(&rest);
                if m.rank_below(j) % 2 == 1 {
                    piece = piece.neg();
                }
                r.add_scaled(&piece, c);
            }
        }
        r
    }

    /// Extends a map on generators multiplicatively:
    /// `e^{i1}∧…∧e^{ik} ↦ image(e^{i1})∧…∧image(e^{ik})`.
    pub fn transform(&self, images: &[Form]) -> Form {
        let mut r = Form::zero();
        for (m, c) in &self.terms {
            let mut piece = Form::one();
            for j in m.indices() {
                piece = piece.wedge(&images[j]);
                if piece.is_zero() {
                    break;
                }
            }
            r.add_scaled(&piece, c);
        }
        r
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("({c}) {m}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Matrix of a linear operator on forms between two monomial bases.
/// Column `j` holds the coordinates of `op(src[j])`.
pub fn operator_matrix(
    src: &[Monomial],
    dst: &[Monomial],
    op: impl Fn(&Form) -> Form,
) -> Result<Matrix> {
    let mut m = Matrix::zeros(dst.len(), src.len());
    for (j, b) in src.iter().enumerate() {
        let image = op(&Form::monomial(*b, Scalar::one()));
        for (i, c) in image.coordinates(dst)?.into_iter().enumerate() {
            m.set(i, j, c);
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobiOutcome {
    pub holds: bool,
    /// 1-based index of the first generator with `d(d e^k) ≠ 0`.
    pub first_failure: Option<usize>,
}

/// A real Lie algebra given by the differentials of its dual basis.
#[derive(Clone, PartialEq, Eq)]
pub struct LieAlgebra {
    dim: usize,
    differentials: Vec<Form>,
}

impl LieAlgebra {
    /// Validates shape: dimension a positive multiple of 4, each `d e^k` a
    /// real 2-form in the right number of generators.
    pub fn new(dim: usize, differentials: Vec<Form>) -> Result<Self> {
        if dim == 0 || dim % 4 != 0 || dim > MAX_GENERATORS {
            return Err(Error::Dimension(dim));
        }
        if differentials.len() != dim {
            return Err(Error::Dimension(differentials.len()));
        }
        let mut problems = Vec::new();
        for (k, f) in differentials.iter().enumerate() {
            if f.terms().any(|(m, _)| m.degree() != 2) {
                problems.push(format!("d e^{} is not a 2-form", k + 1));
            }
            if !f.is_real() {
                problems.push(format!("d e^{} has non-real coefficients", k + 1));
            }
            if f.terms().any(|(m, _)| m.0 >> dim != 0) {
                problems.push(format!("d e^{} uses an index beyond {dim}", k + 1));
            }
        }
        if !problems.is_empty() {
            return Err(Error::InvalidStructure(problems));
        }
        Ok(LieAlgebra { dim, differentials })
    }

    pub fn abelian(dim: usize) -> Result<Self> {
        LieAlgebra::new(dim, vec![Form::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn differentials(&self) -> &[Form] {
        &self.differentials
    }

    pub fn d(&self, x: &Form) -> Form {
        x.derivation(&self.differentials)
    }

    pub fn check_jacobi(&self) -> JacobiOutcome {
        let first = (0..self.dim).find(|&k| !self.d(&self.differentials[k]).is_zero());
        JacobiOutcome {
            holds: first.is_none(),
            first_failure: first.map(|k| k + 1),
        }
    }

    /// Coefficient of the top monomial `e^1∧…∧e^{dim}`.
    pub fn integrate_top(&self, x: &Form) -> Scalar {
        x.coefficient(Monomial((1u64 << self.dim) - 1))
    }

    pub fn is_abelian(&self) -> bool {
        self.differentials.iter().all(Form::is_zero)
    }

    /// Whether the ascending filtration `V_1 = ker d ⊂ V_2 ⊂ …` with
    /// `V_{i+1} = {α ∈ Λ¹ : dα ∈ Λ²(V_i)}` exhausts Λ¹.
    pub fn is_nilpotent(&self) -> bool {
        let n = self.dim;
        let pairs = monomials_of_degree(n, 2);
        // Column k: coordinates of d e^k in Λ².
        let dmat = match operator_matrix(
            &(0..n).map(Monomial::generator).collect::<Vec<_>>(),
            &pairs,
            |f| self.d(f),
        ) {
            Ok(m) => m,
            Err(_) => return false,
        };
        let mut current = Subspace::zero(n);
        loop {
            let wedges: Vec<Vec<Scalar>> = {
                let basis = current.basis();
                let mut out = Vec::new();
                for a in 0..basis.len() {
                    for b in a + 1..basis.len() {
                        let w = Form::linear(&basis[a]).wedge(&Form::linear(&basis[b]));
                        out.push(w.coordinates(&pairs).expect("2-form"));
                    }
                }
                out
            };
            let target = Subspace::span(pairs.len(), &wedges);
            let next = target.preimage(&dmat);
            if next.dim() == n {
                return true;
            }
            if next.dim() == current.dim() {
                return false;
            }
            current = next;
        }
    }

    /// Salamon notation: comma-separated entries, entry `k` giving `d e^k`
    /// as `0` or a signed sum of two-digit index pairs, e.g.
    /// `"0,0,0,0,0,12+34,13-24,14+23"`. A pair may carry a rational
    /// coefficient followed by `*`, as in `2*12` or `1/2*34`.
    pub fn parse_salamon(text: &str) -> Result<LieAlgebra> {
        let entries: Vec<(usize, &str)> = split_with_offsets(text, ',');
        let dim = entries.len();
        if dim == 0 || dim % 4 != 0 {
            return Err(Error::Dimension(dim));
        }
        if dim > 9 {
            return Err(Error::Unsupported(format!(
                "Salamon notation uses single-digit indices; dimension {dim} needs the structured format"
            )));
        }
        let mut diffs = Vec::with_capacity(dim);
        for (offset, entry) in entries {
            diffs.push(parse_salamon_entry(entry, offset, dim)?);
        }
        LieAlgebra::new(dim, diffs)
    }

    /// Structured format, one equation per line:
    ///
    /// ```text
    /// dim = 8
    /// d e^6 = e^1^e^2 + e^3^e^4
    /// d e^7 = e^1^e^3 - e^2^e^4
    /// d e^8 = 1/2 e^1^e^4 + e^2^e^3
    /// ```
    ///
    /// `#` starts a comment; `∧` may replace `^` between factors; omitted
    /// generators are closed; a right-hand side of `0` is allowed.
    pub fn parse_structured(text: &str) -> Result<LieAlgebra> {
        let mut dim: Option<usize> = None;
        let mut equations: Vec<(usize, usize, Form)> = Vec::new();
        let mut offset = 0usize;
        for raw in text.split_inclusive('\n') {
            let line_start = offset;
            offset += raw.len();
            let line = raw.split('#').next().unwrap_or("");
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let pos = line_start + (line.len() - line.trim_start().len());
            if let Some(rest) = trimmed.strip_prefix("dim") {
                let value = rest.trim().trim_start_matches('=').trim();
                let d: usize = value.parse().map_err(|_| Error::Parse {
                    position: pos,
                    message: format!("invalid dimension {value:?}"),
                })?;
                if d == 0 || d % 4 != 0 {
                    return Err(Error::Dimension(d));
                }
                dim = Some(d);
                continue;
            }
            let d = dim.ok_or_else(|| Error::Parse {
                position: pos,
                message: "expected a `dim = N` line before the equations".into(),
            })?;
            let (lhs, rhs) = trimmed.split_once('=').ok_or_else(|| Error::Parse {
                position: pos,
                message: "expected `d e^k = ...`".into(),
            })?;
            let lhs_compact: String = lhs.chars().filter(|c| !c.is_whitespace()).collect();
            let k = lhs_compact
                .strip_prefix("de^")
                .and_then(|s| s.parse::<usize>().ok())
                .filter(|&k| k >= 1 && k <= d)
                .ok_or_else(|| Error::Parse {
                    position: pos,
                    message: format!("invalid left-hand side {:?}", lhs.trim()),
                })?;
            let rhs_pos = pos + lhs.len() + 1;
            let form = parse_structured_rhs(rhs, rhs_pos, d)?;
            equations.push((k - 1, pos, form));
        }
        let dim = dim.ok_or_else(|| Error::Parse {
            position: 0,
            message: "missing `dim = N` line".into(),
        })?;
        let mut diffs = vec![Form::zero(); dim];
        let mut seen = vec![false; dim];
        for (k, pos, form) in equations {
            if seen[k] {
                return Err(Error::Parse {
                    position: pos,
                    message: format!("d e^{} given twice", k + 1),
                });
            }
            seen[k] = true;
            diffs[k] = form;
        }
        LieAlgebra::new(dim, diffs)
    }

    /// Salamon string for this algebra, when every coefficient is ±1 and
    /// indices are single digits.
    pub fn to_salamon(&self) -> Option<String> {
        if self.dim > 9 {
            return None;
        }
        let mut entries = Vec::new();
        for f in &self.differentials {
            if f.is_zero() {
                entries.push("0".to_string());
                continue;
            }
            let mut s = String::new();
            for (m, c) in f.terms() {
                let idx = m.indices();
                let digits = format!("{}{}", idx[0] + 1, idx[1] + 1);
                let coeff = c.re();
                let sign = if coeff < &Zero::zero() { "-" } else { "+" };
                let magnitude = if coeff < &Zero::zero() { -coeff.clone() } else { coeff.clone() };
                if !s.is_empty() || sign == "-" {
                    s.push_str(sign);
                }
                if !magnitude.is_one() {
                    s.push_str(&format_rational(&magnitude));
                    s.push('*');
                }
                s.push_str(&digits);
            }
            entries.push(s);
        }
        Some(entries.join(","))
    }
}

impl fmt::Debug for LieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LieAlgebra(dim {}", self.dim)?;
        for (k, d) in self.differentials.iter().enumerate() {
            if !d.is_zero() {
                write!(f, ", de^{} = {d}", k + 1)?;
            }
        }
        write!(f, ")")
    }
}

fn split_with_offsets(text: &str, sep: char) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, c) in text.char_indices() {
        if c == sep {
            out.push((start, &text[start..i]));
            start = i + c.len_utf8();
        }
    }
    out.push((start, &text[start..]));
    out
}

/// Splits `a+b-c` into signed terms, tracking byte offsets.
fn signed_terms(text: &str, base: usize) -> Result<Vec<(usize, bool, &str)>> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if i == bytes.len() {
            break;
        }
        let mut negative = false;
        if bytes[i] == b'+' || bytes[i] == b'-' {
            negative = bytes[i] == b'-';
            i += 1;
        } else if !out.is_empty() {
            return Err(Error::Parse {
                position: base + i,
                message: "expected `+` or `-` between terms".into(),
            });
        }
        let start = i;
        while i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
            i += 1;
        }
        let term = &text[start..i];
        if term.trim().is_empty() {
            return Err(Error::Parse {
                position: base + start,
                message: "empty term".into(),
            });
        }
        out.push((base + start, negative, term));
    }
    Ok(out)
}

fn parse_coefficient(text: &str, position: usize) -> Result<Scalar> {
    parse_rational(text)
        .map(Scalar::real)
        .map_err(|_| Error::Parse {
            position,
            message: format!("invalid coefficient {:?}", text.trim()),
        })
}

fn pair_monomial(a: usize, b: usize, dim: usize, position: usize) -> Result<(bool, Monomial)> {
    if a == 0 || b == 0 || a > dim || b > dim {
        return Err(Error::Parse {
            position,
            message: format!("index out of range 1..={dim}"),
        });
    }
    if a == b {
        return Err(Error::Parse {
            position,
            message: format!("repeated index {a}"),
        });
    }
    let (lo, hi, negative) = if a < b { (a, b, false) } else { (b, a, true) };
    Ok((negative, Monomial::from_indices(&[lo - 1, hi - 1]).expect("distinct")))
}

fn parse_salamon_entry(entry: &str, offset: usize, dim: usize) -> Result<Form> {
    if entry.trim() == "0" {
        return Ok(Form::zero());
    }
    let mut form = Form::zero();
    for (pos, negative, term) in signed_terms(entry, offset)? {
        let term = term.trim();
        let (coeff, digits, digit_pos) = match term.rsplit_once('*') {
            Some((c, d)) => (parse_coefficient(c, pos)?, d.trim(), pos + c.len() + 1),
            None => (Scalar::one(), term, pos),
        };
        let chars: Vec<char> = digits.chars().collect();
        if chars.len() != 2 || !chars.iter().all(|c| c.is_ascii_digit()) {
            return Err(Error::Parse {
                position: digit_pos,
                message: format!("expected a two-digit index pair, found {digits:?}"),
            });
        }
        let a = chars[0].to_digit(10).expect("digit") as usize;
        let b = chars[1].to_digit(10).expect("digit") as usize;
        let (flip, m) = pair_monomial(a, b, dim, digit_pos)?;
        let c = if negative != flip { -coeff } else { coeff };
        form.add_term(m, c);
    }
    Ok(form)
}

fn parse_structured_rhs(rhs: &str, base: usize, dim: usize) -> Result<Form> {
    if rhs.trim() == "0" {
        return Ok(Form::zero());
    }
    let mut form = Form::zero();
    for (pos, negative, term) in signed_terms(rhs, base)? {
        let normalized = term.replace('∧', "^");
        let Some(first) = normalized.find("e^") else {
            return Err(Error::Parse {
                position: pos,
                message: format!("expected `e^i ^ e^j`, found {:?}", term.trim()),
            });
        };
        let coeff_text = normalized[..first].trim().trim_end_matches('*').trim();
        let coeff = if coeff_text.is_empty() {
            Scalar::one()
        } else {
            parse_coefficient(coeff_text, pos)?
        };
        let factors: Vec<&str> = normalized[first..]
            .split("e^")
            .map(|s| s.trim().trim_end_matches('^').trim())
            .filter(|s| !s.is_empty())
            .collect();
        if factors.len() != 2 {
            return Err(Error::Parse {
                position: pos,
                message: format!("expected exactly two factors in {:?}", term.trim()),
            });
        }
        let idx: Vec<usize> = factors
            .iter()
            .map(|s| {
                s.parse::<usize>().map_err(|_| Error::Parse {
                    position: pos,
                    message: format!("invalid index {s:?}"),
                })
            })
            .collect::<Result<_>>()?;
        let (flip, m) = pair_monomial(idx[0], idx[1], dim, pos)?;
        let c = if negative != flip { -coeff } else { coeff };
        form.add_term(m, c);
    }
    Ok(form)
}
