//! Built-in instance families, looked up by name.
//!
//! The R×h₇ family uses the structure equations
//! `de^6 = e^12 + e^34, de^7 = e^13 - e^24, de^8 = e^14 + e^23` and, with
//! `c = (t-1)/t`,
//!
//! ```text
//! I: e1 -> c e2,   e2 -> -(1/c) e1,  e3 -> e4,  e4 -> -e3,
//!    e5 -> (1/t) e6, e6 -> -t e5,    e7 -> e8,  e8 -> -e7
//! J: e1 -> c e3,   e3 -> -(1/c) e1,  e2 -> -e4, e4 -> e2,
//!    e5 -> (1/t) e7, e7 -> -t e5,    e6 -> -e8, e8 -> e6
//! ```
//!
//! The published table for this family lists the `e5..e8` assignments of
//! `I` on the line belonging to `J`; the matrices above read that line as
//! `I` throughout. This reading is accepted only because the quaternion
//! relations and integrability of `I`, `J`, `K` then check out exactly;
//! `Instance::new` would reject it otherwise.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exterior::LieAlgebra;
use crate::hypercomplex::HypercomplexStructure;
use crate::linalg::Matrix;
use crate::scalar::{format_rational, Scalar};

/// A parametrised or fixed source of (algebra, structure) pairs.
pub trait InstanceFamily: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn takes_parameter(&self) -> bool;
    fn build(&self, t: Option<&BigRational>) -> Result<(LieAlgebra, HypercomplexStructure)>;
}

/// Sets `m(e^a) = v·e^b` and `m(e^b) = -(1/v)·e^a` (0-based), which makes
/// `m² = -1` on that plane.
pub fn set_pair(m: &mut Matrix, a: usize, b: usize, v: Scalar) {
    let inv = v.inv().expect("nonzero pair coefficient");
    m.set(b, a, v);
    m.set(a, b, -inv);
}

/// The standard structure on `R^{4n}`: `I` pairs `e^{4m+1}→e^{4m+2}`,
/// `e^{4m+3}→e^{4m+4}`; `J` pairs `e^{4m+1}→e^{4m+3}`, `e^{4m+2}→-e^{4m+4}`.
pub fn standard_structure(n: usize) -> HypercomplexStructure {
    let dim = 4 * n;
    let mut i = Matrix::zeros(dim, dim);
    let mut j = Matrix::zeros(dim, dim);
    for block in 0..n {
        let o = 4 * block;
        set_pair(&mut i, o, o + 1, Scalar::one());
        set_pair(&mut i, o + 2, o + 3, Scalar::one());
        set_pair(&mut j, o, o + 2, Scalar::one());
        set_pair(&mut j, o + 1, o + 3, -Scalar::one());
    }
    HypercomplexStructure::new(i, j).expect("square matrices")
}

fn no_parameter(name: &str, t: Option<&BigRational>) -> Result<()> {
    match t {
        Some(_) => Err(Error::Unsupported(format!("{name} takes no parameter"))),
        None => Ok(()),
    }
}

pub struct Torus8;

impl InstanceFamily for Torus8 {
    fn name(&self) -> &'static str {
        "torus8"
    }
    fn description(&self) -> &'static str {
        "flat 8-torus with the standard hypercomplex structure"
    }
    fn takes_parameter(&self) -> bool {
        false
    }
    fn build(&self, t: Option<&BigRational>) -> Result<(LieAlgebra, HypercomplexStructure)> {
        no_parameter(self.name(), t)?;
        Ok((LieAlgebra::abelian(8)?, standard_structure(2)))
    }
}

pub const RXH7_SALAMON: &str = "0,0,0,0,0,12+34,13-24,14+23";

pub struct Rxh7;

impl Rxh7 {
    pub fn structure(t: &BigRational) -> Result<HypercomplexStructure> {
        if t.is_zero() || t.is_one() {
            return Err(Error::SingularParameter(format!(
                "t = {} is excluded (t must avoid 0 and 1)",
                format_rational(t)
            )));
        }
        let t_s = Scalar::real(t.clone());
        let c = Scalar::real((t - BigRational::one()) / t);
        let inv_t = t_s.inv().expect("t nonzero");
        let mut i = Matrix::zeros(8, 8);
        let mut j = Matrix::zeros(8, 8);
        set_pair(&mut i, 0, 1, c.clone());
        set_pair(&mut i, 2, 3, Scalar::one());
        set_pair(&mut i, 4, 5, inv_t.clone());
        set_pair(&mut i, 6, 7, Scalar::one());
        set_pair(&mut j, 0, 2, c);
        set_pair(&mut j, 1, 3, -Scalar::one());
        set_pair(&mut j, 4, 6, inv_t);
        set_pair(&mut j, 5, 7, -Scalar::one());
        HypercomplexStructure::new(i, j)
    }
}

impl InstanceFamily for Rxh7 {
    fn name(&self) -> &'static str {
        "rxh7"
    }
    fn description(&self) -> &'static str {
        "R times the quaternionic Heisenberg algebra with the structures I_t, J_t"
    }
    fn takes_parameter(&self) -> bool {
        true
    }
    fn build(&self, t: Option<&BigRational>) -> Result<(LieAlgebra, HypercomplexStructure)> {
        let t = t.ok_or_else(|| Error::Unsupported("rxh7 needs a parameter t".into()))?;
        let structure = Rxh7::structure(t)?;
        Ok((LieAlgebra::parse_salamon(RXH7_SALAMON)?, structure))
    }
}

/// A solvable, non-nilpotent 4-dimensional algebra (`de^k = e^1∧e^k` for
/// `k ≥ 2`) with the standard structure. It is not unimodular, and its
/// `(2,0)` generator is not `∂̄`-closed.
pub struct Solv4;

impl InstanceFamily for Solv4 {
    fn name(&self) -> &'static str {
        "solv4"
    }
    fn description(&self) -> &'static str {
        "non-unimodular solvable 4-dimensional algebra with the standard structure"
    }
    fn takes_parameter(&self) -> bool {
        false
    }
    fn build(&self, t: Option<&BigRational>) -> Result<(LieAlgebra, HypercomplexStructure)> {
        no_parameter(self.name(), t)?;
        Ok((LieAlgebra::parse_salamon("0,12,13,14")?, standard_structure(1)))
    }
}

pub struct Catalog {
    families: Vec<Box<dyn InstanceFamily>>,
}

impl Default for Catalog {
    fn default() -> Self {
        Catalog::builtin()
    }
}

impl Catalog {
    pub fn empty() -> Self {
        Catalog {
            families: Vec::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut c = Catalog::empty();
        c.register(Box::new(Torus8));
        c.register(Box::new(Rxh7));
        c.register(Box::new(Solv4));
        c
    }

    pub fn register(&mut self, family: Box<dyn InstanceFamily>) {
        self.families.retain(|f| f.name() != family.name());
        self.families.push(family);
    }

    pub fn get(&self, name: &str) -> Result<&dyn InstanceFamily> {
        self.families
            .iter()
            .find(|f| f.name() == name)
            .map(|f| f.as_ref())
            .ok_or_else(|| Error::UnknownInstance(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.families.iter().map(|f| f.name()).collect()
    }
}
