//! Instance resolution and JSON reports.
//!
//! Rationals travel as `"p/q"` strings and complex scalars as
//! `{"re": "p/q", "im": "p/q"}`. Forms are written in the real basis with
//! 1-based generator indices. All maps are ordered, and nothing random or
//! time-dependent enters a report unless timings are requested.
//!
//! Instance files are JSON objects:
//!
//! ```text
//! {
//!   "id": "optional name",
//!   "salamon": "0,0,0,0,0,12+34,13-24,14+23",      // or
//!   "equations": "dim = 8\nd e^6 = e^1^e^2 + e^3^e^4\n...",
//!   "I": [["0", "1", ...], ...],
//!   "J": [[...], ...]
//! }
//! ```
//!
//! Row `k` of `I` and `J` lists the coefficients of `I(e^{k+1})` and
//! `J(e^{k+1})` on `e^1, …, e^{4n}`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::cohomology::{self, del_del_j};
use crate::error::{Error, Result};
use crate::exterior::{Form, LieAlgebra};
use crate::hkt::{self, CriterionRegistry, HktContext, SearchConfig};
use crate::hypercomplex::{check_integrability, HypercomplexStructure, Instance, InstanceOptions};
use crate::qdolbeault::{self, Su2Action, VMaps};
use crate::scalar::{format_rational, parse_rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    Cohomology,
    Qd,
    Hkt,
    Full,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Cohomology => "cohomology",
            Command::Qd => "qd",
            Command::Hkt => "hkt",
            Command::Full => "full",
        }
    }

    fn wants(self, section: Command) -> bool {
        self == Command::Full || self == section
    }
}

impl std::str::FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "validate" => Ok(Command::Validate),
            "cohomology" => Ok(Command::Cohomology),
            "qd" => Ok(Command::Qd),
            "hkt" => Ok(Command::Hkt),
            "full" => Ok(Command::Full),
            other => Err(Error::Unsupported(format!("unknown command {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Builtin { family: String, t: Option<BigRational> },
    File(PathBuf),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Overrides {
    pub skip_nilpotency_warning: bool,
    pub unchecked_jacobi: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceDescriptor {
    pub id: String,
    pub source: Source,
    pub overrides: Overrides,
}

impl InstanceDescriptor {
    pub fn builtin(family: &str, t: Option<BigRational>) -> Self {
        let id = match &t {
            Some(t) => format!("{family}(t={})", format_rational(t)),
            None => family.to_string(),
        };
        InstanceDescriptor {
            id,
            source: Source::Builtin {
                family: family.to_string(),
                t,
            },
            overrides: Overrides::default(),
        }
    }

    /// Parses `name` or `name(p/q)`; an explicit `t` may not be combined
    /// with the parenthesised form.
    pub fn parse_builtin(id: &str, t: Option<BigRational>) -> Result<Self> {
        let id = id.trim();
        match id.split_once('(') {
            Some((name, rest)) => {
                let inner = rest.strip_suffix(')').ok_or_else(|| Error::Parse {
                    position: id.len(),
                    message: "missing ')' in instance id".into(),
                })?;
                if t.is_some() {
                    return Err(Error::Unsupported(
                        "parameter given both in the instance id and by --t".into(),
                    ));
                }
                let inner = inner.trim().strip_prefix("t=").unwrap_or(inner.trim());
                Ok(InstanceDescriptor::builtin(name.trim(), Some(parse_rational(inner)?)))
            }
            None => Ok(InstanceDescriptor::builtin(id, t)),
        }
    }

    pub fn file(path: impl Into<PathBuf>) -> Self {
        let path = path.into();
        InstanceDescriptor {
            id: format!("file:{}", path.display()),
            source: Source::File(path),
            overrides: Overrides::default(),
        }
    }

    pub fn with_overrides(mut self, overrides: Overrides) -> Self {
        self.overrides = overrides;
        self
    }

    pub fn resolve(&self, catalog: &Catalog) -> Result<Resolved> {
        let mut echo = InstanceEcho {
            id: self.id.clone(),
            ..Default::default()
        };
        let (algebra, structure) = match &self.source {
            Source::Builtin { family, t } => {
                let fam = catalog.get(family)?;
                echo.source = "builtin".into();
                echo.family = Some(fam.name().to_string());
                echo.t = t.as_ref().map(format_rational);
                fam.build(t.as_ref())?
            }
            Source::File(path) => {
                echo.source = "file".into();
                echo.path = Some(path.display().to_string());
                let file = InstanceFile::read(path)?;
                if let Some(id) = &file.id {
                    echo.id = id.clone();
                }
                file.build()?
            }
        };
        echo.dim = algebra.dim();
        echo.n = algebra.dim() / 4;
        echo.salamon = algebra.to_salamon();
        let options = InstanceOptions {
            unchecked_jacobi: self.overrides.unchecked_jacobi,
        };
        if self.overrides.unchecked_jacobi {
            echo.warnings.push("d^2 = 0 was not checked".into());
        }
        let instance = Instance::with_options(algebra, structure, options)?;
        echo.nilpotent = instance.is_nilpotent();
        echo.cohomology_kind = if echo.nilpotent {
            "nilmanifold (invariant forms compute the cohomology)".into()
        } else {
            "invariant cohomology".into()
        };
        if !echo.nilpotent && !self.overrides.skip_nilpotency_warning {
            echo.warnings.push(
                "WARNING: the algebra is not nilpotent; results are invariant cohomology only".into(),
            );
        }
        Ok(Resolved { instance, echo })
    }
}

pub struct Resolved {
    pub instance: Instance,
    pub echo: InstanceEcho,
}

#[derive(Clone, Debug, Deserialize)]
struct InstanceFile {
    id: Option<String>,
    salamon: Option<String>,
    equations: Option<String>,
    #[serde(rename = "I")]
    i: Vec<Vec<String>>,
    #[serde(rename = "J")]
    j: Vec<Vec<String>>,
}

impl InstanceFile {
    fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            position: e.column(),
            message: format!("{}: line {}: {e}", path.display(), e.line()),
        })
    }

    fn build(&self) -> Result<(LieAlgebra, HypercomplexStructure)> {
        let algebra = match (&self.salamon, &self.equations) {
            (Some(s), None) => LieAlgebra::parse_salamon(s)?,
            (None, Some(e)) => LieAlgebra::parse_structured(e)?,
            _ => {
                return Err(Error::Unsupported(
                    "instance file needs exactly one of \"salamon\" or \"equations\"".into(),
                ))
            }
        };
        let parse = |rows: &[Vec<String>]| -> Result<Vec<Vec<Scalar>>> {
            rows.iter()
                .map(|r| r.iter().map(|c| Ok(Scalar::real(parse_rational(c)?))).collect())
                .collect()
        };
        let structure = HypercomplexStructure::from_image_rows(parse(&self.i)?, parse(&self.j)?)?;
        Ok((algebra, structure))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ScalarJson {
    pub re: String,
    pub im: String,
}

impl From<&Scalar> for ScalarJson {
    fn from(s: &Scalar) -> Self {
        ScalarJson {
            re: format_rational(s.re()),
            im: format_rational(s.im()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TermJson {
    pub indices: Vec<usize>,
    pub re: String,
    pub im: String,
}

/// A form in the real basis.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FormJson {
    pub terms: Vec<TermJson>,
}

impl FormJson {
    /// Converts a frame form of `inst` to the real basis.
    pub fn from_frame(inst: &Instance, x: &Form) -> Self {
        FormJson::from_real(&inst.from_frame(x))
    }

    pub fn from_real(x: &Form) -> Self {
        FormJson {
            terms: x
                .terms()
                .map(|(m, c)| TermJson {
                    indices: m.indices().iter().map(|i| i + 1).collect(),
                    re: format_rational(c.re()),
                    im: format_rational(c.im()),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct InstanceEcho {
    pub id: String,
    pub source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    pub dim: usize,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub salamon: Option<String>,
    pub nilpotent: bool,
    pub cohomology_kind: String,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationSection {
    pub structure_violations: Vec<String>,
    pub jacobi: bool,
    pub integrable: BTreeMap<String, bool>,
    pub d_splits_by_type: bool,
    /// Operator identities checked on every frame monomial.
    pub identities: BTreeMap<String, bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DdjSection {
    pub holds: bool,
    pub witness: Option<FormJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualitySection {
    pub dimensions_match: bool,
    pub gram_full_rank: BTreeMap<String, bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactSequenceSection {
    pub omega_source: String,
    pub omega: FormJson,
    pub injective: bool,
    pub kernels_agree: bool,
    pub well_defined: bool,
    pub degrees: Vec<ScalarJson>,
    pub degree_vanishes: bool,
    pub dim_ae: usize,
    pub dim_del: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HodgeRiemannSection {
    pub primitive_dim: usize,
    pub closed_dim: usize,
    pub bilinear_radical_is_kernel: bool,
    pub hermitian_zero_set_is_kernel: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologySection {
    pub hodge: BTreeMap<String, usize>,
    pub h01: usize,
    pub qbc: BTreeMap<String, usize>,
    pub qae: BTreeMap<String, usize>,
    pub ddj_lemma: DdjSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duality: Option<DualitySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_sequence: Option<ExactSequenceSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hodge_riemann: Option<HodgeRiemannSection>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VMapSection {
    pub injective: bool,
    pub intertwines_del: bool,
    pub intertwines_del_j: bool,
    pub reality: bool,
    pub factorizes: bool,
    pub lambda: Option<ScalarJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GauduchonSection {
    pub omega_source: String,
    pub ratio: Option<ScalarJson>,
    pub quaternionic_gauduchon: bool,
    pub gauduchon: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QdSection {
    /// Degree → weight → multiplicity.
    pub weights: BTreeMap<String, BTreeMap<String, usize>>,
    pub sl2_relations: bool,
    pub bicomplex: bool,
    pub kappa: Option<ScalarJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_maps: Option<VMapSection>,
    pub gauduchon_equivalence: Vec<GauduchonSection>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionJson {
    pub name: String,
    pub hkt: String,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HktSection {
    pub hkt: String,
    pub basis: Option<String>,
    pub witness: Option<FormJson>,
    pub h01: usize,
    pub phi: Option<FormJson>,
    pub phi_volume: Option<ScalarJson>,
    pub criteria: Vec<CriterionJson>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub engine: String,
    pub command: String,
    pub instance: InstanceEcho,
    pub validation: ValidationSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cohomology: Option<CohomologySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qd: Option<QdSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hkt: Option<HktSection>,
    /// Milliseconds per section; present only when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn h01(&self) -> Option<usize> {
        self.cohomology
            .as_ref()
            .map(|c| c.h01)
            .or(self.hkt.as_ref().map(|h| h.h01))
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub search: SearchConfig,
    /// Restrict the HKT decision to these criteria, in this order.
    pub criteria: Option<Vec<String>>,
    pub timings: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            search: SearchConfig::default(),
            criteria: None,
            timings: false,
        }
    }
}

struct Clock {
    enabled: bool,
    entries: BTreeMap<String, f64>,
}

impl Clock {
    fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if self.enabled {
            self.entries
                .insert(name.to_string(), start.elapsed().as_secs_f64() * 1e3);
        }
        out
    }
}

/// Names and outcomes of the operator identities of the bicomplex.
pub fn differential_identities(inst: &Instance) -> BTreeMap<String, bool> {
    let names = ["d^2", "del^2", "delbar^2", "del_J^2", "del del_J + del_J del"];
    let mut ok = [true; 5];
    for k in 0..=inst.dim() {
        for m in inst.basis_of_degree(k) {
            let x = Form::monomial(m, Scalar::from_int(1));
            let checks = [
                inst.d(&inst.d(&x)),
                inst.del(&inst.del(&x)),
                inst.delbar(&inst.delbar(&x)),
                inst.del_j(&inst.del_j(&x)),
                del_del_j(inst, &x).add(&inst.del_j(&inst.del(&x))),
            ];
            for (flag, v) in ok.iter_mut().zip(checks) {
                *flag &= v.is_zero();
            }
        }
    }
    names
        .iter()
        .zip(ok)
        .map(|(n, v)| (n.to_string(), v))
        .collect()
}

fn validation_section(inst: &Instance) -> Result<ValidationSection> {
    let integ = check_integrability(inst.algebra(), inst.structure())?;
    Ok(ValidationSection {
        structure_violations: inst.structure().validate(),
        jacobi: inst.algebra().check_jacobi().holds,
        integrable: [("I", integ.i), ("J", integ.j), ("K", integ.k)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
        d_splits_by_type: inst.d_splits_by_type(),
        identities: differential_identities(inst),
    })
}

/// A strictly positive quaternionic Gauduchon form: the averaged metric's
/// `Ω` when it qualifies, otherwise a lattice search (n = 2).
fn gauduchon_form(inst: &Instance, search: SearchConfig) -> Result<Option<(String, Form)>> {
    let avg = hkt::averaged_omega(inst);
    if cohomology::is_gauduchon_condition(inst, &avg) {
        return Ok(Some(("averaged metric".into(), avg)));
    }
    if inst.n() == 2 {
        if let Some(hit) = hkt::find_gauduchon_form(inst, search)?.hit {
            return Ok(Some(("lattice search".into(), hit.form)));
        }
    }
    Ok(None)
}

fn cohomology_section(inst: &Instance, phi: Option<&Form>, opts: &RunOptions, full: bool) -> Result<CohomologySection> {
    let hodge = cohomology::hodge_table(inst)?;
    let h01 = hodge.get(&(0, 1)).copied().unwrap_or(0);
    let qbc = cohomology::qbc_table(inst)?;
    let qae = cohomology::qae_table(inst)?;
    let ddj = cohomology::ddj_lemma_check(inst)?;
    let mut notes = Vec::new();
    let h = inst.half();
    let as_map = |groups: &[cohomology::CohomologyGroup]| -> BTreeMap<String, usize> {
        groups
            .iter()
            .enumerate()
            .map(|(p, g)| (p.to_string(), g.dimension))
            .collect()
    };
    let mut section = CohomologySection {
        hodge: hodge.iter().map(|((p, q), d)| (format!("{p},{q}"), *d)).collect(),
        h01,
        qbc: as_map(&qbc),
        qae: as_map(&qae),
        ddj_lemma: DdjSection {
            holds: ddj.holds,
            witness: ddj.witness.as_ref().map(|w| FormJson::from_frame(inst, w)),
        },
        duality: None,
        exact_sequence: None,
        hodge_riemann: None,
        notes: Vec::new(),
    };
    if let Some(w) = &ddj.witness {
        // The witness must lie in im ∂ ∩ ker ∂_J and outside im ∂∂_J.
        if !inst.del_j(w).is_zero() {
            return Err(Error::Consistency("ddJ-lemma witness is not del_J-closed".into()));
        }
    }
    let Some(phi) = phi else {
        notes.push("no SL(n,H) form; duality and degree checks skipped".into());
        section.notes = notes;
        return Ok(section);
    };
    let dimensions_match = (0..=h).all(|p| qbc[p].dimension == qae[h - p].dimension);
    let mut gram_full_rank = BTreeMap::new();
    for p in 0..=h {
        let g = cohomology::duality_gram(inst, p, phi)?;
        gram_full_rank.insert(p.to_string(), g.rank() == g.rows() && g.rank() == g.cols());
    }
    section.duality = Some(DualitySection {
        dimensions_match,
        gram_full_rank,
    });
    if full && !dimensions_match {
        return Err(Error::Consistency("BC/AE duality dimensions disagree".into()));
    }
    if full && inst.n() == 2 && inst.is_nilpotent() && ddj.holds != (h01 % 2 == 0) {
        return Err(Error::Consistency(format!(
            "ddJ-lemma {} but h^(0,1) = {h01}",
            if ddj.holds { "holds" } else { "fails" }
        )));
    }
    match gauduchon_form(inst, opts.search)? {
        Some((source, omega)) => {
            let seq = cohomology::degree_exact_sequence_check(inst, &omega, phi)?;
            let hr = cohomology::hodge_riemann_check(inst, &omega, phi)?;
            section.hodge_riemann = Some(HodgeRiemannSection {
                primitive_dim: hr.primitive_dim,
                closed_dim: hr.closed_dim,
                bilinear_radical_is_kernel: hr.bilinear_radical_is_kernel,
                hermitian_zero_set_is_kernel: hr.hermitian_zero_set_is_kernel,
            });
            if full && !seq.passes() {
                return Err(Error::Consistency("degree exact sequence fails".into()));
            }
            section.exact_sequence = Some(ExactSequenceSection {
                omega_source: source,
                omega: FormJson::from_frame(inst, &omega),
                injective: seq.injective,
                kernels_agree: seq.kernels_agree,
                well_defined: seq.well_defined,
                degree_vanishes: seq.degree_vanishes(),
                degrees: seq.degrees.iter().map(ScalarJson::from).collect(),
                dim_ae: seq.dim_ae,
                dim_del: seq.dim_del,
            });
        }
        None => notes.push("no quaternionic Gauduchon form found; degree map skipped".into()),
    }
    section.notes = notes;
    Ok(section)
}

fn qd_section(inst: &Instance, phi: Option<&Form>, opts: &RunOptions, full: bool) -> Result<QdSection> {
    let action = Su2Action::new(inst);
    let dim = inst.dim();
    let relations_ok = (0..=dim).all(|k| action.relation_failures(inst, k).is_empty());
    let weights = (0..=dim)
        .into_par_iter()
        .map(|k| qdolbeault::weight_decompose(inst, &action, k))
        .collect::<Result<Vec<_>>>()?;
    let bicomplex = qdolbeault::bicomplex_isomorphism_check(inst, &action)?;
    let avg = hkt::averaged_omega(inst);
    let kappa = qdolbeault::omega_i_ratio(inst, &action, &avg)?;
    let mut notes = Vec::new();
    if full {
        if !relations_ok {
            return Err(Error::Consistency("sl(2) relations fail".into()));
        }
        if !bicomplex.holds() {
            return Err(Error::Consistency(format!(
                "bicomplex correspondence fails: {}",
                bicomplex.failures.join("; ")
            )));
        }
        if kappa.as_ref() != Some(&qdolbeault::kappa()) {
            return Err(Error::Consistency("R(ω_I) is not κ·Ω".into()));
        }
    }
    for (k, table) in weights.iter().enumerate() {
        if qdolbeault::weighted_dimension(table) != inst.basis_of_degree(k).len() {
            return Err(Error::Consistency(format!("weight multiplicities miss dimensions in degree {k}")));
        }
    }
    let mut section = QdSection {
        weights: weights
            .iter()
            .enumerate()
            .map(|(k, t)| {
                (
                    k.to_string(),
                    t.iter().map(|(w, m)| (w.to_string(), *m)).collect(),
                )
            })
            .collect(),
        sl2_relations: relations_ok,
        bicomplex: bicomplex.holds(),
        kappa: kappa.as_ref().map(ScalarJson::from),
        v_maps: None,
        gauduchon_equivalence: Vec::new(),
        notes: Vec::new(),
    };
    let Some(phi) = phi else {
        notes.push("no SL(n,H) form; V-maps skipped".into());
        section.notes = notes;
        return Ok(section);
    };
    let maps = VMaps::new(inst, phi)?;
    let check = qdolbeault::v_map_check(&maps)?;
    if full && !check.passes() {
        return Err(Error::Consistency(format!(
            "V-map properties fail: {}",
            check.failures.join("; ")
        )));
    }
    section.v_maps = Some(VMapSection {
        injective: check.injective,
        intertwines_del: check.intertwines_del,
        intertwines_del_j: check.intertwines_del_j,
        reality: check.reality,
        factorizes: check.factorizes,
        lambda: check.lambda.as_ref().map(ScalarJson::from),
    });
    let mut omegas = vec![("averaged metric".to_string(), avg)];
    if inst.n() == 2 {
        if let Some(hit) = hkt::find_non_gauduchon_form(inst, opts.search)?.hit {
            omegas.push(("non-Gauduchon perturbation".into(), hit.form));
        }
    }
    for (source, omega) in omegas {
        let eq = qdolbeault::gauduchon_equivalence_check(&maps, &omega)?;
        if full && !eq.holds() {
            return Err(Error::Consistency(format!(
                "Gauduchon equivalence fails for the {source} form"
            )));
        }
        section.gauduchon_equivalence.push(GauduchonSection {
            omega_source: source,
            ratio: eq.ratio.as_ref().map(ScalarJson::from),
            quaternionic_gauduchon: eq.quaternionic_gauduchon,
            gauduchon: eq.gauduchon,
            holds: eq.holds(),
        });
    }
    section.notes = notes;
    Ok(section)
}

fn hkt_section(inst: &Instance, phi: &hkt::PhiOutcome, h01: usize, opts: &RunOptions) -> Result<HktSection> {
    let registry = match &opts.criteria {
        Some(names) => CriterionRegistry::builtin().select(names)?,
        None => CriterionRegistry::builtin(),
    };
    let ctx = HktContext {
        instance: inst,
        phi: phi.phi.clone(),
        h01,
        search: opts.search,
        allow_non_nilpotent: false,
    };
    let decision = registry.decide(&ctx)?;
    let mut notes = decision.verdict.notes.clone();
    if let Some(reason) = &phi.reason {
        notes.push(format!("no SL(n,H) form: {reason}"));
    }
    Ok(HktSection {
        hkt: decision.verdict.hkt.as_str().to_string(),
        basis: decision.verdict.basis.clone(),
        witness: decision
            .verdict
            .witness
            .as_ref()
            .map(|w| FormJson::from_frame(inst, w)),
        h01,
        phi: phi.phi.as_ref().map(|p| FormJson::from_frame(inst, p)),
        phi_volume: phi.volume.as_ref().map(ScalarJson::from),
        criteria: decision
            .per_criterion
            .iter()
            .map(|(name, v)| CriterionJson {
                name: name.clone(),
                hkt: v.hkt.as_str().to_string(),
                notes: v.notes.clone(),
            })
            .collect(),
        notes,
    })
}

pub fn run(desc: &InstanceDescriptor, command: Command, catalog: &Catalog, opts: &RunOptions) -> Result<Report> {
    let mut clock = Clock {
        enabled: opts.timings,
        entries: BTreeMap::new(),
    };
    let resolved = clock.time("resolve", || desc.resolve(catalog))?;
    let inst = &resolved.instance;
    let validation = clock.time("validate", || validation_section(inst))?;
    if command == Command::Full && validation.identities.values().any(|ok| !ok) {
        return Err(Error::Consistency("a differential identity fails".into()));
    }
    let mut report = Report {
        engine: format!("hktkit {}", env!("CARGO_PKG_VERSION")),
        command: command.as_str().to_string(),
        instance: resolved.echo.clone(),
        validation,
        cohomology: None,
        qd: None,
        hkt: None,
        timings: None,
    };
    if command == Command::Validate {
        report.timings = opts.timings.then_some(clock.entries);
        return Ok(report);
    }
    let phi = clock.time("phi", || hkt::find_phi(inst))?;
    let full = command == Command::Full;
    if command.wants(Command::Cohomology) {
        report.cohomology = Some(clock.time("cohomology", || {
            cohomology_section(inst, phi.phi.as_ref(), opts, full)
        })?);
    }
    if command.wants(Command::Qd) {
        report.qd = Some(clock.time("qd", || qd_section(inst, phi.phi.as_ref(), opts, full))?);
    }
    if command.wants(Command::Hkt) {
        let h01 = match &report.cohomology {
            Some(c) => c.h01,
            None => cohomology::dolbeault_h(inst, 0, 1)?.dimension,
        };
        report.hkt = Some(clock.time("hkt", || hkt_section(inst, &phi, h01, opts))?);
    }
    report.timings = opts.timings.then_some(clock.entries);
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErrorJson {
    pub message: String,
    pub exit_code: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepItem {
    pub t: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<Report>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SummaryRow {
    pub t: String,
    pub h01: Option<usize>,
    pub hkt: Option<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub family: String,
    pub command: String,
    pub summary: Vec<SummaryRow>,
    pub items: Vec<SweepItem>,
}

impl SweepReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("sweep serializes");
        s.push('\n');
        s
    }

    /// 0 when every item succeeded, otherwise the largest item exit code.
    pub fn exit_code(&self) -> i32 {
        self.items
            .iter()
            .filter_map(|i| i.error.as_ref().map(|e| e.exit_code))
            .max()
            .unwrap_or(0)
    }
}

/// Parses `"p1/q1,p2/q2,..."`; an empty or blank list is empty.
pub fn parse_t_list(text: &str) -> Result<Vec<BigRational>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_rational)
        .collect()
}

/// One report per parameter, computed concurrently and kept in input order.
pub fn sweep(
    family: &str,
    ts: &[BigRational],
    overrides: Overrides,
    command: Command,
    catalog: &Catalog,
    opts: &RunOptions,
) -> SweepReport {
    let items: Vec<SweepItem> = ts
        .par_iter()
        .map(|t| {
            let desc = InstanceDescriptor::builtin(family, Some(t.clone())).with_overrides(overrides);
            let t = format_rational(t);
            match run(&desc, command, catalog, opts) {
                Ok(report) => SweepItem {
                    t,
                    report: Some(report),
                    error: None,
                },
                Err(e) => SweepItem {
                    t,
                    report: None,
                    error: Some(ErrorJson {
                        message: e.to_string(),
                        exit_code: e.exit_code(),
                    }),
                },
            }
        })
        .collect();
    let summary = items
        .iter()
        .map(|item| SummaryRow {
            t: item.t.clone(),
            h01: item.report.as_ref().and_then(Report::h01),
            hkt: item
                .report
                .as_ref()
                .and_then(|r| r.hkt.as_ref().map(|h| h.hkt.clone())),
            error: item.error.as_ref().map(|e| e.message.clone()),
        })
        .collect();
    SweepReport {
        family: family.to_string(),
        command: command.as_str().to_string(),
        summary,
        items,
    }
}
