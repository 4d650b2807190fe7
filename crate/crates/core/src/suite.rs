//! Batteries of seeded checks and the JSON report they produce.
//!
//! Every stochastic input is derived from a master seed and the check's id,
//! and records are assembled in enumeration order, so a report depends only
//! on its configuration.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::norm::NormSpec;
use crate::operator::{LinearOperator, OperatorSpace};
use crate::orthogonality::{is_bj_orthogonal_with, Decision};
use crate::seed::{derive, MASTER_SEED};
use crate::settings::{SearchSettings, Tolerances};
use crate::witness::{diagonal_pair_check, Branch, EigenKernelCase, IdentityKernelCase, SymmetryLab, WitnessCertificate};

pub const SCHEMA_VERSION: &str = "bjortho-report/1";

/// Worst forward margin a certificate may have.
pub const FORWARD_FLOOR: f64 = -1e-7;
/// Largest allowed fraction of undecided pairs in route comparison.
pub const UNDECIDED_BAND: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteKind {
    DiagonalPair,
    LeftSymmetry,
    RightSymmetry,
    EigenKernel,
    IdentityKernel,
    Transfer,
    RouteEquivalence,
    Hilbert,
    ConstructionAudit,
}

impl SuiteKind {
    pub const ALL: [SuiteKind; 9] = [
        SuiteKind::DiagonalPair,
        SuiteKind::LeftSymmetry,
        SuiteKind::RightSymmetry,
        SuiteKind::EigenKernel,
        SuiteKind::IdentityKernel,
        SuiteKind::Transfer,
        SuiteKind::RouteEquivalence,
        SuiteKind::Hilbert,
        SuiteKind::ConstructionAudit,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Counts {
    pub left: usize,
    pub right: usize,
    pub transfer_operators: usize,
    pub transfer_trials: usize,
    pub route_pairs: usize,
    pub hilbert_matrices: usize,
    pub hilbert_pairs: usize,
}

impl Default for Counts {
    fn default() -> Self {
        Counts {
            left: 50,
            right: 25,
            transfer_operators: 10,
            transfer_trials: 100,
            route_pairs: 200,
            hilbert_matrices: 100,
            hilbert_pairs: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    /// Spaces for the symmetry and transfer suites.
    pub specs: Vec<String>,
    /// Spaces for the route comparison.
    pub route_specs: Vec<String>,
    /// Euclidean spaces for the singular-value and inner-product oracles.
    pub hilbert_specs: Vec<String>,
    /// Master seeds; every randomized suite runs once per seed.
    pub seeds: Vec<u64>,
    pub suites: Vec<SuiteKind>,
    pub counts: Counts,
    pub tolerances: Tolerances,
    pub search: SearchSettings,
    pub output: Option<String>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            specs: ["lp:1.5:2", "lp:3:2", "lp:2:3", "lp:3:3"].map(String::from).to_vec(),
            route_specs: ["lp:1.5:2", "lp:2:2", "lp:3:2", "lp:1.5:3", "lp:2:3", "lp:3:3"]
                .map(String::from)
                .to_vec(),
            hilbert_specs: ["lp:2:2", "lp:2:3"].map(String::from).to_vec(),
            seeds: vec![MASTER_SEED],
            suites: SuiteKind::ALL.to_vec(),
            counts: Counts::default(),
            tolerances: Tolerances::default(),
            search: SearchSettings::default(),
            output: None,
        }
    }
}

impl SuiteConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SuiteConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for s in self.specs.iter().chain(&self.route_specs).chain(&self.hilbert_specs) {
            s.parse::<NormSpec>()?;
        }
        for s in &self.hilbert_specs {
            if s.parse::<NormSpec>()?.p() != Some(2.0) {
                return Err(Error::InvalidSpec(format!("{s} is not Euclidean")));
            }
        }
        let c = &self.counts;
        let counts = [
            c.left,
            c.right,
            c.transfer_operators,
            c.transfer_trials,
            c.route_pairs,
            c.hilbert_matrices,
            c.hilbert_pairs,
        ];
        if counts.contains(&0) {
            return Err(Error::InvalidSpec("suite counts must be at least 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidSpec("at least one seed is required".into()));
        }
        let t = &self.tolerances;
        if [t.rel, t.grid, t.orth, t.mt, t.rank, t.certificate].iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidSpec("tolerances must be positive".into()));
        }
        let s = &self.search;
        if s.grid_2d < 8 || s.samples == 0 || s.top_k == 0 || !(s.lambda_tol > 0.0) {
            return Err(Error::InvalidSpec("search settings out of range".into()));
        }
        Ok(())
    }

    fn runs(&self, kind: SuiteKind) -> bool {
        self.suites.contains(&kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    Indeterminate,
    HypothesisFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub suite: SuiteKind,
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<String>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub detail: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

impl Record {
    fn new(suite: SuiteKind, id: String, spec: Option<&str>, status: Status, detail: Value) -> Self {
        Record { suite, id, spec: spec.map(String::from), status, error: None, detail, wall_ms: None }
    }

    fn from_error(suite: SuiteKind, id: String, spec: &str, e: &Error) -> Self {
        let status = match e {
            Error::SpecNotScSmooth(_)
            | Error::NotAntipodalMt
            | Error::TRestrictedZero
            | Error::HypothesisFailed(_)
            | Error::ZeroOperator => Status::HypothesisFailed,
            Error::MtUnresolved => Status::Indeterminate,
            _ => Status::Fail,
        };
        Record {
            suite,
            id,
            spec: Some(spec.to_string()),
            status,
            error: Some(e.tag().to_string()),
            detail: json!({ "message": e.to_string() }),
            wall_ms: None,
        }
    }

    /// The certificate stored in a symmetry record, if any.
    pub fn certificate(&self) -> Option<WitnessCertificate> {
        serde_json::from_value(self.detail.get("certificate")?.clone()).ok()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub indeterminate: usize,
    pub hypothesis_failed: usize,
}

impl Summary {
    pub fn tally(records: &[Record]) -> Self {
        let mut s = Summary::default();
        for r in records {
            match r.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::Indeterminate => s.indeterminate += 1,
                Status::HypothesisFailed => s.hypothesis_failed += 1,
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub tool_version: String,
    pub config: SuiteConfig,
    pub summary: Summary,
    pub records: Vec<Record>,
}

impl RunReport {
    pub fn records_of(&self, kind: SuiteKind) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(move |r| r.suite == kind)
    }
}

/// Operator generators shared by the suites and tests.
pub mod generate {
    use super::*;

    fn uniform(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0))
    }

    /// A nonzero operator with uniform entries; every fifth index is instead
    /// rank one with image along a coordinate axis.
    pub fn left_target(n: usize, index: usize, seed: u64) -> LinearOperator {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if index % 5 == 4 {
            let k = rng.random_range(0..n);
            let scale = rng.random_range(0.5..2.0);
            let c = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
            let mut b = DVector::zeros(n);
            b[k] = scale;
            return LinearOperator(b * c.transpose());
        }
        loop {
            let m = uniform(n, &mut rng);
            if m.amax() > 0.0 {
                return LinearOperator(m);
            }
        }
    }

    /// An operator with uniform entries.
    pub fn uniform_operator(n: usize, seed: u64) -> LinearOperator {
        LinearOperator(uniform(n, &mut ChaCha8Rng::seed_from_u64(seed)))
    }

    /// A uniform operator with condition number below 10³.
    pub fn full_rank(n: usize, seed: u64) -> LinearOperator {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let m = uniform(n, &mut rng);
            let sv = m.clone().singular_values();
            if sv.min() > 1e-3 * sv.max() {
                return LinearOperator(m);
            }
        }
    }

    /// Isometries of `spec` whose norm is attained on more than one pair.
    pub fn isometries(spec: &NormSpec) -> Vec<(String, LinearOperator)> {
        let n = spec.dim();
        let mut out = vec![("identity".to_string(), LinearOperator::identity(n))];
        let mut swap = DMatrix::zeros(n, n);
        for i in 0..n {
            swap[(i, (i + 1) % n)] = 1.0;
        }
        out.push(("cyclic-shift".to_string(), LinearOperator(swap)));
        if spec.p() == Some(2.0) && spec.weights().iter().all(|w| *w == 1.0) {
            let (s, c) = 0.6f64.sin_cos();
            let mut r = DMatrix::identity(n, n);
            r[(0, 0)] = c;
            r[(0, 1)] = -s;
            r[(1, 0)] = s;
            r[(1, 1)] = c;
            out.push(("rotation".to_string(), LinearOperator(r)));
        }
        out
    }

    /// A pair `(T, A)`. Odd indices replace `A` by `A − (g(Ax)/g(Tx))·T`
    /// for a maximizer `x` of `T` and `g` the supporting functional at `Tx`,
    /// which makes `T ⊥_B A` whenever `M_T = {±x}`.
    pub fn route_pair(space: &OperatorSpace, index: usize, seed: u64) -> (LinearOperator, LinearOperator) {
        let n = space.spec().dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = LinearOperator(uniform(n, &mut rng));
        let mut a = LinearOperator(uniform(n, &mut rng));
        if index % 2 == 1 {
            if let Ok(att) = space.attainment(&t) {
                if let Some(x) = att.maximizers.first() {
                    let tx = t.apply(x);
                    if let Ok(g) = space.spec().supporting_functional(&tx) {
                        let c = g.apply(&a.apply(x)) / g.apply(&tx);
                        a = a.plus_scaled(-c, &t);
                    }
                }
            }
        }
        (t, a)
    }
}

/// One unit of work, in report order.
#[derive(Debug, Clone)]
enum Job {
    DiagonalPair,
    Left { spec: usize, seed: u64, index: usize },
    RightRandom { spec: usize, seed: u64, index: usize },
    RightIsometry { spec: usize, name: String, op: LinearOperator },
    EigenKernel { diag: [f64; 3], expect: EigenKernelCase },
    IdentityKernel,
    Transfer { spec: usize, seed: u64, index: usize },
    Route { spec: usize, seed: u64, index: usize },
    HilbertNorms { spec: usize, seed: u64 },
    HilbertVectors { spec: usize, seed: u64 },
}

struct Context {
    cfg: SuiteConfig,
    specs: Vec<NormSpec>,
    route_specs: Vec<NormSpec>,
    hilbert_specs: Vec<NormSpec>,
    labs: Vec<SymmetryLab>,
    route_spaces: Vec<OperatorSpace>,
    kernel_lab: SymmetryLab,
}

fn lab(spec: &NormSpec, cfg: &SuiteConfig) -> SymmetryLab {
    SymmetryLab::with_settings(spec, cfg.search, cfg.tolerances)
}

fn certificate_record(kind: SuiteKind, id: String, spec: &str, res: Result<WitnessCertificate>) -> Record {
    match res {
        Ok(c) => {
            let ok = c.forward.is_orthogonal()
                && c.forward.margin >= FORWARD_FLOOR
                && c.backward.decision == Decision::NotOrthogonal
                && c.backward.margin < -c.tolerances.certificate;
            let status = if ok { Status::Pass } else { Status::Fail };
            Record::new(kind, id, Some(spec), status, json!({ "certificate": c }))
        }
        Err(e) => Record::from_error(kind, id, spec, &e),
    }
}

impl Context {
    fn new(cfg: &SuiteConfig) -> Result<Self> {
        let parse = |v: &[String]| v.iter().map(|s| s.parse()).collect::<Result<Vec<NormSpec>>>();
        let specs = parse(&cfg.specs)?;
        let route_specs = parse(&cfg.route_specs)?;
        let hilbert_specs = parse(&cfg.hilbert_specs)?;
        let labs = specs.iter().map(|s| lab(s, cfg)).collect();
        let route_spaces = route_specs
            .iter()
            .map(|s| OperatorSpace::with_settings(s, cfg.search, cfg.tolerances))
            .collect();
        let kernel_lab = lab(&NormSpec::lp(3.0, 3)?, cfg);
        Ok(Context { cfg: cfg.clone(), specs, route_specs, hilbert_specs, labs, route_spaces, kernel_lab })
    }

    fn jobs(&self) -> Vec<Job> {
        let cfg = &self.cfg;
        let c = &cfg.counts;
        let mut jobs = Vec::new();
        if cfg.runs(SuiteKind::DiagonalPair) {
            jobs.push(Job::DiagonalPair);
        }
        for &seed in &cfg.seeds {
            if cfg.runs(SuiteKind::LeftSymmetry) || cfg.runs(SuiteKind::ConstructionAudit) {
                for spec in 0..self.specs.len() {
                    jobs.extend((0..c.left).map(|index| Job::Left { spec, seed, index }));
                }
            }
            if cfg.runs(SuiteKind::RightSymmetry) {
                for spec in 0..self.specs.len() {
                    jobs.extend((0..c.right).map(|index| Job::RightRandom { spec, seed, index }));
                }
            }
            if cfg.runs(SuiteKind::Transfer) {
                for spec in 0..self.specs.len() {
                    jobs.extend((0..c.transfer_operators).map(|index| Job::Transfer { spec, seed, index }));
                }
            }
            if cfg.runs(SuiteKind::RouteEquivalence) {
                for spec in 0..self.route_specs.len() {
                    jobs.extend((0..c.route_pairs).map(|index| Job::Route { spec, seed, index }));
                }
            }
            if cfg.runs(SuiteKind::Hilbert) {
                for spec in 0..self.hilbert_specs.len() {
                    jobs.push(Job::HilbertNorms { spec, seed });
                    jobs.push(Job::HilbertVectors { spec, seed });
                }
            }
        }
        if cfg.runs(SuiteKind::RightSymmetry) {
            for (spec, s) in self.specs.iter().enumerate() {
                for (name, op) in generate::isometries(s) {
                    jobs.push(Job::RightIsometry { spec, name, op });
                }
            }
        }
        if cfg.runs(SuiteKind::EigenKernel) {
            jobs.push(Job::EigenKernel { diag: [2.0, 1.0, 0.0], expect: EigenKernelCase::RankGeNMinus1 });
            jobs.push(Job::EigenKernel { diag: [2.0, 0.0, 0.0], expect: EigenKernelCase::Witness });
        }
        if cfg.runs(SuiteKind::IdentityKernel) {
            jobs.push(Job::IdentityKernel);
        }
        jobs
    }

    fn run(&self, job: &Job) -> Record {
        let cfg = &self.cfg;
        match job {
            Job::DiagonalPair => match diagonal_pair_check() {
                Ok(r) => {
                    let status = if r.holds { Status::Pass } else { Status::Fail };
                    Record::new(SuiteKind::DiagonalPair, "diagonal-pair".into(), Some("lp:2:3"), status, json!(r))
                }
                Err(e) => Record::from_error(SuiteKind::DiagonalPair, "diagonal-pair".into(), "lp:2:3", &e),
            },
            Job::Left { spec, seed, index } => {
                let name = &cfg.specs[*spec];
                let id = format!("left/{name}/{seed}/{index}");
                let s = derive(*seed, &id);
                let t = generate::left_target(self.specs[*spec].dim(), *index, s);
                let res = self.labs[*spec].refute_left_symmetry(&t, s);
                certificate_record(SuiteKind::LeftSymmetry, id, name, res)
            }
            Job::RightRandom { spec, seed, index } => {
                let name = &cfg.specs[*spec];
                let id = format!("right/{name}/{seed}/{index}");
                let s = derive(*seed, &id);
                let t = generate::uniform_operator(self.specs[*spec].dim(), s);
                let res = self.labs[*spec].refute_right_symmetry_smooth(&t, s);
                certificate_record(SuiteKind::RightSymmetry, id, name, res)
            }
            Job::RightIsometry { spec, name: op_name, op } => {
                let name = &cfg.specs[*spec];
                let id = format!("right/{name}/{op_name}");
                let res = self.labs[*spec].refute_right_symmetry_smooth(op, derive(MASTER_SEED, &id));
                let mut r = certificate_record(SuiteKind::RightSymmetry, id, name, res);
                r.detail["target"] = json!(op);
                r
            }
            Job::EigenKernel { diag, expect } => {
                let t = LinearOperator::diag(diag);
                let id = format!("eigen-kernel/{t}");
                match self.kernel_lab.eigen_kernel_check(&t, derive(MASTER_SEED, &id)) {
                    Ok(r) => {
                        let cert_ok = r.certificate.as_ref().is_none_or(|c| {
                            c.forward.is_orthogonal() && c.backward.margin < -c.tolerances.certificate
                        });
                        let ok = r.case == *expect && cert_ok && (r.case == EigenKernelCase::Witness) == r.certificate.is_some();
                        let status = if ok { Status::Pass } else { Status::Fail };
                        Record::new(SuiteKind::EigenKernel, id, Some("lp:3:3"), status, json!(r))
                    }
                    Err(e) => Record::from_error(SuiteKind::EigenKernel, id, "lp:3:3", &e),
                }
            }
            Job::IdentityKernel => {
                let t = LinearOperator::diag(&[0.0, 1.0, 0.5]);
                let id = format!("identity-kernel/{t}");
                match self.kernel_lab.identity_kernel_check(&t, derive(MASTER_SEED, &id)) {
                    Ok(r) => {
                        let ok = r.i_perp_t.is_orthogonal()
                            && r.i_perp_t.margin >= -1e-9
                            && r.t_perp_i.decision == Decision::NotOrthogonal
                            && r.case == IdentityKernelCase::Witness
                            && r.certificate.is_some();
                        let status = if ok { Status::Pass } else { Status::Fail };
                        Record::new(SuiteKind::IdentityKernel, id, Some("lp:3:3"), status, json!(r))
                    }
                    Err(e) => Record::from_error(SuiteKind::IdentityKernel, id, "lp:3:3", &e),
                }
            }
            Job::Transfer { spec, seed, index } => {
                let name = &cfg.specs[*spec];
                let id = format!("transfer/{name}/{seed}/{index}");
                let s = derive(*seed, &id);
                let t = generate::full_rank(self.specs[*spec].dim(), s);
                match self.labs[*spec].transfer_check(&t, cfg.counts.transfer_trials, s) {
                    Ok(r) => {
                        let ok = r.all_passed() && r.worst_margin >= -cfg.tolerances.orth;
                        let status = if ok { Status::Pass } else { Status::Fail };
                        Record::new(SuiteKind::Transfer, id, Some(name), status, json!({ "target": t, "report": r }))
                    }
                    Err(e) => Record::from_error(SuiteKind::Transfer, id, name, &e),
                }
            }
            Job::Route { spec, seed, index } => {
                let name = &cfg.route_specs[*spec];
                let id = format!("route/{name}/{seed}/{index}");
                let space = &self.route_spaces[*spec];
                let (t, a) = generate::route_pair(space, *index, derive(*seed, &id));
                let direct = space.bj_orthogonal(&t, &a);
                let via = space.bj_orthogonal_via_attainment(&t, &a);
                let (status, error) = match (&direct, &via) {
                    (Ok(d), Ok(v)) if d.decision == Decision::Indeterminate || v.decision == Decision::Indeterminate => {
                        (Status::Indeterminate, None)
                    }
                    (Ok(d), Ok(v)) if d.decision == v.decision => (Status::Pass, None),
                    (Ok(_), Ok(_)) => (Status::Fail, None),
                    (Ok(_), Err(Error::MtUnresolved)) => (Status::Indeterminate, Some(Error::MtUnresolved.tag())),
                    (Err(e), _) | (_, Err(e)) => (Status::Fail, Some(e.tag())),
                };
                let mut r = Record::new(
                    SuiteKind::RouteEquivalence,
                    id,
                    Some(name),
                    status,
                    json!({
                        "t": t,
                        "a": a,
                        "direct": direct.ok(),
                        "via_attainment": via.ok(),
                    }),
                );
                r.error = error.map(String::from);
                r
            }
            Job::HilbertNorms { spec, seed } => self.hilbert_norms(*spec, *seed),
            Job::HilbertVectors { spec, seed } => self.hilbert_vectors(*spec, *seed),
        }
    }

    /// Operator norms against the top singular value.
    fn hilbert_norms(&self, spec: usize, seed: u64) -> Record {
        let name = &self.cfg.hilbert_specs[spec];
        let id = format!("hilbert-norm/{name}/{seed}");
        let ns = &self.hilbert_specs[spec];
        let space = OperatorSpace::with_settings(ns, self.cfg.search, self.cfg.tolerances);
        let mut worst = 0.0f64;
        for i in 0..self.cfg.counts.hilbert_matrices {
            let t = generate::uniform_operator(ns.dim(), derive(seed, &format!("{id}/{i}")));
            let sigma = t.0.clone().singular_values().max();
            match space.norm(&t) {
                Ok(v) => worst = worst.max((v - sigma).abs()),
                Err(e) => return Record::from_error(SuiteKind::Hilbert, id, name, &e),
            }
        }
        let status = if worst <= 1e-6 { Status::Pass } else { Status::Fail };
        let detail = json!({ "matrices": self.cfg.counts.hilbert_matrices, "max_abs_error": worst });
        Record::new(SuiteKind::Hilbert, id, Some(name), status, detail)
    }

    /// Vector verdicts against the inner product, on random pairs and on
    /// pairs projected to be orthogonal.
    fn hilbert_vectors(&self, spec: usize, seed: u64) -> Record {
        let name = &self.cfg.hilbert_specs[spec];
        let id = format!("hilbert-vector/{name}/{seed}");
        let ns = &self.hilbert_specs[spec];
        let tol = self.cfg.tolerances.orth;
        let mut rng = ChaCha8Rng::seed_from_u64(derive(seed, &id));
        let n = ns.dim();
        let (mut agree, mut orthogonal, mut undecided) = (0usize, 0usize, 0usize);
        let total = self.cfg.counts.hilbert_pairs;
        for i in 0..total {
            let x = DVector::from_fn(n, |_, _| -> f64 { StandardNormal.sample(&mut rng) });
            let mut y = DVector::from_fn(n, |_, _| -> f64 { StandardNormal.sample(&mut rng) });
            if i % 2 == 1 {
                y -= &x * (x.dot(&y) / x.dot(&x));
            }
            let expected = x.dot(&y).abs() <= tol * x.norm() * y.norm();
            match is_bj_orthogonal_with(ns, &x, &y, tol) {
                Ok(v) => {
                    if v.decision == Decision::Indeterminate {
                        undecided += 1;
                    } else if v.is_orthogonal() == expected {
                        agree += 1;
                    }
                    orthogonal += v.is_orthogonal() as usize;
                }
                Err(e) => return Record::from_error(SuiteKind::Hilbert, id, name, &e),
            }
        }
        let status = if agree == total { Status::Pass } else { Status::Fail };
        let detail = json!({ "pairs": total, "agree": agree, "orthogonal": orthogonal, "indeterminate": undecided });
        Record::new(SuiteKind::Hilbert, id, Some(name), status, detail)
    }
}

/// Construction checks on every two-point certificate, plus one record per
/// route spec for the undecided fraction.
fn derived_records(cfg: &SuiteConfig, records: &[Record]) -> Vec<Record> {
    let mut out = Vec::new();
    if cfg.runs(SuiteKind::ConstructionAudit) {
        let mut audited = 0;
        let mut violations = Vec::new();
        for r in records.iter().filter(|r| r.suite == SuiteKind::LeftSymmetry) {
            let Some(c) = r.certificate() else { continue };
            if c.trace.branch != Branch::TwoPoint {
                continue;
            }
            audited += 1;
            if let Err(why) = audit_two_point(&c) {
                violations.push(json!({ "id": r.id, "violation": why }));
            }
        }
        let status = if violations.is_empty() { Status::Pass } else { Status::Fail };
        let detail = json!({ "audited": audited, "violations": violations });
        out.push(Record::new(SuiteKind::ConstructionAudit, "two-point".into(), None, status, detail));
    }
    if cfg.runs(SuiteKind::RouteEquivalence) {
        for name in &cfg.route_specs {
            let mine: Vec<&Record> = records
                .iter()
                .filter(|r| r.suite == SuiteKind::RouteEquivalence && r.spec.as_deref() == Some(name.as_str()))
                .collect();
            let undecided = mine.iter().filter(|r| r.status == Status::Indeterminate).count();
            let disagree = mine.iter().filter(|r| r.status == Status::Fail).count();
            let frac = undecided as f64 / mine.len().max(1) as f64;
            let ok = disagree == 0 && frac <= UNDECIDED_BAND;
            let status = if ok { Status::Pass } else { Status::Fail };
            let detail = json!({ "pairs": mine.len(), "undecided": undecided, "disagree": disagree });
            out.push(Record::new(SuiteKind::RouteEquivalence, format!("route-band/{name}"), Some(name), status, detail));
        }
    }
    out
}

/// Checks the recorded constants of a two-point construction.
pub fn audit_two_point(c: &WitnessCertificate) -> std::result::Result<(), String> {
    let tr = &c.trace;
    let (Some(delta), Some(eps), Some(t0), Some(u), Some(v)) = (tr.delta, tr.epsilon, tr.t0, &tr.u, &tr.v) else {
        return Err("trace is missing construction constants".into());
    };
    let (Some(x1), Some(x2)) = (&tr.x1, &tr.x2) else {
        return Err("trace is missing x1 or x2".into());
    };
    let spec = &c.spec;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(format!("delta = {delta} outside (0, 1)"));
    }
    let recomputed = 2.0 - spec.norm((x1 + x2).as_slice());
    if (recomputed - delta).abs() > 1e-12 {
        return Err(format!("delta = {delta} but 2 - |x1 + x2| = {recomputed}"));
    }
    if !(eps > 0.0 && eps < delta / (3.0 - delta)) {
        return Err(format!("epsilon = {eps} outside (0, delta/(3 - delta))"));
    }
    if !(t0 > 0.0 && t0 < 1.0) {
        return Err(format!("t0 = {t0} outside (0, 1)"));
    }
    let gap = spec.norm((v - u).as_slice());
    if !(gap < eps) {
        return Err(format!("|v - u| = {gap} is not below epsilon = {eps}"));
    }
    Ok(())
}

/// Thread count from `BJORTHO_THREADS`, if set and positive.
pub fn thread_limit() -> Option<usize> {
    std::env::var("BJORTHO_THREADS").ok()?.trim().parse().ok().filter(|n| *n > 0)
}

/// Runs every configured suite. `timings` adds wall-clock times per record,
/// which makes the report nondeterministic.
pub fn run_suite(cfg: &SuiteConfig, timings: bool) -> Result<RunReport> {
    cfg.validate()?;
    let ctx = Context::new(cfg)?;
    let jobs = ctx.jobs();
    let work = || -> Vec<Record> {
        jobs.par_iter()
            .map(|job| {
                let start = Instant::now();
                let mut r = ctx.run(job);
                if timings {
                    r.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);
                }
                r
            })
            .collect()
    };
    let mut records = match thread_limit() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidSpec(e.to_string()))?
            .install(work),
        None => work(),
    };
    let derived = derived_records(cfg, &records);
    if !cfg.runs(SuiteKind::LeftSymmetry) {
        // Left jobs ran only to feed the construction audit.
        records.retain(|r| r.suite != SuiteKind::LeftSymmetry);
    }
    records.extend(derived);
    Ok(RunReport {
        schema: SCHEMA_VERSION.to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        summary: Summary::tally(&records),
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_and_validation() {
        let cfg = SuiteConfig::from_toml("seeds = [1, 2]\n[counts]\nleft = 3\n").unwrap();
        assert_eq!(cfg.seeds, vec![1, 2]);
        assert_eq!(cfg.counts.left, 3);
        assert_eq!(cfg.counts.right, 25);
        assert!(SuiteConfig::from_toml("specs = [\"lp:0.5:2\"]").is_err());
        assert!(SuiteConfig::from_toml("[counts]\nleft = 0").is_err());
        assert!(SuiteConfig::from_toml("bogus = 1").is_err());
        assert!(SuiteConfig::from_toml("hilbert_specs = [\"lp:3:2\"]").is_err());
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(generate::left_target(3, 1, 9), generate::left_target(3, 1, 9));
        assert_ne!(generate::left_target(3, 1, 9), generate::left_target(3, 1, 10));
        let r = generate::left_target(3, 4, 9);
        assert_eq!(r.0.clone().singular_values().iter().filter(|s| **s > 1e-12).count(), 1);
    }

    #[test]
    fn non_smooth_spec_gives_hypothesis_records() {
        let cfg = SuiteConfig {
            specs: vec!["lp:1:2".into()],
            suites: vec![SuiteKind::LeftSymmetry],
            counts: Counts { left: 2, ..Counts::default() },
            ..SuiteConfig::default()
        };
        let rep = run_suite(&cfg, false).unwrap();
        assert_eq!(rep.summary.hypothesis_failed, 2);
        assert!(rep.records.iter().all(|r| r.error.as_deref() == Some("SPEC_NOT_SC_SMOOTH")));
    }
}
