//! Batch jobs: a TOML configuration names a space, a body or half-space
//! family, query points and an operation; running it yields CSV rows and a
//! plain-text summary.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::{self, ConvexBody, HalfSpace};
use crate::halfspace::{HalfSpaceProjection, SearchBudget};
use crate::intersect::{self, IterationConfig, MAX_FAMILY};
use crate::oracle::{self, CounterexampleConfig, SampledSet, SweepConfig};
use crate::point::Point;
use crate::sampling::{self, SphereSequence};
use crate::spaces::{DualFunctional, Exponent, NormSpec};

pub const REPORT_HEADER: &str = "coapprox-report v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Operation {
    Gauge,
    Decompose,
    Project,
    Verify,
    Counterexample,
    Sweep,
}

impl Operation {
    pub fn name(self) -> &'static str {
        match self {
            Operation::Gauge => "gauge",
            Operation::Decompose => "decompose",
            Operation::Project => "project",
            Operation::Verify => "verify",
            Operation::Counterexample => "counterexample",
            Operation::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpaceConfig {
    /// `"1"`, `"2"`, `"inf"` or any number `p ≥ 1`.
    pub norm: Exponent,
    pub dimension: usize,
}

impl Default for SpaceConfig {
    fn default() -> Self {
        SpaceConfig { norm: Exponent::Infinity, dimension: 2 }
    }
}

impl SpaceConfig {
    pub fn build(&self) -> Result<NormSpec> {
        if self.dimension == 0 {
            return Err(Error::Config("space.dimension must be positive".into()));
        }
        NormSpec::with_exponent(self.norm, self.dimension)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BodyConfig {
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// Ball of the configured space.
    Ball { center: Vec<f64>, radius: f64 },
    Vertices { vertices: Vec<Vec<f64>> },
    /// `{x : f_i(x) ≤ d_i}`; functionals are normalized in the configured space.
    Halfspaces { functionals: Vec<Vec<f64>>, levels: Vec<f64> },
}

impl Default for BodyConfig {
    fn default() -> Self {
        BodyConfig::Box { lower: vec![-1.0, -1.0], upper: vec![1.0, 1.0] }
    }
}

impl BodyConfig {
    pub fn build(&self, space: &NormSpec) -> Result<ConvexBody> {
        match self {
            BodyConfig::Box { lower, upper } => ConvexBody::axis_box(lower, upper, space),
            BodyConfig::Ball { center, radius } => {
                ConvexBody::norm_ball(space.clone(), Point::new(center.clone())?, *radius)
            }
            BodyConfig::Vertices { vertices } => {
                ConvexBody::from_vertices(vertices.iter().map(|v| Point::new(v.clone())).collect::<Result<_>>()?)
            }
            BodyConfig::Halfspaces { functionals, levels } => {
                ConvexBody::from_halfspaces(family_halfspaces(space, functionals, levels, "body")?)
            }
        }
    }
}

/// Default weights `2^-k`, renormalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NamedWeights {
    #[serde(rename = "2^-k renormalized")]
    PowersOfTwo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightSpec {
    Named(NamedWeights),
    List(Vec<f64>),
}

impl Default for WeightSpec {
    fn default() -> Self {
        WeightSpec::Named(NamedWeights::PowersOfTwo)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilyConfig {
    pub functionals: Vec<Vec<f64>>,
    pub levels: Vec<f64>,
    pub weights: WeightSpec,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        FamilyConfig {
            functionals: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            levels: vec![0.0, 0.0],
            weights: WeightSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QueryConfig {
    pub points: Vec<Vec<f64>>,
}

impl Default for QueryConfig {
    fn default() -> Self {
        QueryConfig { points: vec![vec![1.0, 1.0]] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub gauge: f64,
    pub iteration: f64,
    pub max_iter: usize,
    /// `λ` in the relaxed iteration.
    pub relaxation: f64,
    pub membership: f64,
    /// Kernel projections must have sampled norm at most `1 + certify`.
    pub certify: f64,
    /// Sweeps pass when the maximum ratio is at most `1 + sweep`.
    pub sweep: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            gauge: gauge::DEFAULT_GAUGE_TOL,
            iteration: 1e-10,
            max_iter: 10_000,
            relaxation: 0.5,
            membership: intersect::MEMBERSHIP_TOL,
            certify: crate::halfspace::CERTIFY_TOL,
            sweep: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Directions {
    /// `N` equally spaced angles starting at 0 (plane only).
    Equiangular,
    /// `±e_1, ±e_2, …`
    Axes,
    /// Low-discrepancy points on the sphere.
    Sphere,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecomposeConfig {
    pub n: usize,
    pub directions: Directions,
    pub hausdorff_samples: usize,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        DecomposeConfig { n: 4, directions: Directions::Equiangular, hausdorff_samples: 20_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMap {
    /// The retraction of `ℓ_∞²` onto `{|y| ≤ |x|}`.
    Nonconvex,
    /// Each half-space projection of the family, separately.
    Halfspace,
    /// The averaged map of the family.
    Averaged,
    /// The limit of the relaxed iteration, i.e. the projection onto the
    /// intersection.
    Intersection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub map: SweepMap,
    pub pairs: usize,
    pub scale: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection { map: SweepMap::Halfspace, pairs: 100_000, scale: 5.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JobConfig {
    pub operation: Operation,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub space: SpaceConfig,
    pub body: BodyConfig,
    pub family: FamilyConfig,
    pub query: QueryConfig,
    pub tolerances: Tolerances,
    pub search: SearchBudget,
    pub decompose: DecomposeConfig,
    pub counterexample: CounterexampleConfig,
    pub sweep: SweepSection,
}

impl Default for JobConfig {
    fn default() -> Self {
        JobConfig {
            operation: Operation::Decompose,
            seed: 7,
            out: None,
            space: SpaceConfig::default(),
            body: BodyConfig::default(),
            family: FamilyConfig::default(),
            query: QueryConfig::default(),
            tolerances: Tolerances::default(),
            search: SearchBudget::default(),
            decompose: DecomposeConfig::default(),
            counterexample: CounterexampleConfig::default(),
            sweep: SweepSection::default(),
        }
    }
}

/// Command-line values that take precedence over the configuration file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub operation: Option<Operation>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    /// Decomposition size, sweep pairs or counterexample queries.
    pub n: Option<usize>,
    /// Gauge tolerance, iteration tolerance or sweep tolerance.
    pub tol: Option<f64>,
}

impl JobConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(op) = o.operation {
            self.operation = op;
        }
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(out) = &o.out {
            self.out = Some(out.clone());
        }
        if let Some(n) = o.n {
            match self.operation {
                Operation::Decompose => self.decompose.n = n,
                Operation::Sweep => self.sweep.pairs = n,
                Operation::Verify | Operation::Counterexample => self.counterexample.queries = n,
                Operation::Gauge | Operation::Project => {}
            }
        }
        if let Some(tol) = o.tol {
            match self.operation {
                Operation::Gauge | Operation::Decompose => self.tolerances.gauge = tol,
                Operation::Project => self.tolerances.iteration = tol,
                Operation::Sweep => self.tolerances.sweep = tol,
                Operation::Verify | Operation::Counterexample => {}
            }
        }
    }

    /// Checks everything the configured operation will use.
    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        for (name, v) in [
            ("gauge", t.gauge),
            ("iteration", t.iteration),
            ("membership", t.membership),
            ("certify", t.certify),
            ("sweep", t.sweep),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("tolerances.{name} must be positive, got {v}")));
            }
        }
        self.iteration().validate().map_err(|e| Error::Config(format!("tolerances: {e}")))?;
        let space = self.space.build()?;
        match self.operation {
            Operation::Gauge => {
                self.body.build(&space)?;
                self.queries(&space)?;
            }
            Operation::Decompose => {
                self.body.build(&space)?;
                if self.decompose.n == 0 {
                    return Err(Error::Config("decompose.n must be positive".into()));
                }
                if self.decompose.directions == Directions::Equiangular && space.dim() != 2 {
                    return Err(Error::Config("decompose.directions = \"equiangular\" needs dimension 2".into()));
                }
            }
            Operation::Project => {
                self.halfspaces(&space)?;
                self.weights()?;
                self.queries(&space)?;
            }
            Operation::Verify => {
                self.functionals(&space)?;
                self.queries(&space)?;
                self.check_grid()?;
            }
            Operation::Counterexample => self.check_grid()?,
            Operation::Sweep => {
                if !(self.sweep.scale > 0.0) || self.sweep.pairs == 0 {
                    return Err(Error::Config("sweep needs pairs > 0 and scale > 0".into()));
                }
                match self.sweep.map {
                    SweepMap::Nonconvex => {
                        if space.exponent() != Some(Exponent::Infinity) || space.dim() != 2 {
                            return Err(Error::Config("sweep.map = \"nonconvex\" needs space ℓ_∞ of dimension 2".into()));
                        }
                    }
                    _ => {
                        self.halfspaces(&space)?;
                        self.weights()?;
                    }
                }
            }
        }
        Ok(())
    }

    fn check_grid(&self) -> Result<()> {
        let c = &self.counterexample;
        for (name, v) in [
            ("h", c.h),
            ("radius", c.radius),
            ("screen_h", c.screen_h),
            ("control_h", c.control_h),
            ("control_radius", c.control_radius),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("counterexample.{name} must be positive, got {v}")));
            }
        }
        if c.queries == 0 {
            return Err(Error::Config("counterexample.queries must be positive".into()));
        }
        Ok(())
    }

    fn iteration(&self) -> IterationConfig {
        IterationConfig {
            max_iter: self.tolerances.max_iter,
            tol: self.tolerances.iteration,
            relaxation: self.tolerances.relaxation,
        }
    }

    fn queries(&self, space: &NormSpec) -> Result<Vec<Point>> {
        self.query
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                if p.len() != space.dim() {
                    return Err(Error::Config(format!(
                        "query.points[{i}] has length {}, expected {}",
                        p.len(),
                        space.dim()
                    )));
                }
                Point::new(p.clone()).map_err(|e| Error::Config(format!("query.points[{i}]: {e}")))
            })
            .collect()
    }

    fn functionals(&self, space: &NormSpec) -> Result<Vec<DualFunctional>> {
        if self.family.functionals.is_empty() {
            return Err(Error::Config("family.functionals is empty".into()));
        }
        if self.family.functionals.len() > MAX_FAMILY {
            return Err(Error::Config(format!("family has more than {MAX_FAMILY} functionals")));
        }
        self.family
            .functionals
            .iter()
            .enumerate()
            .map(|(i, f)| {
                if f.len() != space.dim() {
                    return Err(Error::Config(format!(
                        "family.functionals[{i}] has length {}, expected {}",
                        f.len(),
                        space.dim()
                    )));
                }
                let g = DualFunctional::new(f.clone()).map_err(|e| Error::Config(format!("family.functionals[{i}]: {e}")))?;
                if g.is_zero() {
                    return Err(Error::Config(format!("family.functionals[{i}] is zero and cannot be normalized")));
                }
                Ok(g)
            })
            .collect()
    }

    fn halfspaces(&self, space: &NormSpec) -> Result<Vec<HalfSpace>> {
        self.functionals(space)?;
        family_halfspaces(space, &self.family.functionals, &self.family.levels, "family")
    }

    fn weights(&self) -> Result<Option<Vec<f64>>> {
        match &self.family.weights {
            WeightSpec::Named(NamedWeights::PowersOfTwo) => Ok(None),
            WeightSpec::List(w) if w.len() != self.family.functionals.len() => Err(Error::Config(format!(
                "family.weights has {} entries for {} functionals",
                w.len(),
                self.family.functionals.len()
            ))),
            WeightSpec::List(w) => Ok(Some(w.clone())),
        }
    }
}

fn family_halfspaces(space: &NormSpec, functionals: &[Vec<f64>], levels: &[f64], section: &str) -> Result<Vec<HalfSpace>> {
    if functionals.len() != levels.len() {
        return Err(Error::Config(format!(
            "{section}: {} functionals but {} levels",
            functionals.len(),
            levels.len()
        )));
    }
    functionals
        .iter()
        .zip(levels)
        .enumerate()
        .map(|(i, (f, &d))| {
            if f.len() != space.dim() {
                return Err(Error::Config(format!(
                    "{section}.functionals[{i}] has length {}, expected {}",
                    f.len(),
                    space.dim()
                )));
            }
            let g = DualFunctional::new(f.clone())?;
            HalfSpace::normalized(&g, d, space).map_err(|e| Error::Config(format!("{section}.functionals[{i}]: {e}")))
        })
        .collect()
}

/// Annotated default configuration. Parsing it gives `JobConfig::default()`.
pub fn schema_dump() -> String {
    let mut out = String::new();
    out.push_str(
        "\
# coapprox job configuration (TOML). Every key is optional; defaults are shown below.
#
# operation        gauge | decompose | project | verify | counterexample | sweep
# seed             unsigned integer; fixes every random choice
# out              CSV report path (omit to write the report to standard output)
#
# [space]          norm = \"1\" | \"2\" | \"inf\" | any number p >= 1 (quoted or bare); dimension = n
# [body]           kind = \"box\"        lower = [..], upper = [..]
#                  kind = \"ball\"       center = [..], radius = r   (ball of the configured norm)
#                  kind = \"vertices\"   vertices = [[..], ..]        (origin must be interior)
#                  kind = \"halfspaces\" functionals = [[..], ..], levels = [..]
# [family]         half-spaces {f_k <= d_k}: functionals = [[..], ..], levels = [..]
#                  weights = \"2^-k renormalized\" | [a_1, .., a_K] (positive, summing to 1); K <= 64
# [query]          points = [[..], ..]
# [tolerances]     gauge, iteration, max_iter, relaxation (lambda in (0, 1]), membership,
#                  certify (kernel projections need norm <= 1 + certify), sweep (ratio <= 1 + sweep)
# [search]         norm-one projection search: restarts, search_samples, certify_samples,
#                  max_evaluations, seed
# [decompose]      n, directions = \"equiangular\" | \"axes\" | \"sphere\", hausdorff_samples
# [counterexample] grid step h and truncation radius on the subspace cut out by the family;
#                  queries, screen_h, certify_attempts, control_h, control_radius, control_queries
# [sweep]          map = \"nonconvex\" | \"halfspace\" | \"averaged\" | \"intersection\", pairs, scale
#
# Command-line flags override: --seed, --out, --n (decompose.n, sweep.pairs or
# counterexample.queries), --tol (tolerances.gauge, .iteration or .sweep).

",
    );
    out.push_str(&JobConfig::default().to_toml_string());
    out
}

/// One CSV line: `x, d, margin, h, R, seed`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub x: Vec<f64>,
    pub d: Vec<f64>,
    pub margin: f64,
    pub h: f64,
    pub radius: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobOutput {
    pub rows: Vec<ReportRow>,
    pub summary: String,
    /// 0 on success, 3 when a certification check failed.
    pub exit_code: i32,
}

/// Exit status for an error: 2 invalid input, 3 certification failure, 4
/// iteration limit.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::MaxIterExceeded { .. } => 4,
        Error::NotFound { .. }
        | Error::SearchExhausted { .. }
        | Error::InvalidProjection(_)
        | Error::SelectionInvalid { .. }
        | Error::NoSmoothPoints { .. } => 3,
        _ => 2,
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

/// Writes the versioned header line followed by the CSV table.
pub fn write_report<W: Write>(rows: &[ReportRow], mut w: W) -> Result<()> {
    let io = |e: std::io::Error| Error::Config(format!("writing report: {e}"));
    writeln!(w, "{REPORT_HEADER}").map_err(io)?;
    let mut csv = csv::Writer::from_writer(w);
    let cs = |e: csv::Error| Error::Config(format!("writing report: {e}"));
    csv.write_record(["x", "d", "margin", "h", "R", "seed"]).map_err(cs)?;
    for r in rows {
        csv.write_record([
            join(&r.x),
            join(&r.d),
            r.margin.to_string(),
            r.h.to_string(),
            r.radius.to_string(),
            r.seed.to_string(),
        ])
        .map_err(cs)?;
    }
    csv.flush().map_err(io)?;
    Ok(())
}

/// Runs a validated configuration.
pub fn run(cfg: &JobConfig) -> Result<JobOutput> {
    cfg.validate()?;
    let space = cfg.space.build()?;
    let mut summary = String::new();
    let _ = writeln!(summary, "operation: {}", cfg.operation.name());
    if cfg.operation == Operation::Counterexample {
        let _ = writeln!(summary, "space: l_inf of dimension 4");
    } else {
        let _ = writeln!(summary, "space: l_{} of dimension {}", cfg.space.norm, cfg.space.dimension);
    }
    let mut out = match cfg.operation {
        Operation::Gauge => run_gauge(cfg, &space, &mut summary)?,
        Operation::Decompose => run_decompose(cfg, &space, &mut summary)?,
        Operation::Project => run_project(cfg, &space, &mut summary)?,
        Operation::Verify => run_verify(cfg, &space, &mut summary)?,
        Operation::Counterexample => run_counterexample(cfg, &mut summary)?,
        Operation::Sweep => run_sweep(cfg, &space, &mut summary)?,
    };
    out.summary = summary;
    Ok(out)
}

fn ok(rows: Vec<ReportRow>) -> JobOutput {
    JobOutput { rows, summary: String::new(), exit_code: 0 }
}

fn run_gauge(cfg: &JobConfig, space: &NormSpec, s: &mut String) -> Result<JobOutput> {
    let body = cfg.body.build(space)?;
    let (_, outer) = body.origin_radii()?;
    let tol = cfg.tolerances.gauge;
    let mut rows = Vec::new();
    for x in cfg.queries(space)? {
        let g = body.gauge(&x, tol)?;
        let b = if g > 0.0 { x.scaled(1.0 / g) } else { x.clone() };
        let _ = writeln!(s, "gauge({}) = {g}", join(&x));
        rows.push(ReportRow { x: x.into_vec(), d: b.into_vec(), margin: g, h: tol, radius: outer, seed: cfg.seed });
    }
    Ok(ok(rows))
}

fn run_decompose(cfg: &JobConfig, space: &NormSpec, s: &mut String) -> Result<JobOutput> {
    let body = cfg.body.build(space)?;
    let n = cfg.decompose.n;
    let dim = space.dim();
    let dirs: Vec<Point> = match cfg.decompose.directions {
        Directions::Equiangular => sampling::equiangular(n),
        Directions::Axes => (0..dim).flat_map(|i| [Point::basis(dim, i), -&Point::basis(dim, i)]).collect(),
        Directions::Sphere => SphereSequence::new(dim).take(n).collect(),
    };
    let hs = gauge::decompose(&body, space, n, dirs, cfg.seed)?;
    let _ = writeln!(s, "half-spaces: {}", hs.len());
    let (_, outer) = body.origin_radii()?;
    let hausdorff = match ConvexBody::from_halfspaces(hs.clone()) {
        Ok(p) => gauge::hausdorff_estimate(&body, &p, space, cfg.decompose.hausdorff_samples)?,
        Err(Error::Unbounded) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    let _ = writeln!(s, "hausdorff estimate: {hausdorff}");
    let rows = hs
        .iter()
        .map(|h| ReportRow {
            x: h.functional().coeffs().to_vec(),
            d: vec![h.level()],
            margin: hausdorff,
            h: cfg.tolerances.gauge,
            radius: outer,
            seed: cfg.seed,
        })
        .collect();
    Ok(ok(rows))
}

fn certified_family(cfg: &JobConfig, space: &NormSpec, s: &mut String) -> Result<Vec<HalfSpaceProjection>> {
    let budget = SearchBudget { seed: cfg.search.seed ^ cfg.seed, ..cfg.search };
    let mut out = Vec::new();
    for (i, h) in cfg.halfspaces(space)?.into_iter().enumerate() {
        let q = HalfSpaceProjection::certify(h, &budget)?;
        if q.kernel_norm() > 1.0 + cfg.tolerances.certify {
            return Err(Error::InvalidProjection(format!(
                "half-space {i}: kernel projection norm {} exceeds 1 + {}",
                q.kernel_norm(),
                cfg.tolerances.certify
            )));
        }
        let _ = writeln!(s, "half-space {i}: y = [{}], kernel projection norm {}", join(q.direction()), q.kernel_norm());
        out.push(q);
    }
    Ok(out)
}

fn run_project(cfg: &JobConfig, space: &NormSpec, s: &mut String) -> Result<JobOutput> {
    let qs = certified_family(cfg, space, s)?;
    let ys: Vec<Point> = qs.iter().map(|q| q.direction().clone()).collect();
    let hull = intersect::zero_in_hull(&ys)?;
    let _ = writeln!(s, "0 in conv{{y_k}}: {hull}");
    let map = intersect::averaged_map(qs, cfg.weights()?)?;
    let it = cfg.iteration();
    let mut rows = Vec::new();
    let mut exit = 0;
    for x in cfg.queries(space)? {
        let fp = intersect::fixed_point(&map, &x, &it)?;
        let v = map.max_violation(&fp.point);
        let _ = writeln!(
            s,
            "[{}] -> [{}] in {} iterations, residual {:e}, max violation {:e}",
            join(&x),
            join(&fp.point),
            fp.iterations,
            fp.residual,
            v
        );
        if v > cfg.tolerances.membership {
            let _ = writeln!(s, "  fixed point lies outside the intersection");
            exit = 3;
        }
        rows.push(ReportRow { x: x.into_vec(), d: fp.point.into_vec(), margin: v, h: it.tol, radius: fp.residual, seed: cfg.seed });
    }
    Ok(JobOutput { rows, summary: String::new(), exit_code: exit })
}

fn run_verify(cfg: &JobConfig, space: &NormSpec, s: &mut String) -> Result<JobOutput> {
    let fs = cfg.functionals(space)?;
    let cx = CounterexampleConfig { seed: cfg.seed, ..cfg.counterexample.clone() };
    let queries = cfg.queries(space)?;
    if queries.is_empty() {
        let rep = oracle::search_counterexample(space, &fs, None, None, &cx)?;
        let _ = writeln!(s, "witness x = [{}]", join(&rep.witness));
        let _ = writeln!(s, "certified margin {} (grid margin {}, slack {})", rep.margin, rep.grid_margin, rep.slack);
        let _ = writeln!(s, "grid: h = {}, R = {}, {} samples", rep.h, rep.radius, rep.samples);
        return Ok(ok(vec![ReportRow {
            x: rep.witness.into_vec(),
            d: rep.candidate.into_vec(),
            margin: rep.margin,
            h: rep.h,
            radius: rep.radius,
            seed: cfg.seed,
        }]));
    }
    let grid = SampledSet::grid_on_subspace(space, &fs, cx.h, cx.radius)?;
    let slack = grid.slack(space).expect("grid");
    let _ = writeln!(s, "grid: h = {}, R = {}, {} samples, slack {slack}", cx.h, cx.radius, grid.len());
    let mut rows = Vec::new();
    for x in queries {
        let rep = oracle::find_coapprox(space, &grid, &x, slack)?;
        let delta = (rep.margin - slack).min(cx.radius - slack - space.norm(&x)?);
        let verdict = if delta > 0.0 {
            "no best coapproximation (certified)"
        } else if rep.passed() {
            "coapproximation within slack"
        } else {
            "undecided at this resolution"
        };
        let _ = writeln!(s, "[{}]: grid margin {}, certified margin {delta}: {verdict}", join(&x), rep.margin);
        rows.push(ReportRow { x: x.into_vec(), d: rep.candidate.into_vec(), margin: delta, h: cx.h, radius: cx.radius, seed: cfg.seed });
    }
    Ok(ok(rows))
}

fn run_counterexample(cfg: &JobConfig, s: &mut String) -> Result<JobOutput> {
    let cx = CounterexampleConfig { seed: cfg.seed, ..cfg.counterexample.clone() };
    let rep = oracle::verify_counterexample_linf4(&cx)?;
    let _ = writeln!(s, "witness x = [{}]", join(&rep.witness));
    let _ = writeln!(s, "certified margin {} (grid margin {}, slack {})", rep.margin, rep.grid_margin, rep.slack);
    let _ = writeln!(s, "grid: h = {}, R = {}, {} samples", rep.h, rep.radius, rep.samples);
    let mut exit = 0;
    if let Some(c) = &rep.control {
        let _ = writeln!(
            s,
            "control ker f1: h = {}, R = {}, max margin {} over {} queries (tol {}): {}",
            c.h,
            c.radius,
            c.max_margin,
            c.queries,
            c.tol,
            if c.passed() { "ok" } else { "FAILED" }
        );
        if !c.passed() {
            exit = 3;
        }
    }
    Ok(JobOutput {
        rows: vec![ReportRow {
            x: rep.witness.into_vec(),
            d: rep.candidate.into_vec(),
            margin: rep.margin,
            h: rep.h,
            radius: rep.radius,
            seed: cfg.seed,
        }],
        summary: String::new(),
        exit_code: exit,
    })
}

fn run_sweep(cfg: &JobConfig, space: &NormSpec, s: &mut String) -> Result<JobOutput> {
    let sc = SweepConfig { pairs: cfg.sweep.pairs, scale: cfg.sweep.scale, seed: cfg.seed };
    let mut reports = Vec::new();
    match cfg.sweep.map {
        SweepMap::Nonconvex => {
            reports.push(oracle::nonexpansiveness_sweep(|x| oracle::nonconvex_projection_linf2([x[0], x[1]]), space, &sc));
        }
        SweepMap::Halfspace => {
            for q in certified_family(cfg, space, s)? {
                reports.push(oracle::nonexpansiveness_sweep(|x| q.apply(x), space, &sc));
            }
        }
        SweepMap::Averaged => {
            let map = intersect::averaged_map(certified_family(cfg, space, s)?, cfg.weights()?)?;
            reports.push(oracle::nonexpansiveness_sweep(|x| map.apply(x), space, &sc));
        }
        SweepMap::Intersection => {
            let map = intersect::averaged_map(certified_family(cfg, space, s)?, cfg.weights()?)?;
            let it = cfg.iteration();
            let failure: Mutex<Option<Error>> = Mutex::new(None);
            let rep = oracle::nonexpansiveness_sweep(
                |x| match intersect::fixed_point(&map, x, &it) {
                    Ok(fp) => fp.point,
                    Err(e) => {
                        failure.lock().expect("lock").get_or_insert(e);
                        Point::from(x.to_vec())
                    }
                },
                space,
                &sc,
            );
            if let Some(e) = failure.into_inner().expect("lock") {
                return Err(e);
            }
            reports.push(rep);
        }
    }
    let mut rows = Vec::new();
    let mut exit = 0;
    for (i, r) in reports.iter().enumerate() {
        let _ = writeln!(s, "map {i}: max ratio {} over {} pairs", r.max_ratio, r.pairs);
        if r.max_ratio > 1.0 + cfg.tolerances.sweep {
            let _ = writeln!(s, "  expansion beyond 1 + {}", cfg.tolerances.sweep);
            exit = 3;
        }
        let (x, z) = r
            .worst_pair
            .clone()
            .unwrap_or_else(|| (Point::zeros(space.dim()), Point::zeros(space.dim())));
        rows.push(ReportRow { x: x.into_vec(), d: z.into_vec(), margin: r.max_ratio, h: cfg.tolerances.sweep, radius: sc.scale, seed: cfg.seed });
    }
    Ok(JobOutput { rows, summary: String::new(), exit_code: exit })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_round_trips_to_default() {
        let dump = schema_dump();
        assert!(dump.contains("2^-k renormalized"));
        assert!(dump.contains("\"inf\""));
        assert_eq!(JobConfig::from_toml_str(&dump).unwrap(), JobConfig::default());
    }

    #[test]
    fn malformed_config_names_the_field() {
        let e = JobConfig::from_toml_str("operation = \"gauge\"\n[space]\nnorm = \"inf\"\ndimenson = 3\n").unwrap_err();
        assert_eq!(exit_code(&e), 2);
        let msg = e.to_string();
        assert!(msg.contains("dimenson"), "{msg}");
        assert!(msg.contains("line 4"), "{msg}");

        let e = JobConfig::from_toml_str("[space]\nnorm = 0.5\n").unwrap_err();
        assert!(e.to_string().contains("0.5"));
    }

    #[test]
    fn exponent_spellings() {
        for (text, want) in [("\"inf\"", Exponent::Infinity), ("\"1\"", Exponent::Finite(1.0)), ("2", Exponent::Finite(2.0)), ("1.5", Exponent::Finite(1.5))] {
            let cfg = JobConfig::from_toml_str(&format!("[space]\nnorm = {text}\n")).unwrap();
            assert_eq!(cfg.space.norm, want);
        }
    }

    #[test]
    fn box_decomposition_job() {
        let cfg = JobConfig { decompose: DecomposeConfig { hausdorff_samples: 2000, ..Default::default() }, ..Default::default() };
        let out = run(&cfg).unwrap();
        assert_eq!(out.rows.len(), 4);
        assert!(out.rows.iter().all(|r| r.margin <= 1e-6));
        assert_eq!(out.exit_code, 0);
    }

    #[test]
    fn csv_layout_is_stable() {
        let rows = vec![ReportRow { x: vec![1.0, -0.5], d: vec![0.25], margin: 0.1, h: 0.05, radius: 10.0, seed: 3 }];
        let mut buf = Vec::new();
        write_report(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "coapprox-report v1\nx,d,margin,h,R,seed\n1 -0.5,0.25,0.1,0.05,10,3\n");
    }

    #[test]
    fn validation_errors_exit_two() {
        let mut cfg = JobConfig { operation: Operation::Project, ..Default::default() };
        cfg.family.levels = vec![0.0];
        let e = run(&cfg).unwrap_err();
        assert_eq!(exit_code(&e), 2);
        cfg.family.levels = vec![0.0, 0.0];
        cfg.family.functionals[1] = vec![0.0, 0.0];
        assert_eq!(exit_code(&run(&cfg).unwrap_err()), 2);
        cfg.family.functionals[1] = vec![0.0, 1.0];
        cfg.family.weights = WeightSpec::List(vec![0.5]);
        assert_eq!(exit_code(&run(&cfg).unwrap_err()), 2);
    }

    #[test]
    fn project_job_on_quadrant() {
        let cfg = JobConfig { operation: Operation::Project, ..Default::default() };
        let out = run(&cfg).unwrap();
        assert_eq!(out.exit_code, 0);
        assert!(out.rows[0].d.iter().all(|c| *c <= 1e-6));
    }

    #[test]
    fn max_iter_exits_four() {
        let mut cfg = JobConfig { operation: Operation::Project, ..Default::default() };
        cfg.tolerances.max_iter = 2;
        assert_eq!(exit_code(&run(&cfg).unwrap_err()), 4);
    }

    #[test]
    fn non_one_complemented_family_exits_three() {
        let mut cfg = JobConfig { operation: Operation::Project, ..Default::default() };
        cfg.space.dimension = 3;
        cfg.family.functionals = vec![vec![1.0, 1.0, 1.0]];
        cfg.family.levels = vec![0.0];
        cfg.query.points = vec![vec![1.0, 1.0, 1.0]];
        assert_eq!(exit_code(&run(&cfg).unwrap_err()), 3);
    }
}
