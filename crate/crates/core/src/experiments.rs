//! Seeded Monte-Carlo harness for exact-recovery curves.
//!
//! Every trial draws a fresh `m × n` Gaussian matrix and a fresh `s`-sparse
//! signal from a seed derived from `(master_seed, algorithm tag, s, index)`,
//! so any trial can be rerun on its own and results do not depend on how
//! trials are scheduled. A trial succeeds when the solver's final support
//! equals the true support.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, DenseVector, IndexSet};
use crate::problem::ProblemInstance;
use crate::solvers::{run_solver, Algorithm, SolverConfig, StopReason};

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Stream of the trial generator used for the measurement matrix.
const MATRIX_STREAM: u64 = 0;
/// Stream used for the signal.
const SIGNAL_STREAM: u64 = 1;

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `m × n` matrix with i.i.d. `N(0, 1/m)` entries, filled row by row.
pub fn gen_gaussian_matrix(m: usize, n: usize, seed: u64) -> Result<DenseMatrix> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!("matrix must be nonempty, got {m}x{n}")));
    }
    let mut rng = stream_rng(seed, MATRIX_STREAM);
    let scale = 1.0 / (m as f64).sqrt();
    let data: Vec<f64> = (0..m * n)
        .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
        .collect();
    DenseMatrix::from_row_major(m, n, data)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalKind {
    /// Nonzeros drawn uniformly from `{−1, +1}`.
    Cars,
    /// Nonzeros drawn from `N(0, 1)`.
    Gaussian,
}

impl fmt::Display for SignalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignalKind::Cars => "cars",
            SignalKind::Gaussian => "gaussian",
        })
    }
}

impl FromStr for SignalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cars" => Ok(SignalKind::Cars),
            "gaussian" => Ok(SignalKind::Gaussian),
            other => Err(Error::InvalidArgument(format!("unknown signal kind {other:?}"))),
        }
    }
}

/// Uniformly random support of size `s` with nonzeros of the given kind.
pub fn gen_sparse_signal(n: usize, s: usize, kind: SignalKind, seed: u64) -> Result<(DenseVector, IndexSet)> {
    if s == 0 || s > n {
        return Err(Error::InvalidArgument(format!("sparsity must lie in 1..={n}, got {s}")));
    }
    let mut rng = stream_rng(seed, SIGNAL_STREAM);
    let support = IndexSet::new(rand::seq::index::sample(&mut rng, n, s).into_vec(), n)?;
    let mut x = vec![0.0; n];
    for i in support.iter() {
        x[i] = match kind {
            SignalKind::Cars => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            SignalKind::Gaussian => loop {
                let v: f64 = rng.sample(StandardNormal);
                if v != 0.0 {
                    break v;
                }
            },
        };
    }
    Ok((DenseVector::from(x), support))
}

/// A solver template plus the tag that names it in reports and seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSpec {
    pub tag: String,
    /// Template; `s` is overwritten per trial.
    pub config: SolverConfig,
}

impl AlgorithmSpec {
    /// Tags step-size algorithms as `name:mu`, the rest by name.
    pub fn new(config: SolverConfig) -> Self {
        let tag = if config.algorithm.uses_mu() {
            format!("{}:{}", config.algorithm, config.mu)
        } else {
            config.algorithm.to_string()
        };
        Self { tag, config }
    }

    /// Parses `iht:1`, `iad:0.333333`, `niht`, … . A bare `iht` or `iad`
    /// takes the default step size.
    pub fn parse(text: &str, gamma: f64) -> Result<Self> {
        let (name, mu) = match text.split_once(':') {
            Some((name, mu)) => {
                let mu: f64 = mu
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad step size in {text:?}")))?;
                (name, Some(mu))
            }
            None => (text, None),
        };
        let algorithm: Algorithm = name.trim().parse()?;
        let mut config = SolverConfig::new(algorithm, 1).with_gamma(gamma);
        match mu {
            Some(mu) if algorithm.uses_mu() => config = config.with_mu(mu),
            Some(_) => {
                return Err(Error::InvalidArgument(format!(
                    "{algorithm} chooses its own step size, got {text:?}"
                )))
            }
            None => {}
        }
        Ok(Self::new(config))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub m: usize,
    pub n: usize,
    pub s_min: usize,
    pub s_max: usize,
    pub signal_kind: SignalKind,
    pub trials_per_s: usize,
    pub algorithms: Vec<AlgorithmSpec>,
    pub master_seed: u64,
    /// Stop an algorithm's sweep after the first `s` whose rate falls below
    /// this value. Points past it are not run.
    #[serde(default)]
    pub stop_below_rate: Option<f64>,
}

impl ExperimentSpec {
    pub fn new(m: usize, n: usize, s_min: usize, s_max: usize, signal_kind: SignalKind) -> Self {
        Self {
            m,
            n,
            s_min,
            s_max,
            signal_kind,
            trials_per_s: 100,
            algorithms: Vec::new(),
            master_seed: 0,
            stop_below_rate: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidArgument("m and n must be positive".into()));
        }
        if self.s_min == 0 || self.s_min > self.s_max || self.s_max > self.n {
            return Err(Error::InvalidArgument(format!(
                "sparsity range {}..={} must lie in 1..={}",
                self.s_min, self.s_max, self.n
            )));
        }
        if self.trials_per_s == 0 {
            return Err(Error::InvalidArgument("trials per sparsity must be positive".into()));
        }
        if let Some(r) = self.stop_below_rate {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::InvalidArgument(format!("stop rate must lie in [0, 1], got {r}")));
            }
        }
        for alg in &self.algorithms {
            alg.config.clone_with_s(self.s_min).validate(self.n)?;
        }
        Ok(())
    }
}

impl SolverConfig {
    fn clone_with_s(&self, s: usize) -> SolverConfig {
        SolverConfig { s, ..self.clone() }
    }
}

/// Stable seed of one trial: the first 8 bytes of
/// `SHA-256(master_seed ‖ len(tag) ‖ tag ‖ s ‖ index)`, little-endian.
pub fn trial_seed(master_seed: u64, tag: &str, s: usize, index: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(master_seed.to_le_bytes());
    h.update((tag.len() as u64).to_le_bytes());
    h.update(tag.as_bytes());
    h.update((s as u64).to_le_bytes());
    h.update((index as u64).to_le_bytes());
    let digest = h.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub algorithm: String,
    pub s: usize,
    pub index: usize,
    pub seed: u64,
    pub success: bool,
    pub iterations_used: usize,
    pub stop_reason: StopReason,
}

/// Runs one noiseless trial: `A` and `x` come from `seed`, `b = A x`.
pub fn run_trial(
    m: usize,
    n: usize,
    kind: SignalKind,
    alg: &AlgorithmSpec,
    s: usize,
    index: usize,
    seed: u64,
) -> Result<TrialReport> {
    let a = gen_gaussian_matrix(m, n, seed)?;
    let (x, support) = gen_sparse_signal(n, s, kind, seed)?;
    let problem = ProblemInstance::noiseless(a, x)?;
    let result = run_solver(&problem, &alg.config.clone_with_s(s))?;
    Ok(TrialReport {
        algorithm: alg.tag.clone(),
        s,
        index,
        seed,
        success: result.support_final == support,
        iterations_used: result.iterations_used,
        stop_reason: result.stop_reason,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub s: usize,
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
    /// Trials ended by a degenerate step, a singular system or divergence.
    #[serde(default)]
    pub solver_failures: usize,
}

impl CurvePoint {
    fn from_reports(s: usize, reports: &[TrialReport]) -> Self {
        let trials = reports.len();
        let successes = reports.iter().filter(|r| r.success).count();
        Self {
            s,
            trials,
            successes,
            rate: successes as f64 / trials as f64,
            solver_failures: reports.iter().filter(|r| r.stop_reason.is_failure()).count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub algorithm: String,
    pub points: Vec<CurvePoint>,
    pub critical_sparsity: Option<usize>,
}

impl Curve {
    /// Sorts the points by `s` and fills in the critical sparsity.
    pub fn new(algorithm: String, mut points: Vec<CurvePoint>) -> Self {
        points.sort_by_key(|p| p.s);
        let mut curve = Self {
            algorithm,
            points,
            critical_sparsity: None,
        };
        curve.critical_sparsity = critical_sparsity(&curve);
        curve
    }
}

/// Largest `s` such that every point up to it has rate at least `threshold`.
pub fn critical_sparsity_at(curve: &Curve, threshold: f64) -> Option<usize> {
    curve
        .points
        .iter()
        .take_while(|p| p.rate >= threshold)
        .last()
        .map(|p| p.s)
}

/// Largest `s` such that every point up to it has rate 1.
pub fn critical_sparsity(curve: &Curve) -> Option<usize> {
    critical_sparsity_at(curve, 1.0)
}

/// Called once per finished `(algorithm, s)` with the trials run and the
/// trials planned for that point.
pub type Progress<'a> = dyn Fn(&str, usize, usize, usize) + Sync + 'a;

fn sweep(spec: &ExperimentSpec, alg: &AlgorithmSpec, progress: &Progress<'_>) -> Result<Curve> {
    let mut points = Vec::new();
    for s in spec.s_min..=spec.s_max {
        let reports = (0..spec.trials_per_s)
            .into_par_iter()
            .map(|i| {
                let seed = trial_seed(spec.master_seed, &alg.tag, s, i);
                run_trial(spec.m, spec.n, spec.signal_kind, alg, s, i, seed)
            })
            .collect::<Result<Vec<_>>>()?;
        let point = CurvePoint::from_reports(s, &reports);
        progress(&alg.tag, s, reports.len(), spec.trials_per_s);
        let rate = point.rate;
        points.push(point);
        if spec.stop_below_rate.is_some_and(|r| rate < r) {
            break;
        }
    }
    Ok(Curve::new(alg.tag.clone(), points))
}

/// One curve over the spec's sparsity range, on the current thread pool.
pub fn reconstruction_curve(spec: &ExperimentSpec, alg: &AlgorithmSpec) -> Result<Curve> {
    spec.validate()?;
    sweep(spec, alg, &|_, _, _, _| {})
}

/// Curves for every algorithm of the spec on a pool of `threads` workers.
/// The output is identical for any thread count.
pub fn run_curves(spec: &ExperimentSpec, threads: usize, progress: &Progress<'_>) -> Result<Vec<Curve>> {
    spec.validate()?;
    if threads == 0 {
        return Err(Error::InvalidArgument("thread count must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        spec.algorithms
            .par_iter()
            .map(|alg| sweep(spec, alg, progress))
            .collect()
    })
}

/// Experiment settings recorded alongside the curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub m: usize,
    pub n: usize,
    pub s_min: usize,
    pub s_max: usize,
    pub signal_kind: SignalKind,
    pub trials_per_s: usize,
    pub algorithms: Vec<AlgorithmSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub spec: ReportMeta,
    pub master_seed: u64,
    pub curves: Vec<Curve>,
}

impl Report {
    pub fn new(spec: &ExperimentSpec, curves: Vec<Curve>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            spec: ReportMeta {
                m: spec.m,
                n: spec.n,
                s_min: spec.s_min,
                s_max: spec.s_max,
                signal_kind: spec.signal_kind,
                trials_per_s: spec.trials_per_s,
                algorithms: spec.algorithms.clone(),
            },
            master_seed: spec.master_seed,
            curves,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::InvalidArgument(format!("unknown report format {other:?}"))),
        }
    }
}

pub const CSV_HEADER: &str = "algorithm,s,trials,successes,rate";

/// Header line plus one `algorithm,s,trials,successes,rate` row per point.
pub fn curves_to_csv(curves: &[Curve]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for c in curves {
        for p in &c.points {
            out.push_str(&format!(
                "{},{},{},{},{:.6}\n",
                c.algorithm, p.s, p.trials, p.successes, p.rate
            ));
        }
    }
    out
}

fn io_error(path: &Path, e: impl fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial report.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_error(path, e))?;
    tmp.write_all(contents).map_err(|e| io_error(path, e))?;
    tmp.as_file().sync_all().map_err(|e| io_error(path, e))?;
    tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    Ok(())
}

pub fn emit_report(report: &Report, path: &Path, format: ReportFormat) -> Result<()> {
    let body = match format {
        ReportFormat::Csv => curves_to_csv(&report.curves),
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).map_err(|e| io_error(path, e))?;
            s.push('\n');
            s
        }
    };
    write_atomic(path, body.as_bytes())
}

pub fn read_report_json(path: &Path) -> Result<Report> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text).map_err(|e| io_error(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(s: usize, trials: usize, successes: usize) -> CurvePoint {
        CurvePoint {
            s,
            trials,
            successes,
            rate: successes as f64 / trials as f64,
            solver_failures: 0,
        }
    }

    fn curve_of(rates: &[usize]) -> Curve {
        Curve::new(
            "x".into(),
            rates.iter().enumerate().map(|(i, &k)| point(i + 1, 10, k)).collect(),
        )
    }

    #[test]
    fn matrix_is_deterministic_and_seed_sensitive() {
        let a = gen_gaussian_matrix(4, 6, 9).unwrap();
        let b = gen_gaussian_matrix(4, 6, 9).unwrap();
        let c = gen_gaussian_matrix(4, 6, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.get(0, 0), c.get(0, 0));
        assert!(gen_gaussian_matrix(0, 3, 1).is_err());
    }

    #[test]
    fn column_norms_concentrate() {
        let a = gen_gaussian_matrix(200, 1000, 3).unwrap();
        let mean: f64 = a.columns().map(|c| c.iter().map(|v| v * v).sum::<f64>()).sum::<f64>() / 1000.0;
        assert!((0.9..=1.1).contains(&mean), "{mean}");
    }

    #[test]
    fn cars_signal_shape() {
        let (x, s) = gen_sparse_signal(50, 7, SignalKind::Cars, 4).unwrap();
        assert_eq!(s.len(), 7);
        assert_eq!(crate::sparse::support(&x), s);
        assert!(s.iter().all(|i| x[i].abs() == 1.0));
        let (full, fs) = gen_sparse_signal(5, 5, SignalKind::Gaussian, 4).unwrap();
        assert_eq!(fs.as_slice(), &[0, 1, 2, 3, 4]);
        assert!(full.iter().all(|v| *v != 0.0));
        assert!(gen_sparse_signal(5, 0, SignalKind::Cars, 1).is_err());
        assert!(gen_sparse_signal(5, 6, SignalKind::Cars, 1).is_err());
    }

    #[test]
    fn algorithm_tags() {
        assert_eq!(AlgorithmSpec::parse("iht:1", 0.1).unwrap().tag, "iht:1");
        let third = AlgorithmSpec::parse("iad:0.333333", 0.1).unwrap();
        assert_eq!(third.tag, "iad:0.333333");
        assert_eq!(third.config.mu, 0.333333);
        assert_eq!(third.config.gamma, 0.1);
        assert_eq!(AlgorithmSpec::parse("niad", 0.1).unwrap().tag, "niad");
        assert!(AlgorithmSpec::parse("niad:2", 0.1).is_err());
        assert!(AlgorithmSpec::parse("omp", 0.1).is_err());
        assert!(AlgorithmSpec::parse("iht:x", 0.1).is_err());
    }

    #[test]
    fn seeds_separate_every_coordinate() {
        let base = trial_seed(1, "iad:1", 5, 3);
        assert_eq!(base, trial_seed(1, "iad:1", 5, 3));
        assert_ne!(base, trial_seed(2, "iad:1", 5, 3));
        assert_ne!(base, trial_seed(1, "iht:1", 5, 3));
        assert_ne!(base, trial_seed(1, "iad:1", 6, 3));
        assert_ne!(base, trial_seed(1, "iad:1", 5, 4));
    }

    #[test]
    fn critical_sparsity_examples() {
        assert_eq!(critical_sparsity(&curve_of(&[10, 10, 10, 9, 2])), Some(3));
        assert_eq!(critical_sparsity(&curve_of(&[8, 10, 10])), None);
        assert_eq!(critical_sparsity(&curve_of(&[10, 9, 10])), Some(1));
        let c = Curve::new("x".into(), vec![point(1, 100, 100), point(2, 100, 99), point(3, 100, 98)]);
        assert_eq!(critical_sparsity_at(&c, 0.99), Some(2));
    }

    #[test]
    fn curve_points_are_sorted() {
        let c = Curve::new("x".into(), vec![point(3, 1, 0), point(1, 1, 1), point(2, 1, 1)]);
        assert_eq!(c.points.iter().map(|p| p.s).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert_eq!(c.critical_sparsity, Some(2));
    }

    #[test]
    fn csv_layout() {
        let c = Curve::new("adp".into(), vec![point(4, 3, 2)]);
        let csv = curves_to_csv(&[c]);
        assert_eq!(csv, "algorithm,s,trials,successes,rate\nadp,4,3,2,0.666667\n");
        assert_eq!(csv.lines().count(), 2);
    }

    #[test]
    fn spec_validation() {
        let mut spec = ExperimentSpec::new(20, 40, 1, 5, SignalKind::Cars);
        assert!(spec.validate().is_ok());
        spec.s_max = 41;
        assert!(spec.validate().is_err());
        spec.s_max = 5;
        spec.trials_per_s = 0;
        assert!(spec.validate().is_err());
        spec.trials_per_s = 1;
        spec.s_min = 0;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn trial_is_reproducible() {
        let alg = AlgorithmSpec::parse("niad", 0.1).unwrap();
        let a = run_trial(40, 80, SignalKind::Gaussian, &alg, 3, 0, 77).unwrap();
        let b = run_trial(40, 80, SignalKind::Gaussian, &alg, 3, 0, 77).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn oversized_support_fails() {
        for name in ["iht:1", "niht", "htp", "iad:1", "niad", "adp"] {
            let alg = AlgorithmSpec::parse(name, 0.1).unwrap();
            let r = run_trial(6, 20, SignalKind::Cars, &alg, 8, 0, 5).unwrap();
            assert!(!r.success, "{name}");
        }
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
        let missing = dir.path().join("no/such/dir/r.csv");
        assert!(matches!(write_atomic(&missing, b"x"), Err(Error::Io { .. })));
    }
}
