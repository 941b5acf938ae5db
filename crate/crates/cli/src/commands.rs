use std::io::{self, Write};
use std::path::Path;

use adgreedy::admm::{check_unrolled_equivalence, AdmmParams};
use adgreedy::experiments::{
    critical_sparsity_at, emit_report, gen_gaussian_matrix, gen_sparse_signal, read_report_json, run_curves,
    trial_seed, AlgorithmSpec, Curve, ExperimentSpec, Report, ReportFormat, SignalKind,
};
use adgreedy::solvers::check_explicit_iad;
use adgreedy::theory::{
    c_coefficients, corollary1_iterations, theorem1_constants, theorem1_error_bound, CCoefficients, TheoryBounds,
    TheoryInputs,
};
use adgreedy::{run_solver, Algorithm, DenseVector, Error, ProblemInstance, SolverConfig, SolverResult};
use anyhow::anyhow;
use serde::Serialize;

use crate::report::read_curves;
use crate::{usage, CliError, CliResult, Command, CriticalArgs, CurveArgs, EquivalenceArgs, SolveArgs, SweepArgs, TheoryArgs};

/// Threshold of the secondary critical-sparsity statistic.
const NEAR_ONE_RATE: f64 = 0.99;

pub(crate) fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    match command {
        Command::Solve(a) => solve(a, out),
        Command::Curve(a) => curve(a, out, err),
        Command::Critical(a) => critical(a, out),
        Command::Equivalence(a) => equivalence(a, out),
        Command::Theory(a) => theory(a, out),
    }
}

/// Argument errors from the library become usage errors, the rest runtime.
fn classify(e: Error) -> CliError {
    match e {
        Error::InvalidArgument(_) | Error::DimensionMismatch { .. } => CliError::Usage(e.to_string()),
        other => CliError::Runtime(other.into()),
    }
}

fn parse_with<T: std::str::FromStr<Err = Error>>(text: &str) -> CliResult<T> {
    text.parse().map_err(classify)
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| CliError::Runtime(e.into()))?;
    writeln!(out).map_err(|e| CliError::Runtime(e.into()))
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    algorithm: Algorithm,
    m: usize,
    n: usize,
    s: usize,
    seed: u64,
    signal: SignalKind,
    success: bool,
    true_support: &'a [usize],
    #[serde(flatten)]
    result: &'a SolverResult,
}

fn solve(a: SolveArgs, out: &mut dyn Write) -> CliResult<i32> {
    let algorithm: Algorithm = parse_with(&a.algorithm)?;
    let signal: SignalKind = parse_with(&a.signal)?;
    if a.m == 0 || a.n == 0 {
        return Err(usage("m and n must be positive"));
    }
    let config = SolverConfig::new(algorithm, a.s)
        .with_mu(a.mu)
        .with_gamma(a.gamma)
        .with_max_iters(a.max_iters)
        .with_residual_tol(a.tol);
    config.validate(a.n).map_err(classify)?;

    let matrix = gen_gaussian_matrix(a.m, a.n, a.seed).map_err(classify)?;
    let (x, support) = gen_sparse_signal(a.n, a.s, signal, a.seed).map_err(classify)?;
    let problem = ProblemInstance::noiseless(matrix, x).map_err(classify)?;
    let result = run_solver(&problem, &config).map_err(|e| CliError::Runtime(e.into()))?;
    write_json(
        out,
        &SolveOutput {
            algorithm,
            m: a.m,
            n: a.n,
            s: a.s,
            seed: a.seed,
            signal,
            success: result.support_final == support,
            true_support: support.as_slice(),
            result: &result,
        },
    )?;
    Ok(0)
}

fn build_spec(a: &SweepArgs) -> CliResult<ExperimentSpec> {
    let kind: SignalKind = parse_with(&a.signal)?;
    let mut spec = ExperimentSpec::new(a.m, a.n, a.s_min, a.s_max, kind);
    spec.trials_per_s = a.trials;
    spec.master_seed = a.seed;
    spec.stop_below_rate = a.stop_below;
    for tag in a.algorithms.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let mut alg = AlgorithmSpec::parse(tag, a.gamma).map_err(classify)?;
        alg.config = alg.config.with_max_iters(a.max_iters).with_residual_tol(a.tol);
        spec.algorithms.push(alg);
    }
    if spec.algorithms.is_empty() {
        return Err(usage("at least one algorithm is required"));
    }
    spec.validate().map_err(classify)?;
    Ok(spec)
}

fn thread_count(a: &SweepArgs) -> CliResult<usize> {
    match a.threads {
        Some(0) => Err(usage("--threads must be positive")),
        Some(t) => Ok(t),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn sweep(spec: &ExperimentSpec, a: &SweepArgs) -> CliResult<Vec<Curve>> {
    let threads = thread_count(a)?;
    let quiet = a.quiet;
    let progress = move |tag: &str, s: usize, done: usize, total: usize| {
        if !quiet {
            let _ = writeln!(io::stderr().lock(), "{tag} {s} {done}/{total}");
        }
    };
    run_curves(spec, threads, &progress).map_err(|e| CliError::Runtime(e.into()))
}

/// Curves of an earlier JSON report with identical settings.
fn resumable_curves(path: &Path, spec: &ExperimentSpec) -> Option<Vec<Curve>> {
    let old = read_report_json(path).ok()?;
    let fresh = Report::new(spec, Vec::new());
    (old.spec == fresh.spec && old.master_seed == fresh.master_seed).then_some(old.curves)
}

fn curve(a: CurveArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let format: ReportFormat = parse_with(&a.format)?;
    let mut spec = build_spec(&a.sweep)?;
    let mut done = Vec::new();
    if a.resume {
        match (format, resumable_curves(&a.out, &spec)) {
            (ReportFormat::Json, Some(curves)) => done = curves,
            (ReportFormat::Json, None) => {}
            (ReportFormat::Csv, _) => return Err(usage("--resume needs --format json")),
        }
    }
    let requested = spec.algorithms.clone();
    spec.algorithms.retain(|alg| !done.iter().any(|c| c.algorithm == alg.tag));
    if !done.is_empty() {
        let _ = writeln!(err, "reusing {} curve(s) from {}", done.len(), a.out.display());
    }
    let mut fresh = if spec.algorithms.is_empty() { Vec::new() } else { sweep(&spec, &a.sweep)? };

    let mut curves = Vec::with_capacity(requested.len());
    for alg in &requested {
        let pos = fresh.iter().position(|c| c.algorithm == alg.tag);
        let c = match pos {
            Some(i) => fresh.swap_remove(i),
            None => done
                .iter()
                .find(|c| c.algorithm == alg.tag)
                .cloned()
                .ok_or_else(|| anyhow!("no curve for {}", alg.tag))?,
        };
        curves.push(c);
    }
    spec.algorithms = requested;
    let report = Report::new(&spec, curves);
    emit_report(&report, &a.out, format).map_err(|e| CliError::Runtime(e.into()))?;
    let _ = writeln!(out, "wrote {}", a.out.display());
    Ok(0)
}

/// `(new − old)/old` in percent; undefined when `old` is zero.
pub fn gain_percent(old: usize, new: usize) -> Option<f64> {
    (old > 0).then(|| (new as f64 - old as f64) / old as f64 * 100.0)
}

pub fn format_gain(gain: Option<f64>) -> String {
    gain.map_or_else(|| "n/a".to_string(), |g| format!("{g:.1}%"))
}

fn show(v: Option<usize>) -> String {
    v.map_or_else(|| "-".to_string(), |s| s.to_string())
}

fn critical(a: CriticalArgs, out: &mut dyn Write) -> CliResult<i32> {
    let mut pairs = Vec::new();
    for p in a.pairs.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (old, new) = p
            .split_once('/')
            .ok_or_else(|| usage(format!("pair {p:?} must look like old/new")))?;
        pairs.push((old.trim().to_string(), new.trim().to_string()));
    }
    let curves = match &a.input {
        Some(path) => read_curves(path).map_err(CliError::Runtime)?,
        None => {
            let spec = build_spec(&a.sweep)?;
            sweep(&spec, &a.sweep)?
        }
    };
    let find = |tag: &str| -> CliResult<&Curve> {
        curves
            .iter()
            .find(|c| c.algorithm == tag)
            .ok_or_else(|| CliError::Runtime(anyhow!("no curve for {tag}")))
    };
    for (old, new) in &pairs {
        find(old)?;
        find(new)?;
    }

    let io = |e: io::Error| CliError::Runtime(e.into());
    writeln!(out, "{:<16} {:>10} {:>10}", "algorithm", "rate=1", "rate>=0.99").map_err(io)?;
    for c in &curves {
        writeln!(
            out,
            "{:<16} {:>10} {:>10}",
            c.algorithm,
            show(c.critical_sparsity),
            show(critical_sparsity_at(c, NEAR_ONE_RATE))
        )
        .map_err(io)?;
    }
    writeln!(out).map_err(io)?;
    writeln!(out, "{:<30} {:>10} {:>12}", "pair", "gain", "gain@0.99").map_err(io)?;
    for (old, new) in &pairs {
        let (o, n) = (find(old)?, find(new)?);
        let strict = o.critical_sparsity.zip(n.critical_sparsity).and_then(|(o, n)| gain_percent(o, n));
        let near = critical_sparsity_at(o, NEAR_ONE_RATE)
            .zip(critical_sparsity_at(n, NEAR_ONE_RATE))
            .and_then(|(o, n)| gain_percent(o, n));
        writeln!(
            out,
            "{:<30} {:>10} {:>12}",
            format!("{old} -> {new}"),
            format_gain(strict),
            format_gain(near)
        )
        .map_err(io)?;
    }
    Ok(0)
}

fn equivalence_instance(a: &EquivalenceArgs, index: usize) -> CliResult<ProblemInstance> {
    let seed = trial_seed(a.seed, "equivalence", a.s, index);
    let matrix = gen_gaussian_matrix(a.m, a.n, seed).map_err(classify)?;
    let (x, _) = gen_sparse_signal(a.n, a.s, SignalKind::Gaussian, seed).map_err(classify)?;
    let x: Vec<f64> = x.iter().map(|v| v * a.amplitude).collect();
    ProblemInstance::noiseless(matrix, x.into()).map_err(classify)
}

fn equivalence(a: EquivalenceArgs, out: &mut dyn Write) -> CliResult<i32> {
    let params = AdmmParams::new(a.alpha, a.beta, a.tau).map_err(classify)?;
    if a.instances == 0 {
        return Err(usage("--instances must be positive"));
    }
    if a.iters < 2 {
        return Err(usage("--iters must be at least 2"));
    }
    if a.m == 0 || a.n == 0 || a.s == 0 || a.s > a.n {
        return Err(usage("need m, n >= 1 and 1 <= s <= n"));
    }
    if !(a.amplitude > 0.0 && a.amplitude.is_finite()) {
        return Err(usage("--amplitude must be positive"));
    }
    // The recursion-free ADMM update is IAD with these parameters.
    let gamma = params.gamma();
    let iad = SolverConfig::new(Algorithm::Iad, a.s)
        .with_gamma(gamma)
        .with_mu(2.0 * a.tau / (1.0 + gamma));

    let io = |e: io::Error| CliError::Runtime(e.into());
    let mut worst = [0.0f64; 2];
    let mut flagged = [0usize; 2];
    for i in 0..a.instances {
        let p = equivalence_instance(&a, i)?;
        let admm = check_unrolled_equivalence(&p, &params, DenseVector::zeros(a.n), a.iters)
            .map_err(|e| CliError::Runtime(e.into()))?;
        let explicit = check_explicit_iad(&p, &iad, a.iters).map_err(|e| CliError::Runtime(e.into()))?;
        for (j, (dev, inconclusive)) in [
            (admm.max_deviation, admm.boundary_inconclusive),
            (explicit.max_deviation, explicit.boundary_inconclusive),
        ]
        .into_iter()
        .enumerate()
        {
            if inconclusive {
                flagged[j] += 1;
            } else {
                worst[j] = worst[j].max(dev);
            }
        }
        let mark = |f: bool| if f { " (boundary)" } else { "" };
        writeln!(
            out,
            "instance {i}: admm {:.3e}{} iad {:.3e}{}",
            admm.max_deviation,
            mark(admm.boundary_inconclusive),
            explicit.max_deviation,
            mark(explicit.boundary_inconclusive)
        )
        .map_err(io)?;
    }
    let pass = worst.iter().all(|w| *w <= a.tol);
    writeln!(
        out,
        "admm: max deviation {:.3e}, {} boundary-inconclusive of {}",
        worst[0], flagged[0], a.instances
    )
    .map_err(io)?;
    writeln!(
        out,
        "iad: max deviation {:.3e}, {} boundary-inconclusive of {}",
        worst[1], flagged[1], a.instances
    )
    .map_err(io)?;
    writeln!(out, "{} (tolerance {:e})", if pass { "PASS" } else { "FAIL" }, a.tol).map_err(io)?;
    Ok(if pass { 0 } else { 1 })
}

#[derive(Serialize)]
struct TheoryOutput {
    bounds: TheoryBounds,
    #[serde(skip_serializing_if = "Option::is_none")]
    coefficients: Option<CCoefficients>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    identification_iterations: Option<usize>,
}

fn theory(a: TheoryArgs, out: &mut dyn Write) -> CliResult<i32> {
    let algorithm: Algorithm = parse_with(&a.algorithm)?;
    let inputs = TheoryInputs::new(algorithm, a.delta3s, a.mu, a.gamma).map_err(classify)?;
    if a.k.is_some_and(|k| k < 2) {
        return Err(usage("--k must be at least 2"));
    }
    for (name, v) in [("--x0-err", a.x0_err), ("--x-min", a.x_min), ("--noise", Some(a.noise))] {
        if v.is_some_and(|v| !(v >= 0.0 && v.is_finite())) {
            return Err(usage(format!("{name} must be nonnegative")));
        }
    }
    let bounds = theorem1_constants(&inputs).map_err(|e| CliError::Runtime(e.into()))?;
    let runtime = |e: Error| CliError::Runtime(e.into());

    let coefficients = match (a.k, a.x_min) {
        (Some(k), _) => Some(c_coefficients(&bounds, k).map_err(runtime)?),
        (None, Some(_)) => Some(c_coefficients(&bounds, 2).map_err(runtime)?),
        (None, None) => None,
    };
    let error_bound = match (a.k, a.x0_err) {
        (Some(k), Some(x0)) => Some(theorem1_error_bound(&bounds, k, x0, a.noise).map_err(runtime)?),
        _ => None,
    };
    let identification_iterations = match a.x_min {
        Some(x_min) => {
            let x0 = a.x0_err.ok_or_else(|| usage("--x-min needs --x0-err"))?;
            let c = coefficients.as_ref().expect("computed above");
            Some(corollary1_iterations(x_min, x0, &bounds, c).map_err(runtime)?)
        }
        None => None,
    };
    write_json(
        out,
        &TheoryOutput {
            bounds,
            coefficients,
            error_bound,
            identification_iterations,
        },
    )?;
    Ok(0)
}
