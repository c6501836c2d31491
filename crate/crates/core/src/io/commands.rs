use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use log::{info, warn};
use serde::Serialize;

use super::config::RunConfig;
use super::sampled::{load_sampled_function, save_sampled_function};
use super::table::write_derivative_csv;
use super::{CliError, CliResult};
use crate::fourier::{compare_methods, table1_sweep, Comparison, SweepConfig, SweepTable, TorusGrid};
use crate::functions::Builtin;
use crate::riesz::{
    apply_operator, fractional_derivative, Domain, DomainPartition, RationalOrder, TriDomainFunction,
    TriDomainGrid,
};
use crate::soliton::{
    default_schedule, hamiltonian, mass, parity_defect, trace_alpha, ContinuationStep, ConvergenceRecord,
    NewtonOptions, SolitonProblem, Status, TracedSolution, TAIL_COEFFICIENTS,
};

/// Chebyshev tails above this are reported as under-resolved.
const TAIL_WARNING: f64 = 1e-10;

type Timings = BTreeMap<&'static str, f64>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionReport {
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    #[serde(rename = "N_I")]
    pub n_left: usize,
    #[serde(rename = "N_II")]
    pub n_middle: usize,
    #[serde(rename = "N_III")]
    pub n_right: usize,
}

impl From<&DomainPartition> for PartitionReport {
    fn from(p: &DomainPartition) -> Self {
        Self {
            a: p.a,
            b: p.b,
            delta: p.delta,
            n_left: p.n_left,
            n_middle: p.n_middle,
            n_right: p.n_right,
        }
    }
}

fn prepare_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))
}

fn write_json<T: Serialize>(path: PathBuf, value: &T) -> CliResult<PathBuf> {
    let text = serde_json::to_string_pretty(value).expect("reports serialise");
    fs::write(&path, text).map_err(CliError::io(&path))?;
    Ok(path)
}

fn names(paths: &[PathBuf]) -> Vec<String> {
    paths.iter().map(|p| p.display().to_string()).collect()
}

fn warn_tails(what: &str, tails: [f64; 3]) {
    for (d, t) in Domain::ALL.into_iter().zip(tails) {
        if t > TAIL_WARNING {
            warn!("{what}: Chebyshev tail {t:.2e} in domain {}; increase N", d.label());
        }
    }
}

fn chebyshev_dump(u: &TriDomainFunction) -> BTreeMap<&'static str, Vec<f64>> {
    Domain::ALL.into_iter().map(|d| (d.label(), u.chebyshev(d).coeffs)).collect()
}

// --- fracderiv ---------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FracderivReport {
    pub order: String,
    pub function: String,
    pub partition: PartitionReport,
    pub input_tails: [f64; 3],
    pub derivative_tails: [f64; 3],
    /// Max deviation from the closed form over all nodes (scaled values in
    /// the outer domains), or at `x = 0` when only that value is known.
    pub closed_form_error: Option<f64>,
    pub value_at_zero: f64,
    pub exact_value_at_zero: Option<f64>,
    pub timings_s: Timings,
    pub files: Vec<String>,
}

enum Source {
    Builtin(Builtin),
    File(PathBuf),
}

fn source(cfg: &RunConfig) -> CliResult<Source> {
    match (cfg.func.as_deref(), &cfg.input) {
        (None | Some("file"), Some(path)) => Ok(Source::File(path.clone())),
        (Some("file"), None) => Err(CliError::Usage("--func file needs --input PATH".into())),
        (Some(name), Some(_)) => Err(CliError::Usage(format!("--input cannot be combined with --func {name}"))),
        (name, None) => Ok(Source::Builtin(name.unwrap_or("lorentz").parse()?)),
    }
}

fn closed_form_error(f: Builtin, du: &TriDomainFunction, at_zero: f64) -> Option<f64> {
    let order = du.order();
    match f {
        Builtin::Lorentz => {
            let grid = du.grid();
            let mut worst = 0.0f64;
            for d in Domain::ALL {
                for (&t, &v) in grid.nodes(d).iter().zip(du.values(d)) {
                    worst = worst.max((v - f.exact_scaled_derivative(order, d, t)?).abs());
                }
            }
            Some(worst)
        }
        _ => f.exact_derivative(order.alpha(), 0.0).map(|e| (at_zero - e).abs()),
    }
}

/// `D^α u` of a builtin or sampled function on every node.
pub fn run_fracderiv(cfg: &RunConfig) -> CliResult<FracderivReport> {
    let start = Instant::now();
    let mut timings = Timings::new();
    let (u, function) = match source(cfg)? {
        Source::Builtin(f) => {
            let order = cfg.order_or("1/2")?;
            let partition = cfg.partition_or(-2.0, 2.0, 1e-2, 200)?;
            let grid = Arc::new(TriDomainGrid::new(order, partition)?);
            (f.sample(grid), Some(f))
        }
        Source::File(path) => {
            let u = load_sampled_function(&path)?;
            if let Some(text) = &cfg.alpha {
                let order = super::config::parse_order(text, "--alpha")?;
                if order != u.order() {
                    return Err(CliError::Usage(format!(
                        "--alpha {order} disagrees with the order {} stored in {}",
                        u.order(),
                        path.display()
                    )));
                }
            }
            if cfg.a.is_some() || cfg.b.is_some() || cfg.n.is_some() || cfg.delta.is_some() {
                warn!("partition flags are ignored: the grid comes from {}", path.display());
            }
            (u, None)
        }
    };
    timings.insert("setup", start.elapsed().as_secs_f64());

    let t = Instant::now();
    let du = fractional_derivative(&u)?;
    timings.insert("derivative", t.elapsed().as_secs_f64());

    let input_tails = u.tail_indicators(TAIL_COEFFICIENTS);
    let derivative_tails = du.tail_indicators(TAIL_COEFFICIENTS);
    warn_tails("input", input_tails);
    warn_tails("derivative", derivative_tails);
    let value_at_zero = du.value_at(0.0);

    let dir = cfg.out_dir();
    prepare_dir(&dir)?;
    let mut files = write_derivative_csv(&dir, "derivative", &u, &du)?;
    let dump: BTreeMap<_, _> = [("u", chebyshev_dump(&u)), ("derivative", chebyshev_dump(&du))].into();
    files.push(write_json(dir.join("chebyshev.json"), &dump)?);
    files.push(dir.join("report.json"));
    timings.insert("total", start.elapsed().as_secs_f64());

    let report = FracderivReport {
        order: u.order().to_string(),
        function: function.map_or_else(|| "file".to_string(), |f| f.name().to_string()),
        partition: u.grid().partition().into(),
        input_tails,
        derivative_tails,
        closed_form_error: function.and_then(|f| closed_form_error(f, &du, value_at_zero)),
        value_at_zero,
        exact_value_at_zero: function.and_then(|f| f.exact_derivative(u.order().alpha(), 0.0)),
        timings_s: timings,
        files: names(&files),
    };
    write_json(dir.join("report.json"), &report)?;
    if let Some(e) = report.closed_form_error {
        info!("largest deviation from the closed form: {e:.3e}");
    }
    Ok(report)
}

// --- compare-fft -------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonSummary {
    pub half_period: f64,
    pub n_fft: usize,
    pub cutoff: f64,
    pub max_difference: f64,
    pub worst_x: f64,
    pub points_compared: usize,
    pub input_spectral_tail: f64,
    pub derivative_spectral_tail: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub order: String,
    pub function: String,
    /// Lorentz errors of the DFT derivative over resolution and torus size.
    pub sweep: SweepTable,
    pub comparison: ComparisonSummary,
    pub timings_s: Timings,
    pub files: Vec<String>,
}

/// DFT error sweeps for the Lorentz function plus a DFT/multi-domain
/// comparison of the selected function on `|x| ≤ min(100, πL/2)`.
pub fn run_compare_fft(cfg: &RunConfig) -> CliResult<CompareReport> {
    let start = Instant::now();
    let mut timings = Timings::new();
    let order = cfg.order_or("1/2")?;
    let f = match source(cfg)? {
        Source::Builtin(f) => f,
        Source::File(_) => return Err(CliError::Usage("compare-fft needs a builtin --func".into())),
    };
    let partition = cfg.partition_or(-2.0, 2.0, 1e-2, 200)?;
    let half_period = RunConfig::positive(cfg.half_period, 1e3, "--L")?;
    let torus = TorusGrid::new(half_period, cfg.nfft.unwrap_or(1 << 17))
        .map_err(|e| CliError::Usage(format!("--L/--nfft: {e}")))?;

    let t = Instant::now();
    let sweep = table1_sweep(order.alpha(), &SweepConfig::default())?;
    timings.insert("sweep", t.elapsed().as_secs_f64());

    let t = Instant::now();
    let u = f.sample(Arc::new(TriDomainGrid::new(order, partition)?));
    let cutoff = 100f64.min(0.5 * std::f64::consts::PI * half_period);
    let cmp = compare_methods(&u, &torus, cutoff)?;
    timings.insert("comparison", t.elapsed().as_secs_f64());

    let dir = cfg.out_dir();
    prepare_dir(&dir)?;
    let mut text = String::from("sweep,half_period,n_fft,error\n");
    for (name, rows) in [("resolution", &sweep.by_resolution), ("half_period", &sweep.by_half_period)] {
        for r in rows.iter() {
            let _ = writeln!(text, "{name},{:.16e},{},{:.16e}", r.half_period, r.n_fft, r.error);
        }
    }
    let sweep_path = dir.join("sweep.csv");
    fs::write(&sweep_path, text).map_err(CliError::io(&sweep_path))?;
    let mut text = String::from("wavenumber,input,derivative\n");
    for (j, (a, b)) in cmp.input_spectrum.iter().zip(&cmp.derivative_spectrum).enumerate() {
        let _ = writeln!(text, "{:.16e},{a:.16e},{b:.16e}", torus.wavenumber(j));
    }
    let spectra_path = dir.join("spectra.csv");
    fs::write(&spectra_path, text).map_err(CliError::io(&spectra_path))?;
    timings.insert("total", start.elapsed().as_secs_f64());

    let report = CompareReport {
        order: order.to_string(),
        function: f.name().to_string(),
        sweep,
        comparison: ComparisonSummary {
            half_period,
            n_fft: torus.len(),
            cutoff,
            max_difference: cmp.max_difference,
            worst_x: cmp.worst_x,
            points_compared: cmp.points_compared,
            input_spectral_tail: Comparison::spectral_tail(&cmp.input_spectrum),
            derivative_spectral_tail: Comparison::spectral_tail(&cmp.derivative_spectrum),
        },
        timings_s: timings,
        files: names(&[sweep_path, spectra_path, dir.join("report.json")]),
    };
    write_json(dir.join("report.json"), &report)?;
    info!("largest DFT/multi-domain difference {:.3e}", report.comparison.max_difference);
    Ok(report)
}

// --- soliton and trace -------------------------------------------------------

/// Diagnostics of one persisted solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStepReport {
    pub order: String,
    pub partition: PartitionReport,
    pub status: Status,
    pub converged: bool,
    pub newton_steps: usize,
    pub residual: f64,
    pub tails: [f64; 3],
    pub parity_defect: f64,
    pub peak: f64,
    pub mass: f64,
    pub hamiltonian: f64,
    pub directory: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolitonReport {
    pub c: f64,
    pub kappa: f64,
    pub n_power: u32,
    pub tol: f64,
    #[serde(flatten)]
    pub solution: TraceStepReport,
    pub residual_norms: Vec<f64>,
    pub gmres_iterations: Vec<usize>,
    /// Orders solved on the way to the target.
    pub continuation: Vec<String>,
    pub halted: Option<String>,
    pub timings_s: Timings,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceReport {
    pub c: f64,
    pub kappa: f64,
    pub n_power: u32,
    pub tol: f64,
    pub steps: Vec<TraceStepReport>,
    pub halted: Option<String>,
    pub timings_s: Timings,
}

impl SolitonReport {
    /// The target order was reached and converged.
    pub fn succeeded(&self) -> bool {
        self.halted.is_none() && self.solution.converged
    }
}

impl TraceReport {
    pub fn completed(&self) -> bool {
        self.halted.is_none()
    }
}

struct Equation {
    c: f64,
    kappa: f64,
    n_power: u32,
    options: NewtonOptions,
}

fn equation(cfg: &RunConfig) -> CliResult<Equation> {
    let c = RunConfig::positive(cfg.c, 1.0, "--c")?;
    let kappa = RunConfig::positive(cfg.kappa, 0.5, "--kappa")?;
    let n_power = cfg.n_power.unwrap_or(2);
    if n_power < 2 {
        return Err(CliError::Usage(format!("--n-power must be at least 2, got {n_power}")));
    }
    let tol = RunConfig::positive(cfg.tol, 1e-10, "--tol")?;
    let mut options = NewtonOptions {
        tol,
        ..Default::default()
    };
    if let Some(m) = cfg.max_newton {
        options.max_newton = m;
    }
    Ok(Equation {
        c,
        kappa,
        n_power,
        options,
    })
}

/// `A·4/(1+(λx)²)` with the amplitude and width that map the speed-one
/// fKdV wave at α = 1 onto the given equation and first order.
fn scaled_benjamin_ono(eq: &Equation, grid: Arc<TriDomainGrid>) -> TriDomainFunction {
    let order = grid.order();
    let lambda = eq.c.powf(1.0 / order.alpha());
    let amp = (eq.c / (2.0 * eq.kappa)).powf(1.0 / (eq.n_power as f64 - 1.0));
    let (p, q) = (order.p() as i32, order.q() as i32);
    let trace = move |xi: f64| amp * 4.0 * xi.powi(q - p) / (xi.powi(2 * q) + lambda * lambda);
    TriDomainFunction::from_traces(grid, trace, move |x| amp * 4.0 / (1.0 + lambda * lambda * x * x), trace)
}

/// Built-in branch down to (but excluding) `target`, with the partitions
/// narrowed for speeds other than one.
fn branch_above(target: RationalOrder, c: f64) -> CliResult<Vec<ContinuationStep>> {
    default_schedule()
        .into_iter()
        .filter(|s| s.order.alpha() > target.alpha())
        .map(|s| {
            let partition = s.partition.scaled(c.powf(1.0 / s.order.alpha()))?;
            Ok(ContinuationStep { partition, ..s })
        })
        .collect()
}

fn run_branch(eq: &Equation, steps: &[ContinuationStep]) -> CliResult<(Vec<TracedSolution>, Option<String>)> {
    let first = steps.first().ok_or_else(|| CliError::Usage("empty α schedule".into()))?;
    let template = SolitonProblem::new(first.order, first.partition, eq.c, eq.kappa, eq.n_power)?;
    let seed = scaled_benjamin_ono(eq, template.grid().clone());
    let outcome = trace_alpha(&template, steps, Some(&seed), &eq.options)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok((outcome.branch, outcome.halted))
}

/// Writes the solution files of one stage and returns its diagnostics.
fn persist(dir: &Path, stage: &TracedSolution) -> CliResult<(TraceStepReport, Vec<PathBuf>)> {
    prepare_dir(dir)?;
    let TracedSolution {
        problem,
        solution,
        record,
    } = stage;
    let d = apply_operator(problem.operator()?, &solution.stacked())?;
    let du = TriDomainFunction::from_stacked(problem.grid().clone(), &d)?;
    let mut files = write_derivative_csv(dir, "solution", solution, &du)?;
    let json = dir.join("solution.json");
    save_sampled_function(solution, &json)?;
    files.push(json);
    files.push(write_json(dir.join("record.json"), record)?);
    files.push(write_json(dir.join("chebyshev.json"), &chebyshev_dump(solution))?);
    warn_tails(&format!("α = {}", problem.order()), record.final_tail);
    let report = TraceStepReport {
        order: problem.order().to_string(),
        partition: problem.partition().into(),
        status: record.status,
        converged: record.converged,
        newton_steps: record.newton_steps(),
        residual: record.final_residual(),
        tails: record.final_tail,
        parity_defect: parity_defect(solution),
        peak: solution.value_at(0.0),
        mass: mass(solution)?,
        hamiltonian: hamiltonian(solution)?,
        directory: dir.display().to_string(),
    };
    Ok((report, files))
}

fn solution_report(
    eq: &Equation,
    step: TraceStepReport,
    record: &ConvergenceRecord,
    continuation: Vec<String>,
    halted: Option<String>,
    timings: Timings,
    files: Vec<PathBuf>,
) -> SolitonReport {
    SolitonReport {
        c: eq.c,
        kappa: eq.kappa,
        n_power: eq.n_power,
        tol: eq.options.tol,
        solution: step,
        residual_norms: record.residual_norms.clone(),
        gmres_iterations: record.gmres_iterations.clone(),
        continuation,
        halted,
        timings_s: timings,
        files: names(&files),
    }
}

/// Solitary wave at one order. Orders below 9/10 are reached through the
/// built-in continuation branch; only the last stage uses the flag partition.
pub fn run_soliton(cfg: &RunConfig) -> CliResult<SolitonReport> {
    let start = Instant::now();
    let mut timings = Timings::new();
    let eq = equation(cfg)?;
    let order = cfg.order_or("4/5")?;
    let partition = cfg.partition_or(-1.0, 1.0, 1e-2, 200)?;
    // refuse subcritical orders before any work is done
    SolitonProblem::new(order, partition, eq.c, eq.kappa, eq.n_power)?;
    let mut steps = branch_above(order, eq.c)?;
    steps.push(ContinuationStep { order, partition });
    info!("solving {} stage(s) down to α = {order}", steps.len());

    let t = Instant::now();
    let (branch, halted) = run_branch(&eq, &steps)?;
    timings.insert("solve", t.elapsed().as_secs_f64());
    let last = branch
        .last()
        .ok_or_else(|| CliError::Numerical(halted.clone().unwrap_or_else(|| "no stage was solved".into())))?;

    let dir = cfg.out_dir();
    let t = Instant::now();
    let (step, mut files) = persist(&dir, last)?;
    timings.insert("diagnostics", t.elapsed().as_secs_f64());
    timings.insert("total", start.elapsed().as_secs_f64());
    files.push(dir.join("report.json"));
    let continuation = branch[..branch.len() - 1]
        .iter()
        .map(|s| s.problem.order().to_string())
        .collect();
    let report = solution_report(&eq, step, &last.record, continuation, halted, timings, files);
    write_json(dir.join("report.json"), &report)?;
    Ok(report)
}

/// Continuation in α; each completed stage is persisted in its own
/// directory, so a halted trace keeps its partial branch.
pub fn run_trace(cfg: &RunConfig) -> CliResult<TraceReport> {
    let start = Instant::now();
    let mut timings = Timings::new();
    let eq = equation(cfg)?;
    let steps = match cfg.stages()? {
        Some(steps) => steps,
        None => branch_above(RationalOrder::new(1, 3)?, eq.c)?,
    };
    let t = Instant::now();
    let (branch, halted) = run_branch(&eq, &steps)?;
    timings.insert("solve", t.elapsed().as_secs_f64());

    let dir = cfg.out_dir();
    prepare_dir(&dir)?;
    let t = Instant::now();
    let mut reports = Vec::new();
    for (i, stage) in branch.iter().enumerate() {
        let o = stage.problem.order();
        let (r, _) = persist(&dir.join(format!("stage_{i:02}_{}-{}", o.p(), o.q())), stage)?;
        reports.push(r);
    }
    timings.insert("diagnostics", t.elapsed().as_secs_f64());
    timings.insert("total", start.elapsed().as_secs_f64());
    if let Some(msg) = &halted {
        warn!("trace halted: {msg}");
    }
    let report = TraceReport {
        c: eq.c,
        kappa: eq.kappa,
        n_power: eq.n_power,
        tol: eq.options.tol,
        steps: reports,
        halted,
        timings_s: timings,
    };
    write_json(dir.join("trace.json"), &report)?;
    Ok(report)
}
