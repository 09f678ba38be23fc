use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use subdiv_l1::analysis::{basic_limit_levels, limit_support_width, support_width};
use subdiv_l1::datagen::{add_noise, add_noise_grid, sample, torus_grid, NoiseSpec, TestFunction};
use subdiv_l1::refine1d::subdivide_with;
use subdiv_l1::refine2d::subdivide_2d_with;
use subdiv_l1::{ControlPolygon, Execution, FitStats, Topology};
use subdiv_l1_cli::args::{
    execution_for, parse_grid_outliers, parse_outliers, threads_from_env, BoundaryArg, Domain, SchemeArg,
    WeightingArg,
};
use subdiv_l1_cli::experiment::{self, SUPPORT_TOL};
use subdiv_l1_cli::io::{read_curve_csv, read_grid_csv, write_curve_csv, write_grid_csv, write_obj};
use subdiv_l1_cli::manifest::{builtin, ExperimentManifest, SchemeEntry, BUILTIN_NAMES};
use subdiv_l1_cli::{CliError, CliResult, EXIT_USAGE};

/// Robust local-regression subdivision of curves and surfaces.
///
/// Set SUBDIV_L1_THREADS to cap refinement parallelism (0 = automatic,
/// 1 = sequential).
#[derive(Parser)]
#[command(name = "subdiv-l1", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Refine a curve given as CSV or sampled from a test function.
    FitCurve(FitCurve),
    /// Refine a grid surface given as CSV or the built-in torus.
    FitSurface(FitSurface),
    /// Refine the unit impulse and report the support of the basic limit.
    BasicLimit(BasicLimit),
    /// Run a built-in or file-based experiment manifest.
    Experiment(Experiment),
}

#[derive(Args)]
struct SchemeOpts {
    /// Stencil and degree, e.g. "2n=10,d=3" or "2n+1=11,d=2".
    #[arg(long, default_value = "2n=4,d=1")]
    scheme: SchemeArg,
    #[arg(long, default_value_t = 2)]
    arity: usize,
    #[arg(long, default_value_t = 3)]
    levels: usize,
    #[arg(long, default_value_t = 1e-4)]
    delta: f64,
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    #[arg(long, default_value_t = 6)]
    max_iters: usize,
    #[arg(long, value_enum, default_value_t)]
    boundary: BoundaryArg,
    /// `unit` forces constant weights (the linear least squares scheme).
    #[arg(long, value_enum, default_value_t)]
    weighting: WeightingArg,
    /// Exit with status 1 if any local fit stopped at the iteration cap.
    #[arg(long)]
    require_convergence: bool,
}

impl SchemeOpts {
    fn entry(&self) -> SchemeEntry {
        SchemeEntry {
            points: self.scheme.points,
            degree: self.scheme.degree,
            weighting: self.weighting,
            arity: self.arity,
            boundary: self.boundary,
            delta: self.delta,
            epsilon: self.epsilon,
            max_iters: self.max_iters,
        }
    }
}

#[derive(Args)]
struct NoiseOpts {
    /// Standard deviation of added Gaussian noise.
    #[arg(long, default_value_t = 0.0)]
    noise_sigma: f64,
    /// Offsets added after the noise: "i:off,..." (curves) or
    /// "i:j:off,..." (surfaces).
    #[arg(long)]
    outliers: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct FitCurve {
    /// CSV with one control point per row.
    #[arg(long, conflicts_with = "function")]
    input: Option<PathBuf>,
    /// Test function g1..g6.
    #[arg(long)]
    function: Option<String>,
    #[arg(long, default_value = "0:10", allow_hyphen_values = true)]
    domain: Domain,
    #[arg(long, default_value_t = 30)]
    samples: usize,
    /// Treat the input as a closed polygon.
    #[arg(long)]
    closed: bool,
    #[command(flatten)]
    scheme: SchemeOpts,
    #[command(flatten)]
    noise: NoiseOpts,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Where to write the JSON summary; printed to standard output when
    /// `--output` is a file.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct FitSurface {
    /// CSV with rows `i, j, c0, ...`.
    #[arg(long, conflicts_with = "function")]
    input: Option<PathBuf>,
    /// Only `torus` is available.
    #[arg(long)]
    function: Option<String>,
    /// Torus resolution per axis.
    #[arg(long, default_value_t = 24)]
    samples: usize,
    /// Torus radii `c1:c2`.
    #[arg(long, default_value = "2:5", allow_hyphen_values = true)]
    radii: Domain,
    #[command(flatten)]
    scheme: SchemeOpts,
    #[command(flatten)]
    noise: NoiseOpts,
    /// Output file; `.obj` selects Wavefront OBJ, anything else CSV.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct BasicLimit {
    #[arg(long, default_value = "2n=10,d=1")]
    scheme: SchemeArg,
    #[arg(long, default_value_t = 6)]
    levels: usize,
    #[arg(long, default_value_t = 1e-4)]
    delta: f64,
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    #[arg(long, default_value_t = 6)]
    max_iters: usize,
    /// Zeros on each side of the impulse; defaults to 4n.
    #[arg(long)]
    padding: Option<usize>,
    #[arg(long, default_value_t = SUPPORT_TOL)]
    tol: f64,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct Experiment {
    /// Built-in experiment name (see --list).
    #[arg(conflicts_with = "manifest")]
    name: Option<String>,
    /// JSON manifest file.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Directory receiving data files, manifest.json and metrics.json.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Print the built-in experiment names.
    #[arg(long)]
    list: bool,
    /// Print the resolved manifest instead of running it.
    #[arg(long)]
    print_manifest: bool,
}

#[derive(Serialize)]
struct Summary {
    scheme: String,
    levels: usize,
    points: usize,
    fits: usize,
    iterations: usize,
    non_converged: usize,
    ill_conditioned: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    rms_to_reference: Option<f64>,
}

impl Summary {
    fn new(scheme: String, levels: usize, points: usize, stats: &[FitStats]) -> Self {
        let t = stats.iter().copied().fold(FitStats::default(), FitStats::merge);
        Summary {
            scheme,
            levels,
            points,
            fits: t.fits,
            iterations: t.iterations,
            non_converged: t.fits - t.converged,
            ill_conditioned: t.ill_conditioned,
            rms_to_reference: None,
        }
    }
}

fn create(path: &PathBuf) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

fn emit_summary<S: Serialize>(summary: &S, path: Option<&PathBuf>, to_stdout: bool) -> CliResult<()> {
    let text = serde_json::to_string_pretty(summary).expect("summary serialises") + "\n";
    match path {
        Some(p) => create(p)?
            .write_all(text.as_bytes())
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", p.display()))),
        None if to_stdout => {
            print!("{text}");
            Ok(())
        }
        None => Ok(()),
    }
}

fn check_convergence(opts: &SchemeOpts, summary: &Summary) -> CliResult<()> {
    if opts.require_convergence && summary.non_converged > 0 {
        return Err(CliError::numerical(format!(
            "{} of {} local fits hit the iteration cap of {}",
            summary.non_converged, summary.fits, opts.max_iters
        )));
    }
    Ok(())
}

fn fit_curve(cmd: FitCurve, exec: Execution) -> CliResult<()> {
    let entry = cmd.scheme.entry();
    let spec = entry.curve_spec()?;
    let (clean, reference) = match (&cmd.input, &cmd.function) {
        (Some(path), _) => (read_curve_csv(path)?, None),
        (None, Some(name)) => {
            let f = TestFunction::from_name(name)?;
            (sample(f, (cmd.domain.0, cmd.domain.1), cmd.samples)?, Some(f))
        }
        (None, None) => return Err(CliError::usage("fit-curve needs --input or --function")),
    };
    let clean = if cmd.closed { clean.with_topology(Topology::Closed) } else { clean };
    let outliers = parse_outliers(cmd.noise.outliers.as_deref().unwrap_or("")).map_err(CliError::usage)?;
    let data = add_noise(&clean, &NoiseSpec::new(cmd.noise.noise_sigma, cmd.noise.seed).with_outliers(outliers))?;

    let (polys, stats) = subdivide_with(&data, &spec, cmd.scheme.levels, exec)?;
    let fine: &ControlPolygon<f64> = polys.last().expect("level 0 present");
    match &cmd.output {
        Some(path) => write_curve_csv(create(path)?, fine)?,
        None => write_curve_csv(io::stdout().lock(), fine)?,
    }
    let mut summary = Summary::new(entry.label(), cmd.scheme.levels, fine.len(), &stats);
    if let Some(f) = reference {
        let sq: f64 = fine.params().iter().zip(fine.values()).map(|(&t, &v)| (v - f.eval(t)).powi(2)).sum();
        summary.rms_to_reference = Some((sq / fine.len().max(1) as f64).sqrt());
    }
    emit_summary(&summary, cmd.summary.as_ref(), cmd.output.is_some())?;
    check_convergence(&cmd.scheme, &summary)
}

fn fit_surface(cmd: FitSurface, exec: Execution) -> CliResult<()> {
    let entry = cmd.scheme.entry();
    let spec = entry.surface_spec()?;
    let mut torus = None;
    let clean = match (&cmd.input, cmd.function.as_deref()) {
        (Some(path), _) => read_grid_csv(path)?,
        (None, Some("torus")) => {
            torus = Some((cmd.radii.0, cmd.radii.1));
            torus_grid(cmd.radii.0, cmd.radii.1, (cmd.samples, cmd.samples))?
        }
        (None, Some(other)) => return Err(CliError::usage(format!("unknown surface {other:?}; available: torus"))),
        (None, None) => return Err(CliError::usage("fit-surface needs --input or --function torus")),
    };
    let outliers = parse_grid_outliers(cmd.noise.outliers.as_deref().unwrap_or("")).map_err(CliError::usage)?;
    let data = add_noise_grid(&clean, &NoiseSpec::new(cmd.noise.noise_sigma, cmd.noise.seed).with_outliers(outliers))?;

    let (meshes, stats) = subdivide_2d_with(&data, &spec, cmd.scheme.levels, exec)?;
    let fine = meshes.last().expect("level 0 present");
    let obj = cmd.output.as_ref().is_some_and(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("obj")));
    match &cmd.output {
        Some(path) if obj => write_obj(create(path)?, fine)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?,
        Some(path) => write_grid_csv(create(path)?, fine)?,
        None => write_grid_csv(io::stdout().lock(), fine)?,
    }
    let mut summary = Summary::new(
        format!("D({})^2,{}", entry.points, entry.degree),
        cmd.scheme.levels,
        fine.rows() * fine.cols(),
        &stats,
    );
    if let Some((c1, c2)) = torus {
        summary.rms_to_reference = Some(subdiv_l1::datagen::torus_rms(fine, c1, c2));
    }
    emit_summary(&summary, cmd.summary.as_ref(), cmd.output.is_some())?;
    check_convergence(&cmd.scheme, &summary)
}

#[derive(Serialize)]
struct LimitSummary {
    scheme: String,
    levels: usize,
    tol: f64,
    support_width: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    limit_support_width: Option<f64>,
}

fn basic_limit(cmd: BasicLimit) -> CliResult<()> {
    let mut entry = SchemeEntry::new(cmd.scheme.points, cmd.scheme.degree);
    entry.delta = cmd.delta;
    entry.epsilon = cmd.epsilon;
    entry.max_iters = cmd.max_iters;
    let spec = entry.curve_spec()?;
    let padding = cmd.padding.unwrap_or(4 * spec.fit.n);
    let (_, levels) = basic_limit_levels(&spec, cmd.levels, padding)?;
    let last = levels.last().expect("level 0 present");
    let spacing = if last.len() > 1 { last.params[1] - last.params[0] } else { 1.0 };
    let poly = ControlPolygon::from_scalars(last.values.clone()).with_params(last.params[0], spacing);
    match &cmd.output {
        Some(path) => write_curve_csv(create(path)?, &poly)?,
        None => write_curve_csv(io::stdout().lock(), &poly)?,
    }
    let summary = LimitSummary {
        scheme: entry.label(),
        levels: cmd.levels,
        tol: cmd.tol,
        support_width: support_width(last, cmd.tol)?,
        limit_support_width: if levels.len() >= 2 { Some(limit_support_width(&levels, cmd.tol)?) } else { None },
    };
    emit_summary(&summary, cmd.summary.as_ref(), cmd.output.is_some())
}

fn run_experiment(cmd: Experiment, exec: Execution) -> CliResult<()> {
    if cmd.list {
        for name in BUILTIN_NAMES {
            println!("{name}\t{}", builtin(name)?.description);
        }
        return Ok(());
    }
    let manifest = match (&cmd.name, &cmd.manifest) {
        (Some(name), _) => builtin(name)?,
        (None, Some(path)) => ExperimentManifest::load(path)?,
        (None, None) => {
            return Err(CliError::usage(format!(
                "experiment needs a name or --manifest; available: {}",
                BUILTIN_NAMES.join(", ")
            )))
        }
    };
    if cmd.print_manifest {
        println!("{}", manifest.to_json());
        return Ok(());
    }
    let report = experiment::run(&manifest, exec)?;
    match &cmd.output {
        Some(dir) => report.write_to(dir),
        None => {
            println!("{}", report.metrics_json());
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let threads = threads_from_env()?;
    let exec = execution_for(threads);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::usage(format!("cannot start worker threads: {e}")))?;
    pool.install(|| match cli.command {
        Command::FitCurve(c) => fit_curve(c, exec),
        Command::FitSurface(c) => fit_surface(c, exec),
        Command::BasicLimit(c) => basic_limit(c),
        Command::Experiment(c) => run_experiment(c, exec),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
