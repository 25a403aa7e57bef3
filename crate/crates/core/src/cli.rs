//! Command line front end: `run`, `sweep` and `info`.
//!
//! Exit codes: 0 success, 2 usage error, 3 input-data error, 4 runtime error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::annealer::{derive_schedule, Algorithm, AlgorithmConfig, DEFAULT_ALPHA, DEFAULT_P_STALL};
use crate::engine::{Engine, ExperimentSpec, ExperimentSummary, SweepAxis, DEFAULT_CYCLES, DEFAULT_TRIALS};
use crate::error::Error;
use crate::gset::{BestKnownRegistry, GsetFile};
use crate::pbit::{VariabilityConfig, DEFAULT_T_RES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

pub const SUMMARY_COLUMNS: [&str; 13] = [
    "graph",
    "algo",
    "sigma_lambda",
    "sigma_delta",
    "sigma_nu",
    "cycles",
    "trials",
    "seed",
    "mean_cut",
    "std_cut",
    "normalized_mean_cut",
    "mean_final_energy",
    "anneal_seconds",
];

pub const SWEEP_COLUMNS: [&str; 2] = ["axis", "axis_value"];

pub const TRACE_COLUMNS: [&str; 5] = ["trial", "cycle", "i0", "energy", "cut"];

#[derive(Debug, Parser)]
#[command(name = "pbit-anneal", version, about = "p-bit simulated annealing with device variability")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a batch of annealing trials on one graph.
    Run(RunArgs),
    /// Repeat a batch for several values of one variability parameter.
    Sweep(SweepArgs),
    /// Print graph statistics and the derived annealing schedule.
    Info(InfoArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Psa,
    Tapsa,
    Spsa,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Psa => Algorithm::Psa,
            AlgoArg::Tapsa => Algorithm::Tapsa,
            AlgoArg::Spsa => Algorithm::Spsa,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    SigmaLambda,
    SigmaDelta,
    SigmaNu,
}

impl From<AxisArg> for SweepAxis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::SigmaLambda => SweepAxis::SigmaLambda,
            AxisArg::SigmaDelta => SweepAxis::SigmaDelta,
            AxisArg::SigmaNu => SweepAxis::SigmaNu,
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct RunArgs {
    /// G-set file; the graph is named after the file stem.
    #[arg(long)]
    pub graph: PathBuf,
    /// Best-known cut registry (`name value` lines).
    #[arg(long)]
    pub registry: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = AlgoArg::Tapsa)]
    pub algo: AlgoArg,
    #[arg(long, default_value_t = DEFAULT_CYCLES)]
    pub cycles: usize,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    #[arg(long, default_value_t = 0.0)]
    pub sigma_lambda: f64,
    #[arg(long, default_value_t = 0.0)]
    pub sigma_delta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub sigma_nu: f64,
    /// Sub-steps per annealing cycle.
    #[arg(long, default_value_t = DEFAULT_T_RES)]
    pub t_res: u32,
    /// TApSA averaging window.
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: usize,
    /// SpSA stall probability.
    #[arg(long, default_value_t = DEFAULT_P_STALL)]
    pub p_stall: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Per-cycle trace CSV (trial, cycle, i0, energy, cut).
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
    /// Summary CSV.
    #[arg(long)]
    pub summary_out: Option<PathBuf>,
    /// Share one device realisation across all trials instead of resampling.
    #[arg(long)]
    pub fixed_variability: bool,
    /// Leave the anneal_seconds column empty so outputs are byte-reproducible.
    #[arg(long)]
    pub omit_timing: bool,
}

#[derive(Clone, Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_enum)]
    pub axis: AxisArg,
    /// Comma-separated values, e.g. `0,0.5,1`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, Args)]
pub struct InfoArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = DEFAULT_CYCLES)]
    pub cycles: usize,
    #[arg(long, default_value_t = DEFAULT_T_RES)]
    pub t_res: u32,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Input(_) => EXIT_INPUT,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) => CliError::Usage(e.to_string()),
            Error::Schedule(_) => CliError::Input(e.to_string()),
            ref other if other.is_input_error() => CliError::Input(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

fn runtime(context: &str, path: &Path, e: io::Error) -> CliError {
    CliError::Runtime(format!("{context} {}: {e}", path.display()))
}

impl RunArgs {
    fn spec(&self, graph: &str) -> Result<ExperimentSpec, CliError> {
        let algo = AlgorithmConfig::new(self.algo.into())
            .with_alpha(self.alpha)
            .with_p_stall(self.p_stall);
        let mut spec = ExperimentSpec::new(graph, algo);
        spec.variability = VariabilityConfig::new(self.sigma_lambda, self.sigma_delta, self.sigma_nu, self.t_res)?;
        spec.cycles = self.cycles;
        spec.trials = self.trials;
        spec.base_seed = self.seed;
        spec.threads = self.threads;
        spec.resample_variability = !self.fixed_variability;
        spec.validate()?;
        Ok(spec)
    }

    fn load(&self) -> Result<(Engine, String), CliError> {
        let file = GsetFile::open(&self.graph)?;
        let registry = match &self.registry {
            Some(p) => Some(BestKnownRegistry::open(p)?),
            None => None,
        };
        let mut engine = Engine::new();
        engine.add_gset(&file, registry.as_ref())?;
        Ok((engine, file.name))
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One summary CSV record in [`SUMMARY_COLUMNS`] order.
pub fn summary_record(s: &ExperimentSummary, omit_timing: bool) -> Vec<String> {
    let v = &s.spec.variability;
    vec![
        s.spec.graph.clone(),
        s.spec.algo.kind.name().to_string(),
        v.sigma_lambda.to_string(),
        v.sigma_delta.to_string(),
        v.sigma_nu.to_string(),
        s.spec.cycles.to_string(),
        s.spec.trials.to_string(),
        s.spec.base_seed.to_string(),
        s.stats.mean_cut.to_string(),
        s.stats.std_cut.to_string(),
        fmt_opt(s.stats.normalized_mean_cut),
        s.stats.mean_final_energy.to_string(),
        if omit_timing {
            String::new()
        } else {
            s.anneal_seconds.to_string()
        },
    ]
}

/// Writes a header and one row per summary; `axis` appends the sweep columns.
pub fn write_summary_csv<W: Write>(
    out: W,
    summaries: &[ExperimentSummary],
    axis: Option<SweepAxis>,
    omit_timing: bool,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = SUMMARY_COLUMNS.to_vec();
    if axis.is_some() {
        header.extend(SWEEP_COLUMNS);
    }
    w.write_record(&header)?;
    for s in summaries {
        let mut rec = summary_record(s, omit_timing);
        if let Some(axis) = axis {
            let v = &s.spec.variability;
            let value = match axis {
                SweepAxis::SigmaLambda => v.sigma_lambda,
                SweepAxis::SigmaDelta => v.sigma_delta,
                SweepAxis::SigmaNu => v.sigma_nu,
            };
            rec.push(axis.name().to_string());
            rec.push(value.to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Per-cycle rows for every trial of every summary, in trial order.
pub fn write_trace_csv<W: Write>(out: W, summaries: &[ExperimentSummary]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_COLUMNS)?;
    for s in summaries {
        for (trial, r) in s.results.iter().enumerate() {
            for rec in &r.trace {
                w.write_record([
                    trial.to_string(),
                    rec.cycle.to_string(),
                    rec.i0.to_string(),
                    rec.energy.to_string(),
                    rec.cut.to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn write_outputs(
    args: &RunArgs,
    summaries: &[ExperimentSummary],
    axis: Option<SweepAxis>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    if let Some(path) = &args.summary_out {
        let f = File::create(path).map_err(|e| runtime("creating", path, e))?;
        write_summary_csv(BufWriter::new(f), summaries, axis, args.omit_timing)
            .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))?;
    }
    if let Some(path) = &args.trace_out {
        let f = File::create(path).map_err(|e| runtime("creating", path, e))?;
        write_trace_csv(BufWriter::new(f), summaries)
            .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))?;
    }
    write_summary_csv(&mut *stdout, summaries, axis, args.omit_timing)
        .map_err(|e| CliError::Runtime(format!("writing standard output: {e}")))
}

pub fn cmd_run(args: &RunArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (engine, name) = args.load()?;
    let spec = args.spec(&name)?;
    let summary = engine.run_trials(&spec)?;
    write_outputs(args, std::slice::from_ref(&summary), None, stdout)
}

pub fn cmd_sweep(args: &SweepArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (engine, name) = args.run.load()?;
    let spec = args.run.spec(&name)?;
    let mut values = args.values.clone();
    values.sort_by(f64::total_cmp);
    let axis: SweepAxis = args.axis.into();
    let summaries = engine.sweep(&spec, axis, &values)?;
    write_outputs(&args.run, &summaries, Some(axis), stdout)
}

pub fn cmd_info(args: &InfoArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let file = GsetFile::open(&args.graph)?;
    let graph = file.to_graph()?;
    let model = graph.to_ising();
    let weights: Vec<String> = graph.weight_set().iter().map(|w| format!("{w:+}")).collect();
    let io_err = |e: io::Error| CliError::Runtime(format!("writing standard output: {e}"));
    writeln!(stdout, "graph: {}", file.name).map_err(io_err)?;
    writeln!(stdout, "n: {}", file.n).map_err(io_err)?;
    writeln!(stdout, "m: {}", file.m).map_err(io_err)?;
    writeln!(stdout, "weights: {{{}}}", weights.join(", ")).map_err(io_err)?;
    let schedule = derive_schedule(&model, args.cycles, args.t_res)?;
    writeln!(stdout, "cycles: {}", args.cycles).map_err(io_err)?;
    writeln!(stdout, "t_res: {}", args.t_res).map_err(io_err)?;
    writeln!(stdout, "i0_min: {}", schedule.i0_min).map_err(io_err)?;
    writeln!(stdout, "i0_max: {}", schedule.i0_max).map_err(io_err)?;
    writeln!(stdout, "i0_max/i0_min: {:.1}", schedule.i0_max / schedule.i0_min).map_err(io_err)?;
    writeln!(stdout, "beta: {}", schedule.beta).map_err(io_err)?;
    Ok(())
}

/// Parses `args`, dispatches, prints errors to stderr and returns the exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = write!(stderr, "{e}");
            return code;
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a, stdout),
        Command::Sweep(a) => cmd_sweep(a, stdout),
        Command::Info(a) => cmd_info(a, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}
