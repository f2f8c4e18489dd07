//! Command-line front end for `specrank`.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric error.

pub mod input;
pub mod output;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use specrank::{
    AnalysisOptions, Binning, ErrorCategory, Group, LogBase, Metric, MonitorConfig, MonteCarloConfig,
    OrdinalDescriptor, RankDirection, Signal64, Truncation,
};
use thiserror::Error;

use crate::input::{read_signal, InputError};
use crate::output::AnalyzeReport;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }

    fn from_core(err: specrank::Error, context: Option<&Path>) -> Self {
        let msg = match context {
            Some(p) => format!("{}: {err}", p.display()),
            None => err.to_string(),
        };
        match err.category() {
            ErrorCategory::Parameter => CliError::Usage(msg),
            ErrorCategory::Data => CliError::Data(msg),
            ErrorCategory::Numeric => CliError::Numeric(msg),
        }
    }
}

impl From<specrank::Error> for CliError {
    fn from(err: specrank::Error) -> Self {
        CliError::from_core(err, None)
    }
}

impl From<InputError> for CliError {
    fn from(err: InputError) -> Self {
        match err {
            InputError::Signal { path, source } => CliError::from_core(source, Some(&path)),
            other => CliError::Data(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "specrank", version, about = "Rank-based descriptors of signal power spectra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Descriptors of a whole signal.
    Analyze(AnalyzeArgs),
    /// Sliding-window descriptor trace with local-energy monitoring values.
    Monitor(MonitorArgs),
    /// Null distribution of a descriptor over random permutations.
    Nulldist(NullArgs),
    /// Pairwise rank-sum tests between groups of signals (one directory per group).
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Desc,
    Asc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LogBaseArg {
    E,
    #[value(name = "2")]
    Two,
    #[value(name = "10")]
    Ten,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DescriptorArg {
    Cid,
    Cod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Cid,
    Cod,
    Entropy,
    All,
}

#[derive(Debug, Args)]
pub struct AnalysisArgs {
    /// Energy fraction retained by the truncation, in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    /// Use every spectrum bin regardless of `--q`.
    #[arg(long)]
    pub no_truncate: bool,
    #[arg(long, value_enum, default_value_t = DirectionArg::Desc)]
    pub rank_direction: DirectionArg,
    /// Logarithm base of the spectral entropy.
    #[arg(long, value_enum, default_value_t = LogBaseArg::E)]
    pub log_base: LogBaseArg,
}

impl AnalysisArgs {
    fn options(&self) -> Result<AnalysisOptions<f64>, CliError> {
        let opts = AnalysisOptions {
            truncation: if self.no_truncate { Truncation::None } else { Truncation::EnergyQuantile(self.q) },
            direction: match self.rank_direction {
                DirectionArg::Desc => RankDirection::Descending,
                DirectionArg::Asc => RankDirection::Ascending,
            },
            log_base: match self.log_base {
                LogBaseArg::E => LogBase::E,
                LogBaseArg::Two => LogBase::Two,
                LogBaseArg::Ten => LogBase::Ten,
            },
        };
        opts.validate()?;
        Ok(opts)
    }
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// WAV channel to read (0-based).
    #[arg(long, default_value_t = 0)]
    pub channel: usize,
    /// Subtract the sample mean before analysis.
    #[arg(long)]
    pub demean: bool,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Signal file (.csv/.txt with one sample per line, or 16-bit PCM .wav).
    pub input: PathBuf,
    #[command(flatten)]
    pub analysis: AnalysisArgs,
    #[command(flatten)]
    pub input_opts: InputArgs,
    /// Also report the eigenvalues of the rank distance matrix.
    #[arg(long)]
    pub eigen: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MonitorArgs {
    /// Signal file (.csv/.txt or 16-bit PCM .wav).
    pub input: PathBuf,
    /// Analysis window in samples (even, >= 4).
    #[arg(long)]
    pub window: usize,
    #[arg(long, default_value_t = 1)]
    pub step: usize,
    /// Local-energy window in samples; defaults to the analysis window.
    #[arg(long)]
    pub le_window: Option<usize>,
    #[command(flatten)]
    pub analysis: AnalysisArgs,
    #[command(flatten)]
    pub input_opts: InputArgs,
    /// Worker threads (output does not depend on this).
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NullArgs {
    /// Permutation length.
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = DescriptorArg::Cid)]
    pub descriptor: DescriptorArg,
    #[arg(long, default_value_t = 640_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Enumerate all n! permutations instead of sampling (n <= 10).
    #[arg(long)]
    pub exact: bool,
    /// Fixed histogram bin count instead of the Freedman-Diaconis rule.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Worker threads (output does not depend on this).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Summary JSON path; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Histogram CSV path; defaults to `<output stem>.histogram.csv` next to `--output`.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Directory holding one sub-directory of signal files per group.
    pub root: PathBuf,
    #[arg(long, value_enum, default_value_t = MetricArg::All)]
    pub metric: MetricArg,
    #[command(flatten)]
    pub analysis: AnalysisArgs,
    #[command(flatten)]
    pub input_opts: InputArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

fn emit(output: Option<&Path>, body: &str) -> Result<(), CliError> {
    match output {
        Some(p) => fs::write(p, body).map_err(|e| CliError::Data(format!("{}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn load(path: &Path, opts: &InputArgs, even: bool) -> Result<Signal64, CliError> {
    let mut signal = read_signal(path, opts.channel)?;
    if even && signal.truncate_to_even() {
        eprintln!("warning: {}: odd length, dropped the final sample", path.display());
    }
    if opts.demean {
        signal.remove_mean();
    }
    Ok(signal)
}

fn analyze_file(path: &Path, opts: &InputArgs, analysis: &AnalysisOptions<f64>) -> Result<(Signal64, specrank::DescriptorSet64), CliError> {
    let signal = load(path, opts, true)?;
    let d = specrank::analyze_with(&signal, analysis).map_err(|e| CliError::from_core(e, Some(path)))?;
    Ok((signal, d))
}

fn run_analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let opts = args.analysis.options()?;
    let (signal, d) = analyze_file(&args.input, &args.input_opts, &opts)?;
    let eigen = if args.eigen {
        let spectrum = specrank::power_spectrum(&signal)?;
        let perm = specrank::rank_spectrum_with(&spectrum, opts.direction)?;
        Some(specrank::distance_matrix_eigenvalues::<f64>(&specrank::distance_matrix(&perm))?)
    } else {
        None
    };
    let report = AnalyzeReport::new(args.input.display().to_string(), signal.len(), d, eigen);
    let body = match args.format {
        Format::Json => output::to_json(&report),
        Format::Csv => output::analyze_csv(std::slice::from_ref(&report)),
    };
    emit(args.output.as_deref(), &body)
}

fn run_monitor(args: &MonitorArgs) -> Result<(), CliError> {
    let cfg = MonitorConfig {
        window: args.window,
        step: args.step,
        le_window: args.le_window.unwrap_or(args.window),
        analysis: args.analysis.options()?,
        threads: args.threads,
    };
    cfg.validate()?;
    let signal = load(&args.input, &args.input_opts, false)?;
    let trace = specrank::sliding_descriptors(&signal, &cfg).map_err(|e| CliError::from_core(e, Some(&args.input)))?;
    let body = match args.format {
        Format::Csv => output::monitor_csv(&trace),
        Format::Json => output::monitor_json(&trace),
    };
    emit(args.output.as_deref(), &body)
}

fn run_nulldist(args: &NullArgs) -> Result<(), CliError> {
    let descriptor = match args.descriptor {
        DescriptorArg::Cid => OrdinalDescriptor::Cid,
        DescriptorArg::Cod => OrdinalDescriptor::Cod,
    };
    let binning = args.bins.map_or(Binning::FreedmanDiaconis, Binning::Fixed);
    let summary = if args.exact {
        specrank::enumerate_null_exact_with::<f64>(args.n, descriptor, binning)?
    } else {
        let cfg = MonteCarloConfig { n: args.n, trials: args.trials, seed: args.seed, threads: args.threads };
        specrank::sample_null_with::<f64>(&cfg, descriptor, binning)?.summary
    };
    emit(args.output.as_deref(), &output::to_json(&summary))?;
    let histogram_path = args.histogram.clone().or_else(|| {
        args.output.as_ref().map(|p| {
            let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            p.with_file_name(format!("{stem}.histogram.csv"))
        })
    });
    if let Some(p) = histogram_path {
        emit(Some(&p), &output::histogram_csv(&summary))?;
    }
    Ok(())
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut entries = fs::read_dir(dir)
        .and_then(|rd| rd.map(|e| e.map(|e| e.path())).collect::<Result<Vec<_>, _>>())
        .map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
    entries.sort();
    Ok(entries)
}

fn is_signal_file(path: &Path) -> bool {
    path.is_file()
        && path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| ["csv", "txt", "wav"].iter().any(|x| e.eq_ignore_ascii_case(x)))
}

fn run_compare(args: &CompareArgs) -> Result<(), CliError> {
    let opts = args.analysis.options()?;
    let group_dirs: Vec<PathBuf> = sorted_entries(&args.root)?.into_iter().filter(|p| p.is_dir()).collect();
    if group_dirs.len() < 2 {
        return Err(CliError::Usage(format!(
            "{}: need at least 2 group directories, found {}",
            args.root.display(),
            group_dirs.len()
        )));
    }
    let mut groups = Vec::with_capacity(group_dirs.len());
    for dir in &group_dirs {
        let name = dir.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let members = sorted_entries(dir)?
            .into_iter()
            .filter(|p| is_signal_file(p))
            .map(|p| analyze_file(&p, &args.input_opts, &opts).map(|(_, d)| d))
            .collect::<Result<Vec<_>, _>>()?;
        groups.push(Group::new(name, members));
    }
    let metrics: Vec<Metric> = match args.metric {
        MetricArg::Cid => vec![Metric::Cid],
        MetricArg::Cod => vec![Metric::Cod],
        MetricArg::Entropy => vec![Metric::Entropy],
        MetricArg::All => Metric::ALL.to_vec(),
    };
    let tables = metrics
        .into_iter()
        .map(|m| specrank::group_compare(&groups, m))
        .collect::<Result<Vec<_>, _>>()?;
    let body = match args.format {
        Format::Csv => output::pairwise_csv(&tables),
        Format::Json => output::to_json(&tables),
    };
    emit(args.output.as_deref(), &body)
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Analyze(a) => run_analyze(a),
        Command::Monitor(a) => run_monitor(a),
        Command::Nulldist(a) => run_nulldist(a),
        Command::Compare(a) => run_compare(a),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
