//! Command handlers behind the `cocaco` binary.
//!
//! Exit codes: 0 success, 2 config unreadable, 3 validation, 4 output unwritable.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::channel::shared_uplink_rate;
use crate::config::{self, ConfigError};
use crate::offload::{decide, LinkProfile};
use crate::report;
use crate::sim::{experiment_fig3, experiment_fig4};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_OUTPUT: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "cocaco", version, about = "Edge/cloud offloading simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide where a single task should run and print the two branch delays.
    Decide {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run one scenario and write per-task delays.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV; falls back to `output.path`, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write one row per cache lookup to `<out stem>.trace.csv`.
        #[arg(long)]
        trace_cache: bool,
    },
    /// Run a paired-mode sweep (fig3: image width, fig4: concurrent users).
    Sweep {
        #[arg(long)]
        experiment: String,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Whitespace-delimited data file; defaults to `<out stem>.dat`.
        #[arg(long, num_args = 0..=1)]
        plot_data: Option<Option<PathBuf>>,
    },
}

enum Failure {
    Config(ConfigError),
    Validation(String),
    Output(PathBuf, std::io::Error),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(ConfigError::Io { .. }) => EXIT_IO,
            Failure::Config(_) | Failure::Validation(_) => EXIT_VALIDATION,
            Failure::Output(..) => EXIT_OUTPUT,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Config(e) => e.to_string(),
            Failure::Validation(m) => m.clone(),
            Failure::Output(p, e) => format!("cannot write {}: {e}", p.display()),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<crate::ModelError> for Failure {
    fn from(e: crate::ModelError) -> Self {
        Failure::Config(e.into())
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Decide { config } => cmd_decide(&config, stdout),
        Command::Run {
            config,
            out,
            trace_cache,
        } => cmd_run(&config, out, trace_cache, stdout),
        Command::Sweep {
            experiment,
            config,
            out,
            plot_data,
        } => cmd_sweep(&experiment, &config, out, plot_data, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            f.exit_code()
        }
    }
}

fn emit(path: Option<&Path>, contents: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => {
            report::write_atomic(p, contents).map_err(|e| Failure::Output(p.to_path_buf(), e))
        }
        None => stdout
            .write_all(contents.as_bytes())
            .map_err(|e| Failure::Output(PathBuf::from("<stdout>"), e)),
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn cmd_decide(config_path: &Path, stdout: &mut dyn Write) -> Result<(), Failure> {
    let cfg = config::load(config_path)?;
    let task = cfg.task.as_ref().ok_or_else(|| {
        Failure::Validation("invalid value for `task`: section [task] is required".into())
    })?;
    let link = LinkProfile {
        uplink_rate_bps: shared_uplink_rate(&cfg.channel, cfg.scenario.n_users)?,
        downlink_rate_bps: cfg.link.downlink_rate_bps,
        backhaul_latency_s: cfg.link.backhaul_latency_s,
    };
    let mut store = cfg.initial_cache()?;
    let outcome = decide(task, &mut store, &link, &cfg.edge, &cfg.cloud)?;
    emit(
        None,
        &report::decide_csv(&outcome, cfg.output.precision),
        stdout,
    )
}

fn cmd_run(
    config_path: &Path,
    out: Option<PathBuf>,
    trace_cache: bool,
    stdout: &mut dyn Write,
) -> Result<(), Failure> {
    let cfg = config::load(config_path)?;
    let scenario = cfg.scenario()?;
    let out = out.or_else(|| cfg.output.path.clone());
    let trace_path = if trace_cache || cfg.output.trace_cache {
        match &out {
            Some(p) => Some(sibling(p, ".trace.csv")),
            None => {
                return Err(Failure::Validation(
                    "cache tracing needs an output path (--out or output.path)".into(),
                ))
            }
        }
    } else {
        None
    };
    let metrics = scenario.run()?;
    let precision = cfg.output.precision;
    emit(
        out.as_deref(),
        &report::run_csv(&metrics, precision),
        stdout,
    )?;
    if let Some(tp) = trace_path {
        emit(
            Some(&tp),
            &report::trace_csv(&metrics.cache_trace, precision),
            stdout,
        )?;
    }
    Ok(())
}

fn cmd_sweep(
    experiment: &str,
    config_path: &Path,
    out: Option<PathBuf>,
    plot_data: Option<Option<PathBuf>>,
    stdout: &mut dyn Write,
) -> Result<(), Failure> {
    let x_label = match experiment {
        "fig3" => "image_width_px",
        "fig4" => "n_users",
        other => {
            return Err(Failure::Validation(format!(
                "unknown experiment `{other}` (expected fig3 or fig4)"
            )))
        }
    };
    let cfg = config::load(config_path)?;
    let base = cfg.scenario()?;
    let out = out.or_else(|| cfg.output.path.clone());
    let plot_path = match plot_data {
        None => None,
        Some(Some(p)) => Some(p),
        Some(None) => match &out {
            Some(p) => Some(sibling(p, ".dat")),
            None => {
                return Err(Failure::Validation(
                    "--plot-data needs a path or --out".into(),
                ))
            }
        },
    };
    let rows = if experiment == "fig3" {
        experiment_fig3(&base)?
    } else {
        experiment_fig4(&base)?
    };
    let precision = cfg.output.precision;
    emit(out.as_deref(), &report::sweep_csv(&rows, precision), stdout)?;
    if let Some(pp) = plot_path {
        emit(
            Some(&pp),
            &report::plot_data(&rows, x_label, precision),
            stdout,
        )?;
    }
    Ok(())
}
