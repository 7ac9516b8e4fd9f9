//! The `prokit` command line.
//!
//! [`run`] does all the work and returns the exit code with the text for
//! standard output and standard error, so tests can drive it in-process.

pub mod commands;
pub mod doc;
pub mod registry;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{error::ErrorKind, Parser, Subcommand};

use commands::{BackendArg, Body, CheckMode, FuzzArgs, MorphismOp, ReduceArgs, ReduceOp};
use report::{combined, status_code, CommandEcho, ErrorInfo, Failure, Report, Timing, EXIT_USAGE};

#[derive(Debug, Parser)]
#[command(name = "prokit", version, about = "Check and reduce delay-inverse systems")]
struct Cli {
    /// Human-readable summary on standard error.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Verify well-formedness and the delay or strict condition.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "delay")]
        mode: CheckMode,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Restrict, reindex, reduce to a sequence, or extract a strict subsequence.
    Reduce {
        file: PathBuf,
        #[arg(long, value_enum)]
        op: ReduceOp,
        /// `evens`, `ge:N` or `keys:{a,b,...}`.
        #[arg(long)]
        subset: Option<String>,
        /// First element for `--op extract`.
        #[arg(long)]
        start: Option<String>,
        #[arg(long)]
        horizon: Option<usize>,
        /// Also write the reduced system document here.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Check, specialize, level or invert a morphism document.
    Morphism {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "check")]
        op: MorphismOp,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Plant sequences and compare engine, oracle and plant.
    Fuzz {
        #[arg(long, default_value_t = 200)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        first_seed: u64,
        #[arg(long, default_value_t = 24)]
        len: usize,
        #[arg(long, value_enum, default_value = "finset")]
        backend: BackendArg,
        #[arg(long, default_value_t = 6)]
        max_points: usize,
        #[arg(long, default_value_t = 5)]
        modulus: u64,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 4)]
        max_extra: u64,
        #[arg(long)]
        horizon: Option<usize>,
        /// Corrupt the engine's answer at index 0 (harness self-test).
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Print a document in canonical form.
    Fmt {
        file: PathBuf,
        /// Exit 1 instead of printing when the file is not canonical.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Run one invocation. `args` includes the program name; `env_horizon` is
/// the value of `PROKIT_HORIZON`, if set.
pub fn run<I, T>(args: I, env_horizon: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    if let Command::Fmt { file, check } = &cli.command {
        return fmt(file, *check);
    }
    let echo = CommandEcho {
        name: command_name(&cli.command).to_string(),
        args: args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect(),
    };
    let started = Instant::now();
    let result = dispatch(&cli.command, env_horizon);
    let elapsed_ms = (started.elapsed().as_secs_f64() * 1e6).round() / 1e3;
    let (report, notes) = finish(echo, result, elapsed_ms);
    let mut stderr = String::new();
    for n in &notes {
        stderr.push_str(n);
        stderr.push('\n');
    }
    if let Some(e) = &report.error {
        stderr.push_str(&format!("error ({}): {}\n", e.kind, e.message));
    }
    if cli.verbose {
        stderr.push_str(&summary(&report));
    }
    if let (Command::Reduce { emit: Some(path), .. }, Some(out)) = (&cli.command, &report.output) {
        if let Err(e) = std::fs::write(path, doc::canonical(out)) {
            stderr.push_str(&format!("cannot write {}: {e}\n", path.display()));
        }
    }
    Outcome {
        code: report.exit_code,
        stdout: doc::canonical(&report),
        stderr,
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check { .. } => "check",
        Command::Reduce { .. } => "reduce",
        Command::Morphism { .. } => "morphism",
        Command::Fuzz { .. } => "fuzz",
        Command::Fmt { .. } => "fmt",
    }
}

fn dispatch(c: &Command, env: Option<&str>) -> Result<Body, Failure> {
    match c {
        Command::Check { file, mode, horizon } => commands::check(file, *mode, *horizon, env),
        Command::Reduce {
            file,
            op,
            subset,
            start,
            horizon,
            ..
        } => commands::reduce(
            file,
            ReduceArgs {
                op: *op,
                subset: subset.as_deref(),
                start: start.as_deref(),
                horizon: *horizon,
            },
            env,
        ),
        Command::Morphism { file, op, horizon } => commands::morphism(file, *op, *horizon, env),
        Command::Fuzz {
            seeds,
            first_seed,
            len,
            backend,
            max_points,
            modulus,
            dim,
            max_extra,
            horizon,
            inject_fault,
        } => commands::fuzz(
            &FuzzArgs {
                seeds: *seeds,
                first_seed: *first_seed,
                len: *len,
                backend: *backend,
                max_points: *max_points,
                modulus: *modulus,
                dim: *dim,
                max_extra: *max_extra,
                horizon: *horizon,
                inject_fault: *inject_fault,
            },
            env,
        ),
        Command::Fmt { .. } => unreachable!("handled before dispatch"),
    }
}

fn finish(command: CommandEcho, result: Result<Body, Failure>, elapsed_ms: f64) -> (Report, Vec<String>) {
    let timing = Timing { elapsed_ms };
    match result {
        Ok(body) => {
            let status = body.status.unwrap_or_else(|| combined(&body.verdicts));
            let report = Report {
                command,
                horizon: body.horizon,
                outcome: status.to_string(),
                exit_code: status_code(status),
                verdicts: body.verdicts,
                details: body.details,
                output: body.output,
                error: None,
                timing,
            };
            (report, body.notes)
        }
        Err(f) => (
            Report {
                command,
                horizon: None,
                outcome: "error".into(),
                exit_code: f.code,
                verdicts: Vec::new(),
                details: None,
                output: None,
                error: Some(ErrorInfo {
                    kind: f.kind.to_string(),
                    message: f.message,
                }),
                timing,
            },
            Vec::new(),
        ),
    }
}

fn summary(r: &Report) -> String {
    let mut s = format!(
        "prokit {}: {} (exit {}) in {:.3} ms",
        r.command.name, r.outcome, r.exit_code, r.timing.elapsed_ms
    );
    if let Some(h) = r.horizon {
        s.push_str(&format!(", horizon {h}"));
    }
    s.push('\n');
    for v in &r.verdicts {
        let mode = match v.verdict.mode {
            prokit_core::Mode::Exact => "exact".to_string(),
            prokit_core::Mode::Windowed { horizon } => format!("windowed at {horizon}"),
        };
        s.push_str(&format!("  {}: {} ({mode})", v.name, v.verdict.status));
        if let Some(c) = &v.verdict.counterexample {
            let els: Vec<String> = c.elements.iter().map(|k| k.to_string()).collect();
            s.push_str(&format!(" at [{}]: {}", els.join(", "), c.reason));
        }
        s.push('\n');
    }
    s
}

fn fmt(path: &std::path::Path, check: bool) -> Outcome {
    let text = match commands::read(path) {
        Ok(t) => t,
        Err(f) => return usage_outcome(f.message),
    };
    let canon = match doc::parse::<doc::SystemDocument>(&text) {
        Ok(d) => doc::canonical(&d),
        Err(first) => match doc::parse::<doc::MorphismDocument>(&text) {
            Ok(d) => doc::canonical(&d),
            Err(_) => return usage_outcome(first.to_string()),
        },
    };
    if check {
        let same = canon == text;
        return Outcome {
            code: if same { 0 } else { 1 },
            stdout: String::new(),
            stderr: if same { String::new() } else { format!("{} is not canonical\n", path.display()) },
        };
    }
    Outcome {
        code: 0,
        stdout: canon,
        stderr: String::new(),
    }
}

fn usage_outcome(message: String) -> Outcome {
    Outcome {
        code: EXIT_USAGE,
        stdout: String::new(),
        stderr: format!("error: {message}\n"),
    }
}
