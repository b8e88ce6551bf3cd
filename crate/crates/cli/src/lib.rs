//! Command-line front end: `sigprop check --trace T.csv --props P.sbp`.
//!
//! Exit codes: 0 when every property holds, 1 when at least one is violated,
//! 2 when none is violated but at least one is inconclusive, 3 for property
//! file, parse, typecheck and evaluation errors, 4 for trace I/O errors.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use sigprop_core::{
    engine, parse, Config64, CsvOptions, EndPolicy, InterpolationMode, Report64, Status, Trace64,
};

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_PROPERTY_ERROR: i32 = 3;
pub const EXIT_TRACE_ERROR: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "sigprop", version, about = "Check signal-based properties against a sampled trace")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a property file against a CSV trace.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Interp {
    Grid,
    Linear,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Policy {
    Inconclusive,
    Strict,
}

#[derive(Debug, clap::Args)]
struct CheckArgs {
    /// CSV trace with a `time` column.
    #[arg(long)]
    trace: PathBuf,
    /// Property file (.sbp).
    #[arg(long)]
    props: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long, value_enum, default_value = "grid")]
    interp: Interp,
    #[arg(long, default_value_t = 1e-9)]
    eq_tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    deriv_tol: f64,
    #[arg(long, default_value_t = 0.0)]
    prominence: f64,
    #[arg(long, value_enum, default_value = "inconclusive")]
    end_policy: Policy,
    /// Rename a signal referenced by the properties: `old=new`.
    #[arg(long = "bind", value_parser = parse_binding)]
    bindings: Vec<(String, String)>,
    /// Also write the JSON report to this file.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn parse_binding(s: &str) -> Result<(String, String), String> {
    match s.split_once('=') {
        Some((a, b)) if !a.is_empty() && !b.is_empty() => Ok((a.trim().into(), b.trim().into())),
        _ => Err(format!("expected OLD=NEW, got `{s}`")),
    }
}

fn status_code(s: Status) -> i32 {
    match s {
        Status::Holds => EXIT_HOLDS,
        Status::Violated => EXIT_VIOLATED,
        Status::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn render_text(report: &Report64) -> String {
    let mut out = String::new();
    let path = report.trace.path.as_deref().unwrap_or("-");
    out.push_str(&format!(
        "trace {path}: {} samples, length {}\n",
        report.trace.samples, report.trace.length
    ));
    let width = report.verdicts.iter().map(|v| v.property.len()).max().unwrap_or(0);
    for v in &report.verdicts {
        let line = match &v.verdict.reason {
            Some(r) => format!("{:width$}  {:12}  {r}", v.property, v.verdict.status.as_str()),
            None => format!("{:width$}  {}", v.property, v.verdict.status.as_str()),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str(&format!("overall: {}\n", report.overall()));
    out
}

/// Runs the command line `args` (including the program name), writing the
/// report to `stdout` and diagnostics to `stderr`.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PROPERTY_ERROR } else { EXIT_HOLDS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let Command::Check(args) = cli.command;
    check(args, stdout, stderr)
}

fn check(args: CheckArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let trace_path = args.trace.display().to_string();
    let trace = match Trace64::load(&args.trace, &CsvOptions::default()) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(stderr, "error: {trace_path}: {e}");
            return EXIT_TRACE_ERROR;
        }
    };
    let props_path = args.props.display().to_string();
    let text = match std::fs::read_to_string(&args.props) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot read `{props_path}`: {e}");
            return EXIT_PROPERTY_ERROR;
        }
    };
    let props = match parse::<f64>(&text) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: {props_path}:{e}");
            return EXIT_PROPERTY_ERROR;
        }
    };
    let cfg = Config64 {
        eq_tol: args.eq_tol,
        deriv_tol: args.deriv_tol,
        prominence: args.prominence,
        interp: match args.interp {
            Interp::Grid => InterpolationMode::Grid,
            Interp::Linear => InterpolationMode::Linear,
        },
        end_policy: match args.end_policy {
            Policy::Inconclusive => EndPolicy::Inconclusive,
            Policy::Strict => EndPolicy::Strict,
        },
        bindings: args.bindings,
    };
    let report = match engine::evaluate(&props, &trace, &cfg) {
        Ok(r) => r.with_path(trace_path),
        Err(e) => {
            let _ = writeln!(stderr, "error: {props_path}:{}: {}", e.span, describe(&e));
            return EXIT_PROPERTY_ERROR;
        }
    };
    let json = report.to_json();
    if let Some(path) = &args.report {
        if let Err(e) = std::fs::write(path, format!("{json}\n")) {
            let _ = writeln!(stderr, "error: cannot write report `{}`: {e}", path.display());
            return EXIT_PROPERTY_ERROR;
        }
    }
    let body = match args.format {
        Format::Json => format!("{json}\n"),
        Format::Text => render_text(&report),
    };
    let _ = stdout.write_all(body.as_bytes());
    status_code(report.overall())
}

fn describe(e: &engine::EngineError) -> String {
    match &e.source {
        // Check errors already start with their span.
        sigprop_core::Error::Check(c) => format!("property `{}`: {}", e.property, strip_span(&c.to_string())),
        other => format!("property `{}`: {other}", e.property),
    }
}

fn strip_span(msg: &str) -> &str {
    msg.split_once(": ").map_or(msg, |(_, rest)| rest)
}

/// Entry point used by the binary.
pub fn run_cli<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr().lock());
    run(args, &mut out, &mut err)
}
