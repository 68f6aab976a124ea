use std::fs;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use qkcone_cli::{manifest_from_args, run_transform, run_verify, CliError};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
}

/// Apply cone transforms to truncated loop elements, or run a verification suite.
///
/// Without --suite the pipeline is applied to --input and the transformed
/// element is written with its provenance log. With --suite the named suite runs
/// against the target. Exit codes: 0 pass, 1 verification failures, 2 configuration errors.
#[derive(Parser, Debug)]
#[command(name = "qk-cone", version)]
struct Args {
    /// Target config: a JSON file or inline JSON.
    #[arg(long)]
    target: String,
    /// Loop element JSON file, or a seed name (P1-trivial, hypergeometric).
    #[arg(long)]
    input: Option<String>,
    /// Pipeline: JSON list of stages, as a file or inline.
    #[arg(long)]
    pipeline: Option<String>,
    /// Novikov truncation; defaults to the input's D_max, else 3.
    #[arg(long)]
    dmax: Option<u32>,
    /// Expansion order for series-mode stages and the pfd suite.
    #[arg(long)]
    series_order: Option<u32>,
    /// One of: split, omega, pfd, level-identity, qsd-forms, pipeline-4-10, recursion, transfer, limits.
    #[arg(long)]
    suite: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn emit(text: &str, out: Option<&str>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Config(format!("cannot write {:?}: {}", path, e))),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn run(args: Args) -> Result<(), CliError> {
    let Format::Json = args.format;
    let m = manifest_from_args(
        &args.target,
        args.input,
        args.pipeline.as_deref(),
        args.dmax,
        args.series_order,
        args.suite,
        args.out,
    )?;
    if m.suite.is_some() {
        match run_verify(&m) {
            Ok(text) => emit(&text, m.out.as_deref()),
            Err((text, e)) => {
                if !text.is_empty() {
                    emit(&text, m.out.as_deref())?;
                }
                Err(e)
            }
        }
    } else {
        let text = run_transform(&m)?;
        emit(&text, m.out.as_deref())
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qk-cone: {}", e);
            ExitCode::from(e.exit_code())
        }
    }
}
