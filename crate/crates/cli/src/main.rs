use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use eit_forge_cli::{parse_config, run, CliError};

/// Weak-probe EIT spectra of Doppler-broadened multilevel media.
#[derive(Parser, Debug)]
#[command(name = "eit-forge", version)]
struct Args {
    /// Run configuration (`key=value` lines).
    config: PathBuf,
    /// Output path prefix; overrides `output_prefix` in the config.
    #[arg(long)]
    out_prefix: Option<PathBuf>,
    /// Worker threads (falls back to EIT_FORGE_THREADS).
    #[arg(long)]
    threads: Option<usize>,
}

fn threads(args: &Args) -> Result<Option<usize>, CliError> {
    if let Some(n) = args.threads {
        return Ok(Some(n));
    }
    match std::env::var("EIT_FORGE_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Invalid(format!("EIT_FORGE_THREADS: cannot parse {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn execute(args: &Args) -> Result<(), CliError> {
    if let Some(n) = threads(args)? {
        if n == 0 {
            return Err(CliError::Invalid("thread count must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Invalid(format!("thread pool: {e}")))?;
    }
    let mut cfg = parse_config(&args.config)?;
    if let Some(p) = &args.out_prefix {
        cfg.output_prefix = p.clone();
    }
    let outcome = run(&cfg)?;
    print!("{}", outcome.stdout);
    for f in &outcome.files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("eit-forge: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
