use std::path::PathBuf;
use std::process::ExitCode;

use catspec::cli::config::Config;
use catspec::cli::{error_record, exit_code, run, Command};
use catspec::Error;
use clap::builder::{PossibleValuesParser, TypedValueParser};
use clap::Parser;

/// Spectra, ground states and cat-state diagnostics of two laser-coupled
/// condensates. Writes CSV and SVG files plus manifest.json into --out.
#[derive(Debug, Parser)]
#[command(name = "catspec", version)]
struct Args {
    #[arg(value_parser = PossibleValuesParser::new(Command::NAMES).map(|s| Command::parse(&s).expect("listed name")))]
    command: Command,

    /// Flat `key = value` file; missing keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long, default_value = "out")]
    out: PathBuf,

    #[arg(long, env = "CATSPEC_THREADS")]
    threads: Option<usize>,

    /// Assert that no random numbers are drawn. The solvers are fully
    /// deterministic, so this only records the check in the manifest.
    #[arg(long)]
    seed_free: bool,
}

fn execute(args: &Args) -> catspec::Result<()> {
    if let Some(k) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    let text = match &args.config {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?,
        None => String::new(),
    };
    let cfg = Config::parse(&text)?;
    let manifest = run(args.command, &cfg, &args.out)?;
    for f in &manifest.outputs {
        println!("{}", args.out.join(f).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let record = error_record(Some(args.command), &e);
            eprintln!("{record}");
            let _ = std::fs::create_dir_all(&args.out).and_then(|_| std::fs::write(args.out.join("error.json"), record + "\n"));
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
