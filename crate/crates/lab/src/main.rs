use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lifshitz_lab::config::KINDS;
use lifshitz_lab::validate::has_errors;
use lifshitz_lab::{run_with_threads, validate, ExperimentConfig, LabError};

#[derive(Parser)]
#[command(
    name = "lifshitz-lab",
    version,
    about = "Run spectral experiments from a JSON config"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run whatever kind the config declares.
    Run(Opts),
    Bands(Opts),
    Ids(Opts),
    Lifshitz(Opts),
    Anderson(Opts),
    Bounds(Opts),
    Wegner(Opts),
    Ile(Opts),
    Decay(Opts),
    Sandwich(Opts),
}

#[derive(Args)]
struct Opts {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; falls back to `output.dir` in the config, then `.`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "LIFSHITZ_LAB_THREADS")]
    threads: Option<usize>,
    /// Overrides the master seed of the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Validate only.
    #[arg(long)]
    dry_run: bool,
}

const EXIT_INVALID: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (kind, opts) = match cli.command {
        Command::Run(o) => (None, o),
        Command::Bands(o) => (Some("bands"), o),
        Command::Ids(o) => (Some("ids"), o),
        Command::Lifshitz(o) => (Some("lifshitz"), o),
        Command::Anderson(o) => (Some("anderson"), o),
        Command::Bounds(o) => (Some("bounds"), o),
        Command::Wegner(o) => (Some("wegner"), o),
        Command::Ile(o) => (Some("ile"), o),
        Command::Decay(o) => (Some("decay"), o),
        Command::Sandwich(o) => (Some("sandwich"), o),
    };
    debug_assert!(kind.is_none_or(|k| KINDS.contains(&k)));

    let text = match std::fs::read_to_string(&opts.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", opts.config.display());
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let mut config = match ExperimentConfig::from_json(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: config: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    if let Some(seed) = opts.seed {
        config.ensemble.seed = seed;
    }
    if let Some(k) = kind {
        if k != config.experiment.kind() {
            eprintln!(
                "error: experiment.kind: subcommand {k} given for a {} config",
                config.experiment.kind()
            );
            return ExitCode::from(EXIT_INVALID);
        }
    }

    let diags = validate(&config);
    for d in &diags {
        eprintln!("{d}");
    }
    if has_errors(&diags) {
        return ExitCode::from(EXIT_INVALID);
    }
    if opts.dry_run {
        println!("config ok ({})", config.hash());
        return ExitCode::SUCCESS;
    }

    let out = opts
        .out
        .or_else(|| config.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    match run_with_threads(&config, &out, opts.threads) {
        Ok(m) => {
            for f in &m.files {
                println!("{}", out.join(&f.path).display());
            }
            let failed = m.failed_tasks();
            if failed > 0 {
                eprintln!("{failed} of {} task(s) failed", m.tasks.len());
                ExitCode::from(EXIT_PARTIAL)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(LabError::Invalid(diags)) => {
            for d in diags {
                eprintln!("{d}");
            }
            ExitCode::from(EXIT_INVALID)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
