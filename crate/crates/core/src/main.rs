use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use sbs_monitor::config::RunConfig;
use sbs_monitor::runner::{run, ExitKind, Scenario};

/// Reproducible experiments on the distance to spectrum broadcast structures.
#[derive(Parser, Debug)]
#[command(name = "sbs-monitor", version)]
struct Cli {
    /// fig1, fig2, timescales, discrimination or verify.
    #[arg(long)]
    scenario: Scenario,
    /// TOML configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Overrides the configured Monte Carlo sample count.
    #[arg(long)]
    samples: Option<usize>,
}

fn load(cli: &Cli) -> Result<RunConfig, String> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            RunConfig::from_toml(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(samples) = cli.samples {
        config.samples = samples;
    }
    config.validate().map_err(|e| e.to_string())?;
    Ok(config)
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which would read as a verification failure
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(ExitKind::ConfigError as u8);
        }
    };
    let config = match load(&cli) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("sbs-monitor: invalid configuration: {msg}");
            return ExitCode::from(ExitKind::ConfigError as u8);
        }
    };
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("sbs-monitor: thread pool: {e}");
            return ExitCode::from(ExitKind::ConfigError as u8);
        }
    }
    match run(cli.scenario, &config, &cli.out_dir) {
        Ok(outcome) => {
            for path in &outcome.files {
                println!("{}", path.display());
            }
            for (gate, passed) in &outcome.gates {
                if !passed {
                    eprintln!("sbs-monitor: gate '{gate}' failed");
                }
            }
            ExitCode::from(outcome.exit as u8)
        }
        Err(e) => {
            eprintln!("sbs-monitor: {e}");
            ExitCode::from(e.exit_kind() as u8)
        }
    }
}
