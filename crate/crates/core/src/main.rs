use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chronoclock::exec::init_threads;
use chronoclock::harness::{plot_data, run_experiment, ExperimentConfig, ExperimentKind, ScanSection};

#[derive(Parser)]
#[command(name = "chronoclock", version, about = "Quantum clock arrival and dwell time experiments")]
struct Cli {
    /// Output directory, overriding the config's `output_dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed, overriding the config's `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 keeps the default pool).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run { config: PathBuf },
    /// Propagator and path-decomposition identity battery.
    PdxCheck,
    /// Resolution overlap of a Gaussian linear clock against the Gaussian law.
    ResolutionScan {
        #[arg(long)]
        lambda: f64,
        #[arg(long = "sigma-eps")]
        sigma_eps: f64,
        #[arg(long, default_value_t = 1.0)]
        eps0: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Write gnuplot-ready columns for a finished run directory.
    PlotData { dir: PathBuf },
}

fn bare(kind: ExperimentKind) -> ExperimentConfig {
    let text = format!("experiment = \"{}\"", serde_json::to_value(kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default());
    ExperimentConfig::from_toml(&text).expect("minimal config parses")
}

fn execute(cli: Cli) -> chronoclock::Result<bool> {
    let mut cfg = match cli.command {
        Command::PlotData { dir } => {
            for p in plot_data(&dir)? {
                println!("{}", p.display());
            }
            return Ok(true);
        }
        Command::Run { config } => ExperimentConfig::load(&config)?,
        Command::PdxCheck => bare(ExperimentKind::PdxCheck),
        Command::ResolutionScan { lambda, sigma_eps, eps0, points } => {
            let mut c = bare(ExperimentKind::ResolutionScan);
            c.scan = Some(ScanSection { lambda, sigma_eps, eps0, span: 10.0, points });
            c
        }
    };
    if let Some(out) = cli.out {
        cfg.output_dir = out;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let output = run_experiment(&cfg)?;
    output.write(&cfg.output_dir)?;
    for (name, pass) in &output.report.pass {
        println!("{name}: {}", if *pass { "pass" } else { "FAIL" });
    }
    if let Some(c) = &output.report.comparison {
        println!("l2_relative = {:.4e} (threshold {})", c.l2_relative, c.threshold);
    }
    println!("wrote {}", cfg.output_dir.display());
    Ok(output.report.all_pass())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if cli.threads > 0 && !init_threads(cli.threads) {
        log::warn!("thread pool already initialised; --threads ignored");
    }
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
