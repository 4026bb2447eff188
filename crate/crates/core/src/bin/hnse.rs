use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hnse::diagnostics::verify::{run_suites, Scale, SUITES};
use hnse::diagnostics::{analyticity_radius, run, SimulationConfig};
use hnse::frequency::io::load;
use hnse::hermite::hermite_functions_scaled;
use hnse::Error;

#[derive(Parser)]
#[command(name = "hnse", about = "Spectral Navier-Stokes toolkit on the Heisenberg group")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run invariant suites; exit 1 if any fails.
    Verify {
        /// Suite name; repeat for several. Default: all.
        #[arg(long)]
        suite: Vec<String>,
        /// Use the acceptance problem sizes.
        #[arg(long)]
        full: bool,
        /// Write per-suite residuals as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run a configured simulation.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `[output] dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the vertical analyticity-radius estimate of a stored state.
    Radius {
        #[arg(long)]
        input: PathBuf,
    },
    /// Print rescaled Hermite functions as CSV.
    DumpHermite {
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        #[arg(long, default_value_t = 41)]
        points: usize,
        #[arg(long, default_value_t = 4.0)]
        extent: f64,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonFinite { .. }
        | Error::Cfl { .. }
        | Error::Divergence(_)
        | Error::Constraint(_)
        | Error::Estimator(_)
        | Error::QuadratureTooCoarse { .. } => 3,
        _ => 2,
    }
}

fn setup_threads() {
    if let Some(n) = std::env::var("HNSE_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    setup_threads();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify { suite, full, json } => verify(suite, full, json),
        Command::Run { config, out } => run_config(config, out),
        Command::Radius { input } => (|| {
            let u = load(&input)?.into_horizontal()?;
            println!("{:.17e}", analyticity_radius(&u)?);
            Ok(0)
        })(),
        Command::DumpHermite { lambda, max_n, points, extent } => {
            println!("x,{}", (0..=max_n).map(|n| format!("h{n}")).collect::<Vec<_>>().join(","));
            for i in 0..points {
                let x = -extent + 2.0 * extent * i as f64 / (points.max(2) - 1) as f64;
                let h = hermite_functions_scaled(max_n, lambda, x);
                let vals: Vec<String> = h.iter().map(|v| format!("{v:.17e}")).collect();
                println!("{x:.17e},{}", vals.join(","));
            }
            Ok(0)
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("hnse: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn verify(suite: Vec<String>, full: bool, json: Option<PathBuf>) -> hnse::Result<u8> {
    let names: Vec<&str> = if suite.is_empty() { SUITES.to_vec() } else { suite.iter().map(|s| s.as_str()).collect() };
    if let Some(bad) = names.iter().find(|n| !SUITES.contains(n)) {
        return Err(Error::Config(format!("unknown suite {bad:?}; known: {}", SUITES.join(", "))));
    }
    let scale = if full { Scale::Acceptance } else { Scale::Quick };
    let reports = run_suites(&names, scale);
    for r in &reports {
        println!("{} {:<14} {:>8.2}s  {}", if r.passed() { "PASS" } else { "FAIL" }, r.name, r.seconds, r.headline());
    }
    let passed = reports.iter().all(|r| r.passed());
    if let Some(path) = json {
        let body = serde_json::json!({ "passed": passed, "suites": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>() });
        std::fs::write(path, serde_json::to_string_pretty(&body)?)?;
    }
    Ok(if passed { 0 } else { 1 })
}

fn run_config(config: PathBuf, out: Option<PathBuf>) -> hnse::Result<u8> {
    let mut cfg = SimulationConfig::load(&config)?;
    if let Some(dir) = out {
        cfg.output.dir = dir;
    }
    let art = run(&cfg)?;
    for p in [&art.csv, &Some(art.summary.clone()), &art.state].into_iter().flatten() {
        println!("{}", p.display());
    }
    Ok(if art.passed { 0 } else { 1 })
}
