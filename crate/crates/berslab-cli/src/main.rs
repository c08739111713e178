//! berslab: chart, curvature, scattering, and density diagnostics for the
//! real Bers pipeline, with machine-readable certificates.
//!
//! Every subcommand writes CSV data plus a JSON certificate array under the
//! output directory and exits 0 iff all certificates pass (2 on config
//! errors, 3 on numerical failures). Identical configurations produce
//! bit-identical outputs regardless of `--threads`.

mod commands;
mod config;
mod report;

use clap::{Parser, Subcommand};
use config::RunConfig;
use report::Certificate;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "berslab", version, about = "Numerical laboratory for the real Bers embedding")]
struct Cli {
    /// JSON configuration file (flags override file values).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Test family, e.g. gauss_bump{0.5,0,1}, double_bump, sampled{path}.
    #[arg(long, global = true)]
    family: Option<String>,

    /// Output directory for CSV and JSON artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Per-check tolerance override, repeatable: --tol check=value.
    #[arg(long = "tol", global = true, value_name = "CHECK=VALUE")]
    tolerances: Vec<String>,

    /// Worker threads for the k-sweep (output is thread-count independent).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Geodesic fields and strain/Riccati residuals for Id -> family.
    Geodesic,
    /// Schwarzian and L^p-Schwarzian fields with their identity residuals.
    Schwarzian,
    /// Gelfand-Fuchs / Bott / Bott-Thurston cocycle values and residuals.
    Cocycle,
    /// Bers-map operations.
    Bers {
        #[command(subcommand)]
        action: BersAction,
    },
    /// Scattering sweep: per-k coefficients and spectral certificates.
    Scatter,
    /// Trace identities relating the potential to the reflection data.
    Trace,
    /// Density-side structure: sign reports and Hardy certificates.
    Diagnose,
    /// Fisher non-control experiment at pinned information.
    Noncontrol,
    /// Run every certificate in dependency order.
    Suite,
}

#[derive(Subcommand)]
enum BersAction {
    /// Potential -> distinguished solution -> reconstruction round trip.
    Roundtrip,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg: RunConfig = match &cli.config {
        None => RunConfig::default(),
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("config: cannot read {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            };
            match serde_json::from_str(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("config: parse failure: {e}");
                    return ExitCode::from(2);
                }
            }
        }
    };
    if let Some(f) = &cli.family {
        cfg.family = Some(f.clone());
    }
    if let Some(o) = &cli.out {
        cfg.output_dir = Some(o.clone());
    }
    for spec in &cli.tolerances {
        match spec.split_once('=').and_then(|(k, v)| v.parse::<f64>().ok().map(|v| (k, v))) {
            Some((k, v)) => {
                cfg.tolerances.insert(k.trim().to_string(), v);
            }
            None => {
                eprintln!("config: malformed --tol `{spec}` (expected check=value)");
                return ExitCode::from(2);
            }
        }
    }
    if cfg.grid().is_err() || cfg.kgrid().is_err() {
        eprintln!("config: grid parameters out of range");
        return ExitCode::from(2);
    }
    if let Some(n) = cli.threads {
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("warning: global thread pool already initialized");
        }
    }
    let outdir = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("berslab-out"));

    let result: Result<Vec<Certificate>, berslab::Error> = match &cli.command {
        Command::Geodesic => commands::geodesic(&cfg, &outdir),
        Command::Schwarzian => commands::schwarzian(&cfg, &outdir),
        Command::Cocycle => commands::cocycle(&cfg, &outdir),
        Command::Bers { action: BersAction::Roundtrip } => commands::bers_roundtrip(&cfg, &outdir),
        Command::Scatter => commands::scatter(&cfg, &outdir),
        Command::Trace => commands::trace(&cfg, &outdir),
        Command::Diagnose => commands::diagnose(&cfg, &outdir),
        Command::Noncontrol => commands::noncontrol(&cfg, &outdir),
        Command::Suite => commands::suite(&cfg, &outdir),
    };

    match result {
        Err(e) => {
            let failure = serde_json::json!({ "numerical_failure": e.to_string() });
            eprintln!("{failure}");
            ExitCode::from(3)
        }
        Ok(certs) => {
            let mut all_pass = true;
            for c in &certs {
                println!(
                    "{:<44} {}  residual {:.3e}  tol {:.1e}",
                    c.check_name,
                    if c.pass { "PASS" } else { "FAIL" },
                    c.residual,
                    c.tolerance
                );
                all_pass &= c.pass;
            }
            if all_pass {
                ExitCode::SUCCESS
            } else {
                for c in certs.iter().filter(|c| !c.pass) {
                    eprintln!("{}", serde_json::to_string(c).expect("certificate serializes"));
                }
                ExitCode::from(3)
            }
        }
    }
}
