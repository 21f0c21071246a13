//! Command-line front end: runs the verification suites and writes
//! machine-readable reports plus optional plot data.

use clap::{Args, Parser, Subcommand};
use localzeta::config::RunConfig;
use localzeta::report::Report;
use localzeta::suites::run_suites;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "localzeta", version, about = "Numerical verification of local gamma-factor, scattering and Hankel-transform identities")]
struct Cli {
    #[command(subcommand)]
    suite: Suite,
}

#[derive(Args, Clone)]
struct Common {
    /// Random seed recorded in the report.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Enable the slow GL_3 checks.
    #[arg(long, default_value_t = false)]
    slow: bool,
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for report.json and plot data.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write per-check plot tables (comma-separated).
    #[arg(long, default_value_t = false)]
    emit_plots: bool,
}

#[derive(Subcommand)]
enum Suite {
    /// Gamma-factor identities: functional equation, inversion, rescaling.
    Gamma(Common),
    /// Scattering scalars: covariance, worked identities, the torus variant.
    Scattering {
        #[command(flatten)]
        common: Common,
        /// Restrict the covariance checks to one case label.
        #[arg(long)]
        case: Option<String>,
    },
    /// Transfer-operator Mellin multipliers.
    Transfer {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        case: Option<String>,
    },
    /// Hankel-transform commuting squares.
    Hankel {
        #[command(flatten)]
        common: Common,
        /// Rank: 1 or 2 (3 requires --slow and runs within "all" ranks).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Symplectic-coordinate checks.
    Symplectic(Common),
    /// Everything (the slow GL_3 checks only with --slow).
    All(Common),
}

fn build_config(common: &Common) -> localzeta::Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &common.config {
        cfg.apply_file(path)?;
    }
    cfg.seed = common.seed;
    cfg.slow = cfg.slow || common.slow;
    cfg.emit_plots = common.emit_plots;
    if let Some(out) = &common.out {
        cfg.out_dir = Some(out.display().to_string());
    }
    Ok(cfg)
}

fn run() -> localzeta::Result<Report> {
    let cli = Cli::parse();
    let (common, names): (Common, Vec<&str>) = match &cli.suite {
        Suite::Gamma(c) => (c.clone(), vec!["gamma"]),
        Suite::Scattering { common, case: _ } => (common.clone(), vec!["scattering"]),
        Suite::Transfer { common, case: _ } => (common.clone(), vec!["transfer"]),
        Suite::Hankel { common, n } => {
            let names = match n {
                Some(1) => vec!["hankel1"],
                Some(2) => vec!["hankel2"],
                None => vec!["hankel"],
                Some(other) => {
                    return Err(localzeta::Error::config(format!(
                        "hankel rank {other} is not a direct target; use --slow with the full suite"
                    )))
                }
            };
            (common.clone(), names)
        }
        Suite::Symplectic(c) => (c.clone(), vec!["symplectic"]),
        Suite::All(c) => (c.clone(), vec!["all"]),
    };
    let cfg = build_config(&common)?;
    let records = run_suites(&names, &cfg)?;
    let report = Report::new(cfg.echo(), cfg.seed, records);

    if let Some(dir) = &cfg.out_dir {
        let dir = PathBuf::from(dir);
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join("report.json"), report.full_json()?)?;
        if cfg.emit_plots {
            let mut ids: Vec<String> = report.records.iter().map(|r| r.check_id.clone()).collect();
            ids.sort();
            ids.dedup();
            for id in ids {
                let mut buf = Vec::new();
                report.emit_plot_data(&id, &mut buf)?;
                std::fs::write(dir.join(format!("plot_{id}.csv")), buf)?;
            }
        }
    }
    print!("{}", report.human_summary());
    Ok(report)
}

fn main() -> ExitCode {
    match run() {
        Ok(report) => {
            if report.any_failed() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
