use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use zeta_strips_cli::analyze::{analyze, summary};
use zeta_strips_cli::compute::{compute, write_contour, write_outputs};
use zeta_strips_cli::config::{Overrides, RunConfig};
use zeta_strips_cli::exit::{coded, exit_kind, ExitKind};
use zeta_strips_cli::{figures, verify};

#[derive(Parser)]
#[command(name = "zeta-strips", version, about = "Strips of the critical strip bounded by Im zeta = 0 contours")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Largest height considered (at most 11000).
    #[arg(long, global = true)]
    t_max: Option<f64>,
    /// Upper bound on the number of strips.
    #[arg(long, global = true)]
    m_max: Option<usize>,
    /// Worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cache directory (default: <out>/cache).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Absolute error target of the zeta evaluator.
    #[arg(long, global = true)]
    precision: Option<f64>,
    /// File of `key = value` lines; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute Gram points, strip boundaries, zeros and strips.
    Compute {
        /// Also write the level curve launched at index K as contour_k<K>.csv.
        #[arg(long, value_name = "K")]
        contour: Option<i64>,
    },
    /// Fit and summarise the cached strips.
    Analyze,
    /// Render one figure as SVG.
    Plot {
        #[arg(long)]
        figure: u32,
    },
    /// Run the quick self-check battery.
    Verify,
}

fn run(cli: Cli) -> Result<()> {
    let c = cli.common;
    let cfg = RunConfig::resolve(&Overrides {
        t_max: c.t_max,
        m_max: c.m_max,
        threads: c.threads,
        out_dir: c.out,
        cache_dir: c.cache,
        precision: c.precision,
        config: c.config,
    })?;
    match cli.command {
        Command::Compute { contour } => {
            let out = compute(&cfg)?;
            write_outputs(&cfg, &out)?;
            let names = |v: &[zeta_strips_cli::cache::Kind]| {
                v.iter().map(|k| k.name()).collect::<Vec<_>>().join(",")
            };
            println!("strips={}", out.strips.len());
            println!("zeros={}", out.strips.iter().map(|s| s.n_zeros()).sum::<usize>());
            println!("gram_points={}", out.gram.len());
            println!("loaded={}", names(&out.loaded));
            println!("computed={}", names(&out.computed));
            if let Some(k) = contour {
                let path = write_contour(&cfg, k)?;
                println!("contour={}", path.display());
            }
        }
        Command::Analyze => {
            let a = analyze(&cfg)?;
            print!("{}", summary(&a));
        }
        Command::Plot { figure } => {
            let path = figures::plot(&cfg, figure)?;
            println!("{}", path.display());
        }
        Command::Verify => {
            let report = verify::run(&cfg)?;
            for c in &report.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            println!("elapsed={:.3}s", report.elapsed.as_secs_f64());
            if !report.passed() {
                return Err(coded(
                    ExitKind::VerifyFailed,
                    format!("failed checks: {}", report.failures().join(", ")),
                ));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(ExitKind::Usage.code() as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_kind(&e).code() as u8)
        }
    }
}
