use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use vcoherence::events::detect_events;
use vcoherence::figures::{reproduce_figure, FIGURE_IDS};
use vcoherence::oracle::AGREEMENT_TOLERANCE;
use vcoherence::output::write_series_csv;
use vcoherence::sweep::write_sweep_csv;
use vcoherence::{
    compare_closed_form, run_scenario, sweep, verification_grid, OracleConfig, OracleMethod,
    Scenario, SweepSpec,
};

/// Coherence of a V-type atom in a dissipative cavity under weak measurement.
#[derive(Debug, Parser)]
#[command(name = "vcoherence", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario file and write the coherence series as CSV.
    Simulate {
        scenario: PathBuf,
        /// Output file (stdout if omitted).
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Detect coherence sudden death / birth events in a scenario.
    Events { scenario: PathBuf },
    /// Regenerate the curves of a figure panel (e.g. `3b`, or `all`).
    Figure {
        id: String,
        #[arg(long, short, default_value = "figures")]
        out: PathBuf,
    },
    /// Run a parameter sweep file and write one summary row per grid point.
    Sweep {
        spec: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Compare the closed-form amplitudes with direct integration.
    Verify {
        #[arg(long, value_enum, default_value_t = Method::Rk4)]
        method: Method,
        /// Integration step (defaults to a rate-scaled step).
        #[arg(long)]
        step: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Rk4,
    Trapezoid,
}

impl From<Method> for OracleMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Rk4 => OracleMethod::Rk4Auxiliary,
            Method::Trapezoid => OracleMethod::TrapezoidVolterra,
        }
    }
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Simulate { scenario, out } => {
            let s = Scenario::load(&scenario)
                .with_context(|| format!("loading {}", scenario.display()))?;
            let series = run_scenario(&s)?;
            let mut w = output(out.as_deref())?;
            write_series_csv(&series, &mut w)?;
            w.flush()?;
        }
        Command::Events { scenario } => {
            let s = Scenario::load(&scenario)
                .with_context(|| format!("loading {}", scenario.display()))?;
            let report = detect_events(&run_scenario(&s)?);
            for d in &report.deaths {
                println!("death  t_enter={:.6} t_exit={:.6}", d.t_enter, d.t_exit);
            }
            for b in &report.births {
                println!(
                    "birth  t_birth={:.6} peak={:.6} t_peak={:.6}",
                    b.t_birth, b.peak_value, b.t_peak
                );
            }
            match report.steady_value {
                Some(v) => println!("steady {v:.6}"),
                None => println!("steady none"),
            }
        }
        Command::Figure { id, out } => {
            let ids: Vec<&str> = if id == "all" {
                FIGURE_IDS.to_vec()
            } else {
                vec![id.as_str()]
            };
            for id in ids {
                for path in reproduce_figure(id, &out)? {
                    println!("{}", path.display());
                }
            }
        }
        Command::Sweep { spec, out } => {
            let spec =
                SweepSpec::load(&spec).with_context(|| format!("loading {}", spec.display()))?;
            let rows = sweep(&spec)?;
            let mut w = output(out.as_deref())?;
            write_sweep_csv(&spec, &rows, &mut w)?;
            w.flush()?;
        }
        Command::Verify { method, step } => {
            let method = OracleMethod::from(method);
            if let Some(h) = step {
                if !(h > 0.0 && h.is_finite()) {
                    bail!("step must be positive, got {h}");
                }
            }
            let cases = verification_grid();
            let reports = cases
                .par_iter()
                .map(|c| {
                    let cfg = match step {
                        Some(h) => OracleConfig::with_step(h, c.max_time, method),
                        None => OracleConfig::new(&c.params, c.max_time, method),
                    };
                    compare_closed_form(&c.initial, &c.params, &cfg)
                })
                .collect::<vcoherence::Result<Vec<_>>>()?;
            let mut ok = true;
            for (c, r) in cases.iter().zip(&reports) {
                let p = c.params;
                println!(
                    "{:<4} gamma0={:<4} kappa={:<4} delta={:<4} theta={:<4} {:<10} max_err={:.3e} at t={:.3}",
                    if r.flagged { "FAIL" } else { "ok" },
                    p.gamma0,
                    p.kappa,
                    p.delta,
                    p.theta,
                    c.label,
                    r.max_abs_error,
                    r.worst_time
                );
                ok &= !r.flagged;
            }
            let worst = reports.iter().map(|r| r.max_abs_error).fold(0.0, f64::max);
            println!("{method}: worst error {worst:.3e} (tolerance {AGREEMENT_TOLERANCE:e})");
            return Ok(ok);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
