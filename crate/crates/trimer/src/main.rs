use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use trimer::commands::{self, CommandError, Overrides};
use trimer::presets::{self, DEFAULT_SCALE};
use trimer::runner::{default_threads, THREADS_ENV};
use trimer_core::Representation;

#[derive(Parser)]
#[command(
    name = "trimer",
    version,
    about = "Phase-space simulation of a three-well Bose-Hubbard chain"
)]
struct Cli {
    /// Worker threads (default: $TRIMER_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum RepArg {
    Wigner,
    #[value(name = "positive_p")]
    PositiveP,
}

impl From<RepArg> for Representation {
    fn from(r: RepArg) -> Self {
        match r {
            RepArg::Wigner => Representation::Wigner,
            RepArg::PositiveP => Representation::PositiveP,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file and write moments.csv plus one distribution per measure time.
    Simulate {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        n_traj: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, value_enum)]
        representation: Option<RepArg>,
    },
    /// Bhattacharyya coefficient and distance between two distribution CSVs.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Also write comparison.csv into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate a figure or table: fig1, fig2, fig3, fig4, table_b, table_d.
    Reproduce {
        preset: String,
        /// Defaults to out/<preset>.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fraction of the full trajectory counts to run.
        #[arg(long, default_value_t = DEFAULT_SCALE)]
        scale: f64,
    },
}

fn run(cli: Cli) -> Result<(), CommandError> {
    let threads = match cli.threads {
        Some(0) => return Err(CommandError::Usage("--threads must be at least 1".into())),
        Some(n) => n,
        None => {
            default_threads().map_err(|e| CommandError::Usage(format!("{e} ({THREADS_ENV})")))?
        }
    };
    match cli.command {
        Command::Simulate {
            config,
            out,
            n_traj,
            seed,
            dt,
            representation,
        } => {
            let overrides = Overrides {
                n_traj,
                seed,
                dt,
                representation: representation.map(Into::into),
            };
            let result = commands::simulate(&config, &out, &overrides, threads)?;
            println!("{}", result.report());
            println!("wrote {}", out.display());
            if !result.is_reliable() {
                return Err(CommandError::Runtime(format!(
                    "{:.3}% of trajectories diverged; results are unreliable",
                    100.0 * result.discard_fraction()
                )));
            }
        }
        Command::Compare { a, b, out } => {
            let c = commands::compare(&a, &b, out.as_deref())?;
            println!("B = {} +/- {}", c.b, c.b_err);
            println!("D = {}", c.d);
        }
        Command::Reproduce { preset, out, scale } => {
            let Some(p) = presets::find_preset(&preset) else {
                return Err(CommandError::Usage(format!(
                    "unknown preset `{preset}`; valid presets: {}",
                    presets::preset_names().join(", ")
                )));
            };
            let out = out.unwrap_or_else(|| PathBuf::from("out").join(p.name));
            println!("{}: {}", p.name, p.description);
            let repro = presets::reproduce(p, &out, scale, threads, |name, o| {
                println!("  {name}: {}", o.report());
            })?;
            if !repro.summary.is_empty() {
                println!(
                    "{:<16} {:>9} {:>9} {:>9} {:>9} {:>9} {:>10}",
                    "pair", "B", "B_err", "B_ref", "D", "D_ref", "n_traj"
                );
                for r in &repro.summary {
                    println!(
                        "{:<16} {:>9.4} {:>9.4} {:>9.3} {:>9.4} {:>9.3} {:>10}",
                        r.pair_label, r.b, r.b_err, r.b_reference, r.d, r.d_reference, r.n_traj
                    );
                }
            }
            println!("wrote {}", out.display());
            let unreliable: Vec<&str> = repro
                .outputs
                .iter()
                .filter(|(_, o)| !o.is_reliable())
                .map(|(n, _)| *n)
                .collect();
            if !unreliable.is_empty() {
                return Err(CommandError::Runtime(format!(
                    "too many diverged trajectories in {}",
                    unreliable.join(", ")
                )));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
