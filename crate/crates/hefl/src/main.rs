use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hefl::harness::{self, SweepAxis};
use hefl::scenario::{parse_config, Scenario, ScenarioError};

/// Simulates federated learning rounds under homomorphic-encryption
/// overhead and compares plan-assignment strategies.
#[derive(Parser)]
#[command(name = "hefl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    K,
    Alpha,
}

impl From<AxisArg> for SweepAxis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::K => SweepAxis::K,
            AxisArg::Alpha => SweepAxis::Alpha,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario's strategy comparison and write its reports.
    Run {
        /// Scenario config file.
        config: PathBuf,
        /// Replace the scenario's seed list with this single seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output root (default: $HEFL_OUT_DIR, then ./out). Reports land
        /// under <root>/<scenario-name>/.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run one comparison per value of a sensitivity axis.
    Sweep {
        /// Scenario config file.
        config: PathBuf,
        /// Axis to vary.
        #[arg(long, value_enum, ignore_case = true)]
        axis: AxisArg,
        /// Axis values (default: the scenario's [sweep] table).
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        /// Output root (default: $HEFL_OUT_DIR, then ./out).
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Parse and validate a scenario config, reporting every violation.
    Validate {
        /// Scenario config file.
        config: PathBuf,
    },
    /// Print the learned Q-tables a comparison left in a run directory.
    DumpQtable {
        /// A comparison output directory (the one holding runs/).
        run_dir: PathBuf,
    },
}

/// Exit 2 marks a config problem, 1 a run failure.
const EXIT_CONFIG: u8 = 2;
const EXIT_RUN: u8 = 1;

fn out_root(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("HEFL_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn load_scenario(config: &Path, seed: Option<u64>) -> Result<Scenario, ScenarioError> {
    let mut sc = parse_config(config)?;
    if let Some(seed) = seed {
        sc.run.seeds = vec![seed];
    }
    Ok(sc)
}

fn report_failures(cells: &[harness::CellOutcome]) {
    for cell in cells {
        if let Err(e) = &cell.outcome {
            eprintln!("{} seed {} failed: {e}", cell.strategy, cell.seed, e = e);
        }
    }
}

fn run(command: Command) -> ExitCode {
    match command {
        Command::Run {
            config,
            seed,
            out_dir,
        } => {
            let sc = match load_scenario(&config, seed) {
                Ok(sc) => sc,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            let dir = out_root(out_dir).join(&sc.name);
            match harness::run_comparison(&sc, &dir) {
                Ok(report) => {
                    println!(
                        "{}: {} cells ({} strategies × {} seeds) -> {}",
                        sc.name,
                        report.cells.len(),
                        report.summaries.len(),
                        sc.run.seeds.len(),
                        dir.display()
                    );
                    for s in &report.summaries {
                        println!(
                            "  {:<10} final acc {}   convergence {} s   security loss {}",
                            s.strategy.to_string(),
                            fmt(s.final_accuracy_median),
                            fmt(s.convergence_time_s_median),
                            fmt(s.total_security_loss_median),
                        );
                    }
                    if report.failures() > 0 {
                        report_failures(&report.cells);
                        return ExitCode::from(EXIT_RUN);
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(EXIT_RUN)
                }
            }
        }
        Command::Sweep {
            config,
            axis,
            values,
            out_dir,
        } => {
            let sc = match load_scenario(&config, None) {
                Ok(sc) => sc,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            let axis = SweepAxis::from(axis);
            let dir = out_root(out_dir).join(&sc.name);
            match harness::run_sweep(&sc, axis, values.as_deref(), &dir) {
                Ok(report) => {
                    println!(
                        "{}: swept {} over {} values -> {}",
                        sc.name,
                        axis.name(),
                        report.comparisons.len(),
                        dir.display()
                    );
                    if report.failures() > 0 {
                        for (_, comparison) in &report.comparisons {
                            report_failures(&comparison.cells);
                        }
                        return ExitCode::from(EXIT_RUN);
                    }
                    ExitCode::SUCCESS
                }
                Err(e @ harness::HarnessError::Config(_)) => {
                    eprintln!("{e}");
                    ExitCode::from(EXIT_CONFIG)
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(EXIT_RUN)
                }
            }
        }
        Command::Validate { config } => match parse_config(&config) {
            Ok(sc) => {
                println!(
                    "{}: ok ({} clients, {:?} K={}, {} rounds, {} plans, strategies {})",
                    sc.name,
                    sc.population.n_clients,
                    sc.tiering.method,
                    sc.tiering.k,
                    sc.run.rounds,
                    sc.grid.len(),
                    sc.run
                        .strategies
                        .iter()
                        .map(|s| s.name())
                        .collect::<Vec<_>>()
                        .join(",")
                );
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(EXIT_CONFIG)
            }
        },
        Command::DumpQtable { run_dir } => match harness::collect_qtables(&run_dir) {
            Ok(tables) if tables.is_empty() => {
                eprintln!("no q-tables under {}", run_dir.join("runs").display());
                ExitCode::from(EXIT_RUN)
            }
            Ok(tables) => {
                for (name, text) in tables {
                    println!("== {name} ==");
                    print!("{text}");
                }
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(EXIT_RUN)
            }
        },
    }
}

fn fmt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6}")).unwrap_or_else(|| "-".into())
}

fn main() -> ExitCode {
    run(Cli::parse().command)
}
