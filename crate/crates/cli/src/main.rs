//! `corrtherm`: scenario runner for heat/work accounting in correlated
//! quantum states.
//!
//! Exit codes: 0 when every requested verdict passes, 2 when a verdict
//! fails, 1 on input or precondition errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use corrtherm_cli::run;
use corrtherm_cli::scenario::{AlphaSpec, Objective, Parameters, Scenario, ScenarioKind};

#[derive(Parser)]
#[command(
    name = "corrtherm",
    version,
    about = "Heat, work, and free-energy accounting for correlated system-bath states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Verdict tolerance override for all requested checks
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed override for randomized scenarios and searches
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for report.json / summary.csv / sweep.csv
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run a built-in demonstration scenario
    Demo {
        #[command(subcommand)]
        demo: DemoCommand,
    },
    /// Run the checks requested by a scenario file
    Check { file: PathBuf },
    /// Run the unitary search configured by a scenario file
    Optimize { file: PathBuf },
    /// Sweep a scenario parameter and write sweep.csv
    Sweep {
        file: PathBuf,
        /// Parameter to sweep: theta, alpha, t_a, or t_b
        #[arg(long)]
        param: String,
        /// Grid as start:stop:steps (stop may be "max" for alpha)
        #[arg(long)]
        range: String,
    },
}

#[derive(Args)]
struct ProbabilityArgs {
    /// Correlation weights, e.g. 0.5,0.5
    #[arg(long = "p", value_delimiter = ',', default_values_t = [0.5, 0.5])]
    p: Vec<f64>,
    /// Bath temperature
    #[arg(long = "T", default_value_t = 1.0)]
    temperature: f64,
}

#[derive(Subcommand)]
enum DemoCommand {
    /// Classically correlated memory erased without any heat flow
    Example1(ProbabilityArgs),
    /// Entangled memory erased while the bath cools down
    Example2(ProbabilityArgs),
    /// Search for cold-to-hot heat flow driven by correlations
    Anomalous {
        /// Energy gap of both qubits
        #[arg(long, default_value_t = 1.0)]
        gap: f64,
        /// Cold bath temperature
        #[arg(long = "Ta", default_value_t = 1.0)]
        t_a: f64,
        /// Hot bath temperature
        #[arg(long = "Tb", default_value_t = 2.0)]
        t_b: f64,
        /// Correlation strength: a number or "max"
        #[arg(long, default_value = "max")]
        alpha: String,
    },
    /// Complete erasure of an uncorrelated memory into a thermal bath
    Erasure {
        /// Bath temperature
        #[arg(long = "T", default_value_t = 0.4)]
        temperature: f64,
        /// Number of bath qubits
        #[arg(long, default_value_t = 2)]
        bath_qubits: usize,
        /// Energy gap of each bath qubit
        #[arg(long, default_value_t = 1.0)]
        gap: f64,
    },
    /// Mutual-equilibrium test on a correlated triple
    Zeroth {
        /// Energy gap of each qubit
        #[arg(long, default_value_t = 1.0)]
        gap: f64,
        /// Common temperature of all marginals
        #[arg(long = "T", default_value_t = 1.0)]
        temperature: f64,
        /// Correlation strength of the hidden pair: a number or "max"
        #[arg(long, default_value = "max")]
        alpha: String,
    },
}

fn parse_alpha(raw: &str) -> anyhow::Result<AlphaSpec> {
    if raw == "max" {
        return Ok(AlphaSpec::Keyword("max".into()));
    }
    raw.parse::<f64>()
        .map(AlphaSpec::Value)
        .map_err(|_| anyhow::anyhow!("--alpha must be a number or \"max\", got {raw:?}"))
}

fn demo_scenario(demo: &DemoCommand, seed: Option<u64>) -> anyhow::Result<(Scenario, bool)> {
    let mut optimizer = None;
    if let Some(seed) = seed {
        optimizer = Some(corrtherm::optimize::SearchConfig {
            seed,
            ..Default::default()
        });
    }
    let (scenario, optimize) = match demo {
        DemoCommand::Example1(args) => (
            Scenario {
                kind: ScenarioKind::Example1,
                parameters: Parameters {
                    p: Some(args.p.clone()),
                    temperature: Some(args.temperature),
                    ..Default::default()
                },
                checks: Vec::new(),
                optimizer: None,
                objective: Objective::default(),
            },
            false,
        ),
        DemoCommand::Example2(args) => (
            Scenario {
                kind: ScenarioKind::Example2,
                parameters: Parameters {
                    p: Some(args.p.clone()),
                    temperature: Some(args.temperature),
                    ..Default::default()
                },
                checks: Vec::new(),
                optimizer: None,
                objective: Objective::default(),
            },
            false,
        ),
        DemoCommand::Anomalous {
            gap,
            t_a,
            t_b,
            alpha,
        } => (
            Scenario {
                kind: ScenarioKind::TwoBath,
                parameters: Parameters {
                    gap: Some(*gap),
                    t_a: Some(*t_a),
                    t_b: Some(*t_b),
                    alpha: Some(parse_alpha(alpha)?),
                    ..Default::default()
                },
                checks: Vec::new(),
                optimizer,
                objective: Objective::AnomalousFlow,
            },
            true,
        ),
        DemoCommand::Erasure {
            temperature,
            bath_qubits,
            gap,
        } => (
            Scenario {
                kind: ScenarioKind::Erasure,
                parameters: Parameters {
                    temperature: Some(*temperature),
                    bath_qubits: Some(*bath_qubits),
                    gap: Some(*gap),
                    ..Default::default()
                },
                checks: Vec::new(),
                optimizer: None,
                objective: Objective::default(),
            },
            false,
        ),
        DemoCommand::Zeroth {
            gap,
            temperature,
            alpha,
        } => (
            Scenario {
                kind: ScenarioKind::Zeroth,
                parameters: Parameters {
                    gap: Some(*gap),
                    temperature: Some(*temperature),
                    alpha: Some(parse_alpha(alpha)?),
                    ..Default::default()
                },
                checks: Vec::new(),
                optimizer: None,
                objective: Objective::default(),
            },
            false,
        ),
    };
    Ok((scenario, optimize))
}

fn execute(cli: &Cli) -> anyhow::Result<bool> {
    match &cli.command {
        Command::Demo { demo } => {
            let (mut scenario, optimize) = demo_scenario(demo, cli.seed)?;
            if let Some(seed) = cli.seed {
                scenario.parameters.seed = Some(seed);
            }
            let report = if optimize {
                run::run_optimize(&scenario)?
            } else {
                run::run_scenario(&scenario, cli.tol)?
            };
            let (json_path, csv_path) = run::write_outputs(&report, &cli.out)?;
            run::print_summary(&report);
            println!("wrote {} and {}", json_path.display(), csv_path.display());
            Ok(report.all_passed)
        }
        Command::Check { file } => {
            let mut scenario = Scenario::from_file(file)?;
            if let Some(seed) = cli.seed {
                scenario.parameters.seed = Some(seed);
            }
            let report = run::run_scenario(&scenario, cli.tol)?;
            let (json_path, csv_path) = run::write_outputs(&report, &cli.out)?;
            run::print_summary(&report);
            println!("wrote {} and {}", json_path.display(), csv_path.display());
            Ok(report.all_passed)
        }
        Command::Optimize { file } => {
            let mut scenario = Scenario::from_file(file)?;
            if let Some(seed) = cli.seed {
                let mut cfg = scenario.optimizer.unwrap_or_default();
                cfg.seed = seed;
                scenario.optimizer = Some(cfg);
            }
            let report = run::run_optimize(&scenario)?;
            let (json_path, csv_path) = run::write_outputs(&report, &cli.out)?;
            run::print_summary(&report);
            println!("wrote {} and {}", json_path.display(), csv_path.display());
            Ok(report.all_passed)
        }
        Command::Sweep { file, param, range } => {
            let scenario = Scenario::from_file(file)?;
            let csv = run::run_sweep(&scenario, param, range, cli.tol)?;
            std::fs::create_dir_all(&cli.out)?;
            let path = cli.out.join("sweep.csv");
            std::fs::write(&path, &csv)?;
            println!("wrote {}", path.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more verdicts failed");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
