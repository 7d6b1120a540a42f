use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use luders::compat::scenario_pairwise_check;
use luders::generate::generate_random_scenario;
use luders::report::{render_text, run_wave_demo, ModelDoc, Status, WitnessDoc};
use luders::scenario::parse_scenario_with_id;
use luders::{run_check, Error, RunReport, Scenario, UnderlyingModel};

/// Checks whether a set of observables admits a state-updating
/// underlying-state model, and builds it or exhibits the obstruction.
#[derive(Parser, Debug)]
#[command(name = "luders", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Threshold above which an order-dependence gap counts as incompatibility.
    #[arg(long, global = true)]
    tol_compat: Option<f64>,
    /// Pointwise tolerance for model verification.
    #[arg(long, global = true)]
    tol_model: Option<f64>,
    /// Number of seeded random probe states added to the declared ones.
    #[arg(long = "states", global = true)]
    random_states: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide compatibility, then build and verify the model or report the obstruction.
    Check { file: PathBuf },
    /// Like `check`, and write the model tables to a file when the model exists.
    Model {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print an order-dependence witness, if any pair is incompatible.
    Witness { file: PathBuf },
    /// Built-in demonstrations.
    Demo {
        #[command(subcommand)]
        demo: Demo,
    },
    /// Fixture generators.
    Gen {
        #[command(subcommand)]
        generator: Generator,
    },
}

#[derive(Subcommand, Debug)]
enum Demo {
    /// Phase velocity versus node number on a truncated string.
    Wave {
        #[arg(long, default_value_t = 4)]
        modes: usize,
    },
}

#[derive(Subcommand, Debug)]
enum Generator {
    /// Random scenario document on stdout.
    Random {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        count: usize,
        #[arg(long, action = clap::ArgAction::Set)]
        compatible: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Failure carrying the exit status it should produce.
struct Failure {
    status: Status,
    error: anyhow::Error,
}

impl Failure {
    fn input(error: impl Into<anyhow::Error>) -> Self {
        Self {
            status: Status::InputError,
            error: error.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        let status = match error.root() {
            Error::Capacity { .. } | Error::Scenario(_) => Status::InputError,
            _ => Status::VerificationFailure,
        };
        Self {
            status,
            error: error.into(),
        }
    }
}

fn load(path: &Path, global: &Global) -> Result<Scenario, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::input)?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".into());
    let mut scenario = parse_scenario_with_id(&text, &id)
        .with_context(|| format!("invalid scenario {}", path.display()))
        .map_err(Failure::input)?;
    apply_overrides(&mut scenario, global);
    Ok(scenario)
}

fn apply_overrides(scenario: &mut Scenario, global: &Global) {
    if let Some(t) = global.tol_compat {
        scenario.options.tol_compat = t;
    }
    if let Some(t) = global.tol_model {
        scenario.options.tol_model = t;
    }
    if let Some(k) = global.random_states {
        scenario.options.random_states = k;
    }
}

fn emit(report: &RunReport, format: Format) {
    match format {
        Format::Text => print!("{}", render_text(report)),
        Format::Structured => println!("{}", report.to_json()),
    }
}

fn write_model(scenario: &Scenario, out: &Path) -> Result<(), Failure> {
    let states = luders::model::probe_states_with_random(scenario, scenario.options.random_states);
    let model = UnderlyingModel::build(scenario, &states)?;
    let doc =
        serde_json::to_string_pretty(&ModelDoc::from(&model)).expect("model tables serialize");
    fs::write(out, doc + "\n")
        .with_context(|| format!("cannot write {}", out.display()))
        .map_err(Failure::input)
}

fn run(cli: Cli) -> Result<Status, Failure> {
    let global = &cli.global;
    match cli.command {
        Command::Check { file } => {
            let report = run_check(&load(&file, global)?)?;
            emit(&report, global.format);
            Ok(report.status)
        }
        Command::Model { file, out } => {
            let scenario = load(&file, global)?;
            let report = run_check(&scenario)?;
            if report.status == Status::Compatible {
                write_model(&scenario, &out)?;
            }
            emit(&report, global.format);
            Ok(report.status)
        }
        Command::Witness { file } => {
            let scenario = load(&file, global)?;
            let compat = scenario_pairwise_check(&scenario)?;
            let doc = compat.witness.as_ref().map(WitnessDoc::from);
            match (global.format, &doc) {
                (Format::Structured, _) => {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&doc).expect("witness serializes")
                    )
                }
                (Format::Text, None) => println!("no witness: all pairs compatible"),
                (Format::Text, Some(w)) => {
                    println!("pair: {} / {}", w.pair[0], w.pair[1]);
                    println!("values: {} / {}", w.values[0], w.values[1]);
                    println!("p_ab = {:.15}", w.p_ab);
                    println!("p_ba = {:.15}", w.p_ba);
                    println!("violation = {:.15}", w.violation);
                    let im = w
                        .state
                        .im
                        .clone()
                        .unwrap_or_else(|| vec![0.0; w.state.re.len()]);
                    for (re, im) in w.state.re.iter().zip(im) {
                        println!("  {re:+.15} {im:+.15}i");
                    }
                }
            }
            Ok(if doc.is_some() {
                Status::Incompatible
            } else {
                Status::Compatible
            })
        }
        Command::Demo {
            demo: Demo::Wave { modes },
        } => {
            let states = global.random_states.unwrap_or(50);
            let report = run_wave_demo(modes, states)?;
            emit(&report, global.format);
            Ok(report.status)
        }
        Command::Gen {
            generator:
                Generator::Random {
                    dim,
                    count,
                    compatible,
                    seed,
                },
        } => {
            let mut scenario =
                generate_random_scenario(dim, count, compatible, seed).map_err(Failure::input)?;
            apply_overrides(&mut scenario, global);
            println!("{}", scenario.to_json());
            Ok(Status::Compatible)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                Status::InputError.code() as u8
            } else {
                0
            });
        }
    };
    match run(cli) {
        Ok(status) => ExitCode::from(status.code() as u8),
        Err(Failure { status, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(status.code() as u8)
        }
    }
}
