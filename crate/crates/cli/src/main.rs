//! `bcn` — data-driven analysis and control of Boolean control networks.
//!
//! Three subcommands wrap the library end to end: `simulate` produces trace
//! files from model files, `analyze` answers questions a trace can settle
//! (identifiability, equilibria, reachability, basins, target states,
//! cycles), and `synthesize` builds feedback matrices for safe control and
//! output regulation, optionally verifying them against a batch of
//! compatible models.
//!
//! Exit codes are a stable contract: 0 success (solvable and, with
//! `--verify`, verified), 1 unsolvable or not informative, 2 input error,
//! 3 verification failure.

mod report;

use bcn_core::{
    basin, cycles_within, data_equilibria, informative_for_reachability, output_regulation,
    random_inputs, safe_control, target_states, verify_output_regulation, verify_safe_control,
    Bcn, CanonicalVector, DataSet, Error as CoreError, ExperimentTrace, TraceFile,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use thiserror::Error;

#[derive(Parser)]
#[command(name = "bcn", version, about = "Data-driven analysis and control of Boolean control networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Human,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a model file and emit the resulting trace file.
    Simulate(SimulateArgs),
    /// Answer questions a recorded trace can settle.
    Analyze(AnalyzeArgs),
    /// Synthesize feedback matrices from a recorded trace.
    Synthesize(SynthesizeArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Model file: JSON with fields N, M, P, L, H (1-based indices).
    model: PathBuf,
    /// Initial state, as a 1-based canonical index.
    #[arg(long)]
    x0: usize,
    /// Comma-separated 1-based input indices to apply, in order.
    #[arg(long, value_delimiter = ',', conflicts_with = "random")]
    inputs: Option<Vec<usize>>,
    /// Draw this many inputs uniformly at random instead.
    #[arg(long, value_name = "LENGTH")]
    random: Option<usize>,
    /// Seed for --random; identical seeds reproduce the schedule.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Trace file: JSON with fields N, M, P, experiments.
    trace: PathBuf,
    #[command(subcommand)]
    question: AnalyzeCommand,
}

#[derive(Subcommand)]
enum AnalyzeCommand {
    /// Do the data determine the network uniquely?
    Identifiability,
    /// Recover the unique compatible network from informative data.
    Identify,
    /// Equilibria compatible with the data, with witnessing inputs.
    Equilibria,
    /// Does every state have an observed path into the target set?
    Reach {
        /// Comma-separated target states (1-based).
        #[arg(long, value_delimiter = ',', required = true)]
        target: Vec<usize>,
    },
    /// Layered backward-reachability certificate for the target set.
    Basin {
        /// Comma-separated target states (1-based).
        #[arg(long, value_delimiter = ',', required = true)]
        target: Vec<usize>,
    },
    /// States observed at least once with the desired output.
    Targets {
        /// Desired output, as a 1-based canonical index.
        #[arg(long)]
        ystar: usize,
    },
    /// Data-witnessed cycles among the states emitting the desired output.
    Cycles {
        /// Desired output, as a 1-based canonical index.
        #[arg(long)]
        ystar: usize,
    },
}

#[derive(Args)]
struct SynthesizeArgs {
    /// Trace file: JSON with fields N, M, P, experiments.
    trace: PathBuf,
    #[command(subcommand)]
    problem: SynthesizeCommand,
}

#[derive(Subcommand)]
enum SynthesizeCommand {
    /// Keep safe states safe forever; steer unsafe states in.
    Safe {
        /// Comma-separated unsafe states (may be empty).
        #[arg(long = "unsafe", value_delimiter = ',', value_name = "STATES", num_args = 0..)]
        unsafe_states: Vec<usize>,
        #[command(flatten)]
        verify: VerifyArgs,
    },
    /// Force the output to a desired value after finitely many steps.
    Regulate {
        /// Desired output, as a 1-based canonical index.
        #[arg(long)]
        ystar: usize,
        #[command(flatten)]
        verify: VerifyArgs,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Check the feedback against this many compatible models.
    #[arg(long = "verify", value_name = "BUDGET")]
    budget: Option<usize>,
    /// Sampling seed for the verification battery.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Core(#[from] CoreError),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            // A definite negative answer to the posed question.
            CliError::Core(CoreError::NotInformative) => 1,
            // Everything else is a problem with the input.
            _ => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let (payload, code) = match cli.command {
        Command::Simulate(args) => cmd_simulate(args, cli.format)?,
        Command::Analyze(args) => cmd_analyze(args, cli.format)?,
        Command::Synthesize(args) => cmd_synthesize(args, cli.format)?,
    };
    emit(&payload, cli.out.as_deref())?;
    Ok(code)
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(payload: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, format!("{payload}\n")).map_err(|source| CliError::Write {
                path: path.to_path_buf(),
                source,
            })
        }
        None => {
            println!("{payload}");
            Ok(())
        }
    }
}

fn render(value: Value, human: String, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(&value).expect("reports serialize"),
        Format::Human => human,
    }
}

fn load_dataset(path: &Path) -> Result<DataSet, CliError> {
    Ok(TraceFile::from_json(&read_file(path)?)?.into_dataset()?)
}

fn state_set(states: &[usize]) -> BTreeSet<usize> {
    states.iter().copied().collect()
}

fn cmd_simulate(args: SimulateArgs, format: Format) -> Result<(String, u8), CliError> {
    let model = Bcn::from_json(&read_file(&args.model)?)?;
    let x0 = CanonicalVector::new(model.n_states(), args.x0)?;
    let inputs: Vec<CanonicalVector> = match (args.inputs, args.random) {
        (Some(list), None) => list
            .into_iter()
            .map(|i| CanonicalVector::new(model.n_inputs(), i))
            .collect::<Result<_, _>>()?,
        (None, Some(len)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            random_inputs(model.n_inputs(), len, &mut rng)
        }
        (None, None) => Vec::new(),
        (Some(_), Some(_)) => unreachable!("clap rejects --inputs with --random"),
    };
    let sim = model.simulate(&x0, &inputs)?;
    // Single-output models carry no information in y; leave it out so the
    // file matches hand-recorded traces of such systems.
    let outputs = (model.n_outputs() > 1).then_some(sim.outputs);
    let trace = TraceFile {
        n: model.n_states(),
        m: model.n_inputs(),
        p: model.n_outputs(),
        experiments: vec![
            ExperimentTrace::new(sim.states, inputs, outputs).expect("simulation is consistent"),
        ],
    };
    let human = report::trace(&trace);
    let payload = match format {
        Format::Json => trace.to_json(),
        Format::Human => human,
    };
    Ok((payload, 0))
}

fn cmd_analyze(args: AnalyzeArgs, format: Format) -> Result<(String, u8), CliError> {
    let ds = load_dataset(&args.trace)?;
    let payload = match args.question {
        AnalyzeCommand::Identifiability => {
            let informative = ds.is_informative_for_identifiability();
            let mask = ds.knowledge_mask();
            let value = json!({
                "informative": informative,
                "known_columns": mask.known_count(),
                "total_columns": ds.n_states() * ds.n_inputs(),
                "free_columns": mask.free_l_columns()
                    .iter()
                    .map(|&(i, j)| json!([i, j]))
                    .collect::<Vec<_>>(),
            });
            render(value, report::identifiability(&ds), format)
        }
        AnalyzeCommand::Identify => {
            let model = ds.identify()?;
            match format {
                Format::Json => model.to_json(),
                Format::Human => report::model(&model),
            }
        }
        AnalyzeCommand::Equilibria => {
            let equilibria = data_equilibria(&ds);
            let value = json!({
                "equilibria": equilibria.iter().map(|(j, u)| json!({
                    "state": j,
                    "input": u.index(),
                })).collect::<Vec<_>>(),
            });
            render(value, report::equilibria(&equilibria), format)
        }
        AnalyzeCommand::Reach { target } => {
            let target = state_set(&target);
            let reachable = informative_for_reachability(&ds, &target)?;
            let value = json!({
                "target": target.iter().copied().collect::<Vec<_>>(),
                "reachable_from_all": reachable,
            });
            render(value, report::reach(&target, reachable), format)
        }
        AnalyzeCommand::Basin { target } => {
            let result = basin(&ds, &state_set(&target))?;
            let human = report::basin(&result);
            render(result.to_json_value(), human, format)
        }
        AnalyzeCommand::Targets { ystar } => {
            let y = CanonicalVector::new(ds.n_outputs(), ystar)?;
            let states = target_states(&ds, &y)?;
            let value = json!({
                "y_star": ystar,
                "states": states.iter().copied().collect::<Vec<_>>(),
            });
            render(value, report::targets(ystar, &states), format)
        }
        AnalyzeCommand::Cycles { ystar } => {
            let y = CanonicalVector::new(ds.n_outputs(), ystar)?;
            let states = target_states(&ds, &y)?;
            if states.is_empty() {
                let value = json!({
                    "y_star": ystar,
                    "target_states": [],
                    "node_set": [],
                    "cycles": [],
                });
                render(value, format!("no state was observed with output {ystar}"), format)
            } else {
                let cycles = cycles_within(&ds, &states)?;
                let mut value = cycles.to_json_value();
                value["y_star"] = json!(ystar);
                value["target_states"] =
                    json!(states.iter().copied().collect::<Vec<_>>());
                render(value, report::cycles(&cycles), format)
            }
        }
    };
    Ok((payload, 0))
}

fn cmd_synthesize(args: SynthesizeArgs, format: Format) -> Result<(String, u8), CliError> {
    let ds = load_dataset(&args.trace)?;
    match args.problem {
        SynthesizeCommand::Safe {
            unsafe_states,
            verify,
        } => {
            let unsafe_set = state_set(&unsafe_states);
            let result = safe_control(&ds, &unsafe_set)?;
            let mut value = result.to_json_value();
            let mut code = u8::from(!result.solvable());
            let mut verdict_line = String::new();
            if let (Some(budget), Some(k)) = (verify.budget, result.feedback()) {
                let verdict = verify_safe_control(&ds, k, &unsafe_set, budget, verify.seed)?;
                if !verdict.pass {
                    code = 3;
                }
                verdict_line = report::verdict(&verdict);
                value["verdict"] = verdict.to_json_value();
            }
            let human = report::safe_control(&result, &verdict_line);
            Ok((render(value, human, format), code))
        }
        SynthesizeCommand::Regulate { ystar, verify } => {
            let y = CanonicalVector::new(ds.n_outputs(), ystar)?;
            let result = output_regulation(&ds, &y)?;
            let mut value = result.to_json_value();
            let mut code = u8::from(!result.solvable());
            let mut verdict_line = String::new();
            if let (Some(budget), Some(k)) = (verify.budget, result.feedback()) {
                let verdict = verify_output_regulation(&ds, k, &y, budget, verify.seed)?;
                if !verdict.pass {
                    code = 3;
                }
                verdict_line = report::verdict(&verdict);
                value["verdict"] = verdict.to_json_value();
            }
            let human = report::regulation(&result, &verdict_line);
            Ok((render(value, human, format), code))
        }
    }
}
