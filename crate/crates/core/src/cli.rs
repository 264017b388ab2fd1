//! `heatflow` command line.
//!
//! Exit status: 0 success, 1 no proof (saturated) or I/O failure, 2 usage
//! error, 3 generated-clause budget exhausted, 4 parse or decode error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::clause::ListName;
use crate::experiment::{
    classify_all, generate_suite, puzzle_problem, read_csv, run_experiment, scatter_svg, write_csv, ExperimentError,
    FlowConfig, ScatterOptions,
};
use crate::parser::{parse, ProblemSpec};
use crate::prover::{Prover, ProverConfig, ProverResult, DEFAULT_MAX_GENERATED};
use crate::puzzle::{decode, goal_clause, inversions, is_solvable, Board};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO_PROOF: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_INPUT: i32 = 4;

/// Environment variable holding the default worker count for `experiment`.
pub const WORKERS_ENV: &str = "HEATFLOW_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "heatflow", version, about = "Paramodulation prover with hot-list heat flow for sliding-tile puzzles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count inversions and decide solvability of a board.
    Check {
        /// Board in flat form, e.g. 3:2,3,6,1,7,8,5,4,0 (0 is the hole).
        board: String,
    },
    /// Write a seeded suite of solvable boards, one per line.
    Gen {
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        width: usize,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Prove that a board reaches the goal.
    Solve(SolveArgs),
    /// Run the heat-flow experiment and write one CSV row per board and flow.
    Experiment(ExperimentArgs),
    /// Render an experiment CSV as an SVG scatter plot.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Problem file in the clause-list input language.
    #[arg(long, conflicts_with = "board", required_unless_present = "board")]
    pub input: Option<PathBuf>,
    /// Board in flat form, e.g. 3:1,3,5,4,6,8,7,2,0.
    #[arg(long)]
    pub board: Option<String>,
    /// Hot list to add: none, vertical, horizontal or both.
    #[arg(long, default_value = "none")]
    pub flow: String,
    #[arg(long, default_value_t = DEFAULT_MAX_GENERATED)]
    pub budget: u64,
    #[arg(long)]
    pub max_weight: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub heat_level: u32,
    /// Print the board after every move of the proof.
    #[arg(long)]
    pub show_moves: bool,
    /// Exit 0 when the search saturates without a proof.
    #[arg(long)]
    pub allow_saturation: bool,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub width: usize,
    /// Comma-separated flows.
    #[arg(long, default_value = "none,vertical,horizontal", value_delimiter = ',')]
    pub flows: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_MAX_GENERATED)]
    pub budget: u64,
    #[arg(long)]
    pub csv_out: PathBuf,
    #[arg(long, env = WORKERS_ENV)]
    pub workers: Option<usize>,
    /// Write 0 in the wall_ms column so that repeated runs give identical files.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub csv_in: PathBuf,
    #[arg(long, default_value = "vertical")]
    pub x_flow: String,
    #[arg(long, default_value = "horizontal")]
    pub y_flow: String,
    #[arg(long)]
    pub svg_out: PathBuf,
    #[arg(long)]
    pub log_axes: bool,
    /// Color points by heat-resisting area at this threshold.
    #[arg(long)]
    pub theta: Option<f64>,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Failure {
        Failure { code: EXIT_INPUT, message: message.to_string() }
    }

    fn io(message: impl ToString) -> Failure {
        Failure { code: EXIT_NO_PROOF, message: message.to_string() }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Failure {
        match e {
            ExperimentError::Csv { .. } | ExperimentError::UnknownFlow(_) => Failure::input(e),
            ExperimentError::Io(_) | ExperimentError::Prover(_) | ExperimentError::MismatchedRecords | ExperimentError::EmptySuite => {
                Failure::io(e)
            }
        }
    }
}

/// Parses `args` (program name first) and runs the command, writing results
/// to `out` and diagnostics to `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Check { board } => {
            let board: Board = board.parse().map_err(Failure::input)?;
            let verdict = if is_solvable(&board) { "SOLVABLE" } else { "UNSOLVABLE" };
            writeln!(out, "inversions={} {verdict}", inversions(&board)).map_err(Failure::io)?;
            Ok(EXIT_OK)
        }
        Command::Gen { n, seed, width, out: path } => {
            if !(2..=crate::puzzle::MAX_WIDTH).contains(&width) {
                return Err(Failure::input(crate::puzzle::BoardError::Width(width)));
            }
            let boards = generate_suite(n, seed, width);
            let mut text = String::new();
            for b in boards {
                text.push_str(&b.to_string());
                text.push('\n');
            }
            match path {
                Some(p) => std::fs::write(&p, text).map_err(|e| Failure::io(format!("{}: {e}", p.display())))?,
                None => out.write_all(text.as_bytes()).map_err(Failure::io)?,
            }
            Ok(EXIT_OK)
        }
        Command::Solve(args) => solve(args, out),
        Command::Experiment(args) => experiment(args, out, err),
        Command::Plot(args) => plot(args, out, err),
    }
}

fn solve(args: SolveArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let flow: FlowConfig = args.flow.parse().map_err(Failure::input)?;
    let problem = match (&args.input, &args.board) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
            let mut problem = parse(&text).map_err(|e| Failure::input(format!("{}:{e}", path.display())))?;
            complete_problem(&mut problem, flow)?;
            problem
        }
        (None, Some(board)) => {
            let board: Board = board.parse().map_err(Failure::input)?;
            puzzle_problem(&board, flow)
        }
        (None, None) => unreachable!("clap requires --input or --board"),
    };
    let config = ProverConfig { max_generated: args.budget, max_weight: args.max_weight, heat_level: args.heat_level };
    let mut prover = Prover::new(&problem, config).map_err(Failure::input)?;
    let result = prover.run();
    let stats = result.stats();
    let w = |out: &mut dyn Write, s: String| writeln!(out, "{s}").map_err(Failure::io);
    w(out, format!("verdict: {}", result.verdict()))?;
    let moves = stats.proof_moves.map_or_else(|| "-".to_string(), |m| m.to_string());
    w(
        out,
        format!(
            "generated={} retained={} given={} moves={moves} wall_ms={:.3}",
            stats.generated, stats.retained, stats.given, stats.wall_ms
        ),
    )?;
    match result {
        ProverResult::Proof { final_clause, .. } => {
            if args.show_moves {
                let steps = prover.extract_moves(final_clause).map_err(Failure::io)?;
                if let Some((first, _)) = steps.first() {
                    w(out, format!("start {first}\n{}", first.render()))?;
                }
                for (i, (_, next)) in steps.iter().enumerate() {
                    w(out, format!("move {} {next}\n{}", i + 1, next.render()))?;
                }
            }
            Ok(EXIT_OK)
        }
        ProverResult::Saturated(_) => Ok(if args.allow_saturation { EXIT_OK } else { EXIT_NO_PROOF }),
        ProverResult::BudgetExceeded(_) => Ok(EXIT_BUDGET),
    }
}

/// Adds the flow's hot list and, when the file has no passive list, the
/// negated goal for the width of its first board state.
fn complete_problem(problem: &mut ProblemSpec, flow: FlowConfig) -> Result<(), Failure> {
    let width = problem
        .sos
        .iter()
        .find_map(|c| match c.literals.as_slice() {
            [lit] => decode(lit).ok().map(|b| b.width()),
            _ => None,
        });
    if flow != FlowConfig::None || problem.passive.is_empty() {
        let width = width.ok_or_else(|| Failure::input("no STATE board in list(sos) to derive the goal or hot list from"))?;
        problem.hot.extend(flow.hot_list(width));
        if problem.passive.is_empty() {
            let mut goal = goal_clause(width);
            goal.origin = crate::clause::Origin::Input(ListName::Passive);
            problem.passive.push(goal);
        }
    }
    Ok(())
}

fn experiment(args: ExperimentArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    if !(2..=crate::puzzle::MAX_WIDTH).contains(&args.width) {
        return Err(Failure::input(crate::puzzle::BoardError::Width(args.width)));
    }
    let flows = args
        .flows
        .iter()
        .map(|f| f.parse::<FlowConfig>())
        .collect::<Result<Vec<_>, _>>()?;
    let workers = args
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let suite = generate_suite(args.n, args.seed, args.width);
    let config = ProverConfig::with_budget(args.budget);
    let mut records = run_experiment(&suite, &flows, &config, workers)?;
    if args.no_timing {
        records.iter_mut().for_each(|r| r.wall_ms = 0.0);
    }
    let file = File::create(&args.csv_out).map_err(|e| Failure::io(format!("{}: {e}", args.csv_out.display())))?;
    write_csv(BufWriter::new(file), &records)?;
    let budget_hits = records.iter().filter(|r| r.result != crate::experiment::Verdict::Proof).count();
    writeln!(out, "wrote {} records for {} boards to {}", records.len(), suite.len(), args.csv_out.display())
        .map_err(Failure::io)?;
    if let (Some(min), Some(max)) = (
        records.iter().map(|r| r.generated).filter(|&g| g > 0).min(),
        records.iter().map(|r| r.generated).max(),
    ) {
        writeln!(out, "generated clauses range {min}..{max} (ratio {:.2})", max as f64 / min as f64).map_err(Failure::io)?;
    }
    if budget_hits > 0 {
        let _ = writeln!(err, "warning: {budget_hits} run(s) ended without a proof");
    }
    Ok(EXIT_OK)
}

fn plot(args: PlotArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let x_flow: FlowConfig = args.x_flow.parse()?;
    let y_flow: FlowConfig = args.y_flow.parse()?;
    let file = File::open(&args.csv_in).map_err(|e| Failure::io(format!("{}: {e}", args.csv_in.display())))?;
    let records = read_csv(BufReader::new(file))?;
    let options = ScatterOptions { log_axes: args.log_axes, theta: args.theta, ..Default::default() };
    let plot = scatter_svg(&records, x_flow, y_flow, &options);
    std::fs::write(&args.svg_out, &plot.svg).map_err(|e| Failure::io(format!("{}: {e}", args.svg_out.display())))?;
    writeln!(out, "plotted {} points to {}", plot.points, args.svg_out.display()).map_err(Failure::io)?;
    if let Some(theta) = args.theta {
        let labels = classify_all(&records, theta);
        for area in ["A", "B", "C", "D"] {
            let count = labels.iter().filter(|(_, l)| l.to_string() == area).count();
            writeln!(out, "area {area}: {count}").map_err(Failure::io)?;
        }
    }
    if plot.skipped > 0 {
        let _ = writeln!(err, "warning: skipped {} board(s) missing {x_flow} or {y_flow} data", plot.skipped);
    }
    Ok(EXIT_OK)
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
