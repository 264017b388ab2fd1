//! The heat-flow experiment: a seeded suite of solvable boards, each solved
//! with no hot list and with the vertical or horizontal move equality as the
//! hot list, recording how many clauses every run generates.

mod plot;
mod records;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::clause::{Clause, ListName, Origin};
use crate::parser::ProblemSpec;
use crate::prover::{Prover, ProverConfig, ProverError, ProverResult};
use crate::puzzle::{encode_clause, goal_clause, horizontal_move_eq, random_board, vertical_move_eq, Board};

pub use plot::{scatter_svg, ScatterOptions, ScatterPlot};
pub use records::{read_csv, write_csv, CSV_HEADER};

/// Which move equalities go into the hot list. Both always stay usable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FlowConfig {
    None,
    Vertical,
    Horizontal,
    Both,
}

impl FlowConfig {
    pub const ALL: [FlowConfig; 4] = [FlowConfig::None, FlowConfig::Vertical, FlowConfig::Horizontal, FlowConfig::Both];

    pub fn name(self) -> &'static str {
        match self {
            FlowConfig::None => "none",
            FlowConfig::Vertical => "vertical",
            FlowConfig::Horizontal => "horizontal",
            FlowConfig::Both => "both",
        }
    }

    /// Hot-list clauses for a board width.
    pub fn hot_list(self, width: usize) -> Vec<Clause> {
        let as_hot = |mut c: Clause| {
            c.origin = Origin::Input(ListName::Hot);
            c
        };
        match self {
            FlowConfig::None => Vec::new(),
            FlowConfig::Vertical => vec![as_hot(vertical_move_eq(width))],
            FlowConfig::Horizontal => vec![as_hot(horizontal_move_eq(width))],
            FlowConfig::Both => vec![as_hot(vertical_move_eq(width)), as_hot(horizontal_move_eq(width))],
        }
    }
}

impl fmt::Display for FlowConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FlowConfig {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<FlowConfig, ExperimentError> {
        FlowConfig::ALL
            .into_iter()
            .find(|f| f.name() == s.trim())
            .ok_or_else(|| ExperimentError::UnknownFlow(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Proof,
    Saturated,
    Budget,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Proof => "proof",
            Verdict::Saturated => "saturated",
            Verdict::Budget => "budget",
        }
    }

    pub fn from_name(s: &str) -> Option<Verdict> {
        match s {
            "proof" => Some(Verdict::Proof),
            "saturated" => Some(Verdict::Saturated),
            "budget" => Some(Verdict::Budget),
            _ => None,
        }
    }
}

impl From<&ProverResult> for Verdict {
    fn from(r: &ProverResult) -> Verdict {
        match r {
            ProverResult::Proof { .. } => Verdict::Proof,
            ProverResult::Saturated(_) => Verdict::Saturated,
            ProverResult::BudgetExceeded(_) => Verdict::Budget,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub board_id: u32,
    pub board: Board,
    pub flow: FlowConfig,
    pub result: Verdict,
    pub generated: u64,
    pub retained: u64,
    pub given: u64,
    pub moves: Option<u64>,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AreaLabel {
    /// Only the vertical hot list cut the clause count.
    A,
    /// Only the horizontal hot list did.
    B,
    /// Both did.
    C,
    /// Neither did.
    D,
}

impl fmt::Display for AreaLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("unknown flow {0:?}; expected none, vertical, horizontal or both")]
    UnknownFlow(String),
    #[error("records for classification must share one board and use flows none/vertical/horizontal")]
    MismatchedRecords,
    #[error("csv row {row}: {message}")]
    Csv { row: usize, message: String },
    #[error("the suite is empty")]
    EmptySuite,
    #[error(transparent)]
    Prover(#[from] ProverError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn generate_suite(n: usize, base_seed: u64, width: usize) -> Vec<Board> {
    (0..n as u64).map(|i| random_board(base_seed.wrapping_add(i), width)).collect()
}

/// Usable: both move equalities. Sos: the board. Passive: the negated goal.
pub fn puzzle_problem(board: &Board, flow: FlowConfig) -> ProblemSpec {
    let w = board.width();
    ProblemSpec {
        usable: vec![horizontal_move_eq(w), vertical_move_eq(w)],
        sos: vec![encode_clause(board)],
        hot: flow.hot_list(w),
        passive: vec![goal_clause(w)],
    }
}

pub fn run_board(board_id: u32, board: &Board, flow: FlowConfig, config: &ProverConfig) -> Result<RunRecord, ProverError> {
    let mut prover = Prover::new(&puzzle_problem(board, flow), config.clone())?;
    let result = prover.run();
    let stats = result.stats();
    Ok(RunRecord {
        board_id,
        board: board.clone(),
        flow,
        result: Verdict::from(&result),
        generated: stats.generated,
        retained: stats.retained,
        given: stats.given,
        moves: stats.proof_moves,
        wall_ms: stats.wall_ms,
    })
}

/// Runs every (board, flow) pair on up to `workers` threads. Records come back
/// sorted by board id, then flow.
pub fn run_experiment(
    suite: &[Board],
    flows: &[FlowConfig],
    config: &ProverConfig,
    workers: usize,
) -> Result<Vec<RunRecord>, ExperimentError> {
    if suite.is_empty() {
        return Err(ExperimentError::EmptySuite);
    }
    let mut flows = flows.to_vec();
    flows.sort();
    flows.dedup();
    let jobs: Vec<(u32, &Board, FlowConfig)> = suite
        .iter()
        .enumerate()
        .flat_map(|(i, b)| flows.iter().map(move |&f| (i as u32, b, f)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    let mut records = pool.install(|| {
        jobs.par_iter()
            .map(|&(id, board, flow)| run_board(id, board, flow, config))
            .collect::<Result<Vec<_>, _>>()
    })?;
    records.sort_by_key(|r| (r.board_id, r.flow));
    Ok(records)
}

/// Labels a board by which hot lists brought its clause count to at most
/// `theta` times the baseline count.
pub fn classify(none: &RunRecord, vertical: &RunRecord, horizontal: &RunRecord, theta: f64) -> Result<AreaLabel, ExperimentError> {
    let same_board = none.board_id == vertical.board_id && none.board_id == horizontal.board_id;
    let flows_ok = none.flow == FlowConfig::None
        && vertical.flow == FlowConfig::Vertical
        && horizontal.flow == FlowConfig::Horizontal;
    if !same_board || !flows_ok {
        return Err(ExperimentError::MismatchedRecords);
    }
    let threshold = theta * none.generated as f64;
    let v = vertical.generated as f64 <= threshold;
    let h = horizontal.generated as f64 <= threshold;
    Ok(match (v, h) {
        (true, false) => AreaLabel::A,
        (false, true) => AreaLabel::B,
        (true, true) => AreaLabel::C,
        (false, false) => AreaLabel::D,
    })
}

/// Area labels for every board that has all three flows, keyed by board id.
pub fn classify_all(records: &[RunRecord], theta: f64) -> Vec<(u32, AreaLabel)> {
    let find = |id: u32, flow: FlowConfig| records.iter().find(|r| r.board_id == id && r.flow == flow);
    let mut ids: Vec<u32> = records.iter().map(|r| r.board_id).collect();
    ids.sort_unstable();
    ids.dedup();
    ids.into_iter()
        .filter_map(|id| {
            let (n, v, h) = (find(id, FlowConfig::None)?, find(id, FlowConfig::Vertical)?, find(id, FlowConfig::Horizontal)?);
            classify(n, v, h, theta).ok().map(|label| (id, label))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(id: u32, flow: FlowConfig, generated: u64) -> RunRecord {
        RunRecord {
            board_id: id,
            board: Board::goal(3),
            flow,
            result: Verdict::Proof,
            generated,
            retained: 0,
            given: 0,
            moves: Some(0),
            wall_ms: 0.0,
        }
    }

    fn label(n: u64, v: u64, h: u64, theta: f64) -> AreaLabel {
        classify(
            &record(0, FlowConfig::None, n),
            &record(0, FlowConfig::Vertical, v),
            &record(0, FlowConfig::Horizontal, h),
            theta,
        )
        .unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(label(1000, 400, 950, 0.9), AreaLabel::A);
        assert_eq!(label(1000, 950, 400, 0.9), AreaLabel::B);
        assert_eq!(label(1000, 400, 300, 0.9), AreaLabel::C);
        assert_eq!(label(1000, 990, 995, 0.9), AreaLabel::D);
    }

    #[test]
    fn classify_rejects_mismatch() {
        let r = classify(
            &record(0, FlowConfig::None, 1),
            &record(1, FlowConfig::Vertical, 1),
            &record(0, FlowConfig::Horizontal, 1),
            0.9,
        );
        assert!(matches!(r, Err(ExperimentError::MismatchedRecords)));
        let r = classify(
            &record(0, FlowConfig::Vertical, 1),
            &record(0, FlowConfig::Vertical, 1),
            &record(0, FlowConfig::Horizontal, 1),
            0.9,
        );
        assert!(r.is_err());
    }

    #[test]
    fn classify_is_monotone_in_theta() {
        let rank = |l: AreaLabel| match l {
            AreaLabel::D => 0,
            AreaLabel::A | AreaLabel::B => 1,
            AreaLabel::C => 2,
        };
        for (n, v, h) in [(1000, 400, 950), (1000, 990, 995), (500, 501, 10), (80, 72, 73)] {
            let mut last = 0;
            for step in 0..=20 {
                let theta = step as f64 * 0.1;
                let r = rank(label(n, v, h, theta));
                assert!(r >= last, "theta {theta}");
                last = r;
            }
        }
    }

    #[test]
    fn suites_are_seeded() {
        let a = generate_suite(20, 5, 3);
        assert_eq!(a, generate_suite(20, 5, 3));
        assert_eq!(generate_suite(1, 9, 3), generate_suite(1, 9, 3));
        assert!(a.iter().all(|b| crate::puzzle::is_solvable(b) && b.hole_index() == 8));
    }

    #[test]
    fn goal_board_under_every_flow() {
        let records = run_experiment(&[Board::goal(3)], &FlowConfig::ALL, &ProverConfig::default(), 2).unwrap();
        assert_eq!(records.len(), 4);
        for (r, flow) in records.iter().zip(FlowConfig::ALL) {
            assert_eq!(r.flow, flow);
            assert_eq!(r.result, Verdict::Proof);
            assert_eq!(r.generated, 0);
        }
    }

    #[test]
    fn records_independent_of_worker_count() {
        let suite = generate_suite(6, 100, 3);
        let flows = [FlowConfig::Horizontal, FlowConfig::None];
        let strip = |mut rs: Vec<RunRecord>| {
            rs.iter_mut().for_each(|r| r.wall_ms = 0.0);
            rs
        };
        let one = strip(run_experiment(&suite, &flows, &ProverConfig::default(), 1).unwrap());
        let four = strip(run_experiment(&suite, &flows, &ProverConfig::default(), 4).unwrap());
        assert_eq!(one, four);
        assert_eq!(one[0].flow, FlowConfig::None);
        // a board's numbers don't depend on which suite it sits in
        let alone = run_board(0, &suite[3], FlowConfig::Horizontal, &ProverConfig::default()).unwrap();
        let in_suite = one.iter().find(|r| r.board == suite[3] && r.flow == FlowConfig::Horizontal).unwrap();
        assert_eq!((alone.generated, alone.retained, alone.given), (in_suite.generated, in_suite.retained, in_suite.given));
    }

    #[test]
    fn flow_names_round_trip() {
        for f in FlowConfig::ALL {
            assert_eq!(f.name().parse::<FlowConfig>().unwrap(), f);
        }
        assert!("diagonal".parse::<FlowConfig>().is_err());
    }
}
