//! Browser bindings for the heatflow prover. Every export takes and returns
//! plain strings; results are JSON objects with either the data or an
//! `error` field, so the same functions are testable natively.

use heatflow::experiment::{generate_suite, puzzle_problem, run_board, scatter_svg, FlowConfig, ScatterOptions};
use heatflow::puzzle::{bfs_oracle, inversions, is_solvable, random_board, Board};
use heatflow::{Prover, ProverConfig, ProverResult};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Keeps demo runs interactive; the hardest 3x3 boards need a few hundred
/// thousand generated clauses.
pub const DEMO_BUDGET: u64 = 1_500_000;
const MAX_SUITE: usize = 40;

#[derive(Serialize)]
struct Failure {
    error: String,
}

fn to_json<T: Serialize>(result: Result<T, String>) -> String {
    match result {
        Ok(value) => serde_json::to_string(&value),
        Err(error) => serde_json::to_string(&Failure { error }),
    }
    .expect("plain data serializes")
}

fn parse_board(text: &str) -> Result<Board, String> {
    let text = text.trim();
    let board = if text.contains(':') {
        text.parse::<Board>()
    } else {
        // bare cell list: the width follows from the cell count
        let count = text.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).count();
        let width = (1..=heatflow::puzzle::MAX_WIDTH).find(|w| w * w == count).unwrap_or(0);
        format!("{width}:{}", text.split_whitespace().collect::<Vec<_>>().join(",")).parse::<Board>()
    };
    board.map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct CheckReport {
    board: String,
    width: usize,
    cells: Vec<u8>,
    inversions: usize,
    solvable: bool,
    /// Fewest moves to the goal, for boards small enough to search.
    distance: Option<u32>,
}

/// Inversion count, solvability and (up to 3x3) the BFS distance of a board
/// given as `3:1,2,3,4,5,6,7,8,0` or a bare cell list.
#[wasm_bindgen]
pub fn check_board(text: &str) -> String {
    to_json(parse_board(text).map(|b| CheckReport {
        board: b.to_string(),
        width: b.width(),
        cells: b.cells().to_vec(),
        inversions: inversions(&b),
        solvable: is_solvable(&b),
        distance: if b.width() <= 3 && is_solvable(&b) { bfs_oracle(&b) } else { None },
    }))
}

/// A seeded random solvable board with the hole in the last cell.
#[wasm_bindgen]
pub fn random_puzzle(seed: u32, width: u32) -> String {
    let width = (width as usize).clamp(2, 4);
    random_board(seed as u64, width).to_string()
}

#[derive(Serialize)]
struct SolveReport {
    verdict: &'static str,
    flow: &'static str,
    generated: u64,
    retained: u64,
    given: u64,
    wall_ms: f64,
    /// Board after each step, starting with the input.
    path: Vec<Vec<u8>>,
    width: usize,
}

/// Runs the prover on one board under a heat flow.
#[wasm_bindgen]
pub fn solve(text: &str, flow: &str, budget: u32) -> String {
    to_json(solve_inner(text, flow, budget as u64))
}

fn solve_inner(text: &str, flow: &str, budget: u64) -> Result<SolveReport, String> {
    let board = parse_board(text)?;
    let flow: FlowConfig = flow.parse().map_err(|e| format!("{e}"))?;
    let budget = if budget == 0 { DEMO_BUDGET } else { budget.min(DEMO_BUDGET) };
    let mut prover = Prover::new(&puzzle_problem(&board, flow), ProverConfig::with_budget(budget)).map_err(|e| e.to_string())?;
    let result = prover.run();
    let stats = result.stats().clone();
    let mut path = Vec::new();
    if let ProverResult::Proof { final_clause, .. } = result {
        let steps = prover.extract_moves(final_clause).map_err(|e| e.to_string())?;
        path.push(board.cells().to_vec());
        path.extend(steps.iter().map(|(_, next)| next.cells().to_vec()));
    }
    Ok(SolveReport {
        verdict: result.verdict(),
        flow: flow.name(),
        generated: stats.generated,
        retained: stats.retained,
        given: stats.given,
        wall_ms: stats.wall_ms,
        path,
        width: board.width(),
    })
}

/// Solves `n` seeded boards under no, vertical and horizontal heat flow and
/// returns the vertical-versus-horizontal scatter plot as SVG text. Runs on
/// the calling thread, one board at a time.
#[wasm_bindgen]
pub fn scatter(n: u32, seed: u32, log_axes: bool) -> String {
    scatter_inner(n as usize, seed as u64, log_axes).unwrap_or_else(|e| to_json::<()>(Err(e)))
}

fn scatter_inner(n: usize, seed: u64, log_axes: bool) -> Result<String, String> {
    if n == 0 || n > MAX_SUITE {
        return Err(format!("suite size must be between 1 and {MAX_SUITE}"));
    }
    let config = ProverConfig::with_budget(DEMO_BUDGET);
    let mut records = Vec::new();
    for (id, board) in generate_suite(n, seed, 3).iter().enumerate() {
        for flow in [FlowConfig::None, FlowConfig::Vertical, FlowConfig::Horizontal] {
            records.push(run_board(id as u32, board, flow, &config).map_err(|e| e.to_string())?);
        }
    }
    let options = ScatterOptions {
        log_axes,
        theta: Some(0.9),
        title: Some(format!("{n} boards from seed {seed}: vertical vs horizontal heat flow")),
        ..Default::default()
    };
    Ok(scatter_svg(&records, FlowConfig::Vertical, FlowConfig::Horizontal, &options).svg)
}
