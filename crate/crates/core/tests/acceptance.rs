//! Acceptance suite. Runs every criterion in order, prints one PASS/FAIL line
//! each and exits non-zero if any failed.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use heatflow::clause::{is_variant, Orientation};
use heatflow::experiment::{
    generate_suite, puzzle_problem, read_csv, run_experiment, scatter_svg, write_csv, FlowConfig, RunRecord,
    ScatterOptions,
};
use heatflow::parser::{format_clause, format_problem, parse};
use heatflow::prover::{para_into, Prover, ProverConfig, ProverResult};
use heatflow::puzzle::{
    apply_move, decode, encode_clause, horizontal_move_eq, inversions, is_solvable, legal_moves, reachable,
    vertical_move_eq, Board, STATE,
};
use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

const SUITE_SIZE: usize = 500;
const SUITE_SEED: u64 = 2024;
const FLOWS: [FlowConfig; 3] = [FlowConfig::None, FlowConfig::Vertical, FlowConfig::Horizontal];

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        // NaN comparisons must fail too
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !($cond) {
            return Err(format!($($msg)+));
        }
    };
}

fn run(number: u32, title: &str, check: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
        let text = panic
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into());
        Err(format!("panic: {text}"))
    });
    let secs = start.elapsed().as_secs_f64();
    let (tag, detail) = match &outcome {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!("criterion {number:>2} {tag}  {title}: {detail} ({secs:.1}s)");
    outcome.is_ok()
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn permutations(n: u8, mut visit: impl FnMut(&[u8])) {
    let mut cells: Vec<u8> = (0..n).collect();
    loop {
        visit(&cells);
        // next lexicographic permutation
        let Some(i) = (0..cells.len() - 1).rev().find(|&i| cells[i] < cells[i + 1]) else {
            return;
        };
        let j = (i + 1..cells.len()).rev().find(|&j| cells[j] > cells[i]).unwrap();
        cells.swap(i, j);
        cells[i + 1..].reverse();
    }
}

fn parity_oracle() -> Outcome {
    let from_goal = reachable(&Board::goal(3));
    let (mut total, mut solvable, mut disagreements) = (0u32, 0u32, 0u32);
    permutations(9, |cells| {
        let b = Board::new(3, cells.to_vec()).unwrap();
        total += 1;
        let s = is_solvable(&b);
        solvable += s as u32;
        disagreements += (s != from_goal.contains_key(&b)) as u32;
    });
    ensure!(total == 362_880, "enumerated {total} boards");
    ensure!(disagreements == 0, "{disagreements} boards disagree with BFS reachability");
    ensure!(solvable == 181_440 && from_goal.len() == 181_440, "{solvable} solvable, {} reachable", from_goal.len());
    Ok(format!("{solvable} of {total} boards solvable, all agree with BFS from the goal"))
}

fn paramodulant_fidelity() -> Outcome {
    let first = parse("list(sos).\nP(gamma,h(f(alpha,y),beta)).\nEQUAL(f(x,gamma),g(x)) | Q(x).\nend_of_list.\n")
        .map_err(|e| e.to_string())?;
    let products = para_into(&first.sos[0], &first.sos[1], Orientation::LeftToRight);
    let expected = parse("list(sos).\nP(gamma,h(g(alpha),beta)) | Q(alpha).\nend_of_list.\n").unwrap();
    ensure!(products.len() == 1, "first example gave {} paramodulants", products.len());
    ensure!(is_variant(&products[0], &expected.sos[0]), "first example gave {}", format_clause(&products[0]));

    let second = parse("list(sos).\nEQUAL(plus(x,0),x).\nEQUAL(plus(minus(y),y),0).\nend_of_list.\n").unwrap();
    let products = para_into(&second.sos[1], &second.sos[0], Orientation::LeftToRight);
    ensure!(products.len() == 1, "second example gave {} paramodulants", products.len());
    ensure!(format_clause(&products[0]) == "EQUAL(minus(0),0)", "second example gave {}", format_clause(&products[0]));
    Ok(format!("{} and {}", format_clause(&expected.sos[0]), format_clause(&products[0])))
}

fn move_semantics() -> Outcome {
    let mut rng = SplitMix64::seed_from_u64(SUITE_SEED);
    let (h, v) = (horizontal_move_eq(3), vertical_move_eq(3));
    let mut successors = 0;
    for trial in 0..1000 {
        let mut cells: Vec<u8> = (0..9).collect();
        for i in (1..cells.len()).rev() {
            cells.swap(i, (rng.next_u64() % (i as u64 + 1)) as usize);
        }
        let b = Board::new(3, cells).unwrap();
        let start = encode_clause(&b);
        for (eq, vertical) in [(&h, false), (&v, true)] {
            let mut derived = BTreeSet::new();
            let mut count = 0;
            for o in Orientation::BOTH {
                for p in para_into(&start, eq, o) {
                    ensure!(p.literals.len() == 1, "board {trial}: non-unit paramodulant");
                    derived.insert(decode(&p.literals[0]).map_err(|e| format!("board {b}: {e}"))?.cells().to_vec());
                    count += 1;
                }
            }
            let legal: BTreeSet<Vec<u8>> = legal_moves(&b)
                .into_iter()
                .filter(|m| m.direction.is_vertical() == vertical)
                .map(|m| apply_move(&b, m).unwrap().cells().to_vec())
                .collect();
            ensure!(count == derived.len(), "board {b}: duplicate paramodulants");
            ensure!(derived == legal, "board {b}: paramodulants {derived:?} vs moves {legal:?}");
            successors += count;
        }
    }
    Ok(format!("1000 boards, {successors} successors, equal to the legal moves per axis"))
}

fn solver_soundness() -> Outcome {
    let suite = generate_suite(100, SUITE_SEED + 1, 3);
    let mut total_moves = 0;
    for (i, b) in suite.iter().enumerate() {
        let mut prover = Prover::new(&puzzle_problem(b, FlowConfig::None), ProverConfig::default()).unwrap();
        let result = prover.run();
        let ProverResult::Proof { final_clause, stats } = result else {
            return Err(format!("board {i} ({b}): {}", result.verdict()));
        };
        let steps = prover.extract_moves(final_clause).map_err(|e| format!("board {i}: {e}"))?;
        ensure!(steps.first().map(|s| &s.0) == Some(b), "board {i}: replay does not start at the board");
        ensure!(steps.last().is_some_and(|s| s.1.is_goal()), "board {i}: replay does not end at the goal");
        for (from, to) in &steps {
            let legal = legal_moves(from).into_iter().any(|m| apply_move(from, m).as_ref() == Ok(to));
            ensure!(legal, "board {i}: {from} -> {to} is not a move");
        }
        ensure!(stats.proof_moves == Some(steps.len() as u64), "board {i}: move count mismatch");
        total_moves += steps.len();
    }
    Ok(format!("100 proofs replayed, {total_moves} legal moves in total"))
}

fn saturation() -> Outcome {
    let mut detail = String::new();
    for seed in 0..20u64 {
        let solvable = heatflow::puzzle::random_board(SUITE_SEED + 100 + seed, 3);
        let mut cells = solvable.cells().to_vec();
        cells.swap(0, 1);
        let b = Board::new(3, cells).unwrap();
        ensure!(!is_solvable(&b), "{b} should be unsolvable");
        let oracle = reachable(&b).len();
        let mut prover = Prover::new(&puzzle_problem(&b, FlowConfig::None), ProverConfig::with_budget(5_000_000)).unwrap();
        let result = prover.run();
        ensure!(matches!(result, ProverResult::Saturated(_)), "{b}: {}", result.verdict());
        let states = prover
            .clauses()
            .iter()
            .filter(|c| c.literals.len() == 1 && c.literals[0].is_positive() && &*c.literals[0].predicate.name() == STATE)
            .count();
        ensure!(states == oracle && oracle == 181_440, "{b}: {states} STATE clauses, BFS reaches {oracle}");
        ensure!(result.stats().retained as usize + 1 == states, "{b}: retained count disagrees");
        if seed == 0 {
            detail = format!("generated {} for {b}", result.stats().generated);
        }
    }
    Ok(format!("20 boards saturated with 181440 STATE clauses each; {detail}"))
}

fn strip_timing(csv: &str) -> String {
    csv.lines().map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head)).collect::<Vec<_>>().join("\n")
}

fn determinism(dir: &Path) -> Result<(String, Vec<RunRecord>, PathBuf), String> {
    let suite = generate_suite(SUITE_SIZE, SUITE_SEED, 3);
    ensure!(suite.iter().all(|b| is_solvable(b) && b.cells()[8] == 0), "suite has unsolvable boards");
    let records =
        run_experiment(&suite, &FLOWS, &ProverConfig::default(), workers()).map_err(|e| e.to_string())?;
    let first = dir.join("first.csv");
    write_csv(std::fs::File::create(&first).unwrap(), &records).map_err(|e| e.to_string())?;

    let second = dir.join("second.csv");
    let out = Command::new(env!("CARGO_BIN_EXE_heatflow"))
        .args(["experiment", "--n", &SUITE_SIZE.to_string(), "--seed", &SUITE_SEED.to_string(), "--width", "3"])
        .args(["--flows", "none,vertical,horizontal", "--csv-out", second.to_str().unwrap()])
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "second run failed: {}", String::from_utf8_lossy(&out.stderr));
    let (a, b) = (std::fs::read_to_string(&first).unwrap(), std::fs::read_to_string(&second).unwrap());
    ensure!(a.lines().count() == 1 + SUITE_SIZE * 3, "{} CSV lines", a.lines().count());
    ensure!(strip_timing(&a) == strip_timing(&b), "the two runs differ outside wall_ms");
    let proofs = records.iter().filter(|r| r.result == heatflow::experiment::Verdict::Proof).count();
    Ok((format!("{} records identical across two runs, {proofs} proofs", records.len()), records, first))
}

fn generated(records: &[RunRecord], id: u32, flow: FlowConfig) -> u64 {
    records.iter().find(|r| r.board_id == id && r.flow == flow).expect("record").generated
}

fn heat_flow_effect(records: &[RunRecord]) -> Outcome {
    let ids: BTreeSet<u32> = records.iter().map(|r| r.board_id).collect();
    let changed = ids
        .iter()
        .filter(|&&id| {
            let base = generated(records, id, FlowConfig::None);
            generated(records, id, FlowConfig::Vertical) != base || generated(records, id, FlowConfig::Horizontal) != base
        })
        .count();
    let share = changed as f64 / ids.len() as f64;
    let lo = records.iter().map(|r| r.generated).filter(|&g| g > 0).min().unwrap_or(1);
    let hi = records.iter().map(|r| r.generated).max().unwrap_or(0);
    let span = hi as f64 / lo as f64;
    ensure!(share >= 0.8, "only {changed} of {} boards react to a heat flow", ids.len());
    ensure!(span >= 100.0, "generated counts span {lo}..{hi} ({span:.1}x)");
    Ok(format!("{changed}/{} boards react to heat; generated {lo}..{hi} ({span:.1}x)", ids.len()))
}

fn inversion_example() -> Outcome {
    let b: Board = "3:2,3,6,1,7,8,5,4,0".parse().map_err(|e| format!("{e}"))?;
    let n = inversions(&b);
    ensure!(n == 10 && is_solvable(&b), "inversions={n}, solvable={}", is_solvable(&b));
    Ok("inversions=10 SOLVABLE".into())
}

const HORIZONTAL_BLOCK: &str = "list(usable).
EQUAL(l(hole,l(n(x),y)),l(n(x),l(hole,y))).
end_of_list.
";

const VERTICAL_BLOCK: &str = "list(usable).
EQUAL(l(hole,l(x,l(y,l(z,l(u,l(n(w),v)))))),
l(n(w),l(x,l(y,l(z,l(u,l(hole,v))))))).
end_of_list.
";

const SOS_BLOCK: &str = "list(sos).
STATE(l(n(3),l(n(2),l(n(1),
l(end,l(n(8),l(n(4),l(n(7),
l(end,l(n(6),l(n(5),
l(hole,end)))))))))))).
end_of_list.
";

fn parser_round_trip() -> Outcome {
    for block in [HORIZONTAL_BLOCK, VERTICAL_BLOCK, SOS_BLOCK] {
        let spec = parse(block).map_err(|e| format!("{e} in\n{block}"))?;
        let text = format_problem(&spec);
        let back = parse(&text).map_err(|e| format!("reparse: {e}"))?;
        ensure!(format_problem(&back) == text, "format is not stable for\n{block}");
        let pairs = [(&spec.usable, &back.usable), (&spec.sos, &back.sos)];
        for (a, b) in pairs {
            ensure!(a.len() == b.len() && a.iter().zip(b.iter()).all(|(x, y)| is_variant(x, y)), "lists differ for\n{block}");
        }
    }
    let sos = parse(SOS_BLOCK).unwrap().sos;
    let board = decode(&sos[0].literals[0]).map_err(|e| e.to_string())?;
    ensure!(board.cells() == [3, 2, 1, 8, 4, 7, 6, 5, 0], "decoded {board}");
    Ok(format!("3 blocks round-trip; board {}", board.dashed()))
}

fn plot_emission(csv: &Path, dir: &Path) -> Outcome {
    let records = read_csv(std::fs::File::open(csv).unwrap()).map_err(|e| e.to_string())?;
    let column = |flow: FlowConfig| records.iter().filter(|r| r.flow == flow).map(|r| r.generated).collect::<Vec<_>>();
    let (xs, ys) = (column(FlowConfig::Vertical), column(FlowConfig::Horizontal));
    let mut summary = String::new();
    for log_axes in [false, true] {
        let plot = scatter_svg(
            &records,
            FlowConfig::Vertical,
            FlowConfig::Horizontal,
            &ScatterOptions { log_axes, theta: Some(0.9), ..Default::default() },
        );
        let path = dir.join(if log_axes { "log.svg" } else { "linear.svg" });
        std::fs::write(&path, &plot.svg).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let doc = roxmltree::Document::parse(&text).map_err(|e| format!("invalid SVG: {e}"))?;
        let root = doc.root_element();
        ensure!(root.tag_name().name() == "svg", "root element is {}", root.tag_name().name());
        let (width, height): (f64, f64) =
            (root.attribute("width").unwrap().parse().unwrap(), root.attribute("height").unwrap().parse().unwrap());
        let points: Vec<_> = doc.descendants().filter(|n| n.attribute("class") == Some("point")).collect();
        ensure!(points.len() == SUITE_SIZE, "{} points", points.len());
        for p in &points {
            let id: u32 = p.attribute("data-board").unwrap().parse().unwrap();
            let (cx, cy): (f64, f64) = (p.attribute("cx").unwrap().parse().unwrap(), p.attribute("cy").unwrap().parse().unwrap());
            ensure!((0.0..=width).contains(&cx) && (0.0..=height).contains(&cy), "point {id} outside the canvas");
            ensure!(
                p.attribute("data-x") == Some(&generated(&records, id, FlowConfig::Vertical).to_string())
                    && p.attribute("data-y") == Some(&generated(&records, id, FlowConfig::Horizontal).to_string()),
                "point {id} does not match the CSV"
            );
        }
        for (class, values) in [("x-axis", &xs), ("y-axis", &ys)] {
            let axis = doc
                .descendants()
                .find(|n| n.attribute("class") == Some(class))
                .ok_or(format!("no {class}"))?;
            let (lo, hi) = (values.iter().min().unwrap().to_string(), values.iter().max().unwrap().to_string());
            ensure!(
                axis.attribute("data-min") == Some(lo.as_str()) && axis.attribute("data-max") == Some(hi.as_str()),
                "{class} extent {:?}..{:?}, CSV {lo}..{hi}",
                axis.attribute("data-min"),
                axis.attribute("data-max")
            );
            if !log_axes {
                summary.push_str(&format!("{class} {lo}..{hi} "));
            }
        }
    }
    Ok(format!("{SUITE_SIZE} points, linear and log; {}", summary.trim_end()))
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut passed = vec![run(1, "parity oracle", parity_oracle)];
    passed.push(run(2, "paramodulant fidelity", paramodulant_fidelity));
    passed.push(run(3, "move semantics", move_semantics));
    passed.push(run(4, "solver soundness", solver_soundness));
    passed.push(run(5, "saturation on unsolvable input", saturation));

    let mut experiment = None;
    passed.push(run(6, "determinism", || {
        let (detail, records, csv) = determinism(dir.path())?;
        experiment = Some((records, csv));
        Ok(detail)
    }));
    passed.push(run(7, "heat-flow effect", || match &experiment {
        Some((records, _)) => heat_flow_effect(records),
        None => Err("no experiment records".into()),
    }));
    passed.push(run(8, "inversion example", inversion_example));
    passed.push(run(9, "parser round trip", parser_round_trip));
    passed.push(run(10, "plot emission", || match &experiment {
        Some((_, csv)) => plot_emission(csv, dir.path()),
        None => Err("no experiment CSV".into()),
    }));

    let failed = passed.iter().filter(|p| !**p).count();
    println!("acceptance: {} passed, {failed} failed", passed.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
