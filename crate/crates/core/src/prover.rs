//! Given-clause saturation with paramodulation and a hot list.
//!
//! The loop takes the oldest clause from the set of support, moves it to the
//! usable list and paramodulates every usable unit equality into it (and, when
//! the given clause is itself an equality, the given clause into every usable
//! clause). Each product is counted, dropped if it is a variant of a kept
//! clause, checked against the negated goals in the passive list and appended
//! to the set of support. When a hot list is present, every newly kept clause
//! is immediately paramodulated with the hot equalities as well.

use std::collections::VecDeque;
#[cfg(not(target_arch = "wasm32"))]
use std::time::Instant;

use rustc_hash::FxHashSet;
use thiserror::Error;
#[cfg(target_arch = "wasm32")]
use web_time::Instant;

use crate::clause::{clause_weight, unit_conflict, Clause, ClauseId, Literal, Orientation, Origin, Site};
use crate::parser::ProblemSpec;
use crate::puzzle::{decode, legal_moves, Board, DecodeError};
use crate::term::{rename_apart, replace_path, unify, visit_subterms, Position, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProverConfig {
    /// Stop once this many clauses have been generated.
    pub max_generated: u64,
    /// Discard products heavier than this (symbol count).
    pub max_weight: Option<usize>,
    /// How many rounds of hot-list inference follow a kept clause. Products
    /// of the last round do not trigger another one.
    pub heat_level: u32,
}

pub const DEFAULT_MAX_GENERATED: u64 = 5_000_000;

impl Default for ProverConfig {
    fn default() -> ProverConfig {
        ProverConfig { max_generated: DEFAULT_MAX_GENERATED, max_weight: None, heat_level: 1 }
    }
}

impl ProverConfig {
    pub fn with_budget(max_generated: u64) -> ProverConfig {
        ProverConfig { max_generated, ..ProverConfig::default() }
    }

    fn validate(&self) -> Result<(), ProverError> {
        if self.max_generated == 0 {
            return Err(ProverError::Config("max_generated must be at least 1"));
        }
        if self.heat_level == 0 {
            return Err(ProverError::Config("heat_level must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProverStats {
    /// Every clause built by an inference, kept or not.
    pub generated: u64,
    /// Generated clauses that passed the retention test.
    pub retained: u64,
    /// Given-clause selections.
    pub given: u64,
    /// Paramodulation steps from an input clause to the refuting clause.
    pub proof_moves: Option<u64>,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProverResult {
    Proof { final_clause: ClauseId, stats: ProverStats },
    Saturated(ProverStats),
    BudgetExceeded(ProverStats),
}

impl ProverResult {
    pub fn stats(&self) -> &ProverStats {
        match self {
            ProverResult::Proof { stats, .. } => stats,
            ProverResult::Saturated(stats) | ProverResult::BudgetExceeded(stats) => stats,
        }
    }

    pub fn is_proof(&self) -> bool {
        matches!(self, ProverResult::Proof { .. })
    }

    pub fn verdict(&self) -> &'static str {
        match self {
            ProverResult::Proof { .. } => "proof",
            ProverResult::Saturated(_) => "saturated",
            ProverResult::BudgetExceeded(_) => "budget",
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ProverError {
    #[error("the set of support is empty; nothing to search from")]
    EmptySos,
    #[error("invalid prover configuration: {0}")]
    Config(&'static str),
    #[error("clause {0} has a broken provenance chain")]
    BrokenProvenance(ClauseId),
    #[error("proof step {step}: {board} -> {next} is not a single legal move")]
    IllegalStep { step: usize, board: Board, next: Board },
    #[error("proof clause is not a board state: {0}")]
    Decode(#[from] DecodeError),
}

/// Paramodulates `from_eq` (whose first literal is a positive equality, used in `orientation`)
/// into every non-variable subterm of `into`, in subterm order.
pub fn para_into(into: &Clause, from_eq: &Clause, orientation: Orientation) -> Vec<Clause> {
    paramodulate(into, from_eq, orientation, |site| Origin::Para {
        into: into.id,
        from: from_eq.id,
        site,
        orientation,
    })
}

fn paramodulate(
    into: &Clause,
    from_eq: &Clause,
    orientation: Orientation,
    origin: impl Fn(Site) -> Origin,
) -> Vec<Clause> {
    paramodulate_with(into, from_eq, orientation, origin, true)
}

fn paramodulate_with(
    into: &Clause,
    from_eq: &Clause,
    orientation: Orientation,
    origin: impl Fn(Site) -> Origin,
    allow_matching: bool,
) -> Vec<Clause> {
    let mut out = Vec::new();
    let Some(eq) = from_eq.leading_equality() else {
        return out;
    };
    let offset = into.max_var_index().map_or(0, |m| m + 1);
    let (lhs, rhs) = (
        rename_apart(&eq.args[0], offset),
        rename_apart(&eq.args[1], offset),
    );
    let (matched, replacement) = orientation.sides(&lhs, &rhs);
    if matched.is_var() {
        // a bare variable side would rewrite every subterm
        return out;
    }
    let extra: Vec<&Literal> = from_eq.literals.iter().skip(1).collect();
    if allow_matching && into.is_ground() {
        let bound = [matched.max_var_index(), replacement.max_var_index()]
            .into_iter()
            .chain(extra.iter().map(|l| l.max_var_index()))
            .flatten()
            .max()
            .map_or(0, |m| m as usize + 1);
        if bound <= MAX_MATCH_SLOTS {
            paramodulate_ground(into, matched, replacement, &extra, bound, &origin, &mut out);
            return out;
        }
    }

    for (li, lit) in into.literals.iter().enumerate() {
        for (ai, arg) in lit.args.iter().enumerate() {
            let mut path = Vec::with_capacity(32);
            path.push(ai as u32 + 1);
            visit_subterms(arg, &mut path, &mut |path, sub| {
                if sub.is_var() || !heads_agree(matched, sub) {
                    return;
                }
                let Some(sigma) = unify(matched, sub) else {
                    return;
                };
                // instantiating commutes with replacing at a non-variable position
                let rewritten_arg = replace_path(&sigma.apply(arg), &path[1..], sigma.apply(replacement))
                    .expect("visited path is valid");
                let mut literals: Vec<Literal> = into
                    .literals
                    .iter()
                    .enumerate()
                    .map(|(lj, l)| {
                        if lj != li {
                            return l.map_terms(|t| sigma.apply(t));
                        }
                        let mut args: Vec<Term> = l.args.iter().map(|t| sigma.apply(t)).collect();
                        args[ai] = rewritten_arg.clone();
                        Literal { args, ..l.clone() }
                    })
                    .collect();
                literals.extend(extra.iter().map(|l| l.map_terms(|t| sigma.apply(&rename_apart(t, offset)))));
                out.push(Clause::new(
                    literals,
                    origin(Site { literal: li, position: Position(path.to_vec()) }),
                ));
            });
        }
    }
    out
}

const MAX_MATCH_SLOTS: usize = 64;

/// Specialization of [`paramodulate`] for a ground `into` clause. Unifying
/// with a ground subterm is one-way matching, and nothing needs renaming.
fn paramodulate_ground(
    into: &Clause,
    matched: &Term,
    replacement: &Term,
    extra: &[&Literal],
    slot_count: usize,
    origin: &impl Fn(Site) -> Origin,
    out: &mut Vec<Clause>,
) {
    let mut slots: Vec<Option<&Term>> = vec![None; slot_count];
    for (li, lit) in into.literals.iter().enumerate() {
        for (ai, arg) in lit.args.iter().enumerate() {
            let mut path = Vec::with_capacity(32);
            path.push(ai as u32 + 1);
            visit_subterms(arg, &mut path, &mut |path, sub| {
                if sub.head() != matched.head() {
                    return;
                }
                slots.iter_mut().for_each(|s| *s = None);
                if !match_ground(matched, sub, &mut slots) {
                    return;
                }
                let rewritten = replace_path(arg, &path[1..], instantiate(replacement, &slots))
                    .expect("visited path is valid");
                let mut literals = Vec::with_capacity(into.literals.len() + extra.len());
                literals.extend(into.literals.iter().cloned());
                literals[li].args[ai] = rewritten;
                literals.extend(extra.iter().map(|l| l.map_terms(|t| instantiate(t, &slots))));
                out.push(Clause::new(literals, origin(Site { literal: li, position: Position(path.to_vec()) })));
            });
        }
    }
}

fn match_ground<'t>(pattern: &Term, target: &'t Term, slots: &mut [Option<&'t Term>]) -> bool {
    match pattern {
        Term::Var(v) => match &mut slots[v.index as usize] {
            Some(bound) => *bound == target,
            slot => {
                *slot = Some(target);
                true
            }
        },
        Term::App(f, xs) => match target {
            Term::App(g, ys) if f == g && xs.len() == ys.len() => {
                xs.iter().zip(ys.iter()).all(|(x, y)| match_ground(x, y, slots))
            }
            _ => false,
        },
    }
}

fn instantiate(t: &Term, slots: &[Option<&Term>]) -> Term {
    t.map_vars(&mut |v| slots.get(v.index as usize).copied().flatten().cloned())
}

/// Necessary condition for unification that never allocates: wherever both
/// terms have a function symbol, the symbols agree.
fn heads_agree(a: &Term, b: &Term) -> bool {
    match (a, b) {
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys.iter()).all(|(x, y)| heads_agree(x, y))
        }
        _ => true,
    }
}

/// One round (or `heat_level` rounds) of hot-list inference on a freshly kept
/// clause: every hot equality, both orientations, paramodulated into it.
/// No retention filtering happens here.
pub fn hot_pass(new_clause: &Clause, hot: &[Clause], heat_level: u32) -> Vec<Clause> {
    let mut frontier = vec![new_clause.clone()];
    let mut out = Vec::new();
    for _ in 0..heat_level {
        let mut next = Vec::new();
        for clause in &frontier {
            next.extend(hot_products(clause, hot));
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn hot_products(clause: &Clause, hot: &[Clause]) -> Vec<Clause> {
    let mut out = Vec::new();
    for h in hot {
        for orientation in Orientation::BOTH {
            out.extend(paramodulate(clause, h, orientation, |site| Origin::Hot {
                into: clause.id,
                hot: h.id,
                site,
                orientation,
            }));
        }
    }
    out
}

enum Flow {
    Continue,
    Stop(Stop),
}

enum Stop {
    Proof(ClauseId),
    Budget,
}

/// A single prover run. Owns every kept clause so that proofs can be replayed
/// after [`Prover::run`] returns.
pub struct Prover {
    config: ProverConfig,
    clauses: Vec<Clause>,
    usable: Vec<ClauseId>,
    usable_equalities: Vec<ClauseId>,
    sos: VecDeque<ClauseId>,
    hot: Vec<Clause>,
    passive: Vec<ClauseId>,
    seen: FxHashSet<Vec<Literal>>,
    stats: ProverStats,
    input_sos: Vec<ClauseId>,
}

impl Prover {
    pub fn new(problem: &ProblemSpec, config: ProverConfig) -> Result<Prover, ProverError> {
        config.validate()?;
        if problem.sos.is_empty() {
            return Err(ProverError::EmptySos);
        }
        let mut prover = Prover {
            config,
            clauses: Vec::new(),
            usable: Vec::new(),
            usable_equalities: Vec::new(),
            sos: VecDeque::new(),
            hot: Vec::new(),
            passive: Vec::new(),
            seen: FxHashSet::default(),
            stats: ProverStats::default(),
            input_sos: Vec::new(),
        };
        for c in &problem.usable {
            let id = prover.store(c.clone());
            prover.seen.insert(c.variant_key());
            prover.add_usable(id);
        }
        for c in &problem.sos {
            if prover.seen.insert(c.variant_key()) {
                let id = prover.store(c.clone());
                prover.sos.push_back(id);
                prover.input_sos.push(id);
            }
        }
        for c in &problem.hot {
            let id = prover.store(c.clone());
            prover.hot.push(prover.clause(id).clone());
        }
        for c in &problem.passive {
            let id = prover.store(c.clone());
            prover.passive.push(id);
        }
        Ok(prover)
    }

    fn store(&mut self, mut clause: Clause) -> ClauseId {
        let id = ClauseId(self.clauses.len() as u32 + 1);
        clause.id = id;
        self.clauses.push(clause);
        id
    }

    fn add_usable(&mut self, id: ClauseId) {
        self.usable.push(id);
        if self.clause(id).as_unit_equality().is_some() {
            self.usable_equalities.push(id);
        }
    }

    pub fn clause(&self, id: ClauseId) -> &Clause {
        &self.clauses[id.0 as usize - 1]
    }

    /// Input clauses followed by every kept product, in id order.
    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn stats(&self) -> &ProverStats {
        &self.stats
    }

    pub fn run(&mut self) -> ProverResult {
        let start = Instant::now();
        let stop = self.search();
        self.stats.wall_ms = start.elapsed().as_secs_f64() * 1000.0;
        match stop {
            Some(Stop::Proof(id)) => {
                self.stats.proof_moves = Some(self.chain(id).map_or(0, |c| c.len() as u64 - 1));
                ProverResult::Proof { final_clause: id, stats: self.stats.clone() }
            }
            Some(Stop::Budget) => ProverResult::BudgetExceeded(self.stats.clone()),
            None => ProverResult::Saturated(self.stats.clone()),
        }
    }

    fn search(&mut self) -> Option<Stop> {
        for &id in &self.input_sos {
            if self.refutes(id) {
                return Some(Stop::Proof(id));
            }
        }
        while let Some(given) = self.sos.pop_front() {
            self.stats.given += 1;
            self.add_usable(given);
            for product in self.infer(given) {
                if let Flow::Stop(stop) = self.process(product, 0) {
                    return Some(stop);
                }
            }
        }
        None
    }

    fn infer(&self, given_id: ClauseId) -> Vec<Clause> {
        let given = self.clause(given_id);
        let mut products = Vec::new();
        for &eq in &self.usable_equalities {
            for orientation in Orientation::BOTH {
                products.extend(para_into(given, self.clause(eq), orientation));
            }
        }
        if given.as_unit_equality().is_some() {
            for &other in &self.usable {
                if other == given_id {
                    continue;
                }
                for orientation in Orientation::BOTH {
                    products.extend(para_into(self.clause(other), given, orientation));
                }
            }
        }
        products
    }

    fn process(&mut self, product: Clause, heat: u32) -> Flow {
        self.stats.generated += 1;
        if self.stats.generated >= self.config.max_generated {
            return Flow::Stop(Stop::Budget);
        }
        if self.config.max_weight.is_some_and(|w| clause_weight(&product) > w) {
            return Flow::Continue;
        }
        if !self.seen.insert(product.variant_key()) {
            return Flow::Continue;
        }
        let id = self.store(product);
        self.sos.push_back(id);
        self.stats.retained += 1;
        if self.refutes(id) {
            return Flow::Stop(Stop::Proof(id));
        }
        if heat < self.config.heat_level && !self.hot.is_empty() {
            for hot_product in hot_products(self.clause(id), &self.hot) {
                if let Flow::Stop(stop) = self.process(hot_product, heat + 1) {
                    return Flow::Stop(stop);
                }
            }
        }
        Flow::Continue
    }

    fn refutes(&self, id: ClauseId) -> bool {
        let clause = self.clause(id);
        self.passive.iter().any(|&p| unit_conflict(clause, self.clause(p)).is_some())
    }

    /// The clauses from an input clause to `id`, following the rewritten
    /// parent of each inference.
    pub fn chain(&self, id: ClauseId) -> Result<Vec<&Clause>, ProverError> {
        let mut out = Vec::new();
        let mut current = id;
        loop {
            if current.0 == 0 || current.0 as usize > self.clauses.len() {
                return Err(ProverError::BrokenProvenance(current));
            }
            let clause = self.clause(current);
            out.push(clause);
            match clause.origin.into_parent() {
                None => break,
                Some(parent) if parent < current => current = parent,
                Some(_) => return Err(ProverError::BrokenProvenance(current)),
            }
        }
        out.reverse();
        Ok(out)
    }

    /// Decoded board pairs along the proof, initial board first. Every pair
    /// is checked to be one legal move apart.
    pub fn extract_moves(&self, final_clause: ClauseId) -> Result<Vec<(Board, Board)>, ProverError> {
        let boards = self
            .chain(final_clause)?
            .into_iter()
            .map(|c| match c.literals.as_slice() {
                [lit] => decode(lit),
                _ => Err(DecodeError::NotState),
            })
            .collect::<Result<Vec<Board>, _>>()?;
        let mut pairs = Vec::with_capacity(boards.len().saturating_sub(1));
        for (step, w) in boards.windows(2).enumerate() {
            let legal = legal_moves(&w[0]).into_iter().any(|m| {
                let mut cells = w[0].cells().to_vec();
                cells.swap(m.from, m.to);
                cells == w[1].cells()
            });
            if !legal {
                return Err(ProverError::IllegalStep { step, board: w[0].clone(), next: w[1].clone() });
            }
            pairs.push((w[0].clone(), w[1].clone()));
        }
        Ok(pairs)
    }
}

/// Runs a fresh prover on `problem`.
pub fn run(problem: &ProblemSpec, config: ProverConfig) -> Result<ProverResult, ProverError> {
    Ok(Prover::new(problem, config)?.run())
}
