//! Sliding-tile boards, their encoding as `STATE` terms, the move equalities
//! and the search-free facts about them (inversion parity, BFS distances).
//!
//! A board is stored row-major with `0` standing for the hole. Its term form is
//! a right-nested `l(head, tail)` list of the cells where each tile `k` becomes
//! `n(k)`, the hole becomes the constant `hole`, and an `end` marker follows
//! every row; the last row's `end` is the list terminator itself:
//!
//! ```text
//! [3 2 1 / 8 4 7 / 6 5 .]  =>
//! STATE(l(n(3),l(n(2),l(n(1),l(end,l(n(8),l(n(4),l(n(7),l(end,l(n(6),l(n(5),l(hole,end)))))))))))))
//! ```
//!
//! Because the row markers are not `n(_)`, the move equalities can never slide
//! the hole across a row boundary.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::clause::{Clause, ListName, Literal};
use crate::term::{Symbol, Term};

pub const STATE: &str = "STATE";
const HOLE: &str = "hole";
const END: &str = "end";
const CONS: &str = "l";
const TILE: &str = "n";

/// Largest supported width: tile labels are the constants "1".."99".
pub const MAX_WIDTH: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoardError {
    #[error("board width must be between 2 and {MAX_WIDTH}, got {0}")]
    Width(usize),
    #[error("a {width}x{width} board needs {expected} cells, got {got}")]
    CellCount { width: usize, expected: usize, got: usize },
    #[error("cells are not a permutation of 0..{0}")]
    NotPermutation(usize),
    #[error("malformed board text {0:?}: expected WIDTH:c1,c2,... with 0 for the hole")]
    Syntax(String),
    #[error("move {0:?} is not legal on this board")]
    IllegalMove(Move),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("expected a positive unit STATE literal with one argument")]
    NotState,
    #[error("list element {index}: expected n(k), hole or end, found {found}")]
    BadElement { index: usize, found: String },
    #[error("list tail after element {index} is {found}, expected end")]
    BadTail { index: usize, found: String },
    #[error("row {row} (ending at element {index}) has {len} cells, expected {width}")]
    RaggedRow { row: usize, index: usize, len: usize, width: usize },
    #[error("board has {rows} rows of width {width}; boards must be square")]
    NotSquare { rows: usize, width: usize },
    #[error("cell at element {index}: {reason}")]
    BadCell { index: usize, reason: String },
    #[error(transparent)]
    Board(#[from] BoardError),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Board {
    width: usize,
    cells: Vec<u8>,
}

impl Board {
    pub fn new(width: usize, cells: Vec<u8>) -> Result<Board, BoardError> {
        if !(2..=MAX_WIDTH).contains(&width) {
            return Err(BoardError::Width(width));
        }
        let expected = width * width;
        if cells.len() != expected {
            return Err(BoardError::CellCount { width, expected, got: cells.len() });
        }
        let mut seen = vec![false; expected];
        for &c in &cells {
            let c = c as usize;
            if c >= expected || seen[c] {
                return Err(BoardError::NotPermutation(expected - 1));
            }
            seen[c] = true;
        }
        Ok(Board { width, cells })
    }

    /// Tiles in order with the hole in the last cell.
    pub fn goal(width: usize) -> Board {
        let n = width * width;
        let mut cells: Vec<u8> = (1..n as u8).collect();
        cells.push(0);
        Board::new(width, cells).expect("goal board is valid")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn hole_index(&self) -> usize {
        self.cells.iter().position(|&c| c == 0).expect("board has a hole")
    }

    pub fn is_goal(&self) -> bool {
        *self == Board::goal(self.width)
    }

    /// Cells joined with dashes, e.g. `1-3-5-4-6-8-7-2-0`.
    pub fn dashed(&self) -> String {
        self.join("-")
    }

    fn join(&self, sep: &str) -> String {
        self.cells.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(sep)
    }

    /// Multi-line grid with `·` for the hole.
    pub fn render(&self) -> String {
        let pad = (self.width * self.width - 1).to_string().len();
        self.cells
            .chunks(self.width)
            .map(|row| {
                row.iter()
                    .map(|&c| {
                        let s = if c == 0 { "·".to_string() } else { c.to_string() };
                        format!("{s:>pad$}")
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Parses cells from a separator-delimited list for a known width.
    pub fn from_cells_text(width: usize, text: &str, sep: char) -> Result<Board, BoardError> {
        let cells = text
            .split(sep)
            .map(|s| s.trim().parse::<u8>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| BoardError::Syntax(text.to_string()))?;
        Board::new(width, cells)
    }
}

/// Flat text form `WIDTH:c1,c2,...` with `0` for the hole.
impl fmt::Display for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.width, self.join(","))
    }
}

impl fmt::Debug for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Board({self})")
    }
}

impl FromStr for Board {
    type Err = BoardError;

    fn from_str(s: &str) -> Result<Board, BoardError> {
        let (width, cells) = s.trim().split_once(':').ok_or_else(|| BoardError::Syntax(s.to_string()))?;
        let width = width.trim().parse::<usize>().map_err(|_| BoardError::Syntax(s.to_string()))?;
        Board::from_cells_text(width, cells, ',')
    }
}

/// Direction the hole travels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Up,
    Down,
    Left,
    Right,
}

impl Direction {
    pub fn is_vertical(self) -> bool {
        matches!(self, Direction::Up | Direction::Down)
    }
}

/// The hole moves from `from` to `to`; the tile at `to` moves the other way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub direction: Direction,
    pub from: usize,
    pub to: usize,
}

pub fn legal_moves(board: &Board) -> Vec<Move> {
    let w = board.width;
    let hole = board.hole_index();
    let (row, col) = (hole / w, hole % w);
    let mut moves = Vec::with_capacity(4);
    let mut push = |direction, to| moves.push(Move { direction, from: hole, to });
    if row > 0 {
        push(Direction::Up, hole - w);
    }
    if row + 1 < w {
        push(Direction::Down, hole + w);
    }
    if col > 0 {
        push(Direction::Left, hole - 1);
    }
    if col + 1 < w {
        push(Direction::Right, hole + 1);
    }
    moves
}

pub fn apply_move(board: &Board, m: Move) -> Result<Board, BoardError> {
    if !legal_moves(board).contains(&m) {
        return Err(BoardError::IllegalMove(m));
    }
    let mut cells = board.cells.clone();
    cells.swap(m.from, m.to);
    Ok(Board { width: board.width, cells })
}

pub(crate) fn neighbors(board: &Board) -> impl Iterator<Item = Board> + '_ {
    legal_moves(board).into_iter().map(move |m| {
        let mut cells = board.cells.clone();
        cells.swap(m.from, m.to);
        Board { width: board.width, cells }
    })
}

fn tile_term(tile: u8) -> Term {
    if tile == 0 {
        Term::constant(HOLE)
    } else {
        Term::func(TILE, vec![Term::constant(&tile.to_string())])
    }
}

fn cons(head: Term, tail: Term) -> Term {
    Term::func(CONS, vec![head, tail])
}

/// The list term of a board (the argument of its `STATE` literal).
pub fn encode_term(board: &Board) -> Term {
    let w = board.width;
    let mut elements: Vec<Term> = Vec::with_capacity(w * (w + 1));
    for (r, row) in board.cells.chunks(w).enumerate() {
        elements.extend(row.iter().map(|&c| tile_term(c)));
        if r + 1 < w {
            elements.push(Term::constant(END));
        }
    }
    elements.into_iter().rev().fold(Term::constant(END), |tail, head| cons(head, tail))
}

pub fn encode(board: &Board) -> Literal {
    Literal::positive(STATE, vec![encode_term(board)])
}

pub fn encode_clause(board: &Board) -> Clause {
    Clause::unit(encode(board), ListName::Sos)
}

/// The negated goal for a width, placed in the passive list.
pub fn goal_clause(width: usize) -> Clause {
    Clause::unit(encode(&Board::goal(width)).negated(), ListName::Passive)
}

pub fn decode(literal: &Literal) -> Result<Board, DecodeError> {
    if !literal.is_positive() || literal.predicate != Symbol::fixed(STATE) || literal.args.len() != 1 {
        return Err(DecodeError::NotState);
    }
    decode_term(&literal.args[0])
}

enum Element {
    Cell(u8),
    End,
}

pub fn decode_term(term: &Term) -> Result<Board, DecodeError> {
    let cons_sym = Symbol::fixed(CONS);
    let end = Term::constant(END);
    let hole = Term::constant(HOLE);
    let tile = Symbol::fixed(TILE);

    let mut elements = Vec::new();
    let mut cursor = term;
    loop {
        match cursor {
            Term::App(head, args) if *head == cons_sym && args.len() == 2 => {
                let index = elements.len();
                let element = &args[0];
                let parsed = if *element == end {
                    Element::End
                } else if *element == hole {
                    Element::Cell(0)
                } else {
                    match element {
                        Term::App(h, a) if *h == tile && a.len() == 1 => {
                            let label = match &a[0] {
                                Term::App(c, inner) if inner.is_empty() => c.name().parse::<u8>().ok(),
                                _ => None,
                            };
                            match label {
                                Some(k) if k > 0 => Element::Cell(k),
                                _ => {
                                    return Err(DecodeError::BadElement { index, found: format!("{element:?}") })
                                }
                            }
                        }
                        _ => return Err(DecodeError::BadElement { index, found: format!("{element:?}") }),
                    }
                };
                elements.push(parsed);
                cursor = &args[1];
            }
            _ if *cursor == end => break,
            _ => {
                return Err(DecodeError::BadTail { index: elements.len(), found: format!("{cursor:?}") });
            }
        }
    }

    let mut rows: Vec<Vec<u8>> = vec![Vec::new()];
    let mut row_ends = Vec::new();
    for (i, e) in elements.iter().enumerate() {
        match e {
            Element::Cell(c) => rows.last_mut().unwrap().push(*c),
            Element::End => {
                row_ends.push(i);
                rows.push(Vec::new());
            }
        }
    }
    row_ends.push(elements.len());
    let width = rows[0].len();
    for (r, row) in rows.iter().enumerate() {
        if row.len() != width || width == 0 {
            return Err(DecodeError::RaggedRow { row: r, index: row_ends[r], len: row.len(), width });
        }
    }
    if rows.len() != width {
        return Err(DecodeError::NotSquare { rows: rows.len(), width });
    }
    if !(2..=MAX_WIDTH).contains(&width) {
        return Err(BoardError::Width(width).into());
    }

    // Cell checks report the list index of the offending element.
    let n = width * width;
    let mut seen: Vec<Option<usize>> = vec![None; n];
    let mut cell_indices = elements.iter().enumerate().filter(|(_, e)| matches!(e, Element::Cell(_)));
    let cells: Vec<u8> = rows.into_iter().flatten().collect();
    for &c in &cells {
        let (index, _) = cell_indices.next().expect("one element per cell");
        let slot = c as usize;
        if slot >= n {
            return Err(DecodeError::BadCell { index, reason: format!("tile {c} out of range 1..{}", n - 1) });
        }
        if let Some(first) = seen[slot] {
            let what = if c == 0 { "second hole".to_string() } else { format!("duplicate tile {c}") };
            return Err(DecodeError::BadCell { index, reason: format!("{what} (first at element {first})") });
        }
        seen[slot] = Some(index);
    }
    if seen[0].is_none() {
        return Err(DecodeError::BadCell { index: elements.len(), reason: "board has no hole".into() });
    }
    Ok(Board::new(width, cells)?)
}

fn var(index: u32, name: &str) -> Term {
    Term::var(index, name)
}

/// `EQUAL(l(hole,l(n(x),y)), l(n(x),l(hole,y)))`: the hole swaps with the tile
/// right after it. The same clause serves every width.
pub fn horizontal_move_eq(_width: usize) -> Clause {
    let x = || var(0, "x");
    let y = || var(1, "y");
    let hole = || Term::constant(HOLE);
    let tile = |t| Term::func(TILE, vec![t]);
    let lhs = cons(hole(), cons(tile(x()), y()));
    let rhs = cons(tile(x()), cons(hole(), y()));
    Clause::unit(Literal::equality(lhs, rhs), ListName::Usable)
}

fn intermediate_name(i: usize) -> String {
    const NAMES: [&str; 4] = ["x", "y", "z", "u"];
    NAMES.get(i).map_or_else(|| format!("x{}", i + 1), |s| s.to_string())
}

/// The hole swaps with the tile `width + 1` list cells later, i.e. directly
/// below it once the row marker is counted. For width 3:
/// `EQUAL(l(hole,l(x,l(y,l(z,l(n(w),v))))), l(n(w),l(x,l(y,l(z,l(hole,v))))))`.
pub fn vertical_move_eq(width: usize) -> Clause {
    let between: Vec<Term> = (0..width).map(|i| var(i as u32, &intermediate_name(i))).collect();
    let w = var(width as u32, "w");
    let v = var(width as u32 + 1, "v");
    let hole = Term::constant(HOLE);
    let tile = Term::func(TILE, vec![w]);
    let build = |first: &Term, last: &Term| {
        let tail = cons(last.clone(), v.clone());
        let inner = between.iter().rev().fold(tail, |acc, t| cons(t.clone(), acc));
        cons(first.clone(), inner)
    };
    let lhs = build(&hole, &tile);
    let rhs = build(&tile, &hole);
    Clause::unit(Literal::equality(lhs, rhs), ListName::Usable)
}

/// Pairs `(i, j)`, `i < j` in row-major order skipping the hole, with
/// `tile_i > tile_j`.
pub fn inversions(board: &Board) -> usize {
    let tiles: Vec<u8> = board.cells.iter().copied().filter(|&c| c != 0).collect();
    let mut count = 0;
    for i in 0..tiles.len() {
        for j in i + 1..tiles.len() {
            if tiles[i] > tiles[j] {
                count += 1;
            }
        }
    }
    count
}

/// Whether the board can reach [`Board::goal`]. Odd widths: the inversion count
/// is even. Even widths: the inversion count plus the number of rows between
/// the hole and the bottom row is even.
pub fn is_solvable(board: &Board) -> bool {
    let inv = inversions(board);
    if !board.width.is_multiple_of(2) {
        inv.is_multiple_of(2)
    } else {
        let rows_above_bottom = board.width - 1 - board.hole_index() / board.width;
        (inv + rows_above_bottom).is_multiple_of(2)
    }
}

/// A solvable board with the hole in the last cell: a Fisher-Yates shuffle of
/// the tiles driven by SplitMix64, redrawn from the same stream until solvable.
pub fn random_board(seed: u64, width: usize) -> Board {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let n = width * width;
    loop {
        let mut tiles: Vec<u8> = (1..n as u8).collect();
        for i in (1..tiles.len()).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            tiles.swap(i, j);
        }
        tiles.push(0);
        let board = Board::new(width, tiles).expect("shuffle is a permutation");
        if is_solvable(&board) {
            return board;
        }
    }
}

/// Minimal number of moves from `board` to the goal, or `None` when the goal
/// is unreachable. Exhaustive: intended for widths up to 3.
pub fn bfs_oracle(board: &Board) -> Option<u32> {
    let goal = Board::goal(board.width);
    if *board == goal {
        return Some(0);
    }
    let mut dist: FxHashMap<Board, u32> = FxHashMap::default();
    let mut queue = VecDeque::new();
    dist.insert(board.clone(), 0);
    queue.push_back(board.clone());
    while let Some(b) = queue.pop_front() {
        let d = dist[&b];
        for next in neighbors(&b) {
            if next == goal {
                return Some(d + 1);
            }
            if !dist.contains_key(&next) {
                dist.insert(next.clone(), d + 1);
                queue.push_back(next);
            }
        }
    }
    None
}

/// Every board reachable from `start`, with its BFS distance.
pub fn reachable(start: &Board) -> FxHashMap<Board, u32> {
    let mut dist: FxHashMap<Board, u32> = FxHashMap::default();
    let mut queue = VecDeque::new();
    dist.insert(start.clone(), 0);
    queue.push_back(start.clone());
    while let Some(b) = queue.pop_front() {
        let d = dist[&b];
        for next in neighbors(&b) {
            if !dist.contains_key(&next) {
                dist.insert(next.clone(), d + 1);
                queue.push_back(next);
            }
        }
    }
    dist
}
