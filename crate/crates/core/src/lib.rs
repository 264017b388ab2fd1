//! A given-clause paramodulation prover with a hot list, and the machinery to
//! pose sliding-tile puzzles to it and measure how hard they are.

pub mod cli;
pub mod clause;
pub mod experiment;
pub mod parser;
pub mod prover;
pub mod puzzle;
pub mod term;

pub use clause::{Clause, ClauseId, Literal, Orientation};
pub use parser::{parse, ProblemSpec};
pub use prover::{run, Prover, ProverConfig, ProverResult, ProverStats};
pub use puzzle::Board;
pub use term::Term;
