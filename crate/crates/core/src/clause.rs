//! Literals, clauses and clause provenance.

use std::fmt;
use std::sync::OnceLock;

use crate::term::{rename_apart, unify_all, Position, Substitution, Symbol, Term, Var};

/// Name of the equality predicate in the input language.
pub const EQUALITY: &str = "EQUAL";

pub fn equality_symbol() -> Symbol {
    static SYMBOL: OnceLock<Symbol> = OnceLock::new();
    *SYMBOL.get_or_init(|| Symbol::fixed(EQUALITY))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub sign: Sign,
    pub predicate: Symbol,
    pub args: Vec<Term>,
}

impl Literal {
    pub fn new(sign: Sign, predicate: Symbol, args: Vec<Term>) -> Literal {
        Literal { sign, predicate, args }
    }

    pub fn positive(predicate: &str, args: Vec<Term>) -> Literal {
        Literal::new(Sign::Positive, Symbol::fixed(predicate), args)
    }

    pub fn negative(predicate: &str, args: Vec<Term>) -> Literal {
        Literal::new(Sign::Negative, Symbol::fixed(predicate), args)
    }

    pub fn equality(lhs: Term, rhs: Term) -> Literal {
        Literal::new(Sign::Positive, equality_symbol(), vec![lhs, rhs])
    }

    pub fn is_positive(&self) -> bool {
        self.sign == Sign::Positive
    }

    pub fn is_equality(&self) -> bool {
        self.predicate == equality_symbol() && self.args.len() == 2
    }

    pub fn negated(&self) -> Literal {
        Literal { sign: self.sign.flip(), ..self.clone() }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    /// The atom viewed as a term, so that positions inside a literal are
    /// ordinary term positions whose first step selects the argument.
    pub fn atom(&self) -> Term {
        Term::app(self.predicate, self.args.clone())
    }

    pub fn map_terms(&self, mut f: impl FnMut(&Term) -> Term) -> Literal {
        Literal {
            sign: self.sign,
            predicate: self.predicate,
            args: self.args.iter().map(&mut f).collect(),
        }
    }

    pub fn max_var_index(&self) -> Option<u32> {
        self.args.iter().filter_map(Term::max_var_index).max()
    }
}

/// Identifier assigned to a clause when it is kept by a prover run (or loaded
/// as input). Zero means "not yet numbered".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ClauseId(pub u32);

impl fmt::Display for ClauseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ListName {
    Usable,
    Sos,
    Hot,
    Passive,
    Demodulators,
}

impl ListName {
    pub fn as_str(self) -> &'static str {
        match self {
            ListName::Usable => "usable",
            ListName::Sos => "sos",
            ListName::Hot => "hot",
            ListName::Passive => "passive",
            ListName::Demodulators => "demodulators",
        }
    }

    pub fn from_name(name: &str) -> Option<ListName> {
        Some(match name {
            "usable" => ListName::Usable,
            "sos" => ListName::Sos,
            "hot" => ListName::Hot,
            "passive" => ListName::Passive,
            "demodulators" => ListName::Demodulators,
            _ => return None,
        })
    }
}

/// Which side of `EQUAL(l, r)` is matched against the into-term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    LeftToRight,
    RightToLeft,
}

impl Orientation {
    pub const BOTH: [Orientation; 2] = [Orientation::LeftToRight, Orientation::RightToLeft];

    /// `(matched side, replacement side)`
    pub fn sides<'a>(self, lhs: &'a Term, rhs: &'a Term) -> (&'a Term, &'a Term) {
        match self {
            Orientation::LeftToRight => (lhs, rhs),
            Orientation::RightToLeft => (rhs, lhs),
        }
    }
}

/// Where a paramodulation rewrote: the literal index in the into-clause and
/// the position inside that literal's atom (first step picks the argument).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Site {
    pub literal: usize,
    pub position: Position,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Input(ListName),
    Para {
        into: ClauseId,
        from: ClauseId,
        site: Site,
        orientation: Orientation,
    },
    Hot {
        into: ClauseId,
        hot: ClauseId,
        site: Site,
        orientation: Orientation,
    },
}

impl Origin {
    /// The rewritten parent, for derived clauses.
    pub fn into_parent(&self) -> Option<ClauseId> {
        match self {
            Origin::Input(_) => None,
            Origin::Para { into, .. } | Origin::Hot { into, .. } => Some(*into),
        }
    }

    pub fn parents(&self) -> Vec<ClauseId> {
        match self {
            Origin::Input(_) => Vec::new(),
            Origin::Para { into, from, .. } => vec![*into, *from],
            Origin::Hot { into, hot, .. } => vec![*into, *hot],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub id: ClauseId,
    pub literals: Vec<Literal>,
    pub origin: Origin,
}

impl Clause {
    pub fn new(literals: Vec<Literal>, origin: Origin) -> Clause {
        Clause { id: ClauseId::default(), literals, origin }
    }

    pub fn input(literals: Vec<Literal>, list: ListName) -> Clause {
        Clause::new(literals, Origin::Input(list))
    }

    pub fn unit(literal: Literal, list: ListName) -> Clause {
        Clause::input(vec![literal], list)
    }

    pub fn is_unit(&self) -> bool {
        self.literals.len() == 1
    }

    pub fn is_ground(&self) -> bool {
        self.literals.iter().all(Literal::is_ground)
    }

    /// The equality literal of a positive unit equality clause.
    pub fn as_unit_equality(&self) -> Option<&Literal> {
        match self.literals.as_slice() {
            [lit] if lit.is_positive() && lit.is_equality() => Some(lit),
            _ => None,
        }
    }

    /// The first literal, when it is a positive equality usable for
    /// paramodulation; any further literals ride along into the product.
    pub fn leading_equality(&self) -> Option<&Literal> {
        self.literals.first().filter(|l| l.is_positive() && l.is_equality())
    }

    pub fn max_var_index(&self) -> Option<u32> {
        self.literals.iter().filter_map(Literal::max_var_index).max()
    }

    pub fn rename_apart(&self, offset: u32) -> Clause {
        Clause {
            id: self.id,
            literals: self.literals.iter().map(|l| l.map_terms(|t| rename_apart(t, offset))).collect(),
            origin: self.origin.clone(),
        }
    }

    /// The literals with variables renumbered 0, 1, ... in order of first
    /// occurrence. Two clauses are variants exactly when their keys are equal.
    pub fn variant_key(&self) -> Vec<Literal> {
        if self.is_ground() {
            return self.literals.clone();
        }
        let mut order: Vec<Var> = Vec::new();
        for lit in &self.literals {
            for arg in &lit.args {
                arg.collect_vars(&mut order);
            }
        }
        self.literals
            .iter()
            .map(|lit| {
                lit.map_terms(|t| {
                    t.map_vars(&mut |v| {
                        let slot = order.iter().position(|o| *o == v).expect("collected") as u32;
                        Some(Term::Var(Var::new(slot, v.name)))
                    })
                })
            })
            .collect()
    }
}

pub fn is_variant(a: &Clause, b: &Clause) -> bool {
    a.literals.len() == b.literals.len() && a.variant_key() == b.variant_key()
}

/// Unifier refuting two complementary unit clauses, if they are.
pub fn unit_conflict(a: &Clause, b: &Clause) -> Option<Substitution> {
    let ([la], [lb]) = (a.literals.as_slice(), b.literals.as_slice()) else {
        return None;
    };
    if la.sign == lb.sign || la.predicate != lb.predicate || la.args.len() != lb.args.len() {
        return None;
    }
    if la.is_ground() && lb.is_ground() {
        return (la.args == lb.args).then(Substitution::new);
    }
    let offset = la.max_var_index().map_or(0, |m| m + 1);
    let renamed: Vec<Term> = lb.args.iter().map(|t| rename_apart(t, offset)).collect();
    unify_all(la.args.iter().zip(renamed.iter()))
}

/// Symbol occurrences: one per predicate plus every term node.
pub fn clause_weight(c: &Clause) -> usize {
    c.literals
        .iter()
        .map(|l| 1 + l.args.iter().map(Term::size).sum::<usize>())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(name: &str) -> Term {
        Term::constant(name)
    }
    fn f(name: &str, args: Vec<Term>) -> Term {
        Term::func(name, args)
    }
    fn v(i: u32, name: &str) -> Term {
        Term::var(i, name)
    }

    fn horizontal(xi: u32, yi: u32, xn: &str, yn: &str) -> Clause {
        let lhs = f("l", vec![c("hole"), f("l", vec![f("n", vec![v(xi, xn)]), v(yi, yn)])]);
        let rhs = f("l", vec![f("n", vec![v(xi, xn)]), f("l", vec![c("hole"), v(yi, yn)])]);
        Clause::unit(Literal::equality(lhs, rhs), ListName::Usable)
    }

    fn state(t: Term) -> Clause {
        Clause::unit(Literal::positive("STATE", vec![t]), ListName::Sos)
    }

    fn board_a() -> Term {
        f("l", vec![c("hole"), f("l", vec![f("n", vec![c("1")]), c("end")])])
    }
    fn board_b() -> Term {
        f("l", vec![f("n", vec![c("1")]), f("l", vec![c("hole"), c("end")])])
    }

    #[test]
    fn variant_examples() {
        assert!(is_variant(&state(board_a()), &state(board_a())));
        assert!(is_variant(&horizontal(0, 1, "x", "y"), &horizontal(7, 3, "p", "q")));
        assert!(!is_variant(&state(board_a()), &state(board_b())));
    }

    #[test]
    fn variant_requires_bijection() {
        // f(x, y) vs f(x, x)
        let a = Clause::unit(Literal::positive("P", vec![v(0, "x"), v(1, "y")]), ListName::Sos);
        let b = Clause::unit(Literal::positive("P", vec![v(0, "x"), v(0, "x")]), ListName::Sos);
        assert!(!is_variant(&a, &b));
        assert!(!is_variant(&b, &a));
    }

    #[test]
    fn unit_conflict_examples() {
        let goal = Clause::unit(Literal::negative("STATE", vec![board_a()]), ListName::Passive);
        assert!(unit_conflict(&state(board_a()), &goal).unwrap().is_empty());
        assert!(unit_conflict(&goal, &state(board_a())).is_some());
        assert!(unit_conflict(&state(board_b()), &goal).is_none());

        let eq = Clause::unit(Literal::equality(c("a"), c("b")), ListName::Usable);
        let neg_state = Clause::unit(Literal::negative("STATE", vec![v(0, "x")]), ListName::Passive);
        assert!(unit_conflict(&eq, &neg_state).is_none());
        // non-ground side unifies
        assert!(unit_conflict(&state(board_b()), &neg_state).is_some());
        // same sign never conflicts
        assert!(unit_conflict(&state(board_a()), &state(board_a())).is_none());
    }

    #[test]
    fn unit_conflict_renames_apart() {
        // P(x, a) vs -P(b, x): only unifiable when the two x's are distinct.
        let a = Clause::unit(Literal::positive("P", vec![v(0, "x"), c("a")]), ListName::Sos);
        let b = Clause::unit(Literal::negative("P", vec![c("b"), v(0, "x")]), ListName::Sos);
        assert!(unit_conflict(&a, &b).is_some());
    }

    #[test]
    fn weight_examples() {
        assert_eq!(clause_weight(&state(c("hole"))), 2);
        assert_eq!(clause_weight(&state(f("l", vec![c("hole"), c("end")]))), 4);
        assert_eq!(
            clause_weight(&horizontal(0, 1, "x", "y")),
            clause_weight(&horizontal(5, 9, "p", "q"))
        );
    }

    #[test]
    fn unit_equality_detection() {
        assert!(horizontal(0, 1, "x", "y").as_unit_equality().is_some());
        assert!(state(board_a()).as_unit_equality().is_none());
        let neg = Clause::unit(Literal::equality(c("a"), c("b")).negated(), ListName::Sos);
        assert!(neg.as_unit_equality().is_none());
    }
}
