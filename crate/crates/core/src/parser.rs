//! Reader and printer for the clause-list input language:
//!
//! ```text
//! % horizontal slide
//! list(usable).
//! EQUAL(l(hole,l(n(x),y)),l(n(x),l(hole,y))).
//! end_of_list.
//! ```
//!
//! Identifiers starting with `u`..`z` are variables, scoped to their clause.
//! A clause is one or more literals separated by `|`; `-` negates a literal.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::clause::{Clause, ListName, Literal, Sign, EQUALITY};
use crate::puzzle::STATE;
use crate::term::{Symbol, Term, Var};

/// The four clause lists a prover run starts from.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProblemSpec {
    pub usable: Vec<Clause>,
    pub sos: Vec<Clause>,
    pub hot: Vec<Clause>,
    pub passive: Vec<Clause>,
}

impl ProblemSpec {
    pub fn list(&self, name: ListName) -> &[Clause] {
        match name {
            ListName::Usable => &self.usable,
            ListName::Sos => &self.sos,
            ListName::Hot => &self.hot,
            ListName::Passive => &self.passive,
            ListName::Demodulators => &[],
        }
    }

    fn list_mut(&mut self, name: ListName) -> Option<&mut Vec<Clause>> {
        match name {
            ListName::Usable => Some(&mut self.usable),
            ListName::Sos => Some(&mut self.sos),
            ListName::Hot => Some(&mut self.hot),
            ListName::Passive => Some(&mut self.passive),
            ListName::Demodulators => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    BadChar(char),
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: &'static str, found: String },
    #[error("unknown list name {0:?}")]
    UnknownList(String),
    #[error("{name} used with {found} argument(s) but earlier with {expected}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("{name} must have {expected} argument(s), found {found}")]
    FixedArity { name: &'static str, expected: usize, found: usize },
    #[error("variable {0} cannot take arguments")]
    VariableApplied(String),
    #[error("variable {0} cannot be used as a predicate")]
    VariablePredicate(String),
    #[error("demodulators are not supported; list(demodulators) must be empty")]
    Demodulators,
    #[error("trailing input after the last list")]
    Trailing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Minus,
    Bar,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("{s:?}"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Dot => "'.'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Bar => "'|'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (start_line, start_col) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        let tok = match c {
            c if c.is_whitespace() => {
                bump(&mut chars);
                continue;
            }
            '%' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    bump(&mut chars);
                }
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '-' => Tok::Minus,
            '|' => Tok::Bar,
            c if is_ident_char(c) => {
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if !is_ident_char(c) {
                        break;
                    }
                    name.push(c);
                    bump(&mut chars);
                }
                out.push(Token { tok: Tok::Ident(name), line: start_line, column: start_col });
                continue;
            }
            other => {
                return Err(ParseError { line, column, kind: ParseErrorKind::BadChar(other) });
            }
        };
        bump(&mut chars);
        out.push(Token { tok, line: start_line, column: start_col });
    }
    out.push(Token { tok: Tok::Eof, line, column });
    Ok(out)
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '$'
}

pub fn is_variable_name(name: &str) -> bool {
    name.starts_with(|c: char| ('u'..='z').contains(&c))
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
    arities: HashMap<String, usize>,
    vars: Vec<String>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.at]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if t.tok != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn error_at(token: &Token, kind: ParseErrorKind) -> ParseError {
        ParseError { line: token.line, column: token.column, kind }
    }

    fn expect(&mut self, want: Tok, expected: &'static str) -> PResult<Token> {
        let t = self.next();
        if t.tok == want {
            Ok(t)
        } else {
            Err(Self::error_at(&t, ParseErrorKind::Unexpected { expected, found: t.tok.describe() }))
        }
    }

    fn ident(&mut self, expected: &'static str) -> PResult<(String, Token)> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t)),
            other => Err(Self::error_at(&t, ParseErrorKind::Unexpected { expected, found: other.describe() })),
        }
    }

    fn check_arity(&mut self, name: &str, found: usize, at: &Token) -> PResult<()> {
        let fixed = match name {
            EQUALITY => Some((EQUALITY, 2)),
            STATE => Some((STATE, 1)),
            _ => None,
        };
        if let Some((name, expected)) = fixed {
            if expected != found {
                return Err(Self::error_at(at, ParseErrorKind::FixedArity { name, expected, found }));
            }
        }
        match self.arities.get(name) {
            Some(&expected) if expected != found => Err(Self::error_at(
                at,
                ParseErrorKind::Arity { name: name.to_string(), expected, found },
            )),
            Some(_) => Ok(()),
            None => {
                self.arities.insert(name.to_string(), found);
                Ok(())
            }
        }
    }

    fn args(&mut self) -> PResult<Vec<Term>> {
        if self.peek().tok != Tok::LParen {
            return Ok(Vec::new());
        }
        self.next();
        let mut args = vec![self.term()?];
        loop {
            let t = self.next();
            match &t.tok {
                Tok::Comma => args.push(self.term()?),
                Tok::RParen => return Ok(args),
                other => {
                    return Err(Self::error_at(
                        &t,
                        ParseErrorKind::Unexpected { expected: "',' or ')'", found: other.describe() },
                    ))
                }
            }
        }
    }

    fn term(&mut self) -> PResult<Term> {
        let (name, at) = self.ident("a term")?;
        if is_variable_name(&name) {
            if self.peek().tok == Tok::LParen {
                return Err(Self::error_at(&at, ParseErrorKind::VariableApplied(name)));
            }
            let index = match self.vars.iter().position(|v| *v == name) {
                Some(i) => i,
                None => {
                    self.vars.push(name.clone());
                    self.vars.len() - 1
                }
            };
            return Ok(Term::Var(Var::new(index as u32, Symbol::variable(&name))));
        }
        let args = self.args()?;
        self.check_arity(&name, args.len(), &at)?;
        Ok(Term::app(Symbol::fixed(&name), args))
    }

    fn literal(&mut self) -> PResult<Literal> {
        let sign = if self.peek().tok == Tok::Minus {
            self.next();
            Sign::Negative
        } else {
            Sign::Positive
        };
        let (name, at) = self.ident("a literal")?;
        if is_variable_name(&name) {
            return Err(Self::error_at(&at, ParseErrorKind::VariablePredicate(name)));
        }
        let args = self.args()?;
        self.check_arity(&name, args.len(), &at)?;
        Ok(Literal::new(sign, Symbol::fixed(&name), args))
    }

    fn clause(&mut self, list: ListName) -> PResult<Clause> {
        self.vars.clear();
        let mut literals = vec![self.literal()?];
        while self.peek().tok == Tok::Bar {
            self.next();
            literals.push(self.literal()?);
        }
        self.expect(Tok::Dot, "'.' after clause")?;
        Ok(Clause::input(literals, list))
    }

    fn problem(&mut self) -> PResult<ProblemSpec> {
        let mut spec = ProblemSpec::default();
        loop {
            let t = self.peek().clone();
            match &t.tok {
                Tok::Eof => return Ok(spec),
                Tok::Ident(s) if s == "list" => {
                    self.next();
                }
                _ if spec_has_content(&spec) || self.at > 0 => {
                    return Err(Self::error_at(&t, ParseErrorKind::Trailing));
                }
                other => {
                    return Err(Self::error_at(
                        &t,
                        ParseErrorKind::Unexpected { expected: "list(...)", found: other.describe() },
                    ))
                }
            }
            self.expect(Tok::LParen, "'(' after list")?;
            let (name, at) = self.ident("a list name")?;
            let list = ListName::from_name(&name)
                .ok_or_else(|| Self::error_at(&at, ParseErrorKind::UnknownList(name.clone())))?;
            self.expect(Tok::RParen, "')'")?;
            self.expect(Tok::Dot, "'.' after list(...)")?;
            loop {
                if matches!(&self.peek().tok, Tok::Ident(s) if s == "end_of_list") {
                    self.next();
                    self.expect(Tok::Dot, "'.' after end_of_list")?;
                    break;
                }
                if self.peek().tok == Tok::Eof {
                    let t = self.peek().clone();
                    return Err(Self::error_at(
                        &t,
                        ParseErrorKind::Unexpected { expected: "end_of_list", found: t.tok.describe() },
                    ));
                }
                let start = self.peek().clone();
                let clause = self.clause(list)?;
                match spec.list_mut(list) {
                    Some(v) => v.push(clause),
                    None => return Err(Self::error_at(&start, ParseErrorKind::Demodulators)),
                }
            }
        }
    }
}

fn spec_has_content(spec: &ProblemSpec) -> bool {
    !(spec.usable.is_empty() && spec.sos.is_empty() && spec.hot.is_empty() && spec.passive.is_empty())
}

pub fn parse(text: &str) -> Result<ProblemSpec, ParseError> {
    let tokens = lex(text)?;
    Parser { tokens, at: 0, arities: HashMap::new(), vars: Vec::new() }.problem()
}

/// Printing names for the variables of a clause: the stored name when it reads
/// back as a variable and is not taken, else `x1`, `x2`, ...
struct VarNames {
    names: Vec<(Var, String)>,
    fallback: usize,
}

impl VarNames {
    fn for_terms<'a>(terms: impl Iterator<Item = &'a Term>) -> VarNames {
        let mut order = Vec::new();
        for t in terms {
            t.collect_vars(&mut order);
        }
        let mut names = VarNames { names: Vec::new(), fallback: 0 };
        let preferred: Vec<String> = order.iter().map(|v| v.name.name().to_string()).collect();
        for (v, want) in order.iter().zip(&preferred) {
            let clash = |n: &str, names: &VarNames| names.names.iter().any(|(_, m)| m == n);
            // a later variable that keeps its own name must not be shadowed
            let reserved = |n: &str| preferred.iter().any(|p| p == n);
            let name = if is_variable_name(want) && !clash(want, &names) {
                want.clone()
            } else {
                loop {
                    names.fallback += 1;
                    let candidate = format!("x{}", names.fallback);
                    if !clash(&candidate, &names) && !reserved(&candidate) {
                        break candidate;
                    }
                }
            };
            names.names.push((*v, name));
        }
        names
    }

    fn get(&self, v: Var) -> &str {
        &self.names.iter().find(|(w, _)| *w == v).expect("collected").1
    }
}

fn write_term(out: &mut String, t: &Term, names: &VarNames) {
    match t {
        Term::Var(v) => out.push_str(names.get(*v)),
        Term::App(head, args) => {
            out.push_str(&head.name());
            if !args.is_empty() {
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    write_term(out, a, names);
                }
                out.push(')');
            }
        }
    }
}

fn write_literal(out: &mut String, lit: &Literal, names: &VarNames) {
    if lit.sign == Sign::Negative {
        out.push('-');
    }
    write_term(out, &Term::app(lit.predicate, lit.args.clone()), names);
}

pub fn format_term(t: &Term) -> String {
    let names = VarNames::for_terms(std::iter::once(t));
    let mut out = String::new();
    write_term(&mut out, t, &names);
    out
}

pub fn format_literal(lit: &Literal) -> String {
    let names = VarNames::for_terms(lit.args.iter());
    let mut out = String::new();
    write_literal(&mut out, lit, &names);
    out
}

/// Clause text without the terminating period.
pub fn format_clause(c: &Clause) -> String {
    let names = VarNames::for_terms(c.literals.iter().flat_map(|l| l.args.iter()));
    let mut out = String::new();
    for (i, lit) in c.literals.iter().enumerate() {
        if i > 0 {
            out.push_str(" | ");
        }
        write_literal(&mut out, lit, &names);
    }
    out
}

/// Full input text for a problem; `sos` is always written, other lists only
/// when non-empty.
pub fn format_problem(spec: &ProblemSpec) -> String {
    let mut out = String::new();
    for list in [ListName::Usable, ListName::Sos, ListName::Hot, ListName::Passive] {
        let clauses = spec.list(list);
        if clauses.is_empty() && list != ListName::Sos {
            continue;
        }
        let _ = writeln!(out, "list({}).", list.as_str());
        for c in clauses {
            let _ = writeln!(out, "{}.", format_clause(c));
        }
        out.push_str("end_of_list.\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clause::is_variant;

    pub(crate) const HORIZONTAL_BLOCK: &str = "list(usable).\nEQUAL(l(hole,l(n(x),y)),l(n(x),l(hole,y))).\nend_of_list.\n";

    #[test]
    fn parses_usable_block() {
        let spec = parse(HORIZONTAL_BLOCK).unwrap();
        assert_eq!(spec.usable.len(), 1);
        let c = &spec.usable[0];
        assert!(c.as_unit_equality().is_some());
        let mut vars = Vec::new();
        c.literals[0].args.iter().for_each(|t| t.collect_vars(&mut vars));
        let names: Vec<String> = vars.iter().map(|v| v.name.name().to_string()).collect();
        assert_eq!(names, ["x", "y"]);
        assert_eq!(format_clause(c), "EQUAL(l(hole,l(n(x),y)),l(n(x),l(hole,y)))");
    }

    #[test]
    fn empty_sos() {
        let spec = parse("list(sos). end_of_list.").unwrap();
        assert_eq!(spec, ProblemSpec::default());
        assert_eq!(parse("").unwrap(), ProblemSpec::default());
    }

    #[test]
    fn arity_errors() {
        let err = parse("list(sos). EQUAL(a). end_of_list.").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::FixedArity { name: "EQUAL", .. }));
        assert_eq!((err.line, err.column), (1, 12));

        let err = parse("list(sos).\nP(f(a)).\nP(f(a,b)).\nend_of_list.").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Arity { name: "f".into(), expected: 1, found: 2 });
        assert_eq!((err.line, err.column), (3, 3));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse("list(sos).\nP(a.\nend_of_list.").unwrap_err();
        assert_eq!((err.line, err.column), (2, 4));

        let err = parse("list(bogus).\nend_of_list.").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownList("bogus".into()));
        assert_eq!((err.line, err.column), (1, 6));

        let err = parse("list(demodulators).\nEQUAL(a,b).\nend_of_list.").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Demodulators);
        assert_eq!((err.line, err.column), (2, 1));
        assert!(parse("list(demodulators).\nend_of_list.").is_ok());

        let err = parse("list(sos).\nP(a).\nend_of_list.\nP(b).").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Trailing);
        assert_eq!((err.line, err.column), (4, 1));

        let err = parse("list(sos).\nP(a)).\nend_of_list.").unwrap_err();
        assert_eq!((err.line, err.column), (2, 5));

        let err = parse("list(sos).\nP(a) # b.\nend_of_list.").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::BadChar('#'));
        assert_eq!((err.line, err.column), (2, 6));

        let err = parse("list(sos).\nP(a).\n").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Unexpected { expected: "end_of_list", .. }));

        let err = parse("list(sos).\nP(x(a)).\nend_of_list.").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::VariableApplied("x".into()));
    }

    #[test]
    fn comments_and_negation() {
        let spec = parse("% goal\nlist(passive).\n-STATE(end). % trailing\nend_of_list.").unwrap();
        assert_eq!(spec.passive.len(), 1);
        assert_eq!(spec.passive[0].literals[0].sign, Sign::Negative);
        assert_eq!(format_clause(&spec.passive[0]), "-STATE(end)");
    }

    #[test]
    fn multi_literal_clause() {
        let spec = parse("list(usable).\nEQUAL(f(x,gamma),g(x)) | Q(x).\nend_of_list.").unwrap();
        assert_eq!(spec.usable[0].literals.len(), 2);
        assert_eq!(format_clause(&spec.usable[0]), "EQUAL(f(x,gamma),g(x)) | Q(x)");
    }

    #[test]
    fn variables_are_clause_scoped() {
        let spec = parse("list(sos).\nP(x,y).\nP(y,x).\nend_of_list.").unwrap();
        assert!(is_variant(&spec.sos[0], &spec.sos[1]));
    }

    #[test]
    fn name_fallback() {
        // Two different variables that were both called x
        let t = Term::func("f", vec![Term::var(0, "x"), Term::var(9, "x"), Term::var(3, "alpha")]);
        assert_eq!(format_term(&t), "f(x,x1,x2)");
        let t = Term::func("f", vec![Term::var(0, "p"), Term::var(1, "x1")]);
        assert_eq!(format_term(&t), "f(x2,x1)");
    }

    #[test]
    fn ground_round_trip() {
        let text = "list(sos).\nSTATE(l(n(1),l(hole,end))).\nend_of_list.\n";
        assert_eq!(format_problem(&parse(text).unwrap()), text);
    }
}
