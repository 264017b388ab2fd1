//! First-order terms, substitutions, positions and syntactic unification.
//!
//! Terms are immutable trees with reference-counted argument slices, so
//! rewriting a subterm shares every untouched sibling with the original.
//! Variables are identified by their index alone; the name they carry is only
//! used when printing.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock, RwLock};

use rustc_hash::{FxHashMap, FxHasher};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolKind {
    Variable,
    Fixed,
}

/// An interned name. Two symbols with the same name and kind are the same
/// symbol, so comparison and hashing are integer operations.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(u32);

#[derive(Default)]
struct Interner {
    entries: Vec<(Arc<str>, SymbolKind)>,
    // one table per kind, indexed by `kind as usize`
    lookup: [FxHashMap<Arc<str>, u32>; 2],
}

fn interner() -> &'static RwLock<Interner> {
    static INTERNER: OnceLock<RwLock<Interner>> = OnceLock::new();
    INTERNER.get_or_init(Default::default)
}

impl Symbol {
    pub fn intern(name: &str, kind: SymbolKind) -> Symbol {
        if let Some(&id) = interner().read().unwrap().lookup[kind as usize].get(name) {
            return Symbol(id);
        }
        let mut table = interner().write().unwrap();
        // Another writer may have raced us between the two locks.
        if let Some(&id) = table.lookup[kind as usize].get(name) {
            return Symbol(id);
        }
        let id = u32::try_from(table.entries.len()).expect("symbol table overflow");
        let name: Arc<str> = Arc::from(name);
        table.entries.push((name.clone(), kind));
        table.lookup[kind as usize].insert(name, id);
        Symbol(id)
    }

    pub fn fixed(name: &str) -> Symbol {
        Symbol::intern(name, SymbolKind::Fixed)
    }

    pub fn variable(name: &str) -> Symbol {
        Symbol::intern(name, SymbolKind::Variable)
    }

    pub fn name(self) -> Arc<str> {
        interner().read().unwrap().entries[self.0 as usize].0.clone()
    }

    pub fn kind(self) -> SymbolKind {
        interner().read().unwrap().entries[self.0 as usize].1
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// A variable occurrence. Identity is the index; `name` is a printing hint and
/// is ignored by equality and hashing.
#[derive(Clone, Copy)]
pub struct Var {
    pub index: u32,
    pub name: Symbol,
}

impl Var {
    pub fn new(index: u32, name: Symbol) -> Var {
        Var { index, name }
    }
}

impl PartialEq for Var {
    fn eq(&self, other: &Var) -> bool {
        self.index == other.index
    }
}

impl Eq for Var {}

impl Hash for Var {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.index.hash(state);
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.name, self.index)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    App(Symbol, Args),
}

/// Argument list of an application. The structural hash and the largest
/// variable index of the whole application are computed once, when the node
/// is built, so hashing and groundness checks do not walk the tree.
#[derive(Clone)]
pub struct Args {
    terms: Arc<[Term]>,
    hash: u64,
    // largest variable index plus one; 0 when ground
    var_bound: u32,
}

impl Args {
    fn new(head: Symbol, terms: Arc<[Term]>) -> Args {
        let mut hasher = FxHasher::default();
        hasher.write_u32(head.0);
        let mut var_bound = 0;
        for t in terms.iter() {
            let (h, bound) = match t {
                Term::Var(v) => ((v.index as u64) ^ 0x9e37_79b9_7f4a_7c15, v.index + 1),
                Term::App(_, a) => (a.hash, a.var_bound),
            };
            hasher.write_u64(h);
            var_bound = var_bound.max(bound);
        }
        Args { terms, hash: hasher.finish(), var_bound }
    }

    fn is_ground(&self) -> bool {
        self.var_bound == 0
    }
}

impl std::ops::Deref for Args {
    type Target = [Term];

    fn deref(&self) -> &[Term] {
        &self.terms
    }
}

impl PartialEq for Args {
    fn eq(&self, other: &Args) -> bool {
        self.hash == other.hash
            && self.var_bound == other.var_bound
            && (Arc::ptr_eq(&self.terms, &other.terms) || self.terms == other.terms)
    }
}

impl Eq for Args {}

impl Hash for Args {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.hash);
    }
}

impl Term {
    pub fn var(index: u32, name: &str) -> Term {
        Term::Var(Var::new(index, Symbol::variable(name)))
    }

    pub fn constant(name: &str) -> Term {
        Term::app(Symbol::fixed(name), Vec::new())
    }

    pub fn app(head: Symbol, args: Vec<Term>) -> Term {
        let args = Args::new(head, Arc::from(args));
        Term::App(head, args)
    }

    /// Like [`Term::app`] but allocates the argument slice once, straight
    /// from an iterator of known length.
    pub fn app_from<I>(head: Symbol, args: I) -> Term
    where
        I: IntoIterator<Item = Term>,
        I::IntoIter: ExactSizeIterator,
    {
        Term::App(head, Args::new(head, args.into_iter().collect()))
    }

    pub fn func(name: &str, args: Vec<Term>) -> Term {
        Term::app(Symbol::fixed(name), args)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn head(&self) -> Option<Symbol> {
        match self {
            Term::Var(_) => None,
            Term::App(head, _) => Some(*head),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App(_, args) => args,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.is_ground(),
        }
    }

    /// Number of symbol occurrences (variables included).
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn occurs(&self, var: Var) -> bool {
        match self {
            Term::Var(v) => *v == var,
            Term::App(_, args) => var.index < args.var_bound && args.iter().any(|a| a.occurs(var)),
        }
    }

    /// Largest variable index in the term, if it has any variables.
    pub fn max_var_index(&self) -> Option<u32> {
        match self {
            Term::Var(v) => Some(v.index),
            Term::App(_, args) => args.var_bound.checked_sub(1),
        }
    }

    /// Variables in order of first occurrence, without repeats.
    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            Term::App(_, args) if args.is_ground() => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn subterm_at(&self, position: &Position) -> Option<&Term> {
        let mut current = self;
        for &step in &position.0 {
            let index = (step as usize).checked_sub(1)?;
            current = current.args().get(index)?;
        }
        Some(current)
    }

    /// Applies `f` to every variable, rebuilding only the spine above changed leaves.
    pub fn map_vars(&self, f: &mut impl FnMut(Var) -> Option<Term>) -> Term {
        self.try_map_vars(f).unwrap_or_else(|| self.clone())
    }

    fn try_map_vars(&self, f: &mut impl FnMut(Var) -> Option<Term>) -> Option<Term> {
        match self {
            Term::Var(v) => f(*v),
            Term::App(_, args) if args.is_ground() => None,
            Term::App(head, args) => {
                let (first, new) = args.iter().enumerate().find_map(|(i, a)| a.try_map_vars(f).map(|n| (i, n)))?;
                let mut new = Some(new);
                Some(Term::app_from(
                    *head,
                    args.iter().enumerate().map(|(i, a)| match i.cmp(&first) {
                        std::cmp::Ordering::Less => a.clone(),
                        std::cmp::Ordering::Equal => new.take().expect("replaced once"),
                        std::cmp::Ordering::Greater => a.map_vars(f),
                    }),
                ))
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v:?}"),
            Term::App(head, args) => {
                write!(f, "{head}")?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{a:?}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

/// Path of 1-based argument indices from the root. The empty path is the root.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(pub Vec<u32>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn child(&self, index: u32) -> Position {
        let mut path = self.0.clone();
        path.push(index);
        Position(path)
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, step) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{step}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TermError {
    #[error("position {0} is not valid in the term")]
    InvalidPosition(Position),
}

/// Every subterm with its position, root first, then a left-to-right
/// depth-first walk (preorder).
pub fn subterms(t: &Term) -> Vec<(Position, Term)> {
    fn walk(t: &Term, path: &mut Vec<u32>, out: &mut Vec<(Position, Term)>) {
        out.push((Position(path.clone()), t.clone()));
        for (i, arg) in t.args().iter().enumerate() {
            path.push(i as u32 + 1);
            walk(arg, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    walk(t, &mut Vec::new(), &mut out);
    out
}

/// Visits subterms in the same order as [`subterms`] without materializing
/// positions; `path` holds the current position during the callback.
pub(crate) fn visit_subterms<'t>(t: &'t Term, path: &mut Vec<u32>, f: &mut impl FnMut(&[u32], &'t Term)) {
    f(path, t);
    for (i, arg) in t.args().iter().enumerate() {
        path.push(i as u32 + 1);
        visit_subterms(arg, path, f);
        path.pop();
    }
}

pub fn replace_at(t: &Term, position: &Position, replacement: Term) -> Result<Term, TermError> {
    replace_path(t, &position.0, replacement)
        .ok_or_else(|| TermError::InvalidPosition(position.clone()))
}

pub(crate) fn replace_path(t: &Term, path: &[u32], replacement: Term) -> Option<Term> {
    let Some((&step, rest)) = path.split_first() else {
        return Some(replacement);
    };
    let Term::App(head, args) = t else {
        return None;
    };
    let index = (step as usize).checked_sub(1)?;
    let mut child = Some(replace_path(args.get(index)?, rest, replacement)?);
    Some(Term::app_from(
        *head,
        args.iter()
            .enumerate()
            .map(|(i, a)| if i == index { child.take().expect("one child") } else { a.clone() }),
    ))
}

/// Shifts every variable index by `offset`; ground terms come back unchanged.
pub fn rename_apart(t: &Term, offset: u32) -> Term {
    if offset == 0 {
        return t.clone();
    }
    t.map_vars(&mut |v| Some(Term::Var(Var::new(v.index + offset, v.name))))
}

/// A finite variable-to-term mapping. Substitutions produced by [`unify`] are
/// normalized: no bound variable occurs in any binding's right-hand side.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: BTreeMap<u32, (Var, Term)>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn get(&self, var: Var) -> Option<&Term> {
        self.bindings.get(&var.index).map(|(_, t)| t)
    }

    pub fn bind(&mut self, var: Var, term: Term) {
        self.bindings.insert(var.index, (var, term));
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, &Term)> {
        self.bindings.values().map(|(v, t)| (*v, t))
    }

    pub fn apply(&self, t: &Term) -> Term {
        apply(self, t)
    }

    /// Resolves chains of bindings so that the substitution is idempotent.
    fn normalize(&mut self) {
        let keys: Vec<u32> = self.bindings.keys().copied().collect();
        let mut done: FxHashMap<u32, Term> = FxHashMap::default();
        for key in keys {
            let resolved = self.resolve_fully(&self.bindings[&key].1.clone(), &mut done);
            done.insert(key, resolved);
        }
        for (key, term) in done {
            if let Some(entry) = self.bindings.get_mut(&key) {
                entry.1 = term;
            }
        }
    }

    fn resolve_fully(&self, t: &Term, memo: &mut FxHashMap<u32, Term>) -> Term {
        t.map_vars(&mut |v| {
            if let Some(t) = memo.get(&v.index) {
                return Some(t.clone());
            }
            let bound = self.get(v)?.clone();
            let resolved = self.resolve_fully(&bound, memo);
            memo.insert(v.index, resolved.clone());
            Some(resolved)
        })
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.bindings.values().map(|(v, t)| (v, t)))
            .finish()
    }
}

pub fn apply(sub: &Substitution, t: &Term) -> Term {
    if sub.is_empty() {
        return t.clone();
    }
    t.map_vars(&mut |v| sub.get(v).cloned())
}

/// Most general unifier of `s` and `t`, with occurs check.
pub fn unify(s: &Term, t: &Term) -> Option<Substitution> {
    unify_all(std::iter::once((s, t)))
}

/// Simultaneous unifier of a sequence of term pairs.
pub fn unify_all<'a>(pairs: impl IntoIterator<Item = (&'a Term, &'a Term)>) -> Option<Substitution> {
    let mut sub = Substitution::new();
    let mut stack: Vec<(Term, Term)> = Vec::new();
    for (s, t) in pairs {
        // Cheap rejection before anything is allocated.
        if let (Term::App(f, a), Term::App(g, b)) = (s, t) {
            if f != g || a.len() != b.len() {
                return None;
            }
        }
        stack.push((s.clone(), t.clone()));
    }
    while let Some((s, t)) = stack.pop() {
        let s = walk(&sub, s);
        let t = walk(&sub, t);
        match (s, t) {
            (Term::Var(a), Term::Var(b)) if a == b => {}
            (Term::Var(v), other) | (other, Term::Var(v)) => {
                if occurs_resolved(&sub, v, &other) {
                    return None;
                }
                sub.bind(v, other);
            }
            (Term::App(f, a), Term::App(g, b)) => {
                if f != g || a.len() != b.len() {
                    return None;
                }
                stack.extend(a.iter().cloned().zip(b.iter().cloned()));
            }
        }
    }
    sub.normalize();
    Some(sub)
}

fn walk(sub: &Substitution, mut t: Term) -> Term {
    while let Term::Var(v) = t {
        match sub.get(v) {
            Some(bound) => t = bound.clone(),
            None => return t,
        }
    }
    t
}

fn occurs_resolved(sub: &Substitution, var: Var, t: &Term) -> bool {
    match t {
        Term::Var(v) => {
            if *v == var {
                return true;
            }
            match sub.get(*v) {
                Some(bound) => occurs_resolved(sub, var, bound),
                None => false,
            }
        }
        Term::App(_, args) => args.iter().any(|a| occurs_resolved(sub, var, a)),
    }
}

/// One-way matching: a substitution `σ` over the variables of `pattern` with
/// `σ(pattern) = t`, treating variables of `t` as constants.
pub fn match_term(pattern: &Term, t: &Term) -> Option<Substitution> {
    fn go(p: &Term, t: &Term, sub: &mut Substitution) -> bool {
        match p {
            Term::Var(v) => match sub.get(*v) {
                Some(bound) => bound == t,
                None => {
                    sub.bind(*v, t.clone());
                    true
                }
            },
            Term::App(f, a) => match t {
                Term::App(g, b) if f == g && a.len() == b.len() => {
                    a.iter().zip(b.iter()).all(|(x, y)| go(x, y, sub))
                }
                _ => false,
            },
        }
    }
    let mut sub = Substitution::new();
    go(pattern, t, &mut sub).then_some(sub)
}
