//! Symbols, terms, literals and clauses, together with substitutions,
//! unification, matching and the structural clause flags used by the
//! inference system.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Index into a [`SymbolTable`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym(pub u32);

/// Clause and formula variables are plain indices, kept outside the symbol table.
pub type Var = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymKind {
    Constant,
    Function,
    Predicate,
    Propositional,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    Input,
    Skolem,
    Definer,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolInfo {
    pub name: String,
    pub kind: SymKind,
    pub arity: usize,
    pub origin: Origin,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymbolError {
    #[error("symbol `{name}` used with arity {found}, previously declared with arity {expected}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
}

/// Append-only table. A name may be reused across kinds (a predicate `b`
/// and a constant `b` are different symbols).
#[derive(Clone, Debug, Default)]
pub struct SymbolTable {
    syms: Vec<SymbolInfo>,
    index: HashMap<(String, SymKind), Sym>,
    counters: HashMap<&'static str, usize>,
    eq: Option<Sym>,
}

fn term_kind(kind: SymKind) -> bool {
    matches!(kind, SymKind::Constant | SymKind::Function)
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.syms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syms.is_empty()
    }

    pub fn info(&self, s: Sym) -> &SymbolInfo {
        &self.syms[s.0 as usize]
    }

    pub fn name(&self, s: Sym) -> &str {
        &self.syms[s.0 as usize].name
    }

    pub fn arity(&self, s: Sym) -> usize {
        self.syms[s.0 as usize].arity
    }

    pub fn origin(&self, s: Sym) -> Origin {
        self.syms[s.0 as usize].origin
    }

    pub fn set_origin(&mut self, s: Sym, origin: Origin) {
        self.syms[s.0 as usize].origin = origin;
    }

    pub fn symbols(&self) -> impl Iterator<Item = (Sym, &SymbolInfo)> {
        self.syms
            .iter()
            .enumerate()
            .map(|(i, info)| (Sym(i as u32), info))
    }

    /// Looks up `name` among constants/functions (if `term`) or predicates.
    pub fn lookup(&self, name: &str, term: bool) -> Option<Sym> {
        let kinds: &[SymKind] = if term {
            &[SymKind::Constant, SymKind::Function]
        } else {
            &[SymKind::Predicate, SymKind::Propositional]
        };
        kinds
            .iter()
            .find_map(|k| self.index.get(&(name.to_string(), *k)).copied())
    }

    /// Interns an input symbol. Constants and functions share a namespace,
    /// as do predicates and propositional symbols.
    pub fn intern(&mut self, name: &str, kind: SymKind, arity: usize) -> Result<Sym, SymbolError> {
        let group = term_kind(kind);
        if let Some(s) = self.lookup(name, group) {
            let found = self.arity(s);
            if found != arity {
                return Err(SymbolError::ArityMismatch {
                    name: name.to_string(),
                    expected: found,
                    found: arity,
                });
            }
            return Ok(s);
        }
        Ok(self.push(name.to_string(), kind, arity, Origin::Input))
    }

    fn push(&mut self, name: String, kind: SymKind, arity: usize, origin: Origin) -> Sym {
        let s = Sym(self.syms.len() as u32);
        self.index.insert((name.clone(), kind), s);
        self.syms.push(SymbolInfo {
            name,
            kind,
            arity,
            origin,
        });
        s
    }

    fn fresh_name(&mut self, prefix: &'static str, term: bool) -> String {
        loop {
            let n = self.counters.entry(prefix).or_insert(0);
            *n += 1;
            let name = format!("{prefix}{n}");
            if self.lookup(&name, term).is_none() {
                return name;
            }
        }
    }

    /// Fresh Skolem function (`skN`) or constant (`skcN`).
    pub fn fresh_skolem(&mut self, arity: usize) -> Sym {
        if arity == 0 {
            let name = self.fresh_name("skc", true);
            self.push(name, SymKind::Constant, 0, Origin::Skolem)
        } else {
            let name = self.fresh_name("sk", true);
            self.push(name, SymKind::Function, arity, Origin::Skolem)
        }
    }

    /// Fresh definer predicate (`defN`), propositional when `arity == 0`.
    pub fn fresh_definer(&mut self, arity: usize) -> Sym {
        let name = self.fresh_name("def", false);
        let kind = if arity == 0 {
            SymKind::Propositional
        } else {
            SymKind::Predicate
        };
        self.push(name, kind, arity, Origin::Definer)
    }

    /// The binary equality predicate, created on first use.
    pub fn equality(&mut self) -> Sym {
        if let Some(s) = self.eq {
            return s;
        }
        let s = self.push("=".to_string(), SymKind::Predicate, 2, Origin::Input);
        self.eq = Some(s);
        s
    }

    pub fn is_equality(&self, s: Sym) -> bool {
        self.eq == Some(s)
    }
}

/// Derived `Ord` gives the structural order: variables, then constants,
/// then applications.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    Const(Sym),
    App(Sym, Vec<Term>),
}

impl Term {
    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_compound(&self) -> bool {
        matches!(self, Term::App(..))
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn vars_into(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.vars_into(out)),
        }
    }

    pub fn has_var(&self, v: Var) -> bool {
        match self {
            Term::Var(w) => *w == v,
            Term::Const(_) => false,
            Term::App(_, args) => args.iter().any(|a| a.has_var(v)),
        }
    }

    /// Number of symbol and variable occurrences.
    pub fn weight(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::weight).sum::<usize>(),
        }
    }

    pub fn map_vars(&self, f: &mut impl FnMut(Var) -> Term) -> Term {
        match self {
            Term::Var(v) => f(*v),
            Term::Const(c) => Term::Const(*c),
            Term::App(g, args) => Term::App(*g, args.iter().map(|a| a.map_vars(f)).collect()),
        }
    }

    /// `f(a)` is a compound over constant and variable arguments only.
    pub fn is_flat_compound(&self) -> bool {
        match self {
            Term::App(_, args) => args.iter().all(|a| !a.is_compound()),
            _ => false,
        }
    }

    pub fn is_subterm_of(&self, other: &Term) -> bool {
        self == other
            || match other {
                Term::App(_, args) => args.iter().any(|a| self.is_subterm_of(a)),
                _ => false,
            }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub pos: bool,
    pub pred: Sym,
    pub args: Vec<Term>,
    pub eq: bool,
}

impl Literal {
    pub fn new(pos: bool, pred: Sym, args: Vec<Term>) -> Self {
        Literal {
            pos,
            pred,
            args,
            eq: false,
        }
    }

    pub fn equality(pos: bool, eq: Sym, l: Term, r: Term) -> Self {
        Literal {
            pos,
            pred: eq,
            args: vec![l, r],
            eq: true,
        }
    }

    pub fn negate(&self) -> Literal {
        Literal {
            pos: !self.pos,
            ..self.clone()
        }
    }

    pub fn is_flat(&self) -> bool {
        self.args.iter().all(|a| !a.is_compound())
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn has_compound(&self) -> bool {
        self.args.iter().any(Term::is_compound)
    }

    pub fn depth(&self) -> usize {
        self.args.iter().map(Term::depth).max().unwrap_or(0)
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.args.iter().for_each(|a| a.vars_into(&mut out));
        out
    }

    pub fn has_var(&self, v: Var) -> bool {
        self.args.iter().any(|a| a.has_var(v))
    }

    pub fn weight(&self) -> usize {
        1 + self.args.iter().map(Term::weight).sum::<usize>()
    }

    pub fn map_vars(&self, f: &mut impl FnMut(Var) -> Term) -> Literal {
        Literal {
            pos: self.pos,
            pred: self.pred,
            args: self.args.iter().map(|a| a.map_vars(f)).collect(),
            eq: self.eq,
        }
    }

    pub fn apply(&self, s: &Subst) -> Literal {
        self.map_vars(&mut |v| s.apply(&Term::Var(v)))
    }

    /// Same predicate and arity, opposite polarity.
    pub fn complements(&self, other: &Literal) -> bool {
        self.pos != other.pos && self.pred == other.pred && self.args == other.args
    }

    /// Compound subterms (all of them, including nested ones).
    pub fn compounds(&self) -> Vec<&Term> {
        fn walk<'a>(t: &'a Term, out: &mut Vec<&'a Term>) {
            if let Term::App(_, args) = t {
                out.push(t);
                args.iter().for_each(|a| walk(a, out));
            }
        }
        let mut out = Vec::new();
        self.args.iter().for_each(|a| walk(a, &mut out));
        out
    }
}

/// A set of literals, kept sorted and free of duplicates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Clause {
    lits: Vec<Literal>,
}

impl Clause {
    pub fn new(mut lits: Vec<Literal>) -> Self {
        lits.sort();
        lits.dedup();
        Clause { lits }
    }

    pub fn empty() -> Self {
        Clause { lits: Vec::new() }
    }

    pub fn lits(&self) -> &[Literal] {
        &self.lits
    }

    pub fn into_lits(self) -> Vec<Literal> {
        self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        for l in &self.lits {
            l.args.iter().for_each(|a| a.vars_into(&mut out));
        }
        out
    }

    pub fn max_var(&self) -> Option<Var> {
        self.vars().into_iter().max()
    }

    pub fn width(&self) -> usize {
        self.vars().len()
    }

    pub fn depth(&self) -> usize {
        self.lits.iter().map(Literal::depth).max().unwrap_or(0)
    }

    pub fn weight(&self) -> usize {
        self.lits.iter().map(Literal::weight).sum()
    }

    pub fn is_ground(&self) -> bool {
        self.lits.iter().all(Literal::is_ground)
    }

    pub fn is_flat(&self) -> bool {
        self.lits.iter().all(Literal::is_flat)
    }

    /// Every argument is a variable, a constant or a flat compound term.
    pub fn is_simple(&self) -> bool {
        self.lits
            .iter()
            .all(|l| l.args.iter().all(|a| !a.is_compound() || a.is_flat_compound()))
    }

    /// Every compound term mentions every variable of the clause.
    pub fn is_covering(&self) -> bool {
        let all: BTreeSet<Var> = self.vars().into_iter().collect();
        self.lits.iter().flat_map(|l| l.compounds()).all(|t| {
            let mut vs = Vec::new();
            t.vars_into(&mut vs);
            vs.into_iter().collect::<BTreeSet<_>>() == all
        })
    }

    /// Compound terms under the same function symbol share one argument list.
    pub fn is_compatible(&self) -> bool {
        let mut seen: HashMap<Sym, &[Term]> = HashMap::new();
        for t in self.lits.iter().flat_map(|l| l.compounds()) {
            if let Term::App(f, args) = t {
                match seen.get(f) {
                    Some(prev) if *prev != args.as_slice() => return false,
                    Some(_) => {}
                    None => {
                        seen.insert(*f, args);
                    }
                }
            }
        }
        true
    }

    /// All compound terms share one argument list.
    pub fn is_strongly_compatible(&self) -> bool {
        let mut first: Option<&[Term]> = None;
        for t in self.lits.iter().flat_map(|l| l.compounds()) {
            if let Term::App(_, args) = t {
                match first {
                    Some(prev) if prev != args.as_slice() => return false,
                    Some(_) => {}
                    None => first = Some(args),
                }
            }
        }
        true
    }

    /// Connected components of literal indices, linked by shared variables.
    /// A ground literal forms a component of its own.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.lits.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while p[r] != r {
                r = p[r];
            }
            let mut j = i;
            while p[j] != r {
                let next = p[j];
                p[j] = r;
                j = next;
            }
            r
        }
        let mut owner: HashMap<Var, usize> = HashMap::new();
        for (i, l) in self.lits.iter().enumerate() {
            for v in l.vars() {
                if let Some(&j) = owner.get(&v) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                } else {
                    owner.insert(v, i);
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
        groups.into_values().collect()
    }

    /// Splits into two variable-disjoint parts that both have variables.
    /// Ground literals never make a clause decomposable.
    pub fn is_decomposable(&self) -> bool {
        self.components()
            .iter()
            .filter(|g| g.iter().any(|&i| !self.lits[i].is_ground()))
            .count()
            > 1
    }

    pub fn positive_count(&self) -> usize {
        self.lits.iter().filter(|l| l.pos).count()
    }

    pub fn apply(&self, s: &Subst) -> Clause {
        Clause::new(self.lits.iter().map(|l| l.apply(s)).collect())
    }

    pub fn map_vars(&self, f: &mut impl FnMut(Var) -> Term) -> Clause {
        Clause::new(self.lits.iter().map(|l| l.map_vars(f)).collect())
    }

    /// Shifts every variable by `offset`.
    pub fn shift(&self, offset: Var) -> Clause {
        self.map_vars(&mut |v| Term::Var(v + offset))
    }

    /// Renumbers variables `0, 1, ...` in order of first occurrence,
    /// repeating until the literal order is stable.
    pub fn normalize(&self) -> Clause {
        let mut cur = self.clone();
        for _ in 0..4 {
            let order = cur.vars();
            let map: HashMap<Var, Var> = order
                .iter()
                .enumerate()
                .map(|(i, v)| (*v, i as Var))
                .collect();
            let next = cur.map_vars(&mut |v| Term::Var(map[&v]));
            if next == cur {
                break;
            }
            cur = next;
        }
        cur
    }

    /// Contains a literal and its complement.
    pub fn is_tautology(&self) -> bool {
        self.lits.iter().enumerate().any(|(i, a)| {
            self.lits[i + 1..].iter().any(|b| a.complements(b))
                || (a.eq && a.pos && a.args[0] == a.args[1])
        })
    }

    /// Variable-blind key: equal for variants.
    pub fn shape_key(&self) -> Vec<(bool, Sym, Vec<ShapeTok>)> {
        fn walk(t: &Term, out: &mut Vec<ShapeTok>) {
            match t {
                Term::Var(_) => out.push(ShapeTok::Var),
                Term::Const(c) => out.push(ShapeTok::Sym(*c)),
                Term::App(f, args) => {
                    out.push(ShapeTok::Sym(*f));
                    args.iter().for_each(|a| walk(a, out));
                }
            }
        }
        let mut key: Vec<_> = self
            .lits
            .iter()
            .map(|l| {
                let mut toks = Vec::new();
                l.args.iter().for_each(|a| walk(a, &mut toks));
                (l.pos, l.pred, toks)
            })
            .collect();
        key.sort();
        key
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ShapeTok {
    Var,
    Sym(Sym),
}

// ---------------------------------------------------------------------------
// Substitutions and unification

/// Triangular substitution. `apply` resolves chains, so the result of
/// applying is always fully instantiated.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subst {
    map: BTreeMap<Var, Term>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UnifyError {
    #[error("symbol clash")]
    Clash,
    #[error("occurs check")]
    OccursCheck,
}

impl Subst {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, v: Var) -> Option<&Term> {
        self.map.get(&v)
    }

    pub fn bind(&mut self, v: Var, t: Term) {
        self.map.insert(v, t);
    }

    pub fn bindings(&self) -> impl Iterator<Item = (Var, &Term)> {
        self.map.iter().map(|(v, t)| (*v, t))
    }

    fn walk<'a>(&'a self, mut t: &'a Term) -> &'a Term {
        while let Term::Var(v) = t {
            match self.map.get(v) {
                Some(next) => t = next,
                None => break,
            }
        }
        t
    }

    pub fn apply(&self, t: &Term) -> Term {
        match self.walk(t) {
            Term::Var(v) => Term::Var(*v),
            Term::Const(c) => Term::Const(*c),
            Term::App(f, args) => Term::App(*f, args.iter().map(|a| self.apply(a)).collect()),
        }
    }

    fn occurs(&self, v: Var, t: &Term) -> bool {
        match self.walk(t) {
            Term::Var(w) => *w == v,
            Term::Const(_) => false,
            Term::App(_, args) => args.iter().any(|a| self.occurs(v, a)),
        }
    }

    /// Extends `self` to a unifier of `s` and `t`. On failure `self` may be
    /// partially extended; callers clone before trying.
    pub fn unify(&mut self, s: &Term, t: &Term) -> Result<(), UnifyError> {
        let (s, t) = (self.walk(s).clone(), self.walk(t).clone());
        match (&s, &t) {
            (Term::Var(a), Term::Var(b)) if a == b => Ok(()),
            (Term::Var(a), _) => {
                if self.occurs(*a, &t) {
                    return Err(UnifyError::OccursCheck);
                }
                self.map.insert(*a, t);
                Ok(())
            }
            (_, Term::Var(b)) => {
                if self.occurs(*b, &s) {
                    return Err(UnifyError::OccursCheck);
                }
                self.map.insert(*b, s);
                Ok(())
            }
            (Term::Const(a), Term::Const(b)) if a == b => Ok(()),
            (Term::App(f, xs), Term::App(g, ys)) if f == g && xs.len() == ys.len() => {
                for (x, y) in xs.iter().zip(ys) {
                    self.unify(x, y)?;
                }
                Ok(())
            }
            _ => Err(UnifyError::Clash),
        }
    }

    /// Unifies the atoms of two literals, ignoring polarity.
    pub fn unify_atoms(&mut self, a: &Literal, b: &Literal) -> Result<(), UnifyError> {
        if a.pred != b.pred || a.args.len() != b.args.len() {
            return Err(UnifyError::Clash);
        }
        for (x, y) in a.args.iter().zip(&b.args) {
            self.unify(x, y)?;
        }
        Ok(())
    }

    /// Idempotent form: every binding is fully applied.
    pub fn resolved(&self) -> Subst {
        Subst {
            map: self
                .map
                .keys()
                .map(|v| (*v, self.apply(&Term::Var(*v))))
                .filter(|(v, t)| *t != Term::Var(*v))
                .collect(),
        }
    }

    /// Rewrites variable-to-variable bindings so that variables in `prefer`
    /// survive: a binding `y -> x` with `y` preferred and `x` not becomes
    /// `x -> y`. The result is still a most general unifier.
    pub fn oriented(&self, prefer: &BTreeSet<Var>) -> Subst {
        let s = self.resolved();
        let mut swap = Subst::new();
        for (y, t) in s.bindings() {
            if let Term::Var(x) = t {
                if prefer.contains(&y) && !prefer.contains(x) && swap.get(*x).is_none() {
                    swap.bind(*x, Term::Var(y));
                }
            }
        }
        if swap.is_empty() {
            return s;
        }
        let mut map: BTreeMap<Var, Term> = BTreeMap::new();
        for (v, t) in s.bindings() {
            map.insert(v, swap.apply(t));
        }
        for (x, t) in swap.bindings() {
            map.insert(x, t.clone());
        }
        Subst {
            map: map.into_iter().filter(|(v, t)| *t != Term::Var(*v)).collect(),
        }
    }
}

/// Most general unifier of two terms, resolved to idempotent form.
pub fn mgu(s: &Term, t: &Term) -> Result<Subst, UnifyError> {
    let mut sub = Subst::new();
    sub.unify(s, t)?;
    Ok(sub.resolved())
}

/// One-way matching: extends `sub` so that `pattern·sub == target`.
/// Variables of `target` are treated as constants.
pub fn match_term(pattern: &Term, target: &Term, sub: &mut Subst) -> bool {
    match pattern {
        Term::Var(v) => match sub.get(*v) {
            Some(t) => t == target,
            None => {
                sub.bind(*v, target.clone());
                true
            }
        },
        Term::Const(c) => matches!(target, Term::Const(d) if c == d),
        Term::App(f, xs) => match target {
            Term::App(g, ys) if f == g && xs.len() == ys.len() => {
                xs.iter().zip(ys).all(|(x, y)| match_term(x, y, sub))
            }
            _ => false,
        },
    }
}

pub fn match_literal(pattern: &Literal, target: &Literal, sub: &mut Subst) -> bool {
    pattern.pos == target.pos
        && pattern.pred == target.pred
        && pattern.args.len() == target.args.len()
        && pattern
            .args
            .iter()
            .zip(&target.args)
            .all(|(p, t)| match_term(p, t, sub))
}

/// θ-subsumption: some θ maps every literal of `c` into `d`.
pub fn subsumes(c: &Clause, d: &Clause) -> bool {
    // Cheap filter: each (polarity, predicate) of c occurs in d.
    for l in c.lits() {
        if !d.lits().iter().any(|m| m.pos == l.pos && m.pred == l.pred) {
            return false;
        }
    }
    let mut order: Vec<&Literal> = c.lits().iter().collect();
    // Literals with fewer candidates first.
    order.sort_by_key(|l| {
        d.lits()
            .iter()
            .filter(|m| m.pos == l.pos && m.pred == l.pred)
            .count()
    });
    fn go(order: &[&Literal], d: &Clause, sub: &Subst) -> bool {
        let Some((first, rest)) = order.split_first() else {
            return true;
        };
        d.lits().iter().any(|m| {
            let mut s = sub.clone();
            match_literal(first, m, &mut s) && go(rest, d, &s)
        })
    }
    go(&order, d, &Subst::new())
}

/// Exact variant test: a bijective variable renaming maps `c` onto `d`.
pub fn is_variant(c: &Clause, d: &Clause) -> bool {
    if c.len() != d.len() || c.width() != d.width() || c.shape_key() != d.shape_key() {
        return false;
    }
    fn go(
        lits: &[Literal],
        d: &Clause,
        used: &mut Vec<bool>,
        fwd: &HashMap<Var, Var>,
        bwd: &HashMap<Var, Var>,
    ) -> bool {
        let Some((first, rest)) = lits.split_first() else {
            return true;
        };
        for (j, m) in d.lits().iter().enumerate() {
            if used[j] || m.pos != first.pos || m.pred != first.pred {
                continue;
            }
            let (mut f, mut b) = (fwd.clone(), bwd.clone());
            if rename_match_args(&first.args, &m.args, &mut f, &mut b) {
                used[j] = true;
                if go(rest, d, used, &f, &b) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    let mut used = vec![false; d.len()];
    go(c.lits(), d, &mut used, &HashMap::new(), &HashMap::new())
}

fn rename_match_args(
    xs: &[Term],
    ys: &[Term],
    fwd: &mut HashMap<Var, Var>,
    bwd: &mut HashMap<Var, Var>,
) -> bool {
    xs.len() == ys.len()
        && xs
            .iter()
            .zip(ys)
            .all(|(x, y)| rename_match(x, y, fwd, bwd))
}

fn rename_match(x: &Term, y: &Term, fwd: &mut HashMap<Var, Var>, bwd: &mut HashMap<Var, Var>) -> bool {
    match (x, y) {
        (Term::Var(a), Term::Var(b)) => match (fwd.get(a), bwd.get(b)) {
            (None, None) => {
                fwd.insert(*a, *b);
                bwd.insert(*b, *a);
                true
            }
            (Some(b2), Some(a2)) => b2 == b && a2 == a,
            _ => false,
        },
        (Term::Const(a), Term::Const(b)) => a == b,
        (Term::App(f, xs), Term::App(g, ys)) => f == g && rename_match_args(xs, ys, fwd, bwd),
        _ => false,
    }
}

/// Finds the renaming `rho` with `c·rho == d` when the two are variants.
pub fn variant_renaming(c: &Clause, d: &Clause) -> Option<HashMap<Var, Var>> {
    if c.len() != d.len() || c.shape_key() != d.shape_key() {
        return None;
    }
    fn go(
        lits: &[Literal],
        d: &Clause,
        used: &mut Vec<bool>,
        fwd: &HashMap<Var, Var>,
        bwd: &HashMap<Var, Var>,
    ) -> Option<HashMap<Var, Var>> {
        let Some((first, rest)) = lits.split_first() else {
            return Some(fwd.clone());
        };
        for (j, m) in d.lits().iter().enumerate() {
            if used[j] || m.pos != first.pos || m.pred != first.pred {
                continue;
            }
            let (mut f, mut b) = (fwd.clone(), bwd.clone());
            if rename_match_args(&first.args, &m.args, &mut f, &mut b) {
                used[j] = true;
                if let Some(r) = go(rest, d, used, &f, &b) {
                    return Some(r);
                }
                used[j] = false;
            }
        }
        None
    }
    let mut used = vec![false; d.len()];
    go(c.lits(), d, &mut used, &HashMap::new(), &HashMap::new())
}

/// Removes literals while the clause still subsumes the shortened clause.
pub fn condense(c: &Clause) -> Clause {
    let mut cur = c.clone();
    'outer: loop {
        if cur.len() < 2 {
            return cur;
        }
        for i in 0..cur.len() {
            let mut lits = cur.lits().to_vec();
            lits.remove(i);
            let shorter = Clause::new(lits);
            if subsumes(&cur, &shorter) {
                cur = shorter;
                continue 'outer;
            }
        }
        return cur;
    }
}

// ---------------------------------------------------------------------------
// Display

/// Prints terms and clauses with symbol names. Variables print as `X<n>`
/// unless a name map is supplied.
pub struct Printer<'a> {
    pub table: &'a SymbolTable,
    pub var_names: Option<&'a HashMap<Var, String>>,
}

impl<'a> Printer<'a> {
    pub fn new(table: &'a SymbolTable) -> Self {
        Printer {
            table,
            var_names: None,
        }
    }

    pub fn with_names(table: &'a SymbolTable, names: &'a HashMap<Var, String>) -> Self {
        Printer {
            table,
            var_names: Some(names),
        }
    }

    pub fn var(&self, v: Var) -> String {
        self.var_names
            .and_then(|m| m.get(&v).cloned())
            .unwrap_or_else(|| format!("X{v}"))
    }

    pub fn term(&self, t: &Term) -> String {
        match t {
            Term::Var(v) => self.var(*v),
            Term::Const(c) => self.table.name(*c).to_string(),
            Term::App(f, args) => format!(
                "{}({})",
                self.table.name(*f),
                args.iter().map(|a| self.term(a)).collect::<Vec<_>>().join(",")
            ),
        }
    }

    pub fn atom(&self, l: &Literal) -> String {
        if l.eq {
            return format!("{} = {}", self.term(&l.args[0]), self.term(&l.args[1]));
        }
        let name = self.table.name(l.pred);
        if l.args.is_empty() {
            name.to_string()
        } else {
            format!(
                "{}({})",
                name,
                l.args.iter().map(|a| self.term(a)).collect::<Vec<_>>().join(",")
            )
        }
    }

    pub fn literal(&self, l: &Literal) -> String {
        if l.eq {
            let op = if l.pos { "=" } else { "!=" };
            return format!("{} {} {}", self.term(&l.args[0]), op, self.term(&l.args[1]));
        }
        if l.pos {
            self.atom(l)
        } else {
            format!("~{}", self.atom(l))
        }
    }

    pub fn clause(&self, c: &Clause) -> String {
        if c.is_empty() {
            return "$false".to_string();
        }
        c.lits()
            .iter()
            .map(|l| self.literal(l))
            .collect::<Vec<_>>()
            .join(" | ")
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> (SymbolTable, Sym, Sym, Sym, Sym, Sym) {
        let mut t = SymbolTable::new();
        let a = t.intern("a", SymKind::Constant, 0).unwrap();
        let b = t.intern("b", SymKind::Constant, 0).unwrap();
        let f = t.intern("f", SymKind::Function, 1).unwrap();
        let p = t.intern("p", SymKind::Predicate, 2).unwrap();
        let q = t.intern("q", SymKind::Predicate, 1).unwrap();
        (t, a, b, f, p, q)
    }

    fn v(i: Var) -> Term {
        Term::Var(i)
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let (mut t, ..) = table();
        let err = t.intern("p", SymKind::Predicate, 3).unwrap_err();
        assert!(matches!(err, SymbolError::ArityMismatch { expected: 2, found: 3, .. }));
    }

    #[test]
    fn predicate_and_constant_may_share_a_name() {
        let (mut t, _, b, ..) = table();
        let bp = t.intern("b", SymKind::Predicate, 3).unwrap();
        assert_ne!(b, bp);
        assert_eq!(t.lookup("b", true), Some(b));
        assert_eq!(t.lookup("b", false), Some(bp));
    }

    #[test]
    fn fresh_names_avoid_input_names() {
        let mut t = SymbolTable::new();
        t.intern("sk1", SymKind::Function, 1).unwrap();
        let s = t.fresh_skolem(2);
        assert_eq!(t.name(s), "sk2");
        assert_eq!(t.origin(s), Origin::Skolem);
        let c = t.fresh_skolem(0);
        assert_eq!(t.name(c), "skc1");
        let d = t.fresh_definer(0);
        assert_eq!(t.info(d).kind, SymKind::Propositional);
    }

    #[test]
    fn structural_order_puts_variables_first() {
        let (_, a, _, f, ..) = table();
        assert!(v(9) < Term::Const(a));
        assert!(Term::Const(a) < Term::App(f, vec![v(0)]));
    }

    #[test]
    fn textbook_mgu() {
        // p(x, f(x)) against p(f(y), z)
        let (t, _, _, f, p, _) = table();
        let _ = t;
        let l1 = Literal::new(true, p, vec![v(0), Term::App(f, vec![v(0)])]);
        let l2 = Literal::new(true, p, vec![Term::App(f, vec![v(1)]), v(2)]);
        let mut s = Subst::new();
        s.unify_atoms(&l1, &l2).unwrap();
        let s = s.resolved();
        let fy = Term::App(f, vec![v(1)]);
        assert_eq!(s.get(0), Some(&fy));
        assert_eq!(s.get(2), Some(&Term::App(f, vec![fy.clone()])));
        assert_eq!(l1.apply(&s), l2.apply(&s));
    }

    #[test]
    fn occurs_check_and_clash() {
        let (_, a, b, f, ..) = table();
        assert_eq!(mgu(&v(0), &Term::App(f, vec![v(0)])), Err(UnifyError::OccursCheck));
        assert_eq!(mgu(&Term::Const(a), &Term::Const(b)), Err(UnifyError::Clash));
    }

    #[test]
    fn orientation_keeps_preferred_variables() {
        let s = mgu(&v(0), &v(5)).unwrap();
        let prefer: BTreeSet<Var> = [0].into_iter().collect();
        let o = s.oriented(&prefer);
        assert_eq!(o.apply(&v(5)), v(0));
        assert_eq!(o.apply(&v(0)), v(0));
    }

    #[test]
    fn condense_example() {
        // p(x,a) | p(b,y) does not condense; p(x,y) | p(x,a) condenses to p(x,a)
        let (_, a, b, _, p, _) = table();
        let c = Clause::new(vec![
            Literal::new(true, p, vec![v(0), Term::Const(a)]),
            Literal::new(true, p, vec![Term::Const(b), v(1)]),
        ]);
        assert_eq!(condense(&c), c);
        let d = Clause::new(vec![
            Literal::new(true, p, vec![v(0), v(1)]),
            Literal::new(true, p, vec![v(0), Term::Const(a)]),
        ]);
        assert_eq!(condense(&d).lits(), &[Literal::new(true, p, vec![v(0), Term::Const(a)])]);
    }

    #[test]
    fn flags_on_example_clauses() {
        let mut t = SymbolTable::new();
        let f = t.intern("f", SymKind::Function, 2).unwrap();
        let g = t.intern("g", SymKind::Function, 2).unwrap();
        let a1 = t.intern("a1", SymKind::Predicate, 1).unwrap();
        let a2 = t.intern("a2", SymKind::Predicate, 1).unwrap();
        let a3 = t.intern("a3", SymKind::Predicate, 2).unwrap();
        let c = Clause::new(vec![
            Literal::new(true, a1, vec![Term::App(f, vec![v(0), v(1)])]),
            Literal::new(false, a2, vec![Term::App(g, vec![v(0), v(1)])]),
            Literal::new(true, a3, vec![v(1), v(0)]),
        ]);
        assert!(c.is_covering() && c.is_strongly_compatible() && c.is_simple());
        let d = Clause::new(vec![
            Literal::new(true, a1, vec![Term::App(f, vec![v(0), v(1)])]),
            Literal::new(false, a2, vec![Term::App(g, vec![v(1), v(0)])]),
        ]);
        assert!(d.is_covering() && d.is_compatible() && !d.is_strongly_compatible());
    }

    #[test]
    fn ground_literal_is_its_own_component() {
        let (_, a, _, _, p, q) = table();
        let c = Clause::new(vec![
            Literal::new(false, p, vec![v(0), v(1)]),
            Literal::new(false, q, vec![Term::Const(a)]),
        ]);
        assert_eq!(c.components().len(), 2);
        // a ground part alone does not make the clause decomposable
        assert!(!c.is_decomposable());
        let e = Clause::new(vec![
            Literal::new(false, p, vec![v(0), v(1)]),
            Literal::new(false, q, vec![v(2)]),
        ]);
        assert!(e.is_decomposable());
        let d = Clause::new(vec![
            Literal::new(false, p, vec![v(0), v(1)]),
            Literal::new(false, q, vec![v(1)]),
        ]);
        assert!(!d.is_decomposable());
    }

    #[test]
    fn variant_and_subsumption() {
        let (_, a, _, _, p, q) = table();
        let c = Clause::new(vec![
            Literal::new(false, p, vec![v(0), v(1)]),
            Literal::new(true, q, vec![v(1)]),
        ]);
        let d = Clause::new(vec![
            Literal::new(false, p, vec![v(7), v(3)]),
            Literal::new(true, q, vec![v(3)]),
        ]);
        assert!(is_variant(&c, &d));
        let rho = variant_renaming(&c, &d).unwrap();
        assert_eq!(rho[&0], 7);
        let e = Clause::new(vec![
            Literal::new(false, p, vec![v(0), v(0)]),
            Literal::new(true, q, vec![v(0)]),
        ]);
        assert!(!is_variant(&c, &e));
        assert!(subsumes(&c, &e));
        assert!(!subsumes(&e, &c));
        let g = Clause::new(vec![
            Literal::new(false, p, vec![Term::Const(a), Term::Const(a)]),
            Literal::new(true, q, vec![Term::Const(a)]),
        ]);
        assert!(subsumes(&e, &g));
    }

    #[test]
    fn normalize_renumbers_by_first_occurrence() {
        let (_, _, _, _, p, q) = table();
        let c = Clause::new(vec![
            Literal::new(false, p, vec![v(4), v(2)]),
            Literal::new(true, q, vec![v(2)]),
        ]);
        let n = c.normalize();
        assert_eq!(n.vars(), vec![0, 1]);
        assert!(is_variant(&c, &n));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_term(depth: u32) -> impl Strategy<Value = Term> {
            let leaf = prop_oneof![
                (0u32..4).prop_map(Term::Var),
                (0u32..2).prop_map(|c| Term::Const(Sym(c))),
            ];
            leaf.prop_recursive(depth, 8, 2, |inner| {
                prop_oneof![
                    inner.clone().prop_map(|t| Term::App(Sym(2), vec![t])),
                    (inner.clone(), inner).prop_map(|(a, b)| Term::App(Sym(3), vec![a, b])),
                ]
            })
        }

        proptest! {
            #[test]
            fn mgu_unifies_and_is_idempotent(s in arb_term(3), t in arb_term(3)) {
                if let Ok(sub) = mgu(&s, &t) {
                    prop_assert_eq!(sub.apply(&s), sub.apply(&t));
                    for (_, b) in sub.bindings() {
                        prop_assert_eq!(sub.apply(b), b.clone());
                    }
                }
            }

            #[test]
            fn mgu_is_most_general(s in arb_term(2), t in arb_term(2), g in arb_term(1)) {
                // Any instance that equates s and t factors through the mgu.
                let mut theta = Subst::new();
                for v in 0..4 { theta.bind(v, g.map_vars(&mut |w| Term::Var(w + 10))); }
                if theta.apply(&s) == theta.apply(&t) {
                    let sub = mgu(&s, &t).expect("unifiable");
                    for v in 0..4 {
                        let lhs = theta.apply(&sub.apply(&Term::Var(v)));
                        prop_assert_eq!(lhs, theta.apply(&Term::Var(v)));
                    }
                }
            }

            #[test]
            fn variant_matches_brute_force(perm in Just(()).prop_perturb(|_, mut rng| {
                let mut p: Vec<u32> = (0..4).collect();
                for i in (1..4).rev() { p.swap(i, (rng.next_u32() as usize) % (i + 1)); }
                p
            }), a in arb_term(2), b in arb_term(2)) {
                let c = Clause::new(vec![
                    Literal::new(true, Sym(4), vec![a.clone()]),
                    Literal::new(false, Sym(4), vec![b.clone()]),
                ]);
                let d = c.map_vars(&mut |w| Term::Var(perm[w as usize] + 20));
                prop_assert!(is_variant(&c, &d));
                prop_assert!(subsumes(&c, &d) && subsumes(&d, &c));
            }

            #[test]
            fn condense_is_equivalent(a in arb_term(1), b in arb_term(1)) {
                let c = Clause::new(vec![
                    Literal::new(true, Sym(4), vec![a]),
                    Literal::new(true, Sym(4), vec![b]),
                ]);
                let k = condense(&c);
                prop_assert!(subsumes(&c, &k) && subsumes(&k, &c));
                prop_assert!(k.len() <= c.len());
            }
        }
    }
}
