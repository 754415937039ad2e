//! Independent checks for tests: finite-model search by grounding over a
//! small domain with a SAT solver, propositional satisfiability of ground
//! clause sets, and bounded forward chaining for Horn clauses.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;
use varisat::{CnfFormula, ExtendFormula, Lit, Solver, Var as SatVar};

use crate::syntax::Formula;
use crate::terms::{match_literal, Clause, Literal, Subst, Sym, SymKind, SymbolTable, Term, Var};

/// Largest supported domain.
pub const MAX_DOMAIN: usize = 4;
/// Bound on the size of the propositional encoding.
pub const MAX_CNF_CLAUSES: usize = 4_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("domain size {0} is outside 1..={MAX_DOMAIN}")]
    Domain(usize),
    #[error("the propositional encoding exceeds {MAX_CNF_CLAUSES} clauses")]
    Budget,
    #[error("solver failure: {0}")]
    Solver(String),
}

/// A model over `{0, .., domain_size - 1}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FiniteModel {
    pub domain_size: usize,
    pub predicates: BTreeMap<Sym, BTreeSet<Vec<usize>>>,
    pub constants: BTreeMap<Sym, usize>,
    pub functions: BTreeMap<Sym, BTreeMap<Vec<usize>, usize>>,
}

impl FiniteModel {
    fn term(&self, t: &Term, env: &HashMap<Var, usize>) -> Option<usize> {
        match t {
            Term::Var(v) => env.get(v).copied(),
            Term::Const(c) => Some(*self.constants.get(c).unwrap_or(&0)),
            Term::App(f, args) => {
                let vals: Option<Vec<usize>> = args.iter().map(|a| self.term(a, env)).collect();
                Some(*self.functions.get(f)?.get(&vals?).unwrap_or(&0))
            }
        }
    }

    fn atom(&self, l: &Literal, env: &HashMap<Var, usize>) -> bool {
        let vals: Vec<usize> = l.args.iter().map(|a| self.term(a, env).unwrap_or(0)).collect();
        if l.eq {
            return vals[0] == vals[1];
        }
        self.predicates.get(&l.pred).is_some_and(|r| r.contains(&vals))
    }

    /// Evaluates a formula, reading free variables through `env`.
    pub fn eval(&self, f: &Formula, env: &mut HashMap<Var, usize>) -> bool {
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(l) => self.atom(l, env),
            Formula::Not(g) => !self.eval(g, env),
            Formula::And(gs) => gs.iter().all(|g| self.eval(g, env)),
            Formula::Or(gs) => gs.iter().any(|g| self.eval(g, env)),
            Formula::Implies(a, b) => !self.eval(a, env) || self.eval(b, env),
            Formula::Iff(a, b) => self.eval(a, env) == self.eval(b, env),
            Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
                let all = matches!(f, Formula::Forall(..));
                self.quantify(vs, g, env, all)
            }
        }
    }

    fn quantify(&self, vs: &[Var], g: &Formula, env: &mut HashMap<Var, usize>, all: bool) -> bool {
        let Some((&v, rest)) = vs.split_first() else {
            return self.eval(g, env);
        };
        let old = env.get(&v).copied();
        let mut result = all;
        for e in 0..self.domain_size {
            env.insert(v, e);
            if self.quantify(rest, g, env, all) != all {
                result = !all;
                break;
            }
        }
        match old {
            Some(o) => env.insert(v, o),
            None => env.remove(&v),
        };
        result
    }

    pub fn satisfies(&self, f: &Formula) -> bool {
        self.eval(f, &mut HashMap::new())
    }
}

/// The universal closure of a clause.
pub fn closure(c: &Clause) -> Formula {
    let lit = |l: &Literal| {
        let atom = Formula::Atom(Literal { pos: true, ..l.clone() });
        if l.pos {
            atom
        } else {
            Formula::not(atom)
        }
    };
    let body = match c.lits() {
        [] => Formula::False,
        [l] => lit(l),
        ls => Formula::Or(ls.iter().map(lit).collect()),
    };
    Formula::forall(c.vars(), body)
}

struct Encoder<'t> {
    table: &'t SymbolTable,
    k: usize,
    cnf: CnfFormula,
    truth: Lit,
    atoms: HashMap<(Sym, Vec<usize>), Lit>,
    /// One-hot value variables of a function or constant application.
    values: HashMap<(Sym, Vec<usize>), Vec<Lit>>,
}

impl<'t> Encoder<'t> {
    fn new(table: &'t SymbolTable, k: usize) -> Self {
        let mut cnf = CnfFormula::new();
        let truth = cnf.new_lit();
        cnf.add_clause(&[truth]);
        Encoder {
            table,
            k,
            cnf,
            truth,
            atoms: HashMap::new(),
            values: HashMap::new(),
        }
    }

    fn check(&self) -> Result<(), OracleError> {
        if self.cnf.len() > MAX_CNF_CLAUSES {
            Err(OracleError::Budget)
        } else {
            Ok(())
        }
    }

    fn and(&mut self, lits: &[Lit]) -> Lit {
        let lits: Vec<Lit> = lits.iter().copied().filter(|&l| l != self.truth).collect();
        if lits.contains(&!self.truth) {
            return !self.truth;
        }
        match lits.as_slice() {
            [] => self.truth,
            [l] => *l,
            _ => {
                let g = self.cnf.new_lit();
                for &l in &lits {
                    self.cnf.add_clause(&[!g, l]);
                }
                let mut c: Vec<Lit> = lits.iter().map(|&l| !l).collect();
                c.push(g);
                self.cnf.add_clause(&c);
                g
            }
        }
    }

    fn or(&mut self, lits: &[Lit]) -> Lit {
        let neg: Vec<Lit> = lits.iter().map(|&l| !l).collect();
        !self.and(&neg)
    }

    fn value(&mut self, f: Sym, args: Vec<usize>) -> Vec<Lit> {
        if let Some(v) = self.values.get(&(f, args.clone())) {
            return v.clone();
        }
        let vs: Vec<Lit> = (0..self.k).map(|_| self.cnf.new_lit()).collect();
        self.cnf.add_clause(&vs);
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                self.cnf.add_clause(&[!vs[i], !vs[j]]);
            }
        }
        self.values.insert((f, args), vs.clone());
        vs
    }

    fn atom(&mut self, p: Sym, args: Vec<usize>) -> Lit {
        if let Some(l) = self.atoms.get(&(p, args.clone())) {
            return *l;
        }
        let l = self.cnf.new_lit();
        self.atoms.insert((p, args), l);
        l
    }

    /// Possible values of a term, each with its condition.
    fn term(&mut self, t: &Term, env: &HashMap<Var, usize>) -> Vec<(Lit, usize)> {
        match t {
            Term::Var(v) => vec![(self.truth, env[v])],
            Term::Const(c) => self.value(*c, Vec::new()).into_iter().zip(0..).collect(),
            Term::App(f, args) => {
                let mut out = Vec::new();
                for (cond, vals) in self.tuples(args, env) {
                    let vs = self.value(*f, vals);
                    for (e, v) in vs.into_iter().enumerate() {
                        let c = self.and(&[cond, v]);
                        out.push((c, e));
                    }
                }
                out
            }
        }
    }

    fn tuples(&mut self, args: &[Term], env: &HashMap<Var, usize>) -> Vec<(Lit, Vec<usize>)> {
        let mut acc: Vec<(Lit, Vec<usize>)> = vec![(self.truth, Vec::new())];
        for a in args {
            let choices = self.term(a, env);
            let mut next = Vec::new();
            for (c, vals) in &acc {
                for (d, e) in &choices {
                    let cd = self.and(&[*c, *d]);
                    let mut v = vals.clone();
                    v.push(*e);
                    next.push((cd, v));
                }
            }
            acc = next;
        }
        acc
    }

    fn literal_atom(&mut self, l: &Literal, env: &HashMap<Var, usize>) -> Lit {
        let mut alts = Vec::new();
        for (cond, vals) in self.tuples(&l.args, env) {
            if l.eq || self.table.is_equality(l.pred) {
                if vals[0] == vals[1] {
                    alts.push(cond);
                }
            } else {
                let a = self.atom(l.pred, vals);
                let c = self.and(&[cond, a]);
                alts.push(c);
            }
        }
        self.or(&alts)
    }

    fn formula(&mut self, f: &Formula, env: &mut HashMap<Var, usize>) -> Result<Lit, OracleError> {
        self.check()?;
        Ok(match f {
            Formula::True => self.truth,
            Formula::False => !self.truth,
            Formula::Atom(l) => self.literal_atom(l, env),
            Formula::Not(g) => !self.formula(g, env)?,
            Formula::And(gs) | Formula::Or(gs) => {
                let mut ls = Vec::with_capacity(gs.len());
                for g in gs {
                    ls.push(self.formula(g, env)?);
                }
                if matches!(f, Formula::And(_)) {
                    self.and(&ls)
                } else {
                    self.or(&ls)
                }
            }
            Formula::Implies(a, b) => {
                let a = self.formula(a, env)?;
                let b = self.formula(b, env)?;
                self.or(&[!a, b])
            }
            Formula::Iff(a, b) => {
                let a = self.formula(a, env)?;
                let b = self.formula(b, env)?;
                let ab = self.or(&[!a, b]);
                let ba = self.or(&[!b, a]);
                self.and(&[ab, ba])
            }
            Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
                let all = matches!(f, Formula::Forall(..));
                let mut ls = Vec::new();
                self.instances(vs, g, env, &mut ls)?;
                if all {
                    self.and(&ls)
                } else {
                    self.or(&ls)
                }
            }
        })
    }

    fn instances(
        &mut self,
        vs: &[Var],
        g: &Formula,
        env: &mut HashMap<Var, usize>,
        out: &mut Vec<Lit>,
    ) -> Result<(), OracleError> {
        let Some((&v, rest)) = vs.split_first() else {
            out.push(self.formula(g, env)?);
            return Ok(());
        };
        let old = env.get(&v).copied();
        for e in 0..self.k {
            env.insert(v, e);
            self.instances(rest, g, env, out)?;
        }
        match old {
            Some(o) => env.insert(v, o),
            None => env.remove(&v),
        };
        Ok(())
    }

    /// Adds a top-level formula; universal prefixes become separate
    /// constraints instead of one large conjunction.
    fn assert(&mut self, f: &Formula, env: &mut HashMap<Var, usize>) -> Result<(), OracleError> {
        match f {
            Formula::And(gs) => gs.iter().try_for_each(|g| self.assert(g, env)),
            Formula::Forall(vs, g) => {
                let Some((&v, rest)) = vs.split_first() else {
                    return self.assert(g, env);
                };
                let inner = Formula::forall(rest.to_vec(), (**g).clone());
                for e in 0..self.k {
                    env.insert(v, e);
                    self.assert(&inner, env)?;
                }
                env.remove(&v);
                Ok(())
            }
            Formula::Or(gs) => {
                let mut ls = Vec::new();
                for g in gs {
                    ls.push(self.formula(g, env)?);
                }
                self.cnf.add_clause(&ls);
                Ok(())
            }
            _ => {
                let l = self.formula(f, env)?;
                self.cnf.add_clause(&[l]);
                Ok(())
            }
        }
    }

    fn model(&self, lits: &[Lit]) -> FiniteModel {
        let truth: BTreeSet<SatVar> = lits.iter().filter(|l| l.is_positive()).map(|l| l.var()).collect();
        let holds = |l: &Lit| truth.contains(&l.var()) == l.is_positive();
        let mut m = FiniteModel {
            domain_size: self.k,
            ..FiniteModel::default()
        };
        for ((p, args), l) in &self.atoms {
            if holds(l) {
                m.predicates.entry(*p).or_default().insert(args.clone());
            }
        }
        for ((f, args), vs) in &self.values {
            let e = vs.iter().position(holds).unwrap_or(0);
            if self.table.info(*f).kind == SymKind::Constant {
                m.constants.insert(*f, e);
            } else {
                m.functions.entry(*f).or_default().insert(args.clone(), e);
            }
        }
        m
    }
}

/// Pushes quantifiers inwards so that each binds only the subformulas
/// mentioning its variables; grounding then stays small.
fn miniscope(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(g) => Formula::not(miniscope(g)),
        Formula::And(gs) => Formula::And(gs.iter().map(miniscope).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(miniscope).collect()),
        Formula::Implies(a, b) => Formula::Implies(Box::new(miniscope(a)), Box::new(miniscope(b))),
        Formula::Iff(a, b) => Formula::Iff(Box::new(miniscope(a)), Box::new(miniscope(b))),
        Formula::Forall(vs, g) => scope(true, vs, miniscope(g)),
        Formula::Exists(vs, g) => scope(false, vs, miniscope(g)),
    }
}

fn scope(all: bool, vs: &[Var], g: Formula) -> Formula {
    let free = g.free_vars();
    let vs: Vec<Var> = vs.iter().copied().filter(|v| free.contains(v)).collect();
    let quant = |vs: Vec<Var>, g: Formula| if all { Formula::forall(vs, g) } else { Formula::exists(vs, g) };
    if vs.is_empty() {
        return g;
    }
    match g {
        // the quantifier distributes over this connective
        Formula::And(gs) if all => Formula::And(gs.into_iter().map(|h| scope(all, &vs, h)).collect()),
        Formula::Or(gs) if !all => Formula::Or(gs.into_iter().map(|h| scope(all, &vs, h)).collect()),
        Formula::And(gs) | Formula::Or(gs) => {
            let conj = !all;
            let build = |gs: Vec<Formula>| if conj { Formula::And(gs) } else { Formula::Or(gs) };
            let (with, mut without): (Vec<Formula>, Vec<Formula>) = gs
                .into_iter()
                .partition(|h| h.free_vars().iter().any(|v| vs.contains(v)));
            if without.is_empty() {
                return quant(vs, build(with));
            }
            let inner = match with.len() {
                1 => with.into_iter().next().unwrap(),
                _ => build(with),
            };
            without.push(scope(all, &vs, inner));
            build(without)
        }
        g => quant(vs, g),
    }
}

/// A model of every formula over a domain of size `k`, if one exists.
/// Free variables are read universally.
pub fn sat_enumerate(table: &SymbolTable, items: &[Formula], k: usize) -> Result<Option<FiniteModel>, OracleError> {
    if k == 0 || k > MAX_DOMAIN {
        return Err(OracleError::Domain(k));
    }
    let mut enc = Encoder::new(table, k);
    for f in items {
        let closed = miniscope(&Formula::forall(f.free_vars(), f.clone()));
        enc.assert(&closed, &mut HashMap::new())?;
    }
    let mut solver = Solver::new();
    solver.add_formula(&enc.cnf);
    match solver.solve() {
        Ok(true) => Ok(Some(enc.model(&solver.model().unwrap_or_default()))),
        Ok(false) => Ok(None),
        Err(e) => Err(OracleError::Solver(e.to_string())),
    }
}

/// A model with at most `kmax` elements, trying the smallest sizes first.
pub fn find_model(table: &SymbolTable, items: &[Formula], kmax: usize) -> Result<Option<FiniteModel>, OracleError> {
    for k in 1..=kmax {
        if let Some(m) = sat_enumerate(table, items, k)? {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Satisfiability of ground clauses with ground atoms as propositions.
pub fn herbrand_satisfiable(clauses: &[Clause]) -> bool {
    let mut cnf = CnfFormula::new();
    let mut vars: HashMap<(Sym, Vec<Term>), SatVar> = HashMap::new();
    for c in clauses {
        debug_assert!(c.is_ground());
        let lits: Vec<Lit> = c
            .lits()
            .iter()
            .map(|l| {
                let key = (l.pred, l.args.clone());
                let v = match vars.get(&key) {
                    Some(v) => *v,
                    None => {
                        let v = cnf.new_var();
                        vars.insert(key, v);
                        v
                    }
                };
                Lit::from_var(v, l.pos)
            })
            .collect();
        cnf.add_clause(&lits);
    }
    let mut solver = Solver::new();
    solver.add_formula(&cnf);
    solver.solve().unwrap_or(true)
}

/// True iff `premises` entail `conclusion`, all ground.
pub fn herbrand_entails(premises: &[Clause], conclusion: &Clause) -> bool {
    let mut all = premises.to_vec();
    all.extend(conclusion.lits().iter().map(|l| Clause::new(vec![l.negate()])));
    !herbrand_satisfiable(&all)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChaseResult {
    Entailed,
    NotEntailedAtDepth,
}

fn matches(body: &[&Literal], facts: &BTreeMap<Sym, BTreeSet<Literal>>, sub: Subst, out: &mut Vec<Subst>) {
    let Some((first, rest)) = body.split_first() else {
        out.push(sub);
        return;
    };
    let pattern = Literal {
        pos: true,
        ..(*first).clone()
    };
    for f in facts.get(&first.pred).into_iter().flatten() {
        let mut s = sub.clone();
        if match_literal(&pattern.apply(&sub), f, &mut s) {
            matches(rest, facts, s, out);
        }
    }
}

/// Bottom-up closure of Horn clauses over ground atoms with terms of depth
/// at most `depth`. Entailed iff a clause without a positive literal, or
/// the query clause `q`, fires.
pub fn ground_chase(horn: &[Clause], facts: &[Literal], q: &Clause, depth: usize) -> ChaseResult {
    let mut known: BTreeMap<Sym, BTreeSet<Literal>> = BTreeMap::new();
    for f in facts {
        known.entry(f.pred).or_default().insert(f.clone());
    }
    let rules: Vec<&Clause> = horn.iter().chain(std::iter::once(q)).collect();
    loop {
        let mut new = Vec::new();
        for r in &rules {
            let body: Vec<&Literal> = r.lits().iter().filter(|l| !l.pos).collect();
            let head: Vec<&Literal> = r.lits().iter().filter(|l| l.pos).collect();
            if head.len() > 1 || body.iter().any(|l| l.eq) {
                continue;
            }
            let mut subs = Vec::new();
            matches(&body, &known, Subst::new(), &mut subs);
            for s in subs {
                let Some(h) = head.first() else {
                    return ChaseResult::Entailed;
                };
                let g = h.apply(&s);
                if !g.is_ground() || g.depth() > depth {
                    continue;
                }
                if !known.get(&g.pred).is_some_and(|k| k.contains(&g)) {
                    new.push(g);
                }
            }
        }
        if new.is_empty() {
            return ChaseResult::NotEntailedAtDepth;
        }
        for g in new {
            known.entry(g.pred).or_default().insert(g);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_clause, parse_problem, Problem};

    fn clauses(src: &[&str]) -> (Problem, Vec<Formula>) {
        let mut p = Problem::default();
        let cs: Vec<Formula> = src.iter().map(|s| closure(&parse_clause(&mut p, s).unwrap())).collect();
        (p, cs)
    }

    #[test]
    fn contradiction_has_no_model() {
        let (p, fs) = clauses(&["p(a)", "~p(a)"]);
        assert_eq!(sat_enumerate(&p.table, &fs, 1).unwrap(), None);
    }

    #[test]
    fn asymmetric_relation_model() {
        let (p, fs) = clauses(&["~r(X,Y) | ~r(Y,X)", "r(a,b)"]);
        assert_eq!(sat_enumerate(&p.table, &fs, 1).unwrap(), None);
        let m = sat_enumerate(&p.table, &fs, 2).unwrap().unwrap();
        let r = p.table.lookup("r", false).unwrap();
        let a = p.table.lookup("a", true).unwrap();
        let b = p.table.lookup("b", true).unwrap();
        let pair = vec![m.constants[&a], m.constants[&b]];
        assert!(m.predicates[&r].contains(&pair));
        assert!(!m.predicates[&r].contains(&vec![pair[1], pair[0]]));
        for f in &fs {
            assert!(m.satisfies(f));
        }
    }

    #[test]
    fn empty_input_is_satisfiable() {
        let t = SymbolTable::new();
        assert!(sat_enumerate(&t, &[Formula::True], 1).unwrap().is_some());
    }

    #[test]
    fn function_tables_are_total() {
        // f is injective on a two-element domain and f(a) != a
        let (p, fs) = clauses(&["~e(f(X),f(Y)) | e(X,Y)", "e(X,X)", "~e(f(a),a)", "~e(X,Y) | e(Y,X)"]);
        let m = sat_enumerate(&p.table, &fs, 2).unwrap().unwrap();
        let f = p.table.lookup("f", true).unwrap();
        assert_eq!(m.functions[&f].len(), 2);
        for g in &fs {
            assert!(m.satisfies(g));
        }
    }

    #[test]
    fn quantified_formulas_and_equality() {
        let mut p = parse_problem("formula: ? [X] : (p(X) & X != a). formula: ! [X] : (p(X) => X = a).").unwrap();
        let fs = std::mem::take(&mut p.formulas);
        assert_eq!(find_model(&p.table, &fs, 3).unwrap(), None);
        let mut q = parse_problem("formula: ? [X] : (p(X) & X != a).").unwrap();
        let fs = std::mem::take(&mut q.formulas);
        let m = find_model(&q.table, &fs, 3).unwrap().unwrap();
        assert_eq!(m.domain_size, 2);
    }

    #[test]
    fn herbrand_entailment() {
        let mut p = Problem::default();
        let prem = vec![
            parse_clause(&mut p, "p(a) | q(a)").unwrap(),
            parse_clause(&mut p, "~q(a) | r(f(a))").unwrap(),
        ];
        let c = parse_clause(&mut p, "p(a) | r(f(a))").unwrap();
        assert!(herbrand_entails(&prem, &c));
        let d = parse_clause(&mut p, "r(f(a))").unwrap();
        assert!(!herbrand_entails(&prem, &d));
    }

    #[test]
    fn chase_examples() {
        let mut p = Problem::default();
        let rule = parse_clause(&mut p, "~a(X) | b(X)").unwrap();
        let q = parse_clause(&mut p, "~b(X)").unwrap();
        let fact = parse_clause(&mut p, "a(c)").unwrap().lits()[0].clone();
        assert_eq!(ground_chase(&[rule.clone()], &[fact], &q, 1), ChaseResult::Entailed);
        assert_eq!(ground_chase(&[rule], &[], &q, 1), ChaseResult::NotEntailedAtDepth);
        // an existential head: a(x) -> r(x, f(x)), r(x,y) -> b(y)
        let r1 = parse_clause(&mut p, "~a(X) | r(X,f(X))").unwrap();
        let r2 = parse_clause(&mut p, "~r(X,Y) | b(Y)").unwrap();
        let fact = parse_clause(&mut p, "a(c)").unwrap().lits()[0].clone();
        assert_eq!(ground_chase(&[r1.clone(), r2.clone()], &[fact.clone()], &q, 1), ChaseResult::Entailed);
        assert_eq!(ground_chase(&[r1, r2], &[fact], &q, 0), ChaseResult::NotEntailedAtDepth);
    }
}
