//! Structural transformation of guarded, loosely guarded and clique guarded
//! formulas into clauses: negation normal form, renaming of universally
//! quantified subformulas, prenexing, Skolemisation and CNF.

use std::collections::HashMap;

use thiserror::Error;

use crate::syntax::{fragment, negate_query, Formula, Problem};
use crate::terms::{Clause, Literal, Sym, SymbolTable, Term, Var};

/// Above this many clauses per conjunct, CNF switches to renaming.
pub const CNF_LIMIT: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClauseOrigin {
    Rule(usize),
    /// Definition of a fresh predicate introduced while clausifying a rule.
    Definition { rule: usize, definer: Sym },
    Fact(usize),
    Query(usize),
    /// A `clause:` statement.
    Input(usize),
}

#[derive(Clone, Debug, Default)]
pub struct ClauseSet {
    pub clauses: Vec<(Clause, ClauseOrigin)>,
}

impl ClauseSet {
    pub fn clauses(&self) -> impl Iterator<Item = &Clause> {
        self.clauses.iter().map(|(c, _)| c)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClausifyError {
    #[error("rule {0} is not in the clique guarded fragment")]
    NotGuarded(usize),
    #[error("query {0} is not a Boolean conjunctive query")]
    NotConjunctive(usize),
}

/// Negation normal form with quantifier blocks.
#[derive(Clone, Debug)]
enum Nnf {
    True,
    False,
    Lit(Literal),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
    /// `clique` marks universals that came from negated clique guards.
    All { vars: Vec<Var>, body: Box<Nnf>, clique: bool },
    Ex { vars: Vec<Var>, body: Box<Nnf> },
}

impl Nnf {
    fn free_vars_into(&self, bound: &mut Vec<Var>, out: &mut Vec<Var>) {
        match self {
            Nnf::True | Nnf::False => {}
            Nnf::Lit(l) => {
                for v in l.vars() {
                    if !bound.contains(&v) && !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
            Nnf::And(xs) | Nnf::Or(xs) => xs.iter().for_each(|x| x.free_vars_into(bound, out)),
            Nnf::All { vars, body, .. } | Nnf::Ex { vars, body } => {
                let n = bound.len();
                bound.extend(vars.iter().copied());
                body.free_vars_into(bound, out);
                bound.truncate(n);
            }
        }
    }

    fn free_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.free_vars_into(&mut Vec::new(), &mut out);
        out
    }
}

struct Ctx<'a> {
    table: &'a mut SymbolTable,
    next_var: &'a mut Var,
    /// Definitions produced by renaming, with their definers.
    defs: Vec<(Sym, Nnf)>,
}

impl<'a> Ctx<'a> {
    fn fresh(&mut self) -> Var {
        let v = *self.next_var;
        *self.next_var += 1;
        v
    }

    fn bind(&mut self, vs: &[Var], env: &HashMap<Var, Var>) -> (Vec<Var>, HashMap<Var, Var>) {
        let mut env = env.clone();
        let fresh: Vec<Var> = vs
            .iter()
            .map(|v| {
                let w = self.fresh();
                env.insert(*v, w);
                w
            })
            .collect();
        (fresh, env)
    }

    fn lit(&self, l: &Literal, pos: bool, env: &HashMap<Var, Var>) -> Nnf {
        let mut l = l.map_vars(&mut |v| Term::Var(*env.get(&v).unwrap_or(&v)));
        l.pos = pos;
        Nnf::Lit(l)
    }

    /// Negated clique-guard existential `exists xs (A1 & ... & An)`:
    /// miniscoped per group of atoms sharing inner variables, each group
    /// becoming a marked universal.
    fn negated_guard_exists(&mut self, vs: &[Var], body: &Formula, env: &HashMap<Var, Var>) -> Option<Nnf> {
        let mut atoms = Vec::new();
        flatten_and(body, &mut atoms);
        let atoms: Vec<Literal> = atoms
            .into_iter()
            .map(|a| match a {
                Formula::Atom(l) => Some(l),
                _ => None,
            })
            .collect::<Option<_>>()?;
        let (fresh, env) = self.bind(vs, env);
        let atoms: Vec<Literal> = atoms
            .iter()
            .map(|l| l.map_vars(&mut |v| Term::Var(*env.get(&v).unwrap_or(&v))))
            .collect();
        // Union atoms connected through inner variables.
        let mut groups: Vec<(Vec<Var>, Vec<Literal>)> = Vec::new();
        let mut outside = Vec::new();
        for a in atoms {
            let inner: Vec<Var> = a.vars().into_iter().filter(|v| fresh.contains(v)).collect();
            if inner.is_empty() {
                outside.push(a);
                continue;
            }
            let mut merged = (inner.clone(), vec![a]);
            groups.retain(|(gv, gl)| {
                if gv.iter().any(|v| inner.contains(v)) {
                    for v in gv {
                        if !merged.0.contains(v) {
                            merged.0.push(*v);
                        }
                    }
                    merged.1.extend(gl.iter().cloned());
                    false
                } else {
                    true
                }
            });
            groups.push(merged);
        }
        let mut parts: Vec<Nnf> = outside.into_iter().map(|l| Nnf::Lit(l.negate())).collect();
        for (gv, gl) in groups {
            let mut order = Vec::new();
            for l in &gl {
                for v in l.vars() {
                    if gv.contains(&v) && !order.contains(&v) {
                        order.push(v);
                    }
                }
            }
            parts.push(Nnf::All {
                vars: order,
                body: Box::new(or(gl.into_iter().map(|l| Nnf::Lit(l.negate())).collect())),
                clique: true,
            });
        }
        Some(or(parts))
    }

    /// Negates a guard conjunction, marking inner existentials.
    fn negated_guard(&mut self, g: &Formula, env: &HashMap<Var, Var>) -> Nnf {
        let mut items = Vec::new();
        flatten_and(g, &mut items);
        let parts = items
            .iter()
            .map(|it| match it {
                Formula::Exists(vs, body) => self
                    .negated_guard_exists(vs, body, env)
                    .unwrap_or_else(|| self.nnf(it, false, env)),
                _ => self.nnf(it, false, env),
            })
            .collect();
        or(parts)
    }

    fn nnf(&mut self, f: &Formula, pol: bool, env: &HashMap<Var, Var>) -> Nnf {
        match f {
            Formula::True => if pol { Nnf::True } else { Nnf::False },
            Formula::False => if pol { Nnf::False } else { Nnf::True },
            Formula::Atom(l) => self.lit(l, pol, env),
            Formula::Not(g) => self.nnf(g, !pol, env),
            Formula::And(gs) => {
                let xs = gs.iter().map(|g| self.nnf(g, pol, env)).collect();
                if pol { and(xs) } else { or(xs) }
            }
            Formula::Or(gs) => {
                let xs = gs.iter().map(|g| self.nnf(g, pol, env)).collect();
                if pol { or(xs) } else { and(xs) }
            }
            Formula::Implies(a, b) => {
                if pol {
                    or(vec![self.nnf(a, false, env), self.nnf(b, true, env)])
                } else {
                    and(vec![self.nnf(a, true, env), self.nnf(b, false, env)])
                }
            }
            Formula::Iff(a, b) => {
                let fwd = Formula::implies((**a).clone(), (**b).clone());
                let bwd = Formula::implies((**b).clone(), (**a).clone());
                self.nnf(&Formula::And(vec![fwd, bwd]), pol, env)
            }
            Formula::Forall(vs, body) => {
                let (fresh, env) = self.bind(vs, env);
                if pol {
                    let inner = match &**body {
                        Formula::Implies(g, rest) => {
                            or(vec![self.negated_guard(g, &env), self.nnf(rest, true, &env)])
                        }
                        b => self.nnf(b, true, &env),
                    };
                    Nnf::All { vars: fresh, body: Box::new(inner), clique: false }
                } else {
                    Nnf::Ex { vars: fresh, body: Box::new(self.nnf(body, false, &env)) }
                }
            }
            Formula::Exists(vs, body) => {
                let (fresh, env) = self.bind(vs, env);
                if pol {
                    Nnf::Ex { vars: fresh, body: Box::new(self.nnf(body, true, &env)) }
                } else {
                    let inner = self.negated_guard(body, &env);
                    Nnf::All { vars: fresh, body: Box::new(inner), clique: false }
                }
            }
        }
    }

    /// Bottom-up renaming of every universal subformula.
    fn rename(&mut self, n: Nnf) -> Nnf {
        match n {
            Nnf::And(xs) => and(xs.into_iter().map(|x| self.rename(x)).collect()),
            Nnf::Or(xs) => or(xs.into_iter().map(|x| self.rename(x)).collect()),
            Nnf::Ex { vars, body } => Nnf::Ex { vars, body: Box::new(self.rename(*body)) },
            Nnf::All { vars, body, clique } => {
                let body = self.rename(*body);
                let node = Nnf::All { vars, body: Box::new(body), clique };
                let args = node.free_vars();
                let p = self.table.fresh_definer(args.len());
                let atom = Literal::new(true, p, args.into_iter().map(Term::Var).collect());
                if clique {
                    self.defs.push((p, or(vec![Nnf::Lit(atom.clone()), node])));
                    Nnf::Lit(atom.negate())
                } else {
                    self.defs.push((p, or(vec![Nnf::Lit(atom.negate()), node])));
                    Nnf::Lit(atom)
                }
            }
            other => other,
        }
    }

    /// Prenexes a renamed conjunct (free variables universal), Skolemises
    /// with the full universal prefix and converts to clauses.
    fn clauses_of(&mut self, n: Nnf) -> Vec<Clause> {
        let mut prefix = n.free_vars();
        let body = match n {
            Nnf::Or(xs) => {
                let mut out = Vec::new();
                for x in xs {
                    match x {
                        Nnf::All { vars, body, .. } => {
                            prefix.extend(vars);
                            out.push(*body);
                        }
                        other => out.push(other),
                    }
                }
                or(out)
            }
            Nnf::All { vars, body, .. } => {
                prefix.extend(vars);
                *body
            }
            other => other,
        };
        let args: Vec<Term> = prefix.iter().map(|v| Term::Var(*v)).collect();
        let matrix = self.skolemize(body, &args, &mut HashMap::new());
        let mut extra = Vec::new();
        let mut cs = self.cnf(&matrix, &args, &mut extra);
        cs.extend(extra);
        cs.into_iter()
            .map(|c| Clause::new(c).normalize())
            .collect()
    }

    fn skolemize(&mut self, n: Nnf, args: &[Term], sub: &mut HashMap<Var, Term>) -> Nnf {
        match n {
            Nnf::Lit(l) => Nnf::Lit(l.map_vars(&mut |v| sub.get(&v).cloned().unwrap_or(Term::Var(v)))),
            Nnf::And(xs) => and(xs.into_iter().map(|x| self.skolemize(x, args, sub)).collect()),
            Nnf::Or(xs) => or(xs.into_iter().map(|x| self.skolemize(x, args, sub)).collect()),
            Nnf::Ex { vars, body } => {
                for v in vars {
                    let f = self.table.fresh_skolem(args.len());
                    let t = if args.is_empty() { Term::Const(f) } else { Term::App(f, args.to_vec()) };
                    sub.insert(v, t);
                }
                self.skolemize(*body, args, sub)
            }
            Nnf::All { .. } => unreachable!("universals are renamed before Skolemisation"),
            other => other,
        }
    }

    fn cnf(&mut self, n: &Nnf, args: &[Term], extra: &mut Vec<Vec<Literal>>) -> Vec<Vec<Literal>> {
        match n {
            Nnf::True => Vec::new(),
            Nnf::False => vec![Vec::new()],
            Nnf::Lit(l) => vec![vec![l.clone()]],
            Nnf::And(xs) => xs.iter().flat_map(|x| self.cnf(x, args, extra)).collect(),
            Nnf::Or(xs) => {
                let mut parts: Vec<Vec<Vec<Literal>>> =
                    xs.iter().map(|x| self.cnf(x, args, extra)).collect();
                if parts.iter().any(|p| p.is_empty()) {
                    return Vec::new();
                }
                loop {
                    let size: usize = parts.iter().map(|p| p.len()).product();
                    if size <= CNF_LIMIT {
                        break;
                    }
                    let (i, _) = parts
                        .iter()
                        .enumerate()
                        .max_by_key(|(_, p)| p.len())
                        .expect("non-empty");
                    let p = self.table.fresh_definer(args.len());
                    let atom = Literal::new(true, p, args.to_vec());
                    for c in std::mem::take(&mut parts[i]) {
                        let mut c = c;
                        c.push(atom.negate());
                        extra.push(c);
                    }
                    parts[i] = vec![vec![atom]];
                }
                let mut acc: Vec<Vec<Literal>> = vec![Vec::new()];
                for p in parts {
                    let mut next = Vec::with_capacity(acc.len() * p.len());
                    for a in &acc {
                        for c in &p {
                            let mut d = a.clone();
                            d.extend(c.iter().cloned());
                            next.push(d);
                        }
                    }
                    acc = next;
                }
                acc
            }
            Nnf::All { .. } | Nnf::Ex { .. } => unreachable!("quantifiers are removed before CNF"),
        }
    }
}

fn flatten_and(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(gs) => gs.iter().for_each(|g| flatten_and(g, out)),
        g => out.push(g.clone()),
    }
}

fn and(xs: Vec<Nnf>) -> Nnf {
    let mut out = Vec::new();
    for x in xs {
        match x {
            Nnf::True => {}
            Nnf::False => return Nnf::False,
            Nnf::And(ys) => out.extend(ys),
            y => out.push(y),
        }
    }
    match out.len() {
        0 => Nnf::True,
        1 => out.pop().unwrap(),
        _ => Nnf::And(out),
    }
}

fn or(xs: Vec<Nnf>) -> Nnf {
    let mut out = Vec::new();
    for x in xs {
        match x {
            Nnf::False => {}
            Nnf::True => return Nnf::True,
            Nnf::Or(ys) => out.extend(ys),
            y => out.push(y),
        }
    }
    match out.len() {
        0 => Nnf::False,
        1 => out.pop().unwrap(),
        _ => Nnf::Or(out),
    }
}

/// Drops quantified variables that do not occur in their scope.
fn drop_vacuous(f: &Formula) -> Formula {
    match f {
        Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
            let inner = drop_vacuous(g);
            let free = inner.free_vars();
            let keep: Vec<Var> = vs.iter().copied().filter(|v| free.contains(v)).collect();
            if matches!(f, Formula::Forall(..)) {
                Formula::forall(keep, inner)
            } else {
                Formula::exists(keep, inner)
            }
        }
        Formula::Not(g) => Formula::not(drop_vacuous(g)),
        Formula::And(gs) => Formula::And(gs.iter().map(drop_vacuous).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(drop_vacuous).collect()),
        Formula::Implies(a, b) => Formula::implies(drop_vacuous(a), drop_vacuous(b)),
        Formula::Iff(a, b) => Formula::Iff(Box::new(drop_vacuous(a)), Box::new(drop_vacuous(b))),
        other => other.clone(),
    }
}

/// Clausifies one formula. Free variables are read existentially.
/// Returned pairs carry the definer a clause defines, if any.
pub fn trans(table: &mut SymbolTable, next_var: &mut Var, f: &Formula) -> Vec<(Clause, Option<Sym>)> {
    let closed = Formula::exists(f.free_vars(), f.clone());
    let closed = drop_vacuous(&closed);
    let mut ctx = Ctx { table, next_var, defs: Vec::new() };
    let n = ctx.nnf(&closed, true, &HashMap::new());
    let top = ctx.rename(n);
    let defs = std::mem::take(&mut ctx.defs);
    let mut out: Vec<(Clause, Option<Sym>)> =
        ctx.clauses_of(top).into_iter().map(|c| (c, None)).collect();
    for (p, d) in defs {
        out.extend(ctx.clauses_of(d).into_iter().map(|c| (c, Some(p))));
    }
    out
}

/// Clausifies a whole problem: rules, facts, negated queries and input
/// clauses. Rules outside the clique guarded fragment are rejected.
pub fn clausify(prob: &mut Problem) -> Result<ClauseSet, ClausifyError> {
    let mut set = ClauseSet::default();
    for (i, f) in prob.facts.iter().enumerate() {
        set.clauses.push((Clause::new(vec![f.clone()]), ClauseOrigin::Fact(i)));
    }
    let rules = prob.rules.clone();
    for (i, f) in rules.iter().enumerate() {
        if !fragment(f).cgf {
            return Err(ClausifyError::NotGuarded(i));
        }
        for (c, def) in trans(&mut prob.table, &mut prob.next_var, f) {
            let origin = match def {
                Some(definer) => ClauseOrigin::Definition { rule: i, definer },
                None => ClauseOrigin::Rule(i),
            };
            set.clauses.push((c, origin));
        }
    }
    for (i, c) in prob.clauses.iter().enumerate() {
        set.clauses.push((c.normalize(), ClauseOrigin::Input(i)));
    }
    for (i, q) in prob.queries.iter().enumerate() {
        let c = negate_query(q).ok_or(ClausifyError::NotConjunctive(i))?;
        set.clauses.push((c.normalize(), ClauseOrigin::Query(i)));
    }
    Ok(set)
}
