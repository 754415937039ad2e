//! Back-translation of a saturated clause set into a Skolem-symbol-free
//! formula: abstraction of constants and repeated variables inside
//! compound terms, partition into closed sets, renaming of compound-term
//! arguments, unskolemisation and the final negation.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::qans::{saturate_without_facts, AnswerError, Options, Verdict};
use crate::syntax::{print_formula, Formula, Problem};
use crate::terms::{Clause, Literal, Origin, Printer, Sym, SymKind, SymbolTable, Term, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("the saturation contains the empty clause: the query is entailed unconditionally")]
    Bottom,
    #[error("compound terms of one closed set have different arities")]
    ArityMismatch,
    #[error("closed set is not {0}")]
    Gate(&'static str),
}

/// Failure of [`rewrite_problem`].
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PipelineError {
    #[error(transparent)]
    Answer(#[from] AnswerError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

/// A clause with its abstraction disequations `x != t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractedClause {
    pub base: Clause,
    pub disequations: Vec<(Var, Term)>,
}

impl AbstractedClause {
    pub fn new(base: Clause) -> Self {
        AbstractedClause {
            base,
            disequations: Vec::new(),
        }
    }

    /// The base with the disequations as negative equality literals.
    pub fn to_clause(&self, eq: Sym) -> Clause {
        let mut lits = self.base.lits().to_vec();
        for (x, t) in &self.disequations {
            lits.push(Literal::equality(false, eq, Term::Var(*x), t.clone()));
        }
        Clause::new(lits)
    }

    fn next_var(&self) -> Var {
        let d = self.disequations.iter().flat_map(|(x, t)| {
            let mut vs = vec![*x];
            t.vars_into(&mut vs);
            vs
        });
        self.base.vars().into_iter().chain(d).max().map_or(0, |m| m + 1)
    }

    fn map_vars(&self, f: &mut impl FnMut(Var) -> Var) -> AbstractedClause {
        AbstractedClause {
            base: self.base.map_vars(&mut |v| Term::Var(f(v))),
            disequations: self
                .disequations
                .iter()
                .map(|(x, t)| (f(*x), t.map_vars(&mut |v| Term::Var(f(v)))))
                .collect(),
        }
    }

    fn vars(&self) -> Vec<Var> {
        let mut out = self.base.vars();
        for (x, t) in &self.disequations {
            let mut vs = vec![*x];
            t.vars_into(&mut vs);
            for v in vs {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }
}

fn replace_in_term(t: &Term, f: &mut impl FnMut(&Term) -> Option<Term>) -> Term {
    if let Some(r) = f(t) {
        return r;
    }
    match t {
        Term::App(g, args) => Term::App(*g, args.iter().map(|a| replace_in_term(a, f)).collect()),
        _ => t.clone(),
    }
}

fn map_lits(c: &Clause, mut f: impl FnMut(&Literal) -> Literal) -> Clause {
    Clause::new(c.lits().iter().map(&mut f).collect())
}

fn constant_in_compound(c: &Clause) -> Option<Sym> {
    c.lits()
        .iter()
        .flat_map(|l| l.compounds())
        .flat_map(|t| match t {
            Term::App(_, args) => args.iter().find_map(|a| match a {
                Term::Const(k) => Some(*k),
                _ => None,
            }),
            _ => None,
        })
        .next()
}

/// Replaces each constant occurring in a compound term, everywhere in the
/// clause, by a fresh variable `x` and adds `x != a`; repeated until no
/// compound term contains a constant.
pub fn con_abs(ac: &AbstractedClause) -> AbstractedClause {
    let mut out = ac.clone();
    while let Some(a) = constant_in_compound(&out.base) {
        let x = out.next_var();
        let mut rep = |t: &Term| matches!(t, Term::Const(k) if *k == a).then_some(Term::Var(x));
        out.base = map_lits(&out.base, |l| Literal {
            args: l.args.iter().map(|t| replace_in_term(t, &mut rep)).collect(),
            ..l.clone()
        });
        out.disequations.push((x, Term::Const(a)));
    }
    out
}

/// First compound term with a repeated variable: the variable and the
/// position of its second occurrence.
fn duplicate_in_compound(c: &Clause) -> Option<(Var, usize)> {
    for t in c.lits().iter().flat_map(|l| l.compounds()) {
        if let Term::App(_, args) = t {
            for (j, a) in args.iter().enumerate() {
                if let Term::Var(x) = a {
                    if args[..j].contains(a) {
                        return Some((*x, j));
                    }
                }
            }
        }
    }
    None
}

/// Abstracts repeated variables inside compound terms: the repeated
/// position `i` of `x` in every compound term, and the second occurrence of
/// `x` in a flat literal where it repeats, become a fresh `y` with
/// `y != x`; repeated until every compound term is unique.
pub fn var_abs(ac: &AbstractedClause) -> AbstractedClause {
    let mut out = ac.clone();
    while let Some((x, i)) = duplicate_in_compound(&out.base) {
        let y = out.next_var();
        out.base = map_lits(&out.base, |l| {
            if l.has_compound() {
                let args = l
                    .args
                    .iter()
                    .map(|t| match t {
                        Term::App(f, a) if a.get(i) == Some(&Term::Var(x)) => {
                            let mut a = a.clone();
                            a[i] = Term::Var(y);
                            Term::App(*f, a)
                        }
                        _ => t.clone(),
                    })
                    .collect();
                Literal { args, ..l.clone() }
            } else {
                let mut seen = 0;
                let args = l
                    .args
                    .iter()
                    .map(|t| {
                        if *t == Term::Var(x) {
                            seen += 1;
                            if seen == 2 {
                                return Term::Var(y);
                            }
                        }
                        t.clone()
                    })
                    .collect();
                Literal { args, ..l.clone() }
            }
        });
        out.disequations.push((y, Term::Var(x)));
    }
    out
}

/// Constant abstraction followed by variable abstraction.
pub fn q_abs(c: &Clause) -> AbstractedClause {
    var_abs(&con_abs(&AbstractedClause::new(c.clone())))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosedKind {
    Interconnected,
    Flat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedSet {
    pub clauses: Vec<AbstractedClause>,
    pub kind: ClosedKind,
}

fn function_symbols(c: &Clause) -> BTreeSet<Sym> {
    c.lits()
        .iter()
        .flat_map(|l| l.compounds())
        .filter_map(|t| match t {
            Term::App(f, _) => Some(*f),
            _ => None,
        })
        .collect()
}

/// Components under shared function symbols; all flat clauses form one
/// flat set, placed last.
pub fn partition_closed(n: &[AbstractedClause]) -> Vec<ClosedSet> {
    let fs: Vec<BTreeSet<Sym>> = n.iter().map(|c| function_symbols(&c.base)).collect();
    let mut comp: Vec<usize> = (0..n.len()).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n.len() {
        for j in i + 1..n.len() {
            if !fs[i].is_disjoint(&fs[j]) {
                let (a, b) = (find(&mut comp, i), find(&mut comp, j));
                comp[a.max(b)] = a.min(b);
            }
        }
    }
    let mut sets: Vec<(usize, ClosedSet)> = Vec::new();
    let mut flat = Vec::new();
    for i in 0..n.len() {
        if fs[i].is_empty() {
            flat.push(n[i].clone());
            continue;
        }
        let r = find(&mut comp, i);
        match sets.iter_mut().find(|(k, _)| *k == r) {
            Some((_, s)) => s.clauses.push(n[i].clone()),
            None => sets.push((
                r,
                ClosedSet {
                    clauses: vec![n[i].clone()],
                    kind: ClosedKind::Interconnected,
                },
            )),
        }
    }
    let mut out: Vec<ClosedSet> = sets.into_iter().map(|(_, s)| s).collect();
    if !flat.is_empty() {
        out.push(ClosedSet {
            clauses: flat,
            kind: ClosedKind::Flat,
        });
    }
    out
}

/// Hands out variables above every variable seen so far.
#[derive(Clone, Debug)]
pub struct VarSupply {
    next: Var,
}

impl VarSupply {
    pub fn above(n: &[AbstractedClause]) -> Self {
        VarSupply {
            next: n.iter().map(|c| c.next_var()).max().unwrap_or(0),
        }
    }

    pub fn fresh(&mut self) -> Var {
        let v = self.next;
        self.next += 1;
        v
    }
}

/// Argument list shared by the compound terms of a clause.
fn compound_args(c: &Clause) -> Option<Vec<Term>> {
    c.lits().iter().flat_map(|l| l.compounds()).find_map(|t| match t {
        Term::App(_, a) => Some(a.clone()),
        _ => None,
    })
}

/// Renames the compound-term arguments of an interconnected set to one
/// shared sequence of fresh variables and the remaining variables apart
/// per clause. Returns the renamed set and the shared sequence.
pub fn var_re(s: &ClosedSet, supply: &mut VarSupply) -> Result<(ClosedSet, Vec<Var>), RewriteError> {
    if s.kind == ClosedKind::Flat {
        return Ok((s.clone(), Vec::new()));
    }
    let arity = s
        .clauses
        .first()
        .and_then(|c| compound_args(&c.base))
        .map_or(0, |a| a.len());
    let shared: Vec<Var> = (0..arity).map(|_| supply.fresh()).collect();
    let mut out = Vec::new();
    for c in &s.clauses {
        let args = compound_args(&c.base).unwrap_or_default();
        if args.len() != arity {
            return Err(RewriteError::ArityMismatch);
        }
        let mut map: HashMap<Var, Var> = HashMap::new();
        for (a, &y) in args.iter().zip(&shared) {
            match a {
                Term::Var(x) => {
                    map.insert(*x, y);
                }
                _ => return Err(RewriteError::Gate("normal")),
            }
        }
        for v in c.vars() {
            map.entry(v).or_insert_with(|| supply.fresh());
        }
        out.push(c.map_vars(&mut |v| map[&v]));
    }
    Ok((
        ClosedSet {
            clauses: out,
            kind: s.kind,
        },
        shared,
    ))
}

/// Clausal-set properties that gate unskolemisation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PropertyReport {
    pub normal: bool,
    pub unique: bool,
    pub locally_linear: bool,
    pub locally_compatible: bool,
    pub globally_linear: bool,
    pub globally_compatible: bool,
}

fn arg_set(t: &Term) -> BTreeSet<&Term> {
    match t {
        Term::App(_, a) => a.iter().collect(),
        _ => BTreeSet::new(),
    }
}

fn compounds_of(c: &Clause) -> Vec<&Term> {
    c.lits().iter().flat_map(|l| l.compounds()).collect()
}

fn linear(ts: &[&Term]) -> bool {
    ts.iter().enumerate().all(|(i, t)| {
        ts[i + 1..].iter().all(|s| match (t, s) {
            (Term::App(f, _), Term::App(g, _)) if f != g => {
                let (a, b) = (arg_set(t), arg_set(s));
                a.is_subset(&b) || b.is_subset(&a)
            }
            _ => true,
        })
    })
}

fn compatible(ts: &[&Term]) -> bool {
    ts.iter().enumerate().all(|(i, t)| {
        ts[i + 1..].iter().all(|s| match (t, s) {
            (Term::App(f, a), Term::App(g, b)) if f == g => a == b,
            _ => true,
        })
    })
}

/// The six properties. Global linearity and compatibility compare compound
/// terms within each group of clauses connected by shared function
/// symbols, the unit that is unskolemised together.
pub fn property_gate(n: &[Clause]) -> PropertyReport {
    let all: Vec<&Term> = n.iter().flat_map(compounds_of).collect();
    let normal = all
        .iter()
        .all(|t| matches!(t, Term::App(_, a) if a.iter().all(|x| x.is_var())));
    let unique = all.iter().all(|t| match t {
        Term::App(_, a) => a.iter().collect::<BTreeSet<_>>().len() == a.len() && a.iter().all(|x| x.is_var()),
        _ => true,
    });
    let locally_linear = n.iter().all(|c| linear(&compounds_of(c)));
    let locally_compatible = n.iter().all(|c| compatible(&compounds_of(c)));
    let groups = partition_closed(&n.iter().cloned().map(AbstractedClause::new).collect::<Vec<_>>());
    let group_terms: Vec<Vec<Term>> = groups
        .iter()
        .map(|g| {
            g.clauses
                .iter()
                .flat_map(|c| compounds_of(&c.base).into_iter().cloned().collect::<Vec<_>>())
                .collect()
        })
        .collect();
    let globally_linear = group_terms.iter().all(|ts| linear(&ts.iter().collect::<Vec<_>>()));
    let globally_compatible = group_terms.iter().all(|ts| compatible(&ts.iter().collect::<Vec<_>>()));
    PropertyReport {
        normal,
        unique,
        locally_linear,
        locally_compatible,
        globally_linear,
        globally_compatible,
    }
}

fn is_skolem_const(table: &SymbolTable, s: Sym) -> bool {
    table.info(s).kind == SymKind::Constant && table.origin(s) == Origin::Skolem
}

fn skolem_constants(table: &SymbolTable, c: &AbstractedClause, eq: Sym) -> BTreeSet<Sym> {
    let mut out = BTreeSet::new();
    fn go(table: &SymbolTable, t: &Term, out: &mut BTreeSet<Sym>) {
        match t {
            Term::Const(k) if is_skolem_const(table, *k) => {
                out.insert(*k);
            }
            Term::App(_, a) => a.iter().for_each(|x| go(table, x, out)),
            _ => {}
        }
    }
    for l in c.to_clause(eq).lits() {
        for t in &l.args {
            go(table, t, &mut out);
        }
    }
    out
}

fn literal_formula(l: &Literal) -> Formula {
    let atom = Formula::Atom(Literal { pos: true, ..l.clone() });
    if l.pos {
        atom
    } else {
        Formula::not(atom)
    }
}

fn clause_formula(c: &Clause) -> Formula {
    match c.lits() {
        [] => Formula::False,
        [l] => literal_formula(l),
        ls => Formula::Or(ls.iter().map(literal_formula).collect()),
    }
}

/// Replaces Skolem terms and constants by their variables.
fn unskolemise_term(t: &Term, f_vars: &BTreeMap<Sym, Var>, c_vars: &BTreeMap<Sym, Var>) -> Term {
    match t {
        Term::App(f, _) => Term::Var(f_vars[f]),
        Term::Const(k) => c_vars.get(k).map_or_else(|| t.clone(), |v| Term::Var(*v)),
        _ => t.clone(),
    }
}

/// Quantifier prefix of an unskolemised closed set, outermost first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Quant {
    Forall(Vec<Var>),
    Exists(Vec<Var>),
}

/// Unskolemises one renamed closed set. Every function symbol is read as
/// a Skolem function. `global` holds the variables of
/// Skolem constants quantified outside every conjunct.
pub fn unsko(
    table: &SymbolTable,
    eq: Sym,
    s: &ClosedSet,
    shared: &[Var],
    global: &BTreeMap<Sym, Var>,
    supply: &mut VarSupply,
) -> Result<(Formula, Vec<Quant>), RewriteError> {
    let clauses: Vec<Clause> = s.clauses.iter().map(|c| c.base.clone()).collect();
    let gate = property_gate(&clauses);
    for (ok, name) in [
        (gate.normal, "normal"),
        (gate.unique, "unique"),
        (gate.globally_linear, "globally linear"),
        (gate.globally_compatible, "globally compatible"),
    ] {
        if !ok {
            return Err(RewriteError::Gate(name));
        }
    }
    let mut consts: BTreeSet<Sym> = BTreeSet::new();
    let mut funs: BTreeSet<Sym> = BTreeSet::new();
    for c in &s.clauses {
        consts.extend(skolem_constants(table, c, eq));
        funs.extend(function_symbols(&c.base));
    }
    let mut c_vars = global.clone();
    let mut local_consts = Vec::new();
    for k in consts {
        c_vars.entry(k).or_insert_with(|| {
            let v = supply.fresh();
            local_consts.push(v);
            v
        });
    }
    let f_vars: BTreeMap<Sym, Var> = funs.iter().map(|f| (*f, supply.fresh())).collect();
    let mut residual: Vec<Var> = Vec::new();
    let mut body = Vec::new();
    for c in &s.clauses {
        for v in c.vars() {
            if !shared.contains(&v) && !residual.contains(&v) {
                residual.push(v);
            }
        }
        let cl = c.to_clause(eq);
        let lits: Vec<Literal> = cl
            .lits()
            .iter()
            .map(|l| Literal {
                args: l.args.iter().map(|t| unskolemise_term(t, &f_vars, &c_vars)).collect(),
                ..l.clone()
            })
            .collect();
        body.push(clause_formula(&Clause::new(lits)));
    }
    let matrix = if body.len() == 1 { body.pop().unwrap() } else { Formula::And(body) };
    let mut prefix = Vec::new();
    if !local_consts.is_empty() {
        prefix.push(Quant::Exists(local_consts));
    }
    match s.kind {
        ClosedKind::Interconnected => {
            if !shared.is_empty() {
                prefix.push(Quant::Forall(shared.to_vec()));
            }
            if !f_vars.is_empty() {
                prefix.push(Quant::Exists(f_vars.values().copied().collect()));
            }
            if !residual.is_empty() {
                prefix.push(Quant::Forall(residual));
            }
        }
        ClosedKind::Flat => {
            if !residual.is_empty() {
                prefix.push(Quant::Forall(residual));
            }
        }
    }
    Ok((close(&prefix, matrix), prefix))
}

fn close(prefix: &[Quant], matrix: Formula) -> Formula {
    prefix.iter().rev().fold(matrix, |f, q| match q {
        Quant::Forall(vs) => Formula::forall(vs.clone(), f),
        Quant::Exists(vs) => Formula::exists(vs.clone(), f),
    })
}

#[derive(Clone, Debug)]
pub struct RewriteResult {
    /// The negation of the back-translated saturation.
    pub sigma_q: Formula,
    /// One conjunct per closed set, before negation.
    pub conjuncts: Vec<Formula>,
    pub prefixes: Vec<Vec<Quant>>,
    pub closed_sets: Vec<ClosedSet>,
    pub skolem_constants_internalized: Vec<Sym>,
    pub equality_used: bool,
    /// The `formula: <sigma_q>.` statement.
    pub text: String,
    /// SHA-256 of `text`, in hex.
    pub hash: String,
}

/// Saturates the problem without its facts and rewrites the result.
/// Fails with [`RewriteError::Bottom`] when the rules alone entail the
/// query.
pub fn rewrite_problem(problem: &Problem, opts: Options) -> Result<RewriteResult, PipelineError> {
    let mut a = saturate_without_facts(problem, opts)?;
    if a.verdict == Verdict::Yes {
        return Err(RewriteError::Bottom.into());
    }
    let n: Vec<Clause> = a.saturation.worked_off().into_iter().cloned().collect();
    Ok(q_rew(&mut a.saturation.table, &n)?)
}

/// Rewrites a saturation of rules and negated query, without data, into
/// a formula `sigma_q` such that data entail the query iff they entail
/// `sigma_q`.
pub fn q_rew(table: &mut SymbolTable, saturation: &[Clause]) -> Result<RewriteResult, RewriteError> {
    if saturation.iter().any(|c| c.is_empty()) {
        return Err(RewriteError::Bottom);
    }
    let eq = table.equality();
    let abstracted: Vec<AbstractedClause> = saturation.iter().map(q_abs).collect();
    // rename clauses apart so that closed sets share no variables
    let mut supply = VarSupply::above(&[]);
    let abstracted: Vec<AbstractedClause> = abstracted
        .iter()
        .map(|c| {
            let mut map = HashMap::new();
            c.map_vars(&mut |v| *map.entry(v).or_insert_with(|| supply.fresh()))
        })
        .collect();
    let closed = partition_closed(&abstracted);
    let mut owners: BTreeMap<Sym, BTreeSet<usize>> = BTreeMap::new();
    for (i, s) in closed.iter().enumerate() {
        for c in &s.clauses {
            for k in skolem_constants(table, c, eq) {
                owners.entry(k).or_default().insert(i);
            }
        }
    }
    let global: BTreeMap<Sym, Var> = owners
        .iter()
        .filter(|(_, o)| o.len() > 1)
        .map(|(k, _)| (*k, supply.fresh()))
        .collect();
    let mut conjuncts = Vec::new();
    let mut prefixes = Vec::new();
    let mut renamed = Vec::new();
    for s in &closed {
        let (r, shared) = var_re(s, &mut supply)?;
        let (f, p) = unsko(table, eq, &r, &shared, &global, &mut supply)?;
        conjuncts.push(f);
        prefixes.push(p);
        renamed.push(r);
    }
    let body = match conjuncts.len() {
        0 => Formula::True,
        1 => conjuncts[0].clone(),
        _ => Formula::And(conjuncts.clone()),
    };
    let back = Formula::exists(global.values().copied().collect(), body);
    let sigma_q = back.negated_nnf();
    let equality_used = sigma_q.has_equality();
    let names = variable_names(&sigma_q);
    let text = format!("formula: {}.", print_formula(&Printer::with_names(table, &names), &sigma_q));
    let hash = hex::encode(Sha256::digest(text.as_bytes()));
    Ok(RewriteResult {
        sigma_q,
        conjuncts,
        prefixes,
        closed_sets: renamed,
        skolem_constants_internalized: owners.keys().copied().collect(),
        equality_used,
        text,
        hash,
    })
}

/// Names variables `V0, V1, ...` in order of first binding, so the printed
/// formula does not depend on internal numbering.
fn variable_names(f: &Formula) -> HashMap<Var, String> {
    fn go(f: &Formula, out: &mut HashMap<Var, String>) {
        match f {
            Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
                for v in vs {
                    let n = out.len();
                    out.entry(*v).or_insert_with(|| format!("V{n}"));
                }
                go(g, out);
            }
            Formula::Not(g) => go(g, out),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| go(g, out)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                go(a, out);
                go(b, out);
            }
            _ => {}
        }
    }
    let mut out = HashMap::new();
    go(f, &mut out);
    out
}

/// True if the formula mentions a function symbol or a Skolem constant.
/// Function symbols only arise from Skolemisation.
pub fn mentions_skolem(table: &SymbolTable, f: &Formula) -> bool {
    fn term(table: &SymbolTable, t: &Term) -> bool {
        match t {
            Term::Var(_) => false,
            Term::Const(k) => table.origin(*k) == Origin::Skolem,
            Term::App(..) => true,
        }
    }
    f.atoms().iter().any(|l| l.args.iter().any(|t| term(table, t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_into, parse_problem, Problem};
    use crate::terms::is_variant;

    const N: &str = "clause: ~g1(X1,a) | a1(f(X1,a),X1) | a2(g(X1,a),X1).
        clause: ~g2(X2,X3) | a3(f(X2,X3),X2) | a4(g(X2,X3),X2).
        clause: ~g3(b,X4) | a5(g(b,X4),b).
        clause: ~g4(X5,c,c) | a6(h(c,c,X5)) | a7(h(c,c,X5)).
        clause: ~b1(X8,X6) | ~b2(X6,X7) | ~b3(X7,X8).
        skolem: b.";

    fn n() -> Problem {
        parse_problem(N).unwrap()
    }

    fn ac(p: &mut Problem, base: &str, diseq: &[(&str, &str)]) -> Clause {
        let mut s = base.to_string();
        for (x, t) in diseq {
            s.push_str(&format!(" | {x} != {t}"));
        }
        crate::syntax::parse_clause(p, &s).unwrap()
    }

    #[test]
    fn constants_are_abstracted_everywhere() {
        let mut p = n();
        let eq = p.table.equality();
        let got = con_abs(&AbstractedClause::new(p.clauses[2].clone())).to_clause(eq);
        let want = ac(&mut p, "~g3(Y2,X4) | a5(g(Y2,X4),Y2)", &[("Y2", "b")]);
        assert!(is_variant(&got, &want));
        let flat = AbstractedClause::new(p.clauses[4].clone());
        assert_eq!(con_abs(&flat), flat);
    }

    #[test]
    fn repeated_variables_are_abstracted() {
        let mut p = n();
        let eq = p.table.equality();
        let got = q_abs(&p.clauses[3]).to_clause(eq);
        let want = ac(
            &mut p,
            "~g4(X5,Y3,Y4) | a6(h(Y3,Y4,X5)) | a7(h(Y3,Y4,X5))",
            &[("Y3", "c"), ("Y4", "Y3")],
        );
        assert!(is_variant(&got, &want), "{}", Printer::new(&p.table).clause(&got));
    }

    #[test]
    fn triple_repetition_chains_to_the_first_variable() {
        let mut p = Problem::default();
        let c = crate::syntax::parse_clause(&mut p, "~g(X) | a(f(X,X,X))").unwrap();
        let r = var_abs(&AbstractedClause::new(c));
        assert_eq!(r.disequations.len(), 2);
        assert!(r.disequations.iter().all(|(_, t)| *t == Term::Var(0)));
        let args = compound_args(&r.base).unwrap();
        assert_eq!(args.iter().collect::<BTreeSet<_>>().len(), 3);
    }

    #[test]
    fn abstraction_is_idempotent() {
        let p = n();
        for c in &p.clauses {
            let once = q_abs(c);
            assert_eq!(var_abs(&con_abs(&once)), once);
        }
    }

    #[test]
    fn partition_matches_the_example() {
        let p = n();
        let abs: Vec<AbstractedClause> = p.clauses.iter().map(q_abs).collect();
        let sets = partition_closed(&abs);
        let sizes: Vec<(usize, ClosedKind)> = sets.iter().map(|s| (s.clauses.len(), s.kind)).collect();
        assert_eq!(
            sizes,
            vec![
                (3, ClosedKind::Interconnected),
                (1, ClosedKind::Interconnected),
                (1, ClosedKind::Flat)
            ]
        );
    }

    #[test]
    fn property_gate_before_and_after_renaming() {
        let mut p = n();
        let eq = p.table.equality();
        assert!(!property_gate(&[p.clauses[0].clone()]).normal);
        let abs: Vec<AbstractedClause> = p.clauses.iter().map(q_abs).collect();
        let bases: Vec<Clause> = abs.iter().map(|c| c.base.clone()).collect();
        let r = property_gate(&bases);
        assert!(r.normal && r.unique && r.locally_linear && r.locally_compatible);
        assert!(!r.globally_compatible);
        let mut supply = VarSupply::above(&abs);
        let mut all = Vec::new();
        for s in partition_closed(&abs) {
            let (s, _) = var_re(&s, &mut supply).unwrap();
            all.extend(s.clauses.iter().map(|c| c.base.clone()));
        }
        let r = property_gate(&all);
        assert_eq!(
            r,
            PropertyReport {
                normal: true,
                unique: true,
                locally_linear: true,
                locally_compatible: true,
                globally_linear: true,
                globally_compatible: true
            }
        );
        let _ = eq;
        let _ = &mut p;
    }

    #[test]
    fn rewriting_matches_the_example_shapes() {
        let mut p = n();
        let clauses = p.clauses.clone();
        let r = q_rew(&mut p.table, &clauses).unwrap();
        let shapes: Vec<String> = r
            .prefixes
            .iter()
            .map(|q| {
                q.iter()
                    .map(|x| match x {
                        Quant::Forall(_) => 'A',
                        Quant::Exists(_) => 'E',
                    })
                    .collect()
            })
            .collect();
        assert_eq!(shapes, vec!["EAE", "AE", "A"]);
        assert!(!mentions_skolem(&p.table, &r.sigma_q));
        assert!(r.equality_used);
        assert_eq!(r.skolem_constants_internalized.len(), 1);
        let mut back = Problem {
            table: p.table.clone(),
            ..Problem::default()
        };
        parse_into(&mut back, &r.text).unwrap();
        assert_eq!(back.formulas.len(), 1);
    }

    #[test]
    fn bottom_is_rejected() {
        let mut p = n();
        assert_eq!(q_rew(&mut p.table, &[Clause::empty()]).unwrap_err(), RewriteError::Bottom);
    }

    #[test]
    fn flat_saturation_is_a_negated_universal_closure() {
        let mut p = parse_problem("clause: ~r(X,Y) | ~s(Y).").unwrap();
        let clauses = p.clauses.clone();
        let r = q_rew(&mut p.table, &clauses).unwrap();
        assert!(matches!(r.sigma_q, Formula::Exists(..)));
        assert!(!r.equality_used);
    }
}
