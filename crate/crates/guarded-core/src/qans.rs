//! The given-clause saturation loop that answers Boolean conjunctive
//! queries: clausification, separation of the negated queries, input
//! reduction and saturation with top-variable resolution, factoring and
//! the indecomposable-query pipeline.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::classes::{is_lgq, membership};
use crate::clausify::{clausify, ClausifyError};
use crate::engine::{
    ground_collapse_holds, pairing_holds, side_tuples, Calculus, ClauseId, Role, Rule, SideCand, TopVarResult,
};
use crate::order::{Lpo, Precedence};
use crate::qic::q_ic;
use crate::qsep::{is_icq, q_sep, DefinerRegistry, SepRule, SepStep};
use crate::syntax::Problem;
use crate::terms::{condense, subsumes, Clause, Printer, SymKind, SymbolTable};

/// Default bound on Deduce events.
pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;

#[derive(Clone, Debug)]
pub struct Options {
    pub max_steps: u64,
    /// Seeds the tie-break between clauses of equal weight.
    pub seed: u64,
    /// Checks class membership and the top-variable audits on every step.
    pub audit: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            max_steps: DEFAULT_MAX_STEPS,
            seed: 0,
            audit: false,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnswerError {
    #[error(transparent)]
    Clausify(#[from] ClausifyError),
    #[error("step budget of {0} Deduce events exhausted")]
    Budget(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The query is entailed: the empty clause was derived.
    Yes,
    /// Saturation finished without the empty clause.
    No,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event {
    Deduce {
        id: ClauseId,
        rule: Rule,
        parents: Vec<ClauseId>,
    },
    Delete {
        id: ClauseId,
        by: ClauseId,
    },
}

/// Results of the audits run with [`Options::audit`].
#[derive(Clone, Debug, Default)]
pub struct Audit {
    pub violations: Vec<String>,
    /// Largest width of an input clause.
    pub max_width: usize,
    /// Top-variable steps with a flat main premise that were checked.
    pub top_steps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Usable,
    WorkedOff,
    Deleted,
}

/// A conclusion waiting for simplification.
#[derive(Clone, Debug)]
struct Derived {
    rule: Rule,
    parents: Vec<ClauseId>,
    clause: Clause,
}

/// Saturation state: every clause ever kept, split into worked-off and
/// usable clauses, with the trace of Deduce and Delete events.
pub struct Saturation {
    pub table: SymbolTable,
    prec: Precedence,
    pub registry: DefinerRegistry,
    clauses: Vec<Clause>,
    slots: Vec<Slot>,
    tiebreak: Vec<u64>,
    by_weight: BTreeSet<(usize, u64, ClauseId)>,
    by_age: BTreeSet<ClauseId>,
    rng: ChaCha8Rng,
    picks: u64,
    /// Deduce events so far.
    pub steps: u64,
    opts: Options,
    pub trace: Vec<Event>,
    pub audit: Audit,
    bottom: Option<ClauseId>,
}

/// Ratio of lightest picks to oldest picks.
const WEIGHT_PICKS: u64 = 4;

fn rule_of(steps: &[SepStep], c: &Clause) -> Option<Rule> {
    steps.iter().find(|s| s.conclusions.contains(c)).map(|s| match s.rule {
        SepRule::DeQ => Rule::SepDeQ,
        SepRule::IndeQ => Rule::SepIndeQ,
    })
}

impl Saturation {
    /// An empty saturation over `table` with the default precedence.
    pub fn new(table: SymbolTable, opts: Options) -> Self {
        let prec = Precedence::new(&table);
        Saturation::with_precedence(table, prec, opts)
    }

    pub fn with_precedence(table: SymbolTable, prec: Precedence, opts: Options) -> Self {
        Saturation {
            table,
            prec,
            registry: DefinerRegistry::default(),
            clauses: Vec::new(),
            slots: Vec::new(),
            tiebreak: Vec::new(),
            by_weight: BTreeSet::new(),
            by_age: BTreeSet::new(),
            rng: ChaCha8Rng::seed_from_u64(opts.seed),
            picks: 0,
            steps: 0,
            opts,
            trace: Vec::new(),
            audit: Audit::default(),
            bottom: None,
        }
    }

    pub fn precedence(&self) -> &Precedence {
        &self.prec
    }

    pub fn clause(&self, id: ClauseId) -> &Clause {
        &self.clauses[id]
    }

    /// Every clause ever kept, indexed by id.
    pub fn all_clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn worked_off(&self) -> Vec<&Clause> {
        self.ids_in(Slot::WorkedOff).map(|i| &self.clauses[i]).collect()
    }

    pub fn usable(&self) -> Vec<&Clause> {
        self.ids_in(Slot::Usable).map(|i| &self.clauses[i]).collect()
    }

    fn ids_in(&self, slot: Slot) -> impl Iterator<Item = ClauseId> + '_ {
        (0..self.clauses.len()).filter(move |&i| self.slots[i] == slot)
    }

    /// Id of the empty clause, once derived.
    pub fn bottom(&self) -> Option<ClauseId> {
        self.bottom
    }

    /// Adds input clauses. Query clauses are separated first; the result is
    /// simplified and enqueued. Worked-off clauses stay worked off, so a
    /// finished saturation can be resumed with more clauses.
    pub fn add_input(&mut self, input: impl IntoIterator<Item = Clause>) {
        let derived: Vec<Derived> = input
            .into_iter()
            .map(|c| {
                self.audit.max_width = self.audit.max_width.max(c.width());
                Derived {
                    rule: Rule::Input,
                    parents: Vec::new(),
                    clause: c,
                }
            })
            .collect();
        self.insert_all(derived);
    }

    /// Removes the next given clause: every fifth pick is the oldest usable
    /// clause, the others are the lightest.
    fn pick(&mut self) -> Option<ClauseId> {
        self.picks += 1;
        let id = if self.picks % (WEIGHT_PICKS + 1) == 0 {
            *self.by_age.iter().next()?
        } else {
            self.by_weight.iter().next()?.2
        };
        self.unqueue(id);
        Some(id)
    }

    fn unqueue(&mut self, id: ClauseId) {
        self.by_age.remove(&id);
        self.by_weight.remove(&(self.clauses[id].weight(), self.tiebreak[id], id));
    }

    /// Runs the loop until the empty clause appears or no usable clause
    /// remains.
    pub fn run(&mut self) -> Result<Verdict, AnswerError> {
        loop {
            if self.bottom.is_some() {
                return Ok(Verdict::Yes);
            }
            let Some(given) = self.pick() else {
                return Ok(Verdict::No);
            };
            self.slots[given] = Slot::WorkedOff;
            let derived = self.infer(given);
            self.steps += derived.len() as u64;
            if self.steps > self.opts.max_steps {
                return Err(AnswerError::Budget(self.opts.max_steps));
            }
            self.insert_all(derived);
        }
    }

    /// All conclusions between `given` and the worked-off clauses.
    fn infer(&mut self, given: ClauseId) -> Vec<Derived> {
        let worked: Vec<ClauseId> = self.ids_in(Slot::WorkedOff).collect();
        let mut out = Vec::new();
        let mut icq_jobs: Vec<(ClauseId, Option<ClauseId>)> = Vec::new();
        let mut audits: Vec<(ClauseId, TopVarResult, crate::terms::Subst)> = Vec::new();
        {
            let calc = Calculus::new(Lpo::new(&self.table, &self.prec));
            let roles: Vec<(ClauseId, Role)> = worked.iter().map(|&i| (i, calc.role(&self.clauses[i]))).collect();
            let role_of = |id: ClauseId| &roles.iter().find(|(i, _)| *i == id).expect("given is worked off").1;
            let mut cands = Vec::new();
            for (id, r) in &roles {
                if let Role::Side { lits, .. } = r {
                    for &l in lits {
                        cands.push(SideCand {
                            id: *id,
                            clause: &self.clauses[*id],
                            lit: l,
                        });
                    }
                }
            }
            let g = &self.clauses[given];
            let mut hyper = |main: ClauseId, negs: &[usize], must: Option<ClauseId>, out: &mut Vec<Derived>| {
                let m = &self.clauses[main];
                for t in side_tuples(m, negs, &cands, must) {
                    let sides: Vec<(&Clause, usize)> = t.iter().map(|&k| (cands[k].clause, cands[k].lit)).collect();
                    let Some(inf) = calc.t_res(m, negs, &sides) else {
                        continue;
                    };
                    let mut parents = vec![main];
                    let tv = inf.top.expect("top-variable step");
                    for (k, (mi, _, _)) in t.iter().zip(&tv.side_assignment) {
                        if tv.top_literals.contains(mi) {
                            parents.push(cands[*k].id);
                        }
                    }
                    if self.opts.audit {
                        audits.push((main, tv, inf.mgu.clone()));
                    }
                    out.push(Derived {
                        rule: Rule::TRes2b,
                        parents,
                        clause: inf.conclusion,
                    });
                }
            };
            match role_of(given) {
                Role::BinaryMain(mi) => {
                    for c in cands.iter() {
                        if let Some(inf) = calc.binary(g, *mi, c.clause, c.lit) {
                            out.push(Derived {
                                rule: Rule::TRes2a,
                                parents: vec![given, c.id],
                                clause: inf.conclusion,
                            });
                        }
                    }
                }
                Role::HyperMain(negs) => {
                    if is_icq(g) {
                        icq_jobs.push((given, None));
                    } else {
                        hyper(given, negs, None, &mut out);
                    }
                }
                Role::Side { lits, .. } => {
                    for inf in calc.factor(g) {
                        out.push(Derived {
                            rule: Rule::Factor,
                            parents: vec![given],
                            clause: inf.conclusion,
                        });
                    }
                    for (main, r) in &roles {
                        match r {
                            Role::BinaryMain(mi) => {
                                for &si in lits {
                                    if let Some(inf) = calc.binary(&self.clauses[*main], *mi, g, si) {
                                        out.push(Derived {
                                            rule: Rule::TRes2a,
                                            parents: vec![*main, given],
                                            clause: inf.conclusion,
                                        });
                                    }
                                }
                            }
                            Role::HyperMain(negs) => {
                                if is_icq(&self.clauses[*main]) {
                                    icq_jobs.push((*main, Some(given)));
                                } else {
                                    hyper(*main, negs, Some(given), &mut out);
                                }
                            }
                            _ => {}
                        }
                    }
                }
                Role::Passive => {}
            }
        }
        for (main, tv, sigma) in audits {
            let m = &self.clauses[main];
            if m.is_flat() && !m.is_ground() && is_lgq(m) {
                self.audit.top_steps += 1;
                if !pairing_holds(m, &tv) || !ground_collapse_holds(m, &tv, &sigma) {
                    self.audit
                        .violations
                        .push(format!("top-variable audit failed on main premise {main}"));
                }
            }
        }
        for (main, must) in icq_jobs {
            out.extend(self.icq(main, must, &worked));
        }
        out
    }

    /// Eager top-variable resolution of an indecomposable query clause
    /// against the worked-off side premises.
    fn icq(&mut self, main: ClauseId, must: Option<ClauseId>, worked: &[ClauseId]) -> Vec<Derived> {
        let side_ids: Vec<ClauseId> = worked.iter().copied().filter(|&i| i != main).collect();
        let sides: Vec<Clause> = side_ids.iter().map(|&i| self.clauses[i].clone()).collect();
        let must_idx = must.and_then(|m| side_ids.iter().position(|&i| i == m));
        if must.is_some() && must_idx.is_none() {
            return Vec::new();
        }
        let icq = self.clauses[main].clone();
        let steps = q_ic(&mut self.table, &self.prec, &mut self.registry, &icq, &sides, must_idx);
        let mut out = Vec::new();
        for s in steps {
            let mut parents = vec![main];
            for (k, (mi, _, _)) in s.sides.iter().zip(&s.top.side_assignment) {
                if s.top.top_literals.contains(mi) {
                    parents.push(side_ids[*k]);
                }
            }
            for c in s.conclusions {
                let rule = if s.ttrans.query.is_none() {
                    Rule::TRes2b
                } else if s.ttrans.lg.contains(&c) {
                    Rule::TTrans
                } else {
                    rule_of(&s.sep, &c).unwrap_or(Rule::TTrans)
                };
                out.push(Derived {
                    rule,
                    parents: parents.clone(),
                    clause: c,
                });
            }
        }
        out
    }

    /// Condensation, tautology deletion and separation of query clauses
    /// that are not loosely guarded.
    fn prepare(&mut self, d: Derived) -> Vec<Derived> {
        let c = condense(&d.clause.normalize());
        if c.is_tautology() {
            return Vec::new();
        }
        let m = membership(&c);
        if !m.query || m.lg || c.is_ground() {
            return vec![Derived { clause: c, ..d }];
        }
        let (outs, steps) = q_sep(&c, &mut self.table, &mut self.registry);
        outs.into_iter()
            .map(|o| Derived {
                rule: rule_of(&steps, &o).unwrap_or(d.rule),
                parents: d.parents.clone(),
                clause: condense(&o.normalize()),
            })
            .collect()
    }

    fn subsumed(&self, c: &Clause, batch: &[Clause]) -> bool {
        batch.iter().any(|d| subsumes(d, c))
            || self
                .ids_in(Slot::WorkedOff)
                .chain(self.ids_in(Slot::Usable))
                .any(|i| subsumes(&self.clauses[i], c))
    }

    /// Simplifies `derived` against itself and the kept clauses, deletes
    /// kept clauses subsumed by a survivor and enqueues the survivors.
    fn insert_all(&mut self, derived: Vec<Derived>) {
        let mut batch: Vec<Derived> = Vec::new();
        for d in derived {
            for p in self.prepare(d) {
                let cs: Vec<Clause> = batch.iter().map(|b| b.clause.clone()).collect();
                if self.subsumed(&p.clause, &cs) {
                    continue;
                }
                batch.retain(|b| !subsumes(&p.clause, &b.clause));
                batch.push(p);
            }
        }
        for d in batch {
            if self.bottom.is_some() {
                return;
            }
            if d.clause.is_empty() {
                // the loop stops here; nothing is left to simplify
                self.insert(d);
                return;
            }
            let id = self.clauses.len();
            let victims: Vec<ClauseId> = self
                .ids_in(Slot::WorkedOff)
                .chain(self.ids_in(Slot::Usable))
                .filter(|&i| subsumes(&d.clause, &self.clauses[i]))
                .collect();
            self.insert(d);
            for v in victims {
                if self.slots[v] == Slot::Usable {
                    self.unqueue(v);
                }
                self.slots[v] = Slot::Deleted;
                self.trace.push(Event::Delete { id: v, by: id });
            }
        }
    }

    fn insert(&mut self, d: Derived) {
        let id = self.clauses.len();
        let c = d.clause;
        if self.opts.audit && d.rule != Rule::Input {
            if !is_lgq(&c) {
                self.audit.violations.push(format!("clause {id} is neither loosely guarded nor a query clause"));
            }
            if c.width() > self.audit.max_width {
                self.audit.violations.push(format!("clause {id} exceeds the input width"));
            }
        }
        let tb = self.rng.next_u64();
        if c.is_empty() {
            self.bottom = Some(id);
        }
        self.by_weight.insert((c.weight(), tb, id));
        self.by_age.insert(id);
        self.tiebreak.push(tb);
        self.slots.push(Slot::Usable);
        self.clauses.push(c);
        self.trace.push(Event::Deduce {
            id,
            rule: d.rule,
            parents: d.parents,
        });
    }

    /// The trace, one event per line: `[id] rule(parents) clause`.
    pub fn trace_lines(&self) -> Vec<String> {
        let pr = Printer::new(&self.table);
        self.trace
            .iter()
            .map(|e| match e {
                Event::Deduce { id, rule, parents } => {
                    let ps: Vec<String> = parents.iter().map(|p| p.to_string()).collect();
                    format!("[{id}] {}({}) {}", rule.name(), ps.join(","), pr.clause(&self.clauses[*id]))
                }
                Event::Delete { id, by } => {
                    format!("[{id}] delete({by}) {}", pr.clause(&self.clauses[*id]))
                }
            })
            .collect()
    }

    pub fn trace_text(&self) -> String {
        let mut s = String::new();
        for l in self.trace_lines() {
            let _ = writeln!(s, "{l}");
        }
        s
    }

    /// Static bound on the number of definers: clause forms over the
    /// current signature with at most `width` variables and term depth at
    /// most one, once per definer kind. Saturates at `u128::MAX`.
    pub fn definer_bound(&self, width: usize) -> u128 {
        canonical_bound(&self.table, width)
    }
}

/// Number of clause forms with at most `width` variables and depth at most
/// one over the signature of `table`, times the four definer kinds.
pub fn canonical_bound(table: &SymbolTable, width: usize) -> u128 {
    let consts = table.symbols().filter(|(_, i)| i.kind == SymKind::Constant).count() as u128;
    let flat_args = width as u128 + consts;
    let mut terms = flat_args;
    for (_, i) in table.symbols().filter(|(_, i)| i.kind == SymKind::Function) {
        terms = terms.saturating_add(flat_args.saturating_pow(i.arity as u32));
    }
    let mut atoms: u128 = 0;
    for (_, i) in table
        .symbols()
        .filter(|(_, i)| matches!(i.kind, SymKind::Predicate | SymKind::Propositional))
    {
        atoms = atoms.saturating_add(terms.saturating_pow(i.arity as u32));
    }
    let literals = atoms.saturating_mul(2);
    let clauses = if literals >= 127 { u128::MAX } else { 1u128 << literals };
    clauses.saturating_mul(4)
}

/// Verdict with the saturation that produced it.
pub struct Answer {
    pub verdict: Verdict,
    pub saturation: Saturation,
}

/// Answers the problem's queries: Yes iff the rules, facts and clauses
/// entail the disjunction of the queries.
pub fn answer(problem: &Problem, opts: Options) -> Result<Answer, AnswerError> {
    let mut p = problem.clone();
    let set = clausify(&mut p)?;
    let mut sat = Saturation::new(p.table, opts);
    sat.add_input(set.clauses.into_iter().map(|(c, _)| c));
    let verdict = sat.run()?;
    Ok(Answer { verdict, saturation: sat })
}

/// Saturates the problem without its facts, as needed before rewriting.
pub fn saturate_without_facts(problem: &Problem, opts: Options) -> Result<Answer, AnswerError> {
    let mut p = problem.clone();
    p.facts.clear();
    answer(&p, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_clause, parse_problem};
    use crate::terms::is_variant;

    fn run(src: &str) -> Answer {
        let p = parse_problem(src).unwrap();
        answer(&p, Options { audit: true, ..Options::default() }).unwrap()
    }

    #[test]
    fn unit_conflict_is_entailed() {
        let a = run("fact: a(c). query: ? [X] : a(X).");
        assert_eq!(a.verdict, Verdict::Yes);
    }

    #[test]
    fn no_data_is_not_entailed() {
        let a = run("rule: ! [X] : (a(X) => b(X)). query: ? [X] : a(X).");
        assert_eq!(a.verdict, Verdict::No);
    }

    #[test]
    fn worked_example_derivation() {
        let src = "clause: ~a1(X,Y) | ~a2(Y,Z) | ~a3(Z,X) | b(X,Y,b).
            clause: a3(X,f(X)) | ~g3(X).
            clause: a2(f(X),f(X)) | ~g2(X).
            clause: a1(f(X),X) | d(g(X)) | ~g1(X).
            clause: ~b(X,Y,b).
            clause: ~d(X).
            clause: g1(f(a)).
            clause: g3(f(a)).
            clause: g2(a).";
        let a = run(src);
        assert_eq!(a.verdict, Verdict::Yes);
        let mut p = parse_problem(src).unwrap();
        let want: Vec<Clause> = [
            "~a2(X,X) | b(f(X),X,b) | d(g(X)) | ~g1(X) | ~g3(X)",
            "~a2(X,X) | d(g(X)) | ~g1(X) | ~g3(X)",
            "~a2(X,X) | ~g1(X) | ~g3(X)",
            "~g2(a)",
        ]
        .iter()
        .map(|s| parse_clause(&mut p, s).unwrap())
        .collect();
        let s = &a.saturation;
        for w in &want {
            assert!(s.all_clauses().iter().any(|c| is_variant(c, w)), "{w:?}\n{}", s.trace_text());
        }
        assert!(s.steps <= 100);
        assert!(s.audit.violations.is_empty(), "{:?}", s.audit.violations);
    }

    #[test]
    fn pick_alternates_age_and_weight() {
        let mut p = Problem::default();
        let big = parse_clause(&mut p, "~r(X,Y) | s(X) | s(Y) | t(X,Y) | u(Y)").unwrap();
        let small: Vec<Clause> = (0..8).map(|i| parse_clause(&mut p, &format!("q{i}(c)")).unwrap()).collect();
        let mut s = Saturation::new(p.table.clone(), Options::default());
        s.add_input(std::iter::once(big.clone()).chain(small));
        let picks: Vec<ClauseId> = (0..5).map(|_| s.pick().unwrap()).collect();
        assert_eq!(picks[4], 0, "fifth pick is the oldest");
        assert!(!picks[..4].contains(&0));
    }

    #[test]
    fn picks_replay_deterministically() {
        let src = "rule: ! [X] : (a(X) => ? [Y] : r(X,Y)).
                   rule: ! [X,Y] : (r(X,Y) => b(Y)).
                   fact: a(c). fact: a(d).
                   query: ? [X] : b(X).";
        let a = run(src);
        let b = run(src);
        assert_eq!(a.verdict, Verdict::Yes);
        assert_eq!(a.saturation.trace_text(), b.saturation.trace_text());
    }

    #[test]
    fn simplification_removes_tautologies_and_subsumed_clauses() {
        let mut p = Problem::default();
        let t = parse_clause(&mut p, "a(X) | ~a(X)").unwrap();
        let u = parse_clause(&mut p, "b(X)").unwrap();
        let v = parse_clause(&mut p, "b(c) | a(c)").unwrap();
        let w = parse_clause(&mut p, "a(d)").unwrap();
        let mut s = Saturation::new(p.table.clone(), Options::default());
        s.add_input([t, u.clone(), v, w.clone()]);
        let kept: Vec<Clause> = s.usable().into_iter().cloned().collect();
        assert_eq!(kept, vec![u.normalize(), w]);
    }

    #[test]
    fn resumed_saturation_agrees_with_scratch() {
        let rules = "rule: ! [X] : (a(X) => ? [Y] : (r(X,Y) & b(Y))).
                     rule: ! [X,Y] : (r(X,Y) => (b(Y) => c(X))).
                     query: ? [X] : c(X).";
        let p = parse_problem(rules).unwrap();
        let mut base = saturate_without_facts(&p, Options::default()).unwrap();
        assert_eq!(base.verdict, Verdict::No);
        let mut q = p.clone();
        crate::syntax::parse_into(&mut q, "fact: a(k).").unwrap();
        let fact = Clause::new(q.facts.clone());
        // the new constant is interned in the saturation's own table
        let mut pd = Problem {
            table: base.saturation.table.clone(),
            ..Problem::default()
        };
        let fact2 = parse_clause(&mut pd, "a(k)").unwrap();
        base.saturation.table = pd.table;
        base.saturation.add_input([fact2]);
        let resumed = base.saturation.run().unwrap();
        let scratch = answer(&q, Options::default()).unwrap().verdict;
        assert_eq!(resumed, scratch);
        assert_eq!(resumed, Verdict::Yes);
        let _ = fact;
    }

    #[test]
    fn budget_is_reported() {
        let src = "rule: ! [X] : (a(X) => ? [Y] : (r(X,Y) & a(Y))). fact: a(c). query: ? [X] : b(X).";
        let p = parse_problem(src).unwrap();
        let r = answer(&p, Options { max_steps: 0, ..Options::default() });
        assert!(matches!(r, Err(AnswerError::Budget(0))) || r.unwrap().verdict == Verdict::No);
    }

    #[test]
    fn definer_bound_covers_registry() {
        let src = "rule: ! [X1,X2] : (g(X1,X2) => ? [Y] : (p(X2,Y) & h(Y))).
                   fact: g(c,d).
                   query: ? [X1,X2,X3,X4] : (p(X1,X2) & h(X2) & q(X2,X3) & s(X3,X4)).";
        let a = run(src);
        let s = &a.saturation;
        assert!((s.registry.len() as u128) <= s.definer_bound(s.audit.max_width));
    }
}
