//! Shared helpers for the integration and acceptance tests: fixture
//! loading, random clause generators and matching modulo definer names.

#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

use guarded_core::classes::{is_lgq, membership};
use guarded_core::order::Lpo;
use guarded_core::syntax::{parse_problem, Problem};
use guarded_core::terms::{is_variant, Clause, Literal, Origin, Sym, SymKind, SymbolTable, Term};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture_text(name: &str) -> String {
    let p = fixture_dir().join(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

pub fn fixture(name: &str) -> Problem {
    parse_problem(&fixture_text(name)).unwrap()
}

/// Names of the rewriting fixtures `rw01` .. `rw10`.
pub fn rewrite_fixtures() -> Vec<String> {
    (1..=10).map(|i| format!("rw{i:02}")).collect()
}

/// Whether `actual` equals `expected` up to variable renaming, literal
/// order and a consistent renaming of the predicates named in `placeholders`
/// (in `expected`) to definers (in `actual`). Extends `map` on success.
fn clause_matches(
    table: &SymbolTable,
    expected: &Clause,
    actual: &Clause,
    placeholders: &[Sym],
    map: &mut HashMap<Sym, Sym>,
) -> bool {
    let open: Vec<Sym> = {
        let mut v: Vec<Sym> = expected
            .lits()
            .iter()
            .map(|l| l.pred)
            .filter(|p| placeholders.contains(p) && !map.contains_key(p))
            .collect();
        v.sort();
        v.dedup();
        v
    };
    let definers: Vec<Sym> = {
        let mut v: Vec<Sym> = actual
            .lits()
            .iter()
            .map(|l| l.pred)
            .filter(|p| table.origin(*p) == Origin::Definer)
            .collect();
        v.sort();
        v.dedup();
        v
    };
    fn assign(
        table: &SymbolTable,
        expected: &Clause,
        actual: &Clause,
        open: &[Sym],
        definers: &[Sym],
        map: &mut HashMap<Sym, Sym>,
    ) -> bool {
        let Some((&p, rest)) = open.split_first() else {
            let renamed = Clause::new(
                expected
                    .lits()
                    .iter()
                    .map(|l| Literal {
                        pred: *map.get(&l.pred).unwrap_or(&l.pred),
                        ..l.clone()
                    })
                    .collect(),
            );
            return is_variant(&renamed.normalize(), &actual.normalize());
        };
        for &d in definers {
            if map.values().any(|&v| v == d) || table.arity(d) != table.arity(p) {
                continue;
            }
            map.insert(p, d);
            if assign(table, expected, actual, rest, definers, map) {
                return true;
            }
            map.remove(&p);
        }
        false
    }
    assign(table, expected, actual, &open, &definers, map)
}

/// Matches every expected clause to a distinct actual clause under one
/// consistent placeholder-to-definer renaming, and requires the same count.
pub fn set_matches(table: &SymbolTable, expected: &[Clause], actual: &[Clause], placeholders: &[Sym]) -> bool {
    fn go(
        table: &SymbolTable,
        expected: &[Clause],
        actual: &[Clause],
        used: &mut Vec<bool>,
        placeholders: &[Sym],
        map: &mut HashMap<Sym, Sym>,
    ) -> bool {
        let Some((e, rest)) = expected.split_first() else {
            return true;
        };
        for i in 0..actual.len() {
            if used[i] {
                continue;
            }
            let saved = map.clone();
            if clause_matches(table, e, &actual[i], placeholders, map) {
                used[i] = true;
                if go(table, rest, actual, used, placeholders, map) {
                    return true;
                }
                used[i] = false;
            }
            *map = saved;
        }
        false
    }
    expected.len() == actual.len()
        && go(
            table,
            expected,
            actual,
            &mut vec![false; actual.len()],
            placeholders,
            &mut HashMap::new(),
        )
}

/// A random signature: predicates `pN` of arity 1..=3, constants `cN`
/// and one function symbol per arity.
pub struct Signature {
    pub preds: Vec<Sym>,
    pub consts: Vec<Sym>,
    /// Function symbols indexed by arity minus one.
    pub funs: Vec<Vec<Sym>>,
}

impl Signature {
    pub fn random(table: &mut SymbolTable, rng: &mut impl Rng, preds: usize, consts: usize, funs: bool) -> Self {
        let preds = (0..preds)
            .map(|i| {
                let ar = rng.gen_range(1..=3);
                table.intern(&format!("p{i}"), SymKind::Predicate, ar).unwrap()
            })
            .collect();
        let consts = (0..consts)
            .map(|i| table.intern(&format!("c{i}"), SymKind::Constant, 0).unwrap())
            .collect();
        let funs = if funs {
            (1..=3)
                .map(|ar| {
                    (0..2)
                        .map(|k| {
                            table
                                .intern(&format!("f{ar}{}", ["a", "b"][k]), SymKind::Function, ar)
                                .unwrap()
                        })
                        .collect()
                })
                .collect()
        } else {
            Vec::new()
        };
        Signature { preds, consts, funs }
    }

    fn flat_arg(&self, rng: &mut impl Rng, vars: &[u32]) -> Term {
        if !self.consts.is_empty() && (vars.is_empty() || rng.gen_bool(0.2)) {
            Term::Const(*self.consts.choose(rng).unwrap())
        } else {
            Term::Var(*vars.choose(rng).unwrap())
        }
    }

    fn flat_literal(&self, table: &SymbolTable, rng: &mut impl Rng, vars: &[u32], pos: bool) -> Literal {
        let p = *self.preds.choose(rng).unwrap();
        let args = (0..table.arity(p)).map(|_| self.flat_arg(rng, vars)).collect();
        Literal::new(pos, p, args)
    }

    /// A negative literal over a predicate of arity at least `vars.len()`
    /// mentioning every variable, if the signature has one.
    fn guard(&self, table: &SymbolTable, rng: &mut impl Rng, vars: &[u32]) -> Option<Literal> {
        let cands: Vec<Sym> = self
            .preds
            .iter()
            .copied()
            .filter(|&p| table.arity(p) >= vars.len())
            .collect();
        let p = *cands.choose(rng)?;
        let mut args: Vec<Term> = vars.iter().map(|&v| Term::Var(v)).collect();
        while args.len() < table.arity(p) {
            args.push(self.flat_arg(rng, vars));
        }
        args.shuffle(rng);
        Some(Literal::new(false, p, args))
    }

    /// A random loosely guarded clause. With function symbols, compound
    /// terms share one argument list containing every variable.
    pub fn lg_clause(&self, table: &SymbolTable, rng: &mut impl Rng) -> Clause {
        loop {
            let n = rng.gen_range(if self.consts.is_empty() { 1 } else { 0 }..=3usize);
            let vars: Vec<u32> = (0..n as u32).collect();
            let mut lits = Vec::new();
            if n > 0 {
                match self.guard(table, rng, &vars) {
                    Some(g) => lits.push(g),
                    None => continue,
                }
            }
            let extra = rng.gen_range(if n == 0 { 1 } else { 0 }..=3);
            let mut arglist: Vec<Term> = vars.iter().map(|&v| Term::Var(v)).collect();
            arglist.shuffle(rng);
            for _ in 0..extra {
                let pos = rng.gen_bool(0.6);
                let compound = !self.funs.is_empty() && n > 0 && rng.gen_bool(0.5);
                let l = if compound {
                    let f = *self.funs[n - 1].choose(rng).unwrap();
                    let t = Term::App(f, arglist.clone());
                    let p = *self.preds.choose(rng).unwrap();
                    let args = (0..table.arity(p))
                        .map(|_| if rng.gen_bool(0.5) { t.clone() } else { self.flat_arg(rng, &vars) })
                        .collect();
                    Literal::new(pos, p, args)
                } else if n == 0 {
                    let mut l = self.flat_literal(table, rng, &[], pos);
                    if !self.funs.is_empty() && rng.gen_bool(0.3) {
                        let f = self.funs[0][0];
                        l.args[0] = Term::App(f, vec![Term::Const(self.consts[0])]);
                    }
                    l
                } else {
                    self.flat_literal(table, rng, &vars, pos)
                };
                lits.push(l);
            }
            let c = Clause::new(lits);
            if !c.is_empty() && membership(&c).lg && !c.is_tautology() {
                return c;
            }
        }
    }

    /// A random function-free loosely guarded, ground or query clause.
    pub fn lgq_clause(&self, table: &SymbolTable, rng: &mut impl Rng) -> Clause {
        loop {
            let c = match rng.gen_range(if self.consts.is_empty() { 1 } else { 0 }..4) {
                0 => Clause::new(vec![self.flat_literal(table, rng, &[], true)]),
                1 => {
                    let n = rng.gen_range(1..=4u32);
                    let vars: Vec<u32> = (0..n).collect();
                    let k = rng.gen_range(1..=4);
                    Clause::new((0..k).map(|_| self.flat_literal(table, rng, &vars, false)).collect())
                }
                _ => self.lg_clause(table, rng),
            };
            if !c.is_empty() && is_lgq(&c) && !c.is_tautology() {
                return c;
            }
        }
    }

    fn ground_term(&self, rng: &mut impl Rng) -> Term {
        let c = |rng: &mut _| Term::Const(*self.consts.choose(rng).unwrap());
        if self.funs.is_empty() || rng.gen_bool(0.5) {
            return c(rng);
        }
        let ar = rng.gen_range(1..=2);
        let f = *self.funs[ar - 1].choose(rng).unwrap();
        Term::App(f, (0..ar).map(|_| c(rng)).collect())
    }

    pub fn ground_atom(&self, table: &SymbolTable, rng: &mut impl Rng) -> Literal {
        let p = *self.preds.choose(rng).unwrap();
        Literal::new(true, p, (0..table.arity(p)).map(|_| self.ground_term(rng)).collect())
    }
}

/// A ground selection-resolution instance: a main clause, the indices of
/// its negative literals, and one side clause per negative literal whose
/// strictly maximal literal is the complementary positive atom.
pub struct GroundInstance {
    pub main: Clause,
    pub selected: Vec<usize>,
    pub sides: Vec<Clause>,
}

pub fn ground_instance(sig: &Signature, lpo: &Lpo<'_>, table: &SymbolTable, rng: &mut impl Rng) -> GroundInstance {
    loop {
        let k = rng.gen_range(2..=4);
        let lits: Vec<Literal> = (0..k)
            .map(|_| {
                let a = sig.ground_atom(table, rng);
                if rng.gen_bool(0.7) {
                    a.negate()
                } else {
                    a
                }
            })
            .collect();
        let main = Clause::new(lits);
        if main.is_tautology() {
            continue;
        }
        let selected: Vec<usize> = (0..main.len()).filter(|&i| !main.lits()[i].pos).collect();
        if selected.len() < 2 {
            continue;
        }
        let mut sides = Vec::new();
        for &i in &selected {
            let a = main.lits()[i].negate();
            let extra: Vec<Literal> = (0..rng.gen_range(0..=3))
                .map(|_| {
                    let b = sig.ground_atom(table, rng);
                    if rng.gen_bool(0.5) {
                        b.negate()
                    } else {
                        b
                    }
                })
                .filter(|b| lpo.compare_literals(&a, b) == guarded_core::order::Cmp::Greater)
                .collect();
            sides.push(Clause::new(std::iter::once(a).chain(extra).collect()));
        }
        return GroundInstance { main, selected, sides };
    }
}
