//! Resolution with indecomposable chained-only query clauses: closed
//! top-variable blocks, the definer abstraction of the resolvent and the
//! combined pipeline that turns the resolvent back into guarded and query
//! clauses.

use crate::engine::{side_tuples, Calculus, Role, SideCand, TopVarResult};
use crate::order::{Lpo, Precedence};
use crate::qsep::{q_sep, DefKind, DefinerRegistry, SepStep};
use crate::terms::{Clause, Literal, Subst, SymbolTable, Term, Var};

/// A closed block: top-variable literals (main indices) connected through
/// shared top variables, with the disjunction of their sides' remainders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub top_literals: Vec<usize>,
    /// Remainder of the block's side premises under the unifier.
    pub remainder: Clause,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedPartition {
    pub blocks: Vec<Block>,
}

/// Partitions the top-variable literals into connected components over
/// shared top variables.
pub fn closed_partition(main: &Clause, tv: &TopVarResult, sigma: &Subst) -> ClosedPartition {
    let lits = main.lits();
    let top = &tv.top_literals;
    let mut comp: Vec<usize> = (0..top.len()).collect();
    fn find(comp: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while comp[r] != r {
            r = comp[r];
        }
        comp[i] = r;
        r
    }
    for a in 0..top.len() {
        for b in a + 1..top.len() {
            let shared = lits[top[a]]
                .vars()
                .into_iter()
                .any(|v| tv.top_vars.contains(&v) && lits[top[b]].has_var(v));
            if shared {
                let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
                comp[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut blocks: Vec<(usize, Block)> = Vec::new();
    for (k, &mi) in top.iter().enumerate() {
        let root = find(&mut comp, k);
        let (_, side, si) = tv
            .side_assignment
            .iter()
            .find(|(m, _, _)| *m == mi)
            .expect("every top literal has a side");
        let rem: Vec<Literal> = side
            .lits()
            .iter()
            .enumerate()
            .filter(|(i, _)| i != si)
            .map(|(_, l)| l.apply(sigma))
            .collect();
        match blocks.iter_mut().find(|(r, _)| *r == root) {
            Some((_, b)) => {
                b.top_literals.push(mi);
                let mut all = b.remainder.lits().to_vec();
                all.extend(rem);
                b.remainder = Clause::new(all);
            }
            None => blocks.push((
                root,
                Block {
                    top_literals: vec![mi],
                    remainder: Clause::new(rem),
                },
            )),
        }
    }
    ClosedPartition {
        blocks: blocks.into_iter().map(|(_, b)| b).collect(),
    }
}

/// Result of abstracting a resolvent.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TTransOutput {
    /// Each block remainder with its definer literal.
    pub lg: Vec<Clause>,
    /// The non-top literals with the negated definer literals.
    pub query: Option<Clause>,
}

fn first_occurrence_vars(c: &Clause) -> Vec<Var> {
    c.vars()
}

/// Replaces every block remainder of the resolvent by a fresh (or reused)
/// definer. A ground resolvent is returned unchanged as a single clause.
pub fn t_trans(
    table: &mut SymbolTable,
    reg: &mut DefinerRegistry,
    main: &Clause,
    tv: &TopVarResult,
    sigma: &Subst,
) -> TTransOutput {
    let part = closed_partition(main, tv, sigma);
    let residue: Vec<Literal> = main
        .lits()
        .iter()
        .enumerate()
        .filter(|(i, _)| !tv.top_literals.contains(i))
        .map(|(_, l)| l.apply(sigma))
        .collect();
    let resolvent = {
        let mut all = residue.clone();
        for b in &part.blocks {
            all.extend(b.remainder.lits().iter().cloned());
        }
        Clause::new(all)
    };
    if resolvent.is_ground() {
        return TTransOutput {
            lg: vec![resolvent],
            query: None,
        };
    }
    let mut lg = Vec::new();
    let mut query = residue;
    for b in &part.blocks {
        if b.remainder.is_empty() {
            continue;
        }
        let args = first_occurrence_vars(&b.remainder);
        let (p, _) = reg.definer(table, DefKind::Trans, &b.remainder, &args);
        let atom = |pos| Literal::new(pos, p, args.iter().map(|v| Term::Var(*v)).collect());
        let mut lits = b.remainder.lits().to_vec();
        lits.push(atom(true));
        lg.push(Clause::new(lits));
        query.push(atom(false));
    }
    TTransOutput {
        lg,
        query: Some(Clause::new(query)),
    }
}

/// One top-variable inference with an indecomposable query main premise
/// and the clauses that replace its resolvent.
#[derive(Clone, Debug)]
pub struct QicStep {
    pub sides: Vec<usize>,
    pub resolvent: Clause,
    pub top: TopVarResult,
    pub ttrans: TTransOutput,
    pub sep: Vec<SepStep>,
    pub conclusions: Vec<Clause>,
}

/// Top-variable inferences of `icq` against side premises drawn from `n`,
/// their abstraction and the separation of the residual query clause.
/// With `must`, only side tuples using clause `n[must]`.
pub fn q_ic(
    table: &mut SymbolTable,
    prec: &Precedence,
    reg: &mut DefinerRegistry,
    icq: &Clause,
    n: &[Clause],
    must: Option<usize>,
) -> Vec<QicStep> {
    let selected: Vec<usize> = (0..icq.len()).filter(|&i| !icq.lits()[i].pos).collect();
    let raw: Vec<(Vec<usize>, TopVarResult, Subst, Clause)> = {
        let calc = Calculus::new(Lpo::new(table, prec));
        let mut cands = Vec::new();
        for (id, c) in n.iter().enumerate() {
            if let Role::Side { lits, .. } = calc.role(c) {
                for l in lits {
                    cands.push(SideCand { id, clause: c, lit: l });
                }
            }
        }
        side_tuples(icq, &selected, &cands, must)
            .into_iter()
            .filter_map(|t| {
                let sides: Vec<(&Clause, usize)> = t.iter().map(|&k| (cands[k].clause, cands[k].lit)).collect();
                let inf = calc.t_res(icq, &selected, &sides)?;
                let ids = t.iter().map(|&k| cands[k].id).collect();
                Some((ids, inf.top?, inf.mgu, inf.conclusion))
            })
            .collect()
    };
    raw.into_iter()
        .map(|(sides, top, sigma, resolvent)| {
            let ttrans = t_trans(table, reg, icq, &top, &sigma);
            let mut conclusions = ttrans.lg.clone();
            let mut sep = Vec::new();
            if let Some(q) = &ttrans.query {
                let (out, steps) = q_sep(q, table, reg);
                conclusions.extend(out);
                sep = steps;
            }
            QicStep {
                sides,
                resolvent,
                top,
                ttrans,
                sep,
                conclusions,
            }
        })
        .collect()
}
