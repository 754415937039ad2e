//! Clause classes: query clauses, loosely guarded, guarded and Horn
//! guarded clauses.

use std::collections::BTreeSet;

use crate::terms::{Clause, Var};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Membership {
    /// Negative and flat.
    pub query: bool,
    /// Loosely guarded.
    pub lg: bool,
    /// Loosely guarded with a one-literal guard (ground clauses count).
    pub guarded: bool,
    /// Guarded with at most one positive literal.
    pub horn_guarded: bool,
}

fn is_loose_guard(c: &Clause, idx: &[usize], all: &BTreeSet<Var>) -> bool {
    let lits = c.lits();
    let vars: BTreeSet<Var> = idx.iter().flat_map(|&i| lits[i].vars()).collect();
    if vars != *all {
        return false;
    }
    let all: Vec<Var> = all.iter().copied().collect();
    all.iter().enumerate().all(|(i, &x)| {
        all[i + 1..]
            .iter()
            .all(|&y| idx.iter().any(|&k| lits[k].has_var(x) && lits[k].has_var(y)))
    })
}

fn guard_candidates(c: &Clause) -> Vec<usize> {
    c.lits()
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.pos && l.is_flat())
        .map(|(i, _)| i)
        .collect()
}

/// Minimal loose guards, as literal indices. Empty for ground clauses.
pub fn loose_guards(c: &Clause) -> Vec<Vec<usize>> {
    let all: BTreeSet<Var> = c.vars().into_iter().collect();
    if all.is_empty() {
        return Vec::new();
    }
    let cand = guard_candidates(c);
    if cand.len() > 16 || !is_loose_guard(c, &cand, &all) {
        return if cand.len() > 16 && is_loose_guard(c, &cand, &all) {
            vec![cand]
        } else {
            Vec::new()
        };
    }
    let mut found: Vec<Vec<usize>> = Vec::new();
    let n = cand.len();
    let mut masks: Vec<u32> = (1u32..(1 << n)).collect();
    masks.sort_by_key(|m| m.count_ones());
    for m in masks {
        if found.iter().any(|f| {
            let fm: u32 = f
                .iter()
                .map(|i| 1u32 << cand.iter().position(|c| c == i).unwrap())
                .sum();
            fm & m == fm
        }) {
            continue;
        }
        let idx: Vec<usize> = (0..n).filter(|i| m & (1 << i) != 0).map(|i| cand[i]).collect();
        if is_loose_guard(c, &idx, &all) {
            found.push(idx);
        }
    }
    found
}

pub fn membership(c: &Clause) -> Membership {
    let query = c.lits().iter().all(|l| !l.pos && l.is_flat());
    let shape = c.is_simple() && c.is_covering() && c.is_strongly_compatible();
    let all: BTreeSet<Var> = c.vars().into_iter().collect();
    let cand = guard_candidates(c);
    let lg = shape && (all.is_empty() || is_loose_guard(c, &cand, &all));
    let guarded = lg
        && (all.is_empty()
            || cand
                .iter()
                .any(|&i| c.lits()[i].vars().into_iter().collect::<BTreeSet<_>>() == all));
    Membership {
        query,
        lg,
        guarded,
        horn_guarded: guarded && c.positive_count() <= 1,
    }
}

/// Loosely guarded or query clause.
pub fn is_lgq(c: &Clause) -> bool {
    let m = membership(c);
    m.lg || m.query
}
