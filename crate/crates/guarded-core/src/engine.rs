//! Inference rules: positive factoring, binary resolution on a selected or
//! maximal literal, and top-variable resolution for non-ground flat main
//! premises. Full and partial selection-based resolution are kept as
//! reference rules for tests.

use std::collections::BTreeSet;

use crate::order::{eligible, Eligible, Lpo};
use crate::terms::{is_variant, subsumes, Clause, Literal, Subst, Term, Var};

pub type ClauseId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Input,
    Factor,
    /// Binary resolution on one selected or maximal negative literal.
    TRes2a,
    /// Top-variable resolution against a tuple of side premises.
    TRes2b,
    SRes,
    PRes,
    /// Definer abstraction of a resolvent with an indecomposable query main.
    TTrans,
    SepDeQ,
    SepIndeQ,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Input => "input",
            Rule::Factor => "factor",
            Rule::TRes2a => "tres2a",
            Rule::TRes2b => "tres2b",
            Rule::SRes => "sres",
            Rule::PRes => "pres",
            Rule::TTrans => "ttrans",
            Rule::SepDeQ => "sepdeq",
            Rule::SepIndeQ => "sepindeq",
        }
    }
}

/// How a clause takes part in inferences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Role {
    /// One negative literal resolved by binary resolution.
    BinaryMain(usize),
    /// Non-ground flat clause with all negative literals selected.
    HyperMain(Vec<usize>),
    /// Strictly maximal positive literals; `factor` lists maximal positive
    /// literals that may be factored.
    Side { lits: Vec<usize>, factor: Vec<usize> },
    /// No eligible literal takes part in resolution.
    Passive,
}

/// Record of a top-variable resolution step, kept for audits.
#[derive(Clone, Debug)]
pub struct TopVarResult {
    /// Simultaneous unifier of all selected literals with their sides.
    pub sres_mgu: Subst,
    pub top_vars: BTreeSet<Var>,
    /// Indices (into the main clause) of the top-variable literals.
    pub top_literals: Vec<usize>,
    /// Per selected literal: main literal index, the renamed side clause and
    /// the index of its eligible literal.
    pub side_assignment: Vec<(usize, Clause, usize)>,
}

#[derive(Clone, Debug)]
pub struct Inference {
    pub rule: Rule,
    pub main: Option<ClauseId>,
    pub sides: Vec<ClauseId>,
    pub mgu: Subst,
    pub conclusion: Clause,
    /// Present for top-variable steps.
    pub top: Option<TopVarResult>,
}

/// Renames `c` so that its variables start at `offset`.
fn rename(c: &Clause, offset: Var) -> Clause {
    c.shift(offset)
}

fn next_offset(c: &Clause, offset: Var) -> Var {
    offset + c.max_var().map_or(0, |m| m + 1)
}

fn lits_except<'c>(c: &'c Clause, skip: &'c [usize]) -> impl Iterator<Item = &'c Literal> + 'c {
    c.lits()
        .iter()
        .enumerate()
        .filter(move |(i, _)| !skip.contains(i))
        .map(|(_, l)| l)
}

pub struct Calculus<'a> {
    pub lpo: Lpo<'a>,
}

impl<'a> Calculus<'a> {
    pub fn new(lpo: Lpo<'a>) -> Self {
        Calculus { lpo }
    }

    pub fn role(&self, c: &Clause) -> Role {
        match eligible(&self.lpo, c) {
            Eligible::Selected(i) => Role::BinaryMain(i),
            Eligible::AllNegative(negs) => {
                if negs.is_empty() {
                    Role::Passive
                } else {
                    Role::HyperMain(negs)
                }
            }
            Eligible::Max(max) => {
                let lits = c.lits();
                if c.is_ground() {
                    if let Some(&i) = max.iter().find(|&&i| !lits[i].pos) {
                        return Role::BinaryMain(i);
                    }
                }
                let strict = self.lpo.strictly_maximal(c);
                let side: Vec<usize> = strict.into_iter().filter(|&i| lits[i].pos).collect();
                let factor: Vec<usize> = max.into_iter().filter(|&i| lits[i].pos).collect();
                if side.is_empty() && factor.is_empty() {
                    Role::Passive
                } else {
                    Role::Side { lits: side, factor }
                }
            }
        }
    }

    /// Positive factors of a clause with nothing selected.
    pub fn factor(&self, c: &Clause) -> Vec<Inference> {
        let factor = match self.role(c) {
            Role::Side { factor, .. } => factor,
            _ => return Vec::new(),
        };
        let lits = c.lits();
        let mut out = Vec::new();
        for &i in &factor {
            for (j, l) in lits.iter().enumerate() {
                if j == i || !l.pos || l.pred != lits[i].pred {
                    continue;
                }
                let mut s = Subst::new();
                if s.unify_atoms(&lits[i], l).is_err() {
                    continue;
                }
                let s = s.resolved();
                let conclusion = Clause::new(lits_except(c, &[j]).map(|l| l.apply(&s)).collect());
                out.push(Inference {
                    rule: Rule::Factor,
                    main: None,
                    sides: Vec::new(),
                    mgu: s,
                    conclusion,
                    top: None,
                });
            }
        }
        out
    }

    /// Binary resolution of main literal `mi` against side literal `si`.
    pub fn binary(&self, main: &Clause, mi: usize, side: &Clause, si: usize) -> Option<Inference> {
        let a = &main.lits()[mi];
        let side = rename(side, next_offset(main, 0));
        let b = &side.lits()[si];
        if a.pos || !b.pos || a.pred != b.pred {
            return None;
        }
        let mut s = Subst::new();
        s.unify_atoms(a, b).ok()?;
        let s = s.oriented(&main.vars().into_iter().collect());
        let lits = lits_except(main, &[mi])
            .chain(lits_except(&side, &[si]))
            .map(|l| l.apply(&s))
            .collect();
        Some(Inference {
            rule: Rule::TRes2a,
            main: None,
            sides: Vec::new(),
            mgu: s,
            conclusion: Clause::new(lits),
            top: None,
        })
    }

    /// Unifies every selected literal with its side; returns the renamed
    /// sides and the simultaneous unifier.
    fn simultaneous(
        &self,
        main: &Clause,
        selected: &[usize],
        sides: &[(&Clause, usize)],
    ) -> Option<(Vec<Clause>, Subst)> {
        if selected.len() != sides.len() {
            return None;
        }
        let mut off = next_offset(main, 0);
        let mut renamed = Vec::with_capacity(sides.len());
        let mut s = Subst::new();
        for (&mi, &(side, si)) in selected.iter().zip(sides) {
            let r = rename(side, off);
            off = next_offset(side, off);
            let (a, b) = (&main.lits()[mi], &r.lits()[si]);
            if a.pos || !b.pos || a.pred != b.pred {
                return None;
            }
            s.unify_atoms(a, b).ok()?;
            renamed.push(r);
        }
        Some((renamed, s))
    }

    /// Top variables and top-variable literals of `main` with respect to
    /// the selection-based inference with `sides` (one per selected
    /// literal, in order).
    pub fn com_t(&self, main: &Clause, selected: &[usize], sides: &[(&Clause, usize)]) -> Option<TopVarResult> {
        let (renamed, s) = self.simultaneous(main, selected, sides)?;
        let s = s.resolved();
        let lits = main.lits();
        let mut vars: Vec<Var> = Vec::new();
        for &i in selected {
            for v in lits[i].vars() {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
        }
        let depth = |v: Var| s.apply(&Term::Var(v)).depth();
        let max = vars.iter().map(|&v| depth(v)).max().unwrap_or(0);
        let top_vars: BTreeSet<Var> = vars.iter().copied().filter(|&v| depth(v) == max).collect();
        // Without a compound image no depth can grow, and every selected
        // literal is resolved; ground ones would otherwise survive and can
        // merge with a resolved instance, leaving a conclusion subsumed by
        // its own main premise.
        let top_literals = selected
            .iter()
            .copied()
            .filter(|&i| max == 0 || lits[i].vars().iter().any(|v| top_vars.contains(v)))
            .collect();
        let side_assignment = selected
            .iter()
            .zip(renamed)
            .zip(sides)
            .map(|((&mi, r), &(_, si))| (mi, r, si))
            .collect();
        Some(TopVarResult {
            sres_mgu: s,
            top_vars,
            top_literals,
            side_assignment,
        })
    }

    /// Top-variable resolution: resolves only the top-variable literals.
    pub fn t_res(&self, main: &Clause, selected: &[usize], sides: &[(&Clause, usize)]) -> Option<Inference> {
        let tv = self.com_t(main, selected, sides)?;
        let chosen: Vec<usize> = tv.top_literals.clone();
        let (mgu, conclusion) = partial(main, &tv.side_assignment, &chosen)?;
        Some(Inference {
            rule: Rule::TRes2b,
            main: None,
            sides: Vec::new(),
            mgu,
            conclusion,
            top: Some(tv),
        })
    }

    /// Full selection-based resolvent.
    pub fn s_res(&self, main: &Clause, selected: &[usize], sides: &[(&Clause, usize)]) -> Option<Inference> {
        let (renamed, _) = self.simultaneous(main, selected, sides)?;
        let assignment: Vec<(usize, Clause, usize)> = selected
            .iter()
            .zip(renamed)
            .zip(sides)
            .map(|((&mi, r), &(_, si))| (mi, r, si))
            .collect();
        let (mgu, conclusion) = partial(main, &assignment, selected)?;
        Some(Inference {
            rule: Rule::SRes,
            main: None,
            sides: Vec::new(),
            mgu,
            conclusion,
            top: None,
        })
    }

    /// Partial resolvent resolving only the `chosen` selected literals. The
    /// full simultaneous unifier must exist.
    pub fn p_res(
        &self,
        main: &Clause,
        selected: &[usize],
        sides: &[(&Clause, usize)],
        chosen: &[usize],
    ) -> Option<Inference> {
        if chosen.is_empty() || chosen.iter().any(|i| !selected.contains(i)) {
            return None;
        }
        let (renamed, _) = self.simultaneous(main, selected, sides)?;
        let assignment: Vec<(usize, Clause, usize)> = selected
            .iter()
            .zip(renamed)
            .zip(sides)
            .map(|((&mi, r), &(_, si))| (mi, r, si))
            .collect();
        let (mgu, conclusion) = partial(main, &assignment, chosen)?;
        Some(Inference {
            rule: Rule::PRes,
            main: None,
            sides: Vec::new(),
            mgu,
            conclusion,
            top: None,
        })
    }
}

/// A clause offered as a side premise through one eligible literal.
#[derive(Clone, Copy, Debug)]
pub struct SideCand<'c> {
    pub id: ClauseId,
    pub clause: &'c Clause,
    pub lit: usize,
}

/// Every tuple of side candidates (indices into `cands`, one per selected
/// literal) with a simultaneous unifier. With `must`, only tuples that use
/// that clause at least once.
pub fn side_tuples(main: &Clause, selected: &[usize], cands: &[SideCand<'_>], must: Option<ClauseId>) -> Vec<Vec<usize>> {
    let lits = main.lits();
    let per_pos: Vec<Vec<usize>> = selected
        .iter()
        .map(|&mi| {
            let a = &lits[mi];
            (0..cands.len())
                .filter(|&k| {
                    let b = &cands[k].clause.lits()[cands[k].lit];
                    b.pos && b.pred == a.pred && b.args.len() == a.args.len()
                })
                .collect()
        })
        .collect();
    if per_pos.iter().any(|p| p.is_empty()) {
        return Vec::new();
    }
    // must_later[j]: `must` is a candidate at some position >= j
    let mut must_later = vec![must.is_none(); selected.len() + 1];
    if let Some(m) = must {
        for j in (0..selected.len()).rev() {
            must_later[j] = must_later[j + 1] || per_pos[j].iter().any(|&k| cands[k].id == m);
        }
    }
    let width = main.max_var().map_or(0, |m| m + 1);
    let stride = cands
        .iter()
        .map(|c| c.clause.max_var().map_or(0, |m| m + 1))
        .max()
        .unwrap_or(0);
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(selected.len());
    let ctx = TupleSearch {
        main,
        selected,
        cands,
        per_pos: &per_pos,
        must,
        must_later: &must_later,
        width,
        stride,
    };
    ctx.search(0, &Subst::new(), must.is_none(), &mut cur, &mut out);
    out
}

struct TupleSearch<'s, 'c> {
    main: &'s Clause,
    selected: &'s [usize],
    cands: &'s [SideCand<'c>],
    per_pos: &'s [Vec<usize>],
    must: Option<ClauseId>,
    must_later: &'s [bool],
    width: Var,
    stride: Var,
}

impl TupleSearch<'_, '_> {
    fn search(&self, j: usize, s: &Subst, used: bool, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if j == self.selected.len() {
            if used {
                out.push(cur.clone());
            }
            return;
        }
        if !used && !self.must_later[j] {
            return;
        }
        let a = &self.main.lits()[self.selected[j]];
        let off = self.width + j as Var * self.stride;
        for &k in &self.per_pos[j] {
            let c = &self.cands[k];
            let b = c.clause.lits()[c.lit].map_vars(&mut |v| Term::Var(v + off));
            let mut s2 = s.clone();
            if s2.unify_atoms(a, &b).is_err() {
                continue;
            }
            cur.push(k);
            self.search(j + 1, &s2, used || Some(c.id) == self.must, cur, out);
            cur.pop();
        }
    }
}

/// Resolves the `chosen` main literals against their assigned (already
/// renamed) sides; other literals of the main premise are kept.
fn partial(main: &Clause, assignment: &[(usize, Clause, usize)], chosen: &[usize]) -> Option<(Subst, Clause)> {
    let mut s = Subst::new();
    for (mi, side, si) in assignment {
        if chosen.contains(mi) {
            s.unify_atoms(&main.lits()[*mi], &side.lits()[*si]).ok()?;
        }
    }
    let s = s.oriented(&main.vars().into_iter().collect());
    let mut lits: Vec<Literal> = lits_except(main, chosen).map(|l| l.apply(&s)).collect();
    for (mi, side, si) in assignment {
        if chosen.contains(mi) {
            lits.extend(lits_except(side, &[*si]).map(|l| l.apply(&s)));
        }
    }
    Some((s, Clause::new(lits)))
}

/// Tautology, or a variant or a condensed subsumer exists in `n`.
pub fn is_redundant<'c>(c: &Clause, n: impl IntoIterator<Item = &'c Clause>) -> bool {
    if c.is_tautology() {
        return true;
    }
    n.into_iter().any(|d| is_variant(d, c) || subsumes(d, c))
}

/// Pairing audit for a recorded top-variable step: top variables meet
/// constants or compound terms and other variables meet constants or
/// variables.
pub fn pairing_holds(main: &Clause, tv: &TopVarResult) -> bool {
    tv.side_assignment
        .iter()
        .filter(|(mi, _, _)| tv.top_literals.contains(mi))
        .all(|(mi, side, si)| {
            let a = &main.lits()[*mi];
            let b = &side.lits()[*si];
            a.args.iter().zip(&b.args).all(|(x, t)| match x {
                Term::Var(v) if tv.top_vars.contains(v) => !t.is_var(),
                Term::Var(_) => !t.is_compound(),
                _ => true,
            })
        })
}

/// Whenever a top variable meets a constant, the unifier of the top
/// literals grounds every variable of those literals.
pub fn ground_collapse_holds(main: &Clause, tv: &TopVarResult, sigma: &Subst) -> bool {
    let meets_constant = tv.side_assignment.iter().any(|(mi, side, si)| {
        tv.top_literals.contains(mi)
            && main.lits()[*mi]
                .args
                .iter()
                .zip(&side.lits()[*si].args)
                .any(|(x, t)| matches!(x, Term::Var(v) if tv.top_vars.contains(v)) && matches!(t, Term::Const(_)))
    });
    if !meets_constant {
        return true;
    }
    tv.top_literals
        .iter()
        .all(|&i| main.lits()[i].apply(sigma).is_ground())
}
