//! Query clause analysis (surface literals, chained and isolated
//! variables) and the separation rules that split a query clause into
//! Horn guarded clauses and narrower query clauses.

use std::collections::{BTreeSet, HashMap};

use crate::classes::membership;
use crate::terms::{is_variant, Clause, Literal, ShapeTok, Sym, SymbolTable, Term, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryAnalysis {
    /// Indices of surface literals.
    pub surface: Vec<usize>,
    pub chained: BTreeSet<Var>,
    pub isolated: BTreeSet<Var>,
    pub decomposable: bool,
    pub acyclic: bool,
}

fn var_set(l: &Literal) -> BTreeSet<Var> {
    l.vars().into_iter().collect()
}

pub fn analyse(q: &Clause) -> QueryAnalysis {
    let lits = q.lits();
    let sets: Vec<BTreeSet<Var>> = lits.iter().map(var_set).collect();
    let surface: Vec<usize> = (0..lits.len())
        .filter(|&i| {
            !(0..lits.len()).any(|j| j != i && sets[i].is_subset(&sets[j]) && sets[i] != sets[j])
        })
        .collect();
    let mut chained = BTreeSet::new();
    for (a, &i) in surface.iter().enumerate() {
        for &j in &surface[a + 1..] {
            if sets[i] != sets[j] {
                chained.extend(sets[i].intersection(&sets[j]).copied());
            }
        }
    }
    let isolated = q
        .vars()
        .into_iter()
        .filter(|v| !chained.contains(v))
        .collect();
    QueryAnalysis {
        surface,
        chained,
        isolated,
        decomposable: q.is_decomposable(),
        acyclic: is_acyclic(q),
    }
}

/// GYO reduction on the hypergraph of literal variable sets.
pub fn is_acyclic(q: &Clause) -> bool {
    let mut edges: Vec<BTreeSet<Var>> = q.lits().iter().map(var_set).filter(|s| !s.is_empty()).collect();
    loop {
        let mut changed = false;
        // Remove variables that occur in a single edge.
        let mut count: HashMap<Var, usize> = HashMap::new();
        for e in &edges {
            for v in e {
                *count.entry(*v).or_insert(0) += 1;
            }
        }
        for e in edges.iter_mut() {
            let before = e.len();
            e.retain(|v| count[v] > 1);
            changed |= e.len() != before;
        }
        // Remove empty edges and edges contained in another edge.
        let mut i = 0;
        while i < edges.len() {
            let contained = edges[i].is_empty()
                || (0..edges.len()).any(|j| j != i && edges[i].is_subset(&edges[j]) && (edges[i] != edges[j] || j < i));
            if contained {
                edges.remove(i);
                changed = true;
            } else {
                i += 1;
            }
        }
        if edges.len() <= 1 {
            return true;
        }
        if !changed {
            return false;
        }
    }
}

/// Indecomposable query clause without a surface literal that mixes
/// chained and isolated variables, and that is not loosely guarded.
pub fn is_icq(q: &Clause) -> bool {
    let m = membership(q);
    if !m.query || m.lg || q.is_ground() || q.is_decomposable() {
        return false;
    }
    pick_indeq_literal(q, &analyse(q)).is_none()
}

// ---------------------------------------------------------------------------
// Definer registry

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DefKind {
    DeqLeft,
    DeqRight,
    Indeq,
    Trans,
}

/// Reuses a definer whenever the defined clause and its argument tuple are
/// variants of an earlier definition.
#[derive(Clone, Debug, Default)]
pub struct DefinerRegistry {
    entries: HashMap<(DefKind, Vec<(bool, Sym, Vec<ShapeTok>)>), Vec<(Clause, Sym)>>,
    count: usize,
}

const ARGS_PRED: Sym = Sym(u32::MAX);

impl DefinerRegistry {
    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn definers(&self) -> impl Iterator<Item = Sym> + '_ {
        self.entries.values().flat_map(|v| v.iter().map(|(_, s)| *s))
    }

    /// Returns the definer for `defined` over `args`, and whether it is new.
    pub fn definer(
        &mut self,
        table: &mut SymbolTable,
        kind: DefKind,
        defined: &Clause,
        args: &[Var],
    ) -> (Sym, bool) {
        let mut lits = defined.lits().to_vec();
        lits.push(Literal::new(true, ARGS_PRED, args.iter().map(|v| Term::Var(*v)).collect()));
        let key_clause = Clause::new(lits);
        let key = (kind, key_clause.shape_key());
        let bucket = self.entries.entry(key).or_default();
        if let Some((_, s)) = bucket.iter().find(|(c, _)| is_variant(c, &key_clause)) {
            return (*s, false);
        }
        let s = table.fresh_definer(args.len());
        bucket.push((key_clause, s));
        self.count += 1;
        (s, true)
    }
}

// ---------------------------------------------------------------------------
// Separation

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SepRule {
    DeQ,
    IndeQ,
}

/// One separation step: the premise and its conclusions.
#[derive(Clone, Debug)]
pub struct SepStep {
    pub rule: SepRule,
    pub premise: Clause,
    pub conclusions: Vec<Clause>,
}

fn pick_indeq_literal(q: &Clause, a: &QueryAnalysis) -> Option<usize> {
    let lits = q.lits();
    a.surface
        .iter()
        .copied()
        .filter(|&i| {
            let vs = var_set(&lits[i]);
            vs.iter().any(|v| a.isolated.contains(v)) && vs.iter().any(|v| a.chained.contains(v))
        })
        .max_by(|&i, &j| {
            let iso = |k: usize| var_set(&lits[k]).iter().filter(|v| a.isolated.contains(v)).count();
            iso(i).cmp(&iso(j)).then_with(|| lits[j].cmp(&lits[i]))
        })
}

fn atom(p: Sym, args: &[Var], pos: bool) -> Literal {
    Literal::new(pos, p, args.iter().map(|v| Term::Var(*v)).collect())
}

/// Applies one separation step, if any applies.
pub fn sep_step(q: &Clause, table: &mut SymbolTable, reg: &mut DefinerRegistry) -> Option<SepStep> {
    let m = membership(q);
    if !m.query || m.lg || q.is_ground() || q.len() < 2 {
        return None;
    }
    let lits = q.lits();
    if q.is_decomposable() {
        // ground literals stay with the first component that has variables
        let (open, ground): (Vec<Vec<usize>>, Vec<Vec<usize>>) = q
            .components()
            .into_iter()
            .partition(|g| g.iter().any(|&i| !lits[i].is_ground()));
        let c = Clause::new(
            open[0]
                .iter()
                .chain(ground.iter().flatten())
                .map(|&i| lits[i].clone())
                .collect(),
        );
        let d = Clause::new(open[1..].iter().flatten().map(|&i| lits[i].clone()).collect());
        let (p1, _) = reg.definer(table, DefKind::DeqLeft, &c, &[]);
        let (p2, _) = reg.definer(table, DefKind::DeqRight, &d, &[]);
        let mut left = c.into_lits();
        left.push(atom(p1, &[], false));
        let mut right = d.into_lits();
        right.push(atom(p2, &[], false));
        let link = Clause::new(vec![atom(p1, &[], true), atom(p2, &[], true)]);
        return Some(SepStep {
            rule: SepRule::DeQ,
            premise: q.clone(),
            conclusions: vec![Clause::new(left), Clause::new(right), link],
        });
    }
    let a = analyse(q);
    let i = pick_indeq_literal(q, &a)?;
    let guard = &lits[i];
    let gvars = var_set(guard);
    let xs: Vec<Var> = guard.vars().into_iter().filter(|v| a.chained.contains(v)).collect();
    let (mut c, mut d) = (vec![guard.clone()], Vec::new());
    for (j, l) in lits.iter().enumerate() {
        if j == i {
            continue;
        }
        if var_set(l).is_subset(&gvars) {
            c.push(l.clone());
        } else {
            d.push(l.clone());
        }
    }
    let dvars: BTreeSet<Var> = d.iter().flat_map(|l| l.vars()).collect();
    debug_assert!(xs.iter().all(|x| dvars.contains(x)));
    let c = Clause::new(c);
    let (p, _) = reg.definer(table, DefKind::Indeq, &c, &xs);
    let mut horn = c.into_lits();
    horn.push(atom(p, &xs, true));
    d.push(atom(p, &xs, false));
    Some(SepStep {
        rule: SepRule::IndeQ,
        premise: q.clone(),
        conclusions: vec![Clause::new(horn), Clause::new(d)],
    })
}

/// Separates a query clause until every piece is Horn guarded, loosely
/// guarded, ground, or an indecomposable chained-only query clause.
/// Returns the final clauses and the steps taken.
pub fn q_sep(q: &Clause, table: &mut SymbolTable, reg: &mut DefinerRegistry) -> (Vec<Clause>, Vec<SepStep>) {
    let mut work = vec![q.clone()];
    let mut out = Vec::new();
    let mut steps = Vec::new();
    while let Some(c) = work.pop() {
        match sep_step(&c, table, reg) {
            Some(step) => {
                for (k, concl) in step.conclusions.iter().enumerate() {
                    // Query-shaped conclusions are separated further.
                    let again = match step.rule {
                        SepRule::DeQ => k < 2,
                        SepRule::IndeQ => k == 1,
                    };
                    if again {
                        work.push(concl.clone());
                    } else {
                        out.push(concl.clone());
                    }
                }
                steps.push(step);
            }
            None => out.push(c),
        }
    }
    (out, steps)
}
