//! Lexicographic path order over terms and atoms, its extension to
//! literals and clauses, a-priori maximality and the selection function.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::terms::{Clause, Literal, Origin, Sym, SymKind, SymbolTable, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Greater,
    Less,
    Equal,
    Incomparable,
}

impl Cmp {
    pub fn flip(self) -> Cmp {
        match self {
            Cmp::Greater => Cmp::Less,
            Cmp::Less => Cmp::Greater,
            c => c,
        }
    }
}

/// Symbol precedence. Functions are above constants, constants above
/// predicates. Inside a kind, symbols known when the precedence was built
/// are ordered by descending arity and then by name (earlier name is
/// higher); symbols created later sit below them in creation order.
#[derive(Clone, Debug, Default)]
pub struct Precedence {
    listed: HashMap<Sym, u32>,
    known: HashMap<Sym, u32>,
}

fn kind_level(table: &SymbolTable, s: Sym) -> u8 {
    if table.is_equality(s) {
        return 0;
    }
    match table.info(s).kind {
        SymKind::Function => 3,
        SymKind::Constant => 2,
        SymKind::Predicate | SymKind::Propositional => 1,
    }
}

impl Precedence {
    pub fn new(table: &SymbolTable) -> Self {
        let mut syms: Vec<(Sym, &_)> = table
            .symbols()
            .filter(|(_, i)| i.origin == Origin::Input)
            .collect();
        syms.sort_by(|(_, a), (_, b)| b.arity.cmp(&a.arity).then_with(|| a.name.cmp(&b.name)));
        let known = syms
            .iter()
            .enumerate()
            .map(|(i, (s, _))| (*s, i as u32))
            .collect();
        Precedence {
            listed: HashMap::new(),
            known,
        }
    }

    /// Default precedence with `order` (highest first) placed on top of
    /// their kinds. Unknown names are ignored.
    pub fn with_order(table: &SymbolTable, order: &[Sym]) -> Self {
        let mut p = Precedence::new(table);
        p.listed = order.iter().enumerate().map(|(i, s)| (*s, i as u32)).collect();
        p
    }

    fn key(&self, table: &SymbolTable, s: Sym) -> (u8, u8, i64) {
        let level = kind_level(table, s);
        if let Some(i) = self.listed.get(&s) {
            (level, 2, -(*i as i64))
        } else if let Some(i) = self.known.get(&s) {
            (level, 1, -(*i as i64))
        } else {
            (level, 0, -(s.0 as i64))
        }
    }

    /// Total on symbols.
    pub fn compare(&self, table: &SymbolTable, a: Sym, b: Sym) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        self.key(table, a).cmp(&self.key(table, b))
    }
}

/// Term or atom view for the path order: predicates act as head symbols.
#[derive(Clone, Copy)]
enum Node<'a> {
    T(&'a Term),
    Atom(Sym, &'a [Term]),
}

impl<'a> Node<'a> {
    fn head(&self) -> Option<(Sym, &'a [Term])> {
        match *self {
            Node::T(Term::Var(_)) => None,
            Node::T(Term::Const(c)) => Some((*c, &[])),
            Node::T(Term::App(f, args)) => Some((*f, args.as_slice())),
            Node::Atom(p, args) => Some((p, args)),
        }
    }

    fn has_var(&self, v: u32) -> bool {
        match self {
            Node::T(t) => t.has_var(v),
            Node::Atom(_, args) => args.iter().any(|a| a.has_var(v)),
        }
    }

    fn same(&self, other: &Node<'_>) -> bool {
        match (self, other) {
            (Node::T(a), Node::T(b)) => a == b,
            (Node::Atom(p, xs), Node::Atom(q, ys)) => p == q && xs == ys,
            _ => false,
        }
    }
}

pub struct Lpo<'a> {
    pub table: &'a SymbolTable,
    pub prec: &'a Precedence,
}

impl<'a> Lpo<'a> {
    pub fn new(table: &'a SymbolTable, prec: &'a Precedence) -> Self {
        Lpo { table, prec }
    }

    fn gt(&self, s: Node<'_>, t: Node<'_>) -> bool {
        if let Node::T(Term::Var(v)) = t {
            return !s.same(&t) && s.has_var(*v);
        }
        let Some((f, ss)) = s.head() else {
            return false;
        };
        let (g, ts) = t.head().expect("non-variable");
        if ss.iter().any(|si| self.ge(Node::T(si), t)) {
            return true;
        }
        let dominates = || ts.iter().all(|tj| self.gt(s, Node::T(tj)));
        match self.prec.compare(self.table, f, g) {
            Ordering::Greater => dominates(),
            Ordering::Equal => {
                if !dominates() {
                    return false;
                }
                for (a, b) in ss.iter().zip(ts) {
                    if a != b {
                        return self.gt(Node::T(a), Node::T(b));
                    }
                }
                ss.len() > ts.len()
            }
            Ordering::Less => false,
        }
    }

    fn ge(&self, s: Node<'_>, t: Node<'_>) -> bool {
        s.same(&t) || self.gt(s, t)
    }

    fn cmp_nodes(&self, s: Node<'_>, t: Node<'_>) -> Cmp {
        if s.same(&t) {
            Cmp::Equal
        } else if self.gt(s, t) {
            Cmp::Greater
        } else if self.gt(t, s) {
            Cmp::Less
        } else {
            Cmp::Incomparable
        }
    }

    pub fn compare_terms(&self, s: &Term, t: &Term) -> Cmp {
        self.cmp_nodes(Node::T(s), Node::T(t))
    }

    pub fn term_gt(&self, s: &Term, t: &Term) -> bool {
        self.gt(Node::T(s), Node::T(t))
    }

    pub fn compare_atoms(&self, a: &Literal, b: &Literal) -> Cmp {
        self.cmp_nodes(Node::Atom(a.pred, &a.args), Node::Atom(b.pred, &b.args))
    }

    /// Literal order: equal atoms put the negative literal above the
    /// positive one, otherwise the atoms decide.
    pub fn compare_literals(&self, a: &Literal, b: &Literal) -> Cmp {
        if a.pred == b.pred && a.args == b.args {
            return match (a.pos, b.pos) {
                (x, y) if x == y => Cmp::Equal,
                (false, true) => Cmp::Greater,
                _ => Cmp::Less,
            };
        }
        self.compare_atoms(a, b)
    }

    /// Multiset extension of the literal order.
    pub fn clause_gt(&self, m: &Clause, n: &Clause) -> bool {
        let mut ms: Vec<&Literal> = m.lits().iter().collect();
        let mut ns: Vec<&Literal> = n.lits().iter().collect();
        ms.retain(|l| {
            if let Some(i) = ns.iter().position(|k| k == l) {
                ns.remove(i);
                false
            } else {
                true
            }
        });
        if ms.is_empty() && ns.is_empty() {
            return false;
        }
        ns.iter().all(|k| {
            ms.iter()
                .any(|l| self.compare_literals(l, k) == Cmp::Greater)
        })
    }

    /// Indices of literals with no strictly greater literal in the clause.
    pub fn maximal(&self, c: &Clause) -> Vec<usize> {
        let lits = c.lits();
        (0..lits.len())
            .filter(|&i| {
                !(0..lits.len())
                    .any(|j| j != i && self.compare_literals(&lits[j], &lits[i]) == Cmp::Greater)
            })
            .collect()
    }

    /// Indices of literals with no other literal greater or equal.
    pub fn strictly_maximal(&self, c: &Clause) -> Vec<usize> {
        let lits = c.lits();
        (0..lits.len())
            .filter(|&i| {
                !(0..lits.len()).any(|j| {
                    j != i
                        && matches!(
                            self.compare_literals(&lits[j], &lits[i]),
                            Cmp::Greater | Cmp::Equal
                        )
                })
            })
            .collect()
    }
}

/// Eligible literals of a clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Eligible {
    /// Ground clause or compound-term clause without a negative compound
    /// literal: the maximal literals.
    Max(Vec<usize>),
    /// A negative compound-term literal is selected.
    Selected(usize),
    /// Non-ground flat clause: every negative literal is selected.
    AllNegative(Vec<usize>),
}

impl Eligible {
    pub fn has_selection(&self) -> bool {
        !matches!(self, Eligible::Max(_))
    }
}

/// Structurally smallest negative compound-term literal.
pub fn select_nc(c: &Clause) -> Option<usize> {
    c.lits()
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.pos && l.has_compound())
        .min_by(|(_, a), (_, b)| a.cmp(b))
        .map(|(i, _)| i)
}

pub fn eligible(lpo: &Lpo<'_>, c: &Clause) -> Eligible {
    if c.is_ground() {
        return Eligible::Max(lpo.maximal(c));
    }
    if let Some(i) = select_nc(c) {
        return Eligible::Selected(i);
    }
    if c.lits().iter().any(|l| l.pos && l.has_compound()) || c.lits().iter().all(|l| l.pos) {
        return Eligible::Max(lpo.maximal(c));
    }
    let negs = c
        .lits()
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.pos)
        .map(|(i, _)| i)
        .collect();
    Eligible::AllNegative(negs)
}
