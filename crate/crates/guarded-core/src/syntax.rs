//! Formula syntax, the problem file parser and printer, and fragment
//! membership tests for the guarded, loosely guarded and clique guarded
//! fragments.
//!
//! Problem files are sequences of `role: formula.` statements with `%`
//! line comments. Roles are `rule`, `fact`, `query`, `clause`, `skolem` and
//! `formula`. Formulas use a TPTP-like syntax: `! [X,Y] : F`, `? [X] : F`,
//! `~`, `&`, `|`, `=>`, `<=>`, `=` and `!=`. Identifiers starting with an
//! upper-case letter are variables.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::terms::{Clause, Literal, Origin, Printer, Sym, SymKind, SymbolError, SymbolTable, Term, Var};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    /// Atom, stored as a positive literal.
    Atom(Literal),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(Vec<Var>, Box<Formula>),
    Exists(Vec<Var>, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(vs: Vec<Var>, f: Formula) -> Formula {
        if vs.is_empty() {
            f
        } else {
            Formula::Forall(vs, Box::new(f))
        }
    }

    pub fn exists(vs: Vec<Var>, f: Formula) -> Formula {
        if vs.is_empty() {
            f
        } else {
            Formula::Exists(vs, Box::new(f))
        }
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<Var> {
        fn go(f: &Formula, bound: &mut Vec<Var>, out: &mut Vec<Var>) {
            match f {
                Formula::True | Formula::False => {}
                Formula::Atom(l) => {
                    for v in l.vars() {
                        if !bound.contains(&v) && !out.contains(&v) {
                            out.push(v);
                        }
                    }
                }
                Formula::Not(g) => go(g, bound, out),
                Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| go(g, bound, out)),
                Formula::Implies(a, b) | Formula::Iff(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
                    let n = bound.len();
                    bound.extend(vs.iter().copied());
                    go(g, bound, out);
                    bound.truncate(n);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn atoms(&self) -> Vec<&Literal> {
        fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Literal>) {
            match f {
                Formula::True | Formula::False => {}
                Formula::Atom(l) => out.push(l),
                Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => go(g, out),
                Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| go(g, out)),
                Formula::Implies(a, b) | Formula::Iff(a, b) => {
                    go(a, out);
                    go(b, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    pub fn has_function_symbols(&self) -> bool {
        self.atoms().iter().any(|l| l.has_compound())
    }

    pub fn has_equality(&self) -> bool {
        self.atoms().iter().any(|l| l.eq)
    }

    /// Applies `f` to every atom's variables, leaving binders unchanged.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Literal) -> Literal) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(l) => Formula::Atom(f(l)),
            Formula::Not(g) => Formula::not(g.map_atoms(f)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.map_atoms(f), b.map_atoms(f)),
            Formula::Iff(a, b) => Formula::Iff(Box::new(a.map_atoms(f)), Box::new(b.map_atoms(f))),
            Formula::Forall(vs, g) => Formula::Forall(vs.clone(), Box::new(g.map_atoms(f))),
            Formula::Exists(vs, g) => Formula::Exists(vs.clone(), Box::new(g.map_atoms(f))),
        }
    }

    /// Negation pushed to atoms.
    pub fn negated_nnf(&self) -> Formula {
        match self {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Atom(_) => Formula::not(self.clone()),
            Formula::Not(g) => (**g).clone(),
            Formula::And(gs) => Formula::Or(gs.iter().map(Formula::negated_nnf).collect()),
            Formula::Or(gs) => Formula::And(gs.iter().map(Formula::negated_nnf).collect()),
            Formula::Implies(a, b) => Formula::And(vec![(**a).clone(), b.negated_nnf()]),
            Formula::Iff(a, b) => Formula::Iff(a.clone(), Box::new(b.negated_nnf())),
            Formula::Forall(vs, g) => Formula::Exists(vs.clone(), Box::new(g.negated_nnf())),
            Formula::Exists(vs, g) => Formula::Forall(vs.clone(), Box::new(g.negated_nnf())),
        }
    }
}

// ---------------------------------------------------------------------------
// Problems

#[derive(Clone, Debug, Default)]
pub struct Problem {
    pub table: SymbolTable,
    pub var_names: HashMap<Var, String>,
    pub next_var: Var,
    pub rules: Vec<Formula>,
    /// Ground atoms.
    pub facts: Vec<Literal>,
    pub queries: Vec<Formula>,
    pub clauses: Vec<Clause>,
    pub formulas: Vec<Formula>,
    pub warnings: Vec<String>,
}

impl Problem {
    pub fn fresh_var(&mut self) -> Var {
        let v = self.next_var;
        self.next_var += 1;
        v
    }

    pub fn printer(&self) -> Printer<'_> {
        Printer::with_names(&self.table, &self.var_names)
    }

    pub fn print_formula(&self, f: &Formula) -> String {
        print_formula(&self.printer(), f)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: {source}")]
    Symbol {
        line: usize,
        col: usize,
        source: SymbolError,
    },
    #[error("{line}:{col}: {msg}")]
    Role { line: usize, col: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Lower(String),
    Upper(String),
    Dollar(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Colon,
    Dot,
    Tilde,
    Amp,
    Bar,
    Implies,
    Iff,
    Bang,
    Query,
    Eq,
    Neq,
    Eof,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
}

fn lex(src: &str) -> Result<Lexer, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut toks = Vec::new();
    let err = |line, col, msg: &str| ParseError::Syntax {
        line,
        col,
        msg: msg.to_string(),
    };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let adv = |i: &mut usize, col: &mut usize, n: usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            adv(&mut i, &mut col, 1);
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let peek = chars.get(i + 1).copied();
        let peek2 = chars.get(i + 2).copied();
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            ',' => Tok::Comma,
            ':' => Tok::Colon,
            '.' => Tok::Dot,
            '~' => Tok::Tilde,
            '&' => Tok::Amp,
            '|' => Tok::Bar,
            '?' => Tok::Query,
            '!' if peek == Some('=') => {
                adv(&mut i, &mut col, 2);
                toks.push((Tok::Neq, l0, c0));
                continue;
            }
            '!' => Tok::Bang,
            '=' if peek == Some('>') => {
                adv(&mut i, &mut col, 2);
                toks.push((Tok::Implies, l0, c0));
                continue;
            }
            '=' => Tok::Eq,
            '<' if peek == Some('=') && peek2 == Some('>') => {
                adv(&mut i, &mut col, 3);
                toks.push((Tok::Iff, l0, c0));
                continue;
            }
            '$' | 'a'..='z' | 'A'..='Z' | '_' | '0'..='9' => {
                let start = i;
                i += 1;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                col += i - start;
                let tok = if c == '$' {
                    Tok::Dollar(word)
                } else if c.is_ascii_uppercase() || c == '_' {
                    Tok::Upper(word)
                } else {
                    Tok::Lower(word)
                };
                toks.push((tok, l0, c0));
                continue;
            }
            _ => return Err(err(l0, c0, &format!("unexpected character `{c}`"))),
        };
        adv(&mut i, &mut col, 1);
        toks.push((tok, l0, c0));
    }
    toks.push((Tok::Eof, line, col));
    Ok(Lexer { toks })
}

struct Parser<'p> {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    prob: &'p mut Problem,
    scope: Vec<(String, Var)>,
    free: Vec<(String, Var)>,
}

enum TermOrAtom {
    Term(Term),
    Atom(String, Vec<Term>),
}

impl<'p> Parser<'p> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn loc(&self) -> (usize, usize) {
        let (_, l, c) = &self.toks[self.pos];
        (*l, *c)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.loc();
        Err(ParseError::Syntax {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn sym_err(&self, e: SymbolError) -> ParseError {
        let (line, col) = self.loc();
        ParseError::Symbol {
            line,
            col,
            source: e,
        }
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.next();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn var(&mut self, name: &str) -> Var {
        if let Some((_, v)) = self.scope.iter().rev().find(|(n, _)| n == name) {
            return *v;
        }
        if let Some((_, v)) = self.free.iter().find(|(n, _)| n == name) {
            return *v;
        }
        let v = self.prob.fresh_var();
        self.prob.var_names.insert(v, name.to_string());
        self.free.push((name.to_string(), v));
        v
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.implication()?;
        if *self.peek() == Tok::Iff {
            self.next();
            let rhs = self.implication()?;
            return Ok(Formula::Iff(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Implies {
            self.next();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let first = self.conjunction()?;
        if *self.peek() != Tok::Bar {
            return Ok(first);
        }
        let mut items = vec![first];
        while *self.peek() == Tok::Bar {
            self.next();
            items.push(self.conjunction()?);
        }
        Ok(Formula::Or(items))
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let first = self.unary()?;
        if *self.peek() != Tok::Amp {
            return Ok(first);
        }
        let mut items = vec![first];
        while *self.peek() == Tok::Amp {
            self.next();
            items.push(self.unary()?);
        }
        Ok(Formula::And(items))
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.next();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Bang | Tok::Query => {
                let universal = *self.peek() == Tok::Bang;
                self.next();
                self.expect(Tok::LBrack, "`[`")?;
                let mut vs = Vec::new();
                loop {
                    match self.next() {
                        Tok::Upper(name) => {
                            let shadows = self.scope.iter().any(|(n, _)| *n == name)
                                || self.free.iter().any(|(n, _)| *n == name);
                            if shadows {
                                let (l, c) = self.loc();
                                self.prob
                                    .warnings
                                    .push(format!("{l}:{c}: variable `{name}` shadows an outer variable"));
                            }
                            let v = self.prob.fresh_var();
                            self.prob.var_names.insert(v, name.clone());
                            vs.push((name, v));
                        }
                        _ => return self.err("expected a variable"),
                    }
                    match self.peek() {
                        Tok::Comma => {
                            self.next();
                        }
                        Tok::RBrack => {
                            self.next();
                            break;
                        }
                        _ => return self.err("expected `,` or `]`"),
                    }
                }
                self.expect(Tok::Colon, "`:`")?;
                let n = self.scope.len();
                self.scope.extend(vs.iter().cloned());
                let body = self.unary();
                self.scope.truncate(n);
                let vars = vs.into_iter().map(|(_, v)| v).collect();
                let body = Box::new(body?);
                Ok(if universal {
                    Formula::Forall(vars, body)
                } else {
                    Formula::Exists(vars, body)
                })
            }
            Tok::LParen => {
                self.next();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Dollar(w) => {
                self.next();
                match w.as_str() {
                    "$true" => Ok(Formula::True),
                    "$false" => Ok(Formula::False),
                    _ => self.err(format!("unknown constant `{w}`")),
                }
            }
            Tok::Lower(_) | Tok::Upper(_) => self.atomic(),
            _ => self.err("expected a formula"),
        }
    }

    fn atomic(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.term_or_atom()?;
        match self.peek() {
            Tok::Eq | Tok::Neq => {
                let pos = *self.peek() == Tok::Eq;
                self.next();
                let l = self.as_term(lhs)?;
                let r = match self.term_or_atom()? {
                    t => self.as_term(t)?,
                };
                let eq = self.prob.table.equality();
                let atom = Formula::Atom(Literal::equality(true, eq, l, r));
                Ok(if pos { atom } else { Formula::not(atom) })
            }
            _ => match lhs {
                TermOrAtom::Atom(name, args) => {
                    let kind = if args.is_empty() {
                        SymKind::Propositional
                    } else {
                        SymKind::Predicate
                    };
                    let p = self
                        .prob
                        .table
                        .intern(&name, kind, args.len())
                        .map_err(|e| self.sym_err(e))?;
                    Ok(Formula::Atom(Literal::new(true, p, args)))
                }
                TermOrAtom::Term(_) => self.err("a variable cannot stand as a formula"),
            },
        }
    }

    fn as_term(&mut self, t: TermOrAtom) -> Result<Term, ParseError> {
        match t {
            TermOrAtom::Term(t) => Ok(t),
            TermOrAtom::Atom(name, args) => self.make_term(&name, args),
        }
    }

    fn make_term(&mut self, name: &str, args: Vec<Term>) -> Result<Term, ParseError> {
        if args.is_empty() {
            let c = self
                .prob
                .table
                .intern(name, SymKind::Constant, 0)
                .map_err(|e| self.sym_err(e))?;
            Ok(Term::Const(c))
        } else {
            let f = self
                .prob
                .table
                .intern(name, SymKind::Function, args.len())
                .map_err(|e| self.sym_err(e))?;
            Ok(Term::App(f, args))
        }
    }

    fn term_or_atom(&mut self) -> Result<TermOrAtom, ParseError> {
        match self.next() {
            Tok::Upper(name) => Ok(TermOrAtom::Term(Term::Var(self.var(&name)))),
            Tok::Lower(name) => {
                let mut args = Vec::new();
                if *self.peek() == Tok::LParen {
                    self.next();
                    loop {
                        let a = self.term_or_atom()?;
                        args.push(self.as_term(a)?);
                        match self.next() {
                            Tok::Comma => {}
                            Tok::RParen => break,
                            _ => return self.err("expected `,` or `)`"),
                        }
                    }
                }
                Ok(TermOrAtom::Atom(name, args))
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.err("expected a term")
            }
        }
    }
}

/// Parses a whole problem file.
pub fn parse_problem(src: &str) -> Result<Problem, ParseError> {
    let mut prob = Problem::default();
    parse_into(&mut prob, src)?;
    Ok(prob)
}

/// Parses statements into an existing problem, sharing its symbol table.
pub fn parse_into(prob: &mut Problem, src: &str) -> Result<(), ParseError> {
    let lexer = lex(src)?;
    let mut p = Parser {
        toks: lexer.toks,
        pos: 0,
        prob,
        scope: Vec::new(),
        free: Vec::new(),
    };
    while *p.peek() != Tok::Eof {
        let (line, col) = p.loc();
        let role = match p.next() {
            Tok::Lower(r) => r,
            _ => return p.err("expected a statement role"),
        };
        p.expect(Tok::Colon, "`:` after the role")?;
        if role == "skolem" {
            p.skolem_names()?;
            continue;
        }
        p.free.clear();
        let f = p.formula()?;
        p.expect(Tok::Dot, "`.` at the end of the statement")?;
        let role_err = |msg: String| ParseError::Role { line, col, msg };
        match role.as_str() {
            "rule" => p.prob.rules.push(f),
            "query" => p.prob.queries.push(f),
            "formula" => p.prob.formulas.push(f),
            "fact" => match f {
                Formula::Atom(l) if l.is_ground() && !l.eq => p.prob.facts.push(l),
                _ => return Err(role_err("a fact must be a ground atom".into())),
            },
            "clause" => {
                let lits = clause_literals(&f).ok_or_else(|| {
                    role_err("a clause must be a disjunction of literals".into())
                })?;
                p.prob.clauses.push(Clause::new(lits));
            }
            other => return Err(role_err(format!("unknown role `{other}`"))),
        }
    }
    Ok(())
}

impl Parser<'_> {
    /// `skolem: b, f.` marks already used constants or functions as Skolem
    /// symbols.
    fn skolem_names(&mut self) -> Result<(), ParseError> {
        loop {
            let (line, col) = self.loc();
            let name = match self.next() {
                Tok::Lower(n) => n,
                _ => return self.err("expected a symbol name"),
            };
            let s = self.prob.table.lookup(&name, true).ok_or_else(|| ParseError::Role {
                line,
                col,
                msg: format!("`{name}` is not a constant or function symbol used earlier"),
            })?;
            self.prob.table.set_origin(s, Origin::Skolem);
            match self.next() {
                Tok::Comma => continue,
                Tok::Dot => return Ok(()),
                _ => return self.err("expected `,` or `.`"),
            }
        }
    }
}

fn clause_literals(f: &Formula) -> Option<Vec<Literal>> {
    match f {
        Formula::False => Some(Vec::new()),
        Formula::Atom(l) => Some(vec![l.clone()]),
        Formula::Not(g) => match &**g {
            Formula::Atom(l) => Some(vec![l.negate()]),
            _ => None,
        },
        Formula::Or(gs) => {
            let mut out = Vec::new();
            for g in gs {
                out.extend(clause_literals(g)?);
            }
            Some(out)
        }
        _ => None,
    }
}

/// Parses a single clause, e.g. `~p(X,Y) | q(f(X))`, into `prob`.
pub fn parse_clause(prob: &mut Problem, src: &str) -> Result<Clause, ParseError> {
    let before = prob.clauses.len();
    parse_into(prob, &format!("clause: {src}."))?;
    let c = prob.clauses.remove(before);
    Ok(c)
}

// ---------------------------------------------------------------------------
// Printing

fn is_unit(f: &Formula) -> bool {
    matches!(f, Formula::True | Formula::False | Formula::Atom(_) | Formula::Not(_))
}

/// Prints a formula in the input syntax. Compound operands are always
/// parenthesised, so the output parses back to the same tree.
pub fn print_formula(p: &Printer<'_>, f: &Formula) -> String {
    let mut s = String::new();
    write_formula(p, f, &mut s);
    s
}

fn write_operand(p: &Printer<'_>, f: &Formula, out: &mut String) {
    if is_unit(f) {
        write_formula(p, f, out);
    } else {
        out.push('(');
        write_formula(p, f, out);
        out.push(')');
    }
}

fn write_formula(p: &Printer<'_>, f: &Formula, out: &mut String) {
    match f {
        Formula::True => out.push_str("$true"),
        Formula::False => out.push_str("$false"),
        Formula::Atom(l) => out.push_str(&p.atom(l)),
        Formula::Not(g) => match &**g {
            Formula::Atom(l) if l.eq => out.push_str(&p.literal(&l.negate())),
            _ => {
                out.push('~');
                write_operand(p, g, out);
            }
        },
        Formula::And(gs) | Formula::Or(gs) => {
            if gs.is_empty() {
                out.push_str(if matches!(f, Formula::And(_)) { "$true" } else { "$false" });
                return;
            }
            let sep = if matches!(f, Formula::And(_)) { " & " } else { " | " };
            for (i, g) in gs.iter().enumerate() {
                if i > 0 {
                    out.push_str(sep);
                }
                write_operand(p, g, out);
            }
        }
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            write_operand(p, a, out);
            out.push_str(if matches!(f, Formula::Implies(..)) { " => " } else { " <=> " });
            write_operand(p, b, out);
        }
        Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
            out.push(if matches!(f, Formula::Forall(..)) { '!' } else { '?' });
            let names: Vec<String> = vs.iter().map(|v| p.var(*v)).collect();
            let _ = write!(out, " [{}] : ", names.join(","));
            write_operand(p, g, out);
        }
    }
}

// ---------------------------------------------------------------------------
// Fragments

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FragmentMembership {
    pub gf: bool,
    pub lgf: bool,
    pub cgf: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Gf,
    Lgf,
    Cgf,
}

pub fn fragment(f: &Formula) -> FragmentMembership {
    FragmentMembership {
        gf: in_fragment(f, Level::Gf),
        lgf: in_fragment(f, Level::Lgf),
        cgf: in_fragment(f, Level::Cgf),
    }
}

fn flatten_and(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(gs) => gs.iter().for_each(|g| flatten_and(g, out)),
        g => out.push(g.clone()),
    }
}

/// A guard: its atoms and its inner existential variables.
struct Guard {
    atoms: Vec<Literal>,
    inner: Vec<Var>,
}

fn function_free_atom(l: &Literal) -> bool {
    !l.eq && l.is_flat()
}

/// Reads `g` as a guard at the given level.
fn as_guard(g: &Formula, level: Level) -> Option<Guard> {
    let mut items = Vec::new();
    flatten_and(g, &mut items);
    let mut guard = Guard {
        atoms: Vec::new(),
        inner: Vec::new(),
    };
    for it in items {
        match it {
            Formula::Atom(l) if function_free_atom(&l) => guard.atoms.push(l),
            Formula::Exists(vs, body) if level == Level::Cgf => {
                let mut inner = Vec::new();
                flatten_and(&body, &mut inner);
                for a in inner {
                    match a {
                        Formula::Atom(l) if function_free_atom(&l) => guard.atoms.push(l),
                        _ => return None,
                    }
                }
                guard.inner.extend(vs);
            }
            _ => return None,
        }
    }
    let ok = match level {
        Level::Gf => guard.atoms.len() == 1,
        _ => !guard.atoms.is_empty(),
    };
    ok.then_some(guard)
}

fn co_occur(atoms: &[Literal], a: Var, b: Var) -> bool {
    atoms.iter().any(|l| l.has_var(a) && l.has_var(b))
}

fn guard_ok(guard: &Guard, quantified: &[Var], body: &Formula, level: Level) -> bool {
    let gvars: BTreeSet<Var> = guard.atoms.iter().flat_map(|l| l.vars()).collect();
    let inner: BTreeSet<Var> = guard.inner.iter().copied().collect();
    let outer: BTreeSet<Var> = gvars.difference(&inner).copied().collect();
    let free = body.free_vars();
    match level {
        Level::Gf => free.iter().all(|v| gvars.contains(v)),
        Level::Lgf => {
            free.iter().all(|v| gvars.contains(v))
                && quantified.iter().all(|x| {
                    gvars
                        .iter()
                        .filter(|y| *y != x)
                        .all(|y| co_occur(&guard.atoms, *x, *y))
                })
        }
        Level::Cgf => {
            free.iter().all(|v| outer.contains(v))
                && inner
                    .iter()
                    .all(|x| guard.atoms.iter().filter(|l| l.has_var(*x)).count() <= 1)
                && quantified.iter().all(|z| {
                    gvars
                        .iter()
                        .filter(|y| *y != z)
                        .all(|y| co_occur(&guard.atoms, *z, *y))
                })
        }
    }
}

fn in_fragment(f: &Formula, level: Level) -> bool {
    match f {
        Formula::True | Formula::False => true,
        Formula::Atom(l) => function_free_atom(l),
        Formula::Not(g) => in_fragment(g, level),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().all(|g| in_fragment(g, level)),
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            in_fragment(a, level) && in_fragment(b, level)
        }
        Formula::Forall(vs, body) => {
            let (g, rest) = match &**body {
                Formula::Implies(g, rest) => (&**g, (**rest).clone()),
                Formula::Not(g) => (&**g, Formula::False),
                _ => return false,
            };
            match as_guard(g, level) {
                Some(guard) => guard_ok(&guard, vs, &rest, level) && in_fragment(&rest, level),
                None => false,
            }
        }
        Formula::Exists(vs, body) => {
            let mut items = Vec::new();
            flatten_and(body, &mut items);
            if items.len() > 16 {
                return false;
            }
            // Try every split of the conjuncts into guard and body.
            let n = items.len();
            (1u32..(1 << n)).any(|mask| {
                let (gs, fs): (Vec<_>, Vec<_>) =
                    (0..n).partition(|i| mask & (1 << i) != 0);
                let g = Formula::And(gs.iter().map(|i| items[*i].clone()).collect());
                let rest = match fs.len() {
                    0 => Formula::True,
                    1 => items[fs[0]].clone(),
                    _ => Formula::And(fs.iter().map(|i| items[*i].clone()).collect()),
                };
                match as_guard(&g, level) {
                    Some(guard) => {
                        guard_ok(&guard, vs, &rest, level) && in_fragment(&rest, level)
                    }
                    None => false,
                }
            })
        }
    }
}

/// A Boolean conjunctive query `? [X..] : (A1 & ... & An)` as its atoms.
pub fn query_atoms(f: &Formula) -> Option<Vec<Literal>> {
    match f {
        Formula::Atom(l) if !l.has_compound() => Some(vec![l.clone()]),
        Formula::Exists(_, g) => query_atoms(g),
        Formula::And(gs) => {
            let mut out = Vec::new();
            for g in gs {
                out.extend(query_atoms(g)?);
            }
            Some(out)
        }
        _ => None,
    }
}

/// The negated query as a query clause.
pub fn negate_query(f: &Formula) -> Option<Clause> {
    query_atoms(f).map(|atoms| Clause::new(atoms.iter().map(Literal::negate).collect()))
}

pub fn predicate_symbols(f: &Formula) -> BTreeSet<Sym> {
    f.atoms().iter().map(|l| l.pred).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_rule(src: &str) -> (Problem, Formula) {
        let mut p = parse_problem(&format!("rule: {src}.")).unwrap();
        let f = p.rules.pop().unwrap();
        (p, f)
    }

    #[test]
    fn parses_statement_roles() {
        let p = parse_problem(
            "% comment\nrule: ! [X] : (a(X) => b(X)).\nfact: a(c).\nquery: ? [X] : b(X).\nclause: ~a(X) | b(X).",
        )
        .unwrap();
        assert_eq!(p.rules.len(), 1);
        assert_eq!(p.facts.len(), 1);
        assert_eq!(p.queries.len(), 1);
        assert_eq!(p.clauses[0].len(), 2);
    }

    #[test]
    fn reports_position_of_errors() {
        let err = parse_problem("rule: a(X) &.\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, .. }));
        let err = parse_problem("fact: a(X).").unwrap_err();
        assert!(matches!(err, ParseError::Role { .. }));
        let err = parse_problem("rule: a(b) & a(b,c).").unwrap_err();
        assert!(matches!(err, ParseError::Symbol { .. }));
    }

    #[test]
    fn warns_on_shadowing() {
        let p = parse_problem("rule: ! [X] : (a(X) => ? [X] : b(X)).").unwrap();
        assert_eq!(p.warnings.len(), 1);
        let Formula::Forall(outer, body) = &p.rules[0] else { panic!() };
        let Formula::Implies(_, rhs) = &**body else { panic!() };
        let Formula::Exists(inner, _) = &**rhs else { panic!() };
        assert_ne!(outer, inner);
    }

    #[test]
    fn equality_and_disequality() {
        let (p, f) = parse_rule("? [X] : (X = a & X != b)");
        let printed = p.print_formula(&f);
        assert_eq!(printed, "? [X] : (X = a & X != b)");
    }

    #[test]
    fn print_parse_round_trip() {
        let src = "! [X,Y] : ((r(X,Y) & s(Y)) => (? [Z] : (t(Y,Z) | ~u(Z)) <=> v))";
        let (p, f) = parse_rule(src);
        let printed = p.print_formula(&f);
        let (_, g) = parse_rule(&printed);
        let (_, h) = parse_rule(&printed);
        assert_eq!(g, h);
        assert_eq!(printed, parse_rule(&printed).0.print_formula(&g));
    }

    #[test]
    fn fragment_examples() {
        let gf = |s: &str| fragment(&parse_rule(s).1);
        // A(x)
        assert!(gf("a(X)").gf);
        // forall x (A(x,y) -> B(x,y))
        assert!(gf("! [X] : (a(X,Y) => b(X,Y))").gf);
        // forall x A(x) has no guard
        assert!(!gf("! [X] : a(X)").gf);
        // forall x (A(x,y) -> false)
        assert!(gf("! [X] : (a(X,Y) => $false)").gf);
        // forall x (A(x,y) -> forall y (B(x,y) -> C(z))): z outside the guard
        assert!(!gf("! [X] : (a(X,Y) => ! [Y] : (b(X,Y) => c(Z)))").gf);
        // modal translation
        let f7 = gf("! [X] : (p(X) => ? [Y] : (r(X,Y) & ! [Z] : (r(Y,Z) => p(Z))))");
        assert!(f7.gf && f7.lgf && f7.cgf);
        // until-style formula: loosely guarded, not guarded
        let lg = gf("! [Z] : ((r(X,Z) & r(Z,Y)) => p(Z))");
        assert!(!lg.gf && lg.lgf && lg.cgf);
        // transitivity is in none of them
        let tr = gf("! [X,Y,Z] : ((r(X,Y) & r(Y,Z)) => r(X,Z))");
        assert!(!tr.gf && !tr.lgf && !tr.cgf);
    }

    #[test]
    fn clique_guard_with_inner_existentials() {
        let src = "! [X1,X2] : (g(X1,X2) => ! [X3] : ((? [X4] : a(X1,X3,X4) & ? [X5] : b(X2,X3,X5)) => d(X1,X3)))";
        let f = parse_rule(src).1;
        let m = fragment(&f);
        assert!(m.cgf);
        assert!(!m.lgf);
        // inner variable occurring in two atoms is rejected
        let bad = "! [X3] : ((? [X4] : (a(X3,X4) & b(X3,X4))) => c(X3))";
        assert!(!fragment(&parse_rule(bad).1).cgf);
        // repetition inside one atom is accepted
        let rep = "! [X3] : ((? [X4] : a(X3,X4,X4)) => c(X3))";
        assert!(fragment(&parse_rule(rep).1).cgf);
    }

    #[test]
    fn queries_negate_to_query_clauses() {
        let p = parse_problem("query: ? [X,Y] : (r(X,Y) & s(Y)).").unwrap();
        let c = negate_query(&p.queries[0]).unwrap();
        assert_eq!(c.len(), 2);
        assert!(c.lits().iter().all(|l| !l.pos && l.is_flat()));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        #[derive(Clone, Debug)]
        enum Shape {
            Atom(u8, u8),
            Not(Box<Shape>),
            And(Vec<Shape>),
            Or(Vec<Shape>),
            Imp(Box<Shape>, Box<Shape>),
            All(Box<Shape>),
            Ex(Box<Shape>),
        }

        fn arb_shape() -> impl Strategy<Value = Shape> {
            let leaf = (0u8..3, 0u8..3).prop_map(|(p, v)| Shape::Atom(p, v));
            leaf.prop_recursive(4, 24, 3, |inner| {
                prop_oneof![
                    inner.clone().prop_map(|s| Shape::Not(Box::new(s))),
                    prop::collection::vec(inner.clone(), 2..4).prop_map(Shape::And),
                    prop::collection::vec(inner.clone(), 2..4).prop_map(Shape::Or),
                    (inner.clone(), inner.clone())
                        .prop_map(|(a, b)| Shape::Imp(Box::new(a), Box::new(b))),
                    inner.clone().prop_map(|s| Shape::All(Box::new(s))),
                    inner.prop_map(|s| Shape::Ex(Box::new(s))),
                ]
            })
        }

        fn render(s: &Shape, depth: usize) -> String {
            match s {
                Shape::Atom(p, v) => format!("p{p}(V{}, c{v})", depth.saturating_sub(1)),
                Shape::Not(a) => format!("~({})", render(a, depth)),
                Shape::And(xs) => xs.iter().map(|x| format!("({})", render(x, depth))).collect::<Vec<_>>().join(" & "),
                Shape::Or(xs) => xs.iter().map(|x| format!("({})", render(x, depth))).collect::<Vec<_>>().join(" | "),
                Shape::Imp(a, b) => format!("({}) => ({})", render(a, depth), render(b, depth)),
                Shape::All(a) => format!("! [V{depth}] : ({})", render(a, depth + 1)),
                Shape::Ex(a) => format!("? [V{depth}] : ({})", render(a, depth + 1)),
            }
        }

        proptest! {
            #[test]
            fn printing_round_trips(s in arb_shape()) {
                let src = format!("formula: {}.", render(&s, 1));
                let p = parse_problem(&src).unwrap();
                let f = &p.formulas[0];
                let printed = p.print_formula(f);
                let q = parse_problem(&format!("formula: {printed}.")).unwrap();
                prop_assert_eq!(q.print_formula(&q.formulas[0]), printed);
                prop_assert_eq!(q.formulas[0].atoms().len(), f.atoms().len());
            }
        }
    }
}
