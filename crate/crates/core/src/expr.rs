//! Symbolic expressions over named generators and their text syntax.
//!
//! ```text
//! expr  := term { term }                     juxtaposition, left to right
//! term  := primary { '^' int | "'" }
//! primary := atom | '[' expr ',' expr ']' | '(' expr ')'
//! atom  := l(i,j) | r(i,j) | e(i) | p(cycles) | sig(cycles)
//!        | iota | z | alpha | beta | theta | 1
//! ```
//!
//! Juxtaposition composes in application order: `x y` applies `x` first.
//! This is the opposite of the usual right-to-left function composition.

use std::fmt;

use itertools::Itertools;

use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::generators::{eps, lambda, lemma3_embed, perm, rho, special, Perm, Special};
use crate::nielsen;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    Lambda(usize, usize),
    Rho(usize, usize),
    Eps(usize),
    Perm(Vec<Vec<usize>>),
    Sig(Vec<Vec<usize>>),
    Special(Special),
    Identity,
}

/// Sandwich orientation for a conjugation of `x` by `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    /// `g x g^{-1}`
    Forward,
    /// `g^{-1} x g`
    Backward,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GenExpr {
    Atom(Atom),
    /// Product in application order; always at least two factors.
    Seq(Vec<GenExpr>),
    Inverse(Box<GenExpr>),
    Power(Box<GenExpr>, i64),
    /// `[x, y] = x y x^{-1} y^{-1}`
    Commutator(Box<GenExpr>, Box<GenExpr>),
    Conj {
        g: Box<GenExpr>,
        x: Box<GenExpr>,
        orientation: Orientation,
    },
}

impl GenExpr {
    pub fn atom(a: Atom) -> GenExpr {
        GenExpr::Atom(a)
    }

    pub fn l(i: usize, j: usize) -> GenExpr {
        GenExpr::Atom(Atom::Lambda(i, j))
    }

    pub fn r(i: usize, j: usize) -> GenExpr {
        GenExpr::Atom(Atom::Rho(i, j))
    }

    pub fn e(i: usize) -> GenExpr {
        GenExpr::Atom(Atom::Eps(i))
    }

    pub fn p(cycles: Vec<Vec<usize>>) -> GenExpr {
        GenExpr::Atom(Atom::Perm(cycles))
    }

    pub fn special(s: Special) -> GenExpr {
        GenExpr::Atom(Atom::Special(s))
    }

    pub fn one() -> GenExpr {
        GenExpr::Atom(Atom::Identity)
    }

    /// Product of `factors`, collapsing the trivial cases.
    pub fn seq(factors: Vec<GenExpr>) -> GenExpr {
        match factors.len() {
            0 => GenExpr::one(),
            1 => factors.into_iter().next().unwrap(),
            _ => GenExpr::Seq(factors),
        }
    }

    pub fn then(self, other: GenExpr) -> GenExpr {
        GenExpr::Seq(vec![self, other])
    }

    pub fn inv(self) -> GenExpr {
        GenExpr::Inverse(Box::new(self))
    }

    pub fn pow(self, k: i64) -> GenExpr {
        GenExpr::Power(Box::new(self), k)
    }

    pub fn comm(x: GenExpr, y: GenExpr) -> GenExpr {
        GenExpr::Commutator(Box::new(x), Box::new(y))
    }

    pub fn conj(g: GenExpr, x: GenExpr, orientation: Orientation) -> GenExpr {
        GenExpr::Conj {
            g: Box::new(g),
            x: Box::new(x),
            orientation,
        }
    }

    pub fn evaluate(&self, n: usize) -> Result<Endo> {
        evaluate(self, n)
    }

    fn needs_parens_in_postfix(&self) -> bool {
        matches!(self, GenExpr::Seq(_) | GenExpr::Conj { .. })
    }
}

fn atom_endo(atom: &Atom, n: usize) -> Result<Endo> {
    match atom {
        Atom::Lambda(i, j) => lambda(*i, *j, n),
        Atom::Rho(i, j) => rho(*i, *j, n),
        Atom::Eps(i) => eps(*i, n),
        Atom::Perm(cycles) => perm(&Perm::from_cycles(cycles, n)?, n),
        Atom::Sig(cycles) => lemma3_embed(&Perm::from_cycles(cycles, n + 1)?, n),
        Atom::Special(s) => special(*s, n),
        Atom::Identity => Ok(Endo::identity(n)),
    }
}

fn invert(f: &Endo) -> Result<Endo> {
    nielsen::inverse(f)
}

/// Evaluates at rank `n`, composing in application order.
pub fn evaluate(expr: &GenExpr, n: usize) -> Result<Endo> {
    match expr {
        GenExpr::Atom(a) => atom_endo(a, n),
        GenExpr::Seq(factors) => factors
            .iter()
            .try_fold(Endo::identity(n), |acc, f| acc.compose(&evaluate(f, n)?)),
        GenExpr::Inverse(x) => invert(&evaluate(x, n)?),
        GenExpr::Power(x, k) => evaluate(x, n)?.power(*k),
        GenExpr::Commutator(x, y) => {
            let a = evaluate(x, n)?;
            let b = evaluate(y, n)?;
            a.compose(&b)?.compose(&invert(&a)?)?.compose(&invert(&b)?)
        }
        GenExpr::Conj { g, x, orientation } => {
            let g = evaluate(g, n)?;
            let g_inv = invert(&g)?;
            let x = evaluate(x, n)?;
            match orientation {
                Orientation::Forward => g.compose(&x)?.compose(&g_inv),
                Orientation::Backward => g_inv.compose(&x)?.compose(&g),
            }
        }
    }
}

fn write_cycles(f: &mut fmt::Formatter<'_>, cycles: &[Vec<usize>]) -> fmt::Result {
    if cycles.is_empty() {
        return f.write_str("()");
    }
    for c in cycles {
        write!(f, "({})", c.iter().join(" "))?;
    }
    Ok(())
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Lambda(i, j) => write!(f, "l({i},{j})"),
            Atom::Rho(i, j) => write!(f, "r({i},{j})"),
            Atom::Eps(i) => write!(f, "e({i})"),
            Atom::Perm(c) => {
                f.write_str("p")?;
                write_cycles(f, c)
            }
            Atom::Sig(c) => {
                f.write_str("sig")?;
                write_cycles(f, c)
            }
            Atom::Special(s) => write!(f, "{s}"),
            Atom::Identity => f.write_str("1"),
        }
    }
}

/// Renders in the parser's syntax. `Conj` has no syntax of its own and is
/// written out as a sandwich.
impl fmt::Display for GenExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenExpr::Atom(a) => write!(f, "{a}"),
            GenExpr::Seq(factors) => {
                for (k, x) in factors.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" ")?;
                    }
                    if x.needs_parens_in_postfix() {
                        write!(f, "({x})")?;
                    } else {
                        write!(f, "{x}")?;
                    }
                }
                Ok(())
            }
            GenExpr::Inverse(x) => {
                if x.needs_parens_in_postfix() {
                    write!(f, "({x})'")
                } else {
                    write!(f, "{x}'")
                }
            }
            GenExpr::Power(x, k) => {
                if x.needs_parens_in_postfix() {
                    write!(f, "({x})^{k}")
                } else {
                    write!(f, "{x}^{k}")
                }
            }
            GenExpr::Commutator(x, y) => write!(f, "[{x}, {y}]"),
            GenExpr::Conj { g, x, orientation } => match orientation {
                Orientation::Forward => write!(f, "({g}) ({x}) ({g})'"),
                Orientation::Backward => write!(f, "({g})' ({x}) ({g})"),
            },
        }
    }
}

/// Parses an expression. Index validity against a rank is checked by
/// [`parse_expr`].
pub fn parse(text: &str) -> Result<GenExpr> {
    let mut p = Parser { src: text, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(Error::parse(
            p.pos,
            format!("unexpected `{}`", p.peek_char().unwrap()),
        ));
    }
    Ok(e)
}

/// Parses and checks every atom against rank `n`.
pub fn parse_expr(text: &str, n: usize) -> Result<GenExpr> {
    let e = parse(text)?;
    validate(&e, n)?;
    Ok(e)
}

fn validate(e: &GenExpr, n: usize) -> Result<()> {
    match e {
        GenExpr::Atom(a) => atom_endo(a, n)
            .map(|_| ())
            .map_err(|err| Error::Semantic(format!("`{a}` at rank {n}: {err}"))),
        GenExpr::Seq(xs) => xs.iter().try_for_each(|x| validate(x, n)),
        GenExpr::Inverse(x) | GenExpr::Power(x, _) => validate(x, n),
        GenExpr::Commutator(x, y) | GenExpr::Conj { g: x, x: y, .. } => {
            validate(x, n)?;
            validate(y, n)
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_non_ws(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_char()
    }

    fn skip_ws(&mut self) {
        while self.peek_char().is_some_and(char::is_whitespace) {
            self.pos += self.peek_char().unwrap().len_utf8();
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek_non_ws() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::parse(self.pos, format!("expected `{c}`")))
        }
    }

    fn starts_term(c: char) -> bool {
        c.is_ascii_alphabetic() || c == '[' || c == '(' || c == '1'
    }

    fn expr(&mut self) -> Result<GenExpr> {
        let mut terms = Vec::new();
        while let Some(c) = self.peek_non_ws() {
            if !Self::starts_term(c) {
                break;
            }
            terms.push(self.term()?);
        }
        if terms.is_empty() {
            return Err(Error::parse(self.pos, "expected an expression"));
        }
        Ok(GenExpr::seq(terms))
    }

    fn term(&mut self) -> Result<GenExpr> {
        let mut t = self.primary()?;
        loop {
            match self.peek_non_ws() {
                Some('\'') => {
                    self.pos += 1;
                    t = t.inv();
                }
                Some('^') => {
                    self.pos += 1;
                    let k = self.int()?;
                    t = t.pow(k);
                }
                _ => return Ok(t),
            }
        }
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.peek_char() == Some('-') {
            self.pos += 1;
        }
        while self.peek_char().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| Error::parse(start, "expected an integer"))
    }

    fn index(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.peek_char().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| Error::parse(start, "expected an index"))
    }

    fn primary(&mut self) -> Result<GenExpr> {
        let start = self.pos;
        match self.peek_non_ws() {
            Some('[') => {
                self.pos += 1;
                let x = self.expr()?;
                self.expect(',')?;
                let y = self.expr()?;
                self.expect(']')?;
                Ok(GenExpr::comm(x, y))
            }
            Some('(') => {
                self.pos += 1;
                let x = self.expr()?;
                self.expect(')')?;
                Ok(x)
            }
            Some('1') => {
                self.pos += 1;
                Ok(GenExpr::one())
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let name_start = self.pos;
                while self
                    .peek_char()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
                {
                    self.pos += 1;
                }
                let name = &self.src[name_start..self.pos];
                self.atom(name, name_start)
            }
            _ => Err(Error::parse(start, "expected a generator")),
        }
    }

    fn atom(&mut self, name: &str, at: usize) -> Result<GenExpr> {
        let atom = match name {
            "l" | "r" => {
                self.expect('(')?;
                let i = self.index()?;
                self.expect(',')?;
                let j = self.index()?;
                self.expect(')')?;
                if name == "l" {
                    Atom::Lambda(i, j)
                } else {
                    Atom::Rho(i, j)
                }
            }
            "e" => {
                self.expect('(')?;
                let i = self.index()?;
                self.expect(')')?;
                Atom::Eps(i)
            }
            "p" => Atom::Perm(self.cycles()?),
            "sig" => Atom::Sig(self.cycles()?),
            other => match other.parse::<Special>() {
                Ok(s) => Atom::Special(s),
                Err(_) => return Err(Error::parse(at, format!("unknown generator `{other}`"))),
            },
        };
        Ok(GenExpr::Atom(atom))
    }

    /// One or more parenthesised cycles of indices. A following `(` whose
    /// first non-space character is not a digit starts a new term instead.
    fn cycles(&mut self) -> Result<Vec<Vec<usize>>> {
        let mut cycles = Vec::new();
        let mut first = true;
        loop {
            let save = self.pos;
            if self.peek_non_ws() != Some('(') {
                break;
            }
            self.pos += 1;
            let next = self.peek_non_ws();
            let is_cycle =
                matches!(next, Some(c) if c.is_ascii_digit()) || (first && next == Some(')'));
            if !is_cycle {
                self.pos = save;
                break;
            }
            let mut cycle = Vec::new();
            while self.peek_non_ws() != Some(')') {
                if self.peek_non_ws() == Some(',') {
                    self.pos += 1;
                    continue;
                }
                cycle.push(self.index()?);
            }
            self.pos += 1;
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            first = false;
        }
        if first {
            return Err(Error::parse(self.pos, "expected cycle notation"));
        }
        Ok(cycles)
    }
}
