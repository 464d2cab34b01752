//! Nielsen reduction of basis-image tuples: automorphism recognition,
//! inversion and factorisation into elementary generators.
//!
//! Reduction applies the first strictly length-decreasing replace move in a
//! fixed scan order: positions `(i, j)` lexicographically, sign `+` before
//! `-`, left multiplication before right. When no such move exists and the
//! tuple is not yet a signed basis, the reducer searches the finite set of
//! tuples of equal total length reachable by length-preserving moves for one
//! that admits a decrease. Nielsen's theorem guarantees such an escape for
//! every basis, so an exhausted search is a proof that the tuple is not a
//! basis.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::generators::{eps, perm, signed_lambda, signed_rho, Generator, Perm};
use crate::word::Word;

pub const DEFAULT_STEP_BUDGET: u64 = 1_000_000;

/// One Nielsen move on a tuple `(w_1, ..., w_n)`; positions are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ElementaryMove {
    /// `w_i <- w_j^sign w_i`
    ReplaceLeft { i: usize, j: usize, sign: i8 },
    /// `w_i <- w_i w_j^sign`
    ReplaceRight { i: usize, j: usize, sign: i8 },
    /// `w_i <- w_i^{-1}`
    InvertEntry { i: usize },
    /// `w_i <-> w_j`
    SwapEntries { i: usize, j: usize },
}

impl ElementaryMove {
    pub fn apply(&self, tuple: &mut [Word]) {
        match *self {
            ElementaryMove::ReplaceLeft { i, j, sign } => {
                let factor = tuple[j - 1].pow(i64::from(sign));
                tuple[i - 1] = factor.concat(&tuple[i - 1]).expect("tuple shares a rank");
            }
            ElementaryMove::ReplaceRight { i, j, sign } => {
                let factor = tuple[j - 1].pow(i64::from(sign));
                tuple[i - 1] = tuple[i - 1].concat(&factor).expect("tuple shares a rank");
            }
            ElementaryMove::InvertEntry { i } => tuple[i - 1] = tuple[i - 1].inverse(),
            ElementaryMove::SwapEntries { i, j } => tuple.swap(i - 1, j - 1),
        }
    }

    /// The automorphism `m` such that applying this move to the images of
    /// `f` yields the images of `m.compose(f)`.
    pub fn as_endo(&self, n: usize) -> Result<Endo> {
        match *self {
            ElementaryMove::ReplaceLeft { i, j, sign } => signed_lambda(i, j, sign, n),
            ElementaryMove::ReplaceRight { i, j, sign } => signed_rho(i, j, sign, n),
            ElementaryMove::InvertEntry { i } => eps(i, n),
            ElementaryMove::SwapEntries { i, j } => perm(&Perm::transposition(i, j, n)?, n),
        }
    }

    /// Elementary generators whose left-to-right product is the inverse of
    /// [`Self::as_endo`].
    pub fn inverse_generators(&self) -> Vec<Generator> {
        let conjugate = |inner: Generator, j: usize| {
            vec![Generator::Eps { i: j }, inner, Generator::Eps { i: j }]
        };
        match *self {
            ElementaryMove::ReplaceLeft { i, j, sign } => {
                if sign < 0 {
                    vec![Generator::Lambda { i, j }]
                } else {
                    conjugate(Generator::Lambda { i, j }, j)
                }
            }
            ElementaryMove::ReplaceRight { i, j, sign } => {
                if sign < 0 {
                    vec![Generator::Rho { i, j }]
                } else {
                    conjugate(Generator::Rho { i, j }, j)
                }
            }
            ElementaryMove::InvertEntry { i } => vec![Generator::Eps { i }],
            ElementaryMove::SwapEntries { i, j } => vec![Generator::Perm {
                cycles: vec![vec![i.min(j), i.max(j)]],
            }],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Automorphism,
    NotAutomorphism,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub moves: Vec<ElementaryMove>,
    pub final_tuple: Vec<Word>,
}

impl Certificate {
    pub fn is_automorphism(&self) -> bool {
        self.verdict == Verdict::Automorphism
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Reducer {
    pub step_budget: u64,
}

impl Default for Reducer {
    fn default() -> Self {
        Reducer {
            step_budget: DEFAULT_STEP_BUDGET,
        }
    }
}

impl Reducer {
    pub fn with_budget(step_budget: u64) -> Reducer {
        Reducer { step_budget }
    }

    pub fn reduce(&self, tuple: &[Word]) -> Result<Certificate> {
        let n = tuple.len();
        if let Some(w) = tuple.iter().find(|w| w.rank() != n) {
            return Err(Error::RankMismatch {
                left: n,
                right: w.rank(),
            });
        }
        let mut current = tuple.to_vec();
        let mut moves = Vec::new();
        let mut steps: u64 = 0;
        let charge = |steps: &mut u64, amount: u64| -> Result<()> {
            *steps += amount;
            if *steps > self.step_budget {
                Err(Error::StepBudgetExceeded {
                    budget: self.step_budget,
                })
            } else {
                Ok(())
            }
        };

        loop {
            if let Some(m) = first_decreasing_move(&current) {
                charge(&mut steps, 1)?;
                m.apply(&mut current);
                moves.push(m);
                continue;
            }
            if is_signed_basis(&current) || current.iter().any(Word::is_empty) {
                break;
            }
            let remaining = self.step_budget.saturating_sub(steps);
            match plateau_escape(&current, remaining)? {
                Some(path) => {
                    charge(&mut steps, path.len() as u64)?;
                    for m in path {
                        m.apply(&mut current);
                        moves.push(m);
                    }
                }
                None => break,
            }
        }

        let verdict = if is_signed_basis(&current) {
            for m in normalisation_moves(&current) {
                m.apply(&mut current);
                moves.push(m);
            }
            Verdict::Automorphism
        } else {
            Verdict::NotAutomorphism
        };
        Ok(Certificate {
            verdict,
            moves,
            final_tuple: current,
        })
    }

    pub fn is_automorphism(&self, f: &Endo) -> Result<bool> {
        Ok(self.reduce(f.images())?.is_automorphism())
    }

    pub fn inverse(&self, f: &Endo) -> Result<Endo> {
        let cert = self.reduce(f.images())?;
        if !cert.is_automorphism() {
            return Err(Error::NotAnAutomorphism);
        }
        // m_k ... m_1 f = 1, read left to right
        let mut inv = Endo::identity(f.rank());
        for m in cert.moves.iter().rev() {
            inv = inv.compose(&m.as_endo(f.rank())?)?;
        }
        Ok(inv)
    }

    /// Elementary generators whose left-to-right composite equals `f`.
    pub fn factor(&self, f: &Endo) -> Result<Vec<Generator>> {
        let cert = self.reduce(f.images())?;
        if !cert.is_automorphism() {
            return Err(Error::NotAnAutomorphism);
        }
        Ok(cert
            .moves
            .iter()
            .flat_map(ElementaryMove::inverse_generators)
            .collect())
    }
}

pub fn nielsen_reduce(tuple: &[Word]) -> Result<Certificate> {
    Reducer::default().reduce(tuple)
}

pub fn is_automorphism(f: &Endo) -> Result<bool> {
    Reducer::default().is_automorphism(f)
}

pub fn inverse(f: &Endo) -> Result<Endo> {
    Reducer::default().inverse(f)
}

pub fn factor_into_elementary(f: &Endo) -> Result<Vec<Generator>> {
    Reducer::default().factor(f)
}

/// Left-to-right composite of generators at rank `n`.
pub fn recompose(generators: &[Generator], n: usize) -> Result<Endo> {
    generators
        .iter()
        .try_fold(Endo::identity(n), |acc, g| acc.compose(&g.to_endo(n)?))
}

fn is_signed_basis(tuple: &[Word]) -> bool {
    let mut seen = vec![false; tuple.len()];
    tuple.iter().all(|w| match w.as_letter() {
        Some(l) if !seen[l.index() - 1] => {
            seen[l.index() - 1] = true;
            true
        }
        _ => false,
    })
}

fn normalisation_moves(tuple: &[Word]) -> Vec<ElementaryMove> {
    let mut t = tuple.to_vec();
    let mut moves = Vec::new();
    for p in 1..=t.len() {
        let q = (p..=t.len())
            .find(|&q| t[q - 1].as_letter().map(|l| l.index()) == Some(p))
            .expect("signed basis contains every index");
        if q != p {
            let m = ElementaryMove::SwapEntries { i: p, j: q };
            m.apply(&mut t);
            moves.push(m);
        }
        if t[p - 1].as_letter().is_some_and(|l| l.is_inverse()) {
            let m = ElementaryMove::InvertEntry { i: p };
            m.apply(&mut t);
            moves.push(m);
        }
    }
    moves
}

/// Length of `w_i` after the replace move, without building the word.
fn replaced_len(tuple: &[Word], i: usize, j: usize, sign: i8, left: bool) -> usize {
    let wi = &tuple[i];
    let wj = &tuple[j];
    let c = if left {
        Word::cancellation(wj, sign < 0, wi, false)
    } else {
        Word::cancellation(wi, false, wj, sign < 0)
    };
    wi.len() + wj.len() - 2 * c
}

/// Replace moves in scan order, with the resulting length of `w_i`.
fn replace_moves(tuple: &[Word]) -> impl Iterator<Item = (ElementaryMove, usize, usize)> + '_ {
    let n = tuple.len();
    (0..n)
        .flat_map(move |i| (0..n).map(move |j| (i, j)))
        .filter(move |&(i, j)| i != j && !tuple[j].is_empty())
        .flat_map(move |(i, j)| {
            [1i8, -1].into_iter().flat_map(move |sign| {
                [true, false].into_iter().map(move |left| {
                    let len = replaced_len(tuple, i, j, sign, left);
                    let m = if left {
                        ElementaryMove::ReplaceLeft {
                            i: i + 1,
                            j: j + 1,
                            sign,
                        }
                    } else {
                        ElementaryMove::ReplaceRight {
                            i: i + 1,
                            j: j + 1,
                            sign,
                        }
                    };
                    (m, len, tuple[i].len())
                })
            })
        })
}

fn first_decreasing_move(tuple: &[Word]) -> Option<ElementaryMove> {
    replace_moves(tuple)
        .find(|&(_, new, old)| new < old)
        .map(|(m, _, _)| m)
}

/// Breadth-first search over equal-length tuples for one that admits a
/// decreasing move or is already a signed basis. Returns the move path.
fn plateau_escape(start: &[Word], budget: u64) -> Result<Option<Vec<ElementaryMove>>> {
    let mut parent: HashMap<Vec<Word>, (Vec<Word>, ElementaryMove)> = HashMap::new();
    let mut seen: HashSet<Vec<Word>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.to_vec());
    queue.push_back(start.to_vec());
    let mut visited: u64 = 0;
    while let Some(state) = queue.pop_front() {
        let neighbours: Vec<ElementaryMove> = replace_moves(&state)
            .filter(|&(_, new, old)| new == old)
            .map(|(m, _, _)| m)
            .collect();
        for m in neighbours {
            let mut next = state.clone();
            m.apply(&mut next);
            if !seen.insert(next.clone()) {
                continue;
            }
            visited += 1;
            if visited > budget {
                return Err(Error::StepBudgetExceeded { budget });
            }
            parent.insert(next.clone(), (state.clone(), m));
            if is_signed_basis(&next) || first_decreasing_move(&next).is_some() {
                let mut path = Vec::new();
                let mut cursor = next;
                while let Some((prev, mv)) = parent.get(&cursor) {
                    path.push(*mv);
                    cursor = prev.clone();
                }
                path.reverse();
                return Ok(Some(path));
            }
            queue.push_back(next);
        }
    }
    Ok(None)
}
