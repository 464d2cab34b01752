//! Freely reduced words in the free group `F_n` on the basis `a_1, ..., a_n`.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A basis letter `a_i` or its inverse `a_i^{-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    index: usize,
    inverse: bool,
}

impl Letter {
    /// `a_index`. Indices are 1-based.
    pub fn gen(index: usize) -> Letter {
        assert!(index >= 1, "letter indices start at 1");
        Letter {
            index,
            inverse: false,
        }
    }

    /// `a_index^{-1}`.
    pub fn inv(index: usize) -> Letter {
        Letter::gen(index).inverted()
    }

    /// Letter with an explicit sign, `+1` or `-1`.
    pub fn signed(index: usize, sign: i8) -> Letter {
        assert!(sign == 1 || sign == -1, "sign must be +1 or -1");
        if sign > 0 {
            Letter::gen(index)
        } else {
            Letter::inv(index)
        }
    }

    pub fn index(self) -> usize {
        self.index
    }

    pub fn is_inverse(self) -> bool {
        self.inverse
    }

    pub fn sign(self) -> i8 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn inverted(self) -> Letter {
        Letter {
            index: self.index,
            inverse: !self.inverse,
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.index == other.index && self.inverse != other.inverse
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.index)?;
        if self.inverse {
            f.write_str("'")?;
        }
        Ok(())
    }
}

/// A freely reduced word of `F_rank`. The empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    rank: usize,
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity(rank: usize) -> Word {
        Word {
            rank,
            letters: Vec::new(),
        }
    }

    /// The single-letter word `a_index`.
    pub fn generator(index: usize, rank: usize) -> Result<Word> {
        Word::reduce([Letter::gen(index)], rank)
    }

    /// Freely reduces `raw` with a single stack pass.
    pub fn reduce(raw: impl IntoIterator<Item = Letter>, rank: usize) -> Result<Word> {
        let mut letters: Vec<Letter> = Vec::new();
        for letter in raw {
            if letter.index > rank {
                return Err(Error::IndexOutOfRank {
                    index: letter.index,
                    rank,
                });
            }
            push_reduced(&mut letters, letter);
        }
        Ok(Word { rank, letters })
    }

    /// Builds a word from signed indices (`2` is `a_2`, `-2` is `a_2^{-1}`).
    pub fn from_signed(indices: &[i64], rank: usize) -> Result<Word> {
        let mut raw = Vec::with_capacity(indices.len());
        for &x in indices {
            if x == 0 {
                return Err(Error::IndexOutOfRank { index: 0, rank });
            }
            let letter = Letter::signed(x.unsigned_abs() as usize, if x > 0 { 1 } else { -1 });
            raw.push(letter);
        }
        Word::reduce(raw, rank)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The letter of a single-letter word.
    pub fn as_letter(&self) -> Option<Letter> {
        match self.letters.as_slice() {
            [l] => Some(*l),
            _ => None,
        }
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        let mut letters = self.letters.clone();
        for &l in &other.letters {
            push_reduced(&mut letters, l);
        }
        Ok(Word {
            rank: self.rank,
            letters,
        })
    }

    pub fn inverse(&self) -> Word {
        Word {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| l.inverted()).collect(),
        }
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut letters = Vec::with_capacity(base.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            for &l in &base.letters {
                push_reduced(&mut letters, l);
            }
        }
        Word {
            rank: self.rank,
            letters,
        }
    }

    /// Signed letter counts; entry `i - 1` counts `a_i`.
    pub fn exponent_sums(&self) -> Vec<i64> {
        let mut sums = vec![0i64; self.rank];
        for l in &self.letters {
            sums[l.index - 1] += i64::from(l.sign());
        }
        sums
    }

    /// Parses the textual syntax `a2 a1 a2'`; `1` is the empty word.
    pub fn parse(text: &str, rank: usize) -> Result<Word> {
        let trimmed = text.trim();
        if trimmed == "1" || trimmed.is_empty() {
            return Ok(Word::identity(rank));
        }
        let mut raw = Vec::new();
        let bytes = trimmed.as_bytes();
        let mut pos = 0;
        while pos < bytes.len() {
            match bytes[pos] {
                b' ' | b'\t' => pos += 1,
                b'a' => {
                    let start = pos + 1;
                    let mut end = start;
                    while end < bytes.len() && bytes[end].is_ascii_digit() {
                        end += 1;
                    }
                    if end == start {
                        return Err(Error::parse(pos, "expected a letter index after `a`"));
                    }
                    let index: usize = trimmed[start..end]
                        .parse()
                        .map_err(|_| Error::parse(start, "letter index too large"))?;
                    if index == 0 {
                        return Err(Error::parse(start, "letter indices start at 1"));
                    }
                    let mut letter = Letter::gen(index);
                    pos = end;
                    while pos < bytes.len() && bytes[pos] == b'\'' {
                        letter = letter.inverted();
                        pos += 1;
                    }
                    raw.push(letter);
                }
                _ => return Err(Error::parse(pos, "expected a letter `a<i>`")),
            }
        }
        Word::reduce(raw, rank)
    }

    /// Number of letters that cancel when `left` is followed by `right`.
    /// Either side may be taken inverted without materialising it.
    pub(crate) fn cancellation(
        left: &Word,
        left_inv: bool,
        right: &Word,
        right_inv: bool,
    ) -> usize {
        let tail = |k: usize| -> Letter {
            if left_inv {
                left.letters[k].inverted()
            } else {
                left.letters[left.len() - 1 - k]
            }
        };
        let head = |k: usize| -> Letter {
            if right_inv {
                right.letters[right.len() - 1 - k].inverted()
            } else {
                right.letters[k]
            }
        };
        let max = left.len().min(right.len());
        (0..max).take_while(|&k| tail(k).cancels(head(k))).count()
    }
}

fn push_reduced(letters: &mut Vec<Letter>, letter: Letter) {
    if letters.last().is_some_and(|last| last.cancels(letter)) {
        letters.pop();
    } else {
        letters.push(letter);
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
