//! Named automorphisms: Nielsen moves, sign flips, basis permutations and a
//! handful of special elements.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::Serialize;

use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::word::{Letter, Word};

/// A permutation of `1..=size`; `images[j - 1]` holds `p(j)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(size: usize) -> Perm {
        Perm {
            images: (1..=size).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Perm> {
        let size = images.len();
        let mut seen = vec![false; size];
        for &x in &images {
            if x == 0 || x > size || seen[x - 1] {
                return Err(Error::InvalidPermutation(format!(
                    "{images:?} is not a bijection"
                )));
            }
            seen[x - 1] = true;
        }
        Ok(Perm { images })
    }

    /// Builds a permutation of `1..=size` from cycles, e.g. `[[1, 2], [3, 4]]`.
    /// Cycles must be disjoint.
    pub fn from_cycles(cycles: &[Vec<usize>], size: usize) -> Result<Perm> {
        let mut images: Vec<usize> = (1..=size).collect();
        let mut used = vec![false; size];
        for cycle in cycles {
            for &x in cycle {
                if x == 0 || x > size {
                    return Err(Error::InvalidPermutation(format!(
                        "point {x} outside 1..={size}"
                    )));
                }
                if used[x - 1] {
                    return Err(Error::InvalidPermutation(format!(
                        "point {x} repeated in cycle notation"
                    )));
                }
                used[x - 1] = true;
            }
            for (k, &x) in cycle.iter().enumerate() {
                images[x - 1] = cycle[(k + 1) % cycle.len()];
            }
        }
        Ok(Perm { images })
    }

    /// The transposition `(i j)`.
    pub fn transposition(i: usize, j: usize, size: usize) -> Result<Perm> {
        if i == j {
            return Err(Error::BadIndices { i, j, rank: size });
        }
        Perm::from_cycles(&[vec![i, j]], size)
    }

    pub fn size(&self) -> usize {
        self.images.len()
    }

    /// `p(j)` for 1-based `j`.
    pub fn image(&self, j: usize) -> usize {
        self.images[j - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `j -> other(self(j))`: `self` first. With this order
    /// `perm(p).compose(perm(q)) == perm(q.after(p))`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm {
            images: self.images.iter().map(|&x| other.image(x)).collect(),
        }
    }

    /// `j -> self(other(j))`.
    pub fn after(&self, other: &Perm) -> Perm {
        other.then(self)
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0; self.size()];
        for (j, &x) in self.images.iter().enumerate() {
            images[x - 1] = j + 1;
        }
        Perm { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(j, &x)| x == j + 1)
    }

    /// Disjoint cycles of length at least 2, each starting at its smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.size()];
        let mut out = Vec::new();
        for start in 1..=self.size() {
            if seen[start - 1] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start - 1] = true;
            let mut x = self.image(start);
            while x != start {
                seen[x - 1] = true;
                cycle.push(x);
                x = self.image(x);
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }

    /// All permutations of `1..=size` in lexicographic order of images.
    pub fn all(size: usize) -> Vec<Perm> {
        (1..=size)
            .permutations(size)
            .map(|images| Perm { images })
            .collect()
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            write!(f, "({})", c.iter().join(" "))?;
        }
        Ok(())
    }
}

fn check_pair(i: usize, j: usize, n: usize) -> Result<()> {
    if i == j || i == 0 || j == 0 || i > n || j > n {
        return Err(Error::BadIndices { i, j, rank: n });
    }
    Ok(())
}

fn letter_word(l: Letter, n: usize) -> Word {
    Word::reduce([l], n).expect("index checked by caller")
}

fn replace_image(n: usize, i: usize, image: Word) -> Endo {
    let mut images = Endo::identity(n).images().to_vec();
    images[i - 1] = image;
    Endo::from_images(images).expect("rank preserved")
}

/// Left Nielsen move `a_i -> a_j a_i`.
pub fn lambda(i: usize, j: usize, n: usize) -> Result<Endo> {
    signed_lambda(i, j, 1, n)
}

/// Right Nielsen move `a_i -> a_i a_j`.
pub fn rho(i: usize, j: usize, n: usize) -> Result<Endo> {
    signed_rho(i, j, 1, n)
}

/// `a_i -> a_j^sign a_i`; `sign = -1` gives the inverse of `lambda(i, j)`.
pub fn signed_lambda(i: usize, j: usize, sign: i8, n: usize) -> Result<Endo> {
    check_pair(i, j, n)?;
    let w = Word::reduce([Letter::signed(j, sign), Letter::gen(i)], n)?;
    Ok(replace_image(n, i, w))
}

/// `a_i -> a_i a_j^sign`.
pub fn signed_rho(i: usize, j: usize, sign: i8, n: usize) -> Result<Endo> {
    check_pair(i, j, n)?;
    let w = Word::reduce([Letter::gen(i), Letter::signed(j, sign)], n)?;
    Ok(replace_image(n, i, w))
}

/// `a_i -> a_i^{-1}`.
pub fn eps(i: usize, n: usize) -> Result<Endo> {
    if i == 0 || i > n {
        return Err(Error::BadIndices { i, j: i, rank: n });
    }
    Ok(replace_image(n, i, letter_word(Letter::inv(i), n)))
}

/// `a_j -> a_{p(j)}`.
pub fn perm(p: &Perm, n: usize) -> Result<Endo> {
    if p.size() != n {
        return Err(Error::RankMismatch {
            left: n,
            right: p.size(),
        });
    }
    let images = (1..=n)
        .map(|j| letter_word(Letter::gen(p.image(j)), n))
        .collect();
    Endo::from_images(images)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Special {
    /// The transposition `(1 2)`.
    Iota,
    /// `e(1) e(2) ... e(n)`, inverting every basis element.
    Z,
    Alpha,
    Beta,
    /// Fixes `a_1`, `a_2` and sends `a_i` to `a_2 a_i` for `i > 2`.
    Theta,
}

impl Special {
    pub const ALL: [Special; 5] = [
        Special::Iota,
        Special::Z,
        Special::Alpha,
        Special::Beta,
        Special::Theta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Special::Iota => "iota",
            Special::Z => "z",
            Special::Alpha => "alpha",
            Special::Beta => "beta",
            Special::Theta => "theta",
        }
    }
}

impl fmt::Display for Special {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Special {
    type Err = Error;
    fn from_str(s: &str) -> Result<Special> {
        Special::ALL
            .into_iter()
            .find(|sp| sp.name() == s)
            .ok_or_else(|| Error::Semantic(format!("unknown special element `{s}`")))
    }
}

pub fn special(name: Special, n: usize) -> Result<Endo> {
    let unsupported = || Error::UnsupportedRank {
        name: name.name().into(),
        rank: n,
    };
    match name {
        Special::Iota => {
            if n < 2 {
                return Err(unsupported());
            }
            perm(&Perm::transposition(1, 2, n)?, n)
        }
        Special::Z => {
            let images = (1..=n).map(|i| letter_word(Letter::inv(i), n)).collect();
            Endo::from_images(images).map_err(|_| unsupported())
        }
        Special::Alpha | Special::Beta => {
            if n != 3 {
                return Err(unsupported());
            }
            let text = if name == Special::Alpha {
                "a1'; a3 a1'; a2 a1'"
            } else {
                "a3 a2'; a2'; a1 a2'"
            };
            Endo::parse_images(text)
        }
        Special::Theta => {
            if n < 3 {
                return Err(unsupported());
            }
            let mut images = Endo::identity(n).images().to_vec();
            for (k, image) in images.iter_mut().enumerate().skip(2) {
                *image = Word::reduce([Letter::gen(2), Letter::gen(k + 1)], n)?;
            }
            Endo::from_images(images)
        }
    }
}

/// The symmetric group on the `n + 1` edges of the two-vertex graph with
/// edges `e_1, ..., e_{n+1}` and basis `a_i = e_i e_{n+1}^{-1}`: a
/// permutation `tau` of the edges induces
/// `a_i -> a_{tau(i)} a_{tau(n+1)}^{-1}`, where `a_{n+1}` is the empty word.
pub fn lemma3_embed(tau: &Perm, n: usize) -> Result<Endo> {
    if tau.size() != n + 1 {
        return Err(Error::RankMismatch {
            left: n + 1,
            right: tau.size(),
        });
    }
    let edge = |k: usize| -> Vec<Letter> {
        if k == n + 1 {
            Vec::new()
        } else {
            vec![Letter::gen(k)]
        }
    };
    let tail: Vec<Letter> = edge(tau.image(n + 1))
        .into_iter()
        .map(Letter::inverted)
        .collect();
    let images = (1..=n)
        .map(|i| {
            Word::reduce(
                edge(tau.image(i)).into_iter().chain(tail.iter().copied()),
                n,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Endo::from_images(images)
}

/// An elementary generator, as produced by factorisation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Generator {
    Lambda { i: usize, j: usize },
    Rho { i: usize, j: usize },
    Eps { i: usize },
    Perm { cycles: Vec<Vec<usize>> },
}

impl Generator {
    pub fn to_endo(&self, n: usize) -> Result<Endo> {
        match self {
            Generator::Lambda { i, j } => lambda(*i, *j, n),
            Generator::Rho { i, j } => rho(*i, *j, n),
            Generator::Eps { i } => eps(*i, n),
            Generator::Perm { cycles } => perm(&Perm::from_cycles(cycles, n)?, n),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Lambda { i, j } => write!(f, "l({i},{j})"),
            Generator::Rho { i, j } => write!(f, "r({i},{j})"),
            Generator::Eps { i } => write!(f, "e({i})"),
            Generator::Perm { cycles } => {
                f.write_str("p")?;
                if cycles.is_empty() {
                    return f.write_str("()");
                }
                for c in cycles {
                    write!(f, "({})", c.iter().join(" "))?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(text: &str, n: usize) -> Word {
        Word::parse(text, n).unwrap()
    }

    #[test]
    fn nielsen_moves() {
        let l = lambda(1, 2, 3).unwrap();
        assert_eq!(l.to_string(), "a1 -> a2 a1 ; a2 -> a2 ; a3 -> a3");
        assert_eq!(lambda(3, 1, 3).unwrap().image(3), &w("a1 a3", 3));
        assert_eq!(
            lambda(1, 1, 3),
            Err(Error::BadIndices {
                i: 1,
                j: 1,
                rank: 3
            })
        );
        assert!(lambda(1, 4, 3).is_err());
        let r = rho(1, 2, 3).unwrap();
        assert_eq!(r.image(1), &w("a1 a2", 3));
        assert_ne!(r, l);
        assert_eq!(r.abelianize(), l.abelianize());
    }

    #[test]
    fn sign_flips() {
        let e1 = eps(1, 3).unwrap();
        assert_eq!(e1.image(1), &w("a1'", 3));
        assert_eq!(eps(2, 3).unwrap().order_with_cap(5), Ok(2));
        let e2 = eps(2, 3).unwrap();
        assert_eq!(e1.compose(&e2).unwrap(), e2.compose(&e1).unwrap());
    }

    #[test]
    fn permutations() {
        let t = perm(&Perm::transposition(1, 2, 3).unwrap(), 3).unwrap();
        assert_eq!(t.to_string(), "a1 -> a2 ; a2 -> a1 ; a3 -> a3");
        assert!(perm(&Perm::identity(4), 4).unwrap().is_identity());
        let c = Perm::from_cycles(&[vec![1, 2, 3]], 3).unwrap();
        assert_eq!(perm(&c, 3).unwrap().order_with_cap(10), Ok(3));
        assert!(matches!(perm(&c, 4), Err(Error::RankMismatch { .. })));
        assert!(Perm::from_cycles(&[vec![1, 2], vec![2, 3]], 3).is_err());
        assert_eq!(c.to_string(), "(1 2 3)");
        assert_eq!(Perm::identity(3).to_string(), "()");
    }

    #[test]
    fn perm_composition_orientation() {
        let all = Perm::all(3);
        for p in &all {
            for q in &all {
                let composed = perm(p, 3).unwrap().compose(&perm(q, 3).unwrap()).unwrap();
                assert_eq!(composed, perm(&q.after(p), 3).unwrap());
                assert_eq!(composed, perm(&p.then(q), 3).unwrap());
            }
        }
    }

    #[test]
    fn specials() {
        let z = special(Special::Z, 3).unwrap();
        let chain = eps(1, 3)
            .unwrap()
            .compose(&eps(2, 3).unwrap())
            .unwrap()
            .compose(&eps(3, 3).unwrap())
            .unwrap();
        assert_eq!(z, chain);
        assert_eq!(
            special(Special::Alpha, 3).unwrap().order_with_cap(10),
            Ok(2)
        );
        assert_eq!(special(Special::Beta, 3).unwrap().order_with_cap(10), Ok(2));
        let theta = special(Special::Theta, 4).unwrap();
        assert_eq!(theta.image(1), &w("a1", 4));
        assert_eq!(theta.image(2), &w("a2", 4));
        assert_eq!(theta.image(3), &w("a2 a3", 4));
        assert_eq!(theta.image(4), &w("a2 a4", 4));
        assert!(matches!(
            special(Special::Alpha, 4),
            Err(Error::UnsupportedRank { .. })
        ));
        assert!(matches!(
            special(Special::Theta, 2),
            Err(Error::UnsupportedRank { .. })
        ));
        assert_eq!(
            special(Special::Iota, 3).unwrap(),
            perm(&Perm::transposition(1, 2, 3).unwrap(), 3).unwrap()
        );
        assert_eq!("theta".parse::<Special>().unwrap(), Special::Theta);
    }

    #[test]
    fn edge_permutations() {
        // tau fixing n+1 restricts to an ordinary permutation
        let tau = Perm::from_cycles(&[vec![1, 3, 2]], 4).unwrap();
        let sigma = Perm::from_cycles(&[vec![1, 3, 2]], 3).unwrap();
        assert_eq!(lemma3_embed(&tau, 3).unwrap(), perm(&sigma, 3).unwrap());

        let swap = Perm::transposition(1, 4, 4).unwrap();
        let f = lemma3_embed(&swap, 3).unwrap();
        assert_eq!(f.to_string(), "a1 -> a1' ; a2 -> a2 a1' ; a3 -> a3 a1'");
        assert_eq!(f.order_with_cap(10), Ok(2));
        assert!(lemma3_embed(&swap, 4).is_err());

        // alpha and beta are induced by double transpositions of the edges
        let a = Perm::from_cycles(&[vec![1, 4], vec![2, 3]], 4).unwrap();
        let b = Perm::from_cycles(&[vec![1, 3], vec![2, 4]], 4).unwrap();
        assert_eq!(
            lemma3_embed(&a, 3).unwrap(),
            special(Special::Alpha, 3).unwrap()
        );
        assert_eq!(
            lemma3_embed(&b, 3).unwrap(),
            special(Special::Beta, 3).unwrap()
        );
    }

    #[test]
    fn generator_rendering() {
        let g = Generator::Perm {
            cycles: vec![vec![1, 2], vec![3, 4]],
        };
        assert_eq!(g.to_string(), "p(1 2)(3 4)");
        assert_eq!(Generator::Lambda { i: 2, j: 1 }.to_string(), "l(2,1)");
        assert_eq!(
            Generator::Eps { i: 2 }.to_endo(3).unwrap(),
            eps(2, 3).unwrap()
        );
    }
}
