//! Endomorphisms of `F_n` given by the images of the basis.
//!
//! Endomorphisms act on the right: `compose(f, g)` is "apply `f`, then `g`",
//! so `apply(compose(f, g), w) == apply(g, apply(f, w))`. Commutators and
//! conjugations elsewhere in the crate are built on this order.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::nielsen;
use crate::word::{Letter, Word};

pub const DEFAULT_ORDER_CAP: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Endo {
    rank: usize,
    images: Vec<Word>,
}

impl Endo {
    pub fn identity(rank: usize) -> Endo {
        let images = (1..=rank)
            .map(|i| Word::reduce([Letter::gen(i)], rank).unwrap())
            .collect();
        Endo { rank, images }
    }

    /// Endomorphism sending `a_i` to `images[i - 1]`.
    pub fn from_images(images: Vec<Word>) -> Result<Endo> {
        let rank = images.len();
        if rank == 0 {
            return Err(Error::UnsupportedRank {
                name: "endomorphism".into(),
                rank: 0,
            });
        }
        if let Some(w) = images.iter().find(|w| w.rank() != rank) {
            return Err(Error::RankMismatch {
                left: rank,
                right: w.rank(),
            });
        }
        Ok(Endo { rank, images })
    }

    /// Parses `;`-separated image words, e.g. `"a2 a1; a2; a3"`. Each entry
    /// may carry an `a_i ->` prefix, which makes `Display` output reparse.
    pub fn parse_images(text: &str) -> Result<Endo> {
        let parts: Vec<&str> = text.split(';').collect();
        let rank = parts.len();
        let images = parts
            .iter()
            .map(|p| {
                let body = p.split_once("->").map_or(*p, |(_, rhs)| rhs);
                Word::parse(body, rank)
            })
            .collect::<Result<Vec<_>>>()?;
        Endo::from_images(images)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    /// Image of `a_i` (1-based).
    pub fn image(&self, i: usize) -> &Word {
        &self.images[i - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(k, w)| w.as_letter() == Some(Letter::gen(k + 1)))
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        if w.rank() != self.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: w.rank(),
            });
        }
        Ok(self.apply_unchecked(w))
    }

    fn apply_unchecked(&self, w: &Word) -> Word {
        let mut raw = Vec::new();
        for l in w.letters() {
            let image = &self.images[l.index() - 1];
            if l.is_inverse() {
                raw.extend(image.letters().iter().rev().map(|x| x.inverted()));
            } else {
                raw.extend_from_slice(image.letters());
            }
        }
        Word::reduce(raw, self.rank).expect("image letters lie in the rank")
    }

    /// `self` then `other`.
    pub fn compose(&self, other: &Endo) -> Result<Endo> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        let images = self
            .images
            .iter()
            .map(|w| other.apply_unchecked(w))
            .collect();
        Ok(Endo {
            rank: self.rank,
            images,
        })
    }

    /// `k`-fold composite; negative `k` needs an automorphism.
    pub fn power(&self, k: i64) -> Result<Endo> {
        let base = if k < 0 {
            nielsen::inverse(self)?
        } else {
            self.clone()
        };
        let mut result = Endo::identity(self.rank);
        let mut square = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = result.compose(&square)?;
            }
            e >>= 1;
            if e > 0 {
                square = square.compose(&square)?;
            }
        }
        Ok(result)
    }

    /// Row `i` holds the exponent sums of the image of `a_i`, so that
    /// `abelianize(compose(f, g)) == abelianize(f) * abelianize(g)`.
    pub fn abelianize(&self) -> IntMatrix {
        let rows = self.images.iter().map(Word::exponent_sums).collect();
        IntMatrix::from_rows(rows).expect("square by construction")
    }

    /// Least `k <= cap` with `f^k = 1`.
    ///
    /// The kernel of abelianization is torsion-free, so a finite order of `f`
    /// equals the order of its matrix. The matrix is checked first; this
    /// keeps infinite-order inputs from growing words up to the cap.
    pub fn order_with_cap(&self, cap: u64) -> Result<u64> {
        let k = self.abelianize().order_with_cap(cap)?;
        let mut power = self.clone();
        for step in 1..=k {
            if power.is_identity() {
                return Ok(step);
            }
            if step < k {
                power = power.compose(self)?;
            }
        }
        Err(Error::OrderCapExceeded { cap })
    }
}

impl fmt::Display for Endo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, w) in self.images.iter().enumerate() {
            if k > 0 {
                f.write_str(" ; ")?;
            }
            write!(f, "a{} -> {}", k + 1, w)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{eps, lambda, rho};

    fn w(text: &str) -> Word {
        Word::parse(text, 3).unwrap()
    }

    #[test]
    fn apply_examples() {
        assert_eq!(
            lambda(1, 2, 3).unwrap().apply(&w("a1")).unwrap(),
            w("a2 a1")
        );
        assert_eq!(Endo::identity(3).apply(&w("a2 a1'")).unwrap(), w("a2 a1'"));
        assert_eq!(eps(1, 3).unwrap().apply(&w("a1 a2")).unwrap(), w("a1' a2"));
        let other = Word::parse("a1", 4).unwrap();
        assert!(matches!(
            Endo::identity(3).apply(&other),
            Err(Error::RankMismatch { .. })
        ));
    }

    #[test]
    fn compose_examples() {
        let l12 = lambda(1, 2, 3).unwrap();
        let l12_inv = Endo::parse_images("a2' a1; a2; a3").unwrap();
        assert!(l12.compose(&l12_inv).unwrap().is_identity());
        let l23 = lambda(2, 3, 3).unwrap();
        // a1 -> a2 a1 -> a3 a2 a1
        assert_eq!(l12.compose(&l23).unwrap().image(1), &w("a3 a2 a1"));
        let e1 = eps(1, 3).unwrap();
        assert!(e1.compose(&e1).unwrap().is_identity());
        assert!(l12.compose(&Endo::identity(4)).is_err());
    }

    #[test]
    fn power_examples() {
        let l12 = lambda(1, 2, 3).unwrap();
        assert_eq!(l12.power(3).unwrap().image(1), &w("a2 a2 a2 a1"));
        assert_eq!(l12.power(-2).unwrap().image(1), &w("a2' a2' a1"));
        assert!(l12.power(0).unwrap().is_identity());
        assert!(eps(1, 3).unwrap().power(2).unwrap().is_identity());
        let collapse = Endo::parse_images("a2; a2; a3").unwrap();
        assert_eq!(collapse.power(-1), Err(Error::NotAnAutomorphism));
    }

    #[test]
    fn equality_examples() {
        let l12 = lambda(1, 2, 3).unwrap();
        let r12 = rho(1, 2, 3).unwrap();
        let lr = l12.compose(&r12).unwrap();
        assert_eq!(lr, r12.compose(&l12).unwrap());
        assert_eq!(lr.image(1), &w("a2 a1 a2"));
        assert_ne!(l12, lambda(2, 1, 3).unwrap());
        assert_eq!(Endo::identity(3), Endo::identity(3));
    }

    #[test]
    fn abelianize_examples() {
        assert_eq!(
            lambda(1, 2, 3).unwrap().abelianize(),
            IntMatrix::elementary(1, 2, 1, 3).unwrap()
        );
        assert!(Endo::identity(3).abelianize().is_identity());
        assert_eq!(
            eps(1, 3).unwrap().abelianize().rows(),
            vec![vec![-1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]
        );
    }

    #[test]
    fn order_examples() {
        assert_eq!(eps(1, 3).unwrap().order_with_cap(10), Ok(2));
        assert_eq!(
            lambda(1, 2, 3).unwrap().order_with_cap(100),
            Err(Error::OrderCapExceeded { cap: 100 })
        );
        assert_eq!(Endo::identity(2).order_with_cap(1), Ok(1));
        // IA element: identity matrix, infinite order
        let l12 = lambda(1, 2, 3).unwrap();
        let r12_inv = Endo::parse_images("a1 a2'; a2; a3").unwrap();
        let ia = l12.compose(&r12_inv).unwrap();
        assert!(ia.abelianize().is_identity());
        assert!(!ia.is_identity());
        assert_eq!(
            ia.order_with_cap(50),
            Err(Error::OrderCapExceeded { cap: 50 })
        );
    }

    #[test]
    fn display_and_parse() {
        let l12 = lambda(1, 2, 3).unwrap();
        assert_eq!(l12.to_string(), "a1 -> a2 a1 ; a2 -> a2 ; a3 -> a3");
        assert_eq!(Endo::parse_images(&l12.to_string()).unwrap(), l12);
        assert_eq!(Endo::parse_images("a2 a1 ; a2 ; a3").unwrap(), l12);
    }
}
