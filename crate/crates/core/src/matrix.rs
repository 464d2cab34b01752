//! Exact integer matrices for images in `GL(n, Z)` and their mod-`m`
//! reductions. All arithmetic is checked; overflow is an error, never a wrap.

use std::fmt;

use serde::Serialize;

use crate::endo::Endo;
use crate::error::{Error, Result};

/// Square integer matrix, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntMatrix {
    n: usize,
    entries: Vec<i64>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> IntMatrix {
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        IntMatrix { n, entries }
    }

    pub fn zero(n: usize) -> IntMatrix {
        IntMatrix {
            n,
            entries: vec![0; n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<IntMatrix> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    left: n,
                    right: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(IntMatrix { n, entries })
    }

    /// `I + c E_ij` with 1-based `i`, `j`.
    pub fn elementary(i: usize, j: usize, c: i64, n: usize) -> Result<IntMatrix> {
        if i == 0 || j == 0 || i > n || j > n {
            return Err(Error::BadIndices { i, j, rank: n });
        }
        let mut m = IntMatrix::identity(n);
        let slot = &mut m.entries[(i - 1) * n + (j - 1)];
        *slot = slot.checked_add(c).ok_or(Error::Overflow)?;
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry at 0-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> i64 {
        self.entries[row * self.n + col]
    }

    pub(crate) fn set(&mut self, row: usize, col: usize, value: i64) {
        self.entries[row * self.n + col] = value;
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries
            .chunks(self.n.max(1))
            .map(<[i64]>::to_vec)
            .take(self.n)
            .collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zero(self.n);
        for r in 0..self.n {
            for c in 0..self.n {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn is_identity(&self) -> bool {
        *self == IntMatrix::identity(self.n)
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let n = self.n;
        let mut out = IntMatrix::zero(n);
        for r in 0..n {
            for c in 0..n {
                let mut acc: i64 = 0;
                for k in 0..n {
                    let term = self
                        .get(r, k)
                        .checked_mul(other.get(k, c))
                        .ok_or(Error::Overflow)?;
                    acc = acc.checked_add(term).ok_or(Error::Overflow)?;
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    /// Non-negative power by repeated squaring.
    pub fn pow(&self, k: u64) -> Result<IntMatrix> {
        let mut result = IntMatrix::identity(self.n);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<i64> {
        let n = self.n;
        if n == 0 {
            return Ok(1);
        }
        let mut a: Vec<Vec<i128>> = self
            .rows()
            .into_iter()
            .map(|row| row.into_iter().map(i128::from).collect())
            .collect();
        let mut sign: i128 = 1;
        let mut prev: i128 = 1;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&r| a[r][k] != 0) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return Ok(0),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a[i][j]
                        .checked_mul(a[k][k])
                        .and_then(|x| a[i][k].checked_mul(a[k][j]).and_then(|y| x.checked_sub(y)))
                        .ok_or(Error::Overflow)?;
                    // exact by Sylvester's identity
                    a[i][j] = num / prev;
                }
                a[i][k] = 0;
            }
            prev = a[k][k];
        }
        let d = sign * a[n - 1][n - 1];
        i64::try_from(d).map_err(|_| Error::Overflow)
    }

    pub fn mod_reduce(&self, modulus: i64) -> Result<ModMatrix> {
        if modulus < 2 {
            return Err(Error::InvalidModulus(modulus));
        }
        Ok(ModMatrix {
            n: self.n,
            modulus,
            entries: self.entries.iter().map(|x| x.rem_euclid(modulus)).collect(),
        })
    }

    /// Least `k <= cap` with `A^k = I`. Entry overflow means the powers are
    /// unbounded, which finite-order matrices never are.
    pub fn order_with_cap(&self, cap: u64) -> Result<u64> {
        let mut power = self.clone();
        for k in 1..=cap {
            if power.is_identity() {
                return Ok(k);
            }
            if k == cap {
                break;
            }
            power = match power.mul(self) {
                Ok(p) => p,
                Err(Error::Overflow) => break,
                Err(e) => return Err(e),
            };
        }
        Err(Error::OrderCapExceeded { cap })
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_rows(f, &self.rows())
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(serializer)
    }
}

fn write_rows(f: &mut fmt::Formatter<'_>, rows: &[Vec<i64>]) -> fmt::Result {
    let width = rows
        .iter()
        .flatten()
        .map(|x| x.to_string().len())
        .max()
        .unwrap_or(1);
    for (r, row) in rows.iter().enumerate() {
        if r > 0 {
            writeln!(f)?;
        }
        f.write_str("[")?;
        for (c, x) in row.iter().enumerate() {
            if c > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{x:>width$}")?;
        }
        f.write_str("]")?;
    }
    Ok(())
}

/// Square matrix over `Z/mZ`, entries kept in `0..m`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModMatrix {
    n: usize,
    modulus: i64,
    entries: Vec<i64>,
}

impl ModMatrix {
    pub fn identity(n: usize, modulus: i64) -> Result<ModMatrix> {
        IntMatrix::identity(n).mod_reduce(modulus)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    pub fn get(&self, row: usize, col: usize) -> i64 {
        self.entries[row * self.n + col]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries
            .chunks(self.n.max(1))
            .map(<[i64]>::to_vec)
            .take(self.n)
            .collect()
    }

    pub fn mul(&self, other: &ModMatrix) -> Result<ModMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        if self.modulus != other.modulus {
            return Err(Error::InvalidModulus(other.modulus));
        }
        let n = self.n;
        let m = i128::from(self.modulus);
        let mut entries = vec![0; n * n];
        for r in 0..n {
            for c in 0..n {
                let acc: i128 = (0..n)
                    .map(|k| i128::from(self.get(r, k)) * i128::from(other.get(k, c)) % m)
                    .sum();
                entries[r * n + c] = (acc % m) as i64;
            }
        }
        Ok(ModMatrix {
            n,
            modulus: self.modulus,
            entries,
        })
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|r| (0..self.n).all(|c| self.get(r, c) == i64::from(r == c)))
    }

    /// Invertible iff the determinant of any integer lift is a unit mod `m`.
    pub fn is_invertible(&self) -> Result<bool> {
        let lift = IntMatrix {
            n: self.n,
            entries: self.entries.clone(),
        };
        let d = lift.det()?.rem_euclid(self.modulus);
        Ok(gcd(d, self.modulus) == 1)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_rows(f, &self.rows())
    }
}

impl Serialize for ModMatrix {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(serializer)
    }
}

/// `det(abelianize(f))`, the sign homomorphism `Aut(F_n) -> {+1, -1}`.
pub fn det_sign_map(f: &Endo) -> Result<i64> {
    let det = f.abelianize().det()?;
    if det.abs() != 1 {
        return Err(Error::NotUnimodular { det });
    }
    Ok(det)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cofactor_det(rows: &[Vec<i64>]) -> i64 {
        let n = rows.len();
        if n == 0 {
            return 1;
        }
        (0..n)
            .map(|c| {
                let minor: Vec<Vec<i64>> = rows[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|&(k, _)| k != c)
                            .map(|(_, &x)| x)
                            .collect()
                    })
                    .collect();
                let s = if c % 2 == 0 { 1 } else { -1 };
                s * rows[0][c] * cofactor_det(&minor)
            })
            .sum()
    }

    #[test]
    fn elementary_and_mul() {
        let e = IntMatrix::elementary(2, 1, 2, 3).unwrap();
        assert_eq!(e.rows(), vec![vec![1, 0, 0], vec![2, 1, 0], vec![0, 0, 1]]);
        assert_eq!(e.mul(&IntMatrix::identity(3)).unwrap(), e);
        let u = IntMatrix::elementary(1, 2, 1, 3).unwrap();
        assert_eq!(
            u.mul(&u).unwrap(),
            IntMatrix::elementary(1, 2, 2, 3).unwrap()
        );
        assert!(matches!(
            u.mul(&IntMatrix::identity(2)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(IntMatrix::elementary(4, 1, 1, 3).is_err());
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        let samples = vec![
            vec![vec![2, -1, 0], vec![1, 3, 4], vec![0, 5, -2]],
            vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]],
            vec![
                vec![0, 0, 1, 2],
                vec![3, 0, 0, 1],
                vec![1, 1, 0, 0],
                vec![2, 0, 5, 7],
            ],
            vec![vec![1, 2], vec![2, 4]],
        ];
        for rows in samples {
            let m = IntMatrix::from_rows(rows.clone()).unwrap();
            assert_eq!(m.det().unwrap(), cofactor_det(&rows), "{rows:?}");
        }
        assert_eq!(IntMatrix::identity(4).det().unwrap(), 1);
    }

    #[test]
    fn overflow_is_reported() {
        let big = IntMatrix::from_rows(vec![vec![i64::MAX, 0], vec![0, 1]]).unwrap();
        assert_eq!(big.mul(&big), Err(Error::Overflow));
    }

    #[test]
    fn mod_reduction() {
        let m = IntMatrix::from_rows(vec![vec![-1, 2], vec![3, 1]]).unwrap();
        let r = m.mod_reduce(2).unwrap();
        assert_eq!(r.rows(), vec![vec![1, 0], vec![1, 1]]);
        assert!(IntMatrix::identity(3).mod_reduce(5).unwrap().is_identity());
        assert_eq!(m.mod_reduce(1), Err(Error::InvalidModulus(1)));
        assert!(r.is_invertible().unwrap());
        let singular = IntMatrix::from_rows(vec![vec![1, 1], vec![1, 1]])
            .unwrap()
            .mod_reduce(2)
            .unwrap();
        assert!(!singular.is_invertible().unwrap());
    }

    #[test]
    fn matrix_orders() {
        let e = IntMatrix::elementary(2, 1, 2, 3).unwrap();
        assert_eq!(
            e.order_with_cap(100),
            Err(Error::OrderCapExceeded { cap: 100 })
        );
        assert_eq!(IntMatrix::identity(3).order_with_cap(10), Ok(1));
        let swap = IntMatrix::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(swap.order_with_cap(10), Ok(2));
        assert_eq!(
            swap.order_with_cap(1),
            Err(Error::OrderCapExceeded { cap: 1 })
        );
        let hyperbolic = IntMatrix::from_rows(vec![vec![2, 1], vec![1, 1]]).unwrap();
        assert!(matches!(
            hyperbolic.order_with_cap(10_000),
            Err(Error::OrderCapExceeded { .. })
        ));
    }

    #[test]
    fn rendering() {
        let m = IntMatrix::from_rows(vec![vec![1, -2], vec![0, 1]]).unwrap();
        assert_eq!(m.to_string(), "[ 1 -2]\n[ 0  1]");
        assert_eq!(serde_json::to_string(&m).unwrap(), "[[1,-2],[0,1]]");
    }
}
