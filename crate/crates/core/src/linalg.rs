//! Dense exact linear algebra over `ℚ` and `𝔽_p`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Row-major matrix over `ℚ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigRational::one();
        }
        m
    }

    /// Matrix whose `j`-th column is `cols[j]`.
    pub fn from_columns(nrows: usize, cols: &[Vec<BigRational>]) -> Self {
        let mut m = Self::zeros(nrows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), nrows);
            for (i, x) in c.iter().enumerate() {
                m.data[i * cols.len() + j] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigRational) {
        self.data[i * self.cols + j] = x;
    }

    pub fn column(&self, j: usize) -> Vec<BigRational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows)
                .all(|i| (0..self.cols).all(|j| *self.get(i, j) == BigRational::from_integer((i == j).into())))
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(p, r);
            let inv = self.get(r, c).recip();
            for j in c..self.cols {
                let x = self.get(r, j) * &inv;
                self.set(r, j, x);
            }
            for i in 0..self.rows {
                if i == r || self.get(i, c).is_zero() {
                    continue;
                }
                let f = self.get(i, c).clone();
                for j in c..self.cols {
                    let x = self.get(r, j);
                    if x.is_zero() {
                        continue;
                    }
                    let y = self.get(i, j) - &f * x;
                    self.set(i, j, y);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// `X` with `self·X = rhs`, or `None` if `self` is singular.
    pub fn solve(&self, rhs: &RatMatrix) -> Option<RatMatrix> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(self.rows, rhs.rows);
        let n = self.rows;
        let w = n + rhs.cols;
        let mut aug = RatMatrix::zeros(n, w);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            for j in 0..rhs.cols {
                aug.set(i, n + j, rhs.get(i, j).clone());
            }
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut out = RatMatrix::zeros(n, rhs.cols);
        for i in 0..n {
            for j in 0..rhs.cols {
                out.set(i, j, aug.get(i, n + j).clone());
            }
        }
        Some(out)
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        self.solve(&RatMatrix::identity(self.rows))
    }
}

/// `x mod p` for a rational whose denominator is prime to `p`.
pub fn rational_mod_p(x: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let num = x.numer().mod_floor(&pb).to_u64()?;
    let den = x.denom().mod_floor(&pb).to_u64()?;
    if den == 0 {
        return None;
    }
    Some(mul_mod(num, inv_mod(den, p), p))
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let e = BigInt::from(a).extended_gcd(&BigInt::from(p));
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(&BigInt::from(p)).to_u64().expect("reduced")
}

/// Rank over `𝔽_p` of the given rows.
pub fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) = (r..rows.len()).find(|&i| !rows[i][c].is_multiple_of(p)) else {
            continue;
        };
        rows.swap(piv, r);
        let inv = inv_mod(rows[r][c] % p, p);
        for x in rows[r].iter_mut() {
            *x = mul_mod(*x % p, inv, p);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c] % p == 0 {
                continue;
            }
            let f = row[c] % p;
            for (x, y) in row.iter_mut().zip(&pivot_row).skip(c) {
                *x = (*x % p + p - mul_mod(f, *y, p)) % p;
            }
        }
        r += 1;
    }
    r
}

/// The Mersenne prime `2^61 - 1`.
pub const DEFAULT_PRIME: u64 = (1 << 61) - 1;

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn mat(rows: &[&[i64]]) -> RatMatrix {
        let cols: Vec<Vec<BigRational>> =
            (0..rows[0].len()).map(|j| rows.iter().map(|row| r(row[j])).collect()).collect();
        RatMatrix::from_columns(rows.len(), &cols)
    }

    #[test]
    fn inverse_round_trip() {
        let m = mat(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert!(inv.mul(&m).is_identity());
    }

    #[test]
    fn singular_has_no_inverse() {
        let m = mat(&[&[1, 2], &[2, 4]]);
        assert!(m.inverse().is_none());
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn solve_matches_product() {
        let m = mat(&[&[1, 2], &[3, 5]]);
        let b = mat(&[&[1, 0, 7], &[0, 1, -2]]);
        let x = m.solve(&b).unwrap();
        assert_eq!(m.mul(&x), b);
    }

    #[test]
    fn rank_mod_p_agrees_with_rational_rank() {
        let m = mat(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        let rows = (0..3).map(|i| (0..3).map(|j| rational_mod_p(m.get(i, j), 101).unwrap()).collect()).collect();
        assert_eq!(rank_mod_p(rows, 101), m.rank());
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn rational_reduction_inverts_denominators() {
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(rational_mod_p(&half, 7), Some(4));
        assert_eq!(rational_mod_p(&-r(1), 7), Some(6));
        assert_eq!(rational_mod_p(&BigRational::new(1.into(), 7.into()), 7), None);
    }
}
