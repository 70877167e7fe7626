//! Integer row reduction without fractions.
//!
//! Rows are kept in reduced echelon form with integer entries; after every
//! combination the row is divided by the gcd of its entries, which keeps the
//! numbers close to the size of the final normal vectors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{reduce_vector, ExponentVector, SimplexContext, WeightVector};

/// Widest row handled by [`Echelon`]: forms in at most 8 variables.
pub const MAX_COLS: usize = 8;

/// Reduced integer echelon form of at most `MAX_COLS` rows, built one row at
/// a time. Copying it is cheap, which is what the depth-first subset search
/// relies on.
#[derive(Clone, Copy, Debug)]
pub struct Echelon {
    cols: usize,
    len: usize,
    rows: [[i64; MAX_COLS]; MAX_COLS],
    pivots: [usize; MAX_COLS],
}

fn normalize_row(row: &mut [i64]) {
    let g = row.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g > 1 {
        row.iter_mut().for_each(|x| *x /= g);
    }
}

impl Echelon {
    pub fn new(cols: usize) -> Self {
        assert!(cols <= MAX_COLS, "at most {MAX_COLS} columns");
        Echelon { cols, len: 0, rows: [[0; MAX_COLS]; MAX_COLS], pivots: [0; MAX_COLS] }
    }

    pub fn rank(&self) -> usize {
        self.len
    }

    /// Reduces `v` against the current rows. Returns the pivot column of the
    /// remainder, or `None` when `v` lies in the row span.
    fn reduce(&self, v: &mut [i64; MAX_COLS]) -> Option<usize> {
        for r in 0..self.len {
            let p = self.pivots[r];
            let c = v[p];
            if c != 0 {
                let a = self.rows[r][p];
                let g = a.gcd(&c);
                let (fa, fc) = (a / g, c / g);
                for j in 0..self.cols {
                    v[j] = v[j] * fa - self.rows[r][j] * fc;
                }
                normalize_row(&mut v[..self.cols]);
            }
        }
        (0..self.cols).find(|&j| v[j] != 0)
    }

    /// Adds a row; returns false (leaving `self` untouched) if it is dependent.
    pub fn push(&mut self, row: &[i64]) -> bool {
        debug_assert_eq!(row.len(), self.cols);
        let mut v = [0i64; MAX_COLS];
        v[..self.cols].copy_from_slice(row);
        let Some(p) = self.reduce(&mut v) else {
            return false;
        };
        if v[p] < 0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        for r in 0..self.len {
            let c = self.rows[r][p];
            if c != 0 {
                let g = v[p].gcd(&c);
                let (fa, fc) = (v[p] / g, c / g);
                for j in 0..self.cols {
                    self.rows[r][j] = self.rows[r][j] * fa - v[j] * fc;
                }
                normalize_row(&mut self.rows[r][..self.cols]);
            }
        }
        self.rows[self.len] = v;
        self.pivots[self.len] = p;
        self.len += 1;
        true
    }

    /// For a form of rank `cols - 1`, the primitive integer generator of the
    /// one-dimensional kernel (sign unspecified).
    pub fn kernel_line(&self) -> Option<[i64; MAX_COLS]> {
        if self.len + 1 != self.cols {
            return None;
        }
        let mut is_pivot = [false; MAX_COLS];
        for r in 0..self.len {
            is_pivot[self.pivots[r]] = true;
        }
        let free = (0..self.cols).find(|&j| !is_pivot[j])?;
        let l = (0..self.len).fold(1i64, |l, r| l.lcm(&self.rows[r][self.pivots[r]]));
        let mut out = [0i64; MAX_COLS];
        out[free] = l;
        for r in 0..self.len {
            let p = self.pivots[r];
            out[p] = -self.rows[r][free] * (l / self.rows[r][p]);
        }
        normalize_row(&mut out[..self.cols]);
        Some(out)
    }
}

/// Rank of an integer matrix given by rows.
pub fn rank(rows: &[Vec<BigInt>], cols: usize) -> usize {
    rref(rows, cols).0.len()
}

/// Fraction-free reduced echelon form: returns the nonzero rows and their
/// pivot columns.
pub fn rref(rows: &[Vec<BigInt>], cols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let mut out: Vec<Vec<BigInt>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for row in rows {
        let mut v = row.clone();
        for (r, &p) in out.iter().zip(&pivots) {
            if !v[p].is_zero() {
                let g = r[p].gcd(&v[p]);
                let fa = &r[p] / &g;
                let fc = &v[p] / &g;
                for j in 0..cols {
                    v[j] = &v[j] * &fa - &r[j] * &fc;
                }
                normalize_big(&mut v);
            }
        }
        let Some(p) = (0..cols).find(|&j| !v[j].is_zero()) else {
            continue;
        };
        if v[p].is_negative() {
            v.iter_mut().for_each(|x| *x = -x.clone());
        }
        for r in out.iter_mut() {
            if !r[p].is_zero() {
                let g = v[p].gcd(&r[p]);
                let fa = &v[p] / &g;
                let fc = &r[p] / &g;
                for j in 0..cols {
                    r[j] = &r[j] * &fa - &v[j] * &fc;
                }
                normalize_big(r);
            }
        }
        out.push(v);
        pivots.push(p);
    }
    (out, pivots)
}

fn normalize_big(v: &mut [BigInt]) {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g > BigInt::from(1) {
        v.iter_mut().for_each(|x| *x = &*x / &g);
    }
}

/// Integer basis of the right kernel, one primitive vector per free column.
pub fn kernel_basis(rows: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    let (red, pivots) = rref(rows, cols);
    let mut basis = Vec::new();
    for free in (0..cols).filter(|j| !pivots.contains(j)) {
        let l = red
            .iter()
            .zip(&pivots)
            .fold(BigInt::from(1), |l, (r, &p)| if r[free].is_zero() { l } else { l.lcm(&r[p]) });
        let mut v = vec![BigInt::zero(); cols];
        v[free] = l.clone();
        for (r, &p) in red.iter().zip(&pivots) {
            v[p] = -(&r[free] * &l / &r[p]);
        }
        normalize_big(&mut v);
        basis.push(v);
    }
    basis
}

/// Reduced normal of the hyperplane spanned by `points` and the barycenter,
/// if that span has dimension `n`.
pub fn normal_through(ctx: &SimplexContext, points: &[ExponentVector]) -> Result<Option<WeightVector>> {
    let cols = ctx.nvars();
    if points.len() + 2 != cols {
        return Err(Error::LengthMismatch { expected: cols - 2, got: points.len() });
    }
    for p in points {
        ctx.index_of_checked(&p.0)?;
    }
    let mut rows: Vec<Vec<BigInt>> = vec![vec![BigInt::from(1); cols]];
    rows.extend(points.iter().map(|p| p.0.iter().map(|&e| BigInt::from(e)).collect()));
    let kernel = kernel_basis(&rows, cols);
    if kernel.len() != 1 {
        return Ok(None);
    }
    let v: Vec<i64> = kernel[0]
        .iter()
        .map(|x| i64::try_from(x).map_err(|_| Error::Internal("normal vector overflow".into())))
        .collect::<Result<_>>()?;
    reduce_vector(&v).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_simplex;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn fermat_points_normal() {
        let ctx = build_simplex(6, 3).unwrap();
        let pts: Vec<_> = (1..=5)
            .map(|k| {
                let mut e = vec![0u32; 7];
                e[k] = 3;
                ExponentVector(e)
            })
            .collect();
        let r = normal_through(&ctx, &pts).unwrap().unwrap();
        assert_eq!(r.weights(), &[1, 0, 0, 0, 0, 0, -1]);
    }

    #[test]
    fn rank_deficient_points_give_nothing() {
        let ctx = build_simplex(6, 3).unwrap();
        let pts: Vec<_> = [[3, 0, 0], [2, 1, 0], [1, 2, 0], [0, 3, 0], [2, 0, 1]]
            .iter()
            .map(|h| {
                let mut e = vec![0u32; 7];
                e[..3].copy_from_slice(h);
                ExponentVector(e)
            })
            .collect();
        assert!(normal_through(&ctx, &pts).unwrap().is_none());
    }

    #[test]
    fn wrong_point_count_rejected() {
        let ctx = build_simplex(6, 3).unwrap();
        assert!(normal_through(&ctx, &[]).is_err());
    }

    #[test]
    fn echelon_matches_bigint_kernel() {
        let rows: [&[i64]; 3] = [&[1, 1, 1, 1], &[3, 0, 0, 0], &[0, 2, 1, 0]];
        let mut e = Echelon::new(4);
        for r in rows {
            assert!(e.push(r));
        }
        assert!(!e.push(&[4, 1, 1, 1]));
        let k = e.kernel_line().unwrap();
        let kb = kernel_basis(&big(&rows), 4);
        assert_eq!(kb.len(), 1);
        let kb: Vec<i64> = kb[0].iter().map(|x| i64::try_from(x).unwrap()).collect();
        assert!(k[..4] == kb[..] || k[..4].iter().zip(&kb).all(|(a, b)| *a == -b));
        for r in rows {
            assert_eq!(r.iter().zip(&k).map(|(a, b)| a * b).sum::<i64>(), 0);
        }
    }

    #[test]
    fn rank_counts_independent_rows() {
        let m = big(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(rank(&m, 3), 2);
        assert_eq!(kernel_basis(&m, 3).len(), 1);
    }
}
