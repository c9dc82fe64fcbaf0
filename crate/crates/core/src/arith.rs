//! Small exact integer linear algebra on machine words.
//!
//! Geometry only ever touches tiny matrices (at most `n x n` with `n <= 6`)
//! whose entries are coordinate differences, so everything runs in `i128`
//! with checked operations. Overflow is reported, never wrapped.

use alloc::vec::Vec;

use crate::error::{Error, Result};

#[inline]
pub(crate) fn mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

#[inline]
pub(crate) fn sub(a: i128, b: i128) -> Result<i128> {
    a.checked_sub(b).ok_or(Error::Overflow)
}

#[inline]
pub(crate) fn add(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or(Error::Overflow)
}

pub(crate) fn to_i64(x: i128) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Overflow)
}

pub(crate) fn dot(a: &[i64], b: &[i64]) -> i128 {
    debug_assert_eq!(a.len(), b.len());
    // |a_i b_i| < 2^126 and the dimension is tiny, so the sum cannot overflow
    // unless coordinates approach i64::MAX, which the constructors reject.
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

pub(crate) fn vec_sub(a: &[i64], b: &[i64]) -> Result<Vec<i64>> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| x.checked_sub(y).ok_or(Error::Overflow))
        .collect()
}

pub(crate) fn vec_add(a: &[i64], b: &[i64]) -> Result<Vec<i64>> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| x.checked_add(y).ok_or(Error::Overflow))
        .collect()
}

pub(crate) fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Divides out the content; the zero vector is returned unchanged.
pub(crate) fn primitive(v: &[i128]) -> Result<Vec<i64>> {
    let g = v.iter().fold(0, |g, &x| gcd(g, x));
    if g == 0 {
        return v.iter().map(|&x| to_i64(x)).collect();
    }
    v.iter().map(|&x| to_i64(x / g)).collect()
}

/// Flips the sign so that the first nonzero entry is positive.
pub(crate) fn canonical_sign(v: &mut [i64]) {
    if let Some(&first) = v.iter().find(|&&x| x != 0) {
        if first < 0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Result of fraction-free row reduction.
pub(crate) struct Echelon {
    pub rank: usize,
    /// Column of each pivot, increasing.
    pub pivot_cols: Vec<usize>,
    /// Original indices of rows that were used as pivots; they are linearly
    /// independent and span the row space.
    pub pivot_rows: Vec<usize>,
}

/// Bareiss elimination with row pivoting. Every intermediate entry is a minor
/// of the input, so the divisions are exact.
pub(crate) fn echelon(rows: &[Vec<i64>], ncols: usize) -> Result<Echelon> {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut origin: Vec<usize> = (0..rows.len()).collect();
    let mut prev = 1i128;
    let mut r = 0;
    let mut pivot_cols = Vec::new();
    for col in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(r, p);
        origin.swap(r, p);
        let pivot = m[r][col];
        for i in r + 1..m.len() {
            let factor = m[i][col];
            for j in col + 1..ncols {
                let v = sub(mul(pivot, m[i][j])?, mul(factor, m[r][j])?)?;
                m[i][j] = v / prev;
            }
            m[i][col] = 0;
        }
        prev = pivot;
        pivot_cols.push(col);
        r += 1;
    }
    Ok(Echelon {
        rank: r,
        pivot_cols,
        pivot_rows: origin[..r].to_vec(),
    })
}

pub(crate) fn rank(rows: &[Vec<i64>], ncols: usize) -> Result<usize> {
    Ok(echelon(rows, ncols)?.rank)
}

/// Determinant of a square matrix.
pub(crate) fn det(rows: &[Vec<i128>]) -> Result<i128> {
    let n = rows.len();
    if n == 0 {
        return Ok(1);
    }
    let mut m = rows.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| m[i][k] != 0) else {
            return Ok(0);
        };
        if p != k {
            m.swap(p, k);
            sign = -sign;
        }
        let pivot = m[k][k];
        for i in k + 1..n {
            let factor = m[i][k];
            for j in k + 1..n {
                let v = sub(mul(pivot, m[i][j])?, mul(factor, m[k][j])?)?;
                m[i][j] = v / prev;
            }
            m[i][k] = 0;
        }
        prev = pivot;
    }
    mul(sign, m[n - 1][n - 1])
}

/// Solves `A x = b` for square invertible `A` by Cramer's rule, returning the
/// numerators and a positive common denominator. `None` when `A` is singular.
pub(crate) fn cramer(a: &[Vec<i128>], b: &[i128]) -> Result<Option<(Vec<i128>, i128)>> {
    let d = det(a)?;
    if d == 0 {
        return Ok(None);
    }
    let n = a.len();
    let mut nums = Vec::with_capacity(n);
    for i in 0..n {
        let replaced: Vec<Vec<i128>> = a
            .iter()
            .zip(b)
            .map(|(row, &bi)| {
                let mut r = row.clone();
                r[i] = bi;
                r
            })
            .collect();
        nums.push(det(&replaced)?);
    }
    if d < 0 {
        nums.iter_mut().for_each(|x| *x = -*x);
        Ok(Some((nums, -d)))
    } else {
        Ok(Some((nums, d)))
    }
}

/// One integer vector per non-pivot column spanning the kernel of `rows`
/// (as maps `Z^ncols -> Z^rows`), each made primitive.
pub(crate) fn kernel_basis(rows: &[Vec<i64>], ncols: usize) -> Result<Vec<Vec<i64>>> {
    let ech = echelon(rows, ncols)?;
    let block: Vec<Vec<i128>> = ech
        .pivot_rows
        .iter()
        .map(|&r| ech.pivot_cols.iter().map(|&c| rows[r][c] as i128).collect())
        .collect();
    let block_det = det(&block)?;
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !ech.pivot_cols.contains(c)) {
        let mut v = alloc::vec![0i128; ncols];
        v[free] = block_det;
        for (i, &c) in ech.pivot_cols.iter().enumerate() {
            let replaced: Vec<Vec<i128>> = block
                .iter()
                .zip(&ech.pivot_rows)
                .map(|(row, &r)| {
                    let mut row = row.clone();
                    row[i] = rows[r][free] as i128;
                    row
                })
                .collect();
            v[c] = -det(&replaced)?;
        }
        out.push(primitive(&v)?);
    }
    Ok(out)
}

pub(crate) fn ceil_div(a: i128, b: i128) -> i128 {
    debug_assert!(b > 0);
    -(-a).div_euclid(b)
}
