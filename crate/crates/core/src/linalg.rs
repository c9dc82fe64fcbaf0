//! Exact rank of integer matrices.
//!
//! Small matrices, and matrices with huge entries, go through Bareiss
//! fraction-free elimination. Larger ones use a certified modular route:
//! elimination modulo a word-sized prime `p` yields `r` pivot rows whose
//! `r x r` pivot block is nonsingular mod `p`, hence over `Q`, so the rank is
//! at least `r`. Every remaining row is then written as a rational combination
//! of the pivot rows by `p`-adic lifting, and the combination is checked
//! exactly over `Z`, so the rank is at most `r`. An unlucky prime only
//! makes the check fail and another prime is tried.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense integer matrix in row-major order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c).clone());
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Bit length of the largest absolute entry.
    pub fn max_entry_bits(&self) -> u64 {
        self.data.iter().map(|x| x.abs().bits()).max().unwrap_or(0)
    }

    fn to_small(&self) -> Option<SmallMatrix> {
        let data = self
            .data
            .iter()
            .map(|x| x.to_i64().filter(|v| v.unsigned_abs() <= SMALL_ENTRY_LIMIT))
            .collect::<Option<Vec<_>>>()?;
        Some(SmallMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }
}

/// Entries up to this size take the modular route; products with residues
/// below `2^31` then stay far inside `i128`.
const SMALL_ENTRY_LIMIT: u64 = 1 << 40;

/// Matrices whose shorter side is at most this go straight to Bareiss.
const BAREISS_CUTOFF: usize = 24;

/// Primes tried by the modular route before falling back to Bareiss.
const MODULAR_ATTEMPTS: usize = 4;

#[derive(Clone, Debug)]
struct SmallMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl SmallMatrix {
    fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    fn row(&self, r: usize) -> &[i64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c));
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }
}

/// Rank over the rationals.
pub fn exact_rank(m: &IntMatrix) -> usize {
    if m.rows.min(m.cols) == 0 || m.data.iter().all(Zero::is_zero) {
        return 0;
    }
    if m.rows.min(m.cols) <= BAREISS_CUTOFF {
        return bareiss_rank(m);
    }
    let Some(small) = m.to_small() else {
        return bareiss_rank(m);
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x7261_6e6b ^ ((m.rows as u64) << 32) ^ m.cols as u64);
    for _ in 0..MODULAR_ATTEMPTS {
        let p = random_prime(&mut rng);
        if let Some(r) = certified_rank(&small, p) {
            return r;
        }
    }
    bareiss_rank(m)
}

/// Rank over the rationals by Bareiss fraction-free elimination.
///
/// After `k` pivots every remaining entry is a `(k+1) x (k+1)` minor of the
/// input, so the division by the previous pivot is exact.
pub fn bareiss_rank(m: &IntMatrix) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    // Eliminate along the shorter side.
    let t = if m.rows <= m.cols { None } else { Some(m.transpose()) };
    let src = t.as_ref().unwrap_or(m);
    let mut a: Vec<Vec<BigInt>> = src
        .data
        .chunks(src.cols)
        .map(<[BigInt]>::to_vec)
        .collect();
    let ncols = src.cols;
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == a.len() {
            break;
        }
        // Smallest nonzero entry as pivot keeps intermediate products small.
        let pivot_row = (rank..a.len())
            .filter(|&i| !a[i][col].is_zero())
            .min_by_key(|&i| a[i][col].bits());
        let Some(p) = pivot_row else { continue };
        a.swap(rank, p);
        let (head, tail) = a.split_at_mut(rank + 1);
        let pivot_vec = &head[rank];
        let pivot = pivot_vec[col].clone();
        for row in tail.iter_mut() {
            let factor = core::mem::take(&mut row[col]);
            for j in col + 1..ncols {
                let mut v = &row[j] * &pivot;
                if !factor.is_zero() && !pivot_vec[j].is_zero() {
                    v -= &factor * &pivot_vec[j];
                }
                row[j] = if prev.is_one() { v } else { v / &prev };
            }
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

/// Arithmetic modulo a prime below `2^32`, with Barrett reduction.
#[derive(Clone, Copy, Debug)]
struct Modulus {
    p: u64,
    m: u64,
}

impl Modulus {
    fn new(p: u64) -> Self {
        assert!((2..1 << 32).contains(&p), "modulus out of range");
        Self {
            p,
            m: u64::MAX / p,
        }
    }

    #[inline]
    fn reduce(self, x: u64) -> u64 {
        let q = ((x as u128 * self.m as u128) >> 64) as u64;
        let mut r = x - q * self.p;
        while r >= self.p {
            r -= self.p;
        }
        r
    }

    #[inline]
    fn mul(self, a: u64, b: u64) -> u64 {
        self.reduce(a * b)
    }

    #[inline]
    fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    fn inv(self, a: u64) -> u64 {
        self.pow(a, self.p - 2)
    }

    fn reduce_i64(self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    fn reduce_i128(self, x: i128) -> u64 {
        x.rem_euclid(self.p as i128) as u64
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A uniformly random prime in `(2^30, 2^31)`.
pub fn random_prime(rng: &mut impl Rng) -> u64 {
    loop {
        let candidate = rng.gen_range((1u64 << 30) + 1..(1u64 << 31)) | 1;
        if is_prime(candidate) {
            return candidate;
        }
    }
}

/// Row echelon data modulo `p`: `pivot_rows[k]` and `pivot_cols[k]` locate
/// the `k`-th pivot in the original matrix.
struct ModEchelon {
    pivot_rows: Vec<usize>,
    pivot_cols: Vec<usize>,
}

fn mod_echelon(rows: Vec<Vec<u64>>, ncols: usize, md: Modulus) -> ModEchelon {
    let mut a = rows;
    let mut ids: Vec<usize> = (0..a.len()).collect();
    let mut pivot_rows = Vec::new();
    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == a.len() {
            break;
        }
        let Some(piv) = (rank..a.len()).find(|&i| a[i][col] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        ids.swap(rank, piv);
        let inv = md.inv(a[rank][col]);
        let (head, tail) = a.split_at_mut(rank + 1);
        let pivot_row = &mut head[rank];
        // Normalized pivot row, kept sparse.
        let support: Vec<(usize, u64)> = (col + 1..ncols)
            .filter(|&j| pivot_row[j] != 0)
            .map(|j| (j, md.mul(pivot_row[j], inv)))
            .collect();
        for row in tail.iter_mut() {
            let f = row[col];
            if f == 0 {
                continue;
            }
            row[col] = 0;
            for &(j, v) in &support {
                row[j] = md.sub(row[j], md.mul(f, v));
            }
        }
        pivot_rows.push(ids[rank]);
        pivot_cols.push(col);
        rank += 1;
    }
    ModEchelon {
        pivot_rows,
        pivot_cols,
    }
}

fn reduce_small(m: &SmallMatrix, md: Modulus) -> Vec<Vec<u64>> {
    (0..m.rows)
        .map(|r| m.row(r).iter().map(|&x| md.reduce_i64(x)).collect())
        .collect()
}

/// Rank over `F_p` for a prime `p < 2^32`. Never exceeds the rank over the
/// rationals.
pub fn modular_rank(m: &IntMatrix, p: u64) -> usize {
    let md = Modulus::new(p);
    let rows = match m.to_small() {
        Some(s) => reduce_small(&s, md),
        None => {
            let big_p = BigInt::from(p);
            (0..m.rows)
                .map(|r| {
                    (0..m.cols)
                        .map(|c| {
                            m.get(r, c)
                                .mod_floor(&big_p)
                                .to_u64()
                                .expect("reduced below p")
                        })
                        .collect()
                })
                .collect()
        }
    };
    mod_echelon(rows, m.cols, md).pivot_rows.len()
}

/// The modular rank, when every non-pivot row can be shown to lie in the
/// rational span of the pivot rows; `None` when `p` turns out unlucky.
fn certified_rank(m: &SmallMatrix, p: u64) -> Option<usize> {
    let md = Modulus::new(p);
    let ech = mod_echelon(reduce_small(m, md), m.cols, md);
    let r = ech.pivot_rows.len();
    if r == m.rows.min(m.cols) {
        return Some(r);
    }
    // Certify along whichever side has fewer dependent lines.
    if m.rows - r <= m.cols - r {
        certify_rows(m, &ech.pivot_rows, &ech.pivot_cols, md).then_some(r)
    } else {
        certify_rows(&m.transpose(), &ech.pivot_cols, &ech.pivot_rows, md).then_some(r)
    }
}

/// Checks that every row outside `prows` is a rational combination of the
/// rows in `prows`, given that `m[prows, pcols]` is nonsingular mod `p`.
fn certify_rows(m: &SmallMatrix, prows: &[usize], pcols: &[usize], md: Modulus) -> bool {
    let r = prows.len();
    // B = A^T with A = m[prows, pcols]; z^T A = m[i, pcols] is B z = b.
    let b_mat: Vec<Vec<i64>> = (0..r)
        .map(|i| prows.iter().map(|&k| m.get(k, pcols[i])).collect())
        .collect();
    let Some(lu) = ModLu::new(&b_mat, md) else {
        return false;
    };
    let sparse_b: Vec<Vec<(usize, i64)>> = b_mat
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(j, &x)| (j, x))
                .collect()
        })
        .collect();
    let sparse_pivot_rows: Vec<Vec<(usize, i64)>> = prows
        .iter()
        .map(|&k| {
            m.row(k)
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(j, &x)| (j, x))
                .collect()
        })
        .collect();
    let col_bits: u64 = (0..r).map(|j| norm_bits(b_mat.iter().map(|row| row[j]))).sum();
    let is_pivot = {
        let mut v = vec![false; m.rows];
        for &k in prows {
            v[k] = true;
        }
        v
    };
    for i in (0..m.rows).filter(|&i| !is_pivot[i]) {
        let rhs: Vec<i64> = pcols.iter().map(|&c| m.get(i, c)).collect();
        // Hadamard: |det B| and every Cramer numerator are below 2^bound.
        let bound = col_bits + norm_bits(rhs.iter().copied()).max(1);
        let Some((nums, den)) = dixon_solve(&lu, &sparse_b, &rhs, bound, md) else {
            return false;
        };
        // sum_k nums[k] * m[prows[k], :] == den * m[i, :]
        let mut acc = vec![BigInt::zero(); m.cols];
        for (n, row) in nums.iter().zip(&sparse_pivot_rows) {
            if n.is_zero() {
                continue;
            }
            for &(j, x) in row {
                acc[j] += n * x;
            }
        }
        let ok = acc
            .iter()
            .zip(m.row(i))
            .all(|(a, &x)| *a == &den * x);
        if !ok {
            return false;
        }
    }
    true
}

/// `ceil(log2 ||v||) + 1`, an upper bound on the bits of the Euclidean norm.
fn norm_bits(v: impl Iterator<Item = i64>) -> u64 {
    let s: u128 = v.map(|x| (x as i128 * x as i128) as u128).sum();
    if s == 0 {
        return 0;
    }
    (128 - s.leading_zeros() as u64).div_ceil(2) + 1
}

/// PLU factorization of a square matrix modulo `p`.
struct ModLu {
    n: usize,
    perm: Vec<usize>,
    /// Unit lower part below the diagonal, upper part on and above it.
    lu: Vec<Vec<u64>>,
    inv_diag: Vec<u64>,
    md: Modulus,
}

impl ModLu {
    fn new(a: &[Vec<i64>], md: Modulus) -> Option<Self> {
        let n = a.len();
        let mut lu: Vec<Vec<u64>> = a
            .iter()
            .map(|row| row.iter().map(|&x| md.reduce_i64(x)).collect())
            .collect();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut inv_diag = Vec::with_capacity(n);
        for k in 0..n {
            let piv = (k..n).find(|&i| lu[i][k] != 0)?;
            lu.swap(k, piv);
            perm.swap(k, piv);
            let inv = md.inv(lu[k][k]);
            inv_diag.push(inv);
            let (head, tail) = lu.split_at_mut(k + 1);
            let pivot_row = &head[k];
            let support: Vec<(usize, u64)> = (k + 1..n)
                .filter(|&j| pivot_row[j] != 0)
                .map(|j| (j, pivot_row[j]))
                .collect();
            for row in tail.iter_mut() {
                if row[k] == 0 {
                    continue;
                }
                let l = md.mul(row[k], inv);
                row[k] = l;
                for &(j, v) in &support {
                    row[j] = md.sub(row[j], md.mul(l, v));
                }
            }
        }
        Some(Self {
            n,
            perm,
            lu,
            inv_diag,
            md,
        })
    }

    fn solve(&self, b: &[u64]) -> Vec<u64> {
        let (n, md, p) = (self.n, self.md, self.md.p as u128);
        let mut y: Vec<u64> = self.perm.iter().map(|&i| b[i]).collect();
        for i in 0..n {
            let row = &self.lu[i];
            let s: u128 = (0..i).map(|j| row[j] as u128 * y[j] as u128).sum();
            y[i] = md.sub(y[i], (s % p) as u64);
        }
        for i in (0..n).rev() {
            let row = &self.lu[i];
            let s: u128 = (i + 1..n).map(|j| row[j] as u128 * y[j] as u128).sum();
            y[i] = md.mul(md.sub(y[i], (s % p) as u64), self.inv_diag[i]);
        }
        y
    }
}

/// Solves `B z = b` over `Q` by `p`-adic lifting, given that `|det B|` and
/// every Cramer numerator are below `2^bound`. Returns `(numerators, den)`
/// with `den > 0`, or `None` if reconstruction fails.
fn dixon_solve(
    lu: &ModLu,
    b_rows: &[Vec<(usize, i64)>],
    rhs: &[i64],
    bound: u64,
    md: Modulus,
) -> Option<(Vec<BigInt>, BigInt)> {
    let n = rhs.len();
    let p = md.p;
    let p_bits = 64 - p.leading_zeros() as u64 - 1;
    // p^steps > 2 * 2^(2 bound)
    let steps = ((2 * bound + 2) / p_bits + 1) as usize;
    let mut residual: Vec<i128> = rhs.iter().map(|&x| x as i128).collect();
    let mut digits: Vec<Vec<u64>> = Vec::with_capacity(steps);
    for _ in 0..steps {
        let r: Vec<u64> = residual.iter().map(|&x| md.reduce_i128(x)).collect();
        let x = lu.solve(&r);
        for (res, row) in residual.iter_mut().zip(b_rows) {
            let bx: i128 = row.iter().map(|&(j, v)| v as i128 * x[j] as i128).sum();
            let diff = *res - bx;
            debug_assert_eq!(diff.rem_euclid(p as i128), 0);
            *res = diff / p as i128;
        }
        digits.push(x);
    }
    let big_p = BigInt::from(p);
    let modulus = num_traits::pow(big_p.clone(), steps);
    let half = &modulus >> 1u32;
    let limit = BigInt::one() << bound;
    let values: Vec<BigInt> = (0..n)
        .map(|j| {
            digits
                .iter()
                .rev()
                .fold(BigInt::zero(), |acc, d| acc * &big_p + d[j])
        })
        .collect();
    let symmetric = |x: BigInt| -> BigInt {
        let x = x.mod_floor(&modulus);
        if x > half {
            x - &modulus
        } else {
            x
        }
    };
    // Common denominator, refined one coordinate at a time.
    let mut den = BigInt::one();
    for v in &values {
        let y = symmetric(v * &den);
        if y.abs() <= limit {
            continue;
        }
        let (_, d) = rational_reconstruction(&y, &modulus, &limit)?;
        den *= d;
        if den > limit {
            return None;
        }
    }
    let nums = values
        .into_iter()
        .map(|v| {
            let y = symmetric(v * &den);
            (y.abs() <= limit).then_some(y)
        })
        .collect::<Option<Vec<_>>>()?;
    Some((nums, den))
}

/// `n / d` with `|n|, d <= limit` and `n = d x mod m`.
fn rational_reconstruction(x: &BigInt, m: &BigInt, limit: &BigInt) -> Option<(BigInt, BigInt)> {
    let (mut r0, mut r1) = (m.clone(), x.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while &r1 > limit {
        let (q, r) = r0.div_rem(&r1);
        r0 = core::mem::replace(&mut r1, r);
        let t = &t0 - &q * &t1;
        t0 = core::mem::replace(&mut t1, t);
    }
    if t1.is_zero() || &t1.abs() > limit {
        return None;
    }
    if t1.is_negative() {
        Some((-r1, -t1))
    } else {
        Some((r1, t1))
    }
}

/// Exact rank together with ranks modulo random primes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankCheck {
    pub exact: usize,
    pub modular: Vec<(u64, usize)>,
}

impl RankCheck {
    /// The maximum modular rank equals the exact rank.
    pub fn agrees(&self) -> bool {
        self.modular.iter().map(|&(_, r)| r).max() == Some(self.exact)
    }
}

/// [`exact_rank`] and the ranks modulo `primes` primes drawn from `seed`.
pub fn cross_checked_rank(m: &IntMatrix, primes: usize, seed: u64) -> RankCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exact = exact_rank(m);
    let modular = (0..primes)
        .map(|_| {
            let p = random_prime(&mut rng);
            (p, modular_rank(m, p))
        })
        .collect();
    RankCheck { exact, modular }
}
