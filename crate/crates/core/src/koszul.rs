//! Ground truth for `dim (S/I)_rho` by linear algebra.
//!
//! `I_rho` is the image of `(g_k) -> sum_k g_k f_k` from
//! `sum_k S_{rho - alpha_k}` to `S_rho`. With monomials indexed by lattice
//! points, multiplying by a monomial is a translation, so column `(k, m)` of
//! the matrix holds the coefficients of `f_k` shifted by `m`. The cokernel
//! dimension is `dim S_rho - rank`, computed exactly (see [`crate::linalg`])
//! and cross-checked modulo random word-sized primes.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith;
use crate::error::{Error, Result};
pub use crate::linalg::{
    bareiss_rank, cross_checked_rank, exact_rank, is_prime, modular_rank, random_prime, IntMatrix,
    RankCheck,
};
use crate::lattice_geometry::{Point, PolytopeFamily};
use crate::toric::{self, DivisorClass, GradedBasis, NormalFan};

/// Largest coefficient drawn by [`generic_sections`].
pub const GENERIC_COEFFICIENT_MAX: u64 = 1 << 20;

/// A Laurent polynomial with support in `Delta_index`, as a map from lattice
/// points to coefficients. Zero coefficients are not stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseSection {
    pub index: usize,
    pub coefficients: BTreeMap<Point, BigInt>,
}

impl SparseSection {
    pub fn new(index: usize, coefficients: impl IntoIterator<Item = (Point, BigInt)>) -> Self {
        let coefficients = coefficients
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Self {
            index,
            coefficients,
        }
    }

    pub fn scaled(&self, factor: &BigInt) -> Self {
        Self::new(
            self.index,
            self.coefficients
                .iter()
                .map(|(p, c)| (p.clone(), c * factor)),
        )
    }

    pub fn translated(&self, by: &[i64]) -> Result<Self> {
        let coefficients = self
            .coefficients
            .iter()
            .map(|(p, c)| Ok((arith::vec_add(p, by)?, c.clone())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(self.index, coefficients))
    }

    fn check(&self, family: &PolytopeFamily, position: usize) -> Result<()> {
        if self.index != position {
            return Err(Error::SectionIndex {
                section: position,
                index: self.index,
            });
        }
        if self.coefficients.is_empty() {
            return Err(Error::ZeroSection(position));
        }
        let delta = family.member(self.index)?;
        for p in self.coefficients.keys() {
            if !delta.contains(p) {
                return Err(Error::SupportOutside {
                    section: position,
                    point: p.clone(),
                });
            }
        }
        Ok(())
    }
}

/// `f` written in Cox coordinates: one `(exponent vector, coefficient)` per
/// support point, all of degree `alpha_i`.
pub fn homogenize(
    f: &SparseSection,
    fan: &Arc<NormalFan>,
    family: &PolytopeFamily,
) -> Result<Vec<(Vec<i64>, BigInt)>> {
    f.check(family, f.index)?;
    let class = toric::alpha(family, fan, f.index)?;
    let basis = GradedBasis {
        class,
        points: Vec::new(),
    };
    f.coefficients
        .iter()
        .map(|(p, c)| Ok((basis.exponents_of(p)?, c.clone())))
        .collect()
}

/// One section per member with every lattice point of `Delta_i` carrying a
/// uniform coefficient in `[1, 2^20]`; deterministic in `seed`.
pub fn generic_sections(family: &PolytopeFamily, seed: u64) -> Vec<SparseSection> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    family
        .members()
        .iter()
        .enumerate()
        .map(|(i, delta)| {
            let coeffs: Vec<(Point, BigInt)> = delta
                .lattice_points()
                .into_iter()
                .map(|p| (p, BigInt::from(rng.gen_range(1..=GENERIC_COEFFICIENT_MAX))))
                .collect();
            SparseSection::new(i, coeffs)
        })
        .collect()
}

/// The map `sum_k S_{rho - alpha_k} -> S_rho` as a matrix.
#[derive(Clone, Debug)]
pub struct KoszulSlice {
    pub fan: Arc<NormalFan>,
    pub rho: DivisorClass,
    pub target: GradedBasis,
    pub sources: Vec<GradedBasis>,
    /// `(k, m)` for each column: the monomial `m` of degree `rho - alpha_k`.
    pub columns: Vec<(usize, Point)>,
    pub matrix: IntMatrix,
}

pub fn koszul_slice(family: &PolytopeFamily, sections: &[SparseSection]) -> Result<KoszulSlice> {
    let expected = family.n() + 1;
    if sections.len() != expected {
        return Err(Error::SectionCount {
            expected,
            found: sections.len(),
        });
    }
    for (i, s) in sections.iter().enumerate() {
        s.check(family, i)?;
    }
    let fan = toric::family_fan(family)?;
    let rho = toric::critical_degree(family, &fan)?;
    let target = rho.graded_basis()?;
    let mut sources = Vec::with_capacity(expected);
    let mut columns = Vec::new();
    for k in 0..expected {
        let alpha = toric::alpha(family, &fan, k)?;
        let basis = rho.try_sub(&alpha)?.graded_basis()?;
        columns.extend(basis.points.iter().map(|m| (k, m.clone())));
        sources.push(basis);
    }
    let mut matrix = IntMatrix::zeros(target.dim(), columns.len());
    for (col, (k, m)) in columns.iter().enumerate() {
        for (p, c) in &sections[*k].coefficients {
            let q = arith::vec_add(m, p)?;
            let row = target
                .index_of(&q)
                .ok_or(Error::Internal("product monomial outside S_rho"))?;
            *matrix.get_mut(row, col) += c;
        }
    }
    Ok(KoszulSlice {
        fan,
        rho,
        target,
        sources,
        columns,
        matrix,
    })
}

/// Everything the oracle measured.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleOutcome {
    pub dim_s_rho: usize,
    pub rank: usize,
    pub codim: u64,
    pub rank_check: RankCheck,
}

/// Number of random primes used to cross-check every exact rank.
pub const CROSS_CHECK_PRIMES: usize = 3;

/// Builds the slice and measures it, cross-checking the rank modulo
/// [`CROSS_CHECK_PRIMES`] primes drawn from `prime_seed`.
pub fn run_oracle(
    family: &PolytopeFamily,
    sections: &[SparseSection],
    prime_seed: u64,
) -> Result<OracleOutcome> {
    let slice = koszul_slice(family, sections)?;
    let rank_check = cross_checked_rank(&slice.matrix, CROSS_CHECK_PRIMES, prime_seed);
    let dim = slice.target.dim();
    Ok(OracleOutcome {
        dim_s_rho: dim,
        rank: rank_check.exact,
        codim: (dim - rank_check.exact) as u64,
        rank_check,
    })
}

/// `dim (S/I)_rho` for the given sections.
pub fn codim_oracle(family: &PolytopeFamily, sections: &[SparseSection]) -> Result<u64> {
    let slice = koszul_slice(family, sections)?;
    Ok((slice.target.dim() - exact_rank(&slice.matrix)) as u64)
}
