//! Closed-form values for `dim (S/I)_rho` in terms of the family's polytopes,
//! and the report comparing them with the Koszul oracle.
//!
//! Every quantity here depends only on `dim(Delta_J)` and `lstar(Delta_J)` for
//! subsets `J` of the family. Subsets are always visited by increasing size
//! and then lexicographically, so reports are reproducible.

use alloc::vec;
use alloc::vec::Vec;
use core::cell::OnceCell;

use crate::error::{Error, Result};
use crate::koszul::{self, RankCheck, SparseSection};
use crate::lattice_geometry::{
    subsets_shortlex, EssentialCertificate, LatticePolytope, PolytopeFamily,
};

/// Number of extra draws allowed after an inconsistent generic draw.
pub const MAX_RESEEDS: usize = 3;

/// Per-family cache of `Delta_J`, its dimension and `lstar`, indexed by the
/// bitmask of `J`. Sums and counts are computed on first use.
pub struct SubsetTable<'a> {
    family: &'a PolytopeFamily,
    dims: Vec<usize>,
    sums: Vec<OnceCell<LatticePolytope>>,
    lstars: Vec<OnceCell<u64>>,
}

fn indices(mask: usize) -> Vec<usize> {
    (0..usize::BITS as usize)
        .filter(|i| mask & (1 << i) != 0)
        .collect()
}

fn mask_of(subset: &[usize]) -> usize {
    subset.iter().fold(0, |m, &i| m | (1 << i))
}

impl<'a> SubsetTable<'a> {
    pub fn new(family: &'a PolytopeFamily) -> Result<Self> {
        let count = family.n() + 1;
        if count >= usize::BITS as usize {
            return Err(Error::InvalidParameter("family too large"));
        }
        let size = 1usize << count;
        let dims = (0..size)
            .map(|mask| family.subset_dimension(&indices(mask)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            family,
            dims,
            sums: (0..size).map(|_| OnceCell::new()).collect(),
            lstars: (0..size).map(|_| OnceCell::new()).collect(),
        })
    }

    pub fn family(&self) -> &PolytopeFamily {
        self.family
    }

    fn n(&self) -> usize {
        self.family.n()
    }

    pub fn dim(&self, subset: &[usize]) -> usize {
        self.dims[mask_of(subset)]
    }

    fn sum_mask(&self, mask: usize) -> Result<&LatticePolytope> {
        if let Some(p) = self.sums[mask].get() {
            return Ok(p);
        }
        let p = if mask == 0 {
            LatticePolytope::origin(self.n())?
        } else {
            let top = usize::BITS as usize - 1 - mask.leading_zeros() as usize;
            let rest = mask & !(1 << top);
            let member = self.family.member(top)?;
            if rest == 0 {
                member.clone()
            } else {
                self.sum_mask(rest)?.minkowski_sum(member)?
            }
        };
        let _ = self.sums[mask].set(p);
        Ok(self.sums[mask].get().expect("just set"))
    }

    pub fn sum(&self, subset: &[usize]) -> Result<&LatticePolytope> {
        self.sum_mask(mask_of(subset))
    }

    fn lstar_mask(&self, mask: usize) -> Result<u64> {
        if let Some(&l) = self.lstars[mask].get() {
            return Ok(l);
        }
        let l = self.sum_mask(mask)?.lstar();
        let _ = self.lstars[mask].set(l);
        Ok(l)
    }

    pub fn lstar(&self, subset: &[usize]) -> Result<u64> {
        self.lstar_mask(mask_of(subset))
    }

    fn lstar_k_mask(&self, mask: usize, k: usize) -> Result<u64> {
        if self.dims[mask] == k {
            self.lstar_mask(mask)
        } else {
            Ok(0)
        }
    }

    pub fn essential(&self) -> EssentialCertificate {
        let violating_subset = subsets_shortlex(self.n() + 1, self.n())
            .into_iter()
            .find(|j| self.dim(j) < j.len());
        EssentialCertificate { violating_subset }
    }

    fn require_essential(&self) -> Result<()> {
        match self.essential().violating_subset {
            None => Ok(()),
            Some(j) => Err(Error::NotEssential(j)),
        }
    }

    /// `sum over l with dim(Delta_l) = 1 of lstar(Delta_l)`.
    fn segment_contribution(&self) -> Result<u64> {
        let mut acc = 0;
        for l in 0..=self.n() {
            if self.dims[1 << l] == 1 {
                acc += self.lstar_mask(1 << l)?;
            }
        }
        Ok(acc)
    }

    /// `1 + sum_{k=1}^{n-1} sum_{|J| = dim(Delta_J) = k} lstar(Delta_J)`.
    fn upper_sum(&self) -> Result<u64> {
        let mut acc = 1;
        for j in subsets_shortlex(self.n() + 1, self.n().saturating_sub(1)) {
            if self.dim(&j) == j.len() {
                acc += self.lstar(&j)?;
            }
        }
        Ok(acc)
    }

    pub fn codim_bounds(&self) -> Result<Bounds> {
        self.require_essential()?;
        // In dimension one the segment term would sit on the bottom row of the
        // E1 page rather than on the diagonal, and the bound reduces to 1.
        let lower = if self.n() >= 2 {
            1 + self.segment_contribution()?
        } else {
            1
        };
        Ok(Bounds {
            lower,
            upper: self.upper_sum()?,
        })
    }

    pub fn abc_check(&self) -> Result<AbcCheck> {
        self.require_essential()?;
        let n = self.n();
        let count = n + 1;
        let mut violators = Vec::new();
        for j in subsets_shortlex(count, n.saturating_sub(2)) {
            let size = j.len();
            // (a)
            if self.dim(&j) != size + 1 {
                continue;
            }
            // (b)
            if self.lstar(&j)? == 0 {
                continue;
            }
            // (c)
            let jm = mask_of(&j);
            let complement: Vec<usize> = (0..count).filter(|i| !j.contains(i)).collect();
            let max_extra = n - 1 - size;
            let c_holds = subsets_shortlex(complement.len(), max_extra)
                .into_iter()
                .all(|sub| {
                    let im = sub.iter().fold(0, |m, &k| m | (1 << complement[k]));
                    self.dims[jm | im] > size + sub.len()
                });
            if !c_holds {
                violators.push(j);
            }
        }
        Ok(AbcCheck {
            applicable: violators.is_empty(),
            violators,
        })
    }

    pub fn codim_formula(&self) -> Result<Option<u64>> {
        if self.abc_check()?.applicable {
            Ok(Some(self.upper_sum()?))
        } else {
            Ok(None)
        }
    }

    pub fn bignef_case(&self) -> Result<Option<(BigNefCase, u64)>> {
        let n = self.n();
        if (0..=n).all(|i| self.dims[1 << i] == n) {
            return Ok(Some((BigNefCase::FullDimensional, 1)));
        }
        if n == 2 && self.essential().essential() {
            return Ok(Some((BigNefCase::Surface, 1 + self.segment_contribution()?)));
        }
        Ok(None)
    }

    /// `dim E_1^{p,q}` for `0 <= p <= n+1`, `0 <= q <= n`.
    pub fn e1_table(&self) -> Result<E1Table> {
        self.require_essential()?;
        let n = self.n();
        let mut entries = vec![vec![0u64; n + 1]; n + 2];
        entries[0][n] = 1;
        for mask in 1usize..(1 << (n + 1)) {
            let p = mask.count_ones() as usize;
            let d = self.dims[mask];
            // dim(Delta_J) <= n always, so q = n - d is in range.
            entries[p][n - d] += self.lstar_mask(mask)?;
        }
        Ok(E1Table { n, entries })
    }

    pub fn restrictdelta_check(&self) -> RestrictDelta {
        let n = self.n();
        if n < 3 {
            return RestrictDelta::NotApplicable;
        }
        let ok = (0..=n).all(|i| {
            let d = self.dims[1 << i];
            d == 1 || d == n - 1 || d == n
        });
        if ok {
            RestrictDelta::Holds
        } else {
            RestrictDelta::Fails
        }
    }

    /// Inclusion-exclusion formula over `J` with `dim(Delta_J) = |J| < n`;
    /// `None` unless the family is essential, `n >= 3` and every member has
    /// dimension `1`, `n - 1` or `n`.
    pub fn genfor_formula(&self) -> Result<Option<i64>> {
        if !self.essential().essential() || self.restrictdelta_check() != RestrictDelta::Holds {
            return Ok(None);
        }
        let n = self.n();
        let mut total: i64 = 1;
        for j in subsets_shortlex(n + 1, n - 1) {
            let k = j.len();
            if self.dim(&j) != k {
                continue;
            }
            let jm = mask_of(&j);
            // every sub-mask of J, including the empty one
            let mut sub = jm;
            loop {
                let sign = if (k - sub.count_ones() as usize).is_multiple_of(2) { 1 } else { -1 };
                total += sign * self.lstar_k_mask(sub, k)? as i64;
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & jm;
            }
        }
        Ok(Some(total))
    }

    pub fn claims(&self) -> Result<Option<Claims>> {
        if !self.essential().essential() {
            return Ok(None);
        }
        let bounds = self.codim_bounds()?;
        Ok(Some(Claims {
            lower: bounds.lower,
            upper: bounds.upper,
            formula: self.codim_formula()?,
            genfor: self.genfor_formula()?,
        }))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub lower: u64,
    pub upper: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbcCheck {
    pub applicable: bool,
    /// Every `J` with `1 <= |J| <= n - 2` failing all of (a), (b) and (c).
    pub violators: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BigNefCase {
    /// Every member is full-dimensional.
    FullDimensional,
    /// `n = 2` and the family is essential.
    Surface,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RestrictDelta {
    Holds,
    Fails,
    /// `n < 3`.
    NotApplicable,
}

/// Dimensions of the first page; `entries[p][q]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct E1Table {
    pub n: usize,
    pub entries: Vec<Vec<u64>>,
}

impl E1Table {
    pub fn get(&self, p: usize, q: usize) -> u64 {
        self.entries[p][q]
    }

    /// `sum_{q=1}^{n} dim E_1^{n-q,q}`; the `q = n` term is `E_1^{0,n} = 1`.
    pub fn diagonal_sum(&self) -> u64 {
        (1..=self.n).map(|q| self.entries[self.n - q][q]).sum()
    }
}

pub fn codim_bounds(family: &PolytopeFamily) -> Result<Bounds> {
    SubsetTable::new(family)?.codim_bounds()
}

pub fn abc_check(family: &PolytopeFamily) -> Result<AbcCheck> {
    SubsetTable::new(family)?.abc_check()
}

pub fn codim_formula(family: &PolytopeFamily) -> Result<Option<u64>> {
    SubsetTable::new(family)?.codim_formula()
}

pub fn bignef_case(family: &PolytopeFamily) -> Result<Option<(BigNefCase, u64)>> {
    SubsetTable::new(family)?.bignef_case()
}

pub fn e1_table(family: &PolytopeFamily) -> Result<E1Table> {
    SubsetTable::new(family)?.e1_table()
}

pub fn restrictdelta_check(family: &PolytopeFamily) -> Result<RestrictDelta> {
    Ok(SubsetTable::new(family)?.restrictdelta_check())
}

pub fn genfor_formula(family: &PolytopeFamily) -> Result<Option<i64>> {
    SubsetTable::new(family)?.genfor_formula()
}

/// What the closed forms predict for an essential family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Claims {
    pub lower: u64,
    pub upper: u64,
    pub formula: Option<u64>,
    pub genfor: Option<i64>,
}

impl Claims {
    pub fn consistent_with(&self, value: u64) -> bool {
        self.lower <= value
            && value <= self.upper
            && self.formula.is_none_or(|f| f == value)
            && self.genfor.is_none_or(|g| g == value as i64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleRequest {
    None,
    Generic { seed: u64 },
    Explicit(Vec<SparseSection>),
}

/// One evaluation of the oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleAttempt {
    /// Seed of the generic coefficients; `None` for explicit sections.
    pub seed: Option<u64>,
    pub dim_s_rho: usize,
    pub rank: usize,
    pub codim: u64,
    pub rank_check: RankCheck,
    /// Rank cross-check agrees and, for essential families, the value
    /// satisfies every applicable claim.
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleRun {
    pub attempts: Vec<OracleAttempt>,
}

impl OracleRun {
    /// The value of the first consistent attempt, else of the last one.
    pub fn value(&self) -> u64 {
        self.attempts
            .iter()
            .find(|a| a.consistent)
            .or(self.attempts.last())
            .map(|a| a.codim)
            .expect("at least one attempt")
    }

    pub fn consistent(&self) -> bool {
        self.attempts.iter().any(|a| a.consistent)
    }

    pub fn reseeds(&self) -> usize {
        self.attempts.len().saturating_sub(1)
    }
}

/// Seed of the `attempt`-th draw for a run started at `seed`. Reseeds move
/// by multiples of `2^32` so they never collide with consecutive trial seeds.
pub fn attempt_seed(seed: u64, attempt: usize) -> u64 {
    seed.wrapping_add((attempt as u64) << 32)
}

fn prime_seed(seed: u64) -> u64 {
    seed ^ 0x0005_EED0_F912_13E5_u64
}

fn attempt(
    family: &PolytopeFamily,
    claims: Option<&Claims>,
    sections: &[SparseSection],
    seed: Option<u64>,
) -> Result<OracleAttempt> {
    let out = koszul::run_oracle(family, sections, prime_seed(seed.unwrap_or(0)))?;
    let consistent =
        out.rank_check.agrees() && claims.is_none_or(|c| c.consistent_with(out.codim));
    Ok(OracleAttempt {
        seed,
        dim_s_rho: out.dim_s_rho,
        rank: out.rank,
        codim: out.codim,
        rank_check: out.rank_check,
        consistent,
    })
}

/// Generic coefficients from `seed`, reseeding up to [`MAX_RESEEDS`] times
/// while the value contradicts `claims`.
pub fn oracle_generic(
    family: &PolytopeFamily,
    claims: Option<&Claims>,
    seed: u64,
) -> Result<OracleRun> {
    let mut attempts = Vec::new();
    for k in 0..=MAX_RESEEDS {
        let s = attempt_seed(seed, k);
        let sections = koszul::generic_sections(family, s);
        let a = attempt(family, claims, &sections, Some(s))?;
        let done = a.consistent;
        attempts.push(a);
        if done {
            break;
        }
    }
    Ok(OracleRun { attempts })
}

pub fn oracle_explicit(
    family: &PolytopeFamily,
    claims: Option<&Claims>,
    sections: &[SparseSection],
) -> Result<OracleRun> {
    Ok(OracleRun {
        attempts: vec![attempt(family, claims, sections, None)?],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The oracle satisfies every applicable claim.
    Agree,
    /// Every generic draw returned the same value and it contradicts a claim.
    Disagree,
    /// Generic draws kept contradicting the claims with varying values.
    Indeterminate,
    /// Explicit coefficients contradict a claim; they may have common zeros.
    ExplicitMismatch,
    /// Nothing to compare against.
    NoOracle,
    /// The family is not essential, so nothing is claimed.
    NotEssential,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Agree => "agree",
            Verdict::Disagree => "disagree",
            Verdict::Indeterminate => "indeterminate",
            Verdict::ExplicitMismatch => "explicit-mismatch",
            Verdict::NoOracle => "no-oracle",
            Verdict::NotEssential => "not-essential",
        }
    }
}

impl core::str::FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Verdict::Agree,
            Verdict::Disagree,
            Verdict::Indeterminate,
            Verdict::ExplicitMismatch,
            Verdict::NoOracle,
            Verdict::NotEssential,
        ]
        .into_iter()
        .find(|v| v.as_str() == s)
        .ok_or(Error::InvalidParameter("unknown verdict"))
    }
}

/// Classifies an oracle run against the claims.
pub fn verdict(claims: Option<&Claims>, run: Option<&OracleRun>, explicit: bool) -> Verdict {
    let Some(_) = claims else {
        return Verdict::NotEssential;
    };
    let Some(run) = run else {
        return Verdict::NoOracle;
    };
    if run.consistent() {
        Verdict::Agree
    } else if explicit {
        Verdict::ExplicitMismatch
    } else if run.attempts.windows(2).all(|w| w[0].codim == w[1].codim) {
        Verdict::Disagree
    } else {
        Verdict::Indeterminate
    }
}

/// Everything known about one family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodimReport {
    pub n: usize,
    pub essential: EssentialCertificate,
    pub member_dims: Vec<usize>,
    pub member_lstars: Vec<u64>,
    /// `lstar(Delta_0 + ... + Delta_n)`.
    pub lstar_total: u64,
    pub bounds: Option<Bounds>,
    pub abc: Option<AbcCheck>,
    pub formula_value: Option<u64>,
    pub bignef: Option<(BigNefCase, u64)>,
    pub restrictdelta: RestrictDelta,
    pub genfor_value: Option<i64>,
    pub e1: Option<E1Table>,
    pub oracle: Option<OracleRun>,
    pub verdict: Verdict,
}

impl CodimReport {
    pub fn oracle_value(&self) -> Option<u64> {
        self.oracle.as_ref().map(OracleRun::value)
    }
}

/// Runs every applicable formula and, when requested, the oracle.
///
/// Non-essential families get a report with every claim absent; the oracle
/// still runs when the total sum is full-dimensional.
pub fn analyze(family: &PolytopeFamily, request: &OracleRequest) -> Result<CodimReport> {
    let table = SubsetTable::new(family)?;
    let n = family.n();
    let essential = table.essential();
    let member_dims = (0..=n).map(|i| table.dim(&[i])).collect();
    let member_lstars = (0..=n)
        .map(|i| table.lstar(&[i]))
        .collect::<Result<Vec<_>>>()?;
    let all: Vec<usize> = (0..=n).collect();
    let lstar_total = table.lstar(&all)?;
    let claims = table.claims()?;

    let (bounds, abc, formula_value, e1) = if essential.essential() {
        let abc = table.abc_check()?;
        let formula = table.codim_formula()?;
        (Some(table.codim_bounds()?), Some(abc), formula, Some(table.e1_table()?))
    } else {
        (None, None, None, None)
    };

    let oracle_possible = table.dim(&all) == n;
    let oracle = match request {
        OracleRequest::None => None,
        _ if !oracle_possible => None,
        OracleRequest::Generic { seed } => Some(oracle_generic(family, claims.as_ref(), *seed)?),
        OracleRequest::Explicit(sections) => {
            Some(oracle_explicit(family, claims.as_ref(), sections)?)
        }
    };
    let verdict = verdict(
        claims.as_ref(),
        oracle.as_ref(),
        matches!(request, OracleRequest::Explicit(_)),
    );

    Ok(CodimReport {
        n,
        essential,
        member_dims,
        member_lstars,
        lstar_total,
        bounds,
        abc,
        formula_value,
        bignef: table.bignef_case()?,
        restrictdelta: table.restrictdelta_check(),
        genfor_value: table.genfor_formula()?,
        e1,
        oracle,
        verdict,
    })
}
