//! Seeded random families for testing and benchmarking.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice_geometry::{LatticePolytope, Point, PolytopeFamily};

/// Families drawn before giving up.
pub const MAX_ATTEMPTS: usize = 1000;

/// Convex hull of between 2 and `2n` uniform points of `[0, max_coord]^n`.
pub fn random_polytope(rng: &mut impl Rng, n: usize, max_coord: i64) -> Result<LatticePolytope> {
    let count = rng.gen_range(2..=(2 * n).max(2));
    random_hull(rng, n, max_coord, count)
}

/// Convex hull of `count` uniform points of `[0, max_coord]^n`.
pub fn random_hull(
    rng: &mut impl Rng,
    n: usize,
    max_coord: i64,
    count: usize,
) -> Result<LatticePolytope> {
    let points: Vec<Point> = (0..count)
        .map(|_| (0..n).map(|_| rng.gen_range(0..=max_coord)).collect())
        .collect();
    LatticePolytope::new(n, points)
}

fn check_parameters(n: usize, max_coord: i64) -> Result<()> {
    if !(1..=4).contains(&n) {
        return Err(Error::InvalidParameter("n must be between 1 and 4"));
    }
    if max_coord < 1 {
        return Err(Error::InvalidParameter("max_coord must be at least 1"));
    }
    Ok(())
}

/// The first family of random polytopes satisfying `accept`, drawing members
/// with `member(rng, i)`; at most [`MAX_ATTEMPTS`] families are drawn.
pub fn random_family_where(
    n: usize,
    seed: u64,
    mut member: impl FnMut(&mut ChaCha8Rng, usize) -> Result<LatticePolytope>,
    mut accept: impl FnMut(&PolytopeFamily) -> Result<bool>,
) -> Result<PolytopeFamily> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let members = (0..=n)
            .map(|i| member(&mut rng, i))
            .collect::<Result<Vec<_>>>()?;
        let family = PolytopeFamily::new(n, members)?;
        if accept(&family)? {
            return Ok(family);
        }
    }
    Err(Error::SamplingExhausted(MAX_ATTEMPTS))
}

/// A random essential family in `Z^n`, `1 <= n <= 4`; deterministic in `seed`.
pub fn random_essential_family(n: usize, max_coord: i64, seed: u64) -> Result<PolytopeFamily> {
    check_parameters(n, max_coord)?;
    random_family_where(
        n,
        seed,
        |rng, _| random_polytope(rng, n, max_coord),
        |f| Ok(f.is_essential()?.essential()),
    )
}
