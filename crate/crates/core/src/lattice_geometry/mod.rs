//! Exact lattice polytopes.
//!
//! A [`LatticePolytope`] keeps its vertices (extreme points only, sorted
//! lexicographically) together with an H-description relative to its affine
//! hull: integer equations cutting out the affine hull and primitive facet
//! inequalities `<normal, x> >= -offset`. Lattice point enumeration scans the
//! bounding box and filters by both.

mod hull;

use alloc::vec::Vec;
use core::fmt;

use crate::arith::{self, dot};
use crate::error::{Error, Result};

pub(crate) use hull::for_each_combination;

/// A point of `Z^n`.
pub type Point = Vec<i64>;

/// Coordinates are bounded so that every dot product and small determinant
/// fits comfortably in `i128`.
pub const COORDINATE_LIMIT: i64 = 1 << 40;

/// Facet inequality `<normal, x> >= -offset`, valid on the affine hull.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: i64,
}

impl Facet {
    /// `<normal, x> + offset`; nonnegative on the polytope, zero on the facet.
    pub fn slack(&self, x: &[i64]) -> i128 {
        dot(&self.normal, x) + self.offset as i128
    }
}

/// Affine hull equation `<normal, x> = value`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Equation {
    pub normal: Vec<i64>,
    pub value: i64,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LatticePolytope {
    ambient_dim: usize,
    dim: usize,
    vertices: Vec<Point>,
    facets: Vec<Facet>,
    equations: Vec<Equation>,
}

impl fmt::Debug for LatticePolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "conv{:?}", self.vertices)
    }
}

fn check_point(ambient_dim: usize, p: &[i64]) -> Result<()> {
    if p.len() != ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: ambient_dim,
            found: p.len(),
        });
    }
    if p.iter().any(|x| x.unsigned_abs() > COORDINATE_LIMIT as u64) {
        return Err(Error::Overflow);
    }
    Ok(())
}

impl LatticePolytope {
    /// Convex hull of a nonempty set of lattice points.
    pub fn new(ambient_dim: usize, points: impl IntoIterator<Item = Point>) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::ZeroAmbientDimension);
        }
        let points: Vec<Point> = points.into_iter().collect();
        if points.is_empty() {
            return Err(Error::EmptyPolytope);
        }
        for p in &points {
            check_point(ambient_dim, p)?;
        }
        Self::from_hull(ambient_dim, hull::hull(ambient_dim, points)?)
    }

    /// The single-point polytope `{p}`.
    pub fn point(p: Point) -> Result<Self> {
        let n = p.len();
        Self::new(n, [p])
    }

    /// `{0}` in `Z^n`, the empty Minkowski sum.
    pub fn origin(ambient_dim: usize) -> Result<Self> {
        Self::new(ambient_dim, [alloc::vec![0; ambient_dim]])
    }

    fn from_hull(ambient_dim: usize, h: hull::Hull) -> Result<Self> {
        Ok(Self {
            ambient_dim,
            dim: h.dim,
            vertices: h.vertices,
            facets: h.facets,
            equations: h.equations,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Extreme points in lexicographic order.
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    /// Dimension of the affine hull.
    pub fn affine_dim(&self) -> usize {
        self.dim
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim == self.ambient_dim
    }

    fn in_affine_hull(&self, x: &[i64]) -> bool {
        self.equations
            .iter()
            .all(|e| dot(&e.normal, x) == e.value as i128)
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        x.len() == self.ambient_dim
            && self.in_affine_hull(x)
            && self.facets.iter().all(|f| f.slack(x) >= 0)
    }

    /// Membership in the relative interior. The relative interior of a point
    /// is the point itself.
    pub fn contains_relative_interior(&self, x: &[i64]) -> bool {
        x.len() == self.ambient_dim
            && self.in_affine_hull(x)
            && self.facets.iter().all(|f| f.slack(x) > 0)
    }

    /// Coordinate-wise minimum and maximum of the vertices.
    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices[1..] {
            for i in 0..self.ambient_dim {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        (lo, hi)
    }

    fn scan(&self, strict: bool) -> Vec<Point> {
        let (lo, hi) = self.bounding_box();
        let mut out = Vec::new();
        scan_box(&lo, &hi, |x| {
            let ok = if strict {
                self.contains_relative_interior(x)
            } else {
                self.contains(x)
            };
            if ok {
                out.push(x.to_vec());
            }
        });
        out
    }

    /// All lattice points, in lexicographic order.
    pub fn lattice_points(&self) -> Vec<Point> {
        self.scan(false)
    }

    /// Lattice points of the relative interior, in lexicographic order.
    pub fn interior_lattice_points(&self) -> Vec<Point> {
        self.scan(true)
    }

    /// Number of lattice points in the relative interior.
    pub fn lstar(&self) -> u64 {
        if self.dim == 0 {
            return 1;
        }
        let (lo, hi) = self.bounding_box();
        let mut count = 0;
        scan_box(&lo, &hi, |x| {
            if self.contains_relative_interior(x) {
                count += 1;
            }
        });
        count
    }

    /// `lstar` gated on the dimension being exactly `k`.
    pub fn lstar_k(&self, k: usize) -> u64 {
        if self.dim == k {
            self.lstar()
        } else {
            0
        }
    }

    pub fn minkowski_sum(&self, other: &Self) -> Result<Self> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: other.ambient_dim,
            });
        }
        let mut candidates = Vec::with_capacity(self.vertices.len() * other.vertices.len());
        for p in &self.vertices {
            for q in &other.vertices {
                let s = arith::vec_add(p, q)?;
                check_point(self.ambient_dim, &s)?;
                candidates.push(s);
            }
        }
        Self::from_hull(self.ambient_dim, hull::hull(self.ambient_dim, candidates)?)
    }

    pub fn translate(&self, by: &[i64]) -> Result<Self> {
        let pts = self
            .vertices
            .iter()
            .map(|v| arith::vec_add(v, by))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.ambient_dim, pts)
    }
}

/// Visits every lattice point of the box `[lo, hi]` in lexicographic order.
pub(crate) fn scan_box(lo: &[i64], hi: &[i64], mut f: impl FnMut(&[i64])) {
    let n = lo.len();
    if lo.iter().zip(hi).any(|(a, b)| a > b) {
        return;
    }
    let mut x = lo.to_vec();
    loop {
        f(&x);
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if x[i] < hi[i] {
                x[i] += 1;
                x[i + 1..n].copy_from_slice(&lo[i + 1..n]);
                break;
            }
        }
    }
}

/// Nonempty subsets of `0..len` with at most `max_size` elements, by
/// increasing size and then lexicographically.
pub fn subsets_shortlex(len: usize, max_size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for k in 1..=max_size.min(len) {
        for_each_combination(len, k, |s| {
            out.push(s.to_vec());
            Ok(())
        })
        .expect("infallible");
    }
    out
}

/// Dimension of the Minkowski sum of the given polytopes, without forming it:
/// the rank of all their edge directions together.
pub fn sum_dimension<'a>(
    ambient_dim: usize,
    parts: impl IntoIterator<Item = &'a LatticePolytope>,
) -> Result<usize> {
    let mut rows = Vec::new();
    for p in parts {
        let base = &p.vertices[0];
        for v in &p.vertices[1..] {
            rows.push(arith::vec_sub(v, base)?);
        }
    }
    arith::rank(&rows, ambient_dim)
}

/// An ordered family `Delta_0, ..., Delta_n` of lattice polytopes in `Z^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolytopeFamily {
    n: usize,
    members: Vec<LatticePolytope>,
}

/// Outcome of the essential test. `violating_subset` is the first subset `J`
/// (by size, then lexicographically) with `dim(Delta_J) < |J|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EssentialCertificate {
    pub violating_subset: Option<Vec<usize>>,
}

impl EssentialCertificate {
    pub fn essential(&self) -> bool {
        self.violating_subset.is_none()
    }

    /// Re-checks the certificate against the family.
    pub fn verify(&self, family: &PolytopeFamily) -> Result<bool> {
        match &self.violating_subset {
            None => Ok(family.is_essential()?.essential()),
            Some(j) => {
                let dim = family.subset_dimension(j)?;
                Ok(!j.is_empty() && j.len() <= family.n() && dim < j.len())
            }
        }
    }
}

impl PolytopeFamily {
    pub fn new(n: usize, members: Vec<LatticePolytope>) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroAmbientDimension);
        }
        if members.len() != n + 1 {
            return Err(Error::FamilySize {
                n,
                found: members.len(),
            });
        }
        for m in &members {
            if m.ambient_dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: m.ambient_dim(),
                });
            }
        }
        Ok(Self { n, members })
    }

    /// Builds a family from vertex lists.
    pub fn from_points(n: usize, polytopes: Vec<Vec<Point>>) -> Result<Self> {
        let members = polytopes
            .into_iter()
            .map(|pts| LatticePolytope::new(n, pts))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, members)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[LatticePolytope] {
        &self.members
    }

    pub fn member(&self, i: usize) -> Result<&LatticePolytope> {
        self.members.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.members.len(),
        })
    }

    /// `Delta_J`, the Minkowski sum of the selected members. The empty sum is
    /// the origin.
    pub fn subfamily_sum(&self, subset: &[usize]) -> Result<LatticePolytope> {
        let mut acc: Option<LatticePolytope> = None;
        for &i in subset {
            let m = self.member(i)?;
            acc = Some(match acc {
                None => m.clone(),
                Some(a) => a.minkowski_sum(m)?,
            });
        }
        match acc {
            Some(p) => Ok(p),
            None => LatticePolytope::origin(self.n),
        }
    }

    /// `dim(Delta_J)` without forming the sum.
    pub fn subset_dimension(&self, subset: &[usize]) -> Result<usize> {
        let parts = subset
            .iter()
            .map(|&i| self.member(i))
            .collect::<Result<Vec<_>>>()?;
        sum_dimension(self.n, parts)
    }

    /// `Delta_0 + ... + Delta_n`.
    pub fn total_sum(&self) -> Result<LatticePolytope> {
        let all: Vec<usize> = (0..=self.n).collect();
        self.subfamily_sum(&all)
    }

    /// Checks `dim(Delta_J) >= |J|` for every nonempty `J` with `|J| <= n`.
    pub fn is_essential(&self) -> Result<EssentialCertificate> {
        for j in subsets_shortlex(self.n + 1, self.n) {
            if self.subset_dimension(&j)? < j.len() {
                return Ok(EssentialCertificate {
                    violating_subset: Some(j),
                });
            }
        }
        Ok(EssentialCertificate {
            violating_subset: None,
        })
    }

    /// The same family with member `i` translated by `by`.
    pub fn translate_member(&self, i: usize, by: &[i64]) -> Result<Self> {
        let mut members = self.members.clone();
        members[i] = self.member(i)?.translate(by)?;
        Self::new(self.n, members)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn poly(n: usize, pts: &[&[i64]]) -> LatticePolytope {
        LatticePolytope::new(n, pts.iter().map(|p| p.to_vec())).unwrap()
    }

    fn unit_square() -> LatticePolytope {
        poly(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])
    }

    fn segment2() -> LatticePolytope {
        poly(2, &[&[0, 0], &[2, 0]])
    }

    #[test]
    fn affine_dimensions() {
        assert_eq!(poly(2, &[&[5, 7]]).affine_dim(), 0);
        assert_eq!(segment2().affine_dim(), 1);
        assert_eq!(unit_square().affine_dim(), 2);
    }

    #[test]
    fn constructor_errors() {
        assert_eq!(
            LatticePolytope::new(2, Vec::<Point>::new()).unwrap_err(),
            Error::EmptyPolytope
        );
        assert!(matches!(
            LatticePolytope::new(2, [vec![1, 2, 3]]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(
            LatticePolytope::new(0, [vec![]]).unwrap_err(),
            Error::ZeroAmbientDimension
        );
    }

    #[test]
    fn minkowski_examples() {
        let origin = LatticePolytope::origin(2).unwrap();
        assert_eq!(unit_square().minkowski_sum(&origin).unwrap(), unit_square());
        let h = poly(2, &[&[0, 0], &[1, 0]]);
        let v = poly(2, &[&[0, 0], &[0, 1]]);
        assert_eq!(h.minkowski_sum(&v).unwrap(), unit_square());
        let rect = segment2()
            .minkowski_sum(&unit_square())
            .unwrap()
            .minkowski_sum(&unit_square())
            .unwrap();
        assert_eq!(rect, poly(2, &[&[0, 0], &[4, 0], &[0, 2], &[4, 2]]));
        assert!(matches!(
            segment2().minkowski_sum(&poly(3, &[&[0, 0, 0]])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn lattice_point_examples() {
        assert_eq!(unit_square().lattice_points().len(), 4);
        assert_eq!(
            segment2().lattice_points(),
            vec![vec![0, 0], vec![1, 0], vec![2, 0]]
        );
        let rect = poly(2, &[&[0, 0], &[4, 0], &[0, 2], &[4, 2]]);
        assert_eq!(rect.lattice_points().len(), 15);
    }

    #[test]
    fn lstar_examples() {
        assert_eq!(unit_square().lstar(), 0);
        assert_eq!(segment2().lstar(), 1);
        assert_eq!(segment2().interior_lattice_points(), vec![vec![1, 0]]);
        let tri = poly(2, &[&[0, 0], &[3, 0], &[0, 3]]);
        assert_eq!(tri.interior_lattice_points(), vec![vec![1, 1]]);
        let rect = poly(2, &[&[0, 0], &[4, 0], &[0, 2], &[4, 2]]);
        assert_eq!(
            rect.interior_lattice_points(),
            vec![vec![1, 1], vec![2, 1], vec![3, 1]]
        );
        assert_eq!(poly(2, &[&[3, 3]]).lstar(), 1);
    }

    #[test]
    fn lstar_k_examples() {
        assert_eq!(segment2().lstar_k(1), 1);
        assert_eq!(segment2().lstar_k(2), 0);
        assert_eq!(LatticePolytope::origin(2).unwrap().lstar_k(1), 0);
        assert_eq!(LatticePolytope::origin(2).unwrap().lstar_k(0), 1);
    }

    fn seg_sq_sq() -> PolytopeFamily {
        PolytopeFamily::new(2, vec![segment2(), unit_square(), unit_square()]).unwrap()
    }

    #[test]
    fn subfamily_sums() {
        let f = seg_sq_sq();
        assert_eq!(f.subfamily_sum(&[1]).unwrap(), unit_square());
        assert_eq!(
            f.subfamily_sum(&[]).unwrap(),
            LatticePolytope::origin(2).unwrap()
        );
        assert_eq!(
            f.subfamily_sum(&[0, 1]).unwrap(),
            poly(2, &[&[0, 0], &[3, 0], &[0, 1], &[3, 1]])
        );
        assert_eq!(
            f.subfamily_sum(&[3]).unwrap_err(),
            Error::IndexOutOfRange { index: 3, len: 3 }
        );
    }

    #[test]
    fn essential_examples() {
        let squares = PolytopeFamily::new(2, vec![unit_square(); 3]).unwrap();
        assert!(squares.is_essential().unwrap().essential());

        let h = poly(2, &[&[0, 0], &[1, 0]]);
        let v = poly(2, &[&[0, 0], &[0, 1]]);
        let transverse = PolytopeFamily::new(2, vec![v, h.clone(), h]).unwrap();
        let cert = transverse.is_essential().unwrap();
        assert_eq!(cert.violating_subset, Some(vec![1, 2]));
        assert!(cert.verify(&transverse).unwrap());
        assert_eq!(transverse.total_sum().unwrap().lstar(), 0);

        let with_point = PolytopeFamily::new(
            2,
            vec![unit_square(), segment2(), LatticePolytope::origin(2).unwrap()],
        )
        .unwrap();
        assert_eq!(
            with_point.is_essential().unwrap().violating_subset,
            Some(vec![2])
        );
    }

    #[test]
    fn family_validation() {
        assert!(matches!(
            PolytopeFamily::new(2, vec![unit_square(); 2]),
            Err(Error::FamilySize { n: 2, found: 2 })
        ));
    }

    #[test]
    fn shortlex_order() {
        assert_eq!(
            subsets_shortlex(3, 2),
            vec![
                vec![0],
                vec![1],
                vec![2],
                vec![0, 1],
                vec![0, 2],
                vec![1, 2]
            ]
        );
    }

    #[test]
    fn three_dimensional_sum() {
        let cube = poly(
            3,
            &[
                &[0, 0, 0],
                &[1, 0, 0],
                &[0, 1, 0],
                &[0, 0, 1],
                &[1, 1, 0],
                &[1, 0, 1],
                &[0, 1, 1],
                &[1, 1, 1],
            ],
        );
        assert_eq!(cube.facets().len(), 6);
        assert_eq!(cube.vertices().len(), 8);
        let tri = poly(3, &[&[0, 0, 0], &[3, 0, 0], &[0, 3, 0]]);
        assert_eq!(tri.affine_dim(), 2);
        assert_eq!(tri.lstar(), 1);
        let s = tri.minkowski_sum(&cube).unwrap();
        assert_eq!(s.affine_dim(), 3);
        // triangular prism with side 4 and height 1: no interior points
        assert_eq!(s.lstar(), 0);
        assert_eq!(s.vertices().len(), 10);
    }
}
