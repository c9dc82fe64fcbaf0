//! The toric variety `X_Delta` of a full-dimensional lattice polytope and the
//! grading of its Cox ring.
//!
//! The fan is the normal fan of `Delta`: one ray per facet (its primitive
//! inner normal) and one maximal cone per vertex. A Weil divisor
//! `sum_j a_j D_j` is stored as its coefficient vector `a` in ray order; its
//! class in the Chow group is `a` modulo the characters `(<m, n_j>)_j`. The
//! monomials of degree `[a]` correspond to the lattice points of
//! `{m : <m, n_j> >= -a_j}`, with exponent vector `(<m, n_j> + a_j)_j`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{self, dot};
use crate::error::{Error, Result};
use crate::lattice_geometry::{for_each_combination, scan_box, LatticePolytope, Point, PolytopeFamily};

/// `([(j_k, num_k)], den)` standing for `sum_k (num_k / den) n_{j_k}`.
type ConeCombination = (Vec<(usize, i128)>, i128);

/// A complete fan given by rays and maximal cones. Only constructible as a
/// normal fan, which guarantees completeness.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalFan {
    dim: usize,
    rays: Vec<Point>,
    max_cones: Vec<Vec<usize>>,
    /// For each `u` in `e_0, -e_0, e_1, -e_1, ...`: `u = sum_k (num_k / den) n_{j_k}`
    /// with `num_k >= 0`, as `([(j_k, num_k)], den)`.
    box_certificates: Vec<ConeCombination>,
}

impl NormalFan {
    /// Normal fan of a full-dimensional polytope. Rays are sorted
    /// lexicographically; cones are listed in vertex order.
    pub fn of_polytope(delta: &LatticePolytope) -> Result<Self> {
        if !delta.is_full_dimensional() {
            return Err(Error::NotFullDimensional {
                dim: delta.affine_dim(),
                ambient: delta.ambient_dim(),
            });
        }
        // Facets of a full-dimensional polytope have distinct normals and are
        // already sorted by normal.
        let rays: Vec<Point> = delta.facets().iter().map(|f| f.normal.clone()).collect();
        let max_cones = delta
            .vertices()
            .iter()
            .map(|v| {
                delta
                    .facets()
                    .iter()
                    .enumerate()
                    .filter(|(_, f)| f.slack(v) == 0)
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect::<Vec<Vec<usize>>>();
        let n = delta.ambient_dim();
        let mut box_certificates = Vec::with_capacity(2 * n);
        for i in 0..n {
            for sign in [1i64, -1] {
                let mut u = vec![0i64; n];
                u[i] = sign;
                // the cone of a vertex minimizing <u, .> contains u
                let min = delta.vertices().iter().map(|v| dot(&u, v)).min().expect("nonempty");
                let k = delta
                    .vertices()
                    .iter()
                    .position(|v| dot(&u, v) == min)
                    .expect("nonempty");
                let cert = simplicial_combination(&rays, &max_cones[k], &u)?
                    .ok_or(Error::Internal("direction outside the cone of its minimizer"))?;
                box_certificates.push(cert);
            }
        }
        Ok(Self {
            dim: n,
            rays,
            max_cones,
            box_certificates,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Point] {
        &self.rays
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    /// `(<m, n_j>)_j`, the principal divisor of the character `m`.
    pub fn character(&self, m: &[i64]) -> Result<Vec<i64>> {
        self.rays.iter().map(|n| arith::to_i64(dot(n, m))).collect()
    }

    fn support_coeffs(&self, p: &LatticePolytope) -> Result<Vec<i64>> {
        if p.ambient_dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: p.ambient_dim(),
            });
        }
        self.rays
            .iter()
            .map(|n| {
                let min = p.vertices().iter().map(|v| dot(n, v)).min().expect("nonempty");
                arith::to_i64(-min)
            })
            .collect()
    }

    /// For each maximal cone, a vertex `m` of `p` with `<m, n_j> = -a_j` on
    /// every ray of the cone, if one exists for all cones.
    pub fn cartier_data(&self, p: &LatticePolytope) -> Result<Option<Vec<Point>>> {
        let a = self.support_coeffs(p)?;
        let mut data = Vec::with_capacity(self.max_cones.len());
        for cone in &self.max_cones {
            let found = p.vertices().iter().find(|v| {
                cone.iter()
                    .all(|&j| dot(&self.rays[j], v) == -(a[j] as i128))
            });
            match found {
                Some(v) => data.push(v.clone()),
                None => return Ok(None),
            }
        }
        Ok(Some(data))
    }

    /// `a_j = -min_{m in P} <m, n_j>`, checked so that `{m : <m, n_j> >= -a_j}`
    /// reconstructs `P`.
    pub fn divisor_coeffs(&self, p: &LatticePolytope) -> Result<Vec<i64>> {
        let a = self.support_coeffs(p)?;
        match self.cartier_data(p)? {
            Some(_) => Ok(a),
            None => Err(Error::NotRefined),
        }
    }

    /// Whether `p` carries Cartier data on every maximal cone, i.e. the
    /// divisor with coefficients `divisor_coeffs(p)` is Cartier and nef with
    /// polytope `p`.
    pub fn is_cartier_nef(&self, p: &LatticePolytope) -> bool {
        matches!(self.cartier_data(p), Ok(Some(_)))
    }

    /// Dimensions of `H^i(X, O(-D))` and `H^i(X, O(D + K))` for the nef
    /// divisor `D` with polytope `p`: each is concentrated in a single degree
    /// (`dim p`, resp. `n - dim p`) where it equals `lstar(p)`.
    pub fn cohomology_dims(&self, p: &LatticePolytope) -> Result<CohomologyDims> {
        if !self.is_cartier_nef(p) {
            return Err(Error::NotNef);
        }
        let n = self.dim;
        let d = p.affine_dim();
        let l = p.lstar();
        let mut h_minus = vec![0; n + 1];
        let mut h_plus_k = vec![0; n + 1];
        h_minus[d] = l;
        h_plus_k[n - d] = l;
        Ok(CohomologyDims { h_minus, h_plus_k })
    }

    /// Lattice points of `{m : <m, n_j> >= -c_j}` in lexicographic order.
    pub fn polyhedron_lattice_points(&self, coeffs: &[i64]) -> Result<Vec<Point>> {
        let n = self.dim;
        let Some((lo, hi)) = self.polyhedron_box(coeffs)? else {
            return Ok(Vec::new());
        };
        let mut out = Vec::new();
        scan_box(&lo, &hi, |m| {
            let inside = self
                .rays
                .iter()
                .zip(coeffs)
                .all(|(r, &c)| dot(r, m) >= -(c as i128));
            if inside {
                out.push(m.to_vec());
            }
        });
        debug_assert!(out.iter().all(|p| p.len() == n));
        Ok(out)
    }

    /// Integer bounding box of the polyhedron, or `None` when it is visibly
    /// empty. Writing `+-e_i = sum_k (num_k / den) n_{j_k}` with `num_k >= 0`
    /// gives `+-m_i >= -sum_k num_k c_{j_k} / den` on the polyhedron.
    fn polyhedron_box(&self, coeffs: &[i64]) -> Result<Option<(Point, Point)>> {
        let n = self.dim;
        let mut lo = vec![0i64; n];
        let mut hi = vec![0i64; n];
        for (idx, (combo, den)) in self.box_certificates.iter().enumerate() {
            let bound = combo.iter().try_fold(0i128, |acc, &(j, num)| {
                arith::add(acc, arith::mul(num, -(coeffs[j] as i128))?)
            })?;
            // sign * m_i >= bound / den
            let (i, sign) = (idx / 2, idx % 2 == 0);
            if sign {
                lo[i] = arith::to_i64(arith::ceil_div(bound, *den))?;
            } else {
                hi[i] = arith::to_i64(-arith::ceil_div(bound, *den))?;
            }
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Ok(None);
        }
        Ok(Some((lo, hi)))
    }

    /// Solves `(<m, n_j>)_j = d` over the integers.
    pub fn solve_character(&self, d: &[i64]) -> Result<Option<Point>> {
        if d.len() != self.rays.len() {
            return Err(Error::DimensionMismatch {
                expected: self.rays.len(),
                found: d.len(),
            });
        }
        let ech = arith::echelon(&self.rays, self.dim)?;
        if ech.rank != self.dim {
            return Err(Error::Internal("fan rays do not span"));
        }
        let a: Vec<Vec<i128>> = ech
            .pivot_rows
            .iter()
            .map(|&j| self.rays[j].iter().map(|&x| x as i128).collect())
            .collect();
        let b: Vec<i128> = ech.pivot_rows.iter().map(|&j| d[j] as i128).collect();
        let (num, den) = arith::cramer(&a, &b)?.ok_or(Error::Internal("singular ray block"))?;
        if num.iter().any(|x| x % den != 0) {
            return Ok(None);
        }
        let m = num
            .iter()
            .map(|&x| arith::to_i64(x / den))
            .collect::<Result<Vec<_>>>()?;
        if self.character(&m)? == d {
            Ok(Some(m))
        } else {
            Ok(None)
        }
    }
}

/// `u` as a nonnegative rational combination of `n` linearly independent rays
/// of `cone`, if `u` lies in the cone (Caratheodory).
fn simplicial_combination(
    rays: &[Point],
    cone: &[usize],
    u: &[i64],
) -> Result<Option<ConeCombination>> {
    let n = u.len();
    let b: Vec<i128> = u.iter().map(|&x| x as i128).collect();
    let mut found = None;
    for_each_combination(cone.len(), n, |subset| {
        if found.is_some() {
            return Ok(());
        }
        let js: Vec<usize> = subset.iter().map(|&k| cone[k]).collect();
        // columns are rays: a[r][k] = n_{j_k}[r]
        let a: Vec<Vec<i128>> = (0..n)
            .map(|r| js.iter().map(|&j| rays[j][r] as i128).collect())
            .collect();
        if let Some((num, den)) = arith::cramer(&a, &b)? {
            if num.iter().all(|&x| x >= 0) {
                found = Some((js.into_iter().zip(num).collect(), den));
            }
        }
        Ok(())
    })?;
    Ok(found)
}

/// `normal_fan(Delta)`.
pub fn normal_fan(delta: &LatticePolytope) -> Result<NormalFan> {
    NormalFan::of_polytope(delta)
}

/// The fan `X_Delta` for `Delta = Delta_0 + ... + Delta_n`.
pub fn family_fan(family: &PolytopeFamily) -> Result<Arc<NormalFan>> {
    Ok(Arc::new(normal_fan(&family.total_sum()?)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyDims {
    /// `h^i(X, O(-D))` for `i = 0..=n`.
    pub h_minus: Vec<u64>,
    /// `h^i(X, O(D + K))` for `i = 0..=n`.
    pub h_plus_k: Vec<u64>,
}

/// A representative `sum_j a_j D_j` of a class in `A_{n-1}(X)`.
#[derive(Clone, Debug)]
pub struct DivisorClass {
    fan: Arc<NormalFan>,
    coeffs: Vec<i64>,
}

impl DivisorClass {
    pub fn new(fan: Arc<NormalFan>, coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.len() != fan.num_rays() {
            return Err(Error::DimensionMismatch {
                expected: fan.num_rays(),
                found: coeffs.len(),
            });
        }
        Ok(Self { fan, coeffs })
    }

    /// The class whose polytope is `p`.
    pub fn of_polytope(fan: Arc<NormalFan>, p: &LatticePolytope) -> Result<Self> {
        let coeffs = fan.divisor_coeffs(p)?;
        Ok(Self { fan, coeffs })
    }

    /// `beta_0 = sum_j deg(x_j)`, represented by the all-ones vector.
    pub fn beta0(fan: Arc<NormalFan>) -> Self {
        let coeffs = vec![1; fan.num_rays()];
        Self { fan, coeffs }
    }

    pub fn zero(fan: Arc<NormalFan>) -> Self {
        let coeffs = vec![0; fan.num_rays()];
        Self { fan, coeffs }
    }

    pub fn fan(&self) -> &Arc<NormalFan> {
        &self.fan
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    fn same_fan(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.fan, &other.fan) || self.fan == other.fan
    }

    fn zip_with(&self, other: &Self, f: impl Fn(i64, i64) -> Option<i64>) -> Result<Self> {
        if !self.same_fan(other) {
            return Err(Error::FanMismatch);
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| f(a, b).ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            fan: self.fan.clone(),
            coeffs,
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, i64::checked_add)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, i64::checked_sub)
    }

    /// Another representative of the same class: `a + (<m, n_j>)_j`.
    pub fn shifted_by_character(&self, m: &[i64]) -> Result<Self> {
        let chi = Self {
            fan: self.fan.clone(),
            coeffs: self.fan.character(m)?,
        };
        self.try_add(&chi)
    }

    /// Equality in `A_{n-1}(X)`: the difference is a character. Classes on
    /// different fans are never equal.
    pub fn class_equal(&self, other: &Self) -> Result<bool> {
        if !self.same_fan(other) {
            return Ok(false);
        }
        let diff = self.try_sub(other)?;
        Ok(self.fan.solve_character(&diff.coeffs)?.is_some())
    }

    /// Monomial basis of the graded piece `S_[a]`.
    pub fn graded_basis(&self) -> Result<GradedBasis> {
        let points = self.fan.polyhedron_lattice_points(&self.coeffs)?;
        Ok(GradedBasis {
            class: self.clone(),
            points,
        })
    }
}

/// Monomials of one degree, indexed by lattice points in lexicographic order.
#[derive(Clone, Debug)]
pub struct GradedBasis {
    pub class: DivisorClass,
    pub points: Vec<Point>,
}

impl GradedBasis {
    pub fn dim(&self) -> usize {
        self.points.len()
    }

    /// Exponent vector `(<m, n_j> + a_j)_j` of the monomial at lattice point `m`.
    pub fn exponents_of(&self, m: &[i64]) -> Result<Vec<i64>> {
        let chi = self.class.fan.character(m)?;
        chi.iter()
            .zip(&self.class.coeffs)
            .map(|(&x, &a)| x.checked_add(a).ok_or(Error::Overflow))
            .collect()
    }

    pub fn index_of(&self, m: &[i64]) -> Option<usize> {
        self.points
            .binary_search_by(|p| p.as_slice().cmp(m))
            .ok()
    }
}

pub fn graded_basis(c: &DivisorClass) -> Result<GradedBasis> {
    c.graded_basis()
}

/// `alpha_i`, the class of `Delta_i` on `fan`.
pub fn alpha(family: &PolytopeFamily, fan: &Arc<NormalFan>, i: usize) -> Result<DivisorClass> {
    DivisorClass::of_polytope(fan.clone(), family.member(i)?)
}

/// `rho = sum_i alpha_i - beta_0`.
pub fn critical_degree(family: &PolytopeFamily, fan: &Arc<NormalFan>) -> Result<DivisorClass> {
    let mut acc = DivisorClass::zero(fan.clone());
    for i in 0..=family.n() {
        acc = acc.try_add(&alpha(family, fan, i)?)?;
    }
    acc.try_sub(&DivisorClass::beta0(fan.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(n: usize, pts: &[&[i64]]) -> LatticePolytope {
        LatticePolytope::new(n, pts.iter().map(|p| p.to_vec())).unwrap()
    }

    fn unit_square() -> LatticePolytope {
        poly(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])
    }

    fn triangle() -> LatticePolytope {
        poly(2, &[&[0, 0], &[1, 0], &[0, 1]])
    }

    /// Rays of P1 x P1 in lexicographic order: (-1,0), (0,-1), (0,1), (1,0).
    fn p1p1() -> Arc<NormalFan> {
        Arc::new(normal_fan(&unit_square()).unwrap())
    }

    fn p2() -> Arc<NormalFan> {
        Arc::new(normal_fan(&triangle()).unwrap())
    }

    #[test]
    fn classical_fans() {
        let f = p1p1();
        assert_eq!(
            f.rays(),
            &[vec![-1, 0], vec![0, -1], vec![0, 1], vec![1, 0]]
        );
        assert_eq!(f.max_cones().len(), 4);
        let g = p2();
        assert_eq!(g.rays(), &[vec![-1, -1], vec![0, 1], vec![1, 0]]);
        assert_eq!(g.max_cones().len(), 3);
        let rect = poly(2, &[&[0, 0], &[4, 0], &[0, 2], &[4, 2]]);
        assert_eq!(&normal_fan(&rect).unwrap(), f.as_ref());
        assert!(matches!(
            normal_fan(&poly(2, &[&[0, 0], &[1, 0]])),
            Err(Error::NotFullDimensional { dim: 1, ambient: 2 })
        ));
    }

    #[test]
    fn divisor_coefficients() {
        let f = p1p1();
        // order (-1,0), (0,-1), (0,1), (1,0)
        assert_eq!(f.divisor_coeffs(&unit_square()).unwrap(), vec![1, 1, 0, 0]);
        assert_eq!(
            f.divisor_coeffs(&LatticePolytope::origin(2).unwrap()).unwrap(),
            vec![0, 0, 0, 0]
        );
        let seg = poly(2, &[&[0, 0], &[2, 0]]);
        assert_eq!(f.divisor_coeffs(&seg).unwrap(), vec![2, 0, 0, 0]);
        let vertical = poly(2, &[&[0, 0], &[0, 1]]);
        assert_eq!(p2().divisor_coeffs(&vertical).unwrap_err(), Error::NotRefined);
    }

    #[test]
    fn nef_checks() {
        let f = p1p1();
        assert!(f.is_cartier_nef(&unit_square()));
        let seg = poly(2, &[&[0, 0], &[2, 0]]);
        let data = f.cartier_data(&seg).unwrap().unwrap();
        assert!(data.iter().all(|m| m == &vec![0, 0] || m == &vec![2, 0]));
        assert!(!p2().is_cartier_nef(&poly(2, &[&[0, 0], &[0, 1]])));
    }

    #[test]
    fn class_equality() {
        let f = p1p1();
        let c = |v: Vec<i64>| DivisorClass::new(f.clone(), v).unwrap();
        // D for ray (1,0) versus D for ray (-1,0): both the class (1,0)
        assert!(c(vec![0, 0, 0, 1]).class_equal(&c(vec![0, 0, 0, 1])).unwrap());
        assert!(c(vec![0, 0, 0, 1]).class_equal(&c(vec![1, 0, 0, 0])).unwrap());
        assert!(!c(vec![0, 0, 0, 1]).class_equal(&c(vec![0, 0, 1, 0])).unwrap());
        let other = DivisorClass::beta0(p2());
        assert!(!c(vec![1, 1, 1, 1]).class_equal(&other).unwrap());
    }

    #[test]
    fn beta0_is_anticanonical() {
        let f = p1p1();
        let b = DivisorClass::beta0(f.clone());
        assert_eq!(b.coeffs(), &[1, 1, 1, 1]);
        // (2,2): twice a horizontal plus twice a vertical ray divisor
        assert!(b
            .class_equal(&DivisorClass::new(f, vec![0, 0, 2, 2]).unwrap())
            .unwrap());
        assert_eq!(DivisorClass::beta0(p2()).coeffs(), &[1, 1, 1]);
    }

    fn seg_sq_sq() -> PolytopeFamily {
        PolytopeFamily::new(
            2,
            vec![poly(2, &[&[0, 0], &[2, 0]]), unit_square(), unit_square()],
        )
        .unwrap()
    }

    #[test]
    fn critical_degree_examples() {
        let fam = seg_sq_sq();
        let fan = family_fan(&fam).unwrap();
        let rho = critical_degree(&fam, &fan).unwrap();
        // segment (2,0,0,0) + 2 * square (1,1,0,0) - (1,1,1,1)
        assert_eq!(rho.coeffs(), &[3, 1, -1, -1]);
        // the class of bidegree (2,0), represented by 2 * D_{(-1,0)}
        let target = DivisorClass::new(fan.clone(), vec![2, 0, 0, 0]).unwrap();
        assert!(rho.class_equal(&target).unwrap());
        assert_eq!(rho.graded_basis().unwrap().dim(), 3);

        let tri = PolytopeFamily::new(2, vec![triangle(); 3]).unwrap();
        let fan = family_fan(&tri).unwrap();
        let rho = critical_degree(&tri, &fan).unwrap();
        assert!(rho
            .class_equal(&DivisorClass::zero(fan.clone()))
            .unwrap());
        assert_eq!(rho.graded_basis().unwrap().points, vec![vec![1, 1]]);
    }

    #[test]
    fn graded_basis_of_trivial_class() {
        let fan = p2();
        let zero = DivisorClass::beta0(fan.clone())
            .try_sub(&DivisorClass::beta0(fan))
            .unwrap();
        let b = zero.graded_basis().unwrap();
        assert_eq!(b.points, vec![vec![0, 0]]);
        assert_eq!(b.exponents_of(&[0, 0]).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn empty_graded_piece() {
        let fan = p1p1();
        let c = DivisorClass::new(fan, vec![-1, 0, 0, 0]).unwrap();
        assert!(c.graded_basis().unwrap().points.is_empty());
    }

    #[test]
    fn cohomology_examples() {
        let p1 = Arc::new(normal_fan(&poly(1, &[&[0], &[1]])).unwrap());
        let seg = poly(1, &[&[0], &[2]]);
        let h = p1.cohomology_dims(&seg).unwrap();
        assert_eq!(h.h_minus, vec![0, 1]);
        assert_eq!(h.h_plus_k, vec![1, 0]);

        let f = p1p1();
        let h = f.cohomology_dims(&unit_square()).unwrap();
        assert_eq!(h.h_minus, vec![0, 0, 0]);
        let rect = poly(2, &[&[0, 0], &[4, 0], &[0, 2], &[4, 2]]);
        let h = f.cohomology_dims(&rect).unwrap();
        assert_eq!(h.h_minus, vec![0, 0, 3]);
        assert_eq!(h.h_plus_k, vec![3, 0, 0]);

        assert_eq!(
            p2().cohomology_dims(&poly(2, &[&[0, 0], &[0, 1]])).unwrap_err(),
            Error::NotNef
        );
    }
}
