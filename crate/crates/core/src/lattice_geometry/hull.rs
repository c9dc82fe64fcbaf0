//! Exact convex hulls by gift wrapping.
//!
//! The affine hull is found first by row reduction and the points are
//! projected onto coordinates on which that projection is injective, leaving
//! a full-dimensional problem in `Z^d`. A first facet is reached by
//! repeatedly rotating a supporting hyperplane about its contact face; the
//! others are reached by rotating about each ridge of a known facet. Ridges
//! come from the hull of the facet's points, one dimension down.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec::Vec;

use crate::arith::{self, dot, primitive, vec_sub};
use crate::error::{Error, Result};

use super::{Equation, Facet, Point};

pub(super) struct Hull {
    pub dim: usize,
    pub vertices: Vec<Point>,
    pub facets: Vec<Facet>,
    pub equations: Vec<Equation>,
}

/// Affine hull data of a point set.
struct AffineFrame {
    dim: usize,
    /// Coordinates on which projection is injective on the affine hull.
    coords: Vec<usize>,
    equations: Vec<Equation>,
}

fn differences(points: &[Point], base: &[i64]) -> Result<Vec<Point>> {
    points.iter().map(|p| vec_sub(p, base)).collect()
}

fn affine_frame(ambient: usize, points: &[Point]) -> Result<AffineFrame> {
    let base = &points[0];
    let diffs = differences(&points[1..], base)?;
    let ech = arith::echelon(&diffs, ambient)?;
    let mut equations = arith::kernel_basis(&diffs, ambient)?
        .into_iter()
        .map(|mut normal| {
            arith::canonical_sign(&mut normal);
            let value = arith::to_i64(dot(&normal, base))?;
            Ok(Equation { normal, value })
        })
        .collect::<Result<Vec<_>>>()?;
    equations.sort();
    Ok(AffineFrame {
        dim: ech.rank,
        coords: ech.pivot_cols,
        equations,
    })
}

fn project(p: &[i64], coords: &[usize]) -> Point {
    coords.iter().map(|&c| p[c]).collect()
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order.
pub(crate) fn for_each_combination(
    n: usize,
    k: usize,
    mut f: impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if k > n {
        return Ok(());
    }
    let mut idx: Vec<usize> = (0..k).collect();
    'outer: loop {
        f(&idx)?;
        let mut i = k;
        while i > 0 {
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                continue 'outer;
            }
        }
        return Ok(());
    }
}

/// Indices of the points minimizing `<c, .>`, and that minimum.
fn contact(points: &[Point], c: &[i64]) -> (Vec<usize>, i128) {
    let values: Vec<i128> = points.iter().map(|p| dot(c, p)).collect();
    let min = *values.iter().min().expect("nonempty");
    let tight = (0..points.len()).filter(|&i| values[i] == min).collect();
    (tight, min)
}

fn face_dim(points: &[Point], face: &[usize], d: usize) -> Result<usize> {
    let base = &points[face[0]];
    let diffs = face[1..]
        .iter()
        .map(|&i| vec_sub(&points[i], base))
        .collect::<Result<Vec<_>>>()?;
    arith::rank(&diffs, d)
}

/// Tilts the supporting hyperplane `<c, x> >= h` about the face `face`
/// towards `w` (orthogonal to `c` and to the face) until it touches another
/// point. The result supports the polytope and contains `face` plus at least
/// one point outside it.
fn rotate(points: &[Point], c: &[i64], h: i128, face: &[usize], w: &[i64]) -> Result<Point> {
    let origin = &points[face[0]];
    let w_origin = dot(w, origin);
    // maximize -<w, x - origin> / (<c, x> - h) over points off the hyperplane
    let mut best: Option<(i128, i128)> = None;
    for p in points {
        let den = dot(c, p) - h;
        if den == 0 {
            continue;
        }
        let num = w_origin - dot(w, p);
        let better = match best {
            None => true,
            Some((bn, bd)) => arith::mul(num, bd)? > arith::mul(bn, den)?,
        };
        if better {
            best = Some((num, den));
        }
    }
    let (num, den) = best.ok_or(Error::Internal("rotation without points off the face"))?;
    let normal = w
        .iter()
        .zip(c)
        .map(|(&wi, &ci)| arith::add(arith::mul(den, wi as i128)?, arith::mul(num, ci as i128)?))
        .collect::<Result<Vec<_>>>()?;
    primitive(&normal)
}

/// A vector orthogonal to `c` and to the directions of `face`, if the face
/// has codimension at least two.
fn tilt_direction(points: &[Point], face: &[usize], c: &[i64], d: usize) -> Result<Option<Point>> {
    let mut rows = differences(
        &face[1..].iter().map(|&i| points[i].clone()).collect::<Vec<_>>(),
        &points[face[0]],
    )?;
    rows.push(c.to_vec());
    Ok(arith::kernel_basis(&rows, d)?.into_iter().next())
}

fn initial_facet(points: &[Point], d: usize) -> Result<Point> {
    let mut c: Point = alloc::vec![0; d];
    c[0] = 1;
    loop {
        let (face, h) = contact(points, &c);
        if face_dim(points, &face, d)? == d - 1 {
            return Ok(c);
        }
        let w = tilt_direction(points, &face, &c, d)?
            .ok_or(Error::Internal("face of full codimension"))?;
        c = rotate(points, &c, h, &face, &w)?;
    }
}

/// Inner facet normals and minima of a full-dimensional point set in `Z^d`.
fn full_dimensional_facets(points: &[Point], d: usize) -> Result<Vec<(Point, i128)>> {
    if d == 1 {
        let (_, lo) = contact(points, &[1]);
        let (_, hi) = contact(points, &[-1]);
        return Ok(alloc::vec![(alloc::vec![-1], hi), (alloc::vec![1], lo)]);
    }
    let first = initial_facet(points, d)?;
    let mut known: BTreeSet<Point> = BTreeSet::new();
    let mut queue: VecDeque<Point> = VecDeque::new();
    known.insert(first.clone());
    queue.push_back(first);
    let mut out = Vec::new();
    while let Some(c) = queue.pop_front() {
        let (face, h) = contact(points, &c);
        out.push((c.clone(), h));
        let face_points: Vec<Point> = face.iter().map(|&i| points[i].clone()).collect();
        let ridges = hull(d, face_points.clone())?;
        for g in &ridges.facets {
            let ridge: Vec<usize> = face
                .iter()
                .copied()
                .filter(|&i| g.slack(&points[i]) == 0)
                .collect();
            let mut w = tilt_direction(points, &ridge, &c, d)?
                .ok_or(Error::Internal("ridge of wrong dimension"))?;
            // Orient w into the facet, away from the ridge.
            let origin = dot(&w, &points[ridge[0]]);
            if face_points.iter().any(|p| dot(&w, p) < origin) {
                w.iter_mut().for_each(|x| *x = -*x);
            }
            let next = rotate(points, &c, h, &ridge, &w)?;
            if known.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Convex hull of `points` (nonempty, coordinates already validated).
pub(super) fn hull(ambient: usize, mut points: Vec<Point>) -> Result<Hull> {
    points.sort();
    points.dedup();
    let frame = affine_frame(ambient, &points)?;
    let d = frame.dim;
    if d == 0 {
        return Ok(Hull {
            dim: 0,
            vertices: points,
            facets: Vec::new(),
            equations: frame.equations,
        });
    }

    let projected: Vec<Point> = points.iter().map(|p| project(p, &frame.coords)).collect();
    let facets_proj = full_dimensional_facets(&projected, d)?;

    // A point is a vertex when the normals of the facets through it span.
    let mut vertices = Vec::new();
    for (p, q) in points.iter().zip(&projected) {
        let through: Vec<Point> = facets_proj
            .iter()
            .filter(|(n, min)| dot(n, q) == *min)
            .map(|(n, _)| n.clone())
            .collect();
        if through.len() >= d && arith::rank(&through, d)? == d {
            vertices.push(p.clone());
        }
    }

    let mut facets = facets_proj
        .into_iter()
        .map(|(normal, min)| {
            let mut lifted = alloc::vec![0i64; ambient];
            for (&c, &x) in frame.coords.iter().zip(&normal) {
                lifted[c] = x;
            }
            Ok(Facet {
                normal: lifted,
                offset: arith::to_i64(-min)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    facets.sort();

    Ok(Hull {
        dim: d,
        vertices,
        facets,
        equations: frame.equations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn combinations_in_order() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, |s| {
            seen.push(s.to_vec());
            Ok(())
        })
        .unwrap();
        assert_eq!(
            seen,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        let mut count = 0;
        for_each_combination(3, 0, |_| {
            count += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(count, 1);
        for_each_combination(2, 3, |_| panic!("no 3-subsets of 2 elements")).unwrap();
    }

    #[test]
    fn square_with_interior_and_edge_points() {
        let pts = vec![
            vec![0, 0],
            vec![2, 0],
            vec![0, 2],
            vec![2, 2],
            vec![1, 1],
            vec![1, 0],
        ];
        let h = hull(2, pts).unwrap();
        assert_eq!(h.dim, 2);
        assert_eq!(h.vertices, vec![vec![0, 0], vec![0, 2], vec![2, 0], vec![2, 2]]);
        assert_eq!(h.facets.len(), 4);
        assert!(h.equations.is_empty());
    }

    #[test]
    fn planar_triangle_in_space() {
        let pts = vec![vec![0, 0, 1], vec![3, 0, 1], vec![0, 3, 1]];
        let h = hull(3, pts).unwrap();
        assert_eq!(h.dim, 2);
        assert_eq!(h.facets.len(), 3);
        assert_eq!(
            h.equations,
            vec![Equation {
                normal: vec![0, 0, 1],
                value: 1
            }]
        );
    }

    #[test]
    fn cross_polytope_in_four_dimensions() {
        let mut pts = Vec::new();
        for i in 0..4 {
            for s in [-1, 1] {
                let mut e = vec![0; 4];
                e[i] = s;
                pts.push(e);
            }
        }
        pts.push(vec![0; 4]);
        let h = hull(4, pts).unwrap();
        assert_eq!(h.vertices.len(), 8);
        assert_eq!(h.facets.len(), 16);
        assert!(h.facets.iter().all(|f| f.offset == 1));
    }
}
