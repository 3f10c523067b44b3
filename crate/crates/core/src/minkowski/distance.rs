use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::body::BodyApprox;
use crate::error::{HullError, Result};
use crate::geometry::sampling::{boundary_samples, per_axis, MidGrid, SAMPLE_CAP};
use crate::geometry::{affine_frame, dist, dot, quickhull_points, Point};

/// Distance from `x` to the simplex spanned by `verts` (any number of
/// affinely independent vertices): the best projection over all faces whose
/// barycentric coordinates are nonnegative.
pub fn dist_to_simplex(x: &[f64], verts: &[&[f64]]) -> f64 {
    let k = verts.len();
    let mut best = verts.iter().map(|v| dist(x, v)).fold(f64::INFINITY, f64::min);
    for mask in 1u32..(1 << k) {
        if mask.count_ones() < 2 {
            continue;
        }
        let face: Vec<&[f64]> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| verts[i]).collect();
        if let Some(d) = project_onto_face(x, &face) {
            best = best.min(d);
        }
    }
    best
}

fn project_onto_face(x: &[f64], face: &[&[f64]]) -> Option<f64> {
    let p0 = face[0];
    let e: Vec<Vec<f64>> = face[1..].iter().map(|v| v.iter().zip(p0).map(|(a, b)| a - b).collect()).collect();
    let r: Vec<f64> = x.iter().zip(p0).map(|(a, b)| a - b).collect();
    let m = e.len();
    let g = DMatrix::from_fn(m, m, |i, j| dot(&e[i], &e[j]));
    let rhs = DVector::from_fn(m, |i, _| dot(&e[i], &r));
    let lam = g.lu().solve(&rhs)?;
    let tol = -1e-12;
    if lam.iter().any(|&l| l < tol) || 1.0 - lam.sum() < tol {
        return None;
    }
    let mut q = p0.to_vec();
    for (l, ei) in lam.iter().zip(&e) {
        q.iter_mut().zip(ei).for_each(|(a, b)| *a += l * b);
    }
    Some(dist(x, &q))
}

/// Distance to the hull of a small point set, treating it as a simplex when
/// it has few enough points and falling back to the nearest point otherwise.
pub fn dist_to_hull_small(x: &[f64], verts: &[&[f64]]) -> f64 {
    if verts.len() <= 10 {
        dist_to_simplex(x, verts)
    } else {
        verts.iter().map(|v| dist(x, v)).fold(f64::INFINITY, f64::min)
    }
}

/// Deterministic sample of the convex hull of `points`: interior grid points,
/// boundary samples and the vertices. Works for hulls of any affine dimension
/// by sampling inside the affine span. The grid has the default resolution
/// per axis.
pub fn hull_samples(points: &[Point]) -> Result<Vec<Point>> {
    sample_hull(points, None)
}

/// As [`hull_samples`] with cubic cells of side `h`.
pub fn hull_samples_at(points: &[Point], h: f64) -> Result<Vec<Point>> {
    sample_hull(points, Some(h))
}

fn sample_hull(points: &[Point], h: Option<f64>) -> Result<Vec<Point>> {
    let (origin, basis) = affine_frame(points);
    let k = basis.len();
    if k == 0 {
        return Ok(vec![Point::new(origin)]);
    }
    let reduced: Vec<Point> = points
        .iter()
        .map(|p| {
            let r: Vec<f64> = p.coords.iter().zip(&origin).map(|(a, b)| a - b).collect();
            Point::new(basis.iter().map(|b| dot(&r, b)).collect())
        })
        .collect();
    let hull = quickhull_points(k, &reduced)?;
    let hs = hull.halfspaces();
    let (lo, hi) = hull.vertex_cloud().bounding_box();
    let grid = match h {
        Some(h) => MidGrid::with_spacing(&lo, &hi, h),
        None => MidGrid::uniform(&lo, &hi, per_axis(k)),
    };
    if grid.counts.iter().try_fold(1usize, |a, &c| a.checked_mul(c)).is_none_or(|n| n > SAMPLE_CAP) {
        return Err(HullError::TooLarge { size: grid.counts.iter().product::<usize>().max(SAMPLE_CAP + 1), limit: SAMPLE_CAP });
    }
    let spacing = grid.step.iter().copied().fold(f64::INFINITY, f64::min);
    let mut samples = grid.select(|x| hs.contains(x));
    if k > 1 {
        samples.extend(boundary_samples(&hull.boundary, spacing));
    }
    samples.extend(hull.vertices.iter().cloned());
    Ok(samples
        .into_iter()
        .map(|c| {
            let mut x = origin.clone();
            for (ci, b) in c.coords.iter().zip(&basis) {
                x.iter_mut().zip(b).for_each(|(a, bb)| *a += ci * bb);
            }
            Point::new(x)
        })
        .collect())
}

/// Hausdorff distance between a body and the convex hull of a reference
/// point set, max over both directed distances evaluated on samples.
pub fn hausdorff_to_hull(body: &BodyApprox, hull_points: &[Point]) -> Result<f64> {
    let hull_body = BodyApprox::convex(body.dim(), hull_points.to_vec())?;
    let from_hull = hull_samples(hull_points)?
        .par_iter()
        .map(|x| body.distance(&x.coords))
        .reduce(|| 0.0, f64::max);
    let from_body = body
        .points()
        .par_iter()
        .map(|x| hull_body.distance(&x.coords))
        .reduce(|| 0.0, f64::max);
    Ok(from_hull.max(from_body))
}
