//! Quickhull in R^n for 1 <= n <= 8.
//!
//! The hull is kept as a list of oriented (n-1)-simplices. Points within
//! [`TAU_GEOM`] of a facet hyperplane (on diameter-normalized coordinates) count
//! as lying on it, and every tie is broken by lowest index so the output is a
//! pure function of the input order.

use std::collections::HashMap;

use nalgebra::DMatrix;

use super::{
    bounding_box, det_rows, dist, dot, Orientation, OrientedSimplex, Point, PointCloud, Polytope,
    SimplicialBoundary, MAX_HULL_DIM, TAU_GEOM,
};
use crate::error::{HullError, Result};

struct Facet {
    verts: Vec<usize>,
    normal: Vec<f64>,
    offset: f64,
    outside: Vec<usize>,
    alive: bool,
}

impl Facet {
    #[inline]
    fn height(&self, p: &[f64]) -> f64 {
        dot(&self.normal, p) - self.offset
    }
}

/// Convex hull of a cloud as a polytope whose vertex list is exactly the set of
/// extreme points, in increasing input-index order.
pub fn quickhull(cloud: &PointCloud) -> Result<Polytope> {
    quickhull_points(cloud.dim, &cloud.points)
}

/// See [`quickhull`].
pub fn quickhull_points(dim: usize, points: &[Point]) -> Result<Polytope> {
    Ok(quickhull_indices(dim, points)?.0)
}

/// Hull polytope together with the input indices of its vertices.
pub fn quickhull_indices(dim: usize, points: &[Point]) -> Result<(Polytope, Vec<usize>)> {
    if dim == 0 || dim > MAX_HULL_DIM {
        return Err(HullError::Unsupported(format!(
            "hull computation supports 1 <= n <= {MAX_HULL_DIM}, got n = {dim}"
        )));
    }
    if let Some(p) = points.iter().find(|p| p.dim() != dim) {
        return Err(HullError::DimensionMismatch { expected: dim, got: p.dim() });
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(HullError::InvalidInput("non-finite coordinate".into()));
    }
    if points.len() < dim + 1 {
        return Err(HullError::DegenerateInput(format!(
            "{} points cannot span R^{dim}",
            points.len()
        )));
    }
    let normalized = normalize(dim, points);
    let mut subset: Vec<usize> = (0..points.len()).collect();
    // A second pass is needed only when a tie in farthest-point selection put a
    // non-extreme point on the hull; it cannot recur more than a few times.
    for _ in 0..4 {
        let sub_pts: Vec<&[f64]> = subset.iter().map(|&i| normalized[i].as_slice()).collect();
        let facets = build_hull(dim, &sub_pts)?;
        let used = used_vertices(&facets);
        let extreme: Vec<usize> = used
            .iter()
            .copied()
            .filter(|&v| is_extreme(dim, v, &facets))
            .collect();
        if extreme.len() == used.len() {
            let original: Vec<usize> = used.iter().map(|&v| subset[v]).collect();
            let vertices = original.iter().map(|&i| points[i].clone()).collect();
            return Ok((assemble(dim, vertices, &facets, &used), original));
        }
        subset = extreme.iter().map(|&v| subset[v]).collect();
    }
    Err(HullError::DegenerateInput("hull vertex set did not stabilize".into()))
}

fn normalize(dim: usize, points: &[Point]) -> Vec<Vec<f64>> {
    let (lo, hi) = bounding_box(dim, points.iter());
    let diag = dist(&lo, &hi);
    let scale = if diag > 0.0 { diag } else { 1.0 };
    points
        .iter()
        .map(|p| p.coords.iter().zip(&lo).map(|(x, l)| (x - l) / scale).collect())
        .collect()
}

fn build_hull(dim: usize, pts: &[&[f64]]) -> Result<Vec<Facet>> {
    if dim == 1 {
        return hull_1d(pts);
    }
    let simplex = initial_simplex(dim, pts)?;
    let interior: Vec<f64> = (0..dim)
        .map(|k| simplex.iter().map(|&i| pts[i][k]).sum::<f64>() / (dim + 1) as f64)
        .collect();

    let mut facets: Vec<Facet> = (0..=dim)
        .map(|skip| {
            let verts: Vec<usize> = simplex
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != skip)
                .map(|(_, &v)| v)
                .collect();
            make_facet(verts, pts, &interior)
        })
        .collect();

    let mut in_simplex = vec![false; pts.len()];
    for &v in &simplex {
        in_simplex[v] = true;
    }
    for i in (0..pts.len()).filter(|&i| !in_simplex[i]) {
        if let Some(f) = facets.iter_mut().find(|f| f.height(pts[i]) > TAU_GEOM) {
            f.outside.push(i);
        }
    }

    while let Some(fi) = facets.iter().position(|f| f.alive && !f.outside.is_empty()) {
        let eye = farthest(&facets[fi], pts);
        let visible: Vec<usize> = facets
            .iter()
            .enumerate()
            .filter(|(_, f)| f.alive && f.height(pts[eye]) > TAU_GEOM)
            .map(|(i, _)| i)
            .collect();

        let mut ridge_count: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut ridge_order: Vec<Vec<usize>> = Vec::new();
        for &vi in &visible {
            for r in ridges(&facets[vi].verts) {
                let c = ridge_count.entry(r.clone()).or_insert(0);
                if *c == 0 {
                    ridge_order.push(r);
                }
                *c += 1;
            }
        }

        let mut orphans: Vec<usize> = Vec::new();
        for &vi in &visible {
            facets[vi].alive = false;
            orphans.append(&mut facets[vi].outside);
        }
        orphans.retain(|&p| p != eye);
        orphans.sort_unstable();
        orphans.dedup();

        let first_new = facets.len();
        for r in ridge_order.into_iter().filter(|r| ridge_count[r] == 1) {
            let mut verts = r;
            verts.push(eye);
            facets.push(make_facet(verts, pts, &interior));
        }
        for p in orphans {
            if let Some(f) = facets[first_new..].iter_mut().find(|f| f.height(pts[p]) > TAU_GEOM) {
                f.outside.push(p);
            }
        }
    }
    facets.retain(|f| f.alive);
    Ok(facets)
}

fn hull_1d(pts: &[&[f64]]) -> Result<Vec<Facet>> {
    let lo = (0..pts.len()).min_by(|&a, &b| pts[a][0].total_cmp(&pts[b][0]).then(a.cmp(&b))).unwrap();
    let hi = (0..pts.len()).max_by(|&a, &b| pts[a][0].total_cmp(&pts[b][0]).then(b.cmp(&a))).unwrap();
    if pts[hi][0] - pts[lo][0] <= TAU_GEOM {
        return Err(HullError::DegenerateInput("all points coincide".into()));
    }
    Ok(vec![
        Facet { verts: vec![lo], normal: vec![-1.0], offset: -pts[lo][0], outside: vec![], alive: true },
        Facet { verts: vec![hi], normal: vec![1.0], offset: pts[hi][0], outside: vec![], alive: true },
    ])
}

fn farthest(f: &Facet, pts: &[&[f64]]) -> usize {
    let mut best = f.outside[0];
    let mut best_h = f.height(pts[best]);
    for &p in &f.outside[1..] {
        let h = f.height(pts[p]);
        if h > best_h || (h == best_h && p < best) {
            best = p;
            best_h = h;
        }
    }
    best
}

/// Picks n+1 points greedily maximizing the distance to the affine span of
/// those already chosen.
fn initial_simplex(dim: usize, pts: &[&[f64]]) -> Result<Vec<usize>> {
    let first = (0..pts.len())
        .min_by(|&a, &b| pts[a][0].total_cmp(&pts[b][0]).then(a.cmp(&b)))
        .unwrap();
    let mut chosen = vec![first];
    let mut basis: Vec<Vec<f64>> = Vec::new();
    while chosen.len() < dim + 1 {
        let mut best = None;
        let mut best_r = TAU_GEOM;
        for i in 0..pts.len() {
            let r = residual(pts[i], pts[first], &basis);
            let norm = dot(&r, &r).sqrt();
            if norm > best_r {
                best_r = norm;
                best = Some((i, r));
            }
        }
        let Some((i, r)) = best else {
            return Err(HullError::DegenerateInput(format!(
                "points span only a {}-dimensional affine subspace of R^{dim}",
                chosen.len() - 1
            )));
        };
        chosen.push(i);
        basis.push(r.iter().map(|x| x / best_r).collect());
    }
    Ok(chosen)
}

fn residual(p: &[f64], origin: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut r: Vec<f64> = p.iter().zip(origin).map(|(a, b)| a - b).collect();
    for b in basis {
        let c = dot(&r, b);
        r.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
    }
    r
}

fn make_facet(mut verts: Vec<usize>, pts: &[&[f64]], interior: &[f64]) -> Facet {
    let n = interior.len();
    let p0 = pts[verts[0]];
    let edges: Vec<Vec<f64>> = verts[1..]
        .iter()
        .map(|&v| pts[v].iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    let mut normal: Vec<f64> = (0..n)
        .map(|j| {
            let minor: Vec<Vec<f64>> = edges
                .iter()
                .map(|e| e.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect())
                .collect();
            let refs: Vec<&[f64]> = minor.iter().map(Vec::as_slice).collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * det_rows(&refs)
        })
        .collect();
    let norm = dot(&normal, &normal).sqrt();
    if norm > 0.0 {
        normal.iter_mut().for_each(|x| *x /= norm);
    }
    let mut offset = dot(&normal, p0);
    if dot(&normal, interior) - offset > 0.0 {
        normal.iter_mut().for_each(|x| *x = -*x);
        offset = -offset;
    }
    // Order vertices so that the cone over the facet from the interior point
    // has positive volume.
    let rows: Vec<Vec<f64>> = verts
        .iter()
        .map(|&v| pts[v].iter().zip(interior).map(|(a, b)| a - b).collect())
        .collect();
    let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
    if det_rows(&refs) < 0.0 {
        verts.swap(0, 1);
    }
    Facet { verts, normal, offset, outside: Vec::new(), alive: true }
}

fn ridges(verts: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    (0..verts.len()).map(move |skip| {
        let mut r: Vec<usize> = verts
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != skip)
            .map(|(_, &v)| v)
            .collect();
        r.sort_unstable();
        r
    })
}

fn used_vertices(facets: &[Facet]) -> Vec<usize> {
    let mut v: Vec<usize> = facets.iter().flat_map(|f| f.verts.iter().copied()).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// A hull vertex is extreme iff the normals of its incident facets span R^n
/// (its normal cone is full-dimensional).
fn is_extreme(dim: usize, v: usize, facets: &[Facet]) -> bool {
    let normals: Vec<&Vec<f64>> = facets
        .iter()
        .filter(|f| f.verts.contains(&v))
        .map(|f| &f.normal)
        .collect();
    if normals.len() < dim {
        return false;
    }
    let m = DMatrix::from_fn(normals.len(), dim, |i, j| normals[i][j]);
    m.rank(1e-7) == dim
}

fn assemble(dim: usize, vertices: Vec<Point>, facets: &[Facet], used: &[usize]) -> Polytope {
    let remap: HashMap<usize, usize> = used.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let simplices: Vec<OrientedSimplex> = facets
        .iter()
        .map(|f| {
            let verts: Vec<usize> = f.verts.iter().map(|v| remap[v]).collect();
            if dim == 1 {
                let orientation =
                    if f.normal[0] > 0.0 { Orientation::Positive } else { Orientation::Negative };
                OrientedSimplex { vertices: verts, orientation }
            } else {
                OrientedSimplex::positive(verts)
            }
        })
        .collect();
    let facet_lists = simplices.iter().map(|s| s.vertices.clone()).collect();
    let boundary = SimplicialBoundary { dim, points: vertices.clone(), simplices };
    Polytope::from_parts_unchecked(dim, vertices, facet_lists, boundary)
}
