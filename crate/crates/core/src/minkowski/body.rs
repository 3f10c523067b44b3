use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::distance::{dist_to_hull_small, dist_to_simplex};
use crate::error::{HullError, Result};
use crate::geometry::sampling::{per_axis, MidGrid};
use crate::geometry::{
    min_enclosing_ball, quickhull_points, scale_of, HalfspaceRep, Point, PointCloud, Polytope, TAU_GEOM,
};

/// A convex body given by its vertices. Full-dimensional pieces carry their
/// hull; lower-dimensional ones (segments in the plane, say) only their
/// vertices.
#[derive(Debug, Clone)]
pub struct ConvexPiece {
    pub vertices: Vec<Point>,
    pub hull: Option<(Polytope, HalfspaceRep)>,
}

impl ConvexPiece {
    pub fn new(dim: usize, points: Vec<Point>) -> Result<Self> {
        match quickhull_points(dim, &points) {
            Ok(poly) => {
                let hs = poly.halfspaces();
                Ok(Self { vertices: poly.vertices.clone(), hull: Some((poly, hs)) })
            }
            Err(HullError::DegenerateInput(_)) => Ok(Self { vertices: dedup_points(points), hull: None }),
            Err(e) => Err(e),
        }
    }

    pub fn volume(&self) -> f64 {
        self.hull.as_ref().map_or(0.0, |(p, _)| p.volume())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.hull.as_ref().is_some_and(|(_, hs)| hs.contains(x))
    }

    /// Euclidean distance from `x` to the piece.
    pub fn distance(&self, x: &[f64]) -> f64 {
        match &self.hull {
            Some((poly, hs)) => {
                if hs.contains(x) {
                    return 0.0;
                }
                let b = &poly.boundary;
                b.simplices
                    .iter()
                    .map(|s| {
                        let verts: Vec<&[f64]> = s.vertices.iter().map(|&v| b.points[v].coords.as_slice()).collect();
                        dist_to_simplex(x, &verts)
                    })
                    .fold(f64::INFINITY, f64::min)
            }
            None => {
                let verts: Vec<&[f64]> = self.vertices.iter().map(|p| p.coords.as_slice()).collect();
                dist_to_hull_small(x, &verts)
            }
        }
    }

    fn scaled(&self, s: f64) -> Self {
        Self {
            vertices: self.vertices.iter().map(|p| p.scaled(s)).collect(),
            hull: self.hull.as_ref().map(|(p, _)| {
                let q = p.scaled(s);
                let hs = q.halfspaces();
                (q, hs)
            }),
        }
    }
}

/// Regular lattice `offset + spacing * Z^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub spacing: f64,
    pub offset: Vec<f64>,
}

impl Lattice {
    fn key(&self, x: &[f64]) -> Vec<i64> {
        x.iter().zip(&self.offset).map(|(v, o)| ((v - o) / self.spacing).round() as i64).collect()
    }

    fn point(&self, key: &[i64]) -> Point {
        Point::new(key.iter().zip(&self.offset).map(|(&k, o)| o + k as f64 * self.spacing).collect())
    }
}

/// Body approximation used by the Minkowski experiments.
#[derive(Debug, Clone)]
pub enum BodyApprox {
    /// Union of convex pieces; exact up to the volume evaluation.
    Pieces { dim: usize, pieces: Vec<ConvexPiece> },
    /// Point sample. With a lattice, every point stands for one cell of
    /// volume `spacing^n`; without one the set is finite and has zero volume.
    Cloud { dim: usize, points: Vec<Point>, lattice: Option<Lattice> },
}

impl BodyApprox {
    /// Convex hull of the given points as a single piece.
    pub fn convex(dim: usize, points: Vec<Point>) -> Result<Self> {
        check_dims(dim, &points)?;
        Ok(BodyApprox::Pieces { dim, pieces: vec![ConvexPiece::new(dim, points)?] })
    }

    pub fn from_pieces(dim: usize, pieces: Vec<Vec<Point>>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(HullError::InvalidInput("body has no pieces".into()));
        }
        let pieces = pieces
            .into_iter()
            .map(|p| {
                check_dims(dim, &p)?;
                ConvexPiece::new(dim, p)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BodyApprox::Pieces { dim, pieces })
    }

    /// Finite point set.
    pub fn from_cloud(cloud: &PointCloud) -> Self {
        BodyApprox::Cloud { dim: cloud.dim, points: cloud.points.clone(), lattice: None }
    }

    /// Convex decomposition of a polytope: the user-supplied pieces if any,
    /// the polytope itself when convex, an ear-clipping triangulation in the
    /// plane, and a lattice sample otherwise.
    pub fn from_polytope(poly: &Polytope) -> Result<Self> {
        let dim = poly.dim;
        if !poly.pieces.is_empty() {
            let pieces = poly
                .pieces
                .iter()
                .map(|idx| idx.iter().map(|&i| poly.vertices[i].clone()).collect())
                .collect();
            return Self::from_pieces(dim, pieces);
        }
        if poly.is_convex()? {
            return Self::convex(dim, poly.vertices.clone());
        }
        if dim == 2 {
            if let Some(tris) = ear_clip(poly) {
                let pieces = tris.iter().map(|t| t.iter().map(|&i| poly.vertices[i].clone()).collect()).collect();
                return Self::from_pieces(dim, pieces);
            }
        }
        let (lo, hi) = poly.vertex_cloud().bounding_box();
        let width = lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0, f64::max);
        Ok(Self::lattice_sample(poly, width / per_axis(dim) as f64))
    }

    /// Cell-midpoint lattice sample of a polytope at spacing `h`.
    pub fn lattice_sample(poly: &Polytope, h: f64) -> Self {
        let (lo, hi) = poly.vertex_cloud().bounding_box();
        let grid = MidGrid::with_spacing(&lo, &hi, h);
        let points = grid.select(|x| poly.contains(x));
        let offset = lo.iter().map(|v| v + 0.5 * h).collect();
        BodyApprox::Cloud { dim: poly.dim, points, lattice: Some(Lattice { spacing: h, offset }) }
    }

    pub fn dim(&self) -> usize {
        match self {
            BodyApprox::Pieces { dim, .. } | BodyApprox::Cloud { dim, .. } => *dim,
        }
    }

    /// Sample density in points per unit volume, when defined.
    pub fn density(&self) -> Option<f64> {
        match self {
            BodyApprox::Cloud { lattice: Some(l), dim, .. } => Some(l.spacing.powi(-(*dim as i32))),
            _ => None,
        }
    }

    /// Vertices of all pieces, or the sample points.
    pub fn points(&self) -> Vec<Point> {
        match self {
            BodyApprox::Pieces { pieces, .. } => pieces.iter().flat_map(|p| p.vertices.iter().cloned()).collect(),
            BodyApprox::Cloud { points, .. } => points.clone(),
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            BodyApprox::Pieces { dim, pieces } => union_volume(*dim, pieces),
            BodyApprox::Cloud { points, lattice: Some(l), dim } => points.len() as f64 * l.spacing.powi(*dim as i32),
            BodyApprox::Cloud { lattice: None, .. } => 0.0,
        }
    }

    pub fn hull(&self) -> Result<Polytope> {
        quickhull_points(self.dim(), &self.points())
    }

    /// Vol(min enclosing ball) / Vol(body).
    pub fn beta(&self) -> Result<f64> {
        let vol = self.volume();
        if vol <= 0.0 {
            return Err(HullError::DegenerateInput("body has zero volume".into()));
        }
        let cloud = PointCloud::new(self.points())?;
        Ok(min_enclosing_ball(&cloud).volume() / vol)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            BodyApprox::Pieces { pieces, .. } => pieces.iter().any(|p| p.contains(x)),
            BodyApprox::Cloud { .. } => self.distance(x) <= TAU_GEOM,
        }
    }

    /// Euclidean distance from `x` to the body (to the nearest sample point
    /// for clouds).
    pub fn distance(&self, x: &[f64]) -> f64 {
        match self {
            BodyApprox::Pieces { pieces, .. } => {
                let mut best = f64::INFINITY;
                for p in pieces {
                    best = best.min(p.distance(x));
                    if best == 0.0 {
                        break;
                    }
                }
                best
            }
            BodyApprox::Cloud { points, .. } => {
                points.iter().map(|p| crate::geometry::dist(x, &p.coords)).fold(f64::INFINITY, f64::min)
            }
        }
    }
}

fn check_dims(dim: usize, points: &[Point]) -> Result<()> {
    if points.is_empty() {
        return Err(HullError::InvalidInput("empty piece".into()));
    }
    match points.iter().find(|p| p.dim() != dim) {
        Some(p) => Err(HullError::DimensionMismatch { expected: dim, got: p.dim() }),
        None => Ok(()),
    }
}

/// Removes duplicates up to `TAU_GEOM` relative to the set's extent, keeping
/// first occurrences in order.
pub(crate) fn dedup_points(points: Vec<Point>) -> Vec<Point> {
    let tol = TAU_GEOM * scale_of(&points);
    let mut seen = BTreeMap::new();
    let mut out = Vec::new();
    for p in points {
        let key: Vec<i64> = p.coords.iter().map(|x| (x / tol).round() as i64).collect();
        if seen.insert(key, ()).is_none() {
            out.push(p);
        }
    }
    out
}

/// A ⊕ B.
pub fn minkowski_sum(a: &BodyApprox, b: &BodyApprox) -> Result<BodyApprox> {
    if a.dim() != b.dim() {
        return Err(HullError::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    let dim = a.dim();
    match (a, b) {
        (BodyApprox::Pieces { pieces: pa, .. }, BodyApprox::Pieces { pieces: pb, .. }) => {
            let pairs: Vec<(usize, usize)> = (0..pa.len()).flat_map(|i| (0..pb.len()).map(move |j| (i, j))).collect();
            let pieces = pairs
                .par_iter()
                .map(|&(i, j)| ConvexPiece::new(dim, vertex_sums(&pa[i].vertices, &pb[j].vertices)))
                .collect::<Result<Vec<_>>>()?;
            Ok(BodyApprox::Pieces { dim, pieces })
        }
        // Pieces plus a finite set: a union of translates.
        (BodyApprox::Pieces { pieces, .. }, BodyApprox::Cloud { points, lattice: None, .. })
        | (BodyApprox::Cloud { points, lattice: None, .. }, BodyApprox::Pieces { pieces, .. }) => {
            let pieces = points
                .iter()
                .flat_map(|q| pieces.iter().map(move |p| ConvexPiece::new(dim, vertex_sums(&p.vertices, std::slice::from_ref(q)))))
                .collect::<Result<Vec<_>>>()?;
            Ok(BodyApprox::Pieces { dim, pieces })
        }
        _ => Ok(cloud_sum(a, b)),
    }
}

fn vertex_sums(a: &[Point], b: &[Point]) -> Vec<Point> {
    a.iter().flat_map(|p| b.iter().map(move |q| p.add(q))).collect()
}

/// Pairwise sums of two samples. Lattice samples of equal spacing stay on
/// the summed lattice; everything else is deduplicated up to tolerance.
fn cloud_sum(a: &BodyApprox, b: &BodyApprox) -> BodyApprox {
    let dim = a.dim();
    let (pa, pb) = (a.points(), b.points());
    let lattice = match (a, b) {
        (BodyApprox::Cloud { lattice: Some(la), .. }, BodyApprox::Cloud { lattice: Some(lb), .. })
            if (la.spacing - lb.spacing).abs() <= 1e-12 * la.spacing =>
        {
            Some(Lattice { spacing: la.spacing, offset: la.offset.iter().zip(&lb.offset).map(|(x, y)| x + y).collect() })
        }
        _ => None,
    };
    match lattice {
        Some(l) => {
            let keys: Vec<Vec<Vec<i64>>> = pa
                .par_iter()
                .map(|p| {
                    let mut ks: Vec<Vec<i64>> = pb.iter().map(|q| l.key(&p.add(q).coords)).collect();
                    ks.sort();
                    ks.dedup();
                    ks
                })
                .collect();
            let mut all: Vec<Vec<i64>> = keys.into_iter().flatten().collect();
            all.sort();
            all.dedup();
            let points = all.iter().map(|k| l.point(k)).collect();
            BodyApprox::Cloud { dim, points, lattice: Some(l) }
        }
        None => BodyApprox::Cloud { dim, points: dedup_points(vertex_sums(&pa, &pb)), lattice: None },
    }
}

/// s·A.
pub fn scale_body(a: &BodyApprox, s: f64) -> Result<BodyApprox> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(HullError::NonpositiveScale(s));
    }
    Ok(match a {
        BodyApprox::Pieces { dim, pieces } => {
            BodyApprox::Pieces { dim: *dim, pieces: pieces.iter().map(|p| p.scaled(s)).collect() }
        }
        BodyApprox::Cloud { dim, points, lattice } => BodyApprox::Cloud {
            dim: *dim,
            points: points.iter().map(|p| p.scaled(s)).collect(),
            lattice: lattice
                .as_ref()
                .map(|l| Lattice { spacing: l.spacing * s, offset: l.offset.iter().map(|o| o * s).collect() }),
        },
    })
}

/// A(k) = (1/k)(A ⊕ ... ⊕ A).
///
/// For a union of convex pieces P_1..P_p, A(k) is the union over all
/// compositions c_1 + ... + c_p = k of the convex bodies Σ (c_i/k) P_i, so
/// only C(k+p-1, p-1) pieces are formed. Lattice samples are snapped back
/// onto their original lattice after scaling.
pub fn minkowski_average(a: &BodyApprox, k: usize) -> Result<BodyApprox> {
    if k == 0 {
        return Err(HullError::ParamOutOfRange("k must be at least 1".into()));
    }
    if k == 1 {
        return Ok(a.clone());
    }
    match a {
        BodyApprox::Pieces { dim, pieces } => {
            let mut comps = Vec::new();
            let mut buf = vec![0usize; pieces.len()];
            crate::geometry::sampling::compositions(k, 0, &mut buf, &mut |c| comps.push(c.to_vec()));
            let out = comps
                .par_iter()
                .map(|c| {
                    let mut acc = vec![Point::origin(*dim)];
                    for (p, &ci) in pieces.iter().zip(c) {
                        if ci == 0 {
                            continue;
                        }
                        let w = ci as f64 / k as f64;
                        let scaled: Vec<Point> = p.vertices.iter().map(|v| v.scaled(w)).collect();
                        acc = reduce_to_extreme(*dim, vertex_sums(&acc, &scaled));
                    }
                    ConvexPiece::new(*dim, acc)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(BodyApprox::Pieces { dim: *dim, pieces: out })
        }
        BodyApprox::Cloud { lattice, .. } => {
            let mut acc = a.clone();
            for _ in 1..k {
                acc = cloud_sum(&acc, a);
            }
            let scaled = scale_body(&acc, 1.0 / k as f64)?;
            match (scaled, lattice) {
                (BodyApprox::Cloud { dim, points, .. }, Some(l)) => {
                    let mut keys: Vec<Vec<i64>> = points.iter().map(|p| l.key(&p.coords)).collect();
                    keys.sort();
                    keys.dedup();
                    let points = keys.iter().map(|key| l.point(key)).collect();
                    Ok(BodyApprox::Cloud { dim, points, lattice: Some(l.clone()) })
                }
                (other, _) => Ok(other),
            }
        }
    }
}

fn reduce_to_extreme(dim: usize, pts: Vec<Point>) -> Vec<Point> {
    match quickhull_points(dim, &pts) {
        Ok(p) => p.vertices,
        Err(_) => dedup_points(pts),
    }
}

/// Volume of a union of convex pieces: exact for one piece and in dimensions
/// 1 and 2, midpoint-grid estimate under the sample cap otherwise.
pub fn union_volume(dim: usize, pieces: &[ConvexPiece]) -> f64 {
    let solid: Vec<&ConvexPiece> = pieces.iter().filter(|p| p.hull.is_some()).collect();
    match solid.len() {
        0 => 0.0,
        1 => solid[0].volume(),
        _ if dim == 1 => union_length(solid.iter().map(|p| interval_of(p)).collect()),
        _ if dim == 2 => union_area_2d(&maximal_pieces(&solid)),
        _ => {
            let pts: Vec<Point> = solid.iter().flat_map(|p| p.vertices.iter().cloned()).collect();
            let (lo, hi) = crate::geometry::bounding_box(dim, pts.iter());
            let grid = MidGrid::uniform(&lo, &hi, per_axis(dim));
            grid.count(|x| solid.iter().any(|p| p.contains(x))) as f64 * grid.cell_volume()
        }
    }
}

fn interval_of(p: &ConvexPiece) -> (f64, f64) {
    let xs = p.vertices.iter().map(|v| v.coords[0]);
    (xs.clone().fold(f64::INFINITY, f64::min), xs.fold(f64::NEG_INFINITY, f64::max))
}

fn union_length(mut iv: Vec<(f64, f64)>) -> f64 {
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for (a, b) in iv {
        cur = match cur {
            Some((ca, cb)) if a <= cb => Some((ca, cb.max(b))),
            Some((ca, cb)) => {
                total += cb - ca;
                Some((a, b))
            }
            None => Some((a, b)),
        };
    }
    total + cur.map_or(0.0, |(a, b)| b - a)
}

type Segment = ([f64; 2], [f64; 2]);

/// Drops pieces lying inside another piece; of two equal pieces the one with
/// the lower index stays.
fn maximal_pieces<'a>(pieces: &[&'a ConvexPiece]) -> Vec<&'a ConvexPiece> {
    let boxes: Vec<(Vec<f64>, Vec<f64>)> = pieces
        .iter()
        .map(|p| crate::geometry::bounding_box(p.vertices[0].dim(), p.vertices.iter()))
        .collect();
    let inside = |i: usize, j: usize| {
        let ((li, hi), (lj, hj)) = (&boxes[i], &boxes[j]);
        let slack = 1e-9 * (1.0 + hj.iter().zip(lj).map(|(a, b)| a - b).fold(0.0, f64::max));
        li.iter().zip(lj).all(|(a, b)| *a >= b - slack)
            && hi.iter().zip(hj).all(|(a, b)| *a <= b + slack)
            && pieces[i].vertices.iter().all(|v| pieces[j].contains(&v.coords))
    };
    (0..pieces.len())
        .into_par_iter()
        .filter(|&i| !(0..pieces.len()).any(|j| j != i && inside(i, j) && (j < i || !inside(j, i))))
        .map(|i| pieces[i])
        .collect()
}

/// Above this many edges the pairwise crossing search is replaced by a
/// fixed column rule.
const EXACT_SWEEP_EDGES: usize = 2000;
/// Columns of the fallback rule.
const SWEEP_COLUMNS: usize = 4096;

/// Exact area of a union of convex polygons by a vertical sweep. Between
/// consecutive breakpoints (vertex abscissae and edge crossings) the length
/// of every vertical section is affine, so the midpoint rule is exact there.
fn union_area_2d(pieces: &[&ConvexPiece]) -> f64 {
    let edges: Vec<Vec<Segment>> = pieces
        .iter()
        .map(|p| {
            let (poly, _) = p.hull.as_ref().unwrap();
            let b = &poly.boundary;
            b.simplices
                .iter()
                .map(|s| {
                    let a = &b.points[s.vertices[0]].coords;
                    let c = &b.points[s.vertices[1]].coords;
                    ([a[0], a[1]], [c[0], c[1]])
                })
                .collect()
        })
        .collect();
    let all: Vec<&Segment> = edges.iter().flatten().collect();
    if all.len() > EXACT_SWEEP_EDGES {
        return column_area(&edges);
    }
    let mut xs: Vec<f64> = all.iter().flat_map(|(a, b)| [a[0], b[0]]).collect();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            if let Some(x) = crossing_x(all[i], all[j]) {
                xs.push(x);
            }
        }
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut area = 0.0;
    for w in xs.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        if x1 - x0 <= 0.0 {
            continue;
        }
        let xm = 0.5 * (x0 + x1);
        let sections: Vec<(f64, f64)> = edges.iter().filter_map(|e| section(e, xm)).collect();
        area += union_length(sections) * (x1 - x0);
    }
    area
}

/// Midpoint rule over equal columns with exact union lengths in each
/// column; the error comes only from columns holding a breakpoint.
fn column_area(edges: &[Vec<Segment>]) -> f64 {
    let ranges: Vec<(f64, f64)> = edges
        .iter()
        .map(|e| {
            let xs = e.iter().flat_map(|(a, b)| [a[0], b[0]]);
            (xs.clone().fold(f64::INFINITY, f64::min), xs.fold(f64::NEG_INFINITY, f64::max))
        })
        .collect();
    let x0 = ranges.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let x1 = ranges.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let w = (x1 - x0) / SWEEP_COLUMNS as f64;
    let lengths: Vec<f64> = (0..SWEEP_COLUMNS)
        .into_par_iter()
        .map(|c| {
            let xm = x0 + (c as f64 + 0.5) * w;
            let sections = edges
                .iter()
                .zip(&ranges)
                .filter(|(_, r)| r.0 < xm && xm < r.1)
                .filter_map(|(e, _)| section(e, xm))
                .collect();
            union_length(sections)
        })
        .collect();
    lengths.iter().sum::<f64>() * w
}

fn section(edges: &[Segment], x: f64) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (a, b) in edges {
        let (l, r) = if a[0] <= b[0] { (a, b) } else { (b, a) };
        if l[0] < x && x < r[0] {
            let y = l[1] + (r[1] - l[1]) * (x - l[0]) / (r[0] - l[0]);
            lo = lo.min(y);
            hi = hi.max(y);
        }
    }
    (hi > lo).then_some((lo, hi))
}

fn crossing_x(p: &Segment, q: &Segment) -> Option<f64> {
    let r = [p.1[0] - p.0[0], p.1[1] - p.0[1]];
    let s = [q.1[0] - q.0[0], q.1[1] - q.0[1]];
    let denom = r[0] * s[1] - r[1] * s[0];
    if denom.abs() < 1e-300 {
        return None;
    }
    let d = [q.0[0] - p.0[0], q.0[1] - p.0[1]];
    let t = (d[0] * s[1] - d[1] * s[0]) / denom;
    let u = (d[0] * r[1] - d[1] * r[0]) / denom;
    ((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)).then(|| p.0[0] + t * r[0])
}

/// Counter-clockwise boundary loop of a simple polygon, or `None` when the
/// boundary is not a single cycle.
fn polygon_loop(poly: &Polytope) -> Option<Vec<usize>> {
    let b = &poly.boundary;
    let mut next = BTreeMap::new();
    for s in &b.simplices {
        let (from, to) = match s.orientation {
            crate::geometry::Orientation::Positive => (s.vertices[0], s.vertices[1]),
            crate::geometry::Orientation::Negative => (s.vertices[1], s.vertices[0]),
        };
        if next.insert(from, to).is_some() {
            return None;
        }
    }
    let start = *next.keys().next()?;
    let mut order = vec![start];
    let mut cur = next[&start];
    while cur != start {
        order.push(cur);
        cur = *next.get(&cur)?;
        if order.len() > next.len() {
            return None;
        }
    }
    (order.len() == next.len()).then_some(order)
}

/// Ear-clipping triangulation of a simple polygon (indices into the
/// boundary point list, which equals the vertex list).
fn ear_clip(poly: &Polytope) -> Option<Vec<[usize; 3]>> {
    let pts = &poly.boundary.points;
    let mut ring = polygon_loop(poly)?;
    let tol = TAU_GEOM * scale_of(pts) * scale_of(pts);
    let xy = |i: usize| [pts[i].coords[0], pts[i].coords[1]];
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut tris = Vec::new();
    while ring.len() > 3 {
        let m = ring.len();
        let mut clipped = false;
        for i in 0..m {
            let (ia, ib, ic) = (ring[(i + m - 1) % m], ring[i], ring[(i + 1) % m]);
            let (a, b, c) = (xy(ia), xy(ib), xy(ic));
            let turn = cross(a, b, c);
            if turn.abs() <= tol {
                ring.remove(i);
                clipped = true;
                break;
            }
            if turn < 0.0 {
                continue;
            }
            let blocked = ring.iter().any(|&j| {
                if j == ia || j == ib || j == ic {
                    return false;
                }
                let p = xy(j);
                cross(a, b, p) >= -tol && cross(b, c, p) >= -tol && cross(c, a, p) >= -tol
            });
            if !blocked {
                tris.push([ia, ib, ic]);
                ring.remove(i);
                clipped = true;
                break;
            }
        }
        if !clipped {
            return None;
        }
    }
    let (a, b, c) = (xy(ring[0]), xy(ring[1]), xy(ring[2]));
    if cross(a, b, c).abs() > tol {
        tris.push([ring[0], ring[1], ring[2]]);
    }
    Some(tris)
}
