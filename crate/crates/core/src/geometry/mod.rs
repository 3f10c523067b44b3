//! Points, clouds and polytopes in R^n together with the exact-oriented
//! volume machinery built on top of them.
//!
//! Every predicate works on inputs rescaled to unit diameter, so the absolute
//! tolerance [`TAU_GEOM`] means the same thing for a unit square and for a
//! cube of side 1000.

mod ball;
mod boundary;
mod polytope;
mod quickhull;
pub mod sampling;

pub use ball::{min_enclosing_ball, unit_ball_volume, Ball};
pub use boundary::{
    triangulate_facets, volume_det, volume_projected, Orientation, OrientedSimplex,
    SimplicialBoundary,
};
pub use polytope::{beta_ratio, triangulate_boundary, volume_ratio_poly, HalfspaceRep, Polytope, PolytopeDoc};
pub use quickhull::{quickhull, quickhull_points};

use crate::error::{HullError, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Absolute predicate tolerance on diameter-normalized coordinates.
pub const TAU_GEOM: f64 = 1e-9;
/// Relative tolerance for volume comparisons.
pub const TAU_VOL: f64 = 1e-9;
/// Largest dimension handled by the exact hull and boundary code.
pub const MAX_HULL_DIM: usize = 8;

/// A point in R^n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn origin(dim: usize) -> Self {
        Self { coords: vec![0.0; dim] }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn dist(&self, other: &Point) -> f64 {
        dist(&self.coords, &other.coords)
    }

    pub fn scaled(&self, s: f64) -> Point {
        Point::new(self.coords.iter().map(|x| x * s).collect())
    }

    pub fn add(&self, other: &Point) -> Point {
        Point::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|x| x.is_finite())
    }
}

impl From<Vec<f64>> for Point {
    fn from(coords: Vec<f64>) -> Self {
        Point::new(coords)
    }
}

/// Distance function attached to a cloud. Only the Euclidean metric is used
/// by the volume-based bounds; the others exist for covering experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Euclidean,
    Manhattan,
    Chebyshev,
}

impl Metric {
    #[inline]
    pub fn dist(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => dist(a, b),
            Metric::Manhattan => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            Metric::Chebyshev => a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max),
        }
    }
}

/// A finite, non-empty set of points of a common dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub dim: usize,
    pub points: Vec<Point>,
    #[serde(default)]
    pub metric: Metric,
}

impl PointCloud {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let dim = points
            .first()
            .map(Point::dim)
            .ok_or_else(|| HullError::InvalidInput("point cloud is empty".into()))?;
        let cloud = Self { dim, points, metric: Metric::Euclidean };
        cloud.validate()?;
        Ok(cloud)
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows.into_iter().map(Point::new).collect())
    }

    /// Parses `{"dim": n, "points": [[..], ..], "metric": ..}`; `metric` is
    /// optional and defaults to Euclidean.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let cloud: PointCloud =
            serde_json::from_str(s).map_err(|e| HullError::InvalidInput(format!("point cloud JSON: {e}")))?;
        cloud.validate()?;
        Ok(cloud)
    }

    pub fn with_metric(mut self, metric: Metric) -> Self {
        self.metric = metric;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(HullError::InvalidInput("point cloud is empty".into()));
        }
        if self.dim == 0 {
            return Err(HullError::InvalidInput("dimension must be at least 1".into()));
        }
        for (i, p) in self.points.iter().enumerate() {
            if p.dim() != self.dim {
                return Err(HullError::DimensionMismatch { expected: self.dim, got: p.dim() });
            }
            if !p.is_finite() {
                return Err(HullError::InvalidInput(format!("point {i} has a non-finite coordinate")));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.metric.dist(&self.points[i].coords, &self.points[j].coords)
    }

    /// Largest pairwise distance, O(N^2).
    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                best = best.max(self.d(i, j));
            }
        }
        best
    }

    /// Smallest positive pairwise distance, or `None` for a singleton.
    pub fn min_gap(&self) -> Option<f64> {
        let n = self.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = self.d(i, j);
                if d > 0.0 {
                    best = best.min(d);
                }
            }
        }
        best.is_finite().then_some(best)
    }

    /// Every coordinate multiplied by `s`.
    pub fn scaled(&self, s: f64) -> PointCloud {
        PointCloud {
            dim: self.dim,
            points: self.points.iter().map(|p| p.scaled(s)).collect(),
            metric: self.metric,
        }
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        bounding_box(self.dim, self.points.iter())
    }
}

#[inline]
pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

#[inline]
pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn bounding_box<'a>(
    dim: usize,
    points: impl Iterator<Item = &'a Point>,
) -> (Vec<f64>, Vec<f64>) {
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in points {
        for k in 0..dim {
            lo[k] = lo[k].min(p.coords[k]);
            hi[k] = hi[k].max(p.coords[k]);
        }
    }
    (lo, hi)
}

/// Diagonal of the bounding box; used as the normalization length for
/// predicate tolerances.
pub(crate) fn scale_of(points: &[Point]) -> f64 {
    let Some(first) = points.first() else { return 1.0 };
    let (lo, hi) = bounding_box(first.dim(), points.iter());
    let diag = dist(&lo, &hi);
    if diag > 0.0 {
        diag
    } else {
        1.0
    }
}

/// Determinant of the square matrix whose rows are `rows`.
pub(crate) fn det_rows(rows: &[&[f64]]) -> f64 {
    let n = rows.len();
    match n {
        0 => 1.0,
        1 => rows[0][0],
        2 => rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0],
        3 => {
            let (a, b, c) = (rows[0], rows[1], rows[2]);
            a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
                + a[2] * (b[0] * c[1] - b[1] * c[0])
        }
        _ => DMatrix::from_fn(n, n, |i, j| rows[i][j]).determinant(),
    }
}

/// Orthonormal frame of the affine span of `points`: an origin (the first
/// point) and basis vectors picked greedily by largest residual. Directions
/// shorter than `TAU_GEOM` times the bounding-box diagonal are dropped.
pub fn affine_frame(points: &[Point]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let origin = points[0].coords.clone();
    let tol = TAU_GEOM * scale_of(points);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    loop {
        let mut best: Option<Vec<f64>> = None;
        let mut best_norm = tol;
        for p in points {
            let mut r: Vec<f64> = p.coords.iter().zip(&origin).map(|(a, b)| a - b).collect();
            for b in &basis {
                let c = dot(&r, b);
                r.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
            let norm = dot(&r, &r).sqrt();
            if norm > best_norm {
                best_norm = norm;
                best = Some(r);
            }
        }
        match best {
            Some(r) if basis.len() < origin.len() => basis.push(r.iter().map(|x| x / best_norm).collect()),
            _ => return (origin, basis),
        }
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}
