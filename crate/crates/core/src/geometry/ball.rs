use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{dist, dist2, scale_of, Point, PointCloud, TAU_GEOM};

/// Closed Euclidean ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
    /// Points on the boundary that determine the ball (at most n+1 of them).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub support: Vec<Point>,
}

impl Ball {
    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        self.center.dist(p) <= self.radius + tol
    }

    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim()) * self.radius.powi(self.dim() as i32)
    }
}

/// Volume of the unit Euclidean ball in R^n, via V_n = (2 pi / n) V_{n-2}.
pub fn unit_ball_volume(n: usize) -> f64 {
    let mut v = [1.0, 2.0];
    for k in 2..=n {
        v[k % 2] *= 2.0 * std::f64::consts::PI / k as f64;
    }
    v[n % 2]
}

/// Exact move-to-front recursion up to this dimension; a Badoiu-Clarkson
/// refinement is used above it.
const EXACT_DIM_LIMIT: usize = 10;
const REFINEMENT_STEPS: usize = 20_000;

/// Smallest ball containing every point of the cloud.
pub fn min_enclosing_ball(cloud: &PointCloud) -> Ball {
    min_enclosing_ball_points(&cloud.points)
}

pub(crate) fn min_enclosing_ball_points(points: &[Point]) -> Ball {
    assert!(!points.is_empty(), "min_enclosing_ball of an empty set");
    let dim = points[0].dim();
    if dim > EXACT_DIM_LIMIT {
        return refine_ball(points);
    }
    let tol = TAU_GEOM * scale_of(points);
    let mut order: Vec<usize> = (0..points.len()).collect();
    // Fixed-seed shuffle keeps the expected running time linear while the
    // result stays a deterministic function of the input.
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(0x5eed_ba11));
    let mut support = Vec::with_capacity(dim + 1);
    let (center, r2) = move_to_front(points, &mut order, points.len(), &mut support, dim, tol);
    let radius = points.iter().map(|p| dist(&p.coords, &center)).fold(r2.max(0.0).sqrt(), f64::max);
    let support = points
        .iter()
        .filter(|p| (dist(&p.coords, &center) - radius).abs() <= tol)
        .take(dim + 1)
        .cloned()
        .collect();
    Ball { center: Point::new(center), radius, support }
}

fn move_to_front(
    points: &[Point],
    order: &mut Vec<usize>,
    end: usize,
    support: &mut Vec<usize>,
    dim: usize,
    tol: f64,
) -> (Vec<f64>, f64) {
    let (mut c, mut r2) = circumball(points, support, dim);
    if support.len() == dim + 1 {
        return (c, r2);
    }
    let mut i = 0;
    while i < end {
        let p = order[i];
        let outside = r2 < 0.0 || dist(&points[p].coords, &c) > r2.sqrt() + tol;
        if outside {
            support.push(p);
            let (c2, rr) = move_to_front(points, order, i, support, dim, tol);
            support.pop();
            c = c2;
            r2 = rr;
            order[..=i].rotate_right(1);
        }
        i += 1;
    }
    (c, r2)
}

/// Smallest ball with all support points on its boundary. An empty support
/// gives a ball of negative squared radius that contains nothing.
fn circumball(points: &[Point], support: &[usize], dim: usize) -> (Vec<f64>, f64) {
    match support.len() {
        0 => (vec![0.0; dim], -1.0),
        1 => (points[support[0]].coords.clone(), 0.0),
        k => {
            let p0 = &points[support[0]].coords;
            let q: Vec<Vec<f64>> = support[1..]
                .iter()
                .map(|&s| points[s].coords.iter().zip(p0).map(|(a, b)| a - b).collect())
                .collect();
            let m = k - 1;
            let g = DMatrix::from_fn(m, m, |i, j| 2.0 * super::dot(&q[i], &q[j]));
            let b = DVector::from_fn(m, |i, _| super::dot(&q[i], &q[i]));
            let lambda = g
                .clone()
                .lu()
                .solve(&b)
                .or_else(|| g.svd(true, true).solve(&b, 1e-14).ok())
                .unwrap_or_else(|| DVector::zeros(m));
            let mut c = p0.clone();
            for (l, qi) in lambda.iter().zip(&q) {
                c.iter_mut().zip(qi).for_each(|(x, y)| *x += l * y);
            }
            let r2 = support.iter().map(|&s| dist2(&points[s].coords, &c)).fold(0.0, f64::max);
            (c, r2)
        }
    }
}

/// Core-set iteration: move the center a shrinking step toward the current
/// farthest point.
fn refine_ball(points: &[Point]) -> Ball {
    let mut c = points[0].coords.clone();
    let farthest = |c: &[f64]| {
        points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, dist(&p.coords, c)))
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best })
    };
    for step in 1..=REFINEMENT_STEPS {
        let (far, _) = farthest(&c);
        let w = 1.0 / (step as f64 + 1.0);
        c.iter_mut().zip(&points[far].coords).for_each(|(x, y)| *x += w * (y - *x));
    }
    let (_, radius) = farthest(&c);
    let support = points
        .iter()
        .filter(|p| radius - dist(&p.coords, &c) <= 1e-6 * radius.max(f64::MIN_POSITIVE))
        .cloned()
        .collect();
    Ball { center: Point::new(c), radius, support }
}
