//! Covering numbers with closed balls centered in the covered set: greedy
//! upper bounds, packing lower bounds, an exact oracle for small sets, the
//! volume sandwich, and the hull-covering comparison.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HullError, Result};
use crate::geometry::sampling::polytope_samples;
use crate::geometry::{min_enclosing_ball, unit_ball_volume, Point, PointCloud, Polytope};
use crate::minkowski::{empirical_general_ratio, hull_samples_at, BodyApprox};

/// Largest set handled by [`exact_cover_small`].
pub const EXACT_COVER_LIMIT: usize = 24;

/// Relative slack on the closed-ball test so that points at distance exactly
/// ε survive rounding.
const BALL_SLACK: f64 = 1e-12;

#[inline]
fn within(d: f64, eps: f64) -> bool {
    d <= eps * (1.0 + BALL_SLACK)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringReport {
    pub epsilon: f64,
    pub n_greedy: usize,
    /// Size of a maximal 2ε-separated subset; no ε-ball holds two of its
    /// points, so this is a lower bound on N(ε).
    pub n_packing: usize,
    pub n_exact: Option<usize>,
    pub vol_lower: Option<f64>,
    pub vol_upper: Option<f64>,
    pub centers: Vec<Point>,
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(HullError::ParamOutOfRange(format!("epsilon must be positive, got {eps}")))
    }
}

/// Farthest-point greedy cover: start at the lowest index, then repeatedly
/// add the point farthest from the chosen centers until every point is
/// within ε. Ties go to the lowest index.
pub fn greedy_cover_indices(cloud: &PointCloud, eps: f64) -> Vec<usize> {
    let n = cloud.len();
    let mut centers = vec![0usize];
    let mut nearest: Vec<f64> = (0..n).into_par_iter().map(|i| cloud.d(i, 0)).collect();
    loop {
        let (far, d) = nearest
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |b, (i, &d)| if d > b.1 { (i, d) } else { b });
        if within(d, eps) {
            return centers;
        }
        centers.push(far);
        nearest.par_iter_mut().enumerate().for_each(|(i, m)| *m = m.min(cloud.d(i, far)));
    }
}

/// Greedy cover together with the packing certificate.
pub fn greedy_cover(cloud: &PointCloud, eps: f64) -> Result<CoveringReport> {
    check_eps(eps)?;
    let idx = greedy_cover_indices(cloud, eps);
    Ok(CoveringReport {
        epsilon: eps,
        n_greedy: idx.len(),
        n_packing: packing_number(cloud, 2.0 * eps)?,
        n_exact: None,
        vol_lower: None,
        vol_upper: None,
        centers: idx.iter().map(|&i| cloud.points[i].clone()).collect(),
    })
}

/// Greedy report plus the exact value when the cloud is small enough.
pub fn covering_report(cloud: &PointCloud, eps: f64) -> Result<CoveringReport> {
    let mut r = greedy_cover(cloud, eps)?;
    if cloud.len() <= EXACT_COVER_LIMIT {
        r.n_exact = Some(exact_cover_small(cloud, eps)?);
    }
    Ok(r)
}

/// Size of a maximal subset with pairwise distances strictly greater than
/// ε, built greedily in index order.
pub fn packing_number(cloud: &PointCloud, eps: f64) -> Result<usize> {
    check_eps(eps)?;
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..cloud.len() {
        if chosen.iter().all(|&c| !within(cloud.d(i, c), eps)) {
            chosen.push(i);
        }
    }
    Ok(chosen.len())
}

/// Minimum number of closed ε-balls centered at cloud points that cover the
/// cloud, by depth-first branch and bound over coverage bitmasks.
pub fn exact_cover_small(cloud: &PointCloud, eps: f64) -> Result<usize> {
    check_eps(eps)?;
    let n = cloud.len();
    if n > EXACT_COVER_LIMIT {
        return Err(HullError::TooLarge { size: n, limit: EXACT_COVER_LIMIT });
    }
    let cov: Vec<u32> = (0..n)
        .map(|i| (0..n).filter(|&j| within(cloud.d(i, j), eps)).fold(0u32, |m, j| m | 1 << j))
        .collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let lower = packing_number(cloud, 2.0 * eps)?;
    let mut best = greedy_cover_indices(cloud, eps).len();
    // Candidate centers for each point, largest coverage first.
    let cands: Vec<Vec<usize>> = (0..n)
        .map(|u| {
            let mut c: Vec<usize> = (0..n).filter(|&c| cov[c] >> u & 1 == 1).collect();
            c.sort_by_key(|&c| (std::cmp::Reverse(cov[c].count_ones()), c));
            c
        })
        .collect();
    let max_cov = cov.iter().map(|m| m.count_ones()).max().unwrap_or(1);
    let search = CoverSearch { full, lower, cov: &cov, cands: &cands, max_cov };
    search.run(0, 0, &mut best);
    Ok(best)
}

struct CoverSearch<'a> {
    full: u32,
    lower: usize,
    cov: &'a [u32],
    cands: &'a [Vec<usize>],
    max_cov: u32,
}

impl CoverSearch<'_> {
    fn run(&self, covered: u32, used: usize, best: &mut usize) {
        if covered == self.full {
            *best = (*best).min(used);
            return;
        }
        let remaining = (self.full & !covered).count_ones();
        let need = remaining.div_ceil(self.max_cov) as usize;
        if used + need >= *best || *best <= self.lower {
            return;
        }
        // Branch on the lowest uncovered point: some chosen ball must hold it.
        let u = (self.full & !covered).trailing_zeros() as usize;
        for &c in &self.cands[u] {
            self.run(covered | self.cov[c], used + 1, best);
        }
    }
}

/// (1/ε)^n Vol(A)/Vol(B) and (3/ε)^n Vol(A)/Vol(B) for a body of volume
/// `vol` in R^n, B the unit Euclidean ball.
pub fn volume_bounds_raw(vol: f64, dim: usize, eps: f64) -> (f64, f64) {
    let base = vol / unit_ball_volume(dim);
    ((1.0 / eps).powi(dim as i32) * base, (3.0 / eps).powi(dim as i32) * base)
}

/// Largest r such that the ball of radius r around the better of the vertex
/// centroid and the circumcenter lies in the convex polytope.
pub fn inradius_estimate(poly: &Polytope) -> f64 {
    let hs = poly.halfspaces();
    let n = poly.dim;
    let centroid: Vec<f64> =
        (0..n).map(|k| poly.vertices.iter().map(|v| v.coords[k]).sum::<f64>() / poly.vertices.len() as f64).collect();
    let circ = min_enclosing_ball(&poly.vertex_cloud()).center.coords;
    [centroid, circ]
        .iter()
        .map(|c| {
            hs.normals
                .iter()
                .zip(&hs.offsets)
                .map(|(nrm, off)| off - crate::geometry::dot(nrm, c))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0)
}

/// Volume sandwich for a convex polytope. The upper form needs a translate
/// of εB inside A; without it the call fails with `PreconditionFailed` and
/// only [`volume_lower_bound`] applies.
pub fn volume_cover_bounds(poly: &Polytope, eps: f64) -> Result<(f64, f64)> {
    check_eps(eps)?;
    let r = inradius_estimate(poly);
    if r < eps {
        return Err(HullError::PreconditionFailed(format!(
            "no ball of radius {eps} found inside the body (inradius estimate {r})"
        )));
    }
    Ok(volume_bounds_raw(poly.volume(), poly.dim, eps))
}

pub fn volume_lower_bound(poly: &Polytope, eps: f64) -> f64 {
    volume_bounds_raw(poly.volume(), poly.dim, eps).0
}

/// Vol(A ⊕ (ε/2)B) / Vol((ε/2)B) with B replaced by an inscribed polytope
/// (a 256-gon in the plane, a 400-point spherical hull in space).
pub fn volume_cover_middle(poly: &Polytope, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    let r = eps / 2.0;
    let ball = match poly.dim {
        1 => vec![Point::new(vec![-r]), Point::new(vec![r])],
        2 => (0..256)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / 256.0;
                Point::new(vec![r * a.cos(), r * a.sin()])
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..400)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / 400.0;
                    let s = (1.0 - z * z).sqrt();
                    let a = golden * i as f64;
                    Point::new(vec![r * s * a.cos(), r * s * a.sin(), r * z])
                })
                .collect()
        }
        n => return Err(HullError::Unsupported(format!("middle volume form for n = {n}"))),
    };
    let ball_body = BodyApprox::convex(poly.dim, ball)?;
    let a = BodyApprox::from_polytope(poly)?;
    let sum = crate::minkowski::minkowski_sum(&a, &ball_body)?;
    Ok(sum.volume() / ball_body.volume())
}

/// Which volume ratio R enters the hull comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HullMode {
    Poly,
    General,
}

/// Set whose hull is compared against it.
#[derive(Debug, Clone, Copy)]
pub enum HullTarget<'a> {
    Body(&'a Polytope),
    Cloud(&'a PointCloud),
}

impl HullTarget<'_> {
    pub fn dim(&self) -> usize {
        match self {
            HullTarget::Body(p) => p.dim,
            HullTarget::Cloud(c) => c.dim,
        }
    }

    /// Sample of the set itself at spacing `h` (the points for a cloud).
    pub fn sample(&self, h: f64) -> Result<PointCloud> {
        match self {
            HullTarget::Body(p) => PointCloud::new(polytope_samples(p, h)),
            HullTarget::Cloud(c) => Ok((*c).clone()),
        }
    }

    /// Sample of the convex hull at spacing `h`.
    pub fn hull_sample(&self, h: f64) -> Result<PointCloud> {
        match self {
            // Same grid anchoring as `sample`: a body and its hull share the
            // vertex bounding box.
            HullTarget::Body(p) => PointCloud::new(polytope_samples(&p.hull()?, h)),
            HullTarget::Cloud(c) => PointCloud::new(hull_samples_at(&c.points, h)?),
        }
    }

    /// Vol(hull)/Vol(T), or `None` when T has zero volume (the comparison is
    /// then vacuous). General mode also returns the closed-form bound.
    pub fn volume_ratio(&self, mode: HullMode, k_h: usize) -> Result<(Option<f64>, Option<f64>)> {
        match self {
            HullTarget::Cloud(_) => Ok((None, None)),
            HullTarget::Body(p) => match mode {
                HullMode::Poly => Ok((Some(crate::geometry::volume_ratio_poly(p)?), None)),
                HullMode::General => {
                    let report = empirical_general_ratio(&BodyApprox::from_polytope(p)?, k_h)?;
                    Ok((Some(report.ratio), Some(report.bound)))
                }
            },
        }
    }
}

/// N(T_h, ε) against R 3^n N(T, ε), with N(T_h) from a greedy cover (an
/// upper bound) and N(T) from the packing certificate (a lower bound).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullCoverReport {
    pub epsilon: f64,
    pub mode: HullMode,
    pub dim: usize,
    pub r: Option<f64>,
    pub r_bound: Option<f64>,
    pub n_hull_greedy: usize,
    pub n_t_greedy: usize,
    pub n_t_lower: usize,
    pub lhs: f64,
    pub rhs: Option<f64>,
    pub slack: Option<f64>,
    pub holds: bool,
}

/// Default number of A(k) steps used for the general-mode constants.
pub const GENERAL_MODE_KH: usize = 8;

pub fn check_hull_cover_ratio(t: HullTarget<'_>, eps: f64, mode: HullMode) -> Result<HullCoverReport> {
    check_eps(eps)?;
    let h = eps / 4.0;
    let t_sample = t.sample(h)?;
    let hull_sample = t.hull_sample(h)?;
    let n_hull_greedy = greedy_cover_indices(&hull_sample, eps).len();
    let n_t_greedy = greedy_cover_indices(&t_sample, eps).len();
    let n_t_lower = packing_number(&t_sample, 2.0 * eps)?;
    let (r, r_bound) = t.volume_ratio(mode, GENERAL_MODE_KH)?;
    let dim = t.dim();
    let lhs = n_hull_greedy as f64;
    let rhs = r.map(|r| r * 3f64.powi(dim as i32) * n_t_lower as f64);
    let slack = rhs.map(|rhs| rhs - lhs);
    let holds = slack.is_none_or(|s| s >= -crate::geometry::TAU_VOL * lhs.max(1.0));
    Ok(HullCoverReport { epsilon: eps, mode, dim, r, r_bound, n_hull_greedy, n_t_greedy, n_t_lower, lhs, rhs, slack, holds })
}

#[derive(Serialize)]
struct CoverRow {
    epsilon: f64,
    n_greedy: usize,
    n_packing: usize,
    n_exact: Option<usize>,
    vol_lower: Option<f64>,
    vol_upper: Option<f64>,
}

/// CSV with columns epsilon, n_greedy, n_packing, n_exact, vol_lower, vol_upper.
pub fn reports_to_csv(reports: &[CoveringReport]) -> Result<String> {
    crate::minkowski::write_csv(reports.iter().map(|r| CoverRow {
        epsilon: r.epsilon,
        n_greedy: r.n_greedy,
        n_packing: r.n_packing,
        n_exact: r.n_exact,
        vol_lower: r.vol_lower,
        vol_upper: r.vol_upper,
    }))
}
