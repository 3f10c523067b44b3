//! γ_α functionals over admissible partition sequences, Dudley entropy
//! integrals, Monte Carlo Gaussian suprema and the two hull certifications.

mod admissible;

pub use admissible::{cardinality_limit, AdmissibleSequence, EXACT_GAMMA_LIMIT, GREEDY_GAMMA_LIMIT};

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use admissible::check_alpha;

use crate::covering::{greedy_cover_indices, HullMode, HullTarget, GENERAL_MODE_KH};
use crate::error::{HullError, Result};
use crate::geometry::{dot, Point, PointCloud, TAU_VOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaMethod {
    Exact,
    Greedy,
    EntropyIntegral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaEstimate {
    pub alpha: f64,
    pub value: f64,
    pub method: GammaMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<AdmissibleSequence>,
}

/// Exhaustive γ_α over admissible sequences; at most five points.
pub fn gamma_exact_small(cloud: &PointCloud, alpha: f64) -> Result<GammaEstimate> {
    let (value, seq) = admissible::gamma_exact_sequence(cloud, alpha)?;
    Ok(GammaEstimate { alpha, value, method: GammaMethod::Exact, witness: Some(seq) })
}

/// Upper bound on γ_α from farthest-pair hierarchical splitting.
pub fn gamma_greedy(cloud: &PointCloud, alpha: f64) -> Result<GammaEstimate> {
    let (value, seq) = admissible::gamma_greedy_sequence(cloud, alpha)?;
    Ok(GammaEstimate { alpha, value, method: GammaMethod::Greedy, witness: Some(seq) })
}

/// Grid ratio of the entropy-integral discretization.
const ENTROPY_RATIO: f64 = 0.840_896_415_253_714_5; // 2^{-1/4}

/// ∫_0^diam (ln N(T, ε))^{1/α} dε as an upper Riemann sum on the grid
/// diam · 2^{-j/4}, stopped at the smallest gap. Below the smallest gap
/// every point needs its own ball.
pub fn entropy_integral(cloud: &PointCloud, alpha: f64) -> Result<GammaEstimate> {
    check_alpha(alpha)?;
    let done = |value| Ok(GammaEstimate { alpha, value, method: GammaMethod::EntropyIntegral, witness: None });
    let Some(gap) = cloud.min_gap() else { return done(0.0) };
    let diam = cloud.diameter();
    let term = |eps: f64| {
        let n = greedy_cover_indices(cloud, eps).len();
        if n <= 1 { 0.0 } else { (n as f64).ln().powf(1.0 / alpha) }
    };
    let mut value = gap * term(0.5 * gap);
    let mut hi = diam;
    while hi > gap * (1.0 + 1e-12) {
        let lo = (hi * ENTROPY_RATIO).max(gap);
        value += (hi - lo) * term(lo);
        hi = lo;
    }
    done(value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
    pub seed: u64,
}

pub const MIN_TRIALS: usize = 100;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `i` under master seed `master`.
pub fn trial_seed(master: u64, i: usize) -> u64 {
    splitmix64(master ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Monte Carlo estimate of E max_t ⟨t, g⟩ for a standard Gaussian g.
///
/// Trial i draws from its own stream seeded by [`trial_seed`], and the
/// per-trial maxima are summed in trial order, so the result does not depend
/// on how the work is scheduled.
pub fn gaussian_sup_mc(cloud: &PointCloud, trials: usize, seed: u64) -> Result<SupEstimate> {
    if trials < MIN_TRIALS {
        return Err(HullError::ParamOutOfRange(format!("need at least {MIN_TRIALS} trials, got {trials}")));
    }
    let dim = cloud.dim;
    let maxima: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, i));
            let g: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            cloud.points.iter().map(|p| dot(&p.coords, &g)).fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let n = trials as f64;
    let mean = maxima.iter().sum::<f64>() / n;
    let var = maxima.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(SupEstimate { mean, std_error: (var / n).sqrt(), trials, seed })
}

/// (ln(R 3^n) / ln 2 + 1)^{1/α}.
pub fn l_constant(r: f64, n: usize, alpha: f64) -> Result<f64> {
    if !(r.is_finite() && r >= 1.0) {
        return Err(HullError::ParamOutOfRange(format!("R must be a finite number >= 1, got {r}")));
    }
    if n == 0 {
        return Err(HullError::ParamOutOfRange("dimension must be at least 1".into()));
    }
    if !(alpha > 0.0) {
        return Err(HullError::ParamOutOfRange(format!("alpha must be positive, got {alpha}")));
    }
    let log_ratio = (r.ln() + n as f64 * 3f64.ln()) / 2f64.ln();
    Ok((log_ratio + 1.0).powf(1.0 / alpha))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaRatioReport {
    pub alpha: f64,
    pub mode: HullMode,
    pub dim: usize,
    /// Measured Vol(hull)/Vol(T); `None` for finite sets, whose volume
    /// ratio is unbounded.
    pub r: Option<f64>,
    pub spacing: f64,
    pub n_t: usize,
    pub n_th: usize,
    pub gamma_t: f64,
    pub gamma_th: f64,
    /// L at the measured R, or at R = 1 when R is undefined.
    pub l_bound: f64,
    pub slack: f64,
    /// The inequality at `l_bound` taken literally.
    pub holds_at_l: bool,
    /// True when no finite R exists and the comparison is vacuous.
    pub vacuous: bool,
    pub holds: bool,
}

/// Target number of grid samples in a body.
const BODY_SAMPLE_TARGET: f64 = 1500.0;

/// Removes repeated points (equal up to `tol` per coordinate) and sorts the
/// rest, so equal sets give equal greedy sequences.
fn canonical_points(points: Vec<Point>, tol: f64) -> Vec<Point> {
    let mut keyed: BTreeMap<Vec<i64>, Point> = BTreeMap::new();
    for p in points {
        keyed.entry(p.coords.iter().map(|x| (x / tol).round() as i64).collect()).or_insert(p);
    }
    keyed.into_values().collect()
}

/// γ_α(hull T) against L γ_α(T), both from greedy sequences on samples with
/// a common spacing (a finite T is used as is). The spacing starts near
/// (Vol(hull)/1500)^{1/n} and grows until the hull sample fits the greedy
/// limit.
pub fn certify_hull_gamma(t: HullTarget<'_>, alpha: f64, mode: HullMode) -> Result<GammaRatioReport> {
    check_alpha(alpha)?;
    let dim = t.dim();
    let (mut h, extent) = match t {
        HullTarget::Body(p) => {
            let v = p.hull()?.volume();
            ((v / BODY_SAMPLE_TARGET).powf(1.0 / dim as f64), p.vertex_cloud().diameter())
        }
        HullTarget::Cloud(c) => {
            let d = c.diameter();
            (d / 32.0, d)
        }
    };
    if !(h > 0.0) {
        return Err(HullError::DegenerateInput("set has zero extent".into()));
    }
    let (t_sample, hull_sample) = loop {
        let tol = 1e-9 * extent;
        let hs = match t.hull_sample(h) {
            Ok(c) => canonical_points(c.points, tol),
            Err(HullError::TooLarge { .. }) => {
                h *= 1.25;
                continue;
            }
            Err(e) => return Err(e),
        };
        if hs.len() <= GREEDY_GAMMA_LIMIT {
            let ts = canonical_points(t.sample(h)?.points, tol);
            break (PointCloud::new(ts)?, PointCloud::new(hs)?);
        }
        h *= 1.25;
    };
    let (r, _) = t.volume_ratio(mode, GENERAL_MODE_KH)?;
    let l_bound = l_constant(r.unwrap_or(1.0).max(1.0), dim, alpha)?;
    let gamma_t = gamma_greedy(&t_sample, alpha)?.value;
    let gamma_th = gamma_greedy(&hull_sample, alpha)?.value;
    let slack = l_bound * gamma_t - gamma_th;
    let holds_at_l = gamma_th <= l_bound * gamma_t + TAU_VOL;
    let vacuous = r.is_none();
    Ok(GammaRatioReport {
        alpha,
        mode,
        dim,
        r,
        spacing: h,
        n_t: t_sample.len(),
        n_th: hull_sample.len(),
        gamma_t,
        gamma_th,
        l_bound,
        slack,
        holds_at_l,
        vacuous,
        holds: vacuous || holds_at_l,
    })
}

/// Empirical constant of the two-sided bound γ_2(T) ≍ E sup X_t.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorizingRecord {
    pub gamma2: f64,
    pub esup: SupEstimate,
    /// `None` for a single point, where both sides vanish.
    pub l_hat: Option<f64>,
}

pub fn certify_mm_two_sided(cloud: &PointCloud, trials: usize, seed: u64) -> Result<MajorizingRecord> {
    let gamma2 = gamma_greedy(cloud, 2.0)?.value;
    let esup = gaussian_sup_mc(cloud, trials, seed)?;
    let l_hat = (cloud.len() > 1 && gamma2 > 0.0 && esup.mean > 0.0)
        .then(|| (gamma2 / esup.mean).max(esup.mean / gamma2));
    Ok(MajorizingRecord { gamma2, esup, l_hat })
}

/// One row of the chaining CSV summary.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ChainingRow {
    pub scenario: String,
    pub alpha: f64,
    pub gamma_t: Option<f64>,
    pub gamma_th: Option<f64>,
    pub l_bound: Option<f64>,
    pub esup: Option<f64>,
    pub l_hat: Option<f64>,
}

/// CSV with columns scenario, alpha, gamma_T, gamma_Th, L_bound, esup, L_hat.
pub fn chaining_to_csv(rows: &[ChainingRow]) -> Result<String> {
    #[derive(Serialize)]
    struct Row<'a> {
        scenario: &'a str,
        alpha: f64,
        #[serde(rename = "gamma_T")]
        gamma_t: Option<f64>,
        #[serde(rename = "gamma_Th")]
        gamma_th: Option<f64>,
        #[serde(rename = "L_bound")]
        l_bound: Option<f64>,
        esup: Option<f64>,
        #[serde(rename = "L_hat")]
        l_hat: Option<f64>,
    }
    crate::minkowski::write_csv(rows.iter().map(|r| Row {
        scenario: &r.scenario,
        alpha: r.alpha,
        gamma_t: r.gamma_t,
        gamma_th: r.gamma_th,
        l_bound: r.l_bound,
        esup: r.esup,
        l_hat: r.l_hat,
    }))
}
