//! Minkowski sums, averages A(k) and their convexification, the reverse
//! Brunn-Minkowski ledger, and the general volume-ratio bound.

mod body;
mod distance;

pub use body::{minkowski_average, minkowski_sum, scale_body, union_volume, BodyApprox, ConvexPiece, Lattice};
pub use distance::{dist_to_simplex, hausdorff_to_hull, hull_samples, hull_samples_at};

use serde::{Deserialize, Serialize};

use crate::error::{HullError, Result};

/// One step of the convexification of A: volume of A(k), its Hausdorff
/// distance to the hull of A, and the closed-form volume bound at k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexificationTrace {
    pub k: usize,
    pub vol_ak: f64,
    pub hausdorff_to_hull: f64,
    /// `None` when A has zero volume and the bound is meaningless.
    pub bound_value: Option<f64>,
    pub beta_ak: Option<f64>,
}

/// Empirical constants of the volume recursion for A(1..=k_max).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionConstants {
    /// Largest ratio Vol(A(k)) / ((k-1)/k β_{A(k-1)} Vol(A(k-1)) + 1/k β_A Vol(A)).
    pub c1_hat: f64,
    /// Largest β over the trace.
    pub c2_prime: f64,
    /// max(c1_hat, 1) · c2_prime.
    pub c2_hat: f64,
    pub volumes: Vec<f64>,
    pub betas: Vec<f64>,
}

/// Measures the constants entering the A(k) volume recursion.
pub fn recursion_constants(a: &BodyApprox, k_max: usize) -> Result<RecursionConstants> {
    if k_max == 0 {
        return Err(HullError::ParamOutOfRange("k_max must be at least 1".into()));
    }
    let mut volumes = Vec::with_capacity(k_max);
    let mut betas = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let ak = minkowski_average(a, k)?;
        volumes.push(ak.volume());
        betas.push(ak.beta()?);
    }
    let mut c1_hat = 0.0f64;
    for k in 2..=k_max {
        let kf = k as f64;
        let rhs = (kf - 1.0) / kf * betas[k - 2] * volumes[k - 2] + betas[0] * volumes[0] / kf;
        c1_hat = c1_hat.max(volumes[k - 1] / rhs);
    }
    let c2_prime = betas.iter().copied().fold(0.0, f64::max);
    Ok(RecursionConstants { c1_hat, c2_prime, c2_hat: c1_hat.max(1.0) * c2_prime, volumes, betas })
}

/// A(k) for k = 1..=k_max with Hausdorff gaps to the hull of A.
pub fn convexification_gap(a: &BodyApprox, k_max: usize) -> Result<Vec<ConvexificationTrace>> {
    if k_max == 0 {
        return Err(HullError::ParamOutOfRange("k_max must be at least 1".into()));
    }
    let reference = a.points();
    let vol_a = a.volume();
    let constants = if vol_a > 0.0 { Some(recursion_constants(a, k_max)?) } else { None };
    let mut out = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let ak = minkowski_average(a, k)?;
        let gap = hausdorff_to_hull(&ak, &reference)?;
        let (vol_ak, beta_ak, bound_value) = match &constants {
            Some(c) => (
                c.volumes[k - 1],
                Some(c.betas[k - 1]),
                Some(volume_ratio_general_bound(k, c.c2_hat)? * vol_a),
            ),
            None => (ak.volume(), None, None),
        };
        out.push(ConvexificationTrace { k, vol_ak, hausdorff_to_hull: gap, bound_value, beta_ak });
    }
    Ok(out)
}

/// Closed-form bound on Vol(A(k_h)) / Vol(A):
/// 2 C^{k-1} / k + C (C^{k-2} - 1) / (k (C - 1)).
///
/// The second quotient is evaluated as the geometric sum C (1 + C + ... +
/// C^{k-3}) / k, which has no pole at C = 1 and reduces there to (k-2)/k.
/// At k = 1 the expression equals 1 for every C.
pub fn volume_ratio_general_bound(k_h: usize, c2: f64) -> Result<f64> {
    if k_h == 0 {
        return Err(HullError::ParamOutOfRange("k_h must be at least 1".into()));
    }
    if !(c2.is_finite() && c2 >= 1.0) {
        return Err(HullError::ParamOutOfRange(format!("C2 must be a finite number >= 1, got {c2}")));
    }
    if k_h == 1 {
        return Ok(1.0);
    }
    let k = k_h as f64;
    let geometric: f64 = (0..k_h - 2).map(|j| c2.powi(j as i32)).sum();
    Ok(2.0 * c2.powi(k_h as i32 - 1) / k + c2 * geometric / k)
}

/// Vol(hull A) / Vol(A) next to the closed-form bound at k_h.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralRatioReport {
    pub ratio: f64,
    pub k_h: usize,
    pub c1_hat: f64,
    pub c2_hat: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Measured volume ratio of A against its hull, checked against the bound
/// with C2 estimated on A(1..=k_h).
pub fn empirical_general_ratio(a: &BodyApprox, k_h: usize) -> Result<GeneralRatioReport> {
    let vol = a.volume();
    if vol <= 0.0 {
        return Err(HullError::DegenerateInput("body has zero volume".into()));
    }
    let ratio = a.hull()?.volume() / vol;
    let c = recursion_constants(a, k_h.max(1))?;
    let bound = volume_ratio_general_bound(k_h.max(1), c.c2_hat)?;
    Ok(GeneralRatioReport {
        ratio,
        k_h,
        c1_hat: c.c1_hat,
        c2_hat: c.c2_hat,
        bound,
        holds: ratio <= bound * (1.0 + crate::geometry::TAU_VOL),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevBMReport {
    pub s: f64,
    pub t: f64,
    pub m: u32,
    /// Vol(sA ⊕ tB)^{1/m}.
    pub lhs_vol: f64,
    /// s (β_A Vol A)^{1/m} and t (β_B Vol B)^{1/m}.
    pub rhs_terms: (f64, f64),
    pub empirical_c1: f64,
    pub beta_a: f64,
    pub beta_b: f64,
}

/// Evaluates both sides of the circumscribed-ball reverse Brunn-Minkowski
/// inequality with identity positioning maps.
pub fn check_reverse_bm(a: &BodyApprox, b: &BodyApprox, s: f64, t: f64, m: u32) -> Result<RevBMReport> {
    if a.dim() != b.dim() {
        return Err(HullError::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    if m == 0 {
        return Err(HullError::ParamOutOfRange("m must be at least 1".into()));
    }
    let sum = minkowski_sum(&scale_body(a, s)?, &scale_body(b, t)?)?;
    let inv_m = 1.0 / f64::from(m);
    let (beta_a, beta_b) = (a.beta()?, b.beta()?);
    let lhs_vol = sum.volume().powf(inv_m);
    let rhs_terms = (s * (beta_a * a.volume()).powf(inv_m), t * (beta_b * b.volume()).powf(inv_m));
    Ok(RevBMReport {
        s,
        t,
        m,
        lhs_vol,
        rhs_terms,
        empirical_c1: lhs_vol / (rhs_terms.0 + rhs_terms.1),
        beta_a,
        beta_b,
    })
}

#[derive(Serialize)]
struct TraceRow {
    k: usize,
    vol: f64,
    gap: f64,
    bound: Option<f64>,
}

/// CSV with columns k, vol, gap, bound.
pub fn traces_to_csv(traces: &[ConvexificationTrace]) -> Result<String> {
    let rows = traces.iter().map(|t| TraceRow { k: t.k, vol: t.vol_ak, gap: t.hausdorff_to_hull, bound: t.bound_value });
    write_csv(rows)
}

#[derive(Serialize)]
struct RevBMRow {
    s: f64,
    t: f64,
    m: u32,
    lhs: f64,
    rhs_a: f64,
    rhs_b: f64,
    empirical_c1: f64,
}

/// CSV with columns s, t, m, lhs, rhs_a, rhs_b, empirical_c1.
pub fn revbm_to_csv(reports: &[RevBMReport]) -> Result<String> {
    let rows = reports.iter().map(|r| RevBMRow {
        s: r.s,
        t: r.t,
        m: r.m,
        lhs: r.lhs_vol,
        rhs_a: r.rhs_terms.0,
        rhs_b: r.rhs_terms.1,
        empirical_c1: r.empirical_c1,
    });
    write_csv(rows)
}

pub(crate) fn write_csv<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| HullError::InvalidInput(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| HullError::InvalidInput(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_examples() {
        assert!((volume_ratio_general_bound(2, 2.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((volume_ratio_general_bound(3, 2.0).unwrap() - 10.0 / 3.0).abs() < 1e-15);
        assert!((volume_ratio_general_bound(2, 7.5).unwrap() - 7.5).abs() < 1e-15);
    }

    #[test]
    fn bound_limit_at_one() {
        for k in 2..10 {
            assert!((volume_ratio_general_bound(k, 1.0).unwrap() - 1.0).abs() < 1e-15);
            let near = volume_ratio_general_bound(k, 1.0 + 1e-9).unwrap();
            assert!((near - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn bound_matches_printed_form_away_from_one() {
        for c in [1.5f64, 2.0, 3.7] {
            for k in 2..8 {
                let kf = k as f64;
                let printed = 2.0 * c.powi(k - 1) / kf + c * (c.powi(k - 2) - 1.0) / (kf * (c - 1.0));
                let ours = volume_ratio_general_bound(k as usize, c).unwrap();
                assert!((printed - ours).abs() < 1e-12 * printed);
            }
        }
    }

    #[test]
    fn bound_rejects_bad_params() {
        assert!(volume_ratio_general_bound(0, 2.0).is_err());
        assert!(volume_ratio_general_bound(2, 0.5).is_err());
        assert!(volume_ratio_general_bound(2, f64::NAN).is_err());
    }
}
