use serde::Serialize;

use super::{CertificationRecord as Rec, CheckName, Input, Params};
use crate::chaining::{certify_hull_gamma, certify_mm_two_sided, ChainingRow};
use crate::covering::{check_hull_cover_ratio, HullTarget};
use crate::entropy::{l_existence_report, Diagnosis};
use crate::error::{HullError, Result};
use crate::geometry::sampling::per_axis;
use crate::geometry::{beta_ratio, volume_det, volume_projected, volume_ratio_poly};
use crate::minkowski::{
    check_reverse_bm, convexification_gap, empirical_general_ratio, revbm_to_csv, traces_to_csv, write_csv, BodyApprox,
};

/// Ceiling on the empirical reverse Brunn-Minkowski constant.
pub const C1_CEILING: f64 = 10.0;

#[derive(Debug, Default)]
pub(crate) struct CheckOutput {
    pub records: Vec<Rec>,
    /// (file suffix, CSV body).
    pub plots: Vec<(String, String)>,
    pub chaining: Vec<ChainingRow>,
    /// (|T|, γ_2) for the size plot.
    pub size_point: Option<(usize, f64)>,
}

fn flag(b: bool) -> f64 {
    if b { 1.0 } else { 0.0 }
}

fn target(input: &Input) -> Result<HullTarget<'_>> {
    match input {
        Input::Body(p) => Ok(HullTarget::Body(p)),
        Input::Cloud(c) => Ok(HullTarget::Cloud(c)),
        Input::Profile(_) => Err(HullError::InvalidInput("profiles have no geometry".into())),
    }
}

pub(crate) fn run_check(check: CheckName, input: &Input, params: &Params, seed: u64) -> Result<CheckOutput> {
    let mut out = CheckOutput::default();
    match (check, input) {
        (CheckName::VolumeXcheck, Input::Body(p)) => {
            let (det, proj) = (volume_det(&p.boundary), volume_projected(&p.boundary));
            out.records.push(
                Rec::compare("det_vs_projected", (det - proj).abs(), 1e-9 * det.abs())
                    .with("vol_det", det)
                    .with("vol_projected", proj),
            );
        }
        (CheckName::RatioPoly, Input::Body(p)) => {
            let r = volume_ratio_poly(p)?;
            let beta = beta_ratio(p)?;
            out.records.push(Rec::compare("hull_ratio", 1.0, r).with("R", r).with("vol", p.volume()));
            out.records.push(Rec::compare("beta", 1.0, beta).with("beta", beta));
        }
        (CheckName::Revbm, Input::Body(p)) => {
            let a = BodyApprox::from_polytope(p)?;
            let mut reports = Vec::new();
            for &s in &params.s_values {
                for &t in &params.t_values {
                    for &m in &params.m_values {
                        let r = check_reverse_bm(&a, &a, s, t, m)?;
                        out.records.push(
                            Rec::compare(format!("s={s} t={t} m={m}"), r.empirical_c1, C1_CEILING)
                                .with("C1", r.empirical_c1)
                                .with("beta_A", r.beta_a)
                                .with("beta_B", r.beta_b)
                                .with("lhs_vol", r.lhs_vol)
                                .with("rhs_a", r.rhs_terms.0)
                                .with("rhs_b", r.rhs_terms.1),
                        );
                        reports.push(r);
                    }
                }
            }
            out.plots.push(("ledger".into(), revbm_to_csv(&reports)?));
        }
        (CheckName::Convexify, Input::Body(_) | Input::Cloud(_)) => convexify(input, params, &mut out)?,
        (CheckName::CoverRatio, Input::Body(_) | Input::Cloud(_)) => {
            let t = target(input)?;
            #[derive(Serialize)]
            struct Row {
                epsilon: f64,
                n: usize,
            }
            let mut rows = Vec::new();
            for &eps in &params.epsilons {
                for (i, &mode) in params.modes.iter().enumerate() {
                    let r = check_hull_cover_ratio(t, eps, mode)?;
                    if i == 0 {
                        rows.push(Row { epsilon: eps, n: r.n_t_greedy });
                    }
                    let case = format!("eps={eps} mode={}", mode_name(mode));
                    let rec = match r.rhs {
                        Some(rhs) => Rec::compare(case, r.lhs, rhs),
                        None => Rec::vacuous(case, r.lhs).with("vacuous", 1.0),
                    };
                    let mut rec = rec
                        .with("n_hull_greedy", r.n_hull_greedy as f64)
                        .with("n_t_greedy", r.n_t_greedy as f64)
                        .with("n_t_lower", r.n_t_lower as f64);
                    if let Some(v) = r.r {
                        rec = rec.with("R", v);
                    }
                    if let Some(v) = r.r_bound {
                        rec = rec.with("R_bound", v);
                    }
                    out.records.push(rec);
                }
            }
            out.plots.push(("n_vs_eps".into(), write_csv(rows)?));
        }
        (CheckName::GammaHull, Input::Body(_) | Input::Cloud(_)) => {
            let t = target(input)?;
            for &mode in &params.modes {
                let r = certify_hull_gamma(t, params.alpha, mode)?;
                let case = format!("mode={}", mode_name(mode));
                let rec = if r.vacuous {
                    Rec::vacuous(case, r.gamma_th).with("vacuous", 1.0)
                } else {
                    Rec::compare(case, r.gamma_th, r.l_bound * r.gamma_t)
                };
                let mut rec = rec
                    .with("L", r.l_bound)
                    .with("gamma_T", r.gamma_t)
                    .with("gamma_Th", r.gamma_th)
                    .with("holds_at_L", flag(r.holds_at_l))
                    .with("spacing", r.spacing);
                if let Some(v) = r.r {
                    rec = rec.with("R", v);
                }
                out.records.push(rec);
                out.chaining.push(ChainingRow {
                    alpha: params.alpha,
                    gamma_t: Some(r.gamma_t),
                    gamma_th: Some(r.gamma_th),
                    l_bound: Some(r.l_bound),
                    ..Default::default()
                });
            }
        }
        (CheckName::MmTwoSided, Input::Cloud(c)) => {
            let r = certify_mm_two_sided(c, params.trials, seed)?;
            let rec = match r.l_hat {
                Some(l) => Rec::vacuous("two_sided", l).with("L_hat", l),
                None => Rec::vacuous("two_sided", 0.0).with("skipped", 1.0),
            };
            out.records.push(
                rec.with("gamma2", r.gamma2)
                    .with("esup", r.esup.mean)
                    .with("esup_se", r.esup.std_error)
                    .with("trials", r.esup.trials as f64),
            );
            out.size_point = Some((c.len(), r.gamma2));
            out.chaining.push(ChainingRow {
                alpha: 2.0,
                gamma_t: Some(r.gamma2),
                esup: Some(r.esup.mean),
                l_hat: r.l_hat,
                ..Default::default()
            });
        }
        (CheckName::LExistence, Input::Profile(sc)) => {
            let p = sc.profile()?;
            let c = if sc.c != 1.0 { sc.c } else { params.c };
            let r = l_existence_report(&p, sc.delta, c)?;
            let mut rec = match (&r.verdict.diagnosis, r.analytic) {
                (Diagnosis::Converged { value }, Some(a)) => {
                    Rec::compare("verdict", (value - a).abs(), 1e-3 * a.abs().max(1.0)).with("value", *value).with("analytic", a)
                }
                (Diagnosis::Converged { value }, None) => Rec::vacuous("verdict", *value).with("value", *value),
                (Diagnosis::InteriorSingularity { eps }, _) => Rec::vacuous("verdict", f64::NAN).with("singular_eps", *eps),
                (Diagnosis::EndpointDivergence, _) => Rec::vacuous("verdict", f64::NAN).with("endpoint_divergence", 1.0),
                (Diagnosis::Undecided, _) => Rec { holds: false, ..Rec::vacuous("verdict", f64::NAN) },
            };
            rec = rec
                .with("L_exists", flag(r.l_exists))
                .with("chi", p.chi)
                .with("psi", p.psi)
                .with("hull_psi", r.hull_profile.psi)
                .with("delta", sc.delta)
                .with("C", c);
            out.records.push(rec);
            #[derive(Serialize)]
            struct Row {
                level: usize,
                total: f64,
            }
            let rows = r.verdict.quadrature_trace.iter().map(|s| Row { level: s.level, total: s.total });
            out.plots.push(("trace".into(), write_csv(rows)?));
        }
        (check, _) => {
            return Err(HullError::InvalidInput(format!("check {} does not apply to this input", check.as_str())));
        }
    }
    Ok(out)
}

fn mode_name(m: crate::covering::HullMode) -> &'static str {
    match m {
        crate::covering::HullMode::Poly => "poly",
        crate::covering::HullMode::General => "general",
    }
}

fn convexify(input: &Input, params: &Params, out: &mut CheckOutput) -> Result<()> {
    let a = match input {
        Input::Body(p) => BodyApprox::from_polytope(p)?,
        Input::Cloud(c) => BodyApprox::from_cloud(c),
        Input::Profile(_) => unreachable!("filtered by the caller"),
    };
    let traces = convexification_gap(&a, params.k_max)?;
    // Gaps are measured on hull samples; one grid step is the resolution.
    let pts = a.points();
    let (lo, hi) = crate::geometry::bounding_box(a.dim(), pts.iter());
    let tol = lo.iter().zip(&hi).map(|(l, h)| h - l).fold(0.0, f64::max) / per_axis(a.dim()) as f64;
    let gaps: Vec<f64> = traces.iter().map(|t| t.hausdorff_to_hull).collect();
    let rise = gaps.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    out.records.push(Rec::compare("monotone", rise, tol).with("resolution", tol));
    let (first, last) = (gaps[0], gaps[gaps.len() - 1]);
    out.records.push(Rec::compare("shrink", last, first).with("gap_first", first).with("gap_last", last));
    if let Input::Body(p) = input {
        let vol_hull = p.hull()?.volume();
        let top = traces.iter().map(|t| t.vol_ak).fold(0.0, f64::max);
        // Unions in three or more dimensions are grid estimates.
        let rel = if a.dim() <= 2 { 1e-9 } else { 2.0 * a.dim() as f64 / per_axis(a.dim()) as f64 };
        out.records.push(Rec::compare("volume_below_hull", top, vol_hull * (1.0 + rel)).with("vol_hull", vol_hull));
        let g = empirical_general_ratio(&a, params.k_max)?;
        out.records.push(
            Rec::compare("general_ratio", g.ratio, g.bound).with("R", g.ratio).with("C1_hat", g.c1_hat).with("C2_hat", g.c2_hat),
        );
    }
    #[derive(Serialize)]
    struct Row {
        k: usize,
        gap: f64,
    }
    out.plots.push(("gap_vs_k".into(), write_csv(traces.iter().map(|t| Row { k: t.k, gap: t.hausdorff_to_hull }))?));
    out.plots.push(("trace".into(), traces_to_csv(&traces)?));
    Ok(())
}
