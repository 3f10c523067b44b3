//! Entropy-growth profiles, their convex-hull counterparts, the ratio
//! functions f(ε) and the integrability test deciding whether L exists.

use serde::{Deserialize, Serialize};

use crate::error::{HullError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileForm {
    /// log N(ε) = O(ε^{-χ} |log ε|^ψ).
    #[default]
    Plain,
    /// log N(ε) = O(ε^{-2} |log |log ε||^ψ); only produced by [`hull_profile`].
    LogLog,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyProfile {
    pub chi: f64,
    pub psi: f64,
    #[serde(default)]
    pub form: ProfileForm,
}

impl EntropyProfile {
    pub fn plain(chi: f64, psi: f64) -> Result<Self> {
        if !(chi >= 2.0 && chi.is_finite() && psi.is_finite()) {
            return Err(HullError::ParamOutOfRange(format!("need finite chi >= 2 and psi, got ({chi}, {psi})")));
        }
        Ok(Self { chi, psi, form: ProfileForm::Plain })
    }
}

/// Profile scenario as read from JSON: `{"chi", "psi", "delta", "C"}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileScenario {
    pub chi: f64,
    pub psi: f64,
    pub delta: f64,
    #[serde(rename = "C", default = "one")]
    pub c: f64,
}

fn one() -> f64 {
    1.0
}

impl ProfileScenario {
    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| HullError::InvalidInput(format!("profile JSON: {e}")))
    }

    pub fn profile(&self) -> Result<EntropyProfile> {
        EntropyProfile::plain(self.chi, self.psi)
    }
}

fn unsupported(p: &EntropyProfile) -> HullError {
    HullError::Unsupported(format!("no hull estimate for chi = {}, psi = {}", p.chi, p.psi))
}

/// Entropy profile of the convex hull for the three supported regimes:
/// χ > 2 is kept, (2, ψ > -2) becomes (2, ψ + 2), and (2, -3) becomes the
/// log-log form with exponent -1.
pub fn hull_profile(p: &EntropyProfile) -> Result<EntropyProfile> {
    if p.form != ProfileForm::Plain {
        return Err(HullError::Unsupported("hull profile of a log-log profile".into()));
    }
    if p.chi > 2.0 {
        Ok(*p)
    } else if p.chi == 2.0 && p.psi > -2.0 {
        Ok(EntropyProfile { chi: 2.0, psi: p.psi + 2.0, form: ProfileForm::Plain })
    } else if p.chi == 2.0 && p.psi == -3.0 {
        Ok(EntropyProfile { chi: 2.0, psi: 2.0 + p.psi, form: ProfileForm::LogLog })
    } else {
        Err(unsupported(p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioKind {
    Constant,
    LogSq,
    Log3OverLoglog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstantLabel {
    C3,
    C4,
    C5,
}

/// f(ε) bounding the ratio of hull entropy to entropy, up to the constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioFunction {
    pub kind: RatioKind,
    pub constant_label: ConstantLabel,
    pub constant: f64,
}

impl RatioFunction {
    pub fn new(kind: RatioKind, constant: f64) -> Self {
        let constant_label = match kind {
            RatioKind::Constant => ConstantLabel::C3,
            RatioKind::LogSq => ConstantLabel::C4,
            RatioKind::Log3OverLoglog => ConstantLabel::C5,
        };
        Self { kind, constant_label, constant }
    }

    pub fn eval(&self, eps: f64) -> f64 {
        let l = eps.ln().abs();
        self.constant
            * match self.kind {
                RatioKind::Constant => 1.0,
                RatioKind::LogSq => l * l,
                RatioKind::Log3OverLoglog => l.powi(3) / l.ln().abs(),
            }
    }

    /// Points of (0, ∞) where f is not locally integrable.
    pub fn singular_points(&self) -> Vec<f64> {
        match self.kind {
            RatioKind::Log3OverLoglog => vec![(-1f64).exp(), 1f64.exp()],
            _ => Vec::new(),
        }
    }
}

/// Ratio function for a profile, with the constant set to `c`.
pub fn ratio_bound(p: &EntropyProfile, c: f64) -> Result<RatioFunction> {
    if p.form != ProfileForm::Plain {
        return Err(HullError::Unsupported("ratio bound of a log-log profile".into()));
    }
    let kind = if p.chi > 2.0 {
        RatioKind::Constant
    } else if p.chi == 2.0 && p.psi > -2.0 {
        RatioKind::LogSq
    } else if p.chi == 2.0 && p.psi == -3.0 {
        RatioKind::Log3OverLoglog
    } else {
        return Err(unsupported(p));
    };
    Ok(RatioFunction::new(kind, c))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Diagnosis {
    Converged { value: f64 },
    /// Increments near ε = 0 stopped shrinking.
    EndpointDivergence,
    /// Shrinking windows around ε* keep adding mass.
    InteriorSingularity { eps: f64 },
    /// Refinement budget ran out without a decision.
    Undecided,
}

/// One refinement: the lower limit (endpoint stage) or the window
/// half-width (singularity stage), the piece added and the running total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub stage: String,
    pub level: usize,
    pub param: f64,
    pub increment: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityVerdict {
    pub converges: bool,
    pub diagnosis: Diagnosis,
    pub quadrature_trace: Vec<TraceStep>,
}

impl IntegrabilityVerdict {
    pub fn value(&self) -> Option<f64> {
        match self.diagnosis {
            Diagnosis::Converged { value } => Some(value),
            _ => None,
        }
    }
}

/// Relative agreement demanded between successive refinements.
pub const CONVERGENCE_TOL: f64 = 1e-4;
/// Consecutive non-shrinking increments that count as divergence.
pub const DIVERGENCE_RUN: usize = 6;
/// An increment at least this fraction of the previous one is not shrinking.
const STALL_RATIO: f64 = 0.9;
/// Default number of refinements per stage.
pub const DEFAULT_BUDGET: usize = 24;

/// ∫_a^b f(ε) dε, computed in u = -ln ε.
fn piece(f: &RatioFunction, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (ua, ub) = (-b.ln(), -a.ln());
    let g = |u: f64| {
        let e = (-u).exp();
        if e == 0.0 { 0.0 } else { f.eval(e) * e }
    };
    let scale = f.constant.abs().max(f64::MIN_POSITIVE) * (b - a);
    quadrature::double_exponential::integrate(g, ua, ub.min(745.0), 1e-12 * scale).integral
}

/// Tracks a sequence of increments for the stall and convergence rules.
struct Refiner {
    prev: Option<f64>,
    stalls: usize,
}

enum Step {
    Continue,
    Converged,
    Diverged,
}

impl Refiner {
    fn new() -> Self {
        Self { prev: None, stalls: 0 }
    }

    fn push(&mut self, increment: f64, total: f64) -> Step {
        let inc = increment.abs();
        if let Some(prev) = self.prev {
            if inc >= STALL_RATIO * prev && inc > 0.0 {
                self.stalls += 1;
            } else {
                self.stalls = 0;
            }
        }
        self.prev = Some(inc);
        if self.stalls >= DIVERGENCE_RUN {
            Step::Diverged
        } else if inc <= CONVERGENCE_TOL * total.abs() || inc == 0.0 {
            Step::Converged
        } else {
            Step::Continue
        }
    }
}

/// Decides whether ∫_0^Δ f(ε) dε exists, with the default budget.
pub fn integral_exists(f: &RatioFunction, delta: f64) -> Result<IntegrabilityVerdict> {
    integral_exists_with(f, delta, DEFAULT_BUDGET)
}

/// As [`integral_exists`] with `budget` refinements per stage.
///
/// Singular points inside (0, Δ] are probed first with windows ε*(1 ± w),
/// w halving each step. Then the lower limit is pushed to η_j = Δ 2^{-2^j}
/// (capped by the smallest positive double) until the increments settle or
/// stall.
pub fn integral_exists_with(f: &RatioFunction, delta: f64, budget: usize) -> Result<IntegrabilityVerdict> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(HullError::ParamOutOfRange(format!("delta must be positive, got {delta}")));
    }
    let mut trace = Vec::new();
    let verdict = |converges, diagnosis, trace| Ok(IntegrabilityVerdict { converges, diagnosis, quadrature_trace: trace });
    let singular: Vec<f64> = f.singular_points().into_iter().filter(|&s| s <= delta * (1.0 + 1e-12)).collect();

    for &s in &singular {
        let mut refiner = Refiner::new();
        let mut total = 0.0;
        let mut w_prev = 0.5;
        let mut settled = false;
        for level in 1..=budget {
            let w = 0.5f64.powi(level as i32 + 1);
            let inc = piece(f, s * (1.0 - w_prev), s * (1.0 - w)) + piece(f, s * (1.0 + w), (s * (1.0 + w_prev)).min(delta));
            total += inc;
            trace.push(TraceStep { stage: format!("window {s:.6}"), level, param: w, increment: inc, total });
            w_prev = w;
            match refiner.push(inc, total) {
                Step::Diverged => return verdict(false, Diagnosis::InteriorSingularity { eps: s }, trace),
                Step::Converged => {
                    settled = true;
                    break;
                }
                Step::Continue => {}
            }
        }
        if !settled {
            return verdict(false, Diagnosis::Undecided, trace);
        }
    }

    let mut refiner = Refiner::new();
    let mut hi = delta * 0.5;
    let mut total = piece_avoiding(f, hi, delta, &singular);
    trace.push(TraceStep { stage: "endpoint".into(), level: 0, param: hi, increment: total, total });
    for level in 1..=budget {
        let lo = (delta * 0.5f64.powf(2f64.powi(level as i32))).max(f64::MIN_POSITIVE);
        let inc = piece_avoiding(f, lo, hi, &singular);
        total += inc;
        trace.push(TraceStep { stage: "endpoint".into(), level, param: lo, increment: inc, total });
        hi = lo;
        match refiner.push(inc, total) {
            Step::Diverged => return verdict(false, Diagnosis::EndpointDivergence, trace),
            Step::Converged => return verdict(true, Diagnosis::Converged { value: total }, trace),
            Step::Continue => {}
        }
        if lo <= f64::MIN_POSITIVE {
            break;
        }
    }
    verdict(false, Diagnosis::Undecided, trace)
}

/// [`piece`] split at the singular points, so the quadrature never samples
/// across one.
fn piece_avoiding(f: &RatioFunction, a: f64, b: f64, singular: &[f64]) -> f64 {
    let mut cuts = vec![a];
    cuts.extend(singular.iter().copied().filter(|&s| a < s && s < b));
    cuts.push(b);
    cuts.windows(2).map(|w| piece(f, w[0], w[1])).sum()
}

/// ∫_0^Δ (ln ε)² dε = Δ(ln²Δ - 2 ln Δ + 2).
pub fn log_sq_integral(delta: f64) -> f64 {
    let l = delta.ln();
    delta * (l * l - 2.0 * l + 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LExistenceReport {
    pub profile: EntropyProfile,
    pub hull_profile: EntropyProfile,
    pub ratio: RatioFunction,
    pub delta: f64,
    pub verdict: IntegrabilityVerdict,
    /// Closed-form value where one exists, for cross-checking the quadrature.
    pub analytic: Option<f64>,
    pub l_exists: bool,
}

pub fn l_existence_report(p: &EntropyProfile, delta: f64, c: f64) -> Result<LExistenceReport> {
    let hull = hull_profile(p)?;
    let ratio = ratio_bound(p, c)?;
    let verdict = integral_exists(&ratio, delta)?;
    let analytic = match ratio.kind {
        RatioKind::Constant => Some(c * delta),
        RatioKind::LogSq => Some(c * log_sq_integral(delta)),
        RatioKind::Log3OverLoglog => None,
    };
    Ok(LExistenceReport { profile: *p, hull_profile: hull, ratio, delta, l_exists: verdict.converges, verdict, analytic })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_profiles() {
        let p = |c, s| EntropyProfile::plain(c, s).unwrap();
        assert_eq!(hull_profile(&p(3.0, 0.0)).unwrap(), p(3.0, 0.0));
        assert_eq!(hull_profile(&p(2.0, 0.0)).unwrap(), p(2.0, 2.0));
        let l = hull_profile(&p(2.0, -3.0)).unwrap();
        assert_eq!((l.form, l.psi), (ProfileForm::LogLog, -1.0));
        assert!(matches!(hull_profile(&p(2.0, -2.5)), Err(HullError::Unsupported(_))));
        assert!(matches!(hull_profile(&p(2.0, -4.0)), Err(HullError::Unsupported(_))));
        assert!(EntropyProfile::plain(1.5, 0.0).is_err());
    }

    #[test]
    fn constant_and_log_sq() {
        let v = integral_exists(&RatioFunction::new(RatioKind::Constant, 1.0), 1.0).unwrap();
        assert!((v.value().unwrap() - 1.0).abs() < 1e-6);
        let v = integral_exists(&RatioFunction::new(RatioKind::LogSq, 1.0), 1.0).unwrap();
        assert!((v.value().unwrap() - 2.0).abs() < 2e-4);
    }

    #[test]
    fn loglog_diverges_at_the_interior_point() {
        let v = integral_exists(&RatioFunction::new(RatioKind::Log3OverLoglog, 1.0), 1.0).unwrap();
        assert!(!v.converges);
        assert_eq!(v.diagnosis, Diagnosis::InteriorSingularity { eps: (-1f64).exp() });
        // Below e^{-1} the integrand is integrable.
        let v = integral_exists(&RatioFunction::new(RatioKind::Log3OverLoglog, 1.0), 0.3).unwrap();
        assert!(v.converges);
    }

    #[test]
    fn scenario_json() {
        let s = ProfileScenario::from_json_str(r#"{"chi": 2, "psi": -1, "delta": 1}"#).unwrap();
        assert_eq!(s.c, 1.0);
        let r = l_existence_report(&s.profile().unwrap(), s.delta, s.c).unwrap();
        assert!(r.l_exists);
    }
}
