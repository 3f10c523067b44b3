//! C ABI over `hullmetry`.
//!
//! Bodies and clouds live behind opaque handles that the caller frees. Every
//! fallible call returns an [`HmStatus`]; on failure the message is kept per
//! thread and can be read with [`hm_last_error`]. Panics never cross the
//! boundary: they are caught and reported as `HM_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hullmetry::chaining::{certify_hull_gamma, entropy_integral, gamma_exact_small, gamma_greedy, gaussian_sup_mc};
use hullmetry::covering::{greedy_cover, HullMode, HullTarget};
use hullmetry::entropy::{l_existence_report, EntropyProfile};
use hullmetry::error::HullError;
use hullmetry::geometry::{beta_ratio, quickhull, volume_ratio_poly, PointCloud, Polytope};

/// Status code of every fallible call. Zero means success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    DegenerateInput = 3,
    NonOrientable = 4,
    NotClosed = 5,
    DimensionMismatch = 6,
    NonpositiveScale = 7,
    ParamOutOfRange = 8,
    TooLarge = 9,
    PreconditionFailed = 10,
    Unsupported = 11,
    InvalidInput = 12,
    Panic = 13,
}

impl From<&HullError> for HmStatus {
    fn from(e: &HullError) -> Self {
        match e {
            HullError::DegenerateInput(_) => HmStatus::DegenerateInput,
            HullError::NonOrientable(_) => HmStatus::NonOrientable,
            HullError::NotClosed(_) => HmStatus::NotClosed,
            HullError::DimensionMismatch { .. } => HmStatus::DimensionMismatch,
            HullError::NonpositiveScale(_) => HmStatus::NonpositiveScale,
            HullError::ParamOutOfRange(_) => HmStatus::ParamOutOfRange,
            HullError::TooLarge { .. } => HmStatus::TooLarge,
            HullError::PreconditionFailed(_) => HmStatus::PreconditionFailed,
            HullError::Unsupported(_) => HmStatus::Unsupported,
            HullError::InvalidInput(_) => HmStatus::InvalidInput,
        }
    }
}

/// How [`hm_cloud_gamma`] evaluates γ_α.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HmGammaMethod {
    /// Exhaustive; at most five points.
    Exact = 0,
    Greedy = 1,
    EntropyIntegral = 2,
}

/// Volume ratio used by [`hm_hull_gamma`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HmHullMode {
    Poly = 0,
    General = 1,
}

/// Opaque polytope handle.
pub struct HmPolytope(Polytope);

/// Opaque point cloud handle.
pub struct HmCloud(PointCloud);

/// Result of [`hm_hull_gamma`].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HmHullGamma {
    pub gamma_t: f64,
    pub gamma_th: f64,
    pub l_bound: f64,
    /// Volume ratio; NaN for clouds.
    pub r: f64,
    pub holds: bool,
    pub vacuous: bool,
}

/// Result of [`hm_cloud_sup_gauss`].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HmSupEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
}

/// Result of [`hm_profile_verdict`].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HmProfileVerdict {
    pub l_exists: bool,
    /// Integral value when it converged, NaN otherwise.
    pub value: f64,
    /// First singular ε when divergence is interior, NaN otherwise.
    pub singular_eps: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Fail {
    Status(HmStatus, String),
    Hull(HullError),
}

impl From<HullError> for Fail {
    fn from(e: HullError) -> Self {
        Fail::Hull(e)
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(HmStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status plus message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> HmStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HmStatus::Ok,
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Ok(Err(Fail::Hull(e))) => {
            set_error(e.to_string());
            HmStatus::from(&e)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            HmStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|e| Fail::Status(HmStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (always
/// NUL-terminated when `len > 0`). Returns the full message length in bytes,
/// 0 when the last call succeeded.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn hm_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match &*e.borrow() {
        None => {
            if !buf.is_null() && len > 0 {
                *buf = 0;
            }
            0
        }
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Builds a cloud from `n` points of dimension `dim`, row-major in `coords`.
///
/// # Safety
/// `coords` must hold `n * dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_cloud_new(coords: *const f64, n: usize, dim: usize, out: *mut *mut HmCloud) -> HmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        if coords.is_null() {
            return Err(null("coords"));
        }
        let len = n.checked_mul(dim).ok_or_else(|| Fail::Status(HmStatus::TooLarge, "n * dim overflows".into()))?;
        let flat = std::slice::from_raw_parts(coords, len);
        let rows = flat.chunks(dim.max(1)).map(<[f64]>::to_vec).collect();
        let cloud = if dim == 0 { PointCloud::from_rows(vec![])? } else { PointCloud::from_rows(rows)? };
        *out = Box::into_raw(Box::new(HmCloud(cloud)));
        Ok(())
    })
}

/// Parses a cloud from JSON: `{"points": [[...], ...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_cloud_from_json(json: *const c_char, out: *mut *mut HmCloud) -> HmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let cloud = PointCloud::from_json_str(str_arg(json, "json")?)?;
        *out = Box::into_raw(Box::new(HmCloud(cloud)));
        Ok(())
    })
}

/// # Safety
/// `cloud` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn hm_cloud_free(cloud: *mut HmCloud) {
    if !cloud.is_null() {
        drop(Box::from_raw(cloud));
    }
}

/// # Safety
/// `cloud` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hm_cloud_len(cloud: *const HmCloud) -> usize {
    cloud.as_ref().map_or(0, |c| c.0.len())
}

/// Parses a polytope from JSON: `{"dim", "vertices", "facets", "pieces"?}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_polytope_from_json(json: *const c_char, out: *mut *mut HmPolytope) -> HmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let p = Polytope::from_json_str(str_arg(json, "json")?)?;
        *out = Box::into_raw(Box::new(HmPolytope(p)));
        Ok(())
    })
}

/// Convex hull of a cloud.
///
/// # Safety
/// `cloud` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_cloud_hull(cloud: *const HmCloud, out: *mut *mut HmPolytope) -> HmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let hull = quickhull(&handle(cloud, "cloud")?.0)?;
        *out = Box::into_raw(Box::new(HmPolytope(hull)));
        Ok(())
    })
}

/// # Safety
/// `poly` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn hm_polytope_free(poly: *mut HmPolytope) {
    if !poly.is_null() {
        drop(Box::from_raw(poly));
    }
}

/// # Safety
/// `poly` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_polytope_volume(poly: *const HmPolytope, out: *mut f64) -> HmStatus {
    guard(|| {
        *out_arg(out, "out")? = handle(poly, "poly")?.0.volume();
        Ok(())
    })
}

/// Vol(hull) / Vol(P).
///
/// # Safety
/// `poly` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_polytope_hull_ratio(poly: *const HmPolytope, out: *mut f64) -> HmStatus {
    guard(|| {
        let r = volume_ratio_poly(&handle(poly, "poly")?.0)?;
        *out_arg(out, "out")? = r;
        Ok(())
    })
}

/// Normalized boundary-to-volume ratio β of a polytope.
///
/// # Safety
/// `poly` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_polytope_beta(poly: *const HmPolytope, out: *mut f64) -> HmStatus {
    guard(|| {
        let b = beta_ratio(&handle(poly, "poly")?.0)?;
        *out_arg(out, "out")? = b;
        Ok(())
    })
}

/// Size of a greedy ε-cover of the cloud.
///
/// # Safety
/// `cloud` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_cloud_cover(cloud: *const HmCloud, eps: f64, out: *mut usize) -> HmStatus {
    guard(|| {
        let r = greedy_cover(&handle(cloud, "cloud")?.0, eps)?;
        *out_arg(out, "out")? = r.n_greedy;
        Ok(())
    })
}

/// γ_α of a cloud.
///
/// # Safety
/// `cloud` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_cloud_gamma(
    cloud: *const HmCloud,
    alpha: f64,
    method: HmGammaMethod,
    out: *mut f64,
) -> HmStatus {
    guard(|| {
        let c = &handle(cloud, "cloud")?.0;
        let est = match method {
            HmGammaMethod::Exact => gamma_exact_small(c, alpha)?,
            HmGammaMethod::Greedy => gamma_greedy(c, alpha)?,
            HmGammaMethod::EntropyIntegral => entropy_integral(c, alpha)?,
        };
        *out_arg(out, "out")? = est.value;
        Ok(())
    })
}

/// Monte Carlo E sup of the canonical Gaussian process on the cloud.
/// Identical seeds give identical results on any thread count.
///
/// # Safety
/// `cloud` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_cloud_sup_gauss(
    cloud: *const HmCloud,
    trials: usize,
    seed: u64,
    out: *mut HmSupEstimate,
) -> HmStatus {
    guard(|| {
        let e = gaussian_sup_mc(&handle(cloud, "cloud")?.0, trials, seed)?;
        *out_arg(out, "out")? = HmSupEstimate { mean: e.mean, std_error: e.std_error, trials: e.trials };
        Ok(())
    })
}

fn hull_gamma(t: HullTarget<'_>, alpha: f64, mode: HmHullMode) -> Result<HmHullGamma, HullError> {
    let mode = match mode {
        HmHullMode::Poly => HullMode::Poly,
        HmHullMode::General => HullMode::General,
    };
    let r = certify_hull_gamma(t, alpha, mode)?;
    Ok(HmHullGamma {
        gamma_t: r.gamma_t,
        gamma_th: r.gamma_th,
        l_bound: r.l_bound,
        r: r.r.unwrap_or(f64::NAN),
        holds: r.holds,
        vacuous: r.vacuous,
    })
}

/// Compares γ_α of the body with γ_α of its hull. Pass exactly one of
/// `poly` and `cloud`.
///
/// # Safety
/// Non-null handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_hull_gamma(
    poly: *const HmPolytope,
    cloud: *const HmCloud,
    alpha: f64,
    mode: HmHullMode,
    out: *mut HmHullGamma,
) -> HmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let t = match (poly.as_ref(), cloud.as_ref()) {
            (Some(p), None) => HullTarget::Body(&p.0),
            (None, Some(c)) => HullTarget::Cloud(&c.0),
            (None, None) => return Err(null("poly and cloud")),
            (Some(_), Some(_)) => {
                return Err(Fail::Status(HmStatus::InvalidInput, "pass one of poly and cloud".into()));
            }
        };
        *out = hull_gamma(t, alpha, mode)?;
        Ok(())
    })
}

/// Whether the hull-to-body constant exists for the entropy profile
/// ε^{-χ} |log ε|^ψ on (0, delta], with ratio constant `c`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_profile_verdict(
    chi: f64,
    psi: f64,
    delta: f64,
    c: f64,
    out: *mut HmProfileVerdict,
) -> HmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let r = l_existence_report(&EntropyProfile::plain(chi, psi)?, delta, c)?;
        let singular_eps = match r.verdict.diagnosis {
            hullmetry::entropy::Diagnosis::InteriorSingularity { eps } => eps,
            _ => f64::NAN,
        };
        *out = HmProfileVerdict { l_exists: r.l_exists, value: r.verdict.value().unwrap_or(f64::NAN), singular_eps };
        Ok(())
    })
}
