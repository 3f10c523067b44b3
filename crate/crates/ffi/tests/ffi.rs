use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use hullmetry_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 512];
    unsafe {
        hm_last_error(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn cloud(rows: &[[f64; 2]]) -> *mut HmCloud {
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { hm_cloud_new(flat.as_ptr(), rows.len(), 2, &mut out) }, HmStatus::Ok);
    out
}

const SQUARE: &str = r#"{"dim": 2, "vertices": [[0,0],[1,0],[1,1],[0,1]], "facets": [[0,1],[1,2],[2,3],[3,0]]}"#;

#[test]
fn polytope_volume_and_ratio() {
    let json = CString::new(SQUARE).unwrap();
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(hm_polytope_from_json(json.as_ptr(), &mut p), HmStatus::Ok);
        let (mut v, mut r, mut b) = (0.0, 0.0, 0.0);
        assert_eq!(hm_polytope_volume(p, &mut v), HmStatus::Ok);
        assert_eq!(hm_polytope_hull_ratio(p, &mut r), HmStatus::Ok);
        assert_eq!(hm_polytope_beta(p, &mut b), HmStatus::Ok);
        assert!((v - 1.0).abs() < 1e-12);
        assert!((r - 1.0).abs() < 1e-12);
        assert!(b >= 1.0);
        hm_polytope_free(p);
    }
}

#[test]
fn cloud_gamma_cover_and_sup() {
    let c = cloud(&[[0.0, 0.0], [1.0, 0.0]]);
    unsafe {
        let mut g = 0.0;
        assert_eq!(hm_cloud_gamma(c, 2.0, HmGammaMethod::Exact, &mut g), HmStatus::Ok);
        assert!((g - 1.0).abs() < 1e-12);
        let mut n = 0usize;
        assert_eq!(hm_cloud_cover(c, 0.4, &mut n), HmStatus::Ok);
        assert_eq!(n, 2);
        let (mut a, mut b) = (HmSupEstimate::default(), HmSupEstimate::default());
        assert_eq!(hm_cloud_sup_gauss(c, 2000, 7, &mut a), HmStatus::Ok);
        assert_eq!(hm_cloud_sup_gauss(c, 2000, 7, &mut b), HmStatus::Ok);
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        // E max(0, g) = 1/sqrt(2π).
        assert!((a.mean - 0.398_942_28).abs() < 5.0 * a.std_error);
        hm_cloud_free(c);
    }
}

#[test]
fn hull_gamma_on_body_and_cloud() {
    let json = CString::new(SQUARE).unwrap();
    let mut p = ptr::null_mut();
    let c = cloud(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
    unsafe {
        assert_eq!(hm_polytope_from_json(json.as_ptr(), &mut p), HmStatus::Ok);
        let mut r = HmHullGamma::default();
        assert_eq!(hm_hull_gamma(p, ptr::null(), 2.0, HmHullMode::Poly, &mut r), HmStatus::Ok);
        assert!(r.holds && !r.vacuous);
        assert_eq!(r.gamma_t, r.gamma_th);
        assert_eq!(hm_hull_gamma(ptr::null(), c, 2.0, HmHullMode::Poly, &mut r), HmStatus::Ok);
        assert!(r.vacuous && r.r.is_nan());
        assert_eq!(hm_hull_gamma(p, c, 2.0, HmHullMode::Poly, &mut r), HmStatus::InvalidInput);
        assert_eq!(hm_hull_gamma(ptr::null(), ptr::null(), 2.0, HmHullMode::Poly, &mut r), HmStatus::NullPointer);
        hm_polytope_free(p);
        hm_cloud_free(c);
    }
}

#[test]
fn profile_verdicts() {
    let mut v = HmProfileVerdict::default();
    unsafe {
        assert_eq!(hm_profile_verdict(2.0, -1.0, 1.0, 1.0, &mut v), HmStatus::Ok);
        assert!(v.l_exists);
        assert!((v.value - 2.0).abs() < 1e-6);
        assert_eq!(hm_profile_verdict(2.0, -3.0, 1.0, 1.0, &mut v), HmStatus::Ok);
        assert!(!v.l_exists);
        assert!((v.singular_eps - (-1.0f64).exp()).abs() < 1e-9);
        assert_eq!(hm_profile_verdict(1.0, 0.0, 1.0, 1.0, &mut v), HmStatus::ParamOutOfRange);
    }
}

#[test]
fn errors_are_reported_per_thread() {
    let bad = cloud(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]);
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(hm_cloud_hull(bad, &mut h), HmStatus::DegenerateInput);
        assert!(h.is_null());
        assert!(!last_error().is_empty());
        std::thread::spawn(|| assert_eq!(last_error(), "")).join().unwrap();

        let mut g = 0.0;
        assert_eq!(hm_cloud_gamma(bad, 2.0, HmGammaMethod::Exact, &mut g), HmStatus::Ok);
        assert_eq!(last_error(), "");

        assert_eq!(hm_polytope_volume(ptr::null(), &mut g), HmStatus::NullPointer);
        assert_eq!(hm_cloud_from_json(ptr::null(), &mut h.cast()), HmStatus::NullPointer);
        let junk = CString::new("{not json").unwrap();
        let mut c = ptr::null_mut();
        assert_eq!(hm_cloud_from_json(junk.as_ptr(), &mut c), HmStatus::InvalidInput);
        let invalid = [0xffu8 as c_char, 0];
        assert_eq!(hm_cloud_from_json(invalid.as_ptr(), &mut c), HmStatus::InvalidUtf8);
        assert_eq!(hm_cloud_gamma(bad, -1.0, HmGammaMethod::Greedy, &mut g), HmStatus::ParamOutOfRange);
        hm_cloud_free(bad);
        hm_cloud_free(ptr::null_mut());
        hm_polytope_free(ptr::null_mut());
    }
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(hm_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

/// Compiles a C program against the generated header and the static library.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|p| p.parent()).unwrap().to_path_buf();
    let lib = profile_dir.join("libhullmetry_ffi.a");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if !lib.exists() || Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let out = tempfile::tempdir().unwrap();
    let bin = out.path().join("smoke");
    let status = Command::new(&cc)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
