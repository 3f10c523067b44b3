use hullmetry::fixtures;
use hullmetry::geometry::{Point, Polytope};
use hullmetry::minkowski::*;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn convex(pts: &[[f64; 2]]) -> BodyApprox {
    BodyApprox::convex(2, pts.iter().map(|p| Point::new(p.to_vec())).collect()).unwrap()
}

fn body(name: &str) -> BodyApprox {
    BodyApprox::from_polytope(&fixtures::body(name).unwrap()).unwrap()
}

#[test]
fn lshape_decomposes_to_volume_three() {
    let a = body("lshape");
    assert!((a.volume() - 3.0).abs() < 1e-12);
    assert!((a.hull().unwrap().volume() - 3.5).abs() < 1e-12);
}

#[test]
fn sum_of_squares_is_square() {
    let a = body("unit_square");
    let s = minkowski_sum(&a, &a).unwrap();
    assert!((s.volume() - 4.0).abs() < 1e-12);
}

#[test]
fn square_plus_segment() {
    let sq = body("unit_square");
    let seg = BodyApprox::from_cloud(&fixtures::cloud("two_point_e1").unwrap());
    // [0,1]^2 ⊕ {0, e1} = [0,2]x[0,1] minus nothing: two overlapping squares.
    let s = minkowski_sum(&sq, &seg).unwrap();
    assert!((s.volume() - 2.0).abs() < 1e-12);
}

#[test]
fn lshape_convexification_is_monotone_and_shrinks() {
    let a = body("lshape");
    let traces = convexification_gap(&a, 8).unwrap();
    let hull = a.hull().unwrap().volume();
    for w in traces.windows(2) {
        assert!(w[1].vol_ak >= w[0].vol_ak - 1e-9, "volume dropped at k = {}", w[1].k);
        assert!(w[1].hausdorff_to_hull <= w[0].hausdorff_to_hull + 0.01);
    }
    for t in &traces {
        assert!(t.vol_ak <= hull + 1e-9);
    }
    assert!(traces[7].hausdorff_to_hull < 0.25 * traces[0].hausdorff_to_hull);
}

#[test]
fn two_point_gap_is_one_over_two_k() {
    let a = BodyApprox::from_cloud(&fixtures::cloud("two_point_e1").unwrap());
    for t in convexification_gap(&a, 8).unwrap() {
        let want = 1.0 / (2.0 * t.k as f64);
        // Hull samples have spacing 1/100 on the unit segment.
        assert!((t.hausdorff_to_hull - want).abs() <= 0.01, "k = {}: {} vs {want}", t.k, t.hausdorff_to_hull);
    }
}

#[test]
fn general_bound_closed_forms() {
    assert_eq!(volume_ratio_general_bound(1, 7.0).unwrap(), 1.0);
    assert_eq!(volume_ratio_general_bound(2, 3.5).unwrap(), 3.5);
    // C = 1: 2/k + (k-2)/k = 1.
    for k in 1..20 {
        assert!((volume_ratio_general_bound(k, 1.0).unwrap() - 1.0).abs() < 1e-12);
    }
    // Against the pole form away from C = 1.
    let (k, c) = (6usize, 1.7f64);
    let pole = 2.0 * c.powi(5) / 6.0 + c * (c.powi(4) - 1.0) / (6.0 * (c - 1.0));
    assert!(rel(volume_ratio_general_bound(k, c).unwrap(), pole) < 1e-12);
    assert!(volume_ratio_general_bound(0, 2.0).is_err());
    assert!(volume_ratio_general_bound(3, 0.5).is_err());
}

#[test]
fn general_ratio_bounds_fixtures() {
    for name in ["unit_square", "lshape", "cshape"] {
        let r = empirical_general_ratio(&body(name), 8).unwrap();
        assert!(r.holds, "{name}: {} > {}", r.ratio, r.bound);
    }
}

#[test]
fn reverse_bm_square_is_four_over_pi() {
    let a = body("unit_square");
    let r = check_reverse_bm(&a, &a, 1.0, 1.0, 1).unwrap();
    assert!((r.empirical_c1 - 4.0 / std::f64::consts::PI).abs() < 1e-6);
}

#[test]
fn reverse_bm_rejects_bad_input() {
    let a = body("unit_square");
    assert!(check_reverse_bm(&a, &a, 1.0, 1.0, 0).is_err());
    assert!(check_reverse_bm(&a, &a, -1.0, 1.0, 1).is_err());
    assert!(check_reverse_bm(&a, &body("cube"), 1.0, 1.0, 1).is_err());
}

/// For convex A = B and s = t the ledger reduces to
/// (2s)^{n/m} Vol^{1/m} / (2 s (β Vol)^{1/m}).
#[test]
fn reverse_bm_identity_on_convex_fixtures() {
    for name in ["unit_square", "cube", "simplex3", "unit_disk"] {
        let a = body(name);
        let (n, vol, beta) = (a.dim() as f64, a.volume(), a.beta().unwrap());
        for s in [0.5, 1.0, 2.0] {
            for m in [1u32, 2] {
                let mf = f64::from(m);
                let r = check_reverse_bm(&a, &a, s, s, m).unwrap();
                let want = (2.0 * s).powf(n / mf) * vol.powf(1.0 / mf) / (2.0 * s * (beta * vol).powf(1.0 / mf));
                assert!(rel(r.empirical_c1, want) < 1e-6, "{name} s={s} m={m}: {} vs {want}", r.empirical_c1);
            }
        }
    }
}

#[test]
fn scaling_polytope_and_body_agree() {
    let p: Polytope = fixtures::body("lshape").unwrap();
    let b = scale_body(&body("lshape"), 1.5).unwrap();
    assert!(rel(b.volume(), p.scaled(1.5).volume()) < 1e-12);
}

fn arb_convex() -> impl Strategy<Value = Vec<[f64; 2]>> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64).prop_map(|(x, y)| [x, y]), 4..9)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sum_is_commutative_and_associative(a in arb_convex(), b in arb_convex(), c in arb_convex()) {
        let (a, b, c) = match (BodyApprox::convex(2, pts(&a)), BodyApprox::convex(2, pts(&b)), BodyApprox::convex(2, pts(&c))) {
            (Ok(a), Ok(b), Ok(c)) => (a, b, c),
            _ => return Ok(()),
        };
        let ab = minkowski_sum(&a, &b).unwrap().volume();
        let ba = minkowski_sum(&b, &a).unwrap().volume();
        prop_assert!(rel(ab, ba) < 1e-9);
        let l = minkowski_sum(&minkowski_sum(&a, &b).unwrap(), &c).unwrap().volume();
        let r = minkowski_sum(&a, &minkowski_sum(&b, &c).unwrap()).unwrap().volume();
        prop_assert!(rel(l, r) < 1e-9);
    }

    #[test]
    fn scaling_multiplies_volume(a in arb_convex(), s in 0.1..5.0f64) {
        if let Ok(a) = BodyApprox::convex(2, pts(&a)) {
            let v = scale_body(&a, s).unwrap().volume();
            prop_assert!(rel(v, s * s * a.volume()) < 1e-9);
        }
    }

    #[test]
    fn scaling_nonconvex_union(s in 0.1..5.0f64) {
        let a = body("cshape");
        prop_assert!(rel(scale_body(&a, s).unwrap().volume(), s * s * a.volume()) < 1e-9);
    }

    #[test]
    fn forward_brunn_minkowski(a in arb_convex(), b in arb_convex()) {
        if let (Ok(a), Ok(b)) = (BodyApprox::convex(2, pts(&a)), BodyApprox::convex(2, pts(&b))) {
            let lhs = minkowski_sum(&a, &b).unwrap().volume().sqrt();
            prop_assert!(lhs >= a.volume().sqrt() + b.volume().sqrt() - 1e-9);
        }
    }

    #[test]
    fn general_bound_at_least_one(k in 2usize..40, c in 1.0..4.0f64) {
        prop_assert!(volume_ratio_general_bound(k, c).unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn average_volume_is_between_body_and_hull(k in 1usize..5) {
        let a = body("lshape");
        let v = minkowski_average(&a, k).unwrap().volume();
        prop_assert!(v >= a.volume() - 1e-9 && v <= 3.5 + 1e-9);
    }
}

fn pts(p: &[[f64; 2]]) -> Vec<Point> {
    p.iter().map(|q| Point::new(q.to_vec())).collect()
}

#[test]
fn convex_helper_builds() {
    assert!((convex(&[[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]]).volume() - 2.0).abs() < 1e-12);
}
