use hullmetry::error::HullError;
use hullmetry::geometry::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cloud(rows: &[&[f64]]) -> PointCloud {
    PointCloud::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
}

fn sorted_coords(p: &Polytope) -> Vec<Vec<f64>> {
    let mut v: Vec<Vec<f64>> = p.vertices.iter().map(|p| p.coords.clone()).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Extreme points by brute force in the plane: a point is extreme iff it is
/// not inside any triangle of the others and not between two others.
fn brute_extreme_2d(pts: &[[f64; 2]]) -> Vec<Vec<f64>> {
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let in_tri = |p, a, b, c| {
        let (d1, d2, d3) = (cross(a, b, p), cross(b, c, p), cross(c, a, p));
        let neg = d1 < -1e-12 || d2 < -1e-12 || d3 < -1e-12;
        let pos = d1 > 1e-12 || d2 > 1e-12 || d3 > 1e-12;
        !(neg && pos)
    };
    let mut out = Vec::new();
    'outer: for (i, &p) in pts.iter().enumerate() {
        let others: Vec<[f64; 2]> = pts.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &q)| q).collect();
        for a in 0..others.len() {
            for b in a + 1..others.len() {
                for c in b + 1..others.len() {
                    if in_tri(p, others[a], others[b], others[c]) {
                        continue 'outer;
                    }
                }
                // on segment between two others
                let (x, y) = (others[a], others[b]);
                if cross(x, y, p).abs() < 1e-12
                    && (p[0] - x[0]) * (p[0] - y[0]) <= 1e-12
                    && (p[1] - x[1]) * (p[1] - y[1]) <= 1e-12
                {
                    continue 'outer;
                }
            }
        }
        out.push(p.to_vec());
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

#[test]
fn square_with_center_drops_interior_point() {
    let h = quickhull(&cloud(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0], &[0.0, 1.0], &[0.5, 0.5]])).unwrap();
    assert_eq!(h.vertices.len(), 4);
    assert!((h.volume() - 1.0).abs() < 1e-12);
}

#[test]
fn lshape_hull_is_pentagon() {
    let l = [[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]];
    let rows: Vec<Vec<f64>> = l.iter().map(|p| p.to_vec()).collect();
    let h = quickhull(&PointCloud::from_rows(rows).unwrap()).unwrap();
    assert_eq!(sorted_coords(&h), brute_extreme_2d(&l));
    assert_eq!(h.vertices.len(), 5);
    assert!((h.volume() - 3.5).abs() < 1e-12);
}

#[test]
fn collinear_points_are_degenerate() {
    let r = quickhull(&cloud(&[&[0.0, 0.0], &[1.0, 1.0], &[2.0, 2.0]]));
    assert!(matches!(r, Err(HullError::DegenerateInput(_))));
}

#[test]
fn cube_hull_has_twelve_triangles() {
    let mut rows = Vec::new();
    for i in 0..8u32 {
        rows.push((0..3).map(|k| f64::from((i >> k) & 1)).collect::<Vec<f64>>());
    }
    rows.push(vec![0.5, 0.5, 0.5]);
    let h = quickhull(&PointCloud::from_rows(rows).unwrap()).unwrap();
    assert_eq!(h.vertices.len(), 8);
    assert_eq!(h.boundary.simplices.len(), 12);
    assert!((volume_det(&h.boundary) - 1.0).abs() < 1e-12);
    assert!((volume_projected(&h.boundary) - 1.0).abs() < 1e-12);
}

#[test]
fn cube_facets_triangulate_to_twelve() {
    let doc = r#"{"dim":3,
        "vertices":[[0,0,0],[1,0,0],[1,1,0],[0,1,0],[0,0,1],[1,0,1],[1,1,1],[0,1,1]],
        "facets":[[0,3,2,1],[4,5,6,7],[0,1,5,4],[1,2,6,5],[2,3,7,6],[3,0,4,7]]}"#;
    let cube = Polytope::from_json_str(doc).unwrap();
    assert_eq!(triangulate_boundary(&cube).unwrap().simplices.len(), 12);
    assert!((cube.volume() - 1.0).abs() < 1e-12);
}

#[test]
fn tetrahedron_keeps_four_faces() {
    let h = quickhull(&cloud(&[&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]])).unwrap();
    assert_eq!(h.boundary.simplices.len(), 4);
    assert!((h.volume() - 1.0 / 6.0).abs() < 1e-14);
    assert!(h.boundary.signed_volume() > 0.0);
}

#[test]
fn four_dimensional_hypercube() {
    let rows: Vec<Vec<f64>> = (0..16u32).map(|i| (0..4).map(|k| f64::from((i >> k) & 1)).collect()).collect();
    let h = quickhull(&PointCloud::from_rows(rows).unwrap()).unwrap();
    assert_eq!(h.vertices.len(), 16);
    assert!((volume_det(&h.boundary) - 1.0).abs() < 1e-9);
    assert!((volume_projected(&h.boundary) - 1.0).abs() < 1e-9);
}

#[test]
fn hull_rescaling_does_not_change_combinatorics() {
    let base = [[0.0, 0.0], [3.0, 0.1], [2.0, 2.0], [0.2, 1.5], [1.0, 1.0]];
    for s in [1e-4, 1.0, 1e4] {
        let rows: Vec<Vec<f64>> = base.iter().map(|p| vec![p[0] * s, p[1] * s]).collect();
        let h = quickhull(&PointCloud::from_rows(rows).unwrap()).unwrap();
        assert_eq!(h.vertices.len(), 4);
    }
}

#[test]
fn min_ball_is_tight_via_support() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=4 {
        let rows: Vec<Vec<f64>> = (0..30).map(|_| (0..n).map(|_| rng.random::<f64>()).collect()).collect();
        let c = PointCloud::from_rows(rows).unwrap();
        let b = min_enclosing_ball(&c);
        assert!(c.points.iter().all(|p| b.contains(p, 1e-9)));
        assert!(!b.support.is_empty() && b.support.len() <= n + 1);
        // Support points are all on the sphere; a shrunken concentric ball misses them.
        let shrunk = b.radius * (1.0 - 1e-6);
        assert!(b.support.iter().all(|p| p.dist(&b.center) > shrunk));
    }
}

fn random_cloud(rng: &mut ChaCha8Rng, n: usize, count: usize) -> PointCloud {
    let rows: Vec<Vec<f64>> = (0..count).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    PointCloud::from_rows(rows).unwrap()
}

#[test]
fn volume_formulas_agree_on_random_hulls() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for n in 2..=4 {
        for _ in 0..20 {
            let h = quickhull(&random_cloud(&mut rng, n, 8 + 4 * n)).unwrap();
            let a = volume_det(&h.boundary);
            let b = volume_projected(&h.boundary);
            assert!(((a - b) / a).abs() < 1e-9, "n={n}: {a} vs {b}");
        }
    }
}

fn rotate2(p: &Point, theta: f64) -> Point {
    let (s, c) = theta.sin_cos();
    Point::new(vec![c * p.coords[0] - s * p.coords[1], s * p.coords[0] + c * p.coords[1]])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn idempotent_and_contains_inputs(seed in any::<u64>(), n in 2usize..=3, count in 6usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_cloud(&mut rng, n, count);
        let h = quickhull(&c).unwrap();
        let again = quickhull(&h.vertex_cloud()).unwrap();
        prop_assert_eq!(sorted_coords(&h), sorted_coords(&again));
        let hs = h.halfspaces();
        for p in &c.points {
            prop_assert!(hs.contains(&p.coords));
        }
    }

    #[test]
    fn hull_volume_is_monotone(seed in any::<u64>(), count in 8usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_cloud(&mut rng, 3, count);
        let q = PointCloud::new(p.points[..count - 3].to_vec()).unwrap();
        let vp = quickhull(&p).unwrap().volume();
        let vq = quickhull(&q).unwrap().volume();
        prop_assert!(vp >= vq * (1.0 - 1e-9));
    }

    #[test]
    fn volumes_invariant_under_rigid_motion(seed in any::<u64>(), theta in 0.0..std::f64::consts::TAU, tx in -50.0..50.0f64, ty in -50.0..50.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_cloud(&mut rng, 2, 12);
        let h = quickhull(&c).unwrap();
        let moved = h.map_vertices(|p| rotate2(p, theta)).translated(&[tx, ty]);
        let v0 = h.volume();
        prop_assert!(((moved.volume() - v0) / v0).abs() < 1e-9);
        prop_assert!(((volume_projected(&moved.boundary) - v0) / v0).abs() < 1e-9);
        let rehull = quickhull(&moved.vertex_cloud()).unwrap();
        prop_assert!(((rehull.volume() - v0) / v0).abs() < 1e-9);
    }

    #[test]
    fn ratio_poly_at_least_one(seed in any::<u64>()) {
        // Random star-shaped polygon around the origin.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = 9;
        let rows: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / k as f64;
                let r = rng.random_range(0.3..1.0);
                vec![r * a.cos(), r * a.sin()]
            })
            .collect();
        let facets: Vec<Vec<usize>> = (0..k).map(|i| vec![i, (i + 1) % k]).collect();
        let poly = Polytope::from_facets(2, rows.into_iter().map(Point::new).collect(), facets).unwrap();
        prop_assert!(volume_ratio_poly(&poly).unwrap() >= 1.0 - 1e-9);
    }
}
