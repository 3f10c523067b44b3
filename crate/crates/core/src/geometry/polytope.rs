use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::ball::min_enclosing_ball_points;
use super::{
    det_rows, dot, quickhull_points, scale_of, triangulate_facets, volume_det, Point, PointCloud,
    SimplicialBoundary, TAU_GEOM, TAU_VOL,
};
use crate::error::{HullError, Result};

/// Closed bounded polyhedron in R^n: vertices, the facet structure supplied by
/// the user (or produced by a hull), and a closed outward-oriented
/// triangulation of its boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polytope {
    pub dim: usize,
    pub vertices: Vec<Point>,
    pub facets: Vec<Vec<usize>>,
    pub boundary: SimplicialBoundary,
    /// Optional decomposition into convex pieces, each given as the vertex
    /// indices whose hull is the piece.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pieces: Vec<Vec<usize>>,
}

/// On-disk form: `{"dim": n, "vertices": [[..]], "facets": [[..]]}` plus an
/// optional `"pieces"` list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolytopeDoc {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    pub facets: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pieces: Vec<Vec<usize>>,
}

impl Polytope {
    pub fn from_facets(dim: usize, vertices: Vec<Point>, facets: Vec<Vec<usize>>) -> Result<Self> {
        if let Some(p) = vertices.iter().find(|p| p.dim() != dim) {
            return Err(HullError::DimensionMismatch { expected: dim, got: p.dim() });
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(HullError::InvalidInput("non-finite vertex coordinate".into()));
        }
        let boundary = triangulate_facets(dim, &vertices, &facets)?;
        let poly = Self { dim, vertices, facets, boundary, pieces: Vec::new() };
        if poly.volume() <= TAU_VOL * scale_of(&poly.vertices).powi(dim as i32) {
            return Err(HullError::DegenerateInput("polytope has zero volume".into()));
        }
        Ok(poly)
    }

    pub(crate) fn from_parts_unchecked(
        dim: usize,
        vertices: Vec<Point>,
        facets: Vec<Vec<usize>>,
        boundary: SimplicialBoundary,
    ) -> Self {
        Self { dim, vertices, facets, boundary, pieces: Vec::new() }
    }

    pub fn with_pieces(mut self, pieces: Vec<Vec<usize>>) -> Result<Self> {
        if let Some(&bad) = pieces.iter().flatten().find(|&&v| v >= self.vertices.len()) {
            return Err(HullError::InvalidInput(format!("piece index {bad} out of range")));
        }
        self.pieces = pieces;
        Ok(self)
    }

    pub fn from_doc(doc: PolytopeDoc) -> Result<Self> {
        let vertices = doc.vertices.into_iter().map(Point::new).collect();
        Self::from_facets(doc.dim, vertices, doc.facets)?.with_pieces(doc.pieces)
    }

    pub fn to_doc(&self) -> PolytopeDoc {
        PolytopeDoc {
            dim: self.dim,
            vertices: self.vertices.iter().map(|p| p.coords.clone()).collect(),
            facets: self.facets.clone(),
            pieces: self.pieces.clone(),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: PolytopeDoc =
            serde_json::from_str(s).map_err(|e| HullError::InvalidInput(format!("polytope JSON: {e}")))?;
        Self::from_doc(doc)
    }

    pub fn volume(&self) -> f64 {
        volume_det(&self.boundary)
    }

    pub fn vertex_cloud(&self) -> PointCloud {
        PointCloud { dim: self.dim, points: self.vertices.clone(), metric: Default::default() }
    }

    pub fn hull(&self) -> Result<Polytope> {
        quickhull_points(self.dim, &self.vertices)
    }

    /// True when the polytope equals its hull up to the volume tolerance.
    pub fn is_convex(&self) -> Result<bool> {
        Ok(volume_ratio_poly(self)? <= 1.0 + TAU_VOL.max(1e-9))
    }

    /// Applies `f` to every vertex, keeping the combinatorics.
    pub fn map_vertices(&self, f: impl Fn(&Point) -> Point) -> Polytope {
        let vertices: Vec<Point> = self.vertices.iter().map(&f).collect();
        let mut boundary = self.boundary.clone();
        boundary.points = boundary.points.iter().map(&f).collect();
        Polytope { dim: self.dim, vertices, facets: self.facets.clone(), boundary, pieces: self.pieces.clone() }
    }

    pub fn scaled(&self, s: f64) -> Polytope {
        self.map_vertices(|p| p.scaled(s))
    }

    pub fn translated(&self, t: &[f64]) -> Polytope {
        self.map_vertices(|p| Point::new(p.coords.iter().zip(t).map(|(a, b)| a + b).collect()))
    }

    /// Outward halfspaces of the boundary simplices. Describes the polytope
    /// only when it is convex.
    pub fn halfspaces(&self) -> HalfspaceRep {
        HalfspaceRep::from_boundary(&self.boundary)
    }

    /// Closed-set membership for an arbitrary (possibly nonconvex) polytope,
    /// by ray-crossing parity.
    pub fn contains(&self, x: &[f64]) -> bool {
        contains_by_parity(&self.boundary, x, TAU_GEOM * scale_of(&self.vertices))
    }
}

/// Intersection of halfspaces `normal . x <= offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfspaceRep {
    pub normals: Vec<Vec<f64>>,
    pub offsets: Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub scale: f64,
}

impl HalfspaceRep {
    pub fn from_boundary(b: &SimplicialBoundary) -> Self {
        let n = b.dim;
        let used = b.used_vertices();
        let centroid: Vec<f64> = (0..n)
            .map(|k| used.iter().map(|&v| b.points[v].coords[k]).sum::<f64>() / used.len() as f64)
            .collect();
        let mut normals = Vec::new();
        let mut offsets = Vec::new();
        for s in &b.simplices {
            let p0 = &b.points[s.vertices[0]].coords;
            let mut normal: Vec<f64> = if n == 1 {
                vec![1.0]
            } else {
                let edges: Vec<Vec<f64>> = s.vertices[1..]
                    .iter()
                    .map(|&v| b.points[v].coords.iter().zip(p0).map(|(a, c)| a - c).collect())
                    .collect();
                (0..n)
                    .map(|j| {
                        let minor: Vec<Vec<f64>> = edges
                            .iter()
                            .map(|e| e.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect())
                            .collect();
                        let refs: Vec<&[f64]> = minor.iter().map(Vec::as_slice).collect();
                        if j % 2 == 0 { det_rows(&refs) } else { -det_rows(&refs) }
                    })
                    .collect()
            };
            let norm = dot(&normal, &normal).sqrt();
            if norm <= 0.0 {
                continue;
            }
            normal.iter_mut().for_each(|x| *x /= norm);
            let mut offset = dot(&normal, p0);
            if dot(&normal, &centroid) > offset {
                normal.iter_mut().for_each(|x| *x = -*x);
                offset = -offset;
            }
            normals.push(normal);
            offsets.push(offset);
        }
        let (lo, hi) = super::bounding_box(n, used.iter().map(|&v| &b.points[v]));
        let scale = super::dist(&lo, &hi).max(f64::MIN_POSITIVE);
        Self { normals, offsets, lo, hi, scale }
    }

    /// Membership with absolute slack `TAU_GEOM * diameter`.
    #[inline]
    pub fn contains(&self, x: &[f64]) -> bool {
        let tol = TAU_GEOM * self.scale;
        for k in 0..x.len() {
            if x[k] < self.lo[k] - tol || x[k] > self.hi[k] + tol {
                return false;
            }
        }
        self.normals.iter().zip(&self.offsets).all(|(nrm, off)| dot(nrm, x) <= off + tol)
    }
}

/// Fixed direction with no special alignment to lattice axes.
fn ray_direction(n: usize) -> Vec<f64> {
    let golden = 0.618_033_988_749_894_9_f64;
    let mut d: Vec<f64> = (0..n).map(|k| ((k as f64 + 1.0) * golden).fract() + 0.137 * (k as f64 + 1.0).sqrt()).collect();
    let norm = dot(&d, &d).sqrt();
    d.iter_mut().for_each(|x| *x /= norm);
    d
}

fn contains_by_parity(b: &SimplicialBoundary, x: &[f64], tol: f64) -> bool {
    let n = b.dim;
    if n == 1 {
        let mut ends: Vec<(f64, f64)> =
            b.simplices.iter().map(|s| (b.points[s.vertices[0]].coords[0], s.orientation.sign())).collect();
        ends.sort_by(|a, c| a.0.total_cmp(&c.0));
        let mut depth = 0.0;
        let mut prev = f64::NEG_INFINITY;
        for (pos, sign) in ends {
            if depth > 0.0 && x[0] >= prev - tol && x[0] <= pos + tol {
                return true;
            }
            if (x[0] - pos).abs() <= tol {
                return true;
            }
            depth -= sign;
            prev = pos;
        }
        return false;
    }
    let d = ray_direction(n);
    let mut crossings = 0usize;
    for s in &b.simplices {
        let vn = &b.points[s.vertices[n - 1]].coords;
        let m = DMatrix::from_fn(n, n, |r, c| {
            if c < n - 1 {
                b.points[s.vertices[c]].coords[r] - vn[r]
            } else {
                -d[r]
            }
        });
        let rhs = DVector::from_fn(n, |r, _| x[r] - vn[r]);
        let Some(sol) = m.lu().solve(&rhs) else { continue };
        let t = sol[n - 1];
        let mut last = 1.0;
        let mut inside = true;
        for k in 0..n - 1 {
            last -= sol[k];
            if sol[k] < -1e-12 {
                inside = false;
            }
        }
        if last < -1e-12 || !inside {
            continue;
        }
        if t.abs() <= tol {
            return true;
        }
        if t > 0.0 {
            crossings += 1;
        }
    }
    crossings % 2 == 1
}

/// Boundary triangulation recomputed from the polytope's facet structure.
pub fn triangulate_boundary(poly: &Polytope) -> Result<SimplicialBoundary> {
    triangulate_facets(poly.dim, &poly.vertices, &poly.facets)
}

/// Vol(min enclosing ball) / Vol(poly).
pub fn beta_ratio(poly: &Polytope) -> Result<f64> {
    let vol = poly.volume();
    if vol <= 0.0 {
        return Err(HullError::DegenerateInput("polytope has zero volume".into()));
    }
    Ok(min_enclosing_ball_points(&poly.vertices).volume() / vol)
}

/// Vol(hull) / Vol(poly); exactly 1 for convex input up to rounding.
pub fn volume_ratio_poly(poly: &Polytope) -> Result<f64> {
    let vol = poly.volume();
    if vol <= 0.0 {
        return Err(HullError::DegenerateInput("polytope has zero volume".into()));
    }
    Ok(poly.hull()?.volume() / vol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn square() -> Polytope {
        Polytope::from_json_str(r#"{"dim":2,"vertices":[[0,0],[1,0],[1,1],[0,1]],"facets":[[0,1],[1,2],[2,3],[3,0]]}"#)
            .unwrap()
    }

    fn lshape() -> Polytope {
        Polytope::from_json_str(
            r#"{"dim":2,"vertices":[[0,0],[2,0],[2,1],[1,1],[1,2],[0,2]],
                "facets":[[0,1],[1,2],[2,3],[3,4],[4,5],[5,0]]}"#,
        )
        .unwrap()
    }

    #[test]
    fn square_beta_is_half_pi() {
        assert!((beta_ratio(&square()).unwrap() - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn lshape_ratios() {
        let l = lshape();
        assert!((volume_ratio_poly(&l).unwrap() - 3.5 / 3.0).abs() < 1e-12);
        // Enclosing ball: center (1,1), radius sqrt(2).
        assert!((beta_ratio(&l).unwrap() - 2.0 * PI / 3.0).abs() < 1e-12);
        assert!(!l.is_convex().unwrap());
    }

    #[test]
    fn convex_ratio_is_one() {
        assert!((volume_ratio_poly(&square()).unwrap() - 1.0).abs() < 1e-12);
        assert!(square().is_convex().unwrap());
    }

    #[test]
    fn parity_membership_on_lshape() {
        let l = lshape();
        assert!(l.contains(&[0.5, 0.5]));
        assert!(l.contains(&[0.5, 1.5]));
        assert!(l.contains(&[1.5, 0.5]));
        assert!(!l.contains(&[1.5, 1.5]));
        assert!(!l.contains(&[-0.1, 0.5]));
        assert!(l.contains(&[1.0, 1.5]));
        assert!(l.contains(&[0.0, 0.0]));
    }

    #[test]
    fn halfspaces_of_convex_square() {
        let h = square().halfspaces();
        assert!(h.contains(&[0.5, 0.5]));
        assert!(h.contains(&[1.0, 1.0]));
        assert!(!h.contains(&[1.01, 0.5]));
    }

    #[test]
    fn zero_volume_is_degenerate() {
        let r = Polytope::from_json_str(r#"{"dim":2,"vertices":[[0,0],[1,0],[2,0]],"facets":[[0,1],[1,2],[2,0]]}"#);
        assert!(matches!(r, Err(HullError::DegenerateInput(_))));
    }

    #[test]
    fn unit_square_triangulates_into_four_edges() {
        assert_eq!(triangulate_boundary(&square()).unwrap().simplices.len(), 4);
    }
}
