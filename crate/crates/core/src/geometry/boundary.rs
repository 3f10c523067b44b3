use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{bounding_box, det_rows, factorial, Point};
use crate::error::{HullError, Result};

/// Sign attached to an ordered simplex. The vertex order together with this
/// sign fixes the orientation; `Negative` is only needed in dimension 1,
/// where a 0-simplex has no vertex order to carry it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }

    fn flipped(self) -> Self {
        match self {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        }
    }
}

/// An ordered (n-1)-simplex of a boundary in R^n, stored as indices into the
/// owning [`SimplicialBoundary`]'s point list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientedSimplex {
    pub vertices: Vec<usize>,
    pub orientation: Orientation,
}

impl OrientedSimplex {
    pub fn positive(vertices: Vec<usize>) -> Self {
        Self { vertices, orientation: Orientation::Positive }
    }

    fn flip(&mut self) {
        if self.vertices.len() >= 2 {
            self.vertices.swap(0, 1);
        } else {
            self.orientation = self.orientation.flipped();
        }
    }

    /// Oriented ridges: (sorted vertex tuple, sign).
    fn ridges(&self) -> Vec<(Vec<usize>, i8)> {
        let s: i8 = if self.orientation == Orientation::Positive { 1 } else { -1 };
        (0..self.vertices.len())
            .map(|i| {
                let mut r: Vec<usize> = self
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != i)
                    .map(|(_, &v)| v)
                    .collect();
                let parity = sort_parity(&mut r);
                let face_sign = if i % 2 == 0 { 1 } else { -1 };
                (r, s * face_sign * parity)
            })
            .collect()
    }
}

/// Sorts in place and returns the parity (+1/-1) of the sorting permutation.
fn sort_parity(v: &mut [usize]) -> i8 {
    let mut parity = 1i8;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            parity = -parity;
            j -= 1;
        }
    }
    parity
}

/// A closed, consistently outward-oriented triangulated boundary of a body in R^n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplicialBoundary {
    pub dim: usize,
    pub points: Vec<Point>,
    pub simplices: Vec<OrientedSimplex>,
}

impl SimplicialBoundary {
    /// Builds a boundary and checks closedness, without reorienting anything.
    pub fn new(dim: usize, points: Vec<Point>, simplices: Vec<OrientedSimplex>) -> Result<Self> {
        let b = Self { dim, points, simplices };
        b.check_shape()?;
        b.check_closed()?;
        Ok(b)
    }

    fn check_shape(&self) -> Result<()> {
        for p in &self.points {
            if p.dim() != self.dim {
                return Err(HullError::DimensionMismatch { expected: self.dim, got: p.dim() });
            }
        }
        for s in &self.simplices {
            if s.vertices.len() != self.dim {
                return Err(HullError::InvalidInput(format!(
                    "boundary simplex has {} vertices, expected {}",
                    s.vertices.len(),
                    self.dim
                )));
            }
            if let Some(&v) = s.vertices.iter().find(|&&v| v >= self.points.len()) {
                return Err(HullError::InvalidInput(format!("vertex index {v} out of range")));
            }
        }
        Ok(())
    }

    /// Every ridge must be shared by exactly two simplices that induce
    /// opposite orientations on it.
    pub fn check_closed(&self) -> Result<()> {
        if self.dim == 1 {
            let total: f64 = self.simplices.iter().map(|s| s.orientation.sign()).sum();
            if total != 0.0 {
                return Err(HullError::NotClosed("endpoint signs do not cancel".into()));
            }
            return Ok(());
        }
        let mut table: HashMap<Vec<usize>, (u32, i32)> = HashMap::new();
        for s in &self.simplices {
            for (r, sign) in s.ridges() {
                let e = table.entry(r).or_insert((0, 0));
                e.0 += 1;
                e.1 += sign as i32;
            }
        }
        for (r, (count, sum)) in table {
            if count != 2 {
                return Err(HullError::NotClosed(format!(
                    "ridge {r:?} is shared by {count} simplices"
                )));
            }
            if sum != 0 {
                return Err(HullError::NonOrientable(format!(
                    "ridge {r:?} receives the same orientation twice"
                )));
            }
        }
        Ok(())
    }

    /// Propagates orientation across shared ridges, keeping the orientation of
    /// the first simplex in each connected component, then flips everything if
    /// the enclosed volume comes out negative.
    pub fn orient_consistently(&mut self) -> Result<()> {
        if self.dim == 1 {
            return self.check_closed();
        }
        let mut by_ridge: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        for (i, s) in self.simplices.iter().enumerate() {
            for (r, _) in s.ridges() {
                by_ridge.entry(r).or_default().push(i);
            }
        }
        if let Some((r, owners)) = by_ridge.iter().find(|(_, o)| o.len() != 2) {
            return Err(HullError::NotClosed(format!(
                "ridge {r:?} is shared by {} simplices",
                owners.len()
            )));
        }
        let m = self.simplices.len();
        let mut visited = vec![false; m];
        for seed in 0..m {
            if visited[seed] {
                continue;
            }
            visited[seed] = true;
            let mut queue = VecDeque::from([seed]);
            while let Some(cur) = queue.pop_front() {
                for (r, sign) in self.simplices[cur].ridges() {
                    let owners = &by_ridge[&r];
                    let other = if owners[0] == cur { owners[1] } else { owners[0] };
                    let other_sign = self.simplices[other]
                        .ridges()
                        .into_iter()
                        .find(|(rr, _)| *rr == r)
                        .map(|(_, s)| s)
                        .expect("ridge table is symmetric");
                    if visited[other] {
                        if other_sign == sign {
                            return Err(HullError::NonOrientable(format!(
                                "conflicting orientation across ridge {r:?}"
                            )));
                        }
                        continue;
                    }
                    if other_sign == sign {
                        self.simplices[other].flip();
                    }
                    visited[other] = true;
                    queue.push_back(other);
                }
            }
        }
        if self.signed_volume() < 0.0 {
            self.simplices.iter_mut().for_each(OrientedSimplex::flip);
        }
        self.check_closed()
    }

    fn center(&self) -> Vec<f64> {
        let (lo, hi) = bounding_box(self.dim, self.points.iter());
        lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    fn shifted(&self, idx: usize, center: &[f64]) -> Vec<f64> {
        self.points[idx].coords.iter().zip(center).map(|(x, c)| x - c).collect()
    }

    /// Sum of signed cone volumes; positive for outward orientation.
    pub fn signed_volume(&self) -> f64 {
        let n = self.dim;
        let c = self.center();
        let total: f64 = self
            .simplices
            .iter()
            .map(|s| {
                let rows: Vec<Vec<f64>> = s.vertices.iter().map(|&v| self.shifted(v, &c)).collect();
                let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
                s.orientation.sign() * det_rows(&refs)
            })
            .sum();
        total / factorial(n)
    }

    /// Vertex indices actually referenced by a simplex, sorted.
    pub fn used_vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.simplices.iter().flat_map(|s| s.vertices.iter().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Volume as the sum over boundary simplices of det(v_1, ..., v_n) / n!.
///
/// Coordinates are taken relative to the bounding-box center; on a closed
/// boundary the sum is translation invariant, and centering keeps the
/// determinants well scaled.
pub fn volume_det(boundary: &SimplicialBoundary) -> f64 {
    boundary.signed_volume()
}

/// Volume from projections: for each simplex, the mean of the last
/// coordinates times the signed (n-1)-volume of the projection that drops the
/// last coordinate, with overall sign (-1)^(n-1).
pub fn volume_projected(boundary: &SimplicialBoundary) -> f64 {
    let n = boundary.dim;
    let c = boundary.center();
    let sign = if (n - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    let total: f64 = boundary
        .simplices
        .iter()
        .map(|s| {
            let verts: Vec<Vec<f64>> = s.vertices.iter().map(|&v| boundary.shifted(v, &c)).collect();
            let mean_last = verts.iter().map(|v| v[n - 1]).sum::<f64>() / n as f64;
            let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
            rows.push(vec![1.0; n]);
            for k in 0..n - 1 {
                rows.push(verts.iter().map(|v| v[k]).collect());
            }
            let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
            s.orientation.sign() * mean_last * det_rows(&refs)
        })
        .sum();
    sign * total / factorial(n - 1)
}

/// Triangulates user facets into a closed outward-oriented boundary.
///
/// * n = 1: each facet is a single endpoint index; endpoints alternate sign
///   in coordinate order.
/// * n = 2: each facet is an edge `[i, j]`.
/// * n = 3: each facet is a polygon loop, fanned from its lowest-index vertex.
/// * n >= 4: each facet must already be an (n-1)-simplex.
pub fn triangulate_facets(dim: usize, points: &[Point], facets: &[Vec<usize>]) -> Result<SimplicialBoundary> {
    if dim == 0 {
        return Err(HullError::InvalidInput("dimension must be at least 1".into()));
    }
    if let Some(&bad) = facets.iter().flatten().find(|&&v| v >= points.len()) {
        return Err(HullError::InvalidInput(format!("facet index {bad} out of range")));
    }
    let mut simplices = Vec::new();
    match dim {
        1 => {
            let mut ends: Vec<usize> = facets
                .iter()
                .map(|f| match f.as_slice() {
                    [v] => Ok(*v),
                    _ => Err(HullError::InvalidInput("1-dimensional facets are single points".into())),
                })
                .collect::<Result<_>>()?;
            ends.sort_by(|&a, &b| points[a].coords[0].total_cmp(&points[b].coords[0]).then(a.cmp(&b)));
            for (k, v) in ends.into_iter().enumerate() {
                let orientation = if k % 2 == 0 { Orientation::Negative } else { Orientation::Positive };
                simplices.push(OrientedSimplex { vertices: vec![v], orientation });
            }
        }
        2 => {
            for f in facets {
                if f.len() != 2 {
                    return Err(HullError::InvalidInput(format!("2-dimensional facet {f:?} is not an edge")));
                }
                simplices.push(OrientedSimplex::positive(f.clone()));
            }
        }
        3 => {
            for f in facets {
                if f.len() < 3 {
                    return Err(HullError::InvalidInput(format!("polygon facet {f:?} has fewer than 3 vertices")));
                }
                let start = (0..f.len()).min_by_key(|&k| f[k]).unwrap_or(0);
                let loop_: Vec<usize> = (0..f.len()).map(|k| f[(start + k) % f.len()]).collect();
                for k in 1..loop_.len() - 1 {
                    simplices.push(OrientedSimplex::positive(vec![loop_[0], loop_[k], loop_[k + 1]]));
                }
            }
        }
        _ => {
            for f in facets {
                if f.len() != dim {
                    return Err(HullError::Unsupported(format!(
                        "facets in dimension {dim} must be given as {dim}-vertex simplices"
                    )));
                }
                simplices.push(OrientedSimplex::positive(f.clone()));
            }
        }
    }
    let mut b = SimplicialBoundary { dim, points: points.to_vec(), simplices };
    b.check_shape()?;
    b.orient_consistently()?;
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(rows: &[&[f64]]) -> Vec<Point> {
        rows.iter().map(|r| Point::new(r.to_vec())).collect()
    }

    fn lshape() -> (Vec<Point>, Vec<Vec<usize>>) {
        let p = pts(&[&[0.0, 0.0], &[2.0, 0.0], &[2.0, 1.0], &[1.0, 1.0], &[1.0, 2.0], &[0.0, 2.0]]);
        let f = (0..6).map(|i| vec![i, (i + 1) % 6]).collect();
        (p, f)
    }

    /// Shoelace oracle for a simple polygon given in loop order.
    fn shoelace(p: &[Point]) -> f64 {
        let n = p.len();
        0.5 * (0..n)
            .map(|i| {
                let (a, b) = (&p[i].coords, &p[(i + 1) % n].coords);
                a[0] * b[1] - a[1] * b[0]
            })
            .sum::<f64>()
            .abs()
    }

    #[test]
    fn unit_square_volumes() {
        let p = pts(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0], &[0.0, 1.0]]);
        let f: Vec<Vec<usize>> = (0..4).map(|i| vec![i, (i + 1) % 4]).collect();
        let b = triangulate_facets(2, &p, &f).unwrap();
        assert_eq!(b.simplices.len(), 4);
        assert!((volume_det(&b) - 1.0).abs() < 1e-15);
        assert!((volume_projected(&b) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lshape_matches_shoelace() {
        let (p, f) = lshape();
        let oracle = shoelace(&p);
        assert_eq!(oracle, 3.0);
        let b = triangulate_facets(2, &p, &f).unwrap();
        assert!((volume_det(&b) - oracle).abs() < 1e-12);
        assert!((volume_projected(&b) - oracle).abs() < 1e-12);
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let (p, f) = lshape();
        let rev: Vec<Vec<usize>> = f.iter().map(|e| vec![e[1], e[0]]).collect();
        let b = triangulate_facets(2, &p, &rev).unwrap();
        assert!((volume_det(&b) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_orientation_is_repaired() {
        let (p, mut f) = lshape();
        f[2].reverse();
        f[4].reverse();
        let b = triangulate_facets(2, &p, &f).unwrap();
        assert!((volume_det(&b) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn standard_simplex_3d() {
        let p = pts(&[&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let f = vec![vec![0, 2, 1], vec![0, 1, 3], vec![0, 3, 2], vec![1, 2, 3]];
        let b = triangulate_facets(3, &p, &f).unwrap();
        assert!((volume_det(&b) - 1.0 / 6.0).abs() < 1e-15);
        assert!((volume_projected(&b) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn open_boundary_is_rejected() {
        let (p, mut f) = lshape();
        f.pop();
        assert!(matches!(triangulate_facets(2, &p, &f), Err(HullError::NotClosed(_))));
    }

    #[test]
    fn mobius_like_conflict_is_non_orientable() {
        // Triangle with one edge running against the loop.
        let p = pts(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0]]);
        let s = vec![
            OrientedSimplex::positive(vec![0, 1]),
            OrientedSimplex::positive(vec![1, 2]),
            OrientedSimplex::positive(vec![0, 2]),
        ];
        assert!(matches!(SimplicialBoundary::new(2, p, s), Err(HullError::NonOrientable(_))));
    }

    #[test]
    fn one_dimensional_interval() {
        let p = pts(&[&[3.0], &[-1.0]]);
        let b = triangulate_facets(1, &p, &[vec![0], vec![1]]).unwrap();
        assert_eq!(volume_det(&b), 4.0);
        assert_eq!(volume_projected(&b), 4.0);
    }

    #[test]
    fn sort_parity_counts_transpositions() {
        let mut v = vec![2, 0, 1];
        assert_eq!(sort_parity(&mut v), 1);
        assert_eq!(v, vec![0, 1, 2]);
        let mut w = vec![1, 0];
        assert_eq!(sort_parity(&mut w), -1);
    }
}
