use rayon::prelude::*;

use super::{Point, SimplicialBoundary};

/// Default grid resolution per axis.
pub const GRID_PER_AXIS: usize = 200;
/// Upper bound on the number of grid points in one sample.
pub const SAMPLE_CAP: usize = 1_000_000;

/// Points per axis for an n-dimensional grid under the sample cap.
pub fn per_axis(dim: usize) -> usize {
    let cap = ((SAMPLE_CAP as f64).powf(1.0 / dim as f64) + 1e-9).floor() as usize;
    GRID_PER_AXIS.min(cap).max(2)
}

/// Cell-midpoint grid over an axis-aligned box.
#[derive(Debug, Clone, PartialEq)]
pub struct MidGrid {
    pub lo: Vec<f64>,
    pub step: Vec<f64>,
    pub counts: Vec<usize>,
}

impl MidGrid {
    pub fn uniform(lo: &[f64], hi: &[f64], per_axis: usize) -> Self {
        let counts = vec![per_axis; lo.len()];
        let step = lo.iter().zip(hi).map(|(a, b)| ((b - a) / per_axis as f64).max(f64::MIN_POSITIVE)).collect();
        Self { lo: lo.to_vec(), step, counts }
    }

    /// Cubic cells of side `h` covering the box, starting at `lo`.
    pub fn with_spacing(lo: &[f64], hi: &[f64], h: f64) -> Self {
        let counts = lo.iter().zip(hi).map(|(a, b)| (((b - a) / h).ceil() as usize).max(1)).collect();
        Self { lo: lo.to_vec(), step: vec![h; lo.len()], counts }
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.step.iter().product()
    }

    pub fn point(&self, mut idx: usize, out: &mut [f64]) {
        for k in 0..self.lo.len() {
            let i = idx % self.counts[k];
            idx /= self.counts[k];
            out[k] = self.lo[k] + (i as f64 + 0.5) * self.step[k];
        }
    }

    /// Number of cell midpoints satisfying `pred`.
    pub fn count(&self, pred: impl Fn(&[f64]) -> bool + Sync) -> usize {
        let dim = self.lo.len();
        (0..self.len())
            .into_par_iter()
            .map_init(|| vec![0.0; dim], |buf, i| {
                self.point(i, buf);
                usize::from(pred(buf))
            })
            .sum()
    }

    /// Cell midpoints satisfying `pred`, in grid order.
    pub fn select(&self, pred: impl Fn(&[f64]) -> bool + Sync) -> Vec<Point> {
        let dim = self.lo.len();
        (0..self.len())
            .into_par_iter()
            .filter_map(|i| {
                let mut buf = vec![0.0; dim];
                self.point(i, &mut buf);
                pred(&buf).then(|| Point::new(buf))
            })
            .collect()
    }
}

/// Barycentric lattice on a simplex, fine enough that neighbouring samples
/// are at most `spacing` apart.
pub fn simplex_samples(verts: &[&[f64]], spacing: f64) -> Vec<Vec<f64>> {
    let k = verts.len();
    let dim = verts[0].len();
    let mut longest = 0.0f64;
    for i in 0..k {
        for j in i + 1..k {
            longest = longest.max(super::dist(verts[i], verts[j]));
        }
    }
    let m = ((longest / spacing).ceil() as usize).max(1);
    let mut out = Vec::new();
    let mut comp = vec![0usize; k];
    compositions(m, 0, &mut comp, &mut |c| {
        let mut p = vec![0.0; dim];
        for (w, v) in c.iter().zip(verts) {
            let w = *w as f64 / m as f64;
            p.iter_mut().zip(v.iter()).for_each(|(x, y)| *x += w * y);
        }
        out.push(p);
    });
    out
}

/// Calls `f` on every way of writing `total` as an ordered sum of
/// `comp.len()` nonnegative integers.
pub(crate) fn compositions(total: usize, pos: usize, comp: &mut [usize], f: &mut impl FnMut(&[usize])) {
    if pos + 1 == comp.len() {
        comp[pos] = total;
        f(comp);
        return;
    }
    for c in (0..=total).rev() {
        comp[pos] = c;
        compositions(total - c, pos + 1, comp, f);
    }
}

/// Samples every boundary simplex at the given spacing.
pub fn boundary_samples(b: &SimplicialBoundary, spacing: f64) -> Vec<Point> {
    let mut out = Vec::new();
    for s in &b.simplices {
        let verts: Vec<&[f64]> = s.vertices.iter().map(|&v| b.points[v].coords.as_slice()).collect();
        out.extend(simplex_samples(&verts, spacing).into_iter().map(Point::new));
    }
    out
}

/// Interior grid points at spacing `h`, boundary samples at the same spacing
/// and the vertices of a (possibly nonconvex) polytope.
pub fn polytope_samples(poly: &super::Polytope, h: f64) -> Vec<Point> {
    let (lo, hi) = poly.vertex_cloud().bounding_box();
    let grid = MidGrid::with_spacing(&lo, &hi, h);
    let mut out = grid.select(|x| poly.contains(x));
    out.extend(boundary_samples(&poly.boundary, h));
    out.extend(poly.vertices.iter().cloned());
    out
}
