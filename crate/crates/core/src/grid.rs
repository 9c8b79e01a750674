//! Uniform Cartesian chart covering the computational region.

use crate::error::{Error, Result};

/// A cube `[-L, L]^3` sampled on an `N^3` node lattice.
///
/// Node `(i, j, k)` sits at `(-L + i*h, -L + j*h, -L + k*h)` with
/// `h = 2L/(N-1)`, so the faces of the cube are node layers. Fields are
/// stored flat in row-major `(i, j, k)` order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridChart {
    half_width: f64,
    n: usize,
    h: f64,
}

impl GridChart {
    pub const MIN_N: usize = 16;

    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::BadHalfWidth(half_width));
        }
        if n < Self::MIN_N {
            return Err(Error::ChartTooSmall { n, min: Self::MIN_N });
        }
        let h = 2.0 * half_width / (n as f64 - 1.0);
        Ok(Self { half_width, n, h })
    }

    #[inline]
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Lattice spacing `h = 2L/(N-1)`.
    #[inline]
    pub fn spacing(&self) -> f64 {
        self.h
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.n * self.n * self.n
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + self.h * i as f64
    }

    #[inline]
    pub fn position(&self, node: (usize, usize, usize)) -> [f64; 3] {
        [self.coord(node.0), self.coord(node.1), self.coord(node.2)]
    }

    #[inline]
    pub fn index(&self, node: (usize, usize, usize)) -> usize {
        (node.0 * self.n + node.1) * self.n + node.2
    }

    #[inline]
    pub fn node_of(&self, idx: usize) -> (usize, usize, usize) {
        let k = idx % self.n;
        let j = (idx / self.n) % self.n;
        let i = idx / (self.n * self.n);
        (i, j, k)
    }

    #[inline]
    pub fn is_boundary(&self, node: (usize, usize, usize)) -> bool {
        let (i, j, k) = node;
        i == 0 || j == 0 || k == 0 || i == self.n - 1 || j == self.n - 1 || k == self.n - 1
    }

    /// Node distance (in grid steps) to the nearest chart face.
    pub fn boundary_distance(&self, node: (usize, usize, usize)) -> usize {
        let (i, j, k) = node;
        let m = self.n - 1;
        i.min(j).min(k).min(m - i).min(m - j).min(m - k)
    }

    /// Euclidean chart radius of a node.
    #[inline]
    pub fn radius(&self, node: (usize, usize, usize)) -> f64 {
        let [x, y, z] = self.position(node);
        (x * x + y * y + z * z).sqrt()
    }

    /// Visit every node index in storage order.
    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k))))
    }

    /// Largest sphere radius fully contained in the chart (touches faces).
    pub fn inscribed_radius(&self) -> f64 {
        self.half_width
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_coords_span_the_cube() {
        let g = GridChart::new(16.0, 96).unwrap();
        assert!((g.spacing() - 32.0 / 95.0).abs() < 1e-15);
        assert_eq!(g.coord(0), -16.0);
        assert!((g.coord(95) - 16.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_tiny_charts_and_bad_widths() {
        assert!(matches!(GridChart::new(8.0, 8), Err(Error::ChartTooSmall { .. })));
        assert!(matches!(GridChart::new(-1.0, 32), Err(Error::BadHalfWidth(_))));
        assert!(matches!(GridChart::new(0.0, 32), Err(Error::BadHalfWidth(_))));
    }

    #[test]
    fn index_roundtrip() {
        let g = GridChart::new(4.0, 17).unwrap();
        for &(i, j, k) in &[(0, 0, 0), (3, 7, 11), (16, 16, 16)] {
            assert_eq!(g.node_of(g.index((i, j, k))), (i, j, k));
        }
    }

    #[test]
    fn odd_resolution_places_a_node_at_the_origin() {
        let g = GridChart::new(11.0, 93).unwrap();
        let c = (93 - 1) / 2;
        let p = g.position((c, c, c));
        assert!(p.iter().all(|&x| x.abs() < 1e-13));
    }
}
