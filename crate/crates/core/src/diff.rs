//! Second-order finite differences on a grid chart.
//!
//! Interior nodes use centered stencils; chart-boundary nodes fall back to
//! one-sided three-point stencils of the same order, so every derivative
//! here carries an O(h²) truncation error.

use num_complex::Complex64;

use crate::grid::GridChart;

/// Strides (in scalar slots) for moving one node along each axis of a field
/// with `comps` interleaved components.
#[inline]
pub fn strides(n: usize, comps: usize) -> [usize; 3] {
    [n * n * comps, n * comps, comps]
}

/// First derivative along `axis` of the scalar slot at `base + offset`,
/// where `base` indexes node `(i, j, k)` in a field with the given strides.
#[inline]
pub fn d1(
    data: &[f64],
    base: usize,
    node: (usize, usize, usize),
    axis: usize,
    stride: [usize; 3],
    n: usize,
    h: f64,
) -> f64 {
    let pos = [node.0, node.1, node.2][axis];
    let s = stride[axis];
    if pos == 0 {
        (-3.0 * data[base] + 4.0 * data[base + s] - data[base + 2 * s]) / (2.0 * h)
    } else if pos == n - 1 {
        (3.0 * data[base] - 4.0 * data[base - s] + data[base - 2 * s]) / (2.0 * h)
    } else {
        (data[base + s] - data[base - s]) / (2.0 * h)
    }
}

/// Complex analogue of [`d1`] for interleaved complex data.
#[inline]
pub fn d1_c(
    data: &[Complex64],
    base: usize,
    node: (usize, usize, usize),
    axis: usize,
    stride: [usize; 3],
    n: usize,
    h: f64,
) -> Complex64 {
    let pos = [node.0, node.1, node.2][axis];
    let s = stride[axis];
    if pos == 0 {
        (-3.0 * data[base] + 4.0 * data[base + s] - data[base + 2 * s]) / (2.0 * h)
    } else if pos == n - 1 {
        (3.0 * data[base] - 4.0 * data[base - s] + data[base - 2 * s]) / (2.0 * h)
    } else {
        (data[base + s] - data[base - s]) / (2.0 * h)
    }
}

/// Iterate nodes with all three gradient slots of one scalar field filled in.
pub fn gradient_field(chart: &GridChart, data: &[f64]) -> Vec<[f64; 3]> {
    let n = chart.n();
    let h = chart.spacing();
    let stride = strides(n, 1);
    let mut out = vec![[0.0; 3]; chart.node_count()];
    for (idx, node) in chart.nodes().enumerate() {
        for axis in 0..3 {
            out[idx][axis] = d1(data, idx, node, axis, stride, n, h);
        }
    }
    out
}
