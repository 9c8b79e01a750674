//! Scalar calculus against a sampled metric: divergence and
//! Laplace–Beltrami via the volume-weighted flux form.

use crate::diff::{d1, gradient_field, strides};
use crate::geometry::family::MetricField;

/// Divergence of a vector field with raised index,
/// `div X = (1/√g) ∂_i(√g X^i)`, from interleaved components `x,y,z`.
///
/// Derivatives are centered in the interior and one-sided on the chart
/// boundary; callers that need second-order accuracy should restrict to
/// nodes at boundary distance ≥ 2 where the composed stencil is centered.
pub fn metric_divergence(metric: &MetricField, vol: &[f64], upper: &[f64]) -> Vec<f64> {
    let chart = metric.chart;
    let n = chart.n();
    let h = chart.spacing();
    let h3 = h * h * h;
    let mut flux = vec![0.0f64; 3 * chart.node_count()];
    for idx in 0..chart.node_count() {
        let sqrt_g = vol[idx] / h3;
        for axis in 0..3 {
            flux[3 * idx + axis] = sqrt_g * upper[3 * idx + axis];
        }
    }
    let stride = strides(n, 3);
    let mut out = vec![0.0f64; chart.node_count()];
    for (idx, node) in chart.nodes().enumerate() {
        let mut div = 0.0;
        for axis in 0..3 {
            div += d1(&flux, 3 * idx + axis, node, axis, stride, n, h);
        }
        out[idx] = div * h3 / vol[idx];
    }
    out
}

/// Laplace–Beltrami of a scalar, `Δf = div(grad f)` with the gradient
/// raised by the inverse metric.
pub fn metric_laplacian(metric: &MetricField, vol: &[f64], scalar: &[f64]) -> Vec<f64> {
    let chart = metric.chart;
    let grad = gradient_field(&chart, scalar);
    let mut upper = vec![0.0f64; 3 * chart.node_count()];
    for (idx, d) in grad.iter().enumerate() {
        let up = metric.at(idx).inverse().mul_vec(*d);
        upper[3 * idx..3 * idx + 3].copy_from_slice(&up);
    }
    metric_divergence(metric, vol, &upper)
}
