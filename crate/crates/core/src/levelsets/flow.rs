//! Consistency of the level-set flow: the derivative in the level of a
//! surface integral must match the divergence-form transport term.

use crate::diff::gradient_field;
use crate::error::Result;
use crate::fields::SpinorField;
use crate::geometry::metric_divergence;
use crate::levelsets::mesh::extract_level_surface;
use crate::levelsets::profile::validate_grid;
use crate::levelsets::EPS_GRAD_FACTOR;
use crate::witten::solve::SpinSetup;

/// Agreement between `d/dτ ∫_{L(τ)} h dA` and the transported integrand
/// `∫_{L(τ)} |Dφ|⁻¹ ∇·(h Dφ/|Dφ|) dA` at midpoints of the level grid.
#[derive(Debug, Clone)]
pub struct FlowReport {
    /// Midpoints of the consecutive regular level pairs that were compared.
    pub midpoints: Vec<f64>,
    /// Difference quotient of the surface integral at each midpoint.
    pub lhs: Vec<f64>,
    /// Transport integral averaged over the two levels of each pair.
    pub rhs: Vec<f64>,
    /// Largest relative mismatch between the two columns.
    pub worst_gap: f64,
    /// Levels dropped because their surface is singular.
    pub skipped: usize,
}

/// Compare the level derivative of `∫_{L(τ)} h dA` against its
/// divergence form, for a node scalar `h`, over consecutive pairs of the
/// level grid. Singular levels are dropped from the comparison.
pub fn flow_derivative_check(
    setup: &SpinSetup,
    psi: &SpinorField,
    h: &[f64],
    taus: &[f64],
) -> Result<FlowReport> {
    validate_grid(taus)?;
    let chart = setup.metric.chart;
    let count = chart.node_count();
    assert_eq!(h.len(), count, "the integrand must be sampled on the chart nodes");

    let phi = psi.norm_field();
    let grad = gradient_field(&chart, &phi.data);
    let dphi: Vec<f64> = grad.iter().flatten().copied().collect();

    // metric gradient magnitude and the unit-normal transport field
    let mut grad_norm = vec![0.0f64; count];
    let mut sup_grad = 0.0f64;
    for idx in 0..count {
        let norm = setup.metric.at(idx).inverse().quad(grad[idx]).max(0.0).sqrt();
        grad_norm[idx] = norm;
        sup_grad = sup_grad.max(norm);
    }
    let eps = EPS_GRAD_FACTOR * sup_grad;
    let mut transport = vec![0.0f64; 3 * count];
    for idx in 0..count {
        if grad_norm[idx] < eps {
            continue;
        }
        let upper = setup.metric.at(idx).inverse().mul_vec(grad[idx]);
        for axis in 0..3 {
            transport[3 * idx + axis] = h[idx] * upper[axis] / grad_norm[idx];
        }
    }
    let div = metric_divergence(&setup.metric, &setup.op.vol, &transport);
    let q: Vec<f64> =
        (0..count).map(|idx| div[idx] / grad_norm[idx].max(eps)).collect();

    let mut surface_int = Vec::with_capacity(taus.len());
    let mut transport_int = Vec::with_capacity(taus.len());
    let mut regular = Vec::with_capacity(taus.len());
    let mut skipped = 0usize;
    for &tau in taus {
        let surf = extract_level_surface(&setup.metric, &phi.data, &dphi, tau);
        let ok = surf.min_grad_norm() >= eps;
        if !ok {
            skipped += 1;
        }
        regular.push(ok);
        surface_int.push(surf.integrate_field(&chart, h));
        transport_int.push(surf.integrate_field(&chart, &q));
    }

    let mut report = FlowReport {
        midpoints: Vec::new(),
        lhs: Vec::new(),
        rhs: Vec::new(),
        worst_gap: 0.0,
        skipped,
    };
    for k in 0..taus.len().saturating_sub(1) {
        if !(regular[k] && regular[k + 1]) {
            continue;
        }
        let lhs = (surface_int[k + 1] - surface_int[k]) / (taus[k + 1] - taus[k]);
        let rhs = 0.5 * (transport_int[k] + transport_int[k + 1]);
        report.midpoints.push(0.5 * (taus[k] + taus[k + 1]));
        report.lhs.push(lhs);
        report.rhs.push(rhs);
        let scale = rhs.abs().max(1e-12);
        report.worst_gap = report.worst_gap.max((lhs - rhs).abs() / scale);
    }
    Ok(report)
}
