//! Pointwise diagnostics on a solved spinor: the divergence identity, the
//! Kato inequality, and subharmonicity of `|ψ|`.

use crate::diff::gradient_field;
use crate::fields::SpinorField;
use crate::geometry::{metric_divergence, metric_laplacian};
use crate::spin::covariant_derivative;
use crate::util::chunked_sum;
use crate::witten::energy::witten_energy;
use crate::witten::solve::SpinSetup;
use crate::witten::EPS_NORM;

/// L¹ defect of `div⟨ψ, ∇ψ⟩ = |∇ψ|² + (s/4)|ψ|²`.
#[derive(Debug, Clone, Copy)]
pub struct DivergenceReport {
    /// `‖div W − density‖_{L¹}` over nodes at boundary distance ≥ 2.
    pub l1_residual: f64,
    /// Residual divided by the chart energy (or the raw residual when the
    /// energy vanishes).
    pub normalized: f64,
    /// Set when the energy was too small to normalize by.
    pub used_absolute: bool,
}

/// Evaluate the divergence identity on any spinor field.
///
/// For a solved spinor the defect is pure discretization error, `O(h²)`;
/// for a field that is *not* harmonic the identity simply fails, which
/// makes this a sharp negative control.
pub fn divergence_identity_residual(setup: &SpinSetup, psi: &SpinorField) -> DivergenceReport {
    let chart = setup.metric.chart;
    let energy = witten_energy(setup, psi);
    let v = covariant_derivative(&setup.conn, psi);
    // flux vector with raised index: W^i = g^{ij} Re⟨ψ, ∇_j ψ⟩
    let mut upper = vec![0.0f64; 3 * chart.node_count()];
    for idx in 0..chart.node_count() {
        let ginv = setup.metric.at(idx).inverse();
        let mut w_low = [0.0f64; 3];
        for (j, slot) in w_low.iter_mut().enumerate() {
            *slot = (psi.data[2 * idx].conj() * v[6 * idx + 2 * j]
                + psi.data[2 * idx + 1].conj() * v[6 * idx + 2 * j + 1])
                .re;
        }
        let up = ginv.mul_vec(w_low);
        upper[3 * idx..3 * idx + 3].copy_from_slice(&up);
    }
    let div = metric_divergence(&setup.metric, &setup.op.vol, &upper);
    let l1 = chunked_sum(chart.nodes().enumerate().map(|(idx, node)| {
        if chart.boundary_distance(node) < 2 {
            return 0.0;
        }
        (div[idx] - energy.density.data[idx]).abs() * setup.op.vol[idx]
    }));
    let used_absolute = energy.chart_total.abs() < 1e-12;
    DivergenceReport {
        l1_residual: l1,
        normalized: if used_absolute { l1 } else { l1 / energy.chart_total },
        used_absolute,
    }
}

/// Worst violation of the Kato inequality `|d|ψ|| ≤ |∇ψ|`.
#[derive(Debug, Clone, Copy)]
pub struct KatoReport {
    /// `max (|d|ψ|| − |∇ψ|)₊ / sup|∇ψ|` over interior nodes.
    pub max_violation: f64,
    /// `sup |∇ψ|` over interior nodes.
    pub sup_grad: f64,
}

pub fn kato_check(setup: &SpinSetup, psi: &SpinorField) -> KatoReport {
    let chart = setup.metric.chart;
    let phi = psi.norm_field();
    let dphi = gradient_field(&chart, &phi.data);
    let v = covariant_derivative(&setup.conn, psi);
    let mut sup_grad = 0.0f64;
    let mut worst = 0.0f64;
    for (idx, node) in chart.nodes().enumerate() {
        if chart.is_boundary(node) {
            continue;
        }
        let ginv = setup.metric.at(idx).inverse();
        let grad_phi = ginv.quad(dphi[idx]).max(0.0).sqrt();
        let mut grad_psi_sq = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let gij = ginv.get(i, j);
                if gij == 0.0 {
                    continue;
                }
                grad_psi_sq += gij
                    * (v[6 * idx + 2 * i].conj() * v[6 * idx + 2 * j]
                        + v[6 * idx + 2 * i + 1].conj() * v[6 * idx + 2 * j + 1])
                        .re;
            }
        }
        let grad_psi = grad_psi_sq.max(0.0).sqrt();
        sup_grad = sup_grad.max(grad_psi);
        worst = worst.max(grad_phi - grad_psi);
    }
    KatoReport {
        max_violation: if sup_grad > EPS_NORM { worst.max(0.0) / sup_grad } else { 0.0 },
        sup_grad,
    }
}

/// Signed worst case of `Δ|ψ| − (s/4)|ψ| ≥ 0` and the sup bound on `|ψ|`.
#[derive(Debug, Clone, Copy)]
pub struct SubharmonicityReport {
    /// `min (Δφ − (s/4)φ)` over interior nodes with `φ` above the floor;
    /// negative values of size `O(h²)` are discretization noise.
    pub worst_violation: f64,
    /// `sup φ` over the whole chart.
    pub sup_phi: f64,
}

pub fn subharmonicity_check(setup: &SpinSetup, psi: &SpinorField) -> SubharmonicityReport {
    let chart = setup.metric.chart;
    let phi = psi.norm_field();
    let lap = metric_laplacian(&setup.metric, &setup.op.vol, &phi.data);
    let mut worst = f64::INFINITY;
    for (idx, node) in chart.nodes().enumerate() {
        if chart.boundary_distance(node) < 2 || phi.data[idx] <= EPS_NORM {
            continue;
        }
        worst = worst.min(lap[idx] - 0.25 * setup.curv.scalar.data[idx] * phi.data[idx]);
    }
    let sup_phi = phi.data.iter().fold(0.0f64, |m, &v| m.max(v));
    SubharmonicityReport {
        worst_violation: if worst.is_finite() { worst } else { 0.0 },
        sup_phi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MetricFamily;
    use crate::grid::GridChart;
    use crate::linalg::C_ZERO;
    use crate::witten::solve::{solve_witten, SolverConfig, SpinSetup};
    use num_complex::Complex64 as C64;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cap_solution(half_width: f64, n: usize) -> (SpinSetup, SpinorField) {
        let family = MetricFamily::SchwCap { mass: 2.0, cap: 1.0 };
        let chart = GridChart::new(half_width, n).unwrap();
        let setup = SpinSetup::new(&family, chart).unwrap();
        let sol =
            solve_witten(&setup, [C64::new(1.0, 0.0), C_ZERO], &SolverConfig::default()).unwrap();
        (setup, sol.psi)
    }

    #[test]
    fn flat_divergence_residual_is_absolute_and_tiny() {
        let chart = GridChart::new(2.0, 17).unwrap();
        let setup = SpinSetup::new(&MetricFamily::Flat, chart).unwrap();
        let sol =
            solve_witten(&setup, [C64::new(1.0, 0.0), C_ZERO], &SolverConfig::default()).unwrap();
        let report = divergence_identity_residual(&setup, &sol.psi);
        assert!(report.used_absolute, "zero energy must switch the report to absolute mode");
        assert!(report.l1_residual < 1e-13, "constant spinor residual {}", report.l1_residual);
    }

    #[test]
    fn divergence_residual_shrinks_at_second_order() {
        let mut normalized = Vec::new();
        for n in [25, 49] {
            let (setup, psi) = cap_solution(5.0, n);
            let report = divergence_identity_residual(&setup, &psi);
            assert!(!report.used_absolute);
            normalized.push(report.normalized);
        }
        let ratio = normalized[0] / normalized[1];
        assert!(
            (2.6..6.0).contains(&ratio),
            "halving h should shrink the identity defect about fourfold, got {normalized:?}"
        );
    }

    #[test]
    fn random_spinor_fails_the_divergence_identity() {
        let family = MetricFamily::SchwCap { mass: 2.0, cap: 1.0 };
        let chart = GridChart::new(5.0, 25).unwrap();
        let setup = SpinSetup::new(&family, chart).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut junk = SpinorField::zeros(chart);
        for v in junk.data.iter_mut() {
            *v = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let report = divergence_identity_residual(&setup, &junk);
        assert!(
            report.normalized > 0.5,
            "a non-solution must violate the identity at order one, got {}",
            report.normalized
        );
    }

    #[test]
    fn kato_inequality_holds_up_to_discretization() {
        let (setup, psi) = cap_solution(6.0, 33);
        let report = kato_check(&setup, &psi);
        let h = setup.metric.chart.spacing();
        assert!(report.sup_grad > 0.01, "the curved solution has nonzero gradient");
        assert!(
            report.max_violation <= 0.5 * h,
            "norm gradient must stay below the spinor gradient, violation {}",
            report.max_violation
        );
    }

    #[test]
    fn norm_is_subharmonic_up_to_discretization() {
        let (setup, psi) = cap_solution(6.0, 33);
        let report = subharmonicity_check(&setup, &psi);
        let h = setup.metric.chart.spacing();
        assert!(
            report.worst_violation >= -0.02 * h * h,
            "the norm should satisfy the curvature comparison, worst {}",
            report.worst_violation
        );
        assert!(report.sup_phi <= 1.0 + 1e-6, "sup norm bound violated: {}", report.sup_phi);
    }
}
