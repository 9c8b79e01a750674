//! Pointwise orthonormal frames from Cholesky factorization of the metric.

use crate::error::{Error, Result};
use crate::fields::RealField;
use crate::geometry::family::MetricField;
use crate::grid::GridChart;

/// Tolerance on the per-node frame residual `‖eᵀ g e − I‖_max`.
pub const FRAME_DEFECT_TOL: f64 = 1e-12;

/// Orthonormal frame `e_a` and co-frame `e^a` per node.
///
/// Component layout is `a*3 + i` for both: `frame` holds the vector legs
/// `e_a^i` (so `g_ij e_a^i e_b^j = δ_ab`), `coframe` the dual legs `e^a_i`
/// (the inverse matrix, equal to `g_ij e_a^j`).
#[derive(Debug, Clone)]
pub struct FrameField {
    pub chart: GridChart,
    pub frame: RealField,
    pub coframe: RealField,
    /// Worst node residual `‖eᵀ g e − I‖_max` actually measured.
    pub defect: f64,
}

impl FrameField {
    /// Frame legs at a node as `e[a][i]`.
    #[inline]
    pub fn at(&self, idx: usize) -> [[f64; 3]; 3] {
        let s = self.frame.node(idx);
        [[s[0], s[1], s[2]], [s[3], s[4], s[5]], [s[6], s[7], s[8]]]
    }

    /// Co-frame legs at a node as `e[a][i]`.
    #[inline]
    pub fn co_at(&self, idx: usize) -> [[f64; 3]; 3] {
        let s = self.coframe.node(idx);
        [[s[0], s[1], s[2]], [s[3], s[4], s[5]], [s[6], s[7], s[8]]]
    }
}

/// Factor the metric into an orthonormal frame at every node.
///
/// Writes the lower-triangular Cholesky factor `g = L Lᵀ`; the frame is
/// `e_a^i = (L⁻ᵀ)_{ia}` and the co-frame `e^a_i = (Lᵀ)_{ai}`, both
/// triangular. The per-node orthonormality residual is verified against
/// [`FRAME_DEFECT_TOL`].
pub fn orthonormal_frame(metric: &MetricField) -> Result<FrameField> {
    let chart = metric.chart;
    let mut frame = RealField::zeros(chart, 9);
    let mut coframe = RealField::zeros(chart, 9);
    let mut defect = 0.0f64;
    for (idx, node) in chart.nodes().enumerate() {
        let g = metric.at(idx);
        let l = g.cholesky(node)?;
        let (l00, l10, l11, l20, l21, l22) = (l[0], l[1], l[2], l[3], l[4], l[5]);
        // back-substitution columns of L⁻ᵀ: e_a solves Lᵀ e_a = δ_a
        let inv00 = 1.0 / l00;
        let inv11 = 1.0 / l11;
        let inv22 = 1.0 / l22;
        let e = [
            [inv00, 0.0, 0.0],
            [-l10 * inv00 * inv11, inv11, 0.0],
            [(l10 * l21 - l11 * l20) * inv00 * inv11 * inv22, -l21 * inv11 * inv22, inv22],
        ];
        // g e_a = L Lᵀ (L⁻ᵀ δ_a) = L δ_a, so the co-frame legs are the
        // columns of L
        let co = [[l00, l10, l20], [0.0, l11, l21], [0.0, 0.0, l22]];
        let f = frame.node_mut(idx);
        let c = coframe.node_mut(idx);
        for a in 0..3 {
            for i in 0..3 {
                f[a * 3 + i] = e[a][i];
                c[a * 3 + i] = co[a][i];
            }
        }
        // residual eᵀ g e − I in max norm
        for a in 0..3 {
            for b in a..3 {
                let mut dot = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        dot += e[a][i] * g.get(i, j) * e[b][j];
                    }
                }
                let target = if a == b { 1.0 } else { 0.0 };
                defect = defect.max((dot - target).abs());
            }
        }
    }
    if defect > FRAME_DEFECT_TOL {
        return Err(Error::FrameDefect { defect, tol: FRAME_DEFECT_TOL });
    }
    Ok(FrameField { chart, frame, coframe, defect })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::family::{sample_metric, MetricFamily};
    use approx::assert_relative_eq;

    #[test]
    fn flat_frame_is_the_identity() {
        let chart = GridChart::new(2.0, 16).unwrap();
        let metric = sample_metric(&MetricFamily::Flat, chart).unwrap();
        let fr = orthonormal_frame(&metric).unwrap();
        assert_eq!(fr.at(0), [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert_eq!(fr.defect, 0.0);
    }

    #[test]
    fn conformal_frame_scales_inversely() {
        // g = u⁴ δ with u(0) = 2 for SchwCap(2,1): e_a^i = u⁻² δ = δ/4 at the
        // chart center node
        let chart = GridChart::new(4.0, 17).unwrap();
        let metric =
            sample_metric(&MetricFamily::SchwCap { mass: 2.0, cap: 1.0 }, chart).unwrap();
        let fr = orthonormal_frame(&metric).unwrap();
        let center = chart.index((8, 8, 8));
        let e = fr.at(center);
        for a in 0..3 {
            for i in 0..3 {
                let want = if a == i { 0.25 } else { 0.0 };
                assert_relative_eq!(e[a][i], want, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn frame_and_coframe_are_mutually_inverse_on_a_perturbed_metric() {
        let chart = GridChart::new(6.0, 20).unwrap();
        let fam = MetricFamily::Perturbed {
            mass: 2.0,
            cap: 1.0,
            amplitude: 0.05,
            support: (1.0, 4.0),
        };
        let metric = sample_metric(&fam, chart).unwrap();
        let fr = orthonormal_frame(&metric).unwrap();
        assert!(fr.defect <= FRAME_DEFECT_TOL);
        for idx in [0, chart.node_count() / 2, chart.node_count() - 1] {
            let e = fr.at(idx);
            let c = fr.co_at(idx);
            for i in 0..3 {
                for j in 0..3 {
                    let dot: f64 = (0..3).map(|a| e[a][i] * c[a][j]).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert_relative_eq!(dot, want, epsilon = 1e-12);
                }
            }
        }
    }
}
