//! The pointwise 2×2 operator `P = B B†` built from a pair of solved
//! spinors, whose lowest eigenvalue `p` lower-bounds `|ψ|²` for every unit
//! boundary value at once.

use crate::error::{Error, Result};
use crate::fields::RealField;
use crate::grid::GridChart;
use crate::linalg::Mat2;
use crate::witten::solve::WittenSolution;

/// Field of operators `P(x) = B(x) B(x)†` with `B`'s columns the two
/// solutions, together with the pointwise lowest eigenvalue.
#[derive(Debug)]
pub struct SpinorOperatorField {
    pub chart: GridChart,
    matrices: Vec<Mat2>,
    /// Pointwise lowest eigenvalue of `P`, clamped at zero.
    pub p_min: RealField,
    /// Worst disagreement between `λ_min(BB†)` and `λ_min(B†B)` across the
    /// chart — a free cross-check, since the nonzero spectra coincide.
    pub spectrum_agreement: f64,
}

impl SpinorOperatorField {
    pub fn matrix(&self, idx: usize) -> &Mat2 {
        &self.matrices[idx]
    }
}

const ORTHONORMALITY_TOL: f64 = 1e-12;

/// Combine two solutions with orthonormal boundary values into the
/// operator field `P = B B†`.
pub fn spinor_operator(
    first: &WittenSolution,
    second: &WittenSolution,
) -> Result<SpinorOperatorField> {
    let chart = first.psi.chart;
    if second.psi.chart != chart {
        return Err(Error::FieldFormat(
            "solutions live on different charts".into(),
        ));
    }
    let inner = first.psi0[0].conj() * second.psi0[0] + first.psi0[1].conj() * second.psi0[1];
    let norm1 = (first.psi0[0].norm_sqr() + first.psi0[1].norm_sqr()).sqrt();
    let norm2 = (second.psi0[0].norm_sqr() + second.psi0[1].norm_sqr()).sqrt();
    if inner.norm() > ORTHONORMALITY_TOL
        || (norm1 - 1.0).abs() > ORTHONORMALITY_TOL
        || (norm2 - 1.0).abs() > ORTHONORMALITY_TOL
    {
        return Err(Error::BoundaryValuesNotOrthonormal {
            inner: inner.norm(),
            norm1,
            norm2,
        });
    }
    let mut matrices = Vec::with_capacity(chart.node_count());
    let mut p_min = RealField::zeros(chart, 1);
    let mut agreement = 0.0f64;
    for idx in 0..chart.node_count() {
        let b = Mat2([
            first.psi.data[2 * idx],
            second.psi.data[2 * idx],
            first.psi.data[2 * idx + 1],
            second.psi.data[2 * idx + 1],
        ]);
        let p = b.mul(&b.dagger());
        let q = b.dagger().mul(&b);
        let lo_p = p.hermitian_eigenvalues()[0];
        let lo_q = q.hermitian_eigenvalues()[0];
        agreement = agreement.max((lo_p - lo_q).abs());
        p_min.data[idx] = lo_p.max(0.0);
        matrices.push(p);
    }
    Ok(SpinorOperatorField {
        chart,
        matrices,
        p_min,
        spectrum_agreement: agreement,
    })
}
