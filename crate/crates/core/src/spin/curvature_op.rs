//! The curvature operator acting on spinors and its trace invariant.
//!
//! The spinor-bundle curvature is `R^S_{ab} = ¼ R̂_{abcd} σ_c σ_d` with
//! `R̂` the Riemann tensor in an orthonormal frame. Its squared
//! Hilbert–Schmidt size satisfies `Σ_{ab} tr((R^S_{ab})† R^S_{ab}) =
//! |R|² · SPIN_CURVATURE_RATIO` pointwise; the ratio is a pure dimension
//! constant, pinned here both on random algebraic curvature tensors and on
//! sampled metrics.

use crate::geometry::curvature::CurvatureField;
use crate::geometry::frame::FrameField;
use crate::linalg::{C64, Mat2, SIGMA};

/// `Σ_{ab} tr((R^S_{ab})† R^S_{ab}) / |R|²` in three dimensions.
pub const SPIN_CURVATURE_RATIO: f64 = 0.25;

/// Riemann components in the orthonormal frame, `hat[a][b][c][d]`.
fn frame_riemann(curv: &CurvatureField, frame: &FrameField, idx: usize) -> [[[[f64; 3]; 3]; 3]; 3] {
    let e = frame.at(idx);
    let mut hat = [[[[0.0f64; 3]; 3]; 3]; 3];
    for (a, slot_a) in hat.iter_mut().enumerate() {
        for (b, slot_b) in slot_a.iter_mut().enumerate() {
            for (c, slot_c) in slot_b.iter_mut().enumerate() {
                for (d, slot) in slot_c.iter_mut().enumerate() {
                    let mut v = 0.0;
                    for l in 0..3 {
                        for k in 0..3 {
                            for i in 0..3 {
                                for j in 0..3 {
                                    v += e[a][l]
                                        * e[b][k]
                                        * e[c][i]
                                        * e[d][j]
                                        * curv.riem(idx, l, k, i, j);
                                }
                            }
                        }
                    }
                    *slot = v;
                }
            }
        }
    }
    hat
}

/// Trace of the squared curvature operator and the squared Riemann norm at
/// one node: `(Σ_{ab} tr((R^S_{ab})† R^S_{ab}), Σ_{abcd} R̂_{abcd}²)`.
pub fn spin_curvature_trace(curv: &CurvatureField, frame: &FrameField, idx: usize) -> (f64, f64) {
    let hat = frame_riemann(curv, frame, idx);
    spin_curvature_trace_of(&hat)
}

/// Same contraction for an explicitly given frame-component tensor.
pub fn spin_curvature_trace_of(hat: &[[[[f64; 3]; 3]; 3]; 3]) -> (f64, f64) {
    let mut trace = 0.0;
    let mut riem_sq = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            let mut rs = Mat2::ZERO;
            for c in 0..3 {
                for d in 0..3 {
                    let w = hat[a][b][c][d];
                    riem_sq += w * w;
                    if w != 0.0 {
                        rs = rs.add(&SIGMA[c].mul(&SIGMA[d]).scale(C64::new(0.25 * w, 0.0)));
                    }
                }
            }
            trace += rs.dagger().mul(&rs).trace().re;
        }
    }
    (trace, riem_sq)
}
