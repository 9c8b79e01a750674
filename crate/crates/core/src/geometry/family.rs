//! Metric families on the truncated chart.
//!
//! The workhorse family is `SchwCap(m, a)`: the conformally flat metric
//! `g = u⁴ δ` with `u = 1 + (m/2)(r² + a²)^{-1/2}`. It is smooth and
//! one-ended, has ADM mass `m`, non-negative scalar curvature, and admits
//! the closed-form harmonic spinor `u⁻² ψ₀`, which makes it the principal
//! analytic oracle for every downstream check. `SchwExact(m, r_min)` is the
//! exact vacuum end `u = 1 + m/(2r)` with the conformal factor frozen
//! inside `r_min`; `Perturbed` adds a compactly supported anisotropic bump
//! to a `SchwCap` base so that non-conformally-flat code paths get
//! exercised.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::fields::{FieldTag, RealField};
use crate::grid::GridChart;
use crate::linalg::Sym3;

/// Analytic metric family plus parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricFamily {
    /// Euclidean metric, `g = δ`.
    Flat,
    /// `u = 1 + (mass/2)(r² + cap²)^{-1/2}`, `g = u⁴ δ`.
    SchwCap { mass: f64, cap: f64 },
    /// `u = 1 + mass/(2 max(r, r_min))`, `g = u⁴ δ`.
    SchwExact { mass: f64, r_min: f64 },
    /// `SchwCap(mass, cap)` plus `amplitude`-scaled anisotropic bump
    /// supported in the radial shell `(support.0, support.1)`.
    Perturbed { mass: f64, cap: f64, amplitude: f64, support: (f64, f64) },
    /// Samples loaded from a metric field file.
    FromFile(PathBuf),
}

impl MetricFamily {
    /// Short machine-readable tag recorded in field files and reports.
    pub fn tag(&self) -> String {
        match self {
            MetricFamily::Flat => "flat".into(),
            MetricFamily::SchwCap { mass, cap } => format!("schwcap(mass={mass},cap={cap})"),
            MetricFamily::SchwExact { mass, r_min } => {
                format!("schwexact(mass={mass},r_min={r_min})")
            }
            MetricFamily::Perturbed { mass, cap, amplitude, support } => format!(
                "perturbed(mass={mass},cap={cap},amplitude={amplitude},support={}..{})",
                support.0, support.1
            ),
            MetricFamily::FromFile(p) => format!("file({})", p.display()),
        }
    }

    /// Whether the family is conformally flat with a known radial factor,
    /// possibly away from a compactly supported perturbation.
    pub fn conformal_factor(&self) -> Option<RadialConformal> {
        match *self {
            MetricFamily::Flat => Some(RadialConformal::Flat),
            MetricFamily::SchwCap { mass, cap } | MetricFamily::Perturbed { mass, cap, .. } => {
                Some(RadialConformal::Cap { mass, cap })
            }
            MetricFamily::SchwExact { mass, r_min } => {
                Some(RadialConformal::Exact { mass, r_min })
            }
            MetricFamily::FromFile(_) => None,
        }
    }
}

/// Closed-form radial conformal factor `u(r)` with derivatives, for the
/// conformally flat families. All the radial oracles derive from this.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialConformal {
    Flat,
    Cap { mass: f64, cap: f64 },
    Exact { mass: f64, r_min: f64 },
}

impl RadialConformal {
    /// `u(r)`.
    pub fn u(&self, r: f64) -> f64 {
        match *self {
            RadialConformal::Flat => 1.0,
            RadialConformal::Cap { mass, cap } => 1.0 + 0.5 * mass / (r * r + cap * cap).sqrt(),
            RadialConformal::Exact { mass, r_min } => 1.0 + 0.5 * mass / r.max(r_min),
        }
    }

    /// `du/dr`.
    pub fn du(&self, r: f64) -> f64 {
        match *self {
            RadialConformal::Flat => 0.0,
            RadialConformal::Cap { mass, cap } => {
                -0.5 * mass * r * (r * r + cap * cap).powf(-1.5)
            }
            RadialConformal::Exact { mass, r_min } => {
                if r > r_min {
                    -0.5 * mass / (r * r)
                } else {
                    0.0
                }
            }
        }
    }

    /// Second radial derivative `d²u/dr²`.
    pub fn d2u(&self, r: f64) -> f64 {
        match *self {
            RadialConformal::Flat => 0.0,
            RadialConformal::Cap { mass, cap } => {
                0.5 * mass * (2.0 * r * r - cap * cap) * (r * r + cap * cap).powf(-2.5)
            }
            RadialConformal::Exact { mass, r_min } => {
                if r > r_min {
                    mass / (r * r * r)
                } else {
                    0.0
                }
            }
        }
    }

    /// Radial Laplacian `Δu = u'' + 2u'/r`. Zero for the harmonic families.
    pub fn laplacian(&self, r: f64) -> f64 {
        match *self {
            RadialConformal::Flat => 0.0,
            RadialConformal::Cap { mass, cap } => {
                -1.5 * mass * cap * cap * (r * r + cap * cap).powf(-2.5)
            }
            RadialConformal::Exact { .. } => 0.0,
        }
    }

    /// Scalar curvature of `g = u⁴ δ`: `s = -8 u⁻⁵ Δu`.
    pub fn scalar_curvature(&self, r: f64) -> f64 {
        -8.0 * self.u(r).powi(-5) * self.laplacian(r)
    }

    /// Norm of the exact harmonic spinor, `φ(r) = u(r)⁻²`.
    pub fn phi(&self, r: f64) -> f64 {
        self.u(r).powi(-2)
    }

    /// Metric norm of the gradient of `φ`: `|Dφ|_g = 2|u'| u⁻⁵`.
    pub fn grad_phi_norm(&self, r: f64) -> f64 {
        2.0 * self.du(r).abs() * self.u(r).powi(-5)
    }
}

/// Sampled metric: symmetric `g_ij` per node plus its family tag.
#[derive(Debug, Clone)]
pub struct MetricField {
    pub chart: GridChart,
    pub family: MetricFamily,
    /// 6 components per node, `[xx, xy, xz, yy, yz, zz]`.
    pub g: RealField,
}

impl MetricField {
    #[inline]
    pub fn at(&self, idx: usize) -> Sym3 {
        let s = self.g.node(idx);
        Sym3([s[0], s[1], s[2], s[3], s[4], s[5]])
    }

    pub fn field_tag(&self) -> FieldTag {
        FieldTag::new("metric", &self.family.tag())
    }

    /// Volume weight `√det g · h³` per node, the shared quadrature weight
    /// for all chart integrals.
    pub fn volume_weights(&self) -> Vec<f64> {
        let cell = self.chart.spacing().powi(3);
        (0..self.chart.node_count())
            .map(|idx| self.at(idx).det().max(0.0).sqrt() * cell)
            .collect()
    }
}

/// Smooth compactly supported radial bump on `(lo, hi)`: the classic
/// `exp(1 - 1/(1 - t²))` profile, equal to 1 at the shell midpoint with all
/// derivatives vanishing at the edges.
pub fn mollifier_bump(r: f64, lo: f64, hi: f64) -> f64 {
    let t = (2.0 * r - lo - hi) / (hi - lo);
    if t.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }
}

/// Anisotropic symmetric perturbation direction: a fixed smooth traceless
/// tensor, bounded by 1 in max-norm.
fn perturbation_direction(x: f64, y: f64, z: f64) -> [f64; 6] {
    let (sx, sy, sz) = (x.sin(), y.sin(), z.sin());
    let (cx, cy, cz) = (x.cos(), y.cos(), z.cos());
    // [xx, xy, xz, yy, yz, zz], traceless so the perturbation is not a
    // disguised conformal rescaling
    [cy * cz, sx * sy / 2.0, sz * cx / 2.0, -cy * cz / 2.0, sy * cz / 2.0, -cy * cz / 2.0]
}

/// Sample a metric family on a chart.
///
/// Fails if any node sample is not positive definite (possible for large
/// perturbation amplitudes), naming the first offending node.
pub fn sample_metric(family: &MetricFamily, chart: GridChart) -> Result<MetricField> {
    let mut g = RealField::zeros(chart, 6);
    match family {
        MetricFamily::FromFile(path) => {
            let (field, tag) = RealField::read(path)?;
            if field.components != 6 || tag.kind != "metric" {
                return Err(Error::FieldFormat(format!(
                    "expected a 6-component metric file, found kind '{}' with {} components",
                    tag.kind, field.components
                )));
            }
            if field.chart != chart {
                return Err(Error::ChartMismatch {
                    file_n: field.chart.n(),
                    file_l: field.chart.half_width(),
                    want_n: chart.n(),
                    want_l: chart.half_width(),
                });
            }
            g = field;
        }
        MetricFamily::Flat
        | MetricFamily::SchwCap { .. }
        | MetricFamily::SchwExact { .. }
        | MetricFamily::Perturbed { .. } => {
            if let MetricFamily::SchwCap { mass, cap } = *family {
                if mass < 0.0 || cap <= 0.0 {
                    return Err(Error::FieldFormat(format!(
                        "schwcap needs mass >= 0 and cap > 0, got mass={mass}, cap={cap}"
                    )));
                }
            }
            if let MetricFamily::SchwExact { mass, r_min } = *family {
                if mass < 0.0 || r_min <= 0.0 {
                    return Err(Error::FieldFormat(format!(
                        "schwexact needs mass >= 0 and r_min > 0, got mass={mass}, r_min={r_min}"
                    )));
                }
            }
            let conf = family.conformal_factor().expect("analytic families are conformal");
            for (idx, node) in chart.nodes().enumerate() {
                let [x, y, z] = chart.position(node);
                let r = (x * x + y * y + z * z).sqrt();
                let u4 = conf.u(r).powi(4);
                let row = g.node_mut(idx);
                row[0] = u4;
                row[3] = u4;
                row[5] = u4;
                if let MetricFamily::Perturbed { amplitude, support, .. } = *family {
                    let bump = amplitude * mollifier_bump(r, support.0, support.1);
                    if bump != 0.0 {
                        let dir = perturbation_direction(x, y, z);
                        for (slot, d) in row.iter_mut().zip(dir) {
                            *slot += bump * d;
                        }
                    }
                }
            }
        }
    }
    let field = MetricField { chart, family: family.clone(), g };
    for (idx, node) in chart.nodes().enumerate() {
        field.at(idx).cholesky(node)?;
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn flat_family_is_the_identity_metric() {
        let chart = GridChart::new(2.0, 16).unwrap();
        let m = sample_metric(&MetricFamily::Flat, chart).unwrap();
        for idx in 0..chart.node_count() {
            assert_eq!(m.g.node(idx), &[1.0, 0.0, 0.0, 1.0, 0.0, 1.0]);
        }
    }

    #[test]
    fn schwexact_at_unit_radius_is_sixteen_delta() {
        // u = 1 + 2/(2·1) = 2, g = u⁴ δ = 16 δ
        let conf = RadialConformal::Exact { mass: 2.0, r_min: 0.5 };
        assert_relative_eq!(conf.u(1.0).powi(4), 16.0, max_relative = 1e-14);
    }

    #[test]
    fn second_derivative_matches_laplacian_identity() {
        let families = [
            RadialConformal::Flat,
            RadialConformal::Cap { mass: 2.0, cap: 1.0 },
            RadialConformal::Cap { mass: 1.0, cap: 0.5 },
            RadialConformal::Exact { mass: 2.0, r_min: 0.8 },
        ];
        for conf in families {
            for k in 1..40 {
                let r = 0.9 + 0.25 * k as f64;
                let lhs = conf.laplacian(r);
                let rhs = conf.d2u(r) + 2.0 * conf.du(r) / r;
                assert_relative_eq!(
                    lhs,
                    rhs,
                    max_relative = 1e-12,
                    epsilon = 1e-15
                );
            }
        }
    }

    #[test]
    fn schwcap_center_values_match_closed_forms() {
        // u(0) = 1 + m/(2a) = 2, g(0) = 16 δ, s(0) = 12·m·a²·u⁻⁵·a⁻⁵ = 0.75
        let conf = RadialConformal::Cap { mass: 2.0, cap: 1.0 };
        assert_relative_eq!(conf.u(0.0), 2.0, max_relative = 1e-14);
        assert_relative_eq!(conf.u(0.0).powi(4), 16.0, max_relative = 1e-14);
        assert_relative_eq!(conf.scalar_curvature(0.0), 0.75, max_relative = 1e-14);
        assert_relative_eq!(conf.phi(0.0), 0.25, max_relative = 1e-14);
    }

    #[test]
    fn schwcap_scalar_curvature_is_nonnegative_and_decaying() {
        let conf = RadialConformal::Cap { mass: 2.0, cap: 1.0 };
        let mut prev = f64::INFINITY;
        for k in 0..200 {
            let r = 0.1 * k as f64;
            let s = conf.scalar_curvature(r);
            assert!(s >= 0.0, "s({r}) = {s} negative");
            assert!(s <= prev, "s not decaying at r = {r}");
            prev = s;
        }
    }

    #[test]
    fn schwexact_factor_is_harmonic_outside_the_clamp() {
        let conf = RadialConformal::Exact { mass: 2.0, r_min: 1.0 };
        assert_eq!(conf.laplacian(3.0), 0.0);
        assert_eq!(conf.scalar_curvature(2.0), 0.0);
        assert_eq!(conf.du(0.5), 0.0, "factor frozen inside the clamp");
    }

    #[test]
    fn perturbed_metric_stays_spd_at_moderate_amplitude() {
        let chart = GridChart::new(6.0, 24).unwrap();
        let fam = MetricFamily::Perturbed {
            mass: 2.0,
            cap: 1.0,
            amplitude: 0.05,
            support: (1.0, 4.0),
        };
        let m = sample_metric(&fam, chart).unwrap();
        // the bump actually changed something off-diagonal
        let mut off = 0.0f64;
        for idx in 0..chart.node_count() {
            let row = m.g.node(idx);
            off = off.max(row[1].abs()).max(row[2].abs()).max(row[4].abs());
        }
        assert!(off > 1e-4, "perturbation did not register, max off-diagonal {off}");
    }

    #[test]
    fn wildly_perturbed_metric_is_rejected_as_non_spd() {
        let chart = GridChart::new(6.0, 24).unwrap();
        let fam = MetricFamily::Perturbed {
            mass: 0.0,
            cap: 1.0,
            amplitude: 40.0,
            support: (1.0, 4.0),
        };
        match sample_metric(&fam, chart) {
            Err(Error::NotPositiveDefinite { .. }) => {}
            other => panic!("expected non-SPD rejection, got {other:?}"),
        }
    }

    #[test]
    fn mollifier_bump_is_compactly_supported_and_peaks_at_one() {
        assert_eq!(mollifier_bump(0.99, 1.0, 4.0), 0.0);
        assert_eq!(mollifier_bump(4.0, 1.0, 4.0), 0.0);
        assert_relative_eq!(mollifier_bump(2.5, 1.0, 4.0), 1.0, max_relative = 1e-14);
        assert!(mollifier_bump(2.0, 1.0, 4.0) > 0.0);
    }
}
