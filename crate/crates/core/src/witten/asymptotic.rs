//! Asymptotic spinor models: the explicit decaying profile that the solved
//! spinor is split against.
//!
//! For a conformally flat family the model is exact: `ψ_asy = u⁻² ψ₀` lies
//! in the kernel of the rescaled operator wherever the metric is `u⁴δ`. For
//! generic metrics the model keeps only the measured leading falloff,
//! `(1 + m/(2r))⁻² ψ₀`, smoothly frozen inside a core radius so it stays
//! regular at the origin.

use crate::fields::SpinorField;
use crate::geometry::family::{MetricFamily, MetricField, RadialConformal};
use crate::geometry::mass::{adm_flux_table, default_flux_radii};
use crate::grid::GridChart;
use crate::linalg::C64;
use crate::Result;

/// Radial weight profile of the asymptotic spinor `ψ_asy = w(r) ψ₀`.
#[derive(Debug, Clone)]
pub enum AsymptoticModel {
    /// Closed-form conformal factor: `w = u⁻²`.
    Conformal(RadialConformal),
    /// Leading falloff from a measured mass: `w = (1 + m/(2 r̃))⁻²` with
    /// `r̃ = (r⁴ + core⁴)^{1/4}`, which agrees with `r` outside the core
    /// and flattens smoothly inside it.
    MeasuredFalloff { mass: f64, core: f64 },
}

impl AsymptoticModel {
    /// Pick the model for a family: the exact conformal factor when one is
    /// known, otherwise the leading falloff with the mass measured from the
    /// extrapolated flux integral (`flux → 16π m`).
    pub fn for_family(family: &MetricFamily, metric: &MetricField) -> Result<Self> {
        match family.conformal_factor() {
            Some(conf) => Ok(AsymptoticModel::Conformal(conf)),
            None => {
                let chart = metric.chart;
                let table = adm_flux_table(metric, &default_flux_radii(chart.half_width()))?;
                let mass = table.extrapolated / (16.0 * std::f64::consts::PI);
                Ok(AsymptoticModel::MeasuredFalloff {
                    mass,
                    core: 0.25 * chart.half_width(),
                })
            }
        }
    }

    /// Radial weight `w(r)` multiplying the constant spinor.
    pub fn weight(&self, r: f64) -> f64 {
        match *self {
            AsymptoticModel::Conformal(ref conf) => conf.u(r).powi(-2),
            AsymptoticModel::MeasuredFalloff { mass, core } => {
                let r_smooth = (r.powi(4) + core.powi(4)).powf(0.25);
                (1.0 + 0.5 * mass / r_smooth).powi(-2)
            }
        }
    }
}

/// Sample `ψ_asy = w(r) ψ₀` on a chart.
pub fn asymptotic_spinor(model: &AsymptoticModel, chart: GridChart, psi0: [C64; 2]) -> SpinorField {
    let mut psi = SpinorField::zeros(chart);
    for (idx, node) in chart.nodes().enumerate() {
        let w = model.weight(chart.radius(node));
        psi.data[2 * idx] = psi0[0] * w;
        psi.data[2 * idx + 1] = psi0[1] * w;
    }
    psi
}
