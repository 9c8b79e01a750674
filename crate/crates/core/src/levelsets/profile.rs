//! The level profile: volume, area, Dirichlet, and mass functions of the
//! sublevel sets of `φ = |ψ|`, computed on a shared level grid.

use std::io::{BufRead, Write};

use crate::diff::gradient_field;
use crate::error::{Error, Result};
use crate::fields::SpinorField;
use crate::geometry::metric_laplacian;
use crate::levelsets::mesh::extract_level_surface;
use crate::levelsets::quadrature::{fill_fraction, mask_spread};
use crate::levelsets::EPS_GRAD_FACTOR;
use crate::util::chunked_sum;
use crate::witten::energy::witten_energy;
use crate::witten::solve::SpinSetup;

/// Sublevel/level-set functions sampled on an increasing level grid.
///
/// Per level `τ`: `volume` = vol Ω(τ), `area` = area L(τ) (zero at levels
/// flagged singular), `dirichlet` = ∫_{Ω} |Dφ|², `mass` = the energy
/// integrand accumulated over Ω, and the flux function computed two ways —
/// `f_vol` = ∫_{Ω} Δφ and `f_surf` = ∫_{L} |Dφ| — plus `coarea_g` =
/// ∫_{L} |Dφ|⁻¹.
#[derive(Debug, Clone)]
pub struct LevelProfile {
    pub taus: Vec<f64>,
    pub volume: Vec<f64>,
    pub area: Vec<f64>,
    pub dirichlet: Vec<f64>,
    pub mass: Vec<f64>,
    pub f_vol: Vec<f64>,
    pub f_surf: Vec<f64>,
    pub coarea_g: Vec<f64>,
    pub regular: Vec<bool>,
    /// Levels whose sublevel set reaches the chart edge; their rows mix in
    /// truncation error and are excluded from identities that need the
    /// full set.
    pub truncated: Vec<bool>,
    /// Chart-wide `sup |Dφ|_g`, the reference for the singular threshold.
    pub sup_grad: f64,
}

/// Default level grid: 64 uniform samples strictly inside
/// `(max(τ₀, 0.05), 1)`, endpoints excluded so neither the empty nor the
/// full mask appears.
pub fn default_tau_grid(tau0: f64) -> Vec<f64> {
    let lo = tau0.max(0.05);
    (0..64).map(|k| lo + (1.0 - lo) * (k + 1) as f64 / 65.0).collect()
}

impl LevelProfile {
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    /// Linear interpolation of one profile column at level `t` (clamped to
    /// the sampled range).
    pub fn interp(&self, column: &[f64], t: f64) -> f64 {
        assert_eq!(column.len(), self.taus.len(), "column does not belong to this profile");
        match self.taus.iter().position(|&tau| tau >= t) {
            Some(0) => column[0],
            None => *column.last().expect("profile is never empty"),
            Some(i) => {
                let w = (t - self.taus[i - 1]) / (self.taus[i] - self.taus[i - 1]);
                column[i - 1] * (1.0 - w) + column[i] * w
            }
        }
    }

    /// Largest relative gap between the two flux computations over regular,
    /// non-truncated rows.
    pub fn worst_flux_gap(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.len() {
            if !self.regular[i] || self.truncated[i] || self.f_surf[i] == 0.0 {
                continue;
            }
            worst = worst.max((self.f_vol[i] - self.f_surf[i]).abs() / self.f_surf[i]);
        }
        worst
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "tau,V,A,F,m,f_vol,f_surf,g,regular")?;
        for i in 0..self.len() {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                self.taus[i],
                self.volume[i],
                self.area[i],
                self.dirichlet[i],
                self.mass[i],
                self.f_vol[i],
                self.f_surf[i],
                self.coarea_g[i],
                u8::from(self.regular[i]),
            )?;
        }
        Ok(())
    }

    /// Rebuild a profile from its CSV export. The columns carry everything
    /// the verification checks need; the truncation flags and the gradient
    /// sup are not part of the exchange format and come back empty.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines.next().transpose()?.unwrap_or_default();
        if header.trim() != "tau,V,A,F,m,f_vol,f_surf,g,regular" {
            return Err(Error::FieldFormat(format!("unexpected profile header '{header}'")));
        }
        let mut profile = LevelProfile {
            taus: Vec::new(),
            volume: Vec::new(),
            area: Vec::new(),
            dirichlet: Vec::new(),
            mass: Vec::new(),
            f_vol: Vec::new(),
            f_surf: Vec::new(),
            coarea_g: Vec::new(),
            regular: Vec::new(),
            truncated: Vec::new(),
            sup_grad: f64::NAN,
        };
        for (row, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 9 {
                return Err(Error::FieldFormat(format!(
                    "profile row {} has {} fields, expected 9",
                    row + 2,
                    fields.len()
                )));
            }
            let parse = |s: &str| -> Result<f64> {
                s.parse::<f64>().map_err(|_| {
                    Error::FieldFormat(format!("cannot parse '{s}' in profile row {}", row + 2))
                })
            };
            profile.taus.push(parse(fields[0])?);
            profile.volume.push(parse(fields[1])?);
            profile.area.push(parse(fields[2])?);
            profile.dirichlet.push(parse(fields[3])?);
            profile.mass.push(parse(fields[4])?);
            profile.f_vol.push(parse(fields[5])?);
            profile.f_surf.push(parse(fields[6])?);
            profile.coarea_g.push(parse(fields[7])?);
            profile.regular.push(match fields[8] {
                "1" => true,
                "0" => false,
                other => {
                    return Err(Error::FieldFormat(format!(
                        "regular flag must be 0 or 1, got '{other}'"
                    )))
                }
            });
            profile.truncated.push(false);
        }
        validate_grid(&profile.taus)?;
        Ok(profile)
    }
}

pub(crate) fn validate_grid(taus: &[f64]) -> Result<()> {
    let mut prev = 0.0;
    for &t in taus {
        if !(t > prev && t <= 1.0) {
            return Err(Error::BadLevelGrid(t));
        }
        prev = t;
    }
    Ok(())
}

/// Compute the level profile of `φ = |ψ|` on the given level grid.
pub fn level_profile(setup: &SpinSetup, psi: &SpinorField, taus: &[f64]) -> Result<LevelProfile> {
    validate_grid(taus)?;
    let chart = setup.metric.chart;
    let count = chart.node_count();
    let vol = &setup.op.vol;

    let phi = psi.norm_field();
    let grad = gradient_field(&chart, &phi.data);
    let dphi: Vec<f64> = grad.iter().flatten().copied().collect();
    let spread = mask_spread(&chart, &dphi);
    let density = witten_energy(setup, psi).density;
    let laplacian = metric_laplacian(&setup.metric, vol, &phi.data);

    // metric gradient magnitude per node, and its chart supremum
    let mut grad_sq = vec![0.0f64; count];
    let mut sup_grad = 0.0f64;
    for idx in 0..count {
        let gsq = setup.metric.at(idx).inverse().quad(grad[idx]).max(0.0);
        grad_sq[idx] = gsq;
        sup_grad = sup_grad.max(gsq.sqrt());
    }
    let eps_grad = EPS_GRAD_FACTOR * sup_grad;

    // a sublevel set is truncated once the level exceeds the smallest
    // boundary value the fill fraction can reach
    let boundary_floor = chart
        .nodes()
        .enumerate()
        .filter(|(_, node)| chart.is_boundary(*node))
        .map(|(idx, _)| phi.data[idx] - 0.5 * spread[idx])
        .fold(f64::INFINITY, f64::min);

    let rows = taus.len();
    let mut profile = LevelProfile {
        taus: taus.to_vec(),
        volume: vec![0.0; rows],
        area: vec![0.0; rows],
        dirichlet: vec![0.0; rows],
        mass: vec![0.0; rows],
        f_vol: vec![0.0; rows],
        f_surf: vec![0.0; rows],
        coarea_g: vec![0.0; rows],
        regular: vec![true; rows],
        truncated: vec![false; rows],
        sup_grad,
    };

    for (row, &tau) in taus.iter().enumerate() {
        let masked = |q: &dyn Fn(usize) -> f64| -> f64 {
            chunked_sum((0..count).map(|i| {
                let frac = fill_fraction(phi.data[i], spread[i], tau);
                if frac == 0.0 {
                    0.0
                } else {
                    frac * q(i) * vol[i]
                }
            }))
        };
        profile.volume[row] = masked(&|_| 1.0);
        profile.dirichlet[row] = masked(&|i| grad_sq[i]);
        profile.mass[row] = masked(&|i| density.data[i]);
        profile.f_vol[row] = masked(&|i| laplacian[i]);

        let surface = extract_level_surface(&setup.metric, &phi.data, &dphi, tau);
        let regular = surface.min_grad_norm() >= eps_grad;
        profile.regular[row] = regular;
        profile.f_surf[row] = surface.integrate(|t| surface.grad_norm[t]);
        profile.coarea_g[row] =
            surface.integrate(|t| 1.0 / surface.grad_norm[t].max(eps_grad));
        // the area function extends by zero over singular levels
        profile.area[row] = if regular { surface.total_area() } else { 0.0 };
        profile.truncated[row] = surface.touches_boundary || tau > boundary_floor;
    }
    Ok(profile)
}
