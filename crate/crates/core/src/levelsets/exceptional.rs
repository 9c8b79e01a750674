//! The exceptional set: a union of small sublevel sets, one per boundary
//! direction from a quasirandom covering of the unit spinor sphere, whose
//! complement carries a uniform lower bound on the smallest operator
//! eigenvalue.

use num_complex::Complex64 as C64;

use crate::diff::gradient_field;
use crate::error::{Error, Result};
use crate::grid::GridChart;
use crate::levelsets::EPS_GRAD_FACTOR;
use crate::witten::operator::spinor_operator;
use crate::witten::solve::{SpinSetup, WittenSolution};

/// Root of `x⁴ = x + 1`, driving the three-dimensional quasirandom
/// lattice used for the boundary directions.
const RHO3: f64 = 1.220_744_084_605_759_6;

/// Histogram bins used for the per-direction level selection.
const LEVEL_BINS: usize = 32;

/// Absolute slack on the eigenvalue floor.
pub const TOL_P_FLOOR: f64 = 1e-6;

/// Low-discrepancy sequence point `k` in the unit cube `[0,1)³`, with an
/// optional rotation `shift`.
fn cube_point(k: usize, shift: [f64; 3]) -> [f64; 3] {
    let alphas = [1.0 / RHO3, 1.0 / (RHO3 * RHO3), 1.0 / (RHO3 * RHO3 * RHO3)];
    std::array::from_fn(|d| ((k as f64 + 0.5) * alphas[d] + shift[d]).fract())
}

fn unit_spinor(t: [f64; 3]) -> [C64; 2] {
    use std::f64::consts::TAU;
    // area measure on the unit sphere of C²: sin²η uniform, phases uniform
    let eta = t[2].sqrt().asin();
    let (s, c) = (eta.sin(), eta.cos());
    [
        C64::from_polar(c, TAU * t[0]),
        C64::from_polar(s, TAU * t[1]),
    ]
}

/// Quasirandom, equidistributed set of unit boundary spinors.
pub fn sphere_lattice(count: usize) -> Vec<[C64; 2]> {
    (0..count).map(|k| unit_spinor(cube_point(k, [0.0; 3]))).collect()
}

fn chordal(a: &[C64; 2], b: &[C64; 2]) -> f64 {
    ((a[0] - b[0]).norm_sqr() + (a[1] - b[1]).norm_sqr()).sqrt()
}

/// Estimate the covering radius of a spinor lattice by the farthest point
/// of a denser rotated test set.
pub fn covering_radius(lattice: &[[C64; 2]], test_count: usize) -> f64 {
    let mut worst = 0.0f64;
    for k in 0..test_count {
        let probe = unit_spinor(cube_point(k, [0.317, 0.557, 0.871]));
        let nearest =
            lattice.iter().map(|p| chordal(p, &probe)).fold(f64::INFINITY, f64::min);
        worst = worst.max(nearest);
    }
    worst
}

/// Gradients of both complex components of a spinor field, one triple per
/// node, assembled from the real and imaginary parts.
struct SpinorGradient {
    /// Layout: `(node * 3 + axis) * 2 + component`.
    d: Vec<C64>,
}

impl SpinorGradient {
    fn new(chart: &GridChart, data: &[C64]) -> Self {
        let count = chart.node_count();
        let mut parts = Vec::with_capacity(4);
        for comp in 0..2 {
            for pick in [|v: &C64| v.re, |v: &C64| v.im] {
                let scalar: Vec<f64> = (0..count).map(|i| pick(&data[2 * i + comp])).collect();
                parts.push(gradient_field(chart, &scalar));
            }
        }
        let mut d = vec![C64::ZERO; 6 * count];
        for idx in 0..count {
            for axis in 0..3 {
                for comp in 0..2 {
                    d[(idx * 3 + axis) * 2 + comp] = C64::new(
                        parts[2 * comp][idx][axis],
                        parts[2 * comp + 1][idx][axis],
                    );
                }
            }
        }
        Self { d }
    }

    #[inline]
    fn at(&self, idx: usize, axis: usize) -> [C64; 2] {
        let base = (idx * 3 + axis) * 2;
        [self.d[base], self.d[base + 1]]
    }
}

/// Result of the exceptional-set construction.
#[derive(Debug, Clone)]
pub struct ExceptionalSetReport {
    /// Number of boundary directions used.
    pub points: usize,
    /// Measured covering radius of the direction lattice.
    pub covering_radius: f64,
    /// Level chosen for each direction inside the window.
    pub levels: Vec<f64>,
    /// Sum of the estimated boundary areas of the per-direction sets.
    pub boundary_area_sum: f64,
    pub max_single_area: f64,
    /// Smallest operator eigenvalue over the complement nodes.
    pub min_p_on_complement: f64,
    pub complement_nodes: usize,
    /// The bound `t₀²/4 - slack` the complement must satisfy.
    pub p_floor: f64,
    pub pass: bool,
}

/// Build the exceptional set for the pair of independent solutions and
/// verify the eigenvalue floor on its complement.
///
/// Each lattice direction `ζ` induces the solution `ζ₁ψ¹ + ζ₂ψ²` by
/// linearity; its norm gets a level chosen inside `[t0, t1]` by the
/// smallest co-area density, and the exceptional set is the union of the
/// sublevel sets. The lattice must cover the unit spinor sphere with
/// balls of radius `t0/2`, otherwise [`Error::CoveringTooSparse`] reports
/// the required count.
pub fn exceptional_set(
    setup: &SpinSetup,
    first: &WittenSolution,
    second: &WittenSolution,
    t0: f64,
    t1: f64,
    count: usize,
) -> Result<ExceptionalSetReport> {
    if !(0.0 < t0 && t0 < t1 && t1 <= 1.0) {
        return Err(Error::BadLevelWindow { lo: t0, hi: t1 });
    }
    let operator = spinor_operator(first, second)?;
    let chart = operator.chart;
    let nodes = chart.node_count();

    let lattice = sphere_lattice(count);
    let radius = covering_radius(&lattice, (4 * count).max(2000));
    let required_radius = 0.5 * t0;
    if radius > required_radius {
        let required = (count as f64 * (radius / required_radius).powi(3)).ceil() as usize;
        return Err(Error::CoveringTooSparse {
            supplied: count,
            radius,
            required_radius,
            required,
        });
    }

    let grad1 = SpinorGradient::new(&chart, &first.psi.data);
    let grad2 = SpinorGradient::new(&chart, &second.psi.data);
    let vol = &setup.op.vol;
    let bin_width = (t1 - t0) / LEVEL_BINS as f64;

    // sweep one: co-area histogram per direction, then the level of least
    // boundary area in the window
    let mut levels = Vec::with_capacity(count);
    let mut areas = Vec::with_capacity(count);
    for zeta in &lattice {
        let mut hist = [0.0f64; LEVEL_BINS];
        for idx in 0..nodes {
            let psi = combine(&first.psi.data, &second.psi.data, idx, zeta);
            let norm = (psi[0].norm_sqr() + psi[1].norm_sqr()).sqrt();
            if norm < t0 || norm >= t1 {
                continue;
            }
            let mut dphi = [0.0f64; 3];
            if norm > 1e-12 {
                for (axis, slot) in dphi.iter_mut().enumerate() {
                    let d1 = grad1.at(idx, axis);
                    let d2 = grad2.at(idx, axis);
                    let d = [
                        zeta[0] * d1[0] + zeta[1] * d2[0],
                        zeta[0] * d1[1] + zeta[1] * d2[1],
                    ];
                    *slot = (psi[0].conj() * d[0] + psi[1].conj() * d[1]).re / norm;
                }
            }
            let density = setup.metric.at(idx).inverse().quad(dphi).max(0.0).sqrt();
            let bin = (((norm - t0) / bin_width) as usize).min(LEVEL_BINS - 1);
            hist[bin] += density * vol[idx];
        }
        let best = (0..LEVEL_BINS)
            .min_by(|&a, &b| hist[a].total_cmp(&hist[b]))
            .expect("bins are never empty");
        levels.push(t0 + (best as f64 + 0.5) * bin_width);
        areas.push(hist[best] / bin_width);
    }

    // sweep two: intersect the complements of the per-direction sublevel
    // sets, then read the eigenvalue floor there
    let mut outside = vec![true; nodes];
    for (zeta, &level) in lattice.iter().zip(&levels) {
        for (idx, keep) in outside.iter_mut().enumerate() {
            if !*keep {
                continue;
            }
            let psi = combine(&first.psi.data, &second.psi.data, idx, zeta);
            if (psi[0].norm_sqr() + psi[1].norm_sqr()).sqrt() < level {
                *keep = false;
            }
        }
    }
    let mut min_p = f64::INFINITY;
    let mut complement_nodes = 0usize;
    for idx in 0..nodes {
        if outside[idx] {
            complement_nodes += 1;
            min_p = min_p.min(operator.p_min.data[idx]);
        }
    }

    let p_floor = 0.25 * t0 * t0 - TOL_P_FLOOR;
    Ok(ExceptionalSetReport {
        points: count,
        covering_radius: radius,
        boundary_area_sum: areas.iter().sum(),
        max_single_area: areas.iter().copied().fold(0.0, f64::max),
        levels,
        min_p_on_complement: min_p,
        complement_nodes,
        p_floor,
        pass: complement_nodes > 0 && min_p >= p_floor,
    })
}

#[inline]
fn combine(first: &[C64], second: &[C64], idx: usize, zeta: &[C64; 2]) -> [C64; 2] {
    [
        zeta[0] * first[2 * idx] + zeta[1] * second[2 * idx],
        zeta[0] * first[2 * idx + 1] + zeta[1] * second[2 * idx + 1],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MetricFamily;
    use crate::witten::solve::{solve_witten, SolverConfig};
    use crate::linalg::{C_ONE, C_ZERO};

    fn solved_pair(family: &MetricFamily, half_width: f64, n: usize) -> (SpinSetup, WittenSolution, WittenSolution) {
        let chart = GridChart::new(half_width, n).unwrap();
        let setup = SpinSetup::new(family, chart).unwrap();
        let config = SolverConfig::default();
        let first = solve_witten(&setup, [C_ONE, C_ZERO], &config).unwrap();
        let second = solve_witten(&setup, [C_ZERO, C_ONE], &config).unwrap();
        (setup, first, second)
    }

    #[test]
    fn lattice_points_are_unit_spinors_with_small_mean() {
        let lattice = sphere_lattice(800);
        assert_eq!(lattice.len(), 800);
        let mut mean = [0.0f64; 4];
        for z in &lattice {
            let norm = (z[0].norm_sqr() + z[1].norm_sqr()).sqrt();
            assert!((norm - 1.0).abs() < 1e-12, "lattice points live on the unit sphere");
            mean[0] += z[0].re;
            mean[1] += z[0].im;
            mean[2] += z[1].re;
            mean[3] += z[1].im;
        }
        let bias = mean.iter().map(|m| (m / 800.0).abs()).fold(0.0f64, f64::max);
        assert!(bias < 0.05, "an equidistributed set has near-zero mean, got {bias}");
    }

    #[test]
    fn covering_radius_shrinks_with_the_cube_root_of_the_count() {
        let r400 = covering_radius(&sphere_lattice(400), 3000);
        let r3200 = covering_radius(&sphere_lattice(3200), 3000);
        let ratio = r400 / r3200;
        assert!(
            (1.3..3.1).contains(&ratio),
            "three-dimensional covering: eightfold points should roughly halve the radius, got {ratio}"
        );
        assert!(
            covering_radius(&sphere_lattice(3200), 12_800) < 0.25,
            "thirty-two hundred directions cover the sphere at radius 1/4"
        );
    }

    #[test]
    fn complement_of_the_exceptional_set_keeps_the_eigenvalue_floor() {
        let family = MetricFamily::SchwCap { mass: 2.0, cap: 1.0 };
        let (setup, first, second) = solved_pair(&family, 6.0, 33);
        let report = exceptional_set(&setup, &first, &second, 0.5, 0.75, 3200).unwrap();
        println!(
            "covering {:.3}, complement {} nodes, min p {:.4} vs floor {:.4}",
            report.covering_radius,
            report.complement_nodes,
            report.min_p_on_complement,
            report.p_floor
        );
        assert!(report.pass, "{report:?}");
        assert!(report.complement_nodes > 0);
        assert!(report.min_p_on_complement >= report.p_floor);
        for level in &report.levels {
            assert!((0.5..0.75).contains(level), "chosen levels stay inside the window");
        }
        assert!(report.boundary_area_sum <= 3200.0 * report.max_single_area + 1e-9);
        assert!(report.max_single_area > 0.0, "the window cuts through the norm range");
    }

    #[test]
    fn sparse_lattices_are_rejected_with_a_required_count() {
        let (setup, first, second) = solved_pair(&MetricFamily::Flat, 2.0, 17);
        match exceptional_set(&setup, &first, &second, 0.1, 0.3, 100) {
            Err(Error::CoveringTooSparse { supplied: 100, radius, required_radius, required }) => {
                assert!(radius > required_radius);
                assert!((required_radius - 0.05).abs() < 1e-12);
                assert!(required > 1000, "the estimate must scale cubically, got {required}");
            }
            other => panic!("expected the sparse-covering error, got {other:?}"),
        }
    }

    #[test]
    fn flat_solutions_have_a_trivial_exceptional_set() {
        let (setup, first, second) = solved_pair(&MetricFamily::Flat, 2.0, 17);
        let report = exceptional_set(&setup, &first, &second, 0.5, 0.75, 3200).unwrap();
        assert!(report.pass);
        assert_eq!(
            report.complement_nodes,
            setup.metric.chart.node_count(),
            "constant unit solutions never drop below the window"
        );
        assert!(report.min_p_on_complement > 0.9, "flat operator eigenvalues sit at one");
        assert_eq!(report.boundary_area_sum, 0.0, "no level surfaces inside the window");
    }
}
