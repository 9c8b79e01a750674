//! Verification of the structural inequalities carried by the level
//! profile: convexity and slope identities of the Dirichlet function, the
//! trace inequality between area, volume, and Dirichlet increments, and
//! the selection of a good level inside a window.

use crate::error::{Error, Result};
use crate::levelsets::profile::LevelProfile;
use crate::levelsets::{TOL_CONVEXITY, TOL_SANDWICH, TOL_SLOPE, TOL_TAU0};

/// Outcome of the monotonicity/convexity verification of the Dirichlet
/// function `F` and the mass function `m` along the level grid.
#[derive(Debug, Clone)]
pub struct Theorem1Report {
    /// Rows that entered the checks (regular and not truncated).
    pub rows_used: usize,
    /// False when fewer than two usable rows exist; no verdict then.
    pub conclusive: bool,
    /// Smallest second difference of `F` over uniform triples.
    pub min_second_difference: f64,
    /// Largest `F` sample, the scale for the convexity tolerance.
    pub max_dirichlet: f64,
    /// Worst relative gap between `ΔF/Δτ` and `m/τ` at pair midpoints.
    pub worst_slope_gap: f64,
    /// Worst violation of the two-sided slope sandwich, relative to the
    /// upper slope `m(τ)/τ` (nonpositive when the sandwich holds).
    pub worst_sandwich_defect: f64,
    /// Worst shortfall of `τ(1 - F/m)` below the asymptotic floor
    /// (nonpositive when the floor bound holds).
    pub worst_floor_defect: f64,
    pub convexity_ok: bool,
    pub slope_ok: bool,
    pub sandwich_ok: bool,
    pub floor_ok: bool,
}

impl Theorem1Report {
    /// All four checks hold on a conclusive sample.
    pub fn pass(&self) -> bool {
        self.conclusive && self.convexity_ok && self.slope_ok && self.sandwich_ok && self.floor_ok
    }
}

/// Check convexity of `F`, the slope identity `F' = m/τ`, the two-sided
/// slope sandwich, and the level floor `τ₀ ≤ τ(1 - F/m)` on a profile.
///
/// `floor` is the asymptotic minimum of the spinor norm the floor bound is
/// tested against. The profile needs `min_rows` samples overall; rows that
/// are singular or truncated carry no usable surface data and are skipped.
pub fn verify_theorem1(profile: &LevelProfile, floor: f64) -> Result<Theorem1Report> {
    const MIN_ROWS: usize = 20;
    if profile.len() < MIN_ROWS {
        return Err(Error::ProfileTooShort { len: profile.len(), min: MIN_ROWS });
    }
    let usable: Vec<usize> = (0..profile.len())
        .filter(|&i| profile.regular[i] && !profile.truncated[i])
        .collect();
    let mut report = Theorem1Report {
        rows_used: usable.len(),
        conclusive: usable.len() >= 2,
        min_second_difference: f64::INFINITY,
        max_dirichlet: usable.iter().map(|&i| profile.dirichlet[i]).fold(0.0, f64::max),
        worst_slope_gap: 0.0,
        worst_sandwich_defect: f64::NEG_INFINITY,
        worst_floor_defect: f64::NEG_INFINITY,
        convexity_ok: true,
        slope_ok: true,
        sandwich_ok: true,
        floor_ok: true,
    };
    if !report.conclusive {
        report.min_second_difference = f64::NAN;
        report.worst_sandwich_defect = f64::NAN;
        report.worst_floor_defect = f64::NAN;
        return Ok(report);
    }

    // convexity via plain second differences over uniformly spaced,
    // consecutive usable triples
    for w in usable.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        if c - b != 1 || b - a != 1 {
            continue;
        }
        let d1 = profile.taus[b] - profile.taus[a];
        let d2 = profile.taus[c] - profile.taus[b];
        if (d1 - d2).abs() > 1e-9 * d1 {
            continue;
        }
        let second =
            profile.dirichlet[c] - 2.0 * profile.dirichlet[b] + profile.dirichlet[a];
        report.min_second_difference = report.min_second_difference.min(second);
    }
    if report.min_second_difference.is_finite() {
        report.convexity_ok =
            report.min_second_difference >= -TOL_CONVEXITY * report.max_dirichlet;
    }

    // slope against the mass function at consecutive midpoints
    for w in usable.windows(2) {
        let (i, j) = (w[0], w[1]);
        if j - i != 1 {
            continue;
        }
        let slope = (profile.dirichlet[j] - profile.dirichlet[i])
            / (profile.taus[j] - profile.taus[i]);
        let mid = 0.5 * (profile.taus[i] + profile.taus[j]);
        let m_mid = profile.interp(&profile.mass, mid);
        if m_mid <= 0.0 {
            continue;
        }
        let gap = (slope - m_mid / mid).abs() / m_mid;
        report.worst_slope_gap = report.worst_slope_gap.max(gap);
    }
    report.slope_ok = report.worst_slope_gap <= TOL_SLOPE;

    // sandwich m(τ')/τ' ≤ (F(τ)-F(τ'))/(τ-τ') ≤ m(τ)/τ at every usable
    // pair, and the floor bound at every usable row
    for (a, &i) in usable.iter().enumerate() {
        for &j in &usable[a + 1..] {
            let slope = (profile.dirichlet[j] - profile.dirichlet[i])
                / (profile.taus[j] - profile.taus[i]);
            let upper = profile.mass[j] / profile.taus[j];
            let lower = profile.mass[i] / profile.taus[i];
            if upper <= 0.0 {
                continue;
            }
            let defect = ((slope - upper).max(lower - slope)) / upper;
            report.worst_sandwich_defect = report.worst_sandwich_defect.max(defect);
        }
        if profile.mass[i] > 0.0 {
            let reach = profile.taus[i] * (1.0 - profile.dirichlet[i] / profile.mass[i]);
            report.worst_floor_defect = report.worst_floor_defect.max(floor - reach);
        }
    }
    report.sandwich_ok = report.worst_sandwich_defect <= TOL_SANDWICH;
    report.floor_ok = report.worst_floor_defect <= TOL_TAU0;
    Ok(report)
}

/// Outcome of the trace inequality `(∫A)² ≤ ΔV · ΔF` on one level window,
/// together with its internal Cauchy-Schwarz step
/// `(∫A)² ≤ (∫f_surf)(∫g)`.
#[derive(Debug, Clone)]
pub struct TraceReport {
    pub lo: f64,
    pub hi: f64,
    pub int_area: f64,
    pub delta_volume: f64,
    pub delta_dirichlet: f64,
    pub int_f_surf: f64,
    pub int_coarea_g: f64,
    pub main_ok: bool,
    pub schwarz_ok: bool,
}

impl TraceReport {
    pub fn pass(&self) -> bool {
        self.main_ok && self.schwarz_ok
    }
}

/// Relative slack granted to the main trace inequality (quadrature error
/// enters both sides differently).
pub const TOL_TRACE: f64 = 0.02;

/// Verify `(∫_lo^hi A dτ)² ≤ (V(hi)-V(lo)) (F(hi)-F(lo))` on a window of
/// the profile, integrating over the regular samples by the trapezoid
/// rule, plus the Cauchy-Schwarz step that proves it.
pub fn verify_trace_inequality(profile: &LevelProfile, lo: f64, hi: f64) -> Result<TraceReport> {
    if !(lo < hi) {
        return Err(Error::BadLevelWindow { lo, hi });
    }
    let rows: Vec<usize> = (0..profile.len())
        .filter(|&i| profile.regular[i] && lo <= profile.taus[i] && profile.taus[i] <= hi)
        .collect();
    if rows.len() < 2 {
        return Err(Error::NoRegularLevel { lo, hi });
    }
    let trapezoid = |col: &[f64]| -> f64 {
        rows.windows(2)
            .map(|w| {
                0.5 * (col[w[0]] + col[w[1]]) * (profile.taus[w[1]] - profile.taus[w[0]])
            })
            .sum()
    };
    let int_area = trapezoid(&profile.area);
    let int_f_surf = trapezoid(&profile.f_surf);
    let int_coarea_g = trapezoid(&profile.coarea_g);
    let delta_volume = profile.interp(&profile.volume, hi) - profile.interp(&profile.volume, lo);
    let delta_dirichlet =
        profile.interp(&profile.dirichlet, hi) - profile.interp(&profile.dirichlet, lo);
    Ok(TraceReport {
        lo,
        hi,
        int_area,
        delta_volume,
        delta_dirichlet,
        int_f_surf,
        int_coarea_g,
        main_ok: int_area * int_area
            <= delta_volume * delta_dirichlet * (1.0 + TOL_TRACE) + f64::EPSILON,
        schwarz_ok: int_area * int_area <= int_f_surf * int_coarea_g * (1.0 + 1e-9),
    })
}

/// A level chosen inside a window, with the area bound it must beat.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSelection {
    pub t: f64,
    pub area: f64,
    /// Mean-value bound `√ΔF √ΔV / (t₁ - t₀)` over the window.
    pub bound: f64,
}

/// Pick the sampled regular level of smallest area inside `[t0, t1]`.
///
/// When the window starts below the asymptotic floor `tau0` the sublevel
/// set at `t0` is empty and the choice degenerates to `t0` with zero area.
pub fn select_level(
    profile: &LevelProfile,
    t0: f64,
    t1: f64,
    tau0: f64,
) -> Result<LevelSelection> {
    if !(t0 < t1) {
        return Err(Error::BadLevelWindow { lo: t0, hi: t1 });
    }
    let delta_f = (profile.interp(&profile.dirichlet, t1)
        - profile.interp(&profile.dirichlet, t0))
    .max(0.0);
    let delta_v =
        (profile.interp(&profile.volume, t1) - profile.interp(&profile.volume, t0)).max(0.0);
    let bound = delta_f.sqrt() * delta_v.sqrt() / (t1 - t0);
    if t0 < tau0 {
        return Ok(LevelSelection { t: t0, area: 0.0, bound });
    }
    let best = (0..profile.len())
        .filter(|&i| profile.regular[i] && t0 <= profile.taus[i] && profile.taus[i] <= t1)
        .min_by(|&a, &b| profile.area[a].total_cmp(&profile.area[b]));
    match best {
        Some(i) => Ok(LevelSelection { t: profile.taus[i], area: profile.area[i], bound }),
        None => Err(Error::NoRegularLevel { lo: t0, hi: t1 }),
    }
}

/// Area bound `2 √(E V(t₁)) / t₁` that needs only the total energy and one
/// volume sample.
pub fn energy_area_bound(profile: &LevelProfile, t1: f64, energy: f64) -> f64 {
    2.0 * (energy * profile.interp(&profile.volume, t1)).max(0.0).sqrt() / t1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::geometry::MetricFamily;
    use crate::grid::GridChart;
    use crate::levelsets::profile::level_profile;
    use crate::linalg::C_ZERO;
    use crate::witten::solve::SpinSetup;
    use num_complex::Complex64 as C64;

    fn cap_profile(half_width: f64, n: usize, taus: &[f64]) -> LevelProfile {
        let family = MetricFamily::SchwCap { mass: 2.0, cap: 1.0 };
        let chart = GridChart::new(half_width, n).unwrap();
        let setup = SpinSetup::new(&family, chart).unwrap();
        let conf = family.conformal_factor().unwrap();
        let mut psi = crate::fields::SpinorField::zeros(chart);
        for (idx, node) in chart.nodes().enumerate() {
            let [x, y, z] = chart.position(node);
            let r = (x * x + y * y + z * z).sqrt();
            psi.set(idx, [C64::new(conf.u(r).powi(-2), 0.0), C_ZERO]);
        }
        level_profile(&setup, &psi, taus).unwrap()
    }

    fn uniform_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
        (0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect()
    }

    #[test]
    fn cap_profile_satisfies_every_dirichlet_check() {
        let taus = uniform_grid(0.35, 0.62, 20);
        let profile = cap_profile(4.0, 49, &taus);
        let report = verify_theorem1(&profile, 0.25).unwrap();
        println!("{report:#?}");
        assert!(report.conclusive, "all 20 rows are regular and inside the chart");
        assert_eq!(report.rows_used, 20);
        assert!(report.convexity_ok, "F must be convex: {report:?}");
        assert!(report.slope_ok, "F' must track m/τ: {report:?}");
        assert!(report.sandwich_ok, "slopes must sit between m/τ at the ends: {report:?}");
        assert!(report.floor_ok, "τ(1 - F/m) must stay above the floor: {report:?}");
        assert!(report.pass());
    }

    #[test]
    fn corrupted_dirichlet_column_breaks_convexity() {
        let taus = uniform_grid(0.35, 0.62, 20);
        let mut profile = cap_profile(4.0, 49, &taus);
        profile.dirichlet[10] += 0.05 * profile.dirichlet.last().unwrap();
        let report = verify_theorem1(&profile, 0.25).unwrap();
        assert!(!report.convexity_ok, "a bump in F must break the second differences");
        assert!(!report.pass());
    }

    #[test]
    fn short_profiles_are_refused() {
        let taus = uniform_grid(0.4, 0.6, 5);
        let profile = cap_profile(3.0, 25, &taus);
        match verify_theorem1(&profile, 0.25) {
            Err(Error::ProfileTooShort { len: 5, min: 20 }) => {}
            other => panic!("expected the short-profile error, got {other:?}"),
        }
    }

    #[test]
    fn trace_inequality_holds_on_every_pair_of_levels() {
        let taus = uniform_grid(0.44, 0.62, 20);
        let profile = cap_profile(4.0, 81, &taus);
        let mut worst: f64 = 0.0;
        for i in 0..taus.len() {
            for j in i + 1..taus.len() {
                let report = verify_trace_inequality(&profile, taus[i], taus[j]).unwrap();
                assert!(report.pass(), "window [{}, {}]: {report:?}", taus[i], taus[j]);
                if report.delta_volume > 0.0 && report.delta_dirichlet > 0.0 {
                    worst = worst.max(
                        report.int_area * report.int_area
                            / (report.delta_volume * report.delta_dirichlet),
                    );
                }
            }
        }
        println!("tightest (∫A)²/(ΔV ΔF) ratio: {worst:.4}");
        assert!(worst <= 1.0 + TOL_TRACE);
    }

    #[test]
    fn schwarz_step_is_exact_up_to_round_off() {
        let taus = uniform_grid(0.44, 0.62, 20);
        let profile = cap_profile(4.0, 81, &taus);
        let report = verify_trace_inequality(&profile, 0.44, 0.62).unwrap();
        assert!(
            report.int_area * report.int_area
                <= report.int_f_surf * report.int_coarea_g * (1.0 + 1e-12),
            "the Cauchy-Schwarz step uses the same triangles on both sides"
        );
    }

    #[test]
    fn degenerate_window_is_rejected() {
        let taus = uniform_grid(0.35, 0.62, 20);
        let profile = cap_profile(4.0, 49, &taus);
        assert!(matches!(
            verify_trace_inequality(&profile, 0.5, 0.5),
            Err(Error::BadLevelWindow { .. })
        ));
        assert!(matches!(
            verify_trace_inequality(&profile, 0.9, 0.95),
            Err(Error::NoRegularLevel { .. })
        ));
    }

    #[test]
    fn selected_level_beats_the_mean_value_bound() {
        let taus = uniform_grid(0.35, 0.62, 20);
        let profile = cap_profile(4.0, 49, &taus);
        let pick = select_level(&profile, 0.45, 0.55, 0.25).unwrap();
        assert!((0.45..=0.55).contains(&pick.t), "selection stays inside the window");
        assert!(pick.area > 0.0);
        assert!(pick.area <= pick.bound, "min area exceeds its mean-value bound: {pick:?}");
        let energy = 8.0 * std::f64::consts::PI;
        let corollary = energy_area_bound(&profile, 0.55, energy);
        assert!(pick.area <= corollary, "energy form of the bound must also hold");
    }

    #[test]
    fn window_below_the_floor_degenerates_to_the_empty_level() {
        let taus = uniform_grid(0.35, 0.62, 20);
        let profile = cap_profile(4.0, 49, &taus);
        let pick = select_level(&profile, 0.1, 0.2, 0.25).unwrap();
        assert_eq!(pick.t, 0.1);
        assert_eq!(pick.area, 0.0);
    }

    #[test]
    fn window_without_regular_levels_is_an_error() {
        let taus = uniform_grid(0.35, 0.62, 20);
        let mut profile = cap_profile(4.0, 49, &taus);
        for flag in profile.regular.iter_mut() {
            *flag = false;
        }
        assert!(matches!(
            select_level(&profile, 0.45, 0.55, 0.25),
            Err(Error::NoRegularLevel { .. })
        ));
        assert!(matches!(
            select_level(&profile, 0.55, 0.45, 0.25),
            Err(Error::BadLevelWindow { .. })
        ));
    }
}
