//! Level-set analysis of the spinor norm: surface extraction, sublevel
//! quadrature, the level profile, and the monotonicity / trace-inequality
//! checks built on top of it.

pub mod checks;
pub mod curvature_report;
pub mod exceptional;
pub mod flow;
pub mod mesh;
pub mod profile;
pub mod quadrature;

pub use checks::{
    energy_area_bound, select_level, verify_theorem1, verify_trace_inequality, LevelSelection,
    Theorem1Report, TraceReport, TOL_TRACE,
};
pub use curvature_report::{curvature_estimate_report, CurvatureReport};
pub use exceptional::{
    covering_radius, exceptional_set, sphere_lattice, ExceptionalSetReport, TOL_P_FLOOR,
};
pub use flow::{flow_derivative_check, FlowReport};
pub use mesh::{extract_level_surface, LevelSurface};
pub use profile::{default_tau_grid, level_profile, LevelProfile};
pub use quadrature::{fill_fraction, mask_spread};

/// A level counts as singular when the gradient somewhere on it drops below
/// this fraction of the chart-wide gradient supremum.
pub const EPS_GRAD_FACTOR: f64 = 1e-6;

/// Convexity tolerance: second differences of the Dirichlet function may
/// dip this fraction of its largest sample below zero.
pub const TOL_CONVEXITY: f64 = 1e-3;

/// Relative tolerance on the slope identity `F' = m/τ`.
pub const TOL_SLOPE: f64 = 0.05;

/// Relative slack on the two-sided slope sandwich.
pub const TOL_SANDWICH: f64 = 0.03;

/// Absolute slack on the level floor bound `τ₀ ≤ τ(1 - F/m)`.
pub const TOL_TAU0: f64 = 0.02;

/// Relative slack on the masked-versus-weighted curvature comparison.
pub const TOL_MASKED: f64 = 0.02;
