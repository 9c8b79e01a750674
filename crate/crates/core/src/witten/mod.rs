//! Boundary-value solves for harmonic spinors, their energy, and the
//! pointwise diagnostics (divergence identity, Kato, subharmonicity) that
//! certify a solution.

pub mod asymptotic;
pub mod diagnostics;
pub mod energy;
pub mod operator;
pub mod solve;

pub use asymptotic::{asymptotic_spinor, AsymptoticModel};
pub use diagnostics::{
    divergence_identity_residual, kato_check, subharmonicity_check, DivergenceReport, KatoReport,
    SubharmonicityReport,
};
pub use energy::{default_energy_radii, witten_energy, EnergyReport};
pub use operator::{spinor_operator, SpinorOperatorField};
pub use solve::{solve_witten, SolverConfig, SpinSetup, WittenSolution};

/// Floor below which a spinor norm is treated as zero in normalized
/// diagnostics, guarding divisions where `|ψ|` may vanish.
pub const EPS_NORM: f64 = 1e-10;
