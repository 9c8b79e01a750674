use thiserror::Error;

/// Errors shared by every module of the library.
///
/// Operations that reject their input (rather than producing a garbage
/// result) return one of these variants; callers decide whether rejection
/// is fatal for the run.
#[derive(Debug, Error)]
pub enum Error {
    #[error("chart resolution too small: N = {n} (need N >= {min})")]
    ChartTooSmall { n: usize, min: usize },

    #[error("chart half-width must be positive, got {0}")]
    BadHalfWidth(f64),

    #[error("metric is not positive definite at node {node:?} (pivot {pivot:.3e})")]
    NotPositiveDefinite { node: (usize, usize, usize), pivot: f64 },

    #[error("frame orthonormality defect {defect:.3e} exceeds {tol:.3e}")]
    FrameDefect { defect: f64, tol: f64 },

    #[error("solver did not converge: relative residual {residual:.3e} after {iterations} iterations (tol {tol:.3e})")]
    SolverDiverged { residual: f64, iterations: usize, tol: f64 },

    #[error("boundary spinor must be a unit vector, got |ψ₀| = {norm}")]
    BoundaryValueNotUnit { norm: f64 },

    #[error("boundary spinors must be orthonormal: |⟨ψ₀¹,ψ₀²⟩| = {inner:.3e}, norms {norm1}, {norm2}")]
    BoundaryValuesNotOrthonormal { inner: f64, norm1: f64, norm2: f64 },

    #[error("level window [{lo}, {hi}] is empty or inverted")]
    BadLevelWindow { lo: f64, hi: f64 },

    #[error("level grid must be strictly increasing inside (0, 1]; offending value {0}")]
    BadLevelGrid(f64),

    #[error("level profile has {len} rows, but the check needs at least {min}")]
    ProfileTooShort { len: usize, min: usize },

    #[error("no regular level found in window [{lo}, {hi}]")]
    NoRegularLevel { lo: f64, hi: f64 },

    #[error("covering too sparse: {supplied} points give covering radius {radius:.4} > {required_radius:.4}; need at least {required} points")]
    CoveringTooSparse { supplied: usize, radius: f64, required_radius: f64, required: usize },

    #[error("compactification radii violate rho <= sigma <= R < c*rho: rho={rho}, sigma={sigma}, r_cap={r_cap}, c={c}")]
    BadCompactificationRadii { rho: f64, sigma: f64, r_cap: f64, c: f64 },

    #[error("rescaled scalar curvature dips to {min:.3e} < -{tol:.3e}; widen the transition interval or move sigma toward R")]
    NegativeRescaledCurvature { min: f64, tol: f64 },

    #[error("flux sphere radius {rho} does not fit inside the chart (half-width {half_width})")]
    OutOfChart { rho: f64, half_width: f64 },

    #[error("mass normalization is undefined: Witten energy {energy:.3e} is below tolerance")]
    CalibrationUndefined { energy: f64 },

    #[error("trial field must vanish near the chart boundary, but its support reaches boundary distance {dist}")]
    TrialTouchesBoundary { dist: usize },

    #[error("spectral gap must be positive, got lambda = {lambda}")]
    SpectralGapNotPositive { lambda: f64 },

    #[error("trial spinor is numerically zero (norm {norm:.3e}); the Rayleigh quotient is undefined")]
    TrialSpinorVanishes { norm: f64 },

    #[error("profile grid does not bracket level {tau}: grid spans [{lo}, {hi}]")]
    ProfileMissesLevel { tau: f64, lo: f64, hi: f64 },

    #[error("field file: {0}")]
    FieldFormat(String),

    #[error("field file was written for a different chart: file has N={file_n}, L={file_l}; expected N={want_n}, L={want_l}")]
    ChartMismatch { file_n: usize, file_l: f64, want_n: usize, want_l: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
