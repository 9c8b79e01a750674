//! Charts, metric families, frames, curvature, and the ADM flux mass.

pub mod calculus;
pub mod curvature;
pub mod family;
pub mod frame;
pub mod mass;

pub use calculus::{metric_divergence, metric_laplacian};
pub use curvature::{curvature, curvature_norms, CurvatureField, CurvatureNorms};
pub use family::{
    mollifier_bump, sample_metric, MetricFamily, MetricField, RadialConformal,
};
pub use frame::{orthonormal_frame, FrameField, FRAME_DEFECT_TOL};
pub use mass::{
    adm_flux_table, adm_mass, calibrate_normalization, default_flux_radii, FluxTable,
};
