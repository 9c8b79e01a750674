//! Finite-difference laboratory for harmonic spinors on asymptotically
//! flat 3-manifolds: metric families and curvature, a Dirac solver with
//! prescribed asymptotics, level-set profiles of the spinor norm, and
//! conformal compactification of the asymptotic end.

pub mod diff;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod grid;
pub mod interp;
pub mod linalg;
pub mod levelsets;
pub mod spin;
pub mod witten;
pub mod util;

pub use error::{Error, Result};
