//! Spin geometry on a chart: connection coefficients, the Dirac operator
//! in matrix-free and sparse form, and the curvature identities that tie
//! the operator back to the geometry module.

pub mod connection;
pub mod curvature_op;
pub mod dirac;
pub mod lichnerowicz;

pub use connection::{covariant_derivative, spin_connection, SpinCoeffField};
pub use curvature_op::{spin_curvature_trace, SPIN_CURVATURE_RATIO};
pub use dirac::{assemble_dirac, DiracOperator, SparseComplex};
pub use lichnerowicz::{connection_laplacian, lichnerowicz_residual, LichnerowiczReport};
