//! Information-theoretic and spreading measures of the one-dimensional
//! hydrogenic (half-line Coulomb) eigenstates, with closed forms, an
//! independent quadrature oracle and the numerical kernels behind both.

pub mod asymptotics;
pub mod error;
pub mod measures;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod scan;
pub mod specfun;

pub use error::{Error, Result};
pub use model::QuantumState;
