//! Anomalous edge identification in attributed graphs.
//!
//! Two detectors are provided:
//!
//! * [`als`]: a smoothness-regularized low-rank plus sparse decomposition of
//!   the perturbed Laplacian, solved by alternating least squares over a
//!   factorization `R = U Vᵀ`. With the smoothness weight set to zero it is the
//!   plain low-rank plus sparse baseline.
//! * [`recovery`]: joint anomaly identification and recovery of the nominal
//!   Laplacian, a constrained convex program coupled to a graphical-lasso
//!   precision estimate and solved by ADMM.
//!
//! Supporting modules cover graph algebra ([`graph`]), the proximal operators
//! and projections shared by the solvers ([`ops`]), synthetic scenario
//! generation ([`datagen`]) and ranking metrics ([`eval`]).
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line and timed trial runners live in the `anomedge` companion crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod als;
pub mod datagen;
mod error;
pub mod eval;
pub mod graph;
pub mod linalg;
pub mod ops;
pub mod recovery;
pub mod rng;

pub use error::{Error, Result};
pub use graph::{EdgeSet, FeatureMatrix, GraphData};

/// Dense column-major matrix used throughout.
pub type Matrix = nalgebra::DMatrix<f64>;
