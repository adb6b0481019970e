//! Exact graded GL(N|M) R-matrices, qKZ operators, supersymmetric transfer
//! matrices and Ω-covectors, with zero-residual identity checks.

pub mod basis;
pub mod chain;
pub mod config;
pub mod correspondence;
pub mod error;
pub mod grading;
pub mod linalg;
pub mod local;
pub mod omega;
pub mod op;
pub mod report;
pub mod rmatrix;
pub mod runner;
pub mod sampling;
pub mod scalar;

pub use basis::{MultiIndex, Space};
pub use chain::ChainConfig;
pub use error::{Error, Result};
pub use grading::Grading;
pub use local::LocalOp;
pub use omega::OmegaKind;
pub use op::{Covector, GradedOp};
pub use report::{CheckReport, Status};
pub use rmatrix::{RFamily, RParams};
pub use scalar::{rat, Backend, Rational, Residual, Scalar};
