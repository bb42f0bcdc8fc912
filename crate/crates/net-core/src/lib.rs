//! Kernelized unsupervised domain adaptation: joint-distribution alignment
//! plus a similarity-preserving embedding, solved as one generalized
//! eigenvalue problem, with kernel-mean-matching validation for picking
//! hyperparameters from source data alone.
//!
//! The numerics are generic over the scalar type (`f32` or `f64`) through
//! [`Scalar`]; `f64` aliases live at the crate root.

pub mod data;
pub mod eigsolve;
pub mod error;
pub mod graph;
pub mod kernel;
pub mod kmm;
pub mod mmd;
pub mod modelsel;
pub mod net;
pub mod scalar;

pub use error::{Error, ErrorKind, Result};
pub use scalar::Scalar;

/// Dense column-major matrix over the crate's scalar types.
pub type Matrix<T> = nalgebra::DMatrix<T>;
/// Dense column vector.
pub type Vector<T> = nalgebra::DVector<T>;
/// Class labels, 1-based.
pub type Labels = Vec<usize>;

/// Concrete f64 aliases; the CLI and most callers work at this precision.
pub type Matrix64 = Matrix<f64>;
pub type Vector64 = Vector<f64>;
pub type LabeledDomain64 = data::LabeledDomain<f64>;
pub type KernelSpec64 = kernel::KernelSpec<f64>;
pub type HyperParams64 = net::HyperParams<f64>;
pub type NetModel64 = net::NetModel<f64>;
pub type GridSpec64 = modelsel::GridSpec<f64>;
