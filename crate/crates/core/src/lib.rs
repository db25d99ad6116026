//! Numerical frame theory over finite-dimensional C*-algebras.
//!
//! Every algebra handled here is a direct sum of full matrix algebras
//! `A = M_{n_1}(C) ⊕ ... ⊕ M_{n_m}(C)`. On top of the algebra the crate
//! builds the free Hilbert module `A^d` (row vectors, `<x, y> = Σ x_j y_j*`),
//! matrices over `A` acting by right multiplication, modular frames and
//! their certification, a heuristic Paulsen solver with the projection
//! construction built on it, alternating operator scaling for matrix
//! tuples, and a deterministic experiment harness.

pub mod cstar;
pub mod error;
pub mod explorer;
pub mod frames;
mod jacobi;
pub mod module;
pub mod opscale;
pub mod paulsen;

pub use cstar::{AlgebraSignature, CStarElement, SpectralFn, SpectrumReport, DEFAULT_TOL};
pub use error::{Error, Result};
pub use frames::{FrameCertificate, FrameSystem};
pub use module::{FlattenedBlock, ModuleMatrix, ModuleVector};
pub use opscale::{BalanceReport, CoefficientVector, MatrixTuple, ScalingResult};
pub use paulsen::{FlowTrace, PaulsenResult, PaulsenSolver, ProjectionReport};

pub use num_complex::Complex64;
