//! Single-shot state convertibility in affine resource theories.
//!
//! The crate is organized around a small dense SDP core:
//!
//! - [`hermitian`]: complex Hermitian linear algebra and realification
//! - [`sdp`]: interior-point solver, homogeneous feasibility, Farkas certificates
//! - [`theory`]: affine theories, dual sets, and preset constructions
//! - [`minentropy`]: conditional min-entropy and the Ω-operator machinery
//! - [`convert`]: convertibility verdicts under RNG and self-dual operations
//! - [`rdm`]: resource-destroying map existence and construction
//! - [`oracles`]: independent classical cross-checks (majorization, LP, Helstrom)
//! - [`encode`]: JSON wire formats shared by the examples and the CLI

pub mod cli;
pub mod convert;
pub mod encode;
pub mod error;
pub mod hermitian;
pub mod minentropy;
pub mod oracles;
pub mod rdm;
pub mod sdp;
pub mod theory;
pub mod tol;

pub use error::{Error, Result};
pub use hermitian::{DensityMatrix, HermitianBasis, HermitianMatrix, Subsystem};
