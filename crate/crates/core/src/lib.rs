//! Limiting spectral distributions (LSDs) of Wigner-type random matrices
//! whose entries come from a stationary field with summable covariances.
//!
//! The library computes the LSD three independent ways and lets them check
//! each other:
//!
//! * [`moments`] — even moments as sums over non-crossing pair partitions
//!   with covariance-constrained index tuples, plus a quadrature recursion
//!   on the covariance Fourier transform, plus an exact small-n Wick-formula
//!   trace oracle;
//! * [`stieltjes`] — the Stieltjes transform solved from a fixed-point
//!   functional equation on a grid, inverted to a density/CDF;
//! * [`freeconv`] — closed special cases: free multiplicative convolution of
//!   the semicircle law with the spectral-density law of a separable kernel,
//!   and plain (dilated) semicircle collapse.
//!
//! [`simulate`] generates the matrix ensembles (Gaussian and non-Gaussian
//! linear-process inputs), diagonalizes them with a self-contained symmetric
//! eigensolver, and measures Lévy/Kolmogorov–Smirnov agreement with theory.
//!
//! All values are immutable after construction and safe to share across
//! threads; parallelism, where present, is over independent work items with
//! a fixed reduction order.

pub mod combinatorics;
pub mod freeconv;
pub mod kernel;
pub mod moments;
pub mod quadrature;
pub mod simulate;
pub mod stieltjes;

pub use kernel::{CovKernel, LinearCoeffs, SpectralDensity2D};
pub use moments::MomentSequence;
pub use quadrature::QuadratureSpec;
pub use stieltjes::{DensityCurve, StieltjesField};
