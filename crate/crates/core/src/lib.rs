//! Spectral bases for directed graphs whose adjacency operator may be
//! defective.
//!
//! The crate builds the Graph Schur Transform (GST): the normalized adjacency
//! operator is factored as `U T Uᴴ`, its eigenvalues are split into groups at
//! the largest magnitude gaps, and for every group the Schur factorization is
//! reordered so that the group leads. The leading Schur vectors of each
//! reordering span an exactly invariant subspace, and the blocks together form
//! a complete (non-orthogonal) basis even when no eigenvector basis exists.
//!
//! A diffusion-wavelet basis is provided as a baseline, along with the metrics
//! and seeded experiment drivers used to compare the two.

pub mod dw;
pub mod experiments;
pub mod graph;
pub mod gst;
pub mod metrics;
pub mod poly;
pub mod serial;
pub mod spectral;

pub use num_complex::Complex64;

/// Dense complex matrix used throughout the crate (column-major).
pub type ComplexMatrix = nalgebra::DMatrix<Complex64>;
/// Dense complex column vector.
pub type ComplexVector = nalgebra::DVector<Complex64>;
