//! Deflation (`P_D`), coarse-grid-correction (`P_C`) and adapted-deflation
//! (`P_A`) preconditioners for SPD systems, together with the dense oracles
//! and bound formulas needed to certify the spectra they produce.
//!
//! * [`matkit`]: dense/CSR storage, LU, ILU(0), Matrix Market I/O.
//! * [`spectra`]: Jacobi symmetric eigensolver, Francis QR, one-sided Jacobi SVD.
//! * [`subspace`]: orthonormal bases, subspace angles, Ritz residuals.
//! * [`precond`]: matrix-free operators, coarse solves, RAS and two-level forms.
//! * [`krylov`]: GMRES, Rayleigh–Ritz extraction, split coarse spaces.
//! * [`bounds`]: eigenvalue intervals and spectrum certification.
//! * [`problems`]: the diagonal test matrix and the heterogeneous diffusion BVP.

pub mod bounds;
pub mod error;
pub mod fmt;
pub mod krylov;
pub mod matkit;
pub mod precond;
pub mod problems;
pub mod spectra;
pub mod subspace;

pub use error::{Error, Result};
