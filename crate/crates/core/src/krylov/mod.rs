//! GMRES, Rayleigh–Ritz extraction from its Arnoldi decomposition, and the
//! split (block-diagonal) coarse space built from Ritz vectors.

mod gmres;
mod ritz;
mod solve;
mod split;

pub use gmres::{gmres, gmres_preconditioned, OriginalSystem, ArnoldiData, ConvergenceHistory, GmresOutput, StopReason};
pub use ritz::{rayleigh_ritz, RitzSet};
pub use solve::solve_left;
pub use split::{split_coarse_space, LocalBlock, SplitBasis};
