//! Experiment runner for the spectral-precond library: the diagonal
//! perturbation study, the two-level Schwarz study on the diffusion
//! problem, and ad-hoc spectrum and bound checks.

pub mod bvp;
pub mod checks;
pub mod commands;
pub mod config;
pub mod diag;
pub mod output;

pub use bvp::{compute_bvp, run_bvp, BvpCase};
pub use config::{ExperimentConfig, HMode};
pub use diag::{compute_diag_tables, run_diag_tables, DiagTables};
pub use output::Output;
