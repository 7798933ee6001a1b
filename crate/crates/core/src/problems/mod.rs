//! Test problems: the diagonal spectrum experiment and the heterogeneous
//! diffusion boundary value problem with its structured partitioning.

mod bvp;
mod diag;
mod partition;

pub use bvp::{assemble_bvp, viscosity_csv, ViscosityField, GRID};
pub use diag::{diag_case, perturb_basis, perturb_matrix, DiagonalTestCase, Scale, FULL_N, SMALL_COUNT};
pub use partition::{stencil_graph, tile_partition, tile_shape, Partition};
