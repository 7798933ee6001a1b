//! Dense eigenvalue and singular value solvers. These are the ground-truth
//! oracles every spectral claim in the crate is checked against.

mod francis;
mod jacobi;
mod svd;

pub use francis::{eig_general, eig_hessenberg, GeneralEigen};
pub use jacobi::{eig_symmetric, off_diagonal_norm, SymmetricEigen, SYMMETRY_TOL};
pub use svd::{svd_values, SingularValues};

/// |Im λ| ≤ this · ‖a‖₂ classifies λ as real.
pub const REALNESS_TOL: f64 = 1e-8;

/// A possibly complex eigenvalue.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

impl Eigenvalue {
    pub fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }

    /// Real under the realness tolerance relative to `scale` (usually ‖a‖₂).
    pub fn is_real(&self, scale: f64) -> bool {
        self.im.abs() <= REALNESS_TOL * scale
    }
}
