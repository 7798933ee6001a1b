use crate::error::Result;
use crate::precond::{coarse_term, preconditioner_op, CoarseSolve, CoarseSpace, SpectralOperator, Variant};

use super::{gmres_preconditioned, GmresOutput, OriginalSystem};

/// Solves A·x = b by GMRES on P·A·x = P·b for the given variant, with
/// residuals reported against the original system.
///
/// P_D·A is singular, so its iterate x̃ is completed to
/// x = x̃ + Z·E⁻¹·Zᵀ(b − A·x̃), whose residual equals P_D(b − A·x̃).
/// The returned `x` solves the original system in every case.
pub fn solve_left<Z: CoarseSpace + Clone + 'static>(
    variant: Variant,
    a_op: &SpectralOperator,
    z: &Z,
    cs: &CoarseSolve,
    b: &[f64],
    tol: f64,
    max_it: usize,
) -> Result<GmresOutput> {
    let p = preconditioner_op(variant, a_op, z, cs)?;
    let op = p.compose(a_op)?.with_kind(p.kind());
    let pb = p.try_apply(b)?;
    let recover = |xt: &[f64]| -> Vec<f64> {
        let ax = a_op.apply(xt);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(b, y)| b - y).collect();
        let c = coarse_term(z, cs, &r);
        xt.iter().zip(&c).map(|(x, c)| x + c).collect()
    };
    let sys = OriginalSystem {
        a: a_op,
        b,
        recover: if variant == Variant::D { Some(&recover) } else { None },
    };
    let mut out = gmres_preconditioned(&op, &pb, &sys, tol, max_it)?;
    if variant == Variant::D {
        out.x = recover(&out.x);
    }
    Ok(out)
}
