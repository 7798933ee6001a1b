//! Projection matrix E = ZᵀAZ and the preconditioners built on it, applied
//! matrix-free:
//!
//! * P_D = I − A·Z·E⁻¹·Zᵀ
//! * P_C = I + Z·E⁻¹·Zᵀ
//! * P_A = I − A·Z·E⁻¹·Zᵀ + Z·E⁻¹·Zᵀ
//!
//! plus restricted additive Schwarz and its two-level compositions.

mod coarse;
mod operator;
mod ras;

use std::sync::Arc;

pub use coarse::{
    assemble_projection, build_projection, matrix_two_norm, CoarseSolve, CoarseSpace, InverseMode, RhoNorms,
    DENSE_NORM_LIMIT,
};
pub use operator::{OperatorKind, SpectralOperator, MATERIALIZE_LIMIT};
pub use ras::{one_level_op, ras_apply, ras_build, two_level_op, two_level_rhs, RasPreconditioner, Subdomain};

use crate::error::{Error, Result};
use crate::matkit::{axpy, DenseMatrix};
use crate::subspace::OrthonormalBasis;
pub(crate) use coarse::coarse_term;

/// Which of the three preconditioners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    D,
    C,
    A,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::D, Variant::C, Variant::A];

    pub fn label(self) -> &'static str {
        match self {
            Variant::D => "PD",
            Variant::C => "PC",
            Variant::A => "PA",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "D" | "PD" => Ok(Variant::D),
            "C" | "PC" => Ok(Variant::C),
            "A" | "PA" => Ok(Variant::A),
            _ => Err(Error::Parse(format!("unknown preconditioner `{s}` (expected D, C or A)"))),
        }
    }
}

fn check(a_n: usize, z: &dyn CoarseSpace, cs: &CoarseSolve) -> Result<()> {
    if a_n != z.n() || z.r() != cs.r() {
        return Err(Error::DimensionMismatch(format!(
            "operator {a_n}, coarse space {}x{}, coarse solve {}",
            z.n(),
            z.r(),
            cs.r()
        )));
    }
    Ok(())
}

/// x ↦ P_D·x
pub fn deflation_op<Z: CoarseSpace + Clone + 'static>(a_op: &SpectralOperator, z: &Z, cs: &CoarseSolve) -> Result<SpectralOperator> {
    check(a_op.n(), z, cs)?;
    let (a, z, cs) = (a_op.clone(), Arc::new(z.clone()), cs.clone());
    Ok(SpectralOperator::new(a.n(), OperatorKind::Deflation, move |x| {
        let azc = a.apply(&coarse_term(&*z, &cs, x));
        let mut y = x.to_vec();
        axpy(-1.0, &azc, &mut y);
        y
    }))
}

/// x ↦ P_C·x
pub fn coarse_correction_op<Z: CoarseSpace + Clone + 'static>(z: &Z, cs: &CoarseSolve) -> Result<SpectralOperator> {
    check(z.n(), z, cs)?;
    let (n, z, cs) = (z.n(), Arc::new(z.clone()), cs.clone());
    Ok(SpectralOperator::new(n, OperatorKind::CoarseCorrection, move |x| {
        let zc = coarse_term(&*z, &cs, x);
        let mut y = x.to_vec();
        axpy(1.0, &zc, &mut y);
        y
    }))
}

/// x ↦ P_A·x
pub fn adapted_deflation_op<Z: CoarseSpace + Clone + 'static>(
    a_op: &SpectralOperator,
    z: &Z,
    cs: &CoarseSolve,
) -> Result<SpectralOperator> {
    check(a_op.n(), z, cs)?;
    let (a, z, cs) = (a_op.clone(), Arc::new(z.clone()), cs.clone());
    Ok(SpectralOperator::new(a.n(), OperatorKind::AdaptedDeflation, move |x| {
        let zc = coarse_term(&*z, &cs, x);
        let azc = a.apply(&zc);
        let mut y = x.to_vec();
        for ((yi, a), z) in y.iter_mut().zip(&azc).zip(&zc) {
            *yi += z - a;
        }
        y
    }))
}

/// The preconditioner `variant` as an operator x ↦ P·x.
pub fn preconditioner_op<Z: CoarseSpace + Clone + 'static>(
    variant: Variant,
    a_op: &SpectralOperator,
    z: &Z,
    cs: &CoarseSolve,
) -> Result<SpectralOperator> {
    match variant {
        Variant::D => deflation_op(a_op, z, cs),
        Variant::C => coarse_correction_op(z, cs),
        Variant::A => adapted_deflation_op(a_op, z, cs),
    }
}

/// x ↦ P·A·x for the given variant.
pub fn preconditioned_op<Z: CoarseSpace + Clone + 'static>(
    variant: Variant,
    a_op: &SpectralOperator,
    z: &Z,
    cs: &CoarseSolve,
) -> Result<SpectralOperator> {
    let p = preconditioner_op(variant, a_op, z, cs)?;
    let kind = p.kind();
    Ok(p.compose(a_op)?.with_kind(kind))
}

/// Preconditioners built with an explicit H̃⁻¹ in place of Ẽ⁻¹, together
/// with the perturbation measures ρ₁ = ẼH̃⁻¹ − I and ρ₂ = H̃⁻¹Ẽ − I.
#[derive(Debug, Clone)]
pub struct InexactVariants {
    pub pd: SpectralOperator,
    pub pc: SpectralOperator,
    pub pa: SpectralOperator,
    pub e: DenseMatrix,
    pub rho1: DenseMatrix,
    pub rho2: DenseMatrix,
    pub norms: RhoNorms,
}

pub fn inexact_variants(a_op: &SpectralOperator, v: &OrthonormalBasis, h_inv: &DenseMatrix) -> Result<InexactVariants> {
    if h_inv.rows() != v.r() || h_inv.cols() != v.r() {
        return Err(Error::DimensionMismatch(format!("H̃⁻¹ is {}x{} for a basis of rank {}", h_inv.rows(), h_inv.cols(), v.r())));
    }
    let e = assemble_projection(a_op, v)?;
    let cs = CoarseSolve::explicit(e.clone(), h_inv.clone())?;
    let i = DenseMatrix::identity(v.r());
    let rho1 = e.matmul(h_inv).sub(&i);
    let rho2 = h_inv.matmul(&e).sub(&i);
    let norms = RhoNorms { rho1: matrix_two_norm(&rho1)?, rho2: matrix_two_norm(&rho2)? };
    Ok(InexactVariants {
        pd: deflation_op(a_op, v, &cs)?,
        pc: coarse_correction_op(v, &cs)?,
        pa: adapted_deflation_op(a_op, v, &cs)?,
        e,
        rho1,
        rho2,
        norms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::{lu_factor, norm2};
    use crate::spectra::{eig_general, eig_symmetric};
    use crate::subspace::{basis_at_angle, random_basis, random_matrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn truncated_diag(n: usize) -> Vec<f64> {
        let mut d: Vec<f64> = (1..=7).rev().map(|k| 10f64.powi(-k)).collect();
        d.push(1.0);
        let m = n - 8;
        d.extend((0..m).map(|k| 10.0 + (209.1 - 10.0) * k as f64 / (m - 1) as f64));
        d
    }

    fn spd(n: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_matrix(n, n, &mut rng);
        b.t_matmul(&b).add(&DenseMatrix::identity(n).scaled(n as f64 * 0.1))
    }

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn projection_examples() {
        let a = SpectralOperator::from_diag(vec![1.0, 2.0, 3.0]);
        let z = OrthonormalBasis::unit_vectors(3, &[0, 1]).unwrap();
        let cs = build_projection(&a, &z).unwrap();
        assert_eq!(cs.e(), &DenseMatrix::from_diag(&[1.0, 2.0]));

        let m = spd(20, 1);
        let eig = eig_symmetric(&m).unwrap();
        let v = OrthonormalBasis::try_from_matrix(eig.vectors.select_columns(&[0, 1, 2])).unwrap();
        let cs = build_projection(&SpectralOperator::from_dense(m.clone()).unwrap(), &v).unwrap();
        let expect = DenseMatrix::from_diag(&eig.values[..3]);
        assert!(cs.e().sub(&expect).max_abs() <= 1e-10 * eig.values[19]);
        assert!(cs.e().asymmetry() <= 1e-10);
        let y = [1.0, -2.0, 0.5];
        let ey = cs.e().matvec(&cs.solve(&y));
        assert!(ey.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) <= 1e-10 * norm2(&y));
    }

    #[test]
    fn exact_space_spectra_on_diagonal() {
        let d = truncated_diag(50);
        let a = SpectralOperator::from_diag(d.clone());
        let v = OrthonormalBasis::unit_vectors(50, &(0..7).collect::<Vec<_>>()).unwrap();
        let cs = build_projection(&a, &v).unwrap();
        let pd = preconditioned_op(Variant::D, &a, &v, &cs).unwrap().to_dense().unwrap();
        let pc = preconditioned_op(Variant::C, &a, &v, &cs).unwrap().to_dense().unwrap();
        let pa = preconditioned_op(Variant::A, &a, &v, &cs).unwrap().to_dense().unwrap();
        let tail = &d[7..];
        let want_d = sorted([vec![0.0; 7], tail.to_vec()].concat());
        let want_c = sorted(d[..7].iter().map(|l| 1.0 + l).chain(tail.iter().copied()).collect());
        let want_a = sorted([vec![1.0; 7], tail.to_vec()].concat());
        for (m, want) in [(&pd, want_d), (&pc, want_c), (&pa, want_a)] {
            let got = eig_symmetric(m).unwrap().values;
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() <= 1e-10 * w.abs().max(1e-300) || (g - w).abs() < 1e-14, "{g} vs {w}");
            }
        }
        for j in 0..7 {
            let zj = v.q().col(j);
            let pdz = pd.matvec(zj);
            assert!(norm2(&pdz) <= 1e-10 * 209.1);
            assert_eq!(pa.matvec(zj), zj.to_vec());
        }
        // P_C fixes vectors orthogonal to V
        let pc_op = coarse_correction_op(&v, &cs).unwrap();
        let mut x = vec![0.0; 50];
        x[20] = 3.0;
        x[40] = -1.0;
        assert_eq!(pc_op.apply(&x), x);
    }

    #[test]
    fn linearity_and_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = spd(40, 2);
        let a = SpectralOperator::from_dense(m.clone()).unwrap();
        let z = random_basis(40, 4, &mut rng).unwrap();
        let cs = build_projection(&a, &z).unwrap();
        for variant in Variant::ALL {
            let op = preconditioned_op(variant, &a, &z, &cs).unwrap();
            let scale = op.to_dense().unwrap().frobenius_norm();
            for _ in 0..50 {
                let x = random_matrix(40, 1, &mut rng).into_matrix_col();
                let y = random_matrix(40, 1, &mut rng).into_matrix_col();
                let (al, be) = (rand::Rng::gen_range(&mut rng, -2.0..2.0), rand::Rng::gen_range(&mut rng, -2.0..2.0));
                let comb: Vec<f64> = x.iter().zip(&y).map(|(p, q)| al * p + be * q).collect();
                let lhs = op.apply(&comb);
                let (ox, oy) = (op.apply(&x), op.apply(&y));
                let err = lhs.iter().zip(ox.iter().zip(&oy)).map(|(l, (p, q))| (l - al * p - be * q).powi(2)).sum::<f64>().sqrt();
                assert!(err <= 1e-12 * scale * 10.0, "{variant:?}: {err:e}");
            }
        }
        let pd = preconditioned_op(Variant::D, &a, &z, &cs).unwrap().to_dense().unwrap();
        assert!(pd.asymmetry() <= 1e-9);
    }

    #[test]
    fn exact_space_commutation() {
        let m = spd(30, 3);
        let eig = eig_symmetric(&m).unwrap();
        let v = OrthonormalBasis::try_from_matrix(eig.vectors.select_columns(&[0, 1, 2, 3])).unwrap();
        let a = SpectralOperator::from_dense(m.clone()).unwrap();
        let cs = build_projection(&a, &v).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let na = eig.values[29];
        for variant in Variant::ALL {
            let p = preconditioner_op(variant, &a, &v, &cs).unwrap();
            for _ in 0..5 {
                let x = random_matrix(30, 1, &mut rng).into_matrix_col();
                let pax = p.apply(&a.apply(&x));
                let apx = a.apply(&p.apply(&x));
                let err = norm2(&pax.iter().zip(&apx).map(|(p, q)| p - q).collect::<Vec<_>>());
                assert!(err <= 1e-9 * na * norm2(&x), "{variant:?}");
            }
        }
    }

    #[test]
    fn basis_independence() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = spd(25, 4);
        let a = SpectralOperator::from_dense(m).unwrap();
        let z = random_basis(25, 3, &mut rng).unwrap();
        let c = DenseMatrix::identity(3).add(&random_matrix(3, 3, &mut rng).scaled(0.3));
        let zc = z.q().matmul(&c);
        let reortho = crate::subspace::orthonormalize(&zc, 1e-12).unwrap();
        let cs1 = build_projection(&a, &z).unwrap();
        let cs2 = build_projection(&a, &reortho).unwrap();
        // raw (non-orthonormal) Z·C through a dense operator
        let e_raw = zc.t_matmul(&a.to_dense().unwrap().matmul(&zc));
        let e_raw_inv = lu_factor(&e_raw).unwrap().inverse();
        for variant in Variant::ALL {
            let p1 = preconditioner_op(variant, &a, &z, &cs1).unwrap();
            let p2 = preconditioner_op(variant, &a, &reortho, &cs2).unwrap();
            for _ in 0..5 {
                let x = random_matrix(25, 1, &mut rng).into_matrix_col();
                let (y1, y2) = (p1.apply(&x), p2.apply(&x));
                let coarse = zc.matvec(&e_raw_inv.matvec(&zc.matvec_t(&x)));
                let acoarse = a.apply(&coarse);
                let y3: Vec<f64> = match variant {
                    Variant::D => x.iter().zip(&acoarse).map(|(x, a)| x - a).collect(),
                    Variant::C => x.iter().zip(&coarse).map(|(x, c)| x + c).collect(),
                    Variant::A => x.iter().zip(&acoarse).zip(&coarse).map(|((x, a), c)| x - a + c).collect(),
                };
                for k in 0..25 {
                    assert!((y1[k] - y2[k]).abs() <= 1e-9 * norm2(&y1));
                    assert!((y1[k] - y3[k]).abs() <= 1e-9 * norm2(&y1));
                }
            }
        }
    }

    #[test]
    fn pc_similarity_and_positivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m = spd(40, 9);
        let a = SpectralOperator::from_dense(m.clone()).unwrap();
        let z = random_basis(40, 5, &mut rng).unwrap();
        let cs = build_projection(&a, &z).unwrap();
        let pca = preconditioned_op(Variant::C, &a, &z, &cs).unwrap().to_dense().unwrap();
        let gen = eig_general(&pca).unwrap();
        // A^{1/2} from the symmetric oracle
        let eig = eig_symmetric(&m).unwrap();
        let sq = DenseMatrix::from_diag(&eig.values.iter().map(|l| l.sqrt()).collect::<Vec<_>>());
        let half = eig.vectors.matmul(&sq).matmul(&eig.vectors.transpose());
        let einv = lu_factor(cs.e()).unwrap().inverse();
        let zz = z.q().matmul(&einv).matmul(&z.q().transpose());
        let sim = m.add(&half.matmul(&zz).matmul(&half));
        let sim = sim.add(&sim.transpose()).scaled(0.5);
        let want = eig_symmetric(&sim).unwrap().values;
        let scale = want[39];
        for (g, w) in gen.sorted_real_parts().iter().zip(&want) {
            assert!((g - w).abs() <= 1e-8 * scale);
        }
        assert!(gen.values.iter().all(|v| v.re > 0.0 && v.im.abs() <= 1e-8 * scale));
    }

    #[test]
    fn pd_bound_region_at_half_sine() {
        let d = truncated_diag(50);
        let a = SpectralOperator::from_diag(d.clone());
        let v = OrthonormalBasis::unit_vectors(50, &(0..7).collect::<Vec<_>>()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let z = basis_at_angle(&v, 0.5, &mut rng).unwrap();
        let cs = build_projection(&a, &z).unwrap();
        let spec = eig_symmetric(&preconditioned_op(Variant::D, &a, &z, &cs).unwrap().to_dense().unwrap().symmetrized()).unwrap().values;
        let (s, c) = (0.5f64, 0.75f64.sqrt());
        let lmax = 209.1;
        let (ne, nei) = cs.e_norms().unwrap();
        let eta = lmax * (s + s * s);
        let eps = eta + nei * (ne + lmax).powi(2) * (s / c).powi(2);
        for &l in &spec[7..] {
            assert!(l >= 10.0 - eps - 1e-8 * lmax && l <= lmax + eta + 1e-8 * lmax);
        }
    }

    #[test]
    fn inexact_with_exact_h_matches_exact() {
        let d = truncated_diag(30);
        let a = SpectralOperator::from_diag(d);
        let v = OrthonormalBasis::unit_vectors(30, &(0..7).collect::<Vec<_>>()).unwrap();
        let cs = build_projection(&a, &v).unwrap();
        let inv = lu_factor(cs.e()).unwrap().inverse();
        let iv = inexact_variants(&a, &v, &inv).unwrap();
        assert!(iv.norms.rho1 < 1e-15 && iv.norms.rho2 < 1e-15);
        let x: Vec<f64> = (0..30).map(|k| (k as f64).sin()).collect();
        for (op, variant) in [(&iv.pd, Variant::D), (&iv.pc, Variant::C), (&iv.pa, Variant::A)] {
            let exact = preconditioner_op(variant, &a, &v, &cs).unwrap();
            let (p, q) = (op.apply(&x), exact.apply(&x));
            assert!(p.iter().zip(&q).all(|(p, q)| (p - q).abs() <= 1e-12 * q.abs().max(1.0)));
        }
        assert!(inexact_variants(&a, &v, &DenseMatrix::identity(3)).is_err());
    }

    #[test]
    fn ilu_mode_on_diagonal_e_is_exact() {
        let a = SpectralOperator::from_diag(truncated_diag(20));
        let v = OrthonormalBasis::unit_vectors(20, &[0, 1, 2]).unwrap();
        let cs = build_projection(&a, &v).unwrap().to_ilu().unwrap();
        assert!(matches!(cs.mode(), InverseMode::Ilu0(_)));
        let r = cs.rho_norms().unwrap();
        assert!(r.rho1 < 1e-15 && r.rho2 < 1e-15);
    }

    trait ColVec {
        fn into_matrix_col(self) -> Vec<f64>;
    }
    impl ColVec for DenseMatrix {
        fn into_matrix_col(self) -> Vec<f64> {
            self.col(0).to_vec()
        }
    }
    trait Sym {
        fn symmetrized(&self) -> DenseMatrix;
    }
    impl Sym for DenseMatrix {
        fn symmetrized(&self) -> DenseMatrix {
            self.add(&self.transpose()).scaled(0.5)
        }
    }
}
