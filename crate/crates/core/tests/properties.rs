use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spectral_precond::bounds::deflation_adapted_mismatch;
use spectral_precond::krylov::gmres;
use spectral_precond::matkit::{ilu0, lu_factor, norm2, two_norm, CsrMatrix, DenseMatrix};
use spectral_precond::precond::{build_projection, preconditioned_op, preconditioner_op, SpectralOperator, Variant};
use spectral_precond::problems::{diag_case, Scale};
use spectral_precond::spectra::eig_general;
use spectral_precond::subspace::{angle, basis_at_angle, orthonormalize, random_basis, random_matrix};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random matrix shifted to be diagonally dominant, so well conditioned.
fn dominant(n: usize, seed: u64) -> DenseMatrix {
    let mut a = random_matrix(n, n, &mut rng(seed));
    for i in 0..n {
        a[(i, i)] += n as f64;
    }
    a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transpose_keeps_spectral_norm(rows in 1usize..12, cols in 1usize..12, seed in any::<u64>()) {
        let a = random_matrix(rows, cols, &mut rng(seed));
        let (n1, n2) = (two_norm(&a).unwrap(), two_norm(&a.transpose()).unwrap());
        prop_assert!((n1 - n2).abs() <= 1e-12 * n1);
    }

    #[test]
    fn lu_solve_reproduces_rhs(n in 1usize..30, seed in any::<u64>()) {
        let a = dominant(n, seed);
        let b = random_matrix(n, 1, &mut rng(seed ^ 1)).col(0).to_vec();
        let x = lu_factor(&a).unwrap().solve(&b).unwrap();
        let r: Vec<f64> = a.matvec(&x).iter().zip(&b).map(|(p, q)| p - q).collect();
        prop_assert!(norm2(&r) <= 1e-12 * norm2(&b));
    }

    #[test]
    fn ilu0_stays_in_pattern(n in 2usize..25, seed in any::<u64>(), density in 0.1f64..0.6) {
        let mut r = rng(seed);
        let mut a = dominant(n, seed);
        for i in 0..n {
            for j in 0..n {
                if i != j && rand::Rng::gen::<f64>(&mut r) > density {
                    a[(i, j)] = 0.0;
                }
            }
        }
        let s = CsrMatrix::from_dense(&a, 0.0);
        let f = ilu0(&s).unwrap();
        let (l, u) = (f.l_dense(), f.u_dense());
        for i in 0..n {
            for j in 0..n {
                if i != j && !s.contains(i, j) {
                    prop_assert!(l[(i, j)] == 0.0 && u[(i, j)] == 0.0);
                }
            }
        }
        // on the pattern, L·U reproduces A
        let lu = l.matmul(&u);
        for i in 0..n {
            for j in 0..n {
                if s.contains(i, j) {
                    prop_assert!((lu[(i, j)] - a[(i, j)]).abs() <= 1e-12 * (n as f64));
                }
            }
        }
    }

    #[test]
    fn angle_is_symmetric(n in 4usize..30, r in 1usize..4, seed in any::<u64>()) {
        prop_assume!(2 * r <= n);
        let mut g = rng(seed);
        let z = random_basis(n, r, &mut g).unwrap();
        let v = random_basis(n, r, &mut g).unwrap();
        let (a, b) = (angle(&z, &v).unwrap(), angle(&v, &z).unwrap());
        prop_assert!((a.sin_theta - b.sin_theta).abs() <= 1e-12);
        prop_assert!((a.cos_theta - b.cos_theta).abs() <= 1e-12);
        prop_assert!((a.sin_theta.powi(2) + a.cos_theta.powi(2) - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn orthonormalize_is_idempotent(n in 2usize..30, r in 1usize..6, seed in any::<u64>()) {
        prop_assume!(r <= n);
        let q = orthonormalize(&random_matrix(n, r, &mut rng(seed)), 1e-12).unwrap();
        let q2 = orthonormalize(q.q(), 1e-12).unwrap();
        prop_assert_eq!(q2.r(), q.r());
        prop_assert!(angle(&q, &q2).unwrap().sin_theta <= 1e-12);
        let g = q2.q().t_matmul(q2.q()).sub(&DenseMatrix::identity(q2.r()));
        prop_assert!(g.frobenius_norm() <= 1e-12);
    }

    #[test]
    fn basis_at_angle_hits_target(s in 0.0f64..0.95, seed in any::<u64>()) {
        let c = diag_case(Scale::Truncated(40)).unwrap();
        let z = basis_at_angle(&c.exact_basis, s, &mut rng(seed)).unwrap();
        prop_assert!((angle(&z, &c.exact_basis).unwrap().sin_theta - s).abs() <= 1e-10);
    }

    #[test]
    fn gmres_residuals_never_increase(n in 5usize..60, seed in any::<u64>()) {
        let op = SpectralOperator::from_dense(dominant(n, seed)).unwrap();
        let b = random_matrix(n, 1, &mut rng(seed ^ 7)).col(0).to_vec();
        let h = gmres(&op, &b, 1e-12, n).unwrap().history;
        prop_assert!(h.relres.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        prop_assert_eq!(h.relres[0], 1.0);
        prop_assert!(!h.converged || *h.relres.last().unwrap() <= 1e-12);
    }

    #[test]
    fn preconditioners_are_linear(seed in any::<u64>(), alpha in -3.0f64..3.0) {
        let c = diag_case(Scale::Truncated(30)).unwrap();
        let a = c.operator();
        let mut g = rng(seed);
        let z = basis_at_angle(&c.exact_basis, 0.2, &mut g).unwrap();
        let cs = build_projection(&a, &z).unwrap();
        let xy = random_matrix(30, 2, &mut g);
        let (x, y) = (xy.col(0), xy.col(1));
        let comb: Vec<f64> = x.iter().zip(y).map(|(p, q)| alpha * p + q).collect();
        for v in Variant::ALL {
            let p = preconditioner_op(v, &a, &z, &cs).unwrap();
            let lhs = p.apply(&comb);
            let (px, py) = (p.apply(x), p.apply(y));
            let scale = norm2(&lhs).max(1.0);
            for k in 0..30 {
                prop_assert!((lhs[k] - (alpha * px[k] + py[k])).abs() <= 1e-9 * scale);
            }
        }
    }

    #[test]
    fn deflation_and_adapted_deflation_share_spectra(seed in any::<u64>(), s in 0.01f64..0.5) {
        let c = diag_case(Scale::Truncated(30)).unwrap();
        let a = c.operator();
        let z = basis_at_angle(&c.exact_basis, s, &mut rng(seed)).unwrap();
        let cs = build_projection(&a, &z).unwrap();
        let spec = |v| -> Vec<f64> {
            let m = preconditioned_op(v, &a, &z, &cs).unwrap().to_dense().unwrap();
            eig_general(&m).unwrap().values.iter().map(|e| e.re).collect()
        };
        let gap = deflation_adapted_mismatch(&spec(Variant::D), &spec(Variant::A), 7).unwrap();
        prop_assert!(gap <= 1e-8, "{}", gap);
    }
}
