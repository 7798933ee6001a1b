use crate::error::{Error, Result};
use crate::fmt::sci16;
use crate::matkit::{axpy, dot, norm2, DenseMatrix};
use crate::precond::SpectralOperator;

/// Why a GMRES run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    /// The Krylov space became invariant and the residual vanished.
    HappyBreakdown,
    /// The Krylov space became invariant but the least-squares residual
    /// stayed above tolerance (singular operator, inconsistent rhs).
    Breakdown,
    MaxIterations,
}

/// Relative residuals of one run, k = 0…iterations: ‖b − A·x_k‖₂/‖b‖₂ for
/// [`gmres`], the measure of [`gmres_preconditioned`] otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceHistory {
    pub label: String,
    pub relres: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub stop: StopReason,
}

impl ConvergenceHistory {
    /// `iter,relres` with one header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("iter,relres\n");
        for (k, r) in self.relres.iter().enumerate() {
            s.push_str(&format!("{k},{}\n", sci16(*r)));
        }
        s
    }

    /// Parses [`Self::to_csv`] output; convergence is judged against `tol`.
    pub fn from_csv(label: &str, text: &str, tol: f64) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next() != Some("iter,relres") {
            return Err(Error::Parse("missing `iter,relres` header".into()));
        }
        let mut relres = Vec::new();
        for (k, line) in lines.enumerate() {
            let (it, r) = line.split_once(',').ok_or_else(|| Error::Parse(format!("bad history row `{line}`")))?;
            if it.parse::<usize>().ok() != Some(k) {
                return Err(Error::Parse(format!("history row {k} has iteration `{it}`")));
            }
            relres.push(r.parse::<f64>().map_err(|_| Error::Parse(format!("bad residual `{r}`")))?);
        }
        if relres.is_empty() {
            return Err(Error::Parse("empty history".into()));
        }
        let converged = *relres.last().unwrap() <= tol;
        let stop = if converged { StopReason::Converged } else { StopReason::MaxIterations };
        Ok(Self { label: label.to_string(), iterations: relres.len() - 1, relres, converged, stop })
    }
}

/// Arnoldi relation A·V_m = V_{m+1}·H̄_m left behind by GMRES.
#[derive(Debug, Clone)]
pub struct ArnoldiData {
    /// n×(m+1) orthonormal basis (n×m after a breakdown).
    pub v: DenseMatrix,
    /// (m+1)×m upper Hessenberg matrix.
    pub h: DenseMatrix,
    /// Number of Arnoldi steps taken.
    pub m: usize,
}

#[derive(Debug, Clone)]
pub struct GmresOutput {
    pub x: Vec<f64>,
    pub history: ConvergenceHistory,
    pub arnoldi: ArnoldiData,
}

impl GmresOutput {
    /// The solution, or `NoConvergence` when the run did not reach tolerance.
    pub fn into_converged(self) -> Result<Vec<f64>> {
        if self.history.converged {
            Ok(self.x)
        } else {
            Err(Error::NoConvergence { method: "GMRES", iterations: self.history.iterations })
        }
    }
}

/// Full (unrestarted) GMRES from x₀ = 0. Arnoldi uses modified Gram–Schmidt
/// followed by one reorthogonalization pass; the residual norm comes from
/// the Givens-rotated least-squares problem.
pub fn gmres(op: &SpectralOperator, b: &[f64], tol: f64, max_it: usize) -> Result<GmresOutput> {
    gmres_core(op, b, tol, max_it, None)
}

/// The unpreconditioned system A·x = b behind a left-preconditioned run
/// P·A·x = P·b, with the map taking a preconditioned iterate to an
/// approximate solution of the original system.
pub struct OriginalSystem<'a> {
    pub a: &'a SpectralOperator,
    pub b: &'a [f64],
    pub recover: Option<&'a (dyn Fn(&[f64]) -> Vec<f64> + Sync)>,
}

impl OriginalSystem<'_> {
    /// ‖b − A·x‖₂/‖b‖₂ for the recovered x.
    pub fn relres(&self, x: &[f64]) -> f64 {
        let x = match self.recover {
            Some(f) => f(x),
            None => x.to_vec(),
        };
        let ax = self.a.apply(&x);
        let r: Vec<f64> = self.b.iter().zip(&ax).map(|(b, y)| b - y).collect();
        norm2(&r) / norm2(self.b)
    }
}

/// GMRES on P·A·x = P·b that reports residuals relative to the original
/// right-hand side: at step k the recorded value is the smaller of the true
/// residual ‖b − A·x_k‖₂ and the preconditioned residual ‖P(b − A·x_k)‖₂,
/// both divided by ‖b‖₂.
pub fn gmres_preconditioned(op: &SpectralOperator, pb: &[f64], sys: &OriginalSystem<'_>, tol: f64, max_it: usize) -> Result<GmresOutput> {
    if sys.b.len() != op.n() {
        return Err(Error::DimensionMismatch(format!("operator {} vs original rhs {}", op.n(), sys.b.len())));
    }
    gmres_core(op, pb, tol, max_it, Some(sys))
}

fn gmres_core(op: &SpectralOperator, b: &[f64], tol: f64, max_it: usize, sys: Option<&OriginalSystem<'_>>) -> Result<GmresOutput> {
    let n = op.n();
    if b.len() != n {
        return Err(Error::DimensionMismatch(format!("operator {n} vs rhs {}", b.len())));
    }
    if !(tol > 0.0) || max_it == 0 {
        return Err(Error::DimensionMismatch(format!("tol {tol} and max_it {max_it} must be positive")));
    }
    let beta = norm2(b);
    if beta == 0.0 {
        return Ok(GmresOutput {
            x: vec![0.0; n],
            history: ConvergenceHistory {
                label: String::new(),
                relres: vec![0.0],
                converged: true,
                iterations: 0,
                stop: StopReason::Converged,
            },
            arnoldi: ArnoldiData { v: DenseMatrix::zeros(n, 0), h: DenseMatrix::zeros(1, 0), m: 0 },
        });
    }
    let max_it = max_it.min(n);
    // preconditioned residuals rescaled to ‖b‖ of the original system
    let scale = sys.map_or(1.0, |s| beta / norm2(s.b));
    let mut basis: Vec<Vec<f64>> = vec![b.iter().map(|x| x / beta).collect()];
    // columns of H̄, each of length k+2
    let mut hcols: Vec<Vec<f64>> = Vec::new();
    // rotated copy of H̄ (upper triangular R)
    let mut rcols: Vec<Vec<f64>> = Vec::new();
    let mut cs: Vec<(f64, f64)> = Vec::new();
    let mut g = vec![beta];
    let mut relres = vec![1.0];
    let mut stop = StopReason::MaxIterations;

    for k in 0..max_it {
        let mut w = op.apply(&basis[k]);
        let wnorm0 = norm2(&w);
        let mut h = vec![0.0; k + 2];
        for _pass in 0..2 {
            for (j, vj) in basis.iter().enumerate() {
                let c = dot(vj, &w);
                h[j] += c;
                axpy(-c, vj, &mut w);
            }
        }
        let hn = norm2(&w);
        h[k + 1] = hn;
        hcols.push(h.clone());

        // apply previous rotations, then a new one annihilating h[k+1]
        let mut r = h;
        for (j, &(c, s)) in cs.iter().enumerate() {
            let (a, bb) = (r[j], r[j + 1]);
            r[j] = c * a + s * bb;
            r[j + 1] = -s * a + c * bb;
        }
        let (a, bb) = (r[k], r[k + 1]);
        let d = a.hypot(bb);
        let (c, s) = if d == 0.0 { (1.0, 0.0) } else { (a / d, bb / d) };
        r[k] = d;
        r[k + 1] = 0.0;
        cs.push((c, s));
        g.push(-s * g[k]);
        g[k] *= c;
        rcols.push(r);
        let mut rel = g[k + 1].abs() / beta;
        if let Some(sys) = sys {
            let y = back_substitute(&rcols, &g, k + 1);
            let mut x = vec![0.0; n];
            for (i, yi) in y.iter().enumerate() {
                axpy(*yi, &basis[i], &mut x);
            }
            rel = (rel * scale).min(sys.relres(&x));
        }
        relres.push(rel);

        let breakdown = hn <= 1e-14 * wnorm0.max(f64::MIN_POSITIVE) || hn == 0.0;
        if !breakdown {
            basis.push(w.iter().map(|x| x / hn).collect());
        }
        if relres[k + 1] <= tol {
            stop = if breakdown { StopReason::HappyBreakdown } else { StopReason::Converged };
            break;
        }
        if breakdown {
            stop = StopReason::Breakdown;
            break;
        }
    }

    let m = hcols.len();
    let y = back_substitute(&rcols, &g, m);
    let mut x = vec![0.0; n];
    for (i, yi) in y.iter().enumerate() {
        axpy(*yi, &basis[i], &mut x);
    }
    let converged = matches!(stop, StopReason::Converged | StopReason::HappyBreakdown);

    let mut hm = DenseMatrix::zeros(m + 1, m);
    for (j, col) in hcols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            hm[(i, j)] = *v;
        }
    }
    let v = DenseMatrix::from_columns(n, &basis)?;
    Ok(GmresOutput {
        x,
        history: ConvergenceHistory { label: String::new(), iterations: m, relres, converged, stop },
        arnoldi: ArnoldiData { v, h: hm, m },
    })
}

/// Solves R·y = g over the leading m entries of the rotated Hessenberg factor.
fn back_substitute(rcols: &[Vec<f64>], g: &[f64], m: usize) -> Vec<f64> {
    let mut y = g[..m].to_vec();
    for i in (0..m).rev() {
        let rii = rcols[i][i];
        if rii == 0.0 {
            y[i] = 0.0;
            continue;
        }
        y[i] /= rii;
        for j in 0..i {
            y[j] -= rcols[i][j] * y[i];
        }
    }
    y
}
