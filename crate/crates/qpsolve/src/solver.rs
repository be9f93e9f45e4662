//! Diagonal preconditioner, the compressed PCG iteration, the dense baseline
//! used as its equivalence oracle, and condition-number estimation.
//!
//! The preconditioner is the diagonal matrix minimizing ||Q M - I||_F, whose
//! columns decouple into scalar quadratics with minimizer
//! M_jj = q_jj / ||Q e_j||^2. One solve is a sequential iteration; operator
//! applications reduce per row in a fixed order, so residual histories are
//! reproducible.

use crate::assembly::{CompressedStiffness, DenseStiffness, DEFAULT_DENSE_CAP};
use crate::error::{QpError, Result};
use nalgebra::{Complex, DMatrix};
use num_complex::Complex64;
use serde::Serialize;
use std::time::Instant;

/// Per-column scale factors M_jj = q_jj / ||Q e_j||^2; the zero mode carries
/// an inert scale of 1.
#[derive(Debug, Clone)]
pub struct DiagonalPreconditioner {
    scale: Vec<f64>,
    zero_mode: usize,
}

impl DiagonalPreconditioner {
    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    pub fn zero_mode(&self) -> usize {
        self.zero_mode
    }

    /// z = M r.
    pub fn apply(&self, r: &[Complex64]) -> Vec<Complex64> {
        r.iter().zip(&self.scale).map(|(v, &s)| v * s).collect()
    }
}

/// Build M from the compressed operator in one pass over stored entries,
/// O(gD). Errors on a zero diagonal entry away from the zero mode.
pub fn build_preconditioner(q: &CompressedStiffness) -> Result<DiagonalPreconditioner> {
    let diag = q.diagonal();
    let norms = q.column_squared_norms();
    let mut scale = vec![1.0; q.dim()];
    for j in 0..q.dim() {
        if j == q.zero_mode() {
            continue;
        }
        if norms[j] == 0.0 || diag[j] == Complex64::default() {
            return Err(QpError::SingularPreconditioner(j));
        }
        scale[j] = diag[j].re / norms[j];
    }
    Ok(DiagonalPreconditioner {
        scale,
        zero_mode: q.zero_mode(),
    })
}

/// Build M from a dense matrix; the validation lane's counterpart of
/// [`build_preconditioner`].
pub fn build_preconditioner_dense(q: &DenseStiffness) -> Result<DiagonalPreconditioner> {
    let dim = q.dim();
    let mut scale = vec![1.0; dim];
    for j in 0..dim {
        if j == q.zero_mode() {
            continue;
        }
        let mut norm = 0.0;
        for i in 0..dim {
            norm += q.entry(i, j).norm_sqr();
        }
        if norm == 0.0 {
            return Err(QpError::SingularPreconditioner(j));
        }
        scale[j] = q.entry(j, j).re / norm;
    }
    Ok(DiagonalPreconditioner {
        scale,
        zero_mode: q.zero_mode(),
    })
}

/// Stopping and bookkeeping knobs for one solve.
#[derive(Debug, Clone, Serialize)]
pub struct SolverConfig {
    /// Threshold on the true relative residual ||r||_2 / ||F||_2.
    pub rel_tol: f64,
    pub max_iter: usize,
    pub record_history: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            rel_tol: 1e-14,
            max_iter: 1000,
            record_history: true,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || self.max_iter == 0 {
            return Err(QpError::Config(
                "solver needs rel_tol > 0 and max_iter >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome of one solve: iteration count (number of alpha_j updates), the
/// recorded ||r_j||_2 sequence, wall time and the operator storage counter.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub wall_time: f64,
    pub peak_entry_count: usize,
    pub converged: bool,
}

/// Anything that can stand in for Q inside the iteration.
pub trait StiffnessOperator {
    fn dim(&self) -> usize;
    fn zero_mode(&self) -> usize;
    fn apply_op(&self, x: &[Complex64]) -> Result<Vec<Complex64>>;
    fn entry_count(&self) -> usize;
}

impl StiffnessOperator for CompressedStiffness {
    fn dim(&self) -> usize {
        CompressedStiffness::dim(self)
    }

    fn zero_mode(&self) -> usize {
        CompressedStiffness::zero_mode(self)
    }

    fn apply_op(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        self.apply(x)
    }

    fn entry_count(&self) -> usize {
        self.nnz()
    }
}

impl StiffnessOperator for DenseStiffness {
    fn dim(&self) -> usize {
        DenseStiffness::dim(self)
    }

    fn zero_mode(&self) -> usize {
        DenseStiffness::zero_mode(self)
    }

    fn apply_op(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut y = self.apply(x)?;
        y[self.zero_mode()] = Complex64::default();
        Ok(y)
    }

    fn entry_count(&self) -> usize {
        DenseStiffness::entry_count(self)
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    // conjugate-linear in the second argument
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Relative magnitude allowed for F at the zero mode before the solve is
/// declared incompatible with the mean-zero subspace.
pub const ZERO_MODE_COMPAT_TOL: f64 = 1e-10;

fn pcg_loop<O: StiffnessOperator + ?Sized>(
    op: &O,
    m: &DiagonalPreconditioner,
    f: &[Complex64],
    cfg: &SolverConfig,
    x0: &[Complex64],
) -> Result<(Vec<Complex64>, SolveReport)> {
    cfg.validate()?;
    let dim = op.dim();
    if f.len() != dim || x0.len() != dim || m.scale.len() != dim {
        return Err(QpError::DimensionMismatch {
            expected: dim,
            got: f.len().max(x0.len()),
        });
    }
    let zero = op.zero_mode();
    let norm_f = norm2(f);
    if f[zero].norm() > ZERO_MODE_COMPAT_TOL * norm_f.max(f64::MIN_POSITIVE) {
        return Err(QpError::ZeroModeIncompatible(f[zero].norm()));
    }
    let start = Instant::now();

    let mut u = x0.to_vec();
    u[zero] = Complex64::default();
    let qu = op.apply_op(&u)?;
    let mut r: Vec<Complex64> = f.iter().zip(&qu).map(|(a, b)| a - b).collect();
    r[zero] = Complex64::default();
    let mut history = Vec::new();
    if cfg.record_history {
        history.push(norm2(&r));
    }

    if norm_f == 0.0 {
        return Ok((
            vec![Complex64::default(); dim],
            SolveReport {
                iterations: 0,
                residual_history: history,
                wall_time: start.elapsed().as_secs_f64(),
                peak_entry_count: op.entry_count(),
                converged: true,
            },
        ));
    }

    let mut z = m.apply(&r);
    z[zero] = Complex64::default();
    let mut h = z.clone();
    let mut rz = dot(&r, &z);
    let mut iterations = 0;
    let mut converged = norm2(&r) <= cfg.rel_tol * norm_f;

    while !converged && iterations < cfg.max_iter {
        let mut qh = op.apply_op(&h)?;
        qh[zero] = Complex64::default();
        let hqh = dot(&qh, &h);
        let alpha = rz / hqh;
        if !alpha.is_finite() {
            return Err(QpError::Breakdown(iterations));
        }
        for i in 0..dim {
            u[i] += alpha * h[i];
            r[i] -= alpha * qh[i];
        }
        u[zero] = Complex64::default();
        r[zero] = Complex64::default();
        iterations += 1;
        let rnorm = norm2(&r);
        if cfg.record_history {
            history.push(rnorm);
        }
        if rnorm <= cfg.rel_tol * norm_f {
            converged = true;
            break;
        }
        z = m.apply(&r);
        z[zero] = Complex64::default();
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        if !beta.is_finite() {
            return Err(QpError::Breakdown(iterations));
        }
        rz = rz_new;
        for i in 0..dim {
            h[i] = z[i] + beta * h[i];
        }
    }

    Ok((
        u,
        SolveReport {
            iterations,
            residual_history: history,
            wall_time: start.elapsed().as_secs_f64(),
            peak_entry_count: op.entry_count(),
            converged,
        },
    ))
}

/// C-PCG: preconditioned conjugate gradients with every operator application
/// through the compressed triples. The solution component at the zero mode is
/// pinned to 0 each iteration, restricting the solve to the mean-zero
/// subspace.
pub fn cpcg_solve(
    q: &CompressedStiffness,
    m: &DiagonalPreconditioner,
    f: &[Complex64],
    cfg: &SolverConfig,
    x0: &[Complex64],
) -> Result<(Vec<Complex64>, SolveReport)> {
    pcg_loop(q, m, f, cfg, x0)
}

/// The identical iteration against a dense materialization; exists as the
/// operator-equivalence oracle. Refuses dimensions above `cap`.
pub fn pcg_dense_solve(
    q: &DenseStiffness,
    m: &DiagonalPreconditioner,
    f: &[Complex64],
    cfg: &SolverConfig,
    x0: &[Complex64],
    cap: Option<usize>,
) -> Result<(Vec<Complex64>, SolveReport)> {
    let cap = cap.unwrap_or(DEFAULT_DENSE_CAP);
    if q.dim() > cap {
        return Err(QpError::DenseCap { dim: q.dim(), cap });
    }
    pcg_loop(q, m, f, cfg, x0)
}

/// 2-norm condition number of the dense matrix (right-multiplied by M when
/// given), restricted to the rows and columns away from the zero mode: a
/// full singular-value decomposition up to dimension 4096, a Lanczos sweep
/// on the normal matrix for the extreme singular values above that.
pub fn estimate_condition(
    q: &DenseStiffness,
    m: Option<&DiagonalPreconditioner>,
) -> Result<f64> {
    let dim = q.dim();
    let keep: Vec<usize> = (0..dim).filter(|&i| i != q.zero_mode()).collect();
    let k = keep.len();
    let mut mat = DMatrix::<Complex<f64>>::zeros(k, k);
    for (ri, &row) in keep.iter().enumerate() {
        for (ci, &col) in keep.iter().enumerate() {
            let mut v = q.entry(row, col);
            if let Some(pre) = m {
                v *= pre.scale[col];
            }
            mat[(ri, ci)] = v;
        }
    }
    let (smax, smin) = if k <= 4096 {
        let svd = mat.svd(false, false);
        let (mut smax, mut smin) = (0.0f64, f64::INFINITY);
        for s in svd.singular_values.iter() {
            smax = smax.max(*s);
            smin = smin.min(*s);
        }
        (smax, smin)
    } else {
        extreme_singular_values_lanczos(&mat, 300)
    };
    if smin == 0.0 {
        return Err(QpError::SingularPreconditioner(0));
    }
    Ok(smax / smin)
}

/// Extreme singular values of a general square matrix by a Lanczos sweep on
/// the Hermitian normal matrix B = A^H A (eigenvalues sigma^2), with full
/// reorthogonalization. The extreme Ritz values of the tridiagonal converge
/// to both ends of the spectrum.
fn extreme_singular_values_lanczos(a: &DMatrix<Complex<f64>>, steps: usize) -> (f64, f64) {
    let n = a.nrows();
    let steps = steps.min(n);
    let normal_apply = |x: &nalgebra::DVector<Complex<f64>>| a.adjoint() * (a * x);

    // deterministic start vector
    let mut v = nalgebra::DVector::<Complex<f64>>::from_fn(n, |i, _| {
        Complex::new(((i + 1) as f64 * 0.7391).sin(), ((i + 1) as f64 * 1.177).cos())
    });
    v /= Complex::new(v.norm(), 0.0);
    let mut basis: Vec<nalgebra::DVector<Complex<f64>>> = vec![v.clone()];
    let mut alphas = Vec::new();
    let mut betas = Vec::new();
    let mut prev: Option<nalgebra::DVector<Complex<f64>>> = None;
    for j in 0..steps {
        let mut w = normal_apply(&basis[j]);
        if let Some(p) = &prev {
            w -= p * Complex::new(betas[j - 1], 0.0);
        }
        let alpha = basis[j].dotc(&w).re;
        alphas.push(alpha);
        w -= &basis[j] * Complex::new(alpha, 0.0);
        // full reorthogonalization keeps the Ritz ends trustworthy
        for b in &basis {
            let proj = b.dotc(&w);
            w -= b * proj;
        }
        let beta = w.norm();
        if beta < 1e-13 || j + 1 == steps {
            break;
        }
        betas.push(beta);
        w /= Complex::new(beta, 0.0);
        prev = Some(basis[j].clone());
        basis.push(w);
    }
    // eigenvalues of the small symmetric tridiagonal
    let k = alphas.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alphas[i];
        if i + 1 < k {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = nalgebra::SymmetricEigen::new(t);
    let (mut emax, mut emin) = (f64::NEG_INFINITY, f64::INFINITY);
    for e in eig.eigenvalues.iter() {
        emax = emax.max(*e);
        emin = emin.min(*e);
    }
    (emax.max(0.0).sqrt(), emin.max(0.0).sqrt())
}

/// Pairwise convergence orders kappa = ln(e1/e2) / ln(N2/N1) for consecutive
/// rows of (N, e_N) data.
pub fn convergence_order(errors: &[(usize, f64)]) -> Vec<f64> {
    errors
        .windows(2)
        .map(|w| {
            let (n1, e1) = w[0];
            let (n2, e2) = w[1];
            (e1 / e2).ln() / (n2 as f64 / n1 as f64).ln()
        })
        .collect()
}
