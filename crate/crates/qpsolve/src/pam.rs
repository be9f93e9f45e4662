//! Periodic approximation method (PAM) baseline: replace each irrational
//! frequency multiplier nu by the rational [L nu]/L on a cell of length L,
//! collocate with E = L * N points per axis, and measure the error against
//! the exact quasiperiodic solution on the cell.
//!
//! The accuracy floor of PAM is the Diophantine approximation error
//! max |L nu - [L nu]|; refining the grid past that floor does not help.

use crate::assembly::{assemble_compressed, CompressedStiffness, DEFAULT_DROP_TOL};
use crate::error::{QpError, Result};
use crate::lattice::{ProjectionMatrix, SizeVector, TensorIndex};
use crate::qpfield::{SpectralField, TermList};
use crate::solver::{build_preconditioner, cpcg_solve, SolveReport, SolverConfig};
use num_complex::Complex64;
use serde::Serialize;

/// Nearest-integer data for a batch of frequency multipliers at cell length L.
/// The nearest integer uses round-half-away-from-zero.
#[derive(Debug, Clone, Serialize)]
pub struct RationalApprox {
    pub cell_length: u64,
    pub frequencies: Vec<f64>,
    pub numerators: Vec<i64>,
    /// max over frequencies of |L nu - [L nu]|, in [0, 1/2].
    pub diophantine_error: f64,
}

pub fn rational_approx(frequencies: &[f64], cell_length: u64) -> RationalApprox {
    let l = cell_length as f64;
    let numerators: Vec<i64> = frequencies.iter().map(|nu| (l * nu).round() as i64).collect();
    let diophantine_error = frequencies
        .iter()
        .zip(&numerators)
        .map(|(nu, &h)| (l * nu - h as f64).abs())
        .fold(0.0f64, f64::max);
    RationalApprox {
        cell_length,
        frequencies: frequencies.to_vec(),
        numerators,
        diophantine_error,
    }
}

/// A quasiperiodic problem periodized onto the cell [0, L)^d: term
/// frequencies replaced by integer multiples h/L, carried on the integer
/// lattice with projection (2 pi / L) I_d.
#[derive(Debug, Clone)]
pub struct PeriodicProblem {
    pub alpha: TermList,
    pub exact: TermList,
    pub cell_length: u64,
    pub points_per_cell: usize,
    pub physical_dim: usize,
}

/// Periodize one term list: each term's frequency-multiplier vector
/// nu = (P k) / 2pi maps to the integer vector [L nu] on the PAM lattice.
/// Colliding terms are summed. Also reports the Diophantine error of the
/// periodization.
pub fn periodize(terms: &TermList, cell_length: u64) -> Result<(TermList, f64)> {
    let d = terms.projection().physical_dim();
    let tau = std::f64::consts::TAU;
    let l = cell_length as f64;
    let mut raw = Vec::with_capacity(terms.len());
    let mut dio = 0.0f64;
    for (k, c) in terms.terms() {
        let lambda = terms.projection().frequency(k)?;
        let mut h = Vec::with_capacity(d);
        for comp in &lambda {
            let nu = comp / tau;
            let rounded = (l * nu).round();
            dio = dio.max((l * nu - rounded).abs());
            h.push(rounded as i64);
        }
        raw.push((TensorIndex::new(h), *c));
    }
    let p_pam = ProjectionMatrix::diagonal(&vec![tau / l; d])?;
    Ok((TermList::new(p_pam, raw)?, dio))
}

/// Build the periodized problem for one (alpha, exact-solution) pair.
pub fn periodic_problem(
    alpha: &TermList,
    exact: &TermList,
    cell_length: u64,
    points_per_cell: usize,
) -> Result<PeriodicProblem> {
    let d = alpha.projection().physical_dim();
    if exact.projection().physical_dim() != d {
        return Err(QpError::FieldMismatch);
    }
    let (alpha_p, _) = periodize(alpha, cell_length)?;
    let (exact_p, _) = periodize(exact, cell_length)?;
    Ok(PeriodicProblem {
        alpha: alpha_p,
        exact: exact_p,
        cell_length,
        points_per_cell,
        physical_dim: d,
    })
}

impl PeriodicProblem {
    /// Grid points per axis, E = L * N.
    pub fn grid_points(&self) -> usize {
        self.cell_length as usize * self.points_per_cell
    }

    pub fn grid_sizes(&self) -> Result<SizeVector> {
        SizeVector::uniform(self.physical_dim, self.grid_points())
    }
}

/// Same Algorithm-1 pipeline on the periodic lattice: the projection is the
/// diagonal rational-frequency map (2 pi / L) I_d.
pub fn pam_discretize(problem: &PeriodicProblem) -> Result<CompressedStiffness> {
    let sizes = problem.grid_sizes()?;
    if !problem.alpha.fits_window(&sizes) {
        return Err(QpError::TermOutsideWindow(
            problem
                .alpha
                .terms()
                .iter()
                .map(|(k, _)| k.components().to_vec())
                .find(|k| !TensorIndex::new(k.clone()).is_canonical(&sizes))
                .unwrap_or_default(),
        ));
    }
    let alpha_field = SpectralField::fold_terms(&problem.alpha, &sizes)?;
    assemble_compressed(&alpha_field, DEFAULT_DROP_TOL)
}

/// Solve the periodized problem with C-PCG and measure the discrete L2 error
/// between the periodic numerical solution and the exact quasiperiodic
/// solution, sampled on the E^d grid of the centered cell [-L/2, L/2)^d.
pub fn pam_solve_and_error(
    problem: &PeriodicProblem,
    exact: &TermList,
    cfg: &SolverConfig,
) -> Result<(f64, SolveReport)> {
    let sizes = problem.grid_sizes()?;
    let q = pam_discretize(problem)?;
    let m = build_preconditioner(&q)?;
    let f_terms = TermList::manufacture_rhs(&problem.alpha, &problem.exact)?;
    let mut rhs = SpectralField::fold_terms(&f_terms, &sizes)?;
    // data projected onto the mean-zero subspace the solve lives on
    rhs.coeffs_mut()[0] = Complex64::default();
    let x0 = vec![Complex64::default(); q.dim()];
    let (solution, report) = cpcg_solve(&q, &m, rhs.coeffs(), cfg, &x0)?;
    let solution_field =
        SpectralField::from_coeffs(solution, sizes.clone(), problem.alpha.projection().clone())?;

    let e = grid_error_vs_exact(&solution_field, exact, problem.cell_length)?;
    Ok((e, report))
}

/// sqrt((1/E^d) sum_j |u_p(x_j) - u(x_j)|^2) over the centered cell grid.
/// The periodic solution values come from one inverse transform; the exact
/// quasiperiodic solution is evaluated term by term at the physical points.
pub fn grid_error_vs_exact(
    periodic: &SpectralField,
    exact: &TermList,
    cell_length: u64,
) -> Result<f64> {
    let sizes = periodic.sizes().clone();
    let d = periodic.projection().physical_dim();
    if exact.projection().physical_dim() != d {
        return Err(QpError::FieldMismatch);
    }
    let e_axis = sizes.axis(0);
    for t in 0..sizes.rank() {
        if sizes.axis(t) != e_axis {
            return Err(QpError::InvalidSizes(
                "PAM grid must be uniform across axes".into(),
            ));
        }
    }
    let grid = periodic.dfb_inverse();
    let l = cell_length as f64;
    let total = sizes.total();
    let half = (e_axis / 2) as i64;

    // exact values evaluated with phases per frequency, factored per axis
    // to keep the sweep at O(total * terms)
    let mut acc = 0.0;
    let mut digits = vec![0usize; d];
    for flat in 0..total {
        // decompose flat into grid digits (row-major, last axis fastest)
        let mut rem = flat;
        for t in (0..d).rev() {
            digits[t] = rem % e_axis;
            rem /= e_axis;
        }
        // centered cell: shift digit j >= E/2 down by E
        let mut x = vec![0.0; d];
        for t in 0..d {
            let j = digits[t] as i64;
            let centered = if j >= half { j - e_axis as i64 } else { j };
            x[t] = l * centered as f64 / e_axis as f64;
        }
        let exact_v = exact.evaluate(&x)?;
        let diff = grid.values()[flat] - exact_v;
        acc += diff.norm_sqr();
    }
    Ok((acc / total as f64).sqrt())
}
