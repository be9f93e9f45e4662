//! Quasiperiodic homogenization for diagonal 2x2 coefficients: assemble and
//! solve the two corrector problems
//! -div(A (e_i + grad u_{e_i})) = 0 and evaluate the homogenized tensor A*
//! from spectral mean values.
//!
//! The corrector operator is the two-term sum Q = A^1 o W^1 + A^2 o W^2 with
//! W^i built from row i of the shared projection matrix. Only diagonal 2x2
//! coefficients are supported; general symmetric matrices are an extension
//! point.

use crate::assembly::{assemble_axis_terms, CompressedStiffness, DEFAULT_DROP_TOL};
use crate::error::{QpError, Result};
use crate::qpfield::SpectralField;
use crate::solver::{build_preconditioner, cpcg_solve, SolveReport, SolverConfig};
use num_complex::Complex64;
use serde::Serialize;

/// Diagonal coefficient matrix diag(alpha(x), beta(x)) on a shared d = 2
/// lattice. Both entries must be real-valued with positive mean.
#[derive(Debug, Clone)]
pub struct DiagonalCoefficient2D {
    alpha: SpectralField,
    beta: SpectralField,
}

impl DiagonalCoefficient2D {
    pub fn new(alpha: SpectralField, beta: SpectralField) -> Result<Self> {
        if alpha.sizes() != beta.sizes() || alpha.projection() != beta.projection() {
            return Err(QpError::FieldMismatch);
        }
        if alpha.projection().physical_dim() != 2 {
            return Err(QpError::DimensionMismatch {
                expected: 2,
                got: alpha.projection().physical_dim(),
            });
        }
        for f in [&alpha, &beta] {
            if !f.is_real_valued() {
                return Err(QpError::NotRealValued);
            }
            if f.mean_value().re <= 0.0 {
                return Err(QpError::EllipticityViolation(f.mean_value().re));
            }
        }
        Ok(DiagonalCoefficient2D { alpha, beta })
    }

    pub fn alpha(&self) -> &SpectralField {
        &self.alpha
    }

    pub fn beta(&self) -> &SpectralField {
        &self.beta
    }
}

/// Right-hand sides of the two corrector problems: f_1 = d alpha / d x_1,
/// f_2 = d beta / d x_2. Both have zero mean by construction.
pub fn corrector_rhs(coeff: &DiagonalCoefficient2D) -> Result<(SpectralField, SpectralField)> {
    Ok((
        coeff.alpha.gradient_spectrum(0)?,
        coeff.beta.gradient_spectrum(1)?,
    ))
}

/// Corrector stiffness operator Q = A^1 o W^1 + A^2 o W^2 in compressed form,
/// union sparsity of the two coefficient tensors.
pub fn assemble_corrector(coeff: &DiagonalCoefficient2D) -> Result<CompressedStiffness> {
    assemble_axis_terms(&[(&coeff.alpha, 0), (&coeff.beta, 1)], DEFAULT_DROP_TOL)
}

/// The two mean-zero corrector fields and their solve reports.
#[derive(Debug, Clone)]
pub struct CorrectorSolution {
    pub u_e1: SpectralField,
    pub u_e2: SpectralField,
    pub reports: [SolveReport; 2],
}

/// Two C-PCG solves sharing the operator and preconditioner.
pub fn solve_correctors(
    coeff: &DiagonalCoefficient2D,
    cfg: &SolverConfig,
) -> Result<CorrectorSolution> {
    let q = assemble_corrector(coeff)?;
    let m = build_preconditioner(&q)?;
    let (f1, f2) = corrector_rhs(coeff)?;
    let x0 = vec![Complex64::default(); q.dim()];
    let (u1, r1) = cpcg_solve(&q, &m, f1.coeffs(), cfg, &x0)?;
    let (u2, r2) = cpcg_solve(&q, &m, f2.coeffs(), cfg, &x0)?;
    let sizes = coeff.alpha.sizes().clone();
    let p = coeff.alpha.projection().clone();
    Ok(CorrectorSolution {
        u_e1: SpectralField::from_coeffs(u1, sizes.clone(), p.clone())?,
        u_e2: SpectralField::from_coeffs(u2, sizes, p)?,
        reports: [r1, r2],
    })
}

/// Homogenized 2x2 tensor.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HomogenizedTensor {
    pub entries: [[f64; 2]; 2],
}

impl HomogenizedTensor {
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }
}

/// Evaluate A* from the correctors. Each entry is the zero-mode coefficient
/// of the indicated pseudo-spectral product:
/// A*_11 = M{alpha (1 + d1 u_e1)}, A*_12 = M{alpha d1 u_e2},
/// A*_21 = M{beta d2 u_e1},        A*_22 = M{beta (1 + d2 u_e2)}.
pub fn homogenized_tensor(
    coeff: &DiagonalCoefficient2D,
    correctors: &CorrectorSolution,
) -> Result<HomogenizedTensor> {
    let mean_product = |a: &SpectralField, b: &SpectralField| -> Result<f64> {
        Ok(a.multiply(b)?.mean_value().re)
    };
    let d1u1 = correctors.u_e1.gradient_spectrum(0)?;
    let d1u2 = correctors.u_e2.gradient_spectrum(0)?;
    let d2u1 = correctors.u_e1.gradient_spectrum(1)?;
    let d2u2 = correctors.u_e2.gradient_spectrum(1)?;
    let a11 = mean_product(&coeff.alpha, &d1u1)? + coeff.alpha.mean_value().re;
    let a12 = mean_product(&coeff.alpha, &d1u2)?;
    let a21 = mean_product(&coeff.beta, &d2u1)?;
    let a22 = mean_product(&coeff.beta, &d2u2)? + coeff.beta.mean_value().re;
    Ok(HomogenizedTensor {
        entries: [[a11, a12], [a21, a22]],
    })
}
