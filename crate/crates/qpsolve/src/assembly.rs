//! Discrete stiffness operator Q = A o W in compressed triple form.
//!
//! A is the n-level block circulant matrix generated by the coefficient
//! tensor (A_ij = coefficient at the wrapped index difference k_V - k_U) and
//! W holds frequency inner products (P k_V)^T (P k_U). Only the coefficient
//! tensor and the index geometry are stored; W values are recomputed on the
//! fly from the saved tensor indices. Entries are grouped by row in ascending
//! column order so applications reduce in a fixed order.

use crate::error::{QpError, Result};
use crate::lattice::{LatticeTable, ProjectionMatrix, SizeVector};
use crate::qpfield::SpectralField;
use num_complex::Complex64;
use rayon::prelude::*;

/// Default relative drop tolerance deciding which coefficient modes generate
/// entries. Round-off noise in FFT output must not densify the operator.
pub const DEFAULT_DROP_TOL: f64 = 1e-14;

/// Default cap on dense materializations.
pub const DEFAULT_DENSE_CAP: usize = 65536;

/// One term of the operator: a coefficient tensor acting through either the
/// full frequency inner product or a single physical axis of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightAxes {
    /// W_ij = (P k_V)^T (P k_U), the scalar elliptic operator.
    All,
    /// W_ij = (P_axis k_V)(P_axis k_U), one row of P (corrector systems).
    Single(usize),
}

/// Sparse row-grouped triples of all nonzero entries of Q, plus the
/// generating geometry.
#[derive(Debug, Clone)]
pub struct CompressedStiffness {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<Complex64>,
    sizes: SizeVector,
    projection: ProjectionMatrix,
    /// Number of generating coefficient modes g (union over operator terms).
    coefficient_modes: usize,
    zero_mode: usize,
}

struct Piece {
    /// (components of m, coefficient) for every retained mode.
    modes: Vec<(Vec<i64>, Complex64)>,
    axes: WeightAxes,
}

fn retained_modes(
    field: &SpectralField,
    sizes: &SizeVector,
    drop_tol: f64,
) -> Vec<(Vec<i64>, Complex64)> {
    let max_abs = field
        .coeffs()
        .iter()
        .map(|c| c.norm())
        .fold(0.0f64, f64::max);
    let threshold = drop_tol * max_abs;
    let mut modes = Vec::new();
    for (flat, c) in field.coeffs().iter().enumerate() {
        if c.norm() > threshold {
            let idx = crate::lattice::invert(flat, sizes).expect("flat in range");
            modes.push((idx.components().to_vec(), *c));
        }
    }
    modes
}

fn assemble_pieces(
    sizes: &SizeVector,
    projection: &ProjectionMatrix,
    pieces: &[Piece],
) -> Result<CompressedStiffness> {
    let table = LatticeTable::build(sizes, projection)?;
    let total = sizes.total();
    let n = sizes.rank();
    let d = projection.physical_dim();
    let dims: Vec<i64> = sizes.as_slice().iter().map(|&x| x as i64).collect();

    let rows: Vec<Vec<(usize, Complex64)>> = (0..total)
        .into_par_iter()
        .map(|row| {
            if row == 0 {
                return Vec::new();
            }
            let ki = table.index(row);
            let lam_i = table.frequency(row);
            let mut entries: Vec<(usize, Complex64)> = Vec::new();
            for piece in pieces {
                for (m, coeff) in &piece.modes {
                    // column index of the coupled mode k_U = k_V - m, folded
                    let mut col = 0usize;
                    for t in 0..n {
                        let digit = (ki[t] - m[t]).rem_euclid(dims[t]) as usize;
                        col = col * sizes.axis(t) + digit;
                    }
                    if col == 0 {
                        continue;
                    }
                    let lam_j = table.frequency(col);
                    let w = match piece.axes {
                        WeightAxes::All => {
                            (0..d).map(|r| lam_i[r] * lam_j[r]).sum::<f64>()
                        }
                        WeightAxes::Single(axis) => lam_i[axis] * lam_j[axis],
                    };
                    if w == 0.0 {
                        continue;
                    }
                    entries.push((col, coeff * w));
                }
            }
            entries.sort_by_key(|&(c, _)| c);
            // merge duplicate columns contributed by different operator terms
            let mut merged: Vec<(usize, Complex64)> = Vec::with_capacity(entries.len());
            for (c, v) in entries {
                match merged.last_mut() {
                    Some((lc, lv)) if *lc == c => *lv += v,
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|&(_, v)| v != Complex64::default());
            merged
        })
        .collect();

    let mut row_ptr = Vec::with_capacity(total + 1);
    row_ptr.push(0);
    let nnz: usize = rows.iter().map(Vec::len).sum();
    let mut cols = Vec::with_capacity(nnz);
    let mut values = Vec::with_capacity(nnz);
    for row in rows {
        for (c, v) in row {
            cols.push(c);
            values.push(v);
        }
        row_ptr.push(cols.len());
    }

    let mut mode_union: Vec<&[i64]> = pieces
        .iter()
        .flat_map(|p| p.modes.iter().map(|(m, _)| m.as_slice()))
        .collect();
    mode_union.sort();
    mode_union.dedup();

    Ok(CompressedStiffness {
        row_ptr,
        cols,
        values,
        sizes: sizes.clone(),
        projection: projection.clone(),
        coefficient_modes: mode_union.len(),
        zero_mode: 0,
    })
}

/// Assemble the scalar operator from a real-valued elliptic coefficient.
/// Modes with |coefficient| <= drop_tol * max|coefficient| generate no
/// entries. O(gD) time and storage.
pub fn assemble_compressed(
    alpha: &SpectralField,
    drop_tol: f64,
) -> Result<CompressedStiffness> {
    if !alpha.is_real_valued() {
        return Err(QpError::NotRealValued);
    }
    let mean = alpha.mean_value();
    if mean.re <= 0.0 {
        return Err(QpError::EllipticityViolation(mean.re));
    }
    let piece = Piece {
        modes: retained_modes(alpha, alpha.sizes(), drop_tol),
        axes: WeightAxes::All,
    };
    assemble_pieces(alpha.sizes(), alpha.projection(), &[piece])
}

/// Assemble a sum of single-axis operator terms sharing one lattice:
/// Q = sum_t A^(t) o W^(t) with W^(t) from row `axis_t` of P.
pub fn assemble_axis_terms(
    terms: &[(&SpectralField, usize)],
    drop_tol: f64,
) -> Result<CompressedStiffness> {
    let (first, _) = terms
        .first()
        .ok_or_else(|| QpError::InvalidSizes("no operator terms".into()))?;
    for (f, axis) in terms {
        if f.sizes() != first.sizes() || f.projection() != first.projection() {
            return Err(QpError::FieldMismatch);
        }
        if *axis >= f.projection().physical_dim() {
            return Err(QpError::DimensionMismatch {
                expected: f.projection().physical_dim(),
                got: *axis,
            });
        }
        if !f.is_real_valued() {
            return Err(QpError::NotRealValued);
        }
        if f.mean_value().re <= 0.0 {
            return Err(QpError::EllipticityViolation(f.mean_value().re));
        }
    }
    let pieces: Vec<Piece> = terms
        .iter()
        .map(|(f, axis)| Piece {
            modes: retained_modes(f, f.sizes(), drop_tol),
            axes: WeightAxes::Single(*axis),
        })
        .collect();
    assemble_pieces(first.sizes(), first.projection(), &pieces)
}

impl CompressedStiffness {
    pub fn dim(&self) -> usize {
        self.sizes.total()
    }

    pub fn sizes(&self) -> &SizeVector {
        &self.sizes
    }

    pub fn projection(&self) -> &ProjectionMatrix {
        &self.projection
    }

    /// Number of stored triples.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Count of generating coefficient modes g.
    pub fn coefficient_modes(&self) -> usize {
        self.coefficient_modes
    }

    /// Flat index of the excluded k = 0 row/column.
    pub fn zero_mode(&self) -> usize {
        self.zero_mode
    }

    /// Iterate stored triples (row, col, value) grouped by row, columns
    /// ascending.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim()).flat_map(move |row| {
            (self.row_ptr[row]..self.row_ptr[row + 1])
                .map(move |e| (row, self.cols[e], self.values[e]))
        })
    }

    /// y = Q x through the stored triples; y at the zero mode is 0. O(gD).
    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.dim() {
            return Err(QpError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let mut y = vec![Complex64::default(); self.dim()];
        y.par_iter_mut().enumerate().for_each(|(row, slot)| {
            let mut acc = Complex64::default();
            for e in self.row_ptr[row]..self.row_ptr[row + 1] {
                acc += self.values[e] * x[self.cols[e]];
            }
            *slot = acc;
        });
        y[self.zero_mode] = Complex64::default();
        Ok(y)
    }

    /// Column data for the preconditioner: s_j = sum_i |Q_ij|^2, one pass
    /// over stored entries; s at the zero mode is 0.
    pub fn column_squared_norms(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.dim()];
        for (_, col, v) in self.entries() {
            s[col] += v.norm_sqr();
        }
        s[self.zero_mode] = 0.0;
        s
    }

    /// Diagonal entries q_jj (zero where no entry is stored).
    pub fn diagonal(&self) -> Vec<Complex64> {
        let mut diag = vec![Complex64::default(); self.dim()];
        for row in 0..self.dim() {
            let lo = self.row_ptr[row];
            let hi = self.row_ptr[row + 1];
            if let Ok(pos) = self.cols[lo..hi].binary_search(&row) {
                diag[row] = self.values[lo + pos];
            }
        }
        diag
    }
}

/// Fully materialized D x D operator for validation at small D.
#[derive(Debug, Clone)]
pub struct DenseStiffness {
    dim: usize,
    zero_mode: usize,
    data: Vec<Complex64>,
}

impl DenseStiffness {
    pub fn from_rows(data: Vec<Complex64>, dim: usize, zero_mode: usize) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(QpError::InvalidSizes(format!(
                "{} entries for a {dim} x {dim} matrix",
                data.len()
            )));
        }
        Ok(DenseStiffness {
            dim,
            zero_mode,
            data,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn zero_mode(&self) -> usize {
        self.zero_mode
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.dim {
            return Err(QpError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let y = (0..self.dim)
            .map(|row| {
                self.data[row * self.dim..(row + 1) * self.dim]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect();
        Ok(y)
    }

    /// Memory counter: number of stored complex entries.
    pub fn entry_count(&self) -> usize {
        self.data.len()
    }
}

/// Materialize Q = A o W entrywise. Intended for small D; refuses dimensions
/// above `cap` (pass `None` for the default 65536).
pub fn assemble_dense(
    alpha: &SpectralField,
    cap: Option<usize>,
) -> Result<DenseStiffness> {
    let cap = cap.unwrap_or(DEFAULT_DENSE_CAP);
    let total = alpha.sizes().total();
    if total > cap {
        return Err(QpError::DenseCap { dim: total, cap });
    }
    if !alpha.is_real_valued() {
        return Err(QpError::NotRealValued);
    }
    let sizes = alpha.sizes();
    let table = LatticeTable::build(sizes, alpha.projection())?;
    let n = sizes.rank();
    let d = alpha.projection().physical_dim();
    let dims: Vec<i64> = sizes.as_slice().iter().map(|&x| x as i64).collect();
    let mut data = vec![Complex64::default(); total * total];
    for row in 0..total {
        let ki = table.index(row);
        let lam_i = table.frequency(row);
        for col in 0..total {
            let kj = table.index(col);
            // coefficient at the wrapped difference k_V - k_U
            let mut flat = 0usize;
            for t in 0..n {
                let digit = (ki[t] - kj[t]).rem_euclid(dims[t]) as usize;
                flat = flat * sizes.axis(t) + digit;
            }
            let a = alpha.coeffs()[flat];
            let lam_j = table.frequency(col);
            let w: f64 = (0..d).map(|r| lam_i[r] * lam_j[r]).sum();
            data[row * total + col] = a * w;
        }
    }
    DenseStiffness::from_rows(data, total, 0)
}
