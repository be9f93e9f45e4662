//! Integer frequency lattice K_N^n: the tensor/vector index bijection, wrapped
//! index arithmetic, and frequency evaluation lambda = P k.
//!
//! The canonical window per axis is [-N_k/2, N_k/2). All public entry points
//! accept arbitrary integer indices and fold them into that window; flat
//! indices nest row-major with axis 1 outermost.

use crate::error::{QpError, Result};
use serde::{Deserialize, Serialize};

/// Per-axis truncation sizes N_1..N_n. Each size must be even and >= 2 so the
/// window [-N_k/2, N_k/2) is symmetric about zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeVector(Vec<usize>);

impl SizeVector {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(QpError::InvalidSizes("empty size vector".into()));
        }
        for &s in &sizes {
            if s < 2 || s % 2 != 0 {
                return Err(QpError::InvalidSizes(format!(
                    "axis size {s} must be an even integer >= 2"
                )));
            }
        }
        Ok(SizeVector(sizes))
    }

    /// Uniform size N along every one of `n` axes.
    pub fn uniform(n_axes: usize, size: usize) -> Result<Self> {
        SizeVector::new(vec![size; n_axes])
    }

    /// Number of lattice axes n.
    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn axis(&self, k: usize) -> usize {
        self.0[k]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Total number of lattice points D = prod N_k.
    pub fn total(&self) -> usize {
        self.0.iter().product()
    }
}

/// Integer tensor index into K_N^n. Components live on all of Z^n; folding to
/// the canonical window happens at the lattice operations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TensorIndex(pub Vec<i64>);

impl TensorIndex {
    pub fn new(components: Vec<i64>) -> Self {
        TensorIndex(components)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Componentwise fold into the canonical window [-N_k/2, N_k/2).
    pub fn fold(&self, sizes: &SizeVector) -> Result<TensorIndex> {
        check_rank(self, sizes)?;
        let folded = self
            .0
            .iter()
            .zip(sizes.as_slice())
            .map(|(&c, &n)| fold_component(c, n))
            .collect();
        Ok(TensorIndex(folded))
    }

    /// True when every component already lies in its canonical window.
    pub fn is_canonical(&self, sizes: &SizeVector) -> bool {
        self.0.len() == sizes.rank()
            && self
                .0
                .iter()
                .zip(sizes.as_slice())
                .all(|(&c, &n)| {
                    let h = n as i64 / 2;
                    -h <= c && c < h
                })
    }
}

fn fold_component(c: i64, n: usize) -> i64 {
    let n = n as i64;
    let r = c.rem_euclid(n);
    if r < n / 2 {
        r
    } else {
        r - n
    }
}

fn check_rank(idx: &TensorIndex, sizes: &SizeVector) -> Result<()> {
    if idx.rank() != sizes.rank() {
        return Err(QpError::DimensionMismatch {
            expected: sizes.rank(),
            got: idx.rank(),
        });
    }
    Ok(())
}

/// Flatten a tensor index: i = sum_k (i_k mod N_k) * prod_{t>k} N_t.
pub fn convert(idx: &TensorIndex, sizes: &SizeVector) -> Result<usize> {
    check_rank(idx, sizes)?;
    let mut flat: usize = 0;
    for (&c, &n) in idx.components().iter().zip(sizes.as_slice()) {
        let digit = c.rem_euclid(n as i64) as usize;
        flat = flat * n + digit;
    }
    Ok(flat)
}

/// Inverse of [`convert`]: recover the canonical tensor index of a flat index.
pub fn invert(flat: usize, sizes: &SizeVector) -> Result<TensorIndex> {
    let total = sizes.total();
    if flat >= total {
        return Err(QpError::IndexOutOfRange {
            index: flat,
            size: total,
        });
    }
    let n_axes = sizes.rank();
    let mut rem = flat;
    let mut out = vec![0i64; n_axes];
    for k in (0..n_axes).rev() {
        let n = sizes.axis(k);
        let digit = (rem % n) as i64;
        rem /= n;
        out[k] = fold_component(digit, n);
    }
    Ok(TensorIndex(out))
}

/// Componentwise wrapped difference (a - b) mod N, folded to the canonical
/// window.
pub fn wrap_diff(a: &TensorIndex, b: &TensorIndex, sizes: &SizeVector) -> Result<TensorIndex> {
    check_rank(a, sizes)?;
    check_rank(b, sizes)?;
    let diff = a
        .components()
        .iter()
        .zip(b.components())
        .zip(sizes.as_slice())
        .map(|((&x, &y), &n)| fold_component(x - y, n))
        .collect();
    Ok(TensorIndex(diff))
}

/// Frequency matrix P mapping integer lattice indices to quasiperiodic
/// frequencies lambda = P k. Stored row-major, d rows by n columns.
///
/// Q-linear independence of the columns is the caller's responsibility; it is
/// not decidable from floating-point entries. A rationally dependent column
/// set silently degrades the method to a periodic one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionMatrix {
    entries: Vec<f64>,
    d: usize,
    n: usize,
}

impl ProjectionMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let d = rows.len();
        if d == 0 {
            return Err(QpError::InvalidProjection("no rows".into()));
        }
        let n = rows[0].len();
        if n == 0 || d > n {
            return Err(QpError::InvalidProjection(format!(
                "need d <= n with n >= 1, got d={d}, n={n}"
            )));
        }
        let mut entries = Vec::with_capacity(d * n);
        for row in &rows {
            if row.len() != n {
                return Err(QpError::InvalidProjection("ragged rows".into()));
            }
            for &v in row {
                if !v.is_finite() {
                    return Err(QpError::InvalidProjection("non-finite entry".into()));
                }
            }
            entries.extend_from_slice(row);
        }
        for col in 0..n {
            if (0..d).all(|r| entries[r * n + col] == 0.0) {
                return Err(QpError::InvalidProjection(format!(
                    "column {col} is identically zero"
                )));
            }
        }
        Ok(ProjectionMatrix { entries, d, n })
    }

    /// Diagonal d = n matrix with the given axis frequencies.
    pub fn diagonal(freqs: &[f64]) -> Result<Self> {
        let n = freqs.len();
        let rows = (0..n)
            .map(|i| {
                let mut row = vec![0.0; n];
                row[i] = freqs[i];
                row
            })
            .collect();
        ProjectionMatrix::new(rows)
    }

    pub fn physical_dim(&self) -> usize {
        self.d
    }

    pub fn lattice_dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.n + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.entries[row * self.n..(row + 1) * self.n]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.d).map(|r| self.entry(r, col)).collect()
    }

    /// lambda = P k.
    pub fn frequency(&self, idx: &TensorIndex) -> Result<Vec<f64>> {
        if idx.rank() != self.n {
            return Err(QpError::DimensionMismatch {
                expected: self.n,
                got: idx.rank(),
            });
        }
        let mut out = vec![0.0; self.d];
        for (r, slot) in out.iter_mut().enumerate() {
            *slot = self
                .row(r)
                .iter()
                .zip(idx.components())
                .map(|(&p, &k)| p * k as f64)
                .sum();
        }
        Ok(out)
    }

    /// Horizontal concatenation of the inputs' columns with exact-duplicate
    /// columns removed. All inputs must share the physical dimension d; the
    /// caller remains responsible for rational independence of the result.
    pub fn merge(matrices: &[&ProjectionMatrix]) -> Result<ProjectionMatrix> {
        let first = matrices
            .first()
            .ok_or_else(|| QpError::InvalidProjection("merge of zero matrices".into()))?;
        let d = first.d;
        let mut columns: Vec<Vec<f64>> = Vec::new();
        for m in matrices {
            if m.d != d {
                return Err(QpError::DimensionMismatch {
                    expected: d,
                    got: m.d,
                });
            }
            for col in 0..m.n {
                let c = m.column(col);
                if !columns.contains(&c) {
                    columns.push(c);
                }
            }
        }
        let rows = (0..d)
            .map(|r| columns.iter().map(|c| c[r]).collect())
            .collect();
        ProjectionMatrix::new(rows)
    }
}

/// Precomputed per-flat-index data for one lattice: canonical components and
/// frequencies. Assembly and the transforms iterate this instead of calling
/// `invert` per entry.
#[derive(Debug, Clone)]
pub struct LatticeTable {
    pub sizes: SizeVector,
    /// Canonical components, D rows of n entries.
    pub indices: Vec<i64>,
    /// Frequencies lambda = P k, D rows of d entries.
    pub frequencies: Vec<f64>,
    pub d: usize,
    pub n: usize,
}

impl LatticeTable {
    pub fn build(sizes: &SizeVector, projection: &ProjectionMatrix) -> Result<Self> {
        if sizes.rank() != projection.lattice_dim() {
            return Err(QpError::DimensionMismatch {
                expected: projection.lattice_dim(),
                got: sizes.rank(),
            });
        }
        let total = sizes.total();
        let n = sizes.rank();
        let d = projection.physical_dim();
        let mut indices = vec![0i64; total * n];
        let mut frequencies = vec![0.0; total * d];
        let mut current = vec![0i64; n];
        for flat in 0..total {
            let mut rem = flat;
            for k in (0..n).rev() {
                let nk = sizes.axis(k);
                current[k] = fold_component((rem % nk) as i64, nk);
                rem /= nk;
            }
            indices[flat * n..(flat + 1) * n].copy_from_slice(&current);
            for r in 0..d {
                frequencies[flat * d + r] = projection
                    .row(r)
                    .iter()
                    .zip(&current)
                    .map(|(&p, &k)| p * k as f64)
                    .sum();
            }
        }
        Ok(LatticeTable {
            sizes: sizes.clone(),
            indices,
            frequencies,
            d,
            n,
        })
    }

    pub fn total(&self) -> usize {
        self.sizes.total()
    }

    pub fn index(&self, flat: usize) -> &[i64] {
        &self.indices[flat * self.n..(flat + 1) * self.n]
    }

    pub fn frequency(&self, flat: usize) -> &[f64] {
        &self.frequencies[flat * self.d..(flat + 1) * self.d]
    }
}
