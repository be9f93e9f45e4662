//! Quasiperiodic functions through their n-dimensional parent-function
//! Fourier coefficients: symbolic term lists, grid sampling, the discrete
//! Fourier-Bohr transforms, and spectral calculus.
//!
//! A quasiperiodic f(x) = F(P^T x) is carried either as a [`TermList`]
//! (sparse symbolic modes on Z^n, exact) or as a [`SpectralField`] (dense
//! coefficients on the truncated window K_N^n). Products of fields are
//! pseudo-spectral: inverse transform, pointwise multiply, forward transform,
//! with the wraparound aliasing inherent to the truncation.

use crate::error::{QpError, Result};
use crate::fft::ndfft_in_place;
use crate::lattice::{convert, LatticeTable, ProjectionMatrix, SizeVector, TensorIndex};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Sparse list of Fourier-Bohr modes: coefficient c_k at integer index k,
/// frequency lambda = P k. Indices are exact and unbounded; they are only
/// folded when a term list is placed on a finite lattice.
#[derive(Debug, Clone)]
pub struct TermList {
    projection: ProjectionMatrix,
    terms: Vec<(TensorIndex, Complex64)>,
    real_valued: bool,
}

const REAL_SYMMETRY_TOL: f64 = 1e-12;

impl TermList {
    /// Build from raw (index, coefficient) pairs. Duplicate indices are
    /// summed, exact-zero coefficients dropped, and the result sorted for
    /// determinism. The real-valued flag is detected from conjugate symmetry
    /// c(-k) = conj(c(k)).
    pub fn new(
        projection: ProjectionMatrix,
        raw: Vec<(TensorIndex, Complex64)>,
    ) -> Result<Self> {
        let n = projection.lattice_dim();
        let mut map: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
        for (idx, c) in raw {
            if idx.rank() != n {
                return Err(QpError::DimensionMismatch {
                    expected: n,
                    got: idx.rank(),
                });
            }
            *map.entry(idx.components().to_vec()).or_default() += c;
        }
        let terms: Vec<(TensorIndex, Complex64)> = map
            .into_iter()
            .filter(|&(_, c)| c != Complex64::default())
            .map(|(k, c)| (TensorIndex::new(k), c))
            .collect();
        let mut list = TermList {
            projection,
            terms,
            real_valued: false,
        };
        list.real_valued = list.check_conjugate_symmetry(REAL_SYMMETRY_TOL);
        Ok(list)
    }

    pub fn constant(projection: ProjectionMatrix, value: Complex64) -> Result<Self> {
        let n = projection.lattice_dim();
        TermList::new(projection, vec![(TensorIndex::new(vec![0; n]), value)])
    }

    /// amplitude * cos(lambda_k . x) as the conjugate mode pair at +-k.
    pub fn cosine(projection: ProjectionMatrix, k: Vec<i64>, amplitude: f64) -> Result<Self> {
        let half = Complex64::new(amplitude / 2.0, 0.0);
        let neg: Vec<i64> = k.iter().map(|&c| -c).collect();
        TermList::new(
            projection,
            vec![(TensorIndex::new(k), half), (TensorIndex::new(neg), half)],
        )
    }

    /// amplitude * sin(lambda_k . x) as the mode pair with -+i/2 coefficients.
    pub fn sine(projection: ProjectionMatrix, k: Vec<i64>, amplitude: f64) -> Result<Self> {
        let c = Complex64::new(0.0, -amplitude / 2.0);
        let neg: Vec<i64> = k.iter().map(|&c| -c).collect();
        TermList::new(
            projection,
            vec![(TensorIndex::new(k), c), (TensorIndex::new(neg), -c)],
        )
    }

    pub fn projection(&self) -> &ProjectionMatrix {
        &self.projection
    }

    pub fn terms(&self) -> &[(TensorIndex, Complex64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_real_valued(&self) -> bool {
        self.real_valued
    }

    fn check_conjugate_symmetry(&self, tol: f64) -> bool {
        let map: BTreeMap<&[i64], Complex64> = self
            .terms
            .iter()
            .map(|(k, c)| (k.components(), *c))
            .collect();
        let scale = self
            .terms
            .iter()
            .map(|(_, c)| c.norm())
            .fold(0.0f64, f64::max)
            .max(1.0);
        self.terms.iter().all(|(k, c)| {
            let neg: Vec<i64> = k.components().iter().map(|&x| -x).collect();
            match map.get(neg.as_slice()) {
                Some(cn) => (cn.conj() - c).norm() <= tol * scale,
                None => c.norm() <= tol * scale,
            }
        })
    }

    pub fn add(&self, other: &TermList) -> Result<TermList> {
        if self.projection != other.projection {
            return Err(QpError::FieldMismatch);
        }
        let mut raw: Vec<(TensorIndex, Complex64)> = self.terms.clone();
        raw.extend(other.terms.iter().cloned());
        TermList::new(self.projection.clone(), raw)
    }

    pub fn scale(&self, factor: Complex64) -> TermList {
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| (k.clone(), c * factor))
            .filter(|&(_, c)| c != Complex64::default())
            .collect();
        TermList {
            projection: self.projection.clone(),
            terms,
            real_valued: self.real_valued && factor.im == 0.0,
        }
    }

    /// Termwise d/dx_axis: coefficient picks up i (P k)_axis. `axis` is the
    /// 0-based physical axis.
    pub fn gradient(&self, axis: usize) -> Result<TermList> {
        if axis >= self.projection.physical_dim() {
            return Err(QpError::DimensionMismatch {
                expected: self.projection.physical_dim(),
                got: axis,
            });
        }
        let raw = self
            .terms
            .iter()
            .map(|(k, c)| {
                let lam = self.projection.frequency(k)?;
                Ok((k.clone(), c * Complex64::new(0.0, lam[axis])))
            })
            .collect::<Result<Vec<_>>>()?;
        TermList::new(self.projection.clone(), raw)
    }

    /// Exact product: convolution with index addition on Z^n (no wrap).
    pub fn convolve(&self, other: &TermList) -> Result<TermList> {
        if self.projection != other.projection {
            return Err(QpError::FieldMismatch);
        }
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let sum: Vec<i64> = ka
                    .components()
                    .iter()
                    .zip(kb.components())
                    .map(|(a, b)| a + b)
                    .collect();
                raw.push((TensorIndex::new(sum), ca * cb));
            }
        }
        TermList::new(self.projection.clone(), raw)
    }

    /// Exact right-hand side f = -div(alpha grad u) = -sum_axis
    /// d_axis(alpha * d_axis u), computed termwise on Z^n.
    pub fn manufacture_rhs(alpha: &TermList, u: &TermList) -> Result<TermList> {
        if alpha.projection != u.projection {
            return Err(QpError::FieldMismatch);
        }
        let d = alpha.projection.physical_dim();
        let mut f = TermList::new(alpha.projection.clone(), Vec::new())?;
        for axis in 0..d {
            let flux = alpha.convolve(&u.gradient(axis)?)?;
            f = f.add(&flux.gradient(axis)?.scale(Complex64::new(-1.0, 0.0)))?;
        }
        Ok(f)
    }

    /// Direct evaluation sum_k c_k e^{i (P k) . x}.
    pub fn evaluate(&self, x: &[f64]) -> Result<Complex64> {
        if x.len() != self.projection.physical_dim() {
            return Err(QpError::DimensionMismatch {
                expected: self.projection.physical_dim(),
                got: x.len(),
            });
        }
        let mut acc = Complex64::default();
        for (k, c) in &self.terms {
            let lam = self.projection.frequency(k)?;
            let phase: f64 = lam.iter().zip(x).map(|(l, xi)| l * xi).sum();
            acc += c * Complex64::from_polar(1.0, phase);
        }
        Ok(acc)
    }

    /// Mean value: the k = 0 coefficient.
    pub fn mean(&self) -> Complex64 {
        self.terms
            .iter()
            .find(|(k, _)| k.is_zero())
            .map(|&(_, c)| c)
            .unwrap_or_default()
    }

    /// Drop the k = 0 term (fix the additive constant of a solution).
    pub fn without_mean(&self) -> TermList {
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| !k.is_zero())
            .cloned()
            .collect();
        TermList {
            projection: self.projection.clone(),
            terms,
            real_valued: self.real_valued,
        }
    }

    /// Largest absolute index component over all terms.
    pub fn max_abs_component(&self) -> i64 {
        self.terms
            .iter()
            .flat_map(|(k, _)| k.components().iter().map(|c| c.abs()))
            .max()
            .unwrap_or(0)
    }

    /// True when every index fits the canonical window of `sizes`.
    pub fn fits_window(&self, sizes: &SizeVector) -> bool {
        self.terms.iter().all(|(k, _)| k.is_canonical(sizes))
    }
}

/// Complex samples of a parent function on the uniform torus grid T_N^n,
/// row-major with the last axis contiguous.
#[derive(Debug, Clone)]
pub struct ParentGrid {
    values: Vec<Complex64>,
    sizes: SizeVector,
}

impl ParentGrid {
    pub fn new(values: Vec<Complex64>, sizes: SizeVector) -> Result<Self> {
        if values.len() != sizes.total() {
            return Err(QpError::InvalidSizes(format!(
                "grid holds {} samples but sizes give D = {}",
                values.len(),
                sizes.total()
            )));
        }
        Ok(ParentGrid { values, sizes })
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn sizes(&self) -> &SizeVector {
        &self.sizes
    }
}

/// Sample a term list on the torus grid: F(y_j) = sum c_k e^{i k . y_j}.
/// Every index must already lie inside the truncation window; out-of-window
/// terms would alias silently and are rejected.
pub fn sample(terms: &TermList, sizes: &SizeVector) -> Result<ParentGrid> {
    for (k, _) in terms.terms() {
        if k.rank() != sizes.rank() {
            return Err(QpError::DimensionMismatch {
                expected: sizes.rank(),
                got: k.rank(),
            });
        }
        if !k.is_canonical(sizes) {
            return Err(QpError::TermOutsideWindow(k.components().to_vec()));
        }
    }
    // place coefficients, then one inverse transform
    let field = SpectralField::fold_terms(terms, sizes)?;
    Ok(field.dfb_inverse())
}

/// Dense complex coefficient tensor over the truncated lattice K_N^n,
/// identified with the Fourier-Bohr coefficients at frequencies P k.
#[derive(Debug, Clone)]
pub struct SpectralField {
    coeffs: Vec<Complex64>,
    sizes: SizeVector,
    projection: ProjectionMatrix,
    real_valued: bool,
}

impl SpectralField {
    pub fn zeros(sizes: SizeVector, projection: ProjectionMatrix) -> Result<Self> {
        if sizes.rank() != projection.lattice_dim() {
            return Err(QpError::DimensionMismatch {
                expected: projection.lattice_dim(),
                got: sizes.rank(),
            });
        }
        let total = sizes.total();
        Ok(SpectralField {
            coeffs: vec![Complex64::default(); total],
            sizes,
            projection,
            real_valued: true,
        })
    }

    pub fn from_coeffs(
        coeffs: Vec<Complex64>,
        sizes: SizeVector,
        projection: ProjectionMatrix,
    ) -> Result<Self> {
        if coeffs.len() != sizes.total() {
            return Err(QpError::InvalidSizes(format!(
                "{} coefficients for D = {}",
                coeffs.len(),
                sizes.total()
            )));
        }
        if sizes.rank() != projection.lattice_dim() {
            return Err(QpError::DimensionMismatch {
                expected: projection.lattice_dim(),
                got: sizes.rank(),
            });
        }
        let mut f = SpectralField {
            coeffs,
            sizes,
            projection,
            real_valued: false,
        };
        f.real_valued = f.is_conjugate_symmetric(REAL_SYMMETRY_TOL);
        Ok(f)
    }

    /// Discrete coefficients of the grid sampling of a term list: indices are
    /// folded mod N into the window and colliding coefficients summed. For
    /// in-window lists this equals `dfb_forward(sample(..))` exactly; for
    /// wider lists it reproduces the aliasing a grid sampling incurs.
    pub fn fold_terms(terms: &TermList, sizes: &SizeVector) -> Result<Self> {
        let mut field = SpectralField::zeros(sizes.clone(), terms.projection().clone())?;
        for (k, c) in terms.terms() {
            let folded = k.fold(sizes)?;
            let flat = convert(&folded, sizes)?;
            field.coeffs[flat] += c;
        }
        field.real_valued = terms.is_real_valued();
        Ok(field)
    }

    /// Forward discrete Fourier-Bohr transform: coefficients of the parent
    /// samples, F_k = (1/D) sum_j F(y_j) e^{-i k . y_j}.
    pub fn dfb_forward(grid: &ParentGrid, projection: &ProjectionMatrix) -> Result<Self> {
        if grid.sizes().rank() != projection.lattice_dim() {
            return Err(QpError::DimensionMismatch {
                expected: projection.lattice_dim(),
                got: grid.sizes().rank(),
            });
        }
        let mut coeffs = grid.values().to_vec();
        ndfft_in_place(&mut coeffs, grid.sizes().as_slice(), false);
        let scale = 1.0 / grid.sizes().total() as f64;
        for c in &mut coeffs {
            *c *= scale;
        }
        let mut f = SpectralField {
            coeffs,
            sizes: grid.sizes().clone(),
            projection: projection.clone(),
            real_valued: false,
        };
        f.real_valued = f.is_conjugate_symmetric(REAL_SYMMETRY_TOL);
        Ok(f)
    }

    /// Inverse transform back to parent samples f(y_j) = sum_k F_k e^{i k . y_j}.
    pub fn dfb_inverse(&self) -> ParentGrid {
        let mut values = self.coeffs.clone();
        ndfft_in_place(&mut values, self.sizes.as_slice(), true);
        ParentGrid {
            values,
            sizes: self.sizes.clone(),
        }
    }

    pub fn sizes(&self) -> &SizeVector {
        &self.sizes
    }

    pub fn projection(&self) -> &ProjectionMatrix {
        &self.projection
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn coeff(&self, idx: &TensorIndex) -> Result<Complex64> {
        let folded = idx.fold(&self.sizes)?;
        Ok(self.coeffs[convert(&folded, &self.sizes)?])
    }

    pub fn is_real_valued(&self) -> bool {
        self.real_valued
    }

    pub fn set_real_valued(&mut self, flag: bool) {
        self.real_valued = flag;
    }

    /// Conjugate symmetry coeff(-k) = conj(coeff(k)) within `tol`, skipping
    /// components pinned at the unpaired -N/2 boundary.
    pub fn is_conjugate_symmetric(&self, tol: f64) -> bool {
        let scale = self
            .coeffs
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max)
            .max(1.0);
        let total = self.sizes.total();
        for flat in 0..total {
            let idx = crate::lattice::invert(flat, &self.sizes).expect("flat in range");
            if idx
                .components()
                .iter()
                .zip(self.sizes.as_slice())
                .any(|(&c, &n)| c == -(n as i64) / 2)
            {
                continue; // unpaired Nyquist component
            }
            let neg = TensorIndex::new(idx.components().iter().map(|&c| -c).collect());
            let other = self.coeffs[convert(&neg, &self.sizes).expect("in window")];
            if (other.conj() - self.coeffs[flat]).norm() > tol * scale {
                return false;
            }
        }
        true
    }

    /// Direct evaluation sum_k F_k e^{i (P k) . x}; O(D) per point.
    pub fn evaluate_at(&self, x: &[f64]) -> Result<Complex64> {
        if x.len() != self.projection.physical_dim() {
            return Err(QpError::DimensionMismatch {
                expected: self.projection.physical_dim(),
                got: x.len(),
            });
        }
        let table = LatticeTable::build(&self.sizes, &self.projection)?;
        let d = self.projection.physical_dim();
        let mut acc = Complex64::default();
        for (flat, c) in self.coeffs.iter().enumerate() {
            if *c == Complex64::default() {
                continue;
            }
            let lam = &table.frequencies[flat * d..(flat + 1) * d];
            let phase: f64 = lam.iter().zip(x).map(|(l, xi)| l * xi).sum();
            acc += c * Complex64::from_polar(1.0, phase);
        }
        Ok(acc)
    }

    /// Mean value M{f}: the k = 0 coefficient.
    pub fn mean_value(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// L2_QP norm via Parseval: sqrt(sum |F_k|^2).
    pub fn qp_norm_l2(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Coefficientwise d/dx_axis: multiply by i (P k)_axis. `axis` is the
    /// 0-based physical axis.
    pub fn gradient_spectrum(&self, axis: usize) -> Result<Self> {
        let d = self.projection.physical_dim();
        if axis >= d {
            return Err(QpError::DimensionMismatch {
                expected: d,
                got: axis,
            });
        }
        let table = LatticeTable::build(&self.sizes, &self.projection)?;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(flat, c)| c * Complex64::new(0.0, table.frequencies[flat * d + axis]))
            .collect();
        Ok(SpectralField {
            coeffs,
            sizes: self.sizes.clone(),
            projection: self.projection.clone(),
            real_valued: false,
        })
    }

    /// Pseudo-spectral product: inverse transform, pointwise multiply,
    /// forward transform. Aliasing from the N-truncation is kept (no 3/2
    /// rule); the discrete scheme is defined with wrapped indices.
    pub fn multiply(&self, other: &SpectralField) -> Result<Self> {
        if self.sizes != other.sizes || self.projection != other.projection {
            return Err(QpError::FieldMismatch);
        }
        let a = self.dfb_inverse();
        let b = other.dfb_inverse();
        let values: Vec<Complex64> = a
            .values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| x * y)
            .collect();
        let grid = ParentGrid {
            values,
            sizes: self.sizes.clone(),
        };
        SpectralField::dfb_forward(&grid, &self.projection)
    }

    /// f = -div(alpha grad u) = -sum_axis d_axis(alpha * d_axis u) built from
    /// `gradient_spectrum` and `multiply` on the shared lattice.
    pub fn manufacture_rhs(alpha: &SpectralField, u: &SpectralField) -> Result<Self> {
        if alpha.sizes != u.sizes || alpha.projection != u.projection {
            return Err(QpError::FieldMismatch);
        }
        let d = alpha.projection.physical_dim();
        let mut f = SpectralField::zeros(alpha.sizes.clone(), alpha.projection.clone())?;
        for axis in 0..d {
            let flux = alpha.multiply(&u.gradient_spectrum(axis)?)?;
            let div_part = flux.gradient_spectrum(axis)?;
            for (acc, v) in f.coeffs.iter_mut().zip(div_part.coeffs) {
                *acc -= v;
            }
        }
        f.real_valued = f.is_conjugate_symmetric(REAL_SYMMETRY_TOL);
        Ok(f)
    }

    /// Discrete L2 distance to the grid representation of an exact term list
    /// (coefficients folded onto this lattice). With `exclude_zero_mode` the
    /// k = 0 coefficients of both sides are ignored, comparing mean-zero
    /// representatives.
    pub fn error_vs_terms(&self, exact: &TermList, exclude_zero_mode: bool) -> Result<f64> {
        let reference = SpectralField::fold_terms(exact, &self.sizes)?;
        let mut acc = 0.0;
        for (flat, (a, b)) in self.coeffs.iter().zip(&reference.coeffs).enumerate() {
            if exclude_zero_mode && flat == 0 {
                continue;
            }
            acc += (a - b).norm_sqr();
        }
        Ok(acc.sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::SizeVector;

    fn p_1d() -> ProjectionMatrix {
        let two_pi = std::f64::consts::TAU;
        ProjectionMatrix::new(vec![vec![two_pi, two_pi * 2f64.sqrt()]]).unwrap()
    }

    /// alpha_1 = cos(2 pi x) + cos(2 pi sqrt2 x) + 6 on the d=1 lattice.
    fn alpha1() -> TermList {
        let p = p_1d();
        TermList::constant(p.clone(), Complex64::new(6.0, 0.0))
            .unwrap()
            .add(&TermList::cosine(p.clone(), vec![1, 0], 1.0).unwrap())
            .unwrap()
            .add(&TermList::cosine(p, vec![0, 1], 1.0).unwrap())
            .unwrap()
    }

    /// u_1 = sin(2 pi x) + sin(2 pi sqrt2 x).
    fn u1() -> TermList {
        let p = p_1d();
        TermList::sine(p.clone(), vec![1, 0], 1.0)
            .unwrap()
            .add(&TermList::sine(p, vec![0, 1], 1.0).unwrap())
            .unwrap()
    }

    #[test]
    fn sample_empty_and_pure_mode() {
        let p = p_1d();
        let sizes = SizeVector::new(vec![4]).unwrap();
        let p1 = ProjectionMatrix::new(vec![vec![std::f64::consts::TAU]]).unwrap();
        let empty = TermList::new(p.clone(), vec![]).unwrap();
        let g = sample(&empty, &SizeVector::new(vec![4, 4]).unwrap()).unwrap();
        assert!(g.values().iter().all(|v| *v == Complex64::default()));

        let mode = TermList::new(
            p1,
            vec![(TensorIndex::new(vec![1]), Complex64::new(1.0, 0.0))],
        )
        .unwrap();
        let g = sample(&mode, &sizes).unwrap();
        for (j, v) in g.values().iter().enumerate() {
            let want = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / 4.0);
            assert!((v - want).norm() < 1e-14);
        }
    }

    #[test]
    fn sample_rejects_out_of_window() {
        let p = p_1d();
        let sizes = SizeVector::new(vec![4, 4]).unwrap();
        let t = TermList::new(
            p,
            vec![(TensorIndex::new(vec![2, 0]), Complex64::new(1.0, 0.0))],
        )
        .unwrap();
        assert!(matches!(
            sample(&t, &sizes),
            Err(QpError::TermOutsideWindow(_))
        ));
    }

    #[test]
    fn forward_recovers_alpha1_coefficients() {
        let sizes = SizeVector::new(vec![8, 8]).unwrap();
        let g = sample(&alpha1(), &sizes).unwrap();
        let f = SpectralField::dfb_forward(&g, &p_1d()).unwrap();
        assert!((f.coeff(&TensorIndex::new(vec![0, 0])).unwrap() - 6.0).norm() < 1e-13);
        assert!((f.coeff(&TensorIndex::new(vec![1, 0])).unwrap() - 0.5).norm() < 1e-13);
        assert!((f.coeff(&TensorIndex::new(vec![0, -1])).unwrap() - 0.5).norm() < 1e-13);
        assert!(f.coeff(&TensorIndex::new(vec![2, 1])).unwrap().norm() < 1e-13);
        assert!(f.is_real_valued());
    }

    #[test]
    fn constant_grid_transforms_to_delta() {
        let sizes = SizeVector::new(vec![4, 4]).unwrap();
        let c = Complex64::new(0.3, -1.2);
        let g = ParentGrid::new(vec![c; 16], sizes).unwrap();
        let f = SpectralField::dfb_forward(&g, &p_1d()).unwrap();
        assert!((f.coeffs()[0] - c).norm() < 1e-14);
        assert!(f.coeffs()[1..].iter().all(|v| v.norm() < 1e-14));
    }

    #[test]
    fn evaluate_examples() {
        let sizes = SizeVector::new(vec![8, 8]).unwrap();
        let zero = SpectralField::zeros(sizes.clone(), p_1d()).unwrap();
        assert_eq!(zero.evaluate_at(&[0.37]).unwrap(), Complex64::default());

        let a = SpectralField::fold_terms(&alpha1(), &sizes).unwrap();
        assert!((a.evaluate_at(&[0.0]).unwrap().re - 8.0).abs() < 1e-12);

        let u = SpectralField::fold_terms(&u1(), &sizes).unwrap();
        for &x in &[0.1234, -2.71, 5.5] {
            let want = (std::f64::consts::TAU * x).sin()
                + (std::f64::consts::TAU * 2f64.sqrt() * x).sin();
            let got = u.evaluate_at(&[x]).unwrap();
            assert!((got.re - want).abs() < 1e-12 && got.im.abs() < 1e-12);
        }
    }

    #[test]
    fn mean_and_norm_examples() {
        let sizes = SizeVector::new(vec![8, 8]).unwrap();
        let u = SpectralField::fold_terms(&u1(), &sizes).unwrap();
        assert!(u.mean_value().norm() < 1e-15);
        let a = SpectralField::fold_terms(&alpha1(), &sizes).unwrap();
        assert!((a.mean_value().re - 6.0).abs() < 1e-15);
        // ||u1|| = sqrt(4 * (1/2)^2) = 1
        assert!((u.qp_norm_l2() - 1.0).abs() < 1e-13);
        // scaling
        let scaled = SpectralField::from_coeffs(
            a.coeffs().iter().map(|c| c * 3.0).collect(),
            sizes,
            p_1d(),
        )
        .unwrap();
        assert!((scaled.mean_value().re - 18.0).abs() < 1e-13);
    }

    #[test]
    fn gradient_examples() {
        let sizes = SizeVector::new(vec![8, 8]).unwrap();
        let c = SpectralField::fold_terms(
            &TermList::constant(p_1d(), Complex64::new(2.5, 0.0)).unwrap(),
            &sizes,
        )
        .unwrap();
        let dc = c.gradient_spectrum(0).unwrap();
        assert!(dc.qp_norm_l2() < 1e-15);

        let delta = SpectralField::fold_terms(
            &TermList::new(
                p_1d(),
                vec![(TensorIndex::new(vec![1, 0]), Complex64::new(1.0, 0.0))],
            )
            .unwrap(),
            &sizes,
        )
        .unwrap();
        let dd = delta.gradient_spectrum(0).unwrap();
        let got = dd.coeff(&TensorIndex::new(vec![1, 0])).unwrap();
        assert!((got - Complex64::new(0.0, std::f64::consts::TAU)).norm() < 1e-13);

        // pointwise agreement with the closed-form derivative of u1
        let u = SpectralField::fold_terms(&u1(), &sizes).unwrap();
        let du = u.gradient_spectrum(0).unwrap();
        let tau = std::f64::consts::TAU;
        for &x in &[0.3, 1.7, -0.9] {
            let want = tau * (tau * x).cos() + tau * 2f64.sqrt() * (tau * 2f64.sqrt() * x).cos();
            let got = du.evaluate_at(&[x]).unwrap();
            assert!((got.re - want).abs() < 1e-11 && got.im.abs() < 1e-11);
        }
    }

    #[test]
    fn gradient_preserves_conjugate_symmetry() {
        // the derivative of a real field is real: coeff(-k) = conj(coeff(k))
        // survives gradient_spectrum away from the unpaired Nyquist boundary
        let sizes = SizeVector::new(vec![8, 8]).unwrap();
        let a = SpectralField::fold_terms(&alpha1(), &sizes).unwrap();
        assert!(a.is_real_valued());
        let da = a.gradient_spectrum(0).unwrap();
        for flat in 0..sizes.total() {
            let idx = crate::lattice::invert(flat, &sizes).unwrap();
            if idx.components().iter().any(|&c| c == -4) {
                continue;
            }
            let neg = TensorIndex::new(idx.components().iter().map(|&c| -c).collect());
            let a1 = da.coeff(&idx).unwrap();
            let a2 = da.coeff(&neg).unwrap();
            assert!((a2 - a1.conj()).norm() < 1e-12);
        }
        assert!(da.is_conjugate_symmetric(1e-12));
    }

    #[test]
    fn multiply_examples() {
        let sizes = SizeVector::new(vec![8, 8]).unwrap();
        let one = SpectralField::fold_terms(
            &TermList::constant(p_1d(), Complex64::new(1.0, 0.0)).unwrap(),
            &sizes,
        )
        .unwrap();
        let a = SpectralField::fold_terms(&alpha1(), &sizes).unwrap();
        let prod = a.multiply(&one).unwrap();
        for (x, y) in prod.coeffs().iter().zip(a.coeffs()) {
            assert!((x - y).norm() < 1e-14);
        }

        // delta(k1) x delta(k2) -> delta(k1 + k2) with wraparound
        let d1 = SpectralField::fold_terms(
            &TermList::new(
                p_1d(),
                vec![(TensorIndex::new(vec![3, 0]), Complex64::new(1.0, 0.0))],
            )
            .unwrap(),
            &sizes,
        )
        .unwrap();
        let d2 = SpectralField::fold_terms(
            &TermList::new(
                p_1d(),
                vec![(TensorIndex::new(vec![2, 0]), Complex64::new(1.0, 0.0))],
            )
            .unwrap(),
            &sizes,
        )
        .unwrap();
        let prod = d1.multiply(&d2).unwrap();
        // 3 + 2 = 5 folds to -3 in [-4, 4)
        let got = prod.coeff(&TensorIndex::new(vec![-3, 0])).unwrap();
        assert!((got - 1.0).norm() < 1e-13);

        // pointwise against the closed-form product alpha1 * u1
        let u = SpectralField::fold_terms(&u1(), &SizeVector::new(vec![8, 8]).unwrap()).unwrap();
        let au = a.multiply(&u).unwrap();
        let tau = std::f64::consts::TAU;
        for i in 0..10 {
            let x = -1.3 + 0.41 * i as f64;
            let alpha_x = (tau * x).cos() + (tau * 2f64.sqrt() * x).cos() + 6.0;
            let u_x = (tau * x).sin() + (tau * 2f64.sqrt() * x).sin();
            let got = au.evaluate_at(&[x]).unwrap();
            assert!((got.re - alpha_x * u_x).abs() < 1e-11 && got.im.abs() < 1e-11);
        }
    }

    #[test]
    fn multiply_commutative_bilinear() {
        let sizes = SizeVector::new(vec![4, 4]).unwrap();
        let mk = |seed: u64| {
            let coeffs: Vec<Complex64> = (0..16)
                .map(|i| {
                    let t = (seed.wrapping_mul(6364136223846793005).wrapping_add(i) % 1000) as f64;
                    Complex64::new((t * 0.013).sin(), (t * 0.007).cos())
                })
                .collect();
            SpectralField::from_coeffs(coeffs, sizes.clone(), p_1d()).unwrap()
        };
        let (a, b, c) = (mk(1), mk(2), mk(3));
        let ab = a.multiply(&b).unwrap();
        let ba = b.multiply(&a).unwrap();
        for (x, y) in ab.coeffs().iter().zip(ba.coeffs()) {
            assert!((x - y).norm() < 1e-12);
        }
        // a*(b + c) = a*b + a*c
        let bc = SpectralField::from_coeffs(
            b.coeffs().iter().zip(c.coeffs()).map(|(x, y)| x + y).collect(),
            sizes,
            p_1d(),
        )
        .unwrap();
        let lhs = a.multiply(&bc).unwrap();
        let ac = a.multiply(&c).unwrap();
        for ((l, r1), r2) in lhs.coeffs().iter().zip(ab.coeffs()).zip(ac.coeffs()) {
            assert!((l - (r1 + r2)).norm() < 1e-12);
        }
    }

    #[test]
    fn manufacture_constant_coefficient() {
        // alpha = 6, u = sin(2 pi x) -> f = 6 (2 pi)^2 sin(2 pi x)
        let tau = std::f64::consts::TAU;
        let p = ProjectionMatrix::new(vec![vec![tau]]).unwrap();
        let sizes = SizeVector::new(vec![8]).unwrap();
        let alpha = SpectralField::fold_terms(
            &TermList::constant(p.clone(), Complex64::new(6.0, 0.0)).unwrap(),
            &sizes,
        )
        .unwrap();
        let u = SpectralField::fold_terms(&TermList::sine(p.clone(), vec![1], 1.0).unwrap(), &sizes)
            .unwrap();
        let f = SpectralField::manufacture_rhs(&alpha, &u).unwrap();
        let want = SpectralField::fold_terms(
            &TermList::sine(p, vec![1], 6.0 * tau * tau).unwrap(),
            &sizes,
        )
        .unwrap();
        for (x, y) in f.coeffs().iter().zip(want.coeffs()) {
            assert!((x - y).norm() < 1e-9);
        }

        // constant u -> zero rhs
        let ones = SpectralField::fold_terms(
            &TermList::constant(alpha.projection().clone(), Complex64::new(4.0, 0.0)).unwrap(),
            alpha.sizes(),
        )
        .unwrap();
        let f0 = SpectralField::manufacture_rhs(&alpha, &ones).unwrap();
        assert!(f0.qp_norm_l2() < 1e-12);
    }

    #[test]
    fn manufacture_matches_finite_differences() {
        // f(x) = -(alpha u')'(x) via centered differences of the flux
        let sizes = SizeVector::new(vec![16, 16]).unwrap();
        let alpha_t = alpha1();
        let u_t = u1();
        let f_terms = TermList::manufacture_rhs(&alpha_t, &u_t).unwrap();
        let du = u_t.gradient(0).unwrap();
        let h = 1e-5;
        for &x in &[0.21, -1.03, 2.9] {
            let flux = |y: f64| {
                (alpha_t.evaluate(&[y]).unwrap() * du.evaluate(&[y]).unwrap()).re
            };
            let fd = -(flux(x + h) - flux(x - h)) / (2.0 * h);
            let exact = f_terms.evaluate(&[x]).unwrap().re;
            assert!(
                (fd - exact).abs() <= 1e-5 * exact.abs().max(1.0),
                "x={x}: fd={fd}, spectral={exact}"
            );
        }
        // the spectral-field route agrees with the termwise route in-window
        let f_field = SpectralField::manufacture_rhs(
            &SpectralField::fold_terms(&alpha_t, &sizes).unwrap(),
            &SpectralField::fold_terms(&u_t, &sizes).unwrap(),
        )
        .unwrap();
        let f_folded = SpectralField::fold_terms(&f_terms, &sizes).unwrap();
        for (a, b) in f_field.coeffs().iter().zip(f_folded.coeffs()) {
            assert!((a - b).norm() < 1e-9);
        }
        // compatibility: mean of the rhs vanishes
        assert!(f_field.mean_value().norm() < 1e-12);
    }

    #[test]
    fn fold_terms_round_trip_alpha1() {
        let sizes = SizeVector::new(vec![8, 8]).unwrap();
        let f = SpectralField::fold_terms(&alpha1(), &sizes).unwrap();
        let g = f.dfb_inverse();
        let back = SpectralField::dfb_forward(&g, &p_1d()).unwrap();
        for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn termlist_mean_and_symmetry() {
        let a = alpha1();
        assert!((a.mean().re - 6.0).abs() < 1e-15);
        assert!(a.is_real_valued());
        let u = u1();
        assert!(u.is_real_valued());
        assert_eq!(u.mean(), Complex64::default());
        let g = u.gradient(0).unwrap();
        assert!(!g.terms().is_empty());
    }
}
