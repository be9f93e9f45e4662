//! Minimal n-dimensional FFT on row-major buffers (last axis contiguous),
//! built on rustfft's 1-D plans. Unnormalized in both directions; callers
//! apply the 1/D convention.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// In-place n-dimensional transform. `inverse = false` uses the e^{-i k y}
/// kernel, `inverse = true` the e^{+i k y} kernel.
pub fn ndfft_in_place(values: &mut [Complex64], sizes: &[usize], inverse: bool) {
    debug_assert_eq!(values.len(), sizes.iter().product::<usize>());
    let mut planner = FftPlanner::<f64>::new();
    let total = values.len();
    for (axis, &len) in sizes.iter().enumerate() {
        if len == 1 {
            continue;
        }
        let fft = if inverse {
            planner.plan_fft_inverse(len)
        } else {
            planner.plan_fft_forward(len)
        };
        // stride between consecutive entries along `axis`
        let stride: usize = sizes[axis + 1..].iter().product();
        let lines = total / len;
        let mut scratch = vec![Complex64::default(); len];
        for line in 0..lines {
            // decompose the line id into (outer block, inner offset)
            let outer = line / stride;
            let inner = line % stride;
            let base = outer * stride * len + inner;
            if stride == 1 {
                fft.process(&mut values[base..base + len]);
            } else {
                for (t, s) in scratch.iter_mut().enumerate() {
                    *s = values[base + t * stride];
                }
                fft.process(&mut scratch);
                for (t, s) in scratch.iter().enumerate() {
                    values[base + t * stride] = *s;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_dft_2d() {
        let sizes = [4usize, 6];
        let total: usize = sizes.iter().product();
        let mut vals: Vec<Complex64> = (0..total)
            .map(|i| Complex64::new(i as f64 * 0.3 - 1.0, (i * i % 7) as f64 * 0.1))
            .collect();
        let orig = vals.clone();
        ndfft_in_place(&mut vals, &sizes, false);
        // direct O(D^2) check
        for k1 in 0..sizes[0] {
            for k2 in 0..sizes[1] {
                let mut acc = Complex64::default();
                for j1 in 0..sizes[0] {
                    for j2 in 0..sizes[1] {
                        let phase = -2.0
                            * std::f64::consts::PI
                            * (k1 as f64 * j1 as f64 / sizes[0] as f64
                                + k2 as f64 * j2 as f64 / sizes[1] as f64);
                        acc += orig[j1 * sizes[1] + j2] * Complex64::from_polar(1.0, phase);
                    }
                }
                let got = vals[k1 * sizes[1] + k2];
                assert!((got - acc).norm() < 1e-10, "mismatch at ({k1},{k2})");
            }
        }
    }

    #[test]
    fn forward_inverse_round_trip() {
        let sizes = [2usize, 4, 6];
        let total: usize = sizes.iter().product();
        let orig: Vec<Complex64> = (0..total)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 1.7).cos()))
            .collect();
        let mut vals = orig.clone();
        ndfft_in_place(&mut vals, &sizes, false);
        ndfft_in_place(&mut vals, &sizes, true);
        for (a, b) in vals.iter().zip(&orig) {
            assert!((a / total as f64 - b).norm() < 1e-12);
        }
    }
}
