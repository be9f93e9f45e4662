//! Bundled benchmark problems. Each returns exact symbolic term lists, so
//! the manufactured-solution pipeline stays exact.
//!
//! Problems whose generators are pairwise incommensurate are lifted with one
//! axis per generator (a diagonal projection matrix): the coefficient
//! cos(2 pi x) + cos(2 pi sqrt2 x) + 6 becomes the parent
//! cos(y_1) + cos(y_2) + 6 with y = (2 pi x_1, 2 pi sqrt2 x_2), restricted to
//! the diagonal x_1 = x_2.

use crate::lattice::{ProjectionMatrix, TensorIndex};
use crate::qpfield::TermList;
use num_complex::Complex64;

const TAU: f64 = std::f64::consts::TAU;

fn sqrt(v: f64) -> f64 {
    v.sqrt()
}

fn unit(n: usize, axis: usize, value: i64) -> Vec<i64> {
    let mut k = vec![0i64; n];
    k[axis] = value;
    k
}

/// cos(2 pi x) + cos(2 pi sqrt2 x) + 6 with sin(2 pi x) + sin(2 pi sqrt2 x),
/// as genuinely one-dimensional quasiperiodic functions: d = 1, n = 2,
/// P = 2 pi (1, sqrt2). This is the representation the periodic-approximation
/// baseline consumes.
pub fn two_frequency_1d() -> (TermList, TermList) {
    let p = ProjectionMatrix::new(vec![vec![TAU, TAU * sqrt(2.0)]]).unwrap();
    let alpha = TermList::constant(p.clone(), Complex64::new(6.0, 0.0))
        .unwrap()
        .add(&TermList::cosine(p.clone(), vec![1, 0], 1.0).unwrap())
        .unwrap()
        .add(&TermList::cosine(p.clone(), vec![0, 1], 1.0).unwrap())
        .unwrap();
    let u = TermList::sine(p.clone(), vec![1, 0], 1.0)
        .unwrap()
        .add(&TermList::sine(p, vec![0, 1], 1.0).unwrap())
        .unwrap();
    (alpha, u)
}

/// Alias kept close to the solver drivers: the (coefficient, solution) pair
/// of the primary two-frequency benchmark in its 1-D representation.
pub fn example1() -> (TermList, TermList) {
    two_frequency_1d()
}

fn lifted_diag(generators: &[f64]) -> ProjectionMatrix {
    let freqs: Vec<f64> = generators.iter().map(|g| TAU * g).collect();
    ProjectionMatrix::diagonal(&freqs).unwrap()
}

/// The two-frequency benchmark lifted with one axis per generator:
/// d = n = 2, P = 2 pi diag(1, sqrt2).
pub fn two_frequency_lifted() -> (TermList, TermList) {
    let p = lifted_diag(&[1.0, sqrt(2.0)]);
    let alpha = TermList::constant(p.clone(), Complex64::new(6.0, 0.0))
        .unwrap()
        .add(&TermList::cosine(p.clone(), unit(2, 0, 1), 1.0).unwrap())
        .unwrap()
        .add(&TermList::cosine(p.clone(), unit(2, 1, 1), 1.0).unwrap())
        .unwrap();
    let u = TermList::sine(p.clone(), unit(2, 0, 1), 1.0)
        .unwrap()
        .add(&TermList::sine(p, unit(2, 1, 1), 1.0).unwrap())
        .unwrap();
    (alpha, u)
}

/// Exponentially decaying solution over the combination lattice
/// k_1 + k_2 sqrt2 with coefficients e^{-(|k_1| + |k_2|)}, -32 <= k_i < 32,
/// on the lifted two-frequency lattice.
pub fn exp_decay_solution_lifted() -> TermList {
    let p = lifted_diag(&[1.0, sqrt(2.0)]);
    let mut raw = Vec::with_capacity(64 * 64);
    for k1 in -32i64..32 {
        for k2 in -32i64..32 {
            let c = (-((k1.abs() + k2.abs()) as f64)).exp();
            raw.push((TensorIndex::new(vec![k1, k2]), Complex64::new(c, 0.0)));
        }
    }
    TermList::new(p, raw).unwrap()
}

/// Three separated generators (1, sqrt2, sqrt3): coefficient
/// cos + cos + cos + 6 and solution sin + sin + sin, lifted diagonally.
pub fn three_frequency_lifted() -> (TermList, TermList) {
    let p = lifted_diag(&[1.0, sqrt(2.0), sqrt(3.0)]);
    let mut alpha = TermList::constant(p.clone(), Complex64::new(6.0, 0.0)).unwrap();
    let mut u = TermList::new(p.clone(), vec![]).unwrap();
    for axis in 0..3 {
        alpha = alpha
            .add(&TermList::cosine(p.clone(), unit(3, axis, 1), 1.0).unwrap())
            .unwrap();
        u = u
            .add(&TermList::sine(p.clone(), unit(3, axis, 1), 1.0).unwrap())
            .unwrap();
    }
    (alpha, u)
}

/// Coefficient over (1, sqrt2) paired with a solution over (1, sqrt3): both
/// carried on the merged generator basis (1, sqrt2, sqrt3).
pub fn mixed_frequency_lifted() -> (TermList, TermList) {
    let p = lifted_diag(&[1.0, sqrt(2.0), sqrt(3.0)]);
    let alpha = TermList::constant(p.clone(), Complex64::new(6.0, 0.0))
        .unwrap()
        .add(&TermList::cosine(p.clone(), unit(3, 0, 1), 1.0).unwrap())
        .unwrap()
        .add(&TermList::cosine(p.clone(), unit(3, 1, 1), 1.0).unwrap())
        .unwrap();
    let u = TermList::sine(p.clone(), unit(3, 0, 1), 1.0)
        .unwrap()
        .add(&TermList::sine(p, unit(3, 2, 1), 1.0).unwrap())
        .unwrap();
    (alpha, u)
}

/// Planar problem with four generators: d = 2, n = 4,
/// P = 2 pi [[1, 0, sqrt3, 0], [0, sqrt2, 0, sqrt5]];
/// coefficient cos + cos + cos + sin + 12, solution sin + cos + sin + cos.
pub fn planar_four_frequency() -> (TermList, TermList, ProjectionMatrix) {
    let p = ProjectionMatrix::new(vec![
        vec![TAU, 0.0, TAU * sqrt(3.0), 0.0],
        vec![0.0, TAU * sqrt(2.0), 0.0, TAU * sqrt(5.0)],
    ])
    .unwrap();
    let alpha = TermList::constant(p.clone(), Complex64::new(12.0, 0.0))
        .unwrap()
        .add(&TermList::cosine(p.clone(), unit(4, 0, 1), 1.0).unwrap())
        .unwrap()
        .add(&TermList::cosine(p.clone(), unit(4, 1, 1), 1.0).unwrap())
        .unwrap()
        .add(&TermList::cosine(p.clone(), unit(4, 2, 1), 1.0).unwrap())
        .unwrap()
        .add(&TermList::sine(p.clone(), unit(4, 3, 1), 1.0).unwrap())
        .unwrap();
    let u = TermList::sine(p.clone(), unit(4, 0, 1), 1.0)
        .unwrap()
        .add(&TermList::cosine(p.clone(), unit(4, 1, 1), 1.0).unwrap())
        .unwrap()
        .add(&TermList::sine(p.clone(), unit(4, 2, 1), 1.0).unwrap())
        .unwrap()
        .add(&TermList::cosine(p.clone(), unit(4, 3, 1), 1.0).unwrap())
        .unwrap();
    (alpha, u, p)
}

/// Diagonal homogenization coefficient on d = 2, n = 4 with
/// P = 2 pi [[1, sqrt2, 1, sqrt2], [1, sqrt2, 0, 0]]:
/// alpha = 4 + cos(2 pi (x1+x2)) + cos(2 pi sqrt2 (x1+x2)),
/// beta  = 6 + sin^2(2 pi x1) + sin^2(2 pi sqrt2 (x1+x2)).
pub fn homogenization_pair() -> (TermList, TermList, ProjectionMatrix) {
    let s2 = sqrt(2.0);
    let p = ProjectionMatrix::new(vec![
        vec![TAU, TAU * s2, TAU, TAU * s2],
        vec![TAU, TAU * s2, 0.0, 0.0],
    ])
    .unwrap();
    let alpha = TermList::constant(p.clone(), Complex64::new(4.0, 0.0))
        .unwrap()
        .add(&TermList::cosine(p.clone(), vec![1, 0, 0, 0], 1.0).unwrap())
        .unwrap()
        .add(&TermList::cosine(p.clone(), vec![0, 1, 0, 0], 1.0).unwrap())
        .unwrap();
    // sin^2 t = 1/2 - cos(2t)/2
    let beta = TermList::constant(p.clone(), Complex64::new(7.0, 0.0))
        .unwrap()
        .add(&TermList::cosine(p.clone(), vec![0, 0, 2, 0], -0.5).unwrap())
        .unwrap()
        .add(&TermList::cosine(p.clone(), vec![0, 2, 0, 0], -0.5).unwrap())
        .unwrap();
    (alpha, beta, p)
}

/// Laminate test coefficient: alpha varies along x1 only through two
/// incommensurate generators, beta is constant. The homogenized first entry
/// is the harmonic mean of alpha.
pub fn laminate_pair() -> (TermList, TermList, ProjectionMatrix) {
    let p = ProjectionMatrix::new(vec![vec![TAU, TAU * sqrt(2.0)], vec![0.0, 0.0]]).unwrap();
    let alpha = TermList::constant(p.clone(), Complex64::new(6.0, 0.0))
        .unwrap()
        .add(&TermList::cosine(p.clone(), vec![1, 0], 1.0).unwrap())
        .unwrap()
        .add(&TermList::cosine(p.clone(), vec![0, 1], 1.0).unwrap())
        .unwrap();
    let beta = TermList::constant(p.clone(), Complex64::new(3.0, 0.0)).unwrap();
    (alpha, beta, p)
}

/// Look a preset problem up by name; used by the experiment configs.
pub fn solve_preset(name: &str) -> Option<(TermList, TermList)> {
    match name {
        "two-frequency-1d" => Some(two_frequency_1d()),
        "two-frequency" => Some(two_frequency_lifted()),
        "two-frequency-combination" => {
            let (alpha, _) = two_frequency_lifted();
            Some((alpha, exp_decay_solution_lifted()))
        }
        "three-frequency" => Some(three_frequency_lifted()),
        "mixed-frequency" => Some(mixed_frequency_lifted()),
        "planar-four-frequency" => {
            let (alpha, u, _) = planar_four_frequency();
            Some((alpha, u))
        }
        _ => None,
    }
}

/// Look a homogenization preset up by name.
pub fn homogenize_preset(name: &str) -> Option<(TermList, TermList)> {
    match name {
        "quasiperiodic-diagonal" => {
            let (alpha, beta, _) = homogenization_pair();
            Some((alpha, beta))
        }
        "laminate" => {
            let (alpha, beta, _) = laminate_pair();
            Some((alpha, beta))
        }
        _ => None,
    }
}
