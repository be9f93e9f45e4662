//! Frozen regression anchors for the bundled benchmark problems, plus
//! determinism checks. Numeric anchors were cross-checked against an
//! independent NumPy implementation of the same pipeline before freezing.

use num_complex::Complex64;
use qpsolve::assembly::{assemble_compressed, DEFAULT_DROP_TOL};
use qpsolve::config::ExperimentConfig;
use qpsolve::driver::{run_homogenize, solve_manufactured};
use qpsolve::homogenize::{homogenized_tensor, solve_correctors, DiagonalCoefficient2D};
use qpsolve::lattice::SizeVector;
use qpsolve::presets;
use qpsolve::qpfield::SpectralField;
use qpsolve::solver::SolverConfig;

fn solver() -> SolverConfig {
    SolverConfig::default()
}

#[test]
fn three_frequency_sweep() {
    let (alpha, u) = presets::three_frequency_lifted();
    let out4 = solve_manufactured(&alpha, &u, 4, &solver()).unwrap();
    assert!((out4.error - 7.789e-2).abs() < 2e-4, "e(4) = {:.4e}", out4.error);
    let out8 = solve_manufactured(&alpha, &u, 8, &solver()).unwrap();
    assert!(out8.error < 1e-13);
    assert!((20..=26).contains(&out8.report.iterations));
}

#[test]
fn planar_four_frequency_sweep() {
    let (alpha, u, _) = presets::planar_four_frequency();
    let out4 = solve_manufactured(&alpha, &u, 4, &solver()).unwrap();
    assert!((out4.error - 4.340e-2).abs() < 2e-4, "e(4) = {:.4e}", out4.error);
    let out6 = solve_manufactured(&alpha, &u, 6, &solver()).unwrap();
    assert!(out6.error < 1e-13, "e(6) = {:.3e}", out6.error);
}

#[test]
fn homogenized_reference_value() {
    // the N = 18 reference of the diagonal quasiperiodic coefficient
    let (alpha_t, beta_t, _) = presets::homogenization_pair();
    let sizes = SizeVector::uniform(4, 18).unwrap();
    let coeff = DiagonalCoefficient2D::new(
        SpectralField::fold_terms(&alpha_t, &sizes).unwrap(),
        SpectralField::fold_terms(&beta_t, &sizes).unwrap(),
    )
    .unwrap();
    let cfg = SolverConfig {
        rel_tol: 1e-15,
        max_iter: 3000,
        record_history: false,
    };
    let correctors = solve_correctors(&coeff, &cfg).unwrap();
    let astar = homogenized_tensor(&coeff, &correctors).unwrap();
    assert!(
        (astar.entry(0, 0) - 3.906849305835).abs() < 1e-9,
        "A*_11 = {:.12}",
        astar.entry(0, 0)
    );
    // the homogenized tensor of a symmetric coefficient is symmetric; the
    // cross coupling is real but small for this coefficient
    assert!(
        (astar.entry(0, 1) - astar.entry(1, 0)).abs() <= 1e-9,
        "A* not symmetric: {:.6e} vs {:.6e}",
        astar.entry(0, 1),
        astar.entry(1, 0)
    );
    assert!(astar.entry(0, 1).abs() < 1e-2);
    // Voigt-Reuss bracket for both diagonal entries
    assert!(astar.entry(0, 0) < 4.0 && astar.entry(0, 0) > 3.0);
    assert!(astar.entry(1, 1) < 7.0 && astar.entry(1, 1) > 6.0);
}

#[test]
fn homogenize_pam_sweep_is_not_monotone() {
    // the periodic-approximation error does not consistently decrease as the
    // cell grows; the Diophantine quality of each L dominates
    let text = r#"{
        "kind": "homogenize",
        "preset": "quasiperiodic-diagonal",
        "n_values": [4],
        "reference_n": 12,
        "l_values": [2, 5, 6, 12, 29],
        "pam_points_per_cell": 8,
        "max_iter": 3000
    }"#;
    let cfg = ExperimentConfig::from_json(text).unwrap();
    let rows = run_homogenize(&cfg).unwrap().rows;
    let pam_errors: Vec<f64> = rows
        .iter()
        .filter(|r| r.case.starts_with("PAM"))
        .map(|r| r.e_n.unwrap())
        .collect();
    assert_eq!(pam_errors.len(), 5);
    let monotone = pam_errors.windows(2).all(|w| w[1] <= w[0]);
    assert!(
        !monotone,
        "PAM errors unexpectedly monotone: {pam_errors:?}"
    );
}

#[test]
fn restricted_operator_is_positive_definite() {
    // smallest eigenvalue of the dense matrix away from the zero mode is
    // strictly positive for elliptic coefficients
    use nalgebra::{Complex, DMatrix};
    use qpsolve::assembly::assemble_dense;
    let coefficients = [
        presets::two_frequency_1d().0,
        presets::two_frequency_lifted().0,
        presets::three_frequency_lifted().0,
    ];
    for alpha in &coefficients {
        let rank = alpha.projection().lattice_dim();
        let n = if rank >= 3 { 4 } else { 8 };
        let sizes = SizeVector::uniform(rank, n).unwrap();
        let field = SpectralField::fold_terms(alpha, &sizes).unwrap();
        let dense = assemble_dense(&field, None).unwrap();
        let dim = dense.dim();
        let mut mat = DMatrix::<Complex<f64>>::zeros(dim - 1, dim - 1);
        for r in 1..dim {
            for c in 1..dim {
                mat[(r - 1, c - 1)] = dense.entry(r, c);
            }
        }
        let eig = nalgebra::SymmetricEigen::new(mat);
        let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min > 0.0, "lambda_min = {min:.3e} for rank {rank}");
    }
}

#[test]
fn compressed_matches_dense_entrywise_three_axes() {
    use qpsolve::assembly::assemble_dense;
    let (alpha, _) = presets::three_frequency_lifted();
    for n in [4usize, 8] {
        let sizes = SizeVector::uniform(3, n).unwrap();
        let field = SpectralField::fold_terms(&alpha, &sizes).unwrap();
        let q = assemble_compressed(&field, DEFAULT_DROP_TOL).unwrap();
        let dense = assemble_dense(&field, None).unwrap();
        let total = sizes.total();
        let mut full = vec![Complex64::default(); total * total];
        for (r, c, v) in q.entries() {
            full[r * total + c] = v;
        }
        let mut scale: f64 = 0.0;
        let mut dev: f64 = 0.0;
        for r in 0..total {
            for c in 0..total {
                let want = if r == 0 || c == 0 {
                    Complex64::default()
                } else {
                    dense.entry(r, c)
                };
                scale = scale.max(want.norm());
                dev = dev.max((full[r * total + c] - want).norm());
            }
        }
        assert!(dev <= 1e-13 * scale, "N = {n}: entrywise deviation {dev:.2e}");
    }
}

#[test]
fn condition_numbers_frozen() {
    use qpsolve::assembly::assemble_dense;
    use qpsolve::solver::{build_preconditioner, estimate_condition};
    let (alpha, _) = presets::two_frequency_lifted();
    // (N, cond(Q), cond(QM)) on the zero-mode-excluded dense system
    let expect = [
        (4usize, 12.70, 1.668),
        (8, 51.55, 1.892),
        (16, 213.9, 1.969),
    ];
    let mut prev_q = None;
    for (n, want_q, want_qm) in expect {
        let sizes = SizeVector::uniform(2, n).unwrap();
        let field = SpectralField::fold_terms(&alpha, &sizes).unwrap();
        let q = assemble_compressed(&field, DEFAULT_DROP_TOL).unwrap();
        let dense = assemble_dense(&field, None).unwrap();
        let m = build_preconditioner(&q).unwrap();
        let cq = estimate_condition(&dense, None).unwrap();
        let cqm = estimate_condition(&dense, Some(&m)).unwrap();
        assert!((cq - want_q).abs() < 0.01 * want_q, "cond(Q) at {n}: {cq:.4}");
        assert!(
            (cqm - want_qm).abs() < 0.01 * want_qm,
            "cond(QM) at {n}: {cqm:.4}"
        );
        // growth of the raw condition number is ~4x per doubling
        if let Some(p) = prev_q {
            let ratio: f64 = cq / p;
            assert!((3.0..=5.0).contains(&ratio), "growth ratio {ratio:.2}");
        }
        prev_q = Some(cq);
    }
}

#[test]
fn apply_is_bitwise_deterministic_across_thread_counts() {
    let (alpha, _) = presets::two_frequency_lifted();
    let sizes = SizeVector::uniform(2, 16).unwrap();
    let field = SpectralField::fold_terms(&alpha, &sizes).unwrap();
    let x: Vec<Complex64> = (0..sizes.total())
        .map(|i| Complex64::new((i as f64 * 0.11).sin(), (i as f64 * 0.77).cos()))
        .collect();
    let run_in = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let q = assemble_compressed(&field, DEFAULT_DROP_TOL).unwrap();
            let y = q.apply(&x).unwrap();
            let entries: Vec<(usize, usize, Complex64)> = q.entries().collect();
            (entries, y)
        })
    };
    let (e1, y1) = run_in(1);
    let (e4, y4) = run_in(4);
    assert_eq!(e1.len(), e4.len());
    for (a, b) in e1.iter().zip(&e4) {
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
        assert!(a.2 == b.2, "assembly differs across thread counts");
    }
    for (a, b) in y1.iter().zip(&y4) {
        assert!(a == b, "apply differs across thread counts");
    }
}

#[test]
fn shipped_configs_parse_and_match_presets() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in [
        "solve_two_frequency.json",
        "convergence_combination.json",
        "pam_compare.json",
        "homogenize.json",
        "condition.json",
        "solve_explicit_example.json",
    ] {
        let text = std::fs::read_to_string(dir.join(name)).unwrap();
        let cfg = ExperimentConfig::from_json(&text)
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(!cfg.n_values.is_empty());
    }
    // the explicit example spells out the same problem as the lifted preset
    let explicit = ExperimentConfig::from_json(
        &std::fs::read_to_string(dir.join("solve_explicit_example.json")).unwrap(),
    )
    .unwrap();
    let (alpha, u) = presets::two_frequency_lifted();
    assert_eq!(explicit.alpha.len(), alpha.len());
    for ((k1, c1), (k2, c2)) in explicit.alpha.terms().iter().zip(alpha.terms()) {
        assert_eq!(k1, k2);
        assert!((c1 - c2).norm() < 1e-15);
    }
    let eu = explicit.exact.unwrap();
    for ((k1, c1), (k2, c2)) in eu.terms().iter().zip(u.terms()) {
        assert_eq!(k1, k2);
        assert!((c1 - c2).norm() < 1e-15);
    }
}
