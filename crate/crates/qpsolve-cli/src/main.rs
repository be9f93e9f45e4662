//! Command-line experiment drivers for the quasiperiodic elliptic solver.
//!
//! Every subcommand reads one JSON config, runs the corresponding sweep, and
//! writes deterministic CSV / JSON-lines tables plus a run manifest into the
//! output directory.
//!
//! Exit codes: 0 success, 2 config error, 3 solver non-convergence,
//! 4 oracle mismatch.

use clap::{Args, Parser, Subcommand};
use qpsolve::config::{ExperimentConfig, ProblemKind};
use qpsolve::error::QpError;
use qpsolve::report;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "qpsolve",
    version,
    about = "Spectral solver and experiment harness for elliptic PDEs with quasiperiodic coefficients"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV/JSONL tables and the manifest
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Pin the worker thread count (1 = fully reproducible artifacts,
    /// timing columns redacted)
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Override the solver's relative residual tolerance
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Override the solver's iteration cap
    #[arg(long)]
    max_iter: Option<usize>,
    /// Cross-validate compressed solves against the dense oracle (small N)
    #[arg(long)]
    dense_check: bool,
    /// Allow overwriting existing result files
    #[arg(long)]
    overwrite: bool,
    /// Dump each assembled operator as a QPCS binary into the output
    /// directory (solve kinds only)
    #[arg(long)]
    dump_operator: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Manufactured-solution solve sweep over the configured N values
    Solve(RunArgs),
    /// Projection method vs periodic approximation on one problem
    PamCompare(RunArgs),
    /// Corrector solves and homogenized-tensor errors per N
    Homogenize(RunArgs),
    /// Condition numbers of the dense system and its preconditioned form
    Condition(RunArgs),
    /// Error/order table of the solve sweep
    ConvergenceTable(RunArgs),
}

fn exit_code_for(err: &QpError) -> u8 {
    match err {
        QpError::NonConvergence(_) => 3,
        QpError::OracleMismatch(_) => 4,
        QpError::Io(_) => 1,
        _ => 2,
    }
}

fn run(args: &RunArgs, kind: ProblemKind) -> Result<(), QpError> {
    if args.threads == 0 {
        return Err(QpError::Config("--threads must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build_global()
        .map_err(|e| QpError::Config(format!("thread pool: {e}")))?;

    let text = fs::read_to_string(&args.config)?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if cfg.kind != kind {
        return Err(QpError::Config(format!(
            "config kind {:?} does not match the {:?} subcommand",
            cfg.kind.as_str(),
            kind.as_str()
        )));
    }
    if let Some(tol) = args.rel_tol {
        if !(tol > 0.0) {
            return Err(QpError::Config("--rel-tol must be positive".into()));
        }
        cfg.solver.rel_tol = tol;
    }
    if let Some(m) = args.max_iter {
        if m == 0 {
            return Err(QpError::Config("--max-iter must be at least 1".into()));
        }
        cfg.solver.max_iter = m;
    }

    let output = qpsolve::driver::run(&cfg, args.dense_check)?;
    let mut rows = output.rows;
    if args.threads == 1 {
        report::redact_timing(&mut rows);
    }
    report::emit_reports(&rows, &args.out, "results", args.overwrite)?;
    if let Some(mut dio) = output.side_rows {
        if args.threads == 1 {
            report::redact_timing(&mut dio);
        }
        report::emit_reports(&dio, &args.out, "pam_diophantine", args.overwrite)?;
    }
    let mut reports = output.reports;
    if args.threads == 1 {
        for r in &mut reports {
            r.wall_time = 0.0;
        }
    }
    report::emit_solve_reports(&reports, &args.out, args.overwrite)?;
    report::write_manifest(&args.out, &text, args.threads, rows.len(), args.overwrite)?;

    if args.dump_operator {
        dump_operators(&cfg, args)?;
    }

    for row in &rows {
        let e = row
            .e_n
            .map(|e| format!(" e_N={e:.6e}"))
            .unwrap_or_default();
        let it = row
            .iterations
            .map(|i| format!(" iterations={i}"))
            .unwrap_or_default();
        let cond = row
            .cond_qm
            .map(|c| format!(" cond(QM)={c:.3}"))
            .unwrap_or_default();
        println!("{} N={}{}{}{}", row.case, row.n, e, it, cond);
    }
    println!(
        "wrote {} rows to {}",
        rows.len(),
        args.out.join("results.csv").display()
    );
    Ok(())
}

fn dump_operators(cfg: &ExperimentConfig, args: &RunArgs) -> Result<(), QpError> {
    use qpsolve::assembly::{assemble_compressed, DEFAULT_DROP_TOL};
    use qpsolve::lattice::SizeVector;
    use qpsolve::qpfield::SpectralField;
    for &n in &cfg.n_values {
        let sizes = SizeVector::uniform(cfg.alpha.projection().lattice_dim(), n)?;
        let field = SpectralField::fold_terms(&cfg.alpha, &sizes)?;
        let q = assemble_compressed(&field, DEFAULT_DROP_TOL)?;
        let path = args.out.join(format!("operator_n{n}.qpcs"));
        if path.exists() && !args.overwrite {
            return Err(QpError::WouldOverwrite(path.display().to_string()));
        }
        let file = fs::File::create(&path)?;
        qpsolve::qpcs::write_qpcs(&q, std::io::BufWriter::new(file))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, kind) = match &cli.command {
        Command::Solve(a) => (a, ProblemKind::Solve),
        Command::PamCompare(a) => (a, ProblemKind::PamCompare),
        Command::Homogenize(a) => (a, ProblemKind::Homogenize),
        Command::Condition(a) => (a, ProblemKind::Condition),
        Command::ConvergenceTable(a) => (a, ProblemKind::ConvergenceTable),
    };
    match run(args, kind) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
