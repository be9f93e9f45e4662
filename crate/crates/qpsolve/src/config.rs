//! Experiment configuration: a single JSON document naming the problem kind,
//! the projection matrix, the coefficient and exact-solution term lists (or a
//! named preset), the resolution sweep, and solver knobs.
//!
//! Projection entries and term coefficients may be written as whitelisted
//! exact expressions ("2*pi*sqrt(2)") so irrational frequencies are never
//! truncated by hand.

use crate::error::{QpError, Result};
use crate::expr;
use crate::lattice::{ProjectionMatrix, TensorIndex};
use crate::presets;
use crate::qpfield::TermList;
use crate::solver::SolverConfig;
use num_complex::Complex64;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Solve,
    PamCompare,
    Homogenize,
    Condition,
    ConvergenceTable,
}

impl ProblemKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "solve" => Ok(ProblemKind::Solve),
            "pam-compare" => Ok(ProblemKind::PamCompare),
            "homogenize" => Ok(ProblemKind::Homogenize),
            "condition" => Ok(ProblemKind::Condition),
            "convergence-table" => Ok(ProblemKind::ConvergenceTable),
            other => Err(QpError::Config(format!(
                "unknown kind {other:?}; expected solve | pam-compare | homogenize | condition | convergence-table"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ProblemKind::Solve => "solve",
            ProblemKind::PamCompare => "pam-compare",
            ProblemKind::Homogenize => "homogenize",
            ProblemKind::Condition => "condition",
            ProblemKind::ConvergenceTable => "convergence-table",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Scalar {
    Number(f64),
    Expression(String),
}

impl Scalar {
    fn eval(&self) -> Result<f64> {
        match self {
            Scalar::Number(v) => Ok(*v),
            Scalar::Expression(s) => expr::eval(s),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
struct TermSpec {
    k: Vec<i64>,
    #[serde(default)]
    re: Option<Scalar>,
    #[serde(default)]
    im: Option<Scalar>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kind: String,
    #[serde(default)]
    preset: Option<String>,
    #[serde(default)]
    projection: Option<Vec<Vec<Scalar>>>,
    #[serde(default)]
    coefficient: Option<Vec<TermSpec>>,
    #[serde(default)]
    exact_solution: Option<Vec<TermSpec>>,
    #[serde(default)]
    beta: Option<Vec<TermSpec>>,
    #[serde(default)]
    n_values: Vec<usize>,
    #[serde(default)]
    l_values: Vec<u64>,
    #[serde(default)]
    pam_points_per_cell: Option<usize>,
    #[serde(default)]
    reference_n: Option<usize>,
    #[serde(default)]
    rel_tol: Option<f64>,
    #[serde(default)]
    max_iter: Option<usize>,
    #[serde(default)]
    record_history: Option<bool>,
}

/// Validated experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ProblemKind,
    pub alpha: TermList,
    pub exact: Option<TermList>,
    pub beta: Option<TermList>,
    pub n_values: Vec<usize>,
    pub l_values: Vec<u64>,
    pub pam_points_per_cell: usize,
    pub reference_n: usize,
    pub solver: SolverConfig,
}

fn parse_terms(projection: &ProjectionMatrix, specs: &[TermSpec]) -> Result<TermList> {
    let raw = specs
        .iter()
        .map(|t| {
            let re = t.re.as_ref().map(Scalar::eval).transpose()?.unwrap_or(0.0);
            let im = t.im.as_ref().map(Scalar::eval).transpose()?.unwrap_or(0.0);
            Ok((TensorIndex::new(t.k.clone()), Complex64::new(re, im)))
        })
        .collect::<Result<Vec<_>>>()?;
    TermList::new(projection.clone(), raw)
}

impl ExperimentConfig {
    /// Parse and validate a JSON config document. Syntax errors carry serde's
    /// line/column anchors.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text)
            .map_err(|e| QpError::Config(format!("invalid config JSON: {e}")))?;
        let kind = ProblemKind::parse(&raw.kind)?;

        let (alpha, exact, beta) = match (&raw.preset, &raw.projection) {
            (Some(name), None) => match kind {
                ProblemKind::Homogenize => {
                    let (a, b) = presets::homogenize_preset(name).ok_or_else(|| {
                        QpError::Config(format!("unknown homogenize preset {name:?}"))
                    })?;
                    (a, None, Some(b))
                }
                _ => {
                    let (a, u) = presets::solve_preset(name).ok_or_else(|| {
                        QpError::Config(format!("unknown problem preset {name:?}"))
                    })?;
                    (a, Some(u), None)
                }
            },
            (None, Some(rows)) => {
                let entries = rows
                    .iter()
                    .map(|r| r.iter().map(Scalar::eval).collect::<Result<Vec<f64>>>())
                    .collect::<Result<Vec<_>>>()?;
                let projection = ProjectionMatrix::new(entries)?;
                let alpha = parse_terms(
                    &projection,
                    raw.coefficient
                        .as_deref()
                        .ok_or_else(|| QpError::Config("missing coefficient terms".into()))?,
                )?;
                let exact = raw
                    .exact_solution
                    .as_deref()
                    .map(|t| parse_terms(&projection, t))
                    .transpose()?;
                let beta = raw
                    .beta
                    .as_deref()
                    .map(|t| parse_terms(&projection, t))
                    .transpose()?;
                (alpha, exact, beta)
            }
            (Some(_), Some(_)) => {
                return Err(QpError::Config(
                    "give either a preset or an explicit projection, not both".into(),
                ))
            }
            (None, None) => {
                return Err(QpError::Config(
                    "config needs a preset or an explicit projection + terms".into(),
                ))
            }
        };

        let mut solver = SolverConfig::default();
        if let Some(t) = raw.rel_tol {
            solver.rel_tol = t;
        }
        if let Some(m) = raw.max_iter {
            solver.max_iter = m;
        }
        if let Some(h) = raw.record_history {
            solver.record_history = h;
        }

        // de-duplicate L values, preserving first occurrence
        let mut l_values = Vec::new();
        for l in raw.l_values {
            if !l_values.contains(&l) {
                l_values.push(l);
            }
        }

        let cfg = ExperimentConfig {
            kind,
            alpha,
            exact,
            beta,
            n_values: raw.n_values,
            l_values,
            pam_points_per_cell: raw.pam_points_per_cell.unwrap_or(16),
            reference_n: raw.reference_n.unwrap_or(18),
            solver,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(QpError::Config("n_values must name at least one N".into()));
        }
        for &n in &self.n_values {
            if n < 2 || n % 2 != 0 {
                return Err(QpError::Config(format!(
                    "N = {n} is not an even integer >= 2"
                )));
            }
        }
        if !(self.solver.rel_tol > 0.0) || self.solver.max_iter == 0 {
            return Err(QpError::Config(
                "solver needs rel_tol > 0 and max_iter >= 1".into(),
            ));
        }
        let max_n = *self.n_values.iter().max().expect("nonempty") as i64;
        let fits = |t: &TermList, name: &str| -> Result<()> {
            if t.max_abs_component() > max_n / 2 {
                return Err(QpError::Config(format!(
                    "{name} term index component {} does not fit the largest requested window N = {max_n}",
                    t.max_abs_component()
                )));
            }
            Ok(())
        };
        fits(&self.alpha, "coefficient")?;
        if let Some(u) = &self.exact {
            fits(u, "exact_solution")?;
        }
        if let Some(b) = &self.beta {
            fits(b, "beta")?;
        }
        match self.kind {
            ProblemKind::Solve | ProblemKind::ConvergenceTable | ProblemKind::PamCompare => {
                if self.exact.is_none() {
                    return Err(QpError::Config(
                        "this kind needs an exact_solution for the manufactured problem".into(),
                    ));
                }
            }
            ProblemKind::Homogenize => {
                if self.beta.is_none() {
                    return Err(QpError::Config(
                        "homogenize needs the second diagonal entry (beta)".into(),
                    ));
                }
                if self.alpha.projection().physical_dim() != 2 {
                    return Err(QpError::Config("homogenize needs d = 2".into()));
                }
                if self.reference_n < 2 || self.reference_n % 2 != 0 {
                    return Err(QpError::Config(format!(
                        "reference_n = {} is not an even integer >= 2",
                        self.reference_n
                    )));
                }
            }
            ProblemKind::Condition => {}
        }
        if self.kind == ProblemKind::PamCompare && self.l_values.is_empty() {
            return Err(QpError::Config("pam-compare needs l_values".into()));
        }
        if self.l_values.iter().any(|&l| l == 0) {
            return Err(QpError::Config("cell lengths must be positive".into()));
        }
        if self.pam_points_per_cell < 2 || self.pam_points_per_cell % 2 != 0 {
            return Err(QpError::Config(
                "pam_points_per_cell must be an even integer >= 2".into(),
            ));
        }
        Ok(())
    }
}
