//! Composition of per-state, per-element conditional failure probabilities into state
//! finish probabilities and path risk.
//!
//! With elements conditionally independent at a state given the finished history, the
//! probability of finishing state `i` is `prod_k (1 - r_k)`, and by the chain rule the path
//! finishes with probability `prod_i prod_k (1 - r_k)`. Risk is its complement. Products are
//! evaluated as sums of `ln(1 - r)`.

mod monte_carlo;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elements::{Normalization, RiskCategory, RiskElement, Step};
use crate::tether::{advance_tether, TetherError, TetherState};
use crate::world::{validate_path, Path, PathViolation, State, Workspace};

pub use monte_carlo::{monte_carlo_risk, MonteCarloEstimate, TRIAL_CHUNK};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComposeError {
    #[error("row {row}, column {column}: probability {value} outside [0, 1]")]
    Domain { row: usize, column: usize, value: f64 },
    #[error("row {row} has {found} entries, expected {expected}")]
    Shape { row: usize, expected: usize, found: usize },
    #[error("additive baseline cannot represent {category}-dependent element {name:?}")]
    NotLocale { name: String, category: RiskCategory },
    #[error("expected {expected} baseline weights, got {found}")]
    WeightCount { expected: usize, found: usize },
    #[error("baseline weight {0} must be finite and non-negative")]
    BadWeight(f64),
    #[error("matrix has {rows} rows but {states} states")]
    StateCount { rows: usize, states: usize },
}

#[derive(Debug, Error)]
pub enum MatrixDocError {
    #[error("matrix document is not valid JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] ComposeError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("invalid path: {0}")]
    Path(#[from] PathViolation),
    #[error(transparent)]
    Tether(#[from] TetherError),
}

/// Column metadata: which element produced the column and how to normalize it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Column {
    pub name: String,
    #[serde(default = "locale")]
    pub category: RiskCategory,
    /// Largest value the element can take; the additive baseline divides by it.
    #[serde(default = "unit")]
    pub scale: f64,
}

fn locale() -> RiskCategory {
    RiskCategory::Locale
}

fn unit() -> f64 {
    1.0
}

impl Column {
    pub fn of(element: &dyn RiskElement) -> Self {
        Self {
            name: element.name().to_string(),
            category: element.category(),
            scale: element.max_risk(),
        }
    }
}

/// Entry `(i, k)` is `r_k(s_0..s_i)`: the probability that element `k` causes failure at state
/// `i` given the history finished.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RiskMatrix {
    pub states: Vec<State>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
}

impl RiskMatrix {
    /// Builds a matrix from raw rows, checking shape and domain.
    pub fn new(states: Vec<State>, columns: Vec<Column>, rows: Vec<Vec<f64>>) -> Result<Self, ComposeError> {
        let m = Self { states, columns, rows };
        m.check()?;
        Ok(m)
    }

    /// Reads a precomputed matrix document:
    /// `{"states": [[r, c], ..], "columns": [{"name": .., "category": .., "scale": ..}], "rows": [[..], ..]}`.
    /// `category` defaults to locale and `scale` to 1.
    pub fn from_json(text: &str) -> Result<Self, MatrixDocError> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Doc {
            states: Vec<State>,
            columns: Vec<Column>,
            rows: Vec<Vec<f64>>,
        }
        let doc: Doc = serde_json::from_str(text)?;
        Ok(Self::new(doc.states, doc.columns, doc.rows)?)
    }

    pub fn state_count(&self) -> usize {
        self.rows.len()
    }

    pub fn element_count(&self) -> usize {
        self.columns.len()
    }

    fn check(&self) -> Result<(), ComposeError> {
        if self.states.len() != self.rows.len() {
            return Err(ComposeError::StateCount {
                rows: self.rows.len(),
                states: self.states.len(),
            });
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.columns.len() {
                return Err(ComposeError::Shape {
                    row: i,
                    expected: self.columns.len(),
                    found: row.len(),
                });
            }
            check_row(i, row)?;
        }
        Ok(())
    }
}

fn check_row(row: usize, values: &[f64]) -> Result<(), ComposeError> {
    match values.iter().position(|v| !(0.0..=1.0).contains(v)) {
        Some(column) => Err(ComposeError::Domain {
            row,
            column,
            value: values[column],
        }),
        None => Ok(()),
    }
}

/// `sum_k ln(1 - r_k)`; `-inf` when some `r_k = 1`.
pub fn row_log_finish(row: &[f64]) -> f64 {
    row.iter().map(|&r| (-r).ln_1p()).sum()
}

/// `P(F_i) = prod_k (1 - r_k)`.
pub fn state_finish_prob(row: &[f64]) -> Result<f64, ComposeError> {
    check_row(0, row)?;
    Ok(row_log_finish(row).exp())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathRiskReport {
    pub states: Vec<State>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
    pub state_finish_probs: Vec<f64>,
    pub path_finish_prob: f64,
    pub path_risk: f64,
}

impl PathRiskReport {
    /// Per-state risk `1 - P(F_i)`.
    pub fn state_risks(&self) -> Vec<f64> {
        self.state_finish_probs.iter().map(|p| 1.0 - p).collect()
    }
}

pub fn path_risk(matrix: &RiskMatrix) -> Result<PathRiskReport, ComposeError> {
    matrix.check()?;
    let logs: Vec<f64> = matrix.rows.iter().map(|r| row_log_finish(r)).collect();
    let total = logs.iter().fold(0.0, |acc, l| acc + l);
    let path_finish_prob = total.exp();
    Ok(PathRiskReport {
        states: matrix.states.clone(),
        columns: matrix.columns.clone(),
        rows: matrix.rows.clone(),
        state_finish_probs: logs.iter().map(|l| l.exp()).collect(),
        path_finish_prob,
        path_risk: 1.0 - path_finish_prob,
    })
}

/// Incremental evaluation of element rows along a growing prefix. Shared by the matrix
/// evaluator and the planners so both produce bit-identical values.
#[derive(Clone, Debug)]
pub struct Traverse {
    pub prefix: Vec<State>,
    pub tether: Option<TetherState>,
    /// Running `sum_i sum_k ln(1 - r_k)`.
    pub log_finish: f64,
}

impl Traverse {
    /// Starts at `start`; the tether, when tracked, is anchored at `anchor` or at `start`.
    pub fn start(
        workspace: &Workspace,
        elements: &[&dyn RiskElement],
        start: State,
        anchor: Option<State>,
    ) -> Result<(Self, Vec<f64>), EvalError> {
        let tether = if elements.iter().any(|e| e.needs_tether()) {
            let anchor = anchor.unwrap_or(start);
            Some(crate::tether::tether_for_prefix_anchored(
                workspace.map(),
                anchor,
                &[start],
            )?)
        } else {
            None
        };
        let mut t = Self {
            prefix: vec![start],
            tether,
            log_finish: 0.0,
        };
        let row = t.current_row(workspace, elements);
        t.log_finish += row_log_finish(&row);
        Ok((t, row))
    }

    /// Extends by one state and returns the new row.
    pub fn push(
        &mut self,
        workspace: &Workspace,
        elements: &[&dyn RiskElement],
        next: State,
    ) -> Result<Vec<f64>, EvalError> {
        if let Some(t) = &self.tether {
            self.tether = Some(advance_tether(workspace.map(), t, next)?);
        }
        self.prefix.push(next);
        let row = self.current_row(workspace, elements);
        self.log_finish += row_log_finish(&row);
        Ok(row)
    }

    /// Extended copy, leaving `self` untouched.
    pub fn extended(
        &self,
        workspace: &Workspace,
        elements: &[&dyn RiskElement],
        next: State,
    ) -> Result<(Self, Vec<f64>), EvalError> {
        let mut t = self.clone();
        let row = t.push(workspace, elements, next)?;
        Ok((t, row))
    }

    pub fn risk(&self) -> f64 {
        1.0 - self.log_finish.exp()
    }

    fn current_row(&self, workspace: &Workspace, elements: &[&dyn RiskElement]) -> Vec<f64> {
        let step = Step::new(workspace, &self.prefix, self.tether.as_ref());
        elements.iter().map(|e| e.risk(&step).clamp(0.0, 1.0)).collect()
    }
}

/// Evaluates every element on every prefix of a valid path.
pub fn evaluate_risk_matrix(
    workspace: &Workspace,
    path: &Path,
    elements: &[&dyn RiskElement],
) -> Result<RiskMatrix, EvalError> {
    evaluate_risk_matrix_anchored(workspace, path, elements, None)
}

pub fn evaluate_risk_matrix_anchored(
    workspace: &Workspace,
    path: &Path,
    elements: &[&dyn RiskElement],
    anchor: Option<State>,
) -> Result<RiskMatrix, EvalError> {
    validate_path(workspace.map(), path)?;
    let (mut traverse, first) = Traverse::start(workspace, elements, path.states[0], anchor)?;
    let mut rows = vec![first];
    for &s in &path.states[1..] {
        rows.push(traverse.push(workspace, elements, s)?);
    }
    Ok(RiskMatrix {
        states: path.states.clone(),
        columns: elements.iter().map(|&e| Column::of(e)).collect(),
        rows,
    })
}

/// Conventional representation: `sum_i sum_k w_k * normalized(i, k)`, unbounded above.
/// Only locale columns are accepted.
pub fn additive_path_cost(
    matrix: &RiskMatrix,
    weights: &[f64],
    normalization: Normalization,
) -> Result<f64, ComposeError> {
    if weights.len() != matrix.columns.len() {
        return Err(ComposeError::WeightCount {
            expected: matrix.columns.len(),
            found: weights.len(),
        });
    }
    if let Some(&w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(ComposeError::BadWeight(w));
    }
    if let Some(c) = matrix.columns.iter().find(|c| c.category != RiskCategory::Locale) {
        return Err(ComposeError::NotLocale {
            name: c.name.clone(),
            category: c.category,
        });
    }
    matrix.check()?;
    let scales: Vec<f64> = matrix
        .columns
        .iter()
        .map(|c| match normalization {
            Normalization::Identity => 1.0,
            Normalization::ElementMax if c.scale > 0.0 => c.scale,
            Normalization::ElementMax => 1.0,
        })
        .collect();
    Ok(matrix
        .rows
        .iter()
        .map(|row| state_additive_cost(row, weights, &scales))
        .sum())
}

pub(crate) fn state_additive_cost(row: &[f64], weights: &[f64], scales: &[f64]) -> f64 {
    row.iter().zip(weights).zip(scales).map(|((v, w), s)| w * v / s).sum()
}
