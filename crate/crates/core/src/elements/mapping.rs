use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MappingKind {
    /// Linear interpolation between knots, clamped to the end values outside them.
    PiecewiseLinear,
    /// Value of the last knot at or below the input; the first knot's value below it.
    StepTable,
}

#[derive(Debug, Error, PartialEq)]
pub enum MappingError {
    #[error("mapping needs at least one knot")]
    NoKnots,
    #[error("knot {index}: probability {value} outside [0, 1]")]
    Probability { index: usize, value: f64 },
    #[error("knot {index}: inputs must be finite and strictly increasing")]
    Order { index: usize },
    #[error("mapping must be non-increasing in its input (knot {index} rises)")]
    NotNonIncreasing { index: usize },
}

/// Empirical map from an adverse-effect measurement (distance, visibility, ...) to a
/// failure probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMapping", into = "RawMapping")]
pub struct RiskMapping {
    kind: MappingKind,
    knots: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMapping {
    kind: MappingKind,
    knots: Vec<(f64, f64)>,
}

impl TryFrom<RawMapping> for RiskMapping {
    type Error = MappingError;

    fn try_from(raw: RawMapping) -> Result<Self, Self::Error> {
        RiskMapping::new(raw.kind, raw.knots)
    }
}

impl From<RiskMapping> for RawMapping {
    fn from(m: RiskMapping) -> Self {
        RawMapping {
            kind: m.kind,
            knots: m.knots,
        }
    }
}

impl RiskMapping {
    pub fn new(kind: MappingKind, knots: Vec<(f64, f64)>) -> Result<Self, MappingError> {
        if knots.is_empty() {
            return Err(MappingError::NoKnots);
        }
        for (index, &(x, p)) in knots.iter().enumerate() {
            if !(0.0..=1.0).contains(&p) {
                return Err(MappingError::Probability { index, value: p });
            }
            if !x.is_finite() || (index > 0 && x <= knots[index - 1].0) {
                return Err(MappingError::Order { index });
            }
        }
        Ok(Self { kind, knots })
    }

    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self, MappingError> {
        Self::new(MappingKind::PiecewiseLinear, knots)
    }

    pub fn step_table(knots: Vec<(f64, f64)>) -> Result<Self, MappingError> {
        Self::new(MappingKind::StepTable, knots)
    }

    pub fn kind(&self) -> MappingKind {
        self.kind
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn max_probability(&self) -> f64 {
        self.knots.iter().map(|k| k.1).fold(0.0, f64::max)
    }

    /// Checks the declared adverse direction: risk must not grow as the input grows.
    pub fn ensure_non_increasing(&self) -> Result<(), MappingError> {
        match self.knots.windows(2).position(|w| w[1].1 > w[0].1) {
            Some(i) => Err(MappingError::NotNonIncreasing { index: i + 1 }),
            None => Ok(()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let knots = &self.knots;
        let (first, last) = (knots[0], knots[knots.len() - 1]);
        if x.is_nan() {
            return first.1;
        }
        if x <= first.0 {
            return first.1;
        }
        if x >= last.0 {
            return last.1;
        }
        // first.0 < x < last.0, so a bracketing pair exists.
        let upper = knots.partition_point(|k| k.0 <= x);
        let (lo, hi) = (knots[upper - 1], knots[upper]);
        match self.kind {
            MappingKind::StepTable => lo.1,
            MappingKind::PiecewiseLinear => {
                let t = (x - lo.0) / (hi.0 - lo.0);
                (lo.1 + t * (hi.1 - lo.1)).clamp(0.0, 1.0)
            }
        }
    }
}
