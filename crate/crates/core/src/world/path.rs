use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::grid::{GridMap, State};

/// Default feasibility radius for planning: 8-connected moves.
pub const DEFAULT_R_C: f64 = 1.5;

/// Ordered sequence of states with a maximum step length `r_c` (cell units).
///
/// Serializes as the path document: `{"r_c": 1.5, "states": [[2, 2], [3, 3]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Path {
    pub r_c: f64,
    pub states: Vec<State>,
}

impl Path {
    pub fn new(states: Vec<State>, r_c: f64) -> Self {
        Self { r_c, states }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Sum of step lengths, in cell units.
    pub fn arc_length(&self) -> f64 {
        self.states.windows(2).map(|w| w[0].distance(w[1])).sum()
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("path serializes")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ViolationKind {
    Empty,
    OutOfBounds,
    Unviable,
    StepTooLong { length: f64, r_c: f64 },
}

/// First violation found by [`validate_path`].
#[derive(Clone, Debug, PartialEq, Error)]
pub struct PathViolation {
    pub index: usize,
    pub state: Option<State>,
    pub kind: ViolationKind,
}

impl fmt::Display for PathViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = match self.state {
            Some(s) => format!("state {} {}", self.index, s),
            None => format!("state {}", self.index),
        };
        match &self.kind {
            ViolationKind::Empty => write!(f, "path has no states"),
            ViolationKind::OutOfBounds => write!(f, "{at} is outside the map"),
            ViolationKind::Unviable => write!(f, "{at} is unviable"),
            ViolationKind::StepTooLong { length, r_c } => {
                write!(f, "{at}: step length {length:.3} exceeds r_c {r_c:.3}")
            }
        }
    }
}

/// Accepts iff every state is in bounds and viable and every step is no longer than `r_c`.
pub fn validate_path(map: &GridMap, path: &Path) -> Result<(), PathViolation> {
    if path.states.is_empty() {
        return Err(PathViolation {
            index: 0,
            state: None,
            kind: ViolationKind::Empty,
        });
    }
    for (index, &state) in path.states.iter().enumerate() {
        let violation = |kind| PathViolation {
            index,
            state: Some(state),
            kind,
        };
        if !map.contains(state) {
            return Err(violation(ViolationKind::OutOfBounds));
        }
        if !map.is_viable(state) {
            return Err(violation(ViolationKind::Unviable));
        }
        if index > 0 {
            let length = state.distance(path.states[index - 1]);
            // Lattice steps have exact squared lengths; the slack only absorbs r_c given as a decimal.
            if length > path.r_c + 1e-12 {
                return Err(violation(ViolationKind::StepTooLong { length, r_c: path.r_c }));
            }
        }
    }
    Ok(())
}
