use crate::tether::TetherState;
use crate::world::{State, Workspace, DEFAULT_RAY_COUNT, DEFAULT_VISIBILITY_RADIUS};

use super::{RiskCategory, RiskElement, RiskMapping, Step};

pub const DEFAULT_PER_CONTACT: f64 = 0.03;

pub const BUILTIN_NAMES: [&str; 6] = [
    "obstacle_distance",
    "visibility",
    "action_length",
    "turn",
    "tether_length",
    "tether_contacts",
];

fn proportional(coeff: f64, magnitude: f64) -> f64 {
    (coeff * magnitude).clamp(0.0, 1.0)
}

/// Risk from proximity: the mapping applied to the distance from `s` to the nearest obstacle.
pub fn obstacle_distance_risk(workspace: &Workspace, s: State, mapping: &RiskMapping) -> f64 {
    let d = workspace.distance_field().get(s).unwrap_or(0.0);
    mapping.eval(d)
}

pub fn visibility_risk(workspace: &Workspace, s: State, mapping: &RiskMapping, radius: f64, ray_count: usize) -> f64 {
    mapping.eval(workspace.visibility(s, radius, ray_count))
}

/// `min(1, coeff * |s_i - s_{i-1}|)`.
pub fn action_length_risk(previous: State, current: State, coeff: f64) -> f64 {
    proportional(coeff, (current - previous).norm())
}

/// `min(1, coeff * |a_i - a_{i-1}|)` with `a_i = s_i - s_{i-1}`.
pub fn turn_risk(before: State, previous: State, current: State, coeff: f64) -> f64 {
    let last = previous - before;
    let this = current - previous;
    proportional(coeff, (this - last).norm())
}

pub fn tether_length_risk(tether: &TetherState, coeff: f64) -> f64 {
    proportional(coeff, tether.taut_length)
}

pub fn tether_contact_risk(tether: &TetherState, per_contact: f64) -> f64 {
    proportional(per_contact, tether.contact_count() as f64)
}

/// Locale: distance to the closest obstacle.
#[derive(Clone, Debug)]
pub struct ObstacleDistance {
    pub mapping: RiskMapping,
}

impl RiskElement for ObstacleDistance {
    fn name(&self) -> &str {
        "obstacle_distance"
    }

    fn category(&self) -> RiskCategory {
        RiskCategory::Locale
    }

    fn risk(&self, step: &Step<'_>) -> f64 {
        obstacle_distance_risk(step.workspace(), step.current(), &self.mapping)
    }

    fn max_risk(&self) -> f64 {
        self.mapping.max_probability()
    }
}

/// Locale: fraction of unobstructed sight lines around the state.
#[derive(Clone, Debug)]
pub struct Visibility {
    pub mapping: RiskMapping,
    pub radius: f64,
    pub ray_count: usize,
}

impl Visibility {
    pub fn new(mapping: RiskMapping) -> Self {
        Self {
            mapping,
            radius: DEFAULT_VISIBILITY_RADIUS,
            ray_count: DEFAULT_RAY_COUNT,
        }
    }
}

impl RiskElement for Visibility {
    fn name(&self) -> &str {
        "visibility"
    }

    fn category(&self) -> RiskCategory {
        RiskCategory::Locale
    }

    fn risk(&self, step: &Step<'_>) -> f64 {
        visibility_risk(
            step.workspace(),
            step.current(),
            &self.mapping,
            self.radius,
            self.ray_count,
        )
    }

    fn max_risk(&self) -> f64 {
        self.mapping.max_probability()
    }
}

/// Action: length of the last move. Zero at the first state.
#[derive(Clone, Debug)]
pub struct ActionLength {
    pub coeff: f64,
}

impl RiskElement for ActionLength {
    fn name(&self) -> &str {
        "action_length"
    }

    fn category(&self) -> RiskCategory {
        RiskCategory::Action
    }

    fn risk(&self, step: &Step<'_>) -> f64 {
        match step.back(1) {
            Some(previous) => action_length_risk(previous, step.current(), self.coeff),
            None => 0.0,
        }
    }
}

/// Action: difference between the last two moves. Zero before the second move.
#[derive(Clone, Debug)]
pub struct Turn {
    pub coeff: f64,
}

impl RiskElement for Turn {
    fn name(&self) -> &str {
        "turn"
    }

    fn category(&self) -> RiskCategory {
        RiskCategory::Action
    }

    fn risk(&self, step: &Step<'_>) -> f64 {
        match (step.back(2), step.back(1)) {
            (Some(before), Some(previous)) => turn_risk(before, previous, step.current(), self.coeff),
            _ => 0.0,
        }
    }
}

/// Traverse: taut tether length.
#[derive(Clone, Debug)]
pub struct TetherLength {
    pub coeff: f64,
}

impl RiskElement for TetherLength {
    fn name(&self) -> &str {
        "tether_length"
    }

    fn category(&self) -> RiskCategory {
        RiskCategory::Traverse
    }

    fn risk(&self, step: &Step<'_>) -> f64 {
        tether_length_risk(step.tether(), self.coeff)
    }

    fn needs_tether(&self) -> bool {
        true
    }
}

/// Traverse: number of tether contact points.
#[derive(Clone, Debug)]
pub struct TetherContacts {
    pub per_contact: f64,
}

impl Default for TetherContacts {
    fn default() -> Self {
        Self {
            per_contact: DEFAULT_PER_CONTACT,
        }
    }
}

impl RiskElement for TetherContacts {
    fn name(&self) -> &str {
        "tether_contacts"
    }

    fn category(&self) -> RiskCategory {
        RiskCategory::Traverse
    }

    fn risk(&self, step: &Step<'_>) -> f64 {
        tether_contact_risk(step.tether(), self.per_contact)
    }

    fn needs_tether(&self) -> bool {
        true
    }
}
