//! Risk elements: sources of adverse effect that assign each state a conditional failure
//! probability given the traverse that led to it.
//!
//! Every element declares a [`RiskCategory`] bounding how much history it may read:
//! locale elements see only the current state, action elements the last two transitions,
//! traverse elements the whole prefix. New elements implement [`RiskElement`]; see the
//! README for an example.

mod builtin;
mod config;
mod mapping;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::tether::TetherState;
use crate::world::{State, Workspace};

pub use builtin::{
    action_length_risk, obstacle_distance_risk, tether_contact_risk, tether_length_risk, turn_risk, visibility_risk,
    ActionLength, ObstacleDistance, TetherContacts, TetherLength, Turn, Visibility, BUILTIN_NAMES, DEFAULT_PER_CONTACT,
};
pub use config::{load_elements, BaselineSpec, ConfigError, ElementSet, Normalization};
pub use mapping::{MappingError, MappingKind, RiskMapping};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RiskCategory {
    Locale,
    Action,
    Traverse,
}

impl RiskCategory {
    /// States of history, besides the current one, an element of this category may read.
    /// `None` means the full prefix.
    pub fn history_depth(self) -> Option<usize> {
        match self {
            RiskCategory::Locale => Some(0),
            RiskCategory::Action => Some(2),
            RiskCategory::Traverse => None,
        }
    }
}

impl fmt::Display for RiskCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RiskCategory::Locale => "locale",
            RiskCategory::Action => "action",
            RiskCategory::Traverse => "traverse",
        })
    }
}

/// Evaluation context for one state: the workspace, the traverse prefix `s_0..=s_i`, and the
/// taut tether for that prefix when some element asked for it.
#[derive(Clone, Copy)]
pub struct Step<'a> {
    workspace: &'a Workspace,
    prefix: &'a [State],
    tether: Option<&'a TetherState>,
}

impl<'a> Step<'a> {
    pub fn new(workspace: &'a Workspace, prefix: &'a [State], tether: Option<&'a TetherState>) -> Self {
        assert!(!prefix.is_empty(), "a step needs at least the current state");
        Self {
            workspace,
            prefix,
            tether,
        }
    }

    pub fn workspace(&self) -> &'a Workspace {
        self.workspace
    }

    pub fn prefix(&self) -> &'a [State] {
        self.prefix
    }

    /// Index `i` of the current state in the path.
    pub fn index(&self) -> usize {
        self.prefix.len() - 1
    }

    pub fn current(&self) -> State {
        self.prefix[self.prefix.len() - 1]
    }

    /// The state `back` positions before the current one, if the prefix reaches that far.
    pub fn back(&self, back: usize) -> Option<State> {
        self.index().checked_sub(back).map(|i| self.prefix[i])
    }

    /// Tether for this prefix. Present whenever an element with
    /// [`RiskElement::needs_tether`] is evaluated by this crate's drivers.
    pub fn tether(&self) -> &'a TetherState {
        self.tether
            .expect("tether-dependent element evaluated without a tether state")
    }
}

pub trait RiskElement: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    fn category(&self) -> RiskCategory;

    /// `P(element causes failure at s_i | s_0..s_{i-1} finished)`, in `[0, 1]`.
    fn risk(&self, step: &Step<'_>) -> f64;

    fn needs_tether(&self) -> bool {
        false
    }

    /// Upper bound of [`RiskElement::risk`]; the additive baseline normalizes by it.
    fn max_risk(&self) -> f64 {
        1.0
    }
}
