//! Element configuration document.
//!
//! ```json
//! {
//!   "elements": [
//!     {"name": "obstacle_distance", "category": "locale",
//!      "mapping": {"kind": "piecewise-linear", "knots": [[1.0, 0.04], [2.0, 0.0]]}},
//!     {"name": "turn", "category": "action", "coeff": 0.0283},
//!     {"name": "tether_contacts", "category": "traverse", "per_contact": 0.03}
//!   ],
//!   "baseline": {"normalization": "element-max", "weights": {"obstacle_distance": 1.0}}
//! }
//! ```

use std::collections::BTreeMap;
use std::ops::Deref;

use serde::Deserialize;
use thiserror::Error;

use super::builtin::{ActionLength, ObstacleDistance, TetherContacts, TetherLength, Turn, Visibility, BUILTIN_NAMES};
use super::{MappingError, RiskCategory, RiskElement, RiskMapping};
use crate::world::{DEFAULT_RAY_COUNT, DEFAULT_VISIBILITY_RADIUS};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("element config is not valid JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("unknown risk element {0:?} (known: {known})", known = BUILTIN_NAMES.join(", "))]
    UnknownElement(String),
    #[error("element {name:?} is {actual}-dependent, config declares {declared}")]
    CategoryMismatch {
        name: String,
        declared: RiskCategory,
        actual: RiskCategory,
    },
    #[error("element {name:?}: missing parameter {param:?}")]
    MissingParameter { name: String, param: &'static str },
    #[error("element {name:?}: parameter {param:?} does not apply")]
    UnexpectedParameter { name: String, param: &'static str },
    #[error("element {name:?}: {reason}")]
    BadParameter { name: String, reason: String },
    #[error("element {name:?}: {source}")]
    Mapping {
        name: String,
        #[source]
        source: MappingError,
    },
    #[error("element {0:?} appears more than once")]
    Duplicate(String),
    #[error("baseline weight given for unconfigured element {0:?}")]
    UnknownWeight(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Raw element values.
    Identity,
    /// Each element divided by its largest possible value.
    #[default]
    ElementMax,
}

/// Settings for the conventional additive baseline.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineSpec {
    #[serde(default)]
    pub normalization: Normalization,
    /// Per-element weights; unlisted locale elements weigh 1.
    #[serde(default)]
    pub weights: BTreeMap<String, f64>,
}

impl BaselineSpec {
    pub fn weight(&self, name: &str) -> f64 {
        self.weights.get(name).copied().unwrap_or(1.0)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    elements: Vec<ElementSpec>,
    #[serde(default)]
    baseline: BaselineSpec,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementSpec {
    name: String,
    category: Option<RiskCategory>,
    mapping: Option<RiskMapping>,
    coeff: Option<f64>,
    per_contact: Option<f64>,
    radius: Option<f64>,
    ray_count: Option<usize>,
}

/// The configured elements, in column order, plus baseline settings.
#[derive(Debug, Default)]
pub struct ElementSet {
    pub elements: Vec<Box<dyn RiskElement>>,
    pub baseline: BaselineSpec,
}

impl ElementSet {
    pub fn new(elements: Vec<Box<dyn RiskElement>>) -> Self {
        Self {
            elements,
            baseline: BaselineSpec::default(),
        }
    }

    /// Locale elements only, with their baseline weights, for the additive representation.
    pub fn locale(&self) -> (Vec<&dyn RiskElement>, Vec<f64>) {
        self.elements
            .iter()
            .filter(|e| e.category() == RiskCategory::Locale)
            .map(|e| (e.as_ref(), self.baseline.weight(e.name())))
            .unzip()
    }

    /// Borrowed view of all elements.
    pub fn as_refs(&self) -> Vec<&dyn RiskElement> {
        self.elements.iter().map(|e| e.as_ref()).collect()
    }
}

impl Deref for ElementSet {
    type Target = [Box<dyn RiskElement>];

    fn deref(&self) -> &Self::Target {
        &self.elements
    }
}

pub fn load_elements(text: &str) -> Result<ElementSet, ConfigError> {
    let doc: Document = serde_json::from_str(text)?;
    let mut elements: Vec<Box<dyn RiskElement>> = Vec::with_capacity(doc.elements.len());
    for spec in doc.elements {
        if elements.iter().any(|e| e.name() == spec.name) {
            return Err(ConfigError::Duplicate(spec.name));
        }
        elements.push(build(spec)?);
    }
    for (name, &w) in &doc.baseline.weights {
        if !elements.iter().any(|e| e.name() == name) {
            return Err(ConfigError::UnknownWeight(name.clone()));
        }
        if !(w.is_finite() && w >= 0.0) {
            return Err(ConfigError::BadParameter {
                name: name.clone(),
                reason: format!("baseline weight {w} must be finite and non-negative"),
            });
        }
    }
    Ok(ElementSet {
        elements,
        baseline: doc.baseline,
    })
}

fn build(spec: ElementSpec) -> Result<Box<dyn RiskElement>, ConfigError> {
    let name = spec.name.clone();
    let missing = |param| ConfigError::MissingParameter {
        name: name.clone(),
        param,
    };
    let unexpected = |param| ConfigError::UnexpectedParameter {
        name: name.clone(),
        param,
    };
    let coefficient = |value: Option<f64>, param: &'static str| -> Result<f64, ConfigError> {
        let v = value.ok_or_else(|| missing(param))?;
        if !(v.is_finite() && v >= 0.0) {
            return Err(ConfigError::BadParameter {
                name: name.clone(),
                reason: format!("{param} = {v} must be finite and non-negative"),
            });
        }
        Ok(v)
    };
    let decreasing_mapping = |mapping: Option<RiskMapping>| -> Result<RiskMapping, ConfigError> {
        let m = mapping.ok_or_else(|| missing("mapping"))?;
        m.ensure_non_increasing().map_err(|source| ConfigError::Mapping {
            name: name.clone(),
            source,
        })?;
        Ok(m)
    };

    let has_mapping = spec.mapping.is_some();
    let element: Box<dyn RiskElement> = match spec.name.as_str() {
        "obstacle_distance" => Box::new(ObstacleDistance {
            mapping: decreasing_mapping(spec.mapping)?,
        }),
        "visibility" => {
            let radius = spec.radius.unwrap_or(DEFAULT_VISIBILITY_RADIUS);
            let ray_count = spec.ray_count.unwrap_or(DEFAULT_RAY_COUNT);
            if !(radius.is_finite() && radius > 0.0) || ray_count < 4 {
                return Err(ConfigError::BadParameter {
                    name,
                    reason: "visibility needs radius > 0 and ray_count >= 4".into(),
                });
            }
            Box::new(Visibility {
                mapping: decreasing_mapping(spec.mapping)?,
                radius,
                ray_count,
            })
        }
        "action_length" => Box::new(ActionLength {
            coeff: coefficient(spec.coeff, "coeff")?,
        }),
        "turn" => Box::new(Turn {
            coeff: coefficient(spec.coeff, "coeff")?,
        }),
        "tether_length" => Box::new(TetherLength {
            coeff: coefficient(spec.coeff, "coeff")?,
        }),
        "tether_contacts" => Box::new(TetherContacts {
            per_contact: coefficient(spec.per_contact.or(Some(super::DEFAULT_PER_CONTACT)), "per_contact")?,
        }),
        _ => return Err(ConfigError::UnknownElement(spec.name)),
    };

    let uses_mapping = matches!(element.name(), "obstacle_distance" | "visibility");
    if !uses_mapping && has_mapping {
        return Err(unexpected("mapping"));
    }
    if !matches!(element.name(), "action_length" | "turn" | "tether_length") && spec.coeff.is_some() {
        return Err(unexpected("coeff"));
    }
    if element.name() != "tether_contacts" && spec.per_contact.is_some() {
        return Err(unexpected("per_contact"));
    }
    if element.name() != "visibility" && (spec.radius.is_some() || spec.ray_count.is_some()) {
        return Err(unexpected("radius/ray_count"));
    }
    if let Some(declared) = spec.category {
        if declared != element.category() {
            return Err(ConfigError::CategoryMismatch {
                name,
                declared,
                actual: element.category(),
            });
        }
    }
    Ok(element)
}
