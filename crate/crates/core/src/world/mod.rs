//! Workspace tessellation, states, paths and the geometric fields derived from a map.

mod distance;
pub mod geometry;
mod grid;
mod path;
mod visibility;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

pub use distance::{distance_transform, DistanceField};
pub use geometry::LatticePoint;
pub use grid::{load_map, Action, GridMap, MapError, State};
pub use path::{validate_path, Path, PathViolation, ViolationKind, DEFAULT_R_C};
pub use visibility::{ray_directions, visibility_fraction, DEFAULT_RAY_COUNT, DEFAULT_VISIBILITY_RADIUS};

/// A map together with lazily computed per-cell fields, shared by all risk elements that
/// evaluate against it.
#[derive(Debug)]
pub struct Workspace {
    map: GridMap,
    distance: OnceLock<DistanceField>,
    visibility: Mutex<HashMap<VisibilityKey, Arc<Vec<f64>>>>,
}

/// Radius bits and ray count of a cached visibility field.
type VisibilityKey = (u64, usize);

impl Workspace {
    pub fn new(map: GridMap) -> Self {
        Self {
            map,
            distance: OnceLock::new(),
            visibility: Mutex::new(HashMap::new()),
        }
    }

    pub fn map(&self) -> &GridMap {
        &self.map
    }

    pub fn distance_field(&self) -> &DistanceField {
        self.distance.get_or_init(|| distance_transform(&self.map))
    }

    /// Cached [`visibility_fraction`] for every viable cell; `NaN` on unviable cells.
    pub fn visibility_field(&self, radius: f64, ray_count: usize) -> Arc<Vec<f64>> {
        let key = (radius.to_bits(), ray_count);
        let mut cache = self.visibility.lock().expect("visibility cache poisoned");
        cache
            .entry(key)
            .or_insert_with(|| {
                Arc::new(
                    self.map
                        .states()
                        .map(|s| {
                            if self.map.is_viable(s) {
                                visibility_fraction(&self.map, s, radius, ray_count)
                            } else {
                                f64::NAN
                            }
                        })
                        .collect(),
                )
            })
            .clone()
    }

    pub fn visibility(&self, s: State, radius: f64, ray_count: usize) -> f64 {
        if !self.map.contains(s) {
            return 0.0;
        }
        let field = self.visibility_field(radius, ray_count);
        field[s.row as usize * self.map.width() + s.col as usize]
    }
}

impl From<GridMap> for Workspace {
    fn from(map: GridMap) -> Self {
        Self::new(map)
    }
}
