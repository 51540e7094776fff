use std::f64::consts::TAU;

use super::geometry::ray_blocked;
use super::grid::{GridMap, State};

pub const DEFAULT_VISIBILITY_RADIUS: f64 = 5.0;
pub const DEFAULT_RAY_COUNT: usize = 32;

const RAY_EPS: f64 = 1e-9;

/// Unit ray directions as `(drow, dcol)`, equally spaced starting along `+col`.
///
/// When the count is a multiple of four the first quadrant is computed once and rotated
/// exactly, so the ray fan is closed under quarter turns of the grid.
pub fn ray_directions(ray_count: usize) -> Vec<(f64, f64)> {
    if ray_count.is_multiple_of(4) {
        let quarter = ray_count / 4;
        let first: Vec<(f64, f64)> = (0..quarter)
            .map(|k| {
                let theta = TAU * k as f64 / ray_count as f64;
                (-theta.sin(), theta.cos())
            })
            .collect();
        let mut out = Vec::with_capacity(ray_count);
        for turn in 0..4 {
            for &(dr, dc) in &first {
                // One counter-clockwise quarter turn maps (dr, dc) to (-dc, dr).
                let rotated = match turn {
                    0 => (dr, dc),
                    1 => (-dc, dr),
                    2 => (-dr, -dc),
                    _ => (dc, -dr),
                };
                out.push(rotated);
            }
        }
        out
    } else {
        (0..ray_count)
            .map(|k| {
                let theta = TAU * k as f64 / ray_count as f64;
                (-theta.sin(), theta.cos())
            })
            .collect()
    }
}

/// Fraction of `ray_count` rays from the center of `s` that reach `radius` without crossing
/// a blocked cell. Cells outside the grid block.
pub fn visibility_fraction(map: &GridMap, s: State, radius: f64, ray_count: usize) -> f64 {
    let origin = (f64::from(s.row), f64::from(s.col));
    let clear = ray_directions(ray_count)
        .into_iter()
        .filter(|&(dr, dc)| {
            let end = (origin.0 + radius * dr, origin.1 + radius * dc);
            !ray_blocked(map, origin, end, RAY_EPS)
        })
        .count();
    clear as f64 / ray_count as f64
}
