//! Taut-tether tracking over a traverse prefix.
//!
//! The tether runs from a fixed anchor to the robot and is kept as the shortest chain
//! homotopic to the traversed polyline. Each move appends the step to the chain and
//! re-tightens it: the robot's previous position, and any contact whose bend no longer
//! presses against an obstacle, is replaced by the convex hull of the obstacle material
//! inside the triangle it spans with its neighbours. Tightening stops when every
//! intermediate vertex is a convex obstacle corner that the chain wraps, which makes the
//! chain locally, and therefore globally, shortest in its homotopy class. Contacts are
//! released and added by the same rule, and a chain that runs straight through a corner
//! does not count it as a contact.

use serde::Serialize;
use thiserror::Error;

use crate::world::geometry::{blocked_cells_in_triangle, corners_of, cross, segment_blocked};
use crate::world::{GridMap, LatticePoint, State};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TetherError {
    #[error("tether cannot advance to {0}: state is unviable or outside the map")]
    Unviable(State),
    #[error("tether cannot advance from {from} to {to}: the step crosses an obstacle")]
    BlockedStep { from: State, to: State },
    #[error("anchor {anchor} has no line of sight to the first state {start}")]
    AnchorOccluded { anchor: State, start: State },
}

/// Taut configuration of the tether for one traverse prefix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TetherState {
    pub anchor: State,
    /// Contact corners from the anchor side to the robot side, in cell coordinates.
    pub contacts: Vec<LatticePoint>,
    pub taut_length: f64,
    pub head: State,
}

impl TetherState {
    /// Tether with the robot at its anchor.
    pub fn at_anchor(anchor: State) -> Self {
        Self {
            anchor,
            contacts: Vec::new(),
            taut_length: 0.0,
            head: anchor,
        }
    }

    pub fn contact_count(&self) -> usize {
        self.contacts.len()
    }

    /// Anchor, contacts and head as lattice points.
    pub fn chain(&self) -> Vec<LatticePoint> {
        let mut chain = Vec::with_capacity(self.contacts.len() + 2);
        chain.push(LatticePoint::center(self.anchor));
        chain.extend_from_slice(&self.contacts);
        chain.push(LatticePoint::center(self.head));
        chain
    }
}

/// Extends the traverse by one move and returns the re-tightened tether.
///
/// The robot must stay on viable cells and the straight move itself must not cross an
/// obstacle; moves between 8-neighbours always satisfy the latter.
pub fn advance_tether(map: &GridMap, tether: &TetherState, next: State) -> Result<TetherState, TetherError> {
    if !map.is_viable(next) {
        return Err(TetherError::Unviable(next));
    }
    let head = LatticePoint::center(tether.head);
    let target = LatticePoint::center(next);
    if segment_blocked(map, head, target) {
        return Err(TetherError::BlockedStep {
            from: tether.head,
            to: next,
        });
    }
    let mut chain: Vec<Vertex> = Vec::with_capacity(tether.contacts.len() + 3);
    chain.push(Vertex::fixed(LatticePoint::center(tether.anchor)));
    chain.extend(tether.contacts.iter().map(|&p| Vertex::contact(p)));
    if tether.head != tether.anchor || !tether.contacts.is_empty() {
        chain.push(Vertex::free(head));
    }
    chain.push(Vertex::fixed(target));
    tighten(map, &mut chain);

    let points: Vec<LatticePoint> = chain.iter().map(|v| v.point).collect();
    let taut_length = points.windows(2).map(|w| w[0].distance(w[1])).sum();
    let contacts = points[1..points.len() - 1].to_vec();
    Ok(TetherState {
        anchor: tether.anchor,
        contacts,
        taut_length,
        head: next,
    })
}

/// Folds [`advance_tether`] over a prefix, anchored at its first state.
pub fn tether_for_prefix(map: &GridMap, prefix: &[State]) -> Result<TetherState, TetherError> {
    let Some(&start) = prefix.first() else {
        panic!("tether_for_prefix needs at least one state");
    };
    tether_for_prefix_anchored(map, start, prefix)
}

/// As [`tether_for_prefix`] with an explicit anchor, which must see the first state.
pub fn tether_for_prefix_anchored(map: &GridMap, anchor: State, prefix: &[State]) -> Result<TetherState, TetherError> {
    let mut tether = TetherState::at_anchor(anchor);
    let Some(&start) = prefix.first() else {
        return Ok(tether);
    };
    if !map.is_viable(anchor) {
        return Err(TetherError::Unviable(anchor));
    }
    if start != anchor {
        tether = advance_tether(map, &tether, start).map_err(|e| match e {
            TetherError::BlockedStep { .. } => TetherError::AnchorOccluded { anchor, start },
            other => other,
        })?;
    }
    for &s in &prefix[1..] {
        tether = advance_tether(map, &tether, s)?;
    }
    Ok(tether)
}

#[derive(Clone, Copy, Debug)]
struct Vertex {
    point: LatticePoint,
    kind: VertexKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum VertexKind {
    /// Chain endpoints: anchor and robot.
    Fixed,
    /// A previous robot position; never load-bearing.
    Free,
    Contact,
}

impl Vertex {
    fn fixed(point: LatticePoint) -> Self {
        Self {
            point,
            kind: VertexKind::Fixed,
        }
    }

    fn free(point: LatticePoint) -> Self {
        Self {
            point,
            kind: VertexKind::Free,
        }
    }

    fn contact(point: LatticePoint) -> Self {
        Self {
            point,
            kind: VertexKind::Contact,
        }
    }
}

fn tighten(map: &GridMap, chain: &mut Vec<Vertex>) {
    // Each replacement strictly shortens the chain or removes a vertex, so this terminates.
    loop {
        let slack = (1..chain.len().saturating_sub(1)).rev().find(|&i| match chain[i].kind {
            VertexKind::Free => true,
            VertexKind::Contact => !wraps(map, chain[i - 1].point, chain[i].point, chain[i + 1].point),
            VertexKind::Fixed => false,
        });
        let Some(i) = slack else { break };
        let bridge = hull_bridge(map, chain[i - 1].point, chain[i].point, chain[i + 1].point);
        chain.splice(i..=i, bridge.into_iter().map(Vertex::contact));
    }
}

/// Whether the chain `u -> c -> w` bends around an obstacle cell incident to corner `c`.
fn wraps(map: &GridMap, u: LatticePoint, c: LatticePoint, w: LatticePoint) -> bool {
    if cross(u, c, w) == 0 {
        return false;
    }
    c.incident_cells()
        .into_iter()
        .any(|(r, col)| map.is_blocked(r, col) && crate::world::geometry::triangle_meets_cell(u, c, w, r, col))
}

/// Shortest chain from `u` to `w` homotopic to `u -> v -> w`: the side of the convex hull of
/// the obstacle material inside triangle `(u, v, w)` facing `v`. Returns the intermediate
/// vertices only.
fn hull_bridge(map: &GridMap, u: LatticePoint, v: LatticePoint, w: LatticePoint) -> Vec<LatticePoint> {
    let side = cross(u, w, v).signum();
    if side == 0 {
        return Vec::new();
    }
    let orient = cross(u, v, w).signum();
    let in_closed_triangle =
        |p: LatticePoint| cross(u, v, p) * orient >= 0 && cross(v, w, p) * orient >= 0 && cross(w, u, p) * orient >= 0;
    let mut candidates: Vec<LatticePoint> = blocked_cells_in_triangle(map, u, v, w)
        .into_iter()
        .flat_map(corners_of)
        .filter(|&p| in_closed_triangle(p) && cross(u, w, p) * side > 0)
        .collect();
    candidates.sort();
    candidates.dedup();
    if candidates.is_empty() {
        return Vec::new();
    }
    candidates.push(w);

    let mut bridge = Vec::new();
    let mut current = u;
    loop {
        let mut best: Option<LatticePoint> = None;
        for &p in &candidates {
            if p == current {
                continue;
            }
            best = match best {
                None => Some(p),
                Some(b) => {
                    let turn = cross(current, b, p) * side;
                    let farther = current.distance(p) > current.distance(b);
                    if turn > 0 || (turn == 0 && farther) {
                        Some(p)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        let next = best.expect("w is always a candidate");
        if next == w {
            break;
        }
        bridge.push(next);
        current = next;
    }
    bridge
}
