//! Independent reference implementations used by the integration suites.
//!
//! Nothing here calls the library's geometry, distance or search code. Oracles work on
//! doubled integer coordinates (cell centers even, corners odd) and brute force.

#![allow(dead_code)]

pub mod suites;

use std::collections::{BinaryHeap, HashMap};
use std::path::PathBuf;

use motion_risk::compose::{evaluate_risk_matrix_anchored, path_risk, Column, RiskMatrix};
use motion_risk::elements::RiskElement;
use motion_risk::world::{GridMap, LatticePoint, Path, State, Workspace};
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

pub fn states(pairs: &[(i32, i32)]) -> Vec<State> {
    pairs.iter().map(|&(r, c)| State::new(r, c)).collect()
}

/// Random map with each cell blocked with probability `density`.
pub fn random_map<R: Rng>(rng: &mut R, height: usize, width: usize, density: f64) -> GridMap {
    let viable = (0..width * height).map(|_| !rng.gen_bool(density)).collect();
    GridMap::new(width, height, viable).unwrap()
}

fn blocked(map: &GridMap, row: i64, col: i64) -> bool {
    row < 0
        || col < 0
        || row >= map.height() as i64
        || col >= map.width() as i64
        || !map.is_viable(State::new(row as i32, col as i32))
}

// ---------------------------------------------------------------------------------------
// Distance transform

/// Minimum center-to-center distance to any in-grid blocked cell, by exhaustive scan.
pub fn brute_distance(map: &GridMap, s: State) -> f64 {
    let mut best = i64::MAX;
    for r in 0..map.height() as i64 {
        for c in 0..map.width() as i64 {
            if blocked(map, r, c) {
                let (dr, dc) = (r - s.row as i64, c - s.col as i64);
                best = best.min(dr * dr + dc * dc);
            }
        }
    }
    if best == i64::MAX {
        f64::INFINITY
    } else {
        (best as f64).sqrt()
    }
}

// ---------------------------------------------------------------------------------------
// Segment clearance

type P = (i64, i64);

/// Open parameter interval of `t` for which `lo < a + t d < hi`.
fn slab(a: i64, d: i64, lo: i64, hi: i64) -> Option<(f64, f64)> {
    if d == 0 {
        return (lo < a && a < hi).then_some((f64::NEG_INFINITY, f64::INFINITY));
    }
    let (t0, t1) = ((lo - a) as f64 / d as f64, (hi - a) as f64 / d as f64);
    Some((t0.min(t1), t0.max(t1)))
}

/// Whether the closed segment `a b` meets the open square of cell `(row, col)`, by
/// Liang-Barsky clipping. Quotients of small integers compare exactly in `f64`.
fn meets_open_cell(a: P, b: P, row: i64, col: i64) -> bool {
    let (r0, c0) = (2 * row - 1, 2 * col - 1);
    let Some((x0, x1)) = slab(a.0, b.0 - a.0, r0, r0 + 2) else {
        return false;
    };
    let Some((y0, y1)) = slab(a.1, b.1 - a.1, c0, c0 + 2) else {
        return false;
    };
    let (lo, hi) = (x0.max(y0), x1.min(y1));
    lo < hi && lo < 1.0 && hi > 0.0
}

/// Whether the segment runs with positive length along an edge shared by two blocked cells.
fn along_blocked_seam(map: &GridMap, a: P, b: P) -> bool {
    // Edges lie on odd lines; a segment on such a line has both endpoints on it.
    let check = |fixed_is_row: bool| {
        let (line, u, v) = if fixed_is_row { (a.0, a.1, b.1) } else { (a.1, a.0, b.0) };
        let (u, v) = (u.min(v), u.max(v));
        // Unit edges along the line span [2k - 1, 2k + 1] in the running coordinate.
        let mut k = (u + 1).div_euclid(2) - 1;
        while 2 * k - 1 < v {
            let (e0, e1) = (2 * k - 1, 2 * k + 1);
            if e0.max(u) < e1.min(v) {
                let (x, y) = ((line - 1) / 2, (line + 1) / 2);
                let pair = if fixed_is_row {
                    blocked(map, x, k) && blocked(map, y, k)
                } else {
                    blocked(map, k, x) && blocked(map, k, y)
                };
                if pair {
                    return true;
                }
            }
            k += 1;
        }
        false
    };
    (a.0 == b.0 && a.0.rem_euclid(2) == 1 && check(true)) || (a.1 == b.1 && a.1.rem_euclid(2) == 1 && check(false))
}

/// Segment clearance against the union of blocked cells, everything outside the grid
/// included.
pub fn segment_clear(map: &GridMap, a: P, b: P) -> bool {
    let (rmin, rmax) = (a.0.min(b.0).div_euclid(2) - 1, a.0.max(b.0).div_euclid(2) + 1);
    let (cmin, cmax) = (a.1.min(b.1).div_euclid(2) - 1, a.1.max(b.1).div_euclid(2) + 1);
    for r in rmin..=rmax {
        for c in cmin..=cmax {
            if blocked(map, r, c) && meets_open_cell(a, b, r, c) {
                return false;
            }
        }
    }
    !along_blocked_seam(map, a, b)
}

// ---------------------------------------------------------------------------------------
// Random traverses

/// Random walk of clear 8-neighbour moves from a random viable cell, `steps` long at most.
pub fn random_walk<R: Rng>(rng: &mut R, map: &GridMap, steps: usize) -> Option<Vec<State>> {
    let viable: Vec<State> = map.viable_states().collect();
    if viable.is_empty() {
        return None;
    }
    let mut walk = vec![viable[rng.gen_range(0..viable.len())]];
    for _ in 0..steps {
        let s = *walk.last().unwrap();
        let options: Vec<State> = (-1..=1)
            .flat_map(|dr| (-1..=1).map(move |dc| (dr, dc)))
            .filter(|&d| d != (0, 0))
            .map(|(dr, dc)| State::new(s.row + dr, s.col + dc))
            .filter(|&t| map.is_viable(t) && segment_clear(map, center(s), center(t)))
            .collect();
        if options.is_empty() {
            break;
        }
        walk.push(options[rng.gen_range(0..options.len())]);
    }
    Some(walk)
}

pub fn center(s: State) -> P {
    (2 * s.row as i64, 2 * s.col as i64)
}

// ---------------------------------------------------------------------------------------
// Taut tether

/// Ray direction out of every blocked cell center: steep enough that, inside any map this
/// suite builds, rays from different centers never meet and never pass through a lattice point.
const RAY: P = (-4099, 1);

fn cross2(u: P, v: P) -> i128 {
    u.0 as i128 * v.1 as i128 - u.1 as i128 * v.0 as i128
}

/// Signed ray crossings of segment `a -> b`, in order along the segment. Letter `k + 1` or
/// `-(k + 1)` stands for crossing the ray from `centers[k]` in either direction.
fn crossing_letters(a: P, b: P, centers: &[P]) -> Vec<i32> {
    let ab = (b.0 - a.0, b.1 - a.1);
    let denom = cross2(ab, RAY);
    if denom == 0 {
        return Vec::new();
    }
    let mut hits: Vec<(i128, i128, i32)> = Vec::new();
    for (k, &q) in centers.iter().enumerate() {
        let aq = (q.0 - a.0, q.1 - a.1);
        // a + t (b - a) = q + u RAY with t = t_num / denom, u = u_num / denom.
        let (mut t_num, mut u_num, mut den) = (cross2(aq, RAY), cross2(aq, ab), denom);
        if den < 0 {
            (t_num, u_num, den) = (-t_num, -u_num, -den);
        }
        if u_num > 0 && t_num > 0 && t_num < den {
            hits.push((t_num, den, if denom > 0 { k as i32 + 1 } else { -(k as i32 + 1) }));
        }
    }
    hits.sort_by(|x, y| (x.0 * y.1).cmp(&(y.0 * x.1)));
    hits.into_iter().map(|h| h.2).collect()
}

/// Appends letters to a freely reduced word, cancelling inverse pairs.
fn extend_reduced(word: &mut Vec<i32>, letters: &[i32]) {
    for &l in letters {
        if word.last() == Some(&-l) {
            word.pop();
        } else {
            word.push(l);
        }
    }
}

/// Convex obstacle corners: one blocked incident cell, or two diagonal ones.
fn convex_corners(map: &GridMap) -> Vec<P> {
    let mut out = Vec::new();
    for r2 in (-1..=2 * map.height() as i64 - 1).step_by(2) {
        for c2 in (-1..=2 * map.width() as i64 - 1).step_by(2) {
            let (r0, r1, c0, c1) = ((r2 - 1) / 2, (r2 + 1) / 2, (c2 - 1) / 2, (c2 + 1) / 2);
            let b = [
                blocked(map, r0, c0),
                blocked(map, r0, c1),
                blocked(map, r1, c0),
                blocked(map, r1, c1),
            ];
            let n = b.iter().filter(|&&x| x).count();
            if n == 1 || (n == 2 && b[0] == b[3]) {
                out.push((r2, c2));
            }
        }
    }
    out
}

fn dist(a: P, b: P) -> f64 {
    (((a.0 - b.0).pow(2) + (a.1 - b.1).pow(2)) as f64).sqrt() / 2.0
}

/// Search node: a vertex reached with a given reduced crossing word, i.e. a point of the
/// universal cover of the free space.
type Node = (P, Vec<i32>);

struct Item {
    f: f64,
    g: f64,
    node: usize,
}

impl PartialEq for Item {
    fn eq(&self, other: &Self) -> bool {
        self.f == other.f
    }
}
impl Eq for Item {}
impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Item {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.f.total_cmp(&self.f).then(other.node.cmp(&self.node))
    }
}

/// Shortest corner chain from the anchor to the head that is homotopic to the traverse:
/// walk and chain spell the same reduced word of crossings with rays cast from every blocked
/// cell center. A* over (vertex, word) nodes, so repeated corners and any number of them are
/// allowed. Returns the corners with collinear ones dropped and the length, or `None` when
/// `budget` pops run out.
pub fn oracle_tether(map: &GridMap, traverse: &[State], budget: usize) -> Option<(Vec<LatticePoint>, f64)> {
    let anchor = center(traverse[0]);
    let head = center(*traverse.last().unwrap());
    let corners = convex_corners(map);
    let blocked_centers: Vec<P> = map.unviable_states().map(center).collect();
    assert!(
        2 * map.height().max(map.width()) < RAY.0.unsigned_abs() as usize,
        "map too large for the ray direction"
    );
    let mut target = Vec::new();
    for w in traverse.windows(2) {
        extend_reduced(
            &mut target,
            &crossing_letters(center(w[0]), center(w[1]), &blocked_centers),
        );
    }
    let mut clear_cache: HashMap<(P, P), bool> = HashMap::new();
    let mut clear = |a: P, b: P| {
        *clear_cache
            .entry((a.min(b), a.max(b)))
            .or_insert_with(|| segment_clear(map, a, b))
    };

    let mut nodes: Vec<Node> = vec![(anchor, Vec::new())];
    let mut parent: Vec<usize> = vec![usize::MAX];
    let mut best_g: HashMap<Node, f64> = HashMap::from([(nodes[0].clone(), 0.0)]);
    let mut settled: HashMap<Node, ()> = HashMap::new();
    let mut heap = BinaryHeap::from([Item {
        f: dist(anchor, head),
        g: 0.0,
        node: 0,
    }]);
    let mut pops = 0;
    while let Some(Item { g, node, .. }) = heap.pop() {
        let (at, sig) = nodes[node].clone();
        if settled.contains_key(&(at, sig.clone())) {
            continue;
        }
        settled.insert((at, sig.clone()), ());
        pops += 1;
        if pops > budget {
            return None;
        }
        if at == head && sig == target {
            let mut chain = Vec::new();
            let mut k = parent[node];
            while k != 0 && k != usize::MAX {
                chain.push(nodes[k].0);
                k = parent[k];
            }
            chain.reverse();
            let interior = straighten(anchor, &chain, head);
            return Some((interior.into_iter().map(|(r, c)| LatticePoint::new(r, c)).collect(), g));
        }
        if at == head && node != 0 {
            // The head is an endpoint, never a vertex the chain bends at.
            continue;
        }
        for &q in corners.iter().chain(std::iter::once(&head)) {
            if q == at || !clear(at, q) {
                continue;
            }
            let mut word = sig.clone();
            extend_reduced(&mut word, &crossing_letters(at, q, &blocked_centers));
            let next: Node = (q, word);
            let ng = g + dist(at, q);
            if settled.contains_key(&next) || best_g.get(&next).is_some_and(|&old| old <= ng) {
                continue;
            }
            best_g.insert(next.clone(), ng);
            nodes.push(next);
            parent.push(node);
            heap.push(Item {
                f: ng + dist(q, head),
                g: ng,
                node: nodes.len() - 1,
            });
        }
    }
    None
}

/// Drops corners the chain passes straight through.
fn straighten(anchor: P, interior: &[P], head: P) -> Vec<P> {
    let mut out: Vec<P> = Vec::new();
    for (i, &p) in interior.iter().enumerate() {
        let prev = out.last().copied().unwrap_or(anchor);
        let next = interior.get(i + 1).copied().unwrap_or(head);
        let turn = (p.0 - prev.0) * (next.1 - p.1) - (p.1 - prev.1) * (next.0 - p.0);
        if turn != 0 {
            out.push(p);
        }
    }
    out
}

// ---------------------------------------------------------------------------------------
// Planner brute force

/// Neighbours within `r_c` (1 or 1.5) with clear straight steps, independent of the planner.
pub fn oracle_neighbors(map: &GridMap, s: State, r_c: f64) -> Vec<State> {
    let mut out = Vec::new();
    for dr in -1..=1 {
        for dc in -1..=1 {
            let diagonal = dr != 0 && dc != 0;
            if (dr, dc) == (0, 0) || (diagonal && r_c < 2f64.sqrt()) {
                continue;
            }
            let t = State::new(s.row + dr, s.col + dc);
            if map.is_viable(t) && segment_clear(map, center(s), center(t)) {
                out.push(t);
            }
        }
    }
    out
}

/// Every simple path from `start` to `goal` with at most `max_states` states.
pub fn all_simple_paths(map: &GridMap, start: State, goal: State, r_c: f64, max_states: usize) -> Vec<Vec<State>> {
    fn go(map: &GridMap, goal: State, r_c: f64, max: usize, path: &mut Vec<State>, out: &mut Vec<Vec<State>>) {
        let head = *path.last().unwrap();
        if head == goal {
            out.push(path.clone());
            return;
        }
        if path.len() == max {
            return;
        }
        for t in oracle_neighbors(map, head, r_c) {
            if !path.contains(&t) {
                path.push(t);
                go(map, goal, r_c, max, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    if map.is_viable(start) && map.is_viable(goal) && max_states >= 1 {
        go(map, goal, r_c, max_states, &mut vec![start], &mut out);
    }
    out
}

fn better(a: (f64, &[State]), b: (f64, &[State])) -> bool {
    (a.0, a.1.len(), a.1) < (b.0, b.1.len(), b.1)
}

/// Brute-force minimum of `(risk, length, states)` over all simple paths.
pub fn brute_min_risk(
    ws: &Workspace,
    elements: &[&dyn RiskElement],
    start: State,
    goal: State,
    r_c: f64,
    max_states: usize,
) -> Option<(Vec<State>, f64)> {
    let mut best: Option<(Vec<State>, f64)> = None;
    for p in all_simple_paths(ws.map(), start, goal, r_c, max_states) {
        let path = Path::new(p, r_c);
        let risk = path_risk(&evaluate_risk_matrix_anchored(ws, &path, elements, None).unwrap())
            .unwrap()
            .path_risk;
        if best.as_ref().is_none_or(|(s, r)| better((risk, &path.states), (*r, s))) {
            best = Some((path.states, risk));
        }
    }
    best
}

/// Brute-force minimum of `(additive cost, length, states)` with per-element max
/// normalization and the given weights, summing per-state costs directly.
pub fn brute_min_additive(
    ws: &Workspace,
    locale: &[&dyn RiskElement],
    weights: &[f64],
    start: State,
    goal: State,
    r_c: f64,
    max_states: usize,
) -> Option<(Vec<State>, f64)> {
    let cell_cost = |s: State| -> f64 {
        let prefix = [s];
        let step = motion_risk::elements::Step::new(ws, &prefix, None);
        locale
            .iter()
            .zip(weights)
            .map(|(e, w)| {
                let scale = if e.max_risk() > 0.0 { e.max_risk() } else { 1.0 };
                w * e.risk(&step).clamp(0.0, 1.0) / scale
            })
            .sum()
    };
    let mut best: Option<(Vec<State>, f64)> = None;
    for p in all_simple_paths(ws.map(), start, goal, r_c, max_states) {
        let cost: f64 = p.iter().map(|&s| cell_cost(s)).sum();
        if best.as_ref().is_none_or(|(s, c)| better((cost, &p), (*c, s))) {
            best = Some((p, cost));
        }
    }
    best
}

/// Single-column matrix from per-state finish probabilities.
pub fn finish_column_matrix(finish: &[f64]) -> RiskMatrix {
    let column = Column {
        name: "combined".into(),
        category: motion_risk::elements::RiskCategory::Traverse,
        scale: 1.0,
    };
    let states = (0..finish.len() as i32).map(|i| State::new(0, i)).collect();
    RiskMatrix::new(states, vec![column], finish.iter().map(|p| vec![1.0 - p]).collect()).unwrap()
}
