//! Path search over simple paths of a grid map.
//!
//! [`plan_min_risk`] minimizes path risk. Because history-dependent elements break optimal
//! substructure, the exact mode is a branch-and-bound enumeration of simple paths, usable at
//! desk scale only; beam mode trades optimality for reach. [`plan_additive_baseline`] solves
//! the conventional additive objective, which does decompose, with uniform-cost search.
//!
//! Results are ordered by `(objective, number of states, state sequence)`, so every planner
//! output is unique and independent of scheduling.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use thiserror::Error;

use crate::compose::{
    evaluate_risk_matrix_anchored, path_risk, row_log_finish, state_additive_cost, ComposeError, EvalError,
    PathRiskReport, Traverse,
};
use crate::elements::{Normalization, RiskCategory, RiskElement, Step};
use crate::world::{geometry::segment_blocked, Action, GridMap, LatticePoint, Path, State, Workspace};

const STEP_SLACK: f64 = 1e-12;
/// Absorbs summation-order rounding in the look-ahead risk bound.
const BOUND_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    Exhaustive,
    /// Keeps the `width` best prefixes per depth.
    Beam(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub start: State,
    pub goal: State,
    pub r_c: f64,
    /// Upper bound on the number of states in the path, start and goal included.
    pub max_states: usize,
    pub mode: SearchMode,
    /// Tether anchor; the start state when `None`.
    pub anchor: Option<State>,
}

impl SearchConfig {
    pub fn new(start: State, goal: State, r_c: f64, max_states: usize) -> Self {
        Self {
            start,
            goal,
            r_c,
            max_states,
            mode: SearchMode::Exhaustive,
            anchor: None,
        }
    }

    pub fn with_mode(mut self, mode: SearchMode) -> Self {
        self.mode = mode;
        self
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("{role} state {state} is not a viable cell")]
    Unviable { role: &'static str, state: State },
    #[error("r_c = {0} admits no moves")]
    Radius(f64),
    #[error("beam width must be at least 1")]
    BeamWidth,
    #[error("no path from {start} to {goal} within {max_states} states{}", shortest_note(*.shortest))]
    Infeasible {
        start: State,
        goal: State,
        max_states: usize,
        shortest: Option<usize>,
    },
    #[error(transparent)]
    Compose(#[from] ComposeError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn shortest_note(shortest: Option<usize>) -> String {
    match shortest {
        Some(n) => format!(" (shortest path has {n} states)"),
        None => " (goal unreachable)".into(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RiskPlan {
    pub path: Path,
    pub report: PathRiskReport,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdditivePlan {
    pub path: Path,
    pub cost: f64,
}

/// Moves admitted by `r_c`, ordered so that targets come out in lexicographic order.
pub fn moves(r_c: f64) -> Vec<Action> {
    let reach = r_c.max(0.0).floor() as i32;
    let mut out = Vec::new();
    for drow in -reach..=reach {
        for dcol in -reach..=reach {
            let a = Action { drow, dcol };
            if (drow, dcol) != (0, 0) && a.norm() <= r_c + STEP_SLACK {
                out.push(a);
            }
        }
    }
    out
}

/// Move graph of a map: a move is usable when its target is viable and the straight step
/// between the two cell centers stays clear of obstacles.
pub struct MoveGraph<'a> {
    map: &'a GridMap,
    moves: Vec<Action>,
}

impl<'a> MoveGraph<'a> {
    pub fn new(map: &'a GridMap, r_c: f64) -> Self {
        Self { map, moves: moves(r_c) }
    }

    pub fn neighbors(&self, s: State) -> impl Iterator<Item = State> + '_ {
        self.moves.iter().map(move |&a| s.offset(a)).filter(move |&t| {
            self.map.is_viable(t) && !segment_blocked(self.map, LatticePoint::center(s), LatticePoint::center(t))
        })
    }

    fn index(&self, s: State) -> usize {
        s.row as usize * self.map.width() + s.col as usize
    }

    /// Steps from every cell to `goal`, ignoring the simple-path restriction.
    fn hops_to(&self, goal: State) -> Vec<Option<usize>> {
        let mut hops = vec![None; self.map.width() * self.map.height()];
        hops[self.index(goal)] = Some(0);
        let mut queue = VecDeque::from([goal]);
        while let Some(s) = queue.pop_front() {
            let h = hops[self.index(s)].unwrap();
            // Moves are symmetric and clearance does not depend on direction.
            for t in self.neighbors(s) {
                let i = self.index(t);
                if hops[i].is_none() {
                    hops[i] = Some(h + 1);
                    queue.push_back(t);
                }
            }
        }
        hops
    }
}

/// States in a shortest path from `start` to `goal`, or `None` when the goal is unreachable.
pub fn shortest_states(map: &GridMap, r_c: f64, start: State, goal: State) -> Result<Option<usize>, PlanError> {
    check_endpoints(map, &SearchConfig::new(start, goal, r_c, 1))?;
    let graph = MoveGraph::new(map, r_c);
    Ok(graph.hops_to(goal)[graph.index(start)].map(|h| h + 1))
}

fn check_endpoints(map: &GridMap, cfg: &SearchConfig) -> Result<(), PlanError> {
    for (role, state) in [("start", cfg.start), ("goal", cfg.goal)] {
        if !map.is_viable(state) {
            return Err(PlanError::Unviable { role, state });
        }
    }
    if moves(cfg.r_c).is_empty() {
        return Err(PlanError::Radius(cfg.r_c));
    }
    if cfg.mode == SearchMode::Beam(0) {
        return Err(PlanError::BeamWidth);
    }
    Ok(())
}

/// Orders candidate paths by `(objective, length, states)`.
fn better(a: (f64, &[State]), b: (f64, &[State])) -> bool {
    a.0.total_cmp(&b.0)
        .then(a.1.len().cmp(&b.1.len()))
        .then_with(|| a.1.cmp(b.1))
        == Ordering::Less
}

struct Incumbent {
    risk: f64,
    states: Vec<State>,
}

impl Incumbent {
    fn offer(&mut self, risk: f64, states: &[State]) {
        if self.states.is_empty() || better((risk, states), (self.risk, &self.states)) {
            self.risk = risk;
            self.states = states.to_vec();
        }
    }
}

struct RiskSearch<'a> {
    workspace: &'a Workspace,
    elements: &'a [&'a dyn RiskElement],
    graph: MoveGraph<'a>,
    cfg: &'a SearchConfig,
    hops: Vec<Option<usize>>,
    /// Locale-only `ln P(F)` of each cell: an upper bound on any state's log finish.
    locale_log: Vec<f64>,
    best_cell_log: f64,
}

impl<'a> RiskSearch<'a> {
    fn new(
        workspace: &'a Workspace,
        elements: &'a [&'a dyn RiskElement],
        cfg: &'a SearchConfig,
    ) -> Result<Self, PlanError> {
        let map = workspace.map();
        check_endpoints(map, cfg)?;
        let graph = MoveGraph::new(map, cfg.r_c);
        let hops = graph.hops_to(cfg.goal);
        let shortest = hops[graph.index(cfg.start)].map(|h| h + 1);
        if shortest.is_none_or(|n| n > cfg.max_states) {
            return Err(PlanError::Infeasible {
                start: cfg.start,
                goal: cfg.goal,
                max_states: cfg.max_states,
                shortest,
            });
        }
        let locale: Vec<&dyn RiskElement> = elements
            .iter()
            .copied()
            .filter(|e| e.category() == RiskCategory::Locale)
            .collect();
        let locale_log: Vec<f64> = map
            .states()
            .map(|s| {
                if !map.is_viable(s) {
                    return f64::NEG_INFINITY;
                }
                let prefix = [s];
                let step = Step::new(workspace, &prefix, None);
                let row: Vec<f64> = locale.iter().map(|e| e.risk(&step).clamp(0.0, 1.0)).collect();
                row_log_finish(&row)
            })
            .collect();
        let best_cell_log = locale_log.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            workspace,
            elements,
            graph,
            cfg,
            hops,
            locale_log,
            best_cell_log,
        })
    }

    fn hops(&self, s: State) -> Option<usize> {
        self.hops[self.graph.index(s)]
    }

    fn start(&self) -> Result<Traverse, PlanError> {
        Ok(Traverse::start(self.workspace, self.elements, self.cfg.start, self.cfg.anchor)?.0)
    }

    fn extend(&self, t: &Traverse, next: State) -> Result<Traverse, PlanError> {
        Ok(t.extended(self.workspace, self.elements, next)?.0)
    }

    /// Risk no completion of `t` can beat, up to rounding.
    fn risk_bound(&self, t: &Traverse, hops: usize) -> f64 {
        if hops == 0 {
            return t.risk();
        }
        let goal = self.locale_log[self.graph.index(self.cfg.goal)];
        let log = t.log_finish + goal + (hops - 1) as f64 * self.best_cell_log;
        1.0 - log.exp()
    }

    fn exhaustive(&self, incumbent: &mut Incumbent) -> Result<(), PlanError> {
        let root = self.start()?;
        let mut visited = vec![false; self.hops.len()];
        visited[self.graph.index(self.cfg.start)] = true;
        self.descend(&root, &mut visited, incumbent)
    }

    fn descend(&self, t: &Traverse, visited: &mut [bool], incumbent: &mut Incumbent) -> Result<(), PlanError> {
        let head = *t.prefix.last().unwrap();
        let risk = t.risk();
        if head == self.cfg.goal {
            incumbent.offer(risk, &t.prefix);
            return Ok(());
        }
        let Some(h) = self.hops(head) else { return Ok(()) };
        let len = t.prefix.len();
        if len + h > self.cfg.max_states || self.prunes(t, risk, h, incumbent) {
            return Ok(());
        }
        let next: Vec<State> = self
            .graph
            .neighbors(head)
            .filter(|&s| !visited[self.graph.index(s)])
            .collect();
        for s in next {
            let i = self.graph.index(s);
            visited[i] = true;
            let child = self.extend(t, s);
            let out = child.and_then(|c| self.descend(&c, visited, incumbent));
            visited[i] = false;
            out?;
        }
        Ok(())
    }

    fn prunes(&self, t: &Traverse, risk: f64, hops: usize, incumbent: &Incumbent) -> bool {
        if incumbent.states.is_empty() {
            return false;
        }
        // Prefix risk is exact and never decreases along an extension.
        match risk.total_cmp(&incumbent.risk) {
            Ordering::Greater => return true,
            Ordering::Equal => {
                let len = t.prefix.len() + hops;
                match len.cmp(&incumbent.states.len()) {
                    Ordering::Greater => return true,
                    Ordering::Equal if t.prefix.as_slice() > &incumbent.states[..t.prefix.len()] => return true,
                    _ => {}
                }
            }
            Ordering::Less => {}
        }
        self.risk_bound(t, hops) > incumbent.risk + BOUND_SLACK
    }

    /// Best-first search that settles at most `width` prefixes per head cell, in order of
    /// `(risk, length, states)`. With `width = 1` and history-free elements this is Dijkstra.
    fn beam(&self, width: usize, incumbent: &mut Incumbent) -> Result<(), PlanError> {
        let mut settled = vec![0usize; self.hops.len()];
        let mut heap = BinaryHeap::from([Label(self.start()?)]);
        while let Some(Label(t)) = heap.pop() {
            let head = *t.prefix.last().unwrap();
            if head == self.cfg.goal {
                incumbent.offer(t.risk(), &t.prefix);
                return Ok(());
            }
            let slot = &mut settled[self.graph.index(head)];
            if *slot >= width {
                continue;
            }
            *slot += 1;
            for s in self.graph.neighbors(head) {
                let fits = self
                    .hops(s)
                    .is_some_and(|h| t.prefix.len() + 1 + h <= self.cfg.max_states);
                if fits && !t.prefix.contains(&s) && settled[self.graph.index(s)] < width {
                    heap.push(Label(self.extend(&t, s)?));
                }
            }
        }
        Ok(())
    }
}

fn report_for(
    workspace: &Workspace,
    elements: &[&dyn RiskElement],
    cfg: &SearchConfig,
    states: Vec<State>,
) -> Result<RiskPlan, PlanError> {
    let path = Path::new(states, cfg.r_c);
    let matrix = evaluate_risk_matrix_anchored(workspace, &path, elements, cfg.anchor)?;
    let report = path_risk(&matrix)?;
    Ok(RiskPlan { path, report })
}

/// Minimum-risk simple path from `cfg.start` to `cfg.goal` with at most `cfg.max_states`
/// states.
///
/// Exhaustive mode is exact. Beam mode is seeded with the additive baseline's path over
/// the locale elements, so its result is never riskier than that path.
pub fn plan_min_risk(
    workspace: &Workspace,
    elements: &[&dyn RiskElement],
    cfg: &SearchConfig,
) -> Result<RiskPlan, PlanError> {
    let search = RiskSearch::new(workspace, elements, cfg)?;
    let mut incumbent = Incumbent {
        risk: f64::INFINITY,
        states: Vec::new(),
    };
    // A cheap first incumbent makes the bounds bite early.
    let seed_width = match cfg.mode {
        SearchMode::Beam(w) => w,
        SearchMode::Exhaustive => 16,
    };
    search.beam(seed_width, &mut incumbent)?;
    let locale: Vec<&dyn RiskElement> = elements
        .iter()
        .copied()
        .filter(|e| e.category() == RiskCategory::Locale)
        .collect();
    let weights = vec![1.0; locale.len()];
    let baseline = plan_additive_baseline(workspace, &locale, &weights, Normalization::ElementMax, cfg)?;
    let seeded = search.start().and_then(|mut t| {
        for &s in &baseline.path.states[1..] {
            t = search.extend(&t, s)?;
        }
        Ok(t)
    })?;
    incumbent.offer(seeded.risk(), &seeded.prefix);
    if cfg.mode == SearchMode::Exhaustive {
        search.exhaustive(&mut incumbent)?;
    }
    report_for(workspace, elements, cfg, incumbent.states)
}

/// Heap entry ordered so that the best `(risk, length, states)` pops first.
struct Label(Traverse);

impl PartialEq for Label {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Label {}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        b.risk()
            .total_cmp(&a.risk())
            .then(b.prefix.len().cmp(&a.prefix.len()))
            .then_with(|| b.prefix.cmp(&a.prefix))
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(PartialEq)]
struct Entry {
    cost: f64,
    states: Vec<State>,
}

impl Eq for Entry {}

impl Ord for Entry {
    // Reversed: BinaryHeap is a max-heap.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then(other.states.len().cmp(&self.states.len()))
            .then_with(|| other.states.cmp(&self.states))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Minimum additive-cost path, by uniform-cost search over `(cell, states used)`.
///
/// State costs are non-negative, so the `(cost, length)`-optimal walk never revisits a cell
/// and the search needs no simple-path bookkeeping.
pub fn plan_additive_baseline(
    workspace: &Workspace,
    locale: &[&dyn RiskElement],
    weights: &[f64],
    normalization: Normalization,
    cfg: &SearchConfig,
) -> Result<AdditivePlan, PlanError> {
    let map = workspace.map();
    check_endpoints(map, cfg)?;
    if let Some(e) = locale.iter().find(|e| e.category() != RiskCategory::Locale) {
        return Err(ComposeError::NotLocale {
            name: e.name().to_string(),
            category: e.category(),
        }
        .into());
    }
    if weights.len() != locale.len() {
        return Err(ComposeError::WeightCount {
            expected: locale.len(),
            found: weights.len(),
        }
        .into());
    }
    if let Some(&w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(ComposeError::BadWeight(w).into());
    }
    let scales: Vec<f64> = locale
        .iter()
        .map(|e| match normalization {
            Normalization::ElementMax if e.max_risk() > 0.0 => e.max_risk(),
            _ => 1.0,
        })
        .collect();
    let graph = MoveGraph::new(map, cfg.r_c);
    let cell_cost = |s: State| {
        let prefix = [s];
        let step = Step::new(workspace, &prefix, None);
        let row: Vec<f64> = locale.iter().map(|e| e.risk(&step).clamp(0.0, 1.0)).collect();
        state_additive_cost(&row, weights, &scales)
    };
    let costs: Vec<f64> = map
        .states()
        .map(|s| if map.is_viable(s) { cell_cost(s) } else { 0.0 })
        .collect();
    let hops = graph.hops_to(cfg.goal);
    let infeasible = || PlanError::Infeasible {
        start: cfg.start,
        goal: cfg.goal,
        max_states: cfg.max_states,
        shortest: hops[graph.index(cfg.start)].map(|h| h + 1),
    };
    if hops[graph.index(cfg.start)].is_none_or(|h| h + 1 > cfg.max_states) {
        return Err(infeasible());
    }

    let mut settled = vec![false; costs.len() * (cfg.max_states + 1)];
    let mut heap = BinaryHeap::from([Entry {
        cost: costs[graph.index(cfg.start)],
        states: vec![cfg.start],
    }]);
    while let Some(Entry { cost, states }) = heap.pop() {
        let head = *states.last().unwrap();
        if head == cfg.goal {
            return Ok(AdditivePlan {
                path: Path::new(states, cfg.r_c),
                cost,
            });
        }
        let slot = graph.index(head) * (cfg.max_states + 1) + states.len();
        if std::mem::replace(&mut settled[slot], true) {
            continue;
        }
        for s in graph.neighbors(head) {
            let i = graph.index(s);
            if hops[i].is_some_and(|h| states.len() + 1 + h <= cfg.max_states) {
                let mut next = states.clone();
                next.push(s);
                heap.push(Entry {
                    cost: cost + costs[i],
                    states: next,
                });
            }
        }
    }
    Err(infeasible())
}
