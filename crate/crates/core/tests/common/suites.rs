//! Seeded oracle-equivalence suites shared by the acceptance and integration targets.

use std::time::{Duration, Instant};

use motion_risk::elements::{
    ActionLength, ObstacleDistance, RiskElement, RiskMapping, Step, TetherContacts, TetherLength, Turn, Visibility,
};
use motion_risk::planner::{plan_min_risk, PlanError, SearchConfig};
use motion_risk::tether::tether_for_prefix;
use motion_risk::world::{distance_transform, State, Workspace};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{brute_distance, brute_min_risk, oracle_tether, random_map, random_walk};

#[derive(Debug)]
pub struct Outcome {
    pub cases: usize,
    pub agree: usize,
    pub first_failures: Vec<String>,
    pub elapsed: Duration,
    /// What the cases covered, for the report.
    pub coverage: String,
}

impl Outcome {
    fn new() -> Self {
        Self {
            cases: 0,
            agree: 0,
            first_failures: Vec::new(),
            elapsed: Duration::ZERO,
            coverage: String::new(),
        }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if ok {
            self.agree += 1;
        } else if self.first_failures.len() < 3 {
            self.first_failures.push(detail());
        }
    }

    pub fn all_agree(&self) -> bool {
        self.cases > 0 && self.agree == self.cases
    }
}

/// Distance transform against an exhaustive scan, every cell of `maps` random maps up to 16×16.
pub fn distance_suite(seed: u64, maps: usize) -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Outcome::new();
    for _ in 0..maps {
        let (h, w) = (rng.gen_range(1..=16), rng.gen_range(1..=16));
        let density = rng.gen_range(0.0..0.5);
        let map = random_map(&mut rng, h, w, density);
        let field = distance_transform(&map);
        for s in map.states() {
            let got = field.get(s).unwrap();
            let want = if map.is_viable(s) { brute_distance(&map, s) } else { 0.0 };
            out.record(got == want, || {
                format!("{s}: got {got} want {want}\n{}", map.to_ascii())
            });
        }
    }
    out.elapsed = t0.elapsed();
    out
}

/// Taut-tether contacts and length against the corner-chain search, alternating 8×8 and 16×16.
pub fn tether_suite(seed: u64, cases: usize) -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Outcome::new();
    let mut histogram = std::collections::BTreeMap::new();
    for case in 0..cases {
        let (n, density, max_steps) = if case % 2 == 0 { (8, 0.2, 24) } else { (16, 0.12, 48) };
        let map = random_map(&mut rng, n, n, density);
        let steps = rng.gen_range(1..=max_steps);
        let Some(walk) = random_walk(&mut rng, &map, steps) else {
            continue;
        };
        let lib = tether_for_prefix(&map, &walk).unwrap();
        *histogram.entry(lib.contact_count()).or_insert(0) += 1;
        let oracle = oracle_tether(&map, &walk, 1_000_000);
        let ok = oracle
            .as_ref()
            .is_some_and(|(contacts, len)| *contacts == lib.contacts && (len - lib.taut_length).abs() < 1e-9);
        out.record(ok, || {
            format!(
                "case {case}\n{}walk {walk:?}\nlibrary {:?} {}\noracle {oracle:?}",
                map.to_ascii(),
                lib.contacts,
                lib.taut_length
            )
        });
    }
    out.coverage = format!("cases by contact count {histogram:?}");
    out.elapsed = t0.elapsed();
    out
}

/// A random element set drawing from every built-in, with at least one element.
pub fn random_elements<R: Rng>(rng: &mut R) -> Vec<Box<dyn RiskElement>> {
    loop {
        let mut set: Vec<Box<dyn RiskElement>> = Vec::new();
        if rng.gen_bool(0.7) {
            let near = rng.gen_range(0.01..0.2);
            set.push(Box::new(ObstacleDistance {
                mapping: RiskMapping::piecewise_linear(vec![(1.0, near), (rng.gen_range(1.1..3.0), 0.0)]).unwrap(),
            }));
        }
        if rng.gen_bool(0.3) {
            let mut v = Visibility::new(
                RiskMapping::piecewise_linear(vec![(0.4, rng.gen_range(0.005..0.03)), (1.0, 0.0)]).unwrap(),
            );
            v.radius = 2.5;
            v.ray_count = 16;
            set.push(Box::new(v));
        }
        if rng.gen_bool(0.4) {
            set.push(Box::new(ActionLength {
                coeff: rng.gen_range(0.001..0.02),
            }));
        }
        if rng.gen_bool(0.5) {
            set.push(Box::new(Turn {
                coeff: rng.gen_range(0.005..0.08),
            }));
        }
        if rng.gen_bool(0.3) {
            set.push(Box::new(TetherLength {
                coeff: rng.gen_range(0.0005..0.005),
            }));
        }
        if rng.gen_bool(0.5) {
            set.push(Box::new(TetherContacts {
                per_contact: rng.gen_range(0.01..0.15),
            }));
        }
        if !set.is_empty() {
            return set;
        }
    }
}

/// Exhaustive planner against enumeration of every simple path, maps up to 6×6.
/// `r_c = 1` cases use budgets up to 14 states; `r_c = 1.5` cases up to 9.
pub fn planner_suite(seed: u64, cases: usize) -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Outcome::new();
    let (mut feasible, mut longest, mut detours) = (0, 0, 0);
    for case in 0..cases {
        let (h, w) = (rng.gen_range(2..=6), rng.gen_range(2..=6));
        let density = rng.gen_range(0.1..0.3);
        let map = random_map(&mut rng, h, w, density);
        let viable: Vec<State> = map.viable_states().collect();
        let (Some(&start), Some(&goal)) = (viable.choose(&mut rng), viable.choose(&mut rng)) else {
            continue;
        };
        // Budgets from one below the shortest path (infeasible) up to the cap.
        let (r_c, cap) = if case % 2 == 0 { (1.0, 14) } else { (1.5, 9) };
        let shortest = shortest_hops(&map, start, goal, r_c).saturating_add(1).min(cap + 1);
        let max_states = rng.gen_range(shortest.max(2) - 1..=cap.max(shortest));
        let boxed = random_elements(&mut rng);
        let elements: Vec<&dyn RiskElement> = boxed.iter().map(|b| b.as_ref()).collect();
        let ws = Workspace::new(map);
        let want = brute_min_risk(&ws, &elements, start, goal, r_c, max_states);
        let got = plan_min_risk(&ws, &elements, &SearchConfig::new(start, goal, r_c, max_states));
        if let Some((states, _)) = &want {
            feasible += 1;
            longest = longest.max(states.len());
            detours += usize::from(states.len() > shortest_hops(ws.map(), start, goal, r_c) + 1);
        }
        let ok = match (&got, &want) {
            (Ok(plan), Some((states, risk))) => plan.path.states == *states && plan.report.path_risk == *risk,
            (Err(PlanError::Infeasible { .. }), None) => true,
            _ => false,
        };
        out.record(ok, || {
            format!(
                "case {case}: {start} -> {goal}, r_c {r_c}, max {max_states}, elements {elements:?}\n{}planner {:?}\nbrute {want:?}",
                ws.map().to_ascii(),
                got.map(|p| (p.path.states, p.report.path_risk))
            )
        });
    }
    out.coverage =
        format!("{feasible} feasible, {detours} optimal paths longer than a shortest one, longest {longest} states");
    out.elapsed = t0.elapsed();
    out
}

/// Move count of a shortest path by breadth-first search over the oracle's move set.
fn shortest_hops(map: &motion_risk::world::GridMap, start: State, goal: State, r_c: f64) -> usize {
    let mut seen = std::collections::HashMap::from([(start, 0)]);
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        let d = seen[&s];
        if s == goal {
            return d;
        }
        for t in super::oracle_neighbors(map, s, r_c) {
            if let std::collections::hash_map::Entry::Vacant(slot) = seen.entry(t) {
                slot.insert(d + 1);
                queue.push_back(t);
            }
        }
    }
    usize::MAX
}

/// History invariance of one locale or action element: the risk at a prefix depends only on
/// its last `depth + 1` states. Each case compares the prefix against its bare tail and
/// against the tail behind an unrelated random history. Returns violations out of `cases`.
pub fn conformance_suite(element: &dyn RiskElement, seed: u64, cases: usize) -> Outcome {
    let t0 = Instant::now();
    let depth = element
        .category()
        .history_depth()
        .expect("conformance applies to bounded-history elements");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Outcome::new();
    while out.cases < cases {
        let (h, w) = (rng.gen_range(3..=12), rng.gen_range(3..=12));
        let density = rng.gen_range(0.0..0.35);
        let ws = Workspace::new(random_map(&mut rng, h, w, density));
        let steps = rng.gen_range(depth..=depth + 12);
        let Some(prefix) = random_walk(&mut rng, ws.map(), steps) else {
            continue;
        };
        if prefix.len() < depth + 1 {
            continue;
        }
        let viable: Vec<State> = ws.map().viable_states().collect();
        let tail = &prefix[prefix.len() - depth - 1..];
        let mut other: Vec<State> = (0..rng.gen_range(1..=8))
            .map(|_| *viable.choose(&mut rng).unwrap())
            .collect();
        other.extend_from_slice(tail);

        let risk = |p: &[State]| element.risk(&Step::new(&ws, p, None));
        let (full, bare, swapped) = (risk(&prefix), risk(tail), risk(&other));
        let ok = full.to_bits() == bare.to_bits() && full.to_bits() == swapped.to_bits();
        out.record(ok, || {
            format!(
                "{}: prefix {prefix:?} -> {full}, tail {bare}, other history {swapped}",
                element.name()
            )
        });
    }
    out.elapsed = t0.elapsed();
    out
}
