//! Search kernels: 2D Dijkstra maps and weighted A* over an arbitrary successor function.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt::Debug;
use std::hash::Hash;
use std::marker::PhantomData;
use std::time::{Duration, Instant};

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Cost, Lattice, StateLD};

/// Deadline checks happen once per this many expansions.
pub const DEADLINE_CHECK_INTERVAL: u64 = 4096;

/// Per-cell optimal 2D cost, `None` where unreachable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostMap {
    width: usize,
    height: usize,
    costs: Vec<Cost>,
}

impl CostMap {
    pub fn get(&self, c: StateLD) -> Option<Cost> {
        if c.x < 0 || c.y < 0 || c.x as usize >= self.width || c.y as usize >= self.height {
            return None;
        }
        let v = self.costs[c.y as usize * self.width + c.x as usize];
        (v != Cost::MAX).then_some(v)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn reachable_count(&self) -> usize {
        self.costs.iter().filter(|&&c| c != Cost::MAX).count()
    }
}

/// Dijkstra over the 2D lattice from `source` (edge costs are symmetric, so this also gives
/// costs *to* `source`).
pub fn ld_cost_map(lattice: &Lattice, source: StateLD) -> CostMap {
    let (width, height) = (lattice.width(), lattice.height());
    let mut costs = vec![Cost::MAX; width * height];
    if lattice.ld_free(source) {
        let mut heap = BinaryHeap::new();
        let mut buf = Vec::with_capacity(8);
        costs[lattice.cell_index(source)] = 0;
        heap.push(Reverse((0, source)));
        while let Some(Reverse((d, s))) = heap.pop() {
            if d > costs[lattice.cell_index(s)] {
                continue;
            }
            buf.clear();
            lattice.ld_successors_into(&s, &mut buf);
            for &(n, c) in &buf {
                let i = lattice.cell_index(n);
                if d + c < costs[i] {
                    costs[i] = d + c;
                    heap.push(Reverse((d + c, n)));
                }
            }
        }
    }
    CostMap {
        width,
        height,
        costs,
    }
}

/// Cost-to-goal for every cell on the inflated static map, ignoring moving obstacles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeuristicMap {
    goal: StateLD,
    map: CostMap,
}

impl HeuristicMap {
    pub fn goal(&self) -> StateLD {
        self.goal
    }

    pub fn cost_to_goal(&self, c: StateLD) -> Option<Cost> {
        self.map.get(c)
    }

    pub fn costs(&self) -> &CostMap {
        &self.map
    }
}

pub fn dijkstra_heuristic(lattice: &Lattice, goal: StateLD) -> Result<HeuristicMap> {
    if !lattice.ld_free(goal) {
        return Err(Error::GoalBlocked(goal.x, goal.y));
    }
    Ok(HeuristicMap {
        goal,
        map: ld_cost_map(lattice, goal),
    })
}

/// A generated edge. `chain` marks the first member of a lazily enumerated run of siblings;
/// the search asks [`SearchSpace::next_in_chain`] for the next one when this one leaves the
/// open list. Siblings share the parent, and each must order after the previous one under
/// the open-list tie-breaking for the search to behave as if they had been generated at once.
#[derive(Debug, Clone, PartialEq)]
pub struct Successor<S, C> {
    pub state: S,
    pub cost: Cost,
    pub chain: Option<C>,
}

impl<S, C> Successor<S, C> {
    pub fn plain(state: S, cost: Cost) -> Self {
        Successor {
            state,
            cost,
            chain: None,
        }
    }
}

pub trait SearchSpace {
    type State: Copy + Eq + Hash + Ord + Debug;
    type Chain: Clone;

    /// `g` is the cost at which `s` is being expanded.
    fn successors(&self, s: &Self::State, g: Cost, out: &mut Vec<Successor<Self::State, Self::Chain>>);

    fn next_in_chain(&self, _chain: &Self::Chain) -> Option<Successor<Self::State, Self::Chain>> {
        None
    }

    /// Admissible cost-to-go; `None` marks a state that cannot reach the goal.
    fn heuristic(&self, s: &Self::State) -> Option<Cost>;

    fn is_goal(&self, s: &Self::State) -> bool;

    /// Used only for expansion accounting.
    fn is_high_dim(&self, _s: &Self::State) -> bool {
        true
    }
}

/// [`SearchSpace`] assembled from closures.
pub struct FnSpace<S, Succ, Goal, Heur> {
    successors: Succ,
    goal: Goal,
    heuristic: Heur,
    _state: PhantomData<fn() -> S>,
}

impl<S, Succ, Goal, Heur> FnSpace<S, Succ, Goal, Heur> {
    pub fn new(successors: Succ, goal: Goal, heuristic: Heur) -> Self {
        FnSpace {
            successors,
            goal,
            heuristic,
            _state: PhantomData,
        }
    }
}

impl<S, Succ, Goal, Heur> SearchSpace for FnSpace<S, Succ, Goal, Heur>
where
    S: Copy + Eq + Hash + Ord + Debug,
    Succ: Fn(&S) -> Vec<(S, Cost)>,
    Goal: Fn(&S) -> bool,
    Heur: Fn(&S) -> Option<Cost>,
{
    type State = S;
    type Chain = ();

    fn successors(&self, s: &S, _g: Cost, out: &mut Vec<Successor<S, ()>>) {
        out.extend((self.successors)(s).into_iter().map(|(n, c)| Successor::plain(n, c)));
    }

    fn heuristic(&self, s: &S) -> Option<Cost> {
        (self.heuristic)(s)
    }

    fn is_goal(&self, s: &S) -> bool {
        (self.goal)(s)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchLimits {
    pub deadline: Option<Instant>,
    pub max_expansions: Option<u64>,
}

impl SearchLimits {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn with_timeout(timeout: Duration) -> Self {
        SearchLimits {
            deadline: Some(Instant::now() + timeout),
            max_expansions: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub hd_expansions: u64,
    pub ld_expansions: u64,
    #[serde(with = "duration_secs")]
    pub elapsed: Duration,
    pub peak_open_size: u64,
}

impl SearchStats {
    pub fn expansions(&self) -> u64 {
        self.hd_expansions + self.ld_expansions
    }

    pub fn accumulate(&mut self, other: &SearchStats) {
        self.hd_expansions += other.hd_expansions;
        self.ld_expansions += other.ld_expansions;
        self.elapsed += other.elapsed;
        self.peak_open_size = self.peak_open_size.max(other.peak_open_size);
    }
}

pub(crate) mod duration_secs {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_secs_f64(f64::deserialize(d)?.max(0.0)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    Found,
    /// The open list ran dry: no path exists in the searched graph.
    NoPath,
    /// Deadline or expansion budget hit before the search could finish.
    ResourceExhausted,
}

/// The expanded state with the smallest heuristic value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrontierBest<S> {
    pub state: S,
    pub h: Cost,
    pub g: Cost,
}

impl<S: Ord> FrontierBest<S> {
    fn better_than(&self, other: &FrontierBest<S>) -> bool {
        (self.h, Reverse(self.g), &self.state) < (other.h, Reverse(other.g), &other.state)
    }

    fn deeper_than(&self, other: &FrontierBest<S>) -> bool {
        (Reverse(self.g), self.h, &self.state) < (Reverse(other.g), other.h, &other.state)
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult<S> {
    pub status: SearchStatus,
    /// Start state first; a start that already satisfies the goal gives a single-state path.
    pub path: Option<Vec<S>>,
    /// Cumulative cost to reach each path state.
    pub path_costs: Vec<Cost>,
    pub cost: Cost,
    pub stats: SearchStats,
    pub frontier_best: Option<FrontierBest<S>>,
    /// The expanded state with the largest cost-to-come (ties: smaller heuristic, then state order).
    pub deepest: Option<FrontierBest<S>>,
}

impl<S> SearchResult<S> {
    pub fn found(&self) -> bool {
        self.status == SearchStatus::Found
    }
}

struct Node<S> {
    state: S,
    g: Cost,
    parent: u32,
}

struct OpenEntry<S, C> {
    f: f64,
    g: Cost,
    state: S,
    node: u32,
    chain: Option<C>,
}

impl<S: Ord, C> PartialEq for OpenEntry<S, C> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<S: Ord, C> Eq for OpenEntry<S, C> {}

impl<S: Ord, C> PartialOrd for OpenEntry<S, C> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Ord, C> Ord for OpenEntry<S, C> {
    /// Max-heap order: smaller f first, then larger g, then smaller state.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| self.g.cmp(&other.g))
            .then_with(|| other.state.cmp(&self.state))
    }
}

#[derive(Clone, Copy)]
struct Seen {
    g: Cost,
    closed: bool,
}

const NO_PARENT: u32 = u32::MAX;

struct Search<'a, P: SearchSpace> {
    space: &'a P,
    epsilon: f64,
    nodes: Vec<Node<P::State>>,
    seen: FxHashMap<P::State, Seen>,
    open: BinaryHeap<OpenEntry<P::State, P::Chain>>,
}

impl<P: SearchSpace> Search<'_, P> {
    /// Queues `succ` under `parent` unless it is pruned or dominated. Returns whether it was queued.
    fn push(&mut self, succ: Successor<P::State, P::Chain>, parent: u32) -> bool {
        let parent_g = if parent == NO_PARENT {
            0
        } else {
            self.nodes[parent as usize].g
        };
        let g = parent_g + succ.cost;
        let Some(h) = self.space.heuristic(&succ.state) else {
            return false;
        };
        if let Some(seen) = self.seen.get(&succ.state) {
            if seen.closed || seen.g <= g {
                return false;
            }
        }
        self.seen.insert(succ.state, Seen { g, closed: false });
        let node = self.nodes.len() as u32;
        self.nodes.push(Node {
            state: succ.state,
            g,
            parent,
        });
        self.open.push(OpenEntry {
            f: g as f64 + self.epsilon * h as f64,
            g,
            state: succ.state,
            node,
            chain: succ.chain,
        });
        true
    }

    /// Queues the first member of a chain that survives pruning, following the chain past
    /// dominated members.
    fn push_chained(&mut self, mut succ: Successor<P::State, P::Chain>, parent: u32) {
        loop {
            let next_chain = succ.chain.clone();
            if self.push(succ, parent) {
                return;
            }
            match next_chain.and_then(|c| self.space.next_in_chain(&c)) {
                Some(s) => succ = s,
                None => return,
            }
        }
    }

    fn reconstruct(&self, mut node: u32) -> (Vec<P::State>, Vec<Cost>) {
        let mut path = Vec::new();
        let mut costs = Vec::new();
        while node != NO_PARENT {
            let n = &self.nodes[node as usize];
            path.push(n.state);
            costs.push(n.g);
            node = n.parent;
        }
        path.reverse();
        costs.reverse();
        (path, costs)
    }
}

/// Weighted A* with `f = g + epsilon * h`. States are closed on first expansion and never
/// reopened; with a consistent heuristic the returned cost is within `epsilon` of optimal.
pub fn weighted_astar<P: SearchSpace>(
    space: &P,
    start: P::State,
    epsilon: f64,
    limits: &SearchLimits,
) -> SearchResult<P::State> {
    assert!(epsilon >= 1.0, "epsilon must be at least 1, got {epsilon}");
    let began = Instant::now();
    let mut search = Search {
        space,
        epsilon,
        nodes: Vec::new(),
        seen: FxHashMap::default(),
        open: BinaryHeap::new(),
    };
    let mut stats = SearchStats::default();
    let mut best: Option<FrontierBest<P::State>> = None;
    let mut deepest: Option<FrontierBest<P::State>> = None;
    let mut buf = Vec::new();
    let finish = |status, stats: SearchStats, (best, deepest), path: Option<(Vec<P::State>, Vec<Cost>)>| {
        let mut stats = stats;
        stats.elapsed = began.elapsed();
        let (path, path_costs) = match path {
            Some((p, c)) => (Some(p), c),
            None => (None, Vec::new()),
        };
        SearchResult {
            status,
            cost: path_costs.last().copied().unwrap_or(0),
            path,
            path_costs,
            stats,
            frontier_best: best,
            deepest,
        }
    };

    if limits.deadline.is_some_and(|d| Instant::now() >= d) {
        return finish(SearchStatus::ResourceExhausted, stats, (best, deepest), None);
    }
    search.push(Successor::plain(start, 0), NO_PARENT);

    while let Some(entry) = search.open.pop() {
        if let Some(chain) = &entry.chain {
            let parent = search.nodes[entry.node as usize].parent;
            if let Some(next) = space.next_in_chain(chain) {
                search.push_chained(next, parent);
            }
        }
        let seen = search.seen.get_mut(&entry.state).expect("queued states are tracked");
        if seen.closed || seen.g < entry.g {
            continue;
        }
        seen.closed = true;

        if space.is_goal(&entry.state) {
            let path = search.reconstruct(entry.node);
            return finish(SearchStatus::Found, stats, (best, deepest), Some(path));
        }
        if limits.max_expansions.is_some_and(|m| stats.expansions() >= m) {
            return finish(SearchStatus::ResourceExhausted, stats, (best, deepest), None);
        }
        if stats.expansions() % DEADLINE_CHECK_INTERVAL == DEADLINE_CHECK_INTERVAL - 1
            && limits.deadline.is_some_and(|d| Instant::now() >= d)
        {
            return finish(SearchStatus::ResourceExhausted, stats, (best, deepest), None);
        }

        if space.is_high_dim(&entry.state) {
            stats.hd_expansions += 1;
        } else {
            stats.ld_expansions += 1;
        }
        let h = space.heuristic(&entry.state).expect("pruned states are never queued");
        let candidate = FrontierBest {
            state: entry.state,
            h,
            g: entry.g,
        };
        if deepest.as_ref().map_or(true, |b| candidate.deeper_than(b)) {
            deepest = Some(candidate);
        }
        if best.as_ref().map_or(true, |b| candidate.better_than(b)) {
            best = Some(candidate);
        }

        buf.clear();
        space.successors(&entry.state, entry.g, &mut buf);
        for succ in buf.drain(..) {
            if succ.chain.is_some() {
                search.push_chained(succ, entry.node);
            } else {
                search.push(succ, entry.node);
            }
        }
        stats.peak_open_size = stats.peak_open_size.max(search.open.len() as u64);
    }
    finish(SearchStatus::NoPath, stats, (best, deepest), None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;
    use crate::world::{GridMap, RobotFootprint, Scenario};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scenario(map: GridMap) -> Scenario {
        Scenario::new(map, RobotFootprint::rectangle(0.6, 0.4).unwrap(), vec![], 100, 0.1).unwrap()
    }

    /// Textbook Dijkstra, kept separate from the kernels under test.
    fn oracle(grid: &[Vec<bool>], from: (i32, i32), to: (i32, i32)) -> Option<Cost> {
        let (w, h) = (grid[0].len() as i32, grid.len() as i32);
        let free = |x: i32, y: i32| x >= 0 && y >= 0 && x < w && y < h && !grid[y as usize][x as usize];
        let mut dist = std::collections::HashMap::new();
        let mut heap = BinaryHeap::new();
        dist.insert(from, 0u64);
        heap.push(Reverse((0u64, from)));
        while let Some(Reverse((d, c))) = heap.pop() {
            if c == to {
                return Some(d);
            }
            if dist[&c] < d {
                continue;
            }
            for dx in -1..=1 {
                for dy in -1..=1 {
                    if (dx, dy) == (0, 0) || !free(c.0 + dx, c.1 + dy) {
                        continue;
                    }
                    let nd = d + if dx != 0 && dy != 0 { 1414 } else { 1000 };
                    let n = (c.0 + dx, c.1 + dy);
                    if dist.get(&n).map_or(true, |&b| nd < b) {
                        dist.insert(n, nd);
                        heap.push(Reverse((nd, n)));
                    }
                }
            }
        }
        None
    }

    fn random_grid(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Vec<Vec<bool>> {
        (0..n).map(|_| (0..n).map(|_| rng.gen_bool(density)).collect()).collect()
    }

    fn grid_map(grid: &[Vec<bool>]) -> GridMap {
        let n = grid.len();
        GridMap::from_cells(n, n, 1.0, grid.iter().flatten().copied().collect()).unwrap()
    }

    #[test]
    fn heuristic_examples() {
        let sc = scenario(GridMap::new(10, 10, 1.0).unwrap());
        let lat = Lattice::with_defaults(&sc);
        let h = dijkstra_heuristic(&lat, StateLD::new(5, 5)).unwrap();
        assert_eq!(h.cost_to_goal(StateLD::new(5, 5)), Some(0));
        assert_eq!(h.cost_to_goal(StateLD::new(2, 5)), Some(3000));
        assert_eq!(h.cost_to_goal(StateLD::new(7, 7)), Some(2828));

        let mut map = GridMap::new(10, 10, 1.0).unwrap();
        map.fill_rect(0, 2, 3, 2, true);
        map.fill_rect(3, 0, 3, 2, true);
        let sc = scenario(map);
        let lat = Lattice::with_defaults(&sc);
        let h = dijkstra_heuristic(&lat, StateLD::new(5, 5)).unwrap();
        assert_eq!(h.cost_to_goal(StateLD::new(0, 0)), None);
        assert!(matches!(
            dijkstra_heuristic(&lat, StateLD::new(0, 2)),
            Err(Error::GoalBlocked(0, 2))
        ));
    }

    fn ld_space<'a>(
        lat: &'a Lattice<'a>,
        h: &'a HeuristicMap,
        goal: StateLD,
    ) -> impl SearchSpace<State = StateLD> + 'a {
        FnSpace::new(
            move |s: &StateLD| lat.ld_successors(s),
            move |s: &StateLD| *s == goal,
            move |s: &StateLD| h.cost_to_goal(*s)
        )
    }

    #[test]
    fn start_at_goal_gives_zero_cost() {
        let sc = scenario(GridMap::new(5, 5, 1.0).unwrap());
        let lat = Lattice::with_defaults(&sc);
        let goal = StateLD::new(2, 2);
        let h = dijkstra_heuristic(&lat, goal).unwrap();
        let r = weighted_astar(&ld_space(&lat, &h, goal), goal, 1.0, &SearchLimits::unlimited());
        assert!(r.found());
        assert_eq!(r.cost, 0);
        assert_eq!(r.path.unwrap(), vec![goal]);
    }

    #[test]
    fn epsilon_one_matches_dijkstra_on_empty_grid() {
        let grid = vec![vec![false; 5]; 5];
        let sc = scenario(grid_map(&grid));
        let lat = Lattice::with_defaults(&sc);
        for (gx, gy) in [(4, 4), (4, 0), (0, 3)] {
            let goal = StateLD::new(gx, gy);
            let h = dijkstra_heuristic(&lat, goal).unwrap();
            let r = weighted_astar(&ld_space(&lat, &h, goal), StateLD::new(0, 0), 1.0, &SearchLimits::unlimited());
            assert_eq!(Some(r.cost), oracle(&grid, (0, 0), (gx, gy)));
            let steps: Cost = r.path.as_ref().unwrap().windows(2).map(|w| {
                if w[0].x != w[1].x && w[0].y != w[1].y { 1414 } else { 1000 }
            }).sum();
            assert_eq!(steps, r.cost);
            assert_eq!(*r.path_costs.last().unwrap(), r.cost);
        }
    }

    #[test]
    fn epsilon_two_respects_bound_on_random_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut solved = 0;
        for _ in 0..100 {
            let mut grid = random_grid(&mut rng, 20, 0.25);
            grid[0][0] = false;
            grid[19][19] = false;
            let Some(opt) = oracle(&grid, (0, 0), (19, 19)) else { continue };
            let sc = scenario(grid_map(&grid));
            let lat = Lattice::with_defaults(&sc);
            let goal = StateLD::new(19, 19);
            let h = dijkstra_heuristic(&lat, goal).unwrap();
            // a weaker (but admissible and consistent) heuristic than the exact one
            let space = FnSpace::new(
                |s: &StateLD| lat.ld_successors(s),
                |s: &StateLD| *s == goal,
                |s: &StateLD| h.cost_to_goal(*s).map(|_| {
                    let (dx, dy) = ((s.x - 19).abs() as u64, (s.y - 19).abs() as u64);
                    1000 * dx.max(dy) + 414 * dx.min(dy)
                }),
            );
            let r = weighted_astar(&space, StateLD::new(0, 0), 2.0, &SearchLimits::unlimited());
            assert!(r.found());
            assert!(r.cost as f64 <= 2.0 * opt as f64);
            let exact = weighted_astar(&space, StateLD::new(0, 0), 1.0, &SearchLimits::unlimited());
            assert_eq!(exact.cost, opt);
            solved += 1;
        }
        assert!(solved > 50);
    }

    #[test]
    fn exhausted_frontier_and_budget_are_distinguished() {
        let mut grid = vec![vec![false; 10]; 10];
        for row in grid.iter_mut() {
            row[5] = true;
        }
        let sc = scenario(grid_map(&grid));
        let lat = Lattice::with_defaults(&sc);
        let goal = StateLD::new(9, 9);
        let space = FnSpace::new(
            |s: &StateLD| lat.ld_successors(s),
            |s: &StateLD| *s == goal,
            |_: &StateLD| Some(0)
        );
        let r = weighted_astar(&space, StateLD::new(0, 0), 1.0, &SearchLimits::unlimited());
        assert_eq!(r.status, SearchStatus::NoPath);
        assert_eq!(r.stats.ld_expansions + r.stats.hd_expansions, 50);
        assert!(r.frontier_best.is_some());

        let limits = SearchLimits {
            deadline: None,
            max_expansions: Some(10),
        };
        let r = weighted_astar(&space, StateLD::new(0, 0), 1.0, &limits);
        assert_eq!(r.status, SearchStatus::ResourceExhausted);
        assert!(r.path.is_none());

        let past = SearchLimits {
            deadline: Some(Instant::now()),
            max_expansions: None,
        };
        let r = weighted_astar(&space, StateLD::new(0, 0), 1.0, &past);
        assert_eq!(r.status, SearchStatus::ResourceExhausted);
    }

    /// A space whose successors come as a lazily enumerated chain.
    struct Chained {
        width: u32,
    }

    impl SearchSpace for Chained {
        type State = (u32, u32);
        type Chain = (u32, u32);

        fn successors(&self, s: &(u32, u32), _g: Cost, out: &mut Vec<Successor<(u32, u32), (u32, u32)>>) {
            if s.0 == 0 {
                out.push(Successor { state: (1, 0), cost: 5, chain: Some((1, 0)) });
            } else if s.0 < 3 {
                out.push(Successor::plain((s.0 + 1, s.1), 1 + s.1 as u64));
            }
        }

        fn next_in_chain(&self, c: &(u32, u32)) -> Option<Successor<(u32, u32), (u32, u32)>> {
            (c.1 + 1 < self.width).then(|| Successor { state: (1, c.1 + 1), cost: 5, chain: Some((1, c.1 + 1)) })
        }

        fn heuristic(&self, s: &(u32, u32)) -> Option<Cost> {
            Some(3 - s.0 as u64)
        }

        fn is_goal(&self, s: &(u32, u32)) -> bool {
            s.0 == 3 && s.1 > 0
        }
    }

    #[test]
    fn chains_behave_like_eager_enumeration() {
        let r = weighted_astar(&Chained { width: 6 }, (0, 0), 1.0, &SearchLimits::unlimited());
        assert!(r.found());
        assert_eq!(r.path.unwrap(), vec![(0, 0), (1, 1), (2, 1), (3, 1)]);
        assert_eq!(r.cost, 9);
    }
}
