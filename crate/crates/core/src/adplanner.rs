//! The iterative plan/track loop over the adaptive graph.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::adgraph::{AdaptiveGraph, MixedState, PlanningSpace, RegionEvent, RegionReason};
use crate::error::{Error, Result};
use crate::lattice::{Cost, Lattice, StateHD, StateLD};
use crate::search::{
    dijkstra_heuristic, duration_secs, weighted_astar, HeuristicMap, SearchLimits, SearchResult, SearchSpace,
    SearchStats, SearchStatus, Successor,
};
use crate::world::TimedPose;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProgressRule {
    /// Expanded state closest to the goal by heuristic.
    #[default]
    MinHeuristic,
    /// Expanded state with the largest cost-to-come.
    Deepest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscrepancyRule {
    /// Shared cell where the cost difference grows the most since the previous shared cell.
    #[default]
    MaxIncrease,
    /// Shared cell with the largest accumulated cost difference.
    MaxDifference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    pub epsilon_plan: f64,
    pub epsilon_track: f64,
    pub tunnel_width: u32,
    pub new_region_radius: f64,
    pub grow_increment: f64,
    #[serde(with = "duration_secs")]
    pub timeout: Duration,
    pub max_iterations: u32,
    /// Tracking searches that hit this budget count as failed tracking.
    pub track_max_expansions: Option<u64>,
    pub progress_rule: ProgressRule,
    pub discrepancy_rule: DiscrepancyRule,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self::with_epsilon(2.0)
    }
}

impl PlannerConfig {
    /// Splits an overall bound evenly: `epsilon_plan = epsilon_track = sqrt(epsilon)`.
    pub fn with_epsilon(epsilon: f64) -> Self {
        PlannerConfig {
            epsilon_plan: epsilon.sqrt(),
            epsilon_track: epsilon.sqrt(),
            tunnel_width: 10,
            new_region_radius: 20.0,
            grow_increment: 10.0,
            timeout: Duration::from_secs(300),
            max_iterations: 200,
            track_max_expansions: None,
            progress_rule: ProgressRule::default(),
            discrepancy_rule: DiscrepancyRule::default(),
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon_plan * self.epsilon_track
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.epsilon_plan >= 1.0 && self.epsilon_plan.is_finite()) {
            return bad(format!("epsilon_plan must be at least 1, got {}", self.epsilon_plan));
        }
        if !(self.epsilon_track >= 1.0 && self.epsilon_track.is_finite()) {
            return bad(format!("epsilon_track must be at least 1, got {}", self.epsilon_track));
        }
        if !(self.new_region_radius > 0.0) || !(self.grow_increment > 0.0) {
            return bad("region radius and growth increment must be positive".into());
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlannerKind {
    Ad,
    Baseline,
}

impl PlannerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PlannerKind::Ad => "ad",
            PlannerKind::Baseline => "baseline",
        }
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PlannerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ad" => Ok(PlannerKind::Ad),
            "baseline" => Ok(PlannerKind::Baseline),
            other => Err(Error::InvalidConfig(format!("unknown planner '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanStatus {
    Found,
    NoPathWithinHorizon,
    ResourceExhausted,
}

impl PlanStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            PlanStatus::Found => "found",
            PlanStatus::NoPathWithinHorizon => "no_path_within_horizon",
            PlanStatus::ResourceExhausted => "resource_exhausted",
        }
    }
}

impl fmt::Display for PlanStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PlanStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "found" => Ok(PlanStatus::Found),
            "no_path_within_horizon" => Ok(PlanStatus::NoPathWithinHorizon),
            "resource_exhausted" => Ok(PlanStatus::ResourceExhausted),
            other => Err(Error::InvalidConfig(format!("unknown status '{other}'"))),
        }
    }
}

/// Summary of one search for traces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSummary {
    pub status: SearchStatus,
    pub cost: Option<Cost>,
    pub path_len: usize,
    pub stats: SearchStats,
}

impl PhaseSummary {
    fn of<S>(r: &SearchResult<S>) -> Self {
        PhaseSummary {
            status: r.status,
            cost: r.found().then_some(r.cost),
            path_len: r.path.as_ref().map_or(0, Vec::len),
            stats: r.stats,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub iteration: u32,
    pub planning: PhaseSummary,
    pub tracking: Option<PhaseSummary>,
    pub action: Option<RegionEvent>,
    /// Cells in 4D regions after this iteration's action.
    pub hd_cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanOutcome {
    pub planner: PlannerKind,
    pub status: PlanStatus,
    pub path: Option<Vec<StateHD>>,
    pub cost: Cost,
    pub iterations: u32,
    pub trace: Vec<IterationTrace>,
    pub regions: Vec<RegionEvent>,
    /// Summed over every search of the run; `elapsed` is the run's wall time.
    pub stats: SearchStats,
}

/// Cells a tracking search may use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tunnel {
    width: usize,
    height: usize,
    mask: Vec<bool>,
    len: usize,
}

impl Tunnel {
    pub fn contains(&self, c: StateLD) -> bool {
        c.x >= 0
            && c.y >= 0
            && (c.x as usize) < self.width
            && (c.y as usize) < self.height
            && self.mask[c.y as usize * self.width + c.x as usize]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn cells(&self) -> impl Iterator<Item = StateLD> + '_ {
        let w = self.width;
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(move |(i, _)| StateLD::new((i % w) as i32, (i / w) as i32))
    }
}

/// Union of discs of radius `width` around each path cell, without occupied cells.
pub fn build_tunnel(lattice: &Lattice, path: &[StateLD], width: u32) -> Tunnel {
    let map = lattice.scenario().map();
    let (w, h) = (map.width(), map.height());
    let mut mask = vec![false; w * h];
    let r = width as i32;
    let r2 = (width as i64) * (width as i64);
    for c in path {
        for y in (c.y - r).max(0)..=(c.y + r).min(h as i32 - 1) {
            for x in (c.x - r).max(0)..=(c.x + r).min(w as i32 - 1) {
                let (dx, dy) = ((x - c.x) as i64, (y - c.y) as i64);
                if dx * dx + dy * dy <= r2 && !map.is_occupied(x, y) {
                    mask[map.index(x, y)] = true;
                }
            }
        }
    }
    let len = mask.iter().filter(|&&m| m).count();
    Tunnel {
        width: w,
        height: h,
        mask,
        len,
    }
}

/// 4D search restricted to a tunnel.
pub struct TunnelSpace<'t, 'a> {
    pub lattice: &'t Lattice<'a>,
    pub tunnel: &'t Tunnel,
    pub heuristic: &'t HeuristicMap,
    pub goal: StateLD,
}

impl SearchSpace for TunnelSpace<'_, '_> {
    type State = StateHD;
    type Chain = ();

    fn successors(&self, s: &StateHD, _g: Cost, out: &mut Vec<Successor<StateHD, ()>>) {
        for &i in self.lattice.primitives().for_heading(s.heading) {
            let p = self.lattice.primitives().get(i as usize);
            if !self.tunnel.contains(StateLD::new(s.x + p.dx, s.y + p.dy)) {
                continue;
            }
            if let Some((n, c)) = self.lattice.transition(s.x, s.y, i as usize, s.t) {
                out.push(Successor::plain(n, c));
            }
        }
    }

    fn heuristic(&self, s: &StateHD) -> Option<Cost> {
        self.heuristic.cost_to_goal(s.cell())
    }

    fn is_goal(&self, s: &StateHD) -> bool {
        s.cell() == self.goal
    }
}

/// Cell where a failed tracking search got furthest.
pub fn find_most_progress(result: &SearchResult<StateHD>, start: &StateHD, rule: ProgressRule) -> StateLD {
    let pick = match rule {
        ProgressRule::MinHeuristic => result.frontier_best,
        ProgressRule::Deepest => result.deepest,
    };
    pick.map_or(start.cell(), |b| b.state.cell())
}

/// Cell at which the tracked path's extra cost over the planned one shows up.
///
/// Both paths are given as `(cell, cost-to-come)` sequences starting at the start cell. Cells
/// of the planned path are matched in order against the tracked path (each match after the
/// previous one); the start counts as shared with zero difference. Returns `None` when no cell
/// beyond the start is shared.
pub fn find_discrepancy(
    tunnel_path: &[(StateLD, Cost)],
    planning_path: &[(StateLD, Cost)],
    rule: DiscrepancyRule,
) -> Option<StateLD> {
    let mut cursor = 1;
    let mut previous = 0i64;
    let mut best: Option<(i64, StateLD)> = None;
    for &(cell, plan_g) in planning_path.iter().skip(1) {
        let Some(offset) = tunnel_path[cursor.min(tunnel_path.len())..]
            .iter()
            .position(|&(c, _)| c == cell)
        else {
            continue;
        };
        let idx = cursor + offset;
        cursor = idx + 1;
        let diff = tunnel_path[idx].1 as i64 - plan_g as i64;
        let score = match rule {
            DiscrepancyRule::MaxIncrease => diff - previous,
            DiscrepancyRule::MaxDifference => diff,
        };
        previous = diff;
        if best.map_or(true, |(b, _)| score > b) {
            best = Some((score, cell));
        }
    }
    best.map(|(_, c)| c)
}

fn region_action(
    graph: &mut AdaptiveGraph,
    cell: StateLD,
    config: &PlannerConfig,
    iteration: u32,
    reason: RegionReason,
) -> RegionEvent {
    let limit = (graph.lattice().width() as f64).hypot(graph.lattice().height() as f64);
    let (radius, new_cells) = if graph.is_hd_cell(cell) {
        // keep growing until some cell changes dimensionality
        let mut total = 0;
        loop {
            let (radius, added) = graph.grow_region(cell, config.grow_increment);
            total += added;
            if total > 0 || radius > limit {
                break (radius, total);
            }
        }
    } else {
        let added = graph.add_region(cell, config.new_region_radius);
        (config.new_region_radius, added)
    };
    RegionEvent {
        iteration,
        center: cell,
        radius,
        reason,
        new_cells,
    }
}

pub(crate) fn check_query(lattice: &Lattice, start: &StateHD, goal: StateLD) -> Result<HeuristicMap> {
    if start.t != 0 {
        return Err(Error::StartInvalid(format!("start time must be 0, got {}", start.t)));
    }
    if start.heading >= crate::lattice::NUM_HEADINGS {
        return Err(Error::StartInvalid(format!("heading {} out of range", start.heading)));
    }
    if !lattice.in_bounds(start.cell()) || !lattice.hd_state_free(start) || !lattice.ld_free(start.cell()) {
        return Err(Error::StartInvalid(format!("({}, {}) is in collision", start.x, start.y)));
    }
    dijkstra_heuristic(lattice, goal)
}

/// Plans from `start` (at step 0) to any state in the `goal` cell.
pub fn plan(lattice: &Lattice, start: StateHD, goal: StateLD, config: &PlannerConfig) -> Result<PlanOutcome> {
    config.validate()?;
    let heuristic = check_query(lattice, &start, goal)?;
    Ok(plan_with_heuristic(lattice, start, goal, config, &heuristic))
}

/// [`plan`] with a precomputed heuristic for `goal`.
pub fn plan_with_heuristic(
    lattice: &Lattice,
    start: StateHD,
    goal: StateLD,
    config: &PlannerConfig,
    heuristic: &HeuristicMap,
) -> PlanOutcome {
    let began = Instant::now();
    let deadline = began + config.timeout;
    let mut graph = AdaptiveGraph::new(lattice, start, goal);
    let mut outcome = PlanOutcome {
        planner: PlannerKind::Ad,
        status: PlanStatus::ResourceExhausted,
        path: None,
        cost: 0,
        iterations: 0,
        trace: Vec::new(),
        regions: vec![region_action(&mut graph, start.cell(), config, 0, RegionReason::Start)],
        stats: SearchStats::default(),
    };
    let finish = |mut outcome: PlanOutcome, status| {
        outcome.status = status;
        outcome.stats.elapsed = began.elapsed();
        outcome
    };

    for iteration in 1..=config.max_iterations {
        outcome.iterations = iteration;
        let limits = SearchLimits {
            deadline: Some(deadline),
            max_expansions: None,
        };
        let planning = weighted_astar(
            &PlanningSpace {
                graph: &graph,
                heuristic,
            },
            MixedState::Hd(start),
            config.epsilon_plan,
            &limits,
        );
        outcome.stats.accumulate(&planning.stats);
        let mut trace = IterationTrace {
            iteration,
            planning: PhaseSummary::of(&planning),
            tracking: None,
            action: None,
            hd_cells: graph.hd_cell_count(),
        };
        let plan_path = match (&planning.status, &planning.path) {
            (SearchStatus::Found, Some(p)) => p,
            (SearchStatus::NoPath, _) => {
                outcome.trace.push(trace);
                return finish(outcome, PlanStatus::NoPathWithinHorizon);
            }
            _ => {
                outcome.trace.push(trace);
                return finish(outcome, PlanStatus::ResourceExhausted);
            }
        };
        let plan_cells: Vec<StateLD> = plan_path.iter().map(MixedState::cell).collect();
        let tunnel = build_tunnel(lattice, &plan_cells, config.tunnel_width);
        let tracking = weighted_astar(
            &TunnelSpace {
                lattice,
                tunnel: &tunnel,
                heuristic,
                goal,
            },
            start,
            config.epsilon_plan,
            &SearchLimits {
                deadline: Some(deadline),
                max_expansions: config.track_max_expansions,
            },
        );
        outcome.stats.accumulate(&tracking.stats);
        trace.tracking = Some(PhaseSummary::of(&tracking));
        let timed_out = tracking.status == SearchStatus::ResourceExhausted && Instant::now() >= deadline;
        if timed_out {
            outcome.trace.push(trace);
            return finish(outcome, PlanStatus::ResourceExhausted);
        }

        let (cell, reason) = match &tracking.path {
            None => (
                find_most_progress(&tracking, &start, config.progress_rule),
                RegionReason::MostProgress,
            ),
            Some(path) if tracking.cost as f64 > config.epsilon_track * planning.cost as f64 => {
                let tracked: Vec<_> = path.iter().map(StateHD::cell).zip(tracking.path_costs.iter().copied()).collect();
                let planned: Vec<_> = plan_cells.iter().copied().zip(planning.path_costs.iter().copied()).collect();
                let cell = find_discrepancy(&tracked, &planned, config.discrepancy_rule).unwrap_or_else(|| {
                    log::warn!("no shared cells between planned and tracked paths; using the planned midpoint");
                    plan_cells[plan_cells.len() / 2]
                });
                (cell, RegionReason::Discrepancy)
            }
            Some(path) => {
                outcome.path = Some(path.clone());
                outcome.cost = tracking.cost;
                outcome.trace.push(trace);
                return finish(outcome, PlanStatus::Found);
            }
        };
        let event = region_action(&mut graph, cell, config, iteration, reason);
        trace.action = Some(event);
        trace.hd_cells = graph.hd_cell_count();
        outcome.regions.push(event);
        outcome.trace.push(trace);
        if event.new_cells == 0 {
            log::warn!("region update at ({}, {}) covered no new cells", cell.x, cell.y);
            return finish(outcome, PlanStatus::ResourceExhausted);
        }
    }
    finish(outcome, PlanStatus::ResourceExhausted)
}

/// Why a path failed re-simulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathViolation {
    Empty,
    WrongStart,
    WrongGoal,
    /// Consecutive states at index `i` and `i + 1` are not joined by a primitive.
    NotConnected(usize),
    TimeNotIncreasing(usize),
    BeyondHorizon(usize),
    Collision(usize),
    CostMismatch { claimed: Cost, actual: Cost },
}

/// Replays `path` primitive by primitive and checks every sampled pose against the world.
pub fn validate_path(
    lattice: &Lattice,
    start: &StateHD,
    goal: StateLD,
    path: &[StateHD],
    claimed_cost: Cost,
) -> std::result::Result<(), PathViolation> {
    let (Some(first), Some(last)) = (path.first(), path.last()) else {
        return Err(PathViolation::Empty);
    };
    if first != start {
        return Err(PathViolation::WrongStart);
    }
    if last.cell() != goal {
        return Err(PathViolation::WrongGoal);
    }
    let sc = lattice.scenario();
    let map = sc.map();
    let cs = map.cell_size();
    let mut total = 0;
    for (i, w) in path.windows(2).enumerate() {
        let (a, b) = (&w[0], &w[1]);
        if b.t <= a.t {
            return Err(PathViolation::TimeNotIncreasing(i));
        }
        if b.t > sc.time_horizon_steps() {
            return Err(PathViolation::BeyondHorizon(i));
        }
        let Some(k) = lattice.primitives().find(a, b) else {
            return Err(PathViolation::NotConnected(i));
        };
        let p = lattice.primitives().get(k);
        let origin = map.cell_center(a.x, a.y);
        let swept: Vec<TimedPose> = p
            .poses
            .iter()
            .enumerate()
            .map(|(j, q)| TimedPose {
                pose: crate::geom::Pose::new(origin.x + q.x * cs, origin.y + q.y * cs, q.theta),
                t: (a.t as usize + j) as f64 * sc.dt(),
            })
            .collect();
        if sc.transition_collision(&swept) {
            return Err(PathViolation::Collision(i));
        }
        total += p.cost;
    }
    if total != claimed_cost {
        return Err(PathViolation::CostMismatch {
            claimed: claimed_cost,
            actual: total,
        });
    }
    Ok(())
}

/// True iff a found outcome's path re-simulates without collisions from `start` to `goal`.
pub fn validate_outcome(lattice: &Lattice, start: &StateHD, goal: StateLD, outcome: &PlanOutcome) -> bool {
    outcome.status == PlanStatus::Found
        && outcome
            .path
            .as_deref()
            .is_some_and(|p| validate_path(lattice, start, goal, p, outcome.cost).is_ok())
}
