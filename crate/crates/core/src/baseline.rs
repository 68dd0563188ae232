//! Weighted A* directly in the full (x, y, heading, t) space.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::adplanner::{check_query, PlanOutcome, PlanStatus, PlannerKind};
use crate::error::{Error, Result};
use crate::lattice::{Cost, Lattice, StateHD, StateLD};
use crate::search::{duration_secs, weighted_astar, HeuristicMap, SearchLimits, SearchSpace, SearchStatus, Successor};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub epsilon: f64,
    #[serde(with = "duration_secs")]
    pub timeout: Duration,
    pub max_expansions: Option<u64>,
}

impl BaselineConfig {
    pub fn with_epsilon(epsilon: f64) -> Self {
        BaselineConfig {
            epsilon,
            timeout: Duration::from_secs(300),
            max_expansions: None,
        }
    }
}

/// The unrestricted 4D lattice as a search space.
pub struct FullSpace<'t, 'a> {
    pub lattice: &'t Lattice<'a>,
    pub heuristic: &'t HeuristicMap,
    pub goal: StateLD,
}

impl SearchSpace for FullSpace<'_, '_> {
    type State = StateHD;
    type Chain = ();

    fn successors(&self, s: &StateHD, _g: Cost, out: &mut Vec<Successor<StateHD, ()>>) {
        for &i in self.lattice.primitives().for_heading(s.heading) {
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

pub fn plan_full(lattice: &Lattice, start: StateHD, goal: StateLD, config: &BaselineConfig) -> Result<PlanOutcome> {
    if !(config.epsilon >= 1.0 && config.epsilon.is_finite()) {
        return Err(Error::InvalidConfig(format!("epsilon must be at least 1, got {}", config.epsilon)));
    }
    let heuristic = check_query(lattice, &start, goal)?;
    Ok(plan_full_with_heuristic(lattice, start, goal, config, &heuristic))
}

pub fn plan_full_with_heuristic(
    lattice: &Lattice,
    start: StateHD,
    goal: StateLD,
    config: &BaselineConfig,
    heuristic: &HeuristicMap,
) -> PlanOutcome {
    let began = Instant::now();
    let space = FullSpace {
        lattice,
        heuristic,
        goal,
    };
    let limits = SearchLimits {
        deadline: Some(began + config.timeout),
        max_expansions: config.max_expansions,
    };
    let r = weighted_astar(&space, start, config.epsilon, &limits);
    let status = match r.status {
        SearchStatus::Found => PlanStatus::Found,
        SearchStatus::NoPath => PlanStatus::NoPathWithinHorizon,
        SearchStatus::ResourceExhausted => PlanStatus::ResourceExhausted,
    };
    let mut stats = r.stats;
    stats.elapsed = began.elapsed();
    PlanOutcome {
        planner: PlannerKind::Baseline,
        status,
        cost: r.cost,
        path: r.path,
        iterations: 1,
        trace: Vec::new(),
        regions: Vec::new(),
        stats,
    }
}
