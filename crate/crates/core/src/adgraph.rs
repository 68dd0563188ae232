//! The mixed 2D/4D graph: circular 4D regions embedded in the 2D lattice.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lattice::{Cost, Lattice, StateHD, StateLD, NUM_HEADINGS};
use crate::search::{ld_cost_map, HeuristicMap, SearchSpace, Successor};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HdRegion {
    pub center: StateLD,
    pub radius: f64,
}

impl HdRegion {
    pub fn contains(&self, c: StateLD) -> bool {
        let (dx, dy) = ((c.x - self.center.x) as f64, (c.y - self.center.y) as f64);
        dx * dx + dy * dy <= self.radius * self.radius
    }
}

/// Earliest possible arrival step per cell, from a 2D search that ignores moving obstacles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeLowerBoundMap {
    width: usize,
    height: usize,
    steps: Vec<u32>,
}

impl TimeLowerBoundMap {
    pub fn get(&self, c: StateLD) -> Option<u32> {
        if c.x < 0 || c.y < 0 || c.x as usize >= self.width || c.y as usize >= self.height {
            return None;
        }
        let v = self.steps[c.y as usize * self.width + c.x as usize];
        (v != u32::MAX).then_some(v)
    }
}

/// `t_dep` for every cell when departing from `start` at step `t0`.
pub fn compute_time_lower_bounds(lattice: &Lattice, start: StateLD, t0: u32) -> TimeLowerBoundMap {
    let costs = ld_cost_map(lattice, start);
    let step_cost = lattice.cost_model().cost_scale as f64 * lattice.scenario().dt();
    let mut steps = vec![u32::MAX; lattice.width() * lattice.height()];
    for y in 0..lattice.height() as i32 {
        for x in 0..lattice.width() as i32 {
            let c = StateLD::new(x, y);
            if let Some(cost) = costs.get(c) {
                let s = (cost as f64 / step_cost + 1e-9).floor() as u64 + t0 as u64;
                steps[lattice.cell_index(c)] = s.min(u32::MAX as u64 - 1) as u32;
            }
        }
    }
    TimeLowerBoundMap {
        width: lattice.width(),
        height: lattice.height(),
        steps,
    }
}

pub fn project(s: &StateHD) -> StateLD {
    s.cell()
}

/// States `(cell, h, t)` for every heading and `t_min <= t <= t_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InverseProjection {
    pub cell: StateLD,
    pub t_min: u32,
    pub t_max: u32,
}

impl InverseProjection {
    pub fn empty(cell: StateLD) -> Self {
        InverseProjection {
            cell,
            t_min: 1,
            t_max: 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.t_min > self.t_max
    }

    pub fn len(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            NUM_HEADINGS as usize * (self.t_max - self.t_min + 1) as usize
        }
    }

    pub fn contains(&self, s: &StateHD) -> bool {
        s.cell() == self.cell && s.heading < NUM_HEADINGS && s.t >= self.t_min && s.t <= self.t_max
    }

    pub fn iter(&self) -> impl Iterator<Item = StateHD> + '_ {
        let range = if self.is_empty() { 1..=0 } else { self.t_min..=self.t_max };
        range.flat_map(move |t| (0..NUM_HEADINGS).map(move |h| StateHD::new(self.cell.x, self.cell.y, h, t)))
    }
}

/// A vertex of the mixed graph. Ordered by cell, then 2D before 4D, then heading and time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MixedState {
    Ld(StateLD),
    Hd(StateHD),
}

impl MixedState {
    pub fn cell(&self) -> StateLD {
        match self {
            MixedState::Ld(c) => *c,
            MixedState::Hd(s) => s.cell(),
        }
    }

    pub fn is_hd(&self) -> bool {
        matches!(self, MixedState::Hd(_))
    }

    pub fn as_hd(&self) -> Option<&StateHD> {
        match self {
            MixedState::Hd(s) => Some(s),
            MixedState::Ld(_) => None,
        }
    }

    fn key(&self) -> (i32, i32, u8, u8, u32) {
        match self {
            MixedState::Ld(c) => (c.x, c.y, 0, 0, 0),
            MixedState::Hd(s) => (s.x, s.y, 1, s.heading, s.t),
        }
    }
}

impl Ord for MixedState {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for MixedState {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MixedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MixedState::Ld(c) => write!(f, "({}, {})", c.x, c.y),
            MixedState::Hd(s) => write!(f, "({}, {}, {}, {})", s.x, s.y, s.heading, s.t),
        }
    }
}

/// Cursor over the departure times of one primitive leaving a 2D cell into a 4D region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntryChain {
    pub from: StateLD,
    /// Cost at which `from` was expanded.
    pub g_from: Cost,
    pub prim: u16,
    pub t_pre: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionReason {
    Start,
    MostProgress,
    Discrepancy,
}

/// One region change, as exported in planner traces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionEvent {
    pub iteration: u32,
    pub center: StateLD,
    pub radius: f64,
    pub reason: RegionReason,
    /// Cells that became 4D through this event.
    pub new_cells: usize,
}

pub struct AdaptiveGraph<'a> {
    lattice: &'a Lattice<'a>,
    start: StateHD,
    goal: StateLD,
    regions: Vec<HdRegion>,
    hd_mask: Vec<bool>,
    hd_cells: usize,
    tlb: TimeLowerBoundMap,
}

impl<'a> AdaptiveGraph<'a> {
    /// Graph with no regions yet; the planner adds the start region itself.
    pub fn new(lattice: &'a Lattice<'a>, start: StateHD, goal: StateLD) -> Self {
        let tlb = compute_time_lower_bounds(lattice, start.cell(), start.t);
        AdaptiveGraph {
            lattice,
            start,
            goal,
            regions: Vec::new(),
            hd_mask: vec![false; lattice.width() * lattice.height()],
            hd_cells: 0,
            tlb,
        }
    }

    pub fn lattice(&self) -> &'a Lattice<'a> {
        self.lattice
    }

    pub fn start(&self) -> StateHD {
        self.start
    }

    pub fn goal(&self) -> StateLD {
        self.goal
    }

    pub fn regions(&self) -> &[HdRegion] {
        &self.regions
    }

    pub fn time_lower_bounds(&self) -> &TimeLowerBoundMap {
        &self.tlb
    }

    pub fn hd_cell_count(&self) -> usize {
        self.hd_cells
    }

    pub fn is_hd_cell(&self, c: StateLD) -> bool {
        self.lattice.in_bounds(c) && self.hd_mask[self.lattice.cell_index(c)]
    }

    fn paint(&mut self, region: HdRegion) -> usize {
        let r = region.radius.floor() as i32;
        let mut added = 0;
        for y in (region.center.y - r).max(0)..=(region.center.y + r).min(self.lattice.height() as i32 - 1) {
            for x in (region.center.x - r).max(0)..=(region.center.x + r).min(self.lattice.width() as i32 - 1) {
                let c = StateLD::new(x, y);
                let i = self.lattice.cell_index(c);
                if !self.hd_mask[i] && region.contains(c) {
                    self.hd_mask[i] = true;
                    added += 1;
                }
            }
        }
        self.hd_cells += added;
        added
    }

    /// Appends a region; returns the number of cells that became 4D.
    pub fn add_region(&mut self, center: StateLD, radius: f64) -> usize {
        assert!(radius > 0.0, "region radius must be positive");
        let region = HdRegion { center, radius };
        self.regions.push(region);
        self.paint(region)
    }

    /// Enlarges the region containing `center` (nearest center first, then earliest added),
    /// or adds a new one of radius `increment` when none contains it.
    /// Returns the region's new radius and the number of cells that became 4D.
    pub fn grow_region(&mut self, center: StateLD, increment: f64) -> (f64, usize) {
        let containing = self
            .regions
            .iter()
            .enumerate()
            .filter(|(_, r)| r.contains(center))
            .min_by(|(i, a), (j, b)| {
                a.center
                    .distance(center)
                    .total_cmp(&b.center.distance(center))
                    .then(i.cmp(j))
            })
            .map(|(i, _)| i);
        match containing {
            Some(i) => {
                self.regions[i].radius += increment;
                let region = self.regions[i];
                (region.radius, self.paint(region))
            }
            None => (increment, self.add_region(center, increment)),
        }
    }

    /// Pre-images of a 2D cell that survive time pruning.
    pub fn inverse_project(&self, c: StateLD) -> InverseProjection {
        match self.tlb.get(c) {
            Some(t_dep) if t_dep <= self.lattice.horizon() => InverseProjection {
                cell: c,
                t_min: t_dep,
                t_max: self.lattice.horizon(),
            },
            _ => InverseProjection::empty(c),
        }
    }

    /// Cost of entering a 4D region from a 2D cell reached at cost `g_from`, departing at step
    /// `t_pre` along primitive `prim`. Cost is time, so arriving at step `t` costs at least the
    /// time up to `t`: departing later than the 2D path allows pays for the wait.
    pub fn entry_cost(&self, g_from: Cost, prim: usize, t_pre: u32) -> Cost {
        let p = self.lattice.primitives().get(prim);
        let arrival = self.lattice.cost_model().time_cost(t_pre + p.duration, self.lattice.scenario().dt());
        p.cost.max(arrival.saturating_sub(g_from))
    }

    fn entry_from(&self, from: StateLD, g_from: Cost, prim: usize, first_t: u32) -> Option<Successor<MixedState, EntryChain>> {
        let p = self.lattice.primitives().get(prim);
        let last = self.lattice.horizon().checked_sub(p.duration)?;
        (first_t..=last)
            .find(|&t| self.lattice.dynamic_ok(from.x, from.y, prim, t))
            .map(|t| Successor {
                state: MixedState::Hd(StateHD::new(from.x + p.dx, from.y + p.dy, p.end_heading, t + p.duration)),
                cost: self.entry_cost(g_from, prim, t),
                chain: Some(EntryChain {
                    from,
                    g_from,
                    prim: prim as u16,
                    t_pre: t,
                }),
            })
    }

    /// Successors of `s` expanded at cost `g`. Entries from a 2D cell into 4D regions come as
    /// chains that [`AdaptiveGraph::next_entry`] continues in increasing departure time (and
    /// non-decreasing cost).
    pub fn ad_successors_into(&self, s: &MixedState, g: Cost, out: &mut Vec<Successor<MixedState, EntryChain>>) {
        match s {
            MixedState::Hd(hd) => {
                for &i in self.lattice.primitives().for_heading(hd.heading) {
                    if let Some((next, cost)) = self.lattice.transition(hd.x, hd.y, i as usize, hd.t) {
                        let state = if self.is_hd_cell(next.cell()) {
                            MixedState::Hd(next)
                        } else {
                            MixedState::Ld(next.cell())
                        };
                        out.push(Successor::plain(state, cost));
                    }
                }
            }
            MixedState::Ld(c) => {
                let cm = self.lattice.cost_model();
                for (dx, dy) in crate::lattice::NEIGHBORS_8 {
                    let n = StateLD::new(c.x + dx, c.y + dy);
                    if self.lattice.ld_free(n) && !self.is_hd_cell(n) {
                        out.push(Successor::plain(MixedState::Ld(n), cm.move_cost(dx, dy)));
                    }
                }
                let pre = self.inverse_project(*c);
                if pre.is_empty() {
                    return;
                }
                for (i, p) in self.lattice.primitives().primitives().iter().enumerate() {
                    if !self.is_hd_cell(StateLD::new(c.x + p.dx, c.y + p.dy)) || !self.lattice.static_ok(c.x, c.y, i) {
                        continue;
                    }
                    if let Some(succ) = self.entry_from(*c, g, i, pre.t_min) {
                        out.push(succ);
                    }
                }
            }
        }
    }

    pub fn next_entry(&self, chain: &EntryChain) -> Option<Successor<MixedState, EntryChain>> {
        self.entry_from(chain.from, chain.g_from, chain.prim as usize, chain.t_pre + 1)
    }

    /// Every successor of `s` expanded at cost `g`, with all entry chains expanded.
    pub fn ad_successors_all(&self, s: &MixedState, g: Cost) -> Vec<(MixedState, Cost)> {
        let mut first = Vec::new();
        self.ad_successors_into(s, g, &mut first);
        let mut out = Vec::new();
        for succ in first {
            let mut cur = Some(succ);
            while let Some(s) = cur {
                out.push((s.state, s.cost));
                cur = s.chain.and_then(|c| self.next_entry(&c));
            }
        }
        out
    }
}

/// Search space of the planning phase: the mixed graph, goal at the goal cell in any form.
pub struct PlanningSpace<'g, 'a> {
    pub graph: &'g AdaptiveGraph<'a>,
    pub heuristic: &'g HeuristicMap,
}

impl SearchSpace for PlanningSpace<'_, '_> {
    type State = MixedState;
    type Chain = EntryChain;

    fn successors(&self, s: &MixedState, g: Cost, out: &mut Vec<Successor<MixedState, EntryChain>>) {
        self.graph.ad_successors_into(s, g, out);
    }

    fn next_in_chain(&self, chain: &EntryChain) -> Option<Successor<MixedState, EntryChain>> {
        self.graph.next_entry(chain)
    }

    fn heuristic(&self, s: &MixedState) -> Option<Cost> {
        self.heuristic.cost_to_goal(s.cell())
    }

    fn is_goal(&self, s: &MixedState) -> bool {
        s.cell() == self.graph.goal
    }

    fn is_high_dim(&self, s: &MixedState) -> bool {
        s.is_hd()
    }
}
