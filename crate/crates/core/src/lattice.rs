//! State lattices and transition sets.
//!
//! The high-dimensional lattice is `(x, y, heading, t)` with 16 headings and unicycle motion
//! primitives that never wait in place. The low-dimensional lattice is the 8-connected grid
//! over cells. Every primitive is timed so that its cost is at least the 8-connected cost
//! over the cells its samples pass through; together with a conservative inflation of the
//! low-dimensional grid this makes the optimal 2D cost a lower bound on the optimal 4D cost
//! between the projected endpoints.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{self, Point2, Pose};
use crate::world::{rasterize_polygon, Scenario, TimedPose};

pub type Cost = u64;

pub const NUM_HEADINGS: u8 = 16;

/// Cost units per second of execution time.
pub const COST_SCALE: u64 = 1000;

/// Lattice direction of each heading index; heading angles are the angles of these vectors.
const DIRECTIONS: [(i32, i32); NUM_HEADINGS as usize] = [
    (1, 0),
    (2, 1),
    (1, 1),
    (1, 2),
    (0, 1),
    (-1, 2),
    (-1, 1),
    (-2, 1),
    (-1, 0),
    (-2, -1),
    (-1, -1),
    (-1, -2),
    (0, -1),
    (1, -2),
    (1, -1),
    (2, -1),
];

pub fn heading_vector(heading: u8) -> (i32, i32) {
    DIRECTIONS[(heading % NUM_HEADINGS) as usize]
}

/// Angle of heading `heading` in `(-pi, pi]`.
pub fn heading_angle(heading: u8) -> f64 {
    let (x, y) = heading_vector(heading);
    (y as f64).atan2(x as f64)
}

fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateLD {
    pub x: i32,
    pub y: i32,
}

impl StateLD {
    pub const fn new(x: i32, y: i32) -> Self {
        StateLD { x, y }
    }

    pub fn distance(self, other: StateLD) -> f64 {
        ((self.x - other.x) as f64).hypot((self.y - other.y) as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateHD {
    pub x: i32,
    pub y: i32,
    pub heading: u8,
    pub t: u32,
}

impl StateHD {
    pub const fn new(x: i32, y: i32, heading: u8, t: u32) -> Self {
        StateHD { x, y, heading, t }
    }

    pub fn cell(&self) -> StateLD {
        StateLD::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    /// Cells per second.
    pub max_speed: f64,
    /// Cost units per second.
    pub cost_scale: u64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            max_speed: 1.0,
            cost_scale: COST_SCALE,
        }
    }
}

impl CostModel {
    pub fn straight_cost(&self) -> Cost {
        (self.cost_scale as f64 / self.max_speed).round() as Cost
    }

    pub fn diagonal_cost(&self) -> Cost {
        (std::f64::consts::SQRT_2 * self.cost_scale as f64 / self.max_speed).round() as Cost
    }

    pub fn move_cost(&self, dx: i32, dy: i32) -> Cost {
        if dx != 0 && dy != 0 {
            self.diagonal_cost()
        } else {
            self.straight_cost()
        }
    }

    /// Cost of `steps` time steps of length `dt`.
    pub fn time_cost(&self, steps: u32, dt: f64) -> Cost {
        (steps as f64 * dt * self.cost_scale as f64).round() as Cost
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MotionPrimitive {
    pub start_heading: u8,
    pub dx: i32,
    pub dy: i32,
    pub end_heading: u8,
    pub duration: u32,
    /// One pose per time step in cell units relative to the start cell center,
    /// `duration + 1` entries.
    pub poses: Vec<Pose>,
    pub cost: Cost,
}

impl MotionPrimitive {
    /// Validates a primitive and assigns its time-proportional cost.
    pub fn new(
        start_heading: u8,
        dx: i32,
        dy: i32,
        end_heading: u8,
        duration: u32,
        poses: Vec<Pose>,
        dt: f64,
        cost_model: &CostModel,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidPrimitive(m));
        if start_heading >= NUM_HEADINGS || end_heading >= NUM_HEADINGS {
            return bad(format!("heading out of range: {start_heading} -> {end_heading}"));
        }
        if duration == 0 {
            return bad("duration must be positive".into());
        }
        if dx == 0 && dy == 0 {
            return bad("zero-displacement primitives are not allowed".into());
        }
        if poses.len() != duration as usize + 1 {
            return bad(format!("expected {} poses, got {}", duration + 1, poses.len()));
        }
        let (first, last) = (poses[0], poses[poses.len() - 1]);
        let tol = 1e-6;
        if first.x.abs() > tol
            || first.y.abs() > tol
            || angle_diff(first.theta, heading_angle(start_heading)) > tol
        {
            return bad("first pose must be the origin with the start heading".into());
        }
        if (last.x - dx as f64).abs() > tol
            || (last.y - dy as f64).abs() > tol
            || angle_diff(last.theta, heading_angle(end_heading)) > tol
        {
            return bad("last pose must be the displacement with the end heading".into());
        }
        let cost = cost_model.time_cost(duration, dt);
        let ld = sample_chain_cost(&poses, cost_model).ok_or_else(|| {
            Error::InvalidPrimitive("consecutive samples must stay in adjacent cells".into())
        })?;
        if cost < ld {
            return bad(format!(
                "cost {cost} is below the 2D cost {ld} of the swept cells; slow the primitive down"
            ));
        }
        Ok(MotionPrimitive {
            start_heading,
            dx,
            dy,
            end_heading,
            duration,
            poses,
            cost,
        })
    }
}

fn sample_cell(p: &Pose) -> (i32, i32) {
    ((p.x + 0.5).floor() as i32, (p.y + 0.5).floor() as i32)
}

/// 8-connected cost from the first to the last sample's cell, moving only through cells
/// that contain a sample. `None` when consecutive samples skip a cell.
fn sample_chain_cost(poses: &[Pose], cost_model: &CostModel) -> Option<Cost> {
    let cells: Vec<(i32, i32)> = poses.iter().map(sample_cell).collect();
    if cells
        .windows(2)
        .any(|w| (w[0].0 - w[1].0).abs() > 1 || (w[0].1 - w[1].1).abs() > 1)
    {
        return None;
    }
    let allowed: std::collections::BTreeSet<(i32, i32)> = cells.iter().copied().collect();
    let (src, dst) = (cells[0], *cells.last().unwrap());
    let mut dist: BTreeMap<(i32, i32), Cost> = BTreeMap::new();
    let mut heap = BinaryHeap::new();
    dist.insert(src, 0);
    heap.push(Reverse((0, src)));
    while let Some(Reverse((d, c))) = heap.pop() {
        if c == dst {
            return Some(d);
        }
        if dist.get(&c).is_some_and(|&b| b < d) {
            continue;
        }
        for (dx, dy) in NEIGHBORS_8 {
            let n = (c.0 + dx, c.1 + dy);
            if !allowed.contains(&n) {
                continue;
            }
            let nd = d + cost_model.move_cost(dx, dy);
            if dist.get(&n).map_or(true, |&b| nd < b) {
                dist.insert(n, nd);
                heap.push(Reverse((nd, n)));
            }
        }
    }
    None
}

pub(crate) const NEIGHBORS_8: [(i32, i32); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];

/// Parametric path of a primitive in cell units: position and tangent at `s` in `[0, 1]`.
struct Curve {
    start: (f64, f64),
    end: (f64, f64),
    m0: (f64, f64),
    m1: (f64, f64),
}

impl Curve {
    fn new(h0: u8, h1: u8, d: (i32, i32)) -> Self {
        let end = (d.0 as f64, d.1 as f64);
        let len = end.0.hypot(end.1);
        let (a0, a1) = (heading_angle(h0), heading_angle(h1));
        Curve {
            start: (0.0, 0.0),
            end,
            m0: (len * a0.cos(), len * a0.sin()),
            m1: (len * a1.cos(), len * a1.sin()),
        }
    }

    /// Cubic Hermite interpolation between the two oriented endpoints.
    fn eval(&self, s: f64) -> ((f64, f64), (f64, f64)) {
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let d00 = 6.0 * s2 - 6.0 * s;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = -6.0 * s2 + 6.0 * s;
        let d11 = 3.0 * s2 - 2.0 * s;
        let comb = |a: f64, b: f64, c: f64, d: f64, i: usize| {
            let pick = |v: (f64, f64)| if i == 0 { v.0 } else { v.1 };
            a * pick(self.start) + b * pick(self.m0) + c * pick(self.end) + d * pick(self.m1)
        };
        (
            (comb(h00, h10, h01, h11, 0), comb(h00, h10, h01, h11, 1)),
            (comb(d00, d10, d01, d11, 0), comb(d00, d10, d01, d11, 1)),
        )
    }
}

fn build_primitive(h0: u8, h1: u8, d: (i32, i32), dt: f64, cost_model: &CostModel) -> MotionPrimitive {
    const TABLE: usize = 4000;
    let curve = Curve::new(h0, h1, d);
    let mut arc = Vec::with_capacity(TABLE + 1);
    arc.push(0.0);
    let mut prev = curve.eval(0.0).0;
    for i in 1..=TABLE {
        let p = curve.eval(i as f64 / TABLE as f64).0;
        arc.push(arc[i - 1] + (p.0 - prev.0).hypot(p.1 - prev.1));
        prev = p;
    }
    let length = arc[TABLE];
    let sample = |duration: u32| -> Vec<Pose> {
        (0..=duration)
            .map(|k| {
                if k == 0 {
                    return Pose::new(0.0, 0.0, heading_angle(h0));
                }
                if k == duration {
                    return Pose::new(d.0 as f64, d.1 as f64, heading_angle(h1));
                }
                let target = length * k as f64 / duration as f64;
                let i = arc.partition_point(|&a| a < target).clamp(1, TABLE);
                let frac = (target - arc[i - 1]) / (arc[i] - arc[i - 1]);
                let s = (i as f64 - 1.0 + frac) / TABLE as f64;
                let ((x, y), (tx, ty)) = curve.eval(s);
                Pose::new(x, y, ty.atan2(tx))
            })
            .collect()
    };
    let step_cost = dt * cost_model.cost_scale as f64;
    let mut duration = ((length / (cost_model.max_speed * dt)) - 1e-9).ceil().max(1.0) as u32;
    loop {
        let poses = sample(duration);
        let cost = cost_model.time_cost(duration, dt);
        let ld = sample_chain_cost(&poses, cost_model).expect("dense sampling keeps cells adjacent");
        if cost >= ld {
            return MotionPrimitive {
                start_heading: h0,
                dx: d.0,
                dy: d.1,
                end_heading: h1,
                duration,
                poses,
                cost,
            };
        }
        duration = (duration + 1).max((ld as f64 / step_cost - 1e-9).ceil() as u32);
    }
}

/// The primitive table for one time resolution and cost model.
#[derive(Debug, Clone)]
pub struct PrimitiveSet {
    dt: f64,
    cost_model: CostModel,
    primitives: Vec<MotionPrimitive>,
    by_heading: Vec<Vec<u16>>,
}

impl PrimitiveSet {
    /// Per heading: one straight move along the heading's lattice direction and two arcs
    /// turning by one heading index either way.
    pub fn unicycle(dt: f64, cost_model: CostModel) -> Self {
        let mut prims = Vec::with_capacity(3 * NUM_HEADINGS as usize);
        for h in 0..NUM_HEADINGS {
            prims.push(build_primitive(h, h, heading_vector(h), dt, &cost_model));
            for h1 in [(h + 1) % NUM_HEADINGS, (h + NUM_HEADINGS - 1) % NUM_HEADINGS] {
                let (a, b) = (heading_vector(h), heading_vector(h1));
                prims.push(build_primitive(h, h1, (a.0 + b.0, a.1 + b.1), dt, &cost_model));
            }
        }
        Self::from_primitives(dt, cost_model, prims).expect("built-in primitives are valid")
    }

    pub fn from_primitives(dt: f64, cost_model: CostModel, primitives: Vec<MotionPrimitive>) -> Result<Self> {
        if primitives.is_empty() {
            return Err(Error::InvalidPrimitive("empty primitive set".into()));
        }
        if primitives.len() > u16::MAX as usize {
            return Err(Error::InvalidPrimitive("too many primitives".into()));
        }
        let mut by_heading = vec![Vec::new(); NUM_HEADINGS as usize];
        for (i, p) in primitives.iter().enumerate() {
            by_heading[p.start_heading as usize].push(i as u16);
        }
        Ok(PrimitiveSet {
            dt,
            cost_model,
            primitives,
            by_heading,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn cost_model(&self) -> &CostModel {
        &self.cost_model
    }

    pub fn primitives(&self) -> &[MotionPrimitive] {
        &self.primitives
    }

    pub fn get(&self, index: usize) -> &MotionPrimitive {
        &self.primitives[index]
    }

    pub fn for_heading(&self, heading: u8) -> &[u16] {
        &self.by_heading[heading as usize]
    }

    /// Primitive connecting `from` to `to`, if any.
    pub fn find(&self, from: &StateHD, to: &StateHD) -> Option<usize> {
        self.for_heading(from.heading).iter().map(|&i| i as usize).find(|&i| {
            let p = &self.primitives[i];
            p.end_heading == to.heading
                && from.x + p.dx == to.x
                && from.y + p.dy == to.y
                && to.t.checked_sub(from.t) == Some(p.duration)
        })
    }
}

#[derive(Debug, Clone)]
struct Sweep {
    /// Cells overlapped by the footprint at any sample, relative to the start cell.
    cells: Vec<(i32, i32)>,
    /// Sample poses in meters relative to the start cell center.
    offsets: Vec<Pose>,
    /// Bound on how far any footprint point strays from the start cell center.
    reach: f64,
}

/// Successor generation for one scenario and primitive set.
#[derive(Debug, Clone)]
pub struct Lattice<'s> {
    scenario: &'s Scenario,
    primitives: PrimitiveSet,
    sweeps: Vec<Sweep>,
    ld_free: Vec<bool>,
}

impl<'s> Lattice<'s> {
    pub fn new(scenario: &'s Scenario, primitives: PrimitiveSet) -> Result<Self> {
        if (primitives.dt() - scenario.dt()).abs() > 1e-12 {
            return Err(Error::InvalidPrimitive(format!(
                "primitives built for dt = {}, scenario uses {}",
                primitives.dt(),
                scenario.dt()
            )));
        }
        let map = scenario.map();
        let cs = map.cell_size();
        let fp = scenario.footprint();
        let origin = map.cell_center(0, 0);
        let sweeps = primitives
            .primitives()
            .iter()
            .map(|p| {
                let offsets: Vec<Pose> = p
                    .poses
                    .iter()
                    .map(|q| Pose::new(q.x * cs, q.y * cs, q.theta))
                    .collect();
                let mut cells = std::collections::BTreeSet::new();
                for off in &offsets {
                    let pose = Pose::new(origin.x + off.x, origin.y + off.y, off.theta);
                    cells.extend(rasterize_polygon(&fp.at(&pose), cs));
                }
                let reach = offsets
                    .iter()
                    .map(|o| o.x.hypot(o.y))
                    .fold(0.0, f64::max)
                    + fp.circumscribed_radius();
                Sweep {
                    cells: cells.into_iter().collect(),
                    offsets,
                    reach,
                }
            })
            .collect();
        let ld_free = inflated_free_cells(scenario);
        Ok(Lattice {
            scenario,
            primitives,
            sweeps,
            ld_free,
        })
    }

    /// Lattice with the default unicycle primitives and cost model.
    pub fn with_defaults(scenario: &'s Scenario) -> Self {
        Self::new(scenario, PrimitiveSet::unicycle(scenario.dt(), CostModel::default()))
            .expect("default primitives match the scenario dt")
    }

    pub fn scenario(&self) -> &'s Scenario {
        self.scenario
    }

    pub fn primitives(&self) -> &PrimitiveSet {
        &self.primitives
    }

    pub fn cost_model(&self) -> &CostModel {
        self.primitives.cost_model()
    }

    pub fn horizon(&self) -> u32 {
        self.scenario.time_horizon_steps()
    }

    pub fn width(&self) -> usize {
        self.scenario.map().width()
    }

    pub fn height(&self) -> usize {
        self.scenario.map().height()
    }

    pub fn cell_index(&self, c: StateLD) -> usize {
        self.scenario.map().index(c.x, c.y)
    }

    pub fn in_bounds(&self, c: StateLD) -> bool {
        self.scenario.map().in_bounds(c.x, c.y)
    }

    /// Cell passes the inflated static check of the 2D lattice.
    pub fn ld_free(&self, c: StateLD) -> bool {
        self.in_bounds(c) && self.ld_free[self.cell_index(c)]
    }

    /// Footprint at the state's cell center with its heading is statically free.
    pub fn hd_state_free(&self, s: &StateHD) -> bool {
        let c = self.scenario.map().cell_center(s.x, s.y);
        !self
            .scenario
            .static_collision(&Pose::new(c.x, c.y, heading_angle(s.heading)))
    }

    pub fn static_ok(&self, x: i32, y: i32, prim: usize) -> bool {
        let map = self.scenario.map();
        self.sweeps[prim]
            .cells
            .iter()
            .all(|&(cx, cy)| !map.is_occupied(x + cx, y + cy))
    }

    /// No obstacle touches the footprint at any sample of `prim` started at `(x, y)` at step `t0`.
    pub fn dynamic_ok(&self, x: i32, y: i32, prim: usize, t0: u32) -> bool {
        let sc = self.scenario;
        if sc.obstacles().is_empty() {
            return true;
        }
        let sweep = &self.sweeps[prim];
        let duration = self.primitives.get(prim).duration;
        let center = sc.map().cell_center(x, y);
        let fp = sc.footprint();
        let reach = fp.circumscribed_radius();
        for (oi, o) in sc.obstacles().iter().enumerate() {
            let travel = o.speed() * duration as f64 * sc.dt();
            let p0 = sc.obstacle_position_at_step(oi, t0);
            if p0.distance(center) > sweep.reach + o.radius() + travel {
                continue;
            }
            for (k, off) in sweep.offsets.iter().enumerate() {
                let pos = Point2::new(center.x + off.x, center.y + off.y);
                let c = sc.obstacle_position_at_step(oi, t0 + k as u32);
                if c.distance(pos) > o.radius() + reach {
                    continue;
                }
                let pose = Pose::new(pos.x, pos.y, off.theta);
                if geom::disc_intersects_polygon(c, o.radius(), &fp.at(&pose)) {
                    return false;
                }
            }
        }
        true
    }

    /// Applies primitive `prim` at cell `(x, y)` departing at step `t0`.
    pub fn transition(&self, x: i32, y: i32, prim: usize, t0: u32) -> Option<(StateHD, Cost)> {
        let p = self.primitives.get(prim);
        let t1 = t0.checked_add(p.duration)?;
        if t1 > self.horizon() || !self.static_ok(x, y, prim) || !self.dynamic_ok(x, y, prim, t0) {
            return None;
        }
        Some((StateHD::new(x + p.dx, y + p.dy, p.end_heading, t1), p.cost))
    }

    pub fn hd_successors_into(&self, s: &StateHD, out: &mut Vec<(StateHD, Cost)>) {
        for &i in self.primitives.for_heading(s.heading) {
            if let Some(succ) = self.transition(s.x, s.y, i as usize, s.t) {
                out.push(succ);
            }
        }
    }

    pub fn hd_successors(&self, s: &StateHD) -> Vec<(StateHD, Cost)> {
        let mut out = Vec::with_capacity(4);
        self.hd_successors_into(s, &mut out);
        out
    }

    pub fn ld_successors_into(&self, s: &StateLD, out: &mut Vec<(StateLD, Cost)>) {
        let cm = self.cost_model();
        for (dx, dy) in NEIGHBORS_8 {
            let n = StateLD::new(s.x + dx, s.y + dy);
            if self.ld_free(n) {
                out.push((n, cm.move_cost(dx, dy)));
            }
        }
    }

    pub fn ld_successors(&self, s: &StateLD) -> Vec<(StateLD, Cost)> {
        let mut out = Vec::with_capacity(8);
        self.ld_successors_into(s, &mut out);
        out
    }

    /// World-frame, time-stamped sample poses of `prim` applied at `from`.
    pub fn swept_poses(&self, from: &StateHD, prim: usize) -> Vec<TimedPose> {
        let map = self.scenario.map();
        let center = map.cell_center(from.x, from.y);
        let dt = self.scenario.dt();
        self.sweeps[prim]
            .offsets
            .iter()
            .enumerate()
            .map(|(k, off)| TimedPose {
                pose: Pose::new(center.x + off.x, center.y + off.y, off.theta),
                t: (from.t + k as u32) as f64 * dt,
            })
            .collect()
    }
}

/// Cells usable by the 2D lattice.
///
/// A cell is blocked when it is occupied, or when an occupied (or off-map) cell lies closer
/// to its center than `inscribed_radius - cell_size / sqrt(2)`. Any footprint position inside
/// a cell is within `cell_size / sqrt(2)` of the center, so every cell visited by a
/// collision-free 4D motion stays free here.
fn inflated_free_cells(scenario: &Scenario) -> Vec<bool> {
    let map = scenario.map();
    let cs = map.cell_size();
    let reach = scenario.footprint().inscribed_radius() - cs * std::f64::consts::FRAC_1_SQRT_2 - 1e-6;
    let k = if reach > 0.0 { (reach / cs).ceil() as i32 } else { 0 };
    let mut free = vec![false; map.cell_count()];
    for y in 0..map.height() as i32 {
        for x in 0..map.width() as i32 {
            if map.is_occupied(x, y) {
                continue;
            }
            let center = map.cell_center(x, y);
            let blocked = reach > 0.0
                && (-k..=k).any(|dy| {
                    (-k..=k).any(|dx| {
                        map.is_occupied(x + dx, y + dy)
                            && map.cell_rect(x + dx, y + dy).distance_to(center) < reach
                    })
                });
            free[map.index(x, y)] = !blocked;
        }
    }
    free
}

/// Outcome of [`check_cost_dominance`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DominanceReport {
    pub holds: bool,
    pub checked: usize,
    /// Pairs whose 4D target is unreachable from the 4D source.
    pub skipped_unreachable: usize,
    /// Checked pairs whose 4D cost strictly exceeds the 2D cost.
    pub strictly_larger: usize,
    pub violations: Vec<(StateHD, StateHD, Cost, Option<Cost>)>,
}

/// Exhaustive 4D Dijkstra from `from`; optimal cost of reaching exactly `to`.
pub fn optimal_hd_cost(lattice: &Lattice, from: &StateHD, to: &StateHD) -> Option<Cost> {
    if from == to {
        return Some(0);
    }
    if to.t <= from.t {
        return None;
    }
    let mut dist: FxHashMap<StateHD, Cost> = FxHashMap::default();
    let mut heap = BinaryHeap::new();
    let mut buf = Vec::new();
    dist.insert(*from, 0);
    heap.push(Reverse((0, *from)));
    while let Some(Reverse((d, s))) = heap.pop() {
        if s == *to {
            return Some(d);
        }
        if dist.get(&s).is_some_and(|&b| b < d) {
            continue;
        }
        buf.clear();
        lattice.hd_successors_into(&s, &mut buf);
        for &(n, c) in &buf {
            if n.t > to.t {
                continue;
            }
            let nd = d + c;
            if dist.get(&n).map_or(true, |&b| nd < b) {
                dist.insert(n, nd);
                heap.push(Reverse((nd, n)));
            }
        }
    }
    None
}

/// Exhaustive 2D Dijkstra between two cells.
pub fn optimal_ld_cost(lattice: &Lattice, from: StateLD, to: StateLD) -> Option<Cost> {
    if !lattice.ld_free(from) || !lattice.ld_free(to) {
        return None;
    }
    let mut dist: FxHashMap<StateLD, Cost> = FxHashMap::default();
    let mut heap = BinaryHeap::new();
    let mut buf = Vec::new();
    dist.insert(from, 0);
    heap.push(Reverse((0, from)));
    while let Some(Reverse((d, s))) = heap.pop() {
        if s == to {
            return Some(d);
        }
        if dist.get(&s).is_some_and(|&b| b < d) {
            continue;
        }
        buf.clear();
        lattice.ld_successors_into(&s, &mut buf);
        for &(n, c) in &buf {
            let nd = d + c;
            if dist.get(&n).map_or(true, |&b| nd < b) {
                dist.insert(n, nd);
                heap.push(Reverse((nd, n)));
            }
        }
    }
    None
}

/// Checks that the optimal 2D cost between projections never exceeds the optimal 4D cost,
/// for each pair. Pairs whose 4D target cannot be reached are skipped and counted.
pub fn check_cost_dominance(lattice: &Lattice, pairs: &[(StateHD, StateHD)]) -> DominanceReport {
    let mut report = DominanceReport {
        holds: true,
        ..Default::default()
    };
    for (a, b) in pairs {
        let Some(hd) = optimal_hd_cost(lattice, a, b) else {
            report.skipped_unreachable += 1;
            continue;
        };
        report.checked += 1;
        let ld = optimal_ld_cost(lattice, a.cell(), b.cell());
        match ld {
            Some(ld) if ld <= hd => {
                if hd > ld {
                    report.strictly_larger += 1;
                }
            }
            _ => {
                report.holds = false;
                report.violations.push((*a, *b, hd, ld));
            }
        }
    }
    report
}
