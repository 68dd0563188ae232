//! Seeded maze and indoor environments with moving obstacles.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::lattice::{Lattice, StateHD, StateLD, NUM_HEADINGS};
use crate::search::ld_cost_map;
use crate::world::{DynamicObstacle, GridMap, RobotFootprint, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvKind {
    Maze,
    Indoor,
}

impl fmt::Display for EnvKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnvKind::Maze => "maze",
            EnvKind::Indoor => "indoor",
        })
    }
}

impl FromStr for EnvKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "maze" => Ok(EnvKind::Maze),
            "indoor" => Ok(EnvKind::Indoor),
            other => Err(Error::InvalidConfig(format!("unknown environment kind '{other}'"))),
        }
    }
}

/// Everything that determines a generated environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenSpec {
    pub kind: EnvKind,
    pub size: usize,
    pub seed: u64,
    pub n_obstacles: usize,
    pub large_fraction: f64,
    /// Hallway and wall-gap width in cells; large obstacles span it exactly.
    pub hallway_width: usize,
    pub obstacle_speed: f64,
    /// Minimum obstacle route length, as a fraction of the map side.
    pub min_route_fraction: f64,
    pub dt: f64,
    /// Defaults to three diagonal crossings at unit speed.
    pub time_horizon_steps: Option<u32>,
}

impl Default for GenSpec {
    fn default() -> Self {
        GenSpec {
            kind: EnvKind::Indoor,
            size: 300,
            seed: 0,
            n_obstacles: 10,
            large_fraction: 0.5,
            hallway_width: 5,
            obstacle_speed: 1.0,
            min_route_fraction: 1.0,
            dt: 0.1,
            time_horizon_steps: None,
        }
    }
}

impl GenSpec {
    pub fn new(kind: EnvKind, size: usize, seed: u64, n_obstacles: usize) -> Self {
        GenSpec {
            kind,
            size,
            seed,
            n_obstacles,
            ..Default::default()
        }
    }

    pub fn horizon_steps(&self) -> u32 {
        self.time_horizon_steps.unwrap_or_else(|| {
            let diagonal = self.size as f64 * std::f64::consts::SQRT_2;
            (3.0 * diagonal / self.dt).ceil() as u32
        })
    }

    pub fn large_radius(&self) -> f64 {
        self.hallway_width as f64 / 2.0
    }

    pub fn small_radius(&self) -> f64 {
        self.hallway_width as f64 / 4.0
    }

    fn validate(&self) -> Result<()> {
        if self.size < 50 {
            return Err(Error::InvalidConfig(format!("size must be at least 50, got {}", self.size)));
        }
        if self.hallway_width < 3 || self.hallway_width * 6 > self.size {
            return Err(Error::InvalidConfig(format!("hallway width {} does not fit", self.hallway_width)));
        }
        if !(0.0..=1.0).contains(&self.large_fraction) {
            return Err(Error::InvalidConfig("large_fraction must lie in [0, 1]".into()));
        }
        if !(self.obstacle_speed > 0.0) || !(self.dt > 0.0) {
            return Err(Error::InvalidConfig("speed and dt must be positive".into()));
        }
        Ok(())
    }
}

/// A generated scenario with its robot query.
#[derive(Debug, Clone)]
pub struct Generated {
    pub scenario: Scenario,
    pub start: StateHD,
    pub goal: StateLD,
    /// Seed of the attempt that succeeded.
    pub used_seed: u64,
}

const MAX_RETRIES: u64 = 10;

pub fn robot_footprint() -> RobotFootprint {
    RobotFootprint::rectangle(0.6, 0.4).expect("valid rectangle")
}

/// Map, obstacles and query for `spec`; identical specs give identical results.
pub fn generate(spec: &GenSpec) -> Result<Generated> {
    spec.validate()?;
    let mut last_err = None;
    for attempt in 0..=MAX_RETRIES {
        let seed = derive_seed(spec.seed, attempt);
        match generate_once(spec, seed) {
            Ok(g) => return Ok(g),
            Err(e) => {
                log::debug!("generation attempt {attempt} failed: {e}");
                last_err = Some(e);
            }
        }
    }
    Err(Error::Generation(format!(
        "gave up after {} attempts: {}",
        MAX_RETRIES + 1,
        last_err.map_or_else(String::new, |e| e.to_string())
    )))
}

fn derive_seed(seed: u64, attempt: u64) -> u64 {
    if attempt == 0 {
        seed
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);
        rng.gen()
    }
}

fn generate_once(spec: &GenSpec, seed: u64) -> Result<Generated> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let map = generate_map_with(spec, &mut rng)?;
    let bare = Scenario::new(map.clone(), robot_footprint(), vec![], spec.horizon_steps(), spec.dt)?;
    let lattice = Lattice::with_defaults(&bare);
    let (start, goal) = place_query(&lattice)?;
    let obstacles = generate_obstacles_with(&map, spec, &mut rng, &[start.cell(), goal])?;
    let scenario = Scenario::new(map, robot_footprint(), obstacles, spec.horizon_steps(), spec.dt)?;
    Ok(Generated {
        scenario,
        start,
        goal,
        used_seed: seed,
    })
}

pub fn generate_map(spec: &GenSpec) -> Result<GridMap> {
    spec.validate()?;
    generate_map_with(spec, &mut ChaCha8Rng::seed_from_u64(spec.seed))
}

fn generate_map_with(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Result<GridMap> {
    match spec.kind {
        EnvKind::Maze => maze(spec, rng),
        EnvKind::Indoor => indoor(spec, rng),
    }
}

/// Parallel vertical walls at random spacing, each with one to three gaps.
fn maze(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Result<GridMap> {
    let n = spec.size;
    let gap = spec.hallway_width as i32;
    let mut map = GridMap::new(n, n, 1.0)?;
    let min_spacing = (n / 20).max(2 * spec.hallway_width) as i32;
    let max_spacing = (n / 8).max(min_spacing as usize + 1) as i32;
    let mut x = rng.gen_range(min_spacing..=max_spacing);
    while x < n as i32 - min_spacing {
        map.fill_rect(x, 0, x, n as i32 - 1, true);
        let gaps = rng.gen_range(1..=3);
        let mut placed: Vec<i32> = Vec::new();
        for _ in 0..gaps * 20 {
            if placed.len() == gaps {
                break;
            }
            let y = rng.gen_range(1..n as i32 - gap - 1);
            if placed.iter().all(|&p| (p - y).abs() > gap + 2) {
                placed.push(y);
            }
        }
        for y in placed {
            map.fill_rect(x, y, x, y + gap - 1, false);
        }
        x += rng.gen_range(min_spacing..=max_spacing);
    }
    Ok(map)
}

/// Rooms on a coarse grid, joined by hallways of fixed width along a random spanning tree
/// plus a few extra links.
fn indoor(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Result<GridMap> {
    let n = spec.size as i32;
    let hw = spec.hallway_width as i32;
    let mut map = GridMap::new(spec.size, spec.size, 1.0)?;
    map.fill_rect(0, 0, n - 1, n - 1, true);
    let block = (n / 6).clamp(4 * hw, 12 * hw);
    let blocks = (n - 2) / block;
    if blocks < 2 {
        return Err(Error::Generation("map too small for two rooms".into()));
    }
    let margin = (n - 2 - blocks * block) / 2 + 1;
    let mut centers = Vec::new();
    for by in 0..blocks {
        for bx in 0..blocks {
            let x0 = margin + bx * block;
            let y0 = margin + by * block;
            let max_side = block - 2;
            let w = rng.gen_range((2 * hw).min(max_side)..=max_side);
            let h = rng.gen_range((2 * hw).min(max_side)..=max_side);
            let rx = x0 + 1 + rng.gen_range(0..=(block - 2 - w));
            let ry = y0 + 1 + rng.gen_range(0..=(block - 2 - h));
            map.fill_rect(rx, ry, rx + w - 1, ry + h - 1, false);
            // hallway anchor: a hallway-wide square inside the room
            let cx = rng.gen_range(rx..=rx + w - hw);
            let cy = rng.gen_range(ry..=ry + h - hw);
            centers.push((cx, cy));
        }
    }
    let idx = |bx: i32, by: i32| (by * blocks + bx) as usize;
    let mut edges = Vec::new();
    for by in 0..blocks {
        for bx in 0..blocks {
            if bx + 1 < blocks {
                edges.push((idx(bx, by), idx(bx + 1, by)));
            }
            if by + 1 < blocks {
                edges.push((idx(bx, by), idx(bx, by + 1)));
            }
        }
    }
    edges.shuffle(rng);
    let mut parent: Vec<usize> = (0..centers.len()).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        let keep = ra != rb || rng.gen_bool(0.2);
        if ra != rb {
            parent[ra] = rb;
        }
        if keep {
            carve_hallway(&mut map, centers[a], centers[b], hw, rng.gen_bool(0.5));
        }
    }
    Ok(map)
}

/// L-shaped corridor of width `hw` between the lower-left corners of two `hw`-squares.
fn carve_hallway(map: &mut GridMap, a: (i32, i32), b: (i32, i32), hw: i32, horizontal_first: bool) {
    let corner = if horizontal_first { (b.0, a.1) } else { (a.0, b.1) };
    for (p, q) in [(a, corner), (corner, b)] {
        let (x0, x1) = (p.0.min(q.0), p.0.max(q.0));
        let (y0, y1) = (p.1.min(q.1), p.1.max(q.1));
        map.fill_rect(x0, y0, x1 + hw - 1, y1 + hw - 1, false);
    }
}

/// Chebyshev distance (in cells) from each cell to the nearest occupied or off-map cell.
pub fn clearance(map: &GridMap) -> Vec<u32> {
    let (w, h) = (map.width() as i32, map.height() as i32);
    let mut dist = vec![u32::MAX; map.cell_count()];
    let mut queue = VecDeque::new();
    for y in 0..h {
        for x in 0..w {
            let border = x == 0 || y == 0 || x == w - 1 || y == h - 1;
            if map.is_occupied(x, y) {
                dist[map.index(x, y)] = 0;
                queue.push_back((x, y));
            } else if border {
                dist[map.index(x, y)] = 1;
                queue.push_back((x, y));
            }
        }
    }
    while let Some((x, y)) = queue.pop_front() {
        let d = dist[map.index(x, y)];
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (nx, ny) = (x + dx, y + dy);
                if map.in_bounds(nx, ny) && dist[map.index(nx, ny)] > d + 1 {
                    dist[map.index(nx, ny)] = d + 1;
                    queue.push_back((nx, ny));
                }
            }
        }
    }
    dist
}

/// Nearest lattice-usable cells to the lower-left and upper-right corners, checked to be
/// connected in the 2D lattice.
/// Start near the lower-left corner and goal near the upper-right one, chosen so that the goal
/// cell can be reached from the start pose with the robot's primitives (static map only).
fn place_query(lattice: &Lattice) -> Result<(StateHD, StateLD)> {
    const START_CANDIDATES: usize = 50;
    let n = lattice.width() as i32;
    let m = lattice.height() as i32;
    let corner = StateLD::new(n - 1, m - 1);
    let candidates = nearest_all(lattice, StateLD::new(0, 0), |c| lattice.ld_free(c));
    for &cell in candidates.iter().take(START_CANDIDATES) {
        let costs = ld_cost_map(lattice, cell);
        for h in 0..NUM_HEADINGS {
            let start = StateHD::new(cell.x, cell.y, h, 0);
            if !lattice.hd_state_free(&start) {
                continue;
            }
            let reached = static_pose_reach(lattice, &start);
            let Some(goal) = nearest(lattice, corner, |c| reached[lattice.cell_index(c)] && costs.get(c).is_some()) else {
                continue;
            };
            if goal.distance(cell) < (n.min(m) as f64) / 2.0 {
                continue;
            }
            return Ok((start, goal));
        }
    }
    Err(Error::Generation("no start pose reaches the far corner region".into()))
}

/// Cells reachable from `start` by chaining primitives that avoid static obstacles.
fn static_pose_reach(lattice: &Lattice, start: &StateHD) -> Vec<bool> {
    let (w, h) = (lattice.width(), lattice.height());
    let nh = NUM_HEADINGS as usize;
    let mut seen = vec![false; w * h * nh];
    let mut cells = vec![false; w * h];
    let idx = |x: i32, y: i32, hd: u8| (y as usize * w + x as usize) * nh + hd as usize;
    seen[idx(start.x, start.y, start.heading)] = true;
    cells[lattice.cell_index(start.cell())] = true;
    let mut queue = VecDeque::from([(start.x, start.y, start.heading)]);
    let prims = lattice.primitives();
    while let Some((x, y, hd)) = queue.pop_front() {
        for &i in prims.for_heading(hd) {
            let p = prims.get(i as usize);
            let (nx, ny) = (x + p.dx, y + p.dy);
            if !lattice.in_bounds(StateLD::new(nx, ny)) || !lattice.static_ok(x, y, i as usize) {
                continue;
            }
            let k = idx(nx, ny, p.end_heading);
            if !seen[k] {
                seen[k] = true;
                cells[lattice.cell_index(StateLD::new(nx, ny))] = true;
                queue.push_back((nx, ny, p.end_heading));
            }
        }
    }
    cells
}

fn nearest_all(lattice: &Lattice, from: StateLD, ok: impl Fn(StateLD) -> bool) -> Vec<StateLD> {
    let mut cells: Vec<StateLD> = (0..lattice.height() as i32)
        .flat_map(|y| (0..lattice.width() as i32).map(move |x| StateLD::new(x, y)))
        .filter(|&c| ok(c))
        .collect();
    cells.sort_by_key(|c| {
        let (dx, dy) = ((c.x - from.x) as i64, (c.y - from.y) as i64);
        (dx * dx + dy * dy, c.y, c.x)
    });
    cells
}

fn nearest(lattice: &Lattice, from: StateLD, ok: impl Fn(StateLD) -> bool) -> Option<StateLD> {
    nearest_all(lattice, from, ok).into_iter().next()
}

pub fn generate_obstacles(map: &GridMap, spec: &GenSpec) -> Result<Vec<DynamicObstacle>> {
    spec.validate()?;
    generate_obstacles_with(map, spec, &mut ChaCha8Rng::seed_from_u64(spec.seed), &[])
}

/// Obstacles following 2D A* routes through chains of random goals along hallway centers.
/// Routes end in open space (rooms or between maze walls), away from `keep_clear`.
fn generate_obstacles_with(
    map: &GridMap,
    spec: &GenSpec,
    rng: &mut ChaCha8Rng,
    keep_clear: &[StateLD],
) -> Result<Vec<DynamicObstacle>> {
    if spec.n_obstacles == 0 {
        return Ok(Vec::new());
    }
    let lane = (spec.hallway_width as u32 + 1) / 2;
    let clear = clearance(map);
    let lanes: Vec<bool> = clear.iter().map(|&c| c >= lane).collect();
    let labels = components(map, &lanes);
    let mut by_label: std::collections::BTreeMap<u32, usize> = Default::default();
    for &l in labels.iter().filter(|&&l| l != u32::MAX) {
        *by_label.entry(l).or_default() += 1;
    }
    let main = by_label
        .iter()
        .max_by_key(|(l, n)| (**n, Reverse(**l)))
        .map(|(l, _)| *l)
        .ok_or_else(|| Error::Generation("no room for obstacles".into()))?;
    let cells: Vec<StateLD> = (0..map.height() as i32)
        .flat_map(|y| (0..map.width() as i32).map(move |x| StateLD::new(x, y)))
        .filter(|c| labels[map.index(c.x, c.y)] == main)
        .collect();
    let far_from_query = |c: &StateLD| keep_clear.iter().all(|q| q.distance(*c) > 2.0 * spec.hallway_width as f64);
    let open: Vec<StateLD> = cells
        .iter()
        .copied()
        .filter(|c| clear[map.index(c.x, c.y)] > spec.hallway_width as u32 - lane + 1)
        .filter(far_from_query)
        .collect();
    let starts: Vec<StateLD> = cells.iter().copied().filter(far_from_query).collect();
    if open.is_empty() || starts.is_empty() {
        return Err(Error::Generation("no open area to park obstacles".into()));
    }
    let min_len = spec.min_route_fraction * map.width().max(map.height()) as f64;
    let mut obstacles = Vec::with_capacity(spec.n_obstacles);
    for _ in 0..spec.n_obstacles {
        let large = rng.gen_bool(spec.large_fraction);
        let radius = if large { spec.large_radius() } else { spec.small_radius() };
        let mut at = *starts.choose(rng).expect("nonempty");
        let mut route = vec![at];
        let mut length = 0.0;
        for _ in 0..64 {
            let target = *if length >= min_len { &open } else { &cells }.choose(rng).expect("nonempty");
            if target == at {
                continue;
            }
            let leg = lane_astar(map, &lanes, at, target)
                .ok_or_else(|| Error::Generation("obstacle goal unreachable".into()))?;
            length += leg.windows(2).map(|w| w[0].distance(w[1])).sum::<f64>();
            route.extend_from_slice(&leg[1..]);
            at = target;
            if length >= min_len && open.contains(&at) {
                break;
            }
        }
        if !(length >= min_len && open.contains(&at)) {
            return Err(Error::Generation("could not build a long enough obstacle route".into()));
        }
        let waypoints = simplify(&route)
            .into_iter()
            .map(|c| map.cell_center(c.x, c.y))
            .collect::<Vec<Point2>>();
        obstacles.push(DynamicObstacle::new(radius, spec.obstacle_speed, waypoints)?);
    }
    Ok(obstacles)
}

fn components(map: &GridMap, passable: &[bool]) -> Vec<u32> {
    let mut labels = vec![u32::MAX; passable.len()];
    let mut next = 0;
    for start in 0..passable.len() {
        if !passable[start] || labels[start] != u32::MAX {
            continue;
        }
        labels[start] = next;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let (x, y) = ((i % map.width()) as i32, (i / map.width()) as i32);
            for (dx, dy) in crate::lattice::NEIGHBORS_8 {
                let (nx, ny) = (x + dx, y + dy);
                if map.in_bounds(nx, ny) {
                    let j = map.index(nx, ny);
                    if passable[j] && labels[j] == u32::MAX {
                        labels[j] = next;
                        queue.push_back(j);
                    }
                }
            }
        }
        next += 1;
    }
    labels
}

/// 8-connected A* over passable cells with octile costs.
fn lane_astar(map: &GridMap, passable: &[bool], from: StateLD, to: StateLD) -> Option<Vec<StateLD>> {
    let octile = |a: StateLD| {
        let (dx, dy) = ((a.x - to.x).unsigned_abs(), (a.y - to.y).unsigned_abs());
        1000 * dx.max(dy) as u64 + 414 * dx.min(dy) as u64
    };
    let mut g = vec![u64::MAX; passable.len()];
    let mut parent = vec![u32::MAX; passable.len()];
    let mut heap = BinaryHeap::new();
    g[map.index(from.x, from.y)] = 0;
    heap.push(Reverse((octile(from), 0u64, from)));
    while let Some(Reverse((_, d, c))) = heap.pop() {
        let ci = map.index(c.x, c.y);
        if d > g[ci] {
            continue;
        }
        if c == to {
            let mut path = vec![c];
            let mut i = ci;
            while parent[i] != u32::MAX {
                i = parent[i] as usize;
                path.push(StateLD::new((i % map.width()) as i32, (i / map.width()) as i32));
            }
            path.reverse();
            return Some(path);
        }
        for (dx, dy) in crate::lattice::NEIGHBORS_8 {
            let n = StateLD::new(c.x + dx, c.y + dy);
            if !map.in_bounds(n.x, n.y) || !passable[map.index(n.x, n.y)] {
                continue;
            }
            let nd = d + if dx != 0 && dy != 0 { 1414 } else { 1000 };
            let ni = map.index(n.x, n.y);
            if nd < g[ni] {
                g[ni] = nd;
                parent[ni] = ci as u32;
                heap.push(Reverse((nd + octile(n), nd, n)));
            }
        }
    }
    None
}

/// Drops interior points of straight runs.
fn simplify(route: &[StateLD]) -> Vec<StateLD> {
    let mut out: Vec<StateLD> = Vec::new();
    for &c in route {
        if out.last() == Some(&c) {
            continue;
        }
        if out.len() >= 2 {
            let (a, b) = (out[out.len() - 2], out[out.len() - 1]);
            if (b.x - a.x, b.y - a.y) == (c.x - b.x, c.y - b.y) {
                out.pop();
            }
        }
        out.push(c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_spec_same_environment() {
        for kind in [EnvKind::Maze, EnvKind::Indoor] {
            let spec = GenSpec::new(kind, 120, 1, 4);
            let a = generate(&spec).unwrap();
            let b = generate(&spec).unwrap();
            assert_eq!(a.scenario.map(), b.scenario.map());
            assert_eq!(a.scenario.obstacles(), b.scenario.obstacles());
            assert_eq!((a.start, a.goal), (b.start, b.goal));
            let other = generate(&GenSpec::new(kind, 120, 2, 4)).unwrap();
            assert_ne!(a.scenario.map(), other.scenario.map());
        }
        assert_eq!(generate_map(&GenSpec::new(EnvKind::Maze, 300, 1, 0)).unwrap(), generate_map(&GenSpec::new(EnvKind::Maze, 300, 1, 0)).unwrap());
    }

    #[test]
    fn query_is_statically_connected() {
        for seed in 0..6 {
            for kind in [EnvKind::Maze, EnvKind::Indoor] {
                let g = generate(&GenSpec::new(kind, 100, seed, 3)).unwrap();
                let lat = Lattice::with_defaults(&g.scenario);
                assert!(ld_cost_map(&lat, g.start.cell()).get(g.goal).is_some());
                assert!(lat.hd_state_free(&g.start));
                assert!(g.start.x < 30 && g.start.y < 30, "{:?}", g.start);
                assert!(g.goal.x >= 50 && g.goal.y >= 50, "{:?}", g.goal);
                // the goal cell is reachable by chaining primitives on the bare map
                let bare = Scenario::new(g.scenario.map().clone(), robot_footprint(), vec![], 1_000_000, 0.1).unwrap();
                let bare_lat = Lattice::with_defaults(&bare);
                let mut seen = std::collections::HashSet::from([(g.start.x, g.start.y, g.start.heading)]);
                let mut queue = VecDeque::from([StateHD::new(g.start.x, g.start.y, g.start.heading, 0)]);
                let mut found = false;
                while let Some(s) = queue.pop_front() {
                    if s.cell() == g.goal {
                        found = true;
                        break;
                    }
                    for (n, _) in bare_lat.hd_successors(&s) {
                        if seen.insert((n.x, n.y, n.heading)) {
                            queue.push_back(StateHD::new(n.x, n.y, n.heading, 0));
                        }
                    }
                }
                assert!(found, "seed {seed} {kind}");
            }
        }
    }

    #[test]
    fn obstacles_follow_free_lanes() {
        let spec = GenSpec {
            large_fraction: 0.5,
            ..GenSpec::new(EnvKind::Indoor, 150, 3, 8)
        };
        let g = generate(&spec).unwrap();
        let map = g.scenario.map();
        assert_eq!(g.scenario.obstacles().len(), 8);
        for o in g.scenario.obstacles() {
            assert!(o.radius() == spec.large_radius() || o.radius() == spec.small_radius());
            assert!(o.path_length() >= spec.min_route_fraction * 150.0 - 1e-9);
            for w in o.waypoints() {
                let (x, y) = map.cell_of(*w);
                assert!(!map.is_occupied(x, y));
            }
            // every sampled position along the route stays on free cells
            let mut t = 0.0;
            while t <= o.path_length() / o.speed() {
                let (x, y) = map.cell_of(o.position(t));
                assert!(!map.is_occupied(x, y));
                t += 0.25;
            }
        }
        assert!(generate_obstacles(map, &GenSpec { n_obstacles: 0, ..spec }).unwrap().is_empty());
    }

    #[test]
    fn indoor_hallways_fit_large_obstacles_exactly() {
        let spec = GenSpec::new(EnvKind::Indoor, 200, 5, 0);
        let map = generate_map(&spec).unwrap();
        assert_eq!(2.0 * spec.large_radius(), spec.hallway_width as f64);
        // some free run across a hallway is exactly hallway_width cells wide
        let mut widths = std::collections::BTreeMap::new();
        for y in 0..200 {
            let mut run = 0;
            for x in 0..200 {
                if map.is_occupied(x, y) {
                    if run > 0 {
                        *widths.entry(run).or_insert(0) += 1;
                    }
                    run = 0;
                } else {
                    run += 1;
                }
            }
        }
        assert!(widths.get(&spec.hallway_width).copied().unwrap_or(0) > 20, "{widths:?}");
        assert!(widths.keys().all(|&w| w >= spec.hallway_width), "{widths:?}");
    }

    #[test]
    fn maze_walls_have_gaps() {
        let spec = GenSpec::new(EnvKind::Maze, 300, 9, 0);
        let map = generate_map(&spec).unwrap();
        let walls: Vec<i32> = (0..300).filter(|&x| map.is_occupied(x, 150) || map.is_occupied(x, 0)).collect();
        assert!(walls.len() >= 5);
        for &x in &walls {
            let free = (0..300).filter(|&y| !map.is_occupied(x, y)).count();
            assert!(free >= spec.hallway_width && free <= 3 * spec.hallway_width, "wall {x}: {free}");
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(generate(&GenSpec::new(EnvKind::Maze, 20, 0, 0)).is_err());
        assert!(generate(&GenSpec {
            large_fraction: 1.5,
            ..Default::default()
        })
        .is_err());
    }

    #[test]
    fn clearance_matches_brute_force() {
        let spec = GenSpec::new(EnvKind::Indoor, 60, 4, 0);
        let map = generate_map(&spec).unwrap();
        let c = clearance(&map);
        for y in 0..60i32 {
            for x in 0..60i32 {
                let mut best = u32::MAX;
                for yy in -1..=60i32 {
                    for xx in -1..=60i32 {
                        if map.is_occupied(xx, yy) {
                            best = best.min((xx - x).unsigned_abs().max((yy - y).unsigned_abs()));
                        }
                    }
                }
                assert_eq!(c[map.index(x, y)], best, "({x}, {y})");
            }
        }
    }
}
