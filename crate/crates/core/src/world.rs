//! Environment representation: static occupancy grid, robot footprint, moving
//! obstacles and the collision predicates built on top of them.
//!
//! Cell `(x, y)` covers `[x*cs, (x+1)*cs) x [y*cs, (y+1)*cs)` in meters, where `cs`
//! is the map's cell size. Lattice states sit at cell centers.

use crate::error::{Error, Result};
use crate::geom::{self, Point2, Pose, Rect};

/// Shrink applied to cell squares before overlap tests so that polygons merely
/// touching a cell boundary do not count as overlapping it.
const CELL_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct GridMap {
    width: usize,
    height: usize,
    cell_size: f64,
    occupancy: Vec<bool>,
}

impl GridMap {
    /// An obstacle-free map.
    pub fn new(width: usize, height: usize, cell_size: f64) -> Result<Self> {
        Self::from_cells(width, height, cell_size, vec![false; width * height])
    }

    /// `occupancy` is row-major with row 0 at y = 0.
    pub fn from_cells(
        width: usize,
        height: usize,
        cell_size: f64,
        occupancy: Vec<bool>,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidMap("width and height must be positive".into()));
        }
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            return Err(Error::InvalidMap(format!("bad cell size {cell_size}")));
        }
        if occupancy.len() != width * height {
            return Err(Error::InvalidMap(format!(
                "expected {} cells, got {}",
                width * height,
                occupancy.len()
            )));
        }
        Ok(GridMap {
            width,
            height,
            cell_size,
            occupancy,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn cell_count(&self) -> usize {
        self.width * self.height
    }

    pub fn in_bounds(&self, x: i32, y: i32) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    /// Row-major index of an in-bounds cell.
    pub fn index(&self, x: i32, y: i32) -> usize {
        debug_assert!(self.in_bounds(x, y));
        y as usize * self.width + x as usize
    }

    /// Out-of-bounds cells count as occupied.
    pub fn is_occupied(&self, x: i32, y: i32) -> bool {
        !self.in_bounds(x, y) || self.occupancy[self.index(x, y)]
    }

    pub fn set_occupied(&mut self, x: i32, y: i32, occupied: bool) {
        if self.in_bounds(x, y) {
            let i = self.index(x, y);
            self.occupancy[i] = occupied;
        }
    }

    /// Sets every in-bounds cell of the inclusive rectangle.
    pub fn fill_rect(&mut self, x0: i32, y0: i32, x1: i32, y1: i32, occupied: bool) {
        for y in y0.min(y1)..=y0.max(y1) {
            for x in x0.min(x1)..=x0.max(x1) {
                self.set_occupied(x, y, occupied);
            }
        }
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occupancy
    }

    pub fn cell_center(&self, x: i32, y: i32) -> Point2 {
        Point2::new(
            (x as f64 + 0.5) * self.cell_size,
            (y as f64 + 0.5) * self.cell_size,
        )
    }

    pub fn cell_of(&self, p: Point2) -> (i32, i32) {
        (
            (p.x / self.cell_size).floor() as i32,
            (p.y / self.cell_size).floor() as i32,
        )
    }

    pub fn cell_rect(&self, x: i32, y: i32) -> Rect {
        let cs = self.cell_size;
        Rect {
            min: Point2::new(x as f64 * cs, y as f64 * cs),
            max: Point2::new((x + 1) as f64 * cs, (y + 1) as f64 * cs),
        }
    }
}

/// Cells whose (slightly shrunk) square overlaps `polygon`, for square cells of size `cs`.
pub fn rasterize_polygon(polygon: &[Point2], cs: f64) -> Vec<(i32, i32)> {
    let (mut lo_x, mut lo_y) = (f64::INFINITY, f64::INFINITY);
    let (mut hi_x, mut hi_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in polygon {
        lo_x = lo_x.min(p.x);
        lo_y = lo_y.min(p.y);
        hi_x = hi_x.max(p.x);
        hi_y = hi_y.max(p.y);
    }
    let mut cells = Vec::new();
    for y in (lo_y / cs).floor() as i32..=(hi_y / cs).floor() as i32 {
        for x in (lo_x / cs).floor() as i32..=(hi_x / cs).floor() as i32 {
            let rect = Rect {
                min: Point2::new(x as f64 * cs + CELL_EPS, y as f64 * cs + CELL_EPS),
                max: Point2::new((x + 1) as f64 * cs - CELL_EPS, (y + 1) as f64 * cs - CELL_EPS),
            };
            if geom::polygon_intersects_rect(polygon, &rect) {
                cells.push((x, y));
            }
        }
    }
    cells
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotFootprint {
    polygon: Vec<Point2>,
    inscribed_radius: f64,
    circumscribed_radius: f64,
}

impl RobotFootprint {
    /// Builds a footprint and validates the declared radii against the polygon.
    pub fn new(polygon: Vec<Point2>, inscribed_radius: f64, circumscribed_radius: f64) -> Result<Self> {
        let derived = Self::from_polygon(polygon)?;
        let tol = 1e-6;
        if (derived.inscribed_radius - inscribed_radius).abs() > tol {
            return Err(Error::InvalidFootprint(format!(
                "inscribed radius {inscribed_radius} does not match polygon ({})",
                derived.inscribed_radius
            )));
        }
        if (derived.circumscribed_radius - circumscribed_radius).abs() > tol {
            return Err(Error::InvalidFootprint(format!(
                "circumscribed radius {circumscribed_radius} does not match polygon ({})",
                derived.circumscribed_radius
            )));
        }
        Ok(derived)
    }

    /// Derives both radii from the polygon (robot frame, meters).
    pub fn from_polygon(polygon: Vec<Point2>) -> Result<Self> {
        if polygon.len() < 3 {
            return Err(Error::InvalidFootprint("polygon needs at least 3 vertices".into()));
        }
        if polygon.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidFootprint("non-finite vertex".into()));
        }
        let origin = Point2::default();
        let circumscribed_radius = polygon.iter().map(|p| p.norm()).fold(0.0, f64::max);
        let inscribed_radius = if geom::point_in_polygon(origin, &polygon) {
            let n = polygon.len();
            (0..n)
                .map(|i| geom::segment_point_distance(polygon[i], polygon[(i + 1) % n], origin))
                .fold(f64::INFINITY, f64::min)
        } else {
            0.0
        };
        Ok(RobotFootprint {
            polygon,
            inscribed_radius,
            circumscribed_radius,
        })
    }

    /// Axis-aligned rectangle centered on the robot origin, `length` along the heading.
    pub fn rectangle(length: f64, width: f64) -> Result<Self> {
        let (hl, hw) = (length / 2.0, width / 2.0);
        Self::from_polygon(vec![
            Point2::new(-hl, -hw),
            Point2::new(hl, -hw),
            Point2::new(hl, hw),
            Point2::new(-hl, hw),
        ])
    }

    pub fn polygon(&self) -> &[Point2] {
        &self.polygon
    }

    pub fn inscribed_radius(&self) -> f64 {
        self.inscribed_radius
    }

    pub fn circumscribed_radius(&self) -> f64 {
        self.circumscribed_radius
    }

    pub fn at(&self, pose: &Pose) -> Vec<Point2> {
        self.polygon.iter().map(|&p| pose.transform(p)).collect()
    }
}

/// Disc-shaped obstacle moving along a waypoint polyline at constant speed.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicObstacle {
    radius: f64,
    speed: f64,
    waypoints: Vec<Point2>,
    cumulative: Vec<f64>,
}

impl DynamicObstacle {
    pub fn new(radius: f64, speed: f64, waypoints: Vec<Point2>) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidObstacle(format!("radius must be positive, got {radius}")));
        }
        if !(speed > 0.0 && speed.is_finite()) {
            return Err(Error::InvalidObstacle(format!("speed must be positive, got {speed}")));
        }
        if waypoints.is_empty() {
            return Err(Error::InvalidObstacle("at least one waypoint required".into()));
        }
        let mut cumulative = Vec::with_capacity(waypoints.len());
        cumulative.push(0.0);
        for w in waypoints.windows(2) {
            let d = w[0].distance(w[1]);
            if d == 0.0 {
                return Err(Error::InvalidObstacle("consecutive waypoints must differ".into()));
            }
            cumulative.push(cumulative.last().unwrap() + d);
        }
        Ok(DynamicObstacle {
            radius,
            speed,
            waypoints,
            cumulative,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn waypoints(&self) -> &[Point2] {
        &self.waypoints
    }

    pub fn path_length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Position at time `t` seconds; parked on the last waypoint once the polyline is exhausted.
    pub fn position(&self, t: f64) -> Point2 {
        let s = self.speed * t.max(0.0);
        if s >= self.path_length() {
            return *self.waypoints.last().unwrap();
        }
        // first segment whose end lies beyond s
        let seg = self.cumulative.partition_point(|&c| c <= s);
        let (a, b) = (self.waypoints[seg - 1], self.waypoints[seg]);
        let (c0, c1) = (self.cumulative[seg - 1], self.cumulative[seg]);
        a.lerp(b, (s - c0) / (c1 - c0))
    }
}

pub fn obstacle_position(o: &DynamicObstacle, t: f64) -> Point2 {
    o.position(t)
}

/// A pose together with the time (seconds) it is occupied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimedPose {
    pub pose: Pose,
    pub t: f64,
}

/// Immutable planning environment.
#[derive(Debug, Clone)]
pub struct Scenario {
    map: GridMap,
    footprint: RobotFootprint,
    obstacles: Vec<DynamicObstacle>,
    time_horizon_steps: u32,
    dt: f64,
    /// `positions[o][k]` is obstacle `o` at time `k * dt`, for `k` in `0..=time_horizon_steps`.
    positions: Vec<Vec<Point2>>,
}

impl Scenario {
    pub fn new(
        map: GridMap,
        footprint: RobotFootprint,
        obstacles: Vec<DynamicObstacle>,
        time_horizon_steps: u32,
        dt: f64,
    ) -> Result<Self> {
        if time_horizon_steps == 0 {
            return Err(Error::InvalidScenario("time horizon must be positive".into()));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidScenario(format!("dt must be positive, got {dt}")));
        }
        let positions = obstacles
            .iter()
            .map(|o| {
                (0..=time_horizon_steps)
                    .map(|k| o.position(k as f64 * dt))
                    .collect()
            })
            .collect();
        Ok(Scenario {
            map,
            footprint,
            obstacles,
            time_horizon_steps,
            dt,
            positions,
        })
    }

    pub fn map(&self) -> &GridMap {
        &self.map
    }

    pub fn footprint(&self) -> &RobotFootprint {
        &self.footprint
    }

    pub fn obstacles(&self) -> &[DynamicObstacle] {
        &self.obstacles
    }

    pub fn time_horizon_steps(&self) -> u32 {
        self.time_horizon_steps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn horizon_seconds(&self) -> f64 {
        self.time_horizon_steps as f64 * self.dt
    }

    /// Position of obstacle `index` at time step `step` (cached inside the horizon).
    pub fn obstacle_position_at_step(&self, index: usize, step: u32) -> Point2 {
        match self.positions[index].get(step as usize) {
            Some(&p) => p,
            None => self.obstacles[index].position(step as f64 * self.dt),
        }
    }

    /// Footprint at `pose` overlaps an occupied cell or leaves the map.
    pub fn static_collision(&self, pose: &Pose) -> bool {
        let poly = self.footprint.at(pose);
        rasterize_polygon(&poly, self.map.cell_size())
            .into_iter()
            .any(|(x, y)| self.map.is_occupied(x, y))
    }

    /// Some obstacle disc at time `t` intersects the footprint at `pose`.
    pub fn dynamic_collision(&self, pose: &Pose, t: f64) -> bool {
        if self.obstacles.is_empty() {
            return false;
        }
        let poly = self.footprint.at(pose);
        let reach = self.footprint.circumscribed_radius();
        self.obstacles.iter().any(|o| {
            let c = o.position(t);
            c.distance(pose.position()) <= o.radius() + reach
                && geom::disc_intersects_polygon(c, o.radius(), &poly)
        })
    }

    pub fn transition_collision(&self, swept: &[TimedPose]) -> bool {
        swept
            .iter()
            .any(|s| self.static_collision(&s.pose) || self.dynamic_collision(&s.pose, s.t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn square_footprint(h: f64) -> RobotFootprint {
        RobotFootprint::from_polygon(vec![
            Point2::new(-h, -h),
            Point2::new(h, -h),
            Point2::new(h, h),
            Point2::new(-h, h),
        ])
        .unwrap()
    }

    fn line_obstacle() -> DynamicObstacle {
        DynamicObstacle::new(0.5, 2.0, vec![Point2::new(0.0, 0.0), Point2::new(10.0, 0.0)]).unwrap()
    }

    fn scenario(map: GridMap, obstacles: Vec<DynamicObstacle>) -> Scenario {
        Scenario::new(map, square_footprint(0.4), obstacles, 1000, 0.1).unwrap()
    }

    #[test]
    fn obstacle_position_examples() {
        let o = line_obstacle();
        assert_eq!(o.position(2.5), Point2::new(5.0, 0.0));
        assert_eq!(o.position(0.0), Point2::new(0.0, 0.0));
        assert_eq!(o.position(100.0), Point2::new(10.0, 0.0));
    }

    #[test]
    fn obstacle_walks_polyline_by_arc_length() {
        let o = DynamicObstacle::new(
            1.0,
            1.0,
            vec![Point2::new(0.0, 0.0), Point2::new(3.0, 0.0), Point2::new(3.0, 4.0)],
        )
        .unwrap();
        assert_eq!(o.position(3.0), Point2::new(3.0, 0.0));
        assert_eq!(o.position(5.0), Point2::new(3.0, 2.0));
        assert_eq!(o.position(7.0), Point2::new(3.0, 4.0));
    }

    #[test]
    fn single_waypoint_obstacle_is_parked() {
        let o = DynamicObstacle::new(1.0, 1.0, vec![Point2::new(2.0, 3.0)]).unwrap();
        assert_eq!(o.position(0.0), Point2::new(2.0, 3.0));
        assert_eq!(o.position(55.0), Point2::new(2.0, 3.0));
    }

    #[test]
    fn obstacle_validation() {
        assert!(DynamicObstacle::new(0.0, 1.0, vec![Point2::default()]).is_err());
        assert!(DynamicObstacle::new(1.0, 0.0, vec![Point2::default()]).is_err());
        assert!(DynamicObstacle::new(1.0, 1.0, vec![]).is_err());
        assert!(DynamicObstacle::new(1.0, 1.0, vec![Point2::default(), Point2::default()]).is_err());
    }

    #[test]
    fn map_validation_and_bounds() {
        assert!(GridMap::new(0, 3, 1.0).is_err());
        assert!(GridMap::new(3, 3, 0.0).is_err());
        assert!(GridMap::from_cells(2, 2, 1.0, vec![false; 3]).is_err());
        let map = GridMap::new(3, 2, 1.0).unwrap();
        assert!(!map.is_occupied(2, 1));
        assert!(map.is_occupied(3, 1));
        assert!(map.is_occupied(-1, 0));
        assert!(map.is_occupied(0, 2));
    }

    #[test]
    fn footprint_radii() {
        let fp = RobotFootprint::rectangle(0.6, 0.4).unwrap();
        assert!((fp.inscribed_radius() - 0.2).abs() < 1e-12);
        assert!((fp.circumscribed_radius() - 0.3f64.hypot(0.2)).abs() < 1e-12);
        assert!(RobotFootprint::new(fp.polygon().to_vec(), 0.3, fp.circumscribed_radius()).is_err());
        assert!(RobotFootprint::new(fp.polygon().to_vec(), 0.2, fp.circumscribed_radius()).is_ok());
    }

    #[test]
    fn static_collision_examples() {
        let mut map = GridMap::new(10, 10, 1.0).unwrap();
        let s = scenario(map.clone(), vec![]);
        assert!(!s.static_collision(&Pose::new(5.5, 5.5, 0.3)));
        // straddles the occupied cell (6, 5)
        map.set_occupied(6, 5, true);
        let s = scenario(map, vec![]);
        assert!(s.static_collision(&Pose::new(6.0, 5.5, 0.0)));
        assert!(!s.static_collision(&Pose::new(4.5, 5.5, 0.0)));
        // partially outside the map
        assert!(s.static_collision(&Pose::new(0.2, 5.5, 0.0)));
    }

    #[test]
    fn dynamic_collision_examples() {
        let map = GridMap::new(20, 20, 1.0).unwrap();
        let empty = scenario(map.clone(), vec![]);
        assert!(!empty.dynamic_collision(&Pose::new(5.0, 5.0, 0.0), 3.0));

        let parked = DynamicObstacle::new(0.5, 1.0, vec![Point2::new(5.0, 5.0)]).unwrap();
        let s = scenario(map.clone(), vec![parked]);
        assert!(s.dynamic_collision(&Pose::new(5.0, 5.0, 1.0), 7.0));

        // far enough: circumscribed + radius + 1 m away, confirmed by boundary sampling
        let fp = square_footprint(0.4);
        let d = fp.circumscribed_radius() + 0.5 + 1.0;
        let far = DynamicObstacle::new(0.5, 1.0, vec![Point2::new(5.0 + d, 5.0)]).unwrap();
        let pose = Pose::new(5.0, 5.0, 0.7);
        let sampled = geom::sampled_polygon_distance(Point2::new(5.0 + d, 5.0), &fp.at(&pose), 1000);
        assert!(sampled > 0.5);
        let s = scenario(map, vec![far]);
        assert!(!s.dynamic_collision(&pose, 0.0));
    }

    #[test]
    fn transition_collision_examples() {
        let map = GridMap::new(20, 20, 1.0).unwrap();
        // obstacle moving down the column x = 10.5 from y = 19 at 1 m/s
        let o = DynamicObstacle::new(
            0.5,
            1.0,
            vec![Point2::new(10.5, 19.0), Point2::new(10.5, 0.5)],
        )
        .unwrap();
        let s = scenario(map, vec![o]);
        let free = TimedPose {
            pose: Pose::new(3.5, 3.5, 0.0),
            t: 0.0,
        };
        assert!(!s.transition_collision(&[free]));

        // robot crosses x = 10.5 along y = 9.5, timed to meet the obstacle there at t = 9.5
        let crossing = |t0: f64| -> Vec<TimedPose> {
            (0..=20)
                .map(|k| TimedPose {
                    pose: Pose::new(9.5 + 0.1 * k as f64, 9.5, 0.0),
                    t: t0 + 0.1 * k as f64,
                })
                .collect()
        };
        let brute = |swept: &[TimedPose]| {
            swept.iter().any(|tp| {
                let c = s.obstacles()[0].position(tp.t);
                geom::disc_intersects_polygon(c, 0.5, &s.footprint().at(&tp.pose))
            })
        };
        let meet = crossing(8.5);
        assert!(brute(&meet));
        assert!(s.transition_collision(&meet));
        let late = crossing(19.5);
        assert!(!brute(&late));
        assert!(!s.transition_collision(&late));
    }

    proptest! {
        #[test]
        fn obstacle_motion_is_speed_lipschitz(
            pts in proptest::collection::vec((0.0f64..50.0, 0.0f64..50.0), 1..6),
            speed in 0.1f64..5.0,
            t1 in 0.0f64..100.0,
            dt in 0.0f64..100.0,
        ) {
            let mut wps: Vec<Point2> = Vec::new();
            for (x, y) in pts {
                let p = Point2::new(x, y);
                if wps.last().map_or(true, |q| q.distance(p) > 1e-9) {
                    wps.push(p);
                }
            }
            let o = DynamicObstacle::new(1.0, speed, wps).unwrap();
            let d = o.position(t1).distance(o.position(t1 + dt));
            prop_assert!(d <= speed * dt + 1e-9);
        }

        #[test]
        fn single_sample_transition_is_disjunction(x in 0.0f64..12.0, y in 0.0f64..12.0, th in -3.2f64..3.2, t in 0.0f64..30.0) {
            let mut map = GridMap::new(10, 10, 1.0).unwrap();
            map.fill_rect(4, 4, 5, 6, true);
            let o = DynamicObstacle::new(1.0, 0.5, vec![Point2::new(1.0, 1.0), Point2::new(9.0, 9.0)]).unwrap();
            let s = scenario(map, vec![o]);
            let pose = Pose::new(x, y, th);
            let one = [TimedPose { pose, t }];
            prop_assert_eq!(
                s.transition_collision(&one),
                s.static_collision(&pose) || s.dynamic_collision(&pose, t)
            );
        }
    }
}
