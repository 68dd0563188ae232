//! File formats: text grid maps, scenario/primitive/query JSON, and plan traces.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::adplanner::PlanOutcome;
use crate::error::{Error, Result};
use crate::geom::{Point2, Pose};
use crate::lattice::{CostModel, MotionPrimitive, PrimitiveSet, StateHD, StateLD};
use crate::world::{DynamicObstacle, GridMap, RobotFootprint, Scenario};

/// Text form: a `width height cell_size` header, then `height` rows of `.`/`#`, row 0 = y 0.
pub fn map_to_string(map: &GridMap) -> String {
    let mut out = format!("{} {} {}\n", map.width(), map.height(), map.cell_size());
    for y in 0..map.height() as i32 {
        out.extend((0..map.width() as i32).map(|x| if map.is_occupied(x, y) { '#' } else { '.' }));
        out.push('\n');
    }
    out
}

pub fn parse_map(text: &str, origin: &Path) -> Result<GridMap> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::parse(origin, "empty map file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [w, h, cs] = fields[..] else {
        return Err(Error::parse(origin, format!("bad header '{header}'")));
    };
    let bad_header = |_| Error::parse(origin, format!("bad header '{header}'"));
    let width: usize = w.parse().map_err(bad_header)?;
    let height: usize = h.parse().map_err(bad_header)?;
    let cell_size: f64 = cs.parse().map_err(|_| Error::parse(origin, format!("bad cell size '{cs}'")))?;
    let mut cells = Vec::with_capacity(width * height);
    for (y, line) in lines.by_ref().take(height).enumerate() {
        let row = line.trim_end();
        if row.chars().count() != width {
            return Err(Error::parse(origin, format!("row {y} has {} cells, expected {width}", row.chars().count())));
        }
        for ch in row.chars() {
            cells.push(match ch {
                '.' => false,
                '#' => true,
                other => return Err(Error::parse(origin, format!("unexpected '{other}' in row {y}"))),
            });
        }
    }
    if cells.len() != width * height {
        return Err(Error::parse(origin, format!("expected {height} rows")));
    }
    if lines.next().is_some() {
        return Err(Error::parse(origin, "trailing rows after the grid"));
    }
    GridMap::from_cells(width, height, cell_size, cells)
}

pub fn read_map(path: &Path) -> Result<GridMap> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_map(&text, path)
}

pub fn write_map(path: &Path, map: &GridMap) -> Result<()> {
    write_file(path, map_to_string(map))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FootprintFile {
    pub polygon: Vec<Point2>,
    pub inscribed_radius: f64,
    pub circumscribed_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstacleFile {
    pub radius: f64,
    pub speed: f64,
    pub waypoints: Vec<Point2>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    /// Relative paths resolve against the scenario file's directory.
    pub map_file: String,
    pub dt: f64,
    pub time_horizon_steps: u32,
    pub footprint: FootprintFile,
    pub obstacles: Vec<ObstacleFile>,
}

impl ScenarioFile {
    pub fn describe(scenario: &Scenario, map_file: impl Into<String>) -> Self {
        let fp = scenario.footprint();
        ScenarioFile {
            map_file: map_file.into(),
            dt: scenario.dt(),
            time_horizon_steps: scenario.time_horizon_steps(),
            footprint: FootprintFile {
                polygon: fp.polygon().to_vec(),
                inscribed_radius: fp.inscribed_radius(),
                circumscribed_radius: fp.circumscribed_radius(),
            },
            obstacles: scenario
                .obstacles()
                .iter()
                .map(|o| ObstacleFile {
                    radius: o.radius(),
                    speed: o.speed(),
                    waypoints: o.waypoints().to_vec(),
                })
                .collect(),
        }
    }

    pub fn build(&self, map: GridMap) -> Result<Scenario> {
        let fp = RobotFootprint::new(
            self.footprint.polygon.clone(),
            self.footprint.inscribed_radius,
            self.footprint.circumscribed_radius,
        )?;
        let obstacles = self
            .obstacles
            .iter()
            .map(|o| DynamicObstacle::new(o.radius, o.speed, o.waypoints.clone()))
            .collect::<Result<Vec<_>>>()?;
        Scenario::new(map, fp, obstacles, self.time_horizon_steps, self.dt)
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: ScenarioFile =
        serde_json::from_str(&text).map_err(|e| Error::parse(path, e.to_string()))?;
    let map_path = resolve(path, &file.map_file);
    file.build(read_map(&map_path)?)
}

/// Writes `<stem>.map` and `<stem>.json` into `dir`; returns the scenario file's path.
pub fn save_scenario(dir: &Path, stem: &str, scenario: &Scenario) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let map_name = format!("{stem}.map");
    write_map(&dir.join(&map_name), scenario.map())?;
    let path = dir.join(format!("{stem}.json"));
    write_json(&path, &ScenarioFile::describe(scenario, map_name))?;
    Ok(path)
}

fn resolve(base_file: &Path, relative: &str) -> PathBuf {
    let p = Path::new(relative);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base_file.parent().unwrap_or(Path::new(".")).join(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveFile {
    pub start_heading: u8,
    pub dx: i32,
    pub dy: i32,
    pub end_heading: u8,
    pub duration_steps: u32,
    pub poses: Vec<[f64; 3]>,
}

impl From<&MotionPrimitive> for PrimitiveFile {
    fn from(p: &MotionPrimitive) -> Self {
        PrimitiveFile {
            start_heading: p.start_heading,
            dx: p.dx,
            dy: p.dy,
            end_heading: p.end_heading,
            duration_steps: p.duration,
            poses: p.poses.iter().map(|q| [q.x, q.y, q.theta]).collect(),
        }
    }
}

pub fn parse_primitives(text: &str, origin: &Path, dt: f64, cost_model: CostModel) -> Result<PrimitiveSet> {
    let files: Vec<PrimitiveFile> = serde_json::from_str(text).map_err(|e| Error::parse(origin, e.to_string()))?;
    let prims = files
        .into_iter()
        .map(|f| {
            MotionPrimitive::new(
                f.start_heading,
                f.dx,
                f.dy,
                f.end_heading,
                f.duration_steps,
                f.poses.iter().map(|q| Pose::new(q[0], q[1], q[2])).collect(),
                dt,
                &cost_model,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    PrimitiveSet::from_primitives(dt, cost_model, prims)
}

pub fn load_primitives(path: &Path, dt: f64, cost_model: CostModel) -> Result<PrimitiveSet> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_primitives(&text, path, dt, cost_model)
}

pub fn save_primitives(path: &Path, set: &PrimitiveSet) -> Result<()> {
    let files: Vec<PrimitiveFile> = set.primitives().iter().map(PrimitiveFile::from).collect();
    write_json(path, &files)
}

/// The robot query stored next to generated scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryFile {
    pub start: [i32; 3],
    pub goal: [i32; 2],
}

impl QueryFile {
    pub fn new(start: &StateHD, goal: StateLD) -> Self {
        QueryFile {
            start: [start.x, start.y, start.heading as i32],
            goal: [goal.x, goal.y],
        }
    }

    pub fn start(&self) -> StateHD {
        StateHD::new(self.start[0], self.start[1], self.start[2] as u8, 0)
    }

    pub fn goal(&self) -> StateLD {
        StateLD::new(self.goal[0], self.goal[1])
    }
}

/// A plan outcome together with its query, as written by `plan --trace`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceFile {
    pub start: StateHD,
    pub goal: StateLD,
    #[serde(flatten)]
    pub outcome: PlanOutcome,
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(path, text)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path, e.to_string()))
}

pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adplanner::{plan, PlannerConfig};
    use crate::envgen::{generate, EnvKind, GenSpec};
    use crate::lattice::Lattice;

    #[test]
    fn map_text_round_trip() {
        let mut map = GridMap::new(4, 3, 0.5).unwrap();
        map.set_occupied(1, 0, true);
        map.set_occupied(3, 2, true);
        let text = map_to_string(&map);
        assert_eq!(text, "4 3 0.5\n.#..\n....\n...#\n");
        assert_eq!(parse_map(&text, Path::new("m")).unwrap(), map);
    }

    #[test]
    fn map_parse_errors_name_the_problem() {
        let p = Path::new("bad.map");
        for (text, needle) in [
            ("", "empty"),
            ("3 2\n...\n...\n", "header"),
            ("3 2 1\n...\n..\n", "row 1"),
            ("3 2 1\n...\n.x.\n", "unexpected 'x'"),
            ("3 2 1\n...\n", "expected 2 rows"),
            ("2 1 1\n..\n..\n", "trailing"),
        ] {
            let err = parse_map(text, p).unwrap_err().to_string();
            assert!(err.contains(needle), "{err}");
        }
        assert!(matches!(parse_map("2 1 0\n..\n", p), Err(Error::InvalidMap(_))));
    }

    #[test]
    fn scenario_round_trip() {
        let g = generate(&GenSpec::new(EnvKind::Indoor, 80, 3, 3)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = save_scenario(dir.path(), "env", &g.scenario).unwrap();
        let back = load_scenario(&path).unwrap();
        assert_eq!(back.map(), g.scenario.map());
        assert_eq!(back.obstacles(), g.scenario.obstacles());
        assert_eq!(back.footprint(), g.scenario.footprint());
        assert_eq!((back.dt(), back.time_horizon_steps()), (g.scenario.dt(), g.scenario.time_horizon_steps()));
        let again = save_scenario(&dir.path().join("copy"), "env", &back).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&again).unwrap());
    }

    #[test]
    fn missing_files_are_reported() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(load_scenario(&dir.path().join("nope.json")), Err(Error::Io { .. })));
        let bad = dir.path().join("s.json");
        fs::write(&bad, "{\"map_file\": 3}").unwrap();
        assert!(matches!(load_scenario(&bad), Err(Error::Parse { .. })));
    }

    #[test]
    fn primitive_round_trip_and_validation() {
        let set = PrimitiveSet::unicycle(0.1, CostModel::default());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("prims.json");
        save_primitives(&path, &set).unwrap();
        let back = load_primitives(&path, 0.1, CostModel::default()).unwrap();
        assert_eq!(back.primitives(), set.primitives());

        // too fast to dominate the cells it sweeps
        let text = r#"[{"start_heading":0,"dx":2,"dy":0,"end_heading":0,"duration_steps":2,
            "poses":[[0,0,0],[1,0,0],[2,0,0]]}]"#;
        assert!(matches!(
            parse_primitives(text, Path::new("p"), 0.1, CostModel::default()),
            Err(Error::InvalidPrimitive(_))
        ));
    }

    #[test]
    fn trace_serializes_outcome_and_query() {
        let g = generate(&GenSpec::new(EnvKind::Maze, 60, 1, 2)).unwrap();
        let lat = Lattice::with_defaults(&g.scenario);
        let cfg = PlannerConfig {
            new_region_radius: 6.0,
            grow_increment: 3.0,
            tunnel_width: 4,
            ..PlannerConfig::with_epsilon(2.0)
        };
        let out = plan(&lat, g.start, g.goal, &cfg).unwrap();
        let trace = TraceFile {
            start: g.start,
            goal: g.goal,
            outcome: out,
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        write_json(&path, &trace).unwrap();
        let back: TraceFile = read_json(&path).unwrap();
        assert_eq!(back.outcome.status, trace.outcome.status);
        assert_eq!(back.outcome.path, trace.outcome.path);
        assert_eq!(back.outcome.regions, trace.outcome.regions);
        let v: serde_json::Value = read_json(&path).unwrap();
        assert_eq!(v["regions"][0]["reason"], "start");
        let q = QueryFile::new(&g.start, g.goal);
        assert_eq!((q.start(), q.goal()), (g.start, g.goal));
    }
}
