//! Experiment suites: every (planner, epsilon, environment) run, CSV rows and summary tables.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::adplanner::{plan, PlanOutcome, PlanStatus, PlannerConfig, PlannerKind};
use crate::baseline::{plan_full, BaselineConfig};
use crate::envgen::{generate, GenSpec, Generated};
use crate::error::{Error, Result};
use crate::lattice::{Cost, Lattice};

pub const CSV_HEADER: &str = "planner,epsilon,env,status,time_s,hd_expansions,ld_expansions,cost,iterations";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteSpec {
    pub n_environments: usize,
    pub gen: GenSpec,
    pub epsilons: Vec<f64>,
    pub planners: Vec<PlannerKind>,
    pub timeout_s: f64,
    pub tunnel_width: Option<u32>,
    pub new_region_radius: Option<f64>,
    pub grow_increment: Option<f64>,
}

impl Default for SuiteSpec {
    fn default() -> Self {
        SuiteSpec {
            n_environments: 50,
            gen: GenSpec::default(),
            epsilons: vec![1.1, 1.5, 2.0],
            planners: vec![PlannerKind::Ad, PlannerKind::Baseline],
            timeout_s: 300.0,
            tunnel_width: None,
            new_region_radius: None,
            grow_increment: None,
        }
    }
}

impl SuiteSpec {
    pub fn validate(&self) -> Result<()> {
        if self.epsilons.iter().any(|e| !(*e >= 1.0 && e.is_finite())) {
            return Err(Error::InvalidConfig("every epsilon must be at least 1".into()));
        }
        if self.planners.is_empty() || self.epsilons.is_empty() {
            return Err(Error::InvalidConfig("suite needs at least one planner and one epsilon".into()));
        }
        if !(self.timeout_s > 0.0 && self.timeout_s.is_finite()) {
            return Err(Error::InvalidConfig("timeout must be positive".into()));
        }
        Ok(())
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_secs_f64(self.timeout_s)
    }

    pub fn env_spec(&self, env: usize) -> GenSpec {
        GenSpec {
            seed: self.gen.seed + env as u64,
            ..self.gen.clone()
        }
    }

    pub fn planner_config(&self, epsilon: f64) -> PlannerConfig {
        let mut c = PlannerConfig::with_epsilon(epsilon);
        c.timeout = self.timeout();
        c.tunnel_width = self.tunnel_width.unwrap_or(c.tunnel_width);
        c.new_region_radius = self.new_region_radius.unwrap_or(c.new_region_radius);
        c.grow_increment = self.grow_increment.unwrap_or(c.grow_increment);
        c
    }

    pub fn baseline_config(&self, epsilon: f64) -> BaselineConfig {
        BaselineConfig {
            timeout: self.timeout(),
            ..BaselineConfig::with_epsilon(epsilon)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub planner: PlannerKind,
    pub epsilon: f64,
    pub env: usize,
    pub status: PlanStatus,
    pub time_s: f64,
    pub hd_expansions: u64,
    pub ld_expansions: u64,
    /// Absent unless a path was found.
    pub cost: Option<Cost>,
    pub iterations: u32,
}

impl ResultRow {
    pub fn from_outcome(epsilon: f64, env: usize, o: &PlanOutcome) -> Self {
        ResultRow {
            planner: o.planner,
            epsilon,
            env,
            status: o.status,
            time_s: o.stats.elapsed.as_secs_f64(),
            hd_expansions: o.stats.hd_expansions,
            ld_expansions: o.stats.ld_expansions,
            cost: (o.status == PlanStatus::Found).then_some(o.cost),
            iterations: o.iterations,
        }
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{:.4},{},{},{},{}",
            self.planner,
            self.epsilon,
            self.env,
            self.status,
            self.time_s,
            self.hd_expansions,
            self.ld_expansions,
            self.cost.map_or_else(String::new, |c| c.to_string()),
            self.iterations
        )
    }
}

impl FromStr for ResultRow {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let f: Vec<&str> = line.trim_end().split(',').collect();
        let bad = |what: &str| Error::InvalidConfig(format!("bad {what} in CSV row '{line}'"));
        if f.len() != 9 {
            return Err(bad("field count"));
        }
        Ok(ResultRow {
            planner: f[0].parse()?,
            epsilon: f[1].parse().map_err(|_| bad("epsilon"))?,
            env: f[2].parse().map_err(|_| bad("env"))?,
            status: f[3].parse()?,
            time_s: f[4].parse().map_err(|_| bad("time_s"))?,
            hd_expansions: f[5].parse().map_err(|_| bad("hd_expansions"))?,
            ld_expansions: f[6].parse().map_err(|_| bad("ld_expansions"))?,
            cost: if f[7].is_empty() { None } else { Some(f[7].parse().map_err(|_| bad("cost"))?) },
            iterations: f[8].parse().map_err(|_| bad("iterations"))?,
        })
    }
}

pub fn rows_to_csv(rows: &[ResultRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.to_csv());
        s.push('\n');
    }
    s
}

pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim_end) != Some(CSV_HEADER) {
        return Err(Error::InvalidConfig("CSV header mismatch".into()));
    }
    lines.filter(|l| !l.trim().is_empty()).map(str::parse).collect()
}

/// Mean and sample standard deviation (`n - 1` denominator; 0 for fewer than two values).
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub planner: PlannerKind,
    pub epsilon: f64,
    pub runs: usize,
    pub successes: usize,
    /// Environments solved by every planner at this epsilon; the statistics below use only these.
    pub shared: usize,
    pub time_s: (f64, f64),
    pub hd_expansions: (f64, f64),
    pub ld_expansions: (f64, f64),
    pub cost: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateTable {
    pub rows: Vec<AggregateRow>,
    /// Epsilons at which no environment was solved by every planner.
    pub no_shared_successes: Vec<f64>,
}

pub fn aggregate(rows: &[ResultRow], planners: &[PlannerKind], epsilons: &[f64]) -> AggregateTable {
    let mut table = AggregateTable {
        rows: Vec::new(),
        no_shared_successes: Vec::new(),
    };
    for &eps in epsilons {
        let at_eps: Vec<&ResultRow> = rows.iter().filter(|r| r.epsilon == eps).collect();
        let envs: BTreeSet<usize> = at_eps.iter().map(|r| r.env).collect();
        let shared: BTreeSet<usize> = envs
            .into_iter()
            .filter(|&e| {
                planners.iter().all(|&p| {
                    at_eps
                        .iter()
                        .any(|r| r.env == e && r.planner == p && r.status == PlanStatus::Found)
                })
            })
            .collect();
        if shared.is_empty() {
            table.no_shared_successes.push(eps);
        }
        for &p in planners {
            let mine: Vec<&&ResultRow> = at_eps.iter().filter(|r| r.planner == p).collect();
            let kept: Vec<&&ResultRow> = mine
                .iter()
                .copied()
                .filter(|r| shared.contains(&r.env) && r.status == PlanStatus::Found)
                .collect();
            let stat = |f: &dyn Fn(&ResultRow) -> f64| mean_sd(&kept.iter().map(|r| f(r)).collect::<Vec<_>>());
            table.rows.push(AggregateRow {
                planner: p,
                epsilon: eps,
                runs: mine.len(),
                successes: mine.iter().filter(|r| r.status == PlanStatus::Found).count(),
                shared: shared.len(),
                time_s: stat(&|r| r.time_s),
                hd_expansions: stat(&|r| r.hd_expansions as f64),
                ld_expansions: stat(&|r| r.ld_expansions as f64),
                cost: stat(&|r| r.cost.unwrap_or(0) as f64),
            });
        }
    }
    table
}

/// Plain-text table in the layout of the published result tables.
pub fn format_aggregate(table: &AggregateTable) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<9} {:>5} {:>9} {:>7} {:>18} {:>24} {:>24} {:>22}",
        "planner", "eps", "success", "shared", "time (s)", "# 4D expands", "# 2D expands", "path cost"
    );
    for r in &table.rows {
        let pm = |(m, sd): (f64, f64), prec: usize| format!("{m:.prec$} ± {sd:.prec$}");
        let shared = if table.no_shared_successes.contains(&r.epsilon) {
            "no shared successes".to_string()
        } else {
            format!(
                "{:>18} {:>24} {:>24} {:>22}",
                pm(r.time_s, 3),
                pm(r.hd_expansions, 0),
                pm(r.ld_expansions, 0),
                pm(r.cost, 0)
            )
        };
        let _ = writeln!(
            s,
            "{:<9} {:>5} {:>9} {:>7} {}",
            r.planner,
            r.epsilon,
            format!("{}/{}", r.successes, r.runs),
            r.shared,
            shared
        );
    }
    s
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub rows: Vec<ResultRow>,
    pub table: AggregateTable,
}

/// One run of `planner` on a generated environment.
pub fn run_one(spec: &SuiteSpec, env: &Generated, planner: PlannerKind, epsilon: f64) -> Result<PlanOutcome> {
    let lattice = Lattice::with_defaults(&env.scenario);
    match planner {
        PlannerKind::Ad => plan(&lattice, env.start, env.goal, &spec.planner_config(epsilon)),
        PlannerKind::Baseline => plan_full(&lattice, env.start, env.goal, &spec.baseline_config(epsilon)),
    }
}

/// Runs every (planner, epsilon, environment) combination on `workers` threads.
/// Rows come back ordered by planner, then epsilon (both in suite order), then environment.
pub fn run_suite(spec: &SuiteSpec, workers: usize) -> Result<SuiteResult> {
    spec.validate()?;
    let envs = (0..spec.n_environments)
        .map(|e| generate(&spec.env_spec(e)))
        .collect::<Result<Vec<_>>>()?;
    let mut jobs = Vec::new();
    for (pi, &p) in spec.planners.iter().enumerate() {
        for (ei, &eps) in spec.epsilons.iter().enumerate() {
            for env in 0..envs.len() {
                jobs.push((pi, ei, env, p, eps));
            }
        }
    }
    let results: Mutex<Vec<Option<Result<ResultRow>>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers.max(1).min(jobs.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(_, _, env, p, eps)) = jobs.get(i) else { break };
                let row = run_one(spec, &envs[env], p, eps).map(|o| ResultRow::from_outcome(eps, env, &o));
                if let Ok(r) = &row {
                    log::info!("{} eps={} env={} {} {:.2}s", r.planner, r.epsilon, r.env, r.status, r.time_s);
                }
                results.lock().expect("no worker panicked")[i] = Some(row);
            });
        }
    });
    let rows = results
        .into_inner()
        .expect("no worker panicked")
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect::<Result<Vec<_>>>()?;
    let table = aggregate(&rows, &spec.planners, &spec.epsilons);
    Ok(SuiteResult { rows, table })
}
