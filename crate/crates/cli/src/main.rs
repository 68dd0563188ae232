use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use adim_core::io::{self, QueryFile, TraceFile};
use adim_core::suite::{format_aggregate, rows_to_csv};
use adim_core::{
    generate, plan, plan_full, render, run_suite, BaselineConfig, EnvKind, GenSpec, Lattice, PlanOutcome,
    PlanStatus, PlannerConfig, StateHD, StateLD, SuiteSpec,
};

/// Planning among moving obstacles with adaptive dimensionality.
#[derive(Parser)]
#[command(name = "adim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan a path on a scenario file.
    Plan(PlanArgs),
    /// Generate a scenario and query.
    Gen(GenArgs),
    /// Run a benchmark suite and write per-run CSV rows.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Planner {
    Ad,
    Baseline,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Maze,
    Indoor,
}

#[derive(clap::Args)]
struct PlanArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Start as `x,y,heading`; defaults to query.json beside the scenario.
    #[arg(long, value_parser = parse_start)]
    start: Option<StateHD>,
    /// Goal cell as `x,y`.
    #[arg(long, value_parser = parse_goal)]
    goal: Option<StateLD>,
    #[arg(long, value_enum, default_value = "ad")]
    planner: Planner,
    #[arg(long, default_value_t = 2.0)]
    epsilon: f64,
    /// Overrides the planning-phase factor (AD only).
    #[arg(long)]
    epsilon_plan: Option<f64>,
    /// Overrides the tracking-phase factor (AD only).
    #[arg(long)]
    epsilon_track: Option<f64>,
    /// Seconds.
    #[arg(long, default_value_t = 300.0)]
    timeout: f64,
    #[arg(long)]
    max_iterations: Option<u32>,
    #[arg(long)]
    tunnel_width: Option<u32>,
    #[arg(long)]
    region_radius: Option<f64>,
    #[arg(long)]
    grow_increment: Option<f64>,
    /// Motion primitive JSON file.
    #[arg(long)]
    primitives: Option<PathBuf>,
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 300)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    obstacles: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct BenchArgs {
    #[arg(long)]
    suite: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

fn parse_ints<const N: usize>(s: &str) -> Result<[i32; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated integers, got {s:?}"));
    }
    let mut out = [0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|_| format!("not an integer: {p:?}"))?;
    }
    Ok(out)
}

fn parse_start(s: &str) -> Result<StateHD, String> {
    let [x, y, h] = parse_ints::<3>(s)?;
    let h = u8::try_from(h).ok().filter(|h| *h < 16).ok_or("heading must be in 0..16")?;
    Ok(StateHD::new(x, y, h, 0))
}

fn parse_goal(s: &str) -> Result<StateLD, String> {
    let [x, y] = parse_ints::<2>(s)?;
    Ok(StateLD::new(x, y))
}

fn positive_secs(s: f64) -> anyhow::Result<Duration> {
    if !(s > 0.0 && s.is_finite()) {
        bail!("timeout must be a positive number of seconds, got {s}");
    }
    Ok(Duration::from_secs_f64(s))
}

fn query_for(args: &PlanArgs) -> anyhow::Result<(StateHD, StateLD)> {
    if let (Some(s), Some(g)) = (args.start, args.goal) {
        return Ok((s, g));
    }
    let path = args.scenario.parent().unwrap_or(Path::new(".")).join("query.json");
    let q: QueryFile = io::read_json(&path).with_context(|| "no --start/--goal given and no readable query.json")?;
    Ok((args.start.unwrap_or_else(|| q.start()), args.goal.unwrap_or_else(|| q.goal())))
}

fn run_plan(args: PlanArgs) -> anyhow::Result<PlanStatus> {
    let scenario = io::load_scenario(&args.scenario)?;
    let lattice = match &args.primitives {
        Some(p) => {
            let set = io::load_primitives(p, scenario.dt(), Default::default())?;
            Lattice::new(&scenario, set)?
        }
        None => Lattice::with_defaults(&scenario),
    };
    let (start, goal) = query_for(&args)?;
    let timeout = positive_secs(args.timeout)?;

    let outcome: PlanOutcome = match args.planner {
        Planner::Ad => {
            let mut cfg = PlannerConfig::with_epsilon(args.epsilon);
            if let Some(e) = args.epsilon_plan {
                cfg.epsilon_plan = e;
            }
            if let Some(e) = args.epsilon_track {
                cfg.epsilon_track = e;
            }
            cfg.timeout = timeout;
            if let Some(n) = args.max_iterations {
                cfg.max_iterations = n;
            }
            if let Some(w) = args.tunnel_width {
                cfg.tunnel_width = w;
            }
            if let Some(r) = args.region_radius {
                cfg.new_region_radius = r;
            }
            if let Some(g) = args.grow_increment {
                cfg.grow_increment = g;
            }
            plan(&lattice, start, goal, &cfg)?
        }
        Planner::Baseline => {
            let mut cfg = BaselineConfig::with_epsilon(args.epsilon);
            cfg.timeout = timeout;
            plan_full(&lattice, start, goal, &cfg)?
        }
    };

    println!(
        "status={} cost={} iterations={} hd_expansions={} ld_expansions={} time_s={:.4}",
        outcome.status,
        outcome.cost,
        outcome.iterations,
        outcome.stats.hd_expansions,
        outcome.stats.ld_expansions,
        outcome.stats.elapsed.as_secs_f64()
    );
    if let Some(path) = &args.trace {
        io::write_json(path, &TraceFile { start, goal, outcome: outcome.clone() })?;
    }
    if let Some(path) = &args.svg {
        render::write_svg(path, &scenario, Some(&outcome), Some(&outcome.regions))?;
    }
    Ok(outcome.status)
}

fn run_gen(args: GenArgs) -> anyhow::Result<()> {
    let kind = match args.kind {
        Kind::Maze => EnvKind::Maze,
        Kind::Indoor => EnvKind::Indoor,
    };
    let g = generate(&GenSpec::new(kind, args.size, args.seed, args.obstacles))?;
    let path = io::save_scenario(&args.out, "env", &g.scenario)?;
    io::write_json(&args.out.join("query.json"), &QueryFile::new(&g.start, g.goal))?;
    println!(
        "wrote {} start={},{},{} goal={},{}",
        path.display(),
        g.start.x,
        g.start.y,
        g.start.heading,
        g.goal.x,
        g.goal.y
    );
    Ok(())
}

fn run_bench(args: BenchArgs) -> anyhow::Result<()> {
    let spec: SuiteSpec = io::read_json(&args.suite)?;
    if args.workers == 0 {
        bail!("--workers must be positive");
    }
    let result = run_suite(&spec, args.workers)?;
    io::write_file(&args.out, rows_to_csv(&result.rows))?;
    print!("{}", format_aggregate(&result.table));
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Plan(a) => run_plan(a).map(|s| match s {
            PlanStatus::Found => 0,
            PlanStatus::NoPathWithinHorizon => 2,
            PlanStatus::ResourceExhausted => 3,
        }),
        Command::Gen(a) => run_gen(a).map(|_| 0),
        Command::Bench(a) => run_bench(a).map(|_| 0),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            log::error!("{e:#}");
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
