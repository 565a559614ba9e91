use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use coverage_core::curvature::{linspace, SweepParam};
use coverage_core::oracle::check_curvature;
use coverage_core::sensing::miss_product;
use coverage_core::{
    bound_report, brute_force, check_definition_equivalence, check_submodular, coverage_objective,
    gga, greedy_place_lazy, sweep_bounds, sweep_csv, CandidateCoverage, CandidateSet, Deployment,
    Error, GreedyResult, Instance, Point, Result, Scenario,
};

use crate::{Command, Common};

/// Ground-set size for the tabulated definition-equivalence check.
const EQUIVALENCE_GROUND_SET: usize = 10;

const HEATMAP_THRESHOLDS: [f64; 2] = [0.97, 0.50];

fn version_header() -> String {
    format!("# coverage {}\n", env!("CARGO_PKG_VERSION"))
}

struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    fn new(dir: Option<PathBuf>) -> Result<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d)?;
        }
        Ok(Output { dir })
    }

    fn write_bytes(&self, name: &str, bytes: &[u8]) -> Result<()> {
        if let Some(d) = &self.dir {
            fs::write(d.join(name), bytes)?;
        }
        Ok(())
    }

    /// Writes a CSV artifact behind the version header line.
    fn csv(&self, name: &str, body: &str) -> Result<()> {
        self.write_bytes(name, format!("{}{body}", version_header()).as_bytes())
    }
}

fn setup(common: &Common) -> Result<(Instance, Output)> {
    let scenario = Scenario::load(common.scenario_path())?.with_overrides(&common.overrides());
    let inst = scenario.build()?;
    Ok((inst, Output::new(common.out.clone())?))
}

fn positions_csv(points: &[Point]) -> String {
    let mut out = String::from("agent,x,y\n");
    for (i, p) in points.iter().enumerate() {
        let _ = writeln!(out, "{i},{},{}", p.x, p.y);
    }
    out
}

fn read_positions(path: &Path) -> Result<Vec<Point>> {
    let text = fs::read_to_string(path)?;
    let bad = |line: usize, msg: &str| {
        Error::InvalidArgument(format!("{}:{}: {msg}", path.display(), line + 1))
    };
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("agent") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(bad(i, "expected `agent,x,y`"));
        }
        let x: f64 = fields[1].parse().map_err(|_| bad(i, "x is not a number"))?;
        let y: f64 = fields[2].parse().map_err(|_| bad(i, "y is not a number"))?;
        points.push(Point::new(x, y));
    }
    if points.is_empty() {
        return Err(bad(0, "no positions"));
    }
    Ok(points)
}

fn print_positions(points: &[Point]) {
    for (i, p) in points.iter().enumerate() {
        println!("agent {i}: ({:.4}, {:.4})", p.x, p.y);
    }
}

fn greedy(inst: &Instance, cov: &CandidateCoverage) -> Result<(GreedyResult, Vec<Point>)> {
    let g = greedy_place_lazy(cov, inst.n_agents())?;
    if g.constraint_slack {
        eprintln!(
            "note: {} agents requested but only {} candidates exist",
            inst.n_agents(),
            cov.len()
        );
    }
    if g.stopped_early {
        eprintln!(
            "note: stopped after {} agents; no remaining candidate adds coverage",
            g.chosen.len()
        );
    }
    let points = g.chosen.iter().map(|&k| cov.positions()[k]).collect();
    Ok((g, points))
}

pub(crate) fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Evaluate { common, positions } => evaluate(&common, &positions),
        Command::Greedy(common) => run_greedy(&common),
        Command::Gga(common) => run_gga(&common),
        Command::Bounds(common) => bounds(&common),
        Command::Sweep { common, sweep } => run_sweep(&common, &sweep),
        Command::Oracle { common, cap } => oracle(&common, cap),
        Command::Check { common, trials } => check(&common, trials),
        Command::Heatmap { common, positions } => heatmap(&common, positions.as_deref()),
    }
}

fn evaluate(common: &Common, positions: &Path) -> Result<ExitCode> {
    let (inst, out) = setup(common)?;
    let points = read_positions(positions)?;
    let dep = Deployment::uniform(&points, inst.model, &inst.ms)?;
    let h = coverage_objective(&dep, &inst.grid, &inst.ms);
    println!("H = {h:.6}");
    out.csv("evaluate.csv", &format!("agents,H\n{},{h}\n", points.len()))?;
    Ok(ExitCode::SUCCESS)
}

fn run_greedy(common: &Common) -> Result<ExitCode> {
    let (inst, out) = setup(common)?;
    let cov = inst.coverage();
    let (g, points) = greedy(&inst, &cov)?;
    print_positions(&points);
    println!("H = {:.6}", g.value());
    println!("marginal gain evaluations: {}", g.evaluations);
    out.csv("positions.csv", &positions_csv(&points))?;
    Ok(ExitCode::SUCCESS)
}

fn run_gga(common: &Common) -> Result<ExitCode> {
    let (inst, out) = setup(common)?;
    let cov = inst.coverage();
    let (g, points) = greedy(&inst, &cov)?;
    let dep = Deployment::uniform(&points, inst.model, &inst.ms)?;
    let trace = gga(&dep, &inst.grid, &inst.ms, &inst.gga)?;
    print_positions(trace.final_positions());
    println!("greedy H = {:.6}", g.value());
    println!("GGA H = {:.6}", trace.final_value());
    println!(
        "sweeps: {}, termination: {:?}",
        trace.sweeps(),
        trace.termination
    );
    out.csv("greedy_positions.csv", &positions_csv(&points))?;
    out.csv("positions.csv", &positions_csv(trace.final_positions()))?;
    out.csv("gga_trace.csv", &trace.to_csv())?;
    Ok(ExitCode::SUCCESS)
}

fn bounds(common: &Common) -> Result<ExitCode> {
    let (inst, out) = setup(common)?;
    let cov = inst.coverage();
    let (g, _) = greedy(&inst, &cov)?;
    let mut r = bound_report(&cov, &inst.grid, inst.n_agents(), common.alpha_domain)?;
    r.greedy_value = Some(g.value());
    let row = format!(
        "{},{},{},{},{},{},{}",
        r.n_agents,
        r.c,
        r.alpha,
        r.t,
        r.e,
        r.l,
        g.value()
    );
    println!("N,c,alpha,T,E,L,greedy_H");
    println!("{row}");
    println!("certified: greedy H >= {:.4} x optimum", r.l);
    out.csv("bounds.csv", &format!("N,c,alpha,T,E,L,greedy_H\n{row}\n"))?;
    Ok(ExitCode::SUCCESS)
}

fn parse_sweep(arg: &str) -> Result<(SweepParam, Vec<f64>)> {
    let bad = || {
        Error::InvalidParameter(format!(
            "sweep must look like `lambda:0.005:0.5:100`, got `{arg}`"
        ))
    };
    let parts: Vec<&str> = arg.split(':').collect();
    let [param, start, stop, steps] = parts.as_slice() else {
        return Err(bad());
    };
    let param: SweepParam = param.parse()?;
    let start: f64 = start.parse().map_err(|_| bad())?;
    let stop: f64 = stop.parse().map_err(|_| bad())?;
    let steps: usize = steps.parse().map_err(|_| bad())?;
    if steps < 1 {
        return Err(Error::InvalidParameter(
            "sweep needs at least one step".into(),
        ));
    }
    Ok((param, linspace(start, stop, steps)))
}

fn run_sweep(common: &Common, sweep: &str) -> Result<ExitCode> {
    let (param, values) = parse_sweep(sweep)?;
    let (inst, out) = setup(common)?;
    let rows = sweep_bounds(
        &inst.ms,
        &inst.grid,
        &inst.candidates,
        inst.model,
        inst.n_agents(),
        common.alpha_domain,
        param,
        &values,
    )?;
    let csv = sweep_csv(&rows);
    print!("{csv}");
    out.csv("sweep.csv", &csv)?;
    Ok(ExitCode::SUCCESS)
}

fn oracle(common: &Common, cap: u128) -> Result<ExitCode> {
    let (inst, out) = setup(common)?;
    let cov = inst.coverage();
    let best = brute_force(&cov, inst.n_agents(), cap)?;
    let (g, _) = greedy(&inst, &cov)?;
    let ratio = g.value() / best.best_value;
    print!("{}", best.to_text());
    println!("greedy value: {}", g.value());
    println!("greedy / optimum: {ratio:.6}");
    let points: Vec<Point> = best
        .best_subset
        .iter()
        .map(|&k| cov.positions()[k])
        .collect();
    out.csv(
        "oracle.csv",
        &format!(
            "subsets_evaluated,best_value,greedy_value,ratio\n{},{},{},{ratio}\n",
            best.subsets_evaluated,
            best.best_value,
            g.value()
        ),
    )?;
    out.csv("oracle_positions.csv", &positions_csv(&points))?;
    Ok(ExitCode::SUCCESS)
}

fn check(common: &Common, trials: usize) -> Result<ExitCode> {
    let (inst, out) = setup(common)?;
    let seed = inst.scenario.seed;
    let cov = inst.coverage();
    let sub = check_submodular(&cov, trials, seed)?;
    let ground = CandidateSet {
        positions: inst
            .candidates
            .positions
            .iter()
            .copied()
            .take(EQUIVALENCE_GROUND_SET)
            .collect(),
        spacing: inst.candidates.spacing,
    };
    let ground_cov = CandidateCoverage::new(&ground, inst.model, &inst.grid, &inst.ms);
    let eq = check_definition_equivalence(&ground_cov, trials, seed)?;
    let curv = check_curvature(&cov, &inst.grid, common.alpha_domain, trials, seed)?;
    let text = format!("{}{}{}", sub.to_text(), eq.to_text(), curv.to_text());
    print!("{text}");
    out.write_bytes("check.txt", text.as_bytes())?;
    out.csv("submodular_violations.csv", &sub.to_csv())?;
    let passed = sub.passed() && eq.passed() && curv.passed();
    println!(
        "{}",
        if passed {
            "all checks passed"
        } else {
            "CHECK FAILED"
        }
    );
    Ok(if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn heatmap(common: &Common, positions: Option<&Path>) -> Result<ExitCode> {
    let (inst, out) = setup(common)?;
    let points = match positions {
        Some(p) => read_positions(p)?,
        None => {
            let cov = inst.coverage();
            let (_, points) = greedy(&inst, &cov)?;
            let dep = Deployment::uniform(&points, inst.model, &inst.ms)?;
            gga(&dep, &inst.grid, &inst.ms, &inst.gga)?
                .final_positions()
                .to_vec()
        }
    };
    let dep = Deployment::uniform(&points, inst.model, &inst.ms)?;
    let miss = miss_product(&dep, &inst.grid, &inst.ms);
    let grid = &inst.grid;
    let prob: Vec<f64> = grid
        .cells
        .iter()
        .zip(&miss)
        .map(|(c, m)| if c.feasible { 1.0 - m } else { 0.0 })
        .collect();

    // Image order: top row first.
    let mut csv = String::new();
    let mut pgm = format!("P5\n{} {}\n255\n", grid.nx, grid.ny).into_bytes();
    for row in (0..grid.ny).rev() {
        let cells = &prob[row * grid.nx..(row + 1) * grid.nx];
        let line: Vec<String> = cells.iter().map(|p| format!("{p:.6}")).collect();
        csv.push_str(&line.join(","));
        csv.push('\n');
        pgm.extend(cells.iter().map(|p| (255.0 * p).round() as u8));
    }

    let feasible_area: f64 = grid
        .cells
        .iter()
        .filter(|c| c.feasible)
        .map(|c| c.weight)
        .sum();
    let mut stats = String::from("threshold,area_fraction\n");
    for t in HEATMAP_THRESHOLDS {
        let area: f64 = grid
            .cells
            .iter()
            .zip(&prob)
            .filter(|(c, p)| c.feasible && **p >= t)
            .map(|(c, _)| c.weight)
            .sum();
        let fraction = area / feasible_area;
        println!("area with P >= {t:.2}: {:.2}%", 100.0 * fraction);
        let _ = writeln!(stats, "{t},{fraction}");
    }
    println!("H = {:.6}", coverage_objective(&dep, grid, &inst.ms));
    out.csv("heatmap.csv", &csv)?;
    out.write_bytes("heatmap.pgm", &pgm)?;
    out.csv("heatmap_stats.csv", &stats)?;
    out.csv("positions.csv", &positions_csv(&points))?;
    Ok(ExitCode::SUCCESS)
}
