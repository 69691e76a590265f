//! `descriptor`: solves, probes and range-checks descriptor systems described
//! in JSON files, and replays the worked examples.
//!
//! Every run writes CSV tables and a `summary.json` into `--out`. Exit codes:
//! 0 success, 2 invalid input, 3 solver failure, 4 inconclusive verdict.

mod demo;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use descriptor::io::{save_probe_csv, save_solution_csv, ProbeSummary, RhsSpec, SolutionSummary, SystemSpec};
use descriptor::linalg::pencil_regular;
use descriptor::solver::{
    closed_range_for_system, coupled_grid_len, default_eps_grid, pseudosolution_probe, solve_regularized,
    ProbeSchedule, Verdict,
};
use descriptor::Error;

use report::{Outcome, Run};

#[derive(Parser, Debug)]
#[command(
    name = "descriptor",
    version,
    about = "Pseudosolutions and closed-range checks for descriptor systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the regularized problem once at `--eps`.
    Solve(Opts),
    /// Run the pseudosolution probe along `eps0 * ratio^k`.
    Probe(Opts),
    /// Closed-range test for a constant-coefficient system.
    CheckRange(Opts),
    /// Replay a worked example.
    Demo {
        #[arg(value_enum)]
        scenario: Scenario,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Example1,
    Example2,
    Cantor,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct Opts {
    /// System description (JSON).
    #[arg(long)]
    pub system: Option<PathBuf>,
    /// Right-hand side (JSON).
    #[arg(long)]
    pub rhs: Option<PathBuf>,
    /// Regularization parameter for `solve`.
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.5)]
    pub eps0: f64,
    #[arg(long, default_value_t = 0.5)]
    pub ratio: f64,
    #[arg(long, default_value_t = 8)]
    pub steps: usize,
    /// Smallest grid size; finer grids are used when `eps` demands it.
    #[arg(long, default_value_t = 201)]
    pub grid: usize,
    /// Upper bound on the grid size.
    #[arg(long, default_value_t = descriptor::solver::regularized::N_MAX)]
    pub n_max: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl Opts {
    fn system(&self) -> descriptor::Result<SystemSpec> {
        let path = self
            .system
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("--system is required".into()))?;
        SystemSpec::load(path)
    }

    fn rhs(&self) -> descriptor::Result<RhsSpec> {
        let path = self
            .rhs
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("--rhs is required".into()))?;
        RhsSpec::load(path)
    }

    fn schedule(&self) -> ProbeSchedule {
        ProbeSchedule {
            eps0: self.eps0,
            ratio: self.ratio,
            steps: self.steps,
            grid_n: self.grid,
            n_max: self.n_max,
            ..ProbeSchedule::default()
        }
    }

    fn validate(&self) -> descriptor::Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidInput(format!("--eps must be positive, got {}", self.eps)));
        }
        if self.grid < 3 || self.n_max < self.grid {
            return Err(Error::InvalidInput(
                "grid sizes must satisfy 3 <= --grid <= --n-max".into(),
            ));
        }
        self.schedule().validate()
    }
}

fn solve(run: &mut Run, opts: &Opts) -> descriptor::Result<Outcome> {
    let spec = opts.system()?;
    let rhs_spec = opts.rhs()?;
    let interval = spec.interval[1] - spec.interval[0];
    let (n, cap_hit) = coupled_grid_len(interval, opts.eps, opts.grid, opts.n_max);
    let sys = spec.build(n)?;
    let rhs = rhs_spec.source(&sys)?.on_grid(sys.grid())?;
    let sol = solve_regularized(&sys, &rhs, opts.eps)?;
    save_solution_csv(&sol, run.path("solution.csv"))?;
    let summary = SolutionSummary::from(&sol);
    println!(
        "eps {:e}  grid {}  |x| {:.6e}  |z| {:.6e}  residual {:.2e}  condition {:.2e}",
        summary.eps, summary.grid_n, summary.x_l2, summary.z_l2, summary.residual, summary.condition
    );
    if cap_hit {
        eprintln!("warning: grid capped at {n} nodes; eps is under-resolved");
    }
    run.result(&serde_json::json!({ "cap_hit": cap_hit, "solution": summary }))?;
    Ok(Outcome::Done)
}

fn probe(run: &mut Run, opts: &Opts) -> descriptor::Result<Outcome> {
    let spec = opts.system()?;
    let rhs_spec = opts.rhs()?;
    let sys = spec.build(opts.grid)?;
    let rhs = rhs_spec.source(&sys)?;
    let schedule = opts.schedule();
    let report = pseudosolution_probe(&sys, &rhs, &schedule)?;
    save_probe_csv(&report, run.path("probe.csv"))?;
    if let Some(sol) = &report.last_solution {
        save_solution_csv(sol, run.path("solution.csv"))?;
    }
    println!("{:>12} {:>8} {:>14} {:>10}", "eps", "grid", "|x|", "residual");
    for s in &report.steps {
        let show = |v: Option<f64>, p: usize| v.map_or("-".to_string(), |v| format!("{v:.p$e}"));
        println!(
            "{:>12.4e} {:>8} {:>14} {:>10}",
            s.eps,
            s.grid_n,
            show(s.norm, 6),
            show(s.residual, 2)
        );
    }
    println!("verdict: {}", report.verdict);
    run.result(&ProbeSummary::new(&report, &schedule))?;
    Ok(match report.verdict {
        Verdict::Inconclusive => Outcome::Inconclusive,
        _ => Outcome::Done,
    })
}

#[derive(Serialize)]
struct RangeResult {
    rank: usize,
    left: Vec<Vec<f64>>,
    right: Vec<Vec<f64>>,
    reduced_c: [Vec<Vec<f64>>; 4],
    /// `det(λ F + C) ≢ 0`, only for square systems.
    pencil_regular: Option<bool>,
    range_closed: bool,
    branches_agree: bool,
    verdict: descriptor::solver::RangeVerdict,
}

fn check_range(run: &mut Run, opts: &Opts) -> descriptor::Result<Outcome> {
    let spec = opts.system()?;
    let sys = spec.build(opts.grid)?;
    let eps_grid = default_eps_grid();
    let (red, blocks, verdict) = closed_range_for_system(&sys, &eps_grid)?;
    report::write_rows(
        run.path("range.csv"),
        &["eps", "mod_norm"],
        verdict.eps_samples.iter().map(|(e, s)| vec![*e, *s]),
    )?;
    let pencil = if sys.f().is_square() {
        Some(pencil_regular(sys.f(), sys.c_at(0))?)
    } else {
        None
    };
    let agree = verdict.bounded == verdict.algebraic_bounded;
    println!(
        "rank {}  numeric bounded {}  algebraic bounded {}  growth exponent {:.3}",
        red.rank, verdict.bounded, verdict.algebraic_bounded, verdict.growth_exponent
    );
    println!("range closed: {}", verdict.range_closed());
    run.result(&RangeResult {
        rank: red.rank,
        left: red.left.to_rows(),
        right: red.right.to_rows(),
        reduced_c: [&blocks.c1, &blocks.c2, &blocks.c3, &blocks.c4].map(|m| m.to_rows()),
        pencil_regular: pencil,
        range_closed: verdict.range_closed(),
        branches_agree: agree,
        verdict,
    })?;
    Ok(if agree { Outcome::Done } else { Outcome::Inconclusive })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, opts) = match &cli.command {
        Command::Solve(o) => ("solve".to_string(), o),
        Command::Probe(o) => ("probe".to_string(), o),
        Command::CheckRange(o) => ("check-range".to_string(), o),
        Command::Demo { scenario, opts } => {
            let s = serde_json::to_value(scenario).expect("scenario serializes");
            (format!("demo {}", s.as_str().unwrap_or_default()), opts)
        }
    };
    let outcome = opts.validate().and_then(|_| {
        let mut run = Run::start(&name, opts)?;
        let outcome = match &cli.command {
            Command::Solve(o) => solve(&mut run, o),
            Command::Probe(o) => probe(&mut run, o),
            Command::CheckRange(o) => check_range(&mut run, o),
            Command::Demo { scenario, opts } => demo::run(&mut run, *scenario, opts),
        }?;
        run.finish(outcome)?;
        Ok(outcome)
    });
    match outcome {
        Ok(o) => ExitCode::from(o.code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(report::error_code(&e))
        }
    }
}
