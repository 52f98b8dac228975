//! The experiments behind each subcommand. Each returns an in-memory report;
//! the `write_*` functions persist it.

use std::fmt::Write as _;
use std::path::Path;

use interpolatron::optim::{run_with, RunSettings, Start};
use interpolatron::problems::{escape_steps, max_excursion, PiecewiseProblem};
use interpolatron::theory::{certify, fit_rate, CompanionSpec, RateCertificate, RateFit};
use interpolatron::{
    HistoryWindow, MixingCoefficients, OptimizerSpec, Problem, RunError, StepSchedule, TraceRow, Vector,
};
use rayon::prelude::*;

use crate::config::{BetaMatching, CertifyConfig, ExperimentConfig, ProblemConfig};
use crate::error::CliError;
use crate::output::{optional, real, summary_bytes, table_bytes, trace_bytes, write_file, SummaryRow};

/// One finished (or diverged) optimizer run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub name: String,
    pub seed: u64,
    pub trace: Vec<TraceRow>,
    pub diverged_at: Option<u64>,
}

impl RunRecord {
    pub fn diverged(&self) -> bool {
        self.diverged_at.is_some()
    }

    pub fn final_loss(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |r| r.loss)
    }

    /// Smallest finite loss in the trace.
    pub fn best_loss(&self) -> f64 {
        self.trace
            .iter()
            .map(|r| r.loss)
            .filter(|l| l.is_finite())
            .fold(f64::NAN, f64::min)
    }

    /// First step whose loss is at or below `threshold`.
    pub fn steps_to(&self, threshold: f64) -> Option<u64> {
        self.trace.iter().find(|r| r.loss <= threshold).map(|r| r.step)
    }

    /// Fraction of logged α vectors lying entirely in `[0, 1]`.
    pub fn alpha_in_unit_fraction(&self) -> Option<f64> {
        let logged: Vec<&Vec<f64>> = self.trace.iter().filter_map(|r| r.alpha.as_ref()).collect();
        if logged.is_empty() {
            return None;
        }
        let inside = logged.iter().filter(|a| a.iter().all(|v| (0.0..=1.0).contains(v))).count();
        Some(inside as f64 / logged.len() as f64)
    }

    pub fn iterates(&self) -> Vec<Vector> {
        self.trace
            .iter()
            .filter_map(|r| r.iterate.clone())
            .map(|x| Vector::new(x).unwrap_or_else(|_| Vector::zeros(1)))
            .collect()
    }

    pub fn file_stem(&self) -> String {
        format!("{}_seed{}", self.name, self.seed)
    }
}

/// Runs one optimizer, recording divergence instead of failing on it.
pub fn execute(
    name: &str,
    problem: &dyn Problem,
    spec: &OptimizerSpec,
    schedule: &StepSchedule,
    settings: RunSettings,
    start: Start,
) -> Result<RunRecord, CliError> {
    match run_with(problem, spec, schedule, settings, start) {
        Ok(run) => Ok(RunRecord {
            name: name.to_string(),
            seed: settings.seed,
            trace: run.trace,
            diverged_at: None,
        }),
        Err(RunError::Diverged { step, trace, .. }) => Ok(RunRecord {
            name: name.to_string(),
            seed: settings.seed,
            trace,
            diverged_at: Some(step),
        }),
        Err(RunError::Invalid(e)) => Err(e.into()),
    }
}

fn collect<T: Send, F>(parallel: bool, jobs: usize, f: F) -> Result<Vec<T>, CliError>
where
    F: Fn(usize) -> Result<T, CliError> + Sync + Send,
{
    // Results come back in job order either way.
    if parallel {
        (0..jobs).into_par_iter().map(f).collect()
    } else {
        (0..jobs).map(f).collect()
    }
}

// ---------------------------------------------------------------- compare

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub runs: Vec<RunRecord>,
    pub summary: Vec<SummaryRow>,
    pub threshold: f64,
    /// Fitted `(xi_hat, d0_hat)` per run on quadratic problems.
    pub rates: Vec<Option<(f64, f64)>>,
    pub log_iterates: bool,
}

impl CompareReport {
    pub fn all_diverged(&self) -> bool {
        !self.runs.is_empty() && self.runs.iter().all(RunRecord::diverged)
    }

    pub fn run(&self, name: &str, seed: u64) -> Option<&RunRecord> {
        self.runs.iter().find(|r| r.name == name && r.seed == seed)
    }

    pub fn summary_row(&self, name: &str, seed: u64) -> Option<&SummaryRow> {
        self.summary.iter().find(|r| r.name == name && r.seed == seed)
    }
}

/// `factor × best`, widened symmetrically when the best loss is negative.
fn threshold_for(best: f64, factor: f64) -> f64 {
    best + (factor - 1.0) * best.abs()
}

/// Every (optimizer, seed) pair, in declared order.
pub fn run_compare(cfg: &ExperimentConfig) -> Result<CompareReport, CliError> {
    if cfg.optimizers.is_empty() {
        return Err(CliError::Config("optimizers: need at least one optimizer".into()));
    }
    let problem = cfg.build_problem()?;
    let quadratic = match cfg.problem {
        ProblemConfig::Quadratic { .. } => Some(cfg.quadratic()?),
        _ => None,
    };
    let base_schedule = cfg.schedule()?;
    let mut jobs = Vec::new();
    for opt in &cfg.optimizers {
        let spec = opt.spec()?;
        let schedule = base_schedule.with_beta0(opt.beta0())?;
        for &seed in &cfg.seeds {
            jobs.push((opt.name.clone(), spec.clone(), schedule.clone(), seed));
        }
    }
    let log = cfg.log_iterates || quadratic.is_some();
    let runs = collect(cfg.parallel, jobs.len(), |i| {
        let (name, spec, schedule, seed) = &jobs[i];
        let settings = RunSettings::new(cfg.total_steps(), cfg.batch_size, *seed).log_iterates(log);
        execute(name, problem.as_ref(), spec, schedule, settings, Start::Fresh)
    })?;

    let best = runs
        .iter()
        .filter(|r| !r.diverged())
        .map(RunRecord::best_loss)
        .fold(f64::NAN, f64::min);
    let threshold = threshold_for(best, cfg.threshold_factor);
    let summary = runs
        .iter()
        .map(|r| SummaryRow {
            name: r.name.clone(),
            seed: r.seed,
            final_loss: r.final_loss(),
            best_loss: r.best_loss(),
            steps_to_threshold: r.steps_to(threshold),
            diverged: r.diverged(),
            alpha_in_unit_fraction: r.alpha_in_unit_fraction(),
        })
        .collect();
    let rates = runs
        .iter()
        .map(|r| {
            let q = quadratic.as_ref()?;
            if r.diverged() {
                return None;
            }
            let x0 = problem.initial_point(r.seed);
            let distances: Vec<f64> = std::iter::once(q.distance(&x0))
                .chain(r.iterates().iter().map(|x| q.distance(x)))
                .collect();
            fit_rate(&distances).ok().map(|f| (f.xi_hat, f.d0_hat))
        })
        .collect();
    Ok(CompareReport {
        runs,
        summary,
        threshold,
        rates,
        log_iterates: cfg.log_iterates,
    })
}

/// Like [`run_compare`] but for a config holding exactly one optimizer.
pub fn run_single(cfg: &ExperimentConfig) -> Result<CompareReport, CliError> {
    if cfg.optimizers.len() != 1 {
        return Err(CliError::Config(format!(
            "optimizers: `run` takes exactly one optimizer, found {}; use `compare`",
            cfg.optimizers.len()
        )));
    }
    run_compare(cfg)
}

pub fn write_compare(report: &CompareReport, out: &Path) -> Result<(), CliError> {
    for run in &report.runs {
        write_file(
            &out.join("traces").join(format!("{}.csv", run.file_stem())),
            &trace_bytes(&run.trace, report.log_iterates)?,
        )?;
    }
    write_file(&out.join("summary.csv"), &summary_bytes(&report.summary)?)?;
    if report.rates.iter().any(Option::is_some) {
        let rows = report.runs.iter().zip(&report.rates).map(|(r, rate)| {
            vec![
                r.name.clone(),
                r.seed.to_string(),
                optional(rate.map(|(xi, _)| real(xi))),
                optional(rate.map(|(_, d0)| real(d0))),
            ]
        });
        write_file(&out.join("rates.csv"), &table_bytes(&["name", "seed", "xi_hat", "d0_hat"], rows)?)?;
    }
    Ok(())
}

pub fn describe_compare(report: &CompareReport) -> String {
    let mut s = format!("threshold loss {:.6e}\n", report.threshold);
    for row in &report.summary {
        let _ = writeln!(
            s,
            "{:<24} seed {:<4} final {:.6e}  best {:.6e}  to-threshold {:>6}  {}",
            row.name,
            row.seed,
            row.final_loss,
            row.best_loss,
            optional(row.steps_to_threshold),
            if row.diverged { "DIVERGED" } else { "" }
        );
    }
    s
}

// ---------------------------------------------------------------- toy

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToyMethod {
    Momentum,
    Interpolatron,
}

impl ToyMethod {
    pub fn name(self) -> &'static str {
        match self {
            ToyMethod::Momentum => "momentum",
            ToyMethod::Interpolatron => "interpolatron",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToyRecord {
    pub beta: f64,
    pub tau: f64,
    pub alpha1: f64,
    pub method: ToyMethod,
    /// The step size the method actually ran with.
    pub step_size: f64,
    /// Positions after each step, the optional warm-up step (always taken
    /// with the grid β) included.
    pub trajectory: Vec<f64>,
    pub escape_steps: Option<usize>,
    pub max_excursion: f64,
    /// Distance from the well centre grows at every step.
    pub monotone: bool,
    pub run: RunRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToyReport {
    pub landscape: ToyLandscape,
    /// Momentum and interpolatron records for each grid point, in that order.
    pub points: Vec<(ToyRecord, ToyRecord)>,
    pub log_iterates: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToyLandscape {
    Escape,
    Well,
}

fn median(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    Some(if n % 2 == 1 { xs[n / 2] } else { 0.5 * (xs[n / 2 - 1] + xs[n / 2]) })
}

impl ToyReport {
    pub fn records(&self) -> impl Iterator<Item = &ToyRecord> {
        self.points.iter().flat_map(|(m, i)| [m, i])
    }

    /// Median escape steps over the runs that escape.
    pub fn median_escape(&self, method: ToyMethod) -> Option<f64> {
        median(
            self.records()
                .filter(|r| r.method == method)
                .filter_map(|r| r.escape_steps.map(|s| s as f64))
                .collect(),
        )
    }

    /// Among points where momentum escapes, the fraction where the
    /// interpolation run escapes too.
    pub fn escape_coverage(&self) -> Option<f64> {
        let both: Vec<bool> = self
            .points
            .iter()
            .filter(|(m, _)| m.escape_steps.is_some())
            .map(|(_, i)| i.escape_steps.is_some())
            .collect();
        (!both.is_empty()).then(|| both.iter().filter(|&&b| b).count() as f64 / both.len() as f64)
    }

    /// Fraction of points where interpolation escapes in strictly fewer
    /// steps (escape landscape) or strays strictly less far (well).
    pub fn interpolatron_better_fraction(&self) -> f64 {
        let better = self
            .points
            .iter()
            .filter(|(m, i)| match self.landscape {
                ToyLandscape::Escape => match (m.escape_steps, i.escape_steps) {
                    (_, None) => false,
                    (None, Some(_)) => true,
                    (Some(a), Some(b)) => b < a,
                },
                ToyLandscape::Well => i.max_excursion < m.max_excursion,
            })
            .count();
        better as f64 / self.points.len().max(1) as f64
    }

    /// The point closest to the reference counts: escape steps (29, 4), or a
    /// momentum position of 50.441 after 8 steps on the well.
    pub fn best_reproduction(&self) -> Option<&(ToyRecord, ToyRecord)> {
        let score = |(m, i): &(ToyRecord, ToyRecord)| -> Option<f64> {
            match self.landscape {
                ToyLandscape::Escape => {
                    Some((m.escape_steps? as f64 - 29.0).abs() + (i.escape_steps? as f64 - 4.0).abs())
                }
                ToyLandscape::Well => m.trajectory.get(7).map(|x| (x - 50.441).abs()),
            }
        };
        self.points
            .iter()
            .filter_map(|p| score(p).map(|s| (s, p)))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, p)| p)
    }
}

fn toy_run(
    cfg: &ExperimentConfig,
    problem: &PiecewiseProblem,
    landscape: ToyLandscape,
    method: ToyMethod,
    (beta, tau, alpha1): (f64, f64, f64),
) -> Result<ToyRecord, CliError> {
    let toy = cfg.toy.as_ref().expect("checked by caller");
    let (spec, step_size) = match method {
        ToyMethod::Momentum => {
            let step = match toy.beta_matching {
                BetaMatching::Drift => beta * (1.0 - tau),
                BetaMatching::Same => beta,
            };
            (OptimizerSpec::momentum(tau)?, step)
        }
        ToyMethod::Interpolatron => (OptimizerSpec::interpolatron(vec![alpha1, 1.0 - alpha1])?, beta),
    };
    let schedule = StepSchedule::constant(step_size)?;
    let max_steps = toy.max_steps.expect("resolved");
    let warm = toy.sgd_first_step.expect("resolved");
    let name = format!("{}_b{beta}_t{tau}_a{alpha1}", method.name());

    let start = Vector::new(vec![problem.start])?;
    let (run_start, run_steps, mut trajectory) = if warm {
        // The warm-up step uses the grid β so both methods leave the same point.
        let g = problem.full_gradient(&start);
        let x0 = start.sub_scaled(&g, beta);
        let history = HistoryWindow::replicate(&start, &g, spec.window_len())?;
        let first = x0[0];
        (Start::Explicit { x0, history }, max_steps - 1, vec![first])
    } else {
        (Start::Fresh, max_steps, Vec::new())
    };
    let run = if run_steps == 0 {
        RunRecord {
            name,
            seed: 0,
            trace: Vec::new(),
            diverged_at: None,
        }
    } else {
        let settings = RunSettings::new(run_steps, 1, 0).log_iterates(true);
        execute(&name, problem, &spec, &schedule, settings, run_start)?
    };
    trajectory.extend(run.trace.iter().filter_map(|r| r.iterate.as_ref().map(|x| x[0])));

    let f = &problem.function;
    let (center, region) = match landscape {
        ToyLandscape::Escape => (0.0, (f.breakpoints()[0], f.breakpoints()[1])),
        ToyLandscape::Well => (f.breakpoints()[1], (f.breakpoints()[0], f.breakpoints()[2])),
    };
    let monotone = std::iter::once(problem.start)
        .chain(trajectory.iter().copied())
        .map(|x| (x - center).abs())
        .collect::<Vec<_>>()
        .windows(2)
        .all(|w| w[1] > w[0]);
    Ok(ToyRecord {
        beta,
        tau,
        alpha1,
        method,
        step_size,
        escape_steps: match landscape {
            ToyLandscape::Escape => escape_steps(f, &trajectory, region),
            ToyLandscape::Well => None,
        },
        max_excursion: max_excursion(&trajectory, center),
        monotone,
        trajectory,
        run,
    })
}

pub fn run_toy(cfg: &ExperimentConfig) -> Result<ToyReport, CliError> {
    let toy = cfg
        .toy
        .as_ref()
        .ok_or_else(|| CliError::Config("toy: missing [toy] section".into()))?;
    let landscape = match cfg.problem {
        ProblemConfig::Fig2 { .. } => ToyLandscape::Escape,
        ProblemConfig::Fig3 { .. } => ToyLandscape::Well,
        _ => return Err(CliError::Config("problem.kind: toy runs need fig2 or fig3".into())),
    };
    let problem = cfg.piecewise()?;
    let mut grid = Vec::new();
    for &beta in &toy.betas {
        for &tau in &toy.taus {
            for &alpha1 in &toy.alpha1s {
                grid.push((beta, tau, alpha1));
            }
        }
    }
    let points = collect(cfg.parallel, grid.len(), |i| {
        Ok((
            toy_run(cfg, &problem, landscape, ToyMethod::Momentum, grid[i])?,
            toy_run(cfg, &problem, landscape, ToyMethod::Interpolatron, grid[i])?,
        ))
    })?;
    Ok(ToyReport {
        landscape,
        points,
        log_iterates: cfg.log_iterates,
    })
}

pub fn write_toy(report: &ToyReport, out: &Path) -> Result<(), CliError> {
    let header = [
        "beta",
        "tau",
        "alpha1",
        "method",
        "step_size",
        "escape_steps",
        "max_excursion",
        "monotone",
        "final_x",
    ];
    let rows = report.records().map(|r| {
        vec![
            real(r.beta),
            real(r.tau),
            real(r.alpha1),
            r.method.name().to_string(),
            real(r.step_size),
            optional(r.escape_steps),
            real(r.max_excursion),
            r.monotone.to_string(),
            optional(r.trajectory.last().map(|x| real(*x))),
        ]
    });
    write_file(&out.join("toy.csv"), &table_bytes(&header, rows)?)?;
    for r in report.records() {
        write_file(
            &out.join("traces").join(format!("{}.csv", r.run.name)),
            &trace_bytes(&r.run.trace, report.log_iterates)?,
        )?;
    }
    write_file(&out.join("report.txt"), describe_toy(report).as_bytes())
}

pub fn describe_toy(report: &ToyReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "grid points: {}", report.points.len());
    let _ = writeln!(
        s,
        "interpolatron better at {:.1}% of points",
        100.0 * report.interpolatron_better_fraction()
    );
    match report.landscape {
        ToyLandscape::Escape => {
            let _ = writeln!(
                s,
                "median escape steps: momentum {}, interpolatron {}",
                optional(report.median_escape(ToyMethod::Momentum)),
                optional(report.median_escape(ToyMethod::Interpolatron))
            );
            let _ = writeln!(
                s,
                "interpolatron escapes at {} of the points where momentum escapes",
                optional(report.escape_coverage().map(|c| format!("{:.1}%", 100.0 * c)))
            );
        }
        ToyLandscape::Well => {
            let never_returns = report.points.iter().filter(|(m, _)| m.monotone).count();
            let _ = writeln!(s, "momentum never returns at {never_returns} point(s)");
        }
    }
    if let Some((m, i)) = report.best_reproduction() {
        let _ = writeln!(
            s,
            "closest to the reference numbers: beta {} tau {} alpha1 {}: momentum {} / interpolatron {}",
            m.beta,
            m.tau,
            m.alpha1,
            toy_headline(report.landscape, m),
            toy_headline(report.landscape, i)
        );
    }
    s
}

fn toy_headline(landscape: ToyLandscape, r: &ToyRecord) -> String {
    match landscape {
        ToyLandscape::Escape => format!("{} steps", optional(r.escape_steps)),
        ToyLandscape::Well => format!(
            "x2 = {} x8 = {}",
            optional(r.trajectory.get(1).map(|x| format!("{x:.3}"))),
            optional(r.trajectory.get(7).map(|x| format!("{x:.3}")))
        ),
    }
}

// ---------------------------------------------------------------- sweep

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub betas: Vec<f64>,
    pub alpha1s: Vec<f64>,
    /// Runs ordered by β, then α_1, then seed.
    pub runs: Vec<(f64, f64, RunRecord)>,
    pub log_iterates: bool,
}

impl SweepReport {
    /// Seed-averaged final loss per `(β, α_1)` cell; NaN if any seed diverged.
    pub fn mean_final_loss(&self, beta: f64, alpha1: f64) -> f64 {
        let cell: Vec<&RunRecord> = self
            .runs
            .iter()
            .filter(|(b, a, _)| *b == beta && *a == alpha1)
            .map(|(_, _, r)| r)
            .collect();
        if cell.iter().any(|r| r.diverged()) {
            return f64::NAN;
        }
        cell.iter().map(|r| r.final_loss()).sum::<f64>() / cell.len() as f64
    }

    fn spread(values: impl Iterator<Item = f64>) -> f64 {
        let v: Vec<f64> = values.collect();
        if v.iter().any(|x| x.is_nan()) {
            return f64::NAN;
        }
        v.iter().copied().fold(f64::NEG_INFINITY, f64::max) - v.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Mean over β of the final-loss range across α_1.
    pub fn alpha_spread(&self) -> f64 {
        let total: f64 = self
            .betas
            .iter()
            .map(|&b| Self::spread(self.alpha1s.iter().map(|&a| self.mean_final_loss(b, a))))
            .sum();
        total / self.betas.len() as f64
    }

    /// Mean over α_1 of the final-loss range across β.
    pub fn beta_spread(&self) -> f64 {
        let total: f64 = self
            .alpha1s
            .iter()
            .map(|&a| Self::spread(self.betas.iter().map(|&b| self.mean_final_loss(b, a))))
            .sum();
        total / self.alpha1s.len() as f64
    }
}

pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepReport, CliError> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("sweep: missing [sweep] section".into()))?;
    let problem = cfg.build_problem()?;
    let base = cfg.schedule()?;
    let mut jobs = Vec::new();
    for &beta in &sweep.betas {
        for &alpha1 in &sweep.alpha1s {
            for &seed in &cfg.seeds {
                jobs.push((beta, alpha1, seed));
            }
        }
    }
    let runs = collect(cfg.parallel, jobs.len(), |i| {
        let (beta, alpha1, seed) = jobs[i];
        let spec = OptimizerSpec::interpolatron(vec![alpha1, 1.0 - alpha1])?;
        let settings = RunSettings::new(cfg.total_steps(), cfg.batch_size, seed).log_iterates(cfg.log_iterates);
        let name = format!("interpolatron_b{beta}_a{alpha1}");
        let run = execute(&name, problem.as_ref(), &spec, &base.with_beta0(beta)?, settings, Start::Fresh)?;
        Ok((beta, alpha1, run))
    })?;
    Ok(SweepReport {
        betas: sweep.betas.clone(),
        alpha1s: sweep.alpha1s.clone(),
        runs,
        log_iterates: cfg.log_iterates,
    })
}

pub fn write_sweep(report: &SweepReport, out: &Path) -> Result<(), CliError> {
    let rows = report.runs.iter().map(|(b, a, r)| {
        vec![
            real(*b),
            real(*a),
            r.seed.to_string(),
            real(r.final_loss()),
            r.diverged().to_string(),
        ]
    });
    write_file(
        &out.join("sweep.csv"),
        &table_bytes(&["beta", "alpha1", "seed", "final_loss", "diverged"], rows)?,
    )?;
    for (_, _, r) in &report.runs {
        write_file(
            &out.join("traces").join(format!("{}.csv", r.file_stem())),
            &trace_bytes(&r.trace, report.log_iterates)?,
        )?;
    }
    write_file(&out.join("report.txt"), describe_sweep(report).as_bytes())
}

pub fn describe_sweep(report: &SweepReport) -> String {
    let mut s = String::from("mean final loss (rows beta, columns alpha1)\n");
    for &b in &report.betas {
        let _ = write!(s, "{b:<8}");
        for &a in &report.alpha1s {
            let _ = write!(s, " {:.6e}", report.mean_final_loss(b, a));
        }
        s.push('\n');
    }
    let _ = writeln!(s, "spread across alpha1 at fixed beta: {:.6e}", report.alpha_spread());
    let _ = writeln!(s, "spread across beta at fixed alpha1: {:.6e}", report.beta_spread());
    s
}

// ---------------------------------------------------------------- certify

#[derive(Debug, Clone, PartialEq)]
pub struct CertifyReport {
    pub settings: CertifyConfig,
    pub theta: f64,
    /// `Err` carries the reason no certificate was issued.
    pub certificate: Result<RateCertificate, String>,
    pub fit: Option<RateFit>,
    /// `‖x^{(t)} − x*‖` for `t = 0, 1, …`.
    pub distances: Vec<f64>,
    pub run: RunRecord,
    pub log_iterates: bool,
}

impl CertifyReport {
    pub fn rate_ok(&self) -> bool {
        match (&self.certificate, &self.fit) {
            (Ok(c), Some(f)) => f.xi_hat <= c.spectral_radius + self.settings.tolerance,
            _ => false,
        }
    }

    /// `d_t ≤ (1 + slack) · d0_hat · xi_hat^t` across the fit window.
    pub fn envelope_ok(&self) -> bool {
        let Some(f) = &self.fit else { return false };
        f.window
            .clone()
            .all(|t| self.distances[t] <= (1.0 + self.settings.slack) * f.predict(t))
    }

    pub fn passed(&self) -> bool {
        self.certificate.is_ok() && self.rate_ok() && self.envelope_ok()
    }
}

pub fn run_certify(cfg: &ExperimentConfig) -> Result<CertifyReport, CliError> {
    let q = cfg.quadratic()?;
    let mut settings = cfg.certify.clone().unwrap_or(CertifyConfig {
        alphas: vec![0.5, 0.5],
        beta: None,
        tolerance: 0.02,
        slack: 0.05,
    });
    let beta = *settings.beta.get_or_insert(cfg.schedule.beta0);
    let alphas = MixingCoefficients::interpolation(settings.alphas.clone())?;
    let theta = interpolatron::theory::theta(beta, q.mu(), q.eta());
    let companion = CompanionSpec::new(alphas.clone(), beta, q.diag_hessian().to_vec())?;
    let certificate = match certify(&companion, q.mu(), q.eta()) {
        Ok(c) => Ok(c),
        Err(interpolatron::Error::NoCertificate { theta }) => Err(format!(
            "no certificate: theta = {theta} >= 1, so the contraction hypothesis fails"
        )),
        Err(e) => Err(e.to_string()),
    };

    let spec = OptimizerSpec::interpolatron(settings.alphas.clone())?;
    let run_settings = RunSettings::new(cfg.total_steps(), usize::MAX, cfg.seeds[0]).log_iterates(true);
    let run = execute(
        "interpolatron",
        &q,
        &spec,
        &StepSchedule::constant(beta)?,
        run_settings,
        Start::Fresh,
    )?;
    let distances: Vec<f64> = std::iter::once(q.distance(q.start()))
        .chain(run.iterates().iter().map(|x| q.distance(x)))
        .collect();
    let fit = fit_rate(&distances).ok();
    Ok(CertifyReport {
        settings,
        theta,
        certificate,
        fit,
        distances,
        run,
        log_iterates: cfg.log_iterates,
    })
}

pub fn write_certify(report: &CertifyReport, out: &Path) -> Result<(), CliError> {
    let cert = report.certificate.as_ref().ok();
    let fit = report.fit.as_ref();
    let header = [
        "theta",
        "spectral_radius",
        "xi",
        "d0",
        "xi_hat",
        "d0_hat",
        "fit_start",
        "fit_end",
        "rate_ok",
        "envelope_ok",
        "certified",
    ];
    let row = vec![
        real(report.theta),
        optional(cert.map(|c| real(c.spectral_radius))),
        optional(cert.map(|c| real(c.xi))),
        optional(cert.map(|c| real(c.d0))),
        optional(fit.map(|f| real(f.xi_hat))),
        optional(fit.map(|f| real(f.d0_hat))),
        optional(fit.map(|f| f.window.start)),
        optional(fit.map(|f| f.window.end)),
        report.rate_ok().to_string(),
        report.envelope_ok().to_string(),
        cert.is_some().to_string(),
    ];
    write_file(&out.join("certificate.csv"), &table_bytes(&header, [row])?)?;
    let rows = report
        .distances
        .iter()
        .enumerate()
        .map(|(t, d)| vec![t.to_string(), real(*d)]);
    write_file(&out.join("distances.csv"), &table_bytes(&["step", "distance"], rows)?)?;
    write_file(
        &out.join("traces").join(format!("{}.csv", report.run.file_stem())),
        &trace_bytes(&report.run.trace, report.log_iterates)?,
    )?;
    write_file(&out.join("report.txt"), describe_certify(report).as_bytes())
}

pub fn describe_certify(report: &CertifyReport) -> String {
    let mut s = format!("theta = {:.6}\n", report.theta);
    match &report.certificate {
        Ok(c) => {
            let _ = writeln!(
                s,
                "certified: spectral radius {:.6}, xi {:.6}, d0 {:.6e}",
                c.spectral_radius, c.xi, c.d0
            );
        }
        Err(reason) => {
            let _ = writeln!(s, "{reason}");
        }
    }
    match &report.fit {
        Some(f) => {
            let _ = writeln!(
                s,
                "fitted rate {:.6} (d0_hat {:.6e}) over steps {}..{}",
                f.xi_hat, f.d0_hat, f.window.start, f.window.end
            );
        }
        None => s.push_str("no rate fit (too few usable distances)\n"),
    }
    let _ = writeln!(
        s,
        "rate check {}, envelope check {}",
        if report.rate_ok() { "pass" } else { "fail" },
        if report.envelope_ok() { "pass" } else { "fail" }
    );
    s
}
