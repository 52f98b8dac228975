//! Experiment configuration: a TOML document parsed, validated and then
//! echoed back with every default filled in.

use interpolatron::anderson::DEFAULT_RIDGE;
use interpolatron::nets::{MlpArchitecture, MlpBlobsProblem};
use interpolatron::optim::{Method, DEFAULT_ADAM_BETAS, DEFAULT_ADAM_EPS};
use interpolatron::problems::{
    make_blobs, make_fig2_function, make_fig3_function, PiecewiseProblem, QuadraticProblem, FIG2_FLAT_SLOPE,
    FIG2_FLAT_WIDTH, FIG2_SHEER_SLOPE, FIG2_START, FIG3_OUTER_SLOPE, FIG3_START, FIG3_WELL_SLOPE, FIG3_WELL_WIDTH,
};
use interpolatron::rng::{self, derive_seed};
use interpolatron::{
    steps_per_epoch, HistoryInit, MixingCoefficients, OptimizerKind, OptimizerSpec, Problem, StepSchedule, Vector,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Total optimizer steps; derived from `epochs` when omitted.
    pub steps: Option<u64>,
    pub epochs: Option<u64>,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default)]
    pub log_iterates: bool,
    /// A run reaches the threshold once its loss is within this factor of
    /// the best loss seen across the comparison.
    #[serde(default = "default_threshold_factor")]
    pub threshold_factor: f64,
    #[serde(default = "default_true")]
    pub parallel: bool,
    pub problem: ProblemConfig,
    pub schedule: ScheduleConfig,
    #[serde(default)]
    pub optimizers: Vec<OptimizerConfig>,
    pub toy: Option<ToyConfig>,
    pub sweep: Option<SweepConfig>,
    pub certify: Option<CertifyConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProblemConfig {
    Quadratic {
        #[serde(default = "default_mu")]
        mu: f64,
        #[serde(default = "default_eta")]
        eta: f64,
        #[serde(default = "default_quadratic_dim")]
        dim: usize,
        #[serde(default)]
        data_seed: u64,
    },
    Fig2 {
        #[serde(default = "default_flat_width")]
        flat_width: f64,
        #[serde(default = "default_flat_slope")]
        flat_slope: f64,
        #[serde(default = "default_sheer_slope")]
        sheer_slope: f64,
        #[serde(default = "default_fig2_start")]
        start: f64,
    },
    Fig3 {
        #[serde(default = "default_well_width")]
        well_width: f64,
        #[serde(default = "default_well_slope")]
        well_slope: f64,
        #[serde(default = "default_outer_slope")]
        outer_slope: f64,
        #[serde(default = "default_fig3_start")]
        start: f64,
    },
    MlpBlobs {
        #[serde(default = "default_layer_widths")]
        layer_widths: Vec<usize>,
        #[serde(default = "default_weight_decay")]
        weight_decay: f64,
        #[serde(default = "default_train_size")]
        train_size: usize,
        #[serde(default = "default_eval_size")]
        eval_size: usize,
        #[serde(default = "default_spread")]
        spread: f64,
        #[serde(default)]
        data_seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub beta0: f64,
    #[serde(default)]
    pub decay_epochs: Vec<u64>,
    #[serde(default = "default_decay_factor")]
    pub factor: f64,
}

/// One named optimizer. Only the fields its kind uses may be set; the
/// resolved form carries every one of them explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub name: String,
    pub kind: String,
    /// Overrides the schedule's initial step size for this optimizer.
    pub beta0: Option<f64>,
    pub tau: Option<f64>,
    pub alphas: Option<Vec<f64>>,
    pub k: Option<usize>,
    pub ridge: Option<f64>,
    pub adam_betas: Option<[f64; 2]>,
    pub adam_eps: Option<f64>,
    pub history_init: Option<HistoryInit>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BetaMatching {
    /// Momentum runs at `β(1 − τ)` so its drift under a constant gradient
    /// equals the grid `β`.
    Drift,
    /// Momentum runs at the grid `β` itself.
    Same,
}

/// Grid for the one-dimensional dynamics experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToyConfig {
    #[serde(default = "default_grid_betas")]
    pub betas: Vec<f64>,
    #[serde(default = "default_taus")]
    pub taus: Vec<f64>,
    #[serde(default = "default_alpha1s")]
    pub alpha1s: Vec<f64>,
    #[serde(default = "default_beta_matching")]
    pub beta_matching: BetaMatching,
    /// Defaults to 200 on the escape landscape and 8 on the well.
    pub max_steps: Option<u64>,
    /// Take one plain gradient step from `start` before either method runs.
    /// Defaults to false on the escape landscape and true on the well.
    pub sgd_first_step: Option<bool>,
}

/// Interpolatron `α = (α_1, 1 − α_1)` over a `β × α_1` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_grid_betas")]
    pub betas: Vec<f64>,
    #[serde(default = "default_alpha1s")]
    pub alpha1s: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifyConfig {
    #[serde(default = "default_certify_alphas")]
    pub alphas: Vec<f64>,
    /// Constant step size; defaults to the schedule's `beta0`.
    pub beta: Option<f64>,
    /// Allowed excess of the fitted rate over the spectral radius.
    #[serde(default = "default_rate_tolerance")]
    pub tolerance: f64,
    /// Relative slack on the fitted envelope `d0_hat · xi_hat^t`.
    #[serde(default = "default_envelope_slack")]
    pub slack: f64,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}
fn default_batch_size() -> usize {
    32
}
fn default_threshold_factor() -> f64 {
    1.05
}
fn default_true() -> bool {
    true
}
fn default_mu() -> f64 {
    0.1
}
fn default_eta() -> f64 {
    1.0
}
fn default_quadratic_dim() -> usize {
    10
}
fn default_flat_width() -> f64 {
    FIG2_FLAT_WIDTH
}
fn default_flat_slope() -> f64 {
    FIG2_FLAT_SLOPE
}
fn default_sheer_slope() -> f64 {
    FIG2_SHEER_SLOPE
}
fn default_fig2_start() -> f64 {
    FIG2_START
}
fn default_well_width() -> f64 {
    FIG3_WELL_WIDTH
}
fn default_well_slope() -> f64 {
    FIG3_WELL_SLOPE
}
fn default_outer_slope() -> f64 {
    FIG3_OUTER_SLOPE
}
fn default_fig3_start() -> f64 {
    FIG3_START
}
fn default_layer_widths() -> Vec<usize> {
    vec![4, 16, 3]
}
fn default_weight_decay() -> f64 {
    2e-4
}
fn default_train_size() -> usize {
    300
}
fn default_eval_size() -> usize {
    150
}
fn default_spread() -> f64 {
    1.0
}
fn default_decay_factor() -> f64 {
    0.1
}
fn default_grid_betas() -> Vec<f64> {
    vec![0.05, 0.1, 0.25]
}
fn default_taus() -> Vec<f64> {
    vec![0.9]
}
fn default_alpha1s() -> Vec<f64> {
    vec![0.05, 0.1, 0.25, 0.5]
}
fn default_beta_matching() -> BetaMatching {
    BetaMatching::Drift
}
fn default_certify_alphas() -> Vec<f64> {
    vec![0.5, 0.5]
}
fn default_rate_tolerance() -> f64 {
    0.02
}
fn default_envelope_slack() -> f64 {
    0.05
}

const DEFAULT_TAU: f64 = 0.9;
const DEFAULT_ANDERSON_K: usize = 2;

fn bad(key: impl Into<String>, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{}: {reason}", key.into()))
}

/// Parses, validates and materialises defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let mut cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    cfg.resolve()?;
    Ok(cfg)
}

impl ExperimentConfig {
    fn resolve(&mut self) -> Result<(), CliError> {
        if self.name.trim().is_empty() {
            return Err(bad("name", "must not be empty"));
        }
        if self.seeds.is_empty() {
            return Err(bad("seeds", "need at least one seed"));
        }
        if self.batch_size == 0 {
            return Err(bad("batch_size", "must be positive"));
        }
        if !(self.threshold_factor >= 1.0 && self.threshold_factor.is_finite()) {
            return Err(bad("threshold_factor", "must be at least 1"));
        }
        self.schedule()?;
        self.validate_problem()?;

        let per_epoch = self.steps_per_epoch();
        match (self.steps, self.epochs) {
            (None, None) => return Err(bad("steps", "set `steps` or `epochs`")),
            (Some(0), _) => return Err(bad("steps", "must be positive")),
            (_, Some(0)) => return Err(bad("epochs", "must be positive")),
            (Some(s), Some(e)) if s != e * per_epoch => {
                return Err(bad("steps", format!("{s} disagrees with {e} epochs of {per_epoch} steps")))
            }
            (None, Some(e)) => self.steps = Some(e * per_epoch),
            (Some(s), None) => self.epochs = Some(s.div_ceil(per_epoch)),
            _ => {}
        }

        let mut names = std::collections::HashSet::new();
        let beta0 = self.schedule.beta0;
        for (i, opt) in self.optimizers.iter_mut().enumerate() {
            if !names.insert(opt.name.clone()) {
                return Err(bad(format!("optimizers[{i}].name"), format!("duplicate name `{}`", opt.name)));
            }
            opt.resolve(i, beta0)?;
        }

        let is_fig2 = matches!(self.problem, ProblemConfig::Fig2 { .. });
        if let Some(toy) = &mut self.toy {
            for (key, grid) in [("toy.betas", &toy.betas), ("toy.taus", &toy.taus), ("toy.alpha1s", &toy.alpha1s)] {
                if grid.is_empty() {
                    return Err(bad(key, "grid must not be empty"));
                }
            }
            if toy.betas.iter().any(|b| b.is_nan() || *b <= 0.0) {
                return Err(bad("toy.betas", "must be positive"));
            }
            if toy.taus.iter().any(|t| !(0.0..1.0).contains(t)) {
                return Err(bad("toy.taus", "must lie in [0, 1)"));
            }
            if toy.alpha1s.iter().any(|a| !(0.0..=1.0).contains(a)) {
                return Err(bad("toy.alpha1s", "must lie in [0, 1]"));
            }
            toy.max_steps.get_or_insert(if is_fig2 { 200 } else { 8 });
            toy.sgd_first_step.get_or_insert(!is_fig2);
            if toy.max_steps == Some(0) {
                return Err(bad("toy.max_steps", "must be positive"));
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.betas.is_empty() || sweep.betas.iter().any(|b| b.is_nan() || *b <= 0.0) {
                return Err(bad("sweep.betas", "need positive step sizes"));
            }
            if sweep.alpha1s.is_empty() || sweep.alpha1s.iter().any(|a| !(0.0..=1.0).contains(a)) {
                return Err(bad("sweep.alpha1s", "need values in [0, 1]"));
            }
        }
        if let Some(c) = &mut self.certify {
            MixingCoefficients::interpolation(c.alphas.clone()).map_err(|e| bad("certify.alphas", e))?;
            let beta = *c.beta.get_or_insert(self.schedule.beta0);
            if !(beta > 0.0 && beta.is_finite()) {
                return Err(bad("certify.beta", "must be positive"));
            }
            if !(c.tolerance >= 0.0 && c.slack >= 0.0) {
                return Err(bad("certify.tolerance", "tolerance and slack must be nonnegative"));
            }
        }
        Ok(())
    }

    fn validate_problem(&self) -> Result<(), CliError> {
        match &self.problem {
            ProblemConfig::Quadratic { mu, eta, dim, .. } => {
                QuadraticProblem::log_spaced(*mu, *eta, *dim).map_err(|e| bad("problem", e))?;
            }
            ProblemConfig::Fig2 { .. } | ProblemConfig::Fig3 { .. } => {
                self.piecewise().map_err(|e| bad("problem", e))?;
            }
            ProblemConfig::MlpBlobs {
                layer_widths,
                train_size,
                eval_size,
                ..
            } => {
                let classes = *layer_widths.last().unwrap_or(&0);
                if classes > 0 && (train_size % classes != 0 || eval_size % classes != 0) {
                    return Err(bad("problem.train_size", "train and eval sizes must be multiples of the class count"));
                }
                self.build_problem()?;
            }
        }
        Ok(())
    }

    /// Training-set size, 1 for the deterministic objectives.
    pub fn num_samples(&self) -> usize {
        match &self.problem {
            ProblemConfig::MlpBlobs { train_size, .. } => *train_size,
            _ => 1,
        }
    }

    pub fn steps_per_epoch(&self) -> u64 {
        steps_per_epoch(self.num_samples(), self.batch_size)
    }

    pub fn total_steps(&self) -> u64 {
        self.steps.expect("resolved config")
    }

    pub fn schedule(&self) -> Result<StepSchedule, CliError> {
        StepSchedule::new(self.schedule.beta0, self.schedule.decay_epochs.clone(), self.schedule.factor)
            .map_err(|e| bad("schedule", e))
    }

    /// The 1-D landscape for the toy problems.
    pub fn piecewise(&self) -> interpolatron::Result<PiecewiseProblem> {
        match self.problem {
            ProblemConfig::Fig2 {
                flat_width,
                flat_slope,
                sheer_slope,
                start,
            } => Ok(PiecewiseProblem {
                function: make_fig2_function(flat_width, flat_slope, sheer_slope)?,
                start,
            }),
            ProblemConfig::Fig3 {
                well_width,
                well_slope,
                outer_slope,
                start,
            } => Ok(PiecewiseProblem {
                function: make_fig3_function(well_width, well_slope, outer_slope)?,
                start,
            }),
            _ => Err(interpolatron::Error::Precondition("not a one-dimensional problem".into())),
        }
    }

    pub fn quadratic(&self) -> Result<QuadraticProblem, CliError> {
        let ProblemConfig::Quadratic { mu, eta, dim, data_seed } = self.problem else {
            return Err(bad("problem.kind", "expected a quadratic problem"));
        };
        let h = QuadraticProblem::log_spaced(mu, eta, dim).map_err(|e| bad("problem", e))?;
        let mut r = rng::seeded(data_seed);
        let optimum: Vec<f64> = (0..dim).map(|_| rng::standard_normal(&mut r)).collect();
        let start: Vec<f64> = optimum.iter().map(|o| o + rng::standard_normal(&mut r)).collect();
        QuadraticProblem::new(
            h,
            Vector::new(optimum).map_err(|e| bad("problem", e))?,
            Vector::new(start).map_err(|e| bad("problem", e))?,
        )
        .map_err(|e| bad("problem", e))
    }

    pub fn build_problem(&self) -> Result<Box<dyn Problem>, CliError> {
        Ok(match &self.problem {
            ProblemConfig::Quadratic { .. } => Box::new(self.quadratic()?),
            ProblemConfig::Fig2 { .. } | ProblemConfig::Fig3 { .. } => {
                Box::new(self.piecewise().map_err(|e| bad("problem", e))?)
            }
            ProblemConfig::MlpBlobs {
                layer_widths,
                weight_decay,
                train_size,
                eval_size,
                spread,
                data_seed,
            } => {
                let arch =
                    MlpArchitecture::new(layer_widths.clone(), *weight_decay).map_err(|e| bad("problem", e))?;
                let (p, c) = (layer_widths[0], *layer_widths.last().expect("validated"));
                let train = make_blobs(*train_size, p, c, *spread, derive_seed(*data_seed, 0))
                    .map_err(|e| bad("problem", e))?;
                let eval =
                    make_blobs(*eval_size, p, c, *spread, derive_seed(*data_seed, 1)).map_err(|e| bad("problem", e))?;
                Box::new(MlpBlobsProblem::new(arch, train, eval).map_err(|e| bad("problem", e))?)
            }
        })
    }

    /// The parsed form with defaults filled in, as TOML.
    pub fn to_resolved_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

impl OptimizerConfig {
    fn resolve(&mut self, index: usize, default_beta0: f64) -> Result<(), CliError> {
        let key = |field: &str| format!("optimizers[{index}].{field}");
        if self.name.trim().is_empty() {
            return Err(bad(key("name"), "must not be empty"));
        }
        let kind = OptimizerKind::parse(&self.kind)
            .ok_or_else(|| bad(key("kind"), format!("unknown optimizer kind `{}`", self.kind)))?;
        self.kind = kind.name().to_string();

        let uses = |field: &str| match field {
            "tau" => matches!(kind, OptimizerKind::Momentum | OptimizerKind::Nesterov),
            "alphas" => kind == OptimizerKind::Interpolatron,
            "k" | "ridge" => kind == OptimizerKind::Anderson,
            "adam_betas" | "adam_eps" => kind == OptimizerKind::Adam,
            _ => true,
        };
        let set = [
            ("tau", self.tau.is_some()),
            ("alphas", self.alphas.is_some()),
            ("k", self.k.is_some()),
            ("ridge", self.ridge.is_some()),
            ("adam_betas", self.adam_betas.is_some()),
            ("adam_eps", self.adam_eps.is_some()),
        ];
        if let Some((field, _)) = set.iter().find(|(f, on)| *on && !uses(f)) {
            return Err(bad(key(field), format!("not used by {kind}")));
        }

        let beta0 = *self.beta0.get_or_insert(default_beta0);
        if !(beta0 > 0.0 && beta0.is_finite()) {
            return Err(bad(key("beta0"), format!("must be positive, got {beta0}")));
        }
        match kind {
            OptimizerKind::Momentum | OptimizerKind::Nesterov => {
                self.tau.get_or_insert(DEFAULT_TAU);
            }
            OptimizerKind::Interpolatron => {
                if self.alphas.is_none() {
                    return Err(bad(key("alphas"), "missing (interpolatron needs its mixing weights)"));
                }
            }
            OptimizerKind::Anderson => {
                self.k.get_or_insert(DEFAULT_ANDERSON_K);
                self.ridge.get_or_insert(DEFAULT_RIDGE);
            }
            OptimizerKind::Adam => {
                self.adam_betas.get_or_insert([DEFAULT_ADAM_BETAS.0, DEFAULT_ADAM_BETAS.1]);
                self.adam_eps.get_or_insert(DEFAULT_ADAM_EPS);
            }
            OptimizerKind::Sgd | OptimizerKind::ProjectedAnderson => {}
        }
        self.history_init.get_or_insert_with(HistoryInit::default);
        self.build_spec().map_err(|(field, e)| bad(key(field), e))?;
        Ok(())
    }

    /// The optimizer this entry describes. Call on a resolved config.
    pub fn spec(&self) -> Result<OptimizerSpec, CliError> {
        self.build_spec()
            .map_err(|(field, e)| bad(format!("{}.{field}", self.name), e))
    }

    fn build_spec(&self) -> Result<OptimizerSpec, (&'static str, interpolatron::Error)> {
        let kind = OptimizerKind::parse(&self.kind).ok_or((
            "kind",
            interpolatron::Error::Precondition(format!("unknown optimizer kind `{}`", self.kind)),
        ))?;
        let method = match kind {
            OptimizerKind::Sgd => Method::Sgd,
            OptimizerKind::Momentum => Method::Momentum {
                tau: self.tau.unwrap_or(DEFAULT_TAU),
            },
            OptimizerKind::Nesterov => Method::Nesterov {
                tau: self.tau.unwrap_or(DEFAULT_TAU),
            },
            OptimizerKind::Adam => {
                let b = self.adam_betas.unwrap_or([DEFAULT_ADAM_BETAS.0, DEFAULT_ADAM_BETAS.1]);
                Method::Adam {
                    betas: (b[0], b[1]),
                    eps: self.adam_eps.unwrap_or(DEFAULT_ADAM_EPS),
                }
            }
            OptimizerKind::Interpolatron => Method::Interpolatron {
                alphas: MixingCoefficients::interpolation(self.alphas.clone().unwrap_or_default())
                    .map_err(|e| ("alphas", e))?,
            },
            OptimizerKind::Anderson => Method::Anderson {
                k: self.k.unwrap_or(DEFAULT_ANDERSON_K),
                ridge: self.ridge.unwrap_or(DEFAULT_RIDGE),
            },
            OptimizerKind::ProjectedAnderson => Method::ProjectedAnderson,
        };
        let field = match kind {
            OptimizerKind::Momentum | OptimizerKind::Nesterov => "tau",
            OptimizerKind::Adam => "adam_betas",
            OptimizerKind::Anderson => "k",
            _ => "kind",
        };
        let spec = OptimizerSpec::new(method).map_err(|e| (field, e))?;
        if let Some(HistoryInit::TruncatedNormal { stddev, .. }) = self.history_init {
            if !(stddev > 0.0 && stddev.is_finite()) {
                return Err((
                    "history_init",
                    interpolatron::Error::Precondition(format!("stddev must be positive, got {stddev}")),
                ));
            }
        }
        Ok(spec.with_history_init(self.history_init.unwrap_or_default()))
    }

    pub fn beta0(&self) -> f64 {
        self.beta0.expect("resolved config")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_STEP_ROW: &str = r#"
        name = "two-step-row"
        steps = 100

        [problem]
        kind = "mlp-blobs"

        [schedule]
        beta0 = 0.1

        [[optimizers]]
        name = "interp2"
        kind = "interpolatron"
        alphas = [0.05, 0.95]
    "#;

    #[test]
    fn parses_the_two_step_row() {
        let cfg = parse_config(TWO_STEP_ROW).unwrap();
        let opt = &cfg.optimizers[0];
        assert_eq!(opt.beta0(), 0.1);
        let spec = opt.spec().unwrap();
        assert_eq!(spec.kind(), OptimizerKind::Interpolatron);
        match spec.method {
            Method::Interpolatron { alphas } => assert_eq!(alphas.as_slice(), &[0.05, 0.95]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_alphas_off_the_simplex() {
        let text = TWO_STEP_ROW.replace("[0.05, 0.95]", "[0.5, 0.6]");
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("alphas must sum to 1"), "{err}");
        assert!(err.contains("optimizers[0].alphas"), "{err}");
    }

    #[test]
    fn materialises_defaults() {
        let cfg = parse_config(TWO_STEP_ROW).unwrap();
        assert_eq!(cfg.optimizers[0].history_init, Some(HistoryInit::ReplicateZero));
        let echoed = cfg.to_resolved_toml();
        assert!(echoed.contains("strategy = \"replicate-zero\""), "{echoed}");
        assert!(echoed.contains("batch_size = 32"));
        assert!(echoed.contains("weight_decay = 0.0002"));
        // The echo parses back to the same config.
        assert_eq!(parse_config(&echoed).unwrap(), cfg);
    }

    #[test]
    fn epochs_and_steps() {
        let text = TWO_STEP_ROW.replace("steps = 100", "epochs = 200");
        let cfg = parse_config(&text).unwrap();
        // 300 samples at batch 32 → 10 steps per epoch.
        assert_eq!(cfg.total_steps(), 2000);
        let both = TWO_STEP_ROW.replace("steps = 100", "steps = 100\nepochs = 3");
        assert!(parse_config(&both).is_err());
    }

    #[test]
    fn descriptive_errors() {
        let cases = [
            (TWO_STEP_ROW.replace("\"interpolatron\"", "\"rmsprop\""), "optimizers[0].kind"),
            (TWO_STEP_ROW.replace("beta0 = 0.1", "beta0 = -0.1"), "schedule"),
            (TWO_STEP_ROW.replace("alphas = [0.05, 0.95]", ""), "optimizers[0].alphas"),
            (TWO_STEP_ROW.replace("alphas = [0.05, 0.95]", "alphas = [0.05, 0.95]\ntau = 0.9"), "optimizers[0].tau"),
            (TWO_STEP_ROW.replace("steps = 100", ""), "steps"),
            (TWO_STEP_ROW.replace("name = \"two-step-row\"", "name = \"x\"\nbogus = 1"), "bogus"),
        ];
        for (text, key) in cases {
            let err = parse_config(&text).unwrap_err().to_string();
            assert!(err.contains(key), "expected `{key}` in `{err}`");
        }
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let text = format!(
            "{TWO_STEP_ROW}\n[[optimizers]]\nname = \"interp2\"\nkind = \"sgd\"\n"
        );
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("duplicate"), "{err}");
    }

    #[test]
    fn toy_defaults_depend_on_the_landscape() {
        let fig2 = r#"
            name = "fig2"
            steps = 1
            [problem]
            kind = "fig2"
            [schedule]
            beta0 = 0.1
            [toy]
        "#;
        let cfg = parse_config(fig2).unwrap();
        let toy = cfg.toy.as_ref().unwrap();
        assert_eq!((toy.max_steps, toy.sgd_first_step), (Some(200), Some(false)));
        let cfg = parse_config(&fig2.replace("\"fig2\"", "\"fig3\"")).unwrap();
        let toy = cfg.toy.as_ref().unwrap();
        assert_eq!((toy.max_steps, toy.sgd_first_step), (Some(8), Some(true)));
    }
}
