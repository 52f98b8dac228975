//! One-dimensional piecewise-linear objectives for the escape and
//! overshoot experiments.

use crate::error::{invalid, Result};
use crate::problem::Problem;
use crate::vector::Vector;

/// A continuous piecewise-linear `f: ℝ → ℝ`.
///
/// `slopes[0]` applies on `(−∞, b_1)`, `slopes[j]` on `[b_j, b_{j+1})` and
/// `slopes[m]` on `[b_m, ∞)`, so at a breakpoint the right-hand slope is the
/// gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear1D {
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    /// `f(b_j)` for each breakpoint.
    knot_values: Vec<f64>,
}

impl PiecewiseLinear1D {
    /// `anchor = (x_a, f(x_a))` fixes the additive constant.
    pub fn new(breakpoints: Vec<f64>, slopes: Vec<f64>, anchor: (f64, f64)) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(invalid("breakpoints", "need at least one breakpoint"));
        }
        if slopes.len() != breakpoints.len() + 1 {
            return Err(invalid(
                "slopes",
                format!("need {} slopes for {} breakpoints", breakpoints.len() + 1, breakpoints.len()),
            ));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("breakpoints", "must be strictly increasing"));
        }
        if breakpoints.iter().chain(&slopes).any(|v| !v.is_finite()) {
            return Err(invalid("breakpoints/slopes", "must be finite"));
        }
        let mut knot_values = vec![0.0; breakpoints.len()];
        for j in 1..breakpoints.len() {
            knot_values[j] = knot_values[j - 1] + slopes[j] * (breakpoints[j] - breakpoints[j - 1]);
        }
        let mut f = Self {
            breakpoints,
            slopes,
            knot_values,
        };
        let offset = anchor.1 - f.value(anchor.0);
        for v in &mut f.knot_values {
            *v += offset;
        }
        Ok(f)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// Index into `slopes` for the interval containing `x`.
    fn interval(&self, x: f64) -> usize {
        self.breakpoints.partition_point(|&b| b <= x)
    }

    pub fn value(&self, x: f64) -> f64 {
        match self.interval(x) {
            0 => self.knot_values[0] + self.slopes[0] * (x - self.breakpoints[0]),
            j => self.knot_values[j - 1] + self.slopes[j] * (x - self.breakpoints[j - 1]),
        }
    }

    pub fn gradient(&self, x: f64) -> f64 {
        self.slopes[self.interval(x)]
    }
}

/// Sheer descent, a slightly rising flat stretch `[0, flat_width]`, then sheer
/// descent again; `f(0) = 0` is a local minimum.
pub fn make_fig2_function(flat_width: f64, flat_slope: f64, sheer_slope: f64) -> Result<PiecewiseLinear1D> {
    if !(flat_width > 0.0) {
        return Err(invalid("flat_width", "must be positive"));
    }
    if !(sheer_slope < 0.0) {
        return Err(invalid("sheer_slope", "must be negative"));
    }
    if !(flat_slope.abs() < sheer_slope.abs()) {
        return Err(invalid("flat_slope", "must be shallower than the sheer slope"));
    }
    PiecewiseLinear1D::new(
        vec![0.0, flat_width],
        vec![sheer_slope, flat_slope, sheer_slope],
        (0.0, 0.0),
    )
}

pub const FIG2_FLAT_SLOPE: f64 = 0.1;
pub const FIG2_SHEER_SLOPE: f64 = -15.0;
pub const FIG2_FLAT_WIDTH: f64 = 2.0;
pub const FIG2_START: f64 = -0.1;

/// Symmetric V-well centred at 0: slope `±well_slope_scale` on
/// `[−well_width, well_width]`, `±outer_slope` outside, `f(0) = 0`.
pub fn make_fig3_function(well_width: f64, well_slope_scale: f64, outer_slope: f64) -> Result<PiecewiseLinear1D> {
    if !(well_width > 0.0) {
        return Err(invalid("well_width", "must be positive"));
    }
    if !(well_slope_scale > 0.0) {
        return Err(invalid("well_slope_scale", "must be positive"));
    }
    PiecewiseLinear1D::new(
        vec![-well_width, 0.0, well_width],
        vec![-outer_slope, -well_slope_scale, well_slope_scale, outer_slope],
        (0.0, 0.0),
    )
}

pub const FIG3_WELL_WIDTH: f64 = 1.0;
pub const FIG3_WELL_SLOPE: f64 = 40.0;
pub const FIG3_OUTER_SLOPE: f64 = 1.0;
pub const FIG3_START: f64 = -0.5;

/// First 1-based index `t` with `trace[t-1]` beyond the right edge of
/// `region` and strictly below `f` at that edge.
pub fn escape_steps(f: &PiecewiseLinear1D, trace: &[f64], region: (f64, f64)) -> Option<usize> {
    let (_, hi) = region;
    let edge = f.value(hi);
    trace
        .iter()
        .position(|&x| x > hi && f.value(x) < edge)
        .map(|i| i + 1)
}

/// `max_t |x^{(t)} − center|` (0 for an empty trace).
pub fn max_excursion(trace: &[f64], center: f64) -> f64 {
    trace.iter().map(|x| (x - center).abs()).fold(0.0, f64::max)
}

/// A 1-D piecewise-linear function with a fixed starting point.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseProblem {
    pub function: PiecewiseLinear1D,
    pub start: f64,
}

impl Problem for PiecewiseProblem {
    fn dim(&self) -> usize {
        1
    }

    fn loss(&self, x: &Vector) -> f64 {
        self.function.value(x[0])
    }

    fn full_gradient(&self, x: &Vector) -> Vector {
        Vector::from_raw(vec![self.function.gradient(x[0])])
    }

    fn initial_point(&self, _seed: u64) -> Vector {
        Vector::from_raw(vec![self.start])
    }
}
