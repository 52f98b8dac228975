//! Test objectives: quadratics for the theory checks, 1-D piecewise-linear
//! landscapes for the toy dynamics, and a synthetic classification set.

mod blobs;
mod piecewise;
mod quadratic;

pub use blobs::{class_center, make_blobs, BlobsDataset, CENTER_SCALE};
pub use piecewise::{
    escape_steps, make_fig2_function, make_fig3_function, max_excursion, PiecewiseLinear1D, PiecewiseProblem,
    FIG2_FLAT_SLOPE, FIG2_FLAT_WIDTH, FIG2_SHEER_SLOPE, FIG2_START, FIG3_OUTER_SLOPE, FIG3_START, FIG3_WELL_SLOPE,
    FIG3_WELL_WIDTH,
};
pub use quadratic::QuadraticProblem;
