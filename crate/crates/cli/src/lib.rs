#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Configuration, grid sweeps, CSV and SVG output for the `corrbound` binary.

pub mod config;
pub mod plot;
pub mod sweep;

pub use config::{parse_config, ConfigError, ModelKind, Output, Range, SweepConfig};
pub use plot::{emit_plot, render_svg, PlotError, Quantity};
pub use sweep::{
    evaluate, evaluate_point, evaluate_sequential, read_csv, run_sweep, write_csv, SweepError,
    SweepRecord,
};
