//! Experiment driver: single runs, traces, sweeps and plot data.

pub mod plotdata;
pub mod run;
pub mod sweep;
pub mod trace;

pub use run::{replay, resolve_beta, run, Algo, BetaSource, RunOptions, RunOutcome, RunParams, RunResult};
pub use sweep::{make_source, sweep, Grid, Suite, SweepOutput, SweepRow};
pub use trace::Trace;
