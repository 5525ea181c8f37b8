//! Online recoloring of bipartite graphs with a budget of expensive
//! special colors: the two-color simulator, moderation filter, augmented
//! and hierarchical algorithms, exact oracles, adversarial generators,
//! and post-hoc audits of the analysis.

pub mod adversaries;
pub mod algorithm;
pub mod audit;
pub mod aug;
pub mod coloring;
pub mod error;
pub mod fraction;
pub mod graph;
pub mod greedy;
pub mod harness;
pub mod instance;
pub mod levels;
pub mod moderation;
pub mod oracles;
pub mod sim;

pub use error::{RecolorError, Result};
