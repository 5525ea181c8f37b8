//! Instance generators: the lower-bound constructions and bounded-bond
//! random families.

pub mod dominating;
pub mod families;
pub mod path_doubling;

pub use dominating::{AlgoView, DominatingAdversary, DominatingConfig, PhaseStats};
pub use families::{gen_bounded_bond, Family};
pub use path_doubling::{gen_path_doubling, phases_for_cost, PathDoubling, PathDoublingConfig};
