//! The interface every online recoloring algorithm exposes to the harness,
//! plus the plain two-color algorithm run directly on the input.

use serde::{Deserialize, Serialize};

use crate::coloring::{Bucket, Color, ColoringState, Palette, RecolorEvent, BASIC_HI, BASIC_LO};
use crate::error::Result;
use crate::graph::Edge;
use crate::moderation::{ModerationState, Route};
use crate::sim::{FlipPolicy, SimA};

/// What one algorithm step did with the arriving edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub route: Option<Route>,
    /// Level of the endpoints in the hierarchical algorithm.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub level: Option<u32>,
    pub events: Vec<RecolorEvent>,
    pub cost: u64,
}

impl StepOutcome {
    pub fn from_events(route: Option<Route>, level: Option<u32>, events: Vec<RecolorEvent>) -> Self {
        let cost = events.iter().map(|e| e.cost).sum();
        StepOutcome { route, level, events, cost }
    }
}

/// End-of-run statistics and invariant failures.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AlgoReport {
    pub specials_marked: usize,
    pub excess_edges: usize,
    pub max_level: u32,
    pub r_size: usize,
    pub recx_case3_hits: usize,
    /// Arrivals with both endpoints already special, for algorithms that
    /// mark specials.
    pub special_pairs: Option<usize>,
    pub violations: Vec<String>,
}

/// Facts only known after the stream ends.
#[derive(Clone, Copy, Debug, Default)]
pub struct FinishContext {
    /// Largest bond of the final graph (or an upper bound on it).
    pub beta: Option<u64>,
}

pub trait OnlineAlgorithm {
    fn name(&self) -> &'static str;

    /// Processes one arriving edge.
    fn step(&mut self, e: Edge) -> Result<StepOutcome>;

    fn state(&self) -> &ColoringState;

    fn colors(&self) -> &[Color] {
        self.state().colors()
    }

    /// The moderated sequences this algorithm feeds to simulators, with
    /// their thresholds (empty for algorithms without moderation).
    fn moderated(&self) -> Vec<&ModerationState> {
        Vec::new()
    }

    /// Number of distinct colors the algorithm may have used.
    fn colors_used(&self) -> usize {
        self.state().colors_used()
    }

    /// Runs end-of-stream checks and collects statistics.
    fn finish(&mut self, ctx: &FinishContext) -> AlgoReport;
}

/// The two-color algorithm applied to the whole input with no special
/// colors. Fails on non-bipartite input.
#[derive(Clone, Debug)]
pub struct PlainA {
    sim: SimA,
    state: ColoringState,
}

impl PlainA {
    pub fn new(initial: &[Color], policy: FlipPolicy) -> Result<Self> {
        Ok(PlainA {
            sim: SimA::new(initial.to_vec(), BASIC_LO, BASIC_HI, policy)?,
            state: ColoringState::new(initial, Palette::uniform(0, 1))?,
        })
    }

    pub fn sim(&self) -> &SimA {
        &self.sim
    }
}

impl OnlineAlgorithm for PlainA {
    fn name(&self) -> &'static str {
        "A"
    }

    fn step(&mut self, e: Edge) -> Result<StepOutcome> {
        let report = self.sim.feed(e)?;
        for &w in &report.recolored {
            self.state.recolor_vertex(w, self.sim.color(w), Bucket::Sim)?;
        }
        Ok(StepOutcome::from_events(Some(Route::Sim), None, self.state.drain_events()))
    }

    fn state(&self) -> &ColoringState {
        &self.state
    }

    fn finish(&mut self, _ctx: &FinishContext) -> AlgoReport {
        AlgoReport { r_size: self.sim.r_size(), max_level: 1, ..Default::default() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_a_mirrors_flips() {
        let mut a = PlainA::new(&[1, 1, 2], FlipPolicy::default()).unwrap();
        let out = a.step(Edge::new(0, 1)).unwrap();
        assert_eq!(out.cost, 1);
        assert_eq!(out.events[0].vertex, 0);
        assert_eq!(a.colors(), &[2, 1, 2]);
        let out = a.step(Edge::new(1, 2)).unwrap();
        assert_eq!(out.cost, 0);
        assert_eq!(a.finish(&FinishContext::default()).r_size, 1);
    }
}
