//! Vertex-cover baseline: both endpoints of every monochromatic edge that
//! is not yet covered join the cover (a maximal matching) and each takes a
//! fresh special color of its own.

use crate::algorithm::{AlgoReport, FinishContext, OnlineAlgorithm, StepOutcome};
use crate::coloring::{Bucket, Color, ColoringState, Palette};
use crate::error::{RecolorError, Result};
use crate::graph::Edge;

#[derive(Clone, Debug)]
pub struct Greedy {
    state: ColoringState,
    covered: Vec<bool>,
    cover_size: usize,
    next_fresh: usize,
    violations: Vec<String>,
}

impl Greedy {
    pub fn new(initial: &[Color], palette: Palette) -> Result<Self> {
        Ok(Greedy {
            state: ColoringState::new(initial, palette)?,
            covered: vec![false; initial.len()],
            cover_size: 0,
            next_fresh: 0,
            violations: Vec::new(),
        })
    }

    pub fn cover_size(&self) -> usize {
        self.cover_size
    }

    pub fn is_covered(&self, v: usize) -> bool {
        self.covered[v]
    }

    fn cover(&mut self, w: usize) -> Result<()> {
        if self.next_fresh >= self.state.palette().special_count() {
            return Err(RecolorError::PaletteExhausted(self.state.palette().special_count()));
        }
        let c = self.state.palette().special(self.next_fresh);
        self.next_fresh += 1;
        self.covered[w] = true;
        self.cover_size += 1;
        self.state.mark_special(w);
        self.state.recolor_vertex(w, c, Bucket::Greedy)?;
        Ok(())
    }
}

impl OnlineAlgorithm for Greedy {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn step(&mut self, e: Edge) -> Result<StepOutcome> {
        e.check(self.covered.len())?;
        if self.state.color(e.u) == self.state.color(e.v) {
            if self.covered[e.u] || self.covered[e.v] {
                self.violations.push(format!(
                    "monochromatic edge ({}, {}) touches a covered vertex",
                    e.u, e.v
                ));
            } else {
                self.cover(e.u)?;
                self.cover(e.v)?;
            }
        }
        Ok(StepOutcome::from_events(None, None, self.state.drain_events()))
    }

    fn state(&self) -> &ColoringState {
        &self.state
    }

    fn finish(&mut self, _ctx: &FinishContext) -> AlgoReport {
        AlgoReport {
            specials_marked: self.cover_size,
            max_level: 1,
            violations: self.violations.clone(),
            ..Default::default()
        }
    }
}
