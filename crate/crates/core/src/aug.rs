//! The augmented algorithms: moderation-filtered simulation of the
//! two-color algorithm, with excess edges resolved by special colors.
//!
//! Variant `B` owns `Δ + 1` special colors and always gives special
//! vertices a special color. Variant `Bhat` owns `Δ` and may fall back to a
//! basic color for a special vertex whose neighbors are all special.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algorithm::{AlgoReport, FinishContext, OnlineAlgorithm, StepOutcome};
use crate::coloring::{is_basic, Bucket, Color, ColoringState, Palette, BASIC_HI, BASIC_LO};
use crate::error::{RecolorError, Result};
use crate::fraction::Fraction;
use crate::graph::{Edge, Graph};
use crate::moderation::{Admission, ModerationState};
use crate::sim::{FlipPolicy, SimA};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AugVariant {
    B,
    Bhat,
}

impl AugVariant {
    /// Special colors the variant needs for maximum degree `delta`.
    pub fn palette_size(&self, delta: usize) -> usize {
        match self {
            AugVariant::B => delta + 1,
            AugVariant::Bhat => delta,
        }
    }
}

impl fmt::Display for AugVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AugVariant::B => "B",
            AugVariant::Bhat => "Bhat",
        })
    }
}

impl FromStr for AugVariant {
    type Err = RecolorError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "B" | "b" => Ok(AugVariant::B),
            "Bhat" | "bhat" => Ok(AugVariant::Bhat),
            other => Err(RecolorError::InvalidParameter(format!("unknown variant {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugConfig {
    pub variant: AugVariant,
    pub alpha: Fraction,
    /// Special-color cost bound, also the moderation size threshold.
    pub d: u64,
    pub delta: usize,
    pub policy: FlipPolicy,
}

#[derive(Clone, Debug)]
pub struct AugAlgo {
    cfg: AugConfig,
    graph: Graph,
    state: ColoringState,
    moderation: ModerationState,
    /// Vertices ever marked special.
    marked: Vec<usize>,
    /// Arrivals whose endpoints were both special at the time.
    special_pairs: usize,
    recx_cost: u64,
    case3_hits: usize,
    /// Special vertices currently holding a basic color.
    basic_specials: BTreeSet<usize>,
    violations: Vec<String>,
}

impl AugAlgo {
    /// `palette` must hold exactly the special colors the variant needs.
    pub fn new(cfg: AugConfig, initial: &[Color], palette: Palette) -> Result<Self> {
        if cfg.d < 1 {
            return Err(RecolorError::InvalidParameter("D must be at least 1".into()));
        }
        if cfg.delta < 1 {
            return Err(RecolorError::InvalidParameter("delta must be at least 1".into()));
        }
        let need = cfg.variant.palette_size(cfg.delta);
        if palette.special_count() != need {
            return Err(RecolorError::InvalidParameter(format!(
                "variant {} with delta {} needs {need} special colors, got {}",
                cfg.variant,
                cfg.delta,
                palette.special_count()
            )));
        }
        let sim = SimA::new(initial.to_vec(), BASIC_LO, BASIC_HI, cfg.policy)?;
        let n = initial.len();
        Ok(AugAlgo {
            cfg,
            graph: Graph::new(n),
            state: ColoringState::new(initial, palette)?,
            moderation: ModerationState::new(sim, cfg.d, cfg.alpha)?,
            marked: Vec::new(),
            special_pairs: 0,
            recx_cost: 0,
            case3_hits: 0,
            basic_specials: BTreeSet::new(),
            violations: Vec::new(),
        })
    }

    pub fn config(&self) -> &AugConfig {
        &self.cfg
    }

    pub fn moderation(&self) -> &ModerationState {
        &self.moderation
    }

    pub fn recx_cost(&self) -> u64 {
        self.recx_cost
    }

    pub fn case3_hits(&self) -> usize {
        self.case3_hits
    }

    pub fn special_pairs(&self) -> usize {
        self.special_pairs
    }

    fn neighbor_colors(&self, w: usize) -> BTreeSet<Color> {
        self.graph.neighbors(w).map(|x| self.state.color(x)).collect()
    }

    fn free_special(&self, w: usize) -> Option<Color> {
        let used = self.neighbor_colors(w);
        self.state.palette().specials().find(|c| !used.contains(c))
    }

    fn no_free(&self, w: usize, what: &str) -> RecolorError {
        RecolorError::NoFreeColor {
            vertex: w,
            detail: format!(
                "{what}; degree {}, neighbor colors {:?}",
                self.graph.degree(w),
                self.neighbor_colors(w)
            ),
        }
    }

    fn paint(&mut self, w: usize, c: Color) -> Result<()> {
        self.recx_cost += self.state.recolor_vertex(w, c, Bucket::Recx)?;
        if is_basic(c) {
            self.basic_specials.insert(w);
        } else {
            self.basic_specials.remove(&w);
            self.check_dense_sim_component(w);
        }
        Ok(())
    }

    /// A special-colored vertex sits in a simulated component with more
    /// than `alpha * D` vertices of `R`.
    fn check_dense_sim_component(&mut self, w: usize) {
        let idx = self.moderation.sim().index();
        let r = idx.marked_in(idx.find(w));
        if !self.cfg.alpha.exceeded_by(r as u64, self.cfg.d) {
            self.violations.push(format!(
                "vertex {w} got a special color while its simulated component holds only {r} vertices of R"
            ));
        }
    }

    /// Recolors special vertex `w` so that no neighbor shares its color.
    fn recolor(&mut self, w: usize) -> Result<()> {
        match self.cfg.variant {
            AugVariant::B => {
                let c = self.free_special(w).ok_or_else(|| self.no_free(w, "no free special color"))?;
                self.paint(w, c)
            }
            AugVariant::Bhat => {
                let d_star = self
                    .graph
                    .neighbors(w)
                    .filter(|&x| self.state.is_special(x))
                    .count();
                if let Some(c) = self.free_special(w) {
                    return self.paint(w, c);
                }
                if d_star < self.cfg.delta {
                    return Err(self.no_free(w, &format!("{d_star} special neighbors but no free special color")));
                }
                let used = self.neighbor_colors(w);
                let c = [BASIC_LO, BASIC_HI]
                    .into_iter()
                    .find(|c| !used.contains(c))
                    .ok_or_else(|| self.no_free(w, "neither a special nor a basic color is free"))?;
                self.paint(w, c)
            }
        }
    }

    fn recx(&mut self, u: usize, v: usize) -> Result<()> {
        let (su, sv) = (self.state.is_special(u), self.state.is_special(v));
        if su && sv {
            if self.state.color(u) == self.state.color(v) {
                self.recolor(u)?;
            }
        } else if su {
            if is_basic(self.state.color(u)) {
                self.recolor(u)?;
            }
        } else if sv && is_basic(self.state.color(v)) {
            self.case3_hits += 1;
            self.recolor(v)?;
        }
        Ok(())
    }

    fn check_step_invariants(&mut self, step: usize) {
        if !self.state.special_marks_consistent() {
            self.violations.push(format!("step {step}: special-colored vertex without a special mark"));
        }
        if self.marked.len() > self.moderation.exc_seq().len() {
            self.violations.push(format!(
                "step {step}: {} special vertices from {} excess edges",
                self.marked.len(),
                self.moderation.exc_seq().len()
            ));
        }
        match self.cfg.variant {
            AugVariant::B => {
                if let Some(&w) = self.basic_specials.iter().next() {
                    self.violations.push(format!("step {step}: special vertex {w} holds a basic color"));
                }
            }
            AugVariant::Bhat => {
                for &w in &self.basic_specials {
                    let full = self.graph.degree(w) == self.cfg.delta;
                    let all_special = self.graph.neighbors(w).all(|x| !is_basic(self.state.color(x)));
                    if !full || !all_special {
                        self.violations.push(format!(
                            "step {step}: basic-colored special vertex {w} has degree {} (delta {}) and special-colored neighbors: {all_special}",
                            self.graph.degree(w),
                            self.cfg.delta
                        ));
                    }
                }
            }
        }
    }
}

impl OnlineAlgorithm for AugAlgo {
    fn name(&self) -> &'static str {
        match self.cfg.variant {
            AugVariant::B => "B",
            AugVariant::Bhat => "Bhat",
        }
    }

    fn step(&mut self, e: Edge) -> Result<StepOutcome> {
        e.check(self.graph.n())?;
        let step = self.graph.edges().len();
        self.graph.add_edge(e)?;
        for w in [e.u, e.v] {
            if self.graph.degree(w) > self.cfg.delta {
                return Err(RecolorError::DegreeExceeded { vertex: w, delta: self.cfg.delta });
            }
        }
        if self.state.is_special(e.u) && self.state.is_special(e.v) {
            self.special_pairs += 1;
        }
        let routed = self.moderation.route(e)?;
        match &routed.admission {
            Admission::Sim(report) => {
                let sim = self.moderation.sim();
                let updates: Vec<(usize, Color)> = report
                    .recolored
                    .iter()
                    .filter(|&&w| !self.state.is_special(w))
                    .map(|&w| (w, sim.color(w)))
                    .collect();
                for (w, c) in updates {
                    self.state.recolor_vertex(w, c, Bucket::Sim)?;
                }
            }
            Admission::Excess => {
                if !self.state.is_special(e.u) && !self.state.is_special(e.v) {
                    self.state.mark_special(e.u);
                    self.marked.push(e.u);
                    self.basic_specials.insert(e.u);
                }
            }
        }
        self.recx(e.u, e.v)?;
        self.check_step_invariants(step);
        Ok(StepOutcome::from_events(Some(routed.admission.route()), None, self.state.drain_events()))
    }

    fn state(&self) -> &ColoringState {
        &self.state
    }

    fn moderated(&self) -> Vec<&ModerationState> {
        vec![&self.moderation]
    }

    fn finish(&mut self, ctx: &FinishContext) -> AlgoReport {
        let mut violations = std::mem::take(&mut self.violations);
        violations.extend(self.moderation.violations().iter().cloned());
        if !self.moderation.witness_count_ok() {
            violations.push(format!(
                "{} witness sets exceed |R| / (alpha D) with |R| = {}",
                self.moderation.witness().sets().len(),
                self.moderation.sim().r_size()
            ));
        }
        if !self.moderation.dense_components_covered() {
            violations.push("a simulated component dense in R is not covered by witness sets".into());
        }
        if let Some(beta) = ctx.beta {
            if !self.moderation.excess_bound_ok(beta) {
                violations.push(format!(
                    "{} excess edges exceed beta |R| / (alpha D) with beta {beta}, |R| {}",
                    self.moderation.exc_seq().len(),
                    self.moderation.sim().r_size()
                ));
            }
        }
        let recx_bound = (self.marked.len() as u64 + self.special_pairs as u64) * self.state.palette().max_cost();
        if self.recx_cost > recx_bound {
            violations.push(format!(
                "excess-edge recoloring cost {} above ({} + {}) * {}",
                self.recx_cost,
                self.marked.len(),
                self.special_pairs,
                self.state.palette().max_cost()
            ));
        }
        self.violations = violations.clone();
        AlgoReport {
            specials_marked: self.marked.len(),
            excess_edges: self.moderation.exc_seq().len(),
            max_level: 1,
            r_size: self.moderation.sim().r_size(),
            recx_case3_hits: self.case3_hits,
            special_pairs: Some(self.special_pairs),
            violations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moderation::Route;

    fn cfg(variant: AugVariant, d: u64, delta: usize) -> AugConfig {
        AugConfig { variant, alpha: Fraction::half(), d, delta, policy: FlipPolicy::default() }
    }

    fn algo(variant: AugVariant, d: u64, delta: usize, initial: &[Color]) -> AugAlgo {
        let palette = Palette::uniform(variant.palette_size(delta), d);
        AugAlgo::new(cfg(variant, d, delta), initial, palette).unwrap()
    }

    #[test]
    fn single_monochromatic_edge_goes_to_simulation() {
        let mut b = algo(AugVariant::B, 4, 1, &[1, 1]);
        let out = b.step(Edge::new(0, 1)).unwrap();
        assert_eq!(out.route, Some(Route::Sim));
        assert_eq!(out.cost, 1);
        assert_ne!(b.colors()[0], b.colors()[1]);
    }

    #[test]
    fn excess_edge_marks_first_endpoint() {
        // D = 1: paths {0,1,2} and {3,4,5} each end with 2 of 3 vertices in R
        let mut b = algo(AugVariant::B, 1, 3, &[1; 6]);
        for (x, y) in [(0, 1), (1, 2), (3, 4), (4, 5)] {
            assert_eq!(b.step(Edge::new(x, y)).unwrap().route, Some(Route::Sim));
        }
        assert_eq!(b.moderation().sim().r_size(), 4);
        let out = b.step(Edge::new(1, 4)).unwrap();
        assert_eq!(out.route, Some(Route::Excess));
        assert!(b.state().is_special(1));
        assert_eq!(out.cost, 1);
        assert_eq!(b.colors()[1], 3);
        let report = b.finish(&FinishContext { beta: Some(1) });
        assert_eq!(report.specials_marked, 1);
        assert_eq!(report.excess_edges, 1);
        assert!(report.violations.is_empty(), "{:?}", report.violations);
    }

    #[test]
    fn lowest_free_special_is_chosen() {
        let mut b = algo(AugVariant::B, 2, 4, &[1; 6]);
        let pal = b.state.palette().clone();
        assert_eq!(pal.special_count(), 5);
        for w in [0, 1, 2, 3] {
            b.state.mark_special(w);
        }
        b.state.recolor_vertex(1, 3, Bucket::Recx).unwrap();
        b.state.recolor_vertex(2, 5, Bucket::Recx).unwrap();
        b.state.recolor_vertex(0, 3, Bucket::Recx).unwrap();
        b.graph.add_edge(Edge::new(0, 1)).unwrap();
        b.graph.add_edge(Edge::new(0, 2)).unwrap();
        b.recx(0, 1).unwrap();
        assert_eq!(b.state.color(0), 4);
    }

    #[test]
    fn bhat_falls_back_to_basic() {
        // delta 2, w with two special neighbors holding both specials
        let mut b = algo(AugVariant::Bhat, 3, 2, &[1, 1, 1]);
        for w in 0..3 {
            b.state.mark_special(w);
        }
        b.state.recolor_vertex(1, 3, Bucket::Recx).unwrap();
        b.state.recolor_vertex(2, 4, Bucket::Recx).unwrap();
        b.state.recolor_vertex(0, 2, Bucket::Recx).unwrap();
        b.graph.add_edge(Edge::new(0, 1)).unwrap();
        b.graph.add_edge(Edge::new(0, 2)).unwrap();
        b.recolor(0).unwrap();
        assert_eq!(b.state.color(0), 1);
        // delta 3 with 2 special neighbors: a special stays free
        let mut b = algo(AugVariant::Bhat, 3, 3, &[1, 1, 1]);
        for w in 0..3 {
            b.state.mark_special(w);
        }
        b.state.recolor_vertex(1, 3, Bucket::Recx).unwrap();
        b.state.recolor_vertex(2, 4, Bucket::Recx).unwrap();
        b.graph.add_edge(Edge::new(0, 1)).unwrap();
        b.graph.add_edge(Edge::new(0, 2)).unwrap();
        b.recolor(0).unwrap();
        assert_eq!(b.state.color(0), 5);
    }

    #[test]
    fn palette_size_is_checked() {
        let bad = AugAlgo::new(cfg(AugVariant::B, 4, 3), &[1, 2], Palette::uniform(3, 4));
        assert!(bad.is_err());
        let ok = AugAlgo::new(cfg(AugVariant::Bhat, 4, 3), &[1, 2], Palette::uniform(3, 4));
        assert!(ok.is_ok());
    }
}
