//! The hierarchical algorithm: one two-color simulator per level on its own
//! color pair `{2j-1, 2j}`, each fed a moderated sequence. A vertex whose
//! edge cannot be moderated at its level is promoted to the next level.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::algorithm::{AlgoReport, FinishContext, OnlineAlgorithm, StepOutcome};
use crate::coloring::{Bucket, Color, ColoringState, Palette, BASIC_HI, BASIC_LO};
use crate::error::{RecolorError, Result};
use crate::fraction::{ceil_log2, floor_log_inverse, Fraction};
use crate::graph::{Edge, Graph};
use crate::moderation::{Admission, ModerationState, Route};
use crate::sim::{FlipPolicy, SimA};

/// Largest integer `x` with `x^p <= 2^q`, i.e. `floor(2^(q/p))`.
pub fn floor_pow2_ratio(q: u64, p: u64) -> Result<u64> {
    if p == 0 {
        return Err(RecolorError::InvalidParameter("zero denominator".into()));
    }
    if q / p >= 63 {
        return Err(RecolorError::InvalidParameter(format!("2^({q}/{p}) is too large")));
    }
    let fits = |x: u64| -> bool {
        // x^p <= 2^q, bailing out once the power passes 2^q
        let limit = 1u128 << q;
        let mut acc = 1u128;
        for _ in 0..p {
            acc *= x as u128;
            if acc > limit {
                return false;
            }
        }
        true
    };
    let (mut lo, mut hi) = (1u64, 1u64 << (q / p + 1));
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Derived parameters of the hierarchy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelParams {
    pub epsilon: Fraction,
    pub alpha: Fraction,
    pub beta: u64,
    /// Integer size threshold `floor(tau)`.
    pub threshold: u64,
    /// Whether `2^(1/epsilon)` (rather than the bond term) sets the threshold.
    pub tau_from_epsilon: bool,
    /// Per-level shrink factor `2 beta^2 / (alpha * threshold)`.
    pub gamma: Fraction,
    /// Highest level a vertex may reach before the run aborts.
    pub level_cap: u32,
}

impl LevelParams {
    pub fn new(n: usize, epsilon: Fraction, alpha: Fraction, beta: u64) -> Result<Self> {
        if epsilon.numer() == 0 || epsilon.numer() > epsilon.denom() {
            return Err(RecolorError::InvalidParameter(format!("epsilon = {epsilon} must lie in (0, 1]")));
        }
        if !alpha.is_proper() {
            return Err(RecolorError::InvalidParameter(format!("alpha = {alpha} must lie in (0, 1)")));
        }
        if beta < 1 {
            return Err(RecolorError::InvalidParameter("beta must be at least 1".into()));
        }
        let from_eps = floor_pow2_ratio(epsilon.denom(), epsilon.numer())?;
        let bb = (beta as u128) * (beta as u128);
        let from_bond = 4 * bb * alpha.denom() as u128 / alpha.numer() as u128;
        let from_bond = u64::try_from(from_bond)
            .map_err(|_| RecolorError::InvalidParameter(format!("beta = {beta} is too large")))?;
        let threshold = from_eps.max(from_bond);
        let gamma_num = 2 * bb * alpha.denom() as u128;
        let gamma_den = alpha.numer() as u128 * threshold as u128;
        let gamma = Fraction::new(
            u64::try_from(gamma_num).map_err(|_| RecolorError::InvalidParameter("beta too large".into()))?,
            u64::try_from(gamma_den).map_err(|_| RecolorError::InvalidParameter("threshold too large".into()))?,
        )?;
        if !gamma.is_proper() {
            return Err(RecolorError::Invariant(format!("shrink factor {gamma} is not below 1")));
        }
        let level_cap = ceil_log2(n.max(1) as u64) + 2;
        if level_cap > 62 {
            return Err(RecolorError::TooManyVertices { n, cap: 1 << 60 });
        }
        Ok(LevelParams {
            epsilon,
            alpha,
            beta,
            threshold,
            tau_from_epsilon: from_eps >= from_bond,
            gamma,
            level_cap,
        })
    }

    /// Bound on the highest level any vertex reaches.
    pub fn max_level_bound(&self, n: usize) -> u32 {
        floor_log_inverse(n.max(1) as u64, self.gamma) + 2
    }
}

#[derive(Clone, Debug)]
struct Level {
    moderation: ModerationState,
    /// Excess edges tested at this level.
    excess: Vec<Edge>,
    /// Vertices a promotion to this level was attempted for.
    promoted: BTreeSet<usize>,
}

/// Per-level statistics.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub level: u32,
    pub sim_edges: usize,
    pub excess_edges: usize,
    pub r_size: usize,
    pub promoted: usize,
    pub sim_cost: u64,
    pub members: usize,
}

#[derive(Clone, Debug)]
pub struct LevelAlgo {
    params: LevelParams,
    policy: FlipPolicy,
    graph: Graph,
    level: Vec<u32>,
    levels: Vec<Level>,
    /// Bit `j` set when the edge was admitted to level `j`'s sequence.
    admitted: Vec<u64>,
    state: ColoringState,
    max_level: u32,
    promote_cost: u64,
    violations: Vec<String>,
}

impl LevelAlgo {
    pub fn new(initial: &[Color], params: LevelParams, policy: FlipPolicy) -> Result<Self> {
        let n = initial.len();
        let palette = Palette::uniform(2 * (params.level_cap as usize - 1), 1);
        let state = ColoringState::new(initial, palette)?;
        let first = SimA::new(initial.to_vec(), BASIC_LO, BASIC_HI, policy)?;
        let mut algo = LevelAlgo {
            params,
            policy,
            graph: Graph::new(n),
            level: vec![1; n],
            levels: Vec::new(),
            admitted: Vec::new(),
            state,
            max_level: 1,
            promote_cost: 0,
            violations: Vec::new(),
        };
        algo.push_level(first)?;
        Ok(algo)
    }

    pub fn params(&self) -> &LevelParams {
        &self.params
    }

    pub fn level_of(&self, v: usize) -> u32 {
        self.level[v]
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    pub fn summaries(&self) -> Vec<LevelSummary> {
        self.levels
            .iter()
            .enumerate()
            .map(|(i, l)| LevelSummary {
                level: i as u32 + 1,
                sim_edges: l.moderation.sim_seq().len(),
                excess_edges: l.excess.len(),
                r_size: l.moderation.sim().r_size(),
                promoted: l.promoted.len(),
                sim_cost: l.moderation.sim().total_cost(),
                members: self.level.iter().filter(|&&x| x == i as u32 + 1).count(),
            })
            .collect()
    }

    fn push_level(&mut self, sim: SimA) -> Result<()> {
        let moderation = ModerationState::new(sim, self.params.threshold, self.params.alpha)?;
        self.levels.push(Level { moderation, excess: Vec::new(), promoted: BTreeSet::new() });
        Ok(())
    }

    fn ensure_level(&mut self, k: u32) -> Result<()> {
        while (self.levels.len() as u32) < k {
            let j = self.levels.len() as Color + 1;
            let sim = SimA::uniform(self.graph.n(), 2 * j - 1, 2 * j, self.policy);
            self.push_level(sim)?;
        }
        Ok(())
    }

    /// Routes edge `idx` at level `k`; mirrors flips onto level-`k` vertices.
    fn test_at(&mut self, k: u32, idx: usize) -> Result<Route> {
        let e = self.graph.edges()[idx];
        let lvl = &mut self.levels[k as usize - 1];
        let routed = lvl.moderation.route(e)?;
        match routed.admission {
            Admission::Sim(report) => {
                self.admitted[idx] |= 1 << k;
                let sim = self.levels[k as usize - 1].moderation.sim();
                let updates: Vec<(usize, Color)> = report
                    .recolored
                    .iter()
                    .filter(|&&w| self.level[w] == k)
                    .map(|&w| (w, sim.color(w)))
                    .collect();
                for (w, c) in updates {
                    self.state.recolor_vertex(w, c, Bucket::Sim)?;
                }
                Ok(Route::Sim)
            }
            Admission::Excess => {
                lvl.excess.push(e);
                Ok(Route::Excess)
            }
        }
    }

    fn promote(&mut self, u: usize, mut k: u32) -> Result<()> {
        'levels: loop {
            if k > self.params.level_cap {
                return Err(RecolorError::LevelCapExceeded { vertex: u, cap: self.params.level_cap });
            }
            self.ensure_level(k)?;
            self.levels[k as usize - 1].promoted.insert(u);
            let mut replay: Vec<usize> = self
                .graph
                .incident(u)
                .iter()
                .filter(|&&(v, _)| self.level[v] == k)
                .map(|&(_, idx)| idx)
                .collect();
            replay.sort_unstable();
            for idx in replay {
                if self.test_at(k, idx)? == Route::Excess {
                    k += 1;
                    continue 'levels;
                }
            }
            self.level[u] = k;
            self.max_level = self.max_level.max(k);
            let c = self.levels[k as usize - 1].moderation.sim().color(u);
            self.promote_cost += self.state.recolor_vertex(u, c, Bucket::Promote)?;
            return Ok(());
        }
    }

    fn end_checks(&self, beta: u64) -> Vec<String> {
        let mut out = Vec::new();
        let p = &self.params;
        let (an, ad) = (p.alpha.numer() as u128, p.alpha.denom() as u128);
        let t = p.threshold as u128;
        let b = beta as u128;
        for (i, e) in self.graph.edges().iter().enumerate() {
            let (lu, lv) = (self.level[e.u], self.level[e.v]);
            if lu == lv && self.admitted[i] >> lu & 1 == 0 {
                out.push(format!("edge {i} ({}, {}) joins level {lu} but is not in its sequence", e.u, e.v));
            }
        }
        let mut prev_r: Option<u128> = None;
        let mut sim_total = 0u64;
        let mut excess_total = 0u64;
        for (i, l) in self.levels.iter().enumerate() {
            let j = i + 1;
            let r = l.moderation.sim().r_size() as u128;
            let f = l.excess.len() as u128;
            let e = l.moderation.sim_seq().len() as u128;
            sim_total += l.moderation.sim().total_cost();
            excess_total += l.excess.len() as u64;
            out.extend(l.moderation.violations().iter().map(|v| format!("level {j}: {v}")));
            if !l.moderation.witness_count_ok() {
                out.push(format!("level {j}: too many witness sets"));
            }
            if f * an * t > b * r * ad {
                out.push(format!("level {j}: {f} excess edges exceed beta |R_j| / (alpha T) with |R_j| = {r}"));
            }
            if let Some(rp) = prev_r {
                if e * an * t > b * b * rp * ad {
                    out.push(format!("level {j}: {e} edges exceed beta^2 |R_(j-1)| / (alpha T) with |R_(j-1)| = {rp}"));
                }
                if r * an * t > 2 * b * b * rp * ad {
                    out.push(format!("level {j}: |R_j| = {r} exceeds 2 beta^2 |R_(j-1)| / (alpha T), |R_(j-1)| = {rp}"));
                }
                if r * (p.gamma.denom() as u128) > (p.gamma.numer() as u128) * rp && beta <= p.beta {
                    out.push(format!("level {j}: |R_j| = {r} exceeds gamma |R_(j-1)| = {} * {rp}", p.gamma));
                }
            }
            prev_r = Some(r);
        }
        if beta > p.beta {
            out.push(format!("bond {beta} exceeds the beta parameter {}", p.beta));
        } else if self.max_level > p.max_level_bound(self.graph.n()) {
            out.push(format!(
                "max level {} above bound {}",
                self.max_level,
                p.max_level_bound(self.graph.n())
            ));
        }
        if self.promote_cost > excess_total {
            out.push(format!("promotion cost {} above {excess_total} excess edges", self.promote_cost));
        }
        let total = self.state.total_cost();
        if total > excess_total + sim_total {
            out.push(format!("total cost {total} above excess edges {excess_total} + simulated cost {sim_total}"));
        }
        out
    }
}

impl OnlineAlgorithm for LevelAlgo {
    fn name(&self) -> &'static str {
        "C"
    }

    fn step(&mut self, e: Edge) -> Result<StepOutcome> {
        e.check(self.graph.n())?;
        let idx = self.graph.add_edge(e)?;
        self.admitted.push(0);
        let (lu, lv) = (self.level[e.u], self.level[e.v]);
        if lu != lv {
            return Ok(StepOutcome::from_events(None, None, Vec::new()));
        }
        let route = self.test_at(lu, idx)?;
        if route == Route::Excess {
            self.promote(e.u, lu + 1)?;
        }
        Ok(StepOutcome::from_events(Some(route), Some(lu), self.state.drain_events()))
    }

    fn state(&self) -> &ColoringState {
        &self.state
    }

    fn moderated(&self) -> Vec<&ModerationState> {
        self.levels.iter().map(|l| &l.moderation).collect()
    }

    fn colors_used(&self) -> usize {
        2 * self.max_level as usize
    }

    fn finish(&mut self, ctx: &FinishContext) -> AlgoReport {
        let beta = ctx.beta.unwrap_or(self.params.beta);
        let mut violations = std::mem::take(&mut self.violations);
        violations.extend(self.end_checks(beta));
        self.violations = violations.clone();
        AlgoReport {
            specials_marked: self.level.iter().filter(|&&l| l > 1).count(),
            excess_edges: self.levels.iter().map(|l| l.excess.len()).sum(),
            max_level: self.max_level,
            r_size: self.levels.iter().map(|l| l.moderation.sim().r_size()).sum(),
            recx_case3_hits: 0,
            special_pairs: None,
            violations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow2_floor() {
        assert_eq!(floor_pow2_ratio(4, 1).unwrap(), 16);
        assert_eq!(floor_pow2_ratio(1, 2).unwrap(), 1);
        assert_eq!(floor_pow2_ratio(3, 2).unwrap(), 2);
        assert_eq!(floor_pow2_ratio(7, 2).unwrap(), 11);
        assert_eq!(floor_pow2_ratio(0, 1).unwrap(), 1);
    }

    #[test]
    fn params_for_forests() {
        let p = LevelParams::new(1024, Fraction::new(1, 4).unwrap(), Fraction::half(), 1).unwrap();
        assert_eq!(p.threshold, 16);
        assert!(p.tau_from_epsilon);
        assert_eq!(p.gamma, Fraction::new(1, 4).unwrap());
        assert_eq!(p.level_cap, 12);
        assert_eq!(p.max_level_bound(1024), 7);
        // the bond term wins for large beta
        let p = LevelParams::new(8, Fraction::new(1, 2).unwrap(), Fraction::half(), 3).unwrap();
        assert_eq!(p.threshold, 72);
        assert!(!p.tau_from_epsilon);
        assert!(LevelParams::new(8, Fraction::new(0, 1).unwrap(), Fraction::half(), 1).is_err());
        assert!(LevelParams::new(8, Fraction::new(3, 2).unwrap(), Fraction::half(), 1).is_err());
    }

    fn algo(n: usize, threshold_eps: (u64, u64)) -> LevelAlgo {
        let p = LevelParams::new(n, Fraction::new(threshold_eps.0, threshold_eps.1).unwrap(), Fraction::half(), 1)
            .unwrap();
        LevelAlgo::new(&vec![1; n], p, FlipPolicy::default()).unwrap()
    }

    #[test]
    fn different_levels_do_nothing() {
        let mut c = algo(4, (1, 3));
        c.level[1] = 3;
        let out = c.step(Edge::new(0, 1)).unwrap();
        assert_eq!(out.route, None);
        assert_eq!(out.cost, 0);
    }

    #[test]
    fn promotion_to_empty_level_costs_one() {
        let mut c = algo(4, (1, 3));
        c.promote(0, 2).unwrap();
        assert_eq!(c.level_of(0), 2);
        assert_eq!(c.colors()[0], 4);
        assert_eq!(c.state().total_cost(), 1);
        assert_eq!(c.colors_used(), 4);
    }

    #[test]
    fn promotion_replays_same_level_edges() {
        let mut c = algo(4, (1, 3));
        c.promote(1, 2).unwrap();
        c.step(Edge::new(0, 1)).unwrap();
        // 0 at level 1, 1 at level 2: nothing happens; now promote 0
        c.promote(0, 2).unwrap();
        assert_eq!(c.level_of(0), 2);
        assert_ne!(c.colors()[0], c.colors()[1]);
        assert_eq!(c.levels[1].moderation.sim_seq().len(), 1);
        let report = c.finish(&FinishContext { beta: Some(1) });
        // hand-made promotions bypass the excess-edge accounting
        assert!(!report.violations.iter().any(|v| v.contains("not in its sequence")), "{:?}", report.violations);
    }

    #[test]
    fn path_stays_on_first_level() {
        let mut c = algo(16, (1, 4));
        for i in 0..15 {
            c.step(Edge::new(i, i + 1)).unwrap();
        }
        assert_eq!(c.max_level(), 1);
        let report = c.finish(&FinishContext { beta: Some(1) });
        assert!(report.violations.is_empty(), "{:?}", report.violations);
    }
}
