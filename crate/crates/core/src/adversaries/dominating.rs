//! Adaptive dominating-color matching. At each phase boundary the
//! adversary inspects the algorithm's colors, pairs active components of
//! equal size that are dominated by the same basic color, and joins each
//! pair by a perfect matching that pairs same-colored vertices first.
//!
//! Matchings respect the bipartition: every component keeps two parity
//! sides of equal size, and matching edges always run between opposite
//! sides of the merged component.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coloring::{Color, BASIC_HI, BASIC_LO};
use crate::error::{RecolorError, Result};
use crate::fraction::ceil_log2;
use crate::graph::Edge;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominatingConfig {
    pub n: usize,
    pub d: u64,
    pub seed: u64,
}

impl DominatingConfig {
    pub fn from_params(params: &serde_json::Value, seed: u64) -> Result<Self> {
        let field = |name: &str| {
            params
                .get(name)
                .and_then(|v| v.as_u64())
                .ok_or_else(|| RecolorError::InvalidInstance(format!("adaptive params need integer `{name}`")))
        };
        Ok(DominatingConfig { n: field("n")? as usize, d: field("D")?, seed })
    }

    pub fn to_params(&self) -> serde_json::Value {
        serde_json::json!({ "n": self.n, "D": self.d })
    }

    /// Degree bound: one matching edge per vertex per phase.
    pub fn delta(&self) -> usize {
        (ceil_log2(self.n.max(2) as u64) as usize).max(1)
    }

    /// Upper bound on the largest bond: the total number of edges.
    pub fn beta_hint(&self) -> u64 {
        (self.n as u64 * self.delta() as u64 / 2).max(1)
    }
}

/// What the adversary may observe about the algorithm.
pub trait AlgoView {
    fn colors(&self) -> &[Color];
    /// Whether `v` has ever held a special color.
    fn ever_special(&self, v: usize) -> bool;
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseStats {
    pub phase: u32,
    pub active: usize,
    pub pairs: usize,
    pub edges: usize,
    /// Edges monochromatic under the colors seen at the phase boundary.
    pub planned_mono: usize,
}

#[derive(Clone, Debug)]
struct Component {
    /// Parity sides, each sorted.
    sides: [Vec<usize>; 2],
}

impl Component {
    fn size(&self) -> usize {
        self.sides[0].len() + self.sides[1].len()
    }

    fn min_vertex(&self) -> usize {
        self.sides.iter().flatten().copied().min().unwrap_or(usize::MAX)
    }
}

#[derive(Clone, Debug)]
pub struct DominatingAdversary {
    cfg: DominatingConfig,
    rng: ChaCha8Rng,
    initial: Vec<Color>,
    comps: Vec<Component>,
    phase: u32,
    done: bool,
    stats: Vec<PhaseStats>,
}

impl DominatingAdversary {
    pub fn new(cfg: DominatingConfig) -> Result<Self> {
        if cfg.n < 2 {
            return Err(RecolorError::InvalidParameter("dominating adversary needs n >= 2".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let initial = (0..cfg.n).map(|_| rng.gen_range(1..=2)).collect();
        let comps = (0..cfg.n).map(|v| Component { sides: [vec![v], Vec::new()] }).collect();
        Ok(DominatingAdversary { cfg, rng, initial, comps, phase: 0, done: false, stats: Vec::new() })
    }

    pub fn config(&self) -> &DominatingConfig {
        &self.cfg
    }

    pub fn initial_colors(&self) -> &[Color] {
        &self.initial
    }

    pub fn stats(&self) -> &[PhaseStats] {
        &self.stats
    }

    /// Active iff at least half the vertices never held a special color.
    fn is_active(c: &Component, view: &dyn AlgoView) -> bool {
        let basic = c.sides.iter().flatten().filter(|&&v| !view.ever_special(v)).count();
        2 * basic >= c.size()
    }

    /// At least a quarter of the vertices currently hold `color`.
    fn dominated_by(c: &Component, color: Color, view: &dyn AlgoView) -> bool {
        let k = c.sides.iter().flatten().filter(|&&v| view.colors()[v] == color).count();
        4 * k >= c.size()
    }

    /// Pairs same-colored vertices first, then the rest in id order.
    fn match_sides(a: &[usize], b: &[usize], colors: &[Color]) -> (Vec<(usize, usize)>, usize) {
        let group = |s: &[usize]| {
            let mut m: BTreeMap<Color, Vec<usize>> = BTreeMap::new();
            for &v in s {
                m.entry(colors[v]).or_default().push(v);
            }
            m
        };
        let (mut ga, mut gb) = (group(a), group(b));
        let mut out = Vec::with_capacity(a.len());
        let mut mono = 0;
        for (color, va) in ga.iter_mut() {
            if let Some(vb) = gb.get_mut(color) {
                let k = va.len().min(vb.len());
                out.extend(va.drain(..k).zip(vb.drain(..k)));
                mono += k;
            }
        }
        let mut ra: Vec<usize> = ga.into_values().flatten().collect();
        let mut rb: Vec<usize> = gb.into_values().flatten().collect();
        ra.sort_unstable();
        rb.sort_unstable();
        out.extend(ra.into_iter().zip(rb));
        (out, mono)
    }

    /// Perfect matching between two balanced components, choosing the
    /// side orientation with more monochromatic edges.
    fn matching(a: &Component, b: &Component, colors: &[Color]) -> (Vec<Edge>, usize, bool) {
        type Candidate = (Vec<(usize, usize)>, usize, bool);
        let mut best: Option<Candidate> = None;
        for flip in [false, true] {
            let (b0, b1) = if flip { (&b.sides[1], &b.sides[0]) } else { (&b.sides[0], &b.sides[1]) };
            if a.sides[0].len() != b0.len() || a.sides[1].len() != b1.len() {
                continue;
            }
            let (mut pairs, mut mono) = Self::match_sides(&a.sides[0], b0, colors);
            let (p1, m1) = Self::match_sides(&a.sides[1], b1, colors);
            pairs.extend(p1);
            mono += m1;
            if best.as_ref().is_none_or(|(_, m, _)| mono > *m) {
                best = Some((pairs, mono, flip));
            }
        }
        let (pairs, mono, flip) = best.expect("balanced components of equal size always match");
        (pairs.into_iter().map(|(x, y)| Edge::new(x, y)).collect(), mono, flip)
    }

    /// The next phase's edges, or `None` once no pair can be formed.
    pub fn next_phase(&mut self, view: &dyn AlgoView) -> Option<Vec<Edge>> {
        if self.done {
            return None;
        }
        self.phase += 1;
        let size = 1usize << (self.phase - 1);
        let colors = view.colors();
        let mut active: Vec<usize> = (0..self.comps.len())
            .filter(|&i| self.comps[i].size() == size && Self::is_active(&self.comps[i], view))
            .collect();
        let active_count = active.len();
        active.shuffle(&mut self.rng);
        let mut pairs = Vec::new();
        for color in [BASIC_LO, BASIC_HI] {
            let (dom, rest): (Vec<usize>, Vec<usize>) =
                active.iter().partition(|&&i| Self::dominated_by(&self.comps[i], color, view));
            let usable = dom.len() / 2 * 2;
            pairs.extend(dom[..usable].chunks(2).map(|p| (p[0], p[1])));
            active = rest;
            active.extend(&dom[usable..]);
        }
        if pairs.is_empty() {
            self.done = true;
            return None;
        }
        let mut edges = Vec::new();
        let mut planned_mono = 0;
        let mut merged = vec![false; self.comps.len()];
        let mut next = Vec::new();
        for &(i, j) in &pairs {
            let (a, b) = (&self.comps[i], &self.comps[j]);
            let (es, mono, flip) = Self::matching(a, b, colors);
            planned_mono += mono;
            edges.extend(es);
            // opposite sides of a matched pair end up on opposite sides
            let (b0, b1) = if flip { (&b.sides[1], &b.sides[0]) } else { (&b.sides[0], &b.sides[1]) };
            let mut s0: Vec<usize> = a.sides[0].iter().chain(b1).copied().collect();
            let mut s1: Vec<usize> = a.sides[1].iter().chain(b0).copied().collect();
            s0.sort_unstable();
            s1.sort_unstable();
            next.push(Component { sides: [s0, s1] });
            merged[i] = true;
            merged[j] = true;
        }
        let mut comps: Vec<Component> = self
            .comps
            .drain(..)
            .enumerate()
            .filter(|(i, _)| !merged[*i])
            .map(|(_, c)| c)
            .collect();
        comps.extend(next);
        comps.sort_by_key(Component::min_vertex);
        self.comps = comps;
        self.stats.push(PhaseStats {
            phase: self.phase,
            active: active_count,
            pairs: pairs.len(),
            edges: edges.len(),
            planned_mono,
        });
        Some(edges)
    }
}
