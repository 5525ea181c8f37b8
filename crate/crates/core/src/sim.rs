//! The simulated two-color algorithm 𝒜.
//!
//! A monochromatic edge in a bipartite graph always joins two distinct
//! components, each properly colored; flipping either one repairs the edge.
//! The flip policy decides which. The simulator records the set `R` of
//! vertices it has ever recolored, and a per-step log that the charging
//! audit replays.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coloring::Color;
use crate::error::{RecolorError, Result};
use crate::graph::{ComponentIndex, Edge, Members};

/// How the simulator chooses which of two components to flip.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlipPolicy {
    /// Flip the component with fewer vertices outside `R`; ties by size,
    /// then by smallest vertex id.
    SmallerNew,
    /// Flip the strictly smaller component; ties by smallest vertex id.
    #[default]
    SmallerSize,
}

impl FlipPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            FlipPolicy::SmallerNew => "smaller-new",
            FlipPolicy::SmallerSize => "smaller-size",
        }
    }

    /// Whether every flip is guaranteed to satisfy `|C ∪ C'| >= 2|C|`.
    pub fn guarantees_doubling(&self) -> bool {
        matches!(self, FlipPolicy::SmallerSize)
    }
}

impl fmt::Display for FlipPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FlipPolicy {
    type Err = RecolorError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smaller-new" => Ok(FlipPolicy::SmallerNew),
            "smaller-size" => Ok(FlipPolicy::SmallerSize),
            other => Err(RecolorError::InvalidParameter(format!("unknown flip policy {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    U,
    V,
}

/// One fed edge as seen by the simulator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FedStep {
    pub edge: Edge,
    pub size_u: usize,
    pub size_v: usize,
    pub merged: bool,
    /// Endpoint whose component was flipped, if any.
    pub flipped: Option<Side>,
    pub cost: usize,
}

impl FedStep {
    pub fn flipped_size(&self) -> Option<usize> {
        self.flipped.map(|s| match s {
            Side::U => self.size_u,
            Side::V => self.size_v,
        })
    }

    pub fn merged_size(&self) -> usize {
        if self.merged {
            self.size_u + self.size_v
        } else {
            self.size_u
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepReport {
    pub recolored: Vec<usize>,
    /// Vertices that entered `R` this step.
    pub newly_recolored: Vec<usize>,
    pub cost: usize,
    pub step: FedStep,
}

#[derive(Clone, Debug)]
pub struct SimA {
    lo: Color,
    hi: Color,
    colors: Vec<Color>,
    index: ComponentIndex,
    policy: FlipPolicy,
    log: Vec<FedStep>,
    total_cost: u64,
}

impl SimA {
    pub fn new(initial: Vec<Color>, lo: Color, hi: Color, policy: FlipPolicy) -> Result<Self> {
        if let Some(c) = initial.iter().find(|&&c| c != lo && c != hi) {
            return Err(RecolorError::UnknownColor(*c));
        }
        let n = initial.len();
        Ok(SimA {
            lo,
            hi,
            colors: initial,
            index: ComponentIndex::new(n),
            policy,
            log: Vec::new(),
            total_cost: 0,
        })
    }

    /// A simulator whose vertices all start with color `hi`.
    pub fn uniform(n: usize, lo: Color, hi: Color, policy: FlipPolicy) -> Self {
        SimA::new(vec![hi; n], lo, hi, policy).expect("uniform coloring is valid")
    }

    pub fn n(&self) -> usize {
        self.colors.len()
    }

    pub fn policy(&self) -> FlipPolicy {
        self.policy
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn color(&self, v: usize) -> Color {
        self.colors[v]
    }

    pub fn index(&self) -> &ComponentIndex {
        &self.index
    }

    pub fn in_r(&self, v: usize) -> bool {
        self.index.is_marked(v)
    }

    pub fn r_size(&self) -> usize {
        self.index.total_marked()
    }

    pub fn log(&self) -> &[FedStep] {
        &self.log
    }

    pub fn fed_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.log.iter().map(|s| s.edge)
    }

    pub fn total_cost(&self) -> u64 {
        self.total_cost
    }

    pub fn component(&self, v: usize) -> Members<'_> {
        self.index.members(v)
    }

    /// Feeds one edge; flips a component when the edge is monochromatic.
    pub fn feed(&mut self, e: Edge) -> Result<StepReport> {
        e.check(self.n())?;
        let (ru, rv) = (self.index.find(e.u), self.index.find(e.v));
        let (size_u, size_v) = (self.index.size_of(ru), self.index.size_of(rv));
        let mono = self.colors[e.u] == self.colors[e.v];
        if mono && ru == rv {
            return Err(RecolorError::OddCycle(e));
        }
        let mut recolored = Vec::new();
        let mut newly = Vec::new();
        let flipped = if mono {
            let side = self.choose(ru, rv);
            let root = match side {
                Side::U => ru,
                Side::V => rv,
            };
            recolored.extend(self.index.members(root));
            for &w in &recolored {
                self.colors[w] = if self.colors[w] == self.lo { self.hi } else { self.lo };
                if self.index.mark(w) {
                    newly.push(w);
                }
            }
            Some(side)
        } else {
            None
        };
        let merge = self.index.apply_edge(e)?;
        let cost = recolored.len();
        self.total_cost += cost as u64;
        let step = FedStep { edge: e, size_u, size_v, merged: merge.merged, flipped, cost };
        self.log.push(step.clone());
        Ok(StepReport { recolored, newly_recolored: newly, cost, step })
    }

    fn choose(&self, ru: usize, rv: usize) -> Side {
        let idx = &self.index;
        let key = |r: usize| {
            let size = idx.size_of(r);
            let fresh = size - idx.marked_in(r);
            let min = idx.min_vertex_of(r);
            match self.policy {
                FlipPolicy::SmallerNew => (fresh, size, min),
                FlipPolicy::SmallerSize => (size, 0, min),
            }
        };
        if key(ru) <= key(rv) {
            Side::U
        } else {
            Side::V
        }
    }

    /// Steps (indices into the log) whose flip satisfies `4|C ∪ C'| >= 5|C|`.
    pub fn classify_iplus(&self) -> Vec<usize> {
        self.log
            .iter()
            .enumerate()
            .filter_map(|(i, s)| {
                let flipped = s.flipped_size()?;
                (4 * s.merged_size() >= 5 * flipped).then_some(i)
            })
            .collect()
    }

    /// `(cost on I⁺ steps, total cost)`.
    pub fn iplus_share(&self) -> (u64, u64) {
        let plus: u64 = self.classify_iplus().iter().map(|&i| self.log[i].cost as u64).sum();
        (plus, self.total_cost)
    }

    /// Every fed edge is properly colored.
    pub fn is_proper(&self) -> bool {
        self.log.iter().all(|s| self.colors[s.edge.u] != self.colors[s.edge.v])
    }
}
