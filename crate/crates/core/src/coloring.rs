//! Palettes, the actual coloring an algorithm outputs, and cost accounting.

use serde::{Deserialize, Serialize};

use crate::error::{RecolorError, Result};
use crate::graph::Edge;

/// Color ids: 1 and 2 are the basic colors, 3.. are special.
pub type Color = u32;

pub const BASIC_LO: Color = 1;
pub const BASIC_HI: Color = 2;

pub fn is_basic(c: Color) -> bool {
    c == BASIC_LO || c == BASIC_HI
}

pub fn other_basic(c: Color) -> Color {
    if c == BASIC_LO {
        BASIC_HI
    } else {
        BASIC_LO
    }
}

/// Two unit-cost basic colors plus a list of special colors with their costs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Palette {
    special_costs: Vec<u64>,
}

impl Palette {
    pub fn new(special_costs: Vec<u64>) -> Self {
        Palette { special_costs }
    }

    pub fn uniform(specials: usize, cost: u64) -> Self {
        Palette { special_costs: vec![cost; specials] }
    }

    pub fn special_count(&self) -> usize {
        self.special_costs.len()
    }

    /// Id of the `i`-th special color (0-based).
    pub fn special(&self, i: usize) -> Color {
        3 + i as Color
    }

    pub fn specials(&self) -> impl Iterator<Item = Color> {
        3..3 + self.special_costs.len() as Color
    }

    pub fn contains(&self, c: Color) -> bool {
        c >= 1 && (c as usize) <= 2 + self.special_costs.len()
    }

    pub fn cost(&self, c: Color) -> Result<u64> {
        match c {
            BASIC_LO | BASIC_HI => Ok(1),
            c if self.contains(c) => Ok(self.special_costs[(c - 3) as usize]),
            c => Err(RecolorError::UnknownColor(c)),
        }
    }

    pub fn max_cost(&self) -> u64 {
        self.special_costs.iter().copied().max().unwrap_or(1).max(1)
    }

    /// Every special color has the same cost.
    pub fn is_uniform(&self) -> bool {
        self.special_costs.windows(2).all(|w| w[0] == w[1])
    }
}

/// Which part of an algorithm paid for a recoloring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bucket {
    /// Mirroring the simulated two-color algorithm.
    Sim,
    /// The excess-edge procedure of the augmented algorithms.
    Recx,
    /// Level changes in the hierarchical algorithm.
    Promote,
    /// The vertex-cover baseline.
    Greedy,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecolorEvent {
    pub vertex: usize,
    pub from: Color,
    pub to: Color,
    pub cost: u64,
    pub bucket: Bucket,
}

/// The coloring an online algorithm outputs, with special marks and the
/// cumulative cost split into basic and special spend.
#[derive(Clone, Debug)]
pub struct ColoringState {
    palette: Palette,
    actual: Vec<Color>,
    special_mark: Vec<bool>,
    ever_special: Vec<bool>,
    basic_cost: u64,
    special_cost: u64,
    used: Vec<bool>,
    pending: Vec<RecolorEvent>,
}

impl ColoringState {
    pub fn new(initial: &[Color], palette: Palette) -> Result<Self> {
        let mut used = vec![false; 3 + palette.special_count()];
        for (v, &c) in initial.iter().enumerate() {
            if !is_basic(c) {
                return Err(RecolorError::InvalidInstance(format!(
                    "initial color of vertex {v} is {c}, not basic"
                )));
            }
            used[c as usize] = true;
        }
        let n = initial.len();
        Ok(ColoringState {
            palette,
            actual: initial.to_vec(),
            special_mark: vec![false; n],
            ever_special: vec![false; n],
            basic_cost: 0,
            special_cost: 0,
            used,
            pending: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.actual.len()
    }

    pub fn palette(&self) -> &Palette {
        &self.palette
    }

    pub fn color(&self, v: usize) -> Color {
        self.actual[v]
    }

    pub fn colors(&self) -> &[Color] {
        &self.actual
    }

    pub fn is_special(&self, v: usize) -> bool {
        self.special_mark[v]
    }

    pub fn mark_special(&mut self, v: usize) {
        self.special_mark[v] = true;
    }

    pub fn special_count(&self) -> usize {
        self.special_mark.iter().filter(|&&s| s).count()
    }

    /// Whether `v` has ever been recolored with a special color.
    pub fn ever_special(&self, v: usize) -> bool {
        self.ever_special[v]
    }

    pub fn basic_cost(&self) -> u64 {
        self.basic_cost
    }

    pub fn special_cost(&self) -> u64 {
        self.special_cost
    }

    pub fn total_cost(&self) -> u64 {
        self.basic_cost + self.special_cost
    }

    /// Number of distinct colors that have appeared on any vertex.
    pub fn colors_used(&self) -> usize {
        self.used.iter().filter(|&&u| u).count()
    }

    /// Sets `v`'s color and charges the cost of the new color if it changed.
    pub fn recolor_vertex(&mut self, v: usize, color: Color, bucket: Bucket) -> Result<u64> {
        let cost = self.palette.cost(color)?;
        let from = self.actual[v];
        if from == color {
            return Ok(0);
        }
        self.actual[v] = color;
        self.used[color as usize] = true;
        if is_basic(color) {
            self.basic_cost += cost;
        } else {
            self.special_cost += cost;
            self.ever_special[v] = true;
        }
        self.pending.push(RecolorEvent { vertex: v, from, to: color, cost, bucket });
        Ok(cost)
    }

    /// Recolor events since the last drain.
    pub fn drain_events(&mut self) -> Vec<RecolorEvent> {
        std::mem::take(&mut self.pending)
    }

    /// Every special-colored vertex must carry the special mark.
    pub fn special_marks_consistent(&self) -> bool {
        self.actual
            .iter()
            .zip(&self.special_mark)
            .all(|(&c, &s)| is_basic(c) || s)
    }
}

/// Edges whose endpoints currently share a color.
pub fn validate_coloring(colors: &[Color], edges: &[Edge]) -> Vec<Edge> {
    edges.iter().copied().filter(|e| colors[e.u] == colors[e.v]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_examples() {
        assert!(validate_coloring(&[1, 2], &[Edge::new(0, 1)]).is_empty());
        assert_eq!(validate_coloring(&[1, 1], &[Edge::new(0, 1)]), vec![Edge::new(0, 1)]);
        let c4 = [Edge::new(0, 1), Edge::new(1, 2), Edge::new(2, 3), Edge::new(3, 0)];
        assert!(validate_coloring(&[1, 2, 1, 2], &c4).is_empty());
    }

    #[test]
    fn recolor_costs() {
        let mut s = ColoringState::new(&[1, 1, 2], Palette::uniform(3, 8)).unwrap();
        assert_eq!(s.recolor_vertex(0, 2, Bucket::Sim).unwrap(), 1);
        assert_eq!(s.recolor_vertex(1, 4, Bucket::Recx).unwrap(), 8);
        assert_eq!(s.recolor_vertex(2, 2, Bucket::Sim).unwrap(), 0);
        assert_eq!(s.total_cost(), 9);
        assert_eq!((s.basic_cost(), s.special_cost()), (1, 8));
        assert!(matches!(s.recolor_vertex(0, 9, Bucket::Sim), Err(RecolorError::UnknownColor(9))));
        let events = s.drain_events();
        assert_eq!(events.len(), 2);
        assert_eq!(events.iter().map(|e| e.cost).sum::<u64>(), s.total_cost());
        assert!(!s.special_marks_consistent());
        s.mark_special(1);
        assert!(s.special_marks_consistent());
        assert!(s.ever_special(1));
    }

    #[test]
    fn heterogeneous_costs() {
        let p = Palette::new(vec![2, 5]);
        assert_eq!(p.cost(3).unwrap(), 2);
        assert_eq!(p.cost(4).unwrap(), 5);
        assert_eq!(p.cost(1).unwrap(), 1);
        assert!(p.cost(5).is_err());
        assert_eq!(p.max_cost(), 5);
    }
}
