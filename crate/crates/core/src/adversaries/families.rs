//! Random graph families with a known bond size: uniform random trees,
//! disjoint even cycles, and disjoint 2-by-m ladders.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coloring::{other_basic, Color};
use crate::error::{RecolorError, Result};
use crate::graph::{Edge, Graph};
use crate::instance::Instance;
use crate::oracles::{bipartition, largest_bond_bruteforce, BOND_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Forest,
    EvenCycles,
    Ladders,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Forest => "forest",
            Family::EvenCycles => "even_cycles",
            Family::Ladders => "ladders",
        }
    }

    /// Largest bond of any instance of the family, when it is fixed.
    pub fn known_beta(&self) -> Option<u64> {
        match self {
            Family::Forest => Some(1),
            Family::EvenCycles => Some(2),
            Family::Ladders => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = RecolorError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forest" => Ok(Family::Forest),
            "even_cycles" | "cycles" => Ok(Family::EvenCycles),
            "ladders" => Ok(Family::Ladders),
            other => Err(RecolorError::InvalidParameter(format!("unknown family {other:?}"))),
        }
    }
}

/// Probability that a vertex's initial color is flipped away from a proper
/// coloring of the final graph.
pub const PERTURB_NUM: u32 = 1;
pub const PERTURB_DEN: u32 = 4;

fn random_tree(n: usize, rng: &mut ChaCha8Rng) -> Vec<Edge> {
    if n == 2 {
        return vec![Edge::new(0, 1)];
    }
    // decode a uniformly random Prüfer sequence
    let code: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &c in &code {
        degree[c] += 1;
    }
    let mut leaves: std::collections::BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &c in &code {
        let leaf = *leaves.iter().next().expect("a tree always has a leaf");
        leaves.remove(&leaf);
        edges.push(Edge::new(leaf, c));
        degree[c] -= 1;
        if degree[c] == 1 {
            leaves.insert(c);
        }
    }
    let rest: Vec<usize> = leaves.into_iter().collect();
    edges.push(Edge::new(rest[0], rest[1]));
    edges
}

/// Splits `n` into block sizes from `sizes`, with a final remainder block
/// left as isolated vertices when nothing fits.
fn blocks(n: usize, sizes: &[usize], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut out = Vec::new();
    let mut left = n;
    let min = sizes[0];
    while left >= min {
        let fitting: Vec<usize> = sizes.iter().copied().filter(|&s| s <= left).collect();
        let s = *fitting.choose(rng).expect("min size fits");
        out.push(s);
        left -= s;
    }
    out
}

fn even_cycles(n: usize, rng: &mut ChaCha8Rng) -> Vec<Edge> {
    let sizes: Vec<usize> = (4..=16).step_by(2).collect();
    let mut edges = Vec::new();
    let mut base = 0;
    for len in blocks(n, &sizes, rng) {
        for i in 0..len {
            edges.push(Edge::new(base + i, base + (i + 1) % len));
        }
        base += len;
    }
    edges
}

/// Edges of a 2-by-`m` ladder on vertices `base..base + 2m`.
pub fn ladder_edges(base: usize, m: usize) -> Vec<Edge> {
    let mut edges = Vec::new();
    for i in 0..m {
        edges.push(Edge::new(base + i, base + m + i));
        if i + 1 < m {
            edges.push(Edge::new(base + i, base + i + 1));
            edges.push(Edge::new(base + m + i, base + m + i + 1));
        }
    }
    edges
}

/// Largest bond of a single 2-by-`m` ladder, by brute force.
pub fn ladder_beta(m: usize) -> Result<u64> {
    Ok(largest_bond_bruteforce(2 * m, &ladder_edges(0, m), BOND_CAP)?.beta)
}

/// Returns the ladder edges and the largest rung count used.
fn ladders(n: usize, rng: &mut ChaCha8Rng) -> (Vec<Edge>, usize) {
    let sizes: Vec<usize> = (2..=8).map(|m| 2 * m).collect();
    let mut edges = Vec::new();
    let mut base = 0;
    let mut widest = 0;
    for size in blocks(n, &sizes, rng) {
        edges.extend(ladder_edges(base, size / 2));
        widest = widest.max(size / 2);
        base += size;
    }
    (edges, widest)
}

/// A random member of `family` on `n` vertices with shuffled arrival order
/// and random endpoint order. Initial colors are a proper coloring of the
/// final graph with each vertex flipped independently with probability 1/4.
pub fn gen_bounded_bond(family: Family, n: usize, d: u64, seed: u64) -> Result<Instance> {
    if n < 2 {
        return Err(RecolorError::InvalidParameter("families need n >= 2".into()));
    }
    if family == Family::EvenCycles && n < 4 {
        return Err(RecolorError::InvalidParameter("even cycles need n >= 4".into()));
    }
    if family == Family::Ladders && n < 4 {
        return Err(RecolorError::InvalidParameter("ladders need n >= 4".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut edges, beta) = match family {
        Family::Forest => (random_tree(n, &mut rng), 1),
        Family::EvenCycles => (even_cycles(n, &mut rng), 2),
        Family::Ladders => {
            let (edges, widest) = ladders(n, &mut rng);
            (edges, ladder_beta(widest)?)
        }
    };
    // relabel vertices so structure is not tied to ids
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    for e in edges.iter_mut() {
        *e = if rng.gen_bool(0.5) { Edge::new(perm[e.u], perm[e.v]) } else { Edge::new(perm[e.v], perm[e.u]) };
    }
    edges.shuffle(&mut rng);
    let side = bipartition(n, &edges)?;
    let initial_colors: Vec<Color> = side
        .iter()
        .map(|&s| {
            let c = s as Color + 1;
            if rng.gen_ratio(PERTURB_NUM, PERTURB_DEN) {
                other_basic(c)
            } else {
                c
            }
        })
        .collect();
    let delta = Graph::from_edges(n, &edges)?.max_degree().max(1);
    Ok(Instance {
        n,
        d,
        delta,
        beta_hint: Some(beta),
        special_palette_size: n,
        special_costs: None,
        initial_colors,
        edges,
    })
}
