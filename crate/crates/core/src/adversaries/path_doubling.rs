//! Randomized path doubling: in phase `h`, consecutive pairs of paths are
//! joined by an edge between uniformly chosen endpoints, so every component
//! is a path of `2^h` vertices at the end of the phase.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coloring::Color;
use crate::error::{RecolorError, Result};
use crate::graph::Edge;
use crate::instance::Instance;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathDoublingConfig {
    pub n: usize,
    pub d: u64,
    pub seed: u64,
    /// Number of doubling phases; defaults to the count derived from `d`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<u32>,
}

/// `ceil(log2 D - log2 log2 D)`, at least 1.
pub fn phases_for_cost(d: u64) -> Result<u32> {
    if d < 2 {
        return Err(RecolorError::InvalidParameter(format!("path doubling needs D >= 2, got {d}")));
    }
    let l = (d as f64).log2();
    let x = l - l.log2();
    let snapped = if (x - x.round()).abs() < 1e-9 { x.round() } else { x.ceil() };
    Ok((snapped as u32).max(1))
}

impl PathDoublingConfig {
    pub fn phase_count(&self) -> Result<u32> {
        match self.phases {
            Some(p) if (1..63).contains(&p) => Ok(p),
            Some(p) => Err(RecolorError::InvalidParameter(format!("phases must lie in [1, 62], got {p}"))),
            None => phases_for_cost(self.d),
        }
    }
}

/// Edge stream plus the phase of every edge.
#[derive(Clone, Debug, PartialEq)]
pub struct PathDoubling {
    pub instance: Instance,
    pub phase_of_edge: Vec<u32>,
    pub component_size: usize,
}

pub fn gen_path_doubling(cfg: &PathDoublingConfig) -> Result<PathDoubling> {
    let h = cfg.phase_count()?;
    let k = 1usize << h;
    if cfg.n == 0 || !cfg.n.is_multiple_of(k) {
        return Err(RecolorError::InvalidParameter(format!(
            "n = {} must be a positive multiple of 2^{h} = {k}",
            cfg.n
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let initial_colors: Vec<Color> = (0..cfg.n).map(|_| rng.gen_range(1..=2)).collect();
    // each path is stored by its two endpoints, left to right
    let mut paths: Vec<(usize, usize)> = (0..cfg.n).map(|v| (v, v)).collect();
    let mut edges = Vec::with_capacity(cfg.n);
    let mut phase_of_edge = Vec::with_capacity(cfg.n);
    for phase in 1..=h {
        let mut next = Vec::with_capacity(paths.len() / 2);
        for pair in paths.chunks(2) {
            let (a, b) = (pair[0], pair[1]);
            let (ja, ka) = if rng.gen_bool(0.5) { (a.0, a.1) } else { (a.1, a.0) };
            let (jb, kb) = if rng.gen_bool(0.5) { (b.0, b.1) } else { (b.1, b.0) };
            edges.push(Edge::new(ja, jb));
            phase_of_edge.push(phase);
            next.push((ka, kb));
        }
        paths = next;
    }
    let instance = Instance {
        n: cfg.n,
        d: cfg.d,
        delta: if h == 1 { 1 } else { 2 },
        beta_hint: Some(1),
        special_palette_size: cfg.n,
        special_costs: None,
        initial_colors,
        edges,
    };
    Ok(PathDoubling { instance, phase_of_edge, component_size: k })
}
