//! Problem instances and their JSON file format.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coloring::{is_basic, Color, Palette};
use crate::error::{RecolorError, Result};
use crate::graph::{Edge, Graph};

pub const FORMAT_VERSION: u32 = 1;

/// A named adaptive adversary that produces edges while the algorithm runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveSpec {
    pub adversary: String,
    pub params: serde_json::Value,
    pub seed: u64,
}

/// A fully materialised instance with a static edge stream.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub n: usize,
    /// Maximum special-color cost.
    pub d: u64,
    pub delta: usize,
    pub beta_hint: Option<u64>,
    pub special_palette_size: usize,
    pub special_costs: Option<Vec<u64>>,
    pub initial_colors: Vec<Color>,
    pub edges: Vec<Edge>,
}

impl Instance {
    /// Checks every structural requirement that can be checked up front.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(RecolorError::InvalidInstance(msg));
        if self.d < 1 {
            return bad("D must be at least 1".into());
        }
        if self.delta < 1 {
            return bad("delta must be at least 1".into());
        }
        if self.initial_colors.len() != self.n {
            return bad(format!(
                "initial_colors has {} entries, expected n = {}",
                self.initial_colors.len(),
                self.n
            ));
        }
        if let Some((v, c)) = self.initial_colors.iter().enumerate().find(|(_, &c)| !is_basic(c)) {
            return bad(format!("initial color of vertex {v} is {c}; must be 1 or 2"));
        }
        if let Some(costs) = &self.special_costs {
            if costs.len() != self.special_palette_size {
                return bad(format!(
                    "special_costs has {} entries, special_palette_size is {}",
                    costs.len(),
                    self.special_palette_size
                ));
            }
            if let Some(c) = costs.iter().find(|&&c| c < 1 || c > self.d) {
                return bad(format!("special cost {c} outside [1, D = {}]", self.d));
            }
        }
        if let Some(b) = self.beta_hint {
            if b < 1 {
                return bad("beta_hint must be at least 1".into());
            }
        }
        let g = Graph::from_edges(self.n, &self.edges)?;
        for v in 0..self.n {
            if g.degree(v) > self.delta {
                return Err(RecolorError::DegreeExceeded { vertex: v, delta: self.delta });
            }
        }
        Ok(())
    }

    /// The first `count` special colors of this instance.
    pub fn palette(&self, count: usize) -> Result<Palette> {
        if count > self.special_palette_size {
            return Err(RecolorError::InvalidInstance(format!(
                "algorithm needs {count} special colors, instance offers {}",
                self.special_palette_size
            )));
        }
        let costs = match &self.special_costs {
            Some(c) => c[..count].to_vec(),
            None => vec![self.d; count],
        };
        Ok(Palette::new(costs))
    }

    pub fn graph(&self) -> Result<Graph> {
        Graph::from_edges(self.n, &self.edges)
    }

    pub fn prefix(&self, len: usize) -> &[Edge] {
        &self.edges[..len.min(self.edges.len())]
    }
}

/// On-disk representation. Exactly one of `edges` or `adversary` is present.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "D", skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_hint: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub special_palette_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub special_costs: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_colors: Option<Vec<Color>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<Edge>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adversary: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Parsed contents of an instance file.
#[derive(Clone, Debug, PartialEq)]
pub enum InstanceSource {
    Static(Instance),
    Adaptive(AdaptiveSpec),
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> Self {
        InstanceFile {
            version: Some(FORMAT_VERSION),
            n: Some(inst.n),
            d: Some(inst.d),
            delta: Some(inst.delta),
            beta_hint: inst.beta_hint,
            special_palette_size: Some(inst.special_palette_size),
            special_costs: inst.special_costs.clone(),
            initial_colors: Some(inst.initial_colors.clone()),
            edges: Some(inst.edges.clone()),
            ..Default::default()
        }
    }

    pub fn from_adaptive(spec: &AdaptiveSpec) -> Self {
        InstanceFile {
            version: Some(FORMAT_VERSION),
            adversary: Some(spec.adversary.clone()),
            params: Some(spec.params.clone()),
            seed: Some(spec.seed),
            ..Default::default()
        }
    }

    pub fn into_source(self) -> Result<InstanceSource> {
        let bad = |msg: &str| Err(RecolorError::InvalidInstance(msg.to_string()));
        if let Some(v) = self.version {
            if v != FORMAT_VERSION {
                return Err(RecolorError::InvalidInstance(format!("unsupported version {v}")));
            }
        }
        match (self.edges, self.adversary) {
            (Some(_), Some(_)) => bad("both `edges` and `adversary` given"),
            (None, None) => bad("one of `edges` or `adversary` is required"),
            (None, Some(adversary)) => {
                if self.n.is_some() || self.initial_colors.is_some() || self.d.is_some() {
                    return bad("adaptive instances carry n, D and colors inside `params`");
                }
                Ok(InstanceSource::Adaptive(AdaptiveSpec {
                    adversary,
                    params: self.params.unwrap_or(serde_json::Value::Null),
                    seed: self.seed.unwrap_or(0),
                }))
            }
            (Some(edges), None) => {
                if self.params.is_some() || self.seed.is_some() {
                    return bad("`params`/`seed` only apply to adaptive instances");
                }
                let n = match self.n {
                    Some(n) => n,
                    None => return bad("missing `n`"),
                };
                let initial_colors = match self.initial_colors {
                    Some(c) => c,
                    None => return bad("missing `initial_colors`"),
                };
                let d = match self.d {
                    Some(d) => d,
                    None => return bad("missing `D`"),
                };
                let special_palette_size = self
                    .special_palette_size
                    .or(self.special_costs.as_ref().map(Vec::len))
                    .unwrap_or(n);
                let delta = match self.delta {
                    Some(delta) => delta,
                    None => Graph::from_edges(n, &edges)?.max_degree().max(1),
                };
                let inst = Instance {
                    n,
                    d,
                    delta,
                    beta_hint: self.beta_hint,
                    special_palette_size,
                    special_costs: self.special_costs,
                    initial_colors,
                    edges,
                };
                inst.validate()?;
                Ok(InstanceSource::Static(inst))
            }
        }
    }
}

pub fn read_instance(path: &Path) -> Result<InstanceSource> {
    let text = std::fs::read_to_string(path)?;
    parse_instance(&text)
}

pub fn parse_instance(text: &str) -> Result<InstanceSource> {
    let file: InstanceFile = serde_json::from_str(text)?;
    file.into_source()
}

/// Pretty JSON text of an instance file, newline-terminated.
pub fn instance_to_string(source: &InstanceSource) -> Result<String> {
    let file = match source {
        InstanceSource::Static(inst) => InstanceFile::from_instance(inst),
        InstanceSource::Adaptive(spec) => InstanceFile::from_adaptive(spec),
    };
    Ok(serde_json::to_string_pretty(&file)? + "\n")
}

pub fn write_instance(path: &Path, source: &InstanceSource) -> Result<()> {
    std::fs::write(path, instance_to_string(source)?)?;
    Ok(())
}
