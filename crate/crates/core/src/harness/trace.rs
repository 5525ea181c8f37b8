//! JSONL run traces: one header line, one line per arriving edge, and a
//! closing summary line.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::coloring::{Bucket, Color, RecolorEvent};
use crate::error::{RecolorError, Result};
use crate::graph::Edge;
use crate::harness::run::{Algo, BetaSource, RunParams, RunResult};
use crate::instance::Instance;
use crate::moderation::Route;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub run_id: String,
    pub algorithm: Algo,
    pub params: RunParams,
    pub n: usize,
    #[serde(rename = "D")]
    pub d: u64,
    pub delta: usize,
    pub beta_hint: Option<u64>,
    pub special_palette_size: usize,
    pub special_costs: Option<Vec<u64>>,
    pub initial_colors: Vec<Color>,
    /// Largest cost among the special colors the algorithm may use.
    pub max_special_cost: u64,
    pub uniform_special_cost: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub i: usize,
    pub edge: Edge,
    pub route: Option<Route>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub level: Option<u32>,
    pub events: Vec<RecolorEvent>,
    pub cost: u64,
    pub cumulative_cost: u64,
}

/// Cost split by the part of the algorithm that paid it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Buckets {
    pub sim: u64,
    pub recx: u64,
    pub promote: u64,
    pub greedy: u64,
}

impl Buckets {
    pub fn add(&mut self, bucket: Bucket, cost: u64) {
        match bucket {
            Bucket::Sim => self.sim += cost,
            Bucket::Recx => self.recx += cost,
            Bucket::Promote => self.promote += cost,
            Bucket::Greedy => self.greedy += cost,
        }
    }

    pub fn total(&self) -> u64 {
        self.sim + self.recx + self.promote + self.greedy
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub result: RunResult,
    pub buckets: Buckets,
    pub special_pairs: Option<usize>,
    pub beta_source: BetaSource,
    pub violation_messages: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum TraceLine {
    Header(TraceHeader),
    Step(TraceStep),
    Summary(TraceSummary),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub header: TraceHeader,
    pub steps: Vec<TraceStep>,
    pub summary: TraceSummary,
}

impl Trace {
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        let mut line = |l: &TraceLine| -> Result<()> {
            serde_json::to_writer(&mut w, l)?;
            w.write_all(b"\n")?;
            Ok(())
        };
        line(&TraceLine::Header(self.header.clone()))?;
        for s in &self.steps {
            line(&TraceLine::Step(s.clone()))?;
        }
        line(&TraceLine::Summary(self.summary.clone()))?;
        w.flush()?;
        Ok(())
    }

    pub fn to_jsonl_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf)?;
        Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Trace> {
        let bad = |msg: String| RecolorError::InvalidInstance(format!("trace: {msg}"));
        let mut header = None;
        let mut steps = Vec::new();
        let mut summary = None;
        for (no, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<TraceLine>(&line)? {
                TraceLine::Header(h) if header.is_none() && steps.is_empty() => header = Some(h),
                TraceLine::Step(s) if header.is_some() && summary.is_none() => steps.push(s),
                TraceLine::Summary(s) if header.is_some() && summary.is_none() => summary = Some(s),
                _ => return Err(bad(format!("line {} is out of order", no + 1))),
            }
        }
        let header = header.ok_or_else(|| bad("missing header".into()))?;
        let summary = summary.ok_or_else(|| bad("missing summary".into()))?;
        Ok(Trace { header, steps, summary })
    }

    /// The static instance the run consumed, with adaptive streams frozen.
    pub fn instance(&self) -> Instance {
        let h = &self.header;
        Instance {
            n: h.n,
            d: h.d,
            delta: h.delta,
            beta_hint: h.beta_hint,
            special_palette_size: h.special_palette_size,
            special_costs: h.special_costs.clone(),
            initial_colors: h.initial_colors.clone(),
            edges: self.steps.iter().map(|s| s.edge).collect(),
        }
    }
}
