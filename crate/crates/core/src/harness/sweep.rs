//! Parameter sweeps: one run per grid cell on a worker pool, merged back in
//! grid order, written as CSV with per-cell aggregate rows.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversaries::{gen_bounded_bond, gen_path_doubling, DominatingConfig, Family, PathDoublingConfig};
use crate::error::{RecolorError, Result};
use crate::fraction::Fraction;
use crate::harness::run::{run, Algo, RunOptions, RunParams, RunResult, DOMINATING};
use crate::instance::{AdaptiveSpec, InstanceSource};
use crate::sim::FlipPolicy;

/// Instance families a sweep can draw from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    PathDoubling,
    Dominating,
    Forest,
    EvenCycles,
    Ladders,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::PathDoubling => "path_doubling",
            Suite::Dominating => "dominating",
            Suite::Forest => "forest",
            Suite::EvenCycles => "cycles",
            Suite::Ladders => "ladders",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = RecolorError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "path_doubling" => Ok(Suite::PathDoubling),
            "dominating" => Ok(Suite::Dominating),
            "forest" => Ok(Suite::Forest),
            "cycles" | "even_cycles" => Ok(Suite::EvenCycles),
            "ladders" => Ok(Suite::Ladders),
            other => Err(RecolorError::InvalidParameter(format!("unknown family {other:?}"))),
        }
    }
}

/// Builds the instance of `suite` for one grid cell. `phases` overrides the
/// number of doubling phases of the path-doubling family.
pub fn make_source(suite: Suite, n: usize, d: u64, seed: u64, phases: Option<u32>) -> Result<InstanceSource> {
    if d < 1 {
        return Err(RecolorError::InvalidParameter("D must be at least 1".into()));
    }
    let family = match suite {
        Suite::PathDoubling => {
            let pd = gen_path_doubling(&PathDoublingConfig { n, d, seed, phases })?;
            return Ok(InstanceSource::Static(pd.instance));
        }
        Suite::Dominating => {
            let cfg = DominatingConfig { n, d, seed };
            return Ok(InstanceSource::Adaptive(AdaptiveSpec {
                adversary: DOMINATING.into(),
                params: cfg.to_params(),
                seed,
            }));
        }
        Suite::Forest => Family::Forest,
        Suite::EvenCycles => Family::EvenCycles,
        Suite::Ladders => Family::Ladders,
    };
    Ok(InstanceSource::Static(gen_bounded_bond(family, n, d, seed)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub suite: Suite,
    pub algos: Vec<Algo>,
    pub ns: Vec<usize>,
    pub ds: Vec<u64>,
    pub epsilons: Vec<Fraction>,
    pub seeds: Vec<u64>,
    pub alpha: Fraction,
    pub policy: FlipPolicy,
    pub phases: Option<u32>,
    pub beta: Option<u64>,
}

/// One grid cell; seeds vary fastest so each aggregate group is contiguous.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub algo: Algo,
    pub n: usize,
    pub d: u64,
    pub epsilon: Fraction,
    pub seed: u64,
}

impl Cell {
    fn group_key(&self, suite: Suite) -> String {
        format!("{suite}-n{}-D{}-eps{}-{}", self.n, self.d, self.epsilon, self.algo)
    }

    fn run_id(&self, suite: Suite) -> String {
        format!("{}-s{}", self.group_key(suite), self.seed)
    }
}

impl Grid {
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &algo in &self.algos {
            for &n in &self.ns {
                for &d in &self.ds {
                    for &epsilon in &self.epsilons {
                        for &seed in &self.seeds {
                            out.push(Cell { algo, n, d, epsilon, seed });
                        }
                    }
                }
            }
        }
        out
    }
}

/// CSV columns, in order.
pub const COLUMNS: [&str; 21] = [
    "run_id",
    "algorithm",
    "n",
    "m",
    "D",
    "alpha",
    "epsilon",
    "beta",
    "seed",
    "policy",
    "cost_total",
    "cost_basic",
    "cost_special",
    "opt2_final",
    "ratio",
    "colors_used",
    "specials_marked",
    "excess_edges",
    "max_level",
    "violations",
    "ratio_max",
];

/// A sweep CSV row: either one run, or the aggregate of a cell's seeds
/// (`run_id` prefixed `mean:`, `ratio` the mean, `ratio_max` the maximum).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub run_id: String,
    pub algorithm: Algo,
    pub n: usize,
    pub m: Option<usize>,
    #[serde(rename = "D")]
    pub d: u64,
    pub alpha: Fraction,
    pub epsilon: Fraction,
    pub beta: Option<u64>,
    pub seed: Option<u64>,
    pub policy: FlipPolicy,
    pub cost_total: Option<u64>,
    pub cost_basic: Option<u64>,
    pub cost_special: Option<u64>,
    pub opt2_final: Option<u64>,
    pub ratio: Option<f64>,
    pub colors_used: Option<usize>,
    pub specials_marked: Option<usize>,
    pub excess_edges: Option<usize>,
    pub max_level: Option<u32>,
    pub violations: usize,
    pub ratio_max: Option<f64>,
}

pub const AGGREGATE_PREFIX: &str = "mean:";

impl SweepRow {
    pub fn is_aggregate(&self) -> bool {
        self.run_id.starts_with(AGGREGATE_PREFIX)
    }

    fn from_result(r: &RunResult) -> Self {
        SweepRow {
            run_id: r.run_id.clone(),
            algorithm: r.algorithm,
            n: r.n,
            m: Some(r.m),
            d: r.d,
            alpha: r.alpha,
            epsilon: r.epsilon,
            beta: r.beta,
            seed: r.seed,
            policy: r.policy,
            cost_total: Some(r.cost_total),
            cost_basic: Some(r.cost_basic),
            cost_special: Some(r.cost_special),
            opt2_final: Some(r.opt2_final),
            ratio: r.ratio,
            colors_used: Some(r.colors_used),
            specials_marked: Some(r.specials_marked),
            excess_edges: Some(r.excess_edges),
            max_level: Some(r.max_level),
            violations: r.violations,
            ratio_max: None,
        }
    }

    fn failed(grid: &Grid, cell: &Cell) -> Self {
        SweepRow {
            run_id: cell.run_id(grid.suite),
            algorithm: cell.algo,
            n: cell.n,
            m: None,
            d: cell.d,
            alpha: grid.alpha,
            epsilon: cell.epsilon,
            beta: grid.beta,
            seed: Some(cell.seed),
            policy: grid.policy,
            cost_total: None,
            cost_basic: None,
            cost_special: None,
            opt2_final: None,
            ratio: None,
            colors_used: None,
            specials_marked: None,
            excess_edges: None,
            max_level: None,
            violations: 1,
            ratio_max: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    /// `(run_id, message)` for cells whose run returned an error.
    pub errors: Vec<(String, String)>,
}

impl SweepOutput {
    pub fn total_violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.is_aggregate()).map(|r| r.violations).sum()
    }
}

fn run_cell(grid: &Grid, cell: &Cell) -> Result<RunResult> {
    let source = make_source(grid.suite, cell.n, cell.d, cell.seed, grid.phases)?;
    let params = RunParams {
        alpha: grid.alpha,
        epsilon: cell.epsilon,
        policy: grid.policy,
        beta: grid.beta,
        seed: Some(cell.seed),
    };
    Ok(run(&source, cell.algo, &params, &cell.run_id(grid.suite), RunOptions::default())?.result)
}

fn aggregate(grid: &Grid, cell: &Cell, rows: &[SweepRow]) -> SweepRow {
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    let mean = (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64);
    let max = ratios.iter().copied().reduce(f64::max);
    let mut row = SweepRow::failed(grid, cell);
    row.run_id = format!("{AGGREGATE_PREFIX}{}", cell.group_key(grid.suite));
    row.seed = None;
    row.ratio = mean;
    row.ratio_max = max;
    row.violations = rows.iter().map(|r| r.violations).sum();
    row
}

/// Runs every cell of `grid` and appends one aggregate row per
/// `(algorithm, n, D, epsilon)` group after its runs.
pub fn sweep(grid: &Grid) -> SweepOutput {
    let cells = grid.cells();
    let results: Vec<Result<RunResult>> = cells.par_iter().map(|c| run_cell(grid, c)).collect();
    let mut out = SweepOutput::default();
    let mut group: Vec<SweepRow> = Vec::new();
    for (i, (cell, res)) in cells.iter().zip(results).enumerate() {
        let row = match res {
            Ok(r) => SweepRow::from_result(&r),
            Err(e) => {
                out.errors.push((cell.run_id(grid.suite), e.to_string()));
                SweepRow::failed(grid, cell)
            }
        };
        group.push(row);
        let last_in_group = cells.get(i + 1).is_none_or(|next| next.group_key(grid.suite) != cell.group_key(grid.suite));
        if last_in_group {
            let agg = aggregate(grid, cell, &group);
            out.rows.append(&mut group);
            out.rows.push(agg);
        }
    }
    out
}

pub fn write_csv<W: Write>(rows: &[SweepRow], w: W) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wr.write_record(COLUMNS)?;
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<SweepRow>> {
    let mut rd = csv::Reader::from_reader(r);
    let rows = rd.deserialize().collect::<std::result::Result<Vec<SweepRow>, _>>()?;
    Ok(rows)
}
