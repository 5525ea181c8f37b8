//! Reshapes sweep aggregates into `(series, x, y)` points for external
//! plotting: x is log2 D or epsilon, y the mean ratio.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::harness::sweep::SweepRow;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XAxis {
    Log2D,
    Epsilon,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub series: String,
    pub x: f64,
    pub y: f64,
}

/// Uses log2 D when the aggregates span more than one D, else epsilon.
pub fn choose_axis(rows: &[SweepRow]) -> XAxis {
    let mut ds: Vec<u64> = rows.iter().filter(|r| r.is_aggregate()).map(|r| r.d).collect();
    ds.sort_unstable();
    ds.dedup();
    if ds.len() > 1 {
        XAxis::Log2D
    } else {
        XAxis::Epsilon
    }
}

/// One point per aggregate row with a ratio; series are named by algorithm
/// and n, in first-appearance order.
pub fn plot_points(rows: &[SweepRow], axis: XAxis) -> Vec<PlotPoint> {
    rows.iter()
        .filter(|r| r.is_aggregate())
        .filter_map(|r| {
            let y = r.ratio?;
            let x = match axis {
                XAxis::Log2D => (r.d.max(1) as f64).log2(),
                XAxis::Epsilon => r.epsilon.to_f64(),
            };
            Some(PlotPoint { series: format!("{} n={}", r.algorithm, r.n), x, y })
        })
        .collect()
}

pub fn write_points<W: Write>(points: &[PlotPoint], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    if points.is_empty() {
        wr.write_record(["series", "x", "y"])?;
    }
    for p in points {
        wr.serialize(p)?;
    }
    wr.flush()?;
    Ok(())
}
