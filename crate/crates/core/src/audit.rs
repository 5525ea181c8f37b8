//! Post-hoc verification of runs: the charging scheme over a simulated
//! two-color log, the bond inequality for connected vertex sets, the
//! witness bound on excess edges, and cost reconciliation of traces.

use serde::{Deserialize, Serialize};

use crate::error::{RecolorError, Result};
use crate::fraction::{ceil_log2, Fraction};
use crate::graph::{ComponentIndex, Edge, Graph};
use crate::harness::run::Algo;
use crate::harness::trace::{Buckets, Trace};
use crate::moderation::{classify_component, ModerationState, SizeClass, Weight};
use crate::sim::{FedStep, FlipPolicy, Side};

/// The four ways a recoloring step is paid for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChargeCase {
    /// The flipped component is small: all of it is charged.
    Small,
    /// Large and light: its vertices outside `R` are charged.
    LargeLight,
    /// Large and heavy, other side small and heavy: the other side's
    /// recolored vertices are charged.
    LargeHeavySmall,
    /// Large and heavy, other side light: the flipped component's fresh set
    /// is charged.
    LargeHeavyFresh,
}

impl ChargeCase {
    pub const ALL: [ChargeCase; 4] =
        [ChargeCase::Small, ChargeCase::LargeLight, ChargeCase::LargeHeavySmall, ChargeCase::LargeHeavyFresh];

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepCharge {
    /// Index into the simulator log.
    pub step: usize,
    pub case: ChargeCase,
    pub flipped_size: usize,
    pub charged: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargeReport {
    pub threshold: u64,
    pub alpha: Fraction,
    pub policy: FlipPolicy,
    /// Whether the claims are asserted (policy guarantees doubling) or only
    /// reported.
    pub hard: bool,
    pub total_cost: u64,
    pub iplus_cost: u64,
    pub r_size: usize,
    pub steps: Vec<StepCharge>,
    pub case_steps: [usize; 4],
    /// Smallest `|X(C)| / |C|` seen over live components, as `(x, size)`.
    pub min_fresh_ratio: Option<(usize, usize)>,
    /// Smallest `charged / |C|` over charged steps, as `(charged, size)`.
    pub min_step_ratio: Option<(usize, usize)>,
    pub max_vertex_charges: u32,
    pub vertex_charge_bound: u32,
    /// Claim failures: the fresh-set size, the per-step charge and the
    /// per-vertex charge count.
    pub claim_failures: Vec<String>,
    /// Failures of properties that hold for every policy (charges land in
    /// `R`; the replay matches the log).
    pub structural_failures: Vec<String>,
}

impl ChargeReport {
    /// Failures that count as violations under this report's policy.
    pub fn violations(&self) -> Vec<String> {
        let mut v = self.structural_failures.clone();
        if self.hard {
            v.extend(self.claim_failures.iter().cloned());
        }
        v
    }
}

/// `5 |X| >= |C| (1 - alpha)`.
fn fresh_ok(x: usize, size: usize, alpha: Fraction) -> bool {
    5 * x as u128 * alpha.denom() as u128 >= size as u128 * (alpha.denom() - alpha.numer()) as u128
}

/// `20 * charged >= |C| (1 - alpha)`.
fn step_ok(charged: usize, size: usize, alpha: Fraction) -> bool {
    20 * charged as u128 * alpha.denom() as u128 >= size as u128 * (alpha.denom() - alpha.numer()) as u128
}

fn ratio_min(cur: Option<(usize, usize)>, cand: (usize, usize)) -> Option<(usize, usize)> {
    match cur {
        Some((a, b)) if (a as u128) * (cand.1 as u128) <= (cand.0 as u128) * (b as u128) => cur,
        _ => Some(cand),
    }
}

/// Replays a simulator log, applying the four charging cases to every
/// flipping step whose component grows by a factor of at least 5/4, and
/// maintaining the fresh sets `X(C)` of every component.
///
/// Fails with [`RecolorError::AuditPrecondition`] when the log merges two
/// large heavy components.
pub fn audit_charging(
    n: usize,
    log: &[FedStep],
    threshold: u64,
    alpha: Fraction,
    policy: FlipPolicy,
) -> Result<ChargeReport> {
    let mut index = ComponentIndex::new(n);
    let mut fresh: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut charges = vec![[0u32; 4]; n];
    let mut report = ChargeReport {
        threshold,
        alpha,
        policy,
        hard: policy.guarantees_doubling(),
        total_cost: 0,
        iplus_cost: 0,
        r_size: 0,
        steps: Vec::new(),
        case_steps: [0; 4],
        min_fresh_ratio: None,
        min_step_ratio: None,
        max_vertex_charges: 0,
        vertex_charge_bound: ceil_log2(threshold.max(1)) + 4,
        claim_failures: Vec::new(),
        structural_failures: Vec::new(),
    };

    for (i, step) in log.iter().enumerate() {
        let e = step.edge;
        e.check(n)?;
        let (ru, rv) = (index.find(e.u), index.find(e.v));
        if index.size_of(ru) != step.size_u || index.size_of(rv) != step.size_v {
            report.structural_failures.push(format!("step {i}: replayed component sizes differ from the log"));
        }
        let class_u = classify_component(index.size_of(ru), index.marked_in(ru), threshold, alpha);
        let class_v = classify_component(index.size_of(rv), index.marked_in(rv), threshold, alpha);
        let large_heavy = (SizeClass::Large, Weight::Heavy);
        if ru != rv && class_u == large_heavy && class_v == large_heavy {
            return Err(RecolorError::AuditPrecondition(format!(
                "step {i}: edge ({}, {}) joins two large heavy components",
                e.u, e.v
            )));
        }

        let Some(side) = step.flipped else {
            if ru != rv {
                let (a, b) = (std::mem::take(&mut fresh[ru]), std::mem::take(&mut fresh[rv]));
                let root = index.apply_edge(e)?.root;
                fresh[root] = a;
                fresh[root].extend(b);
            }
            continue;
        };
        if ru == rv {
            report.structural_failures.push(format!("step {i}: flip inside one component"));
            continue;
        }
        let (c, c_other, class_c, class_other) = match side {
            Side::U => (ru, rv, class_u, class_v),
            Side::V => (rv, ru, class_v, class_u),
        };
        let size_c = index.size_of(c);
        let merged = size_c + index.size_of(c_other);
        report.total_cost += size_c as u64;
        if size_c != step.cost {
            report.structural_failures.push(format!("step {i}: log cost {} but component has {size_c}", step.cost));
        }
        let members_c: Vec<usize> = index.members(c).collect();
        let iplus = 4 * merged >= 5 * size_c;

        if iplus {
            report.iplus_cost += size_c as u64;
            let (case, charged): (ChargeCase, Vec<usize>) = match (class_c, class_other) {
                ((SizeClass::Small, _), _) => (ChargeCase::Small, members_c.clone()),
                ((SizeClass::Large, Weight::Light), _) => {
                    (ChargeCase::LargeLight, members_c.iter().copied().filter(|&w| !index.is_marked(w)).collect())
                }
                (_, (_, Weight::Heavy)) => (
                    ChargeCase::LargeHeavySmall,
                    index.members(c_other).filter(|&w| index.is_marked(w)).collect(),
                ),
                (_, (_, Weight::Light)) => (ChargeCase::LargeHeavyFresh, fresh[c].clone()),
            };
            for &w in &charged {
                charges[w][case.index()] += 1;
            }
            report.case_steps[case.index()] += 1;
            report.min_step_ratio = ratio_min(report.min_step_ratio, (charged.len(), size_c));
            if !step_ok(charged.len(), size_c, alpha) {
                report.claim_failures.push(format!(
                    "step {i}: {} charged for a flip of {size_c} ({case:?})",
                    charged.len()
                ));
            }
            report.steps.push(StepCharge { step: i, case, flipped_size: size_c, charged: charged.len() });

            for &w in &members_c {
                index.mark(w);
            }
            // every charged vertex must now be in R
            if let Some(&w) = charged.iter().find(|&&w| !index.is_marked(w)) {
                report.structural_failures.push(format!("step {i}: charged vertex {w} is outside R"));
            }
        } else {
            for &w in &members_c {
                index.mark(w);
            }
        }

        let other_light = class_other.1 == Weight::Light;
        let (a, b) = (std::mem::take(&mut fresh[c]), std::mem::take(&mut fresh[c_other]));
        let root = index.apply_edge(e)?.root;
        fresh[root] = if other_light {
            index.members(root).filter(|&w| !index.is_marked(w)).collect()
        } else {
            let mut u = a;
            u.extend(b);
            u
        };
        let x = fresh[root].len();
        report.min_fresh_ratio = ratio_min(report.min_fresh_ratio, (x, merged));
        if !fresh_ok(x, merged, alpha) {
            report.claim_failures.push(format!("step {i}: fresh set {x} of component {merged}"));
        }
    }

    for (v, c) in charges.iter().enumerate() {
        let total: u32 = c.iter().sum();
        report.max_vertex_charges = report.max_vertex_charges.max(total);
        if total > report.vertex_charge_bound {
            report.claim_failures.push(format!(
                "vertex {v} charged {total} times (bound {})",
                report.vertex_charge_bound
            ));
        }
        if c[ChargeCase::LargeLight.index()] > 1
            || c[ChargeCase::LargeHeavySmall.index()] > 1
            || c[ChargeCase::LargeHeavyFresh.index()] > 1
        {
            report.claim_failures.push(format!("vertex {v} charged more than once by a one-shot case: {c:?}"));
        }
    }
    report.r_size = index.total_marked();
    Ok(report)
}

/// Charging audit of the simulated sequence of one moderation state.
pub fn audit_moderated_charging(m: &ModerationState) -> Result<ChargeReport> {
    let sim = m.sim();
    audit_charging(sim.n(), sim.log(), m.threshold(), m.alpha(), sim.policy())
}

/// `cost <= 280 (log2 D + 4) |R|` for the simulated sequence with
/// threshold `d`.
pub fn moderate_cost_ok(cost: u64, r_size: usize, d: u64) -> bool {
    let bound = 280.0 * ((d.max(1) as f64).log2() + 4.0) * r_size as f64;
    cost as f64 <= bound
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BondMode {
    /// The parts cover every vertex.
    Partition,
    /// The parts are disjoint but need not cover the graph.
    Subsets,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BondAudit {
    pub parts: usize,
    pub cross_edges: u64,
    pub bound: u64,
    pub passed: bool,
}

/// Counts edges between distinct parts and compares with `(k - 1) beta`.
/// Every part must be non-empty and induce a connected subgraph.
pub fn audit_bond_partition(n: usize, edges: &[Edge], parts: &[Vec<usize>], beta: u64, mode: BondMode) -> Result<BondAudit> {
    let g = Graph::from_edges(n, edges)?;
    let mut part_of = vec![usize::MAX; n];
    for (p, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(RecolorError::AuditPrecondition(format!("part {p} is empty")));
        }
        for &v in part {
            if v >= n {
                return Err(RecolorError::VertexOutOfRange { vertex: v, n });
            }
            if part_of[v] != usize::MAX {
                return Err(RecolorError::AuditPrecondition(format!("vertex {v} lies in two parts")));
            }
            part_of[v] = p;
        }
    }
    if mode == BondMode::Partition {
        if let Some(v) = part_of.iter().position(|&p| p == usize::MAX) {
            return Err(RecolorError::AuditPrecondition(format!("vertex {v} lies in no part")));
        }
    }
    for (p, part) in parts.iter().enumerate() {
        let mut seen = vec![part[0]];
        let mut reached = std::collections::HashSet::from([part[0]]);
        while let Some(x) = seen.pop() {
            for y in g.neighbors(x) {
                if part_of[y] == p && reached.insert(y) {
                    seen.push(y);
                }
            }
        }
        if reached.len() != part.len() {
            return Err(RecolorError::AuditPrecondition(format!("part {p} does not induce a connected subgraph")));
        }
    }
    let cross_edges = edges
        .iter()
        .filter(|e| part_of[e.u] != usize::MAX && part_of[e.v] != usize::MAX && part_of[e.u] != part_of[e.v])
        .count() as u64;
    let bound = (parts.len() as u64).saturating_sub(1) * beta;
    Ok(BondAudit { parts: parts.len(), cross_edges, bound, passed: cross_edges <= bound })
}

/// The components of the simulated sequence, each connected through its
/// own edges, as a partition of all vertices.
pub fn sim_partition(m: &ModerationState) -> Vec<Vec<usize>> {
    let idx = m.sim().index();
    let mut roots: Vec<usize> = idx.roots().collect();
    roots.sort_by_key(|&r| idx.min_vertex_of(r));
    roots.into_iter().map(|r| {
        let mut p: Vec<usize> = idx.members(r).collect();
        p.sort_unstable();
        p
    }).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessAudit {
    pub excess_edges: usize,
    pub witness_sets: usize,
    pub r_size: usize,
    pub threshold: u64,
    pub alpha: Fraction,
    pub beta: u64,
    /// `|σ^exc| * alpha * threshold <= beta * |R|`.
    pub excess_ok: bool,
    /// `sets * alpha * threshold <= |R|`.
    pub count_ok: bool,
}

pub fn audit_witness(m: &ModerationState, beta: u64) -> WitnessAudit {
    WitnessAudit {
        excess_edges: m.exc_seq().len(),
        witness_sets: m.witness().sets().len(),
        r_size: m.sim().r_size(),
        threshold: m.threshold(),
        alpha: m.alpha(),
        beta,
        excess_ok: m.excess_bound_ok(beta),
        count_ok: m.witness_count_ok(),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostAudit {
    pub total: u64,
    pub buckets: Buckets,
    /// `(|V'| + |E'|) * D` for the excess procedure, when it applies.
    pub recx_bound: Option<u64>,
}

/// Recomputes every total in a trace from its recoloring events. Any
/// mismatch is an accounting bug and fails hard.
pub fn audit_costs(trace: &Trace) -> Result<CostAudit> {
    let mut audit = CostAudit::default();
    let mut cumulative = 0u64;
    for step in &trace.steps {
        let sum: u64 = step.events.iter().map(|ev| ev.cost).sum();
        if sum != step.cost {
            return Err(RecolorError::Accounting(format!(
                "step {}: events sum to {sum}, step cost {}",
                step.i, step.cost
            )));
        }
        for ev in &step.events {
            audit.buckets.add(ev.bucket, ev.cost);
        }
        cumulative += sum;
        if cumulative != step.cumulative_cost {
            return Err(RecolorError::Accounting(format!(
                "step {}: cumulative {cumulative}, trace says {}",
                step.i, step.cumulative_cost
            )));
        }
    }
    audit.total = cumulative;
    let summary = &trace.summary;
    let result = &summary.result;
    if result.cost_total != cumulative {
        return Err(RecolorError::Accounting(format!(
            "summary total {} differs from recomputed {cumulative}",
            result.cost_total
        )));
    }
    if result.cost_basic + result.cost_special != cumulative {
        return Err(RecolorError::Accounting("basic plus special spend differs from the total".into()));
    }
    if summary.buckets != audit.buckets {
        return Err(RecolorError::Accounting(format!(
            "summary buckets {:?} differ from recomputed {:?}",
            summary.buckets, audit.buckets
        )));
    }
    let max_cost = trace.header.max_special_cost;
    if let Some(pairs) = summary.special_pairs {
        let bound = (result.specials_marked as u64 + pairs as u64) * max_cost;
        audit.recx_bound = Some(bound);
        if audit.buckets.recx > bound {
            return Err(RecolorError::Accounting(format!(
                "excess-procedure cost {} exceeds (|V'| + |E'|) D = {bound}",
                audit.buckets.recx
            )));
        }
    }
    if trace.header.algorithm == Algo::Greedy
        && trace.header.uniform_special_cost
        && audit.buckets.greedy != result.specials_marked as u64 * max_cost
    {
        return Err(RecolorError::Accounting(format!(
            "baseline cost {} is not cover size {} times D = {max_cost}",
            audit.buckets.greedy, result.specials_marked
        )));
    }
    Ok(audit)
}
