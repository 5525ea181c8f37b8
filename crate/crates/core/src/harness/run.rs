//! Runs one algorithm over one instance, checking validity after every
//! step and collecting costs, the offline optimum and optional audits.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::adversaries::{AlgoView, DominatingAdversary, DominatingConfig};
use crate::algorithm::{AlgoReport, FinishContext, OnlineAlgorithm, PlainA};
use crate::audit::{
    audit_bond_partition, audit_moderated_charging, audit_witness, moderate_cost_ok, sim_partition, BondAudit, BondMode,
    ChargeReport, WitnessAudit,
};
use crate::aug::{AugAlgo, AugConfig, AugVariant};
use crate::coloring::{validate_coloring, Color};
use crate::error::{RecolorError, Result};
use crate::fraction::Fraction;
use crate::graph::{Edge, Graph};
use crate::greedy::Greedy;
use crate::harness::trace::{Buckets, Trace, TraceHeader, TraceStep, TraceSummary};
use crate::instance::{Instance, InstanceSource};
use crate::levels::{LevelAlgo, LevelParams, LevelSummary};
use crate::moderation::{ModerationDump, ModerationState};
use crate::oracles::{largest_bond_bruteforce, opt2_exact, BOND_CAP};
use crate::sim::FlipPolicy;

/// Name of the adaptive dominating-color adversary in instance files.
pub const DOMINATING: &str = "dominating";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algo {
    A,
    B,
    Bhat,
    C,
    #[serde(rename = "greedy")]
    Greedy,
}

impl Algo {
    pub const ALL: [Algo; 5] = [Algo::A, Algo::B, Algo::Bhat, Algo::C, Algo::Greedy];

    pub fn name(&self) -> &'static str {
        match self {
            Algo::A => "A",
            Algo::B => "B",
            Algo::Bhat => "Bhat",
            Algo::C => "C",
            Algo::Greedy => "greedy",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = RecolorError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Algo::A),
            "b" => Ok(Algo::B),
            "bhat" | "b-hat" | "b_hat" => Ok(Algo::Bhat),
            "c" => Ok(Algo::C),
            "greedy" => Ok(Algo::Greedy),
            _ => Err(RecolorError::InvalidParameter(format!("unknown algorithm {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunParams {
    pub alpha: Fraction,
    pub epsilon: Fraction,
    pub policy: FlipPolicy,
    /// Largest bond to assume instead of computing one.
    pub beta: Option<u64>,
    /// Seed the instance was generated with, recorded in results.
    pub seed: Option<u64>,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            alpha: Fraction::half(),
            epsilon: Fraction::new(1, 4).expect("1/4 is a valid fraction"),
            policy: FlipPolicy::default(),
            beta: None,
            seed: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOptions {
    pub trace: bool,
    pub audit: bool,
    pub dump_moderation: bool,
}

/// Where the largest-bond value used by a run came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaSource {
    Override,
    Forest,
    BruteForce,
    Hint,
    Unknown,
}

/// Largest bond of the final graph: the override if given, 1 for forests,
/// brute force when every component is small enough, else the instance
/// hint.
pub fn resolve_beta(n: usize, edges: &[Edge], hint: Option<u64>, over: Option<u64>) -> Result<(Option<u64>, BetaSource)> {
    if let Some(b) = over {
        return Ok((Some(b), BetaSource::Override));
    }
    let g = Graph::from_edges(n, edges)?;
    let comps = g.components();
    if edges.len() + comps.len() == n {
        return Ok((Some(1), BetaSource::Forest));
    }
    if comps.iter().all(|c| c.len() <= BOND_CAP) {
        let beta = largest_bond_bruteforce(n, edges, BOND_CAP)?.beta;
        return Ok((Some(beta.max(1)), BetaSource::BruteForce));
    }
    Ok(match hint {
        Some(b) => (Some(b), BetaSource::Hint),
        None => (None, BetaSource::Unknown),
    })
}

/// One row of results; field order is the CSV column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub run_id: String,
    pub algorithm: Algo,
    pub n: usize,
    pub m: usize,
    #[serde(rename = "D")]
    pub d: u64,
    pub alpha: Fraction,
    pub epsilon: Fraction,
    pub beta: Option<u64>,
    pub seed: Option<u64>,
    pub policy: FlipPolicy,
    pub cost_total: u64,
    pub cost_basic: u64,
    pub cost_special: u64,
    pub opt2_final: u64,
    pub ratio: Option<f64>,
    pub colors_used: usize,
    pub specials_marked: usize,
    pub excess_edges: usize,
    pub max_level: u32,
    pub violations: usize,
}

/// Audit results for one moderated sequence of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModerationAudit {
    /// 1 for the augmented algorithms; the level for the hierarchical one.
    pub level: usize,
    pub threshold: u64,
    pub sim_cost: u64,
    pub r_size: usize,
    pub charging: Option<ChargeReport>,
    pub charging_error: Option<String>,
    /// `cost <= 280 (log2 D + 4) |R|`.
    pub moderate_cost_ok: bool,
    pub witness: Option<WitnessAudit>,
    pub bond: Option<BondAudit>,
}

impl ModerationAudit {
    /// Failures counted as run violations.
    pub fn violations(&self) -> Vec<String> {
        let tag = |s: String| format!("level {}: {s}", self.level);
        let mut v = Vec::new();
        let hard = match &self.charging {
            Some(c) => {
                v.extend(c.violations().into_iter().map(tag));
                c.hard
            }
            None => false,
        };
        if let Some(err) = &self.charging_error {
            v.push(tag(format!("charging audit: {err}")));
        }
        if hard && !self.moderate_cost_ok {
            v.push(tag(format!("simulated cost {} above 280 (log2 D + 4) |R|, |R| = {}", self.sim_cost, self.r_size)));
        }
        if let Some(w) = &self.witness {
            if !w.excess_ok {
                v.push(tag(format!("{} excess edges above beta |R| / (alpha D)", w.excess_edges)));
            }
        }
        if let Some(b) = &self.bond {
            if !b.passed {
                v.push(tag(format!("{} cross edges above (k - 1) beta = {}", b.cross_edges, b.bound)));
            }
        }
        v
    }
}

pub fn audit_moderation(m: &ModerationState, level: usize, n: usize, edges: &[Edge], beta: Option<u64>) -> ModerationAudit {
    let (charging, charging_error) = match audit_moderated_charging(m) {
        Ok(c) => (Some(c), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let sim = m.sim();
    ModerationAudit {
        level,
        threshold: m.threshold(),
        sim_cost: sim.total_cost(),
        r_size: sim.r_size(),
        charging,
        charging_error,
        moderate_cost_ok: moderate_cost_ok(sim.total_cost(), sim.r_size(), m.threshold()),
        witness: beta.map(|b| audit_witness(m, b)),
        bond: beta.and_then(|b| audit_bond_partition(n, edges, &sim_partition(m), b, BondMode::Partition).ok()),
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub result: RunResult,
    pub report: AlgoReport,
    pub violation_messages: Vec<String>,
    pub beta_source: BetaSource,
    pub buckets: Buckets,
    /// The consumed instance; adaptive streams are frozen into edges.
    pub instance: Instance,
    pub trace: Option<Trace>,
    pub audits: Vec<ModerationAudit>,
    pub levels: Vec<LevelSummary>,
    pub moderation_dumps: Vec<ModerationDump>,
}

enum AnyAlgo {
    A(PlainA),
    Aug(Box<AugAlgo>),
    C(LevelAlgo),
    Greedy(Greedy),
}

impl AnyAlgo {
    fn build(algo: Algo, inst: &Instance, params: &RunParams) -> Result<AnyAlgo> {
        let initial = &inst.initial_colors;
        Ok(match algo {
            Algo::A => AnyAlgo::A(PlainA::new(initial, params.policy)?),
            Algo::B | Algo::Bhat => {
                let variant = if algo == Algo::B { AugVariant::B } else { AugVariant::Bhat };
                let cfg = AugConfig { variant, alpha: params.alpha, d: inst.d, delta: inst.delta, policy: params.policy };
                let palette = inst.palette(variant.palette_size(inst.delta))?;
                AnyAlgo::Aug(Box::new(AugAlgo::new(cfg, initial, palette)?))
            }
            Algo::C => {
                let beta = match params.beta.or(inst.beta_hint) {
                    Some(b) => b,
                    None => resolve_beta(inst.n, &inst.edges, None, None)?.0.ok_or_else(|| {
                        RecolorError::InvalidParameter("the hierarchical algorithm needs beta (flag or beta_hint)".into())
                    })?,
                };
                let lp = LevelParams::new(inst.n, params.epsilon, params.alpha, beta)?;
                AnyAlgo::C(LevelAlgo::new(initial, lp, params.policy)?)
            }
            Algo::Greedy => AnyAlgo::Greedy(Greedy::new(initial, inst.palette(inst.special_palette_size)?)?),
        })
    }

    fn get(&self) -> &dyn OnlineAlgorithm {
        match self {
            AnyAlgo::A(a) => a,
            AnyAlgo::Aug(a) => a.as_ref(),
            AnyAlgo::C(a) => a,
            AnyAlgo::Greedy(a) => a,
        }
    }

    fn get_mut(&mut self) -> &mut dyn OnlineAlgorithm {
        match self {
            AnyAlgo::A(a) => a,
            AnyAlgo::Aug(a) => a.as_mut(),
            AnyAlgo::C(a) => a,
            AnyAlgo::Greedy(a) => a,
        }
    }
}

struct View<'a>(&'a dyn OnlineAlgorithm);

impl AlgoView for View<'_> {
    fn colors(&self) -> &[Color] {
        self.0.colors()
    }

    fn ever_special(&self, v: usize) -> bool {
        self.0.state().ever_special(v)
    }
}

/// The static part of an instance source; adaptive sources start with no
/// edges and come with their adversary.
fn open_source(source: &InstanceSource) -> Result<(Instance, Option<DominatingAdversary>)> {
    match source {
        InstanceSource::Static(inst) => {
            inst.validate()?;
            Ok((inst.clone(), None))
        }
        InstanceSource::Adaptive(spec) => {
            if spec.adversary != DOMINATING {
                return Err(RecolorError::InvalidInstance(format!("unknown adversary {:?}", spec.adversary)));
            }
            let cfg = DominatingConfig::from_params(&spec.params, spec.seed)?;
            let adv = DominatingAdversary::new(cfg.clone())?;
            let inst = Instance {
                n: cfg.n,
                d: cfg.d,
                delta: cfg.delta(),
                beta_hint: Some(cfg.beta_hint()),
                special_palette_size: cfg.n,
                special_costs: None,
                initial_colors: adv.initial_colors().to_vec(),
                edges: Vec::new(),
            };
            Ok((inst, Some(adv)))
        }
    }
}

struct Stepper {
    graph: Graph,
    steps: Vec<TraceStep>,
    keep_steps: bool,
    cumulative: u64,
    buckets: Buckets,
    violations: Vec<String>,
}

impl Stepper {
    fn step(&mut self, algo: &mut dyn OnlineAlgorithm, e: Edge) -> Result<()> {
        let i = self.graph.edges().len();
        let out = algo.step(e).map_err(|err| RecolorError::Step { step: i, source: Box::new(err) })?;
        self.graph.add_edge(e)?;
        let colors = algo.colors();
        if colors[e.u] == colors[e.v] {
            self.violations.push(format!("step {i}: arriving edge ({}, {}) left monochromatic", e.u, e.v));
        }
        for ev in &out.events {
            let w = ev.vertex;
            for x in self.graph.neighbors(w) {
                if colors[w] == colors[x] && !(Edge::new(w, x) == e || Edge::new(x, w) == e) {
                    self.violations.push(format!("step {i}: recoloring {w} made edge ({w}, {x}) monochromatic"));
                }
            }
            self.buckets.add(ev.bucket, ev.cost);
        }
        self.cumulative += out.cost;
        if self.keep_steps {
            self.steps.push(TraceStep {
                i,
                edge: e,
                route: out.route,
                level: out.level,
                events: out.events,
                cost: out.cost,
                cumulative_cost: self.cumulative,
            });
        }
        Ok(())
    }
}

/// Runs `algo` on `source`. Deterministic: identical inputs give identical
/// results and traces.
pub fn run(source: &InstanceSource, algo: Algo, params: &RunParams, run_id: &str, opts: RunOptions) -> Result<RunOutcome> {
    let (mut inst, adversary) = open_source(source)?;
    let mut any = AnyAlgo::build(algo, &inst, params)?;
    let mut stepper = Stepper {
        graph: Graph::new(inst.n),
        steps: Vec::new(),
        keep_steps: opts.trace,
        cumulative: 0,
        buckets: Buckets::default(),
        violations: Vec::new(),
    };
    match adversary {
        None => {
            for &e in &inst.edges {
                stepper.step(any.get_mut(), e)?;
            }
        }
        Some(mut adv) => {
            while let Some(batch) = adv.next_phase(&View(any.get())) {
                for e in batch {
                    stepper.step(any.get_mut(), e)?;
                }
            }
            inst.edges = stepper.graph.edges().to_vec();
        }
    }

    let edges = &inst.edges;
    let mut violations = std::mem::take(&mut stepper.violations);
    for e in validate_coloring(any.get().colors(), edges) {
        violations.push(format!("final coloring: edge ({}, {}) is monochromatic", e.u, e.v));
    }
    let opt2 = opt2_exact(&inst.initial_colors, edges, edges.len())?.value;
    let (beta, beta_source) = resolve_beta(inst.n, edges, inst.beta_hint, params.beta)?;
    let report = any.get_mut().finish(&FinishContext { beta });
    violations.extend(report.violations.iter().cloned());

    let mut audits = Vec::new();
    if opts.audit {
        for (j, m) in any.get().moderated().into_iter().enumerate() {
            let a = audit_moderation(m, j + 1, inst.n, edges, beta);
            violations.extend(a.violations());
            audits.push(a);
        }
    }
    let moderation_dumps =
        if opts.dump_moderation { any.get().moderated().iter().map(|m| m.dump()).collect() } else { Vec::new() };
    let levels = match &any {
        AnyAlgo::C(c) => c.summaries(),
        _ => Vec::new(),
    };

    let state = any.get().state();
    if state.total_cost() != stepper.cumulative || stepper.buckets.total() != stepper.cumulative {
        return Err(RecolorError::Accounting(format!(
            "state charged {}, steps sum to {}, buckets to {}",
            state.total_cost(),
            stepper.cumulative,
            stepper.buckets.total()
        )));
    }
    let result = RunResult {
        run_id: run_id.to_string(),
        algorithm: algo,
        n: inst.n,
        m: edges.len(),
        d: inst.d,
        alpha: params.alpha,
        epsilon: params.epsilon,
        beta,
        seed: params.seed,
        policy: params.policy,
        cost_total: state.total_cost(),
        cost_basic: state.basic_cost(),
        cost_special: state.special_cost(),
        opt2_final: opt2,
        ratio: (opt2 > 0).then(|| state.total_cost() as f64 / opt2 as f64),
        colors_used: any.get().colors_used(),
        specials_marked: report.specials_marked,
        excess_edges: report.excess_edges,
        max_level: report.max_level,
        violations: violations.len(),
    };

    let trace = opts.trace.then(|| {
        let palette = state.palette();
        Trace {
            header: TraceHeader {
                run_id: run_id.to_string(),
                algorithm: algo,
                params: params.clone(),
                n: inst.n,
                d: inst.d,
                delta: inst.delta,
                beta_hint: inst.beta_hint,
                special_palette_size: inst.special_palette_size,
                special_costs: inst.special_costs.clone(),
                initial_colors: inst.initial_colors.clone(),
                max_special_cost: palette.max_cost(),
                uniform_special_cost: palette.is_uniform(),
            },
            steps: std::mem::take(&mut stepper.steps),
            summary: TraceSummary {
                result: result.clone(),
                buckets: stepper.buckets,
                special_pairs: report.special_pairs,
                beta_source,
                violation_messages: violations.clone(),
            },
        }
    });

    Ok(RunOutcome {
        result,
        report,
        violation_messages: violations,
        beta_source,
        buckets: stepper.buckets,
        instance: inst,
        trace,
        audits,
        levels,
        moderation_dumps,
    })
}

/// Re-runs the algorithm recorded in a trace on the trace's own edges.
pub fn replay(trace: &Trace, opts: RunOptions) -> Result<RunOutcome> {
    let h = &trace.header;
    run(&InstanceSource::Static(trace.instance()), h.algorithm, &h.params, &h.run_id, opts)
}
