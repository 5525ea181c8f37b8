//! Moderation filter: routes each edge either to the simulated two-color
//! algorithm (keeping its input moderate) or to the excess sequence, and
//! maintains the disjoint witness sets that bound the number of excess edges.

use serde::{Deserialize, Serialize};

use crate::error::{RecolorError, Result};
use crate::fraction::Fraction;
use crate::graph::{ComponentIndex, Edge};
use crate::sim::{SimA, StepReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SizeClass {
    Small,
    Large,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weight {
    Light,
    Heavy,
}

/// Small iff `size <= threshold`; light iff `recolored / size <= alpha`.
pub fn classify_component(size: usize, recolored: usize, threshold: u64, alpha: Fraction) -> (SizeClass, Weight) {
    let class = if size as u64 <= threshold { SizeClass::Small } else { SizeClass::Large };
    let weight = if alpha.ratio_le(recolored as u64, size as u64) { Weight::Light } else { Weight::Heavy };
    (class, weight)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Sim,
    Excess,
}

#[derive(Clone, Debug)]
pub enum Admission {
    Sim(StepReport),
    Excess,
}

impl Admission {
    pub fn route(&self) -> Route {
        match self {
            Admission::Sim(_) => Route::Sim,
            Admission::Excess => Route::Excess,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessEvent {
    None,
    Created(usize),
    Absorbed(usize),
}

/// Disjoint witness sets over the graph of every routed edge (simulated
/// and excess). Component `R`-counts mirror the simulator's `R`.
#[derive(Clone, Debug)]
pub struct WitnessLedger {
    full: ComponentIndex,
    set_of: Vec<Option<usize>>,
    sets: Vec<Vec<usize>>,
    /// `R`-count of each set's component when the set was created.
    created_with: Vec<usize>,
}

impl WitnessLedger {
    pub fn new(n: usize) -> Self {
        WitnessLedger {
            full: ComponentIndex::new(n),
            set_of: vec![None; n],
            sets: Vec::new(),
            created_with: Vec::new(),
        }
    }

    pub fn full_index(&self) -> &ComponentIndex {
        &self.full
    }

    pub fn mark_recolored(&mut self, v: usize) {
        self.full.mark(v);
    }

    pub fn set_of(&self, v: usize) -> Option<usize> {
        self.set_of[v]
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn created_with(&self) -> &[usize] {
        &self.created_with
    }

    fn assign(&mut self, w: usize, id: usize) -> Result<()> {
        if let Some(prev) = self.set_of[w] {
            return Err(RecolorError::Invariant(format!(
                "vertex {w} already in witness set {prev}, cannot move to {id}"
            )));
        }
        self.set_of[w] = Some(id);
        self.sets[id].push(w);
        Ok(())
    }

    /// Applies the four witness-set cases for an arriving edge. `R` marks
    /// for this step must already be recorded.
    pub fn update(&mut self, e: Edge, threshold: u64, alpha: Fraction) -> Result<WitnessEvent> {
        match (self.set_of[e.u], self.set_of[e.v]) {
            (None, None) => {
                let merge = self.full.apply_edge(e)?;
                if alpha.exceeded_by(merge.merged_marked() as u64, threshold) {
                    let id = self.sets.len();
                    self.sets.push(Vec::new());
                    self.created_with.push(merge.merged_marked());
                    let members: Vec<usize> = self.full.members(merge.root).collect();
                    for w in members {
                        self.assign(w, id)?;
                    }
                    Ok(WitnessEvent::Created(id))
                } else {
                    Ok(WitnessEvent::None)
                }
            }
            (Some(id), None) | (None, Some(id)) => {
                let outside = if self.set_of[e.u].is_none() { e.u } else { e.v };
                let members: Vec<usize> = self.full.members(outside).collect();
                for w in members {
                    self.assign(w, id)?;
                }
                self.full.apply_edge(e)?;
                Ok(WitnessEvent::Absorbed(id))
            }
            (Some(_), Some(_)) => {
                self.full.apply_edge(e)?;
                Ok(WitnessEvent::None)
            }
        }
    }
}

/// Per-step record of a routed edge.
#[derive(Clone, Debug)]
pub struct Routed {
    pub admission: Admission,
    pub witness: WitnessEvent,
}

/// The σ^sim / σ^exc split for one threshold and α, with the simulator
/// whose `R` defines lightness.
#[derive(Clone, Debug)]
pub struct ModerationState {
    threshold: u64,
    alpha: Fraction,
    sim: SimA,
    sim_seq: Vec<Edge>,
    exc_seq: Vec<Edge>,
    witness: WitnessLedger,
    violations: Vec<String>,
}

impl ModerationState {
    pub fn new(sim: SimA, threshold: u64, alpha: Fraction) -> Result<Self> {
        if !alpha.is_proper() {
            return Err(RecolorError::InvalidParameter(format!("alpha = {alpha} must lie in (0, 1)")));
        }
        if threshold < 1 {
            return Err(RecolorError::InvalidParameter("size threshold must be at least 1".into()));
        }
        let n = sim.n();
        Ok(ModerationState {
            threshold,
            alpha,
            sim,
            sim_seq: Vec::new(),
            exc_seq: Vec::new(),
            witness: WitnessLedger::new(n),
            violations: Vec::new(),
        })
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn alpha(&self) -> Fraction {
        self.alpha
    }

    pub fn sim(&self) -> &SimA {
        &self.sim
    }

    pub fn sim_seq(&self) -> &[Edge] {
        &self.sim_seq
    }

    pub fn exc_seq(&self) -> &[Edge] {
        &self.exc_seq
    }

    pub fn witness(&self) -> &WitnessLedger {
        &self.witness
    }

    /// Invariant failures observed so far (empty on a correct run).
    pub fn violations(&self) -> &[String] {
        &self.violations
    }

    /// Would appending `e` to σ^sim keep it moderate? Lightness uses the
    /// simulator's current `R`, i.e. before `e` is fed.
    pub fn is_moderate_with(&self, e: Edge) -> bool {
        let idx = self.sim.index();
        let (ru, rv) = (idx.find(e.u), idx.find(e.v));
        if ru == rv {
            return true;
        }
        let ok = |r: usize| {
            let (class, weight) = classify_component(idx.size_of(r), idx.marked_in(r), self.threshold, self.alpha);
            class == SizeClass::Small || weight == Weight::Light
        };
        ok(ru) || ok(rv)
    }

    /// Routes `e` to the simulator or to the excess sequence.
    pub fn admit(&mut self, e: Edge) -> Result<Admission> {
        e.check(self.sim.n())?;
        if self.is_moderate_with(e) {
            let report = self.sim.feed(e)?;
            for &w in &report.newly_recolored {
                self.witness.mark_recolored(w);
            }
            self.sim_seq.push(e);
            Ok(Admission::Sim(report))
        } else {
            self.exc_seq.push(e);
            Ok(Admission::Excess)
        }
    }

    /// `admit` followed by the witness update, with the excess-edge check.
    pub fn route(&mut self, e: Edge) -> Result<Routed> {
        let admission = self.admit(e)?;
        if let Admission::Excess = admission {
            match (self.witness.set_of(e.u), self.witness.set_of(e.v)) {
                (Some(a), Some(b)) if a != b => {}
                (a, b) => self.violations.push(format!(
                    "excess edge ({}, {}) not across two witness sets: {a:?} / {b:?}",
                    e.u, e.v
                )),
            }
        }
        let witness = self.witness.update(e, self.threshold, self.alpha)?;
        Ok(Routed { admission, witness })
    }

    /// `s * alpha * threshold <= |R|`.
    pub fn witness_count_ok(&self) -> bool {
        let s = self.witness.sets().len() as u128;
        s * (self.alpha.numer() as u128) * (self.threshold as u128)
            <= (self.sim.r_size() as u128) * (self.alpha.denom() as u128)
    }

    /// `|σ^exc| * alpha * threshold <= beta * |R|`.
    pub fn excess_bound_ok(&self, beta: u64) -> bool {
        (self.exc_seq.len() as u128) * (self.alpha.numer() as u128) * (self.threshold as u128)
            <= (beta as u128) * (self.sim.r_size() as u128) * (self.alpha.denom() as u128)
    }

    /// Every simulated component holding more than `alpha * threshold`
    /// vertices of `R` is covered by witness sets.
    pub fn dense_components_covered(&self) -> bool {
        let idx = self.sim.index();
        idx.roots()
            .filter(|&r| self.alpha.exceeded_by(idx.marked_in(r) as u64, self.threshold))
            .all(|r| idx.members(r).all(|w| self.witness.set_of(w).is_some()))
    }

    pub fn dump(&self) -> ModerationDump {
        ModerationDump {
            threshold: self.threshold,
            alpha: self.alpha,
            sim_seq: self.sim_seq.clone(),
            exc_seq: self.exc_seq.clone(),
            witness_sets: self.witness.sets().to_vec(),
            r_size: self.sim.r_size(),
        }
    }
}

/// JSON dump of the split and the witness sets.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModerationDump {
    pub threshold: u64,
    pub alpha: Fraction,
    pub sim_seq: Vec<Edge>,
    pub exc_seq: Vec<Edge>,
    pub witness_sets: Vec<Vec<usize>>,
    pub r_size: usize,
}
