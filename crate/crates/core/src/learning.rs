//! Weight learning toward expert-chosen desired output sets.
//!
//! For a target concept `i` outside its desired set, pick a desired value
//! `doc`, take the generator difference `gen = doc − A_i`, and for each
//! incoming edge compute
//!
//! ```text
//! Δw_ji = A_j ⇒ (f_i ⇒ gen)
//! ```
//!
//! A positive weight absorbs `Δw` (join) while the target must grow and loses
//! it (set difference) once the target lies strictly above `doc`; negative
//! weights do the opposite. Incomparable targets grow first.

use std::collections::BTreeMap;

use crate::engine::{drive, EngineConfig, IterationTrace};
use crate::error::{EngineError, LearnError};
use crate::lattice::{AtomLattice, AtomSet};
use crate::model::{MapModel, SignedWeight, WeightMatrix};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LearnMode {
    /// Correct once per run, after convergence.
    #[default]
    EndOfRun,
    /// Correct after every iteration step.
    PerStep,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DocSelect {
    /// Compare against the first listed desired value.
    #[default]
    First,
    /// Compare against the desired value with the fewest differing generators
    /// (earliest on ties).
    Best,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LearnConfig {
    pub mode: LearnMode,
    pub doc_select: DocSelect,
    pub max_outer: usize,
    /// Concepts to steer; empty means every concept with a desired set.
    pub targets: Vec<usize>,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            mode: LearnMode::EndOfRun,
            doc_select: DocSelect::First,
            max_outer: 50,
            targets: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Grow,
    Shrink,
}

/// One target correction: the weights into `target` were moved toward `doc`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correction {
    pub round: usize,
    /// Iteration step for per-step learning.
    pub step: Option<usize>,
    pub target: usize,
    pub value: AtomSet,
    pub doc: AtomSet,
    pub direction: Direction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LearnResult {
    pub weights: WeightMatrix,
    /// The run that settled with every target inside its desired set (or the
    /// last attempt, on failure).
    pub trace: IterationTrace,
    pub outer_rounds: usize,
    /// Final value of each target.
    pub achieved: BTreeMap<usize, AtomSet>,
    pub corrections: Vec<Correction>,
}

impl LearnResult {
    pub fn all_in_doc(&self, model: &MapModel) -> bool {
        self.achieved
            .iter()
            .all(|(t, v)| model.docs.get(t).is_some_and(|d| d.contains(v)))
    }
}

/// Generators separating a desired value from the current one.
pub fn gen_diff(doc: AtomSet, a: AtomSet) -> AtomSet {
    doc.sym_diff(a)
}

/// Weight change `A_j ⇒ (f_i ⇒ gen)` for one incoming edge.
pub fn delta_w(lattice: &AtomLattice, f_i: AtomSet, gen: AtomSet, a_j: AtomSet) -> AtomSet {
    let top = lattice.top();
    a_j.implies_in(f_i.implies_in(gen, top), top)
}

pub fn apply_weight_update(w: SignedWeight, dw: AtomSet, concept_above_doc: bool) -> SignedWeight {
    let shrink = concept_above_doc != w.is_negative();
    let value = if shrink {
        w.value.set_minus(dw)
    } else {
        w.value.join(dw)
    };
    SignedWeight { value, ..w }
}

/// Shrink only when the value lies strictly above the desired one.
pub fn direction(value: AtomSet, doc: AtomSet) -> Direction {
    if doc.lt(value) {
        Direction::Shrink
    } else {
        Direction::Grow
    }
}

pub fn select_doc(docs: &[AtomSet], value: AtomSet, select: DocSelect) -> AtomSet {
    match select {
        DocSelect::First => docs[0],
        DocSelect::Best => *docs
            .iter()
            .min_by_key(|d| gen_diff(**d, value).generator_count())
            .expect("desired sets are non-empty"),
    }
}

struct Corrector<'a> {
    model: &'a MapModel,
    targets: &'a [usize],
    select: DocSelect,
}

impl Corrector<'_> {
    fn out_of_doc(&self, values: &[AtomSet]) -> bool {
        self.targets
            .iter()
            .any(|t| !self.model.docs[t].contains(&values[*t]))
    }

    /// Applies one round of updates to the edges of out-of-doc targets.
    fn correct(
        &self,
        weights: &mut WeightMatrix,
        values: &[AtomSet],
        f: &[AtomSet],
        sources: &[AtomSet],
        round: usize,
        step: Option<usize>,
        log: &mut Vec<Correction>,
    ) {
        for &t in self.targets {
            let docs = &self.model.docs[&t];
            let value = values[t];
            if docs.contains(&value) {
                continue;
            }
            let doc = select_doc(docs, value, self.select);
            let gen = gen_diff(doc, value);
            let dir = direction(value, doc);
            let incoming: Vec<(usize, SignedWeight)> = weights.incoming(t).collect();
            for (src, w) in incoming {
                let dw = delta_w(&self.model.scale, f[t], gen, sources[src]);
                weights.set(src, t, apply_weight_update(w, dw, dir == Direction::Shrink));
            }
            log.push(Correction {
                round,
                step,
                target: t,
                value,
                doc,
                direction: dir,
            });
        }
    }
}

fn resolve_targets(model: &MapModel, cfg: &LearnConfig) -> Result<Vec<usize>, LearnError> {
    if cfg.max_outer == 0 {
        return Err(LearnError::Config("max_outer must be positive".into()));
    }
    let targets: Vec<usize> = if cfg.targets.is_empty() {
        model.docs.keys().copied().collect()
    } else {
        cfg.targets.clone()
    };
    if targets.is_empty() {
        return Err(LearnError::Config("no concept has a desired-output set".into()));
    }
    for &t in &targets {
        match model.docs.get(&t) {
            Some(d) if !d.is_empty() => {}
            _ => {
                let name = model.concepts.get(t).cloned().unwrap_or_else(|| t.to_string());
                return Err(LearnError::Config(format!("target `{name}` has no desired-output set")));
            }
        }
    }
    Ok(targets)
}

/// Learns weights so that every target settles inside its desired set.
///
/// Only incoming edges of out-of-doc targets change. A round that leaves the
/// matrix untouched would repeat itself exactly, so it ends the session as a
/// failure without spending the remaining rounds.
pub fn learn(
    model: &MapModel,
    engine_cfg: &EngineConfig,
    learn_cfg: &LearnConfig,
    case: &str,
) -> Result<LearnResult, LearnError> {
    let scenario = model
        .case(case)
        .ok_or_else(|| EngineError::UnknownCase(case.to_string()))?;
    let targets = resolve_targets(model, learn_cfg)?;
    let corrector = Corrector {
        model,
        targets: &targets,
        select: learn_cfg.doc_select,
    };
    let mut weights = model.weights.clone();
    let mut log = Vec::new();
    let mut last = None;

    for round in 1..=learn_cfg.max_outer {
        let before = weights.clone();
        let trace = match learn_cfg.mode {
            LearnMode::EndOfRun => drive(model, &mut weights, engine_cfg, scenario, None, |_, _| {})?,
            LearnMode::PerStep => drive(model, &mut weights, engine_cfg, scenario, None, |w, view| {
                corrector.correct(w, view.next, view.f, view.curr, round, Some(view.step), &mut log);
            })?,
        };
        let fin = trace.final_state().to_vec();
        let achieved = targets.iter().map(|&t| (t, fin[t])).collect();
        if !corrector.out_of_doc(&fin) {
            return Ok(LearnResult {
                weights,
                trace,
                outer_rounds: round,
                achieved,
                corrections: log,
            });
        }
        if learn_cfg.mode == LearnMode::EndOfRun {
            let f = trace.coeffs.last().expect("a converged run has steps");
            let sources = &trace.states[trace.states.len() - 2];
            corrector.correct(&mut weights, &fin, f, sources, round, None, &mut log);
        }
        let stalled = weights == before;
        last = Some(LearnResult {
            weights: weights.clone(),
            trace,
            outer_rounds: round,
            achieved,
            corrections: log.clone(),
        });
        if stalled {
            break;
        }
    }
    Err(LearnError::Failed {
        last: Box::new(last.expect("at least one round runs")),
    })
}
