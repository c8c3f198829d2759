//! Synchronous iteration of a multi-valued cognitive map.
//!
//! With meet as the monoid multiplication, one step reads
//!
//! ```text
//! s_i       = ⋁_j (w_ji ∧ A_j^k)                  (negative terms deducted)
//! f_i^k     = s_i ⇒ (A_i^k ∨ A_i^{k-1})
//! A_i^{k+1} = c ∧ f_i^k ∧ s_i
//! ```
//!
//! The first step has no `A^{-1}` and uses the configured `f⁰` instead. The
//! run stops once three consecutive states agree.

use crate::error::EngineError;
use crate::lattice::AtomSet;
use crate::model::{MapModel, Scenario, WeightMatrix};

/// How negative weight contributions are deducted from the positive join.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NegMode {
    /// `J − N`, the symmetric difference of generator sets.
    #[default]
    Symmetric,
    /// `J ⊖ N`, plain set difference.
    Strict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    /// First-step coefficient; `None` is the lattice top.
    pub f0: Option<AtomSet>,
    /// Constant adjusting coefficient `c`; `None` is the lattice top.
    pub c_coeff: Option<AtomSet>,
    pub max_iters: usize,
    pub neg_mode: NegMode,
    /// Record the `r` diagnostic in the trace.
    pub record_r: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            f0: None,
            c_coeff: None,
            max_iters: 100,
            neg_mode: NegMode::Symmetric,
            record_r: false,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self, model: &MapModel) -> Result<(), EngineError> {
        if self.max_iters < 3 {
            return Err(EngineError::Config(format!(
                "max_iters must be at least 3, got {}",
                self.max_iters
            )));
        }
        for (what, v) in [("f0", self.f0), ("c", self.c_coeff)] {
            if let Some(v) = v {
                if !model.scale.contains(v) {
                    return Err(EngineError::Config(format!("{what} is not a lattice element")));
                }
            }
        }
        Ok(())
    }

    fn f0_value(&self, model: &MapModel) -> AtomSet {
        self.f0.unwrap_or_else(|| model.scale.top())
    }

    fn c_value(&self, model: &MapModel) -> AtomSet {
        self.c_coeff.unwrap_or_else(|| model.scale.top())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterationTrace {
    /// `states[k]` is `A^k`; `states[0]` is the initial vector.
    pub states: Vec<Vec<AtomSet>>,
    /// `coeffs[k]` is the `f^k` that produced `states[k + 1]`.
    pub coeffs: Vec<Vec<AtomSet>>,
    /// `r_diag[k]` is `r^k`, when recording was enabled.
    pub r_diag: Option<Vec<Vec<AtomSet>>>,
    pub converged: bool,
    pub steps: usize,
    /// `(step, concept)` pairs overwritten by scenario edits.
    pub edited: Vec<(usize, usize)>,
}

impl IterationTrace {
    pub fn initial(&self) -> &[AtomSet] {
        &self.states[0]
    }

    pub fn final_state(&self) -> &[AtomSet] {
        self.states.last().expect("trace holds at least the initial state")
    }

    pub fn was_edited(&self, step: usize, concept: usize) -> bool {
        self.edited.contains(&(step, concept))
    }

    /// Last edit step at or before `k`, 0 if none.
    pub fn segment_origin(&self, k: usize) -> usize {
        self.edited
            .iter()
            .map(|&(s, _)| s)
            .filter(|&s| s <= k)
            .max()
            .unwrap_or(0)
    }
}

/// Result of one synchronous update.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub next: Vec<AtomSet>,
    pub f: Vec<AtomSet>,
}

fn check_state(model: &MapModel, state: &[AtomSet]) -> Result<(), EngineError> {
    if state.len() != model.len() {
        return Err(EngineError::StateShape {
            expected: model.len(),
            got: state.len(),
        });
    }
    Ok(())
}

pub(crate) fn signed_join_with(
    weights: &WeightMatrix,
    neg_mode: NegMode,
    target: usize,
    state: &[AtomSet],
) -> AtomSet {
    let mut pos = AtomSet::EMPTY;
    let mut neg = AtomSet::EMPTY;
    for (src, w) in weights.incoming(target) {
        let term = w.value.meet(state[src]);
        if w.is_negative() {
            neg = neg.join(term);
        } else {
            pos = pos.join(term);
        }
    }
    match neg_mode {
        NegMode::Symmetric => pos.sym_diff(neg),
        NegMode::Strict => pos.set_minus(neg),
    }
}

/// The weighted join feeding `target`, with negative terms deducted.
pub fn signed_join(model: &MapModel, cfg: &EngineConfig, target: usize, state: &[AtomSet]) -> AtomSet {
    signed_join_with(&model.weights, cfg.neg_mode, target, state)
}

/// `first` carries the per-concept `f⁰` for the opening step.
pub(crate) fn advance(
    model: &MapModel,
    weights: &WeightMatrix,
    cfg: &EngineConfig,
    prev: &[AtomSet],
    curr: &[AtomSet],
    first: Option<&[AtomSet]>,
) -> Step {
    let top = model.scale.top();
    let c = cfg.c_value(model);
    let n = model.len();
    let mut next = Vec::with_capacity(n);
    let mut f = Vec::with_capacity(n);
    for i in 0..n {
        let s = signed_join_with(weights, cfg.neg_mode, i, curr);
        let fi = match first {
            Some(f0) => f0[i],
            None => s.implies_in(curr[i].join(prev[i]), top),
        };
        f.push(fi);
        if model.is_clamped(i) {
            next.push(curr[i]);
        } else {
            next.push(c.meet(fi).meet(s));
        }
    }
    Step { next, f }
}

pub(crate) fn r_with(
    model: &MapModel,
    weights: &WeightMatrix,
    cfg: &EngineConfig,
    prev: &[AtomSet],
    curr: &[AtomSet],
) -> Vec<AtomSet> {
    let top = model.scale.top();
    (0..model.len())
        .map(|i| {
            signed_join_with(weights, cfg.neg_mode, i, curr).implies_in(curr[i].meet(prev[i]), top)
        })
        .collect()
}

/// One update `A^k → A^{k+1}` with coefficients from the previous two states.
pub fn step(
    model: &MapModel,
    cfg: &EngineConfig,
    prev: &[AtomSet],
    curr: &[AtomSet],
) -> Result<Step, EngineError> {
    check_state(model, prev)?;
    check_state(model, curr)?;
    Ok(advance(model, &model.weights, cfg, prev, curr, None))
}

/// The opening update `A^0 → A^1`, using `f⁰` from the configuration.
pub fn first_step(model: &MapModel, cfg: &EngineConfig, init: &[AtomSet]) -> Result<Step, EngineError> {
    check_state(model, init)?;
    let f0 = vec![cfg.f0_value(model); model.len()];
    Ok(advance(model, &model.weights, cfg, init, init, Some(&f0)))
}

/// Convergence diagnostic `r_i = s_i ⇒ (A_i^k ∧ A_i^{k-1})`; never exceeds `f_i`.
pub fn compute_r(
    model: &MapModel,
    cfg: &EngineConfig,
    prev: &[AtomSet],
    curr: &[AtomSet],
) -> Result<Vec<AtomSet>, EngineError> {
    check_state(model, prev)?;
    check_state(model, curr)?;
    Ok(r_with(model, &model.weights, cfg, prev, curr))
}

/// What a per-step observer sees after each update, before scenario edits.
pub(crate) struct StepView<'a> {
    /// `k` in `A^k → A^{k+1}`.
    pub step: usize,
    pub curr: &'a [AtomSet],
    pub next: &'a [AtomSet],
    pub f: &'a [AtomSet],
}

/// The iteration loop. `hook` may rewrite the weights between steps.
pub(crate) fn drive<H>(
    model: &MapModel,
    weights: &mut WeightMatrix,
    cfg: &EngineConfig,
    scenario: &Scenario,
    start_coeffs: Option<Vec<AtomSet>>,
    mut hook: H,
) -> Result<IterationTrace, EngineError>
where
    H: FnMut(&mut WeightMatrix, &StepView<'_>),
{
    cfg.validate(model)?;
    check_state(model, &scenario.init)?;
    let f0 = match start_coeffs {
        Some(v) => {
            check_state(model, &v)?;
            v
        }
        None => vec![cfg.f0_value(model); model.len()],
    };
    let last_edit = scenario.last_edit();
    let mut trace = IterationTrace {
        states: vec![scenario.init.clone()],
        coeffs: Vec::new(),
        r_diag: cfg.record_r.then(Vec::new),
        converged: false,
        steps: 0,
        edited: Vec::new(),
    };
    for k in 0..cfg.max_iters {
        let curr = &trace.states[k];
        let prev = if k == 0 { curr } else { &trace.states[k - 1] };
        let first = (k == 0).then_some(f0.as_slice());
        let Step { mut next, f } = advance(model, weights, cfg, prev, curr, first);
        if let Some(r) = trace.r_diag.as_mut() {
            r.push(r_with(model, weights, cfg, prev, curr));
        }
        hook(
            weights,
            &StepView {
                step: k,
                curr,
                next: &next,
                f: &f,
            },
        );
        if let Some(edits) = scenario.edits.get(&(k + 1)) {
            for &(i, v) in edits {
                next[i] = v;
                trace.edited.push((k + 1, i));
            }
        }
        trace.coeffs.push(f);
        trace.states.push(next);
        trace.steps = k + 1;
        let s = &trace.states;
        let n = s.len();
        if n >= 3 && s[n - 1] == s[n - 2] && s[n - 2] == s[n - 3] && trace.steps >= last_edit {
            trace.converged = true;
            return Ok(trace);
        }
    }
    Err(EngineError::NotConverged {
        trace: Box::new(trace),
    })
}

pub fn run_scenario(
    model: &MapModel,
    cfg: &EngineConfig,
    scenario: &Scenario,
) -> Result<IterationTrace, EngineError> {
    let mut weights = model.weights.clone();
    drive(model, &mut weights, cfg, scenario, None, |_, _| {})
}

/// Iterates the named case until three consecutive states agree.
pub fn run(model: &MapModel, cfg: &EngineConfig, case: &str) -> Result<IterationTrace, EngineError> {
    let scenario = model
        .case(case)
        .ok_or_else(|| EngineError::UnknownCase(case.to_string()))?;
    run_scenario(model, cfg, scenario)
}

/// Restarts from the final state of `trace`, carrying its last coefficient
/// vector over as `f⁰`. From a fixed point this reproduces the state unchanged.
pub fn restart(
    model: &MapModel,
    cfg: &EngineConfig,
    trace: &IterationTrace,
) -> Result<IterationTrace, EngineError> {
    let scenario = Scenario::new(trace.final_state().to_vec());
    let coeffs = trace.coeffs.last().cloned();
    let mut weights = model.weights.clone();
    drive(model, &mut weights, cfg, &scenario, coeffs, |_, _| {})
}

/// Whether every state lies below `init ∨ A^1`, concept by concept.
pub fn check_bound(trace: &IterationTrace, init: &[AtomSet]) -> bool {
    let Some(first) = trace.states.get(1) else {
        return true;
    };
    trace.states.iter().all(|state| {
        state
            .iter()
            .zip(init.iter().zip(first))
            .all(|(a, (a0, a1))| a.leq(a0.join(*a1)))
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub law: &'static str,
    pub step: usize,
    pub concept: usize,
}

/// Checks a trace against the convergence-proof invariants.
///
/// External edits restart the fixed-input process, so the shrinking-difference
/// law and the initial-pair bound are checked per segment, starting at the
/// last edit. Containment, `r ≤ f` and clamping hold step by step.
pub fn audit(model: &MapModel, trace: &IterationTrace) -> Vec<Violation> {
    let mut out = Vec::new();
    let states = &trace.states;
    let n = model.len();
    for k in 1..states.len() {
        for i in 0..n {
            let edited = trace.was_edited(k, i);
            if model.is_clamped(i) && !edited && states[k][i] != states[k - 1][i] {
                out.push(Violation {
                    law: "clamped",
                    step: k,
                    concept: i,
                });
            }
            // A^k ≤ A^{k-1} ∨ A^{k-2}
            if k >= 2 && !edited && !states[k][i].leq(states[k - 1][i].join(states[k - 2][i])) {
                out.push(Violation {
                    law: "containment",
                    step: k,
                    concept: i,
                });
            }
            let origin = trace.segment_origin(k);
            // (A^k − A^{k-1}) ⊆ (A^{k-1} − A^{k-2}) within a segment
            if k >= 2 && k - 2 >= origin {
                let newer = states[k][i].sym_diff(states[k - 1][i]);
                let older = states[k - 1][i].sym_diff(states[k - 2][i]);
                if !newer.leq(older) {
                    out.push(Violation {
                        law: "shrinkage",
                        step: k,
                        concept: i,
                    });
                }
            }
            if k > origin + 1 {
                let bound = states[origin][i].join(states[origin + 1][i]);
                if !states[k][i].leq(bound) {
                    out.push(Violation {
                        law: "bound",
                        step: k,
                        concept: i,
                    });
                }
            }
        }
    }
    if let Some(r) = &trace.r_diag {
        for (k, (rk, fk)) in r.iter().zip(&trace.coeffs).enumerate() {
            for i in 0..n {
                if !rk[i].leq(fk[i]) {
                    out.push(Violation {
                        law: "r-le-f",
                        step: k,
                        concept: i,
                    });
                }
            }
        }
        if trace.converged {
            if let (Some(rk), Some(fk)) = (r.last(), trace.coeffs.last()) {
                for i in 0..n {
                    if rk[i] != fk[i] {
                        out.push(Violation {
                            law: "r-eq-f-at-fixed-point",
                            step: trace.steps - 1,
                            concept: i,
                        });
                    }
                }
            }
        }
    }
    if trace.converged {
        let m = states.len();
        if m < 3 || states[m - 1] != states[m - 2] || states[m - 2] != states[m - 3] {
            out.push(Violation {
                law: "converged-triple",
                step: trace.steps,
                concept: 0,
            });
        }
    }
    out
}
