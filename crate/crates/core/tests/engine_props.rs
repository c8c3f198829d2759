//! Laws of the iteration on arbitrary small maps.
//!
//! Containment, the initial-pair bound and the `r` laws hold for every map.
//! Convergence and the shrinking-difference law do not: both fail on some
//! random maps (see `arbitrary_maps_can_cycle`), so they are checked on the
//! bundled scenarios instead.

use mvcm::engine::{audit, check_bound, restart, run_scenario, EngineConfig, IterationTrace, NegMode};
use mvcm::learning::{learn, LearnConfig, LearnMode};
use mvcm::model::{MapModel, Scenario, SignedWeight};
use mvcm::{AtomLattice, AtomSet, EngineError, LearnError};
use proptest::prelude::*;

const ATOMS: usize = 3;

#[derive(Clone, Debug)]
struct Spec {
    clamped: Vec<bool>,
    weights: Vec<(usize, usize, u64, bool)>,
    init: Vec<u64>,
}

fn spec() -> impl Strategy<Value = Spec> {
    (2usize..=5).prop_flat_map(|n| {
        let top = 1u64 << ATOMS;
        (
            proptest::collection::vec(proptest::bool::weighted(0.25), n),
            proptest::collection::vec((0..n, 0..n, 1..top, proptest::bool::weighted(0.2)), 0..=n * n),
            proptest::collection::vec(0..top, n),
        )
            .prop_map(|(clamped, weights, init)| Spec { clamped, weights, init })
    })
}

fn build(s: &Spec) -> (MapModel, Scenario) {
    let l = AtomLattice::new(&["p", "q", "r"]).unwrap();
    let mut m = MapModel::new(l);
    for (i, &c) in s.clamped.iter().enumerate() {
        m.add_concept(&format!("X{i}"), c).unwrap();
    }
    for &(src, dst, bits, neg) in &s.weights {
        let v = AtomSet::from_bits(bits);
        let w = if neg { SignedWeight::negative(v) } else { SignedWeight::positive(v) };
        // later duplicates of an edge are dropped
        let _ = m.add_weight(src, dst, w);
    }
    let init = s.init.iter().map(|&b| AtomSet::from_bits(b)).collect();
    (m, Scenario::new(init))
}

fn cfg(neg_mode: NegMode) -> EngineConfig {
    EngineConfig {
        max_iters: 40,
        record_r: true,
        neg_mode,
        ..Default::default()
    }
}

fn trace_of(m: &MapModel, cfg: &EngineConfig, sc: &Scenario) -> IterationTrace {
    match run_scenario(m, cfg, sc) {
        Ok(t) => t,
        Err(EngineError::NotConverged { trace }) => *trace,
        Err(e) => panic!("{e}"),
    }
}

fn neg_mode() -> impl Strategy<Value = NegMode> {
    prop_oneof![Just(NegMode::Symmetric), Just(NegMode::Strict)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn universal_laws_hold(s in spec(), mode in neg_mode()) {
        let (m, sc) = build(&s);
        let t = trace_of(&m, &cfg(mode), &sc);
        let v: Vec<_> = audit(&m, &t).into_iter().filter(|v| v.law != "shrinkage").collect();
        prop_assert!(v.is_empty(), "{:?}", v);
        prop_assert!(check_bound(&t, &sc.init));
        for (i, &c) in s.clamped.iter().enumerate() {
            if c {
                prop_assert!(t.states.iter().all(|st| st[i] == sc.init[i]));
            }
        }
        prop_assert_eq!(t.states.len(), t.steps + 1);
        prop_assert_eq!(t.coeffs.len(), t.steps);
    }

    #[test]
    fn warm_restart_keeps_any_fixed_point(s in spec(), mode in neg_mode()) {
        let (m, sc) = build(&s);
        let c = cfg(mode);
        if let Ok(t) = run_scenario(&m, &c, &sc) {
            let again = restart(&m, &c, &t).unwrap();
            prop_assert!(again.converged);
            prop_assert_eq!(again.steps, 2);
            prop_assert!(again.states.iter().all(|st| st == t.final_state()));
        }
    }

    #[test]
    fn runs_are_deterministic(s in spec()) {
        let (m, sc) = build(&s);
        let c = cfg(NegMode::Symmetric);
        prop_assert_eq!(trace_of(&m, &c, &sc), trace_of(&m, &c, &sc));
    }

    #[test]
    fn modes_agree_without_negative_weights(s in spec()) {
        let (mut m, sc) = build(&s);
        let positive: Vec<_> = m.weights.iter().map(|((a, b), w)| (a, b, SignedWeight::positive(w.value))).collect();
        for (a, b, w) in positive {
            m.weights.set(a, b, w);
        }
        prop_assert_eq!(
            trace_of(&m, &cfg(NegMode::Symmetric), &sc),
            trace_of(&m, &cfg(NegMode::Strict), &sc)
        );
    }

    #[test]
    fn learning_touches_only_target_columns(
        s in spec(),
        doc_bits in proptest::collection::vec(0u64..(1 << ATOMS), 1..3),
        per_step in any::<bool>(),
    ) {
        let (mut m, sc) = build(&s);
        let target = m.len() - 1;
        m.set_doc(target, doc_bits.iter().map(|&b| AtomSet::from_bits(b)).collect()).unwrap();
        m.add_case("x", sc).unwrap();
        let lcfg = LearnConfig {
            mode: if per_step { LearnMode::PerStep } else { LearnMode::EndOfRun },
            max_outer: 10,
            ..Default::default()
        };
        let weights = match learn(&m, &cfg(NegMode::Symmetric), &lcfg, "x") {
            Ok(r) => {
                prop_assert!(m.docs[&target].contains(&r.trace.final_state()[target]));
                prop_assert!(r.all_in_doc(&m));
                r.weights
            }
            Err(LearnError::Failed { last }) => last.weights,
            Err(LearnError::Engine(EngineError::NotConverged { .. })) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        let changed = m.weights.changed_columns(&weights);
        prop_assert!(changed.iter().all(|&c| c == target), "{:?}", changed);
    }

    #[test]
    fn learning_leaves_in_doc_targets_alone(s in spec()) {
        let (mut m, sc) = build(&s);
        let c = cfg(NegMode::Symmetric);
        let Ok(t) = run_scenario(&m, &c, &sc) else { return Ok(()) };
        let target = m.len() - 1;
        m.set_doc(target, vec![t.final_state()[target]]).unwrap();
        m.add_case("x", sc).unwrap();
        let r = learn(&m, &c, &LearnConfig::default(), "x").unwrap();
        prop_assert_eq!(r.outer_rounds, 1);
        prop_assert_eq!(&r.weights, &m.weights);
        prop_assert!(r.corrections.is_empty());
    }
}

/// Two concepts feeding each other with top weights swap values forever.
#[test]
fn arbitrary_maps_can_cycle() {
    let l = AtomLattice::new(&["p", "q"]).unwrap();
    let mut m = MapModel::new(l.clone());
    m.add_concept("X", false).unwrap();
    m.add_concept("Y", false).unwrap();
    m.add_weight(0, 1, SignedWeight::positive(l.top())).unwrap();
    m.add_weight(1, 0, SignedWeight::positive(l.top())).unwrap();
    let (p, q) = (AtomSet::from_bits(1), AtomSet::from_bits(2));
    let err = run_scenario(&m, &cfg(NegMode::Symmetric), &Scenario::new(vec![p, q])).unwrap_err();
    let EngineError::NotConverged { trace } = err else { panic!("expected a cycle") };
    assert_eq!(trace.steps, 40);
    assert!(trace.states.iter().enumerate().all(|(k, s)| *s == if k % 2 == 0 { vec![p, q] } else { vec![q, p] }));
}

/// A change arriving late along a chain reopens a settled concept, so the
/// shrinking-difference law is not universal.
#[test]
fn shrinkage_can_fail_on_chains() {
    let l = AtomLattice::new(&["p"]).unwrap();
    let top = l.top();
    let mut m = MapModel::new(l);
    for c in ["A", "B", "C"] {
        m.add_concept(c, false).unwrap();
    }
    m.add_weight(0, 1, SignedWeight::positive(top)).unwrap();
    m.add_weight(1, 2, SignedWeight::positive(top)).unwrap();
    let sc = Scenario::new(vec![AtomSet::EMPTY, top, top]);
    let t = trace_of(&m, &cfg(NegMode::Symmetric), &sc);
    // C stays at p for two rows, then loses it once B has emptied
    let col: Vec<AtomSet> = t.states.iter().map(|s| s[2]).collect();
    assert_eq!(&col[..3], &[top, top, AtomSet::EMPTY]);
    assert!(audit(&m, &t).iter().any(|v| v.law == "shrinkage"));
}
