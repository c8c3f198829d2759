//! Frozen traces and learned matrices for the bundled hybrid-energy models.

use mvcm::engine::{audit, restart, run, EngineConfig, NegMode};
use mvcm::learning::{learn, LearnConfig, LearnMode};
use mvcm::model::{MapModel, Scenario};
use mvcm::scale::format_element;
use mvcm::tracefmt::{read_lines, to_lines, weight_changes};
use mvcm::{parse_model, run_scenario};

const POSITIVE: &str = include_str!("../models/hybrid_energy.mvcm");
const NEGATIVE: &str = include_str!("../models/hybrid_energy_neg.mvcm");

fn model(text: &str) -> MapModel {
    let doc = parse_model(text);
    assert!(doc.diagnostics.is_empty(), "{:?}", doc.diagnostics);
    doc.model.unwrap()
}

/// Rows of labels, one string per state.
fn rows(m: &MapModel, case: &str, cfg: &EngineConfig) -> Vec<String> {
    let t = run(m, cfg, case).unwrap();
    t.states
        .iter()
        .map(|s| s.iter().map(|v| format_element(&m.scale, *v)).collect::<Vec<_>>().join(" "))
        .collect()
}

fn last(m: &MapModel, case: &str) -> String {
    rows(m, case, &EngineConfig::default()).pop().unwrap()
}

#[test]
fn bundled_weights() {
    let m = model(POSITIVE);
    let w = |a: &str, b: &str| {
        let w = m.weights.get(m.concept(a).unwrap(), m.concept(b).unwrap()).unwrap();
        (format_element(&m.scale, w.value), w.is_negative())
    };
    assert_eq!(w("C1", "C2"), ("born".into(), false));
    assert_eq!(w("C2", "C4"), ("Tb".into(), false));
    assert_eq!(w("C3", "C5"), ("hn0h".into(), false));
    assert_eq!(m.weights.len(), 9);
    let n = model(NEGATIVE);
    let neg: Vec<_> = n.weights.iter().filter(|(_, w)| w.is_negative()).map(|(k, _)| k).collect();
    assert_eq!(neg, vec![(1, 3), (2, 1)]);
}

#[test]
fn positive_weights_fixed_points() {
    let m = model(POSITIVE);
    assert_eq!(last(&m, "case1"), "horn {b,bn0,0c} c h c");
    assert_eq!(last(&m, "case2"), "horn born d h d");
    assert_eq!(last(&m, "case3"), "horn born d h d");
    for c in ["case1", "case2", "case3"] {
        assert_eq!(run(&m, &EngineConfig::default(), c).unwrap().steps, 3);
    }
}

#[test]
fn negative_weights_fixed_points() {
    let m = model(NEGATIVE);
    assert_eq!(last(&m, "case1"), "horn {b,bn0,0c} c 0h c");
    assert_eq!(last(&m, "case2"), "horn born d 0h d");
    assert_eq!(last(&m, "case3"), "horn born d 0h d");
}

#[test]
fn first_row_is_the_initial_vector() {
    let m = model(POSITIVE);
    assert_eq!(rows(&m, "case3", &EngineConfig::default())[0], "horn b d h c");
}

#[test]
fn strict_deduction_drops_the_extra_generator() {
    let m = model(NEGATIVE);
    let strict = EngineConfig {
        neg_mode: NegMode::Strict,
        ..Default::default()
    };
    // C2 = (horn ∧ born) − (c ∧ ca0c): symmetric keeps 0c, strict cannot add it
    assert_eq!(rows(&m, "case1", &EngineConfig::default())[1].split(' ').nth(1), Some("{b,bn0,0c}"));
    assert_eq!(rows(&m, "case1", &strict)[1].split(' ').nth(1), Some("born"));
}

#[test]
fn insolation_drop_with_rising_wind() {
    let m = model(NEGATIVE);
    let c = rows(&m, "case3c", &EngineConfig::default());
    assert_eq!(
        c,
        vec![
            "horn b d h c",
            "d born h 0h d",
            "d b h 0d h",
            "d b h 0d h",
            "d b h 0d h"
        ]
    );
    let d = rows(&m, "case3d", &EngineConfig::default());
    assert_eq!(d.last().unwrap(), "d b h 0d d");
}

#[test]
fn cold_restart_moves_but_warm_restart_does_not() {
    let m = model(POSITIVE);
    let cfg = EngineConfig::default();
    let t = run(&m, &cfg, "case3").unwrap();
    let cold = run_scenario(&m, &cfg, &Scenario::new(t.final_state().to_vec())).unwrap();
    let c4 = m.concept("C4").unwrap();
    assert_eq!(format_element(&m.scale, t.final_state()[c4]), "h");
    assert_eq!(format_element(&m.scale, cold.final_state()[c4]), "horn");
    let warm = restart(&m, &cfg, &t).unwrap();
    assert_eq!(warm.final_state(), t.final_state());
    assert_eq!(warm.steps, 2);
}

#[test]
fn end_of_run_learning_matrix() {
    let m = model(NEGATIVE);
    let r = learn(&m, &EngineConfig::default(), &LearnConfig::default(), "case3d").unwrap();
    assert_eq!(r.outer_rounds, 2);
    assert_eq!(
        weight_changes(&m, &m.weights, &r.weights),
        vec!["C1 -> C5: b => {ba0,b,bn0,0c}", "C3 -> C5: hn0h => Th"]
    );
    let mut learned = m.clone();
    learned.weights = r.weights;
    for case in ["case3c", "case3d"] {
        assert_eq!(last(&learned, case), "d b h 0d h");
    }
}

#[test]
fn per_step_learning_matrix() {
    let m = model(NEGATIVE);
    let lcfg = LearnConfig {
        mode: LearnMode::PerStep,
        ..Default::default()
    };
    let r = learn(&m, &EngineConfig::default(), &lcfg, "case3d").unwrap();
    assert_eq!(
        weight_changes(&m, &m.weights, &r.weights),
        vec![
            "C1 -> C4: hora => d",
            "C1 -> C5: b => caorn",
            "C2 -> C4: -Tb => -Th",
            "C3 -> C4: bora => b",
            "C3 -> C5: hn0h => {ba0,bn0,0c,0d}"
        ]
    );
    let mut learned = m.clone();
    learned.weights = r.weights;
    for case in ["case3c", "case3d"] {
        assert_eq!(last(&learned, case), "d b h 0d 0h");
    }
    // starting from C5 = c the targets are already in place
    let rc = learn(&m, &EngineConfig::default(), &lcfg, "case3c").unwrap();
    assert_eq!(rc.outer_rounds, 1);
    assert_eq!(format_element(&m.scale, rc.achieved[&m.concept("C5").unwrap()]), "h");
}

#[test]
fn best_doc_selection_also_succeeds() {
    let m = model(NEGATIVE);
    let lcfg = LearnConfig {
        doc_select: mvcm::DocSelect::Best,
        ..Default::default()
    };
    let r = learn(&m, &EngineConfig::default(), &lcfg, "case3d").unwrap();
    assert!(r.all_in_doc(&m));
    assert_eq!(m.weights.changed_columns(&r.weights).into_iter().collect::<Vec<_>>(), vec![4]);
}

#[test]
fn lines_golden_round_trips() {
    let m = model(NEGATIVE);
    let cfg = EngineConfig {
        record_r: true,
        ..Default::default()
    };
    let t = run(&m, &cfg, "case3c").unwrap();
    assert!(audit(&m, &t).is_empty());
    let text = to_lines(&m, &t);
    assert!(text.starts_with("0\tC1\thorn\t{b,bn0,0c,0d}\n0\tC2\tb\t{b}\n"));
    assert!(text.ends_with("# converged in 4 iterations\n"));
    let back = read_lines(&m, &text).unwrap();
    assert_eq!(back.states, t.states);
    assert_eq!(back.r_diag, t.r_diag);
}
