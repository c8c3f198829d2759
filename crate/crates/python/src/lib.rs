//! Python bindings: `Lattice`, `Model` and `Trace`.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyKeyError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use mvcm::engine::{self, EngineConfig, IterationTrace, NegMode};
use mvcm::learning::{learn, DocSelect, LearnConfig, LearnMode};
use mvcm::table::{cross_check_implication, validate, FiniteLatticeTable};
use mvcm::tracefmt::{to_lines, to_table, weight_changes};
use mvcm::{AtomLattice, AtomSet, EngineError, LearnError, MapModel};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A powerset lattice of uncertainty degrees with named elements.
#[pyclass(module = "pymvcm", frozen)]
struct Lattice {
    inner: AtomLattice,
}

impl Lattice {
    fn el(&self, label: &str) -> PyResult<AtomSet> {
        mvcm::parse_element(&self.inner, label).map_err(value_err)
    }

    fn fmt(&self, a: AtomSet) -> String {
        mvcm::format_element(&self.inner, a)
    }
}

#[pymethods]
impl Lattice {
    #[new]
    fn new(atoms: Vec<String>) -> PyResult<Self> {
        Ok(Lattice {
            inner: AtomLattice::new(&atoms).map_err(value_err)?,
        })
    }

    /// The five-atom scale with its full label dictionary.
    #[staticmethod]
    fn standard() -> Self {
        Lattice {
            inner: mvcm::standard_scale(),
        }
    }

    #[getter]
    fn atoms(&self) -> Vec<String> {
        self.inner.atoms().to_vec()
    }

    fn names(&self) -> Vec<String> {
        self.inner.names().map(|(n, _)| n.to_string()).collect()
    }

    /// Every element label, in bit order.
    fn elements(&self) -> Vec<String> {
        self.inner.elements().map(|a| self.fmt(a)).collect()
    }

    /// Canonical label of `label` (a name or an `{atom,...}` set).
    fn canonical(&self, label: &str) -> PyResult<String> {
        Ok(self.fmt(self.el(label)?))
    }

    fn atoms_of(&self, label: &str) -> PyResult<Vec<String>> {
        let a = self.el(label)?;
        Ok(a.indices().map(|i| self.inner.atoms()[i].clone()).collect())
    }

    fn join(&self, a: &str, b: &str) -> PyResult<String> {
        Ok(self.fmt(self.el(a)?.join(self.el(b)?)))
    }

    fn meet(&self, a: &str, b: &str) -> PyResult<String> {
        Ok(self.fmt(self.el(a)?.meet(self.el(b)?)))
    }

    fn implies(&self, a: &str, b: &str) -> PyResult<String> {
        Ok(self.fmt(self.el(a)?.implies_in(self.el(b)?, self.inner.top())))
    }

    fn sym_diff(&self, a: &str, b: &str) -> PyResult<String> {
        Ok(self.fmt(self.el(a)?.sym_diff(self.el(b)?)))
    }

    fn leq(&self, a: &str, b: &str) -> PyResult<bool> {
        Ok(self.el(a)?.leq(self.el(b)?))
    }

    /// Axiom flags from the exhaustive check.
    fn validate(&self) -> PyResult<BTreeMap<&'static str, bool>> {
        let r = validate(&FiniteLatticeTable::from_atom_lattice(&self.inner)).map_err(value_err)?;
        Ok(BTreeMap::from([
            ("lattice", r.is_lattice),
            ("distributive", r.is_distributive),
            ("atomic", r.is_atomic),
            ("residuated", r.is_residuated),
            ("integrally_closed", r.is_integrally_closed),
            ("integral", r.is_integral),
        ]))
    }

    /// Implication against brute-force residuals: `(pairs, triples, failures)`.
    fn oracle(&self) -> PyResult<(usize, usize, usize)> {
        let r = cross_check_implication(&self.inner).map_err(value_err)?;
        Ok((r.pairs, r.triples, r.residual_mismatches + r.adjunction_failures))
    }

    fn __repr__(&self) -> String {
        format!("Lattice({:?})", self.inner.atoms())
    }
}

/// An iteration trace; states are lists of labels.
#[pyclass(module = "pymvcm", frozen)]
struct Trace {
    model: MapModel,
    inner: IterationTrace,
}

#[pymethods]
impl Trace {
    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }

    #[getter]
    fn steps(&self) -> usize {
        self.inner.steps
    }

    #[getter]
    fn states(&self) -> Vec<Vec<String>> {
        self.inner
            .states
            .iter()
            .map(|s| s.iter().map(|v| mvcm::format_element(&self.model.scale, *v)).collect())
            .collect()
    }

    fn final_state(&self) -> BTreeMap<String, String> {
        self.model
            .concepts
            .iter()
            .cloned()
            .zip(self.inner.final_state().iter().map(|v| mvcm::format_element(&self.model.scale, *v)))
            .collect()
    }

    /// Invariant violations as `(law, step, concept)`.
    fn audit(&self) -> Vec<(&'static str, usize, String)> {
        engine::audit(&self.model, &self.inner)
            .into_iter()
            .map(|v| (v.law, v.step, self.model.concepts[v.concept].clone()))
            .collect()
    }

    fn to_table(&self) -> String {
        to_table(&self.model, &self.inner)
    }

    fn to_lines(&self) -> String {
        to_lines(&self.model, &self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Trace(steps={}, converged={})", self.inner.steps, self.inner.converged)
    }
}

/// A cognitive map parsed from the model-file format.
#[pyclass(module = "pymvcm", frozen)]
struct Model {
    inner: MapModel,
}

fn engine_config(model: &MapModel, max_iters: usize, neg_mode: &str, f0: Option<&str>, record_r: bool) -> PyResult<EngineConfig> {
    let neg_mode = match neg_mode {
        "symmetric" => NegMode::Symmetric,
        "strict" => NegMode::Strict,
        other => return Err(value_err(format!("neg_mode must be `symmetric` or `strict`, got `{other}`"))),
    };
    let f0 = f0.map(|l| mvcm::parse_element(&model.scale, l)).transpose().map_err(value_err)?;
    let cfg = EngineConfig {
        f0,
        max_iters,
        neg_mode,
        record_r,
        ..Default::default()
    };
    cfg.validate(model).map_err(value_err)?;
    Ok(cfg)
}

fn engine_err(e: EngineError) -> PyErr {
    match e {
        EngineError::UnknownCase(c) => PyKeyError::new_err(c),
        EngineError::NotConverged { trace } => {
            PyRuntimeError::new_err(format!("no fixed point after {} iterations", trace.steps))
        }
        other => value_err(other),
    }
}

#[pymethods]
impl Model {
    /// Parses model text; errors carry every diagnostic.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let doc = mvcm::parse_model(text);
        match doc.model {
            Some(inner) => Ok(Model { inner }),
            None => {
                let msgs: Vec<String> = doc.diagnostics.iter().map(|d| d.to_string()).collect();
                Err(value_err(msgs.join("\n")))
            }
        }
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        let text = std::fs::read_to_string(&path)?;
        Self::parse(&text)
    }

    #[getter]
    fn concepts(&self) -> Vec<String> {
        self.inner.concepts.clone()
    }

    #[getter]
    fn cases(&self) -> Vec<String> {
        self.inner.case_names().map(str::to_string).collect()
    }

    #[getter]
    fn lattice(&self) -> Lattice {
        Lattice {
            inner: self.inner.scale.clone(),
        }
    }

    /// `{(src, dst): label}`; negative weights carry a leading `-`.
    fn weights(&self) -> BTreeMap<(String, String), String> {
        let m = &self.inner;
        m.weights
            .iter()
            .map(|((s, d), w)| {
                let sign = if w.is_negative() { "-" } else { "" };
                (
                    (m.concepts[s].clone(), m.concepts[d].clone()),
                    format!("{sign}{}", mvcm::format_element(&m.scale, w.value)),
                )
            })
            .collect()
    }

    #[pyo3(signature = (case, max_iters=100, neg_mode="symmetric", f0=None, record_r=false))]
    fn run(&self, case: &str, max_iters: usize, neg_mode: &str, f0: Option<&str>, record_r: bool) -> PyResult<Trace> {
        let cfg = engine_config(&self.inner, max_iters, neg_mode, f0, record_r)?;
        let inner = engine::run(&self.inner, &cfg, case).map_err(engine_err)?;
        Ok(Trace {
            model: self.inner.clone(),
            inner,
        })
    }

    /// Continues a converged trace from its final state.
    fn restart(&self, trace: &Trace) -> PyResult<Trace> {
        let cfg = EngineConfig::default();
        let inner = engine::restart(&self.inner, &cfg, &trace.inner).map_err(engine_err)?;
        Ok(Trace {
            model: self.inner.clone(),
            inner,
        })
    }

    /// Learns weights; returns `(learned model, final trace, rounds, changes)`.
    #[pyo3(signature = (case, mode="end", doc_select="first", max_outer=50))]
    fn learn(&self, case: &str, mode: &str, doc_select: &str, max_outer: usize) -> PyResult<(Model, Trace, usize, Vec<String>)> {
        let mode = match mode {
            "end" => LearnMode::EndOfRun,
            "step" => LearnMode::PerStep,
            other => return Err(value_err(format!("mode must be `end` or `step`, got `{other}`"))),
        };
        let doc_select = match doc_select {
            "first" => DocSelect::First,
            "best" => DocSelect::Best,
            other => return Err(value_err(format!("doc_select must be `first` or `best`, got `{other}`"))),
        };
        let lcfg = LearnConfig {
            mode,
            doc_select,
            max_outer,
            targets: Vec::new(),
        };
        let r = learn(&self.inner, &EngineConfig::default(), &lcfg, case).map_err(|e| match e {
            LearnError::Engine(e) => engine_err(e),
            LearnError::Failed { last } => {
                PyRuntimeError::new_err(format!("targets still outside their desired sets after {} rounds", last.outer_rounds))
            }
            other => value_err(other),
        })?;
        let changes = weight_changes(&self.inner, &self.inner.weights, &r.weights);
        let mut learned = self.inner.clone();
        learned.weights = r.weights;
        let trace = Trace {
            model: learned.clone(),
            inner: r.trace,
        };
        Ok((Model { inner: learned }, trace, r.outer_rounds, changes))
    }

    fn to_text(&self) -> String {
        mvcm::write_model(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Model(concepts={:?}, cases={:?})", self.inner.concepts, self.cases())
    }
}

#[pymodule]
fn pymvcm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Lattice>()?;
    m.add_class::<Model>()?;
    m.add_class::<Trace>()?;
    Ok(())
}
