//! Multi-valued cognitive maps over a finite distributive lattice of
//! uncertainty degrees.
//!
//! Concept values and causal weights are elements of a powerset lattice
//! generated by a handful of atoms. A map iterates synchronously until three
//! consecutive states agree, and its weights can be learned toward
//! expert-chosen desired outputs.

pub mod cli;
pub mod engine;
pub mod error;
pub mod io;
pub mod lattice;
pub mod learning;
pub mod model;
pub mod scale;
pub mod table;
pub mod tracefmt;

pub use engine::{audit, restart, run, run_scenario, EngineConfig, IterationTrace, NegMode};
pub use error::{EngineError, LatticeError, LearnError, ModelError, TableError};
pub use lattice::{AtomLattice, AtomSet};
pub use learning::{learn, DocSelect, LearnConfig, LearnMode, LearnResult};
pub use model::{MapModel, Scenario, SignedWeight, WeightMatrix};
pub use scale::{standard_scale, format_element, parse_element};
pub use table::{validate, FiniteLatticeTable, ValidityReport};
pub use io::{parse_model, write_model, Diagnostic, ModelDocument, Severity};
pub use tracefmt::{read_lines, serialize_trace, TraceFormat};
