//! Cognitive map models: concepts, signed weights, initial-value cases and
//! desired-output sets.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::ModelError;
use crate::lattice::{AtomLattice, AtomSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

/// A causal weight. Negative weights have their contribution deducted from the
/// join of the positive ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignedWeight {
    pub value: AtomSet,
    pub sign: Sign,
}

impl SignedWeight {
    pub fn positive(value: AtomSet) -> Self {
        SignedWeight {
            value,
            sign: Sign::Positive,
        }
    }

    pub fn negative(value: AtomSet) -> Self {
        SignedWeight {
            value,
            sign: Sign::Negative,
        }
    }

    pub fn is_negative(&self) -> bool {
        self.sign == Sign::Negative
    }
}

/// Sparse weight matrix. Entry `(src, dst)` is the influence of `src` on `dst`.
/// Zero weights are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightMatrix {
    entries: BTreeMap<(usize, usize), SignedWeight>,
}

impl WeightMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, src: usize, dst: usize) -> Option<SignedWeight> {
        self.entries.get(&(src, dst)).copied()
    }

    /// Stores `w`, or removes the entry when its value is bottom. Returns the
    /// previous entry.
    pub fn set(&mut self, src: usize, dst: usize, w: SignedWeight) -> Option<SignedWeight> {
        if w.value.is_empty() {
            self.entries.remove(&(src, dst))
        } else {
            self.entries.insert((src, dst), w)
        }
    }

    pub fn remove(&mut self, src: usize, dst: usize) -> Option<SignedWeight> {
        self.entries.remove(&(src, dst))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), SignedWeight)> + '_ {
        self.entries.iter().map(|(&k, &w)| (k, w))
    }

    /// Entries `(src, weight)` pointing at `dst`.
    pub fn incoming(&self, dst: usize) -> impl Iterator<Item = (usize, SignedWeight)> + '_ {
        self.entries
            .iter()
            .filter(move |((_, d), _)| *d == dst)
            .map(|(&(s, _), &w)| (s, w))
    }

    /// Destination columns in which `self` and `other` differ.
    pub fn changed_columns(&self, other: &WeightMatrix) -> BTreeSet<usize> {
        let keys: BTreeSet<(usize, usize)> = self
            .entries
            .keys()
            .chain(other.entries.keys())
            .copied()
            .collect();
        keys.into_iter()
            .filter(|&(s, d)| self.get(s, d) != other.get(s, d))
            .map(|(_, d)| d)
            .collect()
    }
}

/// Initial values plus optional external edits: at step `k` the listed
/// concepts are overwritten after the map update (an outside change of, say,
/// insolation or wind).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Scenario {
    pub init: Vec<AtomSet>,
    pub edits: BTreeMap<usize, Vec<(usize, AtomSet)>>,
}

impl Scenario {
    pub fn new(init: Vec<AtomSet>) -> Self {
        Scenario {
            init,
            edits: BTreeMap::new(),
        }
    }

    pub fn with_edit(mut self, step: usize, concept: usize, value: AtomSet) -> Self {
        self.edits.entry(step).or_default().push((concept, value));
        self
    }

    pub fn last_edit(&self) -> usize {
        self.edits.keys().next_back().copied().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapModel {
    pub scale: AtomLattice,
    pub concepts: Vec<String>,
    pub clamped: Vec<bool>,
    pub weights: WeightMatrix,
    pub cases: Vec<(String, Scenario)>,
    pub docs: BTreeMap<usize, Vec<AtomSet>>,
}

impl MapModel {
    pub fn new(scale: AtomLattice) -> Self {
        MapModel {
            scale,
            concepts: Vec::new(),
            clamped: Vec::new(),
            weights: WeightMatrix::new(),
            cases: Vec::new(),
            docs: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn add_concept(&mut self, name: &str, clamped: bool) -> Result<usize, ModelError> {
        if self.concept_index(name).is_some() {
            return Err(ModelError::DuplicateConcept(name.to_string()));
        }
        self.concepts.push(name.to_string());
        self.clamped.push(clamped);
        Ok(self.concepts.len() - 1)
    }

    pub fn concept_index(&self, name: &str) -> Option<usize> {
        self.concepts.iter().position(|c| c == name)
    }

    pub fn concept(&self, name: &str) -> Result<usize, ModelError> {
        self.concept_index(name)
            .ok_or_else(|| ModelError::UnknownConcept(name.to_string()))
    }

    pub fn is_clamped(&self, i: usize) -> bool {
        self.clamped.get(i).copied().unwrap_or(false)
    }

    /// Adds a weight; a second entry for the same edge is an error.
    pub fn add_weight(&mut self, src: usize, dst: usize, w: SignedWeight) -> Result<(), ModelError> {
        self.check_index(src)?;
        self.check_index(dst)?;
        self.scale.check(w.value)?;
        if self.weights.get(src, dst).is_some() {
            return Err(ModelError::DuplicateWeight {
                src: self.concepts[src].clone(),
                dst: self.concepts[dst].clone(),
            });
        }
        self.weights.set(src, dst, w);
        Ok(())
    }

    pub fn add_case(&mut self, name: &str, scenario: Scenario) -> Result<(), ModelError> {
        if self.case(name).is_some() {
            return Err(ModelError::DuplicateCase(name.to_string()));
        }
        self.cases.push((name.to_string(), scenario));
        Ok(())
    }

    pub fn case(&self, name: &str) -> Option<&Scenario> {
        self.cases.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    pub fn case_names(&self) -> impl Iterator<Item = &str> {
        self.cases.iter().map(|(n, _)| n.as_str())
    }

    pub fn set_doc(&mut self, concept: usize, values: Vec<AtomSet>) -> Result<(), ModelError> {
        self.check_index(concept)?;
        if values.is_empty() {
            return Err(ModelError::EmptyDoc(self.concepts[concept].clone()));
        }
        for &v in &values {
            self.scale.check(v)?;
        }
        self.docs.insert(concept, values);
        Ok(())
    }

    fn check_index(&self, i: usize) -> Result<(), ModelError> {
        if i < self.concepts.len() {
            Ok(())
        } else {
            Err(ModelError::ConceptIndex(i))
        }
    }

    /// Checks every structural invariant of the model.
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.concepts.is_empty() {
            return Err(ModelError::NoConcepts);
        }
        if self.clamped.len() != self.concepts.len() {
            return Err(ModelError::ConceptIndex(self.clamped.len()));
        }
        for ((s, d), w) in self.weights.iter() {
            self.check_index(s)?;
            self.check_index(d)?;
            self.scale.check(w.value)?;
        }
        for (name, sc) in &self.cases {
            if sc.init.len() != self.concepts.len() {
                return Err(ModelError::InitShape {
                    case: name.clone(),
                    expected: self.concepts.len(),
                    got: sc.init.len(),
                });
            }
            for &v in &sc.init {
                self.scale.check(v)?;
            }
            if sc.edits.contains_key(&0) {
                return Err(ModelError::EditAtZero { case: name.clone() });
            }
            for (i, v) in sc.edits.values().flatten() {
                self.check_index(*i)?;
                self.scale.check(*v)?;
            }
        }
        for (&i, values) in &self.docs {
            self.check_index(i)?;
            if values.is_empty() {
                return Err(ModelError::EmptyDoc(self.concepts[i].clone()));
            }
            for &v in values {
                self.scale.check(v)?;
            }
        }
        Ok(())
    }
}
