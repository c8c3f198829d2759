//! Generator-set algebra for finite atomic distributive lattices.
//!
//! Every element of an atomic distributive lattice is the join of the atoms
//! below it, so an element is stored as the set of its atoms. Join and meet
//! become union and intersection, and the lattice implication (the residual of
//! meet) is `complement(a) ∪ b` over the atom roster.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::LatticeError;

/// Largest supported atom roster; an element is one machine word.
pub const MAX_ATOMS: usize = 64;

/// A lattice element given by its generating atoms, as a bit pattern over the
/// owning lattice's atom roster (bit `i` is atom `i`).
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomSet(u64);

impl AtomSet {
    pub const EMPTY: AtomSet = AtomSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        AtomSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// The full set over a roster of `n` atoms.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_ATOMS);
        if n == MAX_ATOMS {
            AtomSet(u64::MAX)
        } else {
            AtomSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(atom: usize) -> Self {
        AtomSet(1u64 << atom)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(atoms: I) -> Self {
        atoms
            .into_iter()
            .fold(AtomSet::EMPTY, |acc, i| acc.join(AtomSet::singleton(i)))
    }

    pub fn contains(self, atom: usize) -> bool {
        atom < MAX_ATOMS && self.0 & (1u64 << atom) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Atom indices in ascending order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..MAX_ATOMS).filter(move |i| bits & (1u64 << i) != 0)
    }

    pub fn join(self, other: AtomSet) -> AtomSet {
        AtomSet(self.0 | other.0)
    }

    /// Meet; also the monoid multiplication of the meet-monoid.
    pub fn meet(self, other: AtomSet) -> AtomSet {
        AtomSet(self.0 & other.0)
    }

    /// `(a ∪ b) ⊖ (a ∩ b)`.
    pub fn sym_diff(self, other: AtomSet) -> AtomSet {
        AtomSet(self.0 ^ other.0)
    }

    /// Members of `self` not in `other`.
    pub fn set_minus(self, other: AtomSet) -> AtomSet {
        AtomSet(self.0 & !other.0)
    }

    pub fn leq(self, other: AtomSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Strictly below: `self ≤ other` and `self ≠ other`.
    pub fn lt(self, other: AtomSet) -> bool {
        self != other && self.leq(other)
    }

    pub fn comparable(self, other: AtomSet) -> bool {
        self.leq(other) || other.leq(self)
    }

    pub fn generator_count(self) -> u32 {
        self.0.count_ones()
    }

    /// Complement relative to `top`.
    pub fn complement_in(self, top: AtomSet) -> AtomSet {
        top.set_minus(self)
    }

    /// Heyting implication `self ⇒ other` relative to `top`: the largest `c`
    /// with `self ∧ c ≤ other`.
    pub fn implies_in(self, other: AtomSet, top: AtomSet) -> AtomSet {
        self.complement_in(top).join(other)
    }
}

impl fmt::Debug for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AtomSet({:#b})", self.0)
    }
}

/// The ambient lattice: an atom roster plus a dictionary of named elements.
///
/// Elements range over the full powerset of the roster; only some carry names.
/// The bottom is always named `0` and the top `Th`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomLattice {
    atoms: Vec<String>,
    names: BTreeMap<String, AtomSet>,
    labels: BTreeMap<AtomSet, String>,
    // declaration order, for serialization
    order: Vec<String>,
}

pub const BOTTOM_LABEL: &str = "0";
pub const TOP_LABEL: &str = "Th";

impl AtomLattice {
    /// A lattice over `atoms` with only `0` and `Th` named.
    pub fn new<S: AsRef<str>>(atoms: &[S]) -> Result<Self, LatticeError> {
        if atoms.is_empty() {
            return Err(LatticeError::EmptyRoster);
        }
        if atoms.len() > MAX_ATOMS {
            return Err(LatticeError::TooManyAtoms(atoms.len()));
        }
        let mut roster: Vec<String> = Vec::with_capacity(atoms.len());
        for a in atoms {
            let a = a.as_ref();
            if !is_identifier(a) {
                return Err(LatticeError::BadIdentifier(a.to_string()));
            }
            if roster.iter().any(|r| r == a) {
                return Err(LatticeError::DuplicateAtom(a.to_string()));
            }
            roster.push(a.to_string());
        }
        let mut lattice = AtomLattice {
            atoms: roster,
            names: BTreeMap::new(),
            labels: BTreeMap::new(),
            order: Vec::new(),
        };
        lattice.insert_name(BOTTOM_LABEL, AtomSet::EMPTY)?;
        let top = lattice.top();
        lattice.insert_name(TOP_LABEL, top)?;
        Ok(lattice)
    }

    /// Adds a linguistic label for an element.
    pub fn add_name(&mut self, name: &str, value: AtomSet) -> Result<(), LatticeError> {
        self.check(value)?;
        self.insert_name(name, value)
    }

    fn insert_name(&mut self, name: &str, value: AtomSet) -> Result<(), LatticeError> {
        if !is_identifier(name) {
            return Err(LatticeError::BadIdentifier(name.to_string()));
        }
        if self.names.contains_key(name) {
            return Err(LatticeError::DuplicateLabel(name.to_string()));
        }
        if let Some(existing) = self.labels.get(&value) {
            return Err(LatticeError::AliasedElement {
                label: name.to_string(),
                existing: existing.clone(),
            });
        }
        self.names.insert(name.to_string(), value);
        self.labels.insert(value, name.to_string());
        self.order.push(name.to_string());
        Ok(())
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom_index(&self, atom: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == atom)
    }

    pub fn top(&self) -> AtomSet {
        AtomSet::full(self.atoms.len())
    }

    pub fn bottom(&self) -> AtomSet {
        AtomSet::EMPTY
    }

    /// Number of elements, `2^atoms`.
    pub fn size(&self) -> u128 {
        1u128 << self.atoms.len()
    }

    /// All elements in bit-pattern order. Only sensible for small rosters.
    pub fn elements(&self) -> impl Iterator<Item = AtomSet> {
        let n = self.atoms.len();
        assert!(n < 32, "enumerating a lattice with {n} atoms");
        (0..(1u64 << n)).map(AtomSet::from_bits)
    }

    pub fn contains(&self, a: AtomSet) -> bool {
        a.leq(self.top())
    }

    pub fn check(&self, a: AtomSet) -> Result<AtomSet, LatticeError> {
        if self.contains(a) {
            Ok(a)
        } else {
            Err(LatticeError::ForeignElement {
                bits: a.bits(),
                atoms: self.atoms.len(),
            })
        }
    }

    pub fn named(&self, label: &str) -> Option<AtomSet> {
        self.names.get(label).copied()
    }

    pub fn label_of(&self, a: AtomSet) -> Option<&str> {
        self.labels.get(&a).map(String::as_str)
    }

    /// Named elements in declaration order.
    pub fn names(&self) -> impl Iterator<Item = (&str, AtomSet)> + '_ {
        self.order
            .iter()
            .map(move |n| (n.as_str(), self.names[n.as_str()]))
    }

    pub fn join(&self, a: AtomSet, b: AtomSet) -> Result<AtomSet, LatticeError> {
        Ok(self.check(a)?.join(self.check(b)?))
    }

    pub fn meet(&self, a: AtomSet, b: AtomSet) -> Result<AtomSet, LatticeError> {
        Ok(self.check(a)?.meet(self.check(b)?))
    }

    pub fn implies(&self, a: AtomSet, b: AtomSet) -> Result<AtomSet, LatticeError> {
        Ok(self.check(a)?.implies_in(self.check(b)?, self.top()))
    }

    pub fn sym_diff(&self, a: AtomSet, b: AtomSet) -> Result<AtomSet, LatticeError> {
        Ok(self.check(a)?.sym_diff(self.check(b)?))
    }

    pub fn set_minus(&self, a: AtomSet, b: AtomSet) -> AtomSet {
        a.set_minus(b)
    }

    pub fn leq(&self, a: AtomSet, b: AtomSet) -> bool {
        a.leq(b)
    }

    pub fn generator_count(&self, a: AtomSet) -> u32 {
        a.generator_count()
    }
}

/// Atom and label identifiers: non-empty, no whitespace or structural punctuation.
pub(crate) fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s
            .chars()
            .all(|c| !c.is_whitespace() && !matches!(c, '{' | '}' | ',' | '=' | '#' | ':' | '@'))
        && !s.starts_with('-')
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pq() -> AtomLattice {
        AtomLattice::new(&["p", "q"]).unwrap()
    }

    #[test]
    fn bottom_and_top_are_named() {
        let l = pq();
        assert_eq!(l.named("0"), Some(AtomSet::EMPTY));
        assert_eq!(l.named("Th"), Some(AtomSet::from_bits(0b11)));
        assert_eq!(l.size(), 4);
    }

    #[test]
    fn rejects_bad_rosters() {
        assert!(matches!(
            AtomLattice::new(&["a", "a"]),
            Err(LatticeError::DuplicateAtom(_))
        ));
        assert!(matches!(
            AtomLattice::new::<&str>(&[]),
            Err(LatticeError::EmptyRoster)
        ));
        let many: Vec<String> = (0..65).map(|i| format!("a{i}")).collect();
        assert!(matches!(
            AtomLattice::new(&many),
            Err(LatticeError::TooManyAtoms(65))
        ));
        let max: Vec<String> = (0..64).map(|i| format!("a{i}")).collect();
        let l = AtomLattice::new(&max).unwrap();
        assert_eq!(l.top().bits(), u64::MAX);
        assert_eq!(l.top().generator_count(), 64);
    }

    #[test]
    fn names_must_be_unique_both_ways() {
        let mut l = pq();
        l.add_name("pp", AtomSet::singleton(0)).unwrap();
        assert!(matches!(
            l.add_name("pp", AtomSet::singleton(1)),
            Err(LatticeError::DuplicateLabel(_))
        ));
        assert!(matches!(
            l.add_name("other", AtomSet::singleton(0)),
            Err(LatticeError::AliasedElement { .. })
        ));
        assert!(matches!(
            l.add_name("big", AtomSet::from_bits(0b100)),
            Err(LatticeError::ForeignElement { .. })
        ));
    }

    #[test]
    fn mismatched_lattice_is_domain_error() {
        let l = pq();
        let foreign = AtomSet::singleton(5);
        assert!(l.join(foreign, AtomSet::EMPTY).is_err());
        assert!(l.meet(AtomSet::EMPTY, foreign).is_err());
        assert!(l.implies(foreign, foreign).is_err());
        assert!(l.sym_diff(foreign, AtomSet::EMPTY).is_err());
    }

    #[test]
    fn implication_basics() {
        let l = pq();
        let p = AtomSet::singleton(0);
        let q = AtomSet::singleton(1);
        assert_eq!(l.implies(p, p).unwrap(), l.top());
        assert_eq!(l.implies(AtomSet::EMPTY, q).unwrap(), l.top());
        assert_eq!(l.implies(l.top(), q).unwrap(), q);
        assert_eq!(l.implies(p, AtomSet::EMPTY).unwrap(), q);
    }

    #[test]
    fn strict_order_and_comparability() {
        let p = AtomSet::singleton(0);
        let pq = AtomSet::from_bits(0b11);
        let q = AtomSet::singleton(1);
        assert!(p.lt(pq));
        assert!(!p.lt(p));
        assert!(!p.comparable(q));
        assert!(p.comparable(pq));
    }

    #[test]
    fn identifiers() {
        assert!(is_identifier("ba0"));
        assert!(is_identifier("0c"));
        assert!(!is_identifier("a b"));
        assert!(!is_identifier("{x}"));
        assert!(!is_identifier("-x"));
        assert!(!is_identifier(""));
    }
}
