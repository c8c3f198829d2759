//! Explicit finite lattices given by order and monoid tables.
//!
//! This is the slow, assumption-free side of the algebra: it knows nothing about
//! atoms or bit patterns and decides every property by exhaustive search. It is
//! used to vet user lattices and as the independent oracle for [`AtomSet`]
//! implication.
//!
//! [`AtomSet`]: crate::lattice::AtomSet

use std::collections::{BTreeMap, HashSet};

use crate::error::TableError;
use crate::lattice::{AtomLattice, AtomSet};
use crate::scale::format_element;

/// Default number of counterexamples kept per law.
pub const DEFAULT_WITNESS_CAP: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteLatticeTable {
    pub elements: Vec<String>,
    /// `leq[a][b]` iff `a ≤ b`.
    pub leq: Vec<Vec<bool>>,
    /// `monoid[a][b]` is the index of `a·b`.
    pub monoid: Vec<Vec<usize>>,
    pub unit: usize,
}

impl FiniteLatticeTable {
    /// The powerset of the roster ordered by inclusion, with meet as the monoid.
    /// Elements are indexed by bit pattern and labelled as by `format_element`.
    pub fn from_atom_lattice(lattice: &AtomLattice) -> Self {
        let elements: Vec<AtomSet> = lattice.elements().collect();
        let leq = elements
            .iter()
            .map(|a| {
                elements
                    .iter()
                    .map(|b| a.bits() & !b.bits() == 0)
                    .collect()
            })
            .collect();
        let monoid = elements
            .iter()
            .map(|a| {
                elements
                    .iter()
                    .map(|b| (a.bits() & b.bits()) as usize)
                    .collect()
            })
            .collect();
        FiniteLatticeTable {
            elements: elements
                .iter()
                .map(|&e| format_element(lattice, e))
                .collect(),
            leq,
            monoid,
            unit: elements.len() - 1,
        }
    }

    /// A lattice given by its order, using meet as the monoid and top as unit.
    /// Fails if some pair has no meet or there is no top.
    pub fn with_meet_monoid(
        elements: Vec<String>,
        leq: Vec<Vec<bool>>,
    ) -> Result<Self, TableError> {
        let n = elements.len();
        check_square(&leq, n, "leq")?;
        let mut monoid = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                monoid[a][b] = greatest(&leq, (0..n).filter(|&x| leq[x][a] && leq[x][b]))
                    .ok_or_else(|| {
                        TableError::Format(format!(
                            "{} and {} have no meet",
                            elements[a], elements[b]
                        ))
                    })?;
            }
        }
        let unit = greatest(&leq, 0..n)
            .ok_or_else(|| TableError::Format("no top element".to_string()))?;
        Ok(FiniteLatticeTable {
            elements,
            leq,
            monoid,
            unit,
        })
    }

    /// The chain `0 < 1 < ... < n-1` with meet (= min) as monoid.
    pub fn chain(n: usize) -> Self {
        let elements = (0..n).map(|i| i.to_string()).collect();
        let leq = (0..n).map(|a| (0..n).map(|b| a <= b).collect()).collect();
        Self::with_meet_monoid(elements, leq).expect("a chain is a lattice")
    }

    /// The diamond M3: `0 < a, b, c < 1`, pairwise incomparable middle.
    pub fn diamond_m3() -> Self {
        Self::from_covers(&["0", "a", "b", "c", "1"], &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)])
    }

    /// The pentagon N5: `0 < a < b < 1`, `0 < c < 1`.
    pub fn pentagon_n5() -> Self {
        Self::from_covers(&["0", "a", "b", "c", "1"], &[(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)])
    }

    /// Builds a meet-monoid table from cover pairs `(lower, upper)`.
    pub fn from_covers(names: &[&str], covers: &[(usize, usize)]) -> Self {
        let n = names.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(lo, hi) in covers {
            leq[lo][hi] = true;
        }
        // transitive closure
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if leq[i][k] && leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
        Self::with_meet_monoid(names.iter().map(|s| s.to_string()).collect(), leq)
            .expect("cover diagram of a lattice")
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, TableError> {
        self.elements
            .iter()
            .position(|e| e == name)
            .ok_or_else(|| TableError::UnknownElement(name.to_string()))
    }

    fn check_shape(&self) -> Result<(), TableError> {
        let n = self.elements.len();
        if n == 0 {
            return Err(TableError::Format("no elements".to_string()));
        }
        let mut seen = HashSet::new();
        for e in &self.elements {
            if !seen.insert(e) {
                return Err(TableError::Format(format!("duplicate element `{e}`")));
            }
        }
        check_square(&self.leq, n, "leq")?;
        check_square(&self.monoid, n, "monoid")?;
        if let Some(bad) = self.monoid.iter().flatten().find(|&&v| v >= n) {
            return Err(TableError::Format(format!(
                "monoid entry {bad} out of range for {n} elements"
            )));
        }
        if self.unit >= n {
            return Err(TableError::Format(format!("unit index {} out of range", self.unit)));
        }
        Ok(())
    }
}

fn check_square<T>(rows: &[Vec<T>], n: usize, what: &str) -> Result<(), TableError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(TableError::Format(format!("{what} table is not {n}×{n}")));
    }
    Ok(())
}

/// The greatest element of `candidates` under `leq`, if one exists.
fn greatest(leq: &[Vec<bool>], candidates: impl Iterator<Item = usize>) -> Option<usize> {
    let set: Vec<usize> = candidates.collect();
    set.iter()
        .copied()
        .find(|&y| set.iter().all(|&s| leq[s][y]))
}

fn least(leq: &[Vec<bool>], candidates: impl Iterator<Item = usize>) -> Option<usize> {
    let set: Vec<usize> = candidates.collect();
    set.iter()
        .copied()
        .find(|&y| set.iter().all(|&s| leq[y][s]))
}

/// The maximum of `{y | a·y ≤ b}`, found by scanning every element.
pub fn brute_force_residual(
    table: &FiniteLatticeTable,
    a: usize,
    b: usize,
) -> Result<usize, TableError> {
    let n = table.len();
    greatest(&table.leq, (0..n).filter(|&y| table.leq[table.monoid[a][y]][b])).ok_or_else(|| {
        TableError::NoResidual {
            a: table.elements[a].clone(),
            b: table.elements[b].clone(),
        }
    })
}

/// The maximum of `{x | x·a ≤ b}`.
pub fn brute_force_left_residual(
    table: &FiniteLatticeTable,
    a: usize,
    b: usize,
) -> Result<usize, TableError> {
    let n = table.len();
    greatest(&table.leq, (0..n).filter(|&x| table.leq[table.monoid[x][a]][b])).ok_or_else(|| {
        TableError::NoResidual {
            a: table.elements[a].clone(),
            b: table.elements[b].clone(),
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub law: &'static str,
    pub elements: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidityReport {
    pub is_lattice: bool,
    pub is_distributive: bool,
    pub is_atomic: bool,
    pub is_residuated: bool,
    pub is_integrally_closed: bool,
    pub is_integral: bool,
    pub counterexamples: Vec<Witness>,
}

impl ValidityReport {
    /// All hypotheses of the convergence theorem hold.
    pub fn all_ok(&self) -> bool {
        self.is_lattice
            && self.is_distributive
            && self.is_atomic
            && self.is_residuated
            && self.is_integrally_closed
            && self.is_integral
    }

    pub fn witnesses(&self, law: &str) -> impl Iterator<Item = &Witness> {
        let law = law.to_string();
        self.counterexamples.iter().filter(move |w| w.law == law)
    }
}

struct Collector<'t> {
    table: &'t FiniteLatticeTable,
    cap: usize,
    counts: BTreeMap<&'static str, usize>,
    out: Vec<Witness>,
}

impl<'t> Collector<'t> {
    fn add(&mut self, law: &'static str, idx: &[usize]) {
        let count = self.counts.entry(law).or_insert(0);
        *count += 1;
        if *count <= self.cap {
            self.out.push(Witness {
                law,
                elements: idx.iter().map(|&i| self.table.elements[i].clone()).collect(),
            });
        }
    }

    fn failed(&self, law: &str) -> bool {
        self.counts.get(law).copied().unwrap_or(0) > 0
    }

    fn failed_any(&self, laws: &[&str]) -> bool {
        laws.iter().any(|l| self.failed(l))
    }

    /// A flag that cannot be checked because a prerequisite failed still needs a witness.
    fn blocked(&mut self, law: &'static str, because: &str) {
        let elements = self
            .out
            .iter()
            .find(|w| w.law == because)
            .map(|w| w.elements.clone())
            .unwrap_or_default();
        *self.counts.entry(law).or_insert(0) += 1;
        self.out.push(Witness { law, elements });
    }
}

const ORDER_LAWS: [&str; 3] = ["reflexivity", "antisymmetry", "transitivity"];
const LATTICE_LAWS: [&str; 5] = ["reflexivity", "antisymmetry", "transitivity", "join", "meet"];

pub fn validate(table: &FiniteLatticeTable) -> Result<ValidityReport, TableError> {
    validate_with_cap(table, DEFAULT_WITNESS_CAP)
}

/// Checks every lattice axiom the convergence theorem relies on, by exhaustion.
/// At most `cap` counterexamples are kept per law (at least one is always kept).
pub fn validate_with_cap(
    table: &FiniteLatticeTable,
    cap: usize,
) -> Result<ValidityReport, TableError> {
    table.check_shape()?;
    let n = table.len();
    let leq = &table.leq;
    let mul = &table.monoid;
    let mut c = Collector {
        table,
        cap: cap.max(1),
        counts: BTreeMap::new(),
        out: Vec::new(),
    };

    // partial order
    for a in 0..n {
        if !leq[a][a] {
            c.add("reflexivity", &[a]);
        }
        for b in 0..n {
            if a != b && leq[a][b] && leq[b][a] {
                c.add("antisymmetry", &[a, b]);
            }
            for z in 0..n {
                if leq[a][b] && leq[b][z] && !leq[a][z] {
                    c.add("transitivity", &[a, b, z]);
                }
            }
        }
    }
    let is_order = !c.failed_any(&ORDER_LAWS);

    // lattice: every pair has a least upper and a greatest lower bound
    let mut join = vec![vec![0usize; n]; n];
    let mut meet = vec![vec![0usize; n]; n];
    if is_order {
        for a in 0..n {
            for b in 0..n {
                match least(leq, (0..n).filter(|&u| leq[a][u] && leq[b][u])) {
                    Some(j) => join[a][b] = j,
                    None => c.add("join", &[a, b]),
                }
                match greatest(leq, (0..n).filter(|&l| leq[l][a] && leq[l][b])) {
                    Some(m) => meet[a][b] = m,
                    None => c.add("meet", &[a, b]),
                }
            }
        }
    }
    let is_lattice = is_order && !c.failed_any(&LATTICE_LAWS);
    let first_lattice_failure = LATTICE_LAWS
        .iter()
        .copied()
        .find(|l| c.failed(l))
        .unwrap_or("join");

    // distributivity, both directions
    if is_lattice {
        for a in 0..n {
            for b in 0..n {
                for z in 0..n {
                    if meet[a][join[b][z]] != join[meet[a][b]][meet[a][z]]
                        || join[a][meet[b][z]] != meet[join[a][b]][join[a][z]]
                    {
                        c.add("distributivity", &[a, b, z]);
                    }
                }
            }
        }
    } else {
        c.blocked("distributivity", first_lattice_failure);
    }
    let is_distributive = is_lattice && !c.failed("distributivity");

    // atomicity: generators (join-irreducibles) pairwise meet at bottom
    if is_lattice {
        let bottom = least(leq, 0..n).expect("finite lattice has a bottom");
        let irreducible: Vec<usize> = (0..n)
            .filter(|&x| x != bottom)
            .filter(|&x| {
                (0..n).all(|a| (0..n).all(|b| join[a][b] != x || a == x || b == x))
            })
            .collect();
        for (i, &g) in irreducible.iter().enumerate() {
            for &h in &irreducible[i + 1..] {
                if meet[g][h] != bottom {
                    c.add("atomicity", &[g, h]);
                }
            }
        }
    } else {
        c.blocked("atomicity", first_lattice_failure);
    }
    let is_atomic = is_lattice && !c.failed("atomicity");

    // monoid
    let u = table.unit;
    for a in 0..n {
        if mul[u][a] != a || mul[a][u] != a {
            c.add("monoid-unit", &[a]);
        }
        for b in 0..n {
            for z in 0..n {
                if mul[mul[a][b]][z] != mul[a][mul[b][z]] {
                    c.add("monoid-associativity", &[a, b, z]);
                }
            }
        }
    }
    let is_monoid = !c.failed_any(&["monoid-unit", "monoid-associativity"]);

    // residuation: greatest solutions exist and satisfy the adjunction
    let mut right = vec![vec![None; n]; n];
    let mut left = vec![vec![None; n]; n];
    if is_lattice {
        for a in 0..n {
            for b in 0..n {
                right[a][b] = brute_force_residual(table, a, b).ok();
                left[a][b] = brute_force_left_residual(table, a, b).ok();
                match right[a][b] {
                    None => c.add("right-residual", &[a, b]),
                    Some(r) => {
                        for y in 0..n {
                            if leq[mul[a][y]][b] != leq[y][r] {
                                c.add("adjunction", &[a, y, b]);
                            }
                        }
                    }
                }
                match left[a][b] {
                    None => c.add("left-residual", &[a, b]),
                    Some(l) => {
                        for x in 0..n {
                            if leq[mul[x][a]][b] != leq[x][l] {
                                c.add("adjunction", &[x, a, b]);
                            }
                        }
                    }
                }
            }
        }
    } else {
        c.blocked("adjunction", first_lattice_failure);
    }
    if !is_monoid {
        let law = if c.failed("monoid-unit") {
            "monoid-unit"
        } else {
            "monoid-associativity"
        };
        c.blocked("residuation", law);
    }
    let is_residuated = is_lattice
        && is_monoid
        && !c.failed_any(&["right-residual", "left-residual", "adjunction"]);

    // integral closure: x → x = 1 = x ← x
    if is_residuated {
        for a in 0..n {
            if right[a][a] != Some(u) || left[a][a] != Some(u) {
                c.add("integral-closure", &[a]);
            }
        }
    } else {
        let because = ["right-residual", "left-residual", "adjunction", "residuation"]
            .into_iter()
            .find(|l| c.failed(l))
            .unwrap_or("residuation");
        c.blocked("integral-closure", because);
    }
    let is_integrally_closed = is_residuated && !c.failed("integral-closure");

    // integrality: everything below the unit
    for a in 0..n {
        if !leq[a][u] {
            c.add("integrality", &[a]);
        }
    }
    let is_integral = is_order && !c.failed("integrality");
    if !is_order && !c.failed("integrality") {
        c.blocked("integrality", first_lattice_failure);
    }

    Ok(ValidityReport {
        is_lattice,
        is_distributive,
        is_atomic,
        is_residuated,
        is_integrally_closed,
        is_integral,
        counterexamples: c.out,
    })
}

/// Largest roster the exhaustive checks accept (128 elements).
pub const EXHAUSTIVE_ATOM_LIMIT: usize = 7;

/// Outcome of comparing the closed-form implication with the brute-force
/// residual on every pair, and the adjunction on every triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport {
    pub pairs: usize,
    pub triples: usize,
    pub residual_mismatches: usize,
    pub adjunction_failures: usize,
    /// At most `DEFAULT_WITNESS_CAP` labelled counterexamples per kind.
    pub witnesses: Vec<Witness>,
}

impl OracleReport {
    pub fn ok(&self) -> bool {
        self.residual_mismatches == 0 && self.adjunction_failures == 0
    }
}

/// Cross-checks `a ⇒ b` against `brute_force_residual` for all pairs and
/// `a ∧ c ≤ b ⟺ c ≤ a ⇒ b` for all triples.
pub fn cross_check_implication(lattice: &AtomLattice) -> Result<OracleReport, TableError> {
    if lattice.atom_count() > EXHAUSTIVE_ATOM_LIMIT {
        return Err(TableError::Format(format!(
            "{} atoms exceed the exhaustive-check limit of {EXHAUSTIVE_ATOM_LIMIT}",
            lattice.atom_count()
        )));
    }
    let table = FiniteLatticeTable::from_atom_lattice(lattice);
    let top = lattice.top();
    let elems: Vec<AtomSet> = lattice.elements().collect();
    let label = |a: AtomSet| format_element(lattice, a);
    let mut report = OracleReport {
        pairs: 0,
        triples: 0,
        residual_mismatches: 0,
        adjunction_failures: 0,
        witnesses: Vec::new(),
    };
    let mut residual_kept = 0;
    let mut adjunction_kept = 0;
    for &a in &elems {
        for &b in &elems {
            report.pairs += 1;
            let imp = a.implies_in(b, top);
            let oracle = brute_force_residual(&table, a.bits() as usize, b.bits() as usize)?;
            if imp.bits() as usize != oracle {
                report.residual_mismatches += 1;
                if residual_kept < DEFAULT_WITNESS_CAP {
                    residual_kept += 1;
                    report.witnesses.push(Witness {
                        law: "implication",
                        elements: vec![label(a), label(b)],
                    });
                }
            }
            for &c in &elems {
                report.triples += 1;
                if a.meet(c).leq(b) != c.leq(imp) {
                    report.adjunction_failures += 1;
                    if adjunction_kept < DEFAULT_WITNESS_CAP {
                        adjunction_kept += 1;
                        report.witnesses.push(Witness {
                            law: "adjunction",
                            elements: vec![label(a), label(b), label(c)],
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scale::standard_scale;

    fn assert_witnessed(r: &ValidityReport) {
        let flags = [
            (r.is_lattice, &["reflexivity", "antisymmetry", "transitivity", "join", "meet"][..]),
            (r.is_distributive, &["distributivity"][..]),
            (r.is_atomic, &["atomicity"][..]),
            (
                r.is_residuated,
                &["right-residual", "left-residual", "adjunction", "residuation"][..],
            ),
            (r.is_integrally_closed, &["integral-closure"][..]),
            (r.is_integral, &["integrality"][..]),
        ];
        for (ok, laws) in flags {
            if !ok {
                assert!(
                    laws.iter().any(|l| r.witnesses(l).next().is_some()),
                    "false flag without witness among {laws:?}: {r:?}"
                );
            }
        }
    }

    #[test]
    fn implication_matches_oracle() {
        let r = cross_check_implication(&standard_scale()).unwrap();
        assert!(r.ok());
        assert_eq!((r.pairs, r.triples), (32 * 32, 32 * 32 * 32));
        let big: Vec<String> = (0..8).map(|i| format!("a{i}")).collect();
        assert!(cross_check_implication(&AtomLattice::new(&big).unwrap()).is_err());
    }

    #[test]
    fn standard_scale_passes_everything() {
        let t = FiniteLatticeTable::from_atom_lattice(&standard_scale());
        assert_eq!(t.len(), 32);
        let r = validate(&t).unwrap();
        assert!(r.all_ok(), "{:?}", r.counterexamples);
        assert!(r.counterexamples.is_empty());
    }

    #[test]
    fn two_chain_passes_everything() {
        let r = validate(&FiniteLatticeTable::chain(2)).unwrap();
        assert!(r.all_ok());
    }

    #[test]
    fn three_chain_is_not_atomic() {
        let r = validate(&FiniteLatticeTable::chain(3)).unwrap();
        assert!(r.is_distributive && r.is_residuated);
        assert!(!r.is_atomic);
        let w = r.witnesses("atomicity").next().unwrap();
        assert_eq!(w.elements, vec!["1", "2"]);
    }

    #[test]
    fn diamond_is_not_distributive() {
        let r = validate(&FiniteLatticeTable::diamond_m3()).unwrap();
        assert!(r.is_lattice);
        assert!(!r.is_distributive);
        let w = r.witnesses("distributivity").next().unwrap();
        assert_eq!(w.elements.len(), 3);
        // a ∧ (b ∨ c) = a but (a ∧ b) ∨ (a ∧ c) = 0 for distinct atoms
        assert!(w.elements.iter().all(|e| e != "0" && e != "1"));
        // meet does not distribute, so implication is not a residual either
        assert!(!r.is_residuated);
        assert_witnessed(&r);
    }

    #[test]
    fn pentagon_is_not_distributive() {
        let r = validate(&FiniteLatticeTable::pentagon_n5()).unwrap();
        assert!(r.is_lattice && !r.is_distributive);
        assert_witnessed(&r);
    }

    #[test]
    fn witness_cap_is_respected() {
        let r = validate_with_cap(&FiniteLatticeTable::diamond_m3(), 2).unwrap();
        assert!(r.witnesses("distributivity").count() <= 2);
        let r = validate_with_cap(&FiniteLatticeTable::diamond_m3(), 1000).unwrap();
        assert!(r.witnesses("distributivity").count() > 2);
    }

    #[test]
    fn non_lattice_order() {
        // two incomparable maximal elements, no top
        let elements = vec!["0".to_string(), "a".to_string(), "b".to_string()];
        let leq = vec![
            vec![true, true, true],
            vec![false, true, false],
            vec![false, false, true],
        ];
        let monoid = vec![vec![0, 0, 0], vec![0, 1, 0], vec![0, 0, 2]];
        let t = FiniteLatticeTable {
            elements,
            leq,
            monoid,
            unit: 1,
        };
        let r = validate(&t).unwrap();
        assert!(!r.is_lattice);
        assert_eq!(r.witnesses("join").next().unwrap().elements, vec!["a", "b"]);
        assert!(!r.is_distributive && !r.is_atomic && !r.is_residuated);
        assert!(!r.is_integral);
        assert_witnessed(&r);
    }

    #[test]
    fn broken_monoid_is_reported() {
        let mut t = FiniteLatticeTable::chain(2);
        t.unit = 0;
        let r = validate(&t).unwrap();
        assert!(!r.is_residuated);
        assert!(r.witnesses("monoid-unit").next().is_some());
        assert!(!r.is_integral);
        assert_witnessed(&r);
    }

    #[test]
    fn not_a_partial_order() {
        let mut t = FiniteLatticeTable::chain(2);
        t.leq[1][0] = true;
        let r = validate(&t).unwrap();
        assert!(!r.is_lattice);
        assert!(r.witnesses("antisymmetry").next().is_some());
        assert_witnessed(&r);
    }

    #[test]
    fn malformed_tables_are_format_errors() {
        let mut t = FiniteLatticeTable::chain(2);
        t.leq.pop();
        assert!(matches!(validate(&t), Err(TableError::Format(_))));
        let mut t = FiniteLatticeTable::chain(2);
        t.monoid[0][0] = 7;
        assert!(matches!(validate(&t), Err(TableError::Format(_))));
        let mut t = FiniteLatticeTable::chain(2);
        t.elements[1] = "0".into();
        assert!(matches!(validate(&t), Err(TableError::Format(_))));
    }

    #[test]
    fn chain_residuals() {
        let t = FiniteLatticeTable::chain(4);
        let top = 3;
        for b in 0..4 {
            assert_eq!(brute_force_residual(&t, 0, b).unwrap(), top);
        }
        // Gödel implication on a chain: a → b = 1 if a ≤ b else b
        assert_eq!(brute_force_residual(&t, 2, 1).unwrap(), 1);
        assert_eq!(brute_force_residual(&t, 1, 2).unwrap(), top);
    }

    #[test]
    fn missing_residual_is_an_error() {
        // join as the "monoid" on a 2-chain: 1·y ≤ 0 has no solution
        let mut t = FiniteLatticeTable::chain(2);
        t.monoid = vec![vec![0, 1], vec![1, 1]];
        assert!(matches!(
            brute_force_residual(&t, 1, 0),
            Err(TableError::NoResidual { .. })
        ));
    }
}
