//! The uncertainty-degree scale `L = L2 × L1` and the label grammar.
//!
//! The scale is generated by five atoms: the three bottom-level degrees
//! `ba0` ("b and 0"), `b`, `bn0` ("neither b nor 0") and the two branch atoms
//! `0c`, `0d`. Level elements contain `b` plus branch atoms, so that
//! `c ∧ d = b` and `c ∨ d = h`. `Xora` is `X` joined with its level's
//! "and-0" element, `Xorn` with its "neither" element.
//!
//! Labels are either dictionary names or explicit atom sets:
//!
//! ```text
//! label := NAME | "{" atom ("," atom)* "}" | "{}"
//! ```

use crate::error::LatticeError;
use crate::lattice::{AtomLattice, AtomSet};

pub const STANDARD_ATOMS: [&str; 5] = ["ba0", "b", "bn0", "0c", "0d"];

/// Label decomposition of the standard scale, in presentation order.
pub const STANDARD_NAMES: [(&str, &[&str]); 21] = [
    ("b", &["b"]),
    ("ba0", &["ba0"]),
    ("bn0", &["bn0"]),
    ("bora", &["b", "ba0"]),
    ("born", &["b", "bn0"]),
    ("Tb", &["ba0", "b", "bn0"]),
    ("0c", &["0c"]),
    ("0d", &["0d"]),
    ("0h", &["0c", "0d"]),
    ("c", &["b", "0c"]),
    ("d", &["b", "0d"]),
    ("h", &["b", "0c", "0d"]),
    ("ca0c", &["ba0", "0c"]),
    ("cn0c", &["bn0", "0c"]),
    ("da0d", &["ba0", "0d"]),
    ("dn0d", &["bn0", "0d"]),
    ("ha0h", &["ba0", "0c", "0d"]),
    ("hn0h", &["bn0", "0c", "0d"]),
    ("caorn", &["ba0", "bn0", "0c"]),
    ("hora", &["b", "ba0", "0c", "0d"]),
    ("horn", &["b", "bn0", "0c", "0d"]),
];

/// The five-atom scale with its full label dictionary (plus `0` and `Th`).
pub fn standard_scale() -> AtomLattice {
    let mut lattice = AtomLattice::new(&STANDARD_ATOMS).expect("static roster");
    for (name, atoms) in STANDARD_NAMES {
        let value = atoms_to_set(&lattice, atoms.iter().copied()).expect("static atoms");
        lattice.add_name(name, value).expect("static dictionary");
    }
    lattice
}

fn atoms_to_set<'a>(
    lattice: &AtomLattice,
    atoms: impl IntoIterator<Item = &'a str>,
) -> Result<AtomSet, LatticeError> {
    let mut set = AtomSet::EMPTY;
    for a in atoms {
        let idx = lattice
            .atom_index(a)
            .ok_or_else(|| LatticeError::UnknownAtom(a.to_string()))?;
        set = set.join(AtomSet::singleton(idx));
    }
    Ok(set)
}

/// Resolves a label: a dictionary name, or an explicit `{atom,...}` set.
pub fn parse_element(lattice: &AtomLattice, text: &str) -> Result<AtomSet, LatticeError> {
    let t = text.trim();
    if let Some(inner) = t.strip_prefix('{') {
        let inner = inner
            .strip_suffix('}')
            .ok_or_else(|| LatticeError::MalformedLabel(t.to_string()))?;
        if inner.trim().is_empty() {
            return Ok(AtomSet::EMPTY);
        }
        let mut atoms = Vec::new();
        for part in inner.split(',') {
            let atom = part.trim();
            if atom.is_empty() || atom.contains(char::is_whitespace) {
                return Err(LatticeError::MalformedLabel(t.to_string()));
            }
            atoms.push(atom);
        }
        return atoms_to_set(lattice, atoms);
    }
    if t.is_empty() || t.contains(|c: char| c.is_whitespace() || matches!(c, '{' | '}' | ',')) {
        return Err(LatticeError::MalformedLabel(t.to_string()));
    }
    lattice
        .named(t)
        .ok_or_else(|| LatticeError::UnknownLabel(t.to_string()))
}

/// The dictionary label of `a`, or its brace-delimited atom list.
pub fn format_element(lattice: &AtomLattice, a: AtomSet) -> String {
    match lattice.label_of(a) {
        Some(name) => name.to_string(),
        None => format_atoms(lattice, a),
    }
}

/// Always the explicit `{atom,...}` form, atoms in roster order.
pub fn format_atoms(lattice: &AtomLattice, a: AtomSet) -> String {
    let atoms: Vec<&str> = a
        .indices()
        .map(|i| {
            lattice
                .atoms()
                .get(i)
                .map(String::as_str)
                .unwrap_or("?")
        })
        .collect();
    format!("{{{}}}", atoms.join(","))
}
