//! Text renderings of iteration traces.
//!
//! `table` is for people: one row per state, one column per concept.
//! `lines` is for diffs and regression files, one record per value:
//!
//! ```text
//! k<TAB>concept<TAB>label<TAB>{atoms}
//! ```
//!
//! Both end with a summary line; in `lines` it is a `#` comment.

use crate::engine::IterationTrace;
use crate::lattice::AtomSet;
use crate::model::{MapModel, WeightMatrix};
use crate::scale::{format_atoms, format_element, parse_element};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TraceFormat {
    #[default]
    Table,
    Lines,
}

pub fn summary(trace: &IterationTrace) -> String {
    if trace.converged {
        format!("converged in {} iterations", trace.steps)
    } else {
        format!("no fixed point after {} iterations", trace.steps)
    }
}

fn table_rows(model: &MapModel, header: &str, rows: &[Vec<AtomSet>]) -> String {
    let mut cells: Vec<Vec<String>> = Vec::with_capacity(rows.len() + 1);
    let mut head = vec![header.to_string()];
    head.extend(model.concepts.iter().cloned());
    cells.push(head);
    for (k, row) in rows.iter().enumerate() {
        let mut r = vec![k.to_string()];
        r.extend(row.iter().map(|v| format_element(&model.scale, *v)));
        cells.push(r);
    }
    let cols = cells[0].len();
    let widths: Vec<usize> = (0..cols)
        .map(|c| cells.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in &cells {
        let line: Vec<String> = r
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:<w$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn weight_label(model: &MapModel, weights: &WeightMatrix, s: usize, d: usize) -> String {
    match weights.get(s, d) {
        Some(w) if w.is_negative() => format!("-{}", format_element(&model.scale, w.value)),
        Some(w) => format_element(&model.scale, w.value),
        None => "0".to_string(),
    }
}

/// The weight matrix with sources as rows. Entries that differ from `base`
/// are starred.
pub fn weights_table(model: &MapModel, weights: &WeightMatrix, base: Option<&WeightMatrix>) -> String {
    let n = model.len();
    let mut cells = vec![std::iter::once(String::new()).chain(model.concepts.iter().cloned()).collect::<Vec<_>>()];
    for s in 0..n {
        let mut row = vec![model.concepts[s].clone()];
        for d in 0..n {
            let mut cell = weight_label(model, weights, s, d);
            if base.is_some_and(|b| b.get(s, d) != weights.get(s, d)) {
                cell.push('*');
            }
            row.push(cell);
        }
        cells.push(row);
    }
    let widths: Vec<usize> = (0..=n)
        .map(|c| cells.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in &cells {
        let line: Vec<String> = r.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// One `src -> dst: old => new` line per entry that differs.
pub fn weight_changes(model: &MapModel, before: &WeightMatrix, after: &WeightMatrix) -> Vec<String> {
    let n = model.len();
    let mut out = Vec::new();
    for s in 0..n {
        for d in 0..n {
            if before.get(s, d) != after.get(s, d) {
                out.push(format!(
                    "{} -> {}: {} => {}",
                    model.concepts[s],
                    model.concepts[d],
                    weight_label(model, before, s, d),
                    weight_label(model, after, s, d)
                ));
            }
        }
    }
    out
}

pub fn to_table(model: &MapModel, trace: &IterationTrace) -> String {
    let mut out = table_rows(model, "k", &trace.states);
    if let Some(r) = &trace.r_diag {
        out.push('\n');
        out.push_str(&table_rows(model, "r", r));
    }
    out.push_str(&summary(trace));
    out.push('\n');
    out
}

fn push_records(out: &mut String, model: &MapModel, prefix: &str, rows: &[Vec<AtomSet>]) {
    for (k, row) in rows.iter().enumerate() {
        for (c, v) in model.concepts.iter().zip(row) {
            out.push_str(&format!(
                "{prefix}{k}\t{c}\t{}\t{}\n",
                format_element(&model.scale, *v),
                format_atoms(&model.scale, *v)
            ));
        }
    }
}

/// `r` diagnostics, when recorded, appear as records whose step carries an
/// `r` prefix.
pub fn to_lines(model: &MapModel, trace: &IterationTrace) -> String {
    let mut out = String::new();
    push_records(&mut out, model, "", &trace.states);
    if let Some(r) = &trace.r_diag {
        push_records(&mut out, model, "r", r);
    }
    out.push_str(&format!("# {}\n", summary(trace)));
    out
}

pub fn serialize_trace(model: &MapModel, trace: &IterationTrace, format: TraceFormat) -> String {
    match format {
        TraceFormat::Table => to_table(model, trace),
        TraceFormat::Lines => to_lines(model, trace),
    }
}

/// States recovered from `lines` output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedTrace {
    pub states: Vec<Vec<AtomSet>>,
    pub r_diag: Option<Vec<Vec<AtomSet>>>,
    pub converged: bool,
    pub steps: usize,
}

fn place(rows: &mut Vec<Vec<AtomSet>>, k: usize, c: usize, n: usize, v: AtomSet, line: usize) -> Result<(), String> {
    if k > rows.len() {
        return Err(format!("line {line}: step {k} out of order"));
    }
    if k == rows.len() {
        rows.push(Vec::with_capacity(n));
    }
    let row = &mut rows[k];
    if row.len() != c {
        return Err(format!("line {line}: concept out of order"));
    }
    row.push(v);
    Ok(())
}

/// Reads `lines` output back. The label and atom columns must agree.
pub fn read_lines(model: &MapModel, text: &str) -> Result<ParsedTrace, String> {
    let n = model.len();
    let mut states: Vec<Vec<AtomSet>> = Vec::new();
    let mut r: Vec<Vec<AtomSet>> = Vec::new();
    let mut summary_line = None;
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        if let Some(comment) = line.strip_prefix('#') {
            let c = comment.trim();
            if c.starts_with("converged in ") || c.starts_with("no fixed point after ") {
                summary_line = Some(c.to_string());
            }
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [k, c, label, atoms] = fields.as_slice() else {
            return Err(format!("line {ln}: expected 4 tab-separated fields"));
        };
        let (rows, k) = match k.strip_prefix('r') {
            Some(k) => (&mut r, k),
            None => (&mut states, *k),
        };
        let k: usize = k.parse().map_err(|_| format!("line {ln}: bad step `{k}`"))?;
        let ci = model
            .concept_index(c)
            .ok_or_else(|| format!("line {ln}: unknown concept `{c}`"))?;
        let v = parse_element(&model.scale, label).map_err(|e| format!("line {ln}: {e}"))?;
        let w = parse_element(&model.scale, atoms).map_err(|e| format!("line {ln}: {e}"))?;
        if v != w {
            return Err(format!("line {ln}: label and atoms disagree"));
        }
        place(rows, k, ci, n, v, ln)?;
    }
    if states.iter().chain(&r).any(|row| row.len() != n) {
        return Err("incomplete state row".into());
    }
    let summary_line = summary_line.ok_or("missing summary line")?;
    let (converged, count) = if let Some(s) = summary_line.strip_prefix("converged in ") {
        (true, s)
    } else if let Some(s) = summary_line.strip_prefix("no fixed point after ") {
        (false, s)
    } else {
        return Err(format!("bad summary `{summary_line}`"));
    };
    let steps = count
        .strip_suffix(" iterations")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| format!("bad summary `{summary_line}`"))?;
    Ok(ParsedTrace {
        states,
        r_diag: (!r.is_empty()).then_some(r),
        converged,
        steps,
    })
}
