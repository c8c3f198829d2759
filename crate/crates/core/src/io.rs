//! Line-oriented model files.
//!
//! ```text
//! lattice atoms <id> <id> ...          # optional, default is the standard scale
//! element <name> = <atom> <atom> ...
//! concept <id> [clamped]
//! weight <src> -> <dst> : [-]<label>
//! init <case>: <id>=<label> ...
//! edit <case> @<step>: <id>=<label> ...
//! doc <id> : <label> <label> ...
//! ```
//!
//! `#` starts a comment. Brace labels such as `{b, 0c}` count as one token.
//! An `edit` overwrites concept values right after update `step`, modelling
//! an outside change in the middle of a run.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::ModelError;
use crate::lattice::{is_identifier, AtomLattice, AtomSet, BOTTOM_LABEL, TOP_LABEL};
use crate::model::{MapModel, Scenario, SignedWeight};
use crate::scale::{format_element, parse_element, standard_scale};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    /// 1-based; 0 refers to the file as a whole.
    pub line: usize,
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{}: {sev}: {}", self.line, self.message)
    }
}

#[derive(Clone, Debug)]
pub struct ModelDocument {
    pub lines: Vec<String>,
    /// The declared scale, unless a `lattice` or `element` line failed.
    pub scale: Option<AtomLattice>,
    /// Present iff no diagnostic is an error.
    pub model: Option<MapModel>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ModelDocument {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.severity == Severity::Error)
    }
}

/// Splits on whitespace, keeping `{...}` groups (and whatever they are glued
/// to) inside a single token.
fn tokenize(s: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0usize;
    for c in s.chars() {
        match c {
            '{' => {
                if depth > 0 {
                    return Err("nested `{`".into());
                }
                depth = 1;
                cur.push(c);
            }
            '}' => {
                if depth == 0 {
                    return Err("unmatched `}`".into());
                }
                depth = 0;
                cur.push(c);
            }
            c if c.is_whitespace() && depth == 0 => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if depth > 0 {
        return Err("unclosed `{`".into());
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    Ok(out)
}

fn split_colon(s: &str) -> Result<(&str, &str), String> {
    s.split_once(':').ok_or_else(|| "expected `:`".to_string())
}

struct Parser {
    scale: Option<AtomLattice>,
    model: Option<MapModel>,
    diagnostics: Vec<Diagnostic>,
    line: usize,
    scale_failed: bool,
}

type LineResult = Result<(), String>;

impl Parser {
    fn error(&mut self, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic {
            line: self.line,
            severity: Severity::Error,
            message: message.into(),
        });
    }

    fn warn(&mut self, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic {
            line: self.line,
            severity: Severity::Warning,
            message: message.into(),
        });
    }

    /// The model under construction; fixes the scale on first use.
    fn model(&mut self) -> &mut MapModel {
        if self.model.is_none() {
            let scale = self.scale.take().unwrap_or_else(standard_scale);
            self.model = Some(MapModel::new(scale));
        }
        self.model.as_mut().expect("just created")
    }

    fn scale(&mut self) -> &mut AtomLattice {
        if self.model.is_some() {
            return &mut self.model.as_mut().expect("checked").scale;
        }
        self.scale.get_or_insert_with(standard_scale)
    }

    fn label(&mut self, text: &str) -> Result<AtomSet, String> {
        parse_element(self.scale(), text).map_err(|e| e.to_string())
    }

    fn concept(&mut self, name: &str) -> Result<usize, String> {
        self.model().concept(name).map_err(|e| e.to_string())
    }

    fn directive(&mut self, text: &str) -> LineResult {
        let (kw, rest) = match text.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (text, ""),
        };
        match kw {
            "lattice" => self.lattice(rest),
            "element" => self.element(rest),
            "concept" => self.concept_decl(rest),
            "weight" => self.weight(rest),
            "init" => self.init(rest),
            "edit" => self.edit(rest),
            "doc" => self.doc(rest),
            other => Err(format!("unknown directive `{other}`")),
        }
    }

    fn lattice(&mut self, rest: &str) -> LineResult {
        if self.model.is_some() || self.scale.is_some() {
            return Err("`lattice` must come first and only once".into());
        }
        let toks = tokenize(rest)?;
        match toks.split_first() {
            Some((kw, atoms)) if kw == "atoms" => {
                let lattice = AtomLattice::new(atoms).map_err(|e| e.to_string())?;
                self.scale = Some(lattice);
                Ok(())
            }
            _ => Err("expected `lattice atoms <id> ...`".into()),
        }
    }

    fn element(&mut self, rest: &str) -> LineResult {
        if self.model.as_ref().is_some_and(|m| !m.is_empty()) {
            return Err("elements must be declared before concepts".into());
        }
        let (name, atoms) = rest
            .split_once('=')
            .ok_or("expected `element <name> = <atom> ...`")?;
        let name = name.trim();
        let scale = self.scale();
        let mut value = AtomSet::EMPTY;
        for a in tokenize(atoms)? {
            let i = scale.atom_index(&a).ok_or(format!("unknown atom `{a}`"))?;
            value = value.join(AtomSet::singleton(i));
        }
        scale.add_name(name, value).map_err(|e| e.to_string())
    }

    fn concept_decl(&mut self, rest: &str) -> LineResult {
        let toks = tokenize(rest)?;
        let (name, clamped) = match toks.as_slice() {
            [n] => (n, false),
            [n, c] if c == "clamped" => (n, true),
            _ => return Err("expected `concept <id> [clamped]`".into()),
        };
        if !is_identifier(name) {
            return Err(format!("invalid concept name `{name}`"));
        }
        self.model().add_concept(name, clamped).map(|_| ()).map_err(|e| e.to_string())
    }

    fn weight(&mut self, rest: &str) -> LineResult {
        let (head, body) = split_colon(rest)?;
        let (src, dst) = head
            .split_once("->")
            .ok_or("expected `weight <src> -> <dst> : <label>`")?;
        let src = self.concept(src.trim())?;
        let dst = self.concept(dst.trim())?;
        let body = body.trim();
        let (negative, label) = match body.strip_prefix('-') {
            Some(l) => (true, l.trim()),
            None => (false, body),
        };
        let value = self.label(label)?;
        let w = if negative {
            SignedWeight::negative(value)
        } else {
            SignedWeight::positive(value)
        };
        let model = self.model();
        model.add_weight(src, dst, w).map_err(|e| e.to_string())?;
        if model.is_clamped(dst) && src != dst {
            let msg = format!("weight into clamped concept `{}` has no effect", model.concepts[dst]);
            self.warn(msg);
        }
        Ok(())
    }

    fn assignments(&mut self, body: &str) -> Result<Vec<(usize, AtomSet)>, String> {
        let mut out: Vec<(usize, AtomSet)> = Vec::new();
        for tok in tokenize(body)? {
            let (id, label) = tok
                .split_once('=')
                .ok_or(format!("expected `<id>=<label>`, got `{tok}`"))?;
            let i = self.concept(id)?;
            if out.iter().any(|(j, _)| *j == i) {
                return Err(format!("concept `{id}` assigned twice"));
            }
            let v = self.label(label)?;
            out.push((i, v));
        }
        Ok(out)
    }

    fn init(&mut self, rest: &str) -> LineResult {
        let (case, body) = split_colon(rest)?;
        let case = case.trim();
        if !is_identifier(case) {
            return Err(format!("invalid case name `{case}`"));
        }
        let values = self.assignments(body)?;
        let model = self.model();
        let mut init = vec![None; model.len()];
        for (i, v) in values {
            init[i] = Some(v);
        }
        let mut full = Vec::with_capacity(init.len());
        for (i, v) in init.into_iter().enumerate() {
            match v {
                Some(v) => full.push(v),
                None => {
                    return Err(ModelError::MissingInit {
                        case: case.to_string(),
                        concept: model.concepts[i].clone(),
                    }
                    .to_string())
                }
            }
        }
        model.add_case(case, Scenario::new(full)).map_err(|e| e.to_string())
    }

    fn edit(&mut self, rest: &str) -> LineResult {
        let (head, body) = split_colon(rest)?;
        let toks = tokenize(head)?;
        let [case, at] = toks.as_slice() else {
            return Err("expected `edit <case> @<step>: <id>=<label> ...`".into());
        };
        let step: usize = at
            .strip_prefix('@')
            .and_then(|s| s.parse().ok())
            .ok_or(format!("invalid step `{at}`"))?;
        if step == 0 {
            return Err(ModelError::EditAtZero { case: case.clone() }.to_string());
        }
        let values = self.assignments(body)?;
        let model = self.model();
        let idx = model
            .cases
            .iter()
            .position(|(n, _)| n == case)
            .ok_or(format!("unknown case `{case}`"))?;
        let edits = model.cases[idx].1.edits.entry(step).or_default();
        for (i, v) in values {
            if edits.iter().any(|(j, _)| *j == i) {
                return Err(format!("concept `{}` edited twice at step {step}", model.concepts[i]));
            }
            edits.push((i, v));
        }
        Ok(())
    }

    fn doc(&mut self, rest: &str) -> LineResult {
        let (id, body) = split_colon(rest)?;
        let i = self.concept(id.trim())?;
        if self.model().docs.contains_key(&i) {
            return Err(format!("duplicate desired-output list for `{}`", id.trim()));
        }
        let mut values = Vec::new();
        let mut seen = BTreeSet::new();
        for tok in tokenize(body)? {
            let v = self.label(&tok)?;
            if seen.insert(v) {
                values.push(v);
            }
        }
        self.model().set_doc(i, values).map_err(|e| e.to_string())
    }
}

/// Parses a model file, collecting every problem with its line number.
pub fn parse_model(text: &str) -> ModelDocument {
    let lines: Vec<String> = text.lines().map(str::to_string).collect();
    let mut p = Parser {
        scale: None,
        model: None,
        diagnostics: Vec::new(),
        line: 0,
        scale_failed: false,
    };
    for (n, raw) in lines.iter().enumerate() {
        p.line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Err(msg) = p.directive(content) {
            if content.starts_with("lattice") || content.starts_with("element") {
                p.scale_failed = true;
            }
            p.error(msg);
        }
    }
    p.line = 0;
    let scale = if p.scale_failed {
        None
    } else {
        Some(p.scale().clone())
    };
    let model = p.model.take();
    match &model {
        Some(m) if !m.is_empty() => {
            if let Err(e) = m.validate() {
                p.error(e.to_string());
            }
        }
        _ => p.error(ModelError::NoConcepts.to_string()),
    }
    let failed = p.diagnostics.iter().any(|d| d.severity == Severity::Error);
    ModelDocument {
        lines,
        scale,
        model: if failed { None } else { model },
        diagnostics: p.diagnostics,
    }
}

fn assignment_list(model: &MapModel, values: impl IntoIterator<Item = (usize, AtomSet)>) -> String {
    values
        .into_iter()
        .map(|(i, v)| format!("{}={}", model.concepts[i], format_element(&model.scale, v)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Canonical text for a model. `parse_model(write_model(m))` gives back `m`.
pub fn write_model(model: &MapModel) -> String {
    let mut out = String::new();
    let scale = &model.scale;
    if *scale != standard_scale() {
        out.push_str(&format!("lattice atoms {}\n", scale.atoms().join(" ")));
        for (name, v) in scale.names() {
            if name == BOTTOM_LABEL || name == TOP_LABEL {
                continue;
            }
            let atoms: Vec<&str> = v.indices().map(|i| scale.atoms()[i].as_str()).collect();
            out.push_str(&format!("element {name} = {}\n", atoms.join(" ")));
        }
        out.push('\n');
    }
    for (i, c) in model.concepts.iter().enumerate() {
        let suffix = if model.is_clamped(i) { " clamped" } else { "" };
        out.push_str(&format!("concept {c}{suffix}\n"));
    }
    if !model.weights.is_empty() {
        out.push('\n');
    }
    for ((s, d), w) in model.weights.iter() {
        let sign = if w.is_negative() { "-" } else { "" };
        out.push_str(&format!(
            "weight {} -> {} : {sign}{}\n",
            model.concepts[s],
            model.concepts[d],
            format_element(scale, w.value)
        ));
    }
    if !model.cases.is_empty() {
        out.push('\n');
    }
    for (name, sc) in &model.cases {
        let init = assignment_list(model, sc.init.iter().copied().enumerate());
        out.push_str(&format!("init {name}: {init}\n"));
        for (step, edits) in &sc.edits {
            let list = assignment_list(model, edits.iter().copied());
            out.push_str(&format!("edit {name} @{step}: {list}\n"));
        }
    }
    if !model.docs.is_empty() {
        out.push('\n');
    }
    for (&i, values) in &model.docs {
        let labels: Vec<String> = values.iter().map(|v| format_element(scale, *v)).collect();
        out.push_str(&format!("doc {} : {}\n", model.concepts[i], labels.join(" ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
# two concepts
concept X clamped
concept Y
weight X -> Y : {b, 0c}   # brace label with a space
weight Y -> Y : -born
init one: X=c Y=0
edit one @2: X=d
doc Y : 0c c 0c
";

    fn errors(doc: &ModelDocument) -> Vec<(usize, String)> {
        doc.diagnostics
            .iter()
            .filter(|d| d.severity == Severity::Error)
            .map(|d| (d.line, d.message.clone()))
            .collect()
    }

    #[test]
    fn tokenizer_groups_braces() {
        assert_eq!(tokenize("a {b, c} X={p q}").unwrap(), vec!["a", "{b, c}", "X={p q}"]);
        assert!(tokenize("{a").is_err());
        assert!(tokenize("a}").is_err());
        assert!(tokenize("{{a}}").is_err());
    }

    #[test]
    fn parses_small_model() {
        let doc = parse_model(SMALL);
        assert!(doc.diagnostics.is_empty(), "{:?}", doc.diagnostics);
        let m = doc.model.unwrap();
        let l = &m.scale;
        assert_eq!(m.concepts, vec!["X", "Y"]);
        assert!(m.is_clamped(0));
        assert_eq!(m.weights.get(0, 1).unwrap().value, parse_element(l, "c").unwrap());
        assert!(m.weights.get(1, 1).unwrap().is_negative());
        let sc = m.case("one").unwrap();
        assert_eq!(sc.init[1], AtomSet::EMPTY);
        assert_eq!(sc.edits[&2], vec![(0, parse_element(l, "d").unwrap())]);
        // duplicates collapse
        assert_eq!(m.docs[&1].len(), 2);
    }

    #[test]
    fn empty_file() {
        let doc = parse_model("");
        assert!(doc.model.is_none());
        assert_eq!(errors(&doc), vec![(0, "no concepts declared".to_string())]);
        let doc = parse_model("# only comments\n\n");
        assert_eq!(errors(&doc), vec![(0, "no concepts declared".to_string())]);
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        let text = "concept X\nconcept Y\nweight X -> Y : maybe\nweight X -> Z : b\n\
                    weight X -> Y : b\nweight X -> Y : c\ninit a: X=b\nfrobnicate\n";
        let doc = parse_model(text);
        assert!(doc.model.is_none());
        let e = errors(&doc);
        assert_eq!(e.len(), 5, "{e:?}");
        assert_eq!(e[0], (3, "unknown label `maybe`".into()));
        assert_eq!(e[1], (4, "unknown concept `Z`".into()));
        assert_eq!(e[2], (6, "duplicate weight entry X -> Y".into()));
        assert_eq!(e[3], (7, "case `a` assigns no value to concept `Y`".into()));
        assert_eq!(e[4], (8, "unknown directive `frobnicate`".into()));
    }

    #[test]
    fn warns_on_inert_weights() {
        let doc = parse_model("concept X clamped\nconcept Y\nweight Y -> X : b\nweight X -> X : Th\n");
        assert!(doc.model.is_some());
        assert_eq!(doc.diagnostics.len(), 1);
        assert_eq!(doc.diagnostics[0].severity, Severity::Warning);
        assert_eq!(doc.diagnostics[0].line, 3);
    }

    #[test]
    fn custom_lattice() {
        let text = "lattice atoms p q r\nelement lo = p\nelement mid = p q\nconcept X\ninit s: X=mid\n";
        let doc = parse_model(text);
        let m = doc.model.unwrap();
        assert_eq!(m.scale.atom_count(), 3);
        assert_eq!(m.case("s").unwrap().init[0], AtomSet::from_bits(0b011));
        let again = parse_model(&write_model(&m)).model.unwrap();
        assert_eq!(again, m);
        let late = parse_model("concept X\nlattice atoms p\n");
        assert_eq!(errors(&late)[0].0, 2);
        let bad = parse_model("lattice atoms p\nelement x = q\nconcept X\n");
        assert_eq!(errors(&bad), vec![(2, "unknown atom `q`".into())]);
        assert!(bad.scale.is_none());
        let bare = parse_model("lattice atoms p q\nelement lo = p\n");
        assert!(bare.model.is_none());
        assert_eq!(bare.scale.unwrap().named("lo"), Some(AtomSet::from_bits(1)));
    }

    #[test]
    fn edits_need_a_known_case_and_positive_step() {
        let doc = parse_model("concept X\ninit a: X=b\nedit b @1: X=c\nedit a @0: X=c\nedit a @x: X=c\n");
        let lines: Vec<usize> = errors(&doc).iter().map(|e| e.0).collect();
        assert_eq!(lines, vec![3, 4, 5]);
    }

    #[test]
    fn write_is_idempotent() {
        let m = parse_model(SMALL).model.unwrap();
        let once = write_model(&m);
        let back = parse_model(&once);
        assert!(back.diagnostics.is_empty());
        assert_eq!(back.model.as_ref().unwrap(), &m);
        assert_eq!(write_model(back.model.as_ref().unwrap()), once);
        assert!(once.contains("weight Y -> Y : -born\n"));
        assert!(once.contains("edit one @2: X=d\n"));
    }
}
