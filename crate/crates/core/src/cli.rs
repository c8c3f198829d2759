//! The `mvcm` command line.
//!
//! Exit status: 0 on success, 1 for model diagnostics, non-convergence or
//! failed learning, 2 for usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::engine::{self, EngineConfig, IterationTrace, NegMode};
use crate::error::{EngineError, LearnError};
use crate::io::{parse_model, write_model, Severity};
use crate::learning::{learn, DocSelect, LearnConfig, LearnMode, LearnResult};
use crate::model::MapModel;
use crate::scale::{format_element, parse_element};
use crate::table::{cross_check_implication, validate, FiniteLatticeTable, EXHAUSTIVE_ATOM_LIMIT};
use crate::tracefmt::{serialize_trace, weight_changes, weights_table, TraceFormat};

#[derive(Parser, Debug)]
#[command(name = "mvcm", version, about = "Multi-valued cognitive maps over lattices of linguistic labels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a model file and the axioms of its lattice.
    Validate { file: PathBuf },
    /// Iterate cases until three consecutive states agree.
    Run(RunArgs),
    /// Learn weights that bring target concepts into their desired sets.
    Learn(LearnArgs),
    /// Compare the implication with a brute-force residual search.
    Oracle { file: PathBuf },
}

#[derive(Args, Debug)]
struct EngineArgs {
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    #[arg(long, value_enum, default_value_t = NegModeArg::Symmetric)]
    neg_mode: NegModeArg,
    /// First-step coefficient, as a label (default: top).
    #[arg(long, value_name = "LABEL")]
    f0: Option<String>,
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,
    /// Print wall-clock time per phase, in microseconds.
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug)]
struct RunArgs {
    file: PathBuf,
    /// Case to run; repeat for a batch. Default: every case in the file.
    #[arg(long = "init", value_name = "CASE")]
    cases: Vec<String>,
    #[command(flatten)]
    engine: EngineArgs,
    /// Also record and print the r diagnostic.
    #[arg(long)]
    r_diag: bool,
}

#[derive(Args, Debug)]
struct LearnArgs {
    file: PathBuf,
    #[arg(long = "init", value_name = "CASE")]
    case: String,
    #[arg(long, value_enum, default_value_t = ModeArg::End)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = DocSelectArg::First)]
    doc_select: DocSelectArg,
    #[arg(long, default_value_t = 50)]
    max_outer: usize,
    /// Comma-separated target concepts (default: all with desired sets).
    #[arg(long, value_delimiter = ',', value_name = "CONCEPTS")]
    targets: Vec<String>,
    /// Write the model with the learned weights to this file.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NegModeArg {
    Symmetric,
    Strict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Table,
    Lines,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    End,
    Step,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DocSelectArg {
    First,
    Best,
}

enum Failure {
    /// Already reported; exit 1.
    Reported,
    Usage(String),
}

type CmdResult = Result<(), Failure>;

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

// Writes to the caller's streams; a closed pipe is not worth a panic.
macro_rules! say {
    ($w:expr, $($arg:tt)*) => {{
        let _ = writeln!($w, $($arg)*);
    }};
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// status.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return 2;
            }
            let _ = write!(out, "{text}");
            return 0;
        }
    };
    let mut io = Io { out, err };
    let result = match cli.command {
        Command::Validate { file } => cmd_validate(&mut io, &file),
        Command::Run(a) => cmd_run(&mut io, &a),
        Command::Learn(a) => cmd_learn(&mut io, &a),
        Command::Oracle { file } => cmd_oracle(&mut io, &file),
    };
    let _ = io.out.flush();
    match result {
        Ok(()) => 0,
        Err(Failure::Reported) => 1,
        Err(Failure::Usage(msg)) => {
            say!(io.err, "error: {msg}");
            2
        }
    }
}

fn micros(d: Duration) -> u128 {
    d.as_micros()
}

fn read_file(io: &mut Io<'_>, path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| {
        say!(io.err, "error: cannot read {}: {e}", path.display());
        Failure::Reported
    })
}

fn report_diagnostics(io: &mut Io<'_>, path: &Path, doc: &crate::io::ModelDocument) {
    for d in &doc.diagnostics {
        let sev = match d.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        if d.line == 0 {
            say!(io.err, "{}: {sev}: {}", path.display(), d.message);
        } else {
            say!(io.err, "{}:{}: {sev}: {}", path.display(), d.line, d.message);
        }
    }
}

/// Parses the file, reporting diagnostics. Returns the model and parse time.
fn load(io: &mut Io<'_>, path: &Path) -> Result<(MapModel, Duration), Failure> {
    let text = read_file(io, path)?;
    let t = Instant::now();
    let doc = parse_model(&text);
    let elapsed = t.elapsed();
    report_diagnostics(io, path, &doc);
    doc.model.map(|m| (m, elapsed)).ok_or(Failure::Reported)
}

fn engine_config(model: &MapModel, a: &EngineArgs, record_r: bool) -> Result<EngineConfig, Failure> {
    let f0 = match &a.f0 {
        Some(label) => Some(
            parse_element(&model.scale, label).map_err(|e| Failure::Usage(format!("--f0: {e}")))?,
        ),
        None => None,
    };
    let cfg = EngineConfig {
        f0,
        c_coeff: None,
        max_iters: a.max_iters,
        neg_mode: match a.neg_mode {
            NegModeArg::Symmetric => NegMode::Symmetric,
            NegModeArg::Strict => NegMode::Strict,
        },
        record_r,
    };
    cfg.validate(model).map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(cfg)
}

fn trace_format(a: &EngineArgs) -> TraceFormat {
    match a.format {
        FormatArg::Table => TraceFormat::Table,
        FormatArg::Lines => TraceFormat::Lines,
    }
}

/// Text lines that are not trace records become comments in `lines` output.
fn note(io: &mut Io<'_>, format: TraceFormat, text: &str) {
    for line in text.lines() {
        match format {
            TraceFormat::Lines => say!(io.out, "# {line}"),
            TraceFormat::Table => say!(io.out, "{line}"),
        }
    }
}

fn check_case(model: &MapModel, case: &str) -> Result<(), Failure> {
    if model.case(case).is_none() {
        let known: Vec<&str> = model.case_names().collect();
        return Err(Failure::Usage(format!(
            "unknown case `{case}` (known: {})",
            if known.is_empty() { "none".to_string() } else { known.join(", ") }
        )));
    }
    Ok(())
}

fn cmd_validate(io: &mut Io<'_>, path: &Path) -> CmdResult {
    let text = read_file(io, path)?;
    let doc = parse_model(&text);
    report_diagnostics(io, path, &doc);
    let mut ok = !doc.has_errors();
    if let Some(m) = &doc.model {
        say!(
            io.out,
            "model: {} concepts, {} weights, {} cases, {} desired-output sets",
            m.len(),
            m.weights.len(),
            m.cases.len(),
            m.docs.len()
        );
    }
    if let Some(scale) = &doc.scale {
        let n = scale.atom_count();
        if n > EXHAUSTIVE_ATOM_LIMIT {
            say!(io.out, "lattice: {n} atoms, too large for the exhaustive axiom check");
        } else {
            let table = FiniteLatticeTable::from_atom_lattice(scale);
            say!(io.out, "lattice: {n} atoms, {} elements", table.len());
            let report = validate(&table).map_err(|e| Failure::Usage(e.to_string()))?;
            let flags: [(&str, bool, &[&str]); 6] = [
                ("lattice", report.is_lattice, &["reflexivity", "antisymmetry", "transitivity", "join", "meet"]),
                ("distributive", report.is_distributive, &["distributivity"]),
                ("atomic", report.is_atomic, &["atomicity"]),
                (
                    "residuated",
                    report.is_residuated,
                    &["monoid-unit", "monoid-associativity", "right-residual", "left-residual", "adjunction", "residuation"],
                ),
                ("integrally closed", report.is_integrally_closed, &["integral-closure"]),
                ("integral", report.is_integral, &["integrality"]),
            ];
            for (name, flag, laws) in flags {
                if flag {
                    say!(io.out, "  {name:<18} ok");
                } else {
                    let w = report
                        .counterexamples
                        .iter()
                        .find(|w| laws.contains(&w.law))
                        .map(|w| format!("{}: {}", w.law, w.elements.join(", ")))
                        .unwrap_or_default();
                    say!(io.out, "  {name:<18} FAILED ({w})");
                    ok = false;
                }
            }
        }
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Reported)
    }
}

fn cmd_oracle(io: &mut Io<'_>, path: &Path) -> CmdResult {
    let text = read_file(io, path)?;
    let doc = parse_model(&text);
    let Some(scale) = &doc.scale else {
        report_diagnostics(io, path, &doc);
        return Err(Failure::Reported);
    };
    let t = Instant::now();
    let r = cross_check_implication(scale).map_err(|e| Failure::Usage(e.to_string()))?;
    let elapsed = t.elapsed();
    say!(io.out, "implication vs brute-force residual: {} pairs, {} mismatches", r.pairs, r.residual_mismatches);
    say!(io.out, "adjunction: {} triples, {} failures", r.triples, r.adjunction_failures);
    for w in &r.witnesses {
        say!(io.out, "  {}: {}", w.law, w.elements.join(", "));
    }
    say!(io.out, "checked in {} us", micros(elapsed));
    if r.ok() {
        Ok(())
    } else {
        Err(Failure::Reported)
    }
}

fn print_timing(io: &mut Io<'_>, format: TraceFormat, what: &str, d: Duration, steps: usize) {
    let us = micros(d);
    let line = if steps > 0 {
        format!("timing: {what} {us} us, {:.1} us/iteration", us as f64 / steps as f64)
    } else {
        format!("timing: {what} {us} us")
    };
    note(io, format, &line);
}

fn cmd_run(io: &mut Io<'_>, a: &RunArgs) -> CmdResult {
    let (model, parse_time) = load(io, &a.file)?;
    let cfg = engine_config(&model, &a.engine, a.r_diag)?;
    let format = trace_format(&a.engine);
    let cases: Vec<String> = if a.cases.is_empty() {
        model.case_names().map(str::to_string).collect()
    } else {
        a.cases.clone()
    };
    if cases.is_empty() {
        return Err(Failure::Usage("the model defines no cases".into()));
    }
    for c in &cases {
        check_case(&model, c)?;
    }
    if a.engine.timing {
        print_timing(io, format, "parse", parse_time, 0);
    }
    let mut failed = false;
    for c in &cases {
        if cases.len() > 1 {
            note(io, format, &format!("case {c}"));
        }
        let t = Instant::now();
        let result = engine::run(&model, &cfg, c);
        let elapsed = t.elapsed();
        let trace = match result {
            Ok(trace) => trace,
            Err(EngineError::NotConverged { trace }) => {
                say!(io.err, "error: case {c}: no fixed point after {} iterations", trace.steps);
                failed = true;
                *trace
            }
            Err(e) => return Err(Failure::Usage(e.to_string())),
        };
        let _ = write!(io.out, "{}", serialize_trace(&model, &trace, format));
        if a.engine.timing {
            print_timing(io, format, &format!("run {c}"), elapsed, trace.steps);
        }
    }
    if failed {
        Err(Failure::Reported)
    } else {
        Ok(())
    }
}

fn print_learned(io: &mut Io<'_>, model: &MapModel, r: &LearnResult, format: TraceFormat) {
    note(io, format, "weights:");
    note(io, format, &weights_table(model, &r.weights, Some(&model.weights)));
    let changes = weight_changes(model, &model.weights, &r.weights);
    if changes.is_empty() {
        note(io, format, "no weight changed");
    } else {
        note(io, format, "changes:");
        for c in changes {
            note(io, format, &format!("  {c}"));
        }
    }
    let achieved: Vec<String> = r
        .achieved
        .iter()
        .map(|(t, v)| format!("{}={}", model.concepts[*t], format_element(&model.scale, *v)))
        .collect();
    note(io, format, &format!("final: {}", achieved.join(" ")));
}

fn print_trace(io: &mut Io<'_>, model: &MapModel, trace: &IterationTrace, format: TraceFormat) {
    let _ = write!(io.out, "{}", serialize_trace(model, trace, format));
}

fn cmd_learn(io: &mut Io<'_>, a: &LearnArgs) -> CmdResult {
    let (model, parse_time) = load(io, &a.file)?;
    let cfg = engine_config(&model, &a.engine, false)?;
    let format = trace_format(&a.engine);
    check_case(&model, &a.case)?;
    let mut targets = Vec::new();
    for t in &a.targets {
        targets.push(model.concept(t).map_err(|e| Failure::Usage(e.to_string()))?);
    }
    let lcfg = LearnConfig {
        mode: match a.mode {
            ModeArg::End => LearnMode::EndOfRun,
            ModeArg::Step => LearnMode::PerStep,
        },
        doc_select: match a.doc_select {
            DocSelectArg::First => DocSelect::First,
            DocSelectArg::Best => DocSelect::Best,
        },
        max_outer: a.max_outer,
        targets,
    };
    if a.engine.timing {
        print_timing(io, format, "parse", parse_time, 0);
    }
    let t = Instant::now();
    let result = learn(&model, &cfg, &lcfg, &a.case);
    let elapsed = t.elapsed();
    let outcome = match result {
        Ok(r) => {
            note(io, format, &format!("learned in {} rounds", r.outer_rounds));
            print_learned(io, &model, &r, format);
            print_trace(io, &model, &r.trace, format);
            if let Some(path) = &a.output {
                let mut learned = model.clone();
                learned.weights = r.weights.clone();
                if let Err(e) = std::fs::write(path, write_model(&learned)) {
                    say!(io.err, "error: cannot write {}: {e}", path.display());
                    return Err(Failure::Reported);
                }
            }
            Ok(())
        }
        Err(LearnError::Failed { last }) => {
            note(io, format, &format!("gave up after {} rounds", last.outer_rounds));
            print_learned(io, &model, &last, format);
            print_trace(io, &model, &last.trace, format);
            say!(io.err, "error: targets still outside their desired sets after {} rounds", last.outer_rounds);
            Err(Failure::Reported)
        }
        Err(LearnError::Engine(EngineError::NotConverged { trace })) => {
            print_trace(io, &model, &trace, format);
            say!(io.err, "error: no fixed point after {} iterations while learning", trace.steps);
            Err(Failure::Reported)
        }
        Err(e) => Err(Failure::Usage(e.to_string())),
    };
    if a.engine.timing {
        print_timing(io, format, "learn", elapsed, 0);
    }
    outcome
}
