//! Command-line interface: input loading, subcommand dispatch, and paired
//! human/JSON reports.
//!
//! Every invocation names an input file and a subcommand.  The file is
//! parsed and fully validated first; commands that analyze an edge re-root
//! the spanning tree through that edge when necessary and print the
//! regenerated generator table before their results, so every word in the
//! output is readable against the table above it.
//!
//! Exit statuses: 0 success, 1 usage (bad invocation, unreadable file,
//! unknown vertex/edge name), 2 invalid input file, 3 an analysis
//! hypothesis does not hold for this map, 4 resource cap exceeded.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::detector::{
    analysis_map, classify_edge, family_descriptors, predicted_elements, DetectorError,
    EdgeClassification, Prediction,
};
use crate::dot::cover_ball_dot;
use crate::graph::{CoherentLabeling, EdgeId, Graph, VertexId};
use crate::oracle::{
    enumerate_periodic, one_orbit_analysis, s_closure_check, verify_predictions, Location,
    OracleError, SClosureReport, VerifyReport, VertexMode,
};
use crate::spec_file::parse_spec_text;
use crate::vmap::{LiftedVertexMap, MapError};
use crate::word::{conjugacy_equal, RotationElement};

/// The documented exit taxonomy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success,
    Usage,
    SpecInvalid,
    HypothesisUnmet,
    ResourceCap,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::Usage => 1,
            ExitStatus::SpecInvalid => 2,
            ExitStatus::HypothesisUnmet => 3,
            ExitStatus::ResourceCap => 4,
        }
    }
}

/// A failed invocation: which status to exit with and what to print.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub status: ExitStatus,
    pub message: String,
}

impl CliError {
    fn new(status: ExitStatus, message: impl Into<String>) -> CliError {
        CliError { status, message: message.into() }
    }
}

fn map_error(e: MapError) -> CliError {
    let status = match e {
        MapError::StepCapExceeded(_) => ExitStatus::ResourceCap,
        _ => ExitStatus::SpecInvalid,
    };
    CliError::new(status, e.to_string())
}

fn detector_error(e: DetectorError) -> CliError {
    match e {
        DetectorError::Map(m) => map_error(m),
        other => CliError::new(ExitStatus::HypothesisUnmet, other.to_string()),
    }
}

fn oracle_error(e: OracleError) -> CliError {
    match e {
        OracleError::Hypothesis(m) => CliError::new(ExitStatus::HypothesisUnmet, m),
        OracleError::Map(m) => map_error(m),
        OracleError::Detector(d) => detector_error(d),
    }
}

/// Command-line arguments.
#[derive(Parser, Debug)]
#[command(
    name = "graphrot",
    version,
    about = "Rotation elements of vertex maps on graphs"
)]
pub struct Cli {
    /// Input file describing the graph and the vertex map.
    pub spec: PathBuf,
    /// Emit the JSON report instead of the human-readable text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

/// `sset --vertex-mode` choices.
#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexModeArg {
    Off,
    Initial,
    Terminal,
}

impl From<VertexModeArg> for VertexMode {
    fn from(a: VertexModeArg) -> VertexMode {
        match a {
            VertexModeArg::Off => VertexMode::Off,
            VertexModeArg::Initial => VertexMode::Initial,
            VertexModeArg::Terminal => VertexMode::Terminal,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check that the file describes a valid vertex map homotopic to the
    /// identity.
    Validate {
        /// Re-emit the parsed model in canonical form.
        #[arg(long)]
        echo: bool,
    },
    /// Print the spanning tree, basepoint, and generator table.
    Label,
    /// Rotation elements of every vertex (or one vertex), with conjugacy
    /// classes.
    Rotation {
        /// Restrict to one vertex.
        #[arg(long)]
        vertex: Option<String>,
    },
    /// Classify an edge by how its endpoint dynamics interact.
    Classify {
        #[arg(long)]
        edge: String,
    },
    /// Guaranteed periodic rotation elements on an edge.
    Predict {
        #[arg(long)]
        edge: String,
        /// Largest reduced exponent denominator to enumerate.
        #[arg(long = "max-denom", default_value_t = 3)]
        max_denom: u64,
    },
    /// Exact periodic points of one period on an edge.
    Periodic {
        #[arg(long)]
        edge: String,
        #[arg(long)]
        period: u64,
    },
    /// Confirm every guaranteed element against the exact enumeration.
    Verify {
        #[arg(long)]
        edge: String,
        #[arg(long = "period-bound")]
        period_bound: u64,
        #[arg(long = "max-denom", default_value_t = 3)]
        max_denom: u64,
    },
    /// Close enumerated elements under interleaved powers and confirm the
    /// closure.
    Sset {
        #[arg(long)]
        edge: String,
        #[arg(long = "period-bound")]
        period_bound: u64,
        /// Longest interleaved power sequence to enumerate.
        #[arg(long = "max-len")]
        max_len: u32,
        /// Seed the closure with an endpoint rotation pair.
        #[arg(long = "vertex-mode", value_enum, default_value_t = VertexModeArg::Off)]
        vertex_mode: VertexModeArg,
    },
    /// Full pipeline on a single-orbit map: locate a fixed edge, classify,
    /// predict, verify.
    OneOrbit,
    /// Render a ball of the labeled universal cover as DOT.
    Dot {
        /// Ball radius in the deck group's word metric.
        #[arg(long)]
        radius: u64,
        /// Write the DOT text to a file instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Label => "label",
            Command::Rotation { .. } => "rotation",
            Command::Classify { .. } => "classify",
            Command::Predict { .. } => "predict",
            Command::Periodic { .. } => "periodic",
            Command::Verify { .. } => "verify",
            Command::Sset { .. } => "sset",
            Command::OneOrbit => "one-orbit",
            Command::Dot { .. } => "dot",
        }
    }
}

/// A finished invocation: the human text and the JSON value describe the
/// same results; the digest fingerprints the input file bytes.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub digest: String,
    pub human: String,
    pub json: Value,
}

/// 64-bit FNV-1a over the raw input bytes.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn resolve_edge(g: &Graph, name: &str) -> Result<EdgeId, CliError> {
    g.edge_id(name)
        .map_err(|_| CliError::new(ExitStatus::Usage, format!("unknown edge {name}")))
}

fn resolve_vertex(g: &Graph, name: &str) -> Result<VertexId, CliError> {
    g.vertex_id(name)
        .map_err(|_| CliError::new(ExitStatus::Usage, format!("unknown vertex {name}")))
}

/// Lines of the generator table: tree, basepoint, θ per edge, loop per
/// generator.
fn labeling_lines(l: &CoherentLabeling) -> Vec<String> {
    let g = l.graph();
    let mut lines = Vec::new();
    let tree: Vec<&str> =
        l.tree().tree_edges.iter().map(|&e| g.edge(e).name.as_str()).collect();
    lines.push(format!("basepoint {}", g.vertex_name(l.root())));
    lines.push(format!("tree {}", tree.join(" ")));
    for e in g.edge_ids() {
        lines.push(format!("theta({}) = {}", g.edge(e).name, l.theta_word(e)));
    }
    for (name, edge, loop_repr) in l.generator_table() {
        lines.push(format!("generator {name}: edge {edge}, loop {loop_repr}"));
    }
    lines
}

fn labeling_json(l: &CoherentLabeling) -> Value {
    let g = l.graph();
    let tree: Vec<String> =
        l.tree().tree_edges.iter().map(|&e| g.edge(e).name.clone()).collect();
    let mut theta = serde_json::Map::new();
    for e in g.edge_ids() {
        theta.insert(g.edge(e).name.clone(), json!(l.theta_word(e).to_string()));
    }
    let generators: Vec<Value> = l
        .generator_table()
        .into_iter()
        .map(|(name, edge, loop_repr)| json!({"name": name, "edge": edge, "loop": loop_repr}))
        .collect();
    json!({
        "basepoint": g.vertex_name(l.root()),
        "tree": tree,
        "theta": theta,
        "generators": generators,
    })
}

fn location_json(g: &Graph, loc: &Location) -> Value {
    match loc {
        Location::Interior(t) => json!({"kind": "interior", "t": t.to_string()}),
        Location::DegenerateInterval(a, b) => {
            json!({"kind": "degenerate-interval", "a": a.to_string(), "b": b.to_string()})
        }
        Location::VertexEnd { position, vertex } => json!({
            "kind": "vertex-end",
            "position": position.to_string(),
            "vertex": g.vertex_name(*vertex),
        }),
    }
}

fn prediction_json(p: &Prediction) -> Value {
    json!({
        "element": p.element.to_string(),
        "p": p.p,
        "q": p.q,
        "witness": p.period_witness,
        "guarantee": p.source_theorem.to_string(),
        "gamma": p.gamma.as_ref().map(|g| g.to_string()),
    })
}

fn prediction_line(p: &Prediction) -> String {
    let gamma = match &p.gamma {
        Some(g) => format!(", gamma {g}"),
        None => String::new(),
    };
    format!(
        "{} (p = {}, q = {}, witness period {}, {}{gamma})",
        p.element, p.p, p.q, p.period_witness, p.source_theorem
    )
}

fn classification_json(g: &Graph, c: &EdgeClassification) -> Value {
    let gammas = |set: &std::collections::BTreeSet<crate::word::Word>| -> Vec<String> {
        set.iter().map(|w| w.to_string()).collect()
    };
    json!({
        "edge": g.edge(c.edge).name,
        "case": c.case.to_string(),
        "w1": c.w1.to_string(),
        "w2": c.w2.to_string(),
        "m": c.m,
        "n": c.n,
        "begins1": c.begins1,
        "begins2": c.begins2,
        "belongs1": c.belongs1,
        "belongs2": c.belongs2,
        "common_root": c.common_root.as_ref().map(|(w, k1, k2)| {
            json!({"word": w.to_string(), "k1": k1, "k2": k2})
        }),
        "gamma1": gammas(&c.gamma1),
        "gamma2": gammas(&c.gamma2),
        "descriptors": family_descriptors(c),
    })
}

fn classification_lines(g: &Graph, c: &EdgeClassification) -> Vec<String> {
    let mut lines = Vec::new();
    lines.push(format!("edge {}: case {}", g.edge(c.edge).name, c.case));
    lines.push(format!("w1 = {} (period {}), w2 = {} (period {})", c.w1, c.m, c.w2, c.n));
    lines.push(format!(
        "begins with the edge lift: P1 {}, P2 {}",
        yes_no(c.begins1),
        yes_no(c.begins2)
    ));
    lines.push(format!(
        "edge belongs to the word: w1 {}, w2 {}",
        yes_no(c.belongs1),
        yes_no(c.belongs2)
    ));
    if let Some((w, k1, k2)) = &c.common_root {
        lines.push(format!("common root {w} with w1 = {w}^{k1}, w2 = {w}^{k2}"));
    }
    for side in [("gamma1", &c.gamma1), ("gamma2", &c.gamma2)] {
        if !side.1.is_empty() {
            let items: Vec<String> = side.1.iter().map(|w| w.to_string()).collect();
            lines.push(format!("{}: {{{}}}", side.0, items.join(", ")));
        }
    }
    let descriptors = family_descriptors(c);
    if !descriptors.is_empty() {
        lines.push("guaranteed families:".to_string());
        for d in descriptors {
            lines.push(format!("  - {d}"));
        }
    }
    lines
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn verify_json(g: &Graph, r: &VerifyReport) -> Value {
    let matched: Vec<Value> = r
        .matched
        .iter()
        .map(|m| {
            let mut v = prediction_json(&m.prediction);
            let obj = v.as_object_mut().expect("prediction encodes as an object");
            obj.insert("period".into(), json!(m.period));
            obj.insert("location".into(), location_json(g, &m.location));
            v
        })
        .collect();
    json!({
        "edge": g.edge(r.edge).name,
        "period_bound": r.period_bound,
        "matched": matched,
        "missing": r.missing.iter().map(prediction_json).collect::<Vec<_>>(),
        "out_of_bound": r.out_of_bound.iter().map(prediction_json).collect::<Vec<_>>(),
    })
}

fn verify_lines(g: &Graph, r: &VerifyReport) -> Vec<String> {
    let mut lines = Vec::new();
    for m in &r.matched {
        lines.push(format!(
            "matched {} at period {}, location {}",
            m.prediction.element,
            m.period,
            m.location.display(g)
        ));
    }
    for p in &r.missing {
        lines.push(format!("MISSING {} (no record up to period {})", p.element, r.period_bound));
    }
    for p in &r.out_of_bound {
        lines.push(format!(
            "out of bound: {} cannot recur within period {}",
            p.element, r.period_bound
        ));
    }
    lines.push(format!(
        "{} matched, {} missing, {} out of bound",
        r.matched.len(),
        r.missing.len(),
        r.out_of_bound.len()
    ));
    lines
}

fn sset_json(g: &Graph, r: &SClosureReport) -> Value {
    let pair = |p: &(crate::word::Word, u64)| json!({"word": p.0.to_string(), "period": p.1});
    json!({
        "edge": g.edge(r.edge).name,
        "pairs": r.pairs.iter().map(|(a, b)| json!([pair(a), pair(b)])).collect::<Vec<_>>(),
        "elements": r
            .elements
            .iter()
            .map(|(elem, period, confirmed)| json!({
                "element": elem.to_string(),
                "period": period,
                "confirmed": confirmed,
            }))
            .collect::<Vec<_>>(),
        "skipped": r.skipped,
        "all_confirmed": r.all_confirmed,
    })
}

fn sset_lines(r: &SClosureReport) -> Vec<String> {
    let mut lines = Vec::new();
    lines.push(format!("{} generator pair(s) drive the closure", r.pairs.len()));
    for (elem, period, confirmed) in &r.elements {
        let status = if *confirmed { "confirmed" } else { "NOT CONFIRMED" };
        lines.push(format!("{elem} at period {period}: {status}"));
    }
    lines.push(format!("{} element(s) beyond the period bound skipped", r.skipped));
    lines.push(if r.all_confirmed {
        "all closure elements within bound confirmed".to_string()
    } else {
        "UNCONFIRMED closure elements exist".to_string()
    });
    lines
}

/// Re-roots the analysis for a non-tree edge, reporting the regenerated
/// table; tree edges pass through untouched.
fn analysis_for_edge(
    lm: LiftedVertexMap,
    e: EdgeId,
    lines: &mut Vec<String>,
    payload: &mut serde_json::Map<String, Value>,
) -> Result<LiftedVertexMap, CliError> {
    match analysis_map(&lm, e).map_err(map_error)? {
        None => Ok(lm),
        Some(relabeled) => {
            let name = lm.graph().edge(e).name.clone();
            lines.push(format!(
                "edge {name} is not in the spanning tree; re-rooted through it:"
            ));
            lines.extend(labeling_lines(relabeled.labeling()));
            lines.push(String::new());
            payload.insert("relabeled".into(), labeling_json(relabeled.labeling()));
            Ok(relabeled)
        }
    }
}

/// Executes a parsed invocation against the input text.
pub(crate) fn run_with_text(cli: &Cli, text: &str) -> Result<Report, CliError> {
    let spec = parse_spec_text(text)
        .map_err(|e| CliError::new(ExitStatus::SpecInvalid, e.to_string()))?;
    let digest = format!("{:016x}", fnv1a(text.as_bytes()));
    let lm = spec.lifted_map().map_err(map_error)?;
    let g = spec.graph.clone();

    let mut lines: Vec<String> = Vec::new();
    let mut payload = serde_json::Map::new();

    match &cli.command {
        Command::Validate { echo } => {
            if *echo {
                let canonical = spec.canonical_text();
                payload.insert("echo".into(), json!(canonical));
                // The echoed text must be pipeable back into the parser, so
                // it is the entire human output.
                lines.extend(canonical.lines().map(str::to_string));
            } else {
                lines.push(format!(
                    "graph {}: {} vertices, {} edges, rank {}",
                    spec.graph_name,
                    g.vertex_count(),
                    g.edge_count(),
                    g.rank()
                ));
                lines.push(format!(
                    "map {}: valid vertex map homotopic to the identity",
                    spec.map_name
                ));
                let permutation: Vec<String> = g
                    .vertex_ids()
                    .map(|v| {
                        format!("{} -> {}", g.vertex_name(v), g.vertex_name(lm.sigma(v)))
                    })
                    .collect();
                lines.push(format!("vertex permutation: {}", permutation.join(", ")));
                payload.insert("graph".into(), json!(spec.graph_name));
                payload.insert("map".into(), json!(spec.map_name));
                payload.insert("vertices".into(), json!(g.vertex_count()));
                payload.insert("edges".into(), json!(g.edge_count()));
                payload.insert("rank".into(), json!(g.rank()));
                payload.insert("valid".into(), json!(true));
            }
        }
        Command::Label => {
            lines.extend(labeling_lines(lm.labeling()));
            payload.insert("labeling".into(), labeling_json(lm.labeling()));
        }
        Command::Rotation { vertex } => {
            let targets: Vec<VertexId> = match vertex {
                Some(name) => vec![resolve_vertex(&g, name)?],
                None => g.vertex_ids().collect(),
            };
            let mut rotations = Vec::new();
            for &v in &targets {
                let (word, period) = lm.rotation_word(v);
                let element = lm.vertex_rotation(v);
                lines.push(format!(
                    "rho({}) = {element} (word {word}, period {period})",
                    g.vertex_name(v)
                ));
                rotations.push(json!({
                    "vertex": g.vertex_name(v),
                    "element": element.to_string(),
                    "word": word.to_string(),
                    "period": period,
                }));
            }
            payload.insert("rotations".into(), json!(rotations));
            if vertex.is_none() {
                let mut classes: Vec<(RotationElement, Vec<String>)> = Vec::new();
                for v in g.vertex_ids() {
                    let rho = lm.vertex_rotation(v);
                    match classes.iter_mut().find(|(repr, _)| conjugacy_equal(repr, &rho)) {
                        Some((_, members)) => members.push(g.vertex_name(v).to_string()),
                        None => classes.push((rho, vec![g.vertex_name(v).to_string()])),
                    }
                }
                for (repr, members) in &classes {
                    lines.push(format!(
                        "conjugacy class of {repr}: {}",
                        members.join(" ")
                    ));
                }
                let classes_json: Vec<Value> = classes
                    .iter()
                    .map(|(repr, members)| json!({
                        "representative": repr.to_string(),
                        "vertices": members,
                    }))
                    .collect();
                payload.insert("classes".into(), json!(classes_json));
            }
        }
        Command::Classify { edge } => {
            let e = resolve_edge(&g, edge)?;
            let alm = analysis_for_edge(lm, e, &mut lines, &mut payload)?;
            let c = classify_edge(&alm, e).map_err(detector_error)?;
            lines.extend(classification_lines(&g, &c));
            payload.insert("classification".into(), classification_json(&g, &c));
        }
        Command::Predict { edge, max_denom } => {
            let e = resolve_edge(&g, edge)?;
            let alm = analysis_for_edge(lm, e, &mut lines, &mut payload)?;
            let c = classify_edge(&alm, e).map_err(detector_error)?;
            let preds = predicted_elements(&c, *max_denom);
            lines.push(format!("case {}", c.case));
            for p in &preds {
                lines.push(prediction_line(p));
            }
            lines.push(format!("{} guaranteed element(s)", preds.len()));
            payload.insert("case".into(), json!(c.case.to_string()));
            payload.insert(
                "predictions".into(),
                json!(preds.iter().map(prediction_json).collect::<Vec<_>>()),
            );
        }
        Command::Periodic { edge, period } => {
            if *period == 0 {
                return Err(CliError::new(ExitStatus::Usage, "--period must be at least 1"));
            }
            let e = resolve_edge(&g, edge)?;
            let alm = analysis_for_edge(lm, e, &mut lines, &mut payload)?;
            let records = enumerate_periodic(&alm, e, *period).map_err(oracle_error)?;
            let mut records_json = Vec::new();
            for r in &records {
                let itinerary: Vec<String> =
                    r.itinerary.iter().map(|i| i.to_string()).collect();
                lines.push(format!(
                    "{}: word {}, element {}, itinerary [{}]",
                    r.location.display(&g),
                    r.rotation_word,
                    r.element,
                    itinerary.join(" ")
                ));
                records_json.push(json!({
                    "location": location_json(&g, &r.location),
                    "period": r.period,
                    "word": r.rotation_word.to_string(),
                    "element": r.element.to_string(),
                    "itinerary": r.itinerary,
                }));
            }
            lines.push(format!("{} periodic record(s) at period {period}", records.len()));
            payload.insert("period".into(), json!(period));
            payload.insert("records".into(), json!(records_json));
        }
        Command::Verify { edge, period_bound, max_denom } => {
            if *period_bound == 0 {
                return Err(CliError::new(ExitStatus::Usage, "--period-bound must be at least 1"));
            }
            let e = resolve_edge(&g, edge)?;
            let alm = analysis_for_edge(lm, e, &mut lines, &mut payload)?;
            let c = classify_edge(&alm, e).map_err(detector_error)?;
            let preds = predicted_elements(&c, *max_denom);
            let report = verify_predictions(&alm, e, &preds, *period_bound)
                .map_err(oracle_error)?;
            lines.push(format!("case {}", c.case));
            lines.extend(verify_lines(&g, &report));
            payload.insert("case".into(), json!(c.case.to_string()));
            payload.insert("verify".into(), verify_json(&g, &report));
        }
        Command::Sset { edge, period_bound, max_len, vertex_mode } => {
            if *period_bound == 0 {
                return Err(CliError::new(ExitStatus::Usage, "--period-bound must be at least 1"));
            }
            let e = resolve_edge(&g, edge)?;
            let alm = analysis_for_edge(lm, e, &mut lines, &mut payload)?;
            let report = s_closure_check(&alm, e, *period_bound, *max_len, (*vertex_mode).into())
                .map_err(oracle_error)?;
            lines.extend(sset_lines(&report));
            payload.insert("sset".into(), sset_json(&g, &report));
        }
        Command::OneOrbit => {
            let report = one_orbit_analysis(&lm, 3, 6).map_err(oracle_error)?;
            lines.push(format!(
                "single vertex orbit of period {}, rank {}",
                report.period, report.rank
            ));
            let mut candidates_json = Vec::new();
            for c in &report.candidates {
                let verdict = if c.words_differ {
                    "endpoint words differ"
                } else {
                    "endpoint words equal, skipped"
                };
                lines.push(format!(
                    "candidate edge {} (w1 = {}, w2 = {}): {verdict}",
                    g.edge(c.edge).name,
                    c.words.0,
                    c.words.1
                ));
                candidates_json.push(json!({
                    "edge": g.edge(c.edge).name,
                    "w1": c.words.0.to_string(),
                    "w2": c.words.1.to_string(),
                    "words_differ": c.words_differ,
                }));
            }
            payload.insert("period".into(), json!(report.period));
            payload.insert("rank".into(), json!(report.rank));
            payload.insert("candidates".into(), json!(candidates_json));
            match &report.chosen {
                None => {
                    lines.push("no candidate edge with distinct endpoint words".to_string());
                    payload.insert("chosen".into(), Value::Null);
                }
                Some(chosen) => {
                    lines.push(format!("chosen edge {}", g.edge(chosen.edge).name));
                    let belongs: Vec<String> = chosen
                        .belongs_all
                        .iter()
                        .map(|(e, holds)| format!("{} {}", g.edge(*e).name, yes_no(*holds)))
                        .collect();
                    lines.push(format!("belongs to w1 = {}: {}", chosen.w1, belongs.join(", ")));
                    lines.extend(classification_lines(&g, &chosen.classification));
                    let verify_value = match &chosen.verify {
                        Some(v) => {
                            for p in &chosen.predictions {
                                lines.push(prediction_line(p));
                            }
                            lines.extend(verify_lines(&g, v));
                            verify_json(&g, v)
                        }
                        None => {
                            lines.push(
                                "belonging hypothesis fails; no predictions issued".to_string(),
                            );
                            Value::Null
                        }
                    };
                    payload.insert(
                        "chosen".into(),
                        json!({
                            "edge": g.edge(chosen.edge).name,
                            "w1": chosen.w1.to_string(),
                            "w2": chosen.w2.to_string(),
                            "belongs": chosen
                                .belongs_all
                                .iter()
                                .map(|(e, holds)| json!([g.edge(*e).name, holds]))
                                .collect::<Vec<_>>(),
                            "belongs_ok": chosen.belongs_ok,
                            "classification": classification_json(&g, &chosen.classification),
                            "predictions": chosen
                                .predictions
                                .iter()
                                .map(prediction_json)
                                .collect::<Vec<_>>(),
                            "verify": verify_value,
                        }),
                    );
                }
            }
        }
        Command::Dot { radius, out } => {
            let dot = cover_ball_dot(lm.labeling(), *radius);
            payload.insert("radius".into(), json!(radius));
            payload.insert("dot".into(), json!(dot));
            match out {
                Some(path) => {
                    std::fs::write(path, &dot).map_err(|e| {
                        CliError::new(
                            ExitStatus::Usage,
                            format!("cannot write {}: {e}", path.display()),
                        )
                    })?;
                    lines.push(format!("wrote {}", path.display()));
                    payload.insert("out".into(), json!(path.display().to_string()));
                }
                None => {
                    lines.extend(dot.lines().map(str::to_string));
                    payload.insert("out".into(), Value::Null);
                }
            }
        }
    }

    let mut human = String::new();
    for line in &lines {
        let _ = writeln!(human, "{line}");
    }
    let command = cli.command.name().to_string();
    let json = json!({
        "command": command,
        "digest": digest,
        "results": Value::Object(payload),
    });
    Ok(Report { command, digest, human, json })
}

/// Loads the input file and executes the invocation.
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let text = std::fs::read_to_string(&cli.spec).map_err(|e| {
        CliError::new(
            ExitStatus::Usage,
            format!("cannot read {}: {e}", cli.spec.display()),
        )
    })?;
    run_with_text(cli, &text)
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { ExitStatus::Usage.code() } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(report) => {
            let mut out = io::stdout().lock();
            let written = if cli.json {
                let text = serde_json::to_string_pretty(&report.json)
                    .expect("reports serialize to JSON");
                writeln!(out, "{text}")
            } else {
                write!(out, "{}", report.human)
            };
            match written.and_then(|()| out.flush()) {
                Ok(()) => ExitStatus::Success.code(),
                // A closed pipe downstream truncates the report on purpose.
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => ExitStatus::Success.code(),
                Err(e) => {
                    eprintln!("error: cannot write the report: {e}");
                    ExitStatus::Usage.code()
                }
            }
        }
        Err(err) => {
            eprintln!("error: {}", err.message);
            err.status.code()
        }
    }
}
