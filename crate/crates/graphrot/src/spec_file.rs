//! Line-oriented input format describing a graph and a vertex map on it.
//!
//! A file declares, one directive per line (order free, `#` comments):
//!
//! ```text
//! graph <name>
//! vertex <id> [<id> ...]
//! edge <id> <from> <to>
//! basepoint <id>
//! tree <id> [<id> ...]          # optional; breadth-first default otherwise
//! map <name>
//! track <vertex> [<step> ...]   # step = edge id, ~-prefixed when reversed
//! image <edge> [<step> ...]     # optional declared image, verified later
//! ```
//!
//! Parsing validates everything that is checkable from the text alone —
//! syntax, identifier resolution, graph shape (connected, no looped edges),
//! the spanning tree, path continuity, and track completeness — and anchors
//! every diagnostic to a line and column.  Map-level validation (vertex
//! images distinct, declared images matching the track construction) runs
//! when the parsed file is turned into a lifted map.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{
    build_coherent_labeling, CoherentLabeling, EdgePath, EdgeStep, Graph, Orientation,
    SpanningTree, VertexId,
};
use crate::vmap::{validate_map, LiftedVertexMap, MapError, VertexMap};

/// What went wrong, stripped of position information.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpecErrorKind {
    /// The line does not fit the grammar.
    Syntax(String),
    /// A name does not resolve to a declared vertex or edge.
    UnknownIdentifier(String),
    /// The declarations parse but violate a structural requirement.
    InvariantViolation(String),
}

impl fmt::Display for SpecErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            SpecErrorKind::UnknownIdentifier(m) => write!(f, "unknown {m}"),
            SpecErrorKind::InvariantViolation(m) => write!(f, "{m}"),
        }
    }
}

/// A diagnostic anchored to a 1-based line and column.  Line 0 marks a
/// whole-file problem (a missing required declaration).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {kind}")]
pub struct SpecError {
    pub line: usize,
    pub column: usize,
    pub kind: SpecErrorKind,
}

impl SpecError {
    fn new(line: usize, column: usize, kind: SpecErrorKind) -> SpecError {
        SpecError { line, column, kind }
    }

    fn whole_file(kind: SpecErrorKind) -> SpecError {
        SpecError { line: 0, column: 0, kind }
    }
}

/// A parsed and structurally validated input file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecFile {
    pub graph_name: String,
    pub map_name: String,
    pub graph: Arc<Graph>,
    pub basepoint: VertexId,
    pub tree: SpanningTree,
    pub vertex_map: VertexMap,
}

impl SpecFile {
    /// The coherent labeling over the file's spanning tree.
    pub fn labeling(&self) -> CoherentLabeling {
        build_coherent_labeling(self.graph.clone(), self.tree.clone())
            .expect("the tree was validated at parse time")
    }

    /// Validates the vertex map against the labeling: vertex images must be
    /// distinct and any declared edge images must match the track
    /// construction.
    pub fn lifted_map(&self) -> Result<LiftedVertexMap, MapError> {
        validate_map(self.labeling(), self.vertex_map.clone())
    }

    /// The canonical re-emission of the file: declaration order throughout,
    /// the spanning tree made explicit.  Re-parsing yields an equal value.
    pub fn canonical_text(&self) -> String {
        let g = &self.graph;
        let mut out = String::new();
        out.push_str(&format!("graph {}\n", self.graph_name));
        let vertices: Vec<&str> = g.vertex_ids().map(|v| g.vertex_name(v)).collect();
        out.push_str(&format!("vertex {}\n", vertices.join(" ")));
        for e in g.edge_ids() {
            let edge = g.edge(e);
            out.push_str(&format!(
                "edge {} {} {}\n",
                edge.name,
                g.vertex_name(edge.initial),
                g.vertex_name(edge.terminal)
            ));
        }
        out.push_str(&format!("basepoint {}\n", g.vertex_name(self.basepoint)));
        let tree_names: Vec<&str> =
            self.tree.tree_edges.iter().map(|&e| g.edge(e).name.as_str()).collect();
        if tree_names.is_empty() {
            out.push_str("tree\n");
        } else {
            out.push_str(&format!("tree {}\n", tree_names.join(" ")));
        }
        out.push_str(&format!("map {}\n", self.map_name));
        for (v, track) in g.vertex_ids().zip(self.vertex_map.tracks()) {
            if track.is_empty() {
                out.push_str(&format!("track {}\n", g.vertex_name(v)));
            } else {
                out.push_str(&format!("track {} {}\n", g.vertex_name(v), track.display(g)));
            }
        }
        for (&e, image) in self.vertex_map.declared_images() {
            if image.is_empty() {
                out.push_str(&format!("image {}\n", g.edge(e).name));
            } else {
                out.push_str(&format!("image {} {}\n", g.edge(e).name, image.display(g)));
            }
        }
        out
    }
}

/// A token with its 1-based column.
#[derive(Debug, Clone)]
struct Tok {
    text: String,
    column: usize,
}

/// Splits one line into whitespace-separated tokens, dropping everything
/// from the first `#` on.
fn tokenize(line: &str) -> Vec<Tok> {
    let mut toks = Vec::new();
    let mut current: Option<Tok> = None;
    for (i, c) in line.char_indices() {
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            if let Some(t) = current.take() {
                toks.push(t);
            }
        } else {
            match &mut current {
                Some(t) => t.text.push(c),
                None => current = Some(Tok { text: c.to_string(), column: i + 1 }),
            }
        }
    }
    if let Some(t) = current {
        toks.push(t);
    }
    toks
}

/// One directive line, positions retained.
#[derive(Debug, Clone)]
struct Line {
    number: usize,
    args: Vec<Tok>,
}

#[derive(Debug, Default)]
struct Directives {
    graph: Option<(String, Line)>,
    vertices: Vec<(Tok, usize)>,
    edges: Vec<Line>,
    basepoint: Option<Line>,
    tree: Option<Line>,
    map: Option<(String, Line)>,
    tracks: Vec<Line>,
    images: Vec<Line>,
}

fn syntax(line: &Line, column: usize, msg: impl Into<String>) -> SpecError {
    SpecError::new(line.number, column, SpecErrorKind::Syntax(msg.into()))
}

fn expect_args(line: &Line, directive: &Tok, n: usize) -> Result<(), SpecError> {
    if line.args.len() != n {
        return Err(syntax(
            line,
            directive.column,
            format!("`{}` takes {} argument(s), found {}", directive.text, n, line.args.len()),
        ));
    }
    Ok(())
}

/// Parses the text of an input file.
pub fn parse_spec_text(text: &str) -> Result<SpecFile, SpecError> {
    let mut d = Directives::default();
    for (index, raw) in text.lines().enumerate() {
        let number = index + 1;
        let mut toks = tokenize(raw);
        if toks.is_empty() {
            continue;
        }
        let directive = toks.remove(0);
        let line = Line { number, args: toks };
        match directive.text.as_str() {
            "graph" => {
                expect_args(&line, &directive, 1)?;
                if d.graph.is_some() {
                    return Err(syntax(&line, directive.column, "duplicate `graph` declaration"));
                }
                d.graph = Some((line.args[0].text.clone(), line));
            }
            "vertex" => {
                if line.args.is_empty() {
                    return Err(syntax(&line, directive.column, "`vertex` needs at least one id"));
                }
                for t in &line.args {
                    d.vertices.push((t.clone(), number));
                }
            }
            "edge" => {
                expect_args(&line, &directive, 3)?;
                d.edges.push(line);
            }
            "basepoint" => {
                expect_args(&line, &directive, 1)?;
                if d.basepoint.is_some() {
                    return Err(syntax(
                        &line,
                        directive.column,
                        "duplicate `basepoint` declaration",
                    ));
                }
                d.basepoint = Some(line);
            }
            "tree" => {
                if d.tree.is_some() {
                    return Err(syntax(&line, directive.column, "duplicate `tree` declaration"));
                }
                d.tree = Some(line);
            }
            "map" => {
                expect_args(&line, &directive, 1)?;
                if d.map.is_some() {
                    return Err(syntax(&line, directive.column, "duplicate `map` declaration"));
                }
                d.map = Some((line.args[0].text.clone(), line));
            }
            "track" => {
                if line.args.is_empty() {
                    return Err(syntax(
                        &line,
                        directive.column,
                        "`track` needs a vertex id (steps may be empty)",
                    ));
                }
                d.tracks.push(line);
            }
            "image" => {
                if line.args.is_empty() {
                    return Err(syntax(&line, directive.column, "`image` needs an edge id"));
                }
                d.images.push(line);
            }
            other => {
                return Err(syntax(
                    &line,
                    directive.column,
                    format!("unknown directive `{other}`"),
                ));
            }
        }
    }
    assemble(d)
}

/// Reads and parses an input file; an unreadable file is a whole-file
/// syntax diagnostic.
pub fn parse_spec(path: &Path) -> Result<SpecFile, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        SpecError::whole_file(SpecErrorKind::Syntax(format!(
            "cannot read {}: {e}",
            path.display()
        )))
    })?;
    parse_spec_text(&text)
}

fn unknown(line: usize, tok: &Tok, what: &str) -> SpecError {
    SpecError::new(
        line,
        tok.column,
        SpecErrorKind::UnknownIdentifier(format!("{what} {}", tok.text)),
    )
}

fn violation(line: usize, column: usize, msg: impl Into<String>) -> SpecError {
    SpecError::new(line, column, SpecErrorKind::InvariantViolation(msg.into()))
}

/// Parses a `~`-marked step token against the graph.
fn parse_step(g: &Graph, line: usize, tok: &Tok) -> Result<EdgeStep, SpecError> {
    let (name, orientation) = match tok.text.strip_prefix('~') {
        Some(rest) => (rest, Orientation::Backward),
        None => (tok.text.as_str(), Orientation::Forward),
    };
    let edge = g.edge_id(name).map_err(|_| unknown(line, tok, "edge"))?;
    Ok(EdgeStep { edge, orientation })
}

/// Builds a path from step tokens, anchoring a continuity break to the
/// column of the offending step.
fn parse_path(
    g: &Graph,
    line: usize,
    start: VertexId,
    toks: &[Tok],
) -> Result<EdgePath, SpecError> {
    let mut steps = Vec::with_capacity(toks.len());
    let mut at = start;
    for tok in toks {
        let step = parse_step(g, line, tok)?;
        if g.step_source(step.edge, step.orientation) != at {
            return Err(violation(
                line,
                tok.column,
                format!(
                    "step {} does not continue from vertex {}",
                    tok.text,
                    g.vertex_name(at)
                ),
            ));
        }
        at = g.step_target(step.edge, step.orientation);
        steps.push(step);
    }
    Ok(EdgePath::new(g, start, steps).expect("continuity was checked stepwise"))
}

fn assemble(d: Directives) -> Result<SpecFile, SpecError> {
    let (graph_name, graph_line) = d
        .graph
        .ok_or_else(|| SpecError::whole_file(SpecErrorKind::Syntax("missing `graph` declaration".into())))?;
    let (map_name, map_line) = d
        .map
        .ok_or_else(|| SpecError::whole_file(SpecErrorKind::Syntax("missing `map` declaration".into())))?;
    let basepoint_line = d.basepoint.ok_or_else(|| {
        SpecError::whole_file(SpecErrorKind::Syntax("missing `basepoint` declaration".into()))
    })?;

    // Vertices: names in declaration order, duplicates anchored.
    let mut vertex_names = Vec::new();
    for (tok, line) in &d.vertices {
        if vertex_names.contains(&tok.text) {
            return Err(violation(
                *line,
                tok.column,
                format!("duplicate vertex name {}", tok.text),
            ));
        }
        vertex_names.push(tok.text.clone());
    }
    if vertex_names.is_empty() {
        return Err(violation(
            graph_line.number,
            graph_line.args[0].column,
            "graph must have at least one vertex",
        ));
    }

    // Edges: endpoint resolution, looped-edge and duplicate checks anchored.
    let mut edge_decls = Vec::new();
    let mut edge_names: Vec<String> = Vec::new();
    for line in &d.edges {
        let (name, from, to) = (&line.args[0], &line.args[1], &line.args[2]);
        if edge_names.contains(&name.text) {
            return Err(violation(
                line.number,
                name.column,
                format!("duplicate edge name {}", name.text),
            ));
        }
        for endpoint in [from, to] {
            if !vertex_names.contains(&endpoint.text) {
                return Err(unknown(line.number, endpoint, "vertex"));
            }
        }
        if from.text == to.text {
            return Err(violation(
                line.number,
                name.column,
                format!("looped edges not allowed: edge {} has equal endpoints", name.text),
            ));
        }
        edge_names.push(name.text.clone());
        edge_decls.push((name.text.clone(), from.text.clone(), to.text.clone()));
    }

    let graph = Graph::new(vertex_names, edge_decls).map_err(|e| {
        // Everything anchorable was pre-checked; what remains (such as a
        // disconnected graph) is a property of the whole declaration.
        violation(graph_line.number, graph_line.args[0].column, e.to_string())
    })?;
    let graph = Arc::new(graph);

    let bp_tok = &basepoint_line.args[0];
    let basepoint = graph
        .vertex_id(&bp_tok.text)
        .map_err(|_| unknown(basepoint_line.number, bp_tok, "vertex"))?;

    let tree = match &d.tree {
        Some(line) => {
            let mut tree_edges = std::collections::BTreeSet::new();
            for tok in &line.args {
                let e = graph.edge_id(&tok.text).map_err(|_| unknown(line.number, tok, "edge"))?;
                tree_edges.insert(e);
            }
            let tree = SpanningTree { root: basepoint, tree_edges };
            tree.validate(&graph)
                .map_err(|e| violation(line.number, 1, e.to_string()))?;
            tree
        }
        None => SpanningTree::bfs_default(&graph, basepoint),
    };

    // Tracks: one per vertex, each a path from its own vertex.
    let mut tracks: Vec<Option<EdgePath>> = vec![None; graph.vertex_count()];
    for line in &d.tracks {
        let v_tok = &line.args[0];
        let v = graph.vertex_id(&v_tok.text).map_err(|_| unknown(line.number, v_tok, "vertex"))?;
        if tracks[v.0 as usize].is_some() {
            return Err(violation(
                line.number,
                v_tok.column,
                format!("duplicate track for vertex {}", v_tok.text),
            ));
        }
        tracks[v.0 as usize] = Some(parse_path(&graph, line.number, v, &line.args[1..])?);
    }
    for (v, track) in graph.vertex_ids().zip(&tracks) {
        if track.is_none() {
            return Err(violation(
                map_line.number,
                map_line.args[0].column,
                format!("missing track for vertex {}", graph.vertex_name(v)),
            ));
        }
    }
    let tracks: Vec<EdgePath> = tracks.into_iter().map(|t| t.unwrap()).collect();
    let mut vertex_map = VertexMap::new(&graph, tracks).map_err(|e| {
        violation(map_line.number, map_line.args[0].column, e.to_string())
    })?;

    // Declared images start where the initial endpoint's track ends.
    let mut declared: Vec<String> = Vec::new();
    for line in &d.images {
        let e_tok = &line.args[0];
        let e = graph.edge_id(&e_tok.text).map_err(|_| unknown(line.number, e_tok, "edge"))?;
        if declared.contains(&e_tok.text) {
            return Err(violation(
                line.number,
                e_tok.column,
                format!("duplicate image declaration for edge {}", e_tok.text),
            ));
        }
        declared.push(e_tok.text.clone());
        let start = vertex_map.tracks()[graph.edge(e).initial.0 as usize].end(&graph);
        let image = parse_path(&graph, line.number, start, &line.args[1..])?;
        vertex_map.declare_image(e, image);
    }

    Ok(SpecFile { graph_name, map_name, graph, basepoint, tree, vertex_map })
}
