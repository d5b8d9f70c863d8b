//! Directed multigraphs, spanning trees, and coherent labelings of the
//! universal cover.
//!
//! Purpose: the universal cover of a connected graph is a tree; once a
//! spanning tree and a basepoint are chosen, every vertex of the cover is
//! named by a pair (deck word, base vertex) and every lifted edge by a deck
//! word prefix.  This module builds that labeling and provides the lifted
//! path algebra on top of it: lifting, contraction to geodesics, deck
//! translation, and translation between fundamental-group words and edge
//! loops.
//!
//! Frozen labeling convention (pinned by a regression test):
//! - the chosen lift of edge `E : V₁ → V₂` runs from `Ṽ₁` to `θ(E)·Ṽ₂`; its
//!   deck translate `γẼ` runs from `γṼ₁` to `γ·θ(E)·Ṽ₂`;
//! - traversing `E` forward from a vertex labeled `u` therefore appends on
//!   the right (next label `u·θ(E)`); traversing backward appends `θ(E)⁻¹`;
//! - a lifted step stores the deck prefix `γ` of the lifted edge `γẼ` it
//!   traverses, independent of direction: for forward steps this equals the
//!   start label, for backward steps the end label;
//! - the deck action prefixes every label on the LEFT.
//!
//! Why this design: prefixes identify lifted edges direction-independently,
//! so contraction, inversion, and "begins with `Ẽ`" checks are plain
//! structural comparisons, and the left deck action commutes with lifting
//! exactly as deck transformations commute with the lifted map.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::word::{gen_name, GenId, Word};

/// Errors from graph construction and lifted-path algebra.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    NoVertices,
    #[error("duplicate vertex name {0}")]
    DuplicateVertex(String),
    #[error("duplicate edge name {0}")]
    DuplicateEdge(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("unknown edge {0}")]
    UnknownEdge(String),
    #[error("looped edges not allowed: edge {0} has equal endpoints")]
    LoopedEdge(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("invalid spanning tree: {0}")]
    InvalidTree(String),
    #[error("path step {index} ({edge}) does not continue from vertex {at}")]
    BrokenPath { index: usize, edge: String, at: String },
    #[error("path starts at {found} but was lifted from {expected}")]
    PathStartMismatch { expected: String, found: String },
    #[error("lifted paths do not meet at a common vertex")]
    NotComposable,
    #[error("path is not a loop at the basepoint")]
    NotLoopAtRoot,
}

/// Index of a vertex in its graph's declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

/// Index of an edge in its graph's declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

/// Traversal direction of a directed edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Orientation {
    Forward,
    Backward,
}

impl Orientation {
    pub fn flip(self) -> Orientation {
        match self {
            Orientation::Forward => Orientation::Backward,
            Orientation::Backward => Orientation::Forward,
        }
    }
}

/// A directed edge between two distinct vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub initial: VertexId,
    pub terminal: VertexId,
}

/// A finite connected directed multigraph without looped edges.
#[derive(Debug, PartialEq, Eq)]
pub struct Graph {
    vertex_names: Vec<String>,
    edges: Vec<Edge>,
    /// Per vertex: incident edges in declaration order, with the orientation
    /// that LEAVES the vertex.
    incident: Vec<Vec<(EdgeId, Orientation)>>,
}

impl Graph {
    /// Builds and validates a graph from named vertices and edge triples
    /// `(edge name, initial vertex name, terminal vertex name)`.
    pub fn new(
        vertex_names: Vec<String>,
        edge_decls: Vec<(String, String, String)>,
    ) -> Result<Graph, GraphError> {
        if vertex_names.is_empty() {
            return Err(GraphError::NoVertices);
        }
        let mut vertex_index = BTreeMap::new();
        for (i, name) in vertex_names.iter().enumerate() {
            if vertex_index.insert(name.clone(), VertexId(i as u32)).is_some() {
                return Err(GraphError::DuplicateVertex(name.clone()));
            }
        }
        let mut edge_names = BTreeSet::new();
        let mut edges = Vec::with_capacity(edge_decls.len());
        for (name, from, to) in edge_decls {
            if !edge_names.insert(name.clone()) {
                return Err(GraphError::DuplicateEdge(name));
            }
            let initial = *vertex_index
                .get(&from)
                .ok_or_else(|| GraphError::UnknownVertex(from.clone()))?;
            let terminal =
                *vertex_index.get(&to).ok_or_else(|| GraphError::UnknownVertex(to.clone()))?;
            if initial == terminal {
                return Err(GraphError::LoopedEdge(name));
            }
            edges.push(Edge { name, initial, terminal });
        }
        let mut incident = vec![Vec::new(); vertex_names.len()];
        for (i, e) in edges.iter().enumerate() {
            incident[e.initial.0 as usize].push((EdgeId(i as u32), Orientation::Forward));
            incident[e.terminal.0 as usize].push((EdgeId(i as u32), Orientation::Backward));
        }
        // Incident lists must follow edge declaration order for deterministic
        // tree growth; interleave of the two pushes above already does.
        for list in &mut incident {
            list.sort_by_key(|(e, _)| *e);
        }
        let g = Graph { vertex_names, edges, incident };
        if !g.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertex_count()];
        let mut queue = VecDeque::from([VertexId(0)]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &(e, o) in self.incident(v) {
                let w = self.step_target(e, o);
                if !seen[w.0 as usize] {
                    seen[w.0 as usize] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// First Betti number = rank of the fundamental group.
    pub fn rank(&self) -> usize {
        self.edges.len() + 1 - self.vertex_names.len()
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.0 as usize]
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_count() as u32).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edge_count() as u32).map(EdgeId)
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0 as usize]
    }

    pub fn vertex_id(&self, name: &str) -> Result<VertexId, GraphError> {
        self.vertex_names
            .iter()
            .position(|n| n == name)
            .map(|i| VertexId(i as u32))
            .ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
    }

    pub fn edge_id(&self, name: &str) -> Result<EdgeId, GraphError> {
        self.edges
            .iter()
            .position(|e| e.name == name)
            .map(|i| EdgeId(i as u32))
            .ok_or_else(|| GraphError::UnknownEdge(name.to_string()))
    }

    /// Incident edges of `v` in declaration order, oriented to leave `v`.
    pub fn incident(&self, v: VertexId) -> &[(EdgeId, Orientation)] {
        &self.incident[v.0 as usize]
    }

    /// The vertex a step leaves from.
    pub fn step_source(&self, e: EdgeId, o: Orientation) -> VertexId {
        match o {
            Orientation::Forward => self.edge(e).initial,
            Orientation::Backward => self.edge(e).terminal,
        }
    }

    /// The vertex a step arrives at.
    pub fn step_target(&self, e: EdgeId, o: Orientation) -> VertexId {
        match o {
            Orientation::Forward => self.edge(e).terminal,
            Orientation::Backward => self.edge(e).initial,
        }
    }
}

/// One traversal of one edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeStep {
    pub edge: EdgeId,
    pub orientation: Orientation,
}

impl EdgeStep {
    pub fn forward(edge: EdgeId) -> EdgeStep {
        EdgeStep { edge, orientation: Orientation::Forward }
    }

    pub fn backward(edge: EdgeId) -> EdgeStep {
        EdgeStep { edge, orientation: Orientation::Backward }
    }

    pub fn reversed(self) -> EdgeStep {
        EdgeStep { edge: self.edge, orientation: self.orientation.flip() }
    }

    fn cancels(self, other: EdgeStep) -> bool {
        self.edge == other.edge && self.orientation != other.orientation
    }

    pub fn display(&self, g: &Graph) -> String {
        match self.orientation {
            Orientation::Forward => g.edge(self.edge).name.clone(),
            Orientation::Backward => format!("~{}", g.edge(self.edge).name),
        }
    }
}

/// A composable sequence of edge steps with an explicit start vertex
/// (needed because the empty path must still know where it sits).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgePath {
    start: VertexId,
    steps: Vec<EdgeStep>,
}

impl EdgePath {
    pub fn empty(start: VertexId) -> EdgePath {
        EdgePath { start, steps: Vec::new() }
    }

    /// Validates endpoint compatibility of consecutive steps.
    pub fn new(g: &Graph, start: VertexId, steps: Vec<EdgeStep>) -> Result<EdgePath, GraphError> {
        let mut at = start;
        for (index, s) in steps.iter().enumerate() {
            if g.step_source(s.edge, s.orientation) != at {
                return Err(GraphError::BrokenPath {
                    index,
                    edge: s.display(g),
                    at: g.vertex_name(at).to_string(),
                });
            }
            at = g.step_target(s.edge, s.orientation);
        }
        Ok(EdgePath { start, steps })
    }

    pub fn start(&self) -> VertexId {
        self.start
    }

    pub fn steps(&self) -> &[EdgeStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn end(&self, g: &Graph) -> VertexId {
        self.steps
            .iter()
            .fold(self.start, |_, s| g.step_target(s.edge, s.orientation))
    }

    /// Free reduction: removes adjacent back-and-forth traversals.
    pub fn reduce(&self) -> EdgePath {
        let mut out: Vec<EdgeStep> = Vec::new();
        for &s in &self.steps {
            match out.last() {
                Some(&top) if top.cancels(s) => {
                    out.pop();
                }
                _ => out.push(s),
            }
        }
        EdgePath { start: self.start, steps: out }
    }

    pub fn inverted(&self, g: &Graph) -> EdgePath {
        EdgePath {
            start: self.end(g),
            steps: self.steps.iter().rev().map(|s| s.reversed()).collect(),
        }
    }

    /// Concatenation without reduction; the second path must continue where
    /// this one ends.
    pub fn concat(&self, g: &Graph, other: &EdgePath) -> Result<EdgePath, GraphError> {
        if self.end(g) != other.start {
            return Err(GraphError::NotComposable);
        }
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&other.steps);
        Ok(EdgePath { start: self.start, steps })
    }

    /// Strips mutually inverse first/last step pairs; for a loop this is the
    /// cyclic reduction used by the belonging predicate.
    pub fn cyclically_reduce(&self, g: &Graph) -> EdgePath {
        let mut steps = self.reduce().steps;
        let mut start = self.start;
        while steps.len() >= 2 && steps[0].cancels(steps[steps.len() - 1]) {
            start = g.step_target(steps[0].edge, steps[0].orientation);
            steps.remove(0);
            steps.pop();
        }
        EdgePath { start, steps }
    }

    pub fn display(&self, g: &Graph) -> String {
        self.steps.iter().map(|s| s.display(g)).collect::<Vec<_>>().join(" ")
    }
}

/// A spanning tree rooted at the basepoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTree {
    pub root: VertexId,
    pub tree_edges: BTreeSet<EdgeId>,
}

impl SpanningTree {
    /// Breadth-first tree from the root with edges scanned in declaration
    /// order: the deterministic default used when no tree is declared.
    pub fn bfs_default(g: &Graph, root: VertexId) -> SpanningTree {
        let mut tree_edges = BTreeSet::new();
        let mut seen = vec![false; g.vertex_count()];
        seen[root.0 as usize] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(e, o) in g.incident(v) {
                let w = g.step_target(e, o);
                if !seen[w.0 as usize] {
                    seen[w.0 as usize] = true;
                    tree_edges.insert(e);
                    queue.push_back(w);
                }
            }
        }
        SpanningTree { root, tree_edges }
    }

    pub fn validate(&self, g: &Graph) -> Result<(), GraphError> {
        if self.root.0 as usize >= g.vertex_count() {
            return Err(GraphError::InvalidTree("root is not a vertex".into()));
        }
        if self.tree_edges.len() != g.vertex_count() - 1 {
            return Err(GraphError::InvalidTree(format!(
                "{} tree edges cannot span {} vertices",
                self.tree_edges.len(),
                g.vertex_count()
            )));
        }
        for &e in &self.tree_edges {
            if e.0 as usize >= g.edge_count() {
                return Err(GraphError::InvalidTree("tree edge is not an edge".into()));
            }
        }
        // With exactly |V|−1 edges, reaching every vertex also implies acyclicity.
        let mut seen = vec![false; g.vertex_count()];
        seen[self.root.0 as usize] = true;
        let mut queue = VecDeque::from([self.root]);
        while let Some(v) = queue.pop_front() {
            for &(e, o) in g.incident(v) {
                if !self.tree_edges.contains(&e) {
                    continue;
                }
                let w = g.step_target(e, o);
                if !seen[w.0 as usize] {
                    seen[w.0 as usize] = true;
                    queue.push_back(w);
                }
            }
        }
        if seen.into_iter().all(|s| s) {
            Ok(())
        } else {
            Err(GraphError::InvalidTree("tree does not reach every vertex".into()))
        }
    }

    /// The unique reduced path between two vertices inside the tree.
    pub fn path(&self, g: &Graph, from: VertexId, to: VertexId) -> EdgePath {
        if from == to {
            return EdgePath::empty(from);
        }
        // Breadth-first parent search restricted to tree edges.
        let mut parent: Vec<Option<(VertexId, EdgeStep)>> = vec![None; g.vertex_count()];
        let mut seen = vec![false; g.vertex_count()];
        seen[from.0 as usize] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                break;
            }
            for &(e, o) in g.incident(v) {
                if !self.tree_edges.contains(&e) {
                    continue;
                }
                let w = g.step_target(e, o);
                if !seen[w.0 as usize] {
                    seen[w.0 as usize] = true;
                    parent[w.0 as usize] = Some((v, EdgeStep { edge: e, orientation: o }));
                    queue.push_back(w);
                }
            }
        }
        let mut steps = Vec::new();
        let mut at = to;
        while at != from {
            let (prev, step) =
                parent[at.0 as usize].expect("spanning tree connects every vertex pair");
            steps.push(step);
            at = prev;
        }
        steps.reverse();
        EdgePath { start: from, steps }
    }
}

/// A spanning tree guaranteed to contain the given edge, grown breadth-first
/// from its endpoints with edges in declaration order.  Always possible
/// because looped edges are excluded.
pub fn spanning_tree_containing(g: &Graph, e: EdgeId, root: VertexId) -> SpanningTree {
    let mut tree_edges = BTreeSet::from([e]);
    let mut seen = vec![false; g.vertex_count()];
    let (a, b) = (g.edge(e).initial, g.edge(e).terminal);
    seen[a.0 as usize] = true;
    seen[b.0 as usize] = true;
    let mut queue = VecDeque::from([a, b]);
    while let Some(v) = queue.pop_front() {
        for &(f, o) in g.incident(v) {
            let w = g.step_target(f, o);
            if !seen[w.0 as usize] {
                seen[w.0 as usize] = true;
                tree_edges.insert(f);
                queue.push_back(w);
            }
        }
    }
    SpanningTree { root, tree_edges }
}

/// A generator attached to one non-tree edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub id: GenId,
    pub edge: EdgeId,
    /// Reduced loop at the root representing the generator:
    /// tree-path(root → initial) · edge · tree-path(terminal → root).
    pub loop_repr: EdgePath,
}

/// The coherent labeling of the universal cover over a spanning tree:
/// tree edges lift with trivial deck labels, each non-tree edge carries a
/// fresh generator of the fundamental group.
#[derive(Clone, Debug)]
pub struct CoherentLabeling {
    graph: Arc<Graph>,
    tree: SpanningTree,
    theta: Vec<Option<GenId>>,
    generators: Vec<Generator>,
}

/// Builds the coherent labeling for a validated spanning tree.  Generators
/// are assigned to non-tree edges in declaration order, so generator names
/// are deterministic.
pub fn build_coherent_labeling(
    graph: Arc<Graph>,
    tree: SpanningTree,
) -> Result<CoherentLabeling, GraphError> {
    tree.validate(&graph)?;
    let mut theta = vec![None; graph.edge_count()];
    let mut generators = Vec::new();
    for e in graph.edge_ids() {
        if tree.tree_edges.contains(&e) {
            continue;
        }
        let id = GenId(generators.len() as u32);
        let edge = graph.edge(e);
        let to_initial = tree.path(&graph, tree.root, edge.initial);
        let from_terminal = tree.path(&graph, edge.terminal, tree.root);
        let loop_repr = to_initial
            .concat(&graph, &EdgePath { start: edge.initial, steps: vec![EdgeStep::forward(e)] })
            .and_then(|p| p.concat(&graph, &from_terminal))
            .expect("tree paths compose with the edge by construction")
            .reduce();
        theta[e.0 as usize] = Some(id);
        generators.push(Generator { id, edge: e, loop_repr });
    }
    Ok(CoherentLabeling { graph, tree, theta, generators })
}

impl CoherentLabeling {
    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn tree(&self) -> &SpanningTree {
        &self.tree
    }

    pub fn root(&self) -> VertexId {
        self.tree.root
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn is_tree_edge(&self, e: EdgeId) -> bool {
        self.tree.tree_edges.contains(&e)
    }

    /// The deck word of an edge: identity for tree edges, a single generator
    /// otherwise.
    pub fn theta_word(&self, e: EdgeId) -> Word {
        match self.theta[e.0 as usize] {
            None => Word::identity(),
            Some(id) => Word::generator(id),
        }
    }

    /// Human-readable generator table rows: (generator name, edge name,
    /// loop representative).
    pub fn generator_table(&self) -> Vec<(String, String, String)> {
        self.generators
            .iter()
            .map(|gen| {
                (
                    gen_name(gen.id),
                    self.graph.edge(gen.edge).name.clone(),
                    gen.loop_repr.display(&self.graph),
                )
            })
            .collect()
    }
}

/// A vertex of the universal cover: deck word plus base vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LiftedVertex {
    pub label: Word,
    pub vertex: VertexId,
}

impl LiftedVertex {
    pub fn base(vertex: VertexId) -> LiftedVertex {
        LiftedVertex { label: Word::identity(), vertex }
    }

    /// Left deck action by `g`.
    pub fn deck(&self, g: &Word) -> LiftedVertex {
        LiftedVertex { label: g.concat_reduce(&self.label), vertex: self.vertex }
    }

    pub fn display(&self, g: &Graph) -> String {
        if self.label.is_identity() {
            g.vertex_name(self.vertex).to_string()
        } else {
            format!("{}{}", self.label, g.vertex_name(self.vertex))
        }
    }
}

/// One traversal of a lifted edge `γẼ`: the prefix identifies the lifted
/// edge independent of direction (see the module convention).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LiftedStep {
    pub prefix: Word,
    pub edge: EdgeId,
    pub orientation: Orientation,
}

impl LiftedStep {
    fn cancels(&self, other: &LiftedStep) -> bool {
        self.edge == other.edge
            && self.orientation != other.orientation
            && self.prefix == other.prefix
    }

    pub fn reversed(&self) -> LiftedStep {
        LiftedStep {
            prefix: self.prefix.clone(),
            edge: self.edge,
            orientation: self.orientation.flip(),
        }
    }

    pub fn display(&self, g: &Graph) -> String {
        let mark = if self.orientation == Orientation::Backward { "~" } else { "" };
        if self.prefix.is_identity() {
            format!("{mark}{}", g.edge(self.edge).name)
        } else {
            format!("{}{mark}{}", self.prefix, g.edge(self.edge).name)
        }
    }
}

/// A composable sequence of lifted steps with explicit start and end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedPath {
    start: LiftedVertex,
    steps: Vec<LiftedStep>,
    end: LiftedVertex,
}

impl LiftedPath {
    pub fn empty(at: LiftedVertex) -> LiftedPath {
        LiftedPath { start: at.clone(), steps: Vec::new(), end: at }
    }

    pub fn start(&self) -> &LiftedVertex {
        &self.start
    }

    pub fn end(&self) -> &LiftedVertex {
        &self.end
    }

    pub fn steps(&self) -> &[LiftedStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Removes adjacent traversals of one lifted edge in opposite directions
    /// until none remain.  In a tree this yields the unique geodesic between
    /// the endpoints, which are preserved.
    pub fn contract(&self) -> LiftedPath {
        let mut out: Vec<LiftedStep> = Vec::new();
        for s in &self.steps {
            match out.last() {
                Some(top) if top.cancels(s) => {
                    out.pop();
                }
                _ => out.push(s.clone()),
            }
        }
        LiftedPath { start: self.start.clone(), steps: out, end: self.end.clone() }
    }

    /// The same walk in the opposite direction: steps reversed with flipped
    /// orientations; prefixes stay with their lifted edges.
    pub fn inverted(&self) -> LiftedPath {
        LiftedPath {
            start: self.end.clone(),
            steps: self.steps.iter().rev().map(|s| s.reversed()).collect(),
            end: self.start.clone(),
        }
    }

    /// Concatenation without contraction.
    pub fn concat(&self, other: &LiftedPath) -> Result<LiftedPath, GraphError> {
        if self.end != other.start {
            return Err(GraphError::NotComposable);
        }
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().cloned());
        Ok(LiftedPath { start: self.start.clone(), steps, end: other.end.clone() })
    }

    /// Left deck action on the whole path.
    pub fn deck(&self, g: &Word) -> LiftedPath {
        LiftedPath {
            start: self.start.deck(g),
            steps: self
                .steps
                .iter()
                .map(|s| LiftedStep {
                    prefix: g.concat_reduce(&s.prefix),
                    edge: s.edge,
                    orientation: s.orientation,
                })
                .collect(),
            end: self.end.deck(g),
        }
    }

    pub fn display(&self, g: &Graph) -> String {
        self.steps.iter().map(|s| s.display(g)).collect::<Vec<_>>().join(" ")
    }
}

/// Where a single lifted step arrives, given where it starts; checks the
/// consistency of the stored prefix against the module convention.
pub fn step_through(
    l: &CoherentLabeling,
    at: &LiftedVertex,
    step: &LiftedStep,
) -> Result<LiftedVertex, GraphError> {
    let g = l.graph();
    let edge = g.edge(step.edge);
    let theta = l.theta_word(step.edge);
    match step.orientation {
        Orientation::Forward => {
            if at.vertex != edge.initial || step.prefix != at.label {
                return Err(GraphError::NotComposable);
            }
            Ok(LiftedVertex { label: at.label.concat_reduce(&theta), vertex: edge.terminal })
        }
        Orientation::Backward => {
            let next_label = at.label.concat_reduce(&theta.invert());
            if at.vertex != edge.terminal || step.prefix != next_label {
                return Err(GraphError::NotComposable);
            }
            Ok(LiftedVertex { label: next_label, vertex: edge.initial })
        }
    }
}

/// Lifts an edge path to the universal cover starting at a given lifted
/// vertex, accumulating deck words per the module convention.
pub fn lift_path(
    l: &CoherentLabeling,
    start: LiftedVertex,
    p: &EdgePath,
) -> Result<LiftedPath, GraphError> {
    let g = l.graph();
    if p.start() != start.vertex {
        return Err(GraphError::PathStartMismatch {
            expected: g.vertex_name(p.start()).to_string(),
            found: g.vertex_name(start.vertex).to_string(),
        });
    }
    let mut at = start.clone();
    let mut steps = Vec::with_capacity(p.len());
    for s in p.steps() {
        let theta = l.theta_word(s.edge);
        let prefix = match s.orientation {
            Orientation::Forward => at.label.clone(),
            Orientation::Backward => at.label.concat_reduce(&theta.invert()),
        };
        let step = LiftedStep { prefix, edge: s.edge, orientation: s.orientation };
        at = step_through(l, &at, &step)?;
        steps.push(step);
    }
    Ok(LiftedPath { start, steps, end: at })
}

/// The canonical path from the base root to a labeled vertex: spell the
/// label through generator loop representatives, then walk the tree to the
/// vertex.  Makes geodesics total without searching the infinite cover.
fn canonical_path(l: &CoherentLabeling, x: &LiftedVertex) -> LiftedPath {
    let g = l.graph();
    let mut route = EdgePath::empty(l.root());
    for letter in x.label.letters() {
        let gen = &l.generators()[letter.gen.0 as usize];
        let piece = match letter.sign {
            crate::word::Sign::Plus => gen.loop_repr.clone(),
            crate::word::Sign::Minus => gen.loop_repr.inverted(g),
        };
        route = route.concat(g, &piece).expect("generator loops start and end at the root");
    }
    let tail = l.tree().path(g, l.root(), x.vertex);
    route = route.concat(g, &tail).expect("tree path starts at the root");
    let lifted = lift_path(l, LiftedVertex::base(l.root()), &route)
        .expect("canonical route starts at the base root");
    debug_assert_eq!(lifted.end(), x, "canonical path must arrive at its target");
    lifted
}

/// The unique geodesic between two lifted vertices.
pub fn geodesic(l: &CoherentLabeling, x: &LiftedVertex, y: &LiftedVertex) -> LiftedPath {
    let to_x = canonical_path(l, x);
    let to_y = canonical_path(l, y);
    to_x.inverted().concat(&to_y).expect("both canonical paths touch the base root").contract()
}

/// Reads the fundamental-group word of a loop at the root off the labeling.
pub fn loop_word(l: &CoherentLabeling, p: &EdgePath) -> Result<Word, GraphError> {
    if p.start() != l.root() || p.end(l.graph()) != l.root() {
        return Err(GraphError::NotLoopAtRoot);
    }
    Ok(lift_path(l, LiftedVertex::base(l.root()), p)?.end().label.clone())
}

/// The reduced loop at the root representing a word, built from generator
/// loop representatives.  Inverse of [`loop_word`] on reduced loops.
pub fn word_to_loop(l: &CoherentLabeling, w: &Word) -> EdgePath {
    let g = l.graph();
    let mut route = EdgePath::empty(l.root());
    for letter in w.letters() {
        let gen = &l.generators()[letter.gen.0 as usize];
        let piece = match letter.sign {
            crate::word::Sign::Plus => gen.loop_repr.clone(),
            crate::word::Sign::Minus => gen.loop_repr.inverted(g),
        };
        route = route.concat(g, &piece).expect("generator loops start and end at the root");
    }
    route.reduce()
}
