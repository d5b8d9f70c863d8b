//! Shared fixtures for unit tests: small graphs, labelings, and vertex maps
//! whose invariants were worked out by hand and are frozen in the test
//! suites that use them.

// Fixtures are shared across module test suites; not every suite uses all.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::graph::{
    build_coherent_labeling, CoherentLabeling, EdgePath, EdgeStep, Graph, Orientation,
    SpanningTree,
};
use crate::vmap::{validate_map, LiftedVertexMap, VertexMap};

pub(crate) fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

/// Parses `["E2", "~E3", "E1"]`-style step lists into a validated path.
pub(crate) fn path(g: &Graph, start: &str, spec: &[&str]) -> EdgePath {
    let steps = spec
        .iter()
        .map(|s| {
            let (name, orientation) = match s.strip_prefix('~') {
                Some(rest) => (rest, Orientation::Backward),
                None => (*s, Orientation::Forward),
            };
            EdgeStep { edge: g.edge_id(name).unwrap(), orientation }
        })
        .collect();
    EdgePath::new(g, g.vertex_id(start).unwrap(), steps).unwrap()
}

/// Five-vertex house graph: a square with a chord, rank two.
pub(crate) fn house_graph() -> Arc<Graph> {
    Arc::new(
        Graph::new(
            names(&["V1", "V2", "V3", "V4", "V5"]),
            vec![
                ("E1".into(), "V5".into(), "V1".into()),
                ("E2".into(), "V1".into(), "V2".into()),
                ("E3".into(), "V5".into(), "V2".into()),
                ("E4".into(), "V2".into(), "V3".into()),
                ("E5".into(), "V3".into(), "V4".into()),
                ("E6".into(), "V4".into(), "V5".into()),
            ],
        )
        .unwrap(),
    )
}

/// House labeling over the tree {E1, E3, E4, E5} rooted at V1:
/// θ(E2) = a with loop E2·E3⁻¹·E1, θ(E6) = b with loop E1⁻¹·E3·E4·E5·E6·E1.
pub(crate) fn house_labeling() -> CoherentLabeling {
    let g = house_graph();
    let root = g.vertex_id("V1").unwrap();
    let tree_edges: BTreeSet<_> =
        ["E1", "E3", "E4", "E5"].iter().map(|n| g.edge_id(n).unwrap()).collect();
    build_coherent_labeling(g, SpanningTree { root, tree_edges }).unwrap()
}

/// Three-vertex graph with a doubled edge pair between V2 and V3, rank one.
pub(crate) fn three_vertex_graph() -> Arc<Graph> {
    Arc::new(
        Graph::new(
            names(&["V1", "V2", "V3"]),
            vec![
                ("E1".into(), "V1".into(), "V2".into()),
                ("E2".into(), "V2".into(), "V3".into()),
                ("E3".into(), "V3".into(), "V2".into()),
            ],
        )
        .unwrap(),
    )
}

/// Default labeling of the three-vertex graph (tree {E1, E2} rooted at V1):
/// θ(E3) = a with loop E1·E2·E3·E1⁻¹.
pub(crate) fn three_vertex_labeling() -> CoherentLabeling {
    let g = three_vertex_graph();
    let root = g.vertex_id("V1").unwrap();
    let tree = SpanningTree::bfs_default(&g, root);
    build_coherent_labeling(g, tree).unwrap()
}

/// Two-vertex circle: E1 and E2 back to back, rank one.
pub(crate) fn circle_graph() -> Arc<Graph> {
    Arc::new(
        Graph::new(
            names(&["V1", "V2"]),
            vec![
                ("E1".into(), "V1".into(), "V2".into()),
                ("E2".into(), "V2".into(), "V1".into()),
            ],
        )
        .unwrap(),
    )
}

/// Circle labeling over the tree {E1} rooted at V1: θ(E2) = a.
pub(crate) fn circle_labeling() -> CoherentLabeling {
    let g = circle_graph();
    let root = g.vertex_id("V1").unwrap();
    let tree = SpanningTree::bfs_default(&g, root);
    build_coherent_labeling(g, tree).unwrap()
}

/// Theta graph: two vertices joined by three parallel edges, rank two.
pub(crate) fn theta_graph() -> Arc<Graph> {
    Arc::new(
        Graph::new(
            names(&["V1", "V2"]),
            vec![
                ("E1".into(), "V1".into(), "V2".into()),
                ("E2".into(), "V1".into(), "V2".into()),
                ("E3".into(), "V1".into(), "V2".into()),
            ],
        )
        .unwrap(),
    )
}

/// Theta labeling over a chosen tree edge rooted at V1.
pub(crate) fn theta_labeling(tree_edge: &str) -> CoherentLabeling {
    let g = theta_graph();
    let root = g.vertex_id("V1").unwrap();
    let tree_edges: BTreeSet<_> = [g.edge_id(tree_edge).unwrap()].into_iter().collect();
    build_coherent_labeling(g, SpanningTree { root, tree_edges }).unwrap()
}

// --- vertex-map fixtures ----------------------------------------------------

/// Period-five rotation of the house graph: every vertex slides one
/// step around the outer cycle.
pub(crate) fn house_map() -> LiftedVertexMap {
    let l = house_labeling();
    let g = l.graph().clone();
    let tracks = vec![
        path(&g, "V1", &["E2"]),
        path(&g, "V2", &["E4"]),
        path(&g, "V3", &["E5"]),
        path(&g, "V4", &["E6"]),
        path(&g, "V5", &["E1"]),
    ];
    validate_map(l, VertexMap::new(&g, tracks).unwrap()).unwrap()
}

/// House map with the V1-track rerouted through the chord.  The vertices
/// still form a single period-five orbit, but the longer track makes the
/// per-orbit words differ between stations: ρ(V1) = (a²b)^{1/5} while
/// ρ(V2) = (ba²)^{1/5}, and every edge belongs to a²b.
pub(crate) fn house_oneorbit_map() -> LiftedVertexMap {
    let l = house_labeling();
    let g = l.graph().clone();
    let tracks = vec![
        path(&g, "V1", &["E2", "~E3", "E1", "E2"]),
        path(&g, "V2", &["E4"]),
        path(&g, "V3", &["E5"]),
        path(&g, "V4", &["E6"]),
        path(&g, "V5", &["E1"]),
    ];
    validate_map(l, VertexMap::new(&g, tracks).unwrap()).unwrap()
}

/// Involution of the three-vertex graph swapping the outer vertices.
pub(crate) fn three_vertex_map() -> LiftedVertexMap {
    let l = three_vertex_labeling();
    let g = l.graph().clone();
    let tracks = vec![
        path(&g, "V1", &["E1", "E2"]),
        EdgePath::empty(g.vertex_id("V2").unwrap()),
        path(&g, "V3", &["E3", "~E1"]),
    ];
    validate_map(l, VertexMap::new(&g, tracks).unwrap()).unwrap()
}

/// Identity permutation on the circle with V2 swept once around.
pub(crate) fn circle_map() -> LiftedVertexMap {
    let l = circle_labeling();
    let g = l.graph().clone();
    let tracks = vec![
        EdgePath::empty(g.vertex_id("V1").unwrap()),
        path(&g, "V2", &["E2", "E1"]),
    ];
    validate_map(l, VertexMap::new(&g, tracks).unwrap()).unwrap()
}

/// Theta map swapping the two vertices.  Over the tree {E1}: both endpoint
/// words of E1 equal b⁻¹a⁻¹, while the E1-analysis of the edge E2 (tree
/// {E2}) has distinct endpoint words ab⁻¹a and b⁻¹a².
pub(crate) fn theta_map() -> LiftedVertexMap {
    let l = theta_labeling("E1");
    let g = l.graph().clone();
    let tracks = vec![
        path(&g, "V1", &["E1"]),
        path(&g, "V2", &["~E3", "E1", "~E2"]),
    ];
    validate_map(l, VertexMap::new(&g, tracks).unwrap()).unwrap()
}

/// Theta map fixing both vertices with w1 = a⁻¹, w2 = ab⁻¹a: both lifted
/// endpoint paths of Ẽ1 begin with Ẽ1.
pub(crate) fn theta_both_begin_map() -> LiftedVertexMap {
    let l = theta_labeling("E1");
    let g = l.graph().clone();
    let tracks = vec![
        path(&g, "V1", &["E1", "~E2"]),
        path(&g, "V2", &["~E1", "E2", "~E3", "E2"]),
    ];
    validate_map(l, VertexMap::new(&g, tracks).unwrap()).unwrap()
}

/// Theta map fixing both vertices with w1 = a⁻¹, w2 = b⁻¹a²: the words
/// share no common root, exactly one endpoint path begins with Ẽ1.
pub(crate) fn theta_distinct_roots_map() -> LiftedVertexMap {
    let l = theta_labeling("E1");
    let g = l.graph().clone();
    let tracks = vec![
        path(&g, "V1", &["E1", "~E2"]),
        path(&g, "V2", &["~E3", "E2", "~E1", "E2"]),
    ];
    validate_map(l, VertexMap::new(&g, tracks).unwrap()).unwrap()
}
