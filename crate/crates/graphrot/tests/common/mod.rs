//! Shared helpers for the integration suites: fixture paths and seeded
//! random graphs and vertex maps built through the public construction API.

#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use graphrot::graph::{
    build_coherent_labeling, EdgePath, EdgeStep, Graph, SpanningTree, VertexId,
};
use graphrot::vmap::{validate_map, LiftedVertexMap, VertexMap};
use rand::prelude::*;

/// Absolute path of a file in the fixtures directory.
pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// A random connected multigraph without looped edges: a random spanning
/// chain plus random chords, every edge randomly oriented.
pub fn random_graph(rng: &mut impl Rng, max_vertices: usize, max_edges: usize) -> Arc<Graph> {
    let nv = rng.gen_range(2..=max_vertices);
    let mut edges = Vec::new();
    for i in 1..nv {
        let j = rng.gen_range(0..i);
        let (from, to) = if rng.gen() { (j, i) } else { (i, j) };
        edges.push((
            format!("E{}", edges.len() + 1),
            format!("V{}", from + 1),
            format!("V{}", to + 1),
        ));
    }
    let extra = rng.gen_range(0..=max_edges.saturating_sub(nv - 1));
    for _ in 0..extra {
        let a = rng.gen_range(0..nv);
        let b = loop {
            let b = rng.gen_range(0..nv);
            if b != a {
                break b;
            }
        };
        edges.push((format!("E{}", edges.len() + 1), format!("V{}", a + 1), format!("V{}", b + 1)));
    }
    let names = (1..=nv).map(|i| format!("V{i}")).collect();
    Arc::new(Graph::new(names, edges).expect("chain plus chords is connected and loop-free"))
}

/// A uniformly random non-backtracking-free walk of the given length.
pub fn random_walk(g: &Graph, rng: &mut impl Rng, from: VertexId, len: usize) -> EdgePath {
    let mut steps = Vec::new();
    let mut at = from;
    for _ in 0..len {
        let choices: Vec<(EdgeStep, VertexId)> = g
            .edge_ids()
            .flat_map(|e| {
                let edge = g.edge(e);
                let mut out = Vec::new();
                if edge.initial == at {
                    out.push((EdgeStep::forward(e), edge.terminal));
                }
                if edge.terminal == at {
                    out.push((EdgeStep::backward(e), edge.initial));
                }
                out
            })
            .collect();
        let (step, to) = choices[rng.gen_range(0..choices.len())];
        steps.push(step);
        at = to;
    }
    EdgePath::new(g, from, steps).expect("walk steps are consecutive by construction")
}

/// A random valid vertex map on a random graph: tracks are short random
/// walks, rejection-sampled until the endpoint permutation is injective.
pub fn random_map(
    rng: &mut impl Rng,
    max_vertices: usize,
    max_edges: usize,
    max_track_len: usize,
) -> LiftedVertexMap {
    for _ in 0..200 {
        let g = random_graph(rng, max_vertices, max_edges);
        let root = g.vertex_ids().next().expect("graphs have vertices");
        let labeling = build_coherent_labeling(g.clone(), SpanningTree::bfs_default(&g, root))
            .expect("the default tree is valid");
        'attempt: for _ in 0..25 {
            let mut tracks = Vec::new();
            let mut targets = std::collections::BTreeSet::new();
            for v in g.vertex_ids() {
                let len = rng.gen_range(0..=max_track_len);
                let track = random_walk(&g, rng, v, len);
                if !targets.insert(track.end(&g)) {
                    continue 'attempt;
                }
                tracks.push(track);
            }
            let vm = VertexMap::new(&g, tracks).expect("tracks start at their vertices");
            if let Ok(lm) = validate_map(labeling.clone(), vm) {
                return lm;
            }
        }
    }
    unreachable!("rejection sampling found no valid map in 200 graphs")
}
