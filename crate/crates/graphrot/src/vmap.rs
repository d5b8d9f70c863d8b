//! Vertex maps and their lifts to the labeled universal cover.
//!
//! Purpose: a vertex map permutes the vertices of a graph, dragging each
//! vertex along a declared *track* path; edges follow by tightening, so the
//! whole map is homotopic to the identity.  Because of that, its lifts
//! commute with the deck action, and the dynamics of a lift are captured by
//! finitely many words: the track words `t(V)` and the per-edge images.
//!
//! Why this design:
//! - tracks are the input of record; edge images are always *computed* as
//!   `track(V₁)⁻¹ · E · track(V₂)` reduced, and any declared images are
//!   verified against that computation rather than trusted;
//! - the chosen lift sends `(γ, V)` to `(γ·t(V), σ(V))`; other lifts differ
//!   by a deck word composed on the left, carried here as `lift_prefix`, so
//!   changing the lift never rewrites the track words;
//! - iterated edge images are built by substitution on lifted paths, with a
//!   hard step cap because their length grows geometrically.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{
    build_coherent_labeling, lift_path, CoherentLabeling, EdgeId, EdgePath, EdgeStep, Graph,
    GraphError, LiftedPath, LiftedVertex, Orientation, SpanningTree, VertexId,
};
use crate::word::{normalize_rot, RotationElement, Word};

/// Default bound on the number of lifted steps any single edge-iteration
/// call may produce.
pub const DEFAULT_STEP_CAP: u64 = 1_000_000;

/// Errors from vertex-map validation and iteration.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("expected one track per vertex ({expected}), found {found}")]
    TrackCount { expected: usize, found: usize },
    #[error("track of vertex {vertex} starts at {found} instead")]
    TrackStart { vertex: String, found: String },
    #[error("vertex images are not distinct: {first} and {second} both map to {target}")]
    SigmaNotInjective { first: String, second: String, target: String },
    #[error(
        "declared image of {edge} does not match the track construction: \
         declared {declared}, computed {computed}"
    )]
    ImageMismatch { edge: String, declared: String, computed: String },
    #[error("declared image of {edge} is broken: {source}")]
    ImageInvalid { edge: String, source: GraphError },
    #[error("edge iteration exceeded the step cap of {0} steps")]
    StepCapExceeded(u64),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// The combinatorial input of a vertex map: one track per vertex, plus any
/// declared edge images awaiting verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexMap {
    tracks: Vec<EdgePath>,
    declared_images: BTreeMap<EdgeId, EdgePath>,
}

impl VertexMap {
    /// Builds a map from per-vertex tracks, given in vertex declaration
    /// order; each track must start at its own vertex.  (The permutation is
    /// derived from the track endpoints and checked in [`validate_map`].)
    pub fn new(g: &Graph, tracks: Vec<EdgePath>) -> Result<VertexMap, MapError> {
        if tracks.len() != g.vertex_count() {
            return Err(MapError::TrackCount { expected: g.vertex_count(), found: tracks.len() });
        }
        for (i, track) in tracks.iter().enumerate() {
            if track.start() != VertexId(i as u32) {
                return Err(MapError::TrackStart {
                    vertex: g.vertex_name(VertexId(i as u32)).to_string(),
                    found: g.vertex_name(track.start()).to_string(),
                });
            }
        }
        Ok(VertexMap { tracks, declared_images: BTreeMap::new() })
    }

    /// Declares an expected image path for an edge; verified, not trusted.
    pub fn declare_image(&mut self, e: EdgeId, image: EdgePath) {
        self.declared_images.insert(e, image);
    }

    pub fn tracks(&self) -> &[EdgePath] {
        &self.tracks
    }

    pub fn declared_images(&self) -> &BTreeMap<EdgeId, EdgePath> {
        &self.declared_images
    }
}

/// How [`LiftedVertexMap::iterate_edge_lift`] returns an iterated image.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IterationMode {
    /// The raw substitution result: pieces meet only at junctions, one piece
    /// per step of the previous iterate, each internally reduced.
    Branchwise,
    /// Contracted to the geodesic after every substitution round.
    Contracted,
}

/// A validated vertex map together with the labeling it is lifted through.
#[derive(Clone, Debug)]
pub struct LiftedVertexMap {
    labeling: CoherentLabeling,
    source: VertexMap,
    sigma: Vec<VertexId>,
    /// Track words: lifting `track(V)` from `(1, V)` ends at `(t(V), σ(V))`.
    t_words: Vec<Word>,
    /// Computed reduced edge images.
    images: Vec<EdgePath>,
    /// Deck word distinguishing the working lift from the track lift; the
    /// track lift itself carries the identity.
    lift_prefix: Word,
    step_cap: u64,
}

/// Validates a vertex map against a labeling and computes its lift data:
/// the vertex permutation, the track words, and the reduced edge images
/// (checking any declared images against the computed ones).
pub fn validate_map(
    labeling: CoherentLabeling,
    map: VertexMap,
) -> Result<LiftedVertexMap, MapError> {
    let g = labeling.graph().clone();
    if map.tracks.len() != g.vertex_count() {
        return Err(MapError::TrackCount {
            expected: g.vertex_count(),
            found: map.tracks.len(),
        });
    }

    // The permutation is the track endpoints; injective over a finite vertex
    // set means bijective.
    let sigma: Vec<VertexId> = map.tracks.iter().map(|track| track.end(&g)).collect();
    let mut seen: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    for (i, &target) in sigma.iter().enumerate() {
        let v = VertexId(i as u32);
        if let Some(&prev) = seen.get(&target) {
            return Err(MapError::SigmaNotInjective {
                first: g.vertex_name(prev).to_string(),
                second: g.vertex_name(v).to_string(),
                target: g.vertex_name(target).to_string(),
            });
        }
        seen.insert(target, v);
    }

    let t_words: Vec<Word> = map
        .tracks
        .iter()
        .map(|track| {
            lift_path(&labeling, LiftedVertex::base(track.start()), track)
                .expect("tracks are validated paths")
                .end()
                .label
                .clone()
        })
        .collect();

    let mut images = Vec::with_capacity(g.edge_count());
    for e in g.edge_ids() {
        let edge = g.edge(e);
        let single = EdgePath::new(&g, edge.initial, vec![EdgeStep::forward(e)])
            .expect("an edge is a path");
        let computed = map.tracks[edge.initial.0 as usize]
            .inverted(&g)
            .concat(&g, &single)
            .and_then(|p| p.concat(&g, &map.tracks[edge.terminal.0 as usize]))
            .expect("tracks start at the edge endpoints")
            .reduce();
        // A looped-edge-free graph and an injective permutation leave the
        // image endpoints distinct, so the reduced image is never empty.
        debug_assert!(!computed.is_empty(), "edge images cannot collapse");
        if let Some(declared) = map.declared_images.get(&e) {
            let declared = declared.reduce();
            if declared != computed {
                return Err(MapError::ImageMismatch {
                    edge: edge.name.clone(),
                    declared: declared.display(&g),
                    computed: computed.display(&g),
                });
            }
        }
        images.push(computed);
    }

    Ok(LiftedVertexMap {
        labeling,
        source: map,
        sigma,
        t_words,
        images,
        lift_prefix: Word::identity(),
        step_cap: DEFAULT_STEP_CAP,
    })
}

impl LiftedVertexMap {
    pub fn labeling(&self) -> &CoherentLabeling {
        &self.labeling
    }

    pub fn graph(&self) -> &Graph {
        self.labeling.graph()
    }

    pub fn source(&self) -> &VertexMap {
        &self.source
    }

    pub fn sigma(&self, v: VertexId) -> VertexId {
        self.sigma[v.0 as usize]
    }

    pub fn track(&self, v: VertexId) -> &EdgePath {
        &self.source.tracks[v.0 as usize]
    }

    pub fn t_word(&self, v: VertexId) -> &Word {
        &self.t_words[v.0 as usize]
    }

    /// The reduced image path of an edge: `track(V₁)⁻¹ · E · track(V₂)`.
    pub fn edge_image(&self, e: EdgeId) -> &EdgePath {
        &self.images[e.0 as usize]
    }

    pub fn lift_prefix(&self) -> &Word {
        &self.lift_prefix
    }

    /// Replaces the step cap used by [`Self::iterate_edge_lift`].
    pub fn with_step_cap(mut self, cap: u64) -> LiftedVertexMap {
        self.step_cap = cap;
        self
    }

    /// The step cap applied to every substitution round.
    pub fn step_cap(&self) -> u64 {
        self.step_cap
    }

    /// The working lift composed with a further deck word on the left.
    /// Because vertex maps are homotopic to the identity, lifts commute with
    /// the deck action and prefixes compose by plain multiplication.
    pub fn with_changed_lift(&self, gamma: &Word) -> LiftedVertexMap {
        let mut out = self.clone();
        out.lift_prefix = gamma.concat_reduce(&self.lift_prefix);
        out
    }

    /// The period of a vertex under the vertex permutation.
    pub fn vertex_period(&self, v: VertexId) -> u64 {
        let mut at = self.sigma(v);
        let mut n = 1;
        while at != v {
            at = self.sigma(at);
            n += 1;
        }
        n
    }

    /// The orbit of a vertex under the permutation, starting at the vertex.
    pub fn vertex_orbit(&self, v: VertexId) -> Vec<VertexId> {
        let mut orbit = vec![v];
        let mut at = self.sigma(v);
        while at != v {
            orbit.push(at);
            at = self.sigma(at);
        }
        orbit
    }

    /// One application of the working lift to a cover vertex:
    /// `(γ, V) ↦ (prefix · γ · t(V), σ(V))`.
    pub fn apply_lift_vertex(&self, x: &LiftedVertex) -> LiftedVertex {
        LiftedVertex {
            label: self
                .lift_prefix
                .concat_reduce(&x.label)
                .concat_reduce(self.t_word(x.vertex)),
            vertex: self.sigma(x.vertex),
        }
    }

    /// The deck word `w` with `f̃ⁿ(Ṽ) = w·Ṽ` for the working lift, where `n`
    /// is the vertex's period; returns `(w, n)`.
    pub fn rotation_word(&self, v: VertexId) -> (Word, u64) {
        let n = self.vertex_period(v);
        let mut at = LiftedVertex::base(v);
        for _ in 0..n {
            at = self.apply_lift_vertex(&at);
        }
        debug_assert_eq!(at.vertex, v);
        (at.label, n)
    }

    /// The rotation element of a vertex under the working lift: `w^{1/n}`.
    pub fn vertex_rotation(&self, v: VertexId) -> RotationElement {
        let (w, n) = self.rotation_word(v);
        normalize_rot(&w, n)
    }

    /// The `n`-fold image of the chosen lifted edge `Ẽ` (lift of `e` from
    /// `(1, V₁)`) under the working lift, produced by repeated substitution.
    /// `n = 0` returns `Ẽ` itself.  Fails once a substitution round exceeds
    /// the step cap.
    pub fn iterate_edge_lift(
        &self,
        e: EdgeId,
        n: u64,
        mode: IterationMode,
    ) -> Result<LiftedPath, MapError> {
        let g = self.labeling.graph();
        let v1 = g.edge(e).initial;
        let single =
            EdgePath::new(g, v1, vec![EdgeStep::forward(e)]).expect("an edge is a path");
        let mut current = lift_path(&self.labeling, LiftedVertex::base(v1), &single)
            .expect("the chosen lifted edge exists");
        for _ in 0..n {
            current = self.substitute(&current)?;
            if mode == IterationMode::Contracted {
                current = current.contract();
            }
        }
        Ok(current)
    }

    /// Applies the working lift to a whole lifted path: each step `γF̃` is
    /// replaced by the lift of `image(F)` starting at the image of the
    /// step's start, inverted for backward steps.
    fn substitute(&self, p: &LiftedPath) -> Result<LiftedPath, MapError> {
        let g = self.labeling.graph();
        let mut out = LiftedPath::empty(self.apply_lift_vertex(p.start()));
        let mut produced = 0u64;
        for step in p.steps() {
            let source = LiftedVertex {
                label: step.prefix.clone(),
                vertex: g.edge(step.edge).initial,
            };
            let piece = lift_path(
                &self.labeling,
                self.apply_lift_vertex(&source),
                self.edge_image(step.edge),
            )
            .expect("computed images are validated paths");
            let piece = match step.orientation {
                Orientation::Forward => piece,
                Orientation::Backward => piece.inverted(),
            };
            produced += piece.len() as u64;
            if produced > self.step_cap {
                return Err(MapError::StepCapExceeded(self.step_cap));
            }
            out = out.concat(&piece).expect("substituted pieces chain junction to junction");
        }
        Ok(out)
    }

    /// The same map lifted through a different spanning tree (same graph,
    /// same basepoint).  Resets the lift prefix: deck words of the old
    /// labeling are meaningless in the new one.
    pub fn relabel(&self, tree: SpanningTree) -> Result<LiftedVertexMap, MapError> {
        let labeling = build_coherent_labeling(self.labeling.graph().clone(), tree)?;
        validate_map(labeling, self.source.clone())
    }
}
