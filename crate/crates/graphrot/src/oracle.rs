//! Exact periodic-point enumeration for the piecewise-linear model map,
//! serving as the independent ground truth for every detected or predicted
//! rotation element.
//!
//! The model map sends each edge affinely across its reduced image path, so
//! the `n`-th iterate restricted to one edge decomposes into finitely many
//! affine *branches*: subintervals of `[0, 1]` that each map onto a single
//! lifted edge `γF̃` of the cover.  A branch whose target projects back onto
//! the starting edge pins down a periodic point by solving the affine
//! fixed-point equation exactly, and the deck decoration `γ` of the target
//! is the rotation word of that point.
//!
//! On top of the raw enumeration ([`branch_decomposition`],
//! [`enumerate_periodic`]) sit three cross-checks:
//!
//! - [`verify_predictions`] confirms each guaranteed family member against
//!   an enumerated record at a compatible period,
//! - [`s_closure_check`] closes enumerated elements under the interleaved
//!   power semigroup and confirms the closure, optionally seeded with an
//!   endpoint rotation pair when the iterated image begins (or ends) with
//!   the edge itself, and
//! - [`one_orbit_analysis`] runs the whole pipeline on a map with a single
//!   vertex orbit, starting from a positive-slope interior fixed point.
//!
//! All coordinates are exact rationals; the piecewise-linear model makes
//! every fixed point rational, so no tolerance policy exists anywhere.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::rational::BigRational;
use num::{BigInt, One, Zero};
use thiserror::Error;

use crate::detector::{
    analysis_map, belongs, classify_edge, predicted_elements, DetectorError, EdgeClassification,
    Prediction,
};
use crate::graph::{
    lift_path, EdgeId, Graph, LiftedStep, LiftedVertex, Orientation, VertexId,
};
use crate::vmap::{LiftedVertexMap, MapError};
use crate::word::{
    conjugacy_equal, generate_s_with_denominators, normalize_rot, RotationElement, Word,
};

/// Errors from the enumeration layer.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    /// A stated hypothesis of the requested analysis does not hold for this
    /// map; the message names the failed condition.
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Detector(#[from] DetectorError),
}

fn big(x: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// One affine piece of the `n`-th iterate restricted to an edge: the
/// subinterval of `[0, 1]` that maps onto the lifted edge of `target`
/// (traversed per the target's orientation).  `itinerary` records the piece
/// index chosen at each of the `n` refinement rounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    /// Endpoints `(a, b)` with `0 ≤ a < b ≤ 1`; the branches of one
    /// decomposition tile `[0, 1]` in order with disjoint interiors.
    pub interval: (BigRational, BigRational),
    /// The lifted edge the branch maps onto — the affine chart is onto by
    /// construction — including the traversal direction.
    pub target: LiftedStep,
    /// Piece indices, one per refinement round.
    pub itinerary: Vec<usize>,
}

/// Where a periodic point sits inside its edge.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Location {
    /// A single coordinate strictly between the endpoints.
    Interior(BigRational),
    /// A whole subinterval of fixed points: the branch has slope exactly
    /// `+1`, so every point of it is periodic with the same rotation word.
    DegenerateInterval(BigRational, BigRational),
    /// The fixed coordinate is an endpoint of the edge.
    VertexEnd {
        position: BigRational,
        vertex: VertexId,
    },
}

impl Location {
    /// Human-readable coordinate: an exact fraction, an interval pair, or
    /// the vertex name.
    pub fn display(&self, g: &Graph) -> String {
        match self {
            Location::Interior(t) => format!("{t}"),
            Location::DegenerateInterval(a, b) => format!("[{a}, {b}]"),
            Location::VertexEnd { position, vertex } => {
                format!("{} (vertex {})", position, g.vertex_name(*vertex))
            }
        }
    }

    /// Whether the location lies off the edge's endpoints (single interior
    /// coordinates and degenerate intervals, which contain interior points).
    pub fn is_interior(&self) -> bool {
        !matches!(self, Location::VertexEnd { .. })
    }
}

/// A periodic point of the model map, solved exactly from one branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicPointRecord {
    pub edge: EdgeId,
    pub location: Location,
    pub period: u64,
    /// The deck word `γ` carried by the branch target: the `period`-fold
    /// lift translates the fixed lift of this point by `γ`.
    pub rotation_word: Word,
    /// `rotation_word^{1/period}`, normalized.
    pub element: RotationElement,
    pub itinerary: Vec<usize>,
}

/// The affine branches of the `n`-th iterate restricted to `e`, in
/// left-to-right order.  Runs its own refinement recursion — one round per
/// iterate, each parent interval split into equal parts, the part order
/// reversed through backward parents by inverting the lifted piece — so the
/// targets can be compared step-for-step against the independently computed
/// iterated edge lift.  Each round's total step production is charged
/// against the map's step cap.
pub fn branch_decomposition(
    lm: &LiftedVertexMap,
    e: EdgeId,
    n: u64,
) -> Result<Vec<Branch>, OracleError> {
    assert!(n >= 1, "at least one iterate is required");
    let g = lm.graph();
    // A virtual parent covering the whole edge: refining it once yields the
    // branches of the first iterate.
    let seed = Branch {
        interval: (BigRational::zero(), BigRational::one()),
        target: LiftedStep {
            prefix: Word::identity(),
            edge: e,
            orientation: Orientation::Forward,
        },
        itinerary: Vec::new(),
    };
    let mut branches = vec![seed];
    for _ in 0..n {
        let mut produced = 0u64;
        let mut next = Vec::new();
        for parent in &branches {
            let source = LiftedVertex {
                label: parent.target.prefix.clone(),
                vertex: g.edge(parent.target.edge).initial,
            };
            let piece = lift_path(
                lm.labeling(),
                lm.apply_lift_vertex(&source),
                lm.edge_image(parent.target.edge),
            )
            .expect("computed images are validated paths");
            let piece = match parent.target.orientation {
                Orientation::Forward => piece,
                Orientation::Backward => piece.inverted(),
            };
            // Vertex images of a valid map are distinct, so no edge image
            // is empty and every parent interval genuinely refines.
            assert!(!piece.is_empty(), "edge images of validated maps are nonempty");
            produced += piece.len() as u64;
            if produced > lm.step_cap() {
                return Err(OracleError::Map(MapError::StepCapExceeded(lm.step_cap())));
            }
            let (a, b) = &parent.interval;
            let width = (b - a) / big(piece.len() as u64);
            for (j, step) in piece.steps().iter().enumerate() {
                let lo = a + &width * big(j as u64);
                let hi = a + &width * big(j as u64 + 1);
                let mut itinerary = parent.itinerary.clone();
                itinerary.push(j);
                next.push(Branch {
                    interval: (lo, hi),
                    target: step.clone(),
                    itinerary,
                });
            }
        }
        branches = next;
    }
    Ok(branches)
}

/// Every periodic point of the `n`-th iterate on `e`, solved exactly from
/// the branches whose target projects back onto `e`:
///
/// - a forward branch of width `< 1` fixes the unique `t` with
///   `(t − a)/(b − a) = t`, which always lands in `[a, b]` and touches an
///   edge endpoint exactly when the branch does,
/// - a forward branch of width `1` (slope exactly `+1`) fixes every point,
///   reported as one degenerate-interval record, and
/// - a backward branch fixes the unique `t` with `(b − t)/(b − a) = t`,
///   always strictly interior.
///
/// Records are returned left to right, deduplicated by (location, word).
pub fn enumerate_periodic(
    lm: &LiftedVertexMap,
    e: EdgeId,
    n: u64,
) -> Result<Vec<PeriodicPointRecord>, OracleError> {
    let g = lm.graph();
    let one = BigRational::one();
    let mut seen: BTreeSet<(Location, Word)> = BTreeSet::new();
    let mut out = Vec::new();
    for branch in branch_decomposition(lm, e, n)? {
        if branch.target.edge != e {
            continue;
        }
        let (a, b) = &branch.interval;
        let width = b - a;
        let location = match branch.target.orientation {
            Orientation::Forward if width == one => {
                Location::DegenerateInterval(BigRational::zero(), one.clone())
            }
            Orientation::Forward => {
                let t = a / (&one - &width);
                debug_assert!(*a <= t && t <= *b);
                if t.is_zero() {
                    Location::VertexEnd {
                        position: t,
                        vertex: g.edge(e).initial,
                    }
                } else if t == one {
                    Location::VertexEnd {
                        position: t,
                        vertex: g.edge(e).terminal,
                    }
                } else {
                    Location::Interior(t)
                }
            }
            Orientation::Backward => Location::Interior(b / (&one + &width)),
        };
        let word = branch.target.prefix.clone();
        if !seen.insert((location.clone(), word.clone())) {
            continue;
        }
        let element = normalize_rot(&word, n);
        out.push(PeriodicPointRecord {
            edge: e,
            location,
            period: n,
            rotation_word: word,
            element,
            itinerary: branch.itinerary,
        });
    }
    Ok(out)
}

/// A prediction together with the enumerated record that realizes it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchedPrediction {
    pub prediction: Prediction,
    /// The smallest compatible period at which a record matched.
    pub period: u64,
    pub location: Location,
}

/// The outcome of confirming a prediction list against the enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub edge: EdgeId,
    pub period_bound: u64,
    pub matched: Vec<MatchedPrediction>,
    /// Predictions with at least one compatible period within bound but no
    /// matching record there — a defect, since the guarantees are proven.
    pub missing: Vec<Prediction>,
    /// Predictions whose element cannot be realized at any period within
    /// bound (its reduced denominator exceeds the bound).
    pub out_of_bound: Vec<Prediction>,
}

/// Confirms each prediction against enumerated records on `e`, re-rooting
/// the labeling the same way the classification did.  An element with
/// reduced denominator `d` can only recur at periods divisible by `d`, so
/// those are the periods searched (ascending, up to `period_bound`);
/// matching is up to conjugacy, since a record's decoration depends on the
/// branch while the guarantee is stated for the conjugacy class.
pub fn verify_predictions(
    lm: &LiftedVertexMap,
    e: EdgeId,
    preds: &[Prediction],
    period_bound: u64,
) -> Result<VerifyReport, OracleError> {
    assert!(period_bound >= 1, "the period bound is a positive integer");
    let analysis = analysis_map(lm, e)?;
    let lm = analysis.as_ref().unwrap_or(lm);
    let mut records: BTreeMap<u64, Vec<PeriodicPointRecord>> = BTreeMap::new();
    let mut matched = Vec::new();
    let mut missing = Vec::new();
    let mut out_of_bound = Vec::new();
    for pred in preds {
        let d = pred.element.denominator();
        let mut found = None;
        let mut had_candidate_period = false;
        let mut period = d;
        while period <= period_bound {
            had_candidate_period = true;
            if !records.contains_key(&period) {
                records.insert(period, enumerate_periodic(lm, e, period)?);
            }
            if let Some(r) = records[&period]
                .iter()
                .find(|r| conjugacy_equal(&r.element, &pred.element))
            {
                found = Some(MatchedPrediction {
                    prediction: pred.clone(),
                    period,
                    location: r.location.clone(),
                });
                break;
            }
            period += d;
        }
        match (found, had_candidate_period) {
            (Some(m), _) => matched.push(m),
            (None, true) => missing.push(pred.clone()),
            (None, false) => out_of_bound.push(pred.clone()),
        }
    }
    Ok(VerifyReport {
        edge: e,
        period_bound,
        matched,
        missing,
        out_of_bound,
    })
}

/// Whether and how an endpoint rotation pair seeds the closure check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexMode {
    /// Enumerated records only.
    Off,
    /// Adds the initial vertex's rotation pair; requires the `m`-fold image
    /// of the edge to begin with the edge's own lift (translated by the
    /// vertex's rotation word), where `m` is that vertex's period.
    Initial,
    /// Adds the terminal vertex's rotation pair, conjugated into the frame
    /// of the chosen lift; requires the `n`-fold image to end with the
    /// correspondingly translated lift.
    Terminal,
}

impl fmt::Display for VertexMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            VertexMode::Off => "off",
            VertexMode::Initial => "initial",
            VertexMode::Terminal => "terminal",
        };
        write!(f, "{name}")
    }
}

/// The outcome of closing enumerated elements under the interleaved power
/// semigroup and confirming the closure against the enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SClosureReport {
    pub edge: EdgeId,
    /// The generator pairs the closure was formed over.
    pub pairs: Vec<((Word, u64), (Word, u64))>,
    /// Each closure element with its realized denominator and whether a
    /// record at that period carries exactly that normalized element.
    pub elements: Vec<(RotationElement, u64, bool)>,
    /// Closure elements whose realized denominator exceeds the bound,
    /// which therefore cannot be checked.
    pub skipped: usize,
    pub all_confirmed: bool,
}

/// Closes the (word, period) pairs of interior records on `e` — seeded with
/// an endpoint rotation pair per `mode` — under interleaved power sequences
/// up to `max_len`, then confirms every closure element whose realized
/// denominator is within `period_bound` against the records at that period.
/// Elements realized by a pure power of an endpoint pair may sit at the
/// endpoint itself, so confirmation accepts vertex-end records as well.
pub fn s_closure_check(
    lm: &LiftedVertexMap,
    e: EdgeId,
    period_bound: u64,
    max_len: u32,
    mode: VertexMode,
) -> Result<SClosureReport, OracleError> {
    assert!(period_bound >= 1, "the period bound is a positive integer");
    let analysis = analysis_map(lm, e)?;
    let lm = analysis.as_ref().unwrap_or(lm);
    let g = lm.graph();
    let mut by_period: BTreeMap<u64, Vec<PeriodicPointRecord>> = BTreeMap::new();
    let mut pool: BTreeSet<(Word, u64)> = BTreeSet::new();
    for k in 1..=period_bound {
        let records = enumerate_periodic(lm, e, k)?;
        for r in &records {
            if r.location.is_interior() {
                pool.insert((r.rotation_word.clone(), k));
            }
        }
        by_period.insert(k, records);
    }
    match mode {
        VertexMode::Off => {}
        VertexMode::Initial => {
            let (w1, m) = lm.rotation_word(g.edge(e).initial);
            let required = LiftedStep {
                prefix: w1.clone(),
                edge: e,
                orientation: Orientation::Forward,
            };
            let dec = branch_decomposition(lm, e, m)?;
            if dec.first().map(|b| &b.target) != Some(&required) {
                return Err(OracleError::Hypothesis(format!(
                    "the {m}-fold image of {} does not begin with the edge's own lift \
                     translated by the initial vertex's rotation word",
                    g.edge(e).name
                )));
            }
            pool.insert((w1, m));
        }
        VertexMode::Terminal => {
            let (w2, n) = lm.rotation_word(g.edge(e).terminal);
            let theta = lm.labeling().theta_word(e);
            let conjugated = theta.concat_reduce(&w2).concat_reduce(&theta.invert());
            let required = LiftedStep {
                prefix: conjugated.clone(),
                edge: e,
                orientation: Orientation::Forward,
            };
            let dec = branch_decomposition(lm, e, n)?;
            if dec.last().map(|b| &b.target) != Some(&required) {
                return Err(OracleError::Hypothesis(format!(
                    "the {n}-fold image of {} does not end with the edge's own lift \
                     translated for the terminal vertex's rotation word",
                    g.edge(e).name
                )));
            }
            pool.insert((conjugated, n));
        }
    }
    let generators: Vec<(Word, u64)> = pool.into_iter().collect();
    let mut pairs = Vec::new();
    let mut closure: BTreeSet<(RotationElement, u64)> = BTreeSet::new();
    for i in 0..generators.len() {
        for j in i..generators.len() {
            pairs.push((generators[i].clone(), generators[j].clone()));
            closure.extend(generate_s_with_denominators(
                &generators[i].0,
                generators[i].1,
                &generators[j].0,
                generators[j].1,
                max_len,
            ));
        }
    }
    let mut elements = Vec::new();
    let mut skipped = 0usize;
    let mut all_confirmed = true;
    for (element, denominator) in closure {
        if denominator > period_bound {
            skipped += 1;
            continue;
        }
        let confirmed = by_period[&denominator].iter().any(|r| r.element == element);
        all_confirmed &= confirmed;
        elements.push((element, denominator, confirmed));
    }
    Ok(SClosureReport {
        edge: e,
        pairs,
        elements,
        skipped,
        all_confirmed,
    })
}

/// One edge examined by the single-orbit scan: it carries a period-one
/// positive-slope fixed point, and its endpoint rotation words (under the
/// edge's analysis labeling) either differ or do not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateOutcome {
    pub edge: EdgeId,
    pub words: (Word, Word),
    pub words_differ: bool,
}

/// The full pipeline run on the first candidate whose endpoint words
/// differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChosenAnalysis {
    pub edge: EdgeId,
    pub w1: Word,
    pub w2: Word,
    /// Whether each edge of the graph belongs to `w1`.
    pub belongs_all: Vec<(EdgeId, bool)>,
    pub belongs_ok: bool,
    pub classification: EdgeClassification,
    /// Present only when the belonging hypothesis holds.
    pub predictions: Vec<Prediction>,
    pub verify: Option<VerifyReport>,
}

/// The report of [`one_orbit_analysis`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneOrbitReport {
    /// The common period of every vertex (the orbit length).
    pub period: u64,
    /// The loop rank of the graph.
    pub rank: usize,
    /// Every candidate examined, in edge order, up to and including the
    /// chosen one.
    pub candidates: Vec<CandidateOutcome>,
    /// The analysis of the first candidate with distinct endpoint words;
    /// absent when every candidate was rejected.
    pub chosen: Option<ChosenAnalysis>,
}

/// Analyzes a map whose vertices form one orbit on a graph of loop rank at
/// least two (both are preconditions).  Scans the edges in order for a
/// period-one fixed point of positive slope — a forward branch of the first
/// iterate targeting the edge itself, either strictly interior or covering
/// the whole edge — and, at the first such edge whose endpoint rotation
/// words differ under its analysis labeling, checks that every edge belongs
/// to the initial endpoint's word and then runs classification, prediction
/// (denominators up to `max_denominator`), and verification (periods up to
/// `period_bound`).  Rejected candidates are reported, not errors.
pub fn one_orbit_analysis(
    lm: &LiftedVertexMap,
    max_denominator: u64,
    period_bound: u64,
) -> Result<OneOrbitReport, OracleError> {
    let g = lm.graph();
    let rank = g.rank();
    if rank < 2 {
        return Err(OracleError::Hypothesis(format!(
            "the graph has loop rank {rank}; the single-orbit analysis needs rank at least 2"
        )));
    }
    let first = g.vertex_ids().next().expect("graphs have at least one vertex");
    let orbit = lm.vertex_orbit(first);
    if orbit.len() != g.vertex_count() {
        return Err(OracleError::Hypothesis(format!(
            "the vertex permutation is not a single cycle: the orbit of {} covers {} of {} \
             vertices",
            g.vertex_name(first),
            orbit.len(),
            g.vertex_count()
        )));
    }
    let period = g.vertex_count() as u64;
    let one = BigRational::one();
    let mut candidates = Vec::new();
    let mut chosen = None;
    for e in g.edge_ids() {
        let dec = branch_decomposition(lm, e, 1)?;
        let has_positive_fixed_point = dec.iter().any(|br| {
            br.target.edge == e && br.target.orientation == Orientation::Forward && {
                let (a, b) = &br.interval;
                // Slope +1 across the whole edge fixes every interior
                // point; otherwise t = a/(1 − width) is interior exactly
                // when the branch stays off both endpoints.
                (a.is_zero() && *b == one) || (!a.is_zero() && *b < one)
            }
        });
        if !has_positive_fixed_point {
            continue;
        }
        let analysis = analysis_map(lm, e)?;
        let alm = analysis.as_ref().unwrap_or(lm);
        let (w1, _) = alm.rotation_word(g.edge(e).initial);
        let (w2, _) = alm.rotation_word(g.edge(e).terminal);
        let words_differ = w1 != w2;
        candidates.push(CandidateOutcome {
            edge: e,
            words: (w1.clone(), w2.clone()),
            words_differ,
        });
        if !words_differ {
            continue;
        }
        let belongs_all: Vec<(EdgeId, bool)> = g
            .edge_ids()
            .map(|other| (other, belongs(alm.labeling(), other, &w1)))
            .collect();
        let belongs_ok = belongs_all.iter().all(|(_, holds)| *holds);
        let classification = classify_edge(lm, e)?;
        let (predictions, verify) = if belongs_ok {
            let preds = predicted_elements(&classification, max_denominator);
            let report = verify_predictions(lm, e, &preds, period_bound)?;
            (preds, Some(report))
        } else {
            (Vec::new(), None)
        };
        chosen = Some(ChosenAnalysis {
            edge: e,
            w1,
            w2,
            belongs_all,
            belongs_ok,
            classification,
            predictions,
            verify,
        });
        break;
    }
    Ok(OneOrbitReport {
        period,
        rank,
        candidates,
        chosen,
    })
}
