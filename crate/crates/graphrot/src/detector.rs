//! Hypothesis classification of a tree edge and the guaranteed families of
//! rotation elements that each hypothesis certifies.
//!
//! For a tree edge `E : V₁ → V₂` with endpoint rotation words `w₁` (period
//! `m`) and `w₂` (period `n`), the controlling objects are the lifted
//! geodesics `P̃ᵥ` from the base lift of an endpoint to its `w`-translate.
//! Every traversal `γẼ` that survives in the contraction of
//! `P̃₁^{-kn} Ẽ P̃₂^{km}` certifies a periodic point on `E` whose rotation
//! element is `γ^{1/kmn}`.  Which decorations `γ` are forced to survive is
//! decided by a small set of combinatorial hypotheses:
//!
//! - whether `P̃₁` / `P̃₂` *begin* with the chosen lift `Ẽ`,
//! - whether `E` *belongs* to `w₁` / `w₂` (appears in the cyclic reduction
//!   of the traced loop), and
//! - whether `w₁` and `w₂` are powers of a *common primitive root* that
//!   `E` belongs to.
//!
//! [`classify_edge`] evaluates the hypotheses (re-rooting the labeling when
//! the edge is not in the current spanning tree), [`predicted_elements`]
//! enumerates the certified families up to a denominator bound, and
//! [`detect_in_contraction`] reads surviving decorations directly off the
//! contracted path as an independent route to the same elements.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::rational::BigRational;
use num::{BigInt, Zero};
use thiserror::Error;

use crate::graph::{
    geodesic, lift_path, spanning_tree_containing, word_to_loop, CoherentLabeling, EdgeId,
    EdgePath, EdgeStep, LiftedPath, LiftedVertex, Orientation, VertexId,
};
use crate::vmap::{LiftedVertexMap, MapError};
use crate::word::{common_primitive, normalize_rot, GenId, RotationElement, Word};

/// Errors from the edge-hypothesis layer.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DetectorError {
    /// The belonging hypothesis fails where an operation requires it.
    #[error("edge {edge} does not belong to the word {word}")]
    EdgeNotInWord { edge: String, word: String },
    /// An operation that analyzes a chosen lift needs a spanning-tree edge.
    #[error("edge {0} is not an edge of the current spanning tree")]
    NotTreeEdge(String),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Which endpoint of the analyzed edge a one-sided statement refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    /// The initial vertex `V₁` (word `w₁`, period `m`).
    Initial,
    /// The terminal vertex `V₂` (word `w₂`, period `n`).
    Terminal,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Initial => write!(f, "initial"),
            Side::Terminal => write!(f, "terminal"),
        }
    }
}

/// The decision-table cell an edge falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CaseTag {
    /// Neither path begins with `Ẽ` and the edge belongs to neither word:
    /// a fixed point on the edge, nothing more.
    FpNeither,
    /// Both paths begin with `Ẽ`, the edge belongs to neither word.
    FpBoth,
    /// The edge belongs to exactly one endpoint word: one single-sided
    /// family (plus the fixed point when the begin flags agree).
    BelongsOne(Side),
    /// Belongs to both words, neither path begins with `Ẽ`.
    BelongsBothNeitherBegin,
    /// Belongs to both words, both paths begin with `Ẽ`: pure power
    /// families on both sides.
    BelongsBothBothBegin,
    /// Exactly one path begins with `Ẽ` and both words are powers of a
    /// common root the edge belongs to: a full interval of exponents.
    CommonRootInterval,
    /// Exactly one path begins with `Ẽ`, the edge belongs to both words,
    /// and the words have no common root.
    BelongsBothNotPowers,
    /// Exactly one path begins with `Ẽ` and no belonging hypothesis holds:
    /// nothing is guaranteed.
    OneBegins,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseTag::FpNeither => write!(f, "FpNeither"),
            CaseTag::FpBoth => write!(f, "FpBoth"),
            CaseTag::BelongsOne(side) => write!(f, "BelongsOne({side})"),
            CaseTag::BelongsBothNeitherBegin => write!(f, "BelongsBothNeitherBegin"),
            CaseTag::BelongsBothBothBegin => write!(f, "BelongsBothBothBegin"),
            CaseTag::CommonRootInterval => write!(f, "CommonRootInterval"),
            CaseTag::BelongsBothNotPowers => write!(f, "BelongsBothNotPowers"),
            CaseTag::OneBegins => write!(f, "OneBegins/NoGuarantee"),
        }
    }
}

/// Which guarantee a prediction came from, named by what it asserts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum GuaranteeTag {
    /// A fixed point on the edge (rotation element `1`).
    FixedPoint,
    /// The family `(w^{p̂mn}γ)^{1/q̂mn}` on the single belonging side.
    SingleSideFamily,
    /// The same family shape on both sides (neither path begins).
    DoubleSidedFamily,
    /// Pure power families `w₁^r`, `w₂^s` (both paths begin).
    PowerFamilies,
    /// All exponents of the common root strictly between `k₁/m` and `k₂/n`.
    CommonRootInterval,
    /// Both single-sided families despite distinct roots, realized past the
    /// last coincidence of decorated powers.
    DistinctRootsFamily,
}

impl fmt::Display for GuaranteeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GuaranteeTag::FixedPoint => write!(f, "FixedPoint"),
            GuaranteeTag::SingleSideFamily => write!(f, "SingleSideFamily"),
            GuaranteeTag::DoubleSidedFamily => write!(f, "DoubleSidedFamily"),
            GuaranteeTag::PowerFamilies => write!(f, "PowerFamilies"),
            GuaranteeTag::CommonRootInterval => write!(f, "CommonRootInterval"),
            GuaranteeTag::DistinctRootsFamily => write!(f, "DistinctRootsFamily"),
        }
    }
}

/// One guaranteed rotation element together with the data realizing it:
/// the element is `(base^p γ)^{1/q}` read off at period `q`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Prediction {
    /// The normalized guaranteed rotation element.
    pub element: RotationElement,
    /// A period at which the element is certified to be realized.
    pub period_witness: u64,
    /// The guarantee that produced this prediction.
    pub source_theorem: GuaranteeTag,
    /// The decoration `γ`, when the family carries one.
    pub gamma: Option<Word>,
    /// The realized numerator exponent.
    pub p: u64,
    /// The realized denominator (equals `period_witness`).
    pub q: u64,
}

/// The full hypothesis record of one edge under its analysis labeling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeClassification {
    pub edge: EdgeId,
    /// Rotation word of the initial vertex.
    pub w1: Word,
    /// Rotation word of the terminal vertex.
    pub w2: Word,
    /// Orbit period of the initial vertex.
    pub m: u64,
    /// Orbit period of the terminal vertex.
    pub n: u64,
    /// Whether `P̃₁` begins with the chosen lift of the edge.
    pub begins1: bool,
    /// Whether `P̃₂` begins with the chosen lift of the edge.
    pub begins2: bool,
    /// Whether the edge belongs to `w₁`.
    pub belongs1: bool,
    /// Whether the edge belongs to `w₂`.
    pub belongs2: bool,
    /// `Some((w, k1, k2))` when `w₁ = w^{k₁}` and `w₂ = w^{k₂}` for a
    /// common primitive root `w` (an identity word contributes exponent 0).
    pub common_root: Option<(Word, i64, i64)>,
    /// The decision-table cell.
    pub case: CaseTag,
    /// Decorations of the chosen lift inside `P̃₁` that are initial
    /// subwords of `w₁`; empty when the edge does not belong to `w₁`.
    pub gamma1: BTreeSet<Word>,
    /// Decorations inside `P̃₂`, initial subwords of `w₂`.
    pub gamma2: BTreeSet<Word>,
}

/// The lifted geodesic `P̃ᵥᵏ` from the base lift of `v` to its
/// `wᵏ`-translate; `k = 0` (or an identity word) gives the empty path.
pub fn p_path(lm: &LiftedVertexMap, v: VertexId, w: &Word, k: u64) -> LiftedPath {
    let from = LiftedVertex::base(v);
    let to = from.deck(&w.pow(k as i64));
    geodesic(lm.labeling(), &from, &to)
}

/// Whether the first step of a lifted path traverses the chosen lift of
/// `e` — identity prefix, either direction.  Empty paths begin with nothing.
pub fn begins_with(p: &LiftedPath, e: EdgeId) -> bool {
    p.steps().first().is_some_and(|s| s.prefix.is_identity() && s.edge == e)
}

/// Whether `e` appears (in either direction) in the cyclic reduction of the
/// loop traced by `w`.  Depends only on the conjugacy class of `w`; the
/// identity belongs to nothing.
pub fn belongs(l: &CoherentLabeling, e: EdgeId, w: &Word) -> bool {
    if w.is_identity() {
        return false;
    }
    word_to_loop(l, w).cyclically_reduce(l.graph()).steps().iter().any(|s| s.edge == e)
}

/// The decorations of the chosen lift of `e` inside `P̃ᵥ¹` that are initial
/// subwords of `w`.  Every window argument draws its decoration from this
/// set, and it is nonempty whenever `e` is a tree edge belonging to `w`.
pub fn gamma_words(
    lm: &LiftedVertexMap,
    e: EdgeId,
    v: VertexId,
    w: &Word,
) -> Result<BTreeSet<Word>, DetectorError> {
    let l = lm.labeling();
    if !l.is_tree_edge(e) {
        return Err(DetectorError::NotTreeEdge(l.graph().edge(e).name.clone()));
    }
    if !belongs(l, e, w) {
        return Err(DetectorError::EdgeNotInWord {
            edge: l.graph().edge(e).name.clone(),
            word: w.to_string(),
        });
    }
    let prefixes: BTreeSet<Word> = w.initial_subwords().into_iter().collect();
    Ok(p_path(lm, v, w, 1)
        .steps()
        .iter()
        .filter(|s| s.edge == e && prefixes.contains(&s.prefix))
        .map(|s| s.prefix.clone())
        .collect())
}

/// The map relabeled through a spanning tree containing `e`, grown from the
/// same root, when `e` is not already a tree edge; `None` when the current
/// labeling is already usable.
pub fn analysis_map(
    lm: &LiftedVertexMap,
    e: EdgeId,
) -> Result<Option<LiftedVertexMap>, MapError> {
    if lm.labeling().is_tree_edge(e) {
        return Ok(None);
    }
    let tree = spanning_tree_containing(lm.graph(), e, lm.labeling().root());
    lm.relabel(tree).map(Some)
}

/// The pure decision table: begin flags agreeing selects the fixed-point
/// column, otherwise the one-begins column; belonging flags pick the row.
pub fn case_from_flags(
    begins1: bool,
    begins2: bool,
    belongs1: bool,
    belongs2: bool,
    root_belongs: bool,
) -> CaseTag {
    if begins1 == begins2 {
        match (belongs1, belongs2) {
            (true, true) => {
                if begins1 {
                    CaseTag::BelongsBothBothBegin
                } else {
                    CaseTag::BelongsBothNeitherBegin
                }
            }
            (true, false) => CaseTag::BelongsOne(Side::Initial),
            (false, true) => CaseTag::BelongsOne(Side::Terminal),
            (false, false) => {
                if begins1 {
                    CaseTag::FpBoth
                } else {
                    CaseTag::FpNeither
                }
            }
        }
    } else if root_belongs {
        CaseTag::CommonRootInterval
    } else if belongs1 && belongs2 {
        CaseTag::BelongsBothNotPowers
    } else if belongs1 {
        CaseTag::BelongsOne(Side::Initial)
    } else if belongs2 {
        CaseTag::BelongsOne(Side::Terminal)
    } else {
        CaseTag::OneBegins
    }
}

/// Classifies an edge: evaluates the begin/belong/common-root hypotheses of
/// its endpoint rotation words and records the decoration sets.  When `e`
/// is not a tree edge the map is relabeled through a spanning tree
/// containing it first, so the classification always refers to a chosen
/// lift of `e`.
pub fn classify_edge(
    lm: &LiftedVertexMap,
    e: EdgeId,
) -> Result<EdgeClassification, DetectorError> {
    let relabeled = analysis_map(lm, e)?;
    let lm = relabeled.as_ref().unwrap_or(lm);
    let l = lm.labeling();
    let (v1, v2) = {
        let edge = lm.graph().edge(e);
        (edge.initial, edge.terminal)
    };
    let (w1, m) = lm.rotation_word(v1);
    let (w2, n) = lm.rotation_word(v2);
    let begins1 = begins_with(&p_path(lm, v1, &w1, 1), e);
    let begins2 = begins_with(&p_path(lm, v2, &w2, 1), e);
    let belongs1 = belongs(l, e, &w1);
    let belongs2 = belongs(l, e, &w2);
    let common_root = common_primitive(&w1, &w2);
    let root_belongs = common_root.as_ref().is_some_and(|(w, _, _)| belongs(l, e, w));
    let case = case_from_flags(begins1, begins2, belongs1, belongs2, root_belongs);
    let gamma1 = if belongs1 { gamma_words(lm, e, v1, &w1)? } else { BTreeSet::new() };
    let gamma2 = if belongs2 { gamma_words(lm, e, v2, &w2)? } else { BTreeSet::new() };
    Ok(EdgeClassification {
        edge: e,
        w1,
        w2,
        m,
        n,
        begins1,
        begins2,
        belongs1,
        belongs2,
        common_root,
        case,
        gamma1,
        gamma2,
    })
}

/// All reduced rationals `p/q` with `lo < p/q < hi` and `1 ≤ q ≤ max_q`,
/// ascending.
fn reduced_rationals_between(
    lo: &BigRational,
    hi: &BigRational,
    max_q: u64,
) -> Vec<(BigInt, u64)> {
    let mut found: BTreeSet<BigRational> = BTreeSet::new();
    for q in 1..=max_q {
        let qi = BigInt::from(q);
        let mut p = (lo * BigRational::from_integer(qi.clone())).floor().to_integer()
            + BigInt::from(1);
        loop {
            let r = BigRational::new(p.clone(), qi.clone());
            if r >= *hi {
                break;
            }
            found.insert(r);
            p += 1;
        }
    }
    found
        .into_iter()
        .map(|r| {
            let q: u64 = r.denom().try_into().expect("denominator within the requested bound");
            (r.numer().clone(), q)
        })
        .collect()
}

/// Exponent sums per generator.
fn abelianization(w: &Word) -> BTreeMap<GenId, i64> {
    let mut out = BTreeMap::new();
    for l in w.letters() {
        *out.entry(l.gen).or_insert(0) += match l.sign {
            crate::word::Sign::Plus => 1,
            crate::word::Sign::Minus => -1,
        };
    }
    out.retain(|_, v| *v != 0);
    out
}

fn ab_get(v: &BTreeMap<GenId, i64>, g: GenId) -> i64 {
    v.get(&g).copied().unwrap_or(0)
}

/// The single solution `(i, j)` of `w1^i γ1 = w2^j γ2` over `i, j ≥ 0`,
/// when one exists.
///
/// When the abelianizations of `w1` and `w2` are linearly independent the
/// candidate is pinned down by linear algebra and confirmed by exact word
/// equality.  Otherwise a bounded scan is used; its range comfortably
/// covers the coincidences that short inputs can produce, and any
/// under-count merely shifts predictions to larger realizations, which the
/// downstream exact verification against enumerated orbits still checks.
fn power_coincidence(w1: &Word, gamma1: &Word, w2: &Word, gamma2: &Word) -> Option<(u64, u64)> {
    let a1 = abelianization(w1);
    let a2 = abelianization(w2);
    let mut b = abelianization(gamma2);
    for (g, v) in abelianization(gamma1) {
        *b.entry(g).or_insert(0) -= v;
        if b[&g] == 0 {
            b.remove(&g);
        }
    }
    let gens: BTreeSet<GenId> = a1.keys().chain(a2.keys()).chain(b.keys()).copied().collect();
    // Look for two coordinates making the 2×2 system nonsingular.
    let mut det_pair = None;
    'outer: for &g in &gens {
        for &h in &gens {
            if g < h {
                let det = ab_get(&a1, g) * (-ab_get(&a2, h)) - (-ab_get(&a2, g)) * ab_get(&a1, h);
                if det != 0 {
                    det_pair = Some((g, h, det));
                    break 'outer;
                }
            }
        }
    }
    if let Some((g, h, det)) = det_pair {
        // Cramer solve of i·A1 − j·A2 = B on coordinates (g, h).
        let bi = ab_get(&b, g) * (-ab_get(&a2, h)) - (-ab_get(&a2, g)) * ab_get(&b, h);
        let bj = ab_get(&a1, g) * ab_get(&b, h) - ab_get(&b, g) * ab_get(&a1, h);
        if bi % det != 0 || bj % det != 0 {
            return None;
        }
        let (i, j) = (bi / det, bj / det);
        if i < 0 || j < 0 {
            return None;
        }
        let (i, j) = (i as u64, j as u64);
        if w1.pow(i as i64).concat_reduce(gamma1) == w2.pow(j as i64).concat_reduce(gamma2) {
            return Some((i, j));
        }
        return None;
    }
    // Dependent abelianizations: bounded scan.
    let bound =
        8 * (1 + w1.len() + w2.len() + gamma1.len() + gamma2.len()) as u64;
    for i in 0..=bound {
        let u = w1.pow(i as i64).concat_reduce(gamma1);
        let mut v = gamma2.clone();
        for j in 0..=bound {
            if v == u {
                return Some((i, j));
            }
            v = w2.concat_reduce(&v);
        }
    }
    None
}

/// The index `N` past which no decorated power of one side can equal a
/// decorated power of the other: one more than the largest coincidence
/// index across all decoration pairs, or `0` when there is none.
fn coincidence_bound(
    w1: &Word,
    gamma1: &BTreeSet<Word>,
    w2: &Word,
    gamma2: &BTreeSet<Word>,
) -> u64 {
    let mut n = 0u64;
    for g1 in gamma1 {
        for g2 in gamma2 {
            if let Some((i, j)) = power_coincidence(w1, g1, w2, g2) {
                n = n.max(i.max(j) + 1);
            }
        }
    }
    n
}

/// Splits a decoration `g = root^t · rest` (smallest `t ≥ 0`) where `rest`
/// is an initial subword of `root`, returning `rest`; `None` when no such
/// split exists within `0 ≤ t ≤ max_t`.
fn split_off_root_power(root: &Word, g: &Word, max_t: u64) -> Option<Word> {
    let prefixes: BTreeSet<Word> = root.initial_subwords().into_iter().collect();
    for t in 0..=max_t {
        let rest = root.pow(-(t as i64)).concat_reduce(g);
        if prefixes.contains(&rest) {
            return Some(rest);
        }
    }
    None
}

fn push_family(
    out: &mut Vec<Prediction>,
    tag: GuaranteeTag,
    base: &Word,
    gammas: &BTreeSet<Word>,
    rationals: &[(BigInt, u64)],
    scale: u64,
    realization: impl Fn(u64) -> u64,
) {
    for (ph, qh) in rationals {
        let ph: u64 = ph.try_into().expect("family exponents are positive");
        let l = realization(ph);
        let p = l * ph * scale;
        let q = l * qh * scale;
        for gamma in gammas {
            let word = base.pow(p as i64).concat_reduce(gamma);
            out.push(Prediction {
                element: normalize_rot(&word, q),
                period_witness: q,
                source_theorem: tag,
                gamma: Some(gamma.clone()),
                p,
                q,
            });
        }
    }
}

/// Enumerates the certified rotation elements of a classified edge, one
/// [`Prediction`] per family member with reduced parameter denominator
/// `q̂ ≤ max_denominator`.  Every returned element is guaranteed to be
/// realized by a periodic point on the edge at the witnessed period.
pub fn predicted_elements(c: &EdgeClassification, max_denominator: u64) -> Vec<Prediction> {
    assert!(max_denominator >= 1, "the denominator bound is a positive integer");
    let mut out = Vec::new();
    if c.begins1 == c.begins2 {
        out.push(Prediction {
            element: RotationElement::Identity,
            period_witness: 1,
            source_theorem: GuaranteeTag::FixedPoint,
            gamma: None,
            p: 0,
            q: 1,
        });
    }
    let mn = c.m * c.n;
    let zero = BigRational::zero();
    let unit_interval = |per: u64| BigRational::new(BigInt::from(1), BigInt::from(per));
    match c.case {
        CaseTag::FpNeither | CaseTag::FpBoth | CaseTag::OneBegins => {}
        CaseTag::BelongsOne(side) => {
            let (w, period, gammas) = match side {
                Side::Initial => (&c.w1, c.m, &c.gamma1),
                Side::Terminal => (&c.w2, c.n, &c.gamma2),
            };
            let rats = reduced_rationals_between(&zero, &unit_interval(period), max_denominator);
            push_family(&mut out, GuaranteeTag::SingleSideFamily, w, gammas, &rats, mn, |_| 1);
        }
        CaseTag::BelongsBothNeitherBegin => {
            for (w, period, gammas) in
                [(&c.w1, c.m, &c.gamma1), (&c.w2, c.n, &c.gamma2)]
            {
                let rats =
                    reduced_rationals_between(&zero, &unit_interval(period), max_denominator);
                push_family(&mut out, GuaranteeTag::DoubleSidedFamily, w, gammas, &rats, mn, |_| 1);
            }
        }
        CaseTag::BelongsBothBothBegin => {
            for (w, period) in [(&c.w1, c.m), (&c.w2, c.n)] {
                // The closed end of [0, 1/period): the power-zero member.
                out.push(Prediction {
                    element: RotationElement::Identity,
                    period_witness: mn,
                    source_theorem: GuaranteeTag::PowerFamilies,
                    gamma: None,
                    p: 0,
                    q: mn,
                });
                let rats =
                    reduced_rationals_between(&zero, &unit_interval(period), max_denominator);
                for (ph, qh) in &rats {
                    let ph: u64 = ph.try_into().expect("positive by construction");
                    let (p, q) = (ph * mn, qh * mn);
                    out.push(Prediction {
                        element: normalize_rot(&w.pow(p as i64), q),
                        period_witness: q,
                        source_theorem: GuaranteeTag::PowerFamilies,
                        gamma: None,
                        p,
                        q,
                    });
                }
            }
        }
        CaseTag::CommonRootInterval => {
            let (root, k1, k2) =
                c.common_root.clone().expect("the case implies a common root");
            let ratio = |k: i64, per: u64| BigRational::new(BigInt::from(k), BigInt::from(per));
            if ratio(k1, c.m) != ratio(k2, c.n) {
                // Orient the root so the larger exponent ratio is positive.
                let big_initial = ratio(k1, c.m) > ratio(k2, c.n);
                let (root, k1, k2) = if (if big_initial { k1 } else { k2 }) <= 0 {
                    (root.invert(), -k1, -k2)
                } else {
                    (root, k1, k2)
                };
                let (r1, r2) = (ratio(k1, c.m), ratio(k2, c.n));
                let (k_big, gammas_raw) =
                    if r1 > r2 { (k1, &c.gamma1) } else { (k2, &c.gamma2) };
                let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
                let lo = lo.max(BigRational::zero());
                let k_big = k_big as u64;
                let gammas: BTreeSet<Word> = gammas_raw
                    .iter()
                    .filter_map(|g| split_off_root_power(&root, g, k_big))
                    .collect();
                let rats = reduced_rationals_between(&lo, &hi, max_denominator);
                push_family(
                    &mut out,
                    GuaranteeTag::CommonRootInterval,
                    &root,
                    &gammas,
                    &rats,
                    k_big * mn,
                    |_| 1,
                );
            }
        }
        CaseTag::BelongsBothNotPowers => {
            let nbound = coincidence_bound(&c.w1, &c.gamma1, &c.w2, &c.gamma2);
            for (w, period, gammas) in
                [(&c.w1, c.m, &c.gamma1), (&c.w2, c.n, &c.gamma2)]
            {
                let rats =
                    reduced_rationals_between(&zero, &unit_interval(period), max_denominator);
                push_family(
                    &mut out,
                    GuaranteeTag::DistinctRootsFamily,
                    w,
                    gammas,
                    &rats,
                    mn,
                    |ph| {
                        let mut l = 1u64;
                        while l * ph * mn <= nbound {
                            l += 1;
                        }
                        l
                    },
                );
            }
        }
    }
    out
}

fn gamma_set_display(gammas: &BTreeSet<Word>) -> String {
    let items: Vec<String> = gammas.iter().map(|g| g.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

/// Human-readable symbolic descriptions of the guaranteed families, one
/// string per family, independent of any denominator bound.
pub fn family_descriptors(c: &EdgeClassification) -> Vec<String> {
    let mut out = Vec::new();
    if c.begins1 == c.begins2 {
        out.push("1 at a fixed point (period 1)".to_string());
    }
    let mn = c.m * c.n;
    let side_line = |w: &Word, period: u64, gammas: &BTreeSet<Word>| {
        format!(
            "(({w})^p γ)^(1/q) with p = p̂·{mn}, q = q̂·{mn}, p̂/q̂ ∈ (0, 1/{period}), γ ∈ {}",
            gamma_set_display(gammas)
        )
    };
    match c.case {
        CaseTag::FpNeither | CaseTag::FpBoth | CaseTag::OneBegins => {}
        CaseTag::BelongsOne(side) => {
            let (w, period, gammas) = match side {
                Side::Initial => (&c.w1, c.m, &c.gamma1),
                Side::Terminal => (&c.w2, c.n, &c.gamma2),
            };
            out.push(side_line(w, period, gammas));
        }
        CaseTag::BelongsBothNeitherBegin => {
            out.push(side_line(&c.w1, c.m, &c.gamma1));
            out.push(side_line(&c.w2, c.n, &c.gamma2));
        }
        CaseTag::BelongsBothBothBegin => {
            out.push(format!("({})^r with r ∈ [0, 1/{})", c.w1, c.m));
            out.push(format!("({})^s with s ∈ [0, 1/{})", c.w2, c.n));
        }
        CaseTag::CommonRootInterval => {
            let (root, k1, k2) = c.common_root.clone().expect("case implies a common root");
            let r1 = BigRational::new(BigInt::from(k1), BigInt::from(c.m));
            let r2 = BigRational::new(BigInt::from(k2), BigInt::from(c.n));
            let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
            let empty = if lo == hi { " (empty)" } else { "" };
            out.push(format!("({root})^r with r ∈ ({lo}, {hi}){empty}"));
        }
        CaseTag::BelongsBothNotPowers => {
            out.push(side_line(&c.w1, c.m, &c.gamma1));
            out.push(side_line(&c.w2, c.n, &c.gamma2));
        }
    }
    out
}

/// Reads the certified decorations directly off the contracted path
/// `P̃₁^{-kn} Ẽ P̃₂^{km}`: every surviving traversal of `e` yields its
/// decoration, the direction it is traversed in, and the rotation element
/// `γ^{1/kmn}` it certifies, in path order.  Works for any edge; for a
/// non-tree edge the middle step is the `θ(e)`-decorated lift.
pub fn detect_in_contraction(
    lm: &LiftedVertexMap,
    e: EdgeId,
    k: u64,
) -> Vec<(Word, Orientation, RotationElement)> {
    assert!(k >= 1, "the iteration multiplier is a positive integer");
    let g = lm.graph();
    let (v1, v2) = {
        let edge = g.edge(e);
        (edge.initial, edge.terminal)
    };
    let (w1, m) = lm.rotation_word(v1);
    let (w2, n) = lm.rotation_word(v2);
    let left = p_path(lm, v1, &w1, k * n).inverted();
    let single = EdgePath::new(g, v1, vec![EdgeStep::forward(e)]).expect("an edge is a path");
    let mid = lift_path(lm.labeling(), LiftedVertex::base(v1), &single)
        .expect("the chosen lifted edge exists");
    let right = p_path(lm, v2, &w2, k * m).deck(&lm.labeling().theta_word(e));
    let total = left
        .concat(&mid)
        .expect("the middle lift starts where the inverted path ends")
        .concat(&right)
        .expect("the right path starts at the translated endpoint")
        .contract();
    let q = k * m * n;
    total
        .steps()
        .iter()
        .filter(|s| s.edge == e)
        .map(|s| (s.prefix.clone(), s.orientation, normalize_rot(&s.prefix, q)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{
        circle_map, house_map, house_oneorbit_map, theta_both_begin_map,
        theta_distinct_roots_map, theta_map, three_vertex_map,
    };
    use crate::word::conjugacy_equal;

    fn w(s: &str) -> Word {
        Word::from_ascii(s)
    }

    fn wset(items: &[&str]) -> BTreeSet<Word> {
        items.iter().map(|s| w(s)).collect()
    }

    fn eid(lm: &LiftedVertexMap, name: &str) -> EdgeId {
        lm.graph().edge_id(name).unwrap()
    }

    fn vid(lm: &LiftedVertexMap, name: &str) -> VertexId {
        lm.graph().vertex_id(name).unwrap()
    }

    fn step(lm: &LiftedVertexMap, prefix: &str, edge: &str, fwd: bool) -> LiftedStep {
        crate::graph::LiftedStep {
            prefix: w(prefix),
            edge: eid(lm, edge),
            orientation: if fwd { Orientation::Forward } else { Orientation::Backward },
        }
    }

    use crate::graph::LiftedStep;

    // --- belonging -----------------------------------------------------

    #[test]
    fn belonging_in_the_house_generators_matches_the_cyclic_cores() {
        let lm = house_map();
        let l = lm.labeling();
        let in_a: Vec<&str> = ["E1", "E2", "E3", "E4", "E5", "E6"]
            .into_iter()
            .filter(|n| belongs(l, eid(&lm, n), &w("a")))
            .collect();
        assert_eq!(in_a, vec!["E1", "E2", "E3"]);
        let in_b: Vec<&str> = ["E1", "E2", "E3", "E4", "E5", "E6"]
            .into_iter()
            .filter(|n| belongs(l, eid(&lm, n), &w("b")))
            .collect();
        assert_eq!(in_b, vec!["E3", "E4", "E5", "E6"]);
    }

    #[test]
    fn belonging_in_the_three_vertex_graph_excludes_the_cancelled_conjugator() {
        let lm = three_vertex_map();
        let l = lm.labeling();
        assert!(!belongs(l, eid(&lm, "E1"), &w("a")));
        assert!(belongs(l, eid(&lm, "E2"), &w("a")));
        assert!(belongs(l, eid(&lm, "E3"), &w("a")));
    }

    #[test]
    fn belonging_is_a_conjugacy_and_power_invariant() {
        let lm = house_map();
        let l = lm.labeling();
        for name in ["E1", "E2", "E3", "E4", "E5", "E6"] {
            let e = eid(&lm, name);
            let base = belongs(l, e, &w("ab"));
            // conjugate b⁻¹(ab)b = b⁻¹ab·b and powers keep the answer
            assert_eq!(belongs(l, e, &w("~b").concat_reduce(&w("ab")).concat_reduce(&w("b"))), base);
            assert_eq!(belongs(l, e, &w("ab").pow(3)), base);
            assert_eq!(belongs(l, e, &w("ab").pow(-2)), base);
        }
        assert!(!belongs(l, eid(&lm, "E1"), &Word::identity()));
    }

    // --- geodesic endpoint paths ----------------------------------------

    #[test]
    fn endpoint_path_of_the_initial_three_vertex_station_wraps_through_the_double_edge() {
        let lm = three_vertex_map();
        let p = p_path(&lm, vid(&lm, "V1"), &w("a"), 1);
        let expect = vec![
            step(&lm, "1", "E1", true),
            step(&lm, "1", "E2", true),
            step(&lm, "1", "E3", true),
            step(&lm, "a", "E1", false),
        ];
        assert_eq!(p.steps(), expect.as_slice());
        assert_eq!(p.start().label, Word::identity());
        assert_eq!(p.end().label, w("a"));
    }

    #[test]
    fn endpoint_paths_of_the_house_stations_cross_the_generator_edges() {
        let lm = house_map();
        let p5 = p_path(&lm, vid(&lm, "V5"), &w("ab"), 1);
        let expect5 = vec![
            step(&lm, "1", "E1", true),
            step(&lm, "1", "E2", true),
            step(&lm, "a", "E4", true),
            step(&lm, "a", "E5", true),
            step(&lm, "a", "E6", true),
        ];
        assert_eq!(p5.steps(), expect5.as_slice());
        let p2 = p_path(&lm, vid(&lm, "V2"), &w("ba"), 1);
        let expect2 = vec![
            step(&lm, "1", "E4", true),
            step(&lm, "1", "E5", true),
            step(&lm, "1", "E6", true),
            step(&lm, "b", "E1", true),
            step(&lm, "b", "E2", true),
        ];
        assert_eq!(p2.steps(), expect2.as_slice());
    }

    #[test]
    fn identity_word_and_zero_power_give_empty_paths() {
        let lm = three_vertex_map();
        assert!(p_path(&lm, vid(&lm, "V2"), &Word::identity(), 7).is_empty());
        assert!(p_path(&lm, vid(&lm, "V1"), &w("a"), 0).is_empty());
    }

    #[test]
    fn power_paths_concatenate_translates_of_the_base_path() {
        for (lm, v, word) in [
            (three_vertex_map(), "V1", "a"),
            (house_map(), "V5", "ab"),
            (house_map(), "V2", "ba"),
            (theta_map(), "V1", "~b~a"),
        ] {
            let v = vid(&lm, v);
            let word = w(word);
            let p1 = p_path(&lm, v, &word, 1);
            let expected = p1.concat(&p1.deck(&word)).unwrap().contract();
            assert_eq!(p_path(&lm, v, &word, 2), expected);
        }
    }

    #[test]
    fn begin_flag_reads_only_undecorated_first_steps() {
        let lm = three_vertex_map();
        let p = p_path(&lm, vid(&lm, "V1"), &w("a"), 1);
        assert!(begins_with(&p, eid(&lm, "E1")));
        assert!(!begins_with(&p, eid(&lm, "E2")));
        let empty = p_path(&lm, vid(&lm, "V2"), &Word::identity(), 1);
        assert!(!begins_with(&empty, eid(&lm, "E1")));
    }

    // --- decoration sets -------------------------------------------------

    #[test]
    fn decorations_require_a_belonging_tree_edge() {
        let lm = three_vertex_map();
        let err = gamma_words(&lm, eid(&lm, "E1"), vid(&lm, "V1"), &w("a")).unwrap_err();
        assert!(matches!(err, DetectorError::EdgeNotInWord { .. }));
        let err = gamma_words(&lm, eid(&lm, "E3"), vid(&lm, "V3"), &w("a")).unwrap_err();
        assert!(matches!(err, DetectorError::NotTreeEdge(_)));
    }

    #[test]
    fn decorations_are_initial_subwords_found_on_the_path() {
        let lm = three_vertex_map();
        let e2 = eid(&lm, "E2");
        let got = gamma_words(&lm, e2, vid(&lm, "V1"), &w("a")).unwrap();
        assert_eq!(got, wset(&["1"]));
    }

    #[test]
    fn begin_implies_the_empty_decoration_is_recorded() {
        let lm = three_vertex_map();
        let e3 = eid(&lm, "E3");
        let analysis = analysis_map(&lm, e3).unwrap().unwrap();
        let v3 = vid(&analysis, "V3");
        let (w1, _) = analysis.rotation_word(v3);
        let p = p_path(&analysis, v3, &w1, 1);
        assert!(begins_with(&p, e3));
        let gammas = gamma_words(&analysis, e3, v3, &w1).unwrap();
        assert!(gammas.contains(&Word::identity()));
    }

    // --- analysis relabeling ---------------------------------------------

    #[test]
    fn analysis_map_is_identity_on_tree_edges_and_reroots_otherwise() {
        let lm = three_vertex_map();
        assert!(analysis_map(&lm, eid(&lm, "E1")).unwrap().is_none());
        let analysis = analysis_map(&lm, eid(&lm, "E3")).unwrap().unwrap();
        assert!(analysis.labeling().is_tree_edge(eid(&lm, "E3")));
        assert_eq!(analysis.labeling().root(), lm.labeling().root());
    }

    #[test]
    fn rerooted_three_vertex_station_begins_with_the_chord() {
        let lm = three_vertex_map();
        let analysis = analysis_map(&lm, eid(&lm, "E3")).unwrap().unwrap();
        let (w1, m) = analysis.rotation_word(vid(&analysis, "V3"));
        assert_eq!((w1.clone(), m), (w("a"), 2));
        let p = p_path(&analysis, vid(&analysis, "V3"), &w1, 1);
        let expect = vec![step(&analysis, "1", "E3", true), step(&analysis, "1", "E2", true)];
        assert_eq!(p.steps(), expect.as_slice());
    }

    // --- the decision table ----------------------------------------------

    #[test]
    fn decision_table_is_total_and_matches_the_frozen_cells() {
        for mask in 0u32..32 {
            let f = |b: u32| mask >> b & 1 == 1;
            // never panics, and the root column only matters when exactly
            // one begin flag is set
            let tag = case_from_flags(f(0), f(1), f(2), f(3), f(4));
            if f(0) == f(1) {
                assert_ne!(tag, CaseTag::CommonRootInterval);
                assert_ne!(tag, CaseTag::BelongsBothNotPowers);
                assert_ne!(tag, CaseTag::OneBegins);
            }
        }
        assert_eq!(case_from_flags(false, false, false, false, false), CaseTag::FpNeither);
        assert_eq!(case_from_flags(true, true, false, false, true), CaseTag::FpBoth);
        assert_eq!(
            case_from_flags(true, true, true, true, true),
            CaseTag::BelongsBothBothBegin
        );
        assert_eq!(
            case_from_flags(false, false, true, true, false),
            CaseTag::BelongsBothNeitherBegin
        );
        assert_eq!(
            case_from_flags(false, false, true, false, false),
            CaseTag::BelongsOne(Side::Initial)
        );
        assert_eq!(
            case_from_flags(true, false, false, true, false),
            CaseTag::BelongsOne(Side::Terminal)
        );
        assert_eq!(case_from_flags(true, false, true, true, true), CaseTag::CommonRootInterval);
        assert_eq!(
            case_from_flags(false, true, true, true, false),
            CaseTag::BelongsBothNotPowers
        );
        assert_eq!(case_from_flags(true, false, false, false, false), CaseTag::OneBegins);
    }

    // --- fixture classifications ------------------------------------------

    #[test]
    fn house_chord_is_a_plain_fixed_point_cell() {
        let lm = house_map();
        let c = classify_edge(&lm, eid(&lm, "E3")).unwrap();
        assert_eq!(
            (c.begins1, c.begins2, c.belongs1, c.belongs2),
            (false, false, false, false)
        );
        assert_eq!(c.case, CaseTag::FpNeither);
        assert_eq!((c.w1.clone(), c.m), (w("ab"), 5));
        assert_eq!((c.w2.clone(), c.n), (w("ba"), 5));
        assert!(c.gamma1.is_empty() && c.gamma2.is_empty());
        let preds = predicted_elements(&c, 6);
        assert_eq!(preds.len(), 1);
        assert_eq!(preds[0].element, RotationElement::Identity);
        assert_eq!(preds[0].period_witness, 1);
        assert_eq!(preds[0].source_theorem, GuaranteeTag::FixedPoint);
    }

    #[test]
    fn house_roof_edge_has_an_empty_common_root_interval() {
        let lm = house_map();
        let c = classify_edge(&lm, eid(&lm, "E1")).unwrap();
        assert_eq!((c.begins1, c.begins2), (true, false));
        assert_eq!((c.belongs1, c.belongs2), (true, true));
        assert_eq!(c.common_root, Some((w("ab"), 1, 1)));
        assert_eq!(c.case, CaseTag::CommonRootInterval);
        assert_eq!(c.gamma1, wset(&["1"]));
        assert_eq!(c.gamma2, wset(&["ab"]));
        assert!(predicted_elements(&c, 8).is_empty());
        let desc = family_descriptors(&c);
        assert_eq!(desc.len(), 1);
        assert!(desc[0].contains("(1/5, 1/5)") && desc[0].contains("empty"));
    }

    #[test]
    fn three_vertex_tree_edge_offers_no_guarantee() {
        let lm = three_vertex_map();
        let c = classify_edge(&lm, eid(&lm, "E1")).unwrap();
        assert_eq!(
            (c.begins1, c.begins2, c.belongs1, c.belongs2),
            (true, false, false, false)
        );
        assert_eq!(c.case, CaseTag::OneBegins);
        assert!(predicted_elements(&c, 8).is_empty());
        assert!(family_descriptors(&c).is_empty());
        assert_eq!(c.case.to_string(), "OneBegins/NoGuarantee");
    }

    #[test]
    fn rerooted_chord_earns_the_full_interval_between_the_station_ratios() {
        let lm = three_vertex_map();
        let c = classify_edge(&lm, eid(&lm, "E3")).unwrap();
        assert_eq!(c.case, CaseTag::CommonRootInterval);
        assert_eq!((c.begins1, c.begins2), (true, false));
        assert_eq!((c.w1.clone(), c.m), (w("a"), 2));
        assert_eq!((c.w2.clone(), c.n), (Word::identity(), 1));
        assert_eq!(c.common_root, Some((w("a"), 1, 0)));
        assert_eq!(c.gamma1, wset(&["1"]));
        assert!(c.gamma2.is_empty());
        let desc = family_descriptors(&c);
        assert_eq!(desc.len(), 1);
        assert!(desc[0].contains("(0, 1/2)"), "descriptor was {}", desc[0]);
        assert!(!desc[0].contains("empty"));
    }

    #[test]
    fn interval_predictions_realize_every_reduced_ratio_with_scaled_parameters() {
        let lm = three_vertex_map();
        let c = classify_edge(&lm, eid(&lm, "E3")).unwrap();
        let preds = predicted_elements(&c, 4);
        let summary: Vec<(String, u64, u64)> =
            preds.iter().map(|p| (p.element.to_string(), p.p, p.q)).collect();
        assert_eq!(
            summary,
            vec![
                ("a^1/4".to_string(), 2, 8),
                ("a^1/3".to_string(), 2, 6),
            ]
        );
        for p in &preds {
            assert_eq!(p.source_theorem, GuaranteeTag::CommonRootInterval);
            assert_eq!(p.gamma, Some(Word::identity()));
            assert_eq!(p.period_witness, p.q);
        }
    }

    #[test]
    fn theta_analysis_of_the_second_edge_is_double_sided() {
        let lm = theta_map();
        let c = classify_edge(&lm, eid(&lm, "E2")).unwrap();
        assert_eq!((c.w1.clone(), c.m), (w("a~ba"), 2));
        assert_eq!((c.w2.clone(), c.n), (w("~baa"), 2));
        assert_eq!(
            (c.begins1, c.begins2, c.belongs1, c.belongs2),
            (false, false, true, true)
        );
        assert_eq!(c.case, CaseTag::BelongsBothNeitherBegin);
        assert_eq!(c.gamma1, wset(&["a~ba"]));
        assert_eq!(c.gamma2, wset(&["~ba"]));
        assert!(c.common_root.is_none());
        let preds = predicted_elements(&c, 3);
        // identity + (r ∈ {1/3} scaled under q̂ ≤ 3 … ) on each side:
        // (0, 1/2) with q̂ ≤ 3 holds only 1/3, realized at p = 4, q = 12.
        assert_eq!(preds.len(), 3);
        assert_eq!(preds[0].element, RotationElement::Identity);
        for p in &preds[1..] {
            assert_eq!((p.p, p.q), (4, 12));
            assert_eq!(p.source_theorem, GuaranteeTag::DoubleSidedFamily);
        }
        assert_eq!(
            preds[1].element,
            normalize_rot(&w("a~ba").pow(4).concat_reduce(&w("a~ba")), 12)
        );
        assert_eq!(
            preds[2].element,
            normalize_rot(&w("~baa").pow(4).concat_reduce(&w("~ba")), 12)
        );
    }

    #[test]
    fn theta_with_both_beginning_paths_yields_pure_power_families() {
        let lm = theta_both_begin_map();
        let c = classify_edge(&lm, eid(&lm, "E1")).unwrap();
        assert_eq!((c.w1.clone(), c.m), (w("~a"), 1));
        assert_eq!((c.w2.clone(), c.n), (w("a~ba"), 1));
        assert_eq!(
            (c.begins1, c.begins2, c.belongs1, c.belongs2),
            (true, true, true, true)
        );
        assert_eq!(c.case, CaseTag::BelongsBothBothBegin);
        assert_eq!(c.gamma1, wset(&["1"]));
        assert_eq!(c.gamma2, wset(&["1"]));
        let preds = predicted_elements(&c, 2);
        // fixed point + per side: the closed end r = 0 and r = 1/2.
        assert_eq!(preds.len(), 5);
        assert!(preds.iter().all(|p| match p.source_theorem {
            GuaranteeTag::FixedPoint | GuaranteeTag::PowerFamilies => true,
            _ => false,
        }));
        assert!(preds
            .iter()
            .any(|p| p.element == normalize_rot(&w("~a"), 2) && (p.p, p.q) == (1, 2)));
        assert!(preds
            .iter()
            .any(|p| p.element == normalize_rot(&w("a~ba"), 2) && (p.p, p.q) == (1, 2)));
    }

    #[test]
    fn theta_with_distinct_roots_realizes_both_families_past_the_coincidences() {
        let lm = theta_distinct_roots_map();
        let c = classify_edge(&lm, eid(&lm, "E1")).unwrap();
        assert_eq!((c.w1.clone(), c.m), (w("~a"), 1));
        assert_eq!((c.w2.clone(), c.n), (w("~baa"), 1));
        assert_eq!((c.begins1, c.begins2), (true, false));
        assert!(c.common_root.is_none());
        assert_eq!(c.case, CaseTag::BelongsBothNotPowers);
        assert_eq!(c.gamma1, wset(&["1"]));
        assert_eq!(c.gamma2, wset(&["~ba"]));
        let preds = predicted_elements(&c, 2);
        // no coincidence: realized directly at l = 1, so p/q = p̂/q̂.
        let pairs: BTreeSet<(u64, u64)> = preds.iter().map(|p| (p.p, p.q)).collect();
        assert_eq!(pairs, [(1u64, 2u64)].into_iter().collect());
        assert_eq!(preds.len(), 2);
        assert!(preds.iter().all(|p| p.source_theorem == GuaranteeTag::DistinctRootsFamily));
        assert!(preds
            .iter()
            .any(|p| p.element == normalize_rot(&w("~a"), 2) && p.gamma == Some(Word::identity())));
        assert!(preds.iter().any(|p| {
            p.element == normalize_rot(&w("~baa").concat_reduce(&w("~ba")), 2)
                && p.gamma == Some(w("~ba"))
        }));
    }

    // --- coincidence search ------------------------------------------------

    #[test]
    fn independent_abelianizations_pin_down_the_unique_coincidence() {
        // a^i = b^j · b⁻¹a³ forces (i, j) = (3, 1)
        assert_eq!(
            power_coincidence(&w("a"), &Word::identity(), &w("b"), &w("~baaa")),
            Some((3, 1))
        );
        // sign obstruction: no solution with j ≥ 0
        assert_eq!(
            power_coincidence(&w("~a"), &Word::identity(), &w("~baa"), &w("~ba")),
            None
        );
    }

    #[test]
    fn dependent_abelianizations_fall_back_to_the_scan() {
        // ab and ba abelianize identically; only the power-zero pair meets
        assert_eq!(power_coincidence(&w("ab"), &w("a"), &w("ba"), &w("a")), Some((0, 0)));
        assert_eq!(power_coincidence(&w("ab"), &w("a"), &w("ba"), &w("b")), None);
        let n = coincidence_bound(&w("ab"), &wset(&["a"]), &w("ba"), &wset(&["a", "b"]));
        assert_eq!(n, 1);
    }

    #[test]
    fn coincidence_shifts_realizations_past_the_bound() {
        // force N = 4 via a synthetic classification
        let c = EdgeClassification {
            edge: EdgeId(0),
            w1: w("a"),
            w2: w("b"),
            m: 1,
            n: 1,
            begins1: true,
            begins2: false,
            belongs1: true,
            belongs2: true,
            common_root: None,
            case: CaseTag::BelongsBothNotPowers,
            gamma1: wset(&["1"]),
            gamma2: wset(&["~baaa"]),
        };
        let preds = predicted_elements(&c, 2);
        // r = 1/2: smallest l with l·1·1 > 4 is 5, so p = 5, q = 10.
        assert!(preds.iter().all(|p| (p.p, p.q) == (5, 10)));
        assert_eq!(preds.len(), 2);
    }

    // --- root-power splitting ----------------------------------------------

    #[test]
    fn decorations_split_into_root_powers_and_residual_prefixes() {
        let root = w("aba");
        assert_eq!(split_off_root_power(&root, &Word::identity(), 3), Some(Word::identity()));
        assert_eq!(split_off_root_power(&root, &w("ab"), 3), Some(w("ab")));
        assert_eq!(split_off_root_power(&root, &root.pow(2).concat_reduce(&w("a")), 3), Some(w("a")));
        // non-cyclically-reduced roots still split after cancellation
        let messy = w("ab~a");
        let g = messy.pow(1).concat_reduce(&w("ab")); // = ab·b = "abb" after the power cancels
        assert_eq!(split_off_root_power(&messy, &g, 2), Some(w("ab")));
        assert_eq!(split_off_root_power(&w("a"), &w("b"), 5), None);
    }

    // --- contraction readout -----------------------------------------------

    #[test]
    fn contraction_readout_of_the_three_vertex_tree_edge_finds_one_survivor() {
        let lm = three_vertex_map();
        let e1 = eid(&lm, "E1");
        for k in 1..=3 {
            let found = detect_in_contraction(&lm, e1, k);
            assert_eq!(found.len(), 1, "k = {k}");
            let (prefix, orientation, element) = &found[0];
            assert_eq!(prefix, &w("a").pow(k as i64));
            assert_eq!(*orientation, Orientation::Forward);
            assert_eq!(element, &normalize_rot(&w("a"), 2));
        }
    }

    #[test]
    fn contraction_readout_of_the_rerooted_chord_needs_two_rounds() {
        let lm = three_vertex_map();
        let analysis = analysis_map(&lm, eid(&lm, "E3")).unwrap().unwrap();
        let e3 = eid(&analysis, "E3");
        assert!(detect_in_contraction(&analysis, e3, 1).is_empty());
        let found = detect_in_contraction(&analysis, e3, 2);
        assert_eq!(found.len(), 1);
        let (prefix, orientation, element) = &found[0];
        assert_eq!(prefix, &w("a"));
        assert_eq!(*orientation, Orientation::Backward);
        assert_eq!(element, &normalize_rot(&w("a"), 4));
    }

    #[test]
    fn fixed_point_cells_keep_the_undecorated_lift_in_the_contraction() {
        let lm = house_map();
        let e3 = eid(&lm, "E3");
        let found = detect_in_contraction(&lm, e3, 1);
        assert!(found
            .iter()
            .any(|(prefix, _, element)| prefix.is_identity()
                && *element == RotationElement::Identity));
    }

    #[test]
    fn contraction_readout_matches_every_tree_edge_classification_prediction_shape() {
        // every surviving decoration is an honest element: its denominator
        // divides kmn, and begins-balanced edges always keep a survivor
        for lm in [house_map(), three_vertex_map(), house_oneorbit_map(), circle_map()] {
            for e in lm.graph().edge_ids() {
                if !lm.labeling().is_tree_edge(e) {
                    continue;
                }
                let c = classify_edge(&lm, e).unwrap();
                let q = c.m * c.n;
                for k in 1..=2u64 {
                    let found = detect_in_contraction(&lm, e, k);
                    for (_, _, element) in &found {
                        assert!(q * k % element.denominator() == 0);
                    }
                    if c.begins1 == c.begins2 {
                        assert!(
                            found
                                .iter()
                                .any(|(_, _, el)| *el == RotationElement::Identity),
                            "edge {e:?} k {k}"
                        );
                    }
                }
            }
        }
    }

    // --- windows -------------------------------------------------------------

    #[test]
    fn decoration_windows_cover_each_power_exactly_once_on_the_fixtures() {
        // For the frozen fixtures the k-th power path carries the decorated
        // lifts w^i·γ for 0 ≤ i < k and nothing else.
        let cases: Vec<(LiftedVertexMap, &str, &str, Word)> = vec![
            (analysis_map(&three_vertex_map(), eid(&three_vertex_map(), "E3"))
                .unwrap()
                .unwrap(), "V3", "E3", w("a")),
            (house_map(), "V5", "E1", w("ab")),
        ];
        for (lm, v, e, word) in cases {
            let v = vid(&lm, v);
            let e = eid(&lm, e);
            let gammas = gamma_words(&lm, e, v, &word).unwrap();
            for k in 1..=3i64 {
                let p = p_path(&lm, v, &word, k as u64);
                let found: BTreeSet<Word> = p
                    .steps()
                    .iter()
                    .filter(|s| s.edge == e)
                    .map(|s| s.prefix.clone())
                    .collect();
                let expected: BTreeSet<Word> = (0..k)
                    .flat_map(|i| {
                        let power = word.pow(i);
                        gammas.iter().map(move |g| power.concat_reduce(g))
                    })
                    .collect();
                assert_eq!(found, expected, "window mismatch at k = {k}");
            }
        }
    }

    // --- predictions are honest about their witnesses -------------------------

    #[test]
    fn every_prediction_is_normalized_and_witnessed_at_its_own_denominator() {
        let maps: Vec<(LiftedVertexMap, &str)> = vec![
            (three_vertex_map(), "E3"),
            (theta_map(), "E2"),
            (theta_both_begin_map(), "E1"),
            (theta_distinct_roots_map(), "E1"),
        ];
        for (lm, e) in maps {
            let c = classify_edge(&lm, eid(&lm, e)).unwrap();
            for p in predicted_elements(&c, 4) {
                assert_eq!(p.period_witness, p.q.max(1));
                assert!(p.element.denominator() <= p.q.max(1));
                assert!(p.q == 0 || p.period_witness % p.element.denominator() == 0);
                if let Some(gamma) = &p.gamma {
                    let base = match p.source_theorem {
                        GuaranteeTag::CommonRootInterval => {
                            c.common_root.clone().unwrap().0
                        }
                        _ => {
                            if c.gamma1.contains(gamma)
                                && conjugacy_equal(
                                    &p.element,
                                    &normalize_rot(
                                        &c.w1.pow(p.p as i64).concat_reduce(gamma),
                                        p.q,
                                    ),
                                )
                            {
                                c.w1.clone()
                            } else {
                                c.w2.clone()
                            }
                        }
                    };
                    let rebuilt = base.pow(p.p as i64).concat_reduce(gamma);
                    let direct = normalize_rot(&rebuilt, p.q);
                    // the stored element is exactly the normalized readout,
                    // up to the root orientation chosen during canonicalizing
                    assert!(
                        p.element == direct
                            || p.element
                                == normalize_rot(&rebuilt.invert(), p.q),
                        "prediction {p:?} does not rebuild"
                    );
                }
            }
        }
    }
}
