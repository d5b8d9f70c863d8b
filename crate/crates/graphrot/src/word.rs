//! Free-group word algebra over an abstract generator alphabet.
//!
//! Purpose: elements of the fundamental group of a graph are freely reduced
//! words over the generators attached to the non-tree edges of a coherent
//! labeling.  This module provides those words, together with the derived
//! notion of a *rotation element* `w^{p/q}` — a formal rational power of a
//! primitive word — and the closure set `S` generated by a pair of rotation
//! elements.
//!
//! Why this design:
//! - `Word` owns its free reduction as a constructor invariant, so every
//!   value in the program is already reduced and equality is syntactic.
//! - Rotation-element normalization folds `(w^k)^{1/n}` to `w^{k/n}`, keeps
//!   the exponent strictly positive by inverting the base when needed, and
//!   keeps the base primitive (never a proper power).  This gives a unique
//!   normal form, so set membership and equality need no group theory.
//! - Conjugacy is decided on cyclically reduced cores by rotation matching,
//!   which is sound and complete in a free group.
//! - All rational arithmetic is exact arbitrary precision; there are no
//!   tolerances anywhere in this crate.

use std::collections::BTreeSet;
use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use thiserror::Error;

/// Errors from word-level operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    /// The empty word is not a power of any primitive word.
    #[error("identity has no primitive root")]
    IdentityHasNoPrimitiveRoot,
}

/// Index into the generator table of the labeling a word was read from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenId(pub u32);

/// Deterministic printable name for a generator: `a`..`z`, then `g26`, `g27`, …
pub fn gen_name(id: GenId) -> String {
    if id.0 < 26 {
        char::from(b'a' + id.0 as u8).to_string()
    } else {
        format!("g{}", id.0)
    }
}

/// Whether a letter is a generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// One letter of a word: a generator with a sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub gen: GenId,
    pub sign: Sign,
}

impl Letter {
    pub fn plus(gen: GenId) -> Letter {
        Letter { gen, sign: Sign::Plus }
    }

    pub fn minus(gen: GenId) -> Letter {
        Letter { gen, sign: Sign::Minus }
    }

    pub fn inverse(self) -> Letter {
        Letter { gen: self.gen, sign: self.sign.flip() }
    }

    /// True when the two letters cancel as an adjacent pair.
    fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.sign != other.sign
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == Sign::Minus {
            write!(f, "~")?;
        }
        write!(f, "{}", gen_name(self.gen))
    }
}

/// A freely reduced word: no adjacent mutually inverse letters.
/// The empty word is the group identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    /// The identity element (empty word).
    pub fn identity() -> Word {
        Word { letters: Vec::new() }
    }

    /// The one-letter word for a generator.
    pub fn generator(gen: GenId) -> Word {
        Word { letters: vec![Letter::plus(gen)] }
    }

    /// Builds a word from arbitrary letters, freely reducing them.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            match out.last() {
                Some(&top) if top.cancels(l) => {
                    out.pop();
                }
                _ => out.push(l),
            }
        }
        Word { letters: out }
    }

    /// Parses a compact ASCII spelling like `a~ba` (a · b⁻¹ · a).
    /// Only single-character generator names `a`..`z` are recognized;
    /// intended for tests and debugging, not for data interchange.
    #[doc(hidden)]
    pub fn from_ascii(s: &str) -> Word {
        let mut letters = Vec::new();
        let mut invert_next = false;
        for c in s.chars() {
            match c {
                '~' => invert_next = true,
                '1' => {} // conventional spelling of the identity
                'a'..='z' => {
                    let gen = GenId(c as u32 - 'a' as u32);
                    letters.push(if invert_next { Letter::minus(gen) } else { Letter::plus(gen) });
                    invert_next = false;
                }
                _ => panic!("unsupported character {c:?} in word literal {s:?}"),
            }
        }
        assert!(!invert_next, "dangling '~' in word literal {s:?}");
        Word::from_letters(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// True for the group identity.
    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Freely reduced concatenation `self · other`.
    pub fn concat_reduce(&self, other: &Word) -> Word {
        let mut out = self.letters.clone();
        for &l in &other.letters {
            match out.last() {
                Some(&top) if top.cancels(l) => {
                    out.pop();
                }
                _ => out.push(l),
            }
        }
        Word { letters: out }
    }

    /// The group inverse: reversed letters with flipped signs.
    pub fn invert(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    /// Appends one letter on the right, reducing.
    pub fn push_reduce(&self, l: Letter) -> Word {
        let mut out = self.letters.clone();
        match out.last() {
            Some(&top) if top.cancels(l) => {
                out.pop();
            }
            _ => out.push(l),
        }
        Word { letters: out }
    }

    /// `self` raised to an integer power (negative powers invert first).
    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.invert() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.concat_reduce(&base);
        }
        out
    }

    /// Splits `w = conjugator · core · conjugator⁻¹` with `core` cyclically
    /// reduced (its first and last letters are not mutually inverse).
    pub fn cyclically_reduce(&self) -> (Word, Word) {
        let mut core = self.letters.clone();
        let mut conj = Vec::new();
        while core.len() >= 2 {
            let first = core[0];
            let last = core[core.len() - 1];
            if first.cancels(last) {
                conj.push(first);
                core.remove(0);
                core.pop();
            } else {
                break;
            }
        }
        (Word { letters: core }, Word { letters: conj })
    }

    /// Writes `self = u^k` with `u` primitive (not a proper power) and `k`
    /// maximal.  Operates on the cyclically reduced core and re-conjugates,
    /// so `g·h·h·g⁻¹` yields `(g·h·g⁻¹, 2)`.
    pub fn primitive_root(&self) -> Result<(Word, u64), WordError> {
        if self.is_identity() {
            return Err(WordError::IdentityHasNoPrimitiveRoot);
        }
        let (core, conj) = self.cyclically_reduce();
        let letters = core.letters();
        let len = letters.len();
        // Smallest period d dividing len: letters[i] == letters[i mod d].
        // d == len always qualifies, so the loop terminates with k >= 1.
        for d in 1..=len {
            if len % d != 0 {
                continue;
            }
            if (d..len).all(|i| letters[i] == letters[i - d]) {
                let root_core = Word { letters: letters[..d].to_vec() };
                let root = conj.concat_reduce(&root_core).concat_reduce(&conj.invert());
                return Ok((root, (len / d) as u64));
            }
        }
        unreachable!("d = len always satisfies the periodicity check");
    }

    /// All prefixes of `self`, from empty to the full word.
    /// Every prefix of a reduced word is reduced.
    pub fn initial_subwords(&self) -> Vec<Word> {
        (0..=self.letters.len())
            .map(|i| Word { letters: self.letters[..i].to_vec() })
            .collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// A normalized formal rational power of a word.
///
/// Invariants (enforced by [`RotationElement::from_root_power`]):
/// - `base` is nonempty, freely reduced, and primitive;
/// - `exponent` is in lowest terms and strictly positive — negative
///   exponents are canonicalized by inverting the base;
/// - the identity carries no base or exponent at all, so `1¹` and `w⁰`
///   compare equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RotationElement {
    Identity,
    Rational { base: Word, exponent: BigRational },
}

impl RotationElement {
    /// Normalizing constructor: `base^exponent` with an arbitrary word and
    /// an arbitrary exact rational.  Folds proper powers into the exponent
    /// (`(w^k)^r = w^{kr}`), inverts the base for negative exponents, and
    /// collapses zero exponents and empty bases to the identity.
    pub fn from_root_power(base: &Word, exponent: BigRational) -> RotationElement {
        if base.is_identity() || exponent.is_zero() {
            return RotationElement::Identity;
        }
        let (root, k) = base.primitive_root().expect("nonempty word has a primitive root");
        let exp = exponent * BigRational::from_integer(BigInt::from(k));
        if exp.is_negative() {
            RotationElement::Rational { base: root.invert(), exponent: -exp }
        } else {
            RotationElement::Rational { base: root, exponent: exp }
        }
    }

    /// The reduced denominator of the exponent; `1` for the identity.
    /// This is the smallest period at which the element can be realized.
    pub fn denominator(&self) -> u64 {
        match self {
            RotationElement::Identity => 1,
            RotationElement::Rational { exponent, .. } => {
                let d = exponent.denom();
                d.try_into().expect("denominator fits in u64 for artifact-scale inputs")
            }
        }
    }
}

impl fmt::Display for RotationElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RotationElement::Identity => write!(f, "1"),
            RotationElement::Rational { base, exponent } => {
                if exponent.denom().is_one() {
                    write!(f, "{base}^{}", exponent.numer())
                } else {
                    write!(f, "{base}^{}/{}", exponent.numer(), exponent.denom())
                }
            }
        }
    }
}

/// The rotation element of a point whose `n`-th lifted image is the deck
/// translate by `w`: the formal `n`-th root `w^{1/n}`, normalized.
pub fn normalize_rot(w: &Word, n: u64) -> RotationElement {
    assert!(n >= 1, "a period is a positive integer");
    RotationElement::from_root_power(w, BigRational::new(BigInt::one(), BigInt::from(n)))
}

/// True when `a` and `b` are equal cyclic words (conjugate in the free group).
fn cyclic_rotation_equal(a: &Word, b: &Word) -> bool {
    let (ca, _) = a.cyclically_reduce();
    let (cb, _) = b.cyclically_reduce();
    if ca.len() != cb.len() {
        return false;
    }
    if ca.is_empty() {
        return true;
    }
    // A cyclically reduced word doubled contains every rotation of itself as
    // a contiguous block; no free reduction can occur inside the doubling.
    let doubled: Vec<Letter> = ca.letters().iter().chain(ca.letters()).copied().collect();
    doubled.windows(cb.len()).any(|win| win == cb.letters())
}

/// Equality of rotation elements up to conjugacy of the base: exponents must
/// match exactly and the cyclically reduced cores must be cyclic rotations of
/// one another.
pub fn conjugacy_equal(r1: &RotationElement, r2: &RotationElement) -> bool {
    match (r1, r2) {
        (RotationElement::Identity, RotationElement::Identity) => true,
        (
            RotationElement::Rational { base: b1, exponent: e1 },
            RotationElement::Rational { base: b2, exponent: e2 },
        ) => e1 == e2 && cyclic_rotation_equal(b1, b2),
        _ => false,
    }
}

/// Finds a primitive word `w` with `w1 = w^{k1}` and `w2 = w^{k2}` for
/// nonzero integers `k1`, `k2` where possible.  An empty input contributes
/// exponent `0` against the other word's primitive root; two empty inputs
/// have no common root.
pub fn common_primitive(w1: &Word, w2: &Word) -> Option<(Word, i64, i64)> {
    match (w1.is_identity(), w2.is_identity()) {
        (true, true) => None,
        (true, false) => {
            let (root, k2) = w2.primitive_root().expect("nonempty");
            Some((root, 0, k2 as i64))
        }
        (false, true) => {
            let (root, k1) = w1.primitive_root().expect("nonempty");
            Some((root, k1 as i64, 0))
        }
        (false, false) => {
            let (r1, k1) = w1.primitive_root().expect("nonempty");
            let (r2, k2) = w2.primitive_root().expect("nonempty");
            if r1 == r2 {
                Some((r1, k1 as i64, k2 as i64))
            } else if r1 == r2.invert() {
                Some((r1, k1 as i64, -(k2 as i64)))
            } else {
                None
            }
        }
    }
}

/// The closure set `S(w1^{1/m}, w2^{1/n})` truncated at sequence length
/// `max_len`, with the realized denominator `r·m + s·n` of each element
/// (`r`, `s` = occurrence counts of `w1`, `w2` in the sequence).
/// One normalized element can be realized at several denominators; all
/// realizations up to the length bound are kept.
pub fn generate_s_with_denominators(
    w1: &Word,
    m: u64,
    w2: &Word,
    n: u64,
    max_len: u32,
) -> BTreeSet<(RotationElement, u64)> {
    assert!(m >= 1 && n >= 1, "periods are positive");
    assert!(max_len >= 1, "at least the length-one sequences are generated");
    assert!(max_len <= 24, "sequence enumeration is exponential in max_len");
    let mut out = BTreeSet::new();
    for len in 1..=max_len {
        for mask in 0u64..(1u64 << len) {
            let mut v = Word::identity();
            let mut denom = 0u64;
            for bit in 0..len {
                if mask >> bit & 1 == 0 {
                    v = v.concat_reduce(w1);
                    denom += m;
                } else {
                    v = v.concat_reduce(w2);
                    denom += n;
                }
            }
            out.insert((normalize_rot(&v, denom), denom));
        }
    }
    out
}

/// The closure set `S(w1^{1/m}, w2^{1/n})` truncated at sequence length
/// `max_len`: normalized elements only, duplicates merged.
pub fn generate_s(w1: &Word, m: u64, w2: &Word, n: u64, max_len: u32) -> BTreeSet<RotationElement> {
    generate_s_with_denominators(w1, m, w2, n, max_len)
        .into_iter()
        .map(|(el, _)| el)
        .collect()
}
