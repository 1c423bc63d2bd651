//! Symmetric-group expressions: inversions, triples, higher inversion sets,
//! packet flips, the triple-projection order and commutation classes.
//!
//! Words are written top to bottom: the rightmost letter is the lowest
//! crossing and acts first, so `st` evaluates to `s∘t`.

mod commute;
mod flip;
mod graph;
mod order;
mod sink;

pub use commute::{arrange_consecutive, comm_canonical, commutation_class_bfs, Arrangement};
pub use flip::{
    apply_packet_flip, find_flippable_packet, full_triples, higher_inversion_set, FlipSite,
};
pub use graph::{
    expression_graph, ExpressionGraph, GraphEdge, GraphKind, QuotientGraph, RelationKind,
};
pub use order::{leq, leq3, triple_projection, Comparison};
pub use sink::{minimal_nonreduced_window, sink, Move, SinkResult};

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MsError {
    #[error("letter s_{index} is out of range for {n} strands")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("strand counts differ: {0} vs {1}")]
    StrandMismatch(usize, usize),
    #[error("expression {0} is not reduced")]
    NotReduced(String),
    #[error("no braid pattern at position {0}")]
    NoMatch(usize),
    #[error("pairs do not form an inversion set: triple {0} is neither prefix nor suffix")]
    NotInversionSet(Triple),
    #[error("pair {0} occurs twice in the crossing sequence")]
    RepeatedPair(StrandPair),
    #[error("budget of {0} moves exhausted")]
    Divergence(usize),
    #[error("more than {0} vertices")]
    ResourceLimit(usize),
    #[error("cannot embed S_{n} into S_{m} at offset {k}")]
    Embedding { n: usize, m: usize, k: usize },
    #[error("cannot parse {input:?}: {message}")]
    Parse { input: String, message: String },
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

const LETTERS: &[u8] = b"stuvwxyz";

/// A permutation in one-line notation: `w(i)` is the final position of the
/// strand that starts at position `i`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (1..=n as u8).collect(),
        }
    }

    pub fn from_images(images: Vec<u8>) -> Result<Self, MsError> {
        let n = images.len();
        let mut seen = vec![false; n + 1];
        for &x in &images {
            let x = x as usize;
            if x == 0 || x > n || seen[x] {
                return Err(MsError::Parse {
                    input: format!("{images:?}"),
                    message: "not a bijection of 1..n".into(),
                });
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u8] {
        &self.images
    }

    /// `w(i)` for 1-based `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1] as usize
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.n()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize - 1] = i as u8 + 1;
        }
        Permutation { images: inv }
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: other
                .images
                .iter()
                .map(|&x| self.images[x as usize - 1])
                .collect(),
        }
    }

    pub fn length(&self) -> usize {
        inversion_set(self).len()
    }

    pub fn longest(n: usize) -> Self {
        Permutation {
            images: (1..=n as u8).rev().collect(),
        }
    }

    /// All permutations of `n`, in lexicographic order of one-line notation.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<u8> = (1..=n as u8).collect();
        loop {
            out.push(Permutation {
                images: cur.clone(),
            });
            // next lexicographic permutation
            let Some(i) = (1..cur.len()).rev().find(|&i| cur[i - 1] < cur[i]) else {
                break;
            };
            let j = (i..cur.len()).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }

    /// A reduced expression: repeatedly peel off the lowest descent.
    pub fn reduced_expression(&self) -> Expression {
        // Bubble sort the positions; each swap is one crossing read bottom
        // to top.
        let n = self.n();
        // arr[pos] = strand currently at pos, target arrangement inverse(w)
        let target = self.inverse();
        let mut arr: Vec<u8> = (1..=n as u8).collect();
        let mut bottom_up = Vec::new();
        for pos in 0..n {
            let want = target.images[pos];
            let mut k = arr.iter().position(|&x| x == want).unwrap();
            while k > pos {
                arr.swap(k - 1, k);
                bottom_up.push(k as u8);
                k -= 1;
            }
        }
        bottom_up.reverse();
        Expression {
            n,
            letters: bottom_up,
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n() <= 9 {
            for x in &self.images {
                write!(f, "{x}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.images.iter().map(|x| x.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for Permutation {
    type Err = MsError;
    fn from_str(src: &str) -> Result<Self, MsError> {
        let t = src.trim().trim_start_matches('[').trim_end_matches(']');
        let bad = |m: &str| MsError::Parse {
            input: src.to_string(),
            message: m.to_string(),
        };
        let images: Vec<u8> = if t.contains(',') || t.contains(' ') {
            t.split([',', ' '])
                .filter(|p| !p.is_empty())
                .map(|p| p.trim().parse::<u8>().map_err(|_| bad("expected integers")))
                .collect::<Result<_, _>>()?
        } else {
            t.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as u8)
                        .ok_or_else(|| bad("expected digits"))
                })
                .collect::<Result<_, _>>()?
        };
        if images.is_empty() {
            return Err(bad("empty permutation"));
        }
        Permutation::from_images(images).map_err(|_| bad("not a bijection of 1..n"))
    }
}

/// A word in the simple transpositions `s_1..s_{n-1}` of `S_n`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Expression {
    n: usize,
    letters: Vec<u8>,
}

impl Expression {
    pub fn new(n: usize, letters: Vec<u8>) -> Result<Self, MsError> {
        for &l in &letters {
            if l == 0 || l as usize >= n {
                return Err(MsError::IndexOutOfRange {
                    index: l as usize,
                    n,
                });
            }
        }
        Ok(Expression { n, letters })
    }

    pub(crate) fn new_unchecked(n: usize, letters: Vec<u8>) -> Self {
        debug_assert!(letters.iter().all(|&l| l >= 1 && (l as usize) < n));
        Expression { n, letters }
    }

    pub fn empty(n: usize) -> Self {
        Expression {
            n,
            letters: Vec::new(),
        }
    }

    /// Parses letters `s t u v …` (for `s_1 s_2 …`) or separated indices
    /// such as `1 2 1` or `1,2,1`; `ε`, `e`, `id` or the empty string mean
    /// the empty word.
    pub fn parse(n: usize, src: &str) -> Result<Self, MsError> {
        let t = src.trim();
        let bad = |m: String| MsError::Parse {
            input: src.to_string(),
            message: m,
        };
        if t.is_empty() || t == "ε" || t == "e" || t == "id" {
            return Expression::new(n, Vec::new());
        }
        let letters: Vec<u8> = if t.chars().any(|c| c.is_ascii_digit()) {
            t.split(|c: char| c == ',' || c.is_whitespace() || c == '.')
                .filter(|p| !p.is_empty())
                .map(|p| p.parse::<u8>().map_err(|_| bad(format!("bad index {p:?}"))))
                .collect::<Result<_, _>>()?
        } else {
            t.chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| {
                    LETTERS
                        .iter()
                        .position(|&l| l as char == c)
                        .map(|i| i as u8 + 1)
                        .ok_or_else(|| bad(format!("unknown letter {c:?}")))
                })
                .collect::<Result<_, _>>()?
        };
        Expression::new(n, letters)
    }

    /// Parses a word and takes the smallest strand count that fits it
    /// (at least `min_n`).
    pub fn parse_auto(src: &str, min_n: usize) -> Result<Self, MsError> {
        let probe = Expression::parse(usize::from(u8::MAX), src)?;
        let n = probe
            .letters
            .iter()
            .map(|&l| l as usize + 1)
            .max()
            .unwrap_or(1)
            .max(min_n);
        Ok(Expression {
            n,
            letters: probe.letters,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn with_letters(&self, letters: Vec<u8>) -> Expression {
        Expression::new_unchecked(self.n, letters)
    }

    pub fn concat(&self, other: &Expression) -> Result<Expression, MsError> {
        if self.n != other.n {
            return Err(MsError::StrandMismatch(self.n, other.n));
        }
        let mut l = self.letters.clone();
        l.extend_from_slice(&other.letters);
        Ok(Expression {
            n: self.n,
            letters: l,
        })
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Expression {
        Expression {
            n: self.n,
            letters: self.letters[range].to_vec(),
        }
    }

    /// All words of exactly `len` letters, in lexicographic order.
    pub fn all_of_length(n: usize, len: usize) -> Vec<Expression> {
        if n < 2 {
            return if len == 0 {
                vec![Expression::empty(n)]
            } else {
                Vec::new()
            };
        }
        let k = n - 1;
        let total = k.pow(len as u32);
        (0..total)
            .map(|mut code| {
                let mut letters = vec![0u8; len];
                for slot in letters.iter_mut().rev() {
                    *slot = (code % k) as u8 + 1;
                    code /= k;
                }
                Expression { n, letters }
            })
            .collect()
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("ε");
        }
        if self.n <= LETTERS.len() + 1 {
            for &l in &self.letters {
                write!(f, "{}", LETTERS[l as usize - 1] as char)?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.letters.iter().map(|x| x.to_string()).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}

impl Serialize for Expression {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A pair of strands `(i|j)` with `i < j`, 1-based.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct StrandPair(pub u8, pub u8);

impl StrandPair {
    pub fn new(a: u8, b: u8) -> Self {
        if a < b {
            StrandPair(a, b)
        } else {
            StrandPair(b, a)
        }
    }
}

impl fmt::Display for StrandPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}|{})", self.0, self.1)
    }
}

impl Serialize for StrandPair {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A triple of strands `(i|j|k)` with `i < j < k`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Triple(pub u8, pub u8, pub u8);

impl Triple {
    /// The packet `((i|j), (i|k), (j|k))` in lexicographic order.
    pub fn packet(&self) -> [StrandPair; 3] {
        [
            StrandPair(self.0, self.1),
            StrandPair(self.0, self.2),
            StrandPair(self.1, self.2),
        ]
    }

    pub fn contains(&self, s: u8) -> bool {
        s == self.0 || s == self.1 || s == self.2
    }

    pub fn all(n: usize) -> Vec<Triple> {
        let n = n as u8;
        let mut out = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                for k in j + 1..=n {
                    out.push(Triple(i, j, k));
                }
            }
        }
        out
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}|{}|{})", self.0, self.1, self.2)
    }
}

impl Serialize for Triple {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Composes the transpositions bottom to top.
pub fn evaluate(e: &Expression) -> Permutation {
    let mut arr: Vec<u8> = (1..=e.n as u8).collect();
    for &l in e.letters.iter().rev() {
        arr.swap(l as usize - 1, l as usize);
    }
    // arr[pos] = strand at pos; w(strand) = pos
    let mut images = vec![0u8; e.n];
    for (pos, &s) in arr.iter().enumerate() {
        images[s as usize - 1] = pos as u8 + 1;
    }
    Permutation { images }
}

/// The pair of strands crossed by each letter, listed bottom to top.
pub fn crossing_sequence(e: &Expression) -> Vec<StrandPair> {
    let mut arr: Vec<u8> = (1..=e.n as u8).collect();
    let mut out = Vec::with_capacity(e.len());
    for &l in e.letters.iter().rev() {
        let p = l as usize - 1;
        out.push(StrandPair::new(arr[p], arr[p + 1]));
        arr.swap(p, p + 1);
    }
    out
}

/// Pairs `(i|j)`, `i < j`, whose strands end up in the opposite order,
/// i.e. `w(i) > w(j)`.
pub fn inversion_set(w: &Permutation) -> BTreeSet<StrandPair> {
    let n = w.n();
    let mut out = BTreeSet::new();
    for i in 1..=n {
        for j in i + 1..=n {
            if w.apply(i) > w.apply(j) {
                out.insert(StrandPair(i as u8, j as u8));
            }
        }
    }
    out
}

pub fn is_reduced(e: &Expression) -> bool {
    // Reduced iff no pair is crossed twice.
    let mut seen = BTreeSet::new();
    crossing_sequence(e).into_iter().all(|p| seen.insert(p))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct TripleClass {
    pub prefix: bool,
    pub suffix: bool,
    pub full: bool,
}

impl TripleClass {
    pub fn neither(&self) -> bool {
        !self.prefix && !self.suffix
    }
}

pub fn classify_triple(set: &BTreeSet<StrandPair>, t: Triple) -> TripleClass {
    let [a, b, c] = t.packet().map(|p| set.contains(&p));
    TripleClass {
        prefix: matches!(
            (a, b, c),
            (false, false, false) | (true, false, false) | (true, true, false) | (true, true, true)
        ),
        suffix: matches!(
            (a, b, c),
            (false, false, false) | (false, false, true) | (false, true, true) | (true, true, true)
        ),
        full: a && b && c,
    }
}

/// Checks that every triple is prefix or suffix; on failure returns a
/// triple that is neither.
pub fn is_inversion_set(set: &BTreeSet<StrandPair>, n: usize) -> Result<(), Triple> {
    match Triple::all(n)
        .into_iter()
        .find(|&t| classify_triple(set, t).neither())
    {
        Some(t) => Err(t),
        None => Ok(()),
    }
}

/// Checks the packet-order conditions characterising crossing sequences of
/// reduced expressions. The outer error is a violated precondition; the
/// inner one is a triple whose packet is ordered wrongly.
pub fn validate_crossing_order(
    seq: &[StrandPair],
    n: usize,
) -> Result<Result<(), Triple>, MsError> {
    let mut rank = std::collections::BTreeMap::new();
    for (k, &p) in seq.iter().enumerate() {
        if p.0 == 0 || p.1 as usize > n || p.0 >= p.1 {
            return Err(MsError::IndexOutOfRange {
                index: p.1 as usize,
                n,
            });
        }
        if rank.insert(p, k).is_some() {
            return Err(MsError::RepeatedPair(p));
        }
    }
    let set: BTreeSet<StrandPair> = rank.keys().copied().collect();
    if let Err(t) = is_inversion_set(&set, n) {
        return Err(MsError::NotInversionSet(t));
    }
    for t in Triple::all(n) {
        let class = classify_triple(&set, t);
        let ranks: Vec<usize> = t
            .packet()
            .iter()
            .filter_map(|p| rank.get(p).copied())
            .collect();
        let lex = ranks.windows(2).all(|w| w[0] < w[1]);
        let antilex = ranks.windows(2).all(|w| w[0] > w[1]);
        let ok = if class.full {
            lex || antilex
        } else if class.prefix {
            lex
        } else {
            antilex
        };
        if !ok {
            return Ok(Err(t));
        }
    }
    Ok(Ok(()))
}

/// Shifts `s_i` to `s_{i+k}` inside `S_m`.
pub fn parabolic_embed(e: &Expression, m: usize, k: usize) -> Result<Expression, MsError> {
    if k + e.n > m {
        return Err(MsError::Embedding { n: e.n, m, k });
    }
    Ok(Expression {
        n: m,
        letters: e.letters.iter().map(|&l| l + k as u8).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(n: usize, s: &str) -> Expression {
        Expression::parse(n, s).unwrap()
    }

    fn pairs(list: &[(u8, u8)]) -> BTreeSet<StrandPair> {
        list.iter().map(|&(a, b)| StrandPair(a, b)).collect()
    }

    #[test]
    fn evaluation() {
        assert_eq!(evaluate(&ex(3, "sts")).images(), &[3, 2, 1]);
        assert_eq!(evaluate(&ex(3, "")), Permutation::identity(3));
        assert_eq!(evaluate(&ex(2, "ss")), Permutation::identity(2));
        // composition is right to left
        assert_eq!(
            evaluate(&ex(3, "st")),
            evaluate(&ex(3, "s")).compose(&evaluate(&ex(3, "t")))
        );
    }

    #[test]
    fn crossing_sequences() {
        let cs = |s: &str| crossing_sequence(&ex(3, s));
        assert_eq!(
            cs("sts"),
            vec![StrandPair(1, 2), StrandPair(1, 3), StrandPair(2, 3)]
        );
        assert_eq!(
            cs("tst"),
            vec![StrandPair(2, 3), StrandPair(1, 3), StrandPair(1, 2)]
        );
        assert_eq!(
            cs("ststs"),
            vec![
                StrandPair(1, 2),
                StrandPair(1, 3),
                StrandPair(2, 3),
                StrandPair(1, 2),
                StrandPair(1, 3)
            ]
        );
    }

    #[test]
    fn inversion_sets() {
        assert_eq!(
            inversion_set(&Permutation::longest(3)),
            pairs(&[(1, 2), (1, 3), (2, 3)])
        );
        assert!(inversion_set(&Permutation::identity(4)).is_empty());
        assert_eq!(inversion_set(&"2134".parse().unwrap()), pairs(&[(1, 2)]));
    }

    #[test]
    fn reducedness() {
        assert!(is_reduced(&ex(3, "sts")));
        assert!(!is_reduced(&ex(2, "ss")));
        assert!(is_reduced(&ex(4, "stsuts")));
        for w in Permutation::all(4) {
            let r = w.reduced_expression();
            assert_eq!(evaluate(&r), w);
            assert!(is_reduced(&r));
        }
    }

    #[test]
    fn triple_classes() {
        let t = Triple(1, 2, 3);
        assert!(classify_triple(&pairs(&[(1, 3)]), t).neither());
        assert!(classify_triple(&pairs(&[(1, 2), (1, 3), (2, 3)]), t).full);
        let c = classify_triple(&BTreeSet::new(), t);
        assert!(c.prefix && c.suffix && !c.full);
    }

    #[test]
    fn inversion_set_recognition() {
        assert_eq!(is_inversion_set(&pairs(&[(1, 3)]), 3), Err(Triple(1, 2, 3)));
        assert!(is_inversion_set(&pairs(&[(1, 2), (1, 3)]), 3).is_ok());
        let all: BTreeSet<_> = (1..=5u8)
            .flat_map(|i| (i + 1..=5).map(move |j| StrandPair(i, j)))
            .collect();
        assert!(is_inversion_set(&all, 5).is_ok());
    }

    #[test]
    fn crossing_orders() {
        let p = |v: &[(u8, u8)]| v.iter().map(|&(a, b)| StrandPair(a, b)).collect::<Vec<_>>();
        assert_eq!(
            validate_crossing_order(&p(&[(1, 2), (1, 3), (2, 3)]), 3),
            Ok(Ok(()))
        );
        assert_eq!(
            validate_crossing_order(&p(&[(1, 2), (2, 3), (1, 3)]), 3),
            Ok(Err(Triple(1, 2, 3)))
        );
        assert_eq!(validate_crossing_order(&p(&[(1, 2)]), 3), Ok(Ok(())));
        assert!(validate_crossing_order(&p(&[(1, 3)]), 3).is_err());
    }

    #[test]
    fn embedding() {
        assert_eq!(parabolic_embed(&ex(3, "sts"), 4, 1).unwrap(), ex(4, "tut"));
        assert_eq!(parabolic_embed(&ex(3, "sts"), 3, 0).unwrap(), ex(3, "sts"));
        assert!(parabolic_embed(&ex(3, "sts"), 3, 1).is_err());
    }

    #[test]
    fn parsing() {
        assert_eq!(ex(4, "1 2 1"), ex(4, "sts"));
        assert_eq!(ex(4, "ε").len(), 0);
        assert!(Expression::parse(3, "u").is_err());
        assert_eq!(
            "4321".parse::<Permutation>().unwrap(),
            Permutation::longest(4)
        );
        assert!("4421".parse::<Permutation>().is_err());
    }
}
