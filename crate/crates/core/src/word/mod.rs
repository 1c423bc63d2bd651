//! Rewriting systems on free monoids and the classical diamond lemma.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::ms::Comparison;
use crate::scalar::parse::{parse_expr, rational_bits, Evaluator, ParseError};
use crate::scalar::{fmt_rational, Color, Param, Scalar, ScalarError};

mod ambiguity;
mod complete;
mod order;
mod rewrite;

pub use ambiguity::{
    bergman_check, check_ambiguity, count_irreducible, enumerate_irreducible,
    enumerate_minimal_ambiguities, Ambiguity, AmbiguityKind, AmbiguityReport, BergmanOptions,
    BergmanReport, IrreducibleCount, RelativeCheck, RuleSite,
};
pub use complete::{complete, CompletionResult, CompletionStatus};
pub use order::{OrderSpec, WordOrder};
pub use rewrite::{
    normal_form, normal_form_random, reduce_once, validate_system, NormalForm, TraceStep,
    ValidationReport, Violation,
};

pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum WordError {
    #[error("duplicate letter {0:?}")]
    DuplicateLetter(String),
    #[error("{0:?} is not a word over the alphabet")]
    UnknownLetter(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("rule {0}: left-hand side must be a nonempty word")]
    EmptyLhs(String),
    #[error(
        "rule {0}: left-hand side must be a single word with an invertible constant coefficient"
    )]
    NotMonomial(String),
    #[error("rule {rule} does not match {word} at position {position}")]
    NoMatch {
        rule: String,
        word: String,
        position: usize,
    },
    #[error("no normal form within {budget} steps")]
    Divergence {
        budget: usize,
        trace: Vec<TraceStep>,
    },
    #[error("rule {rule} rewrote {from} to {to}, which is not smaller ({comparison:?})")]
    OrderViolation {
        rule: String,
        from: String,
        to: String,
        comparison: Comparison,
    },
    #[error("order {0} is not usable here")]
    Order(String),
    #[error("completion stuck on {residual}: {reason}")]
    CompletionStuck { residual: String, reason: String },
}

/// Ordered set of generator names. A letter is its index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(names: impl IntoIterator<Item = S>) -> Result<Self, WordError> {
        let mut out: Vec<String> = Vec::new();
        for n in names {
            let n = n.as_ref().to_string();
            if n.is_empty()
                || !n.chars().all(|c| c.is_alphanumeric() || c == '_')
                || n.starts_with(|c: char| c.is_ascii_digit())
            {
                return Err(WordError::UnknownLetter(n));
            }
            if out.contains(&n) {
                return Err(WordError::DuplicateLetter(n));
            }
            out.push(n);
        }
        Ok(Alphabet { names: out })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Option<u16> {
        self.names.iter().position(|n| n == name).map(|k| k as u16)
    }

    fn single_chars(&self) -> bool {
        self.names.iter().all(|n| n.chars().count() == 1)
    }

    /// Splits juxtaposed letter names, e.g. `zyx`; `None` if impossible.
    pub fn split(&self, s: &str) -> Option<Word> {
        // back[i]: a letter ending at byte i and the start of its match
        let mut back: Vec<Option<(usize, u16)>> = vec![None; s.len() + 1];
        let mut reach = vec![false; s.len() + 1];
        reach[0] = true;
        for i in 0..s.len() {
            if !reach[i] || !s.is_char_boundary(i) {
                continue;
            }
            for (k, n) in self.names.iter().enumerate() {
                if s[i..].starts_with(n.as_str()) && !reach[i + n.len()] {
                    reach[i + n.len()] = true;
                    back[i + n.len()] = Some((i, k as u16));
                }
            }
        }
        if !reach[s.len()] {
            return None;
        }
        let mut out = Vec::new();
        let mut i = s.len();
        while i > 0 {
            let (j, l) = back[i]?;
            out.push(l);
            i = j;
        }
        out.reverse();
        Some(Word(out))
    }

    /// Parses a single word; `1`, `ε` and the empty string are the empty word.
    pub fn parse_word(&self, s: &str) -> Result<Word, WordError> {
        let t = s.trim();
        if t.is_empty() || t == "1" || t == "ε" {
            return Ok(Word::empty());
        }
        let mut letters = Vec::new();
        for part in t.split(|c: char| c.is_whitespace() || c == '·' || c == '*') {
            if part.is_empty() {
                continue;
            }
            letters.extend(
                self.split(part)
                    .ok_or_else(|| WordError::UnknownLetter(part.to_string()))?
                    .0,
            );
        }
        Ok(Word(letters))
    }

    pub fn render(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".into();
        }
        let sep = if self.single_chars() { "" } else { " " };
        w.0.iter()
            .map(|&l| self.names[l as usize].as_str())
            .collect::<Vec<_>>()
            .join(sep)
    }

    pub fn render_lincomb(&self, t: &LinComb) -> String {
        if t.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (w, c)) in t.terms.iter().rev().enumerate() {
            let (neg, body) = match c.as_constant() {
                Some(q) => {
                    let neg = q < BigRational::zero();
                    let a = if neg { -q } else { q };
                    let body = if w.is_empty() {
                        fmt_rational(&a)
                    } else if a.is_one() {
                        self.render(w)
                    } else {
                        format!(
                            "{}{}{}",
                            fmt_rational(&a),
                            if a.is_integer() && self.single_chars() {
                                ""
                            } else {
                                " "
                            },
                            self.render(w)
                        )
                    };
                    (neg, body)
                }
                None if w.is_empty() => (false, format!("({c})")),
                None => (false, format!("({c}) {}", self.render(w))),
            };
            match (k, neg) {
                (0, true) => s.push('-'),
                (0, false) => {}
                (_, true) => s.push_str(" - "),
                (_, false) => s.push_str(" + "),
            }
            s.push_str(&body);
        }
        s
    }

    /// Parses a linear combination such as `xyz + z + 2y + 3x` or `c*beta st`.
    ///
    /// Identifiers that split into letters are words; other identifiers are
    /// scalar parameters. Scalars commute with letters.
    pub fn parse_lincomb(&self, src: &str) -> Result<LinComb, WordError> {
        Ok(LinCombEval { alphabet: self }.eval(&parse_expr(src)?)?)
    }
}

/// A monomial: a sequence of letter indices. Ordered by length, then
/// lexicographically by index.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<u16>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[u16] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn slice(&self, a: usize, b: usize) -> Word {
        Word(self.0[a..b].to_vec())
    }

    pub fn occurs_at(&self, sub: &Word, position: usize) -> bool {
        position + sub.len() <= self.len() && self.0[position..position + sub.len()] == sub.0[..]
    }

    /// Replaces `len` letters at `position` by `middle`.
    pub fn splice(&self, position: usize, len: usize, middle: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() - len + middle.len());
        v.extend_from_slice(&self.0[..position]);
        v.extend_from_slice(&middle.0);
        v.extend_from_slice(&self.0[position + len..]);
        Word(v)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Finite linear combination of words with nonzero scalar coefficients.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct LinComb {
    terms: BTreeMap<Word, Scalar>,
}

impl LinComb {
    pub fn zero() -> Self {
        LinComb::default()
    }

    pub fn word(w: Word) -> Self {
        Self::term(w, Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Self::term(Word::empty(), c)
    }

    pub fn term(w: Word, c: Scalar) -> Self {
        let mut t = LinComb::zero();
        t.add_term(w, &c);
        t
    }

    pub fn add_term(&mut self, w: Word, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn words(&self) -> impl DoubleEndedIterator<Item = &Word> {
        self.terms.keys()
    }

    pub fn coefficient(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(Scalar::zero)
    }

    pub(crate) fn remove(&mut self, w: &Word) -> Option<Scalar> {
        self.terms.remove(w)
    }

    pub fn scale(&self, c: &Scalar) -> LinComb {
        let mut out = LinComb::zero();
        for (w, d) in &self.terms {
            out.add_term(w.clone(), &(d * c));
        }
        out
    }

    pub fn add(&self, other: &LinComb) -> LinComb {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &LinComb) -> LinComb {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), &-c);
        }
        out
    }

    /// Product in the free algebra: concatenation of words.
    pub fn mul(&self, other: &LinComb) -> LinComb {
        let mut out = LinComb::zero();
        for (a, c) in &self.terms {
            for (b, d) in &other.terms {
                out.add_term(a.concat(b), &(c * d));
            }
        }
        out
    }

    /// `left · self · right` for words.
    pub fn sandwich(&self, left: &Word, right: &Word) -> LinComb {
        let mut out = LinComb::zero();
        for (w, c) in &self.terms {
            out.add_term(left.concat(w).concat(right), c);
        }
        out
    }
}

struct LinCombEval<'a> {
    alphabet: &'a Alphabet,
}

impl Evaluator for LinCombEval<'_> {
    type Value = LinComb;
    fn constant(&self, c: BigRational) -> LinComb {
        LinComb::constant(Scalar::constant(c))
    }
    fn ident(
        &self,
        name: &str,
        tag: Option<(Option<String>, u32)>,
        _: usize,
    ) -> Result<LinComb, ParseError> {
        if let Some((color, pos)) = tag {
            let color = color
                .map(|c| Color::new(&c))
                .unwrap_or_else(Color::unresolved);
            return Ok(LinComb::constant(Scalar::param(Param::tagged(
                name, color, pos,
            ))));
        }
        if let Some(w) = self.alphabet.split(name) {
            return Ok(LinComb::word(w));
        }
        if name == "ε" {
            return Ok(LinComb::word(Word::empty()));
        }
        Ok(LinComb::constant(Scalar::var(name)))
    }
    fn add(&self, a: LinComb, b: &LinComb) -> LinComb {
        a.add(b)
    }
    fn mul(&self, a: &LinComb, b: &LinComb) -> LinComb {
        a.mul(b)
    }
    fn scale(&self, a: &LinComb, c: &BigRational) -> LinComb {
        a.scale(&Scalar::constant(c.clone()))
    }
    fn size(&self, a: &LinComb) -> usize {
        a.terms.values().map(|c| c.len()).sum()
    }
    fn degree(&self, a: &LinComb) -> u32 {
        a.terms
            .iter()
            .map(|(w, c)| (w.len() as u32).max(c.degree()))
            .max()
            .unwrap_or(0)
    }
    fn bits(&self, a: &LinComb) -> u64 {
        a.terms
            .values()
            .flat_map(|c| c.terms().map(|(_, k)| rational_bits(k)))
            .max()
            .unwrap_or(0)
    }
}

/// `W_r ↦ f_r`, with every word of `f_r` below `W_r` in the active order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteRule {
    pub label: String,
    pub lhs: Word,
    pub rhs: LinComb,
}

impl RewriteRule {
    pub fn new(label: impl Into<String>, lhs: Word, rhs: LinComb) -> Result<Self, WordError> {
        let label = label.into();
        if lhs.is_empty() {
            return Err(WordError::EmptyLhs(label));
        }
        Ok(RewriteRule { label, lhs, rhs })
    }

    /// Builds a rule from `c·W = f`, dividing through by `c`.
    pub fn from_relation(
        label: impl Into<String>,
        lhs: &LinComb,
        rhs: &LinComb,
    ) -> Result<Self, WordError> {
        let label = label.into();
        let mut it = lhs.terms();
        let (w, c) = match (it.next(), it.next()) {
            (Some(t), None) => t,
            _ => return Err(WordError::NotMonomial(label)),
        };
        let c = c
            .as_constant()
            .filter(|c| !c.is_zero())
            .ok_or_else(|| WordError::NotMonomial(label.clone()))?;
        let rhs = rhs.scale(&Scalar::constant(c.recip()));
        Self::new(label, w.clone(), rhs)
    }
}

/// Generators, rules and a compatible order.
#[derive(Clone, Debug)]
pub struct RewriteSystem {
    pub alphabet: Alphabet,
    pub rules: Vec<RewriteRule>,
    pub order: OrderSpec,
}

impl RewriteSystem {
    pub fn new(alphabet: Alphabet, order: OrderSpec, rules: Vec<RewriteRule>) -> Self {
        RewriteSystem {
            alphabet,
            rules,
            order,
        }
    }

    /// Adds a rule written as text, e.g. `("zy", "yz + 3")`.
    pub fn push_rule(&mut self, label: &str, lhs: &str, rhs: &str) -> Result<(), WordError> {
        let l = self.alphabet.parse_lincomb(lhs)?;
        let r = self.alphabet.parse_lincomb(rhs)?;
        self.rules.push(RewriteRule::from_relation(label, &l, &r)?);
        Ok(())
    }

    pub fn compare(&self, a: &Word, b: &Word) -> Comparison {
        self.order.compare(a, b)
    }

    pub fn word(&self, s: &str) -> Result<Word, WordError> {
        self.alphabet.parse_word(s)
    }

    pub fn lincomb(&self, s: &str) -> Result<LinComb, WordError> {
        self.alphabet.parse_lincomb(s)
    }

    pub fn render(&self, w: &Word) -> String {
        self.alphabet.render(w)
    }

    pub fn render_lincomb(&self, t: &LinComb) -> String {
        self.alphabet.render_lincomb(t)
    }

    /// First match scanning positions left to right, lowest rule index first.
    pub fn first_match(&self, w: &Word) -> Option<(usize, usize)> {
        (0..w.len()).find_map(|p| {
            self.rules
                .iter()
                .position(|r| w.occurs_at(&r.lhs, p))
                .map(|r| (r, p))
        })
    }

    pub fn all_matches(&self, w: &Word) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for p in 0..w.len() {
            for (r, rule) in self.rules.iter().enumerate() {
                if w.occurs_at(&rule.lhs, p) {
                    out.push((r, p));
                }
            }
        }
        out
    }

    pub fn is_irreducible(&self, w: &Word) -> bool {
        self.first_match(w).is_none()
    }
}
