//! Exact coefficient arithmetic.
//!
//! A [`Scalar`] is a multivariate polynomial with rational coefficients in
//! named [`Param`]s. Untagged params are ground-ring symbols (structure
//! constants such as `alpha` or `c`); tagged params are dot-ring generators
//! sitting on a particular strand of a particular color.

pub(crate) mod parse;
mod ring_map;

pub use parse::{parse_scalar, ParseError};
pub use ring_map::{RingMapKind, RingMapSpec};

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("generator {0} has no image under the ring map")]
    UnmappedGenerator(Param),
    #[error("cyclic binding through parameter {0}")]
    CyclicBinding(Param),
    #[error(
        "color mismatch for {param}: strand {position} has color {found}, expected {expected}"
    )]
    ColorMismatch {
        param: Param,
        position: u32,
        expected: Color,
        found: Color,
    },
    #[error("{param} refers to strand {position}, outside {len} ambient strands")]
    PositionOutOfRange {
        param: Param,
        position: u32,
        len: usize,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A strand color (an object generator of a colored strand category).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Color(Arc<str>);

impl Color {
    pub fn new(name: &str) -> Self {
        Color(Arc::from(name))
    }

    /// Placeholder color carried by tags parsed from text before the
    /// surrounding relation fixes the strand colors.
    pub fn unresolved() -> Self {
        Color(Arc::from(""))
    }

    pub fn is_unresolved(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

/// Strand position (1-based) and color of a dot-ring generator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Tag {
    pub position: u32,
    pub color: Color,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Param {
    name: Arc<str>,
    tag: Option<Tag>,
}

impl Param {
    pub fn new(name: &str) -> Self {
        Param {
            name: Arc::from(name),
            tag: None,
        }
    }

    pub fn tagged(name: &str, color: Color, position: u32) -> Self {
        Param {
            name: Arc::from(name),
            tag: Some(Tag { position, color }),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tag(&self) -> Option<&Tag> {
        self.tag.as_ref()
    }

    pub fn is_generator(&self) -> bool {
        self.tag.is_some()
    }

    pub(crate) fn with_tag(&self, tag: Option<Tag>) -> Param {
        Param {
            name: self.name.clone(),
            tag,
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.tag {
            None => f.write_str(&self.name),
            Some(t) => write!(f, "{}[{}]", self.name, t.position),
        }
    }
}

impl fmt::Debug for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.tag {
            Some(t) if !t.color.is_unresolved() => {
                write!(f, "{}[{}:{}]", self.name, t.color, t.position)
            }
            _ => write!(f, "{self}"),
        }
    }
}

/// A monomial in params: sorted `(param, exponent)` pairs with positive
/// exponents.
///
/// Ordered by total degree (higher first), then lexicographically, so that
/// iteration over a [`Scalar`] lists leading terms first.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(Vec<(Param, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(p: Param) -> Self {
        Monomial(vec![(p, 1)])
    }

    pub fn from_factors(factors: impl IntoIterator<Item = (Param, u32)>) -> Self {
        let mut map: BTreeMap<Param, u32> = BTreeMap::new();
        for (p, e) in factors {
            *map.entry(p).or_default() += e;
        }
        Monomial(map.into_iter().filter(|(_, e)| *e > 0).collect())
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Param, u32)] {
        &self.0
    }

    pub fn exponent(&self, p: &Param) -> u32 {
        self.0
            .binary_search_by(|(q, _)| q.cmp(p))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    /// Splits into the factors accepted by `pred` and the rest.
    pub fn split(&self, pred: impl Fn(&Param) -> bool) -> (Monomial, Monomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.0.iter().cloned().partition(|(p, _)| pred(p));
        (Monomial(a), Monomial(b))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    fn map_params(&self, f: impl Fn(&Param) -> Param) -> Monomial {
        Monomial::from_factors(self.0.iter().map(|(p, e)| (f(p), *e)))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .degree()
            .cmp(&self.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, (p, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Polynomial over the rationals in named params, kept in canonical form:
/// no zero coefficients and one entry per monomial.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar {
    terms: BTreeMap<Monomial, Rational>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::constant(Rational::from_integer(BigInt::from(n)))
    }

    pub fn constant(c: Rational) -> Self {
        Scalar::term(c, Monomial::one())
    }

    pub fn param(p: Param) -> Self {
        Scalar::term(Rational::one(), Monomial::var(p))
    }

    /// Shorthand for an untagged param.
    pub fn var(name: &str) -> Self {
        Scalar::param(Param::new(name))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Scalar { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut s = Scalar::zero();
        for (m, c) in terms {
            s.add_term(m, c);
        }
        s
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// The value if this is a constant (degree 0); zero counts as constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next()
    }

    pub fn params(&self) -> BTreeSet<Param> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(p, _)| p.clone()))
            .collect()
    }

    pub fn has_generators(&self) -> bool {
        self.terms
            .keys()
            .any(|m| m.0.iter().any(|(p, _)| p.is_generator()))
    }

    pub fn scale(&self, c: &Rational) -> Scalar {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Scalar {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            terms: self.terms.iter().map(|(n, k)| (n.mul(m), k * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Scalar {
        let mut base = self.clone();
        let mut acc = Scalar::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Simultaneous substitution of params by scalars.
    ///
    /// Bindings must be acyclic: a bound param may not occur, directly or
    /// through other bound params, in its own image.
    pub fn substitute(&self, bindings: &BTreeMap<Param, Scalar>) -> Result<Scalar, ScalarError> {
        check_acyclic(bindings)?;
        Ok(self.substitute_unchecked(bindings))
    }

    pub(crate) fn substitute_unchecked(&self, bindings: &BTreeMap<Param, Scalar>) -> Scalar {
        if bindings.is_empty() {
            return self.clone();
        }
        let mut out = Scalar::zero();
        for (m, c) in &self.terms {
            let mut acc = Scalar::constant(c.clone());
            let mut kept = Vec::new();
            for (p, e) in &m.0 {
                match bindings.get(p) {
                    Some(img) => acc = &acc * &img.pow(*e),
                    None => kept.push((p.clone(), *e)),
                }
            }
            let acc = acc.mul_monomial(&Monomial(kept), &Rational::one());
            out += &acc;
        }
        out
    }

    /// Renames params term by term (a ring map sending params to params).
    pub fn map_params(&self, f: impl Fn(&Param) -> Param) -> Scalar {
        Scalar::from_terms(
            self.terms
                .iter()
                .map(|(m, c)| (m.map_params(&f), c.clone())),
        )
    }

    /// Groups terms by their factor in the params selected by `pred`,
    /// returning `monomial-in-selected -> coefficient polynomial in the rest`.
    pub fn coefficients_in(&self, pred: impl Fn(&Param) -> bool) -> BTreeMap<Monomial, Scalar> {
        let mut out: BTreeMap<Monomial, Scalar> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (sel, rest) = m.split(&pred);
            out.entry(sel).or_default().add_term(rest, c.clone());
        }
        out.retain(|_, s| !s.is_zero());
        out
    }

    /// Scales to integer coefficients with positive leading coefficient,
    /// without dividing out the content (so `2*b` stays `2*b`).
    pub fn integer_normalized(&self) -> Scalar {
        let Some((_, lead)) = self.leading() else {
            return Scalar::zero();
        };
        let lcm = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut k = Rational::from_integer(lcm);
        if lead.is_negative() {
            k = -k;
        }
        self.scale(&k)
    }

    /// Rescales so the leading coefficient is 1.
    pub fn monic(&self) -> Scalar {
        match self.leading() {
            None => Scalar::zero(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }
}

fn check_acyclic(bindings: &BTreeMap<Param, Scalar>) -> Result<(), ScalarError> {
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state: BTreeMap<&Param, u8> = BTreeMap::new();
    fn visit<'a>(
        p: &'a Param,
        bindings: &'a BTreeMap<Param, Scalar>,
        state: &mut BTreeMap<&'a Param, u8>,
    ) -> Result<(), ScalarError> {
        match state.get(p) {
            Some(1) => return Err(ScalarError::CyclicBinding(p.clone())),
            Some(2) => return Ok(()),
            _ => {}
        }
        state.insert(p, 1);
        if let Some(img) = bindings.get(p) {
            for m in img.terms.keys() {
                for (q, _) in &m.0 {
                    if bindings.contains_key(q) {
                        let q = bindings.get_key_value(q).unwrap().0;
                        visit(q, bindings, state)?;
                    }
                }
            }
        }
        state.insert(p, 2);
        Ok(())
    }
    for p in bindings.keys() {
        visit(p, bindings, &mut state)?;
    }
    Ok(())
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(c: Rational) -> Self {
        Scalar::constant(c)
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(mut self, rhs: Scalar) -> Scalar {
        self += &rhs;
        self
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

pub(crate) fn fmt_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                f.write_str(&fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_rational(&abs))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl std::str::FromStr for Scalar {
    type Err = ScalarError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(parse_scalar(s)?)
    }
}

/// Embeds a polynomial written in local strand positions into an ambient
/// color sequence: local strand `q` becomes ambient strand `offset + q`.
///
/// Tags whose color is still unresolved adopt the ambient color; resolved
/// tags must match it.
pub fn embed(f: &Scalar, offset: u32, ambient: &[Color]) -> Result<Scalar, ScalarError> {
    let mut renames: BTreeMap<Param, Param> = BTreeMap::new();
    for p in f.params() {
        if let Some(tag) = p.tag() {
            let pos = tag.position + offset;
            if tag.position == 0 || pos as usize > ambient.len() {
                return Err(ScalarError::PositionOutOfRange {
                    param: p.clone(),
                    position: pos,
                    len: ambient.len(),
                });
            }
            let found = &ambient[pos as usize - 1];
            if !tag.color.is_unresolved() && &tag.color != found {
                return Err(ScalarError::ColorMismatch {
                    param: p.clone(),
                    position: pos,
                    expected: tag.color.clone(),
                    found: found.clone(),
                });
            }
            renames.insert(
                p.clone(),
                p.with_tag(Some(Tag {
                    position: pos,
                    color: found.clone(),
                })),
            );
        }
    }
    if renames.is_empty() {
        return Ok(f.clone());
    }
    Ok(f.map_params(|p| renames.get(p).cloned().unwrap_or_else(|| p.clone())))
}

/// Places an element of a single-strand dot ring onto strand `position`
/// (1-based) of `ambient`.
pub fn tensor_embed(f: &Scalar, position: u32, ambient: &[Color]) -> Result<Scalar, ScalarError> {
    if position == 0 {
        return Err(ScalarError::PositionOutOfRange {
            param: f
                .params()
                .into_iter()
                .next()
                .unwrap_or_else(|| Param::new("1")),
            position,
            len: ambient.len(),
        });
    }
    // A single-strand element only carries local position 1.
    embed(f, position - 1, ambient)
}
