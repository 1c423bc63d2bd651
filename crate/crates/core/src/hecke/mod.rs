//! Colored strand categories with dots: rewriting of decorated expressions
//! modulo distant commutation, and the minimal ambiguity checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::ms::{comm_canonical, inversion_set, sink, Expression, MsError, Permutation};
use crate::scalar::{embed, parse_scalar, Color, Param, RingMapSpec, Scalar, ScalarError};

mod ambiguity;
mod reduce;

pub use ambiguity::{
    check_all, check_instance, derive_conditions, instantiate_ambiguities, AmbiguityInstance,
    CheckOptions, ConditionSet, DotMode, HeckeCheckReport, InstanceReport, Instantiation, Template,
};
pub use reduce::{
    hecke_reduce, hecke_reduce_random, push_dots_left, HeckeReduction, HeckeStep, HeckeTerm, Redex,
    RedexKind,
};

pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum HeckeError {
    #[error("unknown color {0:?}")]
    UnknownColor(String),
    #[error("missing relation: {0}")]
    MissingRelation(String),
    #[error("spurious relation: {0}")]
    SpuriousRelation(String),
    #[error("{0}: the scalar λ must be a nonzero ground constant")]
    NonUnitLambda(String),
    #[error("{relation}: lower term {word} is not allowed for this coloring")]
    BadLowerTerm { relation: String, word: String },
    #[error("{relation}: coefficient outside its dot ring: {message}")]
    CoefficientRing { relation: String, message: String },
    #[error("{map}: {message}")]
    MapCoverage { map: String, message: String },
    #[error("crossing of {left} over {right} at letter {position} is not permitted")]
    NotPermissible {
        position: usize,
        left: Color,
        right: Color,
    },
    #[error("{input:?}: {message}")]
    Parse { input: String, message: String },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Ms(#[from] MsError),
    #[error("no normal form within {0} steps")]
    Divergence(usize),
    #[error("rewrite step did not decrease the order: {0}")]
    OrderViolation(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("basis refused: {0}")]
    Uncertified(String),
}

/// `sts = λ tst + Σ lower`, keyed by the bottom colors of the strands.
/// Lower terms are words in `s = 1`, `t = 2` with coefficients in the dot
/// ring of the top colors, written in local strands `1..=3`.
#[derive(Clone, Debug, PartialEq)]
pub struct BraidRelation {
    pub lambda: Scalar,
    pub lower: BTreeMap<Vec<u8>, Scalar>,
}

/// Relation shape of a bottom color triple `(c1, c2, c3)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BraidPattern {
    Iii,
    Iij,
    Jii,
    Iji,
    Ijk,
}

impl BraidPattern {
    pub fn of(c: &[Color; 3]) -> Self {
        match (c[0] == c[1], c[1] == c[2], c[0] == c[2]) {
            (true, true, _) => BraidPattern::Iii,
            (true, false, _) => BraidPattern::Iij,
            (false, true, _) => BraidPattern::Jii,
            (false, false, true) => BraidPattern::Iji,
            _ => BraidPattern::Ijk,
        }
    }

    /// Lower words a relation of this shape may contain.
    pub fn allowed_lower(self) -> &'static [&'static [u8]] {
        match self {
            BraidPattern::Iii => &[&[1, 2], &[2, 1], &[1], &[2], &[]],
            BraidPattern::Iij => &[&[1, 2]],
            BraidPattern::Jii => &[&[2, 1]],
            BraidPattern::Iji => &[&[]],
            BraidPattern::Ijk => &[],
        }
    }
}

/// Letter of a decorated word, read top to bottom.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    /// Crossing of the strands at positions `p, p+1` (1-based).
    Cross(u8),
    /// Multiplication by a polynomial in the dot rings at this height.
    Dot(Scalar),
}

#[derive(Clone, Debug, Default)]
pub struct HeckePresentation {
    pub name: String,
    pub colors: Vec<Color>,
    pub permissible: BTreeSet<(Color, Color)>,
    /// Generator names of each color's dot ring.
    pub dot_generators: BTreeMap<Color, Vec<String>>,
    /// `σσ = α σ + β` for `(i, i)` permitted; coefficients in local strands 1, 2.
    pub quadratic: BTreeMap<Color, (Scalar, Scalar)>,
    /// `σ_ij σ_ji = Q`, keyed by the bottom pair `(j, i)`.
    pub square: BTreeMap<(Color, Color), Scalar>,
    pub braid: BTreeMap<[Color; 3], BraidRelation>,
    /// Dot maps through a crossing, keyed by its bottom pair.
    pub phi: BTreeMap<(Color, Color), RingMapSpec>,
    /// Twisted derivations for same-color crossings.
    pub partial: BTreeMap<Color, RingMapSpec>,
}

pub(crate) fn show_colors(c: &[Color]) -> String {
    c.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(",")
}

fn letters_name(w: &[u8]) -> String {
    if w.is_empty() {
        return "id".into();
    }
    w.iter().map(|&l| ['s', 't'][l as usize - 1]).collect()
}

impl HeckePresentation {
    pub fn color(&self, name: &str) -> Result<Color, HeckeError> {
        self.colors
            .iter()
            .find(|c| c.as_str() == name)
            .cloned()
            .ok_or_else(|| HeckeError::UnknownColor(name.into()))
    }

    pub fn parse_colors(&self, src: &str) -> Result<Vec<Color>, HeckeError> {
        src.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| self.color(s))
            .collect()
    }

    pub fn permits(&self, a: &Color, b: &Color) -> bool {
        self.permissible.contains(&(a.clone(), b.clone()))
    }

    pub fn braid_guard(&self, c: &[Color; 3]) -> bool {
        self.permits(&c[0], &c[1]) && self.permits(&c[0], &c[2]) && self.permits(&c[1], &c[2])
    }

    /// Dot-ring generators of the strands `colors`, tagged by position.
    pub fn generators_of(&self, colors: &[Color]) -> Vec<Param> {
        let mut out = Vec::new();
        for (k, c) in colors.iter().enumerate() {
            for g in self.dot_generators.get(c).into_iter().flatten() {
                out.push(Param::tagged(g, c.clone(), k as u32 + 1));
            }
        }
        out
    }

    /// Untagged params occurring in relation coefficients.
    pub fn structure_params(&self) -> BTreeSet<Param> {
        let mut out = BTreeSet::new();
        let mut add = |s: &Scalar| out.extend(s.params().into_iter().filter(|p| !p.is_generator()));
        for (a, b) in self.quadratic.values() {
            add(a);
            add(b);
        }
        self.square.values().for_each(&mut add);
        for r in self.braid.values() {
            add(&r.lambda);
            r.lower.values().for_each(&mut add);
        }
        for m in self.phi.values().chain(self.partial.values()) {
            m.images.values().for_each(&mut add);
        }
        out
    }

    /// Replaces structure params by values throughout.
    pub fn substitute(
        &self,
        values: &BTreeMap<Param, Scalar>,
    ) -> Result<HeckePresentation, HeckeError> {
        let sub = |s: &Scalar| s.substitute(values);
        let mut p = self.clone();
        for (a, b) in p.quadratic.values_mut() {
            *a = sub(a)?;
            *b = sub(b)?;
        }
        for q in p.square.values_mut() {
            *q = sub(q)?;
        }
        for r in p.braid.values_mut() {
            r.lambda = sub(&r.lambda)?;
            let mut lower = BTreeMap::new();
            for (w, c) in &r.lower {
                let c = sub(c)?;
                if !c.is_zero() {
                    lower.insert(w.clone(), c);
                }
            }
            r.lower = lower;
        }
        for m in p.phi.values_mut().chain(p.partial.values_mut()) {
            for v in m.images.values_mut() {
                *v = sub(v)?;
            }
            if let crate::scalar::RingMapKind::TwistedDerivation { twist } = &m.kind {
                let mut t = (**twist).clone();
                for v in t.images.values_mut() {
                    *v = sub(v)?;
                }
                m.kind = crate::scalar::RingMapKind::TwistedDerivation {
                    twist: std::sync::Arc::new(t),
                };
            }
        }
        Ok(p)
    }

    /// Checks that relations are present exactly where their guards hold,
    /// that every λ is a nonzero constant, that coefficients live in the
    /// right dot rings and that dot maps cover every generator.
    pub fn validate(&self) -> Result<(), HeckeError> {
        let known: BTreeSet<&Color> = self.colors.iter().collect();
        for (a, b) in &self.permissible {
            for c in [a, b] {
                if !known.contains(c) {
                    return Err(HeckeError::UnknownColor(c.as_str().into()));
                }
            }
        }
        for c in self.dot_generators.keys() {
            if !known.contains(c) {
                return Err(HeckeError::UnknownColor(c.as_str().into()));
            }
        }
        // quadratic and square relations
        for i in &self.colors {
            let has = self.quadratic.contains_key(i);
            let name = format!("quadratic {i}");
            match (self.permits(i, i), has) {
                (true, false) => return Err(HeckeError::MissingRelation(name)),
                (false, true) => return Err(HeckeError::SpuriousRelation(name)),
                _ => {}
            }
            if let Some((a, b)) = self.quadratic.get(i) {
                let top = [i.clone(), i.clone()];
                self.check_ring(&name, a, &top)?;
                self.check_ring(&name, b, &top)?;
            }
        }
        for j in &self.colors {
            for i in &self.colors {
                if i == j {
                    continue;
                }
                let name = format!("square {j},{i}");
                let need = self.permits(i, j) && self.permits(j, i);
                match (need, self.square.get(&(j.clone(), i.clone()))) {
                    (true, None) => return Err(HeckeError::MissingRelation(name)),
                    (false, Some(_)) => return Err(HeckeError::SpuriousRelation(name)),
                    (true, Some(q)) => self.check_ring(&name, q, &[j.clone(), i.clone()])?,
                    _ => {}
                }
            }
        }
        for i in self.quadratic.keys() {
            if !self.permits(i, i) {
                return Err(HeckeError::SpuriousRelation(format!("quadratic {i}")));
            }
        }
        for (j, i) in self.square.keys() {
            if i == j || !self.permits(i, j) || !self.permits(j, i) {
                return Err(HeckeError::SpuriousRelation(format!("square {j},{i}")));
            }
        }
        // braid relations
        for key in self.braid.keys() {
            if !self.braid_guard(key) {
                return Err(HeckeError::SpuriousRelation(format!(
                    "braid {}",
                    show_colors(key)
                )));
            }
        }
        for c1 in &self.colors {
            for c2 in &self.colors {
                for c3 in &self.colors {
                    let key = [c1.clone(), c2.clone(), c3.clone()];
                    if !self.braid_guard(&key) {
                        continue;
                    }
                    let name = format!("braid {}", show_colors(&key));
                    let r = self
                        .braid
                        .get(&key)
                        .ok_or_else(|| HeckeError::MissingRelation(name.clone()))?;
                    match r.lambda.as_constant() {
                        Some(l) if !num_traits::Zero::is_zero(&l) => {}
                        _ => {
                            if r.lambda.is_zero() || r.lambda.has_generators() {
                                return Err(HeckeError::NonUnitLambda(name));
                            }
                        }
                    }
                    let allowed = BraidPattern::of(&key).allowed_lower();
                    let top = [c3.clone(), c2.clone(), c1.clone()];
                    for (w, c) in &r.lower {
                        if !allowed.contains(&w.as_slice()) {
                            return Err(HeckeError::BadLowerTerm {
                                relation: name,
                                word: letters_name(w),
                            });
                        }
                        self.check_ring(&name, c, &top)?;
                    }
                }
            }
        }
        // dot maps
        for (a, b) in &self.permissible {
            let gens = self.generators_of(&[a.clone(), b.clone()]);
            let name = format!("phi {a},{b}");
            let phi = self.phi.get(&(a.clone(), b.clone()));
            if gens.is_empty() {
                continue;
            }
            let phi = phi.ok_or_else(|| HeckeError::MapCoverage {
                map: name.clone(),
                message: "missing".into(),
            })?;
            self.check_map(&name, phi, &gens, &[b.clone(), a.clone()])?;
            if a == b {
                let name = format!("partial {a}");
                let d = self.partial.get(a).ok_or_else(|| HeckeError::MapCoverage {
                    map: name.clone(),
                    message: "missing".into(),
                })?;
                self.check_map(&name, d, &gens, &[a.clone(), a.clone()])?;
                if d.twist() != Some(phi) {
                    return Err(HeckeError::MapCoverage {
                        map: name,
                        message: "must be twisted by phi".into(),
                    });
                }
            }
        }
        for (a, b) in self.phi.keys() {
            if !self.permits(a, b) {
                return Err(HeckeError::SpuriousRelation(format!("phi {a},{b}")));
            }
        }
        for a in self.partial.keys() {
            if !self.permits(a, a) {
                return Err(HeckeError::SpuriousRelation(format!("partial {a}")));
            }
        }
        Ok(())
    }

    fn check_ring(&self, relation: &str, f: &Scalar, colors: &[Color]) -> Result<(), HeckeError> {
        let bad = |message: String| HeckeError::CoefficientRing {
            relation: relation.into(),
            message,
        };
        for p in f.params() {
            let Some(tag) = p.tag() else { continue };
            let pos = tag.position as usize;
            if pos == 0 || pos > colors.len() {
                return Err(bad(format!("{p} is on strand {pos} of {}", colors.len())));
            }
            let c = &colors[pos - 1];
            if &tag.color != c {
                return Err(bad(format!("{p} should have color {c}")));
            }
            if !self
                .dot_generators
                .get(c)
                .is_some_and(|g| g.iter().any(|g| g == p.name()))
            {
                return Err(bad(format!("{p} is not a generator of color {c}")));
            }
        }
        Ok(())
    }

    fn check_map(
        &self,
        name: &str,
        m: &RingMapSpec,
        gens: &[Param],
        target: &[Color],
    ) -> Result<(), HeckeError> {
        for g in gens {
            let img = m.images.get(g).ok_or_else(|| HeckeError::MapCoverage {
                map: name.into(),
                message: format!("no image for {g}"),
            })?;
            self.check_ring(name, img, target)?;
        }
        for k in m.images.keys() {
            if !gens.contains(k) {
                return Err(HeckeError::MapCoverage {
                    map: name.into(),
                    message: format!("{k} is not a generator"),
                });
            }
        }
        Ok(())
    }

    /// Colors at each gap of a word: entry `g` lies just above letter `g`,
    /// entry `len` is the bottom.
    pub fn gap_colors(
        &self,
        bottom: &[Color],
        letters: &[Letter],
    ) -> Result<Vec<Vec<Color>>, HeckeError> {
        let mut out = vec![bottom.to_vec()];
        let mut cur = bottom.to_vec();
        for (k, l) in letters.iter().enumerate().rev() {
            if let Letter::Cross(p) = l {
                let p = *p as usize;
                if p == 0 || p >= cur.len() {
                    return Err(HeckeError::Ms(MsError::IndexOutOfRange {
                        index: p,
                        n: cur.len(),
                    }));
                }
                if !self.permits(&cur[p - 1], &cur[p]) {
                    return Err(HeckeError::NotPermissible {
                        position: k,
                        left: cur[p - 1].clone(),
                        right: cur[p].clone(),
                    });
                }
                cur.swap(p - 1, p);
            }
            out.push(cur.clone());
        }
        out.reverse();
        Ok(out)
    }

    /// Permutations carrying `bottom` to `top` whose crossings are permitted.
    pub fn permissible_permutations(&self, bottom: &[Color], top: &[Color]) -> Vec<Permutation> {
        if bottom.len() != top.len() {
            return Vec::new();
        }
        Permutation::all(bottom.len())
            .into_iter()
            .filter(|w| (1..=bottom.len()).all(|i| top[w.apply(i) - 1] == bottom[i - 1]))
            .filter(|w| {
                inversion_set(w)
                    .iter()
                    .all(|pr| self.permits(&bottom[pr.0 as usize - 1], &bottom[pr.1 as usize - 1]))
            })
            .collect()
    }

    /// One sink reduced expression per permissible permutation.
    pub fn enumerate_basis(
        &self,
        bottom: &[Color],
        top: &[Color],
    ) -> Result<Vec<Expression>, HeckeError> {
        let mut out = Vec::new();
        for w in self.permissible_permutations(bottom, top) {
            let s = sink(&w.reduced_expression(), DEFAULT_BUDGET)?.sink;
            out.push(comm_canonical(&s));
        }
        out.sort();
        Ok(out)
    }

    /// The basis of `Hom(bottom, top)` over the dots, refused unless
    /// `report` found every ambiguity resolvable.
    pub fn certified_basis(
        &self,
        report: &HeckeCheckReport,
        bottom: &[Color],
        top: &[Color],
    ) -> Result<Vec<Expression>, HeckeError> {
        if !report.bergman {
            let n = report.unresolvable().count();
            return Err(HeckeError::Uncertified(format!(
                "{n} ambiguity instances are not resolvable"
            )));
        }
        self.enumerate_basis(bottom, top)
    }

    /// Parses a decorated word such as `st{x[1]}s`: crossing letters
    /// `s, t, u, …` (or `σ1`, `σ2`, …) and dots in braces, top to bottom.
    /// Dot positions are absolute strand positions at that height.
    pub fn parse_decorated(&self, bottom: &[Color], src: &str) -> Result<Vec<Letter>, HeckeError> {
        let letters = parse_decorated_raw(src)?;
        self.resolve(bottom, letters)
    }

    /// Resolves the colors of dot tags against the heights they sit at.
    pub fn resolve(
        &self,
        bottom: &[Color],
        mut letters: Vec<Letter>,
    ) -> Result<Vec<Letter>, HeckeError> {
        let gaps = self.gap_colors(bottom, &letters)?;
        for (k, l) in letters.iter_mut().enumerate() {
            if let Letter::Dot(f) = l {
                let g = embed(f, 0, &gaps[k])?;
                self.check_ring("dot", &g, &gaps[k])?;
                *f = g;
            }
        }
        Ok(letters)
    }
}

/// Syntax of decorated words without color information.
pub fn parse_decorated_raw(src: &str) -> Result<Vec<Letter>, HeckeError> {
    const NAMES: &str = "stuvwxyz";
    let err = |m: &str| HeckeError::Parse {
        input: src.into(),
        message: m.into(),
    };
    let mut out = Vec::new();
    let mut it = src.char_indices().peekable();
    while let Some((i, c)) = it.next() {
        match c {
            c if c.is_whitespace() || c == '·' || c == '*' => {}
            'ε' => {}
            '{' => {
                let mut depth = 1;
                let start = i + 1;
                let mut end = None;
                for (j, d) in it.by_ref() {
                    match d {
                        '{' => depth += 1,
                        '}' => {
                            depth -= 1;
                            if depth == 0 {
                                end = Some(j);
                                break;
                            }
                        }
                        _ => {}
                    }
                }
                let end = end.ok_or_else(|| err("unclosed '{'"))?;
                let f = parse_scalar(&src[start..end]).map_err(|e| err(&e.to_string()))?;
                out.push(Letter::Dot(f));
            }
            'σ' => {
                let mut num = String::new();
                while let Some(&(_, d)) = it.peek() {
                    if d.is_ascii_digit() {
                        num.push(d);
                        it.next();
                    } else {
                        break;
                    }
                }
                let p: u8 = num
                    .parse()
                    .ok()
                    .filter(|p| *p > 0)
                    .ok_or_else(|| err("σ needs a positive index"))?;
                out.push(Letter::Cross(p));
            }
            c => match NAMES.find(c) {
                Some(k) => out.push(Letter::Cross(k as u8 + 1)),
                None => return Err(err(&format!("unexpected {c:?}"))),
            },
        }
    }
    Ok(out)
}

pub fn render_letters(letters: &[Letter]) -> String {
    if letters.is_empty() {
        return "ε".into();
    }
    let mut s = String::new();
    for l in letters {
        match l {
            Letter::Cross(p) if (*p as usize) <= 8 => {
                s.push("stuvwxyz".as_bytes()[*p as usize - 1] as char)
            }
            Letter::Cross(p) => s.push_str(&format!("σ{p}")),
            Letter::Dot(f) => s.push_str(&format!("{{{f}}}")),
        }
    }
    s
}

impl fmt::Display for BraidPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BraidPattern::Iii => "iii",
            BraidPattern::Iij => "iij",
            BraidPattern::Jii => "jii",
            BraidPattern::Iji => "iji",
            BraidPattern::Ijk => "ijk",
        };
        f.write_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ms::{evaluate, Expression};
    use crate::presentation::{preset, System};

    fn hecke(name: &str) -> HeckePresentation {
        match preset(name).unwrap().system {
            System::Hecke(p) => p,
            System::WordRewrite(_) => panic!("{name} is not a hecke preset"),
        }
    }

    fn colors(p: &HeckePresentation, s: &str) -> Vec<Color> {
        p.parse_colors(s).unwrap()
    }

    fn nf(p: &HeckePresentation, bottom: &str, word: &str) -> String {
        let bottom = colors(p, bottom);
        let letters = p.parse_decorated(&bottom, word).unwrap();
        hecke_reduce(p, &bottom, &[(letters, Scalar::one())], 100_000, false)
            .unwrap()
            .result
            .render()
    }

    #[test]
    fn nil_hecke_relations() {
        let p = hecke("nilhecke");
        assert_eq!(nf(&p, "i,i", "ss"), "0");
        let bottom = colors(&p, "i,i");
        let l = p.parse_decorated(&bottom, "s{x[1]}").unwrap();
        assert_eq!(
            push_dots_left(&p, &bottom, &l).unwrap().render(),
            "x[2]·s + 1"
        );
        assert_eq!(nf(&p, "i", "{x[1]}{x[1]}"), "x[1]^2");
        assert_eq!(nf(&p, "i,i", "s{x[1]^2}"), "x[2]^2·s + (x[1] + x[2])");
        assert_eq!(nf(&p, "i,i,i", "st"), "st");
    }

    #[test]
    fn coxeter_words() {
        let p = hecke("coxeter");
        assert_eq!(nf(&p, "i,i,i", "stst"), "ts");
        assert_eq!(nf(&p, "i,i,i", "sts"), "tst");
        assert_eq!(nf(&p, "i,i,i", "tst"), "tst");
        assert_eq!(nf(&p, "i,i,i,i", "us"), "su");
    }

    #[test]
    fn validation_errors() {
        let p = hecke("nilhecke");
        assert!(p.validate().is_ok());
        assert!(hecke("webster-sl2-skeleton").validate().is_ok());
        let i = p.color("i").unwrap();
        let mut q = p.clone();
        q.quadratic.clear();
        assert!(matches!(q.validate(), Err(HeckeError::MissingRelation(_))));
        let mut q = p.clone();
        q.braid
            .get_mut(&[i.clone(), i.clone(), i.clone()])
            .unwrap()
            .lambda = Scalar::zero();
        assert!(matches!(q.validate(), Err(HeckeError::NonUnitLambda(_))));
        let mut q = p.clone();
        q.braid
            .get_mut(&[i.clone(), i.clone(), i.clone()])
            .unwrap()
            .lower
            .insert(vec![1, 2, 1], Scalar::one());
        assert!(matches!(q.validate(), Err(HeckeError::BadLowerTerm { .. })));
        let mut q = p.clone();
        q.partial.clear();
        assert!(matches!(q.validate(), Err(HeckeError::MapCoverage { .. })));
        let mut q = p.clone();
        q.square.insert((i.clone(), Color::new("j")), Scalar::one());
        assert!(q.validate().is_err());
    }

    #[test]
    fn permissible_permutations_and_basis() {
        let w = hecke("webster-sl2-skeleton");
        let rr = colors(&w, "r,b,r");
        assert_eq!(w.permissible_permutations(&rr, &rr).len(), 1);
        let (br, rb) = (colors(&w, "b,r"), colors(&w, "r,b"));
        assert_eq!(w.enumerate_basis(&br, &rb).unwrap().len(), 1);
        assert!(w
            .enumerate_basis(&br, &colors(&w, "b,b"))
            .unwrap()
            .is_empty());
        let p = hecke("nilhecke");
        for (n, count) in [(1, 1), (2, 2), (3, 6), (4, 24)] {
            let c = vec![p.color("i").unwrap(); n];
            assert_eq!(p.enumerate_basis(&c, &c).unwrap().len(), count);
        }
    }

    #[test]
    fn permissibility_is_braid_invariant() {
        let w = hecke("webster-sl2-skeleton");
        for n in 2..=4 {
            for bottom in ambiguity_colorings(&w.colors, n) {
                let mut seen: BTreeMap<Vec<u8>, Vec<(Color, Color)>> = BTreeMap::new();
                for len in 0..=n * (n - 1) / 2 {
                    for e in Expression::all_of_length(n, len) {
                        if !crate::ms::is_reduced(&e) {
                            continue;
                        }
                        let mut cur = bottom.clone();
                        let mut pairs = Vec::new();
                        for &l in e.letters().iter().rev() {
                            let p = l as usize;
                            pairs.push((cur[p - 1].clone(), cur[p].clone()));
                            cur.swap(p - 1, p);
                        }
                        pairs.sort();
                        let key = evaluate(&e).images().to_vec();
                        match seen.get(&key) {
                            Some(prev) => {
                                assert_eq!(prev, &pairs, "{e} from {}", show_colors(&bottom))
                            }
                            None => {
                                seen.insert(key, pairs);
                            }
                        }
                    }
                }
            }
        }
    }

    fn ambiguity_colorings(colors: &[Color], n: usize) -> Vec<Vec<Color>> {
        (0..colors.len().pow(n as u32))
            .map(|mut k| {
                (0..n)
                    .map(|_| {
                        let c = colors[k % colors.len()].clone();
                        k /= colors.len();
                        c
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn nil_hecke_ambiguities_resolve() {
        let p = hecke("nilhecke");
        let inst = instantiate_ambiguities(&p, DotMode::Generators);
        assert_eq!(inst.instances.len(), 14);
        let rep = check_all(&p, DotMode::Generators, CheckOptions::default()).unwrap();
        for r in &rep.reports {
            assert!(
                r.resolvable,
                "{} {}",
                r.instance.template,
                r.residual.render()
            );
        }
        let (conds, _) = derive_conditions(&p, CheckOptions::default()).unwrap();
        assert!(conds.is_empty());
    }

    #[test]
    fn coxeter_ambiguities_resolve() {
        let p = hecke("coxeter");
        let rep = check_all(&p, DotMode::Generators, CheckOptions::default()).unwrap();
        assert_eq!(rep.reports.len(), 5);
        assert!(rep.bergman);
    }

    #[test]
    fn modified_symmetric_ssts() {
        let p = hecke("modified-symmetric");
        let inst = instantiate_ambiguities(&p, DotMode::Symbolic);
        let ssts = inst
            .instances
            .iter()
            .find(|a| a.template == Template::Ssts)
            .unwrap();
        let r = check_instance(&p, ssts, CheckOptions::default()).unwrap();
        assert!(!r.resolvable);
        let tst = r.residual.coefficient(&[2, 1, 2]);
        assert_eq!(tst.integer_normalized(), "2*b".parse().unwrap());
    }

    #[test]
    fn webster_skeleton_checks() {
        let p = hecke("webster-sl2-skeleton");
        let rep = check_all(&p, DotMode::Generators, CheckOptions::default()).unwrap();
        assert!(rep.bergman, "{:?}", rep.unresolvable().count());
        assert!(rep.skipped.values().sum::<usize>() > 0);
    }

    #[test]
    fn decorated_syntax() {
        let l = parse_decorated_raw("s{x[1] + 2}σ3 t").unwrap();
        assert_eq!(l.len(), 4);
        assert_eq!(render_letters(&l), "s{x[1] + 2}ut");
        assert!(parse_decorated_raw("s{x").is_err());
        assert!(parse_decorated_raw("q").is_err());
        assert_eq!(parse_decorated_raw("ε").unwrap(), vec![]);
    }
}
