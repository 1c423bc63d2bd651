use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::Serialize;

use super::{render_letters, HeckeError, HeckePresentation, Letter};
use crate::ms::{
    arrange_consecutive, comm_canonical, find_flippable_packet, is_reduced, leq,
    minimal_nonreduced_window, Comparison, Expression,
};
use crate::scalar::{embed, Color, Param, RingMapSpec, Scalar};

/// A morphism `bottom → top` in normal form: commutation-canonical sink
/// words with coefficients in the dot rings of the top colors.
#[derive(Clone, Debug, PartialEq)]
pub struct HeckeTerm {
    pub bottom: Vec<Color>,
    pub top: Vec<Color>,
    pub terms: BTreeMap<Vec<u8>, Scalar>,
}

pub(crate) fn crossing_name(w: &[u8]) -> String {
    w.iter()
        .map(|&l| match "stuvwxyz".as_bytes().get(l as usize - 1) {
            Some(&c) => (c as char).to_string(),
            None => format!("σ{l}"),
        })
        .collect()
}

impl HeckeTerm {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, word: &[u8]) -> Scalar {
        self.terms.get(word).cloned().unwrap_or_default()
    }

    pub fn sub(&self, other: &HeckeTerm) -> HeckeTerm {
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            add_to(&mut terms, w.clone(), &-c);
        }
        HeckeTerm {
            bottom: self.bottom.clone(),
            top: self.top.clone(),
            terms,
        }
    }

    /// Longest words first, `·` between coefficient and word.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut keys: Vec<&Vec<u8>> = self.terms.keys().collect();
        keys.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        let parts: Vec<String> = keys
            .into_iter()
            .map(|w| {
                let c = &self.terms[w];
                let wrap = |c: &Scalar| {
                    if c.len() > 1 {
                        format!("({c})")
                    } else {
                        c.to_string()
                    }
                };
                if w.is_empty() {
                    wrap(c)
                } else if c.is_one() {
                    crossing_name(w)
                } else if (-c).is_one() {
                    format!("-{}", crossing_name(w))
                } else {
                    format!("{}·{}", wrap(c), crossing_name(w))
                }
            })
            .collect();
        let mut out = String::new();
        for (k, part) in parts.iter().enumerate() {
            match (k, part.strip_prefix('-')) {
                (0, _) => out.push_str(part),
                (_, Some(rest)) => {
                    out.push_str(" - ");
                    out.push_str(rest);
                }
                _ => {
                    out.push_str(" + ");
                    out.push_str(part);
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(w, c)| serde_json::json!({ "word": crossing_name(w), "coefficient": c.to_string() }))
            .collect();
        serde_json::json!({
            "bottom": self.bottom.iter().map(|c| c.as_str()).collect::<Vec<_>>(),
            "top": self.top.iter().map(|c| c.as_str()).collect::<Vec<_>>(),
            "terms": terms,
            "rendered": self.render(),
        })
    }
}

pub(crate) fn add_to<K: Ord>(map: &mut BTreeMap<K, Scalar>, k: K, c: &Scalar) {
    if let Some(v) = map.get_mut(&k) {
        *v += c;
        if v.is_zero() {
            map.remove(&k);
        }
    } else if !c.is_zero() {
        map.insert(k, c.clone());
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RedexKind {
    /// Two crossings of the same strands.
    Quadratic,
    /// `sts ↦ λ tst + lower terms`.
    Braid,
    /// A dot below a crossing moves above it.
    DotCross,
    /// Two adjacent dots multiply.
    Merge,
}

/// A rule application, by the positions of the letters it consumes. For
/// crossings the letters are first brought together by commutations.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Redex {
    pub kind: RedexKind,
    pub positions: Vec<usize>,
}

impl Redex {
    pub fn new(kind: RedexKind, positions: &[usize]) -> Self {
        Redex {
            kind,
            positions: positions.to_vec(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HeckeStep {
    pub rule: RedexKind,
    pub word: String,
    pub result: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct HeckeReduction {
    pub result: HeckeTerm,
    pub steps: usize,
    pub trace: Vec<HeckeStep>,
}

type Terms = Vec<(Vec<Letter>, Scalar)>;

const FAR: u32 = 1 << 20;

/// Applies a two-strand map to the strands `p, p+1` of `f`; every other
/// strand is treated as constant.
fn local_apply(m: &RingMapSpec, f: &Scalar, p: u32) -> Result<Scalar, HeckeError> {
    let g = f.map_params(|q| match q.tag() {
        Some(t) => {
            let pos = if t.position == p {
                1
            } else if t.position == p + 1 {
                2
            } else {
                t.position + FAR
            };
            Param::tagged(q.name(), t.color.clone(), pos)
        }
        None => q.clone(),
    });
    let img = m.apply_with(&g, &|q: &Param| q.tag().is_none_or(|t| t.position > 2))?;
    Ok(img.map_params(|q| match q.tag() {
        Some(t) => {
            let pos = match t.position {
                1 => p,
                2 => p + 1,
                x => x - FAR,
            };
            Param::tagged(q.name(), t.color.clone(), pos)
        }
        None => q.clone(),
    }))
}

fn crossings(l: &[Letter]) -> Vec<u8> {
    l.iter()
        .filter_map(|x| match x {
            Letter::Cross(p) => Some(*p),
            Letter::Dot(_) => None,
        })
        .collect()
}

fn dot_weight(l: &[Letter]) -> usize {
    l.iter()
        .enumerate()
        .filter(|(_, x)| matches!(x, Letter::Dot(_)))
        .map(|(k, _)| k)
        .sum()
}

fn is_plain(l: &[Letter]) -> bool {
    l.iter().all(|x| matches!(x, Letter::Cross(_)))
}

fn plain(w: &[u8]) -> Vec<Letter> {
    w.iter().map(|&p| Letter::Cross(p)).collect()
}

pub(crate) struct Engine<'a> {
    p: &'a HeckePresentation,
    bottom: Vec<Color>,
    n: usize,
    budget: usize,
    pub(crate) steps: usize,
    normal: HashMap<Vec<u8>, bool>,
    trace: Option<Vec<HeckeStep>>,
}

impl<'a> Engine<'a> {
    pub(crate) fn new(
        p: &'a HeckePresentation,
        bottom: &[Color],
        budget: usize,
        trace: bool,
    ) -> Self {
        Engine {
            p,
            bottom: bottom.to_vec(),
            n: bottom.len(),
            budget,
            steps: 0,
            normal: HashMap::new(),
            trace: trace.then(Vec::new),
        }
    }

    fn expr(&self, w: Vec<u8>) -> Expression {
        Expression::new_unchecked(self.n.max(1), w)
    }

    fn gaps(&self, letters: &[Letter]) -> Result<Vec<Vec<Color>>, HeckeError> {
        self.p
            .gap_colors(&self.bottom, letters)
            .map_err(|e| HeckeError::Internal(format!("{}: {e}", render_letters(letters))))
    }

    pub(crate) fn is_normal(&mut self, w: &[u8]) -> Result<bool, HeckeError> {
        if let Some(&b) = self.normal.get(w) {
            return Ok(b);
        }
        let e = self.expr(w.to_vec());
        let b = is_reduced(&e) && find_flippable_packet(&e)?.is_none();
        self.normal.insert(w.to_vec(), b);
        Ok(b)
    }

    /// Folds ground and top dots into the coefficient; `None` if zero.
    pub(crate) fn normalize(
        &self,
        mut l: Vec<Letter>,
        mut c: Scalar,
    ) -> Option<(Vec<Letter>, Scalar)> {
        let mut k = 0;
        while k < l.len() {
            if let Letter::Dot(f) = &l[k] {
                if f.is_zero() {
                    return None;
                }
                if k == 0 || !f.has_generators() {
                    c = &c * f;
                    l.remove(k);
                    continue;
                }
            }
            k += 1;
        }
        if c.is_zero() {
            return None;
        }
        if is_plain(&l) {
            let w = comm_canonical(&self.expr(crossings(&l)));
            l = plain(w.letters());
        }
        Some((l, c))
    }

    /// One rule application to consecutive letters starting at `k`.
    pub(crate) fn rewrite_at(
        &mut self,
        l: &[Letter],
        kind: RedexKind,
        k: usize,
    ) -> Result<Terms, HeckeError> {
        if self.steps >= self.budget {
            return Err(HeckeError::Divergence(self.budget));
        }
        self.steps += 1;
        let gaps = self.gaps(l)?;
        let bad =
            || HeckeError::Internal(format!("no {kind:?} redex at {k} in {}", render_letters(l)));
        let splice = |mid: Vec<Letter>, width: usize| -> Vec<Letter> {
            let mut v = l[..k].to_vec();
            v.extend(mid);
            v.extend_from_slice(&l[k + width..]);
            v
        };
        let one = Scalar::one();
        let mut out: Terms = Vec::new();
        match kind {
            RedexKind::Quadratic => {
                let (Some(Letter::Cross(p)), Some(Letter::Cross(q))) = (l.get(k), l.get(k + 1))
                else {
                    return Err(bad());
                };
                if p != q {
                    return Err(bad());
                }
                let p = *p as usize;
                let below = &gaps[k + 2];
                let (a, b) = (&below[p - 1], &below[p]);
                if a == b {
                    let (alpha, beta) = self.p.quadratic.get(a).ok_or_else(bad)?;
                    let alpha = embed(alpha, p as u32 - 1, &gaps[k])?;
                    let beta = embed(beta, p as u32 - 1, &gaps[k])?;
                    out.push((
                        splice(vec![Letter::Dot(alpha), Letter::Cross(p as u8)], 2),
                        one.clone(),
                    ));
                    out.push((splice(vec![Letter::Dot(beta)], 2), one));
                } else {
                    let q = self.p.square.get(&(a.clone(), b.clone())).ok_or_else(bad)?;
                    let q = embed(q, p as u32 - 1, &gaps[k])?;
                    out.push((splice(vec![Letter::Dot(q)], 2), one));
                }
            }
            RedexKind::Braid => {
                let w = crossings(l.get(k..k + 3).ok_or_else(bad)?);
                if w.len() != 3 || w[0] != w[2] || w[0] + 1 != w[1] {
                    return Err(bad());
                }
                let p = w[0];
                let below = &gaps[k + 3];
                let key = [
                    below[p as usize - 1].clone(),
                    below[p as usize].clone(),
                    below[p as usize + 1].clone(),
                ];
                let rel = self.p.braid.get(&key).ok_or_else(bad)?;
                out.push((splice(plain(&[p + 1, p, p + 1]), 3), rel.lambda.clone()));
                for (lw, coef) in &rel.lower {
                    let mut mid = vec![Letter::Dot(embed(coef, p as u32 - 1, &gaps[k])?)];
                    mid.extend(lw.iter().map(|&x| Letter::Cross(x + p - 1)));
                    out.push((splice(mid, 3), one.clone()));
                }
            }
            RedexKind::DotCross => {
                let (Some(Letter::Cross(p)), Some(Letter::Dot(f))) = (l.get(k), l.get(k + 1))
                else {
                    return Err(bad());
                };
                let p = *p as usize;
                let below = &gaps[k + 1];
                let (a, b) = (below[p - 1].clone(), below[p].clone());
                let id = RingMapSpec::identity();
                let phi = self.p.phi.get(&(a.clone(), b.clone())).unwrap_or(&id);
                let fp = local_apply(phi, f, p as u32)?;
                out.push((
                    splice(vec![Letter::Dot(fp), Letter::Cross(p as u8)], 2),
                    one.clone(),
                ));
                if a == b {
                    if let Some(d) = self.p.partial.get(&a) {
                        let fd = local_apply(d, f, p as u32)?;
                        out.push((splice(vec![Letter::Dot(fd)], 2), one));
                    }
                }
            }
            RedexKind::Merge => {
                let (Some(Letter::Dot(f)), Some(Letter::Dot(g))) = (l.get(k), l.get(k + 1)) else {
                    return Err(bad());
                };
                out.push((splice(vec![Letter::Dot(f * g)], 2), one));
            }
        }
        for (m, _) in &out {
            self.check_measure(l, m, kind)?;
        }
        if let Some(tr) = self.trace.as_mut() {
            tr.push(HeckeStep {
                rule: kind,
                word: render_letters(l),
                result: out
                    .iter()
                    .map(|(m, c)| format!("{{{c}}}{}", render_letters(m)))
                    .collect(),
            });
        }
        Ok(out)
    }

    /// Crossing count, then the order on crossing words, then dot weight.
    fn check_measure(
        &self,
        old: &[Letter],
        new: &[Letter],
        kind: RedexKind,
    ) -> Result<(), HeckeError> {
        let (a, b) = (crossings(old), crossings(new));
        let ok = match b.len().cmp(&a.len()) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => match leq(&self.expr(b), &self.expr(a))? {
                Comparison::Lt => true,
                Comparison::Eq => dot_weight(new) < dot_weight(old),
                _ => false,
            },
        };
        if ok {
            Ok(())
        } else {
            Err(HeckeError::OrderViolation(format!(
                "{kind:?}: {} to {}",
                render_letters(old),
                render_letters(new)
            )))
        }
    }

    /// Brings the letters at `positions` together, then rewrites there.
    pub(crate) fn apply_redex(&mut self, l: &[Letter], r: &Redex) -> Result<Terms, HeckeError> {
        match r.kind {
            RedexKind::DotCross | RedexKind::Merge => self.rewrite_at(l, r.kind, r.positions[0]),
            RedexKind::Quadratic | RedexKind::Braid => {
                let arr = arrange_consecutive(l.len(), &r.positions, |a, b| commutes(&l[a], &l[b]))
                    .ok_or_else(|| {
                        HeckeError::Internal(format!(
                            "{r:?} cannot be brought together in {}",
                            render_letters(l)
                        ))
                    })?;
                let m: Vec<Letter> = arr.order.iter().map(|&q| l[q].clone()).collect();
                self.rewrite_at(&m, r.kind, arr.start)
            }
        }
    }

    /// Next deterministic step for a plain word that is not yet normal.
    fn plain_step(&mut self, w: &[u8]) -> Result<Terms, HeckeError> {
        let e = self.expr(w.to_vec());
        let mut w = w.to_vec();
        let (kind, k) = match minimal_nonreduced_window(&e) {
            None => {
                let site = find_flippable_packet(&e)?.ok_or_else(|| {
                    HeckeError::Internal(format!("{} is already normal", crossing_name(&w)))
                })?;
                for s in site.swaps {
                    w.swap(s, s + 1);
                }
                (RedexKind::Braid, site.position)
            }
            Some((a, b)) => {
                let mut found = None;
                for (lo, hi) in [(a, b), (a + 1, b + 1)] {
                    if let Some(site) = find_flippable_packet(&self.expr(w[lo..hi].to_vec()))? {
                        for s in site.swaps {
                            w.swap(lo + s, lo + s + 1);
                        }
                        found = Some((RedexKind::Braid, lo + site.position));
                        break;
                    }
                }
                match found {
                    Some(f) => f,
                    None => {
                        for q in a..b - 1 {
                            w.swap(q, q + 1);
                        }
                        (RedexKind::Quadratic, b - 1)
                    }
                }
            }
        };
        self.rewrite_at(&plain(&w), kind, k)
    }

    /// Next deterministic step for a word with dots: the topmost dot
    /// merges upward or passes the crossing above it.
    fn dot_step(&mut self, l: &[Letter]) -> Result<Terms, HeckeError> {
        let k = l
            .iter()
            .position(|x| matches!(x, Letter::Dot(_)))
            .ok_or_else(|| HeckeError::Internal("no dot".into()))?;
        let kind = match &l[k - 1] {
            Letter::Dot(_) => RedexKind::Merge,
            Letter::Cross(_) => RedexKind::DotCross,
        };
        self.rewrite_at(l, kind, k - 1)
    }

    pub(crate) fn finish(
        self,
        terms: BTreeMap<Vec<u8>, Scalar>,
        top: Vec<Color>,
    ) -> HeckeReduction {
        HeckeReduction {
            result: HeckeTerm {
                bottom: self.bottom,
                top,
                terms,
            },
            steps: self.steps,
            trace: self.trace.unwrap_or_default(),
        }
    }

    /// Deterministic reduction to normal form.
    pub(crate) fn reduce(
        mut self,
        input: Terms,
        dots_only: bool,
    ) -> Result<HeckeReduction, HeckeError> {
        let top = self.top_of(&input)?;
        let mut dotted: Terms = Vec::new();
        let mut pending: BTreeMap<(usize, Vec<u8>), Scalar> = BTreeMap::new();
        let mut done: BTreeMap<Vec<u8>, Scalar> = BTreeMap::new();
        let route = |(l, c): (Vec<Letter>, Scalar),
                     dotted: &mut Terms,
                     pending: &mut BTreeMap<(usize, Vec<u8>), Scalar>| {
            if is_plain(&l) {
                let w = crossings(&l);
                add_to(pending, (w.len(), w), &c);
            } else {
                dotted.push((l, c));
            }
        };
        for (l, c) in input {
            if let Some(t) = self.normalize(l, c) {
                route(t, &mut dotted, &mut pending);
            }
        }
        loop {
            if let Some((l, c)) = dotted.pop() {
                for (m, d) in self.dot_step(&l)? {
                    if let Some(t) = self.normalize(m, &d * &c) {
                        route(t, &mut dotted, &mut pending);
                    }
                }
                continue;
            }
            let Some(((_, w), c)) = pending.pop_last() else {
                break;
            };
            if dots_only || self.is_normal(&w)? {
                add_to(&mut done, w, &c);
                continue;
            }
            for (m, d) in self.plain_step(&w)? {
                if let Some(t) = self.normalize(m, &d * &c) {
                    route(t, &mut dotted, &mut pending);
                }
            }
        }
        Ok(self.finish(done, top))
    }

    fn top_of(&self, input: &Terms) -> Result<Vec<Color>, HeckeError> {
        let mut top = None;
        for (l, _) in input {
            let g = self.p.gap_colors(&self.bottom, l)?;
            let t = g.into_iter().next().unwrap_or_default();
            match &top {
                None => top = Some(t),
                Some(s) if *s != t => {
                    return Err(HeckeError::Parse {
                        input: render_letters(l),
                        message: format!(
                            "top colors {} differ from {}",
                            super::show_colors(&t),
                            super::show_colors(s)
                        ),
                    })
                }
                _ => {}
            }
        }
        Ok(top.unwrap_or_else(|| self.bottom.clone()))
    }

    /// Every applicable rule application in `l`.
    pub(crate) fn redexes(&self, l: &[Letter]) -> Vec<Redex> {
        let mut out = Vec::new();
        for k in 1..l.len() {
            match (&l[k - 1], &l[k]) {
                (Letter::Cross(_), Letter::Dot(_)) => {
                    out.push(Redex::new(RedexKind::DotCross, &[k - 1, k]))
                }
                (Letter::Dot(_), Letter::Dot(_)) => {
                    out.push(Redex::new(RedexKind::Merge, &[k - 1, k]))
                }
                _ => {}
            }
        }
        let cross: Vec<(usize, u8)> = l
            .iter()
            .enumerate()
            .filter_map(|(k, x)| match x {
                Letter::Cross(p) => Some((k, *p)),
                _ => None,
            })
            .collect();
        let together =
            |t: &[usize]| arrange_consecutive(l.len(), t, |a, b| commutes(&l[a], &l[b])).is_some();
        for (i, &(a, p)) in cross.iter().enumerate() {
            for (j, &(b, q)) in cross.iter().enumerate().skip(i + 1) {
                if p == q && together(&[a, b]) {
                    out.push(Redex::new(RedexKind::Quadratic, &[a, b]));
                }
                if q == p + 1 {
                    for &(c, r) in &cross[j + 1..] {
                        if r == p && together(&[a, b, c]) {
                            out.push(Redex::new(RedexKind::Braid, &[a, b, c]));
                        }
                    }
                }
            }
        }
        out
    }

    /// Reduction choosing a uniformly random rule application each step.
    pub(crate) fn reduce_random(
        mut self,
        input: Terms,
        rng: &mut impl Rng,
    ) -> Result<HeckeReduction, HeckeError> {
        let top = self.top_of(&input)?;
        let mut terms: BTreeMap<Vec<Letter>, Scalar> = BTreeMap::new();
        for (l, c) in input {
            if let Some((m, d)) = self.normalize(l, c) {
                add_to(&mut terms, m, &d);
            }
        }
        loop {
            let choices: Vec<(Vec<Letter>, Redex)> = terms
                .keys()
                .flat_map(|l| self.redexes(l).into_iter().map(move |r| (l.clone(), r)))
                .collect();
            if choices.is_empty() {
                break;
            }
            let (l, r) = &choices[rng.gen_range(0..choices.len())];
            let c = terms.remove(l).expect("chosen term is present");
            for (m, d) in self.apply_redex(l, r)? {
                if let Some((m, d)) = self.normalize(m, &d * &c) {
                    add_to(&mut terms, m, &d);
                }
            }
        }
        let mut done = BTreeMap::new();
        for (l, c) in terms {
            let w = crossings(&l);
            if !is_plain(&l) || !self.is_normal(&w)? {
                return Err(HeckeError::Internal(format!(
                    "{} is stuck but not normal",
                    render_letters(&l)
                )));
            }
            add_to(&mut done, w, &c);
        }
        Ok(self.finish(done, top))
    }
}

fn commutes(a: &Letter, b: &Letter) -> bool {
    match (a, b) {
        (Letter::Cross(p), Letter::Cross(q)) => p.abs_diff(*q) >= 2,
        _ => false,
    }
}

fn prepare(
    p: &HeckePresentation,
    bottom: &[Color],
    input: &[(Vec<Letter>, Scalar)],
) -> Result<Terms, HeckeError> {
    input
        .iter()
        .map(|(l, c)| Ok((p.resolve(bottom, l.clone())?, c.clone())))
        .collect()
}

/// Reduces a combination of decorated words to normal form. Sink words are
/// reached by the shortening walk; dots travel to the top first.
pub fn hecke_reduce(
    p: &HeckePresentation,
    bottom: &[Color],
    input: &[(Vec<Letter>, Scalar)],
    budget: usize,
    trace: bool,
) -> Result<HeckeReduction, HeckeError> {
    let input = prepare(p, bottom, input)?;
    Engine::new(p, bottom, budget, trace).reduce(input, false)
}

/// Like [`hecke_reduce`], choosing among all rule applications at random.
pub fn hecke_reduce_random(
    p: &HeckePresentation,
    bottom: &[Color],
    input: &[(Vec<Letter>, Scalar)],
    budget: usize,
    rng: &mut impl Rng,
) -> Result<HeckeReduction, HeckeError> {
    let input = prepare(p, bottom, input)?;
    Engine::new(p, bottom, budget, false).reduce_random(input, rng)
}

/// Moves every dot to the top, leaving crossings alone apart from the
/// shorter words that dot relations produce.
pub fn push_dots_left(
    p: &HeckePresentation,
    bottom: &[Color],
    letters: &[Letter],
) -> Result<HeckeTerm, HeckeError> {
    let input = prepare(p, bottom, &[(letters.to_vec(), Scalar::one())])?;
    Ok(Engine::new(p, bottom, super::DEFAULT_BUDGET, false)
        .reduce(input, true)?
        .result)
}
