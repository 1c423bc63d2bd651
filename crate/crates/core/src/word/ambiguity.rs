use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::rewrite::{normal_form, reduce_once};
use super::{LinComb, RewriteSystem, Word, WordError, DEFAULT_BUDGET};
use crate::ms::Comparison;
use crate::scalar::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AmbiguityKind {
    Overlap,
    Inclusion,
    /// Two non-overlapping matches; always resolvable.
    Disjoint,
}

/// A rule applied at a position of the ambiguous word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct RuleSite {
    pub rule: usize,
    pub position: usize,
}

/// `A = BCD` with two rule matches. For an overlap `W_r = BC` and
/// `W_s = CD`; for an inclusion `W_r = C` inside `W_s = A`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Ambiguity {
    pub kind: AmbiguityKind,
    pub word: Word,
    pub first: RuleSite,
    pub second: RuleSite,
}

impl Ambiguity {
    /// `(A, W_r, W_s)` in the usual notation.
    pub fn describe(&self, sys: &RewriteSystem) -> String {
        format!(
            "({}, {}, {})",
            sys.render(&self.word),
            sys.render(&sys.rules[self.first.rule].lhs),
            sys.render(&sys.rules[self.second.rule].lhs)
        )
    }

    /// The words `B`, `C`, `D`.
    pub fn parts(&self, sys: &RewriteSystem) -> (Word, Word, Word) {
        let a = &self.word;
        let (r, s) = (
            &sys.rules[self.first.rule].lhs,
            &sys.rules[self.second.rule].lhs,
        );
        match self.kind {
            AmbiguityKind::Overlap => {
                let c0 = self.second.position;
                let c1 = r.len();
                (a.slice(0, c0), a.slice(c0, c1), a.slice(c1, a.len()))
            }
            AmbiguityKind::Inclusion => {
                let p = self.second.position;
                (
                    a.slice(0, p),
                    a.slice(p, p + s.len()),
                    a.slice(p + s.len(), a.len()),
                )
            }
            AmbiguityKind::Disjoint => {
                let e = self.first.position + r.len();
                (a.slice(0, e), Word::empty(), a.slice(e, a.len()))
            }
        }
    }
}

/// All minimal overlap and inclusion ambiguities of the rule set.
pub fn enumerate_minimal_ambiguities(sys: &RewriteSystem) -> Vec<Ambiguity> {
    let rules = &sys.rules;
    let mut out = BTreeSet::new();
    for (r, rr) in rules.iter().enumerate() {
        for (s, rs) in rules.iter().enumerate() {
            let (wr, ws) = (&rr.lhs, &rs.lhs);
            // W_r = BC, W_s = CD with C a proper suffix of W_r and proper prefix of W_s
            for k in 1..wr.len().min(ws.len()) {
                if wr.0[wr.len() - k..] == ws.0[..k] {
                    let a = Word([&wr.0[..], &ws.0[k..]].concat());
                    out.insert(Ambiguity {
                        kind: AmbiguityKind::Overlap,
                        word: a,
                        first: RuleSite {
                            rule: r,
                            position: 0,
                        },
                        second: RuleSite {
                            rule: s,
                            position: wr.len() - k,
                        },
                    });
                }
            }
            // W_r inside W_s
            if r != s && wr.len() <= ws.len() && (wr != ws || s < r) {
                for p in 0..=ws.len() - wr.len() {
                    if ws.occurs_at(wr, p) {
                        out.insert(Ambiguity {
                            kind: AmbiguityKind::Inclusion,
                            word: ws.clone(),
                            first: RuleSite {
                                rule: s,
                                position: 0,
                            },
                            second: RuleSite {
                                rule: r,
                                position: p,
                            },
                        });
                    }
                }
            }
        }
    }
    let mut v: Vec<Ambiguity> = out.into_iter().collect();
    v.sort_by(|a, b| (a.first, a.second, &a.word).cmp(&(b.first, b.second, &b.word)));
    v
}

/// How a nonzero residual was nevertheless shown to lie in the span of
/// relation instances `B(W_r - f_r)C` with `BW_rC < A`.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RelativeCheck {
    pub method: String,
    pub member: Option<bool>,
    pub instances: usize,
}

#[derive(Clone, Debug)]
pub struct AmbiguityReport {
    pub ambiguity: Ambiguity,
    pub left: LinComb,
    pub right: LinComb,
    pub left_nf: LinComb,
    pub right_nf: LinComb,
    pub residual: LinComb,
    pub resolvable: bool,
    pub relative: Option<RelativeCheck>,
}

impl AmbiguityReport {
    pub fn to_json(&self, sys: &RewriteSystem) -> Value {
        let r = |t: &LinComb| sys.render_lincomb(t);
        let mut v = json!({
            "ambiguity": self.ambiguity.describe(sys),
            "kind": self.ambiguity.kind,
            "rules": [sys.rules[self.ambiguity.first.rule].label, sys.rules[self.ambiguity.second.rule].label],
            "left": r(&self.left),
            "right": r(&self.right),
            "left_normal_form": r(&self.left_nf),
            "right_normal_form": r(&self.right_nf),
            "residual": r(&self.residual),
            "resolvable": self.resolvable,
        });
        if let Some(rel) = &self.relative {
            v["relative"] = json!(rel);
        }
        v
    }
}

/// Applies both elementary resolutions and compares the normal forms.
pub fn check_ambiguity(
    sys: &RewriteSystem,
    a: &Ambiguity,
    budget: usize,
    relative: bool,
) -> Result<AmbiguityReport, WordError> {
    let t = LinComb::word(a.word.clone());
    let left = reduce_once(sys, &t, &a.word, a.first.rule, a.first.position)?;
    let right = reduce_once(sys, &t, &a.word, a.second.rule, a.second.position)?;
    let left_nf = normal_form(sys, &left, budget, false)?.result;
    let right_nf = normal_form(sys, &right, budget, false)?.result;
    let residual = left_nf.sub(&right_nf);
    let resolvable = residual.is_zero();
    let relative = (relative && !resolvable).then(|| relative_membership(sys, &a.word, &residual));
    Ok(AmbiguityReport {
        ambiguity: a.clone(),
        left,
        right,
        left_nf,
        right_nf,
        residual,
        resolvable,
        relative,
    })
}

const RELATIVE_WORD_CAP: usize = 50_000;

/// Decides whether `residual` is a rational combination of relation
/// instances lying below `a`, among words no longer than `a`.
fn relative_membership(sys: &RewriteSystem, a: &Word, residual: &LinComb) -> RelativeCheck {
    let unsupported = |why: &str| RelativeCheck {
        method: why.into(),
        member: None,
        instances: 0,
    };
    if !sys.order.is_length_graded() {
        return unsupported("unsupported-order");
    }
    let constant = |t: &LinComb| -> Option<BTreeMap<Word, Rational>> {
        t.terms()
            .map(|(w, c)| Some((w.clone(), c.as_constant()?)))
            .collect()
    };
    let Some(target) = constant(residual) else {
        return unsupported("symbolic-coefficients");
    };
    let mut rows: Vec<BTreeMap<Word, Rational>> = Vec::new();
    let k = sys.alphabet.len();
    let total: usize = (0..=a.len())
        .map(|l| k.saturating_pow(l as u32))
        .fold(0usize, |x, y| x.saturating_add(y));
    if total > RELATIVE_WORD_CAP {
        return unsupported("too-large");
    }
    let mut level = vec![Word::empty()];
    for _ in 0..a.len() {
        let mut next = Vec::new();
        for w in &level {
            for l in 0..k as u16 {
                let mut v = w.0.clone();
                v.push(l);
                next.push(Word(v));
            }
        }
        for w in &next {
            if sys.compare(w, a) != Comparison::Lt {
                continue;
            }
            for (r, p) in sys.all_matches(w) {
                let rule = &sys.rules[r];
                let inst = LinComb::word(w.clone()).sub(
                    &rule
                        .rhs
                        .sandwich(&w.slice(0, p), &w.slice(p + rule.lhs.len(), w.len())),
                );
                match constant(&inst) {
                    Some(row) => rows.push(row),
                    None => return unsupported("symbolic-coefficients"),
                }
            }
        }
        level = next;
    }
    let instances = rows.len();
    RelativeCheck {
        method: "span".into(),
        member: Some(in_span(rows, target)),
        instances,
    }
}

/// Gaussian elimination over the rationals.
fn in_span(rows: Vec<BTreeMap<Word, Rational>>, mut target: BTreeMap<Word, Rational>) -> bool {
    // pivots keyed by their largest word
    let mut basis: BTreeMap<Word, BTreeMap<Word, Rational>> = BTreeMap::new();
    let reduce = |v: &mut BTreeMap<Word, Rational>,
                  basis: &BTreeMap<Word, BTreeMap<Word, Rational>>| loop {
        let Some(lead) = v
            .iter()
            .rev()
            .find(|(w, _)| basis.contains_key(*w))
            .map(|(w, c)| (w.clone(), c.clone()))
        else {
            break;
        };
        let row = &basis[&lead.0];
        for (w, c) in row {
            let e = v.entry(w.clone()).or_insert_with(Rational::zero);
            *e -= &lead.1 * c;
            if e.is_zero() {
                v.remove(w);
            }
        }
    };
    for mut r in rows {
        reduce(&mut r, &basis);
        if let Some((w, c)) = r.iter().next_back().map(|(w, c)| (w.clone(), c.clone())) {
            for x in r.values_mut() {
                *x /= &c;
            }
            basis.insert(w, r);
        }
    }
    reduce(&mut target, &basis);
    target.is_empty()
}

/// Irreducible words up to `max_len`, in length-then-index order.
pub fn enumerate_irreducible(sys: &RewriteSystem, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut level = vec![Word::empty()];
    for _ in 0..max_len {
        level = extend_irreducible(sys, &level);
        if level.is_empty() {
            break;
        }
        out.extend(level.iter().cloned());
    }
    out
}

fn extend_irreducible(sys: &RewriteSystem, level: &[Word]) -> Vec<Word> {
    let mut next = Vec::new();
    for w in level {
        for l in 0..sys.alphabet.len() as u16 {
            let mut v = w.0.clone();
            v.push(l);
            let v = Word(v);
            // only a match ending at the new letter is possible
            let ok = sys
                .rules
                .iter()
                .all(|r| r.lhs.len() > v.len() || !v.occurs_at(&r.lhs, v.len() - r.lhs.len()));
            if ok {
                next.push(v);
            }
        }
    }
    next
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct IrreducibleCount {
    pub by_length: Vec<usize>,
    /// Total when no irreducible word exceeds the inspected lengths.
    pub total: Option<usize>,
}

/// Counts irreducible words by length, stopping early when a length has
/// none (then there are none longer either).
pub fn count_irreducible(sys: &RewriteSystem, max_len: usize) -> IrreducibleCount {
    let mut by_length = vec![1];
    let mut level = vec![Word::empty()];
    for _ in 0..max_len {
        level = extend_irreducible(sys, &level);
        if level.is_empty() {
            let total = by_length.iter().sum();
            return IrreducibleCount {
                by_length,
                total: Some(total),
            };
        }
        by_length.push(level.len());
    }
    let total = extend_irreducible(sys, &level)
        .is_empty()
        .then(|| by_length.iter().sum());
    IrreducibleCount { by_length, total }
}

#[derive(Clone, Debug)]
pub struct BergmanOptions {
    pub budget: usize,
    pub relative: bool,
    /// Longest irreducible words counted in the summary.
    pub basis_len: usize,
}

impl Default for BergmanOptions {
    fn default() -> Self {
        BergmanOptions {
            budget: DEFAULT_BUDGET,
            relative: false,
            basis_len: 8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BergmanReport {
    pub bergman: bool,
    pub reports: Vec<AmbiguityReport>,
    pub irreducible: IrreducibleCount,
}

impl BergmanReport {
    pub fn unresolvable(&self) -> impl Iterator<Item = &AmbiguityReport> {
        self.reports.iter().filter(|r| !r.resolvable)
    }

    pub fn to_json(&self, sys: &RewriteSystem) -> Value {
        json!({
            "bergman": self.bergman,
            "ambiguities": self.reports.iter().map(|r| r.to_json(sys)).collect::<Vec<_>>(),
            "unresolvable": self.unresolvable().map(|r| r.ambiguity.describe(sys)).collect::<Vec<_>>(),
            "irreducible": self.irreducible,
        })
    }
}

/// Checks every minimal ambiguity (in parallel).
pub fn bergman_check(
    sys: &RewriteSystem,
    opts: &BergmanOptions,
) -> Result<BergmanReport, WordError> {
    let ambs = enumerate_minimal_ambiguities(sys);
    let reports = ambs
        .par_iter()
        .map(|a| check_ambiguity(sys, a, opts.budget, opts.relative))
        .collect::<Result<Vec<_>, _>>()?;
    let bergman = reports.iter().all(|r| r.resolvable);
    Ok(BergmanReport {
        bergman,
        reports,
        irreducible: count_irreducible(sys, opts.basis_len),
    })
}
