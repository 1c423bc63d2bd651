use rand::Rng;
use serde::Serialize;

use super::{LinComb, RewriteSystem, Word, WordError};
use crate::ms::Comparison;

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub rule: String,
    pub lhs: String,
    pub word: String,
    pub comparison: Comparison,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

/// Checks that every word of every right-hand side is below its left-hand side.
pub fn validate_system(sys: &RewriteSystem) -> ValidationReport {
    let mut violations = Vec::new();
    for r in &sys.rules {
        for w in r.rhs.words() {
            let c = sys.compare(w, &r.lhs);
            if c != Comparison::Lt {
                violations.push(Violation {
                    rule: r.label.clone(),
                    lhs: sys.render(&r.lhs),
                    word: sys.render(w),
                    comparison: c,
                });
            }
        }
    }
    ValidationReport {
        valid: violations.is_empty(),
        violations,
    }
}

/// One elementary resolution applied during reduction.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: String,
    pub word: String,
    pub position: usize,
    pub result: String,
}

#[derive(Clone, Debug)]
pub struct NormalForm {
    pub result: LinComb,
    pub steps: usize,
    pub trace: Vec<TraceStep>,
}

/// Replaces `A W_r B` by `A f_r B` in the single word `word` of `t`.
pub fn reduce_once(
    sys: &RewriteSystem,
    t: &LinComb,
    word: &Word,
    rule: usize,
    position: usize,
) -> Result<LinComb, WordError> {
    let r = &sys.rules[rule];
    let c = t.coefficient(word);
    if c.is_zero() || !word.occurs_at(&r.lhs, position) {
        return Err(WordError::NoMatch {
            rule: r.label.clone(),
            word: sys.render(word),
            position,
        });
    }
    let mut out = t.clone();
    out.remove(word);
    let left = word.slice(0, position);
    let right = word.slice(position + r.lhs.len(), word.len());
    for (w, d) in r.rhs.sandwich(&left, &right).terms() {
        out.add_term(w.clone(), &(d * &c));
    }
    Ok(out)
}

struct Reducer<'a> {
    sys: &'a RewriteSystem,
    todo: LinComb,
    done: LinComb,
    steps: usize,
    budget: usize,
    trace: Option<Vec<TraceStep>>,
}

impl Reducer<'_> {
    fn new<'a>(sys: &'a RewriteSystem, t: &LinComb, budget: usize, trace: bool) -> Reducer<'a> {
        Reducer {
            sys,
            todo: t.clone(),
            done: LinComb::zero(),
            steps: 0,
            budget,
            trace: trace.then(Vec::new),
        }
    }

    fn apply(&mut self, w: Word, rule: usize, position: usize) -> Result<(), WordError> {
        if self.steps >= self.budget {
            return Err(WordError::Divergence {
                budget: self.budget,
                trace: self.trace.take().unwrap_or_default(),
            });
        }
        self.steps += 1;
        let r = &self.sys.rules[rule];
        let c = self.todo.remove(&w).expect("reduced word is present");
        let left = w.slice(0, position);
        let right = w.slice(position + r.lhs.len(), w.len());
        for (v, d) in r.rhs.sandwich(&left, &right).terms() {
            let cmp = self.sys.compare(v, &w);
            if cmp != Comparison::Lt {
                return Err(WordError::OrderViolation {
                    rule: r.label.clone(),
                    from: self.sys.render(&w),
                    to: self.sys.render(v),
                    comparison: cmp,
                });
            }
            let d = d * &c;
            if !self.done.coefficient(v).is_zero() {
                self.done.add_term(v.clone(), &d);
            } else {
                self.todo.add_term(v.clone(), &d);
            }
        }
        if let Some(tr) = self.trace.as_mut() {
            tr.push(TraceStep {
                rule: r.label.clone(),
                word: self.sys.render(&w),
                position,
                result: self.sys.render_lincomb(&self.todo.add(&self.done)),
            });
        }
        Ok(())
    }

    fn finish(self) -> NormalForm {
        NormalForm {
            result: self.done,
            steps: self.steps,
            trace: self.trace.unwrap_or_default(),
        }
    }
}

/// Reduces to a combination of irreducible words: smallest reducible word
/// first, leftmost match, lowest rule index. Every step is checked to
/// decrease the order.
pub fn normal_form(
    sys: &RewriteSystem,
    t: &LinComb,
    budget: usize,
    trace: bool,
) -> Result<NormalForm, WordError> {
    let mut red = Reducer::new(sys, t, budget, trace);
    loop {
        let Some(w) = red.todo.words().next().cloned() else {
            break;
        };
        match sys.first_match(&w) {
            Some((rule, p)) => red.apply(w, rule, p)?,
            None => {
                let c = red.todo.remove(&w).unwrap();
                red.done.add_term(w, &c);
            }
        }
    }
    Ok(red.finish())
}

/// Reduces choosing a uniformly random word and a uniformly random match
/// at every step.
pub fn normal_form_random(
    sys: &RewriteSystem,
    t: &LinComb,
    budget: usize,
    rng: &mut impl Rng,
) -> Result<NormalForm, WordError> {
    let mut red = Reducer::new(sys, t, budget, false);
    loop {
        // settle irreducible words first so the choice is among redexes
        let pending: Vec<Word> = red.todo.words().cloned().collect();
        for w in pending {
            if sys.is_irreducible(&w) {
                let c = red.todo.remove(&w).unwrap();
                red.done.add_term(w, &c);
            }
        }
        if red.todo.is_zero() {
            return Ok(red.finish());
        }
        let k = rng.gen_range(0..red.todo.len());
        let w = red.todo.words().nth(k).unwrap().clone();
        let matches = sys.all_matches(&w);
        let (rule, p) = matches[rng.gen_range(0..matches.len())];
        red.apply(w, rule, p)?;
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Alphabet, OrderSpec, RewriteSystem};
    use super::*;

    pub(crate) fn xyz() -> RewriteSystem {
        let a = Alphabet::new(["x", "y", "z"]).unwrap();
        let mut s = RewriteSystem::new(a, OrderSpec::deglex(&[0, 1, 2]), vec![]);
        s.push_rule("yx", "yx", "xy + 1").unwrap();
        s.push_rule("zx", "zx", "xz + 2").unwrap();
        s.push_rule("zy", "zy", "yz + 3").unwrap();
        s
    }

    #[test]
    fn validation() {
        let s = xyz();
        assert!(validate_system(&s).valid);
        let a = Alphabet::new(["x", "y"]).unwrap();
        let mut bad = RewriteSystem::new(a, OrderSpec::deglex(&[0, 1]), vec![]);
        bad.push_rule("r", "xy", "yx").unwrap();
        let rep = validate_system(&bad);
        assert!(!rep.valid);
        assert_eq!(rep.violations[0].word, "yx");
        let empty = RewriteSystem::new(
            Alphabet::new(["x"]).unwrap(),
            OrderSpec::LengthThenIncomparable,
            vec![],
        );
        assert!(validate_system(&empty).valid);
    }

    #[test]
    fn elementary_resolution() {
        let s = xyz();
        let t = s.lincomb("zyx").unwrap();
        let w = s.word("zyx").unwrap();
        let r = reduce_once(&s, &t, &w, 2, 0).unwrap();
        assert_eq!(s.render_lincomb(&r), "yzx + 3x");
        assert!(reduce_once(&s, &t, &w, 2, 1).is_err());
    }

    #[test]
    fn normal_forms() {
        let s = xyz();
        let nf = normal_form(&s, &s.lincomb("zyx").unwrap(), 1000, true).unwrap();
        assert_eq!(s.render_lincomb(&nf.result), "xyz + z + 2y + 3x");
        assert_eq!(nf.trace.len(), nf.steps);
        let fixed = s.lincomb("xxy").unwrap();
        assert_eq!(normal_form(&s, &fixed, 10, false).unwrap().result, fixed);
        assert!(matches!(
            normal_form(&s, &s.lincomb("zyx").unwrap(), 2, false),
            Err(WordError::Divergence { .. })
        ));
    }

    #[test]
    fn random_agrees_on_xyz() {
        use rand::SeedableRng;
        let s = xyz();
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let t = s.lincomb("zzyyxx").unwrap();
        let det = normal_form(&s, &t, 100_000, false).unwrap().result;
        for _ in 0..20 {
            assert_eq!(
                normal_form_random(&s, &t, 100_000, &mut rng)
                    .unwrap()
                    .result,
                det
            );
        }
    }
}
