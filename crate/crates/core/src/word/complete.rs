use serde::Serialize;

use super::ambiguity::{check_ambiguity, enumerate_minimal_ambiguities};
use super::rewrite::{normal_form, validate_system};
use super::{LinComb, RewriteRule, RewriteSystem, Word, WordError};
use crate::ms::Comparison;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CompletionStatus {
    Confluent,
    BudgetExhausted,
}

#[derive(Clone, Debug)]
pub struct CompletionResult {
    pub system: RewriteSystem,
    pub rounds: usize,
    pub status: CompletionStatus,
    /// Labels of the rules added along the way (some may later be dropped).
    pub added: Vec<String>,
}

/// Orients a nonzero combination as `largest word ↦ rest`.
fn orient(sys: &RewriteSystem, t: &LinComb, label: String) -> Result<RewriteRule, WordError> {
    let stuck = |reason: &str| WordError::CompletionStuck {
        residual: sys.render_lincomb(t),
        reason: reason.into(),
    };
    let words: Vec<&Word> = t.words().collect();
    let top = words
        .iter()
        .find(|w| {
            words
                .iter()
                .all(|v| v == *w || sys.compare(v, w) == Comparison::Lt)
        })
        .ok_or_else(|| stuck("no unique largest word"))?;
    let c = t.coefficient(top);
    let c = c
        .as_constant()
        .ok_or_else(|| stuck("leading coefficient is not a constant"))?;
    let lhs = LinComb::term((*top).clone(), Scalar::constant(c));
    let rhs = lhs.sub(t);
    RewriteRule::from_relation(label, &lhs, &rhs).map_err(|_| stuck("largest word is empty"))
}

/// Adds `nf(t)` as a new rule when nonzero.
fn absorb(
    sys: &mut RewriteSystem,
    t: &LinComb,
    budget: usize,
    added: &mut Vec<String>,
) -> Result<bool, WordError> {
    let r = normal_form(sys, t, budget, false)?.result;
    if r.is_zero() {
        return Ok(false);
    }
    let label = format!("c{}", added.len() + 1);
    let rule = orient(sys, &r, label.clone())?;
    sys.rules.push(rule);
    added.push(label);
    Ok(true)
}

/// Drops rules whose left side contains another rule's left side, feeding
/// their difference back in, and normalizes right-hand sides.
fn interreduce(
    sys: &mut RewriteSystem,
    budget: usize,
    added: &mut Vec<String>,
) -> Result<(), WordError> {
    loop {
        let redundant = (0..sys.rules.len()).find(|&i| {
            let li = &sys.rules[i].lhs;
            sys.rules.iter().enumerate().any(|(j, r)| {
                j != i
                    && (0..=li.len().saturating_sub(r.lhs.len())).any(|p| li.occurs_at(&r.lhs, p))
                    && (r.lhs != *li || j < i)
            })
        });
        let Some(i) = redundant else { break };
        let rule = sys.rules.remove(i);
        let diff = LinComb::word(rule.lhs.clone()).sub(&rule.rhs);
        absorb(sys, &diff, budget, added)?;
    }
    for i in 0..sys.rules.len() {
        let rhs = normal_form(sys, &sys.rules[i].rhs, budget, false)?.result;
        sys.rules[i].rhs = rhs;
    }
    Ok(())
}

/// Knuth–Bendix style completion: each unresolvable ambiguity contributes
/// its oriented residual as a new rule, until all ambiguities resolve or
/// `round_budget` rounds have run.
pub fn complete(
    sys: &RewriteSystem,
    round_budget: usize,
    budget: usize,
) -> Result<CompletionResult, WordError> {
    let report = validate_system(sys);
    if let Some(v) = report.violations.first() {
        return Err(WordError::Order(format!(
            "rule {} is not compatible: {} vs {}",
            v.rule, v.lhs, v.word
        )));
    }
    let mut cur = sys.clone();
    let mut added = Vec::new();
    for round in 0..round_budget {
        let mut changed = false;
        for a in enumerate_minimal_ambiguities(&cur) {
            let rep = check_ambiguity(&cur, &a, budget, false)?;
            if !rep.resolvable {
                changed |= absorb(&mut cur, &rep.residual, budget, &mut added)?;
            }
        }
        if !changed {
            return Ok(CompletionResult {
                system: cur,
                rounds: round,
                status: CompletionStatus::Confluent,
                added,
            });
        }
        interreduce(&mut cur, budget, &mut added)?;
    }
    let done = enumerate_minimal_ambiguities(&cur)
        .iter()
        .map(|a| check_ambiguity(&cur, a, budget, false).map(|r| r.resolvable))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .all(|b| b);
    let status = if done {
        CompletionStatus::Confluent
    } else {
        CompletionStatus::BudgetExhausted
    };
    Ok(CompletionResult {
        system: cur,
        rounds: round_budget,
        status,
        added,
    })
}
