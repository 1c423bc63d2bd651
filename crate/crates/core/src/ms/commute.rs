use std::collections::{BTreeSet, VecDeque};

use super::Expression;

/// Greedy trace-monoid normal form: repeatedly emit, among the letters that
/// commute to the front, the one with the smallest index.
pub fn comm_canonical(e: &Expression) -> Expression {
    let mut rest: Vec<u8> = e.letters().to_vec();
    let mut out = Vec::with_capacity(rest.len());
    while !rest.is_empty() {
        let mut best: Option<usize> = None;
        for k in 0..rest.len() {
            let l = rest[k];
            if rest[..k].iter().all(|&m| l.abs_diff(m) >= 2) && best.is_none_or(|b| l < rest[b]) {
                best = Some(k);
            }
        }
        let k = best.expect("the first letter is always movable");
        out.push(rest.remove(k));
    }
    e.with_letters(out)
}

/// All words reachable by distant commutations, by breadth-first search.
/// Used as an oracle for [`comm_canonical`].
pub fn commutation_class_bfs(e: &Expression) -> BTreeSet<Expression> {
    let mut seen = BTreeSet::from([e.clone()]);
    let mut queue = VecDeque::from([e.clone()]);
    while let Some(cur) = queue.pop_front() {
        let l = cur.letters();
        for k in 0..l.len().saturating_sub(1) {
            if l[k].abs_diff(l[k + 1]) >= 2 {
                let mut v = l.to_vec();
                v.swap(k, k + 1);
                let next = cur.with_letters(v);
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    seen
}

/// A rearrangement of a word, modulo commutations, bringing chosen letters
/// together.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrangement {
    /// `order[k]` is the original position of the letter now at `k`.
    pub order: Vec<usize>,
    /// Adjacent transpositions realising `order`, each swapping positions
    /// `k, k+1` of the current word.
    pub swaps: Vec<usize>,
    /// Position of the first chosen letter after rearranging.
    pub start: usize,
}

/// Rearranges a word by commutations so that the letters at the sorted
/// positions `targets` become consecutive (keeping their relative order).
///
/// `commutes(a, b)` says whether the letters at original positions `a` and
/// `b` may be swapped. Returns `None` when some letter between the targets
/// is forced to stay between them.
pub fn arrange_consecutive(
    len: usize,
    targets: &[usize],
    commutes: impl Fn(usize, usize) -> bool,
) -> Option<Arrangement> {
    let (&first, &last) = (targets.first()?, targets.last()?);
    debug_assert!(targets.windows(2).all(|w| w[0] < w[1]) && last < len);
    let is_target = |p: usize| targets.binary_search(&p).is_ok();
    let span = last - first + 1;
    // after[r]: r must stay below some target; before[r]: above some target.
    let mut after = vec![false; span];
    let mut before = vec![false; span];
    for r in first..=last {
        if is_target(r) {
            continue;
        }
        after[r - first] =
            (first..r).any(|q| (is_target(q) || after[q - first]) && !commutes(q, r));
    }
    for r in (first..=last).rev() {
        if is_target(r) {
            continue;
        }
        before[r - first] =
            (r + 1..=last).any(|q| (is_target(q) || before[q - first]) && !commutes(r, q));
        if before[r - first] && after[r - first] {
            return None;
        }
    }
    let mut order: Vec<usize> = (0..first).collect();
    order.extend((first..=last).filter(|&r| !is_target(r) && before[r - first]));
    let start = order.len();
    order.extend_from_slice(targets);
    order.extend((first..=last).filter(|&r| !is_target(r) && !before[r - first]));
    order.extend(last + 1..len);

    // Bubble the current word into `order`; every swap exchanges a pair
    // whose relative order changes, hence a commuting pair.
    let mut cur: Vec<usize> = (0..len).collect();
    let mut swaps = Vec::new();
    for (k, &want) in order.iter().enumerate() {
        let mut j = cur.iter().position(|&x| x == want).unwrap();
        while j > k {
            debug_assert!(commutes(cur[j - 1], cur[j]));
            cur.swap(j - 1, j);
            swaps.push(j - 1);
            j -= 1;
        }
    }
    Some(Arrangement {
        order,
        swaps,
        start,
    })
}
