use std::collections::{HashMap, VecDeque};
use std::sync::{OnceLock, RwLock};

use serde::Serialize;

use super::{evaluate, Expression, MsError, Triple};

/// Outcome of comparing two words in a partial order.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Comparison {
    Lt,
    Gt,
    /// Equal (for `leq3`) or commutation-equivalent (for `leq`).
    Eq,
    Incomparable,
}

impl Comparison {
    pub fn reverse(self) -> Comparison {
        match self {
            Comparison::Lt => Comparison::Gt,
            Comparison::Gt => Comparison::Lt,
            c => c,
        }
    }

    pub fn is_le(self) -> bool {
        matches!(self, Comparison::Lt | Comparison::Eq)
    }
}

/// The `S_3` word traced out by the strands of `t`: each crossing between two
/// of them becomes `s` or `t` according to their relative position.
pub fn triple_projection(e: &Expression, t: Triple) -> Expression {
    let mut arr: Vec<u8> = (1..=e.n() as u8).collect();
    let mut bottom_up = Vec::new();
    for &l in e.letters().iter().rev() {
        let p = l as usize - 1;
        let (a, b) = (arr[p], arr[p + 1]);
        if t.contains(a) && t.contains(b) {
            // rank among the three chosen strands of the left one
            let rank = arr[..p].iter().filter(|&&x| t.contains(x)).count();
            bottom_up.push(rank as u8 + 1);
        }
        arr.swap(p, p + 1);
    }
    bottom_up.reverse();
    Expression::new_unchecked(3, bottom_up)
}

type BraidCache = RwLock<HashMap<Vec<u8>, std::sync::Arc<Vec<u8>>>>;

fn braid_cache() -> &'static BraidCache {
    static CACHE: OnceLock<BraidCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Lexicographically smallest word braid-connected to `w` (in `S_3`).
fn braid_component_min(w: &[u8]) -> std::sync::Arc<Vec<u8>> {
    if let Some(m) = braid_cache().read().unwrap().get(w) {
        return m.clone();
    }
    let mut seen = vec![w.to_vec()];
    let mut queue = VecDeque::from([w.to_vec()]);
    while let Some(cur) = queue.pop_front() {
        for k in 0..cur.len().saturating_sub(2) {
            let flipped = match &cur[k..k + 3] {
                [1, 2, 1] => [2, 1, 2],
                [2, 1, 2] => [1, 2, 1],
                _ => continue,
            };
            let mut next = cur.clone();
            next[k..k + 3].copy_from_slice(&flipped);
            if !seen.contains(&next) {
                seen.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    let min = std::sync::Arc::new(seen.iter().min().unwrap().clone());
    let mut cache = braid_cache().write().unwrap();
    for v in seen {
        cache.insert(v, min.clone());
    }
    min
}

/// The order on `S_3` words: shorter is smaller; equal-length words are
/// comparable only when braid moves connect them, and then the
/// lexicographically later one (with `s < t`) is smaller.
pub fn leq3(a: &Expression, b: &Expression) -> Comparison {
    use std::cmp::Ordering::*;
    match a.len().cmp(&b.len()) {
        Less => return Comparison::Lt,
        Greater => return Comparison::Gt,
        Equal => {}
    }
    if a.letters() == b.letters() {
        return Comparison::Eq;
    }
    if evaluate(a) != evaluate(b)
        || braid_component_min(a.letters()) != braid_component_min(b.letters())
    {
        return Comparison::Incomparable;
    }
    if a.letters() > b.letters() {
        Comparison::Lt
    } else {
        Comparison::Gt
    }
}

/// Compares expressions: across lengths the shorter one is smaller; at
/// equal length, every triple projection is compared with [`leq3`].
pub fn leq(a: &Expression, b: &Expression) -> Result<Comparison, MsError> {
    use std::cmp::Ordering::*;
    if a.n() != b.n() {
        return Err(MsError::StrandMismatch(a.n(), b.n()));
    }
    match a.len().cmp(&b.len()) {
        Less => return Ok(Comparison::Lt),
        Greater => return Ok(Comparison::Gt),
        Equal => {}
    }
    if a.n() < 3 {
        // No triples; words of one length in S_2 coincide.
        return Ok(if a == b {
            Comparison::Eq
        } else {
            Comparison::Incomparable
        });
    }
    let (mut le, mut ge) = (true, true);
    for t in Triple::all(a.n()) {
        match leq3(&triple_projection(a, t), &triple_projection(b, t)) {
            Comparison::Eq => {}
            Comparison::Lt => ge = false,
            Comparison::Gt => le = false,
            Comparison::Incomparable => return Ok(Comparison::Incomparable),
        }
        if !le && !ge {
            return Ok(Comparison::Incomparable);
        }
    }
    Ok(match (le, ge) {
        (true, true) => Comparison::Eq,
        (true, false) => Comparison::Lt,
        (false, true) => Comparison::Gt,
        (false, false) => Comparison::Incomparable,
    })
}
