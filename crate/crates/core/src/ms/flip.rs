use std::collections::{BTreeMap, BTreeSet};

use super::{
    arrange_consecutive, crossing_sequence, evaluate, inversion_set, is_reduced, Expression,
    MsError, Triple,
};

/// Full triples whose packet the crossing sequence orders antilexicographically.
pub fn higher_inversion_set(e: &Expression) -> Result<BTreeSet<Triple>, MsError> {
    if !is_reduced(e) {
        return Err(MsError::NotReduced(e.to_string()));
    }
    Ok(higher_inversion_set_unchecked(e))
}

pub(crate) fn higher_inversion_set_unchecked(e: &Expression) -> BTreeSet<Triple> {
    let rank: BTreeMap<_, _> = crossing_sequence(e)
        .into_iter()
        .enumerate()
        .map(|(k, p)| (p, k))
        .collect();
    full_triples_with_ranks(e, &rank)
        .into_iter()
        .filter(|(_, r)| r[0] > r[1] && r[1] > r[2])
        .map(|(t, _)| t)
        .collect()
}

fn full_triples_with_ranks(
    e: &Expression,
    rank: &BTreeMap<super::StrandPair, usize>,
) -> Vec<(Triple, [usize; 3])> {
    Triple::all(e.n())
        .into_iter()
        .filter_map(|t| {
            let p = t.packet();
            Some((t, [*rank.get(&p[0])?, *rank.get(&p[1])?, *rank.get(&p[2])?]))
        })
        .collect()
}

/// Applies the braid move at `position` in either direction, checking that
/// exactly one triple enters or leaves the higher inversion set.
pub fn apply_packet_flip(
    e: &Expression,
    position: usize,
) -> Result<(Expression, Triple, bool), MsError> {
    if !is_reduced(e) {
        return Err(MsError::NotReduced(e.to_string()));
    }
    let l = e.letters();
    if position + 3 > l.len() {
        return Err(MsError::NoMatch(position));
    }
    let (a, b, c) = (l[position], l[position + 1], l[position + 2]);
    if a != c || a.abs_diff(b) != 1 {
        return Err(MsError::NoMatch(position));
    }
    let forward = a < b;
    let mut v = l.to_vec();
    v[position..position + 3].copy_from_slice(&[b, a, b]);
    let f = e.with_letters(v);
    let before = higher_inversion_set_unchecked(e);
    let after = higher_inversion_set_unchecked(&f);
    let delta: Vec<Triple> = before.symmetric_difference(&after).copied().collect();
    let gained = after.len() > before.len();
    if delta.len() != 1 || gained != forward {
        return Err(MsError::Internal(format!(
            "flip of {e} at {position} changed J by {delta:?}"
        )));
    }
    Ok((f, delta[0], forward))
}

/// A forward packet flip available after commutations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlipSite {
    /// The commutation-equivalent word in which the packet is consecutive.
    pub rearranged: Expression,
    /// Adjacent swaps turning the input into `rearranged`.
    pub swaps: Vec<usize>,
    /// Start of the `s_i s_{i+1} s_i` pattern in `rearranged`.
    pub position: usize,
    pub triple: Triple,
}

/// Finds a full triple outside `J(e)` whose packet commutations make
/// consecutive; `None` exactly when `J(e)` already holds every full triple.
pub fn find_flippable_packet(e: &Expression) -> Result<Option<FlipSite>, MsError> {
    if !is_reduced(e) {
        return Err(MsError::NotReduced(e.to_string()));
    }
    let rank: BTreeMap<_, _> = crossing_sequence(e)
        .into_iter()
        .enumerate()
        .map(|(k, p)| (p, k))
        .collect();
    let len = e.len();
    let mut candidates: Vec<(usize, Triple, [usize; 3])> = full_triples_with_ranks(e, &rank)
        .into_iter()
        .filter(|(_, r)| r[0] < r[1] && r[1] < r[2])
        .map(|(t, r)| {
            // word positions, top to bottom: (j|k) highest, (i|j) lowest
            let pos = [len - 1 - r[2], len - 1 - r[1], len - 1 - r[0]];
            (pos[2] - pos[0], t, pos)
        })
        .collect();
    if candidates.is_empty() {
        return Ok(None);
    }
    candidates.sort();
    let l = e.letters();
    for (_, t, pos) in candidates {
        let Some(arr) = arrange_consecutive(len, &pos, |a, b| l[a].abs_diff(l[b]) >= 2) else {
            continue;
        };
        let letters: Vec<u8> = arr.order.iter().map(|&p| l[p]).collect();
        let p = arr.start;
        debug_assert!(letters[p] == letters[p + 2] && letters[p] + 1 == letters[p + 1]);
        return Ok(Some(FlipSite {
            rearranged: e.with_letters(letters),
            swaps: arr.swaps,
            position: p,
            triple: t,
        }));
    }
    Err(MsError::Internal(format!(
        "{e} has lexicographic full triples but none is flippable"
    )))
}

/// Every full triple of the permutation `e` represents.
pub fn full_triples(e: &Expression) -> BTreeSet<Triple> {
    let inv = inversion_set(&evaluate(e));
    Triple::all(e.n())
        .into_iter()
        .filter(|t| t.packet().iter().all(|p| inv.contains(p)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ms::Permutation;

    fn ex(n: usize, s: &str) -> Expression {
        Expression::parse(n, s).unwrap()
    }

    #[test]
    fn j_sets() {
        assert!(higher_inversion_set(&ex(3, "sts")).unwrap().is_empty());
        assert_eq!(
            higher_inversion_set(&ex(3, "tst")).unwrap(),
            BTreeSet::from([Triple(1, 2, 3)])
        );
        assert!(higher_inversion_set(&ex(3, "ss")).is_err());
    }

    #[test]
    fn flips() {
        let (f, t, fwd) = apply_packet_flip(&ex(3, "sts"), 0).unwrap();
        assert_eq!((f, t, fwd), (ex(3, "tst"), Triple(1, 2, 3), true));
        let (f, _, fwd) = apply_packet_flip(&ex(3, "tst"), 0).unwrap();
        assert_eq!((f, fwd), (ex(3, "sts"), false));
        let (f, _, _) = apply_packet_flip(&ex(4, "stsuts"), 0).unwrap();
        assert_eq!(f, ex(4, "tstuts"));
        assert!(apply_packet_flip(&ex(4, "stsuts"), 1).is_err());
    }

    #[test]
    fn flippable_packets() {
        let site = find_flippable_packet(&ex(3, "sts")).unwrap().unwrap();
        assert_eq!((site.position, site.triple), (0, Triple(1, 2, 3)));
        assert!(find_flippable_packet(&ex(3, "tst")).unwrap().is_none());
        let w0 = Permutation::longest(4).reduced_expression();
        let mut e = w0;
        let mut steps = 0;
        while let Some(site) = find_flippable_packet(&e).unwrap() {
            let (f, t, fwd) = apply_packet_flip(&site.rearranged, site.position).unwrap();
            assert!(fwd && t == site.triple);
            e = f;
            steps += 1;
        }
        assert_eq!(higher_inversion_set(&e).unwrap(), full_triples(&e));
        assert!(steps <= 4);
    }
}
