use serde::Serialize;

use super::{comm_canonical, find_flippable_packet, is_reduced, Expression, MsError};

/// One oriented move, addressed by position in the current word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "move", rename_all = "snake_case")]
pub enum Move {
    /// Swap the distant letters at `position` and `position + 1`.
    Commute { position: usize },
    /// `s_i s_{i+1} s_i ↦ s_{i+1} s_i s_{i+1}` starting at `position`.
    Braid { position: usize },
    /// `s_i s_i ↦ 1` at `position`.
    Cancel { position: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SinkResult {
    /// Canonical representative of the sink class.
    pub sink: Expression,
    pub trace: Vec<Move>,
}

/// The shortest non-reduced factor `s_i y s_j` ending earliest, as an
/// inclusive index range. Both `s_i y` and `y s_j` are reduced.
pub fn minimal_nonreduced_window(e: &Expression) -> Option<(usize, usize)> {
    let l = e.letters();
    for b in 1..l.len() {
        for a in (0..b).rev() {
            if !is_reduced(&e.with_letters(l[a..=b].to_vec())) {
                return Some((a, b));
            }
        }
    }
    None
}

struct Walker {
    word: Vec<u8>,
    n: usize,
    trace: Vec<Move>,
    budget: usize,
}

impl Walker {
    fn tick(&mut self) -> Result<(), MsError> {
        if self.trace.len() >= self.budget {
            return Err(MsError::Divergence(self.budget));
        }
        Ok(())
    }

    fn commute(&mut self, position: usize) -> Result<(), MsError> {
        self.tick()?;
        let (a, b) = (self.word[position], self.word[position + 1]);
        if a.abs_diff(b) < 2 {
            return Err(MsError::Internal(format!("letters {a},{b} do not commute")));
        }
        self.word.swap(position, position + 1);
        self.trace.push(Move::Commute { position });
        Ok(())
    }

    fn braid(&mut self, position: usize) -> Result<(), MsError> {
        self.tick()?;
        let w = &mut self.word;
        let (a, b) = (w[position], w[position + 1]);
        if w[position + 2] != a || a + 1 != b {
            return Err(MsError::Internal(format!("no forward braid at {position}")));
        }
        w[position..position + 3].copy_from_slice(&[b, a, b]);
        self.trace.push(Move::Braid { position });
        Ok(())
    }

    fn cancel(&mut self, position: usize) -> Result<(), MsError> {
        self.tick()?;
        if self.word[position] != self.word[position + 1] {
            return Err(MsError::Internal(format!("no square at {position}")));
        }
        self.word.drain(position..position + 2);
        self.trace.push(Move::Cancel { position });
        Ok(())
    }

    /// Looks for a forward flip inside `word[a..b]` and applies it.
    fn flip_within(&mut self, a: usize, b: usize) -> Result<bool, MsError> {
        let sub = Expression::new_unchecked(self.n, self.word[a..b].to_vec());
        let Some(site) = find_flippable_packet(&sub)? else {
            return Ok(false);
        };
        for s in site.swaps {
            self.commute(a + s)?;
        }
        self.braid(a + site.position)?;
        Ok(true)
    }
}

/// Walks oriented moves to the sink of the commutation class graph.
///
/// While the word is not reduced, take a minimal non-reduced factor
/// `s_i y s_j`; if `s_i y` or `y s_j` is not yet a sink of its reduced
/// expression graph, flip a packet there; otherwise `y` commutes with `s_i`
/// and `i = j`, so commute and cancel. Once reduced, flip packets until none
/// is left.
pub fn sink(e: &Expression, budget: usize) -> Result<SinkResult, MsError> {
    let mut w = Walker {
        word: e.letters().to_vec(),
        n: e.n(),
        trace: Vec::new(),
        budget,
    };
    loop {
        let cur = Expression::new_unchecked(w.n, w.word.clone());
        match minimal_nonreduced_window(&cur) {
            None => {
                if !w.flip_within(0, w.word.len())? {
                    break;
                }
            }
            Some((a, b)) => {
                if w.flip_within(a, b)? || w.flip_within(a + 1, b + 1)? {
                    continue;
                }
                for p in a..b - 1 {
                    w.commute(p)?;
                }
                w.cancel(b - 1)?;
            }
        }
    }
    Ok(SinkResult {
        sink: comm_canonical(&Expression::new_unchecked(w.n, w.word)),
        trace: w.trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ms::{evaluate, higher_inversion_set, Permutation};

    fn ex(n: usize, s: &str) -> Expression {
        Expression::parse(n, s).unwrap()
    }

    #[test]
    fn small_sinks() {
        assert!(sink(&ex(2, "ss"), 100).unwrap().sink.is_empty());
        assert_eq!(sink(&ex(3, "sts"), 100).unwrap().sink, ex(3, "tst"));
        assert_eq!(
            sink(&ex(3, "ststst"), 100).unwrap().sink,
            Expression::empty(3)
        );
        assert!(matches!(
            sink(&ex(4, "stsuts"), 1),
            Err(MsError::Divergence(1))
        ));
    }

    #[test]
    fn sinks_are_reduced_and_complete() {
        for len in 0..=7 {
            for e in Expression::all_of_length(4, len) {
                let r = sink(&e, 1000).unwrap();
                assert!(is_reduced(&r.sink));
                assert_eq!(evaluate(&r.sink), evaluate(&e));
                let j = higher_inversion_set(&r.sink).unwrap();
                assert_eq!(j, crate::ms::flip::full_triples(&r.sink));
            }
        }
        // crossing pairs in antilexicographic order, bottom to top
        let w0 = Permutation::longest(4);
        assert_eq!(
            sink(&w0.reduced_expression(), 100).unwrap().sink,
            comm_canonical(&ex(4, "utsutu"))
        );
    }
}
