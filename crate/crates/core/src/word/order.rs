use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use super::Word;
use crate::ms::Comparison;

/// A user-supplied semigroup partial order on words. DCC cannot be checked;
/// rewriting enforces a step budget instead.
pub trait WordOrder: Send + Sync + fmt::Debug {
    fn compare(&self, a: &Word, b: &Word) -> Comparison;
    fn name(&self) -> String {
        "plugin".into()
    }
}

#[derive(Clone, Debug)]
pub enum OrderSpec {
    /// Length, then total weight, then lexicographic by letter rank.
    Deglex {
        rank: Vec<u32>,
        weights: Option<Vec<u64>>,
    },
    /// Shorter words are smaller; distinct words of one length are incomparable.
    LengthThenIncomparable,
    Plugin(Arc<dyn WordOrder>),
}

impl OrderSpec {
    /// Deglex where `precedence` lists letter indices from smallest to largest.
    pub fn deglex(precedence: &[u16]) -> Self {
        let mut rank = vec![0; precedence.len()];
        for (k, &l) in precedence.iter().enumerate() {
            rank[l as usize] = k as u32;
        }
        OrderSpec::Deglex {
            rank,
            weights: None,
        }
    }

    pub fn weighted(precedence: &[u16], weights: Vec<u64>) -> Self {
        match Self::deglex(precedence) {
            OrderSpec::Deglex { rank, .. } => OrderSpec::Deglex {
                rank,
                weights: Some(weights),
            },
            _ => unreachable!(),
        }
    }

    pub fn compare(&self, a: &Word, b: &Word) -> Comparison {
        let ord = match self {
            OrderSpec::Deglex { rank, weights } => {
                let weight =
                    |w: &Word, ws: &Vec<u64>| w.0.iter().map(|&l| ws[l as usize]).sum::<u64>();
                a.len()
                    .cmp(&b.len())
                    .then_with(|| match weights {
                        Some(ws) => weight(a, ws).cmp(&weight(b, ws)),
                        None => Ordering::Equal,
                    })
                    .then_with(|| {
                        let ra = a.0.iter().map(|&l| rank[l as usize]);
                        let rb = b.0.iter().map(|&l| rank[l as usize]);
                        ra.cmp(rb)
                    })
            }
            OrderSpec::LengthThenIncomparable => match a.len().cmp(&b.len()) {
                Ordering::Equal if a != b => return Comparison::Incomparable,
                o => o,
            },
            OrderSpec::Plugin(p) => return p.compare(a, b),
        };
        match ord {
            Ordering::Less => Comparison::Lt,
            Ordering::Greater => Comparison::Gt,
            Ordering::Equal => Comparison::Eq,
        }
    }

    /// Whether every pair of words is comparable.
    pub fn is_total(&self) -> bool {
        matches!(self, OrderSpec::Deglex { .. })
    }

    /// Whether only finitely many words lie below any word of length `n`
    /// within words of length at most `n`: true for length-graded orders.
    pub fn is_length_graded(&self) -> bool {
        !matches!(self, OrderSpec::Plugin(_))
    }

    pub fn name(&self) -> String {
        match self {
            OrderSpec::Deglex { weights: None, .. } => "deglex".into(),
            OrderSpec::Deglex {
                weights: Some(_), ..
            } => "weighted-deglex".into(),
            OrderSpec::LengthThenIncomparable => "length".into(),
            OrderSpec::Plugin(p) => p.name(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deglex_and_weights() {
        // letters s=0, t=1 with t < s
        let o = OrderSpec::deglex(&[1, 0]);
        assert_eq!(
            o.compare(&Word(vec![1, 0, 1]), &Word(vec![0, 1, 0])),
            Comparison::Lt
        );
        assert_eq!(o.compare(&Word(vec![0]), &Word(vec![1, 1])), Comparison::Lt);
        // a heavy t reverses the braid comparison
        let w = OrderSpec::weighted(&[1, 0], vec![1, 2]);
        assert_eq!(
            w.compare(&Word(vec![1, 0, 1]), &Word(vec![0, 1, 0])),
            Comparison::Gt
        );
        let l = OrderSpec::LengthThenIncomparable;
        assert_eq!(
            l.compare(&Word(vec![0, 1]), &Word(vec![1, 0])),
            Comparison::Incomparable
        );
        assert_eq!(
            l.compare(&Word(vec![0, 1]), &Word(vec![0, 1])),
            Comparison::Eq
        );
    }
}
