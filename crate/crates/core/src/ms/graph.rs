use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use super::flip::higher_inversion_set_unchecked;
use super::{comm_canonical, is_reduced, Expression, MsError, Permutation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    Commute,
    Braid,
    Quadratic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    /// Reduced expressions only.
    Reduced,
    /// All expressions up to the given extra length.
    AllUpTo,
}

/// An edge, oriented `s_i s_{i+1} s_i ↦ s_{i+1} s_i s_{i+1}` and `s_i s_i ↦ 1`;
/// commutation edges are unoriented and stored with `from < to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct GraphEdge {
    pub from: usize,
    pub to: usize,
    pub kind: RelationKind,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuotientGraph {
    /// Canonical representatives of the commutation classes.
    pub classes: Vec<Expression>,
    pub edges: Vec<GraphEdge>,
    /// `|J|` for classes of reduced expressions.
    pub heights: Vec<Option<usize>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpressionGraph {
    pub permutation: Permutation,
    pub kind: GraphKind,
    pub vertices: Vec<Expression>,
    pub edges: Vec<GraphEdge>,
    pub quotient: QuotientGraph,
}

fn inversions(images: &[u8]) -> usize {
    let mut c = 0;
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            if images[i] > images[j] {
                c += 1;
            }
        }
    }
    c
}

/// All words of exactly `len` letters evaluating to `w`.
fn expressions_of_length(
    w: &Permutation,
    len: usize,
    cap: usize,
    out: &mut Vec<Expression>,
) -> Result<(), MsError> {
    fn go(
        n: usize,
        u: &mut Vec<u8>,
        prefix: &mut Vec<u8>,
        remaining: usize,
        cap: usize,
        out: &mut Vec<Expression>,
    ) -> Result<(), MsError> {
        // u = prefix⁻¹ ∘ w must be written with the remaining letters
        if inversions(u) > remaining {
            return Ok(());
        }
        if remaining == 0 {
            if out.len() >= cap {
                return Err(MsError::ResourceLimit(cap));
            }
            out.push(Expression::new_unchecked(n, prefix.clone()));
            return Ok(());
        }
        for l in 1..n as u8 {
            // s_l ∘ u swaps the values l and l+1
            let swap = |u: &mut Vec<u8>| {
                for x in u.iter_mut() {
                    if *x == l {
                        *x = l + 1;
                    } else if *x == l + 1 {
                        *x = l;
                    }
                }
            };
            swap(u);
            prefix.push(l);
            go(n, u, prefix, remaining - 1, cap, out)?;
            prefix.pop();
            swap(u);
        }
        Ok(())
    }
    let mut u = w.images().to_vec();
    go(w.n(), &mut u, &mut Vec::new(), len, cap, out)
}

/// Builds `Γ_w` (for `extra_length = 0`) or the graph of all expressions of
/// `w` of length at most `ℓ(w) + extra_length`, with its quotient by
/// commutations.
pub fn expression_graph(
    w: &Permutation,
    extra_length: usize,
    vertex_cap: usize,
) -> Result<ExpressionGraph, MsError> {
    if !extra_length.is_multiple_of(2) {
        return Err(MsError::Parse {
            input: extra_length.to_string(),
            message: "extra length must be even".into(),
        });
    }
    let base = w.length();
    let mut vertices = Vec::new();
    for extra in (0..=extra_length).step_by(2) {
        expressions_of_length(w, base + extra, vertex_cap, &mut vertices)?;
    }
    let index: BTreeMap<&Expression, usize> =
        vertices.iter().enumerate().map(|(k, e)| (e, k)).collect();
    let mut edges = BTreeSet::new();
    for (k, e) in vertices.iter().enumerate() {
        let l = e.letters();
        for p in 0..l.len() {
            if p + 1 < l.len() {
                if l[p].abs_diff(l[p + 1]) >= 2 {
                    let mut v = l.to_vec();
                    v.swap(p, p + 1);
                    let j = index[&e.with_letters(v)];
                    edges.insert(GraphEdge {
                        from: k.min(j),
                        to: k.max(j),
                        kind: RelationKind::Commute,
                    });
                }
                if l[p] == l[p + 1] {
                    let mut v = l.to_vec();
                    v.drain(p..p + 2);
                    if let Some(&j) = index.get(&e.with_letters(v)) {
                        edges.insert(GraphEdge {
                            from: k,
                            to: j,
                            kind: RelationKind::Quadratic,
                        });
                    }
                }
            }
            if p + 2 < l.len() && l[p] == l[p + 2] && l[p] + 1 == l[p + 1] {
                let mut v = l.to_vec();
                v[p..p + 3].copy_from_slice(&[l[p] + 1, l[p], l[p] + 1]);
                let j = index[&e.with_letters(v)];
                edges.insert(GraphEdge {
                    from: k,
                    to: j,
                    kind: RelationKind::Braid,
                });
            }
        }
    }
    let edges: Vec<GraphEdge> = edges.into_iter().collect();

    let mut class_of = Vec::with_capacity(vertices.len());
    let mut class_index: BTreeMap<Expression, usize> = BTreeMap::new();
    let mut classes = Vec::new();
    for e in &vertices {
        let c = comm_canonical(e);
        let id = *class_index.entry(c.clone()).or_insert_with(|| {
            classes.push(c);
            classes.len() - 1
        });
        class_of.push(id);
    }
    let qedges: BTreeSet<GraphEdge> = edges
        .iter()
        .filter(|e| e.kind != RelationKind::Commute)
        .map(|e| GraphEdge {
            from: class_of[e.from],
            to: class_of[e.to],
            kind: e.kind,
        })
        .collect();
    let heights = classes
        .iter()
        .map(|c| is_reduced(c).then(|| higher_inversion_set_unchecked(c).len()))
        .collect();
    Ok(ExpressionGraph {
        permutation: w.clone(),
        kind: if extra_length == 0 {
            GraphKind::Reduced
        } else {
            GraphKind::AllUpTo
        },
        vertices,
        edges,
        quotient: QuotientGraph {
            classes,
            edges: qedges.into_iter().collect(),
            heights,
        },
    })
}

impl QuotientGraph {
    pub fn sources(&self) -> Vec<usize> {
        let has_in: BTreeSet<usize> = self.edges.iter().map(|e| e.to).collect();
        (0..self.classes.len())
            .filter(|k| !has_in.contains(k))
            .collect()
    }

    pub fn sinks(&self) -> Vec<usize> {
        let has_out: BTreeSet<usize> = self.edges.iter().map(|e| e.from).collect();
        (0..self.classes.len())
            .filter(|k| !has_out.contains(k))
            .collect()
    }

    /// Number of directed paths from `from` to `to` (the graph is acyclic).
    pub fn count_paths(&self, from: usize, to: usize) -> u64 {
        let mut memo = vec![None; self.classes.len()];
        fn go(g: &QuotientGraph, v: usize, to: usize, memo: &mut Vec<Option<u64>>) -> u64 {
            if v == to {
                return 1;
            }
            if let Some(c) = memo[v] {
                return c;
            }
            let c = g
                .edges
                .iter()
                .filter(|e| e.from == v)
                .map(|e| go(g, e.to, to, memo))
                .sum();
            memo[v] = Some(c);
            c
        }
        go(self, from, to, &mut memo)
    }

    pub fn to_dot(&self, name: &str, oriented: bool) -> String {
        let mut s = String::new();
        let arrow = if oriented { "->" } else { "--" };
        let _ = writeln!(
            s,
            "{} \"{name}\" {{",
            if oriented { "digraph" } else { "graph" }
        );
        for (k, c) in self.classes.iter().enumerate() {
            match self.heights[k] {
                Some(h) => {
                    let _ = writeln!(s, "  v{k} [label=\"{c}\", height={h}];");
                }
                None => {
                    let _ = writeln!(s, "  v{k} [label=\"{c}\"];");
                }
            }
        }
        for e in &self.edges {
            let _ = writeln!(
                s,
                "  v{} {arrow} v{} [label=\"{}\"];",
                e.from,
                e.to,
                kind_label(e.kind)
            );
        }
        s.push_str("}\n");
        s
    }
}

fn kind_label(k: RelationKind) -> &'static str {
    match k {
        RelationKind::Commute => "commute",
        RelationKind::Braid => "braid",
        RelationKind::Quadratic => "quadratic",
    }
}

impl ExpressionGraph {
    pub fn to_dot(&self, oriented: bool) -> String {
        let mut s = String::new();
        let arrow = if oriented { "->" } else { "--" };
        let _ = writeln!(
            s,
            "{} \"{}\" {{",
            if oriented { "digraph" } else { "graph" },
            self.permutation
        );
        for (k, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(s, "  v{k} [label=\"{v}\"];");
        }
        for e in &self.edges {
            let dir = if e.kind == RelationKind::Commute && oriented {
                ", dir=none"
            } else {
                ""
            };
            let _ = writeln!(
                s,
                "  v{} {arrow} v{} [label=\"{}\"{dir}];",
                e.from,
                e.to,
                kind_label(e.kind)
            );
        }
        s.push_str("}\n");
        s
    }
}
