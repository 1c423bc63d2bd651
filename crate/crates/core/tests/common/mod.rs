#![allow(dead_code)]

use std::collections::BTreeMap;

use diamond_core::hecke::{HeckePresentation, Letter};
use diamond_core::presentation::{preset, PresentationFile, System};
use diamond_core::scalar::{Color, Monomial, Param, Scalar};
use num_traits::Zero;
use rand::Rng;

pub fn hecke_preset(name: &str) -> HeckePresentation {
    match preset(name).unwrap().system {
        System::Hecke(p) => p,
        System::WordRewrite(_) => panic!("{name} is not a Hecke presentation"),
    }
}

pub fn build_hecke(file: &PresentationFile) -> HeckePresentation {
    match file.build().unwrap().system {
        System::Hecke(p) => p,
        System::WordRewrite(_) => unreachable!(),
    }
}

pub fn bind(pairs: &[(&str, i64)]) -> BTreeMap<Param, Scalar> {
    pairs
        .iter()
        .map(|(k, v)| (Param::new(k), Scalar::from_int(*v)))
        .collect()
}

fn divides(small: &Monomial, big: &Monomial) -> bool {
    small.factors().iter().all(|(p, e)| big.exponent(p) >= *e)
}

/// Remainder of `f` modulo an ideal generated by linear forms and monomials:
/// linear generators are solved and substituted one variable at a time, then
/// terms divisible by a remaining monomial generator are dropped.
pub fn remainder(f: &Scalar, gens: &[Scalar]) -> Scalar {
    let mut f = f.clone();
    let mut pool: Vec<Scalar> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
    while let Some(k) = pool.iter().position(|g| g.degree() <= 1) {
        let g = pool.remove(k);
        if g.degree() == 0 {
            return Scalar::zero();
        }
        let (m, c) = g
            .terms()
            .find(|(m, _)| m.degree() == 1)
            .map(|(m, c)| (m.clone(), c.clone()))
            .unwrap();
        let v = m.factors()[0].0.clone();
        let rest = &g - &Scalar::term(c.clone(), m);
        let value = rest.scale(&(-c.recip()));
        let b = BTreeMap::from([(v, value)]);
        f = f.substitute(&b).unwrap();
        pool = pool
            .iter()
            .map(|h| h.substitute(&b).unwrap())
            .filter(|h| !h.is_zero())
            .collect();
    }
    let monomials: Vec<Monomial> = pool
        .iter()
        .map(|g| {
            assert_eq!(g.len(), 1, "generator {g} is neither linear nor a monomial");
            g.terms().next().unwrap().0.clone()
        })
        .collect();
    Scalar::from_terms(
        f.terms()
            .filter(|(m, c)| !c.is_zero() && !monomials.iter().any(|n| divides(n, m)))
            .map(|(m, c)| (m.clone(), c.clone())),
    )
}

pub fn same_ideal(a: &[Scalar], b: &[Scalar]) -> bool {
    a.iter().all(|f| remainder(f, b).is_zero()) && b.iter().all(|f| remainder(f, a).is_zero())
}

/// A random permissible decorated word, top to bottom, over `bottom`.
pub fn random_decorated(
    p: &HeckePresentation,
    rng: &mut impl Rng,
    bottom: &[Color],
    len: usize,
) -> Vec<Letter> {
    let mut cur = bottom.to_vec();
    let mut built = Vec::new();
    for _ in 0..len {
        let crossings: Vec<usize> = (1..cur.len())
            .filter(|&q| p.permits(&cur[q - 1], &cur[q]))
            .collect();
        let dotted: Vec<(usize, &String)> = cur
            .iter()
            .enumerate()
            .flat_map(|(k, c)| {
                p.dot_generators
                    .get(c)
                    .into_iter()
                    .flatten()
                    .map(move |g| (k + 1, g))
            })
            .collect();
        let want_dot = !dotted.is_empty() && (crossings.is_empty() || rng.gen_bool(0.35));
        if want_dot {
            let (q, g) = dotted[rng.gen_range(0..dotted.len())];
            let e = rng.gen_range(1..3);
            let k = rng.gen_range(0..3);
            built.push(Letter::Dot(format!("{g}[{q}]^{e} + {k}").parse().unwrap()));
        } else if !crossings.is_empty() {
            let q = crossings[rng.gen_range(0..crossings.len())];
            cur.swap(q - 1, q);
            built.push(Letter::Cross(q as u8));
        }
    }
    built.reverse();
    built
}
