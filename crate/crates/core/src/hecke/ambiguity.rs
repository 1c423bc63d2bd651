use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use super::reduce::{Engine, HeckeStep, HeckeTerm, Redex, RedexKind};
use super::{render_letters, show_colors, HeckeError, HeckePresentation, Letter};
use crate::scalar::{Color, Monomial, Param, Scalar};

/// Diagram shapes of the minimal ambiguities, crossings written as strand
/// positions and dots placed at the bottom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Template {
    #[serde(rename = "σσσ")]
    Sss,
    #[serde(rename = "ssts")]
    Ssts,
    #[serde(rename = "stss")]
    Stss,
    #[serde(rename = "ststs")]
    Ststs,
    #[serde(rename = "stsuts")]
    Stsuts,
    #[serde(rename = "ss·f")]
    SsF,
    #[serde(rename = "sts·f")]
    StsF,
    #[serde(rename = "s·f·g")]
    SFG,
}

impl Template {
    pub const ALL: [Template; 8] = [
        Template::Sss,
        Template::Ssts,
        Template::Stss,
        Template::Ststs,
        Template::Stsuts,
        Template::SsF,
        Template::StsF,
        Template::SFG,
    ];

    pub fn strands(self) -> usize {
        match self {
            Template::Sss | Template::SsF | Template::SFG => 2,
            Template::Stsuts => 4,
            _ => 3,
        }
    }

    pub fn crossings(self) -> &'static [u8] {
        match self {
            Template::Sss => &[1, 1, 1],
            Template::Ssts => &[1, 1, 2, 1],
            Template::Stss => &[1, 2, 1, 1],
            Template::Ststs => &[1, 2, 1, 2, 1],
            Template::Stsuts => &[1, 2, 1, 3, 2, 1],
            Template::SsF => &[1, 1],
            Template::StsF => &[1, 2, 1],
            Template::SFG => &[1],
        }
    }

    pub fn dots(self) -> usize {
        match self {
            Template::SsF | Template::StsF => 1,
            Template::SFG => 2,
            _ => 0,
        }
    }

    /// The two overlapping rule applications.
    pub fn redexes(self) -> (Redex, Redex) {
        use RedexKind::*;
        let r = Redex::new;
        match self {
            Template::Sss => (r(Quadratic, &[0, 1]), r(Quadratic, &[1, 2])),
            Template::Ssts => (r(Quadratic, &[0, 1]), r(Braid, &[1, 2, 3])),
            Template::Stss => (r(Braid, &[0, 1, 2]), r(Quadratic, &[2, 3])),
            Template::Ststs => (r(Braid, &[0, 1, 2]), r(Braid, &[2, 3, 4])),
            Template::Stsuts => (r(Braid, &[0, 1, 2]), r(Braid, &[2, 4, 5])),
            Template::SsF => (r(Quadratic, &[0, 1]), r(DotCross, &[1, 2])),
            Template::StsF => (r(Braid, &[0, 1, 2]), r(DotCross, &[2, 3])),
            Template::SFG => (r(DotCross, &[0, 1]), r(Merge, &[1, 2])),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Template::Sss => "σσσ",
            Template::Ssts => "ssts",
            Template::Stss => "stss",
            Template::Ststs => "ststs",
            Template::Stsuts => "stsuts",
            Template::SsF => "ss·f",
            Template::StsF => "sts·f",
            Template::SFG => "s·f·g",
        }
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How dot arguments of the dotted templates are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DotMode {
    /// Every generator of the dot ring at the bottom.
    Generators,
    /// One generic linear element `_f0 + Σ _f_x1 x[1] + …` per dot.
    Symbolic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AmbiguityInstance {
    pub template: Template,
    pub bottom: Vec<Color>,
    pub letters: Vec<Letter>,
    pub first: Redex,
    pub second: Redex,
}

#[derive(Clone, Debug)]
pub struct Instantiation {
    pub instances: Vec<AmbiguityInstance>,
    /// Colorings whose crossings are not all permitted, per template.
    pub skipped: BTreeMap<Template, usize>,
}

fn colorings(colors: &[Color], n: usize) -> Vec<Vec<Color>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                colors.iter().map(move |c| {
                    let mut w = v.clone();
                    w.push(c.clone());
                    w
                })
            })
            .collect();
    }
    out
}

fn symbolic_dot(prefix: &str, gens: &[Param]) -> Scalar {
    let mut f = Scalar::var(&format!("{prefix}0"));
    for g in gens {
        let t = g.tag().expect("generators are tagged");
        let coef = Scalar::var(&format!("{prefix}_{}{}", g.name(), t.position));
        f += &(&coef * &Scalar::param(g.clone()));
    }
    f
}

/// All colorings of every template whose crossings are permitted, with dot
/// arguments chosen per `mode`. Dotted templates are skipped on colors
/// without dot generators, where they hold trivially.
pub fn instantiate_ambiguities(p: &HeckePresentation, mode: DotMode) -> Instantiation {
    let mut instances = Vec::new();
    let mut skipped = BTreeMap::new();
    for t in Template::ALL {
        let (first, second) = t.redexes();
        for bottom in colorings(&p.colors, t.strands()) {
            let base: Vec<Letter> = t.crossings().iter().map(|&c| Letter::Cross(c)).collect();
            if p.gap_colors(&bottom, &base).is_err() {
                *skipped.entry(t).or_insert(0) += 1;
                continue;
            }
            let gens = p.generators_of(&bottom);
            let dot_sets: Vec<Vec<Scalar>> = match (t.dots(), mode) {
                (0, _) => vec![vec![]],
                (_, _) if gens.is_empty() => vec![],
                (k, DotMode::Symbolic) => vec![["_f", "_g"][..k]
                    .iter()
                    .map(|pre| symbolic_dot(pre, &gens))
                    .collect()],
                (1, DotMode::Generators) => gens
                    .iter()
                    .map(|g| vec![Scalar::param(g.clone())])
                    .collect(),
                (_, DotMode::Generators) => gens
                    .iter()
                    .flat_map(|f| {
                        gens.iter()
                            .map(move |g| vec![Scalar::param(f.clone()), Scalar::param(g.clone())])
                    })
                    .collect(),
            };
            for dots in dot_sets {
                let mut letters = base.clone();
                letters.extend(dots.into_iter().map(Letter::Dot));
                instances.push(AmbiguityInstance {
                    template: t,
                    bottom: bottom.clone(),
                    letters,
                    first: first.clone(),
                    second: second.clone(),
                });
            }
        }
    }
    Instantiation { instances, skipped }
}

#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    pub budget: usize,
    pub trace: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            budget: super::DEFAULT_BUDGET,
            trace: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct InstanceReport {
    pub instance: AmbiguityInstance,
    pub first: HeckeTerm,
    pub second: HeckeTerm,
    /// `first − second`; zero iff resolvable.
    pub residual: HeckeTerm,
    pub resolvable: bool,
    pub first_trace: Vec<HeckeStep>,
    pub second_trace: Vec<HeckeStep>,
}

impl InstanceReport {
    pub fn to_json(&self, trace: bool) -> serde_json::Value {
        let i = &self.instance;
        let mut v = serde_json::json!({
            "template": i.template.name(),
            "coloring": show_colors(&i.bottom),
            "word": render_letters(&i.letters),
            "resolvable": self.resolvable,
            "first": self.first.render(),
            "second": self.second.render(),
            "residual": self.residual.render(),
        });
        if trace {
            v["first_trace"] = serde_json::to_value(&self.first_trace).unwrap_or_default();
            v["second_trace"] = serde_json::to_value(&self.second_trace).unwrap_or_default();
        }
        v
    }
}

/// Applies each of the two overlapping rules once, reduces both results
/// to normal form and compares.
pub fn check_instance(
    p: &HeckePresentation,
    a: &AmbiguityInstance,
    opts: CheckOptions,
) -> Result<InstanceReport, HeckeError> {
    let letters = p.resolve(&a.bottom, a.letters.clone())?;
    let chain = |r: &Redex| -> Result<_, HeckeError> {
        let mut e = Engine::new(p, &a.bottom, opts.budget, opts.trace);
        let one = e.apply_redex(&letters, r)?;
        e.reduce(one, false)
    };
    let r1 = chain(&a.first)?;
    let r2 = chain(&a.second)?;
    let residual = r1.result.sub(&r2.result);
    Ok(InstanceReport {
        instance: a.clone(),
        resolvable: residual.is_zero(),
        residual,
        first: r1.result,
        second: r2.result,
        first_trace: r1.trace,
        second_trace: r2.trace,
    })
}

#[derive(Clone, Debug)]
pub struct HeckeCheckReport {
    pub bergman: bool,
    pub reports: Vec<InstanceReport>,
    pub skipped: BTreeMap<Template, usize>,
}

impl HeckeCheckReport {
    pub fn unresolvable(&self) -> impl Iterator<Item = &InstanceReport> {
        self.reports.iter().filter(|r| !r.resolvable)
    }

    pub fn to_json(&self, trace: bool) -> serde_json::Value {
        serde_json::json!({
            "kind": "hecke",
            "bergman_type": self.bergman,
            "instances_checked": self.reports.len(),
            "skipped": self.skipped.iter().map(|(t, n)| (t.name().to_string(), *n)).collect::<BTreeMap<_, _>>(),
            "instances": self.reports.iter().map(|r| r.to_json(trace)).collect::<Vec<_>>(),
        })
    }
}

/// Validates the presentation, then checks every instance in parallel.
/// Reports keep instance order.
pub fn check_all(
    p: &HeckePresentation,
    mode: DotMode,
    opts: CheckOptions,
) -> Result<HeckeCheckReport, HeckeError> {
    p.validate()?;
    let inst = instantiate_ambiguities(p, mode);
    let reports = inst
        .instances
        .par_iter()
        .map(|a| check_instance(p, a, opts))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(HeckeCheckReport {
        bergman: reports.iter().all(|r| r.resolvable),
        reports,
        skipped: inst.skipped,
    })
}

/// Polynomials in the structure parameters that must vanish.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ConditionSet {
    /// Integer-normalized, content kept (so `2*b` stays `2*b`).
    pub generators: Vec<Scalar>,
    /// Generators of the same ideal over ℚ in reduced form.
    pub reduced: Vec<Scalar>,
}

impl ConditionSet {
    pub fn from_residuals<'a>(residuals: impl IntoIterator<Item = &'a Scalar>) -> ConditionSet {
        let symbolic = |p: &Param| p.is_generator() || p.name().starts_with('_');
        let mut seen = BTreeSet::new();
        let mut generators = Vec::new();
        for r in residuals {
            for c in r.coefficients_in(symbolic).into_values() {
                let g = c.integer_normalized();
                if !g.is_zero() && seen.insert(g.clone()) {
                    generators.push(g);
                }
            }
        }
        generators.sort_by(|a, b| {
            (a.degree(), a.len(), a.to_string()).cmp(&(b.degree(), b.len(), b.to_string()))
        });
        let reduced = reduce_ideal(&generators);
        ConditionSet {
            generators,
            reduced,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "generators": self.generators.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "reduced": self.reduced.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// Row-reduces the linear generators and substitutes them into the others,
/// repeating while substitution produces new linear generators; then drops
/// generators divisible by a monomial generator.
fn reduce_ideal(gens: &[Scalar]) -> Vec<Scalar> {
    let mut pool: Vec<Scalar> = gens.to_vec();
    loop {
        let (linear, rest): (Vec<Scalar>, Vec<Scalar>) =
            pool.into_iter().partition(|g| g.degree() <= 1);
        let Some(rows) = row_reduce(linear) else {
            return vec![Scalar::one()];
        };
        let bindings: BTreeMap<Param, Scalar> = rows
            .iter()
            .map(|(v, r)| (v.clone(), &Scalar::param(v.clone()) - r))
            .collect();
        let mut nonlinear: Vec<Scalar> = Vec::new();
        for g in rest {
            let h = g.substitute_unchecked(&bindings).monic();
            if !h.is_zero() && !nonlinear.contains(&h) {
                nonlinear.push(h);
            }
        }
        let mut out: Vec<Scalar> = rows.into_iter().map(|(_, r)| r).collect();
        if nonlinear.iter().any(|g| g.degree() <= 1) {
            out.extend(nonlinear);
            pool = out;
            continue;
        }
        let monomials: Vec<Monomial> = nonlinear
            .iter()
            .chain(out.iter())
            .filter(|g| g.len() == 1)
            .map(|g| g.leading().unwrap().0.clone())
            .collect();
        let divides =
            |m: &Monomial, n: &Monomial| m.factors().iter().all(|(p, e)| n.exponent(p) >= *e);
        let kept: Vec<Scalar> = nonlinear
            .iter()
            .filter(|g| {
                !g.terms().all(|(n, _)| {
                    monomials
                        .iter()
                        .any(|m| divides(m, n) && !(g.len() == 1 && m == n))
                })
            })
            .cloned()
            .collect();
        out.extend(kept);
        out.sort_by_key(|a| (a.degree(), a.to_string()));
        return out;
    }
}

/// Gauss–Jordan on linear forms with pivot = leading variable; `None` when
/// a nonzero constant turns up.
fn row_reduce(linear: Vec<Scalar>) -> Option<Vec<(Param, Scalar)>> {
    let mut rows: Vec<(Param, Scalar)> = Vec::new();
    for mut g in linear {
        for (v, r) in &rows {
            g = eliminate(&g, v, r);
        }
        let Some((m, _)) = g.leading() else { continue };
        let (v, _) = m.factors().first().cloned()?;
        let g = g.monic();
        for (_, r) in rows.iter_mut() {
            *r = eliminate(r, &v, &g);
        }
        rows.push((v, g));
    }
    Some(rows)
}

/// Removes `v` from `g` using the monic row `r` with pivot `v`.
fn eliminate(g: &Scalar, v: &Param, r: &Scalar) -> Scalar {
    let c = g
        .terms()
        .find(|(m, _)| m.factors() == [(v.clone(), 1)])
        .map(|(_, c)| c.clone());
    match c {
        Some(c) => g - &r.scale(&c),
        None => g.clone(),
    }
}

/// Checks every instance with symbolic dots and collects the coefficient
/// polynomials of all residuals.
pub fn derive_conditions(
    p: &HeckePresentation,
    opts: CheckOptions,
) -> Result<(ConditionSet, HeckeCheckReport), HeckeError> {
    let report = check_all(p, DotMode::Symbolic, opts)?;
    let residuals: Vec<&Scalar> = report
        .reports
        .iter()
        .flat_map(|r| r.residual.terms.values())
        .collect();
    Ok((ConditionSet::from_residuals(residuals), report))
}
