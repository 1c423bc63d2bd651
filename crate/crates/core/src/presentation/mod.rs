//! Presentation files: a TOML schema for word-rewrite systems and Hecke-type
//! strand categories, plus the built-in presets.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hecke::{BraidRelation, HeckeError, HeckePresentation};
use crate::scalar::{embed, parse_scalar, Color, Param, RingMapSpec, Scalar, ScalarError};
use crate::word::{Alphabet, OrderSpec, RewriteSystem, WordError};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PresentationError {
    #[error("invalid presentation file: {0}")]
    Toml(String),
    #[error("{field}: {message}")]
    Schema { field: String, message: String },
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Hecke(#[from] HeckeError),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
}

fn schema(field: impl Into<String>, message: impl Into<String>) -> PresentationError {
    PresentationError::Schema {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    WordRewrite,
    Hecke,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderFile {
    /// `deglex`, `weighted` or `length`.
    pub kind: String,
    /// Letters from smallest to largest.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub precedence: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub weights: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadraticFile {
    pub color: String,
    pub alpha: String,
    pub beta: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquareFile {
    /// Bottom colors `(j, i)` of `σ_ij σ_ji`.
    pub bottom: [String; 2],
    pub q: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BraidFile {
    pub bottom: [String; 3],
    pub lambda: String,
    /// Lower words `st`, `ts`, `s`, `t`, `id` with coefficients on strands
    /// of the top colors.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub lower: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationsFile {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub quadratic: Vec<QuadraticFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub square: Vec<SquareFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub braid: Vec<BraidFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiFile {
    pub bottom: [String; 2],
    pub images: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialFile {
    pub color: String,
    pub images: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapsFile {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub phi: Vec<PhiFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub partial: Vec<PartialFile>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_len: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
}

fn is_default<T: Default + PartialEq>(t: &T) -> bool {
    *t == T::default()
}

/// The file as written. Sections of the other kind must be absent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationFile {
    pub version: u32,
    pub name: String,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// Symbolic coefficients; every other identifier must be a letter or
    /// dot generator.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parameters: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alphabet: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<OrderFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub colors: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub permissible: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub dot_rings: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub options: OptionsFile,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rules: Vec<RuleFile>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub relations: RelationsFile,
    #[serde(default, skip_serializing_if = "is_default")]
    pub maps: MapsFile,
}

#[derive(Clone, Debug)]
pub enum System {
    WordRewrite(RewriteSystem),
    Hecke(HeckePresentation),
}

#[derive(Clone, Debug)]
pub struct Presentation {
    pub file: PresentationFile,
    pub system: System,
}

impl Presentation {
    pub fn name(&self) -> &str {
        &self.file.name
    }

    pub fn options(&self) -> &OptionsFile {
        &self.file.options
    }
}

impl PresentationFile {
    pub fn parse(src: &str) -> Result<Self, PresentationError> {
        toml::from_str(src).map_err(|e| PresentationError::Toml(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String, PresentationError> {
        toml::to_string(self).map_err(|e| PresentationError::Toml(e.to_string()))
    }

    pub fn build(&self) -> Result<Presentation, PresentationError> {
        if self.version != FORMAT_VERSION {
            return Err(schema(
                "version",
                format!(
                    "unsupported version {}, expected {FORMAT_VERSION}",
                    self.version
                ),
            ));
        }
        let system = match self.kind {
            Kind::WordRewrite => {
                let stray = [
                    ("colors", !self.colors.is_empty()),
                    ("permissible", !self.permissible.is_empty()),
                    ("dot_rings", !self.dot_rings.is_empty()),
                    ("relations", !is_default(&self.relations)),
                    ("maps", !is_default(&self.maps)),
                ];
                if let Some((f, _)) = stray.iter().find(|(_, b)| *b) {
                    return Err(schema(*f, "not allowed in a word-rewrite presentation"));
                }
                System::WordRewrite(self.build_word()?)
            }
            Kind::Hecke => {
                let stray = [
                    ("alphabet", !self.alphabet.is_empty()),
                    ("order", self.order.is_some()),
                    ("rules", !self.rules.is_empty()),
                ];
                if let Some((f, _)) = stray.iter().find(|(_, b)| *b) {
                    return Err(schema(*f, "not allowed in a hecke presentation"));
                }
                System::Hecke(self.build_hecke()?)
            }
        };
        Ok(Presentation {
            file: self.clone(),
            system,
        })
    }

    fn check_declared(
        &self,
        field: &str,
        params: impl IntoIterator<Item = Param>,
    ) -> Result<(), PresentationError> {
        for p in params {
            if !p.is_generator() && !self.parameters.iter().any(|q| q == p.name()) {
                return Err(schema(field, format!("undeclared parameter {p}")));
            }
        }
        Ok(())
    }

    fn build_word(&self) -> Result<RewriteSystem, PresentationError> {
        if self.alphabet.is_empty() {
            return Err(schema("alphabet", "missing"));
        }
        let alphabet = Alphabet::new(&self.alphabet)?;
        let letter = |field: &str, s: &str| {
            alphabet
                .index(s)
                .ok_or_else(|| schema(field, format!("unknown letter {s:?}")))
        };
        let order = match &self.order {
            None => return Err(schema("order", "missing")),
            Some(o) => {
                let precedence = |o: &OrderFile| -> Result<Vec<u16>, PresentationError> {
                    let p = o
                        .precedence
                        .iter()
                        .map(|s| letter("order.precedence", s))
                        .collect::<Result<Vec<_>, _>>()?;
                    let distinct: BTreeSet<_> = p.iter().collect();
                    if p.len() != alphabet.len() || distinct.len() != p.len() {
                        return Err(schema("order.precedence", "must list every letter once"));
                    }
                    Ok(p)
                };
                match o.kind.as_str() {
                    "deglex" => OrderSpec::deglex(&precedence(o)?),
                    "weighted" => {
                        let mut w = vec![0; alphabet.len()];
                        for (k, v) in &o.weights {
                            w[letter("order.weights", k)? as usize] = *v;
                        }
                        OrderSpec::weighted(&precedence(o)?, w)
                    }
                    "length" => OrderSpec::LengthThenIncomparable,
                    other => return Err(schema("order.kind", format!("unknown order {other:?}"))),
                }
            }
        };
        let mut sys = RewriteSystem::new(alphabet, order, Vec::new());
        for (k, r) in self.rules.iter().enumerate() {
            let label = r.label.clone().unwrap_or_else(|| r.lhs.clone());
            sys.push_rule(&label, &r.lhs, &r.rhs)?;
            let field = format!("rules[{k}]");
            let rhs = &sys.rules.last().unwrap().rhs;
            self.check_declared(&field, rhs.terms().flat_map(|(_, c)| c.params()))?;
        }
        Ok(sys)
    }

    fn build_hecke(&self) -> Result<HeckePresentation, PresentationError> {
        let mut p = HeckePresentation {
            name: self.name.clone(),
            ..Default::default()
        };
        for c in &self.colors {
            if c.is_empty() || !c.chars().all(|ch| ch.is_alphanumeric() || ch == '_') {
                return Err(schema("colors", format!("bad color name {c:?}")));
            }
            let c = Color::new(c);
            if p.colors.contains(&c) {
                return Err(schema("colors", format!("duplicate color {c}")));
            }
            p.colors.push(c);
        }
        let color = |field: &str, s: &str| {
            p.color(s)
                .map_err(|_| schema(field, format!("unknown color {s:?}")))
        };
        let mut permissible = BTreeSet::new();
        for [a, b] in &self.permissible {
            permissible.insert((color("permissible", a)?, color("permissible", b)?));
        }
        let mut dot_generators = BTreeMap::new();
        for (c, gens) in &self.dot_rings {
            dot_generators.insert(color("dot_rings", c)?, gens.clone());
        }
        let scalar =
            |field: &str, src: &str, frame: &[Color]| -> Result<Scalar, PresentationError> {
                let f = parse_scalar(src).map_err(|e| schema(field, e.to_string()))?;
                embed(&f, 0, frame).map_err(|e: ScalarError| schema(field, e.to_string()))
            };
        let mut quadratic = BTreeMap::new();
        for q in &self.relations.quadratic {
            let i = color("relations.quadratic", &q.color)?;
            let frame = [i.clone(), i.clone()];
            let field = format!("relations.quadratic.{i}");
            let v = (
                scalar(&field, &q.alpha, &frame)?,
                scalar(&field, &q.beta, &frame)?,
            );
            if quadratic.insert(i, v).is_some() {
                return Err(schema(field, "given twice"));
            }
        }
        let mut square = BTreeMap::new();
        for s in &self.relations.square {
            let key = (
                color("relations.square", &s.bottom[0])?,
                color("relations.square", &s.bottom[1])?,
            );
            let field = format!("relations.square.{},{}", key.0, key.1);
            let q = scalar(&field, &s.q, &[key.0.clone(), key.1.clone()])?;
            if square.insert(key, q).is_some() {
                return Err(schema(field, "given twice"));
            }
        }
        let mut braid = BTreeMap::new();
        for b in &self.relations.braid {
            let key = [
                color("relations.braid", &b.bottom[0])?,
                color("relations.braid", &b.bottom[1])?,
                color("relations.braid", &b.bottom[2])?,
            ];
            let field = format!("relations.braid.{}", b.bottom.join(","));
            let top = [key[2].clone(), key[1].clone(), key[0].clone()];
            let lambda = scalar(&field, &b.lambda, &top)?;
            let mut lower = BTreeMap::new();
            for (w, c) in &b.lower {
                let word: Vec<u8> = match w.as_str() {
                    "id" | "1" => vec![],
                    s if s.chars().all(|ch| ch == 's' || ch == 't') => {
                        s.chars().map(|ch| if ch == 's' { 1 } else { 2 }).collect()
                    }
                    _ => return Err(schema(&field, format!("lower word {w:?} is not in s, t"))),
                };
                let c = scalar(&field, c, &top)?;
                if !c.is_zero() {
                    lower.insert(word, c);
                }
            }
            if braid.insert(key, BraidRelation { lambda, lower }).is_some() {
                return Err(schema(field, "given twice"));
            }
        }
        let images =
            |field: &str, table: &BTreeMap<String, String>, source: &[Color], target: &[Color]| {
                let mut out = BTreeMap::new();
                for (k, v) in table {
                    let key = scalar(field, k, source)?;
                    let param = match key.params().into_iter().collect::<Vec<_>>().as_slice() {
                        [g] if g.is_generator() && key == Scalar::param(g.clone()) => g.clone(),
                        _ => return Err(schema(field, format!("{k:?} is not a dot generator"))),
                    };
                    out.insert(param, scalar(field, v, target)?);
                }
                Ok::<_, PresentationError>(out)
            };
        let mut phi = BTreeMap::new();
        for m in &self.maps.phi {
            let (a, b) = (
                color("maps.phi", &m.bottom[0])?,
                color("maps.phi", &m.bottom[1])?,
            );
            let field = format!("maps.phi.{a},{b}");
            let imgs = images(
                &field,
                &m.images,
                &[a.clone(), b.clone()],
                &[b.clone(), a.clone()],
            )?;
            if phi
                .insert((a, b), RingMapSpec::endomorphism(imgs))
                .is_some()
            {
                return Err(schema(field, "given twice"));
            }
        }
        let mut partial = BTreeMap::new();
        for m in &self.maps.partial {
            let i = color("maps.partial", &m.color)?;
            let field = format!("maps.partial.{i}");
            let frame = [i.clone(), i.clone()];
            let twist = phi
                .get(&(i.clone(), i.clone()))
                .cloned()
                .unwrap_or_else(RingMapSpec::identity);
            let imgs = images(&field, &m.images, &frame, &frame)?;
            if partial
                .insert(i, RingMapSpec::derivation(twist, imgs))
                .is_some()
            {
                return Err(schema(field, "given twice"));
            }
        }
        p.permissible = permissible;
        p.dot_generators = dot_generators;
        p.quadratic = quadratic;
        p.square = square;
        p.braid = braid;
        p.phi = phi;
        p.partial = partial;
        self.check_declared("relations", p.structure_params())?;
        p.validate()?;
        Ok(p)
    }
}

/// Parses and builds a presentation file.
pub fn parse_presentation(src: &str) -> Result<Presentation, PresentationError> {
    PresentationFile::parse(src)?.build()
}

pub const PRESETS: &[(&str, &str)] = &[
    ("xyz", include_str!("../../../../presets/xyz.toml")),
    (
        "coxeter-s3",
        include_str!("../../../../presets/coxeter-s3.toml"),
    ),
    (
        "coxeter-s4-naive",
        include_str!("../../../../presets/coxeter-s4-naive.toml"),
    ),
    ("s3-bad", include_str!("../../../../presets/s3-bad.toml")),
    ("coxeter", include_str!("../../../../presets/coxeter.toml")),
    (
        "modified-symmetric",
        include_str!("../../../../presets/modified-symmetric.toml"),
    ),
    (
        "nilhecke",
        include_str!("../../../../presets/nilhecke.toml"),
    ),
    (
        "webster-sl2-skeleton",
        include_str!("../../../../presets/webster-sl2-skeleton.toml"),
    ),
];

pub fn preset_source(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn preset(name: &str) -> Result<Presentation, PresentationError> {
    parse_presentation(
        preset_source(name).ok_or_else(|| PresentationError::UnknownPreset(name.into()))?,
    )
}
