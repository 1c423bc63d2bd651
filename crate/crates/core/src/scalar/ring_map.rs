use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;

use super::{Monomial, Param, Scalar, ScalarError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingMapKind {
    Endomorphism,
    /// A φ-twisted derivation: ∂(fg) = ∂(f)g + φ(f)∂(g).
    TwistedDerivation {
        twist: Arc<RingMapSpec>,
    },
}

/// A ring endomorphism or twisted derivation given by generator images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingMapSpec {
    pub kind: RingMapKind,
    pub images: BTreeMap<Param, Scalar>,
}

impl RingMapSpec {
    pub fn endomorphism(images: BTreeMap<Param, Scalar>) -> Self {
        RingMapSpec {
            kind: RingMapKind::Endomorphism,
            images,
        }
    }

    pub fn derivation(twist: RingMapSpec, images: BTreeMap<Param, Scalar>) -> Self {
        RingMapSpec {
            kind: RingMapKind::TwistedDerivation {
                twist: Arc::new(twist),
            },
            images,
        }
    }

    pub fn identity() -> Self {
        RingMapSpec::endomorphism(BTreeMap::new())
    }

    pub fn twist(&self) -> Option<&RingMapSpec> {
        match &self.kind {
            RingMapKind::Endomorphism => None,
            RingMapKind::TwistedDerivation { twist } => Some(twist),
        }
    }

    /// Applies the map. Untagged params are ground constants (fixed by
    /// endomorphisms, killed by derivations); a tagged param with no image
    /// is a configuration error.
    pub fn apply(&self, f: &Scalar) -> Result<Scalar, ScalarError> {
        self.apply_with(f, &|p: &Param| !p.is_generator())
    }

    /// Like [`apply`](Self::apply), but params accepted by `is_constant`
    /// are treated as constants even when tagged.
    pub fn apply_with(
        &self,
        f: &Scalar,
        is_constant: &dyn Fn(&Param) -> bool,
    ) -> Result<Scalar, ScalarError> {
        let mut out = Scalar::zero();
        for (m, c) in f.terms() {
            let img = self.apply_monomial(m, is_constant)?;
            out += &img.scale(c);
        }
        Ok(out)
    }

    fn image(
        &self,
        p: &Param,
        is_constant: &dyn Fn(&Param) -> bool,
    ) -> Result<Scalar, ScalarError> {
        if let Some(img) = self.images.get(p) {
            return Ok(img.clone());
        }
        if !is_constant(p) {
            return Err(ScalarError::UnmappedGenerator(p.clone()));
        }
        Ok(match self.kind {
            RingMapKind::Endomorphism => Scalar::param(p.clone()),
            RingMapKind::TwistedDerivation { .. } => Scalar::zero(),
        })
    }

    fn apply_monomial(
        &self,
        m: &Monomial,
        is_constant: &dyn Fn(&Param) -> bool,
    ) -> Result<Scalar, ScalarError> {
        match &self.kind {
            RingMapKind::Endomorphism => {
                let mut acc = Scalar::one();
                for (p, e) in m.factors() {
                    acc = &acc * &self.image(p, is_constant)?.pow(*e);
                }
                Ok(acc)
            }
            RingMapKind::TwistedDerivation { twist } => {
                // ∂(g₁⋯g_k) = Σ_m φ(g₁⋯g_{m−1}) ∂(g_m) g_{m+1}⋯g_k over the
                // factors expanded with multiplicity, in canonical order.
                let flat: Vec<&Param> = m
                    .factors()
                    .iter()
                    .flat_map(|(p, e)| std::iter::repeat_n(p, *e as usize))
                    .collect();
                let mut out = Scalar::zero();
                let mut prefix = Scalar::one();
                for (k, p) in flat.iter().enumerate() {
                    let d = self.image(p, is_constant)?;
                    if !d.is_zero() {
                        let suffix =
                            Monomial::from_factors(flat[k + 1..].iter().map(|q| ((*q).clone(), 1)));
                        out += &(&prefix * &d).mul_monomial(&suffix, &BigRational::one());
                    }
                    prefix = &prefix * &twist.image(p, is_constant)?;
                }
                Ok(out)
            }
        }
    }
}
