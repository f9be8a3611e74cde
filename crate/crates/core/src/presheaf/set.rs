use std::collections::HashMap;
use std::sync::Arc;

use super::{nat, validate_presheaf, Presheaf, PresheafMorphism};
use crate::category::{ArrowId, FinCategory, ObjId};
use crate::error::{Error, Result};

/// A presheaf of finite sets. `restrictions[f][x]` is the index in
/// `values[source f]` of `x . f`, for `x` indexing `values[target f]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SetPresheaf {
    base: Arc<FinCategory>,
    values: Vec<Vec<String>>,
    restrictions: Vec<Vec<usize>>,
}

impl SetPresheaf {
    /// Checks shapes only; functoriality is left to [`validate_presheaf`].
    pub fn from_parts(
        base: Arc<FinCategory>,
        values: Vec<Vec<String>>,
        restrictions: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if values.len() != base.num_objects() {
            return Err(Error::InvalidPresheaf(format!(
                "{} values for {} objects",
                values.len(),
                base.num_objects()
            )));
        }
        if restrictions.len() != base.num_arrows() {
            return Err(Error::InvalidPresheaf(format!(
                "{} restrictions for {} arrows",
                restrictions.len(),
                base.num_arrows()
            )));
        }
        for f in base.arrow_ids() {
            let map = &restrictions[f.0];
            let (src, tgt) = (base.source(f), base.target(f));
            if map.len() != values[tgt.0].len() || map.iter().any(|&y| y >= values[src.0].len()) {
                return Err(Error::InvalidPresheaf(format!(
                    "restriction along {} is not a map {} -> {}",
                    base.arrow_name(f),
                    base.object_name(tgt),
                    base.object_name(src)
                )));
            }
        }
        Ok(SetPresheaf {
            base,
            values,
            restrictions,
        })
    }

    pub fn new(
        base: Arc<FinCategory>,
        values: Vec<Vec<String>>,
        restrictions: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let p = Self::from_parts(base, values, restrictions)?;
        let violations = validate_presheaf(&p);
        match violations.first() {
            None => Ok(p),
            Some(v) => Err(Error::InvalidPresheaf(v.to_string())),
        }
    }

    /// Constant presheaf with every restriction the identity.
    pub fn constant(base: Arc<FinCategory>, elements: &[&str]) -> Self {
        let values = vec![elements.iter().map(|s| s.to_string()).collect(); base.num_objects()];
        let restrictions = vec![(0..elements.len()).collect(); base.num_arrows()];
        SetPresheaf {
            base,
            values,
            restrictions,
        }
    }

    pub fn terminal(base: Arc<FinCategory>) -> Self {
        Self::constant(base, &["*"])
    }

    pub fn empty(base: Arc<FinCategory>) -> Self {
        Self::constant(base, &[])
    }

    pub fn values(&self, c: ObjId) -> &[String] {
        &self.values[c.0]
    }

    pub fn restriction(&self, f: ArrowId) -> &[usize] {
        &self.restrictions[f.0]
    }

    pub fn element_by_name(&self, c: ObjId, name: &str) -> Option<usize> {
        self.values[c.0].iter().position(|v| v == name)
    }
}

impl Presheaf for SetPresheaf {
    type Morphism = SetMorphism;

    fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    fn card(&self, c: ObjId) -> usize {
        self.values[c.0].len()
    }

    fn restrict(&self, f: ArrowId, x: usize) -> usize {
        self.restrictions[f.0][x]
    }

    fn label(&self, c: ObjId, x: usize) -> String {
        self.values[c.0][x].clone()
    }

    fn nat_transformations(&self, other: &Self) -> Vec<SetMorphism> {
        nat::set_nat_transformations(self, other)
    }

    fn isomorphism(&self, other: &Self) -> Option<SetMorphism> {
        nat::set_isomorphism(self, other)
    }

    fn identity_morphism(&self) -> SetMorphism {
        SetMorphism {
            components: self
                .base
                .objects()
                .map(|c| (0..self.card(c)).collect())
                .collect(),
        }
    }
}

/// Components as index maps, one per object.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SetMorphism {
    pub components: Vec<Vec<usize>>,
}

impl PresheafMorphism for SetMorphism {
    fn apply(&self, c: ObjId, x: usize) -> usize {
        self.components[c.0][x]
    }

    fn then(&self, next: &Self) -> Self {
        SetMorphism {
            components: self
                .components
                .iter()
                .zip(&next.components)
                .map(|(a, b)| a.iter().map(|&x| b[x]).collect())
                .collect(),
        }
    }
}

/// Builds a [`SetPresheaf`] by object, arrow and element names.
///
/// Identity restrictions are filled in; a missing restriction along a
/// composite `g o f` is derived as `F(f) o F(g)` when both are known.
#[derive(Clone, Debug)]
pub struct SetPresheafBuilder {
    base: Arc<FinCategory>,
    values: Vec<Option<Vec<String>>>,
    maps: HashMap<ArrowId, Vec<(String, String)>>,
}

impl SetPresheafBuilder {
    pub fn new(base: Arc<FinCategory>) -> Self {
        let n = base.num_objects();
        SetPresheafBuilder {
            base,
            values: vec![None; n],
            maps: HashMap::new(),
        }
    }

    pub fn value<I, S>(mut self, object: &str, elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let c = self
            .base
            .object_by_name(object)
            .ok_or_else(|| Error::UnknownObject(object.to_string()))?;
        let elems: Vec<String> = elements.into_iter().map(Into::into).collect();
        for (k, e) in elems.iter().enumerate() {
            if elems[..k].contains(e) {
                return Err(Error::Duplicate(e.clone()));
            }
        }
        if self.values[c.0].replace(elems).is_some() {
            return Err(Error::Duplicate(format!("value at {object}")));
        }
        Ok(self)
    }

    /// Restriction along `arrow`, as pairs `(x, x . arrow)`.
    pub fn restriction<I, S, T>(mut self, arrow: &str, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        let f = self
            .base
            .arrow_by_name(arrow)
            .ok_or_else(|| Error::UnknownArrow(arrow.to_string()))?;
        let pairs = pairs
            .into_iter()
            .map(|(a, b)| (a.into(), b.into()))
            .collect();
        if self.maps.insert(f, pairs).is_some() {
            return Err(Error::Duplicate(format!("restriction along {arrow}")));
        }
        Ok(self)
    }

    /// Builds and checks functoriality.
    pub fn build(&self) -> Result<SetPresheaf> {
        let p = self.build_unchecked()?;
        SetPresheaf::new(p.base.clone(), p.values, p.restrictions)
    }

    pub fn build_unchecked(&self) -> Result<SetPresheaf> {
        let base = &self.base;
        let values: Vec<Vec<String>> = base
            .objects()
            .map(|c| {
                self.values[c.0].clone().ok_or_else(|| {
                    Error::InvalidPresheaf(format!("no value at {}", base.object_name(c)))
                })
            })
            .collect::<Result<_>>()?;
        let find = |c: ObjId, name: &str| {
            values[c.0].iter().position(|v| v == name).ok_or_else(|| {
                Error::InvalidPresheaf(format!(
                    "{name} is not an element of F({})",
                    base.object_name(c)
                ))
            })
        };
        let mut maps: Vec<Option<Vec<usize>>> = vec![None; base.num_arrows()];
        for f in base.arrow_ids() {
            let (src, tgt) = (base.source(f), base.target(f));
            if let Some(pairs) = self.maps.get(&f) {
                let mut map = vec![usize::MAX; values[tgt.0].len()];
                for (a, b) in pairs {
                    let x = find(tgt, a)?;
                    let y = find(src, b)?;
                    if map[x] != usize::MAX && map[x] != y {
                        return Err(Error::InvalidPresheaf(format!(
                            "restriction along {} sends {a} twice",
                            base.arrow_name(f)
                        )));
                    }
                    map[x] = y;
                }
                if let Some(x) = map.iter().position(|&y| y == usize::MAX) {
                    return Err(Error::InvalidPresheaf(format!(
                        "restriction along {} misses {}",
                        base.arrow_name(f),
                        values[tgt.0][x]
                    )));
                }
                maps[f.0] = Some(map);
            } else if base.is_identity(f) {
                maps[f.0] = Some((0..values[tgt.0].len()).collect());
            }
        }
        let mut changed = true;
        while changed {
            changed = false;
            for (g, f) in base.composable_pairs() {
                let gf = base.comp(g, f);
                if maps[gf.0].is_some() {
                    continue;
                }
                if let (Some(mg), Some(mf)) = (&maps[g.0], &maps[f.0]) {
                    maps[gf.0] = Some(mg.iter().map(|&x| mf[x]).collect());
                    changed = true;
                }
            }
        }
        let restrictions = maps
            .into_iter()
            .enumerate()
            .map(|(i, m)| {
                m.ok_or_else(|| {
                    Error::InvalidPresheaf(format!(
                        "no restriction along {}",
                        base.arrow_name(ArrowId(i))
                    ))
                })
            })
            .collect::<Result<_>>()?;
        SetPresheaf::from_parts(base.clone(), values, restrictions)
    }
}
