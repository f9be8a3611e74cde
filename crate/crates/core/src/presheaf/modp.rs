use std::sync::Arc;

use super::{nat, validate_presheaf, Presheaf, PresheafMorphism};
use crate::category::{ArrowId, FinCategory, ObjId};
use crate::error::{Error, Result};
use crate::modules::{FinModule, FinRing, ModuleHom};

/// Largest module handled element-wise.
pub(crate) const MAX_ELEMENTS: usize = 1 << 16;

fn table(h: &ModuleHom) -> Vec<usize> {
    let (dom, cod) = (h.domain(), h.codomain());
    (0..dom.card())
        .map(|x| cod.encode(&h.apply(&dom.decode(x))))
        .collect()
}

fn check_size(m: &FinModule) -> Result<()> {
    if m.size() > MAX_ELEMENTS as u128 {
        return Err(Error::TooLarge(format!("module of size {}", m.size())));
    }
    Ok(())
}

/// A presheaf of modules over a finite ring.
#[derive(Clone, Debug, PartialEq)]
pub struct ModPresheaf {
    base: Arc<FinCategory>,
    ring: FinRing,
    values: Vec<FinModule>,
    restrictions: Vec<ModuleHom>,
    tables: Vec<Vec<usize>>,
}

impl ModPresheaf {
    /// Checks shapes and rings only.
    pub fn from_parts(
        base: Arc<FinCategory>,
        ring: &FinRing,
        values: Vec<FinModule>,
        restrictions: Vec<ModuleHom>,
    ) -> Result<Self> {
        if values.len() != base.num_objects() || restrictions.len() != base.num_arrows() {
            return Err(Error::InvalidPresheaf(format!(
                "{} values and {} restrictions for {} objects and {} arrows",
                values.len(),
                restrictions.len(),
                base.num_objects(),
                base.num_arrows()
            )));
        }
        for m in &values {
            if m.ring() != ring {
                return Err(Error::RingMismatch);
            }
            check_size(m)?;
        }
        for f in base.arrow_ids() {
            let h = &restrictions[f.0];
            if h.domain() != &values[base.target(f).0] || h.codomain() != &values[base.source(f).0]
            {
                return Err(Error::InvalidPresheaf(format!(
                    "restriction along {} has the wrong domain or codomain",
                    base.arrow_name(f)
                )));
            }
        }
        let tables = restrictions.iter().map(table).collect();
        Ok(ModPresheaf {
            base,
            ring: ring.clone(),
            values,
            restrictions,
            tables,
        })
    }

    pub fn new(
        base: Arc<FinCategory>,
        ring: &FinRing,
        values: Vec<FinModule>,
        restrictions: Vec<ModuleHom>,
    ) -> Result<Self> {
        let p = Self::from_parts(base, ring, values, restrictions)?;
        match validate_presheaf(&p).first() {
            None => Ok(p),
            Some(v) => Err(Error::InvalidPresheaf(v.to_string())),
        }
    }

    pub fn zero(base: Arc<FinCategory>, ring: &FinRing) -> Self {
        let z = FinModule::zero(ring);
        let values = vec![z.clone(); base.num_objects()];
        let restrictions = vec![ModuleHom::identity(&z); base.num_arrows()];
        Self::from_parts(base, ring, values, restrictions).expect("zero presheaf")
    }

    /// Constant presheaf at `m`, all restrictions the identity.
    pub fn constant(base: Arc<FinCategory>, m: &FinModule) -> Result<Self> {
        let values = vec![m.clone(); base.num_objects()];
        let restrictions = vec![ModuleHom::identity(m); base.num_arrows()];
        Self::from_parts(base, m.ring(), values, restrictions)
    }

    pub fn ring(&self) -> &FinRing {
        &self.ring
    }

    pub fn value(&self, c: ObjId) -> &FinModule {
        &self.values[c.0]
    }

    pub fn restriction(&self, f: ArrowId) -> &ModuleHom {
        &self.restrictions[f.0]
    }
}

impl Presheaf for ModPresheaf {
    type Morphism = ModMorphism;

    fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    fn card(&self, c: ObjId) -> usize {
        self.values[c.0].card()
    }

    fn restrict(&self, f: ArrowId, x: usize) -> usize {
        self.tables[f.0][x]
    }

    fn label(&self, c: ObjId, x: usize) -> String {
        let m = &self.values[c.0];
        m.label(&m.decode(x))
    }

    fn nat_transformations(&self, other: &Self) -> Vec<ModMorphism> {
        nat::mod_nat_transformations(self, other)
    }

    fn identity_morphism(&self) -> ModMorphism {
        ModMorphism::new(self.values.iter().map(ModuleHom::identity).collect())
    }
}

/// Components as module maps, with element tables cached for
/// [`PresheafMorphism::apply`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModMorphism {
    components: Vec<ModuleHom>,
    tables: Vec<Vec<usize>>,
}

impl ModMorphism {
    pub fn new(components: Vec<ModuleHom>) -> Self {
        let tables = components.iter().map(table).collect();
        ModMorphism { components, tables }
    }

    pub fn components(&self) -> &[ModuleHom] {
        &self.components
    }

    pub fn component(&self, c: ObjId) -> &ModuleHom {
        &self.components[c.0]
    }

    /// Objectwise `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        let comps = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<_>>()?;
        Ok(ModMorphism::new(comps))
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(ModuleHom::is_zero)
    }
}

impl PresheafMorphism for ModMorphism {
    fn apply(&self, c: ObjId, x: usize) -> usize {
        self.tables[c.0][x]
    }

    fn then(&self, next: &Self) -> Self {
        ModMorphism::new(
            self.components
                .iter()
                .zip(&next.components)
                .map(|(a, b)| b.compose(a).expect("composable components"))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::fixtures::c2;

    #[test]
    fn zero_and_constant_are_valid() {
        let r = FinRing::cyclic(2).unwrap();
        let base = Arc::new(c2());
        assert!(validate_presheaf(&ModPresheaf::zero(base.clone(), &r)).is_empty());
        let m = FinModule::new(&r, &[2]).unwrap();
        let k = ModPresheaf::constant(base.clone(), &m).unwrap();
        assert!(validate_presheaf(&k).is_empty());
        let v = base.object_by_name("V").unwrap();
        assert_eq!(k.card(v), 2);
        assert_eq!(k.label(v, 1), "(1)");
    }

    #[test]
    fn broken_composite_is_reported() {
        let r = FinRing::cyclic(2).unwrap();
        let base = Arc::new(c2());
        let m = FinModule::new(&r, &[2]).unwrap();
        let mut restrictions = vec![ModuleHom::identity(&m); base.num_arrows()];
        let id_u = base.arrow_by_name("id_U").unwrap();
        restrictions[id_u.0] = ModuleHom::zero(&m, &m);
        let bad =
            ModPresheaf::from_parts(base.clone(), &r, vec![m.clone(), m.clone()], restrictions)
                .unwrap();
        assert!(!validate_presheaf(&bad).is_empty());
    }
}
