//! The crossed product `𝕎_{2n} ⋊ Γ` for a finite `Γ ⊂ Sp_{2n}`, with traces
//! supported on the sectors of `Γ` that have no fixed directions.
//!
//! Elements are finite sums `Σ_g a_g δ_g` with the product
//! `(a δ_g)(b δ_h) = (a ⋆ g(b)) δ_{gh}`. On the component of `g` the trace
//! uses `tr_{g⁻¹}`, which is what makes `Σ_g w(g) tr_{g⁻¹}(a_g)` a trace for
//! class functions `w`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::cocycle::trace::MapTrace;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::HbarSeries;
use crate::symplectic::{FiniteSubgroup, SymplecticMap};
use crate::weyl::{PairKind, WeylElement};

/// `Σ_g a_g δ_g` with `g` indexing the elements of a shared group.
#[derive(Clone, Debug)]
pub struct CrossedElement {
    group: Arc<FiniteSubgroup>,
    kinds: Vec<PairKind>,
    components: BTreeMap<usize, WeylElement>,
}

fn same_group(a: &FiniteSubgroup, b: &FiniteSubgroup) -> bool {
    a.order() == b.order() && a.elements().iter().zip(b.elements()).all(|(x, y)| x.matrix() == y.matrix())
}

impl CrossedElement {
    pub fn zero(group: &Arc<FiniteSubgroup>, kinds: &[PairKind]) -> Self {
        CrossedElement { group: group.clone(), kinds: kinds.to_vec(), components: BTreeMap::new() }
    }

    /// `δ_e`, the unit.
    pub fn one(group: &Arc<FiniteSubgroup>, kinds: &[PairKind]) -> Self {
        Self::single(group, 0, WeylElement::one(kinds)).expect("identity is element 0")
    }

    /// `a δ_g` with `g` the group element at position `g`.
    pub fn single(group: &Arc<FiniteSubgroup>, g: usize, a: WeylElement) -> Result<Self> {
        if g >= group.order() {
            return Err(Error::DimensionMismatch(format!("element {g} of a group of order {}", group.order())));
        }
        if a.n() != group.n() {
            return Err(Error::DimensionMismatch(format!("Weyl element on {} pairs for Γ ⊂ Sp_{}", a.n(), 2 * group.n())));
        }
        let mut out = Self::zero(group, a.kinds());
        out.add_component(g, a);
        Ok(out)
    }

    pub fn group(&self) -> &Arc<FiniteSubgroup> {
        &self.group
    }

    pub fn kinds(&self) -> &[PairKind] {
        &self.kinds
    }

    /// The nonzero components `(g, a_g)`.
    pub fn components(&self) -> impl Iterator<Item = (usize, &WeylElement)> {
        self.components.iter().map(|(&g, a)| (g, a))
    }

    pub fn component(&self, g: usize) -> WeylElement {
        self.components.get(&g).cloned().unwrap_or_else(|| WeylElement::zero(&self.kinds))
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    fn add_component(&mut self, g: usize, a: WeylElement) {
        let sum = &self.component(g) + &a;
        if sum.is_zero() {
            self.components.remove(&g);
        } else {
            self.components.insert(g, sum);
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if !Arc::ptr_eq(&self.group, &other.group) && !same_group(&self.group, &other.group) {
            return Err(Error::GroupMismatch);
        }
        if self.kinds != other.kinds {
            return Err(Error::BasisMismatch(format!("{:?} vs {:?}", self.kinds, other.kinds)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (g, a) in other.components() {
            out.add_component(g, a.clone());
        }
        Ok(out)
    }

    /// `h · x = δ_h x δ_{h⁻¹}`, i.e. `Σ h(a_g) δ_{hgh⁻¹}`.
    pub fn conjugate_by(&self, h: usize) -> Result<Self> {
        let els = self.group.elements();
        let hm = &els[h];
        let mut out = Self::zero(&self.group, &self.kinds);
        for (g, a) in self.components() {
            let c = conjugate(hm, &els[g]);
            let idx = self.group.index_of(&c).expect("group is closed");
            out.add_component(idx, hm.apply(a)?);
        }
        Ok(out)
    }
}

fn conjugate(h: &SymplecticMap, g: &SymplecticMap) -> SymplecticMap {
    h.compose(g).compose(&h.inverse())
}

impl fmt::Display for CrossedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.components().map(|(g, a)| format!("({a}) d{g}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl PartialEq for CrossedElement {
    fn eq(&self, other: &Self) -> bool {
        self.check(other).is_ok() && self.components == other.components
    }
}

/// `(x ⋆_c y)_g = Σ_{g_1 g_2 = g} x_{g_1} ⋆ g_1(y_{g_2})`.
pub fn crossed_mul(x: &CrossedElement, y: &CrossedElement) -> Result<CrossedElement> {
    x.check(y)?;
    let els = x.group.elements();
    let mut out = CrossedElement::zero(&x.group, &x.kinds);
    for (g1, a) in x.components() {
        for (g2, b) in y.components() {
            let g = x.group.index_of(&els[g1].compose(&els[g2])).expect("group is closed");
            out.add_component(g, a.star(&els[g1].apply(b)?)?);
        }
    }
    Ok(out)
}

/// A class function on `Γ`, stored per conjugacy class.
#[derive(Clone, Debug)]
pub struct SectorWeights {
    group: Arc<FiniteSubgroup>,
    classes: Vec<Vec<usize>>,
    weights: Vec<HbarSeries>,
}

impl SectorWeights {
    /// All-zero weights.
    pub fn zero(group: &Arc<FiniteSubgroup>) -> Self {
        let classes = group.conjugacy_classes();
        let weights = vec![HbarSeries::zero(); classes.len()];
        SectorWeights { group: group.clone(), classes, weights }
    }

    /// The indicator of the class of `g`.
    pub fn indicator(group: &Arc<FiniteSubgroup>, g: usize) -> Self {
        let mut w = Self::zero(group);
        w.set(g, HbarSeries::one());
        w
    }

    /// Conjugacy classes in the order used by [`set_class`](Self::set_class).
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// Sets the weight of the class containing `g`.
    pub fn set(&mut self, g: usize, w: HbarSeries) {
        let c = self.class_of(g);
        self.weights[c] = w;
    }

    pub fn set_class(&mut self, class: usize, w: HbarSeries) {
        self.weights[class] = w;
    }

    fn class_of(&self, g: usize) -> usize {
        self.classes.iter().position(|c| c.contains(&g)).expect("every element has a class")
    }

    pub fn weight(&self, g: usize) -> &HbarSeries {
        &self.weights[self.class_of(g)]
    }

    /// Classes whose elements have no eigenvalue 1.
    pub fn fixed_point_free_classes(group: &FiniteSubgroup) -> Vec<usize> {
        let id = Matrix::identity(2 * group.n());
        group
            .conjugacy_classes()
            .iter()
            .enumerate()
            .filter(|(_, c)| id.sub(group.elements()[c[0]].matrix()).kernel().is_empty())
            .map(|(i, _)| i)
            .collect()
    }
}

/// The trace `Σ_g w(g) tr_{g⁻¹}(x_g)`, defined when `w` vanishes on every
/// sector with fixed directions.
pub fn sector_trace(w: &SectorWeights, x: &CrossedElement) -> Result<HbarSeries> {
    if !Arc::ptr_eq(&w.group, &x.group) && !same_group(&w.group, &x.group) {
        return Err(Error::GroupMismatch);
    }
    let id = Matrix::identity(2 * w.group.n());
    for (class, weight) in w.classes.iter().zip(&w.weights) {
        if weight.is_zero() {
            continue;
        }
        let g = &w.group.elements()[class[0]];
        let fixed = id.sub(g.matrix()).kernel().len();
        if fixed > 0 {
            return Err(Error::SectorHasFixedDirections(format!(
                "class of element {} has a {fixed}-dimensional fixed space",
                class[0]
            )));
        }
    }
    let mut acc = HbarSeries::zero();
    for (g, a) in x.components() {
        let weight = w.weight(g);
        if weight.is_zero() {
            continue;
        }
        let t = MapTrace::new(&w.group.elements()[g].inverse())?.eval(a)?;
        acc += &(&t * weight);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::CycloScalar;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn cyclic(m: u32) -> Arc<FiniteSubgroup> {
        Arc::new(FiniteSubgroup::cyclic(&SymplecticMap::rotation(&[(m, 1)])))
    }

    fn random(rng: &mut StdRng, g: &Arc<FiniteSubgroup>, kinds: &[PairKind]) -> CrossedElement {
        let mut x = CrossedElement::zero(g, kinds);
        for i in 0..g.order() {
            x.add_component(i, crate::sample::weyl(rng, kinds, 3, 3, 1, true));
        }
        x
    }

    fn all_fixed_point_free(g: &Arc<FiniteSubgroup>) -> SectorWeights {
        let mut w = SectorWeights::zero(g);
        for (j, c) in SectorWeights::fixed_point_free_classes(g).into_iter().enumerate() {
            w.set_class(c, HbarSeries::int(j as i64 + 2));
        }
        w
    }

    #[test]
    fn unit_and_singletons() {
        let g = cyclic(3);
        let kinds = vec![PairKind::Complex];
        let z = WeylElement::x(&kinds, 1);
        let zb = WeylElement::y(&kinds, 1);
        let one = CrossedElement::one(&g, &kinds);
        let x = CrossedElement::single(&g, 1, z.clone()).unwrap();
        assert_eq!(crossed_mul(&one, &x).unwrap().component(1), z);
        assert_eq!(crossed_mul(&x, &one).unwrap().component(1), z);
        let y = CrossedElement::single(&g, 2, zb.clone()).unwrap();
        let xy = crossed_mul(&x, &y).unwrap();
        let expected = z.star(&g.elements()[1].apply(&zb).unwrap()).unwrap();
        assert_eq!(xy.component(0), expected);
        assert_eq!(xy.components().count(), 1);
    }

    #[test]
    fn associativity_for_small_cyclic_groups() {
        let mut rng = StdRng::seed_from_u64(23);
        for m in [2, 3, 4] {
            let g = cyclic(m);
            let kinds = if m == 2 { vec![PairKind::Real] } else { vec![PairKind::Complex] };
            for _ in 0..10 {
                let (a, b, c) = (random(&mut rng, &g, &kinds), random(&mut rng, &g, &kinds), random(&mut rng, &g, &kinds));
                let l = crossed_mul(&crossed_mul(&a, &b).unwrap(), &c).unwrap();
                let r = crossed_mul(&a, &crossed_mul(&b, &c).unwrap()).unwrap();
                assert_eq!(l, r, "Z_{m}");
            }
        }
    }

    #[test]
    fn trace_property() {
        let mut rng = StdRng::seed_from_u64(29);
        for m in [2, 3, 4, 6] {
            let g = cyclic(m);
            let kinds = vec![PairKind::Real];
            let w = all_fixed_point_free(&g);
            let mut nonzero = 0;
            for _ in 0..10 {
                let a = random(&mut rng, &g, &kinds);
                let b = random(&mut rng, &g, &kinds);
                let ab = sector_trace(&w, &crossed_mul(&a, &b).unwrap()).unwrap();
                let ba = sector_trace(&w, &crossed_mul(&b, &a).unwrap()).unwrap();
                assert_eq!(ab, ba, "Z_{m}");
                nonzero += usize::from(!ab.is_zero());
            }
            assert!(nonzero >= 3, "Z_{m}: only {nonzero} nonzero traces");
        }
    }

    #[test]
    fn minus_one_example_and_rejections() {
        let g = cyclic(2);
        let kinds = vec![PairKind::Complex];
        let zz = WeylElement::x(&kinds, 1).mul_commutative(&WeylElement::y(&kinds, 1));
        let w = SectorWeights::indicator(&g, 1);
        let x = CrossedElement::single(&g, 1, zz).unwrap();
        assert!(sector_trace(&w, &x).unwrap().is_zero());
        let unit = CrossedElement::single(&g, 1, WeylElement::one(&kinds)).unwrap();
        assert_eq!(sector_trace(&w, &unit).unwrap(), HbarSeries::rational(crate::scalar::rat(1, 2)));
        // supported on e only: zero
        assert!(sector_trace(&w, &CrossedElement::one(&g, &kinds)).unwrap().is_zero());
        let bad = SectorWeights::indicator(&g, 0);
        assert!(matches!(sector_trace(&bad, &unit), Err(Error::SectorHasFixedDirections(_))));
        let other = cyclic(3);
        let y = CrossedElement::one(&other, &kinds);
        assert_eq!(crossed_mul(&x, &y).unwrap_err(), Error::GroupMismatch);
    }

    #[test]
    fn class_functions_are_independent() {
        let g = cyclic(4);
        let kinds = vec![PairKind::Real];
        let classes = SectorWeights::fixed_point_free_classes(&g);
        assert_eq!(classes.len(), 3);
        let rows: Vec<Vec<CycloScalar>> = classes
            .iter()
            .map(|&c| {
                let mut w = SectorWeights::zero(&g);
                w.set_class(c, HbarSeries::one());
                (0..g.order())
                    .map(|e| {
                        let x = CrossedElement::single(&g, e, WeylElement::one(&kinds)).unwrap();
                        sector_trace(&w, &x).unwrap().as_scalar().unwrap()
                    })
                    .collect()
            })
            .collect();
        assert_eq!(Matrix::from_rows(rows).rank(), classes.len());
    }
}
