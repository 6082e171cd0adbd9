//! Truncated cohomology rings: polynomial rings on even-degree generators,
//! with every monomial above the top degree set to zero, and an integral on
//! the top degree.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{Algebra, Expr};
use crate::scalar::{rat_int, CycloScalar, Rational};

/// Exponent vector over the ring generators.
pub type Exponents = Vec<u32>;

/// Generators, their degrees, the top degree and the integral.
#[derive(Clone, Debug, PartialEq)]
pub struct CohomologyModel {
    names: Vec<String>,
    degrees: Vec<u32>,
    top: u32,
    integral: BTreeMap<Exponents, CycloScalar>,
}

impl CohomologyModel {
    /// Rejects odd or zero generator degrees, odd top degrees and repeated
    /// names.
    pub fn new(generators: Vec<(String, u32)>, top: u32) -> Result<Arc<Self>> {
        if top % 2 != 0 {
            return Err(Error::OddDegree(format!("top degree {top}")));
        }
        let mut names = Vec::new();
        let mut degrees = Vec::new();
        for (name, d) in generators {
            if d == 0 || d % 2 != 0 {
                return Err(Error::OddDegree(format!("generator {name} of degree {d}")));
            }
            if names.contains(&name) || name == "h" || name == "zeta" || name == "star" {
                return Err(Error::ModelInconsistency(format!("generator name '{name}' is repeated or reserved")));
            }
            names.push(name);
            degrees.push(d);
        }
        Ok(Arc::new(CohomologyModel { names, degrees, top, integral: BTreeMap::new() }))
    }

    /// The same ring with `∫ x^e = c` on the given top-degree monomials (all
    /// others integrate to zero).
    pub fn with_integrals(self: &Arc<Self>, values: Vec<(Exponents, CycloScalar)>) -> Result<Arc<Self>> {
        let mut out = (**self).clone();
        for (e, c) in values {
            if e.len() != self.names.len() || self.degree_of(&e) != self.top {
                return Err(Error::ModelInconsistency(format!(
                    "integral given on '{}', which is not a top-degree monomial",
                    self.render_monomial(&e)
                )));
            }
            if !c.is_zero() {
                out.integral.insert(e, c);
            }
        }
        Ok(Arc::new(out))
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn top_degree(&self) -> u32 {
        self.top
    }

    pub fn integrals(&self) -> impl Iterator<Item = (&Exponents, &CycloScalar)> {
        self.integral.iter()
    }

    pub fn degree_of(&self, e: &[u32]) -> u32 {
        e.iter().zip(&self.degrees).map(|(a, d)| a * d).sum()
    }

    pub fn render_monomial(&self, e: &[u32]) -> String {
        let parts: Vec<String> = e
            .iter()
            .zip(&self.names)
            .filter(|(&a, _)| a > 0)
            .map(|(&a, n)| if a == 1 { n.clone() } else { format!("{n}^{a}") })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    /// Parses a monomial such as `x^2*y` or `1`.
    pub fn parse_monomial(self: &Arc<Self>, src: &str) -> Result<Exponents> {
        let e = self.parse(src)?;
        let mut terms = e.terms();
        match (terms.next(), terms.next()) {
            (Some((m, c)), None) if c.is_one() => Ok(m.clone()),
            (None, None) => Err(Error::ModelInconsistency(format!("'{src}' is zero in the ring"))),
            _ => Err(Error::ModelInconsistency(format!("'{src}' is not a single monomial"))),
        }
    }

    /// Parses an element in the expression grammar with the generators as
    /// variables.
    pub fn parse(self: &Arc<Self>, src: &str) -> Result<RingElement> {
        Expr::parse(src)?.eval(&RingAlgebra(self.clone()))
    }
}

/// An element of a truncated ring.
#[derive(Clone, PartialEq)]
pub struct RingElement {
    ring: Arc<CohomologyModel>,
    terms: BTreeMap<Exponents, CycloScalar>,
}

impl RingElement {
    pub fn zero(ring: &Arc<CohomologyModel>) -> Self {
        RingElement { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ring: &Arc<CohomologyModel>, c: CycloScalar) -> Self {
        let mut out = Self::zero(ring);
        out.add_term(vec![0; ring.names.len()], &c);
        out
    }

    pub fn one(ring: &Arc<CohomologyModel>) -> Self {
        Self::constant(ring, CycloScalar::one())
    }

    /// Generator `i` (0-based).
    pub fn generator(ring: &Arc<CohomologyModel>, i: usize) -> Self {
        let mut e = vec![0; ring.names.len()];
        e[i] = 1;
        let mut out = Self::zero(ring);
        out.add_term(e, &CycloScalar::one());
        out
    }

    pub fn ring(&self) -> &Arc<CohomologyModel> {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &CycloScalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, e: Exponents, c: &CycloScalar) {
        if c.is_zero() || self.ring.degree_of(&e) > self.ring.top {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn constant_term(&self) -> CycloScalar {
        self.terms.get(&vec![0; self.ring.names.len()]).cloned().unwrap_or_else(CycloScalar::zero)
    }

    /// The homogeneous component of degree `d`.
    pub fn part(&self, d: u32) -> Self {
        let mut out = Self::zero(&self.ring);
        for (e, c) in &self.terms {
            if self.ring.degree_of(e) == d {
                out.add_term(e.clone(), c);
            }
        }
        out
    }

    /// Degree when homogeneous (zero counts as homogeneous of any degree).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|e| self.ring.degree_of(e));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    fn check(&self, o: &Self) {
        assert!(Arc::ptr_eq(&self.ring, &o.ring) || self.ring == o.ring, "elements of different rings");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&CycloScalar::from_int(-1)))
    }

    pub fn scale(&self, c: &CycloScalar) -> Self {
        let mut out = Self::zero(&self.ring);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), &(a * c));
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        let mut out = Self::zero(&self.ring);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, &(c1 * c2));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.ring);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// `Σ_j c_j x^j` for a nilpotent `x` (zero constant term); terms past the
    /// nilpotency index vanish, so `coeffs` only needs `top/2 + 1` entries.
    pub fn compose_series(&self, coeffs: &[Rational]) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::NonZeroConstantTerm);
        }
        let mut acc = Self::zero(&self.ring);
        let mut pw = Self::one(&self.ring);
        for c in coeffs.iter().take(self.ring.top as usize / 2 + 1) {
            acc = acc.add(&pw.scale(&CycloScalar::from_rational(c.clone())));
            pw = pw.mul(self);
            if pw.is_zero() {
                break;
            }
        }
        Ok(acc)
    }

    /// `exp(x)` for nilpotent `x`.
    pub fn exp(&self) -> Result<Self> {
        let n = self.ring.top as usize / 2 + 1;
        let mut coeffs = Vec::with_capacity(n);
        let mut fact = rat_int(1);
        for j in 0..n {
            if j > 0 {
                fact *= rat_int(j as i64);
            }
            coeffs.push(rat_int(1) / fact.clone());
        }
        self.compose_series(&coeffs)
    }

    /// Inverse of an element with invertible constant term.
    pub fn inverse(&self) -> Result<Self> {
        let c = self.constant_term();
        let ci = c.inverse().map_err(|_| Error::NotInvertible(format!("{self}")))?;
        // self = c (1 + n) with n nilpotent
        let n = self.scale(&ci).sub(&Self::one(&self.ring));
        let len = self.ring.top as usize / 2 + 1;
        let geometric: Vec<Rational> = (0..len).map(|j| rat_int(if j % 2 == 0 { 1 } else { -1 })).collect();
        Ok(n.compose_series(&geometric)?.scale(&ci))
    }

    /// `∫ self`: the top-degree part paired with the integral table.
    pub fn integrate(&self) -> CycloScalar {
        let mut acc = CycloScalar::zero();
        for (e, c) in &self.terms {
            if let Some(v) = self.ring.integral.get(e) {
                acc += &(c * v);
            }
        }
        acc
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut sorted: Vec<_> = self.terms.iter().collect();
        sorted.sort_by(|a, b| {
            let (da, db) = (self.ring.degree_of(a.0), self.ring.degree_of(b.0));
            da.cmp(&db).then_with(|| b.0.cmp(a.0))
        });
        let mut out: Vec<(bool, String)> = Vec::new();
        for (e, c) in sorted {
            let mono = self.ring.render_monomial(e);
            let cterms = c.signed_terms();
            if mono == "1" {
                out.extend(cterms);
            } else if cterms.len() == 1 {
                let (neg, s) = &cterms[0];
                out.push((*neg, if s == "1" { mono } else { format!("{s}*{mono}") }));
            } else {
                out.push((false, format!("({c})*{mono}")));
            }
        }
        write!(f, "{}", crate::scalar::cyclo::join_signed(&out))
    }
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A ring as an expression target.
pub struct RingAlgebra(pub Arc<CohomologyModel>);

impl Algebra for RingAlgebra {
    type Elem = RingElement;

    fn constant(&self, c: &CycloScalar) -> RingElement {
        RingElement::constant(&self.0, c.clone())
    }

    fn hbar(&self, pos: usize) -> Result<RingElement> {
        Err(Error::Parse { pos, msg: "'h' is not allowed in a cohomology class".into() })
    }

    fn var(&self, name: &str, pos: usize) -> Result<RingElement> {
        let i = self.0.names.iter().position(|n| n == name).ok_or_else(|| Error::Parse {
            pos,
            msg: format!("unknown generator '{name}'"),
        })?;
        Ok(RingElement::generator(&self.0, i))
    }

    fn add(&self, a: &RingElement, b: &RingElement) -> RingElement {
        a.add(b)
    }

    fn neg(&self, a: &RingElement) -> RingElement {
        a.scale(&CycloScalar::from_int(-1))
    }

    fn mul(&self, a: &RingElement, b: &RingElement) -> RingElement {
        a.mul(b)
    }

    fn star(&self, a: &RingElement, b: &RingElement, _pos: usize) -> Result<RingElement> {
        Ok(a.mul(b))
    }

    fn as_constant(&self, a: &RingElement) -> Option<CycloScalar> {
        (a.terms.len() <= 1 && a.part(0) == *a).then(|| a.constant_term())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn ring() -> Arc<CohomologyModel> {
        CohomologyModel::new(vec![("x".into(), 2), ("y".into(), 2)], 4).unwrap()
    }

    #[test]
    fn truncation_and_parsing() {
        let r = ring();
        let a = r.parse("x^2*y + x*y + 3").unwrap();
        assert_eq!(a.to_string(), "3 + x*y");
        assert!(r.parse("x^3").unwrap().is_zero());
        assert_eq!(r.parse_monomial("y*x").unwrap(), vec![1, 1]);
        assert!(r.parse("w").is_err());
        assert!(matches!(CohomologyModel::new(vec![("a".into(), 3)], 4), Err(Error::OddDegree(_))));
    }

    #[test]
    fn exp_and_inverse() {
        let r = ring();
        let x = r.parse("x").unwrap();
        let e = x.exp().unwrap();
        assert_eq!(e, r.parse("1 + x + x^2/2").unwrap());
        let u = r.parse("2 + x + y").unwrap();
        assert_eq!(u.mul(&u.inverse().unwrap()), RingElement::one(&r));
        assert_eq!(r.parse("1 + x").unwrap().exp(), Err(Error::NonZeroConstantTerm));
    }

    #[test]
    fn integral_reads_top_degree() {
        let r = ring().with_integrals(vec![(vec![1, 1], CycloScalar::from_rational(rat(1, 3)))]).unwrap();
        let a = r.parse("5 + x + 6*x*y + y^2").unwrap();
        assert_eq!(a.integrate(), CycloScalar::from_int(2));
        assert!(ring().with_integrals(vec![(vec![1, 0], CycloScalar::one())]).is_err());
    }
}
