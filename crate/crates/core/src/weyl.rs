//! The formal Weyl algebra: polynomials in symplectic generators with
//! Laurent-ħ coefficients and the Moyal star product.
//!
//! Generators are ordered `x_1 … x_n, y_1 … y_n`. On a real pair `(x, y)` is
//! `(p, q)`; on a complex pair it is `(z, z̄)` with `z = q + ip`. The Poisson
//! tensor is `α = Σ_j c_j (∂_{x_j} ⊗ ∂_{y_j} − ∂_{y_j} ⊗ ∂_{x_j})` with
//! `c_j = 1` on real pairs and `c_j = 2i` on complex pairs, and the product is
//! `a ⋆ b = m(exp(ħα)(a ⊗ b))`, so `[p, q] = 2ħ` and `[z, z̄] = 4iħ`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{rat, CycloScalar, HbarSeries};

/// Coordinates used on one symplectic pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairKind {
    /// `(p, q)`
    Real,
    /// `(z, z̄)` with `z = q + ip`
    Complex,
}

/// Exponent vector over `(x_1 … x_n, y_1 … y_n)`.
pub type Monomial = Vec<u32>;

/// Descending graded-lexicographic comparison used for printing.
pub fn grlex_desc(a: &Monomial, b: &Monomial) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    db.cmp(&da).then_with(|| b.cmp(a))
}

/// An element of the Weyl algebra on `n` pairs.
#[derive(Clone, PartialEq, Eq)]
pub struct WeylElement {
    kinds: Vec<PairKind>,
    terms: BTreeMap<Monomial, HbarSeries>,
}

fn poisson_constant(kind: PairKind) -> CycloScalar {
    match kind {
        PairKind::Real => CycloScalar::one(),
        PairKind::Complex => CycloScalar::i() * CycloScalar::from_int(2),
    }
}

fn falling(n: u32, k: u32) -> i64 {
    (0..k).map(|i| (n - i) as i64).product()
}

fn factorial(n: u32) -> i64 {
    (1..=n as i64).product()
}

impl WeylElement {
    pub fn zero(kinds: &[PairKind]) -> Self {
        WeylElement { kinds: kinds.to_vec(), terms: BTreeMap::new() }
    }

    /// Zero element on `n` real pairs.
    pub fn zero_real(n: usize) -> Self {
        Self::zero(&vec![PairKind::Real; n])
    }

    pub fn constant(kinds: &[PairKind], c: HbarSeries) -> Self {
        Self::term(kinds, vec![0; 2 * kinds.len()], c)
    }

    pub fn one(kinds: &[PairKind]) -> Self {
        Self::constant(kinds, HbarSeries::one())
    }

    pub fn term(kinds: &[PairKind], mono: Monomial, c: HbarSeries) -> Self {
        assert_eq!(mono.len(), 2 * kinds.len(), "monomial length must be 2n");
        let mut e = Self::zero(kinds);
        e.add_term(mono, &c);
        e
    }

    /// The generator with index `idx` in `(x_1 … x_n, y_1 … y_n)`.
    pub fn generator(kinds: &[PairKind], idx: usize) -> Self {
        let mut m = vec![0; 2 * kinds.len()];
        m[idx] = 1;
        Self::term(kinds, m, HbarSeries::one())
    }

    /// `p_i` (1-based) on a real pair, `z_i` on a complex pair.
    pub fn x(kinds: &[PairKind], i: usize) -> Self {
        Self::generator(kinds, i - 1)
    }

    /// `q_i` (1-based) on a real pair, `z̄_i` on a complex pair.
    pub fn y(kinds: &[PairKind], i: usize) -> Self {
        Self::generator(kinds, kinds.len() + i - 1)
    }

    pub fn n(&self) -> usize {
        self.kinds.len()
    }

    pub fn kinds(&self) -> &[PairKind] {
        &self.kinds
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &HbarSeries)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mono: &Monomial) -> HbarSeries {
        self.terms.get(mono).cloned().unwrap_or_default()
    }

    /// Coefficient of the constant monomial.
    pub fn constant_term(&self) -> HbarSeries {
        self.coeff(&vec![0; 2 * self.n()])
    }

    /// Largest total polynomial degree, or `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().sum()).max()
    }

    pub fn add_term(&mut self, mono: Monomial, c: &HbarSeries) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&mono) {
            Some(e) => {
                *e += c;
                if e.is_zero() {
                    self.terms.remove(&mono);
                }
            }
            None => {
                self.terms.insert(mono, c.clone());
            }
        }
    }

    fn from_map(kinds: &[PairKind], map: HashMap<Monomial, HbarSeries>) -> Self {
        WeylElement {
            kinds: kinds.to_vec(),
            terms: map.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.kinds != other.kinds {
            return Err(Error::BasisMismatch(format!("{:?} vs {:?}", self.kinds, other.kinds)));
        }
        Ok(())
    }

    pub fn scale(&self, c: &HbarSeries) -> Self {
        let mut out = Self::zero(&self.kinds);
        for (m, x) in &self.terms {
            out.add_term(m.clone(), &(x * c));
        }
        out
    }

    pub fn scale_scalar(&self, c: &CycloScalar) -> Self {
        self.scale(&HbarSeries::scalar(c.clone()))
    }

    /// Multiplies every coefficient by ħ^s.
    pub fn shift_hbar(&self, s: i32) -> Self {
        WeylElement {
            kinds: self.kinds.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.shift(s))).collect(),
        }
    }

    /// The commutative (pointwise) product.
    pub fn mul_commutative(&self, other: &Self) -> Self {
        self.check_same_shape(other).expect("commutative product of differently shaped elements");
        let mut acc: HashMap<Monomial, HbarSeries> = HashMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                *acc.entry(m).or_default() += &(ca * cb);
            }
        }
        Self::from_map(&self.kinds, acc)
    }

    pub fn pow_commutative(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.kinds);
        for _ in 0..e {
            acc = acc.mul_commutative(self);
        }
        acc
    }

    /// The part of total polynomial degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        WeylElement {
            kinds: self.kinds.clone(),
            terms: self.terms.iter().filter(|(m, _)| m.iter().sum::<u32>() == d).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Re-embeds the element on the sub-algebra of the given pairs
    /// (0-based); `None` when a term involves any other pair.
    pub fn restrict_to_pairs(&self, pairs: &[usize]) -> Option<Self> {
        let n = self.n();
        let kinds: Vec<PairKind> = pairs.iter().map(|&j| self.kinds[j]).collect();
        let mut out = Self::zero(&kinds);
        for (m, c) in &self.terms {
            let kept: u32 = pairs.iter().map(|&j| m[j] + m[n + j]).sum();
            if kept != m.iter().sum::<u32>() {
                return None;
            }
            let m2 = pairs.iter().map(|&j| m[j]).chain(pairs.iter().map(|&j| m[n + j])).collect();
            out.add_term(m2, c);
        }
        Some(out)
    }

    /// Partial derivative with respect to generator `idx`.
    pub fn derivative(&self, idx: usize) -> Self {
        let mut out = Self::zero(&self.kinds);
        for (m, c) in &self.terms {
            if m[idx] > 0 {
                let mut m2 = m.clone();
                m2[idx] -= 1;
                out.add_term(m2, &c.scale(&CycloScalar::from_int(m[idx] as i64)));
            }
        }
        out
    }

    /// The Moyal star product.
    pub fn star(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let n = self.n();
        let consts: Vec<CycloScalar> = self.kinds.iter().map(|k| poisson_constant(*k)).collect();
        let mut acc: HashMap<Monomial, HbarSeries> = HashMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let prod = ca * cb;
                // Per pair: the admissible (s, t) with their scalar weights
                // c^{s+t} (−1)^t (falling factorials) / (s! t!).
                let mut choices: Vec<Vec<(u32, u32, CycloScalar)>> = Vec::with_capacity(n);
                for j in 0..n {
                    let (ax, ay) = (ma[j], ma[n + j]);
                    let (bx, by) = (mb[j], mb[n + j]);
                    let mut list = Vec::new();
                    for s in 0..=ax.min(by) {
                        for t in 0..=ay.min(bx) {
                            let num = falling(ax, s) * falling(by, s) * falling(ay, t) * falling(bx, t);
                            let den = factorial(s) * factorial(t);
                            let sign = if t % 2 == 1 { -1 } else { 1 };
                            let c = CycloScalar::from_rational(rat(sign * num, den))
                                * consts[j].pow((s + t) as i64).unwrap();
                            list.push((s, t, c));
                        }
                    }
                    choices.push(list);
                }
                let mut idx = vec![0usize; n];
                loop {
                    let mut m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                    let mut c = CycloScalar::one();
                    let mut hpow = 0i32;
                    for j in 0..n {
                        let (s, t, ref cj) = choices[j][idx[j]];
                        m[j] -= s + t;
                        m[n + j] -= s + t;
                        c = &c * cj;
                        hpow += (s + t) as i32;
                    }
                    let term = prod.shift(hpow).scale(&c);
                    *acc.entry(m).or_default() += &term;
                    // advance the mixed-radix counter
                    let mut j = 0;
                    while j < n {
                        idx[j] += 1;
                        if idx[j] < choices[j].len() {
                            break;
                        }
                        idx[j] = 0;
                        j += 1;
                    }
                    if j == n {
                        break;
                    }
                }
            }
        }
        Ok(Self::from_map(&self.kinds, acc))
    }

    /// `a ⋆ b − b ⋆ a`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        Ok(&self.star(other)? - &other.star(self)?)
    }

    /// Substitutes `images[i]` for generator `i` and multiplies out
    /// commutatively. Used for linear coordinate changes.
    pub fn substitute(&self, images: &[WeylElement]) -> Self {
        assert_eq!(images.len(), 2 * self.n());
        let target = images[0].kinds.clone();
        let mut powers: Vec<Vec<WeylElement>> = images.iter().map(|g| vec![WeylElement::one(&target), g.clone()]).collect();
        let mut out = WeylElement::zero(&target);
        for (m, c) in &self.terms {
            let mut t = WeylElement::constant(&target, c.clone());
            for (i, &e) in m.iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul_commutative(&images[i]);
                    powers[i].push(next);
                }
                if e > 0 {
                    t = t.mul_commutative(&powers[i][e as usize]);
                }
            }
            out = &out + &t;
        }
        out
    }

    /// Rewrites the designated pairs (0-based) in complex coordinates
    /// `z = q + ip`, `z̄ = q − ip`.
    pub fn to_complex_basis(&self, pairs: &[usize]) -> Result<Self> {
        self.change_basis(pairs, PairKind::Complex)
    }

    /// Inverse of [`to_complex_basis`](Self::to_complex_basis).
    pub fn to_real_basis(&self, pairs: &[usize]) -> Result<Self> {
        self.change_basis(pairs, PairKind::Real)
    }

    fn change_basis(&self, pairs: &[usize], to: PairKind) -> Result<Self> {
        let n = self.n();
        let mut kinds = self.kinds.clone();
        for &j in pairs {
            if j >= n {
                return Err(Error::DimensionMismatch(format!("pair {} of {}", j + 1, n)));
            }
            kinds[j] = to;
        }
        let half = CycloScalar::from_rational(rat(1, 2));
        let i = CycloScalar::i();
        let gen = |idx: usize, c: CycloScalar| WeylElement::generator(&kinds, idx).scale_scalar(&c);
        let mut images = Vec::with_capacity(2 * n);
        for idx in 0..2 * n {
            let j = idx % n;
            let is_x = idx < n;
            let img = if self.kinds[j] == kinds[j] {
                WeylElement::generator(&kinds, idx)
            } else if to == PairKind::Complex {
                // p = (z − z̄)/(2i) = −(i/2)(z − z̄), q = (z + z̄)/2
                if is_x {
                    let c = -(&i * &half);
                    &gen(j, c.clone()) - &gen(n + j, c)
                } else {
                    &gen(j, half.clone()) + &gen(n + j, half.clone())
                }
            } else if is_x {
                // z = q + ip
                &gen(n + j, CycloScalar::one()) + &gen(j, i.clone())
            } else {
                // z̄ = q − ip
                &gen(n + j, CycloScalar::one()) - &gen(j, i.clone())
            };
            images.push(img);
        }
        Ok(self.substitute(&images))
    }

    /// Name of generator `idx`.
    pub fn generator_name(kinds: &[PairKind], idx: usize) -> String {
        let n = kinds.len();
        let j = idx % n;
        let is_x = idx < n;
        match (kinds[j], is_x) {
            (PairKind::Real, true) => format!("p{}", j + 1),
            (PairKind::Real, false) => format!("q{}", j + 1),
            (PairKind::Complex, true) => format!("z{}", j + 1),
            (PairKind::Complex, false) => format!("zb{}", j + 1),
        }
    }

    fn render_monomial(&self, m: &Monomial) -> String {
        let mut parts = Vec::new();
        for (idx, &e) in m.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let name = Self::generator_name(&self.kinds, idx);
            parts.push(if e == 1 { name } else { format!("{name}^{e}") });
        }
        parts.join("*")
    }

    /// Terms in printing order (descending graded lex).
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &HbarSeries)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| grlex_desc(a.0, b.0));
        v
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out: Vec<(bool, String)> = Vec::new();
        for (m, c) in self.sorted_terms() {
            let mono = self.render_monomial(m);
            let cterms = c.signed_terms();
            if mono.is_empty() {
                out.extend(cterms);
            } else if cterms.len() == 1 {
                let (neg, s) = &cterms[0];
                let body = if s == "1" { mono } else { format!("{s}*{mono}") };
                out.push((*neg, body));
            } else {
                out.push((false, format!("({c})*{mono}")));
            }
        }
        write!(f, "{}", crate::scalar::cyclo::join_signed(&out))
    }
}

impl fmt::Debug for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<'a> Add<&'a WeylElement> for &'a WeylElement {
    type Output = WeylElement;
    fn add(self, o: &WeylElement) -> WeylElement {
        self.check_same_shape(o).expect("sum of differently shaped Weyl elements");
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl<'a> Sub<&'a WeylElement> for &'a WeylElement {
    type Output = WeylElement;
    fn sub(self, o: &WeylElement) -> WeylElement {
        self + &(-o)
    }
}

impl Neg for &WeylElement {
    type Output = WeylElement;
    fn neg(self) -> WeylElement {
        WeylElement {
            kinds: self.kinds.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

/// Star product; panics when the shapes differ (use [`WeylElement::star`]
/// for a checked version).
impl<'a> Mul<&'a WeylElement> for &'a WeylElement {
    type Output = WeylElement;
    fn mul(self, o: &WeylElement) -> WeylElement {
        self.star(o).expect("star product of differently shaped Weyl elements")
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<WeylElement> for WeylElement {
            type Output = WeylElement;
            fn $m(self, o: WeylElement) -> WeylElement { (&self).$m(&o) }
        }
        impl<'a> $tr<&'a WeylElement> for WeylElement {
            type Output = WeylElement;
            fn $m(self, o: &WeylElement) -> WeylElement { (&self).$m(o) }
        }
        impl<'a> $tr<WeylElement> for &'a WeylElement {
            type Output = WeylElement;
            fn $m(self, o: WeylElement) -> WeylElement { self.$m(&o) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for WeylElement {
    type Output = WeylElement;
    fn neg(self) -> WeylElement {
        -&self
    }
}

/// A homogeneous quadratic with ħ-free coefficients, i.e. an element of
/// the symplectic Lie algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticHamiltonian(WeylElement);

impl QuadraticHamiltonian {
    pub fn new(h: WeylElement) -> Result<Self> {
        for (m, c) in h.terms() {
            let d: u32 = m.iter().sum();
            if d != 2 {
                return Err(Error::NotQuadratic(format!("term of degree {d} in {h}")));
            }
            if c.terms().any(|(k, _)| k != 0) {
                return Err(Error::NotQuadratic(format!("ħ-dependent coefficient in {h}")));
            }
        }
        Ok(QuadraticHamiltonian(h))
    }

    pub fn element(&self) -> &WeylElement {
        &self.0
    }

    /// `(1/2ħ)(h ⋆ a − a ⋆ h)`.
    pub fn derive(&self, a: &WeylElement) -> Result<WeylElement> {
        sp_derivation(&self.0, a)
    }
}

/// `(1/2ħ)[h, a]_⋆` for a homogeneous quadratic `h`.
pub fn sp_derivation(h: &WeylElement, a: &WeylElement) -> Result<WeylElement> {
    QuadraticHamiltonian::new(h.clone())?;
    let c = h.commutator(a)?;
    Ok(c.shift_hbar(-1).scale_scalar(&CycloScalar::from_rational(rat(1, 2))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(n: usize) -> Vec<PairKind> {
        vec![PairKind::Real; n]
    }

    #[test]
    fn p_star_q() {
        let k = real(1);
        let p = WeylElement::x(&k, 1);
        let q = WeylElement::y(&k, 1);
        assert_eq!((&p * &q).to_string(), "p1*q1 + h");
        let c = (&p * &q) - (&q * &p);
        assert_eq!(c, WeylElement::constant(&k, HbarSeries::monomial(CycloScalar::from_int(2), 1)));
    }

    #[test]
    fn unit_is_neutral() {
        let k = real(2);
        let a = &WeylElement::x(&k, 1).pow_commutative(3) + &WeylElement::y(&k, 2);
        let one = WeylElement::one(&k);
        assert_eq!(&one * &a, a);
        assert_eq!(&a * &one, a);
    }

    #[test]
    fn z_zbar_commutator() {
        let k = vec![PairKind::Complex];
        let z = WeylElement::x(&k, 1);
        let zb = WeylElement::y(&k, 1);
        let c = z.commutator(&zb).unwrap();
        let expected = CycloScalar::i() * CycloScalar::from_int(4);
        assert_eq!(c, WeylElement::constant(&k, HbarSeries::monomial(expected, 1)));
    }

    #[test]
    fn q_in_complex_basis() {
        let k = real(1);
        let q = WeylElement::y(&k, 1);
        let qc = q.to_complex_basis(&[0]).unwrap();
        assert_eq!(qc.to_string(), "1/2*z1 + 1/2*zb1");
        assert_eq!(qc.to_real_basis(&[0]).unwrap(), q);
    }

    #[test]
    fn complex_product_matches_real_product() {
        let k = real(1);
        let a = &WeylElement::x(&k, 1).pow_commutative(2) + &WeylElement::y(&k, 1);
        let b = WeylElement::x(&k, 1).mul_commutative(&WeylElement::y(&k, 1).pow_commutative(2));
        let real_prod = &a * &b;
        let ac = a.to_complex_basis(&[0]).unwrap();
        let bc = b.to_complex_basis(&[0]).unwrap();
        assert_eq!((&ac * &bc).to_real_basis(&[0]).unwrap(), real_prod);
    }

    #[test]
    fn basis_mismatch_is_rejected() {
        let a = WeylElement::one(&real(1));
        let b = WeylElement::one(&real(2));
        assert!(matches!(a.star(&b), Err(Error::BasisMismatch(_))));
    }

    #[test]
    fn derivation_of_pq() {
        let k = real(1);
        let h = WeylElement::x(&k, 1).mul_commutative(&WeylElement::y(&k, 1));
        let q = WeylElement::y(&k, 1);
        let p = WeylElement::x(&k, 1);
        assert_eq!(sp_derivation(&h, &q).unwrap(), q);
        assert_eq!(sp_derivation(&h, &p).unwrap(), -&p);
        assert!(sp_derivation(&h, &WeylElement::one(&k)).unwrap().is_zero());
        assert!(sp_derivation(&p, &q).is_err());
    }
}
