//! Tensor tuples with simplex-variable coefficients and the slot operators
//! `α_ij`, `π_{2k}`, the weighted exponential, simplex integration and `μ`.
//!
//! These operate term by term and are the literal transcription of the
//! cocycle formula; [`super::tau`] evaluates the same quantity through a
//! closed-form matching sum and is checked against this module.

use std::collections::HashMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::homology::{signed_permutations, HochschildChain};
use crate::scalar::{rat, rat_int, CycloScalar, HbarSeries, Rational};
use crate::weyl::{Monomial, PairKind, WeylElement};

use super::simplex::monomial_simplex_integral;

/// Key of one term: the monomial in each slot and the exponent of
/// `u_1 … u_m`.
type Key = (Vec<Monomial>, Vec<u32>);

/// A linear combination of monomial tuples with coefficients polynomial in
/// the simplex variables.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorSlot {
    kinds: Vec<PairKind>,
    arity: usize,
    uvars: usize,
    terms: HashMap<Key, HbarSeries>,
}

fn poisson_constant(kind: PairKind) -> CycloScalar {
    match kind {
        PairKind::Real => CycloScalar::one(),
        PairKind::Complex => CycloScalar::i() * CycloScalar::from_int(2),
    }
}

impl TensorSlot {
    pub fn zero(kinds: &[PairKind], arity: usize, uvars: usize) -> Self {
        TensorSlot { kinds: kinds.to_vec(), arity, uvars, terms: HashMap::new() }
    }

    /// Multilinear expansion of a chain, with `uvars` simplex variables.
    pub fn from_chain(c: &HochschildChain, uvars: usize) -> Self {
        let kinds = c.summands().first().map(|(_, s)| s[0].kinds().to_vec()).unwrap_or_default();
        let mut t = TensorSlot::zero(&kinds, c.degree() + 1, uvars);
        for (ms, x) in c.expand() {
            t.add((ms, vec![0; uvars]), &x);
        }
        t
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn uvars(&self) -> usize {
        self.uvars
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&mut self, key: Key, c: &HbarSeries) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(key.clone()).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn plus(&self, o: &TensorSlot) -> TensorSlot {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add(k.clone(), c);
        }
        out
    }

    /// Multiplies by `ħ · (c_0 + Σ c_i u_i)`.
    fn times_hbar_linear(&self, c0: &Rational, lin: &[(usize, Rational)]) -> TensorSlot {
        let mut out = TensorSlot::zero(&self.kinds, self.arity, self.uvars);
        for ((ms, ue), c) in &self.terms {
            let ch = c.shift(1);
            if !c0.is_zero() {
                out.add((ms.clone(), ue.clone()), &ch.scale(&CycloScalar::from_rational(c0.clone())));
            }
            for (i, ci) in lin {
                let mut ue2 = ue.clone();
                ue2[i - 1] += 1;
                out.add((ms.clone(), ue2), &ch.scale(&CycloScalar::from_rational(ci.clone())));
            }
        }
        out
    }

    /// Scales every coefficient by a rational.
    fn scale(&self, r: &Rational) -> TensorSlot {
        let mut out = TensorSlot::zero(&self.kinds, self.arity, self.uvars);
        let c = CycloScalar::from_rational(r.clone());
        for (k, x) in &self.terms {
            out.add(k.clone(), &x.scale(&c));
        }
        out
    }

    /// Collapses to a chain after all simplex variables are integrated out
    /// (requires `uvars == 0` or constant u-dependence).
    pub fn to_chain(&self) -> HochschildChain {
        let mut c = HochschildChain::zero(self.arity - 1);
        let mut keys: Vec<&Key> = self.terms.keys().collect();
        keys.sort();
        for k in keys {
            let slots = k.0.iter().map(|m| WeylElement::term(&self.kinds, m.clone(), HbarSeries::one())).collect();
            c.push(self.terms[k].clone(), slots);
        }
        c
    }
}

/// `∂/∂(generator idx)` of a monomial: the multiplicity and the lowered
/// monomial.
fn d_mono(m: &Monomial, idx: usize) -> Option<(u32, Monomial)> {
    if m[idx] == 0 {
        return None;
    }
    let mut m2 = m.clone();
    m2[idx] -= 1;
    Some((m[idx], m2))
}

/// One application of
/// `α_ij = ½ Σ_l c_l (∂_{x_l} on slot i · ∂_{y_l} on slot j − ∂_{y_l} on slot i · ∂_{x_l} on slot j)`.
pub fn alpha_ij(i: usize, j: usize, t: &TensorSlot) -> Result<TensorSlot> {
    for s in [i, j] {
        if s >= t.arity {
            return Err(Error::SlotOutOfRange { slot: s, arity: t.arity });
        }
    }
    if i == j {
        return Err(Error::SlotOutOfRange { slot: j, arity: t.arity });
    }
    let n = t.kinds.len();
    let half = CycloScalar::from_rational(rat(1, 2));
    let mut out = TensorSlot::zero(&t.kinds, t.arity, t.uvars);
    for ((ms, ue), c) in &t.terms {
        for l in 0..n {
            let cl = &poisson_constant(t.kinds[l]) * &half;
            for (sign, di, dj) in [(1i64, l, n + l), (-1, n + l, l)] {
                let (Some((ei, mi)), Some((ej, mj))) = (d_mono(&ms[i], di), d_mono(&ms[j], dj)) else {
                    continue;
                };
                let mut ms2 = ms.clone();
                ms2[i] = mi;
                ms2[j] = mj;
                let f = &cl * &CycloScalar::from_int(sign * (ei * ej) as i64);
                out.add((ms2, ue.clone()), &c.scale(&f));
            }
        }
    }
    Ok(out)
}

/// `∏_{0≤i<j≤2k} exp(2ħ (2u_i − 2u_j + 1) α_ij)` with `u_0 = 0`, expanded by
/// repeated application (each factor is nilpotent on polynomial input).
///
/// The factor 2 converts the ½-normalized `α_ij` to the Poisson tensor of
/// the star product `exp(ħα)`.
pub fn weighted_exponential(t: &TensorSlot) -> Result<TensorSlot> {
    let mut cur = t.clone();
    for i in 0..t.arity {
        for j in i + 1..t.arity {
            // 2 w_ij = 2 + 4u_i − 4u_j
            let mut lin = Vec::new();
            if i > 0 {
                lin.push((i, rat_int(4)));
            }
            lin.push((j, rat_int(-4)));
            let mut acc = cur.clone();
            let mut term = cur.clone();
            let mut n = 1i64;
            loop {
                let next = alpha_ij(i, j, &term)?.times_hbar_linear(&rat_int(2), &lin);
                if next.is_zero() {
                    break;
                }
                term = next.scale(&rat(1, n));
                acc = acc.plus(&term);
                n += 1;
            }
            cur = acc;
        }
    }
    Ok(cur)
}

/// `π_{2k}(a_0 ⊗ … ⊗ a_{2k}) = Σ_σ sgn(σ) a_0 ⊗ ∂a_1/∂y_{σ(1)} ⊗ … ⊗ ∂a_{2k}/∂y_{σ(2k)}`
/// over the ordered basis `y` given as generator indices.
pub fn pi_2k(t: &TensorSlot, y: &[usize]) -> Result<TensorSlot> {
    let m = y.len();
    if t.arity != m + 1 {
        return Err(Error::ArityMismatch { expected: m + 1, got: t.arity });
    }
    let mut out = TensorSlot::zero(&t.kinds, t.arity, t.uvars);
    let perms = signed_permutations(m);
    for ((ms, ue), c) in &t.terms {
        'perm: for (sign, perm) in &perms {
            let mut ms2 = ms.clone();
            let mut f = *sign;
            for s in 1..=m {
                match d_mono(&ms[s], y[perm[s - 1]]) {
                    Some((e, mm)) => {
                        f *= e as i64;
                        ms2[s] = mm;
                    }
                    None => continue 'perm,
                }
            }
            out.add((ms2, ue.clone()), &c.scale(&CycloScalar::from_int(f)));
        }
    }
    Ok(out)
}

/// Integrates out all simplex variables over `0 ≤ u_1 ≤ … ≤ u_m ≤ 1`.
pub fn simplex_integrate(t: &TensorSlot) -> HochschildChain {
    let mut flat = TensorSlot::zero(&t.kinds, t.arity, 0);
    for ((ms, ue), c) in &t.terms {
        let w = monomial_simplex_integral(ue);
        flat.add((ms.clone(), Vec::new()), &c.scale(&CycloScalar::from_rational(w)));
    }
    flat.to_chain()
}

/// `μ(a_0 ⊗ … ⊗ a_p) = a_0(0) ⋯ a_p(0)`, extended linearly.
pub fn mu(c: &HochschildChain) -> HbarSeries {
    let mut acc = HbarSeries::zero();
    for (x, slots) in c.summands() {
        let mut v = x.clone();
        for s in slots {
            v = &v * &s.constant_term();
        }
        acc += &v;
    }
    acc
}

/// The cocycle evaluated literally: `μ ∫ ∏ exp(…) π_{2k}(a)`.
pub fn tau_2k_literal(a: &HochschildChain, y: &[usize]) -> Result<HbarSeries> {
    let t = TensorSlot::from_chain(a, y.len());
    let p = pi_2k(&t, y)?;
    let e = weighted_exponential(&p)?;
    Ok(mu(&simplex_integrate(&e)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds() -> Vec<PairKind> {
        vec![PairKind::Real]
    }

    #[test]
    fn alpha_on_p_q_one() {
        let k = kinds();
        let c = HochschildChain::tuple(vec![WeylElement::x(&k, 1), WeylElement::y(&k, 1), WeylElement::one(&k)]);
        let t = TensorSlot::from_chain(&c, 0);
        let a = alpha_ij(0, 1, &t).unwrap().to_chain();
        let one = WeylElement::one(&k);
        let mut expected = HochschildChain::zero(2);
        expected.push(HbarSeries::rational(rat(1, 2)), vec![one.clone(), one.clone(), one]);
        assert_eq!(a, expected);
    }

    #[test]
    fn alpha_kills_constant_slot_and_checks_range() {
        let k = kinds();
        let c = HochschildChain::tuple(vec![WeylElement::one(&k), WeylElement::x(&k, 1), WeylElement::y(&k, 1)]);
        let t = TensorSlot::from_chain(&c, 0);
        assert!(alpha_ij(0, 1, &t).unwrap().is_zero());
        assert!(matches!(alpha_ij(0, 3, &t), Err(Error::SlotOutOfRange { slot: 3, arity: 3 })));
    }

    #[test]
    fn alpha_is_nilpotent() {
        let k = kinds();
        let p = WeylElement::x(&k, 1);
        let q = WeylElement::y(&k, 1);
        let c = HochschildChain::tuple(vec![p.mul_commutative(&q), q.mul_commutative(&p), WeylElement::one(&k)]);
        let mut t = TensorSlot::from_chain(&c, 0);
        for _ in 0..5 {
            t = alpha_ij(0, 1, &t).unwrap();
        }
        assert!(t.is_zero());
    }

    #[test]
    fn pi_on_c2_tuple() {
        let k = kinds();
        let c = HochschildChain::tuple(vec![WeylElement::one(&k), WeylElement::x(&k, 1), WeylElement::y(&k, 1)]);
        let t = pi_2k(&TensorSlot::from_chain(&c, 2), &[0, 1]).unwrap();
        assert_eq!(t.num_terms(), 1);
        assert_eq!(mu(&t.to_chain()), HbarSeries::one());
        assert!(matches!(pi_2k(&t, &[0]), Err(Error::ArityMismatch { .. })));
    }
}
