//! Fast evaluation of the Hochschild cocycle `τ_{2k}` on `𝕎_{2k}`.
//!
//! After `π_{2k}`, every slot is a monomial tuple and `μ` only keeps the
//! constant term, so the weighted exponential contributes exactly the terms
//! that pair every `p_l`-factor with a `q_l`-factor in another slot. Per pair
//! index `l` this is a permanent-type matching sum with entries
//! `M_ij = 1 + 2u_i − 2u_j` for `i < j` and `M_ji = −M_ij`; the product over
//! `l` is then integrated over the simplex. Integrals are memoized per
//! monomial tuple.
//!
//! The weight is `exp(2ħ(1 + 2u_i − 2u_j) α_ij)` with the ½-normalized
//! `α_ij`: the factor 2 matches the star product `exp(ħα)` used here (whose
//! `α` has no ½), and it is the only normalization for which the cocycle
//! identity holds.

use std::collections::HashMap;
use std::sync::Mutex;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::homology::{fixed_basis_indices, signed_permutations, HochschildChain};
use crate::scalar::{rat_int, CycloScalar, HbarSeries, Rational};
use crate::weyl::{Monomial, PairKind, WeylElement};

use super::simplex::UPoly;

/// The cocycle `τ_{2k}` on `k` real pairs with its evaluation cache.
pub struct Tau2k {
    k: usize,
    y: Vec<usize>,
    kinds: Vec<PairKind>,
    scale: Rational,
    perms: Vec<(i64, Vec<usize>)>,
    /// `M_ij` as u-polynomials, indexed `[i][j]`.
    weights: Vec<Vec<UPoly>>,
    cache: Mutex<HashMap<Vec<Monomial>, (i32, Rational)>>,
}

fn factorial(n: u32) -> Rational {
    rat_int((1..=n as i64).product())
}

impl Tau2k {
    pub fn new(k: usize) -> Self {
        Self::with_scale(k, Rational::one())
    }

    /// Variant with the exponent `ħ · scale · (1 + 2u_i − 2u_j)` times the
    /// unnormalized two-slot Poisson tensor.
    pub(crate) fn with_scale(k: usize, scale: Rational) -> Self {
        let kinds = vec![PairKind::Real; k];
        let pairs: Vec<usize> = (0..k).collect();
        let y = fixed_basis_indices(&kinds, &pairs);
        let m = 2 * k;
        let slots = m + 1;
        let mut weights = vec![vec![UPoly::zero(m); slots]; slots];
        for i in 0..slots {
            for j in i + 1..slots {
                let mut lin = Vec::new();
                if i > 0 {
                    lin.push((i, rat_int(2) * &scale));
                }
                lin.push((j, rat_int(-2) * &scale));
                let w = UPoly::linear(m, scale.clone(), &lin);
                weights[j][i] = w.scale(&rat_int(-1));
                weights[i][j] = w;
            }
        }
        Tau2k { k, y, kinds, scale, perms: signed_permutations(m), weights, cache: Mutex::new(HashMap::new()) }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn kinds(&self) -> &[PairKind] {
        &self.kinds
    }

    /// The ordered basis `y_1 … y_{2k}` as generator indices.
    pub fn basis(&self) -> &[usize] {
        &self.y
    }

    pub fn scale(&self) -> &Rational {
        &self.scale
    }

    /// `τ_{2k}` on a chain of degree `2k`.
    pub fn eval(&self, a: &HochschildChain) -> Result<HbarSeries> {
        if a.degree() != 2 * self.k {
            return Err(Error::ArityMismatch { expected: 2 * self.k + 1, got: a.degree() + 1 });
        }
        let mut acc = HbarSeries::zero();
        for (c, slots) in a.summands() {
            acc += &(c * &self.eval_tuple(slots)?);
        }
        Ok(acc)
    }

    /// `τ_{2k}(a_0 ⊗ … ⊗ a_{2k})`.
    pub fn eval_tuple(&self, slots: &[WeylElement]) -> Result<HbarSeries> {
        if slots.len() != 2 * self.k + 1 {
            return Err(Error::ArityMismatch { expected: 2 * self.k + 1, got: slots.len() });
        }
        for s in slots {
            if s.kinds() != self.kinds.as_slice() {
                return Err(Error::OutsideFixedAlgebra(format!("slot {s} is not in the {}-pair real Weyl algebra", self.k)));
            }
        }
        let expanded = HochschildChain::tuple(slots.to_vec()).expand();
        self.eval_monomials(expanded.iter())
    }

    /// `τ_{2k}` on a linear combination of monomial tuples.
    pub fn eval_monomials<'a>(
        &self,
        terms: impl Iterator<Item = (&'a Vec<Monomial>, &'a HbarSeries)>,
    ) -> Result<HbarSeries> {
        // apply π_{2k} on monomials, merging equal tuples
        let mut after_pi: HashMap<Vec<Monomial>, HbarSeries> = HashMap::new();
        for (ms, c) in terms {
            'perm: for (sign, perm) in &self.perms {
                let mut ms2 = ms.clone();
                let mut f = *sign;
                for s in 1..ms.len() {
                    let idx = self.y[perm[s - 1]];
                    if ms[s][idx] == 0 {
                        continue 'perm;
                    }
                    f *= ms[s][idx] as i64;
                    ms2[s][idx] -= 1;
                }
                *after_pi.entry(ms2).or_default() += &c.scale(&CycloScalar::from_int(f));
            }
        }
        let mut acc = HbarSeries::zero();
        for (ms, c) in &after_pi {
            if c.is_zero() {
                continue;
            }
            let (h, v) = self.monomial_value(ms);
            if !v.is_zero() {
                acc += &c.shift(h).scale(&CycloScalar::from_rational(v));
            }
        }
        Ok(acc)
    }

    /// `μ ∫ ∏ exp(…)` on one monomial tuple (after `π`): the ħ-power and the
    /// rational coefficient.
    fn monomial_value(&self, ms: &[Monomial]) -> (i32, Rational) {
        if let Some(v) = self.cache.lock().unwrap().get(ms) {
            return v.clone();
        }
        let v = self.compute_monomial_value(ms);
        self.cache.lock().unwrap().insert(ms.to_vec(), v.clone());
        v
    }

    fn compute_monomial_value(&self, ms: &[Monomial]) -> (i32, Rational) {
        let n = self.k;
        let m = 2 * n;
        let mut poly = UPoly::constant(m, Rational::one());
        let mut hpow = 0i32;
        for l in 0..n {
            let a: Vec<u32> = ms.iter().map(|x| x[l]).collect();
            let b: Vec<u32> = ms.iter().map(|x| x[n + l]).collect();
            let total: u32 = a.iter().sum();
            if total != b.iter().sum::<u32>() {
                return (0, Rational::zero());
            }
            hpow += total as i32;
            let pl = self.matching_sum(&a, &b);
            if pl.is_zero() {
                return (0, Rational::zero());
            }
            poly = poly.mul(&pl);
        }
        (hpow, poly.integrate_ordered_simplex())
    }

    /// `Σ_K ∏_i a_i! ∏_j b_j! / ∏ K_ij! · ∏ M_ij^{K_ij}` over nonnegative
    /// integer matrices with row sums `a`, column sums `b` and zero diagonal.
    fn matching_sum(&self, a: &[u32], b: &[u32]) -> UPoly {
        let m = 2 * self.k;
        let slots = a.len();
        let mut pref = Rational::one();
        for &x in a.iter().chain(b) {
            pref *= factorial(x);
        }
        let mut out = UPoly::zero(m);
        let mut cols = b.to_vec();
        self.matching_rec(0, 0, a[0], a, &mut cols, UPoly::constant(m, Rational::one()), &mut out, slots);
        out.scale(&pref)
    }

    #[allow(clippy::too_many_arguments)]
    fn matching_rec(
        &self,
        i: usize,
        j: usize,
        row_left: u32,
        a: &[u32],
        cols: &mut Vec<u32>,
        acc: UPoly,
        out: &mut UPoly,
        slots: usize,
    ) {
        if i == slots {
            if cols.iter().all(|&c| c == 0) {
                *out = out.add(&acc);
            }
            return;
        }
        if j == slots {
            if row_left == 0 {
                let next_row = if i + 1 < slots { a[i + 1] } else { 0 };
                self.matching_rec(i + 1, 0, next_row, a, cols, acc, out, slots);
            }
            return;
        }
        let max = if i == j { 0 } else { row_left.min(cols[j]) };
        for kij in 0..=max {
            let term = if kij == 0 {
                acc.clone()
            } else {
                acc.mul(&self.weights[i][j].pow(kij)).scale(&(Rational::one() / factorial(kij)))
            };
            cols[j] -= kij;
            self.matching_rec(i, j + 1, row_left - kij, a, cols, term, out, slots);
            cols[j] += kij;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::slots::tau_2k_literal;
    use crate::homology::{boundary_twisted, cycle_c2k};
    use crate::scalar::rat;
    use crate::symplectic::SymplecticMap;
    use rand::SeedableRng;

    #[test]
    fn normalization_on_c2() {
        let tau = Tau2k::new(1);
        let c = cycle_c2k(tau.kinds(), &[0]);
        assert!(tau.eval(&c).unwrap().is_one());
    }

    #[test]
    fn vanishes_with_unit_slot() {
        let tau = Tau2k::new(1);
        let k = tau.kinds().to_vec();
        let a = &WeylElement::x(&k, 1).pow_commutative(2) + &WeylElement::y(&k, 1);
        let one = WeylElement::one(&k);
        assert!(tau.eval_tuple(&[one.clone(), one, a]).unwrap().is_zero());
    }

    #[test]
    fn fast_path_matches_literal_formula() {
        let tau = Tau2k::new(1);
        let k = tau.kinds().to_vec();
        let p = WeylElement::x(&k, 1);
        let q = WeylElement::y(&k, 1);
        let slots = vec![
            &p.mul_commutative(&q) + &WeylElement::one(&k),
            &p.pow_commutative(2) + &q,
            q.pow_commutative(2).mul_commutative(&p),
        ];
        let fast = tau.eval_tuple(&slots).unwrap();
        let slow = tau_2k_literal(&HochschildChain::tuple(slots), tau.basis()).unwrap();
        assert_eq!(fast, slow);
    }

    #[test]
    fn rejects_foreign_slots() {
        let tau = Tau2k::new(1);
        let k2 = vec![PairKind::Real; 2];
        let one = WeylElement::one(&k2);
        assert!(matches!(tau.eval_tuple(&[one.clone(), one.clone(), one]), Err(Error::OutsideFixedAlgebra(_))));
    }

    #[test]
    fn only_the_matching_normalization_is_a_cocycle() {
        let id = SymplecticMap::identity(1);
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let kinds = vec![PairKind::Real];
        let chains: Vec<_> = (0..10)
            .map(|_| {
                let slots = (0..4).map(|_| crate::sample::weyl(&mut rng, &kinds, 3, 3, 1, false)).collect();
                boundary_twisted(&HochschildChain::tuple(slots), &id).unwrap()
            })
            .collect();
        let good = Tau2k::new(1);
        assert!(chains.iter().all(|c| good.eval(c).unwrap().is_zero()));
        let halved = Tau2k::with_scale(1, rat(1, 2));
        assert!(chains.iter().any(|c| !halved.eval(c).unwrap().is_zero()));
    }
}
