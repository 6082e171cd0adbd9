//! The twisted cocycle `τ^γ_{2k}` on `𝕎_{2n} = 𝕎_{2k} ⊗ 𝕎^⊥`: `τ_{2k}` on the
//! fixed factors times `tr_γ` of the star product of the normal factors.
//!
//! The ambient algebra has the `k` fixed pairs first, in real coordinates,
//! followed by the normal pairs in complex coordinates on which `γ` acts by
//! `z_j ↦ λ_j z_j`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::homology::{boundary_twisted, cycle_c2k, HochschildChain};
use crate::scalar::{CycloScalar, HbarSeries};
use crate::symplectic::SymplecticMap;
use crate::weyl::{Monomial, PairKind, WeylElement};

use super::tau::Tau2k;
use super::trace::TwistedTraceData;

/// `τ^γ_{2k}` for a fixed `k` and normal eigenvalue data.
pub struct TwistedCocycle {
    tau: Tau2k,
    data: TwistedTraceData,
    kinds: Vec<PairKind>,
    gamma: SymplecticMap,
}

impl TwistedCocycle {
    pub fn new(k: usize, data: TwistedTraceData) -> Result<Self> {
        let mut blocks = vec![(1, 0); k];
        blocks.extend(data.root_blocks()?);
        let gamma = SymplecticMap::rotation(&blocks);
        let mut kinds = vec![PairKind::Real; k];
        kinds.extend(data.kinds());
        Ok(TwistedCocycle { tau: Tau2k::new(k), data, kinds, gamma })
    }

    pub fn k(&self) -> usize {
        self.tau.k()
    }

    /// Shape of the ambient Weyl algebra.
    pub fn kinds(&self) -> &[PairKind] {
        &self.kinds
    }

    /// `γ` on the ambient algebra.
    pub fn gamma(&self) -> &SymplecticMap {
        &self.gamma
    }

    pub fn trace_data(&self) -> &TwistedTraceData {
        &self.data
    }

    pub fn untwisted(&self) -> &Tau2k {
        &self.tau
    }

    /// The cycle `c_{2k}` on the fixed pairs, as a chain of the ambient
    /// algebra.
    pub fn cycle(&self) -> HochschildChain {
        let pairs: Vec<usize> = (0..self.k()).collect();
        cycle_c2k(&self.kinds, &pairs)
    }

    fn split(&self, m: &Monomial) -> (Monomial, Monomial) {
        let n = self.kinds.len();
        let k = self.k();
        let fixed = m[..k].iter().chain(&m[n..n + k]).copied().collect();
        let normal = m[k..n].iter().chain(&m[n + k..]).copied().collect();
        (fixed, normal)
    }

    /// `τ^γ_{2k}` on a chain of degree `2k`.
    pub fn eval(&self, a: &HochschildChain) -> Result<HbarSeries> {
        let arity = 2 * self.k() + 1;
        if a.degree() + 1 != arity {
            return Err(Error::ArityMismatch { expected: arity, got: a.degree() + 1 });
        }
        for (_, slots) in a.summands() {
            if let Some(s) = slots.iter().find(|s| s.kinds() != self.kinds.as_slice()) {
                return Err(Error::BasisMismatch(format!("slot {s} does not live on {:?}", self.kinds)));
            }
        }
        // group monomial tuples by their normal part
        let mut groups: HashMap<Vec<Monomial>, HashMap<Vec<Monomial>, HbarSeries>> = HashMap::new();
        for (ms, c) in a.expand() {
            let (fixed, normal): (Vec<_>, Vec<_>) = ms.iter().map(|m| self.split(m)).unzip();
            *groups.entry(normal).or_default().entry(fixed).or_default() += &c;
        }
        let nk = self.data.kinds();
        let mut acc = HbarSeries::zero();
        for (normal, fixed) in groups {
            let mut prod = WeylElement::one(&nk);
            for m in normal {
                prod = prod.star(&WeylElement::term(&nk, m, HbarSeries::one()))?;
            }
            let tr = super::trace::tr_gamma(&self.data, &prod)?;
            if tr.is_zero() {
                continue;
            }
            let t = self.tau.eval_monomials(fixed.iter())?;
            acc += &(&t * &tr);
        }
        Ok(acc)
    }

    /// `τ^γ_{2k}` on a single tuple.
    pub fn eval_tuple(&self, slots: &[WeylElement]) -> Result<HbarSeries> {
        self.eval(&HochschildChain::tuple(slots.to_vec()))
    }

    /// `(b_γ τ^γ)(a_0 ⊗ … ⊗ a_{2k+1}) = τ^γ(b_γ(a))`.
    pub fn coboundary(&self, slots: &[WeylElement]) -> Result<HbarSeries> {
        let arity = 2 * self.k() + 2;
        if slots.len() != arity {
            return Err(Error::ArityMismatch { expected: arity, got: slots.len() });
        }
        self.eval(&boundary_twisted(&HochschildChain::tuple(slots.to_vec()), &self.gamma)?)
    }

    /// `Σ_i τ^γ(a_0 ⊗ … ⊗ [h, a_i] ⊗ … ⊗ a_{2k})`.
    pub fn invariance_defect(&self, h: &WeylElement, slots: &[WeylElement]) -> Result<HbarSeries> {
        let mut c = HochschildChain::zero(slots.len() - 1);
        for i in 0..slots.len() {
            let mut t = slots.to_vec();
            t[i] = h.commutator(&slots[i])?;
            c.push(HbarSeries::one(), t);
        }
        self.eval(&c)
    }

    /// `Σ_{i=1}^{2k} (−1)^i τ^γ(a_0 ⊗ … ⊗ a_{i−1} ⊗ h ⊗ a_i ⊗ … ⊗ a_{2k−1})`.
    pub fn insertion_sum(&self, h: &WeylElement, slots: &[WeylElement]) -> Result<HbarSeries> {
        let m = 2 * self.k();
        if slots.len() != m {
            return Err(Error::ArityMismatch { expected: m, got: slots.len() });
        }
        let mut c = HochschildChain::zero(m);
        for i in 1..=m {
            let mut t = slots[..i].to_vec();
            t.push(h.clone());
            t.extend_from_slice(&slots[i..]);
            let s = if i % 2 == 0 { HbarSeries::one() } else { -HbarSeries::one() };
            c.push(s, t);
        }
        self.eval(&c)
    }

    /// A spanning set of `𝔥 = sp_{2k} ⊕ sp^γ`: all quadratics in the fixed
    /// generators, and `z_i z̄_j` for normal pairs with `λ_i = λ_j`, plus
    /// `z_i z_j` / `z̄_i z̄_j` when `λ_i λ_j = 1`.
    pub fn h_basis(&self) -> Vec<WeylElement> {
        let n = self.kinds.len();
        let k = self.k();
        let mono = |a: usize, b: usize| {
            let mut m = vec![0u32; 2 * n];
            m[a] += 1;
            m[b] += 1;
            WeylElement::term(&self.kinds, m, HbarSeries::one())
        };
        let fixed: Vec<usize> = (0..k).chain(n..n + k).collect();
        let mut out = Vec::new();
        for (i, &a) in fixed.iter().enumerate() {
            for &b in &fixed[i..] {
                out.push(mono(a, b));
            }
        }
        let lam = self.data.eigenvalues();
        let one = CycloScalar::one();
        for i in 0..n - k {
            for j in 0..n - k {
                if lam[i] == lam[j] {
                    out.push(mono(k + i, n + k + j));
                }
                if j >= i && &lam[i] * &lam[j] == one {
                    out.push(mono(k + i, k + j));
                    out.push(mono(n + k + i, n + k + j));
                }
            }
        }
        out
    }
}
