//! Twisted Hochschild chains over the Weyl algebra and the twisted Koszul
//! complex of the underlying polynomial algebra.

use std::collections::{BTreeMap, HashMap};

use crate::error::Result;
use crate::linalg::Matrix;
use crate::scalar::{CycloScalar, HbarSeries};
use crate::symplectic::SymplecticMap;
use crate::weyl::{Monomial, PairKind, WeylElement};

/// A finite linear combination of `(p+1)`-tuples of Weyl elements.
#[derive(Clone, Debug, PartialEq)]
pub struct HochschildChain {
    degree: usize,
    summands: Vec<(HbarSeries, Vec<WeylElement>)>,
}

impl HochschildChain {
    pub fn zero(degree: usize) -> Self {
        HochschildChain { degree, summands: Vec::new() }
    }

    /// A single tuple with coefficient 1.
    pub fn tuple(slots: Vec<WeylElement>) -> Self {
        assert!(!slots.is_empty(), "a chain tuple has at least one slot");
        let mut c = HochschildChain::zero(slots.len() - 1);
        c.push(HbarSeries::one(), slots);
        c
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn summands(&self) -> &[(HbarSeries, Vec<WeylElement>)] {
        &self.summands
    }

    pub fn push(&mut self, c: HbarSeries, slots: Vec<WeylElement>) {
        assert_eq!(slots.len(), self.degree + 1, "tuple length must be degree + 1");
        if c.is_zero() || slots.iter().any(|s| s.is_zero()) {
            return;
        }
        self.summands.push((c, slots));
    }

    pub fn add(&mut self, other: &HochschildChain) {
        assert_eq!(self.degree, other.degree);
        for (c, t) in &other.summands {
            self.push(c.clone(), t.clone());
        }
    }

    pub fn scale(&self, c: &HbarSeries) -> Self {
        let mut out = HochschildChain::zero(self.degree);
        for (x, t) in &self.summands {
            out.push(x * c, t.clone());
        }
        out
    }

    /// True when the chain is zero as an element of the tensor power, checked
    /// by expanding every tuple into monomial tensors.
    pub fn is_zero(&self) -> bool {
        self.expand().is_empty()
    }

    /// True when the chain vanishes in the normalized complex, where tuples
    /// with a constant in any slot after the first are zero.
    pub fn is_zero_normalized(&self) -> bool {
        self.expand().keys().all(|ms| ms[1..].iter().any(|m| m.iter().all(|&e| e == 0)))
    }

    /// Fully multilinear expansion into monomial tuples.
    pub fn expand(&self) -> HashMap<Vec<Monomial>, HbarSeries> {
        let mut out: HashMap<Vec<Monomial>, HbarSeries> = HashMap::new();
        for (c, slots) in &self.summands {
            let mut partial: Vec<(Vec<Monomial>, HbarSeries)> = vec![(Vec::new(), c.clone())];
            for s in slots {
                let mut next = Vec::new();
                for (ms, x) in &partial {
                    for (m, y) in s.terms() {
                        let mut ms2 = ms.clone();
                        ms2.push(m.clone());
                        next.push((ms2, x * y));
                    }
                }
                partial = next;
            }
            for (ms, x) in partial {
                *out.entry(ms).or_default() += &x;
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }
}

/// The γ-twisted Hochschild boundary
/// `b_γ(a_0 ⊗ … ⊗ a_p) = Σ_{i<p} (−1)^i (… a_i ⋆ a_{i+1} …) + (−1)^p γ(a_p) ⋆ a_0 ⊗ a_1 ⊗ … ⊗ a_{p−1}`.
pub fn boundary_twisted(c: &HochschildChain, g: &SymplecticMap) -> Result<HochschildChain> {
    let p = c.degree;
    assert!(p >= 1, "boundary of a degree-0 chain");
    let mut out = HochschildChain::zero(p - 1);
    for (x, slots) in &c.summands {
        for i in 0..p {
            let mut t = Vec::with_capacity(p);
            t.extend_from_slice(&slots[..i]);
            t.push(slots[i].star(&slots[i + 1])?);
            t.extend_from_slice(&slots[i + 2..]);
            let sign = if i % 2 == 0 { x.clone() } else { -x };
            out.push(sign, t);
        }
        let mut t = Vec::with_capacity(p);
        t.push(g.apply(&slots[p])?.star(&slots[0])?);
        t.extend_from_slice(&slots[1..p]);
        let sign = if p % 2 == 0 { x.clone() } else { -x };
        out.push(sign, t);
    }
    Ok(out)
}

/// The ordered fixed-space basis `y_1 … y_{2k}`: the `p`'s of the fixed pairs
/// followed by their `q`'s.
pub fn fixed_basis_indices(kinds: &[PairKind], fixed_pairs: &[usize]) -> Vec<usize> {
    let n = kinds.len();
    fixed_pairs.iter().map(|&j| j).chain(fixed_pairs.iter().map(|&j| n + j)).collect()
}

/// All permutations of `0..m` with their signs, in lexicographic order.
pub fn signed_permutations(m: usize) -> Vec<(i64, Vec<usize>)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut perms = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; m], &mut perms);
    perms
        .into_iter()
        .map(|p| {
            let mut inv = 0;
            for i in 0..m {
                for j in i + 1..m {
                    if p[i] > p[j] {
                        inv += 1;
                    }
                }
            }
            (if inv % 2 == 0 { 1 } else { -1 }, p)
        })
        .collect()
}

/// `c_{2k} = Σ_σ sgn(σ) 1 ⊗ y_{σ(1)} ⊗ … ⊗ y_{σ(2k)}` over the fixed basis.
pub fn cycle_c2k(kinds: &[PairKind], fixed_pairs: &[usize]) -> HochschildChain {
    let basis = fixed_basis_indices(kinds, fixed_pairs);
    let m = basis.len();
    let mut c = HochschildChain::zero(m);
    for (sign, perm) in signed_permutations(m) {
        let mut slots = vec![WeylElement::one(kinds)];
        slots.extend(perm.iter().map(|&i| WeylElement::generator(kinds, basis[i])));
        c.push(HbarSeries::int(sign), slots);
    }
    c
}

/// All exponent vectors of total degree `d` in `vars` variables.
pub fn monomials_of_degree(vars: usize, d: u32) -> Vec<Monomial> {
    fn rec(i: usize, left: u32, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
    }
    if vars == 0 {
        return if d == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    rec(0, d, &mut vec![0; vars], &mut out);
    out
}

fn subsets(m: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, p, &mut Vec::new(), &mut out);
    out
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// One bidegree of the twisted Koszul complex: `C_{p,d} = S^{d−p}(V) ⊗ Λ^p(V)`.
#[derive(Clone, Debug)]
pub struct KoszulSlice {
    pub degree: usize,
    pub exterior: usize,
    /// `∂ : C_{p+1,d} → C_{p,d}`.
    pub incoming: Matrix,
    /// `∂ : C_{p,d} → C_{p−1,d}`.
    pub outgoing: Matrix,
}

impl KoszulSlice {
    pub fn dim(&self) -> usize {
        self.outgoing.cols()
    }

    pub fn homology_dim(&self) -> usize {
        self.dim() - self.outgoing.rank() - self.incoming.rank()
    }

    /// `∂ ∘ ∂ = 0` across this slice.
    pub fn composes_to_zero(&self) -> bool {
        self.outgoing.rows() == 0 || self.incoming.cols() == 0 || self.outgoing.mul(&self.incoming).is_zero()
    }
}

fn koszul_basis(vars: usize, p: usize, d: usize) -> Vec<(Monomial, Vec<usize>)> {
    if p > d || p > vars {
        return Vec::new();
    }
    let mut out = Vec::new();
    for m in monomials_of_degree(vars, (d - p) as u32) {
        for s in subsets(vars, p) {
            out.push((m.clone(), s));
        }
    }
    out
}

/// Matrix of `∂ : C_{p,d} → C_{p−1,d}` with
/// `∂(a ⊗ dy_I) = Σ_j (−1)^j (y_{i_j} − γ(y_{i_j})) a ⊗ dy_{I∖i_j}`.
fn koszul_differential(g: &SymplecticMap, p: usize, d: usize) -> Matrix {
    let vars = 2 * g.n();
    let src = koszul_basis(vars, p, d);
    let dst = if p == 0 { Vec::new() } else { koszul_basis(vars, p - 1, d) };
    let index: HashMap<&(Monomial, Vec<usize>), usize> = dst.iter().enumerate().map(|(i, b)| (b, i)).collect();
    let mut m = Matrix::zeros(dst.len(), src.len());
    if p == 0 {
        return m;
    }
    let mat = g.matrix();
    for (col, (mono, set)) in src.iter().enumerate() {
        for (j, &i) in set.iter().enumerate() {
            let rest: Vec<usize> = set.iter().copied().filter(|&x| x != i).collect();
            // y_i − γ(y_i) = y_i − Σ_l M_{li} y_l
            for l in 0..vars {
                let mut c = -mat.get(l, i);
                if l == i {
                    c += &CycloScalar::one();
                }
                if c.is_zero() {
                    continue;
                }
                if j % 2 == 1 {
                    c = -c;
                }
                let mut mono2 = mono.clone();
                mono2[l] += 1;
                let row = index[&(mono2, rest.clone())];
                let v = m.get(row, col) + &c;
                m.set(row, col, v);
            }
        }
    }
    m
}

/// The slice at exterior degree `p` and internal degree `d`.
pub fn koszul_slice(g: &SymplecticMap, p: usize, d: usize) -> KoszulSlice {
    KoszulSlice { degree: d, exterior: p, incoming: koszul_differential(g, p + 1, d), outgoing: koszul_differential(g, p, d) }
}

/// Homology dimensions of the γ-twisted Koszul complex for internal degrees
/// `d ≤ degree_bound`, keyed by `(exterior degree, internal degree)`.
pub fn koszul_twisted_hh(g: &SymplecticMap, degree_bound: usize) -> BTreeMap<(usize, usize), usize> {
    let vars = 2 * g.n();
    let mut out = BTreeMap::new();
    for d in 0..=degree_bound {
        for p in 0..=vars.min(d) {
            out.insert((p, d), koszul_slice(g, p, d).homology_dim());
        }
    }
    out
}

/// Dimension of `Ω^p` in internal degree `d` over a polynomial ring in `2k`
/// variables, in the same shape as [`koszul_twisted_hh`] for `n` pairs.
pub fn hkr_oracle(k: usize, n: usize, degree_bound: usize) -> BTreeMap<(usize, usize), usize> {
    let mut out = BTreeMap::new();
    for d in 0..=degree_bound {
        for p in 0..=(2 * n).min(d) {
            let v = if p <= 2 * k {
                // monomials of degree d − p in 2k variables
                let m = d - p;
                if k == 0 { usize::from(m == 0) } else { binomial(m + 2 * k - 1, 2 * k - 1) }
            } else {
                0
            };
            out.insert((p, d), binomial(2 * k, p) * v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c2_shape() {
        let kinds = [PairKind::Real];
        let c = cycle_c2k(&kinds, &[0]);
        assert_eq!(c.summands().len(), 2);
        assert_eq!(c.summands()[0].1[1].to_string(), "p1");
        assert_eq!(c.summands()[1].0, HbarSeries::int(-1));
        assert_eq!(cycle_c2k(&[PairKind::Real; 2], &[0, 1]).summands().len(), 24);
    }

    #[test]
    fn boundary_of_ones_vanishes() {
        let kinds = [PairKind::Real];
        let one = WeylElement::one(&kinds);
        let c = HochschildChain::tuple(vec![one.clone(), one]);
        let b = boundary_twisted(&c, &SymplecticMap::identity(1)).unwrap();
        assert!(b.is_zero());
    }

    #[test]
    fn c2_is_a_cycle() {
        let kinds = [PairKind::Real];
        let c = cycle_c2k(&kinds, &[0]);
        let b = boundary_twisted(&c, &SymplecticMap::identity(1)).unwrap();
        // b(c₂) = −1 ⊗ [p, q]: zero only in the normalized complex
        assert!(!b.is_zero());
        assert!(b.is_zero_normalized());
    }

    #[test]
    fn oracle_values() {
        let o = hkr_oracle(1, 1, 2);
        assert_eq!(o[&(1, 1)], 2);
        assert_eq!(o[&(2, 2)], 1);
        let o0 = hkr_oracle(0, 1, 2);
        assert_eq!(o0[&(0, 0)], 1);
        assert!(o0.iter().filter(|(k, _)| **k != (0, 0)).all(|(_, v)| *v == 0));
    }

    #[test]
    fn empty_complex() {
        let h = koszul_twisted_hh(&SymplecticMap::identity(0), 3);
        assert_eq!(h.get(&(0, 0)), Some(&1));
        assert!(h.iter().filter(|(k, _)| **k != (0, 0)).all(|(_, v)| *v == 0));
    }

    #[test]
    fn minus_one_concentrated_in_bottom_degree() {
        let g = SymplecticMap::minus_identity(1);
        assert_eq!(koszul_twisted_hh(&g, 3), hkr_oracle(0, 1, 3));
    }
}
