//! The γ-twisted trace on the Weyl algebra of the normal directions.
//!
//! In complex coordinates `z_j = q_j + i p_j` on which `γ` acts diagonally by
//! `z_j ↦ λ_j z_j`, the trace is
//! `tr_γ(a) = ∏_j (1 − λ̄_j)⁻¹ · μ(exp(−2iħ Σ_j κ_j ∂_{z_j} ∂_{z̄_j}) a)` with
//! `κ_j = (1 + λ̄_j)/(1 − λ̄_j)`. On a monomial this is nonzero only when
//! `z`- and `z̄`-exponents agree pairwise:
//! `tr_γ(z^a z̄^a) = ∏(1 − λ̄_j)⁻¹ ∏_j (−2iħκ_j)^{a_j} a_j!`.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{rat, CycloScalar, HbarSeries};
use crate::symplectic::{cayley_entry, root_exponent, AdaptedForm, SymplecticMap};
use crate::weyl::{PairKind, WeylElement};

/// Eigenvalue data of `γ` on the normal space with the derived constants of
/// the trace formula.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedTraceData {
    eigenvalues: Vec<CycloScalar>,
    kappa: Vec<CycloScalar>,
    normalizer: CycloScalar,
}

impl TwistedTraceData {
    /// Rejects eigenvalue 1.
    pub fn from_eigenvalues(eigenvalues: Vec<CycloScalar>) -> Result<Self> {
        let kappa = eigenvalues.iter().map(cayley_entry).collect::<Result<Vec<_>>>()?;
        let mut det = CycloScalar::one();
        for l in &eigenvalues {
            det *= &(&CycloScalar::one() - &l.conj());
        }
        let normalizer = det.inverse().map_err(|_| Error::EigenvalueOne)?;
        Ok(TwistedTraceData { eigenvalues, kappa, normalizer })
    }

    /// Normal data of a symplectic map.
    pub fn from_adapted(form: &AdaptedForm) -> Result<Self> {
        Self::from_eigenvalues(form.normal_eigenvalues.clone())
    }

    /// `λ_j = ζ_{m_j}^{e_j}` from `(m_j, e_j)` pairs.
    pub fn from_roots(roots: &[(u32, i64)]) -> Result<Self> {
        Self::from_eigenvalues(roots.iter().map(|&(m, e)| CycloScalar::root(m, e)).collect())
    }

    pub fn eigenvalues(&self) -> &[CycloScalar] {
        &self.eigenvalues
    }

    pub fn cayley_diagonal(&self) -> &[CycloScalar] {
        &self.kappa
    }

    /// `det⁻¹(1 − γ⁻¹)` on the normal space.
    pub fn normalizer(&self) -> &CycloScalar {
        &self.normalizer
    }

    /// Number of normal pairs.
    pub fn rank(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `(m_j, e_j)` with `λ_j = ζ_{m_j}^{e_j}`.
    pub fn root_blocks(&self) -> Result<Vec<(u32, i64)>> {
        self.eigenvalues
            .iter()
            .map(|l| root_exponent(l).ok_or_else(|| Error::Unsupported(format!("{l} is not a root of unity"))))
            .collect()
    }

    /// `γ` on the normal pairs as a block rotation `z_j ↦ λ_j z_j`.
    pub fn normal_map(&self) -> Result<SymplecticMap> {
        Ok(SymplecticMap::rotation(&self.root_blocks()?))
    }

    /// The Weyl-algebra shape on which [`tr_gamma`] is defined.
    pub fn kinds(&self) -> Vec<PairKind> {
        vec![PairKind::Complex; self.rank()]
    }

    /// `tr_γ` of a single monomial `z^a z̄^b` (exponents per pair).
    pub fn monomial_trace(&self, z: &[u32], zb: &[u32]) -> HbarSeries {
        if z != zb {
            return HbarSeries::zero();
        }
        // −2i
        let s = &CycloScalar::i() * &CycloScalar::from_int(-2);
        let mut c = self.normalizer.clone();
        let mut power = 0i32;
        for (j, &a) in z.iter().enumerate() {
            let f = &s * &self.kappa[j];
            for t in 1..=a {
                c = &(&c * &f) * &CycloScalar::from_int(t as i64);
            }
            power += a as i32;
        }
        HbarSeries::monomial(c, power)
    }
}

/// `tr_γ(a)` for `a` in complex coordinates on exactly the normal pairs.
pub fn tr_gamma(d: &TwistedTraceData, a: &WeylElement) -> Result<HbarSeries> {
    if a.kinds().iter().any(|&k| k == PairKind::Real) {
        return Err(Error::RealBasisInput);
    }
    if a.n() != d.rank() {
        return Err(Error::DimensionMismatch(format!("{} normal pairs, element on {}", d.rank(), a.n())));
    }
    let n = d.rank();
    let mut acc = HbarSeries::zero();
    for (m, c) in a.terms() {
        let t = d.monomial_trace(&m[..n], &m[n..]);
        if !t.is_zero() {
            acc += &(c * &t);
        }
    }
    Ok(acc)
}

/// `tr_γ` for an arbitrary fixed-point-free `γ ∈ Sp_{2n}`, in any basis.
///
/// The trace is Gaussian: `tr_γ(a) = det⁻¹(1 − γ⁻¹) · (exp(ħ K^{ij} ∂_i ∂_j) a)(0)`
/// in real coordinates `ξ = (p, q)`, where the twisted-trace identity on
/// linear functions, `tr_γ(ξ_i ⋆ ξ_j) = tr_γ(γ(ξ_j) ⋆ ξ_i)`, forces
/// `2K = −π (1 + g)(1 − g)⁻¹` with `[ξ_i, ξ_j] = 2ħ π_{ij}`. On diagonal
/// rotations this agrees with [`tr_gamma`].
#[derive(Clone, Debug)]
pub struct MapTrace {
    map: SymplecticMap,
    normalizer: CycloScalar,
    form: Vec<(usize, usize, CycloScalar)>,
}

impl MapTrace {
    /// Rejects `γ` with eigenvalue 1.
    pub fn new(map: &SymplecticMap) -> Result<Self> {
        let n = map.n();
        let form = map.fixed_decomposition()?;
        if form.k > 0 {
            return Err(Error::EigenvalueOne);
        }
        let normalizer = TwistedTraceData::from_eigenvalues(form.normal_eigenvalues)?.normalizer;
        let mut pi = Matrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            pi.set(j, n + j, CycloScalar::one());
            pi.set(n + j, j, -CycloScalar::one());
        }
        let id = Matrix::identity(2 * n);
        let g = map.matrix();
        let den = id.sub(g).inverse().map_err(|_| Error::EigenvalueOne)?;
        let k = pi.mul(&id.add(g)).mul(&den).scale(&CycloScalar::from_rational(rat(-1, 2)));
        let mut entries = Vec::new();
        for i in 0..2 * n {
            for j in 0..2 * n {
                if !k.get(i, j).is_zero() {
                    entries.push((i, j, k.get(i, j).clone()));
                }
            }
        }
        Ok(MapTrace { map: map.clone(), normalizer, form: entries })
    }

    pub fn map(&self) -> &SymplecticMap {
        &self.map
    }

    /// `det⁻¹(1 − γ⁻¹)` over the holomorphic normal eigenvalues.
    pub fn normalizer(&self) -> &CycloScalar {
        &self.normalizer
    }

    pub fn eval(&self, a: &WeylElement) -> Result<HbarSeries> {
        if a.n() != self.map.n() {
            return Err(Error::DimensionMismatch(format!("trace on {} pairs applied to element on {}", self.map.n(), a.n())));
        }
        let complex: Vec<usize> = (0..a.n()).filter(|&j| a.kinds()[j] == PairKind::Complex).collect();
        let mut cur = a.to_real_basis(&complex)?;
        let mut acc = HbarSeries::zero();
        let mut m = 0i32;
        let mut fact = CycloScalar::one();
        while !cur.is_zero() {
            let c = cur.constant_term();
            if !c.is_zero() {
                acc += &c.shift(m).scale(&fact.inverse()?);
            }
            let mut next = WeylElement::zero(cur.kinds());
            for (i, j, kij) in &self.form {
                next = &next + &cur.derivative(*i).derivative(*j).scale_scalar(kij);
            }
            cur = next;
            m += 1;
            fact *= &CycloScalar::from_int(m as i64);
        }
        Ok(acc.scale(&self.normalizer))
    }
}

/// `tr_γ(a)` for a fixed-point-free symplectic map `γ`.
pub fn tr_gamma_map(g: &SymplecticMap, a: &WeylElement) -> Result<HbarSeries> {
    MapTrace::new(g)?.eval(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use rand::SeedableRng;

    fn z(n: usize, i: usize) -> WeylElement {
        WeylElement::x(&vec![PairKind::Complex; n], i)
    }

    fn zb(n: usize, i: usize) -> WeylElement {
        WeylElement::y(&vec![PairKind::Complex; n], i)
    }

    #[test]
    fn unit_and_quadratic_for_minus_one() {
        let d = TwistedTraceData::from_roots(&[(2, 1)]).unwrap();
        let one = WeylElement::one(&d.kinds());
        assert_eq!(tr_gamma(&d, &one).unwrap(), HbarSeries::rational(rat(1, 2)));
        assert!(tr_gamma(&d, &z(1, 1).mul_commutative(&zb(1, 1))).unwrap().is_zero());
    }

    #[test]
    fn generator_pair_identity() {
        for roots in [[(2, 1)], [(3, 1)], [(4, 1)], [(6, 5)]] {
            let d = TwistedTraceData::from_roots(&roots).unwrap();
            let g = d.normal_map().unwrap();
            let lhs = tr_gamma(&d, &(&z(1, 1) * &zb(1, 1))).unwrap();
            let rhs = tr_gamma(&d, &(&g.apply(&zb(1, 1)).unwrap() * &z(1, 1))).unwrap();
            assert_eq!(lhs, rhs, "λ = {:?}", roots);
        }
    }

    #[test]
    fn rotation_matches_eigenvalue_data() {
        let d = TwistedTraceData::from_roots(&[(3, 1), (4, 3)]).unwrap();
        let form = d.normal_map().unwrap().fixed_decomposition().unwrap();
        let from_map = TwistedTraceData::from_adapted(&form).unwrap();
        assert_eq!(from_map.rank(), 2);
        for l in d.eigenvalues() {
            assert!(from_map.eigenvalues().contains(l));
        }
        assert_eq!(from_map.normalizer(), d.normalizer());
    }

    #[test]
    fn random_pairs_satisfy_twisted_trace_identity() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let d = TwistedTraceData::from_roots(&[(3, 1), (2, 1)]).unwrap();
        let g = d.normal_map().unwrap();
        let kinds = d.kinds();
        for _ in 0..20 {
            let a = crate::sample::weyl(&mut rng, &kinds, 3, 3, 3, true);
            let b = crate::sample::weyl(&mut rng, &kinds, 3, 3, 3, true);
            let lhs = tr_gamma(&d, &(&a * &b)).unwrap();
            let rhs = tr_gamma(&d, &(&g.apply(&b).unwrap() * &a)).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn rejects_real_pairs_and_eigenvalue_one() {
        let d = TwistedTraceData::from_roots(&[(2, 1)]).unwrap();
        assert_eq!(tr_gamma(&d, &WeylElement::one(&[PairKind::Real])), Err(Error::RealBasisInput));
        assert_eq!(TwistedTraceData::from_roots(&[(1, 0)]), Err(Error::EigenvalueOne));
    }

    #[test]
    fn symmetric_in_eigenvalue_order() {
        let d1 = TwistedTraceData::from_roots(&[(3, 1), (4, 1)]).unwrap();
        let d2 = TwistedTraceData::from_roots(&[(4, 1), (3, 1)]).unwrap();
        let k = d1.kinds();
        let a = &WeylElement::x(&k, 1).mul_commutative(&WeylElement::y(&k, 1)).pow_commutative(2)
            + &WeylElement::x(&k, 2).mul_commutative(&WeylElement::y(&k, 2));
        // swap the two pairs
        let swapped = a.substitute(&[
            WeylElement::x(&k, 2),
            WeylElement::x(&k, 1),
            WeylElement::y(&k, 2),
            WeylElement::y(&k, 1),
        ]);
        assert_eq!(tr_gamma(&d1, &a).unwrap(), tr_gamma(&d2, &swapped).unwrap());
    }

    #[test]
    fn gaussian_form_matches_diagonal_formula() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(17);
        for roots in [vec![(2u32, 1i64)], vec![(3, 1)], vec![(4, 3)], vec![(3, 2), (6, 1)]] {
            let d = TwistedTraceData::from_roots(&roots).unwrap();
            let t = MapTrace::new(&d.normal_map().unwrap()).unwrap();
            assert_eq!(t.normalizer(), d.normalizer());
            let kinds = d.kinds();
            for _ in 0..10 {
                let a = crate::sample::weyl(&mut rng, &kinds, 4, 4, 3, true);
                assert_eq!(t.eval(&a).unwrap(), tr_gamma(&d, &a).unwrap(), "{a}");
            }
            let zz = WeylElement::x(&kinds, 1).mul_commutative(&WeylElement::y(&kinds, 1));
            assert_eq!(t.eval(&zz).unwrap(), tr_gamma(&d, &zz).unwrap());
        }
    }

    #[test]
    fn gaussian_form_on_a_non_diagonal_map() {
        // rotation by (i, ζ₃) conjugated by an order-6 element of SL_2(ℤ) on
        // the first pair, which is not orthogonal
        let mut rng = rand::rngs::StdRng::seed_from_u64(19);
        let base = SymplecticMap::rotation(&[(4, 1), (3, 1)]);
        let shear = SymplecticMap::new(Matrix::from_i64(&[
            &[1, 0, 1, 0],
            &[0, 1, 0, 0],
            &[-1, 0, 0, 0],
            &[0, 0, 0, 1],
        ]))
        .unwrap();
        let g = SymplecticMap::new(shear.matrix().mul(base.matrix()).mul(shear.inverse().matrix())).unwrap();
        assert!(g.matrix().get(2, 0) != &CycloScalar::zero() || g.matrix().get(3, 0) != &CycloScalar::zero());
        let t = MapTrace::new(&g).unwrap();
        let t0 = MapTrace::new(&base).unwrap();
        let kinds = vec![PairKind::Real; 2];
        let mut nonzero = 0;
        for _ in 0..10 {
            let a = crate::sample::weyl(&mut rng, &kinds, 3, 4, 1, false);
            let b = crate::sample::weyl(&mut rng, &kinds, 3, 4, 1, false);
            let lhs = t.eval(&(&a * &b)).unwrap();
            let rhs = t.eval(&(&g.apply(&b).unwrap() * &a)).unwrap();
            assert_eq!(lhs, rhs);
            nonzero += usize::from(!lhs.is_zero());
            // equivariance: tr_{hγh⁻¹}(h·a) = tr_γ(a)
            assert_eq!(t.eval(&shear.apply(&a).unwrap()).unwrap(), t0.eval(&a).unwrap());
        }
        assert!(nonzero > 3);
        assert_eq!(tr_gamma_map(&SymplecticMap::identity(1), &WeylElement::one(&[PairKind::Real])), Err(Error::EigenvalueOne));
    }
}
