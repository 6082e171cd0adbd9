//! The projection `pr: gl_N(𝕎) → 𝔥`, its curvature `C`, the Chern–Weil map
//! `χ` and the generating function `S(X) = Â_ħ(X_1) Ch_γ(X_2) Ch(X_3)` whose
//! Taylor coefficients are the invariant polynomials of local Riemann–Roch.
//!
//! Here `𝔥 = sp_{2k} ⊕ sp^γ ⊕ gl_N` sits in `gl_N(𝕎)` as
//! `1_N ⊗ (fixed quadratic + γ-invariant normal quadratic) + M ⊗ 1`.

use crate::cocycle::trace::{tr_gamma, TwistedTraceData};
use crate::error::{Error, Result};
use crate::homology::signed_permutations;
use crate::linalg::Matrix;
use crate::scalar::{rat, rat_int, CycloScalar, HbarSeries, Rational, TruncSeries};
use crate::weyl::{PairKind, WeylElement};

use super::matrix::MatrixWeyl;

/// `pr(M ⊗ a) = (1/N) tr(M) a_2 + M a_0`, extended linearly.
pub fn projection_pr(x: &MatrixWeyl) -> MatrixWeyl {
    let n = x.size();
    let mut quad = WeylElement::zero(x.kinds());
    for i in 0..n {
        quad = &quad + &x.get(i, i).homogeneous_part(2);
    }
    let quad = quad.scale(&HbarSeries::rational(rat(1, n as i64)));
    let mut out = x.homogeneous_part(0);
    for i in 0..n {
        let e = out.get(i, i) + &quad;
        out.set(i, i, e);
    }
    out
}

/// `C(u ∧ v) = [pr u, pr v]_ħ − pr([u, v]_ħ)`.
pub fn curvature_c(u: &MatrixWeyl, v: &MatrixWeyl) -> Result<MatrixWeyl> {
    let a = projection_pr(u).bracket(&projection_pr(v))?;
    a.sub(&projection_pr(&u.bracket(v)?))
}

/// `χ(P)(v_1 ∧ … ∧ v_{2q}) = (1/q!) Σ sgn(σ) P(C(v_{σ1}, v_{σ2}), …)` over
/// permutations with `σ(2i−1) < σ(2i)`.
pub fn chern_weil_chi(
    p: &dyn Fn(&[MatrixWeyl]) -> Result<HbarSeries>,
    args: &[MatrixWeyl],
) -> Result<HbarSeries> {
    if args.len() % 2 != 0 {
        return Err(Error::ArityMismatch { expected: args.len() + 1, got: args.len() });
    }
    let q = args.len() / 2;
    let mut curv = vec![vec![None; args.len()]; args.len()];
    let mut acc = HbarSeries::zero();
    for (sign, perm) in signed_permutations(args.len()) {
        if (0..q).any(|i| perm[2 * i] > perm[2 * i + 1]) {
            continue;
        }
        let mut cs = Vec::with_capacity(q);
        for i in 0..q {
            let (a, b) = (perm[2 * i], perm[2 * i + 1]);
            if curv[a][b].is_none() {
                curv[a][b] = Some(curvature_c(&args[a], &args[b])?);
            }
            cs.push(curv[a][b].clone().unwrap());
        }
        let v = p(&cs)?;
        acc += &v.scale(&CycloScalar::from_int(sign));
    }
    let qf: i64 = (1..=q as i64).product();
    Ok(acc.scale(&CycloScalar::from_rational(rat(1, qf))))
}

/// An element of the Cartan subalgebra
/// `Σ ν_i q_i p_i + Σ τ_j z_j z̄_j + Σ σ_r E_r`.
#[derive(Clone, Debug, PartialEq)]
pub struct CartanElement {
    pub nu: Vec<CycloScalar>,
    pub tau: Vec<CycloScalar>,
    pub sigma: Vec<CycloScalar>,
}

impl CartanElement {
    pub fn zero(k: usize, normal: usize, size: usize) -> Self {
        CartanElement {
            nu: vec![CycloScalar::zero(); k],
            tau: vec![CycloScalar::zero(); normal],
            sigma: vec![CycloScalar::zero(); size],
        }
    }

    /// The element of `gl_N(𝕎)` it stands for.
    pub fn to_matrix_weyl(&self) -> MatrixWeyl {
        let k = self.nu.len();
        let r = self.tau.len();
        let n = k + r;
        let mut kinds = vec![PairKind::Real; k];
        kinds.extend(std::iter::repeat(PairKind::Complex).take(r));
        let mut quad = WeylElement::zero(&kinds);
        for (i, c) in self.nu.iter().enumerate() {
            let mut m = vec![0; 2 * n];
            m[i] = 1;
            m[n + i] = 1;
            quad.add_term(m, &HbarSeries::scalar(c.clone()));
        }
        for (j, c) in self.tau.iter().enumerate() {
            let mut m = vec![0; 2 * n];
            m[k + j] = 1;
            m[n + k + j] = 1;
            quad.add_term(m, &HbarSeries::scalar(c.clone()));
        }
        let mut out = MatrixWeyl::scalar(&quad, self.sigma.len());
        for (r, c) in self.sigma.iter().enumerate() {
            let e = out.get(r, r) + &WeylElement::constant(&kinds, HbarSeries::scalar(c.clone()));
            out.set(r, r, e);
        }
        out
    }
}

/// The three components of an element of `𝔥`.
#[derive(Clone, Debug)]
pub struct HComponents {
    /// `X_1 ∈ sp_{2k}` as the matrix of `[X_1, ·]_ħ` on `(p_1 … p_k, q_1 … q_k)`.
    pub x1: Matrix,
    /// `X_2`, a quadratic on the normal pairs.
    pub x2: WeylElement,
    /// `X_3 ∈ gl_N`.
    pub x3: Matrix,
}

impl HComponents {
    /// Splits `x` into its components; rejects elements outside `𝔥`.
    pub fn of(x: &MatrixWeyl, k: usize) -> Result<Self> {
        let kinds = x.kinds();
        let n = kinds.len();
        let size = x.size();
        let reject = |why: &str| Error::NotInSubalgebra(format!("{x}: {why}"));
        for i in 0..size {
            for j in 0..size {
                let e = x.get(i, j);
                if e.terms().any(|(m, _)| {
                    let d: u32 = m.iter().sum();
                    d != 0 && d != 2
                }) {
                    return Err(reject("entries must have degrees 0 and 2 only"));
                }
                let q = e.homogeneous_part(2);
                if i != j && !q.is_zero() {
                    return Err(reject("quadratic part is not a scalar matrix"));
                }
                if i == j && q != x.get(0, 0).homogeneous_part(2) {
                    return Err(reject("quadratic part is not a scalar matrix"));
                }
            }
        }
        let x3 = x.constant_matrix().ok_or_else(|| reject("ħ-dependent constant part"))?;
        let quad = x.get(0, 0).homogeneous_part(2);
        let fixed_pairs: Vec<usize> = (0..k).collect();
        let normal_pairs: Vec<usize> = (k..n).collect();
        let mut fixed = WeylElement::zero(kinds);
        let mut normal = WeylElement::zero(kinds);
        for (m, c) in quad.terms() {
            let f: u32 = (0..k).map(|j| m[j] + m[n + j]).sum();
            match f {
                2 => fixed.add_term(m.clone(), c),
                0 => normal.add_term(m.clone(), c),
                _ => return Err(reject("mixes fixed and normal directions")),
            }
        }
        let fixed = fixed.restrict_to_pairs(&fixed_pairs).expect("fixed terms only");
        let x2 = normal.restrict_to_pairs(&normal_pairs).expect("normal terms only");
        let fk = vec![PairKind::Real; k];
        let mut x1 = Matrix::zeros(2 * k, 2 * k);
        for i in 0..2 * k {
            let y = WeylElement::generator(&fk, i);
            let d = fixed.commutator(&y)?.shift_hbar(-1).scale(&HbarSeries::rational(rat(1, 2)));
            for j in 0..2 * k {
                let mut mono = vec![0; 2 * k];
                mono[j] = 1;
                let c = d.coeff(&mono).as_scalar().ok_or_else(|| reject("ħ-dependent quadratic"))?;
                x1.set(j, i, c);
            }
        }
        Ok(HComponents { x1, x2, x3 })
    }
}

/// `log(u / sinh u) = Σ_{j≥1} b_j u^{2j}`: the coefficients `b_1 … b_m`.
fn log_u_over_sinh(m: usize) -> Vec<Rational> {
    // sinh(u)/u = Σ u^{2j}/(2j+1)! as a series in v = u²
    let mut coeffs = Vec::with_capacity(m + 1);
    let mut fact = rat_int(1);
    for j in 0..=m {
        if j > 0 {
            fact *= rat_int(((2 * j) * (2 * j + 1)) as i64);
        }
        coeffs.push(HbarSeries::rational(rat_int(1) / fact.clone()));
    }
    let l = TruncSeries::from_coeffs(m, coeffs).log().expect("constant term 1");
    (1..=m).map(|j| -l.coeff(j).as_scalar().and_then(|c| c.to_rational()).unwrap_or_default()).collect()
}

/// Evaluator of `S(tX)` and of the invariant polynomials `P_q` it generates.
#[derive(Clone, Debug)]
pub struct GeneratingFunction {
    k: usize,
    data: TwistedTraceData,
    size: usize,
    twist: Option<Matrix>,
    ahat_scale: Rational,
}

impl GeneratingFunction {
    /// `S` for `k` fixed pairs, normal data `data` and `gl_N`.
    pub fn new(k: usize, data: TwistedTraceData, size: usize) -> Self {
        GeneratingFunction { k, data, size, twist: None, ahat_scale: rat(1, 1) }
    }

    /// Replaces `Ch(X_3) = tr exp X_3` by `Ch_V(X_3) = tr(γ_V exp X_3)`.
    pub fn with_representation(mut self, gamma_v: Matrix) -> Self {
        self.size = gamma_v.rows();
        self.twist = Some(gamma_v);
        self
    }

    /// `Â_ħ(X_1) = det(u/sinh u)^{1/2}` at `u = scale · ħ X_1`.
    pub fn ahat_scale(&self) -> &Rational {
        &self.ahat_scale
    }

    #[doc(hidden)]
    pub fn with_ahat_scale(mut self, s: Rational) -> Self {
        self.ahat_scale = s;
        self
    }

    /// `Â_ħ(tX_1) = exp(½ Σ_j b_j (sħt)^{2j} tr X_1^{2j})` up to `t^order`.
    pub fn ahat(&self, x1: &Matrix, order: usize) -> Result<TruncSeries> {
        let b = log_u_over_sinh(order / 2);
        let mut arg = TruncSeries::zero(order);
        let sq = x1.mul(x1);
        let mut pw = Matrix::identity(x1.rows());
        let mut coeffs = vec![HbarSeries::zero(); order + 1];
        for (j, bj) in b.iter().enumerate() {
            let e = 2 * (j + 1);
            pw = pw.mul(&sq);
            let s = num_traits::Pow::pow(&self.ahat_scale, e as u32);
            let c = &pw.trace() * &CycloScalar::from_rational(bj * &s * rat(1, 2));
            coeffs[e] = HbarSeries::monomial(c, e as i32);
        }
        if order > 0 {
            arg = TruncSeries::from_coeffs(order, coeffs);
        }
        arg.exp()
    }

    /// `Ch_γ(tX_2) = tr_γ(exp_⋆(tX_2))` up to `t^order`.
    pub fn ch_gamma(&self, x2: &WeylElement, order: usize) -> Result<TruncSeries> {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut pw = WeylElement::one(x2.kinds());
        let mut fact = rat_int(1);
        for m in 0..=order {
            if m > 0 {
                pw = pw.star(x2)?;
                fact *= rat_int(m as i64);
            }
            let tr = tr_gamma(&self.data, &pw)?;
            coeffs.push(tr.scale(&CycloScalar::from_rational(rat_int(1) / fact.clone())));
        }
        Ok(TruncSeries::from_coeffs(order, coeffs))
    }

    /// `Ch(tX_3) = tr(γ_V exp(tX_3))` up to `t^order`.
    pub fn ch(&self, x3: &Matrix, order: usize) -> TruncSeries {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut pw = match &self.twist {
            Some(g) => g.clone(),
            None => Matrix::identity(x3.rows()),
        };
        let mut fact = rat_int(1);
        for m in 0..=order {
            if m > 0 {
                pw = pw.mul(x3);
                fact *= rat_int(m as i64);
            }
            coeffs.push(HbarSeries::scalar(&pw.trace() * &CycloScalar::from_rational(rat_int(1) / fact.clone())));
        }
        TruncSeries::from_coeffs(order, coeffs)
    }

    /// `S(tX)` up to `t^order`.
    pub fn series(&self, x: &MatrixWeyl, order: usize) -> Result<TruncSeries> {
        if x.size() != self.size {
            return Err(Error::DimensionMismatch(format!("{}x{} element for N = {}", x.size(), x.size(), self.size)));
        }
        let h = HComponents::of(x, self.k)?;
        Ok(&(&self.ahat(&h.x1, order)? * &self.ch_gamma(&h.x2, order)?) * &self.ch(&h.x3, order))
    }

    /// `S(tX)` on a Cartan element.
    pub fn series_cartan(&self, x: &CartanElement, order: usize) -> Result<TruncSeries> {
        self.series(&x.to_matrix_weyl(), order)
    }

    /// The polarized invariant polynomial `P_q(X_1, …, X_q)`, where
    /// `P_q(X, …, X) = q! · [t^q] S(tX)`.
    pub fn polynomial(&self, args: &[MatrixWeyl]) -> Result<HbarSeries> {
        let q = args.len();
        if q == 0 {
            return Ok(self.series(&MatrixWeyl::zero(&self.kinds(), self.size), 0)?.coeff(0).clone());
        }
        let mut acc = HbarSeries::zero();
        for mask in 1u32..(1 << q) {
            let mut xs = args[0].scale(&HbarSeries::zero());
            for (i, a) in args.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    xs = xs.add(a)?;
                }
            }
            let c = self.series(&xs, q)?.coeff(q).clone();
            if (q - mask.count_ones() as usize) % 2 == 0 {
                acc += &c;
            } else {
                acc -= &c;
            }
        }
        Ok(acc)
    }

    /// Shape of the ambient Weyl algebra.
    pub fn kinds(&self) -> Vec<PairKind> {
        let mut kinds = vec![PairKind::Real; self.k];
        kinds.extend(self.data.kinds());
        kinds
    }
}

/// `S(tX)` up to `t^order` for a Cartan element with normal data `data`.
pub fn generating_s(x: &CartanElement, data: &TwistedTraceData, order: usize) -> Result<TruncSeries> {
    GeneratingFunction::new(x.nu.len(), data.clone(), x.sigma.len()).series_cartan(x, order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minus_one() -> TwistedTraceData {
        TwistedTraceData::from_roots(&[(2, 1)]).unwrap()
    }

    #[test]
    fn log_series_coefficients() {
        assert_eq!(log_u_over_sinh(2), vec![rat(-1, 6), rat(1, 180)]);
    }

    #[test]
    fn s_at_zero_is_rank_times_normalizer() {
        let x = CartanElement::zero(1, 1, 2);
        let s = generating_s(&x, &minus_one(), 2).unwrap();
        assert_eq!(s.coeff(0), &HbarSeries::int(1));
        assert!(s.coeff(1).is_zero() && s.coeff(2).is_zero());
    }

    #[test]
    fn sigma_block_first_order() {
        let mut x = CartanElement::zero(1, 1, 1);
        x.sigma[0] = CycloScalar::from_int(3);
        let s = generating_s(&x, &minus_one(), 1).unwrap();
        // N + σ, times tr_γ(1) = 1/2
        assert_eq!(s.coeff(0), &HbarSeries::rational(rat(1, 2)));
        assert_eq!(s.coeff(1), &HbarSeries::rational(rat(3, 2)));
    }

    #[test]
    fn projection_examples() {
        let k = vec![PairKind::Real];
        let q = MatrixWeyl::elementary(&WeylElement::y(&k, 1), 2, 0, 1);
        assert!(projection_pr(&q).is_zero());
        let pq = WeylElement::x(&k, 1).mul_commutative(&WeylElement::y(&k, 1));
        let x = MatrixWeyl::scalar(&pq, 2);
        assert_eq!(projection_pr(&x), x);
        assert_eq!(projection_pr(&projection_pr(&x)), projection_pr(&x));
    }

    #[test]
    fn h_components_reject_non_members() {
        let k = vec![PairKind::Real];
        let x = MatrixWeyl::scalar(&WeylElement::x(&k, 1), 1);
        assert!(matches!(HComponents::of(&x, 1), Err(Error::NotInSubalgebra(_))));
    }

    #[test]
    fn ahat_single_block() {
        // X_1 = ν q p acts with eigenvalues ±ν, so det(u/sinh u)^{1/2} at
        // u = ħX_1 is u/sinh u = 1 − (ħν)²/6 + …
        let kinds = vec![PairKind::Real];
        let nu = CycloScalar::from_int(3);
        let pq = WeylElement::x(&kinds, 1).mul_commutative(&WeylElement::y(&kinds, 1));
        let x = MatrixWeyl::scalar(&pq.scale(&HbarSeries::scalar(nu)), 1);
        let h = HComponents::of(&x, 1).unwrap();
        let gf = GeneratingFunction::new(1, TwistedTraceData::from_roots(&[]).unwrap(), 1);
        let a = gf.ahat(&h.x1, 4).unwrap();
        assert_eq!(a.coeff(2), &HbarSeries::monomial(CycloScalar::from_rational(rat(-3, 2)), 2));
        // 7u⁴/360 at u = 3ħ
        assert_eq!(a.coeff(4), &HbarSeries::monomial(CycloScalar::from_rational(rat(7 * 81, 360)), 4));
    }
}
