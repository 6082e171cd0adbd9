//! The map `φ_N` from Hochschild cochains to Lie-algebra cochains of
//! `gl_N(𝕎)`, the cocycles `Θ^{N,γ}_{2k} = φ_N(τ^γ_{2k})` and their
//! representation-twisted variant `Θ^{V,γ}_{2k}`.

use crate::cocycle::trace::TwistedTraceData;
use crate::cocycle::twisted::TwistedCocycle;
use crate::error::{Error, Result};
use crate::homology::{signed_permutations, HochschildChain};
use crate::linalg::Matrix;
use crate::scalar::HbarSeries;
use crate::symplectic::MAX_ORDER;
use crate::weyl::{PairKind, WeylElement};

use super::matrix::MatrixWeyl;

/// The cyclic matrix trace
/// `Σ (x_0)_{i_0 i_1} ⊗ (x_1)_{i_1 i_2} ⊗ … ⊗ (x_m)_{i_m i_0}`.
pub fn matrix_trace_chain(args: &[&MatrixWeyl]) -> HochschildChain {
    let m = args.len();
    let n = args[0].size();
    let mut out = HochschildChain::zero(m - 1);
    fn rec(args: &[&MatrixWeyl], pos: usize, start: usize, cur: usize, slots: &mut Vec<WeylElement>, out: &mut HochschildChain) {
        let n = args[0].size();
        if pos + 1 == args.len() {
            let e = args[pos].get(cur, start);
            if !e.is_zero() {
                slots.push(e.clone());
                out.push(HbarSeries::one(), slots.clone());
                slots.pop();
            }
            return;
        }
        for next in 0..n {
            let e = args[pos].get(cur, next);
            if e.is_zero() {
                continue;
            }
            slots.push(e.clone());
            rec(args, pos + 1, start, next, slots, out);
            slots.pop();
        }
    }
    for i0 in 0..n {
        rec(args, 0, i0, i0, &mut Vec::with_capacity(m), &mut out);
    }
    out
}

/// `φ_N(τ)(x_1 ∧ … ∧ x_m)(x_0) = Σ_σ sgn(σ) τ(tr(x_0 ⊗ x_{σ(1)} ⊗ … ⊗ x_{σ(m)}))`
/// with the cyclic matrix trace.
pub fn phi_n(
    tau: &dyn Fn(&HochschildChain) -> Result<HbarSeries>,
    args: &[MatrixWeyl],
    x0: &MatrixWeyl,
) -> Result<HbarSeries> {
    let m = args.len();
    let mut chain = HochschildChain::zero(m);
    for (sign, perm) in signed_permutations(m) {
        let mut list = vec![x0];
        list.extend(perm.iter().map(|&i| &args[i]));
        chain.add(&matrix_trace_chain(&list).scale(&HbarSeries::int(sign)));
    }
    tau(&chain)
}

/// `Θ^{N,γ}_{2k}`, optionally twisted by a representation matrix `γ_V`
/// (then `x_0` is replaced by `γ_V x_0`, giving `Θ^{V,γ}_{2k}`).
pub struct ThetaCocycle {
    cocycle: TwistedCocycle,
    size: usize,
    twist: Option<Matrix>,
}

impl ThetaCocycle {
    pub fn new(k: usize, data: TwistedTraceData, size: usize) -> Result<Self> {
        Ok(ThetaCocycle { cocycle: TwistedCocycle::new(k, data)?, size, twist: None })
    }

    /// `Θ^{V,γ}_{2k}` for a representation in which `γ` acts by `gamma_v`.
    pub fn with_representation(k: usize, data: TwistedTraceData, gamma_v: Matrix) -> Result<Self> {
        if !gamma_v.is_square() {
            return Err(Error::DimensionMismatch("representation matrix must be square".into()));
        }
        let mut acc = gamma_v.clone();
        let mut finite = false;
        for _ in 0..MAX_ORDER {
            if acc.is_identity() {
                finite = true;
                break;
            }
            acc = acc.mul(&gamma_v);
        }
        if !finite {
            return Err(Error::InfiniteOrder(MAX_ORDER));
        }
        Ok(ThetaCocycle { cocycle: TwistedCocycle::new(k, data)?, size: gamma_v.rows(), twist: Some(gamma_v) })
    }

    pub fn k(&self) -> usize {
        self.cocycle.k()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn kinds(&self) -> &[PairKind] {
        self.cocycle.kinds()
    }

    pub fn cocycle(&self) -> &TwistedCocycle {
        &self.cocycle
    }

    fn check(&self, x: &MatrixWeyl) -> Result<()> {
        if x.size() != self.size {
            return Err(Error::DimensionMismatch(format!("{}x{} argument for N = {}", x.size(), x.size(), self.size)));
        }
        if x.kinds() != self.kinds() {
            return Err(Error::BasisMismatch(format!("{:?} vs {:?}", x.kinds(), self.kinds())));
        }
        Ok(())
    }

    /// `Θ(x_1 ∧ … ∧ x_{2k})(x_0)`.
    pub fn eval(&self, args: &[MatrixWeyl], x0: &MatrixWeyl) -> Result<HbarSeries> {
        let m = 2 * self.k();
        if args.len() != m {
            return Err(Error::ArityMismatch { expected: m, got: args.len() });
        }
        for x in args.iter().chain(std::iter::once(x0)) {
            self.check(x)?;
        }
        let x0 = match &self.twist {
            Some(g) => x0.left_mul_scalar(g),
            None => x0.clone(),
        };
        phi_n(&|c| self.cocycle.eval(c), args, &x0)
    }

    /// `ev_1 Θ(x_1 ∧ … ∧ x_{2k}) = Θ(x_1 ∧ … ∧ x_{2k})(1)`.
    pub fn ev1(&self, args: &[MatrixWeyl]) -> Result<HbarSeries> {
        self.eval(args, &MatrixWeyl::identity(self.kinds(), self.size))
    }

    /// `(x · f)(m) = f(m ⋆ x − γ(x) ⋆ m)/(2ħ)`: the coadjoint action on the
    /// twisted dual module, normalized like [`MatrixWeyl::bracket`].
    fn act(&self, x: &MatrixWeyl, m: &MatrixWeyl) -> Result<MatrixWeyl> {
        let gx = x.apply(self.cocycle.gamma())?;
        let d = m.star(x)?.sub(&gx.star(m)?)?;
        let half = HbarSeries::rational(crate::scalar::rat(1, 2));
        let mut out = d.scale(&half);
        for i in 0..out.size() {
            for j in 0..out.size() {
                let e = out.get(i, j).shift_hbar(-1);
                out.set(i, j, e);
            }
        }
        Ok(out)
    }

    /// The Chevalley–Eilenberg coboundary `(∂Θ)(x_1 ∧ … ∧ x_{2k+1})(m)`.
    pub fn lie_coboundary(&self, args: &[MatrixWeyl], m: &MatrixWeyl) -> Result<HbarSeries> {
        let r = args.len();
        if r != 2 * self.k() + 1 {
            return Err(Error::ArityMismatch { expected: 2 * self.k() + 1, got: r });
        }
        let mut acc = HbarSeries::zero();
        for i in 0..r {
            let rest: Vec<MatrixWeyl> = args.iter().enumerate().filter(|&(l, _)| l != i).map(|(_, x)| x.clone()).collect();
            let v = self.eval(&rest, &self.act(&args[i], m)?)?;
            // (−1)^{i+1} with 1-based i
            if i % 2 == 0 {
                acc += &v;
            } else {
                acc -= &v;
            }
        }
        for i in 0..r {
            for j in i + 1..r {
                let mut rest = vec![args[i].bracket(&args[j])?];
                rest.extend(args.iter().enumerate().filter(|&(l, _)| l != i && l != j).map(|(_, x)| x.clone()));
                let v = self.eval(&rest, m)?;
                // (−1)^{i+j} with 1-based indices equals (−1)^{i+j} 0-based
                if (i + j) % 2 == 0 {
                    acc += &v;
                } else {
                    acc -= &v;
                }
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn theta_minus_one(n: usize) -> ThetaCocycle {
        ThetaCocycle::new(1, TwistedTraceData::from_roots(&[(2, 1)]).unwrap(), n).unwrap()
    }

    #[test]
    fn n_one_is_two_term_expansion() {
        let th = theta_minus_one(1);
        let k = th.kinds().to_vec();
        let mut rng = rand::rngs::StdRng::seed_from_u64(4);
        let a: Vec<WeylElement> = (0..3).map(|_| crate::sample::weyl(&mut rng, &k, 2, 2, 1, false)).collect();
        let m = |x: &WeylElement| MatrixWeyl::scalar(x, 1);
        let lhs = th.eval(&[m(&a[1]), m(&a[2])], &m(&a[0])).unwrap();
        let c = th.cocycle();
        let rhs = &c.eval_tuple(&[a[0].clone(), a[1].clone(), a[2].clone()]).unwrap()
            - &c.eval_tuple(&[a[0].clone(), a[2].clone(), a[1].clone()]).unwrap();
        assert_eq!(lhs, rhs);
        assert!(th.eval(&[m(&a[1]), m(&a[1])], &m(&a[0])).unwrap().is_zero());
    }

    #[test]
    fn lie_coboundary_vanishes() {
        let th = ThetaCocycle::new(1, TwistedTraceData::from_roots(&[(3, 1)]).unwrap(), 1).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(9);
        let mut nontrivial = 0;
        for _ in 0..4 {
            let mut sample = || MatrixWeyl::scalar(&crate::sample::weyl_split(&mut rng, 1, 1, 2, 1), 1);
            let xs = vec![sample(), sample(), sample()];
            let m = sample();
            assert!(th.lie_coboundary(&xs, &m).unwrap().is_zero());
            // the action terms alone do not vanish, so the check has content
            if !th.eval(&xs[1..], &th.act(&xs[0], &m).unwrap()).unwrap().is_zero() {
                nontrivial += 1;
            }
        }
        assert!(nontrivial > 0);
    }

    #[test]
    fn regular_representation_kills_identity_arguments() {
        let g = Matrix::from_i64(&[&[0, 1], &[1, 0]]);
        let th = ThetaCocycle::with_representation(1, TwistedTraceData::from_roots(&[(2, 1)]).unwrap(), g).unwrap();
        let k = th.kinds().to_vec();
        let x1 = MatrixWeyl::scalar(&WeylElement::x(&k, 1), 2);
        let x2 = MatrixWeyl::scalar(&WeylElement::y(&k, 1), 2);
        assert!(th.ev1(&[x1, x2]).unwrap().is_zero());
    }
}
