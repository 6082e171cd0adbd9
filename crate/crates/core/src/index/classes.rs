//! Characteristic classes on a sector: `Â`, the twisted Chern character and
//! the inverted normal determinant.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{rat_int, CycloScalar, Rational};

use super::ring::{CohomologyModel, RingElement};

/// Inverse of a power series with nonzero constant term, to `len` terms.
fn invert_series(c: &[Rational], len: usize) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::with_capacity(len);
    let c0 = c[0].clone();
    for n in 0..len {
        let mut acc = if n == 0 { rat_int(1) } else { rat_int(0) };
        for j in 1..=n.min(c.len() - 1) {
            acc -= &c[j] * &out[n - j];
        }
        out.push(acc / c0.clone());
    }
    out
}

/// Coefficients of `x/(e^{x/2} − e^{−x/2}) = Σ a_j x^j`, for `j = 0..=n`.
pub fn a_hat_coefficients(n: usize) -> Vec<Rational> {
    // (e^{x/2} − e^{−x/2})/x = Σ_j x^{2j} / (4^j (2j+1)!)
    let mut s = vec![rat_int(0); n + 1];
    let mut fact = rat_int(1);
    let mut four = rat_int(1);
    for j in 0..=n / 2 {
        if j > 0 {
            fact *= rat_int(((2 * j) * (2 * j + 1)) as i64);
            four *= rat_int(4);
        }
        s[2 * j] = rat_int(1) / (&fact * &four);
    }
    invert_series(&s, n + 1)
}

/// A degree-2 class, as required of Chern roots.
fn check_root(r: &RingElement, what: &str) -> Result<()> {
    match r.homogeneous_degree() {
        None | Some(2) => Ok(()),
        Some(d) => Err(Error::OddDegree(format!("{what} '{r}' has degree {d}, expected 2"))),
    }
}

/// `∏_i x_i/(e^{x_i/2} − e^{−x_i/2})` over the tangent Chern roots.
pub fn a_hat(ring: &Arc<CohomologyModel>, roots: &[RingElement]) -> Result<RingElement> {
    let coeffs = a_hat_coefficients(ring.top_degree() as usize / 2);
    let mut acc = RingElement::one(ring);
    for r in roots {
        check_root(r, "tangent root")?;
        acc = acc.mul(&r.compose_series(&coeffs)?);
    }
    Ok(acc)
}

/// One `θ`-eigenbundle: the eigenvalue `μ` and the Chern roots (one per
/// rank).
#[derive(Clone, Debug, PartialEq)]
pub struct BundleBlock {
    pub mu: CycloScalar,
    pub roots: Vec<RingElement>,
}

/// `Ch_θ = Σ_b μ_b Σ_roots e^{root}`.
pub fn twisted_chern(ring: &Arc<CohomologyModel>, blocks: &[BundleBlock]) -> Result<RingElement> {
    let mut acc = RingElement::zero(ring);
    for b in blocks {
        for r in &b.roots {
            check_root(r, "bundle root")?;
            acc = acc.add(&r.exp()?.scale(&b.mu));
        }
    }
    Ok(acc)
}

/// `(∏_j (1 − λ_j⁻¹ e^{−n_j}))⁻¹` over the normal blocks `(λ_j, n_j)`.
pub fn normal_factor(ring: &Arc<CohomologyModel>, blocks: &[(CycloScalar, RingElement)]) -> Result<RingElement> {
    let mut det = RingElement::one(ring);
    for (lam, n) in blocks {
        if lam.is_one() {
            return Err(Error::EigenvalueOne);
        }
        check_root(n, "normal root")?;
        let li = lam.inverse()?;
        let e = n.scale(&CycloScalar::from_int(-1)).exp()?;
        det = det.mul(&RingElement::one(ring).sub(&e.scale(&li)));
    }
    det.inverse()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn ring(top: u32) -> Arc<CohomologyModel> {
        CohomologyModel::new(vec![("x".into(), 2), ("y".into(), 2)], top).unwrap()
    }

    #[test]
    fn a_hat_series() {
        let c = a_hat_coefficients(4);
        assert_eq!(c, vec![rat(1, 1), rat(0, 1), rat(-1, 24), rat(0, 1), rat(7, 5760)]);
    }

    #[test]
    fn a_hat_in_the_ring() {
        let r = ring(4);
        assert_eq!(a_hat(&r, &[]).unwrap(), RingElement::one(&r));
        let x = r.parse("x").unwrap();
        assert_eq!(a_hat(&r, &[x.clone()]).unwrap(), r.parse("1 - x^2/24").unwrap());
        let y = r.parse("y").unwrap();
        let both = a_hat(&r, &[x.clone(), y.clone()]).unwrap();
        assert_eq!(both, a_hat(&r, &[x.clone()]).unwrap().mul(&a_hat(&r, &[y]).unwrap()));
        assert!(matches!(a_hat(&r, &[r.parse("x^2").unwrap()]), Err(Error::OddDegree(_))));
    }

    #[test]
    fn chern_characters() {
        let r = ring(4);
        let line = |mu: CycloScalar, root: &str| BundleBlock { mu, roots: vec![r.parse(root).unwrap()] };
        assert_eq!(twisted_chern(&r, &[line(CycloScalar::one(), "0")]).unwrap(), RingElement::one(&r));
        let z3 = CycloScalar::root(3, 1);
        let ch = twisted_chern(&r, &[line(z3.clone(), "x")]).unwrap();
        assert_eq!(ch, r.parse("1 + x + x^2/2").unwrap().scale(&z3));
    }

    #[test]
    fn normal_factors() {
        let r = ring(2);
        let zero = RingElement::zero(&r);
        let f = normal_factor(&r, &[(CycloScalar::from_int(-1), zero.clone())]).unwrap();
        assert_eq!(f, RingElement::constant(&r, CycloScalar::from_rational(rat(1, 2))));
        assert_eq!(normal_factor(&r, &[]).unwrap(), RingElement::one(&r));
        assert_eq!(normal_factor(&r, &[(CycloScalar::one(), zero)]), Err(Error::EigenvalueOne));
        // λ = i, root x: (1 − λ⁻¹(1 − x))⁻¹ = (1−λ⁻¹)⁻¹ (1 + (λ⁻¹/(1−λ⁻¹)) x)⁻¹
        let i = CycloScalar::i();
        let x = r.parse("x").unwrap();
        let li = i.inverse().unwrap();
        let a = (&CycloScalar::one() - &li).inverse().unwrap();
        let b = &li * &a;
        let expected = RingElement::one(&r).sub(&x.scale(&b)).scale(&a);
        assert_eq!(normal_factor(&r, &[(i, x)]).unwrap(), expected);
    }
}
