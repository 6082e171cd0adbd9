//! Holomorphic Lefschetz fixed-point sums for cyclic actions with isolated
//! fixed points: an index computation that shares nothing with the sector
//! pipeline beyond the scalars.

use crate::error::{Error, Result};
use crate::scalar::{rat, CycloScalar, Rational};

/// A fixed point of `g^element`, with the eigenvalues of `d(g^element)` on
/// the holomorphic tangent space and the character `μ` of the bundle fiber.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedPoint {
    pub element: u32,
    pub tangent: Vec<CycloScalar>,
    pub mu: CycloScalar,
}

/// `Z_N` acting on a compact complex manifold `M`, with `∫_M Td · Ch` for
/// the identity and the fixed points of every other element.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupAction {
    pub order: u32,
    pub identity_term: Rational,
    pub fixed_points: Vec<FixedPoint>,
    /// Elements whose fixed set is not isolated.
    pub non_isolated: Vec<u32>,
}

/// `(1/N) [∫_M Td · Ch + Σ_{g ≠ e} Σ_p μ_p(g) / ∏(1 − λ_p(g)⁻¹)]`.
pub fn lefschetz_oracle(action: &GroupAction) -> Result<CycloScalar> {
    if action.order == 0 {
        return Err(Error::ModelInconsistency("group of order 0".into()));
    }
    if let Some(g) = action.non_isolated.first() {
        return Err(Error::Unsupported(format!("element {g} has a non-isolated fixed set")));
    }
    let mut acc = CycloScalar::from_rational(action.identity_term.clone());
    for p in &action.fixed_points {
        if p.element == 0 || p.element >= action.order {
            return Err(Error::ModelInconsistency(format!(
                "fixed point listed for element {} of Z_{}",
                p.element, action.order
            )));
        }
        let mut den = CycloScalar::one();
        for lam in &p.tangent {
            den *= &(&CycloScalar::one() - &lam.inverse()?);
        }
        let den = den.inverse().map_err(|_| Error::EigenvalueOne)?;
        acc += &(&p.mu * &den);
    }
    Ok(&acc * &CycloScalar::from_rational(rat(1, action.order as i64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat_int;

    #[test]
    fn rotation_of_the_sphere() {
        let a = GroupAction {
            order: 2,
            identity_term: rat_int(1),
            fixed_points: vec![
                FixedPoint { element: 1, tangent: vec![CycloScalar::from_int(-1)], mu: CycloScalar::one() },
                FixedPoint { element: 1, tangent: vec![CycloScalar::from_int(-1)], mu: CycloScalar::one() },
            ],
            non_isolated: vec![],
        };
        assert_eq!(lefschetz_oracle(&a).unwrap(), CycloScalar::one());
    }

    #[test]
    fn trivial_group_and_zero_bundle() {
        let a = GroupAction { order: 1, identity_term: rat_int(0), fixed_points: vec![], non_isolated: vec![] };
        assert!(lefschetz_oracle(&a).unwrap().is_zero());
        let b = GroupAction { non_isolated: vec![1], order: 2, ..a };
        assert!(matches!(lefschetz_oracle(&b), Err(Error::Unsupported(_))));
    }
}
