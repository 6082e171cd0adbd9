//! The orbifold index as a sum of sector integrals.
//!
//! Every curvature class is given in `R/2πi` normalization, so the sector
//! rings carry rational intersection numbers and `2πi` never appears: the
//! symplectic factor is `exp(−ω/ħ)`, truncated by nilpotence.

pub mod classes;
pub mod gallery;
pub mod model;
pub mod oracle;
pub mod ring;

pub use classes::{a_hat, a_hat_coefficients, normal_factor, twisted_chern, BundleBlock};
pub use model::{OrbifoldModel, SectorData};
pub use oracle::{lefschetz_oracle, FixedPoint, GroupAction};
pub use ring::{CohomologyModel, RingAlgebra, RingElement};

use crate::error::{Error, Result};
use crate::scalar::{rat, CycloScalar, HbarSeries};

/// `Ch_θ(E) − Ch_θ(F)`, times `Â` and the inverted normal determinant.
pub fn sector_integrand(s: &SectorData) -> Result<RingElement> {
    s.validate()?;
    let ch = twisted_chern(&s.ring, &s.e)?.sub(&twisted_chern(&s.ring, &s.f)?);
    Ok(ch.mul(&a_hat(&s.ring, &s.tangent_roots)?).mul(&normal_factor(&s.ring, &s.normal_blocks)?))
}

/// `(1/m) ∫ integrand · exp(−ω/ħ)`, expanded as `Σ_j (−1)^j/j! ħ^{−j} ∫ integrand · ω^j`.
pub fn sector_contribution(s: &SectorData) -> Result<HbarSeries> {
    let integrand = sector_integrand(s)?;
    let weight = CycloScalar::from_rational(rat(1, s.m as i64));
    let mut out = HbarSeries::zero();
    let mut term = integrand;
    let mut j = 0i64;
    while !term.is_zero() {
        let mut c = &term.integrate() * &weight;
        if j % 2 == 1 {
            c = -c;
        }
        out.add_term(-(j as i32), &c);
        j += 1;
        term = term.mul(&s.omega).scale(&CycloScalar::from_rational(rat(1, j)));
    }
    Ok(out)
}

/// `(1/m) ∫ integrand` for one sector.
pub fn sector_kawasaki(s: &SectorData) -> Result<CycloScalar> {
    let integrand = sector_integrand(s)?;
    Ok(&integrand.integrate() * &CycloScalar::from_rational(rat(1, s.m as i64)))
}

/// Applies `f` to every sector on its own thread; results keep sector order.
fn per_sector<T: Send>(model: &OrbifoldModel, f: fn(&SectorData) -> Result<T>) -> Result<Vec<T>> {
    if model.sectors.len() < 2 {
        return model.sectors.iter().map(f).collect();
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = model.sectors.iter().map(|s| scope.spawn(move || f(s))).collect();
        handles.into_iter().map(|h| h.join().expect("sector evaluation panicked")).collect()
    })
}

/// The algebraic index: a Laurent polynomial in `ħ` whose `ħ⁰` term is the
/// Kawasaki index.
pub fn algebraic_index(model: &OrbifoldModel) -> Result<HbarSeries> {
    let mut out = HbarSeries::zero();
    for c in per_sector(model, sector_contribution)? {
        out += &c;
    }
    Ok(out)
}

/// The Kawasaki index. On models marked geometric, a result that is not a
/// rational integer is reported as an inconsistency.
pub fn kawasaki_index(model: &OrbifoldModel) -> Result<CycloScalar> {
    let mut out = CycloScalar::zero();
    for c in per_sector(model, sector_kawasaki)? {
        out += &c;
    }
    if model.geometric {
        let integral = out.to_rational().is_some_and(|r| r.is_integer());
        if !integral {
            return Err(Error::ModelInconsistency(format!(
                "index {out} of a geometric model is not an integer"
            )));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::gallery;
    use super::*;
    use crate::scalar::rat_int;

    #[test]
    fn kawasaki_matches_the_oracle_on_the_gallery() {
        let mut models = vec![gallery::torus_z2()];
        for m in 2..=4 {
            models.push(gallery::football(m, rat_int(0)));
        }
        for n in 1..=8u32 {
            for a in 0..n {
                models.push(gallery::point(n, &[a]));
            }
        }
        for model in &models {
            let k = kawasaki_index(model).unwrap();
            let o = lefschetz_oracle(model.action.as_ref().unwrap()).unwrap();
            assert_eq!(k, o);
        }
    }

    #[test]
    fn hbar_expansion_of_the_football() {
        for m in 2..=4u32 {
            for c in [rat_int(0), rat_int(3), rat(-5, 2)] {
                let model = gallery::football(m, c.clone());
                let idx = algebraic_index(&model).unwrap();
                assert_eq!(idx.coeff(0), CycloScalar::one());
                assert_eq!(idx.coeff(-1), CycloScalar::from_rational(-c / rat_int(m as i64)));
                assert_eq!(idx.valuation().unwrap_or(0) >= -1, true);
            }
        }
    }

    #[test]
    fn equal_bundles_cancel() {
        let mut model = gallery::football(3, rat_int(2));
        for s in &mut model.sectors {
            s.f = s.e.clone();
        }
        assert!(algebraic_index(&model).unwrap().is_zero());
        assert!(kawasaki_index(&model).unwrap().is_zero());
    }

    #[test]
    fn empty_model() {
        assert!(kawasaki_index(&gallery::empty()).unwrap().is_zero());
        assert!(algebraic_index(&gallery::empty()).unwrap().is_zero());
    }

    #[test]
    fn non_integral_geometric_models_are_flagged() {
        let mut model = gallery::point(3, &[0]);
        model.sectors.truncate(1);
        assert!(matches!(kawasaki_index(&model), Err(Error::ModelInconsistency(_))));
        model.geometric = false;
        assert_eq!(kawasaki_index(&model).unwrap(), CycloScalar::from_rational(rat(1, 3)));
    }
}
