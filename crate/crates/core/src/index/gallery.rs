//! Sector data for a few global quotients, each with the group action it
//! comes from so the Lefschetz oracle can check it.
//!
//! Every builder computes `m` from the action: the isotropy group of a
//! point of `pt/Z_N`, or of a fixed point of `S²/Z_m` or `T²/Z₂`, is the
//! whole cyclic group, and the main sector of an effective action has
//! trivial principal isotropy.

use std::sync::Arc;

use crate::scalar::{rat, rat_int, CycloScalar, Rational};

use super::classes::BundleBlock;
use super::model::{OrbifoldModel, SectorData};
use super::oracle::{FixedPoint, GroupAction};
use super::ring::{CohomologyModel, RingElement};

/// A zero-dimensional sector: the ring is just the scalars.
fn point_ring() -> Arc<CohomologyModel> {
    let r = CohomologyModel::new(vec![], 0).expect("empty ring");
    r.with_integrals(vec![(vec![], CycloScalar::one())]).expect("the unit is top-degree")
}

/// The trivial line with character `μ`.
fn flat_line(ring: &Arc<CohomologyModel>, mu: CycloScalar) -> BundleBlock {
    BundleBlock { mu, roots: vec![RingElement::zero(ring)] }
}

/// A fixed point with rotation `λ` on its one-dimensional normal space.
fn fixed_point_sector(name: String, m: u32, lam: CycloScalar) -> SectorData {
    let ring = point_ring();
    SectorData {
        name,
        k: 0,
        m,
        normal_blocks: vec![(lam, RingElement::zero(&ring))],
        tangent_roots: vec![],
        omega: RingElement::zero(&ring),
        e: vec![flat_line(&ring, CycloScalar::one())],
        f: vec![],
        ring,
    }
}

/// `pt/Z_N` with `E = ⊕_a V_a`, where `V_a` is the character `g ↦ ζ_N^a`.
/// The index is the multiplicity of the trivial character.
pub fn point(n: u32, summands: &[u32]) -> OrbifoldModel {
    assert!(n > 0, "the group Z_N needs N > 0");
    let character = |j: u32| -> CycloScalar {
        let mut acc = CycloScalar::zero();
        for &a in summands {
            acc += &CycloScalar::root(n, (a as i64) * (j as i64));
        }
        acc
    };
    let sectors = (0..n)
        .map(|j| {
            let ring = point_ring();
            let e = summands.iter().map(|&a| flat_line(&ring, CycloScalar::root(n, (a as i64) * (j as i64)))).collect();
            SectorData {
                name: format!("g^{j}"),
                k: 0,
                m: n,
                omega: RingElement::zero(&ring),
                tangent_roots: vec![],
                normal_blocks: vec![],
                e,
                f: vec![],
                ring,
            }
        })
        .collect();
    let fixed_points = (1..n).map(|j| FixedPoint { element: j, tangent: vec![], mu: character(j) }).collect();
    OrbifoldModel {
        sectors,
        geometric: true,
        action: Some(GroupAction {
            order: n,
            identity_term: rat_int(summands.len() as i64),
            fixed_points,
            non_isolated: vec![],
        }),
    }
}

/// The football `S²/Z_m` (rotation about the poles) with the structure
/// sheaf, and `ω = c·x/2` where `x = c₁(T)`, so `∫ω = c/m`.
pub fn football(m: u32, c: Rational) -> OrbifoldModel {
    assert!(m > 0, "the group Z_m needs m > 0");
    let bare = CohomologyModel::new(vec![("x".into(), 2)], 2).expect("one generator of degree 2");
    let ring = bare.with_integrals(vec![(vec![1], CycloScalar::from_rational(rat(2, m as i64)))]).expect("x is top-degree");
    let x = RingElement::generator(&ring, 0);
    let half = CycloScalar::from_rational(rat(1, 2));
    let main = SectorData {
        name: "main".into(),
        k: 1,
        m: 1,
        tangent_roots: vec![x.clone()],
        normal_blocks: vec![],
        omega: x.scale(&CycloScalar::from_rational(c / rat_int(2))),
        // ∂̄ on the structure sheaf: Â · e^{x/2} is the Todd class.
        e: vec![BundleBlock { mu: CycloScalar::one(), roots: vec![x.scale(&half)] }],
        f: vec![],
        ring,
    };
    let mut sectors = vec![main];
    let mut fixed_points = Vec::new();
    for j in 1..m {
        for (pole, e) in [("N", j as i64), ("S", -(j as i64))] {
            let lam = CycloScalar::root(m, e);
            sectors.push(fixed_point_sector(format!("{pole},g^{j}"), m, lam.clone()));
            fixed_points.push(FixedPoint { element: j, tangent: vec![lam], mu: CycloScalar::one() });
        }
    }
    OrbifoldModel {
        sectors,
        geometric: true,
        action: Some(GroupAction { order: m, identity_term: rat_int(1), fixed_points, non_isolated: vec![] }),
    }
}

/// `T²/Z₂` by `z ↦ −z`, with the structure sheaf. The torus is flat, so the
/// main sector contributes nothing; the four half-periods carry the index.
pub fn torus_z2() -> OrbifoldModel {
    let bare = CohomologyModel::new(vec![("x".into(), 2)], 2).expect("one generator of degree 2");
    let ring = bare.with_integrals(vec![(vec![1], CycloScalar::from_rational(rat(1, 2)))]).expect("x is top-degree");
    let main = SectorData {
        name: "main".into(),
        k: 1,
        m: 1,
        tangent_roots: vec![RingElement::zero(&ring)],
        normal_blocks: vec![],
        omega: RingElement::zero(&ring),
        e: vec![flat_line(&ring, CycloScalar::one())],
        f: vec![],
        ring,
    };
    let minus = CycloScalar::from_int(-1);
    let mut sectors = vec![main];
    let mut fixed_points = Vec::new();
    for p in ["0", "1/2", "tau/2", "(1+tau)/2"] {
        sectors.push(fixed_point_sector(format!("{p},g"), 2, minus.clone()));
        fixed_points.push(FixedPoint { element: 1, tangent: vec![minus.clone()], mu: CycloScalar::one() });
    }
    OrbifoldModel {
        sectors,
        geometric: true,
        action: Some(GroupAction { order: 2, identity_term: rat_int(0), fixed_points, non_isolated: vec![] }),
    }
}

/// No sectors at all.
pub fn empty() -> OrbifoldModel {
    OrbifoldModel { sectors: vec![], geometric: true, action: None }
}

/// The shipped model files, by file name.
pub fn shipped() -> Vec<(String, OrbifoldModel)> {
    let mut out = vec![("empty.model".to_string(), empty())];
    for m in 2..=4 {
        out.push((format!("football_z{m}.model"), football(m, rat_int(0))));
    }
    out.push(("football_z3_omega3.model".into(), football(3, rat_int(3))));
    out.push(("torus_z2.model".into(), torus_z2()));
    for n in 1..=8u32 {
        for a in 0..n {
            out.push((format!("pt_z{n}_chi{a}.model"), point(n, &[a])));
        }
        out.push((format!("pt_z{n}_regular.model"), point(n, &(0..n).collect::<Vec<_>>())));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::{kawasaki_index, lefschetz_oracle};

    #[test]
    fn weights_match_the_action() {
        for model in [football(3, rat_int(0)), torus_z2(), point(5, &[1])] {
            let order = model.action.as_ref().unwrap().order;
            for s in &model.sectors {
                let expected = if s.name == "main" { 1 } else { order };
                assert_eq!(s.m, expected, "{}", s.name);
            }
        }
    }

    #[test]
    fn regular_representation_has_one_invariant() {
        for n in 1..=8u32 {
            let model = point(n, &(0..n).collect::<Vec<_>>());
            assert_eq!(kawasaki_index(&model).unwrap(), CycloScalar::one());
            assert_eq!(lefschetz_oracle(model.action.as_ref().unwrap()).unwrap(), CycloScalar::one());
        }
    }

    #[test]
    fn shipped_models_round_trip() {
        for (name, model) in shipped() {
            let again = OrbifoldModel::from_json_str(&model.to_json_string()).unwrap();
            assert_eq!(again.to_json(), model.to_json(), "{name}");
        }
    }
}
