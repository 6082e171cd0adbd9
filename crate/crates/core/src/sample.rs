//! Random test data: small exact scalars and sparse Weyl elements.

use rand::Rng;

use crate::scalar::{rat, CycloScalar, HbarSeries};
use crate::weyl::{Monomial, PairKind, WeylElement};

/// A small nonzero rational, or a small element of ℚ(ζ_level) when
/// `level > 1`.
pub fn scalar<R: Rng>(rng: &mut R, level: u32) -> CycloScalar {
    let mut s = CycloScalar::zero();
    while s.is_zero() {
        let terms = if level > 1 { rng.gen_range(1..=2) } else { 1 };
        for _ in 0..terms {
            let num = rng.gen_range(-5..=5);
            let den = rng.gen_range(1..=3);
            let e = if level > 1 { rng.gen_range(0..level as i64) } else { 0 };
            s += &(CycloScalar::root(level.max(1), e) * CycloScalar::from_rational(rat(num, den)));
        }
    }
    s
}

/// A random monomial of total degree at most `max_deg`.
pub fn monomial<R: Rng>(rng: &mut R, n: usize, max_deg: u32) -> Monomial {
    let mut m = vec![0u32; 2 * n];
    if n == 0 {
        return m;
    }
    let d = rng.gen_range(0..=max_deg);
    for _ in 0..d {
        m[rng.gen_range(0..2 * n)] += 1;
    }
    m
}

/// A random element with up to `max_terms` terms of degree ≤ `max_deg`.
/// With `with_hbar`, coefficients may carry a power of ħ.
pub fn weyl<R: Rng>(
    rng: &mut R,
    kinds: &[PairKind],
    max_deg: u32,
    max_terms: usize,
    level: u32,
    with_hbar: bool,
) -> WeylElement {
    let mut a = WeylElement::zero(kinds);
    let terms = rng.gen_range(1..=max_terms.max(1));
    for _ in 0..terms {
        let m = monomial(rng, kinds.len(), max_deg);
        let k = if with_hbar { rng.gen_range(0..=1) } else { 0 };
        a.add_term(m, &HbarSeries::monomial(scalar(rng, level), k));
    }
    a
}

/// A dense random element on `k` fixed real pairs followed by `normal`
/// complex pairs: every fixed-pair monomial of degree ≤ `max_deg` appears
/// with probability ½, times `1` or some `z_j z̄_j`, and occasionally a lone
/// `z_j` or `z̄_j`. Such elements give nonvanishing twisted cocycle values,
/// unlike sparse monomials whose weights rarely balance.
pub fn weyl_split<R: Rng>(rng: &mut R, k: usize, normal: usize, max_deg: u32, level: u32) -> WeylElement {
    weyl_split_with_density(rng, k, normal, max_deg, level, 0.5)
}

/// [`weyl_split`] with each fixed-pair monomial kept with probability
/// `density`. Lower densities keep evaluations on many fixed pairs cheap.
pub fn weyl_split_with_density<R: Rng>(
    rng: &mut R,
    k: usize,
    normal: usize,
    max_deg: u32,
    level: u32,
    density: f64,
) -> WeylElement {
    let n = k + normal;
    let mut kinds = vec![PairKind::Real; k];
    kinds.extend(std::iter::repeat(PairKind::Complex).take(normal));
    let mut a = WeylElement::zero(&kinds);
    for d in 0..=max_deg {
        for fixed in crate::homology::monomials_of_degree(2 * k, d) {
            if !rng.gen_bool(density) {
                continue;
            }
            let mut m = vec![0u32; 2 * n];
            for i in 0..k {
                m[i] = fixed[i];
                m[n + i] = fixed[k + i];
            }
            if normal > 0 {
                let j = k + rng.gen_range(0..normal);
                match rng.gen_range(0..6) {
                    0 | 1 => {}
                    2 | 3 => {
                        m[j] += 1;
                        m[n + j] += 1;
                    }
                    4 => m[j] += 1,
                    _ => m[n + j] += 1,
                }
            }
            a.add_term(m, &HbarSeries::scalar(scalar(rng, level)));
        }
    }
    if a.is_zero() {
        a = WeylElement::one(&kinds);
    }
    a
}
