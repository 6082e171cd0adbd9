//! Polynomials in the simplex variables `u_1 … u_m` and their exact integrals
//! over the ordered region `0 ≤ u_1 ≤ … ≤ u_m ≤ 1`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::scalar::{rat_int, Rational};

/// A polynomial in `u_1 … u_m` with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly {
    vars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl UPoly {
    pub fn zero(vars: usize) -> Self {
        UPoly { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: usize, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(vec![0; vars], c);
        p
    }

    /// `c_0 + Σ_i c_i u_i` from `(c_0, [(i, c_i)])` with 1-based `i`.
    pub fn linear(vars: usize, c0: Rational, coeffs: &[(usize, Rational)]) -> Self {
        let mut p = Self::constant(vars, c0);
        for (i, c) in coeffs {
            let mut e = vec![0; vars];
            e[i - 1] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        let mut out = UPoly::zero(self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> UPoly {
        let mut out = UPoly::zero(self.vars);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), x * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> UPoly {
        let mut acc = UPoly::constant(self.vars, rat_int(1));
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact integral over `0 ≤ u_1 ≤ … ≤ u_m ≤ 1`.
    pub fn integrate_ordered_simplex(&self) -> Rational {
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            acc += c * monomial_simplex_integral(e);
        }
        acc
    }
}

/// `∫ u^e` over `0 ≤ u_1 ≤ … ≤ u_m ≤ 1`, computed by nested antiderivatives:
/// integrating `u_1, u_2, …` in turn gives `∏_j 1/(s_j + j)` with `s_j` the
/// partial sums of `e`.
pub fn monomial_simplex_integral(e: &[u32]) -> Rational {
    let mut acc = Rational::from_integer(1.into());
    let mut s = 0i64;
    for (j, &x) in e.iter().enumerate() {
        s += x as i64;
        acc /= rat_int(s + j as i64 + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn small_integrals() {
        assert_eq!(monomial_simplex_integral(&[0, 0]), rat(1, 2));
        assert_eq!(monomial_simplex_integral(&[1, 0]), rat(1, 6));
        assert_eq!(monomial_simplex_integral(&[1, 1]), rat(1, 8));
        assert_eq!(monomial_simplex_integral(&[0, 0, 0, 0]), rat(1, 24));
    }

    #[test]
    fn linear_polynomial() {
        // ∫ (1 + 2u_2 − 2u_1) over 0 ≤ u_1 ≤ u_2 ≤ 1 = 1/2 + 2/3 − 1/3
        let p = UPoly::linear(2, rat(1, 1), &[(1, rat(-2, 1)), (2, rat(2, 1))]);
        assert_eq!(p.integrate_ordered_simplex(), rat(5, 6));
    }
}
