//! Truncated power series in an auxiliary nilpotent parameter `t`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::cyclo::{rat, CycloScalar};
use super::hbar::HbarSeries;
use crate::error::{Error, Result};

/// `c_0 + c_1 t + … + c_O t^O` with `t^{O+1} = 0` and ħ-series coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncSeries {
    coeffs: Vec<HbarSeries>,
}

impl TruncSeries {
    pub fn zero(order: usize) -> Self {
        TruncSeries { coeffs: vec![HbarSeries::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(order, HbarSeries::one())
    }

    pub fn constant(order: usize, c: HbarSeries) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The series `t` itself.
    pub fn t(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = HbarSeries::one();
        }
        s
    }

    pub fn from_coeffs(order: usize, coeffs: impl IntoIterator<Item = HbarSeries>) -> Self {
        let mut s = Self::zero(order);
        for (i, c) in coeffs.into_iter().enumerate() {
            if i <= order {
                s.coeffs[i] = c;
            }
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> &HbarSeries {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[HbarSeries] {
        &self.coeffs
    }

    pub fn scale(&self, c: &HbarSeries) -> Self {
        TruncSeries { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    fn check_order(&self, other: &Self) {
        assert_eq!(self.order(), other.order(), "truncated series of different orders");
    }

    /// `exp(x)` for `x` with vanishing constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonZeroConstantTerm);
        }
        // e_n = (1/n) Σ_{k=1}^{n} k x_k e_{n-k}
        let o = self.order();
        let mut e = vec![HbarSeries::zero(); o + 1];
        e[0] = HbarSeries::one();
        for n in 1..=o {
            let mut acc = HbarSeries::zero();
            for k in 1..=n {
                acc += &(&self.coeffs[k] * &e[n - k]).scale(&CycloScalar::from_int(k as i64));
            }
            e[n] = acc.scale(&CycloScalar::from_rational(rat(1, n as i64)));
        }
        Ok(TruncSeries { coeffs: e })
    }

    /// `log(x)` for `x` with constant term 1.
    pub fn log(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::NotInvertible("log needs constant term 1".into()));
        }
        // x L' = x'  ⇒  n l_n = n x_n − Σ_{k=1}^{n-1} k l_k x_{n-k}
        let o = self.order();
        let mut l = vec![HbarSeries::zero(); o + 1];
        for n in 1..=o {
            let mut acc = self.coeffs[n].scale(&CycloScalar::from_int(n as i64));
            for k in 1..n {
                acc -= &(&l[k] * &self.coeffs[n - k]).scale(&CycloScalar::from_int(k as i64));
            }
            l[n] = acc.scale(&CycloScalar::from_rational(rat(1, n as i64)));
        }
        Ok(TruncSeries { coeffs: l })
    }

    /// Multiplicative inverse; the constant term must be invertible.
    pub fn invert(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::NotInvertible("zero constant term".into()));
        }
        let c0_inv = c0.inverse(None)?;
        let o = self.order();
        let mut b = vec![HbarSeries::zero(); o + 1];
        b[0] = c0_inv.clone();
        for n in 1..=o {
            let mut acc = HbarSeries::zero();
            for k in 1..=n {
                acc += &(&self.coeffs[k] * &b[n - k]);
            }
            b[n] = -(&acc * &c0_inv);
        }
        Ok(TruncSeries { coeffs: b })
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*t")?,
                _ => write!(f, "({c})*t^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} + O(t^{})", self.order() + 1)
    }
}

impl<'a> Add<&'a TruncSeries> for &'a TruncSeries {
    type Output = TruncSeries;
    fn add(self, o: &TruncSeries) -> TruncSeries {
        self.check_order(o);
        TruncSeries { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub<&'a TruncSeries> for &'a TruncSeries {
    type Output = TruncSeries;
    fn sub(self, o: &TruncSeries) -> TruncSeries {
        self.check_order(o);
        TruncSeries { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl<'a> Mul<&'a TruncSeries> for &'a TruncSeries {
    type Output = TruncSeries;
    fn mul(self, o: &TruncSeries) -> TruncSeries {
        self.check_order(o);
        let n = self.order();
        let mut out = TruncSeries::zero(n);
        for i in 0..=n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(n - i) {
                if !o.coeffs[j].is_zero() {
                    out.coeffs[i + j] += &(&self.coeffs[i] * &o.coeffs[j]);
                }
            }
        }
        out
    }
}

impl Neg for &TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        TruncSeries { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> HbarSeries {
        HbarSeries::rational(rat(n, d))
    }

    #[test]
    fn exp_of_zero_and_t() {
        assert_eq!(TruncSeries::zero(3).exp().unwrap(), TruncSeries::one(3));
        let e = TruncSeries::t(3).exp().unwrap();
        assert_eq!(e, TruncSeries::from_coeffs(3, [q(1, 1), q(1, 1), q(1, 2), q(1, 6)]));
        assert!(TruncSeries::one(3).exp().is_err());
    }

    #[test]
    fn exp_then_log_roundtrip() {
        let x = TruncSeries::from_coeffs(4, [q(0, 1), q(2, 3), q(-1, 5), q(0, 1), q(7, 2)]);
        assert_eq!(x.exp().unwrap().log().unwrap(), x);
    }

    #[test]
    fn invert_geometric() {
        let x = &TruncSeries::one(2) - &TruncSeries::t(2);
        assert_eq!(x.invert().unwrap(), TruncSeries::from_coeffs(2, [q(1, 1), q(1, 1), q(1, 1)]));
        assert!(TruncSeries::t(2).invert().is_err());
    }
}
