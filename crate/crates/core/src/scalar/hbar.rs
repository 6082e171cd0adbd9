//! Laurent polynomials in the formal parameter ħ with cyclotomic coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use super::cyclo::{join_signed, CycloScalar, Rational};
use crate::error::{Error, Result};

/// A finitely supported Laurent series `Σ c_k ħ^k`.
///
/// When `cap` is set, terms with exponent above the cap are dropped and the
/// value is flagged as truncated. Any operation involving a truncated value
/// yields a truncated value.
#[derive(Clone, Default)]
pub struct HbarSeries {
    terms: BTreeMap<i32, CycloScalar>,
    cap: Option<i32>,
    truncated: bool,
}

impl HbarSeries {
    pub fn zero() -> Self {
        HbarSeries::default()
    }

    pub fn one() -> Self {
        Self::scalar(CycloScalar::one())
    }

    pub fn scalar(c: CycloScalar) -> Self {
        Self::monomial(c, 0)
    }

    pub fn rational(r: Rational) -> Self {
        Self::scalar(CycloScalar::from_rational(r))
    }

    pub fn int(n: i64) -> Self {
        Self::scalar(CycloScalar::from_int(n))
    }

    /// `c ħ^k`.
    pub fn monomial(c: CycloScalar, k: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        HbarSeries { terms, cap: None, truncated: false }
    }

    /// ħ itself.
    pub fn hbar() -> Self {
        Self::monomial(CycloScalar::one(), 1)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i32, CycloScalar)>) -> Self {
        let mut s = HbarSeries::zero();
        for (k, c) in terms {
            s.add_term(k, &c);
        }
        s
    }

    /// Sets a truncation cap, dropping and flagging higher terms.
    pub fn with_cap(mut self, cap: i32) -> Self {
        self.cap = Some(self.cap.map_or(cap, |c| c.min(cap)));
        self.apply_cap();
        self
    }

    fn apply_cap(&mut self) {
        if let Some(cap) = self.cap {
            let high: Vec<i32> = self.terms.range(cap + 1..).map(|(k, _)| *k).collect();
            if !high.is_empty() {
                self.truncated = true;
                for k in high {
                    self.terms.remove(&k);
                }
            }
        }
    }

    pub fn cap(&self) -> Option<i32> {
        self.cap
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    /// Lowest ħ-exponent with nonzero coefficient.
    pub fn valuation(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn degree(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    pub fn coeff(&self, k: i32) -> CycloScalar {
        self.terms.get(&k).cloned().unwrap_or_else(CycloScalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &CycloScalar)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    /// The ħ⁰ coefficient if the series is a constant.
    pub fn as_scalar(&self) -> Option<CycloScalar> {
        match self.terms.len() {
            0 => Some(CycloScalar::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, k: i32, c: &CycloScalar) {
        if c.is_zero() {
            return;
        }
        if self.cap.is_some_and(|cap| k > cap) {
            self.truncated = true;
            return;
        }
        let entry = self.terms.entry(k).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&k);
        }
    }

    fn merged_meta(&self, other: &Self) -> (Option<i32>, bool) {
        let cap = match (self.cap, other.cap) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        (cap, self.truncated || other.truncated)
    }

    pub fn scale(&self, c: &CycloScalar) -> Self {
        if c.is_zero() {
            return HbarSeries { terms: BTreeMap::new(), cap: self.cap, truncated: self.truncated };
        }
        HbarSeries {
            terms: self.terms.iter().map(|(k, x)| (*k, x * c)).collect(),
            cap: self.cap,
            truncated: self.truncated,
        }
    }

    /// Multiplies by ħ^s.
    pub fn shift(&self, s: i32) -> Self {
        let mut out = HbarSeries {
            terms: self.terms.iter().map(|(k, x)| (k + s, x.clone())).collect(),
            cap: self.cap,
            truncated: self.truncated,
        };
        out.apply_cap();
        out
    }

    pub fn conj(&self) -> Self {
        HbarSeries {
            terms: self.terms.iter().map(|(k, x)| (*k, x.conj())).collect(),
            cap: self.cap,
            truncated: self.truncated,
        }
    }

    /// Multiplicative inverse. A single-term series inverts exactly; a longer
    /// series needs a truncation cap (its own, or `cap` when given).
    pub fn inverse(&self, cap: Option<i32>) -> Result<Self> {
        let v = self.valuation().ok_or_else(|| Error::NotInvertible("zero series".into()))?;
        let lead_inv = self.terms[&v].inverse()?;
        if self.terms.len() == 1 {
            let mut out = HbarSeries::monomial(lead_inv, -v);
            out.cap = self.cap.or(cap);
            out.truncated = self.truncated;
            out.apply_cap();
            return Ok(out);
        }
        let cap = match (self.cap, cap) {
            (Some(a), Some(b)) => a.min(b),
            (a, b) => a.or(b).ok_or_else(|| {
                Error::NotInvertible("inverse of a multi-term series needs a truncation order".into())
            })?,
        };
        // Normalize to u = ħ^{-v} self / c_v = 1 + (higher), then invert u
        // by the recursion b_n = -Σ_{j≥1} u_j b_{n-j}.
        let u: BTreeMap<i32, CycloScalar> =
            self.terms.iter().map(|(k, c)| (k - v, c * &lead_inv)).collect();
        let len = (cap + v).max(0) as usize + 1;
        let mut b: Vec<CycloScalar> = vec![CycloScalar::zero(); len];
        b[0] = CycloScalar::one();
        for n in 1..len {
            let mut acc = CycloScalar::zero();
            for (j, uj) in u.range(1..=n as i32) {
                acc += &(uj * &b[n - *j as usize]);
            }
            b[n] = -acc;
        }
        let mut out = HbarSeries::zero();
        out.cap = Some(cap);
        out.truncated = true;
        for (n, c) in b.into_iter().enumerate() {
            out.add_term(n as i32 - v, &(&c * &lead_inv));
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = HbarSeries::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Signed textual terms, one per ħ-power.
    pub(crate) fn signed_terms(&self) -> Vec<(bool, String)> {
        let mut out = Vec::new();
        for (k, c) in &self.terms {
            let hpart = match k {
                0 => String::new(),
                1 => "h".to_string(),
                _ => format!("h^{k}"),
            };
            if c.is_monomial() {
                let (neg, abs) = c.signed_terms().into_iter().next().unwrap();
                let s = if hpart.is_empty() {
                    abs
                } else if abs == "1" {
                    hpart
                } else {
                    format!("{abs}*{hpart}")
                };
                out.push((neg, s));
            } else {
                let body = format!("({c})");
                let s = if hpart.is_empty() { body } else { format!("{body}*{hpart}") };
                out.push((false, s));
            }
        }
        out
    }
}

impl fmt::Display for HbarSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_scalar() {
            Some(c) if !self.truncated => write!(f, "{c}")?,
            _ => write!(f, "{}", join_signed(&self.signed_terms()))?,
        }
        if self.truncated {
            if let Some(cap) = self.cap {
                write!(f, " + O(h^{})", cap + 1)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for HbarSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl PartialEq for HbarSeries {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for HbarSeries {}

impl From<CycloScalar> for HbarSeries {
    fn from(c: CycloScalar) -> Self {
        HbarSeries::scalar(c)
    }
}

impl From<i64> for HbarSeries {
    fn from(n: i64) -> Self {
        HbarSeries::int(n)
    }
}

impl<'a> Add<&'a HbarSeries> for &'a HbarSeries {
    type Output = HbarSeries;
    fn add(self, o: &HbarSeries) -> HbarSeries {
        let (cap, truncated) = self.merged_meta(o);
        let mut out = HbarSeries { terms: self.terms.clone(), cap, truncated };
        out.apply_cap();
        for (k, c) in &o.terms {
            out.add_term(*k, c);
        }
        out
    }
}

impl<'a> Sub<&'a HbarSeries> for &'a HbarSeries {
    type Output = HbarSeries;
    fn sub(self, o: &HbarSeries) -> HbarSeries {
        self + &(-o)
    }
}

impl<'a> Mul<&'a HbarSeries> for &'a HbarSeries {
    type Output = HbarSeries;
    fn mul(self, o: &HbarSeries) -> HbarSeries {
        let (cap, truncated) = self.merged_meta(o);
        let mut out = HbarSeries { terms: BTreeMap::new(), cap, truncated };
        for (i, a) in &self.terms {
            for (j, b) in &o.terms {
                out.add_term(i + j, &(a * b));
            }
        }
        out
    }
}

impl Neg for &HbarSeries {
    type Output = HbarSeries;
    fn neg(self) -> HbarSeries {
        HbarSeries {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
            cap: self.cap,
            truncated: self.truncated,
        }
    }
}

impl Neg for HbarSeries {
    type Output = HbarSeries;
    fn neg(self) -> HbarSeries {
        -&self
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<HbarSeries> for HbarSeries {
            type Output = HbarSeries;
            fn $m(self, o: HbarSeries) -> HbarSeries { (&self).$m(&o) }
        }
        impl<'a> $tr<&'a HbarSeries> for HbarSeries {
            type Output = HbarSeries;
            fn $m(self, o: &HbarSeries) -> HbarSeries { (&self).$m(o) }
        }
        impl<'a> $tr<HbarSeries> for &'a HbarSeries {
            type Output = HbarSeries;
            fn $m(self, o: HbarSeries) -> HbarSeries { self.$m(&o) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl AddAssign<&HbarSeries> for HbarSeries {
    fn add_assign(&mut self, o: &HbarSeries) {
        if o.cap.is_none() && !o.truncated {
            for (k, c) in &o.terms {
                self.add_term(*k, c);
            }
        } else {
            *self = &*self + o;
        }
    }
}

impl SubAssign<&HbarSeries> for HbarSeries {
    fn sub_assign(&mut self, o: &HbarSeries) {
        *self += &(-o);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cyclo::rat;

    #[test]
    fn render_order_is_by_exponent() {
        let s = HbarSeries::from_terms([(2, CycloScalar::from_int(3)), (-1, CycloScalar::from_rational(rat(-1, 2)))]);
        assert_eq!(s.to_string(), "-1/2*h^-1 + 3*h^2");
        assert_eq!(HbarSeries::hbar().to_string(), "h");
        assert_eq!(HbarSeries::zero().to_string(), "0");
    }

    #[test]
    fn inverse_of_geometric_series() {
        let x = HbarSeries::from_terms([(0, CycloScalar::one()), (1, CycloScalar::from_int(-1))]);
        let inv = x.inverse(Some(3)).unwrap();
        assert_eq!(inv, HbarSeries::from_terms((0..=3).map(|k| (k, CycloScalar::one()))));
        assert!(inv.is_truncated());
        let back = (&x * &inv).with_cap(3);
        assert!(back.is_one());
        assert!(x.inverse(None).is_err());
    }

    #[test]
    fn inverse_of_monomial_is_exact() {
        let x = HbarSeries::monomial(CycloScalar::from_int(2), 3);
        let inv = x.inverse(None).unwrap();
        assert!((&x * &inv).is_one());
        assert!(!inv.is_truncated());
    }

    #[test]
    fn truncation_propagates() {
        let a = HbarSeries::hbar().with_cap(1);
        let b = HbarSeries::hbar();
        let c = &a * &b;
        assert!(c.is_zero());
        assert!(c.is_truncated());
        assert!(!(&b * &b).is_truncated());
    }
}
