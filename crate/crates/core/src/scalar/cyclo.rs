//! Exact arithmetic in the cyclotomic field ℚ(ζ_L).
//!
//! An element is stored as a dense coefficient vector over the power basis
//! `1, ζ, …, ζ^{φ(L)-1}` reduced modulo the L-th cyclotomic polynomial.
//! Binary operations on elements of different levels lift both operands to
//! the least common multiple first. Results that turn out to be rational are
//! demoted to level 1 so that rational data never pays for the field.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

struct LevelData {
    phi: usize,
    /// `powers[j]` holds ζ^j reduced to the power basis, for 0 ≤ j < L.
    powers: Vec<Vec<i64>>,
}

fn cyclotomic_poly(level: u32, cache: &mut HashMap<u32, Vec<i64>>) -> Vec<i64> {
    if let Some(p) = cache.get(&level) {
        return p.clone();
    }
    // x^L - 1 divided by Φ_d for every proper divisor d.
    let mut num = vec![0i64; level as usize + 1];
    num[0] = -1;
    num[level as usize] = 1;
    for d in 1..level {
        if level % d == 0 {
            let den = cyclotomic_poly(d, cache);
            num = exact_poly_div(&num, &den);
        }
    }
    cache.insert(level, num.clone());
    num
}

fn exact_poly_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let nd = num.len() - 1;
    let mut quot = vec![0i64; nd - dd + 1];
    for i in (0..=nd - dd).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        for (j, &dc) in den.iter().enumerate() {
            rem[i + j] -= c * dc;
        }
    }
    quot
}

fn level_data(level: u32) -> Arc<LevelData> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<LevelData>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(d) = cache.lock().unwrap().get(&level) {
        return d.clone();
    }
    let mut poly_cache = HashMap::new();
    let phi_poly = cyclotomic_poly(level, &mut poly_cache);
    let phi = phi_poly.len() - 1;
    let mut powers = Vec::with_capacity(level as usize);
    let mut cur = vec![0i64; phi];
    cur[0] = 1;
    for _ in 0..level {
        powers.push(cur.clone());
        // multiply by x and reduce with the monic Φ_L
        let top = cur[phi - 1];
        let mut next = vec![0i64; phi];
        next[1..phi].copy_from_slice(&cur[..(phi - 1)]);
        if top != 0 {
            for (j, n) in next.iter_mut().enumerate() {
                *n -= top * phi_poly[j];
            }
        }
        if phi == 1 {
            // level 1 or 2: Φ = x - 1 or x + 1
            next[0] = -top * phi_poly[0];
        }
        cur = next;
    }
    let data = Arc::new(LevelData { phi, powers });
    cache.lock().unwrap().insert(level, data.clone());
    data
}

/// Euler's totient of the level, i.e. the field degree.
pub fn totient(level: u32) -> usize {
    level_data(level).phi
}

pub fn lcm(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

/// An exact element of ℚ(ζ_L).
#[derive(Clone)]
pub struct CycloScalar {
    level: u32,
    coeffs: Vec<Rational>,
}

impl CycloScalar {
    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat_int(n))
    }

    pub fn from_rational(r: Rational) -> Self {
        CycloScalar { level: 1, coeffs: vec![r] }
    }

    /// ζ_L^e, reduced.
    pub fn root(level: u32, e: i64) -> Self {
        assert!(level >= 1, "cyclotomic level must be positive");
        let data = level_data(level);
        let idx = e.rem_euclid(level as i64) as usize;
        let coeffs = data.powers[idx].iter().map(|&c| rat_int(c)).collect();
        CycloScalar { level, coeffs }.normalized()
    }

    /// The imaginary unit ζ₄.
    pub fn i() -> Self {
        Self::root(4, 1)
    }

    /// Builds `Σ c_e ζ_L^e` from arbitrary exponents.
    pub fn from_terms(level: u32, terms: &[(i64, Rational)]) -> Self {
        let mut acc = CycloScalar::zero();
        for (e, c) in terms {
            acc += &(Self::root(level, *e) * &CycloScalar::from_rational(c.clone()));
        }
        acc
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Nonzero coefficients `(e, c)` of the reduced power-basis expansion.
    pub fn coeffs(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.level == 1 && self.coeffs[0].is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.level == 1
    }

    pub fn to_rational(&self) -> Option<Rational> {
        if self.level == 1 {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Representation at a multiple of the current level.
    pub fn at_level(&self, level: u32) -> Self {
        assert!(level % self.level == 0, "level {} does not divide {}", self.level, level);
        CycloScalar { level, coeffs: self.lift(level) }
    }

    fn lift(&self, level: u32) -> Vec<Rational> {
        if level == self.level {
            return self.coeffs.clone();
        }
        let data = level_data(level);
        let step = (level / self.level) as usize;
        let mut out = vec![Rational::zero(); data.phi];
        for (e, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let row = &data.powers[(e * step) % level as usize];
            for (o, &r) in out.iter_mut().zip(row) {
                if r != 0 {
                    *o += c * rat_int(r);
                }
            }
        }
        out
    }

    fn normalized(mut self) -> Self {
        if self.level != 1 && self.coeffs[1..].iter().all(|c| c.is_zero()) {
            let c = std::mem::take(&mut self.coeffs[0]);
            return CycloScalar::from_rational(c);
        }
        self
    }

    fn binary<F: Fn(&mut Vec<Rational>, &[Rational])>(&self, other: &Self, f: F) -> Self {
        let level = lcm(self.level, other.level);
        let mut a = self.lift(level);
        let b = other.lift(level);
        f(&mut a, &b);
        CycloScalar { level, coeffs: a }.normalized()
    }

    fn mul_ref(&self, other: &Self) -> Self {
        if self.level == 1 && other.level == 1 {
            return CycloScalar::from_rational(&self.coeffs[0] * &other.coeffs[0]);
        }
        if self.level == 1 || other.level == 1 {
            let (r, x) = if self.level == 1 { (&self.coeffs[0], other) } else { (&other.coeffs[0], self) };
            if r.is_zero() {
                return CycloScalar::zero();
            }
            let coeffs = x.coeffs.iter().map(|c| c * r).collect();
            return CycloScalar { level: x.level, coeffs };
        }
        let level = lcm(self.level, other.level);
        let a = self.lift(level);
        let b = other.lift(level);
        let data = level_data(level);
        let mut conv = vec![Rational::zero(); 2 * data.phi - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    conv[i + j] += x * y;
                }
            }
        }
        let mut out = vec![Rational::zero(); data.phi];
        for (j, c) in conv.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if j < data.phi {
                out[j] += c;
            } else {
                for (o, &r) in out.iter_mut().zip(&data.powers[j % level as usize]) {
                    if r != 0 {
                        *o += &c * rat_int(r);
                    }
                }
            }
        }
        CycloScalar { level, coeffs: out }.normalized()
    }

    /// Complex conjugation ζ ↦ ζ^{-1}.
    pub fn conj(&self) -> Self {
        if self.level == 1 {
            return self.clone();
        }
        let data = level_data(self.level);
        let l = self.level as usize;
        let mut out = vec![Rational::zero(); data.phi];
        for (e, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, &r) in out.iter_mut().zip(&data.powers[(l - e) % l]) {
                if r != 0 {
                    *o += c * rat_int(r);
                }
            }
        }
        CycloScalar { level: self.level, coeffs: out }.normalized()
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NotInvertible("zero scalar".into()));
        }
        if self.level == 1 {
            return Ok(CycloScalar::from_rational(self.coeffs[0].recip()));
        }
        // Solve (multiplication by self) · x = 1 over ℚ.
        let phi = self.coeffs.len();
        let mut rows: Vec<Vec<Rational>> = vec![vec![Rational::zero(); phi + 1]; phi];
        for j in 0..phi {
            let col = self.mul_ref(&CycloScalar::root(self.level, j as i64)).lift(self.level);
            for (i, v) in col.into_iter().enumerate() {
                rows[i][j] = v;
            }
        }
        rows[0][phi] = Rational::one();
        for c in 0..phi {
            let p = (c..phi).find(|&r| !rows[r][c].is_zero()).expect("nonzero field element has an inverse");
            rows.swap(c, p);
            let piv = rows[c][c].clone();
            for v in rows[c].iter_mut() {
                *v /= &piv;
            }
            for r in 0..phi {
                if r != c && !rows[r][c].is_zero() {
                    let f = rows[r][c].clone();
                    for k in c..=phi {
                        let t = &rows[c][k] * &f;
                        rows[r][k] -= t;
                    }
                }
            }
        }
        let coeffs = rows.into_iter().map(|r| r[phi].clone()).collect();
        Ok(CycloScalar { level: self.level, coeffs }.normalized())
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut acc = CycloScalar::one();
        let mut b = base;
        let mut n = e.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            n >>= 1;
        }
        Ok(acc)
    }

    /// Floating-point value, for ordering real numbers only.
    pub fn to_complex_f64(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (e, c) in self.coeffs() {
            let cf = c.to_f64().unwrap_or(0.0);
            let ang = 2.0 * std::f64::consts::PI * e as f64 / self.level as f64;
            re += cf * ang.cos();
            im += cf * ang.sin();
        }
        (re, im)
    }

    /// Multiplicative order if `self` is a root of unity dividing `max`.
    pub fn root_order(&self, max: u32) -> Option<u32> {
        let mut acc = self.clone();
        for k in 1..=max {
            if acc.is_one() {
                return Some(k);
            }
            acc = &acc * self;
        }
        None
    }

    fn render_rational(r: &Rational) -> String {
        r.to_string()
    }

    /// The same number written over the smallest level `d | L` whose field
    /// contains it.
    pub fn at_minimal_level(&self) -> Self {
        if self.level == 1 {
            return self.clone();
        }
        let target = self.coeffs.clone();
        for d in (2..self.level).filter(|d| self.level % d == 0) {
            let phi = totient(d);
            let cols: Vec<Vec<Rational>> = (0..phi).map(|e| CycloScalar::root(d, e as i64).lift(self.level)).collect();
            if let Some(x) = solve_rational(&cols, &target) {
                return CycloScalar { level: d, coeffs: x }.normalized();
            }
        }
        self.clone()
    }

    /// Sign-aware term list used by the textual renderers.
    pub(crate) fn signed_terms(&self) -> Vec<(bool, String)> {
        let this = self.at_minimal_level();
        if this.level != self.level {
            return this.signed_terms();
        }
        if self.level == 1 {
            let r = &self.coeffs[0];
            return vec![(r.is_negative(), Self::render_rational(&r.abs()))];
        }
        let mut out = Vec::new();
        for (e, c) in self.coeffs() {
            let neg = c.is_negative();
            let a = c.abs();
            let var = match e {
                0 => String::new(),
                1 => format!("zeta({})", self.level),
                _ => format!("zeta({})^{e}", self.level),
            };
            let s = if var.is_empty() {
                Self::render_rational(&a)
            } else if a.is_one() {
                var
            } else {
                format!("{}*{}", Self::render_rational(&a), var)
            };
            out.push((neg, s));
        }
        out
    }

    /// True when the rendering is a single term, so it needs no parentheses
    /// as a factor.
    pub(crate) fn is_monomial(&self) -> bool {
        self.coeffs().count() <= 1
    }
}

/// Solves `Σ_j x_j cols[j] = target` over ℚ when the system is consistent.
fn solve_rational(cols: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let rows = target.len();
    let n = cols.len();
    let mut m: Vec<Vec<Rational>> = (0..rows)
        .map(|i| cols.iter().map(|c| c[i].clone()).chain(std::iter::once(target[i].clone())).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = Rational::one() / m[r][c].clone();
        for v in m[r].iter_mut() {
            *v *= inv.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=n {
                    let t = &m[r][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][n].clone();
    }
    Some(x)
}

pub(crate) fn join_signed(terms: &[(bool, String)]) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (i, (neg, t)) in terms.iter().enumerate() {
        if i == 0 {
            if *neg {
                s.push('-');
            }
        } else {
            s.push_str(if *neg { " - " } else { " + " });
        }
        s.push_str(t);
    }
    s
}

impl fmt::Display for CycloScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        write!(f, "{}", join_signed(&self.signed_terms()))
    }
}

impl fmt::Debug for CycloScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[L={}] {}", self.level, self)
    }
}

impl PartialEq for CycloScalar {
    fn eq(&self, other: &Self) -> bool {
        if self.level == other.level {
            return self.coeffs == other.coeffs;
        }
        let level = lcm(self.level, other.level);
        self.lift(level) == other.lift(level)
    }
}

impl Eq for CycloScalar {}

impl Default for CycloScalar {
    fn default() -> Self {
        CycloScalar::zero()
    }
}

impl From<i64> for CycloScalar {
    fn from(n: i64) -> Self {
        CycloScalar::from_int(n)
    }
}

impl From<Rational> for CycloScalar {
    fn from(r: Rational) -> Self {
        CycloScalar::from_rational(r)
    }
}

impl<'a> Add<&'a CycloScalar> for &'a CycloScalar {
    type Output = CycloScalar;
    fn add(self, o: &CycloScalar) -> CycloScalar {
        if self.level == 1 && o.level == 1 {
            return CycloScalar::from_rational(&self.coeffs[0] + &o.coeffs[0]);
        }
        self.binary(o, |a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        })
    }
}

impl<'a> Sub<&'a CycloScalar> for &'a CycloScalar {
    type Output = CycloScalar;
    fn sub(self, o: &CycloScalar) -> CycloScalar {
        if self.level == 1 && o.level == 1 {
            return CycloScalar::from_rational(&self.coeffs[0] - &o.coeffs[0]);
        }
        self.binary(o, |a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x -= y;
            }
        })
    }
}

impl<'a> Mul<&'a CycloScalar> for &'a CycloScalar {
    type Output = CycloScalar;
    fn mul(self, o: &CycloScalar) -> CycloScalar {
        self.mul_ref(o)
    }
}

impl<'a> Div<&'a CycloScalar> for &'a CycloScalar {
    type Output = CycloScalar;
    fn div(self, o: &CycloScalar) -> CycloScalar {
        self.mul_ref(&o.inverse().expect("division by zero scalar"))
    }
}

impl Neg for &CycloScalar {
    type Output = CycloScalar;
    fn neg(self) -> CycloScalar {
        CycloScalar { level: self.level, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for CycloScalar {
    type Output = CycloScalar;
    fn neg(self) -> CycloScalar {
        -&self
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<CycloScalar> for CycloScalar {
            type Output = CycloScalar;
            fn $m(self, o: CycloScalar) -> CycloScalar { (&self).$m(&o) }
        }
        impl<'a> $tr<&'a CycloScalar> for CycloScalar {
            type Output = CycloScalar;
            fn $m(self, o: &CycloScalar) -> CycloScalar { (&self).$m(o) }
        }
        impl<'a> $tr<CycloScalar> for &'a CycloScalar {
            type Output = CycloScalar;
            fn $m(self, o: CycloScalar) -> CycloScalar { self.$m(&o) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl AddAssign<&CycloScalar> for CycloScalar {
    fn add_assign(&mut self, o: &CycloScalar) {
        *self = &*self + o;
    }
}

impl SubAssign<&CycloScalar> for CycloScalar {
    fn sub_assign(&mut self, o: &CycloScalar) {
        *self = &*self - o;
    }
}

impl MulAssign<&CycloScalar> for CycloScalar {
    fn mul_assign(&mut self, o: &CycloScalar) {
        *self = &*self * o;
    }
}
