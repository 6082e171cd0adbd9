//! `N × N` matrices with Weyl-algebra entries, `gl_N(𝕎)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{rat, HbarSeries};
use crate::symplectic::SymplecticMap;
use crate::weyl::{PairKind, WeylElement};

/// A square matrix of Weyl elements over a common algebra shape.
#[derive(Clone, PartialEq)]
pub struct MatrixWeyl {
    kinds: Vec<PairKind>,
    size: usize,
    entries: Vec<WeylElement>,
}

impl MatrixWeyl {
    pub fn zero(kinds: &[PairKind], size: usize) -> Self {
        MatrixWeyl { kinds: kinds.to_vec(), size, entries: vec![WeylElement::zero(kinds); size * size] }
    }

    /// `a ⊗ 1_N`.
    pub fn scalar(a: &WeylElement, size: usize) -> Self {
        let mut m = Self::zero(a.kinds(), size);
        for i in 0..size {
            m.set(i, i, a.clone());
        }
        m
    }

    pub fn identity(kinds: &[PairKind], size: usize) -> Self {
        Self::scalar(&WeylElement::one(kinds), size)
    }

    /// `a ⊗ E_{rs}` (0-based indices).
    pub fn elementary(a: &WeylElement, size: usize, r: usize, s: usize) -> Self {
        let mut m = Self::zero(a.kinds(), size);
        m.set(r, s, a.clone());
        m
    }

    /// `a ⊗ M` for a scalar matrix `M` given row-major.
    pub fn tensor(a: &WeylElement, m: &crate::linalg::Matrix) -> Self {
        assert!(m.is_square());
        let size = m.rows();
        let mut out = Self::zero(a.kinds(), size);
        for i in 0..size {
            for j in 0..size {
                if !m.get(i, j).is_zero() {
                    out.set(i, j, a.scale_scalar(m.get(i, j)));
                }
            }
        }
        out
    }

    pub fn kinds(&self) -> &[PairKind] {
        &self.kinds
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> &WeylElement {
        &self.entries[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, a: WeylElement) {
        assert_eq!(a.kinds(), self.kinds.as_slice(), "entry of a different shape");
        self.entries[i * self.size + j] = a;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.size != o.size {
            return Err(Error::DimensionMismatch(format!("{}x{} vs {}x{}", self.size, self.size, o.size, o.size)));
        }
        if self.kinds != o.kinds {
            return Err(Error::BasisMismatch(format!("{:?} vs {:?}", self.kinds, o.kinds)));
        }
        Ok(())
    }

    fn map(&self, f: impl Fn(&WeylElement) -> WeylElement) -> Self {
        MatrixWeyl { kinds: self.kinds.clone(), size: self.size, entries: self.entries.iter().map(f).collect() }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut out = self.clone();
        for (e, x) in out.entries.iter_mut().zip(&o.entries) {
            *e = &*e + x;
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(&HbarSeries::int(-1)))
    }

    pub fn scale(&self, c: &HbarSeries) -> Self {
        self.map(|e| e.scale(c))
    }

    /// Matrix product with star-multiplied entries.
    pub fn star(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let n = self.size;
        let mut out = Self::zero(&self.kinds, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = WeylElement::zero(&self.kinds);
                for l in 0..n {
                    let (a, b) = (self.get(i, l), o.get(l, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &a.star(b)?;
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// `x ⋆ y − y ⋆ x`.
    pub fn commutator(&self, o: &Self) -> Result<Self> {
        self.star(o)?.sub(&o.star(self)?)
    }

    /// The Lie bracket `[x, y]_ħ = (x ⋆ y − y ⋆ x)/(2ħ)`, for which
    /// `[p_i, q_i]_ħ = 1` and quadratics act by the symplectic Lie algebra.
    pub fn bracket(&self, o: &Self) -> Result<Self> {
        let c = self.commutator(o)?;
        Ok(c.map(|e| e.shift_hbar(-1)).scale(&HbarSeries::rational(rat(1, 2))))
    }

    /// Entrywise action of a symplectic map.
    pub fn apply(&self, g: &SymplecticMap) -> Result<Self> {
        let entries = self.entries.iter().map(|e| g.apply(e)).collect::<Result<Vec<_>>>()?;
        Ok(MatrixWeyl { kinds: self.kinds.clone(), size: self.size, entries })
    }

    /// Left multiplication by a scalar matrix.
    pub fn left_mul_scalar(&self, m: &crate::linalg::Matrix) -> Self {
        let n = self.size;
        let mut out = Self::zero(&self.kinds, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = WeylElement::zero(&self.kinds);
                for l in 0..n {
                    if !m.get(i, l).is_zero() {
                        acc = &acc + &self.get(l, j).scale_scalar(m.get(i, l));
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// The matrix trace, an element of `𝕎`.
    pub fn trace(&self) -> WeylElement {
        let mut acc = WeylElement::zero(&self.kinds);
        for i in 0..self.size {
            acc = &acc + self.get(i, i);
        }
        acc
    }

    /// Entrywise homogeneous part of polynomial degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        self.map(|e| e.homogeneous_part(d))
    }

    /// Entrywise constant terms, as a scalar matrix; `None` if any constant
    /// term depends on ħ.
    pub fn constant_matrix(&self) -> Option<crate::linalg::Matrix> {
        let n = self.size;
        let mut m = crate::linalg::Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, self.get(i, j).constant_term().as_scalar()?);
            }
        }
        Some(m)
    }
}

impl fmt::Display for MatrixWeyl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.size {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.size {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

impl fmt::Debug for MatrixWeyl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_normalization() {
        let k = vec![PairKind::Real];
        let p = MatrixWeyl::scalar(&WeylElement::x(&k, 1), 2);
        let q = MatrixWeyl::elementary(&WeylElement::y(&k, 1), 2, 1, 1);
        let b = p.bracket(&q).unwrap();
        assert_eq!(b, MatrixWeyl::elementary(&WeylElement::one(&k), 2, 1, 1));
    }

    #[test]
    fn star_is_associative_on_samples() {
        use rand::SeedableRng;
        let mut rng = rand::rngs::StdRng::seed_from_u64(2);
        let k = vec![PairKind::Real];
        let mut rand_m = || {
            let mut m = MatrixWeyl::zero(&k, 2);
            for i in 0..2 {
                for j in 0..2 {
                    m.set(i, j, crate::sample::weyl(&mut rng, &k, 2, 2, 1, false));
                }
            }
            m
        };
        let (a, b, c) = (rand_m(), rand_m(), rand_m());
        assert_eq!(a.star(&b).unwrap().star(&c).unwrap(), a.star(&b.star(&c).unwrap()).unwrap());
    }
}
