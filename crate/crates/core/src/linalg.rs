//! Dense exact linear algebra over ℚ(ζ_L).

use crate::error::{Error, Result};
use crate::scalar::CycloScalar;

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<CycloScalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![CycloScalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, CycloScalar::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<CycloScalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| CycloScalar::from_int(x)).collect()).collect())
    }

    /// Matrix with the given vectors as columns.
    pub fn from_columns(cols: &[Vec<CycloScalar>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &CycloScalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CycloScalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<CycloScalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn conj(&self) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.conj()).collect() }
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + &(a * b);
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[CycloScalar]) -> Vec<CycloScalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = CycloScalar::zero();
                for (j, x) in v.iter().enumerate() {
                    if !x.is_zero() {
                        acc += &(self.get(i, j) * x);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &CycloScalar) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| {
                let x = self.get(i, j);
                if i == j { x.is_one() } else { x.is_zero() }
            }))
    }

    pub fn pow(&self, e: u32) -> Matrix {
        let mut acc = Matrix::identity(self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Rank by fraction-free (Bareiss) elimination.
    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut prev = CycloScalar::one();
        let mut rank = 0;
        for col in 0..a.cols {
            if rank == a.rows {
                break;
            }
            let Some(p) = (rank..a.rows).find(|&r| !a.get(r, col).is_zero()) else {
                continue;
            };
            a.swap_rows(rank, p);
            let piv = a.get(rank, col).clone();
            let prev_inv = prev.inverse().expect("Bareiss pivots are nonzero");
            for r in rank + 1..a.rows {
                let f = a.get(r, col).clone();
                for c in col..a.cols {
                    let v = &(&(&piv * a.get(r, c)) - &(&f * a.get(rank, c))) * &prev_inv;
                    a.set(r, c, v);
                }
            }
            prev = piv;
            rank += 1;
        }
        rank
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| !a.get(i, col).is_zero()) else {
                continue;
            };
            a.swap_rows(r, p);
            let inv = a.get(r, col).inverse().expect("pivot is nonzero");
            for c in col..a.cols {
                let v = a.get(r, c) * &inv;
                a.set(r, c, v);
            }
            for i in 0..a.rows {
                if i != r && !a.get(i, col).is_zero() {
                    let f = a.get(i, col).clone();
                    for c in col..a.cols {
                        let v = a.get(i, c) - &(&f * a.get(r, c));
                        a.set(i, c, v);
                    }
                }
            }
            pivots.push(col);
            r += 1;
        }
        (a, pivots)
    }

    /// Basis of the right kernel.
    pub fn kernel(&self) -> Vec<Vec<CycloScalar>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![CycloScalar::zero(); self.cols];
                v[f] = CycloScalar::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r.get(row, f);
                }
                v
            })
            .collect()
    }

    /// Basis of the column space, chosen among the columns themselves.
    pub fn column_space(&self) -> Vec<Vec<CycloScalar>> {
        let (_, pivots) = self.rref();
        pivots.iter().map(|&c| self.column(c)).collect()
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!("{}x{} matrix has no inverse", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, CycloScalar::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::NotInvertible("singular matrix".into()));
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Ok(inv)
    }

    /// Solves `self · X = rhs` for a matrix `X`, assuming a solution exists
    /// and the columns of `self` are independent.
    pub fn solve(&self, rhs: &Matrix) -> Result<Matrix> {
        let mut aug = Matrix::zeros(self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            for j in 0..rhs.cols {
                aug.set(i, self.cols + j, rhs.get(i, j).clone());
            }
        }
        let (r, pivots) = aug.rref();
        if pivots.len() != self.cols || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return Err(Error::NotInvertible("system is singular or inconsistent".into()));
        }
        let mut x = Matrix::zeros(self.cols, rhs.cols);
        for i in 0..self.cols {
            for j in 0..rhs.cols {
                x.set(i, j, r.get(i, self.cols + j).clone());
            }
        }
        if self.mul(&x) != *rhs {
            return Err(Error::NotInvertible("system is inconsistent".into()));
        }
        Ok(x)
    }

    pub fn trace(&self) -> CycloScalar {
        let mut acc = CycloScalar::zero();
        for i in 0..self.rows.min(self.cols) {
            acc += self.get(i, i);
        }
        acc
    }

    pub fn block_diag(blocks: &[Matrix]) -> Matrix {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut m = Matrix::zeros(r, c);
        let (mut ro, mut co) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.set(ro + i, co + j, b.get(i, j).clone());
                }
            }
            ro += b.rows;
            co += b.cols;
        }
        m
    }

    /// Counts of positive and negative directions of a Hermitian matrix.
    ///
    /// Diagonalizes by congruence over the field; signs of the (real)
    /// diagonal entries are read off numerically.
    pub fn hermitian_signature(&self) -> (usize, usize) {
        let mut h = self.clone();
        let n = h.rows;
        let (mut pos, mut neg) = (0, 0);
        let mut active: Vec<usize> = (0..n).collect();
        while !active.is_empty() {
            let piv = active.iter().copied().find(|&i| !h.get(i, i).is_zero());
            let i = match piv {
                Some(i) => i,
                None => {
                    // all diagonal entries vanish: mix in an off-diagonal partner
                    let found = active.iter().flat_map(|&a| active.iter().map(move |&b| (a, b)))
                        .find(|&(a, b)| a != b && !h.get(a, b).is_zero());
                    let Some((a, b)) = found else { break };
                    let hab = h.get(a, b).clone();
                    // choose t ∈ {1, i} with Re(t̄ h_ab) ≠ 0
                    let re = (&hab + &hab.conj()).is_zero();
                    let t = if re { CycloScalar::i() } else { CycloScalar::one() };
                    h.add_scaled_hermitian(a, b, &t);
                    a
                }
            };
            let d = h.get(i, i).clone();
            if d.to_complex_f64().0 > 0.0 {
                pos += 1;
            } else {
                neg += 1;
            }
            let dinv = d.inverse().expect("nonzero pivot");
            for &j in &active {
                if j != i && !h.get(i, j).is_zero() {
                    let t = -(h.get(i, j) * &dinv);
                    h.add_scaled_hermitian(j, i, &t);
                }
            }
            active.retain(|&x| x != i);
        }
        (pos, neg)
    }

    /// Replaces basis vector `a` by `e_a + t e_b` in a Hermitian form, i.e.
    /// the congruence `H ↦ P* H P` with `P = 1 + t E_{ba}`.
    fn add_scaled_hermitian(&mut self, a: usize, b: usize, t: &CycloScalar) {
        let n = self.rows;
        // column a += t · column b
        for r in 0..n {
            let v = self.get(r, a) + &(t * self.get(r, b));
            self.set(r, a, v);
        }
        // row a += t̄ · row b
        let tc = t.conj();
        for c in 0..n {
            let v = self.get(a, c) + &(&tc * self.get(b, c));
            self.set(a, c, v);
        }
    }
}
