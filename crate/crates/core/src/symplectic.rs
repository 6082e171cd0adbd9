//! Finite-order linear symplectomorphisms, their fixed/normal splitting and
//! conjugacy-class censuses of finite subgroups.
//!
//! A matrix `M` acts on linear functions by `g(y_i) = Σ_j M_{ji} y_j` over the
//! ordered generators `(p_1 … p_n, q_1 … q_n)`; the matrix product `GH` is the
//! composite `a ↦ g(h(a))`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{cyclo::lcm, rat, CycloScalar};
use crate::weyl::{PairKind, WeylElement};

/// Largest order probed when computing the order of a matrix.
pub const MAX_ORDER: u32 = 360;

/// The symplectic form `ω(u, v) = Σ_j (u_{p_j} v_{q_j} − u_{q_j} v_{p_j})` on
/// coefficient vectors.
pub fn omega(u: &[CycloScalar], v: &[CycloScalar]) -> CycloScalar {
    let n = u.len() / 2;
    let mut acc = CycloScalar::zero();
    for j in 0..n {
        acc += &(&(&u[j] * &v[n + j]) - &(&u[n + j] * &v[j]));
    }
    acc
}

fn standard_j(n: usize) -> Matrix {
    let mut j = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j.set(i, n + i, CycloScalar::one());
        j.set(n + i, i, CycloScalar::from_int(-1));
    }
    j
}

/// A finite-order element of `Sp_{2n}` over ℚ(ζ_L).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticMap {
    n: usize,
    matrix: Matrix,
    order: u32,
}

impl SymplecticMap {
    /// Validates symplecticity and computes the (minimal) order.
    pub fn new(matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() % 2 != 0 {
            return Err(Error::DimensionMismatch(format!("{}x{} is not 2n x 2n", matrix.rows(), matrix.cols())));
        }
        let n = matrix.rows() / 2;
        let j = standard_j(n);
        if matrix.transpose().mul(&j).mul(&matrix) != j {
            return Err(Error::NotSymplectic);
        }
        let mut acc = matrix.clone();
        for order in 1..=MAX_ORDER {
            if acc.is_identity() {
                return Ok(SymplecticMap { n, matrix, order });
            }
            acc = acc.mul(&matrix);
        }
        Err(Error::InfiniteOrder(MAX_ORDER))
    }

    pub fn identity(n: usize) -> Self {
        SymplecticMap { n, matrix: Matrix::identity(2 * n), order: 1 }
    }

    pub fn minus_identity(n: usize) -> Self {
        let order = if n == 0 { 1 } else { 2 };
        SymplecticMap { n, matrix: Matrix::identity(2 * n).scale(&CycloScalar::from_int(-1)), order }
    }

    /// Block rotation acting by `z_j ↦ ζ_{m_j}^{e_j} z_j` on pair `j`, where
    /// `z_j = q_j + i p_j`. Use `(1, 0)` for a fixed pair.
    pub fn rotation(blocks: &[(u32, i64)]) -> Self {
        let n = blocks.len();
        let mut m = Matrix::zeros(2 * n, 2 * n);
        for (j, &(ord, e)) in blocks.iter().enumerate() {
            let lam = CycloScalar::root(ord, e);
            let half = CycloScalar::from_rational(rat(1, 2));
            let cos = &(&lam + &lam.conj()) * &half;
            let sin = &(&(&lam - &lam.conj()) * &half) * &(-CycloScalar::i());
            // g(p) = cos p + sin q, g(q) = −sin p + cos q
            m.set(j, j, cos.clone());
            m.set(n + j, j, sin.clone());
            m.set(j, n + j, -&sin);
            m.set(n + j, n + j, cos);
        }
        Self::new(m).expect("rotation blocks are symplectic of finite order")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// `self ∘ other` on functions: `a ↦ self(other(a))`.
    pub fn compose(&self, other: &SymplecticMap) -> SymplecticMap {
        let m = self.matrix.mul(&other.matrix);
        Self::new(m).expect("product of finite-order symplectic maps in a finite group")
    }

    pub fn inverse(&self) -> SymplecticMap {
        SymplecticMap { n: self.n, matrix: self.matrix.pow(self.order - 1), order: self.order }
    }

    pub fn pow(&self, e: u32) -> SymplecticMap {
        let m = self.matrix.pow(e % self.order);
        Self::new(m).expect("power of a finite-order map")
    }

    /// Images of the generators of `kinds` under the map, in the same basis.
    fn generator_images(&self, kinds: &[PairKind]) -> Result<Vec<WeylElement>> {
        let n = self.n;
        let real = vec![PairKind::Real; n];
        let complex_pairs: Vec<usize> = (0..n).filter(|&j| kinds[j] == PairKind::Complex).collect();
        let real_images: Vec<WeylElement> = (0..2 * n)
            .map(|i| {
                let mut img = WeylElement::zero(&real);
                for j in 0..2 * n {
                    let c = self.matrix.get(j, i);
                    if !c.is_zero() {
                        img = &img + &WeylElement::generator(&real, j).scale_scalar(c);
                    }
                }
                img
            })
            .collect();
        (0..2 * n)
            .map(|idx| {
                let g = WeylElement::generator(kinds, idx).to_real_basis(&complex_pairs)?;
                g.substitute(&real_images).to_complex_basis(&complex_pairs)
            })
            .collect()
    }

    /// The induced automorphism of the Weyl algebra.
    pub fn apply(&self, a: &WeylElement) -> Result<WeylElement> {
        if a.n() != self.n {
            return Err(Error::DimensionMismatch(format!("map on {} pairs applied to element on {}", self.n, a.n())));
        }
        if self.matrix.is_identity() {
            return Ok(a.clone());
        }
        Ok(a.substitute(&self.generator_images(a.kinds())?))
    }

    /// Kernel/image splitting with the normal eigenvalues.
    pub fn fixed_decomposition(&self) -> Result<AdaptedForm> {
        AdaptedForm::of(self)
    }
}

/// Apply a symplectomorphism to a Weyl element.
pub fn apply_symplectomorphism(g: &SymplecticMap, a: &WeylElement) -> Result<WeylElement> {
    g.apply(a)
}

/// Fixed/normal decomposition of a finite-order symplectic map.
#[derive(Clone, Debug)]
pub struct AdaptedForm {
    /// Half-dimension of the fixed space.
    pub k: usize,
    /// Basis of `ker(1 − γ)` (invariant linear functions).
    pub fixed_basis: Vec<Vec<CycloScalar>>,
    /// Holomorphic eigenvalues on the normal part, with multiplicity.
    pub normal_eigenvalues: Vec<CycloScalar>,
    /// Complex eigenvectors spanning the complexified normal space, grouped by
    /// eigenvalue.
    pub normal_basis: Vec<(CycloScalar, Vec<Vec<CycloScalar>>)>,
    /// Cyclotomic level containing all eigenvalues.
    pub level: u32,
}

impl AdaptedForm {
    fn of(g: &SymplecticMap) -> Result<Self> {
        let n2 = 2 * g.n;
        let level = lcm(4, g.order);
        let id = Matrix::identity(n2);
        let fixed_basis = id.sub(&g.matrix).kernel();
        if fixed_basis.len() % 2 != 0 {
            return Err(Error::RaiseLevel(level));
        }
        let image = id.sub(&g.matrix).column_space();
        // ω must vanish between the two spaces and be nondegenerate on each
        for f in &fixed_basis {
            if image.iter().any(|v| !omega(f, v).is_zero()) {
                return Err(Error::NotSymplectic);
            }
        }
        let gram = |vs: &[Vec<CycloScalar>]| {
            Matrix::from_rows(vs.iter().map(|a| vs.iter().map(|b| omega(a, b)).collect()).collect())
        };
        if gram(&fixed_basis).rank() != fixed_basis.len() || gram(&image).rank() != image.len() {
            return Err(Error::NotSymplectic);
        }
        let mut normal_eigenvalues = Vec::new();
        let mut normal_basis = Vec::new();
        let mut total = fixed_basis.len();
        for e in 1..level as i64 {
            if (e * g.order as i64) % level as i64 != 0 {
                continue;
            }
            let lam = CycloScalar::root(level, e);
            let space = g.matrix.sub(&id.scale(&lam)).kernel();
            if space.is_empty() {
                continue;
            }
            total += space.len();
            let minus_i = -CycloScalar::i();
            let herm = Matrix::from_rows(
                space
                    .iter()
                    .map(|a| space.iter().map(|b| {
                        let bc: Vec<CycloScalar> = b.iter().map(|x| x.conj()).collect();
                        &minus_i * &omega(a, &bc)
                    }).collect())
                    .collect(),
            );
            let (pos, _) = herm.hermitian_signature();
            for _ in 0..pos {
                normal_eigenvalues.push(lam.clone());
            }
            normal_basis.push((lam, space));
        }
        if total != n2 {
            return Err(Error::RaiseLevel(level));
        }
        Ok(AdaptedForm { k: fixed_basis.len() / 2, fixed_basis, normal_eigenvalues, normal_basis, level })
    }

    /// `κ_j = (1 + λ̄_j)/(1 − λ̄_j)`: the diagonal of the inverse Cayley
    /// matrix in eigen-coordinates.
    pub fn cayley_diagonal(&self) -> Result<Vec<CycloScalar>> {
        self.normal_eigenvalues.iter().map(cayley_entry).collect()
    }
}

/// `(1 + λ̄)/(1 − λ̄)`.
pub fn cayley_entry(lam: &CycloScalar) -> Result<CycloScalar> {
    let lb = lam.conj();
    let den = &CycloScalar::one() - &lb;
    if den.is_zero() {
        return Err(Error::EigenvalueOne);
    }
    Ok(&(&CycloScalar::one() + &lb) / &den)
}

/// `(1 + γ⁻¹)(1 − γ⁻¹)⁻¹`, the inverse of `c(γ⁻¹)`, computed without ever
/// forming `c(γ⁻¹)` so that eigenvalue −1 is regular.
pub fn cayley_inverse(g: &Matrix) -> Result<Matrix> {
    let gi = g.inverse()?;
    let id = Matrix::identity(g.rows());
    let den = id.sub(&gi).inverse().map_err(|_| Error::EigenvalueOne)?;
    Ok(id.add(&gi).mul(&den))
}

/// Matrix of `γ` restricted to its normal space `im(1 − γ)`, in the basis
/// returned by [`Matrix::column_space`].
pub fn normal_restriction(g: &SymplecticMap) -> Result<Matrix> {
    let id = Matrix::identity(2 * g.n);
    let basis = Matrix::from_columns(&id.sub(&g.matrix).column_space());
    if basis.cols() == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    basis.solve(&g.matrix.mul(&basis))
}

/// `(m, e)` with `λ = ζ_m^e`, `m` the multiplicative order and `0 ≤ e < m`,
/// when `λ` is a root of unity of order at most [`MAX_ORDER`].
pub fn root_exponent(lam: &CycloScalar) -> Option<(u32, i64)> {
    let m = lam.root_order(MAX_ORDER)?;
    (0..m as i64).find(|&e| &CycloScalar::root(m, e) == lam).map(|e| (m, e))
}

/// A finite subgroup of `Sp_{2n}` given by its element list.
#[derive(Clone, Debug)]
pub struct FiniteSubgroup {
    n: usize,
    elements: Vec<SymplecticMap>,
}

impl FiniteSubgroup {
    /// Closure of the generators under composition.
    pub fn generate(n: usize, gens: &[SymplecticMap]) -> Result<Self> {
        let mut elements = vec![SymplecticMap::identity(n)];
        let mut frontier = elements.clone();
        while let Some(x) = frontier.pop() {
            for g in gens {
                if g.n != n {
                    return Err(Error::DimensionMismatch("generator size".into()));
                }
                let y = g.compose(&x);
                if !elements.iter().any(|e| e.matrix == y.matrix) {
                    if elements.len() > 10_000 {
                        return Err(Error::InfiniteOrder(MAX_ORDER));
                    }
                    elements.push(y.clone());
                    frontier.push(y);
                }
            }
        }
        Ok(FiniteSubgroup { n, elements })
    }

    /// Cyclic group generated by one element, listed as `g^0, g^1, …`.
    pub fn cyclic(g: &SymplecticMap) -> Self {
        let elements = (0..g.order).map(|e| g.pow(e)).collect();
        FiniteSubgroup { n: g.n, elements }
    }

    /// Validates closure, inverses and identity for an explicit list.
    pub fn from_elements(n: usize, elements: Vec<SymplecticMap>) -> Result<Self> {
        let has = |m: &Matrix| elements.iter().any(|e| &e.matrix == m);
        if !has(&Matrix::identity(2 * n)) {
            return Err(Error::ModelInconsistency("identity missing from group".into()));
        }
        for a in &elements {
            if !has(a.inverse().matrix()) {
                return Err(Error::ModelInconsistency("group not closed under inverse".into()));
            }
            for b in &elements {
                if !has(&a.matrix.mul(&b.matrix)) {
                    return Err(Error::ModelInconsistency("group not closed under product".into()));
                }
            }
        }
        Ok(FiniteSubgroup { n, elements })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[SymplecticMap] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, g: &SymplecticMap) -> Option<usize> {
        self.elements.iter().position(|e| e.matrix == g.matrix)
    }

    /// Conjugacy classes as lists of element indices, in order of first
    /// appearance.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.elements.len()];
        let mut classes = Vec::new();
        for i in 0..self.elements.len() {
            if seen[i] {
                continue;
            }
            let mut class = Vec::new();
            for h in &self.elements {
                let c = h.compose(&self.elements[i]).compose(&h.inverse());
                let idx = self.index_of(&c).expect("group is closed");
                if !seen[idx] {
                    seen[idx] = true;
                    class.push(idx);
                }
            }
            class.sort();
            classes.push(class);
        }
        classes
    }

    /// Number of conjugacy classes per fixed-space dimension `p`
    /// (all even `p` from 0 to 2n are present).
    pub fn l_p_census(&self) -> BTreeMap<usize, usize> {
        let mut out: BTreeMap<usize, usize> = (0..=self.n).map(|k| (2 * k, 0)).collect();
        for class in self.conjugacy_classes() {
            let g = &self.elements[class[0]];
            let p = Matrix::identity(2 * self.n).sub(&g.matrix).kernel().len();
            *out.entry(p).or_default() += 1;
        }
        out
    }
}

/// Conjugacy classes counted by fixed-space dimension.
pub fn l_p_census(g: &FiniteSubgroup) -> BTreeMap<usize, usize> {
    g.l_p_census()
}
