//! The `verify` suites: seeded random checks of the library identities.
//!
//! Samples are drawn sequentially from one seeded generator, then evaluated
//! on worker threads; items are reported in sampling order, so the output
//! does not depend on the thread count.

use orbifold_index::cocycle::trace::{tr_gamma, TwistedTraceData};
use orbifold_index::cocycle::twisted::TwistedCocycle;
use orbifold_index::homology::{hkr_oracle, koszul_twisted_hh};
use orbifold_index::lie::{curvature_c, LocalRr, MatrixWeyl, RrChoice, MAX_FIXED_PAIRS};
use orbifold_index::sample;
use orbifold_index::symplectic::{root_exponent, SymplecticMap};
use orbifold_index::weyl::WeylElement;
use orbifold_index::{CycloScalar, Error, HbarSeries, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One checked identity (or a batch of samples of it).
#[derive(Clone, Debug)]
pub struct Item {
    pub label: String,
    pub pass: bool,
    /// The computed value, or the first counterexample.
    pub detail: String,
}

/// Outcome of a suite.
#[derive(Clone, Debug)]
pub struct Report {
    pub suite: String,
    pub items: Vec<Item>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }
}

/// Parameters shared by the suites.
#[derive(Clone, Debug)]
pub struct SuiteParams {
    pub k: usize,
    pub lambdas: Vec<CycloScalar>,
    pub size: usize,
    pub seed: u64,
    pub samples: Option<usize>,
    pub degree: Option<u32>,
    pub level: u32,
    pub threads: usize,
}

/// Order-preserving parallel map over `threads` workers.
pub fn par_map<T: Sync, U: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> U + Sync) -> Vec<U> {
    let threads = threads.max(1).min(items.len().max(1));
    if threads == 1 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    std::thread::scope(|scope| {
        let f = &f;
        let handles: Vec<_> =
            items.chunks(chunk).map(|c| scope.spawn(move || c.iter().map(f).collect::<Vec<U>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("suite worker panicked")).collect()
    })
}

/// Batches `results` (one per sample) into a single item.
fn batch(label: String, results: Vec<Result<Option<String>>>) -> Result<Item> {
    let total = results.len();
    let mut failure = None;
    for (i, r) in results.into_iter().enumerate() {
        if let Some(msg) = r? {
            failure.get_or_insert(format!("sample {}: {msg}", i + 1));
        }
    }
    Ok(match failure {
        None => Item { label, pass: true, detail: format!("{total}/{total} samples") },
        Some(detail) => Item { label, pass: false, detail },
    })
}

fn zero_or(v: HbarSeries, what: &str) -> Option<String> {
    (!v.is_zero()).then(|| format!("{what} = {v}"))
}

fn equal_or(lhs: HbarSeries, rhs: HbarSeries) -> Option<String> {
    (lhs != rhs).then(|| format!("{lhs} != {rhs}"))
}

fn default_lambdas(p: &SuiteParams) -> Vec<CycloScalar> {
    if p.lambdas.is_empty() {
        vec![CycloScalar::from_int(-1)]
    } else {
        p.lambdas.clone()
    }
}

fn render_lambdas(l: &[CycloScalar]) -> String {
    l.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// `τ^γ_{2k}`: normalization on the cycle, `b_γ τ^γ = 0`, and for `k = 1`
/// invariance under `𝔥` and vanishing of `𝔥`-insertions.
pub fn cocycle(p: &SuiteParams) -> Result<Report> {
    if p.k == 0 || p.k > 2 {
        return Err(Error::Unsupported(format!("cocycle suite needs k in 1..=2, got {}", p.k)));
    }
    let lambdas = default_lambdas(p);
    if lambdas.len() > 2 {
        return Err(Error::Unsupported(format!("cocycle suite supports at most 2 normal pairs, got {}", lambdas.len())));
    }
    let data = TwistedTraceData::from_eigenvalues(lambdas.clone())?;
    let t = TwistedCocycle::new(p.k, data.clone())?;
    let deg = p.degree.unwrap_or(2);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut items = Vec::new();

    let norm = t.eval(&t.cycle())?;
    let expected = HbarSeries::scalar(data.normalizer().clone());
    items.push(Item {
        label: format!("normalization on c_{} [lambda = {}]", 2 * p.k, render_lambdas(&lambdas)),
        pass: norm == expected,
        detail: norm.to_string(),
    });

    let count = p.samples.unwrap_or(if p.k == 1 { 50 } else { 5 });
    // dense samples on two fixed pairs expand into too many monomial tuples
    let density = if p.k == 1 { 0.5 } else { 0.2 };
    let draw = |rng: &mut ChaCha8Rng, n: usize| -> Vec<WeylElement> {
        (0..n).map(|_| sample::weyl_split_with_density(rng, p.k, data.rank(), deg, p.level, density)).collect()
    };
    let tuples: Vec<Vec<WeylElement>> = (0..count).map(|_| draw(&mut rng, 2 * p.k + 2)).collect();
    let results = par_map(&tuples, p.threads, |s| t.coboundary(s).map(|v| zero_or(v, "b tau")));
    let mut item = batch(format!("coboundary on random {}-tuples", 2 * p.k + 2), results)?;
    // a sample is informative when its first boundary term is already nonzero
    let informative = par_map(&tuples, p.threads, |s| -> Result<bool> {
        let mut first = vec![s[0].star(&s[1])?];
        first.extend_from_slice(&s[2..]);
        Ok(!t.eval_tuple(&first)?.is_zero())
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    if item.pass {
        item.detail.push_str(&format!(", {} with nonzero terms", informative.iter().filter(|&&b| b).count()));
    }
    items.push(item);

    if p.k == 1 {
        let count = p.samples.unwrap_or(20).min(20);
        let tuples: Vec<Vec<WeylElement>> = (0..count).map(|_| draw(&mut rng, 2 * p.k + 1)).collect();
        for h in t.h_basis() {
            let results = par_map(&tuples, p.threads, |s| t.invariance_defect(&h, s).map(|v| zero_or(v, "defect")));
            items.push(batch(format!("invariance under {h}"), results)?);
            let results = par_map(&tuples, p.threads, |s| {
                t.insertion_sum(&h, &s[..2 * p.k]).map(|v| zero_or(v, "insertion"))
            });
            items.push(batch(format!("insertion of {h}"), results)?);
        }
    }
    Ok(Report { suite: "cocycle".into(), items })
}

/// `tr_γ(1) = ∏(1 − λ̄)⁻¹` and `tr_γ(a ⋆ b) = tr_γ(γ(b) ⋆ a)`.
pub fn trace(p: &SuiteParams) -> Result<Report> {
    let lambdas = default_lambdas(p);
    if lambdas.len() > 3 {
        return Err(Error::Unsupported(format!("trace suite supports at most 3 normal pairs, got {}", lambdas.len())));
    }
    let data = TwistedTraceData::from_eigenvalues(lambdas.clone())?;
    let g = data.normal_map()?;
    let kinds = data.kinds();
    let mut items = Vec::new();

    let mut expected = CycloScalar::one();
    for l in &lambdas {
        expected *= &(&CycloScalar::one() - &l.conj());
    }
    let expected = HbarSeries::scalar(expected.inverse()?);
    let unit = tr_gamma(&data, &WeylElement::one(&kinds))?;
    items.push(Item {
        label: format!("tr(1) [lambda = {}]", render_lambdas(&lambdas)),
        pass: unit == expected,
        detail: unit.to_string(),
    });

    let deg = p.degree.unwrap_or(4);
    let count = p.samples.unwrap_or(100);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let pairs: Vec<(WeylElement, WeylElement)> = (0..count)
        .map(|_| {
            let a = sample::weyl(&mut rng, &kinds, deg, 3, p.level, true);
            let b = sample::weyl(&mut rng, &kinds, deg, 3, p.level, true);
            (a, b)
        })
        .collect();
    let results = par_map(&pairs, p.threads, |(a, b)| -> Result<Option<String>> {
        let lhs = tr_gamma(&data, &(a * b))?;
        let rhs = tr_gamma(&data, &(&g.apply(b)? * a))?;
        Ok(equal_or(lhs, rhs))
    });
    items.push(batch("tr(a*b) = tr(g(b)*a) on random pairs".into(), results)?);
    Ok(Report { suite: "trace".into(), items })
}

/// Every choice of `x_i ∈ {u_ij, v_ir, w_is}` per fixed pair.
fn choice_grid(k: usize, size: usize, normal: usize) -> Vec<Vec<RrChoice>> {
    let per_pair = |i: usize| -> Vec<RrChoice> {
        let mut v: Vec<RrChoice> = (1..=k).map(|j| RrChoice::U { i, j }).collect();
        v.extend((1..=size).map(|r| RrChoice::V { i, r }));
        v.extend((1..=normal).map(|s| RrChoice::W { i, s }));
        v
    };
    let mut grid = vec![vec![]];
    for i in 1..=k {
        grid = grid
            .into_iter()
            .flat_map(|prefix: Vec<RrChoice>| {
                per_pair(i).into_iter().map(move |c| {
                    let mut next = prefix.clone();
                    next.push(c);
                    next
                })
            })
            .collect();
    }
    grid
}

/// Local Riemann–Roch on the trivial rank-`N` bundle, over the full choice
/// grid, with the curvature values on `p_1` for `k = 1`.
pub fn local_rr(p: &SuiteParams) -> Result<Report> {
    if p.k == 0 || p.k > MAX_FIXED_PAIRS {
        return Err(Error::Unsupported(format!("local-rr suite needs k in 1..={MAX_FIXED_PAIRS}, got {}", p.k)));
    }
    if p.size == 0 || p.size > 3 {
        return Err(Error::Unsupported(format!("local-rr suite needs N in 1..=3, got {}", p.size)));
    }
    let lambdas = default_lambdas(p);
    if lambdas.len() > 2 {
        return Err(Error::Unsupported(format!("local-rr suite supports at most 2 normal pairs, got {}", lambdas.len())));
    }
    let data = TwistedTraceData::from_eigenvalues(lambdas)?;
    let rr = LocalRr::new(p.k, data.clone(), p.size)?;
    let mut items = Vec::new();

    if p.k == 1 {
        let kinds = rr.theta().kinds().to_vec();
        let p1 = MatrixWeyl::scalar(&WeylElement::x(&kinds, 1), p.size);
        for c in choice_grid(1, p.size, data.rank()).into_iter().flatten() {
            let value = curvature_c(&p1, &c.element(&kinds, 1, p.size)?)?;
            let expected = match c {
                RrChoice::U { .. } => {
                    let pq = WeylElement::x(&kinds, 1).mul_commutative(&WeylElement::y(&kinds, 1));
                    MatrixWeyl::scalar(&pq.scale(&HbarSeries::int(-1)), p.size)
                }
                RrChoice::V { r, .. } => {
                    MatrixWeyl::elementary(&WeylElement::one(&kinds), p.size, r - 1, r - 1).scale(&HbarSeries::int(-1))
                }
                RrChoice::W { s, .. } => {
                    let zz = WeylElement::x(&kinds, 1 + s).mul_commutative(&WeylElement::y(&kinds, 1 + s));
                    MatrixWeyl::scalar(&zz.scale(&HbarSeries::int(-1)), p.size)
                }
            };
            items.push(Item { label: format!("C(p1, {c})"), pass: value == expected, detail: value.to_string() });
        }
    }

    let grid = choice_grid(p.k, p.size, data.rank());
    let results = par_map(&grid, p.threads, |c| rr.check(c));
    for (c, r) in grid.iter().zip(results) {
        let r = r?;
        let label = c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let detail = if r.holds() { r.lhs.to_string() } else { format!("{} != {}", r.lhs, r.rhs) };
        items.push(Item { label: format!("ev1 Theta = chi(P) on ({label})"), pass: r.holds(), detail });
    }
    Ok(Report { suite: "local-rr".into(), items })
}

/// Twisted Koszul homology against the HKR count on the fixed pairs. An
/// eigenvalue `1` in the list adds a fixed pair.
pub fn homology(p: &SuiteParams) -> Result<Report> {
    let mut blocks = vec![(1u32, 0i64); p.k];
    let mut fixed = p.k;
    for l in &p.lambdas {
        if l.is_one() {
            fixed += 1;
            blocks.push((1, 0));
        } else {
            blocks.push(root_exponent(l).ok_or_else(|| Error::Unsupported(format!("{l} is not a root of unity")))?);
        }
    }
    let n = blocks.len();
    if n == 0 || n > 2 {
        return Err(Error::Unsupported(format!("homology suite needs 1..=2 pairs, got {n}")));
    }
    let bound = p.degree.unwrap_or(4) as usize;
    if bound > 6 {
        return Err(Error::Unsupported(format!("homology suite needs degree <= 6, got {bound}")));
    }
    let g = SymplecticMap::rotation(&blocks);
    let got = koszul_twisted_hh(&g, bound);
    let want = hkr_oracle(fixed, n, bound);
    let items = got
        .iter()
        .map(|(&(deg, d), &dim)| {
            let expected = want.get(&(deg, d)).copied().unwrap_or(0);
            Item {
                label: format!("HH_{deg} in internal degree {d}"),
                pass: dim == expected,
                detail: if dim == expected { dim.to_string() } else { format!("{dim} != {expected}") },
            }
        })
        .collect();
    Ok(Report { suite: "homology".into(), items })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn choice_grid_sizes() {
        assert_eq!(choice_grid(1, 2, 1).len(), 4);
        assert_eq!(choice_grid(2, 1, 1).len(), 16);
        assert_eq!(choice_grid(1, 1, 0), vec![vec![RrChoice::U { i: 1, j: 1 }], vec![RrChoice::V { i: 1, r: 1 }]]);
    }

    #[test]
    fn par_map_keeps_order() {
        let v: Vec<u32> = (0..37).collect();
        for t in [1, 2, 5, 64] {
            assert_eq!(par_map(&v, t, |x| x * 2), v.iter().map(|x| x * 2).collect::<Vec<_>>());
        }
    }
}
