//! Acceptance run: one PASS/FAIL line per criterion, exact comparisons
//! throughout. Runs as a plain binary so the lines reach the test log.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::Instant;

use orbifold_index::cocycle::tau::Tau2k;
use orbifold_index::cocycle::trace::{tr_gamma, TwistedTraceData};
use orbifold_index::cocycle::twisted::TwistedCocycle;
use orbifold_index::crossed::{crossed_mul, sector_trace, CrossedElement, SectorWeights};
use orbifold_index::homology::{cycle_c2k, hkr_oracle, koszul_twisted_hh};
use orbifold_index::index::{a_hat_coefficients, algebraic_index, kawasaki_index, lefschetz_oracle, OrbifoldModel};
use orbifold_index::lie::{curvature_c, LocalRr, MatrixWeyl, RrChoice};
use orbifold_index::sample;
use orbifold_index::symplectic::{FiniteSubgroup, SymplecticMap};
use orbifold_index::weyl::{PairKind, WeylElement};
use orbifold_index::{rat, rat_int, CycloScalar, HbarSeries, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// The test eigenvalues `−1, ζ₃, ζ₄, ζ₆` as `(order, exponent)`.
const ROOTS: [(u32, i64); 4] = [(2, 1), (3, 1), (4, 1), (6, 1)];

/// `∏ (1 − λ̄)⁻¹`, computed directly.
fn det_inverse(lambdas: &[CycloScalar]) -> CycloScalar {
    let mut d = CycloScalar::one();
    for l in lambdas {
        d *= &(&CycloScalar::one() - &l.conj());
    }
    d.inverse().expect("no eigenvalue 1")
}

fn moyal_associativity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for t in 0..200 {
        let n = rng.gen_range(1..=3);
        let kinds: Vec<PairKind> =
            (0..n).map(|_| if rng.gen_bool(0.5) { PairKind::Real } else { PairKind::Complex }).collect();
        let a = sample::weyl(&mut rng, &kinds, 4, 3, 3, true);
        let b = sample::weyl(&mut rng, &kinds, 4, 3, 3, true);
        let c = sample::weyl(&mut rng, &kinds, 4, 3, 3, true);
        let l = ok(ok(a.star(&b))?.star(&c))?;
        let r = ok(a.star(&ok(b.star(&c))?))?;
        ensure(l == r, || format!("triple {t}: ({a}, {b}, {c})"))?;
    }
    Ok("200 random triples, n <= 3, degree <= 4".into())
}

fn twisted_trace_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut nonzero = 0;
    for (m, e) in ROOTS {
        let d = ok(TwistedTraceData::from_roots(&[(m, e)]))?;
        let g = ok(d.normal_map())?;
        let kinds = d.kinds();
        let unit = ok(tr_gamma(&d, &WeylElement::one(&kinds)))?;
        let expected = HbarSeries::scalar(det_inverse(&[CycloScalar::root(m, e)]));
        ensure(unit == expected, || format!("tr(1) = {unit} for zeta({m})^{e}"))?;
        for t in 0..100 {
            let a = sample::weyl(&mut rng, &kinds, 4, 3, 1, true);
            let b = sample::weyl(&mut rng, &kinds, 4, 3, 1, true);
            let lhs = ok(tr_gamma(&d, &(&a * &b)))?;
            let rhs = ok(tr_gamma(&d, &(&ok(g.apply(&b))? * &a)))?;
            ensure(lhs == rhs, || format!("zeta({m}) pair {t}: {lhs} != {rhs}"))?;
            nonzero += usize::from(!lhs.is_zero());
        }
    }
    Ok(format!("4 x 100 pairs ({nonzero} nonzero), tr(1) exact"))
}

fn cocycle_normalization() -> Outcome {
    let tau = Tau2k::new(1);
    let v = ok(tau.eval(&cycle_c2k(tau.kinds(), &[0])))?;
    ensure(v.is_one(), || format!("tau_2(c_2) = {v}"))?;
    for (m, e) in ROOTS {
        let lam = CycloScalar::root(m, e);
        let t = ok(TwistedCocycle::new(1, ok(TwistedTraceData::from_roots(&[(m, e)]))?))?;
        let v = ok(t.eval(&t.cycle()))?;
        // det⁻¹(1 − γ⁻¹) on the normal plane; λ⁻¹ = λ̄ for a root of unity
        let expected = HbarSeries::scalar(det_inverse(&[lam]));
        ensure(v == expected, || format!("zeta({m}): {v} != {expected}"))?;
    }
    Ok("tau_2(c_2) = 1; twisted value = det^-1(1 - g^-1) for 4 eigenvalues".into())
}

fn cocycle_condition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut informative = 0;
    for (k, count, density) in [(1usize, 50usize, 0.5), (2, 5, 0.2)] {
        let t = ok(TwistedCocycle::new(k, ok(TwistedTraceData::from_roots(&[(3, 1)]))?))?;
        for s in 0..count {
            let slots: Vec<WeylElement> = (0..2 * k + 2)
                .map(|_| sample::weyl_split_with_density(&mut rng, k, 1, 2, 1, density))
                .collect();
            let b = ok(t.coboundary(&slots))?;
            ensure(b.is_zero(), || format!("k = {k}, tuple {s}: b tau = {b}"))?;
            let mut first = vec![ok(slots[0].star(&slots[1]))?];
            first.extend_from_slice(&slots[2..]);
            informative += usize::from(!ok(t.eval_tuple(&first))?.is_zero());
        }
    }
    ensure(informative > 0, || "every sampled boundary term vanished".into())?;
    Ok(format!("50 tuples at k = 1, 5 at k = 2 ({informative} with nonzero terms)"))
}

fn invariance_and_insertion() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    for roots in [(2u32, 1i64), (3, 1)] {
        let t = ok(TwistedCocycle::new(1, ok(TwistedTraceData::from_roots(&[roots]))?))?;
        let basis = t.h_basis();
        for s in 0..20 {
            let slots: Vec<WeylElement> = (0..3).map(|_| sample::weyl_split(&mut rng, 1, 1, 2, 1)).collect();
            for h in &basis {
                let d = ok(t.invariance_defect(h, &slots))?;
                ensure(d.is_zero(), || format!("{roots:?}, tuple {s}, h = {h}: defect {d}"))?;
                let i = ok(t.insertion_sum(h, &slots[..2]))?;
                ensure(i.is_zero(), || format!("{roots:?}, tuple {s}, h = {h}: insertion {i}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (h, tuple) pairs for lambda in {{-1, zeta(3)}}"))
}

fn twisted_hkr() -> Outcome {
    let cases: [(&str, Vec<(u32, i64)>, usize); 7] = [
        ("id, n = 1", vec![(1, 0)], 1),
        ("-1, n = 1", vec![(2, 1)], 0),
        ("zeta(3), n = 1", vec![(3, 1)], 0),
        ("id, n = 2", vec![(1, 0), (1, 0)], 2),
        ("-1, n = 2", vec![(2, 1), (2, 1)], 0),
        ("zeta(3), n = 2", vec![(3, 1), (3, 2)], 0),
        ("zeta(3) on one pair, n = 2", vec![(1, 0), (3, 1)], 1),
    ];
    for (name, blocks, fixed) in &cases {
        let g = SymplecticMap::rotation(blocks);
        let got = koszul_twisted_hh(&g, 4);
        let want = hkr_oracle(*fixed, blocks.len(), 4);
        ensure(got == want, || format!("{name}: {got:?} != {want:?}"))?;
    }
    Ok(format!("{} maps, internal degree <= 4", cases.len()))
}

fn local_riemann_roch() -> Outcome {
    let mut checked = 0;
    for roots in [(2u32, 1i64), (3, 1), (4, 1)] {
        let data = ok(TwistedTraceData::from_roots(&[roots]))?;
        for size in 1..=2 {
            let rr = ok(LocalRr::new(1, data.clone(), size))?;
            let kinds = rr.theta().kinds().to_vec();
            let p1 = MatrixWeyl::scalar(&WeylElement::x(&kinds, 1), size);
            let mut choices = vec![RrChoice::U { i: 1, j: 1 }, RrChoice::W { i: 1, s: 1 }];
            choices.extend((1..=size).map(|r| RrChoice::V { i: 1, r }));
            for c in choices {
                let rep = ok(rr.check(&[c]))?;
                ensure(rep.holds(), || format!("{c} at {roots:?}, N = {size}: {} != {}", rep.lhs, rep.rhs))?;
                checked += 1;
                let curv = ok(curvature_c(&p1, &ok(c.element(&kinds, 1, size))?))?.to_string();
                let expected = match (c, size) {
                    (RrChoice::U { .. }, 1) => Some("[-p1*q1]"),
                    (RrChoice::U { .. }, 2) => Some("[-p1*q1, 0; 0, -p1*q1]"),
                    (RrChoice::V { r: 1, .. }, 1) => Some("[-1]"),
                    (RrChoice::V { r: 1, .. }, 2) => Some("[-1, 0; 0, 0]"),
                    (RrChoice::V { r: 2, .. }, 2) => Some("[0, 0; 0, -1]"),
                    _ => None,
                };
                if let Some(e) = expected {
                    ensure(curv == e, || format!("C(p1, {c}) at N = {size} renders as {curv}"))?;
                }
            }
        }
    }
    Ok(format!("{checked} cases over lambda in {{-1, zeta(3), zeta(4)}}, N in {{1, 2}}; C(p1, u11) = -p1*q1, C(p1, v1r) = -E_r"))
}

/// `B_0 … B_n` from `Σ_{j<m+1} C(m+1, j) B_j = 0`.
fn bernoulli(n: usize) -> Vec<Rational> {
    let mut b = vec![rat_int(1)];
    for m in 1..=n {
        let mut acc = rat_int(0);
        let mut binom = rat_int(1);
        for (j, bj) in b.iter().enumerate() {
            acc += &binom * bj;
            binom = binom * rat_int((m + 1 - j) as i64) / rat_int((j + 1) as i64);
        }
        b.push(-acc / rat_int((m + 1) as i64));
    }
    b
}

fn a_hat_series() -> Outcome {
    let c = a_hat_coefficients(8);
    ensure(c[2] == rat(-1, 24), || format!("x^2 coefficient {}", c[2]))?;
    ensure(c[4] == rat(7, 5760), || format!("x^4 coefficient {}", c[4]))?;
    // (x/2)/sinh(x/2) = Σ (2 − 2^{2j}) B_{2j} x^{2j} / (4^j (2j)!)
    let b = bernoulli(8);
    let mut fact = rat_int(1);
    for j in 0..=4usize {
        if j > 0 {
            fact *= rat_int(((2 * j - 1) * (2 * j)) as i64);
        }
        let four = rat_int(4i64.pow(j as u32));
        let expected = (rat_int(2) - &four) * &b[2 * j] / (&four * &fact);
        ensure(c[2 * j] == expected, || format!("x^{} coefficient {} != {expected}", 2 * j, c[2 * j]))?;
    }
    for (i, x) in c.iter().enumerate().filter(|(i, _)| i % 2 == 1) {
        ensure(*x == rat_int(0), || format!("odd coefficient x^{i} = {x}"))?;
    }
    Ok("-1/24, 7/5760, and the Bernoulli series through x^8".into())
}

fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn load(name: &str) -> Result<OrbifoldModel, String> {
    let text = std::fs::read_to_string(models_dir().join(name)).map_err(|e| format!("{name}: {e}"))?;
    OrbifoldModel::from_json_str(&text).map_err(|e| format!("{name}: {e}"))
}

fn index_formula() -> Outcome {
    let mut cases: Vec<(String, CycloScalar)> = Vec::new();
    for n in 1..=8u32 {
        for a in 0..n {
            cases.push((format!("pt_z{n}_chi{a}.model"), CycloScalar::from_int(i64::from(a == 0))));
        }
    }
    for m in 2..=4 {
        cases.push((format!("football_z{m}.model"), CycloScalar::one()));
    }
    cases.push(("torus_z2.model".into(), CycloScalar::one()));
    for (name, expected) in &cases {
        let model = load(name)?;
        ensure(model.geometric, || format!("{name} is not marked geometric"))?;
        let k = kawasaki_index(&model).map_err(|e| format!("{name}: {e}"))?;
        let o = ok(lefschetz_oracle(model.action.as_ref().ok_or(format!("{name}: no action"))?))?;
        ensure(&k == expected && o == k, || format!("{name}: index {k}, oracle {o}, expected {expected}"))?;
    }
    let mut same = load("football_z3.model")?;
    for s in &mut same.sectors {
        s.f = s.e.clone();
    }
    ensure(ok(kawasaki_index(&same))?.is_zero(), || "E = F is not 0".into())?;
    Ok(format!("{} models equal the Lefschetz oracle; E = F gives 0", cases.len()))
}

fn hbar_structure() -> Outcome {
    for m in 2..=4u32 {
        let flat = ok(algebraic_index(&load(&format!("football_z{m}.model"))?))?;
        ensure(flat == HbarSeries::one(), || format!("Z_{m}, c = 0: {flat}"))?;
        for c in [rat_int(1), rat_int(3), rat(-5, 2)] {
            let model = orbifold_index::index::gallery::football(m, c.clone());
            let idx = ok(algebraic_index(&model))?;
            // only the main sector sees ω = c·x/2; there Â·Ch = 1 + x/2 and
            // exp(−ω/ħ) = 1 − ω/ħ, so the ħ⁻¹ term is −(c/2)∫x = −(c/2)(2/m)
            let expected = HbarSeries::from_terms([
                (-1, CycloScalar::from_rational(-(c.clone() / rat_int(2)) * rat(2, m as i64))),
                (0, CycloScalar::one()),
            ]);
            ensure(idx == expected, || format!("Z_{m}, c = {c}: {idx} != {expected}"))?;
        }
    }
    Ok("h^-1 coefficient -c/m for m in {2, 3, 4}, c in {1, 3, -5/2}; c = 0 gives 1".into())
}

fn crossed_product_trace() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut nonzero = 0;
    for m in [2u32, 3] {
        let g = Arc::new(FiniteSubgroup::cyclic(&SymplecticMap::rotation(&[(m, 1)])));
        let kinds = vec![PairKind::Complex];
        let mut w = SectorWeights::zero(&g);
        for (j, class) in SectorWeights::fixed_point_free_classes(&g).into_iter().enumerate() {
            w.set_class(class, HbarSeries::int(j as i64 + 2));
        }
        let random = |rng: &mut ChaCha8Rng| -> Result<CrossedElement, String> {
            let mut x = CrossedElement::zero(&g, &kinds);
            for i in 0..g.order() {
                x = ok(x.add(&ok(CrossedElement::single(&g, i, sample::weyl(rng, &kinds, 3, 3, 1, true)))?))?;
            }
            Ok(x)
        };
        for t in 0..100 {
            let a = random(&mut rng)?;
            let b = random(&mut rng)?;
            let ab = ok(sector_trace(&w, &ok(crossed_mul(&a, &b))?))?;
            let ba = ok(sector_trace(&w, &ok(crossed_mul(&b, &a))?))?;
            ensure(ab == ba, || format!("Z_{m} pair {t}: {ab} != {ba}"))?;
            nonzero += usize::from(!ab.is_zero());
        }
    }
    ensure(nonzero > 0, || "every sampled trace vanished".into())?;
    // abelian rotation groups: every element is its own class, and only the
    // identity fixes a direction
    let census = |blocks: &[(u32, i64)]| FiniteSubgroup::cyclic(&SymplecticMap::rotation(blocks)).l_p_census();
    let expected = |pairs: &[(usize, usize)]| pairs.iter().copied().collect::<BTreeMap<usize, usize>>();
    for m in [2u32, 3, 4] {
        let got = census(&[(m, 1)]);
        let want = expected(&[(0, m as usize - 1), (2, 1)]);
        ensure(got == want, || format!("Z_{m} in Sp_2: {got:?}"))?;
    }
    let got = census(&[(2, 1), (1, 0)]);
    ensure(got == expected(&[(0, 0), (2, 1), (4, 1)]), || format!("Z_2 on one pair of Sp_4: {got:?}"))?;
    Ok(format!("2 x 100 pairs ({nonzero} nonzero traces); census for Z_2, Z_3, Z_4 (and Z_2 in Sp_4)"))
}

fn orbidx(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_orbidx")).args(args).output().map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("orbidx {} exited with {:?}", args.join(" "), out.status.code()))?;
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let football = models_dir().join("football_z3_omega3.model").to_string_lossy().into_owned();
    let runs: Vec<Vec<&str>> = vec![
        vec!["verify", "cocycle", "--k", "1", "--lambda", "zeta(3)", "--seed", "3"],
        vec!["verify", "trace", "--lambda", "zeta(4)", "--lambda", "-1", "--samples", "40"],
        vec!["verify", "local-rr", "--k", "1", "--lambda", "zeta(4)", "--N", "2"],
        vec!["verify", "homology", "--k", "1", "--lambda", "zeta(3)"],
        vec!["--format", "structured", "index", &football, "--oracle"],
        vec!["star", "star(p1, q1^2)", "z2*zb2", "p1 + zeta(3)*h"],
    ];
    for args in &runs {
        let mut outputs = Vec::new();
        for threads in ["1", "4", "1"] {
            let mut full = vec!["--threads", threads];
            full.extend(args.iter().copied());
            outputs.push(orbidx(&full)?);
        }
        ensure(outputs.windows(2).all(|w| w[0] == w[1]), || format!("output of `{}` varies", args.join(" ")))?;
    }
    Ok(format!("{} commands byte-identical across 3 runs with 1 and 4 threads", runs.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("Moyal associativity", moyal_associativity),
        ("twisted trace identity", twisted_trace_identity),
        ("cocycle normalization", cocycle_normalization),
        ("twisted cocycle condition", cocycle_condition),
        ("h-invariance and insertion vanishing", invariance_and_insertion),
        ("twisted HKR", twisted_hkr),
        ("local Riemann-Roch", local_riemann_roch),
        ("A-hat series", a_hat_series),
        ("index formula vs Lefschetz oracle", index_formula),
        ("algebraic index h-structure", hbar_structure),
        ("crossed-product trace", crossed_product_trace),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
