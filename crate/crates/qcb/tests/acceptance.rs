//! Acceptance criteria 1–10: one PASS/FAIL line each, nonzero exit on any
//! failure.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::rc::Rc;
use std::time::{Duration, Instant};

use qcb::datum_file::builtin;
use qcb_core::cbasis::{weights_of_trace, CanonicalBasis};
use qcb_core::coeff::{Laurent, Tally};
use qcb_core::datum::{CartanDatum, RootDatum};
use qcb_core::falg::{FAlg, FVector};
use qcb_core::modules::{MVec, ModCtx};
use qcb_core::tensor::Tensor;
use qcb_core::thicken::{Quotient, QuotientKind, ThickenCtx};
use qcb_core::udot::{DotLabel, Letter, Udot};
use qcb_core::verify::{run_check, CheckSpec, Factor};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn check(d: &RootDatum, spec: CheckSpec) -> Result<Tally, String> {
    let r = run_check(d, &spec);
    ensure(r.passed(), || r.to_string())?;
    Ok(r.tally)
}

fn word(f: &FAlg, t: &[(usize, u32)]) -> FVector {
    (*f.monomial(t)).clone()
}

/// `B = {θ^{(k)}}` in rank one.
fn rank_one_basis() -> Outcome {
    let cb = CanonicalBasis::new(CartanDatum::type_a(1));
    for k in 0..=8u32 {
        let b = cb.basis(&[k as i64]).map_err(|e| e.to_string())?;
        ensure(b.len() == 1, || format!("|B_{}| = {}", k, b.len()))?;
        ensure(b.elems[0].vector == cb.f.theta(0, k), || format!("b ≠ θ^({}) at {}", k, k))?;
        let want = if k == 0 { vec![] } else { vec![(0, k)] };
        ensure(b.elems[0].expansion == vec![(want, Laurent::one())], || format!("expansion at {}", k))?;
    }
    Ok(String::from("θ^(k), 0 ≤ k ≤ 8"))
}

/// The thickened rank-one datum: `B̃` is the two monomial families.
fn thickened_rank_one_basis() -> Outcome {
    let d = builtin("a1-thick").expect("built-in");
    let cb = CanonicalBasis::new(d.cartan.clone());
    let f = &cb.f;
    let (i, ip) = (0, 1);
    let mut weights = 0;
    for t in 0..=8usize {
        for nu in weights_of_trace(2, t) {
            let (a, b) = (nu[0] as u32, nu[1] as u32);
            let mut want = Vec::new();
            // θ_i^{(p)}θ_{i'}^{(q)}θ_i^{(r)}, p + r = a, q = b ≥ a
            if b >= a {
                for p in 0..=a {
                    want.push(word(f, &[(i, p), (ip, b), (i, a - p)]));
                }
            }
            // θ_{i'}^{(r)}θ_i^{(q)}θ_{i'}^{(p)}, p + r = b, q = a ≥ b
            if a >= b {
                for p in 0..=b {
                    want.push(word(f, &[(ip, b - p), (i, a), (ip, p)]));
                }
            }
            // the identification when q = p + r
            if a == b {
                for p in 0..=a {
                    ensure(word(f, &[(i, p), (ip, a), (i, a - p)]) == word(f, &[(ip, a - p), (i, a), (ip, p)]), || {
                        format!("identification fails at p={} q={}", p, a)
                    })?;
                }
            }
            let want: Vec<FVector> = want.into_iter().fold(Vec::new(), |mut acc, x| {
                if !acc.contains(&x) {
                    acc.push(x);
                }
                acc
            });
            let b = cb.basis(&nu).map_err(|e| e.to_string())?;
            ensure(b.len() == want.len(), || format!("|B_{:?}| = {}, expected {}", nu, b.len(), want.len()))?;
            for x in &want {
                ensure(b.index_of(x).is_some(), || format!("monomial missing from B_{:?}", nu))?;
            }
            weights += 1;
        }
    }
    Ok(format!("{} weights with tr ≤ 8", weights))
}

/// Brute-force search against the canonical basis, `dim f_ν ≤ 3`.
fn oracle() -> Outcome {
    let a2 = check(&RootDatum::type_a(2), CheckSpec::CbOracle { max_trace: 8, max_dim: 3 })?;
    let a4 = check(&builtin("a2-thick").expect("built-in"), CheckSpec::CbOracle { max_trace: 6, max_dim: 3 })?;
    Ok(format!("{} weights of A2 (tr ≤ 8), {} of A4 (tr ≤ 6)", a2.checked, a4.checked))
}

/// `E^{(k)}ξ_{-m} ◊ F^{(l)}η_n` is `E^{(k)}F^{(l)}(ξ⊗η)` if `k-l ≤ m-n` and
/// `F^{(l)}E^{(k)}(ξ⊗η)` if `k-l ≥ m-n`.
fn diamond_closed_form() -> Outcome {
    let ctx = ModCtx::new(RootDatum::type_a(1));
    let mut count = 0;
    for m in 0..=4i64 {
        for n in 0..=4i64 {
            let lw = Rc::new(ctx.simple_lw(&[m], 64).map_err(|e| e.to_string())?);
            let hw = Rc::new(ctx.simple_hw(&[n], 64).map_err(|e| e.to_string())?);
            let t = Tensor::new(ctx.cb.clone(), lw, hw).map_err(|e| e.to_string())?;
            let p = &t.pure;
            let base = vec![(vec![0], 0), (vec![0], 0)];
            let (d0, k0) = p.find(&base).ok_or("no ξ⊗η")?;
            let x0 = p.unit(&d0, k0);
            for k in 0..=m {
                for l in 0..=n {
                    let got = t.diamond_of(&vec![(vec![k], 0), (vec![l], 0)]).map_err(|e| e.to_string())?;
                    let ef = p.divided(true, 0, k as u32, &p.divided(false, 0, l as u32, &x0).map_err(|e| e.to_string())?);
                    let fe = p.divided(false, 0, l as u32, &p.divided(true, 0, k as u32, &x0).map_err(|e| e.to_string())?);
                    let (ef, fe): (MVec, MVec) = (ef.map_err(|e| e.to_string())?, fe.map_err(|e| e.to_string())?);
                    if k - l <= m - n {
                        ensure(got == ef, || format!("first branch fails at m={} n={} k={} l={}", m, n, k, l))?;
                    }
                    if k - l >= m - n {
                        ensure(got == fe, || format!("second branch fails at m={} n={} k={} l={}", m, n, k, l))?;
                    }
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{} diamond elements, m, n ≤ 4", count))
}

fn a1_ctx(zeta: i64, lambda: i64, depth: usize) -> Result<Rc<ThickenCtx>, String> {
    let base = Rc::new(ModCtx::new(RootDatum::type_a(1)));
    let th = base.datum.thicken().map_err(|e| e.to_string())?;
    let cbt = Rc::new(CanonicalBasis::new(th.thick.cartan.clone()));
    ThickenCtx::new(base, cbt, &[zeta], &[lambda], depth).map(Rc::new).map_err(|e| e.to_string())
}

/// `φ̄∘π` against the closed form, and `φ(B̃) = ◊` on `M_ζ⊗Λ_λ`.
fn realization() -> Outcome {
    let mut matched = 0;
    for m in 0..=3i64 {
        for n in 0..=3i64 {
            let c = a1_ctx(m, n, (m + n) as usize)?;
            let q = Quotient::new(c.clone(), &[m], QuotientKind::Demazure(vec![0])).map_err(|e| e.to_string())?;
            let f = &c.cbt.f;
            for nu in c.weights() {
                c.certify(&nu).map_err(|e| format!("m={} n={} ν={:?}: {}", m, n, nu, e))?;
                q.certify(&nu).map_err(|e| format!("m={} n={} ν={:?}: {}", m, n, nu, e))?;
            }
            for k in 0..=m {
                for l in 0..=n {
                    let nu = [m - k + l];
                    let bt = c.cbt.basis(&c.weight_of(&nu)).map_err(|e| e.to_string())?;
                    let (e1, u1) = q.project(&[m - k], 0).map_err(|e| e.to_string())?.ok_or("no projection")?;
                    let mut label = q.first.labels(&e1)[u1].clone();
                    label.extend(c.tensor.right.labels(&[-l])[0].iter().cloned());
                    let (_, p) = q.target.pure.find(&label).ok_or("label not found")?;
                    let got = q.preimage_of(&nu, p).map_err(|e| e.to_string())?;
                    let mut branches = Vec::new();
                    if k - l <= m - n {
                        branches.push(word(f, &[(1, (n - l) as u32), (0, (m - k + l) as u32), (1, l as u32)]));
                    }
                    if k - l >= m - n {
                        branches.push(word(f, &[(0, l as u32), (1, n as u32), (0, (m - k) as u32)]));
                    }
                    for z in branches {
                        ensure(got.is_some() && got == bt.index_of(&z), || format!("m={} n={} k={} l={}", m, n, k, l))?;
                    }
                    matched += 1;
                }
            }
        }
    }
    Ok(format!("{} correspondences, m, n ≤ 3", matched))
}

/// The realization and quotient squares on full spanning sets.
fn diagram() -> Outcome {
    let mut weights = 0;
    for m in 0..=3i64 {
        for n in 0..=3i64 {
            let depth = 3;
            let c = a1_ctx(m, n, depth)?;
            let qs = [
                Quotient::new(c.clone(), &[m], QuotientKind::Demazure(vec![0])).map_err(|e| e.to_string())?,
                Quotient::new(a1_ctx(-m, n, depth)?, &[m], QuotientKind::Demazure(vec![])).map_err(|e| e.to_string())?,
                Quotient::new(c.clone(), &[m], QuotientKind::Highest).map_err(|e| e.to_string())?,
            ];
            for nu in c.weights() {
                c.certify(&nu).map_err(|e| format!("A1 ζ={} λ={} ν={:?}: {}", m, n, nu, e))?;
                weights += 1;
            }
            for q in &qs {
                for nu in q.ctx.weights() {
                    q.certify(&nu).map_err(|e| format!("A1 quotient m={} n={} ν={:?}: {}", m, n, nu, e))?;
                    weights += 1;
                }
            }
        }
    }
    let d = RootDatum::type_a(2);
    let base = Rc::new(ModCtx::new(d.clone()));
    let cbt = Rc::new(CanonicalBasis::new(d.thicken().map_err(|e| e.to_string())?.thick.cartan.clone()));
    let small: Vec<Vec<i64>> = vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]];
    for z in &small {
        for l in &small {
            let c = Rc::new(ThickenCtx::new(base.clone(), cbt.clone(), z, l, 4).map_err(|e| e.to_string())?);
            for nu in c.weights() {
                c.certify(&nu).map_err(|e| format!("A2 ζ={:?} λ={:?} ν={:?}: {}", z, l, nu, e))?;
                weights += 1;
            }
            let q = Quotient::new(c.clone(), z, QuotientKind::Highest).map_err(|e| e.to_string())?;
            for nu in c.weights() {
                q.certify(&nu).map_err(|e| format!("A2 quotient ζ={:?} λ={:?} ν={:?}: {}", z, l, nu, e))?;
                weights += 1;
            }
        }
    }
    Ok(format!("{} weight spaces certified", weights))
}

fn positivity() -> Outcome {
    let a1 = RootDatum::type_a(1);
    let a2 = RootDatum::type_a(2);
    let a4 = builtin("a2-thick").expect("built-in");
    let mut total = 0;
    for d in [&a2, &a4] {
        total += check(d, CheckSpec::StructurePositivity { max_trace: 6 })?.checked;
    }
    for x in 0..=2 {
        for y in 0..=2 {
            for fs in [vec![Factor::Lw(vec![x]), Factor::Hw(vec![y])], vec![Factor::Hw(vec![x]), Factor::Hw(vec![y])]] {
                total += check(&a1, CheckSpec::Transition { factors: fs })?.checked;
            }
            for z in 0..=2 {
                let fs = vec![Factor::Hw(vec![x]), Factor::Hw(vec![y]), Factor::Hw(vec![z])];
                total += check(&a1, CheckSpec::Transition { factors: fs })?.checked;
            }
        }
    }
    for l in 1..=4 {
        total += check(&a1, CheckSpec::ActionPositivity { lambda: vec![l], max_trace: 4 })?.checked;
    }
    for l in [vec![1, 0], vec![1, 1], vec![2, 1]] {
        total += check(&a2, CheckSpec::ActionPositivity { lambda: l, max_trace: 3 })?.checked;
    }
    for (x, y) in [(1, 1), (2, 1), (1, 3), (3, 2)] {
        let fs = vec![Factor::Lw(vec![x]), Factor::Hw(vec![y])];
        total += check(&a1, CheckSpec::TensorAction { factors: fs, max_trace: 4 })?.checked;
    }
    for (x, y) in [(vec![1, 0], vec![0, 1]), (vec![1, 1], vec![1, 0])] {
        let fs = vec![Factor::Lw(x), Factor::Hw(y)];
        total += check(&a2, CheckSpec::TensorAction { factors: fs, max_trace: 2 })?.checked;
    }
    Ok(format!("{} coefficients", total))
}

fn udot_rank_one() -> Outcome {
    let u = Udot::new(RootDatum::type_a(1));
    let e = |x: String| x;
    for p in 0..=3u32 {
        for r in 0..=3u32 {
            for q in 0..=3i64 {
                let zeta = vec![-q + 2 * r as i64];
                let label = DotLabel { b1: (vec![p as i64], 0), zeta: zeta.clone(), b2: (vec![r as i64], 0) };
                let d1 = u.diamond_lift(&label, 1).map_err(|x| e(x.to_string()))?;
                let d2 = u.diamond_lift(&label, 2).map_err(|x| e(x.to_string()))?;
                ensure(d1.lift == d2.lift, || format!("lift unstable at p={} q={} r={}", p, q, r))?;
                let want = if q >= (p + r) as i64 {
                    u.straighten(&[Letter::e(0, p), Letter::f(0, r)], &zeta)
                } else {
                    u.straighten(&[Letter::f(0, r), Letter::e(0, p)], &zeta)
                };
                ensure(d1.lift == want, || format!("lift differs at p={} q={} r={}", p, q, r))?;
            }
            let z = [r as i64 - p as i64];
            ensure(
                u.straighten(&[Letter::e(0, p), Letter::f(0, r)], &z) == u.straighten(&[Letter::f(0, r), Letter::e(0, p)], &z),
                || format!("identification fails at p={} r={}", p, r),
            )?;
        }
    }
    let labels: Vec<DotLabel> = (-3..=3).map(|z| u.labels(&[z], 2)).collect::<Result<Vec<_>, _>>().map_err(|x| x.to_string())?.concat();
    let mut tally = Tally::new();
    let mut products = 0;
    for a in &labels {
        for b in &labels {
            if u.output_of(b) == a.zeta {
                products += 1;
                tally.merge(&u.verify_positivity(a, b).map_err(|x| x.to_string())?);
            }
        }
    }
    ensure(tally.passed(), || tally.counterexample.clone().unwrap_or_default())?;
    Ok(format!("lifts for p, q, r ≤ 3; {} products, {} coefficients", products, tally.checked))
}

fn spherical() -> Outcome {
    for d in [RootDatum::type_a(1), RootDatum::type_a(2), builtin("a2-thick").expect("built-in")] {
        let n = d.rank();
        for mask in 0u32..(1 << n) {
            let j: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            ensure(d.cartan.is_spherical(&j), || format!("{:?} not spherical in rank {}", j, n))?;
        }
        check(&d, CheckSpec::Spherical { bound: 1000 })?;
    }
    let aff = builtin("rank2-affine").expect("built-in");
    ensure(!aff.cartan.is_spherical(&[0, 1]), || String::from("affine full set reported spherical"))?;
    ensure(aff.cartan.is_spherical(&[0]) && aff.cartan.is_spherical(&[1]), || String::from("affine singleton"))?;
    check(&aff, CheckSpec::Spherical { bound: 1000 })?;
    Ok(String::from("A1, A2, A4 all spherical; rank-2 affine full set is not"))
}

fn reduced_words() -> Outcome {
    let d = RootDatum::type_a(2);
    check(&d, CheckSpec::ReducedWords { lambda: vec![1, 1], words: vec![vec![0, 1, 0], vec![1, 0, 1]] })?;
    let mut seen = BTreeSet::new();
    for w in [vec![], vec![0], vec![1], vec![0, 1], vec![1, 0], vec![0, 1, 0]] {
        check(&d, CheckSpec::ReducedWords { lambda: vec![1, 1], words: vec![w.clone()] })?;
        seen.insert(w);
    }
    Ok(format!("both words of w₀ agree; Demazure bases match for {} elements of W", seen.len()))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);
    let criteria: [Criterion; 10] = [
        ("rank-one canonical basis", rank_one_basis, Some(Duration::from_secs(1))),
        ("thickened rank-one canonical basis", thickened_rank_one_basis, Some(Duration::from_secs(30))),
        ("brute-force oracle", oracle, None),
        ("tensor diamond closed form", diamond_closed_form, Some(Duration::from_secs(30))),
        ("thickening realization", realization, None),
        ("diagram certification", diagram, None),
        ("positivity suite", positivity, Some(Duration::from_secs(300))),
        ("modified quantum group in rank one", udot_rank_one, None),
        ("spherical detection", spherical, None),
        ("reduced-word independence", reduced_words, None),
    ];
    let mut failed = 0;
    for (k, (name, run, bound)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let out = match (out, bound) {
            (Ok(_), Some(b)) if took > *b => Err(format!("took {:.2?}, bound {:.0?}", took, b)),
            (o, _) => o,
        };
        match out {
            Ok(detail) => println!("PASS {:>2} {}: {} [{:.2?}]", k + 1, name, detail, took),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {}: {} [{:.2?}]", k + 1, name, e, took);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
