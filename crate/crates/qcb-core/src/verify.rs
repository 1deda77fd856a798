//! Named positivity and consistency checks, each expanding the relevant
//! products, actions or transition matrices exactly and testing every
//! coefficient.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeSet, VecDeque};
use alloc::format;
use alloc::rc::Rc;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cbasis::{weights_of_trace, CanonicalBasis};
use crate::coeff::{Lattice, Laurent, Tally};
use crate::datum::{CartanDatum, Gen, Root, RootDatum, Weight, WeylWord};
use crate::modules::{ModCtx, ModError, Module};
use crate::tensor::{nfold, Tensor};
use crate::thicken::{Quotient, QuotientKind, ThickenCtx};
use crate::udot::Udot;

/// A tensor factor given by the pairings `⟨i,λ⟩` of its weight:
/// `LW:1,0` is `^ωΛ_λ`, `HW:1,0` is `Λ_λ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Factor {
    #[serde(rename = "LW")]
    Lw(Vec<i64>),
    #[serde(rename = "HW")]
    Hw(Vec<i64>),
}

impl FromStr for Factor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, rest) = s.split_once(':').ok_or_else(|| format!("factor `{}` lacks `:`", s))?;
        let p = rest
            .split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|_| format!("bad pairing `{}` in `{}`", t, s)))
            .collect::<Result<Vec<_>, _>>()?;
        if p.iter().any(|&a| a < 0) {
            return Err(format!("factor `{}` is not dominant", s));
        }
        match kind.trim().to_ascii_uppercase().as_str() {
            "LW" => Ok(Factor::Lw(p)),
            "HW" => Ok(Factor::Hw(p)),
            _ => Err(format!("unknown factor kind `{}`", kind)),
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (k, p) = match self {
            Factor::Lw(p) => ("LW", p),
            Factor::Hw(p) => ("HW", p),
        };
        let p: Vec<String> = p.iter().map(|a| a.to_string()).collect();
        write!(f, "{}:{}", k, p.join(","))
    }
}

/// Parses a whitespace-separated factor list such as `"LW:1 HW:1"`.
pub fn parse_factors(s: &str) -> Result<Vec<Factor>, String> {
    s.split_whitespace().map(Factor::from_str).collect()
}

/// One named check with its parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "check", content = "params", rename_all = "snake_case")]
pub enum CheckSpec {
    /// Products and coproduct components of canonical basis elements of `f`.
    StructurePositivity { max_trace: usize },
    /// The canonical basis against the brute-force search.
    CbOracle { max_trace: usize, max_dim: usize },
    /// Transition matrices of a two- or three-fold tensor product in `ℕ[v⁻¹]`.
    Transition { factors: Vec<Factor> },
    /// `b^±` on the canonical bases of `Λ_λ` and `^ωΛ_λ`.
    ActionPositivity { lambda: Vec<i64>, max_trace: usize },
    /// `b^±` on the canonical basis of a tensor product.
    TensorAction { factors: Vec<Factor>, max_trace: usize },
    /// The realization `(fθ_λf) ≅ M_ζ⊗Λ_λ` with all its identities.
    Thickening { zeta: Vec<i64>, lambda: Vec<i64>, depth: usize },
    /// The quotient onto `^ωV_w(λ₁)⊗Λ_{λ₂}`.
    DemazureQuotient { lambda1: Vec<i64>, lambda2: Vec<i64>, word: WeylWord, depth: usize },
    /// The quotient onto `Λ_{λ₁}⊗Λ_{λ₂}`.
    HighestQuotient { lambda1: Vec<i64>, lambda2: Vec<i64>, depth: usize },
    /// Products of lifted canonical basis elements of `U̇`.
    UdotMult { max_trace: usize, zeta_bound: i64 },
    /// Lifted canonical basis elements of `U̇` acting on `Λ_λ`, `^ωΛ_λ` and
    /// `^ωΛ_λ⊗Λ_λ`.
    UdotAction { lambda: Vec<i64>, max_trace: usize, zeta_bound: i64 },
    /// `is_spherical(J)` for every `J ⊆ I` against enumeration of `W_J`,
    /// which counts as infinite once it exceeds `bound` elements.
    Spherical { bound: usize },
    /// Extreme vectors agree across words; Demazure bases two ways.
    ReducedWords { lambda: Vec<i64>, words: Vec<WeylWord> },
}

impl CheckSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CheckSpec::StructurePositivity { .. } => "structure_positivity",
            CheckSpec::CbOracle { .. } => "cb_oracle",
            CheckSpec::Transition { .. } => "transition",
            CheckSpec::ActionPositivity { .. } => "action_positivity",
            CheckSpec::TensorAction { .. } => "tensor_action",
            CheckSpec::Thickening { .. } => "thickening",
            CheckSpec::DemazureQuotient { .. } => "demazure_quotient",
            CheckSpec::HighestQuotient { .. } => "highest_quotient",
            CheckSpec::UdotMult { .. } => "udot_mult",
            CheckSpec::UdotAction { .. } => "udot_action",
            CheckSpec::Spherical { .. } => "spherical",
            CheckSpec::ReducedWords { .. } => "reduced_words",
        }
    }

    pub const NAMES: [&'static str; 12] = [
        "structure_positivity",
        "cb_oracle",
        "transition",
        "action_positivity",
        "tensor_action",
        "thickening",
        "demazure_quotient",
        "highest_quotient",
        "udot_mult",
        "udot_action",
        "spherical",
        "reduced_words",
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Outcome of one check; a failure always carries a counterexample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub spec: CheckSpec,
    pub status: Status,
    pub tally: Tally,
}

impl CheckReport {
    pub fn name(&self) -> &'static str {
        self.spec.name()
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

fn weight(d: &RootDatum, pairings: &[i64]) -> Result<Weight, ModError> {
    if pairings.len() != d.rank() {
        return Err(ModError::Unsupported(format!("expected {} pairings, got {}", d.rank(), pairings.len())));
    }
    d.weight_with_pairings(pairings).ok_or_else(|| ModError::Unsupported(format!("no weight with pairings {:?}", pairings)))
}

const CAP: usize = 4096;

fn factor_module(ctx: &ModCtx, f: &Factor) -> Result<Module, ModError> {
    match f {
        Factor::Lw(p) => ctx.simple_lw(&weight(&ctx.datum, p)?, CAP),
        Factor::Hw(p) => ctx.simple_hw(&weight(&ctx.datum, p)?, CAP),
    }
}

fn record_mat(t: &mut Tally, m: &[Vec<Laurent>], kind: Lattice, ctx: &dyn Fn(usize, usize) -> String) {
    for (r, row) in m.iter().enumerate() {
        for (c, x) in row.iter().enumerate() {
            t.record(x, kind, || ctx(r, c));
        }
    }
}

/// `b^±` for all `b` with `tr|b| ≤ max_trace` on every basis vector of `m`.
fn action_tally(cb: &CanonicalBasis, m: &Module, what: &str, max_trace: usize, t: &mut Tally) -> Result<(), ModError> {
    let deltas: Vec<_> = m.deltas().cloned().collect();
    for tr in 1..=max_trace {
        for nu in weights_of_trace(m.rank(), tr) {
            for raise in [false, true] {
                for d in &deltas {
                    let mats = m.cb_action(cb, &nu, raise, d)?;
                    for (k, mat) in mats.iter().enumerate() {
                        let sign = if raise { '+' } else { '-' };
                        record_mat(t, mat, Lattice::InNvv, &|r, c| format!("{}: b{:?}#{}{} on {:?}#{} at #{}", what, nu, k, sign, d, c, r));
                    }
                }
            }
        }
    }
    Ok(())
}

fn tensor_of(ctx: &ModCtx, factors: &[Factor]) -> Result<Vec<Rc<Module>>, ModError> {
    if !(2..=3).contains(&factors.len()) {
        return Err(ModError::Unsupported(String::from("tensor checks take two or three factors")));
    }
    factors.iter().map(|f| factor_module(ctx, f).map(Rc::new)).collect()
}

fn run(d: &RootDatum, spec: &CheckSpec) -> Result<Tally, ModError> {
    let mut t = Tally::new();
    match spec {
        CheckSpec::StructurePositivity { max_trace } => {
            let cb = CanonicalBasis::new(d.cartan.clone());
            let n = d.rank();
            for t1 in 1..*max_trace {
                for t2 in 1..=(max_trace - t1) {
                    for nu1 in weights_of_trace(n, t1) {
                        for nu2 in weights_of_trace(n, t2) {
                            t.merge(&cb.verify_structure_positivity(&nu1, &nu2)?);
                        }
                    }
                }
            }
        }
        CheckSpec::CbOracle { max_trace, max_dim } => {
            let cb = CanonicalBasis::new(d.cartan.clone());
            for tr in 0..=*max_trace {
                for nu in weights_of_trace(d.rank(), tr) {
                    if cb.f.dim(&nu) > (*max_dim).min(3) {
                        continue;
                    }
                    let b = cb.basis(&nu)?;
                    let brute = cb.brute_force_cb(&nu)?;
                    t.checked += 1;
                    if brute.len() != b.len() || brute.iter().any(|x| b.index_of(x).is_none()) {
                        t.fail(format!("brute-force basis differs at {:?}", nu));
                    }
                }
            }
        }
        CheckSpec::Transition { factors } => {
            let ctx = ModCtx::new(d.clone());
            let ms = tensor_of(&ctx, factors)?;
            if ms.len() == 2 {
                let tensor = Tensor::new(ctx.cb.clone(), ms[0].clone(), ms[1].clone())?;
                let comps: Vec<_> = tensor.components().cloned().collect();
                for delta in comps {
                    let m = tensor.transition(&delta)?;
                    record_mat(&mut t, &m, Lattice::InNvinv, &|r, c| format!("transition at {:?}: pure #{} in diamond #{}", delta, r, c));
                }
            } else {
                let m = nfold(ctx.cb.clone(), &ms)?;
                let exp = m.expansion.as_ref().expect("tensor modules carry expansions");
                for (delta, cols) in exp {
                    for (j, col) in cols.iter().enumerate() {
                        for (label, c) in col {
                            t.record(c, Lattice::InNvinv, || format!("transition at {:?}: {:?} in diamond #{}", delta, label, j));
                        }
                    }
                }
            }
        }
        CheckSpec::ActionPositivity { lambda, max_trace } => {
            let ctx = ModCtx::new(d.clone());
            let w = weight(d, lambda)?;
            action_tally(&ctx.cb, &ctx.simple_hw(&w, CAP)?, "Λ", *max_trace, &mut t)?;
            action_tally(&ctx.cb, &ctx.simple_lw(&w, CAP)?, "ωΛ", *max_trace, &mut t)?;
        }
        CheckSpec::TensorAction { factors, max_trace } => {
            let ctx = ModCtx::new(d.clone());
            let ms = tensor_of(&ctx, factors)?;
            let based = nfold(ctx.cb.clone(), &ms)?;
            action_tally(&ctx.cb, &based, "diamond", *max_trace, &mut t)?;
        }
        CheckSpec::Thickening { zeta, lambda, depth } => {
            let base = Rc::new(ModCtx::new(d.clone()));
            let th = d.thicken().map_err(|e| ModError::Unsupported(e.to_string()))?;
            let cbt = Rc::new(CanonicalBasis::new(th.thick.cartan.clone()));
            let c = ThickenCtx::new(base, cbt, &weight(d, zeta)?, &weight(d, lambda)?, *depth)?;
            for nu in c.weights() {
                t.checked += 1;
                if let Err(e) = c.certify(&nu) {
                    t.fail(format!("{}", e));
                }
            }
        }
        CheckSpec::DemazureQuotient { lambda1, lambda2, word, depth } => {
            let l1 = weight(d, lambda1)?;
            let zeta: Weight = d.act(word, &l1).iter().map(|a| -a).collect();
            quotient_tally(d, &zeta, &l1, &weight(d, lambda2)?, QuotientKind::Demazure(word.clone()), *depth, &mut t)?;
        }
        CheckSpec::HighestQuotient { lambda1, lambda2, depth } => {
            let l1 = weight(d, lambda1)?;
            quotient_tally(d, &l1, &l1, &weight(d, lambda2)?, QuotientKind::Highest, *depth, &mut t)?;
        }
        CheckSpec::UdotMult { max_trace, zeta_bound } => {
            let u = Udot::new(d.clone());
            let labels = udot_labels(&u, *max_trace, *zeta_bound)?;
            for a in &labels {
                for b in &labels {
                    if u.output_of(b) != a.zeta {
                        continue;
                    }
                    let sa = u.is_spherical_parabolic(&*u.lift(a)?).is_some();
                    let sb = u.is_spherical_parabolic(&*u.lift(b)?).is_some();
                    if sa || sb {
                        t.merge(&u.verify_positivity(a, b)?);
                    }
                }
            }
        }
        CheckSpec::UdotAction { lambda, max_trace, zeta_bound } => {
            let u = Udot::new(d.clone());
            let w = weight(d, lambda)?;
            let hw = u.base.simple_hw(&w, CAP)?;
            let lw = u.base.simple_lw(&w, CAP)?;
            let based = Tensor::new(u.cb.clone(), Rc::new(lw.clone()), Rc::new(hw.clone()))?.based()?;
            for l in udot_labels(&u, *max_trace, *zeta_bound)? {
                t.merge(&u.verify_action(&hw, &l)?);
                t.merge(&u.verify_action(&lw, &l)?);
                if u.is_spherical_parabolic(&*u.lift(&l)?).is_some() {
                    t.merge(&u.verify_action(&based, &l)?);
                }
            }
        }
        CheckSpec::Spherical { bound } => {
            let c = &d.cartan;
            let n = c.rank();
            for mask in 0u32..(1 << n) {
                let j: Vec<Gen> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
                let finite = weyl_order(c, &j, *bound).is_some();
                t.checked += 1;
                if c.is_spherical(&j) != finite {
                    t.fail(format!("sphericity of {:?} disagrees with |W_J| finite = {}", j, finite));
                }
            }
        }
        CheckSpec::ReducedWords { lambda, words } => {
            let ctx = ModCtx::new(d.clone());
            let lw = Rc::new(ctx.simple_lw(&weight(d, lambda)?, CAP)?);
            let mut first: Option<(WeylWord, crate::modules::MVec)> = None;
            for w in words {
                if !d.cartan.is_reduced(w) {
                    t.fail(format!("word {:?} is not reduced", w));
                    continue;
                }
                if let Some((w0, _)) = &first {
                    if !d.cartan.same_element(w0, w) {
                        t.fail(format!("words {:?} and {:?} differ in W", w0, w));
                    }
                }
                let x = ctx.extreme_vector(&lw, w, true)?;
                t.checked += 1;
                match &first {
                    None => first = Some((w.clone(), x)),
                    Some((w0, x0)) => {
                        if *x0 != x {
                            t.fail(format!("extreme vectors of {:?} and {:?} differ", w0, w));
                        }
                    }
                }
                let de = ctx.demazure(lw.clone(), w, true)?;
                for delta in lw.deltas() {
                    t.checked += 1;
                    if de.basis_at(&ctx.cb, delta)? != de.basis_by_intersection(&ctx.cb, delta)? {
                        t.fail(format!("Demazure bases of {:?} differ at {:?}", w, delta));
                    }
                }
            }
        }
    }
    Ok(t)
}

/// `|W_J|` by breadth-first search over the images of the simple roots, or
/// `None` once more than `bound` elements are found.
pub fn weyl_order(c: &CartanDatum, j: &[Gen], bound: usize) -> Option<usize> {
    let n = c.rank();
    let id: Vec<Root> = (0..n).map(|i| (0..n).map(|k| i64::from(i == k)).collect()).collect();
    let mut seen = BTreeSet::new();
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(m) = queue.pop_front() {
        for &s in j {
            let next: Vec<Root> = m.iter().map(|a| c.act_root(&[s], a)).collect();
            if seen.insert(next.clone()) {
                if seen.len() > bound {
                    return None;
                }
                queue.push_back(next);
            }
        }
    }
    Some(seen.len())
}

fn udot_labels(u: &Udot, max_trace: usize, zeta_bound: i64) -> Result<Vec<crate::udot::DotLabel>, ModError> {
    let n = u.rank();
    let mut zetas: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..n {
        zetas = zetas.into_iter().flat_map(|z| (-zeta_bound..=zeta_bound).map(move |a| [z.as_slice(), &[a]].concat())).collect();
    }
    let mut out = Vec::new();
    for p in zetas {
        let z = weight(&u.datum, &p)?;
        out.extend(u.labels(&z, max_trace)?);
    }
    Ok(out)
}

fn quotient_tally(
    d: &RootDatum,
    zeta: &[i64],
    lambda1: &[i64],
    lambda2: &[i64],
    kind: QuotientKind,
    depth: usize,
    t: &mut Tally,
) -> Result<(), ModError> {
    let base = Rc::new(ModCtx::new(d.clone()));
    let th = d.thicken().map_err(|e| ModError::Unsupported(e.to_string()))?;
    let cbt = Rc::new(CanonicalBasis::new(th.thick.cartan.clone()));
    let c = Rc::new(ThickenCtx::new(base, cbt, zeta, lambda2, depth)?);
    let q = Quotient::new(c.clone(), lambda1, kind)?;
    for nu in c.weights() {
        t.checked += 1;
        if let Err(e) = q.certify(&nu) {
            t.fail(format!("{}", e));
        }
    }
    Ok(())
}

/// Runs one check; errors are reported as failures with their message.
pub fn run_check(d: &RootDatum, spec: &CheckSpec) -> CheckReport {
    let tally = match run(d, spec) {
        Ok(t) => t,
        Err(e) => {
            let mut t = Tally::new();
            t.fail(format!("error: {}", e));
            t
        }
    };
    let status = if tally.passed() { Status::Pass } else { Status::Fail };
    CheckReport { spec: spec.clone(), status, tally }
}

/// Runs checks in order; results are sorted by check name, stably.
pub fn run_suite(entries: &[(RootDatum, CheckSpec)]) -> Vec<CheckReport> {
    let mut out: Vec<CheckReport> = entries.iter().map(|(d, s)| run_check(d, s)).collect();
    out.sort_by(|a, b| a.name().cmp(b.name()));
    out
}

/// Whether the size bound of a check is within desk-scale limits.
pub fn within_bounds(spec: &CheckSpec) -> Result<(), String> {
    let (what, v, max) = match spec {
        CheckSpec::StructurePositivity { max_trace } => ("max_trace", *max_trace, 8),
        CheckSpec::CbOracle { max_trace, .. } => ("max_trace", *max_trace, 10),
        CheckSpec::ActionPositivity { max_trace, .. } | CheckSpec::TensorAction { max_trace, .. } => ("max_trace", *max_trace, 8),
        CheckSpec::Thickening { depth, .. } | CheckSpec::DemazureQuotient { depth, .. } | CheckSpec::HighestQuotient { depth, .. } => {
            ("depth", *depth, 8)
        }
        CheckSpec::UdotMult { max_trace, .. } | CheckSpec::UdotAction { max_trace, .. } => ("max_trace", *max_trace, 4),
        _ => return Ok(()),
    };
    if v > max {
        return Err(format!("{} = {} exceeds the bound {}", what, v, max));
    }
    Ok(())
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match self.status {
            Status::Pass => "pass",
            Status::Fail => "fail",
        };
        write!(f, "{} {} ({} checked)", self.name(), status, self.tally.checked)?;
        if let Some(c) = &self.tally.counterexample {
            write!(f, ": {}", c)?;
        }
        Ok(())
    }
}

impl CheckSpec {
    /// A short human-readable summary of the parameters.
    pub fn summary(&self) -> String {
        match self {
            CheckSpec::Transition { factors } | CheckSpec::TensorAction { factors, .. } => {
                factors.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(" ")
            }
            other => format!("{:?}", other).split_once(' ').map(|(_, r)| r.to_owned()).unwrap_or_default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_parsing() {
        assert_eq!(parse_factors("LW:1 HW:1").unwrap(), vec![Factor::Lw(vec![1]), Factor::Hw(vec![1])]);
        assert_eq!("hw:1,0".parse::<Factor>().unwrap(), Factor::Hw(vec![1, 0]));
        assert!("XW:1".parse::<Factor>().is_err());
        assert!("LW:-1".parse::<Factor>().is_err());
        assert_eq!(Factor::Lw(vec![1, 2]).to_string(), "LW:1,2");
    }

    #[test]
    fn small_checks_pass() {
        let a1 = RootDatum::type_a(1);
        let a2 = RootDatum::type_a(2);
        let specs = [
            (a2.clone(), CheckSpec::StructurePositivity { max_trace: 4 }),
            (a2.clone(), CheckSpec::CbOracle { max_trace: 4, max_dim: 3 }),
            (a1.clone(), CheckSpec::Transition { factors: vec![Factor::Lw(vec![1]), Factor::Hw(vec![1])] }),
            (a1.clone(), CheckSpec::Transition { factors: vec![Factor::Hw(vec![1]), Factor::Hw(vec![1]), Factor::Hw(vec![1])] }),
            (a2.clone(), CheckSpec::ActionPositivity { lambda: vec![1, 1], max_trace: 2 }),
            (a1.clone(), CheckSpec::TensorAction { factors: vec![Factor::Lw(vec![1]), Factor::Hw(vec![2])], max_trace: 3 }),
            (a1.clone(), CheckSpec::Thickening { zeta: vec![1], lambda: vec![1], depth: 2 }),
            (a1.clone(), CheckSpec::DemazureQuotient { lambda1: vec![1], lambda2: vec![1], word: vec![0], depth: 2 }),
            (a1.clone(), CheckSpec::HighestQuotient { lambda1: vec![1], lambda2: vec![1], depth: 2 }),
            (a1.clone(), CheckSpec::UdotMult { max_trace: 1, zeta_bound: 1 }),
            (a1.clone(), CheckSpec::UdotAction { lambda: vec![1], max_trace: 1, zeta_bound: 1 }),
            (a2.clone(), CheckSpec::Spherical { bound: 100 }),
            (a2.clone(), CheckSpec::ReducedWords { lambda: vec![1, 1], words: vec![vec![0, 1, 0], vec![1, 0, 1]] }),
        ];
        for r in run_suite(&specs) {
            assert!(r.passed(), "{}", r);
            assert!(r.tally.checked > 0, "{}", r);
        }
    }

    #[test]
    fn failures_are_reported() {
        let a2 = RootDatum::type_a(2);
        let r = run_check(&a2, &CheckSpec::Spherical { bound: 5 });
        assert_eq!(r.status, Status::Fail);
        assert!(r.tally.counterexample.is_some());
        let aff = CartanDatum::new(vec!["1".into(), "2".into()], vec![vec![2, -2], vec![-2, 2]]).unwrap();
        let r = run_check(&RootDatum::simply_connected(aff), &CheckSpec::Spherical { bound: 500 });
        assert!(r.passed(), "{}", r);
        let r = run_check(&a2, &CheckSpec::ReducedWords { lambda: vec![1, 1], words: vec![vec![0, 1, 0], vec![0, 1]] });
        assert_eq!(r.status, Status::Fail);
        let r = run_check(&a2, &CheckSpec::Transition { factors: vec![Factor::Lw(vec![1])] });
        assert_eq!(r.status, Status::Fail);
    }

    #[test]
    fn weyl_orders() {
        assert_eq!(weyl_order(&CartanDatum::type_a(2), &[0, 1], 100), Some(6));
        assert_eq!(weyl_order(&CartanDatum::type_a(4), &[0, 1, 2, 3], 1000), Some(120));
        assert_eq!(weyl_order(&CartanDatum::type_a(3), &[0, 2], 100), Some(4));
        let aff = CartanDatum::new(vec!["1".into(), "2".into()], vec![vec![2, -2], vec![-2, 2]]).unwrap();
        assert_eq!(weyl_order(&aff, &[0, 1], 500), None);
        assert_eq!(weyl_order(&aff, &[1], 500), Some(2));
    }

    #[test]
    fn empty_suite() {
        assert!(run_suite(&[]).is_empty());
    }
}
