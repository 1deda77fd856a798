//! The canonical basis of `f`, string statistics and structure positivity.
//!
//! `B_ν` is built from the candidates `θ_i^{(n)} b′` (`b′ ∈ B_{ν-ni}`,
//! `ε_i(b′) = 0`) in decreasing `n`, each corrected against the elements
//! already accepted by the usual bar-invariant triangular recursion. The
//! result is certified: bar-invariance, almost-orthonormality, independence
//! and integral spanning of `θ_i B_{ν-i}` are all checked exactly.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

use crate::coeff::{Lattice, Laurent, Tally};
use crate::datum::{CartanDatum, Gen, Root};
use crate::falg::{collect_expansion, trace, DivWord, Expansion, FAlg, FVector, FalgError};
use crate::linalg::{modp, ModEchelon, Solution, Solver};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CbError {
    #[error(transparent)]
    Falg(#[from] FalgError),
    #[error("canonical basis verification failed at weight {weight:?}: {reason}")]
    Verification { weight: Root, reason: String },
    #[error("brute-force search exhausted its window at weight {0:?}")]
    WindowExhausted(Root),
    #[error("brute-force oracle only runs in dimension at most 3 (got {0})")]
    TooLarge(usize),
}

fn fail(nu: &[i64], reason: String) -> CbError {
    CbError::Verification { weight: nu.to_vec(), reason }
}

/// Canonical basis element: derivation vector plus a divided-word expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CbElem {
    pub vector: FVector,
    pub expansion: Expansion,
}

/// `B_ν` with its certified data.
#[derive(Debug)]
pub struct CbWeight {
    pub weight: Root,
    pub elems: Vec<CbElem>,
    /// `eps[b][i] = ε_i(b)`.
    pub eps: Vec<Vec<u32>>,
    /// `eps_sigma[b][i] = ε_i(σ b)`.
    pub eps_sigma: Vec<Vec<u32>>,
    /// `σ(b_k) = b_{sigma[k]}`.
    pub sigma: Vec<usize>,
    /// `gram_num[k][l]` with `(b_k, b_l) = gram_num[k][l] / den`.
    pub gram_num: Vec<Vec<Laurent>>,
    pub den: Laurent,
    /// `theta_left[i][m]` = coordinates of `θ_i b_m` (`b_m ∈ B_{ν-i}`) over `B_ν`.
    pub theta_left: Vec<Option<Vec<Vec<Laurent>>>>,
    solver: Solver,
    duals: RefCell<Option<Rc<Vec<FVector>>>>,
}

impl CbWeight {
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn solver(&self) -> &Solver {
        &self.solver
    }

    /// Coordinates of `x ∈ f_ν` over `B_ν`.
    pub fn coords(&self, x: &FVector) -> Solution {
        self.solver.solve(&x.d)
    }

    /// Laurent coordinates of `x`; panics if `x` is not in the `𝒜`-span.
    pub fn coords_laurent(&self, x: &FVector) -> Vec<Laurent> {
        match self.coords(x) {
            Solution::Laurent(c) => c,
            other => panic!("element outside the integral span: {:?}", other),
        }
    }

    pub fn index_of(&self, x: &FVector) -> Option<usize> {
        self.elems.iter().position(|b| b.vector == *x)
    }
}

/// Order in which candidates of equal `n` are tried.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CandidateOrder {
    #[default]
    Forward,
    Reversed,
}

/// Canonical bases of `f` over a Cartan datum, cached by weight.
pub struct CanonicalBasis {
    pub f: FAlg,
    order: CandidateOrder,
    cache: RefCell<BTreeMap<Root, Rc<CbWeight>>>,
}

impl CanonicalBasis {
    pub fn new(cartan: CartanDatum) -> Self {
        Self::from_falg(FAlg::new(cartan), CandidateOrder::Forward)
    }

    pub fn from_falg(f: FAlg, order: CandidateOrder) -> Self {
        CanonicalBasis { f, order, cache: RefCell::new(BTreeMap::new()) }
    }

    pub fn cartan(&self) -> &CartanDatum {
        &self.f.cartan
    }

    pub fn rank(&self) -> usize {
        self.f.rank()
    }

    /// `B_ν`.
    pub fn basis(&self, nu: &[i64]) -> Result<Rc<CbWeight>, CbError> {
        if let Some(b) = self.cache.borrow().get(nu) {
            return Ok(b.clone());
        }
        self.f.check_bound(nu)?;
        let b = Rc::new(self.build(nu)?);
        self.cache.borrow_mut().insert(nu.to_vec(), b.clone());
        Ok(b)
    }

    fn build(&self, nu: &[i64]) -> Result<CbWeight, CbError> {
        let f = &self.f;
        let rank = self.rank();
        let den = f.form_denominator(nu);
        let mut elems: Vec<CbElem> = Vec::new();
        if trace(nu) == 0 {
            elems.push(CbElem { vector: f.one(), expansion: vec![(Vec::new(), Laurent::one())] });
        } else {
            // (n, i, b′) candidates in decreasing n.
            let mut cands: Vec<(u32, Gen, usize)> = Vec::new();
            for i in 0..rank {
                for n in 1..=nu[i] as u32 {
                    let mut mu = nu.to_vec();
                    mu[i] -= n as i64;
                    let sub = self.basis(&mu)?;
                    for (k, e) in sub.eps.iter().enumerate() {
                        if e[i] == 0 {
                            cands.push((n, i, k));
                        }
                    }
                }
            }
            match self.order {
                CandidateOrder::Forward => cands.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))),
                CandidateOrder::Reversed => {
                    cands.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.cmp(&a.1)).then(b.2.cmp(&a.2)))
                }
            }
            let mut ech = ModEchelon::new();
            let mut gram: Vec<Vec<Laurent>> = Vec::new();
            for (n, i, k) in cands {
                let mut mu = nu.to_vec();
                mu[i] -= n as i64;
                let sub = self.basis(&mu)?;
                let bp = &sub.elems[k];
                let mut vector = f.multiply(&f.theta(i, n), &bp.vector);
                let mut expansion: Expansion = bp
                    .expansion
                    .iter()
                    .map(|(t, c)| {
                        let mut w: DivWord = vec![(i, n)];
                        w.extend_from_slice(t);
                        (w, c.clone())
                    })
                    .collect();
                expansion = collect_expansion(expansion);
                let a = self.peel(nu, &den, &expansion, &elems, &gram);
                for (l, al) in a.iter().enumerate() {
                    if !al.is_zero() {
                        vector.axpy(&-al, &elems[l].vector);
                        expansion.extend(elems[l].expansion.iter().map(|(t, c)| (t.clone(), -(al * c))));
                    }
                }
                if vector.is_zero() {
                    continue;
                }
                expansion = collect_expansion(expansion);
                if !ech.insert(vector.eval()) {
                    return Err(fail(nu, String::from("corrected candidate is dependent but nonzero")));
                }
                let row: Vec<Laurent> = elems
                    .iter()
                    .map(|b| f.form_numerator(nu, &expansion, &b.vector))
                    .chain(core::iter::once(f.form_numerator(nu, &expansion, &vector)))
                    .collect();
                for (l, g) in gram.iter_mut().enumerate() {
                    g.push(row[l].clone());
                }
                gram.push(row);
                elems.push(CbElem { vector, expansion });
            }
            for (k, row) in gram.iter().enumerate() {
                for (l, g) in row.iter().enumerate() {
                    let h = g.series_nonneg_part(&den);
                    let ok = if k == l { h.is_one() } else { h.is_zero() };
                    if !ok {
                        return Err(fail(nu, format!("form ({}, {}) not in δ + v⁻¹ℤ[[v⁻¹]]", k, l)));
                    }
                }
            }
            let cb = self.finish(nu, elems, gram, den)?;
            return Ok(cb);
        }
        let gram = vec![vec![Laurent::one()]];
        self.finish(nu, elems, gram, den)
    }

    /// Bar-invariant corrections `a` making `(x - Σ a_l b_l, b_k) ∈ v⁻¹ℤ[[v⁻¹]]`.
    fn peel(&self, nu: &[i64], den: &Laurent, x: &Expansion, elems: &[CbElem], gram: &[Vec<Laurent>]) -> Vec<Laurent> {
        let k = elems.len();
        let mut r: Vec<Laurent> = elems.iter().map(|b| self.f.form_numerator(nu, x, &b.vector)).collect();
        let mut a = vec![Laurent::zero(); k];
        loop {
            let mut best: Option<(i32, usize, i64)> = None;
            for (j, rj) in r.iter().enumerate() {
                let h = rj.series_nonneg_part(den);
                if let Some(m) = h.deg() {
                    if best.is_none_or(|b| m > b.0) {
                        best = Some((m, j, h.leading_coeff()));
                    }
                }
            }
            let Some((m, j, c)) = best else { break };
            let delta = if m == 0 { Laurent::int(c) } else { Laurent::from_terms([(m, c), (-m, c)]) };
            a[j] += &delta;
            for (t, rt) in r.iter_mut().enumerate() {
                *rt -= &(&delta * &gram[j][t]);
            }
        }
        a
    }

    fn finish(&self, nu: &[i64], elems: Vec<CbElem>, gram: Vec<Vec<Laurent>>, den: Laurent) -> Result<CbWeight, CbError> {
        let f = &self.f;
        let rank = self.rank();
        for (k, b) in elems.iter().enumerate() {
            if f.bar(&b.vector) != b.vector {
                return Err(fail(nu, format!("element {} is not bar-invariant", k)));
            }
        }
        let solver = Solver::new(elems.iter().map(|b| b.vector.d.clone()).collect());
        // θ_i B_{ν-i} ⊂ 𝒜[B_ν]: the basis spans f_ν integrally.
        let mut theta_left = vec![None; rank];
        for (i, slot) in theta_left.iter_mut().enumerate() {
            if nu[i] == 0 {
                continue;
            }
            let mut mu = nu.to_vec();
            mu[i] -= 1;
            let sub = self.basis(&mu)?;
            let th = f.theta(i, 1);
            let mut rows = Vec::with_capacity(sub.len());
            for (m, b) in sub.elems.iter().enumerate() {
                match solver.solve(&f.multiply(&th, &b.vector).d) {
                    Solution::Laurent(c) => rows.push(c),
                    _ => return Err(fail(nu, format!("θ_{} b_{} is not in the integral span", i, m))),
                }
            }
            *slot = Some(rows);
        }
        // ε_i via membership in θ_i^{(n)} f.
        let mut eps = vec![vec![0u32; rank]; elems.len()];
        for i in 0..rank {
            for n in (1..=nu[i] as u32).rev() {
                let mut mu = nu.to_vec();
                mu[i] -= n as i64;
                let sub = self.basis(&mu)?;
                let th = f.theta(i, n);
                let mut ech = ModEchelon::new();
                for b in &sub.elems {
                    ech.insert(f.multiply(&th, &b.vector).eval());
                }
                let mut count = 0;
                for (k, b) in elems.iter().enumerate() {
                    if ech.in_span(&b.vector.eval()) {
                        count += 1;
                        if eps[k][i] == 0 {
                            eps[k][i] = n;
                        }
                    }
                }
                if count != sub.len() {
                    return Err(fail(nu, format!("|B ∩ θ_{}^{} f| = {} ≠ {}", i, n, count, sub.len())));
                }
            }
        }
        let mut by_vec: BTreeMap<&Vec<Laurent>, usize> = BTreeMap::new();
        for (k, b) in elems.iter().enumerate() {
            by_vec.insert(&b.vector.d, k);
        }
        let mut sigma = Vec::with_capacity(elems.len());
        for (k, b) in elems.iter().enumerate() {
            let s = f.sigma(&b.vector);
            match by_vec.get(&s.d) {
                Some(&j) => sigma.push(j),
                None => return Err(fail(nu, format!("σ(b_{}) is not a basis element", k))),
            }
        }
        let eps_sigma = sigma.iter().map(|&j| eps[j].clone()).collect();
        Ok(CbWeight {
            weight: nu.to_vec(),
            elems,
            eps,
            eps_sigma,
            sigma,
            gram_num: gram,
            den,
            theta_left,
            solver,
            duals: RefCell::new(None),
        })
    }

    /// `ε_i(b)` on the left, or `ε_i(σb)` on the right.
    pub fn epsilon(&self, nu: &[i64], k: usize, i: Gen, right: bool) -> Result<u32, CbError> {
        let b = self.basis(nu)?;
        Ok(if right { b.eps_sigma[k][i] } else { b.eps[k][i] })
    }

    /// Indices of `B(λ)_ν = {b : ε_i(σb) ≤ ⟨i,λ⟩ ∀i}`, given the pairings `⟨i,λ⟩`.
    pub fn b_lambda(&self, nu: &[i64], pairings: &[i64]) -> Result<Vec<usize>, CbError> {
        let b = self.basis(nu)?;
        Ok((0..b.len()).filter(|&k| b.eps_sigma[k].iter().zip(pairings).all(|(&e, &p)| e as i64 <= p)).collect())
    }

    /// Dual basis `{b*}` with `(b_k, b_l*) = δ`.
    ///
    /// `D_{b*}(w) = (1-v⁻²)ⁿ·(coefficient of b in θ_w)`, always integral.
    pub fn dual_basis(&self, nu: &[i64]) -> Result<Rc<Vec<FVector>>, CbError> {
        let b = self.basis(nu)?;
        if let Some(d) = b.duals.borrow().as_ref() {
            return Ok(d.clone());
        }
        let f = &self.f;
        let s = f.space(nu);
        let ff = crate::falg::form_factor(trace(nu));
        let mut d: Vec<FVector> = (0..b.len()).map(|_| f.zero(nu)).collect();
        for (wi, w) in s.words.iter().enumerate() {
            let t: DivWord = w.iter().map(|&l| (l as usize, 1)).collect();
            let c = b.coords_laurent(&f.monomial(&t));
            for (k, ck) in c.iter().enumerate() {
                d[k].d[wi] = ck * &ff;
            }
        }
        let d = Rc::new(d);
        *b.duals.borrow_mut() = Some(d.clone());
        Ok(d)
    }

    /// Structure constants of `b₁b₂` and of `r(b)` at `(ν₁, ν₂)`, each tested
    /// for membership in `ℕ[v,v⁻¹]`.
    pub fn verify_structure_positivity(&self, nu1: &[i64], nu2: &[i64]) -> Result<Tally, CbError> {
        let f = &self.f;
        let mut tally = Tally::new();
        let b1 = self.basis(nu1)?;
        let b2 = self.basis(nu2)?;
        let nu: Root = nu1.iter().zip(nu2).map(|(a, b)| a + b).collect();
        let b = self.basis(&nu)?;
        for (k, x) in b1.elems.iter().enumerate() {
            for (l, y) in b2.elems.iter().enumerate() {
                let p = f.multiply(&x.vector, &y.vector);
                match b.coords(&p) {
                    Solution::Laurent(c) => {
                        for (m, cm) in c.iter().enumerate() {
                            tally.record(cm, Lattice::InNvv, || format!("b{:?}#{}·b{:?}#{} at b{:?}#{}", nu1, k, nu2, l, nu, m));
                        }
                    }
                    other => tally.fail(format!("product b{:?}#{}·b{:?}#{} not integral: {:?}", nu1, k, nu2, l, other)),
                }
            }
        }
        for (m, z) in b.elems.iter().enumerate() {
            let c = f.comultiply_in(&z.vector, b1.solver(), b2.solver(), nu1);
            for (k, row) in c.iter().enumerate() {
                for (l, s) in row.iter().enumerate() {
                    match s {
                        Solution::Laurent(v) => {
                            tally.record(&v[0], Lattice::InNvv, || {
                                format!("r(b{:?}#{}) at b{:?}#{}⊗b{:?}#{}", nu, m, nu1, k, nu2, l)
                            });
                        }
                        other => tally.fail(format!("r(b{:?}#{}) not integral: {:?}", nu, m, other)),
                    }
                }
            }
        }
        Ok(tally)
    }

    /// Independent oracle for `B_ν` when `dim f_ν ≤ 3`: searches small
    /// bar-invariant integral combinations `y` of divided monomials with
    /// `(y,y) ∈ 1 + v⁻¹ℤ[[v⁻¹]]`, normalized by sign. Every such `y` is in
    /// `±B`, so hits are collected until `dim f_ν` distinct ones are found:
    /// first single monomials, then combinations over a monomial basis that
    /// starts with the monomial hits.
    pub fn brute_force_cb(&self, nu: &[i64]) -> Result<Vec<FVector>, CbError> {
        let f = &self.f;
        let d = f.weight_space(nu)?.dim();
        if d > 3 {
            return Err(CbError::TooLarge(d));
        }
        let mut words = divided_words(nu);
        words.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        let den = f.form_denominator(nu);
        let mut found: Vec<FVector> = Vec::new();
        let mut hits: Vec<DivWord> = Vec::new();
        for t in &words {
            if found.len() == d {
                return Ok(found);
            }
            let x = f.monomial(t);
            let q = f.form_numerator(nu, &[(t.clone(), Laurent::one())], &x);
            if q.series_nonneg_part(&den).is_one() {
                let y = normalize_sign((*x).clone());
                if !found.contains(&y) {
                    found.push(y);
                    hits.push(t.clone());
                }
            }
        }
        if found.len() == d {
            return Ok(found);
        }
        let mut ech = ModEchelon::new();
        let mut mons: Vec<(DivWord, Rc<FVector>)> = Vec::new();
        for t in hits.into_iter().chain(words) {
            if mons.len() == d {
                break;
            }
            let x = f.monomial(&t);
            if ech.insert(x.eval()) {
                mons.push((t, x));
            }
        }
        let n: Vec<Vec<Laurent>> = mons
            .iter()
            .map(|(s, _)| mons.iter().map(|(_, y)| f.form_numerator(nu, &[(s.clone(), Laurent::one())], y)).collect())
            .collect();
        for (kw, aw) in [(0usize, 1i64), (1, 1), (1, 2), (2, 1), (2, 2)] {
            let per = kw + 1;
            let total = per * d;
            let base = (2 * aw + 1) as usize;
            let count = base.pow(total as u32);
            let mut digits = vec![0i64; total];
            for code in 0..count {
                let mut c = code;
                for dg in digits.iter_mut() {
                    *dg = (c % base) as i64 - aw;
                    c /= base;
                }
                if digits.iter().all(|&x| x == 0) {
                    continue;
                }
                let coeffs: Vec<Laurent> = (0..d)
                    .map(|s| {
                        let a = &digits[s * per..(s + 1) * per];
                        Laurent::from_terms(
                            core::iter::once((0, a[0])).chain((1..per).flat_map(|k| [(k as i32, a[k]), (-(k as i32), a[k])])),
                        )
                    })
                    .collect();
                let mut q = Laurent::zero();
                for s in 0..d {
                    if coeffs[s].is_zero() {
                        continue;
                    }
                    for t in 0..d {
                        if !coeffs[t].is_zero() {
                            q += &(&(&coeffs[s] * &coeffs[t]) * &n[s][t]);
                        }
                    }
                }
                if !q.series_nonneg_part(&den).is_one() {
                    continue;
                }
                let mut y = f.zero(nu);
                for (s, (_, x)) in mons.iter().enumerate() {
                    y.axpy(&coeffs[s], x);
                }
                let y = normalize_sign(y);
                if !found.contains(&y) {
                    found.push(y);
                }
            }
            if found.len() == d {
                return Ok(found);
            }
        }
        Err(CbError::WindowExhausted(nu.to_vec()))
    }
}

/// Multiplies by `±1` so the first nonzero entry has positive leading coefficient.
pub fn normalize_sign(x: FVector) -> FVector {
    match x.d.iter().find(|a| !a.is_zero()) {
        Some(a) if a.leading_coeff() < 0 => x.scale(&Laurent::int(-1)),
        _ => x,
    }
}

/// All divided words of weight `ν` with distinct adjacent letters.
pub fn divided_words(nu: &[i64]) -> Vec<DivWord> {
    fn rec(rem: &mut [i64], last: Option<Gen>, cur: &mut DivWord, out: &mut Vec<DivWord>) {
        if rem.iter().all(|&a| a == 0) {
            out.push(cur.clone());
            return;
        }
        for i in 0..rem.len() {
            if Some(i) == last || rem[i] == 0 {
                continue;
            }
            for a in 1..=rem[i] {
                rem[i] -= a;
                cur.push((i, a as u32));
                rec(rem, Some(i), cur, out);
                cur.pop();
                rem[i] += a;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut nu.to_vec(), None, &mut Vec::new(), &mut out);
    out
}

/// All `ν ∈ ℕ^rank` with `tr ν = t`.
pub fn weights_of_trace(rank: usize, t: usize) -> Vec<Root> {
    fn rec(k: usize, rank: usize, rem: i64, cur: &mut Root, out: &mut Vec<Root>) {
        if k + 1 == rank {
            cur.push(rem);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for a in (0..=rem).rev() {
            cur.push(a);
            rec(k + 1, rank, rem - a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if rank == 0 {
        if t == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, rank, t as i64, &mut Vec::new(), &mut out);
    out
}

/// `D`-vectors evaluated mod `P`, for quick set comparisons.
pub fn eval_set(xs: &[FVector]) -> Vec<Vec<u64>> {
    let mut v: Vec<Vec<u64>> = xs.iter().map(|x| crate::linalg::eval_vec(&x.d, modp::V0)).collect();
    v.sort();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::RationalFn;

    fn a1() -> CanonicalBasis {
        CanonicalBasis::new(CartanDatum::type_a(1))
    }

    fn a2() -> CanonicalBasis {
        CanonicalBasis::new(CartanDatum::type_a(2))
    }

    #[test]
    fn rank_one() {
        let c = a1();
        for k in 0..=6 {
            let b = c.basis(&[k]).unwrap();
            assert_eq!(b.len(), 1);
            assert_eq!(b.elems[0].vector, c.f.theta(0, k as u32));
            assert_eq!(b.eps[0][0], k as u32);
        }
    }

    #[test]
    fn a2_small_weights() {
        let c = a2();
        let b = c.basis(&[1, 1]).unwrap();
        let mut got: Vec<FVector> = b.elems.iter().map(|e| e.vector.clone()).collect();
        got.sort_by(|x, y| x.d.cmp(&y.d));
        let mut want = vec![(*c.f.monomial(&[(0, 1), (1, 1)])).clone(), (*c.f.monomial(&[(1, 1), (0, 1)])).clone()];
        want.sort_by(|x, y| x.d.cmp(&y.d));
        assert_eq!(got, want);
        let k = b.index_of(&c.f.monomial(&[(1, 1), (0, 1)])).unwrap();
        assert_eq!(b.eps[k][0], 0);
        assert_eq!(b.eps_sigma[k][0], 1);
        let b = c.basis(&[2, 1]).unwrap();
        assert_eq!(b.len(), 2);
        assert!(b.index_of(&c.f.monomial(&[(0, 2), (1, 1)])).is_some());
        assert!(b.index_of(&c.f.monomial(&[(1, 1), (0, 2)])).is_some());
        assert_eq!(c.basis(&[0, 0]).unwrap().eps[0], vec![0, 0]);
    }

    #[test]
    fn b_lambda_examples() {
        let c = a1();
        for k in 0..4 {
            assert_eq!(c.b_lambda(&[k], &[2]).unwrap().len(), usize::from(k <= 2));
        }
        let c = a2();
        assert_eq!(c.b_lambda(&[0, 0], &[0, 0]).unwrap(), vec![0]);
        assert!(c.b_lambda(&[1, 0], &[0, 0]).unwrap().is_empty());
        assert_eq!(c.b_lambda(&[2, 2], &[4, 4]).unwrap().len(), 3);
    }

    #[test]
    fn dual_basis_pairs() {
        let c = a2();
        let a = a1();
        let d = a.dual_basis(&[1]).unwrap();
        assert_eq!(d[0], a.f.theta(0, 1).scale(&crate::falg::form_factor(1)));
        for nu in [[1i64, 1], [2, 1], [2, 2]] {
            let b = c.basis(&nu).unwrap();
            let d = c.dual_basis(&nu).unwrap();
            for (k, x) in b.elems.iter().enumerate() {
                for (l, y) in d.iter().enumerate() {
                    let g = c.f.form_from_expansion(&nu, &x.expansion, y);
                    assert_eq!(g, RationalFn::from(i64::from(k == l)));
                }
            }
        }
    }

    #[test]
    fn order_independent_and_sigma_stable() {
        let c1 = a2();
        let c2 = CanonicalBasis::from_falg(FAlg::new(CartanDatum::type_a(2)), CandidateOrder::Reversed);
        for t in 0..=5 {
            for nu in weights_of_trace(2, t) {
                let x: Vec<FVector> = c1.basis(&nu).unwrap().elems.iter().map(|e| e.vector.clone()).collect();
                let y: Vec<FVector> = c2.basis(&nu).unwrap().elems.iter().map(|e| e.vector.clone()).collect();
                assert_eq!(eval_set(&x), eval_set(&y));
                let b = c1.basis(&nu).unwrap();
                // partition by ε_i
                for i in 0..2 {
                    let total: usize = (0..=nu[i] as u32).map(|n| b.eps.iter().filter(|e| e[i] == n).count()).sum();
                    assert_eq!(total, b.len());
                }
            }
        }
    }

    #[test]
    fn expansions_match_vectors() {
        let c = a2();
        for nu in weights_of_trace(2, 4) {
            let b = c.basis(&nu).unwrap();
            for e in &b.elems {
                assert_eq!(c.f.from_expansion(&nu, &e.expansion), e.vector);
            }
        }
    }

    #[test]
    fn structure_positivity_small() {
        let c = a2();
        let t = c.verify_structure_positivity(&[1, 1], &[1, 0]).unwrap();
        assert!(t.passed(), "{:?}", t);
        let a = a1();
        let t = a.verify_structure_positivity(&[2], &[1]).unwrap();
        assert!(t.passed());
    }

    #[test]
    fn brute_force_small() {
        let a = a1();
        assert_eq!(a.brute_force_cb(&[3]).unwrap(), vec![a.f.theta(0, 3)]);
        let c = a2();
        for nu in [[1i64, 1], [2, 2], [2, 1]] {
            let bf = c.brute_force_cb(&nu).unwrap();
            let cb: Vec<FVector> = c.basis(&nu).unwrap().elems.iter().map(|e| e.vector.clone()).collect();
            assert_eq!(eval_set(&bf), eval_set(&cb));
        }
    }
}
