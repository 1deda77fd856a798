//! The algebra `f`, realized through derivation vectors.
//!
//! An element `x ∈ f_ν` is stored as its vector `D_x(w) = _{wₙ}r ⋯ _{w₁}r(x)`
//! over the exponent-one words `w` of weight `ν`. The map `x ↦ D_x` is
//! injective on `f` (its kernel on the free algebra is the radical of the
//! form), and `(θ_w, x) = (1-v⁻²)^{-n} D_x(w)`, so products, coproducts, the
//! bar involution and the form all reduce to operations on these vectors.

use alloc::collections::BTreeMap;
use alloc::rc::Rc;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

use crate::coeff::{quantum_binomial, quantum_factorial, Laurent, RationalFn};
use crate::datum::{CartanDatum, Gen, Root};
use crate::linalg::{eval_vec, gauss_rational, modp, ModEchelon, Solution, Solver};

/// Word `θ_{i₁}^{(a₁)}⋯θ_{iₙ}^{(aₙ)}` in divided powers.
pub type DivWord = Vec<(Gen, u32)>;

/// Linear combination of divided words.
pub type Expansion = Vec<(DivWord, Laurent)>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FalgError {
    #[error("weight of trace {0} exceeds the configured bound {1}")]
    DegreeBound(usize, usize),
}

pub fn trace(nu: &[i64]) -> usize {
    nu.iter().sum::<i64>() as usize
}

pub fn div_word_weight(t: &[(Gen, u32)], rank: usize) -> Root {
    let mut r = vec![0i64; rank];
    for &(i, a) in t {
        r[i] += a as i64;
    }
    r
}

/// Exponent-one word underlying a divided word.
pub fn undivide(t: &[(Gen, u32)]) -> Vec<u8> {
    t.iter().flat_map(|&(i, a)| core::iter::repeat_n(i as u8, a as usize)).collect()
}

/// Merges adjacent equal letters: `θ_i^{(a)}θ_i^{(b)} = [a+b choose a] θ_i^{(a+b)}`.
pub fn normalize_div_word(t: &[(Gen, u32)]) -> (DivWord, Laurent) {
    let mut out: DivWord = Vec::with_capacity(t.len());
    let mut c = Laurent::one();
    for &(i, a) in t {
        if a == 0 {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.0 == i => {
                c = &c * &quantum_binomial((last.1 + a) as i64, a);
                last.1 += a;
            }
            _ => out.push((i, a)),
        }
    }
    (out, c)
}

/// Adds like terms and drops zeros.
pub fn collect_expansion(e: Expansion) -> Expansion {
    let mut m: BTreeMap<DivWord, Laurent> = BTreeMap::new();
    for (t, c) in e {
        let (t, k) = normalize_div_word(&t);
        let c = &c * &k;
        let slot = m.entry(t).or_insert_with(Laurent::zero);
        *slot += &c;
    }
    m.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// Product of expansions by concatenation.
pub fn expansion_product(x: &Expansion, y: &Expansion) -> Expansion {
    let mut out = Vec::with_capacity(x.len() * y.len());
    for (t1, c1) in x {
        for (t2, c2) in y {
            let mut t = t1.clone();
            t.extend_from_slice(t2);
            out.push((t, c1 * c2));
        }
    }
    collect_expansion(out)
}

/// Exponent-one words of a fixed weight, in lexicographic order.
#[derive(Debug)]
pub struct WordSpace {
    pub weight: Root,
    pub words: Vec<Vec<u8>>,
    index: BTreeMap<Vec<u8>, usize>,
}

impl WordSpace {
    fn new(weight: &[i64]) -> Self {
        let mut words = Vec::new();
        let mut rem = weight.to_vec();
        let mut cur = Vec::new();
        fn rec(rem: &mut [i64], cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
            if rem.iter().all(|&a| a == 0) {
                out.push(cur.clone());
                return;
            }
            for i in 0..rem.len() {
                if rem[i] > 0 {
                    rem[i] -= 1;
                    cur.push(i as u8);
                    rec(rem, cur, out);
                    cur.pop();
                    rem[i] += 1;
                }
            }
        }
        rec(&mut rem, &mut cur, &mut words);
        let index = words.iter().enumerate().map(|(k, w)| (w.clone(), k)).collect();
        WordSpace { weight: weight.to_vec(), words, index }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn index(&self, w: &[u8]) -> usize {
        self.index[w]
    }
}

/// Homogeneous element of `f`, stored as its derivation vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FVector {
    pub weight: Root,
    pub d: Vec<Laurent>,
}

impl FVector {
    pub fn is_zero(&self) -> bool {
        self.d.iter().all(|a| a.is_zero())
    }

    pub fn add(&self, o: &FVector) -> FVector {
        assert_eq!(self.weight, o.weight, "weights differ");
        FVector { weight: self.weight.clone(), d: self.d.iter().zip(&o.d).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &FVector) -> FVector {
        assert_eq!(self.weight, o.weight, "weights differ");
        FVector { weight: self.weight.clone(), d: self.d.iter().zip(&o.d).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &Laurent) -> FVector {
        FVector { weight: self.weight.clone(), d: self.d.iter().map(|a| a * c).collect() }
    }

    /// Adds `c·o` in place.
    pub fn axpy(&mut self, c: &Laurent, o: &FVector) {
        if c.is_zero() {
            return;
        }
        for (a, b) in self.d.iter_mut().zip(&o.d) {
            if !b.is_zero() {
                *a += &(c * b);
            }
        }
    }

    /// Values modulo `P` at the fixed evaluation point.
    pub fn eval(&self) -> Vec<u64> {
        eval_vec(&self.d, modp::V0)
    }
}

/// Basis data for `f_ν`: pivot words whose monomials form a basis.
#[derive(Debug)]
pub struct WeightSpaceBasis {
    pub weight: Root,
    pub space: Rc<WordSpace>,
    /// Pivot word indices, increasing.
    pub pivots: Vec<usize>,
    /// `D_{θ_p}` for each pivot `p`.
    pub pivot_vectors: Vec<FVector>,
    solver: Solver,
}

impl WeightSpaceBasis {
    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    /// `M[p][q] = D_{θ_q}(p) = (1-v⁻²)ⁿ(θ_p,θ_q)`.
    pub fn gram_numerators(&self) -> Vec<Vec<Laurent>> {
        self.pivots.iter().map(|&p| self.pivot_vectors.iter().map(|q| q.d[p].clone()).collect()).collect()
    }

    /// Coordinates of `x` over the pivot monomials.
    pub fn expand(&self, x: &FVector) -> Vec<RationalFn> {
        match self.solver.solve(&x.d) {
            Solution::Laurent(c) => c.into_iter().map(RationalFn::from).collect(),
            Solution::Rational(c) => c,
            Solution::NotInSpan => panic!("derivation vector outside f_ν"),
        }
    }
}

/// `(1-v⁻²)ⁿ`.
pub fn form_factor(n: usize) -> Laurent {
    Laurent::from_terms([(0, 1), (-2, -1)]).pow(n as u32)
}

/// Context for computations in `f` over a Cartan datum, with caches.
pub struct FAlg {
    pub cartan: CartanDatum,
    max_trace: usize,
    spaces: RefCell<BTreeMap<Root, Rc<WordSpace>>>,
    monomials: RefCell<BTreeMap<DivWord, Rc<FVector>>>,
    bases: RefCell<BTreeMap<Root, Rc<WeightSpaceBasis>>>,
}

impl FAlg {
    pub fn new(cartan: CartanDatum) -> Self {
        Self::with_bound(cartan, 24)
    }

    pub fn with_bound(cartan: CartanDatum, max_trace: usize) -> Self {
        FAlg {
            cartan,
            max_trace,
            spaces: RefCell::new(BTreeMap::new()),
            monomials: RefCell::new(BTreeMap::new()),
            bases: RefCell::new(BTreeMap::new()),
        }
    }

    pub fn rank(&self) -> usize {
        self.cartan.rank()
    }

    pub fn check_bound(&self, nu: &[i64]) -> Result<(), FalgError> {
        let t = trace(nu);
        if t > self.max_trace {
            Err(FalgError::DegreeBound(t, self.max_trace))
        } else {
            Ok(())
        }
    }

    pub fn space(&self, nu: &[i64]) -> Rc<WordSpace> {
        if let Some(s) = self.spaces.borrow().get(nu) {
            return s.clone();
        }
        let s = Rc::new(WordSpace::new(nu));
        self.spaces.borrow_mut().insert(nu.to_vec(), s.clone());
        s
    }

    pub fn zero_weight(&self) -> Root {
        vec![0; self.rank()]
    }

    pub fn zero(&self, nu: &[i64]) -> FVector {
        FVector { weight: nu.to_vec(), d: vec![Laurent::zero(); self.space(nu).len()] }
    }

    pub fn one(&self) -> FVector {
        FVector { weight: self.zero_weight(), d: vec![Laurent::one()] }
    }

    pub fn unit_root(&self, i: Gen) -> Root {
        let mut r = self.zero_weight();
        r[i] = 1;
        r
    }

    /// `θ_i^{(a)}`.
    pub fn theta(&self, i: Gen, a: u32) -> FVector {
        let mut nu = self.zero_weight();
        nu[i] = a as i64;
        let e = (a as i64 * (a as i64 - 1) / 2) as i32;
        FVector { weight: nu, d: vec![Laurent::v(e)] }
    }

    /// `θ_t` for a divided word `t`.
    pub fn monomial(&self, t: &[(Gen, u32)]) -> Rc<FVector> {
        if let Some(x) = self.monomials.borrow().get(t) {
            return x.clone();
        }
        let x = match t.split_last() {
            None => self.one(),
            Some((&(i, a), rest)) => {
                let head = self.monomial(rest);
                self.multiply(&head, &self.theta(i, a))
            }
        };
        let x = Rc::new(x);
        self.monomials.borrow_mut().insert(t.to_vec(), x.clone());
        x
    }

    /// Element with the given divided-word expansion.
    pub fn from_expansion(&self, nu: &[i64], e: &[(DivWord, Laurent)]) -> FVector {
        let mut x = self.zero(nu);
        for (t, c) in e {
            x.axpy(c, &self.monomial(t));
        }
        x
    }

    /// `x·y`.
    pub fn multiply(&self, x: &FVector, y: &FVector) -> FVector {
        let nu: Root = x.weight.iter().zip(&y.weight).map(|(a, b)| a + b).collect();
        let sx = self.space(&x.weight);
        let sy = self.space(&y.weight);
        let s = self.space(&nu);
        let mut out = vec![Laurent::zero(); s.len()];
        let n1 = trace(&x.weight);
        let n2 = trace(&y.weight);
        // |x|·j for each letter j
        let xdot: Vec<i64> = (0..self.rank()).map(|j| self.cartan.dot_root(j, &x.weight)).collect();
        let mut w = Vec::with_capacity(n1 + n2);
        for (ux, dx) in sx.words.iter().zip(&x.d) {
            if dx.is_zero() {
                continue;
            }
            for (uy, dy) in sy.words.iter().zip(&y.d) {
                if dy.is_zero() {
                    continue;
                }
                let c = dx * dy;
                self.interleave(ux, uy, 0, 0, 0, &xdot, &mut w, &c, &s, &mut out);
            }
        }
        FVector { weight: nu, d: out }
    }

    #[allow(clippy::too_many_arguments)]
    fn interleave(
        &self,
        ux: &[u8],
        uy: &[u8],
        a: usize,
        b: usize,
        e: i64,
        xdot: &[i64],
        w: &mut Vec<u8>,
        c: &Laurent,
        s: &WordSpace,
        out: &mut [Laurent],
    ) {
        if a == ux.len() && b == uy.len() {
            let k = s.index(w);
            out[k] += &c.shift(e as i32);
            return;
        }
        if a < ux.len() {
            w.push(ux[a]);
            self.interleave(ux, uy, a + 1, b, e, xdot, w, c, s, out);
            w.pop();
        }
        if b < uy.len() {
            let j = uy[b] as usize;
            // j·(|x| − letters of x already placed)
            let placed: i64 = ux[..a].iter().map(|&l| self.cartan.dot(j, l as usize)).sum();
            w.push(uy[b]);
            self.interleave(ux, uy, a, b + 1, e + xdot[j] - placed, xdot, w, c, s, out);
            w.pop();
        }
    }

    /// The bar involution.
    pub fn bar(&self, x: &FVector) -> FVector {
        let s = self.space(&x.weight);
        let d = s
            .words
            .iter()
            .map(|w| {
                let mut rest = x.weight.clone();
                let mut e = 0i64;
                for &l in w {
                    rest[l as usize] -= 1;
                    e += self.cartan.dot_root(l as usize, &rest);
                }
                let r: Vec<u8> = w.iter().rev().copied().collect();
                x.d[s.index(&r)].bar().shift(e as i32)
            })
            .collect();
        FVector { weight: x.weight.clone(), d }
    }

    /// The anti-automorphism `σ` fixing each `θ_i`.
    pub fn sigma(&self, x: &FVector) -> FVector {
        let s = self.space(&x.weight);
        let d = s
            .words
            .iter()
            .map(|w| {
                let r: Vec<u8> = w.iter().rev().copied().collect();
                x.d[s.index(&r)].clone()
            })
            .collect();
        FVector { weight: x.weight.clone(), d }
    }

    /// `_i r(x)`.
    pub fn ir(&self, i: Gen, x: &FVector) -> FVector {
        self.derive(i, x, true)
    }

    /// `r_i(x)`.
    pub fn ri(&self, i: Gen, x: &FVector) -> FVector {
        self.derive(i, x, false)
    }

    fn derive(&self, i: Gen, x: &FVector, left: bool) -> FVector {
        let mut nu = x.weight.clone();
        if nu[i] == 0 {
            nu[i] = -1;
            return FVector { weight: nu, d: Vec::new() };
        }
        nu[i] -= 1;
        let s = self.space(&x.weight);
        let t = self.space(&nu);
        let d = t
            .words
            .iter()
            .map(|w| {
                let mut u = Vec::with_capacity(w.len() + 1);
                if left {
                    u.push(i as u8);
                    u.extend_from_slice(w);
                } else {
                    u.extend_from_slice(w);
                    u.push(i as u8);
                }
                x.d[s.index(&u)].clone()
            })
            .collect();
        FVector { weight: nu, d }
    }

    /// Matrix `T(a,b) = D_z(a·b)` over words `a` of weight `μ₁` and `b` of
    /// weight `|z| - μ₁`: the image of the `(μ₁, |z|-μ₁)` component of `r(z)`
    /// under `D ⊗ D`.
    pub fn comultiply_matrix(&self, z: &FVector, mu1: &[i64]) -> Vec<Vec<Laurent>> {
        let mu2: Root = z.weight.iter().zip(mu1).map(|(a, b)| a - b).collect();
        let s = self.space(&z.weight);
        let s1 = self.space(mu1);
        let s2 = self.space(&mu2);
        s1.words
            .iter()
            .map(|a| {
                s2.words
                    .iter()
                    .map(|b| {
                        let mut w = a.clone();
                        w.extend_from_slice(b);
                        z.d[s.index(&w)].clone()
                    })
                    .collect()
            })
            .collect()
    }

    /// `r(z)` at `(μ₁, μ₂)` over given bases of `f_{μ₁}` and `f_{μ₂}`:
    /// coefficients `c[k][l]` with `r(z) = Σ c[k][l] b₁ₖ ⊗ b₂ₗ`.
    pub fn comultiply_in(&self, z: &FVector, s1: &Solver, s2: &Solver, mu1: &[i64]) -> Vec<Vec<Solution>> {
        let t = self.comultiply_matrix(z, mu1);
        // A_l(a) = Σ_k c[k][l] D_{b₁ₖ}(a)
        let mut a_cols: Vec<Vec<RationalFn>> = vec![Vec::with_capacity(t.len()); s2.len()];
        for row in &t {
            let coords = solve_any(s2, row);
            for (l, c) in coords.into_iter().enumerate() {
                a_cols[l].push(c);
            }
        }
        let mut out = vec![Vec::with_capacity(s2.len()); s1.len()];
        for col in &a_cols {
            // clear denominators to solve over Laurent columns
            let (num, den) = common_denominator(col);
            let sol = s1.solve(&num);
            let coords: Vec<Solution> = match sol {
                Solution::NotInSpan => panic!("coproduct component outside span"),
                Solution::Laurent(c) if den.is_one() => {
                    c.into_iter().map(|x| Solution::Laurent(vec![x])).collect()
                }
                Solution::Laurent(c) => {
                    c.into_iter().map(|x| wrap_rational(RationalFn::new(x, den.clone()))).collect()
                }
                Solution::Rational(c) => {
                    c.into_iter().map(|x| wrap_rational(x.div_laurent(&den))).collect()
                }
            };
            for (k, c) in coords.into_iter().enumerate() {
                out[k].push(c);
            }
        }
        out
    }

    /// Pivot basis of `f_ν`.
    pub fn weight_space(&self, nu: &[i64]) -> Result<Rc<WeightSpaceBasis>, FalgError> {
        self.check_bound(nu)?;
        if let Some(b) = self.bases.borrow().get(nu) {
            return Ok(b.clone());
        }
        let space = self.space(nu);
        let mut cands: Vec<(Vec<u8>, FVector)> = Vec::new();
        if trace(nu) == 0 {
            cands.push((Vec::new(), self.one()));
        } else {
            for i in 0..self.rank() {
                if nu[i] == 0 {
                    continue;
                }
                let mut mu = nu.to_vec();
                mu[i] -= 1;
                let sub = self.weight_space(&mu)?;
                let th = self.theta(i, 1);
                for (&p, pv) in sub.pivots.iter().zip(&sub.pivot_vectors) {
                    let mut w = vec![i as u8];
                    w.extend_from_slice(&sub.space.words[p]);
                    cands.push((w, self.multiply(&th, pv)));
                }
            }
        }
        cands.sort_by(|a, b| a.0.cmp(&b.0));
        let mut ech = ModEchelon::new();
        let mut pivots = Vec::new();
        let mut vecs = Vec::new();
        for (w, x) in cands {
            if ech.insert(x.eval()) {
                pivots.push(space.index(&w));
                vecs.push(x);
            }
        }
        let solver = Solver::new(vecs.iter().map(|x| x.d.clone()).collect());
        let b = Rc::new(WeightSpaceBasis { weight: nu.to_vec(), space, pivots, pivot_vectors: vecs, solver });
        self.bases.borrow_mut().insert(nu.to_vec(), b.clone());
        Ok(b)
    }

    pub fn dim(&self, nu: &[i64]) -> usize {
        self.weight_space(nu).map(|b| b.dim()).unwrap_or(0)
    }

    /// `(x, y)` for homogeneous `x, y`.
    pub fn gram_form(&self, x: &FVector, y: &FVector) -> RationalFn {
        if x.weight != y.weight {
            return RationalFn::zero();
        }
        let b = self.weight_space(&x.weight).expect("weight within bound");
        let c = b.expand(x);
        let mut acc = RationalFn::zero();
        for (cp, &p) in c.iter().zip(&b.pivots) {
            acc = &acc + &cp.mul_laurent(&y.d[p]);
        }
        acc.div_laurent(&form_factor(trace(&x.weight)))
    }

    /// `(1-v⁻²)ⁿ ∏ᵢ [νᵢ]!`, the common denominator of forms on `f_ν`.
    pub fn form_denominator(&self, nu: &[i64]) -> Laurent {
        let mut d = form_factor(trace(nu));
        for &a in nu {
            d = &d * &quantum_factorial(a as u32);
        }
        d
    }

    /// Numerator `N` with `(x, y) = N / form_denominator(ν)`, where `x` has
    /// divided-word expansion `e`.
    pub fn form_numerator(&self, nu: &[i64], e: &[(DivWord, Laurent)], y: &FVector) -> Laurent {
        let s = self.space(nu);
        let full: Laurent = nu.iter().fold(Laurent::one(), |acc, &a| &acc * &quantum_factorial(a as u32));
        let mut n = Laurent::zero();
        for (t, c) in e {
            let dy = &y.d[s.index(&undivide(t))];
            if dy.is_zero() {
                continue;
            }
            let part: Laurent = t.iter().fold(Laurent::one(), |acc, &(_, a)| &acc * &quantum_factorial(a));
            let ratio = full.div_exact(&part).expect("multinomial is integral");
            n += &(&(c * dy) * &ratio);
        }
        n
    }

    /// `(x, y)` where `x` has divided-word expansion `e`.
    pub fn form_from_expansion(&self, nu: &[i64], e: &[(DivWord, Laurent)], y: &FVector) -> RationalFn {
        RationalFn::new(self.form_numerator(nu, e, y), self.form_denominator(nu))
    }
}

fn wrap_rational(x: RationalFn) -> Solution {
    match x.as_laurent() {
        Some(l) => Solution::Laurent(vec![l.clone()]),
        None => Solution::Rational(vec![x]),
    }
}

/// Coordinates of `t` over the solver columns, as rational functions.
pub fn solve_any(s: &Solver, t: &[Laurent]) -> Vec<RationalFn> {
    match s.solve(t) {
        Solution::Laurent(c) => c.into_iter().map(RationalFn::from).collect(),
        Solution::Rational(c) => c,
        Solution::NotInSpan => panic!("vector outside span"),
    }
}

/// `(numerators, d)` with `xᵢ = numᵢ/d`.
pub fn common_denominator(xs: &[RationalFn]) -> (Vec<Laurent>, Laurent) {
    let mut den = Laurent::one();
    for x in xs {
        if !x.den().is_one() {
            let r = den.div_exact(x.den());
            if r.is_none() {
                den = &den * x.den();
            }
        }
    }
    let nums = xs.iter().map(|x| x.mul_laurent(&den).as_laurent().cloned().expect("common denominator")).collect();
    (nums, den)
}

/// Exact rational inverse-solve used by tests and small systems.
pub fn solve_square(a: Vec<Vec<RationalFn>>, b: Vec<RationalFn>) -> Option<Vec<RationalFn>> {
    gauss_rational(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::quantum_int;
    use proptest::prelude::*;

    fn l(s: &str) -> Laurent {
        s.parse().unwrap()
    }

    fn a2() -> FAlg {
        FAlg::new(CartanDatum::type_a(2))
    }

    #[test]
    fn derivations() {
        let f = a2();
        let t1 = f.theta(0, 1);
        let t2 = f.theta(1, 1);
        assert_eq!(f.ir(0, &t1), f.one());
        assert_eq!(f.ir(0, &f.multiply(&t1, &t2)), t2);
        assert_eq!(f.ir(0, &f.multiply(&t2, &t1)), t2.scale(&Laurent::v(-1)));
        assert_eq!(f.ri(0, &f.multiply(&t2, &t1)), t2);
    }

    #[test]
    fn small_forms() {
        let f = a2();
        let t1 = f.theta(0, 1);
        let g = f.gram_form(&t1, &t1);
        assert_eq!(g, RationalFn::new(l("1"), l("1 - v^-2")));
        assert!(f.gram_form(&t1, &f.theta(1, 1)).is_zero());
        assert_eq!(f.gram_form(&f.one(), &f.one()), RationalFn::one());
        let a1 = FAlg::new(CartanDatum::type_a(1));
        let t = a1.theta(0, 2);
        let expect = RationalFn::new(l("1"), &l("1 - v^-2") * &l("1 - v^-4"));
        assert_eq!(a1.gram_form(&t, &t), expect);
        let e = vec![(vec![(0, 2)], Laurent::one())];
        assert_eq!(a1.form_from_expansion(&[2], &e, &t), expect);
    }

    #[test]
    fn dimensions() {
        let f = a2();
        assert_eq!(f.dim(&[0, 0]), 1);
        assert_eq!(f.dim(&[1, 1]), 2);
        assert_eq!(f.dim(&[2, 1]), 2);
        assert_eq!(f.dim(&[2, 2]), 3);
        let a1 = FAlg::new(CartanDatum::type_a(1));
        assert_eq!(a1.dim(&[2]), 1);
        let b = f.weight_space(&[1, 1]).unwrap();
        assert_eq!(b.pivots.len(), 2);
    }

    #[test]
    fn divided_powers_and_serre() {
        let f = a2();
        let t1 = f.theta(0, 1);
        assert_eq!(f.multiply(&t1, &t1), f.theta(0, 2).scale(&quantum_int(2)));
        assert_eq!(f.multiply(&t1, &f.one()), t1);
        let serre = f
            .monomial(&[(0, 2), (1, 1)])
            .sub(&f.monomial(&[(0, 1), (1, 1), (0, 1)]))
            .add(&f.monomial(&[(1, 1), (0, 2)]));
        assert!(serre.is_zero());
    }

    #[test]
    fn comultiplication_a2() {
        let f = a2();
        let z = f.monomial(&[(0, 1), (1, 1)]);
        // component (α₂, α₁): v⁻¹ θ₂ ⊗ θ₁
        let t = f.comultiply_matrix(&z, &[0, 1]);
        assert_eq!(t, vec![vec![Laurent::v(-1)]]);
        let t = f.comultiply_matrix(&z, &[1, 0]);
        assert_eq!(t, vec![vec![Laurent::one()]]);
        // A₁: r(θ^{(2)}) has middle term v^{-1}·θ⊗θ
        let a1 = FAlg::new(CartanDatum::type_a(1));
        let t = a1.comultiply_matrix(&a1.theta(0, 2), &[1]);
        assert_eq!(t, vec![vec![Laurent::v(1)]]);
    }

    #[test]
    fn bar_and_sigma() {
        let f = a2();
        let x = f.monomial(&[(0, 1), (1, 1)]);
        assert_eq!(f.bar(&x), *x);
        let y = x.scale(&l("v^2 + 3"));
        assert_eq!(f.bar(&y), x.scale(&l("v^-2 + 3")));
        assert_eq!(f.sigma(&x), *f.monomial(&[(1, 1), (0, 1)]));
        assert_eq!(f.sigma(&f.theta(0, 3)), f.theta(0, 3));
    }

    fn div_words(rank: usize) -> impl Strategy<Value = DivWord> {
        proptest::collection::vec((0..rank, 1u32..3), 0..4)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn algebra_laws(a in div_words(2), b in div_words(2), c in div_words(2)) {
            let f = a2();
            let (x, y, z) = (f.monomial(&a), f.monomial(&b), f.monomial(&c));
            prop_assert_eq!(f.multiply(&f.multiply(&x, &y), &z), f.multiply(&x, &f.multiply(&y, &z)));
            let xy = f.multiply(&x, &y);
            prop_assert_eq!(f.bar(&xy), f.multiply(&f.bar(&x), &f.bar(&y)));
            prop_assert_eq!(f.sigma(&xy), f.multiply(&f.sigma(&y), &f.sigma(&x)));
            prop_assert_eq!(f.sigma(&f.bar(&xy)), f.bar(&f.sigma(&xy)));
            prop_assert_eq!(f.bar(&x), (*x).clone());
        }

        #[test]
        fn adjunction_and_symmetry(a in div_words(2), b in div_words(2), i in 0usize..2) {
            let f = a2();
            let x = f.monomial(&a);
            let mut wy = div_word_weight(&a, 2);
            wy[i] += 1;
            // y of weight |x| + i, built from b with a fixed tail
            let mut bb = b.clone();
            let rest: Root = (0..2).map(|k| wy[k] - div_word_weight(&b, 2)[k]).collect();
            prop_assume!(rest.iter().all(|&r| r >= 0));
            for k in 0..2 { if rest[k] > 0 { bb.push((k, rest[k] as u32)); } }
            let y = f.monomial(&bb);
            let lhs = f.gram_form(&f.multiply(&f.theta(i, 1), &x), &y);
            let rhs = f.gram_form(&x, &f.ir(i, &y)).div_laurent(&form_factor(1));
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(f.gram_form(&x, &y.clone()), f.gram_form(&y, &x));
            let sx = f.sigma(&y);
            prop_assert_eq!(f.gram_form(&sx, &sx), f.gram_form(&y, &y));
        }

        #[test]
        fn twisted_leibniz(a in div_words(2), b in div_words(2), i in 0usize..2) {
            let f = a2();
            let (x, y) = (f.monomial(&a), f.monomial(&b));
            let lhs = f.ir(i, &f.multiply(&x, &y));
            prop_assume!(lhs.weight[i] >= 0);
            let mut rhs = f.zero(&lhs.weight);
            if x.weight[i] > 0 { rhs = rhs.add(&f.multiply(&f.ir(i, &x), &y)); }
            if y.weight[i] > 0 {
                let e = f.cartan.dot_root(i, &x.weight) as i32;
                rhs = rhs.add(&f.multiply(&x, &f.ir(i, &y)).scale(&Laurent::v(e)));
            }
            prop_assert_eq!(lhs, rhs);
        }
    }
}
