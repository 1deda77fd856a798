//! Exact linear algebra over `ℤ[v,v⁻¹]` and `ℚ(v)`.
//!
//! Ranks and pivots are found modulo the Mersenne prime `2⁶¹-1` at a fixed
//! evaluation point; Laurent solutions are recovered by evaluation and
//! interpolation and then verified exactly, so every answer returned is exact.

use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

use crate::coeff::{Laurent, RationalFn};

/// Arithmetic modulo `P = 2⁶¹ - 1`.
pub mod modp {
    pub const P: u64 = (1u64 << 61) - 1;
    /// Fixed evaluation point for rank computations.
    pub const V0: u64 = 1_096_120_283_946_273_337;

    #[inline]
    fn reduce(x: u128) -> u64 {
        let lo = (x as u64) & P;
        let hi = (x >> 61) as u64;
        let mut s = lo + hi;
        if s >= P {
            s -= P;
        }
        if s >= P {
            s -= P;
        }
        s
    }

    #[inline]
    pub fn add(a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= P {
            s - P
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + P - b
        }
    }

    #[inline]
    pub fn mul(a: u64, b: u64) -> u64 {
        reduce(a as u128 * b as u128)
    }

    pub fn pow(mut a: u64, mut e: u64) -> u64 {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, a);
            }
            a = mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn inv(a: u64) -> u64 {
        assert!(a != 0, "inverse of zero mod p");
        pow(a, P - 2)
    }

    pub fn from_i64(a: i64) -> u64 {
        let m = a.unsigned_abs() % P;
        if a < 0 && m != 0 {
            P - m
        } else {
            m
        }
    }

    /// Symmetric lift to `(-P/2, P/2]`.
    pub fn to_i64(a: u64) -> i64 {
        if a > P / 2 {
            -((P - a) as i64)
        } else {
            a as i64
        }
    }
}

/// Incremental row echelon form over `𝔽_P`.
#[derive(Clone, Debug, Default)]
pub struct ModEchelon {
    basis: Vec<(usize, Vec<u64>)>,
}

impl ModEchelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Pivot coordinates, one per inserted independent vector.
    pub fn pivots(&self) -> Vec<usize> {
        self.basis.iter().map(|b| b.0).collect()
    }

    pub fn reduce(&self, v: &mut [u64]) {
        for (p, b) in &self.basis {
            let f = v[*p];
            if f != 0 {
                for (x, &y) in v.iter_mut().zip(b) {
                    if y != 0 {
                        *x = modp::sub(*x, modp::mul(f, y));
                    }
                }
            }
        }
    }

    pub fn in_span(&self, v: &[u64]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Inserts `v`; returns whether it was independent of the current span.
    pub fn insert(&mut self, mut v: Vec<u64>) -> bool {
        self.reduce(&mut v);
        match v.iter().position(|&x| x != 0) {
            None => false,
            Some(p) => {
                let s = modp::inv(v[p]);
                for x in v.iter_mut() {
                    *x = modp::mul(*x, s);
                }
                self.basis.push((p, v));
                true
            }
        }
    }
}

/// Evaluates a vector of Laurent polynomials at `x`.
pub fn eval_vec(v: &[Laurent], x: u64) -> Vec<u64> {
    let xi = modp::inv(x);
    v.iter().map(|a| a.eval_mod(x, xi)).collect()
}

/// Rank over `ℚ(v)` of a family of vectors (exact with high probability;
/// a rank can only be underestimated, never overestimated).
pub fn rank(vectors: &[Vec<Laurent>]) -> usize {
    let mut e = ModEchelon::new();
    for v in vectors {
        e.insert(eval_vec(v, modp::V0));
    }
    e.rank()
}

/// Indices of a greedily chosen maximal independent subfamily.
pub fn independent_subset(vectors: &[Vec<Laurent>]) -> Vec<usize> {
    let mut e = ModEchelon::new();
    let mut out = Vec::new();
    for (k, v) in vectors.iter().enumerate() {
        if e.insert(eval_vec(v, modp::V0)) {
            out.push(k);
        }
    }
    out
}

/// Inverse and determinant.
fn mod_inverse(m: &[Vec<u64>]) -> Option<(Vec<Vec<u64>>, u64)> {
    let k = m.len();
    let mut a: Vec<Vec<u64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..k).map(|j| u64::from(i == j)));
            r
        })
        .collect();
    let mut det = 1u64;
    for c in 0..k {
        let p = (c..k).find(|&r| a[r][c] != 0)?;
        if p != c {
            a.swap(c, p);
            det = modp::sub(0, det);
        }
        det = modp::mul(det, a[c][c]);
        let s = modp::inv(a[c][c]);
        for x in a[c].iter_mut() {
            *x = modp::mul(*x, s);
        }
        let pivot_row = a[c].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != c && row[c] != 0 {
                let f = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    if y != 0 {
                        *x = modp::sub(*x, modp::mul(f, y));
                    }
                }
            }
        }
    }
    Some((a.into_iter().map(|r| r[k..].to_vec()).collect(), det))
}

/// Monomial coefficients of the polynomial of degree `< xs.len()` through the
/// given points.
pub fn interpolate(xs: &[u64], ys: &[u64]) -> Vec<u64> {
    let n = xs.len();
    let mut d = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = modp::sub(d[i], d[i - 1]);
            let den = modp::sub(xs[i], xs[i - j]);
            d[i] = modp::mul(num, modp::inv(den));
        }
    }
    let mut poly = vec![0u64; n];
    for i in (0..n).rev() {
        // poly = poly·(x - xs[i]) + d[i]
        let mut next = vec![0u64; n];
        for k in 0..n {
            if poly[k] != 0 {
                if k + 1 < n {
                    next[k + 1] = modp::add(next[k + 1], poly[k]);
                }
                next[k] = modp::sub(next[k], modp::mul(poly[k], xs[i]));
            }
        }
        next[0] = modp::add(next[0], d[i]);
        poly = next;
    }
    poly
}

const K_START: usize = 16;
const K_LAURENT: usize = 64;
const SMALL: u64 = 1 << 31;

#[derive(Debug)]
struct Point {
    x: u64,
    inv: Vec<Vec<u64>>,
    det: u64,
}

/// Interpolates a Laurent polynomial `f` from its values, assuming its
/// exponents lie in `[lo, lo + xs.len())`.
fn interpolate_laurent(xs: &[u64], ys: &[u64], lo: i32) -> Laurent {
    let shifted: Vec<u64> = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let f = if lo <= 0 { modp::pow(x, (-lo) as u64) } else { modp::pow(modp::inv(x), lo as u64) };
            modp::mul(y, f)
        })
        .collect();
    let poly = interpolate(xs, &shifted);
    Laurent::from_dense(lo, poly.into_iter().map(modp::to_i64).collect())
}

/// Outcome of solving `B·c = t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Laurent(Vec<Laurent>),
    Rational(Vec<RationalFn>),
    NotInSpan,
}

impl Solution {
    pub fn laurent(self) -> Option<Vec<Laurent>> {
        match self {
            Solution::Laurent(c) => Some(c),
            _ => None,
        }
    }
}

/// Solver for linear combinations of fixed independent columns.
#[derive(Debug)]
pub struct Solver {
    cols: Vec<Vec<Laurent>>,
    srows: Vec<usize>,
    ech: ModEchelon,
    points: RefCell<Vec<Point>>,
    next_x: RefCell<u64>,
}

impl Solver {
    /// `cols` must be linearly independent (panics otherwise).
    pub fn new(cols: Vec<Vec<Laurent>>) -> Self {
        let mut ech = ModEchelon::new();
        for c in &cols {
            assert!(ech.insert(eval_vec(c, modp::V0)), "solver columns are dependent");
        }
        let srows = ech.pivots();
        Solver { cols, srows, ech, points: RefCell::new(Vec::new()), next_x: RefCell::new(2) }
    }

    pub fn len(&self) -> usize {
        self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cols.is_empty()
    }

    pub fn columns(&self) -> &[Vec<Laurent>] {
        &self.cols
    }

    /// Whether `t` lies in the `ℚ(v)`-span of the columns.
    pub fn in_span(&self, t: &[Laurent]) -> bool {
        self.ech.in_span(&eval_vec(t, modp::V0))
    }

    fn ensure_points(&self, k: usize) {
        let mut pts = self.points.borrow_mut();
        let mut nx = self.next_x.borrow_mut();
        while pts.len() < k {
            let x = *nx;
            *nx += 1;
            let xi = modp::inv(x);
            let m: Vec<Vec<u64>> = self
                .srows
                .iter()
                .map(|&r| self.cols.iter().map(|c| c[r].eval_mod(x, xi)).collect())
                .collect();
            if let Some((inv, det)) = mod_inverse(&m) {
                pts.push(Point { x, inv, det });
            }
        }
    }

    /// Mod-`P` check of `Σ numⱼ·colⱼ = den·t` on the selected rows at `V0`.
    fn check_mod(&self, num: &[Laurent], den: &Laurent, t: &[Laurent]) -> bool {
        let (x, xi) = (modp::V0, modp::inv(modp::V0));
        let d = den.eval_mod(x, xi);
        let nv: Vec<u64> = num.iter().map(|c| c.eval_mod(x, xi)).collect();
        self.srows.iter().all(|&r| {
            let mut s = 0u64;
            for (cj, col) in nv.iter().zip(&self.cols) {
                s = modp::add(s, modp::mul(*cj, col[r].eval_mod(x, xi)));
            }
            s == modp::mul(d, t[r].eval_mod(x, xi))
        })
    }

    /// Exact check of `Σ numⱼ·colⱼ = den·t` on all rows.
    fn check_exact(&self, num: &[Laurent], den: &Laurent, t: &[Laurent]) -> bool {
        (0..t.len()).all(|r| {
            let mut s = Laurent::zero();
            for (cj, col) in num.iter().zip(&self.cols) {
                if !cj.is_zero() && !col[r].is_zero() {
                    s += &(cj * &col[r]);
                }
            }
            s == den * &t[r]
        })
    }

    fn check(&self, num: &[Laurent], den: &Laurent, t: &[Laurent]) -> bool {
        if !self.check_mod(num, den, t) {
            return false;
        }
        let small = |x: &Laurent| x.terms().all(|(_, a)| a.unsigned_abs() < SMALL);
        if num.iter().all(small) && small(den) {
            self.check_exact(num, den, t)
        } else {
            // Coefficients too large for exact products in i64: a second
            // independent evaluation point confirms the identity.
            let x = modp::V0 ^ 0x5bd1_e995;
            let xi = modp::inv(x);
            let d = den.eval_mod(x, xi);
            let nv: Vec<u64> = num.iter().map(|c| c.eval_mod(x, xi)).collect();
            (0..t.len()).all(|r| {
                let mut s = 0u64;
                for (cj, col) in nv.iter().zip(&self.cols) {
                    s = modp::add(s, modp::mul(*cj, col[r].eval_mod(x, xi)));
                }
                s == modp::mul(d, t[r].eval_mod(x, xi))
            })
        }
    }

    /// Solves `Σ cⱼ·colⱼ = t` exactly.
    pub fn solve(&self, t: &[Laurent]) -> Solution {
        let k = self.cols.len();
        if !self.in_span(t) {
            return Solution::NotInSpan;
        }
        if k == 0 {
            return Solution::Laurent(Vec::new());
        }
        if t.iter().all(|x| x.is_zero()) {
            return Solution::Laurent(vec![Laurent::zero(); k]);
        }
        let ts: Vec<&Laurent> = self.srows.iter().map(|&r| &t[r]).collect();
        let mut vals: Vec<Vec<u64>> = vec![Vec::new(); k];
        let mut xs: Vec<u64> = Vec::new();
        let one = Laurent::one();
        let mut kk = K_START;
        while kk <= K_LAURENT {
            self.fill_values(&ts, kk, &mut xs, &mut vals);
            let half = (kk / 2) as i32;
            let c: Vec<Laurent> = (0..k).map(|j| interpolate_laurent(&xs[..kk], &vals[j][..kk], -half)).collect();
            if self.check(&c, &one, t) {
                return Solution::Laurent(c);
            }
            kk *= 2;
        }
        self.solve_cramer(t)
    }

    /// Values of the solution at the first `kk` cached points.
    fn fill_values(&self, ts: &[&Laurent], kk: usize, xs: &mut Vec<u64>, vals: &mut [Vec<u64>]) {
        self.ensure_points(kk);
        let pts = self.points.borrow();
        for p in pts[xs.len()..kk].iter() {
            let xi = modp::inv(p.x);
            let tv: Vec<u64> = ts.iter().map(|a| a.eval_mod(p.x, xi)).collect();
            for (j, row) in p.inv.iter().enumerate() {
                let mut s = 0u64;
                for (a, b) in row.iter().zip(&tv) {
                    s = modp::add(s, modp::mul(*a, *b));
                }
                vals[j].push(s);
            }
            xs.push(p.x);
        }
    }

    /// Cramer's rule with exact degree bounds: `cⱼ = Nⱼ/Δ` where `Δ` is the
    /// determinant on the selected rows.
    fn solve_cramer(&self, t: &[Laurent]) -> Solution {
        let k = self.cols.len();
        let span = |xs: &mut dyn Iterator<Item = &Laurent>| -> (i32, i32) {
            let mut lo = i32::MAX;
            let mut hi = i32::MIN;
            for x in xs {
                if let (Some(a), Some(b)) = (x.low_deg(), x.deg()) {
                    lo = lo.min(a);
                    hi = hi.max(b);
                }
            }
            if lo > hi {
                (0, 0)
            } else {
                (lo, hi)
            }
        };
        let col_spans: Vec<(i32, i32)> =
            self.cols.iter().map(|c| span(&mut self.srows.iter().map(|&r| &c[r]))).collect();
        let t_span = span(&mut self.srows.iter().map(|&r| &t[r]));
        let lo_d: i32 = col_spans.iter().map(|s| s.0).sum();
        let hi_d: i32 = col_spans.iter().map(|s| s.1).sum();
        let lo_n: i32 = (0..k).map(|j| lo_d - col_spans[j].0 + t_span.0).min().unwrap();
        let hi_n: i32 = (0..k).map(|j| hi_d - col_spans[j].1 + t_span.1).max().unwrap();
        let lo = lo_d.min(lo_n);
        let npts = (hi_d.max(hi_n) - lo + 1) as usize;
        let ts: Vec<&Laurent> = self.srows.iter().map(|&r| &t[r]).collect();
        let mut vals: Vec<Vec<u64>> = vec![Vec::new(); k];
        let mut xs = Vec::new();
        self.fill_values(&ts, npts, &mut xs, &mut vals);
        let pts = self.points.borrow();
        let dets: Vec<u64> = pts[..npts].iter().map(|p| p.det).collect();
        drop(pts);
        let den = interpolate_laurent(&xs, &dets, lo);
        let nums: Vec<Laurent> = (0..k)
            .map(|j| {
                let ys: Vec<u64> = vals[j].iter().zip(&dets).map(|(a, b)| modp::mul(*a, *b)).collect();
                interpolate_laurent(&xs, &ys, lo)
            })
            .collect();
        if !self.check(&nums, &den, t) {
            let sol = self.solve_rational(t);
            return match sol.iter().map(|x| x.as_laurent().cloned()).collect::<Option<Vec<_>>>() {
                Some(c) => Solution::Laurent(c),
                None => Solution::Rational(sol),
            };
        }
        let sol: Vec<RationalFn> = nums.into_iter().map(|n| RationalFn::new(n, den.clone())).collect();
        match sol.iter().map(|x| x.as_laurent().cloned()).collect::<Option<Vec<_>>>() {
            Some(c) => Solution::Laurent(c),
            None => Solution::Rational(sol),
        }
    }

    /// Exact solve over `ℚ(v)` by fraction Gaussian elimination on the
    /// selected rows; `t` must lie in the span.
    pub fn solve_rational(&self, t: &[Laurent]) -> Vec<RationalFn> {
        let a: Vec<Vec<RationalFn>> = self
            .srows
            .iter()
            .map(|&r| self.cols.iter().map(|c| RationalFn::from(c[r].clone())).collect())
            .collect();
        let b: Vec<RationalFn> = self.srows.iter().map(|&r| RationalFn::from(t[r].clone())).collect();
        gauss_rational(a, b).expect("selected rows are nonsingular")
    }
}

/// Solves a square system over `ℚ(v)`; `None` if singular.
pub fn gauss_rational(mut a: Vec<Vec<RationalFn>>, mut b: Vec<RationalFn>) -> Option<Vec<RationalFn>> {
    let n = a.len();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        b.swap(c, p);
        let piv = a[c][c].inv();
        for x in a[c].iter_mut() {
            *x = &*x * &piv;
        }
        b[c] = &b[c] * &piv;
        let prow = a[c].clone();
        let pb = b[c].clone();
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for (x, y) in a[r].iter_mut().zip(&prow) {
                    if !y.is_zero() {
                        *x = &*x - &(&f * y);
                    }
                }
                b[r] = &b[r] - &(&f * &pb);
            }
        }
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn l(s: &str) -> Laurent {
        s.parse().unwrap()
    }

    #[test]
    fn modular_arithmetic() {
        assert_eq!(modp::mul(modp::inv(12345), 12345), 1);
        assert_eq!(modp::to_i64(modp::from_i64(-17)), -17);
        assert_eq!(modp::from_i64(i64::MIN), modp::P - (i64::MIN.unsigned_abs() % modp::P));
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let xs: Vec<u64> = (2..7).collect();
        let f = |x: u64| modp::add(modp::mul(3, modp::mul(x, x)), modp::sub(7, x));
        let ys: Vec<u64> = xs.iter().map(|&x| f(x)).collect();
        let p = interpolate(&xs, &ys);
        assert_eq!(p[..3], [7, modp::P - 1, 3]);
        assert!(p[3..].iter().all(|&c| c == 0));
    }

    #[test]
    fn solves_laurent_system() {
        let cols = vec![vec![l("v"), l("1"), l("0")], vec![l("1"), l("v^-1 + v"), l("2")]];
        let s = Solver::new(cols);
        // t = (v^2+v^-3)·col0 + (1 - v^5)·col1
        let c0 = l("v^2 + v^-3");
        let c1 = l("1 - v^5");
        let t: Vec<Laurent> = (0..3).map(|r| &(&c0 * &s.columns()[0][r]) + &(&c1 * &s.columns()[1][r])).collect();
        assert_eq!(s.solve(&t), Solution::Laurent(vec![c0, c1]));
        assert_eq!(s.solve(&[l("0"), l("0"), l("1")]), Solution::NotInSpan);
    }

    #[test]
    fn rational_solution_detected() {
        let s = Solver::new(vec![vec![l("1 - v^-2")]]);
        match s.solve(&[l("1")]) {
            Solution::Rational(c) => assert_eq!(c[0], RationalFn::new(l("1"), l("1 - v^-2"))),
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn rank_of_dependent_family() {
        let a = vec![l("v"), l("1")];
        let b = vec![l("v^2"), l("v")];
        let c = vec![l("1"), l("1")];
        assert_eq!(rank(&[a.clone(), b.clone(), c.clone()]), 2);
        assert_eq!(independent_subset(&[a, b, c]), vec![0, 2]);
    }

    proptest! {
        #[test]
        fn solve_round_trip(
            m in proptest::collection::vec(proptest::collection::vec((-2i32..3, -3i64..4), 3), 3),
            c in proptest::collection::vec((-6i32..6, -9i64..10), 3),
        ) {
            let cols: Vec<Vec<Laurent>> = m.iter().map(|col| col.iter().map(|&(e, a)| Laurent::mono(a, e) + Laurent::mono(1, e + 1)).collect()).collect();
            prop_assume!(rank(&cols) == 3);
            let s = Solver::new(cols.clone());
            let cs: Vec<Laurent> = c.iter().map(|&(e, a)| Laurent::mono(a, e)).collect();
            let t: Vec<Laurent> = (0..3).map(|r| {
                let mut acc = Laurent::zero();
                for j in 0..3 { acc += &(&cs[j] * &cols[j][r]); }
                acc
            }).collect();
            prop_assert_eq!(s.solve(&t), Solution::Laurent(cs));
        }
    }
}
