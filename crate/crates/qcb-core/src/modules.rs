//! Weight modules: Verma modules `M_ζ`, simple modules `Λ_λ` and their
//! ω-twists `^ωΛ_λ`, Demazure modules, extreme vectors and module forms.
//!
//! A module is stored concretely on its canonical basis: weight spaces keyed
//! by the offset `δ ∈ ℤ[I]` from a reference weight, and Laurent matrices for
//! every `E_i`, `F_i` between adjacent spaces. Infinite modules are truncated
//! by depth; acting past the truncation is an error, never a silent zero.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

use crate::cbasis::{CanonicalBasis, CbError};
use crate::coeff::{quantum_factorial, Laurent, RationalFn};
use crate::datum::{Gen, Root, RootDatum, Weight, WeylWord};
use crate::falg::{trace, DivWord, Expansion};
use crate::linalg::{eval_vec, gauss_rational, independent_subset, modp, ModEchelon};

/// Matrix stored as `m[target][source]`.
pub type Mat = Vec<Vec<Laurent>>;

/// Canonical-basis label: one `(ν, index in B_ν)` per tensor factor.
pub type Label = Vec<(Root, usize)>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModError {
    #[error(transparent)]
    Cb(#[from] CbError),
    #[error("weight offset {0:?} lies beyond the computed depth")]
    Depth(Root),
    #[error("weight is not dominant")]
    NotDominant,
    #[error("word is not reduced at letter {0}")]
    NonReduced(usize),
    #[error("inexact division: {0}")]
    Inexact(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Which weight offsets a (possibly truncated) module covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extent {
    /// Every weight space is stored; missing ones are zero.
    Finite,
    /// Offsets `-ν` with `tr ν ≤ d` are stored.
    Below(usize),
    /// Offsets `ν` with `tr ν ≤ d` are stored.
    Above(usize),
}

impl Extent {
    pub fn covers(&self, delta: &[i64]) -> bool {
        match *self {
            Extent::Finite => true,
            Extent::Below(d) => !(delta.iter().all(|&a| a <= 0) && trace_abs(delta) > d),
            Extent::Above(d) => !(delta.iter().all(|&a| a >= 0) && trace_abs(delta) > d),
        }
    }

    fn flip(self) -> Extent {
        match self {
            Extent::Finite => Extent::Finite,
            Extent::Below(d) => Extent::Above(d),
            Extent::Above(d) => Extent::Below(d),
        }
    }
}

fn trace_abs(delta: &[i64]) -> usize {
    delta.iter().map(|a| a.unsigned_abs() as usize).sum()
}

/// What a module is, for reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModuleKind {
    Verma(Weight),
    SimpleHw(Weight),
    SimpleLw(Weight),
    Tensor(Vec<ModuleKind>),
}

/// Vector in one weight space, in canonical-basis coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MVec {
    pub delta: Root,
    pub c: Vec<Laurent>,
}

impl MVec {
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn scale(&self, a: &Laurent) -> MVec {
        MVec { delta: self.delta.clone(), c: self.c.iter().map(|x| x * a).collect() }
    }

    pub fn axpy(&mut self, a: &Laurent, o: &MVec) {
        debug_assert_eq!(self.delta, o.delta);
        for (x, y) in self.c.iter_mut().zip(&o.c) {
            if !y.is_zero() {
                *x += &(a * y);
            }
        }
    }

    pub fn add(&self, o: &MVec) -> MVec {
        let mut r = self.clone();
        r.axpy(&Laurent::one(), o);
        r
    }

    pub fn sub(&self, o: &MVec) -> MVec {
        let mut r = self.clone();
        r.axpy(&Laurent::int(-1), o);
        r
    }

    /// Coefficientwise bar: the bar involution of a based module.
    pub fn bar(&self) -> MVec {
        MVec { delta: self.delta.clone(), c: self.c.iter().map(|x| x.bar()).collect() }
    }

    /// Whether this is the basis vector `k`.
    pub fn unit_index(&self) -> Option<usize> {
        let mut hit = None;
        for (k, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            if !x.is_one() || hit.is_some() {
                return None;
            }
            hit = Some(k);
        }
        hit
    }
}

pub fn mat_vec(m: &Mat, x: &[Laurent]) -> Vec<Laurent> {
    m.iter()
        .map(|row| {
            let mut s = Laurent::zero();
            for (a, b) in row.iter().zip(x) {
                if !a.is_zero() && !b.is_zero() {
                    s += &(a * b);
                }
            }
            s
        })
        .collect()
}

pub fn root_add(a: &[i64], b: &[i64]) -> Root {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn root_sub(a: &[i64], b: &[i64]) -> Root {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn simple_root(n: usize, i: Gen) -> Root {
    let mut r = vec![0; n];
    r[i] = 1;
    r
}

fn neg(a: &[i64]) -> Root {
    a.iter().map(|x| -x).collect()
}

/// Based weight module with explicit `E_i`, `F_i` matrices.
#[derive(Debug, Clone)]
pub struct Module {
    pub kind: ModuleKind,
    pub datum: RootDatum,
    /// Weight of the offset `δ = 0`.
    pub reference: Weight,
    pub extent: Extent,
    /// Set on ω-twists of highest-weight modules.
    pub twisted: bool,
    pub(crate) spaces: BTreeMap<Root, Vec<Label>>,
    pub(crate) e: BTreeMap<(Root, Gen), Mat>,
    pub(crate) f: BTreeMap<(Root, Gen), Mat>,
    /// `_i r` on a Verma module (raises `δ`).
    pub(crate) ir: BTreeMap<(Root, Gen), Mat>,
    /// The form of `f` on a Verma module: `(numerators, denominator)`.
    pub(crate) gram: BTreeMap<Root, (Mat, Laurent)>,
    /// For tensor modules: each basis vector expanded over pure tensors of
    /// the innermost factors.
    pub expansion: Option<BTreeMap<Root, Vec<BTreeMap<Label, Laurent>>>>,
    forms: RefCell<BTreeMap<Root, Rc<Vec<Vec<RationalFn>>>>>,
    acts: RefCell<BTreeMap<(Root, bool, Root), Rc<Vec<Mat>>>>,
    index: BTreeMap<Label, (Root, usize)>,
}

impl Module {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble(
        kind: ModuleKind,
        datum: RootDatum,
        reference: Weight,
        extent: Extent,
        spaces: BTreeMap<Root, Vec<Label>>,
        e: BTreeMap<(Root, Gen), Mat>,
        f: BTreeMap<(Root, Gen), Mat>,
    ) -> Module {
        let mut index = BTreeMap::new();
        for (d, ls) in &spaces {
            for (k, l) in ls.iter().enumerate() {
                index.insert(l.clone(), (d.clone(), k));
            }
        }
        Module {
            kind,
            datum,
            reference,
            extent,
            twisted: false,
            spaces,
            e,
            f,
            ir: BTreeMap::new(),
            gram: BTreeMap::new(),
            expansion: None,
            forms: RefCell::new(BTreeMap::new()),
            acts: RefCell::new(BTreeMap::new()),
            index,
        }
    }

    pub fn rank(&self) -> usize {
        self.datum.rank()
    }

    pub fn weight(&self, delta: &[i64]) -> Weight {
        root_add(&self.reference, &self.datum.root_to_x(delta))
    }

    /// `⟨i, wt⟩` at offset `δ`.
    pub fn pairing(&self, i: Gen, delta: &[i64]) -> i64 {
        self.datum.pair(i, &self.weight(delta))
    }

    pub fn deltas(&self) -> impl Iterator<Item = &Root> {
        self.spaces.keys()
    }

    pub fn dim(&self, delta: &[i64]) -> usize {
        self.spaces.get(delta).map_or(0, |s| s.len())
    }

    pub fn total_dim(&self) -> usize {
        self.spaces.values().map(|s| s.len()).sum()
    }

    pub fn labels(&self, delta: &[i64]) -> &[Label] {
        self.spaces.get(delta).map_or(&[], |s| s.as_slice())
    }

    pub fn find(&self, label: &Label) -> Option<(Root, usize)> {
        self.index.get(label).cloned()
    }

    pub fn covers(&self, delta: &[i64]) -> bool {
        self.extent.covers(delta)
    }

    pub fn zero(&self, delta: &[i64]) -> MVec {
        MVec { delta: delta.to_vec(), c: vec![Laurent::zero(); self.dim(delta)] }
    }

    pub fn unit(&self, delta: &[i64], k: usize) -> MVec {
        let mut z = self.zero(delta);
        z.c[k] = Laurent::one();
        z
    }

    fn apply(&self, raise: bool, i: Gen, x: &MVec) -> Result<MVec, ModError> {
        let n = self.rank();
        let step = simple_root(n, i);
        let target = if raise { root_add(&x.delta, &step) } else { root_sub(&x.delta, &step) };
        if !self.covers(&target) {
            return Err(ModError::Depth(target));
        }
        let out = self.zero(&target);
        if out.c.is_empty() || x.c.is_empty() {
            return Ok(out);
        }
        let mats = if raise { &self.e } else { &self.f };
        match mats.get(&(x.delta.clone(), i)) {
            Some(m) => Ok(MVec { delta: target, c: mat_vec(m, &x.c) }),
            None => Err(ModError::Depth(target)),
        }
    }

    pub fn e(&self, i: Gen, x: &MVec) -> Result<MVec, ModError> {
        self.apply(true, i, x)
    }

    pub fn f(&self, i: Gen, x: &MVec) -> Result<MVec, ModError> {
        self.apply(false, i, x)
    }

    /// `E_i^{(a)}` or `F_i^{(a)}`, by exact division by `[a]!`.
    pub fn divided(&self, raise: bool, i: Gen, a: u32, x: &MVec) -> Result<MVec, ModError> {
        let mut y = x.clone();
        for _ in 0..a {
            y = self.apply(raise, i, &y)?;
        }
        if a > 1 {
            let d = quantum_factorial(a);
            for c in y.c.iter_mut() {
                *c = c.div_exact(&d).ok_or_else(|| ModError::Inexact(format!("divided power {} of generator {}", a, i)))?;
            }
        }
        Ok(y)
    }

    /// `K_μ`, `μ ∈ Y`.
    pub fn k(&self, mu: &[i64], x: &MVec) -> MVec {
        let p = self.datum.pair_y(mu, &self.weight(&x.delta));
        x.scale(&Laurent::v(p as i32))
    }

    /// `θ_t^±` for a divided word `t` (rightmost letter acts first).
    pub fn act_word(&self, t: &DivWord, raise: bool, x: &MVec) -> Result<MVec, ModError> {
        let mut y = x.clone();
        for &(i, a) in t.iter().rev() {
            y = self.divided(raise, i, a, &y)?;
            if y.c.is_empty() {
                break;
            }
        }
        Ok(y)
    }

    /// `x^±` for `x` given by a divided-word expansion of weight `ν`.
    pub fn act_expansion(&self, e: &Expansion, nu: &[i64], raise: bool, x: &MVec) -> Result<MVec, ModError> {
        let target = if raise { root_add(&x.delta, nu) } else { root_sub(&x.delta, nu) };
        if !self.covers(&target) {
            return Err(ModError::Depth(target));
        }
        let mut out = self.zero(&target);
        if out.c.is_empty() {
            return Ok(out);
        }
        for (t, c) in e {
            let y = self.act_word(t, raise, x)?;
            if !y.c.is_empty() {
                out.axpy(c, &y);
            }
        }
        Ok(out)
    }

    /// `b^±` for the canonical basis element `b = B_ν[k]`.
    pub fn act_cb(&self, cb: &CanonicalBasis, nu: &[i64], k: usize, raise: bool, x: &MVec) -> Result<MVec, ModError> {
        let b = cb.basis(nu)?;
        self.act_expansion(&b.elems[k].expansion, nu, raise, x)
    }

    /// Matrices of `b^±` for every `b ∈ B_ν`, acting from offset `δ`.
    pub fn cb_action(&self, cb: &CanonicalBasis, nu: &[i64], raise: bool, delta: &[i64]) -> Result<Rc<Vec<Mat>>, ModError> {
        let key = (nu.to_vec(), raise, delta.to_vec());
        if let Some(m) = self.acts.borrow().get(&key) {
            return Ok(m.clone());
        }
        let b = cb.basis(nu)?;
        let target = if raise { root_add(delta, nu) } else { root_sub(delta, nu) };
        let (d, dt) = (self.dim(delta), self.dim(&target));
        let mut out = Vec::with_capacity(b.len());
        for el in &b.elems {
            let mut m = vec![vec![Laurent::zero(); d]; dt];
            if dt > 0 {
                for s in 0..d {
                    let y = self.act_expansion(&el.expansion, nu, raise, &self.unit(delta, s))?;
                    for (t, c) in y.c.into_iter().enumerate() {
                        m[t][s] = c;
                    }
                }
            } else if !self.covers(&target) {
                return Err(ModError::Depth(target));
            }
            out.push(m);
        }
        let r = Rc::new(out);
        self.acts.borrow_mut().insert(key, r.clone());
        Ok(r)
    }

    /// `_i r` on a Verma module.
    pub fn ir(&self, i: Gen, x: &MVec) -> Result<MVec, ModError> {
        let target = root_add(&x.delta, &simple_root(self.rank(), i));
        let out = self.zero(&target);
        if out.c.is_empty() || x.c.is_empty() {
            return Ok(out);
        }
        match self.ir.get(&(x.delta.clone(), i)) {
            Some(m) => Ok(MVec { delta: target, c: mat_vec(m, &x.c) }),
            None => Err(ModError::Unsupported(String::from("_i r is only defined on Verma modules"))),
        }
    }

    /// The ω-twist: `E` and `F` exchange roles and weights change sign.
    pub fn omega(&self) -> Module {
        let flip_key = |m: &BTreeMap<(Root, Gen), Mat>| -> BTreeMap<(Root, Gen), Mat> {
            m.iter().map(|((d, i), v)| ((neg(d), *i), v.clone())).collect()
        };
        let spaces: BTreeMap<Root, Vec<Label>> = self.spaces.iter().map(|(d, l)| (neg(d), l.clone())).collect();
        let kind = match &self.kind {
            ModuleKind::SimpleHw(l) => ModuleKind::SimpleLw(l.clone()),
            ModuleKind::SimpleLw(l) => ModuleKind::SimpleHw(l.clone()),
            k => k.clone(),
        };
        let mut m = Module::assemble(
            kind,
            self.datum.clone(),
            neg(&self.reference),
            self.extent.flip(),
            spaces,
            flip_key(&self.f),
            flip_key(&self.e),
        );
        m.twisted = !self.twisted;
        m.gram = self.gram.iter().map(|(d, g)| (neg(d), g.clone())).collect();
        m
    }

    /// The module form on one weight space: the form of `f` for Verma
    /// modules; for (twisted) highest-weight modules the form with
    /// `(η,η) = 1` and `(F_i x, y) = v^{1-⟨i,wt E_i y⟩}(x, E_i y)`.
    pub fn form(&self, delta: &[i64]) -> Result<Rc<Vec<Vec<RationalFn>>>, ModError> {
        if let Some(g) = self.forms.borrow().get(delta) {
            return Ok(g.clone());
        }
        let g = Rc::new(self.compute_form(delta)?);
        self.forms.borrow_mut().insert(delta.to_vec(), g.clone());
        Ok(g)
    }

    fn compute_form(&self, delta: &[i64]) -> Result<Vec<Vec<RationalFn>>, ModError> {
        let d = self.dim(delta);
        if let Some((num, den)) = self.gram.get(delta) {
            return Ok(num.iter().map(|r| r.iter().map(|x| RationalFn::new(x.clone(), den.clone())).collect()).collect());
        }
        if !matches!(self.kind, ModuleKind::SimpleHw(_) | ModuleKind::SimpleLw(_)) {
            return Err(ModError::Unsupported(String::from("form of this module kind")));
        }
        if d == 0 {
            return Ok(Vec::new());
        }
        if delta.iter().all(|&a| a == 0) {
            return Ok(vec![vec![RationalFn::one()]]);
        }
        let n = self.rank();
        let s: i64 = if self.twisted { -1 } else { 1 };
        // rows: (down_i e_m, ·) for basis vectors e_m one step up
        let mut rows: Vec<Vec<Laurent>> = Vec::new();
        let mut vals: Vec<Vec<RationalFn>> = Vec::new();
        for i in 0..n {
            let up: Root = delta.iter().enumerate().map(|(j, &a)| if j == i { a + s } else { a }).collect();
            let du = self.dim(&up);
            if du == 0 {
                continue;
            }
            let gu = self.form(&up)?;
            // untwisted pairing ⟨i, wt(up_i y)⟩
            let p = s * self.pairing(i, &up);
            let factor = RationalFn::from(Laurent::v((1 - p) as i32));
            let ups: Vec<MVec> = (0..d)
                .map(|k| if self.twisted { self.f(i, &self.unit(delta, k)) } else { self.e(i, &self.unit(delta, k)) })
                .collect::<Result<_, _>>()?;
            for m in 0..du {
                let x = self.unit(&up, m);
                let down = if self.twisted { self.e(i, &x)? } else { self.f(i, &x)? };
                let row: Vec<RationalFn> = ups
                    .iter()
                    .map(|y| {
                        let mut acc = RationalFn::zero();
                        for (t, c) in y.c.iter().enumerate() {
                            if !c.is_zero() {
                                acc = &acc + &gu[m][t].mul_laurent(c);
                            }
                        }
                        &acc * &factor
                    })
                    .collect();
                rows.push(down.c);
                vals.push(row);
            }
        }
        let pick = independent_subset(&rows);
        if pick.len() != d {
            return Err(ModError::Verification(format!("weight {:?} not generated from above", delta)));
        }
        let a: Vec<Vec<RationalFn>> = pick.iter().map(|&r| rows[r].iter().cloned().map(RationalFn::from).collect()).collect();
        let mut g = vec![vec![RationalFn::zero(); d]; d];
        for k in 0..d {
            let b: Vec<RationalFn> = pick.iter().map(|&r| vals[r][k].clone()).collect();
            let col = gauss_rational(a.clone(), b).ok_or_else(|| ModError::Verification(String::from("singular form system")))?;
            for (m, c) in col.into_iter().enumerate() {
                g[m][k] = c;
            }
        }
        Ok(g)
    }

    /// `(x, y)` for vectors of the same weight (zero otherwise).
    pub fn inner(&self, x: &MVec, y: &MVec) -> Result<RationalFn, ModError> {
        if x.delta != y.delta {
            return Ok(RationalFn::zero());
        }
        let g = self.form(&x.delta)?;
        let mut acc = RationalFn::zero();
        for (a, xa) in x.c.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.c.iter().enumerate() {
                if !yb.is_zero() && !g[a][b].is_zero() {
                    acc = &acc + &g[a][b].mul_laurent(&(xa * yb));
                }
            }
        }
        Ok(acc)
    }
}

/// Builds modules over a fixed root datum and its canonical basis.
pub struct ModCtx {
    pub cb: Rc<CanonicalBasis>,
    pub datum: RootDatum,
    ders: RefCell<BTreeMap<(Root, Gen), Rc<(Mat, Mat)>>>,
}

impl ModCtx {
    pub fn new(datum: RootDatum) -> Self {
        let cb = Rc::new(CanonicalBasis::new(datum.cartan.clone()));
        Self::with_basis(datum, cb)
    }

    pub fn with_basis(datum: RootDatum, cb: Rc<CanonicalBasis>) -> Self {
        ModCtx { cb, datum, ders: RefCell::new(BTreeMap::new()) }
    }

    pub fn rank(&self) -> usize {
        self.datum.rank()
    }

    /// `(_i r, r_i)` from `B_ν` to `B_{ν-i}`, as `[target][source]` matrices.
    pub fn derivations(&self, nu: &[i64], i: Gen) -> Result<Rc<(Mat, Mat)>, ModError> {
        let key = (nu.to_vec(), i);
        if let Some(d) = self.ders.borrow().get(&key) {
            return Ok(d.clone());
        }
        let f = &self.cb.f;
        let b = self.cb.basis(nu)?;
        let lower = root_sub(nu, &simple_root(self.rank(), i));
        let bl = self.cb.basis(&lower)?;
        let mut ir = vec![vec![Laurent::zero(); b.len()]; bl.len()];
        let mut ri = ir.clone();
        for (k, el) in b.elems.iter().enumerate() {
            let a = bl.coords_laurent(&f.ir(i, &el.vector));
            let c = bl.coords_laurent(&f.ri(i, &el.vector));
            for t in 0..bl.len() {
                ir[t][k] = a[t].clone();
                ri[t][k] = c[t].clone();
            }
        }
        let d = Rc::new((ir, ri));
        self.ders.borrow_mut().insert(key, d.clone());
        Ok(d)
    }

    /// `E_i` on `M_ζ` from `B_ν` to `B_{ν-i}`:
    /// `E_i y = (v^{⟨i,ζ-|y|+i⟩} _i r(y) - v^{-⟨i,ζ⟩} r_i(y)) / (v - v⁻¹)`.
    pub fn verma_e(&self, zeta_i: i64, nu: &[i64], i: Gen) -> Result<Mat, ModError> {
        let d = self.derivations(nu, i)?;
        let p = zeta_i - self.cb.cartan().dot_root(i, nu) + 2;
        let a = Laurent::v(p as i32);
        let b = Laurent::v(-zeta_i as i32);
        let q = Laurent::from_terms([(1, 1), (-1, -1)]);
        d.0.iter()
            .zip(&d.1)
            .map(|(r1, r2)| {
                r1.iter()
                    .zip(r2)
                    .map(|(x, y)| {
                        let num = &(&a * x) - &(&b * y);
                        num.div_exact(&q).ok_or_else(|| ModError::Inexact(String::from("E_i on a Verma module")))
                    })
                    .collect()
            })
            .collect()
    }

    /// Quotient of `M_top` spanned by the selected canonical basis elements,
    /// explored level by level in `tr ν` up to `cap`.
    fn build<S>(&self, top: &[i64], cap: usize, select: S, kind: ModuleKind) -> Result<Module, ModError>
    where
        S: Fn(&[i64]) -> Result<Vec<usize>, ModError>,
    {
        let n = self.rank();
        let cb = &self.cb;
        let mut sel: BTreeMap<Root, Vec<usize>> = BTreeMap::new();
        let zero = vec![0i64; n];
        let s0 = select(&zero)?;
        let mut level: BTreeSet<Root> = BTreeSet::new();
        if !s0.is_empty() {
            sel.insert(zero.clone(), s0);
            level.insert(zero);
        }
        let mut finite = false;
        for t in 1..=cap + 1 {
            let mut next = BTreeSet::new();
            for nu in &level {
                for i in 0..n {
                    next.insert(root_add(nu, &simple_root(n, i)));
                }
            }
            let mut kept = BTreeSet::new();
            for nu in next {
                let s = select(&nu)?;
                if !s.is_empty() {
                    if t <= cap {
                        sel.insert(nu.clone(), s);
                    }
                    kept.insert(nu);
                }
            }
            if kept.is_empty() {
                finite = true;
                break;
            }
            level = kept;
        }
        let mut e = BTreeMap::new();
        let mut f = BTreeMap::new();
        let mut spaces = BTreeMap::new();
        for (nu, s) in &sel {
            spaces.insert(neg(nu), s.iter().map(|&k| vec![(nu.clone(), k)]).collect::<Vec<Label>>());
            for i in 0..n {
                let up = root_add(nu, &simple_root(n, i));
                if let Some(su) = sel.get(&up) {
                    let tl = cb.basis(&up)?;
                    let tl = tl.theta_left[i].as_ref().expect("θ_i-images at a weight with positive i-part");
                    let m: Mat = su.iter().map(|&t| s.iter().map(|&k| tl[k][t].clone()).collect()).collect();
                    f.insert((neg(nu), i), m);
                }
                if nu[i] > 0 {
                    let down = root_sub(nu, &simple_root(n, i));
                    if let Some(sd) = sel.get(&down) {
                        let full = self.verma_e(self.datum.pair(i, top), nu, i)?;
                        let m: Mat = sd.iter().map(|&t| s.iter().map(|&k| full[t][k].clone()).collect()).collect();
                        e.insert((neg(nu), i), m);
                    }
                }
            }
        }
        let extent = if finite { Extent::Finite } else { Extent::Below(cap) };
        Ok(Module::assemble(kind, self.datum.clone(), top.to_vec(), extent, spaces, e, f))
    }

    /// `M_ζ` truncated to `tr ν ≤ depth`, with `_i r` and the form of `f`.
    pub fn verma(&self, zeta: &[i64], depth: usize) -> Result<Module, ModError> {
        let cb = self.cb.clone();
        let mut m = self.build(zeta, depth, |nu| Ok((0..cb.basis(nu)?.len()).collect()), ModuleKind::Verma(zeta.to_vec()))?;
        m.extent = Extent::Below(depth);
        let n = self.rank();
        let nus: Vec<Root> = m.spaces.keys().map(|d| neg(d)).collect();
        for nu in &nus {
            let b = self.cb.basis(nu)?;
            m.gram.insert(neg(nu), (b.gram_num.clone(), b.den.clone()));
            for i in 0..n {
                if nu[i] > 0 {
                    let d = self.derivations(nu, i)?;
                    m.ir.insert((neg(nu), i), d.0.clone());
                }
            }
        }
        Ok(m)
    }

    /// `Λ_λ`, whose basis at `λ-ν` is `B(λ)_ν`; finite when the weight
    /// string closes before `cap`.
    pub fn simple_hw(&self, lambda: &[i64], cap: usize) -> Result<Module, ModError> {
        if !self.datum.is_dominant(lambda) {
            return Err(ModError::NotDominant);
        }
        let pairings: Vec<i64> = (0..self.rank()).map(|i| self.datum.pair(i, lambda)).collect();
        let cb = self.cb.clone();
        self.build(lambda, cap, |nu| Ok(cb.b_lambda(nu, &pairings)?), ModuleKind::SimpleHw(lambda.to_vec()))
    }

    /// `^ωΛ_λ`, with lowest weight vector `ξ_{-λ}`.
    pub fn simple_lw(&self, lambda: &[i64], cap: usize) -> Result<Module, ModError> {
        Ok(self.simple_hw(lambda, cap)?.omega())
    }

    /// The extreme vector `ξ_{-wλ}` of `^ωΛ_λ` (`lowest`) or `η_{wλ}` of `Λ_λ`,
    /// built letter by letter from the right with divided powers, and
    /// checked to be killed by `E_i` (resp. `F_i`) for every left descent.
    pub fn extreme_vector(&self, m: &Module, w: &[Gen], lowest: bool) -> Result<MVec, ModError> {
        if m.dim(&vec![0; self.rank()]) != 1 {
            return Err(ModError::Unsupported(String::from("module without an extreme vector at offset 0")));
        }
        let mut x = m.unit(&vec![0; self.rank()], 0);
        for (pos, &i) in w.iter().enumerate().rev() {
            let p = m.pairing(i, &x.delta);
            let a = if lowest { -p } else { p };
            if a < 0 {
                return Err(ModError::NonReduced(pos));
            }
            let y = m.divided(lowest, i, a as u32, &x)?;
            if m.divided(!lowest, i, a as u32, &y)? != x {
                return Err(ModError::Verification(format!("extreme vector step {} is not invertible", pos)));
            }
            x = y;
        }
        let cartan = &self.datum.cartan;
        for i in 0..self.rank() {
            if cartan.descent(i, w) {
                let z = if lowest { m.e(i, &x)? } else { m.f(i, &x)? };
                if !z.is_zero() {
                    return Err(ModError::Verification(format!("extreme vector not annihilated by generator {}", i)));
                }
            }
        }
        Ok(x)
    }

    /// The Demazure module generated by an extreme vector: `^ωV_w(λ)` inside
    /// `^ωΛ_λ` (`lowest`, generated by `f⁻`) or `V_w(λ)` inside `Λ_λ`.
    pub fn demazure(&self, m: Rc<Module>, w: &[Gen], lowest: bool) -> Result<Demazure, ModError> {
        let x = self.extreme_vector(&m, w, lowest)?;
        Ok(Demazure { ctx_rank: self.rank(), module: m, word: w.to_vec(), lowest, extreme: x, images: RefCell::new(BTreeMap::new()) })
    }
}

/// `^ωV_w(λ)` or `V_w(λ)` as a based submodule of the ambient simple module.
pub struct Demazure {
    ctx_rank: usize,
    pub module: Rc<Module>,
    pub word: WeylWord,
    pub lowest: bool,
    pub extreme: MVec,
    images: RefCell<BTreeMap<Root, Rc<Vec<Option<usize>>>>>,
}

impl Demazure {
    fn target(&self, nu: &[i64]) -> Root {
        if self.lowest {
            root_sub(&self.extreme.delta, nu)
        } else {
            root_add(&self.extreme.delta, nu)
        }
    }

    /// For each `b ∈ B_ν`, the basis index of `b^∓·(extreme vector)` or
    /// `None` when it vanishes; verified to be basis vectors.
    pub fn images(&self, cb: &CanonicalBasis, nu: &[i64]) -> Result<Rc<Vec<Option<usize>>>, ModError> {
        if let Some(r) = self.images.borrow().get(nu) {
            return Ok(r.clone());
        }
        let b = cb.basis(nu)?;
        let t = self.target(nu);
        let m = &self.module;
        let mut out = Vec::with_capacity(b.len());
        let mut seen = BTreeSet::new();
        for k in 0..b.len() {
            if m.dim(&t) == 0 && m.covers(&t) {
                out.push(None);
                continue;
            }
            let y = m.act_cb(cb, nu, k, !self.lowest, &self.extreme)?;
            if y.is_zero() {
                out.push(None);
                continue;
            }
            let u = y.unit_index().ok_or_else(|| {
                ModError::Verification(format!("image of canonical basis element {:?}#{} is not a basis vector", nu, k))
            })?;
            if !seen.insert(u) {
                return Err(ModError::Verification(format!("two canonical basis elements of {:?} share an image", nu)));
            }
            out.push(Some(u));
        }
        let r = Rc::new(out);
        self.images.borrow_mut().insert(nu.to_vec(), r.clone());
        Ok(r)
    }

    /// `{b ∈ B_ν : b^∓·(extreme vector) = 0}`.
    pub fn ann_basis(&self, cb: &CanonicalBasis, nu: &[i64]) -> Result<Vec<usize>, ModError> {
        Ok(self.images(cb, nu)?.iter().enumerate().filter(|(_, x)| x.is_none()).map(|(k, _)| k).collect())
    }

    /// Basis indices of the Demazure module at offset `δ` of the ambient
    /// module, as images of canonical basis elements.
    pub fn basis_at(&self, cb: &CanonicalBasis, delta: &[i64]) -> Result<Vec<usize>, ModError> {
        let nu = if self.lowest { root_sub(&self.extreme.delta, delta) } else { root_sub(delta, &self.extreme.delta) };
        if nu.iter().any(|&a| a < 0) {
            return Ok(Vec::new());
        }
        let mut v: Vec<usize> = self.images(cb, &nu)?.iter().flatten().copied().collect();
        v.sort_unstable();
        Ok(v)
    }

    /// Ambient basis vectors lying in the span of all `θ_w^∓·(extreme)` over
    /// exponent-one words `w`: the intersection description of the basis.
    pub fn basis_by_intersection(&self, cb: &CanonicalBasis, delta: &[i64]) -> Result<Vec<usize>, ModError> {
        let nu = if self.lowest { root_sub(&self.extreme.delta, delta) } else { root_sub(delta, &self.extreme.delta) };
        if nu.iter().any(|&a| a < 0) {
            return Ok(Vec::new());
        }
        let m = &self.module;
        let d = m.dim(delta);
        let mut ech = ModEchelon::new();
        for w in cb.f.space(&nu).words.iter() {
            let t: DivWord = w.iter().map(|&l| (l as usize, 1)).collect();
            let y = m.act_word(&t, !self.lowest, &self.extreme)?;
            if !y.c.is_empty() {
                ech.insert(eval_vec(&y.c, modp::V0));
            }
        }
        Ok((0..d).filter(|&k| ech.in_span(&eval_vec(&m.unit(delta, k).c, modp::V0))).collect())
    }

    /// Dimension check: the canonical basis elements outside `ann_ν` are as
    /// many as the rank of `f_ν` acting on the extreme vector, so `ann_ν`
    /// spans the annihilator.
    pub fn check_ann(&self, cb: &CanonicalBasis, nu: &[i64]) -> Result<bool, ModError> {
        let img = self.images(cb, nu)?;
        let nonzero = img.iter().filter(|x| x.is_some()).count();
        let m = &self.module;
        let mut ech = ModEchelon::new();
        for w in cb.f.space(nu).words.iter() {
            let t: DivWord = w.iter().map(|&l| (l as usize, 1)).collect();
            let y = m.act_word(&t, !self.lowest, &self.extreme)?;
            if !y.c.is_empty() {
                ech.insert(eval_vec(&y.c, modp::V0));
            }
        }
        Ok(ech.rank() == nonzero && nu.len() == self.ctx_rank)
    }

    pub fn total_weight_trace(&self) -> usize {
        trace(&self.extreme.delta.iter().map(|a| a.abs()).collect::<Vec<_>>())
    }
}
