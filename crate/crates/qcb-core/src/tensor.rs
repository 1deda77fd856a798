//! Tensor products of based modules: the quasi-R-matrix `Θ`, the involution
//! `Ψ`, the diamond basis, transition matrices, `ε_i` and the `χ` twist.
//!
//! A tensor product is itself stored as a [`Module`] on pure tensors of
//! factor basis vectors (labels concatenate), with `E_i`, `F_i` acting via
//! `Δ(E_i) = E_i⊗1 + K_i⊗E_i` and `Δ(F_i) = 1⊗F_i + F_i⊗K_{-i}`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

use crate::cbasis::CanonicalBasis;
use crate::coeff::{Laurent, RationalFn};
use crate::datum::{Gen, Root};
use crate::falg::{common_denominator, trace};
use crate::linalg::gauss_rational;
use crate::modules::{root_add, root_sub, simple_root, Extent, Label, MVec, Mat, ModError, Module, ModuleKind};

/// Which of the supported two-factor shapes a tensor product has.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// `^ωΛ_{λ₁} ⊗ Λ_{λ₂}`.
    LwHw,
    /// `Λ_{λ₁} ⊗ Λ_{λ₂}`.
    HwHw,
    /// `^ωΛ_{λ₁} ⊗ ^ωΛ_{λ₂}`.
    LwLw,
    /// `M_ζ ⊗ Λ_λ`.
    VermaHw,
    /// Factors that are themselves tensor products.
    Iterated,
}

/// Solved diamond basis of one weight component.
#[derive(Debug, Clone)]
pub struct Diamond {
    /// `rho[k][l]`: coefficient of `p_k` in `Ψ(p_l)`.
    pub rho: Mat,
    /// `pi[k][j]`: coefficient of `p_k` in the diamond element `j`.
    pub pi: Mat,
    /// Processing order: `l` before `k` whenever `rho[k][l] ≠ 0`.
    pub order: Vec<usize>,
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| {
                    let mut s = Laurent::zero();
                    for (k, x) in row.iter().enumerate() {
                        if !x.is_zero() && !b[k][j].is_zero() {
                            s += &(x * &b[k][j]);
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| if i == j { Laurent::one() } else { Laurent::zero() }).collect()).collect()
}

/// Inverse of a unitriangular (up to reordering) matrix via its nilpotent part.
pub fn unitriangular_inverse(t: &Mat) -> Mat {
    let n = t.len();
    let nil: Mat = (0..n)
        .map(|i| (0..n).map(|j| if i == j { &Laurent::one() - &t[i][j] } else { -&t[i][j] }).collect())
        .collect();
    let mut inv = identity(n);
    let mut p = identity(n);
    for _ in 0..n {
        p = mat_mul(&p, &nil);
        if p.iter().all(|r| r.iter().all(|x| x.is_zero())) {
            break;
        }
        for i in 0..n {
            for j in 0..n {
                inv[i][j] += &p[i][j];
            }
        }
    }
    inv
}

type Part = (Root, usize, Root, usize);

/// `M₁ ⊗ M₂` on pure tensors, with its diamond basis computed on demand.
pub struct Tensor {
    pub cb: Rc<CanonicalBasis>,
    pub left: Rc<Module>,
    pub right: Rc<Module>,
    pub pure: Module,
    pub variant: Variant,
    parts: BTreeMap<Root, Vec<Part>>,
    pindex: BTreeMap<Part, usize>,
    duals: RefCell<BTreeMap<Root, Rc<(Mat, Laurent)>>>,
    thetas: RefCell<BTreeMap<Root, Rc<Mat>>>,
    diamonds: RefCell<BTreeMap<Root, Rc<Diamond>>>,
}

fn factor_expansion(m: &Module, delta: &Root, k: usize) -> BTreeMap<Label, Laurent> {
    match &m.expansion {
        Some(e) => e[delta][k].clone(),
        None => [(m.labels(delta)[k].clone(), Laurent::one())].into_iter().collect(),
    }
}

impl Tensor {
    pub fn new(cb: Rc<CanonicalBasis>, left: Rc<Module>, right: Rc<Module>) -> Result<Tensor, ModError> {
        let d = left.datum.clone();
        let n = d.rank();
        let extent = match (left.extent, right.extent) {
            (Extent::Finite, Extent::Finite) => Extent::Finite,
            (Extent::Below(k), Extent::Finite) if right.deltas().all(|x| x.iter().all(|&a| a <= 0)) => Extent::Below(k),
            (Extent::Finite, Extent::Below(k)) if left.deltas().all(|x| x.iter().all(|&a| a <= 0)) => Extent::Below(k),
            (Extent::Above(k), Extent::Finite) if right.deltas().all(|x| x.iter().all(|&a| a >= 0)) => Extent::Above(k),
            (Extent::Finite, Extent::Above(k)) if left.deltas().all(|x| x.iter().all(|&a| a >= 0)) => Extent::Above(k),
            _ => return Err(ModError::Unsupported(String::from("tensor product of two truncated modules"))),
        };
        let mut parts: BTreeMap<Root, Vec<Part>> = BTreeMap::new();
        for d1 in left.deltas() {
            for d2 in right.deltas() {
                let tot = root_add(d1, d2);
                let complete = right.deltas().all(|e2| left.covers(&root_sub(&tot, e2)))
                    && left.deltas().all(|e1| right.covers(&root_sub(&tot, e1)));
                if !complete || !extent.covers(&tot) {
                    continue;
                }
                let p = parts.entry(tot).or_default();
                for k1 in 0..left.dim(d1) {
                    for k2 in 0..right.dim(d2) {
                        p.push((d1.clone(), k1, d2.clone(), k2));
                    }
                }
            }
        }
        let mut pindex = BTreeMap::new();
        let mut spaces = BTreeMap::new();
        let mut expansion = BTreeMap::new();
        for (tot, ps) in &parts {
            let mut labels = Vec::with_capacity(ps.len());
            let mut exps = Vec::with_capacity(ps.len());
            for (k, p) in ps.iter().enumerate() {
                pindex.insert(p.clone(), k);
                let mut l = left.labels(&p.0)[p.1].clone();
                l.extend(right.labels(&p.2)[p.3].iter().cloned());
                labels.push(l);
                let e1 = factor_expansion(&left, &p.0, p.1);
                let e2 = factor_expansion(&right, &p.2, p.3);
                let mut e = BTreeMap::new();
                for (a, x) in &e1 {
                    for (b, y) in &e2 {
                        let mut l = a.clone();
                        l.extend(b.iter().cloned());
                        e.insert(l, x * y);
                    }
                }
                exps.push(e);
            }
            spaces.insert(tot.clone(), labels);
            expansion.insert(tot.clone(), exps);
        }
        let mut emats = BTreeMap::new();
        let mut fmats = BTreeMap::new();
        for (tot, ps) in &parts {
            for i in 0..n {
                let step = simple_root(n, i);
                for (raise, target) in [(true, root_add(tot, &step)), (false, root_sub(tot, &step))] {
                    let Some(tps) = parts.get(&target) else { continue };
                    let mut m = vec![vec![Laurent::zero(); ps.len()]; tps.len()];
                    for (s, p) in ps.iter().enumerate() {
                        let x = left.unit(&p.0, p.1);
                        let y = right.unit(&p.2, p.3);
                        // E: Ex⊗y + v^{⟨i,wt x⟩} x⊗Ey;  F: x⊗Fy + v^{-⟨i,wt y⟩} Fx⊗y
                        let (c1, c2) = if raise {
                            (Laurent::one(), Laurent::v(left.pairing(i, &p.0) as i32))
                        } else {
                            (Laurent::v(-right.pairing(i, &p.2) as i32), Laurent::one())
                        };
                        let ax = if raise { left.e(i, &x)? } else { left.f(i, &x)? };
                        let by = if raise { right.e(i, &y)? } else { right.f(i, &y)? };
                        for (a, c) in ax.c.iter().enumerate() {
                            if !c.is_zero() {
                                let t = pindex[&(ax.delta.clone(), a, p.2.clone(), p.3)];
                                m[t][s] += &(c * &c1);
                            }
                        }
                        for (b, c) in by.c.iter().enumerate() {
                            if !c.is_zero() {
                                let t = pindex[&(p.0.clone(), p.1, by.delta.clone(), b)];
                                m[t][s] += &(c * &c2);
                            }
                        }
                    }
                    if raise {
                        emats.insert((tot.clone(), i), m);
                    } else {
                        fmats.insert((tot.clone(), i), m);
                    }
                }
            }
        }
        let variant = match (&left.kind, &right.kind) {
            (ModuleKind::SimpleLw(_), ModuleKind::SimpleHw(_)) => Variant::LwHw,
            (ModuleKind::SimpleHw(_), ModuleKind::SimpleHw(_)) => Variant::HwHw,
            (ModuleKind::SimpleLw(_), ModuleKind::SimpleLw(_)) => Variant::LwLw,
            (ModuleKind::Verma(_), ModuleKind::SimpleHw(_)) => Variant::VermaHw,
            _ => Variant::Iterated,
        };
        let mut pure = Module::assemble(
            ModuleKind::Tensor(vec![left.kind.clone(), right.kind.clone()]),
            d,
            root_add(&left.reference, &right.reference),
            extent,
            spaces,
            emats,
            fmats,
        );
        pure.expansion = Some(expansion);
        Ok(Tensor {
            cb,
            left,
            right,
            pure,
            variant,
            parts,
            pindex,
            duals: RefCell::new(BTreeMap::new()),
            thetas: RefCell::new(BTreeMap::new()),
            diamonds: RefCell::new(BTreeMap::new()),
        })
    }

    pub fn components(&self) -> impl Iterator<Item = &Root> {
        self.parts.keys()
    }

    /// `(δ₁, k₁, δ₂, k₂)` of the pure tensor `k` at total offset `δ`.
    pub fn part(&self, delta: &[i64], k: usize) -> &Part {
        &self.parts[delta][k]
    }

    /// `x ⊗ y` in pure-tensor coordinates.
    pub fn pure_tensor(&self, x: &MVec, y: &MVec) -> Result<MVec, ModError> {
        let tot = root_add(&x.delta, &y.delta);
        if !self.parts.contains_key(&tot) {
            if self.pure.covers(&tot) && (x.is_zero() || y.is_zero() || self.pure.dim(&tot) == 0) {
                return Ok(self.pure.zero(&tot));
            }
            return Err(ModError::Depth(tot));
        }
        let mut out = self.pure.zero(&tot);
        for (a, ca) in x.c.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in y.c.iter().enumerate() {
                if !cb.is_zero() {
                    let k = self.pindex[&(x.delta.clone(), a, y.delta.clone(), b)];
                    out.c[k] += &(ca * cb);
                }
            }
        }
        Ok(out)
    }

    /// `(A, D)` with `(b*)` over `B_ν` equal to `A/D`: the inverse Gram matrix.
    fn dual_coords(&self, nu: &[i64]) -> Result<Rc<(Mat, Laurent)>, ModError> {
        if let Some(d) = self.duals.borrow().get(nu) {
            return Ok(d.clone());
        }
        let b = self.cb.basis(nu)?;
        let n = b.len();
        let g: Vec<Vec<RationalFn>> = b.gram_num.iter().map(|r| r.iter().cloned().map(RationalFn::from).collect()).collect();
        let mut inv = vec![vec![RationalFn::zero(); n]; n];
        for j in 0..n {
            let e: Vec<RationalFn> = (0..n).map(|i| if i == j { RationalFn::from(b.den.clone()) } else { RationalFn::zero() }).collect();
            let col = gauss_rational(g.clone(), e).ok_or_else(|| ModError::Verification(format!("singular form at {:?}", nu)))?;
            for (i, c) in col.into_iter().enumerate() {
                inv[i][j] = c;
            }
        }
        let flat: Vec<RationalFn> = inv.iter().flatten().cloned().collect();
        let (nums, den) = common_denominator(&flat);
        let a: Mat = nums.chunks(n.max(1)).map(|r| r.to_vec()).collect();
        let r = Rc::new((if n == 0 { Vec::new() } else { a }, den));
        self.duals.borrow_mut().insert(nu.to_vec(), r.clone());
        Ok(r)
    }

    /// `Θ` on the component at total offset `δ`, as `[target][source]`.
    pub fn theta_matrix(&self, delta: &[i64]) -> Result<Rc<Mat>, ModError> {
        if let Some(m) = self.thetas.borrow().get(delta) {
            return Ok(m.clone());
        }
        let ps = self.parts.get(delta).ok_or_else(|| ModError::Depth(delta.to_vec()))?;
        let dim = ps.len();
        let mut out = vec![vec![Laurent::zero(); dim]; dim];
        for (s, p) in ps.iter().enumerate() {
            let col = self.theta_pure(p)?;
            for (t, c) in col.into_iter().enumerate() {
                out[t][s] = c;
            }
        }
        let r = Rc::new(out);
        self.thetas.borrow_mut().insert(delta.to_vec(), r.clone());
        Ok(r)
    }

    /// `Θ(p) = Σ_ν (-v)^{tr ν} Σ_b b⁻m₁ ⊗ b*⁺m₂` for a pure tensor `p`; the
    /// `ν`-sum runs over exactly those `ν` where `m₂`'s module is nonzero.
    fn theta_pure(&self, p: &Part) -> Result<Vec<Laurent>, ModError> {
        let (d1, k1, d2, k2) = p;
        let tot = root_add(d1, d2);
        let dim = self.parts[&tot].len();
        let mut out = vec![Laurent::zero(); dim];
        let nus: Vec<Root> = self
            .right
            .deltas()
            .map(|e2| root_sub(e2, d2))
            .filter(|nu| nu.iter().all(|&a| a >= 0))
            .collect();
        for nu in nus {
            let t1 = root_sub(d1, &nu);
            let t2 = root_add(d2, &nu);
            if self.left.dim(&t1) == 0 || self.right.dim(&t2) == 0 {
                continue;
            }
            if nu.iter().all(|&a| a == 0) {
                out[self.pindex[p]] += &Laurent::one();
                continue;
            }
            let (a, den) = &*self.dual_coords(&nu)?;
            let lo = self.left.cb_action(&self.cb, &nu, false, d1)?;
            let hi = self.right.cb_action(&self.cb, &nu, true, d2)?;
            let nb = a.len();
            let mut acc = vec![Laurent::zero(); dim];
            for bp in 0..nb {
                let y: Vec<&Laurent> = hi[bp].iter().map(|r| &r[*k2]).collect();
                if y.iter().all(|c| c.is_zero()) {
                    continue;
                }
                let mut z = vec![Laurent::zero(); self.left.dim(&t1)];
                for b in 0..nb {
                    if a[b][bp].is_zero() {
                        continue;
                    }
                    for (t, row) in lo[b].iter().enumerate() {
                        if !row[*k1].is_zero() {
                            z[t] += &(&a[b][bp] * &row[*k1]);
                        }
                    }
                }
                for (s, zs) in z.iter().enumerate() {
                    if zs.is_zero() {
                        continue;
                    }
                    for (t, yt) in y.iter().enumerate() {
                        if !yt.is_zero() {
                            let k = self.pindex[&(t1.clone(), s, t2.clone(), t)];
                            acc[k] += &(zs * *yt);
                        }
                    }
                }
            }
            let sign = if trace(&nu).is_multiple_of(2) { 1 } else { -1 };
            let f = Laurent::mono(sign, trace(&nu) as i32);
            for (o, x) in out.iter_mut().zip(acc) {
                if !x.is_zero() {
                    let q = x.div_exact(den).ok_or_else(|| ModError::Inexact(format!("Θ at ν={:?}", nu)))?;
                    *o += &(&q * &f);
                }
            }
        }
        Ok(out)
    }

    pub fn theta(&self, x: &MVec) -> Result<MVec, ModError> {
        let m = self.theta_matrix(&x.delta)?;
        Ok(MVec { delta: x.delta.clone(), c: crate::modules::mat_vec(&m, &x.c) })
    }

    /// `Ψ = Θ ∘ (bar ⊗ bar)`, the factor bars fixing factor basis vectors.
    pub fn psi(&self, x: &MVec) -> Result<MVec, ModError> {
        self.theta(&x.bar())
    }

    /// The diamond basis of the component at total offset `δ`.
    pub fn diamond(&self, delta: &[i64]) -> Result<Rc<Diamond>, ModError> {
        if let Some(d) = self.diamonds.borrow().get(delta) {
            return Ok(d.clone());
        }
        let rho = (*self.theta_matrix(delta)?).clone();
        let n = rho.len();
        for (k, row) in rho.iter().enumerate() {
            if !row[k].is_one() {
                return Err(ModError::Verification(format!("Ψ-matrix diagonal at {:?}#{} is {}", delta, k, row[k])));
            }
        }
        // topological order: l before k whenever rho[k][l] ≠ 0
        let mut indeg = vec![0usize; n];
        for k in 0..n {
            for l in 0..n {
                if k != l && !rho[k][l].is_zero() {
                    indeg[k] += 1;
                }
            }
        }
        let mut order = Vec::with_capacity(n);
        let mut ready: Vec<usize> = (0..n).filter(|&k| indeg[k] == 0).collect();
        while let Some(l) = ready.pop() {
            order.push(l);
            for k in 0..n {
                if k != l && !rho[k][l].is_zero() {
                    indeg[k] -= 1;
                    if indeg[k] == 0 {
                        ready.push(k);
                    }
                }
            }
        }
        if order.len() != n {
            return Err(ModError::Verification(format!("Ψ-matrix at {:?} is not triangular", delta)));
        }
        let rank: Vec<usize> = {
            let mut r = vec![0; n];
            for (p, &k) in order.iter().enumerate() {
                r[k] = p;
            }
            r
        };
        let mut pi = vec![vec![Laurent::zero(); n]; n];
        for j in 0..n {
            pi[j][j] = Laurent::one();
            for &k in order.iter().filter(|&&k| rank[k] > rank[j]) {
                let mut g = Laurent::zero();
                for l in 0..n {
                    if l != k && !rho[k][l].is_zero() && !pi[l][j].is_zero() {
                        g += &(&pi[l][j].bar() * &rho[k][l]);
                    }
                }
                if g.bar() != -&g {
                    return Err(ModError::Verification(format!("no Ψ-fixed solution at {:?}: {}", delta, g)));
                }
                pi[k][j] = g.neg_part();
            }
        }
        // re-verify: Ψ-invariance and lattice condition
        for j in 0..n {
            let col: Vec<Laurent> = (0..n).map(|k| pi[k][j].clone()).collect();
            let bar: Vec<Laurent> = col.iter().map(|x| x.bar()).collect();
            let img = crate::modules::mat_vec(&rho, &bar);
            if img != col {
                return Err(ModError::Verification(format!("diamond element {:?}#{} is not Ψ-fixed", delta, j)));
            }
            for (k, x) in col.iter().enumerate() {
                if k != j && x.deg().is_some_and(|d| d >= 0) {
                    return Err(ModError::Verification(format!("diamond element {:?}#{} leaves the lattice", delta, j)));
                }
            }
        }
        let d = Rc::new(Diamond { rho, pi, order });
        self.diamonds.borrow_mut().insert(delta.to_vec(), d.clone());
        Ok(d)
    }

    /// The diamond element whose leading pure tensor is `k`.
    pub fn diamond_vec(&self, delta: &[i64], k: usize) -> Result<MVec, ModError> {
        let d = self.diamond(delta)?;
        Ok(MVec { delta: delta.to_vec(), c: d.pi.iter().map(|r| r[k].clone()).collect() })
    }

    /// The diamond element labelled by the pure tensor `label`.
    pub fn diamond_of(&self, label: &Label) -> Result<MVec, ModError> {
        let (d, k) = self.pure.find(label).ok_or_else(|| ModError::Verification(format!("unknown label {:?}", label)))?;
        self.diamond_vec(&d, k)
    }

    /// Pure-tensor to diamond change of basis: column `j` expresses diamond
    /// element `j` over pure tensors.
    pub fn transition(&self, delta: &[i64]) -> Result<Mat, ModError> {
        Ok(self.diamond(delta)?.pi.clone())
    }

    /// The tensor product as a based module on its diamond basis, with
    /// expansions over pure tensors of the innermost factors.
    pub fn based(&self) -> Result<Module, ModError> {
        let n = self.pure.rank();
        let mut t = BTreeMap::new();
        let mut tinv = BTreeMap::new();
        for d in self.parts.keys() {
            let pi = self.transition(d)?;
            tinv.insert(d.clone(), unitriangular_inverse(&pi));
            t.insert(d.clone(), pi);
        }
        let conj = |mats: &BTreeMap<(Root, Gen), Mat>, raise: bool| -> BTreeMap<(Root, Gen), Mat> {
            let mut out = BTreeMap::new();
            for ((d, i), m) in mats {
                let step = simple_root(n, *i);
                let target = if raise { root_add(d, &step) } else { root_sub(d, &step) };
                out.insert((d.clone(), *i), mat_mul(&mat_mul(&tinv[&target], m), &t[d]));
            }
            out
        };
        let e = conj(&self.pure.e, true);
        let f = conj(&self.pure.f, false);
        let spaces = self.parts.keys().map(|d| (d.clone(), self.pure.labels(d).to_vec())).collect();
        let mut m = Module::assemble(self.pure.kind.clone(), self.pure.datum.clone(), self.pure.reference.clone(), self.pure.extent, spaces, e, f);
        let pexp = self.pure.expansion.as_ref().expect("pure expansion");
        let mut exps = BTreeMap::new();
        for (d, pi) in &t {
            let cols: Vec<BTreeMap<Label, Laurent>> = (0..pi.len())
                .map(|j| {
                    let mut acc: BTreeMap<Label, Laurent> = BTreeMap::new();
                    for (k, row) in pi.iter().enumerate() {
                        if row[j].is_zero() {
                            continue;
                        }
                        for (l, c) in &pexp[d][k] {
                            *acc.entry(l.clone()).or_insert_with(Laurent::zero) += &(c * &row[j]);
                        }
                    }
                    acc.retain(|_, c| !c.is_zero());
                    acc
                })
                .collect();
            exps.insert(d.clone(), cols);
        }
        m.expansion = Some(exps);
        Ok(m)
    }

    /// The product form `(a⊗b, a'⊗b') = (a,a')(b,b')`.
    pub fn inner(&self, x: &MVec, y: &MVec) -> Result<RationalFn, ModError> {
        if x.delta != y.delta {
            return Ok(RationalFn::zero());
        }
        let ps = &self.parts[&x.delta];
        let mut acc = RationalFn::zero();
        for (a, xa) in x.c.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            let pa = &ps[a];
            for (b, yb) in y.c.iter().enumerate() {
                let pb = &ps[b];
                if yb.is_zero() || pa.0 != pb.0 {
                    continue;
                }
                let g1 = self.left.form(&pa.0)?;
                let g2 = self.right.form(&pa.2)?;
                let g = &g1[pa.1][pb.1] * &g2[pa.3][pb.3];
                if !g.is_zero() {
                    acc = &acc + &g.mul_laurent(&(xa * yb));
                }
            }
        }
        Ok(acc)
    }

    /// `ε_i(a⊗b) = _i r(a)⊗v^{-⟨i,wt b⟩}b + (v-v⁻¹)·a⊗v^{-⟨i,wt b+α_i⟩}E_i b`
    /// on `M_ζ ⊗ M`.
    pub fn epsilon(&self, i: Gen, x: &MVec) -> Result<MVec, ModError> {
        let n = self.pure.rank();
        let target = root_add(&x.delta, &simple_root(n, i));
        let mut out = self.pure.zero(&target);
        let vm = Laurent::from_terms([(1, 1), (-1, -1)]);
        for (s, c) in x.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (d1, k1, d2, k2) = self.parts[&x.delta][s].clone();
            let a = self.left.unit(&d1, k1);
            let b = self.right.unit(&d2, k2);
            let p = self.right.pairing(i, &d2);
            let t1 = self.pure_tensor(&self.left.ir(i, &a)?, &b)?;
            out.axpy(&(c * &Laurent::v(-p as i32)), &t1);
            let eb = self.right.e(i, &b)?;
            let t2 = self.pure_tensor(&a, &eb)?;
            let q = self.right.pairing(i, &eb.delta);
            out.axpy(&(&(c * &vm) * &Laurent::v(-q as i32)), &t2);
        }
        Ok(out)
    }
}

/// Fold `M₁ ⊗ … ⊗ M_k` left to right, each step a based module on its
/// diamond basis.
pub fn nfold(cb: Rc<CanonicalBasis>, factors: &[Rc<Module>]) -> Result<Module, ModError> {
    let mut acc = factors.first().ok_or_else(|| ModError::Unsupported(String::from("empty tensor product")))?.clone();
    for f in &factors[1..] {
        acc = Rc::new(Tensor::new(cb.clone(), acc, f.clone())?.based()?);
    }
    Ok(Rc::try_unwrap(acc).unwrap_or_else(|rc| (*rc).clone()))
}

/// The `χ` twist `^ωΛ_{λ₁}⊗Λ_{λ₂} → ^ωΛ_{λ₂}⊗Λ_{λ₁}`: pure tensors swap
/// labels, `b₁⁺ξ⊗b₂⁻η ↦ b₂⁺ξ'⊗b₁⁻η'`.
pub fn chi(src: &Tensor, dst: &Tensor, x: &MVec) -> Result<MVec, ModError> {
    let mut out: Option<MVec> = None;
    for (k, c) in x.c.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let (d1, k1, d2, k2) = src.part(&x.delta, k);
        let mut l = src.right.labels(d2)[*k2].clone();
        l.extend(src.left.labels(d1)[*k1].iter().cloned());
        let (d, t) = dst.pure.find(&l).ok_or_else(|| ModError::Depth(x.delta.clone()))?;
        let o = out.get_or_insert_with(|| dst.pure.zero(&d));
        if o.delta != d {
            return Err(ModError::Verification(String::from("χ does not preserve weight components")));
        }
        o.c[t] += c;
    }
    out.ok_or_else(|| ModError::Unsupported(String::from("χ of the zero vector")))
}
