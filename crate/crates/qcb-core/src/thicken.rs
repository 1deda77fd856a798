//! The thickening realization: the subspace `(fθ_λf)` of `f̃`, the maps
//! `φ: (fθ_λf) ⇄ M_ζ⊗Λ_λ :ψ`, the quotients by `f̃·Ann_f(ξ_{-wλ₁})` (or by
//! `Σ f̃θ_i^{⟨i,λ₁⟩+1}`) and the induced maps `φ̄`, `ψ̄` onto
//! `^ωV_w(λ₁)⊗Λ_λ` (or `Λ_{λ₁}⊗Λ_λ`).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

use crate::cbasis::CanonicalBasis;
use crate::coeff::{Laurent, RationalFn};
use crate::datum::{Gen, Root, Thickening, Tower, Weight, WeylWord};
use crate::falg::{trace, FVector};
use crate::linalg::{ModEchelon, Solution, Solver};
use crate::modules::{mat_vec, root_add, root_sub, simple_root, Demazure, MVec, Mat, ModCtx, ModError, Module};
use crate::tensor::Tensor;

fn neg(a: &[i64]) -> Root {
    a.iter().map(|x| -x).collect()
}

/// All `μ ∈ ℕ[I]` with `μ ≤ ν` componentwise.
pub fn sub_roots(nu: &[i64]) -> Vec<Root> {
    let mut out = vec![Vec::new()];
    for &a in nu {
        let mut next = Vec::new();
        for p in &out {
            for b in 0..=a.max(0) {
                let mut q: Root = p.clone();
                q.push(b);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

fn solve_laurent(s: &Solver, t: &[Laurent], what: &str) -> Result<Vec<Laurent>, ModError> {
    match s.solve(t) {
        Solution::Laurent(c) => Ok(c),
        Solution::Rational(_) => Err(ModError::Inexact(format!("{}: non-integral coordinates", what))),
        Solution::NotInSpan => Err(ModError::Verification(format!("{}: vector outside the span", what))),
    }
}

fn checked_solver(cols: Vec<Vec<Laurent>>, what: &str) -> Result<Solver, ModError> {
    let mut e = ModEchelon::new();
    for c in &cols {
        if !e.insert(crate::linalg::eval_vec(c, crate::linalg::modp::V0)) {
            return Err(ModError::Verification(format!("{}: dependent columns", what)));
        }
    }
    Ok(Solver::new(cols))
}

fn fail(msg: String) -> ModError {
    ModError::Verification(msg)
}

/// `φ_λ⁻¹` data at `ν_a`: the kept rows of `B̃(0⊙λ)` and a solver on the
/// columns `π(bθ_λ)`, `b ∈ B(λ)_{ν_a}`.
struct PhiLambda {
    kept: Vec<usize>,
    solver: Option<Solver>,
}

/// `(fθ_λf)` at base weight `ν`, with `φ` and `ψ` on its canonical basis.
#[derive(Debug)]
pub struct SubSpace {
    pub nu: Root,
    /// Weight `ν + |θ_λ|` in `ℤ[Ĩ]`.
    pub weight: Root,
    /// Indices into `B̃` at `weight`: the canonical basis `B((fθ_λf))`.
    pub members: Vec<usize>,
    /// `phi[p][m]`: pure-tensor coordinate `p` of `φ(b_m)`.
    pub phi: Mat,
    /// `psi[m][p]`: inverse of `phi`.
    pub psi: Mat,
}

/// Data of one thickening realization `(fθ_λf)_{ζ⊙λ} ≅ M_ζ⊗Λ_λ`.
pub struct ThickenCtx {
    pub th: Thickening,
    pub base: Rc<ModCtx>,
    pub cbt: Rc<CanonicalBasis>,
    pub zeta: Weight,
    pub lambda: Weight,
    /// `θ_λ = Π θ_{i′}^{(⟨i,λ⟩)}`.
    pub theta: FVector,
    pub theta_root: Root,
    /// `M_ζ ⊗ Λ_λ`.
    pub tensor: Tensor,
    pub depth: usize,
    thick_pairs: Vec<i64>,
    embeds: RefCell<BTreeMap<Root, Rc<Vec<FVector>>>>,
    base_of: RefCell<BTreeMap<Root, Rc<Vec<usize>>>>,
    philam: RefCell<BTreeMap<Root, Rc<PhiLambda>>>,
    subs: RefCell<BTreeMap<Root, Rc<SubSpace>>>,
}

impl ThickenCtx {
    /// Realization of `M_ζ ⊗ Λ_λ` on weights `ζ+λ-ν`, `tr ν ≤ depth`.
    pub fn new(base: Rc<ModCtx>, cbt: Rc<CanonicalBasis>, zeta: &[i64], lambda: &[i64], depth: usize) -> Result<Self, ModError> {
        let th = base.datum.thicken().map_err(|e| ModError::Unsupported(format!("{}", e)))?;
        if !base.datum.is_dominant(lambda) {
            return Err(ModError::NotDominant);
        }
        let n = th.n();
        let f = &cbt.f;
        let mut theta = f.one();
        for i in 0..n {
            let c = base.datum.pair(i, lambda);
            theta = f.multiply(&theta, &f.theta(th.prime(i), c as u32));
        }
        let theta_root = th.theta_weight(lambda);
        let top = th.odot(&th.base.zero_weight(), lambda).map_err(|e| ModError::Unsupported(format!("{}", e)))?;
        let thick_pairs = (0..2 * n).map(|j| th.thick.pair(j, &top)).collect();
        let verma = Rc::new(base.verma(zeta, depth)?);
        let hw = Rc::new(base.simple_hw(lambda, depth.max(1) * 4 + 8)?);
        let tensor = Tensor::new(base.cb.clone(), verma, hw)?;
        Ok(ThickenCtx {
            th,
            base,
            cbt,
            zeta: zeta.to_vec(),
            lambda: lambda.to_vec(),
            theta,
            theta_root,
            tensor,
            depth,
            thick_pairs,
            embeds: RefCell::new(BTreeMap::new()),
            base_of: RefCell::new(BTreeMap::new()),
            philam: RefCell::new(BTreeMap::new()),
            subs: RefCell::new(BTreeMap::new()),
        })
    }

    pub fn n(&self) -> usize {
        self.th.n()
    }

    fn lift_root(&self, nu: &[i64]) -> Root {
        self.th.embed_root(nu)
    }

    /// Thickened weight `ν + |θ_λ|`.
    pub fn weight_of(&self, nu: &[i64]) -> Root {
        root_add(&self.lift_root(nu), &self.theta_root)
    }

    /// The canonical basis `B_ν` of `f` as elements of `f̃`.
    pub fn embedded(&self, nu: &[i64]) -> Result<Rc<Vec<FVector>>, ModError> {
        if let Some(e) = self.embeds.borrow().get(nu) {
            return Ok(e.clone());
        }
        let b = self.base.cb.basis(nu)?;
        let tw = self.lift_root(nu);
        let v: Vec<FVector> = b.elems.iter().map(|el| self.cbt.f.from_expansion(&tw, &el.expansion)).collect();
        let r = Rc::new(v);
        self.embeds.borrow_mut().insert(nu.to_vec(), r.clone());
        Ok(r)
    }

    /// For `B̃` at `ν ∈ ℕ[I]`: the index in `B_ν` of each element.
    fn base_index(&self, nu: &[i64]) -> Result<Rc<Vec<usize>>, ModError> {
        if let Some(e) = self.base_of.borrow().get(nu) {
            return Ok(e.clone());
        }
        let bt = self.cbt.basis(&self.lift_root(nu))?;
        let emb = self.embedded(nu)?;
        let mut map = vec![usize::MAX; bt.len()];
        for (k, x) in emb.iter().enumerate() {
            let t = bt.index_of(x).ok_or_else(|| fail(format!("base canonical basis element {:?}#{} not in the thickened basis", nu, k)))?;
            map[t] = k;
        }
        if map.contains(&usize::MAX) {
            return Err(fail(format!("thickened basis at {:?} larger than the base one", nu)));
        }
        let r = Rc::new(map);
        self.base_of.borrow_mut().insert(nu.to_vec(), r.clone());
        Ok(r)
    }

    fn phi_lambda(&self, nua: &[i64]) -> Result<Rc<PhiLambda>, ModError> {
        if let Some(p) = self.philam.borrow().get(nua) {
            return Ok(p.clone());
        }
        let mu1 = self.weight_of(nua);
        let bt = self.cbt.basis(&mu1)?;
        let kept = self.cbt.b_lambda(&mu1, &self.thick_pairs)?;
        let hw = &self.tensor.right;
        let dim = hw.dim(&neg(nua));
        let solver = if dim == 0 {
            None
        } else {
            let emb = self.embedded(nua)?;
            let cols: Vec<Vec<Laurent>> = hw
                .labels(&neg(nua))
                .iter()
                .map(|l| {
                    let prod = self.cbt.f.multiply(&emb[l[0].1], &self.theta);
                    let c = bt.coords_laurent(&prod);
                    kept.iter().map(|&k| c[k].clone()).collect()
                })
                .collect();
            Some(checked_solver(cols, "φ_λ")?)
        };
        let r = Rc::new(PhiLambda { kept, solver });
        self.philam.borrow_mut().insert(nua.to_vec(), r.clone());
        Ok(r)
    }

    /// `φ(z)` by the composite: comultiply in `f̃`, keep first legs of weight
    /// `ν_a + |θ_λ|`, swap, project the first leg to `Λ_{0⊙λ}` and pull back
    /// along `φ_λ`.
    pub fn phi_raw(&self, nu: &[i64], z: &FVector) -> Result<MVec, ModError> {
        let t = &self.tensor;
        let delta = neg(nu);
        if !t.pure.covers(&delta) || t.pure.dim(&delta) == 0 && trace(nu) > self.depth {
            return Err(ModError::Depth(delta));
        }
        let mut out = t.pure.zero(&delta);
        let f = &self.cbt.f;
        for nua in sub_roots(nu) {
            let nub = root_sub(nu, &nua);
            let pl = self.phi_lambda(&nua)?;
            let Some(solver) = &pl.solver else { continue };
            let mu1 = self.weight_of(&nua);
            let b1 = self.cbt.basis(&mu1)?;
            let b2 = self.cbt.basis(&self.lift_root(&nub))?;
            let bidx = self.base_index(&nub)?;
            let c = f.comultiply_in(z, b1.solver(), b2.solver(), &mu1);
            let labels_a = t.right.labels(&neg(&nua)).to_vec();
            for l in 0..b2.len() {
                let u: Vec<Laurent> = pl
                    .kept
                    .iter()
                    .map(|&k| match &c[k][l] {
                        Solution::Laurent(x) => Ok(x[0].clone()),
                        _ => Err(ModError::Inexact(String::from("coproduct coordinates"))),
                    })
                    .collect::<Result<_, _>>()?;
                if u.iter().all(|x| x.is_zero()) {
                    continue;
                }
                let w = solve_laurent(solver, &u, "φ_λ⁻¹")?;
                for (q, wq) in w.iter().enumerate() {
                    if wq.is_zero() {
                        continue;
                    }
                    let label = vec![(nub.clone(), bidx[l]), labels_a[q][0].clone()];
                    let (d, k) = t.pure.find(&label).ok_or_else(|| ModError::Depth(delta.clone()))?;
                    debug_assert_eq!(d, delta);
                    out.c[k] += wq;
                }
            }
        }
        Ok(out)
    }

    /// `(fθ_λf)` at `ν`: its canonical basis as the union of supports of
    /// `b₁θ_λb₂`, cross-checked against the rank of those products and the
    /// dimension of `M_ζ⊗Λ_λ`, with `φ` and `ψ`.
    pub fn sub(&self, nu: &[i64]) -> Result<Rc<SubSpace>, ModError> {
        if let Some(s) = self.subs.borrow().get(nu) {
            return Ok(s.clone());
        }
        if trace(nu) > self.depth {
            return Err(ModError::Depth(neg(nu)));
        }
        let f = &self.cbt.f;
        let tw = self.weight_of(nu);
        let bt = self.cbt.basis(&tw)?;
        let mut support = BTreeSet::new();
        let mut ech = ModEchelon::new();
        for nua in sub_roots(nu) {
            let nub = root_sub(nu, &nua);
            let e1 = self.embedded(&nua)?;
            let e2 = self.embedded(&nub)?;
            for x in e1.iter() {
                let xt = f.multiply(x, &self.theta);
                for y in e2.iter() {
                    let p = f.multiply(&xt, y);
                    ech.insert(p.eval());
                    for (k, c) in bt.coords_laurent(&p).iter().enumerate() {
                        if !c.is_zero() {
                            support.insert(k);
                        }
                    }
                }
            }
        }
        let members: Vec<usize> = support.into_iter().collect();
        let delta = neg(nu);
        let dim = self.tensor.pure.dim(&delta);
        if members.len() != ech.rank() || members.len() != dim {
            return Err(fail(format!(
                "(fθf) at {:?}: support {} / rank {} / tensor dimension {}",
                nu,
                members.len(),
                ech.rank(),
                dim
            )));
        }
        let mut phi = vec![vec![Laurent::zero(); dim]; dim];
        let mut cols = Vec::with_capacity(dim);
        for (m, &k) in members.iter().enumerate() {
            let y = self.phi_raw(nu, &bt.elems[k].vector)?;
            for (p, c) in y.c.iter().enumerate() {
                phi[p][m] = c.clone();
            }
            cols.push(y.c);
        }
        let mut psi = vec![vec![Laurent::zero(); dim]; dim];
        if dim > 0 {
            let s = checked_solver(cols, "φ")?;
            for p in 0..dim {
                let e: Vec<Laurent> = (0..dim).map(|q| if q == p { Laurent::one() } else { Laurent::zero() }).collect();
                for (m, c) in solve_laurent(&s, &e, "ψ")?.into_iter().enumerate() {
                    psi[m][p] = c;
                }
            }
        }
        let r = Rc::new(SubSpace { nu: nu.to_vec(), weight: tw, members, phi, psi });
        self.subs.borrow_mut().insert(nu.to_vec(), r.clone());
        Ok(r)
    }

    /// Coordinates of `z ∈ (fθ_λf)_ν` over `B((fθ_λf))`.
    pub fn coords(&self, nu: &[i64], z: &FVector) -> Result<Vec<Laurent>, ModError> {
        let s = self.sub(nu)?;
        let bt = self.cbt.basis(&s.weight)?;
        let c = match bt.coords(z) {
            Solution::Laurent(c) => c,
            _ => return Err(ModError::Inexact(String::from("element of (fθf) with non-integral coordinates"))),
        };
        let set: BTreeSet<usize> = s.members.iter().copied().collect();
        if c.iter().enumerate().any(|(k, x)| !x.is_zero() && !set.contains(&k)) {
            return Err(fail(format!("element outside (fθf) at {:?}", nu)));
        }
        Ok(s.members.iter().map(|&k| c[k].clone()).collect())
    }

    /// `Σ c_m b_m` as an element of `f̃`.
    pub fn element(&self, nu: &[i64], c: &[Laurent]) -> Result<FVector, ModError> {
        let s = self.sub(nu)?;
        let bt = self.cbt.basis(&s.weight)?;
        let mut z = self.cbt.f.zero(&s.weight);
        for (m, x) in c.iter().enumerate() {
            z.axpy(x, &bt.elems[s.members[m]].vector);
        }
        Ok(z)
    }

    pub fn phi(&self, nu: &[i64], z: &FVector) -> Result<MVec, ModError> {
        let c = self.coords(nu, z)?;
        let s = self.sub(nu)?;
        Ok(MVec { delta: neg(nu), c: mat_vec(&s.phi, &c) })
    }

    /// `ψ(t)` as coordinates over `B((fθ_λf))`.
    pub fn psi_coords(&self, t: &MVec) -> Result<Vec<Laurent>, ModError> {
        let s = self.sub(&neg(&t.delta))?;
        Ok(mat_vec(&s.psi, &t.c))
    }

    pub fn psi(&self, t: &MVec) -> Result<FVector, ModError> {
        let nu = neg(&t.delta);
        let c = self.psi_coords(t)?;
        self.element(&nu, &c)
    }

    /// `E_i` on `f̃` viewed as `M̃_{ζ⊙λ}`.
    pub fn e_thick(&self, i: Gen, z: &FVector) -> Result<FVector, ModError> {
        let top = self.th.odot(&self.zeta, &self.lambda).map_err(|e| ModError::Unsupported(format!("{}", e)))?;
        let p = self.th.thick.pair(i, &top);
        let f = &self.cbt.f;
        let a = f.ir(i, z);
        let b = f.ri(i, z);
        let dz = self.th.thick.cartan.dot_root(i, &z.weight);
        let ca = Laurent::v((p - dz + 2) as i32);
        let cb = Laurent::v(-p as i32);
        let q = Laurent::from_terms([(1, 1), (-1, -1)]);
        let d = a
            .d
            .iter()
            .zip(&b.d)
            .map(|(x, y)| (&(&ca * x) - &(&cb * y)).div_exact(&q).ok_or_else(|| ModError::Inexact(String::from("E_i on f̃"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FVector { weight: a.weight, d })
    }

    /// Certifies the realization at `ν`: `φψ = ψφ = id`, `ψ(x⊗η) = θ_λx`,
    /// the Serre-sum formula for `ψ(x⊗F_i^{(n)}η)`, `F_i`-equivariance,
    /// `ε_i φ = φ _i r`, `Ψφ = φ∘bar`, the scaled isometry, and that `φ`
    /// maps `B((fθ_λf))` onto the diamond basis of `M_ζ⊗Λ_λ`.
    pub fn certify(&self, nu: &[i64]) -> Result<(), ModError> {
        let s = self.sub(nu)?;
        let dim = s.members.len();
        let delta = neg(nu);
        let t = &self.tensor;
        let f = &self.cbt.f;
        let id = crate::tensor::mat_mul(&s.phi, &s.psi);
        let id2 = crate::tensor::mat_mul(&s.psi, &s.phi);
        for a in 0..dim {
            for b in 0..dim {
                let want = if a == b { Laurent::one() } else { Laurent::zero() };
                if id[a][b] != want || id2[a][b] != want {
                    return Err(fail(format!("φψ or ψφ is not the identity at {:?}", nu)));
                }
            }
        }
        let bt = self.cbt.basis(&s.weight)?;
        let emb = self.embedded(nu)?;
        // ψ(x⊗η) = θ_λ x
        for (k, x) in emb.iter().enumerate() {
            let p = t.pure_tensor(&t.left.unit(&delta, k), &t.right.unit(&vec![0; self.n()], 0))?;
            if self.psi(&p)? != f.multiply(&self.theta, x) {
                return Err(fail(format!("ψ(x⊗η) ≠ θ_λx at {:?}#{}", nu, k)));
            }
        }
        // ψ(x⊗F_i^{(n)}η) = Σ_k (-1)^k v^{-k(⟨i,λ⟩+1-n)} θ_i^{(n-k)}θ_λθ_i^{(k)}x
        for i in 0..self.n() {
            let li = self.base.datum.pair(i, &self.lambda);
            for n in 1..=(nu[i].min(li)) {
                let xnu = {
                    let mut r = nu.to_vec();
                    r[i] -= n;
                    r
                };
                let fn_eta = t.right.divided(false, i, n as u32, &t.right.unit(&vec![0; self.n()], 0))?;
                for (k, x) in self.embedded(&xnu)?.iter().enumerate() {
                    let p = t.pure_tensor(&t.left.unit(&neg(&xnu), k), &fn_eta)?;
                    let got = self.psi(&p)?;
                    let mut want = f.zero(&s.weight);
                    for kk in 0..=n {
                        let term = f.multiply(
                            &f.multiply(&f.multiply(&f.theta(i, (n - kk) as u32), &self.theta), &f.theta(i, kk as u32)),
                            x,
                        );
                        let sign = if kk % 2 == 0 { 1 } else { -1 };
                        want.axpy(&Laurent::mono(sign, (-kk * (li + 1 - n)) as i32), &term);
                    }
                    if got != want {
                        return Err(fail(format!("Serre-sum formula fails at {:?}, generator {}, n={}", nu, i, n)));
                    }
                }
            }
        }
        let theta_norm = f.gram_form(&self.theta, &self.theta);
        let diamonds = t.diamond(&delta)?;
        let mut hit = BTreeSet::new();
        for (m, &k) in s.members.iter().enumerate() {
            let z = &bt.elems[k].vector;
            let y = MVec { delta: delta.clone(), c: s.phi.iter().map(|r| r[m].clone()).collect() };
            // φ(b) is a diamond element
            let j = (0..dim)
                .find(|&j| diamonds.pi.iter().zip(&y.c).all(|(r, c)| r[j] == *c))
                .ok_or_else(|| fail(format!("φ(b) is not a diamond element at {:?}#{}", nu, m)))?;
            hit.insert(j);
            // Ψφ = φ∘bar, tested on a non-invariant combination
            let zz = z.scale(&Laurent::from_terms([(1, 1), (-2, 3)]));
            if t.psi(&self.phi(nu, &zz)?)? != self.phi(nu, &f.bar(&zz))? {
                return Err(fail(format!("Ψφ ≠ φ∘bar at {:?}#{}", nu, m)));
            }
            // F_i equivariance and ε_i φ = φ _i r
            for i in 0..self.n() {
                let up = root_add(nu, &simple_root(self.n(), i));
                if trace(&up) <= self.depth {
                    let lhs = self.phi(&up, &f.multiply(&f.theta(i, 1), z))?;
                    if lhs != t.pure.f(i, &y)? {
                        return Err(fail(format!("φ(θ_i z) ≠ F_i φ(z) at {:?}#{}", nu, m)));
                    }
                }
                if nu[i] > 0 {
                    let down = root_sub(nu, &simple_root(self.n(), i));
                    let lhs = t.epsilon(i, &y)?;
                    if lhs != self.phi(&down, &f.ir(i, z))? {
                        return Err(fail(format!("ε_i φ ≠ φ _i r at {:?}#{}", nu, m)));
                    }
                }
            }
            // scaled isometry
            for (m2, &k2) in s.members.iter().enumerate() {
                let y2 = MVec { delta: delta.clone(), c: s.phi.iter().map(|r| r[m2].clone()).collect() };
                let lhs = t.inner(&y, &y2)?;
                let rhs = f.gram_form(z, &bt.elems[k2].vector).div(&theta_norm);
                if lhs != rhs {
                    return Err(fail(format!("scaled isometry fails at {:?}: {} vs {}", nu, lhs, rhs)));
                }
            }
        }
        if hit.len() != dim {
            return Err(fail(format!("φ is not a bijection onto the diamond basis at {:?}", nu)));
        }
        Ok(())
    }

    /// All `ν` with `tr ν ≤ depth` where the realization is nonzero.
    pub fn weights(&self) -> Vec<Root> {
        let mut v: Vec<Root> = self
            .tensor
            .components()
            .map(|d| neg(d))
            .filter(|nu| trace(nu) <= self.depth)
            .collect();
        v.sort_by_key(|nu| (trace(nu), nu.clone()));
        v
    }
}

/// Which quotient of `(fθ_λf)` is taken.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuotientKind {
    /// `Λ_{-wλ₁,λ₂}`, by `f̃·Ann_f(ξ_{-wλ₁})`, onto `^ωV_w(λ₁)⊗Λ_{λ₂}`.
    Demazure(WeylWord),
    /// `Λ_{λ₁,λ₂}`, by `Σ f̃θ_i^{⟨i,λ₁⟩+1}`, onto `Λ_{λ₁}⊗Λ_{λ₂}`.
    Highest,
}

/// The quotient at one weight.
#[derive(Debug)]
pub struct QuotientSpace {
    pub nu: Root,
    /// Positions (into the subspace members) spanning the kernel.
    pub kernel: Vec<usize>,
    /// Positions whose images form the quotient canonical basis.
    pub rest: Vec<usize>,
    pub dim_kernel: usize,
    /// Offset of the target tensor component.
    pub target: Root,
    /// `phibar[p][r]`: target pure coordinate `p` of `φ̄π(b_{rest[r]})`.
    pub phibar: Mat,
}

pub struct Quotient {
    pub ctx: Rc<ThickenCtx>,
    pub kind: QuotientKind,
    pub lambda1: Weight,
    pub first: Rc<Module>,
    pub demazure: Option<Demazure>,
    /// `^ωΛ_{λ₁}⊗Λ_{λ₂}` or `Λ_{λ₁}⊗Λ_{λ₂}`.
    pub target: Tensor,
    spaces: RefCell<BTreeMap<Root, Rc<QuotientSpace>>>,
}

impl Quotient {
    pub fn new(ctx: Rc<ThickenCtx>, lambda1: &[i64], kind: QuotientKind) -> Result<Self, ModError> {
        let base = ctx.base.clone();
        let d = &base.datum;
        let (first, demazure) = match &kind {
            QuotientKind::Demazure(w) => {
                if neg(&d.act(w, lambda1)) != ctx.zeta {
                    return Err(fail(String::from("ζ must equal -wλ₁")));
                }
                let lw = Rc::new(base.simple_lw(lambda1, 64)?);
                let dm = base.demazure(lw.clone(), w, true)?;
                (lw, Some(dm))
            }
            QuotientKind::Highest => {
                if ctx.zeta != lambda1 {
                    return Err(fail(String::from("ζ must equal λ₁")));
                }
                (Rc::new(base.simple_hw(lambda1, 64)?), None)
            }
        };
        let target = Tensor::new(base.cb.clone(), first.clone(), ctx.tensor.right.clone())?;
        Ok(Quotient { ctx, kind, lambda1: lambda1.to_vec(), first, demazure, target, spaces: RefCell::new(BTreeMap::new()) })
    }

    /// Image of the Verma basis vector `B_ν[k]` in the first factor:
    /// `b⁻ξ_{-wλ₁}` or `b⁻η_{λ₁}`, when nonzero.
    pub fn project(&self, nu: &[i64], k: usize) -> Result<Option<(Root, usize)>, ModError> {
        match &self.demazure {
            Some(dm) => {
                let img = dm.images(&self.ctx.base.cb, nu)?;
                Ok(img[k].map(|u| (root_sub(&dm.extreme.delta, nu), u)))
            }
            None => Ok(self.first.find(&vec![(nu.to_vec(), k)])),
        }
    }

    fn target_offset(&self, nu: &[i64]) -> Root {
        match &self.demazure {
            Some(dm) => root_sub(&dm.extreme.delta, nu),
            None => neg(nu),
        }
    }

    /// `a ⊗ Id` (or `π_{λ₁} ⊗ Id`) on `M_ζ⊗Λ_λ`.
    pub fn a_tensor(&self, x: &MVec) -> Result<MVec, ModError> {
        let t = &self.ctx.tensor;
        let nu = neg(&x.delta);
        let mut out = self.target.pure.zero(&self.target_offset(&nu));
        for (p, c) in x.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (d1, k1, d2, k2) = t.part(&x.delta, p).clone();
            if let Some((e1, u)) = self.project(&neg(&d1), k1)? {
                let a = self.first.unit(&e1, u);
                let y = self.target.pure_tensor(&a, &self.ctx.tensor.right.unit(&d2, k2))?;
                out.axpy(c, &y);
            }
        }
        Ok(out)
    }

    fn generators(&self, nu: &[i64]) -> Result<Vec<FVector>, ModError> {
        let ctx = &self.ctx;
        let f = &ctx.cbt.f;
        let tw = ctx.weight_of(nu);
        let mut gens = Vec::new();
        match &self.demazure {
            Some(dm) => {
                for a in sub_roots(nu) {
                    if a.iter().all(|&x| x == 0) {
                        continue;
                    }
                    let ann = dm.ann_basis(&ctx.base.cb, &a)?;
                    if ann.is_empty() {
                        continue;
                    }
                    let emb = ctx.embedded(&a)?;
                    let by = ctx.cbt.basis(&root_sub(&tw, &ctx.lift_root(&a)))?;
                    for &k in &ann {
                        for y in &by.elems {
                            gens.push(f.multiply(&y.vector, &emb[k]));
                        }
                    }
                }
            }
            None => {
                let n = ctx.n();
                for i in 0..n {
                    let c = ctx.base.datum.pair(i, &self.lambda1) + 1;
                    if nu[i] < c {
                        continue;
                    }
                    let mut r = simple_root(2 * n, i);
                    r[i] = c;
                    let by = ctx.cbt.basis(&root_sub(&tw, &r))?;
                    let th = f.theta(i, c as u32);
                    for y in &by.elems {
                        gens.push(f.multiply(&y.vector, &th));
                    }
                }
            }
        }
        Ok(gens)
    }

    /// The quotient at `ν`: kernel `S ∩ L` certified to be spanned by
    /// `B((fθ_λf)) ∩ L` via `dim K = dim S + dim L - dim(S+L)`, and the
    /// images `φ̄π(b) = (a⊗Id)φ(b)`.
    pub fn space(&self, nu: &[i64]) -> Result<Rc<QuotientSpace>, ModError> {
        if let Some(q) = self.spaces.borrow().get(nu) {
            return Ok(q.clone());
        }
        let ctx = &self.ctx;
        let s = ctx.sub(nu)?;
        let bt = ctx.cbt.basis(&s.weight)?;
        let gens = self.generators(nu)?;
        let mut el = ModEchelon::new();
        for g in &gens {
            el.insert(g.eval());
        }
        let mut esl = el.clone();
        for &k in &s.members {
            esl.insert(bt.elems[k].vector.eval());
        }
        let dim_kernel = s.members.len() + el.rank() - esl.rank();
        let (kernel, rest): (Vec<usize>, Vec<usize>) =
            (0..s.members.len()).partition(|&m| el.in_span(&bt.elems[s.members[m]].vector.eval()));
        if kernel.len() != dim_kernel {
            return Err(fail(format!("canonical basis does not span the kernel at {:?}: {} of {}", nu, kernel.len(), dim_kernel)));
        }
        let target = self.target_offset(nu);
        let mut phibar = vec![vec![Laurent::zero(); rest.len()]; self.target.pure.dim(&target)];
        for (m, _) in s.members.iter().enumerate() {
            let y = MVec { delta: neg(nu), c: s.phi.iter().map(|r| r[m].clone()).collect() };
            let img = self.a_tensor(&y)?;
            match rest.iter().position(|&r| r == m) {
                Some(r) => {
                    for (p, c) in img.c.into_iter().enumerate() {
                        phibar[p][r] = c;
                    }
                }
                None => {
                    if !img.is_zero() {
                        return Err(fail(format!("(a⊗Id)φ does not vanish on the kernel at {:?}", nu)));
                    }
                }
            }
        }
        let q = Rc::new(QuotientSpace { nu: nu.to_vec(), kernel, rest, dim_kernel, target, phibar });
        self.spaces.borrow_mut().insert(nu.to_vec(), q.clone());
        Ok(q)
    }

    /// `φ̄` on quotient coordinates (over `rest`).
    pub fn phibar(&self, nu: &[i64], c: &[Laurent]) -> Result<MVec, ModError> {
        let q = self.space(nu)?;
        Ok(MVec { delta: q.target.clone(), c: mat_vec(&q.phibar, c) })
    }

    /// `π` on subspace coordinates.
    pub fn pi(&self, nu: &[i64], c: &[Laurent]) -> Result<Vec<Laurent>, ModError> {
        let q = self.space(nu)?;
        Ok(q.rest.iter().map(|&r| c[r].clone()).collect())
    }

    /// Lift of a target pure tensor along `a⊗Id`.
    fn lift(&self, nu: &[i64], p: usize) -> Result<Option<MVec>, ModError> {
        let q = self.space(nu)?;
        let (e1, u1, d2, k2) = self.target.part(&q.target, p).clone();
        let t = &self.ctx.tensor;
        for nub in sub_roots(nu) {
            let b = self.ctx.base.cb.basis(&nub)?;
            for k in 0..b.len() {
                if self.project(&nub, k)? == Some((e1.clone(), u1)) {
                    return Ok(Some(t.pure_tensor(&t.left.unit(&neg(&nub), k), &t.right.unit(&d2, k2))?));
                }
            }
        }
        Ok(None)
    }

    /// `ψ̄` via lifts: `ψ̄(t) = π(ψ(lift t))`.
    pub fn psibar(&self, nu: &[i64], x: &MVec) -> Result<Vec<Laurent>, ModError> {
        let q = self.space(nu)?;
        let mut out = vec![Laurent::zero(); q.rest.len()];
        for (p, c) in x.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let l = self.lift(nu, p)?.ok_or_else(|| fail(format!("target vector outside the Demazure part at {:?}", nu)))?;
            let z = self.ctx.psi_coords(&l)?;
            for (o, y) in out.iter_mut().zip(self.pi(nu, &z)?) {
                *o += &(c * &y);
            }
        }
        Ok(out)
    }

    /// `E_i` on the quotient, for a left descent `i` of `w`, through `M̃_{ζ⊙λ}`.
    pub fn e_descent(&self, i: Gen, nu: &[i64], c: &[Laurent]) -> Result<Vec<Laurent>, ModError> {
        if let QuotientKind::Demazure(w) = &self.kind {
            if !self.ctx.base.datum.cartan.descent(i, w) {
                return Err(ModError::Unsupported(format!("generator {} is not a descent", i)));
            }
        }
        let ctx = &self.ctx;
        let q = self.space(nu)?;
        let s = ctx.sub(nu)?;
        let mut full = vec![Laurent::zero(); s.members.len()];
        for (r, x) in q.rest.iter().zip(c) {
            full[*r] = x.clone();
        }
        let z = ctx.element(nu, &full)?;
        let ez = ctx.e_thick(i, &z)?;
        let down = root_sub(nu, &simple_root(ctx.n(), i));
        let qd = self.space(&down)?;
        let sd = ctx.sub(&down)?;
        let bt = ctx.cbt.basis(&sd.weight)?;
        let mut cols: Vec<Vec<Laurent>> = qd.rest.iter().map(|&r| bt.elems[sd.members[r]].vector.d.clone()).collect();
        let mut ech = ModEchelon::new();
        for c in &cols {
            ech.insert(crate::linalg::eval_vec(c, crate::linalg::modp::V0));
        }
        for g in self.generators(&down)? {
            if ech.insert(g.eval()) {
                cols.push(g.d);
            }
        }
        let s = checked_solver(cols, "quotient E_i")?;
        let sol = solve_laurent(&s, &ez.d, "E_i descends to the quotient")?;
        Ok(sol[..qd.rest.len()].to_vec())
    }

    /// Certifies the quotient square at `ν`: `φ̄π` maps the quotient canonical basis
    /// bijectively onto the diamond elements with first label in the
    /// Demazure basis, `ψ̄φ̄ = id`, `φ̄ψ̄ = id`, `π∘ψ = ψ̄∘(a⊗Id)`, and `E_i`
    /// descends compatibly for every descent `i`.
    pub fn certify(&self, nu: &[i64]) -> Result<(), ModError> {
        let q = self.space(nu)?;
        let tgt = &q.target;
        let nr = q.rest.len();
        let base_cb = &self.ctx.base.cb;
        // expected labels
        let allowed: Vec<usize> = (0..self.target.pure.dim(tgt))
            .filter(|&p| {
                let (e1, u1, _, _) = self.target.part(tgt, p);
                match &self.demazure {
                    Some(dm) => dm.basis_at(base_cb, e1).map(|b| b.contains(u1)).unwrap_or(false),
                    None => {
                        let _ = (e1, u1);
                        true
                    }
                }
            })
            .collect();
        if allowed.len() != nr {
            return Err(fail(format!("quotient at {:?} has {} elements, expected {}", nu, nr, allowed.len())));
        }
        let mut hit = BTreeSet::new();
        for r in 0..nr {
            let y = MVec { delta: tgt.clone(), c: q.phibar.iter().map(|row| row[r].clone()).collect() };
            let j = allowed
                .iter()
                .copied()
                .find(|&j| self.target.diamond_vec(tgt, j).map(|d| d == y).unwrap_or(false))
                .ok_or_else(|| fail(format!("φ̄π(b) is not a diamond element at {:?}", nu)))?;
            hit.insert(j);
            let e: Vec<Laurent> = (0..nr).map(|s| if s == r { Laurent::one() } else { Laurent::zero() }).collect();
            if self.psibar(nu, &y)? != e {
                return Err(fail(format!("ψ̄φ̄ ≠ id at {:?}", nu)));
            }
        }
        if hit.len() != nr {
            return Err(fail(format!("φ̄π is not injective on the canonical basis at {:?}", nu)));
        }
        for &p in &allowed {
            let x = self.target.pure.unit(tgt, p);
            if self.phibar(nu, &self.psibar(nu, &x)?)? != x {
                return Err(fail(format!("φ̄ψ̄ ≠ id at {:?}", nu)));
            }
        }
        // bottom square on all pure tensors of M_ζ⊗Λ_λ
        let t = &self.ctx.tensor;
        let delta = neg(nu);
        for p in 0..t.pure.dim(&delta) {
            let x = t.pure.unit(&delta, p);
            let lhs = self.pi(nu, &self.ctx.psi_coords(&x)?)?;
            let rhs = self.psibar(nu, &self.a_tensor(&x)?)?;
            if lhs != rhs {
                return Err(fail(format!("π∘ψ ≠ ψ̄∘(a⊗Id) at {:?}", nu)));
            }
        }
        // E_i descent
        if let QuotientKind::Demazure(w) = &self.kind {
            for i in 0..self.ctx.n() {
                if !self.ctx.base.datum.cartan.descent(i, w) || nu[i] == 0 {
                    continue;
                }
                for r in 0..nr {
                    let e: Vec<Laurent> = (0..nr).map(|s| if s == r { Laurent::one() } else { Laurent::zero() }).collect();
                    let down = root_sub(nu, &simple_root(self.ctx.n(), i));
                    let lhs = self.phibar(&down, &self.e_descent(i, nu, &e)?)?;
                    let rhs = self.target.pure.e(i, &self.phibar(nu, &e)?)?;
                    if lhs != rhs {
                        return Err(fail(format!("E_{} does not intertwine φ̄ at {:?}", i, nu)));
                    }
                }
            }
        }
        Ok(())
    }

    /// The quotient canonical basis element mapping to the diamond element
    /// with target label `(first, second)`, as its member index in `B̃`.
    pub fn preimage_of(&self, nu: &[i64], target_pure: usize) -> Result<Option<usize>, ModError> {
        let q = self.space(nu)?;
        let s = self.ctx.sub(nu)?;
        let d = self.target.diamond_vec(&q.target, target_pure)?;
        for (r, &m) in q.rest.iter().enumerate() {
            if q.phibar.iter().zip(&d.c).all(|(row, c)| row[r] == *c) {
                return Ok(Some(s.members[m]));
            }
        }
        Ok(None)
    }
}

/// `λ₁⊙⋯⊙λ_k` through the tower of iterated thickenings.
pub fn iterate(base: &crate::datum::RootDatum, lambdas: &[Weight]) -> Result<(Tower, Weight), ModError> {
    if lambdas.is_empty() || lambdas.len() > 3 {
        return Err(ModError::Unsupported(String::from("tower length must be between 1 and 3")));
    }
    let t = Tower::new(base, lambdas.len() - 1).map_err(|e| ModError::Unsupported(format!("{}", e)))?;
    let w = t.odot(lambdas).map_err(|e| ModError::Unsupported(format!("{}", e)))?;
    Ok((t, w))
}

/// `(θ_λ, θ_λ)` for reporting.
pub fn theta_norm(ctx: &ThickenCtx) -> RationalFn {
    ctx.cbt.f.gram_form(&ctx.theta, &ctx.theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datum::RootDatum;

    fn a1_ctx(zeta: i64, lambda: i64, depth: usize) -> Rc<ThickenCtx> {
        let base = Rc::new(ModCtx::new(RootDatum::type_a(1)));
        let th = base.datum.thicken().unwrap();
        let cbt = Rc::new(CanonicalBasis::new(th.thick.cartan.clone()));
        Rc::new(ThickenCtx::new(base, cbt, &[zeta], &[lambda], depth).unwrap())
    }

    fn word(f: &crate::falg::FAlg, t: &[(Gen, u32)]) -> FVector {
        (*f.monomial(t)).clone()
    }

    #[test]
    fn theta_lambda_and_small_subspaces() {
        let c = a1_ctx(1, 1, 3);
        let f = &c.cbt.f;
        assert_eq!(c.theta, f.theta(1, 1));
        let s0 = c.sub(&[0]).unwrap();
        assert_eq!(s0.members.len(), 1);
        assert_eq!(c.cbt.basis(&s0.weight).unwrap().elems[s0.members[0]].vector, c.theta);
        let s1 = c.sub(&[1]).unwrap();
        let bt = c.cbt.basis(&s1.weight).unwrap();
        let got: BTreeSet<usize> = s1.members.iter().copied().collect();
        let want: BTreeSet<usize> =
            [word(f, &[(0, 1), (1, 1)]), word(f, &[(1, 1), (0, 1)])].iter().map(|x| bt.index_of(x).unwrap()).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn phi_examples() {
        let c = a1_ctx(1, 1, 3);
        let f = &c.cbt.f;
        let t = &c.tensor;
        // φ(θ_λ θ_i) = θ_i ⊗ η
        let z = f.multiply(&c.theta, &f.theta(0, 1));
        let want = t.pure_tensor(&t.left.unit(&[-1], 0), &t.right.unit(&[0], 0)).unwrap();
        assert_eq!(c.phi(&[1], &z).unwrap(), want);
        // φ(θ_i θ_λ) = 1⊗Fη + v^{-1} θ_i⊗η
        let z = f.multiply(&f.theta(0, 1), &c.theta);
        let mut want2 = t.pure_tensor(&t.left.unit(&[0], 0), &t.right.unit(&[-1], 0)).unwrap();
        want2.axpy(&Laurent::v(-1), &want);
        assert_eq!(c.phi(&[1], &z).unwrap(), want2);
    }

    #[test]
    fn realization_certified_a1() {
        for (z, l) in [(0, 1), (1, 1), (2, 1), (-1, 2)] {
            let c = a1_ctx(z, l, 3);
            for nu in c.weights() {
                c.certify(&nu).unwrap_or_else(|e| panic!("ζ={} λ={} ν={:?}: {}", z, l, nu, e));
            }
        }
    }

    #[test]
    fn demazure_quotient_a1() {
        let c = a1_ctx(1, 1, 2);
        let q = Quotient::new(c.clone(), &[1], QuotientKind::Demazure(vec![0])).unwrap();
        for nu in c.weights() {
            q.certify(&nu).unwrap_or_else(|e| panic!("ν={:?}: {}", nu, e));
        }
        let s = q.space(&[1]).unwrap();
        assert_eq!(s.rest.len(), 2);
        // w = e: ζ = -λ₁; θ_λθ_i lies in the kernel
        let c = a1_ctx(-1, 1, 2);
        let q = Quotient::new(c.clone(), &[1], QuotientKind::Demazure(vec![])).unwrap();
        let s = q.space(&[1]).unwrap();
        let f = &c.cbt.f;
        let k = c.coords(&[1], &f.multiply(&c.theta, &f.theta(0, 1))).unwrap();
        assert!(s.rest.iter().all(|&r| k[r].is_zero()));
        for nu in c.weights() {
            q.certify(&nu).unwrap_or_else(|e| panic!("ν={:?}: {}", nu, e));
        }
    }

    #[test]
    fn highest_quotient_a1() {
        let c = a1_ctx(1, 2, 3);
        let q = Quotient::new(c.clone(), &[1], QuotientKind::Highest).unwrap();
        for nu in c.weights() {
            q.certify(&nu).unwrap_or_else(|e| panic!("ν={:?}: {}", nu, e));
        }
    }

    #[test]
    fn a1_demazure_correspondence() {
        for m in 0..=2i64 {
            for n in 0..=2i64 {
                let c = a1_ctx(m, n, (m + n) as usize);
                let q = Quotient::new(c.clone(), &[m], QuotientKind::Demazure(vec![0])).unwrap();
                let f = &c.cbt.f;
                for nu in c.weights() {
                    q.certify(&nu).unwrap_or_else(|e| panic!("m={} n={} ν={:?}: {}", m, n, nu, e));
                }
                for k in 0..=m {
                    for l in 0..=n {
                        let z = if k - l <= m - n {
                            f.multiply(
                                &f.multiply(&f.theta(1, (n - l) as u32), &f.theta(0, (m - k + l) as u32)),
                                &f.theta(1, l as u32),
                            )
                        } else {
                            f.multiply(
                                &f.multiply(&f.theta(0, l as u32), &f.theta(1, n as u32)),
                                &f.theta(0, (m - k) as u32),
                            )
                        };
                        let nu = [m - k + l];
                        let (e1, u1) = q.project(&[m - k], 0).unwrap().unwrap();
                        let mut label = q.first.labels(&e1)[u1].clone();
                        label.extend(c.tensor.right.labels(&[-l])[0].iter().cloned());
                        let (d, p) = q.target.pure.find(&label).unwrap();
                        assert_eq!(d, q.space(&nu).unwrap().target);
                        let bt = c.cbt.basis(&c.weight_of(&nu)).unwrap();
                        assert_eq!(q.preimage_of(&nu, p).unwrap(), bt.index_of(&z), "m={} n={} k={} l={}", m, n, k, l);
                    }
                }
            }
        }
    }

    #[test]
    fn realization_certified_a2() {
        let base = Rc::new(ModCtx::new(RootDatum::type_a(2)));
        let th = base.datum.thicken().unwrap();
        let cbt = Rc::new(CanonicalBasis::new(th.thick.cartan.clone()));
        let c = ThickenCtx::new(base, cbt, &[1, 0], &[0, 1], 2).unwrap();
        let ws = c.weights();
        assert!(ws.len() >= 6);
        for nu in ws {
            c.certify(&nu).unwrap_or_else(|e| panic!("ν={:?}: {}", nu, e));
        }
    }

    #[test]
    fn tower_weights() {
        let d = RootDatum::type_a(1);
        let (t, w) = iterate(&d, &[vec![2]]).unwrap();
        assert!(t.levels.is_empty());
        assert_eq!(w, vec![2]);
        let (_, w) = iterate(&d, &[vec![1], vec![2]]).unwrap();
        assert_eq!(w, d.thicken().unwrap().odot(&[1], &[2]).unwrap());
        assert!(iterate(&d, &[vec![1], vec![1], vec![1], vec![1]]).is_err());
    }
}
