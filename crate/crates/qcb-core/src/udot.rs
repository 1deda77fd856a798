//! The modified quantum group `U̇`: normal forms `Σ c·x⁺1_μy⁻`, products by
//! straightening, the unital action on modules, lifts `b₁◊_ζb₂` of the
//! canonical basis and spherical-parabolic membership.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

use crate::cbasis::CanonicalBasis;
use crate::coeff::{quantum_binomial, Lattice, Laurent, Tally};
use crate::datum::{Gen, Root, RootDatum, Weight};
use crate::falg::{trace, DivWord};
use crate::linalg::Solver;
use crate::modules::{root_add, root_sub, simple_root, MVec, ModCtx, ModError, Module};
use crate::tensor::Tensor;
use crate::thicken::sub_roots;

/// A letter of a formal word: `E_i^{(a)}` (`raise`) or `F_i^{(a)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub raise: bool,
    pub gen: Gen,
    pub exp: u32,
}

impl Letter {
    pub fn e(gen: Gen, exp: u32) -> Self {
        Letter { raise: true, gen, exp }
    }

    pub fn f(gen: Gen, exp: u32) -> Self {
        Letter { raise: false, gen, exp }
    }
}

/// Where the first rewrite is applied; both orders reach the same normal form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewriteOrder {
    Leftmost,
    Rightmost,
}

/// Key of a normal-form term `b_x⁺ 1_μ b_y⁻` over canonical bases.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    /// Middle weight `μ`.
    pub mid: Weight,
    pub x: (Root, usize),
    pub y: (Root, usize),
}

/// `Σ c·b_x⁺1_μb_y⁻` with `Laurent` coefficients; no zero entries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UdotElement {
    pub terms: BTreeMap<Term, Laurent>,
}

impl UdotElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, t: Term, c: &Laurent) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(t.clone()).or_insert_with(Laurent::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&t);
        }
    }

    pub fn axpy(&mut self, c: &Laurent, o: &UdotElement) {
        for (t, x) in &o.terms {
            self.add_term(t.clone(), &(c * x));
        }
    }

    pub fn sub(&self, o: &UdotElement) -> UdotElement {
        let mut r = self.clone();
        r.axpy(&Laurent::int(-1), o);
        r
    }
}

/// Label `(b₁, ζ, b₂)` of `b₁◊_ζb₂ ∈ U̇1_ζ`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DotLabel {
    pub b1: (Root, usize),
    pub zeta: Weight,
    pub b2: (Root, usize),
}

/// A lifted canonical basis element of `U̇`.
#[derive(Debug, Clone)]
pub struct DotCB {
    pub label: DotLabel,
    pub lift: UdotElement,
    pub margin: usize,
}

/// Side of a spherical parabolic subalgebra: `U̇_J` restricts the `E`-legs,
/// `U̇_J^ω` the `F`-legs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Parabolic {
    Plus(Vec<Gen>),
    Omega(Vec<Gen>),
}

/// Computations in `U̇` over a fixed root datum.
pub struct Udot {
    pub datum: RootDatum,
    pub cb: Rc<CanonicalBasis>,
    pub base: Rc<ModCtx>,
    word_coords: RefCell<BTreeMap<DivWord, Rc<Vec<Laurent>>>>,
    lifts: RefCell<BTreeMap<(DotLabel, usize), Rc<UdotElement>>>,
    frames: RefCell<BTreeMap<(Weight, Weight), Rc<Frame>>>,
}

/// `^ωΛ_{λ₁}⊗Λ_{λ₂}` with its extreme pure tensor `ξ_{-λ₁}⊗η_{λ₂}`.
pub struct Frame {
    pub lambda1: Weight,
    pub lambda2: Weight,
    pub tensor: Tensor,
    pub start: MVec,
}

fn support(nu: &[i64]) -> impl Iterator<Item = Gen> + '_ {
    nu.iter().enumerate().filter(|(_, &a)| a > 0).map(|(i, _)| i)
}

impl Udot {
    pub fn new(datum: RootDatum) -> Self {
        let base = Rc::new(ModCtx::new(datum.clone()));
        Udot { cb: base.cb.clone(), datum, base, word_coords: RefCell::default(), lifts: RefCell::default(), frames: RefCell::default() }
    }

    pub fn rank(&self) -> usize {
        self.datum.rank()
    }

    fn letter_weight(&self, l: &Letter) -> Weight {
        let s = if l.raise { l.exp as i64 } else { -(l.exp as i64) };
        self.datum.root_to_x(&simple_root(self.rank(), l.gen)).iter().map(|x| s * x).collect()
    }

    fn root_weight(&self, nu: &[i64]) -> Weight {
        self.datum.root_to_x(nu)
    }

    /// Rewrites `F_j^{(b)}E_i^{(a)}1_λ` into `E`-before-`F` order.
    fn swap(&self, f: Letter, e: Letter, lambda: &[i64]) -> Vec<(Vec<Letter>, Laurent)> {
        if f.gen != e.gen {
            return vec![(vec![e, f], Laurent::one())];
        }
        let (a, b) = (e.exp as i64, f.exp as i64);
        let p = self.datum.pair(e.gen, lambda);
        (0..=a.min(b))
            .map(|t| {
                let mut w = Vec::new();
                if a > t {
                    w.push(Letter::e(e.gen, (a - t) as u32));
                }
                if b > t {
                    w.push(Letter::f(f.gen, (b - t) as u32));
                }
                (w, quantum_binomial(-a + b - p, t as u32))
            })
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }

    /// Normal form of the formal word `w·1_ζ` (rightmost letter acts first).
    pub fn straighten(&self, w: &[Letter], zeta: &[i64]) -> UdotElement {
        self.straighten_with(w, zeta, RewriteOrder::Leftmost)
    }

    pub fn straighten_with(&self, w: &[Letter], zeta: &[i64], strategy: RewriteOrder) -> UdotElement {
        let mut pending: BTreeMap<Vec<Letter>, Laurent> = BTreeMap::new();
        let w: Vec<Letter> = w.iter().copied().filter(|l| l.exp > 0).collect();
        pending.insert(w, Laurent::one());
        let mut done: BTreeMap<Vec<Letter>, Laurent> = BTreeMap::new();
        while let Some((w, c)) = pending.pop_last() {
            let mut spots = (0..w.len().saturating_sub(1)).filter(|&p| !w[p].raise && w[p + 1].raise);
            let p = match strategy {
                RewriteOrder::Leftmost => spots.next(),
                RewriteOrder::Rightmost => spots.next_back(),
            };
            let Some(p) = p else {
                let e = done.entry(w).or_insert_with(Laurent::zero);
                *e += &c;
                continue;
            };
            let mut lambda = zeta.to_vec();
            for l in &w[p + 2..] {
                lambda = root_add(&lambda, &self.letter_weight(l));
            }
            for (mid, k) in self.swap(w[p], w[p + 1], &lambda) {
                let mut nw = w[..p].to_vec();
                nw.extend(mid);
                nw.extend_from_slice(&w[p + 2..]);
                let e = pending.entry(nw.clone()).or_insert_with(Laurent::zero);
                *e += &(&c * &k);
                if e.is_zero() {
                    pending.remove(&nw);
                }
            }
        }
        let mut out = UdotElement::zero();
        for (w, c) in done {
            if c.is_zero() {
                continue;
            }
            let split = w.iter().position(|l| !l.raise).unwrap_or(w.len());
            let ew: DivWord = w[..split].iter().map(|l| (l.gen, l.exp)).collect();
            let fw: DivWord = w[split..].iter().map(|l| (l.gen, l.exp)).collect();
            self.add_words(&mut out, &ew, &fw, zeta, &c);
        }
        out
    }

    fn coords_of_word(&self, w: &DivWord) -> Rc<Vec<Laurent>> {
        if let Some(c) = self.word_coords.borrow().get(w) {
            return c.clone();
        }
        let x = self.cb.f.monomial(w);
        let b = self.cb.basis(&x.weight).expect("canonical basis within bounds");
        let c = Rc::new(b.coords_laurent(&x));
        self.word_coords.borrow_mut().insert(w.clone(), c.clone());
        c
    }

    /// Adds `c·θ_{ew}⁺θ_{fw}⁻1_ζ` expanded over canonical bases.
    fn add_words(&self, out: &mut UdotElement, ew: &DivWord, fw: &DivWord, zeta: &[i64], c: &Laurent) {
        let n = self.rank();
        let nx = crate::falg::div_word_weight(ew, n);
        let ny = crate::falg::div_word_weight(fw, n);
        let mid = root_sub(zeta, &self.root_weight(&ny));
        let cx = self.coords_of_word(ew);
        let cy = self.coords_of_word(fw);
        for (a, xa) in cx.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            let ca = c * xa;
            for (b, yb) in cy.iter().enumerate() {
                if !yb.is_zero() {
                    out.add_term(Term { mid: mid.clone(), x: (nx.clone(), a), y: (ny.clone(), b) }, &(&ca * yb));
                }
            }
        }
    }

    /// The element `b_x⁺1_μb_y⁻`.
    pub fn basis_term(&self, t: &Term) -> UdotElement {
        let mut u = UdotElement::zero();
        u.add_term(t.clone(), &Laurent::one());
        u
    }

    /// Input weight `μ + |y|` of a term.
    pub fn input_weight(&self, t: &Term) -> Weight {
        root_add(&t.mid, &self.root_weight(&t.y.0))
    }

    /// Output weight `μ + |x|` of a term.
    pub fn output_weight(&self, t: &Term) -> Weight {
        root_add(&t.mid, &self.root_weight(&t.x.0))
    }

    fn expansion(&self, nu: &[i64], k: usize) -> Vec<(DivWord, Laurent)> {
        self.cb.basis(nu).expect("canonical basis within bounds").elems[k].expansion.clone()
    }

    fn letters(w: &DivWord, raise: bool) -> impl Iterator<Item = Letter> + '_ {
        w.iter().map(move |&(g, e)| Letter { raise, gen: g, exp: e })
    }

    /// Product in `U̇`, by straightening `y⁻x′⁺` in each pair of terms.
    pub fn mul(&self, a: &UdotElement, b: &UdotElement) -> UdotElement {
        let mut out = UdotElement::zero();
        for (ta, ca) in &a.terms {
            let inp = self.input_weight(ta);
            for (tb, cb) in &b.terms {
                if self.output_weight(tb) != inp {
                    continue;
                }
                let c = ca * cb;
                let zeta = self.input_weight(tb);
                for (xw, xc) in self.expansion(&ta.x.0, ta.x.1) {
                    for (yw, yc) in self.expansion(&ta.y.0, ta.y.1) {
                        for (xw2, xc2) in self.expansion(&tb.x.0, tb.x.1) {
                            for (yw2, yc2) in self.expansion(&tb.y.0, tb.y.1) {
                                let w: Vec<Letter> = Self::letters(&xw, true)
                                    .chain(Self::letters(&yw, false))
                                    .chain(Self::letters(&xw2, true))
                                    .chain(Self::letters(&yw2, false))
                                    .collect();
                                let k = &(&(&c * &xc) * &(&yc * &xc2)) * &yc2;
                                out.axpy(&k, &self.straighten(&w, &zeta));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// The anti-automorphism `σ`: fixes `E_i`, `F_i` and sends `1_ζ` to `1_{-ζ}`.
    pub fn sigma(&self, u: &UdotElement) -> UdotElement {
        let mut out = UdotElement::zero();
        for (t, c) in &u.terms {
            let sx = self.cb.basis(&t.x.0).expect("canonical basis").sigma[t.x.1];
            let sy = self.cb.basis(&t.y.0).expect("canonical basis").sigma[t.y.1];
            // σ(x⁺1_μy⁻) = σ(y)⁻ σ(x)⁺ 1_{-μ-|x|}
            let zeta: Weight = root_sub(&t.mid.iter().map(|a| -a).collect::<Vec<_>>(), &self.root_weight(&t.x.0));
            for (yw, yc) in self.expansion(&t.y.0, sy) {
                for (xw, xc) in self.expansion(&t.x.0, sx) {
                    let w: Vec<Letter> = Self::letters(&yw, false).chain(Self::letters(&xw, true)).collect();
                    out.axpy(&(&(c * &yc) * &xc), &self.straighten(&w, &zeta));
                }
            }
        }
        out
    }

    /// `u·m` for a vector of `m`; `u` must shift weights homogeneously.
    pub fn act(&self, module: &Module, u: &UdotElement, x: &MVec) -> Result<MVec, ModError> {
        let wt = module.weight(&x.delta);
        let mut out: Option<MVec> = None;
        for (t, c) in &u.terms {
            if self.input_weight(t) != wt {
                continue;
            }
            let y = module.act_cb(&self.cb, &t.y.0, t.y.1, false, x)?;
            let z = module.act_cb(&self.cb, &t.x.0, t.x.1, true, &y)?;
            match &mut out {
                None => out = Some(z.scale(c)),
                Some(o) if o.delta == z.delta => o.axpy(c, &z),
                Some(_) => return Err(ModError::Unsupported(String::from("element with several weight shifts"))),
            }
        }
        Ok(out.unwrap_or_else(|| module.zero(&x.delta)))
    }

    /// A formal word acting letter by letter.
    pub fn act_word(&self, module: &Module, w: &[Letter], x: &MVec) -> Result<MVec, ModError> {
        let mut y = x.clone();
        for l in w.iter().rev() {
            y = module.divided(l.raise, l.gen, l.exp, &y)?;
        }
        Ok(y)
    }

    /// `^ωΛ_{λ₁}⊗Λ_{λ₂}` with `λ₂-λ₁ = ζ` and every `⟨i,λ_k⟩ ≥ bound`.
    pub fn frame(&self, zeta: &[i64], bound: i64) -> Result<Rc<Frame>, ModError> {
        let n = self.rank();
        let p1: Vec<i64> = (0..n).map(|i| bound.max(bound - self.datum.pair(i, zeta))).collect();
        let l1 = self.datum.weight_with_pairings(&p1).ok_or_else(|| ModError::Unsupported(String::from("no weight with the required pairings")))?;
        let l2 = root_add(&l1, zeta);
        if let Some(f) = self.frames.borrow().get(&(l1.clone(), l2.clone())) {
            return Ok(f.clone());
        }
        let cap = 4 * (p1.iter().sum::<i64>() as usize + 1) * (n + 1) + 16;
        let lw = Rc::new(self.base.simple_lw(&l1, cap)?);
        let hw = Rc::new(self.base.simple_hw(&l2, cap)?);
        let tensor = Tensor::new(self.cb.clone(), lw.clone(), hw.clone())?;
        let z = vec![0; n];
        let start = tensor.pure_tensor(&lw.unit(&z, 0), &hw.unit(&z, 0))?;
        let f = Rc::new(Frame { lambda1: l1.clone(), lambda2: l2.clone(), tensor, start });
        self.frames.borrow_mut().insert((l1, l2), f.clone());
        Ok(f)
    }

    fn lift_at(&self, label: &DotLabel, margin: usize) -> Result<UdotElement, ModError> {
        let (nu1, k1) = &label.b1;
        let (nu2, k2) = &label.b2;
        let bound = (trace(nu1) + trace(nu2) + margin) as i64;
        let fr = self.frame(&label.zeta, bound)?;
        let t = &fr.tensor;
        let target = t.diamond_of(&vec![(nu1.clone(), *k1), (nu2.clone(), *k2)])?;
        let lo: Vec<i64> = nu1.iter().zip(nu2).map(|(a, b)| *a.min(b)).collect();
        let mut terms = Vec::new();
        let mut cols = Vec::new();
        for mu in sub_roots(&lo) {
            let nx = root_sub(nu1, &mu);
            let ny = root_sub(nu2, &mu);
            let mid = root_sub(&label.zeta, &self.root_weight(&ny));
            let (bx, by) = (self.cb.basis(&nx)?, self.cb.basis(&ny)?);
            for a in 0..bx.len() {
                for b in 0..by.len() {
                    let term = Term { mid: mid.clone(), x: (nx.clone(), a), y: (ny.clone(), b) };
                    let y = self.act(&t.pure, &self.basis_term(&term), &fr.start)?;
                    if y.delta != target.delta {
                        return Err(ModError::Verification(String::from("lift column at an unexpected weight")));
                    }
                    cols.push(y.c);
                    terms.push(term);
                }
            }
        }
        if crate::linalg::rank(&cols) != cols.len() {
            return Err(ModError::Verification(format!("lift of {:?} not unique at margin {}", label, margin)));
        }
        let s = Solver::new(cols);
        let c = s.solve(&target.c).laurent().ok_or_else(|| ModError::Inexact(format!("lift of {:?} at margin {}", label, margin)))?;
        let mut u = UdotElement::zero();
        for (t, x) in terms.into_iter().zip(c) {
            u.add_term(t, &x);
        }
        Ok(u)
    }

    fn lift_cached(&self, label: &DotLabel, margin: usize) -> Result<Rc<UdotElement>, ModError> {
        let key = (label.clone(), margin);
        if let Some(u) = self.lifts.borrow().get(&key) {
            return Ok(u.clone());
        }
        let u = Rc::new(self.lift_at(label, margin)?);
        self.lifts.borrow_mut().insert(key, u.clone());
        Ok(u)
    }

    /// `b₁◊_ζb₂`, solved at the given margin and checked to agree with the
    /// solve at `margin + 1`.
    pub fn diamond_lift(&self, label: &DotLabel, margin: usize) -> Result<DotCB, ModError> {
        let margin = margin.max(1);
        let a = self.lift_cached(label, margin)?;
        let b = self.lift_cached(label, margin + 1)?;
        if a != b {
            return Err(ModError::Verification(format!("unstable lift of {:?}: {:?} vs {:?}", label, a, b)));
        }
        Ok(DotCB { label: label.clone(), lift: (*a).clone(), margin })
    }

    pub fn lift(&self, label: &DotLabel) -> Result<Rc<UdotElement>, ModError> {
        self.diamond_lift(label, 1)?;
        self.lift_cached(label, 1)
    }

    /// Coordinates of `u` over lifted canonical basis elements, read off from
    /// `u(ξ⊗η)` in the diamond basis and certified by reassembling `u`.
    pub fn express(&self, u: &UdotElement) -> Result<BTreeMap<DotLabel, Laurent>, ModError> {
        let mut blocks: BTreeMap<(Weight, Root), Vec<(&Term, &Laurent)>> = BTreeMap::new();
        for (t, c) in &u.terms {
            blocks.entry((self.input_weight(t), root_sub(&t.x.0, &t.y.0))).or_default().push((t, c));
        }
        let mut out = BTreeMap::new();
        for ((zeta, _), terms) in blocks {
            let part = UdotElement { terms: terms.iter().map(|(t, c)| ((*t).clone(), (*c).clone())).collect() };
            let bound = terms.iter().map(|(t, _)| trace(&t.x.0) + trace(&t.y.0)).max().unwrap_or(0) + 1;
            let fr = self.frame(&zeta, bound as i64)?;
            let t = &fr.tensor;
            let y = self.act(&t.pure, &part, &fr.start)?;
            let d = t.diamond(&y.delta)?;
            let dim = d.pi.len();
            let cols: Vec<Vec<Laurent>> = (0..dim).map(|j| d.pi.iter().map(|r| r[j].clone()).collect()).collect();
            let c = Solver::new(cols).solve(&y.c).laurent().ok_or_else(|| ModError::Inexact(String::from("diamond coordinates")))?;
            let mut rebuilt = UdotElement::zero();
            for (j, cj) in c.into_iter().enumerate() {
                if cj.is_zero() {
                    continue;
                }
                let l = &t.pure.labels(&y.delta)[j];
                let label = DotLabel { b1: l[0].clone(), zeta: zeta.clone(), b2: l[1].clone() };
                rebuilt.axpy(&cj, &*self.lift(&label)?);
                out.insert(label, cj);
            }
            if rebuilt != part {
                return Err(ModError::Verification(format!("canonical expansion does not reassemble the element at {:?}", zeta)));
            }
        }
        Ok(out)
    }

    /// Smallest spherical `J` with `u ∈ U̇_J` or `u ∈ U̇_J^ω`.
    pub fn is_spherical_parabolic(&self, u: &UdotElement) -> Option<Parabolic> {
        let mut jx = Vec::new();
        let mut jy = Vec::new();
        for t in u.terms.keys() {
            jx.extend(support(&t.x.0));
            jy.extend(support(&t.y.0));
        }
        for j in [&mut jx, &mut jy] {
            j.sort_unstable();
            j.dedup();
        }
        let c = &self.datum.cartan;
        let plus = c.is_spherical(&jx).then(|| Parabolic::Plus(jx.clone()));
        let omega = c.is_spherical(&jy).then(|| Parabolic::Omega(jy.clone()));
        match (plus, omega) {
            (Some(p), Some(o)) => Some(if jy.len() < jx.len() { o } else { p }),
            (p, o) => p.or(o),
        }
    }

    /// Lifted canonical basis elements `(B_{ν₁}[k₁], ζ, B_{ν₂}[k₂])` with
    /// `tr ν₁, tr ν₂ ≤ depth`.
    pub fn labels(&self, zeta: &[i64], depth: usize) -> Result<Vec<DotLabel>, ModError> {
        let n = self.rank();
        let mut out = Vec::new();
        for t1 in 0..=depth {
            for nu1 in crate::cbasis::weights_of_trace(n, t1) {
                for t2 in 0..=depth {
                    for nu2 in crate::cbasis::weights_of_trace(n, t2) {
                        let (l1, l2) = (self.cb.basis(&nu1)?.len(), self.cb.basis(&nu2)?.len());
                        for k1 in 0..l1 {
                            for k2 in 0..l2 {
                                out.push(DotLabel { b1: (nu1.clone(), k1), zeta: zeta.to_vec(), b2: (nu2.clone(), k2) });
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Output weight `ζ + |b₁| - |b₂|` of a lifted element.
    pub fn output_of(&self, l: &DotLabel) -> Weight {
        root_sub(&root_add(&l.zeta, &self.root_weight(&l.b1.0)), &self.root_weight(&l.b2.0))
    }

    /// Positivity of `ḃḃ′` over `Ḃ` and the σ-symmetry of its coefficients.
    pub fn verify_positivity(&self, a: &DotLabel, b: &DotLabel) -> Result<Tally, ModError> {
        let mut tally = Tally::new();
        let (la, lb) = (self.lift(a)?, self.lift(b)?);
        let p = self.mul(&la, &lb);
        let e = self.express(&p)?;
        for (l, c) in &e {
            tally.record(c, Lattice::InNvv, || format!("{:?}·{:?} on {:?}", a, b, l));
        }
        let sp = self.mul(&self.sigma(&lb), &self.sigma(&la));
        let se = self.express(&sp)?;
        let mut want = BTreeMap::new();
        for (l, c) in &e {
            let s = self.express(&self.sigma(&*self.lift(l)?))?;
            if s.len() != 1 || !s.values().all(|x| x.is_one()) {
                tally.fail(format!("σ of {:?} is not a canonical basis element", l));
                return Ok(tally);
            }
            want.insert(s.into_keys().next().expect("one label"), c.clone());
        }
        if want != se {
            tally.fail(format!("σ-symmetry fails for {:?}·{:?}", a, b));
        }
        Ok(tally)
    }

    /// Positivity of a lifted element acting on the basis of `m`.
    pub fn verify_action(&self, m: &Module, label: &DotLabel) -> Result<Tally, ModError> {
        let mut tally = Tally::new();
        let u = self.lift(label)?;
        let deltas: Vec<Root> = m.deltas().cloned().collect();
        for d in deltas {
            for k in 0..m.dim(&d) {
                let y = match self.act(m, &u, &m.unit(&d, k)) {
                    Ok(y) => y,
                    Err(ModError::Depth(_)) => continue,
                    Err(e) => return Err(e),
                };
                for (j, c) in y.c.iter().enumerate() {
                    tally.record(c, Lattice::InNvv, || format!("{:?} on {:?}#{} → #{}", label, d, k, j));
                }
            }
        }
        Ok(tally)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a1() -> Udot {
        Udot::new(RootDatum::type_a(1))
    }

    fn one_term(u: &Udot, p: u32, mid: i64, r: u32) -> UdotElement {
        let _ = u;
        let mut e = UdotElement::zero();
        e.add_term(Term { mid: vec![mid], x: (vec![p as i64], 0), y: (vec![r as i64], 0) }, &Laurent::one());
        e
    }

    #[test]
    fn commutator_examples() {
        let u = a1();
        let ef = u.straighten(&[Letter::e(0, 1), Letter::f(0, 1)], &[0]);
        let fe = u.straighten(&[Letter::f(0, 1), Letter::e(0, 1)], &[0]);
        assert_eq!(ef, fe);
        let ef = u.straighten(&[Letter::e(0, 1), Letter::f(0, 1)], &[2]);
        let mut fe = u.straighten(&[Letter::f(0, 1), Letter::e(0, 1)], &[2]);
        fe.add_term(Term { mid: vec![2], x: (vec![0], 0), y: (vec![0], 0) }, &crate::coeff::quantum_int(2));
        assert_eq!(ef, fe);
        // E1_{-2}F = F1_2E, both acting on weight 0
        let a = u.straighten(&[Letter::e(0, 1), Letter::f(0, 1)], &[0]);
        assert_eq!(a, one_term(&u, 1, -2, 1));
        let b = u.straighten(&[Letter::f(0, 1), Letter::e(0, 1)], &[0]);
        assert_eq!(a, b);
    }

    #[test]
    fn idempotents_are_orthogonal() {
        let u = a1();
        let one = |z: i64| one_term(&u, 0, z, 0);
        assert_eq!(u.mul(&one(1), &one(1)), one(1));
        assert!(u.mul(&one(1), &one(3)).is_zero());
        let x = one_term(&u, 2, -3, 1);
        assert_eq!(u.mul(&one(1), &x), x);
        assert_eq!(u.mul(&x, &one(-1)), x);
        assert!(u.mul(&x, &one(1)).is_zero());
    }

    fn word_strategy(n: usize) -> impl Strategy<Value = (Vec<Letter>, Vec<i64>)> {
        (
            proptest::collection::vec((any::<bool>(), 0..n, 1u32..3), 0..6),
            proptest::collection::vec(-3i64..4, n),
        )
            .prop_map(|(w, z)| (w.into_iter().map(|(r, g, e)| Letter { raise: r, gen: g, exp: e }).collect(), z))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn straightening_is_confluent((w, z) in word_strategy(2)) {
            let u = Udot::new(RootDatum::type_a(2));
            prop_assert_eq!(u.straighten_with(&w, &z, super::RewriteOrder::Leftmost), u.straighten_with(&w, &z, super::RewriteOrder::Rightmost));
        }

        #[test]
        fn action_factors_through_straightening((w, z) in word_strategy(1)) {
            let u = a1();
            let m = u.base.simple_hw(&[4], 64).unwrap();
            for d in m.deltas().cloned().collect::<Vec<_>>() {
                if m.weight(&d) != z {
                    continue;
                }
                let x = m.unit(&d, 0);
                let direct = match u.act_word(&m, &w, &x) {
                    Ok(y) => y,
                    Err(_) => continue,
                };
                let nf = u.straighten(&w, &z);
                let via = u.act(&m, &nf, &x).unwrap();
                if via.c.iter().all(|c| c.is_zero()) {
                    prop_assert!(direct.c.iter().all(|c| c.is_zero()));
                } else {
                    prop_assert_eq!(via, direct);
                }
            }
        }
    }

    #[test]
    fn rank_one_lifts() {
        let u = a1();
        for p in 0..=3u32 {
            for r in 0..=3u32 {
                for q in 0..=6i64 {
                    let zeta = vec![-q + 2 * r as i64];
                    let label = DotLabel { b1: (vec![p as i64], 0), zeta: zeta.clone(), b2: (vec![r as i64], 0) };
                    let d = u.diamond_lift(&label, 1).unwrap();
                    let want = if q >= (p + r) as i64 {
                        u.straighten(&[Letter::e(0, p), Letter::f(0, r)], &zeta)
                    } else {
                        u.straighten(&[Letter::f(0, r), Letter::e(0, p)], &zeta)
                    };
                    assert_eq!(d.lift, want, "p={} q={} r={}", p, q, r);
                }
            }
        }
        // the identification at q = p + r
        for p in 0..=3u32 {
            for r in 0..=3u32 {
                let z = [(r as i64) - (p as i64)];
                assert_eq!(
                    u.straighten(&[Letter::e(0, p), Letter::f(0, r)], &z),
                    u.straighten(&[Letter::f(0, r), Letter::e(0, p)], &z)
                );
            }
        }
    }

    #[test]
    fn one_sided_lifts() {
        let u = a1();
        let zero = (vec![0], 0);
        for a in 0..=3 {
            for z in -3..=3 {
                let l = DotLabel { b1: zero.clone(), zeta: vec![z], b2: (vec![a], 0) };
                let mut want = UdotElement::zero();
                want.add_term(Term { mid: vec![z - 2 * a], x: zero.clone(), y: (vec![a], 0) }, &Laurent::one());
                assert_eq!(*u.lift(&l).unwrap(), want);
                let l = DotLabel { b1: (vec![a], 0), zeta: vec![z], b2: zero.clone() };
                let mut want = UdotElement::zero();
                want.add_term(Term { mid: vec![z], x: (vec![a], 0), y: zero.clone() }, &Laurent::one());
                assert_eq!(*u.lift(&l).unwrap(), want);
            }
        }
    }

    #[test]
    fn products_positive_rank_one() {
        let u = a1();
        let labels: Vec<DotLabel> = (-2..=2).flat_map(|z| u.labels(&[z], 2).unwrap()).collect();
        let mut tally = Tally::new();
        let mut products = 0;
        for a in &labels {
            for b in &labels {
                if u.output_of(b) != a.zeta {
                    continue;
                }
                products += 1;
                tally.merge(&u.verify_positivity(a, b).unwrap());
            }
        }
        assert!(products > 50);
        assert!(tally.passed(), "{:?}", tally.counterexample);
    }

    #[test]
    fn action_on_simple_modules() {
        let u = a1();
        let m = u.base.simple_hw(&[3], 64).unwrap();
        let lw = u.base.simple_lw(&[2], 64).unwrap();
        for z in -3..=3 {
            for l in u.labels(&[z], 2).unwrap() {
                let t = u.verify_action(&m, &l).unwrap();
                assert!(t.passed(), "{:?}", t.counterexample);
                let t = u.verify_action(&lw, &l).unwrap();
                assert!(t.passed(), "{:?}", t.counterexample);
            }
        }
    }

    #[test]
    fn spherical_parabolic_membership() {
        let u = a1();
        let f_only = one_term(&u, 0, 0, 2);
        assert_eq!(u.is_spherical_parabolic(&f_only), Some(Parabolic::Plus(vec![])));
        let e_only = one_term(&u, 2, 0, 0);
        assert_eq!(u.is_spherical_parabolic(&e_only), Some(Parabolic::Omega(vec![])));
        let both = one_term(&u, 1, 0, 1);
        assert_eq!(u.is_spherical_parabolic(&both), Some(Parabolic::Plus(vec![0])));
        let aff = crate::datum::CartanDatum::new(vec!["1".into(), "2".into()], vec![vec![2, -2], vec![-2, 2]]).unwrap();
        let u = Udot::new(RootDatum::simply_connected(aff));
        let mut x = UdotElement::zero();
        x.add_term(Term { mid: vec![0, 0], x: (vec![1, 1], 0), y: (vec![1, 1], 0) }, &Laurent::one());
        assert_eq!(u.is_spherical_parabolic(&x), None);
        let mut y = UdotElement::zero();
        y.add_term(Term { mid: vec![0, 0], x: (vec![1, 1], 0), y: (vec![1, 0], 0) }, &Laurent::one());
        assert_eq!(u.is_spherical_parabolic(&y), Some(Parabolic::Omega(vec![0])));
    }
}
