//! Cartan data, root data, Weyl words and the thickening construction.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// Index of a generator in `I`.
pub type Gen = usize;
/// Element of `X` in coordinates.
pub type Weight = Vec<i64>;
/// Element of `ℤ[I]` in coordinates.
pub type Root = Vec<i64>;
/// Word `s_{w₁}⋯s_{wₙ}` in the simple reflections.
pub type WeylWord = Vec<Gen>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DatumError {
    #[error("matrix is not square of size {0}")]
    Shape(usize),
    #[error("i·i must be 2 at generator {0}")]
    Diagonal(String),
    #[error("form not symmetric at ({0}, {1})")]
    Asymmetric(String, String),
    #[error("positive off-diagonal entry at ({0}, {1})")]
    OffDiagonal(String, String),
    #[error("duplicate generator label {0}")]
    DuplicateLabel(String),
    #[error("pairing must be a unimodular square matrix")]
    Pairing,
    #[error("⟨i,j⟩ differs from i·j at ({0}, {1})")]
    Compatibility(String, String),
    #[error("image of I in Y is not linearly independent")]
    Dependent,
    #[error("coordinate vector has wrong length for {0}")]
    Coordinates(String),
    #[error("weight is not dominant")]
    NotDominant,
    #[error("datum cannot be thickened: no x with ⟨j,x⟩ = -δ for generator {0}")]
    NotThickenable(String),
}

/// Symmetric Cartan datum `(I, ·)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartanDatum {
    pub gens: Vec<String>,
    pub form: Vec<Vec<i64>>,
}

impl CartanDatum {
    pub fn new(gens: Vec<String>, form: Vec<Vec<i64>>) -> Result<Self, DatumError> {
        let n = gens.len();
        if form.len() != n || form.iter().any(|r| r.len() != n) {
            return Err(DatumError::Shape(n));
        }
        for i in 0..n {
            if gens[..i].contains(&gens[i]) {
                return Err(DatumError::DuplicateLabel(gens[i].clone()));
            }
            if form[i][i] != 2 {
                return Err(DatumError::Diagonal(gens[i].clone()));
            }
            for j in 0..n {
                if form[i][j] != form[j][i] {
                    return Err(DatumError::Asymmetric(gens[i].clone(), gens[j].clone()));
                }
                if i != j && form[i][j] > 0 {
                    return Err(DatumError::OffDiagonal(gens[i].clone(), gens[j].clone()));
                }
            }
        }
        Ok(CartanDatum { gens, form })
    }

    /// Type `Aₙ` with generators `1..n`.
    pub fn type_a(n: usize) -> Self {
        let gens = (1..=n).map(|k| format!("{}", k)).collect();
        let form = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 2 } else if i.abs_diff(j) == 1 { -1 } else { 0 }).collect())
            .collect();
        CartanDatum { gens, form }
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn dot(&self, i: Gen, j: Gen) -> i64 {
        self.form[i][j]
    }

    pub fn index_of(&self, label: &str) -> Option<Gen> {
        self.gens.iter().position(|g| g == label)
    }

    /// `i·ν` for `ν ∈ ℤ[I]`.
    pub fn dot_root(&self, i: Gen, nu: &[i64]) -> i64 {
        self.form[i].iter().zip(nu).map(|(a, b)| a * b).sum()
    }

    /// `μ·ν` on `ℤ[I]`.
    pub fn root_form(&self, mu: &[i64], nu: &[i64]) -> i64 {
        (0..self.rank()).map(|i| mu[i] * self.dot_root(i, nu)).sum()
    }

    /// Simple reflection on `ℤ[I]`.
    pub fn reflect_root(&self, j: Gen, alpha: &mut [i64]) {
        let c = self.dot_root(j, alpha);
        alpha[j] -= c;
    }

    /// Whether `s_i w < w`: `w⁻¹αᵢ` is a negative root.
    pub fn descent(&self, i: Gen, w: &[Gen]) -> bool {
        let mut a = vec![0i64; self.rank()];
        a[i] = 1;
        for &j in w {
            self.reflect_root(j, &mut a);
        }
        a.iter().all(|&x| x <= 0)
    }

    /// `w` applied to `α ∈ ℤ[I]`.
    pub fn act_root(&self, w: &[Gen], alpha: &[i64]) -> Root {
        let mut a = alpha.to_vec();
        for &j in w.iter().rev() {
            self.reflect_root(j, &mut a);
        }
        a
    }

    /// Demazure product `w₁ ∗ w₂`, computed letter by letter.
    pub fn demazure_product(&self, w1: &[Gen], w2: &[Gen]) -> WeylWord {
        let mut w = self.reduce_word(w2);
        for &s in self.reduce_word(w1).iter().rev() {
            if !self.descent(s, &w) {
                w.insert(0, s);
            }
        }
        w
    }

    /// Whether `W_J` is finite: the form on `J` is positive definite.
    pub fn is_spherical(&self, j: &[Gen]) -> bool {
        let m: Vec<Vec<i128>> = j.iter().map(|&a| j.iter().map(|&b| self.form[a][b] as i128).collect()).collect();
        leading_minors(&m).iter().all(|&d| d > 0)
    }

    /// Whether two words act identically on `ℤ[I]`.
    pub fn same_element(&self, w1: &[Gen], w2: &[Gen]) -> bool {
        (0..self.rank()).all(|i| {
            let mut e = vec![0i64; self.rank()];
            e[i] = 1;
            self.act_root(w1, &e) == self.act_root(w2, &e)
        })
    }

    /// A reduced word for the same Weyl group element.
    pub fn reduce_word(&self, w: &[Gen]) -> WeylWord {
        let mut r: WeylWord = Vec::new();
        for &s in w.iter().rev() {
            if self.descent(s, &r) {
                let mut sr = vec![s];
                sr.extend(&r);
                let k = (0..r.len())
                    .find(|&k| {
                        let mut c = r.clone();
                        c.remove(k);
                        self.same_element(&c, &sr)
                    })
                    .expect("exchange property");
                r.remove(k);
            } else {
                r.insert(0, s);
            }
        }
        r
    }

    /// Whether `w` is a reduced word (every prefix lengthens).
    pub fn is_reduced(&self, w: &[Gen]) -> bool {
        (0..w.len()).all(|k| !self.descent(w[k], &w[k + 1..]))
    }
}

/// Leading principal minors by fraction-free elimination.
pub fn leading_minors(m: &[Vec<i128>]) -> Vec<i128> {
    let n = m.len();
    let mut a = m.to_vec();
    let mut out = Vec::with_capacity(n);
    let mut prev = 1i128;
    for k in 0..n {
        let d = a[k][k];
        out.push(d);
        if d == 0 {
            // Remaining minors need the full determinant.
            for r in k + 1..n {
                let sub: Vec<Vec<i128>> = m[..=r].iter().map(|row| row[..=r].to_vec()).collect();
                out.push(det(&sub));
            }
            return out;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * d - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = d;
    }
    out
}

/// Determinant by fraction-free elimination with pivoting.
pub fn det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a = m.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| a[r][k] != 0) else { return 0 };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Root datum of type `(I, ·)`: lattices `Y`, `X`, a perfect pairing and the
/// embeddings of `I`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootDatum {
    pub cartan: CartanDatum,
    pub rank_y: usize,
    pub rank_x: usize,
    /// `rank_y × rank_x`.
    pub pairing: Vec<Vec<i64>>,
    pub embed_y: Vec<Vec<i64>>,
    pub embed_x: Vec<Vec<i64>>,
    /// `⟨i,·⟩` as a row vector on `X`, per generator.
    rows: Vec<Vec<i64>>,
}

impl RootDatum {
    pub fn new(
        cartan: CartanDatum,
        rank_y: usize,
        rank_x: usize,
        pairing: Vec<Vec<i64>>,
        embed_y: Vec<Vec<i64>>,
        embed_x: Vec<Vec<i64>>,
    ) -> Result<Self, DatumError> {
        let n = cartan.rank();
        if rank_y != rank_x || pairing.len() != rank_y || pairing.iter().any(|r| r.len() != rank_x) {
            return Err(DatumError::Pairing);
        }
        let pm: Vec<Vec<i128>> = pairing.iter().map(|r| r.iter().map(|&a| a as i128).collect()).collect();
        if det(&pm).abs() != 1 {
            return Err(DatumError::Pairing);
        }
        for (k, g) in cartan.gens.iter().enumerate() {
            if embed_y.get(k).map(|v| v.len()) != Some(rank_y) || embed_x.get(k).map(|v| v.len()) != Some(rank_x) {
                return Err(DatumError::Coordinates(g.clone()));
            }
        }
        if embed_y.len() != n || embed_x.len() != n {
            return Err(DatumError::Coordinates(String::from("I")));
        }
        let rows: Vec<Vec<i64>> =
            embed_y.iter().map(|y| (0..rank_x).map(|c| (0..rank_y).map(|r| y[r] * pairing[r][c]).sum()).collect()).collect();
        for i in 0..n {
            for j in 0..n {
                let p: i64 = rows[i].iter().zip(&embed_x[j]).map(|(a, b)| a * b).sum();
                if p != cartan.dot(i, j) {
                    return Err(DatumError::Compatibility(cartan.gens[i].clone(), cartan.gens[j].clone()));
                }
            }
        }
        if int_rank(&embed_y) != n {
            return Err(DatumError::Dependent);
        }
        Ok(RootDatum { cartan, rank_y, rank_x, pairing, embed_y, embed_x, rows })
    }

    /// `Y = ℤ[I]`, `X = Hom(Y, ℤ)`, `⟨i,λ⟩ = λᵢ`.
    pub fn simply_connected(cartan: CartanDatum) -> Self {
        let n = cartan.rank();
        let id: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        let embed_x = cartan.form.clone();
        RootDatum::new(cartan, n, n, id.clone(), id, embed_x).expect("simply connected datum is valid")
    }

    pub fn type_a(n: usize) -> Self {
        Self::simply_connected(CartanDatum::type_a(n))
    }

    pub fn rank(&self) -> usize {
        self.cartan.rank()
    }

    /// `⟨i,λ⟩`.
    pub fn pair(&self, i: Gen, lambda: &[i64]) -> i64 {
        self.rows[i].iter().zip(lambda).map(|(a, b)| a * b).sum()
    }

    /// `⟨μ,λ⟩` for `μ ∈ Y`.
    pub fn pair_y(&self, mu: &[i64], lambda: &[i64]) -> i64 {
        (0..self.rank_y).map(|r| mu[r] * (0..self.rank_x).map(|c| self.pairing[r][c] * lambda[c]).sum::<i64>()).sum()
    }

    /// Image of `ν ∈ ℤ[I]` in `X`.
    pub fn root_to_x(&self, nu: &[i64]) -> Weight {
        let mut x = vec![0i64; self.rank_x];
        for (i, &a) in nu.iter().enumerate() {
            if a != 0 {
                for (xc, &e) in x.iter_mut().zip(&self.embed_x[i]) {
                    *xc += a * e;
                }
            }
        }
        x
    }

    pub fn zero_weight(&self) -> Weight {
        vec![0; self.rank_x]
    }

    pub fn is_dominant(&self, lambda: &[i64]) -> bool {
        (0..self.rank()).all(|i| self.pair(i, lambda) >= 0)
    }

    /// Weight with `⟨i,λ⟩ = cᵢ`, if the pairings determine one in `X`.
    pub fn weight_with_pairings(&self, c: &[i64]) -> Option<Weight> {
        solve_integer(&self.rows, c)
    }

    /// `s_i λ = λ - ⟨i,λ⟩ i_X`.
    pub fn reflect(&self, i: Gen, lambda: &[i64]) -> Weight {
        let c = self.pair(i, lambda);
        lambda.iter().zip(&self.embed_x[i]).map(|(a, b)| a - c * b).collect()
    }

    /// `w λ`.
    pub fn act(&self, w: &[Gen], lambda: &[i64]) -> Weight {
        let mut l = lambda.to_vec();
        for &i in w.iter().rev() {
            l = self.reflect(i, &l);
        }
        l
    }

    /// The thickened datum on `I ⊔ I′`.
    pub fn thicken(&self) -> Result<Thickening, DatumError> {
        let n = self.rank();
        let (ry, rx) = (self.rank_y, self.rank_x);
        let mut gens = self.cartan.gens.clone();
        for g in &self.cartan.gens {
            let mut p = format!("{}'", g);
            while gens.contains(&p) {
                p.push('\'');
            }
            gens.push(p);
        }
        let mut form = vec![vec![0i64; 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..n {
                form[i][j] = self.cartan.dot(i, j);
            }
            form[i][n + i] = -1;
            form[n + i][i] = -1;
            form[n + i][n + i] = 2;
        }
        let cartan = CartanDatum::new(gens, form)?;
        let mut pairing = vec![vec![0i64; rx + n]; ry + n];
        for r in 0..ry {
            pairing[r][..rx].copy_from_slice(&self.pairing[r]);
        }
        for k in 0..n {
            pairing[ry + k][rx + k] = 1;
        }
        let mut embed_y = Vec::with_capacity(2 * n);
        let mut embed_x = Vec::with_capacity(2 * n);
        for i in 0..n {
            let mut y = self.embed_y[i].clone();
            y.resize(ry + n, 0);
            embed_y.push(y);
            let mut x = self.embed_x[i].clone();
            x.resize(rx + n, 0);
            x[rx + i] = -1;
            embed_x.push(x);
        }
        let mut prime_x = Vec::with_capacity(n);
        for i in 0..n {
            let mut y = vec![0i64; ry + n];
            y[ry + i] = 1;
            embed_y.push(y);
            let target: Vec<i64> = (0..n).map(|j| -i64::from(i == j)).collect();
            let xb = self
                .weight_with_pairings(&target)
                .ok_or_else(|| DatumError::NotThickenable(self.cartan.gens[i].clone()))?;
            let mut x = xb.clone();
            x.resize(rx + n, 0);
            x[rx + i] = 2;
            embed_x.push(x);
            prime_x.push(xb);
        }
        let thick = RootDatum::new(cartan, ry + n, rx + n, pairing, embed_y, embed_x)?;
        Ok(Thickening { base: self.clone(), thick, prime_x })
    }
}

/// Rank of an integer matrix (rows), exact.
fn int_rank(m: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, p);
        for r in rank + 1..a.len() {
            let f = a[r][c];
            let g = a[rank][c];
            if f != 0 {
                for k in 0..cols {
                    a[r][k] = a[r][k] * g - a[rank][k] * f;
                }
                let content = a[r].iter().fold(0i128, |x, &y| gcd128(x, y));
                if content > 1 {
                    for x in a[r].iter_mut() {
                        *x /= content;
                    }
                }
            }
        }
        rank += 1;
    }
    rank
}

fn gcd128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Integer solution of `R x = b` (`R` given by rows), via column Hermite
/// reduction.
pub fn solve_integer(rows: &[Vec<i64>], b: &[i64]) -> Option<Vec<i64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    // Work on columns: R·U = H with U unimodular.
    let mut h: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut u: Vec<Vec<i128>> = (0..m).map(|i| (0..m).map(|j| i128::from(i == j)).collect()).collect();
    let mut piv_cols = Vec::new();
    let mut col = 0;
    for r in 0..n {
        if col >= m {
            break;
        }
        // Euclid across columns col.. on row r.
        loop {
            let nz: Vec<usize> = (col..m).filter(|&c| h[r][c] != 0).collect();
            if nz.len() <= 1 {
                if let Some(&c) = nz.first() {
                    swap_cols(&mut h, &mut u, c, col);
                }
                break;
            }
            let &best = nz.iter().min_by_key(|&&c| h[r][c].abs()).unwrap();
            swap_cols(&mut h, &mut u, best, col);
            for c in col + 1..m {
                let q = h[r][c] / h[r][col];
                if q != 0 {
                    for row in h.iter_mut() {
                        row[c] -= q * row[col];
                    }
                    for row in u.iter_mut() {
                        row[c] -= q * row[col];
                    }
                }
            }
        }
        if h[r][col] != 0 {
            piv_cols.push((r, col));
            col += 1;
        }
    }
    // Forward substitution: H z = b.
    let mut z = vec![0i128; m];
    let mut pi = 0;
    for r in 0..n {
        let mut s = b[r] as i128;
        for c in 0..m {
            s -= h[r][c] * z[c];
        }
        if pi < piv_cols.len() && piv_cols[pi].0 == r {
            let c = piv_cols[pi].1;
            // z[c] was zero in the sum above.
            if s % h[r][c] != 0 {
                return None;
            }
            z[c] = s / h[r][c];
            pi += 1;
        } else if s != 0 {
            return None;
        }
    }
    let x: Vec<i64> =
        (0..m).map(|i| i64::try_from((0..m).map(|j| u[i][j] * z[j]).sum::<i128>()).ok()).collect::<Option<_>>()?;
    Some(x)
}

fn swap_cols(h: &mut [Vec<i128>], u: &mut [Vec<i128>], a: usize, b: usize) {
    if a != b {
        for row in h.iter_mut() {
            row.swap(a, b);
        }
        for row in u.iter_mut() {
            row.swap(a, b);
        }
    }
}

/// A root datum together with its thickening `Ĩ = I ⊔ I′`; generator `i′` has
/// index `i + |I|` in the thickened datum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thickening {
    pub base: RootDatum,
    pub thick: RootDatum,
    /// `X`-part of the image of `i′` in `X̃ = X ⊕ ℤ^{I′}`.
    prime_x: Vec<Vec<i64>>,
}

impl Thickening {
    pub fn n(&self) -> usize {
        self.base.rank()
    }

    /// Index of `i′`.
    pub fn prime(&self, i: Gen) -> Gen {
        self.n() + i
    }

    /// Base weight as an element of `X̃ = X ⊕ ℤ^{I′}`.
    pub fn embed_weight(&self, lambda: &[i64]) -> Weight {
        let mut x = lambda.to_vec();
        x.resize(self.thick.rank_x, 0);
        x
    }

    /// `ζ⊙λ`.
    pub fn odot(&self, zeta: &[i64], lambda: &[i64]) -> Result<Weight, DatumError> {
        if !self.base.is_dominant(lambda) {
            return Err(DatumError::NotDominant);
        }
        let n = self.n();
        let rx = self.base.rank_x;
        let mut x: Weight = zeta.iter().zip(lambda).map(|(a, b)| a + b).collect();
        let mut tail = Vec::with_capacity(n);
        for i in 0..n {
            let c = self.base.pair(i, lambda);
            for (xc, &e) in x.iter_mut().zip(&self.prime_x[i]) {
                *xc += c * e;
            }
            tail.push(c);
        }
        debug_assert_eq!(x.len(), rx);
        x.extend(tail);
        Ok(x)
    }

    /// `|θ_λ| = Σ ⟨i,λ⟩ i′ ∈ ℤ[Ĩ]`.
    pub fn theta_weight(&self, lambda: &[i64]) -> Root {
        let n = self.n();
        let mut r = vec![0i64; 2 * n];
        for i in 0..n {
            r[n + i] = self.base.pair(i, lambda);
        }
        r
    }

    /// Base element of `ℤ[I]` inside `ℤ[Ĩ]`.
    pub fn embed_root(&self, nu: &[i64]) -> Root {
        let mut r = nu.to_vec();
        r.resize(2 * self.n(), 0);
        r
    }
}

/// The tower `I ⊂ Ĩ ⊂ Ĩ² ⊂ ⋯` of iterated thickenings.
#[derive(Debug, Clone)]
pub struct Tower {
    pub levels: Vec<Thickening>,
}

impl Tower {
    /// `depth` successive thickenings of `d`.
    pub fn new(d: &RootDatum, depth: usize) -> Result<Self, DatumError> {
        let mut levels: Vec<Thickening> = Vec::with_capacity(depth);
        let mut cur = d.clone();
        for _ in 0..depth {
            let t = cur.thicken()?;
            cur = t.thick.clone();
            levels.push(t);
        }
        Ok(Tower { levels })
    }

    /// `λ₁⊙λ₂⊙⋯⊙λₙ = (λ₁⊙⋯⊙λₙ₋₁) ⊙ (0⊙⋯⊙0⊙λₙ)`; needs `n - 1` levels.
    pub fn odot(&self, lambdas: &[Weight]) -> Result<Weight, DatumError> {
        let n = lambdas.len();
        assert!(n >= 1 && self.levels.len() + 1 >= n, "tower too short");
        if n == 1 {
            return Ok(lambdas[0].clone());
        }
        let left = self.odot(&lambdas[..n - 1])?;
        let mut right = lambdas[n - 1].clone();
        for k in 0..n - 2 {
            let zero = self.levels[k].base.zero_weight();
            right = self.levels[k].odot(&zero, &right)?;
        }
        self.levels[n - 2].odot(&left, &right)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn validation() {
        assert!(CartanDatum::new(vec!["a".into()], vec![vec![3]]).is_err());
        assert!(CartanDatum::new(vec!["a".into(), "b".into()], vec![vec![2, -1], vec![0, 2]]).is_err());
        assert!(CartanDatum::new(vec!["a".into(), "b".into()], vec![vec![2, 1], vec![1, 2]]).is_err());
        let c = CartanDatum::type_a(2);
        assert!(RootDatum::new(c.clone(), 2, 2, vec![vec![2, 0], vec![0, 1]], vec![vec![1, 0], vec![0, 1]], c.form.clone()).is_err());
    }

    #[test]
    fn thicken_a1_is_a2() {
        let t = RootDatum::type_a(1).thicken().unwrap();
        assert_eq!(t.thick.cartan.form, vec![vec![2, -1], vec![-1, 2]]);
        assert_eq!(t.thick.cartan.gens, vec!["1", "1'"]);
    }

    #[test]
    fn thicken_a2_is_path() {
        let t = RootDatum::type_a(2).thicken().unwrap();
        let f = &t.thick.cartan.form;
        // 1'–1–2–2'
        assert_eq!(f[2][0], -1);
        assert_eq!(f[0][1], -1);
        assert_eq!(f[1][3], -1);
        assert_eq!(f[2][3], 0);
        assert_eq!(f[2][1], 0);
        assert!(t.thick.cartan.is_spherical(&[0, 1, 2, 3]));
        assert_eq!(leading_minors(&[vec![2, -1, 0, 0], vec![-1, 2, -1, 0], vec![0, -1, 2, -1], vec![0, 0, -1, 2]]), vec![2, 3, 4, 5]);
    }

    #[test]
    fn double_thickening() {
        let tw = Tower::new(&RootDatum::type_a(1), 2).unwrap();
        assert_eq!(tw.levels[1].thick.rank(), 4);
        assert_eq!(tw.levels[1].thick.cartan.form[0][1], -1);
        assert_eq!(tw.levels[1].thick.cartan.form[0][0], 2);
    }

    #[test]
    fn odot_a1() {
        let t = RootDatum::type_a(1).thicken().unwrap();
        let w = t.odot(&[-3], &[2]).unwrap();
        assert_eq!(t.thick.pair(0, &w), -3);
        assert_eq!(t.thick.pair(1, &w), 2);
        assert_eq!(t.odot(&[0], &[0]).unwrap(), vec![0, 0]);
        assert_eq!(t.odot(&[0], &[-1]), Err(DatumError::NotDominant));
        let d = t.odot(&[1], &[2]).unwrap();
        assert!(t.thick.is_dominant(&d));
    }

    #[test]
    fn odot_non_simply_connected() {
        // A₁ with Y = X = ℤ², i = (1,1) ∈ Y.
        let c = CartanDatum::type_a(1);
        let d = RootDatum::new(c, 2, 2, vec![vec![1, 0], vec![0, 1]], vec![vec![1, 1]], vec![vec![1, 1]]).unwrap();
        let t = d.thicken().unwrap();
        let lam = vec![2, 1];
        let w = t.odot(&[0, 0], &lam).unwrap();
        assert_eq!(t.thick.pair(1, &w), 3);
        assert_eq!(t.thick.pair(0, &w), 0);
        // ⟨μ, ζ⊙λ⟩ = ⟨μ, ζ+λ+|θ_λ|⟩ on Y.
        let th = t.thick.root_to_x(&t.theta_weight(&lam));
        for mu in [vec![1, 0, 0], vec![0, 1, 0]] {
            let rhs: i64 = (0..2).map(|k| mu[k] * (lam[k] + th[k])).sum();
            assert_eq!(t.thick.pair_y(&mu, &w), rhs);
        }
    }

    #[test]
    fn descents() {
        let a1 = CartanDatum::type_a(1);
        assert!(!a1.descent(0, &[]));
        assert!(a1.descent(0, &[0]));
        let a2 = CartanDatum::type_a(2);
        assert!(!a2.descent(0, &[1, 0]));
        assert!(a2.descent(1, &[1, 0]));
    }

    #[test]
    fn demazure_products() {
        let a1 = CartanDatum::type_a(1);
        assert_eq!(a1.demazure_product(&[], &[0]), vec![0]);
        assert_eq!(a1.demazure_product(&[0], &[0]), vec![0]);
        let a2 = CartanDatum::type_a(2);
        assert_eq!(a2.demazure_product(&[0, 1], &[0]), vec![0, 1, 0]);
    }

    #[test]
    fn spherical() {
        let c = CartanDatum::new(vec!["1".into(), "2".into()], vec![vec![2, -2], vec![-2, 2]]).unwrap();
        assert!(!c.is_spherical(&[0, 1]));
        assert!(c.is_spherical(&[0]));
        assert!(c.is_spherical(&[]));
        assert!(CartanDatum::type_a(4).is_spherical(&[0, 1, 2, 3]));
    }

    fn word(n: usize, len: usize) -> impl Strategy<Value = Vec<usize>> {
        proptest::collection::vec(0..n, 0..=len)
    }

    proptest! {
        #[test]
        fn descent_exclusive(w in word(3, 6), i in 0usize..3) {
            let c = CartanDatum::type_a(3);
            let mut sw = vec![i];
            sw.extend(&w);
            prop_assert!(c.descent(i, &w) ^ c.descent(i, &sw));
        }

        #[test]
        fn demazure_associative(a in word(3, 4), b in word(3, 4), d in word(3, 4)) {
            let c = CartanDatum::type_a(3);
            let l = c.demazure_product(&c.demazure_product(&a, &b), &d);
            let r = c.demazure_product(&a, &c.demazure_product(&b, &d));
            prop_assert!(c.same_element(&l, &r));
        }

        #[test]
        fn odot_restricts_to_zeta(z in proptest::collection::vec(-4i64..5, 2), l in proptest::collection::vec(0i64..4, 2)) {
            let t = RootDatum::type_a(2).thicken().unwrap();
            let w = t.odot(&z, &l).unwrap();
            for i in 0..2 {
                prop_assert_eq!(t.thick.pair(i, &w), z[i]);
                prop_assert_eq!(t.thick.pair(t.prime(i), &w), l[i]);
            }
            // base pairing is the restriction
            prop_assert_eq!(t.thick.pair(0, &t.embed_weight(&z)), t.base.pair(0, &z));
        }

        #[test]
        fn reflection_involutive(l in proptest::collection::vec(-4i64..5, 3), i in 0usize..3) {
            let d = RootDatum::type_a(3);
            prop_assert_eq!(d.reflect(i, &d.reflect(i, &l)), l.clone());
            prop_assert_eq!(d.pair(i, &d.reflect(i, &l)), -d.pair(i, &l));
        }
    }
}
