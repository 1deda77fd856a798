//! Exact coefficients: `ℤ[v,v⁻¹]`, `ℚ(v)`, quantum numbers and lattice tests.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::{BigInt, Sign};

use crate::linalg::modp;

/// Integer Laurent polynomial in `v`, stored densely from its lowest exponent.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Laurent {
    lo: i32,
    c: Vec<i64>,
}

#[inline]
fn ck_add(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("coefficient overflow")
}

#[inline]
fn ck_mul(a: i64, b: i64) -> i64 {
    a.checked_mul(b).expect("coefficient overflow")
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent { lo: 0, c: Vec::new() }
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn int(a: i64) -> Self {
        Self::mono(a, 0)
    }

    /// `a·v^e`.
    pub fn mono(a: i64, e: i32) -> Self {
        if a == 0 {
            Self::zero()
        } else {
            Laurent { lo: e, c: vec![a] }
        }
    }

    /// `v^e`.
    pub fn v(e: i32) -> Self {
        Self::mono(1, e)
    }

    /// Builds from `(exponent, coefficient)` pairs; repeated exponents add up.
    pub fn from_terms<I: IntoIterator<Item = (i32, i64)>>(terms: I) -> Self {
        let terms: Vec<(i32, i64)> = terms.into_iter().collect();
        if terms.is_empty() {
            return Self::zero();
        }
        let lo = terms.iter().map(|t| t.0).min().unwrap();
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut c = vec![0i64; (hi - lo + 1) as usize];
        for (e, a) in terms {
            let k = (e - lo) as usize;
            c[k] = ck_add(c[k], a);
        }
        Self::from_dense(lo, c)
    }

    pub(crate) fn from_dense(lo: i32, mut c: Vec<i64>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        let start = c.iter().position(|&a| a != 0).unwrap_or(c.len());
        if start == c.len() {
            return Self::zero();
        }
        if start > 0 {
            c.drain(..start);
        }
        Laurent { lo: lo + start as i32, c }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.lo == 0 && self.c.len() == 1 && self.c[0] == 1
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn low_deg(&self) -> Option<i32> {
        (!self.is_zero()).then_some(self.lo)
    }

    /// Highest exponent with a nonzero coefficient.
    pub fn deg(&self) -> Option<i32> {
        (!self.is_zero()).then(|| self.lo + self.c.len() as i32 - 1)
    }

    pub fn coeff(&self, e: i32) -> i64 {
        let k = e - self.lo;
        if k < 0 || k as usize >= self.c.len() {
            0
        } else {
            self.c[k as usize]
        }
    }

    pub fn leading_coeff(&self) -> i64 {
        self.c.last().copied().unwrap_or(0)
    }

    /// Nonzero terms as `(exponent, coefficient)`, increasing exponent.
    pub fn terms(&self) -> impl Iterator<Item = (i32, i64)> + '_ {
        self.c
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0)
            .map(move |(k, &a)| (self.lo + k as i32, a))
    }

    pub fn scale(&self, a: i64) -> Self {
        if a == 0 {
            return Self::zero();
        }
        Laurent { lo: self.lo, c: self.c.iter().map(|&x| ck_mul(x, a)).collect() }
    }

    /// Multiplies by `v^e`.
    pub fn shift(&self, e: i32) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Laurent { lo: self.lo + e, c: self.c.clone() }
    }

    /// The involution `v ↦ v⁻¹`.
    pub fn bar(&self) -> Self {
        match self.deg() {
            None => Self::zero(),
            Some(hi) => {
                let mut c = self.c.clone();
                c.reverse();
                Laurent { lo: -hi, c }
            }
        }
    }

    pub fn is_bar_invariant(&self) -> bool {
        *self == self.bar()
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut r = Self::one();
        for _ in 0..n {
            r = &r * self;
        }
        r
    }

    /// Part with exponents `< 0`.
    pub fn neg_part(&self) -> Self {
        Self::from_terms(self.terms().filter(|t| t.0 < 0))
    }

    /// Part with exponents `>= 0`.
    pub fn nonneg_part(&self) -> Self {
        Self::from_terms(self.terms().filter(|t| t.0 >= 0))
    }

    /// Exact quotient, if `other` divides `self` in `ℤ[v,v⁻¹]`.
    pub fn div_exact(&self, other: &Laurent) -> Option<Laurent> {
        assert!(!other.is_zero(), "division by zero");
        if self.is_zero() {
            return Some(Self::zero());
        }
        let dtop = other.leading_coeff();
        let dhi = other.deg().unwrap();
        let qlo = self.lo - other.lo;
        let mut r = self.clone();
        let mut q: Vec<(i32, i64)> = Vec::new();
        while let Some(rhi) = r.deg() {
            let e = rhi - dhi;
            if e < qlo {
                return None;
            }
            let top = r.leading_coeff();
            if top % dtop != 0 {
                return None;
            }
            let t = top / dtop;
            q.push((e, t));
            r = &r - &other.scale(t).shift(e);
        }
        Some(Self::from_terms(q))
    }

    /// Value at `x` modulo the fixed prime; `xinv` is the inverse of `x`.
    pub fn eval_mod(&self, x: u64, xinv: u64) -> u64 {
        if self.is_zero() {
            return 0;
        }
        let mut acc = 0u64;
        for &a in self.c.iter().rev() {
            acc = modp::add(modp::mul(acc, x), modp::from_i64(a));
        }
        let base = if self.lo >= 0 { modp::pow(x, self.lo as u64) } else { modp::pow(xinv, (-self.lo) as u64) };
        modp::mul(acc, base)
    }

    /// Polynomial part after removing `v^lo`: returns `(lo, ascending coefficients)`.
    pub(crate) fn dense(&self) -> (i32, &[i64]) {
        (self.lo, &self.c)
    }

    /// Nonnegative-degree part of the `v⁻¹`-expansion of `self/den`,
    /// where `den` has leading coefficient `±1`.
    pub fn series_nonneg_part(&self, den: &Laurent) -> Laurent {
        let dtop = den.leading_coeff();
        assert!(dtop == 1 || dtop == -1, "denominator must be monic");
        let dhi = den.deg().unwrap();
        let mut r = self.clone();
        let mut q: Vec<(i32, i64)> = Vec::new();
        while let Some(rhi) = r.deg() {
            let e = rhi - dhi;
            if e < 0 {
                break;
            }
            let t = r.leading_coeff() * dtop;
            q.push((e, t));
            r = &r - &den.scale(t).shift(e);
        }
        Self::from_terms(q)
    }
}

impl From<i64> for Laurent {
    fn from(a: i64) -> Self {
        Laurent::int(a)
    }
}

fn add_into(lo: i32, c: &mut Vec<i64>, o: &Laurent, sign: i64) -> i32 {
    // Returns new lo; `c` extended in place.
    if o.is_zero() {
        return lo;
    }
    let mut lo = lo;
    if c.is_empty() {
        c.extend(o.c.iter().map(|&a| a * sign));
        return o.lo;
    }
    if o.lo < lo {
        let pad = (lo - o.lo) as usize;
        let mut nc = vec![0i64; pad];
        nc.extend_from_slice(c);
        *c = nc;
        lo = o.lo;
    }
    let off = (o.lo - lo) as usize;
    if c.len() < off + o.c.len() {
        c.resize(off + o.c.len(), 0);
    }
    for (k, &a) in o.c.iter().enumerate() {
        c[off + k] = ck_add(c[off + k], ck_mul(a, sign));
    }
    lo
}

impl<'a> Add<&'a Laurent> for &'a Laurent {
    type Output = Laurent;
    fn add(self, o: &Laurent) -> Laurent {
        let mut c = self.c.clone();
        let lo = add_into(self.lo, &mut c, o, 1);
        Laurent::from_dense(lo, c)
    }
}

impl<'a> Sub<&'a Laurent> for &'a Laurent {
    type Output = Laurent;
    fn sub(self, o: &Laurent) -> Laurent {
        let mut c = self.c.clone();
        let lo = add_into(self.lo, &mut c, o, -1);
        Laurent::from_dense(lo, c)
    }
}

impl Add for Laurent {
    type Output = Laurent;
    fn add(self, o: Laurent) -> Laurent {
        &self + &o
    }
}

impl Sub for Laurent {
    type Output = Laurent;
    fn sub(self, o: Laurent) -> Laurent {
        &self - &o
    }
}

impl AddAssign<&Laurent> for Laurent {
    fn add_assign(&mut self, o: &Laurent) {
        let mut c = core::mem::take(&mut self.c);
        let lo = add_into(self.lo, &mut c, o, 1);
        *self = Laurent::from_dense(lo, c);
    }
}

impl SubAssign<&Laurent> for Laurent {
    fn sub_assign(&mut self, o: &Laurent) {
        let mut c = core::mem::take(&mut self.c);
        let lo = add_into(self.lo, &mut c, o, -1);
        *self = Laurent::from_dense(lo, c);
    }
}

impl<'a> Mul<&'a Laurent> for &'a Laurent {
    type Output = Laurent;
    fn mul(self, o: &Laurent) -> Laurent {
        if self.is_zero() || o.is_zero() {
            return Laurent::zero();
        }
        let mut c = vec![0i64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] = ck_add(c[i + j], ck_mul(a, b));
            }
        }
        Laurent::from_dense(self.lo + o.lo, c)
    }
}

impl Mul for Laurent {
    type Output = Laurent;
    fn mul(self, o: Laurent) -> Laurent {
        &self * &o
    }
}

impl Neg for &Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        self.scale(-1)
    }
}

impl Neg for Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        self.scale(-1)
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, a) in self.terms().collect::<Vec<_>>().into_iter().rev() {
            if first {
                if a < 0 {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if a < 0 { " - " } else { " + " })?;
            }
            first = false;
            let m = a.unsigned_abs();
            if e == 0 {
                write!(f, "{}", m)?;
            } else {
                if m != 1 {
                    write!(f, "{}", m)?;
                }
                if e == 1 {
                    f.write_str("v")?;
                } else {
                    write!(f, "v^{}", e)?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("empty input")]
    Empty,
    #[error("malformed term `{0}`")]
    BadTerm(String),
    #[error("zero denominator")]
    ZeroDenominator,
}

fn parse_term(t: &str) -> Result<(i32, i64), ParseError> {
    let bad = || ParseError::BadTerm(String::from(t));
    let (neg, body) = match t.as_bytes().first() {
        Some(b'-') => (true, &t[1..]),
        Some(b'+') => (false, &t[1..]),
        _ => (false, t),
    };
    if body.is_empty() {
        return Err(bad());
    }
    let (coef_s, var_s) = match body.find('v') {
        Some(p) => (&body[..p], Some(&body[p + 1..])),
        None => (body, None),
    };
    let coef_s = coef_s.strip_suffix('*').unwrap_or(coef_s);
    let coef: i64 = if coef_s.is_empty() {
        if var_s.is_none() {
            return Err(bad());
        }
        1
    } else {
        coef_s.parse().map_err(|_| bad())?
    };
    let e: i32 = match var_s {
        None => 0,
        Some("") => 1,
        Some(s) => s.strip_prefix('^').ok_or_else(bad)?.parse().map_err(|_| bad())?,
    };
    Ok((e, if neg { -coef } else { coef }))
}

impl core::str::FromStr for Laurent {
    type Err = ParseError;
    /// Parses the text form `v^3 + 2 - v^-1`.
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(ParseError::Empty);
        }
        let bytes = s.as_bytes();
        let mut terms = Vec::new();
        let mut start = 0;
        for k in 1..bytes.len() {
            if (bytes[k] == b'+' || bytes[k] == b'-') && bytes[k - 1] != b'^' {
                terms.push(parse_term(&s[start..k])?);
                start = k;
            }
        }
        terms.push(parse_term(&s[start..])?);
        Ok(Laurent::from_terms(terms))
    }
}

// ---- integer polynomial helpers (ascending coefficients, big integers) ----

type Poly = Vec<BigInt>;

fn big_zero() -> BigInt {
    BigInt::from(0)
}

fn is_zero_big(a: &BigInt) -> bool {
    a.sign() == Sign::NoSign
}

fn p_trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(is_zero_big) {
        p.pop();
    }
    p
}

fn bgcd(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut a, mut b) = (BigInt::from(a.magnitude().clone()), BigInt::from(b.magnitude().clone()));
    while !is_zero_big(&b) {
        let t = &a % &b;
        a = b;
        b = t;
    }
    a
}

fn p_content(p: &[BigInt]) -> BigInt {
    p.iter().fold(big_zero(), |g, a| bgcd(&g, a))
}

fn p_primitive(p: &[BigInt]) -> Poly {
    let g = p_content(p);
    if is_zero_big(&g) {
        return Vec::new();
    }
    let s = if p.last().unwrap().sign() == Sign::Minus { -g } else { g };
    p.iter().map(|a| a / &s).collect()
}

fn p_prem(a: &[BigInt], b: &[BigInt]) -> Poly {
    let mut r: Poly = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        for x in r.iter_mut() {
            *x *= lb;
        }
        for (k, bk) in b.iter().enumerate() {
            r[shift + k] -= &lr * bk;
        }
        r = p_primitive(&p_trim(r));
    }
    r
}

fn p_gcd(a: &[BigInt], b: &[BigInt]) -> Poly {
    let mut x = p_primitive(a);
    let mut y = p_primitive(b);
    if x.is_empty() {
        return y;
    }
    while !y.is_empty() {
        if y.len() == 1 {
            return vec![BigInt::from(1)];
        }
        let r = p_prem(&x, &y);
        x = y;
        y = r;
    }
    p_primitive(&x)
}

fn p_div_exact(a: &[BigInt], b: &[BigInt]) -> Poly {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let mut q = vec![big_zero(); a.len().saturating_sub(db).max(1)];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let (t, rem) = (&r[dr] / &b[db], &r[dr] % &b[db]);
        assert!(is_zero_big(&rem), "inexact polynomial division");
        for (k, bk) in b.iter().enumerate() {
            r[dr - db + k] -= &t * bk;
        }
        q[dr - db] = t;
        r = p_trim(r);
    }
    assert!(r.is_empty(), "inexact polynomial division");
    p_trim(q)
}

fn to_poly(x: &Laurent) -> (i32, Poly) {
    let (lo, c) = x.dense();
    (lo, c.iter().map(|&a| BigInt::from(a)).collect())
}

fn from_poly(lo: i32, p: &[BigInt]) -> Laurent {
    Laurent::from_dense(lo, p.iter().map(|a| i64::try_from(a).expect("coefficient overflow")).collect())
}

/// Element of `ℚ(v)` as a reduced fraction.
///
/// Normal form: `den` is a polynomial with nonzero constant term and positive
/// leading coefficient, coprime to `num`; the integer contents of `num` and
/// `den` are coprime.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFn {
    num: Laurent,
    den: Laurent,
}

impl RationalFn {
    pub fn new(num: Laurent, den: Laurent) -> Self {
        if den.is_zero() {
            panic!("zero denominator");
        }
        if num.is_zero() {
            return Self::zero();
        }
        if den.c.len() == 1 {
            let d = den.c[0];
            if d == 1 || d == -1 {
                return RationalFn { num: num.scale(d).shift(-den.lo), den: Laurent::one() };
            }
        }
        let (nlo, n) = to_poly(&num);
        let (dlo, d) = to_poly(&den);
        let g = p_gcd(&n, &d);
        let (mut n, mut d) = if g.len() > 1 { (p_div_exact(&n, &g), p_div_exact(&d, &g)) } else { (n, d) };
        let cg = bgcd(&p_content(&n), &p_content(&d));
        let s = if d.last().unwrap().sign() == Sign::Minus { -cg } else { cg };
        for x in n.iter_mut() {
            *x /= &s;
        }
        for x in d.iter_mut() {
            *x /= &s;
        }
        RationalFn { num: from_poly(nlo - dlo, &n), den: from_poly(0, &d) }
    }

    pub fn zero() -> Self {
        RationalFn { num: Laurent::zero(), den: Laurent::one() }
    }

    pub fn one() -> Self {
        Self::from(Laurent::one())
    }

    pub fn num(&self) -> &Laurent {
        &self.num
    }

    pub fn den(&self) -> &Laurent {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The Laurent polynomial this equals, if any.
    pub fn as_laurent(&self) -> Option<&Laurent> {
        self.den.is_one().then_some(&self.num)
    }

    pub fn bar(&self) -> Self {
        RationalFn::new(self.num.bar(), self.den.bar())
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        RationalFn::new(self.den.clone(), self.num.clone())
    }

    pub fn mul_laurent(&self, a: &Laurent) -> Self {
        if self.den.is_one() {
            return RationalFn { num: &self.num * a, den: Laurent::one() };
        }
        RationalFn::new(&self.num * a, self.den.clone())
    }

    pub fn div_laurent(&self, a: &Laurent) -> Self {
        RationalFn::new(self.num.clone(), &self.den * a)
    }

    /// The `v⁻¹`-expansion coefficients for exponents `hi, hi-1, …` down to
    /// `hi - n + 1`, where `hi = deg num - deg den`; `None` at the first
    /// non-integral coefficient.
    pub fn series(&self, n: usize) -> (i32, Vec<Option<i64>>) {
        if self.is_zero() {
            return (0, vec![Some(0); n]);
        }
        let dtop = self.den.leading_coeff() as i128;
        let dhi = self.den.deg().unwrap();
        let top = self.num.deg().unwrap() - dhi;
        let mut r: Vec<(i32, i128)> = self.num.terms().map(|(e, a)| (e, a as i128)).collect();
        let dterms: Vec<(i32, i128)> = self.den.terms().map(|(e, a)| (e, a as i128)).collect();
        let mut out = Vec::with_capacity(n);
        let mut ok = true;
        for k in 0..n {
            let e = top - k as i32;
            if !ok {
                out.push(None);
                continue;
            }
            let want = e + dhi;
            let rc: i128 = r.iter().filter(|t| t.0 == want).map(|t| t.1).sum();
            if rc % dtop != 0 {
                ok = false;
                out.push(None);
                continue;
            }
            let q = rc / dtop;
            out.push(i64::try_from(q).ok());
            if q != 0 {
                for &(de, dc) in &dterms {
                    r.push((de + e, -q * dc));
                }
                r.sort_by_key(|a| a.0);
                let mut merged: Vec<(i32, i128)> = Vec::new();
                for (ex, c) in r.drain(..) {
                    match merged.last_mut() {
                        Some(last) if last.0 == ex => last.1 += c,
                        _ => merged.push((ex, c)),
                    }
                }
                r = merged.into_iter().filter(|t| t.1 != 0).collect();
            }
        }
        (top, out)
    }
}

impl From<Laurent> for RationalFn {
    fn from(a: Laurent) -> Self {
        RationalFn { num: a, den: Laurent::one() }
    }
}

impl From<i64> for RationalFn {
    fn from(a: i64) -> Self {
        RationalFn::from(Laurent::int(a))
    }
}

impl<'a> Add<&'a RationalFn> for &'a RationalFn {
    type Output = RationalFn;
    fn add(self, o: &RationalFn) -> RationalFn {
        if self.den == o.den {
            if self.den.is_one() {
                return RationalFn { num: &self.num + &o.num, den: Laurent::one() };
            }
            return RationalFn::new(&self.num + &o.num, self.den.clone());
        }
        RationalFn::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }
}

impl<'a> Sub<&'a RationalFn> for &'a RationalFn {
    type Output = RationalFn;
    fn sub(self, o: &RationalFn) -> RationalFn {
        self + &(-o)
    }
}

impl<'a> Mul<&'a RationalFn> for &'a RationalFn {
    type Output = RationalFn;
    fn mul(self, o: &RationalFn) -> RationalFn {
        if self.den.is_one() && o.den.is_one() {
            return RationalFn { num: &self.num * &o.num, den: Laurent::one() };
        }
        RationalFn::new(&self.num * &o.num, &self.den * &o.den)
    }
}

impl Neg for &RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        RationalFn { num: -&self.num, den: self.den.clone() }
    }
}

impl RationalFn {
    pub fn div(&self, o: &RationalFn) -> RationalFn {
        self * &o.inv()
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl core::str::FromStr for RationalFn {
    type Err = ParseError;
    /// Parses `p` or `(p)/(q)`.
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let t = s.trim();
        if let Some(rest) = t.strip_prefix('(') {
            if let Some(p) = rest.find(")/(") {
                let num: Laurent = rest[..p].parse()?;
                let den_s = rest[p + 3..].strip_suffix(')').ok_or_else(|| ParseError::BadTerm(String::from(t)))?;
                let den: Laurent = den_s.parse()?;
                if den.is_zero() {
                    return Err(ParseError::ZeroDenominator);
                }
                return Ok(RationalFn::new(num, den));
            }
        }
        Ok(RationalFn::from(t.parse::<Laurent>()?))
    }
}

impl PartialOrd for Laurent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Laurent {
    /// Arbitrary total order used for deterministic sorting.
    fn cmp(&self, other: &Self) -> Ordering {
        (self.lo, &self.c).cmp(&(other.lo, &other.c))
    }
}

/// `[n] = (vⁿ - v⁻ⁿ)/(v - v⁻¹)`.
pub fn quantum_int(n: i64) -> Laurent {
    let m = n.unsigned_abs() as i32;
    let s = if n < 0 { -1 } else { 1 };
    Laurent::from_terms((0..m).map(|k| (m - 1 - 2 * k, s)))
}

/// `[n]! = [1][2]⋯[n]`.
pub fn quantum_factorial(n: u32) -> Laurent {
    let mut r = Laurent::one();
    for k in 1..=n {
        r = &r * &quantum_int(k as i64);
    }
    r
}

/// Quantum binomial `[n choose k]`, for any integer `n`.
pub fn quantum_binomial(n: i64, k: u32) -> Laurent {
    let mut r = Laurent::one();
    for t in 1..=k as i64 {
        r = (&r * &quantum_int(n - t + 1)).div_exact(&quantum_int(t)).expect("quantum binomial is integral");
    }
    r
}

/// Membership predicates for coefficient lattices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lattice {
    /// `ℚ[[v⁻¹]] ∩ ℚ(v)` with integral expansion (checked to a truncation order).
    InA,
    /// `ℤ[v⁻¹]`.
    InZvinv,
    /// `v⁻¹ℤ[v⁻¹]`.
    InVinvZvinv,
    /// `ℕ[v,v⁻¹]`.
    InNvv,
    /// `ℕ[v⁻¹]`.
    InNvinv,
}

pub fn lattice_test(x: &RationalFn, kind: Lattice, trunc: usize) -> bool {
    match kind {
        Lattice::InA => {
            if x.is_zero() {
                return true;
            }
            let (top, coeffs) = x.series(trunc.max(1));
            if top > 0 {
                return false;
            }
            coeffs.iter().all(|c| c.is_some())
        }
        _ => {
            let Some(p) = x.as_laurent() else { return false };
            laurent_test(p, kind)
        }
    }
}

/// The polynomial predicates on a Laurent polynomial.
pub fn laurent_test(p: &Laurent, kind: Lattice) -> bool {
    let hi = p.deg().unwrap_or(i32::MIN);
    let nonneg = p.terms().all(|t| t.1 > 0);
    match kind {
        Lattice::InA | Lattice::InZvinv => hi <= 0,
        Lattice::InVinvZvinv => hi <= -1,
        Lattice::InNvv => nonneg,
        Lattice::InNvinv => nonneg && hi <= 0,
    }
}

/// Running summary of lattice tests over many coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    pub checked: usize,
    pub max_pos_deg: Option<i32>,
    pub min_neg_deg: Option<i32>,
    /// First failing coefficient with its context.
    pub counterexample: Option<String>,
}

impl Tally {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    /// Tests `c` against `kind`, recording degrees and the first failure.
    pub fn record<F: FnOnce() -> String>(&mut self, c: &Laurent, kind: Lattice, context: F) -> bool {
        self.checked += 1;
        if let Some(h) = c.deg() {
            self.max_pos_deg = Some(self.max_pos_deg.map_or(h, |m| m.max(h)));
        }
        if let Some(l) = c.low_deg() {
            self.min_neg_deg = Some(self.min_neg_deg.map_or(l, |m| m.min(l)));
        }
        let ok = laurent_test(c, kind);
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(alloc::format!("{}: {}", context(), c));
        }
        ok
    }

    /// Records a failure that is not a coefficient test.
    pub fn fail(&mut self, msg: String) {
        if self.counterexample.is_none() {
            self.counterexample = Some(msg);
        }
    }

    pub fn merge(&mut self, o: &Tally) {
        self.checked += o.checked;
        for (a, b, f) in [
            (&mut self.max_pos_deg, o.max_pos_deg, i32::max as fn(i32, i32) -> i32),
            (&mut self.min_neg_deg, o.min_neg_deg, i32::min),
        ] {
            if let Some(b) = b {
                *a = Some(a.map_or(b, |x| f(x, b)));
            }
        }
        if self.counterexample.is_none() {
            self.counterexample.clone_from(&o.counterexample);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn l(s: &str) -> Laurent {
        s.parse().unwrap()
    }

    #[test]
    fn quantum_integers() {
        assert!(quantum_int(0).is_zero());
        assert_eq!(quantum_int(2), l("v + v^-1"));
        assert_eq!(quantum_int(4), l("v^3 + v + v^-1 + v^-3"));
        assert_eq!(quantum_int(-3), -quantum_int(3));
    }

    #[test]
    fn quantum_binomials() {
        assert!(quantum_binomial(5, 0).is_one());
        assert_eq!(quantum_binomial(2, 1), quantum_int(2));
        assert_eq!(quantum_binomial(4, 2), l("v^4 + v^2 + 2 + v^-2 + v^-4"));
        assert!(quantum_binomial(2, 3).is_zero());
        for n in 0..=12 {
            for k in 0..=n {
                assert!(quantum_binomial(n as i64, k).is_bar_invariant());
            }
        }
        // [-1 choose k] = (-1)^k
        assert_eq!(quantum_binomial(-1, 3), Laurent::int(-1));
    }

    #[test]
    fn bar_examples() {
        let x = RationalFn::from(Laurent::v(2));
        assert_eq!(x.bar(), RationalFn::from(Laurent::v(-2)));
        let q3 = RationalFn::from(quantum_int(3));
        assert_eq!(q3.bar(), q3);
        let x = RationalFn::new(Laurent::one(), l("1 - v^-2"));
        let y = RationalFn::new(Laurent::one(), l("1 - v^2"));
        assert_eq!(x.bar(), y);
    }

    #[test]
    fn lattice_examples() {
        assert!(lattice_test(&l("v^-1 + v^-3").into(), Lattice::InVinvZvinv, 1));
        assert!(!lattice_test(&quantum_int(2).into(), Lattice::InZvinv, 1));
        let g = RationalFn::new(Laurent::one(), l("1 - v^-2"));
        assert!(lattice_test(&g, Lattice::InA, 8));
        assert!(!lattice_test(&g, Lattice::InZvinv, 8));
        let h = RationalFn::new(Laurent::one(), l("2 - v^-1"));
        assert!(!lattice_test(&h, Lattice::InA, 8));
        assert!(!lattice_test(&RationalFn::from(Laurent::v(1)), Lattice::InA, 8));
        assert!(lattice_test(&l("2v + 1 + v^-1").into(), Lattice::InNvv, 1));
        assert!(!lattice_test(&l("2v + 1").into(), Lattice::InNvinv, 1));
        assert!(lattice_test(&l("3 + v^-5").into(), Lattice::InNvinv, 1));
    }

    #[test]
    fn text_round_trip() {
        let x = l("v^3 + 2 - v^-1");
        assert_eq!(x.to_string(), "v^3 + 2 - v^-1");
        assert_eq!(l("-3v^2 + v - 7v^-4").to_string(), "-3v^2 + v - 7v^-4");
        assert_eq!(l("0"), Laurent::zero());
        assert_eq!(l("2*v^1"), Laurent::mono(2, 1));
        assert!("v^".parse::<Laurent>().is_err());
        assert!("".parse::<Laurent>().is_err());
        let r = RationalFn::new(l("v"), l("1 - v^-2"));
        assert_eq!(r.to_string().parse::<RationalFn>().unwrap(), r);
    }

    #[test]
    fn exact_division() {
        let a = l("v^2 - v^-2");
        let b = l("v - v^-1");
        assert_eq!(a.div_exact(&b).unwrap(), l("v + v^-1"));
        assert!(l("v + 1").div_exact(&l("v - 1")).is_none());
        assert!(l("1").div_exact(&l("2")).is_none());
    }

    #[test]
    fn rational_normal_form() {
        let a = RationalFn::new(l("v^2 - 1"), l("v - 1"));
        assert_eq!(a, RationalFn::from(l("v + 1")));
        let b = RationalFn::new(l("2"), l("-4v^3"));
        assert_eq!(b, RationalFn::new(l("-v^-3"), l("2")));
        let c = &RationalFn::new(Laurent::one(), l("1 - v^-2")) * &RationalFn::from(l("1 - v^-2"));
        assert_eq!(c, RationalFn::one());
    }

    #[test]
    fn series_nonneg() {
        let den = l("1 - v^-2");
        assert_eq!(l("v^2").series_nonneg_part(&den), l("v^2 + 1"));
        assert!(Laurent::v(-1).series_nonneg_part(&den).is_zero());
    }

    fn arb_laurent() -> impl Strategy<Value = Laurent> {
        (-4i32..4, proptest::collection::vec(-5i64..6, 0..6)).prop_map(|(lo, c)| Laurent::from_dense(lo, c))
    }

    fn arb_rat() -> impl Strategy<Value = RationalFn> {
        (arb_laurent(), arb_laurent()).prop_filter_map("nonzero den", |(n, d)| (!d.is_zero()).then(|| RationalFn::new(n, d)))
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_laurent(), b in arb_laurent(), c in arb_laurent()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!((&a * &b).bar(), &a.bar() * &b.bar());
            prop_assert_eq!(a.bar().bar(), a.clone());
        }

        #[test]
        fn text_round_trips(a in arb_laurent()) {
            prop_assert_eq!(a.to_string().parse::<Laurent>().unwrap(), a);
        }

        #[test]
        fn rational_bar_involution(x in arb_rat()) {
            prop_assert_eq!(x.bar().bar(), x.clone());
            prop_assert_eq!(x.to_string().parse::<RationalFn>().unwrap(), x);
        }

        #[test]
        fn rational_field_ops(x in arb_rat(), y in arb_rat()) {
            let s = &x + &y;
            prop_assert_eq!(&s - &y, x.clone());
            if !y.is_zero() {
                prop_assert_eq!((&x * &y).div(&y), x.clone());
            }
        }

        #[test]
        fn positive_cone_closed(a in arb_laurent(), b in arb_laurent()) {
            let pa = Laurent::from_terms(a.terms().map(|(e, c)| (e, c.abs())));
            let pb = Laurent::from_terms(b.terms().map(|(e, c)| (e, c.abs())));
            prop_assert!(laurent_test(&(&pa + &pb), Lattice::InNvv));
            prop_assert!(laurent_test(&(&pa * &pb), Lattice::InNvv));
        }

        #[test]
        fn exact_division_inverts_product(a in arb_laurent(), b in arb_laurent()) {
            prop_assume!(!b.is_zero());
            prop_assert_eq!((&a * &b).div_exact(&b), Some(a));
        }
    }
}
