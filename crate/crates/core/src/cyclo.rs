//! Exact arithmetic in cyclotomic fields `Q(ζ_n)`.
//!
//! A [`CycloValue`] is stored in a canonical form that makes equality a
//! structural comparison: the value is written in the power basis
//! `1, ζ_n, …, ζ_n^{φ(n)−1}` (i.e. as the remainder of a polynomial in
//! `ζ_n` modulo the n-th cyclotomic polynomial `Φ_n`), and the conductor
//! `n` is minimal — a value lying in a proper subfield `Q(ζ_d)` is stored
//! at conductor `d`, rationals at conductor 1. Minimal conductors are
//! never ≡ 2 (mod 4) because `Q(ζ_{2m}) = Q(ζ_m)` for odd `m`.
//!
//! Coefficients are arbitrary-precision rationals in lowest terms
//! (`num_rational::BigRational` keeps them reduced). Operands of different
//! conductors are embedded into `Q(ζ_lcm)` via `ζ_d = ζ_n^{n/d}` before
//! combining.
//!
//! Values are immutable and all operations are pure, so sharing between
//! threads is safe. Per-conductor reduction data is cached thread-locally.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Errors from cyclotomic construction and parsing.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycloError {
    #[error("conductor must be positive")]
    ZeroConductor,
    #[error("syntax error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("division by zero")]
    DivisionByZero,
}

/// An exact element of a cyclotomic field, in canonical form.
///
/// Two values are equal iff their representations are identical, so the
/// derived `PartialEq`/`Eq`/`Hash` are semantically correct.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycloValue {
    conductor: u32,
    /// exponent → coefficient; exponents lie below `φ(conductor)`,
    /// coefficients are nonzero. Empty map encodes zero (conductor 1).
    coeffs: BTreeMap<u32, BigRational>,
}

// ---------------------------------------------------------------------------
// per-conductor reduction data
// ---------------------------------------------------------------------------

struct Context {
    phi: usize,
    /// remainders of x^k mod Φ_n for k in φ(n)..n, as dense integer rows
    rows: Vec<Vec<BigInt>>,
    /// divisors of n in increasing order
    divisors: Vec<u32>,
    /// cached subfield bases: d → columns (each dense length φ(n)) of the
    /// embedding of the power basis of Q(ζ_d)
    subfield_bases: RefCell<HashMap<u32, Rc<Vec<Vec<BigInt>>>>>,
}

thread_local! {
    static CONTEXTS: RefCell<HashMap<u32, Rc<Context>>> = RefCell::new(HashMap::new());
}

fn euler_phi(n: u32) -> u32 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn divisors(n: u32) -> Vec<u32> {
    let mut d: Vec<u32> = (1..=n).filter(|k| n % k == 0).collect();
    d.sort_unstable();
    d
}

/// Quotient of the exact division `num / den` of monic-led integer
/// polynomials (dense, lowest degree first). Panics if not exact; callers
/// only divide x^n − 1 by products of cyclotomic polynomials, which is.
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem: Vec<BigInt> = num.to_vec();
    let dd = den.len() - 1;
    assert!(den[dd].is_one(), "divisor must be monic");
    let nd = rem.len() - 1;
    if nd < dd {
        assert!(rem.iter().all(|c| c.is_zero()));
        return vec![BigInt::zero()];
    }
    let mut quot = vec![BigInt::zero(); nd - dd + 1];
    for k in (0..=nd - dd).rev() {
        let c = rem[k + dd].clone();
        if !c.is_zero() {
            for j in 0..=dd {
                let t = &den[j] * &c;
                rem[k + j] -= t;
            }
        }
        quot[k] = c;
    }
    assert!(rem.iter().all(|c| c.is_zero()), "non-exact polynomial division");
    quot
}

/// Φ_n as a dense integer polynomial, by iterated division of x^n − 1.
fn cyclotomic_polynomial(n: u32) -> Vec<BigInt> {
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    let mut quot = num;
    for d in divisors(n) {
        if d == n {
            break;
        }
        let phi_d = cyclotomic_polynomial_cached(d);
        quot = poly_div_exact(&quot, &phi_d);
    }
    quot
}

thread_local! {
    static PHI_POLYS: RefCell<HashMap<u32, Rc<Vec<BigInt>>>> = RefCell::new(HashMap::new());
}

fn cyclotomic_polynomial_cached(n: u32) -> Rc<Vec<BigInt>> {
    if let Some(p) = PHI_POLYS.with(|m| m.borrow().get(&n).cloned()) {
        return p;
    }
    let p = Rc::new(cyclotomic_polynomial(n));
    PHI_POLYS.with(|m| m.borrow_mut().insert(n, p.clone()));
    p
}

fn context(n: u32) -> Rc<Context> {
    if let Some(c) = CONTEXTS.with(|m| m.borrow().get(&n).cloned()) {
        return c;
    }
    let phi_poly = cyclotomic_polynomial_cached(n);
    let phi = phi_poly.len() - 1;
    // rows[k - phi] = x^k mod Φ_n, built by the recurrence
    // x^{k+1} = x·(x^k mod Φ_n) mod Φ_n.
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n as usize - phi);
    let mut cur = vec![BigInt::zero(); phi];
    // cur = x^phi mod Φ_n = -(lower part of Φ_n)
    for i in 0..phi {
        cur[i] = -phi_poly[i].clone();
    }
    for _ in phi..n as usize {
        rows.push(cur.clone());
        // multiply by x
        let carry = cur[phi - 1].clone();
        for i in (1..phi).rev() {
            cur[i] = cur[i - 1].clone();
        }
        cur[0] = BigInt::zero();
        if !carry.is_zero() {
            let head = &rows[0]; // x^phi mod Φ_n
            for i in 0..phi {
                let t = &head[i] * &carry;
                cur[i] += t;
            }
        }
    }
    let ctx = Rc::new(Context {
        phi,
        rows,
        divisors: divisors(n),
        subfield_bases: RefCell::new(HashMap::new()),
    });
    CONTEXTS.with(|m| m.borrow_mut().insert(n, ctx.clone()));
    ctx
}

// ---------------------------------------------------------------------------
// canonicalisation
// ---------------------------------------------------------------------------

/// Dense coefficients (length φ(n)) of Σ c_k ζ_n^k reduced mod Φ_n.
fn reduce_dense<I>(n: u32, terms: I) -> Vec<BigRational>
where
    I: IntoIterator<Item = (u32, BigRational)>,
{
    let ctx = context(n);
    let mut dense = vec![BigRational::zero(); ctx.phi];
    for (k, c) in terms {
        if c.is_zero() {
            continue;
        }
        let k = (k % n) as usize;
        if k < ctx.phi {
            dense[k] += c;
        } else {
            let row = &ctx.rows[k - ctx.phi];
            for (i, ri) in row.iter().enumerate() {
                if !ri.is_zero() {
                    dense[i] += &c * BigRational::from(ri.clone());
                }
            }
        }
    }
    dense
}

/// Basis of Q(ζ_d) inside Q(ζ_n): columns are ζ_n^{(n/d)·i} (i < φ(d))
/// reduced mod Φ_n.
fn subfield_basis(n: u32, d: u32) -> Rc<Vec<Vec<BigInt>>> {
    let ctx = context(n);
    if let Some(b) = ctx.subfield_bases.borrow().get(&d) {
        return b.clone();
    }
    let phi_d = euler_phi(d) as usize;
    let step = n / d;
    let mut cols = Vec::with_capacity(phi_d);
    for i in 0..phi_d {
        let e = (step * i as u32) as usize % n as usize;
        let mut col = vec![BigInt::zero(); ctx.phi];
        if e < ctx.phi {
            col[e] = BigInt::one();
        } else {
            col.clone_from(&ctx.rows[e - ctx.phi]);
        }
        cols.push(col);
    }
    let rc = Rc::new(cols);
    ctx.subfield_bases.borrow_mut().insert(d, rc.clone());
    rc
}

/// Solve Σ x_i basis_i = v over Q, if possible.
fn solve_in_subfield(basis: &[Vec<BigInt>], v: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = v.len();
    let cols = basis.len();
    // augmented matrix [basis | v], Gaussian elimination
    let mut a: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<BigRational> = basis
                .iter()
                .map(|col| BigRational::from(col[r].clone()))
                .collect();
            row.push(v[r].clone());
            row
        })
        .collect();
    let mut pivot_rows = Vec::new();
    let mut r0 = 0;
    for c in 0..cols {
        let Some(pr) = (r0..rows).find(|&r| !a[r][c].is_zero()) else {
            pivot_rows.push(None);
            continue;
        };
        a.swap(r0, pr);
        let inv = a[r0][c].recip();
        for x in a[r0][c..].iter_mut() {
            *x *= &inv;
        }
        for r in 0..rows {
            if r != r0 && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for cc in c..=cols {
                    let t = &a[r0][cc] * &f;
                    a[r][cc] -= t;
                }
            }
        }
        pivot_rows.push(Some(r0));
        r0 += 1;
    }
    // consistency: rows below r0 must have zero RHS
    for r in r0..rows {
        if !a[r][cols].is_zero() {
            return None;
        }
    }
    let mut x = vec![BigRational::zero(); cols];
    for (c, pr) in pivot_rows.iter().enumerate() {
        if let Some(r) = pr {
            x[c] = a[*r][cols].clone();
        }
    }
    // free columns would mean dependent basis vectors; the power-basis
    // embedding is independent, so verify and accept.
    Some(x)
}

/// Build the canonical value from dense coefficients at working conductor n.
fn canonicalize(n: u32, dense: Vec<BigRational>) -> CycloValue {
    if dense.iter().all(|c| c.is_zero()) {
        return CycloValue::zero();
    }
    if n == 1 {
        return CycloValue::from_rational(dense.into_iter().next().unwrap());
    }
    let ctx = context(n);
    // rational fast path
    if dense[1..].iter().all(|c| c.is_zero()) {
        return CycloValue::from_rational(dense.into_iter().next().unwrap());
    }
    for &d in &ctx.divisors {
        if d == n {
            break;
        }
        if d == 1 || d % 4 == 2 {
            continue; // d == 1 handled above; 2 mod 4 never minimal
        }
        let basis = subfield_basis(n, d);
        if let Some(x) = solve_in_subfield(&basis, &dense) {
            // re-canonicalise at conductor d (the solution is already in the
            // power basis of Q(ζ_d), but may itself drop further only if d
            // was not minimal, which the increasing scan rules out)
            let coeffs = x
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i as u32, c))
                .collect();
            return CycloValue { conductor: d, coeffs };
        }
    }
    let coeffs = dense
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i as u32, c))
        .collect();
    CycloValue { conductor: n, coeffs }
}

// ---------------------------------------------------------------------------
// public API
// ---------------------------------------------------------------------------

impl CycloValue {
    pub fn zero() -> Self {
        CycloValue { conductor: 1, coeffs: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(i: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(i)))
    }

    pub fn from_bigint(i: BigInt) -> Self {
        Self::from_rational(BigRational::from_integer(i))
    }

    pub fn from_rational(q: BigRational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !q.is_zero() {
            coeffs.insert(0, q);
        }
        CycloValue { conductor: 1, coeffs }
    }

    /// ζ_n^k in canonical form; `k` is taken mod `n`.
    pub fn root_of_unity(n: u32, k: i64) -> Result<Self, CycloError> {
        if n == 0 {
            return Err(CycloError::ZeroConductor);
        }
        let k = k.rem_euclid(n as i64) as u32;
        Ok(Self::from_terms(n, [(k, BigRational::one())])?)
    }

    /// Σ c_k ζ_n^k brought to canonical form.
    pub fn from_terms<I>(n: u32, terms: I) -> Result<Self, CycloError>
    where
        I: IntoIterator<Item = (u32, BigRational)>,
    {
        if n == 0 {
            return Err(CycloError::ZeroConductor);
        }
        Ok(canonicalize(n, reduce_dense(n, terms)))
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.conductor == 1
    }

    /// The rational value, when the conductor is 1.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.conductor == 1 {
            Some(self.coeffs.get(&0).cloned().unwrap_or_else(BigRational::zero))
        } else {
            None
        }
    }

    /// The integer value, when rational with denominator 1.
    pub fn to_integer(&self) -> Option<BigInt> {
        let q = self.to_rational()?;
        q.is_integer().then(|| q.to_integer())
    }

    /// Nonzero coefficients over the power basis of `Q(ζ_conductor)`.
    pub fn coefficients(&self) -> impl Iterator<Item = (u32, &BigRational)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    fn embed_terms(&self, n: u32) -> impl Iterator<Item = (u32, BigRational)> + '_ {
        let step = n / self.conductor;
        self.coeffs.iter().map(move |(k, c)| (k * step, c.clone()))
    }

    fn combine(a: &Self, b: &Self, f: impl Fn(Vec<BigRational>, Vec<BigRational>) -> Vec<BigRational>, n: u32) -> Self {
        let da = reduce_dense(n, a.embed_terms(n));
        let db = reduce_dense(n, b.embed_terms(n));
        canonicalize(n, f(da, db))
    }

    pub fn add(&self, other: &Self) -> Self {
        // rational fast paths keep the hot loops cheap: adding a rational
        // cannot change the minimal conductor of a non-rational value
        if self.is_rational() && other.is_rational() {
            let a = self.to_rational().unwrap();
            let b = other.to_rational().unwrap();
            return Self::from_rational(a + b);
        }
        if self.is_rational() || other.is_rational() {
            let (rat, cyc) = if self.is_rational() { (self, other) } else { (other, self) };
            let q = rat.to_rational().unwrap();
            let mut coeffs = cyc.coeffs.clone();
            let c0 = coeffs.remove(&0).unwrap_or_else(BigRational::zero) + q;
            if !c0.is_zero() {
                coeffs.insert(0, c0);
            }
            return CycloValue { conductor: cyc.conductor, coeffs };
        }
        let n = lcm(self.conductor, other.conductor);
        Self::combine(self, other, |a, b| a.into_iter().zip(b).map(|(x, y)| x + y).collect(), n)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(k, c)| (*k, -c.clone())).collect();
        CycloValue { conductor: self.conductor, coeffs }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.is_rational() && other.is_rational() {
            let a = self.to_rational().unwrap();
            let b = other.to_rational().unwrap();
            return Self::from_rational(a * b);
        }
        if self.is_rational() || other.is_rational() {
            // nonzero rational scaling preserves the minimal conductor
            let (rat, cyc) = if self.is_rational() { (self, other) } else { (other, self) };
            let q = rat.to_rational().unwrap();
            let coeffs = cyc.coeffs.iter().map(|(k, c)| (*k, c * &q)).collect();
            return CycloValue { conductor: cyc.conductor, coeffs };
        }
        let n = lcm(self.conductor, other.conductor);
        let stepa = n / self.conductor;
        let stepb = n / other.conductor;
        let mut terms: BTreeMap<u32, BigRational> = BTreeMap::new();
        for (ka, ca) in &self.coeffs {
            for (kb, cb) in &other.coeffs {
                let e = (ka * stepa + kb * stepb) % n;
                let t = ca * cb;
                *terms.entry(e).or_insert_with(BigRational::zero) += t;
            }
        }
        canonicalize(n, reduce_dense(n, terms))
    }

    /// Complex conjugation ζ_n ↦ ζ_n^{−1}; involutive, fixes rationals.
    pub fn conjugate(&self) -> Self {
        if self.is_rational() {
            return self.clone();
        }
        let n = self.conductor;
        // a Galois automorphism preserves the minimal conductor
        let dense = reduce_dense(n, self.coeffs.iter().map(|(k, c)| ((n - k) % n, c.clone())));
        let coeffs = dense
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i as u32, c))
            .collect();
        CycloValue { conductor: n, coeffs }
    }

    /// Image under the Galois automorphism ζ_n ↦ ζ_n^j (requires gcd(j, n) = 1).
    pub fn galois(&self, j: u32) -> Self {
        if self.is_rational() {
            return self.clone();
        }
        let n = self.conductor;
        debug_assert_eq!(gcd(j % n, n), 1);
        let dense = reduce_dense(n, self.coeffs.iter().map(|(k, c)| ((k * (j % n)) % n, c.clone())));
        let coeffs = dense
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i as u32, c))
            .collect();
        CycloValue { conductor: n, coeffs }
    }

    /// Multiplicative inverse, `None` for zero. Uses the product of all
    /// nontrivial Galois conjugates, whose product with `self` is the
    /// rational field norm.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(q) = self.to_rational() {
            return Some(Self::from_rational(q.recip()));
        }
        let n = self.conductor;
        let mut w = Self::one();
        for j in 2..n {
            if gcd(j, n) == 1 {
                w = w.mul(&self.galois(j));
            }
        }
        let norm = self.mul(&w);
        let q = norm
            .to_rational()
            .expect("product over the full Galois orbit is rational");
        Some(w.mul(&Self::from_rational(q.recip())))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, CycloError> {
        other.inv().map(|i| self.mul(&i)).ok_or(CycloError::DivisionByZero)
    }

    /// Parse the `E(n)^k` value grammar. Round-trips with `Display` on
    /// canonical values.
    pub fn parse(text: &str) -> Result<Self, CycloError> {
        Parser::new(text).parse_value()
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    a.gcd(&b)
}

fn lcm(a: u32, b: u32) -> u32 {
    a / gcd(a, b) * b
}

impl std::ops::Add for &CycloValue {
    type Output = CycloValue;
    fn add(self, rhs: Self) -> CycloValue {
        CycloValue::add(self, rhs)
    }
}

impl std::ops::Sub for &CycloValue {
    type Output = CycloValue;
    fn sub(self, rhs: Self) -> CycloValue {
        CycloValue::sub(self, rhs)
    }
}

impl std::ops::Mul for &CycloValue {
    type Output = CycloValue;
    fn mul(self, rhs: Self) -> CycloValue {
        CycloValue::mul(self, rhs)
    }
}

impl std::ops::Neg for &CycloValue {
    type Output = CycloValue;
    fn neg(self) -> CycloValue {
        CycloValue::neg(self)
    }
}

// ---------------------------------------------------------------------------
// printing and parsing
// ---------------------------------------------------------------------------

impl fmt::Display for CycloValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.coeffs {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            if *k == 0 {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}*")?;
                }
                write!(f, "E({})", self.conductor)?;
                if *k != 1 {
                    write!(f, "^{k}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CycloValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyclo({self})")
    }
}

impl FromStr for CycloValue {
    type Err = CycloError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl serde::Serialize for CycloValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for CycloValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        CycloValue::parse(&text).map_err(serde::de::Error::custom)
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser { bytes: text.as_bytes(), pos: 0 }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, CycloError> {
        Err(CycloError::Parse { position: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        Some(b)
    }

    fn expect(&mut self, b: u8) -> Result<(), CycloError> {
        match self.bump() {
            Some(x) if x == b => Ok(()),
            _ => self.err(format!("expected '{}'", b as char)),
        }
    }

    fn integer(&mut self) -> Result<BigInt, CycloError> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.bytes.get(self.pos), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return self.err("expected integer");
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        Ok(BigInt::from_str(text).unwrap())
    }

    fn rational(&mut self) -> Result<BigRational, CycloError> {
        let num = self.integer()?;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let den = self.integer()?;
            if !den.is_positive() {
                return self.err("denominator must be positive");
            }
            Ok(BigRational::new(num, den))
        } else {
            Ok(BigRational::from_integer(num))
        }
    }

    /// root := 'E(' integer ')' ('^' integer)?
    fn root(&mut self) -> Result<CycloValue, CycloError> {
        self.expect(b'E')?;
        self.expect(b'(')?;
        let n = self.integer()?;
        self.expect(b')')?;
        let n: u32 = match u32::try_from(&n) {
            Ok(n) if n >= 1 => n,
            Ok(0) => return self.err("conductor must be positive"),
            _ => return self.err("conductor out of range"),
        };
        let k = if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.integer()?;
            let n_big = BigInt::from(n);
            let r = ((&e % &n_big) + &n_big) % &n_big;
            i64::try_from(r).unwrap()
        } else {
            1
        };
        Ok(CycloValue::root_of_unity(n, k).expect("n validated"))
    }

    /// term := rational ('*' root)? | root
    fn term(&mut self) -> Result<CycloValue, CycloError> {
        match self.peek() {
            Some(b'E') => self.root(),
            Some(b) if b == b'-' || b == b'+' || b.is_ascii_digit() => {
                let q = self.rational()?;
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                    let r = self.root()?;
                    Ok(r.mul(&CycloValue::from_rational(q)))
                } else {
                    Ok(CycloValue::from_rational(q))
                }
            }
            _ => self.err("expected term"),
        }
    }

    fn parse_value(&mut self) -> Result<CycloValue, CycloError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                None => return Ok(acc),
                _ => return self.err("unexpected input"),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn e(n: u32, k: i64) -> CycloValue {
        CycloValue::root_of_unity(n, k).unwrap()
    }

    #[test]
    fn roots_of_unity_canonical() {
        assert_eq!(e(1, 0), CycloValue::one());
        assert_eq!(e(4, 2), CycloValue::from_integer(-1));
        let sum = e(5, 1).add(&e(5, 2)).add(&e(5, 3)).add(&e(5, 4));
        assert_eq!(sum, CycloValue::from_integer(-1));
    }

    #[test]
    fn zero_conductor_rejected() {
        assert_eq!(CycloValue::root_of_unity(0, 1), Err(CycloError::ZeroConductor));
    }

    #[test]
    fn add_and_mul_examples() {
        assert_eq!(e(3, 1).add(&e(3, 2)), CycloValue::from_integer(-1));
        assert_eq!(e(8, 1).mul(&e(8, 1)), e(4, 1));
        let two = CycloValue::from_integer(2);
        let half = CycloValue::from_rational(rat(1, 2));
        assert_eq!(two.mul(&half), CycloValue::one());
    }

    #[test]
    fn conductor_reduction() {
        // ζ_{2n}^2 = ζ_n; odd n reduces further since Q(ζ_{2m}) = Q(ζ_m)
        assert_eq!(e(12, 2).conductor(), 3); // ζ_6 lives in Q(ζ_3)
        assert_eq!(e(12, 2), e(6, 1));
        assert_eq!(e(10, 2), e(5, 1));
        assert_eq!(e(8, 2).conductor(), 4);
    }

    #[test]
    fn conjugation() {
        assert_eq!(e(7, 1).conjugate(), e(7, 6));
        assert_eq!(CycloValue::from_integer(-1).conjugate(), CycloValue::from_integer(-1));
        let real = e(5, 1).add(&e(5, 4));
        assert_eq!(real.conjugate(), real);
        // involutive
        let v = e(9, 2).add(&e(9, 5)).mul(&e(4, 1));
        assert_eq!(v.conjugate().conjugate(), v);
    }

    #[test]
    fn to_rational_examples() {
        assert_eq!(
            CycloValue::from_integer(22).to_rational(),
            Some(BigRational::from_integer(BigInt::from(22)))
        );
        assert_eq!(e(3, 1).to_rational(), None);
        let v = e(3, 1).add(&e(3, 2)).add(&CycloValue::one());
        assert_eq!(v, CycloValue::zero());
        assert_eq!(v.to_rational(), Some(BigRational::zero()));
    }

    #[test]
    fn parse_examples() {
        let v = CycloValue::parse("2*E(7)^3-1/2").unwrap();
        let expect = e(7, 3)
            .mul(&CycloValue::from_integer(2))
            .add(&CycloValue::from_rational(rat(-1, 2)));
        assert_eq!(v, expect);
        assert_eq!(CycloValue::parse("-2").unwrap(), CycloValue::from_integer(-2));
        assert_eq!(CycloValue::parse("E(4)^2+1").unwrap(), CycloValue::zero());
        assert_eq!(CycloValue::parse(" 1/2 * E(8) + 1/2*E(8)^3 ").unwrap().conductor(), 8);
    }

    #[test]
    fn parse_errors_carry_position() {
        match CycloValue::parse("2*E(7^3") {
            Err(CycloError::Parse { position, .. }) => assert!(position >= 5),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(
            CycloValue::parse("E(0)"),
            Err(CycloError::Parse { .. })
        ));
    }

    #[test]
    fn print_parse_round_trip() {
        let samples = [
            CycloValue::zero(),
            CycloValue::from_integer(-7),
            CycloValue::from_rational(rat(22, 7)),
            e(5, 1).add(&e(5, 4)),
            e(8, 1).mul(&CycloValue::from_rational(rat(-3, 2))).add(&CycloValue::one()),
            e(12, 1).add(&e(12, 7)),
        ];
        for v in samples {
            let printed = v.to_string();
            assert_eq!(CycloValue::parse(&printed).unwrap(), v, "round trip of {printed}");
        }
    }

    #[test]
    fn root_sums_vanish() {
        for n in 2..=30u32 {
            let mut sum = CycloValue::zero();
            for k in 0..n {
                sum = sum.add(&e(n, k as i64));
            }
            assert!(sum.is_zero(), "sum of all {n}-th roots");
        }
    }

    #[test]
    fn inverse() {
        let v = e(7, 3).add(&CycloValue::from_integer(2));
        let inv = v.inv().unwrap();
        assert_eq!(v.mul(&inv), CycloValue::one());
        assert_eq!(CycloValue::zero().inv(), None);
        assert_eq!(
            CycloValue::zero().checked_div(&CycloValue::zero()),
            Err(CycloError::DivisionByZero)
        );
    }

    #[test]
    fn golden_ratio_arithmetic() {
        // b5 = (−1+√5)/2 = ζ_5 + ζ_5^4 satisfies x² + x − 1 = 0
        let b5 = e(5, 1).add(&e(5, 4));
        let sq = b5.mul(&b5);
        assert_eq!(sq, CycloValue::one().sub(&b5));
    }
}
