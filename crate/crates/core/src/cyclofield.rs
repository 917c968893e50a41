//! Exact arithmetic in cyclotomic fields ℚ(ζ_N) with the unit-circle
//! involution `ζ -> ζ⁻¹`, and a floating complex backend with the same
//! interface.
//!
//! An exact element is stored as an integer coefficient vector over the power
//! basis `1, ζ, …, ζ^{φ(N)-1}` with one common positive denominator. The
//! representation is always fully reduced modulo the N-th cyclotomic
//! polynomial and by the content gcd, so equal values at equal orders have
//! identical storage. Values of different orders are compared and combined
//! in ℚ(ζ_lcm).

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, Sign as BigSign};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{Backend, Involution, Ring, Scalar, Sign, DEFAULT_FLOAT_TOLERANCE};
use crate::matrix::Matrix;

// ---------------------------------------------------------------------------
// Rationals
// ---------------------------------------------------------------------------

/// Parses `p`, `-p` or `p/q` (no decimal point).
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = n
        .parse()
        .map_err(|_| Error::parse(format!("bad rational numerator in {s:?}")))?;
    let den: BigInt = d
        .parse()
        .map_err(|_| Error::parse(format!("bad rational denominator in {s:?}")))?;
    if den.is_zero() {
        return Err(Error::parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(num, den))
}

/// Formats a rational as `p/q`, or `p` when the denominator is one.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
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

// ---------------------------------------------------------------------------
// Per-order tables
// ---------------------------------------------------------------------------

struct CycloContext {
    order: u64,
    phi: usize,
    /// `powers[e]` = coefficients of `x^e mod Φ_N`, for `0 <= e < N`.
    powers: Vec<Vec<i64>>,
}

fn contexts() -> &'static Mutex<HashMap<u64, Arc<CycloContext>>> {
    static CTX: OnceLock<Mutex<HashMap<u64, Arc<CycloContext>>>> = OnceLock::new();
    CTX.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cyclotomic_polynomials() -> &'static Mutex<HashMap<u64, Arc<Vec<i64>>>> {
    static POLYS: OnceLock<Mutex<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    POLYS.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients (ascending) of the n-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(n: u64) -> Arc<Vec<i64>> {
    if let Some(p) = cyclotomic_polynomials().lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by Φ_d for every proper divisor d.
    let mut poly = vec![0i64; n as usize + 1];
    poly[0] = -1;
    poly[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            let divisor = cyclotomic_polynomial(d);
            poly = exact_div_monic(&poly, &divisor);
        }
    }
    let poly = Arc::new(poly);
    cyclotomic_polynomials()
        .lock()
        .unwrap()
        .insert(n, poly.clone());
    poly
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = num.len() - 1 - dd;
    let mut quot = vec![0i64; qd + 1];
    for k in (0..=qd).rev() {
        let c = rem[k + dd];
        quot[k] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[k + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

fn context(order: u64) -> Arc<CycloContext> {
    if let Some(c) = contexts().lock().unwrap().get(&order) {
        return c.clone();
    }
    let phi_poly = cyclotomic_polynomial(order);
    let phi = phi_poly.len() - 1;
    let mut powers = Vec::with_capacity(order as usize);
    let mut cur = vec![0i64; phi];
    cur[0] = 1;
    if phi == 0 {
        unreachable!("cyclotomic polynomial has positive degree");
    }
    for _ in 0..order {
        powers.push(cur.clone());
        // multiply by x and reduce x^phi = -Σ Φ_k x^k
        let top = cur[phi - 1];
        for k in (1..phi).rev() {
            cur[k] = cur[k - 1];
        }
        cur[0] = 0;
        if top != 0 {
            for k in 0..phi {
                cur[k] = cur[k]
                    .checked_sub(top.checked_mul(phi_poly[k]).expect("overflow"))
                    .expect("overflow in cyclotomic power table");
            }
        }
    }
    let ctx = Arc::new(CycloContext {
        order,
        phi,
        powers,
    });
    contexts().lock().unwrap().insert(order, ctx.clone());
    ctx
}

// ---------------------------------------------------------------------------
// CycloNumber
// ---------------------------------------------------------------------------

/// Element of ℚ(ζ_N).
#[derive(Clone)]
pub struct CycloNumber {
    order: u64,
    num: Vec<BigInt>,
    den: BigInt,
}

impl CycloNumber {
    /// `ζ_order^exponent`.
    pub fn cyclo(order: u64, exponent: i64) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidOrder(0));
        }
        let ctx = context(order);
        let e = exponent.rem_euclid(order as i64) as usize;
        Ok(CycloNumber {
            order,
            num: ctx.powers[e].iter().map(|&c| BigInt::from(c)).collect(),
            den: BigInt::one(),
        })
    }

    pub fn from_rational(q: &BigRational) -> Self {
        CycloNumber {
            order: 1,
            num: vec![q.numer().clone()],
            den: q.denom().clone(),
        }
        .normalized()
    }

    pub fn from_int(n: i64) -> Self {
        CycloNumber {
            order: 1,
            num: vec![BigInt::from(n)],
            den: BigInt::one(),
        }
    }

    /// Builds an element from power-basis coefficients of length φ(order).
    pub fn from_coeffs(order: u64, coeffs: &[BigRational]) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidOrder(0));
        }
        let phi = euler_phi(order) as usize;
        if coeffs.len() != phi {
            return Err(Error::parse(format!(
                "order {order} needs {phi} coefficients, got {}",
                coeffs.len()
            )));
        }
        let den = coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        Ok(CycloNumber { order, num, den }.normalized())
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Integer power-basis numerators and the common denominator.
    pub(crate) fn parts(&self) -> (&[BigInt], &BigInt) {
        (&self.num, &self.den)
    }

    /// Power-basis coefficients as rationals.
    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|c| BigRational::new(c.clone(), self.den.clone()))
            .collect()
    }

    pub fn is_rational(&self) -> bool {
        self.num.iter().skip(1).all(Zero::is_zero)
    }

    /// The rational value, if the element lies in ℚ.
    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_rational()
            .then(|| BigRational::new(self.num[0].clone(), self.den.clone()))
    }

    fn normalized(mut self) -> Self {
        if self.num.iter().all(Zero::is_zero) {
            self.den = BigInt::one();
            return self;
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if self.den.is_negative() {
            g = -g;
        }
        if !g.is_one() {
            for c in &mut self.num {
                *c /= &g;
            }
            self.den /= &g;
        }
        self
    }

    /// Re-expresses the element in ℚ(ζ_target); `order` must divide `target`.
    fn lift(&self, target: u64) -> CycloNumber {
        if target == self.order {
            return self.clone();
        }
        debug_assert_eq!(target % self.order, 0);
        let step = (target / self.order) as usize;
        let ctx = context(target);
        let mut out = vec![BigInt::zero(); ctx.phi];
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let row = &ctx.powers[(k * step) % target as usize];
            for (o, &r) in out.iter_mut().zip(row) {
                if r != 0 {
                    *o += c * r;
                }
            }
        }
        CycloNumber {
            order: target,
            num: out,
            den: self.den.clone(),
        }
    }

    fn common(a: &Self, b: &Self) -> (CycloNumber, CycloNumber) {
        if a.order == b.order {
            return (a.clone(), b.clone());
        }
        // Rationals lift trivially; avoid the table walk.
        let l = a.order.lcm(&b.order);
        (a.lift(l), b.lift(l))
    }

    fn add_ref(&self, other: &Self) -> Self {
        if other.is_zero_exact() {
            return self.clone();
        }
        if self.is_zero_exact() {
            return other.clone();
        }
        let (a, b) = Self::common(self, other);
        let num = if a.den == b.den {
            a.num.iter().zip(&b.num).map(|(x, y)| x + y).collect()
        } else {
            a.num
                .iter()
                .zip(&b.num)
                .map(|(x, y)| x * &b.den + y * &a.den)
                .collect()
        };
        let den = if a.den == b.den {
            a.den.clone()
        } else {
            &a.den * &b.den
        };
        CycloNumber {
            order: a.order,
            num,
            den,
        }
        .normalized()
    }

    fn mul_ref(&self, other: &Self) -> Self {
        if self.is_zero_exact() || other.is_zero_exact() {
            return CycloNumber::from_int(0);
        }
        if self.order == 1 || other.order == 1 {
            let (r, x) = if self.order == 1 {
                (self, other)
            } else {
                (other, self)
            };
            let s = &r.num[0];
            return CycloNumber {
                order: x.order,
                num: x.num.iter().map(|c| c * s).collect(),
                den: &x.den * &r.den,
            }
            .normalized();
        }
        let (a, b) = Self::common(self, other);
        let ctx = context(a.order);
        let phi = ctx.phi;
        let mut prod = vec![BigInt::zero(); 2 * phi - 1];
        for (i, x) in a.num.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.num.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        let mut out: Vec<BigInt> = prod[..phi].to_vec();
        let n = ctx.order as usize;
        for (e, c) in prod.iter().enumerate().skip(phi) {
            if c.is_zero() {
                continue;
            }
            let row = &ctx.powers[e % n];
            for (o, &r) in out.iter_mut().zip(row) {
                if r != 0 {
                    *o += c * r;
                }
            }
        }
        CycloNumber {
            order: a.order,
            num: out,
            den: &a.den * &b.den,
        }
        .normalized()
    }

    fn is_zero_exact(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    fn conj_exact(&self) -> Self {
        if self.order <= 2 {
            return self.clone();
        }
        let ctx = context(self.order);
        let n = ctx.order as usize;
        let mut out = vec![BigInt::zero(); ctx.phi];
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let row = &ctx.powers[(n - k) % n];
            for (o, &r) in out.iter_mut().zip(row) {
                if r != 0 {
                    *o += c * r;
                }
            }
        }
        CycloNumber {
            order: self.order,
            num: out,
            den: self.den.clone(),
        }
    }

    fn inv_exact(&self) -> Option<Self> {
        if self.is_zero_exact() {
            return None;
        }
        if self.is_rational() {
            let q = BigRational::new(self.den.clone(), self.num[0].clone());
            return Some(CycloNumber::from_rational(&q));
        }
        // Solve (multiplication-by-num matrix) v = den · e_0 over ℚ.
        let ctx = context(self.order);
        let phi = ctx.phi;
        let basis_num = CycloNumber {
            order: self.order,
            num: self.num.clone(),
            den: BigInt::one(),
        };
        let mut cols: Vec<Vec<BigInt>> = Vec::with_capacity(phi);
        for j in 0..phi {
            let xj = CycloNumber {
                order: self.order,
                num: ctx.powers[j].iter().map(|&c| BigInt::from(c)).collect(),
                den: BigInt::one(),
            };
            let p = basis_num.mul_ref(&xj);
            // p has denominator 1 since both factors are integral
            cols.push(p.num.iter().map(|c| c * &p.den).collect());
        }
        let mut m: Vec<Vec<BigRational>> = (0..phi)
            .map(|i| {
                let mut row: Vec<BigRational> =
                    (0..phi).map(|j| BigRational::from(cols[j][i].clone())).collect();
                row.push(if i == 0 {
                    BigRational::from(self.den.clone())
                } else {
                    BigRational::zero()
                });
                row
            })
            .collect();
        for c in 0..phi {
            let p = (c..phi).find(|&r| !m[r][c].is_zero())?;
            m.swap(c, p);
            let pivot = m[c][c].clone();
            for v in m[c].iter_mut() {
                *v /= &pivot;
            }
            for r in 0..phi {
                if r != c && !m[r][c].is_zero() {
                    let f = m[r][c].clone();
                    for k in c..=phi {
                        let t = &m[c][k] * &f;
                        m[r][k] -= t;
                    }
                }
            }
        }
        let coeffs: Vec<BigRational> = m.into_iter().map(|row| row[phi].clone()).collect();
        CycloNumber::from_coeffs(self.order, &coeffs).ok()
    }

    /// Approximate complex value.
    pub fn to_complex(&self) -> Complex64 {
        let n = self.order as f64;
        let den = self.den.to_f64().unwrap_or(f64::INFINITY);
        let mut z = Complex64::new(0.0, 0.0);
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / n;
            let cf = ratio_to_f64(c, &self.den).unwrap_or_else(|| c.to_f64().unwrap() / den);
            z += Complex64::from_polar(cf, theta);
        }
        z
    }

    fn sign_of_real(&self) -> Result<Sign> {
        if self.is_zero_exact() {
            return Ok(Sign::Zero);
        }
        if !self.conj_exact().eq_same_order(self) {
            return Err(Error::domain(format!("{self} is not real")));
        }
        if self.is_rational() {
            return Ok(Sign::from_i32(match self.num[0].sign() {
                BigSign::Minus => -1,
                BigSign::NoSign => 0,
                BigSign::Plus => 1,
            }));
        }
        // Fast path: double-precision evaluation with a generous error margin.
        let mut approx = 0.0f64;
        let mut scale = 0.0f64;
        let n = self.order as f64;
        let mut finite = true;
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match ratio_to_f64(c, &self.den) {
                Some(cf) => {
                    approx += cf * (2.0 * std::f64::consts::PI * k as f64 / n).cos();
                    scale += cf.abs();
                }
                None => finite = false,
            }
        }
        if finite && approx.abs() > 1e-9 * (1.0 + scale) {
            return Ok(if approx > 0.0 {
                Sign::Positive
            } else {
                Sign::Negative
            });
        }
        Ok(self.sign_by_refinement())
    }

    /// Interval refinement with fixed-point cosines. The element is known to
    /// be nonzero (exact test), so refinement terminates.
    fn sign_by_refinement(&self) -> Sign {
        let abs_sum: BigInt = self.num.iter().map(|c| c.abs()).sum();
        let mut bits = 64u32;
        loop {
            let cosines = fixed_cosines(self.order, bits);
            let mut acc = BigInt::zero();
            for (k, c) in self.num.iter().enumerate() {
                if !c.is_zero() {
                    acc += c * &cosines[k];
                }
            }
            // each cosine is within 2^-bits of the truth, i.e. within
            // 2^GUARD ulps at scale 2^(bits+GUARD)
            let err = &abs_sum << GUARD_BITS;
            if acc.abs() > err {
                return if acc.is_positive() {
                    Sign::Positive
                } else {
                    Sign::Negative
                };
            }
            // beyond 256 bits the exact nonzero test already guarantees
            // termination, keep doubling
            bits = bits.saturating_mul(2);
            assert!(bits <= 1 << 16, "sign refinement did not separate from zero");
        }
    }

    fn eq_same_order(&self, other: &Self) -> bool {
        self.order == other.order && self.den == other.den && self.num == other.num
    }

    /// Parses a root-of-unity spec `N/k` meaning `ζ_N^k`.
    pub fn parse_root_spec(spec: &str) -> Result<Self> {
        let (n, k) = parse_root_spec(spec)?;
        CycloNumber::cyclo(n, k)
    }
}

/// Parses `N/k` into `(N, k)`.
pub fn parse_root_spec(spec: &str) -> Result<(u64, i64)> {
    let (n, k) = spec
        .trim()
        .split_once('/')
        .ok_or_else(|| Error::parse(format!("root spec {spec:?} is not of the form N/k")))?;
    let n: u64 = n
        .trim()
        .parse()
        .map_err(|_| Error::parse(format!("bad order in root spec {spec:?}")))?;
    let k: i64 = k
        .trim()
        .parse()
        .map_err(|_| Error::parse(format!("bad exponent in root spec {spec:?}")))?;
    if n == 0 {
        return Err(Error::InvalidOrder(0));
    }
    Ok((n, k))
}

fn ratio_to_f64(num: &BigInt, den: &BigInt) -> Option<f64> {
    let r = BigRational::new(num.clone(), den.clone());
    let v = r.to_f64()?;
    v.is_finite().then_some(v)
}

const GUARD_BITS: u32 = 32;

fn cosine_cache() -> &'static Mutex<HashMap<(u64, u32), Arc<Vec<BigInt>>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), Arc<Vec<BigInt>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `cos(2πk/n)` for `0 <= k < φ(n)`, as integers scaled by `2^(bits+GUARD)`,
/// each within `2^GUARD` of the exact scaled value.
fn fixed_cosines(n: u64, bits: u32) -> Arc<Vec<BigInt>> {
    if let Some(v) = cosine_cache().lock().unwrap().get(&(n, bits)) {
        return v.clone();
    }
    let prec = bits + GUARD_BITS;
    // Work with extra internal bits, then round down to prec.
    let work = prec + 32;
    let pi = fixed_pi(work);
    let phi = euler_phi(n) as usize;
    let one = BigInt::one() << work;
    let mut out = Vec::with_capacity(phi);
    for k in 0..phi as u64 {
        let k_red = k % n;
        // fold into [0, π]: cos(2πk/n) = cos(2π(n-k)/n)
        let k_fold = if 2 * k_red > n { n - k_red } else { k_red };
        let theta = (&pi * BigInt::from(2 * k_fold)) / BigInt::from(n);
        let theta_sq = (&theta * &theta) >> work;
        let mut term = one.clone();
        let mut sum = one.clone();
        let mut i = 0u64;
        loop {
            term = -(&term * &theta_sq >> work) / BigInt::from((2 * i + 1) * (2 * i + 2));
            if term.is_zero() {
                break;
            }
            sum += &term;
            i += 1;
        }
        out.push(sum >> 32u32);
    }
    let out = Arc::new(out);
    cosine_cache()
        .lock()
        .unwrap()
        .insert((n, bits), out.clone());
    out
}

/// π scaled by `2^bits` via Machin's formula, accurate to a few ulps.
fn fixed_pi(bits: u32) -> BigInt {
    let one = BigInt::one() << (bits + 16);
    let atan_inv = |x: u64| -> BigInt {
        let x2 = BigInt::from(x * x);
        let mut power = &one / BigInt::from(x);
        let mut sum = power.clone();
        let mut k = 1u64;
        loop {
            power = &power / &x2;
            let term = &power / BigInt::from(2 * k + 1);
            if term.is_zero() {
                break;
            }
            if k % 2 == 1 {
                sum -= term;
            } else {
                sum += term;
            }
            k += 1;
        }
        sum
    };
    let pi = BigInt::from(16) * atan_inv(5) - BigInt::from(4) * atan_inv(239);
    pi >> 16u32
}

impl PartialEq for CycloNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.eq_same_order(other);
        }
        let (a, b) = CycloNumber::common(self, other);
        a.normalized().eq_same_order(&b.normalized())
    }
}

impl Eq for CycloNumber {}

impl fmt::Debug for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero_exact() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, q) in self.coeffs().iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let (neg, mag) = if q.is_negative() {
                (true, -q.clone())
            } else {
                (false, q.clone())
            };
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            match k {
                0 => f.write_str(&format_rational(&mag))?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{}*", format_rational(&mag))?;
                    }
                    if k == 1 {
                        write!(f, "z{}", self.order)?;
                    } else {
                        write!(f, "z{}^{k}", self.order)?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl Add for CycloNumber {
    type Output = CycloNumber;
    fn add(self, rhs: Self) -> Self {
        self.add_ref(&rhs)
    }
}

impl Sub for CycloNumber {
    type Output = CycloNumber;
    fn sub(self, rhs: Self) -> Self {
        self.add_ref(&-rhs)
    }
}

impl Mul for CycloNumber {
    type Output = CycloNumber;
    fn mul(self, rhs: Self) -> Self {
        self.mul_ref(&rhs)
    }
}

impl Neg for CycloNumber {
    type Output = CycloNumber;
    fn neg(mut self) -> Self {
        for c in &mut self.num {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl Ring for CycloNumber {
    fn zero() -> Self {
        CycloNumber::from_int(0)
    }
    fn one() -> Self {
        CycloNumber::from_int(1)
    }
    fn is_zero(&self) -> bool {
        self.is_zero_exact()
    }
}

impl Involution for CycloNumber {
    fn conj(&self) -> Self {
        self.conj_exact()
    }
}

impl Scalar for CycloNumber {
    fn from_i64(n: i64) -> Self {
        CycloNumber::from_int(n)
    }

    fn from_rational(q: &BigRational) -> Self {
        CycloNumber::from_rational(q)
    }

    fn from_cyclo(z: &CycloNumber) -> Self {
        z.clone()
    }

    fn root_of_unity(order: u64, exponent: i64) -> Result<Self> {
        CycloNumber::cyclo(order, exponent)
    }

    fn inv(&self) -> Option<Self> {
        self.inv_exact()
    }

    fn certify_invertible(m: &Matrix<Self>) -> bool {
        crate::modp::certify_invertible(m)
    }

    fn sign_real(&self) -> Result<Sign> {
        self.sign_of_real()
    }

    fn imag_sign(&self) -> Sign {
        if self.order <= 2 {
            return Sign::Zero;
        }
        // (z - z̄)(ζ - ζ⁻¹) = -4 Im(z) sin(2π/N), real; sin(2π/N) > 0.
        let diff = self.clone() - self.conj_exact();
        if diff.is_zero_exact() {
            return Sign::Zero;
        }
        let zeta = CycloNumber::cyclo(self.order, 1).expect("order >= 1");
        let w = diff * (zeta.clone() - zeta.conj_exact());
        match w.sign_of_real().expect("product is real") {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
        }
    }

    fn to_c64(&self) -> Complex64 {
        self.to_complex()
    }

    fn pivot_score(&self) -> f64 {
        if self.is_zero_exact() {
            0.0
        } else {
            // prefer short representations to limit coefficient growth
            let nonzero = self.num.iter().filter(|c| !c.is_zero()).count();
            let height: u64 = self.num.iter().map(|c| c.bits()).sum::<u64>() + self.den.bits();
            1.0 / (1.0 + nonzero as f64 + height as f64)
        }
    }

    fn ambient_order(&self) -> Option<u64> {
        Some(self.order)
    }

    fn unit_circle_candidates(coeffs: &[Self], backend: &Backend) -> Result<Vec<Self>> {
        let base = match backend {
            Backend::ExactCyclotomic { order } => *order,
            Backend::FloatComplex { .. } => {
                return Err(Error::Backend(
                    "exact scalars used with a float backend".into(),
                ))
            }
        };
        let mut order = coeffs
            .iter()
            .fold(base.max(1), |acc, c| acc.lcm(&c.order));
        order = order.lcm(&2);
        let mut out: Vec<CycloNumber> = (0..order as i64)
            .map(|k| CycloNumber::cyclo(order, k))
            .collect::<Result<_>>()?;
        // Roots of unity outside the ambient field: snap numerical roots to
        // nearby fractions k/n. A root of order n has degree
        // φ(lcm(n, M))/φ(M) <= deg over ℚ(ζ_M), so φ(n) <= deg·φ(M), which
        // bounds n by 2(deg·φ(M))². Callers verify candidates exactly.
        let field_order = coeffs.iter().fold(1u64, |acc, c| acc.lcm(&c.order));
        let deg = coeffs.len().saturating_sub(1) as u64;
        let phi_bound = deg * euler_phi(field_order);
        let n_max = (2 * phi_bound * phi_bound).clamp(2, 1 << 20);
        let approx: Vec<Complex64> = coeffs.iter().map(CycloNumber::to_complex).collect();
        let mut seen: Vec<(u64, u64)> = Vec::new();
        for r in polynomial_roots(&approx) {
            if (r.norm() - 1.0).abs() > 1e-3 {
                continue;
            }
            let frac = (r.arg() / std::f64::consts::TAU).rem_euclid(1.0);
            for (k, n) in convergents(frac, n_max) {
                if (frac - k as f64 / n as f64).abs() > 1e-3 || order % n == 0 {
                    continue;
                }
                if euler_phi(n) > phi_bound || seen.contains(&(k, n)) {
                    continue;
                }
                // exact tables for large n are expensive; screen mod p first
                if !crate::modp::may_vanish_at(coeffs, n, k) {
                    continue;
                }
                seen.push((k, n));
                out.push(CycloNumber::cyclo(n, k as i64)?);
            }
        }
        Ok(out)
    }
}

impl Serialize for CycloNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            order: u64,
            coeffs: Vec<String>,
        }
        Repr {
            order: self.order,
            coeffs: self.coeffs().iter().map(format_rational).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycloNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Full { order: u64, coeffs: Vec<CoeffRepr> },
            Root { order: u64, exponent: i64 },
            Int(i64),
            Text(String),
        }
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum CoeffRepr {
            Int(i64),
            Text(String),
        }
        let to_q = |c: CoeffRepr| -> Result<BigRational> {
            match c {
                CoeffRepr::Int(i) => Ok(BigRational::from(BigInt::from(i))),
                CoeffRepr::Text(t) => parse_rational(&t),
            }
        };
        match Repr::deserialize(d)? {
            Repr::Full { order, coeffs } => {
                let qs = coeffs
                    .into_iter()
                    .map(to_q)
                    .collect::<Result<Vec<_>>>()
                    .map_err(D::Error::custom)?;
                CycloNumber::from_coeffs(order, &qs).map_err(D::Error::custom)
            }
            Repr::Root { order, exponent } => {
                CycloNumber::cyclo(order, exponent).map_err(D::Error::custom)
            }
            Repr::Int(i) => Ok(CycloNumber::from_int(i)),
            Repr::Text(t) => parse_rational(&t)
                .map(|q| CycloNumber::from_rational(&q))
                .map_err(D::Error::custom),
        }
    }
}

// ---------------------------------------------------------------------------
// Float backend
// ---------------------------------------------------------------------------

/// Complex double with a zero tolerance. A tolerance of `0.0` means "unset"
/// and falls back to [`DEFAULT_FLOAT_TOLERANCE`]; binary operations keep the
/// larger of the two tolerances.
#[derive(Clone, Copy, PartialEq)]
pub struct FloatComplex {
    pub value: Complex64,
    tol: f64,
}

impl FloatComplex {
    pub fn new(re: f64, im: f64) -> Self {
        FloatComplex {
            value: Complex64::new(re, im),
            tol: 0.0,
        }
    }

    pub fn with_tolerance(value: Complex64, tol: f64) -> Self {
        FloatComplex { value, tol }
    }

    pub fn tolerance(&self) -> f64 {
        if self.tol > 0.0 {
            self.tol
        } else {
            DEFAULT_FLOAT_TOLERANCE
        }
    }

    fn combine(a: f64, b: f64) -> f64 {
        a.max(b)
    }
}

impl fmt::Debug for FloatComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FloatComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.value;
        if z.im.abs() < self.tolerance() {
            write!(f, "{:.12}", z.re)
        } else {
            write!(f, "{:.12}{:+.12}i", z.re, z.im)
        }
    }
}

impl Add for FloatComplex {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        FloatComplex::with_tolerance(self.value + rhs.value, Self::combine(self.tol, rhs.tol))
    }
}

impl Sub for FloatComplex {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        FloatComplex::with_tolerance(self.value - rhs.value, Self::combine(self.tol, rhs.tol))
    }
}

impl Mul for FloatComplex {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        FloatComplex::with_tolerance(self.value * rhs.value, Self::combine(self.tol, rhs.tol))
    }
}

impl Neg for FloatComplex {
    type Output = Self;
    fn neg(self) -> Self {
        FloatComplex::with_tolerance(-self.value, self.tol)
    }
}

impl Ring for FloatComplex {
    fn zero() -> Self {
        FloatComplex::new(0.0, 0.0)
    }
    fn one() -> Self {
        FloatComplex::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.value.norm() < self.tolerance()
    }
}

impl Involution for FloatComplex {
    fn conj(&self) -> Self {
        FloatComplex::with_tolerance(self.value.conj(), self.tol)
    }
}

impl Scalar for FloatComplex {
    fn from_i64(n: i64) -> Self {
        FloatComplex::new(n as f64, 0.0)
    }

    fn from_rational(q: &BigRational) -> Self {
        FloatComplex::new(q.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn from_cyclo(z: &CycloNumber) -> Self {
        let c = z.to_complex();
        FloatComplex::new(c.re, c.im)
    }

    fn root_of_unity(order: u64, exponent: i64) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidOrder(0));
        }
        let theta = 2.0 * std::f64::consts::PI * (exponent.rem_euclid(order as i64) as f64)
            / order as f64;
        Ok(FloatComplex::new(theta.cos(), theta.sin()))
    }

    fn inv(&self) -> Option<Self> {
        (!self.is_zero()).then(|| FloatComplex::with_tolerance(self.value.inv(), self.tol))
    }

    fn sign_real(&self) -> Result<Sign> {
        let tol = self.tolerance();
        if self.value.im.abs() >= tol {
            return Err(Error::domain(format!("{self} is not real")));
        }
        Ok(if self.value.re.abs() < tol {
            Sign::Zero
        } else if self.value.re > 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        })
    }

    fn imag_sign(&self) -> Sign {
        let im = self.value.im;
        if im.abs() < self.tolerance() {
            Sign::Zero
        } else if im > 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    fn to_c64(&self) -> Complex64 {
        self.value
    }

    fn pivot_score(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.value.norm()
        }
    }

    fn ambient_order(&self) -> Option<u64> {
        None
    }

    fn unit_circle_candidates(coeffs: &[Self], backend: &Backend) -> Result<Vec<Self>> {
        let tol = match backend {
            Backend::FloatComplex { tolerance } => *tolerance,
            Backend::ExactCyclotomic { .. } => {
                return Err(Error::Backend(
                    "float scalars used with an exact backend".into(),
                ))
            }
        };
        let poly: Vec<Complex64> = coeffs.iter().map(|c| c.value).collect();
        let roots = polynomial_roots(&poly);
        // Multiple roots scatter by roughly eps^(1/m); cluster generously and
        // average, which recovers the centre accurately.
        let cluster_radius = 1e-4_f64.max(tol.sqrt());
        let mut clusters: Vec<(Complex64, usize)> = Vec::new();
        for r in roots {
            if let Some(c) = clusters
                .iter_mut()
                .find(|(c, n)| (*c / *n as f64 - r).norm() < cluster_radius)
            {
                c.0 += r;
                c.1 += 1;
            } else {
                clusters.push((r, 1));
            }
        }
        Ok(clusters
            .into_iter()
            .map(|(s, n)| s / n as f64)
            .filter(|r| (r.norm() - 1.0).abs() < cluster_radius)
            .map(|r| FloatComplex::with_tolerance(r / r.norm(), tol))
            .collect())
    }

    fn with_backend(self, backend: &Backend) -> Self {
        match backend {
            Backend::FloatComplex { tolerance } => FloatComplex::with_tolerance(self.value, *tolerance),
            Backend::ExactCyclotomic { .. } => self,
        }
    }
}

/// Continued-fraction convergents `k/n` of `x ∈ [0, 1)` with `n <= n_max`,
/// in lowest terms.
fn convergents(x: f64, n_max: u64) -> Vec<(u64, u64)> {
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut rest = x;
    let mut out = Vec::new();
    for _ in 0..64 {
        let a = rest.floor();
        let ai = a as u64;
        let (h2, k2) = (ai.saturating_mul(h1).saturating_add(h0), ai.saturating_mul(k1).saturating_add(k0));
        if k2 > n_max || k2 == 0 {
            break;
        }
        out.push((h2 % k2, k2));
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let f = rest - a;
        if f < 1e-12 {
            break;
        }
        rest = 1.0 / f;
    }
    out
}

/// All complex roots of `Σ coeffs[k] t^k` (Aberth–Ehrlich iteration).
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|x| x.norm() == 0.0) {
        c.pop();
    }
    let mut zero_roots = 0;
    while c.len() > 1 && c[0].norm() == 0.0 {
        c.remove(0);
        zero_roots += 1;
    }
    let deg = c.len().saturating_sub(1);
    let mut out = vec![Complex64::new(0.0, 0.0); zero_roots];
    if deg == 0 {
        return out;
    }
    let lead = c[deg];
    let monic: Vec<Complex64> = c.iter().map(|x| x / lead).collect();
    let radius = 1.0 + monic[..deg].iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            Complex64::from_polar(
                radius.min(2.0) * 0.9,
                2.0 * std::f64::consts::PI * (k as f64 + 0.25) / deg as f64,
            )
        })
        .collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for a in monic.iter().rev() {
            dp = dp * x + p;
            p = p * x + a;
        }
        (p, dp)
    };
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..deg {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let sum: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm());
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    out.extend(z);
    out
}
