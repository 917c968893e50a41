//! Reduction of cyclotomic matrices modulo a prime `p ≡ 1 (mod N)`, where
//! `Φ_N` splits and `ζ_N` maps to a primitive root of unity in `F_p`.
//!
//! The reduction is a ring map on `p`-integral elements, so a nonzero
//! determinant mod `p` certifies invertibility over `ℚ(ζ_N)`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::cyclofield::CycloNumber;
use crate::matrix::Matrix;

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// A prime `p ≡ 1 (mod n)` near `2^31` and a primitive `n`-th root of unity
/// modulo `p`. Cached per order.
pub(crate) fn split_prime(n: u64) -> (u64, u64) {
    static CACHE: OnceLock<Mutex<HashMap<u64, (u64, u64)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("cache poisoned").get(&n) {
        return *v;
    }
    let mut p = (1u64 << 31) / n * n + 1;
    while !is_prime(p) {
        p += n;
    }
    let factors = prime_factors(n);
    let root = (2..p)
        .map(|x| pow_mod(x, (p - 1) / n, p))
        .find(|&r| factors.iter().all(|q| pow_mod(r, n / q, p) != 1))
        .expect("F_p* is cyclic");
    cache.lock().expect("cache poisoned").insert(n, (p, root));
    (p, root)
}

fn reduce_int(x: &BigInt, p: u64) -> u64 {
    let r = x % BigInt::from(p);
    let r = r.to_i64().expect("residue fits");
    r.rem_euclid(p as i64) as u64
}

/// `Σ num_k r^k / den` mod `p`, `None` when `p` divides `den`.
pub(crate) fn reduce(num: &[BigInt], den: &BigInt, root: u64, p: u64) -> Option<u64> {
    let d = reduce_int(den, p);
    if d == 0 {
        return None;
    }
    let mut acc = 0;
    let mut power = 1;
    for c in num {
        acc = (acc + mul_mod(reduce_int(c, p), power, p)) % p;
        power = mul_mod(power, root, p);
    }
    Some(mul_mod(acc, pow_mod(d, p - 2, p), p))
}

/// Whether the square matrix `a` is invertible over `F_p`.
fn invertible_mod_p(mut a: Vec<Vec<u64>>, p: u64) -> bool {
    let n = a.len();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| a[r][col] != 0) else {
            return false;
        };
        a.swap(col, piv);
        let inv = pow_mod(a[col][col], p - 2, p);
        for r in col + 1..n {
            if a[r][col] == 0 {
                continue;
            }
            let f = mul_mod(a[r][col], inv, p);
            for c in col..n {
                let sub = mul_mod(f, a[col][c], p);
                a[r][c] = (a[r][c] + p - sub) % p;
            }
        }
    }
    true
}

/// `true` when the reduction of `m` modulo a split prime is invertible,
/// which proves `m` invertible. `false` is inconclusive.
pub(crate) fn certify_invertible(m: &Matrix<CycloNumber>) -> bool {
    if !m.is_square() {
        return false;
    }
    let n = m.entries().map(CycloNumber::order).fold(1, num_integer::lcm);
    let (p, root) = split_prime(n);
    let mut rows = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        let mut row = Vec::with_capacity(m.cols());
        for j in 0..m.cols() {
            let x = &m[(i, j)];
            let (num, den) = x.parts();
            match reduce(num, den, pow_mod(root, n / x.order(), p), p) {
                Some(v) => row.push(v),
                None => return false,
            }
        }
        rows.push(row);
    }
    invertible_mod_p(rows, p)
}

/// `false` when `exp(2πik/n)` is provably not a root of `Σ coeffs[j] t^j`.
/// `true` is inconclusive. Never builds tables for `ℚ(ζ_n)`.
pub(crate) fn may_vanish_at(coeffs: &[CycloNumber], n: u64, k: u64) -> bool {
    let order = coeffs.iter().map(CycloNumber::order).fold(n, num_integer::lcm);
    if order > 1 << 24 {
        return true;
    }
    let (p, root) = split_prime(order);
    let x = pow_mod(root, (k % n) * (order / n), p);
    let mut acc = 0;
    for c in coeffs.iter().rev() {
        let (num, den) = c.parts();
        let Some(v) = reduce(num, den, pow_mod(root, order / c.order(), p), p) else {
            return true;
        };
        acc = (mul_mod(acc, x, p) + v) % p;
    }
    acc == 0
}
