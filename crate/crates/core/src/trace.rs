//! The trace map `χ: F(t)/Λ -> F`, the difference of the constant terms of
//! the ascending (`i₊`) and descending (`i₋`) series expansions.
//!
//! Only finitely many series coefficients ever matter, so everything here is
//! exact: the inverse of the denominator is expanded by the usual recursion
//! up to the index that the requested window needs, no further.

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::laurent::{LaurentPoly, RationalFunction};

/// Coefficients of a one-sided series in degrees `lo..=hi`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesWindow<S> {
    pub lo: i64,
    pub hi: i64,
    pub coeffs: Vec<S>,
}

impl<S: Scalar> SeriesWindow<S> {
    pub fn coeff(&self, degree: i64) -> S {
        if degree < self.lo || degree > self.hi {
            return S::zero();
        }
        self.coeffs[(degree - self.lo) as usize].clone()
    }

    pub fn to_poly(&self) -> LaurentPoly<S> {
        LaurentPoly::from_coeffs(self.lo, self.coeffs.clone())
    }
}

/// Inverse of a power series with nonzero constant term, to `len` terms.
fn series_inverse<S: Scalar>(q: &[S], len: usize) -> Result<Vec<S>> {
    let q0_inv = q
        .first()
        .and_then(Scalar::inv)
        .ok_or_else(|| Error::domain("series with vanishing constant term"))?;
    let mut inv: Vec<S> = Vec::with_capacity(len);
    for i in 0..len {
        if i == 0 {
            inv.push(q0_inv.clone());
            continue;
        }
        let mut acc = S::zero();
        for l in 1..=i.min(q.len() - 1) {
            if !q[l].is_zero() {
                acc = acc + q[l].clone() * inv[i - l].clone();
            }
        }
        inv.push(-(acc * q0_inv.clone()));
    }
    Ok(inv)
}

/// Precomputed expansions of `1/d` for a fixed denominator, answering
/// coefficient queries of `i₊(n/d)` and `i₋(n/d)` for many numerators.
///
/// With `d = t^k q(t)`, `q(0) != 0`, the ascending coefficient of `n/d` in
/// degree `m` is `Σ_j n_j [q⁻¹]_{m+k-j}`. With `d = t^h r(t⁻¹)`, `r(0) != 0`,
/// the descending one is `Σ_j n_j [r⁻¹]_{j-h-m}`.
#[derive(Clone, Debug)]
pub struct TraceKernel<S> {
    k: i64,
    h: i64,
    q: Vec<S>,
    r: Vec<S>,
    plus_inv: Vec<S>,
    minus_inv: Vec<S>,
}

impl<S: Scalar> TraceKernel<S> {
    pub fn new(denominator: &LaurentPoly<S>) -> Result<Self> {
        let (k, q) = denominator.to_dense();
        if q.is_empty() {
            return Err(Error::domain("zero denominator"));
        }
        let h = denominator.max_degree().unwrap();
        let r: Vec<S> = q.iter().rev().cloned().collect();
        Ok(TraceKernel {
            k,
            h,
            q,
            r,
            plus_inv: Vec::new(),
            minus_inv: Vec::new(),
        })
    }

    fn ensure(&mut self, plus_len: usize, minus_len: usize) -> Result<()> {
        if plus_len > self.plus_inv.len() {
            self.plus_inv = series_inverse(&self.q, plus_len)?;
        }
        if minus_len > self.minus_inv.len() {
            self.minus_inv = series_inverse(&self.r, minus_len)?;
        }
        Ok(())
    }

    /// Coefficient of `t^m` in `i₊(n/d)`.
    pub fn plus_coeff(&mut self, n: &LaurentPoly<S>, m: i64) -> Result<S> {
        let Some(lo) = n.min_degree() else {
            return Ok(S::zero());
        };
        let need = m + self.k - lo + 1;
        if need <= 0 {
            return Ok(S::zero());
        }
        self.ensure(need as usize, 0)?;
        let mut acc = S::zero();
        for (j, c) in n.terms() {
            let idx = m + self.k - j;
            if idx >= 0 {
                acc = acc + c.clone() * self.plus_inv[idx as usize].clone();
            }
        }
        Ok(acc)
    }

    /// Coefficient of `t^m` in `i₋(n/d)`.
    pub fn minus_coeff(&mut self, n: &LaurentPoly<S>, m: i64) -> Result<S> {
        let Some(hi) = n.max_degree() else {
            return Ok(S::zero());
        };
        let need = hi - self.h - m + 1;
        if need <= 0 {
            return Ok(S::zero());
        }
        self.ensure(0, need as usize)?;
        let mut acc = S::zero();
        for (j, c) in n.terms() {
            let idx = j - self.h - m;
            if idx >= 0 {
                acc = acc + c.clone() * self.minus_inv[idx as usize].clone();
            }
        }
        Ok(acc)
    }

    /// `χ(n/d)`.
    pub fn chi(&mut self, n: &LaurentPoly<S>) -> Result<S> {
        Ok(self.plus_coeff(n, 0)? - self.minus_coeff(n, 0)?)
    }

    /// `χ(t^s · n/d)`, which is the coefficient of `t^{-s}` in `i₊ - i₋`.
    pub fn chi_shifted(&mut self, n: &LaurentPoly<S>, s: i64) -> Result<S> {
        Ok(self.plus_coeff(n, -s)? - self.minus_coeff(n, -s)?)
    }
}

/// Ascending expansion `i₊(f)` in degrees up to `hi`. The window starts at
/// the lowest nonzero degree (or 0, whichever is smaller).
pub fn expand_plus<S: Scalar>(f: &RationalFunction<S>, hi: i64) -> Result<SeriesWindow<S>> {
    let mut kernel = TraceKernel::new(f.denominator())?;
    let n = f.numerator();
    let start = n
        .min_degree()
        .map_or(0, |lo| lo - kernel.k)
        .min(0);
    let hi = hi.max(0);
    let coeffs = (start..=hi)
        .map(|m| kernel.plus_coeff(n, m))
        .collect::<Result<_>>()?;
    Ok(SeriesWindow {
        lo: start,
        hi,
        coeffs,
    })
}

/// Descending expansion `i₋(f)` in degrees down to `lo`.
pub fn expand_minus<S: Scalar>(f: &RationalFunction<S>, lo: i64) -> Result<SeriesWindow<S>> {
    let mut kernel = TraceKernel::new(f.denominator())?;
    let n = f.numerator();
    let top = n.max_degree().map_or(0, |hi| hi - kernel.h).max(0);
    let lo = lo.min(0);
    let coeffs = (lo..=top)
        .map(|m| kernel.minus_coeff(n, m))
        .collect::<Result<_>>()?;
    Ok(SeriesWindow { lo, hi: top, coeffs })
}

/// `χ(f) = const(i₊ f) - const(i₋ f)`.
pub fn trace_chi<S: Scalar>(f: &RationalFunction<S>) -> Result<S> {
    chi_of(f.numerator(), f.denominator())
}

/// `χ(n/d)` without reducing the fraction first.
pub fn chi_of<S: Scalar>(n: &LaurentPoly<S>, d: &LaurentPoly<S>) -> Result<S> {
    TraceKernel::new(d)?.chi(n)
}
