//! The Laurent ring `Λ = F[t, t⁻¹]` with the involution
//! `Σ a_k t^k -> Σ ā_k t^{-k}`, rational functions, basic polynomials and
//! Smith normal form over Λ.
//!
//! Λ is Euclidean for the degree span (highest minus lowest degree): after
//! factoring out a power of `t`, division happens in `F[t]`.
//!
//! Polynomials "up to units" are normalized to lowest degree 0 with leading
//! (highest-degree) coefficient 1.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{Backend, FieldFlavor, FlavorKind, Involution, Ring, Scalar, Sign};
use crate::matrix::Matrix;

/// Finitely supported map degree -> coefficient. Zero coefficients are never
/// stored.
#[derive(Clone, PartialEq)]
pub struct LaurentPoly<S> {
    terms: BTreeMap<i64, S>,
}

impl<S: Scalar> LaurentPoly<S> {
    pub fn monomial(c: S, degree: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(degree, c);
        }
        LaurentPoly { terms }
    }

    pub fn constant(c: S) -> Self {
        Self::monomial(c, 0)
    }

    /// The variable `t`.
    pub fn t() -> Self {
        Self::monomial(S::one(), 1)
    }

    /// `t^k`.
    pub fn t_pow(k: i64) -> Self {
        Self::monomial(S::one(), k)
    }

    /// Polynomial with `coeffs[i]` at degree `lo + i`.
    pub fn from_coeffs(lo: i64, coeffs: Vec<S>) -> Self {
        let terms = coeffs
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (lo + i as i64, c))
            .collect();
        LaurentPoly { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, S)>) -> Self {
        let mut out = LaurentPoly::zero();
        for (k, c) in terms {
            out = out + Self::monomial(c, k);
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &S)> {
        self.terms.iter().map(|(&k, c)| (k, c))
    }

    pub fn coeff(&self, degree: i64) -> S {
        self.terms.get(&degree).cloned().unwrap_or_else(S::zero)
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Highest minus lowest degree; `None` for zero.
    pub fn span(&self) -> Option<i64> {
        Some(self.max_degree()? - self.min_degree()?)
    }

    pub fn leading_coeff(&self) -> Option<&S> {
        self.terms.values().next_back()
    }

    pub fn lowest_coeff(&self) -> Option<&S> {
        self.terms.values().next()
    }

    /// Units of Λ are the nonzero monomials.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|&k| k == 0)
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(d, c)| (d + k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        if s.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(&d, c)| (d, c.clone() * s.clone()))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// The involution `Σ a_k t^k -> Σ ā_k t^{-k}`.
    pub fn invol(&self) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(&d, c)| (-d, c.conj())).collect(),
        }
    }

    /// Dense ascending coefficients of `t^{-lo} p` together with `lo`.
    pub fn to_dense(&self) -> (i64, Vec<S>) {
        let Some(lo) = self.min_degree() else {
            return (0, Vec::new());
        };
        let hi = self.max_degree().unwrap();
        let mut v = vec![S::zero(); (hi - lo + 1) as usize];
        for (&d, c) in &self.terms {
            v[(d - lo) as usize] = c.clone();
        }
        (lo, v)
    }

    pub fn eval(&self, x: &S) -> Result<S> {
        let Some(lo) = self.min_degree() else {
            return Ok(S::zero());
        };
        let (_, dense) = self.to_dense();
        let mut acc = S::zero();
        for c in dense.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        if lo == 0 {
            return Ok(acc);
        }
        let base = if lo > 0 {
            x.clone()
        } else {
            x.inv().ok_or_else(|| Error::domain("evaluation of t^-k at zero"))?
        };
        let mut p = S::one();
        for _ in 0..lo.unsigned_abs() {
            p = p * base.clone();
        }
        Ok(acc * p)
    }

    /// `Σ c_k A^k`, with `A⁻¹` used for negative degrees.
    pub fn eval_matrix(&self, a: &Matrix<S>) -> Result<Matrix<S>> {
        let Some(lo) = self.min_degree() else {
            return Ok(Matrix::zeros(a.rows(), a.cols()));
        };
        let (_, dense) = self.to_dense();
        let body = a.eval_poly(&dense);
        if lo == 0 {
            return Ok(body);
        }
        let base = if lo > 0 {
            a.clone()
        } else {
            a.inverse()
                .ok_or_else(|| Error::domain("negative powers of a singular matrix"))?
        };
        Ok(body.mul(&base.pow(lo.unsigned_abs() as u32)))
    }

    /// Unit `c·t^k` and normalized part `q` with `self = c·t^k·q`.
    pub fn split_unit(&self) -> Option<(Self, Self)> {
        let lo = self.min_degree()?;
        let lead = self.leading_coeff()?.clone();
        let inv = lead.inv()?;
        let unit = LaurentPoly::monomial(lead, lo);
        Some((unit, self.shift(-lo).scale(&inv)))
    }

    /// Representative up to units: lowest degree 0, leading coefficient 1.
    pub fn normalized(&self) -> Self {
        self.split_unit().map_or_else(LaurentPoly::zero, |(_, q)| q)
    }

    /// Euclidean division in Λ: `self = q·d + r` with `span(r) < span(d)`
    /// (or `r = 0`).
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        let (dlo, dd) = d.to_dense();
        if dd.is_empty() {
            return Err(Error::domain("division by the zero polynomial"));
        }
        if self.is_zero() {
            return Ok((LaurentPoly::zero(), LaurentPoly::zero()));
        }
        let (alo, ad) = self.to_dense();
        let (q, r) = poly_div_rem(&ad, &dd);
        let q = LaurentPoly::from_coeffs(alo - dlo, q);
        let r = LaurentPoly::from_coeffs(alo, r);
        Ok((q, r))
    }

    /// `self / d` when the division is exact in Λ.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(d).ok()?;
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, other: &Self) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.exact_div(self).is_some()
    }

    /// Normalized greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.normalized();
        let mut b = other.normalized();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("b is nonzero");
            a = b;
            b = r.normalized();
        }
        a
    }

    /// Largest `m` with `p^m | self` (`p` a non-unit), and the cofactor.
    pub fn valuation(&self, p: &Self) -> (usize, Self) {
        let mut m = 0;
        let mut cur = self.clone();
        if cur.is_zero() || p.is_unit() || p.is_zero() {
            return (0, cur);
        }
        while let Some(q) = cur.exact_div(p) {
            cur = q;
            m += 1;
        }
        (m, cur)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = LaurentPoly::one();
        for _ in 0..n {
            out = out * self.clone();
        }
        out
    }

    pub fn with_backend(&self, backend: &Backend) -> Self {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(&k, c)| (k, c.clone().with_backend(backend)))
                .collect(),
        }
    }

    /// Coefficientwise conversion, for instance into another backend.
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LaurentPoly<T> {
        LaurentPoly::from_terms(self.terms.iter().map(|(&k, c)| (k, f(c))))
    }

    /// Lowest common multiple of the coefficients' cyclotomic orders.
    pub fn ambient_order(&self) -> u64 {
        self.terms
            .values()
            .filter_map(Scalar::ambient_order)
            .fold(1, num_integer::lcm)
    }

    fn add_term(&mut self, k: i64, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&k) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(k, s);
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }
}

/// Division of dense ascending polynomials in `F[t]`.
fn poly_div_rem<S: Scalar>(a: &[S], d: &[S]) -> (Vec<S>, Vec<S>) {
    let mut r = a.to_vec();
    let dn = d.len() - 1;
    let lead_inv = d[dn].inv().expect("leading coefficient is nonzero");
    if r.len() <= dn {
        return (Vec::new(), r);
    }
    let mut q = vec![S::zero(); r.len() - dn];
    for k in (0..q.len()).rev() {
        let c = r[k + dn].clone() * lead_inv.clone();
        if c.is_zero() {
            r[k + dn] = S::zero();
            continue;
        }
        for (j, dj) in d.iter().enumerate() {
            if !dj.is_zero() {
                r[k + j] = r[k + j].clone() - c.clone() * dj.clone();
            }
        }
        r[k + dn] = S::zero();
        q[k] = c;
    }
    r.truncate(dn);
    (q, r)
}

impl<S: Scalar> Ring for LaurentPoly<S> {
    fn zero() -> Self {
        LaurentPoly {
            terms: BTreeMap::new(),
        }
    }
    fn one() -> Self {
        LaurentPoly::constant(S::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<S: Scalar> Involution for LaurentPoly<S> {
    fn conj(&self) -> Self {
        self.invol()
    }
}

impl<S: Scalar> Add for LaurentPoly<S> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (k, c) in rhs.terms {
            self.add_term(k, c);
        }
        self
    }
}

impl<S: Scalar> Sub for LaurentPoly<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<S: Scalar> Neg for LaurentPoly<S> {
    type Output = Self;
    fn neg(self) -> Self {
        LaurentPoly {
            terms: self.terms.into_iter().map(|(k, c)| (k, -c)).collect(),
        }
    }
}

impl<S: Scalar> Mul for LaurentPoly<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = LaurentPoly::zero();
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                out.add_term(a + b, x.clone() * y.clone());
            }
        }
        out
    }
}

impl<S: Scalar> fmt::Display for LaurentPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (&k, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let cs = c.to_string();
            let coef = if cs.contains(' ') {
                format!("({cs})")
            } else {
                cs
            };
            match k {
                0 => f.write_str(&coef)?,
                _ => {
                    let var = if k == 1 {
                        "t".to_string()
                    } else {
                        format!("t^{k}")
                    };
                    if c.is_one() {
                        f.write_str(&var)?;
                    } else {
                        write!(f, "{coef}*{var}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl<S: fmt::Debug> fmt::Debug for LaurentPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl<S: Scalar + Serialize> Serialize for LaurentPoly<S> {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        #[derive(Serialize)]
        struct Repr<'a, S> {
            terms: BTreeMap<String, &'a S>,
        }
        Repr {
            terms: self.terms.iter().map(|(k, c)| (k.to_string(), c)).collect(),
        }
        .serialize(s)
    }
}

impl<'de, S: Scalar + Deserialize<'de>> Deserialize<'de> for LaurentPoly<S> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr<S> {
            terms: BTreeMap<String, S>,
        }
        let repr = Repr::<S>::deserialize(d)?;
        let mut out = LaurentPoly::zero();
        for (k, c) in repr.terms {
            let k: i64 = k
                .trim()
                .parse()
                .map_err(|_| D::Error::custom(format!("bad degree {k:?}")))?;
            out.add_term(k, c);
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Rational functions
// ---------------------------------------------------------------------------

/// Quotient `numerator / denominator` in `F(t)`, kept in lowest terms with a
/// normalized denominator.
#[derive(Clone, PartialEq)]
pub struct RationalFunction<S> {
    numerator: LaurentPoly<S>,
    denominator: LaurentPoly<S>,
}

impl<S: Scalar> RationalFunction<S> {
    pub fn new(numerator: LaurentPoly<S>, denominator: LaurentPoly<S>) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::domain("zero denominator"));
        }
        Ok(Self::reduced(numerator, denominator))
    }

    /// Numerator and denominator exactly as given (no gcd reduction); used
    /// where only the class mod Λ or the expansions matter.
    pub fn unreduced(numerator: LaurentPoly<S>, denominator: LaurentPoly<S>) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::domain("zero denominator"));
        }
        Ok(RationalFunction {
            numerator,
            denominator,
        })
    }

    fn reduced(numerator: LaurentPoly<S>, denominator: LaurentPoly<S>) -> Self {
        if numerator.is_zero() {
            return RationalFunction::from_poly(LaurentPoly::zero());
        }
        let g = numerator.gcd(&denominator);
        let num = numerator.exact_div(&g).expect("gcd divides");
        let den = denominator.exact_div(&g).expect("gcd divides");
        let (unit, den) = den.split_unit().expect("denominator is nonzero");
        let unit_inv = LaurentPoly::monomial(
            unit.leading_coeff().unwrap().inv().unwrap(),
            -unit.min_degree().unwrap(),
        );
        RationalFunction {
            numerator: num * unit_inv,
            denominator: den,
        }
    }

    pub fn from_poly(p: LaurentPoly<S>) -> Self {
        RationalFunction {
            numerator: p,
            denominator: LaurentPoly::one(),
        }
    }

    pub fn numerator(&self) -> &LaurentPoly<S> {
        &self.numerator
    }

    pub fn denominator(&self) -> &LaurentPoly<S> {
        &self.denominator
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn invol(&self) -> Self {
        Self::reduced(self.numerator.invol(), self.denominator.invol())
    }

    pub fn recip(&self) -> Result<Self> {
        Self::new(self.denominator.clone(), self.numerator.clone())
    }

    pub fn mul_poly(&self, p: &LaurentPoly<S>) -> Self {
        Self::reduced(self.numerator.clone() * p.clone(), self.denominator.clone())
    }

    /// Canonical representative of the class in `F(t)/Λ`: lowest terms, a
    /// normalized denominator with `d(0) != 0`, and a polynomial numerator
    /// of degree below `deg d`. Zero when the function lies in Λ.
    pub fn mod_lambda(&self) -> Self {
        let f = Self::reduced(self.numerator.clone(), self.denominator.clone());
        let d = f.denominator;
        let deg = d.max_degree().unwrap_or(0);
        if deg == 0 {
            return RationalFunction::from_poly(LaurentPoly::zero());
        }
        let r = reduce_mod(&f.numerator, &d);
        Self::reduced(r, d)
    }

    pub fn with_backend(&self, backend: &Backend) -> Self {
        RationalFunction {
            numerator: self.numerator.with_backend(backend),
            denominator: self.denominator.with_backend(backend),
        }
    }
}

/// Residue of a Laurent polynomial in `F[t]/(d)` for normalized `d`
/// (`d(0) != 0`), as a polynomial of degree `< deg d`.
pub fn reduce_mod<S: Scalar>(p: &LaurentPoly<S>, d: &LaurentPoly<S>) -> LaurentPoly<S> {
    let (_, dd) = d.to_dense();
    // t⁻¹ ≡ -(d_1 + d_2 t + … + d_n t^{n-1}) / d_0  (mod d)
    let d0_inv = dd[0].inv().expect("d(0) is nonzero");
    let t_inv = LaurentPoly::from_coeffs(0, dd[1..].iter().map(|c| -(c.clone() * d0_inv.clone())).collect());
    let rem = |p: LaurentPoly<S>| -> LaurentPoly<S> {
        if p.is_zero() {
            return p;
        }
        let (lo, dense) = p.to_dense();
        debug_assert!(lo >= 0);
        let mut full = vec![S::zero(); lo as usize];
        full.extend(dense);
        let (_, r) = poly_div_rem(&full, &dd);
        LaurentPoly::from_coeffs(0, r)
    };
    let mut nonneg = LaurentPoly::zero();
    let mut neg: BTreeMap<i64, S> = BTreeMap::new();
    for (k, c) in p.terms() {
        if k >= 0 {
            nonneg.add_term(k, c.clone());
        } else {
            neg.insert(-k, c.clone());
        }
    }
    let mut acc = LaurentPoly::zero();
    if let Some(&top) = neg.keys().next_back() {
        // Horner in t⁻¹: Σ_{j>=1} c_j t^{-j} = t⁻¹(c_1 + t⁻¹(c_2 + …))
        for j in (1..=top).rev() {
            let c = neg.get(&j).cloned().unwrap_or_else(S::zero);
            acc = rem((acc + LaurentPoly::constant(c)) * t_inv.clone());
        }
    }
    rem(acc + nonneg)
}

impl<S: Scalar> Ring for RationalFunction<S> {
    fn zero() -> Self {
        RationalFunction::from_poly(LaurentPoly::zero())
    }
    fn one() -> Self {
        RationalFunction::from_poly(LaurentPoly::one())
    }
    fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }
}

impl<S: Scalar> Involution for RationalFunction<S> {
    fn conj(&self) -> Self {
        self.invol()
    }
}

impl<S: Scalar> Add for RationalFunction<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.denominator == rhs.denominator {
            return Self::reduced(self.numerator + rhs.numerator, self.denominator);
        }
        Self::reduced(
            self.numerator * rhs.denominator.clone() + rhs.numerator * self.denominator.clone(),
            self.denominator * rhs.denominator,
        )
    }
}

impl<S: Scalar> Sub for RationalFunction<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<S: Scalar> Neg for RationalFunction<S> {
    type Output = Self;
    fn neg(self) -> Self {
        RationalFunction {
            numerator: -self.numerator,
            denominator: self.denominator,
        }
    }
}

impl<S: Scalar> Mul for RationalFunction<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::reduced(
            self.numerator * rhs.numerator,
            self.denominator * rhs.denominator,
        )
    }
}

impl<S: Scalar> fmt::Display for RationalFunction<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denominator.is_one_poly() {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "({}) / ({})", self.numerator, self.denominator)
        }
    }
}

impl<S: fmt::Debug> fmt::Debug for RationalFunction<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} / {:?}", self.numerator, self.denominator)
    }
}

impl<S: Scalar> LaurentPoly<S> {
    fn is_one_poly(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(Scalar::is_one)
    }
}

// ---------------------------------------------------------------------------
// Basic polynomials
// ---------------------------------------------------------------------------

/// `p_ξ = t - 2Re(ξ) + t⁻¹` (real flavor, `Im ξ > 0`) or `p_ξ = t - ξ`
/// (complex flavor). The degenerate polynomials `t ∓ 1` at `ξ = ±1` are
/// representable but flagged.
#[derive(Clone, Debug, PartialEq)]
pub struct BasicPolynomial<S> {
    xi: S,
    kind: FlavorKind,
    poly: LaurentPoly<S>,
    degenerate: bool,
}

/// Builds `p_ξ`; requires `|ξ| = 1`, and `Im ξ > 0` for the real flavor.
pub fn basic_poly<S: Scalar>(xi: &S, flavor: &FieldFlavor) -> Result<BasicPolynomial<S>> {
    if !xi.is_on_unit_circle() {
        return Err(Error::domain(format!("{xi} is not on the unit circle")));
    }
    match flavor.kind {
        FlavorKind::Real => {
            if xi.imag_sign() != Sign::Positive {
                return Err(Error::domain(format!(
                    "real basic polynomials need Im(xi) > 0, got {xi}"
                )));
            }
            let poly = LaurentPoly::from_coeffs(-1, vec![S::one(), -xi.two_re(), S::one()]);
            Ok(BasicPolynomial {
                xi: xi.clone(),
                kind: FlavorKind::Real,
                poly,
                degenerate: false,
            })
        }
        FlavorKind::Complex => Ok(BasicPolynomial {
            xi: xi.clone(),
            kind: FlavorKind::Complex,
            poly: LaurentPoly::from_coeffs(0, vec![-xi.clone(), S::one()]),
            degenerate: xi.is_plus_minus_one(),
        }),
    }
}

impl<S: Scalar> BasicPolynomial<S> {
    /// The degenerate factor `t - s` for `s = ±1`, in either flavor.
    pub fn unipotent(sign: i32, kind: FlavorKind) -> Self {
        let s = S::from_i64(sign.signum() as i64);
        BasicPolynomial {
            xi: s.clone(),
            kind,
            poly: LaurentPoly::from_coeffs(0, vec![-s, S::one()]),
            degenerate: true,
        }
    }

    pub fn xi(&self) -> &S {
        &self.xi
    }

    pub fn kind(&self) -> FlavorKind {
        self.kind
    }

    pub fn poly(&self) -> &LaurentPoly<S> {
        &self.poly
    }

    /// True at `ξ = ±1`, which the signature operations exclude.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Dimension of `Λ/p` over the ground field.
    pub fn span(&self) -> usize {
        self.poly.span().unwrap_or(0) as usize
    }

    /// Whether `ξ'` indexes the same basic polynomial.
    pub fn matches(&self, other_xi: &S) -> bool {
        match self.kind {
            FlavorKind::Complex => self.xi.approx_eq(other_xi),
            FlavorKind::Real => {
                self.xi.approx_eq(other_xi) || self.xi.approx_eq(&other_xi.conj())
            }
        }
    }

    /// Unit `u` with `invol(p) = u·p`.
    pub fn symmetry_unit(&self) -> LaurentPoly<S> {
        self.poly
            .invol()
            .exact_div(&self.poly)
            .expect("basic polynomials are weakly symmetric")
    }

    /// `p(A)` for a square matrix `A` (negative powers use `A⁻¹`).
    pub fn eval_matrix(&self, a: &Matrix<S>) -> Result<Matrix<S>> {
        // t·p has nonnegative degrees, and t is invertible on the relevant
        // spaces, so kernels of p(A)^m and (A p(A))^m agree.
        self.poly.shift(-self.poly.min_degree().unwrap_or(0)).eval_matrix(a)
    }

    pub fn with_backend(&self, backend: &Backend) -> Self {
        BasicPolynomial {
            xi: self.xi.clone().with_backend(backend),
            kind: self.kind,
            poly: self.poly.with_backend(backend),
            degenerate: self.degenerate,
        }
    }
}

impl<S: Scalar> fmt::Display for BasicPolynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly)
    }
}

/// Output of [`factor_basic`]: `p = unit · Π factor^m · residual`.
#[derive(Clone, Debug)]
pub struct BasicFactorization<S> {
    pub unit: LaurentPoly<S>,
    pub factors: Vec<(BasicPolynomial<S>, usize)>,
    pub residual: LaurentPoly<S>,
}

impl<S: Scalar> BasicFactorization<S> {
    /// Multiplies the factorization back out.
    pub fn expand(&self) -> LaurentPoly<S> {
        let mut out = self.unit.clone() * self.residual.clone();
        for (b, m) in &self.factors {
            out = out * b.poly.pow(*m as u32);
        }
        out
    }

    /// Non-degenerate factors only.
    pub fn proper_factors(&self) -> impl Iterator<Item = &(BasicPolynomial<S>, usize)> {
        self.factors.iter().filter(|(b, _)| !b.is_degenerate())
    }
}

/// Splits off every basic polynomial (and the degenerate `t ∓ 1`) that the
/// backend can see. The exact backend tries `p_ξ` for all roots of unity of
/// the ambient order; the float backend uses numerically clustered roots.
/// Whatever remains is reported as the normalized residual.
pub fn factor_basic<S: Scalar>(p: &LaurentPoly<S>, flavor: &FieldFlavor) -> Result<BasicFactorization<S>> {
    let (unit, mut rest) = p
        .split_unit()
        .ok_or_else(|| Error::domain("cannot factor the zero polynomial"))?;
    let (_, dense) = rest.to_dense();
    let candidates = S::unit_circle_candidates(&dense, &flavor.backend)?;
    let mut factors = Vec::new();
    for xi in candidates {
        if rest.span().unwrap_or(0) == 0 {
            break;
        }
        let basic = if xi.is_plus_minus_one() {
            let s = if xi.is_one() { 1 } else { -1 };
            BasicPolynomial::unipotent(s, flavor.kind)
        } else {
            match flavor.kind {
                FlavorKind::Real if xi.imag_sign() != Sign::Positive => continue,
                _ => basic_poly(&xi, flavor)?,
            }
        };
        // cheap root test before dividing
        if !rest.eval(&xi)?.is_zero() {
            continue;
        }
        let (m, q) = rest.valuation(&basic.poly);
        if m > 0 {
            rest = q;
            factors.push((basic, m));
        }
    }
    // keep the residual normalized; fold its unit back into `unit`
    let (ru, rn) = rest.split_unit().expect("nonzero");
    let mut unit = unit * ru;
    // basic real polynomials carry a t⁻¹; normalize the unit's degree so the
    // product identity holds exactly
    let check = {
        let mut e = unit.clone() * rn.clone();
        for (b, m) in &factors {
            e = e * b.poly.pow(*m as u32);
        }
        e
    };
    if let (Some(a), Some(b)) = (p.min_degree(), check.min_degree()) {
        unit = unit.shift(a - b);
    }
    Ok(BasicFactorization {
        unit,
        factors,
        residual: rn,
    })
}

// ---------------------------------------------------------------------------
// Smith normal form over Λ
// ---------------------------------------------------------------------------

/// `U·A·W = D` with `U`, `W` invertible over Λ and `D` diagonal with
/// normalized entries `d₁ | d₂ | …`. `u_inv` is `U⁻¹`, tracked alongside.
#[derive(Clone, Debug)]
pub struct SmithForm<S> {
    pub u: Matrix<LaurentPoly<S>>,
    pub u_inv: Matrix<LaurentPoly<S>>,
    pub d: Matrix<LaurentPoly<S>>,
    pub w: Matrix<LaurentPoly<S>>,
}

impl<S: Scalar> SmithForm<S> {
    pub fn diagonal(&self) -> Vec<LaurentPoly<S>> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }
}

fn unit_inverse<S: Scalar>(u: &LaurentPoly<S>) -> LaurentPoly<S> {
    let (k, c) = u.terms().next().expect("unit is nonzero");
    LaurentPoly::monomial(c.inv().expect("unit coefficient is nonzero"), -k)
}

pub fn smith_normal_form<S: Scalar>(a: &Matrix<LaurentPoly<S>>) -> SmithForm<S> {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = Matrix::identity(m);
    let mut u_inv = Matrix::identity(m);
    let mut w = Matrix::identity(n);

    // row op helpers keep U and U⁻¹ in sync
    let row_add = |d: &mut Matrix<LaurentPoly<S>>,
                   u: &mut Matrix<LaurentPoly<S>>,
                   u_inv: &mut Matrix<LaurentPoly<S>>,
                   dst: usize,
                   src: usize,
                   c: &LaurentPoly<S>| {
        d.add_row_multiple(dst, src, c);
        u.add_row_multiple(dst, src, c);
        u_inv.add_col_multiple(src, dst, &(-c.clone()));
    };
    let row_swap = |d: &mut Matrix<LaurentPoly<S>>,
                    u: &mut Matrix<LaurentPoly<S>>,
                    u_inv: &mut Matrix<LaurentPoly<S>>,
                    a: usize,
                    b: usize| {
        d.swap_rows(a, b);
        u.swap_rows(a, b);
        u_inv.swap_cols(a, b);
    };

    for k in 0..m.min(n) {
        loop {
            // smallest-span nonzero entry of the trailing block
            let mut best: Option<(usize, usize, i64)> = None;
            for i in k..m {
                for j in k..n {
                    if let Some(s) = d[(i, j)].span() {
                        if best.map_or(true, |(_, _, b)| s < b) {
                            best = Some((i, j, s));
                        }
                    }
                }
            }
            let Some((pi, pj, _)) = best else {
                return finish(d, u, u_inv, w);
            };
            row_swap(&mut d, &mut u, &mut u_inv, k, pi);
            d.swap_cols(k, pj);
            w.swap_cols(k, pj);

            let pivot = d[(k, k)].clone();
            let mut clean = true;
            for i in k + 1..m {
                if d[(i, k)].is_zero() {
                    continue;
                }
                let (q, r) = d[(i, k)].div_rem(&pivot).expect("pivot is nonzero");
                row_add(&mut d, &mut u, &mut u_inv, i, k, &(-q));
                if !r.is_zero() {
                    clean = false;
                }
            }
            for j in k + 1..n {
                if d[(k, j)].is_zero() {
                    continue;
                }
                let (q, r) = d[(k, j)].div_rem(&pivot).expect("pivot is nonzero");
                d.add_col_multiple(j, k, &(-q.clone()));
                w.add_col_multiple(j, k, &(-q));
                if !r.is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility of the trailing block
            let mut offender = None;
            'outer: for i in k + 1..m {
                for j in k + 1..n {
                    if !pivot.divides(&d[(i, j)]) {
                        offender = Some(i);
                        break 'outer;
                    }
                }
            }
            match offender {
                Some(i) => {
                    row_add(&mut d, &mut u, &mut u_inv, k, i, &LaurentPoly::one());
                }
                None => break,
            }
        }
        // normalize the pivot
        let (unit, _) = d[(k, k)].split_unit().expect("pivot is nonzero");
        let inv = unit_inverse(&unit);
        for j in 0..n {
            let v = std::mem::replace(&mut d[(k, j)], LaurentPoly::zero());
            d[(k, j)] = v * inv.clone();
        }
        for j in 0..m {
            let v = std::mem::replace(&mut u[(k, j)], LaurentPoly::zero());
            u[(k, j)] = v * inv.clone();
            let v = std::mem::replace(&mut u_inv[(j, k)], LaurentPoly::zero());
            u_inv[(j, k)] = v * unit.clone();
        }
    }
    finish(d, u, u_inv, w)
}

fn finish<S: Scalar>(
    d: Matrix<LaurentPoly<S>>,
    u: Matrix<LaurentPoly<S>>,
    u_inv: Matrix<LaurentPoly<S>>,
    w: Matrix<LaurentPoly<S>>,
) -> SmithForm<S> {
    SmithForm { u, u_inv, d, w }
}

/// Determinant over Λ by fraction-free (Bareiss) elimination.
pub fn poly_det<S: Scalar>(a: &Matrix<LaurentPoly<S>>) -> LaurentPoly<S> {
    assert!(a.is_square());
    let n = a.rows();
    if n == 0 {
        return LaurentPoly::one();
    }
    let mut m = a.clone();
    let mut sign = LaurentPoly::one();
    let mut prev = LaurentPoly::one();
    for k in 0..n - 1 {
        if m[(k, k)].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[(i, k)].is_zero()) else {
                return LaurentPoly::zero();
            };
            m.swap_rows(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[(k, k)].clone() * m[(i, j)].clone() - m[(i, k)].clone() * m[(k, j)].clone();
                m[(i, j)] = v.exact_div(&prev).expect("Bareiss division is exact");
            }
        }
        prev = m[(k, k)].clone();
    }
    sign * m[(n - 1, n - 1)].clone()
}

/// Adjugate over Λ: `A · adj(A) = det(A) · I`.
pub fn poly_adjugate<S: Scalar>(a: &Matrix<LaurentPoly<S>>) -> Matrix<LaurentPoly<S>> {
    assert!(a.is_square());
    let n = a.rows();
    if n == 1 {
        return Matrix::identity(1);
    }
    Matrix::from_fn(n, n, |i, j| {
        let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
        let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
        let minor = poly_det(&a.select(&rows, &cols));
        if (i + j) % 2 == 0 {
            minor
        } else {
            -minor
        }
    })
}
