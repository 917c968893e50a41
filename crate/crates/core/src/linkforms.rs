//! Linking forms over Λ and their signature jumps.
//!
//! A form is stored as a presentation of the module together with a matrix
//! model of the pairing:
//!
//! * `H = coker(R) = Λⁿ / R·Λⁿ` for a square relation matrix `R` with
//!   `det R != 0`,
//! * `λ(x, y) = xᵀ (N/δ) ȳ  mod Λ`, with `N` a Λ-matrix and `δ ∈ Λ`.
//!
//! Hermitian presentations `A` (with `invol(A)ᵀ = A`) fit in as `R = A`,
//! `N/δ = A⁻ᵀ`. Keeping the pairing separate from the relations is what makes
//! the odd complex elementary forms representable: their pairing
//! `sgn(Im ξ)·ε·(1 - ξt)/D` is not the inverse of any Hermitian 1×1 matrix.
//!
//! The jump `δσ(ξ)` is computed by dévissage when the `ξ`-primary part is
//! `p_ξ`-torsion, and otherwise through the trace map: the χ-pushforward is a
//! skew-isometric structure whose Milnor signature at `ξ` equals `-2·δσ(ξ)`
//! (real flavor) or `-sgn(Im ξ)·δσ(ξ)` (complex flavor).

use serde::{Deserialize, Serialize};

use crate::cyclofield::CycloNumber;
use crate::error::{Error, Result};
use crate::field::{Backend, FieldFlavor, FlavorKind, Ring, Scalar, Sign};
use crate::hermforms::hermitian_inertia;
use crate::isostruct::{milnor_signature, SkewIsometricStructure};
use crate::laurent::{basic_poly, poly_adjugate, poly_det, smith_normal_form, BasicPolynomial, LaurentPoly, RationalFunction, SmithForm};
use crate::matrix::Matrix;
use crate::trace::TraceKernel;

type Poly<S> = LaurentPoly<S>;
type PolyMatrix<S> = Matrix<LaurentPoly<S>>;

#[derive(Clone, Debug, PartialEq)]
pub struct LinkingForm<S> {
    relations: PolyMatrix<S>,
    numerator: PolyMatrix<S>,
    denominator: Poly<S>,
    flavor: FieldFlavor,
}

fn invol_transpose<S: Scalar>(m: &PolyMatrix<S>) -> PolyMatrix<S> {
    m.transpose().map(Poly::invol)
}

fn entrywise_invol<S: Scalar>(m: &PolyMatrix<S>) -> PolyMatrix<S> {
    m.map(Poly::invol)
}

/// Inverse of a matrix over Λ whose determinant is a unit.
pub fn unimodular_inverse<S: Scalar>(u: &PolyMatrix<S>) -> Result<PolyMatrix<S>> {
    if !u.is_square() {
        return Err(Error::domain("unimodular matrices are square"));
    }
    let det = poly_det(u);
    if !det.is_unit() {
        return Err(Error::domain("matrix is not invertible over Λ"));
    }
    let (k, c) = det.terms().next().map(|(k, c)| (k, c.clone())).unwrap();
    let inv = Poly::monomial(c.inv().unwrap(), -k);
    Ok(poly_adjugate(u).map(|x| x.clone() * inv.clone()))
}

impl<S: Scalar> LinkingForm<S> {
    /// Full validation: square nonsingular relations, Hermitian and well
    /// defined pairing, real coefficients in the real flavor, and a
    /// nonsingular pairing (checked through the χ-pushforward).
    pub fn new(
        relations: PolyMatrix<S>,
        numerator: PolyMatrix<S>,
        denominator: Poly<S>,
        flavor: FieldFlavor,
    ) -> Result<Self> {
        let form = Self::checked_shape(relations, numerator, denominator, flavor)?;
        chi_pushforward(&form).map_err(|e| match e {
            Error::Validation(msg) => Error::validation(format!("pairing is singular: {msg}")),
            other => other,
        })?;
        Ok(form)
    }

    fn checked_shape(
        relations: PolyMatrix<S>,
        numerator: PolyMatrix<S>,
        denominator: Poly<S>,
        flavor: FieldFlavor,
    ) -> Result<Self> {
        let n = relations.rows();
        if !relations.is_square() || !numerator.is_square() || numerator.rows() != n {
            return Err(Error::validation("relations and pairing must be square of equal size"));
        }
        if denominator.is_zero() {
            return Err(Error::validation("pairing denominator is zero"));
        }
        if poly_det(&relations).is_zero() {
            return Err(Error::validation("relation matrix is singular; the module is not torsion"));
        }
        if flavor.is_real() {
            let real = |p: &Poly<S>| p.terms().all(|(_, c)| c.is_real());
            if !relations.entries().chain(numerator.entries()).all(real) || !real(&denominator) {
                return Err(Error::validation("real flavor needs real coefficients"));
            }
        }
        // invol(G)ᵀ = G  ⇔  invol(N)ᵀ·δ = N·invol(δ)
        let lhs = invol_transpose(&numerator).map(|x| x.clone() * denominator.clone());
        let rhs = numerator.map(|x| x.clone() * denominator.invol());
        if lhs != rhs {
            return Err(Error::validation("pairing is not Hermitian"));
        }
        // λ(R z, y) ∈ Λ and λ(x, R z) ∈ Λ
        let left = relations.transpose().mul(&numerator);
        let right = numerator.mul(&entrywise_invol(&relations));
        if !left.entries().chain(right.entries()).all(|e| denominator.divides(e)) {
            return Err(Error::validation("pairing is not well defined on the presented module"));
        }
        Ok(LinkingForm {
            relations,
            numerator,
            denominator,
            flavor,
        })
    }

    /// Form presented by a Hermitian Λ-matrix `A`: `H = coker A`,
    /// `λ(x, y) = xᵀ A⁻ᵀ ȳ`.
    pub fn from_presentation(a: PolyMatrix<S>, flavor: FieldFlavor) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::validation("presentation matrix must be square"));
        }
        if invol_transpose(&a) != a {
            return Err(Error::validation("presentation matrix is not Hermitian"));
        }
        let det = poly_det(&a);
        if det.is_zero() {
            return Err(Error::validation("presentation matrix is singular"));
        }
        let numerator = poly_adjugate(&a.transpose());
        Self::new(a, numerator, det, flavor)
    }

    pub fn size(&self) -> usize {
        self.relations.rows()
    }

    pub fn relations(&self) -> &PolyMatrix<S> {
        &self.relations
    }

    pub fn numerator(&self) -> &PolyMatrix<S> {
        &self.numerator
    }

    pub fn denominator(&self) -> &Poly<S> {
        &self.denominator
    }

    pub fn flavor(&self) -> &FieldFlavor {
        &self.flavor
    }

    /// `⊕` with a common pairing denominator.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let g = self.denominator.gcd(&other.denominator);
        let a = other.denominator.exact_div(&g).expect("gcd divides");
        let b = self.denominator.exact_div(&g).expect("gcd divides");
        let d = self.denominator.clone() * a.clone();
        let n1 = self.numerator.map(|x| x.clone() * a.clone());
        let n2 = other.numerator.map(|x| x.clone() * b.clone());
        LinkingForm {
            relations: Matrix::block_diag(&[&self.relations, &other.relations]),
            numerator: Matrix::block_diag(&[&n1, &n2]),
            denominator: d,
            flavor: self.flavor.with_ambient(other.ambient_order()),
        }
    }

    /// Same module, pairing `-λ`.
    pub fn negated(&self) -> Self {
        LinkingForm {
            numerator: self.numerator.neg(),
            ..self.clone()
        }
    }

    /// Change of generators `x = U x'` together with a change of relations
    /// by `W`. Both must be invertible over Λ; the result is isometric.
    pub fn twist(&self, u: &PolyMatrix<S>, w: &PolyMatrix<S>) -> Result<Self> {
        let u_inv = unimodular_inverse(u)?;
        unimodular_inverse(w)?;
        Ok(LinkingForm {
            relations: u_inv.mul(&self.relations).mul(w),
            numerator: u.transpose().mul(&self.numerator).mul(&entrywise_invol(u)),
            denominator: self.denominator.clone(),
            flavor: self.flavor,
        })
    }

    fn ambient_order(&self) -> u64 {
        let entries = self
            .relations
            .entries()
            .chain(self.numerator.entries())
            .chain(std::iter::once(&self.denominator));
        entries.map(Poly::ambient_order).fold(1, num_integer::lcm)
    }

    pub fn with_backend(&self, backend: &Backend) -> Self {
        let conv = |m: &PolyMatrix<S>| m.map(|p| p.with_backend(backend));
        LinkingForm {
            relations: conv(&self.relations),
            numerator: conv(&self.numerator),
            denominator: self.denominator.with_backend(backend),
            flavor: FieldFlavor {
                kind: self.flavor.kind,
                backend: *backend,
            },
        }
    }
}

/// The elementary form `𝔢(n, ε, ξ, F)` on `Λ/D`:
///
/// * real: `D = p_ξⁿ`, `λ(1, 1) = ε/p_ξⁿ`;
/// * complex, `n` even: `D = (t - ξ)^{n/2}(t⁻¹ - ξ̄)^{n/2}`, `λ(1, 1) = ε/D`;
/// * complex, `n` odd: `D = (t - ξ)^{(n+1)/2}(t⁻¹ - ξ̄)^{(n-1)/2}`,
///   `λ(1, 1) = sgn(Im ξ)·ε·(1 - ξt)/D`.
///
/// In the real flavor `ξ` and `ξ̄` give the same form.
pub fn elementary_linking<S: Scalar>(n: u32, eps: i32, xi: &S, flavor: &FieldFlavor) -> Result<LinkingForm<S>> {
    if n == 0 {
        return Err(Error::domain("elementary forms need n >= 1"));
    }
    if eps.abs() != 1 {
        return Err(Error::domain("epsilon must be +1 or -1"));
    }
    if !xi.is_on_unit_circle() || xi.is_plus_minus_one() {
        return Err(Error::domain(format!("elementary forms need |xi| = 1, xi != ±1, got {xi}")));
    }
    let e = Poly::constant(S::from_i64(eps as i64));
    let flavor = match xi.ambient_order() {
        Some(o) => flavor.with_ambient(o),
        None => *flavor,
    };
    let (d, num) = match flavor.kind {
        FlavorKind::Real => {
            let xi = if xi.imag_sign() == Sign::Negative { xi.conj() } else { xi.clone() };
            let p = basic_poly(&xi, &flavor)?.poly().clone();
            (p.pow(n), e)
        }
        FlavorKind::Complex => {
            let lin = Poly::t() - Poly::constant(xi.clone());
            let lin_bar = lin.invol();
            if n % 2 == 0 {
                (lin.pow(n / 2) * lin_bar.pow(n / 2), e)
            } else {
                let s = S::from_i64(xi.imag_sign().to_i32() as i64);
                let twist = Poly::one() - Poly::monomial(xi.clone(), 1);
                (lin.pow(n.div_ceil(2)) * lin_bar.pow(n / 2), e * twist.scale(&s))
            }
        }
    };
    Ok(LinkingForm {
        relations: Matrix::diagonal(&[d.clone()]),
        numerator: Matrix::diagonal(&[num]),
        denominator: d,
        flavor,
    })
}

/// `λ(x, y)` as the canonical representative in `F(t)/Λ`.
pub fn eval_pairing<S: Scalar>(l: &LinkingForm<S>, x: &[Poly<S>], y: &[Poly<S>]) -> Result<RationalFunction<S>> {
    let raw = raw_pairing(l, x, y)?;
    Ok(RationalFunction::new(raw, l.denominator.clone())?.mod_lambda())
}

/// `xᵀ N ȳ`, the numerator of `λ(x, y)` over `δ`.
fn raw_pairing<S: Scalar>(l: &LinkingForm<S>, x: &[Poly<S>], y: &[Poly<S>]) -> Result<Poly<S>> {
    let n = l.size();
    if x.len() != n || y.len() != n {
        return Err(Error::domain(format!("pairing needs vectors of length {n}")));
    }
    let mut acc = Poly::zero();
    for i in 0..n {
        if x[i].is_zero() {
            continue;
        }
        let mut row = Poly::zero();
        for j in 0..n {
            if !y[j].is_zero() && !l.numerator[(i, j)].is_zero() {
                row = row + l.numerator[(i, j)].clone() * y[j].invol();
            }
        }
        acc = acc + x[i].clone() * row;
    }
    Ok(acc)
}

/// `m_p ∘ λ` on the `p`-torsion module, over the residue field `Λ/p`
/// identified with the ground field (complex flavor) or ℂ (real flavor)
/// through `t -> ξ`.
#[derive(Clone, Debug)]
pub struct DevissageForm<S> {
    pub p: BasicPolynomial<S>,
    /// `gram[(i, j)] = (p·λ(x_i, x_j))(ξ)`.
    pub gram: Matrix<S>,
    /// `ũ = (invol(p)/p)(ξ)`, with `gramᴴ = ũ·gram`.
    pub u_twist: S,
}

impl<S: Scalar> DevissageForm<S> {
    /// Positive multiple of `η` (`1` real, `iξ̄` complex) that turns the
    /// ũ-Hermitian gram into a Hermitian one. For the complex flavor this
    /// is `sgn(Im ξ)(1 - ξ̄²) = 2|Im ξ|·iξ̄`, which stays inside the field.
    pub fn eta(&self) -> S {
        match self.p.kind() {
            FlavorKind::Real => S::one(),
            FlavorKind::Complex => {
                let xi_bar = self.p.xi().conj();
                let s = S::from_i64(self.p.xi().imag_sign().to_i32() as i64);
                s * (S::one() - xi_bar.clone() * xi_bar)
            }
        }
    }

    /// `sign(η·gram)`.
    pub fn signature(&self) -> Result<i64> {
        let h = self.gram.scale(&self.eta());
        Ok(hermitian_inertia(&h)?.signature())
    }
}

struct Presentation<S> {
    snf: SmithForm<S>,
    diag: Vec<Poly<S>>,
}

fn presentation<S: Scalar>(l: &LinkingForm<S>) -> Presentation<S> {
    let snf = smith_normal_form(&l.relations);
    let diag = snf.diagonal();
    Presentation { snf, diag }
}

fn column<S: Scalar>(m: &PolyMatrix<S>, j: usize) -> Vec<Poly<S>> {
    m.column(j)
}

/// `ξ` as the flavor indexes it (positive imaginary part in the real
/// flavor), and its basic polynomial.
fn basic_for<S: Scalar>(xi: &S, flavor: &FieldFlavor) -> Result<BasicPolynomial<S>> {
    if !xi.is_on_unit_circle() {
        return Err(Error::domain(format!("{xi} is not on the unit circle")));
    }
    if xi.is_plus_minus_one() {
        return Err(Error::domain("signature jumps are not defined at ±1"));
    }
    let xi = match (flavor.kind, xi.imag_sign()) {
        (FlavorKind::Real, Sign::Negative) => xi.conj(),
        _ => xi.clone(),
    };
    basic_poly(&xi, flavor)
}

/// Generators `U⁻¹((d_i/p)·e_i)` of the `p`-primary part when every
/// invariant factor has `p`-valuation at most one.
fn torsion_generators<S: Scalar>(pres: &Presentation<S>, p: &Poly<S>) -> Option<Vec<Vec<Poly<S>>>> {
    let mut gens = Vec::new();
    for (i, d) in pres.diag.iter().enumerate() {
        let (v, rest) = d.valuation(p);
        match v {
            0 => {}
            1 => {
                let col = column(&pres.snf.u_inv, i);
                gens.push(col.into_iter().map(|c| c * rest.clone()).collect());
            }
            _ => return None,
        }
    }
    Some(gens)
}

fn devissage_from_generators<S: Scalar>(
    l: &LinkingForm<S>,
    basic: &BasicPolynomial<S>,
    gens: &[Vec<Poly<S>>],
) -> Result<DevissageForm<S>> {
    let p = basic.poly();
    let xi = basic.xi();
    let k = gens.len();
    let mut gram = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let num = raw_pairing(l, &gens[i], &gens[j])? * p.clone();
            let f = RationalFunction::new(num, l.denominator.clone())?;
            if !f.denominator().is_unit() {
                return Err(Error::Backend(format!(
                    "p·λ(x, y) is not a Laurent polynomial at {xi}; the generators are not p-torsion"
                )));
            }
            let value = f.numerator().eval(xi)?.div(&f.denominator().eval(xi)?)?;
            gram[(i, j)] = value;
        }
    }
    let u_twist = basic.symmetry_unit().eval(xi)?;
    Ok(DevissageForm {
        p: basic.clone(),
        gram,
        u_twist,
    })
}

/// The dévissage of a `p`-torsion form.
pub fn devissage<S: Scalar>(l: &LinkingForm<S>, p: &BasicPolynomial<S>) -> Result<DevissageForm<S>> {
    if p.is_degenerate() {
        return Err(Error::domain("dévissage needs a basic polynomial away from ±1"));
    }
    let pres = presentation(l);
    let pn = p.poly().normalized();
    if !pres.diag.iter().all(|d| d.divides(&pn)) {
        return Err(Error::precondition(
            "module is not p-torsion; use signature_jump, which handles p-primary parts through the trace map",
        ));
    }
    let gens = torsion_generators(&pres, &pn).expect("p-torsion modules have valuation <= 1");
    devissage_from_generators(l, p, &gens)
}

/// Skew-isometric structure `(H, χ∘λ, t)` on the monomial basis
/// `U⁻¹(t^j e_i)` of `⊕ Λ/(d_i)`.
pub fn chi_pushforward<S: Scalar>(l: &LinkingForm<S>) -> Result<SkewIsometricStructure<S>> {
    chi_pushforward_with(l, &presentation(l))
}

fn chi_pushforward_with<S: Scalar>(l: &LinkingForm<S>, pres: &Presentation<S>) -> Result<SkewIsometricStructure<S>> {
    // blocks (generator column, dimension, monic divisor)
    let mut blocks = Vec::new();
    for (i, d) in pres.diag.iter().enumerate() {
        if d.is_zero() {
            return Err(Error::domain("relation matrix is singular"));
        }
        let span = d.span().unwrap() as usize;
        if span > 0 {
            blocks.push((column(&pres.snf.u_inv, i), span, d.clone()));
        }
    }
    let dim: usize = blocks.iter().map(|b| b.1).sum();
    let offsets: Vec<usize> = blocks
        .iter()
        .scan(0, |acc, b| {
            let o = *acc;
            *acc += b.1;
            Some(o)
        })
        .collect();

    let mut kernel = TraceKernel::new(&l.denominator)?;
    let mut mu = Matrix::zeros(dim, dim);
    for (a, (ca, sa, _)) in blocks.iter().enumerate() {
        for (b, (cb, sb, _)) in blocks.iter().enumerate() {
            let pair = raw_pairing(l, ca, cb)?;
            // μ(t^j c_a, t^k c_b) = χ(t^{j-k} · pair/δ)
            for j in 0..*sa {
                for k in 0..*sb {
                    mu[(offsets[a] + j, offsets[b] + k)] = kernel.chi_shifted(&pair, j as i64 - k as i64)?;
                }
            }
        }
    }

    let mut t = Matrix::zeros(dim, dim);
    for (a, (_, s, d)) in blocks.iter().enumerate() {
        let o = offsets[a];
        for j in 0..s - 1 {
            t[(o + j + 1, o + j)] = S::one();
        }
        // t^s ≡ -Σ_{k<s} d_k t^k
        for k in 0..*s {
            t[(o + k, o + s - 1)] = -d.coeff(k as i64);
        }
    }
    SkewIsometricStructure::new(mu, t, l.flavor)
}

/// Which computation produced a jump.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpRoute {
    Devissage,
    Trace,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct JumpOptions {
    /// Compute both routes whenever dévissage applies.
    pub check_both_routes: bool,
    /// Skip dévissage even when it applies.
    pub force_trace: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JumpReport<S> {
    pub xi: S,
    pub value: i64,
    pub route: JumpRoute,
    pub devissage: Option<i64>,
    pub trace: Option<i64>,
}

impl<S> JumpReport<S> {
    /// False only when both routes ran and disagree.
    pub fn consistent(&self) -> bool {
        match (self.devissage, self.trace) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        }
    }
}

/// Constant `c` with `milnor_signature(χ(L), ξ) = c·δσ(ξ)`: `-2` for the
/// real flavor, `-sgn(Im ξ)` for the complex one.
pub fn trace_constant<S: Scalar>(xi: &S, kind: FlavorKind) -> i64 {
    match kind {
        FlavorKind::Real => -2,
        FlavorKind::Complex => -(xi.imag_sign().to_i32() as i64),
    }
}

fn jump_from_milnor<S: Scalar>(milnor: i64, xi: &S, kind: FlavorKind) -> Result<i64> {
    let c = trace_constant(xi, kind);
    if milnor % c != 0 {
        return Err(Error::Backend(format!(
            "Milnor signature {milnor} at {xi} is not divisible by {c}"
        )));
    }
    Ok(milnor / c)
}

/// Evaluates jumps at several points, sharing the Smith form and the
/// χ-pushforward between them.
pub struct JumpEvaluator<'a, S> {
    form: &'a LinkingForm<S>,
    pres: Presentation<S>,
    pushforward: Option<SkewIsometricStructure<S>>,
    options: JumpOptions,
}

impl<'a, S: Scalar> JumpEvaluator<'a, S> {
    pub fn new(form: &'a LinkingForm<S>, options: JumpOptions) -> Self {
        JumpEvaluator {
            form,
            pres: presentation(form),
            pushforward: None,
            options,
        }
    }

    fn trace_route(&mut self, xi: &S) -> Result<i64> {
        if self.pushforward.is_none() {
            self.pushforward = Some(chi_pushforward_with(self.form, &self.pres)?);
        }
        let s = self.pushforward.as_ref().unwrap();
        jump_from_milnor(milnor_signature(s, xi)?, xi, self.form.flavor.kind)
    }

    pub fn jump(&mut self, xi: &S) -> Result<JumpReport<S>> {
        let flavor = match xi.ambient_order() {
            Some(o) => self.form.flavor.with_ambient(o),
            None => self.form.flavor,
        };
        let basic = basic_for(xi, &flavor)?;
        let gens = if self.options.force_trace {
            None
        } else {
            torsion_generators(&self.pres, &basic.poly().normalized())
        };
        let devissage = match gens {
            Some(g) => Some(devissage_from_generators(self.form, &basic, &g)?.signature()?),
            None => None,
        };
        let trace = if devissage.is_none() || self.options.check_both_routes {
            Some(self.trace_route(xi)?)
        } else {
            None
        };
        let (value, route) = match (devissage, trace) {
            (Some(v), _) => (v, JumpRoute::Devissage),
            (None, Some(v)) => (v, JumpRoute::Trace),
            (None, None) => unreachable!("one route always runs"),
        };
        Ok(JumpReport {
            xi: xi.clone(),
            value,
            route,
            devissage,
            trace,
        })
    }
}

/// `δσ(ξ)`, by dévissage when the `ξ`-primary part is `p_ξ`-torsion and
/// through the trace map otherwise.
pub fn signature_jump<S: Scalar>(l: &LinkingForm<S>, xi: &S) -> Result<i64> {
    Ok(JumpEvaluator::new(l, JumpOptions::default()).jump(xi)?.value)
}

/// Like [`signature_jump`] with explicit route options.
pub fn signature_jump_report<S: Scalar>(l: &LinkingForm<S>, xi: &S, options: JumpOptions) -> Result<JumpReport<S>> {
    JumpEvaluator::new(l, options).jump(xi)
}

/// One entry of the `elementary` JSON shape.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ElementarySpec {
    pub n: u32,
    pub eps: i32,
    /// Root of unity `N/k`, meaning `exp(2πik/N)`.
    pub xi: String,
}

/// Accepted JSON shapes for linking forms.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LinkingFormJson {
    Presentation {
        presentation: Matrix<LaurentPoly<CycloNumber>>,
        flavor: FlavorKind,
    },
    Pairing {
        relations: Matrix<LaurentPoly<CycloNumber>>,
        pairing_numerator: Matrix<LaurentPoly<CycloNumber>>,
        pairing_denominator: LaurentPoly<CycloNumber>,
        flavor: FlavorKind,
    },
    Elementary {
        elementary: Vec<ElementarySpec>,
        flavor: FlavorKind,
    },
}

impl LinkingFormJson {
    pub fn flavor_kind(&self) -> FlavorKind {
        match self {
            LinkingFormJson::Presentation { flavor, .. }
            | LinkingFormJson::Pairing { flavor, .. }
            | LinkingFormJson::Elementary { flavor, .. } => *flavor,
        }
    }

    /// Builds the form in backend `S`. For the exact backend the ambient
    /// order is enlarged to cover every coefficient.
    pub fn build<S: Scalar>(&self, backend: Backend) -> Result<LinkingForm<S>> {
        let kind = self.flavor_kind();
        let conv = |p: &LaurentPoly<CycloNumber>| p.map(S::from_cyclo);
        let order_of = |ps: &mut dyn Iterator<Item = &LaurentPoly<CycloNumber>>| {
            ps.map(|p| p.terms().map(|(_, c)| c.order()).fold(1, num_integer::lcm))
                .fold(1, num_integer::lcm)
        };
        let flavor_for = |order: u64| FieldFlavor::new(kind, backend).map(|f| f.with_ambient(order));
        match self {
            LinkingFormJson::Presentation { presentation, .. } => {
                let flavor = flavor_for(order_of(&mut presentation.entries()))?;
                LinkingForm::from_presentation(presentation.map(conv), flavor)
            }
            LinkingFormJson::Pairing {
                relations,
                pairing_numerator,
                pairing_denominator,
                ..
            } => {
                let order = order_of(
                    &mut relations
                        .entries()
                        .chain(pairing_numerator.entries())
                        .chain(std::iter::once(pairing_denominator)),
                );
                LinkingForm::new(
                    relations.map(conv),
                    pairing_numerator.map(conv),
                    conv(pairing_denominator),
                    flavor_for(order)?,
                )
            }
            LinkingFormJson::Elementary { elementary, .. } => {
                let mut acc: Option<LinkingForm<S>> = None;
                if elementary.is_empty() {
                    return Err(Error::validation("elementary list is empty"));
                }
                for e in elementary {
                    let z = CycloNumber::parse_root_spec(&e.xi)?;
                    let flavor = flavor_for(z.order())?;
                    let form = elementary_linking(e.n, e.eps, &S::from_cyclo(&z), &flavor)?;
                    acc = Some(match acc {
                        None => form,
                        Some(a) => a.direct_sum(&form),
                    });
                }
                Ok(acc.unwrap())
            }
        }
    }

    pub fn from_form(l: &LinkingForm<CycloNumber>) -> Self {
        LinkingFormJson::Pairing {
            relations: l.relations.clone(),
            pairing_numerator: l.numerator.clone(),
            pairing_denominator: l.denominator.clone(),
            flavor: l.flavor.kind,
        }
    }
}
