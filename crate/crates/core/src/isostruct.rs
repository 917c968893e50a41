//! Skew-isometric structures `(H, μ, t)`: a nonsingular skew-Hermitian form
//! together with an isometry.
//!
//! The isometry acts on column vectors, so `μ(tx, ty) = μ(x, y)` becomes
//! `tᵀ μ t̄ = μ`. The symmetrization `b(x, y) = μ(tx, y) - μ(x, ty)` is the
//! Hermitian matrix `tᵀ μ - μ t̄`.

use serde::{Deserialize, Serialize};

use crate::cyclofield::CycloNumber;
use crate::error::{Error, Result};
use crate::field::{FieldFlavor, FlavorKind, Scalar, Sign};
use crate::hermforms::{hermitian_inertia, is_eps_hermitian, HermitianMatrix, SignatureReport};
use crate::laurent::{basic_poly, factor_basic, BasicPolynomial, LaurentPoly};
use crate::matrix::Matrix;

#[derive(Clone, Debug, PartialEq)]
pub struct SkewIsometricStructure<S> {
    mu: HermitianMatrix<S>,
    t: Matrix<S>,
}

impl<S: Scalar> SkewIsometricStructure<S> {
    /// Validates that `mu` is skew-Hermitian and nonsingular, `t` is an
    /// invertible isometry, and (real flavor) all entries are real.
    pub fn new(mu: Matrix<S>, t: Matrix<S>, flavor: FieldFlavor) -> Result<Self> {
        let n = mu.rows();
        if !mu.is_square() || !t.is_square() || t.rows() != n {
            return Err(Error::validation("mu and t must be square of the same size"));
        }
        if flavor.is_real() && !mu.entries().chain(t.entries()).all(Scalar::is_real) {
            return Err(Error::validation("real flavor needs real entries"));
        }
        if !is_eps_hermitian(&mu, -1) {
            return Err(Error::validation("mu is not skew-Hermitian"));
        }
        if !mu.is_invertible() {
            return Err(Error::validation("mu is singular"));
        }
        if !t.is_invertible() {
            return Err(Error::validation("t is not invertible"));
        }
        if !t.transpose().mul(&mu).mul(&t.conj()).approx_eq(&mu) {
            return Err(Error::validation("t is not an isometry of mu"));
        }
        let mu = HermitianMatrix::new(mu, -1, flavor)?;
        let t = t.with_backend(&flavor.backend);
        Ok(SkewIsometricStructure { mu, t })
    }

    pub fn dim(&self) -> usize {
        self.t.rows()
    }

    pub fn mu(&self) -> &Matrix<S> {
        self.mu.entries()
    }

    pub fn t(&self) -> &Matrix<S> {
        &self.t
    }

    pub fn flavor(&self) -> &FieldFlavor {
        self.mu.flavor()
    }

    fn from_parts_unchecked(mu: Matrix<S>, t: Matrix<S>, flavor: FieldFlavor) -> Self {
        SkewIsometricStructure {
            mu: HermitianMatrix::new(mu, -1, flavor).expect("skew-Hermitian by construction"),
            t,
        }
    }

    /// Structure in the basis given by the columns of an invertible `p`.
    pub fn base_change(&self, p: &Matrix<S>) -> Result<Self> {
        let p_inv = p
            .inverse()
            .ok_or_else(|| Error::domain("base change matrix is singular"))?;
        Ok(Self::from_parts_unchecked(
            p.transpose().mul(self.mu()).mul(&p.conj()),
            p_inv.mul(&self.t).mul(p),
            *self.flavor(),
        ))
    }

    /// Restriction to a `t`-invariant subspace spanned by the columns of
    /// `basis`. The restricted form must stay nonsingular.
    pub fn restrict(&self, basis: &Matrix<S>) -> Result<Self> {
        let t_img = self.t.mul(basis);
        let t_sub = basis
            .solve(&t_img)
            .ok_or_else(|| Error::domain("subspace is not t-invariant"))?;
        let mu_sub = basis.transpose().mul(self.mu()).mul(&basis.conj());
        Self::new(mu_sub, t_sub, *self.flavor())
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self::from_parts_unchecked(
            Matrix::block_diag(&[self.mu(), other.mu()]),
            Matrix::block_diag(&[&self.t, &other.t]),
            *self.flavor(),
        )
    }

    /// Same `t`, form `-μ`.
    pub fn negated(&self) -> Self {
        Self::from_parts_unchecked(self.mu().neg(), self.t.clone(), *self.flavor())
    }

    /// Characteristic polynomial of `t` as a Laurent polynomial.
    pub fn char_poly(&self) -> LaurentPoly<S> {
        LaurentPoly::from_coeffs(0, self.t.char_poly())
    }
}

/// The elementary structure `𝐞(1, 1, ξ, F)`.
///
/// Real flavor: `(F², [[0, 1], [-1, 0]], [[0, -1], [1, 2Re ξ]])`.
/// Complex flavor: `(F, [2i|Im ξ|], [ξ])`.
pub fn elementary_structure<S: Scalar>(xi: &S, flavor: &FieldFlavor) -> Result<SkewIsometricStructure<S>> {
    if !xi.is_on_unit_circle() || xi.is_plus_minus_one() {
        return Err(Error::domain(format!("elementary structures need |xi| = 1, xi != ±1, got {xi}")));
    }
    match flavor.kind {
        FlavorKind::Real => {
            let mu = Matrix::from_i64_rows(&[vec![0, 1], vec![-1, 0]])?;
            let t = Matrix::from_rows(vec![
                vec![S::zero(), -S::one()],
                vec![S::one(), xi.two_re()],
            ])?;
            SkewIsometricStructure::new(mu, t, *flavor)
        }
        FlavorKind::Complex => {
            // s(ξ - ξ̄) = 2i|Im ξ| with s = sign Im ξ
            let diff = xi.clone() - xi.conj();
            let entry = if xi.imag_sign() == Sign::Negative { -diff } else { diff };
            SkewIsometricStructure::new(Matrix::diagonal(&[entry]), Matrix::diagonal(&[xi.clone()]), *flavor)
        }
    }
}

/// `b = tᵀ μ - μ t̄`, possibly singular.
pub fn symmetrize<S: Scalar>(s: &SkewIsometricStructure<S>) -> HermitianMatrix<S> {
    let b = s.t.transpose().mul(s.mu()).sub(&s.mu().mul(&s.t.conj()));
    HermitianMatrix::new(b, 1, *s.flavor()).expect("symmetrization is Hermitian")
}

/// Signature of the symmetrization; zero pivots are not counted.
pub fn total_signature<S: Scalar>(s: &SkewIsometricStructure<S>) -> Result<i64> {
    Ok(symmetrize(s).signature()?.signature())
}

/// Generalized eigenspace of `t` for a basic polynomial.
#[derive(Clone, Debug)]
pub struct PrimaryPart<S> {
    pub basic: BasicPolynomial<S>,
    pub multiplicity: usize,
    pub basis: Matrix<S>,
    pub structure: SkewIsometricStructure<S>,
}

impl<S: Scalar> PrimaryPart<S> {
    pub fn xi(&self) -> &S {
        self.basic.xi()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn signature(&self) -> Result<SignatureReport> {
        symmetrize(&self.structure).signature()
    }
}

/// `H = ⊕ parts ⊕ unipotent ⊕ residual`, orthogonal for `μ`.
#[derive(Clone, Debug)]
pub struct PrimaryDecomposition<S> {
    pub parts: Vec<PrimaryPart<S>>,
    /// Parts at `t = ±1`, reported but excluded from the signature APIs.
    pub unipotent: Vec<PrimaryPart<S>>,
    /// Generalized eigenspaces of the non-basic factors of `char(t)`.
    pub residual: Matrix<S>,
}

fn saturated_kernel<S: Scalar>(
    t: &Matrix<S>,
    basic: &BasicPolynomial<S>,
    multiplicity: usize,
) -> Result<Matrix<S>> {
    let p = basic.eval_matrix(t)?;
    Ok(p.pow(multiplicity as u32).kernel())
}

pub fn primary_decomposition<S: Scalar>(s: &SkewIsometricStructure<S>) -> Result<PrimaryDecomposition<S>> {
    let flavor = s.flavor().with_ambient(s.char_poly().ambient_order());
    let fact = factor_basic(&s.char_poly(), &flavor)?;
    let mut parts = Vec::new();
    let mut unipotent = Vec::new();
    for (basic, m) in &fact.factors {
        let basis = saturated_kernel(&s.t, basic, *m)?;
        let part = PrimaryPart {
            basic: basic.clone(),
            multiplicity: *m,
            structure: s.restrict(&basis)?,
            basis,
        };
        if basic.is_degenerate() {
            unipotent.push(part);
        } else {
            parts.push(part);
        }
    }
    let residual = fact.residual.eval_matrix(&s.t)?.kernel();
    Ok(PrimaryDecomposition {
        parts,
        unipotent,
        residual,
    })
}

/// `ξ` normalized for the flavor: in the real flavor `ξ` and `ξ̄` index the
/// same basic polynomial, and the one with positive imaginary part is used.
fn flavor_xi<S: Scalar>(xi: &S, flavor: &FieldFlavor) -> Result<S> {
    if !xi.is_on_unit_circle() {
        return Err(Error::domain(format!("{xi} is not on the unit circle")));
    }
    if xi.is_plus_minus_one() {
        return Err(Error::domain("Milnor signatures are not defined at ±1"));
    }
    Ok(match (flavor.kind, xi.imag_sign()) {
        (FlavorKind::Real, Sign::Negative) => xi.conj(),
        _ => xi.clone(),
    })
}

/// The `ξ`-primary part of `t`, or `None` when `p_ξ` does not divide
/// `char(t)`.
pub fn primary_part<S: Scalar>(s: &SkewIsometricStructure<S>, xi: &S) -> Result<Option<PrimaryPart<S>>> {
    let xi = flavor_xi(xi, s.flavor())?;
    let basic = basic_poly(&xi, s.flavor())?;
    let (m, _) = s.char_poly().valuation(&basic.poly().normalized());
    if m == 0 {
        return Ok(None);
    }
    let basis = saturated_kernel(&s.t, &basic, m)?;
    let structure = s.restrict(&basis)?;
    Ok(Some(PrimaryPart {
        basic,
        multiplicity: m,
        basis,
        structure,
    }))
}

/// Signature of the symmetrization of the `ξ`-primary part.
pub fn milnor_signature<S: Scalar>(s: &SkewIsometricStructure<S>, xi: &S) -> Result<i64> {
    match primary_part(s, xi)? {
        Some(part) => Ok(part.signature()?.signature()),
        None => Ok(0),
    }
}

/// Same value computed by restricting the symmetrization of the whole
/// structure to the primary subspace.
pub fn milnor_signature_via_projection<S: Scalar>(s: &SkewIsometricStructure<S>, xi: &S) -> Result<i64> {
    match primary_part(s, xi)? {
        Some(part) => {
            let b = symmetrize(s).congruent(&part.basis);
            Ok(hermitian_inertia(b.entries())?.signature())
        }
        None => Ok(0),
    }
}

/// Every nonzero Milnor signature, as `(ξ, value)` pairs.
pub fn milnor_signatures<S: Scalar>(s: &SkewIsometricStructure<S>) -> Result<Vec<(S, i64)>> {
    primary_decomposition(s)?
        .parts
        .into_iter()
        .map(|p| Ok((p.xi().clone(), p.signature()?.signature())))
        .filter(|r| !matches!(r, Ok((_, 0))))
        .collect()
}

/// JSON shape `{"mu": [[...]], "t": [[...]], "flavor": "real" | "complex"}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StructureJson {
    pub mu: Matrix<CycloNumber>,
    pub t: Matrix<CycloNumber>,
    pub flavor: FlavorKind,
}

impl StructureJson {
    /// Exact structure over the smallest cyclotomic field containing the
    /// entries.
    pub fn to_exact(&self) -> Result<SkewIsometricStructure<CycloNumber>> {
        let order = self
            .mu
            .entries()
            .chain(self.t.entries())
            .map(CycloNumber::order)
            .fold(1, num_integer::lcm);
        let flavor = FieldFlavor::new(
            self.flavor,
            crate::field::Backend::ExactCyclotomic { order },
        )?;
        SkewIsometricStructure::new(self.mu.clone(), self.t.clone(), flavor)
    }

    /// Same structure in another backend (the float backend for instance).
    pub fn to_backend<S: Scalar>(&self, flavor: FieldFlavor) -> Result<SkewIsometricStructure<S>> {
        let conv = |m: &Matrix<CycloNumber>| m.map(S::from_cyclo);
        SkewIsometricStructure::new(conv(&self.mu), conv(&self.t), FieldFlavor { kind: self.flavor, ..flavor })
    }

    pub fn from_structure(s: &SkewIsometricStructure<CycloNumber>) -> Self {
        StructureJson {
            mu: s.mu().clone(),
            t: s.t().clone(),
            flavor: s.flavor().kind,
        }
    }
}
