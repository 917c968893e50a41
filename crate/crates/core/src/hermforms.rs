//! ε-Hermitian matrices and their signatures.
//!
//! Forms follow the convention `μ(x, y) = xᵀ M ȳ`, so a change of basis `P`
//! acts by `M -> Pᵀ M P̄` and the ε-Hermitian condition reads `M̄ᵀ = ε M`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldFlavor, Ring, Scalar, Sign};
use crate::matrix::Matrix;

/// Square matrix with `conj_transpose(entries) = epsilon · entries`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Serialize", deserialize = "S: Deserialize<'de> + Scalar"))]
pub struct HermitianMatrix<S> {
    epsilon: i32,
    entries: Matrix<S>,
    flavor: FieldFlavor,
}

/// Inertia of a Hermitian form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SignatureReport {
    pub positives: usize,
    pub negatives: usize,
    pub zeroes: usize,
}

impl SignatureReport {
    pub fn signature(&self) -> i64 {
        self.positives as i64 - self.negatives as i64
    }

    pub fn dimension(&self) -> usize {
        self.positives + self.negatives + self.zeroes
    }

    pub fn is_nonsingular(&self) -> bool {
        self.zeroes == 0
    }

    fn record(&mut self, s: Sign) {
        match s {
            Sign::Positive => self.positives += 1,
            Sign::Negative => self.negatives += 1,
            Sign::Zero => self.zeroes += 1,
        }
    }
}

impl std::ops::Add for SignatureReport {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        SignatureReport {
            positives: self.positives + o.positives,
            negatives: self.negatives + o.negatives,
            zeroes: self.zeroes + o.zeroes,
        }
    }
}

/// True iff `conj_transpose(a) = epsilon · a` (within tolerance on the float
/// backend).
pub fn is_eps_hermitian<S: Scalar>(a: &Matrix<S>, epsilon: i32) -> bool {
    if !a.is_square() || epsilon.abs() != 1 {
        return false;
    }
    let e = S::from_i64(epsilon as i64);
    a.conj_transpose().approx_eq(&a.scale(&e))
}

impl<S: Scalar> HermitianMatrix<S> {
    pub fn new(entries: Matrix<S>, epsilon: i32, flavor: FieldFlavor) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::domain("form matrix must be square"));
        }
        if !is_eps_hermitian(&entries, epsilon) {
            return Err(Error::domain(format!(
                "matrix is not {}-Hermitian",
                if epsilon == 1 { "" } else { "skew " }.trim()
            )));
        }
        let entries = entries.with_backend(&flavor.backend);
        Ok(HermitianMatrix {
            epsilon,
            entries,
            flavor,
        })
    }

    pub fn hermitian(entries: Matrix<S>, flavor: FieldFlavor) -> Result<Self> {
        Self::new(entries, 1, flavor)
    }

    pub fn epsilon(&self) -> i32 {
        self.epsilon
    }

    pub fn entries(&self) -> &Matrix<S> {
        &self.entries
    }

    pub fn flavor(&self) -> &FieldFlavor {
        &self.flavor
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    /// `Pᵀ M P̄`, the form in the basis given by the columns of `P`.
    pub fn congruent(&self, p: &Matrix<S>) -> Self {
        HermitianMatrix {
            epsilon: self.epsilon,
            entries: p.transpose().mul(&self.entries).mul(&p.conj()),
            flavor: self.flavor,
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        HermitianMatrix {
            epsilon: self.epsilon,
            entries: Matrix::block_diag(&[&self.entries, &other.entries]),
            flavor: self.flavor,
        }
    }

    pub fn neg(&self) -> Self {
        HermitianMatrix {
            epsilon: self.epsilon,
            entries: self.entries.neg(),
            flavor: self.flavor,
        }
    }

    pub fn rank(&self) -> usize {
        self.entries.rank()
    }

    /// Radical of the form, as columns.
    pub fn kernel(&self) -> Matrix<S> {
        self.entries.kernel()
    }

    pub fn is_nonsingular(&self) -> bool {
        self.entries.is_invertible()
    }

    /// Inertia by congruence diagonalization.
    pub fn signature(&self) -> Result<SignatureReport> {
        if self.epsilon != 1 {
            return Err(Error::domain("signature needs a Hermitian (ε = +1) form"));
        }
        hermitian_inertia(&self.entries)
    }
}

/// Inertia of a Hermitian matrix, without the flavor bookkeeping.
///
/// Diagonal pivots are taken greedily by [`Scalar::pivot_score`]. When the
/// remaining diagonal vanishes but some `H_ij = a` does not, the pair
/// `(i, j)` spans a hyperbolic plane contributing `(+1, -1)` and is split
/// off directly.
pub fn hermitian_inertia<S: Scalar>(h: &Matrix<S>) -> Result<SignatureReport> {
    if !is_eps_hermitian(h, 1) {
        return Err(Error::domain("matrix is not Hermitian"));
    }
    let mut m = h.clone();
    let mut active: Vec<usize> = (0..m.rows()).collect();
    let mut report = SignatureReport::default();

    while !active.is_empty() {
        let pivot = active
            .iter()
            .copied()
            .filter(|&i| !m[(i, i)].is_zero())
            .max_by(|&a, &b| m[(a, a)].pivot_score().total_cmp(&m[(b, b)].pivot_score()));
        if let Some(p) = pivot {
            let d = m[(p, p)].clone();
            report.record(d.sign_real()?);
            let d_inv = d.inv().expect("nonzero pivot");
            for &k in &active {
                if k == p || m[(k, p)].is_zero() {
                    continue;
                }
                let alpha = m[(k, p)].clone() * d_inv.clone();
                m.add_row_multiple(k, p, &(-alpha.clone()));
                m.add_col_multiple(k, p, &(-alpha.conj()));
            }
            active.retain(|&i| i != p);
            continue;
        }

        let pair = active
            .iter()
            .flat_map(|&i| active.iter().map(move |&j| (i, j)))
            .filter(|&(i, j)| i < j && !m[(i, j)].is_zero())
            .max_by(|&(a, b), &(c, d)| m[(a, b)].pivot_score().total_cmp(&m[(c, d)].pivot_score()));
        let Some((i, j)) = pair else {
            report.zeroes += active.len();
            break;
        };
        let a = m[(i, j)].clone();
        let a_inv = a.inv().expect("nonzero");
        let abar_inv = a.conj().inv().expect("nonzero");
        for &k in &active {
            if k == i || k == j {
                continue;
            }
            let alpha = m[(k, j)].clone() * a_inv.clone();
            let beta = m[(k, i)].clone() * abar_inv.clone();
            if !alpha.is_zero() {
                m.add_row_multiple(k, i, &(-alpha.clone()));
                m.add_col_multiple(k, i, &(-alpha.conj()));
            }
            if !beta.is_zero() {
                m.add_row_multiple(k, j, &(-beta.clone()));
                m.add_col_multiple(k, j, &(-beta.conj()));
            }
        }
        report.positives += 1;
        report.negatives += 1;
        active.retain(|&x| x != i && x != j);
    }
    Ok(report)
}

/// Checks that the column span of `l` is a metabolizer: isotropic, of half
/// dimension, for a nonsingular form, and `t`-invariant when `t` is given.
pub fn verify_metabolizer<S: Scalar>(
    h: &HermitianMatrix<S>,
    t: Option<&Matrix<S>>,
    l: &Matrix<S>,
) -> Result<bool> {
    if l.rows() != h.dim() {
        return Err(Error::domain("subspace basis has the wrong ambient dimension"));
    }
    if l.rank() != l.cols() {
        return Err(Error::domain("subspace basis columns are dependent"));
    }
    if 2 * l.cols() != h.dim() || !h.is_nonsingular() {
        return Ok(false);
    }
    if !h.congruent(l).entries().is_zero_approx() {
        return Ok(false);
    }
    if let Some(t) = t {
        let image = t.mul(l);
        if l.solve(&image).is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

impl<S: Scalar> Matrix<S> {
    fn is_zero_approx(&self) -> bool {
        self.entries().all(Ring::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclofield::{CycloNumber, FloatComplex};
    use crate::field::FlavorKind;
    use proptest::prelude::*;

    type C = CycloNumber;

    fn m(rows: &[Vec<i64>]) -> Matrix<C> {
        Matrix::from_i64_rows(rows).unwrap()
    }

    fn sig(rows: &[Vec<i64>]) -> SignatureReport {
        HermitianMatrix::hermitian(m(rows), FieldFlavor::real(1))
            .unwrap()
            .signature()
            .unwrap()
    }

    #[test]
    fn signature_examples() {
        let hyp = sig(&[vec![0, 1], vec![1, 0]]);
        assert_eq!((hyp.positives, hyp.negatives, hyp.zeroes), (1, 1, 0));
        let s = sig(&[vec![-2, 1], vec![1, -2]]);
        assert_eq!((s.positives, s.negatives, s.zeroes), (0, 2, 0));
        for k in [1, 2, 3, 5] {
            let a = C::cyclo(12, k).unwrap().two_re();
            let h = Matrix::from_rows(vec![
                vec![C::from_int(-2), a.clone()],
                vec![a, C::from_int(-2)],
            ])
            .unwrap();
            let r = hermitian_inertia(&h).unwrap();
            assert_eq!(r.signature(), -2);
        }
        let singular = sig(&[vec![1, 1], vec![1, 1]]);
        assert_eq!((singular.positives, singular.zeroes), (1, 1));
    }

    #[test]
    fn eps_hermitian_examples() {
        assert!(is_eps_hermitian(&m(&[vec![0, 1], vec![-1, 0]]), -1));
        assert!(!is_eps_hermitian(&m(&[vec![0, 1], vec![-1, 0]]), 1));
        let two_i = C::cyclo(4, 1).unwrap() * C::from_int(2);
        assert!(is_eps_hermitian(&Matrix::diagonal(&[two_i]), -1));
        assert!(HermitianMatrix::new(m(&[vec![1, 2], vec![3, 1]]), 1, FieldFlavor::real(1)).is_err());
    }

    #[test]
    fn metabolizer_examples() {
        let f = FieldFlavor::real(1);
        let hyp = HermitianMatrix::hermitian(m(&[vec![0, 1], vec![1, 0]]), f).unwrap();
        assert!(verify_metabolizer(&hyp, None, &m(&[vec![1], vec![0]])).unwrap());
        let split = HermitianMatrix::hermitian(m(&[vec![1, 0], vec![0, -1]]), f).unwrap();
        assert!(verify_metabolizer(&split, None, &m(&[vec![1], vec![1]])).unwrap());
        let pos = HermitianMatrix::hermitian(Matrix::identity(2), f).unwrap();
        assert!(!verify_metabolizer(&pos, None, &m(&[vec![1], vec![0]])).unwrap());
        assert!(verify_metabolizer(&pos, None, &m(&[vec![1, 2], vec![0, 0]])).is_err());
        // t-invariance: swapping coordinates moves e1 off the line
        let swap = m(&[vec![0, 1], vec![1, 0]]);
        assert!(!verify_metabolizer(&hyp, Some(&swap), &m(&[vec![1], vec![0]])).unwrap());
    }

    /// Small exhaustive search: every 4-dimensional form from {-1,0,1} blocks
    /// that admits a metabolizer among spans of pairs of small vectors has
    /// signature 0.
    #[test]
    fn metabolic_forms_have_zero_signature() {
        let f = FieldFlavor::real(1);
        let forms = [
            m(&[vec![1, 0, 0, 0], vec![0, -1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, -1]]),
            m(&[vec![0, 1, 0, 0], vec![1, 0, 0, 0], vec![0, 0, 0, 1], vec![0, 0, 1, 1]]),
            m(&[vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, -1, 0], vec![0, 0, 0, 1]]),
        ];
        let vals = [-1i64, 0, 1];
        let vectors: Vec<Vec<i64>> = (0..81)
            .map(|mut n| {
                (0..4)
                    .map(|_| {
                        let v = vals[n % 3];
                        n /= 3;
                        v
                    })
                    .collect()
            })
            .filter(|v: &Vec<i64>| v.iter().any(|&x| x != 0))
            .collect();
        for form in forms {
            let h = HermitianMatrix::hermitian(form, f).unwrap();
            let mut found = false;
            'search: for (a, u) in vectors.iter().enumerate() {
                for w in &vectors[a + 1..] {
                    let l = Matrix::from_columns(4, &[u.iter().map(|&x| C::from_int(x)).collect(), w.iter().map(|&x| C::from_int(x)).collect()]);
                    if l.rank() == 2 && verify_metabolizer(&h, None, &l).unwrap() {
                        found = true;
                        break 'search;
                    }
                }
            }
            let s = h.signature().unwrap().signature();
            assert_eq!(found, s == 0, "metabolizer search disagrees with signature {s}");
        }
    }

    fn arb_hermitian(n: usize) -> impl Strategy<Value = Matrix<C>> {
        prop::collection::vec((-3i64..=3, 0i64..8), n * n).prop_map(move |v| {
            let raw = Matrix::from_fn(n, n, |i, j| {
                let (a, k) = v[i * n + j];
                C::from_int(a) * C::cyclo(8, k).unwrap()
            });
            raw.add(&raw.conj_transpose())
        })
    }

    fn arb_invertible(n: usize) -> impl Strategy<Value = Matrix<C>> {
        prop::collection::vec(-2i64..=2, n * n)
            .prop_map(move |v| Matrix::from_fn(n, n, |i, j| C::from_int(v[i * n + j] + if i == j { 5 } else { 0 })))
            .prop_filter("invertible", |p| p.is_invertible())
    }

    proptest! {
        #[test]
        fn congruence_invariance(h in arb_hermitian(4), p in arb_invertible(4)) {
            let f = FieldFlavor::complex(8);
            let a = HermitianMatrix::hermitian(h, f).unwrap();
            let b = a.congruent(&p);
            prop_assert_eq!(a.signature().unwrap(), b.signature().unwrap());
        }

        #[test]
        fn additive_under_sums(a in arb_hermitian(3), b in arb_hermitian(2)) {
            let f = FieldFlavor::complex(8);
            let a = HermitianMatrix::hermitian(a, f).unwrap();
            let b = HermitianMatrix::hermitian(b, f).unwrap();
            prop_assert_eq!(
                a.direct_sum(&b).signature().unwrap(),
                a.signature().unwrap() + b.signature().unwrap()
            );
        }

        #[test]
        fn float_matches_eigenvalue_counts(h in arb_hermitian(4)) {
            let hf = h.map(|x| FloatComplex::from_cyclo(x));
            let report = hermitian_inertia(&hf).unwrap();
            let exact = hermitian_inertia(&h).unwrap();
            let roots = crate::cyclofield::polynomial_roots(
                &h.map(|x| FloatComplex::from_cyclo(x)).char_poly().iter().map(|c| c.value).collect::<Vec<_>>(),
            );
            let pos = roots.iter().filter(|r| r.re > 1e-6).count();
            let neg = roots.iter().filter(|r| r.re < -1e-6).count();
            prop_assert_eq!((report.positives, report.negatives), (pos, neg));
            prop_assert_eq!(report, exact);
            let _ = FlavorKind::Complex;
        }
    }
}
