//! Random generators shared by the integration tests.
#![allow(dead_code)]

use milnor_core::laurent::LaurentPoly;
use milnor_core::linkforms::{elementary_linking, LinkingForm};
use milnor_core::matrix::Matrix;
use milnor_core::{CycloNumber, FieldFlavor, FlavorKind, Involution};
use rand::Rng;

pub type C = CycloNumber;
pub type L = LaurentPoly<C>;

pub fn z(n: u64, k: i64) -> C {
    C::cyclo(n, k).unwrap()
}

/// Non-real `N`-th roots of unity `ζ_N^k`, `0 < k < N`.
pub fn nonreal_roots(n: u64) -> Vec<C> {
    (1..n as i64)
        .filter(|&k| 2 * k != n as i64)
        .map(|k| z(n, k))
        .collect()
}

pub fn flavor(kind: FlavorKind, order: u64) -> FieldFlavor {
    match kind {
        FlavorKind::Real => FieldFlavor::real(order),
        FlavorKind::Complex => FieldFlavor::complex(order),
    }
}

#[derive(Clone, Debug)]
pub struct Summand {
    pub n: u32,
    pub eps: i32,
    pub xi: C,
}

impl Summand {
    /// Contribution to `δσ(ξ)`: `ε` for odd `n` at a matching point.
    pub fn jump_at(&self, xi: &C, kind: FlavorKind) -> i64 {
        let matches = match kind {
            FlavorKind::Complex => self.xi == *xi,
            FlavorKind::Real => self.xi == *xi || self.xi == xi.conj(),
        };
        if matches && self.n % 2 == 1 {
            self.eps as i64
        } else {
            0
        }
    }
}

pub fn expected_jump(summands: &[Summand], xi: &C, kind: FlavorKind) -> i64 {
    summands.iter().map(|s| s.jump_at(xi, kind)).sum()
}

fn random_coeff<R: Rng>(rng: &mut R, kind: FlavorKind, order: u64) -> C {
    let c = C::from_int(rng.gen_range(1..=2) * if rng.gen_bool(0.5) { 1 } else { -1 });
    match kind {
        FlavorKind::Real => c,
        FlavorKind::Complex => c * z(order, rng.gen_range(0..order as i64)),
    }
}

/// Product of a few elementary matrices `1 + c·tᵉ·E_ij` and a diagonal
/// unit, invertible over Λ.
pub fn random_unimodular<R: Rng>(rng: &mut R, size: usize, kind: FlavorKind, order: u64, ops: usize) -> Matrix<L> {
    let mut u: Matrix<L> = Matrix::identity(size);
    if size > 1 {
        for _ in 0..ops {
            let i = rng.gen_range(0..size);
            let j = (i + rng.gen_range(1..size)) % size;
            let c = L::monomial(random_coeff(rng, kind, order), rng.gen_range(-1..=1));
            u.add_row_multiple(i, j, &c);
        }
    }
    for i in 0..size {
        let unit = L::monomial(C::from_int(if rng.gen_bool(0.5) { 1 } else { -1 }), rng.gen_range(-1..=1));
        for j in 0..size {
            let e = u[(i, j)].clone() * unit.clone();
            u[(i, j)] = e;
        }
    }
    u
}

pub fn random_summand<R: Rng>(rng: &mut R, order: u64, max_n: u32) -> Summand {
    let roots = nonreal_roots(order);
    Summand {
        n: rng.gen_range(1..=max_n),
        eps: if rng.gen_bool(0.5) { 1 } else { -1 },
        xi: roots[rng.gen_range(0..roots.len())].clone(),
    }
}

/// `F`-dimension of `Λ/D` for an elementary form.
pub fn elementary_dim(n: u32, kind: FlavorKind) -> usize {
    match kind {
        FlavorKind::Real => 2 * n as usize,
        FlavorKind::Complex => n as usize,
    }
}

/// Total `F`-dimension allowed for a random form; keeps exact arithmetic
/// at desk scale.
pub const DIM_BUDGET: usize = 10;

/// A Λ-twisted direct sum of elementary forms, with the summands used.
pub fn random_linking_form<R: Rng>(
    rng: &mut R,
    kind: FlavorKind,
    order: u64,
    summands: usize,
    max_n: u32,
) -> (LinkingForm<C>, Vec<Summand>) {
    let fl = flavor(kind, order);
    let mut parts: Vec<Summand> = Vec::new();
    let mut used = 0;
    while parts.len() < summands {
        let s = random_summand(rng, order, max_n);
        let dim = elementary_dim(s.n, kind);
        if used + dim <= DIM_BUDGET {
            used += dim;
            parts.push(s);
        } else if dim == elementary_dim(1, kind) {
            break;
        }
    }
    let mut form: Option<LinkingForm<C>> = None;
    for s in &parts {
        let e = elementary_linking(s.n, s.eps, &s.xi, &fl).unwrap();
        form = Some(match form {
            None => e,
            Some(f) => f.direct_sum(&e),
        });
    }
    let form = form.unwrap();
    let size = form.size();
    let u = random_unimodular(rng, size, kind, order, 2);
    let w = random_unimodular(rng, size, kind, order, 2);
    (form.twist(&u, &w).unwrap(), parts)
}

/// Random invertible matrix with small rational entries.
pub fn random_base_change<R: Rng>(rng: &mut R, n: usize, kind: FlavorKind, order: u64) -> Matrix<C> {
    loop {
        let p = Matrix::from_fn(n, n, |i, j| {
            let x = rng.gen_range(-2..=2);
            let base = if i == j { C::from_int(x + 3) } else { C::from_int(x) };
            match kind {
                FlavorKind::Complex if rng.gen_bool(0.3) => base * z(order, rng.gen_range(0..order as i64)),
                _ => base,
            }
        });
        if p.is_invertible() {
            return p;
        }
    }
}
