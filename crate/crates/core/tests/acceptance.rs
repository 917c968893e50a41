//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use milnor_core::fibered::{
    blanchfield_from_seifert, figure_eight, from_seifert, levine_tristram, milnor_structure, torus_knot_2, trefoil,
    BLANCHFIELD_SIGN,
};
use milnor_core::hermforms::hermitian_inertia;
use milnor_core::isostruct::{
    elementary_structure, milnor_signature, milnor_signatures, primary_decomposition, total_signature,
    SkewIsometricStructure,
};
use milnor_core::laurent::{basic_poly, RationalFunction};
use milnor_core::linkforms::{
    chi_pushforward, devissage, elementary_linking, signature_jump, signature_jump_report, trace_constant,
    JumpEvaluator, JumpOptions, JumpRoute,
};
use milnor_core::matrix::Matrix;
use milnor_core::trace::trace_chi;
use milnor_core::{FieldFlavor, FlavorKind, Involution, Ring, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|x| x.to_string())
}

fn sample_points() -> Vec<C> {
    vec![z(6, 1), z(5, 1), z(8, 1), z(8, 3)]
}

fn trace_vectors() -> Outcome {
    for xi in sample_points() {
        let p = L::t() - L::constant(xi.two_re()) + L::monomial(C::one(), -1);
        let f = e(RationalFunction::new(L::t(), p))?;
        let v = e(trace_chi(&f))?;
        ensure(v == C::from_int(-1), || format!("chi(t/p) at {xi} = {v}"))?;

        let f = e(RationalFunction::new(
            L::one() - L::monomial(xi.clone(), 1),
            L::t() - L::constant(xi.clone()),
        ))?;
        let v = e(trace_chi(&f))?;
        let expect = xi.clone() - xi.conj();
        ensure(v == expect, || format!("chi((1-xi t)/(t-xi)) at {xi} = {v}, expected {expect}"))?;
    }
    Ok("4 points, exact".into())
}

fn elementary_signatures() -> Outcome {
    for xi in sample_points() {
        let order = xi.order();
        let real = e(elementary_structure(&xi, &FieldFlavor::real(order)))?;
        let m = e(milnor_signature(&real, &xi))?;
        ensure(m == -2, || format!("real elementary at {xi}: {m}"))?;

        let cx = e(elementary_structure(&xi, &FieldFlavor::complex(order)))?;
        let m = e(milnor_signature(&cx, &xi))?;
        let expect = -(xi.imag_sign().to_i32() as i64);
        ensure(m == expect, || format!("complex elementary at {xi}: {m}"))?;

        // the structures arise as pushforwards of the elementary linking forms
        for (fl, want) in [(FieldFlavor::real(order), -2), (FieldFlavor::complex(order), expect)] {
            let s = e(chi_pushforward(&e(elementary_linking(1, 1, &xi, &fl))?))?;
            let m = e(milnor_signature(&s, &xi))?;
            ensure(m == want, || format!("pushforward at {xi} ({:?}): {m}", fl.kind))?;
        }
    }
    Ok("4 points x 2 flavors, exact".into())
}

fn devissage_values() -> Outcome {
    for xi in sample_points() {
        let order = xi.order();
        let real = FieldFlavor::real(order);
        let l = e(elementary_linking(1, 1, &xi, &real))?;
        let d = e(devissage(&l, &e(basic_poly(&xi, &real))?))?;
        let inertia = e(hermitian_inertia(&d.gram))?;
        ensure(d.gram.rows() == 1 && inertia.positives == 1 && d.u_twist == C::one(), || {
            format!("real devissage at {xi}: gram {:?}, twist {}", d.gram, d.u_twist)
        })?;

        let cx = FieldFlavor::complex(order);
        let l = e(elementary_linking(1, 1, &xi, &cx))?;
        let d = e(devissage(&l, &e(basic_poly(&xi, &cx))?))?;
        let s = C::from_int(xi.imag_sign().to_i32() as i64);
        let gram = s * (C::one() - xi.clone() * xi.clone());
        let twist = -(xi.conj() * xi.conj());
        ensure(d.gram == Matrix::diagonal(&[gram.clone()]) && d.u_twist == twist, || {
            format!("complex devissage at {xi}: gram {:?}, twist {}", d.gram, d.u_twist)
        })?;

        for fl in [real, cx] {
            let l = e(elementary_linking(1, 1, &xi, &fl))?;
            let r = e(signature_jump_report(&l, &xi, JumpOptions::default()))?;
            ensure(r.value == 1 && r.route == JumpRoute::Devissage, || {
                format!("jump at {xi} ({:?}): {} via {:?}", fl.kind, r.value, r.route)
            })?;
        }
    }
    Ok("4 points x 2 flavors, exact".into())
}

fn main_theorem_suite(cases: usize, budget: Duration) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let mut points = 0usize;
    for case in 0..cases {
        let order = if case % 2 == 0 { 12 } else { 20 };
        let kind = if case % 4 < 2 { FlavorKind::Real } else { FlavorKind::Complex };
        let summands = rng.gen_range(1..=3);
        let (form, parts) = random_linking_form(&mut rng, kind, order, summands, 3);
        let s = e(chi_pushforward(&form))?;
        let mut jumps = JumpEvaluator::new(&form, JumpOptions::default());
        let sigs = e(milnor_signatures(&s))?;
        for xi in nonreal_roots(order) {
            let expected = expected_jump(&parts, &xi, kind);
            let c = trace_constant(&xi, kind);
            let milnor = e(milnor_signature(&s, &xi))?;
            ensure(milnor == c * expected, || {
                format!("case {case}: milnor at {xi} = {milnor}, expected {c}*{expected}; summands {parts:?}")
            })?;
            let listed = sigs
                .iter()
                .find(|(eta, _)| *eta == xi || (kind == FlavorKind::Real && *eta == xi.conj()))
                .map_or(0, |(_, v)| *v);
            ensure(listed == milnor, || format!("case {case}: listed signature at {xi} = {listed}"))?;
            let jump = e(jumps.jump(&xi))?.value;
            ensure(jump == expected, || {
                format!("case {case}: jump at {xi} = {jump}, expected {expected}; summands {parts:?}")
            })?;
            points += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < budget, || format!("took {elapsed:?}, budget {budget:?}"))?;
    Ok(format!("{cases} forms, {points} points, c = -2 | -sgn Im xi"))
}

fn witt_relations(cases: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    for case in 0..cases {
        let kind = if case % 2 == 0 { FlavorKind::Real } else { FlavorKind::Complex };
        let order = 12;
        let count = rng.gen_range(1..=2);
        let (a, _) = random_linking_form(&mut rng, kind, order, count, 3);
        let (b, _) = random_linking_form(&mut rng, kind, order, 1, 3);
        let sum = a.direct_sum(&b);
        let hyper = a.direct_sum(&a.negated());
        let n = 2 * rng.gen_range(1..=2);
        let xi0 = &nonreal_roots(order)[rng.gen_range(0..nonreal_roots(order).len())];
        let even = e(elementary_linking(n, if rng.gen_bool(0.5) { 1 } else { -1 }, xi0, &flavor(kind, order)))?;
        let (sa, sb, ss) = (
            e(chi_pushforward(&a))?,
            e(chi_pushforward(&b))?,
            e(chi_pushforward(&sum))?,
        );
        let (sh, se) = (e(chi_pushforward(&hyper))?, e(chi_pushforward(&even))?);
        for xi in nonreal_roots(order) {
            let ja = e(signature_jump(&a, &xi))?;
            let jb = e(signature_jump(&b, &xi))?;
            let js = e(signature_jump(&sum, &xi))?;
            ensure(js == ja + jb, || format!("case {case}: jump not additive at {xi}"))?;
            let (ma, mb, ms) = (
                e(milnor_signature(&sa, &xi))?,
                e(milnor_signature(&sb, &xi))?,
                e(milnor_signature(&ss, &xi))?,
            );
            ensure(ms == ma + mb, || format!("case {case}: milnor not additive at {xi}"))?;
            ensure(e(signature_jump(&hyper, &xi))? == 0 && e(milnor_signature(&sh, &xi))? == 0, || {
                format!("case {case}: L + (-L) nonzero at {xi}")
            })?;
            ensure(e(signature_jump(&even, &xi))? == 0 && e(milnor_signature(&se, &xi))? == 0, || {
                format!("case {case}: e({n}, .., {xi0}) nonzero at {xi}")
            })?;
        }
    }
    Ok(format!("{cases} randomized cases"))
}

fn erle_check() -> Outcome {
    let real = FieldFlavor::real(1);
    let v: Matrix<C> = trefoil();
    let s = e(milnor_structure(&e(from_seifert(&v, &C::one(), real))?))?;
    let total = e(total_signature(&s))?;
    let direct = e(hermitian_inertia(&v.add(&v.transpose())))?.signature();
    ensure(total == -2 && direct == -2, || format!("trefoil: total {total}, sign(V+V^T) {direct}"))?;
    let s = e(milnor_structure(&e(from_seifert(&figure_eight::<C>(), &C::one(), real))?))?;
    let total = e(total_signature(&s))?;
    ensure(total == 0, || format!("figure-eight: total {total}"))?;
    Ok("trefoil -2, figure-eight 0".into())
}

fn knots() -> Vec<(&'static str, Matrix<C>)> {
    vec![
        ("trefoil", trefoil()),
        ("figure-eight", figure_eight()),
        ("T(2,7)", torus_knot_2(3)),
    ]
}

fn alexander_at(v: &Matrix<C>, omega: &C) -> C {
    v.sub(&v.transpose().scale(omega)).det()
}

fn lt_relation() -> Outcome {
    let mut checked = 0;
    let mut skipped = 0;
    for (name, v) in knots() {
        for n in 1..=24u64 {
            for k in (0..n as i64).filter(|&k| num_integer::gcd(k as u64, n) == 1) {
                let omega = z(n, k);
                if omega.is_plus_minus_one() || alexander_at(&v, &omega).is_zero() {
                    skipped += 1;
                    continue;
                }
                let order = num_integer::lcm(n, 2);
                let f = e(from_seifert(&v, &omega, FieldFlavor::complex(order)))?;
                let total = e(total_signature(&e(milnor_structure(&f))?))?;
                let predicted = e(levine_tristram(&v, &-omega.clone()))? - e(levine_tristram(&v, &omega))?;
                ensure(total == predicted, || {
                    format!("{name} at zeta_{n}^{k}: total {total}, predicted {predicted}")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (knot, omega) pairs, {skipped} excluded"))
}

fn blanchfield_sign() -> Outcome {
    let real = FieldFlavor::real(1);
    let mut constants = std::collections::BTreeSet::new();
    let mut points = 0;
    for (name, v) in knots() {
        let bl = e(blanchfield_from_seifert(&v, real))?;
        let lhs = e(chi_pushforward(&bl))?;
        let rhs = e(milnor_structure(&e(from_seifert(&v, &C::one(), real))?))?;
        ensure(lhs.char_poly().normalized() == rhs.char_poly().normalized(), || {
            format!("{name}: different Alexander modules")
        })?;
        let mut xis: Vec<C> = e(milnor_signatures(&lhs))?.into_iter().map(|(x, _)| x).collect();
        xis.extend(e(milnor_signatures(&rhs))?.into_iter().map(|(x, _)| x));
        for xi in xis {
            let a = e(milnor_signature(&lhs, &xi))?;
            let b = e(milnor_signature(&rhs, &xi))?;
            ensure(b != 0 && a.abs() == b.abs(), || format!("{name} at {xi}: {a} vs {b}"))?;
            constants.insert(a / b);
            points += 1;
        }
    }
    ensure(constants.len() == 1, || format!("sign constant not global: {constants:?}"))?;
    let c = *constants.iter().next().unwrap();
    ensure(c == BLANCHFIELD_SIGN, || format!("measured {c}, pinned {BLANCHFIELD_SIGN}"))?;
    Ok(format!("{points} signature points, constant {c:+}"))
}

fn check_structure(s: &SkewIsometricStructure<C>, order: u64, rng: &mut ChaCha8Rng, label: &str) -> Result<(), String> {
    e(SkewIsometricStructure::new(s.mu().clone(), s.t().clone(), *s.flavor()))
        .map_err(|m| format!("{label}: {m}"))?;
    let dec = e(primary_decomposition(s))?;
    let mut blocks: Vec<Matrix<C>> = dec.parts.iter().chain(&dec.unipotent).map(|p| p.basis.clone()).collect();
    if dec.residual.cols() > 0 {
        blocks.push(dec.residual.clone());
    }
    let total: usize = blocks.iter().map(Matrix::cols).sum();
    ensure(total == s.dim(), || format!("{label}: decomposition covers {total} of {}", s.dim()))?;
    for i in 0..blocks.len() {
        for j in 0..i {
            let cross = blocks[i].transpose().mul(s.mu()).mul(&blocks[j].conj());
            ensure(cross.is_zero(), || format!("{label}: parts {i} and {j} not orthogonal"))?;
        }
    }
    let p = random_base_change(rng, s.dim(), s.flavor().kind, order);
    let moved = e(s.base_change(&p))?;
    let before = e(milnor_signatures(s))?;
    let after = e(milnor_signatures(&moved))?;
    ensure(before == after, || format!("{label}: signatures moved {before:?} -> {after:?}"))?;
    ensure(e(total_signature(s))? == e(total_signature(&moved))?, || {
        format!("{label}: total signature moved")
    })?;
    Ok(())
}

fn structural(cases: usize, budget: Duration) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    for case in 0..cases {
        let label = format!("case {case}");
        let order = [12, 12, 20][case % 3];
        let s = match case % 3 {
            0 => {
                let kind = if rng.gen_bool(0.5) { FlavorKind::Real } else { FlavorKind::Complex };
                let count = rng.gen_range(1..=2);
                let (form, _) = random_linking_form(&mut rng, kind, 12, count, 2);
                e(chi_pushforward(&form))?
            }
            1 => {
                let (_, v) = knots().swap_remove(rng.gen_range(0..2));
                let k = rng.gen_range(0..12);
                let omega = z(12, k);
                let fl = if omega.is_real() { FieldFlavor::real(12) } else { FieldFlavor::complex(12) };
                e(milnor_structure(&e(from_seifert(&v, &omega, fl))?))?
            }
            _ => {
                let kind = if rng.gen_bool(0.5) { FlavorKind::Real } else { FlavorKind::Complex };
                let fl = flavor(kind, 20);
                let roots = nonreal_roots(20);
                let mut acc: Option<SkewIsometricStructure<C>> = None;
                for _ in 0..rng.gen_range(1..=3) {
                    let mut part = e(elementary_structure(&roots[rng.gen_range(0..roots.len())], &fl))?;
                    if rng.gen_bool(0.5) {
                        part = part.negated();
                    }
                    acc = Some(match acc {
                        None => part,
                        Some(a) => a.direct_sum(&part),
                    });
                }
                let s = acc.unwrap();
                let p = random_base_change(&mut rng, s.dim(), kind, 20);
                e(s.base_change(&p))?
            }
        };
        check_structure(&s, order, &mut rng, &label)?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < budget, || format!("took {elapsed:?}, budget {budget:?}"))?;
    Ok(format!("{cases} structures"))
}

/// `MILNOR_ACCEPTANCE_ONLY=1,4` restricts the run to the listed criteria.
fn selected(index: usize) -> bool {
    match std::env::var("MILNOR_ACCEPTANCE_ONLY") {
        Ok(list) => list.split(',').any(|x| x.trim() == index.to_string()),
        Err(_) => true,
    }
}

fn run(index: usize, name: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    if !selected(index) {
        return true;
    }
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let result = match (result, budget) {
        (Ok(_), Some(b)) if elapsed >= b => Err(format!("took {elapsed:?}, budget {b:?}")),
        (r, _) => r,
    };
    let secs = elapsed.as_secs_f64();
    match result {
        Ok(detail) => {
            println!("PASS {index} {name} ({secs:.2} s): {detail}");
            true
        }
        Err(detail) => {
            println!("FAIL {index} {name} ({secs:.2} s): {detail}");
            false
        }
    }
}

fn main() -> ExitCode {
    let minute = Some(Duration::from_secs(60));
    let results = [
        run(1, "trace-map vectors", Some(Duration::from_secs(1)), trace_vectors),
        run(2, "elementary signatures", None, elementary_signatures),
        run(3, "devissage values", None, devissage_values),
        run(4, "milnor signature = c * jump", minute, || {
            main_theorem_suite(200, Duration::from_secs(60))
        }),
        run(5, "witt relations", None, || witt_relations(40)),
        run(6, "fibered total signature", None, erle_check),
        run(7, "levine-tristram relation", None, lt_relation),
        run(8, "blanchfield sign constant", None, blanchfield_sign),
        run(9, "structural invariants", minute, || structural(510, Duration::from_secs(60))),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
