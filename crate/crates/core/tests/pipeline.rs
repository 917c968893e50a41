//! End-to-end flows through the public API.

mod common;

use common::{expected_jump, random_linking_form, z, C};
use milnor_core::fibered::{blanchfield_from_seifert, from_seifert, levine_tristram, milnor_structure, torus_knot_2};
use milnor_core::isostruct::{milnor_signature, milnor_signatures, total_signature, StructureJson};
use milnor_core::linkforms::{chi_pushforward, trace_constant, LinkingFormJson};
use milnor_core::{Backend, FieldFlavor, FlavorKind, FloatComplex, Ring, Scalar};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Closed form for torus knots T(2, n): σ_ω = −2·#{j ≤ g : θ_j < θ < 1 − θ_j}
/// with θ_j = (2j − 1)/(2n), for ω = exp(2πiθ) off the Alexander roots.
fn torus_lt_oracle(g: usize, big_n: u64, k: u64) -> Option<i64> {
    let n = (2 * g + 1) as u64;
    // compare k/N with (2j−1)/(2n) by cross-multiplication
    let mut count = 0;
    for j in 1..=g as u64 {
        let lo = (2 * j - 1) * big_n;
        let hi = (2 * n - (2 * j - 1)) * big_n;
        let x = 2 * n * k;
        if x == lo || x == hi {
            return None;
        }
        if lo < x && x < hi {
            count += 1;
        }
    }
    Some(-2 * count)
}

#[test]
fn torus_knot_levine_tristram_closed_form() {
    for g in 1..=3 {
        let v = torus_knot_2::<C>(g);
        for big_n in [2u64, 5, 7, 8, 9, 12] {
            for k in 1..big_n {
                if num_integer::gcd(k, big_n) != 1 {
                    continue;
                }
                let Some(expected) = torus_lt_oracle(g, big_n, k) else {
                    continue;
                };
                let got = levine_tristram(&v, &z(big_n, k as i64)).unwrap();
                assert_eq!(got, expected, "T(2,{}) at {big_n}/{k}", 2 * g + 1);
            }
        }
    }
}

#[test]
fn blanchfield_matches_fibered_on_torus_knots() {
    for g in 1..=3 {
        let v = torus_knot_2::<C>(g);
        let fibered = milnor_structure(&from_seifert(&v, &C::one(), FieldFlavor::real(1)).unwrap()).unwrap();
        let bl = chi_pushforward(&blanchfield_from_seifert(&v, FieldFlavor::real(1)).unwrap()).unwrap();
        let a = milnor_signatures(&fibered).unwrap();
        assert!(!a.is_empty());
        for (xi, s) in &a {
            assert_eq!(milnor_signature(&bl, xi).unwrap(), *s, "T(2,{}) at {xi}", 2 * g + 1);
        }
        assert_eq!(total_signature(&bl).unwrap(), total_signature(&fibered).unwrap());
    }
}

#[test]
fn linking_form_json_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for kind in [FlavorKind::Real, FlavorKind::Complex] {
        for _ in 0..4 {
            let (form, parts) = random_linking_form(&mut rng, kind, 12, 2, 2);
            let text = serde_json::to_string(&LinkingFormJson::from_form(&form)).unwrap();
            let back: LinkingFormJson = serde_json::from_str(&text).unwrap();
            let rebuilt = back.build::<C>(Backend::ExactCyclotomic { order: 12 }).unwrap();
            let s = chi_pushforward(&rebuilt).unwrap();
            for xi in common::nonreal_roots(12) {
                let c = trace_constant(&xi, kind);
                let want = c * expected_jump(&parts, &xi, kind);
                assert_eq!(milnor_signature(&s, &xi).unwrap(), want, "{kind:?} at {xi}");
            }
        }
    }
}

#[test]
fn structure_json_round_trip() {
    let v = torus_knot_2::<C>(2);
    let s = milnor_structure(&from_seifert(&v, &z(6, 1), FieldFlavor::complex(6)).unwrap()).unwrap();
    let text = serde_json::to_string(&StructureJson::from_structure(&s)).unwrap();
    let back: StructureJson = serde_json::from_str(&text).unwrap();
    let t = back.to_exact().unwrap();
    assert_eq!(t.mu(), s.mu());
    assert_eq!(t.t(), s.t());
    assert_eq!(total_signature(&t).unwrap(), total_signature(&s).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn float_backend_agrees_on_simple_roots(seed in any::<u64>(), complex in any::<bool>()) {
        let kind = if complex { FlavorKind::Complex } else { FlavorKind::Real };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // n = 1 keeps the t-action semisimple, so float roots stay tight
        let (form, _) = random_linking_form(&mut rng, kind, 12, 3, 1);
        let exact = chi_pushforward(&form).unwrap();
        let fl = FieldFlavor::new(kind, Backend::FloatComplex { tolerance: 1e-9 }).unwrap();
        let float = StructureJson::from_structure(&exact).to_backend::<FloatComplex>(fl).unwrap();
        for (xi, s) in milnor_signatures(&exact).unwrap() {
            let xf = FloatComplex::from_cyclo(&xi);
            prop_assert_eq!(milnor_signature(&float, &xf).unwrap(), s);
        }
        prop_assert_eq!(total_signature(&float).unwrap(), total_signature(&exact).unwrap());
    }
}

#[test]
fn twisted_total_signature_at_order_thirteen() {
    // eigenvalues live in ℚ(ζ_182); candidate roots must stay cheap
    let v = torus_knot_2::<C>(3);
    for k in [1, 2, 5, 8] {
        let omega = z(13, k);
        let s = milnor_structure(&from_seifert(&v, &omega, FieldFlavor::complex(13)).unwrap()).unwrap();
        let predicted = levine_tristram(&v, &-omega.clone()).unwrap() - levine_tristram(&v, &omega).unwrap();
        assert_eq!(total_signature(&s).unwrap(), predicted, "13/{k}");
    }
}
