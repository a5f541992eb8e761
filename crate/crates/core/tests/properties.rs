use std::f64::consts::{PI, SQRT_2};

use imsteer_core::audit::{run_suite, Suite};
use imsteer_core::imaginarity::{robustness_closed_form, robustness_of_imaginarity, MubMember, QubitBasis};
use imsteer_core::monogamy::{monogamy_sum, reduced_pair, sample_params, MONOGAMY_BOUND};
use imsteer_core::rng::SeedRng;
use imsteer_core::states::{from_bloch, sample_with, to_bloch, werner, SampleKind};
use imsteer_core::steering::{isi_closed, isi_operational, isi_unsharp};
use imsteer_core::witness::{select_witness, select_witness_bloch};
use imsteer_core::{BlochTwoQubit, DensityMatrix};
use proptest::prelude::*;

#[test]
fn robustness_stays_in_unit_interval() {
    let mut rng = SeedRng::new(101);
    for _ in 0..100_000 {
        let rho = sample_with(SampleKind::Qubit, &mut rng);
        let theta = PI * rng.uniform();
        let phi = 2.0 * PI * rng.uniform();
        for basis in QubitBasis::mub_triad(theta, phi).iter().chain(&[QubitBasis::z(), QubitBasis::x(), QubitBasis::y()]) {
            let r = robustness_of_imaginarity(&rho, basis);
            assert!((-1e-12..=1.0 + 1e-12).contains(&r), "{r}");
        }
    }
}

#[test]
fn robustness_matrix_route_matches_closed_form() {
    let mut rng = SeedRng::new(102);
    for _ in 0..10_000 {
        let rho = sample_with(SampleKind::Qubit, &mut rng);
        let n = imsteer_core::linalg::bloch_of(&rho);
        let theta = PI * rng.uniform();
        let phi = 2.0 * PI * rng.uniform();
        for member in [MubMember::B1, MubMember::B2, MubMember::B3] {
            let direct = robustness_of_imaginarity(&rho, &QubitBasis::mub(member, theta, phi));
            assert!((direct - robustness_closed_form(n, member, theta, phi)).abs() < 1e-10);
        }
    }
}

#[test]
fn monogamy_closed_forms_match_partial_traces() {
    let mut rng = SeedRng::new(103);
    for _ in 0..10_000 {
        let p = sample_params(&mut rng);
        let (ab, ac) = reduced_pair(&p).unwrap();
        let v = monogamy_sum(&p);
        assert!((v.i2_ab - isi_operational(&ab).unwrap()).abs() < 1e-9);
        assert!((v.i2_ac - isi_operational(&ac).unwrap()).abs() < 1e-9);
        assert!(v.sum <= MONOGAMY_BOUND + 1e-9);
        assert!(v.i2_ab <= 2.0 + 1e-12 && v.i2_ac <= 2.0 + 1e-12);
        if v.i2_ab > SQRT_2 {
            assert!(v.i2_ac <= SQRT_2);
        }
    }
}

#[test]
fn witnesses_never_fire_on_separable_states() {
    let mut rng = SeedRng::new(104);
    for _ in 0..20_000 {
        let rho = sample_with(SampleKind::Separable4, &mut rng);
        assert!(select_witness(&rho).unwrap().expectation >= -1e-9);
    }
}

#[test]
fn pure_product_states_stay_below_bound() {
    let mut rng = SeedRng::new(105);
    for _ in 0..20_000 {
        let rho = sample_with(SampleKind::Product4, &mut rng);
        assert!(isi_operational(&rho).unwrap() <= SQRT_2 + 1e-9);
    }
}

#[test]
fn default_audit_passes() {
    for suite in Suite::ALL {
        let r = run_suite(suite, suite.default_samples() / 10, 2024).unwrap();
        assert!(r.passed, "{r:?}");
    }
}

#[test]
fn audit_is_reproducible() {
    let a = run_suite(Suite::Duality, 5000, 77).unwrap();
    let b = run_suite(Suite::Duality, 5000, 77).unwrap();
    assert_eq!(a, b);
}

fn arb_state() -> impl Strategy<Value = DensityMatrix> {
    any::<u64>().prop_map(|seed| imsteer_core::states::sample_state(SampleKind::Mixed4, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn closed_form_agrees(rho in arb_state()) {
        let i2 = isi_operational(&rho).unwrap();
        let p = to_bloch(&rho).unwrap();
        prop_assert!((i2 - isi_closed(&p)).abs() < 1e-9);
        prop_assert!((0.0..=2.0 + 1e-12).contains(&i2));
    }

    #[test]
    fn bloch_round_trip(rho in arb_state()) {
        let back = from_bloch(&to_bloch(&rho).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(&rho) < 1e-12);
    }

    #[test]
    fn bloch_selection_matches_matrix(rho in arb_state()) {
        let p: BlochTwoQubit = to_bloch(&rho).unwrap();
        let a = select_witness(&rho).unwrap();
        let b = select_witness_bloch(&p);
        prop_assert!((a.expectation - b.expectation).abs() < 1e-9);
    }

    #[test]
    fn unsharp_is_monotone_in_lambda(seed in any::<u64>(), l1 in 0.0..1.0f64, l2 in 0.0..1.0f64) {
        let rho = imsteer_core::states::sample_state(SampleKind::Pure4, seed);
        let (lo, hi) = if l1 < l2 { (l1, l2) } else { (l2, l1) };
        prop_assert!(isi_unsharp(&rho, lo).unwrap() <= isi_unsharp(&rho, hi).unwrap() + 1e-12);
    }

    #[test]
    fn werner_is_linear(v in 0.0..=1.0f64) {
        let i2 = isi_operational(&werner(v).unwrap()).unwrap();
        prop_assert!((i2 - 2.0 * v).abs() < 1e-10);
    }
}
