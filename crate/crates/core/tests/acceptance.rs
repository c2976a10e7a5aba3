//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its elapsed time. Every comparison is exact; the only tolerances are the
//! per-criterion runtime ceilings.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gmoyal::opalg::{quantize, OpPoly};
use gmoyal::phase::PhasePoly;
use gmoyal::scalar::GaussianRational;
use gmoyal::series::{g_from_alpha, g_from_f, Ordering, Preset, ALL_PRESETS};
use gmoyal::verify::{run_suite, OrderingSpec, Suite, VerifyConfig, MALFORMED_CORPUS};

fn report(name: &str, start: Instant, ceiling: Duration) {
    let elapsed = start.elapsed();
    println!("ACCEPTANCE {name}: PASS ({elapsed:.2?})");
    assert!(
        elapsed < ceiling,
        "{name} exceeded its runtime ceiling: {elapsed:?} >= {ceiling:?}"
    );
}

/// Deterministic random custom ordering: f_0 = 1 plus six coefficients with
/// numerators and denominators in [-9, 9] \ {0}.
fn random_custom_spec(seed: u64) -> OrderingSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let part = |rng: &mut ChaCha8Rng| {
        let mut num = 0i64;
        while num == 0 {
            num = rng.gen_range(-9..=9);
        }
        let den = rng.gen_range(1..=9i64);
        BigRational::new(BigInt::from(num), BigInt::from(den))
    };
    let mut coeffs = vec![GaussianRational::one()];
    for _ in 0..6 {
        let re = part(&mut rng);
        let im = part(&mut rng);
        coeffs.push(GaussianRational::new(re, im));
    }
    OrderingSpec::custom("custom-random", coeffs)
}

fn assert_suite_passes(suite: Suite, spec: &OrderingSpec, cfg: &VerifyConfig) {
    let report = run_suite(suite, spec, cfg);
    assert!(
        report.passed(),
        "{}/{} failed: {:#?}",
        report.suite,
        report.ordering,
        report.failures
    );
}

#[test]
fn acceptance_01_homomorphism() {
    let start = Instant::now();
    let cfg = VerifyConfig {
        max_degree: 4,
        trials: 200,
        dim: 12,
        seed: 20_260_810,
    };
    let mut orderings = OrderingSpec::all_presets();
    orderings.push(random_custom_spec(6));
    for spec in &orderings {
        assert_suite_passes(Suite::Homomorphism, spec, &cfg);
    }
    report("01 homomorphism", start, Duration::from_secs(60));
}

#[test]
fn acceptance_02_dirac_conditions() {
    let start = Instant::now();
    let cfg = VerifyConfig {
        max_degree: 5,
        trials: 100,
        dim: 12,
        seed: 20_260_810,
    };
    for spec in OrderingSpec::all_presets() {
        assert_suite_passes(Suite::Dirac, &spec, &cfg);
    }
    report("02 dirac-conditions", start, Duration::from_secs(30));
}

#[test]
fn acceptance_03_g_consistency() {
    let start = Instant::now();
    let cfg = VerifyConfig::default();
    for spec in OrderingSpec::all_presets() {
        assert_suite_passes(Suite::GConsistency, &spec, &cfg);
    }
    report("03 g-consistency", start, Duration::from_secs(5));
}

#[test]
fn acceptance_04_preset_spot_values() {
    let start = Instant::now();

    // g(m, n, 0) = 1 for every scheme.
    for preset in ALL_PRESETS {
        let ord = Ordering::preset(preset, 8);
        for m in 0..=8u32 {
            for n in 0..=8u32 {
                assert!(ord.g(m, n, 0).unwrap().is_one(), "{}", preset.name());
            }
        }
    }

    // The anti-standard coefficients vanish for s >= 1.
    let ast = Ordering::preset(Preset::AntiStandard, 8);
    for m in 0..=8u32 {
        for n in 0..=8u32 {
            for s in 1..=m.min(n) {
                assert!(ast.g(m, n, s).unwrap().is_zero());
            }
        }
    }

    // Born-Jordan: s-th derivative of f at 0 equals (-i)^s / (s+1).
    let bj = Preset::BornJordan.f_series(8);
    for s in 0..=8usize {
        let expected = (-GaussianRational::i())
            .pow(s as u32)
            .scale(&BigRational::new(
                BigInt::from(1),
                BigInt::from(s as i64 + 1),
            ));
        assert_eq!(bj.derivative_at_zero(s).unwrap(), expected, "s={s}");
    }

    // Weyl image of p*x is the symmetrized word p^x^ + (i hbar / 2).
    let weyl = Ordering::preset(Preset::Weyl, 2);
    let px = PhasePoly::monomial(1, 1, 0, GaussianRational::one());
    let expected = &OpPoly::monomial(1, 1, 0, GaussianRational::one())
        + &OpPoly::monomial(0, 0, 1, GaussianRational::ratio_pair(0, 1, 1, 2));
    assert_eq!(quantize(&px, &weyl).unwrap(), expected);

    report("04 preset-spot-values", start, Duration::from_secs(5));
}

#[test]
fn acceptance_05_closed_form_entries() {
    let start = Instant::now();
    let cfg = VerifyConfig {
        dim: 12,
        ..VerifyConfig::default()
    };
    // Ordering-independent; any label seeds it. A mismatch here would point
    // at a defect in the published closed forms and must surface verbatim.
    let report_run = run_suite(
        Suite::ClosedFormEntries,
        &OrderingSpec::preset(Preset::Weyl),
        &cfg,
    );
    assert!(
        report_run.passed(),
        "closed-form entries disagree with direct products: {:#?}",
        report_run.failures
    );
    report("05 eq14-closed-form", start, Duration::from_secs(30));
}

#[test]
fn acceptance_06_matrix_homomorphism() {
    let start = Instant::now();
    let cfg = VerifyConfig {
        max_degree: 4,
        trials: 50,
        dim: 12,
        seed: 20_260_810,
    };
    for spec in OrderingSpec::all_presets() {
        assert_suite_passes(Suite::MatrixBlock, &spec, &cfg);
    }
    report("06 matrix-homomorphism", start, Duration::from_secs(60));
}

#[test]
fn acceptance_07_adjoint_reality() {
    let start = Instant::now();
    let cfg = VerifyConfig {
        max_degree: 4,
        trials: 100,
        dim: 12,
        seed: 20_260_810,
    };
    for preset in [Preset::Weyl, Preset::Symmetric, Preset::BornJordan] {
        let rep = run_suite(Suite::AdjointReality, &OrderingSpec::preset(preset), &cfg);
        assert!(rep.passed(), "{}: {:#?}", preset.name(), rep.failures);
        assert!(rep.counterexample.is_none());
    }
    for preset in [Preset::Standard, Preset::AntiStandard] {
        let rep = run_suite(Suite::AdjointReality, &OrderingSpec::preset(preset), &cfg);
        assert!(rep.passed(), "{}: {:#?}", preset.name(), rep.failures);
        assert_eq!(
            rep.counterexample.as_deref(),
            Some("p*x"),
            "{} should fail self-adjointness at p*x",
            preset.name()
        );
    }
    report("07 adjoint-reality", start, Duration::from_secs(30));
}

#[test]
fn acceptance_08_classical_limit() {
    let start = Instant::now();
    let cfg = VerifyConfig {
        max_degree: 4,
        trials: 50,
        dim: 12,
        seed: 20_260_810,
    };
    for spec in OrderingSpec::all_presets() {
        assert_suite_passes(Suite::ClassicalLimit, &spec, &cfg);
    }
    report("08 classical-limit", start, Duration::from_secs(30));
}

#[test]
fn acceptance_09_star_associativity() {
    let start = Instant::now();
    let cfg = VerifyConfig {
        max_degree: 3,
        trials: 50,
        dim: 12,
        seed: 20_260_810,
    };
    for spec in OrderingSpec::all_presets() {
        assert_suite_passes(Suite::Associativity, &spec, &cfg);
    }
    report("09 star-associativity", start, Duration::from_secs(60));
}

#[test]
fn acceptance_10_parser_roundtrip() {
    let start = Instant::now();
    assert!(MALFORMED_CORPUS.len() >= 20);
    let cfg = VerifyConfig {
        max_degree: 6,
        trials: 500,
        dim: 12,
        seed: 20_260_810,
    };
    assert_suite_passes(
        Suite::ParserRoundtrip,
        &OrderingSpec::preset(Preset::Weyl),
        &cfg,
    );
    report("10 parser-roundtrip", start, Duration::from_secs(5));
}

/// Route-consistency spot check feeding criterion 3: both formulas agree on
/// a custom scheme as well, not only on presets.
#[test]
fn acceptance_03b_g_consistency_custom() {
    let start = Instant::now();
    let spec = random_custom_spec(11);
    let cfg = VerifyConfig::default();
    assert_suite_passes(Suite::GConsistency, &spec, &cfg);
    // And by direct evaluation at a few indices.
    if let gmoyal::verify::OrderingSource::Custom(coeffs) = &spec.source {
        let ord = Ordering::custom("check", coeffs, 8).unwrap();
        for (m, n, s) in [(3u32, 2u32, 2u32), (5, 5, 4), (8, 8, 6)] {
            assert_eq!(
                g_from_f(ord.f(), m, n, s).unwrap(),
                g_from_alpha(ord.alpha(), m, n, s).unwrap()
            );
        }
    }
    report("03b g-consistency-custom", start, Duration::from_secs(5));
}
