use cubic_lab::eisenstein::EisInt;
use cubic_lab::euler::{constant, family_density, remarkable_identity, ConstantName};
use cubic_lab::family::{enumerate_f3prime, enumerate_f3prime_range, FamilyWindow};
use cubic_lab::lfun::{l_half, DEFAULT_TRUNCATION};
use cubic_lab::weights::TestFunction;
use proptest::prelude::*;

#[test]
fn family_count_tracks_density() {
    let x = 200_000;
    let count = enumerate_f3prime_range(x, 2 * x).len() as f64;
    let pred = x as f64 * family_density();
    assert!((count / pred - 1.0).abs() < 0.03, "{count} vs {pred}");
}

#[test]
fn window_is_closed_under_conjugation() {
    let w = FamilyWindow::compute(3000.0, TestFunction::Bump, DEFAULT_TRUNCATION);
    let first = w.first_moment().unwrap();
    assert!(first.raw.im.abs() <= 1e-9 * first.raw.norm(), "{:?}", first.raw);
    assert!(first.ratio > 0.0);
    let qs: Vec<EisInt> = w.records.iter().map(|r| r.q).collect();
    assert!(qs.iter().all(|q| qs.contains(&q.conj())));
}

#[test]
fn euler_constants_positive_and_identity_holds() {
    let c = constant(ConstantName::C, 50_000).unwrap().value;
    let d = constant(ConstantName::D, 50_000).unwrap().value;
    let p = constant(ConstantName::ScriptP, 50_000).unwrap().value;
    assert!(c > 0.0 && d > 0.0 && 0.0 < p && p < 1.0);
    // Per prime the factors of 𝒫·C²/D multiply to one.
    assert!((remarkable_identity(50_000).unwrap() - 1.0).abs() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// `L(1/2, χ_q̄) = conj L(1/2, χ_q)`.
    #[test]
    fn central_value_conjugation(i in 0usize..400) {
        let family = enumerate_f3prime(5000);
        let q = family[i % family.len()];
        let a = l_half(&q).unwrap();
        let b = l_half(&q.conj()).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-8 * (1.0 + a.norm()), "{} {} {}", q, a, b);
    }
}
