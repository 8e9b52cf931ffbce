use cubic_lab::bias::{
    bias_scan_with, coprimality_identity_check, large_sieve_ratio, random_coprimality_cases, PsiTable,
};
use cubic_lab::eisenstein::EisInt;
use cubic_lab::gauss::Tau3Phase;
use num_complex::Complex64;

#[test]
fn bias_scan_k1_growth_and_ratio() {
    let table = PsiTable::new(1_000_000).unwrap();
    let rep = bias_scan_with(&table, &EisInt::one(), Tau3Phase::Standard).unwrap();
    assert!(rep.t_grid.len() >= 5);
    assert!(rep.ratios.iter().all(|r| r.is_finite()));
    assert!((0.75..=0.92).contains(&rep.exponent), "exponent {}", rep.exponent);
    let last = *rep.ratios.last().unwrap();
    assert!((0.75..=1.25).contains(&last), "ratio {last}");

    // No polar term when τ₃ vanishes.
    let rep = bias_scan_with(&table, &EisInt::lambda(), Tau3Phase::Standard).unwrap();
    assert!(rep.exponent <= 0.75, "exponent {}", rep.exponent);
}

#[test]
fn coprimality_cases_at_full_length() {
    let t = 100_000;
    let table = PsiTable::new(t).unwrap();
    let s = Complex64::new(2.0, 0.0);
    for case in random_coprimality_cases(20, 2024) {
        let res = coprimality_identity_check(&table, case.item, &case.alpha, &case.beta, &case.extra, &case.r, s, t)
            .unwrap();
        assert!(res.residual <= res.budget, "{case:?}: {res:?}");
    }
}

#[test]
fn large_sieve_ratio_stable_across_seeds() {
    let a = large_sieve_ratio(500, 500, 20, 1).unwrap();
    let b = large_sieve_ratio(500, 500, 20, 1000).unwrap();
    assert!(a.is_finite() && b.is_finite() && a > 0.0);
    assert!((a / b - 1.0).abs() <= 0.5, "{a} vs {b}");
}
