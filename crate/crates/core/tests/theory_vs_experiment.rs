//! Cross-module runs: exact ensemble moments against the Euler-product
//! coefficients and the conjectured polynomial.

use ffmoment_core::eulerprod::{coefficients, conjecture_q, qr_polynomials, theorem_coefficients_from_qr, EulerConfig};
use ffmoment_core::moments::{kth_moment, theory_comparison, SweepOptions};
use ffmoment_core::verify::{run_suite, VerifyOptions};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

// Frozen after cross-checking the jet route against the prime-sum route
// (agreement ≤ 4e-16 at q = 5, ≤ 1e-24 at q = 13).
const A_Q5: [f64; 3] = [3.4640059821131595e-6, 2.018883236591943e-4, 4.8758177842334206e-3];
const A_Q13: [f64; 3] = [3.1658865342186166e-5, 1.2515297730244488e-3, 2.0800907941530073e-2];

#[test]
fn main_term_coefficients_fixtures() {
    for (q, want) in [(5, A_Q5), (13, A_Q13)] {
        let cs = coefficients(&EulerConfig::new(q, 20, 192).unwrap()).unwrap();
        assert!(cs.all_pass());
        for (got, w) in [&cs.a10, &cs.a9, &cs.a8].iter().zip(want) {
            assert!(rel(got.to_f64(), w) < 1e-13, "q={q}: {} vs {w}", got.to_f64());
        }
    }
}

#[test]
fn residue_polynomials_rebuild_the_coefficients() {
    let cs = coefficients(&EulerConfig::new(5, 20, 192).unwrap()).unwrap();
    let rebuilt = theorem_coefficients_from_qr(&cs);
    for (r, a) in rebuilt.iter().zip([&cs.a10, &cs.a9, &cs.a8]) {
        assert!(rel(r.to_f64(), a.to_f64()) < 1e-15);
    }
    // the α-dependent pieces cancel
    let qr = qr_polynomials(&cs, 0.7);
    for v in [&qr.alpha_sq_g8, &qr.alpha_g9_plain, &qr.alpha_g9_square] {
        assert!(v.to_f64().abs() < 1e-30, "{}", v.to_f64());
    }
}

#[test]
fn conjecture_tracks_exact_moments() {
    let cfg = EulerConfig::new(5, 20, 192).unwrap();
    let cs = coefficients(&cfg).unwrap();
    let conj = conjecture_q(&cfg, 16, 0.05, 1).unwrap();
    let a = [cs.a10.to_f64(), cs.a9.to_f64(), cs.a8.to_f64()];
    let rows = theory_comparison(5, &[1, 2], a, &conj, &SweepOptions::default()).unwrap();
    // recorded: 0.99895, 1.00003
    assert!((rows[0].ratio_conjecture - 0.99895).abs() < 1e-4, "{}", rows[0].ratio_conjecture);
    assert!((rows[1].ratio_conjecture - 1.00003).abs() < 1e-4, "{}", rows[1].ratio_conjecture);
    // the three-term truncation is far off at small g, and improves with g
    assert!(rows[0].ratio_three_term > rows[1].ratio_three_term);
    assert_eq!(rows[0].exact.to_strings(), ("20456/5".to_string(), "0".to_string()));
}

#[test]
fn report_theory_fields() {
    let cfg = EulerConfig::new(5, 20, 192).unwrap();
    let conj = conjecture_q(&cfg, 16, 0.05, 1).unwrap();
    let r = kth_moment(5, 1, 4, &SweepOptions::default()).unwrap().with_theory(A_Q5, Some(&conj));
    let t = r.theory_thm1.unwrap();
    let want = 125.0 * (A_Q5[0] + A_Q5[1] + A_Q5[2]);
    assert!(rel(t, want) < 1e-14);
    assert!(rel(r.theory_conjecture.unwrap(), 100.0 * conj.at_genus(1)) < 1e-14);
}

#[test]
fn quick_suites_pass() {
    for s in ["sumd", "polya-vinogradov", "explicit", "euler-chain", "coefficients"] {
        let r = run_suite(s, &VerifyOptions::default()).unwrap();
        assert!(r.passed(), "{s}: {:?}", r.failures);
        assert!(r.cases > 0);
    }
}

#[test]
fn narrowed_suite_runs_fewer_cases() {
    let full = run_suite("minorant", &VerifyOptions::default()).unwrap();
    let narrow = run_suite(
        "minorant",
        &VerifyOptions {
            n: Some(20),
            alpha: Some(0.75),
            ..Default::default()
        },
    )
    .unwrap();
    assert!(narrow.passed() && full.passed());
    assert!(narrow.cases < full.cases);
}
