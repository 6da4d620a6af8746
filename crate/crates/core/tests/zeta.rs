use std::f64::consts::PI;

use critline::special::{complex_gamma, ln_gamma};
use critline::zeta::*;
use critline::ComplexValue as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

#[test]
fn xi_is_symmetric_on_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let r = rng.gen_range(0.0..10.0);
        let phi = rng.gen_range(0.0..2.0 * PI);
        let s = C::from_polar(r, phi);
        for path in [XiPath::Direct, XiPath::Continued] {
            let a = xi_completed(s, path).unwrap();
            let b = xi_completed(C::new(1.0, 0.0) - s, path).unwrap();
            worst = worst.max(rel(a, b));
        }
        let direct = xi_completed(s, XiPath::Direct).unwrap();
        let continued = xi_completed(s, XiPath::Continued).unwrap();
        assert!(rel(direct, continued) < 1e-8, "{s}: {direct} vs {continued}");
    }
    assert!(worst < 1e-8, "worst residual {worst:e}");
}

/// ζ at Re s = −1/2 against ξ divided by its gamma factor, with ξ taken
/// from the incomplete-gamma series, which never calls ζ. The series loses
/// about π|t|/4 nats to cancellation, which caps the usable height.
#[test]
fn reflection_matches_xi_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let s = C::new(-0.5, rng.gen_range(-20.0..20.0));
        let xi = xi_continued(s, 1.0).unwrap();
        let factor = s * (s - 1.0) * 0.5 * (-s * 0.5 * PI.ln() + ln_gamma(s * 0.5).unwrap()).exp();
        let oracle = xi / factor;
        let z = zeta(s).unwrap();
        assert!((z - oracle).norm() <= 1e-8 * oracle.norm().max(1.0), "{s}: {z} vs {oracle}");
    }
}

#[test]
fn gamma_factor_route_is_consistent() {
    // ζ(−1) = −1/12 and ζ(−3) = 1/120 via reflection.
    assert!((zeta(C::new(-1.0, 0.0)).unwrap() - C::new(-1.0 / 12.0, 0.0)).norm() < 1e-13);
    assert!((zeta(C::new(-3.0, 0.0)).unwrap() - C::new(1.0 / 120.0, 0.0)).norm() < 1e-13);
    assert!((complex_gamma(C::new(0.5, 0.0)).unwrap().re - PI.sqrt()).abs() < 1e-13);
}

#[test]
fn zero_scan_finds_the_known_zeros() {
    let report = count_critical_zeros(0.0, 100.0, 0.05).unwrap();
    assert_eq!(report.zero_count, 29);
    assert!((report.zeros[0].ordinate - 14.134725141734693).abs() < 1e-6);
    assert!((report.zeros[28].ordinate - 98.831194218).abs() < 1e-6);
    assert!((report.zero_count as f64 - report.estimate_n_t).abs() <= 3.0);
}

#[test]
fn refined_zeros_are_sign_changes() {
    for t_max in [50.0, 100.0, 200.0] {
        let report = count_critical_zeros(0.0, t_max, 0.05).unwrap();
        let slack = 2.0 + 0.5 * f64::ln(t_max);
        assert!(
            (report.zero_count as f64 - report.estimate_n_t).abs() <= slack,
            "T = {t_max}: {} zeros vs {}",
            report.zero_count,
            report.estimate_n_t
        );
        for z in &report.zeros {
            assert!(z.z_value_residual.abs() < 1e-4, "{z:?}");
            let lo = hardy_z(z.ordinate - 1e-6).unwrap();
            let hi = hardy_z(z.ordinate + 1e-6).unwrap();
            assert!(lo * hi < 0.0, "no sign change around {}", z.ordinate);
        }
    }
}

/// k-th derivative from central differences at steps h and h/2, combined
/// by one Richardson step (error O(h⁴)).
fn richardson_derivative(s: C, k: usize, h: f64) -> C {
    let central = |h: f64| -> C {
        // Σ_j (−1)^j binom(k, j) f(s + (k/2 − j)h) / h^k
        let mut acc = C::new(0.0, 0.0);
        let mut binom = 1.0;
        for j in 0..=k {
            let offset = (k as f64 / 2.0 - j as f64) * h;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += zeta(s + offset).unwrap() * (sign * binom);
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
        acc / h.powi(k as i32)
    };
    (central(h / 2.0) * 4.0 - central(h)) / 3.0
}

#[test]
fn derivatives_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let s = C::new(rng.gen_range(-1.0..3.0), rng.gen_range(2.0..30.0));
        for k in 1..=3 {
            let cauchy = zeta_derivative(s, k).unwrap();
            let fd = richardson_derivative(s, k, 0.02);
            assert!(rel(cauchy, fd) < 1e-5, "s = {s}, k = {k}: {cauchy} vs {fd}");
        }
    }
}

#[test]
fn afe_reproduces_the_zeta_product() {
    let shift = C::new(1e-3, 0.0);
    let t = 50.0;
    let params = AfeParams::new(shift, shift, t);
    let afe = afe_pair(&params).unwrap();
    let direct = zeta(C::new(0.5, t) + shift).unwrap() * zeta(C::new(0.5, -t) + shift).unwrap();
    let gap = (afe - direct).norm() / direct.norm();
    assert!(gap < 1e-3, "{afe} vs {direct}: {gap:e}");
}

/// The smoothing kernel falls off like a Gaussian in log(x/t): slowly near
/// x = t², then fast. Checked against the observed 3.35e-6 at x = 100·t².
#[test]
fn afe_weight_decays_in_log_x() {
    let shift = C::new(1e-3, 0.0);
    let t = 50.0;
    let mut previous = f64::INFINITY;
    for k in 0..8 {
        let x = t * t * 10f64.powi(k - 2);
        let v = afe_weight(x, shift, shift, t, 40.0).unwrap().norm();
        assert!(v < previous, "not decreasing at x = {x:e}: {v:e}");
        previous = v;
    }
    let at_100 = afe_weight(100.0 * t * t, shift, shift, t, 40.0).unwrap().norm();
    assert!(at_100 > 1e-6 && at_100 < 1e-5, "{at_100:e}");
    let far = afe_weight(1e6 * t * t, shift, shift, t, 40.0).unwrap().norm();
    assert!(far < 1e-12, "{far:e}");
}
