use critline::arithmetic::{factorize_trial, FactorSieve};
use critline::mollifier::*;
use critline::polynomial::Polynomial;
use critline::ComplexValue as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mobius_oracle(n: u64) -> f64 {
    let f = factorize_trial(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0.0
    } else if f.len() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[test]
fn mollifier_matches_brute_force() {
    // T = 10⁴ and θ = 1/2 give M = 100.
    let spec = MollifierSpec::new(1e4, 0.5, 1.3, Polynomial::x()).unwrap();
    assert!((spec.m_length() - 100.0).abs() < 1e-9);
    let sigma0 = 0.5 - 1.3 / 1e4f64.ln();
    let log_m = 100f64.ln();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..50 {
        let s = C::new(rng.gen_range(-1.0..2.0), rng.gen_range(-100.0..100.0));
        let mut oracle = C::new(0.0, 0.0);
        for h in 1..=100u64 {
            let hf = h as f64;
            let exponent = -(s + 0.5 - sigma0);
            oracle += (exponent * hf.ln()).exp() * (mobius_oracle(h) * (log_m - hf.ln()) / log_m);
        }
        let value = psi_mollifier(s, &spec).unwrap();
        assert!((value - oracle).norm() <= 1e-12 * oracle.norm().max(1.0), "{s}: {value} vs {oracle}");
    }
}

#[test]
fn v_ignores_trailing_zero_coefficients() {
    let q = Polynomial::new(vec![1.0, -1.0]).unwrap();
    let padded = Polynomial::new(vec![1.0, -1.0, 0.0, 0.0]).unwrap();
    assert_eq!(q, padded);
    let s = C::new(0.3, 123.4);
    assert_eq!(
        v_smoothed_zeta(s, &q, 7.0).unwrap(),
        v_smoothed_zeta(s, &padded, 7.0).unwrap()
    );
}

#[test]
fn v_agrees_between_derivative_routes() {
    let q = Polynomial::new(vec![1.0, -0.7, 0.3, -0.1]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..20 {
        let s = C::new(rng.gen_range(0.0..1.0), rng.gen_range(10.0..3000.0));
        let a = v_smoothed_zeta(s, &q, 8.0).unwrap();
        let b = v_smoothed_zeta_jet(s, &q, 8.0).unwrap();
        assert!((a - b).norm() <= 1e-8 * b.norm().max(1.0), "{s}: {a} vs {b}");
    }
}

#[test]
fn large_primes_skip_the_inner_sum() {
    let sieve = FactorSieve::new(100_000).unwrap();
    let p1 = Polynomial::parse("x-0.617x(1-x)-0.125x^2(1-x)-0.148x^3(1-x)").unwrap();
    let p = Polynomial::parse("1.55x-1.564x^2+0.177x^3").unwrap();
    let y = 50_000.0;
    let spec = WuCoefficientSpec::new(p1.clone(), Polynomial::x(), p, y).unwrap();
    let cutoff = y.powf(0.75);
    for n in (cutoff.ceil() as u64)..=(y as u64) {
        if !sieve.is_prime(n).unwrap() {
            continue;
        }
        let ell = (y.ln() - (n as f64).ln()) / y.ln();
        for inner in [InnerArgument::Literal, InnerArgument::LogPrime] {
            let a = wu_coefficients(n, &spec.clone().with_inner(inner), &sieve).unwrap();
            assert_eq!(a, -p1.eval(ell), "n = {n}");
        }
    }
}
