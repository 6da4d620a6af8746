use critline::levinson::*;
use critline::polynomial::Polynomial;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// P = x + x(1−x)·r(x) and Q = 1 + x·s(x) meet the constraints for any r, s.
fn random_params(rng: &mut ChaCha8Rng) -> LevinsonParams {
    let p_extra = rng.gen_range(0..=3usize);
    let q_deg = rng.gen_range(1..=4usize);
    let r: Vec<f64> = (0..p_extra).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut p = Polynomial::x();
    if !r.is_empty() {
        let bump = Polynomial::new(vec![0.0, 1.0, -1.0]).unwrap().mul(&Polynomial::new(r).unwrap());
        p = p.add(&bump);
    }
    let mut q = vec![1.0];
    q.extend((0..q_deg).map(|_| rng.gen_range(-1.5..1.0)));
    LevinsonParams::new(
        p,
        Polynomial::new(q).unwrap(),
        rng.gen_range(0.1..3.0),
        rng.gen_range(0.1..0.5),
    )
    .unwrap()
}

#[test]
fn exact_and_quadrature_agree_on_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let params = random_params(&mut rng);
        for form in [LevinsonForm::AsPrinted, LevinsonForm::Squared] {
            let exact = c_constant_exact(&params, form).unwrap();
            let quad = c_constant_quadrature(&params, form, 1e-11).unwrap();
            // The O(h²) difference error scales with |c|, which reaches the hundreds here.
            let gap = (exact - quad).abs() / exact.abs().max(1.0);
            worst = worst.max(gap);
            assert!(gap < 1e-9, "{params:?} {form:?}: {exact} vs {quad}");
        }
    }
    eprintln!("worst relative exact/quadrature gap {worst:e}");
}

#[test]
fn baseline_exact_and_quadrature_to_1e10() {
    let params = LevinsonParams::baseline();
    for form in [LevinsonForm::AsPrinted, LevinsonForm::Squared] {
        let exact = c_constant_exact(&params, form).unwrap();
        let quad = c_constant_quadrature(&params, form, 1e-12).unwrap();
        assert!((exact - quad).abs() < 1e-10, "{exact} vs {quad}");
    }
}

#[test]
fn constant_increases_with_r() {
    let base = LevinsonParams::baseline();
    for form in [LevinsonForm::AsPrinted, LevinsonForm::Squared] {
        let values: Vec<f64> = (0..30)
            .map(|k| {
                let r = 0.1 + 2.9 * k as f64 / 29.0;
                c_constant_exact(&LevinsonParams { r_shift: r, ..base.clone() }, form).unwrap()
            })
            .collect();
        assert!(values.windows(2).all(|w| w[1] > w[0]), "{form:?}");
    }
}

#[test]
fn registry_tuples_give_bounds_in_unit_interval() {
    for tuple in published_tuples() {
        let params = tuple.levinson_params(0.5).unwrap();
        for form in [LevinsonForm::AsPrinted, LevinsonForm::Squared] {
            let c = c_constant_exact(&params, form).unwrap();
            let kappa = kappa_lower_bound(c, params.r_shift).unwrap();
            assert!(kappa > 0.0 && kappa < 1.0, "{} {form:?}: {kappa}", tuple.name);
        }
    }
}

#[test]
fn q_operators_on_shifted_constant_give_squared_form() {
    let params = LevinsonParams::baseline();
    let squared = c_constant_exact(&params, LevinsonForm::Squared).unwrap();
    let values: Vec<f64> = [1e6, 1e8, 1e10]
        .iter()
        .map(|&t| q_operator_shifted_c(&params, t).unwrap())
        .collect();
    for v in &values {
        assert!((v - squared).abs() < 1e-3, "{v} vs {squared}");
    }
    // c(α, β) depends on T only through Lα and Lβ, so the sequence is flat.
    assert!((values[0] - values[2]).abs() < 1e-9);
}

#[test]
fn q_operator_check_with_higher_degree_q() {
    let params = LevinsonParams::new(
        Polynomial::parse("x-0.525x(1-x)-0.183x^2(1-x)-0.085x^3(1-x)").unwrap(),
        Polynomial::parse("1-0.3x+0.2x^2").unwrap(),
        1.116,
        0.5,
    )
    .unwrap();
    let squared = c_constant_exact(&params, LevinsonForm::Squared).unwrap();
    let v = q_operator_shifted_c(&params, 1e8).unwrap();
    assert!((v - squared).abs() < 1e-3, "{v} vs {squared}");
}
