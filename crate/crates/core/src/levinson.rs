//! The Levinson constant c(P, Q, R, θ), the κ lower bound, the shifted
//! constant c(α, β) and a registry of published polynomial choices.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mollifier::require_value;
use crate::numeric::integrate;
use crate::polynomial::Polynomial;

/// Which integrand the constant uses.
///
/// With D(u, v) = RθP(u)Q(v) + P'(u)Q(v) + θP(u)Q'(v), `AsPrinted` integrates
/// e^{2Rv}·D and `Squared` integrates e^{2Rv}·D². The squared form is what the
/// Q-operators produce from the shifted constant c(α, β).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevinsonForm {
    #[default]
    AsPrinted,
    Squared,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevinsonParams {
    pub p_poly: Polynomial,
    pub q_poly: Polynomial,
    pub r_shift: f64,
    pub theta: f64,
}

impl LevinsonParams {
    pub fn new(p_poly: Polynomial, q_poly: Polynomial, r_shift: f64, theta: f64) -> Result<Self> {
        let params = Self {
            p_poly,
            q_poly,
            r_shift,
            theta,
        };
        params.validate()?;
        Ok(params)
    }

    /// P = x, Q = 1 − x, R = 1.3, θ = 1/2.
    pub fn baseline() -> Self {
        Self {
            p_poly: Polynomial::x(),
            q_poly: Polynomial::new(vec![1.0, -1.0]).expect("finite"),
            r_shift: 1.3,
            theta: 0.5,
        }
    }

    /// R = 0 is accepted here since c has a finite limit there; the κ bound
    /// itself needs R > 0.
    pub fn validate(&self) -> Result<()> {
        if !(self.r_shift >= 0.0) || !self.r_shift.is_finite() {
            return Err(Error::range("R", self.r_shift, "[0, inf)"));
        }
        if !(self.theta > 0.0 && self.theta <= 0.5) {
            return Err(Error::range("theta", self.theta, "(0, 0.5]"));
        }
        require_value(&self.p_poly, 0.0, 0.0, "P")?;
        require_value(&self.p_poly, 1.0, 1.0, "P")?;
        require_value(&self.q_poly, 0.0, 1.0, "Q")
    }
}

/// I_m(a) = ∫₀¹ e^{av} v^m dv for m = 0..=max_m, a ≥ 0.
///
/// Summed from the series Σ_k a^k / (k! (m+k+1)), whose terms are all
/// positive, so there is no cancellation for any a ≥ 0 or m.
fn exp_moments(a: f64, max_m: usize) -> Vec<f64> {
    (0..=max_m)
        .map(|m| {
            let mut term = 1.0;
            let mut total = 1.0 / (m as f64 + 1.0);
            for k in 1..1000 {
                term *= a / k as f64;
                let piece = term / (m + k + 1) as f64;
                total += piece;
                if piece < 1e-18 * total {
                    break;
                }
            }
            total
        })
        .collect()
}

/// ∫₀¹ e^{av} f(v) dv.
fn exp_integral(f: &Polynomial, moments: &[f64]) -> f64 {
    f.coefficients().iter().zip(moments).map(|(c, i)| c * i).sum()
}

/// c(P, Q, R, θ) by term-wise integration of the expanded integrand.
pub fn c_constant_exact(params: &LevinsonParams, form: LevinsonForm) -> Result<f64> {
    params.validate()?;
    let (p, q, r, theta) = (&params.p_poly, &params.q_poly, params.r_shift, params.theta);
    let dp = p.derivative();
    let dq = q.derivative();
    // A(u) = RθP(u) + P'(u), so D = A(u)Q(v) + θP(u)Q'(v).
    let a = p.scale(r * theta).add(&dp);
    let inner = match form {
        LevinsonForm::AsPrinted => {
            let moments = exp_moments(2.0 * r, q.degree());
            a.integral_unit() * exp_integral(q, &moments)
                + theta * p.integral_unit() * exp_integral(&dq, &moments)
        }
        LevinsonForm::Squared => {
            let moments = exp_moments(2.0 * r, 2 * q.degree());
            a.mul(&a).integral_unit() * exp_integral(&q.mul(q), &moments)
                + 2.0 * theta * a.mul(p).integral_unit() * exp_integral(&q.mul(&dq), &moments)
                + theta * theta * p.mul(p).integral_unit() * exp_integral(&dq.mul(&dq), &moments)
        }
    };
    Ok(1.0 + inner / theta)
}

/// Step of the central difference in [`c_constant_quadrature`]: 2^-20,
/// close to 1e-6 but exact under scaling, so θ·h carries no rounding.
pub const DIFFERENCE_STEP: f64 = 9.536_743_164_062_5e-7;

// Relative floor for the quadrature error estimates.
const DIFFERENCE_NOISE: f64 = 1e-13;

const QUADRATURE_BUDGET: usize = 1_000_000;

/// c(P, Q, R, θ) by nested adaptive quadrature over the unit square, with
/// the x-derivative taken by a central difference. Independent of the
/// algebra in [`c_constant_exact`].
/// Samples of the difference are formed in double-double arithmetic.
pub fn c_constant_quadrature(params: &LevinsonParams, form: LevinsonForm, tol: f64) -> Result<f64> {
    params.validate()?;
    if !(tol >= 1e-12) {
        return Err(Error::range("tol", tol, "[1e-12, inf)"));
    }
    let (p, q, r, theta) = (&params.p_poly, &params.q_poly, params.r_shift, params.theta);
    let h = DIFFERENCE_STEP;
    let rate = dd::Dd::prod(r, theta);
    // g(x) = e^{Rθx} P(x+u) Q(v+θx) in double-double at x = ±h; u ± h and
    // v ± θh are exact as pairs, so only the difference formula itself errs.
    let g = |sign: f64, u: f64, v: f64| {
        let x = sign * h;
        let e = dd::exp_small(rate.scale(x));
        e.mul(dd::horner(p, dd::Dd::sum(u, x))).mul(dd::horner(q, dd::Dd::sum(v, theta * x)))
    };
    let mut evals = 0usize;
    let mut inner_error = None;
    let outer = integrate(
        |v| {
            let inner = integrate(
                |u| {
                    let d = g(1.0, u, v).sub(g(-1.0, u, v)).value() / (2.0 * h);
                    match form {
                        LevinsonForm::AsPrinted => d,
                        LevinsonForm::Squared => d * d,
                    }
                },
                0.0,
                1.0,
                tol * 0.1,
                DIFFERENCE_NOISE,
                QUADRATURE_BUDGET,
            );
            evals += 1;
            match inner {
                Ok(value) => (2.0 * r * v).exp() * value,
                Err(e) => {
                    inner_error.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        0.0,
        1.0,
        tol * theta,
        DIFFERENCE_NOISE,
        QUADRATURE_BUDGET,
    )?;
    if let Some(e) = inner_error {
        return Err(e);
    }
    if !outer.is_finite() {
        return Err(Error::Accuracy(format!("quadrature produced {outer} after {evals} panels")));
    }
    Ok(1.0 + outer / theta)
}

mod dd {
    use crate::polynomial::Polynomial;

    /// Unevaluated sum hi + lo with |lo| ≤ ulp(hi)/2.
    #[derive(Debug, Clone, Copy)]
    pub struct Dd {
        hi: f64,
        lo: f64,
    }

    impl Dd {
        pub fn sum(a: f64, b: f64) -> Self {
            let s = a + b;
            let bb = s - a;
            let err = (a - (s - bb)) + (b - bb);
            Self { hi: s, lo: err }
        }

        pub fn prod(a: f64, b: f64) -> Self {
            let p = a * b;
            Self {
                hi: p,
                lo: a.mul_add(b, -p),
            }
        }

        fn renorm(hi: f64, lo: f64) -> Self {
            let s = hi + lo;
            Self {
                hi: s,
                lo: lo - (s - hi),
            }
        }

        pub fn add(self, o: Self) -> Self {
            let s = Self::sum(self.hi, o.hi);
            Self::renorm(s.hi, s.lo + self.lo + o.lo)
        }

        pub fn sub(self, o: Self) -> Self {
            self.add(Self { hi: -o.hi, lo: -o.lo })
        }

        pub fn mul(self, o: Self) -> Self {
            let p = Self::prod(self.hi, o.hi);
            Self::renorm(p.hi, p.lo + self.hi * o.lo + self.lo * o.hi)
        }

        /// Multiplication by a power of two or other exact scale.
        pub fn scale(self, k: f64) -> Self {
            Self {
                hi: self.hi * k,
                lo: self.lo * k,
            }
        }

        pub fn value(self) -> f64 {
            self.hi + self.lo
        }
    }

    pub fn horner(p: &Polynomial, x: Dd) -> Dd {
        p.coefficients()
            .iter()
            .rev()
            .fold(Dd { hi: 0.0, lo: 0.0 }, |acc, &c| acc.mul(x).add(Dd { hi: c, lo: 0.0 }))
    }

    /// e^y for |y| ≲ 1e-5, by its Taylor series.
    pub fn exp_small(y: Dd) -> Dd {
        let mut term = Dd { hi: 1.0, lo: 0.0 };
        let mut total = term;
        for k in 1..=5 {
            term = term.mul(y).scale(1.0 / k as f64);
            total = total.add(term);
        }
        total
    }
}

/// κ ≥ 1 − log(c)/R.
pub fn kappa_lower_bound(c_value: f64, r_shift: f64) -> Result<f64> {
    if !(r_shift > 0.0) || !r_shift.is_finite() {
        return Err(Error::range("R", r_shift, "(0, inf)"));
    }
    if !(c_value >= 1.0) {
        return Err(Error::Domain(format!("c = {c_value} < 1 would put the bound above 1")));
    }
    Ok(1.0 - c_value.ln() / r_shift)
}

/// Shifts and lengths for [`shifted_c`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftedParams {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub m_length: f64,
    pub t_scale: f64,
}

impl ShiftedParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_scale > 1.0) || !self.t_scale.is_finite() {
            return Err(Error::range("T", self.t_scale, "(1, inf)"));
        }
        if !(self.m_length >= 1.0) || !self.m_length.is_finite() {
            return Err(Error::range("M", self.m_length, "[1, inf)"));
        }
        let bound = 10.0 / self.t_scale.ln();
        for (name, z) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(z.norm() <= bound) {
                return Err(Error::range(name, z.norm(), format!("[0, {bound}]")));
            }
        }
        Ok(())
    }
}

/// ∫₀¹ e^{av} dv for complex a.
fn exp_mean(a: Complex64) -> Complex64 {
    if a.norm() < 0.5 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut total = term;
        for k in 1..40 {
            // a^k / (k+1)!
            term *= a / (k as f64 + 1.0);
            total += term;
        }
        return total;
    }
    (a.exp() - 1.0) / a
}

/// c(α, β) = 1 + (1/θ) ∂²/∂x∂y M^{-βx-αy} ∫∫ T^{-v(α+β)} P(x+u)P(y+u) du dv at 0.
///
/// Expands to 1 + (J/θ)[αβℓ²∫P² − (α+β)ℓ∫PP' + ∫P'²] with ℓ = log M and
/// J = ∫₀¹ T^{-v(α+β)} dv.
pub fn shifted_c(shift: &ShiftedParams, p_poly: &Polynomial, theta: f64) -> Result<Complex64> {
    shift.validate()?;
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::range("theta", theta, "(0, 1)"));
    }
    let ell = shift.m_length.ln();
    let dp = p_poly.derivative();
    let pp = p_poly.mul(p_poly).integral_unit();
    let pdp = p_poly.mul(&dp).integral_unit();
    let dpdp = dp.mul(&dp).integral_unit();
    let (a, b) = (shift.alpha, shift.beta);
    let j = exp_mean(-(a + b) * shift.t_scale.ln());
    let bracket = a * b * ell * ell * pp - (a + b) * ell * pdp + dpdp;
    Ok(1.0 + j * bracket / theta)
}

// Five-point central stencils for derivative orders 0..=4 at unit spacing.
const STENCILS: [[f64; 5]; 5] = [
    [0.0, 0.0, 1.0, 0.0, 0.0],
    [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0],
    [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0],
    [-0.5, 1.0, 0.0, -1.0, 0.5],
    [1.0, -4.0, 6.0, -4.0, 1.0],
];

/// Q(−(1/L)∂/∂α) Q(−(1/L)∂/∂β) c(α, β) at α = β = −R/L, with the
/// derivatives taken on a 5×5 stencil of step 0.2/L.
///
/// The result is independent of T; it approaches the
/// [`LevinsonForm::Squared`] constant as the stencil error vanishes.
pub fn q_operator_shifted_c(params: &LevinsonParams, t_scale: f64) -> Result<f64> {
    params.validate()?;
    let q = &params.q_poly;
    if q.degree() > 4 {
        return Err(Error::Domain(format!("stencil supports deg Q <= 4, got {}", q.degree())));
    }
    let l = t_scale.ln();
    let h = 0.2 / l;
    let centre = -params.r_shift / l;
    let m_length = t_scale.powf(params.theta);
    let mut grid = [[Complex64::new(0.0, 0.0); 5]; 5];
    for (i, row) in grid.iter_mut().enumerate() {
        for (k, cell) in row.iter_mut().enumerate() {
            let shift = ShiftedParams {
                alpha: Complex64::new(centre + (i as f64 - 2.0) * h, 0.0),
                beta: Complex64::new(centre + (k as f64 - 2.0) * h, 0.0),
                m_length,
                t_scale,
            };
            *cell = shifted_c(&shift, &params.p_poly, params.theta)?;
        }
    }
    let coeffs = q.coefficients();
    let mut total = Complex64::new(0.0, 0.0);
    for (j, &qj) in coeffs.iter().enumerate() {
        for (k, &qk) in coeffs.iter().enumerate() {
            let mut d = Complex64::new(0.0, 0.0);
            for (i, wi) in STENCILS[j].iter().enumerate() {
                for (m, wm) in STENCILS[k].iter().enumerate() {
                    d += grid[i][m] * (wi * wm);
                }
            }
            let scale = (-1.0 / l).powi((j + k) as i32) / h.powi((j + k) as i32);
            total += qj * qk * scale * d;
        }
    }
    Ok(total.re)
}

/// A published polynomial choice with the text it was printed as.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublishedTuple {
    pub name: String,
    pub r_shift: f64,
    pub theta: Option<f64>,
    pub theta_text: String,
    /// Label and verbatim text of each polynomial, in printed order.
    pub polynomials: Vec<(String, String)>,
    pub claims: Vec<(String, f64)>,
    pub not_reproducible_here: bool,
}

impl PublishedTuple {
    pub fn polynomial(&self, label: &str) -> Result<Polynomial> {
        let text = self
            .polynomials
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, t)| t)
            .ok_or_else(|| Error::Config(format!("tuple '{}' has no polynomial '{label}'", self.name)))?;
        Polynomial::parse(text)
    }

    /// The tuple as Levinson parameters at the given θ. Uses `P1` as P
    /// when there is no plain `P` for the outer mollifier.
    pub fn levinson_params(&self, theta: f64) -> Result<LevinsonParams> {
        let p = if self.polynomials.iter().any(|(l, _)| l == "P1") {
            self.polynomial("P1")?
        } else {
            self.polynomial("P")?
        };
        LevinsonParams::new(p, self.polynomial("Q")?, self.r_shift, theta)
    }
}

fn texts(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
    pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

/// The Levinson baseline and the two Dirichlet-twisted choices, verbatim.
pub fn published_tuples() -> Vec<PublishedTuple> {
    vec![
        PublishedTuple {
            name: "levinson_baseline".into(),
            r_shift: 1.3,
            theta: Some(0.5),
            theta_text: "0.5".into(),
            polynomials: texts(&[("P", "x"), ("Q", "1-x")]),
            claims: vec![("c".into(), 2.35), ("kappa".into(), 0.35)],
            not_reproducible_here: false,
        },
        PublishedTuple {
            name: "wu_kappa".into(),
            r_shift: 1.3,
            theta: None,
            theta_text: "4/7-ε".into(),
            polynomials: texts(&[
                ("Q", "1-0.642x-1.227(x^2/2-x^3/3)-5.178(x^3/3-x^4/2+x^5/5)"),
                ("P1", "x-0.617x(1-x)-0.125x^2(1-x)-0.148x^3(1-x)"),
                ("P2", "x"),
                ("P", "1.55x-1.564x^2+0.177x^3"),
            ]),
            claims: vec![("kappa".into(), 0.4172)],
            not_reproducible_here: true,
        },
        PublishedTuple {
            name: "wu_kappa_star".into(),
            r_shift: 1.116,
            theta: None,
            theta_text: "4/7-ε".into(),
            polynomials: texts(&[
                ("Q", "1-1.032x"),
                ("P1", "x-0.525x(1-x)-0.183x^2(1-x)-0.085x^3(1-x)"),
                ("P2", "x"),
                ("P", "0.838x-0.938x^2-0.084x^3"),
            ]),
            claims: vec![("kappa_star".into(), 0.4074)],
            not_reproducible_here: true,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(v: &[f64]) -> Polynomial {
        Polynomial::new(v.to_vec()).unwrap()
    }

    #[test]
    fn zero_shift_limit_is_three() {
        let params = LevinsonParams::new(Polynomial::x(), poly(&[1.0]), 0.0, 0.5).unwrap();
        for form in [LevinsonForm::AsPrinted, LevinsonForm::Squared] {
            assert!((c_constant_exact(&params, form).unwrap() - 3.0).abs() < 1e-14);
            assert!((c_constant_quadrature(&params, form, 1e-11).unwrap() - 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn baseline_values() {
        let params = LevinsonParams::baseline();
        let printed = c_constant_exact(&params, LevinsonForm::AsPrinted).unwrap();
        let squared = c_constant_exact(&params, LevinsonForm::Squared).unwrap();
        // Independent closed forms, with a = 2R:
        // printed: 1 + 2[(0.65/2 + 1)(I0 − I1) − 0.25 I0]
        // squared: 1 + 2[(R²θ²/3 + Rθ + 1)E(1−v)² − (Rθ/3 + 1/2)·2θ E(1−v) + θ²/3 E1]
        let a: f64 = 2.6;
        let i0 = (a.exp() - 1.0) / a;
        let i1 = (a.exp() - i0) / a;
        let i2 = (a.exp() - 2.0 * i1) / a;
        let expected = 1.0 + 2.0 * ((0.325 + 1.0) * (i0 - i1) - 0.25 * i0);
        assert!((printed - expected).abs() < 1e-12);
        let (r, th) = (1.3, 0.5);
        let e_sq = i0 - 2.0 * i1 + i2;
        let e_lin = i0 - i1;
        let expected_sq = 1.0
            + (1.0 / th)
                * ((r * r * th * th / 3.0 + r * th + 1.0) * e_sq
                    - (r * th / 3.0 + 0.5) * 2.0 * th * e_lin
                    + th * th / 3.0 * i0);
        assert!((squared - expected_sq).abs() < 1e-12);
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa_lower_bound(1.0, 0.7).unwrap(), 1.0);
        assert!(kappa_lower_bound(1.3f64.exp(), 1.3).unwrap().abs() < 1e-15);
        assert!((kappa_lower_bound(2.35, 1.3).unwrap() - 0.342_757_4).abs() < 1e-6);
        assert!(matches!(kappa_lower_bound(0.9, 1.3), Err(Error::Domain(_))));
        assert!(kappa_lower_bound(2.0, 0.0).is_err());
    }

    #[test]
    fn constraint_violations() {
        let bad = LevinsonParams::new(poly(&[0.0]), poly(&[1.0, -1.0]), 1.3, 0.5);
        assert!(matches!(bad, Err(Error::Constraint(_))));
        let bad = LevinsonParams::new(Polynomial::x(), poly(&[2.0, -1.0]), 1.3, 0.5);
        assert!(matches!(bad, Err(Error::Constraint(_))));
        assert!(LevinsonParams::new(Polynomial::x(), poly(&[1.0]), 1.3, 0.6).is_err());
        assert!(LevinsonParams::new(Polynomial::x(), poly(&[1.0]), -1.0, 0.5).is_err());
    }

    #[test]
    fn moments_small_and_large_shift() {
        for a in [0.0, 0.3, 2.6, 6.0] {
            let m = exp_moments(a, 12);
            for (k, &value) in m.iter().enumerate() {
                let reference = integrate(|v: f64| (a * v).exp() * v.powi(k as i32), 0.0, 1.0, 1e-15, 0.0, 100_000)
                    .unwrap();
                assert!((value - reference).abs() < 1e-14 * reference.max(1.0), "a={a} k={k}");
            }
        }
    }

    #[test]
    fn exp_mean_is_continuous() {
        for a in [Complex64::new(0.49, 0.1), Complex64::new(0.51, 0.1), Complex64::new(-3.0, 2.0)] {
            let direct = (a.exp() - 1.0) / a;
            assert!((exp_mean(a) - direct).norm() < 1e-14);
        }
        assert_eq!(exp_mean(Complex64::new(0.0, 0.0)), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn shifted_c_zero_shift_and_symmetry() {
        let p = poly(&[0.0, 1.2, -0.2]);
        let zero = ShiftedParams {
            alpha: Complex64::new(0.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
            m_length: 1e4,
            t_scale: 1e8,
        };
        let dp = p.derivative();
        let expected = 1.0 + dp.mul(&dp).integral_unit() / 0.5;
        assert!((shifted_c(&zero, &p, 0.5).unwrap() - expected).norm() < 1e-14);
        let a = ShiftedParams {
            alpha: Complex64::new(-0.05, 0.02),
            beta: Complex64::new(0.03, -0.01),
            ..zero
        };
        let b = ShiftedParams {
            alpha: a.beta,
            beta: a.alpha,
            ..a
        };
        assert_eq!(shifted_c(&a, &p, 0.5).unwrap(), shifted_c(&b, &p, 0.5).unwrap());
        let far = ShiftedParams {
            alpha: Complex64::new(1.0, 0.0),
            ..zero
        };
        assert!(shifted_c(&far, &p, 0.5).is_err());
    }

    #[test]
    fn registry_shape() {
        let tuples = published_tuples();
        assert_eq!(tuples.len(), 3);
        let star = &tuples[2];
        assert_eq!(star.r_shift, 1.116);
        assert!((star.polynomial("P1").unwrap().eval(1.0) - 1.0).abs() < 1e-15);
        assert!(tuples[1].not_reproducible_here && star.not_reproducible_here);
        assert!(!tuples[0].not_reproducible_here);
    }
}
