//! Mollifiers, the smoothed zeta combination V(s) and two-piece
//! mollifier coefficients.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arithmetic::FactorSieve;
use crate::dirichlet::DirichletCharacter;
use crate::error::{Error, Result};
use crate::polynomial::Polynomial;
use crate::zeta::{zeta_derivative, zeta_jet, MAX_DERIVATIVE_ORDER};

/// Constraint tolerance for P(0), P(1) and Q(0).
pub const CONSTRAINT_TOL: f64 = 1e-12;

pub(crate) fn require_value(p: &Polynomial, x: f64, want: f64, name: &str) -> Result<()> {
    let got = p.eval(x);
    if (got - want).abs() > CONSTRAINT_TOL {
        return Err(Error::Constraint(format!("{name}({x})={want} violated: got {got}")));
    }
    Ok(())
}

/// Parameters of ψ(s) = Σ_{h ≤ M} μ(h) h^{-(1/2+s-σ₀)} P(log(M/h)/log M).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MollifierSpec {
    pub t_scale: f64,
    pub theta: f64,
    pub r_shift: f64,
    pub p_poly: Polynomial,
}

impl MollifierSpec {
    pub fn new(t_scale: f64, theta: f64, r_shift: f64, p_poly: Polynomial) -> Result<Self> {
        let spec = Self {
            t_scale,
            theta,
            r_shift,
            p_poly,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::range("theta", self.theta, "(0, 1)"));
        }
        if !(self.t_scale > 1.0) || !self.t_scale.is_finite() {
            return Err(Error::range("T", self.t_scale, "(1, inf)"));
        }
        if !(self.r_shift > 0.0) || !self.r_shift.is_finite() {
            return Err(Error::range("R", self.r_shift, "(0, inf)"));
        }
        require_value(&self.p_poly, 0.0, 0.0, "P")?;
        require_value(&self.p_poly, 1.0, 1.0, "P")
    }

    /// M = T^θ.
    pub fn m_length(&self) -> f64 {
        self.t_scale.powf(self.theta)
    }

    /// L = log T.
    pub fn log_scale(&self) -> f64 {
        self.t_scale.ln()
    }

    /// σ₀ = 1/2 − R/L.
    pub fn sigma0(&self) -> f64 {
        0.5 - self.r_shift / self.log_scale()
    }
}

/// ψ with its coefficients precomputed: ψ(s) = Σ_h w_h e^{-s log h}.
#[derive(Debug, Clone)]
pub struct PreparedMollifier {
    sigma0: f64,
    log_h: Vec<f64>,
    weight: Vec<f64>,
}

impl PreparedMollifier {
    pub fn new(spec: &MollifierSpec, sieve: &FactorSieve) -> Result<Self> {
        spec.validate()?;
        let m = spec.m_length();
        let top = m.floor() as u64;
        if top > sieve.limit() as u64 {
            return Err(Error::range("M", m, format!("[1, {}]", sieve.limit())));
        }
        let log_m = m.ln();
        let sigma0 = spec.sigma0();
        let mut log_h = Vec::new();
        let mut weight = Vec::new();
        for h in 1..=top.max(1) {
            let mu = sieve.mobius(h)?;
            if mu == 0 {
                continue;
            }
            let lh = (h as f64).ln();
            let arg = if h == 1 { 1.0 } else { (log_m - lh) / log_m };
            weight.push(mu as f64 * spec.p_poly.eval(arg) * (-(0.5 - sigma0) * lh).exp());
            log_h.push(lh);
        }
        Ok(Self {
            sigma0,
            log_h,
            weight,
        })
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    pub fn len(&self) -> usize {
        self.weight.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weight.is_empty()
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.log_h
            .iter()
            .zip(&self.weight)
            .map(|(&lh, &w)| w * (-s * lh).exp())
            .sum()
    }

    /// ψ(σ + it) at a fixed σ for many t; cheaper than [`Self::eval`] since
    /// the real-part decay is folded once into `scaled`.
    pub fn line(&self, sigma: f64) -> MollifierLine<'_> {
        MollifierLine {
            log_h: &self.log_h,
            scaled: self
                .log_h
                .iter()
                .zip(&self.weight)
                .map(|(&lh, &w)| w * (-sigma * lh).exp())
                .collect(),
        }
    }
}

/// ψ restricted to a vertical line.
#[derive(Debug, Clone)]
pub struct MollifierLine<'a> {
    log_h: &'a [f64],
    scaled: Vec<f64>,
}

impl MollifierLine<'_> {
    pub fn eval(&self, t: f64) -> Complex64 {
        let (mut re, mut im) = (0.0, 0.0);
        for (&lh, &w) in self.log_h.iter().zip(&self.scaled) {
            let (sin, cos) = (t * lh).sin_cos();
            re += w * cos;
            im -= w * sin;
        }
        Complex64::new(re, im)
    }
}

/// ψ(s) by direct summation using the shared sieve.
pub fn psi_mollifier(s: Complex64, spec: &MollifierSpec) -> Result<Complex64> {
    Ok(PreparedMollifier::new(spec, FactorSieve::shared())?.eval(s))
}

fn check_q(q_poly: &Polynomial, s: Complex64, log_scale: f64) -> Result<()> {
    if q_poly.degree() > MAX_DERIVATIVE_ORDER {
        return Err(Error::Domain(format!(
            "deg Q = {} exceeds {MAX_DERIVATIVE_ORDER}",
            q_poly.degree()
        )));
    }
    if !(log_scale > 0.0) {
        return Err(Error::range("L", log_scale, "(0, inf)"));
    }
    if (s - 1.0).norm() < 1e-3 {
        return Err(Error::Pole(format!("V(s) at s = {s} is too close to the pole of zeta")));
    }
    Ok(())
}

/// V(s) = Q(-(1/L) d/ds) ζ(s) = Σ_j q_j (-1/L)^j ζ^{(j)}(s), derivatives by
/// Cauchy integrals.
pub fn v_smoothed_zeta(s: Complex64, q_poly: &Polynomial, log_scale: f64) -> Result<Complex64> {
    check_q(q_poly, s, log_scale)?;
    let mut total = Complex64::new(0.0, 0.0);
    let mut factor = 1.0;
    for (j, &c) in q_poly.coefficients().iter().enumerate() {
        if c != 0.0 {
            total += c * factor * zeta_derivative(s, j)?;
        }
        factor *= -1.0 / log_scale;
    }
    Ok(total)
}

/// [`v_smoothed_zeta`] with all derivatives from one differentiated
/// Euler-Maclaurin pass. Used for bulk evaluation on grids.
pub fn v_smoothed_zeta_jet(s: Complex64, q_poly: &Polynomial, log_scale: f64) -> Result<Complex64> {
    check_q(q_poly, s, log_scale)?;
    let jet = zeta_jet(s, q_poly.degree())?;
    let mut total = Complex64::new(0.0, 0.0);
    let mut factor = 1.0;
    for (&c, d) in q_poly.coefficients().iter().zip(jet) {
        total += c * factor * d;
        factor *= -1.0 / log_scale;
    }
    Ok(total)
}

/// How the inner polynomial of the two-piece coefficients is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerArgument {
    /// P(log(y/n)/log y), the same argument as the outer polynomials.
    #[default]
    Literal,
    /// P(log p/log y) for each prime p | n.
    LogPrime,
}

/// Parameters of a(n) = μ(n)(P₁(ℓ) + P₂(ℓ) Σ_{p | n, p ≤ y^{3/4}} P(·)),
/// ℓ = log(y/n)/log y.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WuCoefficientSpec {
    pub p1: Polynomial,
    pub p2: Polynomial,
    pub p: Polynomial,
    pub y_length: f64,
    #[serde(default)]
    pub inner: InnerArgument,
}

impl WuCoefficientSpec {
    pub fn new(p1: Polynomial, p2: Polynomial, p: Polynomial, y_length: f64) -> Result<Self> {
        let spec = Self {
            p1,
            p2,
            p,
            y_length,
            inner: InnerArgument::Literal,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_inner(mut self, inner: InnerArgument) -> Self {
        self.inner = inner;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.y_length >= 1.0) || !self.y_length.is_finite() {
            return Err(Error::range("y", self.y_length, "[1, inf)"));
        }
        require_value(&self.p1, 0.0, 0.0, "P1")?;
        require_value(&self.p2, 0.0, 0.0, "P2")?;
        require_value(&self.p, 0.0, 0.0, "P")?;
        require_value(&self.p1, 1.0, 1.0, "P1")
    }
}

/// Two-piece coefficient a(n) for 1 ≤ n ≤ y.
pub fn wu_coefficients(n: u64, spec: &WuCoefficientSpec, sieve: &FactorSieve) -> Result<f64> {
    if n == 0 || n as f64 > spec.y_length {
        return Err(Error::range("n", n as f64, format!("[1, {}]", spec.y_length)));
    }
    let mu = sieve.mobius(n)?;
    if mu == 0 {
        return Ok(0.0);
    }
    let log_y = spec.y_length.ln();
    let ell = if n == 1 || log_y == 0.0 { 1.0 } else { (log_y - (n as f64).ln()) / log_y };
    let cutoff = spec.y_length.powf(0.75);
    let mut inner = 0.0;
    for (p, _) in sieve.factorize(n)? {
        if p as f64 <= cutoff {
            inner += match spec.inner {
                InnerArgument::Literal => spec.p.eval(ell),
                InnerArgument::LogPrime => spec.p.eval((p as f64).ln() / log_y),
            };
        }
    }
    Ok(mu as f64 * (spec.p1.eval(ell) + spec.p2.eval(ell) * inner))
}

/// Immutable table of coefficients a(1..=y).
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    values: Vec<f64>,
}

impl CoefficientTable {
    /// `values[k]` is a(k+1).
    pub fn from_values(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn from_wu(spec: &WuCoefficientSpec, sieve: &FactorSieve) -> Result<Self> {
        spec.validate()?;
        let top = spec.y_length.floor() as u64;
        if top > sieve.limit() as u64 {
            return Err(Error::range("y", spec.y_length, format!("[1, {}]", sieve.limit())));
        }
        let values = (1..=top).map(|n| wu_coefficients(n, spec, sieve)).collect::<Result<_>>()?;
        Ok(Self { values })
    }

    pub fn get(&self, n: u64) -> Option<f64> {
        n.checked_sub(1).and_then(|k| self.values.get(k as usize)).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// B(s, χ) = Σ_{n ≤ y} χ(n) a(n) n^{-s}.
pub fn b_polynomial(
    s: Complex64,
    chi: &DirichletCharacter,
    coeffs: &CoefficientTable,
    y_length: f64,
) -> Complex64 {
    let top = (y_length.floor().max(0.0) as usize).min(coeffs.len());
    (1..=top)
        .filter(|&n| coeffs.values[n - 1] != 0.0)
        .map(|n| chi.value(n as i64) * coeffs.values[n - 1] * (-s * (n as f64).ln()).exp())
        .sum()
}
