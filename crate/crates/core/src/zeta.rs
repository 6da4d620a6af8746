//! Riemann zeta with analytic continuation, the completed ξ(s), Hardy's Z,
//! critical-zero scanning and the shifted approximate functional equation.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{ln_gamma, ln_sin, upper_incomplete_gamma};

/// B_{2j} / (2j)! for j = 1..=12.
const BERNOULLI_OVER_FACTORIAL: [f64; 12] = [
    0.083_333_333_333_333_333,
    -0.001_388_888_888_888_888_9,
    3.306_878_306_878_306_9e-5,
    -8.267_195_767_195_767_2e-7,
    2.087_675_698_786_809_9e-8,
    -5.284_190_138_687_493_2e-10,
    1.338_253_653_068_467_9e-11,
    -3.389_680_296_322_582_9e-13,
    8.586_062_056_277_844_6e-15,
    -2.174_868_698_558_061_9e-16,
    5.509_002_828_360_229_5e-18,
    -1.395_446_468_581_252_3e-19,
];

/// Highest derivative order supported by the jet and Cauchy routes.
pub const MAX_DERIVATIVE_ORDER: usize = 8;

/// Largest |Im s| for which accuracy is maintained.
pub const MAX_HEIGHT: f64 = 1e5;

/// Euler-Maclaurin truncation point for argument `s`.
pub fn euler_maclaurin_terms(s: Complex64) -> usize {
    let by_height = (3.0 * s.im.abs()).ceil() as usize;
    let by_size = (2.0 * s.norm()).ceil() as usize;
    20usize.max(by_height).max(by_size)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Truncated power-series product of two jets.
fn jet_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        if a[i] == Complex64::new(0.0, 0.0) {
            continue;
        }
        for j in 0..n - i {
            out[i + j] += a[i] * b[j];
        }
    }
    out
}

/// Taylor jet of exp(-ε u) · base.
fn exp_jet(base: Complex64, u: f64, len: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(len);
    let mut c = base;
    for k in 0..len {
        out.push(c);
        c *= -u / (k as f64 + 1.0);
    }
    out
}

/// Taylor coefficients of the Hurwitz zeta ζ(s + ε, a) in ε up to `order`,
/// from the Euler-Maclaurin formula differentiated term by term.
///
/// `a` must lie in (0, 1]. With `a = 1` this is the Riemann zeta function.
pub fn hurwitz_taylor(s: Complex64, a: f64, order: usize) -> Result<Vec<Complex64>> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::Domain(format!("Hurwitz shift must lie in (0, 1], got {a}")));
    }
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole("zeta at s = 1".into()));
    }
    let len = order + 1;
    let n_terms = euler_maclaurin_terms(s);

    // Head: Σ_{k<N} (k+a)^{-s} (log(k+a))^j.
    let mut head = vec![Complex64::new(0.0, 0.0); len];
    for k in 0..n_terms {
        let base = k as f64 + a;
        let lb = base.ln();
        let term = (-s * lb).exp();
        let mut acc = term;
        head[0] += acc;
        for h in head.iter_mut().skip(1) {
            acc *= lb;
            *h += acc;
        }
    }
    let mut out: Vec<Complex64> = head
        .iter()
        .enumerate()
        .map(|(j, v)| v * ((-1f64).powi(j as i32) / factorial(j)))
        .collect();

    let big = n_terms as f64 + a;
    let u = big.ln();
    let big_pow = (-s * u).exp(); // (N+a)^{-s}

    // (N+a)^{1-s-ε} / (s - 1 + ε).
    let tail = exp_jet(big_pow * big, u, len);
    let w = s - 1.0;
    let inv: Vec<Complex64> = (0..len)
        .map(|j| (-1f64).powi(j as i32) / w.powu(j as u32 + 1))
        .collect();
    let tail = jet_mul(&tail, &inv);

    // (N+a)^{-s-ε} / 2.
    let half = exp_jet(big_pow * 0.5, u, len);

    // Bernoulli corrections: B_{2j}/(2j)! (s+ε)_{2j-1} (N+a)^{-s-ε-2j+1}.
    let mut poch = vec![Complex64::new(0.0, 0.0); len];
    poch[0] = s;
    if len > 1 {
        poch[1] = Complex64::new(1.0, 0.0);
    }
    let mut corr = vec![Complex64::new(0.0, 0.0); len];
    let mut power = big_pow * big; // (N+a)^{-s+1}
    let linear = |shift: f64| -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); len];
        v[0] = s + shift;
        if len > 1 {
            v[1] = Complex64::new(1.0, 0.0);
        }
        v
    };
    for (j, &b) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let jj = j + 1;
        if jj > 1 {
            poch = jet_mul(&poch, &linear((2 * jj - 3) as f64));
            poch = jet_mul(&poch, &linear((2 * jj - 2) as f64));
        }
        power /= big * big;
        let e = exp_jet(power * b, u, len);
        let term = jet_mul(&poch, &e);
        for (c, t) in corr.iter_mut().zip(term) {
            *c += t;
        }
    }

    for k in 0..len {
        out[k] += tail[k] + half[k] + corr[k];
    }
    Ok(out)
}

/// ζ(s) for s ≠ 1.
///
/// Euler-Maclaurin for Re s ≥ 0, the reflection
/// ζ(s) = 2^s π^{s-1} sin(πs/2) Γ(1-s) ζ(1-s) for Re s < 0.
pub fn zeta(s: Complex64) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole("zeta at s = 1".into()));
    }
    if s.re < 0.0 {
        let one_minus = Complex64::new(1.0, 0.0) - s;
        let log_factor = s * 2f64.ln() + (s - 1.0) * PI.ln() + ln_sin(s * (PI / 2.0)) + ln_gamma(one_minus)?;
        return Ok(log_factor.exp() * zeta(one_minus)?);
    }
    Ok(hurwitz_taylor(s, 1.0, 0)?[0])
}

/// All derivatives ζ^{(k)}(s), k = 0..=order, from the differentiated
/// Euler-Maclaurin expansion. Shares one pass over the head sum, so it is
/// the route used for bulk evaluation.
pub fn zeta_jet(s: Complex64, order: usize) -> Result<Vec<Complex64>> {
    if order > MAX_DERIVATIVE_ORDER {
        return Err(Error::Domain(format!(
            "derivative order {order} exceeds {MAX_DERIVATIVE_ORDER}"
        )));
    }
    let taylor = hurwitz_taylor(s, 1.0, order)?;
    Ok(taylor
        .into_iter()
        .enumerate()
        .map(|(k, c)| c * factorial(k))
        .collect())
}

/// ζ^{(order)}(s) by the Cauchy integral over a circle of radius
/// min(0.25, |s-1|/2) with 64·(order+1) trapezoid nodes.
pub fn zeta_derivative(s: Complex64, order: usize) -> Result<Complex64> {
    if order > MAX_DERIVATIVE_ORDER {
        return Err(Error::Domain(format!(
            "derivative order {order} exceeds {MAX_DERIVATIVE_ORDER}"
        )));
    }
    let dist = (s - 1.0).norm();
    if dist < 1e-3 {
        return Err(Error::Conditioning(format!(
            "|s - 1| = {dist:e} is too close to the pole"
        )));
    }
    if order == 0 {
        return zeta(s);
    }
    let radius = (0.25f64).min(dist / 2.0);
    let nodes = 64 * (order + 1);
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..nodes {
        let phi = 2.0 * PI * j as f64 / nodes as f64;
        let unit = Complex64::from_polar(1.0, phi);
        let f = zeta(s + unit * radius)?;
        acc += f * Complex64::from_polar(1.0, -(order as f64) * phi);
    }
    Ok(acc * (factorial(order) / (nodes as f64 * radius.powi(order as i32))))
}

/// Which route [`xi_completed`] takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum XiPath {
    /// ½ s(s-1) π^{-s/2} Γ(s/2) ζ(s), multiplied out.
    Direct,
    /// Incomplete-gamma double series, entire in s.
    Continued,
}

/// Completed zeta ξ(s) = ½ s(s-1) π^{-s/2} Γ(s/2) ζ(s).
pub fn xi_completed(s: Complex64, path: XiPath) -> Result<Complex64> {
    match path {
        XiPath::Direct => xi_direct(s),
        XiPath::Continued => xi_continued(s, 1.0),
    }
}

fn xi_direct(s: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    if s == one || s == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(0.5, 0.0));
    }
    let half = s * 0.5;
    if half.im == 0.0 && half.re <= 0.0 && half.re == half.re.round() {
        // Trivial zero cancels the pole of Γ(s/2); the reflected point is regular.
        return xi_direct(one - s);
    }
    let log_factor = -half * PI.ln() + ln_gamma(half)?;
    Ok(s * (s - 1.0) * 0.5 * log_factor.exp() * zeta(s)?)
}

/// Sums Σ_{n≥1} f(n) until the terms have passed their peak and fallen below
/// 1e-17 of the running total.
fn sum_decaying<F>(mut term: F, peak: f64) -> Result<Complex64>
where
    F: FnMut(u64) -> Result<Complex64>,
{
    const MAX_TERMS: u64 = 100_000;
    let mut total = Complex64::new(0.0, 0.0);
    for n in 1..=MAX_TERMS {
        let t = term(n)?;
        total += t;
        if (n as f64) > peak && t.norm() <= 1e-17 * total.norm().max(1e-300) {
            return Ok(total);
        }
    }
    Err(Error::Accuracy("incomplete-gamma series did not decay".into()))
}

/// ξ(s) from the incomplete-gamma continuation with free parameter z > 0:
///
/// ξ(s) = π^{-s/2} s(s-1)/2 Σ n^{-s} Γ(s/2, πn²z)
///      + π^{(s-1)/2} s(s-1)/2 Σ n^{s-1} Γ((1-s)/2, πn²/z)
///      + (s/2) z^{(s-1)/2} - ((s-1)/2) z^{s/2}.
pub fn xi_continued(s: Complex64, z: f64) -> Result<Complex64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("theta split point must be positive, got {z}")));
    }
    let one = Complex64::new(1.0, 0.0);
    let a1 = s * 0.5;
    let a2 = (one - s) * 0.5;
    // Γ(a, x) peaks in n roughly where π n² z ≈ |a|.
    let peak1 = (a1.norm() / (PI * z)).sqrt() + 1.0;
    let peak2 = (a2.norm() * z / PI).sqrt() + 1.0;
    let first = sum_decaying(
        |n| {
            let nf = n as f64;
            Ok((-s * nf.ln()).exp() * upper_incomplete_gamma(a1, PI * nf * nf * z)?)
        },
        peak1,
    )?;
    let second = sum_decaying(
        |n| {
            let nf = n as f64;
            Ok(((s - 1.0) * nf.ln()).exp() * upper_incomplete_gamma(a2, PI * nf * nf / z)?)
        },
        peak2,
    )?;
    let poly = s * (s - 1.0) * 0.5;
    let lnpi = PI.ln();
    let lnz = z.ln();
    Ok(poly * ((-a1 * lnpi).exp() * first + ((s - 1.0) * 0.5 * lnpi).exp() * second)
        + s * 0.5 * ((s - 1.0) * 0.5 * lnz).exp()
        - (s - 1.0) * 0.5 * (a1 * lnz).exp())
}

/// Unit-modulus phase H(1/2+it)/|H(1/2+it)| for H(s) = ½ s(s-1) π^{-s/2} Γ(s/2).
pub fn hardy_phase(t: f64) -> Result<Complex64> {
    let lg = ln_gamma(Complex64::new(0.25, 0.5 * t))?;
    // s(s-1) = -(1/4 + t²) contributes a phase of π.
    Ok(Complex64::from_polar(1.0, PI - 0.5 * t * PI.ln() + lg.im))
}

/// Hardy's Z(t) = H(1/2+it)/|H(1/2+it)| · ζ(1/2+it), real-valued.
///
/// With this normalisation Z(0) = -ζ(1/2) > 0.
pub fn hardy_z(t: f64) -> Result<f64> {
    if !(t.abs() <= MAX_HEIGHT) {
        return Err(Error::range("t", t, format!("[-{MAX_HEIGHT}, {MAX_HEIGHT}]")));
    }
    let v = hardy_phase(t)? * zeta(Complex64::new(0.5, t))?;
    if v.im.abs() >= 1e-6 {
        return Err(Error::Accuracy(format!(
            "Z({t}) has imaginary residual {:e}",
            v.im
        )));
    }
    Ok(v.re)
}

/// Riemann-von Mangoldt shape (T/2π) log(T/2π) - T/2π.
pub fn riemann_von_mangoldt_estimate(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let x = t / (2.0 * PI);
    x * x.ln() - x
}

/// Leading-order count (T/2π) log T.
pub fn leading_order_estimate(t: f64) -> f64 {
    if t <= 1.0 {
        return 0.0;
    }
    t / (2.0 * PI) * t.ln()
}

/// A zero of Z located by bisection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalZero {
    pub ordinate: f64,
    /// Z evaluated at the refined ordinate.
    pub z_value_residual: f64,
}

/// Result of scanning Z(t) for sign changes on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroScanReport {
    pub t_min: f64,
    pub t_max: f64,
    pub step: f64,
    pub zero_count: usize,
    pub zeros: Vec<CriticalZero>,
    /// (T/2π) log(T/2π) - T/2π at T = t_max.
    pub estimate_n_t: f64,
    /// (T/2π) log T at T = t_max.
    pub estimate_leading: f64,
    /// Set when the step is coarse enough that close pairs may be missed.
    pub coarse_step_warning: bool,
}

/// Ordinate accuracy of the bisection refinement.
pub const ZERO_ORDINATE_TOLERANCE: f64 = 1e-6;

fn bisect_zero(mut lo: f64, mut hi: f64, mut z_lo: f64) -> Result<f64> {
    while hi - lo > ZERO_ORDINATE_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        let z_mid = hardy_z(mid)?;
        if z_mid == 0.0 {
            return Ok(mid);
        }
        if (z_mid > 0.0) == (z_lo > 0.0) {
            lo = mid;
            z_lo = z_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Scans Z on `t_min, t_min + step, ..., t_max` and bisects every sign change.
///
/// Grid values are computed in parallel; the report lists zeros in
/// ascending order regardless of scheduling.
pub fn count_critical_zeros(t_min: f64, t_max: f64, step: f64) -> Result<ZeroScanReport> {
    if !(t_min >= 0.0) || !(t_max >= t_min) {
        return Err(Error::Domain(format!(
            "scan needs 0 <= t_min <= t_max, got [{t_min}, {t_max}]"
        )));
    }
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::Domain(format!("scan step must be positive, got {step}")));
    }
    if t_max > MAX_HEIGHT {
        return Err(Error::range("t_max", t_max, format!("[0, {MAX_HEIGHT}]")));
    }
    let mut report = ZeroScanReport {
        t_min,
        t_max,
        step,
        zero_count: 0,
        zeros: Vec::new(),
        estimate_n_t: riemann_von_mangoldt_estimate(t_max),
        estimate_leading: leading_order_estimate(t_max),
        coarse_step_warning: step > 0.5,
    };
    if t_min == t_max {
        return Ok(report);
    }

    let intervals = ((t_max - t_min) / step).ceil() as usize;
    let grid: Vec<f64> = (0..=intervals)
        .map(|k| if k == intervals { t_max } else { t_min + k as f64 * step })
        .collect();
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&t| hardy_z(t))
        .collect::<Result<Vec<_>>>()?;

    let brackets: Vec<(f64, f64, f64)> = (0..grid.len() - 1)
        .filter(|&k| values[k] != 0.0 && values[k + 1] != 0.0 && (values[k] > 0.0) != (values[k + 1] > 0.0))
        .map(|k| (grid[k], grid[k + 1], values[k]))
        .collect();
    let mut ordinates: Vec<f64> = brackets
        .par_iter()
        .map(|&(lo, hi, z_lo)| bisect_zero(lo, hi, z_lo))
        .collect::<Result<Vec<_>>>()?;
    ordinates.extend(
        grid.iter()
            .zip(&values)
            .filter(|(_, &v)| v == 0.0)
            .map(|(&t, _)| t),
    );
    ordinates.sort_by(f64::total_cmp);

    report.zeros = ordinates
        .into_iter()
        .map(|ordinate| {
            Ok(CriticalZero {
                ordinate,
                z_value_residual: hardy_z(ordinate)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    report.zero_count = report.zeros.len();
    Ok(report)
}

/// Inputs of the shifted approximate functional equation for
/// ζ(1/2+α+it) ζ(1/2+β-it).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AfeParams {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub t: f64,
    /// Both sums run over m n ≤ this; `None` picks [`default_afe_truncation`].
    pub truncation_length: Option<u64>,
    pub contour_height_cap: f64,
}

impl AfeParams {
    pub fn new(alpha: Complex64, beta: Complex64, t: f64) -> Self {
        Self {
            alpha,
            beta,
            t,
            truncation_length: None,
            contour_height_cap: 40.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha.re < 0.5 && self.beta.re < 0.5) {
            return Err(Error::Domain(format!(
                "shifts need Re(alpha), Re(beta) < 1/2, got {} and {}",
                self.alpha, self.beta
            )));
        }
        if self.alpha + self.beta == Complex64::new(0.0, 0.0) {
            return Err(Error::Domain(
                "alpha + beta = 0 makes p(s) degenerate; use a small nonzero sum".into(),
            ));
        }
        if !(self.t >= 10.0) || !self.t.is_finite() {
            return Err(Error::Domain(format!("AFE needs t >= 10, got {}", self.t)));
        }
        if !(self.contour_height_cap > 0.0) {
            return Err(Error::Domain("contour height cap must be positive".into()));
        }
        if self.truncation_length == Some(0) {
            return Err(Error::Domain("truncation length must be positive".into()));
        }
        Ok(())
    }
}

/// Default truncation of the AFE sums.
///
/// V_{α,β}(x, t) behaves like a Gaussian in log(2πx/t) scaled by
/// 1/|α+β|², so the cut-off sits where that envelope has dropped to 1e-10:
/// log(2πx/t) ≈ 2 sqrt(log(1e10 / |α+β|²)).
pub fn default_afe_truncation(alpha: Complex64, beta: Complex64, t: f64) -> u64 {
    let scale = (alpha + beta).norm().max(1e-12);
    let width = 2.0 * (10.0 * 10f64.ln() - 2.0 * scale.ln()).max(1.0).sqrt();
    let x = t / (2.0 * PI) * width.exp();
    x.ceil().clamp(10.0, 5e7) as u64
}

/// Trapezoid discretisation of
/// V_{α,β}(x,t) = (1/2πi) ∫_{(1)} G(s)/s g_{α,β}(s,t) x^{-s} ds,
/// G(s) = e^{s²} (( α+β)² - 4s²)/(α+β)².
#[derive(Debug, Clone)]
pub struct AfeKernel {
    y0: f64,
    step: f64,
    weights: Vec<Complex64>,
}

const AFE_NODE_STEP: f64 = 0.1;

impl AfeKernel {
    pub fn new(alpha: Complex64, beta: Complex64, t: f64, cap: f64) -> Result<Self> {
        let sum = alpha + beta;
        let sum2 = sum * sum;
        let half = Complex64::new(0.5, 0.0);
        let it = Complex64::new(0.0, t);
        let denom = ln_gamma((half + alpha + it) * 0.5)? + ln_gamma((half + beta - it) * 0.5)?;
        let n = (cap / AFE_NODE_STEP).floor() as i64;
        let mut nodes: Vec<(f64, Complex64)> = Vec::with_capacity(2 * n as usize + 1);
        for j in -n..=n {
            let y = j as f64 * AFE_NODE_STEP;
            let s = Complex64::new(1.0, y);
            let g_log = -s * PI.ln() + ln_gamma((half + alpha + s + it) * 0.5)?
                + ln_gamma((half + beta + s - it) * 0.5)?
                - denom;
            let big_g = (s * s).exp() * ((sum2 - s * s * 4.0) / sum2);
            let w = big_g / s * g_log.exp() * (AFE_NODE_STEP / (2.0 * PI));
            nodes.push((y, w));
        }
        let peak = nodes.iter().map(|(_, w)| w.norm()).fold(0.0, f64::max);
        let keep = |w: &Complex64| w.norm() > 1e-30 * peak;
        let first = nodes.iter().position(|(_, w)| keep(w)).unwrap_or(0);
        let last = nodes.iter().rposition(|(_, w)| keep(w)).unwrap_or(0);
        Ok(Self {
            y0: nodes[first].0,
            step: AFE_NODE_STEP,
            weights: nodes[first..=last].iter().map(|&(_, w)| w).collect(),
        })
    }

    /// V(x) for real x > 0.
    pub fn eval(&self, x: f64) -> Complex64 {
        let lx = x.ln();
        let mut rot = Complex64::from_polar(1.0, -self.y0 * lx);
        let inc = Complex64::from_polar(1.0, -self.step * lx);
        let mut acc = Complex64::new(0.0, 0.0);
        for &w in &self.weights {
            acc += w * rot;
            rot *= inc;
        }
        acc / x
    }
}

/// V_{α,β}(x, t) with the contour truncated at |Im s| ≤ cap.
pub fn afe_weight(x: f64, alpha: Complex64, beta: Complex64, t: f64, cap: f64) -> Result<Complex64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("AFE weight needs x > 0, got {x}")));
    }
    Ok(AfeKernel::new(alpha, beta, t, cap)?.eval(x))
}

/// X_{α,β,t} = π^{α+β} Γ((½-α-it)/2) Γ((½-β+it)/2) / (Γ((½+α+it)/2) Γ((½+β-it)/2)).
pub fn afe_x_factor(alpha: Complex64, beta: Complex64, t: f64) -> Result<Complex64> {
    let half = Complex64::new(0.5, 0.0);
    let it = Complex64::new(0.0, t);
    let log = (alpha + beta) * PI.ln() + ln_gamma((half - alpha - it) * 0.5)?
        + ln_gamma((half - beta + it) * 0.5)?
        - ln_gamma((half + alpha + it) * 0.5)?
        - ln_gamma((half + beta - it) * 0.5)?;
    Ok(log.exp())
}

/// Pieces of the assembled approximate functional equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AfeTerms {
    pub first_sum: Complex64,
    pub second_sum: Complex64,
    pub x_factor: Complex64,
    pub truncation_length: u64,
    pub value: Complex64,
}

/// Σ_{mn ≤ X} m^{-a} n^{-b} V(mn), grouping pairs by their product.
fn dirichlet_convolution_sum(kernel: &AfeKernel, a_exp: Complex64, b_exp: Complex64, limit: usize) -> Complex64 {
    let logs: Vec<f64> = (0..=limit).map(|k| if k == 0 { 0.0 } else { (k as f64).ln() }).collect();
    let a: Vec<Complex64> = logs.iter().map(|&l| (-a_exp * l).exp()).collect();
    let b: Vec<Complex64> = logs.iter().map(|&l| (-b_exp * l).exp()).collect();
    let mut conv = vec![Complex64::new(0.0, 0.0); limit + 1];
    for m in 1..=limit {
        let am = a[m];
        for n in 1..=limit / m {
            conv[m * n] += am * b[n];
        }
    }
    let terms: Vec<Complex64> = (1..=limit)
        .into_par_iter()
        .map(|k| kernel.eval(k as f64) * conv[k])
        .collect();
    crate::numeric::pairwise_sum_complex(&terms)
}

/// Right-hand side of the shifted approximate functional equation.
pub fn afe_terms(params: &AfeParams) -> Result<AfeTerms> {
    params.validate()?;
    let AfeParams { alpha, beta, t, .. } = *params;
    let truncation = params
        .truncation_length
        .unwrap_or_else(|| default_afe_truncation(alpha, beta, t));
    let limit = truncation as usize;
    let half = Complex64::new(0.5, 0.0);
    let it = Complex64::new(0.0, t);

    let kernel = AfeKernel::new(alpha, beta, t, params.contour_height_cap)?;
    let first_sum = dirichlet_convolution_sum(&kernel, half + alpha + it, half + beta - it, limit);
    let kernel = AfeKernel::new(-beta, -alpha, t, params.contour_height_cap)?;
    let second_sum = dirichlet_convolution_sum(&kernel, half - beta + it, half - alpha - it, limit);
    let x_factor = afe_x_factor(alpha, beta, t)?;
    Ok(AfeTerms {
        first_sum,
        second_sum,
        x_factor,
        truncation_length: truncation,
        value: first_sum + x_factor * second_sum,
    })
}

/// ζ(1/2+α+it) ζ(1/2+β-it) assembled from the approximate functional equation.
pub fn afe_pair(params: &AfeParams) -> Result<Complex64> {
    Ok(afe_terms(params)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zeta_at_two() {
        let v = zeta(c(2.0, 0.0)).unwrap();
        assert!((v - c(PI * PI / 6.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn zeta_known_values() {
        assert!((zeta(c(0.0, 0.0)).unwrap() - c(-0.5, 0.0)).norm() < 1e-14);
        assert!((zeta(c(-1.0, 0.0)).unwrap() - c(-1.0 / 12.0, 0.0)).norm() < 1e-14);
        assert!(zeta(c(-2.0, 0.0)).unwrap().norm() < 1e-15);
        assert!(zeta(c(-4.0, 0.0)).unwrap().norm() < 1e-15);
        // ζ(1/2) = -1.4603545088095868
        assert!((zeta(c(0.5, 0.0)).unwrap() - c(-1.460_354_508_809_586_8, 0.0)).norm() < 1e-14);
        // ζ(1/2 + 10i) = 1.5448952202967554 - 0.1153925888222362i
        let v = zeta(c(0.5, 10.0)).unwrap();
        assert!((v - c(1.544_895_220_296_755_4, -0.115_336_465_271_273)).norm() < 1e-12);
    }

    #[test]
    fn zeta_pole() {
        assert!(matches!(zeta(c(1.0, 0.0)), Err(Error::Pole(_))));
        assert!(matches!(zeta_derivative(c(1.0005, 0.0), 1), Err(Error::Conditioning(_))));
    }

    #[test]
    fn first_zero_is_small() {
        let v = zeta(c(0.5, 14.134_725_141_734_693)).unwrap();
        assert!(v.norm() < 1e-5);
        assert!(hardy_z(14.134_725).unwrap().abs() < 1e-4);
    }

    #[test]
    fn hardy_z_at_origin_has_modulus_of_zeta_half() {
        let z0 = hardy_z(0.0).unwrap();
        assert!((z0.abs() - 1.460_354_508_809_586_8).abs() < 1e-13);
    }

    #[test]
    fn hardy_z_rejects_large_heights() {
        assert!(matches!(hardy_z(2e5), Err(Error::Range { .. })));
    }

    #[test]
    fn derivative_order_zero_is_zeta() {
        let s = c(0.3, 21.0);
        let d = zeta_derivative(s, 0).unwrap();
        assert!((d - zeta(s).unwrap()).norm() < 1e-10 * d.norm());
    }

    #[test]
    fn derivative_order_limits() {
        assert!(zeta_derivative(c(2.0, 0.0), 9).is_err());
        assert!(zeta_jet(c(2.0, 0.0), 9).is_err());
    }

    #[test]
    fn zeta_prime_at_two() {
        // ζ'(2) = -0.93754825431584375
        let d = zeta_derivative(c(2.0, 0.0), 1).unwrap();
        assert!((d - c(-0.937_548_254_315_843_8, 0.0)).norm() < 1e-12);
        let j = zeta_jet(c(2.0, 0.0), 1).unwrap();
        assert!((j[1] - c(-0.937_548_254_315_843_8, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn empty_scan() {
        let r = count_critical_zeros(5.0, 5.0, 0.1).unwrap();
        assert_eq!(r.zero_count, 0);
        assert!(r.zeros.is_empty());
    }

    #[test]
    fn scan_below_first_zero() {
        let r = count_critical_zeros(0.0, 14.0, 0.05).unwrap();
        assert_eq!(r.zero_count, 0);
        assert!(!r.coarse_step_warning);
    }

    #[test]
    fn scan_flags_coarse_step() {
        let r = count_critical_zeros(0.0, 20.0, 0.75).unwrap();
        assert!(r.coarse_step_warning);
    }

    #[test]
    fn scan_rejects_bad_ranges() {
        assert!(count_critical_zeros(-1.0, 10.0, 0.1).is_err());
        assert!(count_critical_zeros(10.0, 5.0, 0.1).is_err());
        assert!(count_critical_zeros(0.0, 10.0, 0.0).is_err());
    }

    #[test]
    fn xi_endpoints() {
        for path in [XiPath::Direct, XiPath::Continued] {
            let a = xi_completed(c(0.0, 0.0), path).unwrap();
            let b = xi_completed(c(1.0, 0.0), path).unwrap();
            assert!((a - b).norm() < 1e-12);
            assert!((a - c(0.5, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn xi_split_point_is_irrelevant() {
        let s = c(0.7, 3.0);
        let a = xi_continued(s, 1.0).unwrap();
        let b = xi_continued(s, 1.7).unwrap();
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn afe_rejects_degenerate_shifts() {
        let p = AfeParams::new(c(1e-3, 0.0), c(-1e-3, 0.0), 50.0);
        assert!(matches!(afe_pair(&p), Err(Error::Domain(_))));
        let p = AfeParams::new(c(0.6, 0.0), c(0.0, 0.0), 50.0);
        assert!(afe_pair(&p).is_err());
        let p = AfeParams::new(c(1e-3, 0.0), c(1e-3, 0.0), 5.0);
        assert!(afe_pair(&p).is_err());
    }

    #[test]
    fn afe_x_factor_has_unit_modulus_for_small_real_shifts() {
        for &t in &[20.0, 50.0, 300.0] {
            let x = afe_x_factor(c(1e-3, 0.0), c(1e-3, 0.0), t).unwrap();
            // |X| = (t/2π)^{-(α+β)} to leading order; 1 within 1e-6 only once
            // the shift is folded out.
            let expected = (t / (2.0 * PI)).powf(-2e-3);
            assert!((x.norm() - expected).abs() < 1e-5, "t = {t}: {}", x.norm());
        }
        let x = afe_x_factor(c(1e-7, 0.0), c(1e-7, 0.0), 50.0).unwrap();
        assert!((x.norm() - 1.0).abs() < 1e-6);
    }
}
