//! Numerical smoothed mollified second moment ∫ w(t)|Vψ(σ₀+it)|² dt and
//! its comparison against c·ŵ(0).

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arithmetic::FactorSieve;
use crate::error::{Error, Result};
use crate::levinson::{c_constant_exact, LevinsonForm, LevinsonParams};
use crate::mollifier::{v_smoothed_zeta_jet, MollifierSpec, PreparedMollifier};
use crate::numeric::{integrate, pairwise_sum};

/// Largest T accepted by [`mollified_moment_numeric`].
pub const MAX_MOMENT_HEIGHT: f64 = 2e4;

/// C^∞ plateau bump: 1 on `plateau`, 0 outside the plateau widened by
/// `delta` on each side, with ramps S(x) = f(x)/(f(x)+f(1−x)), f(x) = e^{-1/x}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothWeight {
    pub t_scale: f64,
    pub delta: f64,
    pub plateau: (f64, f64),
}

fn bump_half(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// Ramp rising from 0 at x ≤ 0 to 1 at x ≥ 1, with S(x) + S(1 − x) = 1.
fn ramp(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let a = bump_half(x);
    let b = bump_half(1.0 - x);
    a / (a + b)
}

impl SmoothWeight {
    /// Plateau [T/2, T] with ramps of width Δ = T/log T.
    pub fn standard(t_scale: f64) -> Result<Self> {
        let w = Self {
            t_scale,
            delta: t_scale / t_scale.ln(),
            plateau: (0.5 * t_scale, t_scale),
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_scale > 1.0) || !self.t_scale.is_finite() {
            return Err(Error::range("T", self.t_scale, "(1, inf)"));
        }
        if !(self.delta > 0.0) {
            return Err(Error::range("delta", self.delta, "(0, inf)"));
        }
        let (lo, hi) = self.support();
        if !(self.plateau.0 <= self.plateau.1) || lo < 0.25 * self.t_scale || hi > 2.0 * self.t_scale {
            return Err(Error::Domain(format!(
                "support [{lo}, {hi}] must lie in [T/4, 2T] = [{}, {}]",
                0.25 * self.t_scale,
                2.0 * self.t_scale
            )));
        }
        Ok(())
    }

    pub fn support(&self) -> (f64, f64) {
        (self.plateau.0 - self.delta, self.plateau.1 + self.delta)
    }
}

pub fn smooth_weight(t: f64, spec: &SmoothWeight) -> f64 {
    let (a, b) = spec.plateau;
    if t < a {
        ramp((t - (a - spec.delta)) / spec.delta)
    } else if t > b {
        ramp(((b + spec.delta) - t) / spec.delta)
    } else {
        1.0
    }
}

/// ŵ(0) = ∫ w by adaptive quadrature, relative accuracy 1e-8.
pub fn w_hat_zero(spec: &SmoothWeight) -> Result<f64> {
    spec.validate()?;
    let (lo, hi) = spec.support();
    let (a, b) = spec.plateau;
    let left = integrate(|t| smooth_weight(t, spec), lo, a, 0.0, 1e-10, 200_000)?;
    let right = integrate(|t| smooth_weight(t, spec), b, hi, 0.0, 1e-10, 200_000)?;
    Ok(left + (b - a) + right)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentOptions {
    /// Defaults to min(0.05, Δ/20).
    pub grid_step: Option<f64>,
    /// Grid offset as a fraction of the step, in [0, 1).
    pub offset: f64,
    pub form: LevinsonForm,
    pub keep_trace: bool,
}

impl Default for MomentOptions {
    fn default() -> Self {
        Self {
            grid_step: None,
            offset: 0.0,
            form: LevinsonForm::AsPrinted,
            keep_trace: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub numeric_moment: f64,
    /// c·ŵ(0) with c in the requested form.
    pub main_term: f64,
    pub ratio: f64,
    pub form: LevinsonForm,
    /// c·ŵ(0) with the squared integrand, for comparison.
    pub main_term_squared: f64,
    pub ratio_squared: f64,
    pub c_value: f64,
    pub c_squared: f64,
    pub w_hat_zero: f64,
    pub grid_points: usize,
    pub grid_step: f64,
    pub t_scale: f64,
    pub sigma0: f64,
    pub m_length: f64,
    pub warnings: Vec<String>,
    /// (t, w(t), |Vψ(σ₀+it)|²) when requested.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<(f64, f64, f64)>,
}

/// ∫ w(t)|V(σ₀+it)ψ(σ₀+it)|² dt with the standard weight, by the trapezoid
/// rule (spectrally accurate here since w and all its derivatives vanish at
/// the support ends).
pub fn mollified_moment_numeric(params: &LevinsonParams, t_scale: f64, grid_step: f64) -> Result<MomentReport> {
    let options = MomentOptions {
        grid_step: Some(grid_step),
        ..MomentOptions::default()
    };
    mollified_moment_with(params, t_scale, &options)
}

pub fn mollified_moment_with(params: &LevinsonParams, t_scale: f64, options: &MomentOptions) -> Result<MomentReport> {
    params.validate()?;
    if !(t_scale > 1.0) || t_scale > MAX_MOMENT_HEIGHT {
        return Err(Error::range("T", t_scale, format!("(1, {MAX_MOMENT_HEIGHT}]")));
    }
    let weight = SmoothWeight::standard(t_scale)?;
    let preferred = 0.05f64.min(weight.delta / 20.0);
    let step = options.grid_step.unwrap_or(preferred);
    if !(step > 0.0) || step > weight.delta / 10.0 {
        return Err(Error::range("grid step", step, format!("(0, {}]", weight.delta / 10.0)));
    }
    if !(0.0..1.0).contains(&options.offset) {
        return Err(Error::range("grid offset", options.offset, "[0, 1)"));
    }
    let mut warnings = Vec::new();
    if step > preferred {
        warnings.push(format!(
            "grid step {step} exceeds the resolving step {preferred}; refine for a converged moment"
        ));
    }

    let spec = MollifierSpec::new(t_scale, params.theta, params.r_shift, params.p_poly.clone())?;
    let sigma0 = spec.sigma0();
    let log_t = spec.log_scale();
    let sieve = FactorSieve::new((spec.m_length().floor() as usize).max(2))?;
    let psi = PreparedMollifier::new(&spec, &sieve)?;
    let line = psi.line(sigma0);

    let (lo, hi) = weight.support();
    let first = lo + options.offset * step;
    let count = ((hi - first) / step).floor() as usize + 1;
    let samples: Vec<Result<(f64, f64, f64)>> = (0..count)
        .into_par_iter()
        .map(|k| {
            let t = first + k as f64 * step;
            let w = smooth_weight(t, &weight);
            if w == 0.0 {
                return Ok((t, 0.0, 0.0));
            }
            let v = v_smoothed_zeta_jet(Complex64::new(sigma0, t), &params.q_poly, log_t)?;
            let value = (v * line.eval(t)).norm_sqr();
            Ok((t, w, value))
        })
        .collect();
    let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;
    let weighted: Vec<f64> = samples.iter().map(|(_, w, v)| w * v).collect();
    let numeric_moment = pairwise_sum(&weighted) * step;

    let w_hat = w_hat_zero(&weight)?;
    let c_value = c_constant_exact(params, options.form)?;
    let c_squared = c_constant_exact(params, LevinsonForm::Squared)?;
    let main_term = c_value * w_hat;
    let main_term_squared = c_squared * w_hat;
    Ok(MomentReport {
        numeric_moment,
        main_term,
        ratio: numeric_moment / main_term,
        form: options.form,
        main_term_squared,
        ratio_squared: numeric_moment / main_term_squared,
        c_value,
        c_squared,
        w_hat_zero: w_hat,
        grid_points: count,
        grid_step: step,
        t_scale,
        sigma0,
        m_length: spec.m_length(),
        warnings,
        trace: if options.keep_trace { samples } else { Vec::new() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_shape() {
        let w = SmoothWeight::standard(5000.0).unwrap();
        assert_eq!(smooth_weight(1000.0, &w), 0.0);
        assert_eq!(smooth_weight(11_000.0, &w), 0.0);
        assert_eq!(smooth_weight(3000.0, &w), 1.0);
        let mid = 2500.0 - w.delta / 2.0;
        assert!((smooth_weight(mid, &w) - 0.5).abs() < 1e-12);
        let mid = 5000.0 + w.delta / 2.0;
        assert!((smooth_weight(mid, &w) - 0.5).abs() < 1e-12);
        for k in 0..=1000 {
            let t = 1000.0 + 10.0 * k as f64;
            let v = smooth_weight(t, &w);
            assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn w_hat_is_plateau_plus_delta() {
        for t in [2000.0, 5000.0, 10_000.0] {
            let w = SmoothWeight::standard(t).unwrap();
            let value = w_hat_zero(&w).unwrap();
            // S(x) + S(1-x) = 1 makes each ramp integrate to Δ/2.
            assert!((value - (0.5 * t + w.delta)).abs() < 1e-8 * value);
            assert!(value >= 0.5 * t && value <= 0.5 * t + 2.0 * w.delta);
            // ŵ(0) − T/2 is exactly Δ = T/log T, the edge of the allowed band.
            assert!((value - 0.5 * t).abs() <= t / t.ln() * (1.0 + 1e-9));
        }
    }

    #[test]
    fn narrow_ramps_approach_plateau_length() {
        let w = SmoothWeight {
            t_scale: 100.0,
            delta: 1e-3,
            plateau: (50.0, 100.0),
        };
        assert!((w_hat_zero(&w).unwrap() - 50.0).abs() < 2e-3);
    }

    #[test]
    fn support_must_fit() {
        assert!(SmoothWeight::standard(20.0).is_err());
    }

    #[test]
    fn derivative_bounds() {
        // j-th derivative by finite differences, scaled by Δ^j.
        let w = SmoothWeight::standard(5000.0).unwrap();
        let (lo, _) = w.support();
        let h = w.delta * 1e-2;
        let bounds = [2.0, 24.0, 720.0, 40_320.0];
        for k in 0..100 {
            let t = lo + w.delta * (k as f64 + 0.5) / 100.0;
            let f = |x: f64| smooth_weight(x, &w);
            let d1 = (f(t + h) - f(t - h)) / (2.0 * h);
            let d2 = (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
            let d3 = (f(t + 2.0 * h) - 2.0 * f(t + h) + 2.0 * f(t - h) - f(t - 2.0 * h)) / (2.0 * h.powi(3));
            let d4 = (f(t + 2.0 * h) - 4.0 * f(t + h) + 6.0 * f(t) - 4.0 * f(t - h) + f(t - 2.0 * h)) / h.powi(4);
            for (j, (d, bound)) in [d1, d2, d3, d4].iter().zip(bounds).enumerate() {
                let scaled = d.abs() * w.delta.powi(j as i32 + 1);
                assert!(scaled <= bound, "j={} t={t}: {scaled}", j + 1);
            }
        }
    }

    #[test]
    fn rejects_out_of_range_inputs() {
        let params = LevinsonParams::baseline();
        assert!(mollified_moment_numeric(&params, 3e4, 0.05).is_err());
        assert!(mollified_moment_numeric(&params, 5000.0, 100.0).is_err());
        assert!(mollified_moment_numeric(&params, 5000.0, 0.0).is_err());
    }

    #[test]
    fn degenerate_mollifier_is_finite() {
        // θ so small that M < 2 and ψ ≡ 1.
        let params = LevinsonParams {
            theta: 0.05,
            ..LevinsonParams::baseline()
        };
        let report = mollified_moment_numeric(&params, 200.0, 0.05).unwrap();
        assert!(report.m_length < 2.0);
        assert!(report.ratio.is_finite() && report.ratio > 0.0);
    }
}
