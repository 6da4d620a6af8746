//! Derivative-free maximisation of the κ lower bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levinson::{c_constant_exact, kappa_lower_bound, LevinsonForm, LevinsonParams};
use crate::polynomial::Polynomial;

pub const MAX_DEGREE: usize = 6;
pub const MAX_RESTARTS: usize = 64;

/// Simplex diameter below which a run stops.
pub const SIMPLEX_TOLERANCE: f64 = 1e-8;

const INITIAL_STEP: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub p_degree: usize,
    pub q_degree: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub theta: f64,
    pub restarts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    pub form: LevinsonForm,
    /// Holds Q fixed instead of searching over it.
    pub fixed_q: Option<Polynomial>,
    /// Restart 0 starts here instead of at the baseline.
    pub warm_start: Option<LevinsonParams>,
}

impl SearchSpace {
    pub fn new(p_degree: usize, q_degree: usize, r_min: f64, r_max: f64, theta: f64) -> Self {
        Self {
            p_degree,
            q_degree,
            r_min,
            r_max,
            theta,
            restarts: 8,
            seed: 0,
            max_iterations: 20_000,
            form: LevinsonForm::AsPrinted,
            fixed_q: None,
            warm_start: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, d) in [("p_degree", self.p_degree), ("q_degree", self.q_degree)] {
            if d < 1 || d > MAX_DEGREE {
                return Err(Error::Config(format!("{name} = {d} outside [1, {MAX_DEGREE}]")));
            }
        }
        if self.restarts < 1 || self.restarts > MAX_RESTARTS {
            return Err(Error::Config(format!(
                "restarts = {} outside [1, {MAX_RESTARTS}]",
                self.restarts
            )));
        }
        if !(self.r_min > 0.0) || !(self.r_max >= self.r_min) || !self.r_max.is_finite() {
            return Err(Error::Config(format!(
                "R range [{}, {}] must be a non-empty interval of positive reals",
                self.r_min, self.r_max
            )));
        }
        if !(self.theta > 0.0 && self.theta <= 0.5) {
            return Err(Error::Config(format!("theta = {} outside (0, 0.5]", self.theta)));
        }
        if let Some(q) = &self.fixed_q {
            if (q.eval(0.0) - 1.0).abs() > 1e-12 {
                return Err(Error::Constraint(format!("Q(0)=1 violated by fixed Q {q}")));
            }
        }
        Ok(())
    }

    fn r_free(&self) -> bool {
        self.r_max > self.r_min
    }

    fn dimension(&self) -> usize {
        let q = if self.fixed_q.is_some() { 0 } else { self.q_degree };
        (self.p_degree - 1) + q + usize::from(self.r_free())
    }

    /// Maps a free vector to feasible parameters. P(0) = 0, P(1) = 1 and
    /// Q(0) = 1 hold by construction.
    fn decode(&self, z: &[f64]) -> LevinsonParams {
        let (p_free, rest) = z.split_at(self.p_degree - 1);
        let mut p = vec![0.0, 1.0 - p_free.iter().sum::<f64>()];
        p.extend_from_slice(p_free);
        let (q_poly, rest) = match &self.fixed_q {
            Some(q) => (q.clone(), rest),
            None => {
                let (q_free, rest) = rest.split_at(self.q_degree);
                let mut q = vec![1.0];
                q.extend_from_slice(q_free);
                (Polynomial::new(q).expect("finite"), rest)
            }
        };
        let r_shift = if self.r_free() {
            self.r_min + (self.r_max - self.r_min) * 0.5 * (1.0 + rest[0].sin())
        } else {
            self.r_min
        };
        LevinsonParams {
            p_poly: Polynomial::new(p).expect("finite"),
            q_poly,
            r_shift,
            theta: self.theta,
        }
    }

    /// Inverse of [`Self::decode`] for parameters inside the space; higher
    /// coefficients are dropped, R is clamped.
    fn encode(&self, params: &LevinsonParams) -> Vec<f64> {
        let mut z: Vec<f64> = (2..=self.p_degree)
            .map(|k| params.p_poly.coefficients().get(k).copied().unwrap_or(0.0))
            .collect();
        if self.fixed_q.is_none() {
            z.extend((1..=self.q_degree).map(|k| params.q_poly.coefficients().get(k).copied().unwrap_or(0.0)));
        }
        if self.r_free() {
            let r = params.r_shift.clamp(self.r_min, self.r_max);
            let unit = 2.0 * (r - self.r_min) / (self.r_max - self.r_min) - 1.0;
            z.push(unit.asin());
        }
        z
    }

    fn objective(&self, z: &[f64]) -> f64 {
        kappa_of(&self.decode(z), self.form).map(|k| -k).unwrap_or(f64::INFINITY)
    }
}

fn kappa_of(params: &LevinsonParams, form: LevinsonForm) -> Result<f64> {
    let c = c_constant_exact(params, form)?;
    let kappa = kappa_lower_bound(c, params.r_shift)?;
    if kappa.is_finite() {
        Ok(kappa)
    } else {
        Err(Error::Domain(format!("non-finite bound for c = {c}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationReport {
    pub best_params: LevinsonParams,
    pub best_kappa: f64,
    pub best_c: f64,
    pub form: LevinsonForm,
    pub evaluations: usize,
    pub restart_trace: Vec<(usize, f64)>,
}

struct RunResult {
    z: Vec<f64>,
    value: f64,
    evaluations: usize,
}

fn nelder_mead(space: &SearchSpace, start: Vec<f64>) -> RunResult {
    let n = start.len();
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        space.objective(x)
    };
    if n == 0 {
        let value = eval(&start);
        return RunResult {
            z: start,
            value,
            evaluations,
        };
    }
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = eval(&start);
    simplex.push((start.clone(), f0));
    for i in 0..n {
        let mut x = start.clone();
        x[i] += INITIAL_STEP;
        let f = eval(&x);
        simplex.push((x, f));
    }
    let point = |c: &[f64], w: &[f64], t: f64| -> Vec<f64> { c.iter().zip(w).map(|(a, b)| a + t * (b - a)).collect() };
    for _ in 0..space.max_iterations {
        // Stable sort keeps earlier vertices first on ties, so runs are reproducible.
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].0.clone();
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&best).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        if diameter < SIMPLEX_TOLERANCE {
            break;
        }
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / n as f64;
            }
        }
        let (worst, f_worst) = simplex[n].clone();
        let f_best = simplex[0].1;
        let f_second = simplex[n - 1].1;
        let reflected = point(&centroid, &worst, -1.0);
        let f_r = eval(&reflected);
        if f_r < f_best {
            let expanded = point(&centroid, &worst, -2.0);
            let f_e = eval(&expanded);
            simplex[n] = if f_e < f_r { (expanded, f_e) } else { (reflected, f_r) };
            continue;
        }
        if f_r < f_second {
            simplex[n] = (reflected, f_r);
            continue;
        }
        let (contracted, f_c) = if f_r < f_worst {
            let x = point(&centroid, &reflected, 0.5);
            let f = eval(&x);
            (x, f)
        } else {
            let x = point(&centroid, &worst, 0.5);
            let f = eval(&x);
            (x, f)
        };
        if f_c < f_worst.min(f_r) {
            simplex[n] = (contracted, f_c);
            continue;
        }
        for i in 1..=n {
            let x = point(&simplex[0].0, &simplex[i].0, 0.5);
            let f = eval(&x);
            simplex[i] = (x, f);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (z, value) = simplex.swap_remove(0);
    RunResult {
        z,
        value,
        evaluations,
    }
}

fn restart_start(space: &SearchSpace, index: usize) -> Vec<f64> {
    if index == 0 {
        let anchor = space.warm_start.clone().unwrap_or_else(LevinsonParams::baseline);
        return space.encode(&anchor);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(space.seed);
    rng.set_stream(index as u64);
    let mut z: Vec<f64> = (0..space.dimension()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    if space.r_free() {
        if let Some(last) = z.last_mut() {
            *last *= std::f64::consts::FRAC_PI_2;
        }
    }
    z
}

/// Maximises κ over the space. Restart 0 starts at the baseline (or the
/// warm start); the others start from seeded random points.
pub fn optimize_kappa(space: &SearchSpace) -> Result<OptimizationReport> {
    space.validate()?;
    let runs: Vec<RunResult> = (0..space.restarts)
        .into_par_iter()
        .map(|i| nelder_mead(space, restart_start(space, i)))
        .collect();
    let evaluations = runs.iter().map(|r| r.evaluations).sum();
    let restart_trace: Vec<(usize, f64)> = runs.iter().enumerate().map(|(i, r)| (i, -r.value)).collect();
    // Strict comparison keeps the lowest index among ties.
    let best = runs
        .iter()
        .enumerate()
        .filter(|(_, r)| r.value.is_finite())
        .fold(None::<(usize, &RunResult)>, |acc, (i, r)| match acc {
            Some((_, b)) if b.value <= r.value => acc,
            _ => Some((i, r)),
        })
        .ok_or_else(|| Error::Domain("no restart reached a feasible point".into()))?
        .1;
    let best_params = space.decode(&best.z);
    let best_c = c_constant_exact(&best_params, space.form)?;
    let best_kappa = kappa_lower_bound(best_c, best_params.r_shift)?;
    Ok(OptimizationReport {
        best_params,
        best_kappa,
        best_c,
        form: space.form,
        evaluations,
        restart_trace,
    })
}

/// κ(R) on a grid, sorted by R. Entries are `None` where c < 1.
pub fn grid_scan_r(
    p_poly: &Polynomial,
    q_poly: &Polynomial,
    theta: f64,
    r_grid: &[f64],
    form: LevinsonForm,
) -> Result<Vec<(f64, Option<f64>)>> {
    if r_grid.is_empty() {
        return Err(Error::Config("empty R grid".into()));
    }
    if let Some(bad) = r_grid.iter().find(|r| !(**r > 0.0) || !r.is_finite()) {
        return Err(Error::range("R", *bad, "(0, inf)"));
    }
    let mut grid = r_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.into_par_iter()
        .map(|r| {
            let params = LevinsonParams::new(p_poly.clone(), q_poly.clone(), r, theta)?;
            Ok((r, kappa_of(&params, form).ok()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frozen_space_returns_baseline() {
        let mut space = SearchSpace::new(1, 1, 1.3, 1.3, 0.5);
        space.fixed_q = Some(Polynomial::new(vec![1.0, -1.0]).unwrap());
        space.restarts = 1;
        let report = optimize_kappa(&space).unwrap();
        let c = c_constant_exact(&LevinsonParams::baseline(), LevinsonForm::AsPrinted).unwrap();
        assert_eq!(report.best_kappa, kappa_lower_bound(c, 1.3).unwrap());
        assert_eq!(report.best_params, LevinsonParams::baseline());
    }

    #[test]
    fn encode_decode_round_trip() {
        let space = SearchSpace::new(3, 2, 0.5, 2.5, 0.5);
        let z = vec![0.2, -0.1, -0.9, 0.3, 0.4];
        let params = space.decode(&z);
        assert_eq!(params.p_poly.eval(0.0), 0.0);
        assert!((params.p_poly.eval(1.0) - 1.0).abs() < 1e-15);
        assert_eq!(params.q_poly.eval(0.0), 1.0);
        let back = space.encode(&params);
        for (a, b) in z.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_ranges_are_config_errors() {
        assert!(matches!(
            SearchSpace::new(1, 1, 2.0, 1.0, 0.5).validate(),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            SearchSpace::new(1, 1, 0.0, 1.0, 0.5).validate(),
            Err(Error::Config(_))
        ));
        assert!(SearchSpace::new(7, 1, 1.0, 2.0, 0.5).validate().is_err());
    }

    #[test]
    fn grid_scan_is_sorted_and_matches_pipeline() {
        let base = LevinsonParams::baseline();
        let rows = grid_scan_r(&base.p_poly, &base.q_poly, 0.5, &[2.0, 1.3, 0.7], LevinsonForm::AsPrinted).unwrap();
        assert_eq!(rows.iter().map(|r| r.0).collect::<Vec<_>>(), vec![0.7, 1.3, 2.0]);
        let c = c_constant_exact(&base, LevinsonForm::AsPrinted).unwrap();
        assert_eq!(rows[1].1, Some(kappa_lower_bound(c, 1.3).unwrap()));
        assert!(grid_scan_r(&base.p_poly, &base.q_poly, 0.5, &[], LevinsonForm::AsPrinted).is_err());
    }
}
