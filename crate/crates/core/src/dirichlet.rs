//! Dirichlet characters, Gauss sums, theta series and L(s, χ).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arithmetic::{divisors, factorize_trial, gcd};
use crate::error::{Error, Result};
use crate::special::{additive_character, reciprocal_gamma, upper_incomplete_gamma};
use crate::zeta::{hurwitz_taylor, zeta};

/// Largest modulus accepted by the character constructors.
pub const MAX_MODULUS: u64 = 1_000_000;

const VALUE_TOL: f64 = 1e-9;

/// A character modulo q stored as its full value table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletCharacter {
    modulus: u64,
    values: Vec<Complex64>,
    parity: u8,
    conductor: u64,
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() < VALUE_TOL
}

impl DirichletCharacter {
    /// Builds a character from its values at residues `0..q`, checking the
    /// character axioms.
    pub fn from_values(modulus: u64, values: Vec<Complex64>) -> Result<Self> {
        if modulus == 0 || modulus > MAX_MODULUS {
            return Err(Error::range("modulus", modulus as f64, format!("[1, {MAX_MODULUS}]")));
        }
        if values.len() as u64 != modulus {
            return Err(Error::Domain(format!(
                "expected {modulus} values, got {}",
                values.len()
            )));
        }
        for (n, v) in values.iter().enumerate() {
            let unit = gcd(n as u64, modulus) == 1;
            if unit && (v.norm() - 1.0).abs() > VALUE_TOL {
                return Err(Error::Domain(format!("|chi({n})| != 1")));
            }
            if !unit && *v != Complex64::new(0.0, 0.0) {
                return Err(Error::Domain(format!("chi({n}) must vanish, gcd > 1")));
            }
        }
        let q = modulus as usize;
        for m in 0..q {
            for n in m..q {
                if !close(values[m * n % q], values[m] * values[n]) {
                    return Err(Error::Domain(format!("not multiplicative at ({m}, {n})")));
                }
            }
        }
        Ok(Self::assemble(modulus, values))
    }

    fn assemble(modulus: u64, values: Vec<Complex64>) -> Self {
        let minus_one = values[(modulus as usize + values.len() - 1) % values.len()];
        let parity = if modulus <= 2 || close(minus_one, Complex64::new(1.0, 0.0)) { 0 } else { 1 };
        let mut chi = Self {
            modulus,
            values,
            parity,
            conductor: modulus,
        };
        chi.conductor = compute_conductor(&chi);
        chi
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// χ(n) for any integer n.
    pub fn value(&self, n: i64) -> Complex64 {
        let q = self.modulus as i64;
        self.values[n.rem_euclid(q) as usize]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// κ(χ): 0 when χ(-1) = 1, 1 when χ(-1) = -1.
    pub fn parity(&self) -> u8 {
        self.parity
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus
    }

    pub fn is_principal(&self) -> bool {
        self.values
            .iter()
            .all(|v| *v == Complex64::new(0.0, 0.0) || close(*v, Complex64::new(1.0, 0.0)))
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im.abs() < VALUE_TOL)
    }

    pub fn conjugate(&self) -> Self {
        Self {
            modulus: self.modulus,
            values: self.values.iter().map(|v| v.conj()).collect(),
            parity: self.parity,
            conductor: self.conductor,
        }
    }

    /// The primitive character mod the conductor that induces `self`.
    pub fn inducing_primitive(&self) -> Self {
        let d = self.conductor;
        if d == self.modulus {
            return self.clone();
        }
        let values = (0..d)
            .map(|r| {
                if gcd(r, d) != 1 {
                    return Complex64::new(0.0, 0.0);
                }
                // Some lift r + kd is coprime to q.
                let lift = (0..self.modulus)
                    .map(|k| r + k * d)
                    .find(|&n| gcd(n, self.modulus) == 1)
                    .expect("a unit lift exists");
                self.values[(lift % self.modulus) as usize]
            })
            .collect();
        Self::assemble(d, values)
    }
}

/// Least quasiperiod of χ: the smallest d | q with χ(n) = 1 whenever
/// n ≡ 1 (mod d) and gcd(n, q) = 1.
pub fn conductor(chi: &DirichletCharacter) -> u64 {
    chi.conductor
}

fn compute_conductor(chi: &DirichletCharacter) -> u64 {
    let q = chi.modulus;
    let one = Complex64::new(1.0, 0.0);
    divisors(q)
        .into_iter()
        .find(|&d| {
            (1..=q)
                .step_by(d as usize)
                .filter(|&n| gcd(n, q) == 1)
                .all(|n| close(chi.values[(n % q) as usize], one))
        })
        .unwrap_or(q)
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let factors: Vec<u64> = factorize_trial(p - 1).into_iter().map(|(r, _)| r).collect();
    (2..p)
        .find(|&g| factors.iter().all(|&r| pow_mod(g, (p - 1) / r, p) != 1))
        .expect("every odd prime has a primitive root")
}

/// One cyclic factor of (Z/qZ)^*: exponent of each residue mod `prime_power`
/// with respect to a fixed generator.
#[derive(Debug, Clone)]
struct CyclicFactor {
    prime_power: u64,
    order: u64,
    log: Vec<u64>,
}

impl CyclicFactor {
    /// Powers of `generator` up to `order`. With `symmetric`, -x receives the
    /// same exponent as x (the 5^k factor of (Z/2^eZ)^*).
    fn from_generator(prime_power: u64, order: u64, generator: u64, symmetric: bool) -> Self {
        let mut log = vec![u64::MAX; prime_power as usize];
        let mut x = 1u64;
        for k in 0..order {
            log[x as usize] = k;
            if symmetric {
                log[(prime_power - x) as usize] = k;
            }
            x = x * generator % prime_power;
        }
        Self {
            prime_power,
            order,
            log,
        }
    }

    fn sign_factor(prime_power: u64) -> Self {
        // Residues ≡ 5^k get 0, residues ≡ -5^k get 1.
        let mut log = vec![u64::MAX; prime_power as usize];
        let mut x = 1u64;
        for _ in 0..prime_power / 4 {
            log[x as usize] = 0;
            log[(prime_power - x) as usize] = 1;
            x = x * 5 % prime_power;
        }
        Self {
            prime_power,
            order: 2,
            log,
        }
    }
}

/// The character group mod q, enumerating characters by a mixed-radix index.
/// Index 0 is the principal character.
#[derive(Debug, Clone)]
pub struct CharacterGroup {
    modulus: u64,
    factors: Vec<CyclicFactor>,
    exponent: u64,
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

impl CharacterGroup {
    pub fn new(modulus: u64) -> Result<Self> {
        if modulus == 0 || modulus > MAX_MODULUS {
            return Err(Error::range("modulus", modulus as f64, format!("[1, {MAX_MODULUS}]")));
        }
        let mut factors = Vec::new();
        for (p, e) in factorize_trial(modulus) {
            let pe = p.pow(e);
            if p == 2 {
                match e {
                    1 => {}
                    2 => factors.push(CyclicFactor::from_generator(4, 2, 3, false)),
                    _ => {
                        factors.push(CyclicFactor::sign_factor(pe));
                        factors.push(CyclicFactor::from_generator(pe, pe / 4, 5, true));
                    }
                }
            } else {
                let mut g = primitive_root(p);
                if e > 1 && pow_mod(g, p - 1, p * p) == 1 {
                    g += p;
                }
                factors.push(CyclicFactor::from_generator(pe, pe / p * (p - 1), g, false));
            }
        }
        let exponent = factors.iter().fold(1, |acc, f| lcm(acc, f.order));
        Ok(Self {
            modulus,
            factors,
            exponent,
        })
    }

    /// Number of characters, φ(q).
    pub fn len(&self) -> usize {
        self.factors.iter().map(|f| f.order as usize).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Character with the given index in `0..φ(q)`.
    pub fn character(&self, index: usize) -> Result<DirichletCharacter> {
        if index >= self.len() {
            return Err(Error::range("character index", index as f64, format!("[0, {})", self.len())));
        }
        let mut digits = Vec::with_capacity(self.factors.len());
        let mut rest = index as u64;
        for f in &self.factors {
            digits.push(rest % f.order);
            rest /= f.order;
        }
        let roots: Vec<Complex64> = (0..self.exponent)
            .map(|r| additive_character(r as f64 / self.exponent as f64))
            .collect();
        let q = self.modulus;
        let values = (0..q)
            .map(|n| {
                if gcd(n, q) != 1 {
                    return Complex64::new(0.0, 0.0);
                }
                let phase = self.factors.iter().zip(&digits).fold(0u64, |acc, (f, &k)| {
                    let l = f.log[(n % f.prime_power) as usize];
                    (acc + (k * l % f.order) * (self.exponent / f.order)) % self.exponent
                });
                roots[phase as usize]
            })
            .collect();
        Ok(DirichletCharacter::assemble(q, values))
    }

    pub fn iter(&self) -> impl Iterator<Item = DirichletCharacter> + '_ {
        (0..self.len()).map(move |i| self.character(i).expect("index in range"))
    }
}

/// All φ(q) characters mod q, principal first.
pub fn enumerate_characters(q: u64) -> Result<Vec<DirichletCharacter>> {
    Ok(CharacterGroup::new(q)?.iter().collect())
}

/// Gauss sum τ(χ) = Σ_{a=1}^{q} χ(a) e(a/q).
pub fn gauss_sum(chi: &DirichletCharacter) -> Complex64 {
    let q = chi.modulus;
    (1..=q)
        .map(|a| chi.values[(a % q) as usize] * additive_character(a as f64 / q as f64))
        .sum()
}

/// Root number ε(χ) = τ(χ) / (i^κ √q), defined for primitive χ.
pub fn epsilon_factor(chi: &DirichletCharacter) -> Result<Complex64> {
    if !chi.is_primitive() {
        return Err(Error::Domain(format!(
            "root number needs a primitive character (modulus {}, conductor {})",
            chi.modulus, chi.conductor
        )));
    }
    let i_kappa = if chi.parity == 0 { Complex64::new(1.0, 0.0) } else { Complex64::i() };
    Ok(gauss_sum(chi) / (i_kappa * (chi.modulus as f64).sqrt()))
}

/// Which theta series [`theta_nu`] sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaForm {
    /// Σ_{n∈Z} n^κ e^{-πn²z/q}, without a character factor.
    Literal,
    /// Σ_{n∈Z} χ(n) n^κ e^{-πn²z/q}.
    Twisted,
}

/// Theta series ν_κ(z, χ) for Re z > 0.
pub fn theta_nu(z: Complex64, chi: &DirichletCharacter, form: ThetaForm) -> Result<Complex64> {
    if !(z.re > 0.0) {
        return Err(Error::Domain(format!("theta series needs Re(z) > 0, got {z}")));
    }
    let q = chi.modulus as f64;
    let kappa = chi.parity as i32;
    let weight = |n: i64| -> Complex64 {
        match form {
            ThetaForm::Literal => Complex64::new(1.0, 0.0),
            ThetaForm::Twisted => chi.value(n),
        }
    };
    let term = |n: i64| -> Complex64 {
        let nf = n as f64;
        (-PI * nf * nf * z / q).exp() * nf.powi(kappa) * weight(n)
    };
    let mut total = if kappa == 0 { weight(0) } else { Complex64::new(0.0, 0.0) };
    let peak = (q * kappa as f64 / (2.0 * PI * z.re)).sqrt();
    for n in 1i64.. {
        let pair = term(n) + term(-n);
        total += pair;
        let nf = n as f64;
        let envelope = (-PI * nf * nf * z.re / q).exp() * nf.powi(kappa);
        if nf > peak && envelope < 1e-16 * total.norm().max(1.0) {
            break;
        }
    }
    Ok(total)
}

/// Completed L-function ξ(s, χ) = (q/π)^{(s+κ)/2} Γ((s+κ)/2) L(s, χ) from
/// its incomplete-gamma continuation with split point z = 1.
pub fn xi_completed_l(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    xi_completed_l_at(s, chi, 1.0)
}

/// [`xi_completed_l`] with an explicit split point z > 0.
pub fn xi_completed_l_at(s: Complex64, chi: &DirichletCharacter, z: f64) -> Result<Complex64> {
    if chi.is_principal() || !chi.is_primitive() {
        return Err(Error::Domain(
            "completed L-function needs a primitive non-principal character".into(),
        ));
    }
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("split point must be positive, got {z}")));
    }
    let q = chi.modulus as f64;
    let kappa = chi.parity as f64;
    let one = Complex64::new(1.0, 0.0);
    let a1 = (s + kappa) * 0.5;
    let a2 = (one - s + kappa) * 0.5;
    let eps = epsilon_factor(chi)?;
    let ln_q_pi = (q / PI).ln();

    let series = |a: Complex64, power: Complex64, scale: f64, conj: bool| -> Result<Complex64> {
        let peak = (a.norm() * q / (PI * scale)).sqrt() + 1.0;
        let mut total = Complex64::new(0.0, 0.0);
        for n in 1u64..=100_000 {
            let c = chi.values[(n % chi.modulus) as usize];
            let nf = n as f64;
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let c = if conj { c.conj() } else { c };
            let t = c * (power * nf.ln()).exp() * upper_incomplete_gamma(a, PI * nf * nf * scale / q)?;
            total += t;
            if nf > peak && t.norm() <= 1e-17 * total.norm().max(1e-300) {
                return Ok(total);
            }
        }
        Err(Error::Accuracy("theta-split series did not decay".into()))
    };

    let first = series(a1, -s, z, false)?;
    let second = series(a2, s - 1.0, 1.0 / z, true)?;
    Ok((a1 * ln_q_pi).exp() * first + eps * (a2 * ln_q_pi).exp() * second)
}

/// L(s, χ) = q^{-s} Σ_a χ(a) ζ(s, a/q) through Euler-Maclaurin Hurwitz zeta.
///
/// Valid wherever the Hurwitz expansion converges, which for the
/// truncation used here covers the whole critical strip.
pub fn l_function_series(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    let q = chi.modulus;
    let mut total = Complex64::new(0.0, 0.0);
    for a in 1..=q {
        let c = chi.values[(a % q) as usize];
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        total += c * hurwitz_taylor(s, a as f64 / q as f64, 0)?[0];
    }
    Ok(total * (-s * (q as f64).ln()).exp())
}

fn euler_factor(s: Complex64, modulus: u64, chi: &DirichletCharacter) -> Complex64 {
    factorize_trial(modulus)
        .into_iter()
        .map(|(p, _)| Complex64::new(1.0, 0.0) - chi.value(p as i64) * (-s * (p as f64).ln()).exp())
        .product()
}

/// Dirichlet L-function L(s, χ), continued to all s (except s = 1 for the
/// principal character).
///
/// Imprimitive characters are reduced to their inducing primitive
/// character times the finite Euler factors at primes dividing q.
pub fn l_function(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    if chi.is_principal() {
        if s == Complex64::new(1.0, 0.0) {
            return Err(Error::Pole("principal L-function at s = 1".into()));
        }
        let one = DirichletCharacter::assemble(1, vec![Complex64::new(1.0, 0.0)]);
        return Ok(zeta(s)? * euler_factor(s, chi.modulus, &one));
    }
    if !chi.is_primitive() {
        let star = chi.inducing_primitive();
        return Ok(l_function(s, &star)? * euler_factor(s, chi.modulus, &star));
    }
    if s.re > 1.0 {
        return l_function_series(s, chi);
    }
    let q = chi.modulus as f64;
    let a = (s + chi.parity as f64) * 0.5;
    let xi = xi_completed_l(s, chi)?;
    Ok(xi * reciprocal_gamma(a) * (-a * (q / PI).ln()).exp())
}

/// ξ(s, χ) assembled from the Hurwitz series route:
/// (q/π)^{(s+κ)/2} Γ((s+κ)/2) L(s, χ).
pub fn xi_completed_l_from_series(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    let q = chi.modulus as f64;
    let a = (s + chi.parity as f64) * 0.5;
    let log = a * (q / PI).ln() + crate::special::ln_gamma(a)?;
    Ok(log.exp() * l_function_series(s, chi)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn modulus_one() {
        let chars = enumerate_characters(1).unwrap();
        assert_eq!(chars.len(), 1);
        assert_eq!(chars[0].value(17), c(1.0, 0.0));
        assert_eq!(chars[0].conductor(), 1);
        assert!((gauss_sum(&chars[0]) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((epsilon_factor(&chars[0]).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn modulus_three() {
        let chars = enumerate_characters(3).unwrap();
        assert_eq!(chars.len(), 2);
        assert!(chars[0].is_principal());
        assert_eq!(chars[1].value(2), c(-1.0, 0.0));
        assert_eq!(chars[1].conductor(), 3);
        assert_eq!(chars[1].parity(), 1);
        let tau = gauss_sum(&chars[1]);
        assert!((tau - c(0.0, 3f64.sqrt())).norm() < 1e-14);
        assert!((epsilon_factor(&chars[1]).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn modulus_eight_is_real() {
        let chars = enumerate_characters(8).unwrap();
        assert_eq!(chars.len(), 4);
        for chi in &chars {
            assert!(chi.values().iter().all(|v| v.im == 0.0));
        }
        let conductors: Vec<u64> = chars.iter().map(|c| c.conductor()).collect();
        let mut sorted = conductors.clone();
        sorted.sort();
        assert_eq!(sorted, vec![1, 4, 8, 8]);
    }

    #[test]
    fn induced_character_has_smaller_conductor() {
        // Non-principal character mod 4 lifted to mod 8.
        let mut values = vec![c(0.0, 0.0); 8];
        values[1] = c(1.0, 0.0);
        values[3] = c(-1.0, 0.0);
        values[5] = c(1.0, 0.0);
        values[7] = c(-1.0, 0.0);
        let chi = DirichletCharacter::from_values(8, values).unwrap();
        assert_eq!(conductor(&chi), 4);
        assert!(!chi.is_primitive());
        let star = chi.inducing_primitive();
        assert_eq!(star.modulus(), 4);
        assert!(star.is_primitive());
        assert!(epsilon_factor(&chi).is_err());
    }

    #[test]
    fn principal_character_has_conductor_one() {
        for q in [2, 6, 9, 30] {
            let chars = enumerate_characters(q).unwrap();
            assert!(chars[0].is_principal());
            assert_eq!(chars[0].conductor(), 1);
        }
    }

    #[test]
    fn from_values_rejects_non_characters() {
        let values = vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)];
        assert!(DirichletCharacter::from_values(5, values).is_err());
        let values = vec![c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)];
        assert!(DirichletCharacter::from_values(3, values).is_err());
    }

    #[test]
    fn group_size_is_phi() {
        let sieve = crate::arithmetic::FactorSieve::new(1000).unwrap();
        for q in 1..=200u64 {
            assert_eq!(CharacterGroup::new(q).unwrap().len() as u64, sieve.euler_phi(q).unwrap());
        }
    }

    #[test]
    fn theta_literal_values() {
        let one = enumerate_characters(1).unwrap().remove(0);
        let v = theta_nu(c(1.0, 0.0), &one, ThetaForm::Literal).unwrap();
        assert!((v - c(1.086_434_811_213_308, 0.0)).norm() < 1e-15);
        let odd = enumerate_characters(3).unwrap().remove(1);
        let v = theta_nu(c(0.7, 0.2), &odd, ThetaForm::Literal).unwrap();
        assert_eq!(v, c(0.0, 0.0));
        assert!(theta_nu(c(0.0, 1.0), &odd, ThetaForm::Literal).is_err());
    }

    #[test]
    fn l_function_at_two_for_trivial_modulus() {
        let one = enumerate_characters(1).unwrap().remove(0);
        let l = l_function(c(2.0, 0.0), &one).unwrap();
        assert!((l - zeta(c(2.0, 0.0)).unwrap()).norm() < 1e-10);
        assert!(l_function(c(1.0, 0.0), &one).is_err());
    }

    #[test]
    fn leibniz_series() {
        let chi4 = enumerate_characters(4).unwrap().remove(1);
        let l = l_function(c(1.0, 0.0), &chi4).unwrap();
        assert!((l - c(PI / 4.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn principal_character_is_zeta_times_euler_factors() {
        let chi0 = enumerate_characters(6).unwrap().remove(0);
        let s = c(2.0, 0.0);
        let expected = PI * PI / 6.0 * (1.0 - 0.25) * (1.0 - 1.0 / 9.0);
        assert!((l_function(s, &chi0).unwrap() - c(expected, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn xi_rejects_principal_and_imprimitive() {
        let chi0 = enumerate_characters(5).unwrap().remove(0);
        assert!(xi_completed_l(c(0.5, 1.0), &chi0).is_err());
        let chars = enumerate_characters(8).unwrap();
        let imprimitive = chars.iter().find(|c| c.conductor() == 4).unwrap();
        assert!(xi_completed_l(c(0.5, 1.0), imprimitive).is_err());
    }

    #[test]
    fn imprimitive_l_matches_direct_sum() {
        // For Re s > 1 the Hurwitz route applies to any character directly.
        let chars = enumerate_characters(12).unwrap();
        let s = c(1.5, 3.0);
        for chi in chars.iter().filter(|c| !c.is_principal()) {
            let a = l_function(s, chi).unwrap();
            let b = l_function_series(s, chi).unwrap();
            assert!((a - b).norm() < 1e-11, "{a} vs {b}");
        }
    }
}
