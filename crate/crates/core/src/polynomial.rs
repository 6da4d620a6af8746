//! Real polynomials in ascending-coefficient form.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Polynomial Σ c_k x^k. Trailing zero coefficients are trimmed, so the zero
/// polynomial is `[0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Polynomial {
    coefficients: Vec<f64>,
}

impl TryFrom<Vec<f64>> for Polynomial {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Polynomial::new(v)
    }
}

impl From<Polynomial> for Vec<f64> {
    fn from(p: Polynomial) -> Self {
        p.coefficients
    }
}

impl Polynomial {
    pub fn new(mut coefficients: Vec<f64>) -> Result<Self> {
        if let Some(bad) = coefficients.iter().find(|c| !c.is_finite()) {
            return Err(Error::Domain(format!("non-finite polynomial coefficient {bad}")));
        }
        while coefficients.len() > 1 && coefficients.last() == Some(&0.0) {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            coefficients.push(0.0);
        }
        Ok(Self { coefficients })
    }

    fn from_vec(coefficients: Vec<f64>) -> Self {
        Self::new(coefficients).expect("finite coefficients")
    }

    pub fn zero() -> Self {
        Self::from_vec(vec![0.0])
    }

    pub fn constant(c: f64) -> Self {
        Self::from_vec(vec![c])
    }

    /// The identity polynomial x.
    pub fn x() -> Self {
        Self::from_vec(vec![0.0, 1.0])
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients == [0.0]
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coefficients.len() == 1 {
            return Self::zero();
        }
        Self::from_vec(
            self.coefficients
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coefficients.len().max(other.coefficients.len());
        Self::from_vec(
            (0..n)
                .map(|k| {
                    self.coefficients.get(k).copied().unwrap_or(0.0)
                        + other.coefficients.get(k).copied().unwrap_or(0.0)
                })
                .collect(),
        )
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::from_vec(self.coefficients.iter().map(|c| c * factor).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.coefficients.len() + other.coefficients.len() - 1];
        for (i, a) in self.coefficients.iter().enumerate() {
            for (j, b) in other.coefficients.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_vec(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(1.0), |acc, _| acc.mul(self))
    }

    /// ∫₀¹ p(x) dx.
    pub fn integral_unit(&self) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| c / (k as f64 + 1.0))
            .sum()
    }

    /// Parses either a coefficient list (`[0, 1]` or `0,1`) or an algebraic
    /// expression in `x` such as `1.55x-1.564x^2` or `1-0.642x-1.227(x^2/2-x^3/3)`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let list_like = t.starts_with('[')
            || (!t.contains('x') && !t.contains('(') && (t.contains(',') || t.parse::<f64>().is_ok()));
        if list_like {
            return parse_list(t);
        }
        let mut parser = ExprParser {
            chars: t.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
            source: t,
        };
        let p = parser.expr()?;
        if parser.pos != parser.chars.len() {
            return Err(parser.error("trailing input"));
        }
        Ok(p)
    }
}

fn parse_list(t: &str) -> Result<Polynomial> {
    let inner = t.strip_prefix('[').map(|r| r.strip_suffix(']')).unwrap_or(Some(t));
    let inner = inner.ok_or_else(|| Error::Config(format!("unbalanced brackets in polynomial '{t}'")))?;
    let coefficients = inner
        .split(',')
        .map(|piece| {
            piece
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad polynomial coefficient '{}' in '{t}'", piece.trim())))
        })
        .collect::<Result<Vec<f64>>>()?;
    Polynomial::new(coefficients)
}

struct ExprParser<'a> {
    chars: Vec<char>,
    pos: usize,
    source: &'a str,
}

impl ExprParser<'_> {
    fn error(&self, what: &str) -> Error {
        Error::Config(format!("{what} at offset {} in polynomial '{}'", self.pos, self.source))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn number(&mut self) -> Option<f64> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.') {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        self.chars[start..self.pos].iter().collect::<String>().parse().ok()
    }

    // expr := ['+'|'-'] term (('+'|'-') term)*
    fn expr(&mut self) -> Result<Polynomial> {
        let mut sign = 1.0;
        match self.peek() {
            Some('-') => {
                sign = -1.0;
                self.pos += 1;
            }
            Some('+') => self.pos += 1,
            _ => {}
        }
        let mut acc = self.term()?.scale(sign);
        while let Some(op @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = acc.add(&t.scale(if op == '-' { -1.0 } else { 1.0 }));
        }
        Ok(acc)
    }

    // term := [number] factor* ('/' number)*
    fn term(&mut self) -> Result<Polynomial> {
        let start = self.pos;
        let mut acc = Polynomial::constant(self.number().unwrap_or(1.0));
        while let Some(c) = self.peek() {
            match c {
                'x' => {
                    self.pos += 1;
                    let mut e = 1;
                    if self.peek() == Some('^') {
                        self.pos += 1;
                        let n = self.number().ok_or_else(|| self.error("missing exponent"))?;
                        if n.fract() != 0.0 || n > 64.0 {
                            return Err(self.error("exponent must be a small integer"));
                        }
                        e = n as u32;
                    }
                    acc = acc.mul(&Polynomial::x().pow(e));
                }
                '(' => {
                    self.pos += 1;
                    let inner = self.expr()?;
                    if self.peek() != Some(')') {
                        return Err(self.error("expected ')'"));
                    }
                    self.pos += 1;
                    acc = acc.mul(&inner);
                }
                '/' => {
                    self.pos += 1;
                    let d = self.number().ok_or_else(|| self.error("missing divisor"))?;
                    if d == 0.0 {
                        return Err(self.error("division by zero"));
                    }
                    acc = acc.scale(1.0 / d);
                }
                _ => break,
            }
        }
        if self.pos == start {
            return Err(self.error("expected a term"));
        }
        Ok(acc)
    }
}

impl FromStr for Polynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Polynomial::parse(s)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, c) in self.coefficients.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}
