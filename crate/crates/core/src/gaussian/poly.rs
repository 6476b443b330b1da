use std::fmt;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{invalid, Result};

/// Univariate polynomial with ascending coefficients, trimmed so the last
/// coefficient is nonzero (the zero polynomial has none).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

/// Accepted JSON forms: `{"coeffs":[..]}`, a bare coefficient list, or a
/// preset name.
#[derive(Deserialize)]
#[serde(untagged)]
enum RawPolynomial {
    Object { coeffs: Vec<f64> },
    List(Vec<f64>),
    Preset(String),
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let coeffs = match RawPolynomial::deserialize(d)? {
            RawPolynomial::Object { coeffs } | RawPolynomial::List(coeffs) => coeffs,
            RawPolynomial::Preset(name) => {
                return Polynomial::preset(&name).map_err(serde::de::Error::custom);
            }
        };
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(serde::de::Error::custom("polynomial coefficients must be finite"));
        }
        Ok(Polynomial::new(coeffs))
    }
}

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial::new(vec![c])
    }

    /// `x`.
    pub fn identity() -> Self {
        Polynomial::new(vec![0.0, 1.0])
    }

    /// `x² − 1`.
    pub fn square_centered() -> Self {
        Polynomial::new(vec![-1.0, 0.0, 1.0])
    }

    /// `x³ − 3x`.
    pub fn cube_hermite() -> Self {
        Polynomial::new(vec![0.0, -3.0, 0.0, 1.0])
    }

    /// Degree-3 Hermite projection of `max(x, 0)` under the standard normal:
    /// `1/√(2π) + x/2 + (x² − 1)/(2√(2π))`. The cubic coefficient vanishes.
    pub fn relu_poly3() -> Self {
        let h = 0.5 * INV_SQRT_2PI;
        Polynomial::new(vec![INV_SQRT_2PI - h, 0.5, h])
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "identity" => Ok(Self::identity()),
            "square_centered" => Ok(Self::square_centered()),
            "cube_hermite" => Ok(Self::cube_hermite()),
            "relu_poly3" => Ok(Self::relu_poly3()),
            _ => invalid(format!("unknown polynomial preset `{name}`")),
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_slice(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect())
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let at = |p: &Polynomial, k: usize| p.coeffs.get(k).copied().unwrap_or(0.0);
        Polynomial::new((0..n).map(|k| at(self, k) + at(other, k)).collect())
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&x| c * x).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    /// `p(c·x)`.
    pub fn rescale_argument(&self, c: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().enumerate().map(|(k, &a)| a * c.powi(k as i32)).collect())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " {} ", if c < 0.0 { '-' } else { '+' })?;
            } else if c < 0.0 {
                write!(f, "-")?;
            }
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                _ if a != 1.0 => write!(f, "{a}")?,
                _ => {}
            }
            match k {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{k}")?,
            }
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_examples() {
        assert_eq!(Polynomial::new(vec![0.0, 0.0, 0.0, 1.0]).derivative().coeffs(), &[0.0, 0.0, 3.0]);
        assert!(Polynomial::constant(4.0).derivative().is_zero());
        assert_eq!(Polynomial::square_centered().derivative().coeffs(), &[0.0, 2.0]);
    }

    #[test]
    fn trimmed_and_json() {
        let p: Polynomial = serde_json::from_str(r#"{"coeffs":[0,1,0,0]}"#).unwrap();
        assert_eq!(p, Polynomial::identity());
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"coeffs":[0.0,1.0]}"#);
        assert_eq!(Polynomial::new(vec![0.0, 0.0]).degree(), None);
        let q: Vec<Polynomial> = serde_json::from_str(r#"["cube_hermite", [-1, 0, 1]]"#).unwrap();
        assert_eq!(q, vec![Polynomial::cube_hermite(), Polynomial::square_centered()]);
        assert!(serde_json::from_str::<Polynomial>(r#""sigmoid""#).is_err());
    }

    #[test]
    fn arithmetic() {
        let p = Polynomial::identity();
        let q = p.mul(&p).sub(&Polynomial::constant(1.0));
        assert_eq!(q, Polynomial::square_centered());
        assert_eq!(q.eval(3.0), 8.0);
        assert_eq!(q.rescale_argument(2.0).coeffs(), &[-1.0, 0.0, 4.0]);
        assert!(p.sub(&p).is_zero());
        assert_eq!(Polynomial::cube_hermite().to_string(), "-3x + x^3");
    }

    #[test]
    fn relu_projection_matches_hermite_coefficients() {
        let r = Polynomial::relu_poly3();
        assert!((r.eval(0.0) - (INV_SQRT_2PI - 0.5 * INV_SQRT_2PI)).abs() < 1e-15);
        assert_eq!(r.degree(), Some(2));
        assert!((r.coeffs()[1] - 0.5).abs() < 1e-15);
        for name in ["identity", "square_centered", "cube_hermite", "relu_poly3"] {
            Polynomial::preset(name).unwrap();
        }
        assert!(Polynomial::preset("tanh").is_err());
    }
}
