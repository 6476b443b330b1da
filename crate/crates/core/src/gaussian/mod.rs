//! Polynomials of jointly Gaussian coordinates: exact moments by Isserlis'
//! theorem, Wick products, and the univariate polynomials used as AMP
//! nonlinearities.

mod poly;
mod wick;

use std::collections::HashMap;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, precondition, Result, TampError};
use crate::matrix::Matrix;

pub use poly::Polynomial;
pub use wick::{wick_product, MultiPoly, MAX_WICK_ORDER};

/// Largest total degree (over random coordinates) of an exact moment.
pub const MAX_MOMENT_DEGREE: usize = 16;

/// A Gaussian vector whose masked coordinates are deterministic constants.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianLaw {
    mean: Vec<f64>,
    cov: Matrix,
    deterministic: Vec<bool>,
}

impl GaussianLaw {
    /// Centered law with covariance `cov`.
    pub fn centered(cov: Matrix) -> Result<Self> {
        let n = cov.dim()?;
        if !cov.is_symmetric(0.0) {
            return invalid("covariance must be symmetric");
        }
        Ok(GaussianLaw { mean: vec![0.0; n], cov, deterministic: vec![false; n] })
    }

    /// Coordinates `0..k` with a constant coordinate `value` at `index` and
    /// the given centered covariance on the remaining coordinates, in order.
    pub fn with_constant(index: usize, value: f64, cov: &Matrix) -> Result<Self> {
        let m = cov.dim()?;
        if index > m {
            return invalid(format!("constant coordinate {index} out of range"));
        }
        let n = m + 1;
        let map = |i: usize| if i < index { i } else { i - 1 };
        let full = Matrix::from_fn(n, n, |i, j| if i == index || j == index { 0.0 } else { cov.get(map(i), map(j)) });
        let mut law = GaussianLaw::centered(full)?;
        law.mean[index] = value;
        law.deterministic[index] = true;
        Ok(law)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn covariance(&self) -> &Matrix {
        &self.cov
    }

    pub fn is_deterministic(&self, i: usize) -> bool {
        self.deterministic[i]
    }

    pub fn mean(&self, i: usize) -> f64 {
        self.mean[i]
    }

    /// Sampler drawing `mean + L g` with `L Lᵀ = Σ` and `g` standard normal.
    pub fn sampler(&self) -> Result<GaussianSampler> {
        self.check()?;
        let (factor, min) = self.cov.psd_sqrt()?;
        let scale = self.cov.max_abs().max(1.0);
        if min < -1e-9 * scale {
            return Err(TampError::NotPsd { min_eig: min, t: self.dim() });
        }
        Ok(GaussianSampler { mean: self.mean.clone(), factor, g: vec![0.0; self.dim()] })
    }

    fn check(&self) -> Result<()> {
        for i in 0..self.dim() {
            if self.deterministic[i] {
                if (0..self.dim()).any(|j| self.cov.get(i, j) != 0.0) {
                    return invalid(format!("deterministic coordinate {i} has nonzero covariance"));
                }
            } else if self.mean[i] != 0.0 {
                return precondition(format!("coordinate {i} is not centered"));
            }
        }
        Ok(())
    }
}

pub struct GaussianSampler {
    mean: Vec<f64>,
    factor: Matrix,
    g: Vec<f64>,
}

impl GaussianSampler {
    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R, out: &mut [f64]) {
        for g in self.g.iter_mut() {
            *g = rng.sample(StandardNormal);
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.mean[i] + crate::matrix::dot(self.factor.row(i), &self.g);
        }
    }
}

/// Memoized Isserlis recursion over exponent vectors of one law.
pub struct MomentEngine<'a> {
    law: &'a GaussianLaw,
    memo: HashMap<Vec<u8>, f64>,
}

impl<'a> MomentEngine<'a> {
    pub fn new(law: &'a GaussianLaw) -> Result<Self> {
        law.check()?;
        Ok(MomentEngine { law, memo: HashMap::new() })
    }

    /// `E[Π X_i^{e_i}]`.
    pub fn moment(&mut self, exponents: &[usize]) -> Result<f64> {
        let n = self.law.dim();
        if exponents.len() != n {
            return Err(TampError::Dimension { expected: n, got: exponents.len() });
        }
        let mut constant = 1.0;
        let mut random = vec![0u8; n];
        let mut degree = 0;
        for (i, &e) in exponents.iter().enumerate() {
            if self.law.deterministic[i] {
                constant *= self.law.mean[i].powi(e as i32);
            } else {
                degree += e;
                if degree > MAX_MOMENT_DEGREE {
                    return Err(TampError::Size { what: "moment degree", got: degree, cap: MAX_MOMENT_DEGREE });
                }
                random[i] = e as u8;
            }
        }
        if constant == 0.0 {
            return Ok(0.0);
        }
        Ok(constant * self.centered(&mut random))
    }

    fn centered(&mut self, e: &mut [u8]) -> f64 {
        let Some(i) = e.iter().position(|&x| x > 0) else {
            return 1.0;
        };
        if e.iter().map(|&x| x as usize).sum::<usize>() % 2 == 1 {
            return 0.0;
        }
        if let Some(&v) = self.memo.get(&e[..]) {
            return v;
        }
        let key = e.to_vec();
        // pair one copy of X_i with every other factor
        e[i] -= 1;
        let mut acc = 0.0;
        for j in 0..e.len() {
            let count = e[j];
            let c = self.law.cov.get(i, j);
            if count == 0 || c == 0.0 {
                continue;
            }
            e[j] -= 1;
            acc += count as f64 * c * self.centered(e);
            e[j] += 1;
        }
        e[i] += 1;
        self.memo.insert(key, acc);
        acc
    }
}

/// `E[Π_i X_i^{e_i}]` by Isserlis' theorem; deterministic coordinates enter as
/// constants.
pub fn isserlis_moment(exponents: &[usize], law: &GaussianLaw) -> Result<f64> {
    MomentEngine::new(law)?.moment(exponents)
}

/// `E[Π p_k(X_{i_k})]` for polynomials attached to coordinates, expanded into
/// monomials; several polynomials may share a coordinate.
pub fn poly_expectation(ps: &[(usize, &Polynomial)], law: &GaussianLaw) -> Result<f64> {
    let mut engine = MomentEngine::new(law)?;
    poly_expectation_with(&mut engine, ps)
}

pub fn poly_expectation_with(engine: &mut MomentEngine<'_>, ps: &[(usize, &Polynomial)]) -> Result<f64> {
    let n = engine.law.dim();
    // merge polynomials per coordinate
    let mut per: Vec<Polynomial> = vec![Polynomial::constant(1.0); n];
    for (i, p) in ps {
        if *i >= n {
            return invalid(format!("coordinate {i} out of range for a law of dimension {n}"));
        }
        per[*i] = per[*i].mul(p);
    }
    let degree: usize = (0..n).filter(|&i| !engine.law.deterministic[i]).map(|i| per[i].degree().unwrap_or(0)).sum();
    if degree > MAX_MOMENT_DEGREE {
        return Err(TampError::Size { what: "polynomial degree", got: degree, cap: MAX_MOMENT_DEGREE });
    }
    // deterministic coordinates and constant factors are evaluated directly
    let mut constant = 1.0;
    let mut active = Vec::new();
    for (i, p) in per.iter().enumerate() {
        if engine.law.deterministic[i] {
            constant *= p.eval(engine.law.mean[i]);
        } else {
            match p.degree() {
                None => return Ok(0.0),
                Some(0) => constant *= p.coeffs()[0],
                Some(_) => active.push(i),
            }
        }
    }
    if constant == 0.0 {
        return Ok(0.0);
    }
    let mut exps = vec![0usize; n];
    let mut total = 0.0;
    expand(engine, &per, &active, 0, 1.0, &mut exps, &mut total)?;
    Ok(constant * total)
}

fn expand(
    engine: &mut MomentEngine<'_>,
    per: &[Polynomial],
    active: &[usize],
    k: usize,
    coef: f64,
    exps: &mut [usize],
    total: &mut f64,
) -> Result<()> {
    if k == active.len() {
        *total += coef * engine.moment(exps)?;
        return Ok(());
    }
    let i = active[k];
    for (e, &c) in per[i].coeffs().iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        exps[i] = e;
        expand(engine, per, active, k + 1, coef * c, exps, total)?;
    }
    exps[i] = 0;
    Ok(())
}
