use std::collections::BTreeMap;

use crate::error::{invalid, Result, TampError};

use super::{GaussianLaw, MomentEngine};

pub const MAX_WICK_ORDER: usize = 10;

/// Polynomial in the coordinates of a law, keyed by exponent vectors.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MultiPoly {
    dim: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl MultiPoly {
    pub fn new(dim: usize) -> Self {
        MultiPoly { dim, terms: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add_term(&mut self, exponents: Vec<u32>, c: f64) {
        assert_eq!(exponents.len(), self.dim, "exponent vector has the wrong length");
        let slot = self.terms.entry(exponents.clone()).or_insert(0.0);
        *slot += c;
        if *slot == 0.0 {
            self.terms.remove(&exponents);
        }
    }

    pub fn coefficient(&self, exponents: &[u32]) -> f64 {
        self.terms.get(exponents).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.terms.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (k, v) in other.terms() {
            out.add_term(k.to_vec(), v);
        }
        out
    }

    pub fn scale(&self, c: f64) -> MultiPoly {
        let mut out = MultiPoly::new(self.dim);
        for (k, v) in self.terms() {
            out.add_term(k.to_vec(), c * v);
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::new(self.dim);
        for (a, x) in self.terms() {
            for (b, y) in other.terms() {
                out.add_term(a.iter().zip(b).map(|(p, q)| p + q).collect(), x * y);
            }
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms().map(|(k, c)| c * k.iter().zip(x).map(|(&e, &v)| v.powi(e as i32)).product::<f64>()).sum()
    }

    /// Largest absolute coefficient difference.
    pub fn max_diff(&self, other: &MultiPoly) -> f64 {
        self.sub_abs(other).max(other.sub_abs(self))
    }

    fn sub_abs(&self, other: &MultiPoly) -> f64 {
        self.terms().map(|(k, v)| (v - other.coefficient(k)).abs()).fold(0.0, f64::max)
    }

    /// Exact expectation under `law`.
    pub fn expectation(&self, law: &GaussianLaw) -> Result<f64> {
        if law.dim() != self.dim {
            return Err(TampError::Dimension { expected: self.dim, got: law.dim() });
        }
        let mut engine = MomentEngine::new(law)?;
        let mut total = 0.0;
        for (k, c) in self.terms() {
            let e: Vec<usize> = k.iter().map(|&x| x as usize).collect();
            total += c * engine.moment(&e)?;
        }
        Ok(total)
    }
}

/// Wick product `He_α(X; Σ)` for the multiset `alpha` of coordinates, expanded
/// over partial matchings `M` of `alpha` as `Σ (−1)^{|M|} Π Σ[u,v] Π X_w`.
pub fn wick_product(alpha: &[usize], law: &GaussianLaw) -> Result<MultiPoly> {
    if alpha.len() > MAX_WICK_ORDER {
        return Err(TampError::Size { what: "Wick product order", got: alpha.len(), cap: MAX_WICK_ORDER });
    }
    let n = law.dim();
    if let Some(&i) = alpha.iter().find(|&&i| i >= n) {
        return invalid(format!("coordinate {i} out of range for a law of dimension {n}"));
    }
    let mut out = MultiPoly::new(n);
    let mut used = vec![false; alpha.len()];
    let mut exps = vec![0u32; n];
    partial_matchings(alpha, law, 0, 1.0, &mut used, &mut exps, &mut out);
    Ok(out)
}

fn partial_matchings(
    alpha: &[usize],
    law: &GaussianLaw,
    k: usize,
    coef: f64,
    used: &mut [bool],
    exps: &mut [u32],
    out: &mut MultiPoly,
) {
    let Some(a) = (k..alpha.len()).find(|&a| !used[a]) else {
        out.add_term(exps.to_vec(), coef);
        return;
    };
    used[a] = true;
    // a stays unmatched
    exps[alpha[a]] += 1;
    partial_matchings(alpha, law, a + 1, coef, used, exps, out);
    exps[alpha[a]] -= 1;
    // a is matched with a later position
    for b in a + 1..alpha.len() {
        if used[b] {
            continue;
        }
        let c = law.covariance().get(alpha[a], alpha[b]);
        if c == 0.0 {
            continue;
        }
        used[b] = true;
        partial_matchings(alpha, law, a + 1, -coef * c, used, exps, out);
        used[b] = false;
    }
    used[a] = false;
}
