//! Seeded random and deterministic matrix families, puncturing and
//! delocalization audits.

mod audit;
mod haar;

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::freeprob::CumulantTable;
use crate::matrix::Matrix;
use crate::rng::stream_rng;

pub use audit::{delocalization_audit, puncture, scaling_exponents, AuditEntry, DelocalizationReport};
pub use haar::{frame_quadratic, haar_frame, haar_orthogonal};

/// Mean-zero, variance-one law of Wigner entries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryLaw {
    #[default]
    Normal,
    Rademacher,
}

/// Eigenvalue law for `Q diag(λ) Qᵀ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum EigenSampler {
    /// iid ±1.
    Rademacher,
    /// iid from the semicircle law on `[-2, 2]`.
    Semicircle,
    /// iid uniform on `[lo, hi]`.
    Uniform { lo: f64, hi: f64 },
    /// The given values, cycled to length n.
    Fixed { values: Vec<f64> },
}

/// Orthogonally invariant ensemble occupying the (1,1) block of the community
/// model, scaled by `1/√q` so its second free cumulant is `1/q`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommunityInner {
    #[default]
    Goe,
    Rom,
}

impl CommunityInner {
    /// Free cumulants of the scaled inner block.
    pub fn cumulants(self, q: usize, len: usize) -> Result<CumulantTable> {
        let name = match self {
            CommunityInner::Goe => "goe",
            CommunityInner::Rom => "rom",
        };
        Ok(CumulantTable::preset(name, len)?.scaled(1.0 / (q as f64).sqrt()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleKind {
    Goe,
    Wigner {
        #[serde(default)]
        entry_law: EntryLaw,
    },
    HaarOrthogonal,
    Rom,
    RRom,
    Hadamard,
    Dst,
    Dct,
    Punctured {
        inner: Box<EnsembleKind>,
    },
    BlockGoe {
        q: usize,
        /// Row-major `q × q`.
        sigma: Vec<f64>,
    },
    Community {
        q: usize,
        #[serde(default)]
        inner: CommunityInner,
    },
    OrthInvariant {
        eigenvalues: EigenSampler,
    },
}

impl EnsembleKind {
    pub fn name(&self) -> String {
        match self {
            EnsembleKind::Goe => "goe".into(),
            EnsembleKind::Wigner { .. } => "wigner".into(),
            EnsembleKind::HaarOrthogonal => "haar_orthogonal".into(),
            EnsembleKind::Rom => "rom".into(),
            EnsembleKind::RRom => "r_rom".into(),
            EnsembleKind::Hadamard => "hadamard".into(),
            EnsembleKind::Dst => "dst".into(),
            EnsembleKind::Dct => "dct".into(),
            EnsembleKind::Punctured { inner } => format!("punctured_{}", inner.name()),
            EnsembleKind::BlockGoe { .. } => "block_goe".into(),
            EnsembleKind::Community { .. } => "community".into(),
            EnsembleKind::OrthInvariant { .. } => "orth_invariant".into(),
        }
    }

    /// No randomness is involved.
    pub fn is_deterministic(&self) -> bool {
        match self {
            EnsembleKind::Hadamard | EnsembleKind::Dst | EnsembleKind::Dct => true,
            EnsembleKind::Punctured { inner } => inner.is_deterministic(),
            _ => false,
        }
    }

    /// Output squares to the identity.
    pub fn is_involution(&self) -> bool {
        matches!(self, EnsembleKind::Rom | EnsembleKind::Hadamard | EnsembleKind::Dst | EnsembleKind::Dct)
    }

    /// Output is symmetric; only the Haar orthogonal matrix itself is not.
    pub fn is_symmetric(&self) -> bool {
        !matches!(self, EnsembleKind::HaarOrthogonal)
    }

    fn validate(&self, n: usize) -> Result<()> {
        match self {
            EnsembleKind::Hadamard if !n.is_power_of_two() => invalid(format!("hadamard needs n a power of two, got {n}")),
            EnsembleKind::Punctured { inner } => {
                if matches!(**inner, EnsembleKind::HaarOrthogonal) {
                    return invalid("cannot puncture a non-symmetric matrix");
                }
                inner.validate(n)
            }
            EnsembleKind::BlockGoe { q, sigma } => {
                check_blocks(n, *q)?;
                if sigma.len() != q * q {
                    return invalid(format!("sigma needs {} entries, got {}", q * q, sigma.len()));
                }
                for r in 0..*q {
                    for c in 0..*q {
                        let v = sigma[r * q + c];
                        if !(v >= 0.0 && v.is_finite()) {
                            return invalid("sigma entries must be finite and nonnegative");
                        }
                        if v != sigma[c * q + r] {
                            return invalid("sigma must be symmetric");
                        }
                    }
                }
                Ok(())
            }
            EnsembleKind::Community { q, .. } => check_blocks(n, *q),
            EnsembleKind::OrthInvariant { eigenvalues: EigenSampler::Fixed { values } } if values.is_empty() => {
                invalid("fixed eigenvalue list is empty")
            }
            EnsembleKind::OrthInvariant { eigenvalues: EigenSampler::Uniform { lo, hi } } if lo > hi => {
                invalid("uniform eigenvalue range is empty")
            }
            _ => Ok(()),
        }
    }
}

fn check_blocks(n: usize, q: usize) -> Result<()> {
    if q == 0 || n % q != 0 {
        return invalid(format!("block count q = {q} must divide n = {n}"));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    #[serde(flatten)]
    pub kind: EnsembleKind,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, n: usize, seed: u64) -> Self {
        EnsembleSpec { kind, n, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return invalid("n must be positive");
        }
        self.kind.validate(self.n)
    }

    /// Block index of each coordinate for the block kinds.
    pub fn block_labels(&self) -> Option<Vec<usize>> {
        let q = match &self.kind {
            EnsembleKind::BlockGoe { q, .. } | EnsembleKind::Community { q, .. } => *q,
            _ => return None,
        };
        let m = self.n / q;
        Some((0..self.n).map(|i| i / m).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub stream: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedMatrix {
    pub values: Matrix,
    pub spec: EnsembleSpec,
    pub provenance: Provenance,
}

/// Draw from `spec` on stream 0 of its seed.
pub fn generate(spec: &EnsembleSpec) -> Result<GeneratedMatrix> {
    generate_stream(spec, 0)
}

/// Draw from `spec` on the given stream of its seed; distinct streams give
/// independent draws.
pub fn generate_stream(spec: &EnsembleSpec, stream: u64) -> Result<GeneratedMatrix> {
    spec.validate()?;
    let mut rng = stream_rng(spec.seed, stream);
    let values = build(&spec.kind, spec.n, &mut rng);
    Ok(GeneratedMatrix { values, spec: spec.clone(), provenance: Provenance { seed: spec.seed, stream } })
}

fn build<R: Rng + ?Sized>(kind: &EnsembleKind, n: usize, rng: &mut R) -> Matrix {
    match kind {
        EnsembleKind::Goe => goe(n, 1.0 / n as f64, rng),
        EnsembleKind::Wigner { entry_law } => wigner(n, *entry_law, rng),
        EnsembleKind::HaarOrthogonal => haar_orthogonal(n, rng),
        EnsembleKind::Rom => rom(n, rng),
        EnsembleKind::RRom => puncture(&rom(n, rng)).expect("square"),
        EnsembleKind::Hadamard => hadamard(n),
        EnsembleKind::Dst => dst(n),
        EnsembleKind::Dct => dct(n),
        EnsembleKind::Punctured { inner } => puncture(&build(inner, n, rng)).expect("square"),
        EnsembleKind::BlockGoe { q, sigma } => block_goe(n, *q, sigma, rng),
        EnsembleKind::Community { q, inner } => community(n, *q, *inner, rng),
        EnsembleKind::OrthInvariant { eigenvalues } => {
            let lambda = sample_eigenvalues(eigenvalues, n, rng);
            frame_quadratic(&haar_frame(n, n, rng), &lambda)
        }
    }
}

/// Symmetric with off-diagonal variance `var` and diagonal variance `2 var`.
fn goe<R: Rng + ?Sized>(n: usize, var: f64, rng: &mut R) -> Matrix {
    let sd = var.sqrt();
    let diag_sd = (2.0 * var).sqrt();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        let d: f64 = rng.sample(StandardNormal);
        m.set(i, i, diag_sd * d);
        for j in i + 1..n {
            let v = sd * rng.sample::<f64, _>(StandardNormal);
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    m
}

fn wigner<R: Rng + ?Sized>(n: usize, law: EntryLaw, rng: &mut R) -> Matrix {
    let s = 1.0 / (n as f64).sqrt();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let x = match law {
                EntryLaw::Normal => rng.sample::<f64, _>(StandardNormal),
                EntryLaw::Rademacher => {
                    if rng.random::<bool>() {
                        1.0
                    } else {
                        -1.0
                    }
                }
            };
            m.set(i, j, s * x);
            m.set(j, i, s * x);
        }
    }
    m
}

/// `Q diag(±1) Qᵀ = I − 2 V Vᵀ` with `V` a Haar frame whose width is the
/// number of negative signs.
fn rom<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    let k = (0..n).filter(|_| rng.random::<bool>()).count();
    let v = haar_frame(n, k, rng);
    let mut m = frame_quadratic(&v, &vec![-2.0; k]);
    for i in 0..n {
        m.set(i, i, m.get(i, i) + 1.0);
    }
    m
}

/// Normalized Sylvester Walsh-Hadamard matrix.
pub fn hadamard(n: usize) -> Matrix {
    let s = 1.0 / (n as f64).sqrt();
    Matrix::from_fn(n, n, |i, j| if (i & j).count_ones() % 2 == 0 { s } else { -s })
}

/// `√(2/(n+1)) sin(π i j / (n+1))` with 1-based indices.
pub fn dst(n: usize) -> Matrix {
    let s = (2.0 / (n as f64 + 1.0)).sqrt();
    let period = 2 * (n + 1);
    Matrix::from_fn(n, n, |i, j| {
        let k = ((i + 1) * (j + 1)) % period;
        s * (PI * k as f64 / (n + 1) as f64).sin()
    })
}

/// `√(2/n) cos(π (i−½)(j−½) / n)` with 1-based indices.
pub fn dct(n: usize) -> Matrix {
    let s = (2.0 / n as f64).sqrt();
    let period = 8 * n;
    Matrix::from_fn(n, n, |i, j| {
        let k = ((2 * i + 1) * (2 * j + 1)) % period;
        s * (PI * k as f64 / (4 * n) as f64).cos()
    })
}

/// Blocks `A_{r,c}`, `r ≤ c`, are independent symmetric matrices with entries
/// on and above the diagonal of variance `Σ[r,c]/n`.
fn block_goe<R: Rng + ?Sized>(n: usize, q: usize, sigma: &[f64], rng: &mut R) -> Matrix {
    let m = n / q;
    let mut out = Matrix::zeros(n, n);
    for r in 0..q {
        for c in r..q {
            let sd = (sigma[r * q + c] / n as f64).sqrt();
            for i in 0..m {
                for j in i..m {
                    let v = sd * rng.sample::<f64, _>(StandardNormal);
                    let (a, b) = (r * m + i, c * m + j);
                    let (a2, b2) = (r * m + j, c * m + i);
                    out.set(a, b, v);
                    out.set(b, a, v);
                    out.set(a2, b2, v);
                    out.set(b2, a2, v);
                }
            }
        }
    }
    out
}

/// (1,1) block from `inner` scaled by `1/√q`; every other block pair is an
/// independent GOE block with entry variance `1/n`.
fn community<R: Rng + ?Sized>(n: usize, q: usize, inner: CommunityInner, rng: &mut R) -> Matrix {
    let m = n / q;
    let mut out = Matrix::zeros(n, n);
    let first = match inner {
        CommunityInner::Goe => goe(m, 1.0 / m as f64, rng),
        CommunityInner::Rom => rom(m, rng),
    };
    let s = 1.0 / (q as f64).sqrt();
    for i in 0..m {
        for j in 0..m {
            out.set(i, j, s * first.get(i, j));
        }
    }
    for r in 0..q {
        for c in r..q {
            if (r, c) == (0, 0) {
                continue;
            }
            let block = goe(m, 1.0 / n as f64, rng);
            for i in 0..m {
                for j in 0..m {
                    out.set(r * m + i, c * m + j, block.get(i, j));
                    out.set(c * m + j, r * m + i, block.get(i, j));
                }
            }
        }
    }
    out
}

fn sample_eigenvalues<R: Rng + ?Sized>(s: &EigenSampler, n: usize, rng: &mut R) -> Vec<f64> {
    match s {
        EigenSampler::Rademacher => (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect(),
        EigenSampler::Semicircle => (0..n)
            .map(|_| loop {
                let x: f64 = rng.random_range(-2.0..2.0);
                let u: f64 = rng.random();
                if 2.0 * u <= (4.0 - x * x).sqrt() {
                    break x;
                }
            })
            .collect(),
        EigenSampler::Uniform { lo, hi } => {
            (0..n).map(|_| rand_distr::Uniform::new_inclusive(*lo, *hi).expect("range").sample(rng)).collect()
        }
        EigenSampler::Fixed { values } => (0..n).map(|i| values[i % values.len()]).collect(),
    }
}

#[cfg(test)]
mod tests;
