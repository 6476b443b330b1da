//! Covariance recursions predicting the Gaussian asymptotic state of the AMP
//! iterations, and their comparison with Monte Carlo moments.

mod compare;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, precondition, Result, TampError};
use crate::freeprob::{CumulantTable, TableTag};
use crate::gaussian::{poly_expectation_with, GaussianLaw, MomentEngine, Polynomial};
use crate::matrix::Matrix;

pub use compare::{
    compare_empirical, compare_summary, summarize, synthetic_report, MomentSummary, Verdict, VerdictRow, DEFAULT_THRESHOLD,
};

/// Smallest eigenvalue accepted for a kernel, relative to its largest entry.
pub const PSD_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SEVariant {
    Orthogonal,
    Punctured,
    BlockGoe,
    Community,
}

/// How block GOE weights enter the kernel recursion.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockNormalization {
    /// Entries of block `(r, c)` have variance `Σ[r,c]/n`, so a row of block
    /// `r` collects `Σ[r,c]/q` from block `c`.
    #[default]
    Entry,
    /// Weight `Σ[r,c]` as written, i.e. entries of variance `q Σ[r,c]/n`.
    Literal,
}

/// One or more covariance kernels `Γ[s−1, t−1]` for `s, t ∈ 1..=T`, with
/// mixture weights and, for block models, the kernel of each block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SEKernel {
    pub variant: SEVariant,
    #[serde(rename = "T")]
    pub iterations: usize,
    #[serde(with = "grids")]
    pub gammas: Vec<Matrix>,
    pub weights: Vec<f64>,
    /// `block_kernel[b]` is the kernel of coordinates in block `b`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_kernel: Option<Vec<usize>>,
}

mod grids {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::matrix::Matrix;

    pub fn serialize<S: Serializer>(ms: &[Matrix], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Vec<f64>>> =
            ms.iter().map(|m| (0..m.rows()).map(|i| m.row(i).iter().map(|&x| snap(x)).collect()).collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Matrix>, D::Error> {
        let rows: Vec<Vec<Vec<f64>>> = Vec::deserialize(d)?;
        rows.iter().map(|r| Matrix::from_rows(r).map_err(serde::de::Error::custom)).collect()
    }

    /// Entries below 1e-14 print as 0.
    fn snap(x: f64) -> f64 {
        if x.abs() < 1e-14 {
            0.0
        } else {
            x
        }
    }
}

impl SEKernel {
    pub fn gamma(&self) -> &Matrix {
        &self.gammas[0]
    }

    /// `Σ_k w_k Γ_k`.
    pub fn mixture(&self) -> Matrix {
        let t = self.iterations;
        Matrix::from_fn(t, t, |i, j| self.gammas.iter().zip(&self.weights).map(|(g, w)| w * g.get(i, j)).sum())
    }

    /// Mixture fourth moment `Σ_k w_k 3 Γ_k[t,t]²` of `X_t`.
    pub fn fourth_moment(&self, t: usize) -> f64 {
        self.gammas.iter().zip(&self.weights).map(|(g, w)| 3.0 * w * g.get(t - 1, t - 1).powi(2)).sum()
    }

    pub fn kernel_of_block(&self, b: usize) -> Option<&Matrix> {
        self.block_kernel.as_ref().and_then(|m| m.get(b)).map(|&k| &self.gammas[k])
    }
}

fn check_fs(fs: &[Polynomial], big_t: usize) -> Result<()> {
    if big_t == 0 {
        return invalid("state evolution needs T >= 1");
    }
    if fs.len() < big_t {
        return invalid(format!("need {big_t} nonlinearities, got {}", fs.len()));
    }
    Ok(())
}

fn check_kappa(kappa: &CumulantTable, need: usize) -> Result<()> {
    if kappa.tag != TableTag::Cumulants {
        return precondition("state evolution needs a free cumulant table");
    }
    if kappa.len() < need {
        return Err(TampError::TableTooShort { need, have: kappa.len() });
    }
    Ok(())
}

/// The law of `(X_0, X_1, .., X_{t−1})` with `X_0 = 1` and covariance read
/// from the finished leading block of `gamma`.
fn law_before(gamma: &Matrix, t: usize) -> Result<GaussianLaw> {
    let m = t - 1;
    let cov = Matrix::from_fn(m, m, |i, j| gamma.get(i, j));
    GaussianLaw::with_constant(0, 1.0, &cov)
}

/// Expectations of the nonlinearities under one law.
struct Moments<'a> {
    engine: MomentEngine<'a>,
    fs: &'a [Polynomial],
    dfs: Vec<Polynomial>,
}

impl<'a> Moments<'a> {
    fn new(law: &'a GaussianLaw, fs: &'a [Polynomial]) -> Result<Self> {
        Ok(Moments { engine: MomentEngine::new(law)?, fs, dfs: fs.iter().map(Polynomial::derivative).collect() })
    }

    /// `E f′_r(X_r)`.
    fn fprime(&mut self, r: usize) -> Result<f64> {
        poly_expectation_with(&mut self.engine, &[(r, &self.dfs[r])])
    }

    /// `E f_r(X_r)`.
    fn f(&mut self, r: usize) -> Result<f64> {
        poly_expectation_with(&mut self.engine, &[(r, &self.fs[r])])
    }

    /// `E f_a(X_a) f_b(X_b)`.
    fn ff(&mut self, a: usize, b: usize) -> Result<f64> {
        poly_expectation_with(&mut self.engine, &[(a, &self.fs[a]), (b, &self.fs[b])])
    }
}

fn check_psd(gamma: &Matrix, t: usize) -> Result<()> {
    let lead = Matrix::from_fn(t, t, |i, j| gamma.get(i, j));
    let ev = lead.symmetric_eigenvalues()?;
    let scale = lead.max_abs().max(1.0);
    if ev[0] < -PSD_TOLERANCE * scale {
        return Err(TampError::NotPsd { min_eig: ev[0], t });
    }
    Ok(())
}

/// `Σ_{s'<s, t'<t} κ_{s−s'+t−t'} P(s', s) P(t', t) pair(s', t')` with
/// `P(a, b) = Π_{a<r<b} E f′_r`, skipping the pairs rejected by `keep`.
fn kappa_sum(
    kappa: &CumulantTable,
    fprime: &[f64],
    s: usize,
    t: usize,
    pair: &mut dyn FnMut(usize, usize) -> Result<f64>,
    keep: &dyn Fn(usize, usize) -> bool,
) -> Result<f64> {
    let prod = |a: usize, b: usize| fprime[a + 1..b].iter().product::<f64>();
    let mut acc = 0.0;
    for sp in 0..s {
        for tp in 0..t {
            if !keep(sp, tp) {
                continue;
            }
            let k = kappa.get(s - sp + t - tp)?;
            if k == 0.0 {
                continue;
            }
            acc += k * prod(sp, s) * prod(tp, t) * pair(sp, tp)?;
        }
    }
    Ok(acc)
}

/// Covariance of the scalar-Onsager iteration on orthogonally invariant
/// matrices, `X_0 = 1`.
pub fn se_orthogonal(fs: &[Polynomial], kappa: &CumulantTable, big_t: usize) -> Result<SEKernel> {
    single_chain(fs, kappa, big_t, false)
}

/// Covariance of the punctured iteration: centered factors
/// `F̄_t = f_t(X_t) − E f_t(X_t)` and `F̄_0 = 1`.
pub fn se_punctured(fs: &[Polynomial], kappa: &CumulantTable, big_t: usize) -> Result<SEKernel> {
    if fs.first() != Some(&Polynomial::identity()) {
        return precondition("punctured state evolution needs f_0(x) = x");
    }
    single_chain(fs, kappa, big_t, true)
}

fn single_chain(fs: &[Polynomial], kappa: &CumulantTable, big_t: usize, centered: bool) -> Result<SEKernel> {
    check_fs(fs, big_t)?;
    check_kappa(kappa, 2 * big_t)?;
    let mut gamma = Matrix::zeros(big_t, big_t);
    for t in 1..=big_t {
        let law = law_before(&gamma, t)?;
        debug_assert_eq!(law.dim(), t, "Γ[·, t] may only read X_0..X_{{t−1}}");
        let mut m = Moments::new(&law, fs)?;
        let mut fprime = vec![0.0; t];
        for (r, v) in fprime.iter_mut().enumerate().skip(1) {
            *v = m.fprime(r)?;
        }
        let mean: Vec<f64> = (0..t).map(|r| if centered && r > 0 { m.f(r) } else { Ok(0.0) }).collect::<Result<_>>()?;
        for s in 1..=t {
            let mut pair = |a: usize, b: usize| -> Result<f64> {
                if !centered {
                    return m.ff(a, b);
                }
                match (a, b) {
                    (0, 0) => Ok(1.0),
                    (0, _) | (_, 0) => Ok(0.0),
                    _ => Ok(m.ff(a, b)? - mean[a] * mean[b]),
                }
            };
            let v = kappa_sum(kappa, &fprime, s, t, &mut pair, &|_, _| true)?;
            gamma.set(s - 1, t - 1, v);
            gamma.set(t - 1, s - 1, v);
        }
        check_psd(&gamma, t)?;
    }
    let variant = if centered { SEVariant::Punctured } else { SEVariant::Orthogonal };
    Ok(SEKernel { variant, iterations: big_t, gammas: vec![gamma], weights: vec![1.0], block_kernel: None })
}

/// `q` coupled kernels `Γ_r[s,t] = Σ_c W[r,c] E_{μ_c} f_{s−1}(X_{s−1}) f_{t−1}(X_{t−1})`
/// with `X_0 = 1`, uniform weights, and `W = Σ/q` or `Σ` per `norm`.
pub fn se_block_goe(fs: &[Polynomial], sigma: &Matrix, q: usize, big_t: usize, norm: BlockNormalization) -> Result<SEKernel> {
    check_fs(fs, big_t)?;
    if sigma.rows() != q || sigma.cols() != q {
        return Err(TampError::Dimension { expected: q, got: sigma.rows() });
    }
    if q == 0 || !sigma.is_symmetric(0.0) || sigma.as_slice().iter().any(|&x| !(x >= 0.0)) {
        return invalid("sigma must be symmetric with nonnegative entries");
    }
    let scale = match norm {
        BlockNormalization::Entry => 1.0 / q as f64,
        BlockNormalization::Literal => 1.0,
    };
    let mut gammas = vec![Matrix::zeros(big_t, big_t); q];
    for t in 1..=big_t {
        // E_{μ_c} f_{s−1} f_{t−1} from the kernels finished up to t − 1
        let mut pairs = vec![vec![0.0; t]; q];
        for (c, g) in gammas.iter().enumerate() {
            let law = law_before(g, t)?;
            let mut m = Moments::new(&law, fs)?;
            for s in 1..=t {
                pairs[c][s - 1] = m.ff(s - 1, t - 1)?;
            }
        }
        for (r, g) in gammas.iter_mut().enumerate() {
            for s in 1..=t {
                let v: f64 = (0..q).map(|c| scale * sigma.get(r, c) * pairs[c][s - 1]).sum();
                g.set(s - 1, t - 1, v);
                g.set(t - 1, s - 1, v);
            }
        }
        for g in &gammas {
            check_psd(g, t)?;
        }
    }
    Ok(SEKernel {
        variant: SEVariant::BlockGoe,
        iterations: big_t,
        gammas,
        weights: vec![1.0 / q as f64; q],
        block_kernel: Some((0..q).collect()),
    })
}

/// Community model: `Γ_0` outside the community, `Γ_1` inside, weights
/// `(1 − 1/q, 1/q)`; `kappa_inner` must have `κ₂ = 1/q`.
pub fn se_community(fs: &[Polynomial], kappa_inner: &CumulantTable, q: usize, big_t: usize) -> Result<SEKernel> {
    check_fs(fs, big_t)?;
    check_kappa(kappa_inner, 2 * big_t)?;
    if q == 0 {
        return invalid("q must be positive");
    }
    let k2 = kappa_inner.get(2)?;
    if (k2 - 1.0 / q as f64).abs() > 1e-12 {
        return precondition(format!("inner κ₂ must be 1/q = {}, got {k2}", 1.0 / q as f64));
    }
    let w1 = 1.0 / q as f64;
    let mut g0 = Matrix::zeros(big_t, big_t);
    let mut g1 = Matrix::zeros(big_t, big_t);
    for t in 1..=big_t {
        let law0 = law_before(&g0, t)?;
        let law1 = law_before(&g1, t)?;
        let mut m0 = Moments::new(&law0, fs)?;
        let mut m1 = Moments::new(&law1, fs)?;
        let mut fprime1 = vec![0.0; t];
        for (r, v) in fprime1.iter_mut().enumerate().skip(1) {
            *v = m1.fprime(r)?;
        }
        for s in 1..=t {
            let mixed = (1.0 - w1) * m0.ff(s - 1, t - 1)? + w1 * m1.ff(s - 1, t - 1)?;
            let mut pair = |a: usize, b: usize| m1.ff(a, b);
            let extra = kappa_sum(kappa_inner, &fprime1, s, t, &mut pair, &|a, b| (a, b) != (s - 1, t - 1))?;
            g0.set(s - 1, t - 1, mixed);
            g0.set(t - 1, s - 1, mixed);
            g1.set(s - 1, t - 1, mixed + extra);
            g1.set(t - 1, s - 1, mixed + extra);
        }
        check_psd(&g0, t)?;
        check_psd(&g1, t)?;
    }
    let mut block_kernel = vec![0; q];
    block_kernel[0] = 1;
    Ok(SEKernel {
        variant: SEVariant::Community,
        iterations: big_t,
        gammas: vec![g0, g1],
        weights: vec![1.0 - w1, w1],
        block_kernel: Some(block_kernel),
    })
}
