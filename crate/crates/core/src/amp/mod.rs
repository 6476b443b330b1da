//! AMP iterations: treelike AMP with exact Onsager vectors, and the scalar
//! Onsager forms for orthogonally invariant, punctured, block GOE and
//! community ensembles.

mod onsager;
mod report;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, precondition, Result, TampError};
use crate::freeprob::CumulantTable;
use crate::gaussian::Polynomial;
use crate::matrix::Matrix;
use crate::rng::stream_rng;
use crate::stats::mean;

pub use onsager::{onsager_b, onsager_b_brute, MAX_ONSAGER_WINDOW};
pub use report::{empirical_moments, empirical_state, GroupMoments, MomentReport, MAX_REPORT_POWER};

/// Exact-mode budget.
pub const MAX_EXACT_N: usize = 256;
pub const MAX_EXACT_T: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OnsagerMode {
    /// Distinct-index closed-walk vectors `b_{s,t}`.
    ExactTreelike,
    /// `κ_{t−s} Π ⟨f′_r⟩` times `f_s`.
    ScalarKappa { kappa: CumulantTable },
    /// `(A^{⊙2} f′_{t−1}) · f_{t−2}`.
    BlockGoe,
    /// Scalar form applied to centered `f_s − ⟨f_s⟩𝟙`.
    PuncturedKappa { kappa: CumulantTable },
    /// Community model: `⟨f′_{t−1}⟩ f_{t−2}` plus the inner-block
    /// corrections on the coordinates of block 0.
    Community { kappa: CumulantTable, q: usize },
    /// No correction at all.
    None,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Init {
    #[default]
    Ones,
    Gaussian {
        seed: u64,
    },
}

/// `nonlinearities[t]` is `f_t`; the iteration produces `x_1..x_T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AMPConfig {
    pub nonlinearities: Vec<Polynomial>,
    #[serde(rename = "T")]
    pub iterations: usize,
    pub onsager: OnsagerMode,
    #[serde(default)]
    pub init: Init,
}

impl AMPConfig {
    pub fn new(nonlinearities: Vec<Polynomial>, iterations: usize, onsager: OnsagerMode, init: Init) -> Self {
        AMPConfig { nonlinearities, iterations, onsager, init }
    }

    /// The same polynomial at every step.
    pub fn uniform(f: Polynomial, iterations: usize, onsager: OnsagerMode, init: Init) -> Self {
        AMPConfig::new(vec![f; iterations], iterations, onsager, init)
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return invalid("AMP needs T >= 1");
        }
        if self.nonlinearities.len() < self.iterations {
            return invalid(format!("need {} nonlinearities, got {}", self.iterations, self.nonlinearities.len()));
        }
        match &self.onsager {
            OnsagerMode::ScalarKappa { kappa } | OnsagerMode::PuncturedKappa { kappa } | OnsagerMode::Community { kappa, .. } => {
                if kappa.tag != crate::freeprob::TableTag::Cumulants {
                    return precondition("the Onsager table must hold free cumulants");
                }
                if kappa.len() < self.iterations {
                    return Err(TampError::TableTooShort { need: self.iterations, have: kappa.len() });
                }
            }
            _ => {}
        }
        if let OnsagerMode::PuncturedKappa { .. } = self.onsager {
            if self.nonlinearities[0] != Polynomial::identity() {
                return precondition("punctured AMP needs f_0(x) = x");
            }
            if !matches!(self.init, Init::Gaussian { .. }) {
                return precondition("punctured AMP needs a Gaussian initialization");
            }
        }
        if let OnsagerMode::Community { q, .. } = self.onsager {
            if q == 0 {
                return invalid("community model needs q >= 1");
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OnsagerTerm {
    pub s: usize,
    pub t: usize,
    /// Scalar modes.
    pub coefficient: Option<f64>,
    /// Exact and block modes.
    pub vector: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AMPTrace {
    pub x0: Vec<f64>,
    /// Row `t − 1` is `x_t`.
    pub iterates: Matrix,
    pub onsager: Vec<OnsagerTerm>,
    /// `⟨x_s x_t⟩` for `s, t ∈ 1..=T`, stored at `[s−1, t−1]`.
    pub gram: Matrix,
    /// `⟨f_t(x_t)⟩` and `⟨f′_t(x_t)⟩` for `t ∈ 0..T`.
    pub mean_f: Vec<f64>,
    pub mean_fprime: Vec<f64>,
}

impl AMPTrace {
    pub fn iterations(&self) -> usize {
        self.iterates.rows()
    }

    pub fn iterate(&self, t: usize) -> &[f64] {
        self.iterates.row(t - 1)
    }
}

/// Treelike AMP with exact Onsager vectors; `x_0 = 𝟙`.
pub fn run_treelike(a: &Matrix, cfg: &AMPConfig) -> Result<AMPTrace> {
    if cfg.onsager != OnsagerMode::ExactTreelike {
        return precondition("run_treelike needs the exact_treelike mode");
    }
    let n = a.dim()?;
    if n > MAX_EXACT_N || cfg.iterations > MAX_EXACT_T {
        // the crossing contractions grow like n^{⌈w/2⌉+1}
        let need = (n as f64).powi(cfg.iterations.div_ceil(2) as i32 + 1);
        let budget = (MAX_EXACT_N as f64).powi(MAX_EXACT_T.div_ceil(2) as i32 + 1);
        return Err(TampError::Budget { need, budget });
    }
    run(a, cfg)
}

/// Scalar Onsager form for orthogonally invariant matrices.
pub fn run_oamp(a: &Matrix, cfg: &AMPConfig) -> Result<AMPTrace> {
    if !matches!(cfg.onsager, OnsagerMode::ScalarKappa { .. }) {
        return precondition("run_oamp needs the scalar_kappa mode");
    }
    run(a, cfg)
}

/// Scalar Onsager form on centered nonlinearities for punctured matrices.
pub fn run_punctured(a: &Matrix, cfg: &AMPConfig) -> Result<AMPTrace> {
    if !matches!(cfg.onsager, OnsagerMode::PuncturedKappa { .. }) {
        return precondition("run_punctured needs the punctured_kappa mode");
    }
    run(a, cfg)
}

pub fn run_block_goe(a: &Matrix, cfg: &AMPConfig) -> Result<AMPTrace> {
    if cfg.onsager != OnsagerMode::BlockGoe {
        return precondition("run_block_goe needs the block_goe mode");
    }
    run(a, cfg)
}

pub fn run_community(a: &Matrix, cfg: &AMPConfig) -> Result<AMPTrace> {
    if !matches!(cfg.onsager, OnsagerMode::Community { .. }) {
        return precondition("run_community needs the community mode");
    }
    run(a, cfg)
}

/// Any mode, without the mode-specific entry checks.
pub fn run(a: &Matrix, cfg: &AMPConfig) -> Result<AMPTrace> {
    cfg.validate()?;
    let n = a.dim()?;
    let big_t = cfg.iterations;
    let x0: Vec<f64> = match cfg.init {
        Init::Ones => vec![1.0; n],
        Init::Gaussian { seed } => {
            let mut rng = stream_rng(seed, 0);
            (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
        }
    };
    let mut xs: Vec<Vec<f64>> = vec![x0.clone()];
    let mut fs: Vec<Vec<f64>> = Vec::new();
    let mut fps: Vec<Vec<f64>> = Vec::new();
    let mut mean_f = Vec::new();
    let mut mean_fp = Vec::new();
    let mut terms = Vec::new();
    let block0 = match cfg.onsager {
        OnsagerMode::Community { q, .. } => {
            if n % q != 0 {
                return invalid(format!("q = {q} must divide n = {n}"));
            }
            n / q
        }
        _ => 0,
    };

    for t in 1..=big_t {
        let f = &cfg.nonlinearities[t - 1];
        let prev = &xs[t - 1];
        fs.push(f.eval_slice(prev));
        fps.push(f.derivative().eval_slice(prev));
        mean_f.push(mean(&fs[t - 1]));
        mean_fp.push(mean(&fps[t - 1]));

        let mut x = a.matvec(&fs[t - 1])?;
        match &cfg.onsager {
            OnsagerMode::ExactTreelike => {
                for s in 0..t {
                    let b = onsager_b(a, &fps, s, t)?;
                    for ((xi, bi), fi) in x.iter_mut().zip(&b).zip(&fs[s]) {
                        *xi -= bi * fi;
                    }
                    terms.push(OnsagerTerm { s, t, coefficient: None, vector: Some(b) });
                }
            }
            OnsagerMode::ScalarKappa { kappa } | OnsagerMode::PuncturedKappa { kappa } => {
                let centered = matches!(cfg.onsager, OnsagerMode::PuncturedKappa { .. });
                for s in 0..t {
                    let c = kappa.get(t - s)? * mean_fp[s + 1..t].iter().product::<f64>();
                    let shift = if centered { mean_f[s] } else { 0.0 };
                    for (xi, fi) in x.iter_mut().zip(&fs[s]) {
                        *xi -= c * (fi - shift);
                    }
                    terms.push(OnsagerTerm { s, t, coefficient: Some(c), vector: None });
                }
            }
            OnsagerMode::BlockGoe => {
                if t >= 2 {
                    let fp = &fps[t - 1];
                    let b: Vec<f64> = (0..n).map(|i| a.row(i).iter().zip(fp).map(|(v, w)| v * v * w).sum()).collect();
                    for ((xi, bi), fi) in x.iter_mut().zip(&b).zip(&fs[t - 2]) {
                        *xi -= bi * fi;
                    }
                    terms.push(OnsagerTerm { s: t - 2, t, coefficient: None, vector: Some(b) });
                }
            }
            OnsagerMode::Community { kappa, .. } => {
                if t >= 2 {
                    let c = mean_fp[t - 1];
                    for (xi, fi) in x.iter_mut().zip(&fs[t - 2]) {
                        *xi -= c * fi;
                    }
                    terms.push(OnsagerTerm { s: t - 2, t, coefficient: Some(c), vector: None });
                }
                // averages of f′_r over the inner block
                let inner_fp: Vec<f64> = fps.iter().map(|v| mean(&v[..block0])).collect();
                for s in 0..t {
                    if s + 2 == t {
                        continue;
                    }
                    let c = kappa.get(t - s)? * inner_fp[s + 1..t].iter().product::<f64>();
                    for (xi, fi) in x[..block0].iter_mut().zip(&fs[s][..block0]) {
                        *xi -= c * fi;
                    }
                    terms.push(OnsagerTerm { s, t, coefficient: Some(c), vector: None });
                }
            }
            OnsagerMode::None => {}
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(TampError::Divergence { t, index: i });
        }
        xs.push(x);
    }

    let mut iterates = Matrix::zeros(big_t, n);
    for t in 1..=big_t {
        iterates.row_mut(t - 1).copy_from_slice(&xs[t]);
    }
    let gram = Matrix::from_fn(big_t, big_t, |s, t| {
        crate::stats::compensated_sum(xs[s + 1].iter().zip(&xs[t + 1]).map(|(a, b)| a * b)) / n as f64
    });
    Ok(AMPTrace { x0, iterates, onsager: terms, gram, mean_f, mean_fprime: mean_fp })
}
