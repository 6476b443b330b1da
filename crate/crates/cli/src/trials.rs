use anyhow::Result;
use rayon::prelude::*;

use tamp_core::ensembles::{generate, EigenSampler, EnsembleKind, EnsembleSpec};
use tamp_core::freeprob::CumulantTable;
use tamp_core::rng::trial_seed;
use tamp_core::Matrix;

/// Seed of trial `index` at dimension `n`.
pub fn seed_of(master: u64, n: usize, index: usize) -> u64 {
    trial_seed(trial_seed(master, n as u64), index as u64)
}

/// Seed for randomness inside a trial other than the matrix.
pub fn aux_seed(trial: u64) -> u64 {
    trial_seed(trial, 1)
}

/// Trial count after collapsing deterministic ensembles to one draw.
pub fn effective_trials(spec: &EnsembleSpec, trials: usize) -> usize {
    if spec.kind.is_deterministic() {
        1
    } else {
        trials
    }
}

/// Run `body(matrix, trial_seed)` for each trial in parallel; results come
/// back in trial order. Deterministic ensembles are generated once.
pub fn run_trials<T, F>(spec: &EnsembleSpec, master: u64, trials: usize, body: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &Matrix, u64) -> Result<T> + Sync,
{
    let n = spec.n;
    let seeds: Vec<u64> = (0..trials).map(|i| seed_of(master, n, i)).collect();
    if spec.kind.is_deterministic() {
        let a = generate(spec)?.values;
        return seeds.par_iter().enumerate().map(|(i, &s)| body(i, &a, s)).collect();
    }
    seeds
        .par_iter()
        .enumerate()
        .map(|(i, &s)| {
            let trial = EnsembleSpec { seed: s, ..spec.clone() };
            let a = generate(&trial)?.values;
            body(i, &a, s)
        })
        .collect()
}

/// Free cumulants of the limiting spectral law, where the ensemble has one
/// from the preset tables.
pub fn ensemble_cumulants(kind: &EnsembleKind, len: usize) -> Option<CumulantTable> {
    let name = match kind {
        EnsembleKind::Goe | EnsembleKind::Wigner { .. } => "goe",
        EnsembleKind::OrthInvariant { eigenvalues: EigenSampler::Semicircle } => "goe",
        EnsembleKind::OrthInvariant { eigenvalues: EigenSampler::Rademacher } => "rom",
        EnsembleKind::Rom | EnsembleKind::RRom => "rom",
        EnsembleKind::Punctured { inner } => {
            return match **inner {
                EnsembleKind::Hadamard | EnsembleKind::Dst | EnsembleKind::Dct => CumulantTable::preset("rom", len).ok(),
                ref other => ensemble_cumulants(other, len),
            }
        }
        _ => return None,
    };
    CumulantTable::preset(name, len).ok()
}

/// Targets apply to 2-edge-connected diagrams only: the ensemble is
/// punctured, or its traffic law matches ROM only on those diagrams.
pub fn targets_need_two_edge_connected(kind: &EnsembleKind) -> bool {
    matches!(kind, EnsembleKind::RRom | EnsembleKind::Punctured { .. })
}
