use anyhow::{bail, Context, Result};
use log::info;

use tamp_core::amp::OnsagerMode;
use tamp_core::ensembles::EnsembleKind;
use tamp_core::freeprob::CumulantTable;
use tamp_core::state_evolution::{se_block_goe, se_community, se_orthogonal, se_punctured, SEKernel};
use tamp_core::Matrix;

use crate::config::ExperimentConfig;
use crate::output::OutDir;
use crate::trials::ensemble_cumulants;
use crate::Status;

/// The configured table when it is long enough for the recursion, else the
/// ensemble's own.
fn table(cfg: &ExperimentConfig, given: Option<&CumulantTable>) -> Result<CumulantTable> {
    let need = 2 * cfg.amp()?.iterations;
    if let Some(t) = given.filter(|t| t.len() >= need) {
        return Ok(t.clone());
    }
    let kind = &cfg.ensemble()?.kind;
    match ensemble_cumulants(kind, need) {
        Some(t) => Ok(t),
        None => match given {
            Some(t) => Ok(t.clone()),
            None => bail!("no free cumulants known for {}; give them in the Onsager section", kind.name()),
        },
    }
}

pub fn kernel(cfg: &ExperimentConfig) -> Result<SEKernel> {
    let amp = cfg.amp()?;
    let (fs, big_t) = (&amp.nonlinearities, amp.iterations);
    let k = match &amp.onsager {
        OnsagerMode::ScalarKappa { kappa } => se_orthogonal(fs, &table(cfg, Some(kappa))?, big_t)?,
        OnsagerMode::ExactTreelike => se_orthogonal(fs, &table(cfg, None)?, big_t)?,
        OnsagerMode::PuncturedKappa { kappa } => se_punctured(fs, &table(cfg, Some(kappa))?, big_t)?,
        OnsagerMode::BlockGoe => {
            let Some(EnsembleKind::BlockGoe { q, sigma }) = cfg.ensemble.as_ref().map(|e| &e.kind) else {
                bail!("block_goe state evolution needs a block_goe ensemble");
            };
            let sigma = Matrix::from_vec(*q, *q, sigma.clone())?;
            se_block_goe(fs, &sigma, *q, big_t, cfg.block_normalization)?
        }
        OnsagerMode::Community { kappa, q } => {
            let inner = if kappa.len() >= 2 * big_t {
                kappa.clone()
            } else {
                match cfg.ensemble.as_ref().map(|e| &e.kind) {
                    Some(EnsembleKind::Community { inner, .. }) => inner.cumulants(*q, 2 * big_t)?,
                    _ => kappa.clone(),
                }
            };
            se_community(fs, &inner, *q, big_t)?
        }
        OnsagerMode::None => bail!("an iteration without Onsager correction has no state evolution"),
    };
    Ok(k)
}

pub fn run(cfg: &ExperimentConfig, out: &OutDir) -> Result<Status> {
    let k = kernel(cfg).context("computing the state-evolution kernel")?;
    let path = out.json("kernel.json", &k)?;
    info!("{:?} kernel, T = {}; wrote {}", k.variant, k.iterations, path.display());
    Ok(Status::Pass)
}
