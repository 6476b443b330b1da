use anyhow::Result;
use log::{info, warn};

use tamp_core::amp::{empirical_state, run as run_amp, run_treelike, Init, MomentReport, OnsagerMode};
use tamp_core::state_evolution::summarize;
use tamp_core::TampError;

use crate::config::ExperimentConfig;
use crate::output::{num, opt, OutDir};
use crate::trials::{aux_seed, run_trials};
use crate::Status;

enum TrialOutcome {
    Done(MomentReport),
    Diverged { t: usize, index: usize },
}

pub fn run(cfg: &ExperimentConfig, out: &OutDir, traces: bool) -> Result<Status> {
    let spec = cfg.ensemble()?;
    let amp = cfg.amp()?;
    let labels = spec.block_labels();
    if spec.kind.is_deterministic() && amp.init == Init::Ones && cfg.trials > 1 {
        warn!("deterministic matrix with init = ones: every trial is identical");
    }
    // the exact mode carries a cost budget
    let runner = if amp.onsager == OnsagerMode::ExactTreelike { run_treelike } else { run_amp };
    if traces {
        std::fs::create_dir_all(out.path("traces"))?;
    }

    let outcomes = run_trials(spec, cfg.master_seed, cfg.trials, |i, a, seed| {
        let mut trial = amp.clone();
        if let Init::Gaussian { .. } = trial.init {
            trial.init = Init::Gaussian { seed: aux_seed(seed) };
        }
        match runner(a, &trial) {
            Ok(trace) => {
                if traces {
                    trace.iterates.save(out.path(&format!("traces/trial_{i:04}.tamp")))?;
                }
                Ok(TrialOutcome::Done(empirical_state(&trace, labels.as_deref())?))
            }
            Err(TampError::Divergence { t, index }) => Ok(TrialOutcome::Diverged { t, index }),
            Err(e) => Err(e.into()),
        }
    })?;

    let mut div = out.csv("divergences.csv", &["trial", "t", "index"])?;
    let mut reports = Vec::new();
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            TrialOutcome::Done(r) => reports.push(r),
            TrialOutcome::Diverged { t, index } => {
                warn!("trial {i} diverged at t = {t}, coordinate {index}");
                div.write_record([i.to_string(), t.to_string(), index.to_string()])?;
            }
        }
    }
    div.flush()?;
    let diverged = cfg.trials - reports.len();

    let mut w = out.csv("moments.csv", &["group", "moment", "s", "t", "mean", "se", "trials"])?;
    if !reports.is_empty() {
        for m in summarize(&reports)? {
            w.write_record([m.group, m.moment, m.s.to_string(), m.t.to_string(), num(m.mean), opt(m.se), m.trials.to_string()])?;
        }
    }
    w.flush()?;
    info!("{} of {} trials finished; wrote {}", reports.len(), cfg.trials, out.dir.display());
    Ok(if diverged > 0 { Status::DivergenceOnly } else { Status::Pass })
}
