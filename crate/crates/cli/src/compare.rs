use anyhow::{Context, Result};
use log::{info, warn};

use tamp_core::state_evolution::{compare_summary, summarize, synthetic_report, MomentSummary, SEKernel};

use crate::config::ExperimentConfig;
use crate::output::{csv_reader, num, opt, OutDir};
use crate::trials::seed_of;
use crate::{CompareArgs, Status};

fn read_summary(path: &std::path::Path) -> Result<Vec<MomentSummary>> {
    let mut r = csv_reader(path)?;
    let rows: std::result::Result<Vec<MomentSummary>, _> = r.deserialize().collect();
    rows.with_context(|| format!("parsing {}", path.display()))
}

pub fn run(cfg: &ExperimentConfig, out: &OutDir, args: &CompareArgs) -> Result<Status> {
    let text = std::fs::read_to_string(&args.kernel).with_context(|| format!("reading {}", args.kernel.display()))?;
    let kernel: SEKernel = serde_json::from_str(&text).with_context(|| format!("parsing {}", args.kernel.display()))?;

    let summary = match (&args.moments, args.synthetic) {
        (Some(path), _) => read_summary(path)?,
        (None, Some(n)) => {
            let reports =
                (0..cfg.trials).map(|i| synthetic_report(&kernel, n, seed_of(cfg.master_seed, n, i))).collect::<Result<Vec<_>, _>>()?;
            let summary = summarize(&reports)?;
            let mut w = out.csv("moments.csv", &["group", "moment", "s", "t", "mean", "se", "trials"])?;
            for m in &summary {
                w.write_record([&m.group, &m.moment, &m.s.to_string(), &m.t.to_string(), &num(m.mean), &opt(m.se), &m.trials.to_string()])?;
            }
            w.flush()?;
            summary
        }
        (None, None) => unreachable!("clap requires --moments or --synthetic"),
    };

    let verdict = compare_summary(&kernel, &summary, cfg.threshold)?;
    let mut w = out.csv("verdict.csv", &["group", "moment", "s", "t", "empirical", "predicted", "se", "z", "pass"])?;
    for r in &verdict.rows {
        w.serialize(r)?;
    }
    w.flush()?;
    for r in verdict.failures() {
        warn!("{} {} ({}, {}): z = {:.2}", r.group, r.moment, r.s, r.t, r.z);
    }
    info!("{} rows, max |z| = {:.2}, threshold {}", verdict.rows.len(), verdict.max_abs_z(), verdict.threshold);
    Ok(if verdict.pass() { Status::Pass } else { Status::CompareFail })
}
