use anyhow::{bail, Result};
use log::info;

use tamp_core::diagrams::{classify, w_to_z_coefficients};
use tamp_core::ensembles::{delocalization_audit, EnsembleSpec};
use tamp_core::freeprob::{cactus_traffic_value, CumulantTable};
use tamp_core::graphpoly::{eval_w_uniform, eval_z_uniform};
use tamp_core::stats::{loglog_slope, mean_se};
use tamp_core::{Diagram, Matrix};

use crate::config::ExperimentConfig;
use crate::output::{num, opt, OutDir};
use crate::trials::{effective_trials, ensemble_cumulants, run_trials, targets_need_two_edge_connected};
use crate::Status;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Basis {
    W,
    Z,
}

impl Basis {
    fn name(self) -> &'static str {
        match self {
            Basis::W => "w",
            Basis::Z => "z",
        }
    }
}

fn normalized(d: &Diagram, a: &Matrix, basis: Basis) -> Result<f64> {
    let n = a.rows() as f64;
    let v = match basis {
        Basis::W => eval_w_uniform(d, a)?,
        Basis::Z => eval_z_uniform(d, a)?,
    };
    Ok(v.as_scalar().expect("unrooted diagrams evaluate to scalars") / n)
}

struct Stat {
    trials: usize,
    mean: f64,
    se: Option<f64>,
    /// Root mean square over trials; the scaling fits use this.
    rms: f64,
}

fn stat(values: Vec<f64>) -> Stat {
    let (mean, se) = mean_se(&values);
    let rms = (values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64).sqrt();
    Stat { trials: values.len(), mean, se, rms }
}

/// Per-dimension statistics of the `items` values `body` returns per trial.
fn sweep<F>(cfg: &ExperimentConfig, items: usize, body: F) -> Result<Vec<(EnsembleSpec, Vec<Stat>)>>
where
    F: Fn(&Matrix) -> Result<Vec<f64>> + Sync,
{
    let base = cfg.ensemble()?;
    let mut out = Vec::new();
    for n in cfg.sweep()? {
        let spec = EnsembleSpec { n, ..base.clone() };
        spec.validate()?;
        let trials = effective_trials(&spec, cfg.trials);
        info!("{} n = {n}: {trials} trial(s)", spec.kind.name());
        let per_trial = run_trials(&spec, cfg.master_seed, trials, |_, a, _| body(a))?;
        let stats = (0..items).map(|k| stat(per_trial.iter().map(|row| row[k]).collect())).collect();
        out.push((spec, stats));
    }
    Ok(out)
}

fn exponent(ns: &[f64], sizes: &[f64]) -> Option<f64> {
    if ns.len() < 2 || sizes.iter().any(|m| !(*m > 0.0)) {
        return None;
    }
    loglog_slope(ns, sizes)
}

fn configured(cfg: &ExperimentConfig) -> Result<Vec<(String, Diagram)>> {
    let ds = cfg.diagrams()?;
    if ds.is_empty() {
        bail!("no diagrams configured");
    }
    Ok(ds)
}

/// Limits of `(1/n)w` and `(1/n)z` from the free cumulants.
fn targets(d: &Diagram, kappa: Option<&CumulantTable>, two_ec_only: bool) -> Result<(Option<f64>, Option<f64>)> {
    let Some(kappa) = kappa else {
        return Ok((None, None));
    };
    let class = classify(d);
    if !class.connected {
        return Ok((None, None));
    }
    if two_ec_only && !class.two_edge_connected {
        return Ok((Some(0.0), None));
    }
    let z = cactus_traffic_value(d, kappa)?.value;
    let mut w = 0.0;
    for (q, c) in w_to_z_coefficients(d)?.iter() {
        w += c as f64 * cactus_traffic_value(q, kappa)?.value;
    }
    Ok((Some(w), Some(z)))
}

pub fn run_traffic(cfg: &ExperimentConfig, out: &OutDir) -> Result<Status> {
    let ds = configured(cfg)?;
    if let Some((name, _)) = ds.iter().find(|(_, d)| !d.roots().is_empty()) {
        bail!("traffic needs unrooted diagrams; `{name}` is rooted (use cactus-audit)");
    }
    let kind = &cfg.ensemble()?.kind;
    let max_edges = ds.iter().map(|(_, d)| d.edge_count()).max().unwrap_or(0).max(2);
    let kappa = ensemble_cumulants(kind, max_edges);
    let two_ec_only = targets_need_two_edge_connected(kind);

    let results = sweep(cfg, 2 * ds.len(), |a| {
        let mut row = Vec::with_capacity(2 * ds.len());
        for (_, d) in &ds {
            row.push(normalized(d, a, Basis::W)?);
            row.push(normalized(d, a, Basis::Z)?);
        }
        Ok(row)
    })?;

    let mut w = out.csv("traffic.csv", &["diagram", "n", "trials", "w_mean", "w_se", "w_target", "z_mean", "z_se", "z_target"])?;
    for (spec, stats) in &results {
        for (k, (name, d)) in ds.iter().enumerate() {
            let (wt, zt) = targets(d, kappa.as_ref(), two_ec_only)?;
            let (sw, sz) = (&stats[2 * k], &stats[2 * k + 1]);
            w.write_record([
                name.clone(),
                spec.n.to_string(),
                sw.trials.to_string(),
                num(sw.mean),
                opt(sw.se),
                opt(wt),
                num(sz.mean),
                opt(sz.se),
                opt(zt),
            ])?;
        }
    }
    w.flush()?;

    let ns: Vec<f64> = results.iter().map(|(s, _)| s.n as f64).collect();
    let mut e = out.csv("traffic_exponents.csv", &["diagram", "basis", "exponent"])?;
    for (k, (name, _)) in ds.iter().enumerate() {
        for (j, basis) in [Basis::W, Basis::Z].into_iter().enumerate() {
            let sizes: Vec<f64> = results.iter().map(|(_, st)| st[2 * k + j].rms).collect();
            let slope = exponent(&ns, &sizes);
            e.write_record([name.as_str(), basis.name(), &opt(slope)])?;
        }
    }
    e.flush()?;
    info!("wrote {}", out.dir.display());
    Ok(Status::Pass)
}

fn class_name(d: &Diagram) -> &'static str {
    let c = classify(d);
    match (c.connected, c.two_edge_connected, c.cactus) {
        (false, _, _) => "disconnected",
        (true, true, true) => "cactus",
        (true, true, false) => "two_edge_connected",
        (true, false, _) => "not_two_edge_connected",
    }
}

pub fn run_audit(cfg: &ExperimentConfig, out: &OutDir) -> Result<Status> {
    let ds = configured(cfg)?;
    let (rooted, plain): (Vec<_>, Vec<_>) = ds.into_iter().partition(|(_, d)| !d.roots().is_empty());
    // 2-edge-connected diagrams are tracked in z, the others in w
    let bases: Vec<Basis> =
        plain.iter().map(|(_, d)| if classify(d).two_edge_connected { Basis::Z } else { Basis::W }).collect();
    let items = plain.len() + 1 + rooted.len();

    let results = sweep(cfg, items, |a| {
        let mut row = Vec::with_capacity(items);
        for ((_, d), b) in plain.iter().zip(&bases) {
            row.push(normalized(d, a, *b)?);
        }
        let report = delocalization_audit(a, &rooted)?;
        row.push(report.norm);
        row.extend(report.entries.iter().map(|e| e.value));
        Ok(row)
    })?;

    let mut w = out.csv("cactus_audit.csv", &["diagram", "class", "basis", "n", "trials", "mean", "se"])?;
    let mut dl = out.csv("delocalization.csv", &["entry", "n", "trials", "mean", "se"])?;
    for (spec, stats) in &results {
        for (k, ((name, d), b)) in plain.iter().zip(&bases).enumerate() {
            let s = &stats[k];
            w.write_record([
                name.clone(),
                class_name(d).into(),
                b.name().into(),
                spec.n.to_string(),
                s.trials.to_string(),
                num(s.mean),
                opt(s.se),
            ])?;
        }
        let names = std::iter::once("norm".to_string()).chain(rooted.iter().map(|(n, _)| n.clone()));
        for (name, s) in names.zip(&stats[plain.len()..]) {
            dl.write_record([name, spec.n.to_string(), s.trials.to_string(), num(s.mean), opt(s.se)])?;
        }
    }
    w.flush()?;
    dl.flush()?;

    let ns: Vec<f64> = results.iter().map(|(s, _)| s.n as f64).collect();
    let mut e = out.csv("audit_exponents.csv", &["diagram", "basis", "exponent"])?;
    let labels = plain
        .iter()
        .zip(&bases)
        .map(|((n, _), b)| (n.clone(), b.name()))
        .chain(std::iter::once(("norm".to_string(), "norm")))
        .chain(rooted.iter().map(|(n, _)| (n.clone(), "delocalization")));
    for (k, (name, basis)) in labels.enumerate() {
        let sizes: Vec<f64> = results.iter().map(|(_, st)| st[k].rms).collect();
        e.write_record([name.as_str(), basis, &opt(exponent(&ns, &sizes))])?;
    }
    e.flush()?;
    info!("wrote {}", out.dir.display());
    Ok(Status::Pass)
}
