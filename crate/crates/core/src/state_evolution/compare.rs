use std::fmt::Write as _;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::amp::{empirical_moments, GroupMoments, MomentReport};
use crate::error::{invalid, Result, TampError};
use crate::matrix::Matrix;
use crate::rng::stream_rng;
use crate::stats::{mean_se, z_of};

use super::SEKernel;

pub const DEFAULT_THRESHOLD: f64 = 4.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictRow {
    /// `all` or `block<b>`.
    pub group: String,
    /// `gram` for `⟨x_s x_t⟩`, `m4` for `⟨x_t⁴⟩` (then `s = t`).
    pub moment: String,
    pub s: usize,
    pub t: usize,
    pub empirical: f64,
    pub predicted: f64,
    pub se: f64,
    pub z: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub threshold: f64,
    pub rows: Vec<VerdictRow>,
}

impl Verdict {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerdictRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn max_abs_z(&self) -> f64 {
        self.rows.iter().map(|r| r.z.abs()).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("group,moment,s,t,empirical,predicted,se,z,pass\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.group, r.moment, r.s, r.t, r.empirical, r.predicted, r.se, r.z, r.pass
            );
        }
        out
    }
}

/// Across-trial mean and standard error of one empirical moment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    /// `all` or `block<b>`.
    pub group: String,
    /// `gram` for `⟨x_s x_t⟩`, `m<k>` for `⟨x_t^k⟩` (then `s = t`).
    pub moment: String,
    pub s: usize,
    pub t: usize,
    pub mean: f64,
    /// Absent below two trials.
    pub se: Option<f64>,
    pub trials: usize,
}

fn group_name(block: Option<usize>) -> String {
    block.map_or_else(|| "all".to_string(), |b| format!("block{b}"))
}

/// Per-moment across-trial statistics of `reports`, one report per
/// independent trial; every report must list the same groups.
pub fn summarize(reports: &[MomentReport]) -> Result<Vec<MomentSummary>> {
    let Some(first) = reports.first() else {
        return invalid("no trials to summarize");
    };
    let big_t = first.iterations;
    for r in reports {
        if r.iterations != big_t {
            return Err(TampError::Dimension { expected: big_t, got: r.iterations });
        }
        if r.groups.len() != first.groups.len() || r.groups.iter().zip(&first.groups).any(|(a, b)| a.block != b.block) {
            return invalid("trials report different groups");
        }
    }
    let mut out = Vec::new();
    for (gi, g) in first.groups.iter().enumerate() {
        let mut push = |moment: String, s: usize, t: usize, f: &dyn Fn(&GroupMoments) -> f64| {
            let values: Vec<f64> = reports.iter().map(|r| f(&r.groups[gi])).collect();
            let (mean, se) = mean_se(&values);
            out.push(MomentSummary { group: group_name(g.block), moment, s, t, mean, se, trials: values.len() });
        };
        for t in 1..=big_t {
            for s in 1..=t {
                push("gram".into(), s, t, &|h| h.gram[s - 1][t - 1]);
            }
        }
        for t in 1..=big_t {
            for k in 1..=g.powers[t - 1].len() {
                push(format!("m{k}"), t, t, &|h| h.powers[t - 1][k - 1]);
            }
        }
    }
    Ok(out)
}

/// z-scores of the Gram entries and fourth moments in `summary` against
/// `kernel`. Block groups are compared to their own kernel when the kernel
/// carries a block map, and skipped otherwise.
pub fn compare_summary(kernel: &SEKernel, summary: &[MomentSummary], threshold: f64) -> Result<Verdict> {
    let big_t = kernel.iterations;
    let mixture = kernel.mixture();
    let mut rows = Vec::new();
    for m in summary {
        let is_m4 = m.moment == "m4";
        if m.moment != "gram" && !is_m4 {
            continue;
        }
        if m.s == 0 || m.t == 0 || m.s > big_t || m.t > big_t {
            return Err(TampError::Dimension { expected: big_t, got: m.s.max(m.t) });
        }
        let gamma = if m.group == "all" {
            &mixture
        } else {
            let Some(k) = m.group.strip_prefix("block").and_then(|b| b.parse().ok()).and_then(|b| kernel.kernel_of_block(b))
            else {
                continue;
            };
            k
        };
        let predicted = match (is_m4, m.group.as_str()) {
            (false, _) => gamma.get(m.s - 1, m.t - 1),
            (true, "all") => kernel.fourth_moment(m.t),
            (true, _) => 3.0 * gamma.get(m.t - 1, m.t - 1).powi(2),
        };
        let Some(se) = m.se else {
            return invalid("comparison needs at least two independent trials");
        };
        let z = z_of(m.mean - predicted, se);
        rows.push(VerdictRow {
            group: m.group.clone(),
            moment: m.moment.clone(),
            s: m.s,
            t: m.t,
            empirical: m.mean,
            predicted,
            se,
            z,
            pass: z.abs() <= threshold,
        });
    }
    if rows.is_empty() {
        return invalid("no comparable moments");
    }
    Ok(Verdict { threshold, rows })
}

/// [`compare_summary`] on the summary of per-trial reports.
pub fn compare_empirical(kernel: &SEKernel, reports: &[MomentReport], threshold: f64) -> Result<Verdict> {
    if reports.len() < 2 {
        return invalid("comparison needs at least two independent trials");
    }
    if reports[0].iterations != kernel.iterations {
        return Err(TampError::Dimension { expected: kernel.iterations, got: reports[0].iterations });
    }
    compare_summary(kernel, &summarize(reports)?, threshold)
}

/// Moments of `n` coordinates drawn exactly from the kernel's Gaussian law,
/// block `b` holding coordinates `b·n/q..(b+1)·n/q`.
pub fn synthetic_report(kernel: &SEKernel, n: usize, seed: u64) -> Result<MomentReport> {
    let big_t = kernel.iterations;
    let roots: Vec<Matrix> = kernel.gammas.iter().map(|g| g.psd_sqrt().map(|(r, _)| r)).collect::<Result<_>>()?;
    let labels: Option<Vec<usize>> = match &kernel.block_kernel {
        Some(map) => {
            let q = map.len();
            if q == 0 || n % q != 0 {
                return invalid(format!("{q} blocks must divide n = {n}"));
            }
            Some((0..n).map(|i| i / (n / q)).collect())
        }
        None => None,
    };
    let mut rng = stream_rng(seed, 0);
    let mut x = Matrix::zeros(big_t, n);
    let mut z = vec![0.0; big_t];
    for i in 0..n {
        let k = match (&labels, &kernel.block_kernel) {
            (Some(l), Some(map)) => map[l[i]],
            _ => 0,
        };
        z.iter_mut().for_each(|v| *v = StandardNormal.sample(&mut rng));
        let v = roots[k].matvec(&z)?;
        for (t, vt) in v.iter().enumerate() {
            x.set(t, i, *vt);
        }
    }
    empirical_moments(&x, labels.as_deref())
}
