use serde::{Deserialize, Serialize};

use crate::error::{Result, TampError};
use crate::matrix::Matrix;
use crate::stats::compensated_sum;

use super::AMPTrace;

pub const MAX_REPORT_POWER: usize = 6;

/// Empirical moments of one group of coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupMoments {
    /// Block label, `None` for all coordinates.
    pub block: Option<usize>,
    pub count: usize,
    /// `⟨x_s x_t⟩`, `T × T`.
    pub gram: Vec<Vec<f64>>,
    /// `⟨x_t^k⟩` for `k = 1..=6`, one row per `t`.
    pub powers: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub iterations: usize,
    pub groups: Vec<GroupMoments>,
}

impl MomentReport {
    pub fn overall(&self) -> &GroupMoments {
        &self.groups[0]
    }

    pub fn block(&self, b: usize) -> Option<&GroupMoments> {
        self.groups.iter().find(|g| g.block == Some(b))
    }
}

/// Joint and per-iterate empirical moments, overall and, when labels are
/// given, restricted to each block.
pub fn empirical_state(trace: &AMPTrace, block_labels: Option<&[usize]>) -> Result<MomentReport> {
    empirical_moments(&trace.iterates, block_labels)
}

/// [`empirical_state`] on a bare `T × n` grid of iterates.
pub fn empirical_moments(iterates: &Matrix, block_labels: Option<&[usize]>) -> Result<MomentReport> {
    let n = iterates.cols();
    let mut groups = vec![group(iterates, None, &(0..n).collect::<Vec<_>>())];
    if let Some(labels) = block_labels {
        if labels.len() != n {
            return Err(TampError::Dimension { expected: n, got: labels.len() });
        }
        let q = labels.iter().copied().max().map_or(0, |m| m + 1);
        for b in 0..q {
            let idx: Vec<usize> = (0..n).filter(|&i| labels[i] == b).collect();
            if !idx.is_empty() {
                groups.push(group(iterates, Some(b), &idx));
            }
        }
    }
    Ok(MomentReport { iterations: iterates.rows(), groups })
}

fn group(x: &Matrix, block: Option<usize>, idx: &[usize]) -> GroupMoments {
    let big_t = x.rows();
    let count = idx.len() as f64;
    let avg = |f: &dyn Fn(usize) -> f64| compensated_sum(idx.iter().map(|&i| f(i))) / count;
    let gram = (0..big_t)
        .map(|s| (0..big_t).map(|t| avg(&|i| x.get(s, i) * x.get(t, i))).collect())
        .collect();
    let powers = (0..big_t)
        .map(|t| (1..=MAX_REPORT_POWER).map(|k| avg(&|i| x.get(t, i).powi(k as i32))).collect())
        .collect();
    GroupMoments { block, count: idx.len(), gram, powers }
}
