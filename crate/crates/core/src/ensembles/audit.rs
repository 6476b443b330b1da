use serde::Serialize;

use crate::diagrams::Diagram;
use crate::error::{invalid, Result};
use crate::graphpoly::{eval_open_cactus_matrix, rooted_cactus_vector};
use crate::matrix::Matrix;
use crate::stats::loglog_slope;

/// `Π M Π` with `Π = I − 𝟙𝟙ᵀ/n`, in O(n²) from row and column sums.
pub fn puncture(m: &Matrix) -> Result<Matrix> {
    let n = m.dim()?;
    if n == 0 {
        return Ok(m.clone());
    }
    let inv = 1.0 / n as f64;
    let symmetric = m.is_symmetric(0.0);
    let rows = m.row_sums();
    let cols = if symmetric {
        rows.clone()
    } else {
        let mut cols = vec![0.0; n];
        for i in 0..n {
            for (c, &x) in cols.iter_mut().zip(m.row(i)) {
                *c += x;
            }
        }
        cols
    };
    let total: f64 = crate::stats::compensated_sum(rows.iter().copied());
    let shift = total * inv * inv;
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        let lo = if symmetric { i } else { 0 };
        for j in lo..n {
            let v = m.get(i, j) - rows[i] * inv - cols[j] * inv + shift;
            out.set(i, j, v);
            if symmetric {
                out.set(j, i, v);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditEntry {
    pub diagram: String,
    /// Two roots: max off-diagonal `|W_σ(M)[i,j]|`. One root:
    /// `n^{-1/2} ‖Π w_σ(M)‖₂`.
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DelocalizationReport {
    pub n: usize,
    pub norm: f64,
    pub entries: Vec<AuditEntry>,
}

/// Operator norm (power iteration), off-diagonal size of open-cactus matrices
/// and the centered size of rooted-cactus vectors.
pub fn delocalization_audit(m: &Matrix, diagrams: &[(String, Diagram)]) -> Result<DelocalizationReport> {
    let n = m.dim()?;
    let norm = m.spectral_norm_estimate(100);
    let mut entries = Vec::new();
    for (name, d) in diagrams {
        let value = match d.roots().len() {
            2 => eval_open_cactus_matrix(d, m)?.max_abs_off_diagonal(),
            1 => {
                let v = rooted_cactus_vector(d, m)?;
                let mean = crate::stats::mean(&v);
                let centered: f64 = v.iter().map(|x| (x - mean) * (x - mean)).sum();
                centered.sqrt() / (n as f64).sqrt()
            }
            _ => return invalid(format!("diagram `{name}` needs one or two roots for the audit")),
        };
        entries.push(AuditEntry { diagram: name.clone(), value });
    }
    Ok(DelocalizationReport { n, norm, entries })
}

/// Log-log slope of every audit entry (and of the norm, first) across a
/// dimension sweep; `None` where a value is not positive.
pub fn scaling_exponents(reports: &[DelocalizationReport]) -> Vec<(String, Option<f64>)> {
    let ns: Vec<f64> = reports.iter().map(|r| r.n as f64).collect();
    let mut out = vec![("norm".to_string(), slope(&ns, reports.iter().map(|r| r.norm).collect()))];
    if let Some(first) = reports.first() {
        for (k, e) in first.entries.iter().enumerate() {
            let ys = reports.iter().map(|r| r.entries.get(k).map_or(f64::NAN, |x| x.value)).collect();
            out.push((e.diagram.clone(), slope(&ns, ys)));
        }
    }
    out
}

fn slope(xs: &[f64], ys: Vec<f64>) -> Option<f64> {
    if ys.iter().any(|&y| !(y > 0.0)) {
        return None;
    }
    loglog_slope(xs, &ys)
}
