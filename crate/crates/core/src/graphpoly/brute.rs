//! Literal nested-loop evaluation, the reference for the contraction engine.

use crate::diagrams::Diagram;
use crate::error::{Result, TampError};
use crate::matrix::Matrix;
use crate::stats::KahanSum;

use super::{EdgeLabeling, EvalResult};

pub const BRUTE_BUDGET: f64 = 1e8;

pub fn eval_w_brute(d: &Diagram, labels: &EdgeLabeling<'_>) -> Result<EvalResult> {
    enumerate(d, labels, false)
}

/// Sum over injective labelings only.
pub fn eval_z_brute(d: &Diagram, labels: &EdgeLabeling<'_>) -> Result<EvalResult> {
    enumerate(d, labels, true)
}

fn enumerate(d: &Diagram, labels: &EdgeLabeling<'_>, injective: bool) -> Result<EvalResult> {
    labels.check(d)?;
    let n = labels.dim();
    let nv = d.vertex_count();
    let terms = (n as f64).powi(nv as i32);
    if terms > BRUTE_BUDGET {
        return Err(TampError::Budget { need: terms, budget: BRUTE_BUDGET });
    }
    let cells = match d.roots().len() {
        0 => 1,
        1 => n,
        _ => n * n,
    };
    let mut acc = vec![KahanSum::new(); cells];
    let mut phi = vec![0usize; nv];
    let mut used = vec![0u32; n];
    loop {
        let ok = !injective || {
            used.iter_mut().for_each(|u| *u = 0);
            phi.iter().all(|&i| {
                used[i] += 1;
                used[i] == 1
            })
        };
        if ok {
            let mut prod = 1.0;
            for (e, &(a, b)) in d.edges().iter().enumerate() {
                prod *= labels.get(e).get(phi[a], phi[b]);
            }
            for (v, w) in labels.vertex_weights() {
                prod *= w[phi[*v]];
            }
            let cell = match d.roots() {
                [] => 0,
                [r] => phi[*r],
                [r1, r2] => phi[*r1] * n + phi[*r2],
                _ => unreachable!(),
            };
            acc[cell].add(prod);
        }
        // odometer
        let mut k = 0;
        loop {
            if k == nv {
                return Ok(finish(d, n, &acc));
            }
            phi[k] += 1;
            if phi[k] < n {
                break;
            }
            phi[k] = 0;
            k += 1;
        }
    }
}

fn finish(d: &Diagram, n: usize, acc: &[KahanSum]) -> EvalResult {
    let vals: Vec<f64> = acc.iter().map(|k| k.value()).collect();
    match d.roots().len() {
        0 => EvalResult::Scalar(vals[0]),
        1 => EvalResult::Vector(vals),
        _ => EvalResult::Matrix(Matrix::from_vec(n, n, vals).expect("n*n cells")),
    }
}
