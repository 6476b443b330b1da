//! Variable-elimination contraction of a labeled multigraph.

use crate::diagrams::Diagram;
use crate::error::{Result, TampError};
use crate::matrix::{gemm_tn, Matrix};

use super::{EdgeLabeling, EvalResult};

/// A dense table over a sorted list of vertex variables, row-major with the
/// first variable slowest.
#[derive(Clone, Debug)]
struct Factor {
    vars: Vec<usize>,
    data: Vec<f64>,
}

impl Factor {
    fn scalar(v: f64) -> Self {
        Factor { vars: Vec::new(), data: vec![v] }
    }
}

/// Default budget: `max(8 n^3 (|V| + 1), 1e7)` floating-point operations.
pub fn default_budget(n: usize, d: &Diagram) -> f64 {
    let n = n as f64;
    (8.0 * n * n * n * (d.vertex_count() as f64 + 1.0)).max(1e7)
}

pub(crate) fn contract(d: &Diagram, labels: &EdgeLabeling<'_>, budget: f64) -> Result<EvalResult> {
    let n = labels.dim();
    let nv = d.vertex_count();
    let mut factors: Vec<Factor> = Vec::with_capacity(d.edge_count());
    for (e, &(a, b)) in d.edges().iter().enumerate() {
        let m = labels.get(e);
        if a == b {
            factors.push(Factor { vars: vec![a], data: m.diag() });
        } else {
            // stored as (a, b) with a < b, entry [phi(a), phi(b)]
            factors.push(Factor { vars: vec![a, b], data: m.as_slice().to_vec() });
        }
    }
    for w in labels.vertex_weights() {
        factors.push(Factor { vars: vec![w.0], data: w.1.clone() });
    }
    factors = merge_same_scope(factors);

    let roots: Vec<usize> = d.roots().to_vec();
    let mut remaining: Vec<usize> = (0..nv).filter(|v| !roots.contains(v)).collect();
    let mut scalar = 1.0;
    let mut spent = 0.0;

    while !remaining.is_empty() {
        // greedy minimum degree, ties to the lowest vertex id
        let (pos, x) = remaining
            .iter()
            .enumerate()
            .map(|(i, &v)| (neighbour_count(&factors, v), i, v))
            .min()
            .map(|(_, i, v)| (i, v))
            .expect("nonempty");
        remaining.remove(pos);
        let (touching, rest): (Vec<Factor>, Vec<Factor>) = factors.into_iter().partition(|f| f.vars.contains(&x));
        factors = rest;
        if touching.is_empty() {
            // free vertex: sums to n
            scalar *= n as f64;
            continue;
        }
        let (f, cost) = eliminate(x, touching, n, budget - spent)?;
        spent += cost;
        if f.vars.is_empty() {
            scalar *= f.data[0];
        } else {
            factors.push(f);
            factors = merge_same_scope(factors);
        }
    }

    // only root variables (and scalars) remain
    for f in factors.iter().filter(|f| f.vars.is_empty()) {
        scalar *= f.data[0];
    }
    let factors: Vec<Factor> = factors.into_iter().filter(|f| !f.vars.is_empty()).collect();
    match roots.as_slice() {
        [] => Ok(EvalResult::Scalar(scalar)),
        [r] => {
            let mut v = vec![scalar; n];
            for f in &factors {
                debug_assert_eq!(f.vars, vec![*r]);
                for (x, y) in v.iter_mut().zip(&f.data) {
                    *x *= y;
                }
            }
            Ok(EvalResult::Vector(v))
        }
        [r1, r2] if r1 == r2 => {
            let mut v = vec![scalar; n];
            for f in &factors {
                for (x, y) in v.iter_mut().zip(&f.data) {
                    *x *= y;
                }
            }
            Ok(EvalResult::Matrix(Matrix::from_diag(&v)))
        }
        [r1, r2] => {
            let mut m = Matrix::filled(n, n, scalar);
            let lo = *r1.min(r2);
            for f in &factors {
                let s = m.as_mut_slice();
                match f.vars.as_slice() {
                    [v] if *v == lo => {
                        for i in 0..n {
                            for j in 0..n {
                                s[i * n + j] *= f.data[i];
                            }
                        }
                    }
                    [_] => {
                        for i in 0..n {
                            for j in 0..n {
                                s[i * n + j] *= f.data[j];
                            }
                        }
                    }
                    _ => {
                        for (x, y) in s.iter_mut().zip(&f.data) {
                            *x *= y;
                        }
                    }
                }
            }
            // the table is indexed [lo, hi]; the result is [roots[0], roots[1]]
            if r1 > r2 {
                m = m.transpose();
            }
            Ok(EvalResult::Matrix(m))
        }
        _ => unreachable!("at most two roots"),
    }
}

fn neighbour_count(factors: &[Factor], v: usize) -> usize {
    let mut nb: Vec<usize> =
        factors.iter().filter(|f| f.vars.contains(&v)).flat_map(|f| f.vars.iter().copied()).filter(|&w| w != v).collect();
    nb.sort_unstable();
    nb.dedup();
    nb.len()
}

/// Multiply factors with identical scopes entrywise.
fn merge_same_scope(mut factors: Vec<Factor>) -> Vec<Factor> {
    factors.sort_by(|a, b| a.vars.cmp(&b.vars));
    let mut out: Vec<Factor> = Vec::with_capacity(factors.len());
    for f in factors {
        match out.last_mut() {
            Some(last) if last.vars == f.vars => {
                for (x, y) in last.data.iter_mut().zip(&f.data) {
                    *x *= y;
                }
            }
            _ => out.push(f),
        }
    }
    out
}

/// Sum out `x` from the product of `touching`. Returns the new factor and its flop count.
fn eliminate(x: usize, touching: Vec<Factor>, n: usize, budget: f64) -> Result<(Factor, f64)> {
    let mut scope: Vec<usize> = touching.iter().flat_map(|f| f.vars.iter().copied()).filter(|&v| v != x).collect();
    scope.sort_unstable();
    scope.dedup();
    let nf = n as f64;

    // unary part on x, and binary parts (x, y) oriented with x as the row
    let mut unary = vec![1.0; n];
    let mut binary: Vec<(usize, Matrix)> = Vec::new();
    let mut simple = true;
    for f in &touching {
        match f.vars.len() {
            1 => {
                for (u, v) in unary.iter_mut().zip(&f.data) {
                    *u *= v;
                }
            }
            2 => {
                let y = if f.vars[0] == x { f.vars[1] } else { f.vars[0] };
                let mut m = Matrix::from_vec(n, n, f.data.clone()).expect("square table");
                if f.vars[0] != x {
                    m = m.transpose();
                }
                binary.push((y, m));
            }
            _ => simple = false,
        }
    }

    if simple && scope.is_empty() {
        return Ok((Factor::scalar(unary.iter().sum()), nf));
    }
    if simple && scope.len() == 1 {
        // r[y] = sum_x unary[x] * M[x, y]
        let mut out = vec![0.0; n];
        for (_, m) in &binary {
            debug_assert!(binary.len() == 1);
            for (xi, &u) in unary.iter().enumerate() {
                if u == 0.0 {
                    continue;
                }
                for (o, v) in out.iter_mut().zip(m.row(xi)) {
                    *o += u * v;
                }
            }
        }
        return Ok((Factor { vars: scope, data: out }, 2.0 * nf * nf));
    }
    if simple && scope.len() == 2 && binary.len() == 2 {
        // R[y, z] = sum_x My[x, y] unary[x] Mz[x, z]
        let cost = 2.0 * nf * nf * nf;
        if cost > budget {
            return Err(TampError::Budget { need: cost, budget });
        }
        let (mut first, mut second) = (binary[0].clone(), binary[1].clone());
        if first.0 > second.0 {
            std::mem::swap(&mut first, &mut second);
        }
        let scaled = first.1.scale_rows_cols(&unary, &vec![1.0; n]);
        let r = gemm_tn(&scaled, &second.1);
        return Ok((Factor { vars: scope, data: r.into_vec() }, cost));
    }
    generic(x, &touching, &scope, n, budget)
}

fn generic(x: usize, touching: &[Factor], scope: &[usize], n: usize, budget: f64) -> Result<(Factor, f64)> {
    let mut all = scope.to_vec();
    all.push(x);
    let k = all.len();
    let total = (n as f64).powi(k as i32);
    let cost = total * touching.len() as f64;
    if cost > budget {
        return Err(TampError::Budget { need: cost, budget });
    }
    // strides of each factor's variables within the `all` odometer
    let positions: Vec<Vec<usize>> = touching
        .iter()
        .map(|f| f.vars.iter().map(|v| all.iter().position(|w| w == v).expect("in scope")).collect())
        .collect();
    let out_len = n.pow(scope.len() as u32);
    let mut out = vec![0.0; out_len];
    let mut idx = vec![0usize; k];
    for cell in 0..out_len {
        // decode cell into idx[0..k-1]
        let mut c = cell;
        for p in (0..k - 1).rev() {
            idx[p] = c % n;
            c /= n;
        }
        let mut acc = 0.0;
        for xi in 0..n {
            idx[k - 1] = xi;
            let mut prod = 1.0;
            for (f, pos) in touching.iter().zip(&positions) {
                let mut off = 0;
                for &p in pos {
                    off = off * n + idx[p];
                }
                prod *= f.data[off];
                if prod == 0.0 {
                    break;
                }
            }
            acc += prod;
        }
        out[cell] = acc;
    }
    Ok((Factor { vars: scope.to_vec(), data: out }, cost))
}
