use crate::diagrams::Diagram;
use crate::error::{invalid, Result, TampError};
use crate::graphpoly::{eval_z, EdgeLabeling};
use crate::matrix::Matrix;

/// Largest cycle length `t − s` of an exact Onsager vector.
pub const MAX_ONSAGER_WINDOW: usize = 5;

fn check(a: &Matrix, fprimes: &[Vec<f64>], s: usize, t: usize) -> Result<usize> {
    let n = a.dim()?;
    if t <= s {
        return invalid(format!("onsager window needs s < t, got s = {s}, t = {t}"));
    }
    let k = t - s;
    if k > MAX_ONSAGER_WINDOW {
        return Err(TampError::Size { what: "Onsager window", got: k, cap: MAX_ONSAGER_WINDOW });
    }
    for r in s + 1..t {
        let Some(w) = fprimes.get(r) else {
            return invalid(format!("missing derivative vector for iterate {r}"));
        };
        if w.len() != n {
            return Err(TampError::Dimension { expected: n, got: w.len() });
        }
    }
    Ok(k)
}

/// `b_{s,t}[i] = Σ_{i_s = i, i_s..i_{t−1} distinct} Π_{r=s+1}^{t−1} A[i_{r−1}, i_r] f′_r[i_r] · A[i_{t−1}, i_s]`,
/// the injective evaluation of the rooted `(t−s)`-cycle whose `r`-th vertex
/// carries `f′_r`. `fprimes[r]` holds `f′_r`.
pub fn onsager_b(a: &Matrix, fprimes: &[Vec<f64>], s: usize, t: usize) -> Result<Vec<f64>> {
    let k = check(a, fprimes, s, t)?;
    if k == 1 {
        return Ok(a.diag());
    }
    let d = Diagram::cycle(k).rooted_at(0);
    let mut labels = EdgeLabeling::uniform(a)?;
    for r in s + 1..t {
        labels = labels.with_vertex_weight(r - s, fprimes[r].clone())?;
    }
    let z = eval_z(&d, &labels)?;
    Ok(z.as_vector().expect("rooted diagram").to_vec())
}

/// Direct enumeration over distinct index tuples; `O(n^{t−s})`.
pub fn onsager_b_brute(a: &Matrix, fprimes: &[Vec<f64>], s: usize, t: usize) -> Result<Vec<f64>> {
    let k = check(a, fprimes, s, t)?;
    let n = a.rows();
    let weights: Vec<&[f64]> = (s + 1..t).map(|r| fprimes[r].as_slice()).collect();
    let mut out = vec![0.0; n];
    let mut path = Vec::with_capacity(k);
    for (i, o) in out.iter_mut().enumerate() {
        path.clear();
        path.push(i);
        *o = walk(a, &weights, &mut path, 1.0, k);
    }
    Ok(out)
}

fn walk(a: &Matrix, weights: &[&[f64]], path: &mut Vec<usize>, acc: f64, k: usize) -> f64 {
    let last = *path.last().expect("nonempty");
    if path.len() == k {
        return acc * a.get(last, path[0]);
    }
    let w = weights[path.len() - 1];
    let mut total = 0.0;
    for j in 0..a.rows() {
        if path.contains(&j) {
            continue;
        }
        path.push(j);
        total += walk(a, weights, path, acc * a.get(last, j) * w[j], k);
        path.pop();
    }
    total
}
