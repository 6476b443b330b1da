use rand::Rng;
use rand_distr::StandardNormal;

use crate::matrix::{dot, gemm_into, gemm_nt, Matrix};

const PANEL: usize = 64;

/// `k` orthonormal rows in `R^n` spanning a Haar-distributed subspace: the
/// first `k` columns of the Q factor (positive R diagonal) of an iid Gaussian
/// matrix, stored transposed.
pub fn haar_frame<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Matrix {
    assert!(k <= n);
    let mut q = Matrix::from_fn(k, n, |_, _| rng.sample(StandardNormal));
    let mut start = 0;
    while start < k {
        let end = (start + PANEL).min(k);
        if start > 0 {
            let done = Matrix::from_vec(start, n, q.as_slice()[..start * n].to_vec()).expect("shape");
            let mut panel = Matrix::from_vec(end - start, n, q.as_slice()[start * n..end * n].to_vec()).expect("shape");
            // two passes of block classical Gram-Schmidt against finished rows
            for _ in 0..2 {
                let c = gemm_nt(&panel, &done);
                gemm_into(-1.0, &c, &done, 1.0, &mut panel);
            }
            q.as_mut_slice()[start * n..end * n].copy_from_slice(panel.as_slice());
        }
        for j in start..end {
            orthonormalize_row(&mut q, start, j, n);
        }
        start = end;
    }
    q
}

/// CGS2 of row `j` against rows `from..j`, then normalization. Gram-Schmidt
/// produces a positive R diagonal by construction.
fn orthonormalize_row(q: &mut Matrix, from: usize, j: usize, n: usize) {
    let data = q.as_mut_slice();
    let (head, tail) = data.split_at_mut(j * n);
    let row = &mut tail[..n];
    for _ in 0..2 {
        for i in from..j {
            let prev = &head[i * n..(i + 1) * n];
            let c = dot(prev, row);
            for (x, p) in row.iter_mut().zip(prev) {
                *x -= c * p;
            }
        }
    }
    let norm = dot(row, row).sqrt();
    for x in row.iter_mut() {
        *x /= norm;
    }
}

/// Haar-distributed orthogonal matrix.
pub fn haar_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    haar_frame(n, n, rng).transpose()
}

/// `Σ_j λ_j v_j v_jᵀ` over the rows `v_j` of `frame`, symmetrized exactly.
pub fn frame_quadratic(frame: &Matrix, lambda: &[f64]) -> Matrix {
    let n = frame.cols();
    let scaled = Matrix::from_fn(frame.rows(), n, |j, i| lambda[j] * frame.get(j, i));
    let mut m = crate::matrix::gemm_tn(&scaled, frame);
    mirror_upper(&mut m);
    m
}

/// Copy the upper triangle onto the lower one.
pub(crate) fn mirror_upper(m: &mut Matrix) {
    let n = m.rows();
    for i in 0..n {
        for j in 0..i {
            let v = m.get(j, i);
            m.set(i, j, v);
        }
    }
}
