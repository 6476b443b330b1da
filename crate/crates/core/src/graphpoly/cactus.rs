//! Structured evaluation of cactus and open-cactus diagrams by matrix chains.

use crate::diagrams::{bridge_path, bridges, classify, is_open_cactus, CycleBlocks, Diagram};
use crate::error::{precondition, Result};
use crate::matrix::Matrix;

struct CactusView<'a> {
    d: &'a Diagram,
    cb: CycleBlocks,
    a: &'a Matrix,
}

impl<'a> CactusView<'a> {
    fn new(d: &'a Diagram, a: &'a Matrix) -> Self {
        CactusView { d, cb: CycleBlocks::new(d), a }
    }

    /// Product over the cycle blocks at `v` (except `exclude`) of their rooted values.
    fn hanging(&self, v: usize, exclude: Option<usize>) -> Vec<f64> {
        let n = self.a.rows();
        let mut out = vec![1.0; n];
        for &b in &self.cb.at[v] {
            if Some(b) == exclude {
                continue;
            }
            let contrib = if self.cb.blocks[b].edges.len() == 1 {
                self.a.diag()
            } else {
                let seq = self.cb.cycle_order(self.d, b, v);
                let ds: Vec<Vec<f64>> = seq[1..].iter().map(|&c| self.hanging(c, Some(b))).collect();
                diag_of_chain(self.a, &ds)
            };
            out.iter_mut().zip(&contrib).for_each(|(o, c)| *o *= c);
        }
        out
    }
}

/// `diag(A D_1 A D_2 ... A D_k A)` for `k >= 1`.
fn diag_of_chain(a: &Matrix, ds: &[Vec<f64>]) -> Vec<f64> {
    let n = a.rows();
    let mut p = a.clone();
    for d in &ds[..ds.len() - 1] {
        let ones = vec![1.0; n];
        p = p.scale_rows_cols(&ones, d).matmul(a).expect("square");
    }
    let last = &ds[ds.len() - 1];
    (0..n)
        .map(|i| {
            let row = p.row(i);
            (0..n).map(|k| row[k] * last[k] * a.get(k, i)).sum()
        })
        .collect()
}

/// `W_d(A)` for an open cactus `d` with roots `(s, t)`: the alternating product
/// `diag(h_1) A diag(h_2) A ... A diag(h_k)` along the base path, where `h_i`
/// is the value of the cactuses hanging at the i-th path vertex.
pub fn eval_open_cactus_matrix(d: &Diagram, a: &Matrix) -> Result<Matrix> {
    a.dim()?;
    if !is_open_cactus(d) {
        return precondition("eval_open_cactus_matrix needs an open cactus");
    }
    let (s, t) = (d.roots()[0], d.roots()[1]);
    let br = bridges(d);
    let path_edges = bridge_path(d, &br, s, t).expect("open cactus has a base path");
    let mut path = vec![s];
    for &e in &path_edges {
        let (x, y) = d.edges()[e];
        let last = *path.last().expect("nonempty");
        path.push(if x == last { y } else { x });
    }
    let view = CactusView::new(d, a);
    let hs: Vec<Vec<f64>> = path.iter().map(|&u| view.hanging(u, None)).collect();
    let n = a.rows();
    let ones = vec![1.0; n];
    let mut p = a.scale_rows_cols(&hs[0], &ones);
    for h in &hs[1..hs.len() - 1] {
        p = p.scale_rows_cols(&ones, h).matmul(a)?;
    }
    Ok(p.scale_rows_cols(&ones, &hs[hs.len() - 1]))
}

/// `w_σ(A)` for a rooted cactus `σ` through the cycle recursion.
pub fn rooted_cactus_vector(d: &Diagram, a: &Matrix) -> Result<Vec<f64>> {
    a.dim()?;
    let Some(r) = d.root() else {
        return precondition("rooted_cactus_vector needs a vector diagram");
    };
    if !classify(d).cactus {
        return precondition("rooted_cactus_vector needs a cactus");
    }
    Ok(CactusView::new(d, a).hanging(r, None))
}
