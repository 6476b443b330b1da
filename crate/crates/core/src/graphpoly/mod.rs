//! Evaluation of w- and z-basis graph polynomials on concrete matrices.
//!
//! `w_d(A)` sums `Π_{(u,v)∈E} A[φ(u), φ(v)]` over every labeling `φ` of the
//! vertices with `[n]`, keeping root labels as free indices; `z_d(A)` restricts
//! to injective labelings. Edge `(u, v)` is stored with `u ≤ v` and reads
//! `A[φ(u), φ(v)]`, so non-symmetric labels follow that orientation.

mod brute;
mod cactus;
mod engine;

use crate::diagrams::{
    classify, for_each_set_partition, quotient, z_to_w_coefficients, Diagram, VertexPartition,
};
use crate::error::{precondition, Result, TampError};
use crate::matrix::Matrix;

pub use brute::{eval_w_brute, eval_z_brute, BRUTE_BUDGET};
pub use cactus::{eval_open_cactus_matrix, rooted_cactus_vector};
pub use engine::default_budget;

/// Matrices attached to the edges of a diagram, plus optional vertex weights.
#[derive(Clone, Debug)]
pub struct EdgeLabeling<'a> {
    n: usize,
    kind: LabelKind<'a>,
    weights: Vec<(usize, Vec<f64>)>,
}

#[derive(Clone, Debug)]
enum LabelKind<'a> {
    Uniform(&'a Matrix),
    PerEdge(Vec<&'a Matrix>),
}

impl<'a> EdgeLabeling<'a> {
    pub fn uniform(a: &'a Matrix) -> Result<Self> {
        let n = a.dim()?;
        Ok(EdgeLabeling { n, kind: LabelKind::Uniform(a), weights: Vec::new() })
    }

    pub fn per_edge(ms: Vec<&'a Matrix>) -> Result<Self> {
        let Some(first) = ms.first() else {
            return Err(TampError::InvalidInput("per-edge labeling needs at least one matrix".into()));
        };
        let n = first.dim()?;
        for m in &ms {
            if m.dim()? != n {
                return Err(TampError::Dimension { expected: n, got: m.rows() });
            }
        }
        Ok(EdgeLabeling { n, kind: LabelKind::PerEdge(ms), weights: Vec::new() })
    }

    /// Multiply the summand by `w[φ(v)]`.
    pub fn with_vertex_weight(mut self, v: usize, w: Vec<f64>) -> Result<Self> {
        if w.len() != self.n {
            return Err(TampError::Dimension { expected: self.n, got: w.len() });
        }
        self.weights.push((v, w));
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, e: usize) -> &'a Matrix {
        match &self.kind {
            LabelKind::Uniform(a) => a,
            LabelKind::PerEdge(ms) => ms[e],
        }
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self.kind, LabelKind::Uniform(_)) && self.weights.is_empty()
    }

    pub(crate) fn vertex_weights(&self) -> &[(usize, Vec<f64>)] {
        &self.weights
    }

    fn check(&self, d: &Diagram) -> Result<()> {
        if let LabelKind::PerEdge(ms) = &self.kind {
            if ms.len() != d.edge_count() {
                return Err(TampError::Dimension { expected: d.edge_count(), got: ms.len() });
            }
        }
        for (v, _) in &self.weights {
            if *v >= d.vertex_count() {
                return Err(TampError::InvalidInput(format!("vertex weight on missing vertex {v}")));
            }
        }
        Ok(())
    }

    /// The same labels viewed on a quotient: edges keep their matrices and the
    /// weights of merged vertices multiply.
    fn on_quotient(&self, labels: &[usize]) -> EdgeLabeling<'a> {
        let mut merged: Vec<(usize, Vec<f64>)> = Vec::new();
        for (v, w) in &self.weights {
            let b = labels[*v];
            match merged.iter_mut().find(|(u, _)| *u == b) {
                Some((_, acc)) => acc.iter_mut().zip(w).for_each(|(a, x)| *a *= x),
                None => merged.push((b, w.clone())),
            }
        }
        EdgeLabeling { n: self.n, kind: self.kind.clone(), weights: merged }
    }
}

/// Scalar, vector or matrix value according to the number of roots.
#[derive(Clone, Debug, PartialEq)]
pub enum EvalResult {
    Scalar(f64),
    Vector(Vec<f64>),
    Matrix(Matrix),
}

impl EvalResult {
    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            EvalResult::Scalar(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_vector(&self) -> Option<&[f64]> {
        match self {
            EvalResult::Vector(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_matrix(&self) -> Option<&Matrix> {
        match self {
            EvalResult::Matrix(m) => Some(m),
            _ => None,
        }
    }

    fn values(&self) -> &[f64] {
        match self {
            EvalResult::Scalar(x) => std::slice::from_ref(x),
            EvalResult::Vector(v) => v,
            EvalResult::Matrix(m) => m.as_slice(),
        }
    }

    fn values_mut(&mut self) -> &mut [f64] {
        match self {
            EvalResult::Scalar(x) => std::slice::from_mut(x),
            EvalResult::Vector(v) => v,
            EvalResult::Matrix(m) => m.as_mut_slice(),
        }
    }

    /// Largest entrywise difference; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &EvalResult) -> f64 {
        let (a, b) = (self.values(), other.values());
        if std::mem::discriminant(self) != std::mem::discriminant(other) || a.len() != b.len() {
            return f64::INFINITY;
        }
        a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.values().iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    fn zeros_like(&self) -> EvalResult {
        let mut z = self.clone();
        z.values_mut().iter_mut().for_each(|x| *x = 0.0);
        z
    }

    fn axpy(&mut self, c: f64, other: &EvalResult) {
        for (x, y) in self.values_mut().iter_mut().zip(other.values()) {
            *x += c * y;
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct EvalOptions {
    /// Flop budget for contraction; `None` uses [`default_budget`].
    pub budget: Option<f64>,
}

/// `w_d` by greedy minimum-degree variable elimination.
pub fn eval_w(d: &Diagram, labels: &EdgeLabeling<'_>) -> Result<EvalResult> {
    eval_w_with(d, labels, EvalOptions::default())
}

pub fn eval_w_with(d: &Diagram, labels: &EdgeLabeling<'_>, opts: EvalOptions) -> Result<EvalResult> {
    labels.check(d)?;
    let budget = opts.budget.unwrap_or_else(|| default_budget(labels.dim(), d));
    engine::contract(d, labels, budget)
}

/// Convenience wrapper: every edge labeled by `a`.
pub fn eval_w_uniform(d: &Diagram, a: &Matrix) -> Result<EvalResult> {
    eval_w(d, &EdgeLabeling::uniform(a)?)
}

/// `z_d` by Möbius inversion over vertex partitions, each term evaluated by [`eval_w`].
pub fn eval_z(d: &Diagram, labels: &EdgeLabeling<'_>) -> Result<EvalResult> {
    labels.check(d)?;
    if labels.is_uniform() {
        let coeffs = z_to_w_coefficients(d)?;
        let mut acc: Option<EvalResult> = None;
        for (alpha, c) in coeffs.iter() {
            let w = eval_w(alpha, labels)?;
            let a = acc.get_or_insert_with(|| w.zeros_like());
            a.axpy(c as f64, &w);
        }
        return Ok(acc.expect("the diagram itself has coefficient 1"));
    }
    eval_z_by_partitions(d, labels)
}

pub fn eval_z_uniform(d: &Diagram, a: &Matrix) -> Result<EvalResult> {
    eval_z(d, &EdgeLabeling::uniform(a)?)
}

/// `z_d = Σ_P μ(0̂, P) w_{d_P}` with `μ(0̂, P) = Π_b (-1)^{|b|-1} (|b|-1)!`;
/// edges keep their own labels through the quotient.
pub(crate) fn eval_z_by_partitions(d: &Diagram, labels: &EdgeLabeling<'_>) -> Result<EvalResult> {
    let mut acc: Option<EvalResult> = None;
    let mut err = None;
    for_each_set_partition(d.vertex_count(), |rgs, blocks| {
        if err.is_some() {
            return;
        }
        let mut sizes = vec![0usize; blocks];
        for &b in rgs {
            sizes[b] += 1;
        }
        let mu: f64 = sizes.iter().map(|&s| mobius_block(s)).product();
        let q = quotient(d, &VertexPartition::from_labels(rgs)).expect("partition sized to the diagram");
        match eval_w(&q, &labels.on_quotient(rgs)) {
            Ok(w) => acc.get_or_insert_with(|| w.zeros_like()).axpy(mu, &w),
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(acc.expect("at least one partition"))
}

/// `(-1)^{s-1} (s-1)!`
pub(crate) fn mobius_block(s: usize) -> f64 {
    let f: f64 = (1..s).map(|k| k as f64).product();
    if s % 2 == 1 {
        f
    } else {
        -f
    }
}

/// `w_d` restricted to `φ(s) ≠ φ(t)`, as `w_d - w_{d with s, t merged}`.
pub fn eval_w_neq(d: &Diagram, labels: &EdgeLabeling<'_>, s: usize, t: usize) -> Result<EvalResult> {
    if s == t {
        return precondition("eval_w_neq needs two distinct vertices");
    }
    if s >= d.vertex_count() || t >= d.vertex_count() {
        return Err(TampError::InvalidInput(format!("vertices ({s},{t}) out of range")));
    }
    let mut blocks: Vec<Vec<usize>> = vec![vec![s.min(t), s.max(t)]];
    blocks.extend((0..d.vertex_count()).filter(|&v| v != s && v != t).map(|v| vec![v]));
    let p = VertexPartition::from_blocks(d.vertex_count(), &blocks)?;
    let merged = quotient(d, &p)?;
    let mut w = eval_w(d, labels)?;
    let m = eval_w(&merged, &labels.on_quotient(p.labels()))?;
    w.axpy(-1.0, &m);
    Ok(w)
}

/// Both sides of the fundamental bound `|w|/n`, `‖w‖_∞` or `‖W‖` versus `Π_e ‖A_e‖`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn fundamental_bound_audit(d: &Diagram, labels: &EdgeLabeling<'_>) -> Result<BoundReport> {
    if !classify(d).two_edge_connected {
        return precondition("the fundamental bound applies to 2-edge-connected diagrams");
    }
    let w = eval_w(d, labels)?;
    let lhs = match &w {
        EvalResult::Scalar(x) => x.abs() / labels.dim() as f64,
        EvalResult::Vector(v) => v.iter().fold(0.0f64, |m, x| m.max(x.abs())),
        EvalResult::Matrix(m) => m.spectral_norm(),
    };
    let mut norms: Vec<(usize, f64)> = Vec::new();
    let mut rhs = 1.0;
    for e in 0..d.edge_count() {
        let m = labels.get(e);
        let key = m as *const Matrix as usize;
        let nrm = match norms.iter().find(|(k, _)| *k == key) {
            Some((_, v)) => *v,
            None => {
                let v = m.spectral_norm();
                norms.push((key, v));
                v
            }
        };
        rhs *= nrm;
    }
    Ok(BoundReport { lhs, rhs, holds: lhs <= rhs * (1.0 + 1e-9) })
}
