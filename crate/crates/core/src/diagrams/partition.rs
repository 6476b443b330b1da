use crate::error::{invalid, Result};

use super::Diagram;

/// A partition of `{0, .., n-1}` stored as a restricted growth string:
/// `block_of[v]` is the block of `v`, blocks numbered by first appearance.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexPartition {
    block_of: Vec<usize>,
    block_count: usize,
}

impl VertexPartition {
    pub fn discrete(n: usize) -> Self {
        VertexPartition { block_of: (0..n).collect(), block_count: n }
    }

    pub fn single_block(n: usize) -> Self {
        VertexPartition { block_of: vec![0; n], block_count: n.min(1) }
    }

    /// From explicit blocks, which must be disjoint, nonempty and cover `0..n`.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut label = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return invalid("empty block in partition");
            }
            for &v in block {
                if v >= n {
                    return invalid(format!("vertex {v} out of range in partition of {n}"));
                }
                if label[v] != usize::MAX {
                    return invalid(format!("vertex {v} appears in two blocks"));
                }
                label[v] = b;
            }
        }
        if let Some(v) = label.iter().position(|&l| l == usize::MAX) {
            return invalid(format!("partition does not cover vertex {v}"));
        }
        Ok(Self::from_labels(&label))
    }

    /// From arbitrary block labels; relabels to first-appearance order.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let mut block_of = Vec::with_capacity(labels.len());
        for &l in labels {
            let next = map.len();
            block_of.push(*map.entry(l).or_insert(next));
        }
        VertexPartition { block_count: map.len(), block_of }
    }

    pub fn len(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_of.is_empty()
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    pub fn block_of(&self, v: usize) -> usize {
        self.block_of[v]
    }

    pub fn labels(&self) -> &[usize] {
        &self.block_of
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.block_count];
        for (v, &b) in self.block_of.iter().enumerate() {
            out[b].push(v);
        }
        out
    }

    pub fn is_discrete(&self) -> bool {
        self.block_count == self.block_of.len()
    }
}

/// Call `f` on every set partition of `{0, .., n-1}` as a restricted growth string.
pub fn for_each_set_partition(n: usize, mut f: impl FnMut(&[usize], usize)) {
    if n == 0 {
        f(&[], 0);
        return;
    }
    let mut rgs = vec![0usize; n];
    // max_prefix[i] = max(rgs[0..i])
    let mut max_prefix = vec![0usize; n];
    loop {
        let blocks = max_prefix[n - 1].max(rgs[n - 1]) + 1;
        f(&rgs, blocks);
        // advance: find rightmost position that can be incremented
        let mut i = n - 1;
        loop {
            if i == 0 {
                return;
            }
            if rgs[i] <= max_prefix[i] {
                rgs[i] += 1;
                break;
            }
            i -= 1;
        }
        for j in i + 1..n {
            rgs[j] = 0;
            max_prefix[j] = max_prefix[j - 1].max(rgs[j - 1]);
        }
    }
}

pub fn set_partitions(n: usize) -> Vec<VertexPartition> {
    let mut out = Vec::new();
    for_each_set_partition(n, |rgs, k| out.push(VertexPartition { block_of: rgs.to_vec(), block_count: k }));
    out
}

/// Identify the vertices in each block; every edge is kept and roots follow
/// their blocks.
pub fn quotient(d: &Diagram, p: &VertexPartition) -> Result<Diagram> {
    if p.len() != d.vertex_count() {
        return invalid(format!("partition of {} elements for a diagram with {} vertices", p.len(), d.vertex_count()));
    }
    Ok(quotient_by_labels(d, p.labels(), p.block_count()))
}

pub(crate) fn quotient_by_labels(d: &Diagram, labels: &[usize], blocks: usize) -> Diagram {
    let edges = d.edges().iter().map(|&(a, b)| (labels[a], labels[b])).collect();
    let roots = d.roots().iter().map(|&r| labels[r]).collect();
    Diagram::new_unchecked(blocks.max(1), edges, roots)
}
