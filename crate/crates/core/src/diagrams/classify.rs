use serde::{Deserialize, Serialize};

use crate::error::{invalid, precondition, Result};

use super::Diagram;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramClass {
    pub connected: bool,
    pub two_edge_connected: bool,
    pub cactus: bool,
    /// Every vertex has even degree.
    pub eulerian: bool,
    /// Single-rooted tree of bridges with cactuses hanging off it.
    pub treelike: bool,
    /// Treelike with exactly one bridge at the root.
    pub gaussian_tree: bool,
}

/// A biconnected block: a loop, a bridge, or a 2-vertex-connected piece.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Block {
    pub fn is_cycle(&self) -> bool {
        self.edges.len() == self.vertices.len()
    }
}

/// Component index per vertex and the number of components.
pub fn connected_components(d: &Diagram) -> (Vec<usize>, usize) {
    let n = d.vertex_count();
    let inc = d.incidence();
    let mut comp = vec![usize::MAX; n];
    let mut count = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = count;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &(_, w) in &inc[u] {
                if comp[w] == usize::MAX {
                    comp[w] = count;
                    stack.push(w);
                }
            }
        }
        count += 1;
    }
    (comp, count)
}

struct Dfs<'a> {
    inc: &'a [Vec<(usize, usize)>],
    edges: &'a [(usize, usize)],
    disc: Vec<usize>,
    low: Vec<usize>,
    time: usize,
    stack: Vec<usize>,
    blocks: Vec<Block>,
    bridges: Vec<usize>,
}

impl Dfs<'_> {
    fn visit(&mut self, u: usize, parent_edge: Option<usize>) {
        self.disc[u] = self.time;
        self.low[u] = self.time;
        self.time += 1;
        for k in 0..self.inc[u].len() {
            let (e, w) = self.inc[u][k];
            if Some(e) == parent_edge || w == u {
                continue;
            }
            if self.disc[w] == usize::MAX {
                self.stack.push(e);
                self.visit(w, Some(e));
                self.low[u] = self.low[u].min(self.low[w]);
                if self.low[w] > self.disc[u] {
                    self.bridges.push(e);
                }
                if self.low[w] >= self.disc[u] {
                    let mut edges = Vec::new();
                    while let Some(f) = self.stack.pop() {
                        edges.push(f);
                        if f == e {
                            break;
                        }
                    }
                    let mut vertices: Vec<usize> =
                        edges.iter().flat_map(|&f| [self.edges[f].0, self.edges[f].1]).collect();
                    vertices.sort_unstable();
                    vertices.dedup();
                    edges.sort_unstable();
                    self.blocks.push(Block { vertices, edges });
                }
            } else if self.disc[w] < self.disc[u] {
                self.stack.push(e);
                self.low[u] = self.low[u].min(self.disc[w]);
            }
        }
    }
}

fn block_decomposition(d: &Diagram) -> (Vec<Block>, Vec<usize>) {
    let n = d.vertex_count();
    let inc = d.incidence();
    let mut dfs = Dfs {
        inc: &inc,
        edges: d.edges(),
        disc: vec![usize::MAX; n],
        low: vec![0; n],
        time: 0,
        stack: Vec::new(),
        blocks: Vec::new(),
        bridges: Vec::new(),
    };
    for s in 0..n {
        if dfs.disc[s] == usize::MAX {
            dfs.visit(s, None);
        }
    }
    let mut blocks = dfs.blocks;
    for (e, &(a, b)) in d.edges().iter().enumerate() {
        if a == b {
            blocks.push(Block { vertices: vec![a], edges: vec![e] });
        }
    }
    let mut bridges = dfs.bridges;
    bridges.sort_unstable();
    (blocks, bridges)
}

/// Biconnected blocks; each loop is its own block.
pub fn blocks(d: &Diagram) -> Vec<Block> {
    block_decomposition(d).0
}

/// Indices of bridge edges, ascending.
pub fn bridges(d: &Diagram) -> Vec<usize> {
    block_decomposition(d).1
}

pub fn classify(d: &Diagram) -> DiagramClass {
    let (_, ncomp) = connected_components(d);
    let connected = ncomp == 1;
    let (blocks, bridge_list) = block_decomposition(d);
    let two_edge_connected = connected && bridge_list.is_empty();
    let non_bridge_blocks_are_cycles = blocks.iter().filter(|b| !is_bridge_block(b, &bridge_list)).all(Block::is_cycle);
    let cactus = two_edge_connected && non_bridge_blocks_are_cycles;
    let eulerian = d.degrees().iter().all(|x| x % 2 == 0);

    let mut treelike = false;
    let mut gaussian_tree = false;
    if let (Some(root), true, true) = (d.root(), connected, non_bridge_blocks_are_cycles) {
        let mut is_bridge = vec![false; d.edge_count()];
        for &e in &bridge_list {
            is_bridge[e] = true;
        }
        let inc = d.incidence();
        let mut seen = vec![false; d.vertex_count()];
        let mut reached = 0;
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            for &(e, w) in &inc[u] {
                if is_bridge[e] && !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        treelike = reached == bridge_list.len();
        let root_bridges = inc[root].iter().filter(|(e, _)| is_bridge[*e]).count();
        gaussian_tree = treelike && root_bridges == 1;
    }
    DiagramClass { connected, two_edge_connected, cactus, eulerian, treelike, gaussian_tree }
}

fn is_bridge_block(b: &Block, bridges: &[usize]) -> bool {
    b.edges.len() == 1 && bridges.binary_search(&b.edges[0]).is_ok()
}

/// The non-bridge blocks of a diagram indexed by vertex, for walking the
/// cycles of a cactus or of the cactuses hanging off a tree.
pub(crate) struct CycleBlocks {
    pub blocks: Vec<Block>,
    pub at: Vec<Vec<usize>>,
}

impl CycleBlocks {
    pub fn new(d: &Diagram) -> Self {
        let (all, bridge_list) = block_decomposition(d);
        let blocks: Vec<Block> = all.into_iter().filter(|b| !is_bridge_block(b, &bridge_list)).collect();
        let mut at = vec![Vec::new(); d.vertex_count()];
        for (i, b) in blocks.iter().enumerate() {
            for &v in &b.vertices {
                at[v].push(i);
            }
        }
        CycleBlocks { blocks, at }
    }

    /// Vertices of cycle block `b` in cyclic order starting at `v`.
    pub fn cycle_order(&self, d: &Diagram, b: usize, v: usize) -> Vec<usize> {
        let block = &self.blocks[b];
        let mut seq = vec![v];
        let mut used = vec![false; block.edges.len()];
        let mut cur = v;
        for _ in 1..block.edges.len() {
            let k = (0..block.edges.len())
                .find(|&k| {
                    let (x, y) = d.edges()[block.edges[k]];
                    !used[k] && (x == cur || y == cur)
                })
                .expect("cycle continues");
            used[k] = true;
            let (x, y) = d.edges()[block.edges[k]];
            cur = if x == cur { y } else { x };
            seq.push(cur);
        }
        seq
    }
}

/// Lengths of the cycles of a cactus, ascending.
pub fn cycles_of_cactus(d: &Diagram) -> Result<Vec<usize>> {
    if !classify(d).cactus {
        return precondition("cycles_of_cactus needs a cactus");
    }
    let mut lens: Vec<usize> = blocks(d).iter().map(|b| b.edges.len()).collect();
    lens.sort_unstable();
    Ok(lens)
}

/// Two distinct roots joined by a path of bridges, every other block a cycle,
/// and no bridge off that path.
pub fn is_open_cactus(d: &Diagram) -> bool {
    let (s, t) = match d.roots() {
        [s, t] if s != t => (*s, *t),
        _ => return false,
    };
    if connected_components(d).1 != 1 {
        return false;
    }
    let (blocks, bridge_list) = block_decomposition(d);
    if !blocks.iter().filter(|b| !is_bridge_block(b, &bridge_list)).all(Block::is_cycle) {
        return false;
    }
    match bridge_path(d, &bridge_list, s, t) {
        Some(path_edges) => path_edges.len() == bridge_list.len(),
        None => false,
    }
}

/// Edges of the path from `s` to `t` that uses only edges in `allowed`.
pub(crate) fn bridge_path(d: &Diagram, allowed: &[usize], s: usize, t: usize) -> Option<Vec<usize>> {
    let n = d.vertex_count();
    let mut adj = vec![Vec::new(); n];
    for &e in allowed {
        let (a, b) = d.edges()[e];
        adj[a].push((e, b));
        adj[b].push((e, a));
    }
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[s] = true;
    let mut queue = std::collections::VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &(e, w) in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                prev[w] = Some((e, u));
                queue.push_back(w);
            }
        }
    }
    if !seen[t] {
        return None;
    }
    let mut path = Vec::new();
    let mut v = t;
    while v != s {
        let (e, u) = prev[v]?;
        path.push(e);
        v = u;
    }
    path.reverse();
    Some(path)
}

/// Glue rooted diagrams at their roots. Vertices of the first part keep their
/// ids; the non-root vertices of later parts follow in order.
pub fn graft(parts: &[Diagram]) -> Result<Diagram> {
    let Some(first) = parts.first() else {
        return invalid("graft needs at least one part");
    };
    let mut root_ids = Vec::with_capacity(parts.len());
    for (i, p) in parts.iter().enumerate() {
        match p.root() {
            Some(r) => root_ids.push(r),
            None => return precondition(format!("graft part {i} is not a vector diagram")),
        }
    }
    let root = root_ids[0];
    let mut n = first.vertex_count();
    let mut edges = first.edges().to_vec();
    for (p, &r) in parts.iter().zip(&root_ids).skip(1) {
        let mut map = vec![0; p.vertex_count()];
        for (v, slot) in map.iter_mut().enumerate() {
            if v == r {
                *slot = root;
            } else {
                *slot = n;
                n += 1;
            }
        }
        edges.extend(p.edges().iter().map(|&(a, b)| (map[a], map[b])));
    }
    Diagram::new(n, edges, vec![root])
}
