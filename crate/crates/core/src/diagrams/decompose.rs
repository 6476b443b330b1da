use crate::error::{precondition, Result};

use super::classify::{blocks, classify, is_open_cactus};
use super::Diagram;

/// An open cactus inside a 2-edge-connected non-cactus diagram whose removal
/// keeps the rest 2-edge-connected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenCactusDecomposition {
    pub s: usize,
    pub t: usize,
    /// The open cactus, rooted at its endpoints; vertex `i` of `sub` is
    /// `vertices[i]` of the input.
    pub sub: Diagram,
    pub vertices: Vec<usize>,
    /// Input edge indices making up `sub`.
    pub edges: Vec<usize>,
    /// The base path `s = u_1, .., u_k = t`.
    pub path: Vec<usize>,
}

impl OpenCactusDecomposition {
    /// Vertices of the open cactus other than its endpoints.
    pub fn interior(&self) -> Vec<usize> {
        self.vertices.iter().copied().filter(|&v| v != self.s && v != self.t).collect()
    }
}

pub fn open_cactus_decomposition(d: &Diagram) -> Result<OpenCactusDecomposition> {
    let class = classify(d);
    if !class.two_edge_connected {
        return precondition("open cactus decomposition needs a 2-edge-connected diagram");
    }
    if class.cactus {
        return precondition("open cactus decomposition needs a non-cactus diagram");
    }
    let root = d.roots().first().copied();
    let (alive, pruned_root) = prune(d, root);
    let path = find_ear(d, &alive, pruned_root)
        .expect("a 2-edge-connected pruned diagram always has an ear");
    let path_edges = path.1;
    let path = path.0;

    // hang back everything attached to the interior of the path
    let mut in_path_edge = vec![false; d.edge_count()];
    for &e in &path_edges {
        in_path_edge[e] = true;
    }
    let inc = d.incidence();
    let mut vertex_in = vec![false; d.vertex_count()];
    let mut edge_in = in_path_edge.clone();
    for &u in &path {
        vertex_in[u] = true;
    }
    for &u in &path[1..path.len() - 1] {
        let mut stack = vec![u];
        while let Some(x) = stack.pop() {
            for &(e, w) in &inc[x] {
                if in_path_edge[e] {
                    continue;
                }
                edge_in[e] = true;
                if !vertex_in[w] {
                    vertex_in[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    let (s, t) = (path[0], *path.last().expect("nonempty"));
    let vertices: Vec<usize> = (0..d.vertex_count()).filter(|&v| vertex_in[v]).collect();
    let edges: Vec<usize> = (0..d.edge_count()).filter(|&e| edge_in[e]).collect();
    let sub = induced(d, &vertices, &edges, &[s, t]);
    Ok(OpenCactusDecomposition { s, t, sub, vertices, edges, path })
}

fn induced(d: &Diagram, vertices: &[usize], edges: &[usize], roots: &[usize]) -> Diagram {
    let mut local = vec![usize::MAX; d.vertex_count()];
    for (i, &v) in vertices.iter().enumerate() {
        local[v] = i;
    }
    let es = edges.iter().map(|&e| (local[d.edges()[e].0], local[d.edges()[e].1])).collect();
    Diagram::new_unchecked(vertices.len(), es, roots.iter().map(|&r| local[r]).collect())
}

/// Remove loops and leaf cycle blocks until none remain, moving the root to
/// the articulation vertex when its block is removed.
fn prune(d: &Diagram, mut root: Option<usize>) -> (Vec<bool>, Option<usize>) {
    let mut alive: Vec<bool> = d.edges().iter().map(|&(a, b)| a != b).collect();
    loop {
        let keep: Vec<usize> = (0..d.edge_count()).filter(|&e| alive[e]).collect();
        let view = Diagram::new_unchecked(d.vertex_count(), keep.iter().map(|&e| d.edges()[e]).collect(), vec![]);
        let bl = blocks(&view);
        let mut count = vec![0usize; d.vertex_count()];
        for b in &bl {
            for &v in &b.vertices {
                count[v] += 1;
            }
        }
        let leaf = bl
            .iter()
            .filter(|b| b.is_cycle() && b.vertices.iter().filter(|&&v| count[v] >= 2).count() == 1)
            .min_by_key(|b| b.edges.iter().map(|&e| keep[e]).min());
        let Some(leaf) = leaf else {
            return (alive, root);
        };
        let art = *leaf.vertices.iter().find(|&&v| count[v] >= 2).expect("one articulation vertex");
        for &e in &leaf.edges {
            alive[keep[e]] = false;
        }
        if let Some(r) = root {
            if r != art && leaf.vertices.contains(&r) {
                root = Some(art);
            }
        }
    }
}

/// The first ear in (length, vertex sequence, edge ids) order.
fn find_ear(d: &Diagram, alive: &[bool], root: Option<usize>) -> Option<(Vec<usize>, Vec<usize>)> {
    let n = d.vertex_count();
    let mut inc = vec![Vec::new(); n];
    for (e, &(a, b)) in d.edges().iter().enumerate() {
        if alive[e] {
            inc[a].push((e, b));
            inc[b].push((e, a));
        }
    }
    let present: Vec<bool> = inc.iter().map(|l| !l.is_empty()).collect();
    let is_inner = |v: usize| inc[v].len() == 2 && Some(v) != root;

    let mut candidates: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for (e, &(a, b)) in d.edges().iter().enumerate() {
        if alive[e] && a != b {
            candidates.push((vec![a, b], vec![e]));
        }
    }
    let mut chain_seen = vec![false; n];
    for v in 0..n {
        if !present[v] || !is_inner(v) || chain_seen[v] {
            continue;
        }
        // walk both ways through inner vertices
        let mut halves = Vec::new();
        for &(e0, w0) in &inc[v] {
            let mut verts = Vec::new();
            let mut edges = vec![e0];
            let (mut prev_e, mut cur) = (e0, w0);
            while is_inner(cur) && cur != v {
                verts.push(cur);
                let &(e, w) = inc[cur].iter().find(|&&(e, _)| e != prev_e).expect("degree two");
                edges.push(e);
                prev_e = e;
                cur = w;
            }
            verts.push(cur);
            halves.push((verts, edges));
        }
        let (left, right) = (&halves[0], &halves[1]);
        let mut verts: Vec<usize> = left.0.iter().rev().copied().collect();
        let mut edges: Vec<usize> = left.1.iter().rev().copied().collect();
        verts.push(v);
        verts.extend(&right.0);
        edges.extend(&right.1);
        for &x in &verts[1..verts.len() - 1] {
            chain_seen[x] = true;
        }
        let (first, last) = (verts[0], *verts.last().expect("nonempty"));
        if first == last {
            continue;
        }
        if first > last {
            verts.reverse();
            edges.reverse();
        }
        candidates.push((verts, edges));
    }
    candidates.sort_by(|a, b| (a.1.len(), &a.0, &a.1).cmp(&(b.1.len(), &b.0, &b.1)));
    candidates.into_iter().find(|(verts, edges)| {
        let interior = &verts[1..verts.len() - 1];
        remainder_is_2ec(d, alive, interior, edges)
    })
}

fn remainder_is_2ec(d: &Diagram, alive: &[bool], interior: &[usize], removed_edges: &[usize]) -> bool {
    let n = d.vertex_count();
    let mut gone = vec![false; n];
    for &v in interior {
        gone[v] = true;
    }
    let mut keep_v = vec![false; n];
    let mut edges = Vec::new();
    for (e, &(a, b)) in d.edges().iter().enumerate() {
        if alive[e] && !removed_edges.contains(&e) && !gone[a] && !gone[b] {
            edges.push((a, b));
        }
    }
    // vertices that carried alive edges before, minus the interior
    for (e, &(a, b)) in d.edges().iter().enumerate() {
        if alive[e] {
            keep_v[a] = !gone[a];
            keep_v[b] = !gone[b];
        }
    }
    let verts: Vec<usize> = (0..n).filter(|&v| keep_v[v]).collect();
    let mut local = vec![usize::MAX; n];
    for (i, &v) in verts.iter().enumerate() {
        local[v] = i;
    }
    let es = edges.into_iter().map(|(a, b)| (local[a], local[b])).collect();
    let rest = Diagram::new_unchecked(verts.len().max(1), es, vec![]);
    classify(&rest).two_edge_connected
}

/// Check the three defining conditions; returns a description of the first
/// failure.
pub fn check_open_cactus_decomposition(
    d: &Diagram,
    dec: &OpenCactusDecomposition,
) -> std::result::Result<(), String> {
    if dec.s == dec.t {
        return Err("endpoints coincide".into());
    }
    if dec.vertices.len() != dec.sub.vertex_count() || dec.edges.len() != dec.sub.edge_count() {
        return Err("sub does not match its vertex/edge lists".into());
    }
    let expected = induced(d, &dec.vertices, &dec.edges, &[dec.s, dec.t]);
    if expected != dec.sub {
        return Err("sub is not the subgraph spanned by its edges".into());
    }
    if !is_open_cactus(&dec.sub) {
        return Err("sub is not an open cactus with endpoints s, t".into());
    }
    let interior = dec.interior();
    // the interior must be cut off from the rest except through sub's edges
    for (e, &(a, b)) in d.edges().iter().enumerate() {
        if (interior.contains(&a) || interior.contains(&b)) && !dec.edges.contains(&e) {
            return Err(format!("edge {e} leaves the interior"));
        }
    }
    let all = vec![true; d.edge_count()];
    if !remainder_is_2ec(d, &all, &interior, &dec.edges) {
        return Err("removing the open cactus breaks 2-edge-connectivity".into());
    }
    if let Some(r) = d.roots().first() {
        if interior.contains(r) {
            return Err("root lies inside the open cactus".into());
        }
    }
    Ok(())
}
