use crate::error::{precondition, Result, TampError};

use super::canon::DEFAULT_VERTEX_CAP;
use super::classify::{bridges, classify};
use super::partition::quotient_by_labels;
use super::Diagram;

/// A partial matching between two treelike diagrams, as sorted
/// `(vertex of t1, vertex of t2)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HomeomorphicMatching {
    pub pairs: Vec<(usize, usize)>,
}

/// Tree skeleton of a treelike diagram.
struct Skeleton {
    root: usize,
    on_tree: Vec<bool>,
    is_core: Vec<bool>,
    /// Core parent of each non-root core vertex.
    core_parent: Vec<Option<usize>>,
    /// For each non-root core vertex `c`: the tree path from its core parent to `c`.
    core_path: Vec<Vec<usize>>,
    core_children: Vec<Vec<usize>>,
}

impl Skeleton {
    fn new(t: &Diagram) -> Result<Skeleton> {
        if t.vertex_count() > DEFAULT_VERTEX_CAP {
            return Err(TampError::Size { what: "vertex count", got: t.vertex_count(), cap: DEFAULT_VERTEX_CAP });
        }
        if !classify(t).treelike {
            return precondition("homeomorphic matchings need treelike diagrams");
        }
        let root = t.root().expect("treelike diagrams have one root");
        let n = t.vertex_count();
        let mut adj = vec![Vec::new(); n];
        for e in bridges(t) {
            let (a, b) = t.edges()[e];
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut on_tree = vec![false; n];
        on_tree[root] = true;
        let mut parent = vec![None; n];
        let mut order = vec![root];
        let mut i = 0;
        while i < order.len() {
            let u = order[i];
            i += 1;
            for &w in &adj[u] {
                if !on_tree[w] {
                    on_tree[w] = true;
                    parent[w] = Some(u);
                    order.push(w);
                }
            }
        }
        let is_core: Vec<bool> = (0..n).map(|v| v == root || (on_tree[v] && adj[v].len() != 2)).collect();
        let mut core_parent = vec![None; n];
        let mut core_path = vec![Vec::new(); n];
        let mut core_children = vec![Vec::new(); n];
        for &c in &order {
            if c == root || !is_core[c] {
                continue;
            }
            let mut path = vec![c];
            let mut v = parent[c].expect("non-root tree vertex has a parent");
            while !is_core[v] {
                path.push(v);
                v = parent[v].expect("non-root tree vertex has a parent");
            }
            path.push(v);
            path.reverse();
            core_parent[c] = Some(v);
            core_children[v].push(c);
            core_path[c] = path;
        }
        Ok(Skeleton { root, on_tree, is_core, core_parent, core_path, core_children })
    }
}

/// All homeomorphic matchings between two treelike diagrams.
pub fn homeomorphic_matchings(t1: &Diagram, t2: &Diagram) -> Result<Vec<HomeomorphicMatching>> {
    let s1 = Skeleton::new(t1)?;
    let s2 = Skeleton::new(t2)?;
    let isos = core_isomorphisms(&s1, &s2, s1.root, s2.root);
    let mut out = Vec::new();
    for iso in isos {
        // each core edge is the path ending at a non-root core vertex
        let mut per_edge: Vec<Vec<Vec<(usize, usize)>>> = Vec::new();
        for &(c1, c2) in &iso {
            if c1 == s1.root {
                continue;
            }
            let p1 = &s1.core_path[c1];
            let p2 = &s2.core_path[c2];
            per_edge.push(monotone_matchings(&p1[1..p1.len() - 1], &p2[1..p2.len() - 1]));
        }
        let mut combos: Vec<Vec<(usize, usize)>> = vec![iso.clone()];
        for choices in per_edge {
            let mut next = Vec::with_capacity(combos.len() * choices.len());
            for base in &combos {
                for c in &choices {
                    let mut m = base.clone();
                    m.extend_from_slice(c);
                    next.push(m);
                }
            }
            combos = next;
        }
        for mut pairs in combos {
            pairs.sort_unstable();
            out.push(HomeomorphicMatching { pairs });
        }
    }
    out.sort();
    Ok(out)
}

/// Rooted isomorphisms between the core subtrees below `a` and `b`.
fn core_isomorphisms(s1: &Skeleton, s2: &Skeleton, a: usize, b: usize) -> Vec<Vec<(usize, usize)>> {
    let ca = &s1.core_children[a];
    let cb = &s2.core_children[b];
    if ca.len() != cb.len() {
        return Vec::new();
    }
    let mut results = Vec::new();
    let mut used = vec![false; cb.len()];
    let mut acc = vec![(a, b)];
    assign_children(s1, s2, ca, cb, 0, &mut used, &mut acc, &mut results);
    results
}

#[allow(clippy::too_many_arguments)]
fn assign_children(
    s1: &Skeleton,
    s2: &Skeleton,
    ca: &[usize],
    cb: &[usize],
    k: usize,
    used: &mut [bool],
    acc: &mut Vec<(usize, usize)>,
    results: &mut Vec<Vec<(usize, usize)>>,
) {
    if k == ca.len() {
        results.push(acc.clone());
        return;
    }
    for j in 0..cb.len() {
        if used[j] {
            continue;
        }
        let subs = core_isomorphisms(s1, s2, ca[k], cb[j]);
        if subs.is_empty() {
            continue;
        }
        used[j] = true;
        for sub in subs {
            let len = acc.len();
            acc.extend(sub);
            assign_children(s1, s2, ca, cb, k + 1, used, acc, results);
            acc.truncate(len);
        }
        used[j] = false;
    }
}

/// Order-preserving partial matchings between two sequences.
fn monotone_matchings(a: &[usize], b: &[usize]) -> Vec<Vec<(usize, usize)>> {
    fn go(a: &[usize], b: &[usize], i: usize, j0: usize, acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if i == a.len() {
            out.push(acc.clone());
            return;
        }
        go(a, b, i + 1, j0, acc, out);
        for j in j0..b.len() {
            acc.push((a[i], b[j]));
            go(a, b, i + 1, j + 1, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(a, b, 0, 0, &mut Vec::new(), &mut out);
    out
}

/// Check the four defining conditions of a homeomorphic matching directly.
pub fn is_homeomorphic(t1: &Diagram, t2: &Diagram, pairs: &[(usize, usize)]) -> Result<bool> {
    let s1 = Skeleton::new(t1)?;
    let s2 = Skeleton::new(t2)?;
    let mut fwd = vec![None; t1.vertex_count()];
    let mut bwd = vec![None; t2.vertex_count()];
    for &(u, v) in pairs {
        if u >= fwd.len() || v >= bwd.len() {
            return Err(TampError::InvalidInput(format!("pair ({u},{v}) out of range")));
        }
        if fwd[u].is_some() || bwd[v].is_some() {
            return Ok(false);
        }
        fwd[u] = Some(v);
        bwd[v] = Some(u);
    }
    // 1. roots matched
    if fwd[s1.root] != Some(s2.root) {
        return Ok(false);
    }
    // 4. only tree vertices
    if pairs.iter().any(|&(u, v)| !s1.on_tree[u] || !s2.on_tree[v]) {
        return Ok(false);
    }
    // 2. cores matched to cores, preserving the core parent
    for u in 0..t1.vertex_count() {
        if s1.is_core[u] {
            match fwd[u] {
                Some(v) if s2.is_core[v] => {
                    if s1.core_parent[u].map(|p| fwd[p]) != s2.core_parent[v].map(Some) {
                        return Ok(false);
                    }
                }
                _ => return Ok(false),
            }
        }
    }
    if (0..t2.vertex_count()).any(|v| s2.is_core[v] && bwd[v].map_or(true, |u| !s1.is_core[u])) {
        return Ok(false);
    }
    // 3. path vertices stay on the corresponding path, in order
    for c1 in 0..t1.vertex_count() {
        if !s1.is_core[c1] || c1 == s1.root {
            continue;
        }
        let c2 = fwd[c1].expect("checked above");
        let p1 = &s1.core_path[c1];
        let p2 = &s2.core_path[c2];
        let mut last = 0;
        for &u in &p1[1..p1.len() - 1] {
            if let Some(v) = fwd[u] {
                match p2[1..p2.len() - 1].iter().position(|&x| x == v) {
                    Some(j) if j + 1 > last => last = j + 1,
                    _ => return Ok(false),
                }
            }
        }
        for &v in &p2[1..p2.len() - 1] {
            if let Some(u) = bwd[v] {
                if !p1[1..p1.len() - 1].contains(&u) {
                    return Ok(false);
                }
            }
        }
    }
    // every matched tree vertex is a core vertex or on some core path; both handled
    Ok(true)
}

/// The quotient of `t1 ⊔ t2` identifying each matched pair; the root is the merged root pair.
pub fn matching_quotient(t1: &Diagram, t2: &Diagram, pairs: &[(usize, usize)]) -> Result<Diagram> {
    if t1.root().is_none() || t2.root().is_none() {
        return precondition("matching quotient needs two vector diagrams");
    }
    let u = t1.disjoint_union(&t2.unrooted())?;
    let off = t1.vertex_count();
    let mut labels: Vec<usize> = (0..u.vertex_count()).collect();
    for &(a, b) in pairs {
        labels[off + b] = a;
    }
    let mut relabel = std::collections::HashMap::new();
    let dense: Vec<usize> = labels
        .iter()
        .map(|l| {
            let k = relabel.len();
            *relabel.entry(*l).or_insert(k)
        })
        .collect();
    let q = quotient_by_labels(&u, &dense, relabel.len());
    Ok(q)
}
