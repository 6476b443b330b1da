use crate::error::{Result, TampError};

use super::Diagram;

pub const DEFAULT_VERTEX_CAP: usize = 12;

/// Isomorphism-class key of a rooted multigraph. Equal keys iff isomorphic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<u32>);

pub fn canonical_form(d: &Diagram) -> Result<CanonicalKey> {
    canonical_form_with_cap(d, DEFAULT_VERTEX_CAP)
}

pub fn canonical_form_with_cap(d: &Diagram, cap: usize) -> Result<CanonicalKey> {
    Ok(search(d, cap)?.0)
}

/// The canonical representative together with its key.
pub fn canonicalize(d: &Diagram) -> Result<(Diagram, CanonicalKey)> {
    let (key, perm) = search(d, DEFAULT_VERTEX_CAP)?;
    // perm[pos] = old vertex; invert to old -> pos
    let mut inv = vec![0; perm.len()];
    for (pos, &v) in perm.iter().enumerate() {
        inv[v] = pos;
    }
    let mut edges: Vec<(usize, usize)> = d.edges().iter().map(|&(a, b)| (inv[a].min(inv[b]), inv[a].max(inv[b]))).collect();
    edges.sort_unstable();
    let roots = d.roots().iter().map(|&r| inv[r]).collect();
    Ok((Diagram::new_unchecked(d.vertex_count(), edges, roots), key))
}

fn search(d: &Diagram, cap: usize) -> Result<(CanonicalKey, Vec<usize>)> {
    let n = d.vertex_count();
    if n > cap {
        return Err(TampError::Size { what: "vertex count", got: n, cap });
    }
    let mut mult = vec![vec![0u32; n]; n];
    for &(a, b) in d.edges() {
        mult[a][b] += 1;
        if a != b {
            mult[b][a] += 1;
        }
    }
    let color = refine(d, &mult);

    // positions are filled class by class in color order
    let mut class_of_pos = color.clone();
    class_of_pos.sort_unstable();

    // interchangeable vertices: same color and identical rows outside the pair
    let mut twin_class = vec![usize::MAX; n];
    for u in 0..n {
        if twin_class[u] != usize::MAX {
            continue;
        }
        twin_class[u] = u;
        for v in u + 1..n {
            if twin_class[v] == usize::MAX
                && color[u] == color[v]
                && mult[u][u] == mult[v][v]
                && (0..n).all(|w| w == u || w == v || mult[u][w] == mult[v][w])
            {
                twin_class[v] = u;
            }
        }
    }

    let mut s = Search {
        n,
        mult: &mult,
        color: &color,
        class_of_pos: &class_of_pos,
        twin_class: &twin_class,
        used: vec![false; n],
        perm: Vec::with_capacity(n),
        enc: Vec::with_capacity(n * (n + 1) / 2),
        best: None,
        best_perm: Vec::new(),
    };
    s.dfs(0, false);
    let enc = s.best.expect("at least one ordering");
    let perm = s.best_perm;
    let mut pos_of = vec![0; n];
    for (p, &v) in perm.iter().enumerate() {
        pos_of[v] = p;
    }
    let mut key = Vec::with_capacity(enc.len() + 4);
    key.push(n as u32);
    key.push(d.roots().len() as u32);
    key.extend(d.roots().iter().map(|&r| pos_of[r] as u32));
    key.extend(enc);
    Ok((CanonicalKey(key), perm))
}

/// Iterated color refinement starting from root markers, degree and loops.
fn refine(d: &Diagram, mult: &[Vec<u32>]) -> Vec<u32> {
    let n = d.vertex_count();
    let degrees = d.degrees();
    let initial: Vec<Vec<u32>> = (0..n)
        .map(|v| {
            let marker: u32 = d.roots().iter().enumerate().map(|(i, &r)| if r == v { 1 << i } else { 0 }).sum();
            // roots sort first
            vec![if marker > 0 { 0 } else { 1 }, marker, degrees[v] as u32, mult[v][v]]
        })
        .collect();
    let mut color = rank(&initial);
    let mut classes = count_distinct(&color);
    loop {
        let sigs: Vec<Vec<u32>> = (0..n)
            .map(|v| {
                let mut nb: Vec<(u32, u32)> =
                    (0..n).filter(|&w| w != v && mult[v][w] > 0).map(|w| (color[w], mult[v][w])).collect();
                nb.sort_unstable();
                let mut sig = vec![color[v]];
                sig.extend(nb.into_iter().flat_map(|(c, m)| [c, m]));
                sig
            })
            .collect();
        let next = rank(&sigs);
        let k = count_distinct(&next);
        color = next;
        if k == classes {
            return color;
        }
        classes = k;
    }
}

fn rank(sigs: &[Vec<u32>]) -> Vec<u32> {
    let mut sorted: Vec<&Vec<u32>> = sigs.iter().collect();
    sorted.sort();
    sorted.dedup();
    sigs.iter().map(|s| sorted.binary_search(&s).expect("present") as u32).collect()
}

fn count_distinct(c: &[u32]) -> usize {
    let mut v = c.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

struct Search<'a> {
    n: usize,
    mult: &'a [Vec<u32>],
    color: &'a [u32],
    class_of_pos: &'a [u32],
    twin_class: &'a [usize],
    used: Vec<bool>,
    perm: Vec<usize>,
    enc: Vec<u32>,
    best: Option<Vec<u32>>,
    best_perm: Vec<usize>,
}

impl Search<'_> {
    fn dfs(&mut self, k: usize, strictly_less: bool) {
        if k == self.n {
            if strictly_less || self.best.is_none() {
                self.best = Some(self.enc.clone());
                self.best_perm = self.perm.clone();
            }
            return;
        }
        let offset = k * (k + 1) / 2;
        for v in 0..self.n {
            if self.used[v] || self.color[v] != self.class_of_pos[k] {
                continue;
            }
            // among twins only the smallest unused one is tried
            let tc = self.twin_class[v];
            if (0..v).any(|u| self.twin_class[u] == tc && !self.used[u]) {
                continue;
            }
            self.perm.push(v);
            for j in 0..=k {
                let w = self.perm[j];
                self.enc.push(self.mult[v][w]);
            }
            let mut less = strictly_less;
            let mut prune = false;
            if !strictly_less {
                if let Some(best) = &self.best {
                    match self.enc[offset..].cmp(&best[offset..offset + k + 1]) {
                        std::cmp::Ordering::Less => less = true,
                        std::cmp::Ordering::Greater => prune = true,
                        std::cmp::Ordering::Equal => {}
                    }
                }
            }
            if !prune {
                self.used[v] = true;
                self.dfs(k + 1, less);
                self.used[v] = false;
            }
            self.enc.truncate(offset);
            self.perm.pop();
        }
    }
}
