use std::collections::BTreeMap;

use super::{canonicalize, CanonicalKey, Diagram};

/// Every connected unrooted diagram with at most `max_edges` edges, one per
/// isomorphism class, ordered by edge count and then canonical key.
pub fn connected_diagrams(max_edges: usize) -> Vec<Diagram> {
    let mut out = vec![Diagram::vertex()];
    let mut layer: BTreeMap<CanonicalKey, Diagram> = BTreeMap::new();
    let (d, k) = canonicalize(&Diagram::vertex()).expect("one vertex");
    layer.insert(k, d);
    for _ in 0..max_edges {
        let mut next: BTreeMap<CanonicalKey, Diagram> = BTreeMap::new();
        for d in layer.values() {
            let v = d.vertex_count();
            let mut grow = |edges: Vec<(usize, usize)>, vc: usize| {
                let g = Diagram::new(vc, edges, vec![]).expect("valid extension");
                if let Ok((c, key)) = canonicalize(&g) {
                    next.entry(key).or_insert(c);
                }
            };
            for a in 0..v {
                for b in a..v {
                    let mut edges = d.edges().to_vec();
                    edges.push((a, b));
                    grow(edges, v);
                }
                let mut edges = d.edges().to_vec();
                edges.push((a, v));
                grow(edges, v + 1);
            }
        }
        out.extend(next.values().cloned());
        layer = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        // connected multigraphs with loops: 1 with no edge, 2 with one edge
        // (edge, loop), 4 with two edges
        let all = connected_diagrams(2);
        let by_edges: Vec<usize> = (0..=2).map(|e| all.iter().filter(|d| d.edge_count() == e).count()).collect();
        assert_eq!(by_edges, vec![1, 2, 4]);
    }

    #[test]
    fn all_connected_and_distinct() {
        let all = connected_diagrams(4);
        let keys: std::collections::HashSet<_> = all.iter().map(|d| canonicalize(d).unwrap().1).collect();
        assert_eq!(keys.len(), all.len());
        assert!(all.iter().all(|d| super::super::classify(d).connected));
    }
}
