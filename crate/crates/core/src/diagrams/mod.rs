//! Multigraphs with up to two roots, the index objects of graph polynomials.
//!
//! A [`Diagram`] with no root indexes a scalar polynomial, one root a vector
//! polynomial and two roots a matrix polynomial. Loops and parallel edges are
//! allowed; a loop contributes 2 to the degree of its vertex.

mod basis;
mod canon;
mod classify;
mod decompose;
mod enumerate;
mod homeomorphic;
mod partition;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, TampError};

pub use basis::{w_to_z_coefficients, z_to_w_coefficients, Expansion};
pub use canon::{canonical_form, canonical_form_with_cap, canonicalize, CanonicalKey, DEFAULT_VERTEX_CAP};
pub use classify::{
    blocks, bridges, classify, connected_components, cycles_of_cactus, graft, is_open_cactus, Block, DiagramClass,
};
pub(crate) use classify::{bridge_path, CycleBlocks};
pub use decompose::{check_open_cactus_decomposition, open_cactus_decomposition, OpenCactusDecomposition};
pub use enumerate::connected_diagrams;
pub use homeomorphic::{homeomorphic_matchings, is_homeomorphic, matching_quotient, HomeomorphicMatching};
pub use partition::{for_each_set_partition, quotient, set_partitions, VertexPartition};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDiagram", into = "RawDiagram")]
pub struct Diagram {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    roots: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawDiagram {
    v: usize,
    #[serde(default)]
    roots: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<RawDiagram> for Diagram {
    type Error = TampError;
    fn try_from(r: RawDiagram) -> Result<Self> {
        Diagram::new(r.v, r.edges, r.roots)
    }
}

impl From<Diagram> for RawDiagram {
    fn from(d: Diagram) -> Self {
        RawDiagram { v: d.vertex_count, roots: d.roots, edges: d.edges }
    }
}

impl Diagram {
    /// Build a diagram; endpoints are stored as `(min, max)`.
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>, roots: Vec<usize>) -> Result<Self> {
        if vertex_count == 0 {
            return invalid("a diagram needs at least one vertex");
        }
        if roots.len() > 2 {
            return invalid(format!("at most 2 roots allowed, got {}", roots.len()));
        }
        for &r in &roots {
            if r >= vertex_count {
                return invalid(format!("root {r} out of range for {vertex_count} vertices"));
            }
        }
        let mut norm = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a >= vertex_count || b >= vertex_count {
                return invalid(format!("edge ({a},{b}) out of range for {vertex_count} vertices"));
            }
            norm.push((a.min(b), a.max(b)));
        }
        Ok(Diagram { vertex_count, edges: norm, roots })
    }

    pub(crate) fn new_unchecked(vertex_count: usize, edges: Vec<(usize, usize)>, roots: Vec<usize>) -> Self {
        let edges = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        Diagram { vertex_count, edges, roots }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    /// The root of a vector diagram.
    pub fn root(&self) -> Option<usize> {
        match self.roots.as_slice() {
            [r] => Some(*r),
            _ => None,
        }
    }

    pub fn with_roots(&self, roots: Vec<usize>) -> Result<Diagram> {
        Diagram::new(self.vertex_count, self.edges.clone(), roots)
    }

    pub fn unrooted(&self) -> Diagram {
        Diagram { roots: Vec::new(), ..self.clone() }
    }

    pub fn is_root(&self, v: usize) -> bool {
        self.roots.contains(&v)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().map(|&(a, b)| (a == v) as usize + (b == v) as usize).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertex_count];
        for &(a, b) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    pub fn loop_count(&self) -> usize {
        self.edges.iter().filter(|(a, b)| a == b).count()
    }

    /// For each vertex, the list of `(edge index, other endpoint)`. Loops appear twice.
    pub fn incidence(&self) -> Vec<Vec<(usize, usize)>> {
        let mut inc = vec![Vec::new(); self.vertex_count];
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            inc[a].push((e, b));
            inc[b].push((e, a));
        }
        inc
    }

    /// Relabel vertices by `perm[old] = new`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Diagram> {
        if perm.len() != self.vertex_count {
            return Err(TampError::Dimension { expected: self.vertex_count, got: perm.len() });
        }
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return invalid("relabeling is not a permutation");
            }
        }
        let edges = self.edges.iter().map(|&(a, b)| (perm[a], perm[b])).collect();
        let roots = self.roots.iter().map(|&r| perm[r]).collect();
        Diagram::new(self.vertex_count, edges, roots)
    }

    /// Keep the edges whose indices are listed, dropping isolated non-root
    /// vertices; returns the diagram and `old vertex -> new vertex`.
    pub fn edge_subgraph(&self, keep: &[usize]) -> (Diagram, Vec<Option<usize>>) {
        let mut used = vec![false; self.vertex_count];
        for &e in keep {
            let (a, b) = self.edges[e];
            used[a] = true;
            used[b] = true;
        }
        for &r in &self.roots {
            used[r] = true;
        }
        let mut map = vec![None; self.vertex_count];
        let mut next = 0;
        for v in 0..self.vertex_count {
            if used[v] {
                map[v] = Some(next);
                next += 1;
            }
        }
        let edges = keep
            .iter()
            .map(|&e| {
                let (a, b) = self.edges[e];
                (map[a].unwrap(), map[b].unwrap())
            })
            .collect();
        let roots = self.roots.iter().map(|&r| map[r].unwrap()).collect();
        (Diagram::new_unchecked(next.max(1), edges, roots), map)
    }

    /// Disjoint union; vertices of `other` are shifted, roots concatenated.
    pub fn disjoint_union(&self, other: &Diagram) -> Result<Diagram> {
        let off = self.vertex_count;
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(a, b)| (a + off, b + off)));
        let mut roots = self.roots.clone();
        roots.extend(other.roots.iter().map(|&r| r + off));
        Diagram::new(off + other.vertex_count, edges, roots)
    }

    /// Compact text form `diagram{v=..; roots=[..]; edges=[(a,b),..]}`.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    // Catalog constructors. All are unrooted unless stated.

    pub fn vertex() -> Diagram {
        Diagram::new_unchecked(1, vec![], vec![])
    }

    pub fn edge() -> Diagram {
        Self::path(1)
    }

    /// Path with `k` edges on `k + 1` vertices.
    pub fn path(k: usize) -> Diagram {
        Diagram::new_unchecked(k + 1, (0..k).map(|i| (i, i + 1)).collect(), vec![])
    }

    /// Cycle of length `k >= 1`; `cycle(1)` is a loop, `cycle(2)` a double edge.
    pub fn cycle(k: usize) -> Diagram {
        assert!(k >= 1, "cycle length must be positive");
        Diagram::new_unchecked(k, (0..k).map(|i| (i, (i + 1) % k)).collect(), vec![])
    }

    /// Two vertices joined by three parallel edges.
    pub fn theta() -> Diagram {
        Diagram::new_unchecked(2, vec![(0, 1); 3], vec![])
    }

    /// Two triangles sharing vertex 0.
    pub fn bowtie() -> Diagram {
        Diagram::new_unchecked(5, vec![(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)], vec![])
    }

    /// Star with `k` leaves around center 0.
    pub fn star(k: usize) -> Diagram {
        Diagram::new_unchecked(k + 1, (1..=k).map(|i| (0, i)).collect(), vec![])
    }

    pub fn k4() -> Diagram {
        Diagram::new_unchecked(4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], vec![])
    }

    pub fn rooted_at(mut self, v: usize) -> Diagram {
        assert!(v < self.vertex_count);
        self.roots = vec![v];
        self
    }

    pub fn rooted_at_pair(mut self, s: usize, t: usize) -> Diagram {
        assert!(s < self.vertex_count && t < self.vertex_count);
        self.roots = vec![s, t];
        self
    }

    /// Look up a named catalog diagram.
    pub fn catalog(name: &str) -> Option<Diagram> {
        let d = match name {
            "vertex" => Self::vertex(),
            "edge" => Self::edge(),
            "loop" | "cycle1" => Self::cycle(1),
            "path2" => Self::path(2),
            "path3" => Self::path(3),
            "theta" => Self::theta(),
            "bowtie" => Self::bowtie(),
            "star3" => Self::star(3),
            "k4" => Self::k4(),
            _ => {
                let k: usize = name.strip_prefix("cycle")?.parse().ok()?;
                if !(2..=8).contains(&k) {
                    return None;
                }
                Self::cycle(k)
            }
        };
        Some(d)
    }

    pub const CATALOG: &'static [&'static str] = &[
        "vertex", "edge", "loop", "path2", "path3", "cycle2", "cycle3", "cycle4", "cycle5", "cycle6", "cycle7",
        "cycle8", "theta", "bowtie", "star3", "k4",
    ];

    /// Parse a catalog name or the text form.
    pub fn parse(s: &str) -> Result<Diagram> {
        let s = s.trim();
        if let Some(d) = Self::catalog(s) {
            return Ok(d);
        }
        s.parse()
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let roots: Vec<String> = self.roots.iter().map(|r| r.to_string()).collect();
        let edges: Vec<String> = self.edges.iter().map(|(a, b)| format!("({a},{b})")).collect();
        write!(f, "diagram{{v={}; roots=[{}]; edges=[{}]}}", self.vertex_count, roots.join(","), edges.join(","))
    }
}

impl FromStr for Diagram {
    type Err = TampError;

    fn from_str(s: &str) -> Result<Diagram> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let body = compact
            .strip_prefix("diagram{")
            .and_then(|b| b.strip_suffix('}'))
            .ok_or_else(|| TampError::Parse(format!("expected diagram{{...}}, got {s:?}")))?;
        let mut v = None;
        let mut roots = Vec::new();
        let mut edges = Vec::new();
        for field in body.split(';').filter(|f| !f.is_empty()) {
            let (key, value) =
                field.split_once('=').ok_or_else(|| TampError::Parse(format!("field without '=': {field:?}")))?;
            match key {
                "v" => v = Some(parse_usize(value)?),
                "roots" => {
                    let inner = bracketed(value)?;
                    roots = inner.split(',').filter(|t| !t.is_empty()).map(parse_usize).collect::<Result<_>>()?;
                }
                "edges" => {
                    let inner = bracketed(value)?;
                    let mut rest = inner;
                    while !rest.is_empty() {
                        rest = rest.trim_start_matches(',');
                        if rest.is_empty() {
                            break;
                        }
                        let close = rest.find(')').ok_or_else(|| TampError::Parse("unclosed edge tuple".into()))?;
                        let tuple = rest[..close]
                            .strip_prefix('(')
                            .ok_or_else(|| TampError::Parse(format!("bad edge near {rest:?}")))?;
                        let (a, b) = tuple
                            .split_once(',')
                            .ok_or_else(|| TampError::Parse(format!("edge needs two endpoints: {tuple:?}")))?;
                        edges.push((parse_usize(a)?, parse_usize(b)?));
                        rest = &rest[close + 1..];
                    }
                }
                other => return Err(TampError::Parse(format!("unknown field {other:?}"))),
            }
        }
        let v = v.ok_or_else(|| TampError::Parse("missing v=".into()))?;
        Diagram::new(v, edges, roots)
    }
}

fn bracketed(s: &str) -> Result<&str> {
    s.strip_prefix('[')
        .and_then(|x| x.strip_suffix(']'))
        .ok_or_else(|| TampError::Parse(format!("expected [...], got {s:?}")))
}

fn parse_usize(s: &str) -> Result<usize> {
    s.parse().map_err(|e| TampError::Parse(format!("{s:?}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let d = Diagram::bowtie().rooted_at(0);
        let s = d.to_string();
        assert_eq!(s, "diagram{v=5; roots=[0]; edges=[(0,1),(1,2),(0,2),(0,3),(3,4),(0,4)]}");
        assert_eq!(s.parse::<Diagram>().unwrap(), d);
        let e: Diagram = "diagram{ v=2; roots=[]; edges=[] }".parse().unwrap();
        assert_eq!(e.edge_count(), 0);
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!("diagram{v=2; edges=[(0,2)]}".parse::<Diagram>().is_err());
        assert!("graph{v=2}".parse::<Diagram>().is_err());
        assert!("diagram{v=3; roots=[0,1,2]; edges=[]}".parse::<Diagram>().is_err());
        assert!("diagram{roots=[]; edges=[]}".parse::<Diagram>().is_err());
    }

    #[test]
    fn catalog_entries_exist() {
        for name in Diagram::CATALOG {
            assert!(Diagram::catalog(name).is_some(), "{name}");
        }
        assert_eq!(Diagram::catalog("cycle6").unwrap().edge_count(), 6);
        assert!(Diagram::catalog("cycle9").is_none());
        assert_eq!(Diagram::parse("theta").unwrap(), Diagram::theta());
    }

    #[test]
    fn degrees_count_loops_twice() {
        let d = Diagram::new(2, vec![(0, 0), (0, 1)], vec![]).unwrap();
        assert_eq!(d.degrees(), vec![3, 1]);
        assert_eq!(d.degree(0), 3);
    }

    #[test]
    fn json_round_trip() {
        let d = Diagram::k4().rooted_at_pair(0, 3);
        let j = serde_json::to_string(&d).unwrap();
        assert_eq!(serde_json::from_str::<Diagram>(&j).unwrap(), d);
        assert!(serde_json::from_str::<Diagram>(r#"{"v":1,"edges":[[0,1]]}"#).is_err());
    }
}
