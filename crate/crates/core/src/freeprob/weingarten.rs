//! Leading-order traffic values of orthogonally invariant matrices through
//! half-edge matchings and the asymptotic orthogonal Weingarten function.

use crate::diagrams::{classify, Diagram};
use crate::error::{precondition, Result, TampError};

use super::{catalan, CumulantTable, TableTag};

pub const MAX_WEINGARTEN_EDGES: usize = 8;

/// A perfect matching of the half-edges `0..2|E|`; half-edge `2e` sits at the
/// first endpoint of edge `e` and `2e + 1` at the second.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfEdgeMatching {
    partner: Vec<usize>,
}

impl HalfEdgeMatching {
    pub fn from_partners(partner: Vec<usize>) -> Result<Self> {
        for (a, &b) in partner.iter().enumerate() {
            if b >= partner.len() || b == a || partner[b] != a {
                return Err(TampError::InvalidInput("not a perfect matching".into()));
            }
        }
        Ok(HalfEdgeMatching { partner })
    }

    pub fn partner(&self, a: usize) -> usize {
        self.partner[a]
    }

    pub fn len(&self) -> usize {
        self.partner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partner.is_empty()
    }

    /// Sizes (in half-edges) of the cycles of the union with `other`.
    pub fn cycles_with(&self, other: &HalfEdgeMatching) -> Vec<usize> {
        let h = self.partner.len();
        let mut seen = vec![false; h];
        let mut out = Vec::new();
        for s in 0..h {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut x = s;
            loop {
                seen[x] = true;
                let y = self.partner[x];
                seen[y] = true;
                len += 2;
                x = other.partner[y];
                if x == s {
                    break;
                }
            }
            out.push(len);
        }
        out.sort_unstable();
        out
    }

    /// Swap distance `|HE|/2 - |cyc(self, other)|`.
    pub fn distance(&self, other: &HalfEdgeMatching) -> usize {
        self.partner.len() / 2 - self.cycles_with(other).len()
    }
}

/// The matching `α̃` that pairs the two half-edges of every edge.
pub fn half_edge_matching(d: &Diagram) -> HalfEdgeMatching {
    let partner = (0..2 * d.edge_count()).map(|a| a ^ 1).collect();
    HalfEdgeMatching { partner }
}

fn owner(d: &Diagram, a: usize) -> usize {
    let (u, v) = d.edges()[a / 2];
    if a % 2 == 0 {
        u
    } else {
        v
    }
}

/// Path bookkeeping for the union of a fixed matching with a matching under
/// construction: every open path is stored at its two free ends.
struct Tracker {
    other: Vec<usize>,
    len: Vec<usize>,
    open: usize,
    closed: Vec<usize>,
}

enum Undo {
    Closed,
    Joined { oa: usize, ob: usize, other_oa: usize, other_ob: usize, len_oa: usize, len_ob: usize },
}

impl Tracker {
    fn new(reference: &[usize]) -> Self {
        let h = reference.len();
        Tracker { other: reference.to_vec(), len: vec![2; h], open: h / 2, closed: Vec::new() }
    }

    fn add(&mut self, a: usize, b: usize) -> Undo {
        self.open -= 1;
        if self.other[a] == b {
            self.closed.push(self.len[a]);
            return Undo::Closed;
        }
        let (oa, ob) = (self.other[a], self.other[b]);
        let undo = Undo::Joined {
            oa,
            ob,
            other_oa: self.other[oa],
            other_ob: self.other[ob],
            len_oa: self.len[oa],
            len_ob: self.len[ob],
        };
        let l = self.len[a] + self.len[b];
        self.other[oa] = ob;
        self.other[ob] = oa;
        self.len[oa] = l;
        self.len[ob] = l;
        undo
    }

    fn undo(&mut self, u: Undo) {
        self.open += 1;
        match u {
            Undo::Closed => {
                self.closed.pop();
            }
            Undo::Joined { oa, ob, other_oa, other_ob, len_oa, len_ob } => {
                self.other[oa] = other_oa;
                self.other[ob] = other_ob;
                self.len[oa] = len_oa;
                self.len[ob] = len_ob;
            }
        }
    }

    /// Most cycles any completion can reach.
    fn bound(&self) -> usize {
        self.closed.len() + self.open
    }
}

/// Depth-first enumeration of perfect matchings allowed by `allowed`, pruned
/// to those whose unions with the reference matchings have at least `need`
/// cycles in total. `visit` receives the matching and the closed cycle sizes.
struct Search<'a> {
    partner: Vec<usize>,
    trackers: Vec<Tracker>,
    allowed: &'a dyn Fn(usize, usize) -> bool,
    need: usize,
}

impl Search<'_> {
    fn run(&mut self, visit: &mut dyn FnMut(&[usize], &[Tracker])) {
        let Some(a) = self.partner.iter().position(|&p| p == usize::MAX) else {
            visit(&self.partner, &self.trackers);
            return;
        };
        for b in a + 1..self.partner.len() {
            if self.partner[b] != usize::MAX || !(self.allowed)(a, b) {
                continue;
            }
            self.partner[a] = b;
            self.partner[b] = a;
            let undos: Vec<Undo> = self.trackers.iter_mut().map(|t| t.add(a, b)).collect();
            if self.trackers.iter().map(Tracker::bound).sum::<usize>() >= self.need {
                self.run(visit);
            }
            for (t, u) in self.trackers.iter_mut().zip(undos) {
                t.undo(u);
            }
            self.partner[a] = usize::MAX;
            self.partner[b] = usize::MAX;
        }
    }
}

/// `lim (1/n) E z_d(A)` for orthogonally invariant `A` with limiting spectral
/// moments `moments`, by summing the asymptotic Weingarten weights over the
/// geodesic half-edge matchings. Zero when `d` is not Eulerian or no local
/// matching reaches the minimal distance `|V| - 1`.
pub fn weingarten_limit(d: &Diagram, moments: &CumulantTable) -> Result<f64> {
    if moments.tag != TableTag::Moments {
        return precondition("weingarten_limit needs a moment table");
    }
    let class = classify(d);
    if !class.connected {
        return precondition("weingarten_limit needs a connected diagram");
    }
    let e = d.edge_count();
    if e > MAX_WEINGARTEN_EDGES {
        return Err(TampError::Size { what: "edges for the Weingarten route", got: e, cap: MAX_WEINGARTEN_EDGES });
    }
    if !class.eulerian {
        return Ok(0.0);
    }
    if e > 0 && moments.len() < e {
        return Err(TampError::TableTooShort { need: e, have: moments.len() });
    }
    let v = d.vertex_count();
    let h = 2 * e;
    let alpha = half_edge_matching(d);

    // local matchings at distance |V| - 1 from α̃, i.e. with |E| - |V| + 1 cycles
    let local_need = e + 1 - v;
    let mut locals: Vec<Vec<usize>> = Vec::new();
    let mut excess = false;
    {
        let same_vertex = |a: usize, b: usize| owner(d, a) == owner(d, b);
        let mut s = Search {
            partner: vec![usize::MAX; h],
            trackers: vec![Tracker::new(&alpha.partner)],
            allowed: &same_vertex,
            need: local_need,
        };
        s.run(&mut |p, t| {
            let c = t[0].closed.len();
            if c > local_need {
                excess = true;
            } else if c == local_need {
                locals.push(p.to_vec());
            }
        });
    }
    if excess {
        return Err(TampError::Precondition("a local matching is closer to the diagram than |V| - 1".into()));
    }

    let mut total = 0.0;
    for beta in &locals {
        // geodesics: Δ(β, γ) + Δ(γ, α̃) = |V| - 1
        let need = 2 * e + 1 - v;
        let any = |_: usize, _: usize| true;
        let mut s = Search {
            partner: vec![usize::MAX; h],
            trackers: vec![Tracker::new(beta), Tracker::new(&alpha.partner)],
            allowed: &any,
            need,
        };
        let mut err = None;
        s.run(&mut |_, t| {
            if t[0].closed.len() + t[1].closed.len() != need {
                return;
            }
            let mu: f64 = t[0]
                .closed
                .iter()
                .map(|&l| {
                    let c = catalan(l / 2 - 1) as f64;
                    if (l / 2) % 2 == 1 {
                        c
                    } else {
                        -c
                    }
                })
                .product();
            let mut m = 1.0;
            for &l in &t[1].closed {
                match moments.get(l / 2) {
                    Ok(x) => m *= x,
                    Err(x) => err = Some(x),
                }
            }
            total += mu * m;
        });
        if let Some(x) = err {
            return Err(x);
        }
    }
    Ok(total)
}
