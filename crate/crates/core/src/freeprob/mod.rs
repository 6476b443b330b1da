//! Non-crossing partitions, free cumulants and the limiting traffic values
//! of orthogonally invariant and block-structured ensembles.

mod weingarten;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::diagrams::{classify, cycles_of_cactus, quotient, CycleBlocks, Diagram, VertexPartition};
use crate::error::{invalid, precondition, Result, TampError};

pub use weingarten::{half_edge_matching, weingarten_limit, HalfEdgeMatching, MAX_WEINGARTEN_EDGES};

pub const MAX_NC_POINTS: usize = 12;

/// Catalan number `C_k`.
pub fn catalan(k: usize) -> u64 {
    let mut c: u64 = 1;
    for i in 0..k as u64 {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c
}

/// `μ(0̂, π)` factor of one block of size `s` in NC: `(-1)^{s-1} Cat(s-1)`.
pub fn nc_mobius_block(s: usize) -> i64 {
    let c = catalan(s - 1) as i64;
    if s % 2 == 1 {
        c
    } else {
        -c
    }
}

/// A non-crossing partition of `{0, .., k-1}`; blocks sorted internally and by
/// least element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NCPartition {
    k: usize,
    blocks: Vec<Vec<usize>>,
}

impl NCPartition {
    pub fn new(k: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        VertexPartition::from_blocks(k, &blocks)?;
        let p = Self::normalized(k, blocks);
        if !p.is_noncrossing() {
            return invalid(format!("partition {:?} is crossing", p.blocks));
        }
        Ok(p)
    }

    fn normalized(k: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort();
        NCPartition { k, blocks }
    }

    pub fn discrete(k: usize) -> Self {
        NCPartition { k, blocks: (0..k).map(|i| vec![i]).collect() }
    }

    pub fn single_block(k: usize) -> Self {
        NCPartition { k, blocks: if k == 0 { vec![] } else { vec![(0..k).collect()] } }
    }

    pub fn len(&self) -> usize {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        self.k == 0
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    fn block_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.k];
        for (i, b) in self.blocks.iter().enumerate() {
            for &x in b {
                out[x] = i;
            }
        }
        out
    }

    /// No `a < b < c < d` with `a, c` in one block and `b, d` in another.
    pub fn is_noncrossing(&self) -> bool {
        let lab = self.block_of();
        let k = self.k;
        for a in 0..k {
            for b in a + 1..k {
                if lab[b] == lab[a] {
                    continue;
                }
                for c in b + 1..k {
                    if lab[c] != lab[a] {
                        continue;
                    }
                    for d in c + 1..k {
                        if lab[d] == lab[b] {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// `self` refines `other`.
    pub fn refines(&self, other: &NCPartition) -> bool {
        let lab = other.block_of();
        self.k == other.k && self.blocks.iter().all(|b| b.iter().all(|&x| lab[x] == lab[b[0]]))
    }
}

/// All non-crossing partitions of `{0, .., k-1}`.
pub fn enumerate_nc(k: usize) -> Result<Vec<NCPartition>> {
    if k == 0 || k > MAX_NC_POINTS {
        return Err(TampError::Size { what: "non-crossing partition size", got: k, cap: MAX_NC_POINTS });
    }
    let points: Vec<usize> = (0..k).collect();
    let mut out: Vec<NCPartition> = nc_of(&points).into_iter().map(|b| NCPartition::normalized(k, b)).collect();
    out.sort();
    Ok(out)
}

fn nc_of(points: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if points.is_empty() {
        return vec![Vec::new()];
    }
    let rest = &points[1..];
    let mut out = Vec::new();
    // the block of the first point, as a subset of the remaining points
    for mask in 0u32..(1 << rest.len()) {
        let mut block = vec![points[0]];
        let mut gaps: Vec<&[usize]> = Vec::new();
        let mut start = 0;
        for (i, &p) in rest.iter().enumerate() {
            if mask >> i & 1 == 1 {
                block.push(p);
                gaps.push(&rest[start..i]);
                start = i + 1;
            }
        }
        gaps.push(&rest[start..]);
        let mut partial: Vec<Vec<Vec<usize>>> = vec![vec![block]];
        for g in gaps {
            let subs = nc_of(g);
            partial = partial
                .iter()
                .flat_map(|p| {
                    subs.iter().map(move |s| {
                        let mut q = p.clone();
                        q.extend(s.iter().cloned());
                        q
                    })
                })
                .collect();
        }
        out.extend(partial);
    }
    out
}

/// Kreweras complement, read on the interleaved points and reflected so that
/// applying it twice is the identity.
pub fn kreweras(p: &NCPartition) -> Result<NCPartition> {
    if !p.is_noncrossing() {
        return invalid("kreweras needs a non-crossing partition");
    }
    let k = p.k;
    // π as a permutation: each block is a cycle in increasing order
    let mut inv = vec![0usize; k];
    for b in &p.blocks {
        for (i, &x) in b.iter().enumerate() {
            inv[b[(i + 1) % b.len()]] = x;
        }
    }
    let sigma: Vec<usize> = (0..k).map(|i| inv[(i + 1) % k]).collect();
    let mut seen = vec![false; k];
    let mut blocks = Vec::new();
    for s in 0..k {
        if seen[s] {
            continue;
        }
        let mut b = Vec::new();
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            b.push(k - 1 - x);
            x = sigma[x];
        }
        blocks.push(b);
    }
    Ok(NCPartition::normalized(k, blocks))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableTag {
    Cumulants,
    Moments,
}

/// `values[q-1]` holds the order-`q` cumulant or moment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CumulantTable {
    pub tag: TableTag,
    pub values: Vec<f64>,
}

impl CumulantTable {
    pub fn cumulants(values: Vec<f64>) -> Self {
        CumulantTable { tag: TableTag::Cumulants, values }
    }

    pub fn moments(values: Vec<f64>) -> Self {
        CumulantTable { tag: TableTag::Moments, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Order-`q` entry, `q >= 1`.
    pub fn get(&self, q: usize) -> Result<f64> {
        if q == 0 || q > self.values.len() {
            return Err(TampError::TableTooShort { need: q, have: self.values.len() });
        }
        Ok(self.values[q - 1])
    }

    /// Named presets of length `len`: `goe` (cumulants), `rom` (cumulants),
    /// `semicircle` (moments), `rademacher` (moments).
    pub fn preset(name: &str, len: usize) -> Result<Self> {
        let even = |f: &dyn Fn(usize) -> f64| -> Vec<f64> {
            (1..=len).map(|q| if q % 2 == 0 { f(q / 2) } else { 0.0 }).collect()
        };
        Ok(match name {
            "goe" => Self::cumulants((1..=len).map(|q| if q == 2 { 1.0 } else { 0.0 }).collect()),
            "rom" => Self::cumulants(even(&|h| nc_mobius_block(h) as f64)),
            "semicircle" => Self::moments(even(&|h| catalan(h) as f64)),
            "rademacher" => Self::moments(even(&|_| 1.0)),
            _ => return invalid(format!("unknown cumulant preset {name:?}")),
        })
    }

    /// Entries multiplied by `c^q`: the table of `c·X` from that of `X`.
    pub fn scaled(&self, c: f64) -> Self {
        let values = self.values.iter().enumerate().map(|(i, v)| v * c.powi(i as i32 + 1)).collect();
        CumulantTable { tag: self.tag, values }
    }
}

/// `m_q = Σ_{π∈NC(q)} Π_{b∈π} κ_{|b|}`, through the first-block recursion
/// `m_q = Σ_s κ_s Σ_{i_1+..+i_s = q-s} m_{i_1} .. m_{i_s}`.
pub fn cumulants_to_moments(t: &CumulantTable) -> Result<CumulantTable> {
    if t.tag != TableTag::Cumulants {
        return precondition("cumulants_to_moments needs a cumulant table");
    }
    let qmax = t.values.len();
    // m[0] = 1
    let mut m = vec![1.0; qmax + 1];
    for q in 1..=qmax {
        // conv[s][r] = Σ_{i_1+..+i_s=r} Π m_{i_j}, built up in s
        let mut acc = 0.0;
        let mut conv = vec![0.0; q];
        conv[0] = 1.0;
        for s in 1..=q {
            // conv <- conv * m, truncated to degree q - s
            let mut next = vec![0.0; q];
            for r in 0..=q - s {
                next[r] = (0..=r).map(|i| conv[r - i] * m[i]).sum();
            }
            conv = next;
            acc += t.values[s - 1] * conv[q - s];
        }
        m[q] = acc;
    }
    Ok(CumulantTable::moments(m[1..].to_vec()))
}

/// `κ_k = Σ_{π∈NC(k)} μ(π, 1̂) Π_b m_{|b|}` with `μ(π, 1̂) = μ(0̂, K(π))`.
pub fn moments_to_cumulants(t: &CumulantTable) -> Result<CumulantTable> {
    if t.tag != TableTag::Moments {
        return precondition("moments_to_cumulants needs a moment table");
    }
    let mut out = Vec::with_capacity(t.values.len());
    for k in 1..=t.values.len() {
        let mut acc = 0.0;
        for p in enumerate_nc(k)? {
            let mu: i64 = kreweras(&p)?.block_sizes().iter().map(|&s| nc_mobius_block(s)).product();
            let prod: f64 = p.block_sizes().iter().map(|&s| t.values[s - 1]).product();
            acc += mu as f64 * prod;
        }
        out.push(acc);
    }
    Ok(CumulantTable::cumulants(out))
}

/// A limiting normalized z-value together with whether the diagram was a cactus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrafficValue {
    pub value: f64,
    pub cactus: bool,
}

/// `Π_{ρ∈cyc(d)} κ_{|ρ|}` for a cactus; zero for other connected diagrams.
pub fn cactus_traffic_value(d: &Diagram, t: &CumulantTable) -> Result<TrafficValue> {
    if t.tag != TableTag::Cumulants {
        return precondition("cactus_traffic_value needs a cumulant table");
    }
    let class = classify(d);
    if !class.connected {
        return precondition("cactus_traffic_value needs a connected diagram");
    }
    if !class.cactus {
        return Ok(TrafficValue { value: 0.0, cactus: false });
    }
    let mut value = 1.0;
    for l in cycles_of_cactus(d)? {
        value *= t.get(l)?;
    }
    Ok(TrafficValue { value, cactus: true })
}

/// Limiting normalized w-value `Π_ρ m_{|ρ|}` of a cactus from spectral
/// moments, checked against the sum of z-values over the non-crossing
/// contractions of each cycle.
pub fn diagonal_from_spectral(d: &Diagram, moments: &CumulantTable) -> Result<f64> {
    if moments.tag != TableTag::Moments {
        return precondition("diagonal_from_spectral needs a moment table");
    }
    let lens = cycles_of_cactus(d)?;
    let direct: f64 = lens.iter().map(|&l| moments.get(l)).product::<Result<f64>>()?;

    let kappa = moments_to_cumulants(moments)?;
    let mut via_z = 1.0;
    for &l in &lens {
        let cyc = Diagram::cycle(l);
        let mut sum = 0.0;
        for p in enumerate_nc(l)? {
            let q = quotient(&cyc, &VertexPartition::from_blocks(l, p.blocks())?)?;
            sum += cactus_traffic_value(&q, &kappa)?.value;
        }
        via_z *= sum;
    }
    let scale = direct.abs().max(via_z.abs()).max(1.0);
    if (direct - via_z).abs() > 1e-9 * scale {
        return Err(TampError::RouteMismatch { a: direct, b: via_z });
    }
    Ok(direct)
}

/// Block-scale free cumulants `κ^{r,c}` of a symmetric `q × q` block matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockCumulants {
    q: usize,
    tables: BTreeMap<(usize, usize), CumulantTable>,
}

impl BlockCumulants {
    pub fn new(q: usize) -> Self {
        BlockCumulants { q, tables: BTreeMap::new() }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn set(&mut self, r: usize, c: usize, t: CumulantTable) -> Result<()> {
        if r >= self.q || c >= self.q {
            return invalid(format!("block ({r},{c}) out of range for q={}", self.q));
        }
        if t.tag != TableTag::Cumulants {
            return precondition("block tables must hold cumulants");
        }
        self.tables.insert((r.min(c), r.max(c)), t);
        Ok(())
    }

    pub fn get(&self, r: usize, c: usize) -> Result<&CumulantTable> {
        self.tables
            .get(&(r.min(c), r.max(c)))
            .ok_or_else(|| TampError::InvalidInput(format!("missing cumulant table for block ({r},{c})")))
    }

    /// Semicircular blocks with `κ_2^{r,c} = sigma[r][c] / q`, the block-scale
    /// cumulants of `BlockGOE(n, Σ)`.
    pub fn block_goe(sigma: &crate::matrix::Matrix, len: usize) -> Result<Self> {
        let q = sigma.dim()?;
        let mut out = BlockCumulants::new(q);
        for r in 0..q {
            for c in r..q {
                let mut v = vec![0.0; len.max(2)];
                v[1] = sigma.get(r, c) / q as f64;
                out.set(r, c, CumulantTable::cumulants(v))?;
            }
        }
        Ok(out)
    }
}

/// The limit `Z_σ(r)` of the z-value of a rooted cactus at an index of block `r`.
pub fn block_cactus_limit(d: &Diagram, r: usize, kappas: &BlockCumulants) -> Result<f64> {
    let Some(root) = d.root() else {
        return precondition("block_cactus_limit needs a rooted cactus");
    };
    if !classify(d).cactus {
        return precondition("block_cactus_limit needs a rooted cactus");
    }
    if r >= kappas.q {
        return invalid(format!("block {r} out of range for q={}", kappas.q));
    }
    let cb = CycleBlocks::new(d);
    hanging_block_value(d, &cb, kappas, root, None, r)
}

fn hanging_block_value(
    d: &Diagram,
    cb: &CycleBlocks,
    kappas: &BlockCumulants,
    v: usize,
    exclude: Option<usize>,
    r: usize,
) -> Result<f64> {
    let mut out = 1.0;
    for &b in &cb.at[v] {
        if Some(b) == exclude {
            continue;
        }
        let seq = cb.cycle_order(d, b, v);
        let l = seq.len();
        let value = if l % 2 == 0 {
            let mut sum = 0.0;
            for c in 0..kappas.q {
                let mut term = kappas.get(r, c)?.get(l)?;
                // positions 2..l of the cycle alternate between blocks c and r
                for (k, &u) in seq.iter().enumerate().skip(1) {
                    let block = if (k + 1) % 2 == 0 { c } else { r };
                    term *= hanging_block_value(d, cb, kappas, u, Some(b), block)?;
                }
                sum += term;
            }
            sum
        } else {
            let mut term = kappas.get(r, r)?.get(l)?;
            for &u in &seq[1..] {
                term *= hanging_block_value(d, cb, kappas, u, Some(b), r)?;
            }
            term
        };
        out *= value;
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
