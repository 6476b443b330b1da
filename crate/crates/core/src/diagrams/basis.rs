use std::collections::{BTreeMap, HashMap};

use crate::error::Result;

use super::canon::{canonical_form, canonicalize, CanonicalKey, DEFAULT_VERTEX_CAP};
use super::partition::{for_each_set_partition, quotient_by_labels};
use super::Diagram;
use crate::error::TampError;

/// Integer combination of diagrams, keyed by isomorphism class.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Expansion {
    terms: BTreeMap<CanonicalKey, (Diagram, i64)>,
}

impl Expansion {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(d: &Diagram) -> Result<Self> {
        let mut e = Self::new();
        e.add(d, 1)?;
        Ok(e)
    }

    /// Add `coeff` copies of `d`; zero coefficients are dropped.
    pub fn add(&mut self, d: &Diagram, coeff: i64) -> Result<()> {
        let (rep, key) = canonicalize(d)?;
        self.add_keyed(key, rep, coeff);
        Ok(())
    }

    fn add_keyed(&mut self, key: CanonicalKey, rep: Diagram, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let entry = self.terms.entry(key.clone()).or_insert((rep, 0));
        entry.1 += coeff;
        if entry.1 == 0 {
            self.terms.remove(&key);
        }
    }

    pub fn coefficient(&self, d: &Diagram) -> Result<i64> {
        Ok(self.terms.get(&canonical_form(d)?).map_or(0, |t| t.1))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Canonical representatives with their coefficients, in key order.
    pub fn iter(&self) -> impl Iterator<Item = (&Diagram, i64)> {
        self.terms.values().map(|(d, c)| (d, *c))
    }

    pub fn coefficient_sum(&self) -> i64 {
        self.terms.values().map(|t| t.1).sum()
    }

    fn axpy(&mut self, c: i64, other: &Expansion) {
        for (k, (d, v)) in &other.terms {
            self.add_keyed(k.clone(), d.clone(), c * v);
        }
    }
}

fn check_cap(d: &Diagram) -> Result<()> {
    if d.vertex_count() > DEFAULT_VERTEX_CAP {
        return Err(TampError::Size { what: "vertex count", got: d.vertex_count(), cap: DEFAULT_VERTEX_CAP });
    }
    Ok(())
}

/// `w_d = Σ_α c_{α,d} z_α`: counts of vertex partitions whose quotient is `α`.
pub fn w_to_z_coefficients(d: &Diagram) -> Result<Expansion> {
    check_cap(d)?;
    let mut counts: HashMap<CanonicalKey, (Diagram, i64)> = HashMap::new();
    let mut err = None;
    for_each_set_partition(d.vertex_count(), |labels, blocks| {
        if err.is_some() {
            return;
        }
        let q = quotient_by_labels(d, labels, blocks);
        match canonicalize(&q) {
            Ok((rep, key)) => counts.entry(key).or_insert((rep, 0)).1 += 1,
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let mut out = Expansion::new();
    for (k, (d, c)) in counts {
        out.add_keyed(k, d, c);
    }
    Ok(out)
}

/// `z_d = Σ_α c'_{α,d} w_α`, by recursively subtracting strictly coarser quotients.
pub fn z_to_w_coefficients(d: &Diagram) -> Result<Expansion> {
    check_cap(d)?;
    let mut memo = HashMap::new();
    z_to_w_memo(d, &mut memo)
}

fn z_to_w_memo(d: &Diagram, memo: &mut HashMap<CanonicalKey, Expansion>) -> Result<Expansion> {
    let (rep, key) = canonicalize(d)?;
    if let Some(e) = memo.get(&key) {
        return Ok(e.clone());
    }
    let mut out = Expansion::new();
    out.add_keyed(key.clone(), rep.clone(), 1);
    let w = w_to_z_coefficients(&rep)?;
    for (alpha, c) in w.iter() {
        // the only quotient on as many vertices is `d` itself
        if alpha.vertex_count() == rep.vertex_count() {
            continue;
        }
        let sub = z_to_w_memo(alpha, memo)?;
        out.axpy(-c, &sub);
    }
    memo.insert(key, out.clone());
    Ok(out)
}
