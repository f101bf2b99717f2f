//! Brute-force ground truth for small lengths.
//!
//! [`ClassTable`] enumerates every string of a given length and groups them
//! by composition multiset, giving an independent oracle for what the solver
//! must return. [`naive_residual`] recomputes the solver's per-step residual
//! polynomial by explicit polynomial arithmetic, cross-checking the fast
//! cached-evaluation path. Everything here favours obviousness over speed.

use rustc_hash::FxHashMap;
use std::hash::{Hash, Hasher};
use thiserror::Error;

use crate::parallel;
use crate::poly::BiPoly;
use crate::strings::{compose, BitString, CompositionMultiset};

/// Default exhaustive-enumeration guard; override with the
/// `POLYRECON_ORACLE_MAX_N` environment variable.
pub const DEFAULT_MAX_N: usize = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("length {n} exceeds the oracle guard {max} (set POLYRECON_ORACLE_MAX_N to raise)")]
    OverGuard { n: usize, max: usize },
    #[error("multiset has invalid structure: {0}")]
    BadMultiset(String),
    #[error("multiset does not match any length-{0} string")]
    NoMatch(usize),
}

fn guard_limit() -> usize {
    std::env::var("POLYRECON_ORACLE_MAX_N")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_N)
}

fn triples_hash(triples: &[(u32, u32, u64)]) -> u64 {
    let mut h = rustc_hash::FxHasher::default();
    triples.hash(&mut h);
    h.finish()
}

/// All strings of one length, partitioned by composition multiset.
pub struct ClassTable {
    n: usize,
    classes: Vec<Vec<u64>>,
    /// canonical-triples hash → indices into `classes` (collisions resolved
    /// by exact comparison at lookup time)
    buckets: FxHashMap<u64, Vec<u32>>,
}

/// Exhaustively enumerate all `2^n` strings and group them by multiset.
pub fn build_classes(n: usize) -> Result<ClassTable, OracleError> {
    build_classes_impl(n, false)
}

/// Sequential reference path, kept callable for benchmarks.
#[doc(hidden)]
pub fn build_classes_sequential(n: usize) -> Result<ClassTable, OracleError> {
    build_classes_impl(n, true)
}

fn build_classes_impl(n: usize, sequential: bool) -> Result<ClassTable, OracleError> {
    let max = guard_limit();
    if n > max || n >= 63 {
        return Err(OracleError::OverGuard { n, max });
    }
    type Acc = FxHashMap<u64, Vec<u64>>;
    let merge = |mut a: Acc, b: Acc| {
        for (k, mut v) in b {
            a.entry(k).or_default().append(&mut v);
        }
        a
    };
    let scan = |mut acc: Acc, range: std::ops::Range<u64>| {
        for v in range {
            let s = BitString::unpack(v, n);
            let key = triples_hash(&compose(&s).canonical_triples());
            acc.entry(key).or_default().push(v);
        }
        acc
    };
    let chunk = ((1u64 << n) / 64).max(1024);
    let by_hash = if sequential {
        parallel::fold_range_chunks_seq(0..1u64 << n, chunk, Acc::default(), scan, merge)
    } else {
        parallel::fold_range_chunks(0..1u64 << n, chunk, Acc::default(), scan, merge)
    };

    // Hash buckets are almost always a single class; split the rare
    // collisions by exact multiset comparison.
    let mut classes: Vec<Vec<u64>> = Vec::new();
    let mut buckets: FxHashMap<u64, Vec<u32>> = FxHashMap::default();
    for (key, members) in by_hash {
        let mut split: Vec<(Vec<(u32, u32, u64)>, Vec<u64>)> = Vec::new();
        for v in members {
            let triples = compose(&BitString::unpack(v, n)).canonical_triples();
            match split.iter_mut().find(|(t, _)| *t == triples) {
                Some((_, list)) => list.push(v),
                None => split.push((triples, vec![v])),
            }
        }
        for (_, mut list) in split {
            list.sort_unstable();
            buckets.entry(key).or_default().push(classes.len() as u32);
            classes.push(list);
        }
    }
    Ok(ClassTable {
        n,
        classes,
        buckets,
    })
}

impl ClassTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> impl Iterator<Item = Vec<BitString>> + '_ {
        self.classes
            .iter()
            .map(|c| c.iter().map(|&v| BitString::unpack(v, self.n)).collect())
    }

    /// All strings sharing the composition multiset of `s`.
    pub fn class_of(&self, s: &BitString) -> Vec<BitString> {
        assert_eq!(s.len(), self.n);
        let triples = compose(s).canonical_triples();
        self.lookup_triples(&triples).unwrap_or_default()
    }

    fn lookup_triples(&self, triples: &[(u32, u32, u64)]) -> Option<Vec<BitString>> {
        let ids = self.buckets.get(&triples_hash(triples))?;
        for &id in ids {
            let class = &self.classes[id as usize];
            let rep = BitString::unpack(class[0], self.n);
            if compose(&rep).canonical_triples() == triples {
                return Some(class.iter().map(|&v| BitString::unpack(v, self.n)).collect());
            }
        }
        None
    }

    /// Strings with the given multiset, restricted to the class the solver
    /// works in (start 1, end 0).
    pub fn reconstruct_by_lookup(
        &self,
        m: &CompositionMultiset,
    ) -> Result<Vec<BitString>, OracleError> {
        if m.n() != self.n {
            return Err(OracleError::BadMultiset(format!(
                "multiset is for n={}, table is for n={}",
                m.n(),
                self.n
            )));
        }
        m.validate()
            .map_err(|e| OracleError::BadMultiset(e.to_string()))?;
        let class = self
            .lookup_triples(&m.canonical_triples())
            .ok_or(OracleError::NoMatch(self.n))?;
        Ok(class
            .into_iter()
            .filter(|s| s.is_reconstruction_class())
            .collect())
    }
}

/// Dense coefficient vector of the block polynomial
/// `y^start (1 + y + … + y^gap)` used by the residual cross-check.
fn block_vec(start: u64, gap: u64) -> Vec<i64> {
    let mut v = vec![0i64; (start + gap + 1) as usize];
    for e in start..=start + gap {
        v[e as usize] = 1;
    }
    v
}

fn mul_dense(a: &[i64], b: &[i64]) -> Vec<i64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn trim(mut v: Vec<i64>) -> Vec<i64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// Residual polynomial of step `j` by explicit polynomial subtraction:
/// the `x^j` slice of `F` minus the convolution of the coefficient blocks
/// fixed so far. `low` holds `a_0 … a_(j−1)`, `high` holds
/// `a_(d−j+1) … a_d`; both have length `j`.
///
/// Returns the dense coefficient vector in `y` (trailing zeros trimmed).
/// On a history matching a real string the result equals
/// `α_0 β_j + α_j β_0`, so every coefficient is 0, 1 or 2.
pub fn naive_residual(low: &[u64], high: &[u64], f: &BiPoly, j: usize) -> Vec<i64> {
    assert_eq!(low.len(), j);
    assert_eq!(high.len(), j);
    assert!(j >= 1);

    let mut slice = vec![0i64; f.deg_y() as usize + 1];
    for ((a, b), c) in f.terms() {
        if a as usize == j {
            slice[b as usize] += c;
        }
    }

    // g_0^(k−1) prefix sums of the low gaps; suffix sums of the high gaps.
    let mut low_pref = vec![0u64; j + 1];
    for k in 0..j {
        low_pref[k + 1] = low_pref[k] + low[k];
    }
    let mut high_suff = vec![0u64; j + 1];
    for k in 0..j {
        high_suff[k + 1] = high_suff[k] + high[j - 1 - k];
    }

    for k in 1..j {
        let alpha = block_vec(low_pref[k], low[k]);
        let beta = block_vec(high_suff[j - k], high[k - 1]);
        let prod = mul_dense(&alpha, &beta);
        if prod.len() > slice.len() {
            slice.resize(prod.len(), 0);
        }
        for (e, &c) in prod.iter().enumerate() {
            slice[e] -= c;
        }
    }
    trim(slice)
}
