//! Binary strings, zero-run (gap) encodings, and composition multisets.
//!
//! The gap encoding of a string of weight `d` is the integer string
//! `a_0 a_1 … a_d` where `a_i` counts the zeros between the `i`-th and
//! `(i+1)`-th one. It is a bijection between binary strings of length `n`
//! and weight `d` and non-negative integer strings of length `d+1` summing
//! to `n−d`, and it is the representation the reconstruction search works in.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StringError {
    #[error("string must contain only '0' and '1', found {0:?}")]
    BadSymbol(char),
    #[error("operation requires at least one '1' in the string")]
    AllZeros,
    #[error("gap index range {i}..={j} out of bounds for weight {d}")]
    GapIndex { i: usize, j: usize, d: usize },
    #[error("multiset line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A binary string, stored one symbol per byte (values 0/1).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bits: Vec<u8>,
}

impl BitString {
    pub fn new(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        BitString { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.bits.iter().map(|&b| b as usize).sum()
    }

    pub fn reversed(&self) -> BitString {
        let mut bits = self.bits.clone();
        bits.reverse();
        BitString { bits }
    }

    /// True iff the string starts with 1 and ends with 0, the class the
    /// reconstruction search is restricted to.
    pub fn is_reconstruction_class(&self) -> bool {
        self.bits.first() == Some(&1) && self.bits.last() == Some(&0)
    }

    /// Pack into a u64, first symbol in the most significant used bit, so
    /// numeric order equals lexicographic order. Requires `len ≤ 63`.
    pub fn pack(&self) -> u64 {
        assert!(self.len() <= 63);
        self.bits
            .iter()
            .fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
    }

    pub fn unpack(word: u64, n: usize) -> BitString {
        assert!(n <= 63);
        let bits = (0..n).map(|i| ((word >> (n - 1 - i)) & 1) as u8).collect();
        BitString { bits }
    }
}

impl FromStr for BitString {
    type Err = StringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                other => return Err(StringError::BadSymbol(other)),
            }
        }
        Ok(BitString { bits })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", b)?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", self)
    }
}

/// Zero-run encoding `a_0 … a_d` of a binary string of weight `d`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GapString {
    gaps: Vec<u64>,
}

impl GapString {
    pub fn new(gaps: Vec<u64>) -> Self {
        assert!(!gaps.is_empty());
        GapString { gaps }
    }

    pub fn gaps(&self) -> &[u64] {
        &self.gaps
    }

    /// Weight of the underlying binary string.
    pub fn weight(&self) -> usize {
        self.gaps.len() - 1
    }

    /// Length of the underlying binary string: sum of gaps plus weight.
    pub fn string_len(&self) -> usize {
        self.gaps.iter().sum::<u64>() as usize + self.weight()
    }
}

impl fmt::Debug for GapString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{:?}", self.gaps)
    }
}

/// Encode a string as its zero-run gap string. Errors on all-zero input,
/// which has no first one to anchor the runs.
pub fn gap_encode(s: &BitString) -> Result<GapString, StringError> {
    let d = s.weight();
    if d == 0 {
        return Err(StringError::AllZeros);
    }
    let mut gaps = Vec::with_capacity(d + 1);
    let mut run = 0u64;
    for &b in s.bits() {
        if b == 1 {
            gaps.push(run);
            run = 0;
        } else {
            run += 1;
        }
    }
    gaps.push(run);
    Ok(GapString { gaps })
}

/// Inverse of [`gap_encode`].
pub fn gap_decode(a: &GapString) -> BitString {
    let mut bits = Vec::with_capacity(a.string_len());
    for (i, &g) in a.gaps().iter().enumerate() {
        bits.extend(std::iter::repeat(0u8).take(g as usize));
        if i + 1 < a.gaps().len() {
            bits.push(1);
        }
    }
    BitString::new(bits)
}

/// Partial sum `a_i + … + a_j` of a gap string.
pub fn gap_sum(a: &GapString, i: usize, j: usize) -> Result<u64, StringError> {
    let d = a.weight();
    if i > j || j > d {
        return Err(StringError::GapIndex { i, j, d });
    }
    Ok(a.gaps()[i..=j].iter().sum())
}

/// Multiset of substring compositions `(ones, zeros) → multiplicity`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionMultiset {
    n: usize,
    entries: BTreeMap<(u32, u32), u64>,
}

impl CompositionMultiset {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &BTreeMap<(u32, u32), u64> {
        &self.entries
    }

    /// Total multiplicity; `n(n+1)/2` for any multiset produced by [`compose`].
    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }

    /// Entries as `(ones, zeros, multiplicity)` triples sorted by
    /// `(ones+zeros, ones)`, the canonical order of the text format. Also the
    /// canonical hashable key used by the oracle.
    pub fn canonical_triples(&self) -> Vec<(u32, u32, u64)> {
        let mut v: Vec<(u32, u32, u64)> =
            self.entries.iter().map(|(&(w, z), &m)| (w, z, m)).collect();
        v.sort_by_key(|&(w, z, _)| (w + z, w));
        v
    }

    /// Serialize to the text interchange format: a `# n=<n>` header followed
    /// by one `<ones> <zeros> <multiplicity>` line per entry, sorted by
    /// `(ones+zeros, ones)`.
    pub fn to_text(&self) -> String {
        let mut out = format!("# n={}\n", self.n);
        for (w, z, m) in self.canonical_triples() {
            out.push_str(&format!("{} {} {}\n", w, z, m));
        }
        out
    }

    /// Parse the text interchange format. Validates the structural
    /// invariants: per-length multiplicities summing to `n−L+1` and exactly
    /// one full-length entry.
    pub fn from_text(text: &str) -> Result<CompositionMultiset, StringError> {
        let mut n: Option<usize> = None;
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let t = raw.trim();
            if t.is_empty() {
                continue;
            }
            if let Some(rest) = t.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(v) = rest.strip_prefix("n=") {
                    let parsed = v.trim().parse::<usize>().map_err(|e| StringError::Parse {
                        line,
                        msg: format!("bad n: {e}"),
                    })?;
                    n = Some(parsed);
                }
                continue;
            }
            let mut it = t.split_whitespace();
            let mut next_num = |name: &str| -> Result<u64, StringError> {
                it.next()
                    .ok_or_else(|| StringError::Parse {
                        line,
                        msg: format!("missing {name}"),
                    })?
                    .parse::<u64>()
                    .map_err(|e| StringError::Parse {
                        line,
                        msg: format!("bad {name}: {e}"),
                    })
            };
            let w = next_num("ones")? as u32;
            let z = next_num("zeros")? as u32;
            let m = next_num("multiplicity")?;
            if m == 0 {
                return Err(StringError::Parse {
                    line,
                    msg: "zero multiplicity".into(),
                });
            }
            if entries.insert((w, z), m).is_some() {
                return Err(StringError::Parse {
                    line,
                    msg: format!("duplicate entry for composition ({w},{z})"),
                });
            }
        }
        let n = n.ok_or(StringError::Parse {
            line: 0,
            msg: "missing '# n=<n>' header".into(),
        })?;
        let ms = CompositionMultiset { n, entries };
        ms.validate()?;
        Ok(ms)
    }

    /// Check the multiset invariants against the declared `n`.
    pub fn validate(&self) -> Result<(), StringError> {
        let bad = |msg: String| StringError::Parse { line: 0, msg };
        let mut per_len: BTreeMap<u32, u64> = BTreeMap::new();
        for (&(w, z), &m) in &self.entries {
            let len = w + z;
            if len == 0 || len as usize > self.n {
                return Err(bad(format!("composition length {len} outside 1..={}", self.n)));
            }
            *per_len.entry(len).or_insert(0) += m;
        }
        for len in 1..=self.n as u32 {
            let have = per_len.get(&len).copied().unwrap_or(0);
            let want = (self.n as u64) - u64::from(len) + 1;
            if have != want {
                return Err(bad(format!(
                    "length-{len} multiplicities sum to {have}, expected {want}"
                )));
            }
        }
        let full: Vec<_> = self
            .entries
            .keys()
            .filter(|&&(w, z)| (w + z) as usize == self.n)
            .collect();
        if full.len() != 1 {
            return Err(bad(format!(
                "expected exactly one full-length composition, found {}",
                full.len()
            )));
        }
        Ok(())
    }
}

/// Composition multiset of all contiguous substrings, via the running
/// prefix-count scan over the `n(n+1)/2` start/end pairs.
pub fn compose(s: &BitString) -> CompositionMultiset {
    let n = s.len();
    let bits = s.bits();
    let mut entries: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for start in 0..n {
        let mut ones = 0u32;
        let mut zeros = 0u32;
        for &b in &bits[start..] {
            if b == 1 {
                ones += 1;
            } else {
                zeros += 1;
            }
            *entries.entry((ones, zeros)).or_insert(0) += 1;
        }
    }
    CompositionMultiset { n, entries }
}

/// True iff every same-length prefix/suffix pair has distinct weights, for
/// lengths `1..=n−1`. Strings with this property reconstruct without
/// backtracking.
pub fn prefix_suffix_weights_distinct(s: &BitString) -> bool {
    let n = s.len();
    let bits = s.bits();
    let mut wp = 0u32;
    let mut ws = 0u32;
    for j in 1..n {
        wp += u32::from(bits[j - 1]);
        ws += u32::from(bits[n - j]);
        if wp == ws {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn gap_encode_examples() {
        assert_eq!(gap_encode(&bs("10011010")).unwrap().gaps(), &[0, 2, 0, 1, 1]);
        assert_eq!(gap_encode(&bs("1010")).unwrap().gaps(), &[0, 1, 1]);
        assert_eq!(gap_encode(&bs("10")).unwrap().gaps(), &[0, 1]);
        assert_eq!(gap_encode(&bs("0000")), Err(StringError::AllZeros));
    }

    #[test]
    fn gap_decode_examples() {
        assert_eq!(gap_decode(&GapString::new(vec![0, 2, 0, 1, 1])), bs("10011010"));
        assert_eq!(gap_decode(&GapString::new(vec![0, 1])), bs("10"));
        // n = sum + d forces length 2 here.
        assert_eq!(gap_decode(&GapString::new(vec![1, 0])), bs("01"));
        assert_eq!(gap_decode(&GapString::new(vec![2])), bs("00"));
    }

    #[test]
    fn gap_roundtrip_exhaustive_small() {
        for n in 1..=14usize {
            for v in 0..(1u64 << n) {
                let s = BitString::unpack(v, n);
                if s.weight() == 0 {
                    continue;
                }
                let a = gap_encode(&s).unwrap();
                assert_eq!(a.gaps().iter().sum::<u64>() as usize, n - a.weight());
                assert_eq!(gap_decode(&a), s);
            }
        }
    }

    #[test]
    fn gap_sum_examples() {
        let a = gap_encode(&bs("10011010")).unwrap();
        assert_eq!(gap_sum(&a, 1, 3).unwrap(), 3);
        assert_eq!(gap_sum(&a, 2, 2).unwrap(), 0);
        let b = gap_encode(&bs("1010")).unwrap();
        assert_eq!(gap_sum(&b, 0, 2).unwrap(), 2);
        assert!(gap_sum(&b, 1, 3).is_err());
    }

    #[test]
    fn compose_reference_example() {
        let m = compose(&bs("1001"));
        let want: Vec<((u32, u32), u64)> = vec![
            ((0, 1), 2),
            ((0, 2), 1),
            ((1, 0), 2),
            ((1, 1), 2),
            ((1, 2), 2),
            ((2, 2), 1),
        ];
        let got: Vec<_> = m.entries().iter().map(|(&k, &v)| (k, v)).collect();
        assert_eq!(got, want);
        assert_eq!(m.total(), 10);
    }

    #[test]
    fn compose_degenerate() {
        let m = compose(&bs("1"));
        assert_eq!(m.canonical_triples(), vec![(1, 0, 1)]);
        let m = compose(&bs("111"));
        assert_eq!(m.canonical_triples(), vec![(1, 0, 3), (2, 0, 2), (3, 0, 1)]);
    }

    #[test]
    fn compose_invariants_exhaustive() {
        for n in 1..=12usize {
            for v in 0..(1u64 << n) {
                let s = BitString::unpack(v, n);
                let m = compose(&s);
                assert_eq!(m.total() as usize, n * (n + 1) / 2);
                assert_eq!(m, compose(&s.reversed()));
                m.validate().unwrap();
            }
        }
    }

    #[test]
    fn prefix_suffix_examples() {
        assert!(prefix_suffix_weights_distinct(&bs("10")));
        assert!(!prefix_suffix_weights_distinct(&bs("1010")));
        assert!(prefix_suffix_weights_distinct(&bs("110100")));
    }

    #[test]
    fn multiset_text_roundtrip() {
        let m = compose(&bs("10011010"));
        let text = m.to_text();
        assert!(text.starts_with("# n=8\n"));
        let back = CompositionMultiset::from_text(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn multiset_text_rejects_corruption() {
        let m = compose(&bs("1001"));
        let mut text = m.to_text();
        text.push_str("3 3 1\n");
        assert!(CompositionMultiset::from_text(&text).is_err());
    }
}
