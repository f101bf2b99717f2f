//! Reconstruction codebooks.
//!
//! A reconstruction code is a set of equal-length strings with pairwise
//! distinct composition multisets. The base family `sr` consists of strings
//! `s_1 = 0`, `s_n = 1` whose mismatch positions against their mirror image
//! carry a ballot-type subsequence in the first half; every same-length
//! prefix/suffix pair of such a string has distinct weights, so the family
//! `p` of their reversals decodes with no pauses at all. The families `q`
//! and `r` wrap smaller `sr` cores in `1^k 0 … 1^k 0` / `1^k 0 … 1^k 00`
//! sleeves; their words can pause but never on the suffix-led branch, so
//! taking the prefix-led branch first decodes them without backtracking.
//! The family `t` is the deduplicated union of `p`, `q`, `r`.
//!
//! Words are stored packed into `u64`s, most significant bit first, so the
//! numeric order is the lexicographic order of the strings.

use rand::Rng;
use thiserror::Error;

use crate::parallel;
use crate::poly::product_poly;
use crate::reconstruct::{self, pause_profile, PauseType, ReconConfig, SearchStatus};
use crate::strings::{compose, BitString};

/// Largest length generated in memory; `|t(28)|` is around ten million
/// words, which is where desk-scale enumeration stops being reasonable.
pub const MAX_GEN_N: usize = 28;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodeError {
    #[error("family {family} requires n >= {min}, got {n}")]
    TooShort {
        family: Family,
        min: usize,
        n: usize,
    },
    #[error("generation for n = {n} exceeds the in-memory cap {MAX_GEN_N}")]
    TooLarge { n: usize },
    #[error("bounds overflow u128 for n = {0}")]
    BoundsOverflow(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Sr,
    P,
    Q,
    R,
    T,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Sr => "sr",
            Family::P => "p",
            Family::Q => "q",
            Family::R => "r",
            Family::T => "t",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sr" => Ok(Family::Sr),
            "p" => Ok(Family::P),
            "q" => Ok(Family::Q),
            "r" => Ok(Family::R),
            "t" => Ok(Family::T),
            other => Err(format!("unknown family {other:?} (expected sr|p|q|r|t)")),
        }
    }
}

/// A generated codebook: sorted, deduplicated packed words of one length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    n: usize,
    family: Family,
    words: Vec<u64>,
}

impl Codebook {
    pub fn from_packed(n: usize, family: Family, mut words: Vec<u64>) -> Codebook {
        words.sort_unstable();
        words.dedup();
        Codebook { n, family, words }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn packed(&self) -> &[u64] {
        &self.words
    }

    pub fn words(&self) -> impl Iterator<Item = BitString> + '_ {
        self.words.iter().map(|&w| BitString::unpack(w, self.n))
    }

    pub fn contains(&self, s: &BitString) -> bool {
        s.len() == self.n && self.words.binary_search(&s.pack()).is_ok()
    }

    /// One word per line, sorted.
    pub fn to_lines(&self) -> String {
        let mut out = String::with_capacity(self.words.len() * (self.n + 1));
        for w in self.words() {
            out.push_str(&w.to_string());
            out.push('\n');
        }
        out
    }
}

fn check_size(family: Family, n: usize, min: usize) -> Result<(), CodeError> {
    if n < min {
        return Err(CodeError::TooShort { family, min, n });
    }
    if n > MAX_GEN_N {
        return Err(CodeError::TooLarge { n });
    }
    Ok(())
}

/// Every prefix of a ballot string has at least as many zeros as ones.
pub fn is_ballot(bits: &[u8]) -> bool {
    let mut balance = 0i64;
    for &b in bits {
        balance += if b == 0 { 1 } else { -1 };
        if balance < 0 {
            return false;
        }
    }
    true
}

fn ballot_strings(len: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = vec![0u8; len];
    fn rec(cur: &mut Vec<u8>, pos: usize, balance: i64, out: &mut Vec<Vec<u8>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        cur[pos] = 0;
        rec(cur, pos + 1, balance + 1, out);
        if balance > 0 {
            cur[pos] = 1;
            rec(cur, pos + 1, balance - 1, out);
        }
    }
    rec(&mut cur, 0, 0, &mut out);
    out
}

/// Enumerate the even-length base family: choose the mismatch set over
/// positions `2..=n/2`, a ballot assignment on it, and free bits elsewhere;
/// the second half mirrors the first (flipped on mismatch positions and at
/// the ends).
fn sr_even_words(n: usize, sequential: bool) -> Vec<u64> {
    debug_assert!(n % 2 == 0 && n >= 4);
    let m = n / 2;
    let slots = m - 1; // positions 2..=m
    let per_mask = move |mask: u64| {
        let mut jpos = Vec::new();
        let mut fpos = Vec::new();
        for i in 0..slots {
            if (mask >> i) & 1 == 1 {
                jpos.push(i + 2);
            } else {
                fpos.push(i + 2);
            }
        }
        let mut out = Vec::new();
        let mut bits = vec![0u8; n];
        for ballot in ballot_strings(jpos.len()) {
            for free in 0..1u64 << fpos.len() {
                for (idx, &pos) in jpos.iter().enumerate() {
                    bits[pos - 1] = ballot[idx];
                }
                for (idx, &pos) in fpos.iter().enumerate() {
                    bits[pos - 1] = ((free >> idx) & 1) as u8;
                }
                bits[0] = 0;
                // Mirror; position 1 and the mismatch set flip.
                for i in 1..=m {
                    let flip = i == 1 || ((i >= 2) && (mask >> (i - 2)) & 1 == 1);
                    bits[n - i] = bits[i - 1] ^ u8::from(flip);
                }
                out.push(BitString::new(bits.clone()).pack());
            }
        }
        out
    };
    if sequential {
        parallel::flat_map_range_seq(0..1u64 << slots, per_mask)
    } else {
        parallel::flat_map_range(0..1u64 << slots, per_mask)
    }
}

fn insert_middle(word: u64, n_even: usize, bit: u64) -> u64 {
    let half = n_even / 2;
    let low_len = n_even - half;
    let low_mask = (1u64 << low_len) - 1;
    let high = word >> low_len;
    let low = word & low_mask;
    (high << (low_len + 1)) | (bit << low_len) | low
}

/// The base reconstruction code: strings starting 0, ending 1, with the
/// mirror/ballot structure. Odd lengths are both middle-bit insertions into
/// the even family one shorter.
pub fn gen_sr(n: usize) -> Result<Codebook, CodeError> {
    gen_sr_impl(n, false)
}

/// Sequential reference path, kept callable for benchmarks.
#[doc(hidden)]
pub fn gen_sr_sequential(n: usize) -> Result<Codebook, CodeError> {
    gen_sr_impl(n, true)
}

fn gen_sr_impl(n: usize, sequential: bool) -> Result<Codebook, CodeError> {
    check_size(Family::Sr, n, 4)?;
    let words = if n % 2 == 0 {
        sr_even_words(n, sequential)
    } else {
        sr_even_words(n - 1, sequential)
            .into_iter()
            .flat_map(|w| [insert_middle(w, n - 1, 0), insert_middle(w, n - 1, 1)])
            .collect()
    };
    Ok(Codebook::from_packed(n, Family::Sr, words))
}

/// Reversals of the base family; these start 1, end 0, and have all
/// prefix/suffix weights distinct.
pub fn gen_p(n: usize) -> Result<Codebook, CodeError> {
    let sr = gen_sr(n)?;
    let words = sr.words().map(|w| w.reversed().pack()).collect();
    Ok(Codebook::from_packed(n, Family::P, words))
}

fn sleeve(core: &BitString, k: usize, trailing_zeros: usize) -> u64 {
    let mut bits = Vec::with_capacity(core.len() + 2 * k + trailing_zeros);
    bits.extend(std::iter::repeat(1u8).take(k));
    bits.extend_from_slice(core.bits());
    bits.extend(std::iter::repeat(1u8).take(k - 1));
    bits.extend(std::iter::repeat(0u8).take(trailing_zeros));
    BitString::new(bits).pack()
}

/// Words `1^k 0 … 1^k 0` around a base core of length `n − 2k`. Lengths
/// with no valid sleeve width give an empty book, not an error.
pub fn gen_q(n: usize) -> Result<Codebook, CodeError> {
    check_size(Family::Q, n, 2)?;
    let mut words = Vec::new();
    for k in 1.. {
        let core_len = n as i64 - 2 * k as i64;
        if core_len < 4 {
            break;
        }
        let core = gen_sr(core_len as usize)?;
        words.extend(core.words().map(|c| sleeve(&c, k, 1)));
    }
    Ok(Codebook::from_packed(n, Family::Q, words))
}

/// Words `1^k 0 … 1^k 00` around a base core of length `n − 2k − 1`.
pub fn gen_r(n: usize) -> Result<Codebook, CodeError> {
    check_size(Family::R, n, 2)?;
    let mut words = Vec::new();
    for k in 1.. {
        let core_len = n as i64 - 2 * k as i64 - 1;
        if core_len < 4 {
            break;
        }
        let core = gen_sr(core_len as usize)?;
        words.extend(core.words().map(|c| sleeve(&c, k, 2)));
    }
    Ok(Codebook::from_packed(n, Family::R, words))
}

/// The enlarged code: union of `p`, `q` and `r`.
pub fn gen_t(n: usize) -> Result<Codebook, CodeError> {
    check_size(Family::T, n, 8)?;
    let mut words = gen_p(n)?.words.clone();
    words.extend_from_slice(&gen_q(n)?.words);
    words.extend_from_slice(&gen_r(n)?.words);
    Ok(Codebook::from_packed(n, Family::T, words))
}

pub fn generate(family: Family, n: usize) -> Result<Codebook, CodeError> {
    match family {
        Family::Sr => gen_sr(n),
        Family::P => gen_p(n),
        Family::Q => gen_q(n),
        Family::R => gen_r(n),
        Family::T => gen_t(n),
    }
}

/// Structural membership test for the base family.
pub fn is_sr_word(s: &BitString) -> bool {
    let n = s.len();
    if n < 2 {
        return false;
    }
    if n % 2 == 1 {
        let mut bits = s.bits().to_vec();
        bits.remove((n - 1) / 2);
        return is_sr_word(&BitString::new(bits));
    }
    let bits = s.bits();
    if bits[0] != 0 || bits[n - 1] != 1 {
        return false;
    }
    let mut ballot_bits = Vec::new();
    for i in 2..=n / 2 {
        if bits[i - 1] != bits[n - i] {
            ballot_bits.push(bits[i - 1]);
        }
    }
    is_ballot(&ballot_bits)
}

pub fn is_p_word(s: &BitString) -> bool {
    is_sr_word(&s.reversed())
}

/// If `s` is `1^k 0 core 1^(k−1) 0` with a base-family core of length at
/// least 4, return `k`.
pub fn q_sleeve(s: &BitString) -> Option<usize> {
    let n = s.len();
    let bits = s.bits();
    let k = bits.iter().take_while(|&&b| b == 1).count();
    if k == 0 || n < 2 * k + 4 {
        return None;
    }
    // suffix 1^k 0
    if bits[n - 1] != 0 || bits[n - k - 1..n - 1].iter().any(|&b| b != 1) {
        return None;
    }
    let core = BitString::new(bits[k..n - k].to_vec());
    is_sr_word(&core).then_some(k)
}

/// If `s` is `1^k 0 core 1^(k−1) 00` with a base-family core of length at
/// least 4, return `k`.
pub fn r_sleeve(s: &BitString) -> Option<usize> {
    let n = s.len();
    let bits = s.bits();
    let k = bits.iter().take_while(|&&b| b == 1).count();
    if k == 0 || n < 2 * k + 5 {
        return None;
    }
    // suffix 1^k 0 0
    if bits[n - 1] != 0
        || bits[n - 2] != 0
        || bits[n - k - 2..n - 2].iter().any(|&b| b != 1)
    {
        return None;
    }
    let core = BitString::new(bits[k..n - k - 1].to_vec());
    is_sr_word(&core).then_some(k)
}

pub fn is_t_word(s: &BitString) -> bool {
    is_p_word(s) || q_sleeve(s).is_some() || r_sleeve(s).is_some()
}

fn structural_ok(family: Family, s: &BitString) -> bool {
    match family {
        Family::Sr => is_sr_word(s),
        Family::P => is_p_word(s),
        Family::Q => q_sleeve(s).is_some(),
        Family::R => r_sleeve(s).is_some(),
        Family::T => is_t_word(s),
    }
}

/// Verification report for a codebook; `violations` holds one line per
/// failed word, capped.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub n: usize,
    pub family: Family,
    pub word_count: usize,
    pub structural_ok: bool,
    pub distinct_multisets: bool,
    pub zero_backtracks: bool,
    pub no_type2_pauses: bool,
    /// Every word is the first string the solver emits for its multiset.
    pub decodes_to_self: bool,
    /// Every word is the only class string with its multiset. Sleeved words
    /// can share a multiset with a non-codeword (first seen at n = 8: the
    /// alternate tuple of a pause can complete to a valid string), which
    /// leaves the code valid and the decoder exact but the full search
    /// non-singleton.
    pub unique_decodes: bool,
    pub violations: Vec<String>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.structural_ok
            && self.distinct_multisets
            && self.zero_backtracks
            && self.no_type2_pauses
            && self.decodes_to_self
    }
}

const MAX_VIOLATIONS: usize = 20;

/// Check a codebook: family structure per word, pairwise distinct
/// multisets, zero-backtrack decoding, and the absence of suffix-led
/// (type-2) pauses.
///
/// Base-family words are decoded through their reversals, which is the form
/// the solver accepts. Distinctness is checked directly against the
/// composition multisets for `n ≤ 16`, and via the decoded canonical
/// representative above that (two words sharing a multiset decode to the
/// same singleton).
pub fn verify_codebook(cb: &Codebook) -> VerifyReport {
    verify_codebook_with(cb, true)
}

/// [`verify_codebook`] with the per-word structure check made optional, for
/// books loaded from files of unknown family.
pub fn verify_codebook_with(cb: &Codebook, check_structure: bool) -> VerifyReport {
    let cfg = ReconConfig::default();
    let words: Vec<BitString> = cb.words().collect();

    struct WordCheck {
        structural: bool,
        /// Sorted full result set of the decode; an exact stand-in for the
        /// word's composition multiset.
        class_rep: Option<Vec<u64>>,
        backtracks: u64,
        singleton: bool,
        type2: bool,
        note: Option<String>,
    }

    let checks = parallel::map_slice(&words, |w| {
        let structural = !check_structure || structural_ok(cb.family, w);
        let class_word = if cb.family == Family::Sr {
            w.reversed()
        } else {
            w.clone()
        };
        let mut note = None;
        let mut backtracks = 0;
        let mut class_rep = None;
        let mut singleton = false;
        if !class_word.is_reconstruction_class() {
            note = Some(format!("{w}: not decodable (class word must start 1, end 0)"));
        } else {
            match reconstruct::reconstruct(&product_poly(&class_word), &cfg) {
                Err(e) => note = Some(format!("{w}: {e}")),
                Ok(report) => {
                    backtracks = report.backtracks;
                    // The first result is what decoding returns; it must be
                    // the codeword.
                    if report.status != SearchStatus::Found
                        || report.results[0].string != class_word
                    {
                        note = Some(format!(
                            "{w}: decoded to {:?} instead of itself",
                            report.strings()
                        ));
                    } else {
                        singleton = report.results.len() == 1;
                        let mut rep: Vec<u64> =
                            report.results.iter().map(|r| r.string.pack()).collect();
                        rep.sort_unstable();
                        class_rep = Some(rep);
                    }
                }
            }
        }
        let type2 = class_word.is_reconstruction_class()
            && pause_profile(&class_word)
                .iter()
                .any(|&(_, t)| matches!(t, PauseType::Type2 | PauseType::Both));
        WordCheck {
            structural,
            class_rep,
            backtracks,
            singleton,
            type2,
            note,
        }
    });

    let mut violations = Vec::new();
    let mut push = |v: String| {
        if violations.len() < MAX_VIOLATIONS {
            violations.push(v);
        }
    };

    let mut structural_all = true;
    let mut zero_backtracks = true;
    let mut no_type2 = true;
    let mut decodes_to_self = true;
    let mut unique_decodes = true;
    for (w, c) in words.iter().zip(&checks) {
        if !c.structural {
            structural_all = false;
            push(format!("{w}: fails {} structure", cb.family));
        }
        if c.backtracks > 0 {
            zero_backtracks = false;
            push(format!("{w}: {} backtracks", c.backtracks));
        }
        if c.type2 {
            no_type2 = false;
            push(format!("{w}: has a type-2 pause"));
        }
        unique_decodes &= c.singleton;
        if let Some(note) = &c.note {
            decodes_to_self = false;
            push(note.clone());
        }
    }

    let distinct = if cb.n <= 16 {
        let mut keys: Vec<Vec<(u32, u32, u64)>> = words
            .iter()
            .map(|w| compose(w).canonical_triples())
            .collect();
        keys.sort_unstable();
        let before = keys.len();
        keys.dedup();
        if keys.len() != before {
            push("duplicate composition multisets".into());
        }
        keys.len() == before
    } else {
        let mut reps: Vec<Vec<u64>> = checks.iter().filter_map(|c| c.class_rep.clone()).collect();
        let complete = reps.len() == words.len();
        reps.sort_unstable();
        let before = reps.len();
        reps.dedup();
        if reps.len() != before {
            push("two words share a composition multiset".into());
        }
        complete && reps.len() == before
    };

    VerifyReport {
        n: cb.n,
        family: cb.family,
        word_count: words.len(),
        structural_ok: structural_all,
        distinct_multisets: distinct,
        zero_backtracks,
        no_type2_pauses: no_type2,
        decodes_to_self,
        unique_decodes,
        violations,
    }
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Which repair of the size-bound sums to use for the half-integer ballot
/// counts at odd subset sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundsReading {
    /// `binom(i, ⌊i/2⌋)`, counting ballot strings of every length.
    FloorHalf,
    /// Drop the odd-`i` terms entirely.
    EvenOnly,
}

/// The size-bound sum `Σ binom(m, i) 2^(m−i) binom(i, i/2)` with
/// `m = (n−2)/2`; the upper bound on the base-family size, and twice the
/// lower bound.
pub fn sr_bound_sum(n: usize, reading: BoundsReading) -> Result<u128, CodeError> {
    assert!(n % 2 == 0 && n >= 4, "bounds are stated for even n >= 4");
    if n > 120 {
        return Err(CodeError::BoundsOverflow(n));
    }
    let m = (n as u64 - 2) / 2;
    let mut total: u128 = 0;
    for i in 0..=m {
        if reading == BoundsReading::EvenOnly && i % 2 == 1 {
            continue;
        }
        let term = binomial(m, i)
            .checked_mul(1u128 << (m - i))
            .and_then(|t| t.checked_mul(binomial(i, i / 2)))
            .ok_or(CodeError::BoundsOverflow(n))?;
        total = total.checked_add(term).ok_or(CodeError::BoundsOverflow(n))?;
    }
    Ok(total)
}

/// `(lower, upper)` size bounds for the even-length base family under the
/// floor reading; the lower bound is half the upper sum.
pub fn sr_size_bounds(n: usize) -> Result<(u128, u128), CodeError> {
    let upper = sr_bound_sum(n, BoundsReading::FloorHalf)?;
    Ok((upper / 2, upper))
}

/// Draw a uniformly random ballot string by rejection (the all-zeros
/// fallback is itself a ballot string).
fn random_ballot<R: Rng>(len: usize, rng: &mut R) -> Vec<u8> {
    for _ in 0..10_000 {
        let cand: Vec<u8> = (0..len).map(|_| rng.random_range(0..=1u8)).collect();
        if is_ballot(&cand) {
            return cand;
        }
    }
    vec![0u8; len]
}

/// Sample a random word of the base family without enumerating it.
pub fn sample_sr<R: Rng>(n: usize, rng: &mut R) -> BitString {
    assert!(n >= 4);
    if n % 2 == 1 {
        let even = sample_sr(n - 1, rng);
        let mut bits = even.bits().to_vec();
        bits.insert((n - 1) / 2, rng.random_range(0..=1u8));
        return BitString::new(bits);
    }
    let m = n / 2;
    let mut bits = vec![0u8; n];
    let mismatch: Vec<bool> = (2..=m).map(|_| rng.random_bool(0.5)).collect();
    let jlen = mismatch.iter().filter(|&&b| b).count();
    let ballot = random_ballot(jlen, rng);
    let mut bi = 0;
    for i in 2..=m {
        if mismatch[i - 2] {
            bits[i - 1] = ballot[bi];
            bi += 1;
        } else {
            bits[i - 1] = rng.random_range(0..=1u8);
        }
    }
    for i in 1..=m {
        let flip = i == 1 || mismatch[i - 2];
        bits[n - i] = bits[i - 1] ^ u8::from(flip);
    }
    BitString::new(bits)
}

/// Sample a random reversal-family word: starts 1, ends 0, all
/// prefix/suffix weights distinct.
pub fn sample_p<R: Rng>(n: usize, rng: &mut R) -> BitString {
    sample_sr(n, rng).reversed()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::BiPoly;
    use crate::strings::prefix_suffix_weights_distinct;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sr_small_inventory() {
        let sr4 = gen_sr(4).unwrap();
        let got: Vec<String> = sr4.words().map(|w| w.to_string()).collect();
        assert_eq!(got, vec!["0001", "0011", "0111"]);
        assert_eq!(gen_sr(6).unwrap().len(), 10);
    }

    #[test]
    fn sequential_generation_matches_parallel() {
        for n in [8usize, 11, 14] {
            assert_eq!(gen_sr(n).unwrap(), gen_sr_sequential(n).unwrap());
        }
    }

    #[test]
    fn sr_odd_doubles_even() {
        for n in [5usize, 7, 9, 11] {
            assert_eq!(gen_sr(n).unwrap().len(), 2 * gen_sr(n - 1).unwrap().len());
        }
    }

    #[test]
    fn sr_words_have_distinct_prefix_suffix_weights() {
        for n in 4..=12usize {
            let cb = gen_sr(n).unwrap();
            for w in cb.words() {
                assert!(prefix_suffix_weights_distinct(&w), "n={n} w={w}");
                assert!(is_sr_word(&w));
            }
        }
    }

    #[test]
    fn sr_matches_structural_filter() {
        // The generator and the membership predicate agree with a plain
        // filter over all strings.
        for n in 4..=12usize {
            let cb = gen_sr(n).unwrap();
            let brute: Vec<u64> = (0..1u64 << n)
                .filter(|&v| is_sr_word(&BitString::unpack(v, n)))
                .collect();
            assert_eq!(cb.packed(), &brute[..], "n={n}");
        }
    }

    #[test]
    fn generation_bounds_are_enforced() {
        assert!(matches!(gen_sr(3), Err(CodeError::TooShort { .. })));
        assert!(matches!(gen_sr(40), Err(CodeError::TooLarge { .. })));
        assert!(matches!(gen_t(7), Err(CodeError::TooShort { .. })));
        // Sleeve families with no valid width are empty, not errors.
        assert!(gen_q(5).unwrap().is_empty());
        assert!(gen_r(6).unwrap().is_empty());
        assert!(!gen_r(7).unwrap().is_empty());
    }

    #[test]
    fn family_words_have_class_form() {
        for n in [8usize, 9, 12, 13] {
            for family in [Family::P, Family::Q, Family::R, Family::T] {
                let cb = generate(family, n).unwrap();
                for w in cb.words() {
                    assert!(w.is_reconstruction_class(), "{family} n={n} w={w}");
                    assert!(structural_ok(family, &w), "{family} n={n} w={w}");
                }
            }
        }
    }

    #[test]
    fn disjointness() {
        for n in [8usize, 10, 12, 14] {
            let p = gen_p(n).unwrap();
            let q = gen_q(n).unwrap();
            let r = gen_r(n).unwrap();
            assert!(!p.words().any(|w| q.contains(&w)), "P∩Q n={n}");
            assert!(!q.words().any(|w| r.contains(&w)), "Q∩R n={n}");
            // |P ∩ R_{k,n}| <= 1 per sleeve width.
            let mut per_k = std::collections::HashMap::new();
            for w in r.words() {
                if p.contains(&w) {
                    let k = r_sleeve(&w).unwrap();
                    *per_k.entry(k).or_insert(0usize) += 1;
                }
            }
            assert!(per_k.values().all(|&c| c <= 1), "P∩R n={n}: {per_k:?}");
        }
    }

    #[test]
    fn q_words_split_by_sleeve_width() {
        let q = gen_q(12).unwrap();
        for w in q.words() {
            let k = q_sleeve(&w).unwrap();
            // Leading ones determine k uniquely, so sleeves cannot overlap.
            assert_eq!(w.bits().iter().take_while(|&&b| b == 1).count(), k);
        }
    }

    #[test]
    fn t_is_the_union() {
        for n in [8usize, 11, 12] {
            let t = gen_t(n).unwrap();
            let p = gen_p(n).unwrap();
            let q = gen_q(n).unwrap();
            let r = gen_r(n).unwrap();
            assert!(p.words().all(|w| t.contains(&w)));
            assert!(q.words().all(|w| t.contains(&w)));
            assert!(r.words().all(|w| t.contains(&w)));
            assert!(t.len() <= p.len() + q.len() + r.len());
            assert!(t.len() >= p.len() + q.len());
        }
    }

    #[test]
    fn verify_passes_generated_books() {
        for n in [10usize, 12] {
            for family in [Family::Sr, Family::P, Family::Q, Family::T] {
                let report = verify_codebook(&generate(family, n).unwrap());
                assert!(report.pass(), "{family} n={n}: {:?}", report.violations);
            }
        }
    }

    #[test]
    fn verify_flags_reversal_duplicates() {
        let p = gen_p(10).unwrap();
        let w = p.words().next().unwrap();
        let mut words = vec![w.pack(), w.reversed().pack()];
        words.extend(p.packed().iter().skip(1).take(3));
        let bad = Codebook::from_packed(10, Family::T, words);
        let report = verify_codebook(&bad);
        assert!(!report.pass());
        assert!(!report.distinct_multisets || !report.structural_ok);
    }

    #[test]
    fn bound_sum_matches_enumeration() {
        for n in [4usize, 6, 8, 10, 12, 14] {
            let size = gen_sr(n).unwrap().len() as u128;
            let upper = sr_bound_sum(n, BoundsReading::FloorHalf).unwrap();
            let (lower, upper2) = sr_size_bounds(n).unwrap();
            assert_eq!(upper, upper2);
            // The floor reading makes the upper sum exact.
            assert_eq!(size, upper, "n={n}");
            assert!(lower <= size);
        }
    }

    #[test]
    fn bounds_differ_by_the_half_factor() {
        // The sum is odd for some n (n = 8 gives 35), so the halved lower
        // bound is exact only up to the integer floor.
        for n in [6usize, 8, 10, 12, 14] {
            let (lower, upper) = sr_size_bounds(n).unwrap();
            assert!(upper - 2 * lower <= 1, "n={n}");
        }
        let (lower, upper) = sr_size_bounds(6).unwrap();
        assert_eq!((lower, upper), (5, 10));
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(40, 20), 137_846_528_820);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn reversal_family_has_zero_branch_budget() {
        // Distinct prefix/suffix weights leave no equal-weight boundary, so
        // the branch statistic vanishes on the whole family.
        for w in gen_p(12).unwrap().words() {
            assert_eq!(reconstruct::branch_bound(&w), 0, "{w}");
        }
    }

    #[test]
    fn samples_are_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [8usize, 9, 16, 33, 64] {
            for _ in 0..20 {
                let w = sample_sr(n, &mut rng);
                assert!(is_sr_word(&w), "n={n} w={w}");
                let p = sample_p(n, &mut rng);
                assert!(prefix_suffix_weights_distinct(&p), "n={n} p={p}");
                assert!(p.is_reconstruction_class());
            }
        }
        // Sampled members of small families are in the enumerated book.
        let cb = gen_sr(12).unwrap();
        for _ in 0..50 {
            assert!(cb.contains(&sample_sr(12, &mut rng)));
        }
    }

    #[test]
    fn union_words_can_share_a_multiset_with_outsiders() {
        // Smallest ambiguity: this q-family word pauses at step 1 and the
        // alternate (type-2) tuple completes to a valid non-codeword that
        // is not its reversal. The code stays valid (the partner is outside
        // it) and decoding still returns the codeword first with no
        // backtracking, but the full search is not a singleton.
        let w: BitString = "10010110".parse().unwrap();
        let partner: BitString = "10110010".parse().unwrap();
        assert_eq!(q_sleeve(&w), Some(1));
        assert_eq!(compose(&w), compose(&partner));
        assert_ne!(w.reversed(), partner);
        let t8 = gen_t(8).unwrap();
        assert!(t8.contains(&w));
        assert!(!t8.contains(&partner));
        let report = reconstruct::reconstruct(&product_poly(&w), &ReconConfig::default()).unwrap();
        assert_eq!(report.results[0].string, w);
        assert_eq!(report.backtracks, 0);
        assert_eq!(report.results.len(), 2);
        assert_eq!(report.results[1].string, partner);
        let verify = verify_codebook(&gen_t(8).unwrap());
        assert!(verify.pass());
        assert!(!verify.unique_decodes);
    }

    #[test]
    fn q_sleeve_width_readable_from_product_poly() {
        // F(1,0) counts the all-ones prefixes: k+1 for a q-family word.
        let q = gen_q(12).unwrap();
        for w in q.words().take(40) {
            let k = q_sleeve(&w).unwrap();
            let f: BiPoly = product_poly(&w);
            assert_eq!(f.eval_x1_y0(), k as i64 + 1);
        }
    }
}
