//! The reconstruction solver.
//!
//! Input is the product polynomial `F = P·P*` of an unknown string with
//! `s_1 = 1`, `s_n = 0`. The length `n`, weight `d` and tail zero-run `a_d`
//! fall out of the degrees of `F` directly; the solver then recovers the
//! remaining zero-runs `a_1 … a_(d−1)` pairwise from both ends inward. At
//! step `j` it forms the residual polynomial
//!
//! ```text
//! f_j(y) = r_j(y) − Σ_{k=1}^{j−1} α_k(y)·β_{j−k}(y)
//! ```
//!
//! where `r_j` is the `x^j` slice of `F` and `α_k`/`β_k` are the
//! coefficient blocks of `x^k` in `P(x,y)`/`P*(x,y)` fixed so far. On a
//! correct history `f_j = α_0 β_j + α_j β_0`, and reading its degree and
//! value at `y = 1` two ways yields at most two consistent `(a_j, a_(d−j))`
//! pairs. Each surviving pair is checked at a primitive element `λ` of a
//! prime field and at `λ⁻¹`; when both pairs check out the solver saves the
//! alternate as a branch point and continues depth-first. Candidates that
//! complete the gap string are accepted only if rebuilding `F` from them
//! reproduces the input exactly, so field evaluations alone never admit a
//! result.
//!
//! Step values at `1`, `λ`, `λ⁻¹` are maintained in `O(j)` per step from
//! cached block evaluations. The residual degree is extracted either from an
//! explicit slice-residual coefficient vector (`O(n)` per step, the
//! default), or by exact big-integer evaluation at the base `n+1`, whose
//! digits are the residual coefficients on a live branch.

use num_bigint::BigUint;
use thiserror::Error;

use crate::field::{FieldCtx, FieldError, FieldPolicy};
use crate::poly::{product_matches, BiPoly};
use crate::strings::{gap_decode, gap_encode, BitString, GapString};

/// Longest supported input; keeps every exact integer quantity inside `i64`.
pub const MAX_N: usize = 1 << 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReconError {
    #[error("malformed product polynomial: {0}")]
    Malformed(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// How the degree of the step residual is extracted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegreeMode {
    /// Maintain the residual coefficient vector for the current slice and
    /// read the top nonzero index.
    #[default]
    SliceVec,
    /// Evaluate the residual at the integer base `n+1` and take the digit
    /// length. Exact on live branches; kept for cross-validation.
    BaseB,
}

#[derive(Debug, Clone)]
pub struct ReconConfig {
    pub field_policy: FieldPolicy,
    pub field_prime: Option<u64>,
    pub degree_mode: DegreeMode,
    /// Stop after the first recovered string instead of enumerating all.
    pub first_only: bool,
    pub trace: bool,
}

impl Default for ReconConfig {
    fn default() -> Self {
        ReconConfig {
            field_policy: FieldPolicy::Safe,
            field_prime: None,
            degree_mode: DegreeMode::SliceVec,
            first_only: false,
            trace: false,
        }
    }
}

/// Parameters readable directly off `F`: `d` is half the `x`-degree, the
/// tail zero-run is `F(0,1) − 1`, and `n` is half the total degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReconParams {
    pub n: usize,
    pub weight: usize,
    pub tail_gap: u64,
}

pub fn recover_params(f: &BiPoly) -> Result<ReconParams, ReconError> {
    if f.is_zero() {
        return Err(ReconError::Malformed("zero polynomial".into()));
    }
    if f.deg_x() % 2 != 0 {
        return Err(ReconError::Malformed(format!(
            "odd degree {} in x",
            f.deg_x()
        )));
    }
    if f.deg_y() % 2 != 0 {
        return Err(ReconError::Malformed(format!(
            "odd degree {} in y",
            f.deg_y()
        )));
    }
    let weight = (f.deg_x() / 2) as usize;
    let n = weight + (f.deg_y() / 2) as usize;
    if weight == 0 {
        return Err(ReconError::Malformed(
            "weight zero: no string starting with 1".into(),
        ));
    }
    let at_0_1 = f.eval_x0_y1();
    if at_0_1 < 2 {
        return Err(ReconError::Malformed(format!(
            "F(0,1) = {at_0_1} < 2: no string ending with 0"
        )));
    }
    let tail_gap = (at_0_1 - 1) as u64;
    if tail_gap as usize > n - weight {
        return Err(ReconError::Malformed(format!(
            "tail zero-run {tail_gap} exceeds the total zero count {}",
            n - weight
        )));
    }
    Ok(ReconParams {
        n,
        weight,
        tail_gap,
    })
}

/// Which of the two degree readings produced a candidate pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSource {
    /// `deg f_j` attributed to the prefix side `g_0^j + a_d`; at a pause
    /// this is the type-1 tuple and is explored first.
    PrefixDeg,
    /// `deg f_j` attributed to the suffix side `g_(d−j)^d` (type-2 tuple).
    SuffixDeg,
}

/// Pause classification of a string, computed from its gap string alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauseType {
    Type1,
    Type2,
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recovered {
    pub string: BitString,
    /// Pause steps along this result's root-to-emission path, with the
    /// branch taken at each.
    pub pauses: Vec<(usize, PairSource)>,
    /// The string's equal-weight-boundary count ([`branch_bound`]), which
    /// caps how many pauses the path can contain.
    pub branch_limit: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStatus {
    Found,
    Exhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEvent {
    pub step: usize,
    pub low_gap: u64,
    pub high_gap: u64,
    pub pause: bool,
    pub backtrack: bool,
}

#[derive(Debug, Clone)]
pub struct ReconReport {
    pub results: Vec<Recovered>,
    /// Dead ends hit before the first result was found; zero for every
    /// decode of a backtracking-free codeword.
    pub backtracks: u64,
    /// Dead ends across the entire enumeration, including branches explored
    /// after the first result to prove uniqueness.
    pub dead_ends: u64,
    pub status: SearchStatus,
    pub trace: Vec<TraceEvent>,
}

impl ReconReport {
    pub fn strings(&self) -> Vec<BitString> {
        self.results.iter().map(|r| r.string.clone()).collect()
    }
}

/// Values of the step residual needed to derive and check candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepValues {
    pub deg: u64,
    pub at_one: i64,
    pub at_gen: u64,
    pub at_gen_inv: u64,
}

struct BaseTables {
    /// `B^e` and the cumulative sums `1 + B + … + B^(e−1)`.
    pow: Vec<BigUint>,
    geo: Vec<BigUint>,
    /// `r_j(B)` per slice.
    slice_at_base: Vec<BigUint>,
}

/// A saved alternate branch: everything needed to rewind to step `step` and
/// take `pair` instead.
struct Pending {
    step: usize,
    pair: (u64, u64),
    source: PairSource,
    low_sum: u64,
    high_sum: u64,
    pauses_len: usize,
}

struct Engine<'a> {
    f: &'a BiPoly,
    cfg: ReconConfig,
    n: usize,
    d: usize,
    tail_gap: u64,
    /// `n − d`, the sum every complete gap string must reach.
    total_gap: u64,
    field: FieldCtx,
    /// Dense `x^j` slices of `F` for `1 ≤ j ≤ last pair step`, and their
    /// evaluations at `1`, `λ`, `λ⁻¹`.
    slices: Vec<Vec<i64>>,
    slice_at_one: Vec<i64>,
    slice_at_gen: Vec<u64>,
    slice_at_gen_inv: Vec<u64>,
    base: Option<BaseTables>,

    // Search state. Cache index k holds the block data of x^k in P and P*:
    // block starts, and evaluations at 1, λ, λ⁻¹ (and B in BaseB mode).
    step: usize,
    gaps: Vec<u64>,
    low_sum: u64,
    high_sum: u64,
    lo_start: Vec<u64>,
    hi_start: Vec<u64>,
    lo_one: Vec<i64>,
    hi_one: Vec<i64>,
    lo_gen: Vec<u64>,
    hi_gen: Vec<u64>,
    lo_gen_inv: Vec<u64>,
    hi_gen_inv: Vec<u64>,
    lo_base: Vec<BigUint>,
    hi_base: Vec<BigUint>,
    path_pauses: Vec<(usize, PairSource)>,
    scratch: Vec<i64>,
}

impl<'a> Engine<'a> {
    fn new(f: &'a BiPoly, cfg: &ReconConfig) -> Result<Engine<'a>, ReconError> {
        let params = recover_params(f)?;
        let (n, d, tail_gap) = (params.n, params.weight, params.tail_gap);
        if n > MAX_N {
            return Err(ReconError::Malformed(format!(
                "length {n} exceeds the supported maximum {MAX_N}"
            )));
        }
        if f.coeff(0, 0) != 1 || f.coeff(f.deg_x(), f.deg_y()) != 1 {
            return Err(ReconError::Malformed(
                "constant and leading coefficients must be 1".into(),
            ));
        }
        for (_, c) in f.terms() {
            if c < 0 || c > n as i64 + 1 {
                return Err(ReconError::Malformed(format!(
                    "coefficient {c} outside 0..={}",
                    n + 1
                )));
            }
        }

        let field = match cfg.field_prime {
            Some(q) => FieldCtx::with_prime(n, q)?,
            None => FieldCtx::new(n, cfg.field_policy),
        };

        // Pair steps run for 2j < d; one extra slice so step probes can
        // inspect the closure step as well.
        let max_step = if d >= 2 { d / 2 } else { 0 };
        let mut slices = vec![Vec::new(); max_step + 1];
        for ((a, b), c) in f.terms() {
            let j = a as usize;
            if (1..=max_step).contains(&j) {
                let slot = &mut slices[j];
                if slot.len() <= b as usize {
                    slot.resize(b as usize + 1, 0);
                }
                slot[b as usize] = c;
            }
        }
        let mut slice_at_one = vec![0i64; max_step + 1];
        let mut slice_at_gen = vec![0u64; max_step + 1];
        let mut slice_at_gen_inv = vec![0u64; max_step + 1];
        for j in 1..=max_step {
            let mut one = 0i64;
            let mut gen = 0u64;
            let mut gen_inv = 0u64;
            for (e, &c) in slices[j].iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let cq = (c as u64) % field.prime();
                one += c;
                gen = field.add(gen, field.mul(cq, field.pow(e as u64)));
                gen_inv = field.add(gen_inv, field.mul(cq, field.inv_pow(e as u64)));
            }
            slice_at_one[j] = one;
            slice_at_gen[j] = gen;
            slice_at_gen_inv[j] = gen_inv;
        }

        let base = match cfg.degree_mode {
            DegreeMode::SliceVec => None,
            DegreeMode::BaseB => {
                let b = n as u64 + 1;
                let table_len = 3 * n + 6;
                let mut pow = Vec::with_capacity(table_len);
                let mut geo = Vec::with_capacity(table_len);
                let mut p = BigUint::from(1u32);
                let mut g = BigUint::from(0u32);
                for _ in 0..table_len {
                    geo.push(g.clone());
                    pow.push(p.clone());
                    g += &p;
                    p *= b;
                }
                let slice_at_base = slices
                    .iter()
                    .map(|s| {
                        let mut acc = BigUint::from(0u32);
                        for &c in s.iter().rev() {
                            acc *= b;
                            acc += c as u64;
                        }
                        acc
                    })
                    .collect();
                Some(BaseTables {
                    pow,
                    geo,
                    slice_at_base,
                })
            }
        };

        let mut engine = Engine {
            f,
            cfg: cfg.clone(),
            n,
            d,
            tail_gap,
            total_gap: (n - d) as u64,
            field,
            slices,
            slice_at_one,
            slice_at_gen,
            slice_at_gen_inv,
            base,
            step: 1,
            gaps: vec![0; d + 1],
            low_sum: 0,
            high_sum: tail_gap,
            lo_start: Vec::new(),
            hi_start: Vec::new(),
            lo_one: Vec::new(),
            hi_one: Vec::new(),
            lo_gen: Vec::new(),
            hi_gen: Vec::new(),
            lo_gen_inv: Vec::new(),
            hi_gen_inv: Vec::new(),
            lo_base: Vec::new(),
            hi_base: Vec::new(),
            path_pauses: Vec::new(),
            scratch: Vec::new(),
        };

        // Block 0: α_0 = 1 (a_0 = 0 in this string class), β_0 spans the
        // tail zero-run.
        engine.gaps[d] = tail_gap;
        engine.lo_start.push(0);
        engine.hi_start.push(0);
        engine.lo_one.push(1);
        engine.hi_one.push(tail_gap as i64 + 1);
        engine.lo_gen.push(1);
        engine.hi_gen.push(engine.field.geo_sum(0, tail_gap + 1));
        engine.lo_gen_inv.push(1);
        engine
            .hi_gen_inv
            .push(engine.field.geo_sum_inv(0, tail_gap + 1));
        if engine.base.is_some() {
            engine.lo_base.push(BigUint::from(1u32));
            engine.hi_base.push(engine.base_geo(0, tail_gap + 1));
        }
        Ok(engine)
    }

    /// `B^start + … + B^(start+len−1)` from the cumulative table.
    fn base_geo(&self, start: u64, len: u64) -> BigUint {
        let t = self.base.as_ref().expect("base tables present");
        let hi = (start + len) as usize;
        if hi < t.geo.len() {
            &t.geo[hi] - &t.geo[start as usize]
        } else {
            // Garbage candidates can overshoot the table; compute directly.
            let b = BigUint::from(self.n as u64 + 1);
            let mut acc = BigUint::from(0u32);
            let mut p = b.pow(start as u32);
            for _ in 0..len {
                acc += &p;
                p *= self.n as u64 + 1;
            }
            acc
        }
    }

    fn apply(&mut self, pair: (u64, u64)) {
        let (low_gap, high_gap) = pair;
        let j = self.step;
        self.gaps[j] = low_gap;
        self.gaps[self.d - j] = high_gap;
        self.lo_start.push(self.low_sum);
        self.hi_start.push(self.high_sum);
        self.lo_one.push(low_gap as i64 + 1);
        self.hi_one.push(high_gap as i64 + 1);
        self.lo_gen.push(self.field.geo_sum(self.low_sum, low_gap + 1));
        self.hi_gen
            .push(self.field.geo_sum(self.high_sum, high_gap + 1));
        self.lo_gen_inv
            .push(self.field.geo_sum_inv(self.low_sum, low_gap + 1));
        self.hi_gen_inv
            .push(self.field.geo_sum_inv(self.high_sum, high_gap + 1));
        if self.base.is_some() {
            self.lo_base.push(self.base_geo(self.low_sum, low_gap + 1));
            self.hi_base
                .push(self.base_geo(self.high_sum, high_gap + 1));
        }
        self.low_sum += low_gap;
        self.high_sum += high_gap;
        self.step += 1;
    }

    fn rewind(&mut self, p: &Pending) {
        self.step = p.step;
        self.low_sum = p.low_sum;
        self.high_sum = p.high_sum;
        self.lo_start.truncate(p.step);
        self.hi_start.truncate(p.step);
        self.lo_one.truncate(p.step);
        self.hi_one.truncate(p.step);
        self.lo_gen.truncate(p.step);
        self.hi_gen.truncate(p.step);
        self.lo_gen_inv.truncate(p.step);
        self.hi_gen_inv.truncate(p.step);
        self.lo_base.truncate(p.step);
        self.hi_base.truncate(p.step);
        self.path_pauses.truncate(p.pauses_len);
    }

    /// Residual values for the current step, or `None` when the residual is
    /// identically zero (or non-positive at the base), which no live branch
    /// can produce.
    fn step_values(&mut self) -> Option<StepValues> {
        let j = self.step;
        assert!(
            j < self.slices.len(),
            "step {j} is past the pair range of a weight-{} input",
            self.d
        );
        let mut at_one = self.slice_at_one[j];
        let mut at_gen = self.slice_at_gen[j];
        let mut at_gen_inv = self.slice_at_gen_inv[j];
        for k in 1..j {
            at_one -= self.lo_one[k] * self.hi_one[j - k];
            at_gen = self
                .field
                .sub(at_gen, self.field.mul(self.lo_gen[k], self.hi_gen[j - k]));
            at_gen_inv = self.field.sub(
                at_gen_inv,
                self.field.mul(self.lo_gen_inv[k], self.hi_gen_inv[j - k]),
            );
        }
        let deg = match self.cfg.degree_mode {
            DegreeMode::SliceVec => self.residual_degree(j)?,
            DegreeMode::BaseB => self.base_degree(j)?,
        };
        Some(StepValues {
            deg,
            at_one,
            at_gen,
            at_gen_inv,
        })
    }

    /// Top nonzero index of the residual coefficient vector.
    fn residual_degree(&mut self, j: usize) -> Option<u64> {
        let mut scratch = std::mem::take(&mut self.scratch);
        scratch.clear();
        scratch.extend_from_slice(&self.slices[j]);
        for k in 1..j {
            let base = (self.lo_start[k] + self.hi_start[j - k]) as usize;
            let len1 = self.lo_one[k] as usize;
            let len2 = self.hi_one[j - k] as usize;
            let top = base + len1 + len2 - 2;
            if scratch.len() <= top {
                scratch.resize(top + 1, 0);
            }
            // The product of two blocks of consecutive powers has a
            // trapezoidal coefficient profile.
            for t in 0..=(len1 + len2 - 2) {
                let c = t.min(len1 - 1).min(len2 - 1).min(len1 + len2 - 2 - t) + 1;
                scratch[base + t] -= c as i64;
            }
        }
        let deg = scratch
            .iter()
            .rposition(|&c| c != 0)
            .map(|e| e as u64);
        self.scratch = scratch;
        deg
    }

    /// Digit length of the residual evaluated at `B = n+1`.
    fn base_degree(&mut self, j: usize) -> Option<u64> {
        let tables = self.base.as_ref().expect("BaseB mode");
        let mut sum = BigUint::from(0u32);
        for k in 1..j {
            sum += &self.lo_base[k] * &self.hi_base[j - k];
        }
        let slice = &tables.slice_at_base[j];
        if &sum >= slice {
            return None;
        }
        let value = slice - sum;
        // Estimate the digit count from the bit length, then correct
        // against the exact power table.
        let b = self.n as f64 + 1.0;
        let mut e = ((value.bits().saturating_sub(1)) as f64 / b.log2()) as usize;
        while e + 1 < tables.pow.len() && tables.pow[e + 1] <= value {
            e += 1;
        }
        while e > 0 && tables.pow[e] > value {
            e -= 1;
        }
        Some(e as u64)
    }

    /// Candidate pairs from the two degree readings, after non-negativity
    /// and divisibility, deduplicated. No field validation yet.
    fn raw_candidates(&self, vals: &StepValues) -> Vec<((u64, u64), PairSource)> {
        let mut out = Vec::with_capacity(2);
        let deg = vals.deg as i64;
        let tail = self.tail_gap as i64;

        // deg f_j = g_0^(j−1) + a_j + a_d
        let low_gap = deg - self.low_sum as i64 - tail;
        if low_gap >= 0 {
            let high_gap = vals.at_one - 1 - (tail + 1) * (low_gap + 1);
            if high_gap >= 0 {
                out.push(((low_gap as u64, high_gap as u64), PairSource::PrefixDeg));
            }
        }

        // deg f_j = g_(d−j+1)^d + a_(d−j); then f_j(1) = (1 + a_(d−j)) +
        // (a_d+1)(a_j+1) forces a_j + 1 = (f_j(1) − 1 − a_(d−j))/(a_d+1).
        let high_gap = deg - self.high_sum as i64;
        if high_gap >= 0 {
            let num = vals.at_one - 1 - high_gap;
            if num >= tail + 1 && num % (tail + 1) == 0 {
                let low_gap = num / (tail + 1) - 1;
                let pair = (low_gap as u64, high_gap as u64);
                if out.first().map(|&(p, _)| p) != Some(pair) {
                    out.push((pair, PairSource::SuffixDeg));
                }
            }
        }
        out
    }

    /// Check the step identity `f_j = α_0 β_j + α_j β_0` at `λ` and `λ⁻¹`
    /// for a candidate pair.
    fn validate_pair(&self, vals: &StepValues, pair: (u64, u64)) -> bool {
        let (low_gap, high_gap) = pair;
        let alpha_gen = self.field.geo_sum(self.low_sum, low_gap + 1);
        let beta_gen = self.field.geo_sum(self.high_sum, high_gap + 1);
        let lhs = self
            .field
            .add(beta_gen, self.field.mul(alpha_gen, self.hi_gen[0]));
        if lhs != vals.at_gen {
            return false;
        }
        let alpha_inv = self.field.geo_sum_inv(self.low_sum, low_gap + 1);
        let beta_inv = self.field.geo_sum_inv(self.high_sum, high_gap + 1);
        let lhs_inv = self
            .field
            .add(beta_inv, self.field.mul(alpha_inv, self.hi_gen_inv[0]));
        lhs_inv == vals.at_gen_inv
    }

    fn validated_candidates(&mut self) -> Vec<((u64, u64), PairSource)> {
        match self.step_values() {
            None => Vec::new(),
            Some(vals) => {
                let mut cands = self.raw_candidates(&vals);
                cands.retain(|&(pair, _)| self.validate_pair(&vals, pair));
                cands
            }
        }
    }

    /// Close the gap string once every pair step is done. Returns the
    /// completed gap string if the sums work out.
    fn close(&mut self) -> Option<GapString> {
        let assigned = self.low_sum + self.high_sum;
        if self.d % 2 == 0 {
            let mid = self.total_gap.checked_sub(assigned)?;
            self.gaps[self.d / 2] = mid;
        } else if assigned != self.total_gap {
            return None;
        }
        Some(GapString::new(self.gaps.clone()))
    }

    fn run(&mut self) -> ReconReport {
        let mut results: Vec<Recovered> = Vec::new();
        let mut pending: Vec<Pending> = Vec::new();
        let mut trace: Vec<TraceEvent> = Vec::new();
        let mut backtracks = 0u64;
        let mut dead_ends = 0u64;

        'search: loop {
            // Advance the current path until it emits or dies.
            let died = loop {
                if self.low_sum + self.high_sum > self.total_gap {
                    break true;
                }
                if 2 * self.step >= self.d {
                    match self.close() {
                        None => break true,
                        Some(gap_string) => {
                            let s = gap_decode(&gap_string);
                            if product_matches(&s, self.f) {
                                let branch_limit = branch_bound(&s);
                                results.push(Recovered {
                                    string: s,
                                    pauses: self.path_pauses.clone(),
                                    branch_limit,
                                });
                                if self.cfg.first_only {
                                    break 'search;
                                }
                                break false;
                            }
                            break true;
                        }
                    }
                }
                let cands = self.validated_candidates();
                let pause = cands.len() == 2;
                match cands.first() {
                    None => break true,
                    Some(&(pair, source)) => {
                        if pause {
                            let alt = cands[1];
                            pending.push(Pending {
                                step: self.step,
                                pair: alt.0,
                                source: alt.1,
                                low_sum: self.low_sum,
                                high_sum: self.high_sum,
                                pauses_len: self.path_pauses.len(),
                            });
                            self.path_pauses.push((self.step, source));
                        }
                        if self.cfg.trace {
                            trace.push(TraceEvent {
                                step: self.step,
                                low_gap: pair.0,
                                high_gap: pair.1,
                                pause,
                                backtrack: false,
                            });
                        }
                        self.apply(pair);
                    }
                }
            };

            if died {
                dead_ends += 1;
                if results.is_empty() {
                    backtracks += 1;
                }
            }
            match pending.pop() {
                None => break 'search,
                Some(p) => {
                    self.rewind(&p);
                    self.path_pauses.push((p.step, p.source));
                    if self.cfg.trace {
                        trace.push(TraceEvent {
                            step: p.step,
                            low_gap: p.pair.0,
                            high_gap: p.pair.1,
                            pause: true,
                            backtrack: true,
                        });
                    }
                    self.apply(p.pair);
                }
            }
        }

        let status = if results.is_empty() {
            SearchStatus::Exhausted
        } else {
            SearchStatus::Found
        };
        ReconReport {
            results,
            backtracks,
            dead_ends,
            status,
            trace,
        }
    }
}

/// Recover all strings `s` with `s_1 = 1`, `s_n = 0` whose product
/// polynomial equals `f`. These are exactly the strings in that class with
/// the composition multiset `f` encodes.
pub fn reconstruct(f: &BiPoly, cfg: &ReconConfig) -> Result<ReconReport, ReconError> {
    Ok(Engine::new(f, cfg)?.run())
}

/// Drives single solver steps against a caller-supplied history; the
/// inspection surface for tests and debugging.
///
/// `low` holds `a_1 … a_(j−1)` and `high` holds `a_(d−j+1) … a_(d−1)` in
/// index order (`a_0 = 0` and `a_d` are implied by `f`), positioning the
/// probe at step `j = low.len() + 1`.
pub struct StepProbe<'a> {
    engine: Engine<'a>,
}

impl<'a> StepProbe<'a> {
    pub fn new(
        f: &'a BiPoly,
        cfg: &ReconConfig,
        low: &[u64],
        high: &[u64],
    ) -> Result<StepProbe<'a>, ReconError> {
        assert_eq!(low.len(), high.len());
        let mut engine = Engine::new(f, cfg)?;
        for (i, &low_gap) in low.iter().enumerate() {
            engine.apply((low_gap, high[high.len() - 1 - i]));
        }
        Ok(StepProbe { engine })
    }

    pub fn step(&self) -> usize {
        self.engine.step
    }

    pub fn params(&self) -> ReconParams {
        ReconParams {
            n: self.engine.n,
            weight: self.engine.d,
            tail_gap: self.engine.tail_gap,
        }
    }

    /// Degree and point values of the step residual; `None` when the
    /// residual already proves the history wrong.
    pub fn values(&mut self) -> Option<StepValues> {
        self.engine.step_values()
    }

    /// Candidate pairs after non-negativity and divisibility filtering.
    pub fn candidate_pairs(&mut self) -> Vec<(u64, u64)> {
        match self.engine.step_values() {
            None => Vec::new(),
            Some(vals) => self
                .engine
                .raw_candidates(&vals)
                .into_iter()
                .map(|(p, _)| p)
                .collect(),
        }
    }

    /// Candidates that also pass the field checks at `λ` and `λ⁻¹`.
    pub fn validated_pairs(&mut self) -> Vec<(u64, u64)> {
        self.engine
            .validated_candidates()
            .into_iter()
            .map(|(p, _)| p)
            .collect()
    }

    pub fn validate_pair(&mut self, pair: (u64, u64)) -> bool {
        match self.engine.step_values() {
            None => false,
            Some(vals) => self.engine.validate_pair(&vals, pair),
        }
    }
}

/// Steps at which the solver pauses on input `F_s`, classified by which of
/// the two characterizing conditions the string satisfies:
/// type 1: `g_0^j − g_(d−j)^d = 1` and `a_j ≥ 1`;
/// type 2: `g_(d−j)^d − g_0^j = a_d + 1` and `a_(d−j) ≥ a_d + 1`.
pub fn pause_profile(s: &BitString) -> Vec<(usize, PauseType)> {
    assert!(
        s.is_reconstruction_class(),
        "pause profile is defined for strings starting 1 and ending 0"
    );
    let a = gap_encode(s).expect("class strings have weight >= 1");
    let gaps = a.gaps();
    let d = a.weight();
    let tail = gaps[d];
    let mut out = Vec::new();
    let mut low = 0i64; // g_0^j
    let mut high: i64 = gaps[d..].iter().sum::<u64>() as i64; // g_(d−j)^d
    for j in 1.. {
        if 2 * j >= d {
            break;
        }
        // Maintain: low = g_0^j, high = g_(d−j)^d.
        low += gaps[j] as i64;
        high += gaps[d - j] as i64;
        let t1 = low - high == 1 && gaps[j] >= 1;
        let t2 = high - low == tail as i64 + 1 && gaps[d - j] >= tail + 1;
        match (t1, t2) {
            (true, true) => out.push((j, PauseType::Both)),
            (true, false) => out.push((j, PauseType::Type1)),
            (false, true) => out.push((j, PauseType::Type2)),
            (false, false) => {}
        }
    }
    out
}

/// Count of positions `i < n/2` where the length-`i` prefix and suffix have
/// equal weight but the next symbols inward differ; bounds the number of
/// branch points any search path can contain.
pub fn branch_bound(s: &BitString) -> usize {
    let n = s.len();
    let bits = s.bits();
    let mut wp = 0u32;
    let mut ws = 0u32;
    let mut count = 0;
    for i in 1..n {
        if 2 * i >= n {
            break;
        }
        wp += u32::from(bits[i - 1]);
        ws += u32::from(bits[n - i]);
        if wp == ws && bits[i] != bits[n - i - 1] {
            count += 1;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::product_poly;
    use crate::strings::compose;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn cfg() -> ReconConfig {
        ReconConfig::default()
    }

    #[test]
    fn recover_params_examples() {
        let p = recover_params(&product_poly(&bs("1010"))).unwrap();
        assert_eq!((p.weight, p.tail_gap, p.n), (2, 1, 4));
        let p = recover_params(&product_poly(&bs("10"))).unwrap();
        assert_eq!((p.weight, p.tail_gap, p.n), (1, 1, 2));
        let p = recover_params(&product_poly(&bs("1001110"))).unwrap();
        assert_eq!((p.weight, p.tail_gap, p.n), (4, 1, 7));
    }

    #[test]
    fn recover_params_rejects() {
        // Strings ending in 1 give F(0,1) = 1.
        assert!(matches!(
            recover_params(&product_poly(&bs("101"))),
            Err(ReconError::Malformed(_))
        ));
        assert!(recover_params(&BiPoly::zero()).is_err());
    }

    #[test]
    fn step_values_first_step() {
        // f_1 = r_1: deg = max{g_2^2, g_0^1 + a_2} = 2, f_1(1) = 6.
        let f = product_poly(&bs("1010"));
        let mut probe = StepProbe::new(&f, &cfg(), &[], &[]).unwrap();
        let vals = probe.values().unwrap();
        assert_eq!(vals.deg, 2);
        assert_eq!(vals.at_one, 6);
    }

    #[test]
    fn candidates_non_pause() {
        let f = product_poly(&bs("1010"));
        let mut probe = StepProbe::new(&f, &cfg(), &[], &[]).unwrap();
        // Both degree readings collapse to the same pair here.
        assert_eq!(probe.candidate_pairs(), vec![(1, 1)]);
        assert_eq!(probe.validated_pairs(), vec![(1, 1)]);
        assert!(probe.validate_pair((1, 1)));
        assert!(!probe.validate_pair((2, 1)));
    }

    #[test]
    fn candidates_pause_case() {
        // "1001110": A = (0,2,0,0,1); at j = 1 both tuples from the pause
        // analysis validate: t = deg f_1 − (1 + a_d + g_lo + g_hi) = 0,
        // giving (t+g_hi+1, t+g_lo) = (2,0) and (t+g_hi, t+g_lo+a_d+1) = (1,2).
        let f = product_poly(&bs("1001110"));
        let mut probe = StepProbe::new(&f, &cfg(), &[], &[]).unwrap();
        let vals = probe.values().unwrap();
        assert_eq!(vals.deg, 3);
        assert_eq!(vals.at_one, 7);
        assert_eq!(probe.candidate_pairs(), vec![(2, 0), (1, 2)]);
        assert_eq!(probe.validated_pairs(), vec![(2, 0), (1, 2)]);
    }

    #[test]
    fn degree_modes_agree_on_truthful_steps() {
        let base_cfg = ReconConfig {
            degree_mode: DegreeMode::BaseB,
            ..cfg()
        };
        for n in 2..=11usize {
            for v in 0..(1u64 << (n - 2)) {
                let s = BitString::unpack((1 << (n - 1)) | (v << 1), n);
                let a = crate::strings::gap_encode(&s).unwrap();
                let d = a.weight();
                let f = product_poly(&s);
                for j in 1..=d.saturating_sub(1) / 2 {
                    let low = &a.gaps()[1..j];
                    let high = &a.gaps()[d - j + 1..d];
                    let mut p1 = StepProbe::new(&f, &cfg(), low, high).unwrap();
                    let mut p2 = StepProbe::new(&f, &base_cfg, low, high).unwrap();
                    assert_eq!(p1.values(), p2.values(), "s={s} j={j}");
                }
            }
        }
    }

    #[test]
    fn reconstruct_simple() {
        let f = product_poly(&bs("1010"));
        let report = reconstruct(&f, &cfg()).unwrap();
        assert_eq!(report.strings(), vec![bs("1010")]);
        assert_eq!(report.backtracks, 0);
        assert_eq!(report.status, SearchStatus::Found);
    }

    #[test]
    fn reconstruct_shortest() {
        let report = reconstruct(&product_poly(&bs("10")), &cfg()).unwrap();
        assert_eq!(report.strings(), vec![bs("10")]);
    }

    #[test]
    fn reconstruct_pause_string() {
        let report = reconstruct(&product_poly(&bs("1001110")), &cfg()).unwrap();
        assert_eq!(report.strings(), vec![bs("1001110")]);
        assert_eq!(report.backtracks, 0);
        assert_eq!(report.results[0].pauses.len(), 1);
        assert_eq!(report.results[0].pauses[0].0, 1);
        assert_eq!(report.results[0].branch_limit, 1);
    }

    #[test]
    fn reconstruct_exhausts_on_invalid_input() {
        // A self-reciprocal polynomial with the right shape but no preimage:
        // tweak a mirrored pair of interior coefficients of a real F.
        let mut f = product_poly(&bs("110100"));
        let (a, b) = (2u32, 2u32);
        let c = f.coeff(a, b);
        assert!(c > 1);
        f.add_term(a, b, -1);
        f.add_term(f.deg_x() - a, f.deg_y() - b, -1);
        match reconstruct(&f, &cfg()) {
            Err(_) => {}
            Ok(report) => {
                assert!(report.results.is_empty());
                assert_eq!(report.status, SearchStatus::Exhausted);
            }
        }
    }

    #[test]
    fn first_only_stops_early() {
        let f = product_poly(&bs("1001110"));
        let report = reconstruct(
            &f,
            &ReconConfig {
                first_only: true,
                ..cfg()
            },
        )
        .unwrap();
        assert_eq!(report.results.len(), 1);
        assert_eq!(report.backtracks, 0);
    }

    #[test]
    fn pause_profile_examples() {
        assert_eq!(pause_profile(&bs("1001110")), vec![(1, PauseType::Type1)]);
        assert_eq!(pause_profile(&bs("10")), vec![]);
        assert_eq!(pause_profile(&bs("110100")), vec![]);
    }

    #[test]
    fn branch_bound_examples() {
        assert_eq!(branch_bound(&bs("10")), 0);
        assert_eq!(branch_bound(&bs("1001110")), 1);
        // Prefix/suffix weights all distinct implies no branch points.
        assert_eq!(branch_bound(&bs("110100")), 0);
    }

    #[test]
    fn exhaustive_small_against_compose_classes() {
        // reconstruct(F_s) must return exactly the strings in the class of s
        // restricted to start-1/end-0, for every such s up to n = 10.
        for n in 2..=10usize {
            let table = crate::oracle::build_classes(n).unwrap();
            for v in 0..(1u64 << (n - 2)) {
                let s = BitString::unpack((1 << (n - 1)) | (v << 1), n);
                let want = table
                    .reconstruct_by_lookup(&compose(&s))
                    .unwrap();
                let report = reconstruct(&product_poly(&s), &cfg()).unwrap();
                let mut got = report.strings();
                got.sort();
                assert_eq!(got, want, "n={n} s={s}");
            }
        }
    }

    #[test]
    fn paper_min_prime_policy_still_exact() {
        // The minimal prime can admit spurious branch validations, but the
        // final verification gate keeps the result set exact.
        let min_cfg = ReconConfig {
            field_policy: crate::field::FieldPolicy::PaperMin,
            ..cfg()
        };
        for n in 2..=10usize {
            let table = crate::oracle::build_classes(n).unwrap();
            for v in 0..(1u64 << (n - 2)) {
                let s = BitString::unpack((1 << (n - 1)) | (v << 1), n);
                let want = table.reconstruct_by_lookup(&compose(&s)).unwrap();
                let mut got = reconstruct(&product_poly(&s), &min_cfg).unwrap().strings();
                got.sort();
                assert_eq!(got, want, "n={n} s={s}");
            }
        }
    }

    #[test]
    fn trace_is_recorded() {
        let f = product_poly(&bs("1001110"));
        let report = reconstruct(
            &f,
            &ReconConfig {
                trace: true,
                ..cfg()
            },
        )
        .unwrap();
        assert!(!report.trace.is_empty());
        assert!(report.trace.iter().any(|e| e.pause));
    }
}
