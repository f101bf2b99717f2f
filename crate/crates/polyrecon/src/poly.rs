//! Sparse bivariate polynomials and the string/multiset encodings built on
//! them.
//!
//! Three polynomials drive the reconstruction pipeline:
//!
//! * the prefix polynomial `P(x,y)` of a string, with one term `x^w y^z` per
//!   prefix, where the prefix has `w` ones and `z` zeros;
//! * the multiset polynomial `S(x,y)`, whose coefficient at `x^w y^z` is the
//!   multiplicity of the composition `1^w 0^z`;
//! * the product polynomial `F(x,y) = P(x,y)·P*(x,y)`, where `P*` is the
//!   reciprocal of `P`. `F` is computable from the multiset alone and
//!   determines it uniquely, so it is the solver's working input.
//!
//! Coefficients are `i64`. Every polynomial produced by this pipeline has
//! coefficients bounded by `n+1`, and products are guarded with checked
//! arithmetic; the arbitrary-precision work needed for run-length extraction
//! lives in [`mod@crate::reconstruct`], not here.

use std::fmt;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::strings::{BitString, CompositionMultiset};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("coefficient overflow in polynomial arithmetic")]
    Overflow,
    #[error("polynomial text line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("multiset polynomial has no unique total-degree-{n} term")]
    NoFullTerm { n: usize },
    #[error("invalid multiset polynomial: {0}")]
    BadMultiset(String),
    #[error("malformed product polynomial: {0}")]
    BadProduct(String),
}

/// Sparse bivariate polynomial over `i64`, keyed by `(x_degree, y_degree)`.
/// Zero coefficients are never stored.
#[derive(Clone, Default)]
pub struct BiPoly {
    terms: FxHashMap<(u32, u32), i64>,
    deg_x: u32,
    deg_y: u32,
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly::default()
    }

    pub fn constant(c: i64) -> Self {
        let mut p = BiPoly::zero();
        p.add_term(0, 0, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn deg_x(&self) -> u32 {
        self.deg_x
    }

    pub fn deg_y(&self) -> u32 {
        self.deg_y
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, xd: u32, yd: u32) -> i64 {
        self.terms.get(&(xd, yd)).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), i64)> + '_ {
        self.terms.iter().map(|(&k, &v)| (k, v))
    }

    /// Terms sorted by `(x_degree, y_degree)`, the order of the text format.
    pub fn sorted_terms(&self) -> Vec<(u32, u32, i64)> {
        let mut v: Vec<_> = self.terms.iter().map(|(&(a, b), &c)| (a, b, c)).collect();
        v.sort_unstable_by_key(|&(a, b, _)| (a, b));
        v
    }

    /// Add `c` to the coefficient at `(xd, yd)`, dropping the term if it
    /// cancels to zero.
    pub fn add_term(&mut self, xd: u32, yd: u32, c: i64) {
        if c == 0 {
            return;
        }
        let slot = self.terms.entry((xd, yd)).or_insert(0);
        *slot += c;
        if *slot == 0 {
            self.terms.remove(&(xd, yd));
            if xd == self.deg_x || yd == self.deg_y {
                self.recompute_degrees();
            }
        } else {
            self.deg_x = self.deg_x.max(xd);
            self.deg_y = self.deg_y.max(yd);
        }
    }

    fn recompute_degrees(&mut self) {
        self.deg_x = self.terms.keys().map(|&(a, _)| a).max().unwrap_or(0);
        self.deg_y = self.terms.keys().map(|&(_, b)| b).max().unwrap_or(0);
    }

    pub fn add(&self, other: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (&(a, b), &c) in &other.terms {
            out.add_term(a, b, c);
        }
        out
    }

    /// Multiply by the monomial `x^dx y^dy`.
    pub fn shifted(&self, dx: u32, dy: u32) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(a, b), &c) in &self.terms {
            out.add_term(a + dx, b + dy, c);
        }
        out
    }

    /// Full sparse product with checked coefficient arithmetic.
    pub fn mul(&self, other: &BiPoly) -> Result<BiPoly, PolyError> {
        let mut terms: FxHashMap<(u32, u32), i64> = FxHashMap::default();
        terms.reserve(self.terms.len().max(other.terms.len()) * 2);
        for (&(a1, b1), &c1) in &self.terms {
            for (&(a2, b2), &c2) in &other.terms {
                let c = c1.checked_mul(c2).ok_or(PolyError::Overflow)?;
                let slot = terms.entry((a1 + a2, b1 + b2)).or_insert(0);
                *slot = slot.checked_add(c).ok_or(PolyError::Overflow)?;
            }
        }
        terms.retain(|_, c| *c != 0);
        let mut out = BiPoly {
            terms,
            deg_x: 0,
            deg_y: 0,
        };
        out.recompute_degrees();
        Ok(out)
    }

    /// Sum of coefficients on the `x^0` column, i.e. the value at `(0, 1)`.
    pub fn eval_x0_y1(&self) -> i64 {
        self.terms
            .iter()
            .filter(|(&(a, _), _)| a == 0)
            .map(|(_, &c)| c)
            .sum()
    }

    /// Sum of coefficients on the `y^0` row, i.e. the value at `(1, 0)`.
    pub fn eval_x1_y0(&self) -> i64 {
        self.terms
            .iter()
            .filter(|(&(_, b), _)| b == 0)
            .map(|(_, &c)| c)
            .sum()
    }

    /// Serialize to the text format: `# degx=<a> degy=<b>` then one
    /// `<xdeg> <ydeg> <coef>` line per term sorted by `(xdeg, ydeg)`.
    pub fn to_text(&self) -> String {
        let mut out = format!("# degx={} degy={}\n", self.deg_x, self.deg_y);
        for (a, b, c) in self.sorted_terms() {
            out.push_str(&format!("{} {} {}\n", a, b, c));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<BiPoly, PolyError> {
        let mut poly = BiPoly::zero();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let mut it = t.split_whitespace();
            let mut next = |name: &str| -> Result<i64, PolyError> {
                it.next()
                    .ok_or_else(|| PolyError::Parse {
                        line,
                        msg: format!("missing {name}"),
                    })?
                    .parse::<i64>()
                    .map_err(|e| PolyError::Parse {
                        line,
                        msg: format!("bad {name}: {e}"),
                    })
            };
            let a = next("xdeg")?;
            let b = next("ydeg")?;
            let c = next("coef")?;
            if a < 0 || b < 0 || a > u32::MAX as i64 || b > u32::MAX as i64 {
                return Err(PolyError::Parse {
                    line,
                    msg: "degree out of range".into(),
                });
            }
            poly.add_term(a as u32, b as u32, c);
        }
        Ok(poly)
    }
}

impl PartialEq for BiPoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for BiPoly {}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (a, b, c) in self.sorted_terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (a, b) {
                (0, 0) => write!(f, "{c}")?,
                _ => {
                    if c != 1 {
                        write!(f, "{c}")?;
                    }
                    if a > 0 {
                        write!(f, "x")?;
                        if a > 1 {
                            write!(f, "^{a}")?;
                        }
                    }
                    if b > 0 {
                        write!(f, "y")?;
                        if b > 1 {
                            write!(f, "^{b}")?;
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Reciprocal polynomial: `x^degx y^degy · f(1/x, 1/y)`, which mirrors the
/// support box. For a prefix polynomial this is the prefix polynomial of the
/// reversed string.
pub fn reciprocal(f: &BiPoly) -> BiPoly {
    let (dx, dy) = (f.deg_x(), f.deg_y());
    let mut out = BiPoly::zero();
    for ((a, b), c) in f.terms() {
        out.add_term(dx - a, dy - b, c);
    }
    out
}

/// Prefix polynomial of `s`: one term per prefix, all coefficients 1.
pub fn prefix_poly(s: &BitString) -> BiPoly {
    let mut out = BiPoly::zero();
    let mut ones = 0u32;
    let mut zeros = 0u32;
    out.add_term(0, 0, 1);
    for &b in s.bits() {
        if b == 1 {
            ones += 1;
        } else {
            zeros += 1;
        }
        out.add_term(ones, zeros, 1);
    }
    out
}

/// Generating polynomial of the composition multiset of `s`.
pub fn multiset_poly(s: &BitString) -> BiPoly {
    poly_of_multiset(&crate::strings::compose(s))
}

/// Generating polynomial of an explicit multiset.
pub fn poly_of_multiset(m: &CompositionMultiset) -> BiPoly {
    let mut out = BiPoly::zero();
    for (&(w, z), &mult) in m.entries() {
        out.add_term(w, z, mult as i64);
    }
    out
}

/// Product polynomial `F = P·P*` built directly from the string.
pub fn product_poly(s: &BitString) -> BiPoly {
    let p = prefix_poly(s);
    let pr = reciprocal(&p);
    // Coefficients of P·P* are counts of prefix pairs, bounded by n+1.
    p.mul(&pr).expect("product of prefix polynomials cannot overflow")
}

/// Test `product_poly(s) == f` without building a second sparse map.
///
/// The `x^j` slice of `P·P*` is the convolution `Σ_k α_k(y)·β_(j−k)(y)` of
/// the per-degree coefficient blocks of `P` and `P*`. Each block is a run
/// of consecutive `y` powers, so each product adds a trapezoid profile to
/// one slice; the whole check streams over a single dense row per slice.
/// This is the hot verification path of the solver.
pub fn product_matches(s: &BitString, f: &BiPoly) -> bool {
    let n = s.len();
    let d = s.weight();
    let nd = n - d;
    if f.deg_x() as usize != 2 * d || f.deg_y() as usize != 2 * nd {
        return false;
    }
    // Zero runs a_0..a_d and their prefix sums g_0^(a−1).
    let mut runs = Vec::with_capacity(d + 1);
    let mut run = 0usize;
    for &b in s.bits() {
        if b == 1 {
            runs.push(run);
            run = 0;
        } else {
            run += 1;
        }
    }
    runs.push(run);
    let mut starts = Vec::with_capacity(d + 1);
    let mut acc = 0usize;
    for &r in &runs {
        starts.push(acc);
        acc += r;
    }

    let mut slices: Vec<Vec<(u32, i64)>> = vec![Vec::new(); 2 * d + 1];
    for ((a, b), c) in f.terms() {
        slices[a as usize].push((b, c));
    }

    let cols = 2 * nd + 1;
    // The row returns to all-zero whenever a slice checks out, so it is
    // zeroed exactly once.
    let mut row = vec![0i64; cols];
    for j in 0..=2 * d {
        for k in j.saturating_sub(d)..=j.min(d) {
            let l = d - (j - k);
            let len_a = runs[k] + 1;
            let len_b = runs[l] + 1;
            let base = starts[k] + (nd - starts[l] - runs[l]);
            for t in 0..len_a + len_b - 1 {
                let c = t.min(len_a - 1).min(len_b - 1).min(len_a + len_b - 2 - t) + 1;
                row[base + t] += c as i64;
            }
        }
        for &(b, c) in &slices[j] {
            row[b as usize] -= c;
        }
        if row.iter().any(|&c| c != 0) {
            return false;
        }
    }
    true
}

/// Locate the unique total-degree-`n` term of a multiset polynomial; its
/// degrees are the ones/zeros split `(d, n−d)` of the source string.
fn full_term(s_poly: &BiPoly, n: usize) -> Result<(u32, u32), PolyError> {
    let mut found = None;
    for ((a, b), _) in s_poly.terms() {
        if (a + b) as usize == n {
            if found.is_some() {
                return Err(PolyError::NoFullTerm { n });
            }
            found = Some((a, b));
        }
    }
    found.ok_or(PolyError::NoFullTerm { n })
}

/// Build the product polynomial from a multiset polynomial:
/// `F = x^d y^(n−d) (n+1 + S) + S*`. Equals [`product_poly`] of any string
/// with the given multiset.
pub fn product_from_multiset(s_poly: &BiPoly, n: usize) -> Result<BiPoly, PolyError> {
    let (d, nd) = full_term(s_poly, n)?;
    for ((a, b), c) in s_poly.terms() {
        if c <= 0 {
            return Err(PolyError::BadMultiset(format!(
                "non-positive multiplicity {c} at ({a},{b})"
            )));
        }
        if a > d || b > nd {
            return Err(PolyError::BadMultiset(format!(
                "composition ({a},{b}) exceeds the full-string split ({d},{nd})"
            )));
        }
    }
    let shifted = s_poly.add(&BiPoly::constant(n as i64 + 1)).shifted(d, nd);
    Ok(shifted.add(&reciprocal(s_poly)))
}

/// Invert [`product_from_multiset`]: strip the monomial shift, remove the
/// `n+1` constant, and split the remaining support into the multiset
/// polynomial and its mirror, validating that both halves agree.
pub fn multiset_from_product(f: &BiPoly, n: usize) -> Result<BiPoly, PolyError> {
    if f.deg_x() % 2 != 0 || f.deg_y() % 2 != 0 {
        return Err(PolyError::BadProduct("odd x or y degree".into()));
    }
    let d = f.deg_x() / 2;
    let nd = f.deg_y() / 2;
    if (d + nd) as usize != n {
        return Err(PolyError::BadProduct(format!(
            "degrees imply length {}, expected {n}",
            d + nd
        )));
    }
    let mut s_pos = BiPoly::zero();
    let mut s_neg = BiPoly::zero();
    for ((a, b), c) in f.terms() {
        let u = i64::from(a) - i64::from(d);
        let v = i64::from(b) - i64::from(nd);
        if u == 0 && v == 0 {
            if c != n as i64 + 1 {
                return Err(PolyError::BadProduct(format!(
                    "center coefficient {c}, expected {}",
                    n + 1
                )));
            }
        } else if u >= 0 && v >= 0 {
            s_pos.add_term(u as u32, v as u32, c);
        } else if u <= 0 && v <= 0 {
            s_neg.add_term((-u) as u32, (-v) as u32, c);
        } else {
            return Err(PolyError::BadProduct(format!(
                "mixed-sign residual term at offset ({u},{v})"
            )));
        }
    }
    if s_pos != s_neg {
        return Err(PolyError::BadProduct(
            "positive and mirrored supports disagree".into(),
        ));
    }
    Ok(s_pos)
}
