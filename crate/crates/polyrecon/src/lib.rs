//! Reconstruction of binary strings from their substring composition multisets.
//!
//! A length-`n` binary string has `n(n+1)/2` contiguous substrings; the
//! *composition* of a substring is its unordered content `1^w 0^z`. The
//! multiset of all substring compositions is what a tandem mass spectrometry
//! readout of a synthetic polymer exposes, and the reconstruction problem is
//! to recover the string (up to the inherent reversal ambiguity) from that
//! multiset alone.
//!
//! The pipeline implemented here works over a bivariate polynomial encoding:
//! the multiset becomes a generating polynomial `S(x,y)`, which determines a
//! product polynomial `F(x,y)` equal to `P(x,y)·P*(x,y)` for every string
//! with the given multiset (`P` is the prefix polynomial of the string, `P*`
//! its reciprocal). [`reconstruct()`] recovers the zero-run encoding of all
//! matching strings from `F` by solving for run lengths from both ends
//! inward, validating each step with evaluations in a prime field, and
//! backtracking when a step admits two consistent choices.
//!
//! The [`codes`] module generates codebooks of strings that the solver
//! decodes without backtracking; the [`oracle`] module provides brute-force
//! ground truth for small lengths.

pub mod codes;
pub mod field;
pub mod oracle;
#[doc(hidden)]
pub mod parallel;
pub mod poly;
pub mod reconstruct;
pub mod strings;

pub use field::{FieldCtx, FieldPolicy};
pub use poly::BiPoly;
pub use reconstruct::{reconstruct, ReconConfig, ReconReport};
pub use strings::{BitString, CompositionMultiset, GapString};
