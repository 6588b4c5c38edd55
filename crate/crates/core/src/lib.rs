//! Finite-alphabet conditional Rényi information measures and the machinery
//! around hashing a correlated source.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function of immutable inputs; file IO, random instance generation and the
//! command-line front end live in the `ruq` companion crate.
//!
//! Layout:
//!
//! - [`pmf`] and [`source`]: distributions, joint sources, tilting and
//!   i.i.d. extensions.
//! - [`measures`]: divergences, the conditional entropy family, the Gallager
//!   function, the optimal reference distribution and the critical rates.
//! - [`bounds`]: remaining-uncertainty bounds and exponents as functions of
//!   the rate, the `s0` threshold, optimal-rate thresholds and the type-class
//!   exponent `Λ(s, R)`.
//! - [`gf2m`] and [`hash`]: binary extension fields and seeded hash families
//!   with exact universality certification.
//! - [`oneshot`]: exact hash-conditioned entropies and the one-shot
//!   inequality checks, including the binomial moment bound.
//! - [`slepian_wolf`]: MAP decoding of block encoders and the identities that
//!   tie correct-decoding probability to conditional entropies.
//! - [`multipath`]: masking a message with a random field element and
//!   splitting it over several paths.
//!
//! All logarithms are natural; entropies are in nats.

#![cfg_attr(not(test), no_std)]
// `!(x > lo)` is how parameter checks reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bounds;
mod error;
pub mod gf2m;
pub mod hash;
mod math;
pub mod measures;
pub mod multipath;
pub mod oneshot;
pub mod optimize;
pub mod pmf;
pub mod report;
pub mod slepian_wolf;
pub mod source;

pub use error::{Error, Result};
pub use measures::RenyiOrderSpec;
pub use pmf::Pmf;
pub use report::{CheckRecord, Verdict, VerificationReport};
pub use source::{JointSource, ProductSource};

/// Tolerance on the total mass of user-supplied distributions.
pub const INPUT_MASS_TOL: f64 = 1e-9;

/// Cap on the number of cells an enumerated product source may have.
pub const DEFAULT_CELL_CAP: u64 = 10_000_000;

/// Cap on the seed count of an explicitly enumerated hash family.
pub const DEFAULT_SEED_CAP: u64 = 1 << 24;

/// Orders with `|s|` below this are treated as the Shannon limit.
pub const SHANNON_SWITCH: f64 = 1e-9;
