//! Exact dynamics of continuous piecewise-linear self-maps of the unit interval.
//!
//! The crate works entirely in arbitrary-precision rational arithmetic: maps are
//! node lists with affine interpolation, open sets are canonical finite unions of
//! rational intervals, and every image, preimage, composition and distance is
//! computed exactly. On top of that sit non-autonomous map sequences, hitting-time
//! sets `N(U,V) = {n : f_1^n(U) ∩ V ≠ ∅}` with sound certificates about their
//! infinite tails, Furstenberg-family membership verdicts, and grid-based
//! classification of systems as transitive, mixing or topologically ergodic.
//!
//! Modules:
//! - [`interval`]: rational intervals with per-endpoint inclusivity, canonical unions,
//!   Hausdorff distance.
//! - [`plmap`]: piecewise-linear maps and their exact algebra.
//! - [`ndsys`]: map sequences, orbits of sets, hit sets and tail certificates.
//! - [`family`]: Furstenberg families and membership verdicts.
//! - [`classify`]: classification over dyadic grids, product systems, finite-subset
//!   hyperspace checks, and instance-level relation checkers.

pub mod classify;
pub mod family;
pub mod interval;
pub mod ndsys;
pub mod plmap;

#[cfg(any(test, feature = "testkit"))]
pub mod testkit;

pub use interval::{hausdorff_distance, Interval, IntervalError, IntervalSet, Rat};
pub use plmap::{MapError, PLMap};
