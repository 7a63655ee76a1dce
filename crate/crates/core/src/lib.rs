//! Distances to cusps on Hilbert modular varieties over totally real fields.
//!
//! The crate computes, for a totally real number field K of degree n and a
//! fractional ideal `a` of its ring of integers, the `a`-distance from points
//! of the product upper half-plane H^n to the cusps of the generalized
//! Hilbert modular group, locates the two nearest cusps, and numerically
//! verifies a family of Minkowski-type inequalities on those distances
//! together with the associated cusp-ball volume and integral estimates.
//!
//! Layout:
//! - [`field`]: exact arithmetic in K, real embeddings, units, discriminant;
//! - [`ideal`]: fractional ideals as Hermite-normal-form lattices;
//! - [`cusp`]: the distance function, adelic heights and nearest-cusp search;
//! - [`action`]: the modular group action, cusp matrices, reduction;
//! - [`minkowski`]: executable checks of the product bounds;
//! - [`volume`]: cusp-ball volumes, Monte-Carlo sampling and integrals.
//!
//! Exact data (field elements, ideals, matrices) uses arbitrary-precision
//! rationals throughout; the analytic layer works in f64 with exact ideal
//! norms spliced in. All values are immutable after construction and safe to
//! share across threads.

pub mod action;
pub mod config;
pub mod cusp;
pub mod field;
pub mod ideal;
pub mod interval;
pub mod matrix;
pub mod minkowski;
pub mod numutil;
pub mod rng;
pub mod volume;

pub use config::FieldConfig;
pub use cusp::{Cusp, HPoint, MuReport};
pub use field::{FieldElement, NumberField};
pub use ideal::FractionalIdeal;
