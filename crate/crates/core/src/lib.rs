//! Exact measure algebra on the circle group `R/Z`.
//!
//! Points of the circle are rationals reduced mod 1, subsets are canonical
//! finite unions of half-open arcs, and every measure is an exact rational.
//! On top of that sit the approximate-order sets, truncated tail unions
//! (finite stand-ins for limsup sets), affine circle maps and density
//! ratios, plus experiment drivers that assemble them into reports.

pub mod approx;
pub mod arcset;
pub mod circle;
pub mod density;
pub mod error;
pub mod ergodic;
pub mod experiments;
pub mod numtheory;

pub use approx::{DeltaSequence, Decomposition, TailUnionSpec};
pub use arcset::{Arc, ArcSet};
pub use circle::{CirclePoint, Rational};
pub use density::BallSpec;
pub use error::{Error, Result};
pub use ergodic::AffineCircleMap;
pub use experiments::ExperimentReport;
pub use numtheory::IndexPredicate;
