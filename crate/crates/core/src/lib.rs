//! Exact and numerical tools for rotation sets of torus dynamics.
//!
//! The symbolic side ([`sft`], [`polygon`], [`support`], [`oracle`]) computes
//! the rational rotation polygon of a displacement-weighted subshift of
//! finite type with exact rational arithmetic, by two independent routes
//! (short-cycle enumeration and max-mean-cycle support queries) plus a
//! brute-force periodic-word oracle. The sequence side ([`ap`]) builds a
//! hierarchical parity sequence whose partial means oscillate and verifies
//! its statistics at exact checkpoints. The numerical side ([`torus`])
//! iterates explicit torus lifts, estimates rotation sets by orbit
//! averaging, and checks displacement bounds against rectangle charts.

pub mod ap;
pub mod error;
pub mod exact;
pub mod hull;
pub mod oracle;
pub mod polygon;
pub mod sample;
pub mod sft;
pub mod support;
pub mod torus;

pub use error::{Error, Result};
pub use exact::{IntVec2, Mat2, Rat, Rational2};
pub use hull::{PolygonTag, RationalPolygon};
pub use sft::{Cycle, SftSystem, Symbol, ValidationReport, Word};
