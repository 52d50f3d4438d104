//! Bell correlation polytopes in exact arithmetic.
//!
//! * [`scenario`]: scenarios `(N, M, K)`, deterministic strategies and vertices,
//! * [`geometry`]: affine hulls, double-description facet enumeration, facet
//!   tests and LP membership with Farkas certificates,
//! * [`symmetry`]: the relabeling group, canonical forms and facet classes,
//! * [`wernerwolf`]: the complete `(N, 2, 2)` correlation facet family,
//! * [`quantum`]: Bell operators, see-saw optimization, GHZ values and PPT checks,
//! * [`io`]: text and JSON interchange formats.

pub mod error;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod quantum;
pub mod rational;
pub mod scenario;
pub mod symmetry;
pub mod wernerwolf;

pub use error::{Error, Result};
pub use geometry::{FacetStatus, Inequality, Limits, MembershipCertificate};
pub use rational::Rational;
pub use scenario::{Behavior, DeterministicStrategy, Representation, Scenario};
