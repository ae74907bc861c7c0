//! Operator calculus for skew and snapping-out Brownian motions on a grid.
//!
//! Functions on the split line ℝ♯ ([`SharpFn`]) are extended to pairs of
//! whole-line functions ([`FnPair`]); the basic cosine family acts on the
//! pair and the restriction brings the result back. This factorisation gives
//! the cosine families of the four membrane models, and the Weierstrass
//! formula turns them into semigroups. The [`limits`] module measures how the
//! snapping-out objects approach their skew counterparts as the
//! permeabilities grow, and [`montecarlo`] provides an independent particle
//! check of the semigroup values.

pub mod conv;
pub mod cosine;
pub mod error;
pub mod extensions;
pub mod function_space;
pub mod io;
pub mod limits;
pub mod montecarlo;
pub mod probes;
pub mod projections;
pub mod semigroup;

pub use cosine::Family;
pub use error::{Error, Result};
pub use function_space::{FnPair, Grid, LineFn, MembraneParams, SharpFn, MEMBERSHIP_TOL};
