//! Finite-window computational coarse geometry.
//!
//! The crate models slices of coarse spaces (lattice boxes in `ℝⁿ` and word
//! balls in finitely generated groups) and implements, on those slices:
//!
//! * colourings as witnesses of asymptotic dimension, the cover/colouring
//!   conversions, the multiplicity-to-colouring algorithm and the merge of two
//!   certified colourings ([`coloring`]);
//! * largeness, the φ-function smallness witness and non-smallness
//!   certificates ([`smallness`]);
//! * the Kuhn triangulation, barycentric stars, `b_Δ`-affine maps and the cover
//!   that witnesses `asdim(A) < n` for small `A ⊂ ℝⁿ` ([`triangulation`]);
//! * Cayley balls of `ℤⁿ`, free groups and lamplighters ([`cayley`]);
//! * a batch command-line front end ([`cli`]).
//!
//! All predicates are exact: coordinates are rationals and radii are
//! [`Scale`]s. Results are per-scale and per-window statements.

pub mod cayley;
pub mod cli;
pub mod coarse;
pub mod coloring;
pub mod error;
pub mod scale;
pub mod smallness;
pub mod triangulation;

pub use coarse::{PointId, PointSet, Space, Window, WindowSpec};
pub use error::{Error, Result};
pub use scale::{Scale, Q};
