//! Kuhn triangulations, barycentric stars and `b_Δ`-affine maps, and the
//! star cover witnessing `asdim(A) < n` for small `A ⊂ ℝⁿ`.

mod baffine;
mod claims;
mod cover;
mod kuhn;
pub mod linalg;
mod simplex;

pub use baffine::{
    b_affine_eval, b_affine_invert, bary_star_membership, half_simplex_point, in_half_simplex, lip_product, lip_sweep,
    sample_b_primes, weight_grid, BAffineMap, LipSweep, LipschitzBound,
};
pub use claims::{claim4_check, claim6_check, near_perturbed_star, near_std_star, Claim4Report, Claim6Report, Probe};
pub use cover::{build_cover, phi_demand, CoverConfig, CoverReport, CoverResult, PlacedSimplex};
pub use kuhn::{kuhn_simplices, kuhn_simplices_up_to, locate_simplex, KuhnCell, KuhnComplex, MAX_KUHN_DIM};
pub use simplex::{std_star_membership, Point, Simplex, StdSimplex};
