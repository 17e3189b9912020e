//! Horoball packing densities for the fourteen Koszul-type Coxeter simplex
//! tilings of hyperbolic n-space, 6 <= n <= 9.
//!
//! The crate works in the projective (Cayley-Klein) model with the Lorentzian
//! form `-x0*y0 + x1*y1 + ... + xn*yn`. Exact catalog data is stored as
//! expression strings and evaluated with MPFR at a caller-chosen precision.
//!
//! Module layout, bottom-up:
//!
//! * [`scalar`]: arbitrary-precision reals, the expression grammar and the
//!   special functions (Riemann and Hurwitz zeta, Dirichlet L-series).
//! * [`lorentz`]: inner product, point classification, distances, polarity
//!   and the Lorentz map that moves an ideal vertex to `(1,0,...,0,1)`.
//! * [`horosphere`]: horospheres in standard position, edge intersections
//!   and the horoball piece volume law.
//! * [`catalog`]: the bundled simplex dataset with Gram, incidence and
//!   commensurability checks.
//! * [`density`]: the local density pipeline and the multi-cusp search.
//! * [`mc_oracle`]: an independent Monte Carlo volume estimate.
//! * [`reference`]: published reference values used by the verifiers.

pub mod catalog;
pub mod density;
pub mod error;
pub mod horosphere;
pub mod lorentz;
pub mod mc_oracle;
pub mod reference;
pub mod scalar;
pub mod verify;

pub use catalog::{Catalog, CoxeterSimplexDef, SimplexGeometry};
pub use density::DensityReport;
pub use error::{Error, Result};
pub use mc_oracle::VolumeEstimate;
pub use scalar::{ExactExpr, Scalar};

/// Working precision used when the caller does not choose one.
pub const DEFAULT_PRECISION: u32 = 256;

/// Smallest precision accepted by the public entry points.
pub const MIN_PRECISION: u32 = 64;
