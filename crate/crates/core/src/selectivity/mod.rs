//! Which offset pairs still reach full gain.
//!
//! For a surface configured for `(k, k~)`, the gain at `(k + Delta, k~ + Delta~)`
//! equals the gain at `(Delta, Delta~)` with the all-zero configuration, so
//! everything here is phrased in offsets around the origin.
//!
//! * [`solve_full_gain_direction`]: the outgoing directions of a standard
//!   surface that reach `M^4` for a given impinging direction.
//! * [`certify_separable`]: exact decision of spatial selectivity for
//!   separable permutations, using rational arithmetic modulo 2.
//! * [`GridOracle`]: brute-force 4-D grid search with local refinement, the
//!   independent referee for the certifier and for the optimizer in
//!   [`crate::metrics`].

mod certify;
mod directions;
mod oracle;

pub use certify::{
    certify_by_grid, certify_separable, verify_certificate, verify_certificate_with, AxisSolutions,
    CertMethod, Mod2Rational, SelectivityCertificate, Witness,
};
pub use directions::{solve_full_gain_direction, FullGainSolution};
pub use oracle::{brute_force_max_gain, GridOracle, OracleResult, DEFAULT_BUDGET};
