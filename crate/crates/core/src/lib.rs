//! Gain computation and selectivity analysis for reconfigurable intelligent
//! surfaces whose elements re-radiate through a fixed permutation.
//!
//! An `M x M` surface receives a far-field signal from direction `k`, applies a
//! per-element phase shift and re-radiates it towards `k~`. With a permutation
//! `sigma`, the signal received at element `e` leaves from element `sigma(e)`.
//! The normalized gain `A / M^4` equals one only for the configured pair when
//! the permutation is chosen well, which is what [`selectivity`] certifies and
//! what [`metrics`] quantifies.
//!
//! Modules:
//!
//! * [`geometry`]: directional cosines, mod-2 arithmetic and steering vectors.
//! * [`permutation`]: construction, classification and diagnostics of `sigma`.
//! * [`ris`]: gain kernels and phase-configuration constructors.
//! * [`selectivity`]: full-gain direction solver, exact separable certifier and
//!   the brute-force grid oracle.
//! * [`metrics`]: main-lobe floor `beta`, out-of-lobe peak `tau`, CDFs and
//!   pattern slices.

pub mod error;
pub mod geometry;
pub mod metrics;
pub mod permutation;
pub mod ris;
pub mod rng;
pub mod selectivity;

pub use error::{Error, Result};
pub use geometry::{mod2_canonical, steering_vector, Direction, SteeringVector};

pub use metrics::{BallConstraint, MetricReport, PatternSlice};
pub use permutation::{PermDiagnostics, PermKind, Permutation};
pub use ris::{Hardware, PhaseConfig, RisModel, SplitWeights};
pub use selectivity::{FullGainSolution, SelectivityCertificate};
