//! Gain kernels and phase configurations.
//!
//! With permutation matrix `P` (`P[i][j] = 1` iff `sigma(j) = i`) and phase
//! diagonal `c`, the power re-radiated towards `outgoing` for a signal arriving
//! from `incoming` is
//!
//! ```text
//! A = | s(outgoing)^T P diag(c) s(incoming) |^2
//!   = | sum_e c_e s_e(incoming) s_sigma(e)(outgoing) |^2
//! ```
//!
//! The phase is applied at the receiving element `e` and the signal leaves from
//! `sigma(e)`. Gains are evaluated by direct phasor summation in `f64`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{axis_phases, Direction};
use crate::permutation::Permutation;

const UNIT_TOL: f64 = 1e-12;

/// Phase-shifter arrangement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hardware {
    /// One shifter per element; the permutation is routed through circulators.
    PerElement,
    /// One shifter per connected element pair, no circulators. Requires an
    /// involution.
    SharedPair,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RisModel {
    perm: Permutation,
    hardware: Hardware,
}

impl RisModel {
    pub fn new(perm: Permutation, hardware: Hardware) -> Result<Self> {
        if hardware == Hardware::SharedPair && !perm.is_symmetric() {
            return Err(Error::InvalidHardware);
        }
        Ok(Self { perm, hardware })
    }

    pub fn per_element(perm: Permutation) -> Self {
        Self { perm, hardware: Hardware::PerElement }
    }

    /// A standard surface: identity permutation, per-element shifters.
    pub fn standard(m_side: usize) -> Result<Self> {
        Ok(Self::per_element(Permutation::identity(m_side)?))
    }

    pub fn m_side(&self) -> usize {
        self.perm.m_side()
    }

    pub fn elements(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn hardware(&self) -> Hardware {
        self.hardware
    }

    /// `M^4`, the coherent-sum ceiling.
    pub fn full_gain(&self) -> f64 {
        (self.elements() as f64).powi(2)
    }

    fn require_per_element(&self, what: &str) -> Result<()> {
        match self.hardware {
            Hardware::PerElement => Ok(()),
            Hardware::SharedPair => Err(Error::UnsupportedHardware(format!(
                "{what} needs per-element shifters; use symmetric_pair_config"
            ))),
        }
    }
}

/// Per-element unit-modulus phase settings, in the flattened grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseConfig {
    phases: Vec<Complex64>,
}

impl PhaseConfig {
    pub fn new(phases: Vec<Complex64>) -> Result<Self> {
        if let Some(i) = phases.iter().position(|c| (c.norm() - 1.0).abs() > UNIT_TOL) {
            return Err(Error::InvalidArgument(format!(
                "phase {i} has modulus {}, expected 1",
                phases[i].norm()
            )));
        }
        Ok(Self { phases })
    }

    /// All phases zero: `c(sigma, 0, 0)`.
    pub fn unit(len: usize) -> Self {
        Self { phases: vec![Complex64::new(1.0, 0.0); len] }
    }

    pub fn from_angles(angles: &[f64]) -> Result<Self> {
        if let Some(a) = angles.iter().find(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument(format!("phase angle {a} is not finite")));
        }
        Ok(Self { phases: angles.iter().map(|&a| Complex64::from_polar(1.0, a)).collect() })
    }

    pub fn phases(&self) -> &[Complex64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// Angles in radians, wrapped into `[0, 2 pi)`.
    pub fn angles(&self) -> Vec<f64> {
        self.phases
            .iter()
            .map(|c| {
                let a = c.arg().rem_euclid(TAU);
                if a >= TAU {
                    0.0
                } else {
                    a
                }
            })
            .collect()
    }

    /// Multiplies every entry by `exp(j * theta)`.
    pub fn rotated(&self, theta: f64) -> Self {
        let r = Complex64::from_polar(1.0, theta);
        Self { phases: self.phases.iter().map(|c| c * r).collect() }
    }
}

impl Serialize for PhaseConfig {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.angles().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PhaseConfig {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let angles = Vec::<f64>::deserialize(d)?;
        PhaseConfig::from_angles(&angles).map_err(serde::de::Error::custom)
    }
}

/// Uplink/downlink weight of a beam-split configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitWeights {
    alpha: f64,
}

impl SplitWeights {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidArgument(format!("alpha {alpha} is outside [0, 1]")));
        }
        Ok(Self { alpha })
    }

    pub fn even() -> Self {
        Self { alpha: 0.5 }
    }

    pub fn alpha(self) -> f64 {
        self.alpha
    }
}

/// Grid coordinates of each element and of the element that re-radiates it.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub m_side: usize,
    /// 0-based `(row, col)` of element `e`.
    pub src: Vec<(usize, usize)>,
    /// 0-based `(row, col)` of `sigma(e)`.
    pub dst: Vec<(usize, usize)>,
}

impl Layout {
    pub fn new(perm: &Permutation) -> Self {
        let m = perm.m_side();
        let rc = |e: usize| (e / m, e % m);
        Self {
            m_side: m,
            src: (0..perm.len()).map(rc).collect(),
            dst: perm.targets().iter().map(|&t| rc(t)).collect(),
        }
    }
}

/// Per-element field contribution `s_e(incoming) s_sigma(e)(outgoing)`.
pub(crate) fn element_fields(layout: &Layout, incoming: Direction, outgoing: Direction) -> Vec<Complex64> {
    let m = layout.m_side;
    let (ix, iy) = (axis_phases(m, incoming.kx), axis_phases(m, incoming.ky));
    let (ox, oy) = (axis_phases(m, outgoing.kx), axis_phases(m, outgoing.ky));
    layout.src.iter().zip(&layout.dst).map(|(&(r, c), &(tr, tc))| ix[r] * iy[c] * (ox[tr] * oy[tc])).collect()
}

fn check_len(model: &RisModel, config: &PhaseConfig) -> Result<()> {
    if config.len() != model.elements() {
        return Err(Error::InvalidArgument(format!(
            "phase config has {} entries, surface has {}",
            config.len(),
            model.elements()
        )));
    }
    Ok(())
}

/// `|s(outgoing)^T P C s(incoming)|^2`, in `[0, M^4]`.
pub fn gain(model: &RisModel, incoming: Direction, outgoing: Direction, config: &PhaseConfig) -> Result<f64> {
    check_len(model, config)?;
    let layout = Layout::new(model.perm());
    let fields = element_fields(&layout, incoming, outgoing);
    let sum: Complex64 = fields.iter().zip(config.phases()).map(|(f, c)| f * c).sum();
    Ok(sum.norm_sqr())
}

/// Gain at offsets `(delta, delta_tilde)` with the all-zero configuration,
/// i.e. `A(delta, delta_tilde; c(sigma, 0, 0))`.
pub fn offset_gain(model: &RisModel, delta: Direction, delta_tilde: Direction) -> f64 {
    let layout = Layout::new(model.perm());
    let sum: Complex64 = element_fields(&layout, delta, delta_tilde).iter().sum();
    sum.norm_sqr()
}

fn conj_unit(fields: Vec<Complex64>) -> Vec<Complex64> {
    fields.into_iter().map(|f| f.conj()).collect()
}

/// Configuration reaching `M^4` from `incoming` to `outgoing`:
/// `c_e = conj(s_sigma(e)(outgoing) s_e(incoming))`.
///
/// With the identity permutation this is `s(-(incoming + outgoing))`.
pub fn optimal_config(model: &RisModel, outgoing: Direction, incoming: Direction) -> Result<PhaseConfig> {
    model.require_per_element("optimal_config")?;
    let layout = Layout::new(model.perm());
    Ok(PhaseConfig { phases: conj_unit(element_fields(&layout, incoming, outgoing)) })
}

/// Normalized weighted sum of the `k -> k~` and `k~ -> k` optimal
/// configurations. `alpha = 1` recovers the forward optimum and `alpha = 1/2`
/// splits the beam evenly between the two link directions.
pub fn beam_split_config(
    model: &RisModel,
    k: Direction,
    ktilde: Direction,
    w: SplitWeights,
) -> Result<PhaseConfig> {
    model.require_per_element("beam_split_config")?;
    let forward = optimal_config(model, ktilde, k)?;
    let reverse = optimal_config(model, k, ktilde)?;
    let a = w.alpha();
    let phases = forward
        .phases()
        .iter()
        .zip(reverse.phases())
        .enumerate()
        .map(|(element, (f, r))| {
            let sum = f * a + r * (1.0 - a);
            let modulus = sum.norm();
            if modulus < 1e-12 {
                Err(Error::DegenerateSplit { element, modulus })
            } else {
                Ok(sum / modulus)
            }
        })
        .collect::<Result<_>>()?;
    Ok(PhaseConfig { phases })
}

/// Shared-pair hardware: one phase per connected pair `{e, sigma(e)}`, written
/// to both elements.
///
/// Each pair contributes `c (s_e(k) s_e'(k~) + s_e'(k) s_e(k~))`, so the optimum
/// aligns every pair subtotal with the real axis. Fixed points act as ordinary
/// per-element shifters. The resulting configuration is the same for `(k, k~)`
/// and `(k~, k)`.
pub fn symmetric_pair_config(model: &RisModel, k: Direction, ktilde: Direction) -> Result<PhaseConfig> {
    if model.hardware() != Hardware::SharedPair {
        return Err(Error::UnsupportedHardware("symmetric_pair_config needs shared-pair hardware".into()));
    }
    let perm = model.perm();
    if !perm.is_symmetric() {
        return Err(Error::InvalidHardware);
    }
    let layout = Layout::new(perm);
    let forward = element_fields(&layout, k, ktilde);
    let one = Complex64::new(1.0, 0.0);
    let mut phases = vec![one; perm.len()];
    for e in 0..perm.len() {
        let partner = perm.target(e);
        if partner < e {
            continue;
        }
        let subtotal = if partner == e { forward[e] } else { forward[e] + forward[partner] };
        let modulus = subtotal.norm();
        // A cancelled pair contributes nothing whatever its phase.
        let c = if modulus > 0.0 { subtotal.conj() / modulus } else { one };
        phases[e] = c;
        phases[partner] = c;
    }
    Ok(PhaseConfig { phases })
}

/// Optimal shared-pair gain in closed form:
/// `(sum_pairs |1 + exp(j pi theta)| + fixed_points)^2` with
/// `theta = (m' - m)(kx - k~x) + (n' - n)(ky - k~y)` for the pair
/// `(m, n) <-> (m', n')`.
pub fn symmetric_gain_closed_form(model: &RisModel, k: Direction, ktilde: Direction) -> Result<f64> {
    let perm = model.perm();
    if !perm.is_symmetric() {
        return Err(Error::InvalidArgument("closed form needs a symmetric permutation".into()));
    }
    let layout = Layout::new(perm);
    let diff = k - ktilde;
    let mut amplitude = 0.0;
    for e in 0..perm.len() {
        let partner = perm.target(e);
        if partner == e {
            amplitude += 1.0;
        } else if partner > e {
            let (r, c) = layout.src[e];
            let (tr, tc) = layout.dst[e];
            let theta = (tr as f64 - r as f64) * diff.kx + (tc as f64 - c as f64) * diff.ky;
            // |1 + exp(j pi theta)| = 2 |cos(pi theta / 2)|
            amplitude += 2.0 * (0.5 * PI * theta).cos().abs();
        }
    }
    Ok(amplitude * amplitude)
}
