//! Exact selectivity decision for separable permutations.
//!
//! For `(m, n) -> (sigma1(m), sigma2(n))` the offset gain factorizes into one
//! factor per axis,
//!
//! ```text
//! mu_v = | sum_m exp(j pi (m a + sigma(m) b)) |^2,   (a, b) = (Delta_v, Delta~_v)
//! ```
//!
//! and `mu_v = M^2` iff `m a + sigma(m) b` is constant mod 2, i.e.
//! `a + g_m b = 0 (mod 2)` for every gap `g_m = sigma(m + 1) - sigma(m)`.
//! Subtracting two such equations gives `(g_m - g_m') b = 0 (mod 2)`, so when
//! the gaps are not all equal every solution has `b = 2q / (g_m - g_m')` for
//! some pair of gaps. Those finitely many rationals are enumerated, `a` is
//! back-solved and all equations are checked exactly.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::oracle::GridOracle;
use crate::error::Result;
use crate::geometry::Direction;
use crate::permutation::{PermDiagnostics, Permutation};
use crate::ris::{offset_gain, RisModel};

/// Exact rational modulo 2, kept in `(-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mod2Rational(Ratio<i64>);

impl Mod2Rational {
    pub fn zero() -> Self {
        Self(Ratio::from_integer(0))
    }

    pub fn new(numer: i64, denom: i64) -> Self {
        Self::from_ratio(Ratio::new(numer, denom))
    }

    pub fn from_ratio(x: Ratio<i64>) -> Self {
        let (n, d) = (*x.numer(), *x.denom());
        let mut r = n.mod_floor(&(2 * d));
        if r > d {
            r -= 2 * d;
        }
        Self(Ratio::new(r, d))
    }

    pub fn ratio(self) -> Ratio<i64> {
        self.0
    }

    pub fn is_zero(self) -> bool {
        *self.0.numer() == 0
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    /// `k * self (mod 2)`.
    pub fn scale(self, k: i64) -> Self {
        Self::from_ratio(self.0 * k)
    }

    pub fn plus(self, other: Self) -> Self {
        Self::from_ratio(self.0 + other.0)
    }
}

impl fmt::Display for Mod2Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Solutions `(a, b)` of `a + g_m b = 0 (mod 2)` on one axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxisSolutions {
    /// A single element: every `(a, b)` solves.
    Plane,
    /// All gaps equal `gap`: the line `a = -gap * b`.
    Line { gap: i64 },
    /// Finitely many solutions, always including `(0, 0)`.
    Points(BTreeSet<(Mod2Rational, Mod2Rational)>),
}

impl AxisSolutions {
    /// `sigma` is a 0-based bijection on `0..M`.
    pub fn of(sigma: &[usize]) -> Self {
        let gaps = PermDiagnostics::of_zero_based(sigma).consecutive_gaps;
        let Some(&g1) = gaps.first() else {
            return AxisSolutions::Plane;
        };
        if gaps.iter().all(|&g| g == g1) {
            return AxisSolutions::Line { gap: g1 };
        }

        let mut denominators = BTreeSet::new();
        for (i, gi) in gaps.iter().enumerate() {
            for gj in &gaps[i + 1..] {
                if gi != gj {
                    denominators.insert((gi - gj).abs());
                }
            }
        }

        let mut points = BTreeSet::new();
        for d in denominators {
            // b = 2q / d, one representative per residue class in (-1, 1].
            for q in Integer::div_floor(&-d, &2) + 1..=Integer::div_floor(&d, &2) {
                let b = Mod2Rational::new(2 * q, d);
                let a = b.scale(-g1);
                if gaps.iter().all(|&g| a.plus(b.scale(g)).is_zero()) {
                    points.insert((a, b));
                }
            }
        }
        AxisSolutions::Points(points)
    }

    /// True when `(0, 0)` is the only solution.
    pub fn only_trivial(&self) -> bool {
        matches!(self, AxisSolutions::Points(p) if p.len() == 1)
    }

    /// Nonzero solutions as `(a, b)` pairs; for a continuum, one representative.
    fn nonzero_representatives(&self) -> Vec<(Mod2Rational, Mod2Rational)> {
        match self {
            AxisSolutions::Plane => vec![(Mod2Rational::new(1, 2), Mod2Rational::new(1, 2))],
            AxisSolutions::Line { gap } => {
                let b = Mod2Rational::new(1, 2);
                vec![(b.scale(-gap), b)]
            }
            AxisSolutions::Points(p) => {
                p.iter().copied().filter(|(a, b)| !(a.is_zero() && b.is_zero())).collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertMethod {
    ExactRational,
    Grid,
}

/// A nonzero offset pair that reaches full gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub delta: Direction,
    pub delta_tilde: Direction,
}

impl Witness {
    pub fn norm(&self) -> f64 {
        (self.delta.norm_sq() + self.delta_tilde.norm_sq()).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectivityCertificate {
    pub selective: bool,
    /// Present iff not selective.
    pub witness: Option<Witness>,
    pub method: CertMethod,
    pub m_side: usize,
    /// 1-based per-axis factors, for exact certificates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<Vec<usize>>,
    /// Grid certificates: exclusion radius, step and normalized peak.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridParameters>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridParameters {
    pub exclusion_radius: f64,
    pub step: f64,
    pub peak: f64,
}

fn is_visible(x: Mod2Rational, y: Mod2Rational) -> bool {
    let (x, y) = (x.ratio(), y.ratio());
    x * x + y * y <= Ratio::from_integer(1)
}

/// Exact selectivity decision for `(m, n) -> (sigma1(m), sigma2(n))`, factors
/// 1-based.
///
/// Anchored at the configured pair `(0, 0)`: the surface is selective iff no
/// nonzero `(Delta, Delta~)` modulo 2 with both offsets in the visible disk
/// reaches `M^4`. A witness, when present, is the visible solution farthest
/// from the origin.
pub fn certify_separable(sigma1: &[usize], sigma2: &[usize]) -> Result<SelectivityCertificate> {
    let perm = Permutation::separable(sigma1, sigma2)?;
    let (rows, cols) = perm.separable_factors().expect("separable by construction");
    let x = AxisSolutions::of(&rows);
    let y = AxisSolutions::of(&cols);

    let zero = (Mod2Rational::zero(), Mod2Rational::zero());
    let mut candidates = Vec::new();
    for px in x.nonzero_representatives() {
        candidates.push((px, zero));
    }
    for py in y.nonzero_representatives() {
        candidates.push((zero, py));
    }
    if let (AxisSolutions::Points(_), AxisSolutions::Points(_)) = (&x, &y) {
        for px in x.nonzero_representatives() {
            for py in y.nonzero_representatives() {
                candidates.push((px, py));
            }
        }
    }

    let witness = candidates
        .into_iter()
        .filter(|&((ax, bx), (ay, by))| is_visible(ax, ay) && is_visible(bx, by))
        .map(|((ax, bx), (ay, by))| Witness {
            delta: Direction::new(ax.to_f64(), ay.to_f64()),
            delta_tilde: Direction::new(bx.to_f64(), by.to_f64()),
        })
        .max_by(|a, b| a.norm().total_cmp(&b.norm()));

    Ok(SelectivityCertificate {
        selective: witness.is_none(),
        witness,
        method: CertMethod::ExactRational,
        m_side: perm.m_side(),
        rows: Some(sigma1.to_vec()),
        cols: Some(sigma2.to_vec()),
        grid: None,
    })
}

/// Numerical certificate for any permutation: not selective iff the grid
/// oracle finds `A >= M^4 (1 - 1e-6)` outside the exclusion ball.
pub fn certify_by_grid(
    model: &RisModel,
    exclusion_radius: f64,
    oracle: &GridOracle,
) -> Result<SelectivityCertificate> {
    let best = oracle.max_outside_ball(model, exclusion_radius)?;
    let full = best.normalized >= 1.0 - 1e-6;
    Ok(SelectivityCertificate {
        selective: !full,
        witness: full.then_some(Witness { delta: best.delta, delta_tilde: best.delta_tilde }),
        method: CertMethod::Grid,
        m_side: model.m_side(),
        rows: None,
        cols: None,
        grid: Some(GridParameters { exclusion_radius, step: oracle.step, peak: best.normalized }),
    })
}

/// Checks a certificate against the model numerically. A witness must reach
/// `M^4` to within `1e-9` relative; a selective claim must survive the grid
/// oracle outside a ball of radius `exclusion_radius`.
pub fn verify_certificate_with(
    cert: &SelectivityCertificate,
    model: &RisModel,
    exclusion_radius: f64,
    oracle: &GridOracle,
) -> Result<bool> {
    if cert.m_side != model.m_side() {
        return Ok(false);
    }
    match (&cert.witness, cert.selective) {
        (Some(w), false) => {
            let g = offset_gain(model, w.delta, w.delta_tilde);
            Ok((g / model.full_gain() - 1.0).abs() <= 1e-9)
        }
        (None, true) => {
            let best = oracle.max_outside_ball(model, exclusion_radius)?;
            Ok(best.normalized < 1.0 - 1e-6)
        }
        _ => Ok(false),
    }
}

/// [`verify_certificate_with`] using the default oracle and an exclusion
/// radius of 0.1. Oracle failures count as a failed verification.
pub fn verify_certificate(cert: &SelectivityCertificate, model: &RisModel) -> bool {
    verify_certificate_with(cert, model, 0.1, &GridOracle::default()).unwrap_or(false)
}
