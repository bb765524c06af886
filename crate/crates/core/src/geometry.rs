//! Directional-cosine arithmetic and steering vectors for a square grid with
//! half-wavelength spacing.
//!
//! Grid elements are addressed as `(m, n)` with `m, n` in `1..=M`. Vectors are
//! flattened row-major: element `(m, n)` sits at index `(m - 1) * M + (n - 1)`.
//! Every module that stores per-element data uses this order.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A far-field direction in directional cosines `(kx, ky)`.
///
/// The same type carries offsets (`Delta`) and configuration vectors (`r`), which
/// need not lie in the visible region.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Direction {
    pub kx: f64,
    pub ky: f64,
}

impl Direction {
    pub const ZERO: Direction = Direction { kx: 0.0, ky: 0.0 };

    pub const fn new(kx: f64, ky: f64) -> Self {
        Self { kx, ky }
    }

    pub fn norm_sq(self) -> f64 {
        self.kx * self.kx + self.ky * self.ky
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `kx^2 + ky^2 <= 1`.
    pub fn is_visible(self) -> bool {
        self.norm_sq() <= 1.0
    }

    pub fn is_finite(self) -> bool {
        self.kx.is_finite() && self.ky.is_finite()
    }

    /// Component-wise mod-2 representative in `(-1, 1]`.
    pub fn canonical(self) -> Self {
        Self::new(mod2_canonical(self.kx), mod2_canonical(self.ky))
    }

    /// Uniform draw from the visible disk.
    pub fn random_visible<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let d = Self::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
            if d.is_visible() {
                return d;
            }
        }
    }
}

impl Add for Direction {
    type Output = Direction;
    fn add(self, rhs: Direction) -> Direction {
        Direction::new(self.kx + rhs.kx, self.ky + rhs.ky)
    }
}

impl Sub for Direction {
    type Output = Direction;
    fn sub(self, rhs: Direction) -> Direction {
        Direction::new(self.kx - rhs.kx, self.ky - rhs.ky)
    }
}

impl Neg for Direction {
    type Output = Direction;
    fn neg(self) -> Direction {
        Direction::new(-self.kx, -self.ky)
    }
}

impl Mul<f64> for Direction {
    type Output = Direction;
    fn mul(self, s: f64) -> Direction {
        Direction::new(self.kx * s, self.ky * s)
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.kx, self.ky)
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;

    /// Parses `"kx,ky"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("expected a direction `kx,ky`, got {s:?}"));
        let (x, y) = s.split_once(',').ok_or_else(bad)?;
        let kx: f64 = x.trim().parse().map_err(|_| bad())?;
        let ky: f64 = y.trim().parse().map_err(|_| bad())?;
        let d = Direction::new(kx, ky);
        if !d.is_finite() {
            return Err(bad());
        }
        Ok(d)
    }
}

/// Representative of `x` modulo 2 in the half-open interval `(-1, 1]`.
///
/// Values already in range are returned unchanged, so the map is exactly
/// idempotent.
pub fn mod2_canonical(x: f64) -> f64 {
    if x > -1.0 && x <= 1.0 {
        return x;
    }
    let r = x.rem_euclid(2.0);
    if r > 1.0 {
        r - 2.0
    } else {
        r
    }
}

/// `exp(j * pi * x)`.
#[inline]
pub(crate) fn cis_pi(x: f64) -> Complex64 {
    let (s, c) = (PI * x).sin_cos();
    Complex64::new(c, s)
}

/// Per-axis phase table `exp(j * pi * i * k)` for `i` in `1..=m`.
pub(crate) fn axis_phases(m: usize, k: f64) -> Vec<Complex64> {
    (1..=m).map(|i| cis_pi(i as f64 * k)).collect()
}

/// Steering vector of an `M x M` grid towards `d`, reference phase zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    entries: Vec<Complex64>,
    m_side: usize,
}

impl SteeringVector {
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn m_side(&self) -> usize {
        self.m_side
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry at 1-based grid position `(m, n)`.
    pub fn at(&self, m: usize, n: usize) -> Complex64 {
        self.entries[(m - 1) * self.m_side + (n - 1)]
    }

    pub fn hadamard(&self, other: &SteeringVector) -> Vec<Complex64> {
        self.entries.iter().zip(&other.entries).map(|(a, b)| a * b).collect()
    }
}

/// Entry `(m, n)` is `exp(j * pi * (m * kx + n * ky))`.
pub fn steering_vector(m_side: usize, d: Direction) -> Result<SteeringVector> {
    if m_side == 0 {
        return Err(Error::InvalidSize);
    }
    let mut entries = Vec::with_capacity(m_side * m_side);
    for m in 1..=m_side {
        for n in 1..=m_side {
            entries.push(cis_pi(m as f64 * d.kx + n as f64 * d.ky));
        }
    }
    Ok(SteeringVector { entries, m_side })
}

/// Checks `s(a) o s(b) == s(a + b)` element-wise to within `1e-12`.
pub fn hadamard_identity_check(a: Direction, b: Direction, m_side: usize) -> bool {
    let (Ok(sa), Ok(sb), Ok(sab)) =
        (steering_vector(m_side, a), steering_vector(m_side, b), steering_vector(m_side, a + b))
    else {
        return false;
    };
    sa.hadamard(&sb).iter().zip(sab.entries()).all(|(x, y)| (x - y).norm() <= 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;

    #[test]
    fn zero_direction_gives_common_phase() {
        let s = steering_vector(2, Direction::ZERO).unwrap();
        assert_eq!(s.len(), 4);
        for e in s.entries() {
            assert!((e - s.entries()[0]).norm() < 1e-15);
        }
    }

    #[test]
    fn single_element() {
        let s = steering_vector(1, Direction::new(0.37, -0.2)).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.entries()[0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn entry_matches_hand_evaluation() {
        // pi * (2 * 0.3 + 3 * (-0.7)) = -1.5 pi, i.e. +j.
        let s = steering_vector(4, Direction::new(0.3, -0.7)).unwrap();
        let e = s.at(2, 3);
        assert!((e - Complex64::new(0.0, 1.0)).norm() < 1e-12, "{e}");
        assert_eq!(s.entries()[4 + 2], e);
    }

    #[test]
    fn zero_size_rejected() {
        assert_eq!(steering_vector(0, Direction::ZERO), Err(Error::InvalidSize));
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(mod2_canonical(2.0), 0.0);
        assert!((mod2_canonical(0.8 + 0.8 + 0.8) - 0.4).abs() < 1e-12);
        assert_eq!(mod2_canonical(-1.0), 1.0);
        assert_eq!(mod2_canonical(1.0), 1.0);
        assert_eq!(mod2_canonical(-3.0), 1.0);
        assert!((mod2_canonical(-1.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn hadamard_examples() {
        assert!(hadamard_identity_check(Direction::ZERO, Direction::new(0.5, 0.5), 3));
        assert!(hadamard_identity_check(Direction::new(0.3, 0.1), Direction::new(0.2, -0.4), 5));
        assert!(hadamard_identity_check(Direction::new(1.0, 0.0), Direction::new(1.0, 0.0), 4));
        let sum = Direction::new(1.0, 0.0) + Direction::new(1.0, 0.0);
        assert_eq!(sum.canonical(), Direction::ZERO);
    }

    #[test]
    fn hadamard_holds_for_random_pairs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for i in 0..1000 {
            let a = Direction::random_visible(&mut rng);
            let b = Direction::random_visible(&mut rng);
            assert!(hadamard_identity_check(a, b, 1 + i % 8));
        }
    }

    #[test]
    fn parse_direction() {
        let d: Direction = "0.3,-0.7".parse().unwrap();
        assert_eq!(d, Direction::new(0.3, -0.7));
        assert!("abc".parse::<Direction>().is_err());
        assert!("0.1".parse::<Direction>().is_err());
        assert!("nan,0".parse::<Direction>().is_err());
    }

    proptest! {
        #[test]
        fn visible_steering_entries_are_unit(m in 1usize..=8, r in 0.0f64..=1.0, t in 0.0f64..std::f64::consts::TAU) {
            let d = Direction::new(r * t.cos(), r * t.sin());
            let s = steering_vector(m, d).unwrap();
            prop_assert_eq!(s.len(), m * m);
            for e in s.entries() {
                prop_assert!((e.norm() - 1.0).abs() <= 1e-12);
            }
        }

        #[test]
        fn canonical_is_idempotent_and_in_range(x in -1e3f64..1e3) {
            let c = mod2_canonical(x);
            prop_assert!(c > -1.0 && c <= 1.0);
            prop_assert_eq!(mod2_canonical(c), c);
            let k = ((x - c) / 2.0).round();
            prop_assert!((x - c - 2.0 * k).abs() < 1e-9);
        }

        #[test]
        fn canonical_is_additive_mod_two(x in -50.0f64..50.0, y in -50.0f64..50.0) {
            let lhs = mod2_canonical(x + y);
            let rhs = mod2_canonical(mod2_canonical(x) + mod2_canonical(y));
            // Equal up to rounding, allowing the (-1, 1] seam to wrap.
            let gap = mod2_canonical(lhs - rhs).abs();
            prop_assert!(gap < 1e-9, "lhs {} rhs {}", lhs, rhs);
        }
    }
}
