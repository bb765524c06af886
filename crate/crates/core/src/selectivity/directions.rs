use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Direction;

/// A visible outgoing direction `z` with `t + z + r = 0 (mod 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullGainSolution {
    pub z: Direction,
    /// Even shifts `(p1, p2)` with `z = -t - r + (p1, p2)`.
    pub wrap: (i64, i64),
}

/// Even integers `p` with `|base + p| <= 1`.
fn even_shifts(base: f64) -> Vec<i64> {
    let lo = ((-1.0 - base) / 2.0).ceil() as i64;
    let hi = ((1.0 - base) / 2.0).floor() as i64;
    (lo..=hi).map(|q| 2 * q).collect()
}

/// All visible `z` for which a standard surface configured with `c = s(r)`
/// re-radiates a signal from `t` with full gain `M^4`, for every `M`.
///
/// An empty result means no such direction exists. `t` must be visible; `r`
/// is arbitrary.
pub fn solve_full_gain_direction(t: Direction, r: Direction) -> Result<Vec<FullGainSolution>> {
    if !t.is_finite() || !r.is_finite() {
        return Err(Error::InvalidArgument("directions must be finite".into()));
    }
    if !t.is_visible() {
        return Err(Error::InvalidArgument(format!("impinging direction {t} is not visible")));
    }
    let base = -t - r;
    let mut out = Vec::new();
    for p1 in even_shifts(base.kx) {
        for p2 in even_shifts(base.ky) {
            let z = base + Direction::new(p1 as f64, p2 as f64);
            if z.is_visible() {
                out.push(FullGainSolution { z, wrap: (p1, p2) });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::steering_vector;
    use crate::ris::{gain, optimal_config, PhaseConfig, RisModel};
    use crate::rng;

    #[test]
    fn counterexample_has_no_solution() {
        let sols = solve_full_gain_direction(Direction::new(0.5, 0.5), Direction::new(0.3, 0.3)).unwrap();
        assert!(sols.is_empty());
    }

    #[test]
    fn configured_pair_is_found() {
        let (k, kt) = (Direction::new(0.2, -0.6), Direction::new(-0.9, 0.3));
        let sols = solve_full_gain_direction(k, -k - kt).unwrap();
        assert!(sols.iter().any(|s| (s.z - kt).norm() < 1e-12));
    }

    #[test]
    fn direct_solution_without_wrap() {
        let sols = solve_full_gain_direction(Direction::new(0.5, 0.0), Direction::new(0.3, 0.0)).unwrap();
        assert_eq!(sols.len(), 1);
        assert!((sols[0].z - Direction::new(-0.8, 0.0)).norm() < 1e-12);
        assert_eq!(sols[0].wrap, (0, 0));
    }

    #[test]
    fn wrapped_solution() {
        // -t - r = (1.5, 0) is invisible, (1.5 - 2, 0) is not.
        let sols = solve_full_gain_direction(Direction::new(-0.7, 0.0), Direction::new(-0.8, 0.0)).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].wrap, (-2, 0));
        assert!((sols[0].z.kx + 0.5).abs() < 1e-12);
    }

    #[test]
    fn invisible_impinging_direction_rejected() {
        assert!(solve_full_gain_direction(Direction::new(0.9, 0.9), Direction::ZERO).is_err());
    }

    #[test]
    fn every_solution_reaches_full_gain() {
        let mut r = rng::from_seed(4);
        let mut found = 0;
        for i in 0..500 {
            let m = 2 + i % 7;
            let model = RisModel::standard(m).unwrap();
            let t = Direction::random_visible(&mut r);
            let cfg = Direction::new(
                rand::Rng::gen_range(&mut r, -2.0..2.0),
                rand::Rng::gen_range(&mut r, -2.0..2.0),
            );
            let c = PhaseConfig::new(steering_vector(m, cfg).unwrap().entries().to_vec()).unwrap();
            for s in solve_full_gain_direction(t, cfg).unwrap() {
                let g = gain(&model, t, s.z, &c).unwrap();
                assert!((g / model.full_gain() - 1.0).abs() < 1e-9);
                found += 1;
            }
        }
        assert!(found > 100);
        // s(r) with r = -(k + k~) is the standard optimum.
        let model = RisModel::standard(3).unwrap();
        let (k, kt) = (Direction::new(0.1, 0.2), Direction::new(0.3, 0.4));
        let a = optimal_config(&model, kt, k).unwrap();
        let b = steering_vector(3, -(k + kt)).unwrap();
        assert!(a.phases().iter().zip(b.entries()).all(|(x, y)| (x - y).norm() < 1e-12));
    }

    #[test]
    fn grid_finds_no_full_gain_away_from_solutions() {
        let step = 0.01;
        let n = (1.0 / step) as i64;
        let mut r = rng::from_seed(12);
        for m in [3usize, 6] {
            let model = RisModel::standard(m).unwrap();
            let t = Direction::random_visible(&mut r);
            let cfg = Direction::new(
                rand::Rng::gen_range(&mut r, -2.0..2.0),
                rand::Rng::gen_range(&mut r, -2.0..2.0),
            );
            let c = PhaseConfig::new(steering_vector(m, cfg).unwrap().entries().to_vec()).unwrap();
            let sols = solve_full_gain_direction(t, cfg).unwrap();
            for i in -n..=n {
                for j in -n..=n {
                    let z = Direction::new(i as f64 * step, j as f64 * step);
                    if !z.is_visible() {
                        continue;
                    }
                    let g = gain(&model, t, z, &c).unwrap() / model.full_gain();
                    if g >= 1.0 - 1e-6 {
                        let near = sols
                            .iter()
                            .any(|s| (s.z.kx - z.kx).abs() <= step && (s.z.ky - z.ky).abs() <= step);
                        assert!(near, "full gain at {z} not near {sols:?}");
                    }
                }
            }
        }
    }
}
