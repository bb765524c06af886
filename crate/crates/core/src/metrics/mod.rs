//! How selective a configured surface is.
//!
//! Everything is measured in offsets `(Delta, Delta~)` around the configured
//! pair with the all-zero configuration, normalized by `M^4`:
//!
//! * `beta`: the smallest gain inside the 4-ball of radius `delta` (the floor
//!   of the main lobe);
//! * `tau`: the largest gain among visible offsets outside that ball (the
//!   strongest spurious lobe; `tau = 1` means not selective).
//!
//! Both come from a multistart projected gradient method with the analytic
//! gradient from [`gain_gradient`]. The grid oracle in
//! [`crate::selectivity`] is the independent referee.

mod montecarlo;
mod objective;
mod optimize;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Direction;
use crate::permutation::Permutation;
use crate::ris::RisModel;
use crate::rng;

pub use montecarlo::{split_check, sym_check, MonteCarloEstimate, SPLIT_LIMIT};
use objective::OffsetObjective;
use optimize::{multistart, Feasible, Point};

pub const DEFAULT_N_STARTS: usize = 1000;

/// Radius used for `beta` and `tau` at the surface sizes studied most:
/// 0.3, 0.15 and 0.08 for `M` = 5, 10 and 20.
pub fn default_delta(m_side: usize) -> Option<f64> {
    match m_side {
        5 => Some(0.3),
        10 => Some(0.15),
        20 => Some(0.08),
        _ => None,
    }
}

/// Radius of the 4-ball `|(Delta, Delta~)| <= delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct BallConstraint {
    delta: f64,
}

impl BallConstraint {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidArgument(format!("ball radius must be positive, got {delta}")));
        }
        Ok(Self { delta })
    }

    pub fn delta(self) -> f64 {
        self.delta
    }
}

impl TryFrom<f64> for BallConstraint {
    type Error = Error;
    fn try_from(delta: f64) -> Result<Self> {
        Self::new(delta)
    }
}

impl From<BallConstraint> for f64 {
    fn from(c: BallConstraint) -> f64 {
        c.delta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    /// Normalized by `M^4`.
    pub value: f64,
    pub delta: Direction,
    pub delta_tilde: Direction,
    pub n_starts: usize,
    pub seed: u64,
    pub converged_starts: usize,
}

impl MetricReport {
    pub fn arg_norm(&self) -> f64 {
        (self.delta.norm_sq() + self.delta_tilde.norm_sq()).sqrt()
    }
}

/// Normalized gains over `Delta = rho_x (1, 1)`, `Delta~ = rho_y (1, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternSlice {
    pub rho_x_grid: Vec<f64>,
    pub rho_y_grid: Vec<f64>,
    /// `values[i][j]` at `(rho_x_grid[i], rho_y_grid[j])`.
    pub values: Vec<Vec<f64>>,
    pub offset_convention: String,
}

pub const PATTERN_CONVENTION: &str = "delta = rho_x*(1,1), delta_tilde = rho_y*(1,1)";

/// Permutation family sampled by [`tau_cdf`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    #[default]
    General,
    Separable,
}

impl Ensemble {
    /// Draw `index` of the ensemble seeded with `seed`.
    pub fn draw(self, m_side: usize, seed: u64, index: usize) -> Result<Permutation> {
        let mut r = rng::stream(seed, index as u64);
        match self {
            Ensemble::General => Permutation::random(m_side, &mut r),
            Ensemble::Separable => {
                let mut rows: Vec<usize> = (1..=m_side).collect();
                let mut cols = rows.clone();
                rows.shuffle(&mut r);
                cols.shuffle(&mut r);
                Permutation::separable(&rows, &cols)
            }
        }
    }
}

fn to_point(delta: Direction, delta_tilde: Direction) -> Point {
    [delta.kx, delta.ky, delta_tilde.kx, delta_tilde.ky]
}

fn report(best: optimize::MultistartResult, n_starts: usize, seed: u64) -> MetricReport {
    let x = best.best.x;
    MetricReport {
        value: best.best.value,
        delta: Direction::new(x[0], x[1]),
        delta_tilde: Direction::new(x[2], x[3]),
        n_starts,
        seed,
        converged_starts: best.converged_starts,
    }
}

/// Exact gradient of `A(Delta, Delta~)` (unnormalized) with respect to
/// `(Delta_x, Delta_y, Delta~_x, Delta~_y)`.
pub fn gain_gradient(model: &RisModel, delta: Direction, delta_tilde: Direction) -> [f64; 4] {
    OffsetObjective::new(model).raw_value_grad(&to_point(delta, delta_tilde)).1
}

fn beta_with(
    model: &RisModel,
    c: BallConstraint,
    n_starts: usize,
    seed: u64,
    extra: &[Point],
) -> Result<MetricReport> {
    let f = OffsetObjective::new(model);
    let best = multistart(&f, Feasible::Ball(c.delta()), false, n_starts, seed, extra)?;
    Ok(report(best, n_starts, seed))
}

/// `beta`: smallest normalized gain in the closed ball. Starts are the
/// origin, points on the sphere and uniform points in the ball.
pub fn main_lobe_beta(
    model: &RisModel,
    c: BallConstraint,
    n_starts: usize,
    seed: u64,
) -> Result<MetricReport> {
    beta_with(model, c, n_starts, seed, &[])
}

/// `tau`: largest normalized gain over `|Delta| <= 1`, `|Delta~| <= 1` outside
/// the ball. Requires `delta < sqrt(2)`, otherwise the set is empty.
pub fn selectivity_tau(
    model: &RisModel,
    c: BallConstraint,
    n_starts: usize,
    seed: u64,
) -> Result<MetricReport> {
    let f = OffsetObjective::new(model);
    let best = multistart(&f, Feasible::VisibleOutsideBall(c.delta()), true, n_starts, seed, &[])?;
    Ok(report(best, n_starts, seed))
}

/// `beta` at each radius. Each radius also restarts from the previous
/// minimizer, which lies in the larger ball, so the curve never increases.
pub fn beta_curve(
    model: &RisModel,
    delta_grid: &[f64],
    n_starts: usize,
    seed: u64,
) -> Result<Vec<(f64, MetricReport)>> {
    if delta_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("radius grid must be strictly increasing".into()));
    }
    let mut out: Vec<(f64, MetricReport)> = Vec::with_capacity(delta_grid.len());
    for &d in delta_grid {
        let c = BallConstraint::new(d)?;
        let extra: Vec<Point> =
            out.last().map(|(_, r)| to_point(r.delta, r.delta_tilde)).into_iter().collect();
        out.push((d, beta_with(model, c, n_starts, seed, &extra)?));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfPoint {
    pub tau: f64,
    /// `i / n_perms` for the `i`-th smallest value.
    pub cdf: f64,
    /// Index of the draw within the ensemble.
    pub perm_index: usize,
}

/// Empirical CDF of `tau` over `n_perms` permutations drawn from `ensemble`.
/// Draw `i` uses stream `i` of `seed`; every `tau` uses `seed` for its starts.
pub fn tau_cdf(
    m_side: usize,
    c: BallConstraint,
    n_perms: usize,
    n_starts: usize,
    seed: u64,
    ensemble: Ensemble,
) -> Result<Vec<CdfPoint>> {
    if n_perms == 0 {
        return Err(Error::InvalidArgument("n_perms must be at least 1".into()));
    }
    let mut taus = (0..n_perms)
        .map(|i| {
            let model = RisModel::per_element(ensemble.draw(m_side, seed, i)?);
            Ok((selectivity_tau(&model, c, n_starts, seed)?.value, i))
        })
        .collect::<Result<Vec<_>>>()?;
    taus.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let n = n_perms as f64;
    Ok(taus
        .into_iter()
        .enumerate()
        .map(|(i, (tau, perm_index))| CdfPoint { tau, cdf: (i + 1) as f64 / n, perm_index })
        .collect())
}

/// Normalized gain on the diagonal slice `Delta = rho_x (1, 1)`,
/// `Delta~ = rho_y (1, 1)`.
pub fn pattern_slice(model: &RisModel, rho_x: &[f64], rho_y: &[f64]) -> Result<PatternSlice> {
    if rho_x.iter().chain(rho_y).any(|r| !(-1.0..=1.0).contains(r)) {
        return Err(Error::InvalidArgument("rho values must lie in [-1, 1]".into()));
    }
    let f = OffsetObjective::new(model);
    let values = rho_x.iter().map(|&x| rho_y.iter().map(|&y| f.value(&[x, x, y, y])).collect()).collect();
    Ok(PatternSlice {
        rho_x_grid: rho_x.to_vec(),
        rho_y_grid: rho_y.to_vec(),
        values,
        offset_convention: PATTERN_CONVENTION.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permutation::{random_perm, separable_perm};
    use crate::ris::offset_gain;
    use crate::selectivity::GridOracle;
    use proptest::prelude::*;
    use rand::Rng;

    fn fd_gradient(model: &RisModel, x: Point) -> [f64; 4] {
        let h = 1e-6;
        [0, 1, 2, 3].map(|i| {
            let (mut p, mut q) = (x, x);
            p[i] += h;
            q[i] -= h;
            let a = |y: Point| offset_gain(model, Direction::new(y[0], y[1]), Direction::new(y[2], y[3]));
            (a(p) - a(q)) / (2.0 * h)
        })
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut r = rng::from_seed(77);
        for m in [3usize, 5, 10] {
            let model = RisModel::per_element(Permutation::random(m, &mut r).unwrap());
            for _ in 0..100 {
                let x: Point = [0; 4].map(|_| r.gen_range(-1.0..1.0));
                let g = gain_gradient(&model, Direction::new(x[0], x[1]), Direction::new(x[2], x[3]));
                let fd = fd_gradient(&model, x);
                let err = (0..4).map(|i| (g[i] - fd[i]).powi(2)).sum::<f64>().sqrt();
                let size = (0..4).map(|i| fd[i].powi(2)).sum::<f64>().sqrt();
                assert!(err <= 1e-5 * size, "M={m} {g:?} vs {fd:?}");
            }
        }
    }

    #[test]
    fn gradient_vanishes_at_origin_and_couples_for_identity() {
        let model = RisModel::per_element(random_perm(6, 1).unwrap());
        assert!(gain_gradient(&model, Direction::ZERO, Direction::ZERO).iter().all(|g| g.abs() < 1e-9));
        let id = RisModel::standard(6).unwrap();
        let g = gain_gradient(&id, Direction::new(0.13, -0.4), Direction::new(0.31, 0.22));
        assert!((g[0] - g[2]).abs() < 1e-8 && (g[1] - g[3]).abs() < 1e-8);
    }

    #[test]
    fn beta_of_tiny_ball_is_one() {
        let model = RisModel::per_element(random_perm(10, 3).unwrap());
        let r = main_lobe_beta(&model, BallConstraint::new(1e-9).unwrap(), 20, 1).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_tau_is_one() {
        for m in [5usize, 10] {
            let model = RisModel::standard(m).unwrap();
            let c = BallConstraint::new(default_delta(m).unwrap()).unwrap();
            let r = selectivity_tau(&model, c, 200, 7).unwrap();
            assert!((r.value - 1.0).abs() < 1e-6, "M={m}: {r:?}");
            assert!(r.arg_norm() >= c.delta() * (1.0 - 1e-9));
        }
    }

    #[test]
    fn certified_selective_surface_has_tau_below_one() {
        let sigma = [4, 3, 1, 2, 5];
        let model = RisModel::per_element(separable_perm(&sigma, &sigma).unwrap());
        let r = selectivity_tau(&model, BallConstraint::new(0.3).unwrap(), 300, 2).unwrap();
        assert!(r.value < 1.0 - 1e-3, "{r:?}");
    }

    #[test]
    fn beta_and_tau_match_grid_oracle() {
        let c = BallConstraint::new(0.3).unwrap();
        for seed in [11u64, 12] {
            let model = RisModel::per_element(random_perm(5, seed).unwrap());
            let tau = selectivity_tau(&model, c, 400, seed).unwrap();
            let beta = main_lobe_beta(&model, c, 400, seed).unwrap();
            let oracle = GridOracle { step: 0.05, ..GridOracle::default() };
            let tau_ref = oracle.max_outside_ball(&model, c.delta()).unwrap().normalized;
            let beta_ref = GridOracle { step: 0.02, ..GridOracle::default() }
                .min_inside_ball(&model, c.delta())
                .unwrap()
                .normalized;
            assert!((tau.value - tau_ref).abs() <= 2e-3, "tau {} vs {}", tau.value, tau_ref);
            assert!((beta.value - beta_ref).abs() <= 2e-3, "beta {} vs {}", beta.value, beta_ref);
        }
    }

    #[test]
    fn beta_curve_is_nonincreasing() {
        let model = RisModel::per_element(random_perm(5, 4).unwrap());
        let grid = [1e-9, 0.05, 0.1, 0.2, 0.3, 0.45];
        let curve = beta_curve(&model, &grid, 60, 3).unwrap();
        assert!((curve[0].1.value - 1.0).abs() < 1e-12);
        assert!(curve.windows(2).all(|w| w[1].1.value <= w[0].1.value));
        assert!(beta_curve(&model, &[0.2, 0.1], 10, 0).is_err());
    }

    #[test]
    fn tau_is_nonincreasing_in_radius() {
        let model = RisModel::per_element(random_perm(5, 8).unwrap());
        let taus: Vec<f64> = [0.2, 0.3, 0.5]
            .iter()
            .map(|&d| selectivity_tau(&model, BallConstraint::new(d).unwrap(), 200, 1).unwrap().value)
            .collect();
        assert!(taus.windows(2).all(|w| w[1] <= w[0] + 1e-3), "{taus:?}");
    }

    #[test]
    fn reports_are_deterministic_across_thread_counts() {
        let model = RisModel::per_element(random_perm(6, 2).unwrap());
        let c = BallConstraint::new(0.25).unwrap();
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
                (selectivity_tau(&model, c, 64, 9).unwrap(), main_lobe_beta(&model, c, 64, 9).unwrap())
            })
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn tau_cdf_is_sorted_and_ends_at_one() {
        let c = BallConstraint::new(0.3).unwrap();
        let single = tau_cdf(5, c, 1, 20, 0, Ensemble::General).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].cdf, 1.0);
        let pts = tau_cdf(5, c, 6, 40, 1, Ensemble::Separable).unwrap();
        assert!(pts.windows(2).all(|w| w[0].tau <= w[1].tau && w[0].cdf < w[1].cdf));
        assert_eq!(pts.last().unwrap().cdf, 1.0);
        assert!(pts.iter().all(|p| (0.0..=1.0 + 1e-9).contains(&p.tau)));
    }

    #[test]
    fn pattern_slice_properties() {
        let grid: Vec<f64> = (-10..=10).map(|i| i as f64 / 10.0).collect();
        let id = pattern_slice(&RisModel::standard(6).unwrap(), &grid, &grid).unwrap();
        assert_eq!(id.values[10][10], 1.0);
        // Identity: depends on rho_x + rho_y only, full gain on the anti-diagonal.
        for i in 0..grid.len() {
            for j in 0..grid.len() {
                let k = i + j;
                if (10..=30).contains(&k) {
                    let (i2, j2) = (k - 10, 10);
                    assert!((id.values[i][j] - id.values[i2][j2]).abs() < 1e-9);
                }
            }
            assert!((id.values[i][grid.len() - 1 - i] - 1.0).abs() < 1e-9);
        }

        let model = RisModel::per_element(random_perm(10, 5).unwrap());
        let slice = pattern_slice(&model, &grid, &grid).unwrap();
        assert!(slice.values.iter().flatten().all(|v| (0.0..=1.0 + 1e-9).contains(v)));
        assert!(pattern_slice(&model, &[1.5], &grid).is_err());
    }

    #[test]
    fn ball_constraint_validation_and_json() {
        assert!(BallConstraint::new(0.0).is_err());
        assert!(BallConstraint::new(f64::NAN).is_err());
        let c: BallConstraint = serde_json::from_str("0.15").unwrap();
        assert_eq!(c.delta(), 0.15);
        assert!(serde_json::from_str::<BallConstraint>("-1").is_err());
        let model = RisModel::standard(3).unwrap();
        assert!(selectivity_tau(&model, BallConstraint::new(1.5).unwrap(), 4, 0).is_err());
        assert!(main_lobe_beta(&model, c, 0, 0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn reported_values_are_normalized_and_feasible(seed in any::<u64>(), d in 0.05f64..0.8) {
            let model = RisModel::per_element(random_perm(4, seed).unwrap());
            let c = BallConstraint::new(d).unwrap();
            let b = main_lobe_beta(&model, c, 8, seed).unwrap();
            let t = selectivity_tau(&model, c, 8, seed).unwrap();
            prop_assert!((0.0..=1.0 + 1e-9).contains(&b.value));
            prop_assert!((0.0..=1.0 + 1e-9).contains(&t.value));
            prop_assert!(b.arg_norm() <= d * (1.0 + 1e-9));
            prop_assert!(t.arg_norm() >= d * (1.0 - 1e-9));
            prop_assert!(t.delta.norm() <= 1.0 + 1e-9 && t.delta_tilde.norm() <= 1.0 + 1e-9);
        }
    }
}
