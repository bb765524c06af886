use proptest::prelude::*;
use rand::seq::SliceRandom;

use permris::metrics::{main_lobe_beta, pattern_slice, selectivity_tau, BallConstraint};
use permris::permutation::random_perm;
use permris::ris::{gain, offset_gain, optimal_config};
use permris::rng;
use permris::selectivity::{certify_by_grid, certify_separable, verify_certificate_with, GridOracle};
use permris::{Direction, Permutation, RisModel};

fn shuffled(m: usize, seed: u64) -> Vec<usize> {
    let mut v: Vec<usize> = (1..=m).collect();
    v.shuffle(&mut rng::from_seed(seed));
    v
}

fn direction() -> impl Strategy<Value = Direction> {
    (0.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, a)| Direction::new(r * a.cos(), r * a.sin()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// The exact certifier and the grid referee agree on random separable
    /// surfaces. The grid sees only offsets outside its exclusion ball, so the
    /// ball is shrunk below the witness when there is one.
    #[test]
    fn certifier_agrees_with_grid(m in 4usize..=6, s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, b) = (shuffled(m, s1), shuffled(m, s2));
        let cert = certify_separable(&a, &b).unwrap();
        let exclusion = cert.witness.map_or(0.3, |w| (0.9 * w.norm()).min(0.3));
        let model = RisModel::per_element(Permutation::separable(&a, &b).unwrap());
        let oracle = GridOracle { step: 0.05, ..GridOracle::default() };
        let grid = certify_by_grid(&model, exclusion, &oracle).unwrap();
        prop_assert_eq!(grid.selective, cert.selective, "{:?} x {:?}", a, b);
        prop_assert!(verify_certificate_with(&cert, &model, exclusion, &oracle).unwrap());
    }

    #[test]
    fn configured_gain_is_shift_invariant(
        seed in any::<u64>(), k in direction(), kt in direction(), d in direction(), dt in direction()
    ) {
        let model = RisModel::per_element(random_perm(5, seed).unwrap());
        let c = optimal_config(&model, kt, k).unwrap();
        let shifted = gain(&model, k + d, kt + dt, &c).unwrap();
        prop_assert!((shifted - offset_gain(&model, d, dt)).abs() <= 1e-12 * model.full_gain());
    }
}

/// A slice of the pattern is a restriction of the 4-D search space: points
/// outside the ball never beat tau and points inside never undercut beta.
#[test]
fn pattern_slice_is_bounded_by_tau_and_beta() {
    let model = RisModel::per_element(random_perm(10, 21).unwrap());
    let c = BallConstraint::new(0.15).unwrap();
    let tau = selectivity_tau(&model, c, 1000, 1).unwrap().value;
    let beta = main_lobe_beta(&model, c, 200, 1).unwrap().value;
    let grid: Vec<f64> = (-50..=50).map(|i| i as f64 / 50.0).collect();
    let slice = pattern_slice(&model, &grid, &grid).unwrap();
    let mut off_ridge: f64 = 0.0;
    for (i, x) in grid.iter().enumerate() {
        for (j, y) in grid.iter().enumerate() {
            // |(x, x, y, y)| = sqrt(2 (x^2 + y^2))
            let r = (2.0 * (x * x + y * y)).sqrt();
            let v = slice.values[i][j];
            if r > c.delta() {
                off_ridge = off_ridge.max(v);
            } else {
                assert!(v >= beta - 1e-9, "slice {v} below beta {beta}");
            }
        }
    }
    assert!(off_ridge <= tau + 1e-9, "slice peak {off_ridge} above tau {tau}");
    assert!(tau < 1.0);
}
