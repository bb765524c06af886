//! Multistart projected gradient method with Armijo backtracking.

use rand::Rng;
use rayon::prelude::*;

use super::objective::OffsetObjective;
use crate::error::{Error, Result};
use crate::rng;

pub(crate) const MAX_ITERATIONS: usize = 500;
pub(crate) const GRADIENT_TOL: f64 = 1e-10;
const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-18;

pub(crate) type Point = [f64; 4];

pub(crate) fn norm(x: &Point) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Feasible set of one metric, with its projection and start sampler.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Feasible {
    /// Closed 4-ball of radius `r`.
    Ball(f64),
    /// `|Delta| <= 1`, `|Delta~| <= 1` and `|(Delta, Delta~)| >= r`.
    VisibleOutsideBall(f64),
}

fn clamp_disks(mut x: Point) -> Point {
    for pair in [0, 2] {
        let n = x[pair].hypot(x[pair + 1]);
        if n > 1.0 {
            x[pair] /= n;
            x[pair + 1] /= n;
        }
    }
    x
}

fn push_out(x: Point, r: f64) -> Point {
    let n = norm(&x);
    if n >= r {
        x
    } else if n == 0.0 {
        [r, 0.0, 0.0, 0.0]
    } else {
        x.map(|v| v * r / n)
    }
}

/// Uniform point of the unit 4-ball.
fn unit_ball<R: Rng>(rng: &mut R) -> Point {
    loop {
        let x: Point = [0; 4].map(|_| rng.gen_range(-1.0..=1.0));
        let n = norm(&x);
        if n <= 1.0 && n > 1e-6 {
            return x;
        }
    }
}

fn unit_sphere<R: Rng>(rng: &mut R) -> Point {
    let x = unit_ball(rng);
    let n = norm(&x);
    x.map(|v| v / n)
}

fn unit_disk<R: Rng>(rng: &mut R) -> (f64, f64) {
    loop {
        let (a, b) = (rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        if a * a + b * b <= 1.0 {
            return (a, b);
        }
    }
}

impl Feasible {
    pub fn check(self) -> Result<()> {
        match self {
            Feasible::Ball(r) if r.is_finite() && r > 0.0 => Ok(()),
            Feasible::VisibleOutsideBall(r) if r.is_finite() && r > 0.0 && r < std::f64::consts::SQRT_2 => {
                Ok(())
            }
            _ => Err(Error::InvalidArgument("ball radius out of range".into())),
        }
    }

    pub fn contains(self, x: &Point) -> bool {
        let slack = 1e-12;
        match self {
            Feasible::Ball(r) => norm(x) <= r * (1.0 + slack),
            Feasible::VisibleOutsideBall(r) => {
                x[0].hypot(x[1]) <= 1.0 + slack
                    && x[2].hypot(x[3]) <= 1.0 + slack
                    && norm(x) >= r * (1.0 - slack)
            }
        }
    }

    /// Nearest-point map for the ball. For the complement, disks are clamped
    /// and the result pushed radially out of the ball; when `r <= 1` one pass
    /// is feasible, otherwise the two steps alternate a few times.
    pub fn project(self, x: Point) -> Point {
        match self {
            Feasible::Ball(r) => {
                let n = norm(&x);
                if n > r {
                    x.map(|v| v * r / n)
                } else {
                    x
                }
            }
            Feasible::VisibleOutsideBall(r) => {
                let mut y = push_out(clamp_disks(x), r);
                for _ in 0..64 {
                    if self.contains(&y) {
                        break;
                    }
                    y = push_out(clamp_disks(y), r);
                }
                y
            }
        }
    }

    /// Start `index`: the ball uses the origin first, then alternates between
    /// its boundary and its interior; the complement alternates between its
    /// inner boundary and uniform feasible points.
    fn start<R: Rng>(self, index: usize, rng: &mut R) -> Point {
        match self {
            Feasible::Ball(r) => {
                if index == 0 {
                    [0.0; 4]
                } else if index % 2 == 1 {
                    unit_sphere(rng).map(|v| v * r)
                } else {
                    unit_ball(rng).map(|v| v * r)
                }
            }
            Feasible::VisibleOutsideBall(r) => {
                if index % 2 == 1 {
                    for _ in 0..1000 {
                        let x = unit_sphere(rng).map(|v| v * r);
                        if self.contains(&x) {
                            return x;
                        }
                    }
                }
                loop {
                    let (a, b) = unit_disk(rng);
                    let (c, d) = unit_disk(rng);
                    let x = [a, b, c, d];
                    if norm(&x) >= r {
                        return x;
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct LocalResult {
    pub x: Point,
    /// Normalized objective at `x`.
    pub value: f64,
    pub converged: bool,
}

/// Projected gradient ascent (`maximize`) or descent from `x0`.
///
/// Stops once the gradient mapping `|P(x + t g) - x| / t` drops below
/// [`GRADIENT_TOL`], after [`MAX_ITERATIONS`] iterations, or when the line
/// search cannot make progress.
pub(crate) fn local_search(f: &OffsetObjective, set: Feasible, x0: Point, maximize: bool) -> LocalResult {
    let sign = if maximize { 1.0 } else { -1.0 };
    let eval = |x: &Point| {
        let (v, g) = f.value_grad(x);
        (sign * v, g.map(|gi| sign * gi))
    };

    let mut x = set.project(x0);
    let (mut h, mut g) = eval(&x);
    let mut t = 1.0 / (f.m_side() as f64).powi(2);
    let mut converged = false;

    'outer: for _ in 0..MAX_ITERATIONS {
        loop {
            let y = set.project([0, 1, 2, 3].map(|i| x[i] + t * g[i]));
            let d = [0, 1, 2, 3].map(|i| y[i] - x[i]);
            let step_norm = norm(&d);
            if step_norm / t < GRADIENT_TOL {
                converged = true;
                break 'outer;
            }
            let (hy, gy) = eval(&y);
            let slope: f64 = (0..4).map(|i| g[i] * d[i]).sum();
            if hy >= h + ARMIJO * slope {
                x = y;
                h = hy;
                g = gy;
                t = (2.0 * t).min(10.0);
                break;
            }
            t *= 0.5;
            if t < MIN_STEP {
                break 'outer;
            }
        }
    }
    LocalResult { x, value: sign * h, converged }
}

#[derive(Debug, Clone)]
pub(crate) struct MultistartResult {
    pub best: LocalResult,
    pub converged_starts: usize,
}

/// Runs `n_starts` seeded local searches plus `extra` caller-provided starts
/// and returns the best. Start `i` draws from stream `i` of `seed`, and the
/// reduction scans in index order, so the outcome does not depend on the
/// thread count.
pub(crate) fn multistart(
    f: &OffsetObjective,
    set: Feasible,
    maximize: bool,
    n_starts: usize,
    seed: u64,
    extra: &[Point],
) -> Result<MultistartResult> {
    set.check()?;
    if n_starts == 0 {
        return Err(Error::InvalidArgument("n_starts must be at least 1".into()));
    }
    let mut results: Vec<LocalResult> = (0..n_starts)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, i as u64);
            local_search(f, set, set.start(i, &mut r), maximize)
        })
        .collect();
    results.extend(extra.iter().map(|&x| local_search(f, set, x, maximize)));

    let converged_starts = results.iter().filter(|r| r.converged).count();
    let mut best = results[0];
    for r in &results[1..] {
        let better = if maximize { r.value > best.value } else { r.value < best.value };
        if better {
            best = *r;
        }
    }
    Ok(MultistartResult { best, converged_starts })
}
