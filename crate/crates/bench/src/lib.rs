//! Fixtures shared by the benchmarks in `benches/`.

use permris::permutation::random_perm;
use permris::RisModel;

/// `(4, 3, 1, 2, 5, ..., m)`, selective as a row and column factor for `m >= 4`.
pub fn selective_factor(m: usize) -> Vec<usize> {
    let mut s: Vec<usize> = (1..=m).collect();
    s[..4].copy_from_slice(&[4, 3, 1, 2]);
    s
}

pub fn random_surface(m: usize, seed: u64) -> RisModel {
    RisModel::per_element(random_perm(m, seed).expect("m >= 1"))
}
