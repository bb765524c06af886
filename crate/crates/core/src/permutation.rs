//! Element permutations.
//!
//! A [`Permutation`] maps a receiving element to the element that re-radiates
//! its signal. It is stored flattened over the `M^2` grid in the row-major order
//! of [`crate::geometry`]. Targets are 0-based in memory; the public
//! constructors taking per-axis factors and the JSON form use 1-based targets.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Structure of a permutation, kept as metadata next to the flattened map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PermKind {
    Identity,
    /// `(m, n) -> (rows[m], cols[n])`, factors 0-based.
    Separable {
        rows: Vec<usize>,
        cols: Vec<usize>,
    },
    /// An involution: `sigma(sigma(e)) = e`.
    Symmetric,
    General,
}

impl PermKind {
    pub fn tag(&self) -> &'static str {
        match self {
            PermKind::Identity => "identity",
            PermKind::Separable { .. } => "separable",
            PermKind::Symmetric => "symmetric",
            PermKind::General => "general",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PermutationRecord", into = "PermutationRecord")]
pub struct Permutation {
    targets: Vec<usize>,
    kind: PermKind,
    m_side: usize,
}

fn check_bijection(targets: &[usize]) -> Result<()> {
    let mut seen = vec![false; targets.len()];
    for &t in targets {
        if t >= targets.len() || std::mem::replace(&mut seen[t], true) {
            return Err(Error::InvalidArgument(format!("not a bijection on 1..={}", targets.len())));
        }
    }
    Ok(())
}

fn from_one_based(sigma: &[usize]) -> Result<Vec<usize>> {
    let targets: Vec<usize> = sigma
        .iter()
        .map(|&t| t.checked_sub(1).ok_or_else(|| Error::InvalidArgument("targets are 1-based".into())))
        .collect::<Result<_>>()?;
    check_bijection(&targets)?;
    Ok(targets)
}

fn is_identity(targets: &[usize]) -> bool {
    targets.iter().enumerate().all(|(i, &t)| i == t)
}

fn is_involution(targets: &[usize]) -> bool {
    targets.iter().enumerate().all(|(i, &t)| targets[t] == i)
}

impl Permutation {
    pub fn identity(m_side: usize) -> Result<Self> {
        if m_side == 0 {
            return Err(Error::InvalidSize);
        }
        Ok(Self { targets: (0..m_side * m_side).collect(), kind: PermKind::Identity, m_side })
    }

    /// Uniform draw from all permutations of the `M^2` elements (Fisher-Yates).
    pub fn random<R: Rng + ?Sized>(m_side: usize, rng: &mut R) -> Result<Self> {
        let mut p = Self::identity(m_side)?;
        p.targets.shuffle(rng);
        p.kind = if is_identity(&p.targets) { PermKind::Identity } else { PermKind::General };
        Ok(p)
    }

    /// Random involution.
    ///
    /// Indices are visited in order. An unmatched index stays fixed with
    /// probability `1/u`, `u` being the number of unmatched indices including
    /// itself; otherwise it is paired with a uniformly chosen other unmatched
    /// index. Every involution has positive probability but the law is not
    /// uniform over involutions.
    pub fn random_symmetric<R: Rng + ?Sized>(m_side: usize, rng: &mut R) -> Result<Self> {
        let mut p = Self::identity(m_side)?;
        let n = p.targets.len();
        let mut unmatched: Vec<usize> = (0..n).collect();
        while let Some(&i) = unmatched.first() {
            let u = unmatched.len();
            if rng.gen_range(0..u) == 0 {
                unmatched.remove(0);
                continue;
            }
            let j_pos = rng.gen_range(1..u);
            let j = unmatched[j_pos];
            p.targets[i] = j;
            p.targets[j] = i;
            // Remove the larger position first so the smaller one stays valid.
            unmatched.remove(j_pos);
            unmatched.remove(0);
        }
        if !is_identity(&p.targets) {
            p.kind = PermKind::Symmetric;
        }
        Ok(p)
    }

    /// `(m, n) -> (sigma1(m), sigma2(n))`; both factors are 1-based bijections
    /// on `1..=M`.
    pub fn separable(sigma1: &[usize], sigma2: &[usize]) -> Result<Self> {
        if sigma1.len() != sigma2.len() {
            return Err(Error::InvalidArgument(format!(
                "factor sizes differ: {} vs {}",
                sigma1.len(),
                sigma2.len()
            )));
        }
        if sigma1.is_empty() {
            return Err(Error::InvalidSize);
        }
        let rows = from_one_based(sigma1)?;
        let cols = from_one_based(sigma2)?;
        Ok(Self::from_factors(rows, cols))
    }

    fn from_factors(rows: Vec<usize>, cols: Vec<usize>) -> Self {
        let m_side = rows.len();
        let mut targets = Vec::with_capacity(m_side * m_side);
        for &r in &rows {
            for &c in &cols {
                targets.push(r * m_side + c);
            }
        }
        let kind =
            if is_identity(&targets) { PermKind::Identity } else { PermKind::Separable { rows, cols } };
        Self { targets, kind, m_side }
    }

    /// Builds from explicit 1-based targets over the flattened grid and
    /// classifies the result. Separable structure is detected and kept.
    pub fn from_targets(targets_one_based: &[usize]) -> Result<Self> {
        let n = targets_one_based.len();
        let m_side = (n as f64).sqrt().round() as usize;
        if m_side == 0 || m_side * m_side != n {
            return Err(Error::InvalidArgument(format!("{n} targets do not form a square grid")));
        }
        let targets = from_one_based(targets_one_based)?;
        let mut p = Self { targets, kind: PermKind::General, m_side };
        p.kind = p.classify();
        Ok(p)
    }

    fn classify(&self) -> PermKind {
        if is_identity(&self.targets) {
            PermKind::Identity
        } else if let Some((rows, cols)) = self.detect_factors() {
            PermKind::Separable { rows, cols }
        } else if is_involution(&self.targets) {
            PermKind::Symmetric
        } else {
            PermKind::General
        }
    }

    fn detect_factors(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        let m = self.m_side;
        let rows: Vec<usize> = (0..m).map(|r| self.targets[r * m] / m).collect();
        let cols: Vec<usize> = (0..m).map(|c| self.targets[c] % m).collect();
        let p = Self::from_factors(rows.clone(), cols.clone());
        (p.targets == self.targets).then_some((rows, cols))
    }

    pub fn m_side(&self) -> usize {
        self.m_side
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn kind(&self) -> &PermKind {
        &self.kind
    }

    /// 0-based flattened targets.
    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn target(&self, element: usize) -> usize {
        self.targets[element]
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.targets.iter().map(|t| t + 1).collect()
    }

    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.targets.len()];
        for (i, &t) in self.targets.iter().enumerate() {
            inv[t] = i;
        }
        inv
    }

    pub fn is_identity(&self) -> bool {
        is_identity(&self.targets)
    }

    /// `P = P^T`.
    pub fn is_symmetric(&self) -> bool {
        is_involution(&self.targets)
    }

    /// Per-axis 0-based factors, when the map is separable (identity included).
    pub fn separable_factors(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        match &self.kind {
            PermKind::Identity => {
                let id: Vec<usize> = (0..self.m_side).collect();
                Some((id.clone(), id))
            }
            PermKind::Separable { rows, cols } => Some((rows.clone(), cols.clone())),
            _ => self.detect_factors(),
        }
    }

    pub fn fixed_point_count(&self) -> usize {
        self.targets.iter().enumerate().filter(|(i, t)| i == *t).count()
    }

    /// Number of 2-cycles; meaningful for involutions.
    pub fn transposition_count(&self) -> usize {
        self.targets.iter().enumerate().filter(|(i, t)| i < *t && self.targets[**t] == *i).count()
    }

    pub fn diagnostics(&self) -> PermDiagnostics {
        PermDiagnostics::of_zero_based(&self.targets)
    }
}

/// `M x M` identity.
pub fn identity_perm(m_side: usize) -> Result<Permutation> {
    Permutation::identity(m_side)
}

pub fn random_perm(m_side: usize, seed: u64) -> Result<Permutation> {
    Permutation::random(m_side, &mut rng::from_seed(seed))
}

pub fn random_symmetric_perm(m_side: usize, seed: u64) -> Result<Permutation> {
    Permutation::random_symmetric(m_side, &mut rng::from_seed(seed))
}

pub fn separable_perm(sigma1: &[usize], sigma2: &[usize]) -> Result<Permutation> {
    Permutation::separable(sigma1, sigma2)
}

pub fn diagnostics(p: &Permutation) -> PermDiagnostics {
    p.diagnostics()
}

/// Difference statistics of a bijection `sigma` on `1..=N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermDiagnostics {
    /// `d_m = sigma(m) - m`.
    pub diffs: Vec<i64>,
    /// `g_m = sigma(m + 1) - sigma(m)`.
    pub consecutive_gaps: Vec<i64>,
    pub fixed_point_count: usize,
}

impl PermDiagnostics {
    /// From 1-based targets. Differences are shift-invariant, so this agrees
    /// with the 0-based form.
    pub fn of_one_based(sigma: &[usize]) -> Self {
        let zero: Vec<usize> = sigma.iter().map(|&t| t.saturating_sub(1)).collect();
        Self::of_zero_based(&zero)
    }

    pub fn of_zero_based(sigma: &[usize]) -> Self {
        let diffs: Vec<i64> = sigma.iter().enumerate().map(|(i, &t)| t as i64 - i as i64).collect();
        let consecutive_gaps = sigma.windows(2).map(|w| w[1] as i64 - w[0] as i64).collect();
        let fixed_point_count = diffs.iter().filter(|&&d| d == 0).count();
        Self { diffs, consecutive_gaps, fixed_point_count }
    }

    /// `2 d_{i+1} - d_i - d_{i+2}` for 1-based `i`.
    pub fn second_difference(&self, i: usize) -> i64 {
        2 * self.diffs[i] - self.diffs[i - 1] - self.diffs[i + 1]
    }
}

/// JSON form: 1-based `targets` plus a `kind` tag. Separable permutations also
/// carry their `rows` and `cols` factors, and a file holding only the factors
/// is accepted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PermutationRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_side: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<Vec<usize>>,
}

impl From<Permutation> for PermutationRecord {
    fn from(p: Permutation) -> Self {
        let (rows, cols) = match &p.kind {
            PermKind::Separable { rows, cols } => {
                (Some(rows.iter().map(|r| r + 1).collect()), Some(cols.iter().map(|c| c + 1).collect()))
            }
            _ => (None, None),
        };
        Self {
            kind: Some(p.kind.tag().to_string()),
            m_side: Some(p.m_side),
            targets: Some(p.to_one_based()),
            rows,
            cols,
        }
    }
}

impl TryFrom<PermutationRecord> for Permutation {
    type Error = Error;

    fn try_from(rec: PermutationRecord) -> Result<Self> {
        let p = match (&rec.targets, &rec.rows, &rec.cols) {
            (Some(t), _, _) => Permutation::from_targets(t)?,
            (None, Some(r), Some(c)) => Permutation::separable(r, c)?,
            _ => {
                return Err(Error::InvalidArgument(
                    "permutation needs `targets` or both `rows` and `cols`".into(),
                ))
            }
        };
        if let (Some(r), Some(c)) = (&rec.rows, &rec.cols) {
            if Permutation::separable(r, c)?.targets != p.targets {
                return Err(Error::InvalidArgument("`rows`/`cols` disagree with `targets`".into()));
            }
        }
        if let Some(m) = rec.m_side {
            if m != p.m_side {
                return Err(Error::InvalidArgument(format!("m_side {m} does not match {} targets", p.len())));
            }
        }
        if let Some(kind) = rec.kind.as_deref() {
            let ok = match kind {
                "identity" => p.is_identity(),
                "separable" => p.separable_factors().is_some(),
                "symmetric" => p.is_symmetric(),
                "general" => true,
                other => return Err(Error::InvalidArgument(format!("unknown permutation kind {other:?}"))),
            };
            if !ok {
                return Err(Error::InvalidArgument(format!("targets are not {kind}")));
            }
        }
        Ok(p)
    }
}
