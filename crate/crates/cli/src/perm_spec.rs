//! `--perm` values: `identity`, `random[:SEED]`, `symmetric[:SEED]`,
//! `separable:FILE` and `explicit:FILE`.
//!
//! Files hold either a JSON permutation record (`{"targets": [...]}` or
//! `{"rows": [...], "cols": [...]}`) or plain 1-based integers: one line of
//! `M^2` targets for `explicit`, two lines of `M` factors for `separable`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use permris::permutation::{identity_perm, random_perm, random_symmetric_perm};
use permris::Permutation;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum PermSpec {
    Identity,
    Random(Option<u64>),
    Symmetric(Option<u64>),
    Separable(PathBuf),
    Explicit(PathBuf),
}

impl FromStr for PermSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (head, tail) = match s.split_once(':') {
            Some((h, t)) => (h, Some(t)),
            None => (s, None),
        };
        let seed = |t: Option<&str>| -> Result<Option<u64>, String> {
            t.map(|v| v.parse::<u64>().map_err(|_| format!("bad seed `{v}`"))).transpose()
        };
        let file = |t: Option<&str>| -> Result<PathBuf, String> {
            match t {
                Some(p) if !p.is_empty() => Ok(PathBuf::from(p)),
                _ => Err(format!("`{head}` needs a file, e.g. `{head}:perm.json`")),
            }
        };
        match head {
            "identity" if tail.is_none() => Ok(PermSpec::Identity),
            "random" => Ok(PermSpec::Random(seed(tail)?)),
            "symmetric" => Ok(PermSpec::Symmetric(seed(tail)?)),
            "separable" => Ok(PermSpec::Separable(file(tail)?)),
            "explicit" => Ok(PermSpec::Explicit(file(tail)?)),
            _ => Err(format!(
                "unknown permutation `{s}` (identity | random[:SEED] | symmetric[:SEED] | separable:FILE | explicit:FILE)"
            )),
        }
    }
}

impl fmt::Display for PermSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PermSpec::Identity => write!(f, "identity"),
            PermSpec::Random(None) => write!(f, "random"),
            PermSpec::Random(Some(s)) => write!(f, "random:{s}"),
            PermSpec::Symmetric(None) => write!(f, "symmetric"),
            PermSpec::Symmetric(Some(s)) => write!(f, "symmetric:{s}"),
            PermSpec::Separable(p) => write!(f, "separable:{}", p.display()),
            PermSpec::Explicit(p) => write!(f, "explicit:{}", p.display()),
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))
}

fn integers(line: &str) -> CliResult<Vec<usize>> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|_| CliError::Input(format!("bad integer `{t}`"))))
        .collect()
}

fn from_json(text: &str) -> CliResult<Permutation> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("permutation file: {e}")))
}

impl PermSpec {
    /// Builds the permutation; `seed` stands in for a missing inline seed.
    pub fn load(&self, m_side: usize, seed: u64) -> CliResult<Permutation> {
        let p = match self {
            PermSpec::Identity => identity_perm(m_side)?,
            PermSpec::Random(s) => random_perm(m_side, s.unwrap_or(seed))?,
            PermSpec::Symmetric(s) => random_symmetric_perm(m_side, s.unwrap_or(seed))?,
            PermSpec::Separable(path) => {
                let text = read(path)?;
                if text.trim_start().starts_with('{') {
                    from_json(&text)?
                } else {
                    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
                    let [rows, cols] = lines[..] else {
                        return Err(CliError::Input(format!(
                            "{}: expected two lines of factors",
                            path.display()
                        )));
                    };
                    Permutation::separable(&integers(rows)?, &integers(cols)?)?
                }
            }
            PermSpec::Explicit(path) => {
                let text = read(path)?;
                if text.trim_start().starts_with('{') {
                    from_json(&text)?
                } else {
                    Permutation::from_targets(&integers(&text)?)?
                }
            }
        };
        if p.m_side() != m_side {
            return Err(CliError::Input(format!(
                "permutation is for M = {}, but --m is {m_side}",
                p.m_side()
            )));
        }
        if matches!(self, PermSpec::Separable(_)) && p.separable_factors().is_none() {
            return Err(CliError::Input("permutation file is not separable".into()));
        }
        Ok(p)
    }

    /// Identifier written to output rows, with the effective seed filled in.
    pub fn id(&self, seed: u64) -> String {
        match self {
            PermSpec::Random(None) => PermSpec::Random(Some(seed)).to_string(),
            PermSpec::Symmetric(None) => PermSpec::Symmetric(Some(seed)).to_string(),
            other => other.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!("identity".parse(), Ok(PermSpec::Identity));
        assert_eq!("random".parse(), Ok(PermSpec::Random(None)));
        assert_eq!("random:7".parse(), Ok(PermSpec::Random(Some(7))));
        assert_eq!("symmetric:3".parse(), Ok(PermSpec::Symmetric(Some(3))));
        assert_eq!("explicit:a.json".parse(), Ok(PermSpec::Explicit("a.json".into())));
        assert!("separable".parse::<PermSpec>().is_err());
        assert!("random:x".parse::<PermSpec>().is_err());
        assert!("identity:1".parse::<PermSpec>().is_err());
        assert!("shuffle".parse::<PermSpec>().is_err());
    }

    #[test]
    fn id_records_effective_seed() {
        assert_eq!(PermSpec::Random(None).id(42), "random:42");
        assert_eq!(PermSpec::Random(Some(1)).id(42), "random:1");
        assert_eq!(PermSpec::Identity.id(42), "identity");
    }

    #[test]
    fn loads_text_files() {
        let dir = std::env::temp_dir().join(format!("permris-spec-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let sep = dir.join("sep.txt");
        std::fs::write(&sep, "4 3 1 2\n1,2,3,4\n").unwrap();
        let p = PermSpec::Separable(sep.clone()).load(4, 0).unwrap();
        assert_eq!(p.separable_factors().unwrap().0, vec![3, 2, 0, 1]);
        assert!(PermSpec::Separable(sep).load(5, 0).is_err());

        let exp = dir.join("exp.txt");
        std::fs::write(&exp, "2 1 3 4").unwrap();
        assert_eq!(PermSpec::Explicit(exp.clone()).load(2, 0).unwrap().to_one_based(), vec![2, 1, 3, 4]);
        std::fs::write(&exp, "1 1 3 4").unwrap();
        assert!(matches!(PermSpec::Explicit(exp).load(2, 0), Err(CliError::Input(_))));
        assert!(matches!(PermSpec::Explicit(dir.join("missing")).load(2, 0), Err(CliError::Io { .. })));
        std::fs::remove_dir_all(dir).unwrap();
    }
}
