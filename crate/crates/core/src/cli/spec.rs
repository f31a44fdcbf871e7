use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use log::warn;
use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::ancilla::{CoefficientProfile, ProfileKind};
use crate::error::{Error, Result};
use crate::fidelity::standard_profile;
use crate::protocol::QubitAmplitudes;

/// `uniform`, `linear`, `sine` or `file:PATH`.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSpec {
    Standard(ProfileKind),
    File(PathBuf),
}

impl ProfileSpec {
    /// Builds the profile; file profiles must agree with `n` when it is given.
    pub fn resolve(&self, n: Option<usize>) -> Result<CoefficientProfile> {
        match self {
            ProfileSpec::Standard(kind) => standard_profile(*kind, n.unwrap_or(2)),
            ProfileSpec::File(path) => {
                let p = CoefficientProfile::load(path)?;
                match n {
                    Some(n) if n != p.n() => Err(Error::DimensionMismatch {
                        expected: n,
                        found: p.n(),
                    }),
                    _ => Ok(p),
                }
            }
        }
    }
}

impl FromStr for ProfileSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(ProfileSpec::File(PathBuf::from(path)));
        }
        match s {
            "uniform" => Ok(ProfileSpec::Standard(ProfileKind::Uniform)),
            "linear" => Ok(ProfileSpec::Standard(ProfileKind::Linear)),
            "sine" => Ok(ProfileSpec::Standard(ProfileKind::Sine)),
            other => Err(format!(
                "unknown profile '{other}' (expected uniform, linear, sine or file:PATH)"
            )),
        }
    }
}

impl fmt::Display for ProfileSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileSpec::Standard(kind) => write!(f, "{kind}"),
            ProfileSpec::File(path) => write!(f, "file:{}", path.display()),
        }
    }
}

impl Serialize for ProfileSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Input qubit: two non-negative reals, or a JSON file with complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub enum InputSpec {
    Real(f64, f64),
    File(PathBuf),
}

impl InputSpec {
    pub fn resolve(&self) -> Result<QubitAmplitudes> {
        let (a0, a1) = match self {
            InputSpec::Real(a0, a1) => (Complex64::new(*a0, 0.0), Complex64::new(*a1, 0.0)),
            InputSpec::File(path) => {
                let pairs: [[f64; 2]; 2] = serde_json::from_str(&std::fs::read_to_string(path)?)?;
                (
                    Complex64::new(pairs[0][0], pairs[0][1]),
                    Complex64::new(pairs[1][0], pairs[1][1]),
                )
            }
        };
        let norm = a0.norm_sqr() + a1.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            warn!("input {self} has squared norm {norm}; normalizing");
        }
        QubitAmplitudes::normalized(a0, a1)
    }
}

pub(crate) fn resolve_input(spec: &Option<InputSpec>) -> Result<QubitAmplitudes> {
    spec.as_ref().map_or(Ok(QubitAmplitudes::plus()), InputSpec::resolve)
}

impl FromStr for InputSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(InputSpec::File(PathBuf::from(path)));
        }
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [a0, a1] = parts[..] else {
            return Err(format!("expected 'a0,a1', got '{s}'"));
        };
        let parse = |t: &str| -> std::result::Result<f64, String> {
            let v: f64 = t.parse().map_err(|_| format!("'{t}' is not a number"))?;
            if !v.is_finite() || v < 0.0 {
                return Err(format!("amplitude '{t}' must be finite and non-negative"));
            }
            Ok(v)
        };
        Ok(InputSpec::Real(parse(a0)?, parse(a1)?))
    }
}

impl fmt::Display for InputSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputSpec::Real(a0, a1) => write!(f, "{a0:?},{a1:?}"),
            InputSpec::File(path) => write!(f, "file:{}", path.display()),
        }
    }
}

impl Serialize for InputSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Inclusive range `A:B:step` (or `A:B` with step 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NRange {
    pub start: usize,
    pub end: usize,
    pub step: usize,
}

impl NRange {
    pub fn values(&self) -> impl Iterator<Item = usize> {
        (self.start..=self.end).step_by(self.step)
    }
}

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("'{t}' is not a count"));
        let (start, end, step) = match parts[..] {
            [a, b] => (num(a)?, num(b)?, 1),
            [a, b, c] => (num(a)?, num(b)?, num(c)?),
            _ => return Err(format!("expected A:B:step, got '{s}'")),
        };
        if start < 1 || step < 1 || start > end {
            return Err(format!("range '{s}' needs 1 <= A <= B and step >= 1"));
        }
        Ok(NRange { start, end, step })
    }
}

impl fmt::Display for NRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, self.step)
    }
}

impl Serialize for NRange {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The n values selected by `--n` or `--n-range`.
pub(crate) fn n_values(n: Option<usize>, range: Option<NRange>) -> Result<Vec<usize>> {
    match (n, range) {
        (Some(n), None) if n >= 1 => Ok(vec![n]),
        (Some(_), None) => Err(Error::Config("n must be >= 1".into())),
        (None, Some(r)) => Ok(r.values().collect()),
        (None, None) => Err(Error::Config("one of --n or --n-range is required".into())),
        (Some(_), Some(_)) => Err(Error::Config("--n and --n-range are exclusive".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_profiles() {
        assert_eq!("linear".parse::<ProfileSpec>().unwrap(), ProfileSpec::Standard(ProfileKind::Linear));
        assert_eq!(
            "file:a/b.json".parse::<ProfileSpec>().unwrap(),
            ProfileSpec::File(PathBuf::from("a/b.json"))
        );
        assert!("optimal".parse::<ProfileSpec>().is_err());
    }

    #[test]
    fn parses_inputs() {
        assert_eq!("0.6,0.8".parse::<InputSpec>().unwrap(), InputSpec::Real(0.6, 0.8));
        assert!("0.6".parse::<InputSpec>().is_err());
        assert!("-1,0".parse::<InputSpec>().is_err());
        let q = InputSpec::Real(3.0, 4.0).resolve().unwrap();
        assert!((q.p0() - 0.36).abs() < 1e-15);
    }

    #[test]
    fn parses_ranges() {
        let r: NRange = "20:200:10".parse().unwrap();
        assert_eq!(r.values().count(), 19);
        assert_eq!("3:5".parse::<NRange>().unwrap().values().collect::<Vec<_>>(), vec![3, 4, 5]);
        assert!("5:3:1".parse::<NRange>().is_err());
        assert!("0:3:1".parse::<NRange>().is_err());
        assert!("1:3:0".parse::<NRange>().is_err());
    }
}
