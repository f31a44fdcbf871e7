//! Coefficient profiles and the entangled ancilla states built from them.
//!
//! Register layout for a single ancilla of size `n`: the `x` register occupies
//! positions `0..n` and the `y` register `n..2n`. Term `j` has single photons
//! in the first `j` modes of `x` and in the last `n - j` modes of `y`. The
//! two-register states append a primed copy (`x'`, `y'`) after `y`.

use std::fmt;
use std::path::Path;

use log::warn;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockState, OccupationVector};

const NORM_TOL: f64 = 1e-12;
const LOAD_WARN_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Uniform,
    Linear,
    Sine,
    Custom,
    Optimized,
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Uniform => "uniform",
            Self::Linear => "linear",
            Self::Sine => "sine",
            Self::Custom => "custom",
            Self::Optimized => "optimized",
        };
        f.write_str(s)
    }
}

/// Normalized ancilla coefficients `f(0..=n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientProfile {
    coeffs: Vec<f64>,
    kind: ProfileKind,
}

impl CoefficientProfile {
    /// Equal weights, as in the original post-selected scheme.
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidProfile("uniform profile needs n >= 1".into()));
        }
        let value = 1.0 / ((n + 1) as f64).sqrt();
        Ok(Self {
            coeffs: vec![value; n + 1],
            kind: ProfileKind::Uniform,
        })
    }

    /// Triangle: zero at both ends, rising linearly to the middle. Odd `n`
    /// gets a two-point plateau so that `f(j) = f(n - j)`.
    pub fn linear(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidProfile("linear profile needs n >= 2".into()));
        }
        let raw: Vec<f64> = (0..=n).map(|j| j.min(n - j) as f64).collect();
        Self::normalized(raw, ProfileKind::Linear)
    }

    /// `sin(π(j+1)/(n+2))`, the ground state of the Dirichlet second difference.
    pub fn sine(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidProfile("sine profile needs n >= 1".into()));
        }
        let raw: Vec<f64> = (0..=n)
            .map(|j| (std::f64::consts::PI * (j + 1) as f64 / (n + 2) as f64).sin())
            .collect();
        Self::normalized(raw, ProfileKind::Sine)
    }

    /// Arbitrary coefficients, rescaled to unit norm. Warns when the input was
    /// off by more than 1e-6.
    pub fn custom(coeffs: Vec<f64>) -> Result<Self> {
        Self::with_kind(coeffs, ProfileKind::Custom)
    }

    pub fn with_kind(coeffs: Vec<f64>, kind: ProfileKind) -> Result<Self> {
        let norm_sqr: f64 = coeffs.iter().map(|f| f * f).sum();
        if (norm_sqr - 1.0).abs() > LOAD_WARN_TOL {
            warn!("profile norm² is {norm_sqr}, renormalizing");
        }
        Self::normalized(coeffs, kind)
    }

    pub(crate) fn normalized(mut coeffs: Vec<f64>, kind: ProfileKind) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidProfile(format!(
                "need at least 2 coefficients, got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|f| !f.is_finite()) {
            return Err(Error::InvalidProfile("non-finite coefficient".into()));
        }
        let norm = coeffs.iter().map(|f| f * f).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidProfile("all coefficients are zero".into()));
        }
        for f in &mut coeffs {
            *f /= norm;
        }
        let profile = Self { coeffs, kind };
        debug_assert!((profile.norm_sqr() - 1.0).abs() < NORM_TOL);
        Ok(profile)
    }

    /// Ancilla photon count.
    pub fn n(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `f(j)`, zero outside `0..=n`.
    pub fn f(&self, j: i64) -> f64 {
        if j < 0 {
            return 0.0;
        }
        self.coeffs.get(j as usize).copied().unwrap_or(0.0)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|f| f * f).sum()
    }

    pub fn relabel(mut self, kind: ProfileKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let coeffs: Vec<f64> = serde_json::from_str(text)?;
        Self::custom(coeffs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.coeffs).expect("f64 slice serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Occupations of the `x` and `y` registers for ancilla term `j`.
pub fn register_term(n: usize, j: usize) -> (Vec<u8>, Vec<u8>) {
    let x = (0..n).map(|i| u8::from(i < j)).collect();
    let y = (0..n).map(|i| u8::from(i >= j)).collect();
    (x, y)
}

/// `sum_j f(j) |1^j 0^{n-j}>_x |0^j 1^{n-j}>_y` on `2n` modes.
pub fn single_ancilla_state(p: &CoefficientProfile) -> FockState {
    let n = p.n();
    let terms = (0..=n).map(|j| {
        let (mut x, y) = register_term(n, j);
        x.extend(y);
        (OccupationVector::new(x), Complex64::new(p.f(j as i64), 0.0))
    });
    FockState::normalized_from_terms(2 * n, terms).expect("profile is normalized and non-zero")
}

fn check_sizes(p: &CoefficientProfile, p2: &CoefficientProfile) -> Result<()> {
    if p.n() != p2.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            found: p2.n(),
        });
    }
    Ok(())
}

fn two_register_state<F>(p: &CoefficientProfile, p2: &CoefficientProfile, mut term: F) -> Result<FockState>
where
    F: FnMut(usize, usize, Vec<u8>, Vec<u8>, Vec<u8>, Vec<u8>) -> (Vec<u8>, f64),
{
    check_sizes(p, p2)?;
    let n = p.n();
    let mut terms = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for j2 in 0..=n {
            let (x, y) = register_term(n, j);
            let (x2, y2) = register_term(n, j2);
            let (occ, sign) = term(j, j2, x, y, x2, y2);
            let amp = sign * p.f(j as i64) * p2.f(j2 as i64);
            terms.push((OccupationVector::new(occ), Complex64::new(amp, 0.0)));
        }
    }
    FockState::normalized_from_terms(4 * n, terms)
}

/// Two ancillas entangled by the sign `(-1)^{j j'}`, on `4n` modes ordered
/// `x, y, x', y'`.
pub fn cz_ancilla_state(p: &CoefficientProfile, p2: &CoefficientProfile) -> Result<FockState> {
    two_register_state(p, p2, |j, j2, x, y, x2, y2| {
        let sign = if (j * j2) % 2 == 1 { -1.0 } else { 1.0 };
        ([x, y, x2, y2].concat(), sign)
    })
}

/// Two ancillas where every `y'` mode is the target of a CNOT controlled by
/// the `y` mode at the same position.
pub fn cnot_ancilla_state(p: &CoefficientProfile, p2: &CoefficientProfile) -> Result<FockState> {
    two_register_state(p, p2, |_, _, x, y, x2, y2| {
        let y2: Vec<u8> = y2.iter().zip(&y).map(|(t, c)| t ^ c).collect();
        ([x, y, x2, y2].concat(), 1.0)
    })
}
