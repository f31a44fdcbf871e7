//! Closed-form success and error probabilities.
//!
//! For input `α0|0⟩ + α1|1⟩` and ancilla profile `f`, branch `k` occurs with
//! probability `P0 f(k)² + P1 f(k-1)²` and leaves the qubit in
//! `c_n (α0 f(k), α1 f(k-1))`. Everything here is evaluated from those two
//! expressions with `f(j) = 0` outside `0..=n`, so it scales to profiles with
//! hundreds of photons without touching Fock space.

use gauss_quad::legendre::GaussLegendre;
use serde::Serialize;

use crate::ancilla::{CoefficientProfile, ProfileKind};
use crate::error::{Error, Result};
use crate::protocol::QubitAmplitudes;

pub const DEFAULT_QUADRATURE_ORDER: usize = 64;

/// Distribution of input qubits used for averaging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnsembleKind {
    /// `P0 = |α0|²` uniform on `[0, 1]`; phases do not enter.
    UniformP0,
    Fixed(QubitAmplitudes),
    /// `|0⟩` and `|1⟩` with equal weight.
    BasisPair,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputEnsemble {
    pub kind: EnsembleKind,
    pub quadrature_order: usize,
}

impl InputEnsemble {
    pub fn uniform_p0() -> Self {
        Self {
            kind: EnsembleKind::UniformP0,
            quadrature_order: DEFAULT_QUADRATURE_ORDER,
        }
    }

    pub fn fixed(q: QubitAmplitudes) -> Self {
        Self {
            kind: EnsembleKind::Fixed(q),
            quadrature_order: DEFAULT_QUADRATURE_ORDER,
        }
    }

    pub fn basis_pair() -> Self {
        Self {
            kind: EnsembleKind::BasisPair,
            quadrature_order: DEFAULT_QUADRATURE_ORDER,
        }
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.quadrature_order = order;
        self
    }

    /// `(weight, P0)` pairs whose weights sum to one.
    pub fn nodes(&self) -> Result<Vec<(f64, f64)>> {
        match self.kind {
            EnsembleKind::UniformP0 => {
                let rule = GaussLegendre::new(self.quadrature_order).map_err(|_| {
                    Error::Config(format!(
                        "quadrature order must be >= 2, got {}",
                        self.quadrature_order
                    ))
                })?;
                Ok(rule
                    .as_node_weight_pairs()
                    .iter()
                    .map(|&(x, w)| (0.5 * w, 0.5 * (x + 1.0)))
                    .collect())
            }
            EnsembleKind::Fixed(q) => Ok(vec![(1.0, q.p0())]),
            EnsembleKind::BasisPair => Ok(vec![(0.5, 1.0), (0.5, 0.0)]),
        }
    }
}

/// Exact success probability of branch `k` given `P0`.
fn success_given_p0(p0: f64, f_k: f64, f_km1: f64) -> Option<f64> {
    let p1 = 1.0 - p0;
    let denom = p0 * f_k * f_k + p1 * f_km1 * f_km1;
    if denom <= 0.0 {
        return None;
    }
    let num = p0 * f_k + p1 * f_km1;
    Some((num * num / denom).clamp(0.0, 1.0))
}

/// Squared overlap of the branch-`k` output with the input.
pub fn success_probability_exact(q: &QubitAmplitudes, p: &CoefficientProfile, k: usize) -> Result<f64> {
    if k > p.n() + 1 {
        return Err(Error::Config(format!("k = {k} exceeds n + 1 = {}", p.n() + 1)));
    }
    let (f_k, f_km1) = (p.f(k as i64), p.f(k as i64 - 1));
    success_given_p0(q.p0(), f_k, f_km1).ok_or(Error::ZeroProbabilityBranch(k))
}

/// Small-slope estimate of the branch success probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrderSuccess {
    pub value: f64,
    /// `f(k) = 0` made the slope undefined and the exact value was used.
    pub used_exact_fallback: bool,
}

/// `1 - P0 P1 ε²` with `ε = (f(k) - f(k-1)) / f(k)`.
pub fn success_probability_second_order(
    q: &QubitAmplitudes,
    p: &CoefficientProfile,
    k: usize,
) -> Result<SecondOrderSuccess> {
    let f_k = p.f(k as i64);
    if f_k == 0.0 {
        return Ok(SecondOrderSuccess {
            value: success_probability_exact(q, p, k)?,
            used_exact_fallback: true,
        });
    }
    let eps = (f_k - p.f(k as i64 - 1)) / f_k;
    Ok(SecondOrderSuccess {
        value: 1.0 - q.p0() * q.p1() * eps * eps,
        used_exact_fallback: false,
    })
}

/// Probability of counting `k` photons, for `k = 0..=n+1`.
pub fn outcome_distribution(q: &QubitAmplitudes, p: &CoefficientProfile) -> Vec<f64> {
    distribution_given_p0(q.p0(), p)
}

fn distribution_given_p0(p0: f64, p: &CoefficientProfile) -> Vec<f64> {
    let p1 = 1.0 - p0;
    (0..=p.n() as i64 + 1)
        .map(|k| {
            let (a, b) = (p.f(k), p.f(k - 1));
            p0 * a * a + p1 * b * b
        })
        .collect()
}

/// Probability-weighted infidelity over all branches for a fixed `P0`.
fn error_given_p0(p0: f64, p: &CoefficientProfile) -> f64 {
    let probs = distribution_given_p0(p0, p);
    probs
        .iter()
        .enumerate()
        .filter(|(_, &pr)| pr > 0.0)
        .map(|(k, &pr)| {
            let ps = success_given_p0(p0, p.f(k as i64), p.f(k as i64 - 1)).unwrap_or(1.0);
            pr * (1.0 - ps)
        })
        .sum()
}

/// Ensemble average of `sum_k Pr(k) (1 - P_S(k))`.
pub fn average_error_exact(p: &CoefficientProfile, e: &InputEnsemble) -> Result<f64> {
    Ok(e.nodes()?
        .iter()
        .map(|&(w, p0)| w * error_given_p0(p0, p))
        .sum())
}

/// `(1/6) sum_{k=0}^{n+1} (f(k) - f(k-1))²`, boundary jumps included.
pub fn average_error_second_order(p: &CoefficientProfile) -> f64 {
    squared_differences(p, 0..=p.n() as i64 + 1) / 6.0
}

/// `(1/6) ∫_0^n f'(k)² dk` for the piecewise-linear interpolation of `f`,
/// i.e. the interior differences only.
pub fn continuum_error(p: &CoefficientProfile) -> f64 {
    squared_differences(p, 1..=p.n() as i64) / 6.0
}

fn squared_differences(p: &CoefficientProfile, ks: impl Iterator<Item = i64>) -> f64 {
    ks.map(|k| {
        let d = p.f(k) - p.f(k - 1);
        d * d
    })
    .sum()
}

/// Failure probability when only `1 <= k <= n` is accepted with equal
/// coefficients: `1/(n+1)` for every input.
pub fn klm_failure_probability(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::Config("n must be >= 1".into()));
    }
    Ok(1.0 / (n + 1) as f64)
}

/// Ensemble-averaged infidelity of the controlled sign flip against the ideal
/// gate, with the two inputs drawn independently from `e`.
pub fn cz_average_error_exact(p: &CoefficientProfile, p2: &CoefficientProfile, e: &InputEnsemble) -> Result<f64> {
    if p.n() != p2.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            found: p2.n(),
        });
    }
    let nodes = e.nodes()?;
    let kmax = p.n() as i64 + 1;
    let mut total = 0.0;
    for &(w, p0) in &nodes {
        let (a0, a1) = (p0.sqrt(), (1.0 - p0).sqrt());
        for &(w2, p02) in &nodes {
            let (b0, b1) = (p02.sqrt(), (1.0 - p02).sqrt());
            let ideal = [a0 * b0, a0 * b1, a1 * b0, -a1 * b1];
            let mut err = 0.0;
            for k in 0..=kmax {
                let (f, fm) = (p.f(k), p.f(k - 1));
                for k2 in 0..=kmax {
                    let (g, gm) = (p2.f(k2), p2.f(k2 - 1));
                    let out = [
                        ideal[0] * f * g,
                        ideal[1] * f * gm,
                        ideal[2] * fm * g,
                        ideal[3] * fm * gm,
                    ];
                    let prob: f64 = out.iter().map(|x| x * x).sum();
                    if prob <= 0.0 {
                        continue;
                    }
                    let overlap: f64 = out.iter().zip(&ideal).map(|(x, y)| x * y).sum();
                    err += prob - overlap * overlap;
                }
            }
            total += w * w2 * err;
        }
    }
    Ok(total)
}

/// Error rates of one profile side by side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub n: usize,
    pub profile: String,
    pub exact_error: f64,
    pub second_order_error: f64,
    pub continuum_error: f64,
    pub klm_failure: f64,
    /// `n² · exact_error`.
    pub scaled: f64,
}

pub fn error_report(p: &CoefficientProfile, e: &InputEnsemble) -> Result<ErrorReport> {
    let n = p.n();
    let exact = average_error_exact(p, e)?;
    Ok(ErrorReport {
        n,
        profile: p.kind().to_string(),
        exact_error: exact,
        second_order_error: average_error_second_order(p),
        continuum_error: continuum_error(p),
        klm_failure: klm_failure_probability(n)?,
        scaled: exact * (n * n) as f64,
    })
}

/// Builds a named standard profile.
pub fn standard_profile(kind: ProfileKind, n: usize) -> Result<CoefficientProfile> {
    match kind {
        ProfileKind::Uniform => CoefficientProfile::uniform(n),
        ProfileKind::Linear => CoefficientProfile::linear(n),
        ProfileKind::Sine => CoefficientProfile::sine(n),
        other => Err(Error::Config(format!("{other} is not a standard profile"))),
    }
}
