use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    extract_qubits, output_slot, phase_correction, DetectionPhases, QubitAmplitudes, FACTOR_TOL,
};
use crate::ancilla::{single_ancilla_state, CoefficientProfile};
use crate::error::{Error, Result};
use crate::fock::{FockState, ModeUnitary, OccupationVector};

/// One measurement branch of the teleportation.
#[derive(Debug, Clone)]
pub struct TeleportOutcome {
    /// Photon counts `r_0..r_n` on the input mode and `x` register.
    pub pattern: OccupationVector,
    /// Total count, `0..=n+1`.
    pub k: usize,
    /// `k = 0` or `k = n+1`: the input was measured and the output is fixed.
    pub degenerate: bool,
    /// Compensating phase multiplied onto the logical-0 component.
    pub correction_phase: Complex64,
    /// Teleported qubit after correction, normalized.
    pub output: QubitAmplitudes,
    pub probability: f64,
    /// Remaining `y` modes.
    pub residual: FockState,
}

/// Runs the teleportation of `q` through the ancilla built from `p` and
/// returns every measurement branch in lexicographic pattern order.
pub fn teleport_enumerate(q: &QubitAmplitudes, p: &CoefficientProfile) -> Result<Vec<TeleportOutcome>> {
    let n = p.n();
    let input = q.to_state().tensor(&single_ancilla_state(p))?;
    let register: Vec<usize> = (0..=n).collect();
    let evolved = input.apply_mode_unitary(&ModeUnitary::dft(n + 1)?, &register)?;
    let mut detection = DetectionPhases::new(n + 1)?;

    let mut outcomes = Vec::new();
    for m in evolved.measure(&register)? {
        let k = m.pattern.total();
        let extracted = extract_qubits(&m.post_state, &[output_slot(n, k, 0)])?;
        if extracted.deviation > FACTOR_TOL {
            return Err(Error::ResidualNotFactorized(extracted.deviation));
        }
        let correction = phase_correction(&m.pattern);
        let reference = detection.phase(&m.pattern)?.conj();
        let a0 = extracted.amplitudes[0] * correction * reference;
        let a1 = extracted.amplitudes[1] * reference;
        outcomes.push(TeleportOutcome {
            k,
            degenerate: k == 0 || k == n + 1,
            correction_phase: correction,
            output: QubitAmplitudes::normalized(a0, a1)?,
            probability: m.probability,
            residual: extracted.residual,
            pattern: m.pattern,
        });
    }
    Ok(outcomes)
}

/// Draws branches with their enumerated probabilities.
#[derive(Debug, Clone)]
pub struct TeleportSampler {
    outcomes: Vec<TeleportOutcome>,
    cumulative: Vec<f64>,
}

impl TeleportSampler {
    pub fn new(q: &QubitAmplitudes, p: &CoefficientProfile) -> Result<Self> {
        Ok(Self::from_outcomes(teleport_enumerate(q, p)?))
    }

    pub fn from_outcomes(outcomes: Vec<TeleportOutcome>) -> Self {
        let mut acc = 0.0;
        let cumulative = outcomes
            .iter()
            .map(|o| {
                acc += o.probability;
                acc
            })
            .collect();
        Self { outcomes, cumulative }
    }

    pub fn outcomes(&self) -> &[TeleportOutcome] {
        &self.outcomes
    }

    /// Index of the sampled branch.
    pub fn sample_index<R: Rng>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().unwrap_or(&1.0);
        let u: f64 = rng.random::<f64>() * total;
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.outcomes.len().saturating_sub(1))
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> &TeleportOutcome {
        &self.outcomes[self.sample_index(rng)]
    }
}

/// A single seeded draw.
pub fn teleport_sample(q: &QubitAmplitudes, p: &CoefficientProfile, seed: u64) -> Result<TeleportOutcome> {
    let sampler = TeleportSampler::new(q, p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sampler.sample(&mut rng).clone())
}

/// Post-selected view of an enumeration: degenerate branches are discarded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlmSummary {
    pub success_probability: f64,
    pub failure_probability: f64,
    /// Probability-weighted fidelity over accepted branches.
    pub conditional_fidelity: f64,
}

pub fn klm_postselect(q: &QubitAmplitudes, outcomes: &[TeleportOutcome]) -> KlmSummary {
    let mut accepted = 0.0;
    let mut rejected = 0.0;
    let mut weighted = 0.0;
    for o in outcomes {
        if o.degenerate {
            rejected += o.probability;
        } else {
            accepted += o.probability;
            weighted += o.probability * q.fidelity(&o.output);
        }
    }
    KlmSummary {
        success_probability: accepted,
        failure_probability: rejected,
        conditional_fidelity: if accepted > 0.0 { weighted / accepted } else { 0.0 },
    }
}
