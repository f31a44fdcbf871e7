use num_complex::Complex64;

use super::{
    extract_qubits, output_slot, phase_correction, DetectionPhases, QubitAmplitudes, FACTOR_TOL,
};
use crate::ancilla::{cnot_ancilla_state, cz_ancilla_state, CoefficientProfile};
use crate::error::{Error, Result};
use crate::fock::{FockState, ModeUnitary, OccupationVector};

/// Sign flips applied after a controlled-sign-flip measurement.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SignCorrections {
    /// Flip the sign of the components with the control qubit in |1⟩.
    pub flip_q: bool,
    /// Flip the sign of the components with the target qubit in |1⟩.
    pub flip_q2: bool,
}

impl SignCorrections {
    pub fn is_empty(&self) -> bool {
        !self.flip_q && !self.flip_q2
    }

    pub fn apply(&self, amps: &mut [Complex64; 4]) {
        if self.flip_q {
            amps[2] = -amps[2];
            amps[3] = -amps[3];
        }
        if self.flip_q2 {
            amps[1] = -amps[1];
            amps[3] = -amps[3];
        }
    }

    pub fn label(&self) -> &'static str {
        match (self.flip_q, self.flip_q2) {
            (false, false) => "none",
            (true, false) => "q",
            (false, true) => "q2",
            (true, true) => "q+q2",
        }
    }
}

/// Parity rule: the control's |1⟩ components are flipped when `k2` is odd,
/// the target's when `k` is odd.
pub fn cz_sign_corrections(k: usize, k2: usize) -> SignCorrections {
    SignCorrections {
        flip_q: k2 % 2 == 1,
        flip_q2: k % 2 == 1,
    }
}

/// One joint measurement branch of a two-qubit gate.
#[derive(Debug, Clone)]
pub struct GateOutcome {
    pub pattern: OccupationVector,
    pub pattern2: OccupationVector,
    pub k: usize,
    pub k2: usize,
    pub corrections: SignCorrections,
    /// Two-qubit output before the parity corrections, ordered
    /// `|00⟩, |01⟩, |10⟩, |11⟩` (control first).
    pub uncorrected: [Complex64; 4],
    /// Output after all corrections, normalized.
    pub output: [Complex64; 4],
    pub probability: f64,
    /// Remaining `y` and `y'` modes.
    pub residuals: (FockState, FockState),
    /// Cross term left after factoring out the residual registers.
    pub deviation: f64,
}

impl GateOutcome {
    pub fn degenerate(&self, n: usize) -> bool {
        self.k == 0 || self.k == n + 1 || self.k2 == 0 || self.k2 == n + 1
    }
}

/// Branch of the direct-CNOT construction with the purity of the reduced
/// state of its output modes.
#[derive(Debug, Clone)]
pub struct CnotBranch {
    pub outcome: GateOutcome,
    pub purity: f64,
}

struct TwoRegisterRun {
    n: usize,
    /// Post-measurement branches: (pattern, probability, post-state on y, y').
    branches: Vec<(OccupationVector, f64, FockState)>,
}

fn run_two_registers(q: &QubitAmplitudes, q2: &QubitAmplitudes, ancilla: FockState, n: usize) -> Result<TwoRegisterRun> {
    // tensor order is [q, q', x, y, x', y']; reorder to [q, x, y, q', x', y'].
    let joint = q.to_state().tensor(&q2.to_state())?.tensor(&ancilla)?;
    let mut order = Vec::with_capacity(4 * n + 2);
    order.push(0);
    order.extend(2..2 + 2 * n);
    order.push(1);
    order.extend(2 + 2 * n..2 + 4 * n);
    let state = joint.permute_modes(&order)?;

    let dft = ModeUnitary::dft(n + 1)?;
    let c: Vec<usize> = (0..=n).collect();
    let c2: Vec<usize> = (2 * n + 1..=3 * n + 1).collect();
    let state = state.apply_mode_unitary(&dft, &c)?.apply_mode_unitary(&dft, &c2)?;
    let measured: Vec<usize> = c.iter().chain(&c2).copied().collect();
    let branches = state
        .measure(&measured)?
        .into_iter()
        .map(|m| (m.pattern, m.probability, m.post_state))
        .collect();
    Ok(TwoRegisterRun { n, branches })
}

fn split_pattern(pattern: &OccupationVector, n: usize) -> (OccupationVector, OccupationVector) {
    let counts = pattern.counts();
    (
        OccupationVector::new(counts[..=n].to_vec()),
        OccupationVector::new(counts[n + 1..].to_vec()),
    )
}

fn gate_outcomes<R>(run: TwoRegisterRun, rule: R) -> Result<Vec<(GateOutcome, FockState)>>
where
    R: Fn(usize, usize) -> SignCorrections,
{
    let n = run.n;
    let mut detection = DetectionPhases::new(n + 1)?;
    let mut outcomes = Vec::with_capacity(run.branches.len());
    for (pattern, probability, post) in run.branches {
        let (r, r2) = split_pattern(&pattern, n);
        let (k, k2) = (r.total(), r2.total());
        let slots = [output_slot(n, k, 0), output_slot(n, k2, n)];
        let extracted = extract_qubits(&post, &slots)?;

        let (comp, comp2) = (phase_correction(&r), phase_correction(&r2));
        let reference = (detection.phase(&r)? * detection.phase(&r2)?).conj();
        let mut amps = [Complex64::new(0.0, 0.0); 4];
        for (i, a) in extracted.amplitudes.iter().enumerate() {
            let mut v = a * reference;
            if i & 0b10 == 0 {
                v *= comp;
            }
            if i & 0b01 == 0 {
                v *= comp2;
            }
            amps[i] = v;
        }
        let uncorrected = amps;
        let corrections = rule(k, k2);
        corrections.apply(&mut amps);

        // The residual covers y then y', minus whichever output modes exist.
        let y_rest = n - usize::from(k >= 1 && k <= n);
        let first: Vec<usize> = (0..y_rest).collect();
        let split = extracted.residual.bipartition(&first)?;
        outcomes.push((
            GateOutcome {
                pattern: r,
                pattern2: r2,
                k,
                k2,
                corrections,
                uncorrected,
                output: amps,
                probability,
                residuals: (split.part, split.rest),
                deviation: extracted.deviation.max(split.deviation),
            },
            post,
        ));
    }
    Ok(outcomes)
}

/// Controlled sign flip by teleporting both qubits through the
/// sign-entangled ancilla pair.
pub fn cz_gate(
    q: &QubitAmplitudes,
    q2: &QubitAmplitudes,
    p: &CoefficientProfile,
    p2: &CoefficientProfile,
) -> Result<Vec<GateOutcome>> {
    cz_gate_with_rule(q, q2, p, p2, cz_sign_corrections)
}

/// [`cz_gate`] with a caller-supplied parity rule.
pub fn cz_gate_with_rule<R>(
    q: &QubitAmplitudes,
    q2: &QubitAmplitudes,
    p: &CoefficientProfile,
    p2: &CoefficientProfile,
    rule: R,
) -> Result<Vec<GateOutcome>>
where
    R: Fn(usize, usize) -> SignCorrections,
{
    let ancilla = cz_ancilla_state(p, p2)?;
    let run = run_two_registers(q, q2, ancilla, p.n())?;
    let outcomes = gate_outcomes(run, rule)?;
    let mut result = Vec::with_capacity(outcomes.len());
    for (o, _) in outcomes {
        if o.deviation > FACTOR_TOL {
            return Err(Error::ResidualNotFactorized(o.deviation));
        }
        result.push(o);
    }
    Ok(result)
}

/// Attempts a CNOT by building the CNOT into the ancilla pair. No parity
/// corrections are applied; residual entanglement is reported through the
/// purity of the output modes rather than raised.
pub fn cnot_direct(
    q: &QubitAmplitudes,
    q2: &QubitAmplitudes,
    p: &CoefficientProfile,
    p2: &CoefficientProfile,
) -> Result<Vec<CnotBranch>> {
    let n = p.n();
    if n < 2 {
        return Err(Error::InvalidProfile("direct CNOT needs n >= 2".into()));
    }
    let ancilla = cnot_ancilla_state(p, p2)?;
    let run = run_two_registers(q, q2, ancilla, n)?;
    with_purities(gate_outcomes(run, |_, _| SignCorrections::default())?, n)
}

/// Purity of the output modes for every CZ branch, computed the same way as
/// for [`cnot_direct`].
pub fn cz_output_purities(
    q: &QubitAmplitudes,
    q2: &QubitAmplitudes,
    p: &CoefficientProfile,
    p2: &CoefficientProfile,
) -> Result<Vec<CnotBranch>> {
    let n = p.n();
    let ancilla = cz_ancilla_state(p, p2)?;
    let run = run_two_registers(q, q2, ancilla, n)?;
    with_purities(gate_outcomes(run, cz_sign_corrections)?, n)
}

fn with_purities(outcomes: Vec<(GateOutcome, FockState)>, n: usize) -> Result<Vec<CnotBranch>> {
    outcomes
        .into_iter()
        .map(|(outcome, post)| {
            let keep: Vec<usize> = [(outcome.k, 0), (outcome.k2, n)]
                .into_iter()
                .filter(|&(k, _)| (1..=n).contains(&k))
                .map(|(k, offset)| offset + k - 1)
                .collect();
            let purity = if keep.is_empty() {
                1.0
            } else {
                post.reduced_density_matrix(&keep, 16)?.purity()
            };
            Ok(CnotBranch { outcome, purity })
        })
        .collect()
}
