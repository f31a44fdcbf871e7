//! Teleportation-based gates simulated by exhaustive branch enumeration.
//!
//! Mode order follows the register picture: the input qubit is mode 0, `x`
//! occupies modes `1..=n` and `y` modes `n+1..=2n`. Two-qubit gates append
//! the primed copy (`q'`, `x'`, `y'`) starting at mode `2n+1`.
//!
//! Branch outputs are reported in a canonical global phase: after the
//! Fourier-shift compensation the common detection amplitude
//! `⟨r|F|1^k 0^{n+1-k}⟩` is divided out, so a correctly working branch returns
//! exactly `c_n (α0 f(k), α1 f(k-1))`.

mod gate;
mod teleport;

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockState, ModeUnitary, OccupationVector};

pub use gate::{
    cnot_direct, cz_gate, cz_gate_with_rule, cz_output_purities, cz_sign_corrections, CnotBranch,
    GateOutcome,
    SignCorrections,
};
pub use teleport::{
    klm_postselect, teleport_enumerate, teleport_sample, KlmSummary, TeleportOutcome,
    TeleportSampler,
};

/// Largest tolerated cross term when factoring out residual registers.
pub const FACTOR_TOL: f64 = 1e-9;
const QUBIT_NORM_TOL: f64 = 1e-12;

/// Amplitudes of a single-mode photonic qubit: `a0 |0⟩ + a1 |1⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitAmplitudes {
    a0: Complex64,
    a1: Complex64,
}

impl QubitAmplitudes {
    pub fn new(a0: Complex64, a1: Complex64) -> Result<Self> {
        let norm = a0.norm_sqr() + a1.norm_sqr();
        if (norm - 1.0).abs() > QUBIT_NORM_TOL {
            return Err(Error::InvalidQubit(format!("|a0|² + |a1|² = {norm}")));
        }
        Ok(Self { a0, a1 })
    }

    /// Rescales to unit norm.
    pub fn normalized(a0: Complex64, a1: Complex64) -> Result<Self> {
        let norm = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidQubit("amplitudes are zero or non-finite".into()));
        }
        Ok(Self {
            a0: a0 / norm,
            a1: a1 / norm,
        })
    }

    pub fn from_real(a0: f64, a1: f64) -> Result<Self> {
        Self::normalized(Complex64::new(a0, 0.0), Complex64::new(a1, 0.0))
    }

    pub fn basis(bit: bool) -> Self {
        let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        if bit {
            Self { a0: zero, a1: one }
        } else {
            Self { a0: one, a1: zero }
        }
    }

    /// `(|0⟩ + |1⟩)/√2`.
    pub fn plus() -> Self {
        Self::from_real(1.0, 1.0).expect("non-zero")
    }

    pub fn a0(&self) -> Complex64 {
        self.a0
    }

    pub fn a1(&self) -> Complex64 {
        self.a1
    }

    pub fn p0(&self) -> f64 {
        self.a0.norm_sqr()
    }

    pub fn p1(&self) -> f64 {
        self.a1.norm_sqr()
    }

    pub fn to_array(&self) -> [Complex64; 2] {
        [self.a0, self.a1]
    }

    /// Single-mode Fock state with the photon present for logical 1.
    pub fn to_state(&self) -> FockState {
        FockState::from_terms(
            1,
            [
                (OccupationVector::new(vec![0]), self.a0),
                (OccupationVector::new(vec![1]), self.a1),
            ],
        )
        .expect("one-mode terms")
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &QubitAmplitudes) -> f64 {
        (self.a0.conj() * other.a0 + self.a1.conj() * other.a1).norm_sqr()
    }
}

/// Phase that undoes the Fourier-shift factor `Δφ = prod_l exp(2πi l r_l / m)`
/// for a detection pattern over `m` modes. The returned value is `conj(Δφ)`
/// and multiplies the logical-0 component of the teleported qubit.
pub fn phase_correction(pattern: &OccupationVector) -> Complex64 {
    fourier_shift_phase(pattern).conj()
}

/// `Δφ` itself: the relative phase between detecting `pattern` from an input
/// and from the same input cyclically shifted one mode to the right.
pub fn fourier_shift_phase(pattern: &OccupationVector) -> Complex64 {
    let m = pattern.len();
    if m == 0 {
        return Complex64::new(1.0, 0.0);
    }
    // Sum the exponent modulo m before taking the exponential.
    let exponent: usize = pattern
        .counts()
        .iter()
        .enumerate()
        .map(|(l, &r)| (l * r as usize) % m)
        .sum::<usize>()
        % m;
    Complex64::from_polar(1.0, 2.0 * PI * exponent as f64 / m as f64)
}

/// Where the teleported qubit of a register ends up after `k` detections.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum OutputSlot {
    /// Held in the given mode of the post-measurement state.
    Mode(usize),
    /// Determined by the measurement (`k = 0` gives 0, `k = n+1` gives 1).
    Fixed(bool),
}

/// Output slot for a register of size `n`, with its `y` register starting at
/// `offset` in the post-measurement state.
pub(crate) fn output_slot(n: usize, k: usize, offset: usize) -> OutputSlot {
    if k == 0 {
        OutputSlot::Fixed(false)
    } else if k == n + 1 {
        OutputSlot::Fixed(true)
    } else {
        OutputSlot::Mode(offset + k - 1)
    }
}

pub(crate) struct Extracted {
    /// Amplitudes indexed with the first slot as the most significant bit.
    pub amplitudes: Vec<Complex64>,
    pub residual: FockState,
    pub deviation: f64,
}

/// Reads the output qubits out of a post-measurement state, splitting off the
/// remaining modes as a residual.
pub(crate) fn extract_qubits(post: &FockState, slots: &[OutputSlot]) -> Result<Extracted> {
    let modes: Vec<usize> = slots
        .iter()
        .filter_map(|s| match s {
            OutputSlot::Mode(m) => Some(*m),
            OutputSlot::Fixed(_) => None,
        })
        .collect();
    let split = post.bipartition(&modes)?;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << slots.len()];
    for (occ, &amp) in split.part.iter() {
        let mut index = 0usize;
        let mut next_mode = 0usize;
        for slot in slots {
            let bit = match slot {
                OutputSlot::Fixed(b) => *b,
                OutputSlot::Mode(_) => {
                    let count = occ.get(next_mode);
                    next_mode += 1;
                    match count {
                        0 => false,
                        1 => true,
                        c => {
                            return Err(Error::InvalidState(format!(
                                "output mode holds {c} photons"
                            )))
                        }
                    }
                }
            };
            index = (index << 1) | usize::from(bit);
        }
        amplitudes[index] += amp;
    }
    Ok(Extracted {
        amplitudes,
        residual: split.rest,
        deviation: split.deviation,
    })
}

/// Phases of the detection amplitudes `⟨r|F|1^k 0^{m-k}⟩`, cached per `k`.
pub(crate) struct DetectionPhases {
    dft: ModeUnitary,
    cache: HashMap<usize, FockState>,
}

impl DetectionPhases {
    pub fn new(m: usize) -> Result<Self> {
        Ok(Self {
            dft: ModeUnitary::dft(m)?,
            cache: HashMap::new(),
        })
    }

    pub fn phase(&mut self, pattern: &OccupationVector) -> Result<Complex64> {
        let m = self.dft.dimension();
        let k = pattern.total();
        if k > m {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let transformed = match self.cache.get(&k) {
            Some(s) => s,
            None => {
                let input = OccupationVector::new((0..m).map(|i| u8::from(i < k)).collect());
                let modes: Vec<usize> = (0..m).collect();
                let out = FockState::basis(input).apply_mode_unitary(&self.dft, &modes)?;
                self.cache.entry(k).or_insert(out)
            }
        };
        let amp = transformed.amplitude(pattern);
        Ok(if amp.norm() > 0.0 {
            amp / amp.norm()
        } else {
            Complex64::new(1.0, 0.0)
        })
    }

    /// `|⟨r|F|1^k 0^{m-k}⟩|²`, the fraction of branch-`k` probability that
    /// lands on `pattern`.
    pub fn weight(&mut self, pattern: &OccupationVector) -> Result<f64> {
        self.phase(pattern)?;
        Ok(self
            .cache
            .get(&pattern.total())
            .map(|s| s.amplitude(pattern).norm_sqr())
            .unwrap_or(0.0))
    }
}

/// Probability that `pattern` is observed given that the register holds `k =
/// pattern.total()` photons, independent of the input qubit.
pub fn detection_weight(pattern: &OccupationVector) -> Result<f64> {
    DetectionPhases::new(pattern.len())?.weight(pattern)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn occ(v: &[u8]) -> OccupationVector {
        OccupationVector::new(v.to_vec())
    }

    #[test]
    fn shift_phase_examples() {
        assert!((fourier_shift_phase(&occ(&[3, 0, 0])) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((fourier_shift_phase(&occ(&[0, 1])) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((fourier_shift_phase(&occ(&[0, 1, 1])) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let w = fourier_shift_phase(&occ(&[0, 1, 0]));
        assert!((w - Complex64::from_polar(1.0, 2.0 * PI / 3.0)).norm() < 1e-15);
        assert!((phase_correction(&occ(&[0, 1, 0])) - w.conj()).norm() < 1e-15);
        for pattern in [occ(&[1, 2, 0, 1]), occ(&[0, 0, 5]), occ(&[2])] {
            assert!((phase_correction(&pattern).norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn qubit_validation() {
        assert!(QubitAmplitudes::new(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)).is_err());
        let q = QubitAmplitudes::from_real(3.0, 4.0).unwrap();
        assert!((q.p0() - 0.36).abs() < 1e-15);
        assert!((q.p1() - 0.64).abs() < 1e-15);
        assert!(QubitAmplitudes::from_real(0.0, 0.0).is_err());
        assert!((q.fidelity(&q) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn output_slots() {
        assert_eq!(output_slot(3, 0, 0), OutputSlot::Fixed(false));
        assert_eq!(output_slot(3, 4, 0), OutputSlot::Fixed(true));
        assert_eq!(output_slot(3, 2, 3), OutputSlot::Mode(4));
    }
}
