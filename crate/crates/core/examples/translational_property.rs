//! Shifting the input of a Fourier multiport one mode to the right only
//! multiplies each output term by a pattern-dependent phase.

use std::f64::consts::PI;

use hifi_core::fock::{FockState, ModeUnitary, OccupationVector};
use hifi_core::protocol::fourier_shift_phase;

fn main() -> hifi_core::Result<()> {
    let input = OccupationVector::new(vec![1, 1, 0, 0]);
    let m = input.len();
    let modes: Vec<usize> = (0..m).collect();
    let dft = ModeUnitary::dft(m)?;

    let state = FockState::basis(input.clone());
    let direct = state.apply_mode_unitary(&dft, &modes)?;
    let shifted = state.cyclic_shift(&modes)?.apply_mode_unitary(&dft, &modes)?;

    println!("input {input}, shifted input {}", state.cyclic_shift(&modes)?.iter().next().unwrap().0);
    for (pattern, amp) in direct.iter().take(8) {
        let ratio = shifted.amplitude(pattern) / amp;
        let phase = fourier_shift_phase(pattern);
        println!("{pattern}: ratio {:+.4}{:+.4}i, predicted {:+.4}{:+.4}i", ratio.re, ratio.im, phase.re, phase.im);
    }

    let mut rephased = direct.clone();
    for l in 0..m {
        rephased = rephased.phase_shift(l, 2.0 * PI * l as f64 / m as f64)?;
    }
    println!("max deviation after phase shifts: {:.2e}", rephased.distance(&shifted)?);
    Ok(())
}
