//! Two photons on a balanced beam splitter never leave through different
//! ports.

use std::f64::consts::FRAC_1_SQRT_2;

use hifi_core::fock::{FockState, ModeUnitary, OccupationVector};
use nalgebra::DMatrix;
use num_complex::Complex64;

fn main() -> hifi_core::Result<()> {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let bs = ModeUnitary::new(DMatrix::from_row_slice(2, 2, &[h, h, h, -h]))?;
    let out = FockState::basis(OccupationVector::new(vec![1, 1])).apply_mode_unitary(&bs, &[0, 1])?;
    for (occ, amp) in out.iter() {
        println!("{occ}: {:+.6}", amp.re);
    }
    for m in out.measure(&[0])? {
        println!("mode 0 holds {}: probability {:.3}", m.pattern, m.probability);
    }
    Ok(())
}
