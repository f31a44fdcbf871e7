//! Equal coefficients with the k = 0 and k = n+1 outcomes discarded: every
//! accepted branch is perfect and the failure rate is 1/(n+1).

use hifi_core::ancilla::CoefficientProfile;
use hifi_core::fidelity::klm_failure_probability;
use hifi_core::protocol::{klm_postselect, teleport_enumerate, QubitAmplitudes};

fn main() -> hifi_core::Result<()> {
    let input = QubitAmplitudes::from_real(0.3, 0.7)?;
    for n in 1..=4 {
        let p = CoefficientProfile::uniform(n)?;
        let s = klm_postselect(&input, &teleport_enumerate(&input, &p)?);
        println!(
            "n = {n}: failure {:.6} (1/(n+1) = {:.6}), fidelity when accepted {:.12}",
            s.failure_probability,
            klm_failure_probability(n)?,
            s.conditional_fidelity
        );
    }
    Ok(())
}
