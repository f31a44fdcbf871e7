//! Controlled sign flip with n = 2: basis inputs through every branch, with
//! the parity corrections applied.

use hifi_core::ancilla::CoefficientProfile;
use hifi_core::protocol::{cz_gate, QubitAmplitudes};

fn main() -> hifi_core::Result<()> {
    let n = 2;
    let p = CoefficientProfile::uniform(n)?;
    for (bits, label) in [((false, false), "00"), ((false, true), "01"), ((true, false), "10"), ((true, true), "11")] {
        let q = QubitAmplitudes::basis(bits.0);
        let q2 = QubitAmplitudes::basis(bits.1);
        let outcomes = cz_gate(&q, &q2, &p, &p)?;
        let index = usize::from(bits.0) * 2 + usize::from(bits.1);
        // Divide out the (-1)^{k k2} sign that is common to all inputs.
        let signs: Vec<f64> = outcomes
            .iter()
            .filter(|o| !o.degenerate(n))
            .map(|o| o.output[index].re * if (o.k * o.k2) % 2 == 1 { -1.0 } else { 1.0 })
            .collect();
        let min = signs.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = signs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        println!("|{label}> -> {:+.0} |{label}>  ({} interior branches, range [{min:+.12}, {max:+.12}])", min, signs.len());
    }

    let plus = QubitAmplitudes::plus();
    let outcomes = cz_gate(&plus, &plus, &p, &p)?;
    let total: f64 = outcomes.iter().map(|o| o.probability).sum();
    println!("|++> run: {} branches, total probability {total:.12}", outcomes.len());
    Ok(())
}
