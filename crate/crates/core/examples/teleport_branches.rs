//! Teleports one qubit through a sine-profile ancilla and prints what each
//! photon count leaves behind.
//!
//!     cargo run --example teleport_branches -- 4

use hifi_core::ancilla::CoefficientProfile;
use hifi_core::protocol::{teleport_enumerate, QubitAmplitudes};

fn main() -> hifi_core::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(3);
    let profile = CoefficientProfile::sine(n)?;
    let input = QubitAmplitudes::from_real(0.6, 0.8)?;
    let outcomes = teleport_enumerate(&input, &profile)?;

    println!("n = {n}, {} detection patterns", outcomes.len());
    println!("{:>3} {:>12} {:>10} {:>10} {:>10}", "k", "Pr(k)", "|a0|", "|a1|", "fidelity");
    for k in 0..=n + 1 {
        let branch: Vec<_> = outcomes.iter().filter(|o| o.k == k).collect();
        let probability: f64 = branch.iter().map(|o| o.probability).sum();
        let out = &branch[0].output;
        println!(
            "{k:>3} {probability:>12.6} {:>10.6} {:>10.6} {:>10.6}",
            out.a0().norm(),
            out.a1().norm(),
            input.fidelity(out)
        );
    }
    let error: f64 = outcomes.iter().map(|o| o.probability * (1.0 - input.fidelity(&o.output))).sum();
    println!("average error for this input: {error:.6e}");
    Ok(())
}
