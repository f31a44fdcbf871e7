//! Seeded Monte Carlo draws of teleportation outcomes against the enumerated
//! photon-count distribution.

use hifi_core::ancilla::CoefficientProfile;
use hifi_core::fidelity::outcome_distribution;
use hifi_core::protocol::{QubitAmplitudes, TeleportSampler};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hifi_core::Result<()> {
    let n = 3;
    let p = CoefficientProfile::sine(n)?;
    let input = QubitAmplitudes::from_real(0.6, 0.8)?;
    let sampler = TeleportSampler::new(&input, &p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);

    let draws = 100_000;
    let mut counts = vec![0usize; n + 2];
    for _ in 0..draws {
        counts[sampler.sample(&mut rng).k] += 1;
    }
    for (k, expected) in outcome_distribution(&input, &p).into_iter().enumerate() {
        let sigma = (draws as f64 * expected * (1.0 - expected)).sqrt();
        let z = (counts[k] as f64 - draws as f64 * expected) / sigma.max(1e-300);
        println!("k = {k}: {:>6} draws, expected {:>9.1}, z = {z:+.2}", counts[k], draws as f64 * expected);
    }
    Ok(())
}
