use hifi_core::ancilla::CoefficientProfile;
use hifi_core::fidelity::outcome_distribution;
use hifi_core::protocol::{teleport_sample, QubitAmplitudes, TeleportSampler};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn frequencies_within_three_sigma() {
    let n = 3;
    let p = CoefficientProfile::sine(n).unwrap();
    let q = QubitAmplitudes::from_real(0.6, 0.8).unwrap();
    let sampler = TeleportSampler::new(&q, &p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let draws = 100_000;

    let mut by_k = vec![0usize; n + 2];
    let mut by_pattern = vec![0usize; sampler.outcomes().len()];
    for _ in 0..draws {
        let i = sampler.sample_index(&mut rng);
        by_pattern[i] += 1;
        by_k[sampler.outcomes()[i].k] += 1;
    }
    let within = |count: usize, prob: f64| {
        let mean = draws as f64 * prob;
        let sigma = (draws as f64 * prob * (1.0 - prob)).sqrt();
        (count as f64 - mean).abs() <= 3.0 * sigma.max(1.0)
    };
    for (k, prob) in outcome_distribution(&q, &p).into_iter().enumerate() {
        assert!(within(by_k[k], prob), "k = {k}: {} vs {}", by_k[k], prob * draws as f64);
    }
    // Individual patterns: allow the expected handful of 3σ excursions.
    let outliers = sampler
        .outcomes()
        .iter()
        .zip(&by_pattern)
        .filter(|(o, &c)| !within(c, o.probability))
        .count();
    assert!(outliers <= 2, "{outliers} of {} patterns outside 3σ", by_pattern.len());
}

#[test]
fn sampling_is_reproducible() {
    let p = CoefficientProfile::linear(4).unwrap();
    let q = QubitAmplitudes::plus();
    let a: Vec<_> = (0..20).map(|s| teleport_sample(&q, &p, s).unwrap().pattern).collect();
    let b: Vec<_> = (0..20).map(|s| teleport_sample(&q, &p, s).unwrap().pattern).collect();
    assert_eq!(a, b);
    assert!(a.iter().any(|x| x != &a[0]));
}
