//! n² times the average error for the standard profiles, single and
//! two-qubit, straight from the closed forms.

use hifi_core::ancilla::CoefficientProfile;
use hifi_core::fidelity::{average_error_exact, cz_average_error_exact, InputEnsemble};

fn main() -> hifi_core::Result<()> {
    let ensemble = InputEnsemble::uniform_p0();
    let cz_ensemble = InputEnsemble::uniform_p0().with_order(2);
    println!("{:>5} {:>10} {:>10} {:>10} {:>10}", "n", "linear", "sine", "uniform", "cz linear");
    for n in [10, 20, 40, 80, 160, 320] {
        let n2 = (n * n) as f64;
        let linear = CoefficientProfile::linear(n)?;
        let e = |p: &CoefficientProfile| average_error_exact(p, &ensemble).map(|v| v * n2);
        println!(
            "{n:>5} {:>10.5} {:>10.5} {:>10.3} {:>10.5}",
            e(&linear)?,
            e(&CoefficientProfile::sine(n)?)?,
            e(&CoefficientProfile::uniform(n)?)?,
            cz_average_error_exact(&linear, &linear, &cz_ensemble)? * n2
        );
    }
    println!("limits: linear 2, sine pi^2/6 = {:.5}, cz linear 4", std::f64::consts::PI.powi(2) / 6.0);
    Ok(())
}
