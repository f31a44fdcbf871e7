//! Building the CNOT into the ancilla leaves the output entangled with the
//! unmeasured modes. Purity of the output pair, branch by branch, against
//! the controlled sign flip run through the same pipeline.

use hifi_core::ancilla::CoefficientProfile;
use hifi_core::protocol::{cnot_direct, cz_output_purities, QubitAmplitudes};

fn main() -> hifi_core::Result<()> {
    let n = 2;
    let p = CoefficientProfile::uniform(n)?;
    let plus = QubitAmplitudes::plus();

    let cnot = cnot_direct(&plus, &plus, &p, &p)?;
    let cz = cz_output_purities(&plus, &plus, &p, &p)?;
    let min = |v: &[hifi_core::protocol::CnotBranch]| v.iter().map(|b| b.purity).fold(f64::INFINITY, f64::min);

    let mixed = cnot.iter().filter(|b| b.purity < 0.999).count();
    println!("cnot: {} branches, {mixed} with purity < 0.999, minimum {:.6}", cnot.len(), min(&cnot));
    println!("cz:   {} branches, minimum purity {:.12}", cz.len(), min(&cz));
    for b in cnot.iter().filter(|b| b.purity < 0.999).take(5) {
        let o = &b.outcome;
        println!("  {} {} (k={}, k2={}): purity {:.4}", o.pattern, o.pattern2, o.k, o.k2, b.purity);
    }
    Ok(())
}
