//! Optimal coefficients: the second-order eigenproblem, the same problem with
//! the linear profile's zero endpoints, and direct minimization of the exact
//! single and two-qubit errors.

use std::f64::consts::PI;

use hifi_core::fidelity::InputEnsemble;
use hifi_core::optimize::{optimize_exact, optimize_second_order, optimize_second_order_pinned, GateKind};

fn main() -> hifi_core::Result<()> {
    println!("{:>5} {:>14} {:>14} {:>14} {:>14}", "n", "second-order", "pinned ends", "exact single", "exact cz");
    for n in [10, 20, 30] {
        let second = optimize_second_order(n)?;
        let pinned = optimize_second_order_pinned(n)?;
        let single = optimize_exact(n, &InputEnsemble::uniform_p0(), GateKind::Single, 7)?;
        let cz = optimize_exact(n, &InputEnsemble::uniform_p0().with_order(2), GateKind::Cz, 7)?;
        let imp = |r: &hifi_core::optimize::OptimizationResult| r.improvement_vs_linear.unwrap_or(f64::NAN);
        println!(
            "{n:>5} {:>14.4} {:>14.4} {:>14.4} {:>14.4}",
            imp(&second),
            imp(&pinned),
            imp(&single),
            imp(&cz)
        );
    }
    for n in [100, 1000, 10000] {
        println!("n = {n}: second-order improvement {:.4}", optimize_second_order(n)?.improvement_vs_linear.unwrap());
    }
    let r = PI * PI / 12.0;
    println!("continuum limit 1 - pi^2/12 = {:.4}; squared ratio 1 - (pi^2/12)^2 = {:.4}", 1.0 - r, 1.0 - r * r);
    Ok(())
}
