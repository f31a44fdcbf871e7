//! The numerical optimizer against exhaustive grids and the standard profiles.

use hifi_core::ancilla::CoefficientProfile;
use hifi_core::fidelity::{average_error_exact, cz_average_error_exact, InputEnsemble};
use hifi_core::optimize::{optimize_exact, optimize_exact_with, ExactOptions, GateKind};

/// Every way to split `total` units among `parts` bins.
fn compositions(parts: usize, total: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if prefix.len() + 1 == parts {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for i in 0..=total {
        prefix.push(i);
        compositions(parts, total - i, prefix, out);
        prefix.pop();
    }
}

/// Minimum of `objective` over `f_j = sqrt(s_j)` with `s` on a simplex grid
/// of spacing 0.02.
fn grid_minimum(n: usize, objective: impl Fn(&CoefficientProfile) -> f64) -> f64 {
    let mut points = Vec::new();
    compositions(n + 1, 50, &mut Vec::new(), &mut points);
    points
        .iter()
        .map(|s| {
            let coeffs: Vec<f64> = s.iter().map(|&u| (u as f64 * 0.02).sqrt()).collect();
            objective(&CoefficientProfile::with_kind(coeffs, hifi_core::ancilla::ProfileKind::Custom).unwrap())
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn single_optimum_beats_grid() {
    let e = InputEnsemble::uniform_p0().with_order(4);
    for n in 2..=4 {
        let r = optimize_exact(n, &e, GateKind::Single, 3).unwrap();
        let grid = grid_minimum(n, |p| average_error_exact(p, &e).unwrap());
        assert!(r.objective_value <= grid + 1e-4, "n={n}: {} vs grid {grid}", r.objective_value);
        assert!(r.converged);
    }
}

#[test]
fn cz_optimum_beats_grid() {
    let e = InputEnsemble::uniform_p0().with_order(2);
    for n in 2..=3 {
        let r = optimize_exact(n, &e, GateKind::Cz, 3).unwrap();
        let grid = grid_minimum(n, |p| cz_average_error_exact(p, p, &e).unwrap());
        assert!(r.objective_value <= grid + 1e-4, "n={n}: {} vs grid {grid}", r.objective_value);
    }
}

#[test]
fn n2_single_optimum_matches_linear() {
    // f = (0, 1, 0) already has error 1/3; nothing on the grid does better.
    let e = InputEnsemble::uniform_p0();
    let r = optimize_exact(2, &e, GateKind::Single, 0).unwrap();
    let linear = average_error_exact(&CoefficientProfile::linear(2).unwrap(), &e).unwrap();
    assert!((linear - 1.0 / 3.0).abs() < 1e-14);
    assert!(r.objective_value <= linear + 1e-12);
}

#[test]
fn optimum_beats_standard_profiles() {
    let e = InputEnsemble::uniform_p0().with_order(4);
    for n in [2, 3, 5, 8, 12] {
        let r = optimize_exact(n, &e, GateKind::Single, 1).unwrap();
        for p in [
            CoefficientProfile::linear(n).unwrap(),
            CoefficientProfile::sine(n).unwrap(),
            CoefficientProfile::uniform(n).unwrap(),
        ] {
            assert!(r.objective_value <= average_error_exact(&p, &e).unwrap() + 1e-12, "n={n} {}", p.kind());
        }
        assert!((r.profile.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(r.profile.coeffs().iter().all(|&c| c >= 0.0));
    }
}

#[test]
fn sign_freedom_does_not_help() {
    let e = InputEnsemble::uniform_p0().with_order(4);
    for n in 2..=4 {
        let restricted = optimize_exact(n, &e, GateKind::Single, 5).unwrap();
        let free = optimize_exact_with(
            n,
            &e,
            GateKind::Single,
            5,
            &ExactOptions {
                nonnegative: false,
                ..ExactOptions::default()
            },
        )
        .unwrap();
        assert!(free.objective_value >= restricted.objective_value - 1e-9, "n={n}");
    }
}

#[test]
fn independent_registers_do_not_beat_shared_profile() {
    let e = InputEnsemble::uniform_p0().with_order(2);
    let n = 4;
    let shared = optimize_exact(n, &e, GateKind::Cz, 2).unwrap();
    let independent = optimize_exact_with(
        n,
        &e,
        GateKind::Cz,
        2,
        &ExactOptions {
            independent_registers: true,
            ..ExactOptions::default()
        },
    )
    .unwrap();
    let p2 = independent.profile2.expect("second profile");
    assert!((independent.objective_value - cz_average_error_exact(&independent.profile, &p2, &e).unwrap()).abs() < 1e-15);
    assert!((independent.objective_value - shared.objective_value).abs() < 1e-8);
}

#[test]
fn fixed_seed_is_deterministic() {
    let e = InputEnsemble::uniform_p0().with_order(4);
    let a = optimize_exact(6, &e, GateKind::Single, 42).unwrap();
    let b = optimize_exact(6, &e, GateKind::Single, 42).unwrap();
    assert_eq!(a, b);
}
