//! Simulator-against-formula checks run by `oracle-check`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use clap::ValueEnum;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::table::{Cell, Table};
use crate::ancilla::{CoefficientProfile, ProfileKind};
use crate::error::{Error, Result};
use crate::fidelity::{average_error_exact, average_error_second_order, standard_profile, InputEnsemble};
use crate::fock::{FockState, ModeUnitary, OccupationVector};
use crate::protocol::{
    cz_gate_with_rule, cz_output_purities, cz_sign_corrections, detection_weight, klm_postselect,
    teleport_enumerate, GateOutcome, QubitAmplitudes, SignCorrections,
};

/// Deliberate bugs for exercising the checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Swap which qubit each register's parity corrects.
    CzSign,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub scope: String,
    pub cases: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

struct Tracker {
    cases: usize,
    worst: f64,
}

impl Tracker {
    fn new() -> Self {
        Self { cases: 0, worst: 0.0 }
    }

    fn record(&mut self, deviation: f64) {
        self.cases += 1;
        // NaN counts as a failure.
        self.worst = if deviation.is_nan() { f64::INFINITY } else { self.worst.max(deviation) };
    }

    fn finish(self, name: &'static str, scope: String, tolerance: f64) -> CheckResult {
        CheckResult {
            name,
            scope,
            cases: self.cases,
            max_deviation: self.worst,
            tolerance,
        }
    }
}

fn random_qubit(rng: &mut ChaCha8Rng) -> QubitAmplitudes {
    let p0: f64 = rng.random();
    let (phi0, phi1): (f64, f64) = (rng.random::<f64>() * 2.0 * PI, rng.random::<f64>() * 2.0 * PI);
    QubitAmplitudes::new(
        Complex64::from_polar(p0.sqrt(), phi0),
        Complex64::from_polar((1.0 - p0).sqrt(), phi1),
    )
    .expect("unit norm by construction")
}

fn profiles(n: usize) -> Result<Vec<CoefficientProfile>> {
    [ProfileKind::Uniform, ProfileKind::Linear, ProfileKind::Sine]
        .into_iter()
        .filter(|k| *k != ProfileKind::Linear || n >= 2)
        .map(|k| standard_profile(k, n))
        .collect()
}

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn normalize(v: &mut [Complex64]) {
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
}

/// Simulated teleportation branches against `c_n (α0 f(k), α1 f(k-1))` and
/// the branch probabilities, plus the averaged error against its closed form.
fn teleport_checks(max_n: usize, rng: &mut ChaCha8Rng, inputs: usize) -> Result<[CheckResult; 2]> {
    let mut branches = Tracker::new();
    let mut errors = Tracker::new();
    for n in 1..=max_n {
        for p in profiles(n)? {
            for _ in 0..inputs {
                let q = random_qubit(rng);
                let mut error = 0.0;
                for o in teleport_enumerate(&q, &p)? {
                    let k = o.k as i64;
                    let mut expected = [q.a0() * p.f(k), q.a1() * p.f(k - 1)];
                    normalize(&mut expected);
                    let branch_probability = q.p0() * p.f(k).powi(2) + q.p1() * p.f(k - 1).powi(2);
                    let probability = detection_weight(&o.pattern)? * branch_probability;
                    branches.record(
                        max_abs_diff(&o.output.to_array(), &expected).max((o.probability - probability).abs()),
                    );
                    error += o.probability * (1.0 - q.fidelity(&o.output));
                }
                let differences: f64 = (0..=n as i64 + 1).map(|k| (p.f(k) - p.f(k - 1)).powi(2)).sum();
                errors.record((error - q.p0() * q.p1() * differences).abs());
            }
        }
    }
    let scope = format!("n=1..{max_n}");
    Ok([
        branches.finish("teleport-branch-outputs", scope.clone(), 1e-10),
        errors.finish("teleport-average-error", scope, 1e-10),
    ])
}

/// All basis states of `m` modes with at most `max_photons` photons.
pub(crate) fn basis_states(m: usize, max_photons: usize) -> Vec<OccupationVector> {
    fn fill(prefix: &mut Vec<u8>, m: usize, left: usize, out: &mut Vec<OccupationVector>) {
        if prefix.len() == m {
            out.push(OccupationVector::new(prefix.clone()));
            return;
        }
        for c in 0..=left {
            prefix.push(c as u8);
            fill(prefix, m, left - c, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    fill(&mut Vec::with_capacity(m), m, max_photons, &mut out);
    out
}

/// Phase-shifting mode `l` by `2π l r_l / m` after the transform equals the
/// transform of the input cyclically shifted one mode to the right.
pub(crate) fn translational_deviation(occ: &OccupationVector) -> Result<f64> {
    let m = occ.len();
    let modes: Vec<usize> = (0..m).collect();
    let dft = ModeUnitary::dft(m)?;
    let state = FockState::basis(occ.clone());
    let mut shifted_after = state.apply_mode_unitary(&dft, &modes)?;
    for l in 0..m {
        shifted_after = shifted_after.phase_shift(l, 2.0 * PI * l as f64 / m as f64)?;
    }
    let shifted_before = state.cyclic_shift(&modes)?.apply_mode_unitary(&dft, &modes)?;
    shifted_after.distance(&shifted_before)
}

fn translational_check(max_modes: usize) -> Result<CheckResult> {
    let mut t = Tracker::new();
    for m in 1..=max_modes {
        for occ in basis_states(m, m) {
            t.record(translational_deviation(&occ)?);
        }
    }
    Ok(t.finish("translational-property", format!("m=1..{max_modes}"), 1e-10))
}

fn rule_for(fault: Option<Fault>) -> fn(usize, usize) -> SignCorrections {
    match fault {
        None => cz_sign_corrections,
        Some(Fault::CzSign) => |k, k2| SignCorrections {
            flip_q: k % 2 == 1,
            flip_q2: k2 % 2 == 1,
        },
    }
}

/// Expected controlled-sign-flip branch output, including the `(-1)^{k k2}`
/// sign left over from the measurement.
fn expected_cz(o: &GateOutcome, q: &QubitAmplitudes, q2: &QubitAmplitudes, p: &CoefficientProfile, p2: &CoefficientProfile) -> [Complex64; 4] {
    let (k, k2) = (o.k as i64, o.k2 as i64);
    let sign = if (k * k2) % 2 == 1 { -1.0 } else { 1.0 };
    let mut v = [
        q.a0() * q2.a0() * p.f(k) * p2.f(k2),
        q.a0() * q2.a1() * p.f(k) * p2.f(k2 - 1),
        q.a1() * q2.a0() * p.f(k - 1) * p2.f(k2),
        -q.a1() * q2.a1() * p.f(k - 1) * p2.f(k2 - 1),
    ];
    normalize(&mut v);
    v.map(|a| a * sign)
}

fn cz_checks(max_n: usize, rng: &mut ChaCha8Rng, fault: Option<Fault>) -> Result<[CheckResult; 3]> {
    let rule = rule_for(fault);
    let mut outputs = Tracker::new();
    let mut signs = Tracker::new();
    let mut purity = Tracker::new();
    for n in 1..=max_n {
        let detection_cache: &mut BTreeMap<OccupationVector, f64> = &mut BTreeMap::new();
        let mut weight = |r: &OccupationVector| -> Result<f64> {
            if let Some(w) = detection_cache.get(r) {
                return Ok(*w);
            }
            let w = detection_weight(r)?;
            detection_cache.insert(r.clone(), w);
            Ok(w)
        };
        for p in profiles(n)? {
            let (q, q2) = (random_qubit(rng), random_qubit(rng));
            for o in cz_gate_with_rule(&q, &q2, &p, &p, rule)? {
                let expected = expected_cz(&o, &q, &q2, &p, &p);
                let (k, k2) = (o.k as i64, o.k2 as i64);
                let branch = (q.p0() * p.f(k).powi(2) + q.p1() * p.f(k - 1).powi(2))
                    * (q2.p0() * p.f(k2).powi(2) + q2.p1() * p.f(k2 - 1).powi(2));
                let probability = weight(&o.pattern)? * weight(&o.pattern2)? * branch;
                outputs.record(max_abs_diff(&o.output, &expected).max((o.probability - probability).abs()));
            }

            // Truth table: the branch map on basis inputs is diag(1, 1, 1, -1)
            // up to its |00⟩ entry.
            if p.kind() == ProfileKind::Linear {
                continue;
            }
            let mut table: BTreeMap<(OccupationVector, OccupationVector), [Complex64; 4]> = BTreeMap::new();
            for b in 0..4 {
                let q = QubitAmplitudes::basis(b & 0b10 != 0);
                let q2 = QubitAmplitudes::basis(b & 0b01 != 0);
                for o in cz_gate_with_rule(&q, &q2, &p, &p, rule)? {
                    if o.degenerate(n) {
                        continue;
                    }
                    table.entry((o.pattern.clone(), o.pattern2.clone())).or_insert([Complex64::new(0.0, 0.0); 4])[b] =
                        o.output[b];
                }
            }
            for entries in table.values() {
                let diag = [1.0, 1.0, 1.0, -1.0];
                let dev = entries
                    .iter()
                    .zip(diag)
                    .map(|(e, d)| (e / entries[0] - d).norm())
                    .fold(0.0, f64::max);
                signs.record(dev);
            }
        }
        for b in cz_output_purities(&QubitAmplitudes::plus(), &QubitAmplitudes::plus(), &standard_profile(ProfileKind::Sine, n)?, &standard_profile(ProfileKind::Sine, n)?)? {
            purity.record((1.0 - b.purity).abs());
        }
    }
    let scope = format!("n=1..{max_n}");
    Ok([
        outputs.finish("cz-branch-outputs", scope.clone(), 1e-10),
        signs.finish("cz-parity-signs", scope.clone(), 1e-10),
        purity.finish("cz-output-purity", scope, 1e-9),
    ])
}

fn klm_check(max_n: usize, rng: &mut ChaCha8Rng, inputs: usize) -> Result<CheckResult> {
    let mut t = Tracker::new();
    for n in 1..=max_n {
        let p = CoefficientProfile::uniform(n)?;
        for _ in 0..inputs {
            let q = random_qubit(rng);
            let s = klm_postselect(&q, &teleport_enumerate(&q, &p)?);
            t.record((s.failure_probability - 1.0 / (n + 1) as f64).abs().max((1.0 - s.conditional_fidelity).abs()));
        }
    }
    Ok(t.finish("klm-postselection", format!("n=1..{max_n}"), 1e-12))
}

/// The ensemble average of the exact error against the sum of squared
/// coefficient differences.
fn averaging_check(max_n: usize) -> Result<CheckResult> {
    let mut t = Tracker::new();
    for n in 1..=max_n.max(40) {
        for p in profiles(n)? {
            let exact = average_error_exact(&p, &InputEnsemble::uniform_p0())?;
            t.record((exact - average_error_second_order(&p)).abs());
        }
    }
    Ok(t.finish("ensemble-average-error", format!("n=1..{}", max_n.max(40)), 1e-12))
}

/// Runs every check for `1 <= n <= max_n`; `max_n` may not exceed 4.
pub fn run_oracle_checks(max_n: usize, seed: u64, fault: Option<Fault>) -> Result<Vec<CheckResult>> {
    if !(1..=4).contains(&max_n) {
        return Err(Error::Config(format!("oracle-check needs 1 <= n <= 4, got {max_n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    checks.extend(teleport_checks(max_n, &mut rng, 5)?);
    checks.push(translational_check(6)?);
    checks.extend(cz_checks(max_n, &mut rng, fault)?);
    checks.push(klm_check(max_n, &mut rng, 5)?);
    checks.push(averaging_check(max_n)?);
    Ok(checks)
}

pub(crate) fn checks_table(checks: &[CheckResult]) -> Table {
    let mut table = Table::new(&["check", "scope", "cases", "max_deviation", "tolerance", "passed"]);
    for c in checks {
        table.push(vec![
            Cell::from(c.name),
            Cell::from(c.scope.clone()),
            Cell::from(c.cases),
            Cell::Float(c.max_deviation),
            Cell::Float(c.tolerance),
            Cell::from(c.passed()),
        ]);
    }
    table
}
