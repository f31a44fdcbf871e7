use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::spec::{n_values, resolve_input};
use super::table::{Cell, Table};
use super::{CnotArgs, CzArgs, ObjectiveArg, OptimizeArgs, ScanArgs, TeleportArgs};
use crate::ancilla::{CoefficientProfile, ProfileKind};
use crate::error::{Error, Result};
use crate::fidelity::{
    average_error_exact, average_error_second_order, continuum_error, cz_average_error_exact,
    klm_failure_probability, standard_profile, InputEnsemble,
};
use crate::fock::DEFAULT_BASIS_CAP;
use crate::optimize::{optimize_exact_with, optimize_second_order, ExactOptions, GateKind, OptimizationResult};
use crate::protocol::{
    cnot_direct, cz_gate, cz_output_purities, teleport_enumerate, QubitAmplitudes, TeleportSampler,
};

/// Gauss-Legendre order used wherever the two-qubit average is optimized.
/// The integrand is a low-degree polynomial in `P0`, so small orders are exact.
const CZ_OPTIMIZE_ORDER: usize = 2;

fn c(v: f64) -> Cell {
    Cell::Float(v)
}

/// Distinct Fock terms the register transform can produce for `n`, checked
/// before any simulation starts.
fn check_register_size(n: usize, registers: u32) -> Result<()> {
    let modes = n + 1;
    let per_register: f64 = (0..=modes)
        .map(|k| (1..=k).fold(1.0, |acc, i| acc * (modes + i - 1) as f64 / i as f64))
        .sum();
    let size = per_register.powi(registers as i32);
    if size > DEFAULT_BASIS_CAP as f64 {
        return Err(Error::BasisCapExceeded {
            size: size.min(usize::MAX as f64) as usize,
            cap: DEFAULT_BASIS_CAP,
        });
    }
    Ok(())
}

fn amplitude_cells(amps: &[Complex64]) -> Vec<Cell> {
    amps.iter().flat_map(|a| [c(a.re), c(a.im)]).collect()
}

fn overlap_sqr(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm_sqr()
}

fn ideal_cz(q: &QubitAmplitudes, q2: &QubitAmplitudes) -> [Complex64; 4] {
    [q.a0() * q2.a0(), q.a0() * q2.a1(), q.a1() * q2.a0(), -q.a1() * q2.a1()]
}

fn ideal_cnot(q: &QubitAmplitudes, q2: &QubitAmplitudes) -> [Complex64; 4] {
    [q.a0() * q2.a0(), q.a0() * q2.a1(), q.a1() * q2.a1(), q.a1() * q2.a0()]
}

pub(crate) fn teleport(args: &TeleportArgs) -> Result<Table> {
    let p = args.profile.resolve(args.n)?;
    check_register_size(p.n(), 1)?;
    let q = resolve_input(&args.input)?;
    let outcomes = teleport_enumerate(&q, &p)?;

    let counts = args.samples.map(|samples| {
        let sampler = TeleportSampler::from_outcomes(outcomes.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(args.output.seed);
        let mut counts = vec![0usize; outcomes.len()];
        for _ in 0..samples {
            counts[sampler.sample_index(&mut rng)] += 1;
        }
        counts
    });

    let mut table = if args.patterns {
        Table::new(&[
            "pattern", "k", "degenerate", "probability", "correction_re", "correction_im", "a0_re",
            "a0_im", "a1_re", "a1_im", "fidelity",
        ])
    } else {
        Table::new(&[
            "k", "patterns", "degenerate", "probability", "a0_re", "a0_im", "a1_re", "a1_im",
            "fidelity",
        ])
    };
    if counts.is_some() {
        table.columns.push("sampled".into());
    }
    let mut total = 0.0;
    let mut average_fidelity = 0.0;
    for o in &outcomes {
        total += o.probability;
        average_fidelity += o.probability * q.fidelity(&o.output);
    }
    if args.patterns {
        for (i, o) in outcomes.iter().enumerate() {
            let mut row = vec![
                Cell::from(o.pattern.to_string()),
                Cell::from(o.k),
                Cell::from(o.degenerate),
                c(o.probability),
                c(o.correction_phase.re),
                c(o.correction_phase.im),
            ];
            row.extend(amplitude_cells(&o.output.to_array()));
            row.push(c(q.fidelity(&o.output)));
            if let Some(counts) = &counts {
                row.push(Cell::from(counts[i]));
            }
            table.push(row);
        }
    } else {
        // Outcomes come in pattern order; group them by photon count. Every
        // pattern with the same count leaves the same corrected output.
        for k in 0..=p.n() + 1 {
            let members: Vec<usize> = (0..outcomes.len()).filter(|&i| outcomes[i].k == k).collect();
            let Some(&first) = members.first() else {
                continue;
            };
            let o = &outcomes[first];
            let mut row = vec![
                Cell::from(k),
                Cell::from(members.len()),
                Cell::from(o.degenerate),
                c(members.iter().map(|&i| outcomes[i].probability).sum()),
            ];
            row.extend(amplitude_cells(&o.output.to_array()));
            row.push(c(q.fidelity(&o.output)));
            if let Some(counts) = &counts {
                row.push(Cell::from(members.iter().map(|&i| counts[i]).sum::<usize>()));
            }
            table.push(row);
        }
    }
    let formula: f64 = (0..=p.n() as i64 + 1)
        .map(|k| (p.f(k) - p.f(k - 1)).powi(2))
        .sum::<f64>()
        * q.p0()
        * q.p1();
    table.summary = Some(json!({
        "n": p.n(),
        "profile": p.kind().to_string(),
        "total_probability": total,
        "average_fidelity": average_fidelity,
        "error": 1.0 - average_fidelity,
        "closed_form_error": formula,
    }));
    Ok(table)
}

pub(crate) fn cz(args: &CzArgs) -> Result<Table> {
    let p = args.profile.resolve(args.n)?;
    let p2 = match &args.profile2 {
        Some(spec) => spec.resolve(Some(p.n()))?,
        None => p.clone(),
    };
    check_register_size(p.n(), 2)?;
    let (q, q2) = (resolve_input(&args.input)?, resolve_input(&args.input2)?);
    let ideal = ideal_cz(&q, &q2);

    let mut table = Table::new(&[
        "pattern", "pattern2", "k", "k2", "corrections", "probability", "a00_re", "a00_im",
        "a01_re", "a01_im", "a10_re", "a10_im", "a11_re", "a11_im", "fidelity",
    ]);
    let mut total = 0.0;
    let mut average_fidelity = 0.0;
    for o in cz_gate(&q, &q2, &p, &p2)? {
        let fidelity = overlap_sqr(&ideal, &o.output);
        total += o.probability;
        average_fidelity += o.probability * fidelity;
        let mut row = vec![
            Cell::from(o.pattern.to_string()),
            Cell::from(o.pattern2.to_string()),
            Cell::from(o.k),
            Cell::from(o.k2),
            Cell::from(o.corrections.label()),
            c(o.probability),
        ];
        row.extend(amplitude_cells(&o.output));
        row.push(c(fidelity));
        table.push(row);
    }
    table.summary = Some(json!({
        "n": p.n(),
        "total_probability": total,
        "average_fidelity": average_fidelity,
        "error": 1.0 - average_fidelity,
    }));
    Ok(table)
}

pub(crate) fn cnot_demo(args: &CnotArgs) -> Result<Table> {
    if !(2..=3).contains(&args.n) {
        return Err(Error::Config(format!("cnot-demo needs n in {{2, 3}}, got {}", args.n)));
    }
    let p = args.profile.resolve(Some(args.n))?;
    let (q, q2) = (resolve_input(&args.input)?, resolve_input(&args.input2)?);

    let mut table = Table::new(&[
        "gate", "pattern", "pattern2", "k", "k2", "probability", "purity", "fidelity",
    ]);
    let mut min_purity = [f64::INFINITY; 2];
    let runs = [
        ("cnot", cnot_direct(&q, &q2, &p, &p)?, ideal_cnot(&q, &q2)),
        ("cz", cz_output_purities(&q, &q2, &p, &p)?, ideal_cz(&q, &q2)),
    ];
    for (slot, (gate, branches, ideal)) in runs.iter().enumerate() {
        for b in branches {
            let o = &b.outcome;
            min_purity[slot] = min_purity[slot].min(b.purity);
            let norm: f64 = o.output.iter().map(|a| a.norm_sqr()).sum();
            table.push(vec![
                Cell::from(*gate),
                Cell::from(o.pattern.to_string()),
                Cell::from(o.pattern2.to_string()),
                Cell::from(o.k),
                Cell::from(o.k2),
                c(o.probability),
                c(b.purity),
                c(overlap_sqr(ideal, &o.output) / norm),
            ]);
        }
    }
    let below = runs[0].1.iter().filter(|b| b.purity < 0.999).count();
    table.summary = Some(json!({
        "n": args.n,
        "min_purity_cnot": min_purity[0],
        "min_purity_cz": min_purity[1],
        "cnot_branches_below_0.999": below,
    }));
    Ok(table)
}

pub(crate) fn scan(args: &ScanArgs) -> Result<Table> {
    let ns = n_values(args.n, args.n_range)?;
    let ensemble = match &args.input {
        Some(spec) => InputEnsemble::fixed(spec.resolve()?),
        None => InputEnsemble::uniform_p0(),
    };
    let cz_ensemble = ensemble.with_order(args.cz_order);

    let mut table = Table::new(&[
        "n", "profile", "exact_error", "second_order_error", "continuum_error", "n2_error",
        "klm_failure", "cz_error", "n2_cz_error",
    ]);
    for &n in &ns {
        let profiles: Vec<CoefficientProfile> = match &args.profile {
            Some(spec) => vec![spec.resolve(Some(n))?],
            None => [ProfileKind::Uniform, ProfileKind::Linear, ProfileKind::Sine]
                .into_iter()
                .filter(|k| *k != ProfileKind::Linear || n >= 2)
                .map(|k| standard_profile(k, n))
                .collect::<Result<_>>()?,
        };
        let n2 = (n * n) as f64;
        for p in profiles {
            let exact = average_error_exact(&p, &ensemble)?;
            let cz = cz_average_error_exact(&p, &p, &cz_ensemble)?;
            table.push(vec![
                Cell::from(n),
                Cell::from(p.kind().to_string()),
                c(exact),
                c(average_error_second_order(&p)),
                c(continuum_error(&p)),
                c(n2 * exact),
                c(klm_failure_probability(n)?),
                c(cz),
                c(n2 * cz),
            ]);
        }
    }
    Ok(table)
}

/// `1 - π²/12`: the improvement when each teleportation's error adds.
pub fn additive_reading() -> f64 {
    1.0 - PI * PI / 12.0
}

/// `1 - (π²/12)²`: the improvement if the per-teleportation ratios multiply.
pub fn multiplicative_reading() -> f64 {
    1.0 - (PI * PI / 12.0).powi(2)
}

pub(crate) fn optimize(args: &OptimizeArgs) -> Result<(Table, Option<CoefficientProfile>)> {
    let ns = n_values(args.n, args.n_range)?;
    if args.profile_out.is_some() && ns.len() != 1 {
        return Err(Error::Config("--profile-out needs a single --n".into()));
    }
    let options = ExactOptions {
        max_iterations: args.max_iterations,
        perturbed_starts: args.starts,
        nonnegative: !args.unrestricted,
        independent_registers: args.independent,
        ..ExactOptions::default()
    };

    let mut table = Table::new(&[
        "n", "objective", "objective_value", "linear_value", "improvement_vs_linear",
        "additive_reading", "multiplicative_reading", "iterations", "converged",
    ]);
    let mut last: Option<OptimizationResult> = None;
    for &n in &ns {
        let result = match args.objective {
            ObjectiveArg::SecondOrder => optimize_second_order(n)?,
            ObjectiveArg::ExactSingle => {
                optimize_exact_with(n, &InputEnsemble::uniform_p0(), GateKind::Single, args.output.seed, &options)?
            }
            ObjectiveArg::ExactCz => optimize_exact_with(
                n,
                &InputEnsemble::uniform_p0().with_order(CZ_OPTIMIZE_ORDER),
                GateKind::Cz,
                args.output.seed,
                &options,
            )?,
        };
        let opt = |v: Option<f64>| v.map_or(Cell::from(""), Cell::Float);
        table.push(vec![
            Cell::from(n),
            Cell::from(serde_json::to_value(result.objective_kind)?.as_str().unwrap_or_default()),
            c(result.objective_value),
            opt(result.linear_value),
            opt(result.improvement_vs_linear),
            c(additive_reading()),
            c(multiplicative_reading()),
            Cell::from(result.iterations),
            Cell::from(result.converged),
        ]);
        last = Some(result);
    }
    let single = (ns.len() == 1).then_some(last).flatten();
    if let Some(result) = &single {
        table.summary = Some(json!({
            "profile": result.profile.coeffs(),
            "profile2": result.profile2.as_ref().map(|p| p.coeffs().to_vec()),
        }));
    }
    Ok((table, single.map(|r| r.profile)))
}
