//! Coefficient profiles that minimize the average teleportation error.
//!
//! The ensemble-averaged error of a profile is the quadratic form
//! `f·Q·f / 6` of the Dirichlet second-difference matrix `Q`, so its minimizer
//! on the unit sphere is the ground state of `Q`. [`optimize_second_order`]
//! solves that eigenproblem directly; [`optimize_exact`] minimizes the exact
//! averaged objectives numerically, which also covers the two-qubit gate.

use log::debug;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ancilla::{CoefficientProfile, ProfileKind};
use crate::error::{Error, Result};
use crate::fidelity::{average_error_exact, average_error_second_order, cz_average_error_exact, InputEnsemble};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    SecondOrder,
    ExactSingle,
    ExactCz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    Single,
    Cz,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub profile: CoefficientProfile,
    /// Second register's profile when the two registers were optimized
    /// independently.
    pub profile2: Option<CoefficientProfile>,
    pub objective_value: f64,
    pub objective_kind: ObjectiveKind,
    pub iterations: usize,
    pub converged: bool,
    /// `1 - objective / objective(linear)`; `None` when `n < 2`.
    pub improvement_vs_linear: Option<f64>,
    /// Objective value of the linear profile, when defined.
    pub linear_value: Option<f64>,
}

/// Symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.size();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
        }
        for (i, &e) in self.off.iter().enumerate() {
            m[(i, i + 1)] = e;
            m[(i + 1, i)] = e;
        }
        m
    }

    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let mut acc: f64 = self.diag.iter().zip(v).map(|(d, x)| d * x * x).sum();
        for (i, &e) in self.off.iter().enumerate() {
            acc += 2.0 * e * v[i] * v[i + 1];
        }
        acc
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.size();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.size() {
            let coupling = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            q = self.diag[i] - x - if i == 0 { 0.0 } else { coupling / q };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Solves `(T - shift I) y = rhs` by Gaussian elimination without pivoting.
    fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.size();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut denom = self.diag[0] - shift;
        c[0] = if n > 1 { self.off[0] / denom } else { 0.0 };
        d[0] = rhs[0] / denom;
        for i in 1..n {
            denom = self.diag[i] - shift - self.off[i - 1] * c[i - 1];
            if i + 1 < n {
                c[i] = self.off[i] / denom;
            }
            d[i] = (rhs[i] - self.off[i - 1] * d[i - 1]) / denom;
        }
        let mut y = vec![0.0; n];
        y[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            y[i] = d[i] - c[i] * y[i + 1];
        }
        y
    }
}

/// Smallest eigenvalue and unit eigenvector, plus the number of bisection
/// steps taken.
pub fn smallest_eigenpair(t: &SymTridiagonal) -> Result<(f64, Vec<f64>, usize)> {
    let n = t.size();
    if n == 0 || t.off.len() + 1 != n {
        return Err(Error::Eigensolver("malformed tridiagonal matrix".into()));
    }
    if n == 1 {
        return Ok((t.diag[0], vec![1.0], 0));
    }
    let (mut lo, mut hi) = t.gershgorin();
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let mut steps = 0;
    while hi - lo > 2.0 * f64::EPSILON * scale && steps < 200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if t.count_below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        steps += 1;
    }
    let lambda = 0.5 * (lo + hi);

    // Inverse iteration just below the eigenvalue keeps T - shift positive definite.
    let shift = lo - 1e-10 * scale;
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 1e-3 * i as f64 / n as f64).collect();
    for _ in 0..6 {
        let y = t.solve_shifted(shift, &v);
        let norm = y.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::Eigensolver("inverse iteration broke down".into()));
        }
        v = y.into_iter().map(|x| x / norm).collect();
    }
    Ok((lambda, v, steps))
}

/// Matrix of the discrete objective `sum_{k=0}^{n+1} (f(k) - f(k-1))²` with
/// `f(-1) = f(n+1) = 0`: diagonal 2, off-diagonal -1, size `n+1`.
pub fn second_order_matrix(n: usize) -> SymTridiagonal {
    SymTridiagonal {
        diag: vec![2.0; n + 1],
        off: vec![-1.0; n],
    }
}

/// Ground state of [`second_order_matrix`].
pub fn optimize_second_order(n: usize) -> Result<OptimizationResult> {
    if n < 1 {
        return Err(Error::Config("n must be >= 1".into()));
    }
    let (lambda, mut v, steps) = smallest_eigenpair(&second_order_matrix(n))?;
    if v.iter().sum::<f64>() < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let profile = CoefficientProfile::normalized(v, ProfileKind::Optimized)?;
    let objective = lambda / 6.0;
    let linear_value = (n >= 2)
        .then(|| CoefficientProfile::linear(n).map(|l| average_error_second_order(&l)))
        .transpose()?;
    Ok(OptimizationResult {
        profile,
        profile2: None,
        objective_value: objective,
        objective_kind: ObjectiveKind::SecondOrder,
        iterations: steps,
        converged: true,
        improvement_vs_linear: linear_value.map(|l| 1.0 - objective / l),
        linear_value,
    })
}

/// Second-order optimum over profiles that vanish at `j = 0` and `j = n`,
/// the same support as the linear profile. The optimum is `sin(π j / n)`.
pub fn optimize_second_order_pinned(n: usize) -> Result<OptimizationResult> {
    if n < 2 {
        return Err(Error::Config("pinned endpoints need n >= 2".into()));
    }
    let (lambda, mut interior, steps) = smallest_eigenpair(&second_order_matrix(n - 2))?;
    if interior.iter().sum::<f64>() < 0.0 {
        interior.iter_mut().for_each(|x| *x = -*x);
    }
    let mut coeffs = vec![0.0];
    coeffs.extend(interior);
    coeffs.push(0.0);
    let profile = CoefficientProfile::normalized(coeffs, ProfileKind::Optimized)?;
    let objective = lambda / 6.0;
    let linear_value = average_error_second_order(&CoefficientProfile::linear(n)?);
    Ok(OptimizationResult {
        profile,
        profile2: None,
        objective_value: objective,
        objective_kind: ObjectiveKind::SecondOrder,
        iterations: steps,
        converged: true,
        improvement_vs_linear: Some(1.0 - objective / linear_value),
        linear_value: Some(linear_value),
    })
}

/// Settings for [`optimize_exact_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExactOptions {
    pub max_iterations: usize,
    /// Central-difference step for the gradient.
    pub fd_step: f64,
    pub armijo: f64,
    pub initial_step: f64,
    /// Converged when the objective improves by less than `rel_tol` (relative)
    /// over this many iterations.
    pub stall_window: usize,
    pub rel_tol: f64,
    /// Seeded random starts in addition to linear, sine and uniform.
    pub perturbed_starts: usize,
    /// Restrict coefficients to `f >= 0`.
    pub nonnegative: bool,
    /// For the two-qubit gate, optimize the two registers' profiles separately.
    pub independent_registers: bool,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
            fd_step: 1e-6,
            armijo: 1e-4,
            initial_step: 1.0,
            stall_window: 50,
            rel_tol: 1e-10,
            perturbed_starts: 3,
            nonnegative: true,
            independent_registers: false,
        }
    }
}

pub fn optimize_exact(n: usize, e: &InputEnsemble, kind: GateKind, seed: u64) -> Result<OptimizationResult> {
    optimize_exact_with(n, e, kind, seed, &ExactOptions::default())
}

struct Problem<'a> {
    n: usize,
    ensemble: &'a InputEnsemble,
    kind: GateKind,
    blocks: usize,
    nonnegative: bool,
}

impl Problem<'_> {
    fn block_len(&self) -> usize {
        self.n + 1
    }

    fn profiles(&self, x: &[f64]) -> Result<Vec<CoefficientProfile>> {
        x.chunks(self.block_len())
            .map(|c| CoefficientProfile::normalized(c.to_vec(), ProfileKind::Optimized))
            .collect()
    }

    fn objective(&self, x: &[f64]) -> Result<f64> {
        let profiles = self.profiles(x)?;
        match self.kind {
            GateKind::Single => average_error_exact(&profiles[0], self.ensemble),
            GateKind::Cz => {
                let second = profiles.get(1).unwrap_or(&profiles[0]);
                cz_average_error_exact(&profiles[0], second, self.ensemble)
            }
        }
    }

    /// Clamp (when restricted) and renormalize every block.
    fn project(&self, x: &mut [f64]) -> bool {
        let len = self.block_len();
        for block in x.chunks_mut(len) {
            if self.nonnegative {
                block.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            let norm = block.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 || !norm.is_finite() {
                return false;
            }
            block.iter_mut().for_each(|v| *v /= norm);
        }
        true
    }

    fn gradient(&self, x: &[f64], h: f64) -> Result<Vec<f64>> {
        let mut g = vec![0.0; x.len()];
        let mut probe = x.to_vec();
        for i in 0..x.len() {
            probe[i] = x[i] + h;
            let up = self.objective(&probe)?;
            probe[i] = x[i] - h;
            let down = self.objective(&probe)?;
            probe[i] = x[i];
            g[i] = (up - down) / (2.0 * h);
        }
        Ok(g)
    }
}

struct Descent {
    x: Vec<f64>,
    value: f64,
    iterations: usize,
    converged: bool,
}

fn descend(problem: &Problem<'_>, start: Vec<f64>, opts: &ExactOptions) -> Result<Descent> {
    let mut x = start;
    if !problem.project(&mut x) {
        return Err(Error::InvalidProfile("start point projects to zero".into()));
    }
    let mut value = problem.objective(&x)?;
    let mut history = vec![value];
    let mut step = opts.initial_step;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        iterations += 1;
        let g = problem.gradient(&x, opts.fd_step)?;
        let mut accepted = None;
        while step > 1e-14 {
            let mut candidate: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - step * gi).collect();
            if problem.project(&mut candidate) {
                let decrease: f64 = g.iter().zip(candidate.iter().zip(&x)).map(|(gi, (c, xi))| gi * (c - xi)).sum();
                let cand_value = problem.objective(&candidate)?;
                if cand_value <= value + opts.armijo * decrease {
                    accepted = Some((candidate, cand_value));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((candidate, cand_value)) = accepted else {
            // No descent direction left at working precision.
            converged = true;
            break;
        };
        x = candidate;
        value = cand_value;
        history.push(value);
        step = (2.0 * step).min(1e3);

        if value == 0.0 {
            converged = true;
            break;
        }
        if history.len() > opts.stall_window {
            let past = history[history.len() - 1 - opts.stall_window];
            if (past - value) <= opts.rel_tol * value.abs() {
                converged = true;
                break;
            }
        }
    }
    Ok(Descent {
        x,
        value,
        iterations,
        converged,
    })
}

/// Multi-start projected gradient descent on the exact averaged error.
pub fn optimize_exact_with(
    n: usize,
    e: &InputEnsemble,
    kind: GateKind,
    seed: u64,
    opts: &ExactOptions,
) -> Result<OptimizationResult> {
    if n < 2 {
        return Err(Error::Config("exact optimization needs n >= 2".into()));
    }
    let blocks = if kind == GateKind::Cz && opts.independent_registers { 2 } else { 1 };
    let problem = Problem {
        n,
        ensemble: e,
        kind,
        blocks,
        nonnegative: opts.nonnegative,
    };

    let linear = CoefficientProfile::linear(n)?;
    let sine = CoefficientProfile::sine(n)?;
    let uniform = CoefficientProfile::uniform(n)?;
    let mut starts: Vec<Vec<f64>> = [&linear, &sine, &uniform]
        .iter()
        .map(|p| p.coeffs().repeat(problem.blocks))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for s in 0..opts.perturbed_starts {
        let base = if s % 2 == 0 { &sine } else { &uniform };
        let amplitude = 0.5 * base.coeffs().iter().cloned().fold(0.0, f64::max);
        let mut x = base.coeffs().repeat(problem.blocks);
        for v in &mut x {
            *v += amplitude * rng.random_range(-1.0..1.0);
            if opts.nonnegative {
                *v = v.abs();
            }
        }
        starts.push(x);
    }

    let mut best: Option<Descent> = None;
    let mut total_iterations = 0;
    for start in starts {
        let run = descend(&problem, start, opts)?;
        debug!("start finished at {:e} after {} iterations", run.value, run.iterations);
        total_iterations += run.iterations;
        let better = match &best {
            None => true,
            Some(b) => {
                run.value < b.value
                    || (run.value == b.value
                        && run.x.partial_cmp(&b.x) == Some(std::cmp::Ordering::Less))
            }
        };
        if better {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start");

    let mut profiles = problem.profiles(&best.x)?.into_iter();
    let profile = profiles.next().expect("one block");
    let profile2 = profiles.next();
    let linear_value = problem.objective(&linear.coeffs().repeat(problem.blocks))?;
    let objective_kind = match kind {
        GateKind::Single => ObjectiveKind::ExactSingle,
        GateKind::Cz => ObjectiveKind::ExactCz,
    };
    Ok(OptimizationResult {
        profile,
        profile2,
        objective_value: best.value,
        objective_kind,
        iterations: total_iterations,
        converged: best.converged,
        improvement_vs_linear: Some(1.0 - best.value / linear_value),
        linear_value: Some(linear_value),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn matrix_for_single_photon() {
        let m = second_order_matrix(1).to_dense();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0]));
        let (lambda, v, _) = smallest_eigenpair(&second_order_matrix(1)).unwrap();
        assert!((lambda - 1.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v[0].abs() - h).abs() < 1e-12 && (v[1].abs() - h).abs() < 1e-12);
    }

    #[test]
    fn quadratic_form_matches_difference_sum() {
        let p = CoefficientProfile::custom(vec![0.3, -0.1, 0.7, 0.2]).unwrap();
        let q = second_order_matrix(3).quadratic_form(p.coeffs());
        assert!((q / 6.0 - average_error_second_order(&p)).abs() < 1e-15);
    }

    #[test]
    fn eigenvalue_matches_closed_form_and_dense_solver() {
        for n in [1usize, 2, 5, 17, 64] {
            let t = second_order_matrix(n);
            let (lambda, v, _) = smallest_eigenpair(&t).unwrap();
            let closed = 2.0 * (1.0 - (PI / (n + 2) as f64).cos());
            assert!((lambda - closed).abs() < 1e-13, "n = {n}");
            let dense = t.to_dense().symmetric_eigenvalues();
            let min = dense.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!((lambda - min).abs() < 1e-12);
            // residual of the eigenvector
            let tv = t.to_dense() * nalgebra::DVector::from_column_slice(&v);
            let r = tv.iter().zip(&v).map(|(a, b)| (a - lambda * b).abs()).fold(0.0, f64::max);
            assert!(r < 1e-12, "n = {n}, residual {r}");
        }
    }

    #[test]
    fn second_order_optimum_is_sine() {
        for n in [1usize, 2, 9, 50] {
            let r = optimize_second_order(n).unwrap();
            let sine = CoefficientProfile::sine(n).unwrap();
            for (a, b) in r.profile.coeffs().iter().zip(sine.coeffs()) {
                assert!((a - b).abs() < 1e-9, "n = {n}");
            }
            assert_eq!(r.profile.kind(), ProfileKind::Optimized);
        }
        let r = optimize_second_order(1).unwrap();
        assert!(r.improvement_vs_linear.is_none());
        let uniform = CoefficientProfile::uniform(1).unwrap();
        for (a, b) in r.profile.coeffs().iter().zip(uniform.coeffs()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn second_order_optimum_is_symmetric() {
        for n in 1..30 {
            let f = optimize_second_order(n).unwrap().profile;
            for j in 0..=n as i64 {
                assert!((f.f(j) - f.f(n as i64 - j)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn pinned_optimum_is_shifted_sine() {
        let n = 12;
        let r = optimize_second_order_pinned(n).unwrap();
        let raw: Vec<f64> = (0..=n).map(|j| (PI * j as f64 / n as f64).sin()).collect();
        let expected = CoefficientProfile::custom(raw).unwrap();
        for (a, b) in r.profile.coeffs().iter().zip(expected.coeffs()) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!((r.objective_value - average_error_second_order(&r.profile)).abs() < 1e-14);
        // n = 2 leaves one free coefficient: the linear profile itself.
        assert!(optimize_second_order_pinned(2).unwrap().improvement_vs_linear.unwrap().abs() < 1e-12);
    }

    #[test]
    fn exact_single_small_n() {
        let e = InputEnsemble::uniform_p0().with_order(8);
        let r = optimize_exact(3, &e, GateKind::Single, 1).unwrap();
        assert!(r.converged);
        let sine = average_error_exact(&CoefficientProfile::sine(3).unwrap(), &e).unwrap();
        assert!(r.objective_value <= sine + 1e-12);
        assert!((r.objective_value - sine).abs() < 1e-9);
    }

    #[test]
    fn exact_rejects_tiny_n() {
        let e = InputEnsemble::uniform_p0();
        assert!(optimize_exact(1, &e, GateKind::Single, 0).is_err());
    }
}
