//! Exact Fock-space state algebra over a fixed set of optical modes.
//!
//! States are sparse maps from occupation vectors to complex amplitudes. A
//! linear-optical mode transformation `a_l† -> sum_p u[p][l] a_p†` is lifted to
//! multi-photon states by expanding the creation-operator polynomial of every
//! basis term, which is exact and cheap for the handful of modes and photons
//! used by the teleportation gates.

use std::collections::{BTreeMap, HashMap};
use std::collections::hash_map::Entry;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Amplitudes below this magnitude are dropped from stored states.
pub const DEFAULT_PRUNE_THRESHOLD: f64 = 1e-14;
/// Largest number of basis terms any single operation may produce.
pub const DEFAULT_BASIS_CAP: usize = 10_000_000;
/// Measurement outcomes at or below this probability are not reported.
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-14;

const UNITARITY_TOL: f64 = 1e-12;

/// Resource limits applied by the state operations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub prune_threshold: f64,
    pub basis_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            prune_threshold: DEFAULT_PRUNE_THRESHOLD,
            basis_cap: DEFAULT_BASIS_CAP,
        }
    }
}

/// Photon count in every mode; the label of a Fock basis vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OccupationVector(Vec<u8>);

impl OccupationVector {
    pub fn new(counts: Vec<u8>) -> Self {
        Self(counts)
    }

    pub fn vacuum(modes: usize) -> Self {
        Self(vec![0; modes])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total photon number.
    pub fn total(&self) -> usize {
        self.0.iter().map(|&c| c as usize).sum()
    }

    pub fn counts(&self) -> &[u8] {
        &self.0
    }

    pub fn get(&self, mode: usize) -> u8 {
        self.0[mode]
    }

    /// Entries on `modes`, in the listed order.
    pub fn restrict(&self, modes: &[usize]) -> Self {
        Self(modes.iter().map(|&m| self.0[m]).collect())
    }

    /// Entries on every mode where `keep[mode]` is true.
    fn select(&self, keep: &[bool]) -> Self {
        Self(
            self.0
                .iter()
                .zip(keep)
                .filter_map(|(&c, &k)| k.then_some(c))
                .collect(),
        )
    }

    fn concat(&self, other: &Self) -> Self {
        let mut counts = Vec::with_capacity(self.len() + other.len());
        counts.extend_from_slice(&self.0);
        counts.extend_from_slice(&other.0);
        Self(counts)
    }
}

impl From<Vec<u8>> for OccupationVector {
    fn from(counts: Vec<u8>) -> Self {
        Self(counts)
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Sparse superposition of Fock basis states on a fixed number of modes.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    modes: usize,
    amplitudes: BTreeMap<OccupationVector, Complex64>,
}

/// One photon-number measurement result.
#[derive(Debug, Clone)]
pub struct Measurement {
    /// Counts on the measured modes, in the order they were listed.
    pub pattern: OccupationVector,
    pub probability: f64,
    /// Normalized state of the unmeasured modes, original order preserved.
    pub post_state: FockState,
}

/// Result of splitting a state across a bipartition of its modes.
#[derive(Debug, Clone)]
pub struct Bipartition {
    /// Normalized state of the selected modes.
    pub part: FockState,
    /// Normalized state of the complement. Its largest amplitude is real and
    /// positive, so the global phase lives in `part`.
    pub rest: FockState,
    /// Max-abs amplitude left over after removing the best product
    /// approximation; zero for an exact product state.
    pub deviation: f64,
}

impl FockState {
    /// Builds a state from explicit terms, summing repeated keys. The result is
    /// not renormalized.
    pub fn from_terms<I>(modes: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (OccupationVector, Complex64)>,
    {
        let mut amplitudes = BTreeMap::new();
        for (occ, amp) in terms {
            if occ.len() != modes {
                return Err(Error::DimensionMismatch {
                    expected: modes,
                    found: occ.len(),
                });
            }
            *amplitudes.entry(occ).or_insert(Complex64::new(0.0, 0.0)) += amp;
        }
        let mut state = Self { modes, amplitudes };
        state.prune(DEFAULT_PRUNE_THRESHOLD);
        Ok(state)
    }

    /// Like [`FockState::from_terms`] but rescales to unit norm.
    pub fn normalized_from_terms<I>(modes: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (OccupationVector, Complex64)>,
    {
        let mut state = Self::from_terms(modes, terms)?;
        state.normalize()?;
        Ok(state)
    }

    pub fn basis(occupation: OccupationVector) -> Self {
        let modes = occupation.len();
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(occupation, Complex64::new(1.0, 0.0));
        Self { modes, amplitudes }
    }

    pub fn vacuum(modes: usize) -> Self {
        Self::basis(OccupationVector::vacuum(modes))
    }

    pub fn mode_count(&self) -> usize {
        self.modes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitude(&self, occupation: &OccupationVector) -> Complex64 {
        self.amplitudes
            .get(occupation)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Terms in canonical (lexicographic) order.
    pub fn iter(&self) -> impl Iterator<Item = (&OccupationVector, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero state".into()));
        }
        for amp in self.amplitudes.values_mut() {
            *amp /= norm;
        }
        Ok(())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for amp in out.amplitudes.values_mut() {
            *amp *= factor;
        }
        out
    }

    fn prune(&mut self, threshold: f64) {
        self.amplitudes.retain(|_, a| a.norm() >= threshold);
    }

    fn check_modes(&self, modes: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.modes];
        for &m in modes {
            if m >= self.modes {
                return Err(Error::ModeOutOfRange {
                    mode: m,
                    modes: self.modes,
                });
            }
            if seen[m] {
                return Err(Error::DuplicateMode(m));
            }
            seen[m] = true;
        }
        Ok(())
    }

    /// Tensor product `self ⊗ other`; modes of `other` are appended.
    pub fn tensor(&self, other: &FockState) -> Result<FockState> {
        self.tensor_with(other, &Limits::default())
    }

    pub fn tensor_with(&self, other: &FockState, limits: &Limits) -> Result<FockState> {
        let size = self.len().saturating_mul(other.len());
        if size > limits.basis_cap {
            return Err(Error::BasisCapExceeded {
                size,
                cap: limits.basis_cap,
            });
        }
        let mut amplitudes = BTreeMap::new();
        for (a, x) in &self.amplitudes {
            for (b, y) in &other.amplitudes {
                amplitudes.insert(a.concat(b), x * y);
            }
        }
        let mut out = FockState {
            modes: self.modes + other.modes,
            amplitudes,
        };
        out.prune(limits.prune_threshold);
        Ok(out)
    }

    /// Reorders modes: mode `i` of the result is mode `order[i]` of `self`.
    pub fn permute_modes(&self, order: &[usize]) -> Result<FockState> {
        if order.len() != self.modes {
            return Err(Error::DimensionMismatch {
                expected: self.modes,
                found: order.len(),
            });
        }
        self.check_modes(order)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .map(|(occ, &a)| (occ.restrict(order), a))
            .collect();
        Ok(FockState {
            modes: self.modes,
            amplitudes,
        })
    }

    /// Applies a passive linear-optical transformation to the listed modes.
    /// `modes[l]` plays the role of column/row `l` of `u`.
    pub fn apply_mode_unitary(&self, u: &ModeUnitary, modes: &[usize]) -> Result<FockState> {
        self.apply_mode_unitary_with(u, modes, &Limits::default())
    }

    pub fn apply_mode_unitary_with(
        &self,
        u: &ModeUnitary,
        modes: &[usize],
        limits: &Limits,
    ) -> Result<FockState> {
        if modes.len() != u.dimension() {
            return Err(Error::DimensionMismatch {
                expected: u.dimension(),
                found: modes.len(),
            });
        }
        self.check_modes(modes)?;

        let mut expansions: HashMap<Vec<u8>, Vec<(Vec<u8>, Complex64)>> = HashMap::new();
        let mut amplitudes: BTreeMap<OccupationVector, Complex64> = BTreeMap::new();
        for (occ, &amp) in &self.amplitudes {
            let sub: Vec<u8> = modes.iter().map(|&m| occ.get(m)).collect();
            let expansion = match expansions.entry(sub) {
                Entry::Occupied(e) => e.into_mut(),
                Entry::Vacant(e) => {
                    let expanded = expand_creation_product(u, e.key(), limits.basis_cap)?;
                    e.insert(expanded)
                }
            };
            for (out_sub, coeff) in expansion.iter() {
                let mut counts = occ.counts().to_vec();
                for (&m, &c) in modes.iter().zip(out_sub) {
                    counts[m] = c;
                }
                *amplitudes
                    .entry(OccupationVector(counts))
                    .or_insert(Complex64::new(0.0, 0.0)) += amp * coeff;
            }
            if amplitudes.len() > limits.basis_cap {
                return Err(Error::BasisCapExceeded {
                    size: amplitudes.len(),
                    cap: limits.basis_cap,
                });
            }
        }
        let mut out = FockState {
            modes: self.modes,
            amplitudes,
        };
        out.prune(limits.prune_threshold);
        Ok(out)
    }

    /// Multiplies the amplitude of every term by `exp(i * phase * n_mode)`.
    pub fn phase_shift(&self, mode: usize, phase: f64) -> Result<FockState> {
        self.check_modes(&[mode])?;
        let amplitudes = self
            .amplitudes
            .iter()
            .map(|(occ, &a)| {
                let n = occ.get(mode) as f64;
                (occ.clone(), a * Complex64::from_polar(1.0, phase * n))
            })
            .collect();
        Ok(FockState {
            modes: self.modes,
            amplitudes,
        })
    }

    /// Moves the contents of `modes[i]` to `modes[i + 1]`, wrapping the last
    /// listed mode around to the first.
    pub fn cyclic_shift(&self, modes: &[usize]) -> Result<FockState> {
        self.check_modes(modes)?;
        let len = modes.len();
        let amplitudes = self
            .amplitudes
            .iter()
            .map(|(occ, &a)| {
                let mut counts = occ.counts().to_vec();
                for i in 0..len {
                    counts[modes[(i + 1) % len]] = occ.get(modes[i]);
                }
                (OccupationVector(counts), a)
            })
            .collect();
        Ok(FockState {
            modes: self.modes,
            amplitudes,
        })
    }

    /// Projective photon-number measurement of `modes`. Outcomes come back in
    /// lexicographic pattern order.
    pub fn measure(&self, modes: &[usize]) -> Result<Vec<Measurement>> {
        self.check_modes(modes)?;
        let mut measured = vec![false; self.modes];
        for &m in modes {
            measured[m] = true;
        }
        let keep: Vec<bool> = measured.iter().map(|&m| !m).collect();
        let remaining = self.modes - modes.len();

        let mut groups: BTreeMap<OccupationVector, Vec<(OccupationVector, Complex64)>> =
            BTreeMap::new();
        for (occ, &a) in &self.amplitudes {
            groups
                .entry(occ.restrict(modes))
                .or_default()
                .push((occ.select(&keep), a));
        }

        let mut outcomes = Vec::with_capacity(groups.len());
        for (pattern, terms) in groups {
            let probability: f64 = terms.iter().map(|(_, a)| a.norm_sqr()).sum();
            if probability <= MIN_OUTCOME_PROBABILITY {
                continue;
            }
            let post_state = FockState::normalized_from_terms(remaining, terms)?;
            outcomes.push(Measurement {
                pattern,
                probability,
                post_state,
            });
        }
        Ok(outcomes)
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &FockState) -> Result<Complex64> {
        if self.modes != other.modes {
            return Err(Error::DimensionMismatch {
                expected: self.modes,
                found: other.modes,
            });
        }
        let (small, large, conj_small) = if self.len() <= other.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (occ, a) in &small.amplitudes {
            if let Some(b) = large.amplitudes.get(occ) {
                acc += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        Ok(acc)
    }

    /// Max-abs amplitude difference.
    pub fn distance(&self, other: &FockState) -> Result<f64> {
        if self.modes != other.modes {
            return Err(Error::DimensionMismatch {
                expected: self.modes,
                found: other.modes,
            });
        }
        let mut worst: f64 = 0.0;
        for (occ, a) in &self.amplitudes {
            worst = worst.max((a - other.amplitude(occ)).norm());
        }
        for (occ, b) in &other.amplitudes {
            if !self.amplitudes.contains_key(occ) {
                worst = worst.max(b.norm());
            }
        }
        Ok(worst)
    }

    /// Max-abs amplitude difference after aligning the global phase of
    /// `other` to `self`.
    pub fn distance_up_to_phase(&self, other: &FockState) -> Result<f64> {
        let overlap = other.inner(self)?;
        let aligned = if overlap.norm() > 0.0 {
            other.scale(overlap / overlap.norm())
        } else {
            other.clone()
        };
        self.distance(&aligned)
    }

    /// Partial trace over every mode not listed in `keep`. The basis of the
    /// result is the set of occupations of `keep` present in the state.
    pub fn reduced_density_matrix(&self, keep: &[usize], basis_cap: usize) -> Result<DensityMatrix> {
        self.check_modes(keep)?;
        let mut kept = vec![false; self.modes];
        for &m in keep {
            kept[m] = true;
        }
        let traced: Vec<bool> = kept.iter().map(|&k| !k).collect();

        let mut basis: BTreeMap<OccupationVector, usize> = BTreeMap::new();
        for occ in self.amplitudes.keys() {
            let label = occ.restrict(keep);
            let next = basis.len();
            basis.entry(label).or_insert(next);
            if basis.len() > basis_cap {
                return Err(Error::BasisCapExceeded {
                    size: basis.len(),
                    cap: basis_cap,
                });
            }
        }
        // Renumber in canonical order.
        let labels: Vec<OccupationVector> = basis.keys().cloned().collect();
        let index: BTreeMap<&OccupationVector, usize> =
            labels.iter().enumerate().map(|(i, l)| (l, i)).collect();

        let mut environments: BTreeMap<OccupationVector, Vec<(usize, Complex64)>> = BTreeMap::new();
        for (occ, &a) in &self.amplitudes {
            let i = index[&occ.restrict(keep)];
            environments.entry(occ.select(&traced)).or_default().push((i, a));
        }

        let dim = labels.len();
        let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
        for terms in environments.values() {
            for &(i, a) in terms {
                for &(j, b) in terms {
                    rho[(i, j)] += a * b.conj();
                }
            }
        }
        Ok(DensityMatrix { basis: labels, rho })
    }

    /// Splits the state across `part` and its complement, reporting how far it
    /// is from a product state.
    pub fn bipartition(&self, part: &[usize]) -> Result<Bipartition> {
        self.check_modes(part)?;
        let mut in_part = vec![false; self.modes];
        for &m in part {
            in_part[m] = true;
        }
        let complement: Vec<usize> = (0..self.modes).filter(|&m| !in_part[m]).collect();

        // Columns indexed by the complement occupation.
        let mut columns: BTreeMap<OccupationVector, BTreeMap<OccupationVector, Complex64>> =
            BTreeMap::new();
        for (occ, &a) in &self.amplitudes {
            columns
                .entry(occ.restrict(&complement))
                .or_default()
                .insert(occ.restrict(part), a);
        }
        if columns.is_empty() {
            return Err(Error::InvalidState("cannot split an empty state".into()));
        }
        let column_norm =
            |c: &BTreeMap<OccupationVector, Complex64>| c.values().map(|a| a.norm_sqr()).sum::<f64>();

        // Reference column: largest norm, first in canonical order on ties.
        let mut best_norm = -1.0;
        let mut reference = None;
        for col in columns.values() {
            let norm = column_norm(col);
            if norm > best_norm * (1.0 + 1e-12) {
                best_norm = norm;
                reference = Some(col);
            }
        }
        let reference = reference.expect("non-empty columns");
        let ref_norm = best_norm.sqrt();
        let unit: BTreeMap<OccupationVector, Complex64> = reference
            .iter()
            .map(|(k, &a)| (k.clone(), a / ref_norm))
            .collect();

        let mut deviation: f64 = 0.0;
        let mut rest_terms = Vec::with_capacity(columns.len());
        for (label, col) in &columns {
            let coeff: Complex64 = unit
                .iter()
                .map(|(k, u)| u.conj() * col.get(k).copied().unwrap_or_default())
                .sum();
            for (k, u) in &unit {
                let actual = col.get(k).copied().unwrap_or_default();
                deviation = deviation.max((actual - coeff * u).norm());
            }
            for (k, &a) in col {
                if !unit.contains_key(k) {
                    deviation = deviation.max(a.norm());
                }
            }
            rest_terms.push((label.clone(), coeff));
        }

        // Largest complement amplitude made real positive.
        let mut lead = Complex64::new(0.0, 0.0);
        for (_, c) in &rest_terms {
            if c.norm() > lead.norm() * (1.0 + 1e-12) {
                lead = *c;
            }
        }
        let phase = if lead.norm() > 0.0 {
            lead / lead.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let rest = FockState::normalized_from_terms(
            complement.len(),
            rest_terms.into_iter().map(|(k, c)| (k, c * phase.conj())),
        )?;
        let part_state = FockState::normalized_from_terms(
            part.len(),
            unit.into_iter().map(|(k, u)| (k, u * phase)),
        )?;
        Ok(Bipartition {
            part: part_state,
            rest,
            deviation,
        })
    }
}

/// Expands `prod_l (sum_p u[p][l] a_p†)^{s_l} / sqrt(s_l!)` acting on vacuum
/// into normalized Fock basis terms.
fn expand_creation_product(u: &ModeUnitary, input: &[u8], cap: usize) -> Result<Vec<(Vec<u8>, Complex64)>> {
    let m = u.dimension();
    let photons: usize = input.iter().map(|&c| c as usize).sum();
    let size = monomial_count(m, photons);
    if size > cap as f64 {
        return Err(Error::BasisCapExceeded {
            size: size.min(usize::MAX as f64) as usize,
            cap,
        });
    }
    let mut poly: BTreeMap<Vec<u8>, Complex64> = BTreeMap::new();
    poly.insert(vec![0; m], Complex64::new(1.0, 0.0));
    for (l, &count) in input.iter().enumerate() {
        for _ in 0..count {
            let mut next: BTreeMap<Vec<u8>, Complex64> = BTreeMap::new();
            for (monomial, &c) in &poly {
                for p in 0..m {
                    let w = u.matrix[(p, l)];
                    if w.norm() == 0.0 {
                        continue;
                    }
                    let mut raised = monomial.clone();
                    raised[p] += 1;
                    *next.entry(raised).or_insert(Complex64::new(0.0, 0.0)) += c * w;
                }
            }
            poly = next;
        }
    }
    let input_norm: f64 = input.iter().map(|&s| factorial(s)).product::<f64>().sqrt();
    Ok(poly
        .into_iter()
        .map(|(monomial, c)| {
            let out_norm: f64 = monomial.iter().map(|&t| factorial(t)).product::<f64>().sqrt();
            (monomial, c * (out_norm / input_norm))
        })
        .filter(|(_, c)| c.norm() >= DEFAULT_PRUNE_THRESHOLD)
        .collect())
}

/// Number of ways to place `photons` bosons in `modes` modes, as a float.
fn monomial_count(modes: usize, photons: usize) -> f64 {
    (1..=photons).fold(1.0, |acc, i| acc * (modes + i - 1) as f64 / i as f64)
}

fn factorial(n: u8) -> f64 {
    (1..=n as u32).map(f64::from).product()
}

/// Single-particle transformation of `m` modes: `a_l† -> sum_p u[(p, l)] a_p†`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeUnitary {
    matrix: DMatrix<Complex64>,
}

impl ModeUnitary {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let product = &matrix * matrix.adjoint();
        let identity = DMatrix::<Complex64>::identity(matrix.nrows(), matrix.nrows());
        let deviation = (product - identity)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if deviation > UNITARITY_TOL {
            return Err(Error::NotUnitary(deviation));
        }
        Ok(Self { matrix })
    }

    pub fn identity(m: usize) -> Self {
        Self {
            matrix: DMatrix::identity(m, m),
        }
    }

    /// Discrete Fourier transform: entry `(p, l)` is `exp(2πi p l / m) / sqrt(m)`.
    pub fn dft(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Config("Fourier transform needs at least one mode".into()));
        }
        let scale = 1.0 / (m as f64).sqrt();
        let matrix = DMatrix::from_fn(m, m, |p, l| {
            // Reduce p*l mod m first so large indices keep full precision.
            let angle = 2.0 * std::f64::consts::PI * ((p * l) % m) as f64 / m as f64;
            Complex64::from_polar(scale, angle)
        });
        Ok(Self { matrix })
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }
}

/// Reduced density matrix over an explicit basis of occupations.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    basis: Vec<OccupationVector>,
    rho: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[OccupationVector] {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn trace(&self) -> f64 {
        self.rho.diagonal().iter().map(|z| z.re).sum()
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        // ρ is Hermitian, so Tr(ρ²) = sum |ρ_ij|².
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.rho - self.rho.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut values: Vec<f64> = self
            .rho
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        values.sort_by(f64::total_cmp);
        values
    }

    /// Checks Hermiticity (1e-12), unit trace (1e-10) and positivity (-1e-10).
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > 1e-12 {
            return Err(Error::InvalidState(format!("density matrix not Hermitian ({herm:e})")));
        }
        let trace = self.trace();
        if (trace - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("density matrix trace {trace}")));
        }
        if let Some(&min) = self.eigenvalues().first() {
            if min < -1e-10 {
                return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn occ(v: &[u8]) -> OccupationVector {
        OccupationVector::new(v.to_vec())
    }

    fn qubit(a0: f64, a1: f64) -> FockState {
        FockState::normalized_from_terms(1, [(occ(&[0]), c(a0, 0.0)), (occ(&[1]), c(a1, 0.0))]).unwrap()
    }

    #[test]
    fn tensor_of_basis_states() {
        let s = FockState::basis(occ(&[1])).tensor(&FockState::basis(occ(&[0]))).unwrap();
        assert_eq!(s.mode_count(), 2);
        assert_eq!(s.len(), 1);
        assert_eq!(s.amplitude(&occ(&[1, 0])), c(1.0, 0.0));
    }

    #[test]
    fn tensor_distributes() {
        let q = qubit(0.6, 0.8);
        let s = q.tensor(&FockState::basis(occ(&[1]))).unwrap();
        assert!((s.amplitude(&occ(&[0, 1])) - c(0.6, 0.0)).norm() < 1e-15);
        assert!((s.amplitude(&occ(&[1, 1])) - c(0.8, 0.0)).norm() < 1e-15);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn large_transform_is_refused_up_front() {
        let occ = OccupationVector::new((0..30).map(|i| u8::from(i < 15)).collect());
        let modes: Vec<usize> = (0..30).collect();
        let r = FockState::basis(occ).apply_mode_unitary(&ModeUnitary::dft(30).unwrap(), &modes);
        assert!(matches!(r, Err(Error::BasisCapExceeded { .. })));
    }

    #[test]
    fn tensor_respects_basis_cap() {
        let q = qubit(0.6, 0.8);
        let limits = Limits {
            basis_cap: 3,
            ..Limits::default()
        };
        assert!(matches!(
            q.tensor_with(&q, &limits),
            Err(Error::BasisCapExceeded { size: 4, cap: 3 })
        ));
    }

    #[test]
    fn dft_small_cases() {
        let one = ModeUnitary::dft(1).unwrap();
        assert!((one.matrix()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);

        let two = ModeUnitary::dft(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [[h, h], [h, -h]];
        for p in 0..2 {
            for l in 0..2 {
                assert!((two.matrix()[(p, l)] - c(expected[p][l], 0.0)).norm() < 1e-15);
            }
        }

        let four = ModeUnitary::dft(4).unwrap();
        let row = [c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.0, -0.5)];
        for l in 0..4 {
            assert!((four.matrix()[(1, l)] - row[l]).norm() < 1e-15);
        }
        assert!(ModeUnitary::dft(0).is_err());
    }

    #[test]
    fn dft_is_unitary() {
        for m in 1..=12 {
            let u = ModeUnitary::dft(m).unwrap();
            assert!(ModeUnitary::new(u.matrix().clone()).is_ok(), "m = {m}");
        }
    }

    #[test]
    fn non_unitary_rejected() {
        let m = DMatrix::from_element(2, 2, c(1.0, 0.0));
        assert!(matches!(ModeUnitary::new(m), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn identity_unitary_is_noop() {
        let s = FockState::normalized_from_terms(
            3,
            [(occ(&[1, 0, 2]), c(0.3, 0.1)), (occ(&[0, 1, 1]), c(-0.2, 0.5))],
        )
        .unwrap();
        let out = s.apply_mode_unitary(&ModeUnitary::identity(3), &[0, 1, 2]).unwrap();
        assert!(s.distance(&out).unwrap() < 1e-15);
    }

    #[test]
    fn single_photon_beamsplitter() {
        let s = FockState::basis(occ(&[1, 0]));
        let out = s.apply_mode_unitary(&ModeUnitary::dft(2).unwrap(), &[0, 1]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.amplitude(&occ(&[1, 0])) - c(h, 0.0)).norm() < 1e-15);
        assert!((out.amplitude(&occ(&[0, 1])) - c(h, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn hong_ou_mandel() {
        // (a0† + a1†)(a0† - a1†)/2 |0> = (a0†² - a1†²)/2 |0> = (|2,0> - |0,2>)/√2
        let s = FockState::basis(occ(&[1, 1]));
        let out = s.apply_mode_unitary(&ModeUnitary::dft(2).unwrap(), &[0, 1]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(out.len(), 2);
        assert!((out.amplitude(&occ(&[2, 0])) - c(h, 0.0)).norm() < 1e-14);
        assert!((out.amplitude(&occ(&[0, 2])) - c(-h, 0.0)).norm() < 1e-14);
        assert!(out.amplitude(&occ(&[1, 1])).norm() < 1e-14);
    }

    #[test]
    fn unitary_on_subset_leaves_other_modes() {
        let s = FockState::basis(occ(&[1, 3, 0]));
        let out = s.apply_mode_unitary(&ModeUnitary::dft(2).unwrap(), &[2, 0]).unwrap();
        for (o, _) in out.iter() {
            assert_eq!(o.get(1), 3);
            assert_eq!(o.get(0) + o.get(2), 1);
        }
    }

    #[test]
    fn unitary_mode_errors() {
        let s = FockState::vacuum(3);
        let u = ModeUnitary::dft(2).unwrap();
        assert!(matches!(
            s.apply_mode_unitary(&u, &[0, 3]),
            Err(Error::ModeOutOfRange { mode: 3, modes: 3 })
        ));
        assert!(matches!(s.apply_mode_unitary(&u, &[1, 1]), Err(Error::DuplicateMode(1))));
        assert!(matches!(
            s.apply_mode_unitary(&u, &[0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn phase_shift_cases() {
        let s = FockState::normalized_from_terms(
            2,
            [(occ(&[1, 0]), c(0.6, 0.0)), (occ(&[0, 2]), c(0.0, 0.8))],
        )
        .unwrap();
        assert!(s.distance(&s.phase_shift(0, 0.0).unwrap()).unwrap() < 1e-15);
        let full = s.phase_shift(1, 2.0 * std::f64::consts::PI).unwrap();
        assert!(s.distance(&full).unwrap() < 1e-12);
        let flipped = s.phase_shift(0, std::f64::consts::PI).unwrap();
        assert!((flipped.amplitude(&occ(&[1, 0])) - c(-0.6, 0.0)).norm() < 1e-15);
        assert!((flipped.amplitude(&occ(&[0, 2])) - c(0.0, 0.8)).norm() < 1e-15);
        assert!(s.phase_shift(2, 1.0).is_err());
    }

    #[test]
    fn cyclic_shift_cases() {
        let s = FockState::basis(occ(&[1, 0, 0]));
        assert_eq!(s.cyclic_shift(&[0, 1, 2]).unwrap(), FockState::basis(occ(&[0, 1, 0])));
        let s = FockState::basis(occ(&[0, 0, 2]));
        assert_eq!(s.cyclic_shift(&[0, 1, 2]).unwrap(), FockState::basis(occ(&[2, 0, 0])));

        let sup = FockState::normalized_from_terms(
            3,
            [(occ(&[1, 0, 0]), c(0.6, 0.0)), (occ(&[0, 1, 1]), c(0.0, 0.8))],
        )
        .unwrap();
        let shifted = sup.cyclic_shift(&[0, 1, 2]).unwrap();
        assert!((shifted.amplitude(&occ(&[0, 1, 0])) - c(0.6, 0.0)).norm() < 1e-15);
        assert!((shifted.amplitude(&occ(&[1, 0, 1])) - c(0.0, 0.8)).norm() < 1e-15);
        assert!(sup.cyclic_shift(&[0, 0]).is_err());
    }

    #[test]
    fn measurement_of_basis_state() {
        let s = FockState::basis(occ(&[2, 1, 0]));
        let out = s.measure(&[1]).unwrap();
        assert_eq!(out.len(), 1);
        assert!((out[0].probability - 1.0).abs() < 1e-15);
        assert_eq!(out[0].pattern, occ(&[1]));
        assert_eq!(out[0].post_state, FockState::basis(occ(&[2, 0])));
    }

    #[test]
    fn measurement_splits_superposition() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = FockState::from_terms(2, [(occ(&[0, 1]), c(h, 0.0)), (occ(&[1, 0]), c(h, 0.0))]).unwrap();
        let out = s.measure(&[0]).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].pattern, occ(&[0]));
        assert_eq!(out[1].pattern, occ(&[1]));
        for m in &out {
            assert!((m.probability - 0.5).abs() < 1e-15);
            assert!((m.post_state.norm_sqr() - 1.0).abs() < 1e-15);
        }
        assert_eq!(out[0].post_state, FockState::basis(occ(&[1])));
    }

    #[test]
    fn inner_product_cases() {
        let s = qubit(1.0, 1.0);
        assert!((s.inner(&s).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let zero = FockState::basis(occ(&[0]));
        let one = FockState::basis(occ(&[1]));
        assert_eq!(zero.inner(&one).unwrap(), c(0.0, 0.0));
        assert!((s.inner(&zero).unwrap() - c(std::f64::consts::FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        // conjugate-linear in the first argument
        let phased = zero.scale(c(0.0, 1.0));
        assert!((phased.inner(&zero).unwrap() - c(0.0, -1.0)).norm() < 1e-15);
        assert!(zero.inner(&FockState::vacuum(2)).is_err());
    }

    #[test]
    fn purity_of_product_and_bell() {
        let product = qubit(0.6, 0.8).tensor(&qubit(1.0, 2.0)).unwrap();
        let rho = product.reduced_density_matrix(&[0], 16).unwrap();
        rho.validate().unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-10);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = FockState::from_terms(2, [(occ(&[0, 1]), c(h, 0.0)), (occ(&[1, 0]), c(h, 0.0))]).unwrap();
        let rho = bell.reduced_density_matrix(&[0], 16).unwrap();
        rho.validate().unwrap();
        assert!((rho.purity() - 0.5).abs() < 1e-12);
        assert!(matches!(
            bell.reduced_density_matrix(&[0], 1),
            Err(Error::BasisCapExceeded { .. })
        ));
    }

    #[test]
    fn bipartition_of_product_state() {
        let a = FockState::normalized_from_terms(1, [(occ(&[0]), c(0.6, 0.0)), (occ(&[1]), c(0.0, 0.8))]).unwrap();
        let b = FockState::basis(occ(&[1, 0])).scale(c(0.0, -1.0));
        let joint = b.tensor(&a).unwrap();
        let split = joint.bipartition(&[2]).unwrap();
        assert!(split.deviation < 1e-15);
        assert_eq!(split.rest, FockState::basis(occ(&[1, 0])));
        assert!(split.part.distance(&a.scale(c(0.0, -1.0))).unwrap() < 1e-15);
    }

    #[test]
    fn bipartition_flags_entanglement() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = FockState::from_terms(2, [(occ(&[0, 1]), c(h, 0.0)), (occ(&[1, 0]), c(h, 0.0))]).unwrap();
        let split = bell.bipartition(&[0]).unwrap();
        assert!((split.deviation - h).abs() < 1e-12);
    }

    #[test]
    fn permute_modes_moves_counts() {
        let s = FockState::basis(occ(&[1, 2, 3]));
        let p = s.permute_modes(&[2, 0, 1]).unwrap();
        assert_eq!(p, FockState::basis(occ(&[3, 1, 2])));
        assert!(s.permute_modes(&[0, 0, 1]).is_err());
    }
}
