//! Spin sectors (one photon-number shell) and block-diagonal polarization
//! states.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::angmom::{wigner_big_d, HalfInt};
use crate::error::{Error, Result};
use crate::geometry::{Direction, EulerAngles};
use crate::CMatrix;

/// Default tolerance on Hermiticity, trace and negative eigenvalues.
pub const DEFAULT_VALIDATION_TOL: f64 = 1e-9;

/// Density matrix of a single shell with spin `S`, in the `|S, m⟩` basis
/// with `m` descending.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinSector {
    spin: HalfInt,
    rho: CMatrix,
}

/// Outcome of [`SpinSector::validate`].
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    /// `max |ρ_ij - conj(ρ_ji)|`.
    pub hermiticity_deviation: f64,
    /// `|Tr ρ - 1|`.
    pub trace_deviation: f64,
    /// Smallest eigenvalue of the Hermitian part.
    pub min_eigenvalue: f64,
    pub tol: f64,
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.passed() {
            Ok(())
        } else {
            Err(Error::Validation(self.failures.join("; ")))
        }
    }
}

impl SpinSector {
    /// Wraps a density matrix after validating it at the default tolerance.
    pub fn new(spin: HalfInt, rho: CMatrix) -> Result<Self> {
        let sector = Self::new_unchecked(spin, rho)?;
        sector.validate(DEFAULT_VALIDATION_TOL).into_result()?;
        Ok(sector)
    }

    /// Wraps a matrix checking only its shape.
    pub fn new_unchecked(spin: HalfInt, rho: CMatrix) -> Result<Self> {
        if spin.twice() < 0 {
            return Err(Error::invalid("spin must be non-negative"));
        }
        let d = spin.dim();
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::invalid(format!(
                "spin {spin} needs a {d}×{d} matrix, got {}×{}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        Ok(Self { spin, rho })
    }

    /// The maximally mixed shell `1/(2S+1)`.
    pub fn maximally_mixed(spin: HalfInt) -> Self {
        let d = spin.dim();
        Self { spin, rho: CMatrix::identity(d, d) / Complex64::from(d as f64) }
    }

    /// The Fock state `|S, m⟩⟨S, m|`.
    pub fn fock(spin: HalfInt, m: HalfInt) -> Result<Self> {
        spin.check_projection(m)?;
        let idx = spin.index_of(m).expect("checked projection");
        let d = spin.dim();
        let mut rho = CMatrix::zeros(d, d);
        rho[(idx, idx)] = Complex64::from(1.0);
        Ok(Self { spin, rho })
    }

    /// SU(2) coherent state pointing along `dir`: the `+S` eigenvector of
    /// `n·S`.
    pub fn coherent(spin: HalfInt, dir: Direction) -> Self {
        let amps = coherent_amplitudes(spin, dir);
        Self { spin, rho: outer(&amps) }
    }

    /// Diagonal state `Σ_m p_m |S, m⟩⟨S, m|`; probabilities ordered by
    /// descending `m`.
    pub fn diagonal(spin: HalfInt, probabilities: &[f64]) -> Result<Self> {
        let d = spin.dim();
        if probabilities.len() != d {
            return Err(Error::invalid(format!("spin {spin} needs {d} probabilities, got {}", probabilities.len())));
        }
        if let Some(p) = probabilities.iter().find(|p| **p < 0.0 || !p.is_finite()) {
            return Err(Error::invalid(format!("probability {p} is negative or not finite")));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > DEFAULT_VALIDATION_TOL {
            return Err(Error::invalid(format!("probabilities sum to {total}, not 1")));
        }
        let mut rho = CMatrix::zeros(d, d);
        for (i, p) in probabilities.iter().enumerate() {
            rho[(i, i)] = Complex64::from(*p);
        }
        Ok(Self { spin, rho })
    }

    /// Pure state `|ψ⟩⟨ψ|` from unnormalized amplitudes.
    pub fn pure(spin: HalfInt, amplitudes: &[Complex64]) -> Result<Self> {
        let d = spin.dim();
        if amplitudes.len() != d {
            return Err(Error::invalid(format!("spin {spin} needs {d} amplitudes, got {}", amplitudes.len())));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::invalid("amplitude vector is zero or not finite"));
        }
        let normalized: Vec<Complex64> = amplitudes.iter().map(|a| a / norm).collect();
        Ok(Self { spin, rho: outer(&normalized) })
    }

    pub fn spin(&self) -> HalfInt {
        self.spin
    }

    pub fn dim(&self) -> usize {
        self.spin.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> CMatrix {
        self.rho
    }

    pub fn validate(&self, tol: f64) -> ValidationReport {
        let d = self.dim();
        let mut herm: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                herm = herm.max((self.rho[(i, j)] - self.rho[(j, i)].conj()).norm());
            }
        }
        let trace_dev = (self.rho.trace() - Complex64::from(1.0)).norm();
        let min_eig = self.eigenvalues().first().copied().unwrap_or(0.0);

        let mut failures = Vec::new();
        if !herm.is_finite() || herm > tol {
            failures.push(format!("not Hermitian (deviation {herm:.3e})"));
        }
        if !trace_dev.is_finite() || trace_dev > tol {
            failures.push(format!("trace deviates from 1 by {trace_dev:.3e}"));
        }
        if !min_eig.is_finite() || min_eig < -tol {
            failures.push(format!("negative eigenvalue {min_eig:.3e}"));
        }
        ValidationReport {
            hermiticity_deviation: herm,
            trace_deviation: trace_dev,
            min_eigenvalue: min_eig,
            tol,
            failures,
        }
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = hermitian_eigen(&self.rho).0;
        v.sort_by(f64::total_cmp);
        v
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `D ρ D†` for the rotation `angles`.
    pub fn rotate(&self, angles: &EulerAngles) -> Self {
        let d = wigner_big_d(self.spin, angles).expect("sector spin is valid");
        let rho = &d * &self.rho * d.adjoint();
        Self { spin: self.spin, rho }
    }

    /// Expectation value `Tr[ρ A]`.
    pub fn expectation(&self, op: &CMatrix) -> Complex64 {
        let mut acc = Complex64::from(0.0);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                acc += self.rho[(i, j)] * op[(j, i)];
            }
        }
        acc
    }
}

/// Convex combination of sectors sharing the same spin.
pub fn mix(entries: &[(f64, SpinSector)]) -> Result<SpinSector> {
    let (_, first) = entries.first().ok_or_else(|| Error::invalid("nothing to mix"))?;
    let spin = first.spin;
    if let Some((_, s)) = entries.iter().find(|(_, s)| s.spin != spin) {
        return Err(Error::invalid(format!("cannot mix spin {} with spin {spin}", s.spin)));
    }
    if let Some((w, _)) = entries.iter().find(|(w, _)| *w < 0.0 || !w.is_finite()) {
        return Err(Error::invalid(format!("mixing weight {w} is negative or not finite")));
    }
    let total: f64 = entries.iter().map(|(w, _)| w).sum();
    if (total - 1.0).abs() > DEFAULT_VALIDATION_TOL {
        return Err(Error::invalid(format!("mixing weights sum to {total}, not 1")));
    }
    let d = spin.dim();
    let mut rho = CMatrix::zeros(d, d);
    for (w, s) in entries {
        rho += &s.rho * Complex64::from(*w);
    }
    Ok(SpinSector { spin, rho })
}

/// Amplitudes `C_m(θ, φ)` of the SU(2) coherent state along `dir`, with
/// `m` descending. They satisfy `(n·S)|θ,φ⟩ = S|θ,φ⟩`, so `θ = 0` is
/// `|S, S⟩`.
pub fn coherent_amplitudes(spin: HalfInt, dir: Direction) -> Vec<Complex64> {
    let two_s = spin.twice();
    let (s, c) = (dir.theta / 2.0).sin_cos();
    spin.projections()
        .map(|m| {
            let up = (two_s + m.twice()) / 2; // S + m
            let down = two_s - up; // S - m
            let mag = binomial(two_s as u32, up as u32).sqrt() * c.powi(up) * s.powi(down);
            Complex64::from_polar(mag, -(up as f64) * dir.phi)
        })
        .collect()
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

fn outer(v: &[Complex64]) -> CMatrix {
    CMatrix::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
}

/// Eigen-decomposition of the Hermitian part of `m`.
pub(crate) fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let herm = (m + m.adjoint()) * Complex64::from(0.5);
    let eig = SymmetricEigen::new(herm);
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// Haar-random pure state.
pub fn random_pure<R: Rng + ?Sized>(spin: HalfInt, rng: &mut R) -> SpinSector {
    let amps: Vec<Complex64> =
        (0..spin.dim()).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    SpinSector::pure(spin, &amps).expect("Gaussian vector is non-zero")
}

/// Random mixed state `G G† / Tr(G G†)` with `G` a complex Gaussian
/// `(2S+1) × rank` matrix.
pub fn random_mixed<R: Rng + ?Sized>(spin: HalfInt, rank: usize, rng: &mut R) -> SpinSector {
    let d = spin.dim();
    let g =
        CMatrix::from_fn(d, rank.max(1), |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let mut rho = &g * g.adjoint();
    let tr = rho.trace();
    rho /= tr;
    SpinSector { spin, rho }
}

/// Random rotation, uniform in the Haar measure of SO(3).
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> EulerAngles {
    let alpha = rng.gen_range(0.0..std::f64::consts::TAU);
    let gamma = rng.gen_range(0.0..std::f64::consts::TAU);
    let beta = rng.gen_range(-1.0f64..1.0).acos();
    EulerAngles { alpha, beta, gamma }
}

/// Random direction, uniform on the sphere.
pub fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> Direction {
    let theta = rng.gen_range(-1.0f64..1.0).acos();
    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
    Direction { theta, phi }
}

/// Block-diagonal polarization state `⊕_S P_S ρ^(S)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarizationState {
    shells: Vec<(f64, SpinSector)>,
}

impl PolarizationState {
    /// Collects shells, sorted by spin. Weights must be non-negative and sum
    /// to one; each spin may appear once.
    pub fn assemble(mut shells: Vec<(f64, SpinSector)>) -> Result<Self> {
        if shells.is_empty() {
            return Err(Error::invalid("a polarization state needs at least one shell"));
        }
        if let Some((w, _)) = shells.iter().find(|(w, _)| *w < 0.0 || !w.is_finite()) {
            return Err(Error::invalid(format!("shell weight {w} is negative or not finite")));
        }
        let total: f64 = shells.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > DEFAULT_VALIDATION_TOL {
            return Err(Error::invalid(format!("shell weights sum to {total}, not 1")));
        }
        shells.sort_by_key(|(_, s)| s.spin);
        if let Some(pair) = shells.windows(2).find(|p| p[0].1.spin == p[1].1.spin) {
            return Err(Error::invalid(format!("spin {} appears twice", pair[0].1.spin)));
        }
        Ok(Self { shells })
    }

    pub fn single(sector: SpinSector) -> Self {
        Self { shells: vec![(1.0, sector)] }
    }

    pub fn shells(&self) -> &[(f64, SpinSector)] {
        &self.shells
    }

    pub fn shell(&self, spin: HalfInt) -> Option<(f64, &SpinSector)> {
        self.shells.iter().find(|(_, s)| s.spin == spin).map(|(w, s)| (*w, s))
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        for (_, s) in &self.shells {
            s.validate(tol).into_result().map_err(|e| match e {
                Error::Validation(msg) => Error::Validation(format!("shell 2S = {}: {msg}", s.spin.twice())),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn rotate(&self, angles: &EulerAngles) -> Self {
        Self { shells: self.shells.iter().map(|(w, s)| (*w, s.rotate(angles))).collect() }
    }

    /// `Σ_S P_S² Tr[(ρ^(S))²]`, the purity of the block-diagonal matrix.
    pub fn purity(&self) -> f64 {
        self.shells.iter().map(|(w, s)| w * w * s.purity()).sum()
    }
}
