//! Extremal unpolarized states.
//!
//! - Diagonal (equivalently axially symmetric) classes: the constraints are
//!   linear in the eigenvalues and purity is convex, so the maximum sits on
//!   a vertex of the feasible polytope; vertices are enumerated exactly.
//! - General mixed class: multi-start projected ascent of `Tr ρ²`,
//!   alternating projections onto the multipole-free affine subspace and
//!   the PSD cone.
//! - Pure class: gradient descent of `A_K` over normalized amplitudes.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::angmom::HalfInt;
use crate::error::{Error, Result};
use crate::multipole::{state_multipoles, tensor_basis};
use crate::states::{hermitian_eigen, SpinSector};
use crate::CMatrix;

pub const DEFAULT_RESTARTS: usize = 64;
pub const DEFAULT_SEED: u64 = 0;
/// Largest `A_K` accepted at a returned solution.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// `A_K` below which a pure anticoherent state counts as found.
pub const EXISTENCE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstraintClass {
    General,
    /// Diagonal in the `|S, m⟩` basis.
    Diagonal,
    /// Invariant under rotations about some axis. Up to a rotation these are
    /// the diagonal states, and rotations leave `W_K` and purity unchanged,
    /// so the axis is taken along z.
    AxiallySymmetric,
    Pure,
}

impl ConstraintClass {
    pub fn name(self) -> &'static str {
        match self {
            ConstraintClass::General => "general",
            ConstraintClass::Diagonal => "diagonal",
            ConstraintClass::AxiallySymmetric => "axial",
            ConstraintClass::Pure => "pure",
        }
    }
}

impl std::str::FromStr for ConstraintClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(ConstraintClass::General),
            "diagonal" => Ok(ConstraintClass::Diagonal),
            "axial" | "axially-symmetric" => Ok(ConstraintClass::AxiallySymmetric),
            "pure" => Ok(ConstraintClass::Pure),
            other => Err(Error::invalid(format!("unknown constraint class {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    MaximizePurity,
    MinimizeCumulative,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchProblem {
    pub spin: HalfInt,
    /// Multipoles of rank `1..=order` must vanish.
    pub order: usize,
    pub class: ConstraintClass,
    pub objective: Objective,
    pub seed: u64,
    pub restarts: usize,
    pub max_iterations: usize,
}

impl SearchProblem {
    pub fn new(spin: HalfInt, order: usize, class: ConstraintClass) -> Result<Self> {
        if spin.twice() < 1 {
            return Err(Error::invalid("spin must be at least 1/2"));
        }
        if order < 1 || order > spin.twice() as usize {
            return Err(Error::invalid(format!("order {order} outside [1, 2S = {}]", spin.twice())));
        }
        let objective = match class {
            ConstraintClass::Pure => Objective::MinimizeCumulative,
            _ => Objective::MaximizePurity,
        };
        Ok(Self { spin, order, class, objective, seed: DEFAULT_SEED, restarts: DEFAULT_RESTARTS, max_iterations: 4000 })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts.max(1);
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RestartSummary {
    pub index: usize,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub state: SpinSector,
    /// Purity for mixed classes, `A_K` for the pure class.
    pub objective: f64,
    pub purity: f64,
    /// `A_K` of the returned state.
    pub residual: f64,
    /// Whether the optimum is certified (vertex enumeration).
    pub exact: bool,
    pub seed: u64,
    pub restarts: Vec<RestartSummary>,
    /// SHA-256 over the restart history and the returned matrix.
    pub digest: String,
}

/// The maximally mixed state, feasible for every order.
pub fn feasible_start(spin: HalfInt) -> SpinSector {
    SpinSector::maximally_mixed(spin)
}

/// Dispatches on the constraint class and objective.
pub fn solve(problem: &SearchProblem) -> Result<SearchResult> {
    match (problem.class, problem.objective) {
        (ConstraintClass::Pure, _) | (_, Objective::MinimizeCumulative) => {
            pure_anticoherent_search(problem.spin, problem.order, problem.restarts, problem.seed)
        }
        _ => max_purity_unpolarized(problem),
    }
}

/// Maximum purity over states whose multipoles of rank `1..=order` vanish,
/// within the problem's constraint class.
///
/// For the pure class this succeeds only when an anticoherent state of the
/// requested order is found; otherwise the result is an infeasibility error.
pub fn max_purity_unpolarized(problem: &SearchProblem) -> Result<SearchResult> {
    match problem.class {
        ConstraintClass::Diagonal | ConstraintClass::AxiallySymmetric => {
            diagonal_vertex_search(problem.spin, problem.order)
        }
        ConstraintClass::General => general_search(problem),
        ConstraintClass::Pure => {
            let r = pure_anticoherent_search(problem.spin, problem.order, problem.restarts, problem.seed)?;
            if r.residual > EXISTENCE_TOL {
                return Err(Error::Infeasible(format!(
                    "no pure solution for two_S = {}, order {}; min A_{} = {}",
                    problem.spin.twice(),
                    problem.order,
                    problem.order,
                    r.residual
                )));
            }
            Ok(SearchResult { objective: r.purity, ..r })
        }
    }
}

fn finish(
    state: SpinSector,
    objective: f64,
    order: usize,
    exact: bool,
    seed: u64,
    restarts: Vec<RestartSummary>,
) -> SearchResult {
    let spectrum = state_multipoles(&state);
    let residual = spectrum.cumulative(order).expect("order checked by caller");
    let purity = state.purity();
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    for r in &restarts {
        hasher.update((r.index as u64).to_le_bytes());
        hasher.update(r.objective.to_bits().to_le_bytes());
        hasher.update((r.iterations as u64).to_le_bytes());
    }
    for z in state.matrix().iter() {
        hasher.update(z.re.to_bits().to_le_bytes());
        hasher.update(z.im.to_bits().to_le_bytes());
    }
    let digest = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
    SearchResult { state, objective, purity, residual, exact, seed, restarts, digest }
}

/// Diagonal of `T_K0` for `K = 0..=order`, one row per rank.
fn diagonal_constraints(spin: HalfInt, order: usize) -> DMatrix<f64> {
    let basis = tensor_basis(spin);
    let d = spin.dim();
    DMatrix::from_fn(order + 1, d, |k, i| basis.get(k, 0).matrix()[(i, i)])
}

const MAX_BASES: u128 = 5_000_000;

fn binomial_count(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Exact maximum purity over diagonal states with `ρ_K0 = 0` for
/// `1 ≤ K ≤ order`, by enumerating the basic feasible solutions of
/// `{λ ≥ 0, Σλ = 1, Σ_m λ_m (T_K0)_mm = 0}`.
pub fn diagonal_vertex_search(spin: HalfInt, order: usize) -> Result<SearchResult> {
    if order < 1 || order > spin.twice() as usize {
        return Err(Error::invalid(format!("order {order} outside [1, 2S = {}]", spin.twice())));
    }
    let vertices = diagonal_vertices(spin, order)?;
    let mut best: Option<Vec<f64>> = None;
    for v in vertices {
        let p: f64 = v.iter().map(|x| x * x).sum();
        best = match best {
            None => Some(v),
            Some(b) => {
                let pb: f64 = b.iter().map(|x| x * x).sum();
                // Ties go to the lexicographically larger eigenvalue list.
                if p > pb + 1e-12 || ((p - pb).abs() <= 1e-12 && lex_greater(&v, &b)) {
                    Some(v)
                } else {
                    Some(b)
                }
            }
        };
    }
    let lambda = best.ok_or_else(|| Error::Infeasible("empty feasible polytope".into()))?;
    let state = SpinSector::diagonal(spin, &lambda)?;
    let purity = state.purity();
    Ok(finish(state, purity, order, true, 0, Vec::new()))
}

fn lex_greater(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > 1e-12 {
            return x > y;
        }
    }
    false
}

/// All vertices of the diagonal feasible polytope, eigenvalues ordered by
/// descending `m`.
pub fn diagonal_vertices(spin: HalfInt, order: usize) -> Result<Vec<Vec<f64>>> {
    let a = diagonal_constraints(spin, order);
    let d = spin.dim();
    let r = order + 1;
    if binomial_count(d, r) > MAX_BASES {
        return Err(Error::invalid(format!(
            "vertex enumeration for 2S = {} and order {order} is too large",
            spin.twice()
        )));
    }
    let mut rhs = DVector::zeros(r);
    rhs[0] = 1.0 / (d as f64).sqrt(); // Σ λ T_00 = 1/√d
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut cols: Vec<usize> = (0..r).collect();
    loop {
        let sub = DMatrix::from_fn(r, r, |i, j| a[(i, cols[j])]);
        let svd = sub.clone().svd(false, false);
        if svd.singular_values.min() > 1e-10 * svd.singular_values.max() {
            if let Some(x) = sub.lu().solve(&rhs) {
                if x.iter().all(|v| *v >= -1e-12) {
                    let mut lambda = vec![0.0; d];
                    for (j, c) in cols.iter().enumerate() {
                        lambda[*c] = x[j].max(0.0);
                    }
                    let total: f64 = lambda.iter().sum();
                    lambda.iter_mut().for_each(|v| *v /= total);
                    if !out.iter().any(|o| o.iter().zip(&lambda).all(|(p, q)| (p - q).abs() < 1e-12)) {
                        out.push(lambda);
                    }
                }
            }
        }
        if !next_combination(&mut cols, d) {
            break;
        }
    }
    Ok(out)
}

fn next_combination(cols: &mut [usize], n: usize) -> bool {
    let k = cols.len();
    for i in (0..k).rev() {
        if cols[i] < n - k + i {
            cols[i] += 1;
            for j in i + 1..k {
                cols[j] = cols[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Removes multipoles of rank `1..=order`, Hermitizes, and restores unit
/// trace.
fn project_affine(x: &CMatrix, spin: HalfInt, order: usize) -> CMatrix {
    let basis = tensor_basis(spin);
    let d = spin.dim();
    let mut m = (x + x.adjoint()) * Complex64::from(0.5);
    for k in 1..=order {
        for q in -(k as i32)..=k as i32 {
            let op = basis.get(k, q);
            let c = op.project(&m);
            m -= op.to_complex() * c;
        }
    }
    let shift = (Complex64::from(1.0) - m.trace()) / d as f64;
    for i in 0..d {
        m[(i, i)] += shift;
    }
    m
}

fn project_psd(x: &CMatrix) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(x);
    let clipped: Vec<f64> = vals.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    let d = x.nrows();
    if total.is_nan() || total <= 0.0 {
        return CMatrix::identity(d, d) / Complex64::from(d as f64);
    }
    let diag = DVector::from_iterator(d, clipped.iter().map(|v| Complex64::from(v / total)));
    &vecs * CMatrix::from_diagonal(&diag) * vecs.adjoint()
}

/// Exactly feasible point near `x`: affine projection, then shrink toward
/// the maximally mixed state until PSD.
fn make_feasible(x: &CMatrix, spin: HalfInt, order: usize) -> CMatrix {
    let m = project_affine(x, spin, order);
    let d = spin.dim() as f64;
    let (vals, _) = hermitian_eigen(&m);
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    if min >= 0.0 {
        return m;
    }
    // (1 − t) m + t I/d has smallest eigenvalue (1 − t) min + t/d.
    let t = (-min) / (1.0 / d - min);
    let n = m.nrows();
    &m * Complex64::from(1.0 - t) + CMatrix::identity(n, n) * Complex64::from(t / d)
}

fn general_search(problem: &SearchProblem) -> Result<SearchResult> {
    let spin = problem.spin;
    let order = problem.order;
    let d = spin.dim();
    let center = CMatrix::identity(d, d) / Complex64::from(d as f64);
    let outer_steps = problem.max_iterations.clamp(50, 600);

    let runs: Vec<(f64, usize, CMatrix)> = (0..problem.restarts)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(problem.seed);
            rng.set_stream(index as u64);
            let g =
                CMatrix::from_fn(d, d, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
            let scale = rng.gen_range(0.05..0.5) / d as f64;
            let mut rho = make_feasible(&(&center + (&g + g.adjoint()) * Complex64::from(scale)), spin, order);
            let mut iterations = 0;
            for _ in 0..outer_steps {
                iterations += 1;
                // Ascent on Tr ρ²: push away from the centre, then project back.
                let mut x = &center + (&rho - &center) * Complex64::from(1.5);
                for _ in 0..8 {
                    x = project_psd(&project_affine(&x, spin, order));
                }
                let next = make_feasible(&x, spin, order);
                let gain = purity_of(&next) - purity_of(&rho);
                rho = next;
                if gain.abs() < 1e-15 {
                    break;
                }
            }
            (purity_of(&rho), iterations, rho)
        })
        .collect();

    let (best_index, _) =
        runs.iter()
            .enumerate()
            .fold((0usize, f64::NEG_INFINITY), |(bi, bv), (i, (v, _, _))| if *v > bv { (i, *v) } else { (bi, bv) });
    let summaries = runs
        .iter()
        .enumerate()
        .map(|(index, (objective, iterations, _))| RestartSummary {
            index,
            objective: *objective,
            iterations: *iterations,
        })
        .collect();
    let rho = runs[best_index].2.clone();
    let state = SpinSector::new(spin, rho)?;
    let purity = state.purity();
    let result = finish(state, purity, order, false, problem.seed, summaries);
    if result.residual > RESIDUAL_TOL {
        return Err(Error::Tolerance(format!("constraint residual {} above {RESIDUAL_TOL}", result.residual)));
    }
    Ok(result)
}

fn purity_of(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// `A_K(ψ) = Σ_{1≤K'≤K} Σ_q |⟨ψ|T_{K'q}|ψ⟩|² / ⟨ψ|ψ⟩²`; scale invariant in `ψ`.
pub fn pure_cumulative(spin: HalfInt, order: usize, psi: &[Complex64]) -> f64 {
    pure_cumulative_with_gradient(spin, order, psi).0
}

/// `A_K` and its gradient with respect to the real coordinates of `ψ`,
/// packed as complex numbers `∂/∂Re ψ_i + i ∂/∂Im ψ_i`.
pub fn pure_cumulative_with_gradient(spin: HalfInt, order: usize, psi: &[Complex64]) -> (f64, Vec<Complex64>) {
    let basis = tensor_basis(spin);
    let n: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    let d = psi.len();
    let mut total = 0.0;
    // Σ_Kq (conj(g) T ψ + g Tᵀ ψ), the Wirtinger derivative of the numerator.
    let mut dnum = vec![Complex64::from(0.0); d];
    for k in 1..=order.min(spin.twice() as usize) {
        for q in -(k as i32)..=k as i32 {
            let t = basis.get(k, q).matrix();
            let mut tpsi = vec![Complex64::from(0.0); d];
            let mut ttpsi = vec![Complex64::from(0.0); d];
            for i in 0..d {
                for j in 0..d {
                    let v = t[(i, j)];
                    if v != 0.0 {
                        tpsi[i] += psi[j] * v;
                        ttpsi[j] += psi[i] * v;
                    }
                }
            }
            let g: Complex64 = psi.iter().zip(&tpsi).map(|(a, b)| a.conj() * b).sum();
            total += g.norm_sqr();
            for i in 0..d {
                dnum[i] += g.conj() * tpsi[i] + g * ttpsi[i];
            }
        }
    }
    let value = total / (n * n);
    let grad = (0..d).map(|i| (dnum[i] / (n * n) - psi[i] * (2.0 * total / (n * n * n))) * 2.0).collect();
    (value, grad)
}

fn descend(
    spin: HalfInt,
    order: usize,
    mut psi: Vec<Complex64>,
    max_iterations: usize,
) -> (f64, usize, Vec<Complex64>) {
    normalize(&mut psi);
    let (mut value, mut grad) = pure_cumulative_with_gradient(spin, order, &psi);
    let mut step = 1.0;
    let mut iterations = 0;
    while iterations < max_iterations {
        iterations += 1;
        let gnorm2: f64 = grad.iter().map(|g| g.norm_sqr()).sum();
        if value < 1e-15 || gnorm2 < 1e-30 {
            break;
        }
        let mut accepted = false;
        for _ in 0..60 {
            let mut trial: Vec<Complex64> = psi.iter().zip(&grad).map(|(p, g)| p - g * step).collect();
            normalize(&mut trial);
            let (v, g) = pure_cumulative_with_gradient(spin, order, &trial);
            if v <= value - 1e-4 * step * gnorm2 {
                psi = trial;
                value = v;
                grad = g;
                step *= 1.5;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (value, iterations, psi)
}

fn normalize(psi: &mut [Complex64]) {
    let n: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    psi.iter_mut().for_each(|z| *z /= n);
}

/// Searches for a pure state whose multipoles of rank `1..=order` vanish.
/// The result always carries the smallest `A_K` found; existence at
/// numerical precision means `residual < EXISTENCE_TOL`.
pub fn pure_anticoherent_search(spin: HalfInt, order: usize, restarts: usize, seed: u64) -> Result<SearchResult> {
    if spin.twice() < 1 {
        return Err(Error::invalid("spin must be at least 1/2"));
    }
    if order < 1 || order > spin.twice() as usize {
        return Err(Error::invalid(format!("order {order} outside [1, 2S = {}]", spin.twice())));
    }
    let d = spin.dim();
    let runs: Vec<(f64, usize, Vec<Complex64>)> = (0..restarts.max(1))
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            let psi: Vec<Complex64> =
                (0..d).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
            descend(spin, order, psi, 20_000)
        })
        .collect();
    let (best_index, _) =
        runs.iter()
            .enumerate()
            .fold((0usize, f64::INFINITY), |(bi, bv), (i, (v, _, _))| if *v < bv { (i, *v) } else { (bi, bv) });
    let summaries = runs
        .iter()
        .enumerate()
        .map(|(index, (objective, iterations, _))| RestartSummary {
            index,
            objective: *objective,
            iterations: *iterations,
        })
        .collect();
    let state = SpinSector::pure(spin, &runs[best_index].2)?;
    let mut result = finish(state, 0.0, order, false, seed, summaries);
    result.objective = result.residual;
    Ok(result)
}

/// One row of the two-photon first-order family `diag(λ, 1−2λ, λ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoPhotonRow {
    pub lambda: f64,
    pub purity: f64,
    /// Second-order degree of polarization `P_2`.
    pub degree2: f64,
}

/// Purity and `P_2` along `diag(λ, 1−2λ, λ)`, computed from the multipole
/// spectrum of each state. Positivity requires `0 ≤ λ ≤ 1/2`.
pub fn scan_two_photon_family(lambdas: &[f64]) -> Result<Vec<TwoPhotonRow>> {
    lambdas
        .iter()
        .map(|&lambda| {
            if !(0.0..=0.5).contains(&lambda) {
                return Err(Error::invalid(format!("λ = {lambda} outside [0, 1/2]")));
            }
            let s = SpinSector::diagonal(HalfInt::ONE, &[lambda, 1.0 - 2.0 * lambda, lambda])?;
            let sp = state_multipoles(&s);
            Ok(TwoPhotonRow { lambda, purity: s.purity(), degree2: sp.degree(2)? })
        })
        .collect()
}

/// `n` evenly spaced points on `[0, 1/2]`, endpoints included.
pub fn two_photon_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| 0.5 * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Diagonal three-photon families parametrized by `(λ₃, λ₄)`, the weights
/// of `|3/2, −1/2⟩` and `|3/2, −3/2⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThreePhotonFamily {
    /// `diag(λ₃ + 2λ₄ − 1/2, −2λ₃ − 3λ₄ + 3/2, λ₃, λ₄)`: no dipole.
    FirstOrder,
    /// `diag(1/2 − λ₄, 3λ₄ − 1/2, 1 − 3λ₄, λ₄)`: no dipole or quadrupole.
    /// Here `λ₃ = 1 − 3λ₄` and only `λ₄` is free.
    SecondOrder,
}

impl ThreePhotonFamily {
    pub fn eigenvalues(self, lambda3: f64, lambda4: f64) -> [f64; 4] {
        match self {
            ThreePhotonFamily::FirstOrder => {
                [lambda3 + 2.0 * lambda4 - 0.5, -2.0 * lambda3 - 3.0 * lambda4 + 1.5, lambda3, lambda4]
            }
            ThreePhotonFamily::SecondOrder => [0.5 - lambda4, 3.0 * lambda4 - 0.5, 1.0 - 3.0 * lambda4, lambda4],
        }
    }

    fn on_family(self, lambda3: f64, lambda4: f64) -> bool {
        match self {
            ThreePhotonFamily::FirstOrder => true,
            ThreePhotonFamily::SecondOrder => (lambda3 - (1.0 - 3.0 * lambda4)).abs() < 1e-12,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThreePhotonRow {
    pub lambda3: f64,
    pub lambda4: f64,
    pub purity: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThreePhotonScan {
    pub family: ThreePhotonFamily,
    pub rows: Vec<ThreePhotonRow>,
    /// Grid points outside the positivity polytope (or off the family).
    pub skipped: Vec<(f64, f64)>,
}

/// Evaluates purity and `A_1..A_3` at each `(λ₃, λ₄)` grid point that gives a
/// valid state.
pub fn scan_three_photon_family(family: ThreePhotonFamily, grid: &[(f64, f64)]) -> ThreePhotonScan {
    let spin = HalfInt::from_twice(3);
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &(l3, l4) in grid {
        let lambda = family.eigenvalues(l3, l4);
        let feasible = family.on_family(l3, l4) && lambda.iter().all(|v| (-1e-12..=1.0 + 1e-12).contains(v));
        if !feasible {
            skipped.push((l3, l4));
            continue;
        }
        let clean: Vec<f64> = lambda.iter().map(|v| v.clamp(0.0, 1.0)).collect();
        let Ok(s) = SpinSector::diagonal(spin, &clean) else {
            skipped.push((l3, l4));
            continue;
        };
        let sp = state_multipoles(&s);
        rows.push(ThreePhotonRow {
            lambda3: l3,
            lambda4: l4,
            purity: s.purity(),
            a1: sp.cumulative(1).expect("rank 1 exists"),
            a2: sp.cumulative(2).expect("rank 2 exists"),
            a3: sp.cumulative(3).expect("rank 3 exists"),
        });
    }
    ThreePhotonScan { family, rows, skipped }
}

/// Grid over the family's parameter box with `n` points per free axis:
/// `(λ₃, λ₄) ∈ [0, 1]²` for the first-order family, `λ₄ ∈ [1/6, 1/3]` for
/// the second-order one.
pub fn three_photon_grid(family: ThreePhotonFamily, n: usize) -> Vec<(f64, f64)> {
    let n = n.max(2);
    let t = |i: usize| i as f64 / (n - 1) as f64;
    match family {
        ThreePhotonFamily::FirstOrder => (0..n).flat_map(|i| (0..n).map(move |j| (t(i), t(j)))).collect(),
        ThreePhotonFamily::SecondOrder => (0..n)
            .map(|i| {
                let l4 = 1.0 / 6.0 + t(i) / 6.0;
                (1.0 - 3.0 * l4, l4)
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn spin(two_s: i32) -> HalfInt {
        HalfInt::from_twice(two_s)
    }

    #[test]
    fn three_photon_first_order_diagonal_max() {
        let r = max_purity_unpolarized(&SearchProblem::new(spin(3), 1, ConstraintClass::Diagonal).unwrap()).unwrap();
        assert!((r.purity - 5.0 / 8.0).abs() < 1e-12);
        assert!(r.residual < 1e-14);
        assert!(r.exact);
    }

    #[test]
    fn three_photon_second_order_axial_max() {
        let r = max_purity_unpolarized(&SearchProblem::new(spin(3), 2, ConstraintClass::AxiallySymmetric).unwrap())
            .unwrap();
        assert!((r.purity - 7.0 / 18.0).abs() < 1e-12);
        let diag: Vec<f64> = (0..4).map(|i| r.state.matrix()[(i, i)].re).collect();
        let expected = [1.0 / 3.0, 0.0, 0.5, 1.0 / 6.0];
        assert!(diag.iter().zip(expected).all(|(a, b)| (a - b).abs() < 1e-12), "{diag:?}");
    }

    #[test]
    fn two_photon_general_class_reaches_pure_states() {
        let p = SearchProblem::new(HalfInt::ONE, 1, ConstraintClass::General).unwrap().with_restarts(16);
        let r = max_purity_unpolarized(&p).unwrap();
        assert!((r.purity - 1.0).abs() < 1e-6, "{}", r.purity);
        assert!(r.residual <= RESIDUAL_TOL);
        assert!(r.state.validate(1e-9).passed());
    }

    #[test]
    fn maximally_mixed_is_the_only_fully_unpolarized_diagonal() {
        for two_s in 1..6 {
            let r = diagonal_vertex_search(spin(two_s), two_s as usize).unwrap();
            assert!((r.purity - 1.0 / spin(two_s).dim() as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_search_examples() {
        let r = pure_anticoherent_search(HalfInt::ONE, 1, 8, 0).unwrap();
        assert!(r.residual < EXISTENCE_TOL);
        let w2 = state_multipoles(&r.state).strength(2).unwrap();
        assert!((w2 - 2.0 / 3.0).abs() < 1e-9);

        let r = pure_anticoherent_search(spin(3), 1, 8, 0).unwrap();
        assert!(r.residual < EXISTENCE_TOL);

        let r = pure_anticoherent_search(HalfInt::HALF, 1, 8, 0).unwrap();
        assert!((r.residual - 0.5).abs() < 1e-12);
        let p = SearchProblem::new(HalfInt::HALF, 1, ConstraintClass::Pure).unwrap().with_restarts(4);
        assert!(matches!(max_purity_unpolarized(&p), Err(Error::Infeasible(_))));
    }

    #[test]
    fn pure_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for two_s in 1..=6 {
            let sp = spin(two_s);
            for order in 1..=two_s as usize {
                let psi: Vec<Complex64> = (0..sp.dim())
                    .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                    .collect();
                let (_, grad) = pure_cumulative_with_gradient(sp, order, &psi);
                let h = 1e-5;
                let mut err2 = 0.0;
                let mut norm2 = 0.0;
                for i in 0..sp.dim() {
                    for (unit, analytic) in [(Complex64::from(1.0), grad[i].re), (Complex64::i(), grad[i].im)] {
                        let mut up = psi.clone();
                        let mut down = psi.clone();
                        up[i] += unit * h;
                        down[i] -= unit * h;
                        let fd = (pure_cumulative(sp, order, &up) - pure_cumulative(sp, order, &down)) / (2.0 * h);
                        err2 += (fd - analytic).powi(2);
                        norm2 += analytic * analytic;
                    }
                }
                if norm2.sqrt() < 1e-10 {
                    // A_1 is constant for a single photon.
                    assert!(err2.sqrt() < 1e-8, "2S={two_s} K={order}");
                } else {
                    assert!((err2 / norm2).sqrt() < 1e-6, "2S={two_s} K={order}: {}", (err2 / norm2).sqrt());
                }
            }
        }
    }

    #[test]
    fn pure_objective_matches_spectrum() {
        let h = FRAC_1_SQRT_2;
        let psi = [Complex64::from(h), 0.0.into(), 0.0.into(), Complex64::from(h)];
        let s = SpinSector::pure(spin(3), &psi).unwrap();
        let sp = state_multipoles(&s);
        for k in 1..=3 {
            assert!((pure_cumulative(spin(3), k, &psi) - sp.cumulative(k).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = pure_anticoherent_search(spin(4), 2, 6, 42).unwrap();
        let b = pure_anticoherent_search(spin(4), 2, 6, 42).unwrap();
        assert_eq!(a.digest, b.digest);
        let p = SearchProblem::new(spin(3), 1, ConstraintClass::General).unwrap().with_restarts(4).with_seed(7);
        assert_eq!(max_purity_unpolarized(&p).unwrap().digest, max_purity_unpolarized(&p).unwrap().digest);
    }

    #[test]
    fn two_photon_scan_examples() {
        let rows = scan_two_photon_family(&[1.0 / 3.0, 0.0, 0.5]).unwrap();
        assert!((rows[0].purity - 1.0 / 3.0).abs() < 1e-14 && rows[0].degree2.abs() < 1e-7);
        assert!((rows[1].purity - 1.0).abs() < 1e-14 && (rows[1].degree2 - 1.0).abs() < 1e-12);
        assert!((rows[2].purity - 0.5).abs() < 1e-14 && (rows[2].degree2 - 0.5).abs() < 1e-12);
        assert!(scan_two_photon_family(&[0.6]).is_err());
        assert!(scan_two_photon_family(&[-0.1]).is_err());
    }

    #[test]
    fn three_photon_scan_examples() {
        let scan =
            scan_three_photon_family(ThreePhotonFamily::FirstOrder, &[(0.5, 1.0 / 6.0), (0.25, 0.25), (1.0, 1.0)]);
        assert_eq!(scan.rows.len(), 2);
        assert_eq!(scan.skipped, vec![(1.0, 1.0)]);
        assert!((scan.rows[0].purity - 7.0 / 18.0).abs() < 1e-14);
        assert!((scan.rows[1].purity - 0.25).abs() < 1e-14);
        let scan = scan_three_photon_family(ThreePhotonFamily::SecondOrder, &[(0.5, 1.0 / 6.0), (0.2, 0.2)]);
        assert_eq!(scan.rows.len(), 1);
        assert!(scan.rows[0].a2 < 1e-14);
    }
}
