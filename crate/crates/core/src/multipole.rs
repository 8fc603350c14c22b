//! Irreducible tensor operators, state multipoles and the derived
//! polarization measures: multipole strengths `W_K`, cumulative
//! distribution `A_K`, degrees of polarization `P_K`, and the
//! unpolarization order.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::angmom::{clebsch_gordan, factorial, HalfInt};
use crate::error::{Error, Result};
use crate::states::{PolarizationState, SpinSector};
use crate::CMatrix;

/// Default tolerance on `A_K` when deciding unpolarization order.
pub const DEFAULT_UNPOL_TOL: f64 = 1e-10;

/// Position of `(K, q)` in a flat table ordered by `K`, then `q` ascending.
#[inline]
pub fn component_index(rank: usize, q: i32) -> usize {
    let base = (rank * rank + rank) as i64;
    (base + i64::from(q)) as usize
}

/// Tensor operator `T_Kq` on a spin-`S` shell.
///
/// Entries are `√((2K+1)/(2S+1)) ⟨S m; K q | S m'⟩` at row `m'`, column `m`.
/// Clebsch–Gordan coefficients are real, so the matrix is real.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorOperator {
    spin: HalfInt,
    rank: usize,
    component: i32,
    matrix: DMatrix<f64>,
    // Non-zero entries (row, col, value); they all sit on the diagonal
    // `row = col - q`.
    band: Vec<(usize, usize, f64)>,
}

impl TensorOperator {
    pub fn spin(&self) -> HalfInt {
        self.spin
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn component(&self) -> i32 {
        self.component
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn to_complex(&self) -> CMatrix {
        self.matrix.map(Complex64::from)
    }

    /// `Tr[ρ T†]`.
    pub fn project(&self, rho: &CMatrix) -> Complex64 {
        // Tr[ρ T†] = Σ_ij ρ_ij T_ij for real T.
        self.band.iter().map(|&(r, c, v)| rho[(r, c)] * v).sum()
    }
}

fn check_rank(spin: HalfInt, rank: usize, q: i32) -> Result<()> {
    if spin.twice() < 0 {
        return Err(Error::invalid("spin must be non-negative"));
    }
    if rank > spin.twice() as usize {
        return Err(Error::invalid(format!("rank {rank} exceeds 2S = {}", spin.twice())));
    }
    if q.unsigned_abs() as usize > rank {
        return Err(Error::invalid(format!("component {q} outside [-{rank}, {rank}]")));
    }
    Ok(())
}

/// Builds `T_Kq^(S)` from exact Clebsch–Gordan coefficients.
pub fn tensor_operator(spin: HalfInt, rank: usize, q: i32) -> Result<TensorOperator> {
    check_rank(spin, rank, q)?;
    let d = spin.dim();
    let k = HalfInt::from_int(rank as i32);
    let qh = HalfInt::from_int(q);
    let norm = ((2 * rank + 1) as f64 / d as f64).sqrt();
    let mut matrix = DMatrix::zeros(d, d);
    let mut band = Vec::new();
    for (col, m) in spin.projections().enumerate() {
        let mp = HalfInt::from_twice(m.twice() + 2 * q);
        let Some(row) = spin.index_of(mp) else { continue };
        let cg = clebsch_gordan(spin, m, k, qh, spin, mp)?;
        if cg.is_zero() {
            continue;
        }
        let v = norm * cg.to_f64();
        matrix[(row, col)] = v;
        band.push((row, col, v));
    }
    Ok(TensorOperator { spin, rank, component: q, matrix, band })
}

/// All `T_Kq` for one spin, `0 ≤ K ≤ 2S`, `|q| ≤ K`.
#[derive(Debug)]
pub struct TensorBasis {
    spin: HalfInt,
    ops: Vec<TensorOperator>,
}

impl TensorBasis {
    fn build(spin: HalfInt) -> Result<Self> {
        let max_rank = spin.twice() as usize;
        let mut ops = Vec::with_capacity((max_rank + 1) * (max_rank + 1));
        for rank in 0..=max_rank {
            for q in -(rank as i32)..=rank as i32 {
                ops.push(tensor_operator(spin, rank, q)?);
            }
        }
        Ok(Self { spin, ops })
    }

    pub fn spin(&self) -> HalfInt {
        self.spin
    }

    pub fn max_rank(&self) -> usize {
        self.spin.twice() as usize
    }

    pub fn get(&self, rank: usize, q: i32) -> &TensorOperator {
        &self.ops[component_index(rank, q)]
    }

    pub fn iter(&self) -> impl Iterator<Item = &TensorOperator> {
        self.ops.iter()
    }
}

/// Shared, lazily built basis for `spin`. Safe to call from many threads.
pub fn tensor_basis(spin: HalfInt) -> Arc<TensorBasis> {
    static CACHE: OnceLock<RwLock<HashMap<i32, Arc<TensorBasis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(b) = cache.read().expect("tensor cache poisoned").get(&spin.twice()) {
        return Arc::clone(b);
    }
    let built = Arc::new(TensorBasis::build(spin).expect("valid spin always yields a basis"));
    let mut write = cache.write().expect("tensor cache poisoned");
    Arc::clone(write.entry(spin.twice()).or_insert(built))
}

/// `A_K` of any SU(2) coherent state:
/// `2S/(2S+1) − (2S)!² / ((2S−K−1)! (2S+K+1)!)`, with the second term taken
/// as zero at `K = 2S`. Evaluated exactly, then rounded.
pub fn coherent_cumulative_max(spin: HalfInt, rank: usize) -> Result<f64> {
    let two_s = spin.twice();
    if two_s < 1 || rank < 1 || rank > two_s as usize {
        return Err(Error::invalid(format!("rank {rank} outside [1, 2S = {two_s}]")));
    }
    let two_s = two_s as usize;
    let mut value = BigRational::new(BigInt::from(two_s), BigInt::from(two_s + 1));
    if rank < two_s {
        let f = BigInt::from(factorial(two_s));
        value -= BigRational::new(
            &f * &f,
            BigInt::from(factorial(two_s - rank - 1)) * BigInt::from(factorial(two_s + rank + 1)),
        );
    }
    Ok(value.to_f64().expect("finite rational"))
}

fn coherent_table(spin: HalfInt) -> Arc<Vec<f64>> {
    static CACHE: OnceLock<RwLock<HashMap<i32, Arc<Vec<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(t) = cache.read().expect("coherent cache poisoned").get(&spin.twice()) {
        return Arc::clone(t);
    }
    let mut table = vec![0.0];
    for k in 1..=spin.twice() as usize {
        table.push(coherent_cumulative_max(spin, k).expect("rank in range"));
    }
    let table = Arc::new(table);
    let mut write = cache.write().expect("coherent cache poisoned");
    Arc::clone(write.entry(spin.twice()).or_insert(table))
}

/// State multipoles `ρ_Kq` of one shell and the quantities derived from
/// them.
#[derive(Clone, Debug, PartialEq)]
pub struct MultipoleSpectrum {
    spin: HalfInt,
    components: Vec<Complex64>,
    strengths: Vec<f64>,
    cumulative: Vec<f64>,
    degrees: Vec<f64>,
    unpol_order: usize,
}

impl MultipoleSpectrum {
    /// Builds a spectrum from the flat component table (see
    /// [`component_index`]), which must cover every `K ≤ 2S`.
    pub fn from_components(spin: HalfInt, components: Vec<Complex64>) -> Result<Self> {
        let max_rank = spin.twice() as usize;
        if components.len() != (max_rank + 1) * (max_rank + 1) {
            return Err(Error::invalid(format!(
                "spin {spin} has {} multipole components, got {}",
                (max_rank + 1) * (max_rank + 1),
                components.len()
            )));
        }
        let strengths: Vec<f64> = (0..=max_rank)
            .map(|k| {
                let lo = component_index(k, -(k as i32));
                components[lo..lo + 2 * k + 1].iter().map(|c| c.norm_sqr()).sum()
            })
            .collect();
        let mut cumulative = vec![0.0; max_rank + 1];
        for k in 1..=max_rank {
            cumulative[k] = cumulative[k - 1] + strengths[k];
        }
        let coherent = coherent_table(spin);
        let degrees = (0..=max_rank).map(|k| if k == 0 { 0.0 } else { (cumulative[k] / coherent[k]).sqrt() }).collect();
        let unpol_order = order_from_cumulative(&cumulative, DEFAULT_UNPOL_TOL);
        Ok(Self { spin, components, strengths, cumulative, degrees, unpol_order })
    }

    pub fn spin(&self) -> HalfInt {
        self.spin
    }

    pub fn max_rank(&self) -> usize {
        self.spin.twice() as usize
    }

    pub fn components(&self) -> &[Complex64] {
        &self.components
    }

    pub fn component(&self, rank: usize, q: i32) -> Result<Complex64> {
        check_rank(self.spin, rank, q)?;
        Ok(self.components[component_index(rank, q)])
    }

    /// `W_K = Σ_q |ρ_Kq|²` for `0 ≤ K ≤ 2S`.
    pub fn strength(&self, rank: usize) -> Result<f64> {
        self.strengths
            .get(rank)
            .copied()
            .ok_or_else(|| Error::invalid(format!("rank {rank} exceeds 2S = {}", self.max_rank())))
    }

    pub fn strengths(&self) -> &[f64] {
        &self.strengths
    }

    /// `A_K = Σ_{ℓ=1..K} W_ℓ` for `1 ≤ K ≤ 2S`; the monopole is excluded.
    pub fn cumulative(&self, rank: usize) -> Result<f64> {
        self.check_order_rank(rank)?;
        Ok(self.cumulative[rank])
    }

    /// `P_K = √(A_K / A_K^coherent)` for `1 ≤ K ≤ 2S`.
    pub fn degree(&self, rank: usize) -> Result<f64> {
        self.check_order_rank(rank)?;
        Ok(self.degrees[rank])
    }

    fn check_order_rank(&self, rank: usize) -> Result<()> {
        if rank < 1 || rank > self.max_rank() {
            return Err(Error::invalid(format!("rank {rank} outside [1, 2S = {}]", self.max_rank())));
        }
        Ok(())
    }

    /// Sum of all strengths including the monopole; equals `Tr ρ²`.
    pub fn total_strength(&self) -> f64 {
        self.strengths.iter().sum()
    }

    /// Unpolarization order at [`DEFAULT_UNPOL_TOL`].
    pub fn unpol_order(&self) -> usize {
        self.unpol_order
    }

    /// Largest `K` with `A_K ≤ tol`. Zero means the dipole is present;
    /// `2S` means the shell is unpolarized to every order.
    pub fn unpolarization_order(&self, tol: f64) -> usize {
        order_from_cumulative(&self.cumulative, tol)
    }

    /// `max |ρ_{K,-q} − (−1)^q conj(ρ_Kq)|`, zero for a Hermitian state.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..=self.max_rank() {
            for q in 0..=k as i32 {
                let plus = self.components[component_index(k, q)];
                let minus = self.components[component_index(k, -q)];
                let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
                worst = worst.max((minus - plus.conj() * sign).norm());
            }
        }
        worst
    }

    /// `Σ_Kq ρ_Kq T_Kq`.
    pub fn reconstruct(&self) -> CMatrix {
        let basis = tensor_basis(self.spin);
        let d = self.spin.dim();
        let mut rho = CMatrix::zeros(d, d);
        for (op, c) in basis.iter().zip(&self.components) {
            for &(r, col, v) in &op.band {
                rho[(r, col)] += c * v;
            }
        }
        rho
    }
}

fn order_from_cumulative(cumulative: &[f64], tol: f64) -> usize {
    cumulative.iter().skip(1).position(|a| *a > tol).unwrap_or(cumulative.len() - 1)
}

/// `ρ_Kq = Tr[ρ T_Kq†]` for every `K ≤ 2S`.
pub fn state_multipoles(sector: &SpinSector) -> MultipoleSpectrum {
    let basis = tensor_basis(sector.spin());
    let components = basis.iter().map(|op| op.project(sector.matrix())).collect();
    MultipoleSpectrum::from_components(sector.spin(), components).expect("basis covers every rank")
}

/// Axial-symmetry diagnostics of a shell about the z axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxialProfile {
    /// All `q ≠ 0` components vanish.
    pub axially_symmetric_about_z: bool,
    /// `max |ρ_Kq|` over `q ≠ 0`.
    pub off_axis_residual: f64,
    /// All odd-rank `ρ_K0` vanish (invariance under `z → −z`).
    pub even_rank_only: bool,
    /// `max |ρ_K0|` over odd `K`.
    pub odd_rank_residual: f64,
}

pub fn axial_profile(sector: &SpinSector, tol: f64) -> AxialProfile {
    let spectrum = state_multipoles(sector);
    let mut off_axis: f64 = 0.0;
    let mut odd: f64 = 0.0;
    for k in 0..=spectrum.max_rank() {
        for q in -(k as i32)..=k as i32 {
            let c = spectrum.components[component_index(k, q)].norm();
            if q != 0 {
                off_axis = off_axis.max(c);
            } else if k % 2 == 1 {
                odd = odd.max(c);
            }
        }
    }
    AxialProfile {
        axially_symmetric_about_z: off_axis <= tol,
        off_axis_residual: off_axis,
        even_rank_only: odd <= tol,
        odd_rank_residual: odd,
    }
}

/// Shell-by-shell analysis of a polarization state.
///
/// The aggregate `Ā_K = Σ_S P_S A_K^(S)` is a convention of this crate;
/// for shells with `2S < K` the saturated value `A_{2S}^(S)` is used.
#[derive(Clone, Debug, PartialEq)]
pub struct StateAnalysis {
    pub shells: Vec<(f64, MultipoleSpectrum)>,
    /// `Ā_K` for `K = 0..=max 2S` (index 0 is zero).
    pub aggregate_cumulative: Vec<f64>,
    /// Largest `K` with `Ā_K ≤ tol`.
    pub aggregate_order: usize,
    pub tol: f64,
}

pub fn analyze_state(state: &PolarizationState, tol: f64) -> StateAnalysis {
    let shells: Vec<(f64, MultipoleSpectrum)> = state.shells().iter().map(|(w, s)| (*w, state_multipoles(s))).collect();
    let max_rank = shells.iter().map(|(_, s)| s.max_rank()).max().unwrap_or(0);
    let mut aggregate = vec![0.0; max_rank + 1];
    for (k, slot) in aggregate.iter_mut().enumerate().skip(1) {
        *slot =
            shells.iter().filter(|(_, s)| s.max_rank() > 0).map(|(w, s)| w * s.cumulative[k.min(s.max_rank())]).sum();
    }
    let aggregate_order = order_from_cumulative(&aggregate, tol);
    StateAnalysis { shells, aggregate_cumulative: aggregate, aggregate_order, tol }
}
