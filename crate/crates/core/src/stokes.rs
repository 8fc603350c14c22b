//! Stokes operators on a shell, directional moments `⟨(n·S)^ℓ⟩`, and the
//! inversion of directional moments back to multipoles.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::angmom::HalfInt;
use crate::error::{Error, Result};
use crate::geometry::{asymmetric_spiral, Direction};
use crate::multipole::{component_index, tensor_basis, MultipoleSpectrum};
use crate::states::SpinSector;
use crate::CMatrix;

/// `(S_x, S_y, S_z)` on the `|S, m⟩` basis (descending `m`).
#[derive(Clone, Debug, PartialEq)]
pub struct StokesTriple {
    pub spin: HalfInt,
    pub sx: CMatrix,
    pub sy: CMatrix,
    pub sz: CMatrix,
}

impl StokesTriple {
    /// `n·S`.
    pub fn along(&self, dir: &Direction) -> CMatrix {
        let n = dir.unit_vector();
        &self.sx * Complex64::from(n.x) + &self.sy * Complex64::from(n.y) + &self.sz * Complex64::from(n.z)
    }

    /// `S_x² + S_y² + S_z²`.
    pub fn casimir(&self) -> CMatrix {
        &self.sx * &self.sx + &self.sy * &self.sy + &self.sz * &self.sz
    }
}

pub fn stokes_matrices(spin: HalfInt) -> StokesTriple {
    let d = spin.dim();
    let s = spin.value();
    let mut raise = CMatrix::zeros(d, d);
    let mut sz = CMatrix::zeros(d, d);
    for (col, m) in spin.projections().enumerate() {
        let mv = m.value();
        sz[(col, col)] = Complex64::from(mv);
        // S+|m⟩ = √(S(S+1) − m(m+1)) |m+1⟩, and m+1 sits one row up.
        if col > 0 {
            raise[(col - 1, col)] = Complex64::from((s * (s + 1.0) - mv * (mv + 1.0)).sqrt());
        }
    }
    let lower = raise.adjoint();
    let sx = (&raise + &lower) * Complex64::from(0.5);
    let sy = (&raise - &lower) * Complex64::new(0.0, -0.5);
    StokesTriple { spin, sx, sy, sz }
}

/// `Tr[ρ (n·S)^ℓ]`.
pub fn directional_moment(sector: &SpinSector, dir: &Direction, ell: u32) -> Result<f64> {
    if ell == 0 {
        return Err(Error::invalid("moment order must be at least 1"));
    }
    let sn = stokes_matrices(sector.spin()).along(dir);
    Ok(sector.expectation(&matrix_power(&sn, ell)).re)
}

fn matrix_power(m: &CMatrix, ell: u32) -> CMatrix {
    let mut out = m.clone();
    for _ in 1..ell {
        out = &out * m;
    }
    out
}

/// Moments `⟨(n·S)^ℓ⟩` for `ℓ = 1..=max_ell` at every direction.
pub fn forward_moments(sector: &SpinSector, dirs: &[Direction], max_ell: u32) -> Vec<MomentSample> {
    let triple = stokes_matrices(sector.spin());
    let mut out = Vec::with_capacity(dirs.len() * max_ell as usize);
    for dir in dirs {
        let sn = triple.along(dir);
        let mut power = sn.clone();
        for ell in 1..=max_ell {
            if ell > 1 {
                power = &power * &sn;
            }
            out.push(MomentSample { direction: *dir, ell, value: sector.expectation(&power).re });
        }
    }
    out
}

/// Isotropy order over a deterministic spiral of `n_directions` points.
pub fn isotropy_order(sector: &SpinSector, max_ell: u32, tol: f64, n_directions: usize) -> Result<u32> {
    if n_directions < 2 * max_ell as usize + 1 {
        return Err(Error::invalid(format!(
            "{n_directions} directions cannot resolve moments up to order {max_ell}; need {}",
            2 * max_ell + 1
        )));
    }
    isotropy_order_over(sector, max_ell, tol, &asymmetric_spiral(n_directions))
}

/// Largest `ℓ* ≤ max_ell` such that, for every `ℓ ≤ ℓ*`, the spread
/// `max − min` of `⟨(n·S)^ℓ⟩` over `dirs` is at most `tol`.
pub fn isotropy_order_over(sector: &SpinSector, max_ell: u32, tol: f64, dirs: &[Direction]) -> Result<u32> {
    if dirs.len() < 2 {
        return Err(Error::invalid("isotropy needs at least two directions"));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let samples = forward_moments(sector, dirs, max_ell);
    for ell in 1..=max_ell {
        let (lo, hi) = samples
            .iter()
            .filter(|s| s.ell == ell)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.value), hi.max(s.value)));
        if hi - lo > tol {
            return Ok(ell - 1);
        }
    }
    Ok(max_ell)
}

/// `Δ²S_x + Δ²S_y + Δ²S_z`.
pub fn total_variance(sector: &SpinSector) -> f64 {
    let t = stokes_matrices(sector.spin());
    [&t.sx, &t.sy, &t.sz]
        .iter()
        .map(|op| {
            let mean = sector.expectation(op).re;
            sector.expectation(&(*op * *op)).re - mean * mean
        })
        .sum()
}

/// One measured directional moment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentSample {
    pub direction: Direction,
    pub ell: u32,
    pub value: f64,
}

/// Multipoles recovered from directional moments.
#[derive(Clone, Debug, PartialEq)]
pub struct Reconstruction {
    pub spin: HalfInt,
    /// Highest rank solved for, `min(K_max, 2S)`.
    pub max_rank: usize,
    /// `ρ_Kq` for `K ≤ max_rank`, indexed by [`component_index`]. The
    /// monopole is fixed by normalization.
    pub components: Vec<Complex64>,
    /// Euclidean norm of the least-squares residual.
    pub residual: f64,
    /// Ratio of extreme singular values of the design matrix.
    pub condition_number: f64,
}

impl Reconstruction {
    pub fn strength(&self, rank: usize) -> f64 {
        let lo = component_index(rank, -(rank as i32));
        self.components[lo..lo + 2 * rank + 1].iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn cumulative(&self, rank: usize) -> f64 {
        (1..=rank.min(self.max_rank)).map(|k| self.strength(k)).sum()
    }

    /// A spectrum padded with zeros above `max_rank`, for reporting.
    pub fn to_spectrum(&self) -> MultipoleSpectrum {
        let full = self.spin.twice() as usize;
        let mut comps = vec![Complex64::from(0.0); (full + 1) * (full + 1)];
        comps[..self.components.len()].copy_from_slice(&self.components);
        MultipoleSpectrum::from_components(self.spin, comps).expect("padded to full size")
    }
}

const RANK_DEFICIENCY: f64 = 1e-10;

/// Least-squares inversion of the linear map from `{ρ_Kq : 1 ≤ K ≤ K_max}`
/// to directional moments.
///
/// Each moment is `⟨(n·S)^ℓ⟩ = Σ_Kq ρ_Kq Tr[T_Kq (n·S)^ℓ]`, and only ranks
/// `K ≤ ℓ` contribute. Unknowns are the real and imaginary parts of `ρ_Kq`
/// for `q ≥ 0`; negative `q` follow from `ρ_{K,−q} = (−1)^q conj(ρ_Kq)`.
pub fn moments_to_multipoles(samples: &[MomentSample], spin: HalfInt, k_max: usize) -> Result<Reconstruction> {
    if spin.twice() < 1 {
        return Err(Error::invalid("a spin-0 shell has no multipoles to reconstruct"));
    }
    if k_max < 1 {
        return Err(Error::invalid("K_max must be at least 1"));
    }
    if samples.is_empty() {
        return Err(Error::invalid("no moment samples"));
    }
    let max_rank = k_max.min(spin.twice() as usize);
    let basis = tensor_basis(spin);
    let triple = stokes_matrices(spin);
    let d = spin.dim();

    // Columns: for each K ≥ 1, q = 0 (real), then q = 1..K (re, im).
    let mut columns: Vec<(usize, i32, bool)> = Vec::new();
    for k in 1..=max_rank {
        columns.push((k, 0, false));
        for q in 1..=k as i32 {
            columns.push((k, q, false));
            columns.push((k, q, true));
        }
    }

    let monopole = 1.0 / (d as f64).sqrt();
    let mut design = DMatrix::<f64>::zeros(samples.len(), columns.len());
    let mut rhs = DVector::<f64>::zeros(samples.len());
    for (row, sample) in samples.iter().enumerate() {
        if sample.ell == 0 {
            return Err(Error::invalid("moment order must be at least 1"));
        }
        let power = matrix_power(&triple.along(&sample.direction), sample.ell);
        // a_Kq = Tr[T_Kq M]
        let coeff = |k: usize, q: i32| -> Complex64 {
            let t = basis.get(k, q).matrix();
            let mut acc = Complex64::from(0.0);
            for i in 0..d {
                for j in 0..d {
                    if t[(i, j)] != 0.0 {
                        acc += power[(j, i)] * t[(i, j)];
                    }
                }
            }
            acc
        };
        rhs[row] = sample.value - monopole * coeff(0, 0).re;
        for (col, &(k, q, imag)) in columns.iter().enumerate() {
            if k as u32 > sample.ell {
                continue;
            }
            let a = coeff(k, q);
            design[(row, col)] = if q == 0 {
                a.re
            } else {
                let b = coeff(k, -q);
                let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
                // ρ a + (−1)^q conj(ρ) b, real part, split over x = Re ρ, y = Im ρ.
                if imag {
                    -(a - b * sign).im
                } else {
                    (a + b * sign).re
                }
            };
        }
    }

    let svd = design.clone().svd(true, true);
    let s_max = svd.singular_values.max();
    let s_min = svd.singular_values.min();
    let condition_number = if s_min > 0.0 { s_max / s_min } else { f64::INFINITY };
    if samples.len() < columns.len() || s_min.is_nan() || s_min <= RANK_DEFICIENCY * s_max {
        return Err(Error::IllConditioned(format!(
            "moment design matrix is rank deficient ({} samples, {} unknowns, singular values {:.3e}..{:.3e}); \
             use at least 2K+1 well-spread directions with every order ℓ = 1..K",
            samples.len(),
            columns.len(),
            s_min,
            s_max
        )));
    }
    let x = svd.solve(&rhs, 0.0).map_err(|e| Error::IllConditioned(format!("least-squares solve failed: {e}")))?;
    let residual = (&design * &x - &rhs).norm();

    let mut components = vec![Complex64::from(0.0); (max_rank + 1) * (max_rank + 1)];
    components[0] = Complex64::from(monopole);
    let mut it = x.iter();
    for k in 1..=max_rank {
        components[component_index(k, 0)] = Complex64::from(*it.next().expect("column count"));
        for q in 1..=k as i32 {
            let re = *it.next().expect("column count");
            let im = *it.next().expect("column count");
            let c = Complex64::new(re, im);
            let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
            components[component_index(k, q)] = c;
            components[component_index(k, -q)] = c.conj() * sign;
        }
    }
    Ok(Reconstruction { spin, max_rank, components, residual, condition_number })
}

/// Well-spread direction set for reconstructing up to rank `k_max`:
/// `2K+1` spiral points.
pub fn reconstruction_directions(k_max: usize) -> Vec<Direction> {
    asymmetric_spiral(2 * k_max + 1)
}
