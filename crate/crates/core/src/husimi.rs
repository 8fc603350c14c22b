//! SU(2) Husimi Q-function `Q(θ, φ) = ⟨θ,φ|ρ|θ,φ⟩` sampled on a
//! Gauss–Legendre (in `cos θ`) × uniform-`φ` product grid.

use std::f64::consts::{PI, TAU};
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::angmom::HalfInt;
use crate::error::{Error, Result};
use crate::geometry::Direction;
use crate::report::fmt_f64;
use crate::states::{coherent_amplitudes, SpinSector};

/// Grid resolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { n_theta: 64, n_phi: 128 }
    }
}

impl GridSpec {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::invalid("grid needs at least one node in each direction"));
        }
        Ok(Self { n_theta, n_phi })
    }

    /// Whether the product rule integrates `Q` exactly. `Q` is a polynomial
    /// of degree `2S` in `cos θ`, `sin θ` with azimuthal orders up to `2S`.
    pub fn resolves(&self, spin: HalfInt) -> bool {
        let need = spin.twice() as usize + 1;
        self.n_theta >= need && self.n_phi >= need
    }
}

/// One grid node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QNode {
    pub direction: Direction,
    /// Solid-angle quadrature weight; the weights sum to `4π`.
    pub weight: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QGrid {
    pub spin: HalfInt,
    pub spec: GridSpec,
    /// Theta-major, phi-minor.
    pub nodes: Vec<QNode>,
    /// Set when the grid is too coarse for the normalization check to be
    /// exact.
    pub coarse: bool,
}

impl QGrid {
    /// `(2S+1)/(4π) Σ w Q`, which is 1 for any unit-trace state on a fine
    /// enough grid.
    pub fn normalization(&self) -> f64 {
        let d = self.spin.dim() as f64;
        d / (4.0 * PI) * self.nodes.iter().map(|n| n.weight * n.value).sum::<f64>()
    }

    pub fn max_node(&self) -> Option<&QNode> {
        self.nodes.iter().max_by(|a, b| a.value.total_cmp(&b.value))
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes descending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        // Tricomi's initial guess, refined by Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// `Q(θ, φ)` at one direction.
pub fn q_value(sector: &SpinSector, dir: Direction) -> f64 {
    let amps = coherent_amplitudes(sector.spin(), dir);
    let rho = sector.matrix();
    let mut acc = Complex64::from(0.0);
    for (i, a) in amps.iter().enumerate() {
        for (j, b) in amps.iter().enumerate() {
            acc += a.conj() * rho[(i, j)] * b;
        }
    }
    acc.re
}

/// Samples `Q` on the product grid. Node evaluations run in parallel;
/// the node order is fixed.
pub fn q_function(sector: &SpinSector, spec: GridSpec) -> QGrid {
    let (xs, ws) = gauss_legendre(spec.n_theta);
    let dphi = TAU / spec.n_phi as f64;
    let nodes = (0..spec.n_theta * spec.n_phi)
        .into_par_iter()
        .map(|idx| {
            let (it, ip) = (idx / spec.n_phi, idx % spec.n_phi);
            let direction = Direction { theta: xs[it].clamp(-1.0, 1.0).acos(), phi: ip as f64 * dphi };
            QNode { direction, weight: ws[it] * dphi, value: q_value(sector, direction) }
        })
        .collect();
    QGrid { spin: sector.spin(), spec, nodes, coarse: !spec.resolves(sector.spin()) }
}

/// Writes `theta,phi,weight,Q` rows; values use shortest round-trip
/// formatting so a re-read reproduces them bit for bit.
pub fn write_qgrid<W: Write>(grid: &QGrid, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["theta", "phi", "weight", "Q"])?;
    for n in &grid.nodes {
        w.write_record([fmt_f64(n.direction.theta), fmt_f64(n.direction.phi), fmt_f64(n.weight), fmt_f64(n.value)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn export_qgrid(grid: &QGrid, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_qgrid(grid, std::io::BufWriter::new(file))
}

/// Reads the node list back from the CSV written by [`write_qgrid`].
pub fn read_qgrid_nodes<R: Read>(input: R) -> Result<Vec<QNode>> {
    let mut r = csv::Reader::from_reader(input);
    let mut nodes = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let field = |i: usize| -> Result<f64> {
            rec.get(i)
                .ok_or_else(|| Error::Parse(format!("Q-grid row has {} fields, expected 4", rec.len())))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad number in Q-grid: {e}")))
        };
        nodes.push(QNode {
            direction: Direction { theta: field(0)?, phi: field(1)? },
            weight: field(2)?,
            value: field(3)?,
        });
    }
    Ok(nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::random_mixed;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // ∫ x^14 dx = 2/15, degree 2n - 2 = 14.
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((v - 2.0 / 15.0).abs() < 1e-14);
        assert!(x.windows(2).all(|p| p[0] > p[1]));
    }

    #[test]
    fn maximally_mixed_is_flat() {
        for two_s in 0..6 {
            let spin = HalfInt::from_twice(two_s);
            let g = q_function(&SpinSector::maximally_mixed(spin), GridSpec::new(8, 16).unwrap());
            let expected = 1.0 / spin.dim() as f64;
            assert!(g.nodes.iter().all(|n| (n.value - expected).abs() < 1e-14));
            assert!((g.normalization() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn coherent_state_peaks_at_its_direction() {
        let spin = HalfInt::from_twice(6);
        let spec = GridSpec::new(32, 64).unwrap();
        let (xs, _) = gauss_legendre(spec.n_theta);
        let target = Direction { theta: xs[10].acos(), phi: 17.0 * TAU / 64.0 };
        let g = q_function(&SpinSector::coherent(spin, target), spec);
        let best = g.max_node().unwrap();
        assert!((best.value - 1.0).abs() < 1e-12);
        assert!((best.direction.unit_vector() - target.unit_vector()).norm() < 1e-12);
    }

    #[test]
    fn three_photon_superposition_shape() {
        let h = FRAC_1_SQRT_2;
        let s = SpinSector::pure(HalfInt::from_twice(3), &[h.into(), 0.0.into(), 0.0.into(), h.into()]).unwrap();
        // Q = ½ |cos³(θ/2) + sin³(θ/2) e^{3iφ}|²: ½ at both poles and
        // (1 + cos 3φ)/8 on the equator.
        assert!((q_value(&s, Direction::north()) - 0.5).abs() < 1e-15);
        assert!((q_value(&s, Direction::new(PI, 0.0).unwrap()) - 0.5).abs() < 1e-15);
        for k in 0..12 {
            let phi = k as f64 * TAU / 12.0;
            let q = q_value(&s, Direction::new(FRAC_PI_2, phi).unwrap());
            assert!((q - (1.0 + (3.0 * phi).cos()) / 8.0).abs() < 1e-15);
        }
    }

    #[test]
    fn coarse_grid_flagged() {
        let s = SpinSector::maximally_mixed(HalfInt::from_twice(6));
        assert!(q_function(&s, GridSpec::new(4, 16).unwrap()).coarse);
        assert!(!q_function(&s, GridSpec::new(7, 7).unwrap()).coarse);
        assert!(GridSpec::new(0, 3).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let s = random_mixed(HalfInt::from_twice(3), 2, &mut rng);
        let g = q_function(&s, GridSpec::new(6, 10).unwrap());
        let mut buf = Vec::new();
        write_qgrid(&g, &mut buf).unwrap();
        let back = read_qgrid_nodes(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 60);
        assert_eq!(back, g.nodes);
    }
}
