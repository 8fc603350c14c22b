//! Multipole analysis of quantum polarization states.
//!
//! A two-mode field state is reduced to its polarization sector, a direct sum
//! of spin-`S` density matrices (one per photon-number shell `N = 2S`). Each
//! shell is expanded over irreducible tensor operators `T_Kq`; the resulting
//! state multipoles `ρ_Kq` give the multipole strengths `W_K`, the cumulative
//! distribution `A_K`, and the hierarchy of degrees of polarization `P_K`.
//! A state is `K`th-order unpolarized when every multipole of rank `1..=K`
//! vanishes.
//!
//! Module map:
//!
//! - [`angmom`]: exact Clebsch–Gordan coefficients and Wigner rotation matrices
//! - [`geometry`]: Euler angles, directions on the sphere, direction sets
//! - [`states`]: spin sectors and polarization states
//! - [`multipole`]: tensor operators, multipole spectra, unpolarization order
//! - [`stokes`]: Stokes matrices, directional moments, moment inversion
//! - [`husimi`]: SU(2) Q-function on Gauss–Legendre grids
//! - [`search`]: maximum-purity and anticoherent state searches, family scans
//! - [`io`], [`report`]: file formats
//! - [`cli`]: the `polmulti` command line

pub mod angmom;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod husimi;
pub mod io;
pub mod multipole;
pub mod report;
pub mod search;
pub mod states;
pub mod stokes;

pub use angmom::{clebsch_gordan, wigner_big_d, wigner_small_d, HalfInt, SignedSqrtRational};
pub use error::{Error, Result};
pub use geometry::{Direction, EulerAngles};
pub use multipole::{MultipoleSpectrum, TensorOperator};
pub use states::{PolarizationState, SpinSector};

/// Dense complex matrix in the `|S, m⟩` basis, rows and columns ordered by
/// descending `m`.
pub type CMatrix = nalgebra::DMatrix<num_complex::Complex64>;
