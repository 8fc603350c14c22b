//! C ABI for the `polmulti` library.
//!
//! Every fallible function returns a [`PmStatus`] and writes results through
//! out-pointers. On failure, `pm_last_error` returns a message for the calling
//! thread. Handles are opaque and must be released with their `_free`
//! function. Spins and projections are passed doubled (`two_s = 2S`).
//!
//! # Safety
//!
//! Handle arguments must be null or pointers obtained from this library and
//! not yet freed. Array arguments must point to at least `len` readable
//! (or, for outputs, writable) doubles. Out-pointers must be null or valid for
//! one write. Null handles and out-pointers are reported as
//! `PM_STATUS_NULL_POINTER`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use polmulti::geometry::{Direction, EulerAngles};
use polmulti::io::StateFile;
use polmulti::multipole::{coherent_cumulative_max, state_multipoles};
use polmulti::states::DEFAULT_VALIDATION_TOL;
use polmulti::{clebsch_gordan, CMatrix, Error, HalfInt, MultipoleSpectrum, SpinSector};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Validation = 3,
    Infeasible = 4,
    IllConditioned = 5,
    Tolerance = 6,
    Parse = 7,
    Io = 8,
    Panic = 9,
}

/// A validated spin-S density matrix.
pub struct PmSector {
    inner: SpinSector,
}

/// Multipole components of one sector.
pub struct PmSpectrum {
    inner: MultipoleSpectrum,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> PmStatus {
    match e {
        Error::InvalidArgument(_) => PmStatus::InvalidArgument,
        Error::Validation(_) => PmStatus::Validation,
        Error::Infeasible(_) => PmStatus::Infeasible,
        Error::IllConditioned(_) => PmStatus::IllConditioned,
        Error::Tolerance(_) => PmStatus::Tolerance,
        Error::Parse(_) | Error::Json(_) | Error::Csv(_) => PmStatus::Parse,
        Error::Io(_) => PmStatus::Io,
    }
}

struct Fail(PmStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(PmStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PmStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside polmulti".into());
            PmStatus::Panic
        }
    }
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn sector_ref<'a>(p: *const PmSector) -> Result<&'a SpinSector, Fail> {
    p.as_ref().map(|s| &s.inner).ok_or_else(|| null("sector"))
}

unsafe fn spectrum_ref<'a>(p: *const PmSpectrum) -> Result<&'a MultipoleSpectrum, Fail> {
    p.as_ref().map(|s| &s.inner).ok_or_else(|| null("spectrum"))
}

unsafe fn emit_sector(out: *mut *mut PmSector, inner: SpinSector) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(Box::into_raw(Box::new(PmSector { inner })));
    Ok(())
}

unsafe fn slice<'a>(p: *const f64, len: usize) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null("input array"));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// Message for the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub unsafe extern "C" fn pm_sector_maximally_mixed(two_s: i32, out: *mut *mut PmSector) -> PmStatus {
    guard(|| emit_sector(out, SpinSector::maximally_mixed(HalfInt::spin(two_s)?)))
}

#[no_mangle]
pub unsafe extern "C" fn pm_sector_fock(two_s: i32, two_m: i32, out: *mut *mut PmSector) -> PmStatus {
    guard(|| emit_sector(out, SpinSector::fock(HalfInt::spin(two_s)?, HalfInt::from_twice(two_m))?))
}

#[no_mangle]
pub unsafe extern "C" fn pm_sector_coherent(two_s: i32, theta: f64, phi: f64, out: *mut *mut PmSector) -> PmStatus {
    guard(|| emit_sector(out, SpinSector::coherent(HalfInt::spin(two_s)?, Direction::new(theta, phi)?)))
}

/// Diagonal sector from `2S + 1` probabilities ordered by descending `m`.
#[no_mangle]
pub unsafe extern "C" fn pm_sector_diagonal(
    two_s: i32,
    probabilities: *const f64,
    len: usize,
    out: *mut *mut PmSector,
) -> PmStatus {
    guard(|| {
        let p = slice(probabilities, len)?;
        emit_sector(out, SpinSector::diagonal(HalfInt::spin(two_s)?, p)?)
    })
}

/// Sector from a row-major matrix of interleaved `(re, im)` pairs, `m`
/// descending; `len` must be `2 d²`. The matrix is validated.
#[no_mangle]
pub unsafe extern "C" fn pm_sector_from_matrix(
    two_s: i32,
    re_im: *const f64,
    len: usize,
    out: *mut *mut PmSector,
) -> PmStatus {
    guard(|| {
        let spin = HalfInt::spin(two_s)?;
        let d = spin.dim();
        let data = slice(re_im, len)?;
        if data.len() != 2 * d * d {
            return Err(Fail(PmStatus::InvalidArgument, format!("expected {} doubles, got {len}", 2 * d * d)));
        }
        let m = CMatrix::from_fn(d, d, |i, j| Complex64::new(data[2 * (i * d + j)], data[2 * (i * d + j) + 1]));
        emit_sector(out, SpinSector::new(spin, m)?)
    })
}

/// Parses a single-sector JSON state file.
#[no_mangle]
pub unsafe extern "C" fn pm_sector_from_json(json: *const c_char, out: *mut *mut PmSector) -> PmStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Fail(PmStatus::Parse, format!("state file is not UTF-8: {e}")))?;
        let file = StateFile::from_json(text)?;
        if file.sectors.len() != 1 {
            return Err(Fail(PmStatus::InvalidArgument, format!("expected one sector, found {}", file.sectors.len())));
        }
        emit_sector(out, file.sectors[0].to_sector(DEFAULT_VALIDATION_TOL)?)
    })
}

#[no_mangle]
pub unsafe extern "C" fn pm_sector_free(sector: *mut PmSector) {
    if !sector.is_null() {
        drop(Box::from_raw(sector));
    }
}

/// `2S + 1`, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn pm_sector_dim(sector: *const PmSector) -> usize {
    sector.as_ref().map_or(0, |s| s.inner.dim())
}

/// Copies the density matrix as interleaved `(re, im)` pairs into `buf`,
/// which must hold `2 d²` doubles.
#[no_mangle]
pub unsafe extern "C" fn pm_sector_matrix(sector: *const PmSector, buf: *mut f64, len: usize) -> PmStatus {
    guard(|| {
        let s = sector_ref(sector)?;
        let d = s.dim();
        if buf.is_null() {
            return Err(null("buffer"));
        }
        if len < 2 * d * d {
            return Err(Fail(PmStatus::InvalidArgument, format!("buffer holds {len} doubles, need {}", 2 * d * d)));
        }
        let out = std::slice::from_raw_parts_mut(buf, 2 * d * d);
        for i in 0..d {
            for j in 0..d {
                let z = s.matrix()[(i, j)];
                out[2 * (i * d + j)] = z.re;
                out[2 * (i * d + j) + 1] = z.im;
            }
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn pm_sector_purity(sector: *const PmSector, out: *mut f64) -> PmStatus {
    guard(|| write_out(out, sector_ref(sector)?.purity()))
}

/// New sector `D ρ D†` for z-y-z Euler angles.
#[no_mangle]
pub unsafe extern "C" fn pm_sector_rotate(
    sector: *const PmSector,
    alpha: f64,
    beta: f64,
    gamma: f64,
    out: *mut *mut PmSector,
) -> PmStatus {
    guard(|| {
        let s = sector_ref(sector)?;
        emit_sector(out, s.rotate(&EulerAngles::new(alpha, beta, gamma)?))
    })
}

/// Husimi Q at a direction on the sphere.
#[no_mangle]
pub unsafe extern "C" fn pm_sector_q_value(sector: *const PmSector, theta: f64, phi: f64, out: *mut f64) -> PmStatus {
    guard(|| {
        let s = sector_ref(sector)?;
        write_out(out, polmulti::husimi::q_value(s, Direction::new(theta, phi)?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn pm_spectrum_new(sector: *const PmSector, out: *mut *mut PmSpectrum) -> PmStatus {
    guard(|| {
        let s = sector_ref(sector)?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        out.write(Box::into_raw(Box::new(PmSpectrum { inner: state_multipoles(s) })));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn pm_spectrum_free(spectrum: *mut PmSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// Highest rank `2S`, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn pm_spectrum_max_rank(spectrum: *const PmSpectrum) -> usize {
    spectrum.as_ref().map_or(0, |s| s.inner.max_rank())
}

/// `ρ_Kq = Tr[ρ T_Kq†]`.
#[no_mangle]
pub unsafe extern "C" fn pm_spectrum_component(
    spectrum: *const PmSpectrum,
    rank: usize,
    q: i32,
    re: *mut f64,
    im: *mut f64,
) -> PmStatus {
    guard(|| {
        let c = spectrum_ref(spectrum)?.component(rank, q)?;
        write_out(re, c.re)?;
        write_out(im, c.im)
    })
}

/// `W_K`, rank 0 allowed.
#[no_mangle]
pub unsafe extern "C" fn pm_spectrum_strength(spectrum: *const PmSpectrum, rank: usize, out: *mut f64) -> PmStatus {
    guard(|| write_out(out, spectrum_ref(spectrum)?.strength(rank)?))
}

/// `A_K` for `1 ≤ K ≤ 2S`.
#[no_mangle]
pub unsafe extern "C" fn pm_spectrum_cumulative(spectrum: *const PmSpectrum, rank: usize, out: *mut f64) -> PmStatus {
    guard(|| write_out(out, spectrum_ref(spectrum)?.cumulative(rank)?))
}

/// `P_K` for `1 ≤ K ≤ 2S`.
#[no_mangle]
pub unsafe extern "C" fn pm_spectrum_degree(spectrum: *const PmSpectrum, rank: usize, out: *mut f64) -> PmStatus {
    guard(|| write_out(out, spectrum_ref(spectrum)?.degree(rank)?))
}

/// Largest `K` with `A_K ≤ tol`.
#[no_mangle]
pub unsafe extern "C" fn pm_spectrum_unpolarization_order(
    spectrum: *const PmSpectrum,
    tol: f64,
    out: *mut usize,
) -> PmStatus {
    guard(|| {
        if tol.is_nan() || tol <= 0.0 {
            return Err(Fail(PmStatus::InvalidArgument, format!("tolerance must be positive, got {tol}")));
        }
        write_out(out, spectrum_ref(spectrum)?.unpolarization_order(tol))
    })
}

/// `A_K` of an SU(2) coherent state.
#[no_mangle]
pub unsafe extern "C" fn pm_coherent_cumulative_max(two_s: i32, rank: usize, out: *mut f64) -> PmStatus {
    guard(|| write_out(out, coherent_cumulative_max(HalfInt::spin(two_s)?, rank)?))
}

/// `⟨j1 m1 j2 m2 | J M⟩` with every argument doubled.
#[no_mangle]
pub unsafe extern "C" fn pm_clebsch_gordan(
    two_j1: i32,
    two_m1: i32,
    two_j2: i32,
    two_m2: i32,
    two_j: i32,
    two_m: i32,
    out: *mut f64,
) -> PmStatus {
    guard(|| {
        let h = HalfInt::from_twice;
        let c = clebsch_gordan(h(two_j1), h(two_m1), h(two_j2), h(two_m2), h(two_j), h(two_m))?;
        write_out(out, c.to_f64())
    })
}
