use std::ffi::{CStr, CString};
use std::ptr;

use polmulti_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(pm_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn diagonal_sector_multipoles() {
    unsafe {
        let p = [0.25, 0.0, 0.75, 0.0];
        let mut s = ptr::null_mut();
        assert_eq!(pm_sector_diagonal(3, p.as_ptr(), p.len(), &mut s), PmStatus::Ok);
        assert_eq!(pm_sector_dim(s), 4);
        let mut purity = 0.0;
        assert_eq!(pm_sector_purity(s, &mut purity), PmStatus::Ok);
        assert!((purity - 0.625).abs() < 1e-14);

        let mut sp = ptr::null_mut();
        assert_eq!(pm_spectrum_new(s, &mut sp), PmStatus::Ok);
        assert_eq!(pm_spectrum_max_rank(sp), 3);
        let (mut a1, mut w2) = (1.0, 0.0);
        assert_eq!(pm_spectrum_cumulative(sp, 1, &mut a1), PmStatus::Ok);
        assert_eq!(pm_spectrum_strength(sp, 2, &mut w2), PmStatus::Ok);
        assert!(a1 < 1e-14);
        assert!((w2 - 0.0625).abs() < 1e-14);
        let mut order = 99;
        assert_eq!(pm_spectrum_unpolarization_order(sp, 1e-10, &mut order), PmStatus::Ok);
        assert_eq!(order, 1);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(pm_spectrum_component(sp, 2, 0, &mut re, &mut im), PmStatus::Ok);
        assert!((re + 0.25).abs() < 1e-14 && im == 0.0);
        pm_spectrum_free(sp);
        pm_sector_free(s);
    }
}

#[test]
fn errors_carry_status_and_message() {
    unsafe {
        let mut s = ptr::null_mut();
        let bad = [0.6, 0.6, -0.2, 0.0];
        assert_eq!(pm_sector_diagonal(3, bad.as_ptr(), 4, &mut s), PmStatus::InvalidArgument);
        assert!(s.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(pm_sector_maximally_mixed(-1, &mut s), PmStatus::InvalidArgument);
        assert_eq!(pm_sector_purity(ptr::null(), &mut 0.0), PmStatus::NullPointer);
        assert!(last_error().contains("null"));

        let m = [1.2, 0.0, 0.0, 0.0, 0.0, 0.0, -0.2, 0.0];
        assert_eq!(pm_sector_from_matrix(1, m.as_ptr(), m.len(), &mut s), PmStatus::Validation);
        assert_eq!(pm_sector_from_matrix(1, m.as_ptr(), 6, &mut s), PmStatus::InvalidArgument);

        let mut x = 0.0;
        assert_eq!(pm_coherent_cumulative_max(2, 3, &mut x), PmStatus::InvalidArgument);
        let json = CString::new("{ not json").unwrap();
        assert_eq!(pm_sector_from_json(json.as_ptr(), &mut s), PmStatus::Parse);
    }
}

#[test]
fn rotation_and_round_trip() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(pm_sector_fock(2, 0, &mut s), PmStatus::Ok);
        let mut r = ptr::null_mut();
        assert_eq!(pm_sector_rotate(s, 0.3, 1.1, -0.4, &mut r), PmStatus::Ok);
        let mut buf = vec![0.0; 18];
        assert_eq!(pm_sector_matrix(r, buf.as_mut_ptr(), buf.len()), PmStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(pm_sector_from_matrix(2, buf.as_ptr(), buf.len(), &mut back), PmStatus::Ok);
        let mut p = 0.0;
        pm_sector_purity(back, &mut p);
        assert!((p - 1.0).abs() < 1e-12);
        assert_eq!(pm_sector_matrix(r, buf.as_mut_ptr(), 17), PmStatus::InvalidArgument);
        pm_sector_free(back);
        pm_sector_free(r);
        pm_sector_free(s);
        pm_sector_free(ptr::null_mut());
    }
}

#[test]
fn json_coherent_and_scalars() {
    unsafe {
        let json =
            CString::new(r#"{"sectors":[{"two_S":4,"weight":1,"form":"coherent","data":{"theta":0.5,"phi":1.0}}]}"#)
                .unwrap();
        let mut s = ptr::null_mut();
        assert_eq!(pm_sector_from_json(json.as_ptr(), &mut s), PmStatus::Ok);
        let mut q = 0.0;
        assert_eq!(pm_sector_q_value(s, 0.5, 1.0, &mut q), PmStatus::Ok);
        assert!((q - 1.0).abs() < 1e-12);
        let mut sp = ptr::null_mut();
        pm_spectrum_new(s, &mut sp);
        let (mut a, mut amax) = (0.0, 0.0);
        pm_spectrum_cumulative(sp, 2, &mut a);
        assert_eq!(pm_coherent_cumulative_max(4, 2, &mut amax), PmStatus::Ok);
        assert!((a - amax).abs() < 1e-12);
        let mut deg = 0.0;
        pm_spectrum_degree(sp, 4, &mut deg);
        assert!((deg - 1.0).abs() < 1e-12);
        pm_spectrum_free(sp);
        pm_sector_free(s);

        let mut cg = 0.0;
        assert_eq!(pm_clebsch_gordan(1, 1, 1, -1, 2, 0, &mut cg), PmStatus::Ok);
        assert!((cg - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(!CStr::from_ptr(pm_version()).to_bytes().is_empty());
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/polmulti.h")).unwrap();
    for name in [
        "pm_last_error",
        "pm_sector_diagonal",
        "pm_sector_from_matrix",
        "pm_sector_from_json",
        "pm_sector_rotate",
        "pm_spectrum_new",
        "pm_spectrum_cumulative",
        "pm_spectrum_unpolarization_order",
        "pm_coherent_cumulative_max",
        "pm_clebsch_gordan",
        "PM_STATUS_ILL_CONDITIONED",
        "typedef struct PmSector PmSector",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

#[test]
fn c_smoke_program() {
    use std::path::PathBuf;
    use std::process::Command;

    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let target = std::env::var_os("CARGO_TARGET_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| manifest.join("../../target"))
        .join("debug");
    let lib = target.join("libpolmulti_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("pm_smoke");
    let status = Command::new("cc")
        .arg(manifest.join("examples/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "purity=0.388888888889 order=2");
}
