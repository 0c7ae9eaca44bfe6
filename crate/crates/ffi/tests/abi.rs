use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use sbs_monitor::spin_model::{decoherence_factor, SpinParams};
use sbs_monitor_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; sbs_last_error_length() + 1];
    assert_eq!(
        unsafe { sbs_last_error_message(buf.as_mut_ptr(), buf.len()) },
        SbsStatus::Ok
    );
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn spin_set_matches_core() {
    let params = [(0.3, 1.1, 0.2, 0.9, 0.4), (1.0, 0.5, 2.0, 0.7, 0.8)];
    let set = sbs_spin_set_new();
    for &(a, b, c, l, g) in &params {
        assert_eq!(unsafe { sbs_spin_set_push(set, a, b, c, l, g) }, SbsStatus::Ok);
    }
    let mut len = 0;
    assert_eq!(unsafe { sbs_spin_set_len(set, &mut len) }, SbsStatus::Ok);
    assert_eq!(len, 2);

    let spins: Vec<SpinParams> = params
        .iter()
        .map(|&(a, b, c, l, g)| SpinParams::new(a, b, c, l, g).unwrap())
        .collect();
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(
        unsafe { sbs_decoherence_factor(set, 3.0, &mut re, &mut im) },
        SbsStatus::Ok
    );
    let z = decoherence_factor(&spins, 3.0);
    assert_eq!((re, im), (z.re, z.im));
    unsafe { sbs_spin_set_free(set) };
}

#[test]
fn errors_are_reported() {
    let set = sbs_spin_set_new();
    assert_eq!(
        unsafe { sbs_spin_set_push(set, 0.0, 0.0, 0.0, 1.5, 1.0) },
        SbsStatus::InvalidArgument
    );
    assert!(last_error().contains("lambda"));
    let mut out = 0.0;
    assert_eq!(
        unsafe { sbs_macrofraction_fidelity(set, f64::NAN, &mut out) },
        SbsStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { sbs_macrofraction_fidelity(ptr::null(), 1.0, &mut out) },
        SbsStatus::NullPointer
    );
    assert!(last_error().contains("spin set"));
    assert_eq!(unsafe { sbs_macrofraction_fidelity(set, 1.0, &mut out) }, SbsStatus::Ok);
    assert_eq!(out, 1.0, "empty set has unit fidelity");
    assert!(last_error().is_empty());
    unsafe { sbs_spin_set_free(set) };
    unsafe { sbs_spin_set_free(ptr::null_mut()) };
}

#[test]
fn truncated_error_message_is_terminated() {
    assert_eq!(
        unsafe { sbs_majority_success(3, 0.5, ptr::null_mut()) },
        SbsStatus::NullPointer
    );
    let mut buf = [1 as c_char; 4];
    assert_eq!(
        unsafe { sbs_last_error_message(buf.as_mut_ptr(), buf.len()) },
        SbsStatus::Ok
    );
    assert_eq!(buf[3], 0);
}

#[test]
fn config_roundtrip_and_run() {
    let toml = CString::new("samples = 0\n").unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(
        unsafe { sbs_config_from_toml(toml.as_ptr(), &mut cfg) },
        SbsStatus::Config
    );
    assert!(last_error().contains("samples"));
    assert!(cfg.is_null());

    assert_eq!(unsafe { sbs_config_default(&mut cfg) }, SbsStatus::Ok);
    assert_eq!(unsafe { sbs_config_set_seed(cfg, 9) }, SbsStatus::Ok);
    assert_eq!(unsafe { sbs_config_set_samples(cfg, 0) }, SbsStatus::Config);

    let dir = tempfile::tempdir().unwrap();
    let out = CString::new(dir.path().to_str().unwrap()).unwrap();
    let scenario = CString::new("timescales").unwrap();
    let mut code = -1;
    assert_eq!(
        unsafe { sbs_run_scenario(cfg, scenario.as_ptr(), out.as_ptr(), &mut code) },
        SbsStatus::Ok
    );
    assert_eq!(code, 0);
    assert!(dir.path().join("timescales.csv").exists());

    let bogus = CString::new("fig9").unwrap();
    assert_eq!(
        unsafe { sbs_run_scenario(cfg, bogus.as_ptr(), out.as_ptr(), &mut code) },
        SbsStatus::InvalidArgument
    );
    unsafe { sbs_config_free(cfg) };
}

#[test]
fn version_is_terminated() {
    let v = unsafe { CStr::from_ptr(sbs_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

/// target/<profile>/ from target/<profile>/deps/<test-binary>.
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_header() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header_dir = manifest.join("include");
    assert!(header_dir.join("sbs_monitor.h").exists());
    let lib = profile_dir().join("libsbs_monitor_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());

    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".to_string());
    let status = Command::new(cc)
        .args(["-std=c11", "-D_DEFAULT_SOURCE", "-Wall", "-Werror"])
        .arg("-I")
        .arg(&header_dir)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler runs");
    assert!(status.success());
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
