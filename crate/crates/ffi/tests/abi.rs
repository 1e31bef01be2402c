use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use apotential_ffi::*;

fn last_error() -> String {
    let p = apot_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn div2_triple() -> *mut ApotTriple {
    let name = CString::new("div2").unwrap();
    let mut op = ptr::null_mut();
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(apot_operator_fixture(name.as_ptr(), &mut op), ApotStatus::Ok);
        assert_eq!(apot_triple_synthesize(op, &mut t), ApotStatus::Ok);
        apot_operator_free(op);
    }
    t
}

#[test]
fn synthesize_generate_solve() {
    let t = div2_triple();
    unsafe {
        let (mut d, mut n, mut l) = (0usize, 0usize, 0u32);
        assert_eq!(
            apot_triple_shape(t, &mut d, &mut n, ptr::null_mut(), &mut l, ptr::null_mut()),
            ApotStatus::Ok
        );
        assert_eq!((d, n, l), (2, 2, 2));
        let mut passed = false;
        assert_eq!(apot_triple_verify(t, 20, 1, &mut passed), ApotStatus::Ok);
        assert!(passed);

        let dims = [16usize, 16];
        let mut u = ptr::null_mut();
        assert_eq!(apot_gen_afree(t, dims.as_ptr(), 2, 3, 7, &mut u), ApotStatus::Ok);
        let mut norm = 0.0;
        assert_eq!(apot_lp_norm(u, 2.0, &mut norm), ApotStatus::Ok);
        assert!((norm - 1.0).abs() < 1e-12, "{norm}");

        let mut phi = ptr::null_mut();
        assert_eq!(apot_solve(t, u, 1e-10, &mut phi), ApotStatus::Ok);
        assert_eq!(apot_field_components(phi), 2);
        let mut values = vec![0.0; apot_field_len(phi)];
        assert_eq!(
            apot_field_copy_values(phi, values.as_mut_ptr(), values.len()),
            ApotStatus::Ok
        );
        assert!(values.iter().any(|v| *v != 0.0));
        assert_eq!(
            apot_field_copy_values(phi, values.as_mut_ptr(), 3),
            ApotStatus::DimensionMismatch
        );

        apot_field_free(phi);
        apot_field_free(u);
        apot_triple_free(t);
    }
}

#[test]
fn json_round_trips() {
    let t = div2_triple();
    unsafe {
        let mut json = ptr::null_mut();
        assert_eq!(apot_triple_to_json(t, &mut json), ApotStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(apot_triple_from_json(json, &mut back), ApotStatus::Ok);
        let mut again = ptr::null_mut();
        assert_eq!(apot_triple_to_json(back, &mut again), ApotStatus::Ok);
        assert_eq!(CStr::from_ptr(json), CStr::from_ptr(again));
        apot_string_free(json);
        apot_string_free(again);
        apot_triple_free(back);
        apot_triple_free(t);

        let bad = CString::new("{\"d\": 2}").unwrap();
        let mut op = ptr::null_mut();
        assert_eq!(apot_operator_from_json(bad.as_ptr(), &mut op), ApotStatus::Parse);
        assert!(op.is_null());
        assert!(last_error().contains("json"));
    }
}

#[test]
fn errors_map_to_status_codes() {
    let t = div2_triple();
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(apot_operator_fixture(ptr::null(), &mut out), ApotStatus::NullPointer);
        let name = CString::new("nope").unwrap();
        assert_eq!(
            apot_operator_fixture(name.as_ptr(), &mut out),
            ApotStatus::InvalidArgument
        );
        assert!(last_error().contains("nope"));

        // A constant field has nonzero mean.
        let dims = [4usize, 4];
        let values = vec![1.0; 32];
        let mut u = ptr::null_mut();
        assert_eq!(
            apot_field_new(dims.as_ptr(), 2, 2, values.as_ptr(), values.len(), &mut u),
            ApotStatus::Ok
        );
        let mut phi = ptr::null_mut();
        assert_eq!(apot_solve(t, u, 1e-10, &mut phi), ApotStatus::NonzeroMean);
        assert!(phi.is_null());
        assert_eq!(
            apot_field_new(dims.as_ptr(), 2, 3, values.as_ptr(), values.len(), &mut u),
            ApotStatus::DimensionMismatch
        );

        let mut violations = usize::MAX;
        assert_eq!(
            apot_jensen_batch(4, 8, 2, 1.0, 1, 0, &mut violations),
            ApotStatus::InvalidArgument
        );
        assert_eq!(apot_jensen_batch(2, 16, 3, 1.0, 3, 0, &mut violations), ApotStatus::Ok);
        assert_eq!(violations, 0);

        apot_field_free(u);
        apot_triple_free(t);
        apot_operator_free(ptr::null_mut());
        apot_string_free(ptr::null_mut());
    }
}

#[test]
fn fields_survive_the_file_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("f.afld").to_str().unwrap()).unwrap();
    let dims = [4usize, 6];
    let values: Vec<f64> = (0..24).map(|i| i as f64 * 0.5).collect();
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(
            apot_field_new(dims.as_ptr(), 2, 1, values.as_ptr(), 24, &mut f),
            ApotStatus::Ok
        );
        assert_eq!(apot_field_write(f, path.as_ptr()), ApotStatus::Ok);
        let mut g = ptr::null_mut();
        assert_eq!(apot_field_read(path.as_ptr(), &mut g), ApotStatus::Ok);
        let mut back = vec![0.0; 24];
        assert_eq!(apot_field_copy_values(g, back.as_mut_ptr(), 24), ApotStatus::Ok);
        assert_eq!(back, values);
        apot_field_free(f);
        apot_field_free(g);
    }
}

#[test]
fn header_declares_the_abi_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/apotential.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "apot_triple_synthesize",
        "apot_solve",
        "apot_string_free",
        "APOT_STATUS_NOT_A_FREE",
    ] {
        assert!(text.contains(name), "{name} missing from the header");
    }
    // Syntax check with the system C compiler when one is installed.
    if let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .status()
    {
        assert!(status.success());
    }
}
