use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use nashmg_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(nashmg_last_error()) }.to_string_lossy().into_owned()
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { nashmg_string_free(p) };
    s
}

#[test]
fn game_handle_lifecycle() {
    let mut game = ptr::null_mut();
    assert_eq!(unsafe { nashmg_game_generate(3, 2, 4, 3, 7, &mut game) }, NashmgStatus::Ok);
    assert!(!game.is_null());
    let (mut h, mut s, mut a, mut b) = (0, 0, 0, 0);
    assert_eq!(unsafe { nashmg_game_dims(game, &mut h, &mut s, &mut a, &mut b) }, NashmgStatus::Ok);
    assert_eq!((h, s, a, b), (3, 3, 2, 4));

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { nashmg_game_to_json(game, &mut json) }, NashmgStatus::Ok);
    let text = take_string(json);
    let expected = nashmg::generate_random_mg(3, 2, 4, 3, 7).unwrap().to_bytes();
    assert_eq!(text.as_bytes(), expected.as_slice());

    let c = CString::new(text).unwrap();
    let mut copy = ptr::null_mut();
    assert_eq!(unsafe { nashmg_game_from_json(c.as_ptr(), &mut copy) }, NashmgStatus::Ok);
    unsafe {
        nashmg_game_free(copy);
        nashmg_game_free(game);
        nashmg_game_free(ptr::null_mut());
    }
}

#[test]
fn solve_and_evaluate_through_handles() {
    let mut game = ptr::null_mut();
    assert_eq!(unsafe { nashmg_game_generate(3, 3, 3, 3, 1, &mut game) }, NashmgStatus::Ok);
    let mut value = f64::NAN;
    let mut pair = ptr::null_mut();
    assert_eq!(unsafe { nashmg_game_solve(game, &mut value, &mut pair) }, NashmgStatus::Ok);
    let g = nashmg::generate_random_mg(3, 3, 3, 3, 1).unwrap();
    assert_eq!(value, nashmg::oracle::exact_nash_solve(&g).unwrap().value(&g));

    let mut gap = f64::NAN;
    assert_eq!(unsafe { nashmg_exploitability(game, pair, 0, &mut gap) }, NashmgStatus::Ok);
    assert!(gap.abs() <= 1e-6);

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { nashmg_policy_pair_to_json(pair, &mut json) }, NashmgStatus::Ok);
    let c = CString::new(take_string(json)).unwrap();
    let mut reparsed = ptr::null_mut();
    assert_eq!(unsafe { nashmg_policy_pair_from_json(c.as_ptr(), &mut reparsed) }, NashmgStatus::Ok);
    let mut gap2 = f64::NAN;
    assert_eq!(unsafe { nashmg_exploitability(game, reparsed, 0, &mut gap2) }, NashmgStatus::Ok);
    assert_eq!(gap, gap2);
    unsafe {
        nashmg_policy_pair_free(reparsed);
        nashmg_policy_pair_free(pair);
        nashmg_game_free(game);
    }
}

#[test]
fn matrix_solver_on_raw_buffers() {
    let entries = [2.0, -1.0, -1.0, 1.0];
    let (mut x, mut y) = ([0.0; 2], [0.0; 2]);
    let (mut v, mut eps) = (0.0, -1.0);
    let status = unsafe { nashmg_solve_matrix(2, 2, entries.as_ptr(), 1e-8, x.as_mut_ptr(), y.as_mut_ptr(), &mut v, &mut eps) };
    assert_eq!(status, NashmgStatus::Ok);
    assert!((v - 0.2).abs() < 1e-9);
    assert!((x[0] - 0.4).abs() < 1e-9 && (y[0] - 0.4).abs() < 1e-9);
    assert!((0.0..=1e-8).contains(&eps));

    let status = unsafe { nashmg_solve_matrix(2, 2, entries.as_ptr(), 1e-8, x.as_mut_ptr(), y.as_mut_ptr(), &mut v, ptr::null_mut()) };
    assert_eq!(status, NashmgStatus::Ok);
}

#[test]
fn errors_map_to_codes_and_messages() {
    let mut game = ptr::null_mut();
    assert_eq!(unsafe { nashmg_game_generate(3, 3, 3, 3, 0, ptr::null_mut()) }, NashmgStatus::NullPointer);
    assert!(last_error().contains("out"));
    assert_eq!(unsafe { nashmg_game_generate(0, 3, 3, 3, 0, &mut game) }, NashmgStatus::InvalidArgument);
    assert!(!last_error().is_empty());
    assert!(game.is_null());

    let bad = CString::new("{\"S\": 1}").unwrap();
    assert_eq!(unsafe { nashmg_game_from_json(bad.as_ptr(), &mut game) }, NashmgStatus::MalformedInput);
    let missing = CString::new("/nonexistent/env.json").unwrap();
    assert_eq!(unsafe { nashmg_game_load(missing.as_ptr(), &mut game) }, NashmgStatus::Io);

    let entries = [1.0, f64::NAN];
    let (mut x, mut y, mut v) = ([0.0; 1], [0.0; 2], 0.0);
    let status = unsafe { nashmg_solve_matrix(1, 2, entries.as_ptr(), 1e-8, x.as_mut_ptr(), y.as_mut_ptr(), &mut v, ptr::null_mut()) };
    assert_eq!(status, NashmgStatus::InvalidArgument);

    let mut other = ptr::null_mut();
    assert_eq!(unsafe { nashmg_game_generate(2, 2, 2, 2, 0, &mut other) }, NashmgStatus::Ok);
    assert!(last_error().is_empty());
    let mut small = ptr::null_mut();
    assert_eq!(unsafe { nashmg_game_generate(3, 3, 3, 3, 0, &mut small) }, NashmgStatus::Ok);
    let mut pair = ptr::null_mut();
    let mut value = 0.0;
    assert_eq!(unsafe { nashmg_game_solve(small, &mut value, &mut pair) }, NashmgStatus::Ok);
    let mut gap = 0.0;
    assert_eq!(unsafe { nashmg_exploitability(other, pair, 0, &mut gap) }, NashmgStatus::DimensionMismatch);
    unsafe {
        nashmg_policy_pair_free(pair);
        nashmg_game_free(small);
        nashmg_game_free(other);
    }
}

#[test]
fn version_matches_package() {
    let v = unsafe { CStr::from_ptr(nashmg_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn generated_header_declares_the_api_and_compiles() {
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let header = std::fs::read_to_string(include.join("nashmg.h")).unwrap();
    for name in [
        "nashmg_last_error",
        "nashmg_game_generate",
        "nashmg_game_from_json",
        "nashmg_game_solve",
        "nashmg_exploitability",
        "nashmg_solve_matrix",
        "nashmg_policy_pair_free",
        "typedef struct NashmgGame NashmgGame",
        "NASHMG_STATUS_BUDGET_EXCEEDED = 7",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use_header.c");
    std::fs::write(
        &src,
        "#include \"nashmg.h\"\nint main(void) { NashmgGame *g = 0; return nashmg_game_generate(1, 1, 1, 1, 0, &g) == NASHMG_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    match Command::new("cc").arg("-fsyntax-only").arg("-Wall").arg("-Werror").arg("-I").arg(&include).arg(&src).output() {
        Ok(out) => assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr)),
        Err(_) => eprintln!("no C compiler found; skipped header compilation"),
    }
}
