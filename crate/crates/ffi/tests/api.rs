use std::ffi::{CStr, CString};
use std::ptr;

use exitwalk_ffi::*;

fn last_error() -> String {
    let p = exw_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn scalar_functions_and_errors() {
    unsafe {
        let mut a = 0.0;
        assert_eq!(exw_moving_sphere_param_a(1.0, 0.5, 2, &mut a), ExwStatus::Ok);
        assert!((a - 0.25 * std::f64::consts::E / 2.0).abs() < 1e-15);
        assert!(exw_last_error().is_null());

        let mut v = -1.0;
        assert_eq!(exw_psi(a, 2, a, &mut v), ExwStatus::Ok);
        assert_eq!(v, 0.0);
        assert_eq!(exw_hitting_pdf(a, 2, 2.0 * a, &mut v), ExwStatus::Domain);
        assert!(last_error().contains("outside"));
        assert_eq!(v, 0.0, "outputs untouched on failure");

        assert_eq!(exw_moving_sphere_param_a(1.0, 1.5, 2, &mut a), ExwStatus::Domain);
        assert_eq!(exw_moving_sphere_param_a(1.0, 0.5, 1, &mut a), ExwStatus::Domain);
        assert_eq!(exw_moving_sphere_param_a(1.0, 0.5, 2, ptr::null_mut()), ExwStatus::NullPointer);

        assert_eq!(exw_laplace_transform(2.0, 1.0, 1.0, 3, &mut v), ExwStatus::Ok);
        assert!((v - 1.0).abs() < 1e-15);
        assert!(!exw_version().is_null());
    }
}

#[test]
fn spectral_round_trip() {
    unsafe {
        let mut cache = ptr::null_mut();
        assert_eq!(exw_spectral_new(2, 1.0, &mut cache), ExwStatus::Ok);
        let mut tail = 0.0;
        assert_eq!(exw_tail_spectral(cache, 0.3, &mut tail), ExwStatus::Ok);
        let mut t = 0.0;
        assert_eq!(exw_invert_cdf(cache, 1.0 - tail, &mut t), ExwStatus::Ok);
        assert!((t - 0.3).abs() < 1e-8);
        assert_eq!(exw_tail_spectral(cache, 1e-3, &mut tail), ExwStatus::BelowSeriesCutoff);
        assert_eq!(exw_invert_cdf(cache, 1.0, &mut t), ExwStatus::Domain);
        assert_eq!(exw_tail_spectral(ptr::null(), 0.3, &mut tail), ExwStatus::NullPointer);
        exw_spectral_free(cache);
    }
}

#[test]
fn walkers_and_tables() {
    unsafe {
        let rng = exw_rng_new(7, 0);
        let x0 = [0.5, 0.0];
        let mut res = ExwExit::default();
        let mut pos = [0.0; 2];
        let mut proj = [0.0; 2];
        assert_eq!(
            exw_woms_run(x0.as_ptr(), 2, 1.0, 1e-4, 0.99, rng, &mut res, pos.as_mut_ptr(), proj.as_mut_ptr()),
            ExwStatus::Ok
        );
        assert!(res.steps > 0 && res.exit_time > 0.0);
        assert!(((proj[0] * proj[0] + proj[1] * proj[1]).sqrt() - 1.0).abs() < 1e-14);

        let mut table = ptr::null_mut();
        assert_eq!(exw_table_precompute(500, 2, ExwTableMethod::Inversion, 0.0, rng, &mut table), ExwStatus::Ok);
        assert_eq!(exw_table_count(table), 500);
        let dir = tempfile::tempdir().unwrap();
        let path = CString::new(dir.path().join("t.bin").to_str().unwrap()).unwrap();
        assert_eq!(exw_table_save(table, path.as_ptr()), ExwStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(exw_table_load(path.as_ptr(), &mut back), ExwStatus::Ok);
        let a = std::slice::from_raw_parts(exw_table_samples(table), 500);
        let b = std::slice::from_raw_parts(exw_table_samples(back), 500);
        assert_eq!(a, b);
        let missing = CString::new("/nonexistent/dir/t.bin").unwrap();
        assert_eq!(exw_table_load(missing.as_ptr(), &mut back), ExwStatus::Io);

        let mut ctx = ptr::null_mut();
        assert_eq!(exw_wos_context_new(2, ExwExitMode::Table, ptr::null(), &mut ctx), ExwStatus::MissingTable);
        assert_eq!(exw_wos_context_new(2, ExwExitMode::Table, table, &mut ctx), ExwStatus::Ok);
        assert_eq!(
            exw_wos_run(ctx, x0.as_ptr(), 1.0, 1e-4, rng, &mut res, ptr::null_mut(), ptr::null_mut()),
            ExwStatus::Ok
        );
        assert!(res.exit_time > 0.0);
        exw_wos_context_free(ctx);

        assert_eq!(
            exw_euler_run(x0.as_ptr(), 2, 1.0, 1e-3, rng, &mut res, ptr::null_mut(), ptr::null_mut()),
            ExwStatus::Ok
        );
        assert_eq!(
            exw_euler_run(x0.as_ptr(), 2, 1.0, -1.0, rng, &mut res, ptr::null_mut(), ptr::null_mut()),
            ExwStatus::Domain
        );
        let bad = [2.0, 0.0];
        assert_eq!(exw_woms_run(bad.as_ptr(), 2, 1.0, 1e-4, 1.5, rng, &mut res, ptr::null_mut(), ptr::null_mut()), ExwStatus::Domain);

        exw_table_free(table);
        exw_table_free(back);
        exw_rng_free(rng);
        exw_rng_free(ptr::null_mut());
    }
}

#[test]
fn json_experiment_is_reproducible() {
    let config = r#"{"method":"woms","x0":[0.5,0.0],"L":1.0,"delta":2,"epsilon":1e-4,"gamma":0.99,
        "trajectories":500,"seed":3,"workers":2,"h":1e-4,"table_path":null,"dirichlet":true}"#;
    let c = CString::new(config).unwrap();
    let mut reports = Vec::new();
    unsafe {
        for _ in 0..2 {
            let mut out = ptr::null_mut();
            assert_eq!(exw_run_experiment_json(c.as_ptr(), &mut out), ExwStatus::Ok);
            reports.push(CStr::from_ptr(out).to_str().unwrap().to_owned());
            exw_string_free(out);
        }
        let bad = CString::new("{\"method\":\"nope\"}").unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(exw_run_experiment_json(bad.as_ptr(), &mut out), ExwStatus::Config);
        assert!(out.is_null());
    }
    assert_eq!(reports[0], reports[1]);
    let v: serde_json::Value = serde_json::from_str(&reports[0]).unwrap();
    assert_eq!(v["statistics"]["n"], 500);
}
