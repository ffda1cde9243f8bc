use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use rendezvous_ffi::*;

const STAGGERED: &str = r#"{"model":"monotone","L":4,"label_a":1,"label_b":2,"pos_a":["0","0"],"pos_b":["0","10"],"start_b":"5"}"#;

fn last_error() -> String {
    let p = rdv_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn parse(json: &str) -> (RdvStatus, *mut RdvScenario) {
    let text = CString::new(json).unwrap();
    let mut s = ptr::null_mut();
    let status = unsafe { rdv_scenario_from_json(text.as_ptr(), &mut s) };
    (status, s)
}

fn take(p: *mut std::ffi::c_char) -> String {
    assert!(!p.is_null());
    let text = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { rdv_string_free(p) };
    text
}

#[test]
fn run_round_trip() {
    let (status, s) = parse(STAGGERED);
    assert_eq!(status, RdvStatus::Ok);
    let mut run = ptr::null_mut();
    assert_eq!(unsafe { rdv_run(s, &mut run) }, RdvStatus::Ok);
    assert_eq!(unsafe { rdv_run_met(run) }, 1);
    let report: serde_json::Value =
        serde_json::from_str(&take(unsafe { rdv_run_report_json(run) })).unwrap();
    assert_eq!(report["bound"]["limit"], "18");
    let trace = take(unsafe { rdv_run_trace_jsonl(run) });
    assert_eq!(
        trace.lines().count() as u64,
        report["trace_events"].as_u64().unwrap()
    );
    unsafe {
        rdv_run_free(run);
        rdv_scenario_free(s);
    }
    assert!(rdv_last_error_message().is_null());
}

#[test]
fn error_codes() {
    let (status, s) = parse(&STAGGERED.replace(r#""5""#, r#""3/0""#));
    assert_eq!(status, RdvStatus::ParseError);
    assert!(s.is_null());
    assert!(last_error().contains("start_b"));

    let (status, _) = parse(&STAGGERED.replace(r#""label_b":2"#, r#""label_b":1"#));
    assert_eq!(status, RdvStatus::InvalidScenario);
    assert!(last_error().contains("equal"));

    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { rdv_scenario_from_json(ptr::null(), &mut out) },
        RdvStatus::NullArgument
    );
    assert_eq!(
        unsafe { rdv_run(ptr::null(), &mut ptr::null_mut()) },
        RdvStatus::NullArgument
    );
    assert_eq!(unsafe { rdv_run_met(ptr::null()) }, -1);
    assert!(unsafe { rdv_run_report_json(ptr::null()) }.is_null());

    let bad = [0xffu8, 0];
    assert_eq!(
        unsafe { rdv_scenario_from_json(bad.as_ptr().cast(), &mut out) },
        RdvStatus::InvalidUtf8
    );
}

#[test]
fn protocol_violation_is_reported() {
    let (status, s) = parse(
        r#"{"model":"binary","L":2,"label_a":0,"label_b":1,"pos_a":["0","0"],"pos_b":["0","3"],"rho":"8","strict_paper_loop":true}"#,
    );
    assert_eq!(status, RdvStatus::Ok);
    let mut run = ptr::null_mut();
    assert_eq!(
        unsafe { rdv_run(s, &mut run) },
        RdvStatus::ProtocolViolation
    );
    assert!(run.is_null());
    assert!(last_error().contains("lambda = 1"));
    unsafe { rdv_scenario_free(s) };
}

#[test]
fn version_matches_package() {
    let v = unsafe { CStr::from_ptr(rdv_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_and_links_from_c() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test binary>
    let profile_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = profile_dir.join("librendezvous_ffi.a");
    if !lib.exists() {
        eprintln!("skipping C link check: {} not built", lib.display());
        return;
    }
    let out_dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let src = out_dir.join("smoke.c");
    let exe = out_dir.join("smoke");
    std::fs::write(
        &src,
        format!(
            r#"#include <stdio.h>
#include <string.h>
#include "rendezvous.h"
int main(void) {{
    RdvScenario *s = NULL;
    RdvRun *r = NULL;
    if (rdv_scenario_from_json("{}", &s) != RDV_STATUS_OK) return 2;
    if (rdv_run(s, &r) != RDV_STATUS_OK) return 3;
    int met = rdv_run_met(r);
    char *report = rdv_run_report_json(r);
    printf("%d %d\n", met, strstr(report, "\"x+y+8\"") != NULL);
    rdv_string_free(report);
    rdv_run_free(r);
    rdv_scenario_free(s);
    return 0;
}}
"#,
            STAGGERED.replace('"', "\\\"")
        ),
    )
    .unwrap();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "1 1\n");
}
