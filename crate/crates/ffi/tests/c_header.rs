//! Compiles a small C program against the generated header and the shared
//! library, then runs it.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "avc_jsc.h"

int main(void) {
    AvcChannel *ch = NULL;
    if (avc_channel_builtin(AVC_BUILTIN_BINARY_EXAMPLE, &ch) != AVC_STATUS_OK) return 10;
    AvcBound b;
    if (avc_bound(ch, "minimax", 0.0, 0, &b) != AVC_STATUS_OK) return 11;
    if (fabs(b.value - 0.531) > 1e-3) return 12;
    AvcSymResult r;
    if (avc_sym_margin(ch, "S|X", 1e-7, &r) != AVC_STATUS_OK) return 13;
    if (!r.symmetrizable) return 14;
    AvcRatePlan p;
    if (avc_rate_plan(ch, AVC_SCHEME_DESCRIBE_STATE, 0.1, &p) != AVC_STATUS_INFEASIBLE) return 15;
    if (avc_last_error()[0] == '\0') return 16;
    avc_channel_free(ch);

    AvcChannel *bad = NULL;
    if (avc_channel_from_json("{", &bad) != AVC_STATUS_PARSE || bad != NULL) return 17;
    printf("ok %s\n", avc_version());
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let lib_dir = target_dir();
    if !lib_dir.join("libavc_jsc_ffi.so").exists() {
        eprintln!("shared library not built on this platform; skipping");
        return;
    }
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    let exe = dir.path().join("probe");
    std::fs::write(&src, PROGRAM).unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let built = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg("-o")
        .arg(&exe)
        .arg("-L")
        .arg(&lib_dir)
        .arg("-lavc_jsc_ffi")
        .arg("-lm")
        .arg(format!("-Wl,-rpath,{}", lib_dir.display()))
        .output()
        .expect("C compiler runs");
    assert!(
        built.status.success(),
        "{}",
        String::from_utf8_lossy(&built.stderr)
    );
    let run = Command::new(&exe).output().unwrap();
    assert_eq!(
        run.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let stdout = String::from_utf8(run.stdout).unwrap();
    assert_eq!(stdout.trim(), format!("ok {}", env!("CARGO_PKG_VERSION")));
}
