//! Compiles and runs a small C program against the generated header and the
//! static library. Skipped when no C compiler is on the path.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include "gcrss.h"

int main(void) {
    const double eye[4] = {1.0, 0.0, 0.0, 1.0};
    GcrssMatrix *a = NULL, *b = NULL, *c = NULL;
    GcrssSelection *sel = NULL;
    size_t cols[2], len = 0;
    double res = -1.0, bound = -1.0;
    if (gcrss_matrix_new(2, 2, eye, &a) != GCRSS_OK) return 10;
    if (gcrss_matrix_new(2, 2, eye, &b) != GCRSS_OK) return 11;
    if (gcrss_matrix_new(2, 2, eye, &c) != GCRSS_OK) return 12;
    if (gcrss_select(a, b, c, 1, 1, 1e-8, &sel) != GCRSS_OK) return 13;
    if (gcrss_selection_columns(sel, cols, 2, &len) != GCRSS_OK || len != 1 || cols[0] != 0) return 14;
    if (gcrss_selection_residual(sel, &res, &bound) != GCRSS_OK) return 15;
    if (gcrss_select(a, NULL, c, 1, 1, 0.0, &sel) != GCRSS_ERR_NULL_POINTER) return 16;
    printf("%s %.6f %.6f\n", gcrss_version(), res, bound);
    gcrss_selection_free(sel);
    gcrss_matrix_free(a);
    gcrss_matrix_free(b);
    gcrss_matrix_free(c);
    return 0;
}
"#;

fn compiler() -> Option<String> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|cc| Command::new(cc).arg("--version").output().is_ok_and(|o| o.status.success()))
        .map(String::from)
}

/// Directory holding the built static library (`target/<profile>`).
fn lib_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(|deps| deps.parent()).unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let Some(cc) = compiler() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let lib = lib_dir().join("libgcrss_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping", lib.display());
        return;
    }
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let work = std::env::temp_dir().join(format!("gcrss-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&work).unwrap();
    let src = work.join("main.c");
    let exe = work.join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status.code());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.trim(), format!("{} 0.000000 0.500000", gcrss::VERSION));
}
