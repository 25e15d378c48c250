use std::path::{Path, PathBuf};
use std::process::Command;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn header() -> String {
    std::fs::read_to_string(crate_dir().join("include/fasclique.h")).expect("header generated by build.rs")
}

#[test]
fn header_declares_every_export() {
    let h = header();
    let src = std::fs::read_to_string(crate_dir().join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 15);
    for name in exports {
        assert!(h.contains(&format!("{name}(")), "{name} missing from header");
    }
    assert!(h.contains("typedef struct FcTournament FcTournament;"));
    assert!(h.contains("FC_STATUS_STAGE_FAILURE = 6"));
}

fn static_lib() -> Option<PathBuf> {
    // target/<profile>/deps/header-xxxx -> target/<profile>
    let exe = std::env::current_exe().ok()?;
    let dir = exe.parent()?.parent()?;
    let lib = dir.join("libfasclique_ffi.a");
    lib.exists().then_some(lib)
}

fn have(cmd: &str) -> bool {
    Command::new(cmd).arg("--version").output().is_ok()
}

#[test]
fn c_program_links_and_runs() {
    let (Some(lib), true) = (static_lib(), have("cc")) else {
        eprintln!("skipping: no C compiler or static library");
        return;
    };
    let out_dir = Path::new(env!("CARGO_TARGET_TMPDIR"));
    let exe = out_dir.join("fasclique_smoke");
    let status = Command::new("cc")
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "38");
}
