use std::path::Path;
use std::process::Command;

fn compiles(lang: &str, std: &str) -> bool {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    Command::new("cc")
        .args(["-x", lang, std, "-Wall", "-Wextra", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(dir.join("examples/smoke.c"))
        .status()
        .map(|s| s.success())
        .unwrap_or(false)
}

#[test]
fn header_declares_every_exported_function() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/bartnik.h")).unwrap();
    let source = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exported: Vec<&str> = source
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .filter_map(|rest| rest.split('(').next())
        .collect();
    assert!(exported.len() >= 15);
    for f in exported {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
}

#[test]
fn smoke_program_compiles_as_c_and_cpp() {
    assert!(compiles("c", "-std=c99"));
    assert!(compiles("c++", "-std=c++11"));
}
