//! Running the binary and comparing against golden files.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

/// Runs `sepval` from the workspace root: `(exit code, stdout, stderr)`.
pub fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_sepval")).args(args).current_dir(root()).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

pub fn transcript(args: &[&str], code: i32, stdout: &str, stderr: &str) -> String {
    let mut text = format!("$ sepval {}\n# exit {code}\n{stdout}", args.join(" "));
    if !stderr.is_empty() {
        text.push_str("# stderr\n");
        text.push_str(stderr);
    }
    text
}

/// Compares a run with `tests/golden/<name>.txt`; with `SEPVAL_UPDATE_GOLDEN`
/// set the file is rewritten first.
pub fn golden(name: &str, args: &[&str], code: i32) -> Result<(), String> {
    let (got, stdout, stderr) = run(args);
    let text = transcript(args, got, &stdout, &stderr);
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.txt"));
    if std::env::var_os("SEPVAL_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &text).map_err(|e| e.to_string())?;
    }
    let want = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if text != want {
        return Err(format!("{name}: output differs from golden file\n--- want\n{want}--- got\n{text}"));
    }
    if got != code {
        return Err(format!("{name}: exit {got}, expected {code}"));
    }
    Ok(())
}
