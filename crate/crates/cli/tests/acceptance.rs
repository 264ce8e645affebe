//! Acceptance suite: one PASS/FAIL line per criterion.

use std::fs;
use std::path::Path;
use std::process::Command;

use spinwigner::acceptance::{run_all, Outcome};

fn run_binary(args: &[&str], out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_spinwigner"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(String::from_utf8_lossy(&status.stderr).into_owned());
    }
    Ok(())
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let title = "repeated phaseline and sphere runs are byte-identical";
    let runs: [&[&str]; 2] = [
        &["phaseline", "--model", "xy", "--gamma", "0.5", "--param-start", "1.0", "--param-stop", "1.3", "--param-step", "0.01"],
        &["sphere", "--model", "xxz", "--param", "1", "--grid-theta", "37", "--grid-phi", "72"],
    ];
    let mut details = Vec::new();
    let mut passed = true;
    for args in runs {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        if let Err(e) = run_binary(args, a.path()).and_then(|_| run_binary(args, b.path())) {
            return Outcome { id: 13, title, passed: false, detail: format!("{} failed: {e}", args[0]) };
        }
        let (fa, fb) = (csv_files(a.path()), csv_files(b.path()));
        let same = !fa.is_empty() && fa == fb;
        passed &= same;
        details.push(format!("{}: {} CSV files {}", args[0], fa.len(), if same { "identical" } else { "differ" }));
    }
    Outcome { id: 13, title, passed, detail: details.join("; ") }
}

fn main() {
    let mut outcomes = run_all();
    outcomes.push(determinism());
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
