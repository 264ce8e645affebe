//! Implementation of the subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use spinwigner::acceptance::{run_all, Outcome};
use spinwigner::analysis::{detect_features, find_parity_crossings, sweep, CriticalPoint, PhaseLine};
use spinwigner::models::{
    ground_state, ti_classical_energy, ti_classical_mx, ti_classical_mz, ti_thermo_energy,
    ti_thermo_mx, ti_thermo_mz, xy_factorization_angle, xy_factorization_point, Family,
    GroundStateResult,
};
use spinwigner::wigner::{sphere_field, SphereField};
use spinwigner::CorrelationLabel;

use crate::config::{RunConfig, SharedArgs};
use crate::output::{fmt_f64, Csv, FileRecord, OutputDir};
use crate::CliError;

#[derive(Serialize)]
struct Manifest<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    started_at: String,
    finished_at: String,
    config: &'a T,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    critical_points: Vec<CriticalPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ground_state: Option<GroundStateSummary>,
    files: &'a [FileRecord],
}

#[derive(Clone, Debug, Serialize)]
struct GroundStateSummary {
    param: f64,
    energy: f64,
    degeneracy: usize,
    parity: String,
    gap: f64,
}

impl GroundStateSummary {
    fn new(param: f64, gs: &GroundStateResult) -> Self {
        Self { param, energy: gs.energy, degeneracy: gs.degeneracy, parity: gs.parity.to_string(), gap: gs.gap }
    }
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

fn write_manifest<T: Serialize>(
    out: &mut OutputDir,
    started_at: String,
    config: &T,
    critical_points: Vec<CriticalPoint>,
    ground_state: Option<GroundStateSummary>,
) -> Result<(), CliError> {
    let files = out.files().to_vec();
    let manifest = Manifest {
        tool: "spinwigner",
        version: env!("CARGO_PKG_VERSION"),
        started_at,
        finished_at: now(),
        config,
        critical_points,
        ground_state,
        files: &files,
    };
    out.write_json("manifest.json", &manifest)
}

/// Summary of a completed command.
#[derive(Clone, Debug)]
pub struct Report {
    pub out: PathBuf,
    pub files: Vec<FileRecord>,
    pub critical_points: Vec<CriticalPoint>,
}

fn phaseline_csv(line: &PhaseLine) -> Csv {
    let mut csv = Csv::new(&["param", "label", "value", "energy", "degeneracy", "parity", "gap"]);
    for (i, rec) in line.records.iter().enumerate() {
        for (k, label) in line.labels.iter().enumerate() {
            csv.row(&[
                fmt_f64(rec.param),
                label.to_string(),
                fmt_f64(line.values[k][i]),
                fmt_f64(rec.energy),
                rec.degeneracy.to_string(),
                rec.parity.to_string(),
                fmt_f64(rec.gap),
            ]);
        }
    }
    csv
}

fn derivative_csv(line: &PhaseLine) -> Result<Csv, CliError> {
    let mut csv = Csv::new(&["param", "label", "derivative"]);
    let derivs = line
        .labels
        .iter()
        .map(|l| line.derivative(l))
        .collect::<spinwigner::Result<Vec<_>>>()?;
    for (i, x) in line.params.iter().enumerate() {
        for (k, label) in line.labels.iter().enumerate() {
            csv.row(&[fmt_f64(*x), label.to_string(), fmt_f64(derivs[k][i])]);
        }
    }
    Ok(csv)
}

const PHASELINE_PLOT: &str = r#"# Plot phase lines written by `spinwigner phaseline`.
# phaseline.csv columns: param (swept coupling), label (correlation subset),
# value (equal-angle Wigner value), energy, degeneracy, parity, gap.
# derivative.csv columns: param, label, derivative (d value / d param).
import csv, sys
from collections import defaultdict
import matplotlib.pyplot as plt

root = sys.argv[1] if len(sys.argv) > 1 else "."
series = defaultdict(lambda: ([], []))
with open(f"{root}/phaseline.csv") as f:
    for row in csv.DictReader(f):
        xs, ys = series[row["label"]]
        xs.append(float(row["param"]))
        ys.append(float(row["value"]))
for label, (xs, ys) in series.items():
    plt.plot(xs, ys, label=label)
plt.xlabel("coupling")
plt.ylabel("W(0, 0)")
plt.legend()
plt.savefig(f"{root}/phaseline.png", dpi=150)
"#;

const SPHERE_PLOT: &str = r#"# Plot sphere fields written by `spinwigner sphere` / `animate`.
# sphere_<label>.csv columns: theta, phi (radians), value; theta-major order.
import csv, sys
import numpy as np
import matplotlib.pyplot as plt

path = sys.argv[1]
rows = list(csv.DictReader(open(path)))
theta = np.array([float(r["theta"]) for r in rows])
phi = np.array([float(r["phi"]) for r in rows])
value = np.array([float(r["value"]) for r in rows])
n_theta = len(set(theta))
shape = (n_theta, len(value) // n_theta)
t, p, v = (a.reshape(shape) for a in (theta, phi, value))
x, y, z = np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)
lim = np.abs(v).max()
colors = plt.cm.RdBu_r((v + lim) / (2 * lim))
ax = plt.figure().add_subplot(projection="3d")
ax.plot_surface(x, y, z, facecolors=colors, rstride=1, cstride=1, linewidth=0)
ax.set_box_aspect((1, 1, 1))
plt.savefig(path.replace(".csv", ".png"), dpi=150)
"#;

pub fn phaseline(cfg: &RunConfig) -> Result<Report, CliError> {
    let started = now();
    let sweep_cfg = cfg.sweep_config()?;
    let line = sweep(&sweep_cfg)?;
    let mut critical = detect_features(&line, cfg.jump_factor)?;
    if matches!(cfg.model, Family::Ti | Family::Xy) {
        critical.extend(find_parity_crossings(&sweep_cfg)?);
    }
    let mut out = OutputDir::create(&cfg.out)?;
    out.write("phaseline.csv", &phaseline_csv(&line).into_bytes())?;
    out.write("derivative.csv", &derivative_csv(&line)?.into_bytes())?;
    #[derive(Serialize)]
    struct Critical<'a> {
        parameter: &'a str,
        critical_points: &'a [CriticalPoint],
    }
    out.write_json("criticalpoints.json", &Critical { parameter: cfg.parameter, critical_points: &critical })?;
    out.write("plot_phaseline.py", PHASELINE_PLOT.as_bytes())?;
    write_manifest(&mut out, started, cfg, critical.clone(), None)?;
    Ok(Report { out: cfg.out.clone(), files: out.files().to_vec(), critical_points: critical })
}

/// File name of a sphere field: `sphere_<label>.csv`.
pub fn sphere_file_name(label: &CorrelationLabel) -> String {
    format!("sphere_{label}.csv")
}

fn sphere_csv(field: &SphereField) -> Csv {
    let mut csv = Csv::new(&["theta", "phi", "value"]);
    for (t, p, v) in field.samples() {
        csv.row(&[fmt_f64(t), fmt_f64(p), fmt_f64(v)]);
    }
    csv
}

fn write_fields(
    out: &mut OutputDir,
    prefix: &str,
    gs: &GroundStateResult,
    labels: &[CorrelationLabel],
    cfg: &RunConfig,
) -> Result<(), CliError> {
    let grid = cfg.grid()?;
    for label in labels {
        let field = sphere_field(&gs.state, label, grid)?;
        out.write(&format!("{prefix}{}", sphere_file_name(label)), &sphere_csv(&field).into_bytes())?;
    }
    Ok(())
}

pub fn sphere(cfg: &RunConfig) -> Result<Report, CliError> {
    let started = now();
    let param = cfg.param.unwrap_or(crate::config::DEFAULT_SPHERE_PARAM);
    let gs = ground_state(&cfg.model_spec(param), cfg.policy, None)?;
    let labels = cfg.labels()?;
    let mut out = OutputDir::create(&cfg.out)?;
    write_fields(&mut out, "", &gs, &labels, cfg)?;
    out.write("plot_sphere.py", SPHERE_PLOT.as_bytes())?;
    write_manifest(&mut out, started, cfg, Vec::new(), Some(GroundStateSummary::new(param, &gs)))?;
    Ok(Report { out: cfg.out.clone(), files: out.files().to_vec(), critical_points: Vec::new() })
}

pub fn animate(cfg: &RunConfig) -> Result<Report, CliError> {
    let started = now();
    let params = cfg.sweep_config()?.parameter_values();
    let labels = cfg.labels()?;
    let mut out = OutputDir::create(&cfg.out)?;
    let mut index = Csv::new(&["frame", "param", "energy", "degeneracy", "parity"]);
    for (frame, &param) in params.iter().enumerate() {
        let gs = ground_state(&cfg.model_spec(param), cfg.policy, None)?;
        let dir = format!("frame_{frame:04}/");
        write_fields(&mut out, &dir, &gs, &labels, cfg)?;
        index.row(&[
            frame.to_string(),
            fmt_f64(param),
            fmt_f64(gs.energy),
            gs.degeneracy.to_string(),
            gs.parity.to_string(),
        ]);
    }
    out.write("index.csv", &index.into_bytes())?;
    out.write("plot_sphere.py", SPHERE_PLOT.as_bytes())?;
    write_manifest(&mut out, started, cfg, Vec::new(), None)?;
    Ok(Report { out: cfg.out.clone(), files: out.files().to_vec(), critical_points: Vec::new() })
}

#[derive(Clone, Debug, Serialize)]
pub struct FormulaConfig {
    pub values: Vec<f64>,
    pub gammas: Vec<f64>,
    pub out: PathBuf,
}

/// Closed-form transverse Ising quantities and XY factorization points.
pub fn formulas(cfg: &FormulaConfig) -> Result<(Report, String), CliError> {
    let started = now();
    let mut table = String::new();
    let header = ["lambda", "e_classical", "mx_classical", "mz_classical", "e_thermo", "mx_thermo", "mz_thermo"];
    let mut csv = Csv::new(&header);
    table.push_str(&format!("{:>10} {:>13} {:>13} {:>13} {:>13} {:>13} {:>13}\n", "lambda", "E_cl/N", "Mx_cl", "Mz_cl", "E/N", "Mx", "Mz"));
    for &l in &cfg.values {
        let row = [
            l,
            ti_classical_energy(l),
            ti_classical_mx(l),
            ti_classical_mz(l),
            ti_thermo_energy(l)?,
            ti_thermo_mx(l)?,
            ti_thermo_mz(l)?,
        ];
        csv.row(&row.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>());
        table.push_str(&format!(
            "{:>10.5} {:>13.8} {:>13.8} {:>13.8} {:>13.8} {:>13.8} {:>13.8}\n",
            row[0], row[1], row[2], row[3], row[4], row[5], row[6]
        ));
    }
    let mut fact = Csv::new(&["gamma", "lambda_f", "theta_f"]);
    table.push_str(&format!("\n{:>10} {:>13} {:>13}\n", "gamma", "lambda_f", "theta_f"));
    for &g in &cfg.gammas {
        let point = xy_factorization_point(g)?;
        let angle = xy_factorization_angle(g)?;
        let lf = point.finite().map_or("inf".to_string(), fmt_f64);
        fact.row(&[fmt_f64(g), lf, fmt_f64(angle)]);
        let shown = point.finite().map_or("inf".to_string(), |x| format!("{x:.8}"));
        table.push_str(&format!("{g:>10.5} {shown:>13} {angle:>13.8}\n"));
    }
    let mut out = OutputDir::create(&cfg.out)?;
    out.write("formulas.csv", &csv.into_bytes())?;
    out.write("factorization.csv", &fact.into_bytes())?;
    write_manifest(&mut out, started, cfg, Vec::new(), None)?;
    Ok((Report { out: cfg.out.clone(), files: out.files().to_vec(), critical_points: Vec::new() }, table))
}

fn scratch_dir(tag: &str) -> PathBuf {
    let nanos = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_nanos())
        .unwrap_or(0);
    std::env::temp_dir().join(format!("spinwigner-{tag}-{}-{nanos}", std::process::id()))
}

fn csv_contents(root: &Path, files: &[FileRecord]) -> Result<Vec<(String, Vec<u8>)>, CliError> {
    files
        .iter()
        .filter(|f| f.path.ends_with(".csv"))
        .map(|f| {
            fs::read(root.join(&f.path))
                .map(|b| (f.path.clone(), b))
                .map_err(|e| CliError::Io(format!("{}: {e}", f.path)))
        })
        .collect()
}

/// Runs `phaseline` and `sphere` twice with identical settings and compares
/// the CSV bytes.
pub fn determinism_check() -> Outcome {
    let title = "repeated runs are byte-identical";
    let result = (|| -> Result<(bool, String), CliError> {
        let mut identical = true;
        let mut compared = 0;
        for (command, args) in [
            (
                "phaseline",
                SharedArgs {
                    model: Some(Family::Xy),
                    n: Some(4),
                    param_start: Some(0.9),
                    param_stop: Some(1.4),
                    param_step: Some(0.02),
                    ..Default::default()
                },
            ),
            (
                "sphere",
                SharedArgs {
                    model: Some(Family::Xxz),
                    n: Some(4),
                    param: Some(1.0),
                    grid_theta: Some(19),
                    grid_phi: Some(36),
                    ..Default::default()
                },
            ),
        ] {
            let mut runs = Vec::new();
            for k in 0..2 {
                let dir = scratch_dir(&format!("{command}{k}"));
                let cfg = crate::config::resolve(command, SharedArgs { out: Some(dir.clone()), ..args.clone() })?;
                let report = if command == "phaseline" { phaseline(&cfg)? } else { sphere(&cfg)? };
                let contents = csv_contents(&dir, &report.files);
                let _ = fs::remove_dir_all(&dir);
                runs.push(contents?);
            }
            compared += runs[0].len();
            identical &= !runs[0].is_empty() && runs[0] == runs[1];
        }
        Ok((identical, format!("{compared} CSV files compared across two runs each of phaseline and sphere")))
    })();
    match result {
        Ok((passed, detail)) => Outcome { id: 13, title, passed, detail },
        Err(e) => Outcome { id: 13, title, passed: false, detail: format!("error: {e}") },
    }
}

/// The full acceptance suite.
pub fn verify() -> Vec<Outcome> {
    let mut outcomes = run_all();
    outcomes.push(determinism_check());
    outcomes
}
