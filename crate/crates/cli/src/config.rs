//! Run configuration: command-line flags layered over an optional
//! `key = value` file, layered over built-in defaults.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use serde::Serialize;
use spinwigner::analysis::{SweepConfig, DEFAULT_JUMP_FACTOR};
use spinwigner::models::{Couplings, Family, GroundStatePolicy, ModelSpec};
use spinwigner::wigner::{PhasePoint, SphereGrid};
use spinwigner::CorrelationLabel;

use crate::CliError;

/// Flags shared by `phaseline`, `sphere` and `animate`. Every flag may also
/// be given in the config file under its long name without dashes.
#[derive(Args, Clone, Debug, Default)]
pub struct SharedArgs {
    /// Chain family: ti, xy or xxz.
    #[arg(long)]
    pub model: Option<Family>,
    /// Number of sites.
    #[arg(long)]
    pub n: Option<usize>,
    /// Transverse field (ti, xy).
    #[arg(long)]
    pub h: Option<f64>,
    /// XY anisotropy.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// XXZ exchange coupling.
    #[arg(long)]
    pub j: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub param_start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub param_stop: Option<f64>,
    #[arg(long)]
    pub param_step: Option<f64>,
    /// Comma-separated correlation labels, e.g. `1,12,135,tot`, or `all`.
    #[arg(long)]
    pub labels: Option<String>,
    /// Ground-state policy: symmetric, mixture or aligned-up.
    #[arg(long)]
    pub policy: Option<GroundStatePolicy>,
    #[arg(long)]
    pub phase_theta: Option<f64>,
    #[arg(long)]
    pub phase_phi: Option<f64>,
    #[arg(long)]
    pub grid_theta: Option<usize>,
    #[arg(long)]
    pub grid_phi: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Jump threshold as a multiple of the median successive difference.
    #[arg(long)]
    pub jump_factor: Option<f64>,
    /// Coupling for a single-point run (`sphere`).
    #[arg(long, allow_negative_numbers = true)]
    pub param: Option<f64>,
}

fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace(['-', '_'], "")
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| CliError::Config(format!("config key '{key}': cannot parse '{value}': {e}")))
}

impl SharedArgs {
    /// Reads a config file into the same shape as the flags.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut out = SharedArgs::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("{}:{}: expected `key = value`", path.display(), lineno + 1))
            })?;
            let value = value.trim().trim_matches('"');
            match normalize_key(key).as_str() {
                "model" => out.model = Some(parse_value(key, value)?),
                "n" => out.n = Some(parse_value(key, value)?),
                "h" => out.h = Some(parse_value(key, value)?),
                "gamma" => out.gamma = Some(parse_value(key, value)?),
                "j" => out.j = Some(parse_value(key, value)?),
                "paramstart" => out.param_start = Some(parse_value(key, value)?),
                "paramstop" => out.param_stop = Some(parse_value(key, value)?),
                "paramstep" => out.param_step = Some(parse_value(key, value)?),
                "param" => out.param = Some(parse_value(key, value)?),
                "labels" => out.labels = Some(value.to_string()),
                "policy" => out.policy = Some(parse_value(key, value)?),
                "phasetheta" => out.phase_theta = Some(parse_value(key, value)?),
                "phasephi" => out.phase_phi = Some(parse_value(key, value)?),
                "gridtheta" => out.grid_theta = Some(parse_value(key, value)?),
                "gridphi" => out.grid_phi = Some(parse_value(key, value)?),
                "out" => out.out = Some(PathBuf::from(value)),
                "seed" => out.seed = Some(parse_value(key, value)?),
                "jumpfactor" => out.jump_factor = Some(parse_value(key, value)?),
                "config" => {
                    return Err(CliError::Config("config files cannot include other config files".into()))
                }
                _ => return Err(CliError::Config(format!("unknown config key '{}'", key.trim()))),
            }
        }
        Ok(out)
    }

    /// Fields set here win over `lower`.
    pub fn over(self, lower: SharedArgs) -> SharedArgs {
        SharedArgs {
            model: self.model.or(lower.model),
            n: self.n.or(lower.n),
            h: self.h.or(lower.h),
            gamma: self.gamma.or(lower.gamma),
            j: self.j.or(lower.j),
            param_start: self.param_start.or(lower.param_start),
            param_stop: self.param_stop.or(lower.param_stop),
            param_step: self.param_step.or(lower.param_step),
            labels: self.labels.or(lower.labels),
            policy: self.policy.or(lower.policy),
            phase_theta: self.phase_theta.or(lower.phase_theta),
            phase_phi: self.phase_phi.or(lower.phase_phi),
            grid_theta: self.grid_theta.or(lower.grid_theta),
            grid_phi: self.grid_phi.or(lower.grid_phi),
            out: self.out.or(lower.out),
            config: self.config.or(lower.config),
            seed: self.seed.or(lower.seed),
            jump_factor: self.jump_factor.or(lower.jump_factor),
            param: self.param.or(lower.param),
        }
    }
}

/// Fully resolved settings of one run; echoed into the manifest.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub model: Family,
    pub n: usize,
    pub h: Option<f64>,
    pub gamma: Option<f64>,
    pub j: Option<f64>,
    pub parameter: &'static str,
    pub param_start: f64,
    pub param_stop: f64,
    pub param_step: f64,
    pub param: Option<f64>,
    pub labels: Vec<String>,
    pub policy: GroundStatePolicy,
    pub phase_theta: f64,
    pub phase_phi: f64,
    pub grid_theta: usize,
    pub grid_phi: usize,
    pub out: PathBuf,
    pub config: Option<PathBuf>,
    pub seed: u64,
    pub jump_factor: f64,
}

/// Default sweep range and step of each family.
pub fn default_range(family: Family) -> (f64, f64, f64) {
    match family {
        Family::Ti => (0.0, 2.0, 0.01),
        Family::Xy => (0.0, 2.0, 0.005),
        Family::Xxz => (-2.0, 10.0, 0.01),
    }
}

pub const DEFAULT_XY_GAMMA: f64 = 0.5;
pub const DEFAULT_SPHERE_PARAM: f64 = 1.0;

/// Merges flags, config file and defaults, and rejects options that do not
/// apply to the chosen model.
pub fn resolve(command: &str, flags: SharedArgs) -> Result<RunConfig, CliError> {
    let file = match &flags.config {
        Some(path) => SharedArgs::from_file(path)?,
        None => SharedArgs::default(),
    };
    let config_path = flags.config.clone();
    let a = flags.over(file);
    let model = a.model.unwrap_or(Family::Ti);
    match model {
        Family::Ti | Family::Xy if a.j.is_some() => {
            return Err(CliError::Config(format!("--j applies to the xxz model, not {model}")))
        }
        Family::Xxz if a.h.is_some() => {
            return Err(CliError::Config("--h applies to the ti and xy models, not xxz".into()))
        }
        Family::Ti | Family::Xxz if a.gamma.is_some() => {
            return Err(CliError::Config(format!("--gamma applies to the xy model, not {model}")))
        }
        _ => {}
    }
    if command != "sphere" && a.param.is_some() {
        return Err(CliError::Config(format!("--param applies to the sphere command, not {command}")));
    }
    let n = a.n.unwrap_or(6);
    let (start, stop, step) = default_range(model);
    let labels = parse_labels(a.labels.as_deref(), n)?;
    let parameter = match model {
        Family::Ti | Family::Xy => "lambda",
        Family::Xxz => "delta",
    };
    Ok(RunConfig {
        command: command.to_string(),
        model,
        n,
        h: match model {
            Family::Xxz => None,
            _ => Some(a.h.unwrap_or(1.0)),
        },
        gamma: match model {
            Family::Xy => Some(a.gamma.unwrap_or(DEFAULT_XY_GAMMA)),
            _ => None,
        },
        j: match model {
            Family::Xxz => Some(a.j.unwrap_or(1.0)),
            _ => None,
        },
        parameter,
        param_start: a.param_start.unwrap_or(start),
        param_stop: a.param_stop.unwrap_or(stop),
        param_step: a.param_step.unwrap_or(step),
        param: if command == "sphere" { Some(a.param.unwrap_or(DEFAULT_SPHERE_PARAM)) } else { None },
        labels: labels.iter().map(|l| l.to_string()).collect(),
        policy: a.policy.unwrap_or(GroundStatePolicy::Symmetric),
        phase_theta: a.phase_theta.unwrap_or(0.0),
        phase_phi: a.phase_phi.unwrap_or(0.0),
        grid_theta: a.grid_theta.unwrap_or(SphereGrid::default().n_theta()),
        grid_phi: a.grid_phi.unwrap_or(SphereGrid::default().n_phi()),
        out: a.out.unwrap_or_else(|| PathBuf::from("out")),
        config: config_path,
        seed: a.seed.unwrap_or(0),
        jump_factor: a.jump_factor.unwrap_or(DEFAULT_JUMP_FACTOR),
    })
}

pub fn parse_labels(text: Option<&str>, n: usize) -> Result<Vec<CorrelationLabel>, CliError> {
    match text.map(str::trim) {
        None | Some("all") | Some("") => Ok(CorrelationLabel::canonical_set(n)),
        Some(list) => list
            .split(',')
            .map(|t| CorrelationLabel::parse(t, n).map_err(CliError::from))
            .collect(),
    }
}

impl RunConfig {
    pub fn model_spec(&self, value: f64) -> ModelSpec {
        let couplings = match self.model {
            Family::Ti => Couplings::Ti { lambda: value, h: self.h.unwrap_or(1.0) },
            Family::Xy => Couplings::Xy {
                lambda: value,
                gamma: self.gamma.unwrap_or(DEFAULT_XY_GAMMA),
                h: self.h.unwrap_or(1.0),
            },
            Family::Xxz => Couplings::Xxz { j: self.j.unwrap_or(1.0), delta: value },
        };
        ModelSpec { sites: self.n, couplings }
    }

    pub fn labels(&self) -> Result<Vec<CorrelationLabel>, CliError> {
        self.labels
            .iter()
            .map(|t| CorrelationLabel::parse(t, self.n).map_err(CliError::from))
            .collect()
    }

    pub fn phase_point(&self) -> Result<PhasePoint, CliError> {
        Ok(PhasePoint::new(self.phase_theta, self.phase_phi)?)
    }

    pub fn grid(&self) -> Result<SphereGrid, CliError> {
        Ok(SphereGrid::new(self.grid_theta, self.grid_phi)?)
    }

    pub fn sweep_config(&self) -> Result<SweepConfig, CliError> {
        let mut cfg = SweepConfig::new(
            self.model_spec(0.0),
            self.param_start,
            self.param_stop,
            self.param_step,
            self.labels()?,
        )
        .with_policy(self.policy);
        cfg.point = self.phase_point()?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn flags_override_file_override_defaults() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "# sweep\nmodel = xy\nparam_step = 0.02\nparam-stop = 1.5\ngamma=0.8").unwrap();
        let flags = SharedArgs {
            config: Some(file.path().to_path_buf()),
            param_step: Some(0.05),
            ..Default::default()
        };
        let cfg = resolve("phaseline", flags).unwrap();
        assert_eq!(cfg.model, Family::Xy);
        assert_eq!(cfg.param_step, 0.05);
        assert_eq!(cfg.param_stop, 1.5);
        assert_eq!(cfg.param_start, 0.0);
        assert_eq!(cfg.gamma, Some(0.8));
        assert_eq!(cfg.n, 6);
        assert_eq!(cfg.labels.len(), 12);
    }

    #[test]
    fn rejects_foreign_options() {
        let flags = SharedArgs { gamma: Some(0.5), ..Default::default() };
        assert!(matches!(resolve("phaseline", flags), Err(CliError::Config(_))));
        let flags = SharedArgs { model: Some(Family::Xxz), h: Some(1.0), ..Default::default() };
        assert!(matches!(resolve("phaseline", flags), Err(CliError::Config(_))));
        let flags = SharedArgs { param: Some(1.0), ..Default::default() };
        assert!(matches!(resolve("phaseline", flags), Err(CliError::Config(_))));
    }

    #[test]
    fn unknown_config_key() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "modle = ti").unwrap();
        assert!(matches!(SharedArgs::from_file(file.path()), Err(CliError::Config(_))));
    }

    #[test]
    fn label_lists() {
        let labels = parse_labels(Some("1,12,135,tot"), 6).unwrap();
        assert_eq!(labels.len(), 4);
        assert!(labels[3].is_total());
        assert!(parse_labels(Some("1,19"), 6).is_err());
        assert_eq!(parse_labels(None, 4).unwrap().len(), 7);
    }
}
