//! Parameter sweeps of equal-angle correlation values ("phase lines") and
//! detection of the features that mark phase transitions.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::models::{
    build_hamiltonian, ground_state, parity_sector_energies, spin_parity_operator,
    xy_factorization_angle, xy_factorization_point, Family, FactorizationPoint, GroundStatePolicy,
    ModelSpec, Parity,
};
use crate::qcore::CorrelationLabel;
use crate::wigner::{equal_angle_point, PhasePoint};
use crate::{Error, Result};

pub const DEFAULT_JUMP_FACTOR: f64 = 50.0;

/// Differences below this are never reported as jumps, whatever the median.
pub const JUMP_ABSOLUTE_FLOOR: f64 = 1e-8;

/// Minimum prominence of a derivative extremum, relative to the derivative
/// range of its segment.
pub const EXTREMUM_RELATIVE_PROMINENCE: f64 = 0.05;

/// Minimum absolute prominence of a derivative extremum.
pub const EXTREMUM_ABSOLUTE_PROMINENCE: f64 = 1e-6;

/// Bisection width for parity-level crossings.
pub const CROSSING_TOL: f64 = 1e-8;

const MIN_EXTREMA_POINTS: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    /// Chain and fixed couplings; the swept coupling is overwritten per point.
    pub model: ModelSpec,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub labels: Vec<CorrelationLabel>,
    pub policy: GroundStatePolicy,
    pub point: PhasePoint,
    pub degeneracy_tol: Option<f64>,
}

impl SweepConfig {
    /// Symmetric policy, evaluation at the north pole, default degeneracy
    /// tolerance.
    pub fn new(model: ModelSpec, start: f64, stop: f64, step: f64, labels: Vec<CorrelationLabel>) -> Self {
        Self {
            model,
            start,
            stop,
            step,
            labels,
            policy: GroundStatePolicy::Symmetric,
            point: PhasePoint::NORTH,
            degeneracy_tol: None,
        }
    }

    pub fn with_policy(mut self, policy: GroundStatePolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(Error::InvalidSweep("non-finite range".into()));
        }
        if self.step <= 0.0 {
            return Err(Error::InvalidSweep(format!("step {} must be positive", self.step)));
        }
        if self.stop <= self.start {
            return Err(Error::InvalidSweep(format!("stop {} must exceed start {}", self.stop, self.start)));
        }
        if (self.stop - self.start) / self.step > 1e6 {
            return Err(Error::InvalidSweep("more than 10⁶ sweep points".into()));
        }
        if self.labels.is_empty() {
            return Err(Error::InvalidSweep("no correlation labels".into()));
        }
        if let Some(bad) = self.labels.iter().find(|l| l.n_total() != self.model.sites) {
            return Err(Error::InvalidLabel(format!("{bad} refers to a {}-site chain", bad.n_total())));
        }
        Ok(())
    }

    /// Name of the swept coupling.
    pub fn parameter_name(&self) -> &'static str {
        match self.model.family() {
            Family::Ti | Family::Xy => "lambda",
            Family::Xxz => "delta",
        }
    }

    /// `start + i·step` up to `stop`; `stop` itself is appended when it is
    /// not on the grid.
    pub fn parameter_values(&self) -> Vec<f64> {
        let span = (self.stop - self.start) / self.step;
        let count = (span + 1e-9).floor() as usize;
        let mut values: Vec<f64> = (0..=count).map(|i| self.start + i as f64 * self.step).collect();
        let last = values[values.len() - 1];
        if self.stop - last > 1e-9 * self.step {
            values.push(self.stop);
        }
        values
    }
}

/// Ground-state data at one sweep point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PointRecord {
    pub param: f64,
    pub energy: f64,
    pub degeneracy: usize,
    pub parity: Parity,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseLine {
    pub params: Vec<f64>,
    pub labels: Vec<CorrelationLabel>,
    /// `values[k][i]`: label `k` at `params[i]`.
    pub values: Vec<Vec<f64>>,
    pub records: Vec<PointRecord>,
}

impl PhaseLine {
    pub fn series(&self, label: &CorrelationLabel) -> Result<&[f64]> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|k| self.values[k].as_slice())
            .ok_or_else(|| Error::InvalidLabel(format!("{label} is not part of this phase line")))
    }

    pub fn derivative(&self, label: &CorrelationLabel) -> Result<Vec<f64>> {
        first_derivative(&self.params, self.series(label)?)
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }
}

/// Ground state and equal-angle values at every sweep point, in parameter
/// order. Points are evaluated in parallel; results do not depend on
/// scheduling.
pub fn sweep(cfg: &SweepConfig) -> Result<PhaseLine> {
    cfg.validate()?;
    let params = cfg.parameter_values();
    let rows: Vec<(PointRecord, Vec<f64>)> = params
        .par_iter()
        .map(|&param| {
            let spec = cfg.model.with_sweep_value(param);
            let gs = ground_state(&spec, cfg.policy, cfg.degeneracy_tol)?;
            let values = cfg
                .labels
                .iter()
                .map(|l| equal_angle_point(&gs.state, l, &cfg.point))
                .collect::<Result<Vec<f64>>>()?;
            let record = PointRecord {
                param,
                energy: gs.energy,
                degeneracy: gs.degeneracy,
                parity: gs.parity,
                gap: gs.gap,
            };
            Ok((record, values))
        })
        .collect::<Result<_>>()?;
    let mut values = vec![Vec::with_capacity(params.len()); cfg.labels.len()];
    let mut records = Vec::with_capacity(params.len());
    for (record, vals) in rows {
        records.push(record);
        for (k, v) in vals.into_iter().enumerate() {
            values[k].push(v);
        }
    }
    Ok(PhaseLine { params, labels: cfg.labels.clone(), values, records })
}

/// Central differences on the actual spacing, one-sided at the ends.
pub fn first_derivative(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::SeriesTooShort { len: n, needed: 2 });
    }
    Ok((0..n)
        .map(|i| {
            let (a, b) = if i == 0 {
                (0, 1)
            } else if i == n - 1 {
                (n - 2, n - 1)
            } else {
                (i - 1, i + 1)
            };
            (y[b] - y[a]) / (x[b] - x[a])
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalKind {
    Jump,
    DerivativeExtremum,
    ParityCrossing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Minimum,
    Maximum,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub kind: CriticalKind,
    /// Value of the swept coupling.
    pub location: f64,
    /// Jump height, extremal derivative, or ground energy at a crossing.
    pub magnitude: f64,
    /// `None` for chain-wide features such as level crossings.
    #[serde(serialize_with = "label_or_global")]
    pub label: Option<CorrelationLabel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sense: Option<Sense>,
}

fn label_or_global<S: serde::Serializer>(
    label: &Option<CorrelationLabel>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match label {
        Some(l) => s.collect_str(l),
        None => s.serialize_str("global"),
    }
}

impl fmt::Display for CriticalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = self.label.as_ref().map_or("global".to_string(), |l| l.to_string());
        write!(f, "{:?} [{label}] at {:.6} ({:.6e})", self.kind, self.location, self.magnitude)
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Indices `i` such that `|y[i+1] − y[i]|` exceeds `jump_factor` times the
/// median absolute successive difference (and the absolute floor).
fn jump_intervals(y: &[f64], jump_factor: f64) -> Vec<usize> {
    if y.len() < 2 {
        return Vec::new();
    }
    let diffs: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    if diffs.iter().all(|&d| d == 0.0) {
        return Vec::new();
    }
    let threshold = (jump_factor * median(&mut diffs.clone())).max(JUMP_ABSOLUTE_FLOOR);
    diffs
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > threshold)
        .map(|(i, _)| i)
        .collect()
}

pub fn find_jumps(line: &PhaseLine, label: &CorrelationLabel, jump_factor: f64) -> Result<Vec<CriticalPoint>> {
    if !(jump_factor > 0.0) {
        return Err(Error::InvalidParameter(format!("jump factor {jump_factor} must be positive")));
    }
    let y = line.series(label)?;
    let x = &line.params;
    Ok(jump_intervals(y, jump_factor)
        .into_iter()
        .map(|i| CriticalPoint {
            kind: CriticalKind::Jump,
            location: 0.5 * (x[i] + x[i + 1]),
            magnitude: y[i + 1] - y[i],
            label: Some(label.clone()),
            sense: None,
        })
        .collect())
}

/// Topographic prominence of the local minimum of `d` at `i`.
fn prominence_of_minimum(d: &[f64], i: usize) -> f64 {
    let mut left = d[i];
    for &v in d[..i].iter().rev() {
        if v < d[i] {
            break;
        }
        left = left.max(v);
    }
    let mut right = d[i];
    for &v in &d[i + 1..] {
        if v < d[i] {
            break;
        }
        right = right.max(v);
    }
    left.min(right) - d[i]
}

/// Vertex of the parabola through three points.
fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = (y[2] - y[1]) / (x[2] - x[1]);
    let a = (d2 - d1) / (x[2] - x[0]);
    if a == 0.0 {
        return (x[1], y[1]);
    }
    let b = d1 - a * (x[0] + x[1]);
    let xv = (-b / (2.0 * a)).clamp(x[0], x[2]);
    let yv = y[0] + d1 * (xv - x[0]) + a * (xv - x[0]) * (xv - x[1]);
    (xv, yv)
}

fn extrema_in_segment(x: &[f64], y: &[f64], label: &CorrelationLabel, out: &mut Vec<CriticalPoint>) -> Result<()> {
    if x.len() < MIN_EXTREMA_POINTS {
        return Ok(());
    }
    let d = first_derivative(x, y)?;
    let (lo, hi) = d.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let range = hi - lo;
    let threshold = (EXTREMUM_RELATIVE_PROMINENCE * range).max(EXTREMUM_ABSOLUTE_PROMINENCE);
    if range < threshold {
        return Ok(());
    }
    let negated: Vec<f64> = d.iter().map(|v| -v).collect();
    for i in 1..d.len() - 1 {
        let sense = if d[i] < d[i - 1] && d[i] <= d[i + 1] {
            Sense::Minimum
        } else if d[i] > d[i - 1] && d[i] >= d[i + 1] {
            Sense::Maximum
        } else {
            continue;
        };
        let prominence = match sense {
            Sense::Minimum => prominence_of_minimum(&d, i),
            Sense::Maximum => prominence_of_minimum(&negated, i),
        };
        if prominence < threshold {
            continue;
        }
        let (location, magnitude) = parabola_vertex([x[i - 1], x[i], x[i + 1]], [d[i - 1], d[i], d[i + 1]]);
        out.push(CriticalPoint {
            kind: CriticalKind::DerivativeExtremum,
            location,
            magnitude,
            label: Some(label.clone()),
            sense: Some(sense),
        });
    }
    Ok(())
}

/// Interior extrema of the first derivative, refined by a three-point
/// parabola. The series is split at detected jumps so that a discontinuity
/// neither masks nor fakes an extremum; only extrema whose prominence is a
/// noticeable fraction of their segment's derivative range are kept.
pub fn find_derivative_extrema(line: &PhaseLine, label: &CorrelationLabel) -> Result<Vec<CriticalPoint>> {
    let y = line.series(label)?;
    if y.len() < MIN_EXTREMA_POINTS {
        return Err(Error::SeriesTooShort { len: y.len(), needed: MIN_EXTREMA_POINTS });
    }
    let mut out = Vec::new();
    let mut begin = 0;
    for cut in jump_intervals(y, DEFAULT_JUMP_FACTOR).into_iter().chain(std::iter::once(y.len() - 1)) {
        extrema_in_segment(&line.params[begin..=cut], &y[begin..=cut], label, &mut out)?;
        begin = cut + 1;
    }
    Ok(out)
}

/// All jumps and derivative extrema of every label in `line`.
pub fn detect_features(line: &PhaseLine, jump_factor: f64) -> Result<Vec<CriticalPoint>> {
    let mut out = Vec::new();
    for label in &line.labels {
        out.extend(find_jumps(line, label, jump_factor)?);
        if line.len() >= MIN_EXTREMA_POINTS {
            out.extend(find_derivative_extrema(line, label)?);
        }
    }
    Ok(out)
}

/// Ground-energy difference between the even and odd spin-parity sectors.
fn sector_gap(spec: &ModelSpec) -> Result<f64> {
    let (even, odd) = parity_sector_energies(spec)?;
    Ok(even - odd)
}

/// Level crossings between the lowest even- and odd-parity states over the
/// sweep range, each located by bisection to [`CROSSING_TOL`].
pub fn find_parity_crossings(cfg: &SweepConfig) -> Result<Vec<CriticalPoint>> {
    cfg.validate()?;
    let probe = cfg.model.with_sweep_value(0.5 * (cfg.start + cfg.stop) + 0.123_456_789 * cfg.step);
    let h = build_hamiltonian(&probe)?;
    let p = spin_parity_operator(cfg.model.sites);
    let comm = h.commutator_norm(&p);
    if comm > 1e-10 * h.max_abs().max(1.0) {
        return Err(Error::Symmetry(format!("Hamiltonian does not conserve spin parity (‖[H, P]‖ = {comm:.3e})")));
    }
    let params = cfg.parameter_values();
    let gaps: Vec<f64> = params
        .par_iter()
        .map(|&x| sector_gap(&cfg.model.with_sweep_value(x)))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for i in 0..params.len() - 1 {
        let (lo, hi) = if gaps[i] * gaps[i + 1] < 0.0 {
            (params[i], params[i + 1])
        } else if gaps[i + 1] == 0.0 && i + 2 < params.len() && gaps[i] * gaps[i + 2] < 0.0 {
            (params[i + 1], params[i + 1])
        } else {
            continue;
        };
        let (mut lo, mut hi, mut g_lo) = (lo, hi, gaps[i]);
        while hi - lo > CROSSING_TOL {
            let mid = 0.5 * (lo + hi);
            let g = sector_gap(&cfg.model.with_sweep_value(mid))?;
            if g == 0.0 {
                lo = mid;
                hi = mid;
            } else if g * g_lo > 0.0 {
                lo = mid;
                g_lo = g;
            } else {
                hi = mid;
            }
        }
        let location = 0.5 * (lo + hi);
        let (even, odd) = parity_sector_energies(&cfg.model.with_sweep_value(location))?;
        out.push(CriticalPoint {
            kind: CriticalKind::ParityCrossing,
            location,
            magnitude: 0.5 * (even + odd),
            label: None,
            sense: None,
        });
    }
    Ok(out)
}

/// Parameters at which the recorded ground-state parity changes, as interval
/// midpoints.
pub fn parity_flips(line: &PhaseLine) -> Vec<f64> {
    line.records
        .windows(2)
        .filter(|w| w[0].parity != w[1].parity)
        .map(|w| 0.5 * (w[0].param + w[1].param))
        .collect()
}

/// `max − min` of a series.
pub fn spread(values: &[f64]) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    hi - lo
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactorizationRow {
    pub label: CorrelationLabel,
    /// `2⁻ⁿ (1 + √3 cos ϑ)ⁿ` for a label of `n` sites.
    pub expected: f64,
    pub below: f64,
    pub above: f64,
    /// Mean of `below` and `above`.
    pub measured: f64,
}

/// Equal-angle values of the XY chain just below and above the
/// factorization point, compared with the factorized-state prediction.
pub fn factorization_value_check(
    sites: usize,
    gamma: f64,
    labels: &[CorrelationLabel],
    offset: f64,
    policy: GroundStatePolicy,
) -> Result<Vec<FactorizationRow>> {
    let lambda_f = match xy_factorization_point(gamma)? {
        FactorizationPoint::Finite(x) => x,
        FactorizationPoint::Infinite => {
            return Err(Error::InvalidParameter("no finite factorization point at gamma = 1".into()))
        }
    };
    if !(offset > 0.0) {
        return Err(Error::InvalidParameter(format!("offset {offset} must be positive")));
    }
    let cos_t = xy_factorization_angle(gamma)?.cos();
    let below = ground_state(&ModelSpec::xy(sites, lambda_f - offset, gamma), policy, None)?;
    let above = ground_state(&ModelSpec::xy(sites, lambda_f + offset, gamma), policy, None)?;
    labels
        .iter()
        .map(|l| {
            let b = equal_angle_point(&below.state, l, &PhasePoint::NORTH)?;
            let a = equal_angle_point(&above.state, l, &PhasePoint::NORTH)?;
            let n = l.len() as i32;
            Ok(FactorizationRow {
                label: l.clone(),
                expected: 0.5f64.powi(n) * (1.0 + 3f64.sqrt() * cos_t).powi(n),
                below: b,
                above: a,
                measured: 0.5 * (a + b),
            })
        })
        .collect()
}
