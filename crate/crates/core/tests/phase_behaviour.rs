use spinwigner::analysis::{
    detect_features, factorization_value_check, find_derivative_extrema, find_jumps, find_parity_crossings,
    parity_flips, spread, sweep, CriticalKind, SweepConfig, DEFAULT_JUMP_FACTOR,
};
use spinwigner::models::{
    parity_sector_energies, xy_factorization_angle, xy_factorization_point, GroundStatePolicy,
    ModelSpec, Parity,
};
use spinwigner::CorrelationLabel;

fn label(sites: &[usize], n: usize) -> CorrelationLabel {
    CorrelationLabel::new(sites.to_vec(), n).unwrap()
}

#[test]
fn xy_parity_flips_sit_on_level_crossings() {
    for gamma in [0.3, 0.5, 0.8] {
        let cfg = SweepConfig::new(ModelSpec::xy(6, 0.0, gamma), 0.0, 2.0, 0.005, vec![label(&[1], 6)]);
        let line = sweep(&cfg).unwrap();
        let flips = parity_flips(&line);
        let crossings = find_parity_crossings(&cfg).unwrap();
        assert_eq!(flips.len(), crossings.len(), "gamma {gamma}");
        assert!(!crossings.is_empty());
        for (f, c) in flips.iter().zip(&crossings) {
            assert_eq!(c.kind, CriticalKind::ParityCrossing);
            assert!((f - c.location).abs() <= 0.005, "gamma {gamma}: flip {f} vs crossing {}", c.location);
            let (even, odd) = parity_sector_energies(&ModelSpec::xy(6, c.location, gamma)).unwrap();
            assert!((even - odd).abs() < 1e-6);
        }
    }
}

#[test]
fn a_crossing_sits_at_the_factorization_point() {
    for gamma in [0.5, 0.8] {
        let cfg = SweepConfig::new(ModelSpec::xy(6, 0.0, gamma), 0.0, 2.0, 0.01, vec![label(&[1], 6)]);
        let crossings = find_parity_crossings(&cfg).unwrap();
        let lambda_f = xy_factorization_point(gamma).unwrap().finite().unwrap();
        assert!(crossings.iter().any(|c| (c.location - lambda_f).abs() < 1e-7), "gamma {gamma}: {crossings:?}");
    }
}

#[test]
fn transverse_ising_has_no_crossings_or_jumps() {
    let labels = CorrelationLabel::canonical_set(6);
    let cfg = SweepConfig::new(ModelSpec::ti(6, 0.0), 0.0, 5.0, 0.01, labels.clone());
    assert!(find_parity_crossings(&cfg).unwrap().is_empty());
    let line = sweep(&cfg).unwrap();
    assert!(line.records.iter().all(|r| r.parity == Parity::Even && r.degeneracy == 1));
    for l in &labels {
        assert!(find_jumps(&line, l, DEFAULT_JUMP_FACTOR).unwrap().is_empty(), "{l}");
    }
}

#[test]
fn transverse_ising_single_site_has_derivative_feature_near_criticality() {
    let l = label(&[1], 6);
    let cfg = SweepConfig::new(ModelSpec::ti(6, 0.0), 0.0, 2.0, 0.01, vec![l.clone()]);
    let line = sweep(&cfg).unwrap();
    let extrema = find_derivative_extrema(&line, &l).unwrap();
    assert!(extrema.iter().any(|e| (0.8..=1.1).contains(&e.location)), "{extrema:?}");
}

#[test]
fn xy_single_site_jumps_at_first_crossing() {
    let l = label(&[1], 6);
    let cfg = SweepConfig::new(ModelSpec::xy(6, 0.0, 0.5), 1.10, 1.20, 0.001, vec![l.clone()]);
    let line = sweep(&cfg).unwrap();
    let jumps = find_jumps(&line, &l, DEFAULT_JUMP_FACTOR).unwrap();
    assert_eq!(jumps.len(), 1);
    let crossing = find_parity_crossings(&cfg).unwrap();
    assert!((jumps[0].location - crossing[0].location).abs() <= 0.001);
}

#[test]
fn xxz_constant_labels_are_flat_in_the_critical_region() {
    let labels = vec![label(&[1], 6), label(&[1, 2, 3, 4, 5], 6), CorrelationLabel::total(6)];
    let cfg = SweepConfig::new(ModelSpec::xxz(6, 0.0), -1.0 + 0.01, 10.0, 0.01, labels.clone());
    let line = sweep(&cfg).unwrap();
    for l in &labels {
        assert!(spread(line.series(l).unwrap()) < 1e-8, "{l}");
    }
}

#[test]
fn xxz_ferromagnetic_region_is_flat_for_every_label() {
    let labels = CorrelationLabel::canonical_set(6);
    let cfg = SweepConfig::new(ModelSpec::xxz(6, 0.0), -2.0, -1.0 - 1e-4, 0.01, labels.clone());
    let line = sweep(&cfg).unwrap();
    for l in &labels {
        assert!(spread(line.series(l).unwrap()) < 1e-12, "{l}");
    }
}

#[test]
fn xxz_transition_shows_up_as_a_jump() {
    let labels = vec![label(&[1, 2], 6)];
    let cfg = SweepConfig::new(ModelSpec::xxz(6, 0.0), -2.0, 0.0, 0.01, labels);
    let line = sweep(&cfg).unwrap();
    let features = detect_features(&line, DEFAULT_JUMP_FACTOR).unwrap();
    let jumps: Vec<f64> =
        features.iter().filter(|f| f.kind == CriticalKind::Jump).map(|f| f.location).collect();
    assert_eq!(jumps.len(), 1, "{features:?}");
    assert!((jumps[0] + 1.0).abs() <= 0.01);
}

#[test]
fn sweeps_are_reproducible() {
    let cfg = SweepConfig::new(ModelSpec::xy(6, 0.0, 0.5), 1.0, 1.6, 0.01, CorrelationLabel::canonical_set(6));
    let a = sweep(&cfg).unwrap();
    let b = sweep(&cfg).unwrap();
    for (x, y) in a.values.iter().flatten().zip(b.values.iter().flatten()) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
}

/// Two-branch mean at the factorization point: the symmetric ground states
/// are `(|ϑ⟩ⁿ ± |−ϑ⟩ⁿ)` normalized, with single-site overlap `c = cos ϑ`
/// and off-diagonal kernel element `2/√3` at the pole.
fn two_branch_mean(n_label: usize, n_chain: usize, cos_t: f64) -> f64 {
    let s = cos_t.powi(n_chain as i32);
    let q = cos_t.powi((n_chain - n_label) as i32) * (2.0 / 3f64.sqrt()).powi(n_label as i32);
    (1.0 - q * s) / (1.0 - s * s)
}

#[test]
fn factorization_branches_match_two_branch_formula() {
    let gamma = 0.5;
    let cos_t = xy_factorization_angle(gamma).unwrap().cos();
    assert!((cos_t - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    let labels = CorrelationLabel::canonical_set(6);
    let rows = factorization_value_check(6, gamma, &labels, 1e-6, GroundStatePolicy::Symmetric).unwrap();
    for row in rows {
        let predicted = two_branch_mean(row.label.len(), 6, cos_t);
        assert!((row.measured - predicted).abs() < 1e-4, "{}: {} vs {}", row.label, row.measured, predicted);
        assert!((row.expected - 1.0).abs() < 1e-12);
    }
}
