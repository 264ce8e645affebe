//! Cyclic spin-1/2 chain Hamiltonians, their symmetry operators, ground-state
//! selection, and analytic reference formulas for the transverse-field Ising
//! chain.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::qcore::{
    basis_state, embed_product, fix_phase, herm_eig, pauli, Axis, CMatrix, CVector, DensityMatrix,
    HermitianOperator,
};
use crate::quadrature::integrate_adaptive;
use crate::{Complex64, Error, Result};

/// Largest supported chain length (dense dimension 1024).
pub const MAX_SITES: usize = 10;

/// Relative degeneracy tolerance applied to the spectral range.
pub const DEFAULT_DEGENERACY_REL_TOL: f64 = 1e-9;

const QUADRATURE_TOL: f64 = 1e-10;
const QUADRATURE_DEPTH: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Ti,
    Xy,
    Xxz,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Ti => "ti",
            Family::Xy => "xy",
            Family::Xxz => "xxz",
        })
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ti" | "ising" => Ok(Family::Ti),
            "xy" => Ok(Family::Xy),
            "xxz" => Ok(Family::Xxz),
            other => Err(Error::InvalidModel(format!("unknown model family '{other}'"))),
        }
    }
}

/// Couplings of one of the three chains.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Couplings {
    /// `H = -Σ [λ σx_i σx_{i+1} + h σz_i]`
    Ti { lambda: f64, h: f64 },
    /// `H = -Σ { λ/2 [(1+γ) σx σx + (1-γ) σy σy] + h σz_i }`
    Xy { lambda: f64, gamma: f64, h: f64 },
    /// `H = J/4 Σ [σx σx + σy σy + Δ σz σz]`
    Xxz { j: f64, delta: f64 },
}

/// A chain of `sites` spins with periodic boundary conditions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub sites: usize,
    pub couplings: Couplings,
}

impl ModelSpec {
    pub fn ti(sites: usize, lambda: f64) -> Self {
        Self { sites, couplings: Couplings::Ti { lambda, h: 1.0 } }
    }

    pub fn xy(sites: usize, lambda: f64, gamma: f64) -> Self {
        Self { sites, couplings: Couplings::Xy { lambda, gamma, h: 1.0 } }
    }

    pub fn xxz(sites: usize, delta: f64) -> Self {
        Self { sites, couplings: Couplings::Xxz { j: 1.0, delta } }
    }

    pub fn family(&self) -> Family {
        match self.couplings {
            Couplings::Ti { .. } => Family::Ti,
            Couplings::Xy { .. } => Family::Xy,
            Couplings::Xxz { .. } => Family::Xxz,
        }
    }

    /// The parameter swept in phase lines: λ for TI/XY, Δ for XXZ.
    pub fn sweep_value(&self) -> f64 {
        match self.couplings {
            Couplings::Ti { lambda, .. } | Couplings::Xy { lambda, .. } => lambda,
            Couplings::Xxz { delta, .. } => delta,
        }
    }

    pub fn with_sweep_value(mut self, value: f64) -> Self {
        match &mut self.couplings {
            Couplings::Ti { lambda, .. } | Couplings::Xy { lambda, .. } => *lambda = value,
            Couplings::Xxz { delta, .. } => *delta = value,
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites < 2 || self.sites > MAX_SITES {
            return Err(Error::InvalidModel(format!(
                "chain length {} outside 2..={MAX_SITES}",
                self.sites
            )));
        }
        let finite = match self.couplings {
            Couplings::Ti { lambda, h } => lambda.is_finite() && h.is_finite(),
            Couplings::Xy { lambda, gamma, h } => {
                if gamma.abs() > 1.0 {
                    return Err(Error::InvalidModel(format!("|gamma| = {} exceeds 1", gamma.abs())));
                }
                lambda.is_finite() && gamma.is_finite() && h.is_finite()
            }
            Couplings::Xxz { j, delta } => j.is_finite() && delta.is_finite(),
        };
        if !finite {
            return Err(Error::InvalidModel("non-finite parameter".into()));
        }
        Ok(())
    }

    /// Symmetry operator used to resolve degenerate ground spaces: the spin
    /// parity for TI/XY, the total `S_z` for XXZ.
    pub fn symmetry_operator(&self) -> HermitianOperator {
        match self.family() {
            Family::Ti | Family::Xy => spin_parity_operator(self.sites),
            Family::Xxz => total_sz(self.sites),
        }
    }
}

fn bond(a: &HermitianOperator, b: &HermitianOperator, i: usize, n: usize) -> HermitianOperator {
    embed_product(&[(i, a), (i % n + 1, b)], n).expect("sites in range")
}

/// Periodic-chain Hamiltonian for `spec`.
pub fn build_hamiltonian(spec: &ModelSpec) -> Result<HermitianOperator> {
    spec.validate()?;
    let n = spec.sites;
    let (x, y, z) = (pauli(Axis::X), pauli(Axis::Y), pauli(Axis::Z));
    let dim = 1usize << n;
    let mut h = CMatrix::zeros(dim, dim);
    let mut add = |op: HermitianOperator, coeff: f64| {
        if coeff != 0.0 {
            h += op.into_matrix() * Complex64::new(coeff, 0.0);
        }
    };
    match spec.couplings {
        Couplings::Ti { lambda, h: field } => {
            for i in 1..=n {
                add(bond(&x, &x, i, n), -lambda);
                add(embed_product(&[(i, &z)], n)?, -field);
            }
        }
        Couplings::Xy { lambda, gamma, h: field } => {
            for i in 1..=n {
                add(bond(&x, &x, i, n), -0.5 * lambda * (1.0 + gamma));
                add(bond(&y, &y, i, n), -0.5 * lambda * (1.0 - gamma));
                add(embed_product(&[(i, &z)], n)?, -field);
            }
        }
        Couplings::Xxz { j, delta } => {
            for i in 1..=n {
                add(bond(&x, &x, i, n), 0.25 * j);
                add(bond(&y, &y, i, n), 0.25 * j);
                add(bond(&z, &z, i, n), 0.25 * j * delta);
            }
        }
    }
    HermitianOperator::new(h)
}

fn down_count(index: usize) -> u32 {
    index.count_ones()
}

/// `P_z = Π_l σz_l`.
pub fn spin_parity_operator(n: usize) -> HermitianOperator {
    let diag: Vec<f64> = (0..1usize << n)
        .map(|k| if down_count(k) % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    HermitianOperator::from_real_diagonal(&diag)
}

/// `U_z = Π_m σz_{2m}`, flipping x/y components on even sites.
pub fn staggered_flip_operator(n: usize) -> Result<HermitianOperator> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidModel(format!("staggered flip needs an even chain, got {n}")));
    }
    // site s ↔ bit n - s; even sites are s = 2, 4, …
    let mask: usize = (1..=n).filter(|s| s % 2 == 0).fold(0, |m, s| m | (1 << (n - s)));
    let diag: Vec<f64> = (0..1usize << n)
        .map(|k| if (k & mask).count_ones() % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    Ok(HermitianOperator::from_real_diagonal(&diag))
}

/// `S_T^z = ½ Σ σz_l`.
pub fn total_sz(n: usize) -> HermitianOperator {
    let diag: Vec<f64> = (0..1usize << n)
        .map(|k| 0.5 * (n as f64 - 2.0 * down_count(k) as f64))
        .collect();
    HermitianOperator::from_real_diagonal(&diag)
}

/// Global z rotation `exp(iφ S_T^z)` (unitary, not Hermitian).
pub fn z_rotation(n: usize, phi: f64) -> CMatrix {
    let sz = total_sz(n);
    let d = nalgebra::DVector::from_iterator(
        1 << n,
        (0..1usize << n).map(|k| Complex64::from_polar(1.0, phi * sz.matrix()[(k, k)].re)),
    );
    CMatrix::from_diagonal(&d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroundStatePolicy {
    /// Resolve degeneracy by the model's symmetry, preferring the positive
    /// sector on ties.
    Symmetric,
    /// Maximally mixed state on the ground space.
    Mixture,
    /// `|↑…↑⟩`, valid when it lies in a degenerate XXZ ground space.
    AlignedUp,
}

impl fmt::Display for GroundStatePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroundStatePolicy::Symmetric => "symmetric",
            GroundStatePolicy::Mixture => "mixture",
            GroundStatePolicy::AlignedUp => "aligned-up",
        })
    }
}

impl FromStr for GroundStatePolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "symmetric" => Ok(Self::Symmetric),
            "mixture" => Ok(Self::Mixture),
            "aligned-up" => Ok(Self::AlignedUp),
            other => Err(Error::InvalidParameter(format!("unknown policy '{other}'"))),
        }
    }
}

/// Spin-parity quantum number of a selected state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    #[serde(rename = "+1")]
    Even,
    #[serde(rename = "-1")]
    Odd,
    #[serde(rename = "undefined")]
    Undefined,
}

impl Parity {
    pub fn from_expectation(p: f64) -> Self {
        if (p - 1.0).abs() < 1e-8 {
            Parity::Even
        } else if (p + 1.0).abs() < 1e-8 {
            Parity::Odd
        } else {
            Parity::Undefined
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "+1",
            Parity::Odd => "-1",
            Parity::Undefined => "undefined",
        })
    }
}

#[derive(Clone, Debug)]
pub struct GroundStateResult {
    pub energy: f64,
    pub degeneracy: usize,
    pub state: DensityMatrix,
    /// `P_z` label of the selected state.
    pub parity: Parity,
    /// `E₁ − E₀` of the full spectrum.
    pub gap: f64,
}

/// Diagonalizes `spec` and selects a ground state according to `policy`.
///
/// Levels within `degeneracy_tol` of the lowest eigenvalue form the ground
/// space; `None` uses `1e-9 ×` the spectral range.
pub fn ground_state(
    spec: &ModelSpec,
    policy: GroundStatePolicy,
    degeneracy_tol: Option<f64>,
) -> Result<GroundStateResult> {
    let h = build_hamiltonian(spec)?;
    if policy == GroundStatePolicy::AlignedUp && spec.family() != Family::Xxz {
        return Err(Error::Policy {
            parameter: spec.sweep_value(),
            reason: format!("aligned-up applies to the XXZ chain only, not {}", spec.family()),
        });
    }
    let eig = herm_eig(&h);
    let e0 = eig.values[0];
    let range = eig.values[eig.values.len() - 1] - e0;
    let tol = match degeneracy_tol {
        Some(t) if t > 0.0 => t,
        Some(t) => return Err(Error::InvalidParameter(format!("degeneracy tolerance {t} must be positive"))),
        None => DEFAULT_DEGENERACY_REL_TOL * range.max(1.0),
    };
    let degeneracy = eig.values.iter().take_while(|&&e| e - e0 <= tol).count();
    let gap = eig.values.get(1).map_or(0.0, |e1| e1 - e0);
    let dim = h.dim();

    let state = if degeneracy == 1 {
        DensityMatrix::from_pure(&eig.vector(0))?
    } else {
        let space = eig.vectors.columns(0, degeneracy).into_owned();
        match policy {
            GroundStatePolicy::Mixture => DensityMatrix::uniform_mixture(&space)?,
            GroundStatePolicy::Symmetric => {
                select_by_symmetry(&space, &spec.symmetry_operator())?
            }
            GroundStatePolicy::AlignedUp => {
                let up = basis_state(&vec![true; spec.sites]);
                let weight = (space.adjoint() * &up).norm_squared();
                if (weight - 1.0).abs() > 1e-8 {
                    return Err(Error::Policy {
                        parameter: spec.sweep_value(),
                        reason: format!("|↑…↑⟩ has weight {weight:.3e} in the ground space"),
                    });
                }
                DensityMatrix::from_pure(&up)?
            }
        }
    };
    debug_assert_eq!(state.dim(), dim);
    let parity = Parity::from_expectation(state.expectation(&spin_parity_operator(spec.sites))?);
    Ok(GroundStateResult { energy: e0, degeneracy, state, parity, gap })
}

/// Diagonalizes `symmetry` inside `space` and returns the state of the
/// largest symmetry eigenvalue. A multi-dimensional preferred sector yields
/// the uniform mixture over it.
fn select_by_symmetry(space: &CMatrix, symmetry: &HermitianOperator) -> Result<DensityMatrix> {
    let restricted = HermitianOperator::new(space.adjoint() * symmetry.matrix() * space)
        .unwrap_or_else(|_| HermitianOperator::symmetrized(space.adjoint() * symmetry.matrix() * space));
    let eig = herm_eig(&restricted);
    let top = eig.values[eig.values.len() - 1];
    let preferred: Vec<usize> = (0..eig.values.len()).filter(|&k| top - eig.values[k] < 1e-8).collect();
    if preferred.len() == 1 {
        let mut v: CVector = space * eig.vector(preferred[0]);
        fix_phase(&mut v);
        DensityMatrix::from_pure(&v)
    } else {
        let mut basis = CMatrix::zeros(space.nrows(), preferred.len());
        for (c, &k) in preferred.iter().enumerate() {
            basis.set_column(c, &(space * eig.vector(k)));
        }
        DensityMatrix::uniform_mixture(&basis)
    }
}

/// Lowest energies in the even and odd `P_z` sectors.
pub fn parity_sector_energies(spec: &ModelSpec) -> Result<(f64, f64)> {
    let h = build_hamiltonian(spec)?;
    let even: Vec<usize> = (0..h.dim()).filter(|&k| down_count(k) % 2 == 0).collect();
    let odd: Vec<usize> = (0..h.dim()).filter(|&k| down_count(k) % 2 == 1).collect();
    let lowest = |idx: &[usize]| -> f64 {
        let block = CMatrix::from_fn(idx.len(), idx.len(), |a, b| h.matrix()[(idx[a], idx[b])]);
        herm_eig(&HermitianOperator::symmetrized(block)).values[0]
    };
    Ok((lowest(&even), lowest(&odd)))
}

fn require_non_negative(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} must be finite and non-negative")));
    }
    Ok(())
}

/// Classical ground-state energy per site of the transverse Ising chain (h = 1).
pub fn ti_classical_energy(lambda: f64) -> f64 {
    if lambda >= 0.5 {
        -(1.0 + 4.0 * lambda * lambda) / (4.0 * lambda)
    } else {
        -1.0
    }
}

/// Classical x magnetization per site.
pub fn ti_classical_mx(lambda: f64) -> f64 {
    if lambda >= 0.5 {
        0.5 * (1.0 - 1.0 / (4.0 * lambda * lambda)).sqrt()
    } else {
        0.0
    }
}

/// Classical z magnetization per site.
pub fn ti_classical_mz(lambda: f64) -> f64 {
    if lambda >= 0.5 {
        1.0 / (4.0 * lambda)
    } else {
        0.5
    }
}

/// Thermodynamic-limit ground-state energy per site,
/// `-(1/π) ∫₀^π √(1 + 2λ cos k + λ²) dk`.
pub fn ti_thermo_energy(lambda: f64) -> Result<f64> {
    require_non_negative(lambda)?;
    let r = integrate_adaptive(
        |k| (1.0 + 2.0 * lambda * k.cos() + lambda * lambda).max(0.0).sqrt(),
        0.0,
        PI,
        QUADRATURE_TOL,
        QUADRATURE_DEPTH,
    )?;
    Ok(-r.value / PI)
}

/// Thermodynamic-limit x magnetization: `½(1 − λ⁻²)^{1/8}` above λ = 1.
pub fn ti_thermo_mx(lambda: f64) -> Result<f64> {
    require_non_negative(lambda)?;
    Ok(if lambda >= 1.0 { 0.5 * (1.0 - 1.0 / (lambda * lambda)).powf(0.125) } else { 0.0 })
}

/// Thermodynamic-limit z magnetization,
/// `(1/2π) ∫₀^π (1 + λ cos k)/√(1 + 2λ cos k + λ²) dk`.
pub fn ti_thermo_mz(lambda: f64) -> Result<f64> {
    require_non_negative(lambda)?;
    let r = integrate_adaptive(
        |k| {
            let c = k.cos();
            let den = (1.0 + 2.0 * lambda * c + lambda * lambda).max(0.0).sqrt();
            if den == 0.0 {
                // λ = 1, k = π: the ratio tends to cos(k/2) → 0
                0.0
            } else {
                (1.0 + lambda * c) / den
            }
        },
        0.0,
        PI,
        QUADRATURE_TOL,
        QUADRATURE_DEPTH,
    )?;
    Ok(r.value / (2.0 * PI))
}

/// XY ground-state factorization coupling; infinite in the Ising limit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum FactorizationPoint {
    Finite(f64),
    Infinite,
}

impl FactorizationPoint {
    pub fn finite(self) -> Option<f64> {
        match self {
            FactorizationPoint::Finite(x) => Some(x),
            FactorizationPoint::Infinite => None,
        }
    }
}

impl fmt::Display for FactorizationPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorizationPoint::Finite(x) => write!(f, "{x}"),
            FactorizationPoint::Infinite => f.write_str("inf"),
        }
    }
}

/// `λ_f = 1/√(1 − γ²)` for `0 < γ ≤ 1`.
pub fn xy_factorization_point(gamma: f64) -> Result<FactorizationPoint> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} outside (0, 1]")));
    }
    if gamma == 1.0 {
        return Ok(FactorizationPoint::Infinite);
    }
    Ok(FactorizationPoint::Finite(1.0 / (1.0 - gamma * gamma).sqrt()))
}

/// Alignment angle `ϑ = arccos √((1 − γ)/(1 + γ))` of the factorized state.
pub fn xy_factorization_angle(gamma: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} outside [0, 1]")));
    }
    Ok(((1.0 - gamma) / (1.0 + gamma)).sqrt().acos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{embed, kron_vectors};
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_site_field_only() {
        let h = build_hamiltonian(&ModelSpec::ti(2, 0.0)).unwrap();
        let z = pauli(Axis::Z);
        let expected = &(&embed(&z, 1, 2).unwrap() * -1.0) - &embed(&z, 2, 2).unwrap();
        assert!(h.distance(&expected) == 0.0);
        assert_abs_diff_eq!(herm_eig(&h).values[0], -2.0, epsilon = 1e-14);
    }

    #[test]
    fn xy_reduces_to_ti() {
        for &(n, lambda) in &[(3, 0.3), (4, 1.7), (6, 0.9)] {
            let a = build_hamiltonian(&ModelSpec::ti(n, lambda)).unwrap();
            let b = build_hamiltonian(&ModelSpec::xy(n, lambda, 1.0)).unwrap();
            assert_eq!(a.distance(&b), 0.0);
        }
    }

    #[test]
    fn parity_operator_matches_product() {
        let z = pauli(Axis::Z);
        assert_eq!(spin_parity_operator(1), z);
        let n = 4;
        let mut prod = CMatrix::identity(1 << n, 1 << n);
        for s in 1..=n {
            prod = prod * embed(&z, s, n).unwrap().matrix();
        }
        assert_eq!(spin_parity_operator(n).matrix(), &prod);
        let neel = basis_state(&[true, false, true, false, true, false]);
        assert_abs_diff_eq!(spin_parity_operator(6).expectation_vector(&neel), -1.0);
        let h = build_hamiltonian(&ModelSpec::xy(6, 1.3, 0.5)).unwrap();
        assert!(h.commutator_norm(&spin_parity_operator(6)) < 1e-12);
    }

    #[test]
    fn staggered_flip_examples() {
        let u = staggered_flip_operator(2).unwrap();
        assert_eq!(u, HermitianOperator::identity(2).kron(&pauli(Axis::Z)));
        let u6 = staggered_flip_operator(6).unwrap();
        assert_eq!(u6.matrix() * u6.matrix(), CMatrix::identity(64, 64));
        assert!(staggered_flip_operator(5).is_err());
        let h = build_hamiltonian(&ModelSpec::xxz(6, 0.4)).unwrap();
        let flipped = h.conjugate_by(u6.matrix());
        let target = build_hamiltonian(&ModelSpec { sites: 6, couplings: Couplings::Xxz { j: -1.0, delta: -0.4 } }).unwrap();
        assert!(flipped.distance(&target) < 1e-12);
    }

    #[test]
    fn total_sz_examples() {
        let s = total_sz(2);
        let mut ev = herm_eig(&s).values;
        ev.sort_by(f64::total_cmp);
        assert_eq!(ev, vec![-1.0, 0.0, 0.0, 1.0]);
        let h = build_hamiltonian(&ModelSpec::xxz(6, 0.7)).unwrap();
        assert!(h.commutator_norm(&total_sz(6)) < 1e-12);
        let up = basis_state(&[true; 6]);
        let out = total_sz(6).matrix() * &up;
        assert_eq!(out, &up * Complex64::new(3.0, 0.0));
    }

    #[test]
    fn ti_zero_coupling_is_aligned() {
        let gs = ground_state(&ModelSpec::ti(6, 0.0), GroundStatePolicy::Symmetric, None).unwrap();
        assert_eq!(gs.degeneracy, 1);
        assert_abs_diff_eq!(gs.energy, -6.0, epsilon = 1e-12);
        let up = DensityMatrix::from_pure(&basis_state(&[true; 6])).unwrap();
        assert!(gs.state.distance(&up) < 1e-12);
        assert_eq!(gs.parity, Parity::Even);
    }

    #[test]
    fn ti_strong_coupling_is_ghz_x_plus() {
        let gs = ground_state(&ModelSpec::ti(6, 1e3), GroundStatePolicy::Symmetric, None).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let right = CVector::from_vec(vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)]);
        let left = CVector::from_vec(vec![Complex64::new(s, 0.0), Complex64::new(-s, 0.0)]);
        let ghz = (kron_vectors(&vec![right; 6]) + kron_vectors(&vec![left; 6])) * Complex64::new(s, 0.0);
        assert!(gs.state.fidelity_with_pure(&ghz) > 0.999);
        assert_eq!(gs.parity, Parity::Even);
    }

    #[test]
    fn xxz_ferromagnet_aligned_up() {
        let gs = ground_state(&ModelSpec::xxz(6, -2.0), GroundStatePolicy::AlignedUp, None).unwrap();
        assert_eq!(gs.degeneracy, 2);
        let up = DensityMatrix::from_pure(&basis_state(&[true; 6])).unwrap();
        assert!(gs.state.distance(&up) < 1e-15);
        let sym = ground_state(&ModelSpec::xxz(6, -2.0), GroundStatePolicy::Symmetric, None).unwrap();
        assert!(sym.state.distance(&up) < 1e-10);
        let mix = ground_state(&ModelSpec::xxz(6, -2.0), GroundStatePolicy::Mixture, None).unwrap();
        assert_abs_diff_eq!(mix.state.purity(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn aligned_up_errors_outside_its_domain() {
        // non-degenerate ground state: policy is irrelevant
        assert!(ground_state(&ModelSpec::xxz(4, 5.0), GroundStatePolicy::AlignedUp, None).is_ok());
        // the two Néel-like levels at large Δ form a ground space without |↑↑↑↑⟩
        let wide = ground_state(&ModelSpec::xxz(4, 5.0), GroundStatePolicy::AlignedUp, Some(0.5));
        assert!(matches!(wide, Err(Error::Policy { .. })));
        assert!(ground_state(&ModelSpec::ti(4, 1.0), GroundStatePolicy::AlignedUp, None).is_err());
    }

    #[test]
    fn invalid_specs() {
        assert!(build_hamiltonian(&ModelSpec::ti(1, 1.0)).is_err());
        assert!(build_hamiltonian(&ModelSpec::xy(4, 1.0, 1.5)).is_err());
        assert!(build_hamiltonian(&ModelSpec::xxz(4, f64::NAN)).is_err());
        assert!(build_hamiltonian(&ModelSpec::ti(11, 1.0)).is_err());
    }

    #[test]
    fn classical_formulas() {
        assert_eq!(ti_classical_energy(1.0), -1.25);
        assert_eq!(ti_classical_mz(0.25), 0.5);
        assert_eq!(ti_classical_mx(0.5), 0.0);
        // continuity at the classical transition
        assert_abs_diff_eq!(ti_classical_energy(0.5), -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ti_classical_mz(0.5), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn thermodynamic_formulas() {
        assert_abs_diff_eq!(ti_thermo_energy(1.0).unwrap(), -4.0 / PI, epsilon = 1e-10);
        assert_abs_diff_eq!(ti_thermo_mz(1.0).unwrap(), 1.0 / PI, epsilon = 1e-10);
        assert_abs_diff_eq!(ti_thermo_energy(0.0).unwrap(), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ti_thermo_mz(0.0).unwrap(), 0.5, epsilon = 1e-12);
        // ½(3/4)^{1/8}, evaluated independently
        assert_abs_diff_eq!(ti_thermo_mx(2.0).unwrap(), 0.482_339_314_980_154_7, epsilon = 1e-12);
        assert_eq!(ti_thermo_mx(0.7).unwrap(), 0.0);
        assert!(ti_thermo_energy(-1.0).is_err());
    }

    #[test]
    fn factorization_formulas() {
        let lf = xy_factorization_point(0.5).unwrap().finite().unwrap();
        assert_abs_diff_eq!(lf, 2.0 / 3f64.sqrt(), epsilon = 1e-15);
        let small = xy_factorization_point(1e-9).unwrap().finite().unwrap();
        assert_abs_diff_eq!(small, 1.0, epsilon = 1e-12);
        assert_eq!(xy_factorization_point(1.0).unwrap(), FactorizationPoint::Infinite);
        assert!(xy_factorization_point(0.0).is_err());
        assert!(xy_factorization_point(1.2).is_err());
        assert_abs_diff_eq!(xy_factorization_angle(0.5).unwrap(), (1.0 / 3f64.sqrt()).acos(), epsilon = 1e-15);
        assert_abs_diff_eq!(xy_factorization_angle(0.5).unwrap(), 0.955_316_618_124_509_3, epsilon = 1e-12);
        assert_abs_diff_eq!(xy_factorization_angle(1e-12).unwrap(), 0.0, epsilon = 1e-5);
        assert_abs_diff_eq!(xy_factorization_angle(1.0).unwrap(), PI / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn parity_sectors_cross_at_factorization_point() {
        let lf = 2.0 / 3f64.sqrt();
        let gap = |l: f64| {
            let (e, o) = parity_sector_energies(&ModelSpec::xy(6, l, 0.5)).unwrap();
            e - o
        };
        assert!(gap(lf - 0.01) * gap(lf + 0.01) < 0.0);
    }
}
