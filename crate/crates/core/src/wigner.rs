//! Spin-1/2 Wigner kernel, equal-angle evaluation, sphere sampling, the
//! reference-state catalogue and reconstruction from Wigner samples.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::qcore::{
    basis_state, embed_product, kron_vectors, partial_trace, pauli, Axis, CMatrix, CVector,
    CorrelationLabel, DensityMatrix, HermitianOperator,
};
use crate::{Complex64, Error, Result};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Largest and smallest eigenvalue of the single-site kernel.
pub const KERNEL_EIGENVALUES: [f64; 2] = [(1.0 + SQRT3) / 2.0, (1.0 - SQRT3) / 2.0];

/// A point `(θ, φ)` on the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    theta: f64,
    phi: f64,
}

impl PhasePoint {
    /// `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidParameter(format!("theta = {theta} outside [0, π]")));
        }
        if !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::InvalidParameter(format!("phi = {phi} outside [0, 2π)")));
        }
        Ok(Self { theta, phi })
    }

    pub const NORTH: PhasePoint = PhasePoint { theta: 0.0, phi: 0.0 };

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Uniform draw in `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        let theta = rng.random::<f64>() * PI;
        let phi = rng.random::<f64>() * 2.0 * PI;
        Self { theta, phi: if phi >= 2.0 * PI { 0.0 } else { phi } }
    }

    fn bloch(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

fn kernel_matrix(p: &PhasePoint) -> CMatrix {
    // R Π R† with R = exp(-iσz φ/2) exp(-iσy θ/2) is ½(1 + √3 n·σ)
    let [x, y, z] = p.bloch();
    let h = 0.5 * SQRT3;
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.5 + h * z, 0.0),
            Complex64::new(h * x, -h * y),
            Complex64::new(h * x, h * y),
            Complex64::new(0.5 - h * z, 0.0),
        ],
    )
}

/// Single-site kernel `Δ(θ, φ)`, the parity `½(1 + √3 σz)` rotated to `(θ, φ)`.
pub fn kernel_single(p: &PhasePoint) -> HermitianOperator {
    HermitianOperator::new(kernel_matrix(p)).expect("kernel is Hermitian")
}

/// `⊗_i Δ(p_i)` over `points.len() == n` sites.
pub fn kernel_multi(points: &[PhasePoint], n: usize) -> Result<HermitianOperator> {
    if points.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: points.len() });
    }
    let kernels: Vec<HermitianOperator> = points.iter().map(kernel_single).collect();
    let factors: Vec<(usize, &HermitianOperator)> =
        kernels.iter().enumerate().map(|(i, k)| (i + 1, k)).collect();
    embed_product(&factors, n)
}

/// Traces the last tensor factor of `m` against the 2×2 matrix `d`:
/// `out[a,b] = Σ_{x,y} m[(a,x),(b,y)] d[y,x]`.
fn contract_last(m: &CMatrix, d: &CMatrix) -> CMatrix {
    let k = m.nrows() / 2;
    CMatrix::from_fn(k, k, |a, b| {
        let mut acc = Complex64::new(0.0, 0.0);
        for x in 0..2 {
            for y in 0..2 {
                acc += m[(2 * a + x, 2 * b + y)] * d[(y, x)];
            }
        }
        acc
    })
}

/// `Tr[ρ ⊗_i Δ(p_i)]`, one point per site of `rho`.
pub fn wigner_value(rho: &DensityMatrix, points: &[PhasePoint]) -> Result<f64> {
    let n = rho.n_sites();
    if points.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: points.len() });
    }
    let mut m = rho.matrix().clone();
    for p in points.iter().rev() {
        m = contract_last(&m, &kernel_matrix(p));
    }
    let w = m[(0, 0)];
    if w.im.abs() > 1e-12 * w.re.abs().max(1.0) {
        return Err(Error::InvalidState(format!("Wigner value has imaginary part {:.3e}", w.im)));
    }
    Ok(w.re)
}

/// Equal-angle value of the reduced Wigner function on `label` at `p`.
pub fn equal_angle_point(rho: &DensityMatrix, label: &CorrelationLabel, p: &PhasePoint) -> Result<f64> {
    let reduced = partial_trace(rho, label)?;
    wigner_value(&reduced, &vec![*p; label.len()])
}

/// Regular `θ × φ` sampling: `θ` inclusive of both poles, `φ ∈ [0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereGrid {
    n_theta: usize,
    n_phi: usize,
}

impl Default for SphereGrid {
    fn default() -> Self {
        Self { n_theta: 181, n_phi: 360 }
    }
}

impl SphereGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < 2 || n_phi < 2 {
            return Err(Error::InvalidParameter(format!(
                "sphere grid needs at least 2 samples per axis, got {n_theta}×{n_phi}"
            )));
        }
        Ok(Self { n_theta, n_phi })
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn theta(&self, i: usize) -> f64 {
        if i + 1 == self.n_theta {
            PI
        } else {
            PI * i as f64 / (self.n_theta - 1) as f64
        }
    }

    pub fn phi(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_phi as f64
    }

    pub fn point(&self, i: usize, j: usize) -> PhasePoint {
        PhasePoint { theta: self.theta(i), phi: self.phi(j) }
    }
}

/// Equal-angle values of one reduced state sampled on a [`SphereGrid`];
/// rows are `θ`, columns `φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereField {
    pub label: CorrelationLabel,
    pub grid: SphereGrid,
    pub values: DMatrix<f64>,
}

impl SphereField {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    /// `(θ, φ, value)` triples in θ-major order.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.grid.n_theta).flat_map(move |i| {
            (0..self.grid.n_phi).map(move |j| (self.grid.theta(i), self.grid.phi(j), self.values[(i, j)]))
        })
    }
}

pub fn sphere_field(rho: &DensityMatrix, label: &CorrelationLabel, grid: SphereGrid) -> Result<SphereField> {
    let reduced = partial_trace(rho, label)?;
    let k = label.len();
    let rows: Vec<Vec<f64>> = (0..grid.n_theta)
        .into_par_iter()
        .map(|i| {
            (0..grid.n_phi)
                .map(|j| wigner_value(&reduced, &vec![grid.point(i, j); k]))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let values = DMatrix::from_fn(grid.n_theta, grid.n_phi, |i, j| rows[i][j]);
    Ok(SphereField { label: label.clone(), grid, values })
}

/// Catalogue of states used to read Wigner plots of spin chains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReferenceState {
    Up,
    UpUp,
    UpDown,
    /// `(|↑↓⟩ + |↓↑⟩)/√2`
    BellPsiPlus,
    /// `(|↑↓⟩ − |↓↑⟩)/√2`
    Singlet,
    /// `(|↑↓…⟩ + |↓↑…⟩)/√2`, alternating spins on `n` sites
    NeelCatPlus(usize),
    /// `(|↑↓…⟩ − |↓↑…⟩)/√2`
    NeelCatMinus(usize),
    /// `(|↑…↑⟩ + |↓…↓⟩)/√2`
    GhzPlus(usize),
    /// `(|↑…↑⟩ − |↓…↓⟩)/√2`
    GhzMinus(usize),
    /// `I/2`
    MixedSingle,
    /// `½(|↑…↑⟩⟨↑…↑| + |↓…↓⟩⟨↓…↓|)`
    GhzMixture(usize),
}

impl ReferenceState {
    /// The twelve reference panels, in order.
    pub fn panels() -> [ReferenceState; 12] {
        use ReferenceState::*;
        [
            Up,
            UpUp,
            UpDown,
            BellPsiPlus,
            Singlet,
            NeelCatMinus(4),
            GhzPlus(6),
            GhzMinus(6),
            NeelCatPlus(6),
            NeelCatMinus(6),
            MixedSingle,
            GhzMixture(6),
        ]
    }

    pub fn sites(&self) -> usize {
        use ReferenceState::*;
        match *self {
            Up | MixedSingle => 1,
            UpUp | UpDown | BellPsiPlus | Singlet => 2,
            NeelCatPlus(n) | NeelCatMinus(n) | GhzPlus(n) | GhzMinus(n) | GhzMixture(n) => n,
        }
    }
}

impl fmt::Display for ReferenceState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ReferenceState::*;
        match self {
            Up => f.write_str("up"),
            UpUp => f.write_str("up_up"),
            UpDown => f.write_str("up_down"),
            BellPsiPlus => f.write_str("bell_psi_plus"),
            Singlet => f.write_str("singlet"),
            NeelCatPlus(n) => write!(f, "neel_cat_plus_{n}"),
            NeelCatMinus(n) => write!(f, "neel_cat_minus_{n}"),
            GhzPlus(n) => write!(f, "ghz_plus_{n}"),
            GhzMinus(n) => write!(f, "ghz_minus_{n}"),
            MixedSingle => f.write_str("mixed_single"),
            GhzMixture(n) => write!(f, "ghz_mixture_{n}"),
        }
    }
}

fn cat(a: &[bool], b: &[bool], sign: f64) -> CVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (basis_state(a) + basis_state(b) * Complex64::new(sign, 0.0)) * Complex64::new(s, 0.0)
}

fn neel(n: usize, first_up: bool) -> Vec<bool> {
    (0..n).map(|k| (k % 2 == 0) == first_up).collect()
}

pub fn reference_state(kind: ReferenceState) -> Result<DensityMatrix> {
    use ReferenceState::*;
    let n = kind.sites();
    if n == 0 || n > crate::models::MAX_SITES {
        return Err(Error::InvalidParameter(format!("{n} sites for reference state {kind}")));
    }
    let pure = |v: CVector| DensityMatrix::from_pure(&v);
    match kind {
        Up => pure(basis_state(&[true])),
        UpUp => pure(basis_state(&[true, true])),
        UpDown => pure(basis_state(&[true, false])),
        BellPsiPlus => pure(cat(&[true, false], &[false, true], 1.0)),
        Singlet => pure(cat(&[true, false], &[false, true], -1.0)),
        NeelCatPlus(_) | NeelCatMinus(_) => {
            if n < 2 {
                return Err(Error::InvalidParameter("Néel cat needs at least two sites".into()));
            }
            let sign = if matches!(kind, NeelCatPlus(_)) { 1.0 } else { -1.0 };
            pure(cat(&neel(n, true), &neel(n, false), sign))
        }
        GhzPlus(_) => pure(cat(&vec![true; n], &vec![false; n], 1.0)),
        GhzMinus(_) => pure(cat(&vec![true; n], &vec![false; n], -1.0)),
        MixedSingle => DensityMatrix::maximally_mixed(2),
        GhzMixture(_) => {
            let up = DensityMatrix::from_pure(&basis_state(&vec![true; n]))?;
            let down = DensityMatrix::from_pure(&basis_state(&vec![false; n]))?;
            DensityMatrix::mixture(&[(0.5, &up), (0.5, &down)])
        }
    }
}

/// `(|→…→⟩ ± |←…←⟩)/√2` with `|→⟩, |←⟩` the σx eigenstates.
pub fn ghz_x(n: usize, plus: bool) -> Result<DensityMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let right = CVector::from_vec(vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)]);
    let left = CVector::from_vec(vec![Complex64::new(s, 0.0), Complex64::new(-s, 0.0)]);
    let sign = if plus { 1.0 } else { -1.0 };
    let v = kron_vectors(&vec![right; n]) + kron_vectors(&vec![left; n]) * Complex64::new(sign, 0.0);
    DensityMatrix::from_pure(&v)
}

/// Two-qubit Werner state `x |Ψ⁻⟩⟨Ψ⁻| + (1 − x) I/4`, `x ∈ [0, 1]`.
pub fn werner(x: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter(format!("Werner weight {x} outside [0, 1]")));
    }
    let singlet = reference_state(ReferenceState::Singlet)?;
    let mixed = DensityMatrix::maximally_mixed(4)?;
    DensityMatrix::mixture(&[(x, &singlet), (1.0 - x, &mixed)])
}

/// Density matrix fitted to Wigner samples.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub state: DensityMatrix,
    /// Euclidean norm of `W_fit − W_sample` over all samples.
    pub residual: f64,
    pub rank: usize,
}

fn pauli_string(index: usize, n: usize) -> HermitianOperator {
    let ops = [
        HermitianOperator::identity(2),
        pauli(Axis::X),
        pauli(Axis::Y),
        pauli(Axis::Z),
    ];
    let factors: Vec<(usize, &HermitianOperator)> =
        (0..n).map(|s| (s + 1, &ops[(index >> (2 * (n - 1 - s))) & 3])).collect();
    embed_product(&factors, n).expect("valid sites")
}

/// Least-squares fit of `ρ = 2⁻ⁿ Σ_P c_P P` (Pauli strings `P`, `c_I = 1`)
/// to samples `Tr[ρ Δ(points)] = w`.
pub fn reconstruct_density(samples: &[(Vec<PhasePoint>, f64)], n: usize) -> Result<Reconstruction> {
    if n == 0 || n > 5 {
        return Err(Error::InvalidParameter(format!("reconstruction supports 1..=5 sites, got {n}")));
    }
    let terms = 1usize << (2 * n);
    if samples.len() < terms {
        return Err(Error::RankDeficient { rank: samples.len(), needed: terms });
    }
    let ops = [
        HermitianOperator::identity(2),
        pauli(Axis::X),
        pauli(Axis::Y),
        pauli(Axis::Z),
    ];
    let scale = 1.0 / (1usize << n) as f64;
    let mut a = DMatrix::<f64>::zeros(samples.len(), terms);
    let mut b = DVector::<f64>::zeros(samples.len());
    for (row, (points, w)) in samples.iter().enumerate() {
        if points.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: points.len() });
        }
        // t[s][k] = Tr[σ_k Δ(p_s)]
        let t: Vec<[f64; 4]> = points
            .iter()
            .map(|p| {
                let d = kernel_matrix(p);
                let mut out = [0.0; 4];
                for (k, op) in ops.iter().enumerate() {
                    out[k] = (op.matrix() * &d).trace().re;
                }
                out
            })
            .collect();
        for col in 0..terms {
            let mut prod = scale;
            for (s, ts) in t.iter().enumerate() {
                prod *= ts[(col >> (2 * (n - 1 - s))) & 3];
            }
            a[(row, col)] = prod;
        }
        b[row] = *w;
    }
    let svd_full = a.clone().svd(false, false);
    let smax = svd_full.singular_values.max();
    let rank = svd_full.singular_values.iter().filter(|&&s| s > 1e-10 * smax).count();
    if rank < terms {
        return Err(Error::RankDeficient { rank, needed: terms });
    }
    let rest = a.columns(1, terms - 1).into_owned();
    let rhs = &b - a.column(0);
    let svd = rest.svd(true, true);
    let x = svd
        .solve(&rhs, 1e-14 * smax)
        .map_err(|e| Error::InvalidState(format!("least-squares solve failed: {e}")))?;
    let mut coeffs = vec![1.0];
    coeffs.extend(x.iter().copied());
    let fitted = &a * DVector::from_vec(coeffs.clone());
    let residual = (fitted - &b).norm();

    let dim = 1usize << n;
    let mut m = CMatrix::zeros(dim, dim);
    for (idx, c) in coeffs.iter().enumerate() {
        if *c != 0.0 {
            m += pauli_string(idx, n).into_matrix() * Complex64::new(c * scale, 0.0);
        }
    }
    let op = HermitianOperator::new(m)?;
    let state = match DensityMatrix::from_operator(op.clone()) {
        Ok(s) => s,
        Err(Error::InvalidState(_)) => {
            // noisy data: report the nearest valid state for export
            DensityMatrix::from_operator_unchecked(op).clamped_for_export()
        }
        Err(e) => return Err(e),
    };
    Ok(Reconstruction { state, residual, rank })
}
