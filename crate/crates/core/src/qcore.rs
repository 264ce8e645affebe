//! Dense complex operator algebra for registers of spin-1/2 sites.
//!
//! Site 1 is always the leftmost tensor factor, i.e. the most significant
//! bit of a computational-basis index. Basis state `0` of a site is `|↑⟩`
//! (σz = +1) and basis state `1` is `|↓⟩`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Absolute Hermiticity tolerance, scaled by `max(1, ‖A‖_max)`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Unit-trace tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue a density matrix may have.
pub const PSD_TOL: f64 = -1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest absolute entry of a complex matrix.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

fn log2_exact(dim: usize) -> Option<usize> {
    (dim.is_power_of_two()).then(|| dim.trailing_zeros() as usize)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Dense Hermitian operator on `2^n` dimensional space (or any square
/// dimension when used as a generic observable).
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    /// Validates squareness and Hermiticity.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let deviation = hermiticity_deviation(&matrix);
        if deviation > HERMITIAN_TOL * max_abs(&matrix).max(1.0) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { matrix })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| Complex64::new(x, 0.0)));
        Self { matrix: CMatrix::from_diagonal(&d) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: CMatrix::identity(dim, dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { matrix: CMatrix::zeros(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Number of spin-1/2 sites, when the dimension is a power of two.
    pub fn n_sites(&self) -> Option<usize> {
        log2_exact(self.dim())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn kron(&self, other: &HermitianOperator) -> HermitianOperator {
        Self { matrix: self.matrix.kronecker(&other.matrix) }
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.matrix)
    }

    /// `U† A U`, Hermitian whenever `U` is unitary.
    pub fn conjugate_by(&self, unitary: &CMatrix) -> HermitianOperator {
        let m = unitary.adjoint() * &self.matrix * unitary;
        Self::symmetrized(m)
    }

    /// `(M + M†)/2`; removes round-off asymmetry.
    pub(crate) fn symmetrized(m: CMatrix) -> HermitianOperator {
        let sym = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        Self { matrix: sym }
    }

    /// Max-norm of the commutator `[A, B]`.
    pub fn commutator_norm(&self, other: &HermitianOperator) -> f64 {
        let ab = &self.matrix * &other.matrix;
        let ba = &other.matrix * &self.matrix;
        max_abs(&(ab - ba))
    }

    /// Max-norm distance to another operator.
    pub fn distance(&self, other: &HermitianOperator) -> f64 {
        max_abs(&(&self.matrix - &other.matrix))
    }

    /// Real expectation value `⟨v|A|v⟩`.
    pub fn expectation_vector(&self, v: &CVector) -> f64 {
        (v.adjoint() * &self.matrix * v)[(0, 0)].re
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.matrix[(i, j)] == ZERO))
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator { matrix: &self.matrix + &rhs.matrix }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator { matrix: &self.matrix - &rhs.matrix }
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;
    fn mul(self, rhs: f64) -> HermitianOperator {
        HermitianOperator { matrix: &self.matrix * Complex64::new(rhs, 0.0) }
    }
}

impl Mul<f64> for HermitianOperator {
    type Output = HermitianOperator;
    fn mul(self, rhs: f64) -> HermitianOperator {
        &self * rhs
    }
}

/// The Pauli matrix for `axis`.
pub fn pauli(axis: Axis) -> HermitianOperator {
    let i = Complex64::new(0.0, 1.0);
    let m = match axis {
        Axis::X => CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        Axis::Y => CMatrix::from_row_slice(2, 2, &[ZERO, -i, i, ZERO]),
        Axis::Z => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    };
    HermitianOperator { matrix: m }
}

/// Tensor product of single-site operators placed at the given 1-based
/// sites, identity elsewhere. Sites must be distinct.
pub fn embed_product(factors: &[(usize, &HermitianOperator)], n: usize) -> Result<HermitianOperator> {
    let mut slots: Vec<Option<&HermitianOperator>> = vec![None; n];
    for &(site, op) in factors {
        if site == 0 || site > n {
            return Err(Error::SiteOutOfRange { site, n });
        }
        if op.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: op.dim() });
        }
        if slots[site - 1].is_some() {
            return Err(Error::InvalidParameter(format!("site {site} repeated in product")));
        }
        slots[site - 1] = Some(op);
    }
    let id2 = CMatrix::identity(2, 2);
    let mut acc = CMatrix::identity(1, 1);
    for slot in slots {
        let f = slot.map(|o| &o.matrix).unwrap_or(&id2);
        acc = acc.kronecker(f);
    }
    Ok(HermitianOperator { matrix: acc })
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` at the 1-based `site`.
pub fn embed(op: &HermitianOperator, site: usize, n: usize) -> Result<HermitianOperator> {
    embed_product(&[(site, op)], n)
}

/// Ascending eigenvalues with orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct HermEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermEigen {
    pub fn vector(&self, k: usize) -> CVector {
        self.vectors.column(k).into_owned()
    }
}

/// Multiplies the vector by a global phase so that its largest-magnitude
/// component is real and positive. The first component within a relative
/// 1e-10 of the maximum wins, so the choice is stable under round-off.
pub fn fix_phase(v: &mut CVector) {
    let max = v.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    if max == 0.0 {
        return;
    }
    let pivot = v.iter().position(|z| z.norm() >= max * (1.0 - 1e-10)).unwrap_or(0);
    let phase = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
}

/// Hermitian eigendecomposition, eigenvalues ascending.
pub fn herm_eig(a: &HermitianOperator) -> HermEigen {
    let n = a.dim();
    let eig = SymmetricEigen::new(a.matrix.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let mut v: CVector = eig.eigenvectors.column(k).into_owned();
        let norm = v.norm();
        v /= Complex64::new(norm, 0.0);
        fix_phase(&mut v);
        vectors.set_column(col, &v);
    }
    HermEigen { values, vectors }
}

/// Ordered subset of 1-based site indices naming a reduced state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CorrelationLabel {
    sites: Vec<usize>,
    n_total: usize,
}

/// Correlation subsets explored for six-site chains, excluding the full set.
const CANONICAL_SUBSETS: [&[usize]; 11] = [
    &[1],
    &[1, 2],
    &[1, 3],
    &[1, 4],
    &[1, 2, 3],
    &[1, 2, 4],
    &[1, 3, 5],
    &[1, 2, 3, 4],
    &[1, 2, 3, 5],
    &[1, 2, 4, 5],
    &[1, 2, 3, 4, 5],
];

impl CorrelationLabel {
    pub fn new(sites: Vec<usize>, n_total: usize) -> Result<Self> {
        if sites.is_empty() || sites.len() > n_total {
            return Err(Error::InvalidLabel(format!(
                "{} sites requested out of {n_total}",
                sites.len()
            )));
        }
        if sites.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidLabel(format!("sites {sites:?} not strictly increasing")));
        }
        if let Some(&bad) = sites.iter().find(|&&s| s == 0 || s > n_total) {
            return Err(Error::SiteOutOfRange { site: bad, n: n_total });
        }
        Ok(Self { sites, n_total })
    }

    /// The label covering every site.
    pub fn total(n_total: usize) -> Self {
        Self { sites: (1..=n_total).collect(), n_total }
    }

    /// The standard correlation key: `1, 12, 13, 14, 123, 124, 135, 1234,
    /// 1235, 1245, 12345, tot`, restricted to subsets that fit in `n_total`.
    pub fn canonical_set(n_total: usize) -> Vec<Self> {
        let mut out: Vec<Self> = CANONICAL_SUBSETS
            .iter()
            .filter(|s| s.len() < n_total && s.iter().all(|&x| x <= n_total))
            .map(|s| Self { sites: s.to_vec(), n_total })
            .collect();
        out.push(Self::total(n_total));
        out
    }

    /// Parses `tot`, a run of digits (`135`), or dot-separated sites
    /// (`1.2.10`) for chains longer than nine sites.
    pub fn parse(text: &str, n_total: usize) -> Result<Self> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("tot") {
            return Ok(Self::total(n_total));
        }
        let sites: Result<Vec<usize>> = if t.contains('.') {
            t.split('.')
                .map(|p| p.parse::<usize>().map_err(|_| Error::InvalidLabel(t.to_string())))
                .collect()
        } else {
            t.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| Error::InvalidLabel(t.to_string()))
                })
                .collect()
        };
        Self::new(sites?, n_total)
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn is_total(&self) -> bool {
        self.sites.len() == self.n_total
    }

    /// Positions of this label's sites within `outer`, as a label on
    /// `outer.len()` sites.
    pub fn relative_to(&self, outer: &CorrelationLabel) -> Result<CorrelationLabel> {
        let sites = self
            .sites
            .iter()
            .map(|s| {
                outer
                    .sites
                    .iter()
                    .position(|o| o == s)
                    .map(|p| p + 1)
                    .ok_or_else(|| Error::InvalidLabel(format!("{self} is not contained in {outer}")))
            })
            .collect::<Result<Vec<_>>>()?;
        CorrelationLabel::new(sites, outer.len())
    }

    /// Same sites shifted cyclically by `shift` positions.
    pub fn shifted(&self, shift: usize) -> CorrelationLabel {
        let n = self.n_total;
        let mut sites: Vec<usize> = self.sites.iter().map(|s| (s - 1 + shift) % n + 1).collect();
        sites.sort_unstable();
        CorrelationLabel { sites, n_total: n }
    }
}

impl fmt::Display for CorrelationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_total() && self.n_total > 1 {
            return f.write_str("tot");
        }
        let sep = if self.sites.iter().any(|&s| s > 9) { "." } else { "" };
        let parts: Vec<String> = self.sites.iter().map(|s| s.to_string()).collect();
        f.write_str(&parts.join(sep))
    }
}

impl serde::Serialize for CorrelationLabel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Hermitian, unit-trace, positive-semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    op: HermitianOperator,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace, power-of-two dimension and PSD.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let op = HermitianOperator::new(matrix)?;
        Self::from_operator(op)
    }

    pub fn from_operator(op: HermitianOperator) -> Result<Self> {
        if log2_exact(op.dim()).is_none() {
            return Err(Error::NotPowerOfTwo(op.dim()));
        }
        let tr = op.matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let lowest = herm_eig(&op).values[0];
        if lowest < PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {lowest:.3e}")));
        }
        Ok(Self { op })
    }

    pub(crate) fn from_operator_unchecked(op: HermitianOperator) -> Self {
        Self { op }
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) nonzero vector.
    pub fn from_pure(psi: &CVector) -> Result<Self> {
        let dim = psi.len();
        if log2_exact(dim).is_none() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        let norm = psi.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        let v = psi / Complex64::new(norm, 0.0);
        Ok(Self::from_operator_unchecked(HermitianOperator::symmetrized(&v * v.adjoint())))
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if log2_exact(dim).is_none() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        Ok(Self::from_operator_unchecked(&HermitianOperator::identity(dim) * (1.0 / dim as f64)))
    }

    /// Uniform mixture over the orthonormal columns of `basis`.
    pub fn uniform_mixture(basis: &CMatrix) -> Result<Self> {
        let k = basis.ncols();
        if k == 0 {
            return Err(Error::InvalidState("empty subspace".into()));
        }
        let proj = basis * basis.adjoint() * Complex64::new(1.0 / k as f64, 0.0);
        Ok(Self::from_operator_unchecked(HermitianOperator::symmetrized(proj)))
    }

    /// Convex combination `Σ w_k ρ_k`; weights must be non-negative and sum to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let dim = first.1.dim();
        let mut acc = CMatrix::zeros(dim, dim);
        let mut total = 0.0;
        for (w, rho) in parts {
            if *w < 0.0 {
                return Err(Error::InvalidState(format!("negative weight {w}")));
            }
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: rho.dim() });
            }
            acc += rho.matrix() * Complex64::new(*w, 0.0);
            total += w;
        }
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("weights sum to {total}")));
        }
        Ok(Self::from_operator_unchecked(HermitianOperator { matrix: acc }))
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn n_sites(&self) -> usize {
        self.op.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.op.matrix
    }

    pub fn as_operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn trace(&self) -> f64 {
        self.op.trace()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        let m = &self.op.matrix;
        m.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `Tr[ρ A]`.
    pub fn expectation(&self, a: &HermitianOperator) -> Result<f64> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: a.dim() });
        }
        let m = &self.op.matrix;
        let b = &a.matrix;
        let n = self.dim();
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += m[(i, j)] * b[(j, i)];
            }
        }
        Ok(acc.re)
    }

    /// `⟨ψ|ρ|ψ⟩` for a normalized `ψ`.
    pub fn fidelity_with_pure(&self, psi: &CVector) -> f64 {
        self.op.expectation_vector(psi)
    }

    pub fn distance(&self, other: &DensityMatrix) -> f64 {
        self.op.distance(&other.op)
    }

    /// Frobenius distance.
    pub fn frobenius_distance(&self, other: &DensityMatrix) -> f64 {
        (self.matrix() - other.matrix()).norm()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        herm_eig(&self.op).values
    }

    /// Copy with round-off negative eigenvalues clamped to zero and the trace
    /// renormalized. Used only when a state leaves the library.
    pub fn clamped_for_export(&self) -> DensityMatrix {
        let eig = herm_eig(&self.op);
        if eig.values[0] >= 0.0 {
            return self.clone();
        }
        let clamped: Vec<f64> = eig.values.iter().map(|&x| x.max(0.0)).collect();
        let total: f64 = clamped.iter().sum();
        let d = DVector::from_iterator(
            clamped.len(),
            clamped.iter().map(|&x| Complex64::new(x / total, 0.0)),
        );
        let m = &eig.vectors * CMatrix::from_diagonal(&d) * eig.vectors.adjoint();
        Self::from_operator_unchecked(HermitianOperator::symmetrized(m))
    }
}

/// Reduced state on the sites of `keep`, tracing out all others.
pub fn partial_trace(rho: &DensityMatrix, keep: &CorrelationLabel) -> Result<DensityMatrix> {
    let n = rho.n_sites();
    if keep.n_total() != n {
        return Err(Error::DimensionMismatch { expected: 1 << keep.n_total(), found: rho.dim() });
    }
    if keep.is_total() {
        return Ok(rho.clone());
    }
    let kept_bits: Vec<usize> = keep.sites().iter().map(|s| n - s).collect();
    let traced_bits: Vec<usize> = (1..=n)
        .filter(|s| !keep.sites().contains(s))
        .map(|s| n - s)
        .collect();
    let k = kept_bits.len();
    let scatter = |value: usize, bits: &[usize]| -> usize {
        // bits[0] receives the most significant bit of `value`
        let len = bits.len();
        bits.iter()
            .enumerate()
            .fold(0usize, |acc, (pos, &b)| acc | (((value >> (len - 1 - pos)) & 1) << b))
    };
    let kept_index: Vec<usize> = (0..1usize << k).map(|v| scatter(v, &kept_bits)).collect();
    let traced_index: Vec<usize> =
        (0..1usize << traced_bits.len()).map(|v| scatter(v, &traced_bits)).collect();
    let m = rho.matrix();
    let dk = 1usize << k;
    let mut out = CMatrix::zeros(dk, dk);
    for (a, &ia) in kept_index.iter().enumerate() {
        for (b, &ib) in kept_index.iter().enumerate() {
            let mut acc = ZERO;
            for &r in &traced_index {
                acc += m[(ia | r, ib | r)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(DensityMatrix::from_operator_unchecked(HermitianOperator::symmetrized(out)))
}

/// Computational-basis product state; `up[k]` selects `|↑⟩` on site `k+1`.
pub fn basis_state(up: &[bool]) -> CVector {
    let n = up.len();
    let index = up
        .iter()
        .enumerate()
        .fold(0usize, |acc, (k, &u)| if u { acc } else { acc | (1 << (n - 1 - k)) });
    let mut v = CVector::zeros(1 << n);
    v[index] = ONE;
    v
}

/// `⊗_k v_k` for single-site vectors.
pub fn kron_vectors(parts: &[CVector]) -> CVector {
    parts.iter().fold(CVector::from_element(1, ONE), |acc, v| acc.kronecker(v))
}

/// Haar-random pure state on `n` sites (Gaussian components, normalized).
pub fn random_pure_state<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    let mut gauss = || {
        // Box–Muller
        let u1: f64 = 1.0 - rng.random::<f64>();
        let u2: f64 = rng.random::<f64>();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let mut v = CVector::from_fn(1 << n, |_, _| Complex64::new(gauss(), gauss()));
    let norm = v.norm();
    v /= Complex64::new(norm, 0.0);
    v
}
