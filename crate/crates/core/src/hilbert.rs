//! Dense complex linear algebra for one photon (4 dimensions) and a photon
//! pair (16 dimensions).
//!
//! # Basis convention
//!
//! Each photon carries two qubits: a momentum qubit (top beam `T` = 0,
//! bottom beam `B` = 1) and a polarization qubit (`H` = 0, `V` = 1). Within
//! a photon the momentum qubit is the left tensor factor, so the photon
//! index is `2·m + p`:
//!
//! | index | 0  | 1  | 2  | 3  |
//! |-------|----|----|----|----|
//! | state | TH | TV | BH | BV |
//!
//! Within a pair the signal photon is the left factor and the pair index is
//! `4·signal + idler`. Every module goes through [`BasisConvention`] rather
//! than hard-coding indices.
//!
//! Global phase is never observable here; compare pure states with
//! [`PairKet::overlap`] or [`state_fidelity`].

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Tolerance for algebraic identities (unitarity, trace, Hermiticity).
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Smallest eigenvalue still accepted as positive semidefinite.
pub const PSD_TOL: f64 = 1e-10;

pub const PHOTON_DIM: usize = 4;
pub const PAIR_DIM: usize = 16;

const fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HilbertError {
    #[error("tensor product of dimension {0} exceeds the 16-dimensional pair space")]
    DimensionOverflow(usize),
    #[error("unsupported operator dimension {rows}x{cols}")]
    UnsupportedDimension { rows: usize, cols: usize },
    #[error("expected a {expected}x{expected} operator, got {rows}x{cols}")]
    WrongDimension {
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("operator is not unitary (max |U†U - I| = {0:.3e})")]
    NotUnitary(f64),
    #[error("Kraus set is not trace preserving (max |ΣK†K - I| = {0:.3e})")]
    NotTracePreserving(f64),
    #[error("empty Kraus set")]
    EmptyKraus,
    #[error("state vector is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("zero state vector cannot be normalized")]
    ZeroVector,
    #[error("density matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("density matrix has trace {0}, expected 1")]
    BadTrace(f64),
    #[error("density matrix has negative eigenvalue {0:.3e}")]
    NotPositive(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Photon {
    Signal,
    Idler,
}

impl Photon {
    pub fn other(self) -> Photon {
        match self {
            Photon::Signal => Photon::Idler,
            Photon::Idler => Photon::Signal,
        }
    }
}

/// Momentum qubit: which of the two conjugate beams the photon occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Momentum {
    T,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    H,
    V,
}

/// Degree of freedom of a single photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dof {
    Momentum,
    Polarization,
}

impl Momentum {
    pub fn level(self) -> usize {
        match self {
            Momentum::T => 0,
            Momentum::B => 1,
        }
    }

    pub fn flipped(self) -> Momentum {
        match self {
            Momentum::T => Momentum::B,
            Momentum::B => Momentum::T,
        }
    }

    pub fn ket(self) -> [C64; 2] {
        qubit_ket(self.level())
    }
}

impl Polarization {
    pub fn level(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }

    pub fn ket(self) -> [C64; 2] {
        qubit_ket(self.level())
    }
}

fn qubit_ket(level: usize) -> [C64; 2] {
    let mut k = [c(0.0); 2];
    k[level] = c(1.0);
    k
}

/// Index arithmetic for the fixed basis ordering described in the module docs.
pub struct BasisConvention;

impl BasisConvention {
    pub const fn photon_index(momentum: usize, polarization: usize) -> usize {
        2 * momentum + polarization
    }

    pub const fn pair_index(signal: usize, idler: usize) -> usize {
        PHOTON_DIM * signal + idler
    }

    /// `(momentum, polarization)` levels of a photon index.
    pub const fn split_photon(index: usize) -> (usize, usize) {
        (index / 2, index % 2)
    }

    /// `(signal, idler)` photon indices of a pair index.
    pub const fn split_pair(index: usize) -> (usize, usize) {
        (index / PHOTON_DIM, index % PHOTON_DIM)
    }

    /// Level of one degree of freedom of one photon inside a pair index.
    pub const fn level_in_pair(index: usize, photon: Photon, dof: Dof) -> usize {
        let (s, i) = Self::split_pair(index);
        let p = match photon {
            Photon::Signal => s,
            Photon::Idler => i,
        };
        Self::level_in_photon(p, dof)
    }

    pub const fn level_in_photon(index: usize, dof: Dof) -> usize {
        let (m, p) = Self::split_photon(index);
        match dof {
            Dof::Momentum => m,
            Dof::Polarization => p,
        }
    }
}

/// A square complex matrix of dimension 2, 4 or 16.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    mat: DMatrix<C64>,
}

impl Operator {
    pub fn new(mat: DMatrix<C64>) -> Result<Self, HilbertError> {
        let (rows, cols) = mat.shape();
        if rows != cols || !matches!(rows, 2 | 4 | 16) {
            return Err(HilbertError::UnsupportedDimension { rows, cols });
        }
        Ok(Self { mat })
    }

    /// Row-major real entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self, HilbertError> {
        if entries.len() != dim * dim {
            return Err(HilbertError::UnsupportedDimension {
                rows: dim,
                cols: entries.len() / dim.max(1),
            });
        }
        Self::new(DMatrix::from_row_iterator(
            dim,
            dim,
            entries.iter().map(|&x| c(x)),
        ))
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    pub fn adjoint(&self) -> Operator {
        Operator {
            mat: self.mat.adjoint(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// Matrix product `self · rhs`.
    pub fn compose(&self, rhs: &Operator) -> Result<Operator, HilbertError> {
        if self.dim() != rhs.dim() {
            return Err(HilbertError::WrongDimension {
                expected: self.dim(),
                rows: rhs.dim(),
                cols: rhs.dim(),
            });
        }
        Ok(Operator {
            mat: &self.mat * &rhs.mat,
        })
    }

    /// Largest entrywise deviation of `U†U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        max_abs_diff(
            &(self.mat.adjoint() * &self.mat),
            &DMatrix::identity(self.dim(), self.dim()),
        )
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect() <= ALGEBRA_TOL
    }

    pub fn ensure_unitary(&self) -> Result<(), HilbertError> {
        let d = self.unitarity_defect();
        if d > ALGEBRA_TOL {
            return Err(HilbertError::NotUnitary(d));
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        max_abs_diff(&self.mat, &other.mat)
    }

    /// Purity `Tr ρ²` when the operator is a density matrix.
    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }

    /// Eigenvalues in ascending order, assuming the operator is Hermitian.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        sorted_eigenvalues(&self.mat)
    }
}

pub(crate) fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn sorted_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Kronecker product `a ⊗ b` with `a` as the left (more significant) factor.
pub fn tensor(a: &Operator, b: &Operator) -> Result<Operator, HilbertError> {
    let dim = a.dim() * b.dim();
    if dim > PAIR_DIM {
        return Err(HilbertError::DimensionOverflow(dim));
    }
    Ok(Operator {
        mat: a.mat.kronecker(&b.mat),
    })
}

fn normalized(amp: DVector<C64>) -> Result<DVector<C64>, HilbertError> {
    let n2 = amp.norm_squared();
    if (n2 - 1.0).abs() > ALGEBRA_TOL {
        return Err(HilbertError::NotNormalized(n2));
    }
    Ok(amp)
}

fn renormalized(amp: DVector<C64>) -> Result<DVector<C64>, HilbertError> {
    let n = amp.norm();
    if n == 0.0 {
        return Err(HilbertError::ZeroVector);
    }
    Ok(amp.unscale(n))
}

/// Pure state of one photon, `Σ|amp|² = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonState {
    amp: DVector<C64>,
}

impl PhotonState {
    pub fn new(amp: [C64; PHOTON_DIM]) -> Result<Self, HilbertError> {
        Ok(Self {
            amp: normalized(DVector::from_row_slice(&amp))?,
        })
    }

    /// Builds a state from amplitudes of arbitrary norm.
    pub fn normalize(amp: [C64; PHOTON_DIM]) -> Result<Self, HilbertError> {
        Ok(Self {
            amp: renormalized(DVector::from_row_slice(&amp))?,
        })
    }

    pub fn basis(momentum: Momentum, polarization: Polarization) -> Self {
        let mut amp = DVector::zeros(PHOTON_DIM);
        amp[BasisConvention::photon_index(momentum.level(), polarization.level())] = c(1.0);
        Self { amp }
    }

    /// Momentum qubit ⊗ polarization qubit.
    pub fn product(momentum: [C64; 2], polarization: [C64; 2]) -> Result<Self, HilbertError> {
        let m = DVector::from_row_slice(&momentum);
        let p = DVector::from_row_slice(&polarization);
        Ok(Self {
            amp: normalized(m.kronecker(&p))?,
        })
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amp
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amp[index]
    }

    /// Signal ⊗ idler pair state.
    pub fn tensor(&self, idler: &PhotonState) -> PairKet {
        PairKet {
            amp: self.amp.kronecker(&idler.amp),
        }
    }

    pub fn apply(&self, g: &Operator) -> Result<PhotonState, HilbertError> {
        check_dim(g, PHOTON_DIM)?;
        g.ensure_unitary()?;
        Ok(Self {
            amp: &g.mat * &self.amp,
        })
    }

    pub fn density(&self) -> Operator {
        Operator {
            mat: &self.amp * self.amp.adjoint(),
        }
    }

    /// `|⟨self|other⟩|`, insensitive to global phase.
    pub fn overlap(&self, other: &PhotonState) -> f64 {
        self.amp.dotc(&other.amp).norm()
    }
}

/// Pure state of the signal–idler pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairKet {
    amp: DVector<C64>,
}

impl PairKet {
    pub fn new(amp: Vec<C64>) -> Result<Self, HilbertError> {
        if amp.len() != PAIR_DIM {
            return Err(HilbertError::WrongDimension {
                expected: PAIR_DIM,
                rows: amp.len(),
                cols: 1,
            });
        }
        Ok(Self {
            amp: normalized(DVector::from_vec(amp))?,
        })
    }

    pub fn normalize(amp: Vec<C64>) -> Result<Self, HilbertError> {
        if amp.len() != PAIR_DIM {
            return Err(HilbertError::WrongDimension {
                expected: PAIR_DIM,
                rows: amp.len(),
                cols: 1,
            });
        }
        Ok(Self {
            amp: renormalized(DVector::from_vec(amp))?,
        })
    }

    pub fn basis(index: usize) -> Self {
        let mut amp = DVector::zeros(PAIR_DIM);
        amp[index] = c(1.0);
        Self { amp }
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amp
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amp[index]
    }

    pub fn overlap(&self, other: &PairKet) -> f64 {
        self.amp.dotc(&other.amp).norm()
    }

    pub fn density(&self) -> PairState {
        PairState::pure(self)
    }
}

/// Density matrix of the photon pair.
///
/// Constructed states are Hermitian with unit trace and no eigenvalue below
/// `-PSD_TOL`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairState {
    rho: DMatrix<C64>,
}

impl PairState {
    pub fn new(rho: DMatrix<C64>) -> Result<Self, HilbertError> {
        let state = Self { rho };
        state.validate()?;
        Ok(state)
    }

    pub fn pure(psi: &PairKet) -> Self {
        Self {
            rho: &psi.amp * psi.amp.adjoint(),
        }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            rho: DMatrix::identity(PAIR_DIM, PAIR_DIM).unscale(PAIR_DIM as f64),
        }
    }

    pub(crate) fn from_matrix_unchecked(rho: DMatrix<C64>) -> Self {
        debug_assert_eq!(rho.shape(), (PAIR_DIM, PAIR_DIM));
        Self { rho }
    }

    /// Checks Hermiticity, unit trace and positivity.
    pub fn validate(&self) -> Result<(), HilbertError> {
        let (rows, cols) = self.rho.shape();
        if (rows, cols) != (PAIR_DIM, PAIR_DIM) {
            return Err(HilbertError::WrongDimension {
                expected: PAIR_DIM,
                rows,
                cols,
            });
        }
        let herm = max_abs_diff(&self.rho, &self.rho.adjoint());
        if herm > ALGEBRA_TOL {
            return Err(HilbertError::NotHermitian(herm));
        }
        let tr = self.rho.trace();
        if (tr.re - 1.0).abs() > ALGEBRA_TOL || tr.im.abs() > ALGEBRA_TOL {
            return Err(HilbertError::BadTrace(tr.re));
        }
        let min = self.eigenvalues()[0];
        if min < -PSD_TOL {
            return Err(HilbertError::NotPositive(min));
        }
        Ok(())
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.rho
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.rho[(row, col)]
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        sorted_eigenvalues(&self.rho)
    }

    pub fn max_abs_diff(&self, other: &PairState) -> f64 {
        max_abs_diff(&self.rho, &other.rho)
    }

    /// `p·self + (1-p)·other`.
    pub fn mix(&self, other: &PairState, p: f64) -> PairState {
        PairState {
            rho: self.rho.scale(p) + other.rho.scale(1.0 - p),
        }
    }
}

fn check_dim(g: &Operator, expected: usize) -> Result<(), HilbertError> {
    if g.dim() != expected {
        return Err(HilbertError::WrongDimension {
            expected,
            rows: g.dim(),
            cols: g.dim(),
        });
    }
    Ok(())
}

/// Embeds a single-photon operator into the pair space.
pub fn lift(photon: Photon, g: &Operator) -> Result<Operator, HilbertError> {
    check_dim(g, PHOTON_DIM)?;
    let id = Operator::identity(PHOTON_DIM);
    match photon {
        Photon::Signal => tensor(g, &id),
        Photon::Idler => tensor(&id, g),
    }
}

/// `ρ → GρG†` with `G` the unitary `g` acting on one photon.
pub fn apply_to_photon(
    state: &PairState,
    photon: Photon,
    g: &Operator,
) -> Result<PairState, HilbertError> {
    check_dim(g, PHOTON_DIM)?;
    g.ensure_unitary()?;
    let big = lift(photon, g)?;
    Ok(PairState {
        rho: &big.mat * &state.rho * big.mat.adjoint(),
    })
}

/// Largest deviation of `Σ K†K` from the identity.
pub fn kraus_completeness_defect(kraus: &[Operator]) -> Result<f64, HilbertError> {
    let first = kraus.first().ok_or(HilbertError::EmptyKraus)?;
    let d = first.dim();
    let mut sum = DMatrix::<C64>::zeros(d, d);
    for k in kraus {
        check_dim(k, d)?;
        sum += k.mat.adjoint() * &k.mat;
    }
    Ok(max_abs_diff(&sum, &DMatrix::identity(d, d)))
}

/// `ρ → Σ_k (K_k ⊗ I) ρ (K_k ⊗ I)†` for a trace-preserving Kraus set on one photon.
pub fn apply_kraus_to_photon(
    state: &PairState,
    photon: Photon,
    kraus: &[Operator],
) -> Result<PairState, HilbertError> {
    let defect = kraus_completeness_defect(kraus)?;
    if defect > ALGEBRA_TOL {
        return Err(HilbertError::NotTracePreserving(defect));
    }
    let mut rho = DMatrix::<C64>::zeros(PAIR_DIM, PAIR_DIM);
    for k in kraus {
        let big = lift(photon, k)?;
        rho += &big.mat * &state.rho * big.mat.adjoint();
    }
    Ok(PairState { rho })
}

/// Reduced density matrix of one photon.
pub fn partial_trace(state: &PairState, keep: Photon) -> Operator {
    let mut out = DMatrix::<C64>::zeros(PHOTON_DIM, PHOTON_DIM);
    for a in 0..PHOTON_DIM {
        for b in 0..PHOTON_DIM {
            let mut acc = c(0.0);
            for k in 0..PHOTON_DIM {
                let (row, col) = match keep {
                    Photon::Signal => (
                        BasisConvention::pair_index(a, k),
                        BasisConvention::pair_index(b, k),
                    ),
                    Photon::Idler => (
                        BasisConvention::pair_index(k, a),
                        BasisConvention::pair_index(k, b),
                    ),
                };
                acc += state.rho[(row, col)];
            }
            out[(a, b)] = acc;
        }
    }
    Operator { mat: out }
}

/// Reduces a 4×4 single-photon operator to one of its qubits.
pub fn reduce_photon(rho: &Operator, keep: Dof) -> Result<Operator, HilbertError> {
    check_dim(rho, PHOTON_DIM)?;
    let mut out = DMatrix::<C64>::zeros(2, 2);
    for a in 0..2 {
        for b in 0..2 {
            for k in 0..2 {
                let (row, col) = match keep {
                    Dof::Momentum => (
                        BasisConvention::photon_index(a, k),
                        BasisConvention::photon_index(b, k),
                    ),
                    Dof::Polarization => (
                        BasisConvention::photon_index(k, a),
                        BasisConvention::photon_index(k, b),
                    ),
                };
                out[(a, b)] += rho.mat[(row, col)];
            }
        }
    }
    Ok(Operator { mat: out })
}

/// Two-qubit state of one degree of freedom across both photons, ordered
/// signal ⊗ idler. The other degree of freedom of each photon is traced out.
pub fn reduce_to_dof(state: &PairState, keep: Dof) -> Operator {
    let compose = |s: usize, i: usize, ts: usize, ti: usize| {
        let (sp, ip) = match keep {
            Dof::Momentum => (
                BasisConvention::photon_index(s, ts),
                BasisConvention::photon_index(i, ti),
            ),
            Dof::Polarization => (
                BasisConvention::photon_index(ts, s),
                BasisConvention::photon_index(ti, i),
            ),
        };
        BasisConvention::pair_index(sp, ip)
    };
    let mut out = DMatrix::<C64>::zeros(4, 4);
    for a in 0..4 {
        for b in 0..4 {
            let (sa, ia) = (a / 2, a % 2);
            let (sb, ib) = (b / 2, b % 2);
            let mut acc = c(0.0);
            for ts in 0..2 {
                for ti in 0..2 {
                    acc += state.rho[(compose(sa, ia, ts, ti), compose(sb, ib, ts, ti))];
                }
            }
            out[(a, b)] = acc;
        }
    }
    Operator { mat: out }
}

/// `⟨ψ|ρ|ψ⟩`, clamped to `[0, 1]` against roundoff.
pub fn state_fidelity(rho: &PairState, psi: &PairKet) -> f64 {
    let v = psi.amp.dotc(&(&rho.rho * &psi.amp)).re;
    v.clamp(0.0, 1.0)
}

/// Hermitian square root of a positive semidefinite matrix.
fn psd_sqrt(m: &DMatrix<C64>) -> DMatrix<C64> {
    let eig = SymmetricEigen::new(m.clone());
    let vals = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| c(x.max(0.0).sqrt())));
    &eig.eigenvectors * vals * eig.eigenvectors.adjoint()
}

/// Wootters concurrence of a two-qubit density matrix.
pub fn concurrence(rho: &Operator) -> Result<f64, HilbertError> {
    check_dim(rho, 4)?;
    let yy = {
        let y = DMatrix::from_row_slice(2, 2, &[c(0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), c(0.0)]);
        y.kronecker(&y)
    };
    let flipped = &yy * rho.mat.conjugate() * &yy;
    let root = psd_sqrt(&rho.mat);
    let r = &root * flipped * &root;
    let mut lambdas: Vec<f64> = sorted_eigenvalues(&r)
        .into_iter()
        .map(|x| x.max(0.0).sqrt())
        .collect();
    lambdas.reverse();
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(m: &DMatrix<C64>) -> f64 {
    sorted_eigenvalues(m)
        .into_iter()
        .filter(|&x| x > 1e-14)
        .map(|x| -x * x.log2())
        .sum()
}

/// Mutual information (bits) between the momentum qubits and the
/// polarization qubits of the pair.
pub fn momentum_polarization_mutual_information(state: &PairState) -> f64 {
    let m = reduce_to_dof(state, Dof::Momentum);
    let p = reduce_to_dof(state, Dof::Polarization);
    von_neumann_entropy(&m.mat) + von_neumann_entropy(&p.mat) - von_neumann_entropy(&state.rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pauli_x() -> Operator {
        Operator::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn identity_tensor_identity() {
        let i4 = tensor(&Operator::identity(2), &Operator::identity(2)).unwrap();
        assert_eq!(i4, Operator::identity(4));
    }

    #[test]
    fn t_tensor_h_is_first_basis_vector() {
        let s = PhotonState::product(Momentum::T.ket(), Polarization::H.ket()).unwrap();
        assert_eq!(s, PhotonState::basis(Momentum::T, Polarization::H));
        assert_eq!(s.amplitude(0), c(1.0));
        assert_eq!(s.amplitudes().iter().filter(|a| a.norm() > 0.0).count(), 1);
    }

    #[test]
    fn tensor_overflow_rejected() {
        let a = Operator::identity(4);
        let b = Operator::identity(16);
        assert_eq!(tensor(&a, &b), Err(HilbertError::DimensionOverflow(64)));
    }

    #[test]
    fn operator_rejects_odd_dimensions() {
        assert!(Operator::new(DMatrix::identity(3, 3)).is_err());
        assert!(Operator::new(DMatrix::zeros(4, 2)).is_err());
    }

    #[test]
    fn apply_identity_is_noop() {
        let psi = PhotonState::basis(Momentum::T, Polarization::H)
            .tensor(&PhotonState::basis(Momentum::B, Polarization::V));
        let rho = psi.density();
        for photon in [Photon::Signal, Photon::Idler] {
            let out = apply_to_photon(&rho, photon, &Operator::identity(4)).unwrap();
            assert_eq!(out, rho);
        }
    }

    #[test]
    fn apply_rejects_wrong_dimension_and_non_unitary() {
        let rho = PairState::maximally_mixed();
        assert!(matches!(
            apply_to_photon(&rho, Photon::Signal, &Operator::identity(2)),
            Err(HilbertError::WrongDimension { .. })
        ));
        let scaled = Operator::new(DMatrix::identity(4, 4).scale(2.0)).unwrap();
        assert!(matches!(
            apply_to_photon(&rho, Photon::Idler, &scaled),
            Err(HilbertError::NotUnitary(_))
        ));
    }

    #[test]
    fn kraus_must_be_complete() {
        let rho = PairState::maximally_mixed();
        let half = Operator::new(DMatrix::identity(4, 4).scale(0.5)).unwrap();
        assert!(matches!(
            apply_kraus_to_photon(&rho, Photon::Signal, &[half]),
            Err(HilbertError::NotTracePreserving(_))
        ));
        assert_eq!(
            apply_kraus_to_photon(&rho, Photon::Signal, &[]),
            Err(HilbertError::EmptyKraus)
        );
    }

    #[test]
    fn partial_trace_of_product_returns_factor() {
        let a = PhotonState::normalize([c(1.0), c(2.0), C64::new(0.0, 1.0), c(-0.5)]).unwrap();
        let b = PhotonState::basis(Momentum::B, Polarization::H);
        let rho = a.tensor(&b).density();
        let ra = partial_trace(&rho, Photon::Signal);
        assert!(ra.max_abs_diff(&a.density()) < ALGEBRA_TOL);
        let rb = partial_trace(&rho, Photon::Idler);
        assert!(rb.max_abs_diff(&b.density()) < ALGEBRA_TOL);
    }

    #[test]
    fn separable_basis_pair_has_pure_reduction() {
        let rho = PairKet::basis(0).density();
        let r = partial_trace(&rho, Photon::Signal);
        assert_abs_diff_eq!(r.purity(), 1.0, epsilon = ALGEBRA_TOL);
        assert_abs_diff_eq!(r.trace().re, 1.0, epsilon = ALGEBRA_TOL);
    }

    #[test]
    fn fidelity_edge_cases() {
        let psi = PairKet::normalize((0..16).map(|k| C64::new(k as f64, 1.0)).collect()).unwrap();
        assert_abs_diff_eq!(state_fidelity(&psi.density(), &psi), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            state_fidelity(&PairState::maximally_mixed(), &psi),
            1.0 / 16.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn unnormalized_ket_rejected() {
        let mut v = vec![c(0.0); 16];
        v[0] = c(2.0);
        assert!(matches!(PairKet::new(v), Err(HilbertError::NotNormalized(_))));
        assert!(matches!(
            PhotonState::new([c(1.0), c(1.0), c(0.0), c(0.0)]),
            Err(HilbertError::NotNormalized(_))
        ));
    }

    #[test]
    fn pair_state_validation() {
        let mut m = DMatrix::<C64>::identity(16, 16).unscale(16.0);
        assert!(PairState::new(m.clone()).is_ok());
        m[(0, 1)] = c(0.1);
        assert!(matches!(PairState::new(m.clone()), Err(HilbertError::NotHermitian(_))));
        let mut m = DMatrix::<C64>::zeros(16, 16);
        m[(0, 0)] = c(1.5);
        m[(1, 1)] = c(-0.5);
        assert!(matches!(PairState::new(m), Err(HilbertError::NotPositive(_))));
        assert!(matches!(
            PairState::new(DMatrix::identity(16, 16)),
            Err(HilbertError::BadTrace(_))
        ));
    }

    #[test]
    fn concurrence_of_bell_and_product() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = DVector::from_row_slice(&[c(h), c(0.0), c(0.0), c(h)]);
        let rho = Operator::new(&bell * bell.adjoint()).unwrap();
        assert_abs_diff_eq!(concurrence(&rho).unwrap(), 1.0, epsilon = 1e-9);
        let prod = Operator::new(DMatrix::identity(4, 4).unscale(4.0)).unwrap();
        assert_abs_diff_eq!(concurrence(&prod).unwrap(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn pauli_tensor_flips_both_polarizations() {
        // X on polarization of each photon: index (m,p) -> (m,1-p)
        let xp = tensor(&Operator::identity(2), &pauli_x()).unwrap();
        let both = tensor(&xp, &xp).unwrap();
        let e0 = BasisConvention::pair_index(0, 3);
        let e1 = BasisConvention::pair_index(1, 2);
        assert_eq!(both.get(e1, e0), c(1.0));
    }

    #[test]
    fn reduce_to_dof_of_product_basis() {
        // |T H> ⊗ |B V>: momentum (0,1), polarization (0,1)
        let rho = PairKet::basis(BasisConvention::pair_index(0, 3)).density();
        let m = reduce_to_dof(&rho, Dof::Momentum);
        assert_eq!(m.get(1, 1), c(1.0));
        let p = reduce_to_dof(&rho, Dof::Polarization);
        assert_eq!(p.get(1, 1), c(1.0));
        assert_abs_diff_eq!(momentum_polarization_mutual_information(&rho), 0.0, epsilon = 1e-9);
    }
}
