//! Quantum and classical Fisher information for unitary phase encoding
//! `rho_theta = exp(-iHθ) rho exp(iHθ)`.

use serde::Serialize;

use crate::error::{QfiError, Result};
use crate::numerics::{
    hermitian_eigen, hermitian_eigen_with, ComplexMatrix, EigenDecomposition, SweepOrder, C64, I,
    ZERO,
};
use crate::operators::{Basis, HamiltonianSpec, HermitianOperator};
use crate::states::{DensityMatrix, FullState, SymVector};

/// Pairs with `lambda_i + lambda_j` at or below this are dropped from the spectral sum.
pub const SPECTRAL_CUTOFF: f64 = 1e-12;
/// QFI values at or below this give infinite sensitivity.
pub const ZERO_QFI: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum QfiMethod {
    PureVariance,
    MixedSpectral,
    Sld,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QfiDiagnostics {
    /// Eigenvalues of the state above the cutoff.
    pub rank_used: usize,
    pub cutoff: f64,
    /// Negative variance clamped to zero.
    pub clamped: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QfiResult {
    pub value: f64,
    pub sensitivity: f64,
    pub method: QfiMethod,
    pub diagnostics: QfiDiagnostics,
}

impl QfiResult {
    fn new(value: f64, method: QfiMethod, rank_used: usize, clamped: bool) -> Self {
        Self {
            value,
            sensitivity: sensitivity(value),
            method,
            diagnostics: QfiDiagnostics {
                rank_used,
                cutoff: SPECTRAL_CUTOFF,
                clamped,
            },
        }
    }
}

/// Quantum Cramér–Rao bound `1/sqrt(F)`; infinite when `F` is numerically zero.
pub fn sensitivity(f_q: f64) -> f64 {
    if f_q <= ZERO_QFI {
        f64::INFINITY
    } else {
        1.0 / f_q.sqrt()
    }
}

/// A pure state together with the basis it lives in.
pub trait PureState {
    fn n_qubits(&self) -> usize;
    fn basis(&self) -> Basis;
    fn amplitudes(&self) -> &[C64];
}

impl PureState for SymVector {
    fn n_qubits(&self) -> usize {
        SymVector::n_qubits(self)
    }
    fn basis(&self) -> Basis {
        Basis::Symmetric
    }
    fn amplitudes(&self) -> &[C64] {
        SymVector::amplitudes(self)
    }
}

impl PureState for FullState {
    fn n_qubits(&self) -> usize {
        FullState::n_qubits(self)
    }
    fn basis(&self) -> Basis {
        Basis::Full
    }
    fn amplitudes(&self) -> &[C64] {
        FullState::amplitudes(self)
    }
}

fn variance_qfi(psi: &[C64], h_psi: &[C64]) -> QfiResult {
    let mean: f64 = psi.iter().zip(h_psi).map(|(a, b)| (a.conj() * b).re).sum();
    let second: f64 = h_psi.iter().map(|a| a.norm_sqr()).sum();
    let raw = 4.0 * (second - mean * mean);
    let scale = 4.0 * second.max(1.0);
    let clamped = raw < 0.0;
    if raw < -1e-10 * scale {
        // Only rounding can make the variance negative; anything larger is a bug upstream.
        debug_assert!(false, "negative variance {raw}");
    }
    QfiResult::new(raw.max(0.0), QfiMethod::PureVariance, 1, clamped)
}

/// `4 Var(H)` for a pure state.
pub fn qfi_pure<S: PureState>(state: &S, h: &HermitianOperator) -> Result<QfiResult> {
    if state.basis() != h.basis() || state.n_qubits() != h.n_qubits() {
        return Err(QfiError::DimensionMismatch(format!(
            "{}-qubit {:?} state vs {}-qubit {:?} operator",
            state.n_qubits(),
            state.basis(),
            h.n_qubits(),
            h.basis()
        )));
    }
    let h_psi = h.apply(state.amplitudes())?;
    Ok(variance_qfi(state.amplitudes(), &h_psi))
}

/// `4 Var(H)` in the symmetric basis without materialising `H`.
pub fn qfi_pure_symmetric(state: &SymVector, spec: &HamiltonianSpec) -> Result<QfiResult> {
    if state.n_qubits() != spec.n_qubits {
        return Err(QfiError::DimensionMismatch(format!(
            "{}-qubit state vs {}-qubit generator",
            state.n_qubits(),
            spec.n_qubits
        )));
    }
    spec.validate()?;
    let h_psi = spec.apply_symmetric(state.amplitudes());
    Ok(variance_qfi(state.amplitudes(), &h_psi))
}

fn check_mixed(rho: &DensityMatrix, h: &HermitianOperator) -> Result<()> {
    if h.basis() != Basis::Full || h.n_qubits() != rho.n_qubits() {
        return Err(QfiError::DimensionMismatch(format!(
            "{}-qubit density matrix needs a full-basis operator, got {}-qubit {:?}",
            rho.n_qubits(),
            h.n_qubits(),
            h.basis()
        )));
    }
    Ok(())
}

/// `2 sum_{ij} (l_i - l_j)^2 / (l_i + l_j) |<i|H|j>|^2` given the spectral data of `rho`.
pub fn qfi_from_spectrum(eig: &EigenDecomposition, h: &ComplexMatrix) -> Result<QfiResult> {
    let hm = eig.to_eigenbasis(h)?;
    let lambda: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let d = lambda.len();
    let mut total = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            let s = lambda[i] + lambda[j];
            if s <= SPECTRAL_CUTOFF {
                continue;
            }
            let diff = lambda[i] - lambda[j];
            // Each unordered pair appears twice in the full sum.
            total += 4.0 * diff * diff / s * hm[(i, j)].norm_sqr();
        }
    }
    let rank = lambda.iter().filter(|&&l| l > SPECTRAL_CUTOFF).count();
    Ok(QfiResult::new(total, QfiMethod::MixedSpectral, rank, false))
}

pub fn qfi_mixed(rho: &DensityMatrix, h: &HermitianOperator) -> Result<QfiResult> {
    qfi_mixed_with(rho, h, SweepOrder::RowCyclic)
}

pub fn qfi_mixed_with(
    rho: &DensityMatrix,
    h: &HermitianOperator,
    order: SweepOrder,
) -> Result<QfiResult> {
    check_mixed(rho, h)?;
    let eig = hermitian_eigen_with(rho.matrix(), order)?;
    qfi_from_spectrum(&eig, h.matrix())
}

/// `d rho_theta / d theta = -i [H, rho_theta]`.
pub fn rho_derivative(rho: &ComplexMatrix, h: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(h.commutator(rho)?.scale(-I))
}

/// `exp(-iHθ) rho exp(iHθ)`.
pub fn encode(rho: &DensityMatrix, h: &HermitianOperator, theta: f64) -> Result<DensityMatrix> {
    check_mixed(rho, h)?;
    let u = h
        .eigen()?
        .reconstruct_with(|l| C64::from_polar(1.0, -l * theta));
    let out = u.matmul(rho.matrix())?.matmul(&u.dagger())?;
    DensityMatrix::new(rho.n_qubits(), out.symmetrized())
}

/// Symmetric logarithmic derivative of the encoded family at `rho_theta`.
pub fn sld_operator(rho_theta: &DensityMatrix, h: &HermitianOperator) -> Result<HermitianOperator> {
    check_mixed(rho_theta, h)?;
    let eig = hermitian_eigen(rho_theta.matrix())?;
    let hm = eig.to_eigenbasis(h.matrix())?;
    let lambda: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let d = lambda.len();
    let mut l_eig = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let s = lambda[i] + lambda[j];
            if s <= SPECTRAL_CUTOFF {
                continue;
            }
            // (d rho)_ij = -i (lambda_j - lambda_i) H_ij in the eigenbasis.
            let drho = -I * (lambda[j] - lambda[i]) * hm[(i, j)];
            l_eig[(i, j)] = drho * (2.0 / s);
        }
    }
    let l = eig.from_eigenbasis(&l_eig)?.symmetrized();
    HermitianOperator::new(l, Basis::Full, rho_theta.n_qubits())
}

/// `Tr(rho L^2)`.
pub fn qfi_via_sld(rho_theta: &DensityMatrix, h: &HermitianOperator) -> Result<QfiResult> {
    let l = sld_operator(rho_theta, h)?;
    let l2 = l.matrix().matmul(l.matrix())?;
    let value = rho_theta.matrix().matmul(&l2)?.trace().re;
    let rank = hermitian_eigen(rho_theta.matrix())?
        .eigenvalues
        .iter()
        .filter(|&&x| x > SPECTRAL_CUTOFF)
        .count();
    Ok(QfiResult::new(
        value.max(0.0),
        QfiMethod::Sld,
        rank,
        value < 0.0,
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PovmElement {
    matrix: ComplexMatrix,
}

impl PovmElement {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(QfiError::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > 1e-10 {
            return Err(QfiError::NotHermitian { deviation });
        }
        Ok(Self { matrix })
    }

    /// `|v><v|`.
    pub fn projector(v: &[C64]) -> Self {
        Self {
            matrix: ComplexMatrix::outer(v, v),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

pub fn check_povm_complete(povm: &[PovmElement], dim: usize) -> Result<()> {
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for e in povm {
        sum = sum.add(e.matrix())?;
    }
    let deviation = sum.max_abs_diff(&ComplexMatrix::identity(dim));
    if deviation > 1e-10 {
        return Err(QfiError::IncompletePovm { deviation });
    }
    Ok(())
}

/// `Tr(A B)` without forming the product.
fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let d = a.rows();
    let mut acc = ZERO;
    for i in 0..d {
        for k in 0..d {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// `sum_x (dp_x)^2 / p_x` for outcome probabilities `p_x = Tr(E_x rho_theta)`.
pub fn classical_fi(
    rho: &DensityMatrix,
    h: &HermitianOperator,
    povm: &[PovmElement],
    theta: f64,
) -> Result<f64> {
    check_mixed(rho, h)?;
    if povm.iter().any(|e| e.matrix().rows() != rho.dim()) {
        return Err(QfiError::DimensionMismatch(
            "POVM element dimension differs from the state".into(),
        ));
    }
    check_povm_complete(povm, rho.dim())?;
    let rho_theta = encode(rho, h, theta)?;
    let drho = rho_derivative(rho_theta.matrix(), h.matrix())?;
    let mut fi = 0.0;
    for e in povm {
        let p = trace_product(e.matrix(), rho_theta.matrix()).re;
        if p <= 1e-12 {
            continue;
        }
        let dp = trace_product(e.matrix(), &drho).re;
        fi += dp * dp / p;
    }
    Ok(fi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{apply_global_depolarizing, apply_noise, NoiseKind, NoiseSpec};
    use crate::operators::{build_hamiltonian, j_along, Direction, HamiltonianKind};
    use crate::states::{
        build_dicke, build_probe, density_from_pure, embed_full, ProbeKind, ProbeSpec,
    };

    fn ghz(n: usize) -> SymVector {
        build_probe(&ProbeSpec::new(ProbeKind::Ghz, n)).unwrap()
    }

    #[test]
    fn ghz_heisenberg() {
        let jz = j_along(8, Direction::Z, Basis::Symmetric).unwrap();
        let r = qfi_pure(&ghz(8), &jz).unwrap();
        assert!((r.value - 64.0).abs() < 1e-12);
        assert!((r.sensitivity - 0.125).abs() < 1e-15);
    }

    #[test]
    fn eigenstate_has_zero_qfi() {
        let jz = j_along(5, Direction::Z, Basis::Symmetric).unwrap();
        let r = qfi_pure(&build_dicke(5, 2).unwrap(), &jz).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.sensitivity.is_infinite());
    }

    #[test]
    fn two_point_distribution() {
        // Branch eigenvalues 11 and -1 -> 4 * ((11 + 1)/2)^2.
        let psi = build_probe(&ProbeSpec::new(ProbeKind::DickeSuperposition(0, 4), 8)).unwrap();
        let h = build_hamiltonian(&HamiltonianSpec::two_body(4, 8)).unwrap();
        assert!((qfi_pure(&psi, &h).unwrap().value - 144.0).abs() < 1e-10);
        let fast = qfi_pure_symmetric(&psi, &HamiltonianSpec::two_body(4, 8)).unwrap();
        assert!((fast.value - 144.0).abs() < 1e-10);
    }

    #[test]
    fn basis_mismatch() {
        let jz = j_along(3, Direction::Z, Basis::Full).unwrap();
        assert!(qfi_pure(&ghz(3), &jz).is_err());
        let jz4 = j_along(4, Direction::Z, Basis::Symmetric).unwrap();
        assert!(qfi_pure(&ghz(3), &jz4).is_err());
    }

    #[test]
    fn mixed_reduces_to_pure() {
        let rho = density_from_pure(&embed_full(&ghz(4)).unwrap()).unwrap();
        let jz = j_along(4, Direction::Z, Basis::Full).unwrap();
        let r = qfi_mixed(&rho, &jz).unwrap();
        assert!((r.value - 16.0).abs() < 1e-8);
        assert_eq!(r.diagnostics.rank_used, 1);
    }

    #[test]
    fn maximally_mixed_is_useless() {
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        let h =
            build_hamiltonian(&HamiltonianSpec::two_body(2, 3).with_basis(Basis::Full)).unwrap();
        assert_eq!(qfi_mixed(&rho, &h).unwrap().value, 0.0);
    }

    #[test]
    fn sensitivity_values() {
        assert_eq!(sensitivity(64.0), 0.125);
        assert_eq!(sensitivity(400.0), 0.05);
        assert!((sensitivity(105.54) - 0.0973).abs() < 5e-5);
        assert!(sensitivity(0.0).is_infinite());
        assert!(sensitivity(1e-13).is_infinite());
    }

    #[test]
    fn sld_pure_consistency() {
        let psi = build_probe(&ProbeSpec::new(ProbeKind::DickeSuperposition(1, 3), 3)).unwrap();
        let full = embed_full(&psi).unwrap();
        let rho = density_from_pure(&full).unwrap();
        let h = j_along(3, Direction::new(0.9, 0.3), Basis::Full).unwrap();
        let pure = qfi_pure(&full, &h).unwrap().value;
        let sld = qfi_via_sld(&rho, &h).unwrap().value;
        assert!((pure - sld).abs() < 1e-8, "{pure} vs {sld}");
    }

    #[test]
    fn stationary_family_has_zero_sld() {
        let rho =
            DensityMatrix::new(2, ComplexMatrix::from_diagonal(&[0.4, 0.3, 0.2, 0.1])).unwrap();
        let jz = j_along(2, Direction::Z, Basis::Full).unwrap();
        let l = sld_operator(&rho, &jz).unwrap();
        assert!(l.matrix().max_abs() < 1e-15);
    }

    #[test]
    fn noisy_ghz_sld_cross_check() {
        let rho = density_from_pure(&embed_full(&ghz(2)).unwrap()).unwrap();
        let noisy = apply_global_depolarizing(&rho, 0.3).unwrap();
        let jz = j_along(2, Direction::Z, Basis::Full).unwrap();
        let a = qfi_mixed(&noisy, &jz).unwrap().value;
        let b = qfi_via_sld(&noisy, &jz).unwrap().value;
        assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn single_outcome_povm() {
        let rho = density_from_pure(&embed_full(&ghz(2)).unwrap()).unwrap();
        let jz = j_along(2, Direction::Z, Basis::Full).unwrap();
        let povm = vec![PovmElement::new(ComplexMatrix::identity(4)).unwrap()];
        assert_eq!(classical_fi(&rho, &jz, &povm, 0.3).unwrap(), 0.0);
        let bad = vec![PovmElement::new(ComplexMatrix::identity(4).scale_real(0.5)).unwrap()];
        assert!(matches!(
            classical_fi(&rho, &jz, &bad, 0.0),
            Err(QfiError::IncompletePovm { .. })
        ));
    }

    #[test]
    fn sld_eigenbasis_measurement_is_optimal() {
        let psi = build_probe(&ProbeSpec::new(ProbeKind::DickeSuperposition(0, 2), 3)).unwrap();
        let rho = density_from_pure(&embed_full(&psi).unwrap()).unwrap();
        let noisy = apply_noise(
            &rho,
            &NoiseSpec::new(NoiseKind::GlobalDepolarizing, 0.2).unwrap(),
        )
        .unwrap();
        let h = build_hamiltonian(
            &HamiltonianSpec::new(HamiltonianKind::TwoBody(2), 3)
                .with_axis(Direction::new(0.7, 0.2))
                .with_basis(Basis::Full),
        )
        .unwrap();
        let theta = 0.4;
        let rho_theta = encode(&noisy, &h, theta).unwrap();
        let l = sld_operator(&rho_theta, &h).unwrap();
        let povm: Vec<PovmElement> = (0..8)
            .map(|i| PovmElement::projector(&l.eigen().unwrap().eigenvector(i)))
            .collect();
        let cfi = classical_fi(&noisy, &h, &povm, theta).unwrap();
        let qfi = qfi_mixed(&noisy, &h).unwrap().value;
        assert!((cfi - qfi).abs() < 1e-6, "{cfi} vs {qfi}");
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let psi = build_probe(&ProbeSpec::new(ProbeKind::DickeSuperposition(1, 3), 3)).unwrap();
        let rho = density_from_pure(&embed_full(&psi).unwrap()).unwrap();
        let rho = apply_global_depolarizing(&rho, 0.25).unwrap();
        let h = j_along(3, Direction::new(1.0, 0.5), Basis::Full).unwrap();
        let theta = 0.3;
        let step = 1e-5;
        let plus = encode(&rho, &h, theta + step).unwrap();
        let minus = encode(&rho, &h, theta - step).unwrap();
        let fd = plus
            .matrix()
            .sub(minus.matrix())
            .unwrap()
            .scale_real(0.5 / step);
        let analytic =
            rho_derivative(encode(&rho, &h, theta).unwrap().matrix(), h.matrix()).unwrap();
        let rel = fd.sub(&analytic).unwrap().frobenius_norm() / analytic.frobenius_norm();
        assert!(rel < 1e-4, "relative error {rel}");
    }
}
