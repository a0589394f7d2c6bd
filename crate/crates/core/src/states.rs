//! Probe states in the symmetric Dicke basis and the full computational basis.

use serde::{Deserialize, Serialize};

use crate::capacity::{self, binomial};
use crate::error::{QfiError, Result};
use crate::numerics::{hermitian_eigen, inner, norm, ComplexMatrix, C64, ZERO};
use crate::operators::{
    build_hamiltonian, closed_form_extrema, collective_spin, extremal_eigenpair, Basis, Direction,
    ExtremalState, HamiltonianKind, HamiltonianSpec, SpinComponent,
};

const NORM_TOLERANCE: f64 = 1e-12;

/// Pure state in the `(N+1)`-dimensional symmetric subspace; index `l` is `|D_{N-l,l}>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymVector {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl SymVector {
    pub fn new(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        capacity::check_symmetric(n_qubits)?;
        if amplitudes.len() != n_qubits + 1 {
            return Err(QfiError::DimensionMismatch(format!(
                "{} amplitudes for {n_qubits} qubits",
                amplitudes.len()
            )));
        }
        let nrm = norm(&amplitudes);
        if (nrm * nrm - 1.0).abs() > NORM_TOLERANCE {
            return Err(QfiError::InvalidArgument(format!(
                "state norm^2 {} is not 1",
                nrm * nrm
            )));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Scales to unit norm before validating.
    pub fn normalized(n_qubits: usize, mut amplitudes: Vec<C64>) -> Result<Self> {
        let nrm = norm(&amplitudes);
        if !(nrm > 0.0) || !nrm.is_finite() {
            return Err(QfiError::InvalidArgument(
                "cannot normalise a zero vector".into(),
            ));
        }
        amplitudes.iter_mut().for_each(|a| *a /= nrm);
        Self::new(n_qubits, amplitudes)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn inner(&self, other: &SymVector) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// Rotates the global phase so the first nonzero amplitude is real and positive.
    pub fn canonical_phase(mut self) -> Self {
        canonicalize(&mut self.amplitudes);
        self
    }
}

fn canonicalize(amps: &mut [C64]) {
    if let Some(first) = amps.iter().find(|a| a.norm() > 1e-14) {
        let phase = first.conj() / first.norm();
        amps.iter_mut().for_each(|a| *a *= phase);
    }
}

/// `J_z` eigenvalue of `|D_{N-l,l}>`.
pub fn excitation_to_m(n_qubits: usize, l: usize) -> f64 {
    n_qubits as f64 / 2.0 - l as f64
}

/// Pure state over `2^N` amplitudes; bit `q` of the index is qubit `q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FullState {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl FullState {
    pub fn new(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        capacity::check_full(n_qubits)?;
        if amplitudes.len() != 1 << n_qubits {
            return Err(QfiError::DimensionMismatch(format!(
                "{} amplitudes for {n_qubits} qubits",
                amplitudes.len()
            )));
        }
        let nrm = norm(&amplitudes);
        if (nrm * nrm - 1.0).abs() > NORM_TOLERANCE {
            return Err(QfiError::InvalidArgument(format!(
                "state norm^2 {} is not 1",
                nrm * nrm
            )));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Product state with qubit `q` in `cos(θ_q/2)|0> + e^{iφ_q} sin(θ_q/2)|1>`.
    pub fn product(angles: &[(f64, f64)]) -> Result<Self> {
        let n = angles.len();
        capacity::check_full(n)?;
        let singles: Vec<[C64; 2]> = angles
            .iter()
            .map(|&(theta, phi)| {
                [
                    C64::new((theta / 2.0).cos(), 0.0),
                    C64::from_polar((theta / 2.0).sin(), phi),
                ]
            })
            .collect();
        let amps = (0..1usize << n)
            .map(|idx| {
                singles
                    .iter()
                    .enumerate()
                    .map(|(q, s)| s[(idx >> q) & 1])
                    .product()
            })
            .collect();
        Self::new(n, amps)
    }
}

/// Unit-trace Hermitian PSD matrix over the full computational basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Checks hermiticity and trace; positivity is checked by [`DensityMatrix::validate_spectrum`].
    pub fn new(n_qubits: usize, matrix: ComplexMatrix) -> Result<Self> {
        capacity::check_full(n_qubits)?;
        let dim = 1usize << n_qubits;
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(QfiError::DimensionMismatch(format!(
                "{}x{} density matrix for {n_qubits} qubits",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > 1e-10 {
            return Err(QfiError::NotHermitian { deviation });
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(QfiError::InvalidArgument(format!("trace {tr} is not 1")));
        }
        Ok(Self { n_qubits, matrix })
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        capacity::check_full(n_qubits)?;
        let dim = 1usize << n_qubits;
        Self::new(
            n_qubits,
            ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        )
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.as_slice().iter().map(|a| a.norm_sqr()).sum()
    }

    /// Fails if any eigenvalue is below `-1e-10`.
    pub fn validate_spectrum(&self) -> Result<()> {
        let eig = hermitian_eigen(&self.matrix)?;
        let min = eig.eigenvalues[0];
        if min < -1e-10 {
            return Err(QfiError::InvalidArgument(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }
}

/// Probe families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ProbeKind {
    Dicke(usize),
    DickeSuperposition(usize, usize),
    Ghz,
    /// Shorthand for `DickeSuperposition(1, N-1)`.
    WWbar,
    /// `|D_{N/2,N/2}>`, even `N` only.
    BalancedDicke,
    OptimalFor(HamiltonianSpec),
    SpinCoherent {
        polar: f64,
        azimuth: f64,
    },
    Custom(SymVector),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeSpec {
    pub kind: ProbeKind,
    pub n_qubits: usize,
}

impl ProbeSpec {
    pub fn new(kind: ProbeKind, n_qubits: usize) -> Self {
        Self { kind, n_qubits }
    }

    pub fn label(&self) -> String {
        let n = self.n_qubits;
        match &self.kind {
            ProbeKind::Dicke(l) => format!("D_{{{},{}}}", n - l, l),
            ProbeKind::DickeSuperposition(a, b) => format!("D^({n})_{{{a},{b}}}"),
            ProbeKind::Ghz => "GHZ".into(),
            ProbeKind::WWbar => "WWbar".into(),
            ProbeKind::BalancedDicke => "balanced".into(),
            ProbeKind::OptimalFor(h) => format!("opt[{}]", h.label()),
            ProbeKind::SpinCoherent { polar, azimuth } => format!("css({polar},{azimuth})"),
            ProbeKind::Custom(_) => "custom".into(),
        }
    }
}

/// Result of [`build_probe_detailed`]; degeneracy flags are only set by the
/// generic eigenvector fallback used for `Power(k)` generators.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeBuild {
    pub state: SymVector,
    pub degenerate_max: bool,
    pub degenerate_min: bool,
}

pub fn build_dicke(n_qubits: usize, excitations: usize) -> Result<SymVector> {
    if excitations > n_qubits {
        return Err(QfiError::InvalidArgument(format!(
            "{excitations} excitations for {n_qubits} qubits"
        )));
    }
    let mut amps = vec![ZERO; n_qubits + 1];
    amps[excitations] = C64::new(1.0, 0.0);
    SymVector::new(n_qubits, amps)
}

pub fn build_probe(spec: &ProbeSpec) -> Result<SymVector> {
    build_probe_detailed(spec).map(|b| b.state)
}

pub fn build_probe_detailed(spec: &ProbeSpec) -> Result<ProbeBuild> {
    let n = spec.n_qubits;
    if n == 0 {
        return Err(QfiError::InvalidArgument("need at least one qubit".into()));
    }
    capacity::check_symmetric(n)?;
    let plain = |state: SymVector| ProbeBuild {
        state,
        degenerate_max: false,
        degenerate_min: false,
    };
    let pair = |a: usize, b: usize| -> Result<SymVector> {
        if a > n || b > n {
            return Err(QfiError::InvalidArgument(format!(
                "Dicke pair ({a},{b}) out of range for N={n}"
            )));
        }
        if a == b {
            return Err(QfiError::InvalidArgument(format!(
                "superposition needs distinct excitations, got ({a},{b})"
            )));
        }
        SymVector::new(n, ExtremalState::DickePair(a, b).amplitudes(n))
    };
    match &spec.kind {
        ProbeKind::Dicke(l) => build_dicke(n, *l).map(plain),
        ProbeKind::DickeSuperposition(a, b) => pair(*a, *b).map(plain),
        ProbeKind::Ghz => pair(0, n).map(plain),
        ProbeKind::WWbar => {
            if n < 3 {
                return Err(QfiError::InvalidArgument("WWbar needs N >= 3".into()));
            }
            pair(1, n - 1).map(plain)
        }
        ProbeKind::BalancedDicke => {
            if n % 2 != 0 {
                return Err(QfiError::InvalidArgument(format!(
                    "balanced Dicke state needs even N, got {n}"
                )));
            }
            build_dicke(n, n / 2).map(plain)
        }
        ProbeKind::SpinCoherent { polar, azimuth } => {
            Ok(plain(spin_coherent(n, *polar, *azimuth)?))
        }
        ProbeKind::Custom(v) => {
            if v.n_qubits() != n {
                return Err(QfiError::DimensionMismatch(format!(
                    "custom state has {} qubits, spec says {n}",
                    v.n_qubits()
                )));
            }
            Ok(plain(v.clone().canonical_phase()))
        }
        ProbeKind::OptimalFor(h) => optimal_probe(h, n),
    }
}

/// `(|phi_max> + |phi_min>)/sqrt(2)` for the generator, in its own axis frame.
fn optimal_probe(h: &HamiltonianSpec, n: usize) -> Result<ProbeBuild> {
    if h.n_qubits != n {
        return Err(QfiError::DimensionMismatch(format!(
            "Hamiltonian is for {} qubits, probe for {n}",
            h.n_qubits
        )));
    }
    h.validate()?;
    let hz = HamiltonianSpec {
        axis: Direction::Z,
        basis: Basis::Symmetric,
        ..*h
    };
    let build = match h.kind {
        HamiltonianKind::Linear => ProbeBuild {
            state: SymVector::new(n, ExtremalState::Ghz.amplitudes(n))?,
            degenerate_max: false,
            degenerate_min: false,
        },
        HamiltonianKind::TwoBody(r) if n >= 2 && h.mu == 1.0 && h.eta == 1.0 => {
            let cf = closed_form_extrema(r, n)?;
            let amps: Vec<C64> = cf
                .phi_max
                .amplitudes(n)
                .iter()
                .zip(cf.phi_min.amplitudes(n))
                .map(|(a, b)| (a + b) * std::f64::consts::FRAC_1_SQRT_2)
                .collect();
            ProbeBuild {
                state: SymVector::normalized(n, amps)?,
                degenerate_max: false,
                degenerate_min: false,
            }
        }
        _ => {
            let op = build_hamiltonian(&hz)?;
            let ext = extremal_eigenpair(&op)?;
            let mut max = ext.phi_max.clone();
            let mut min = ext.phi_min.clone();
            canonicalize(&mut max);
            canonicalize(&mut min);
            let amps = max
                .iter()
                .zip(&min)
                .map(|(a, b)| (a + b) * std::f64::consts::FRAC_1_SQRT_2)
                .collect();
            ProbeBuild {
                state: SymVector::normalized(n, amps)?,
                degenerate_max: ext.max_degenerate(),
                degenerate_min: ext.min_degenerate(),
            }
        }
    };
    let state = if h.axis == Direction::Z {
        build.state
    } else {
        rotate_sym(&build.state, h.axis)?
    };
    Ok(ProbeBuild {
        state: state.canonical_phase(),
        ..build
    })
}

/// Identical single-qubit states `cos(θ/2)|0> + e^{iφ} sin(θ/2)|1>` on every qubit.
pub fn spin_coherent(n_qubits: usize, polar: f64, azimuth: f64) -> Result<SymVector> {
    let (s, c) = (polar / 2.0).sin_cos();
    let amps = (0..=n_qubits)
        .map(|l| {
            let mag =
                binomial(n_qubits, l).sqrt() * c.powi((n_qubits - l) as i32) * s.powi(l as i32);
            C64::from_polar(mag, azimuth * l as f64)
        })
        .collect();
    SymVector::normalized(n_qubits, amps).map(SymVector::canonical_phase)
}

pub fn embed_full(state: &SymVector) -> Result<FullState> {
    let n = state.n_qubits();
    capacity::check_full(n)?;
    let scale: Vec<f64> = (0..=n).map(|l| 1.0 / binomial(n, l).sqrt()).collect();
    let amps = (0..1usize << n)
        .map(|idx| {
            let l = idx.count_ones() as usize;
            state.amplitudes()[l] * scale[l]
        })
        .collect();
    FullState::new(n, amps)
}

/// `exp(-iφ J_z) exp(-iθ J_y)`: carries the quantization axis from `+z` to `axis`.
pub fn rotation_matrix(n_qubits: usize, axis: Direction) -> Result<ComplexMatrix> {
    let jy = collective_spin(n_qubits, SpinComponent::Y, Basis::Symmetric)?;
    let ry = jy
        .eigen()?
        .reconstruct_with(|l| C64::from_polar(1.0, -axis.polar * l));
    let rz = ComplexMatrix::from_fn(n_qubits + 1, n_qubits + 1, |i, j| {
        if i == j {
            C64::from_polar(1.0, -axis.azimuth * (n_qubits as f64 / 2.0 - i as f64))
        } else {
            ZERO
        }
    });
    rz.matmul(&ry)
}

pub fn rotate_sym(state: &SymVector, axis: Direction) -> Result<SymVector> {
    let u = rotation_matrix(state.n_qubits(), axis)?;
    let amps = u.mul_vec(state.amplitudes())?;
    SymVector::normalized(state.n_qubits(), amps)
}

/// Inverse of [`rotate_sym`].
pub fn unrotate_sym(state: &SymVector, axis: Direction) -> Result<SymVector> {
    let u = rotation_matrix(state.n_qubits(), axis)?;
    let amps = u.dagger().mul_vec(state.amplitudes())?;
    SymVector::normalized(state.n_qubits(), amps)
}

pub fn density_from_pure(state: &FullState) -> Result<DensityMatrix> {
    let amps = state.amplitudes();
    DensityMatrix::new(state.n_qubits(), ComplexMatrix::outer(amps, amps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::j_along;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn re(v: &[C64]) -> Vec<f64> {
        v.iter().map(|a| a.re).collect()
    }

    fn assert_close(a: &[C64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - C64::new(*y, 0.0)).norm() < tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn dicke_ground_state() {
        let d = build_dicke(3, 0).unwrap();
        assert_eq!(re(d.amplitudes()), vec![1.0, 0.0, 0.0, 0.0]);
        assert!(build_dicke(3, 4).is_err());
    }

    #[test]
    fn two_qubit_symmetric_state() {
        let d = embed_full(&build_dicke(2, 1).unwrap()).unwrap();
        assert_close(
            d.amplitudes(),
            &[0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0],
            1e-15,
        );
    }

    #[test]
    fn four_qubit_half_filled() {
        // Oracle: enumerate the C(4,2) weight-2 bitstrings.
        let full = embed_full(&build_dicke(4, 2).unwrap()).unwrap();
        let weight_two: Vec<usize> = (0..16usize).filter(|i| i.count_ones() == 2).collect();
        assert_eq!(weight_two.len(), 6);
        for (idx, a) in full.amplitudes().iter().enumerate() {
            let expected = if weight_two.contains(&idx) {
                1.0 / 6f64.sqrt()
            } else {
                0.0
            };
            assert!((a - C64::new(expected, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn single_excitation_n4() {
        let full = embed_full(&build_dicke(4, 1).unwrap()).unwrap();
        for (idx, a) in full.amplitudes().iter().enumerate() {
            let expected = if idx.count_ones() == 1 { 0.5 } else { 0.0 };
            assert!((a.re - expected).abs() < 1e-15 && a.im == 0.0);
        }
    }

    #[test]
    fn ghz_probes() {
        let g = build_probe(&ProbeSpec::new(ProbeKind::Ghz, 3)).unwrap();
        assert_close(
            g.amplitudes(),
            &[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2],
            1e-15,
        );
        let full = embed_full(&build_probe(&ProbeSpec::new(ProbeKind::Ghz, 2)).unwrap()).unwrap();
        assert_close(
            full.amplitudes(),
            &[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2],
            1e-15,
        );
    }

    #[test]
    fn superposition_and_wwbar() {
        let s = build_probe(&ProbeSpec::new(ProbeKind::DickeSuperposition(3, 5), 8)).unwrap();
        let mut expected = vec![0.0; 9];
        expected[3] = FRAC_1_SQRT_2;
        expected[5] = FRAC_1_SQRT_2;
        assert_close(s.amplitudes(), &expected, 1e-15);

        for n in 3..12 {
            let w = build_probe(&ProbeSpec::new(ProbeKind::WWbar, n)).unwrap();
            let s =
                build_probe(&ProbeSpec::new(ProbeKind::DickeSuperposition(1, n - 1), n)).unwrap();
            assert_eq!(w, s);
        }
        assert!(build_probe(&ProbeSpec::new(ProbeKind::DickeSuperposition(2, 2), 4)).is_err());
        assert!(build_probe(&ProbeSpec::new(ProbeKind::DickeSuperposition(2, 5), 4)).is_err());
        assert!(build_probe(&ProbeSpec::new(ProbeKind::BalancedDicke, 5)).is_err());
    }

    #[test]
    fn optimal_probe_for_squared_generator() {
        let h = HamiltonianSpec::two_body(1, 8);
        let p = build_probe(&ProbeSpec::new(ProbeKind::OptimalFor(h), 8)).unwrap();
        let mut expected = vec![0.0; 9];
        expected[0] = 0.5;
        expected[4] = FRAC_1_SQRT_2;
        expected[8] = 0.5;
        assert_close(p.amplitudes(), &expected, 1e-15);
    }

    #[test]
    fn optimal_probe_fallback_flags_degeneracy() {
        let h = HamiltonianSpec::new(HamiltonianKind::Power(2), 8);
        let b = build_probe_detailed(&ProbeSpec::new(ProbeKind::OptimalFor(h), 8)).unwrap();
        assert!(b.degenerate_max);
        assert!(!b.degenerate_min);
    }

    #[test]
    fn rotation_properties() {
        let psi = build_probe(&ProbeSpec::new(ProbeKind::DickeSuperposition(1, 4), 5)).unwrap();
        let same = rotate_sym(&psi, Direction::Z).unwrap();
        assert!((same.inner(&psi).norm() - 1.0).abs() < 1e-14);

        // <J_n> in the rotated state equals the original <J_z>.
        let axis = Direction::new(1.2, 0.8);
        let rotated = rotate_sym(&psi, axis).unwrap();
        let jn = j_along(5, axis, Basis::Symmetric).unwrap();
        let jz = j_along(5, Direction::Z, Basis::Symmetric).unwrap();
        let a = jn.expectation(rotated.amplitudes()).unwrap();
        let b = jz.expectation(psi.amplitudes()).unwrap();
        assert!((a - b).abs() < 1e-12);

        let back = unrotate_sym(&rotated, axis).unwrap();
        for (x, y) in back.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((x - y).norm() < 1e-10);
        }

        let flipped = rotate_sym(&build_dicke(6, 0).unwrap(), Direction::new(PI, 0.0)).unwrap();
        assert!((flipped.amplitudes()[6].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn density_examples() {
        let zero = FullState::new(2, vec![C64::new(1.0, 0.0), ZERO, ZERO, ZERO]).unwrap();
        let rho = density_from_pure(&zero).unwrap();
        assert_eq!(rho.matrix()[(0, 0)], C64::new(1.0, 0.0));
        assert_eq!(
            rho.matrix()
                .as_slice()
                .iter()
                .filter(|a| **a != ZERO)
                .count(),
            1
        );

        let ghz = embed_full(&build_probe(&ProbeSpec::new(ProbeKind::Ghz, 2)).unwrap()).unwrap();
        let rho = density_from_pure(&ghz).unwrap();
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((rho.matrix()[(i, j)].re - 0.5).abs() < 1e-15);
        }
        assert!((rho.purity() - 1.0).abs() < 1e-14);
        rho.validate_spectrum().unwrap();
    }

    #[test]
    fn spin_coherent_matches_product_state() {
        let css = spin_coherent(4, 1.1, 0.4).unwrap();
        let full = embed_full(&css).unwrap();
        let prod = FullState::product(&[(1.1, 0.4); 4]).unwrap();
        let overlap = inner(full.amplitudes(), prod.amplitudes());
        assert!((overlap.norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn capacity_errors() {
        let big = build_dicke(13, 2).unwrap();
        assert!(matches!(embed_full(&big), Err(QfiError::Capacity { .. })));
    }

    #[test]
    fn json_round_trip() {
        let s = build_probe(&ProbeSpec::new(ProbeKind::Ghz, 2)).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("[0.707106781186547"), "{text}");
        let back: SymVector = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }
}
