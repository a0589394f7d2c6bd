//! Collective spin operators and the encoding generators built from them.
//!
//! Two representations are supported: the `(N+1)`-dimensional symmetric
//! (Dicke) subspace, indexed by excitation number `l` with `J_z = N/2 - l`,
//! and the full `2^N` computational basis where bit `q` of an index is the
//! state of qubit `q` (`1` meaning `|1>`).

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::capacity;
use crate::error::{QfiError, Result};
use crate::numerics::{hermitian_eigen, ComplexMatrix, EigenDecomposition, C64, I, ZERO};

/// Unit vector on the sphere in polar/azimuthal form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    /// θ in `[0, π]`.
    pub polar: f64,
    /// φ in `[0, 2π)`.
    pub azimuth: f64,
}

impl Direction {
    pub const Z: Direction = Direction {
        polar: 0.0,
        azimuth: 0.0,
    };
    pub const X: Direction = Direction {
        polar: std::f64::consts::FRAC_PI_2,
        azimuth: 0.0,
    };

    /// Wraps arbitrary angles into the principal ranges while keeping the same point.
    pub fn new(polar: f64, azimuth: f64) -> Self {
        use std::f64::consts::{PI, TAU};
        let mut theta = polar.rem_euclid(TAU);
        let mut phi = azimuth;
        if theta > PI {
            theta = TAU - theta;
            phi += PI;
        }
        phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Self {
            polar: theta,
            azimuth: phi,
        }
    }

    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(r > 0.0) || !r.is_finite() {
            return Err(QfiError::InvalidArgument(format!(
                "cannot normalise direction {v:?}"
            )));
        }
        let z = (v[2] / r).clamp(-1.0, 1.0);
        let phi = if v[0] == 0.0 && v[1] == 0.0 {
            0.0
        } else {
            v[1].atan2(v[0])
        };
        Ok(Self::new(z.acos(), phi))
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.polar.sin_cos();
        let (sp, cp) = self.azimuth.sin_cos();
        [st * cp, st * sp, ct]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Symmetric,
    Full,
}

impl Basis {
    pub fn dim(self, n_qubits: usize) -> usize {
        match self {
            Basis::Symmetric => n_qubits + 1,
            Basis::Full => 1 << n_qubits,
        }
    }

    fn check(self, n_qubits: usize) -> Result<()> {
        if n_qubits == 0 {
            return Err(QfiError::InvalidArgument("need at least one qubit".into()));
        }
        match self {
            Basis::Symmetric => capacity::check_symmetric(n_qubits),
            Basis::Full => capacity::check_full(n_qubits),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpinComponent {
    X,
    Y,
    Z,
}

/// Which generator to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HamiltonianKind {
    /// `mu J_n`
    Linear,
    /// One of the four collective two-body forms, `r` in `1..=4`.
    TwoBody(u8),
    /// `J_n^k`
    Power(u32),
}

impl fmt::Display for HamiltonianKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HamiltonianKind::Linear => write!(f, "linear"),
            HamiltonianKind::TwoBody(r) => write!(f, "r={r}"),
            HamiltonianKind::Power(k) => write!(f, "power:{k}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub kind: HamiltonianKind,
    pub mu: f64,
    pub eta: f64,
    pub axis: Direction,
    pub n_qubits: usize,
    pub basis: Basis,
}

impl HamiltonianSpec {
    /// Unit couplings, axis `+z`, symmetric basis.
    pub fn new(kind: HamiltonianKind, n_qubits: usize) -> Self {
        Self {
            kind,
            mu: 1.0,
            eta: 1.0,
            axis: Direction::Z,
            n_qubits,
            basis: Basis::Symmetric,
        }
    }

    pub fn linear(n_qubits: usize) -> Self {
        Self::new(HamiltonianKind::Linear, n_qubits)
    }

    pub fn two_body(r: u8, n_qubits: usize) -> Self {
        Self::new(HamiltonianKind::TwoBody(r), n_qubits)
    }

    pub fn with_axis(mut self, axis: Direction) -> Self {
        self.axis = axis;
        self
    }

    pub fn with_basis(mut self, basis: Basis) -> Self {
        self.basis = basis;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            HamiltonianKind::TwoBody(r) if !(1..=4).contains(&r) => {
                return Err(QfiError::InvalidArgument(format!(
                    "two-body form r={r} is not one of 1..=4"
                )))
            }
            HamiltonianKind::Power(0) => {
                return Err(QfiError::InvalidArgument("power k must be >= 1".into()))
            }
            _ => {}
        }
        if !self.mu.is_finite() || !self.eta.is_finite() {
            return Err(QfiError::InvalidArgument("couplings must be finite".into()));
        }
        self.basis.check(self.n_qubits)
    }

    /// Coefficients `(c0, c1, c2)` with `H = c0 I + c1 J_n + c2 J_n^2`, or `None` for powers k > 2.
    pub fn quadratic_coefficients(&self) -> Option<(f64, f64, f64)> {
        let n = self.n_qubits as f64;
        match self.kind {
            HamiltonianKind::Linear => Some((0.0, self.mu, 0.0)),
            HamiltonianKind::TwoBody(1) => Some((0.0, 0.0, self.eta)),
            HamiltonianKind::TwoBody(2) => Some((0.0, self.mu, self.eta)),
            HamiltonianKind::TwoBody(3) => Some((-self.eta * n / 8.0, 0.0, self.eta / 2.0)),
            HamiltonianKind::TwoBody(4) => Some((-self.eta * n / 8.0, self.mu, self.eta / 2.0)),
            HamiltonianKind::Power(1) => Some((0.0, 1.0, 0.0)),
            HamiltonianKind::Power(2) => Some((0.0, 0.0, 1.0)),
            _ => None,
        }
    }

    /// Eigenvalue of the generator on the `J_n = m` eigenspace.
    pub fn eigenvalue_at(&self, m: f64) -> f64 {
        match self.quadratic_coefficients() {
            Some((c0, c1, c2)) => c0 + c1 * m + c2 * m * m,
            None => match self.kind {
                HamiltonianKind::Power(k) => m.powi(k as i32),
                _ => unreachable!("all other kinds are quadratic"),
            },
        }
    }

    /// Applies the generator to a symmetric-subspace vector in `O(kN)`.
    pub fn apply_symmetric(&self, psi: &[C64]) -> Vec<C64> {
        let jn = SymmetricJn::new(self.n_qubits, self.axis);
        match self.quadratic_coefficients() {
            Some((c0, c1, c2)) => {
                let j1 = jn.apply(psi);
                let j2 = jn.apply(&j1);
                psi.iter()
                    .zip(&j1)
                    .zip(&j2)
                    .map(|((a, b), c)| a * c0 + b * c1 + c * c2)
                    .collect()
            }
            None => {
                let HamiltonianKind::Power(k) = self.kind else {
                    unreachable!()
                };
                let mut v = psi.to_vec();
                for _ in 0..k {
                    v = jn.apply(&v);
                }
                v
            }
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            HamiltonianKind::Linear => "H1".to_string(),
            HamiltonianKind::TwoBody(r) => format!("H2_r{r}"),
            HamiltonianKind::Power(k) => format!("Jn^{k}"),
        }
    }
}

/// Tridiagonal `J_n` on the symmetric subspace.
#[derive(Clone, Debug)]
pub struct SymmetricJn {
    diag: Vec<f64>,
    /// `up[l] = <l-1| (n_x J_x + n_y J_y) |l>` for `l >= 1`.
    up: Vec<C64>,
}

impl SymmetricJn {
    pub fn new(n_qubits: usize, axis: Direction) -> Self {
        Self::from_unit_vector(n_qubits, axis.unit_vector())
    }

    pub fn from_unit_vector(n_qubits: usize, [nx, ny, nz]: [f64; 3]) -> Self {
        let half = n_qubits as f64 / 2.0;
        let diag = (0..=n_qubits).map(|l| nz * (half - l as f64)).collect();
        let plus = C64::new(nx, -ny) * 0.5;
        let up = (0..=n_qubits).map(|l| plus * ladder(n_qubits, l)).collect();
        Self { diag, up }
    }

    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        let d = self.diag.len();
        let mut out: Vec<C64> = psi.iter().zip(&self.diag).map(|(a, &b)| a * b).collect();
        for l in 1..d {
            // J_+ part lowers l, J_- part raises it.
            out[l - 1] += self.up[l] * psi[l];
            out[l] += self.up[l].conj() * psi[l - 1];
        }
        out
    }
}

/// `<l-1| J_+ |l> = sqrt(l (N - l + 1))`.
fn ladder(n_qubits: usize, l: usize) -> f64 {
    if l == 0 {
        return 0.0;
    }
    ((l * (n_qubits - l + 1)) as f64).sqrt()
}

/// Dense Hermitian matrix tagged with its basis, with a lazily computed eigendecomposition.
#[derive(Debug)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
    basis: Basis,
    n_qubits: usize,
    eigen: OnceLock<std::result::Result<EigenDecomposition, QfiError>>,
}

impl Clone for HermitianOperator {
    fn clone(&self) -> Self {
        let eigen = OnceLock::new();
        if let Some(e) = self.eigen.get() {
            let _ = eigen.set(e.clone());
        }
        Self {
            matrix: self.matrix.clone(),
            basis: self.basis,
            n_qubits: self.n_qubits,
            eigen,
        }
    }
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix, basis: Basis, n_qubits: usize) -> Result<Self> {
        let dim = basis.dim(n_qubits);
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(QfiError::DimensionMismatch(format!(
                "{}x{} matrix for {n_qubits} qubits in the {basis:?} basis",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > 1e-10 * matrix.max_abs().max(1.0) {
            return Err(QfiError::NotHermitian { deviation });
        }
        Ok(Self {
            matrix,
            basis,
            n_qubits,
            eigen: OnceLock::new(),
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Computed on first use; concurrent callers share the single result.
    pub fn eigen(&self) -> Result<&EigenDecomposition> {
        self.eigen
            .get_or_init(|| hermitian_eigen(&self.matrix))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn eigenvalues(&self) -> Result<&[f64]> {
        Ok(&self.eigen()?.eigenvalues)
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        self.matrix.mul_vec(v)
    }

    pub fn expectation(&self, v: &[C64]) -> Result<f64> {
        Ok(self.matrix.sandwich(v, v)?.re)
    }
}

/// Sparse rows, used to build full-basis operators without dense products.
type SparseRows = Vec<Vec<(usize, C64)>>;

fn full_jn_sparse(n_qubits: usize, n: [f64; 3]) -> SparseRows {
    let dim = 1usize << n_qubits;
    let half = n_qubits as f64 / 2.0;
    (0..dim)
        .map(|row| {
            let weight = row.count_ones() as f64;
            let mut entries = Vec::with_capacity(n_qubits + 1);
            if n[2] != 0.0 {
                entries.push((row, C64::new(n[2] * (half - weight), 0.0)));
            }
            for q in 0..n_qubits {
                let col = row ^ (1 << q);
                // <row| (n_x sigma_x + n_y sigma_y)/2 |col>; sigma_y|0> = i|1>.
                let y = if row & (1 << q) != 0 { I } else { -I };
                let v = (C64::new(n[0], 0.0) + y * n[1]) * 0.5;
                if v != ZERO {
                    entries.push((col, v));
                }
            }
            entries.sort_by_key(|e| e.0);
            entries
        })
        .collect()
}

fn sparse_mul(a: &SparseRows, b: &SparseRows) -> SparseRows {
    let dim = b.len();
    let mut acc = vec![ZERO; dim];
    let mut touched = Vec::new();
    a.iter()
        .map(|row| {
            for &(k, av) in row {
                for &(j, bv) in &b[k] {
                    if acc[j] == ZERO {
                        touched.push(j);
                    }
                    acc[j] += av * bv;
                }
            }
            touched.sort_unstable();
            touched.dedup();
            let out = touched
                .iter()
                .filter(|&&j| acc[j] != ZERO)
                .map(|&j| (j, acc[j]))
                .collect();
            for &j in &touched {
                acc[j] = ZERO;
            }
            touched.clear();
            out
        })
        .collect()
}

fn densify(rows: &SparseRows) -> ComplexMatrix {
    let dim = rows.len();
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (i, row) in rows.iter().enumerate() {
        for &(j, v) in row {
            m[(i, j)] += v;
        }
    }
    m
}

fn symmetric_jn_dense(n_qubits: usize, n: [f64; 3]) -> ComplexMatrix {
    let jn = SymmetricJn::from_unit_vector(n_qubits, n);
    let d = n_qubits + 1;
    let mut m = ComplexMatrix::from_diagonal(&jn.diag);
    for l in 1..d {
        m[(l - 1, l)] = jn.up[l];
        m[(l, l - 1)] = jn.up[l].conj();
    }
    m
}

fn jn_matrix(n_qubits: usize, axis: Direction, basis: Basis) -> Result<ComplexMatrix> {
    basis.check(n_qubits)?;
    Ok(match basis {
        Basis::Symmetric => symmetric_jn_dense(n_qubits, axis.unit_vector()),
        Basis::Full => densify(&full_jn_sparse(n_qubits, axis.unit_vector())),
    })
}

pub fn collective_spin(
    n_qubits: usize,
    component: SpinComponent,
    basis: Basis,
) -> Result<HermitianOperator> {
    // Exact unit vectors, so J_x carries no cos(pi/2) residue on its diagonal.
    let n = match component {
        SpinComponent::X => [1.0, 0.0, 0.0],
        SpinComponent::Y => [0.0, 1.0, 0.0],
        SpinComponent::Z => [0.0, 0.0, 1.0],
    };
    basis.check(n_qubits)?;
    let matrix = match basis {
        Basis::Symmetric => symmetric_jn_dense(n_qubits, n),
        Basis::Full => densify(&full_jn_sparse(n_qubits, n)),
    };
    HermitianOperator::new(matrix, basis, n_qubits)
}

/// `n_x J_x + n_y J_y + n_z J_z`.
pub fn j_along(n_qubits: usize, axis: Direction, basis: Basis) -> Result<HermitianOperator> {
    HermitianOperator::new(jn_matrix(n_qubits, axis, basis)?, basis, n_qubits)
}

pub fn build_hamiltonian(spec: &HamiltonianSpec) -> Result<HermitianOperator> {
    spec.validate()?;
    let n = spec.n_qubits;
    let matrix = match spec.basis {
        Basis::Symmetric => {
            let jn = symmetric_jn_dense(n, spec.axis.unit_vector());
            polynomial_dense(spec, &jn)?
        }
        Basis::Full => {
            let jn = full_jn_sparse(n, spec.axis.unit_vector());
            match spec.quadratic_coefficients() {
                Some((c0, c1, c2)) => {
                    let j2 = densify(&sparse_mul(&jn, &jn));
                    combine(c0, c1, c2, &densify(&jn), &j2)?
                }
                None => {
                    let HamiltonianKind::Power(k) = spec.kind else {
                        unreachable!()
                    };
                    let mut acc = jn.clone();
                    for _ in 1..k {
                        acc = sparse_mul(&acc, &jn);
                    }
                    densify(&acc)
                }
            }
        }
    };
    HermitianOperator::new(matrix, spec.basis, n)
}

fn polynomial_dense(spec: &HamiltonianSpec, jn: &ComplexMatrix) -> Result<ComplexMatrix> {
    match spec.quadratic_coefficients() {
        Some((c0, c1, c2)) => {
            let j2 = jn.matmul(jn)?;
            combine(c0, c1, c2, jn, &j2)
        }
        None => {
            let HamiltonianKind::Power(k) = spec.kind else {
                unreachable!()
            };
            let mut acc = jn.clone();
            for _ in 1..k {
                acc = acc.matmul(jn)?;
            }
            Ok(acc)
        }
    }
}

fn combine(
    c0: f64,
    c1: f64,
    c2: f64,
    jn: &ComplexMatrix,
    j2: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    // Terms with zero coefficient are skipped so that e.g. Power(2) and
    // TwoBody(1) produce bit-identical matrices.
    let mut out = ComplexMatrix::zeros(jn.rows(), jn.cols());
    if c2 != 0.0 {
        out = if c2 == 1.0 {
            j2.clone()
        } else {
            j2.scale_real(c2)
        };
    }
    if c1 != 0.0 {
        out = out.add(&if c1 == 1.0 {
            jn.clone()
        } else {
            jn.scale_real(c1)
        })?;
    }
    if c0 != 0.0 {
        out = out.shift_diagonal(c0)?;
    }
    Ok(out)
}

/// Extremal eigenvector described in the Dicke basis along the Hamiltonian axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtremalState {
    Ghz,
    AllZero,
    /// `|D_{N-l,l}>`
    Dicke(usize),
    /// `(|D_{N-l,l}> + |D_{N-l',l'}>)/sqrt(2)`
    DickePair(usize, usize),
}

impl ExtremalState {
    /// Amplitudes in the symmetric basis along `+z`.
    pub fn amplitudes(&self, n_qubits: usize) -> Vec<C64> {
        let mut v = vec![ZERO; n_qubits + 1];
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match *self {
            ExtremalState::Ghz => {
                v[0] = C64::new(h, 0.0);
                v[n_qubits] = C64::new(h, 0.0);
            }
            ExtremalState::AllZero => v[0] = C64::new(1.0, 0.0),
            ExtremalState::Dicke(l) => v[l] = C64::new(1.0, 0.0),
            ExtremalState::DickePair(a, b) => {
                v[a] = C64::new(h, 0.0);
                v[b] = C64::new(h, 0.0);
            }
        }
        v
    }

    pub fn label(&self, n_qubits: usize) -> String {
        match *self {
            ExtremalState::Ghz => "|GHZ>".to_string(),
            ExtremalState::AllZero => format!("|0>^{n_qubits}"),
            ExtremalState::Dicke(l) => format!("|D_{{{},{}}}>", n_qubits - l, l),
            ExtremalState::DickePair(a, b) => format!("|D^({n_qubits})_{{{a},{b}}}>"),
        }
    }
}

/// Closed-form eigen-structure of a two-body generator with unit couplings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosedFormExtrema {
    pub r: u8,
    pub n_qubits: usize,
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub phi_max: ExtremalState,
    pub phi_min: ExtremalState,
    /// The tabulated optimal QFI, evaluated from its own closed form.
    pub optimal_qfi: f64,
}

impl ClosedFormExtrema {
    pub fn spread_squared(&self) -> f64 {
        (self.lambda_max - self.lambda_min).powi(2)
    }
}

pub fn closed_form_extrema(r: u8, n_qubits: usize) -> Result<ClosedFormExtrema> {
    if !(1..=4).contains(&r) {
        return Err(QfiError::InvalidArgument(format!("r={r} not in 1..=4")));
    }
    if n_qubits < 2 {
        return Err(QfiError::InvalidArgument(
            "closed forms need at least two qubits".into(),
        ));
    }
    let big_n = n_qubits;
    let n = n_qubits as f64;
    let odd = n_qubits % 2 == 1;
    let (lambda_max, lambda_min, phi_max, phi_min, optimal_qfi) = match (r, odd) {
        (1, true) => (
            n * n / 4.0,
            0.25,
            ExtremalState::Ghz,
            ExtremalState::DickePair((big_n - 1) / 2, (big_n + 1) / 2),
            (n * n - 1.0).powi(2) / 16.0,
        ),
        (1, false) => (
            n * n / 4.0,
            0.0,
            ExtremalState::Ghz,
            ExtremalState::Dicke(big_n / 2),
            n.powi(4) / 16.0,
        ),
        (2, true) => (
            n * (n + 2.0) / 4.0,
            -0.25,
            ExtremalState::AllZero,
            ExtremalState::Dicke((big_n + 1) / 2),
            (n + 1.0).powi(4) / 16.0,
        ),
        (2, false) => (
            n * (n + 2.0) / 4.0,
            0.0,
            ExtremalState::AllZero,
            ExtremalState::DickePair(big_n / 2, (big_n + 2) / 2),
            n * n * (n + 2.0).powi(2) / 16.0,
        ),
        // Odd N bottoms out at m = 1/2, giving (N^2 - 1)^2 / 64 for the spread.
        (3, true) => (
            n * (n - 1.0) / 8.0,
            -(n - 1.0) / 8.0,
            ExtremalState::Ghz,
            ExtremalState::DickePair((big_n - 1) / 2, (big_n + 1) / 2),
            (n * n - 1.0).powi(2) / 64.0,
        ),
        (3, false) => (
            n * (n - 1.0) / 8.0,
            -n / 8.0,
            ExtremalState::Ghz,
            ExtremalState::Dicke(big_n / 2),
            n.powi(4) / 64.0,
        ),
        (4, true) => (
            n * (n + 3.0) / 8.0,
            -(n + 3.0) / 8.0,
            ExtremalState::AllZero,
            ExtremalState::DickePair((big_n + 1) / 2, (big_n + 3) / 2),
            (n + 3.0).powi(2) * (n + 1.0).powi(2) / 64.0,
        ),
        (4, false) => (
            n * (n + 3.0) / 8.0,
            -(n + 4.0) / 8.0,
            ExtremalState::AllZero,
            ExtremalState::Dicke((big_n + 2) / 2),
            (n + 2.0).powi(4) / 64.0,
        ),
        _ => unreachable!(),
    };
    Ok(ClosedFormExtrema {
        r,
        n_qubits,
        lambda_max,
        lambda_min,
        phi_max,
        phi_min,
        optimal_qfi,
    })
}

#[derive(Clone, Debug)]
pub struct ExtremalPair {
    pub lambda_max: f64,
    pub phi_max: Vec<C64>,
    pub lambda_min: f64,
    pub phi_min: Vec<C64>,
    /// Number of eigenvalues within `1e-9 (1 + |lambda|)` of each extreme.
    pub max_multiplicity: usize,
    pub min_multiplicity: usize,
}

impl ExtremalPair {
    pub fn max_degenerate(&self) -> bool {
        self.max_multiplicity > 1
    }

    pub fn min_degenerate(&self) -> bool {
        self.min_multiplicity > 1
    }
}

/// Extreme eigenvalues and one eigenvector each; inside a degenerate cluster
/// the lowest-index eigenvector of the solver's output is returned.
pub fn extremal_eigenpair(op: &HermitianOperator) -> Result<ExtremalPair> {
    let eig = op.eigen()?;
    let vals = &eig.eigenvalues;
    let d = vals.len();
    let lambda_min = vals[0];
    let lambda_max = vals[d - 1];
    let close = |x: f64, ext: f64| (x - ext).abs() < 1e-9 * (1.0 + ext.abs());
    let min_multiplicity = vals.iter().filter(|&&x| close(x, lambda_min)).count();
    let max_multiplicity = vals.iter().filter(|&&x| close(x, lambda_max)).count();
    let max_index = vals.iter().position(|&x| close(x, lambda_max)).unwrap();
    Ok(ExtremalPair {
        lambda_max,
        phi_max: eig.eigenvector(max_index),
        lambda_min,
        phi_min: eig.eigenvector(0),
        max_multiplicity,
        min_multiplicity,
    })
}
