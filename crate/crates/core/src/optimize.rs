//! Encoding-axis optimization, separable benchmarks and the Dicke-pair scan.
//!
//! For generators of the form `c1 J_n + c2 J_n^2` the QFI is a quadratic form
//! in nine monomials of the axis components, so each state is reduced once to
//! a small Gram matrix and the axis search then costs a few dozen flops per
//! point. Higher powers fall back to direct evaluation.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::binomial;
use crate::error::{QfiError, Result};
use crate::numerics::{hermitian_eigen, inner, ComplexMatrix, EigenDecomposition, C64, ZERO};
use crate::operators::{
    build_hamiltonian, collective_spin, Basis, Direction, HamiltonianKind, HamiltonianSpec,
    SpinComponent, SymmetricJn,
};
use crate::qfi::{qfi_from_spectrum, qfi_pure_symmetric, QfiResult, SPECTRAL_CUTOFF};
use crate::states::{build_probe, DensityMatrix, ProbeKind, ProbeSpec, SymVector};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisSearchConfig {
    pub polar_points: usize,
    pub azimuth_points: usize,
    /// Refinement stops once the step drops below this (radians).
    pub min_step: f64,
    pub max_iterations: usize,
    /// Number of best grid points refined independently.
    pub refine_starts: usize,
}

impl Default for AxisSearchConfig {
    fn default() -> Self {
        Self {
            polar_points: 64,
            azimuth_points: 128,
            min_step: 1e-6,
            max_iterations: 200,
            refine_starts: 4,
        }
    }
}

impl AxisSearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.polar_points < 8 || self.azimuth_points < 8 {
            return Err(QfiError::InvalidArgument(
                "axis grid needs at least 8 points per angle".into(),
            ));
        }
        if !(self.min_step > 0.0) || self.refine_starts == 0 {
            return Err(QfiError::InvalidArgument(
                "axis refinement needs a positive step and at least one start".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AxisOptimum {
    pub axis: Direction,
    pub qfi: QfiResult,
}

/// Monomials `[x, y, z, xx, yy, zz, xy, xz, yz]` of the axis, weighted by the couplings.
fn features(n: [f64; 3], c1: f64, c2: f64) -> [f64; 9] {
    let [x, y, z] = n;
    [
        c1 * x,
        c1 * y,
        c1 * z,
        c2 * x * x,
        c2 * y * y,
        c2 * z * z,
        c2 * x * y,
        c2 * x * z,
        c2 * y * z,
    ]
}

const PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];

fn unit(a: usize) -> [f64; 3] {
    let mut v = [0.0; 3];
    v[a] = 1.0;
    v
}

/// `F(n) = f(n)^T G f(n)`.
#[derive(Clone, Debug)]
struct GramObjective {
    gram: [[f64; 9]; 9],
    c1: f64,
    c2: f64,
}

impl GramObjective {
    fn eval(&self, n: [f64; 3]) -> f64 {
        let f = features(n, self.c1, self.c2);
        let mut total = 0.0;
        for k in 0..9 {
            if f[k] == 0.0 {
                continue;
            }
            let row: f64 = (0..9).map(|l| self.gram[k][l] * f[l]).sum();
            total += f[k] * row;
        }
        total.max(0.0)
    }

    /// Pure state: `G_kl = 4 Re<M_k M_l> - 4 <M_k><M_l>`.
    fn pure(probe: &SymVector, c1: f64, c2: f64) -> Self {
        let n = probe.n_qubits();
        let psi = probe.amplitudes();
        let ops: Vec<SymmetricJn> = (0..3)
            .map(|a| SymmetricJn::from_unit_vector(n, unit(a)))
            .collect();
        let single: Vec<Vec<C64>> = ops.iter().map(|j| j.apply(psi)).collect();
        let mut images: Vec<Vec<C64>> = single.clone();
        for &(a, b) in &PAIRS {
            let ab = ops[a].apply(&single[b]);
            if a == b {
                images.push(ab);
            } else {
                let ba = ops[b].apply(&single[a]);
                images.push(ab.iter().zip(&ba).map(|(u, v)| u + v).collect());
            }
        }
        let means: Vec<f64> = images.iter().map(|v| inner(psi, v).re).collect();
        let mut gram = [[0.0; 9]; 9];
        for k in 0..9 {
            for l in k..9 {
                let g = 4.0 * (inner(&images[k], &images[l]).re - means[k] * means[l]);
                gram[k][l] = g;
                gram[l][k] = g;
            }
        }
        Self { gram, c1, c2 }
    }

    /// Mixed state: `G_kl = 2 sum_ij w_ij Re(M_k,ij conj(M_l,ij))` in the eigenbasis of `rho`.
    fn mixed(eig: &EigenDecomposition, n_qubits: usize, c1: f64, c2: f64) -> Result<Self> {
        let mut mats = Vec::with_capacity(9);
        for comp in [SpinComponent::X, SpinComponent::Y, SpinComponent::Z] {
            let j = collective_spin(n_qubits, comp, Basis::Full)?;
            mats.push(eig.to_eigenbasis(j.matrix())?);
        }
        if c2 != 0.0 {
            for &(a, b) in &PAIRS {
                let ab = mats[a].matmul(&mats[b])?;
                let m = if a == b { ab } else { ab.add(&ab.dagger())? };
                mats.push(m);
            }
        }
        let lambda: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
        let d = lambda.len();
        let mut gram = [[0.0; 9]; 9];
        for i in 0..d {
            for j in 0..d {
                let s = lambda[i] + lambda[j];
                if i == j || s <= SPECTRAL_CUTOFF {
                    continue;
                }
                let diff = lambda[i] - lambda[j];
                let w = 2.0 * diff * diff / s;
                if w == 0.0 {
                    continue;
                }
                let vals: Vec<C64> = mats.iter().map(|m| m[(i, j)]).collect();
                for k in 0..vals.len() {
                    for l in k..vals.len() {
                        gram[k][l] += w * (vals[k] * vals[l].conj()).re;
                    }
                }
            }
        }
        for k in 0..9 {
            for l in 0..k {
                gram[k][l] = gram[l][k];
            }
        }
        Ok(Self { gram, c1, c2 })
    }
}

enum AxisObjective<'a> {
    Gram(GramObjective),
    Direct(&'a SymVector, HamiltonianSpec),
}

impl AxisObjective<'_> {
    fn eval(&self, theta: f64, phi: f64) -> f64 {
        let axis = Direction::new(theta, phi);
        match self {
            AxisObjective::Gram(g) => g.eval(axis.unit_vector()),
            AxisObjective::Direct(psi, spec) => qfi_pure_symmetric(psi, &spec.with_axis(axis))
                .map(|r| r.value)
                .unwrap_or(0.0),
        }
    }
}

/// Coarse grid, then pattern search from the best few grid points.
fn search_sphere(f: impl Fn(f64, f64) -> f64, cfg: &AxisSearchConfig) -> (Direction, f64) {
    let dtheta = PI / (cfg.polar_points - 1) as f64;
    let dphi = TAU / cfg.azimuth_points as f64;
    let mut grid: Vec<(f64, f64, f64)> = Vec::with_capacity(cfg.polar_points * cfg.azimuth_points);
    for i in 0..cfg.polar_points {
        let theta = i as f64 * dtheta;
        // The poles are single points.
        let count = if i == 0 || i + 1 == cfg.polar_points {
            1
        } else {
            cfg.azimuth_points
        };
        for j in 0..count {
            let phi = j as f64 * dphi;
            grid.push((f(theta, phi), theta, phi));
        }
    }
    // Stable sort keeps grid order among equal values.
    grid.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = (grid[0].1, grid[0].2, grid[0].0);
    for &(v0, t0, p0) in grid.iter().take(cfg.refine_starts) {
        let (mut t, mut p, mut v) = (t0, p0, v0);
        let mut scale = 1.0;
        for _ in 0..cfg.max_iterations {
            if scale * dtheta.max(dphi) < cfg.min_step {
                break;
            }
            let moves = [
                (t + scale * dtheta, p),
                (t - scale * dtheta, p),
                (t, p + scale * dphi),
                (t, p - scale * dphi),
            ];
            let mut improved = false;
            for (tn, pn) in moves {
                let vn = f(tn, pn);
                if vn > v {
                    (t, p, v) = (tn, pn, vn);
                    improved = true;
                }
            }
            if !improved {
                scale *= 0.5;
            }
        }
        if v > best.2 {
            best = (t, p, v);
        }
    }
    (Direction::new(best.0, best.1), best.2)
}

/// Maximizes the pure-state QFI of a fixed probe over the generator axis.
pub fn optimize_axis(
    probe: &SymVector,
    template: &HamiltonianSpec,
    cfg: &AxisSearchConfig,
) -> Result<AxisOptimum> {
    cfg.validate()?;
    template.validate()?;
    if probe.n_qubits() != template.n_qubits {
        return Err(QfiError::DimensionMismatch(format!(
            "{}-qubit probe vs {}-qubit generator",
            probe.n_qubits(),
            template.n_qubits
        )));
    }
    let objective = match template.quadratic_coefficients() {
        Some((_, c1, c2)) => AxisObjective::Gram(GramObjective::pure(probe, c1, c2)),
        None => AxisObjective::Direct(probe, *template),
    };
    let (axis, _) = search_sphere(|t, p| objective.eval(t, p), cfg);
    // Report the direct evaluation, never below the value at z.
    let found = qfi_pure_symmetric(probe, &template.with_axis(axis))?;
    let at_z = qfi_pure_symmetric(probe, &template.with_axis(Direction::Z))?;
    if at_z.value > found.value {
        Ok(AxisOptimum {
            axis: Direction::Z,
            qfi: at_z,
        })
    } else {
        Ok(AxisOptimum { axis, qfi: found })
    }
}

/// Exact linear-generator optimum `4 lambda_max(Gamma)` with the maximizing axis.
pub fn qfi_linear_covariance(probe: &SymVector) -> Result<(Direction, f64)> {
    let g = GramObjective::pure(probe, 1.0, 0.0);
    let gamma = ComplexMatrix::from_fn(3, 3, |a, b| C64::new(g.gram[a][b], 0.0));
    let eig = hermitian_eigen(&gamma)?;
    let top = eig.eigenvector(2);
    let mut v = [top[0].re, top[1].re, top[2].re];
    // The eigenvector of a real symmetric matrix is real up to a global phase.
    let phase = top
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(ZERO);
    if phase.norm() > 0.0 {
        let u = phase.conj() / phase.norm();
        for (slot, c) in v.iter_mut().zip(&top) {
            *slot = (c * u).re;
        }
    }
    // n and -n give the same generator up to sign.
    if v[2] < 0.0 || (v[2] == 0.0 && (v[1] < 0.0 || (v[1] == 0.0 && v[0] < 0.0))) {
        v = [-v[0], -v[1], -v[2]];
    }
    let axis = Direction::from_vector(v)?;
    Ok((axis, eig.eigenvalues[2].max(0.0)))
}

/// Precomputed axis landscape of a mixed state.
pub struct MixedAxisObjective {
    eig: EigenDecomposition,
    gram: GramObjective,
    n_qubits: usize,
}

impl MixedAxisObjective {
    pub fn new(rho: &DensityMatrix, template: &HamiltonianSpec) -> Result<Self> {
        template.validate()?;
        let (_, c1, c2) = template.quadratic_coefficients().ok_or_else(|| {
            QfiError::InvalidArgument(format!(
                "mixed-state axis search supports at most quadratic generators, got {}",
                template.kind
            ))
        })?;
        if template.n_qubits != rho.n_qubits() {
            return Err(QfiError::DimensionMismatch(format!(
                "{}-qubit state vs {}-qubit generator",
                rho.n_qubits(),
                template.n_qubits
            )));
        }
        let eig = hermitian_eigen(rho.matrix())?;
        let gram = GramObjective::mixed(&eig, rho.n_qubits(), c1, c2)?;
        Ok(Self {
            eig,
            gram,
            n_qubits: rho.n_qubits(),
        })
    }

    pub fn value(&self, axis: Direction) -> f64 {
        self.gram.eval(axis.unit_vector())
    }

    /// Spectral QFI at a given axis, reusing the stored eigendecomposition.
    pub fn qfi_at(&self, template: &HamiltonianSpec, axis: Direction) -> Result<QfiResult> {
        let spec = template.with_axis(axis).with_basis(Basis::Full);
        let h = build_hamiltonian(&HamiltonianSpec {
            n_qubits: self.n_qubits,
            ..spec
        })?;
        qfi_from_spectrum(&self.eig, h.matrix())
    }
}

/// Mixed-state counterpart of [`optimize_axis`].
pub fn optimize_axis_mixed(
    rho: &DensityMatrix,
    template: &HamiltonianSpec,
    cfg: &AxisSearchConfig,
) -> Result<AxisOptimum> {
    cfg.validate()?;
    let objective = MixedAxisObjective::new(rho, template)?;
    let (axis, _) = search_sphere(|t, p| objective.value(Direction::new(t, p)), cfg);
    let found = objective.qfi_at(template, axis)?;
    let at_z = objective.qfi_at(template, Direction::Z)?;
    if at_z.value > found.value {
        Ok(AxisOptimum {
            axis: Direction::Z,
            qfi: at_z,
        })
    } else {
        Ok(AxisOptimum { axis, qfi: found })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeparableParametrization {
    /// All qubits share one polar angle relative to the generator axis.
    SymmetricCoherent,
    /// One polar angle per qubit.
    GeneralProduct,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparableSearchConfig {
    pub parametrization: SeparableParametrization,
    pub starts: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for SeparableSearchConfig {
    fn default() -> Self {
        Self {
            parametrization: SeparableParametrization::SymmetricCoherent,
            starts: 32,
            tolerance: 1e-10,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparableOptimum {
    pub qfi: f64,
    /// Polar angle of each qubit relative to the generator axis.
    pub polar_angles: Vec<f64>,
    pub parametrization: SeparableParametrization,
}

/// `4 Var(H)` for a distribution over excitation number along the axis.
fn distribution_qfi(spec: &HamiltonianSpec, probs: &[f64]) -> f64 {
    let half = spec.n_qubits as f64 / 2.0;
    let (mut m1, mut m2) = (0.0, 0.0);
    for (l, &p) in probs.iter().enumerate() {
        let h = spec.eigenvalue_at(half - l as f64);
        m1 += p * h;
        m2 += p * h * h;
    }
    (4.0 * (m2 - m1 * m1)).max(0.0)
}

fn binomial_probs(n: usize, s: f64) -> Vec<f64> {
    (0..=n)
        .map(|l| binomial(n, l) * s.powi(l as i32) * (1.0 - s).powi((n - l) as i32))
        .collect()
}

/// Excitation-number distribution of independent qubits with excitation probabilities `s`.
fn poisson_binomial(s: &[f64]) -> Vec<f64> {
    let mut p = vec![0.0; s.len() + 1];
    p[0] = 1.0;
    for (q, &sq) in s.iter().enumerate() {
        for l in (0..=q + 1).rev() {
            let stay = p[l] * (1.0 - sq);
            let up = if l > 0 { p[l - 1] * sq } else { 0.0 };
            p[l] = stay + up;
        }
    }
    p
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

fn symmetric_coherent_bound(
    spec: &HamiltonianSpec,
    cfg: &SeparableSearchConfig,
) -> SeparableOptimum {
    let n = spec.n_qubits;
    let objective = |c: f64| distribution_qfi(spec, &binomial_probs(n, (1.0 - c) / 2.0));
    let starts = cfg.starts.max(1);
    let width = 2.0 / starts as f64;
    let mut best = (1.0, objective(1.0));
    let south = objective(-1.0);
    if south > best.1 {
        best = (-1.0, south);
    }
    for k in 0..starts {
        let a = -1.0 + k as f64 * width;
        let (c, v) = golden_max(objective, a, a + width, cfg.tolerance);
        if v > best.1 {
            best = (c, v);
        }
    }
    let theta = best.0.clamp(-1.0, 1.0).acos();
    SeparableOptimum {
        qfi: best.1,
        polar_angles: vec![theta; n],
        parametrization: SeparableParametrization::SymmetricCoherent,
    }
}

fn general_product_bound(spec: &HamiltonianSpec, cfg: &SeparableSearchConfig) -> SeparableOptimum {
    let n = spec.n_qubits;
    let objective = |angles: &[f64]| {
        let s: Vec<f64> = angles.iter().map(|t| (t / 2.0).sin().powi(2)).collect();
        distribution_qfi(spec, &poisson_binomial(&s))
    };
    let symmetric = symmetric_coherent_bound(spec, cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut starts = vec![symmetric.polar_angles.clone()];
    for _ in 1..cfg.starts.max(1) {
        starts.push((0..n).map(|_| rng.gen_range(0.0..PI)).collect());
    }
    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in starts {
        let mut x = start;
        let mut v = objective(&x);
        let mut step = 0.5;
        let mut iterations = 0;
        while step > 1e-9 && iterations < 20_000 {
            iterations += 1;
            let mut improved = false;
            for q in 0..n {
                for sign in [1.0, -1.0] {
                    let old = x[q];
                    x[q] = (old + sign * step).clamp(0.0, PI);
                    let vn = objective(&x);
                    if vn > v + cfg.tolerance * 1e-3 {
                        v = vn;
                        improved = true;
                    } else {
                        x[q] = old;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if best.as_ref().map_or(true, |(_, bv)| v > *bv) {
            best = Some((x, v));
        }
    }
    let (angles, qfi) = best.expect("at least one start");
    SeparableOptimum {
        qfi,
        polar_angles: angles,
        parametrization: SeparableParametrization::GeneralProduct,
    }
}

/// Largest `4 Var(H)` over product probes.
pub fn separable_bound(
    template: &HamiltonianSpec,
    cfg: &SeparableSearchConfig,
) -> Result<SeparableOptimum> {
    template.validate()?;
    crate::capacity::check_symmetric(template.n_qubits)?;
    if !(cfg.tolerance > 0.0) {
        return Err(QfiError::InvalidArgument(
            "tolerance must be positive".into(),
        ));
    }
    Ok(match cfg.parametrization {
        SeparableParametrization::SymmetricCoherent => symmetric_coherent_bound(template, cfg),
        SeparableParametrization::GeneralProduct => general_product_bound(template, cfg),
    })
}

/// Spread `(lambda_max - lambda_min)^2` of the generator, read off the `J_n` spectrum.
pub fn optimal_qfi(template: &HamiltonianSpec) -> f64 {
    let n = template.n_qubits;
    let half = n as f64 / 2.0;
    let values: Vec<f64> = (0..=n)
        .map(|l| template.eigenvalue_at(half - l as f64))
        .collect();
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    (hi - lo) * (hi - lo)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanEntry {
    pub l: usize,
    pub l_prime: usize,
    pub axis: Direction,
    pub qfi: f64,
}

/// Relative width within which scan values count as tied.
pub const TIE_TOLERANCE: f64 = 1e-6;

fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

/// Orders by QFI, grouping ties and breaking them by smaller `l + l'`, then smaller `l`.
fn rank(entries: &mut Vec<ScanEntry>) {
    entries.sort_by(|a, b| {
        b.qfi
            .total_cmp(&a.qfi)
            .then((a.l, a.l_prime).cmp(&(b.l, b.l_prime)))
    });
    let mut start = 0;
    while start < entries.len() {
        let head = entries[start].qfi;
        let mut end = start + 1;
        while end < entries.len() && tied(head, entries[end].qfi) {
            end += 1;
        }
        entries[start..end].sort_by_key(|e| (e.l + e.l_prime, e.l));
        start = end;
    }
}

/// Every pair `|D_l> + |D_l'>` (`l < l'`) with its axis-optimized QFI, best first.
pub fn near_optimal_scan(
    n_qubits: usize,
    template: &HamiltonianSpec,
    cfg: &AxisSearchConfig,
) -> Result<Vec<ScanEntry>> {
    if n_qubits < 2 {
        return Err(QfiError::InvalidArgument(format!(
            "scan needs at least two qubits, got {n_qubits}"
        )));
    }
    let spec = HamiltonianSpec {
        n_qubits,
        basis: Basis::Symmetric,
        ..*template
    };
    spec.validate()?;
    cfg.validate()?;
    let linear = is_linear(&spec);
    let pairs: Vec<(usize, usize)> = (0..=n_qubits)
        .flat_map(|l| ((l + 1)..=n_qubits).map(move |lp| (l, lp)))
        .collect();
    let mut entries = pairs
        .par_iter()
        .map(|&(l, lp)| -> Result<ScanEntry> {
            let probe = build_probe(&ProbeSpec::new(
                ProbeKind::DickeSuperposition(l, lp),
                n_qubits,
            ))?;
            let (axis, qfi) = if linear && spec.mu == 1.0 {
                qfi_linear_covariance(&probe)?
            } else {
                let opt = optimize_axis(&probe, &spec, cfg)?;
                (opt.axis, opt.qfi.value)
            };
            Ok(ScanEntry {
                l,
                l_prime: lp,
                axis,
                qfi,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rank(&mut entries);
    Ok(entries)
}

fn is_linear(spec: &HamiltonianSpec) -> bool {
    matches!(
        spec.kind,
        HamiltonianKind::Linear | HamiltonianKind::Power(1)
    )
}

/// Which pairs are set aside before picking the near-optimal probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExclusionRule {
    /// Linear generators: the GHZ pair `(0, N)` is the optimal probe itself.
    Ghz,
    /// Nonlinear generators: pairs already reaching `(lambda_max - lambda_min)^2`.
    OptimumAttaining,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NearOptimal {
    pub best: ScanEntry,
    /// All pairs tied with the best, in rank order.
    pub ties: Vec<(usize, usize)>,
    pub excluded: Vec<(usize, usize)>,
    pub rule: ExclusionRule,
    pub optimal_qfi: f64,
}

pub fn select_near_optimal(
    ranked: &[ScanEntry],
    template: &HamiltonianSpec,
) -> Result<NearOptimal> {
    let n = template.n_qubits;
    let optimal = optimal_qfi(template);
    let rule = if is_linear(template) {
        ExclusionRule::Ghz
    } else {
        ExclusionRule::OptimumAttaining
    };
    let (excluded, kept): (Vec<&ScanEntry>, Vec<&ScanEntry>) =
        ranked.iter().partition(|e| match rule {
            ExclusionRule::Ghz => e.l == 0 && e.l_prime == n,
            ExclusionRule::OptimumAttaining => e.qfi >= optimal - TIE_TOLERANCE,
        });
    let best = **kept
        .first()
        .ok_or_else(|| QfiError::InvalidArgument("no Dicke pair left after exclusion".into()))?;
    let ties = kept
        .iter()
        .take_while(|e| tied(best.qfi, e.qfi))
        .map(|e| (e.l, e.l_prime))
        .collect();
    Ok(NearOptimal {
        best,
        ties,
        excluded: excluded.iter().map(|e| (e.l, e.l_prime)).collect(),
        rule,
        optimal_qfi: optimal,
    })
}

/// Scan plus selection.
pub fn best_near_optimal(
    n_qubits: usize,
    template: &HamiltonianSpec,
    cfg: &AxisSearchConfig,
) -> Result<NearOptimal> {
    let ranked = near_optimal_scan(n_qubits, template, cfg)?;
    let spec = HamiltonianSpec {
        n_qubits,
        ..*template
    };
    select_near_optimal(&ranked, &spec)
}
