//! Local Kraus channels and global depolarization on full-space density matrices.

use serde::{Deserialize, Serialize};

use crate::capacity::check_full;
use crate::error::{QfiError, Result};
use crate::numerics::{ComplexMatrix, C64, ONE, ZERO};
use crate::states::DensityMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NoiseKind {
    PhaseDamping,
    AmplitudeDamping,
    GlobalDepolarizing,
}

impl NoiseKind {
    pub fn is_local(self) -> bool {
        !matches!(self, NoiseKind::GlobalDepolarizing)
    }

    pub fn label(self) -> &'static str {
        match self {
            NoiseKind::PhaseDamping => "phase_damping",
            NoiseKind::AmplitudeDamping => "amplitude_damping",
            NoiseKind::GlobalDepolarizing => "global_depolarizing",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "phase_damping" | "phase" | "pd" => Some(NoiseKind::PhaseDamping),
            "amplitude_damping" | "amplitude" | "ad" => Some(NoiseKind::AmplitudeDamping),
            "global_depolarizing" | "depolarizing" | "gd" => Some(NoiseKind::GlobalDepolarizing),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub p: f64,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, p: f64) -> Result<Self> {
        check_strength(p)?;
        Ok(Self { kind, p })
    }
}

fn check_strength(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(QfiError::InvalidArgument(format!(
            "noise strength {p} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Single-qubit Kraus operators, each 2×2.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet {
    ops: Vec<[[C64; 2]; 2]>,
}

impl KrausSet {
    pub fn new(ops: Vec<[[C64; 2]; 2]>) -> Result<Self> {
        let set = Self { ops };
        let deviation = set.completeness_deviation();
        if deviation > 1e-12 {
            return Err(QfiError::InvalidArgument(format!(
                "Kraus operators violate completeness by {deviation:e}"
            )));
        }
        Ok(set)
    }

    pub fn operators(&self) -> &[[[C64; 2]; 2]] {
        &self.ops
    }

    pub fn as_matrices(&self) -> Vec<ComplexMatrix> {
        self.ops
            .iter()
            .map(|e| ComplexMatrix::from_fn(2, 2, |i, j| e[i][j]))
            .collect()
    }

    /// `max |sum_k E_k^† E_k - I|`.
    pub fn completeness_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let s: C64 = self
                    .ops
                    .iter()
                    .map(|e| e[0][i].conj() * e[0][j] + e[1][i].conj() * e[1][j])
                    .sum();
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }
}

fn real(a: f64) -> C64 {
    C64::new(a, 0.0)
}

pub fn kraus_for(spec: &NoiseSpec) -> Result<KrausSet> {
    check_strength(spec.p)?;
    let p = spec.p;
    let ops = match spec.kind {
        NoiseKind::AmplitudeDamping => vec![
            [[ONE, ZERO], [ZERO, real((1.0 - p).sqrt())]],
            [[ZERO, real(p.sqrt())], [ZERO, ZERO]],
        ],
        NoiseKind::PhaseDamping => {
            let a = real((1.0 - p).sqrt());
            let b = real(p.sqrt());
            vec![
                [[a, ZERO], [ZERO, a]],
                [[b, ZERO], [ZERO, ZERO]],
                [[ZERO, ZERO], [ZERO, b]],
            ]
        }
        NoiseKind::GlobalDepolarizing => {
            return Err(QfiError::InvalidArgument(
                "global depolarizing has no per-qubit Kraus set".into(),
            ))
        }
    };
    KrausSet::new(ops)
}

/// Applies `sum_k E_k B E_k^†` to every 2×2 block addressed by qubit `q`.
fn apply_on_qubit(m: &mut ComplexMatrix, kraus: &KrausSet, q: usize) {
    let dim = m.rows();
    let bit = 1usize << q;
    let data = m.as_mut_slice();
    for i0 in (0..dim).filter(|i| i & bit == 0) {
        for j0 in (0..dim).filter(|j| j & bit == 0) {
            let rows = [i0, i0 | bit];
            let cols = [j0, j0 | bit];
            let mut block = [[ZERO; 2]; 2];
            for a in 0..2 {
                for c in 0..2 {
                    block[a][c] = data[rows[a] * dim + cols[c]];
                }
            }
            let mut out = [[ZERO; 2]; 2];
            for e in kraus.operators() {
                // (E B)
                let mut eb = [[ZERO; 2]; 2];
                for a in 0..2 {
                    for c in 0..2 {
                        eb[a][c] = e[a][0] * block[0][c] + e[a][1] * block[1][c];
                    }
                }
                for a in 0..2 {
                    for c in 0..2 {
                        out[a][c] += eb[a][0] * e[c][0].conj() + eb[a][1] * e[c][1].conj();
                    }
                }
            }
            for a in 0..2 {
                for c in 0..2 {
                    data[rows[a] * dim + cols[c]] = out[a][c];
                }
            }
        }
    }
}

pub fn apply_local(rho: &DensityMatrix, spec: &NoiseSpec) -> Result<DensityMatrix> {
    let order: Vec<usize> = (0..rho.n_qubits()).collect();
    apply_local_in_order(rho, spec, &order)
}

/// Same channel, visiting qubits in the given order.
pub fn apply_local_in_order(
    rho: &DensityMatrix,
    spec: &NoiseSpec,
    order: &[usize],
) -> Result<DensityMatrix> {
    check_full(rho.n_qubits())?;
    let kraus = kraus_for(spec)?;
    let n = rho.n_qubits();
    let mut seen = vec![false; n];
    for &q in order {
        if q >= n || std::mem::replace(&mut seen[q], true) {
            return Err(QfiError::InvalidArgument(format!(
                "qubit order {order:?} is not a permutation of 0..{n}"
            )));
        }
    }
    if order.len() != n {
        return Err(QfiError::InvalidArgument(format!(
            "qubit order has {} entries for {n} qubits",
            order.len()
        )));
    }
    let mut m = rho.matrix().clone();
    if spec.p > 0.0 {
        for &q in order {
            apply_on_qubit(&mut m, &kraus, q);
        }
    }
    DensityMatrix::new(n, m)
}

/// `(1 - p) rho + p I / 2^N`.
pub fn apply_global_depolarizing(rho: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    check_strength(p)?;
    let d = rho.dim();
    let m = rho
        .matrix()
        .scale_real(1.0 - p)
        .shift_diagonal(p / d as f64)?;
    DensityMatrix::new(rho.n_qubits(), m)
}

pub fn apply_noise(rho: &DensityMatrix, spec: &NoiseSpec) -> Result<DensityMatrix> {
    match spec.kind {
        NoiseKind::GlobalDepolarizing => apply_global_depolarizing(rho, spec.p),
        _ => apply_local(rho, spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{build_probe, density_from_pure, embed_full, ProbeKind, ProbeSpec};

    fn ghz_rho(n: usize) -> DensityMatrix {
        let psi = build_probe(&ProbeSpec::new(ProbeKind::Ghz, n)).unwrap();
        density_from_pure(&embed_full(&psi).unwrap()).unwrap()
    }

    #[test]
    fn completeness() {
        for kind in [NoiseKind::PhaseDamping, NoiseKind::AmplitudeDamping] {
            for p in [0.0, 0.3, 1.0] {
                let k = kraus_for(&NoiseSpec::new(kind, p).unwrap()).unwrap();
                assert!(k.completeness_deviation() <= 1e-15);
            }
        }
        let bad = vec![[[ONE, ZERO], [ZERO, ONE]], [[ONE, ZERO], [ZERO, ZERO]]];
        assert!(KrausSet::new(bad).is_err());
    }

    #[test]
    fn full_decay_operators() {
        let k = kraus_for(&NoiseSpec::new(NoiseKind::AmplitudeDamping, 1.0).unwrap()).unwrap();
        let ops = k.operators();
        assert_eq!(ops[0], [[ONE, ZERO], [ZERO, ZERO]]);
        assert_eq!(ops[1], [[ZERO, ONE], [ZERO, ZERO]]);
    }

    #[test]
    fn rejects_global_and_bad_strength() {
        assert!(kraus_for(&NoiseSpec {
            kind: NoiseKind::GlobalDepolarizing,
            p: 0.1
        })
        .is_err());
        assert!(NoiseSpec::new(NoiseKind::PhaseDamping, 1.5).is_err());
        assert!(NoiseSpec::new(NoiseKind::PhaseDamping, -0.1).is_err());
        assert!(apply_global_depolarizing(&ghz_rho(2), f64::NAN).is_err());
    }

    #[test]
    fn zero_strength_is_identity() {
        let rho = ghz_rho(3);
        for kind in [NoiseKind::PhaseDamping, NoiseKind::AmplitudeDamping] {
            let out = apply_local(&rho, &NoiseSpec::new(kind, 0.0).unwrap()).unwrap();
            assert_eq!(out.matrix(), rho.matrix());
        }
        let out = apply_global_depolarizing(&rho, 0.0).unwrap();
        assert_eq!(out.matrix(), rho.matrix());
    }

    #[test]
    fn full_relaxation() {
        let out = apply_local(
            &ghz_rho(3),
            &NoiseSpec::new(NoiseKind::AmplitudeDamping, 1.0).unwrap(),
        )
        .unwrap();
        let mut target = ComplexMatrix::zeros(8, 8);
        target.as_mut_slice()[0] = ONE;
        assert!(out.matrix().max_abs_diff(&target) < 1e-15);
    }

    #[test]
    fn ghz_dephasing_corners() {
        let p = 0.3;
        let rho = ghz_rho(2);
        let out = apply_local(&rho, &NoiseSpec::new(NoiseKind::PhaseDamping, p).unwrap()).unwrap();
        let m = out.matrix();
        assert!((m[(0, 3)] - rho.matrix()[(0, 3)] * (1.0 - p) * (1.0 - p)).norm() < 1e-15);
        assert!((m[(3, 0)] - rho.matrix()[(3, 0)] * (1.0 - p) * (1.0 - p)).norm() < 1e-15);
        for i in 0..4 {
            assert!((m[(i, i)] - rho.matrix()[(i, i)]).norm() < 1e-15);
        }
    }

    #[test]
    fn depolarizing_endpoints() {
        let out = apply_global_depolarizing(&ghz_rho(3), 1.0).unwrap();
        let mixed = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(out.matrix().max_abs_diff(mixed.matrix()) < 1e-15);
    }

    #[test]
    fn order_independence() {
        let rho = ghz_rho(4);
        let spec = NoiseSpec::new(NoiseKind::AmplitudeDamping, 0.37).unwrap();
        let a = apply_local(&rho, &spec).unwrap();
        let b = apply_local_in_order(&rho, &spec, &[2, 0, 3, 1]).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-12);
        assert!(apply_local_in_order(&rho, &spec, &[0, 0, 1, 2]).is_err());
        assert!(apply_local_in_order(&rho, &spec, &[0, 1]).is_err());
    }
}
