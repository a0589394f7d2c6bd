//! Cyclic complex Jacobi eigensolver for dense Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies a real Jacobi rotation, so the combined transform
//! `G = D R` is unitary and the accumulated eigenvector matrix stays orthonormal
//! to working precision regardless of clustering in the spectrum.

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{QfiError, Result};

/// Inputs whose anti-Hermitian part exceeds this (scaled by `max(1, max|a|)`) are rejected.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;
/// Stop once every off-diagonal magnitude is below this times `||a||_F`.
pub const CONVERGENCE_FACTOR: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;

/// Order in which off-diagonal pivots are visited within a sweep.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SweepOrder {
    /// `(0,1), (0,2), ..., (1,2), ...`
    #[default]
    RowCyclic,
    /// Pivots visited from the bottom-right corner back to the top-left.
    Reverse,
}

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `i` is the eigenvector for `eigenvalues[i]`.
    pub eigenvectors: ComplexMatrix,
    pub sweeps: usize,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, i: usize) -> Vec<C64> {
        self.eigenvectors.column(i)
    }

    /// `V diag(f(lambda)) V^H`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let weights: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += v[(i, k)] * weights[k] * v[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| C64::new(l, 0.0))
    }

    /// Expresses `op` in the eigenbasis: `V^H op V`.
    pub fn to_eigenbasis(&self, op: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.eigenvectors
            .dagger()
            .matmul(&op.matmul(&self.eigenvectors)?)
    }

    /// Maps an eigenbasis matrix back to the computational basis: `V m V^H`.
    pub fn from_eigenbasis(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.eigenvectors
            .matmul(m)?
            .matmul(&self.eigenvectors.dagger())
    }
}

pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    hermitian_eigen_with(a, SweepOrder::RowCyclic)
}

pub fn hermitian_eigen_with(a: &ComplexMatrix, order: SweepOrder) -> Result<EigenDecomposition> {
    if !a.is_square() {
        return Err(QfiError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let deviation = a.hermitian_deviation();
    if deviation > HERMITIAN_TOLERANCE * a.max_abs().max(1.0) {
        return Err(QfiError::NotHermitian { deviation });
    }
    let n = a.rows();
    let m = a.symmetrized();
    let threshold = CONVERGENCE_FACTOR * m.frobenius_norm();

    // Rows that never couple form independent blocks; each is diagonalized on its own.
    let mut eigenvalues = Vec::with_capacity(n);
    let mut columns: Vec<Vec<(usize, C64)>> = Vec::with_capacity(n);
    let mut sweeps = 0;
    for block in coupled_blocks(&m) {
        let sub = ComplexMatrix::from_fn(block.len(), block.len(), |i, j| m[(block[i], block[j])]);
        let (values, vectors, used) = jacobi(sub, order, threshold)?;
        sweeps = sweeps.max(used);
        for (c, value) in values.into_iter().enumerate() {
            eigenvalues.push(value);
            columns.push(
                block
                    .iter()
                    .enumerate()
                    .map(|(r, &row)| (row, vectors[(r, c)]))
                    .collect(),
            );
        }
    }

    let mut order_idx: Vec<usize> = (0..n).collect();
    order_idx.sort_by(|&i, &j| eigenvalues[i].total_cmp(&eigenvalues[j]).then(i.cmp(&j)));
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (c, &k) in order_idx.iter().enumerate() {
        for &(row, value) in &columns[k] {
            eigenvectors[(row, c)] = value;
        }
    }
    Ok(EigenDecomposition {
        eigenvalues: order_idx.iter().map(|&i| eigenvalues[i]).collect(),
        eigenvectors,
        sweeps,
    })
}

/// Connected components of the graph with an edge wherever `m[i][j] != 0`, each sorted.
fn coupled_blocks(m: &ComplexMatrix) -> Vec<Vec<usize>> {
    let n = m.rows();
    let mut label = vec![usize::MAX; n];
    let mut blocks = Vec::new();
    for seed in 0..n {
        if label[seed] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        label[seed] = id;
        let mut members = vec![seed];
        let mut cursor = 0;
        while cursor < members.len() {
            let i = members[cursor];
            cursor += 1;
            for (j, value) in m.row(i).iter().enumerate() {
                if label[j] == usize::MAX && *value != ZERO {
                    label[j] = id;
                    members.push(j);
                }
            }
        }
        members.sort_unstable();
        blocks.push(members);
    }
    blocks
}

/// Cyclic Jacobi on one block; returns the diagonal, the rotations and the sweep count.
fn jacobi(
    mut m: ComplexMatrix,
    order: SweepOrder,
    threshold: f64,
) -> Result<(Vec<f64>, ComplexMatrix, usize)> {
    let n = m.rows();
    let mut v = ComplexMatrix::identity(n);
    let pivots: Vec<(usize, usize)> = match order {
        SweepOrder::RowCyclic => (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .collect(),
        SweepOrder::Reverse => (0..n)
            .rev()
            .flat_map(|p| (p + 1..n).rev().map(move |q| (p, q)))
            .collect(),
    };

    let mut sweeps = 0;
    loop {
        let off = max_off_diagonal(&m);
        if off <= threshold || n < 2 {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(QfiError::NoConvergence {
                sweeps,
                off_diagonal: off,
            });
        }
        for &(p, q) in &pivots {
            if m[(p, q)].norm() > threshold {
                rotate(&mut m, &mut v, p, q);
            }
        }
        sweeps += 1;
    }
    let diag = (0..n).map(|i| m[(i, i)].re).collect();
    Ok((diag, v, sweeps))
}

fn max_off_diagonal(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    let mut off = 0.0_f64;
    for i in 0..n {
        for j in i + 1..n {
            off = off.max(m[(i, j)].norm());
        }
    }
    off
}

/// Annihilates `m[p][q]` with `m <- G^H m G`, `v <- v G`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let n = m.rows();
    let apq = m[(p, q)];
    let g = apq.norm();
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;

    // D = diag(1, d) makes the pivot real and positive.
    let d = (apq / g).conj();
    let tau = (aqq - app) / (2.0 * g);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = -d * s;
    let g_qq = d * c;

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        let new_kp = akp * g_pp + akq * g_qp;
        let new_kq = akp * g_pq + akq * g_qq;
        m[(k, p)] = new_kp;
        m[(k, q)] = new_kq;
        m[(p, k)] = new_kp.conj();
        m[(q, k)] = new_kq.conj();
    }
    m[(p, p)] = C64::new(app - t * g, 0.0);
    m[(q, q)] = C64::new(aqq + t * g, 0.0);
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Matrix exponential `exp(-i t A)` of a Hermitian matrix via its eigendecomposition.
pub fn unitary_evolution(a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(a)?;
    Ok(eig.reconstruct_with(|l| C64::from_polar(1.0, -l * t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::matrix::{I, ONE};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
        let a = ComplexMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        a.symmetrized()
    }

    fn check_invariants(a: &ComplexMatrix, eig: &EigenDecomposition) {
        let n = a.rows();
        let v = &eig.eigenvectors;
        let vhv = v.dagger().matmul(v).unwrap();
        assert!(vhv.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-10);
        for w in eig.eigenvalues.windows(2) {
            assert!(w[0] <= w[1]);
        }
        let scale = a.frobenius_norm().max(1.0);
        for i in 0..n {
            let col = eig.eigenvector(i);
            let av = a.mul_vec(&col).unwrap();
            for (x, y) in av.iter().zip(&col) {
                assert!((x - y * eig.eigenvalues[i]).norm() < 1e-9 * scale);
            }
        }
        assert!(eig.reconstruct().max_abs_diff(&a.symmetrized()) < 1e-9 * scale);
        let tr = a.trace().re;
        let sum: f64 = eig.eigenvalues.iter().sum();
        assert!((tr - sum).abs() < 1e-10 * (1.0 + tr.abs()));
    }

    #[test]
    fn diagonal_input() {
        let a = ComplexMatrix::from_diagonal(&[3.0, 1.0, 2.0]);
        let eig = hermitian_eigen(&a).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 2.0, 3.0]);
        assert_eq!(eig.eigenvector(0), vec![ZERO, ONE, ZERO]);
        assert_eq!(eig.eigenvector(1), vec![ZERO, ZERO, ONE]);
        assert_eq!(eig.eigenvector(2), vec![ONE, ZERO, ZERO]);
        assert_eq!(eig.sweeps, 0);
    }

    #[test]
    fn pauli_spectra() {
        let sx = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let eig = hermitian_eigen(&sx).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-14);
        check_invariants(&sx, &eig);

        let sy = ComplexMatrix::from_vec(2, 2, vec![ZERO, -I, I, ZERO]).unwrap();
        let eig = hermitian_eigen(&sy).unwrap();
        check_invariants(&sy, &eig);
    }

    #[test]
    fn random_hermitian_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &n in &[1, 2, 3, 7, 16, 33] {
            let a = random_hermitian(n, &mut rng);
            for order in [SweepOrder::RowCyclic, SweepOrder::Reverse] {
                let eig = hermitian_eigen_with(&a, order).unwrap();
                check_invariants(&a, &eig);
            }
        }
    }

    #[test]
    fn degenerate_spectrum() {
        // diag(1,1,2,2,2) conjugated by a random unitary.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = hermitian_eigen(&random_hermitian(5, &mut rng))
            .unwrap()
            .eigenvectors;
        let d = ComplexMatrix::from_diagonal(&[1.0, 1.0, 2.0, 2.0, 2.0]);
        let a = u.matmul(&d).unwrap().matmul(&u.dagger()).unwrap();
        let eig = hermitian_eigen(&a).unwrap();
        check_invariants(&a, &eig);
        for (x, y) in eig.eigenvalues.iter().zip([1.0, 1.0, 2.0, 2.0, 2.0]) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn interleaved_blocks() {
        // Two 2x2 blocks on rows {0,2} and {1,3} plus an isolated row 4.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_hermitian(2, &mut rng);
        let b = random_hermitian(2, &mut rng);
        let mut m = ComplexMatrix::zeros(5, 5);
        for (blk, rows) in [(&a, [0, 2]), (&b, [1, 3])] {
            for i in 0..2 {
                for j in 0..2 {
                    m[(rows[i], rows[j])] = blk[(i, j)];
                }
            }
        }
        m[(4, 4)] = C64::new(-3.0, 0.0);
        assert_eq!(coupled_blocks(&m), vec![vec![0, 2], vec![1, 3], vec![4]]);
        let eig = hermitian_eigen(&m).unwrap();
        check_invariants(&m, &eig);
        let mut want: Vec<f64> = hermitian_eigen(&a).unwrap().eigenvalues;
        want.extend(hermitian_eigen(&b).unwrap().eigenvalues);
        want.push(-3.0);
        want.sort_by(f64::total_cmp);
        for (x, y) in eig.eigenvalues.iter().zip(&want) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn spectrum_is_unitarily_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..5 {
            let a = random_hermitian(6, &mut rng);
            let u = hermitian_eigen(&random_hermitian(6, &mut rng))
                .unwrap()
                .eigenvectors;
            let b = u.matmul(&a).unwrap().matmul(&u.dagger()).unwrap();
            let ea = hermitian_eigen(&a).unwrap().eigenvalues;
            let eb = hermitian_eigen(&b).unwrap().eigenvalues;
            for (x, y) in ea.iter().zip(&eb) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            hermitian_eigen(&ComplexMatrix::zeros(2, 3)),
            Err(QfiError::NotSquare { .. })
        ));
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(
            hermitian_eigen(&a),
            Err(QfiError::NotHermitian { .. })
        ));
    }

    #[test]
    fn tiny_asymmetry_is_symmetrized() {
        let mut a = ComplexMatrix::from_real_rows(&[&[1.0, 0.5], &[0.5, 2.0]]).unwrap();
        a[(0, 1)] += C64::new(1e-12, 0.0);
        let eig = hermitian_eigen(&a).unwrap();
        check_invariants(&a, &eig);
    }

    #[test]
    fn evolution_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = random_hermitian(4, &mut rng);
        let u = unitary_evolution(&h, 0.7).unwrap();
        let uu = u.dagger().matmul(&u).unwrap();
        assert!(uu.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
    }
}
