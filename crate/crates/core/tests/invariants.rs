use dicke_qfi::noise::{apply_local, apply_local_in_order, apply_noise, NoiseKind, NoiseSpec};
use dicke_qfi::numerics::{hermitian_eigen, ComplexMatrix, SweepOrder, C64};
use dicke_qfi::operators::{build_hamiltonian, j_along, Basis, Direction, HamiltonianSpec};
use dicke_qfi::qfi::{classical_fi, qfi_mixed, qfi_mixed_with, PovmElement};
use dicke_qfi::states::{
    density_from_pure, embed_full, rotate_sym, unrotate_sym, DensityMatrix, SymVector,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_density(n: usize, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = 1 << n;
    let a = ComplexMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let rho = a.matmul(&a.dagger()).unwrap();
    let tr = rho.trace().re;
    DensityMatrix::new(n, rho.scale_real(1.0 / tr).symmetrized()).unwrap()
}

fn random_sym(n: usize, seed: u64) -> SymVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps = (0..=n)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    SymVector::normalized(n, amps).unwrap()
}

fn noise_kind() -> impl Strategy<Value = NoiseKind> {
    prop_oneof![
        Just(NoiseKind::PhaseDamping),
        Just(NoiseKind::AmplitudeDamping),
        Just(NoiseKind::GlobalDepolarizing),
    ]
}

fn axis() -> impl Strategy<Value = Direction> {
    (0.0..std::f64::consts::PI, 0.0..std::f64::consts::TAU).prop_map(|(t, p)| Direction::new(t, p))
}

/// Conjugation by the swap of qubits `a` and `b`.
fn swap_qubits(m: &ComplexMatrix, a: usize, b: usize) -> ComplexMatrix {
    let perm = |i: usize| {
        let (ba, bb) = ((i >> a) & 1, (i >> b) & 1);
        let cleared = i & !(1 << a) & !(1 << b);
        cleared | (ba << b) | (bb << a)
    };
    ComplexMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(perm(i), perm(j))])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn channels_output_valid_states(seed in any::<u64>(), kind in noise_kind(), p in 0.0..=1.0f64) {
        let rho = random_density(3, seed);
        let out = apply_noise(&rho, &NoiseSpec::new(kind, p).unwrap()).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(out.matrix().hermitian_deviation() < 1e-12);
        let eig = hermitian_eigen(out.matrix()).unwrap();
        prop_assert!(eig.eigenvalues[0] >= -1e-10);
    }

    #[test]
    fn local_channels_keep_permutation_symmetry(seed in any::<u64>(), p in 0.0..=1.0f64, amplitude in any::<bool>()) {
        let kind = if amplitude { NoiseKind::AmplitudeDamping } else { NoiseKind::PhaseDamping };
        let rho = density_from_pure(&embed_full(&random_sym(4, seed)).unwrap()).unwrap();
        let out = apply_local(&rho, &NoiseSpec::new(kind, p).unwrap()).unwrap();
        for (a, b) in [(0, 1), (1, 3), (0, 2)] {
            prop_assert!(swap_qubits(out.matrix(), a, b).max_abs_diff(out.matrix()) < 1e-12);
        }
    }

    #[test]
    fn qubit_order_is_irrelevant(seed in any::<u64>(), p in 0.0..=1.0f64, order in Just(vec![0usize, 1, 2]).prop_shuffle()) {
        let rho = random_density(3, seed);
        for kind in [NoiseKind::AmplitudeDamping, NoiseKind::PhaseDamping] {
            let spec = NoiseSpec::new(kind, p).unwrap();
            let a = apply_local(&rho, &spec).unwrap();
            let b = apply_local_in_order(&rho, &spec, &order).unwrap();
            prop_assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-12);
        }
    }

    #[test]
    fn qfi_is_convex(s1 in any::<u64>(), s2 in any::<u64>(), q in 0.0..=1.0f64, ax in axis()) {
        let n = 3;
        let a = density_from_pure(&embed_full(&random_sym(n, s1)).unwrap()).unwrap();
        let b = density_from_pure(&embed_full(&random_sym(n, s2)).unwrap()).unwrap();
        let mix = a.matrix().scale_real(q).add(&b.matrix().scale_real(1.0 - q)).unwrap();
        let mix = DensityMatrix::new(n, mix).unwrap();
        let h = j_along(n, ax, Basis::Full).unwrap();
        let f = |r: &DensityMatrix| qfi_mixed(r, &h).unwrap().value;
        prop_assert!(f(&mix) <= q * f(&a) + (1.0 - q) * f(&b) + 1e-9);
    }

    #[test]
    fn measurements_never_beat_qfi(seed in any::<u64>(), basis_seed in any::<u64>(), ax in axis(), theta in 0.0..1.0f64) {
        let n = 2;
        let rho = random_density(n, seed);
        let h = j_along(n, ax, Basis::Full).unwrap();
        let basis = hermitian_eigen(&random_density(n, basis_seed).matrix().clone()).unwrap();
        let povm: Vec<_> = (0..4).map(|i| PovmElement::projector(&basis.eigenvector(i))).collect();
        let cfi = classical_fi(&rho, &h, &povm, theta).unwrap();
        prop_assert!(cfi <= qfi_mixed(&rho, &h).unwrap().value + 1e-8);
    }

    #[test]
    fn sweep_order_does_not_matter(seed in any::<u64>(), p in 0.0..=1.0f64, r in 1u8..=4) {
        // Depolarized symmetric states have highly degenerate spectra.
        let n = 3;
        let rho = density_from_pure(&embed_full(&random_sym(n, seed)).unwrap()).unwrap();
        let rho = apply_noise(&rho, &NoiseSpec::new(NoiseKind::GlobalDepolarizing, p).unwrap()).unwrap();
        let h = build_hamiltonian(&HamiltonianSpec::two_body(r, n).with_basis(Basis::Full)).unwrap();
        let a = qfi_mixed_with(&rho, &h, SweepOrder::RowCyclic).unwrap().value;
        let b = qfi_mixed_with(&rho, &h, SweepOrder::Reverse).unwrap().value;
        prop_assert!((a - b).abs() < 1e-9 * (1.0 + a));
    }

    #[test]
    fn rotation_round_trip(seed in any::<u64>(), ax in axis()) {
        let psi = random_sym(6, seed);
        let back = unrotate_sym(&rotate_sym(&psi, ax).unwrap(), ax).unwrap();
        let dev = psi.amplitudes().iter().zip(back.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(dev < 1e-10);
    }

    #[test]
    fn spectrum_ignores_axis(ax in axis(), r in 1u8..=4, n in 2usize..=7) {
        let at = |d: Direction| {
            build_hamiltonian(&HamiltonianSpec::two_body(r, n).with_axis(d)).unwrap().eigenvalues().unwrap().to_vec()
        };
        for (x, y) in at(ax).iter().zip(at(Direction::Z)) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }
}
