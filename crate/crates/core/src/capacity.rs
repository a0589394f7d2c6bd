//! Size limits for the two state representations.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{QfiError, Result};

pub const DEFAULT_FULL_SPACE_CAP: usize = 12;
/// Binomial coefficients stay exact in `u64` up to here.
pub const SYMMETRIC_CAP: usize = 64;

static FULL_SPACE_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_FULL_SPACE_CAP);

pub fn full_space_cap() -> usize {
    FULL_SPACE_CAP.load(Ordering::Relaxed)
}

/// Process-wide override of the qubit limit for `2^N`-dimensional objects.
pub fn set_full_space_cap(cap: usize) {
    FULL_SPACE_CAP.store(cap, Ordering::Relaxed);
}

pub fn check_full(n_qubits: usize) -> Result<()> {
    let cap = full_space_cap();
    if n_qubits > cap {
        return Err(QfiError::Capacity {
            n_qubits,
            cap,
            basis: "full-space",
        });
    }
    Ok(())
}

pub fn check_symmetric(n_qubits: usize) -> Result<()> {
    if n_qubits > SYMMETRIC_CAP {
        return Err(QfiError::Capacity {
            n_qubits,
            cap: SYMMETRIC_CAP,
            basis: "symmetric-subspace",
        });
    }
    Ok(())
}

/// `C(n, k)` as an exact integer, returned as `f64`.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(8, 0), 1.0);
        assert_eq!(binomial(3, 5), 0.0);
        assert_eq!(binomial(64, 32), 1_832_624_140_942_590_534u64 as f64);
        // Pascal's rule up to the cap.
        for n in 1..=SYMMETRIC_CAP {
            for k in 1..n {
                let lhs = binomial(n, k);
                let rhs = binomial(n - 1, k - 1) + binomial(n - 1, k);
                assert!((lhs - rhs).abs() <= 1e-15 * lhs);
            }
        }
    }

    #[test]
    fn symmetric_cap() {
        assert!(check_symmetric(64).is_ok());
        assert!(matches!(
            check_symmetric(65),
            Err(QfiError::Capacity { cap: 64, .. })
        ));
    }
}
