//! Scalar diagnostics of Fock-space states: logarithmic negativity, l1
//! coherence, mean energy, purity, trace distance.

use crate::hilbert::{self, TruncationSpec};
use crate::{CMatrix, Result};

/// `E_N = ln(1 + 2 sum |negative eigenvalues of rho^{T_2}|)`, clamped to 0
/// when no eigenvalue lies below `-1e-10`.
pub fn log_negativity_fock(rho: &CMatrix, trunc: &TruncationSpec) -> f64 {
    let pt = hilbert::partial_transpose(rho, 2, trunc);
    let eig = hilbert::hermitian_eigenvalues(&pt);
    let neg: f64 = eig.iter().filter(|&&e| e < -1e-10).map(|e| -e).sum();
    if neg == 0.0 {
        0.0
    } else {
        (1.0 + 2.0 * neg).ln()
    }
}

/// `sum_{i != j} |rho_ij|` in the fixed Fock product basis (`n2` fastest).
pub fn l1_coherence(rho: &CMatrix) -> f64 {
    let d = rho.nrows();
    let mut sum = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                sum += rho[(i, j)].norm();
            }
        }
    }
    sum
}

/// `Tr(rho H(Omega, k))`.
pub fn mean_energy(rho: &CMatrix, omega: f64, k: f64, trunc: &TruncationSpec) -> f64 {
    let h = hilbert::system_hamiltonian(omega, k, trunc);
    (rho * h).trace().re
}

/// `Tr(rho^2)`.
pub fn purity(rho: &CMatrix) -> f64 {
    let mut sum = 0.0;
    let d = rho.nrows();
    // Tr(A A) for Hermitian A = sum |A_ij|^2
    for i in 0..d {
        for j in 0..d {
            sum += (rho[(i, j)] * rho[(j, i)]).re;
        }
    }
    sum
}

/// `(1/2) || rho_a - rho_b ||_1` via the eigenvalues of the Hermitian
/// difference.
pub fn trace_distance(rho_a: &CMatrix, rho_b: &CMatrix) -> Result<f64> {
    let diff = hilbert::hermitize(&(rho_a - rho_b));
    let eig = hilbert::hermitian_eigenvalues(&diff);
    Ok(0.5 * eig.iter().map(|e| e.abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{prepare_state, StateKind};
    use crate::{CVector, C64};
    use approx::assert_relative_eq;

    fn trunc(n: usize) -> TruncationSpec {
        TruncationSpec::new(n).unwrap()
    }

    #[test]
    fn product_state_has_zero_negativity() {
        let t = trunc(8);
        let ket = prepare_state(
            &StateKind::Coherent {
                alpha1: (0.4, 0.1),
                alpha2: (-0.2, 0.3),
            },
            &t,
        )
        .unwrap();
        assert_eq!(log_negativity_fock(&ket.to_density(), &t), 0.0);
    }

    #[test]
    fn tmsv_negativity_matches_gaussian_value() {
        // Gaussian-formula oracle: E_N(TMSV(r)) = 2r, truncation-limited
        let t = trunc(12);
        let ket = prepare_state(&StateKind::TwoModeSqueezed { r: 0.3 }, &t).unwrap();
        let en = log_negativity_fock(&ket.to_density(), &t);
        assert!((en - 0.6).abs() < 1e-3, "E_N = {en}");
    }

    #[test]
    fn bell_state_negativity_is_ln2() {
        let t = trunc(2);
        let s = 1.0 / 2.0f64.sqrt();
        let mut bell = CVector::zeros(t.dim());
        bell[t.index(1, 0)] = C64::new(s, 0.0);
        bell[t.index(0, 1)] = C64::new(s, 0.0);
        let en = log_negativity_fock(&(&bell * bell.adjoint()), &t);
        assert_relative_eq!(en, 2.0f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn coherence_examples() {
        let t = trunc(3);
        // diagonal state
        let mut diag = CMatrix::zeros(t.dim(), t.dim());
        diag[(0, 0)] = C64::new(0.5, 0.0);
        diag[(5, 5)] = C64::new(0.5, 0.0);
        assert_eq!(l1_coherence(&diag), 0.0);
        // (|0> + |1>)/sqrt(2) on mode 1, vacuum on mode 2
        let s = 1.0 / 2.0f64.sqrt();
        let mut plus = CVector::zeros(t.dim());
        plus[t.index(0, 0)] = C64::new(s, 0.0);
        plus[t.index(1, 0)] = C64::new(s, 0.0);
        assert_relative_eq!(
            l1_coherence(&(&plus * plus.adjoint())),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn vacuum_energy_and_purity() {
        let t = trunc(3);
        let vac = prepare_state(&StateKind::Fock { n1: 0, n2: 0 }, &t).unwrap();
        let rho = vac.to_density();
        assert_relative_eq!(mean_energy(&rho, 1.0, 0.0, &t), 0.0, epsilon = 1e-14);
        assert_relative_eq!(purity(&rho), 1.0, epsilon = 1e-14);
        // with control, <00|H|00> = 2k
        assert_relative_eq!(mean_energy(&rho, 1.0, 0.25, &t), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn trace_distance_identities_and_metric() {
        let t = trunc(2);
        let states: Vec<CMatrix> = [
            StateKind::Fock { n1: 0, n2: 0 },
            StateKind::Fock { n1: 1, n2: 1 },
            StateKind::Coherent {
                alpha1: (0.3, 0.0),
                alpha2: (0.0, 0.0),
            },
            StateKind::TwoModeSqueezed { r: 0.2 },
        ]
        .iter()
        .map(|k| prepare_state(k, &trunc(6)).unwrap().to_density())
        .collect();
        let _ = t;
        assert_eq!(trace_distance(&states[0], &states[0]).unwrap(), 0.0);
        // orthogonal pure states are at distance 1
        assert_relative_eq!(
            trace_distance(&states[0], &states[1]).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        // triangle inequality on all sampled triples
        for a in &states {
            for b in &states {
                for c in &states {
                    let ab = trace_distance(a, b).unwrap();
                    let bc = trace_distance(b, c).unwrap();
                    let ac = trace_distance(a, c).unwrap();
                    assert!(ac <= ab + bc + 1e-9);
                }
            }
        }
    }

    #[test]
    fn purity_of_prepared_states_is_one() {
        let t = trunc(10);
        for kind in [
            StateKind::TwoModeSqueezed { r: 0.4 },
            StateKind::Cat {
                alpha: (0.8, 0.0),
                parity: 0,
            },
        ] {
            let rho = prepare_state(&kind, &t).unwrap().to_density();
            let p = purity(&rho);
            assert!((p - 1.0).abs() < 1e-10 && p <= 1.0 + 1e-8);
        }
    }
}
