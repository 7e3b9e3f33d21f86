//! Truncated two-mode Fock-space algebra: ladder operators, Hamiltonians,
//! the collective Lindblad operator, initial-state preparation and
//! truncation diagnostics.
//!
//! Basis ordering is fixed globally: `|n1, n2>` with `n2` fastest-varying,
//! i.e. `index = n1 * (N + 1) + n2` for `levels_per_mode = N`. Units are
//! `hbar = M = 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{CMatrix, CVector, Error, Result, C64};

pub const LEAKAGE_WARN: f64 = 1e-6;
pub const LEAKAGE_ERROR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TruncationSpec {
    /// Each mode spans occupations `0..=levels_per_mode`.
    pub levels_per_mode: usize,
}

impl TruncationSpec {
    pub fn new(levels_per_mode: usize) -> Result<Self> {
        if levels_per_mode < 1 {
            return Err(Error::Config("levels_per_mode must be >= 1".into()));
        }
        Ok(Self { levels_per_mode })
    }

    /// Single-mode dimension `N + 1`.
    pub fn mode_dim(&self) -> usize {
        self.levels_per_mode + 1
    }

    /// Total dimension `(N + 1)^2`.
    pub fn dim(&self) -> usize {
        self.mode_dim() * self.mode_dim()
    }

    /// `(n1, n2) -> flat index`, `n2` fastest.
    pub fn index(&self, n1: usize, n2: usize) -> usize {
        debug_assert!(n1 < self.mode_dim() && n2 < self.mode_dim());
        n1 * self.mode_dim() + n2
    }

    /// Flat index `-> (n1, n2)`.
    pub fn occupations(&self, index: usize) -> (usize, usize) {
        (index / self.mode_dim(), index % self.mode_dim())
    }
}

/// Single-mode annihilation operator on `0..=N`: entries `sqrt(n)` at
/// `(n-1, n)`.
pub fn annihilation(levels: usize) -> CMatrix {
    let d = levels + 1;
    let mut a = CMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Annihilation operator of mode 1 or 2 embedded in the two-mode space.
pub fn mode_annihilation(mode: usize, trunc: &TruncationSpec) -> CMatrix {
    let a = annihilation(trunc.levels_per_mode);
    let id = CMatrix::identity(trunc.mode_dim(), trunc.mode_dim());
    match mode {
        1 => a.kronecker(&id),
        2 => id.kronecker(&a),
        _ => panic!("mode must be 1 or 2"),
    }
}

/// `x_j = (a_j + a_j^dag) / sqrt(2)`.
pub fn position_operator(mode: usize, trunc: &TruncationSpec) -> CMatrix {
    let a = mode_annihilation(mode, trunc);
    (&a + a.adjoint()) / Complex64::new(2.0f64.sqrt(), 0.0)
}

/// `p_j = i (a_j^dag - a_j) / sqrt(2)`.
pub fn momentum_operator(mode: usize, trunc: &TruncationSpec) -> CMatrix {
    let a = mode_annihilation(mode, trunc);
    (a.adjoint() - &a) * C64::new(0.0, 1.0 / 2.0f64.sqrt())
}

/// `H = Omega (a1^dag a1 + a2^dag a2) + k (a1 - a2 + a1^dag - a2^dag)^2`.
pub fn system_hamiltonian(omega: f64, k: f64, trunc: &TruncationSpec) -> CMatrix {
    let a1 = mode_annihilation(1, trunc);
    let a2 = mode_annihilation(2, trunc);
    let number = a1.adjoint() * &a1 + a2.adjoint() * &a2;
    let x = &a1 - &a2 + a1.adjoint() - a2.adjoint();
    let mut h = number * C64::new(omega, 0.0) + &x * &x * C64::new(k, 0.0);
    // enforce exact Hermiticity against floating-point drift in the products
    let hd = h.adjoint();
    h = (h + hd) * C64::new(0.5, 0.0);
    h
}

/// The collective Lindblad operator `L = a1 + a2`.
pub fn lindblad_operator(trunc: &TruncationSpec) -> CMatrix {
    mode_annihilation(1, trunc) + mode_annihilation(2, trunc)
}

/// Population in the edge layer `n1 = N` or `n2 = N`: the truncation-leakage
/// metric monitored on every state.
pub fn ket_leakage(amplitudes: &CVector, trunc: &TruncationSpec) -> f64 {
    let n = trunc.levels_per_mode;
    let mut leak = 0.0;
    for (i, amp) in amplitudes.iter().enumerate() {
        let (n1, n2) = trunc.occupations(i);
        if n1 == n || n2 == n {
            leak += amp.norm_sqr();
        }
    }
    leak
}

/// Same metric for a density matrix: sum of edge-layer diagonal populations.
pub fn rho_leakage(rho: &CMatrix, trunc: &TruncationSpec) -> f64 {
    let n = trunc.levels_per_mode;
    let mut leak = 0.0;
    for i in 0..trunc.dim() {
        let (n1, n2) = trunc.occupations(i);
        if n1 == n || n2 == n {
            leak += rho[(i, i)].re;
        }
    }
    leak
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateKind {
    Fock {
        n1: usize,
        n2: usize,
    },
    Coherent {
        alpha1: (f64, f64),
        alpha2: (f64, f64),
    },
    /// `|alpha> + e^{i pi parity} |-alpha>` on mode 1, vacuum on mode 2.
    Cat {
        alpha: (f64, f64),
        parity: u8,
    },
    TwoModeSqueezed {
        r: f64,
    },
}

#[derive(Debug, Clone)]
pub struct Ket {
    pub amplitudes: CVector,
    pub trunc: TruncationSpec,
}

impl Ket {
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn leakage(&self) -> f64 {
        ket_leakage(&self.amplitudes, &self.trunc)
    }

    pub fn to_density(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }
}

fn coherent_amplitudes(alpha: C64, levels: usize) -> CVector {
    let mut v = CVector::zeros(levels + 1);
    let mut amp = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..=levels {
        if n > 0 {
            amp *= alpha / (n as f64).sqrt();
        }
        v[n] = amp;
    }
    v
}

fn kron_vec(v1: &CVector, v2: &CVector) -> CVector {
    let mut out = CVector::zeros(v1.len() * v2.len());
    for (i, a) in v1.iter().enumerate() {
        for (j, b) in v2.iter().enumerate() {
            out[i * v2.len() + j] = a * b;
        }
    }
    out
}

/// exp(A) |v> by plain Taylor series; A is anti-Hermitian-bounded here so the
/// series converges rapidly at desk-scale truncations.
fn exp_apply(a: &CMatrix, v: &CVector) -> CVector {
    let mut out = v.clone();
    let mut term = v.clone();
    for k in 1..400 {
        term = a * &term / C64::new(k as f64, 0.0);
        out += &term;
        if term.norm() < 1e-16 * out.norm() {
            return out;
        }
    }
    out
}

fn raw_state(kind: &StateKind, trunc: &TruncationSpec) -> Result<CVector> {
    let md = trunc.mode_dim();
    match *kind {
        StateKind::Fock { n1, n2 } => {
            if n1 >= md || n2 >= md {
                return Err(Error::Config(format!(
                    "Fock occupation ({n1},{n2}) exceeds levels_per_mode = {}",
                    trunc.levels_per_mode
                )));
            }
            let mut v = CVector::zeros(trunc.dim());
            v[trunc.index(n1, n2)] = C64::new(1.0, 0.0);
            Ok(v)
        }
        StateKind::Coherent { alpha1, alpha2 } => {
            let v1 = coherent_amplitudes(C64::new(alpha1.0, alpha1.1), trunc.levels_per_mode);
            let v2 = coherent_amplitudes(C64::new(alpha2.0, alpha2.1), trunc.levels_per_mode);
            Ok(kron_vec(&v1, &v2))
        }
        StateKind::Cat { alpha, parity } => {
            let a = C64::new(alpha.0, alpha.1);
            let phase = C64::new(0.0, std::f64::consts::PI * parity as f64).exp();
            let plus = coherent_amplitudes(a, trunc.levels_per_mode);
            let minus = coherent_amplitudes(-a, trunc.levels_per_mode);
            let mode1 = plus + minus * phase;
            let mut vac = CVector::zeros(md);
            vac[0] = C64::new(1.0, 0.0);
            Ok(kron_vec(&mode1, &vac))
        }
        StateKind::TwoModeSqueezed { r } => {
            let a1 = mode_annihilation(1, trunc);
            let a2 = mode_annihilation(2, trunc);
            // generator -r (a1^dag a2^dag - a1 a2)
            let gen = (a1.adjoint() * a2.adjoint() - &a1 * &a2) * C64::new(-r, 0.0);
            let mut vac = CVector::zeros(trunc.dim());
            vac[0] = C64::new(1.0, 0.0);
            Ok(exp_apply(&gen, &vac))
        }
    }
}

/// Leakage-based hint for the truncation a state actually needs.
fn required_levels(kind: &StateKind, from: usize) -> Option<usize> {
    for n in (from + 1)..=64 {
        let trunc = TruncationSpec { levels_per_mode: n };
        if let Ok(v) = raw_state(kind, &trunc) {
            let v = &v / C64::new(v.norm(), 0.0);
            if ket_leakage(&v, &trunc) < LEAKAGE_WARN {
                return Some(n);
            }
        }
    }
    None
}

/// Builds and normalizes the requested state, enforcing the leakage policy:
/// warn above `1e-6`, hard error above `1e-3` (with the truncation that
/// would suffice, when one exists below N = 64).
pub fn prepare_state(kind: &StateKind, trunc: &TruncationSpec) -> Result<Ket> {
    let v = raw_state(kind, trunc)?;
    let norm = v.norm();
    if norm < 1e-12 {
        return Err(Error::Domain(
            "prepare_state: state has zero norm (odd cat at alpha = 0?)".into(),
        ));
    }
    let v = v / C64::new(norm, 0.0);
    let leak = ket_leakage(&v, trunc);
    if leak > LEAKAGE_ERROR {
        let required =
            required_levels(kind, trunc.levels_per_mode).unwrap_or(2 * trunc.levels_per_mode);
        return Err(Error::Truncation {
            levels: trunc.levels_per_mode,
            leakage: leak,
            required,
        });
    }
    if leak > LEAKAGE_WARN {
        eprintln!(
            "warning: truncation leakage {:.3e} at levels_per_mode = {} (threshold {:.0e})",
            leak, trunc.levels_per_mode, LEAKAGE_WARN
        );
    }
    Ok(Ket {
        amplitudes: v,
        trunc: *trunc,
    })
}

/// Partial transpose on the chosen mode: swaps that mode's bra/ket indices.
pub fn partial_transpose(rho: &CMatrix, mode: usize, trunc: &TruncationSpec) -> CMatrix {
    let d = trunc.dim();
    assert_eq!(rho.nrows(), d);
    let mut out = CMatrix::zeros(d, d);
    for i in 0..d {
        let (m1, m2) = trunc.occupations(i);
        for j in 0..d {
            let (n1, n2) = trunc.occupations(j);
            let (r, c) = match mode {
                1 => (trunc.index(n1, m2), trunc.index(m1, n2)),
                2 => (trunc.index(m1, n2), trunc.index(n1, m2)),
                _ => panic!("mode must be 1 or 2"),
            };
            out[(r, c)] = rho[(i, j)];
        }
    }
    out
}

/// Eigenvalues of a Hermitian matrix, ascending, via the real symmetric
/// embedding `[[A, -B], [B, A]]` of `A + iB` (doubled spectrum). Uses an
/// in-crate Householder + implicit-shift QL solver; the nalgebra symmetric
/// solvers emit NaNs on some of our (highly degenerate) spectra.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let d = m.nrows();
    let mut big = nalgebra::DMatrix::<f64>::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            let v = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            big[(i, j)] = v.re;
            big[(i + d, j + d)] = v.re;
            big[(i, j + d)] = -v.im;
            big[(i + d, j)] = v.im;
        }
    }
    let (mut diag, mut off) = tridiagonalize_symmetric(&mut big);
    ql_implicit_shift(&mut diag, &mut off);
    diag.sort_by(|a, b| a.partial_cmp(b).unwrap());
    diag.into_iter().step_by(2).collect()
}

/// Householder reduction of a real symmetric matrix to tridiagonal form,
/// eigenvalues only. Destroys the input. Returns (diagonal, subdiagonal)
/// with the subdiagonal stored in positions 1..n.
fn tridiagonalize_symmetric(a: &mut nalgebra::DMatrix<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = a.nrows();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i;
        let mut h = 0.0;
        if l > 1 {
            let mut scale = 0.0;
            for k in 0..l {
                scale += a[(i, k)].abs();
            }
            if scale == 0.0 {
                e[i] = a[(i, l - 1)];
            } else {
                for k in 0..l {
                    a[(i, k)] /= scale;
                    h += a[(i, k)] * a[(i, k)];
                }
                let mut f = a[(i, l - 1)];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[(i, l - 1)] = f - g;
                f = 0.0;
                for j in 0..l {
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[(j, k)] * a[(i, k)];
                    }
                    for k in (j + 1)..l {
                        g += a[(k, j)] * a[(i, k)];
                    }
                    e[j] = g / h;
                    f += e[j] * a[(i, j)];
                }
                let hh = f / (h + h);
                for j in 0..l {
                    let fj = a[(i, j)];
                    let gj = e[j] - hh * fj;
                    e[j] = gj;
                    for k in 0..=j {
                        a[(j, k)] -= fj * e[k] + gj * a[(i, k)];
                    }
                }
            }
        } else {
            e[i] = a[(i, l - 1)];
        }
        let _ = h;
    }
    e[0] = 0.0;
    for i in 0..n {
        d[i] = a[(i, i)];
    }
    (d, e)
}

/// QL algorithm with implicit shifts on a symmetric tridiagonal matrix,
/// eigenvalues only; `e` is the subdiagonal in positions 1..n.
fn ql_implicit_shift(d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    if n <= 1 {
        return;
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 100 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0, 1.0);
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                f = (d[i] - g) * s + 2.0 * c * b;
                p = s * f;
                d[i + 1] = g + p;
                g = c * f - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// `(A + A^dag) / 2`, the symmetrization applied after integrator steps.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    let md = m.adjoint();
    (m + md) * C64::new(0.5, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn trunc(n: usize) -> TruncationSpec {
        TruncationSpec::new(n).unwrap()
    }

    #[test]
    fn index_round_trip() {
        let t = trunc(5);
        for i in 0..t.dim() {
            let (n1, n2) = t.occupations(i);
            assert_eq!(t.index(n1, n2), i);
        }
        assert_eq!(t.index(2, 3), 2 * 6 + 3); // n2 fastest
    }

    #[test]
    fn annihilation_two_level() {
        let a = annihilation(1);
        assert_eq!(a[(0, 1)], C64::new(1.0, 0.0));
        assert_eq!(a[(0, 0)], C64::new(0.0, 0.0));
        assert_eq!(a[(1, 0)], C64::new(0.0, 0.0));
        assert_eq!(a[(1, 1)], C64::new(0.0, 0.0));
    }

    #[test]
    fn number_operator_spectrum() {
        let n = 6;
        let a = annihilation(n);
        let num = a.adjoint() * &a;
        for k in 0..=n {
            assert_relative_eq!(num[(k, k)].re, k as f64);
        }
    }

    #[test]
    fn commutator_truncation_artifact() {
        // [a, a^dag] = 1 except the corner entry, which is -N
        let n = 5;
        let a = annihilation(n);
        let comm = &a * a.adjoint() - a.adjoint() * &a;
        for k in 0..n {
            assert_relative_eq!(comm[(k, k)].re, 1.0, epsilon = 1e-14);
        }
        assert_relative_eq!(comm[(n, n)].re, -(n as f64));
    }

    #[test]
    fn hamiltonian_free_spectrum_and_vacuum_energy() {
        let t = trunc(4);
        let h = system_hamiltonian(1.0, 0.0, &t);
        for i in 0..t.dim() {
            let (n1, n2) = t.occupations(i);
            assert_relative_eq!(h[(i, i)].re, (n1 + n2) as f64, epsilon = 1e-12);
        }
        // <00|H|00> = 2k from the a a^dag cross terms of the square
        for k in [0.3, 1.0, -0.7] {
            let h = system_hamiltonian(1.0, k, &t);
            assert_relative_eq!(h[(0, 0)].re, 2.0 * k, epsilon = 1e-12);
        }
    }

    #[test]
    fn hamiltonian_hermitian_and_swap_symmetric() {
        let t = trunc(4);
        let h = system_hamiltonian(1.0, 0.4, &t);
        assert!((&h - h.adjoint()).norm() < 1e-12);
        // swap modes 1 <-> 2: H invariant (X -> -X, X^2 unchanged)
        let d = t.dim();
        let mut swap = CMatrix::zeros(d, d);
        for i in 0..d {
            let (n1, n2) = t.occupations(i);
            swap[(t.index(n2, n1), i)] = C64::new(1.0, 0.0);
        }
        let swapped = &swap * &h * &swap;
        assert!((&swapped - &h).norm() < 1e-12);
    }

    #[test]
    fn lindblad_dark_and_bright_modes() {
        let t = trunc(3);
        let l = lindblad_operator(&t);
        let vac = prepare_state(&StateKind::Fock { n1: 0, n2: 0 }, &t).unwrap();
        assert!((&l * &vac.amplitudes).norm() < 1e-15);

        let s = 1.0 / 2.0f64.sqrt();
        let mut dark = CVector::zeros(t.dim());
        dark[t.index(1, 0)] = C64::new(s, 0.0);
        dark[t.index(0, 1)] = C64::new(-s, 0.0);
        assert!((&l * &dark).norm() < 1e-15);

        let mut bright = CVector::zeros(t.dim());
        bright[t.index(1, 0)] = C64::new(s, 0.0);
        bright[t.index(0, 1)] = C64::new(s, 0.0);
        let out = &l * &bright;
        assert_relative_eq!(out[t.index(0, 0)].re, 2.0f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!((out.norm_squared() - 2.0).abs(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn trivial_preparations() {
        let t = trunc(6);
        let tmsv0 = prepare_state(&StateKind::TwoModeSqueezed { r: 0.0 }, &t).unwrap();
        assert_relative_eq!(tmsv0.amplitudes[0].re, 1.0, epsilon = 1e-12);
        let coh0 = prepare_state(
            &StateKind::Coherent {
                alpha1: (0.0, 0.0),
                alpha2: (0.0, 0.0),
            },
            &t,
        )
        .unwrap();
        assert_relative_eq!(coh0.amplitudes[0].re, 1.0, epsilon = 1e-12);
        assert!((tmsv0.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn tmsv_matches_schmidt_form() {
        // amplitude on |n,n> proportional to tanh^n r / cosh r; this squeeze
        // convention gives the phase (-1)^n
        let t = trunc(12);
        let r = 0.5;
        let ket = prepare_state(&StateKind::TwoModeSqueezed { r }, &t).unwrap();
        let th = r.tanh();
        let ch = r.cosh();
        // boundary reflections at n = N decay like tanh^(2(N-n)); compare
        // well inside the interior
        for n in 0..=6 {
            let expected = (-th).powi(n as i32) / ch;
            let got = ket.amplitudes[t.index(n, n)];
            assert!((got.re - expected).abs() < 1e-8, "n = {n}");
            assert!(got.im.abs() < 1e-12);
        }
        // off-diagonal occupations vanish
        assert!(ket.amplitudes[t.index(1, 0)].norm() < 1e-12);
        assert!((ket.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn tmsv_fails_ppt() {
        let t = trunc(10);
        let ket = prepare_state(&StateKind::TwoModeSqueezed { r: 0.5 }, &t).unwrap();
        let pt = partial_transpose(&ket.to_density(), 2, &t);
        let eig = hermitian_eigenvalues(&pt);
        let min = eig[0];
        assert!(min < -1e-3, "min eigenvalue {min}");
    }

    #[test]
    fn partial_transpose_properties() {
        let t = trunc(2);
        let d = t.dim();
        // pseudo-random Hermitian rho
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((seed >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        let mut rho = CMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                rho[(i, j)] = C64::new(next(), next());
            }
        }
        let rho = hermitize(&rho);
        // involution, bit-exact
        let twice = partial_transpose(&partial_transpose(&rho, 1, &t), 1, &t);
        assert_eq!(twice, rho);
        // product state: rho1 (x) rho2 -> rho1 (x) rho2^T, still positive
        let ket = prepare_state(
            &StateKind::Coherent {
                alpha1: (0.3, 0.0),
                alpha2: (0.0, 0.2),
            },
            &trunc(8),
        )
        .unwrap();
        let t8 = trunc(8);
        let pt = partial_transpose(&ket.to_density(), 2, &t8);
        let eig = hermitian_eigenvalues(&pt);
        let min = eig[0];
        assert!(min > -1e-10, "min eigenvalue {min}");
    }

    #[test]
    fn leakage_policy() {
        // a coherent state far too large for N = 2 must be rejected with a hint
        let t = trunc(2);
        let err = prepare_state(
            &StateKind::Coherent {
                alpha1: (2.0, 0.0),
                alpha2: (0.0, 0.0),
            },
            &t,
        )
        .unwrap_err();
        match err {
            Error::Truncation { leakage, .. } => assert!(leakage > LEAKAGE_ERROR),
            other => panic!("expected truncation error, got {other}"),
        }
        // cat state with modest alpha passes at a generous truncation
        let cat = prepare_state(
            &StateKind::Cat {
                alpha: (1.0, 0.0),
                parity: 1,
            },
            &trunc(12),
        )
        .unwrap();
        assert!((cat.norm() - 1.0).abs() < 1e-10);
        assert!(cat.leakage() < LEAKAGE_WARN);
    }
}
