//! Gaussian (covariance-matrix) machinery: symplectic spectra, logarithmic
//! negativity, second-moment propagation under the quadratic master
//! equation, and the closed x- control mode.
//!
//! Quadrature ordering is `xi = (x1, p1, x2, p2)` with dimensionless
//! quadratures `x = (a + a^dag)/sqrt(2)` and vacuum `sigma = I/2`.
//!
//! In the collective basis `x+- = (x1 +- x2)/sqrt(2)` the dynamics split:
//! the + mode is damped at rate `2 Re F` with frequency `Omega + 2 Im F` and
//! diffusion `2 Re F * I`; the - mode is a closed oscillator with
//! `d x- = Omega p-`, `d p- = -(Omega + 8k) x-` (the control quadratic
//! `k (a1 - a2 + a1^dag - a2^dag)^2 = 4 k x-^2`).
//!
//! Convention note: `cm_two_mode_squeezed(r)` uses the block form with
//! `+sinh(2r)/2` correlations (x+ anti-squeezed), which corresponds to the
//! Fock-space squeeze `exp(-r(a1^dag a2^dag - a1 a2))` at `-r`; the two
//! constructions differ by that phase and agree in every entanglement
//! quantity.

use nalgebra::{Matrix2, Matrix4, Vector4};

use crate::coefficients::CoefficientTrajectory;
use crate::control::ControlSchedule;
use crate::hilbert::{self, TruncationSpec};
use crate::{CMatrix, Error, Result, C64};

/// Standard symplectic form over `(x1, p1, x2, p2)`.
pub fn symplectic_form() -> Matrix4<f64> {
    let mut o = Matrix4::zeros();
    o[(0, 1)] = 1.0;
    o[(1, 0)] = -1.0;
    o[(2, 3)] = 1.0;
    o[(3, 2)] = -1.0;
    o
}

/// Orthogonal, involutive change of basis `eta = S xi` with
/// `eta = (x+, p+, x-, p-)`.
pub fn plus_minus_basis() -> Matrix4<f64> {
    let s = 1.0 / 2.0f64.sqrt();
    Matrix4::new(
        s, 0.0, s, 0.0, //
        0.0, s, 0.0, s, //
        s, 0.0, -s, 0.0, //
        0.0, s, 0.0, -s,
    )
}

#[derive(Debug, Clone)]
pub struct CovarianceMatrix {
    pub sigma: Matrix4<f64>,
    pub mean: Vector4<f64>,
}

impl CovarianceMatrix {
    pub fn new(sigma: Matrix4<f64>, mean: Vector4<f64>) -> Self {
        Self { sigma, mean }
    }

    pub fn vacuum() -> Self {
        Self::new(Matrix4::identity() * 0.5, Vector4::zeros())
    }

    /// Maximum asymmetry `|sigma - sigma^T|`.
    pub fn asymmetry(&self) -> f64 {
        (self.sigma - self.sigma.transpose()).abs().max()
    }

    /// Minimum eigenvalue of the Hermitian matrix `sigma + (i/2) Omega_s`;
    /// physical states have it above `-1e-9`.
    pub fn physicality_margin(&self) -> f64 {
        let omega = symplectic_form();
        let mut h = CMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                h[(i, j)] = C64::new(self.sigma[(i, j)], 0.5 * omega[(i, j)]);
            }
        }
        hilbert::hermitian_eigenvalues(&h)[0]
    }

    pub fn validate(&self) -> Result<()> {
        if self.asymmetry() > 1e-12 {
            return Err(Error::Domain(format!(
                "covariance matrix asymmetric by {:.3e}",
                self.asymmetry()
            )));
        }
        let margin = self.physicality_margin();
        if margin < -1e-9 {
            return Err(Error::Domain(format!(
                "covariance matrix unphysical: min eig(sigma + i/2 Omega) = {margin:.3e}"
            )));
        }
        Ok(())
    }
}

/// Two-mode squeezed vacuum: diagonal blocks `(cosh 2r)/2 * I`, off-diagonal
/// block `(sinh 2r)/2 * diag(1, -1)`.
pub fn cm_two_mode_squeezed(r: f64) -> CovarianceMatrix {
    let ch = (2.0 * r).cosh() * 0.5;
    let sh = (2.0 * r).sinh() * 0.5;
    let mut s = Matrix4::identity() * ch;
    s[(0, 2)] = sh;
    s[(2, 0)] = sh;
    s[(1, 3)] = -sh;
    s[(3, 1)] = -sh;
    CovarianceMatrix::new(s, Vector4::zeros())
}

/// Moduli of the eigenvalue pairs of `i Omega_s sigma`, sorted ascending,
/// without any physicality gate (needed for partially transposed inputs).
///
/// Computed as the paired singular values of the antisymmetric matrix
/// `sigma^(1/2) Omega_s sigma^(1/2)`, which is similar to `Omega_s sigma`;
/// this avoids a nonsymmetric eigensolve, which the Schur iteration fails
/// to converge on for these purely imaginary spectra.
fn symplectic_spectrum_raw(sigma: &Matrix4<f64>) -> (f64, f64) {
    let eig = nalgebra::SymmetricEigen::new(*sigma);
    let sqrt_vals = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    let root = eig.eigenvectors * Matrix4::from_diagonal(&sqrt_vals) * eig.eigenvectors.transpose();
    let k = root * symplectic_form() * root;
    let mut s: Vec<f64> = k
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .collect();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (0.5 * (s[0] + s[1]), 0.5 * (s[2] + s[3]))
}

/// Symplectic eigenvalues of a physical covariance matrix, ascending.
pub fn symplectic_eigenvalues(cm: &CovarianceMatrix) -> Result<(f64, f64)> {
    cm.validate()?;
    Ok(symplectic_spectrum_raw(&cm.sigma))
}

/// Same spectrum from the symplectic invariants
/// `nu_+-^2 = (Delta +- sqrt(Delta^2 - 4 det sigma)) / 2` with
/// `Delta = det A + det B + 2 det C`; used as an independent cross-check.
pub fn symplectic_eigenvalues_invariants(sigma: &Matrix4<f64>) -> (f64, f64) {
    let a = Matrix2::new(sigma[(0, 0)], sigma[(0, 1)], sigma[(1, 0)], sigma[(1, 1)]);
    let b = Matrix2::new(sigma[(2, 2)], sigma[(2, 3)], sigma[(3, 2)], sigma[(3, 3)]);
    let c = Matrix2::new(sigma[(0, 2)], sigma[(0, 3)], sigma[(1, 2)], sigma[(1, 3)]);
    let delta = a.determinant() + b.determinant() + 2.0 * c.determinant();
    let det = sigma_determinant(sigma);
    let disc = (delta * delta - 4.0 * det).max(0.0).sqrt();
    let lo = (0.5 * (delta - disc)).max(0.0).sqrt();
    let hi = (0.5 * (delta + disc)).max(0.0).sqrt();
    (lo, hi)
}

fn sigma_determinant(sigma: &Matrix4<f64>) -> f64 {
    sigma.determinant()
}

/// `E_N = max{0, -ln(2 nu_min)}` of the partially transposed covariance
/// matrix (momentum sign flip on mode 2).
pub fn log_negativity_cm(cm: &CovarianceMatrix) -> f64 {
    // p2 sign flip: (i,3) and (3,i) negate, (3,3) flips twice and survives
    let mut pt = cm.sigma;
    for i in 0..4 {
        pt[(i, 3)] = -pt[(i, 3)];
        pt[(3, i)] = -pt[(3, i)];
    }
    let (nu_min, _) = symplectic_spectrum_raw(&pt);
    (-(2.0 * nu_min).ln()).max(0.0)
}

/// `Omega'(k) = sqrt(Omega^2 + 4k)`, the paper's controlled frequency
/// (m = 1).
pub fn effective_frequency(k: f64, omega: f64) -> Result<f64> {
    let w2 = omega * omega + 4.0 * k;
    if w2 < 0.0 {
        return Err(Error::Domain(format!(
            "inverted control potential: Omega^2 + 4k = {w2:.6} < 0"
        )));
    }
    Ok(w2.sqrt())
}

/// Drift and diffusion matrices of `d sigma = A sigma + sigma A^T + D` in
/// the `(x1, p1, x2, p2)` basis, derived from the master equation's action
/// on first and second moments (see the module docs for the +- split).
pub fn drift_diffusion(f: C64, k: f64, omega: f64) -> (Matrix4<f64>, Matrix4<f64>) {
    let fr = f.re;
    let w_plus = omega + 2.0 * f.im;
    let mut a_eta = Matrix4::zeros();
    a_eta[(0, 0)] = -2.0 * fr;
    a_eta[(0, 1)] = w_plus;
    a_eta[(1, 0)] = -w_plus;
    a_eta[(1, 1)] = -2.0 * fr;
    a_eta[(2, 3)] = omega;
    a_eta[(3, 2)] = -(omega + 8.0 * k);
    let mut d_eta = Matrix4::zeros();
    d_eta[(0, 0)] = 2.0 * fr;
    d_eta[(1, 1)] = 2.0 * fr;
    let s = plus_minus_basis();
    (s * a_eta * s, s * d_eta * s)
}

#[derive(Debug, Clone)]
pub struct GaussianOutput {
    pub times: Vec<f64>,
    pub states: Vec<CovarianceMatrix>,
}

const PHYSICALITY_ABORT: f64 = 1e-6;

/// Fixed-step 4th-order propagation of (mean, sigma); symmetrizes sigma and
/// monitors physicality each step.
pub fn propagate_cm(
    sigma0: &CovarianceMatrix,
    coefficient: &CoefficientTrajectory,
    schedule: &ControlSchedule,
    omega: f64,
    t_end: f64,
    dt: f64,
    stride: usize,
) -> Result<GaussianOutput> {
    sigma0.validate()?;
    schedule.validate()?;
    if dt <= 0.0 || t_end <= 0.0 || stride == 0 {
        return Err(Error::Config("propagate_cm: bad grid parameters".into()));
    }
    if t_end > coefficient.t_end() + 1e-9 {
        return Err(Error::Config(
            "propagate_cm: coefficient grid ends before t_end".into(),
        ));
    }
    let steps = (t_end / dt).round() as usize;
    let mut sigma = sigma0.sigma;
    let mut mean = sigma0.mean;
    let mut out = GaussianOutput {
        times: vec![0.0],
        states: vec![sigma0.clone()],
    };

    let rhs = |sigma: &Matrix4<f64>, mean: &Vector4<f64>, t: f64| {
        let f = coefficient.value_at(t);
        let k = schedule.evaluate(t);
        let (a, d) = drift_diffusion(f, k, omega);
        (a * sigma + sigma * a.transpose() + d, a * mean)
    };

    for step in 0..steps {
        let t = step as f64 * dt;
        let (ks1, km1) = rhs(&sigma, &mean, t);
        let (ks2, km2) = rhs(
            &(sigma + 0.5 * dt * ks1),
            &(mean + 0.5 * dt * km1),
            t + 0.5 * dt,
        );
        let (ks3, km3) = rhs(
            &(sigma + 0.5 * dt * ks2),
            &(mean + 0.5 * dt * km2),
            t + 0.5 * dt,
        );
        let (ks4, km4) = rhs(&(sigma + dt * ks3), &(mean + dt * km3), t + dt);
        sigma += (dt / 6.0) * (ks1 + 2.0 * ks2 + 2.0 * ks3 + ks4);
        mean += (dt / 6.0) * (km1 + 2.0 * km2 + 2.0 * km3 + km4);
        sigma = 0.5 * (sigma + sigma.transpose());

        if (step + 1) % stride == 0 || step + 1 == steps {
            let cm = CovarianceMatrix::new(sigma, mean);
            let margin = cm.physicality_margin();
            if margin < -PHYSICALITY_ABORT {
                return Err(Error::RunFailure(format!(
                    "propagate_cm aborted at t = {:.6}: physicality margin {margin:.3e}",
                    t + dt
                )));
            }
            out.times.push((step + 1) as f64 * dt);
            out.states.push(cm);
        }
    }
    Ok(out)
}

/// Closed second-moment dynamics of the controlled x- mode in the paper's
/// mass-weighted form: `d<x^2> = 2 cov`, `d cov = <p^2> - (Omega^2+4k)<x^2>`,
/// `d<p^2> = -2 (Omega^2+4k) cov`.
#[derive(Debug, Clone, Copy)]
pub struct ControlModeMoments {
    pub x_sq: f64,
    pub p_sq: f64,
    pub cov: f64,
}

pub fn controlled_mode_moments_rhs(
    m: &ControlModeMoments,
    k: f64,
    omega: f64,
) -> ControlModeMoments {
    let w2 = omega * omega + 4.0 * k;
    ControlModeMoments {
        x_sq: 2.0 * m.cov,
        p_sq: -2.0 * w2 * m.cov,
        cov: m.p_sq - w2 * m.x_sq,
    }
}

/// First and symmetrized second quadrature moments of a Fock-space density
/// matrix: the oracle for the Gaussian propagator.
pub fn covariance_from_density(rho: &CMatrix, trunc: &TruncationSpec) -> CovarianceMatrix {
    let ops = [
        hilbert::position_operator(1, trunc),
        hilbert::momentum_operator(1, trunc),
        hilbert::position_operator(2, trunc),
        hilbert::momentum_operator(2, trunc),
    ];
    let mut mean = Vector4::zeros();
    for (i, op) in ops.iter().enumerate() {
        mean[i] = (rho * op).trace().re;
    }
    let mut sigma = Matrix4::zeros();
    for i in 0..4 {
        for j in i..4 {
            let sym = (rho * (&ops[i] * &ops[j] + &ops[j] * &ops[i])).trace().re * 0.5;
            let c = sym - mean[i] * mean[j];
            sigma[(i, j)] = c;
            sigma[(j, i)] = c;
        }
    }
    CovarianceMatrix::new(sigma, mean)
}
