//! Bath spectral densities, correlation kernels and colored complex Gaussian
//! noise generation.
//!
//! The environment is characterized by the two-time correlation
//! `alpha(t - s)` of the bath coupling operators. Two families are built in:
//! the Lorentzian spectrum with `alpha(tau) = (Gamma*gamma/2) exp(-gamma*tau)`
//! and a super-Ohmic spectral density `J(w) = gamma_J * w^3 * exp(-w/Lambda)`
//! whose kernel is obtained by quadrature. Noise realizations reproduce the
//! kernel in ensemble mean and are bit-exact functions of `(seed, index)`.

use nalgebra::Cholesky;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::{CMatrix, Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    Lorentzian,
    SuperOhmic,
    TabulatedKernel,
}

/// Environment parameters in `hbar = M = 1` units.
///
/// The Lorentzian family ignores `cutoff` and `temperature`; the super-Ohmic
/// family ignores `gamma_env` for the kernel shape.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BathSpec {
    pub family: KernelFamily,
    /// Coupling strength Gamma (dimensionless rate).
    pub gamma_coupling: f64,
    /// Memory rate gamma (inverse time).
    pub gamma_env: f64,
    /// Cutoff frequency Lambda.
    pub cutoff: f64,
    /// Temperature (energy units, k_B = 1), >= 0.
    pub temperature: f64,
}

impl BathSpec {
    pub fn lorentzian(gamma_coupling: f64, gamma_env: f64) -> Self {
        Self {
            family: KernelFamily::Lorentzian,
            gamma_coupling,
            gamma_env,
            cutoff: 1.0,
            temperature: 0.0,
        }
    }

    pub fn super_ohmic(gamma_coupling: f64, cutoff: f64, temperature: f64) -> Self {
        Self {
            family: KernelFamily::SuperOhmic,
            gamma_coupling,
            gamma_env: 1.0,
            cutoff,
            temperature,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma_coupling <= 0.0 || self.gamma_coupling.is_nan() {
            return Err(Error::Config("bath: Gamma must be > 0".into()));
        }
        if self.gamma_env <= 0.0 || self.gamma_env.is_nan() {
            return Err(Error::Config("bath: gamma_env must be > 0".into()));
        }
        if self.cutoff <= 0.0 || self.cutoff.is_nan() {
            return Err(Error::Config("bath: Lambda must be > 0".into()));
        }
        if self.temperature < 0.0 || self.temperature.is_nan() {
            return Err(Error::Config("bath: temperature must be >= 0".into()));
        }
        Ok(())
    }
}

/// How a kernel can be sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelKind {
    /// `alpha(tau) = alpha(0) * exp(-decay * tau)`; admits an O(n) exact
    /// recursion for noise generation.
    Exponential { decay: f64 },
    /// Generic tabulated kernel; noise generation goes through a Cholesky
    /// factorization of the grid covariance.
    Tabulated,
}

/// Complex bath correlation function sampled on a uniform lattice
/// `tau_j = j * dt` for `j = 0..=n`. Only `tau >= 0` is stored;
/// `alpha(-tau) = conj(alpha(tau))` is implied.
#[derive(Debug, Clone)]
pub struct CorrelationKernel {
    dt: f64,
    values: Vec<C64>,
    kind: KernelKind,
}

impl CorrelationKernel {
    pub fn new(dt: f64, values: Vec<C64>, kind: KernelKind) -> Self {
        assert!(dt > 0.0 && !values.is_empty());
        Self { dt, values, kind }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// alpha(j * dt)
    pub fn value(&self, j: usize) -> C64 {
        self.values[j]
    }

    pub fn alpha0(&self) -> C64 {
        self.values[0]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.norm() == 0.0)
    }

    /// Trapezoid integral of alpha over the stored grid.
    pub fn integral(&self) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for w in self.values.windows(2) {
            acc += (w[0] + w[1]) * 0.5 * self.dt;
        }
        acc
    }

    /// Debug export as CSV rows (tau, re_alpha, im_alpha).
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "tau,re_alpha,im_alpha")?;
        for (j, v) in self.values.iter().enumerate() {
            writeln!(w, "{:.12e},{:.12e},{:.12e}", j as f64 * self.dt, v.re, v.im)?;
        }
        Ok(())
    }
}

/// Lorentzian correlation function `(Gamma*gamma/2) exp(-gamma*tau)`.
pub fn lorentzian_kernel(spec: &BathSpec, tau: f64) -> Result<C64> {
    if spec.family != KernelFamily::Lorentzian {
        return Err(Error::Config(
            "lorentzian_kernel requires kernel_family = Lorentzian".into(),
        ));
    }
    spec.validate()?;
    if tau < 0.0 {
        return Err(Error::Domain("lorentzian_kernel: tau must be >= 0".into()));
    }
    let a = 0.5 * spec.gamma_coupling * spec.gamma_env * (-spec.gamma_env * tau).exp();
    Ok(C64::new(a, 0.0))
}

/// Tabulate the Lorentzian kernel on `n + 1` grid points.
pub fn tabulate_lorentzian(spec: &BathSpec, dt: f64, n: usize) -> Result<CorrelationKernel> {
    let values = (0..=n)
        .map(|j| lorentzian_kernel(spec, j as f64 * dt))
        .collect::<Result<Vec<_>>>()?;
    Ok(CorrelationKernel::new(
        dt,
        values,
        KernelKind::Exponential {
            decay: spec.gamma_env,
        },
    ))
}

/// Super-Ohmic spectral density `J(w) = gamma_J * w^3 * exp(-w/Lambda)`.
pub fn superohmic_spectral_density(omega: f64, gamma_j: f64, cutoff: f64) -> Result<f64> {
    if omega < 0.0 {
        return Err(Error::Domain(
            "superohmic_spectral_density: omega must be >= 0".into(),
        ));
    }
    Ok(gamma_j * omega.powi(3) * (-omega / cutoff).exp())
}

fn coth(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 / x
    } else {
        1.0 / x.tanh()
    }
}

/// Continuum-limit correlation kernel
/// `alpha(tau) = int_0^inf J(w) [coth(w/2T) cos(w tau) - i sin(w tau)] dw`
/// computed by adaptive Simpson quadrature on `[0, 50*Lambda]` with relative
/// tolerance `1e-8`. At `T = 0` the `coth` factor is identically 1.
pub fn kernel_from_spectral_density(
    spec: &BathSpec,
    dt: f64,
    n: usize,
) -> Result<CorrelationKernel> {
    if spec.family != KernelFamily::SuperOhmic {
        return Err(Error::Config(
            "kernel_from_spectral_density requires kernel_family = SuperOhmic".into(),
        ));
    }
    spec.validate()?;
    let omega_max = 50.0 * spec.cutoff;
    let temp = spec.temperature;
    let mut values = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let tau = j as f64 * dt;
        let f = |w: f64| -> C64 {
            let jw = spec.gamma_coupling * w.powi(3) * (-w / spec.cutoff).exp();
            if w == 0.0 {
                // J ~ w^3 kills the 1/w pole of coth at the origin
                return C64::new(0.0, 0.0);
            }
            let c = if temp > 0.0 {
                coth(0.5 * w / temp)
            } else {
                1.0
            };
            C64::new(jw * c * (w * tau).cos(), -jw * (w * tau).sin())
        };
        values.push(adaptive_simpson(&f, 0.0, omega_max, 1e-8, 40)?);
    }
    Ok(CorrelationKernel::new(dt, values, KernelKind::Tabulated))
}

/// Adaptive Simpson quadrature for complex integrands with relative
/// tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> C64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: usize,
) -> Result<C64> {
    fn simpson(fa: C64, fm: C64, fb: C64, h: f64) -> C64 {
        (fa + fm * 4.0 + fb) * (h / 6.0)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> C64>(
        f: &F,
        a: f64,
        b: f64,
        fa: C64,
        fm: C64,
        fb: C64,
        whole: C64,
        abs_tol: f64,
        depth: usize,
    ) -> Result<C64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if delta.norm() <= 15.0 * abs_tol {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(Error::Numerical(format!(
                "adaptive_simpson: no convergence on [{a:.6e}, {b:.6e}], residual {:.3e}",
                delta.norm()
            )));
        }
        let l = recurse(f, a, m, fa, flm, fm, left, 0.5 * abs_tol, depth - 1)?;
        let r = recurse(f, m, b, fm, frm, fb, right, 0.5 * abs_tol, depth - 1)?;
        Ok(l + r)
    }

    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    // Scale the absolute tolerance off a coarse magnitude estimate; fall back
    // to an absolute floor for integrals that are themselves ~0.
    let scale = whole.norm().max(1e-12);
    recurse(f, a, b, fa, fm, fb, whole, tol * scale, max_depth)
}

/// One colored complex Gaussian noise realization on the kernel grid.
#[derive(Debug, Clone)]
pub struct NoiseRealization {
    pub dt: f64,
    pub values: Vec<C64>,
    pub seed: u64,
    pub index: u64,
}

impl NoiseRealization {
    pub fn value(&self, j: usize) -> C64 {
        self.values[j]
    }
}

/// Reusable noise generator: factorizes the grid covariance once for
/// tabulated kernels; exponential kernels use an O(n) recursion.
pub struct NoiseSampler {
    dt: f64,
    n: usize,
    alpha0: f64,
    scheme: Scheme,
}

enum Scheme {
    Zero,
    /// Discrete complex Ornstein-Uhlenbeck update, exact stationary
    /// statistics for exponential kernels.
    Exponential {
        rho: f64,
    },
    /// Lower-triangular square root of the Hermitian grid covariance.
    Factorized {
        chol: Box<CMatrix>,
    },
}

impl NoiseSampler {
    pub fn new(kernel: &CorrelationKernel) -> Result<Self> {
        let n = kernel.len();
        if n == 0 {
            return Err(Error::Config("noise: empty kernel grid".into()));
        }
        let alpha0 = kernel.alpha0().re;
        if kernel.is_zero() {
            return Ok(Self {
                dt: kernel.dt(),
                n,
                alpha0: 0.0,
                scheme: Scheme::Zero,
            });
        }
        if kernel.alpha0().im.abs() > 1e-12 * alpha0.abs().max(1.0) || alpha0 <= 0.0 {
            return Err(Error::KernelValidity(
                "noise: kernel must satisfy Im alpha(0) = 0 and Re alpha(0) > 0".into(),
            ));
        }
        match kernel.kind() {
            KernelKind::Exponential { decay } => Ok(Self {
                dt: kernel.dt(),
                n,
                alpha0,
                scheme: Scheme::Exponential {
                    rho: (-decay * kernel.dt()).exp(),
                },
            }),
            KernelKind::Tabulated => {
                let cov = CMatrix::from_fn(n, n, |i, j| {
                    if i >= j {
                        kernel.value(i - j)
                    } else {
                        kernel.value(j - i).conj()
                    }
                });
                let chol = Cholesky::new(cov.clone()).or_else(|| {
                    // Retry with a tiny diagonal jitter against rounding.
                    let jitter = alpha0 * 1e-10;
                    let mut c = cov;
                    for i in 0..n {
                        c[(i, i)] += Complex64::new(jitter, 0.0);
                    }
                    Cholesky::new(c)
                });
                match chol {
                    Some(c) => Ok(Self {
                        dt: kernel.dt(),
                        n,
                        alpha0,
                        scheme: Scheme::Factorized {
                            chol: Box::new(c.unpack()),
                        },
                    }),
                    None => Err(Error::KernelValidity(
                        "noise: grid covariance is not positive semidefinite".into(),
                    )),
                }
            }
        }
    }

    /// Deterministic function of `(seed, index)`.
    pub fn sample(&self, seed: u64, index: u64) -> NoiseRealization {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let mut draw = |var: f64| -> C64 {
            let s = (0.5 * var).sqrt();
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(s * re, s * im)
        };
        let values = match &self.scheme {
            Scheme::Zero => vec![C64::new(0.0, 0.0); self.n],
            Scheme::Exponential { rho } => {
                let mut values = Vec::with_capacity(self.n);
                let mut z = draw(self.alpha0);
                values.push(z);
                let innov = self.alpha0 * (1.0 - rho * rho);
                for _ in 1..self.n {
                    z = z * *rho + draw(innov);
                    values.push(z);
                }
                values
            }
            Scheme::Factorized { chol } => {
                let w = crate::CVector::from_fn(self.n, |_, _| draw(1.0));
                (chol.as_ref() * w).iter().copied().collect()
            }
        };
        NoiseRealization {
            dt: self.dt,
            values,
            seed,
            index,
        }
    }
}

/// Convenience wrapper around [`NoiseSampler`] for one-off draws.
pub fn sample_noise(kernel: &CorrelationKernel, seed: u64, index: u64) -> Result<NoiseRealization> {
    Ok(NoiseSampler::new(kernel)?.sample(seed, index))
}
