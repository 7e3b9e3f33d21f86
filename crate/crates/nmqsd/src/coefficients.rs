//! The memory coefficient `F(t)` driving the convolution-less master
//! equation and the QSD unravelings.
//!
//! For the Lorentzian bath `F` solves the Riccati equation
//! `dF/dt = 2F^2 - (gamma - i*Omega)F + Gamma*gamma/2` with `F(0) = 0`, and
//! admits the closed form obtained through `F = -y'/(2y)`. For general
//! kernels `F(t) = int_0^t f(t,s) alpha(t-s) ds` is computed jointly with the
//! auxiliary function `f(t,s)` (boundary `f(t,t) = 1`) by a predictor /
//! corrector Volterra scheme.
//!
//! Note that for `Omega = 0` and `gamma^2 < 4*Gamma*gamma` the Riccati flow
//! has no real fixed point: `F(t)` is real and diverges at isolated times
//! (zeros of `y`). The closed form evaluates across those poles; grid-based
//! solvers are only meaningful below the first pole.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::bath::{CorrelationKernel, KernelKind};
use crate::{Error, Result, C64};

const ONE: C64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CoefficientSpec {
    /// Coupling strength Gamma.
    pub gamma_coupling: f64,
    /// Bath memory rate gamma.
    pub gamma_env: f64,
    /// System frequency Omega.
    pub omega: f64,
}

impl CoefficientSpec {
    pub fn new(gamma_coupling: f64, gamma_env: f64, omega: f64) -> Self {
        Self {
            gamma_coupling,
            gamma_env,
            omega,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma_coupling <= 0.0
            || self.gamma_env <= 0.0
            || self.omega < 0.0
            || self.gamma_coupling.is_nan()
            || self.gamma_env.is_nan()
            || self.omega.is_nan()
        {
            return Err(Error::Config(
                "coefficients: require Gamma > 0, gamma_env > 0, Omega >= 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Markovianity {
    Markovian,
    NonMarkovian,
}

/// The paper's criterion applied literally: non-Markov iff `Omega != 0` or
/// `gamma^2 - 4*Gamma*gamma < 0`.
pub fn classify_markovianity(spec: &CoefficientSpec) -> Markovianity {
    let g = spec.gamma_env;
    if spec.omega != 0.0 || g * g - 4.0 * spec.gamma_coupling * g < 0.0 {
        Markovianity::NonMarkovian
    } else {
        Markovianity::Markovian
    }
}

/// Right-hand side `2F^2 - (gamma - i*Omega)F + Gamma*gamma/2`.
pub fn riccati_rhs(f: C64, spec: &CoefficientSpec) -> C64 {
    let decay = C64::new(spec.gamma_env, -spec.omega);
    2.0 * f * f - decay * f + 0.5 * spec.gamma_coupling * spec.gamma_env
}

/// Characteristic roots of `y'' + (gamma - i*Omega) y' + Gamma*gamma y = 0`,
/// ordered by ascending real part. Errors on a degenerate (double) root;
/// callers can perturb `gamma_env` by ~1e-9 instead.
pub fn riccati_roots(spec: &CoefficientSpec) -> Result<(C64, C64)> {
    let b = C64::new(spec.gamma_env, -spec.omega);
    let delta = b * b - 4.0 * spec.gamma_coupling * spec.gamma_env;
    let scale = b.norm_sqr() + 4.0 * (spec.gamma_coupling * spec.gamma_env).abs();
    if delta.norm() <= 1e-12 * scale {
        return Err(Error::Domain(
            "analytic F: degenerate characteristic roots (Delta = 0); perturb gamma_env".into(),
        ));
    }
    let sq = delta.sqrt();
    let l1 = 0.5 * (-b - sq);
    let l2 = 0.5 * (-b + sq);
    if l1.re <= l2.re {
        Ok((l1, l2))
    } else {
        Ok((l2, l1))
    }
}

/// Fixed points of the Riccati flow, stable one first (the attractor is the
/// root with the smaller `|2F|`, i.e. `-lambda/2` for the slow root).
pub fn riccati_fixed_points(spec: &CoefficientSpec) -> Result<(C64, C64)> {
    let (l1, l2) = riccati_roots(spec)?;
    // F' = 2(F - f_a)(F - f_b) with f = -lambda/2.
    let (fa, fb) = (-0.5 * l1, -0.5 * l2);
    if fa.norm() <= fb.norm() {
        Ok((fa, fb))
    } else {
        Ok((fb, fa))
    }
}

fn analytic_f_ordered(l1: C64, l2: C64, t: f64) -> C64 {
    // F = l1 (1 - E) / (2 (E - l1/l2)) with E = exp((l1 - l2) t); the
    // formula is symmetric under l1 <-> l2, the ordering with
    // Re(l1 - l2) <= 0 keeps E bounded for t >= 0.
    let e = ((l1 - l2) * t).exp();
    l1 * (ONE - e) / (2.0 * (e - l1 / l2))
}

/// Closed-form `F(t)` for the Lorentzian bath.
pub fn analytic_f(spec: &CoefficientSpec, t: f64) -> Result<C64> {
    let (l1, l2) = riccati_roots(spec)?;
    Ok(analytic_f_ordered(l1, l2, t))
}

/// `F(t)` on a uniform grid, plus the optional auxiliary history `f(t,s)`.
#[derive(Debug, Clone)]
pub struct CoefficientTrajectory {
    dt: f64,
    values: Vec<C64>,
    /// Row `j` holds `f(t_j, s_i)` for `i = 0..=j`.
    f_history: Option<Vec<Vec<C64>>>,
}

impl CoefficientTrajectory {
    pub fn new(dt: f64, values: Vec<C64>) -> Self {
        assert!(dt > 0.0 && !values.is_empty());
        Self {
            dt,
            values,
            f_history: None,
        }
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

    pub fn t_end(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.dt
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn value(&self, j: usize) -> C64 {
        self.values[j]
    }

    pub fn f_history(&self) -> Option<&[Vec<C64>]> {
        self.f_history.as_deref()
    }

    /// Linear interpolation between grid points; clamped at the ends.
    pub fn value_at(&self, t: f64) -> C64 {
        let x = t / self.dt;
        if x <= 0.0 {
            return self.values[0];
        }
        let n = self.values.len() - 1;
        if x >= n as f64 {
            return self.values[n];
        }
        let j = x.floor() as usize;
        let w = x - j as f64;
        self.values[j] * (1.0 - w) + self.values[j + 1] * w
    }

    /// CSV rows (t, re_F, im_F); the content of the paper-style coefficient
    /// plots.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,re_F,im_F")?;
        for (j, v) in self.values.iter().enumerate() {
            writeln!(w, "{:.12e},{:.12e},{:.12e}", j as f64 * self.dt, v.re, v.im)?;
        }
        Ok(())
    }
}

/// Closed-form trajectory on a uniform grid (Lorentzian bath only).
pub fn analytic_trajectory(
    spec: &CoefficientSpec,
    dt: f64,
    steps: usize,
) -> Result<CoefficientTrajectory> {
    spec.validate()?;
    let (l1, l2) = riccati_roots(spec)?;
    let values = (0..=steps)
        .map(|j| analytic_f_ordered(l1, l2, j as f64 * dt))
        .collect();
    Ok(CoefficientTrajectory::new(dt, values))
}

/// F-only form for exponential kernels: classical RK4 on the Riccati ODE.
pub fn riccati_ode_trajectory(
    spec: &CoefficientSpec,
    dt: f64,
    steps: usize,
) -> Result<CoefficientTrajectory> {
    spec.validate()?;
    let mut values = Vec::with_capacity(steps + 1);
    let mut f = C64::new(0.0, 0.0);
    values.push(f);
    for _ in 0..steps {
        let k1 = riccati_rhs(f, spec);
        let k2 = riccati_rhs(f + 0.5 * dt * k1, spec);
        let k3 = riccati_rhs(f + 0.5 * dt * k2, spec);
        let k4 = riccati_rhs(f + dt * k3, spec);
        f += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        values.push(f);
    }
    Ok(CoefficientTrajectory::new(dt, values))
}

const CORRECTOR_TOL: f64 = 1e-10;
const CORRECTOR_MAX_ITERS: usize = 25;

/// Volterra predictor-corrector solver for a general tabulated kernel:
/// evolves `d/dt f(t,s) = (i*Omega + 2F(t)) f(t,s)` jointly with the
/// self-consistent quadrature `F(t) = int_0^t alpha(t-s) f(t,s) ds`.
///
/// The kernel grid must be at least as fine as the requested grid (its `dt`
/// an integer divisor of `dt`) and long enough to cover `steps * dt`.
/// Quadrature is Gregory-corrected trapezoid; the corrector iterates the
/// implicit step to `1e-10` (at most 25 passes). Set `store_history` to keep
/// the triangular `f(t_j, s_i)` table (O(n^2) memory).
pub fn solve_f_general(
    kernel: &CorrelationKernel,
    omega: f64,
    dt: f64,
    steps: usize,
    store_history: bool,
) -> Result<CoefficientTrajectory> {
    let ratio = dt / kernel.dt();
    let ratio_round = ratio.round();
    if (ratio - ratio_round).abs() > 1e-9 * ratio.max(1.0) || ratio_round < 1.0 {
        return Err(Error::Config(
            "solve_f_general: kernel grid must be an integer refinement of the requested grid"
                .into(),
        ));
    }
    let ratio = ratio_round as usize;
    if kernel.len() < steps * ratio + 1 {
        return Err(Error::Config(
            "solve_f_general: kernel grid does not cover the requested time span".into(),
        ));
    }
    let alpha = |lag: usize| kernel.value(lag * ratio);
    let alpha0 = alpha(0);

    let mut f_values = Vec::with_capacity(steps + 1);
    f_values.push(C64::new(0.0, 0.0));
    // f(t_j, s_i) for the current j.
    let mut f_row: Vec<C64> = vec![ONE];
    let mut history: Vec<Vec<C64>> = Vec::new();
    if store_history {
        history.push(f_row.clone());
    }
    let i_omega = C64::new(0.0, omega);
    let g_of = |f: C64| i_omega + 2.0 * f;

    for j in 0..steps {
        let t_next = (j + 1) as f64 * dt;
        let m = j + 1; // number of intervals in the quadrature at t_next
                       // Gregory end-corrected trapezoid weights (order 3) once the row is
                       // long enough; plain trapezoid during startup.
        let weight = |i: usize| -> f64 {
            if m >= 5 {
                match i.min(m - i) {
                    0 => 3.0 / 8.0,
                    1 => 7.0 / 6.0,
                    2 => 23.0 / 24.0,
                    _ => 1.0,
                }
            } else if i == 0 || i == m {
                0.5
            } else {
                1.0
            }
        };
        // The row update is a single scalar multiplier mu (the rhs is
        // f * g(t)), so the weighted kernel sum over the old row can be
        // computed once per step:
        //   F_next(mu) = dt * w_m * alpha(0) + mu * dt * sum_i w_i alpha_{m-i} f_i
        let mut weighted = C64::new(0.0, 0.0);
        for (i, &fi) in f_row.iter().enumerate() {
            weighted += weight(i) * alpha(m - i) * fi;
        }
        let head = dt * weight(m) * alpha0;

        let g_prev = g_of(f_values[j]);
        // Predictor: hold g over the step.
        let mut f_next = head + (dt * g_prev).exp() * dt * weighted;
        let mut mu = (dt * g_prev).exp();
        let mut converged = false;
        for _ in 0..CORRECTOR_MAX_ITERS {
            // Integrate g over the step: Adams-Moulton 2-step where a
            // previous point exists, trapezoid on the first step.
            let g_next = g_of(f_next);
            let integral = if j >= 1 {
                let g_prev2 = g_of(f_values[j - 1]);
                (dt / 12.0) * (5.0 * g_next + 8.0 * g_prev - g_prev2)
            } else {
                (dt / 2.0) * (g_next + g_prev)
            };
            mu = integral.exp();
            let refined = head + mu * dt * weighted;
            let delta = (refined - f_next).norm();
            f_next = refined;
            if delta < CORRECTOR_TOL {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Convergence {
                t: t_next,
                detail: format!(
                    "corrector did not reach {CORRECTOR_TOL:.0e} in {CORRECTOR_MAX_ITERS} iterations (|F| = {:.3e})",
                    f_next.norm()
                ),
            });
        }
        for fi in f_row.iter_mut() {
            *fi *= mu;
        }
        f_row.push(ONE);
        f_values.push(f_next);
        if store_history {
            history.push(f_row.clone());
        }
    }

    let mut traj = CoefficientTrajectory::new(dt, f_values);
    if store_history {
        traj.f_history = Some(history);
    }
    Ok(traj)
}

/// Convenience: the full Lorentzian pipeline (tabulate kernel, general
/// solver) used by tests to cross-check against the closed form.
pub fn solve_f_lorentzian_via_volterra(
    spec: &CoefficientSpec,
    dt: f64,
    steps: usize,
) -> Result<CoefficientTrajectory> {
    let bath = crate::bath::BathSpec::lorentzian(spec.gamma_coupling, spec.gamma_env);
    let kernel = crate::bath::tabulate_lorentzian(&bath, dt, steps)?;
    solve_f_general(&kernel, spec.omega, dt, steps, false)
}

/// Coefficient source used by integrators: either a closed form or a stored
/// trajectory.
pub fn trajectory_for_bath(
    bath: &crate::bath::BathSpec,
    omega: f64,
    dt: f64,
    steps: usize,
) -> Result<CoefficientTrajectory> {
    match bath.family {
        crate::bath::KernelFamily::Lorentzian => {
            let spec = CoefficientSpec::new(bath.gamma_coupling, bath.gamma_env, omega);
            analytic_trajectory(&spec, dt, steps)
        }
        crate::bath::KernelFamily::SuperOhmic => {
            let kernel = crate::bath::kernel_from_spectral_density(bath, dt, steps)?;
            solve_f_general(&kernel, omega, dt, steps, false)
        }
        crate::bath::KernelFamily::TabulatedKernel => Err(Error::Config(
            "trajectory_for_bath: tabulated kernels must go through solve_f_general directly"
                .into(),
        )),
    }
}

/// Zero-kernel helper used in closed-system runs.
pub fn zero_trajectory(dt: f64, steps: usize) -> CoefficientTrajectory {
    CoefficientTrajectory::new(dt, vec![C64::new(0.0, 0.0); steps + 1])
}

/// A kernel tagged exponential for the noise fast path while keeping actual
/// values: used by integrators that need both alpha and F.
pub fn kernel_for_bath(
    bath: &crate::bath::BathSpec,
    dt: f64,
    steps: usize,
) -> Result<CorrelationKernel> {
    match bath.family {
        crate::bath::KernelFamily::Lorentzian => crate::bath::tabulate_lorentzian(bath, dt, steps),
        crate::bath::KernelFamily::SuperOhmic => {
            crate::bath::kernel_from_spectral_density(bath, dt, steps)
        }
        crate::bath::KernelFamily::TabulatedKernel => Err(Error::Config(
            "kernel_for_bath: no tabulated kernel values supplied".into(),
        )),
    }
}

#[allow(unused)]
fn is_exponential(kernel: &CorrelationKernel) -> bool {
    matches!(kernel.kind(), KernelKind::Exponential { .. })
}
