//! Linear and nonlinear quantum-state-diffusion trajectory solvers with
//! colored noise, plus deterministic ensemble averaging.
//!
//! Linear unraveling:  `d psi = (-i H + z*_t L - F(t) L^dag L) psi dt`
//! with `L = a1 + a2` and the memory operator replaced by `F(t) L`.
//!
//! Nonlinear (norm-stabilized) variant, with `D(A) = A - <A>_t` and all
//! expectations in the normalized current state:
//!
//! `d psi = [-i H + D(L) zt*_t - F (D(L^dag) L - <D(L^dag) L>)] psi dt`
//!
//! where the shifted noise is `zt*_t = z*_t + int_0^t a*(t-s) <L^dag>_s ds`.

use rayon::prelude::*;

use crate::bath::{CorrelationKernel, NoiseRealization, NoiseSampler};
use crate::coefficients::CoefficientTrajectory;
use crate::control::ControlSchedule;
use crate::hilbert::{self, Ket, TruncationSpec};
use crate::master::MasterOperators;
use crate::{CMatrix, CVector, Error, Result, C64};

/// Which unraveling to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QsdMethod {
    Linear,
    Nonlinear,
}

/// Everything one trajectory carries; nothing here is shared.
#[derive(Debug, Clone)]
pub struct TrajectoryState {
    pub psi: Ket,
    pub t: f64,
    pub noise: NoiseRealization,
    /// `<L^dag>_s` on the step grid up to the current time (nonlinear only;
    /// stays empty for the linear solver).
    pub mean_ldag_history: Vec<C64>,
}

/// A full ensemble specification. `trunc` is taken from `psi0`.
#[derive(Clone)]
pub struct QsdRun {
    pub psi0: Ket,
    pub omega: f64,
    pub t_end: f64,
    pub dt: f64,
    pub coefficient: CoefficientTrajectory,
    pub kernel: CorrelationKernel,
    pub schedule: ControlSchedule,
    /// Snapshot every `stride` steps (initial and final always included).
    pub stride: usize,
    pub seed: u64,
    pub count: usize,
    pub method: QsdMethod,
}

impl QsdRun {
    pub fn trunc(&self) -> TruncationSpec {
        self.psi0.trunc
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.dt <= 0.0 || self.t_end <= 0.0 {
            return Err(Error::Config(
                "qsd run: dt and t_end must be positive".into(),
            ));
        }
        if self.stride == 0 {
            return Err(Error::Config("qsd run: stride must be >= 1".into()));
        }
        if self.count == 0 {
            return Err(Error::Config(
                "qsd run: trajectory count must be >= 1".into(),
            ));
        }
        let steps = self.steps();
        if (steps as f64 * self.dt - self.t_end).abs() > 1e-9 * self.t_end.max(1.0) {
            return Err(Error::Config(
                "qsd run: t_end must be a multiple of dt".into(),
            ));
        }
        if (self.kernel.dt() - self.dt).abs() > 1e-12 * self.dt {
            return Err(Error::Config(
                "qsd run: noise/kernel grid spacing must equal dt".into(),
            ));
        }
        if self.kernel.len() < steps + 1 {
            return Err(Error::Config(
                "qsd run: kernel grid ends before t_end".into(),
            ));
        }
        if self.t_end > self.coefficient.t_end() + 1e-9 {
            return Err(Error::Config(
                "qsd run: coefficient grid ends before t_end".into(),
            ));
        }
        self.schedule.validate()?;
        let norm = self.psi0.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Config("qsd run: psi0 must be normalized".into()));
        }
        Ok(())
    }
}

/// `(-i H(k) + z* L - F L^dag L) psi`.
pub fn linear_qsd_rhs(
    ops: &MasterOperators,
    psi: &CVector,
    z_star: C64,
    f: C64,
    k: f64,
) -> CVector {
    let mut out = CVector::zeros(psi.len());
    let minus_i = C64::new(0.0, -1.0);
    ops.h_free.mul_vec_acc(minus_i, psi, &mut out);
    if k != 0.0 {
        ops.h_control.mul_vec_acc(minus_i * k, psi, &mut out);
    }
    ops.l.mul_vec_acc(z_star, psi, &mut out);
    ops.ldl.mul_vec_acc(-f, psi, &mut out);
    out
}

/// Nonlinear right-hand side in the (possibly slightly unnormalized)
/// state `psi`; expectations are normalized internally. `zt_star` is the
/// shifted noise for this step.
pub fn nonlinear_qsd_rhs(
    ops: &MasterOperators,
    psi: &CVector,
    zt_star: C64,
    f: C64,
    k: f64,
) -> CVector {
    let n2 = psi.norm_squared();
    let mean_l = ops.l.expectation(psi) / n2;
    let mean_ldl = ops.ldl.expectation(psi) / n2;
    let mut out = CVector::zeros(psi.len());
    let minus_i = C64::new(0.0, -1.0);
    ops.h_free.mul_vec_acc(minus_i, psi, &mut out);
    if k != 0.0 {
        ops.h_control.mul_vec_acc(minus_i * k, psi, &mut out);
    }
    // D(L) zt* = zt* (L - <L>)
    ops.l.mul_vec_acc(zt_star, psi, &mut out);
    // -F (L^dag - <L^dag>) L psi + F (<L^dag L> - <L^dag><L>) psi
    ops.ldl.mul_vec_acc(-f, psi, &mut out);
    ops.l.mul_vec_acc(f * mean_l.conj(), psi, &mut out);
    let scalar = -zt_star * mean_l + f * (mean_ldl - mean_l.conj() * mean_l);
    out += psi * scalar;
    out
}

/// `zt*_j = z*_j + dt * trapz_{i<=j} a*((j-i) dt) <L^dag>_i`.
pub fn shifted_noise(
    noise: &NoiseRealization,
    mean_ldag_history: &[C64],
    kernel: &CorrelationKernel,
    step: usize,
) -> C64 {
    let z_star = noise.value(step).conj();
    if step == 0 {
        return z_star;
    }
    assert!(mean_ldag_history.len() > step, "history does not cover t");
    let mut acc = C64::new(0.0, 0.0);
    for (i, mean_ldag) in mean_ldag_history.iter().enumerate().take(step + 1) {
        let w = if i == 0 || i == step { 0.5 } else { 1.0 };
        acc += kernel.value(step - i).conj() * mean_ldag * w;
    }
    z_star + acc * kernel.dt()
}

/// Everything a single trajectory reports back to the reducer.
pub struct TrajectoryOutput {
    /// `|psi><psi|` on the snapshot grid: raw for the linear solver,
    /// normalized for the nonlinear one.
    pub projectors: Vec<CMatrix>,
    /// Per-step `(t, re<L>, im<L>, norm)` for the optional debug dump.
    pub log: Vec<[f64; 4]>,
    pub max_leakage: f64,
    /// `| ||psi(t_end)|| - 1 |` (meaningful for the nonlinear solver).
    pub norm_drift: f64,
}

const NORM_UNDERFLOW: f64 = 1e-12;

/// Integrates one trajectory with the noise stream `(seed, index)`.
/// Fixed-step classical 4th order; the noise is held constant across each
/// step (it is colored, hence differentiable in distribution — no
/// stochastic-calculus correction applies).
pub fn integrate_trajectory(
    run: &QsdRun,
    ops: &MasterOperators,
    sampler: &NoiseSampler,
    index: u64,
) -> Result<TrajectoryOutput> {
    let noise = sampler.sample(run.seed, index);
    let steps = run.steps();
    let dt = run.dt;
    let trunc = run.trunc();
    let nonlinear = run.method == QsdMethod::Nonlinear;

    let mut psi = run.psi0.amplitudes.clone();
    let mut history: Vec<C64> = Vec::with_capacity(if nonlinear { steps + 1 } else { 0 });

    let mut projectors = Vec::new();
    let mut log = Vec::with_capacity(steps + 1);
    let mut max_leak: f64 = 0.0;

    let record = |psi: &CVector, projectors: &mut Vec<CMatrix>| {
        let mut proj = psi * psi.adjoint();
        if nonlinear {
            proj /= C64::new(psi.norm_squared(), 0.0);
        }
        projectors.push(proj);
    };
    record(&psi, &mut projectors);

    for step in 0..steps {
        let t = step as f64 * dt;
        let n2 = psi.norm_squared();
        if !n2.is_finite() {
            return Err(Error::Numerical(format!(
                "trajectory {index}: non-finite state at t = {t:.6}"
            )));
        }
        let mean_l = ops.l.expectation(&psi) / n2;
        log.push([t, mean_l.re, mean_l.im, n2.sqrt()]);
        max_leak = max_leak.max(hilbert::ket_leakage(&psi, &trunc));

        let z = if nonlinear {
            history.push(mean_l.conj());
            shifted_noise(&noise, &history, &run.kernel, step)
        } else {
            noise.value(step).conj()
        };

        let f1 = run.coefficient.value_at(t);
        let f2 = run.coefficient.value_at(t + 0.5 * dt);
        let f3 = run.coefficient.value_at(t + dt);
        let c1 = run.schedule.evaluate(t);
        let c2 = run.schedule.evaluate(t + 0.5 * dt);
        let c3 = run.schedule.evaluate(t + dt);
        let rhs = |psi: &CVector, f: C64, k: f64| -> CVector {
            if nonlinear {
                nonlinear_qsd_rhs(ops, psi, z, f, k)
            } else {
                linear_qsd_rhs(ops, psi, z, f, k)
            }
        };
        let half = C64::new(0.5 * dt, 0.0);
        let k1 = rhs(&psi, f1, c1);
        let k2 = rhs(&(&psi + &k1 * half), f2, c2);
        let k3 = rhs(&(&psi + &k2 * half), f2, c2);
        let k4 = rhs(&(&psi + &k3 * C64::new(dt, 0.0)), f3, c3);
        psi +=
            (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(dt / 6.0, 0.0);

        let norm = psi.norm();
        if !norm.is_finite() || norm < NORM_UNDERFLOW {
            return Err(Error::Numerical(format!(
                "trajectory {index}: norm underflow at t = {:.6}",
                t + dt
            )));
        }

        if (step + 1) % run.stride == 0 || step + 1 == steps {
            record(&psi, &mut projectors);
        }
    }

    let n2 = psi.norm_squared();
    let mean_l = ops.l.expectation(&psi) / n2;
    log.push([run.t_end, mean_l.re, mean_l.im, n2.sqrt()]);
    max_leak = max_leak.max(hilbert::ket_leakage(&psi, &trunc));

    Ok(TrajectoryOutput {
        projectors,
        log,
        max_leakage: max_leak,
        norm_drift: (n2.sqrt() - 1.0).abs(),
    })
}

/// Ensemble mean with per-snapshot jackknife standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub times: Vec<f64>,
    pub rho_mean: Vec<CMatrix>,
    pub count: usize,
    /// Frobenius-norm jackknife standard error of the mean, per snapshot.
    pub standard_error: Vec<f64>,
    /// Trajectories that failed and were resampled.
    pub failures: usize,
    pub max_leakage: f64,
    pub max_norm_drift: f64,
}

/// Runs `count` independent trajectories and averages the projectors.
/// Trajectory `slot` draws noise stream `(seed, slot)`; a failed slot is
/// resampled from streams `count, count+1, ...` in slot order. More than
/// 1% failures aborts the run. The reduction is in fixed slot order, so
/// the result is bit-identical for a given config and seed regardless of
/// worker scheduling.
pub fn run_ensemble(run: &QsdRun) -> Result<EnsembleResult> {
    run.validate()?;
    let ops = MasterOperators::new(run.omega, &run.trunc());
    let sampler = NoiseSampler::new(&run.kernel)?;
    run_ensemble_with(run, &ops, &sampler)
}

/// As `run_ensemble` but reusing prebuilt operators and noise sampler.
pub fn run_ensemble_with(
    run: &QsdRun,
    ops: &MasterOperators,
    sampler: &NoiseSampler,
) -> Result<EnsembleResult> {
    let count = run.count;
    let max_failures = (0.01 * count as f64).floor() as usize;
    let dim = run.trunc().dim();

    // First pass: one attempt per slot, in parallel, collected in order.
    let chunk = 64usize;
    let mut acc: Option<Accumulator> = None;
    let mut failed_slots: Vec<usize> = Vec::new();
    let mut failures = 0usize;
    let mut slot = 0usize;
    while slot < count {
        let hi = (slot + chunk).min(count);
        let outputs: Vec<(usize, Result<TrajectoryOutput>)> = (slot..hi)
            .into_par_iter()
            .map(|s| (s, integrate_trajectory(run, ops, sampler, s as u64)))
            .collect();
        for (s, out) in outputs {
            match out {
                Ok(o) => accumulate(&mut acc, dim, &o),
                Err(_) => {
                    failures += 1;
                    if failures > max_failures {
                        return Err(Error::RunFailure(format!(
                            "qsd ensemble: {failures} failed trajectories out of {count} exceeds the 1% budget"
                        )));
                    }
                    failed_slots.push(s);
                }
            }
        }
        slot = hi;
    }

    // Resample failed slots sequentially, in slot order, from fresh streams.
    let mut next_stream = count as u64;
    for _slot in failed_slots {
        loop {
            let stream = next_stream;
            next_stream += 1;
            match integrate_trajectory(run, ops, sampler, stream) {
                Ok(o) => {
                    accumulate(&mut acc, dim, &o);
                    break;
                }
                Err(_) => {
                    failures += 1;
                    if failures > max_failures {
                        return Err(Error::RunFailure(format!(
                            "qsd ensemble: {failures} failed trajectories out of {count} exceeds the 1% budget"
                        )));
                    }
                }
            }
        }
    }

    let acc = acc.expect("count >= 1");
    let n = count as f64;
    let mut rho_mean = Vec::with_capacity(acc.sum.len());
    let mut standard_error = Vec::with_capacity(acc.sum.len());
    for (s, &sq) in acc.sum.iter().zip(acc.sum_sq.iter()) {
        let mean = s / C64::new(n, 0.0);
        let mean = hilbert::hermitize(&mean);
        // sum ||x_i - mean||_F^2 = sum ||x_i||^2 - n ||mean||^2
        let spread = (sq - n * mean.iter().map(|z| z.norm_sqr()).sum::<f64>()).max(0.0);
        let se = if count > 1 {
            (spread / (n * (n - 1.0))).sqrt()
        } else {
            0.0
        };
        rho_mean.push(mean);
        standard_error.push(se);
    }

    let steps = run.steps();
    let mut times = Vec::with_capacity(rho_mean.len());
    times.push(0.0);
    for step in 0..steps {
        if (step + 1) % run.stride == 0 || step + 1 == steps {
            times.push((step + 1) as f64 * run.dt);
        }
    }

    Ok(EnsembleResult {
        times,
        rho_mean,
        count,
        standard_error,
        failures,
        max_leakage: acc.max_leakage,
        max_norm_drift: acc.max_norm_drift,
    })
}

struct Accumulator {
    sum: Vec<CMatrix>,
    sum_sq: Vec<f64>,
    max_leakage: f64,
    max_norm_drift: f64,
}

fn accumulate(acc: &mut Option<Accumulator>, dim: usize, out: &TrajectoryOutput) {
    let a = acc.get_or_insert_with(|| Accumulator {
        sum: vec![CMatrix::zeros(dim, dim); out.projectors.len()],
        sum_sq: vec![0.0; out.projectors.len()],
        max_leakage: 0.0,
        max_norm_drift: 0.0,
    });
    for (i, p) in out.projectors.iter().enumerate() {
        a.sum[i] += p;
        a.sum_sq[i] += p.iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    a.max_leakage = a.max_leakage.max(out.max_leakage);
    a.max_norm_drift = a.max_norm_drift.max(out.norm_drift);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{BathSpec, KernelKind};
    use crate::coefficients::{self, CoefficientSpec};
    use crate::hilbert::{prepare_state, StateKind};
    use crate::master::{integrate_master, MasterRun};
    use crate::observables::trace_distance;
    use approx::assert_relative_eq;

    fn vacuum(levels: usize) -> Ket {
        let t = TruncationSpec::new(levels).unwrap();
        prepare_state(&StateKind::Fock { n1: 0, n2: 0 }, &t).unwrap()
    }

    fn lorentzian_setup(
        gamma_coupling: f64,
        gamma_env: f64,
        omega: f64,
        dt: f64,
        steps: usize,
    ) -> (CoefficientTrajectory, CorrelationKernel) {
        let spec = CoefficientSpec::new(gamma_coupling, gamma_env, omega);
        let coeff = coefficients::analytic_trajectory(&spec, dt, steps).unwrap();
        let bath = BathSpec::lorentzian(gamma_coupling, gamma_env);
        let kernel = crate::bath::tabulate_lorentzian(&bath, dt, steps + 1).unwrap();
        (coeff, kernel)
    }

    fn zero_kernel(dt: f64, n: usize) -> CorrelationKernel {
        CorrelationKernel::new(dt, vec![C64::new(0.0, 0.0); n], KernelKind::Tabulated)
    }

    #[test]
    fn vacuum_is_dark_for_both_rhs() {
        let psi = vacuum(4);
        let ops = MasterOperators::new(1.0, &psi.trunc);
        let z = C64::new(0.0, 0.0);
        let f = C64::new(0.3, -0.1);
        let lin = linear_qsd_rhs(&ops, &psi.amplitudes, z, f, 0.0);
        let non = nonlinear_qsd_rhs(&ops, &psi.amplitudes, z, f, 0.0);
        assert!(lin.norm() < 1e-14);
        assert!(non.norm() < 1e-14);
    }

    #[test]
    fn closed_system_conserves_norm() {
        // F = 0 and no noise: pure Schroedinger flow.
        let t = TruncationSpec::new(6).unwrap();
        let psi0 = prepare_state(
            &StateKind::Coherent {
                alpha1: (0.4, 0.0),
                alpha2: (0.2, 0.1),
            },
            &t,
        )
        .unwrap();
        let dt = 1e-3;
        let steps = 2000;
        let run = QsdRun {
            psi0,
            omega: 1.0,
            t_end: 2.0,
            dt,
            coefficient: coefficients::zero_trajectory(dt, steps),
            kernel: zero_kernel(dt, steps + 1),
            schedule: ControlSchedule::constant(0.1),
            stride: 500,
            seed: 7,
            count: 1,
            method: QsdMethod::Linear,
        };
        let ops = MasterOperators::new(run.omega, &run.trunc());
        let sampler = NoiseSampler::new(&run.kernel).unwrap();
        let out = integrate_trajectory(&run, &ops, &sampler, 0).unwrap();
        for row in &out.log {
            assert!((row[3] - 1.0).abs() < 1e-8, "norm drifted to {}", row[3]);
        }
    }

    #[test]
    fn single_deterministic_trajectory_equals_unitary_projector() {
        // count = 1, zero noise, F = 0: rho_mean is the unitary projector.
        let t = TruncationSpec::new(5).unwrap();
        let psi0 = prepare_state(
            &StateKind::Coherent {
                alpha1: (0.3, 0.0),
                alpha2: (0.0, 0.0),
            },
            &t,
        )
        .unwrap();
        let dt = 1e-3;
        let steps = 1000;
        let run = QsdRun {
            psi0: psi0.clone(),
            omega: 1.0,
            t_end: 1.0,
            dt,
            coefficient: coefficients::zero_trajectory(dt, steps),
            kernel: zero_kernel(dt, steps + 1),
            schedule: ControlSchedule::constant(0.0),
            stride: 1000,
            seed: 1,
            count: 1,
            method: QsdMethod::Linear,
        };
        let out = run_ensemble(&run).unwrap();
        // free evolution of a coherent state: alpha -> alpha e^{-i t}
        let rotated = prepare_state(
            &StateKind::Coherent {
                alpha1: (0.3 * 1.0f64.cos(), -0.3 * 1.0f64.sin()),
                alpha2: (0.0, 0.0),
            },
            &t,
        )
        .unwrap()
        .to_density();
        let d = trace_distance(&out.rho_mean[1], &rotated).unwrap();
        assert!(d < 1e-6, "trace distance {d}");
    }

    #[test]
    fn shifted_noise_matches_closed_form_for_constant_history() {
        // a(tau) = (G g / 2) e^{-g tau} (Omega = 0), <L^dag> = c:
        // shift(t) = c (G/2) (1 - e^{-g t}).
        let (gc, ge) = (1.0, 3.0);
        let dt = 1e-3;
        let steps = 2000;
        let bath = BathSpec::lorentzian(gc, ge);
        let kernel = crate::bath::tabulate_lorentzian(&bath, dt, steps + 1).unwrap();
        let c = C64::new(0.4, -0.2);
        let history = vec![c; steps + 1];
        let noise = NoiseRealization {
            dt,
            values: vec![C64::new(0.0, 0.0); steps + 1],
            seed: 0,
            index: 0,
        };
        for &step in &[0usize, 100, 700, 2000] {
            let t = step as f64 * dt;
            let exact = c * (gc / 2.0) * (1.0 - (-ge * t).exp());
            let got = shifted_noise(&noise, &history, &kernel, step);
            assert!((got - exact).norm() < 1e-5, "step {step}: {got} vs {exact}");
        }
    }

    #[test]
    fn ensemble_is_bit_deterministic() {
        let dt = 1e-2;
        let steps = 50;
        let (coeff, kernel) = lorentzian_setup(1.0, 5.0, 0.0, dt, steps);
        let run = QsdRun {
            psi0: vacuum(3),
            omega: 0.0,
            t_end: 0.5,
            dt,
            coefficient: coeff,
            kernel,
            schedule: ControlSchedule::constant(0.2),
            stride: 10,
            seed: 42,
            count: 24,
            method: QsdMethod::Nonlinear,
        };
        let a = run_ensemble(&run).unwrap();
        let b = run_ensemble(&run).unwrap();
        assert_eq!(a.standard_error, b.standard_error);
        for (x, y) in a.rho_mean.iter().zip(b.rho_mean.iter()) {
            assert!(x.iter().zip(y.iter()).all(|(p, q)| p == q));
        }
    }

    #[test]
    fn standard_error_follows_monte_carlo_scaling() {
        let dt = 1e-2;
        let steps = 50;
        let t = TruncationSpec::new(2).unwrap();
        let psi0 = prepare_state(&StateKind::Fock { n1: 1, n2: 0 }, &t).unwrap();
        let (coeff, kernel) = lorentzian_setup(1.0, 5.0, 0.0, dt, steps);
        let base = QsdRun {
            psi0,
            omega: 0.0,
            t_end: 0.5,
            dt,
            coefficient: coeff,
            kernel,
            schedule: ControlSchedule::constant(0.0),
            stride: 50,
            seed: 11,
            count: 1000,
            method: QsdMethod::Linear,
        };
        let mut ses = Vec::new();
        for count in [1000usize, 2000, 4000] {
            let mut run = base.clone();
            run.count = count;
            let out = run_ensemble(&run).unwrap();
            ses.push(*out.standard_error.last().unwrap());
        }
        for w in ses.windows(2) {
            let ratio = w[1] / w[0];
            let target = 1.0 / 2.0f64.sqrt();
            assert!(
                (ratio - target).abs() < 0.2 * target,
                "scaling ratio {ratio} vs {target}"
            );
        }
    }

    #[test]
    fn nonlinear_norm_drift_stays_small() {
        let dt = 1e-3;
        let steps = 10_000;
        let t = TruncationSpec::new(4).unwrap();
        let psi0 = prepare_state(
            &StateKind::Coherent {
                alpha1: (0.3, 0.0),
                alpha2: (-0.3, 0.0),
            },
            &t,
        )
        .unwrap();
        let (coeff, kernel) = lorentzian_setup(1.0, 5.0, 0.0, dt, steps);
        let run = QsdRun {
            psi0,
            omega: 0.0,
            t_end: 10.0,
            dt,
            coefficient: coeff,
            kernel,
            schedule: ControlSchedule::constant(0.0),
            stride: 1000,
            seed: 3,
            count: 1,
            method: QsdMethod::Nonlinear,
        };
        let ops = MasterOperators::new(run.omega, &run.trunc());
        let sampler = NoiseSampler::new(&run.kernel).unwrap();
        for index in 0..3u64 {
            let out = integrate_trajectory(&run, &ops, &sampler, index).unwrap();
            let worst = out
                .log
                .iter()
                .map(|r| (r[3] - 1.0).abs())
                .fold(0.0, f64::max);
            assert!(worst < 1e-3, "trajectory {index}: norm drift {worst}");
        }
    }

    #[test]
    fn linear_ensemble_tracks_master_equation() {
        let dt = 1e-3;
        let steps = 1000;
        let trunc = TruncationSpec::new(3).unwrap();
        let psi0 = prepare_state(&StateKind::Fock { n1: 1, n2: 0 }, &trunc).unwrap();
        let (coeff, kernel) = lorentzian_setup(1.0, 5.0, 0.0, dt, steps);
        let run = QsdRun {
            psi0: psi0.clone(),
            omega: 0.0,
            t_end: 1.0,
            dt,
            coefficient: coeff.clone(),
            kernel,
            schedule: ControlSchedule::constant(0.0),
            stride: 500,
            seed: 19,
            count: 800,
            method: QsdMethod::Linear,
        };
        let ensemble = run_ensemble(&run).unwrap();
        let master = integrate_master(&MasterRun {
            rho0: psi0.to_density(),
            trunc,
            omega: 0.0,
            t_end: 1.0,
            dt,
            coefficient: coeff,
            schedule: ControlSchedule::constant(0.0),
            stride: 500,
        })
        .unwrap();
        assert_eq!(ensemble.times, master.times);
        for (i, (a, b)) in ensemble
            .rho_mean
            .iter()
            .zip(master.snapshots.iter())
            .enumerate()
        {
            // renormalize the linear mean before comparing
            let tr = a.trace().re;
            let a = a / C64::new(tr, 0.0);
            let d = trace_distance(&a, b).unwrap();
            assert!(d < 0.1, "snapshot {i}: trace distance {d}");
        }
        assert_relative_eq!(ensemble.times[2], 1.0, epsilon = 1e-12);
    }
}
