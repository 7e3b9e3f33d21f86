//! Run orchestration: builds solver inputs from an `ExperimentConfig`,
//! executes the requested solver, and persists a self-contained run
//! directory (config echo, manifest, observables CSV, plot script).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::bath::CorrelationKernel;
use crate::coefficients::{self, CoefficientTrajectory};
use crate::config::{ExperimentConfig, SolverMethod};
use crate::control::{ControlSchedule, SweepSummary};
use crate::gaussian::{self, CovarianceMatrix};
use crate::hilbert::{self, StateKind, TruncationSpec};
use crate::master::{integrate_master, MasterRun};
use crate::observables;
use crate::qsd::{EnsembleResult, QsdMethod, QsdRun};
use crate::{CMatrix, Error, Result, C64};

/// Environment variable overriding the default output root (`runs`).
pub const OUT_ROOT_ENV: &str = "NMQSD_OUT_ROOT";

/// Named real columns over a shared, strictly increasing time column.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub time: Vec<f64>,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl TimeSeries {
    pub fn new(time: Vec<f64>) -> Result<Self> {
        if time.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(
                "time series: time must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            time,
            columns: Vec::new(),
        })
    }

    pub fn push_column(&mut self, name: &str, values: Vec<f64>) -> Result<()> {
        if values.len() != self.time.len() {
            return Err(Error::Config(format!(
                "time series: column '{name}' has {} rows, expected {}",
                values.len(),
                self.time.len()
            )));
        }
        self.columns.push((name.to_string(), values));
        Ok(())
    }

    /// RFC-4180-style CSV: header row, '.' decimal separator.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "t")?;
        for (name, _) in &self.columns {
            write!(w, ",{name}")?;
        }
        writeln!(w)?;
        for (i, t) in self.time.iter().enumerate() {
            write!(w, "{t:.9}")?;
            for (_, values) in &self.columns {
                write!(w, ",{:.12e}", values[i])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Run metadata persisted as `manifest.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: u32,
    pub solver: String,
    pub seed: u64,
    pub trajectories: usize,
    pub wall_time_s: f64,
    pub failed_trajectories: usize,
    pub max_leakage: f64,
    pub max_trace_drift: f64,
    pub max_norm_drift: f64,
    pub status: String,
}

#[derive(Debug)]
pub struct RunArtifacts {
    pub dir: PathBuf,
    pub manifest: Manifest,
    pub observables: TimeSeries,
}

/// Snapshot observables shared by the Fock-space solvers.
struct FockObservables {
    en: Vec<f64>,
    l1: Vec<f64>,
    energy: Vec<f64>,
    purity: Vec<f64>,
}

fn fock_observables(
    times: &[f64],
    snapshots: &[CMatrix],
    normalize: bool,
    omega: f64,
    schedule: &ControlSchedule,
    trunc: &TruncationSpec,
) -> FockObservables {
    let mut out = FockObservables {
        en: Vec::with_capacity(times.len()),
        l1: Vec::with_capacity(times.len()),
        energy: Vec::with_capacity(times.len()),
        purity: Vec::with_capacity(times.len()),
    };
    for (t, rho) in times.iter().zip(snapshots.iter()) {
        let rho = if normalize {
            let tr = rho.trace().re;
            rho / C64::new(tr, 0.0)
        } else {
            rho.clone()
        };
        let k = schedule.evaluate(*t);
        out.en.push(observables::log_negativity_fock(&rho, trunc));
        out.l1.push(observables::l1_coherence(&rho));
        out.energy
            .push(observables::mean_energy(&rho, omega, k, trunc));
        out.purity.push(observables::purity(&rho));
    }
    out
}

fn observables_series(
    times: Vec<f64>,
    obs: FockObservables,
    coefficient: &CoefficientTrajectory,
) -> Result<TimeSeries> {
    let re_f: Vec<f64> = times.iter().map(|&t| coefficient.value_at(t).re).collect();
    let im_f: Vec<f64> = times.iter().map(|&t| coefficient.value_at(t).im).collect();
    let mut series = TimeSeries::new(times)?;
    series.push_column("E_N", obs.en)?;
    series.push_column("l1_coherence", obs.l1)?;
    series.push_column("energy", obs.energy)?;
    series.push_column("purity", obs.purity)?;
    series.push_column("re_F", re_f)?;
    series.push_column("im_F", im_f)?;
    Ok(series)
}

fn coefficient_for(config: &ExperimentConfig) -> Result<CoefficientTrajectory> {
    coefficients::trajectory_for_bath(
        &config.bath.to_spec(),
        config.system.omega,
        config.grid.dt,
        config.steps(),
    )
}

fn kernel_for(config: &ExperimentConfig) -> Result<CorrelationKernel> {
    coefficients::kernel_for_bath(&config.bath.to_spec(), config.grid.dt, config.steps() + 1)
}

fn prepared_density(config: &ExperimentConfig) -> Result<CMatrix> {
    let trunc = TruncationSpec::new(config.system.levels_per_mode)?;
    Ok(hilbert::prepare_state(&config.initial_state, &trunc)?.to_density())
}

fn master_run(config: &ExperimentConfig, schedule: &ControlSchedule) -> Result<MasterRun> {
    Ok(MasterRun {
        rho0: prepared_density(config)?,
        trunc: TruncationSpec::new(config.system.levels_per_mode)?,
        omega: config.system.omega,
        t_end: config.grid.t_end,
        dt: config.grid.dt,
        coefficient: coefficient_for(config)?,
        schedule: schedule.clone(),
        stride: config.output.stride,
    })
}

fn qsd_run(config: &ExperimentConfig, method: QsdMethod) -> Result<QsdRun> {
    let trunc = TruncationSpec::new(config.system.levels_per_mode)?;
    Ok(QsdRun {
        psi0: hilbert::prepare_state(&config.initial_state, &trunc)?,
        omega: config.system.omega,
        t_end: config.grid.t_end,
        dt: config.grid.dt,
        coefficient: coefficient_for(config)?,
        kernel: kernel_for(config)?,
        schedule: config.control.clone(),
        stride: config.output.stride,
        seed: config.ensemble.seed,
        count: config.ensemble.count,
        method,
    })
}

/// Initial covariance state for the Gaussian solver; rejects states that
/// are not Gaussian (Fock n > 0, cat superpositions).
pub fn gaussian_initial_state(kind: &StateKind) -> Result<CovarianceMatrix> {
    match *kind {
        StateKind::Fock { n1: 0, n2: 0 } => Ok(CovarianceMatrix::vacuum()),
        StateKind::Fock { .. } => Err(Error::Config(
            "initial_state: excited Fock states are not Gaussian; use the master or QSD solvers"
                .into(),
        )),
        StateKind::Cat { .. } => Err(Error::Config(
            "initial_state: cat states are not Gaussian; use the master or QSD solvers".into(),
        )),
        StateKind::Coherent { alpha1, alpha2 } => {
            let s = std::f64::consts::SQRT_2;
            let mean = Vector4::new(s * alpha1.0, s * alpha1.1, s * alpha2.0, s * alpha2.1);
            Ok(CovarianceMatrix::new(Matrix4::identity() * 0.5, mean))
        }
        StateKind::TwoModeSqueezed { r } => Ok(gaussian::cm_two_mode_squeezed(r)),
    }
}

fn gaussian_energy(cm: &CovarianceMatrix, omega: f64, k: f64) -> f64 {
    let s = &cm.sigma;
    let m = &cm.mean;
    let second = |i: usize, j: usize| s[(i, j)] + m[i] * m[j];
    let n1 = 0.5 * (second(0, 0) + second(1, 1) - 1.0);
    let n2 = 0.5 * (second(2, 2) + second(3, 3) - 1.0);
    // control term k (a1 - a2 + h.c.)^2 = 2 k (x1 - x2)^2
    let x_rel_sq = second(0, 0) + second(2, 2) - 2.0 * second(0, 2);
    omega * (n1 + n2) + 2.0 * k * x_rel_sq
}

fn gaussian_series(
    out: &gaussian::GaussianOutput,
    config: &ExperimentConfig,
    coefficient: &CoefficientTrajectory,
) -> Result<TimeSeries> {
    let n = out.times.len();
    let mut en = Vec::with_capacity(n);
    let mut energy = Vec::with_capacity(n);
    let mut purity = Vec::with_capacity(n);
    for (t, cm) in out.times.iter().zip(out.states.iter()) {
        let k = config.control.evaluate(*t);
        en.push(gaussian::log_negativity_cm(cm));
        energy.push(gaussian_energy(cm, config.system.omega, k));
        purity.push(1.0 / (4.0 * cm.sigma.determinant().max(f64::MIN_POSITIVE).sqrt()));
    }
    let re_f: Vec<f64> = out
        .times
        .iter()
        .map(|&t| coefficient.value_at(t).re)
        .collect();
    let im_f: Vec<f64> = out
        .times
        .iter()
        .map(|&t| coefficient.value_at(t).im)
        .collect();
    let mut series = TimeSeries::new(out.times.clone())?;
    series.push_column("E_N", en)?;
    // off-diagonal coherence is a Fock-basis notion; undefined on the CM path
    series.push_column("l1_coherence", vec![f64::NAN; n])?;
    series.push_column("energy", energy)?;
    series.push_column("purity", purity)?;
    series.push_column("re_F", re_f)?;
    series.push_column("im_F", im_f)?;
    Ok(series)
}

fn write_run_dir(
    dir: &Path,
    config: &ExperimentConfig,
    series: &TimeSeries,
    manifest: &Manifest,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config.toml"), config.to_toml_string()?)?;
    let mut csv = Vec::new();
    series.write_csv(&mut csv)?;
    fs::write(dir.join("observables.csv"), csv)?;
    fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(manifest).map_err(|e| Error::Config(e.to_string()))?,
    )?;
    fs::write(dir.join("plot.py"), PLOT_SCRIPT)?;
    Ok(())
}

const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Plots the observables of this run directory."""
import csv
import sys
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = Path(__file__).resolve().parent
rows = list(csv.DictReader(open(here / "observables.csv")))
t = [float(r["t"]) for r in rows]

fig, axes = plt.subplots(2, 2, figsize=(10, 7), sharex=True)
panels = [
    ("E_N", "log-negativity"),
    ("energy", "mean energy"),
    ("purity", "purity"),
    ("re_F", "Re F / Im F"),
]
for ax, (col, label) in zip(axes.flat, panels):
    ax.plot(t, [float(r[col]) for r in rows], lw=1.2, label=col)
    if col == "re_F":
        ax.plot(t, [float(r["im_F"]) for r in rows], lw=1.2, label="im_F")
        ax.legend()
    ax.set_ylabel(label)
    ax.grid(alpha=0.3)
for ax in axes[1]:
    ax.set_xlabel("t")
fig.tight_layout()
out = here / "observables.png"
fig.savefig(out, dpi=150)
print(out)
"#;

fn manifest(
    config: &ExperimentConfig,
    solver: &str,
    wall: f64,
    failures: usize,
    max_leakage: f64,
    max_trace_drift: f64,
    max_norm_drift: f64,
) -> Manifest {
    Manifest {
        schema: crate::config::SCHEMA_VERSION,
        solver: solver.to_string(),
        seed: config.ensemble.seed,
        trajectories: config.ensemble.count,
        wall_time_s: wall,
        failed_trajectories: failures,
        max_leakage,
        max_trace_drift,
        max_norm_drift,
        status: "ok".to_string(),
    }
}

fn install_workers<T>(workers: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T>
where
    T: Send,
{
    if workers == 0 {
        f()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Config(format!("workers: {e}")))?;
        pool.install(f)
    }
}

/// Runs the solver selected by `config.solver.method` and persists the run
/// directory. Returns the artifacts in memory as well.
pub fn run(config: &ExperimentConfig, dir: &Path) -> Result<RunArtifacts> {
    config.validate()?;
    let started = Instant::now();
    let coefficient = coefficient_for(config)?;

    let (series, failures, leak, drift, norm_drift, qsd_result): (
        TimeSeries,
        usize,
        f64,
        f64,
        f64,
        Option<EnsembleResult>,
    ) = match config.solver.method {
        SolverMethod::Master => {
            let run = master_run(config, &config.control)?;
            let out = integrate_master(&run)?;
            let obs = fock_observables(
                &out.times,
                &out.snapshots,
                false,
                config.system.omega,
                &config.control,
                &run.trunc,
            );
            let series = observables_series(out.times.clone(), obs, &coefficient)?;
            (series, 0, out.max_leakage, out.max_trace_drift, 0.0, None)
        }
        SolverMethod::LinearQsd | SolverMethod::NonlinearQsd => {
            let method = if config.solver.method == SolverMethod::LinearQsd {
                QsdMethod::Linear
            } else {
                QsdMethod::Nonlinear
            };
            let run = qsd_run(config, method)?;
            let out = install_workers(config.ensemble.workers, || crate::qsd::run_ensemble(&run))?;
            let obs = fock_observables(
                &out.times,
                &out.rho_mean,
                method == QsdMethod::Linear,
                config.system.omega,
                &config.control,
                &run.trunc(),
            );
            let series = observables_series(out.times.clone(), obs, &coefficient)?;
            (
                series,
                out.failures,
                out.max_leakage,
                0.0,
                out.max_norm_drift,
                Some(out),
            )
        }
        SolverMethod::Gaussian => {
            let sigma0 = gaussian_initial_state(&config.initial_state)?;
            let out = gaussian::propagate_cm(
                &sigma0,
                &coefficient,
                &config.control,
                config.system.omega,
                config.grid.t_end,
                config.grid.dt,
                config.output.stride,
            )?;
            let series = gaussian_series(&out, config, &coefficient)?;
            (series, 0, 0.0, 0.0, 0.0, None)
        }
    };

    let man = manifest(
        config,
        &config.solver.method.to_string(),
        started.elapsed().as_secs_f64(),
        failures,
        leak,
        drift,
        norm_drift,
    );
    write_run_dir(dir, config, &series, &man)?;

    if config.output.trajectory_dump {
        if let Some(_result) = &qsd_result {
            dump_debug_trajectories(config, dir)?;
        }
    }

    Ok(RunArtifacts {
        dir: dir.to_path_buf(),
        manifest: man,
        observables: series,
    })
}

/// Per-trajectory debug CSVs `(t, re<L>, im<L>, norm)` for the first few
/// noise streams.
fn dump_debug_trajectories(config: &ExperimentConfig, dir: &Path) -> Result<()> {
    let method = if config.solver.method == SolverMethod::NonlinearQsd {
        QsdMethod::Nonlinear
    } else {
        QsdMethod::Linear
    };
    let run = qsd_run(config, method)?;
    let ops = crate::master::MasterOperators::new(run.omega, &run.trunc());
    let sampler = crate::bath::NoiseSampler::new(&run.kernel)?;
    let sub = dir.join("trajectories");
    fs::create_dir_all(&sub)?;
    for index in 0..config.ensemble.count.min(8) as u64 {
        let out = crate::qsd::integrate_trajectory(&run, &ops, &sampler, index)?;
        let mut text = String::from("t,re_mean_L,im_mean_L,norm\n");
        for row in &out.log {
            text.push_str(&format!(
                "{:.9},{:.12e},{:.12e},{:.12e}\n",
                row[0], row[1], row[2], row[3]
            ));
        }
        fs::write(sub.join(format!("trajectory_{index:04}.csv")), text)?;
    }
    Ok(())
}

/// Compare mode: master equation vs a QSD ensemble on the same grid.
/// Emits `compare.csv` with both E_N columns, the per-snapshot trace
/// distance, and the ensemble standard error.
pub fn compare(config: &ExperimentConfig, dir: &Path) -> Result<RunArtifacts> {
    config.validate()?;
    let started = Instant::now();
    let method = if config.solver.method == SolverMethod::NonlinearQsd {
        QsdMethod::Nonlinear
    } else {
        QsdMethod::Linear
    };
    let trunc = TruncationSpec::new(config.system.levels_per_mode)?;

    let mrun = master_run(config, &config.control)?;
    let master_out = integrate_master(&mrun)?;
    let qrun = qsd_run(config, method)?;
    let ensemble = install_workers(config.ensemble.workers, || crate::qsd::run_ensemble(&qrun))?;

    if master_out.times != ensemble.times {
        return Err(Error::Numerical(
            "compare: master and ensemble snapshot grids disagree".into(),
        ));
    }

    let mut en_master = Vec::new();
    let mut en_qsd = Vec::new();
    let mut dist = Vec::new();
    for (rho_m, rho_q) in master_out.snapshots.iter().zip(ensemble.rho_mean.iter()) {
        let rho_q = if method == QsdMethod::Linear {
            let tr = rho_q.trace().re;
            rho_q / C64::new(tr, 0.0)
        } else {
            rho_q.clone()
        };
        en_master.push(observables::log_negativity_fock(rho_m, &trunc));
        en_qsd.push(observables::log_negativity_fock(&rho_q, &trunc));
        dist.push(observables::trace_distance(rho_m, &rho_q)?);
    }

    let mut series = TimeSeries::new(master_out.times.clone())?;
    series.push_column("E_N_master", en_master)?;
    series.push_column("E_N_qsd", en_qsd)?;
    series.push_column("trace_distance", dist)?;
    series.push_column("qsd_standard_error", ensemble.standard_error.clone())?;

    let man = manifest(
        config,
        &format!("compare/{method:?}").to_lowercase(),
        started.elapsed().as_secs_f64(),
        ensemble.failures,
        ensemble.max_leakage.max(master_out.max_leakage),
        master_out.max_trace_drift,
        ensemble.max_norm_drift,
    );
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config.toml"), config.to_toml_string()?)?;
    let mut csv = Vec::new();
    series.write_csv(&mut csv)?;
    fs::write(dir.join("compare.csv"), csv)?;
    fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&man).map_err(|e| Error::Config(e.to_string()))?,
    )?;

    Ok(RunArtifacts {
        dir: dir.to_path_buf(),
        manifest: man,
        observables: series,
    })
}

/// Frequency sweep: one run per drive frequency with a sinusoidal schedule,
/// summarized by late-time (final 10% of snapshots) energy and
/// log-negativity plus the peak log-negativity.
pub fn sweep(config: &ExperimentConfig, dir: &Path) -> Result<Vec<SweepSummary>> {
    config.validate()?;
    let sweep_cfg = config
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("sweep: config has no [sweep] section".into()))?
        .clone();
    if !matches!(
        config.solver.method,
        SolverMethod::Master | SolverMethod::Gaussian
    ) {
        return Err(Error::Config(
            "sweep: only the master and gaussian solvers are supported".into(),
        ));
    }

    let mut summaries = Vec::new();
    for (i, freq) in config.sweep_frequencies().into_iter().enumerate() {
        let schedule = ControlSchedule::Sinusoid {
            k0: sweep_cfg.k0,
            amplitude: sweep_cfg.amplitude,
            drive_freq: freq,
            phase: sweep_cfg.phase,
        };
        let mut point = config.clone();
        point.control = schedule;
        point.sweep = None;
        let sub = dir.join(format!("freq_{i:03}"));
        let artifacts = run(&point, &sub)?;
        summaries.push(summarize(freq, &artifacts.observables)?);
    }

    let mut csv = String::from("drive_freq,late_energy,late_log_negativity,peak_log_negativity\n");
    for s in &summaries {
        csv.push_str(&format!(
            "{:.9},{:.12e},{:.12e},{:.12e}\n",
            s.drive_freq, s.late_energy, s.late_log_negativity, s.peak_log_negativity
        ));
    }
    fs::create_dir_all(dir)?;
    fs::write(dir.join("sweep.csv"), csv)?;
    Ok(summaries)
}

fn summarize(freq: f64, series: &TimeSeries) -> Result<SweepSummary> {
    let col = |name: &str| -> Result<&Vec<f64>> {
        series
            .columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
            .ok_or_else(|| Error::Numerical(format!("sweep: missing column {name}")))
    };
    let energy = col("energy")?;
    let en = col("E_N")?;
    let n = series.time.len();
    let tail = (n as f64 * 0.1).ceil().max(1.0) as usize;
    let late = |v: &[f64]| v[n - tail..].iter().sum::<f64>() / tail as f64;
    Ok(SweepSummary {
        drive_freq: freq,
        late_energy: late(energy),
        late_log_negativity: late(en),
        peak_log_negativity: en.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Default output root: `$NMQSD_OUT_ROOT` or `runs`.
pub fn default_out_root() -> PathBuf {
    std::env::var_os(OUT_ROOT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("runs"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;

    fn base_config(method: &str) -> ExperimentConfig {
        let text = format!(
            r#"
schema = 1

[system]
omega = 1.0
levels_per_mode = 3

[bath]
family = "lorentzian"
gamma_coupling = 1.0
gamma_env = 3.0

[grid]
t_end = 0.5
dt = 0.001

[initial_state]
kind = "two_mode_squeezed"
r = 0.2

[control]
variant = "constant"
k0 = 0.0

[solver]
method = "{method}"

[ensemble]
count = 40
seed = 5

[output]
stride = 100
"#
        );
        ExperimentConfig::from_toml_str(&text).unwrap()
    }

    #[test]
    fn master_run_directory_is_complete_and_deterministic() {
        let tmp = tempfile::tempdir().unwrap();
        let config = base_config("master");
        let a = tmp.path().join("a");
        let b = tmp.path().join("b");
        run(&config, &a).unwrap();
        run(&config, &b).unwrap();
        for name in ["config.toml", "observables.csv", "manifest.json", "plot.py"] {
            assert!(a.join(name).exists(), "{name} missing");
        }
        let csv_a = fs::read(a.join("observables.csv")).unwrap();
        let csv_b = fs::read(b.join("observables.csv")).unwrap();
        assert_eq!(csv_a, csv_b);
        let header = String::from_utf8_lossy(&csv_a);
        assert!(header.starts_with("t,E_N,l1_coherence,energy,purity,re_F,im_F"));
    }

    #[test]
    fn qsd_run_emits_observables() {
        let tmp = tempfile::tempdir().unwrap();
        let config = base_config("linear_qsd");
        let out = run(&config, tmp.path()).unwrap();
        assert_eq!(out.manifest.failed_trajectories, 0);
        assert_eq!(out.observables.time.first(), Some(&0.0));
        assert!((out.observables.time.last().unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn gaussian_solver_rejects_non_gaussian_states() {
        let tmp = tempfile::tempdir().unwrap();
        let mut config = base_config("gaussian");
        config.initial_state = StateKind::Cat {
            alpha: (0.5, 0.0),
            parity: 0,
        };
        let err = run(&config, tmp.path()).unwrap_err();
        assert!(err.to_string().contains("not Gaussian"), "{err}");
        config.initial_state = StateKind::TwoModeSqueezed { r: 0.2 };
        run(&config, tmp.path()).unwrap();
    }

    #[test]
    fn compare_emits_trace_distance_column() {
        let tmp = tempfile::tempdir().unwrap();
        let mut config = base_config("linear_qsd");
        config.ensemble.count = 150;
        let out = compare(&config, tmp.path()).unwrap();
        let dist = out
            .observables
            .columns
            .iter()
            .find(|(n, _)| n == "trace_distance")
            .unwrap();
        assert!(dist.1.iter().all(|d| d.is_finite() && *d < 0.5));
        assert!(tmp.path().join("compare.csv").exists());
    }

    #[test]
    fn sweep_emits_one_row_per_frequency() {
        let tmp = tempfile::tempdir().unwrap();
        let mut config = base_config("gaussian");
        config.sweep = Some(crate::config::SweepSection {
            freq_min: 1.5,
            freq_max: 2.5,
            points: 3,
            k0: 0.1,
            amplitude: 0.1,
            phase: 0.0,
        });
        let summaries = sweep(&config, tmp.path()).unwrap();
        assert_eq!(summaries.len(), 3);
        let csv = fs::read_to_string(tmp.path().join("sweep.csv")).unwrap();
        assert_eq!(csv.lines().count(), 4);
        // order must not depend on evaluation details
        assert!(summaries
            .windows(2)
            .all(|w| w[0].drive_freq < w[1].drive_freq));
    }
}
