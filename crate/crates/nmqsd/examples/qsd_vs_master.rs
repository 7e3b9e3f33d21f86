//! Stochastic unraveling check: the ensemble mean of linear QSD
//! trajectories reproduces the master-equation state.

use nmqsd::bath::{tabulate_lorentzian, BathSpec};
use nmqsd::coefficients::{analytic_trajectory, CoefficientSpec};
use nmqsd::control::ControlSchedule;
use nmqsd::hilbert::{prepare_state, StateKind, TruncationSpec};
use nmqsd::master::{integrate_master, MasterRun};
use nmqsd::observables::{log_negativity_fock, trace_distance};
use nmqsd::qsd::{run_ensemble, QsdMethod, QsdRun};
use nmqsd::C64;

fn main() -> nmqsd::Result<()> {
    let (gamma_coupling, gamma_env, omega) = (1.0, 3.0, 0.0);
    let (t_end, dt, stride) = (2.0f64, 1e-3f64, 500);
    let steps = (t_end / dt).round() as usize;
    let count = 1000;

    let trunc = TruncationSpec::new(5)?;
    let psi0 = prepare_state(&StateKind::TwoModeSqueezed { r: 0.3 }, &trunc)?;
    let spec = CoefficientSpec::new(gamma_coupling, gamma_env, omega);
    let coefficient = analytic_trajectory(&spec, dt, steps)?;
    let bath = BathSpec::lorentzian(gamma_coupling, gamma_env);
    let kernel = tabulate_lorentzian(&bath, dt, steps + 1)?;
    let schedule = ControlSchedule::constant(0.0);

    let ensemble = run_ensemble(&QsdRun {
        psi0: psi0.clone(),
        omega,
        t_end,
        dt,
        coefficient: coefficient.clone(),
        kernel,
        schedule: schedule.clone(),
        stride,
        seed: 42,
        count,
        method: QsdMethod::Linear,
    })?;

    let master = integrate_master(&MasterRun {
        rho0: psi0.to_density(),
        trunc,
        omega,
        t_end,
        dt,
        coefficient,
        schedule,
        stride,
    })?;

    println!("{count} linear trajectories vs master equation:");
    println!("t      E_N qsd    E_N master  trace distance  std error");
    for (i, t) in ensemble.times.iter().enumerate() {
        let tr = ensemble.rho_mean[i].trace().re;
        let rho_qsd = &ensemble.rho_mean[i] / C64::new(tr, 0.0);
        println!(
            "{t:4.1}   {:.5}    {:.5}     {:.5}         {:.5}",
            log_negativity_fock(&rho_qsd, &trunc),
            log_negativity_fock(&master.snapshots[i], &trunc),
            trace_distance(&rho_qsd, &master.snapshots[i])?,
            ensemble.standard_error[i]
        );
    }
    Ok(())
}
