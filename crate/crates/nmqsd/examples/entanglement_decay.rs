//! Entanglement decay of a two-mode squeezed state under a non-Markovian
//! bath, computed twice: full master equation in the Fock basis and the
//! Gaussian covariance propagation, started from identical moments.

use nmqsd::coefficients::{analytic_trajectory, CoefficientSpec};
use nmqsd::control::ControlSchedule;
use nmqsd::gaussian::{covariance_from_density, log_negativity_cm, propagate_cm};
use nmqsd::hilbert::{prepare_state, StateKind, TruncationSpec};
use nmqsd::master::{integrate_master, MasterRun};
use nmqsd::observables::log_negativity_fock;

fn main() -> nmqsd::Result<()> {
    let (gamma_coupling, gamma_env, omega) = (1.0, 3.0, 1.0);
    let (t_end, dt, stride) = (5.0, 1e-3, 500);
    let trunc = TruncationSpec::new(10)?;
    let rho0 = prepare_state(&StateKind::TwoModeSqueezed { r: 0.3 }, &trunc)?.to_density();

    let spec = CoefficientSpec::new(gamma_coupling, gamma_env, omega);
    let coefficient = analytic_trajectory(&spec, dt, (t_end / dt).round() as usize)?;
    let schedule = ControlSchedule::constant(0.0);

    let master = integrate_master(&MasterRun {
        rho0: rho0.clone(),
        trunc,
        omega,
        t_end,
        dt,
        coefficient: coefficient.clone(),
        schedule: schedule.clone(),
        stride,
    })?;

    let sigma0 = covariance_from_density(&rho0, &trunc);
    let gauss = propagate_cm(&sigma0, &coefficient, &schedule, omega, t_end, dt, stride)?;

    println!("t      E_N master   E_N Gaussian");
    for ((t, rho), cm) in master
        .times
        .iter()
        .zip(master.snapshots.iter())
        .zip(gauss.states.iter())
    {
        println!(
            "{t:4.1}   {:.6}     {:.6}",
            log_negativity_fock(rho, &trunc),
            log_negativity_cm(cm)
        );
    }
    println!(
        "(master run: max trace drift {:.1e}, max leakage {:.1e})",
        master.max_trace_drift, master.max_leakage
    );
    Ok(())
}
