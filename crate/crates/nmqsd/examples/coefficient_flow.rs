//! The memory coefficient F(t) for a Markovian-like and a genuinely
//! non-Markovian Lorentzian bath, closed form vs direct integration.

use nmqsd::coefficients::{
    analytic_trajectory, classify_markovianity, riccati_fixed_points, riccati_ode_trajectory,
    CoefficientSpec,
};

fn main() -> nmqsd::Result<()> {
    let dt = 1e-3;
    let steps = 10_000;
    for (label, spec) in [
        (
            "Gamma=1, gamma=5, Omega=0",
            CoefficientSpec::new(1.0, 5.0, 0.0),
        ),
        (
            "Gamma=1, gamma=3, Omega=1",
            CoefficientSpec::new(1.0, 3.0, 1.0),
        ),
    ] {
        let closed = analytic_trajectory(&spec, dt, steps)?;
        let ode = riccati_ode_trajectory(&spec, dt, steps)?;
        let max_dev = closed
            .values()
            .iter()
            .zip(ode.values().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let (stable, _) = riccati_fixed_points(&spec)?;
        println!("{label}: {:?}", classify_markovianity(&spec));
        println!("  closed form vs Runge-Kutta: max deviation {max_dev:.3e}");
        println!(
            "  F(10) = {:.6} {:+.6}i (stable fixed point {:.6} {:+.6}i)",
            closed.values()[steps].re,
            closed.values()[steps].im,
            stable.re,
            stable.im
        );
        for &t in &[0.0, 0.5, 1.0, 2.0, 5.0, 10.0] {
            let f = closed.value_at(t);
            println!(
                "  t = {t:5.2}  F = {:+.6} {:+.6}i  |F| = {:.6}",
                f.re,
                f.im,
                f.norm()
            );
        }
    }
    Ok(())
}
