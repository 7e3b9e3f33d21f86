//! Empirical statistics of the colored complex Gaussian noise against the
//! bath correlation kernel: M[z_t z*_s] should reproduce alpha(t - s).

use nmqsd::bath::{tabulate_lorentzian, BathSpec, NoiseSampler};
use nmqsd::C64;

fn main() -> nmqsd::Result<()> {
    let bath = BathSpec::lorentzian(1.0, 3.0);
    let dt = 0.05;
    let n = 200;
    let kernel = tabulate_lorentzian(&bath, dt, n)?;
    let sampler = NoiseSampler::new(&kernel)?;

    let samples = 20_000usize;
    let lags = [0usize, 5, 10, 20, 40];
    let mut cov = vec![C64::new(0.0, 0.0); lags.len()];
    let mut pseudo = C64::new(0.0, 0.0);
    let base = 60usize; // reference time index, well inside the grid
    for index in 0..samples {
        let z = sampler.sample(7, index as u64);
        for (c, &lag) in cov.iter_mut().zip(lags.iter()) {
            *c += z.value(base + lag) * z.value(base).conj();
        }
        pseudo += z.value(base) * z.value(base);
    }
    let norm = 1.0 / samples as f64;
    println!("lag tau   empirical M[z_t z*_s]        kernel alpha(tau)");
    for (c, &lag) in cov.iter().zip(lags.iter()) {
        let e = c * norm;
        let a = kernel.value(lag);
        println!(
            "{:6.2}   {:+.4} {:+.4}i   {:+.4} {:+.4}i",
            lag as f64 * dt,
            e.re,
            e.im,
            a.re,
            a.im
        );
    }
    let p = pseudo * norm;
    println!(
        "pseudo-covariance M[z z] = {:+.4} {:+.4}i (should vanish)",
        p.re, p.im
    );
    Ok(())
}
