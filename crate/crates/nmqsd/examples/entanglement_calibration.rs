//! Log-negativity of a two-mode squeezed vacuum: the covariance-matrix
//! path gives E_N = 2r exactly; the truncated Fock path converges to it.

use nmqsd::gaussian::{cm_two_mode_squeezed, log_negativity_cm};
use nmqsd::hilbert::{prepare_state, StateKind, TruncationSpec};
use nmqsd::observables::log_negativity_fock;

fn main() -> nmqsd::Result<()> {
    println!("r      E_N (CM)     E_N (Fock, N=12)   target 2r");
    for r in [0.1, 0.25, 0.3, 0.5, 1.0] {
        let cm = log_negativity_cm(&cm_two_mode_squeezed(r));
        let fock = if r <= 0.5 {
            let trunc = TruncationSpec::new(12)?;
            let rho = prepare_state(&StateKind::TwoModeSqueezed { r }, &trunc)?.to_density();
            format!("{:.9}", log_negativity_fock(&rho, &trunc))
        } else {
            "(truncation too small)".to_string()
        };
        println!("{r:.2}   {cm:.9}  {fock:>20}   {:.9}", 2.0 * r);
    }
    Ok(())
}
