//! Two-grid LFA table for the first heat-BVM shift at h = tau = 1/256.
//!
//! For each smoother the relaxation parameter is tuned to minimize the
//! one-sweep two-grid factor, then rho(nu) is reported for nu = 1..4.

use vanka_mg::grid::Shift;
use vanka_mg::lfa::{optimize_omega, smoothing_factor, two_grid_factor, LfaConfig, Objective};
use vanka_mg::paradiag::{diagonalize_scheme, TimeDiscretization};
use vanka_mg::smoothers::{SmootherConfig, SmootherKind};

fn main() -> vanka_mg::Result<()> {
    let n = 256;
    let h = 1.0 / n as f64;
    let td = TimeDiscretization::heat(n)?;
    let shift: Shift = diagonalize_scheme(&td)?.shifts()[0];
    println!("lambda_1 = {:.5}", shift.lambda);

    let lfa = LfaConfig::default();
    println!("{:<8} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7}", "smoother", "omega", "mu", "rho(1)", "rho(2)", "rho(3)", "rho(4)");
    for kind in [SmootherKind::Jacobi, SmootherKind::Vanka] {
        let (omega, _) = optimize_omega(&shift, h, kind, Objective::Rho1, &lfa)?;
        let cfg = SmootherConfig::with_real(kind, omega)?;
        let mu = smoothing_factor(&shift, h, &cfg, &lfa)?.mu;
        print!("{:<8} {omega:>7.3} {mu:>7.4}", kind.name());
        for nu in 1..=4 {
            print!(" {:>7.4}", two_grid_factor(&shift, h, &cfg, nu, &lfa)?);
        }
        println!();
    }
    Ok(())
}
