//! Smoothing factors as a function of the relaxation parameter, and the two
//! terms of the shifted-smoother estimate across mesh sizes.

use num_complex::Complex64;
use vanka_mg::grid::Shift;
use vanka_mg::lfa::{smoothing_factor, shifted_smoothing_estimate, LfaConfig};
use vanka_mg::paradiag::{diagonalize_scheme, TimeDiscretization};
use vanka_mg::smoothers::{SmootherConfig, SmootherKind};

fn main() -> vanka_mg::Result<()> {
    let lfa = LfaConfig::default();
    let h = 1.0 / 64.0;
    let zero = Shift::zero();

    println!("omega scan at lambda = 0, h = 1/64");
    println!("{:>6} {:>8} {:>8}", "omega", "vanka", "jacobi");
    for k in 0..=8 {
        let w = 0.6 + 0.1 * k as f64;
        let mu = |kind| -> vanka_mg::Result<f64> {
            Ok(smoothing_factor(&zero, h, &SmootherConfig::with_real(kind, w)?, &lfa)?.mu)
        };
        println!("{w:>6.2} {:>8.4} {:>8.4}", mu(SmootherKind::Vanka)?, mu(SmootherKind::Jacobi)?);
    }

    let report = smoothing_factor(&zero, h, &SmootherConfig::vanka(), &lfa)?;
    println!(
        "\nVanka at omega = 24/25: mu = {:.6}, attained at theta = ({:.4}, {:.4})",
        report.mu, report.argmax_theta.theta1, report.argmax_theta.theta2
    );

    println!("\nestimate mu <= phi0 + phij for the worst heat shift (omega = 0.96)");
    println!("{:>5} {:>9} {:>9} {:>9} {:>9}", "n", "mu", "phi0", "phij", "slack");
    for n in [16usize, 64, 256] {
        let h = 1.0 / n as f64;
        let shifts = diagonalize_scheme(&TimeDiscretization::heat(n)?)?.shifts();
        let mut worst = (f64::NEG_INFINITY, 0.0, 0.0, 0.0);
        for s in &shifts {
            let mu = smoothing_factor(s, h, &SmootherConfig::vanka(), &lfa)?.mu;
            let (phi0, phij) = shifted_smoothing_estimate(s, h, 0.96, &lfa)?;
            let gap = mu - (phi0 + phij);
            if gap > worst.0 {
                worst = (gap, mu, phi0, phij);
            }
        }
        println!("{n:>5} {:>9.5} {:>9.5} {:>9.5} {:>9.2e}", worst.1, worst.2, worst.3, -worst.0);
    }

    let big = Shift::new(Complex64::new(0.0, 4096.0));
    let mu = smoothing_factor(&big, 1.0 / 64.0, &SmootherConfig::vanka(), &lfa)?.mu;
    println!("\nlambda = 4096i at h = 1/64 (eta = i): mu = {mu:.4}");
    Ok(())
}
