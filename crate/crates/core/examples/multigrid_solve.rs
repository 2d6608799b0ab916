//! W(1,0) multigrid on the shifted Laplacian: Vanka against damped Jacobi
//! over a range of mesh sizes and shifts.

use num_complex::Complex64;
use vanka_mg::grid::{Grid2D, GridFunction, Shift};
use vanka_mg::multigrid::{solve, MultigridConfig};
use vanka_mg::smoothers::SmootherConfig;

fn main() -> vanka_mg::Result<()> {
    println!("{:>5} {:>14} {:>12} {:>12}", "N", "lambda", "vanka", "jacobi");
    for n in [32usize, 64, 128, 256] {
        let grid = Grid2D::new(n)?;
        let b = GridFunction::from_fn(grid, |x, y| {
            Complex64::new((7.0 * x).sin() * y, x - y * y)
        });
        for lambda in [Complex64::new(0.0, 0.0), Complex64::new(0.0, n as f64), Complex64::new(-10.0, 5.0)] {
            let shift = Shift::new(lambda);
            let mut cells = Vec::new();
            for smoother in [SmootherConfig::vanka(), SmootherConfig::jacobi()] {
                let (_, r) = solve(&b, &shift, &MultigridConfig::with_smoother(smoother))?;
                cells.push(format!("{:>3} it {:.3}", r.iterations, r.rate));
            }
            println!("{n:>5} {:>14} {:>12} {:>12}", format!("{lambda}"), cells[0], cells[1]);
        }
    }
    Ok(())
}
