//! Multigrid rates for the indefinite Helmholtz-like shifts
//! `-j^2 (1 - i/2)` at h = 1/128.

use num_complex::Complex64;
use vanka_mg::cli::run_sweep;
use vanka_mg::grid::{Grid2D, GridFunction};
use vanka_mg::multigrid::MultigridConfig;
use vanka_mg::paradiag::helmholtz_shifts;
use vanka_mg::smoothers::SmootherKind;

fn main() -> vanka_mg::Result<()> {
    let grid = Grid2D::new(128)?;
    let shifts = helmholtz_shifts(grid.h());
    let b = GridFunction::from_fn(grid, |x, y| Complex64::new(1.0, x * y));
    let kinds = [SmootherKind::Vanka, SmootherKind::Jacobi];
    let rows = run_sweep(&shifts, &kinds, grid, &MultigridConfig::default(), &b);

    println!("{:>4} {:>22} {:>14} {:>14}", "j", "lambda", "vanka", "jacobi");
    for pair in rows.chunks(2) {
        let (v, j) = (pair[0].as_ref().map_err(Clone::clone)?, pair[1].as_ref().map_err(Clone::clone)?);
        if v.shift.index % 4 != 1 && v.shift.index != shifts.len() {
            continue;
        }
        let cell = |r: &vanka_mg::cli::SweepRow| {
            format!("{:>3}{} {:.3}", r.report.iterations, if r.report.converged { ' ' } else { '*' }, r.report.rate)
        };
        println!("{:>4} {:>22.1} {:>14} {:>14}", v.shift.index, v.shift.lambda, cell(v), cell(j));
    }
    println!("(* = not converged within 200 cycles)");
    Ok(())
}
