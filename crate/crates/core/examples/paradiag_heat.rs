//! All-at-once solve of the heat equation with a boundary value method in
//! time, block-diagonalized and solved one shift at a time by multigrid.

use num_complex::Complex64;
use vanka_mg::grid::{Grid2D, GridFunction};
use vanka_mg::multigrid::MultigridConfig;
use vanka_mg::paradiag::{
    all_at_once_apply, build_b, diagonalize_scheme, manufactured_problem, paradiag_solve_with,
    stack_norm, TimeDiscretization,
};

fn difference(a: &[GridFunction], b: &[GridFunction]) -> vanka_mg::Result<Vec<GridFunction>> {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let mut d = x.clone();
            d.axpy(Complex64::new(-1.0, 0.0), y)?;
            Ok(d)
        })
        .collect()
}

fn main() -> vanka_mg::Result<()> {
    for n in [16usize, 32, 64] {
        let grid = Grid2D::new(n)?;
        let td = TimeDiscretization::heat(n)?;
        let diag = diagonalize_scheme(&td)?;
        let (u_exact, f) = manufactured_problem(&td, grid)?;
        let sol = paradiag_solve_with(&diag, &f, &MultigridConfig::default())?;

        let b = build_b(&td)?;
        let residual = difference(&f, &all_at_once_apply(&b, &sol.u_all)?)?;
        let error = difference(&sol.u_all, &u_exact)?;
        let iters: Vec<usize> = sol.reports.iter().map(|r| r.iterations).collect();
        println!(
            "h = tau = 1/{n}: cond(V) = {:.1}, cycles per shift {}..{}, residual {:.2e}, error {:.2e}",
            sol.cond_estimate,
            iters.iter().min().unwrap(),
            iters.iter().max().unwrap(),
            stack_norm(&residual) / stack_norm(&f),
            stack_norm(&error) / stack_norm(&u_exact),
        );
    }
    Ok(())
}
