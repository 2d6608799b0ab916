//! The explicit Vanka stencil next to the operator assembled patch by patch
//! from local 2x2 solves.

use num_complex::Complex64;
use vanka_mg::grid::{Grid2D, Shift};
use vanka_mg::smoothers::{assemble_vanka_oracle, vanka_coeffs, vanka_stencil};

fn main() -> vanka_mg::Result<()> {
    let grid = Grid2D::new(10)?;
    let h = grid.h();
    for lambda in [Complex64::new(0.0, 0.0), Complex64::new(1.0, 1.0), Complex64::new(0.0, 300.0)] {
        let shift = Shift::new(lambda);
        let eta = shift.eta(h);
        let k = vanka_coeffs(eta)?;
        println!("lambda = {lambda}, eta = {eta:.4}");
        println!("  a = {:.6}  b = {:.6}  c = {:.6}", k.a, k.b, k.c);

        let stencil = vanka_stencil(&shift, h)?;
        for dj in [1isize, 0, -1] {
            let row: Vec<String> = [-1isize, 0, 1]
                .iter()
                .map(|&di| format!("{:>22.6}", stencil.entry(di, dj)))
                .collect();
            println!("  {}", row.join(" "));
        }

        let oracle = assemble_vanka_oracle(grid, &shift)?;
        let m = grid.interior();
        let mut worst = 0.0f64;
        for i in 1..m - 1 {
            for j in 1..m - 1 {
                let row = j * m + i;
                for dj in -1isize..=1 {
                    for di in -1isize..=1 {
                        let col = ((j as isize + dj) as usize) * m + (i as isize + di) as usize;
                        worst = worst.max((oracle.get(row, col) - stencil.entry(di, dj)).norm());
                    }
                }
            }
        }
        println!("  max |oracle - stencil| over interior rows: {worst:.2e}\n");
    }
    Ok(())
}
