//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::FRAC_PI_2;
use std::process::ExitCode;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vanka_mg::cli::{run_sweep, SweepRow};
use vanka_mg::eigen::eigenvalues;
use vanka_mg::grid::{Grid2D, GridFunction, Shift};
use vanka_mg::lfa::{
    optimize_omega, smoothing_factor, shifted_smoothing_estimate, two_grid_factor, LfaConfig, Objective,
};
use vanka_mg::multigrid::MultigridConfig;
use vanka_mg::paradiag::{
    all_at_once_apply, build_b, dense_all_at_once_solve, diagonalize_alpha_circulant,
    diagonalize_scheme, helmholtz_shifts, manufactured_problem, paradiag_solve, stack_norm,
    TimeDiscretization,
};
use vanka_mg::smoothers::{assemble_vanka_oracle, vanka_stencil, SmootherConfig, SmootherKind};
use vanka_mg::Result;

type Outcome = Result<(bool, String)>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_rhs(grid: Grid2D, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.len()).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    GridFunction::from_values(grid, values).unwrap()
}

fn heat_shifts(n: usize) -> Result<Vec<Shift>> {
    Ok(diagonalize_scheme(&TimeDiscretization::heat(n)?)?.shifts())
}

fn stack_diff(a: &[GridFunction], b: &[GridFunction]) -> f64 {
    let d: Vec<GridFunction> = a
        .iter()
        .zip(b)
        .map(|(x, y)| {
            let mut d = x.clone();
            d.axpy(c(-1.0, 0.0), y).unwrap();
            d
        })
        .collect();
    stack_norm(&d)
}

fn ac1_lfa_table() -> Outcome {
    let n = 256;
    let h = 1.0 / n as f64;
    let shift = heat_shifts(n)?[0];
    let lfa = LfaConfig::default();
    let expected = [
        (SmootherKind::Jacobi, 0.80, [0.600, 0.360, 0.216, 0.137]),
        (SmootherKind::Vanka, 0.96, [0.280, 0.116, 0.082, 0.064]),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (kind, omega_ref, rho_ref) in expected {
        let (omega, _) = optimize_omega(&shift, h, kind, Objective::Rho1, &lfa)?;
        let cfg = SmootherConfig::with_real(kind, omega)?;
        ok &= (omega - omega_ref).abs() <= 0.01;
        let mut rhos = Vec::new();
        for (nu, want) in (1..=4).zip(rho_ref) {
            let rho = two_grid_factor(&shift, h, &cfg, nu, &lfa)?;
            ok &= (rho - want).abs() <= 0.005;
            rhos.push(format!("{rho:.4}"));
        }
        detail.push(format!("{} omega={omega:.3} rho=[{}]", kind.name(), rhos.join(",")));
    }
    Ok((ok, detail.join("; ")))
}

fn ac2_unshifted_smoothing_factor() -> Outcome {
    let report = smoothing_factor(&Shift::zero(), 1.0 / 64.0, &SmootherConfig::vanka(), &LfaConfig::default())?;
    let t = report.argmax_theta;
    let on_axis = |a: f64, b: f64| (a.abs() - FRAC_PI_2).abs() < 1e-12 && b.abs() < 1e-12;
    let ok = (report.mu - 7.0 / 25.0).abs() <= 1e-10 && (on_axis(t.theta1, t.theta2) || on_axis(t.theta2, t.theta1));
    Ok((ok, format!("mu={:.12} at ({:.4},{:.4})", report.mu, t.theta1, t.theta2)))
}

fn ac3_shifted_bound() -> Outcome {
    let lfa = LfaConfig::default();
    let mut worst = f64::NEG_INFINITY;
    for n in [16usize, 64, 256] {
        let h = 1.0 / n as f64;
        for s in heat_shifts(n)? {
            let mu = smoothing_factor(&s, h, &SmootherConfig::vanka(), &lfa)?.mu;
            let (phi0, phij) = shifted_smoothing_estimate(&s, h, 0.96, &lfa)?;
            worst = worst.max(mu - phi0 - phij);
        }
    }
    Ok((worst <= 1e-10, format!("max mu-(phi0+phij) = {worst:.3e}")))
}

fn ac4_stencil_oracle() -> Outcome {
    let grid = Grid2D::new(10)?;
    let m = grid.interior();
    let mut worst = 0.0f64;
    for lambda in [c(0.0, 0.0), c(10.0, 0.0), c(100.0, 100.0), c(0.0, -50.0)] {
        let shift = Shift::new(lambda);
        let stencil = vanka_stencil(&shift, grid.h())?;
        let oracle = assemble_vanka_oracle(grid, &shift)?;
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
    }
    Ok((worst <= 1e-13, format!("max entry difference {worst:.2e}")))
}

fn heat_sweep_h64() -> Result<Vec<SweepRow>> {
    let grid = Grid2D::new(64)?;
    let mut shifts = vec![Shift::zero()];
    shifts.extend(heat_shifts(64)?);
    run_sweep(&shifts, &[SmootherKind::Vanka, SmootherKind::Jacobi], grid, &MultigridConfig::default(), &random_rhs(grid, 1))
        .into_iter()
        .collect()
}

fn ac5_rates(rows: &[SweepRow]) -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (kind, lo, hi) in [(SmootherKind::Vanka, 0.20, 0.35), (SmootherKind::Jacobi, 0.50, 0.68)] {
        let rates: Vec<f64> = rows.iter().filter(|r| r.smoother == kind).map(|r| r.report.rate).collect();
        let min = rates.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = rates.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        ok &= min >= lo && max <= hi && max - min <= 0.08;
        detail.push(format!("{} rate in [{min:.4},{max:.4}]", kind.name()));
    }
    Ok((ok, detail.join("; ")))
}

fn ac6_iteration_ratio(rows: &[SweepRow]) -> Outcome {
    let mut ok = true;
    let mut worst = 0.0f64;
    for pair in rows.chunks(2) {
        let (v, j) = (&pair[0], &pair[1]);
        ok &= v.report.converged && j.report.converged && 2 * v.report.iterations <= j.report.iterations;
        worst = worst.max(v.report.iterations as f64 / j.report.iterations as f64);
    }
    Ok((ok, format!("max vanka/jacobi iteration ratio {worst:.3}")))
}

fn ac7_eigenvalue_bound() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for n in [16usize, 64, 256] {
        let bound = n as f64 + (n as f64 / 2.0).sqrt();
        let max = heat_shifts(n)?.iter().map(|s| s.lambda.norm()).fold(0.0, f64::max);
        ok &= max < bound + 1e-9;
        detail.push(format!("n={n}: {max:.3} < {bound:.3}"));
    }
    Ok((ok, detail.join("; ")))
}

fn ac8_paradiag() -> Outcome {
    let mut worst = 0.0f64;
    for (td, n) in [
        (TimeDiscretization::heat(4)?, 4usize),
        (TimeDiscretization::heat(2)?, 8),
        (TimeDiscretization::backward_heat(4, 0.01)?, 8),
    ] {
        let grid = Grid2D::new(n)?;
        let cfg = MultigridConfig { coarsest: 4, tol: 1e-13, ..MultigridConfig::default() };
        let f: Vec<GridFunction> = (0..td.dim()).map(|k| random_rhs(grid, 50 + k as u64)).collect();
        let sol = paradiag_solve(&f, &td, &cfg)?;
        let oracle = dense_all_at_once_solve(&build_b(&td)?, &f)?;
        worst = worst.max(stack_diff(&sol.u_all, &oracle) / stack_norm(&oracle));
    }
    let grid = Grid2D::new(32)?;
    let td = TimeDiscretization::heat(32)?;
    let (_, f) = manufactured_problem(&td, grid)?;
    let sol = paradiag_solve(&f, &td, &MultigridConfig::default())?;
    let applied = all_at_once_apply(&build_b(&td)?, &sol.u_all)?;
    let resid = stack_diff(&applied, &f) / stack_norm(&f);
    let ok = worst <= 1e-8 && resid <= 1e-6 && sol.all_converged;
    Ok((ok, format!("dense oracle diff {worst:.2e}; residual at 1/32 {resid:.2e}")))
}

fn ac9_alpha_circulant() -> Outcome {
    let td = TimeDiscretization::backward_heat(16, 0.01)?;
    let b = build_b(&td)?;
    let closed = diagonalize_alpha_circulant(&td)?;
    let mut qr = eigenvalues(&b)?;
    let mut worst = 0.0f64;
    for lam in &closed.eigenvalues {
        let (k, d) = qr
            .iter()
            .enumerate()
            .map(|(k, mu)| (k, (lam - mu).norm() / lam.norm()))
            .fold((0, f64::INFINITY), |a, x| if x.1 < a.1 { x } else { a });
        worst = worst.max(d);
        qr.swap_remove(k);
    }
    Ok((worst <= 1e-9, format!("max relative eigenvalue mismatch {worst:.2e}")))
}

fn ac10_helmholtz() -> Outcome {
    let grid = Grid2D::new(128)?;
    let shifts = helmholtz_shifts(grid.h());
    let rows: Vec<SweepRow> = run_sweep(&shifts, &[SmootherKind::Vanka], grid, &MultigridConfig::default(), &random_rhs(grid, 2))
        .into_iter()
        .collect::<Result<_>>()?;
    let mean = |lo: usize, hi: usize| {
        let r: Vec<f64> = rows.iter().filter(|r| (lo..=hi).contains(&r.shift.index)).map(|r| r.report.rate).collect();
        r.iter().sum::<f64>() / r.len() as f64
    };
    let (low, high) = (mean(1, 8), mean(49, 64));
    let all_converged = rows.iter().filter(|r| r.shift.index <= 32).all(|r| r.report.converged && r.report.iterations <= 200);
    Ok((high > low && all_converged, format!("mean rate j=1..8 {low:.4}, j=49..64 {high:.4}; j<=32 converged {all_converged}")))
}

fn main() -> ExitCode {
    let sweep = heat_sweep_h64();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("AC1 two-grid LFA table at h = 1/256", Box::new(ac1_lfa_table)),
        ("AC2 unshifted Vanka smoothing factor 7/25", Box::new(ac2_unshifted_smoothing_factor)),
        ("AC3 shifted smoothing-factor estimate", Box::new(ac3_shifted_bound)),
        ("AC4 explicit stencil equals patch assembly", Box::new(ac4_stencil_oracle)),
        ("AC5 multigrid rates at h = 1/64", Box::new(|| ac5_rates(sweep.as_ref().map_err(Clone::clone)?))),
        ("AC6 Vanka needs at most half the Jacobi cycles", Box::new(|| ac6_iteration_ratio(sweep.as_ref().map_err(Clone::clone)?))),
        ("AC7 heat eigenvalue magnitude bound", Box::new(ac7_eigenvalue_bound)),
        ("AC8 ParaDIAG against dense solve", Box::new(ac8_paradiag)),
        ("AC9 alpha-circulant closed form", Box::new(ac9_alpha_circulant)),
        ("AC10 Helmholtz sweep at h = 1/128", Box::new(ac10_helmholtz)),
    ];
    let mut failures = 0;
    for (name, check) in &criteria {
        let (ok, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        if !ok {
            failures += 1;
        }
        println!("[{}] {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
