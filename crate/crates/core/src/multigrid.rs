//! Geometric multigrid for `(A + lambda I) z = b` on the unit square.
//!
//! Coarse operators are re-discretizations on the `2h` grid with the same
//! `lambda` (so `eta = lambda h^2` grows by 4 per level). Transfers are full
//! weighting and bilinear interpolation; the coarsest level is solved by
//! dense LU.

use std::time::Instant;

use num_complex::Complex64;

use crate::dense::{DenseMatrix, Lu};
use crate::error::{Error, Result};
use crate::grid::{
    prolong_bilinear, residual, restrict_full_weighting, shifted_laplacian_stencil, Grid2D,
    GridFunction, Shift, Stencil3x3,
};
use crate::smoothers::{smooth_with, Preconditioner, SmootherConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleType {
    V,
    W,
}

impl CycleType {
    /// Coarse-grid visits per level.
    pub fn gamma(self) -> usize {
        match self {
            CycleType::V => 1,
            CycleType::W => 2,
        }
    }
}

impl std::str::FromStr for CycleType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "v" => Ok(CycleType::V),
            "w" => Ok(CycleType::W),
            other => Err(Error::InvalidConfig(format!("unknown cycle '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultigridConfig {
    pub cycle: CycleType,
    /// Pre-smoothing sweeps.
    pub nu1: usize,
    /// Post-smoothing sweeps.
    pub nu2: usize,
    /// Subdivisions of the coarsest grid, `1/h0`.
    pub coarsest: usize,
    /// Relative residual reduction that counts as converged.
    pub tol: f64,
    pub max_iter: usize,
    pub smoother: SmootherConfig,
}

impl Default for MultigridConfig {
    /// W(1,0), `h0 = 1/8`, `tol = 1e-8`, at most 200 cycles, Vanka smoother.
    fn default() -> Self {
        Self {
            cycle: CycleType::W,
            nu1: 1,
            nu2: 0,
            coarsest: 8,
            tol: 1e-8,
            max_iter: 200,
            smoother: SmootherConfig::vanka(),
        }
    }
}

impl MultigridConfig {
    pub fn with_smoother(smoother: SmootherConfig) -> Self {
        Self {
            smoother,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nu1 + self.nu2 == 0 {
            return Err(Error::InvalidConfig("need at least one smoothing sweep".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.coarsest < 2 {
            return Err(Error::InvalidConfig(format!("coarsest grid N0 = {} too small", self.coarsest)));
        }
        Ok(())
    }
}

/// Outcome of an iterative solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// `||r_k||_2` for `k = 0..=iterations`.
    pub residual_history: Vec<f64>,
    pub converged: bool,
    /// Measured asymptotic convergence factor.
    pub rate: f64,
    pub wall_time: f64,
}

/// Geometric mean of `r_k / r_{k-1}` over the last `min(5, iterations - 1)`
/// cycles, skipping the first one. With a single cycle the one available
/// ratio is returned; with none, zero.
pub fn convergence_rate(history: &[f64]) -> f64 {
    let iterations = history.len().saturating_sub(1);
    match iterations {
        0 => 0.0,
        1 => history[1] / history[0],
        _ => {
            let take = 5.min(iterations - 1);
            let ratios = &history[history.len() - take - 1..];
            let log_sum: f64 = ratios.windows(2).map(|w| (w[1] / w[0]).ln()).sum();
            (log_sum / take as f64).exp()
        }
    }
}

#[derive(Debug, Clone)]
enum LevelSolver {
    Smoother(Preconditioner),
    Direct(Lu),
}

#[derive(Debug, Clone)]
pub struct Level {
    pub grid: Grid2D,
    pub operator: Stencil3x3,
    solver: LevelSolver,
}

impl Level {
    pub fn is_coarsest(&self) -> bool {
        matches!(self.solver, LevelSolver::Direct(_))
    }

    pub fn eta(&self, shift: &Shift) -> Complex64 {
        shift.eta(self.grid.h())
    }
}

/// Levels ordered from finest to coarsest.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    pub shift: Shift,
    pub levels: Vec<Level>,
    cfg: MultigridConfig,
}

/// Dense matrix of `A + lambda I` on `grid` (lexicographic interior order).
pub fn assemble_shifted_laplacian(grid: Grid2D, shift: &Shift) -> DenseMatrix {
    let m = grid.interior();
    let h2 = grid.h() * grid.h();
    let diag = (shift.eta(grid.h()) + 4.0) / h2;
    let off = Complex64::new(-1.0 / h2, 0.0);
    let mut a = DenseMatrix::zeros(grid.len(), grid.len());
    for i in 0..m {
        for j in 0..m {
            let row = i * m + j;
            a[(row, row)] = diag;
            if i > 0 {
                a[(row, row - m)] = off;
            }
            if i + 1 < m {
                a[(row, row + m)] = off;
            }
            if j > 0 {
                a[(row, row - 1)] = off;
            }
            if j + 1 < m {
                a[(row, row + 1)] = off;
            }
        }
    }
    a
}

/// Solves `(A + lambda I) u = b` by dense LU.
pub fn coarse_direct_solve(b: &GridFunction, shift: &Shift) -> Result<GridFunction> {
    let lu = assemble_shifted_laplacian(b.grid(), shift).lu()?;
    GridFunction::from_values(b.grid(), lu.solve(b.values()))
}

/// Number of halvings from `n` down to `coarsest`, if `n = 2^k coarsest`.
pub fn coarsening_depth(n: usize, coarsest: usize) -> Option<usize> {
    if n < coarsest || n % coarsest != 0 {
        return None;
    }
    let ratio = n / coarsest;
    ratio.is_power_of_two().then(|| ratio.trailing_zeros() as usize)
}

pub fn build_hierarchy(grid: Grid2D, shift: &Shift, cfg: &MultigridConfig) -> Result<Hierarchy> {
    cfg.validate()?;
    let n = grid.subdivisions();
    let depth = coarsening_depth(n, cfg.coarsest).ok_or(Error::NonConformingGrid {
        n,
        coarsest: cfg.coarsest,
    })?;
    let mut levels = Vec::with_capacity(depth + 1);
    let mut g = grid;
    for index in 0..=depth {
        let h = g.h();
        let wrap = |e: Error| Error::Level {
            level: index,
            n: g.subdivisions(),
            source: Box::new(e),
        };
        let solver = if index == depth {
            LevelSolver::Direct(assemble_shifted_laplacian(g, shift).lu().map_err(wrap)?)
        } else {
            LevelSolver::Smoother(Preconditioner::build(shift, h, cfg.smoother.kind).map_err(wrap)?)
        };
        levels.push(Level {
            grid: g,
            operator: shifted_laplacian_stencil(shift, h),
            solver,
        });
        if index < depth {
            g = g.coarsen()?;
        }
    }
    Ok(Hierarchy {
        shift: *shift,
        levels,
        cfg: *cfg,
    })
}

impl Hierarchy {
    pub fn config(&self) -> &MultigridConfig {
        &self.cfg
    }

    pub fn finest(&self) -> Grid2D {
        self.levels[0].grid
    }

    /// One multigrid cycle on `level`, starting from `u`.
    pub fn cycle(&self, level: usize, u: &GridFunction, b: &GridFunction) -> Result<GridFunction> {
        let lvl = &self.levels[level];
        if u.grid() != lvl.grid || b.grid() != lvl.grid {
            return Err(Error::GridMismatch {
                expected: lvl.grid.subdivisions(),
                found: if u.grid() != lvl.grid { u.grid() } else { b.grid() }.subdivisions(),
            });
        }
        let pre = match &lvl.solver {
            LevelSolver::Direct(lu) => return GridFunction::from_values(lvl.grid, lu.solve(b.values())),
            LevelSolver::Smoother(p) => p,
        };
        let omega = self.cfg.smoother.omega;
        let mut u = u.clone();
        for _ in 0..self.cfg.nu1 {
            u = smooth_with(pre, &u, b, &self.shift, omega)?;
        }
        let r = residual(b, &u, &self.shift)?;
        let rc = restrict_full_weighting(&r)?;
        let mut ec = GridFunction::zeros(rc.grid());
        // a second visit to an exactly solved level changes nothing
        let visits = if self.levels[level + 1].is_coarsest() { 1 } else { self.cfg.cycle.gamma() };
        for _ in 0..visits {
            ec = self.cycle(level + 1, &ec, &rc)?;
        }
        u.axpy(Complex64::new(1.0, 0.0), &prolong_bilinear(&ec))?;
        for _ in 0..self.cfg.nu2 {
            u = smooth_with(pre, &u, b, &self.shift, omega)?;
        }
        Ok(u)
    }

    /// Iterates cycles from `u0 = 0` until `||r_k|| <= tol ||r_0||`.
    pub fn solve(&self, b: &GridFunction) -> Result<(GridFunction, SolveReport)> {
        let start = Instant::now();
        let mut u = GridFunction::zeros(self.finest());
        let r0 = residual(b, &u, &self.shift)?.norm();
        let mut history = vec![r0];
        let mut converged = r0 == 0.0 || r0 <= self.cfg.tol * r0;
        while !converged && history.len() <= self.cfg.max_iter {
            u = self.cycle(0, &u, b)?;
            let r = residual(b, &u, &self.shift)?.norm();
            history.push(r);
            if !r.is_finite() {
                break;
            }
            converged = r <= self.cfg.tol * r0;
        }
        let report = SolveReport {
            iterations: history.len() - 1,
            rate: convergence_rate(&history),
            residual_history: history,
            converged,
            wall_time: start.elapsed().as_secs_f64(),
        };
        Ok((u, report))
    }
}

/// Builds the hierarchy for `b`'s grid and solves.
pub fn solve(b: &GridFunction, shift: &Shift, cfg: &MultigridConfig) -> Result<(GridFunction, SolveReport)> {
    build_hierarchy(b.grid(), shift, cfg)?.solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::apply_shifted_laplacian;
    use crate::smoothers::{SmootherKind, SmootherConfig};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn level_count() {
        let h = build_hierarchy(Grid2D::new(256).unwrap(), &Shift::zero(), &MultigridConfig::default()).unwrap();
        assert_eq!(h.levels.len(), 6);
        assert_eq!(h.levels.last().unwrap().grid.subdivisions(), 8);
        assert!(h.levels.last().unwrap().is_coarsest());
    }

    #[test]
    fn eta_quadruples_per_level() {
        let shift = Shift::new(c(10.0, 250.0));
        let h = build_hierarchy(Grid2D::new(64).unwrap(), &shift, &MultigridConfig::default()).unwrap();
        for w in h.levels.windows(2) {
            let ratio = w[1].eta(&shift) / w[0].eta(&shift);
            assert!((ratio - c(4.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn non_conforming_grid_rejected() {
        for n in [12, 4, 96] {
            let err = build_hierarchy(Grid2D::new(n).unwrap(), &Shift::zero(), &MultigridConfig::default());
            assert!(matches!(err, Err(Error::NonConformingGrid { .. })), "n = {n}");
        }
    }

    #[test]
    fn vanka_singularity_names_level() {
        // eta = -2 on the 1/16 level
        let shift = Shift::real(-2.0 * 256.0);
        let err = build_hierarchy(Grid2D::new(32).unwrap(), &shift, &MultigridConfig::default()).unwrap_err();
        match err {
            Error::Level { level, n, source } => {
                assert_eq!((level, n), (1, 16));
                assert!(matches!(*source, Error::ShiftIncompatible { .. }));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_rhs_converges_immediately() {
        let b = GridFunction::zeros(Grid2D::new(32).unwrap());
        let (u, rep) = solve(&b, &Shift::zero(), &MultigridConfig::default()).unwrap();
        assert_eq!(rep.iterations, 0);
        assert!(rep.converged);
        assert_eq!(u.norm(), 0.0);
    }

    #[test]
    fn coarsest_only_hierarchy_is_direct() {
        let grid = Grid2D::new(8).unwrap();
        let shift = Shift::new(c(3.0, 7.0));
        let b = GridFunction::from_fn(grid, |x, y| c(x * x, -y));
        let h = build_hierarchy(grid, &shift, &MultigridConfig::default()).unwrap();
        assert_eq!(h.levels.len(), 1);
        let u = h.cycle(0, &GridFunction::zeros(grid), &b).unwrap();
        assert!(residual(&b, &u, &shift).unwrap().norm() < 1e-12 * b.norm());
    }

    #[test]
    fn direct_solve_recovers_sine_mode() {
        let grid = Grid2D::new(8).unwrap();
        let u = GridFunction::from_fn(grid, |x, y| c((PI * x).sin() * (2.0 * PI * y).sin(), 0.0));
        let b = apply_shifted_laplacian(&u, &Shift::zero());
        let v = coarse_direct_solve(&b, &Shift::zero()).unwrap();
        for (p, q) in u.values().iter().zip(v.values()) {
            assert!((p - q).norm() < 1e-12);
        }
        // strongly diagonally dominant
        assert!(coarse_direct_solve(&b, &Shift::real(1e8)).is_ok());
    }

    #[test]
    fn exact_discrete_eigenvalue_is_singular() {
        let grid = Grid2D::new(8).unwrap();
        let h = grid.h();
        for (p, q) in [(1, 1), (2, 3), (5, 7)] {
            let lam = -(4.0 - 2.0 * (p as f64 * PI * h).cos() - 2.0 * (q as f64 * PI * h).cos()) / (h * h);
            let b = GridFunction::from_fn(grid, |x, _| c(x, 0.0));
            let err = coarse_direct_solve(&b, &Shift::real(lam)).unwrap_err();
            assert!(matches!(err, Error::SingularOperator { .. }), "p={p} q={q}");
        }
    }

    #[test]
    fn rate_estimator() {
        assert_eq!(convergence_rate(&[1.0]), 0.0);
        assert_eq!(convergence_rate(&[1.0, 0.5]), 0.5);
        // first ratio (0.9) is skipped
        let hist = [1.0, 0.9, 0.9 * 0.25, 0.9 * 0.25 * 0.25];
        assert!((convergence_rate(&hist) - 0.25).abs() < 1e-14);
        let long: Vec<f64> = (0..12).map(|k| if k < 4 { 1.0 } else { 0.5f64.powi(k - 3) }).collect();
        assert!((convergence_rate(&long) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn two_level_vanka_contraction() {
        // N = 16 with N0 = 8: one smoothing level plus the direct solve
        let grid = Grid2D::new(16).unwrap();
        let cfg = MultigridConfig::default();
        let h = build_hierarchy(grid, &Shift::zero(), &cfg).unwrap();
        let b = GridFunction::zeros(grid);
        let mut e = GridFunction::from_fn(grid, |x, y| c((37.0 * x * y).sin(), (11.0 * x + 5.0 * y).cos()));
        let mut factor = 0.0;
        for _ in 0..30 {
            let next = h.cycle(0, &e, &b).unwrap();
            factor = next.norm() / e.norm();
            e = next;
            let n = e.norm();
            e.scale(c(1.0 / n, 0.0));
        }
        assert!(factor <= 0.30, "two-grid error contraction {factor}");
    }

    #[test]
    fn cycle_error_map_is_linear() {
        let grid = Grid2D::new(32).unwrap();
        let shift = Shift::new(c(4.0, 31.0));
        let cfg = MultigridConfig::with_smoother(SmootherConfig::with_real(SmootherKind::Vanka, 0.96).unwrap());
        let h = build_hierarchy(grid, &shift, &cfg).unwrap();
        let b = GridFunction::from_fn(grid, |x, y| c(x + y, x - y));
        let u1 = GridFunction::from_fn(grid, |x, y| c((5.0 * x).sin(), y));
        let u2 = GridFunction::from_fn(grid, |x, y| c(x * y, (3.0 * y).cos()));
        let zero = GridFunction::zeros(grid);
        // affine map: C(a u1 + (1-a) u2) = a C(u1) + (1-a) C(u2)
        let alpha = c(0.3, -1.2);
        let mut mix = u1.clone();
        mix.scale(alpha);
        mix.axpy(c(1.0, 0.0) - alpha, &u2).unwrap();
        let lhs = h.cycle(0, &mix, &b).unwrap();
        let mut rhs = h.cycle(0, &u1, &b).unwrap();
        rhs.scale(alpha);
        rhs.axpy(c(1.0, 0.0) - alpha, &h.cycle(0, &u2, &b).unwrap()).unwrap();
        let mut d = lhs.clone();
        d.axpy(c(-1.0, 0.0), &rhs).unwrap();
        assert!(d.norm() <= 1e-11 * lhs.norm());
        assert_eq!(h.cycle(0, &zero, &GridFunction::zeros(grid)).unwrap().norm(), 0.0);
    }
}
