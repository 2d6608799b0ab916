//! Diagonalization-based all-at-once time stepping.
//!
//! For `(B ⊗ I_h + I_t ⊗ A) u = f` with `B = V D V^{-1}` the solve splits
//! into three steps: `g = (V^{-1} ⊗ I) f`, independent shifted solves
//! `(A + lambda_j I) w_j = g_j`, and `u = (V ⊗ I) w`. Vectors are stored
//! time-major: `u_all[k]` is the spatial field at time index `k`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dense::{DenseMatrix, Lu};
use crate::eigen;
use crate::error::{Error, Result};
use crate::grid::{apply_shifted_laplacian, Grid2D, GridFunction, Shift, ShiftOrigin};
use crate::multigrid::{assemble_shifted_laplacian, build_hierarchy, MultigridConfig, SolveReport};

/// Eigenvector matrices with a 1-norm condition estimate above this are
/// flagged as nearly defective.
pub const ILL_CONDITIONED: f64 = 1e12;

/// Largest wavenumber in the Helmholtz family.
pub const MAX_WAVENUMBER: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeScheme {
    /// Boundary-value method for the heat equation: central differences
    /// with a one-sided last step.
    HeatBvm,
    /// Quasi-boundary-value regularization of the backward heat problem.
    BackwardHeatQbv { beta: f64 },
    /// Shifts `-j^2 (1 - i/2)`; there is no time matrix.
    HelmholtzFamily,
}

impl TimeScheme {
    pub fn name(&self) -> &'static str {
        match self {
            TimeScheme::HeatBvm => "heat-bvm",
            TimeScheme::BackwardHeatQbv { .. } => "backward-heat",
            TimeScheme::HelmholtzFamily => "helmholtz",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeDiscretization {
    pub scheme: TimeScheme,
    /// Number of time steps (wavenumbers for the Helmholtz family).
    pub n: usize,
    pub tau: f64,
}

impl TimeDiscretization {
    pub fn new(scheme: TimeScheme, n: usize, tau: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("need at least one time step".into()));
        }
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::InvalidConfig(format!("time step must be positive, got {tau}")));
        }
        if let TimeScheme::BackwardHeatQbv { beta } = scheme {
            if !(beta > 0.0) || !beta.is_finite() {
                return Err(Error::InvalidConfig(format!("beta must be positive, got {beta}")));
            }
        }
        Ok(Self { scheme, n, tau })
    }

    /// `n` steps of size `tau = 1/n`.
    pub fn heat(n: usize) -> Result<Self> {
        Self::new(TimeScheme::HeatBvm, n, 1.0 / n as f64)
    }

    /// `n` steps of size `tau = 1/n` with regularization `beta`.
    pub fn backward_heat(n: usize, beta: f64) -> Result<Self> {
        Self::new(TimeScheme::BackwardHeatQbv { beta }, n, 1.0 / n as f64)
    }

    /// Size of the time matrix.
    pub fn dim(&self) -> usize {
        match self.scheme {
            TimeScheme::BackwardHeatQbv { .. } => self.n + 1,
            _ => self.n,
        }
    }

    /// Time levels carried by the all-at-once vector.
    pub fn time_points(&self) -> Vec<f64> {
        match self.scheme {
            TimeScheme::BackwardHeatQbv { .. } => (0..=self.n).map(|k| k as f64 * self.tau).collect(),
            _ => (1..=self.n).map(|k| k as f64 * self.tau).collect(),
        }
    }
}

/// Builds the time matrix `B`.
pub fn build_b(td: &TimeDiscretization) -> Result<DenseMatrix> {
    let n = td.n;
    let inv_tau = 1.0 / td.tau;
    let r = |v: f64| Complex64::new(v * inv_tau, 0.0);
    match td.scheme {
        TimeScheme::HeatBvm => {
            let mut b = DenseMatrix::zeros(n, n);
            if n == 1 {
                b[(0, 0)] = r(1.0);
                return Ok(b);
            }
            for i in 0..n - 1 {
                b[(i, i + 1)] = r(0.5);
                if i > 0 {
                    b[(i, i - 1)] = r(-0.5);
                }
            }
            b[(n - 1, n - 2)] = r(-1.0);
            b[(n - 1, n - 1)] = r(1.0);
            Ok(b)
        }
        TimeScheme::BackwardHeatQbv { beta } => {
            let d = n + 1;
            let mut b = DenseMatrix::zeros(d, d);
            for i in 0..d {
                b[(i, i)] = r(1.0);
                if i > 0 {
                    b[(i, i - 1)] = r(-1.0);
                }
            }
            b[(0, d - 1)] += r(1.0 / beta);
            Ok(b)
        }
        TimeScheme::HelmholtzFamily => Err(Error::NoTimeMatrix("helmholtz")),
    }
}

/// `B = V diag(eigenvalues) V^{-1}` with `V^{-1}` kept as an LU factorization.
#[derive(Debug, Clone)]
pub struct Diagonalization {
    pub eigenvalues: Vec<Complex64>,
    pub v: DenseMatrix,
    v_lu: Lu,
    /// `||V||_1 ||V^{-1}||_1`.
    pub cond_estimate: f64,
    /// Set when `cond_estimate` exceeds [`ILL_CONDITIONED`].
    pub ill_conditioned: bool,
}

impl Diagonalization {
    fn from_parts(eigenvalues: Vec<Complex64>, v: DenseMatrix) -> Result<Self> {
        let v_lu = v.lu()?;
        let cond_estimate = v.norm_one() * v_lu.inverse().norm_one();
        Ok(Self {
            eigenvalues,
            v,
            v_lu,
            cond_estimate,
            ill_conditioned: cond_estimate > ILL_CONDITIONED,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Shifts `lambda_j`, indexed from 1.
    pub fn shifts(&self) -> Vec<Shift> {
        self.eigenvalues
            .iter()
            .enumerate()
            .map(|(k, &lambda)| Shift {
                lambda,
                index: k + 1,
                origin: ShiftOrigin::Eigenvalue,
            })
            .collect()
    }

    /// `max_j ||B v_j - lambda_j v_j||_2` (columns of `V` have unit norm).
    pub fn max_residual(&self, b: &DenseMatrix) -> f64 {
        (0..self.dim())
            .map(|k| {
                let col = self.v.column(k);
                b.matvec(&col)
                    .iter()
                    .zip(&col)
                    .map(|(x, y)| (x - self.eigenvalues[k] * y).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// `(V ⊗ I) u`.
    pub fn apply_v(&self, u_all: &[GridFunction]) -> Result<Vec<GridFunction>> {
        kron_time_transform(&self.v, u_all)
    }

    /// `(V^{-1} ⊗ I) u`, by triangular solves at each spatial node.
    pub fn apply_vinv(&self, u_all: &[GridFunction]) -> Result<Vec<GridFunction>> {
        map_time_columns(self.dim(), u_all, |col| self.v_lu.solve(col))
    }
}

/// Eigendecomposition of a dense time matrix.
pub fn diagonalize(b: &DenseMatrix) -> Result<Diagonalization> {
    let d = eigen::eig(b)?;
    Diagonalization::from_parts(d.values, d.vectors)
}

/// Closed-form diagonalization of the backward-heat matrix
/// `B = (I - Sigma) / tau`, where `Sigma` is the down-shift with corner
/// entry `alpha = -1/beta` (so `Sigma^(n+1) = alpha I`).
///
/// With `a` the principal `(n+1)`-th root of `alpha` and `zeta` the
/// primitive `(n+1)`-th root of unity, `Sigma` has eigenvalues `a zeta^k`
/// with eigenvectors `v_k[i] = (a zeta^k)^(-i)`, a scaled DFT basis.
pub fn diagonalize_alpha_circulant(td: &TimeDiscretization) -> Result<Diagonalization> {
    let TimeScheme::BackwardHeatQbv { beta } = td.scheme else {
        return Err(Error::InvalidConfig(format!(
            "closed-form diagonalization needs the backward-heat scheme, got {}",
            td.scheme.name()
        )));
    };
    let d = td.dim();
    let alpha = Complex64::new(-1.0 / beta, 0.0);
    let root = Complex64::from_polar(alpha.norm().powf(1.0 / d as f64), alpha.arg() / d as f64);
    let mu: Vec<Complex64> = (0..d)
        .map(|k| root * Complex64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64))
        .collect();
    let eigenvalues = mu.iter().map(|m| (Complex64::new(1.0, 0.0) - m) / td.tau).collect();
    let mut v = DenseMatrix::zeros(d, d);
    for (k, m) in mu.iter().enumerate() {
        let inv = m.inv();
        let mut entry = Complex64::new(1.0, 0.0);
        let mut col = Vec::with_capacity(d);
        for _ in 0..d {
            col.push(entry);
            entry *= inv;
        }
        let norm = col.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for (i, x) in col.into_iter().enumerate() {
            v[(i, k)] = x / norm;
        }
    }
    Diagonalization::from_parts(eigenvalues, v)
}

/// Builds and diagonalizes `B`, using the closed form where one exists.
pub fn diagonalize_scheme(td: &TimeDiscretization) -> Result<Diagonalization> {
    match td.scheme {
        TimeScheme::BackwardHeatQbv { .. } => diagonalize_alpha_circulant(td),
        _ => diagonalize(&build_b(td)?),
    }
}

/// `lambda_j = -j^2 (1 - i/2)` for `j = 1..=min(128, floor(1/(2h)))`.
pub fn helmholtz_shifts(h: f64) -> Vec<Shift> {
    let jmax = ((0.5 / h + 1e-9).floor() as usize).min(MAX_WAVENUMBER);
    (1..=jmax)
        .map(|j| {
            let j2 = (j * j) as f64;
            Shift {
                lambda: Complex64::new(-j2, 0.5 * j2),
                index: j,
                origin: ShiftOrigin::Helmholtz,
            }
        })
        .collect()
}

/// Shifts of a scheme for spatial step `h`.
pub fn scheme_shifts(td: &TimeDiscretization, h: f64) -> Result<Vec<Shift>> {
    match td.scheme {
        TimeScheme::HelmholtzFamily => Ok(helmholtz_shifts(h).into_iter().take(td.n).collect()),
        _ => Ok(diagonalize_scheme(td)?.shifts()),
    }
}

fn check_stack(dim: usize, u_all: &[GridFunction]) -> Result<Grid2D> {
    if u_all.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "time dimension is {dim}, got {} fields",
            u_all.len()
        )));
    }
    let grid = u_all
        .first()
        .map(|u| u.grid())
        .ok_or_else(|| Error::DimensionMismatch("empty space-time vector".into()))?;
    if let Some(bad) = u_all.iter().find(|u| u.grid() != grid) {
        return Err(Error::GridMismatch {
            expected: grid.subdivisions(),
            found: bad.grid().subdivisions(),
        });
    }
    Ok(grid)
}

/// Applies `f` to the time column at every spatial node.
fn map_time_columns<F>(dim: usize, u_all: &[GridFunction], f: F) -> Result<Vec<GridFunction>>
where
    F: Fn(&[Complex64]) -> Vec<Complex64> + Sync,
{
    let grid = check_stack(dim, u_all)?;
    let columns: Vec<Vec<Complex64>> = (0..grid.len())
        .into_par_iter()
        .map(|node| {
            let col: Vec<Complex64> = u_all.iter().map(|u| u.values()[node]).collect();
            f(&col)
        })
        .collect();
    Ok((0..dim)
        .map(|k| {
            let values = columns.iter().map(|c| c[k]).collect();
            GridFunction::from_values(grid, values).expect("length matches grid")
        })
        .collect())
}

/// `(M ⊗ I_h) u` for a dense time-direction matrix `M`.
pub fn kron_time_transform(m: &DenseMatrix, u_all: &[GridFunction]) -> Result<Vec<GridFunction>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("time transform must be square".into()));
    }
    map_time_columns(m.rows(), u_all, |col| m.matvec(col))
}

/// `(B ⊗ I + I ⊗ A) u`.
pub fn all_at_once_apply(b: &DenseMatrix, u_all: &[GridFunction]) -> Result<Vec<GridFunction>> {
    let mut out = kron_time_transform(b, u_all)?;
    for (o, u) in out.iter_mut().zip(u_all) {
        o.axpy(Complex64::new(1.0, 0.0), &apply_shifted_laplacian(u, &Shift::zero()))?;
    }
    Ok(out)
}

/// Dense `B ⊗ I + I ⊗ A` (time-major ordering).
pub fn assemble_all_at_once(b: &DenseMatrix, grid: Grid2D) -> DenseMatrix {
    let m = grid.len();
    let nt = b.rows();
    let a = assemble_shifted_laplacian(grid, &Shift::zero());
    let mut out = DenseMatrix::zeros(nt * m, nt * m);
    for i in 0..nt {
        for k in 0..nt {
            let bik = b[(i, k)];
            if bik != Complex64::default() {
                for p in 0..m {
                    out[(i * m + p, k * m + p)] += bik;
                }
            }
        }
        for p in 0..m {
            for q in 0..m {
                out[(i * m + p, i * m + q)] += a[(p, q)];
            }
        }
    }
    out
}

/// Direct dense solve of the all-at-once system, without diagonalizing `B`.
pub fn dense_all_at_once_solve(b: &DenseMatrix, f_all: &[GridFunction]) -> Result<Vec<GridFunction>> {
    let grid = check_stack(b.rows(), f_all)?;
    let m = grid.len();
    let rhs: Vec<Complex64> = f_all.iter().flat_map(|f| f.values().iter().copied()).collect();
    let x = assemble_all_at_once(b, grid).lu()?.solve(&rhs);
    x.chunks(m)
        .map(|c| GridFunction::from_values(grid, c.to_vec()))
        .collect()
}

/// Space-time field `sin(pi x) sin(pi y) (1 + t)` at the scheme's time
/// points and the right-hand side it generates. Returns `(u, f)`.
pub fn manufactured_problem(
    td: &TimeDiscretization,
    grid: Grid2D,
) -> Result<(Vec<GridFunction>, Vec<GridFunction>)> {
    let b = build_b(td)?;
    let u: Vec<GridFunction> = td
        .time_points()
        .into_iter()
        .map(|t| {
            GridFunction::from_fn(grid, |x, y| {
                Complex64::new((PI * x).sin() * (PI * y).sin() * (1.0 + t), 0.0)
            })
        })
        .collect();
    let f = all_at_once_apply(&b, &u)?;
    Ok((u, f))
}

/// Euclidean norm of a stacked space-time vector.
pub fn stack_norm(u_all: &[GridFunction]) -> f64 {
    u_all.iter().map(|u| u.norm().powi(2)).sum::<f64>().sqrt()
}

#[derive(Debug, Clone)]
pub struct ParadiagSolution {
    pub u_all: Vec<GridFunction>,
    /// One report per shift, in eigenvalue order.
    pub reports: Vec<SolveReport>,
    pub shifts: Vec<Shift>,
    pub all_converged: bool,
    pub cond_estimate: f64,
}

/// Three-step ParaDIAG solve with a precomputed diagonalization. The shifted
/// solves run in parallel; results are collected in shift order.
pub fn paradiag_solve_with(
    diag: &Diagonalization,
    f_all: &[GridFunction],
    cfg: &MultigridConfig,
) -> Result<ParadiagSolution> {
    let grid = check_stack(diag.dim(), f_all)?;
    let g = diag.apply_vinv(f_all)?;
    let shifts = diag.shifts();
    let solved: Vec<(GridFunction, SolveReport)> = shifts
        .par_iter()
        .zip(g.par_iter())
        .map(|(shift, gj)| build_hierarchy(grid, shift, cfg)?.solve(gj))
        .collect::<Result<_>>()?;
    let (w, reports): (Vec<GridFunction>, Vec<SolveReport>) = solved.into_iter().unzip();
    let u_all = diag.apply_v(&w)?;
    Ok(ParadiagSolution {
        all_converged: reports.iter().all(|r| r.converged),
        u_all,
        reports,
        shifts,
        cond_estimate: diag.cond_estimate,
    })
}

/// Solves `(B ⊗ I + I ⊗ A) u = f` for the given time scheme.
pub fn paradiag_solve(
    f_all: &[GridFunction],
    td: &TimeDiscretization,
    cfg: &MultigridConfig,
) -> Result<ParadiagSolution> {
    paradiag_solve_with(&diagonalize_scheme(td)?, f_all, cfg)
}
