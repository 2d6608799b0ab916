//! Relaxation schemes for `(A + lambda I) z = b`.
//!
//! The additive element-wise Vanka smoother sums the exact inverses of the
//! 4x4 element problems over all 2x2 node patches, each weighted by 1/4.
//! For a constant-coefficient grid this sum collapses to the 3x3 stencil
//! `(h^2/4) [c 2b c; 2b 4a 2b; c 2b c]`, which is what [`vanka_stencil`]
//! returns and what the smoother applies. [`assemble_vanka_oracle`] builds
//! the same operator the long way, patch by patch, for validation.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::grid::{residual, Grid2D, GridFunction, Shift, Stencil3x3};

/// Denominators closer than this to zero make the element matrix singular.
pub const SINGULAR_EPS: f64 = 1e-12;

/// Vanka stencil coefficients for a given `eta = lambda h^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VankaCoeffs {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub eta: Complex64,
}

/// Computes `a`, `b`, `c` from the three eigenvalue denominators
/// `2 + eta`, `4 + eta`, `6 + eta` of the scaled element matrix.
pub fn vanka_coeffs(eta: Complex64) -> Result<VankaCoeffs> {
    let d2 = eta + 2.0;
    let d4 = eta + 4.0;
    let d6 = eta + 6.0;
    if [d2, d4, d6].iter().any(|d| d.norm() <= SINGULAR_EPS) {
        return Err(Error::ShiftIncompatible { eta });
    }
    let (i2, i4, i6) = (d2.inv(), d4.inv(), d6.inv());
    Ok(VankaCoeffs {
        a: (i2 + i4 * 2.0 + i6) * 0.25,
        b: (i2 - i6) * 0.25,
        c: (i2 - i4 * 2.0 + i6) * 0.25,
        eta,
    })
}

/// The explicit additive Vanka stencil with scale `h^2/4`.
pub fn vanka_stencil(shift: &Shift, h: f64) -> Result<Stencil3x3> {
    let VankaCoeffs { a, b, c, .. } = vanka_coeffs(shift.eta(h))?;
    Ok(Stencil3x3 {
        coeffs: [[c, b * 2.0, c], [b * 2.0, a * 4.0, b * 2.0], [c, b * 2.0, c]],
        scale: h * h / 4.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SmootherKind {
    Vanka,
    Jacobi,
}

impl SmootherKind {
    pub fn name(self) -> &'static str {
        match self {
            SmootherKind::Vanka => "vanka",
            SmootherKind::Jacobi => "jacobi",
        }
    }
}

impl std::str::FromStr for SmootherKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "vanka" => Ok(SmootherKind::Vanka),
            "jacobi" => Ok(SmootherKind::Jacobi),
            other => Err(Error::InvalidConfig(format!("unknown smoother '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmootherConfig {
    pub kind: SmootherKind,
    /// Relaxation parameter; complex to allow complex-parameter experiments.
    pub omega: Complex64,
}

impl SmootherConfig {
    pub fn new(kind: SmootherKind, omega: Complex64) -> Result<Self> {
        if omega.norm() == 0.0 || !omega.re.is_finite() || !omega.im.is_finite() {
            return Err(Error::InvalidConfig(format!("relaxation parameter must be finite and nonzero, got {omega}")));
        }
        Ok(Self { kind, omega })
    }

    pub fn with_real(kind: SmootherKind, omega: f64) -> Result<Self> {
        Self::new(kind, Complex64::new(omega, 0.0))
    }

    /// Vanka with `omega = 24/25`.
    pub fn vanka() -> Self {
        Self {
            kind: SmootherKind::Vanka,
            omega: Complex64::new(24.0 / 25.0, 0.0),
        }
    }

    /// Damped Jacobi with `omega = 4/5`.
    pub fn jacobi() -> Self {
        Self {
            kind: SmootherKind::Jacobi,
            omega: Complex64::new(0.8, 0.0),
        }
    }

    /// Preset for a smoother kind.
    pub fn preset(kind: SmootherKind) -> Self {
        match kind {
            SmootherKind::Vanka => Self::vanka(),
            SmootherKind::Jacobi => Self::jacobi(),
        }
    }
}

/// Jacobi scaling `diag(A + lambda I)^{-1} = h^2 / (4 + eta)`.
pub fn jacobi_scale(shift: &Shift, h: f64) -> Result<Complex64> {
    let eta = shift.eta(h);
    let d = eta + 4.0;
    if d.norm() <= SINGULAR_EPS {
        return Err(Error::ShiftIncompatible { eta });
    }
    Ok(d.inv() * (h * h))
}

/// The approximate inverse `M` of a smoother, fixed for one grid level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preconditioner {
    Stencil(Stencil3x3),
    Diagonal(Complex64),
}

impl Preconditioner {
    pub fn build(shift: &Shift, h: f64, kind: SmootherKind) -> Result<Self> {
        Ok(match kind {
            SmootherKind::Vanka => Preconditioner::Stencil(vanka_stencil(shift, h)?),
            SmootherKind::Jacobi => Preconditioner::Diagonal(jacobi_scale(shift, h)?),
        })
    }

    pub fn apply(&self, r: &GridFunction) -> GridFunction {
        match self {
            Preconditioner::Stencil(s) => s.apply(r),
            Preconditioner::Diagonal(d) => {
                let mut out = r.clone();
                out.scale(*d);
                out
            }
        }
    }
}

/// One relaxation sweep `u <- u + omega M (b - (A + lambda I) u)`.
pub fn apply_smoother(
    u: &GridFunction,
    b: &GridFunction,
    shift: &Shift,
    cfg: &SmootherConfig,
) -> Result<GridFunction> {
    let m = Preconditioner::build(shift, u.grid().h(), cfg.kind)?;
    smooth_with(&m, u, b, shift, cfg.omega)
}

pub(crate) fn smooth_with(
    m: &Preconditioner,
    u: &GridFunction,
    b: &GridFunction,
    shift: &Shift,
    omega: Complex64,
) -> Result<GridFunction> {
    let r = residual(b, u, shift)?;
    let correction = m.apply(&r);
    let mut out = u.clone();
    out.axpy(omega, &correction)?;
    Ok(out)
}

/// Explicit sparse operator stored row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    rows: Vec<BTreeMap<usize, Complex64>>,
}

impl SparseOperator {
    fn new(dim: usize) -> Self {
        Self {
            dim,
            rows: vec![BTreeMap::new(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &BTreeMap<usize, Complex64> {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.rows[i].get(&j).copied().unwrap_or_default()
    }

    fn add(&mut self, i: usize, j: usize, v: Complex64) {
        *self.rows[i].entry(j).or_default() += v;
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|(&j, v)| v * x[j]).sum())
            .collect()
    }
}

/// The 4x4 restriction of `A + lambda I` to one 2x2 node patch, in node
/// order `(0,0), (0,1), (1,0), (1,1)`.
pub fn element_matrix(shift: &Shift, h: f64) -> DenseMatrix {
    let diag = (shift.eta(h) + 4.0) / (h * h);
    let off = Complex64::new(-1.0 / (h * h), 0.0);
    DenseMatrix::from_fn(4, 4, |p, q| {
        if p == q {
            diag
        } else if p + q == 3 {
            // diagonal partners (0,0)-(1,1) and (0,1)-(1,0) are not coupled
            Complex64::new(0.0, 0.0)
        } else {
            off
        }
    })
}

/// Builds `M_e = sum_i R_i^T W_i L_i^{-1} R_i` over every 2x2 patch of
/// interior nodes, with `W_i = I/4`.
///
/// Patches that would include boundary nodes are left out, so rows of nodes
/// adjacent to the boundary differ from the stencil. Intended for small
/// grids (the result has `O((N-1)^2)` rows of up to 9 entries).
pub fn assemble_vanka_oracle(grid: Grid2D, shift: &Shift) -> Result<SparseOperator> {
    let h = grid.h();
    let eta = shift.eta(h);
    let local = element_matrix(shift, h);
    let inv = local
        .lu()
        .map_err(|_| Error::ShiftIncompatible { eta })?
        .inverse();
    let m = grid.interior();
    let mut op = SparseOperator::new(grid.len());
    if m < 2 {
        return Ok(op);
    }
    for i in 0..m - 1 {
        for j in 0..m - 1 {
            let nodes = [i * m + j, i * m + j + 1, (i + 1) * m + j, (i + 1) * m + j + 1];
            for (p, &row) in nodes.iter().enumerate() {
                for (q, &col) in nodes.iter().enumerate() {
                    op.add(row, col, inv[(p, q)] * 0.25);
                }
            }
        }
    }
    Ok(op)
}
