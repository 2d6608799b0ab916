//! Uniform grids on the unit square, complex grid functions and the
//! matrix-free operators that act on them.
//!
//! Only interior nodes are stored (row-major, `(N-1)^2` values). Values
//! outside the interior are homogeneous Dirichlet zeros and are never
//! materialized; stencils treat out-of-range neighbors as zero.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Row count above which stencil application is split across threads.
const PARALLEL_ROWS: usize = 64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Uniform grid with `n` subdivisions per side, `h = 1/n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid2D {
    n: usize,
}

impl Grid2D {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 subdivisions per side, got {n}"
            )));
        }
        Ok(Self { n })
    }

    /// Number of subdivisions per side.
    pub fn subdivisions(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Interior nodes per side, `N - 1`.
    pub fn interior(&self) -> usize {
        self.n - 1
    }

    /// Total number of unknowns, `(N - 1)^2`.
    pub fn len(&self) -> usize {
        let m = self.interior();
        m * m
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The grid with step `2h`.
    pub fn coarsen(&self) -> Result<Self> {
        if self.n % 2 != 0 || self.n < 4 {
            return Err(Error::InvalidGrid(format!(
                "N = {} cannot be coarsened (must be even and at least 4)",
                self.n
            )));
        }
        Ok(Self { n: self.n / 2 })
    }

    /// The grid with step `h/2`.
    pub fn refine(&self) -> Self {
        Self { n: self.n * 2 }
    }

    /// Coordinates of interior node `(i, j)` (zero-based), `x = (i+1) h`.
    pub fn coords(&self, i: usize, j: usize) -> (f64, f64) {
        let h = self.h();
        ((i + 1) as f64 * h, (j + 1) as f64 * h)
    }

    fn check_same(&self, other: &Grid2D) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }
}

/// Complex field on the interior nodes of a [`Grid2D`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid2D,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            grid,
            values: vec![ZERO; grid.len()],
        }
    }

    pub fn from_values(grid: Grid2D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "grid N = {} needs {} values, got {}",
                grid.subdivisions(),
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f(x, y)` at every interior node.
    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let m = grid.interior();
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..m {
            for j in 0..m {
                let (x, y) = grid.coords(i, j);
                values.push(f(x, y));
            }
        }
        Self { grid, values }
    }

    /// Unit vector at interior node `(i, j)` (zero-based).
    pub fn delta(grid: Grid2D, i: usize, j: usize) -> Self {
        let mut u = Self::zeros(grid);
        *u.at_mut(i, j) = Complex64::new(1.0, 0.0);
        u
    }

    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.grid.interior() + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        let m = self.grid.interior();
        &mut self.values[i * m + j]
    }

    /// Euclidean norm of the value vector (no `h` scaling).
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Hermitian inner product `sum conj(self_k) * other_k`.
    pub fn dot(&self, other: &GridFunction) -> Result<Complex64> {
        self.grid.check_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: Complex64, other: &GridFunction) -> Result<()> {
        self.grid.check_same(&other.grid)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += alpha * b;
        }
        Ok(())
    }

    pub fn scale(&mut self, alpha: Complex64) {
        for v in &mut self.values {
            *v *= alpha;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// Where a shift came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftOrigin {
    /// Eigenvalue of a time-discretization matrix.
    Eigenvalue,
    /// Helmholtz-type shift `-j^2 (1 - i/2)`.
    Helmholtz,
    User,
}

/// Complex shift `lambda` of the operator `A + lambda I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shift {
    pub lambda: Complex64,
    pub index: usize,
    pub origin: ShiftOrigin,
}

impl Shift {
    pub fn new(lambda: Complex64) -> Self {
        Self {
            lambda,
            index: 0,
            origin: ShiftOrigin::User,
        }
    }

    pub fn real(lambda: f64) -> Self {
        Self::new(Complex64::new(lambda, 0.0))
    }

    pub fn zero() -> Self {
        Self::real(0.0)
    }

    /// `eta = lambda h^2`.
    pub fn eta(&self, h: f64) -> Complex64 {
        self.lambda * (h * h)
    }
}

/// Constant-coefficient 3x3 stencil. `coeffs[di + 1][dj + 1]` multiplies the
/// neighbor at offset `(di, dj)`; every coefficient is additionally scaled
/// by `scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil3x3 {
    pub coeffs: [[Complex64; 3]; 3],
    pub scale: f64,
}

impl Stencil3x3 {
    /// Effective weight of offset `(di, dj)`, both in `-1..=1`.
    pub fn entry(&self, di: isize, dj: isize) -> Complex64 {
        self.coeffs[(di + 1) as usize][(dj + 1) as usize] * self.scale
    }

    /// Sum of all nine effective weights.
    pub fn sum(&self) -> Complex64 {
        self.coeffs.iter().flatten().sum::<Complex64>() * self.scale
    }

    /// Rotation by 90 degrees.
    pub fn rotated(&self) -> Self {
        let mut out = *self;
        for r in 0..3 {
            for c in 0..3 {
                out.coeffs[c][2 - r] = self.coeffs[r][c];
            }
        }
        out
    }

    /// Reflection `di -> -di`.
    pub fn reflected(&self) -> Self {
        let mut out = *self;
        out.coeffs.swap(0, 2);
        out
    }

    /// Applies the stencil with zero values outside the interior.
    pub fn apply(&self, u: &GridFunction) -> GridFunction {
        let mut out = GridFunction::zeros(u.grid);
        self.apply_into(u.values(), u.grid.interior(), out.values_mut());
        out
    }

    pub(crate) fn apply_into(&self, u: &[Complex64], m: usize, out: &mut [Complex64]) {
        let w: [[Complex64; 3]; 3] = std::array::from_fn(|r| {
            std::array::from_fn(|c| self.coeffs[r][c] * self.scale)
        });
        let row = |i: usize, out_row: &mut [Complex64]| {
            for (j, o) in out_row.iter_mut().enumerate() {
                let mut acc = ZERO;
                for (r, wr) in w.iter().enumerate() {
                    let ii = i + r;
                    if ii == 0 || ii > m {
                        continue;
                    }
                    let base = (ii - 1) * m;
                    for (c, wc) in wr.iter().enumerate() {
                        let jj = j + c;
                        if jj == 0 || jj > m {
                            continue;
                        }
                        acc += wc * u[base + jj - 1];
                    }
                }
                *o = acc;
            }
        };
        if m >= PARALLEL_ROWS {
            out.par_chunks_mut(m)
                .enumerate()
                .for_each(|(i, out_row)| row(i, out_row));
        } else {
            out.chunks_mut(m)
                .enumerate()
                .for_each(|(i, out_row)| row(i, out_row));
        }
    }

    /// Applies the stencil on an `m x m` doubly periodic grid. Used to check
    /// operators against their Fourier symbols without boundary effects.
    pub fn apply_periodic(&self, u: &[Complex64], m: usize) -> Vec<Complex64> {
        assert_eq!(u.len(), m * m, "periodic field has wrong length");
        let mut out = vec![ZERO; m * m];
        for i in 0..m {
            for j in 0..m {
                let mut acc = ZERO;
                for di in -1isize..=1 {
                    for dj in -1isize..=1 {
                        let ii = (i as isize + di).rem_euclid(m as isize) as usize;
                        let jj = (j as isize + dj).rem_euclid(m as isize) as usize;
                        acc += self.entry(di, dj) * u[ii * m + jj];
                    }
                }
                out[i * m + j] = acc;
            }
        }
        out
    }
}

/// Stencil of `A + lambda I`, `(1/h^2) [0 -1 0; -1 4+eta -1; 0 -1 0]`.
pub fn shifted_laplacian_stencil(shift: &Shift, h: f64) -> Stencil3x3 {
    let z = ZERO;
    let m1 = Complex64::new(-1.0, 0.0);
    let center = Complex64::new(4.0, 0.0) + shift.eta(h);
    Stencil3x3 {
        coeffs: [[z, m1, z], [m1, center, m1], [z, m1, z]],
        scale: 1.0 / (h * h),
    }
}

/// `(A + lambda I) u`, matrix-free.
pub fn apply_shifted_laplacian(u: &GridFunction, shift: &Shift) -> GridFunction {
    shifted_laplacian_stencil(shift, u.grid.h()).apply(u)
}

/// `b - (A + lambda I) u`.
pub fn residual(b: &GridFunction, u: &GridFunction, shift: &Shift) -> Result<GridFunction> {
    b.grid.check_same(&u.grid)?;
    let mut r = apply_shifted_laplacian(u, shift);
    for (ri, bi) in r.values.iter_mut().zip(&b.values) {
        *ri = bi - *ri;
    }
    Ok(r)
}

/// Full-weighting restriction to the grid with step `2h`.
///
/// Every coarse node coincides with a fine node whose eight neighbors are
/// all interior, so no boundary truncation occurs here.
pub fn restrict_full_weighting(fine: &GridFunction) -> Result<GridFunction> {
    let coarse_grid = fine.grid.coarsen()?;
    let mf = fine.grid.interior();
    let mc = coarse_grid.interior();
    let f = fine.values();
    let mut out = GridFunction::zeros(coarse_grid);
    for ci in 0..mc {
        let fi = 2 * ci + 1;
        for cj in 0..mc {
            let fj = 2 * cj + 1;
            let at = |a: usize, b: usize| f[a * mf + b];
            let center = at(fi, fj);
            let edges = at(fi - 1, fj) + at(fi + 1, fj) + at(fi, fj - 1) + at(fi, fj + 1);
            let corners = at(fi - 1, fj - 1)
                + at(fi - 1, fj + 1)
                + at(fi + 1, fj - 1)
                + at(fi + 1, fj + 1);
            out.values[ci * mc + cj] = (center * 4.0 + edges * 2.0 + corners) / 16.0;
        }
    }
    Ok(out)
}

/// Bilinear interpolation to the grid with step `h/2`.
pub fn prolong_bilinear(coarse: &GridFunction) -> GridFunction {
    let fine_grid = coarse.grid.refine();
    let mc = coarse.grid.interior();
    let mf = fine_grid.interior();
    // 1-based coarse index; 0 and N_c are boundary zeros.
    let cval = |ci: usize, cj: usize| -> Complex64 {
        if ci == 0 || cj == 0 || ci > mc || cj > mc {
            ZERO
        } else {
            coarse.values[(ci - 1) * mc + cj - 1]
        }
    };
    let mut out = GridFunction::zeros(fine_grid);
    for fi in 1..=mf {
        for fj in 1..=mf {
            let v = match (fi % 2 == 0, fj % 2 == 0) {
                (true, true) => cval(fi / 2, fj / 2),
                (false, true) => (cval(fi / 2, fj / 2) + cval(fi / 2 + 1, fj / 2)) * 0.5,
                (true, false) => (cval(fi / 2, fj / 2) + cval(fi / 2, fj / 2 + 1)) * 0.5,
                (false, false) => {
                    (cval(fi / 2, fj / 2)
                        + cval(fi / 2 + 1, fj / 2)
                        + cval(fi / 2, fj / 2 + 1)
                        + cval(fi / 2 + 1, fj / 2 + 1))
                        * 0.25
                }
            };
            out.values[(fi - 1) * mf + fj - 1] = v;
        }
    }
    out
}
