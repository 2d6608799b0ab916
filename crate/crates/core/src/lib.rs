//! Geometric multigrid with an additive element-wise Vanka smoother for
//! complex-shifted Laplacian systems `(A + lambda I) z = b`, where `A` is the
//! five-point Laplacian on the unit square with homogeneous Dirichlet
//! boundary conditions.
//!
//! Such systems appear once per eigenvalue of the time matrix when an
//! all-at-once time discretization `B ⊗ I + I ⊗ A` is block-diagonalized
//! (ParaDIAG). The crate provides:
//!
//! - [`grid`]: grids, grid functions, the matrix-free shifted operator and
//!   the full-weighting / bilinear transfers;
//! - [`smoothers`]: the explicit Vanka stencil, damped Jacobi, and the
//!   patch-by-patch assembly used to validate the stencil;
//! - [`multigrid`]: V/W cycles with a dense coarsest-level solve;
//! - [`lfa`]: Fourier symbols, smoothing factors, two-grid factors and
//!   relaxation-parameter optimization;
//! - [`paradiag`]: the time matrices, their diagonalization and the
//!   three-step all-at-once solve;
//! - [`cli`]: the `vanka-mg` command-line driver.
//!
//! ## Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --release -p vanka-mg --example lfa_table          # two-grid LFA table
//! cargo run --release -p vanka-mg --example smoothing_factor   # mu, omega scans, bound terms
//! cargo run --release -p vanka-mg --example vanka_stencil      # stencil vs. patch assembly
//! cargo run --release -p vanka-mg --example multigrid_solve    # W(1,0) solves, Vanka vs Jacobi
//! cargo run --release -p vanka-mg --example helmholtz_sweep    # rates across wavenumbers
//! cargo run --release -p vanka-mg --example paradiag_heat      # all-at-once heat solve
//! cargo run --release -p vanka-mg --example backward_heat      # closed-form diagonalization
//! ```
//!
//! ## Quick start
//!
//! ```
//! use num_complex::Complex64;
//! use vanka_mg::grid::{Grid2D, GridFunction, Shift};
//! use vanka_mg::multigrid::{solve, MultigridConfig};
//!
//! let grid = Grid2D::new(32).unwrap();
//! let b = GridFunction::from_fn(grid, |x, y| Complex64::new(x * y, 1.0));
//! let shift = Shift::new(Complex64::new(0.0, 32.0));
//! let (_u, report) = solve(&b, &shift, &MultigridConfig::default()).unwrap();
//! assert!(report.converged);
//! assert!(report.rate < 0.35);
//! ```

pub mod cli;
pub mod dense;
pub mod eigen;
pub mod error;
pub mod grid;
pub mod lfa;
pub mod multigrid;
pub mod paradiag;
pub mod smoothers;

pub use error::{Error, Result};
