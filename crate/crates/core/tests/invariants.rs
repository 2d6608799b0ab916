//! Property-based checks of linearity, adjointness and symmetry.

use num_complex::Complex64;
use proptest::prelude::*;
use vanka_mg::grid::{
    apply_shifted_laplacian, prolong_bilinear, restrict_full_weighting, Grid2D, GridFunction, Shift,
};
use vanka_mg::lfa::{symbol_smoother, FrequencyPair};
use vanka_mg::smoothers::{apply_smoother, vanka_coeffs, SmootherConfig, SmootherKind};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn field(grid: Grid2D, raw: &[(f64, f64)]) -> GridFunction {
    let values = raw.iter().map(|&(re, im)| c(re, im)).collect();
    GridFunction::from_values(grid, values).unwrap()
}

fn values(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    let m = (n - 1) * (n - 1);
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), m)
}

fn max_diff(a: &GridFunction, b: &GridFunction) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Keeps `eta` away from the three poles of the Vanka coefficients.
fn eta_strategy() -> impl Strategy<Value = Complex64> {
    (-10.0..10.0f64, -10.0..10.0f64)
        .prop_map(|(re, im)| c(re, im))
        .prop_filter("near a pole", |e| [2.0, 4.0, 6.0].iter().all(|p| (e + p).norm() > 0.1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shifted_laplacian_is_linear(u in values(8), v in values(8), ar in -2.0..2.0f64, ai in -2.0..2.0f64,
                                   lr in -50.0..50.0f64, li in -50.0..50.0f64) {
        let grid = Grid2D::new(8).unwrap();
        let (u, v) = (field(grid, &u), field(grid, &v));
        let alpha = c(ar, ai);
        let shift = Shift::new(c(lr, li));
        let mut combo = u.clone();
        combo.scale(alpha);
        combo.axpy(c(1.0, 0.0), &v).unwrap();
        let lhs = apply_shifted_laplacian(&combo, &shift);
        let mut rhs = apply_shifted_laplacian(&u, &shift);
        rhs.scale(alpha);
        rhs.axpy(c(1.0, 0.0), &apply_shifted_laplacian(&v, &shift)).unwrap();
        prop_assert!(max_diff(&lhs, &rhs) < 1e-9 * (1.0 + lhs.norm()));
    }

    #[test]
    fn restriction_is_quarter_prolongation_transpose(f in values(16), g in values(8)) {
        let fine = field(Grid2D::new(16).unwrap(), &f);
        let coarse = field(Grid2D::new(8).unwrap(), &g);
        let lhs = restrict_full_weighting(&fine).unwrap().dot(&coarse).unwrap();
        let rhs = fine.dot(&prolong_bilinear(&coarse)).unwrap() * 0.25;
        prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn vanka_coefficient_identities(eta in eta_strategy()) {
        let k = vanka_coeffs(eta).unwrap();
        let one = c(1.0, 0.0);
        let checks = [
            (k.a + 2.0 * k.b + k.c, one / (eta + 2.0)),
            (k.a - k.c, one / (eta + 4.0)),
            (k.a - 2.0 * k.b + k.c, one / (eta + 6.0)),
        ];
        for (got, want) in checks {
            prop_assert!((got - want).norm() < 1e-12 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn smoother_error_propagation_is_independent_of_rhs(
        u in values(8), e in values(8), b in values(8),
        lr in -20.0..20.0f64, li in -200.0..200.0f64, vanka in any::<bool>(),
    ) {
        let grid = Grid2D::new(8).unwrap();
        let (u, e, b) = (field(grid, &u), field(grid, &e), field(grid, &b));
        let shift = Shift::new(c(lr, li));
        let cfg = if vanka { SmootherConfig::vanka() } else { SmootherConfig::jacobi() };
        let mut ue = u.clone();
        ue.axpy(c(1.0, 0.0), &e).unwrap();
        let mut diff = apply_smoother(&ue, &b, &shift, &cfg).unwrap();
        diff.axpy(c(-1.0, 0.0), &apply_smoother(&u, &b, &shift, &cfg).unwrap()).unwrap();
        let zero = GridFunction::zeros(grid);
        let propagated = apply_smoother(&e, &zero, &shift, &cfg).unwrap();
        prop_assert!(max_diff(&diff, &propagated) < 1e-10 * (1.0 + e.norm()));
    }

    #[test]
    fn smoother_symbol_has_square_symmetry(t1 in -3.1..3.1f64, t2 in -3.1..3.1f64,
                                           li in 0.0..2000.0f64, vanka in any::<bool>()) {
        let shift = Shift::new(c(0.0, li));
        let h = 1.0 / 64.0;
        let kind = if vanka { SmootherKind::Vanka } else { SmootherKind::Jacobi };
        let cfg = SmootherConfig::preset(kind);
        let s = |a, b| symbol_smoother(FrequencyPair::new(a, b), &shift, h, &cfg).unwrap();
        let base = s(t1, t2);
        for other in [s(t2, t1), s(-t1, t2), s(t1, -t2)] {
            prop_assert!((base - other).norm() < 1e-12);
        }
    }
}
