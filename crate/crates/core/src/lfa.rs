//! Local Fourier analysis of the shifted five-point operator, its smoothers
//! and the two-grid method with full weighting and bilinear interpolation.
//!
//! Frequencies are sampled on a uniform grid over the low range
//! `T^L = [-pi/2, pi/2)^2`; the high range `T^H` is covered by the three
//! harmonic shifts `theta + (pi, 0)`, `theta + (0, pi)`, `theta + (pi, pi)`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dense::DenseMatrix;
use crate::eigen::spectral_radius;
use crate::error::{Error, Result};
use crate::grid::Shift;
use crate::smoothers::{vanka_coeffs, SmootherConfig, SmootherKind, SINGULAR_EPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyRange {
    Low,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyPair {
    pub theta1: f64,
    pub theta2: f64,
}

impl FrequencyPair {
    pub fn new(theta1: f64, theta2: f64) -> Self {
        Self { theta1, theta2 }
    }

    /// Which range the pair falls in, after reduction to `[-pi/2, 3pi/2)^2`.
    pub fn range(&self) -> FrequencyRange {
        let low = |t: f64| {
            let r = (t + FRAC_PI_2).rem_euclid(2.0 * PI) - FRAC_PI_2;
            (-FRAC_PI_2..FRAC_PI_2).contains(&r)
        };
        if low(self.theta1) && low(self.theta2) {
            FrequencyRange::Low
        } else {
            FrequencyRange::High
        }
    }

    /// Equivalent angles in `(-pi, pi]`.
    pub fn principal(&self) -> Self {
        let wrap = |t: f64| {
            let r = t.rem_euclid(2.0 * PI);
            if r > PI {
                r - 2.0 * PI
            } else {
                r
            }
        };
        Self::new(wrap(self.theta1), wrap(self.theta2))
    }

    /// The four harmonics `theta + (s1 pi, s2 pi)`, in the order
    /// `(0,0), (1,0), (0,1), (1,1)`.
    pub fn harmonics(&self) -> [FrequencyPair; 4] {
        let (a, b) = (self.theta1, self.theta2);
        [
            Self::new(a, b),
            Self::new(a + PI, b),
            Self::new(a, b + PI),
            Self::new(a + PI, b + PI),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LfaConfig {
    /// Low-frequency samples per dimension.
    pub samples_per_dim: usize,
    /// Low frequencies where `|L_c(2 theta)|` is at most this are skipped.
    pub singular_skip_radius: f64,
}

impl Default for LfaConfig {
    fn default() -> Self {
        Self {
            samples_per_dim: 64,
            singular_skip_radius: 1e-8,
        }
    }
}

impl LfaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples_per_dim < 16 || self.samples_per_dim % 2 != 0 {
            return Err(Error::InvalidConfig(format!(
                "samples_per_dim must be even and at least 16, got {}",
                self.samples_per_dim
            )));
        }
        Ok(())
    }

    /// Sample angles `-pi/2 + k pi / S`, `k = 0..S`; contains `-pi/2` and `0`.
    pub fn low_angles(&self) -> Vec<f64> {
        let s = self.samples_per_dim;
        (0..s).map(|k| -FRAC_PI_2 + PI * k as f64 / s as f64).collect()
    }

    /// All sampled low frequencies.
    pub fn low_frequencies(&self) -> Vec<FrequencyPair> {
        let angles = self.low_angles();
        angles
            .iter()
            .flat_map(|&a| angles.iter().map(move |&b| FrequencyPair::new(a, b)))
            .collect()
    }

    /// All sampled high frequencies (three harmonics of each low sample).
    pub fn high_frequencies(&self) -> Vec<FrequencyPair> {
        self.low_frequencies()
            .into_iter()
            .flat_map(|t| {
                let [_, a, b, c] = t.harmonics();
                [a, b, c]
            })
            .collect()
    }
}

/// `L~ = (4 + lambda h^2 - 2 cos t1 - 2 cos t2) / h^2`.
pub fn symbol_l(theta: FrequencyPair, shift: &Shift, h: f64) -> Complex64 {
    let (c1, c2) = (theta.theta1.cos(), theta.theta2.cos());
    (shift.eta(h) + 4.0 - 2.0 * c1 - 2.0 * c2) / (h * h)
}

/// `M~_e = h^2 (a + b cos t1 + b cos t2 + c cos t1 cos t2)`.
pub fn symbol_me(theta: FrequencyPair, shift: &Shift, h: f64) -> Result<Complex64> {
    let k = vanka_coeffs(shift.eta(h))?;
    let (c1, c2) = (theta.theta1.cos(), theta.theta2.cos());
    Ok((k.a + k.b * (c1 + c2) + k.c * (c1 * c2)) * (h * h))
}

/// Symbol of the smoother's approximate inverse `M`.
fn symbol_m(theta: FrequencyPair, shift: &Shift, h: f64, kind: SmootherKind) -> Result<Complex64> {
    match kind {
        SmootherKind::Vanka => symbol_me(theta, shift, h),
        SmootherKind::Jacobi => {
            let d = shift.eta(h) + 4.0;
            if d.norm() <= SINGULAR_EPS {
                return Err(Error::ShiftIncompatible { eta: shift.eta(h) });
            }
            Ok(d.inv() * (h * h))
        }
    }
}

/// `S~ = 1 - omega M~ L~`.
pub fn symbol_smoother(
    theta: FrequencyPair,
    shift: &Shift,
    h: f64,
    cfg: &SmootherConfig,
) -> Result<Complex64> {
    let m = symbol_m(theta, shift, h, cfg.kind)?;
    Ok(Complex64::new(1.0, 0.0) - cfg.omega * m * symbol_l(theta, shift, h))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingReport {
    pub mu: f64,
    pub omega: Complex64,
    pub argmax_theta: FrequencyPair,
}

fn max_over_high<F>(lfa: &LfaConfig, f: F) -> Result<(f64, FrequencyPair)>
where
    F: Fn(FrequencyPair) -> Result<f64>,
{
    lfa.validate()?;
    let mut best = (-1.0, FrequencyPair::new(0.0, 0.0));
    for theta in lfa.high_frequencies() {
        let v = f(theta)?;
        if v > best.0 {
            best = (v, theta);
        }
    }
    Ok(best)
}

/// `mu_loc = max_{theta in T^H} |S~(theta)|` over the sampled high range.
pub fn smoothing_factor(
    shift: &Shift,
    h: f64,
    cfg: &SmootherConfig,
    lfa: &LfaConfig,
) -> Result<SmoothingReport> {
    let (mu, argmax_theta) = max_over_high(lfa, |t| Ok(symbol_smoother(t, shift, h, cfg)?.norm()))?;
    Ok(SmoothingReport {
        mu,
        omega: cfg.omega,
        argmax_theta,
    })
}

/// Terms of the smoothing-factor estimate `mu_loc <= phi0 + phij` for
/// shifts with `lambda h^2` small.
///
/// `phi0 = max |1 - omega M~_0 A~|` uses the unshifted Vanka and Laplacian
/// symbols; `phij = max |omega lambda M~_e|` is the shift contribution. Both
/// maxima run over the sampled high range. Returns `(phi0, phij)`.
pub fn shifted_smoothing_estimate(shift: &Shift, h: f64, omega: f64, lfa: &LfaConfig) -> Result<(f64, f64)> {
    let zero = Shift::zero();
    let (phi0, _) = max_over_high(lfa, |t| {
        let m0 = symbol_me(t, &zero, h)?;
        Ok((1.0 - omega * m0 * symbol_l(t, &zero, h)).norm())
    })?;
    let (phij, _) = max_over_high(lfa, |t| {
        Ok((shift.lambda * omega * symbol_me(t, shift, h)?).norm())
    })?;
    Ok((phi0, phij))
}

/// Full-weighting symbol `(1 + cos t1)(1 + cos t2) / 4`. The bilinear
/// interpolation symbol has the same values in this normalization.
pub fn symbol_restriction(theta: FrequencyPair) -> f64 {
    (1.0 + theta.theta1.cos()) * (1.0 + theta.theta2.cos()) / 4.0
}

/// The 4x4 two-grid error symbol at low frequency `theta`,
/// `S~^nu (I - P~ L~_c^{-1} R~ L~)`, or `None` if the coarse symbol vanishes.
pub fn two_grid_symbol(
    theta: FrequencyPair,
    shift: &Shift,
    h: f64,
    cfg: &SmootherConfig,
    nu: usize,
    lfa: &LfaConfig,
) -> Result<Option<DenseMatrix>> {
    let coarse = symbol_l(FrequencyPair::new(2.0 * theta.theta1, 2.0 * theta.theta2), shift, 2.0 * h);
    if coarse.norm() <= lfa.singular_skip_radius {
        return Ok(None);
    }
    let hs = theta.harmonics();
    let mut l = [Complex64::default(); 4];
    let mut s = [Complex64::default(); 4];
    let mut r = [0.0; 4];
    for (k, t) in hs.iter().enumerate() {
        l[k] = symbol_l(*t, shift, h);
        s[k] = symbol_smoother(*t, shift, h, cfg)?.powu(nu as u32);
        r[k] = symbol_restriction(*t);
    }
    let inv_c = coarse.inv();
    Ok(Some(DenseMatrix::from_fn(4, 4, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        s[i] * (Complex64::new(id, 0.0) - r[i] * inv_c * r[j] * l[j])
    })))
}

/// `rho(nu)`: worst spectral radius of the two-grid symbol over sampled low
/// frequencies, with all `nu` sweeps as pre-smoothing.
pub fn two_grid_factor(
    shift: &Shift,
    h: f64,
    cfg: &SmootherConfig,
    nu: usize,
    lfa: &LfaConfig,
) -> Result<f64> {
    lfa.validate()?;
    let thetas = lfa.low_frequencies();
    let radii: Vec<Option<f64>> = thetas
        .par_iter()
        .map(|&t| {
            two_grid_symbol(t, shift, h, cfg, nu, lfa)?
                .map(|e| spectral_radius(&e))
                .transpose()
        })
        .collect::<Result<_>>()?;
    radii
        .into_iter()
        .flatten()
        .reduce(f64::max)
        .ok_or(Error::DegenerateLfa)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Two-grid factor with one smoothing sweep.
    Rho1,
    /// Smoothing factor.
    Mu,
}

/// Scan range and step for the real relaxation parameter.
pub const OMEGA_SCAN: (f64, f64, f64) = (0.1, 1.9, 0.01);
/// Final bracket width of the golden-section refinement.
pub const OMEGA_TOL: f64 = 1e-4;

/// Minimizes the objective over real `omega`: a scan on `[0.1, 1.9]` with
/// step 0.01 followed by golden-section search around the best scan point.
/// Returns `(omega_opt, objective value)`.
pub fn optimize_omega(
    shift: &Shift,
    h: f64,
    kind: SmootherKind,
    objective: Objective,
    lfa: &LfaConfig,
) -> Result<(f64, f64)> {
    let eval = |w: f64| -> Result<f64> {
        let cfg = SmootherConfig::with_real(kind, w)?;
        match objective {
            Objective::Rho1 => two_grid_factor(shift, h, &cfg, 1, lfa),
            Objective::Mu => Ok(smoothing_factor(shift, h, &cfg, lfa)?.mu),
        }
    };
    let (lo, hi, step) = OMEGA_SCAN;
    let count = ((hi - lo) / step).round() as usize;
    let mut best = (f64::INFINITY, lo);
    for k in 0..=count {
        let w = lo + step * k as f64;
        let v = eval(w)?;
        if v < best.0 {
            best = (v, w);
        }
    }

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = ((best.1 - step).max(lo), (best.1 + step).min(hi));
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (eval(x1)?, eval(x2)?);
    while b - a > OMEGA_TOL {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval(x2)?;
        }
    }
    let (w, v) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    Ok(if v < best.0 { (w, v) } else { (best.1, best.0) })
}
