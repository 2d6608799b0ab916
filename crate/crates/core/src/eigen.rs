//! Dense complex eigensolver: Householder reduction to Hessenberg form,
//! single-shift QR iteration to complex Schur form, and eigenvectors by
//! back-substitution on the triangular factor.

use num_complex::Complex64;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// QR sweeps allowed per eigenvalue before giving up.
const MAX_SWEEPS_PER_EIGENVALUE: usize = 30;

/// Eigenvalues and unit-norm eigenvectors (columns of `vectors`).
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    pub vectors: DenseMatrix,
}

/// Eigenvalues of a square matrix, in the order they deflate out of the
/// Schur form (top-left to bottom-right).
pub fn eigenvalues(a: &DenseMatrix) -> Result<Vec<Complex64>> {
    let (t, _) = schur(a, false)?;
    Ok((0..t.rows()).map(|i| t[(i, i)]).collect())
}

/// Spectral radius via the Schur form.
pub fn spectral_radius(a: &DenseMatrix) -> Result<f64> {
    Ok(eigenvalues(a)?.iter().map(|v| v.norm()).fold(0.0, f64::max))
}

/// Full eigendecomposition `A V = V diag(values)`.
pub fn eig(a: &DenseMatrix) -> Result<EigenDecomposition> {
    let (t, z) = schur(a, true)?;
    let z = z.expect("Schur vectors requested");
    let n = t.rows();
    let tnorm = t.norm_fro().max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * tnorm;
    let mut vectors = DenseMatrix::zeros(n, n);
    let mut y = vec![ZERO; n];
    for k in 0..n {
        let lambda = t[(k, k)];
        y.iter_mut().for_each(|v| *v = ZERO);
        y[k] = ONE;
        for j in (0..k).rev() {
            let s: Complex64 = (j + 1..=k).map(|l| t[(j, l)] * y[l]).sum();
            let mut d = t[(j, j)] - lambda;
            if d.norm() < small {
                d = Complex64::new(small, 0.0);
            }
            y[j] = -s / d;
        }
        let mut v: Vec<Complex64> = (0..n)
            .map(|i| (0..=k).map(|l| z[(i, l)] * y[l]).sum())
            .collect();
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        for i in 0..n {
            vectors[(i, k)] = v[i];
        }
    }
    Ok(EigenDecomposition {
        values: (0..n).map(|i| t[(i, i)]).collect(),
        vectors,
    })
}

/// Returns the upper-triangular Schur factor `T` and, if requested, the
/// unitary `Z` with `A = Z T Z^H`.
pub fn schur(a: &DenseMatrix, want_vectors: bool) -> Result<(DenseMatrix, Option<DenseMatrix>)> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigensolver needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut h = a.clone();
    let mut z = want_vectors.then(|| DenseMatrix::identity(n));
    hessenberg(&mut h, z.as_mut());
    qr_iterate(&mut h, z.as_mut())?;
    // clear the rounding-level subdiagonal left behind by deflation
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    Ok((h, z))
}

fn hessenberg(h: &mut DenseMatrix, mut z: Option<&mut DenseMatrix>) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    for k in 0..n - 2 {
        let xnorm = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        let tail = (k + 2..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>();
        if xnorm == 0.0 || tail == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        v.iter_mut().for_each(|x| *x = ZERO);
        for i in k + 1..n {
            v[i] = h[(i, k)];
        }
        v[k + 1] -= alpha;
        let vnorm = v[k + 1..].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        v[k + 1..].iter_mut().for_each(|x| *x /= vnorm);

        // H <- (I - 2 v v^H) H
        for j in 0..n {
            let s: Complex64 = (k + 1..n).map(|i| v[i].conj() * h[(i, j)]).sum();
            for i in k + 1..n {
                h[(i, j)] -= v[i] * s * 2.0;
            }
        }
        // H <- H (I - 2 v v^H), Z <- Z (I - 2 v v^H)
        let right = |m: &mut DenseMatrix| {
            for i in 0..m.rows() {
                let s: Complex64 = (k + 1..n).map(|j| m[(i, j)] * v[j]).sum();
                for j in k + 1..n {
                    m[(i, j)] -= s * v[j].conj() * 2.0;
                }
            }
        };
        right(h);
        if let Some(z) = z.as_deref_mut() {
            right(z);
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
}

/// Rotation `G = [[c, s], [-conj(s), c]]` with `G [x; y] = [r; 0]`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let xn = x.norm();
    let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
    if r == 0.0 {
        return (1.0, ZERO);
    }
    if xn == 0.0 {
        return (0.0, ONE);
    }
    (xn / r, (x / xn) * y.conj() / r)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let (l1, l2) = (mid + disc, mid - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn qr_iterate(h: &mut DenseMatrix, mut z: Option<&mut DenseMatrix>) -> Result<()> {
    let n = h.rows();
    if n == 0 {
        return Ok(());
    }
    let hnorm = h.norm_fro().max(f64::MIN_POSITIVE);
    let mut hi = n - 1;
    let mut sweeps = 0usize;
    let mut since_deflation = 0usize;
    let limit = MAX_SWEEPS_PER_EIGENVALUE * n.max(1);
    while hi > 0 {
        // locate the start of the active unreduced block
        let mut lo = hi;
        while lo > 0 {
            let scale = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let scale = if scale == 0.0 { hnorm } else { scale };
            if h[(lo, lo - 1)].norm() <= f64::EPSILON * scale {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        sweeps += 1;
        since_deflation += 1;
        if sweeps > limit {
            return Err(Error::EigenNoConvergence { iterations: sweeps });
        }
        let shift = if since_deflation % 11 == 10 {
            // exceptional shift to break cycles
            let e = h[(hi, hi - 1)].norm() + if hi >= 2 { h[(hi - 1, hi - 2)].norm() } else { 0.0 };
            h[(hi, hi)] + Complex64::new(0.75 * e, 0.4 * e)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        let mut x = h[(lo, lo)] - shift;
        let mut y = h[(lo + 1, lo)];
        for k in lo..hi {
            let (c, s) = givens(x, y);
            // rows k, k+1 from the leftmost nonzero column onwards
            let start = if k > lo { k - 1 } else { k };
            for j in start..n {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = a * c + s * b;
                h[(k + 1, j)] = -s.conj() * a + b * c;
            }
            // columns k, k+1
            let stop = (k + 2).min(hi);
            for i in 0..=stop {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * c + b * s.conj();
                h[(i, k + 1)] = -a * s + b * c;
            }
            if let Some(z) = z.as_deref_mut() {
                for i in 0..n {
                    let a = z[(i, k)];
                    let b = z[(i, k + 1)];
                    z[(i, k)] = a * c + b * s.conj();
                    z[(i, k + 1)] = -a * s + b * c;
                }
            }
            if k + 1 < hi {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn residual(a: &DenseMatrix, d: &EigenDecomposition) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..a.rows() {
            let v = d.vectors.column(k);
            let av = a.matvec(&v);
            let r = av
                .iter()
                .zip(&v)
                .map(|(x, y)| (x - d.values[k] * y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            worst = worst.max(r);
        }
        worst
    }

    #[test]
    fn one_by_one() {
        let a = DenseMatrix::from_real_rows(&[vec![3.5]]);
        let d = eig(&a).unwrap();
        assert_eq!(d.values, vec![c(3.5, 0.0)]);
        assert_eq!(d.vectors[(0, 0)], c(1.0, 0.0));
    }

    #[test]
    fn rotation_has_imaginary_pair() {
        let a = DenseMatrix::from_real_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]);
        let mut vals = eigenvalues(&a).unwrap();
        vals.sort_by(|x, y| x.im.partial_cmp(&y.im).unwrap());
        assert!((vals[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((vals[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn triangular_input_keeps_diagonal() {
        let a = DenseMatrix::from_fn(4, 4, |i, j| if j >= i { c((i + 2 * j + 1) as f64, 0.0) } else { ZERO });
        let mut vals: Vec<f64> = eigenvalues(&a).unwrap().iter().map(|v| v.re).collect();
        vals.sort_by(f64::total_cmp);
        assert_eq!(vals, vec![1.0, 4.0, 7.0, 10.0]);
    }

    #[test]
    fn nonsymmetric_residual_is_small() {
        let n = 40;
        let a = DenseMatrix::from_fn(n, n, |i, j| {
            let x = ((i * 31 + j * 17) % 23) as f64 / 23.0 - 0.5;
            c(x, if (i + j) % 3 == 0 { 0.3 * x } else { 0.0 })
        });
        let d = eig(&a).unwrap();
        assert!(residual(&a, &d) < 1e-11 * a.norm_fro());
    }

    #[test]
    fn companion_matrix_roots() {
        // x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3)
        let a = DenseMatrix::from_real_rows(&[
            vec![6.0, -11.0, 6.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
        ]);
        let mut vals: Vec<f64> = eigenvalues(&a).unwrap().iter().map(|v| v.re).collect();
        vals.sort_by(f64::total_cmp);
        for (v, e) in vals.iter().zip([1.0, 2.0, 3.0]) {
            assert!((v - e).abs() < 1e-12);
        }
    }
}
