//! Second-order finite-difference application of the twisted Laplacian,
//! used as an independent check of the eigenrelation. Two assemblies of the
//! same operator are provided:
//!
//! * vector-field form `L = -sum_j (X_j^2 + Y_j^2)` with
//!   `X_j = d/dx_j - (i/2) y_j`, `Y_j = d/dy_j + (i/2) x_j`;
//! * oscillator form `L = -Delta + |z|^2/4 + i sum_j (y_j d/dx_j - x_j d/dy_j)`.
//!
//! Only interior points (one-point boundary band excluded) are evaluated;
//! boundary entries of the output are zero.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special_hermite::QuadratureGrid;

const MIN_POINTS_PER_AXIS: usize = 5;

/// Whether spatial point `k` lies off the boundary band.
pub fn is_interior<T: Real>(grid: &QuadratureGrid<T>, k: usize) -> bool {
    let last = grid.points_per_axis() - 1;
    grid.axis_indices(k).iter().all(|&i| i > 0 && i < last)
}

fn check<T: Real>(samples: &[Complex<T>], grid: &QuadratureGrid<T>) -> Result<()> {
    if grid.points_per_axis() < MIN_POINTS_PER_AXIS {
        return Err(Error::InvalidInput(format!(
            "finite differences need at least {MIN_POINTS_PER_AXIS} points per axis, grid has {}",
            grid.points_per_axis()
        )));
    }
    if samples.len() != grid.len() {
        return Err(Error::InvalidInput(format!("{} samples for a grid of {}", samples.len(), grid.len())));
    }
    Ok(())
}

fn apply_interior<T: Real>(
    samples: &[Complex<T>],
    grid: &QuadratureGrid<T>,
    stencil: impl Fn(usize, &[T]) -> Complex<T> + Sync,
) -> Vec<Complex<T>> {
    let mut out = vec![Complex::default(); samples.len()];
    out.par_iter_mut().enumerate().for_each(|(k, o)| {
        if is_interior(grid, k) {
            *o = stencil(k, &grid.point(k));
        }
    });
    out
}

/// `-sum_j (X_j^2 + Y_j^2) f`, each square expanded along its own axis as
/// `X_j^2 = d_xx - i y_j d_x - y_j^2/4`, `Y_j^2 = d_yy + i x_j d_y - x_j^2/4`.
pub fn apply_twisted_laplacian_fd<T: Real>(samples: &[Complex<T>], grid: &QuadratureGrid<T>) -> Result<Vec<Complex<T>>> {
    check(samples, grid)?;
    let n = grid.n();
    let h = grid.spacing();
    let (inv_h2, inv_2h) = ((h * h).recip(), (T::lit(2.0) * h).recip());
    let quarter = T::lit(0.25);
    let i = Complex::new(T::zero(), T::one());
    Ok(apply_interior(samples, grid, |k, z| {
        let f = samples[k];
        let mut acc = Complex::default();
        for j in 0..n {
            let (x, y) = (z[j], z[n + j]);
            // X_j^2 along axis j; the coefficient of d_x is the constant y_j
            let sx = grid.stride(j);
            let (fp, fm) = (samples[k + sx], samples[k - sx]);
            let xsq = (fp - f * T::lit(2.0) + fm) * inv_h2 - i * (fp - fm) * (y * inv_2h) - f * (quarter * y * y);
            // Y_j^2 along axis n + j
            let sy = grid.stride(n + j);
            let (fp, fm) = (samples[k + sy], samples[k - sy]);
            let ysq = (fp - f * T::lit(2.0) + fm) * inv_h2 + i * (fp - fm) * (x * inv_2h) - f * (quarter * x * x);
            acc += xsq + ysq;
        }
        -acc
    }))
}

/// `(-Delta + |z|^2/4 + i sum_j (y_j d_xj - x_j d_yj)) f`.
pub fn apply_twisted_laplacian_fd_oscillator<T: Real>(
    samples: &[Complex<T>],
    grid: &QuadratureGrid<T>,
) -> Result<Vec<Complex<T>>> {
    check(samples, grid)?;
    let n = grid.n();
    let h = grid.spacing();
    let (inv_h2, inv_2h) = ((h * h).recip(), (T::lit(2.0) * h).recip());
    let i = Complex::new(T::zero(), T::one());
    Ok(apply_interior(samples, grid, |k, z| {
        let f = samples[k];
        let mut laplacian: Complex<T> = Complex::default();
        for axis in 0..2 * n {
            let s = grid.stride(axis);
            laplacian += (samples[k + s] - f * T::lit(2.0) + samples[k - s]) * inv_h2;
        }
        let mut rotation: Complex<T> = Complex::default();
        for j in 0..n {
            let (sx, sy) = (grid.stride(j), grid.stride(n + j));
            let dx = (samples[k + sx] - samples[k - sx]) * inv_2h;
            let dy = (samples[k + sy] - samples[k - sy]) * inv_2h;
            rotation += dx * z[n + j] - dy * z[j];
        }
        let r2: T = z.iter().map(|v| *v * *v).sum();
        -laplacian + f * (r2 * T::lit(0.25)) + i * rotation
    }))
}

/// Interior `l^2` residual `||L_h f - lambda f|| / ||lambda f||`.
pub fn interior_relative_residual<T: Real>(
    applied: &[Complex<T>],
    samples: &[Complex<T>],
    eigenvalue: T,
    grid: &QuadratureGrid<T>,
) -> T {
    let (mut num, mut den) = (T::zero(), T::zero());
    for k in 0..samples.len() {
        if is_interior(grid, k) {
            let target = samples[k] * eigenvalue;
            num += (applied[k] - target).norm_sqr();
            den += target.norm_sqr();
        }
    }
    (num / den).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_hermite::{build_basis, Truncation};

    #[test]
    fn zero_maps_to_zero() {
        let grid = QuadratureGrid::<f64>::new(1, 2.0, 0.5, 1).unwrap();
        let z = vec![Complex::default(); grid.len()];
        assert!(apply_twisted_laplacian_fd(&z, &grid).unwrap().iter().all(|v| *v == Complex::default()));
    }

    #[test]
    fn too_small_grid() {
        let grid = QuadratureGrid::<f64>::new(1, 1.0, 1.0, 1).unwrap();
        let z = vec![Complex::default(); grid.len()];
        assert!(matches!(apply_twisted_laplacian_fd(&z, &grid), Err(Error::InvalidInput(_))));
        assert!(apply_twisted_laplacian_fd_oscillator(&z, &grid).is_err());
    }

    #[test]
    fn eigenrelation_low_levels() {
        let grid = QuadratureGrid::<f64>::new(1, 8.0, 0.05, 1).unwrap();
        let basis = build_basis(1, Truncation::new(1, 1), &grid, 200).unwrap();
        for (r, (_, nu)) in basis.index().iter().enumerate() {
            let f = basis.row(r);
            let lf = apply_twisted_laplacian_fd(f, &grid).unwrap();
            let lambda = (2 * nu.order() + 1) as f64;
            assert!(interior_relative_residual(&lf, f, lambda, &grid) < 1e-3);
            let lf2 = apply_twisted_laplacian_fd_oscillator(f, &grid).unwrap();
            let diff = lf.iter().zip(&lf2).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(diff < 1e-10);
        }
    }

    #[test]
    fn two_dimensional_eigenrelation() {
        let grid = QuadratureGrid::<f64>::new(2, 6.0, 0.25, 1).unwrap();
        let basis = build_basis(2, Truncation::new(1, 1), &grid, 200).unwrap();
        for (r, (_, nu)) in basis.index().iter().enumerate() {
            let f = basis.row(r);
            let lf = apply_twisted_laplacian_fd(f, &grid).unwrap();
            let lambda = (2 * nu.order() + 2) as f64;
            assert!(interior_relative_residual(&lf, f, lambda, &grid) < 2e-2, "{nu}");
        }
    }
}
