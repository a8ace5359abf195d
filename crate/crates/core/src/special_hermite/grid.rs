use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tensor trapezoid grid on `[-R, R]^{2n}` plus a uniform periodic time grid
/// `t_j = 2 pi j / M` on `[0, 2 pi)`.
///
/// Spatial points are stored row-major over the axes
/// `(x_1, .., x_n, y_1, .., y_n)`, with `x_1` varying slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid<T> {
    n: usize,
    radius: T,
    spacing: T,
    time_samples: usize,
    axis: Vec<T>,
    axis_weights: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> QuadratureGrid<T> {
    pub fn new(n: usize, radius: T, spacing: T, time_samples: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("dimension n must be at least 1".into()));
        }
        if !(radius > T::zero() && radius.is_finite()) || !(spacing > T::zero() && spacing.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "grid radius and spacing must be positive and finite, got R={radius}, h={spacing}"
            )));
        }
        if time_samples == 0 {
            return Err(Error::InvalidInput("time grid needs at least one sample".into()));
        }
        let ratio = T::lit(2.0) * radius / spacing;
        let cells = ratio.round();
        let tol = T::lit(1e-9) * ratio.max(T::one());
        if (ratio - cells).abs() > tol || cells < T::one() {
            return Err(Error::InvalidInput(format!("2R/h must be a positive integer, got {ratio}")));
        }
        let cells = cells.to_usize().expect("cell count");
        let step = T::lit(2.0) * radius / T::from_usize_lossy(cells);
        let axis: Vec<T> = (0..=cells).map(|i| -radius + step * T::from_usize_lossy(i)).collect();
        let half = T::lit(0.5);
        let axis_weights: Vec<T> =
            (0..=cells).map(|i| if i == 0 || i == cells { step * half } else { step }).collect();

        let side = cells + 1;
        let dims = 2 * n;
        let total = side.checked_pow(dims as u32).ok_or_else(|| Error::InvalidInput("grid too large".into()))?;
        let mut weights = vec![T::one(); total];
        // fill by repeated outer products, x_1 slowest
        let mut len = 1;
        for _ in 0..dims {
            for k in (0..len).rev() {
                let base = weights[k];
                for (i, aw) in axis_weights.iter().enumerate() {
                    weights[k * side + i] = base * *aw;
                }
            }
            len *= side;
        }
        Ok(QuadratureGrid { n, radius, spacing: step, time_samples, axis, axis_weights, weights })
    }

    /// Same spatial grid with a different number of time samples.
    pub fn with_time_samples(&self, time_samples: usize) -> Result<Self> {
        if time_samples == 0 {
            return Err(Error::InvalidInput("time grid needs at least one sample".into()));
        }
        Ok(QuadratureGrid { time_samples, ..self.clone() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn points_per_axis(&self) -> usize {
        self.axis.len()
    }

    /// Number of spatial points, `N^{2n}`.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// 1-D coordinates shared by all `2n` axes.
    pub fn axis(&self) -> &[T] {
        &self.axis
    }

    pub fn axis_weights(&self) -> &[T] {
        &self.axis_weights
    }

    /// Trapezoid weight of each spatial point.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Per-axis indices of spatial point `k`.
    pub fn axis_indices(&self, mut k: usize) -> Vec<usize> {
        let side = self.axis.len();
        let mut idx = vec![0; 2 * self.n];
        for slot in (0..2 * self.n).rev() {
            idx[slot] = k % side;
            k /= side;
        }
        idx
    }

    /// Coordinates `(x_1, .., x_n, y_1, .., y_n)` of spatial point `k`.
    pub fn point(&self, k: usize) -> Vec<T> {
        self.axis_indices(k).into_iter().map(|i| self.axis[i]).collect()
    }

    /// Flat-index stride of `axis` (0-based over the `2n` axes).
    pub fn stride(&self, axis: usize) -> usize {
        self.axis.len().pow((2 * self.n - 1 - axis) as u32)
    }

    pub fn time_samples(&self) -> usize {
        self.time_samples
    }

    pub fn time_points(&self) -> Vec<T> {
        let m = T::from_usize_lossy(self.time_samples);
        (0..self.time_samples).map(|j| T::TAU() * T::from_usize_lossy(j) / m).collect()
    }

    /// Rectangle-rule weight `2 pi / M`.
    pub fn time_weight(&self) -> T {
        T::TAU() / T::from_usize_lossy(self.time_samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_volume() {
        let g = QuadratureGrid::<f64>::new(1, 12.0, 0.1, 7).unwrap();
        assert_eq!(g.points_per_axis(), 241);
        assert_eq!(g.len(), 241 * 241);
        let s: f64 = g.weights().iter().sum();
        assert!((s - 24.0f64.powi(2)).abs() < 1e-9);
        let t: f64 = (0..g.time_samples()).map(|_| g.time_weight()).sum();
        assert!((t - std::f64::consts::TAU).abs() < 1e-12);

        let g2 = QuadratureGrid::<f64>::new(2, 3.0, 0.5, 1).unwrap();
        let s: f64 = g2.weights().iter().sum();
        assert!((s - 6.0f64.powi(4)).abs() < 1e-9);
    }

    #[test]
    fn point_layout_is_row_major() {
        let g = QuadratureGrid::<f64>::new(1, 1.0, 0.5, 1).unwrap();
        // 5 points per axis; k = ix * 5 + iy
        assert_eq!(g.point(0), vec![-1.0, -1.0]);
        assert_eq!(g.point(1), vec![-1.0, -0.5]);
        assert_eq!(g.point(5), vec![-0.5, -1.0]);
        assert_eq!(g.stride(0), 5);
        assert_eq!(g.stride(1), 1);
        let w = g.weights()[1];
        assert_eq!(w, 0.25 * 0.5);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(QuadratureGrid::<f64>::new(1, 1.0, 0.3, 4).is_err());
        assert!(QuadratureGrid::<f64>::new(1, -1.0, 0.5, 4).is_err());
        assert!(QuadratureGrid::<f64>::new(1, 1.0, 0.5, 0).is_err());
        assert!(QuadratureGrid::<f64>::new(0, 1.0, 0.5, 1).is_err());
    }

    #[test]
    fn time_points() {
        let g = QuadratureGrid::<f64>::new(1, 1.0, 0.5, 4).unwrap();
        let t = g.time_points();
        assert_eq!(t.len(), 4);
        assert!((t[1] - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }
}
