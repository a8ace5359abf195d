//! Operator calculus on coefficient fields: spectral projections, heat
//! semigroup, fractional powers and the Schrodinger propagator
//! `e^{-it L}`, plus the norms built from them.

mod fd;
mod norms;

pub use fd::{
    apply_twisted_laplacian_fd, apply_twisted_laplacian_fd_oscillator, interior_relative_residual, is_interior,
};
pub use norms::{
    grid_lp_norm, level_samples, mixed_norm, neumaier_sum, sobolev_norm, triebel_lizorkin_from_levels,
    triebel_lizorkin_norm, NormOrder, NormParams,
};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special_functions::MultiIndex;
use crate::special_hermite::{level_of, synthesize, BasisTable, QuadratureGrid, SpectralField};

/// Landau level `2|nu| + n` (eigenvalue of `phi_{mu nu}`).
pub fn landau_level(nu: &MultiIndex) -> usize {
    level_of(nu)
}

/// `P_level f`: keeps the coefficients on the given level.
pub fn project<T: Real>(level: usize, f: &SpectralField<T>) -> SpectralField<T> {
    f.filter_levels(|l| l == level)
}

/// `L^s f = sum_l l^s P_l f`. Levels are `>= n >= 1`, so negative `s` is fine.
pub fn fractional_power<T: Real>(s: T, f: &SpectralField<T>) -> SpectralField<T> {
    f.map_by_level(|l, c| c * T::from_usize_lossy(l).powf(s))
}

/// `e^{-t L} f = sum_l e^{-t l} P_l f` for `t >= 0`.
pub fn heat_semigroup<T: Real>(t: T, f: &SpectralField<T>) -> Result<SpectralField<T>> {
    if !(t >= T::zero()) || !t.is_finite() {
        return Err(Error::InvalidInput(format!("heat semigroup time must be finite and >= 0, got {t}")));
    }
    Ok(f.map_by_level(|l, c| c * (-t * T::from_usize_lossy(l)).exp()))
}

/// Phase `e^{-i t l}`. The product `t l` is reduced modulo `2 pi` in `f64`
/// so that periodicity holds to roundoff for large levels.
fn phase<T: Real>(t: T, level: usize) -> Complex<T> {
    let angle = (t.to_f64_lossy() * level as f64).rem_euclid(std::f64::consts::TAU);
    Complex::from_polar(T::one(), -T::lit(angle))
}

/// Solution of `i u_t = L u`, `u(0) = f` at time `t`:
/// `u(t) = sum_l e^{-i t l} P_l f`.
pub fn propagate<T: Real>(t: T, f: &SpectralField<T>) -> SpectralField<T> {
    f.map_by_level(|l, c| c * phase(t, l))
}

/// Smallest `M` for which the rectangle rule integrates `|u(t, z)|^2`
/// exactly over one period.
pub fn exact_time_samples(max_level: usize) -> usize {
    2 * max_level + 1
}

/// Coefficient slices `u(t_j)` on the time grid of a [`QuadratureGrid`].
#[derive(Debug, Clone)]
pub struct TimeSeriesField<T> {
    times: Vec<T>,
    time_weight: T,
    initial: SpectralField<T>,
    slices: Vec<SpectralField<T>>,
    exact_for_q2: bool,
    warnings: Vec<String>,
}

/// `u(t_j) = propagate(t_j, f)` for every time sample of `grid`.
///
/// When `M < 2 l_max + 1` the series is flagged as inexact for `q = 2` time
/// norms and a warning is recorded.
pub fn propagate_series<T: Real>(grid: &QuadratureGrid<T>, f: &SpectralField<T>) -> TimeSeriesField<T> {
    let times = grid.time_points();
    let slices = times.iter().map(|&t| propagate(t, f)).collect();
    let required = exact_time_samples(f.max_level().unwrap_or(0));
    let exact_for_q2 = grid.time_samples() >= required;
    let mut warnings = Vec::new();
    if !exact_for_q2 {
        warnings.push(format!(
            "M = {} time samples is below 2*ell_max+1 = {required}; q = 2 time norms are not exact",
            grid.time_samples()
        ));
    }
    TimeSeriesField { times, time_weight: grid.time_weight(), initial: f.clone(), slices, exact_for_q2, warnings }
}

impl<T: Real> TimeSeriesField<T> {
    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn slices(&self) -> &[SpectralField<T>] {
        &self.slices
    }

    pub fn initial(&self) -> &SpectralField<T> {
        &self.initial
    }

    pub fn exact_for_q2(&self) -> bool {
        self.exact_for_q2
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Grid samples of every slice. Synthesizes each `P_l f` once and applies
    /// the phases per time sample, which equals synthesizing every slice.
    pub fn materialize(&self, basis: &BasisTable<T>) -> Result<TimeSeriesSamples<T>> {
        let levels = level_samples(&self.initial, basis)?;
        let points = basis.grid().len();
        let slices = self
            .times
            .iter()
            .map(|&t| {
                let mut u = vec![Complex::default(); points];
                for (l, s) in &levels {
                    let ph = phase(t, *l);
                    for (d, v) in u.iter_mut().zip(s) {
                        *d += ph * *v;
                    }
                }
                u
            })
            .collect();
        TimeSeriesSamples::new(self.times.clone(), self.time_weight, slices)
    }
}

/// Grid samples `u(t_j, z_k)` with the time rectangle weight.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesSamples<T> {
    times: Vec<T>,
    time_weight: T,
    slices: Vec<Vec<Complex<T>>>,
}

impl<T: Real> TimeSeriesSamples<T> {
    pub fn new(times: Vec<T>, time_weight: T, slices: Vec<Vec<Complex<T>>>) -> Result<Self> {
        if times.len() != slices.len() || times.is_empty() {
            return Err(Error::InvalidInput(format!(
                "{} time points but {} slices",
                times.len(),
                slices.len()
            )));
        }
        let len = slices[0].len();
        if slices.iter().any(|s| s.len() != len) {
            return Err(Error::InvalidInput("time slices have different lengths".into()));
        }
        Ok(TimeSeriesSamples { times, time_weight, slices })
    }

    /// Samples `u(t_j, z_k) = g(t_j, k)` on the time grid of `grid`.
    pub fn from_fn(grid: &QuadratureGrid<T>, g: impl Fn(T, usize) -> Complex<T>) -> Self {
        let times = grid.time_points();
        let slices = times.iter().map(|&t| (0..grid.len()).map(|k| g(t, k)).collect()).collect();
        TimeSeriesSamples { times, time_weight: grid.time_weight(), slices }
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn time_weight(&self) -> T {
        self.time_weight
    }

    pub fn slices(&self) -> &[Vec<Complex<T>>] {
        &self.slices
    }

    pub fn points(&self) -> usize {
        self.slices[0].len()
    }
}

/// Convenience: grid samples of `u(t)` for a single time.
pub fn propagate_samples<T: Real>(t: T, f: &SpectralField<T>, basis: &BasisTable<T>) -> Result<Vec<Complex<T>>> {
    synthesize(&propagate(t, f), basis)
}
