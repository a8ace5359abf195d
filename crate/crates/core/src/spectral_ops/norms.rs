use num_complex::Complex;
use rayon::prelude::*;

use super::{project, TimeSeriesSamples};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special_hermite::{synthesize, BasisTable, QuadratureGrid, SpectralField};

/// Which integral is taken first in a mixed space-time norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormOrder {
    /// `L^p_z(L^q_t)`: time norm at each point, then space.
    SpaceOuter,
    /// `L^q_t(L^p_z)`: space norm at each time, then time.
    TimeOuter,
}

/// Exponents selecting a Lebesgue, Triebel-Lizorkin, Sobolev or mixed norm.
/// `p` and `q` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormParams<T> {
    pub p: T,
    pub q: T,
    pub r: T,
    pub s: T,
    pub order: NormOrder,
}

impl<T: Real> NormParams<T> {
    /// Raw norms accept `p, q >= 1`.
    pub fn validate_raw(&self) -> Result<()> {
        if !(self.p >= T::one()) || !(self.q >= T::one()) {
            return Err(Error::Domain(format!("norm exponents need p, q >= 1, got p={}, q={}", self.p, self.q)));
        }
        Ok(())
    }

    /// Strichartz statements need `2 <= p <= inf` and `2 <= q < inf`.
    pub fn validate_theorem(&self) -> Result<()> {
        if !(self.p >= T::lit(2.0)) || !(self.q >= T::lit(2.0)) || self.q.is_infinite() {
            return Err(Error::Domain(format!(
                "Strichartz exponents need 2 <= p <= inf and 2 <= q < inf, got p={}, q={}",
                self.p, self.q
            )));
        }
        Ok(())
    }
}

/// Compensated (Neumaier) summation.
pub fn neumaier_sum<T: Real>(values: impl IntoIterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `(sum w_i a_i^p)^{1/p}` for non-negative `a_i`; `max a_i` when `p = inf`.
fn weighted_lp<T: Real>(weights: &[T], magnitudes: &[T], p: T) -> T {
    if p.is_infinite() {
        return magnitudes.iter().copied().fold(T::zero(), T::max);
    }
    if p == T::lit(2.0) {
        return neumaier_sum(weights.iter().zip(magnitudes).map(|(w, a)| *w * *a * *a)).sqrt();
    }
    neumaier_sum(weights.iter().zip(magnitudes).map(|(w, a)| *w * a.powf(p))).powf(p.recip())
}

/// Grid `L^p` norm of samples with the trapezoid weights.
pub fn grid_lp_norm<T: Real>(samples: &[Complex<T>], grid: &QuadratureGrid<T>, p: T) -> Result<T> {
    if samples.len() != grid.len() {
        return Err(Error::InvalidInput(format!("{} samples for a grid of {}", samples.len(), grid.len())));
    }
    if !(p >= T::one()) {
        return Err(Error::Domain(format!("L^p norm needs p >= 1, got {p}")));
    }
    let mags: Vec<T> = samples.iter().map(|v| v.norm()).collect();
    Ok(weighted_lp(grid.weights(), &mags, p))
}

/// `||f||_{W^{s,L}} = (sum_l l^{2s} ||P_l f||_2^2)^{1/2}`, by Parseval on the
/// coefficients.
pub fn sobolev_norm<T: Real>(s: T, f: &SpectralField<T>) -> T {
    let two_s = T::lit(2.0) * s;
    neumaier_sum(f.levels().into_iter().map(|l| {
        let e = project(l, f).l2_norm();
        T::from_usize_lossy(l).powf(two_s) * e * e
    }))
    .sqrt()
}

/// Grid samples of `P_l f` for every level present in `f`, ascending.
pub fn level_samples<T: Real>(f: &SpectralField<T>, basis: &BasisTable<T>) -> Result<Vec<(usize, Vec<Complex<T>>)>> {
    f.levels().into_iter().map(|l| Ok((l, synthesize(&project(l, f), basis)?))).collect()
}

/// `|| (sum_l l^{rq} |P_l f(z)|^q)^{1/q} ||_{L^p}` on the basis grid.
/// `q = inf` takes the pointwise maximum over levels, `p = inf` the grid maximum.
pub fn triebel_lizorkin_norm<T: Real>(r: T, p: T, q: T, f: &SpectralField<T>, basis: &BasisTable<T>) -> Result<T> {
    let levels = level_samples(f, basis)?;
    triebel_lizorkin_from_levels(r, p, q, &levels, basis.grid())
}

/// [`triebel_lizorkin_norm`] from the output of [`level_samples`], for
/// evaluating many `(r, p, q)` on one field.
pub fn triebel_lizorkin_from_levels<T: Real>(
    r: T,
    p: T,
    q: T,
    levels: &[(usize, Vec<Complex<T>>)],
    grid: &QuadratureGrid<T>,
) -> Result<T> {
    if !(p >= T::one()) {
        return Err(Error::Domain(format!("Triebel-Lizorkin norm needs 1 <= p <= inf, got {p}")));
    }
    if !(q > T::zero()) {
        return Err(Error::Domain(format!("Triebel-Lizorkin norm needs 0 < q <= inf, got {q}")));
    }
    if levels.iter().any(|(_, s)| s.len() != grid.len()) {
        return Err(Error::InvalidInput("level samples do not match the grid".into()));
    }
    let factors: Vec<T> = levels.iter().map(|(l, _)| T::from_usize_lossy(*l).powf(r)).collect();
    let two = T::lit(2.0);
    let pointwise: Vec<T> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            if q.is_infinite() {
                levels.iter().zip(&factors).map(|((_, s), a)| *a * s[k].norm()).fold(T::zero(), T::max)
            } else if q == two {
                levels.iter().zip(&factors).map(|((_, s), a)| *a * *a * s[k].norm_sqr()).sum::<T>().sqrt()
            } else {
                let sum: T = levels.iter().zip(&factors).map(|((_, s), a)| (*a * s[k].norm()).powf(q)).sum();
                sum.powf(q.recip())
            }
        })
        .collect();
    Ok(weighted_lp(grid.weights(), &pointwise, p))
}

/// Mixed norm of a sampled space-time function. `spatial_weights` are the
/// grid weights; time samples carry the weight `2 pi / M`.
pub fn mixed_norm<T: Real>(u: &TimeSeriesSamples<T>, spatial_weights: &[T], p: T, q: T, order: NormOrder) -> Result<T> {
    if u.points() != spatial_weights.len() {
        return Err(Error::InvalidInput(format!(
            "samples have {} points, weights {}",
            u.points(),
            spatial_weights.len()
        )));
    }
    if !(p >= T::one()) || !(q >= T::one()) {
        return Err(Error::Domain(format!("mixed norm needs p, q >= 1, got p={p}, q={q}")));
    }
    let time_weights = vec![u.time_weight(); u.times().len()];
    let slices = u.slices();
    Ok(match order {
        NormOrder::SpaceOuter => {
            let inner: Vec<T> = (0..u.points())
                .into_par_iter()
                .map(|k| {
                    let mags: Vec<T> = slices.iter().map(|s| s[k].norm()).collect();
                    weighted_lp(&time_weights, &mags, q)
                })
                .collect();
            weighted_lp(spatial_weights, &inner, p)
        }
        NormOrder::TimeOuter => {
            let inner: Vec<T> = slices
                .par_iter()
                .map(|s| {
                    let mags: Vec<T> = s.iter().map(|v| v.norm()).collect();
                    weighted_lp(spatial_weights, &mags, p)
                })
                .collect();
            weighted_lp(&time_weights, &inner, q)
        }
    })
}
