use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::sweep::SweepRecord;

/// Ordinary least squares fit `ln ratio = slope * ln ell + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit<T> {
    pub slope: T,
    pub intercept: T,
    pub residual_rms: T,
    pub ell_min: T,
    pub ell_max: T,
    pub points: usize,
}

/// Fits a power law to `(ell, ratio)` pairs.
pub fn fit_power_law<T: Real>(points: &[(T, T)]) -> Result<ExponentFit<T>> {
    let mut distinct: Vec<T> = points.iter().map(|p| p.0).collect();
    distinct.sort_by(|a, b| a.partial_cmp(b).expect("finite ell"));
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 distinct ell values, got {}", distinct.len())));
    }
    if points.iter().any(|&(l, r)| !(l > T::zero()) || !(r > T::zero()) || !r.is_finite()) {
        return Err(Error::Fit("all ell values and ratios must be positive and finite".into()));
    }
    let xs: Vec<T> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<T> = points.iter().map(|p| p.1.ln()).collect();
    let m = T::from_usize_lossy(points.len());
    let mx = xs.iter().copied().sum::<T>() / m;
    let my = ys.iter().copied().sum::<T>() / m;
    let sxx: T = xs.iter().map(|x| (*x - mx) * (*x - mx)).sum();
    let sxy: T = xs.iter().zip(&ys).map(|(x, y)| (*x - mx) * (*y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: T = xs.iter().zip(&ys).map(|(x, y)| (*y - slope * *x - intercept).powi(2)).sum();
    Ok(ExponentFit {
        slope,
        intercept,
        residual_rms: (sse / m).sqrt(),
        ell_min: distinct[0],
        ell_max: distinct[distinct.len() - 1],
        points: points.len(),
    })
}

/// Largest ratio observed at each level, ascending in level.
pub fn max_ratio_per_level<T: Real>(records: &[SweepRecord<T>]) -> Vec<(usize, T)> {
    let mut best: BTreeMap<usize, T> = BTreeMap::new();
    for r in records {
        let e = best.entry(r.ell).or_insert(r.ratio);
        if r.ratio > *e {
            *e = r.ratio;
        }
    }
    best.into_iter().collect()
}

/// Fit of the per-level maximum ratio against the level.
pub fn fit_exponent<T: Real>(records: &[SweepRecord<T>]) -> Result<ExponentFit<T>> {
    let pts: Vec<(T, T)> =
        max_ratio_per_level(records).into_iter().map(|(l, r)| (T::from_usize_lossy(l), r)).collect();
    fit_power_law(&pts)
}

/// `max / min` of a set of positive values (infinite if any is zero).
pub fn band_ratio<T: Real>(values: impl IntoIterator<Item = T>) -> T {
    let (mut lo, mut hi) = (T::infinity(), T::zero());
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo > T::zero() {
        hi / lo
    } else {
        T::infinity()
    }
}
