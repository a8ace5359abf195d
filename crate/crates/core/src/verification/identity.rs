//! The time-L² identity `||u||_{L^p_z(L^2_t)} = sqrt(2 pi) ||f||_{F^0_{p,2}}`
//! and the Hölder chain built on it.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special_hermite::{BasisTable, QuadratureGrid, SpectralField};
use crate::spectral_ops::{
    exact_time_samples, level_samples, mixed_norm, propagate_series, triebel_lizorkin_norm, NormOrder,
    TimeSeriesSamples,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport<T> {
    pub p: T,
    pub lhs: T,
    pub rhs: T,
    pub relative_error: T,
    /// `max_z | ||u(., z)||_{L^2_t} - (sum_l 2 pi |P_l f(z)|^2)^{1/2} |`,
    /// relative to the largest pointwise value.
    pub pointwise_error: T,
    pub time_samples: usize,
}

/// Hölder step `||f||_{F^0_{p,2}} <= (2 pi)^{-1/q} ||u||_{L^p(L^q_t)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundReport<T> {
    pub p: T,
    pub q: T,
    pub tl_norm: T,
    pub mixed_norm: T,
    pub bound: T,
    pub holds: bool,
}

fn time_samples_for<T: Real>(f: &SpectralField<T>, basis: &BasisTable<T>, grid: &QuadratureGrid<T>) -> Result<usize> {
    let b = basis.grid();
    if grid.n() != b.n() || grid.len() != b.len() || grid.radius() != b.radius() || grid.spacing() != b.spacing() {
        return Err(Error::InvalidInput("time grid must share the spatial grid of the basis".into()));
    }
    let required = exact_time_samples(f.max_level().unwrap_or(0));
    let got = grid.time_samples();
    if got < required {
        return Err(Error::TimeExactness { got, required });
    }
    Ok(got)
}

fn solution_samples<T: Real>(
    f: &SpectralField<T>,
    basis: &BasisTable<T>,
    grid: &QuadratureGrid<T>,
) -> Result<TimeSeriesSamples<T>> {
    propagate_series(grid, f).materialize(basis)
}

fn relative<T: Real>(a: T, b: T) -> T {
    let scale = a.abs().max(b.abs());
    if scale == T::zero() {
        T::zero()
    } else {
        (a - b).abs() / scale
    }
}

/// Checks the identity for every `p` in `ps`, sharing one materialized solution.
///
/// `grid` supplies the time samples and must share the spatial grid of
/// `basis`. It must have `M >= 2 l_max + 1` samples; smaller grids
/// are rejected because the identity is only exact there.
pub fn verify_time_l2_identity_many<T: Real>(
    f: &SpectralField<T>,
    ps: &[T],
    basis: &BasisTable<T>,
    grid: &QuadratureGrid<T>,
) -> Result<Vec<IdentityReport<T>>> {
    let m = time_samples_for(f, basis, grid)?;
    let u = solution_samples(f, basis, grid)?;
    let weights = basis.grid().weights();
    let two_pi = T::PI() + T::PI();

    let levels = level_samples(f, basis)?;
    let slices = u.slices();
    let tw = u.time_weight();
    let (worst, peak) = (0..u.points())
        .into_par_iter()
        .map(|k| {
            let time_l2 = slices.iter().map(|s| s[k].norm_sqr()).sum::<T>() * tw;
            let spectral = levels.iter().map(|(_, s)| s[k].norm_sqr()).sum::<T>() * two_pi;
            let (a, b) = (time_l2.sqrt(), spectral.sqrt());
            ((a - b).abs(), a.max(b))
        })
        .reduce(|| (T::zero(), T::zero()), |x, y| (x.0.max(y.0), x.1.max(y.1)));
    let pointwise_error = if peak > T::zero() { worst / peak } else { T::zero() };

    ps.iter()
        .map(|&p| {
            let lhs = mixed_norm(&u, weights, p, T::lit(2.0), NormOrder::SpaceOuter)?;
            let rhs = two_pi.sqrt() * triebel_lizorkin_norm(T::zero(), p, T::lit(2.0), f, basis)?;
            Ok(IdentityReport { p, lhs, rhs, relative_error: relative(lhs, rhs), pointwise_error, time_samples: m })
        })
        .collect()
}

pub fn verify_time_l2_identity<T: Real>(
    f: &SpectralField<T>,
    p: T,
    basis: &BasisTable<T>,
    grid: &QuadratureGrid<T>,
) -> Result<IdentityReport<T>> {
    Ok(verify_time_l2_identity_many(f, &[p], basis, grid)?.remove(0))
}

/// Lower-bound chain for each `q`: the `F^0_{p,2}` norm against
/// `(2 pi)^{-1/q} ||u||_{L^p(L^q_t)}`. The rectangle rule on `[0, 2 pi)` has
/// total weight `2 pi`, so the discrete Hölder step holds exactly.
pub fn lower_bound_chain<T: Real>(
    f: &SpectralField<T>,
    p: T,
    qs: &[T],
    basis: &BasisTable<T>,
    grid: &QuadratureGrid<T>,
) -> Result<Vec<LowerBoundReport<T>>> {
    time_samples_for(f, basis, grid)?;
    let u = solution_samples(f, basis, grid)?;
    let tl = triebel_lizorkin_norm(T::zero(), p, T::lit(2.0), f, basis)?;
    let two_pi = T::PI() + T::PI();
    let slack = T::one() + T::lit(64.0) * T::epsilon().sqrt().max(T::lit(1e-9));
    qs.iter()
        .map(|&q| {
            if !(q >= T::lit(2.0)) || q.is_infinite() {
                return Err(Error::Domain(format!("lower-bound chain needs 2 <= q < inf, got {q}")));
            }
            let mixed = mixed_norm(&u, basis.grid().weights(), p, q, NormOrder::SpaceOuter)?;
            let bound = two_pi.powf(-q.recip()) * mixed;
            Ok(LowerBoundReport { p, q, tl_norm: tl, mixed_norm: mixed, bound, holds: tl <= bound * slack })
        })
        .collect()
}
