//! Projection-norm and Strichartz ratio sweeps.

use rayon::prelude::*;

use super::fit::{band_ratio, fit_exponent, max_ratio_per_level, ExponentFit};
use super::kappa::kappa_p;
use super::rng::{random_field, random_level_field, record_stream, stream_id};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special_hermite::{level_of, synthesize, BasisTable, SpectralField};
use crate::spectral_ops::{
    exact_time_samples, grid_lp_norm, mixed_norm, project, propagate_series, sobolev_norm, NormOrder,
};

/// One inequality instance: `ratio = numerator / denominator`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord<T> {
    pub n: usize,
    pub p: T,
    /// Time exponent; `None` for projection sweeps.
    pub q: Option<T>,
    /// Sobolev index; `None` for projection sweeps.
    pub s: Option<T>,
    pub ell: usize,
    /// Random trials are numbered `0..trials`; eigenfunction candidates follow.
    pub trial: usize,
    pub seed: u64,
    pub numerator: T,
    pub denominator: T,
    pub ratio: T,
    pub grid_radius: T,
    pub grid_spacing: T,
    pub time_samples: usize,
    pub deterministic: bool,
}

/// Field used for one record.
enum Candidate<T> {
    Random(SpectralField<T>),
    Eigen(SpectralField<T>),
}

/// Random trials followed by every basis function `phi_{mu nu}` on the level.
fn level_candidates<T: Real>(basis: &BasisTable<T>, level: usize, trials: usize, seed: u64) -> Vec<(usize, Candidate<T>)> {
    let (n, trunc) = (basis.n(), basis.truncation());
    let mut out: Vec<(usize, Candidate<T>)> = (0..trials)
        .map(|t| (t, Candidate::Random(random_level_field(n, trunc, level, &mut record_stream(seed, stream_id(level, t))))))
        .collect();
    let eigen = trunc.pairs(n).into_iter().filter(|(_, nu)| level_of(nu) == level);
    for (j, (mu, nu)) in eigen.enumerate() {
        let f = SpectralField::basis_function(n, trunc, mu, nu).expect("pair lies in truncation");
        out.push((trials + j, Candidate::Eigen(f)));
    }
    out
}

fn available_levels<T: Real>(basis: &BasisTable<T>) -> Vec<usize> {
    let mut ls: Vec<usize> = basis.index().iter().map(|(_, nu)| level_of(nu)).collect();
    ls.sort_unstable();
    ls.dedup();
    ls
}

fn check_dimension<T: Real>(n: usize, basis: &BasisTable<T>) -> Result<()> {
    if n != basis.n() {
        return Err(Error::InvalidInput(format!("sweep dimension {n} but basis dimension {}", basis.n())));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct ProjectionSweep<T> {
    pub records: Vec<SweepRecord<T>>,
    /// Fit of the per-level maximum ratio; `None` with fewer than 3 levels.
    pub fit: Option<ExponentFit<T>>,
    pub notices: Vec<String>,
    pub kappa: T,
}

impl<T: Real> ProjectionSweep<T> {
    /// `max ratio at l / l^{kappa_p}` per level.
    pub fn normalized_maxima(&self) -> Vec<(usize, T)> {
        max_ratio_per_level(&self.records)
            .into_iter()
            .map(|(l, r)| (l, r / T::from_usize_lossy(l).powf(self.kappa)))
            .collect()
    }

    /// `max / min` of [`Self::normalized_maxima`].
    pub fn normalized_band(&self) -> T {
        band_ratio(self.normalized_maxima().into_iter().map(|x| x.1))
    }
}

/// `||P_l f||_{L^p(grid)} / ||f||_2` for random level-`l` fields and the
/// eigenfunction candidates of each level.
pub fn projection_norm_sweep<T: Real>(
    n: usize,
    p: T,
    levels: &[usize],
    trials: usize,
    basis: &BasisTable<T>,
    seed: u64,
) -> Result<ProjectionSweep<T>> {
    check_dimension(n, basis)?;
    let kappa = kappa_p(n, p)?;
    let present = available_levels(basis);
    let mut notices = Vec::new();
    let mut jobs = Vec::new();
    for &l in levels {
        if present.binary_search(&l).is_err() {
            notices.push(format!("level {l} has no basis functions in the truncation; skipped"));
            continue;
        }
        jobs.extend(level_candidates(basis, l, trials, seed).into_iter().map(|(t, c)| (l, t, c)));
    }
    let grid = basis.grid();
    let records = jobs
        .par_iter()
        .map(|(l, trial, cand)| {
            let (f, deterministic) = match cand {
                Candidate::Random(f) => (f, false),
                Candidate::Eigen(f) => (f, true),
            };
            let denominator = f.l2_norm();
            let samples = synthesize(&project(*l, f), basis)?;
            let numerator = grid_lp_norm(&samples, grid, p)?;
            Ok(SweepRecord {
                n,
                p,
                q: None,
                s: None,
                ell: *l,
                trial: *trial,
                seed,
                numerator,
                denominator,
                ratio: numerator / denominator,
                grid_radius: grid.radius(),
                grid_spacing: grid.spacing(),
                time_samples: 0,
                deterministic,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_exponent(&records).ok();
    Ok(ProjectionSweep { records, fit, notices, kappa })
}

/// Initial data for a Strichartz sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    /// Gaussian coefficients on the whole truncation.
    RandomTruncated,
    /// `f = P_l g` for each listed level.
    LevelConcentrated(Vec<usize>),
}

/// Number of time samples used for the mixed norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimePolicy {
    /// `M = 2 l_max + 1` of each field.
    Auto,
    Explicit(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrichartzSpec<T> {
    pub p: T,
    pub q: T,
    pub s: T,
    pub family: Family,
    pub trials: usize,
    pub time_policy: TimePolicy,
}

#[derive(Debug, Clone)]
pub struct StrichartzSweep<T> {
    pub records: Vec<SweepRecord<T>>,
    /// Largest ratio per level (level-concentrated) or a single entry keyed by
    /// the top level of the truncation (random).
    pub max_per_level: Vec<(usize, T)>,
    /// `max / min` of `max_per_level`.
    pub band: T,
    pub fit: Option<ExponentFit<T>>,
    /// For `q = 2` level-concentrated runs: largest relative gap between the
    /// ratio and `sqrt(2 pi) ||P_l g||_p / (l^s ||P_l g||_2)`.
    pub cross_check_error: Option<T>,
    pub notices: Vec<String>,
}

/// `||u||_{L^p_z(L^q_t)} / ||f||_{W^{s,L}}` with `u = e^{-itL} f`.
pub fn strichartz_sweep<T: Real>(
    n: usize,
    spec: &StrichartzSpec<T>,
    basis: &BasisTable<T>,
    seed: u64,
) -> Result<StrichartzSweep<T>> {
    check_dimension(n, basis)?;
    let (p, q, s) = (spec.p, spec.q, spec.s);
    if !(p >= T::lit(2.0)) || !(q >= T::lit(2.0)) || q.is_infinite() {
        return Err(Error::Domain(format!("Strichartz sweep needs 2 <= p <= inf and 2 <= q < inf, got p={p}, q={q}")));
    }
    let q_is_two = q == T::lit(2.0);
    let mut notices = Vec::new();
    let mut jobs: Vec<(usize, usize, Candidate<T>)> = Vec::new();
    match &spec.family {
        Family::RandomTruncated => {
            let top = basis.truncation().max_level(n);
            for t in 0..spec.trials {
                let f = random_field(n, basis.truncation(), &mut record_stream(seed, stream_id(0, t)));
                jobs.push((top, t, Candidate::Random(f)));
            }
        }
        Family::LevelConcentrated(levels) => {
            let present = available_levels(basis);
            for &l in levels {
                if present.binary_search(&l).is_err() {
                    notices.push(format!("level {l} has no basis functions in the truncation; skipped"));
                    continue;
                }
                jobs.extend(level_candidates(basis, l, spec.trials, seed).into_iter().map(|(t, c)| (l, t, c)));
            }
        }
    }

    // Time grids are fixed up front so an inexact q = 2 request fails before any work.
    let mut planned = Vec::with_capacity(jobs.len());
    for (l, t, cand) in jobs {
        let f = match &cand {
            Candidate::Random(f) | Candidate::Eigen(f) => f,
        };
        let required = exact_time_samples(f.max_level().unwrap_or(0));
        let m = match spec.time_policy {
            TimePolicy::Auto => required,
            TimePolicy::Explicit(m) => {
                if q_is_two && m < required {
                    return Err(Error::TimeExactness { got: m, required });
                }
                m
            }
        };
        planned.push((l, t, cand, m));
    }

    let grid = basis.grid();
    let outcomes = planned
        .par_iter()
        .map(|(l, trial, cand, m)| {
            let (f, deterministic) = match cand {
                Candidate::Random(f) => (f, false),
                Candidate::Eigen(f) => (f, true),
            };
            let denominator = sobolev_norm(s, f);
            if !(denominator > T::zero()) {
                return Ok((None, None));
            }
            let tgrid = grid.with_time_samples((*m).max(1))?;
            let u = propagate_series(&tgrid, f).materialize(basis)?;
            let numerator = mixed_norm(&u, grid.weights(), p, q, NormOrder::SpaceOuter)?;
            let ratio = numerator / denominator;
            let cross = if q_is_two && matches!(spec.family, Family::LevelConcentrated(_)) {
                let pl = grid_lp_norm(&synthesize(f, basis)?, grid, p)?;
                let two_pi = T::PI() + T::PI();
                let expected = two_pi.sqrt() * pl / (T::from_usize_lossy(*l).powf(s) * f.l2_norm());
                Some((ratio - expected).abs() / expected)
            } else {
                None
            };
            let rec = SweepRecord {
                n,
                p,
                q: Some(q),
                s: Some(s),
                ell: *l,
                trial: *trial,
                seed,
                numerator,
                denominator,
                ratio,
                grid_radius: grid.radius(),
                grid_spacing: grid.spacing(),
                time_samples: *m,
                deterministic,
            };
            Ok((Some(rec), cross))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut records = Vec::new();
    let mut cross_check_error: Option<T> = None;
    for ((l, trial, _, _), (rec, cross)) in planned.iter().zip(outcomes) {
        match rec {
            Some(r) => records.push(r),
            None => notices.push(format!("level {l} trial {trial}: zero field, record skipped")),
        }
        if let Some(c) = cross {
            cross_check_error = Some(cross_check_error.map_or(c, |e| e.max(c)));
        }
    }
    let max_per_level = max_ratio_per_level(&records);
    let band = band_ratio(max_per_level.iter().map(|x| x.1));
    let fit = fit_exponent(&records).ok();
    Ok(StrichartzSweep { records, max_per_level, band, fit, cross_check_error, notices })
}
