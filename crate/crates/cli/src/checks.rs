//! Verification checks behind `twisted verify`.

use rayon::prelude::*;
use serde::Serialize;

use twisted_core::special_hermite::{min_quad_order, DEFAULT_QUAD_ORDER};
use twisted_core::spectral_ops::{
    apply_twisted_laplacian_fd, apply_twisted_laplacian_fd_oscillator, exact_time_samples, grid_lp_norm,
    interior_relative_residual, level_samples, sobolev_norm, triebel_lizorkin_from_levels,
};
use twisted_core::verification::{
    kappa_pq, kappa_range_check, lower_bound_chain, random_field, record_stream, stream_id,
    verify_time_l2_identity_many, wainger_suite, TimePolicy,
};
use twisted_core::{build_basis, synthesize, BasisTable64, QuadratureGrid64, SpectralField64, Truncation};

use crate::config::{Experiment, TruncationConfig};
use crate::error::CliResult;

/// Stream namespaces so that checks never share random draws with sweeps.
const IDENTITY_STREAM: usize = 0x4944_0000;
const NORM_STREAM: usize = 0x4e43_0000;
const WAINGER_SEED_MIX: u64 = 0x5741_494e_4745_5200;
/// Fields per identity run that also get the Hölder chain.
const CHAIN_FIELDS: usize = 5;

/// One line of the verify report. Passes when `observed <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub check: String,
    pub observed: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
}

impl CheckOutcome {
    pub fn new(check: &str, observed: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        CheckOutcome { check: check.into(), observed, tolerance, pass: observed <= tolerance, detail: detail.into() }
    }
}

/// Runs one experiment block. Sweep blocks produce no checks.
pub fn run(exp: &Experiment, basis: &BasisTable64, policy: TimePolicy, seed: u64) -> CliResult<Vec<CheckOutcome>> {
    let full = basis.truncation();
    let sub = |t: &Option<TruncationConfig>| t.map_or(full, |t| Truncation::new(t.mu_max, t.nu_max));
    Ok(match exp {
        Experiment::Gram { tolerance } => vec![gram(basis, *tolerance)],
        Experiment::Eigenrelation { max_index, radius, spacing, tolerance, agreement_tolerance } => {
            eigenrelation(*max_index, *radius, *spacing, *tolerance, *agreement_tolerance)?
        }
        Experiment::Identity { fields, truncation, p, tolerance } => {
            let ps: Vec<f64> = p.iter().map(|x| x.0).collect();
            identity(basis, sub(truncation), *fields, &ps, *tolerance, policy, seed)?
        }
        Experiment::NormConsistency { fields, truncation, tolerance } => {
            norm_consistency(basis, sub(truncation), *fields, *tolerance, seed)?
        }
        Experiment::Wainger { r, q, degrees, trials, time_samples } => {
            vec![wainger(*r, *q, degrees, *trials, *time_samples, seed)?]
        }
        Experiment::KappaRange { q } => kappa_range(basis.n(), q)?,
        Experiment::ProjectionSweep { .. } | Experiment::StrichartzSweep { .. } => Vec::new(),
    })
}

pub fn gram(basis: &BasisTable64, tolerance: f64) -> CheckOutcome {
    let g = basis.grid();
    CheckOutcome::new(
        "gram_orthonormality",
        basis.gram_max_deviation(),
        tolerance,
        format!(
            "{} functions, R={}, h={}, quad order {}",
            basis.len(),
            g.radius(),
            g.spacing(),
            basis.quad_order()
        ),
    )
}

/// Per-function eigenrelation residuals of the finite-difference operator.
#[derive(Debug, Clone)]
pub struct EigenRow {
    pub label: String,
    pub eigenvalue: f64,
    pub residual: f64,
    pub residual_coarse: f64,
    pub stencil_gap: f64,
}

/// FD residuals for every `phi_{mu nu}` with indices `<= max_index` (`n = 1`)
/// at spacing `h` and `2h` on `[-R, R]^2`.
pub fn eigenrelation_rows(max_index: usize, radius: f64, spacing: f64) -> CliResult<Vec<EigenRow>> {
    let t = Truncation::new(max_index, max_index);
    let order = DEFAULT_QUAD_ORDER.max(min_quad_order(max_index));
    let fine = QuadratureGrid64::new(1, radius, spacing, 1)?;
    let coarse = QuadratureGrid64::new(1, radius, 2.0 * spacing, 1)?;
    let bf = build_basis(1, t, &fine, order)?;
    let bc = build_basis(1, t, &coarse, order)?;
    bf.index()
        .par_iter()
        .enumerate()
        .map(|(r, (mu, nu))| {
            let lambda = (2 * nu.order() + 1) as f64;
            let s = bf.row(r);
            let a = apply_twisted_laplacian_fd(s, &fine)?;
            let b = apply_twisted_laplacian_fd_oscillator(s, &fine)?;
            let gap = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            let residual = interior_relative_residual(&a, s, lambda, &fine);
            let sc = bc.row(r);
            let ac = apply_twisted_laplacian_fd(sc, &coarse)?;
            let residual_coarse = interior_relative_residual(&ac, sc, lambda, &coarse);
            Ok(EigenRow { label: format!("phi_{{{mu},{nu}}}"), eigenvalue: lambda, residual, residual_coarse, stencil_gap: gap })
        })
        .collect()
}

pub fn eigenrelation(
    max_index: usize,
    radius: f64,
    spacing: f64,
    tolerance: f64,
    agreement_tolerance: f64,
) -> CliResult<Vec<CheckOutcome>> {
    let rows = eigenrelation_rows(max_index, radius, spacing)?;
    let worst = rows.iter().max_by(|a, b| a.residual.total_cmp(&b.residual)).expect("non-empty truncation");
    let failing: Vec<&str> = rows.iter().filter(|r| r.residual > tolerance).map(|r| r.label.as_str()).collect();
    let ratios: Vec<f64> = rows.iter().map(|r| r.residual_coarse / r.residual).collect();
    let (rmin, rmax) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    let ratio_dev = ratios.iter().map(|x| (x - 4.0).abs()).fold(0.0, f64::max);
    let gap = rows.iter().map(|r| r.stencil_gap).fold(0.0, f64::max);
    Ok(vec![
        CheckOutcome::new(
            "eigenrelation_residual",
            worst.residual,
            tolerance,
            format!(
                "worst {} (eigenvalue {}), h={spacing}, R={radius}; {} of {} functions above tolerance{}",
                worst.label,
                worst.eigenvalue,
                failing.len(),
                rows.len(),
                if failing.is_empty() { String::new() } else { format!(": {}", failing.join(" ")) }
            ),
        ),
        CheckOutcome::new(
            "eigenrelation_h2_ratio",
            ratio_dev,
            0.5,
            format!("residual(2h)/residual(h) in [{rmin:.4}, {rmax:.4}]; observed is the largest distance from 4"),
        ),
        CheckOutcome::new(
            "eigenrelation_stencil_agreement",
            gap,
            agreement_tolerance,
            "max |vector-field stencil - oscillator stencil|",
        ),
    ])
}

fn time_grid(basis: &BasisTable64, f: &SpectralField64, policy: TimePolicy) -> CliResult<QuadratureGrid64> {
    let m = match policy {
        TimePolicy::Auto => exact_time_samples(f.max_level().unwrap_or(0)),
        TimePolicy::Explicit(m) => m,
    };
    Ok(basis.grid().with_time_samples(m)?)
}

pub fn identity(
    basis: &BasisTable64,
    truncation: Truncation,
    fields: usize,
    ps: &[f64],
    tolerance: f64,
    policy: TimePolicy,
    seed: u64,
) -> CliResult<Vec<CheckOutcome>> {
    let n = basis.n();
    let (mut rel, mut pointwise, mut chain) = (0.0f64, 0.0f64, 0.0f64);
    let mut worst_p = f64::NAN;
    for i in 0..fields {
        let f: SpectralField64 = random_field(n, truncation, &mut record_stream(seed, stream_id(IDENTITY_STREAM, i)));
        let grid = time_grid(basis, &f, policy)?;
        for r in verify_time_l2_identity_many(&f, ps, basis, &grid)? {
            if r.relative_error > rel {
                rel = r.relative_error;
                worst_p = r.p;
            }
            pointwise = pointwise.max(r.pointwise_error);
        }
        if i < CHAIN_FIELDS {
            for &p in ps.iter().filter(|p| **p >= 2.0) {
                for c in lower_bound_chain(&f, p, &[2.0, 3.0, 6.0], basis, &grid)? {
                    chain = chain.max(c.tl_norm / c.bound);
                }
            }
        }
    }
    let ps_text: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
    Ok(vec![
        CheckOutcome::new(
            "time_l2_identity",
            rel,
            tolerance,
            format!(
                "{fields} random fields, truncation ({}, {}), p in {{{}}}; worst p = {worst_p}",
                truncation.mu_max,
                truncation.nu_max,
                ps_text.join(", ")
            ),
        ),
        CheckOutcome::new("time_l2_identity_pointwise", pointwise, tolerance, "max relative pointwise gap"),
        CheckOutcome::new(
            "holder_lower_bound_chain",
            chain,
            1.0 + 1e-9,
            "max of ||f||_{F^0_{p,2}} / ((2 pi)^{-1/q} ||u||_{L^p(L^q_t)}), q in {2, 3, 6}",
        ),
    ])
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

pub fn norm_consistency(
    basis: &BasisTable64,
    truncation: Truncation,
    fields: usize,
    tolerance: f64,
    seed: u64,
) -> CliResult<Vec<CheckOutcome>> {
    let n = basis.n();
    let grid = basis.grid();
    let inf = f64::INFINITY;
    let slack = 1.0 + 1e-12;
    let (mut l2_gap, mut sob_gap) = (0.0f64, 0.0f64);
    let (mut q_viol, mut r_viol, mut comparisons) = (0usize, 0usize, 0usize);
    for i in 0..fields {
        let f: SpectralField64 = random_field(n, truncation, &mut record_stream(seed, stream_id(NORM_STREAM, i)));
        let levels = level_samples(&f, basis)?;
        let tl = |r: f64, p: f64, q: f64| triebel_lizorkin_from_levels(r, p, q, &levels, grid);

        let f022 = tl(0.0, 2.0, 2.0)?;
        let l2 = grid_lp_norm(&synthesize(&f, basis)?, grid, 2.0)?;
        let w0 = sobolev_norm(0.0, &f);
        l2_gap = l2_gap.max(rel(f022, l2)).max(rel(f022, w0)).max(rel(l2, w0));
        for s in [-0.5, 0.5, 1.0] {
            sob_gap = sob_gap.max(rel(sobolev_norm(s, &f), tl(s, 2.0, 2.0)?));
        }
        for p in [2.0, 4.0, inf] {
            let by_q: Vec<f64> = [1.0, 2.0, 4.0, inf].iter().map(|&q| tl(0.0, p, q)).collect::<Result<_, _>>()?;
            for w in by_q.windows(2) {
                comparisons += 1;
                if w[1] > w[0] * slack {
                    q_viol += 1;
                }
            }
            for r in [-0.5, 0.0, 0.5] {
                comparisons += 1;
                if tl(r, p, 2.0)? > tl(r + 0.5, p, 2.0)? * slack {
                    r_viol += 1;
                }
            }
        }
    }
    let trunc = format!("{fields} random fields, truncation ({}, {})", truncation.mu_max, truncation.nu_max);
    Ok(vec![
        CheckOutcome::new("norm_f022_l2_w0", l2_gap, tolerance, format!("{trunc}; F^0_(2,2) vs grid L2 vs W^(0,L)")),
        CheckOutcome::new("norm_sobolev_tl", sob_gap, tolerance, "W^(s,L) vs F^s_(2,2), s in {-0.5, 0.5, 1}"),
        CheckOutcome::new(
            "embedding_monotonicity",
            (q_viol + r_viol) as f64,
            0.0,
            format!("{comparisons} comparisons: {q_viol} q-violations, {r_viol} r-violations"),
        ),
    ])
}

pub fn wainger(r: f64, q: f64, degrees: &[usize], trials: usize, m: usize, seed: u64) -> CliResult<CheckOutcome> {
    let suite = wainger_suite(degrees, r, q, m, trials, seed ^ WAINGER_SEED_MIX)?;
    let (&(top, top_max), rest) = suite
        .max_ratio
        .split_last()
        .ok_or_else(|| crate::error::CliError::Config("wainger: no degrees with a non-zero field".into()))?;
    // compare against the degree a quarter of the largest when present
    let (base, base_max) = rest.iter().rev().find(|(l, _)| *l * 4 == top).or(rest.first()).copied().unwrap_or((top, top_max));
    let maxima: Vec<String> = suite.max_ratio.iter().map(|(l, x)| format!("L={l}: {x:.6}")).collect();
    Ok(CheckOutcome::new(
        "wainger_stability",
        top_max / base_max,
        2.0,
        format!("max ratio at L={top} over L={base}; r={r}, q={q}, M={m}; {}", maxima.join(", ")),
    ))
}

pub fn kappa_range(n: usize, qs: &[f64]) -> CliResult<Vec<CheckOutcome>> {
    let mut violations = 0usize;
    let mut zero_gap = 0.0f64;
    let mut notes = Vec::new();
    for &q in qs {
        let rep = kappa_range_check(n, q)?;
        if !rep.ok {
            violations += 1;
        }
        if let Some(p) = rep.zero_high {
            zero_gap = zero_gap.max(kappa_pq(n, p, q)?.abs());
        }
        notes.push(format!(
            "q={q}: low [{:.6}, {:.6}], high [{:.6}, {:.6}], zero at p={}",
            rep.low.kappa_min,
            rep.low.kappa_max,
            rep.high.kappa_min,
            rep.high.kappa_max,
            rep.zero_high.map_or("none".to_string(), |p| p.to_string())
        ));
    }
    Ok(vec![
        CheckOutcome::new("kappa_range_bounds", violations as f64, 0.0, notes.join("; ")),
        CheckOutcome::new("kappa_zero_crossing", zero_gap, 1e-12, "|kappa_{p,q}| at 1/q = n(1/2 - 1/p)"),
    ])
}
