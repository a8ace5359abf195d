//! Grid and basis construction from a [`RunConfig`].

use std::path::Path;

use twisted_core::io::read_basis_cache;
use twisted_core::verification::TimePolicy;
use twisted_core::{build_basis, BasisTable64, QuadratureGrid64, Truncation};

use crate::config::{RunConfig, TimeSamples};
use crate::error::{CliError, CliResult};

pub fn truncation(cfg: &RunConfig) -> Truncation {
    Truncation::new(cfg.truncation.mu_max, cfg.truncation.nu_max)
}

pub fn time_policy(cfg: &RunConfig) -> TimePolicy {
    match cfg.time_samples {
        TimeSamples::Auto => TimePolicy::Auto,
        TimeSamples::Explicit(m) => TimePolicy::Explicit(m),
    }
}

/// Spatial grid of the config. The time grid is `M` when explicit and a
/// placeholder of one sample under `auto` (each operation picks its own).
pub fn grid(cfg: &RunConfig) -> CliResult<QuadratureGrid64> {
    let m = match cfg.time_samples {
        TimeSamples::Auto => 1,
        TimeSamples::Explicit(m) => m,
    };
    Ok(QuadratureGrid64::new(cfg.n, cfg.grid.radius, cfg.grid.spacing, m)?)
}

/// Loads `basis_cache` when set and present, otherwise builds the basis.
pub fn basis(cfg: &RunConfig) -> CliResult<BasisTable64> {
    let grid = grid(cfg)?;
    if let Some(path) = cfg.basis_cache.as_deref().filter(|p| p.exists()) {
        return load_cached(cfg, path, &grid);
    }
    let b = build_basis(cfg.n, truncation(cfg), &grid, cfg.quad_order)?;
    for w in b.warnings() {
        eprintln!("warning: {w}");
    }
    Ok(b)
}

fn load_cached(cfg: &RunConfig, path: &Path, grid: &QuadratureGrid64) -> CliResult<BasisTable64> {
    let b: BasisTable64 = read_basis_cache(path)?;
    let g = b.grid();
    if b.n() != cfg.n
        || b.truncation() != truncation(cfg)
        || b.quad_order() != cfg.quad_order
        || g.radius() != grid.radius()
        || g.spacing() != grid.spacing()
    {
        return Err(CliError::Config(format!(
            "basis cache {} was built for a different n, truncation, grid or quad_order",
            path.display()
        )));
    }
    Ok(b)
}
