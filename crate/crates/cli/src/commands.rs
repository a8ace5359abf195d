//! Subcommand implementations. Each returns data and writes its artifacts;
//! `main` maps results to exit codes.

use std::path::{Path, PathBuf};

use twisted_core::io::{read_samples, write_basis_cache, write_samples, SampleFile};
use twisted_core::spectral_ops::propagate;
use twisted_core::verification::{
    kappa_branch, kappa_p, kappa_pq, kappa_threshold, projection_norm_sweep, s_q, strichartz_sweep, ExponentFit,
    Family, StrichartzSpec,
};
use twisted_core::{analyze, synthesize, SweepRecord64};

use crate::checks::{self, CheckOutcome};
use crate::config::{Experiment, FamilyConfig, RunConfig, SobolevIndex};
use crate::context;
use crate::error::{CliError, CliResult};
use crate::output::{ensure_dir, fit_json, fmt_float, sweep_csv, write_text, KAPPA_HEADER};

/// A `p` entry of the kappa table: a value or the branch point of each `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TableP {
    Value(f64),
    Threshold,
}

impl std::str::FromStr for TableP {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "threshold" | "p*" => Ok(TableP::Threshold),
            other => crate::config::parse_exponent(other).map(|e| TableP::Value(e.0)),
        }
    }
}

pub fn kappa_table(ns: &[usize], ps: &[TableP], qs: &[f64]) -> CliResult<String> {
    let mut out = String::from(KAPPA_HEADER);
    out.push('\n');
    for &n in ns {
        for &tp in ps {
            let p = match tp {
                TableP::Value(p) => p,
                TableP::Threshold => {
                    if n == 0 {
                        return Err(CliError::Usage("n must be at least 1".into()));
                    }
                    kappa_threshold::<f64>(n)
                }
            };
            for &q in qs {
                let row = |e: twisted_core::Error| CliError::Usage(format!("row n={n}, p={p}, q={q}: {e}"));
                let branch = kappa_branch(n, p).map_err(row)?;
                let kp = kappa_p(n, p).map_err(row)?;
                let kpq = kappa_pq(n, p, q).map_err(row)?;
                out.push_str(&format!(
                    "{n},{},{},{},{},{},{}\n",
                    fmt_float(p),
                    fmt_float(q),
                    branch.as_str(),
                    fmt_float(kp),
                    fmt_float(s_q(q)),
                    fmt_float(kpq)
                ));
            }
        }
    }
    Ok(out)
}

pub const VERIFY_REPORT: &str = "verify_report.json";

/// Runs every check block of the config and writes `verify_report.json`.
pub fn verify(cfg: &RunConfig, out: &Path) -> CliResult<Vec<CheckOutcome>> {
    let checks_only: Vec<&Experiment> = cfg.experiments.iter().filter(|e| !e.is_sweep()).collect();
    let basis = context::basis(cfg)?;
    let policy = context::time_policy(cfg);
    let mut outcomes = Vec::new();
    for exp in checks_only {
        outcomes.extend(checks::run(exp, &basis, policy, cfg.seed)?);
    }
    ensure_dir(out)?;
    let json = serde_json::to_string_pretty(&outcomes).expect("report serializes");
    write_text(&out.join(VERIFY_REPORT), &(json + "\n"))?;
    Ok(outcomes)
}

/// Files and summary of one sweep block.
#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub name: String,
    pub csv: PathBuf,
    pub fit_file: PathBuf,
    pub records: Vec<SweepRecord64>,
    pub fit: Option<ExponentFit<f64>>,
    /// Band of per-level maxima (normalized by `l^{kappa_p}` for projections).
    pub band: f64,
    pub notices: Vec<String>,
}

fn resolve_s(n: usize, p: f64, q: f64, s: SobolevIndex) -> CliResult<f64> {
    Ok(match s {
        SobolevIndex::Value(v) => v,
        SobolevIndex::Kappa(_) => kappa_pq(n, p, q)?,
        SobolevIndex::Offset { kappa_offset } => kappa_pq(n, p, q)? + kappa_offset,
    })
}

/// Runs every sweep block: `<name>.csv` plus `<name>.fit.json` in `out`.
pub fn sweep(cfg: &RunConfig, out: &Path) -> CliResult<Vec<SweepOutput>> {
    let sweeps: Vec<&Experiment> = cfg.experiments.iter().filter(|e| e.is_sweep()).collect();
    if sweeps.is_empty() {
        return Err(CliError::Config("config lists no projection_sweep or strichartz_sweep experiments".into()));
    }
    let basis = context::basis(cfg)?;
    ensure_dir(out)?;
    let mut outputs = Vec::new();
    for exp in sweeps {
        let (name, records, fit, band, notices) = match exp {
            Experiment::ProjectionSweep { name, p, levels, trials } => {
                let sw = projection_norm_sweep(cfg.n, p.0, levels, *trials, &basis, cfg.seed)?;
                let band = sw.normalized_band();
                (name, sw.records, sw.fit, band, sw.notices)
            }
            Experiment::StrichartzSweep { name, p, q, s, family, trials } => {
                let spec = StrichartzSpec {
                    p: p.0,
                    q: *q,
                    s: resolve_s(cfg.n, p.0, *q, *s)?,
                    family: match family {
                        FamilyConfig::RandomTruncated => Family::RandomTruncated,
                        FamilyConfig::LevelConcentrated(ls) => Family::LevelConcentrated(ls.clone()),
                    },
                    trials: *trials,
                    time_policy: context::time_policy(cfg),
                };
                let sw = strichartz_sweep(cfg.n, &spec, &basis, cfg.seed)?;
                (name, sw.records, sw.fit, sw.band, sw.notices)
            }
            _ => unreachable!("filtered to sweeps"),
        };
        let csv = out.join(format!("{name}.csv"));
        let fit_file = out.join(format!("{name}.fit.json"));
        write_text(&csv, &sweep_csv(&records))?;
        write_text(&fit_file, &fit_json(fit.as_ref()))?;
        outputs.push(SweepOutput { name: name.clone(), csv, fit_file, records, fit, band, notices });
    }
    Ok(outputs)
}

/// Parses a time such as `1.5`, `pi`, `2pi`, `-0.5pi` or `2*pi`.
pub fn parse_time(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let v = match t.strip_suffix("pi") {
        Some(head) => {
            let head = head.trim().trim_end_matches('*').trim();
            let k = match head {
                "" | "+" => 1.0,
                "-" => -1.0,
                h => h.parse::<f64>().map_err(|_| format!("invalid time {s:?}"))?,
            };
            k * std::f64::consts::PI
        }
        None => t.parse::<f64>().map_err(|_| format!("invalid time {s:?}"))?,
    };
    if !v.is_finite() {
        return Err(format!("time must be finite, got {s:?}"));
    }
    Ok(v)
}

/// Reads `TWF1` samples, applies `e^{-itL}` in the truncated basis and writes
/// the result on the same grid.
pub fn propagate_file(cfg: &RunConfig, t: f64, input: &Path, output: &Path) -> CliResult<()> {
    let grid = context::grid(cfg)?;
    let file: SampleFile<f64> = read_samples(input)?;
    file.check_grid(&grid)?;
    let basis = context::basis(cfg)?;
    let f = analyze(&file.samples, &basis)?;
    let u = synthesize(&propagate(t, &f), &basis)?;
    if let Some(dir) = output.parent().filter(|d| !d.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    write_samples(output, &SampleFile::for_grid(basis.grid(), u)?)?;
    Ok(())
}

pub fn basis_cache(cfg: &RunConfig, output: &Path) -> CliResult<()> {
    let basis = context::basis(cfg)?;
    if let Some(dir) = output.parent().filter(|d| !d.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    write_basis_cache(output, &basis)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_rows() {
        let csv = kappa_table(&[1], &[TableP::Value(6.0), TableP::Value(2.0)], &[2.0]).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,p,q,branch,kappa_p,s_q,kappa_pq");
        let cells: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(&cells[..4], &["1", "6.0000000000000000e0", "2.0000000000000000e0", "threshold"]);
        for k in [4, 6] {
            assert!((cells[k].parse::<f64>().unwrap() + 1.0 / 6.0).abs() < 1e-14, "{}", cells[k]);
            assert_eq!(cells[k].len(), "-1.6666666666666666e-1".len());
        }
        assert!(lines[2].ends_with(",0.0000000000000000e0"));
        let err = kappa_table(&[1], &[TableP::Value(1.0)], &[2.0]).unwrap_err();
        assert!(err.to_string().contains("row n=1, p=1, q=2"));
    }

    #[test]
    fn time_parsing() {
        let pi = std::f64::consts::PI;
        assert_eq!(parse_time("2pi").unwrap(), 2.0 * pi);
        assert_eq!(parse_time("pi").unwrap(), pi);
        assert_eq!(parse_time("-0.5*pi").unwrap(), -0.5 * pi);
        assert_eq!(parse_time("0").unwrap(), 0.0);
        assert!(parse_time("x").is_err());
    }
}
