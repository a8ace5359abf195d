//! JSON run configuration.
//!
//! ```json
//! {
//!   "n": 1,
//!   "truncation": { "mu_max": 10, "nu_max": 10 },
//!   "grid": { "radius": 12.0, "spacing": 0.1 },
//!   "quad_order": 200,
//!   "time_samples": "auto",
//!   "seed": 42,
//!   "output_dir": "out",
//!   "experiments": [
//!     { "kind": "projection_sweep", "name": "proj_inf", "p": "inf", "levels": [1, 3, 5], "trials": 20 }
//!   ]
//! }
//! ```
//!
//! Ranges: `1 <= n <= 3`, `mu_max, nu_max <= 64`, `R, h > 0` with `2R/h`
//! integral, `2 (max index + 1) <= quad_order <= 1024`, explicit `M >= 1`,
//! `p >= 2` (`"inf"` allowed), `2 <= q < inf`, `trials <= 100000`.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::CliError;

pub const EXPERIMENT_KINDS: &[&str] = &[
    "projection_sweep",
    "strichartz_sweep",
    "identity",
    "norm_consistency",
    "wainger",
    "eigenrelation",
    "gram",
    "kappa_range",
];

const MAX_N: usize = 3;
const MAX_INDEX: usize = 64;
const MAX_TRIALS: usize = 100_000;

/// Lebesgue exponent; serialized as a number or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(pub f64);

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_infinite() && self.0 > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Exponent;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Exponent, E> {
                Ok(Exponent(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Exponent, E> {
                Ok(Exponent(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Exponent, E> {
                Ok(Exponent(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Exponent, E> {
                parse_exponent(v).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

/// Parses `"inf"`, `"infinity"` or a finite number.
pub fn parse_exponent(v: &str) -> Result<Exponent, String> {
    match v.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "+inf" => Ok(Exponent(f64::INFINITY)),
        other => other.parse::<f64>().map(Exponent).map_err(|_| format!("expected a number or \"inf\", got {v:?}")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationConfig {
    pub mu_max: usize,
    pub nu_max: usize,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        TruncationConfig { mu_max: 10, nu_max: 10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub radius: f64,
    pub spacing: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { radius: 12.0, spacing: 0.1 }
    }
}

/// `"auto"` (`M = 2 l_max + 1` per field) or `{"explicit": M}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeSamples {
    #[default]
    Auto,
    Explicit(usize),
}

/// Sobolev index of a Strichartz sweep: a number, `"kappa"` for `kappa_{p,q}`,
/// or `{"kappa_offset": d}` for `kappa_{p,q} + d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SobolevIndex {
    Value(f64),
    Kappa(KappaTag),
    Offset { kappa_offset: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KappaTag {
    #[serde(rename = "kappa")]
    Kappa,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyConfig {
    RandomTruncated,
    LevelConcentrated(Vec<usize>),
}

fn default_identity_p() -> Vec<Exponent> {
    vec![Exponent(2.0), Exponent(4.0), Exponent(f64::INFINITY)]
}
fn default_fields() -> usize {
    50
}
fn tol_identity() -> f64 {
    1e-5
}
fn tol_gram() -> f64 {
    1e-6
}
fn tol_eigen() -> f64 {
    1e-3
}
fn tol_agree() -> f64 {
    1e-10
}
fn eigen_max_index() -> usize {
    5
}
fn eigen_radius() -> f64 {
    8.0
}
fn eigen_spacing() -> f64 {
    0.05
}
fn wainger_degrees() -> Vec<usize> {
    vec![4, 16, 64]
}
fn wainger_m() -> usize {
    1024
}
fn default_trials() -> usize {
    20
}
fn kappa_qs() -> Vec<f64> {
    vec![2.0, 3.0, 4.0]
}

/// One experiment block; `kind` selects the operation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    ProjectionSweep {
        name: String,
        p: Exponent,
        levels: Vec<usize>,
        #[serde(default = "default_trials")]
        trials: usize,
    },
    StrichartzSweep {
        name: String,
        p: Exponent,
        q: f64,
        s: SobolevIndex,
        family: FamilyConfig,
        #[serde(default = "default_trials")]
        trials: usize,
    },
    Identity {
        #[serde(default = "default_fields")]
        fields: usize,
        #[serde(default)]
        truncation: Option<TruncationConfig>,
        #[serde(default = "default_identity_p")]
        p: Vec<Exponent>,
        #[serde(default = "tol_identity")]
        tolerance: f64,
    },
    NormConsistency {
        #[serde(default = "default_fields")]
        fields: usize,
        #[serde(default)]
        truncation: Option<TruncationConfig>,
        #[serde(default = "tol_identity")]
        tolerance: f64,
    },
    Wainger {
        r: f64,
        q: f64,
        #[serde(default = "wainger_degrees")]
        degrees: Vec<usize>,
        #[serde(default = "default_trials")]
        trials: usize,
        #[serde(default = "wainger_m")]
        time_samples: usize,
    },
    Eigenrelation {
        #[serde(default = "eigen_max_index")]
        max_index: usize,
        #[serde(default = "eigen_radius")]
        radius: f64,
        #[serde(default = "eigen_spacing")]
        spacing: f64,
        #[serde(default = "tol_eigen")]
        tolerance: f64,
        #[serde(default = "tol_agree")]
        agreement_tolerance: f64,
    },
    Gram {
        #[serde(default = "tol_gram")]
        tolerance: f64,
    },
    KappaRange {
        #[serde(default = "kappa_qs")]
        q: Vec<f64>,
    },
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::ProjectionSweep { .. } => "projection_sweep",
            Experiment::StrichartzSweep { .. } => "strichartz_sweep",
            Experiment::Identity { .. } => "identity",
            Experiment::NormConsistency { .. } => "norm_consistency",
            Experiment::Wainger { .. } => "wainger",
            Experiment::Eigenrelation { .. } => "eigenrelation",
            Experiment::Gram { .. } => "gram",
            Experiment::KappaRange { .. } => "kappa_range",
        }
    }

    pub fn is_sweep(&self) -> bool {
        matches!(self, Experiment::ProjectionSweep { .. } | Experiment::StrichartzSweep { .. })
    }
}

fn default_n() -> usize {
    1
}
fn default_quad() -> usize {
    200
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub truncation: TruncationConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default = "default_quad")]
    pub quad_order: usize,
    #[serde(default)]
    pub time_samples: TimeSamples,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
    /// `TWL1` file to load instead of rebuilding the basis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_cache: Option<PathBuf>,
    #[serde(default = "default_experiments")]
    pub experiments: Vec<Experiment>,
}

/// The verification suite run when a config lists no experiments.
pub fn default_experiments() -> Vec<Experiment> {
    vec![
        Experiment::Gram { tolerance: tol_gram() },
        Experiment::Eigenrelation {
            max_index: eigen_max_index(),
            radius: eigen_radius(),
            spacing: eigen_spacing(),
            tolerance: tol_eigen(),
            agreement_tolerance: tol_agree(),
        },
        Experiment::Identity {
            fields: default_fields(),
            truncation: Some(TruncationConfig { mu_max: 8, nu_max: 8 }),
            p: default_identity_p(),
            tolerance: tol_identity(),
        },
        Experiment::NormConsistency {
            fields: default_fields(),
            truncation: Some(TruncationConfig { mu_max: 6, nu_max: 6 }),
            tolerance: tol_identity(),
        },
        Experiment::Wainger {
            r: 1.5,
            q: 4.0,
            degrees: wainger_degrees(),
            trials: default_trials(),
            time_samples: wainger_m(),
        },
        Experiment::KappaRange { q: kappa_qs() },
    ]
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: default_n(),
            truncation: TruncationConfig::default(),
            grid: GridConfig::default(),
            quad_order: default_quad(),
            time_samples: TimeSamples::Auto,
            seed: 0,
            output_dir: default_out(),
            basis_cache: None,
            experiments: default_experiments(),
        }
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn check_p(at: &str, p: Exponent) -> Result<(), CliError> {
    if p.0.is_nan() || p.0 < 2.0 {
        return Err(bad(format!("{at}.p: must satisfy 2 <= p <= inf, got {}", p.0)));
    }
    Ok(())
}

fn check_q(at: &str, q: f64) -> Result<(), CliError> {
    if !(2.0..f64::INFINITY).contains(&q) {
        return Err(bad(format!("{at}.q: must satisfy 2 <= q < inf, got {q}")));
    }
    Ok(())
}

fn check_trials(at: &str, trials: usize) -> Result<(), CliError> {
    if trials > MAX_TRIALS {
        return Err(bad(format!("{at}.trials: at most {MAX_TRIALS}, got {trials}")));
    }
    Ok(())
}

fn check_tol(at: &str, tol: f64) -> Result<(), CliError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(bad(format!("{at}.tolerance: must be positive, got {tol}")));
    }
    Ok(())
}

fn check_sub_truncation(at: &str, sub: Option<TruncationConfig>, full: TruncationConfig) -> Result<(), CliError> {
    if let Some(t) = sub {
        if t.mu_max > full.mu_max || t.nu_max > full.nu_max {
            return Err(bad(format!(
                "{at}.truncation: ({}, {}) exceeds the basis truncation ({}, {})",
                t.mu_max, t.nu_max, full.mu_max, full.nu_max
            )));
        }
    }
    Ok(())
}

fn check_name(at: &str, name: &str, seen: &mut Vec<String>) -> Result<(), CliError> {
    let ok = !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.');
    if !ok || name.starts_with('.') {
        return Err(bad(format!("{at}.name: {name:?} must be non-empty and use only [A-Za-z0-9_.-]")));
    }
    if seen.iter().any(|s| s == name) {
        return Err(bad(format!("{at}.name: duplicate experiment name {name:?}")));
    }
    seen.push(name.to_string());
    Ok(())
}

impl RunConfig {
    /// Parses a JSON document; errors carry the field path and line/column.
    pub fn from_json(text: &str, origin: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let mut msg = format!("{origin}: {inner}");
            if path != "." {
                msg = format!("{origin}: field `{path}`: {inner}");
            }
            if inner.to_string().contains("unknown variant") {
                msg.push_str(&format!("; experiment kinds are: {}", EXPERIMENT_KINDS.join(", ")));
            }
            CliError::Config(msg)
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(1..=MAX_N).contains(&self.n) {
            return Err(bad(format!("n: must be in 1..={MAX_N}, got {}", self.n)));
        }
        let t = self.truncation;
        if t.mu_max > MAX_INDEX || t.nu_max > MAX_INDEX {
            return Err(bad(format!("truncation: indices must be <= {MAX_INDEX}")));
        }
        let g = self.grid;
        if !(g.radius > 0.0 && g.radius.is_finite() && g.spacing > 0.0 && g.spacing.is_finite()) {
            return Err(bad(format!("grid: radius and spacing must be positive, got R={}, h={}", g.radius, g.spacing)));
        }
        let cells = 2.0 * g.radius / g.spacing;
        if (cells - cells.round()).abs() > 1e-9 * cells.max(1.0) {
            return Err(bad(format!("grid: 2R/h must be an integer, got {cells}")));
        }
        let min_q = twisted_core::special_hermite::min_quad_order(self.n * t.mu_max.max(t.nu_max));
        if self.quad_order < min_q || self.quad_order > twisted_core::special_functions::MAX_RULE_ORDER {
            return Err(bad(format!(
                "quad_order: must be in {min_q}..={}, got {}",
                twisted_core::special_functions::MAX_RULE_ORDER,
                self.quad_order
            )));
        }
        if self.time_samples == TimeSamples::Explicit(0) {
            return Err(bad("time_samples.explicit: must be at least 1"));
        }
        let mut names = Vec::new();
        for (i, e) in self.experiments.iter().enumerate() {
            let at = format!("experiments[{i}]");
            match e {
                Experiment::ProjectionSweep { name, p, levels, trials } => {
                    check_name(&at, name, &mut names)?;
                    check_p(&at, *p)?;
                    check_trials(&at, *trials)?;
                    if levels.is_empty() {
                        return Err(bad(format!("{at}.levels: must not be empty")));
                    }
                }
                Experiment::StrichartzSweep { name, p, q, s, family, trials } => {
                    check_name(&at, name, &mut names)?;
                    check_p(&at, *p)?;
                    check_q(&at, *q)?;
                    check_trials(&at, *trials)?;
                    let finite = match s {
                        SobolevIndex::Value(v) | SobolevIndex::Offset { kappa_offset: v } => v.is_finite(),
                        SobolevIndex::Kappa(_) => true,
                    };
                    if !finite {
                        return Err(bad(format!("{at}.s: must be finite")));
                    }
                    if let FamilyConfig::LevelConcentrated(ls) = family {
                        if ls.is_empty() {
                            return Err(bad(format!("{at}.family.level_concentrated: must not be empty")));
                        }
                    }
                }
                Experiment::Identity { fields, truncation, p, tolerance } => {
                    check_sub_truncation(&at, *truncation, t)?;
                    check_tol(&at, *tolerance)?;
                    check_trials(&at, *fields)?;
                    if p.iter().any(|x| x.0.is_nan() || x.0 < 1.0) {
                        return Err(bad(format!("{at}.p: exponents must be >= 1")));
                    }
                }
                Experiment::NormConsistency { fields, truncation, tolerance } => {
                    check_sub_truncation(&at, *truncation, t)?;
                    check_tol(&at, *tolerance)?;
                    check_trials(&at, *fields)?;
                }
                Experiment::Wainger { r, q, degrees, trials, time_samples } => {
                    if !(*r > 1.0 && r <= q && q.is_finite()) {
                        return Err(bad(format!("{at}: need 1 < r <= q < inf, got r={r}, q={q}")));
                    }
                    check_trials(&at, *trials)?;
                    if let Some(&l) = degrees.iter().max() {
                        if *time_samples < 2 * l + 1 {
                            return Err(bad(format!("{at}.time_samples: need at least {} for degree {l}", 2 * l + 1)));
                        }
                    }
                }
                Experiment::Eigenrelation { max_index, radius, spacing, tolerance, agreement_tolerance } => {
                    check_tol(&at, *tolerance)?;
                    check_tol(&at, *agreement_tolerance)?;
                    if *max_index > MAX_INDEX {
                        return Err(bad(format!("{at}.max_index: at most {MAX_INDEX}")));
                    }
                    if !(*radius > 0.0 && *spacing > 0.0) {
                        return Err(bad(format!("{at}: radius and spacing must be positive")));
                    }
                }
                Experiment::Gram { tolerance } => check_tol(&at, *tolerance)?,
                Experiment::KappaRange { q } => {
                    for &x in q {
                        check_q(&at, x)?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let cfg = RunConfig::default();
        let back = RunConfig::from_json(&cfg.to_json(), "mem").unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn full_round_trip() {
        let text = r#"{
          "n": 1, "truncation": {"mu_max": 4, "nu_max": 4}, "grid": {"radius": 8, "spacing": 0.1},
          "quad_order": 64, "time_samples": {"explicit": 21}, "seed": 18446744073709551615,
          "output_dir": "o", "basis_cache": "b.twl",
          "experiments": [
            {"kind": "projection_sweep", "name": "a", "p": "inf", "levels": [1, 3], "trials": 2},
            {"kind": "strichartz_sweep", "name": "b", "p": 6, "q": 2, "s": "kappa",
             "family": {"level_concentrated": [1, 3]}, "trials": 1},
            {"kind": "strichartz_sweep", "name": "c", "p": 0.1e2, "q": 3.5, "s": {"kappa_offset": -0.5},
             "family": "random_truncated"},
            {"kind": "strichartz_sweep", "name": "d", "p": 2, "q": 2, "s": 0.25, "family": "random_truncated"},
            {"kind": "gram"}
          ]
        }"#;
        let cfg = RunConfig::from_json(text, "mem").unwrap();
        assert_eq!(cfg.seed, u64::MAX);
        assert_eq!(cfg.time_samples, TimeSamples::Explicit(21));
        let back = RunConfig::from_json(&cfg.to_json(), "mem").unwrap();
        assert_eq!(back, cfg);
        match &cfg.experiments[1] {
            Experiment::StrichartzSweep { s, .. } => assert_eq!(*s, SobolevIndex::Kappa(KappaTag::Kappa)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_kind_lists_vocabulary() {
        let err = RunConfig::from_json(r#"{"experiments": [{"kind": "nope"}]}"#, "mem").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("projection_sweep") && msg.contains("kappa_range"), "{msg}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn diagnostics_name_field_and_line() {
        let err = RunConfig::from_json("{\n  \"grid\": {\"radius\": \"x\", \"spacing\": 0.1}\n}", "cfg.json").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("grid.radius") && msg.contains("line 2"), "{msg}");
        let err = RunConfig::from_json(r#"{"bogus": 1}"#, "mem").unwrap_err();
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn range_validation() {
        for text in [
            r#"{"n": 0}"#,
            r#"{"grid": {"radius": 1.0, "spacing": 0.3}}"#,
            r#"{"quad_order": 10}"#,
            r#"{"time_samples": {"explicit": 0}}"#,
            r#"{"experiments": [{"kind": "projection_sweep", "name": "x", "p": 1.5, "levels": [1]}]}"#,
            r#"{"experiments": [{"kind": "strichartz_sweep", "name": "x", "p": 2, "q": "inf", "s": 0, "family": "random_truncated"}]}"#,
            r#"{"experiments": [{"kind": "projection_sweep", "name": "../x", "p": 2, "levels": [1]}]}"#,
            r#"{"experiments": [{"kind": "identity", "truncation": {"mu_max": 11, "nu_max": 1}}]}"#,
        ] {
            assert!(RunConfig::from_json(text, "mem").is_err(), "{text}");
        }
    }

    #[test]
    fn exponent_parsing() {
        assert_eq!(parse_exponent("inf").unwrap().0, f64::INFINITY);
        assert_eq!(parse_exponent(" 6 ").unwrap().0, 6.0);
        assert!(parse_exponent("six").is_err());
    }
}
