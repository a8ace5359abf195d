//! CSV and JSON emission. Floats use 17 significant digits, lines end in `\n`.

use std::fmt::Write as _;
use std::path::Path;

use twisted_core::verification::ExponentFit;
use twisted_core::SweepRecord64;

use crate::error::{CliError, CliResult};

pub const SWEEP_HEADER: &str = "n,p,q,s,ell,trial,seed,numerator,denominator,ratio";
pub const KAPPA_HEADER: &str = "n,p,q,branch,kappa_p,s_q,kappa_pq";

/// `1.2345678901234567e-3`; infinities print as `inf` / `-inf`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

/// Projection records leave `q` and `s` empty.
pub fn sweep_csv(records: &[SweepRecord64]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.n,
            fmt_float(r.p),
            fmt_opt(r.q),
            fmt_opt(r.s),
            r.ell,
            r.trial,
            r.seed,
            fmt_float(r.numerator),
            fmt_float(r.denominator),
            fmt_float(r.ratio)
        );
    }
    out
}

fn json_number(x: f64) -> String {
    if x.is_finite() {
        fmt_float(x)
    } else {
        "null".into()
    }
}

/// `{"slope": .., "intercept": .., "residual_rms": ..}`; nulls when no fit exists.
pub fn fit_json(fit: Option<&ExponentFit<f64>>) -> String {
    match fit {
        Some(f) => format!(
            "{{\"slope\": {}, \"intercept\": {}, \"residual_rms\": {}}}\n",
            json_number(f.slope),
            json_number(f.intercept),
            json_number(f.residual_rms)
        ),
        None => "{\"slope\": null, \"intercept\": null, \"residual_rms\": null}\n".into(),
    }
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(format!("cannot write {}", path.display()), e))
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(format!("cannot create {}", dir.display()), e))
}
