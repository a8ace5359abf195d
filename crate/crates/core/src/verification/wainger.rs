//! Spot check of the periodic fractional integration (Wainger) inequality
//! `|| sum_{l != 0} |l|^{-alpha} F(l) e^{-i l t} ||_{L^q} <= C ||F||_{L^r}`,
//! `alpha = 1/r - 1/q`, for frequencies `l = 1..L`.

use std::collections::BTreeMap;

use num_complex::Complex;
use rayon::prelude::*;

use super::rng::{complex_gaussian, record_stream, stream_id};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral_ops::neumaier_sum;

#[derive(Debug, Clone, PartialEq)]
pub struct WaingerReport<T> {
    pub r: T,
    pub q: T,
    pub alpha: T,
    pub lhs: T,
    pub rhs: T,
    /// `lhs / rhs`; `None` when `F = 0`.
    pub ratio: Option<T>,
    pub time_samples: usize,
}

/// Maximum ratio for each trigonometric degree `L` of a random suite.
#[derive(Debug, Clone, PartialEq)]
pub struct WaingerSuite<T> {
    pub r: T,
    pub q: T,
    pub max_ratio: Vec<(usize, T)>,
    /// `max ratio at L=64 <= 2 * max ratio at L=16`, when both degrees ran.
    pub stable: Option<bool>,
}

fn rect_lp<T: Real>(values: &[Complex<T>], p: T) -> T {
    let w = (T::PI() + T::PI()) / T::from_usize_lossy(values.len());
    (w * neumaier_sum(values.iter().map(|v| v.norm().powf(p)))).powf(p.recip())
}

/// Evaluates both sides on `M` equispaced times. `coeffs[j]` is `F(j + 1)`.
/// Requires `1 < r <= q < inf` and `M >= 2L + 1`.
pub fn verify_wainger<T: Real>(coeffs: &[Complex<T>], r: T, q: T, time_samples: usize) -> Result<WaingerReport<T>> {
    if !(r > T::one()) || !(q >= r) || q.is_infinite() {
        return Err(Error::Domain(format!("Wainger check needs 1 < r <= q < inf, got r={r}, q={q}")));
    }
    let l = coeffs.len();
    if time_samples < 2 * l + 1 {
        return Err(Error::Domain(format!(
            "{time_samples} time samples cannot resolve degree {l}; need at least {}",
            2 * l + 1
        )));
    }
    let alpha = r.recip() - q.recip();
    let m = T::from_usize_lossy(time_samples);
    let two_pi = T::PI() + T::PI();
    let mut f = Vec::with_capacity(time_samples);
    let mut g = Vec::with_capacity(time_samples);
    for j in 0..time_samples {
        let (mut a, mut b) = (Complex::new(T::zero(), T::zero()), Complex::new(T::zero(), T::zero()));
        for (k, c) in coeffs.iter().enumerate() {
            let ell = k + 1;
            // reduce l*j mod M before scaling to keep the phase accurate
            let arg = two_pi * T::from_usize_lossy((ell * j) % time_samples) / m;
            let e = Complex::new(arg.cos(), -arg.sin());
            a += *c * e;
            b += *c * e * T::from_usize_lossy(ell).powf(-alpha);
        }
        f.push(a);
        g.push(b);
    }
    let lhs = rect_lp(&g, q);
    let rhs = rect_lp(&f, r);
    let ratio = (rhs > T::zero()).then(|| lhs / rhs);
    Ok(WaingerReport { r, q, alpha, lhs, rhs, ratio, time_samples })
}

/// Random complex Gaussian coefficients for each degree in `degrees`,
/// `trials` draws each, on `M` time samples shared by every degree.
pub fn wainger_suite<T: Real>(
    degrees: &[usize],
    r: T,
    q: T,
    time_samples: usize,
    trials: usize,
    seed: u64,
) -> Result<WaingerSuite<T>> {
    let jobs: Vec<(usize, usize)> = degrees.iter().flat_map(|&l| (0..trials).map(move |t| (l, t))).collect();
    let ratios: Vec<(usize, Option<T>)> = jobs
        .par_iter()
        .map(|&(l, t)| {
            let mut rng = record_stream(seed, stream_id(l, t));
            let coeffs: Vec<Complex<T>> = (0..l).map(|_| complex_gaussian(&mut rng)).collect();
            Ok((l, verify_wainger(&coeffs, r, q, time_samples)?.ratio))
        })
        .collect::<Result<_>>()?;
    let mut best: BTreeMap<usize, T> = BTreeMap::new();
    for (l, ratio) in ratios {
        if let Some(x) = ratio {
            let e = best.entry(l).or_insert(x);
            *e = e.max(x);
        }
    }
    let stable = match (best.get(&16), best.get(&64)) {
        (Some(&a), Some(&b)) => Some(b <= T::lit(2.0) * a),
        _ => None,
    };
    Ok(WaingerSuite { r, q, max_ratio: best.into_iter().collect(), stable })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_mode() {
        for l0 in [1usize, 3, 7] {
            let mut c = vec![Complex::new(0.0, 0.0); 8];
            c[l0 - 1] = Complex::new(1.0, 0.0);
            let rep = verify_wainger(&c, 1.5, 4.0, 64).unwrap();
            let alpha = 1.0 / 1.5 - 0.25;
            let lhs = (l0 as f64).powf(-alpha) * (2.0 * PI).powf(0.25);
            let rhs = (2.0 * PI).powf(1.0 / 1.5);
            assert!((rep.lhs - lhs).abs() < 1e-12 * lhs);
            assert!((rep.rhs - rhs).abs() < 1e-12 * rhs);
        }
    }

    #[test]
    fn zero_field() {
        let rep = verify_wainger(&[Complex::new(0.0, 0.0); 4], 2.0, 3.0, 16).unwrap();
        assert_eq!(rep.lhs, 0.0);
        assert_eq!(rep.rhs, 0.0);
        assert!(rep.ratio.is_none());
    }

    #[test]
    fn domain() {
        let c = [Complex::new(1.0, 0.0)];
        assert!(verify_wainger(&c, 1.0, 2.0, 16).is_err());
        assert!(verify_wainger(&c, 3.0, 2.0, 16).is_err());
        assert!(verify_wainger(&c, 2.0, f64::INFINITY, 16).is_err());
        assert!(verify_wainger(&[Complex::new(1.0, 0.0); 8], 2.0, 3.0, 16).is_err());
    }

    #[test]
    fn random_suite_is_stable() {
        let s = wainger_suite::<f64>(&[4, 16, 64], 1.5, 4.0, 1024, 10, 42).unwrap();
        assert_eq!(s.max_ratio.len(), 3);
        assert_eq!(s.stable, Some(true), "{:?}", s.max_ratio);
    }
}
