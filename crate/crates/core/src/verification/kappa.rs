//! Projection exponent `kappa_p` and Strichartz index `kappa_{p,q}`.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Branch point `p* = (4n + 2) / (2n - 1)` where both formulas agree.
pub fn kappa_threshold<T: Real>(n: usize) -> T {
    let n = T::from_usize_lossy(n);
    (T::lit(4.0) * n + T::lit(2.0)) / (T::lit(2.0) * n - T::one())
}

/// Which formula applies to `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `2 <= p < p*`
    Low,
    /// `p = p*`: both formulas coincide.
    Threshold,
    /// `p* < p <= inf`
    High,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Low => "low",
            Branch::Threshold => "threshold",
            Branch::High => "high",
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("dimension n must be at least 1".into()));
    }
    Ok(())
}

fn check_p<T: Real>(p: T) -> Result<()> {
    if !(p >= T::lit(2.0)) {
        return Err(Error::Domain(format!("exponent p must satisfy 2 <= p <= inf, got {p}")));
    }
    Ok(())
}

fn check_q<T: Real>(q: T) -> Result<()> {
    if !(q >= T::lit(2.0)) || q.is_infinite() {
        return Err(Error::Domain(format!("exponent q must satisfy 2 <= q < inf, got {q}")));
    }
    Ok(())
}

pub fn kappa_branch<T: Real>(n: usize, p: T) -> Result<Branch> {
    check_n(n)?;
    check_p(p)?;
    let t = kappa_threshold::<T>(n);
    Ok(if p < t {
        Branch::Low
    } else if p > t {
        Branch::High
    } else {
        Branch::Threshold
    })
}

/// Both branch formulas of `kappa_p` evaluated at `p`:
/// `(1/2 (1/p - 1/2), n (1/2 - 1/p) - 1/2)`.
pub fn kappa_p_branches<T: Real>(n: usize, p: T) -> (T, T) {
    let half = T::lit(0.5);
    let inv_p = p.recip();
    let low = half * (inv_p - half);
    let high = T::from_usize_lossy(n) * (half - inv_p) - half;
    (low, high)
}

/// Exponent of the spectral projection bound `||P_l f||_p <= C l^{kappa_p} ||f||_2`.
pub fn kappa_p<T: Real>(n: usize, p: T) -> Result<T> {
    let (low, high) = kappa_p_branches(n, p);
    Ok(match kappa_branch(n, p)? {
        Branch::Low | Branch::Threshold => low,
        Branch::High => high,
    })
}

/// `s_q = 1/2 - 1/q`.
pub fn s_q<T: Real>(q: T) -> T {
    T::lit(0.5) - q.recip()
}

/// Strichartz regularity index, from its own closed forms:
/// `1/2 (1/2 + 1/p) - 1/q` below the threshold, `n (1/2 - 1/p) - 1/q` above.
pub fn kappa_pq<T: Real>(n: usize, p: T, q: T) -> Result<T> {
    check_q(q)?;
    let half = T::lit(0.5);
    let (inv_p, inv_q) = (p.recip(), q.recip());
    Ok(match kappa_branch(n, p)? {
        Branch::Low | Branch::Threshold => half * (half + inv_p) - inv_q,
        Branch::High => T::from_usize_lossy(n) * (half - inv_p) - inv_q,
    })
}

/// Observed range of `kappa_{p,q}` over one branch and the bounds it must respect.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchRange<T> {
    pub p_min: T,
    pub p_max: T,
    pub kappa_min: T,
    pub kappa_max: T,
    pub lower_bound: T,
    pub upper_bound: T,
    pub within_bounds: bool,
    /// Sampled `(p, kappa_{p,q})` with `kappa_{p,q} <= 0`.
    pub nonpositive: Vec<(T, T)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KappaRangeReport<T> {
    pub n: usize,
    pub q: T,
    pub low: BranchRange<T>,
    pub high: BranchRange<T>,
    /// `p` solving `1/q = n (1/2 - 1/p)` on the high branch, if it lies there.
    pub zero_high: Option<T>,
    /// `p` solving `1/2 (1/2 + 1/p) = 1/q` on the low branch, if it lies there.
    pub zero_low: Option<T>,
    pub ok: bool,
}

const RANGE_SAMPLES: usize = 257;

/// Samples `p` across both branches and checks
/// `n/(2n+1) - 1/q <= kappa_{p,q} <= 1/2 - 1/q` (low) and
/// `n/(2n+1) - 1/q <= kappa_{p,q} <= n/2 - 1/q` (high).
pub fn kappa_range_check<T: Real>(n: usize, q: T) -> Result<KappaRangeReport<T>> {
    check_n(n)?;
    check_q(q)?;
    let nf = T::from_usize_lossy(n);
    let thr = kappa_threshold::<T>(n);
    let inv_q = q.recip();
    let floor = nf / (T::lit(2.0) * nf + T::one()) - inv_q;
    let tol = T::lit(1e-12);

    let range = |ps: Vec<T>, upper: T| -> Result<BranchRange<T>> {
        let mut out = BranchRange {
            p_min: ps[0],
            p_max: ps[ps.len() - 1],
            kappa_min: T::infinity(),
            kappa_max: T::neg_infinity(),
            lower_bound: floor,
            upper_bound: upper,
            within_bounds: true,
            nonpositive: Vec::new(),
        };
        for p in ps {
            let k = kappa_pq(n, p, q)?;
            out.kappa_min = out.kappa_min.min(k);
            out.kappa_max = out.kappa_max.max(k);
            if k < floor - tol || k > upper + tol {
                out.within_bounds = false;
            }
            if k <= tol {
                out.nonpositive.push((p, k));
            }
        }
        Ok(out)
    };

    let last = T::from_usize_lossy(RANGE_SAMPLES - 1);
    let low_ps: Vec<T> = (0..RANGE_SAMPLES)
        .map(|i| T::lit(2.0) + (thr - T::lit(2.0)) * T::from_usize_lossy(i) / last)
        .collect();
    // uniform in 1/p from 1/p* down to 0 (p = inf)
    let high_ps: Vec<T> = (0..RANGE_SAMPLES)
        .map(|i| {
            let inv = thr.recip() * (T::one() - T::from_usize_lossy(i) / last);
            if inv == T::zero() {
                T::infinity()
            } else {
                inv.recip()
            }
        })
        .collect();
    let low = range(low_ps, T::lit(0.5) - inv_q)?;
    let high = range(high_ps, nf / T::lit(2.0) - inv_q)?;

    let half = T::lit(0.5);
    let zero_high = {
        let d = half - inv_q / nf; // 1/p
        if d < T::zero() || d > thr.recip() * (T::one() + tol) {
            None
        } else if d == T::zero() {
            Some(T::infinity())
        } else {
            Some(d.recip())
        }
    };
    let zero_low = {
        let inv_p = T::lit(2.0) * inv_q - half;
        if inv_p <= T::zero() {
            None
        } else {
            let p = inv_p.recip();
            (p >= T::lit(2.0) && p <= thr * (T::one() + tol)).then_some(p)
        }
    };
    let ok = low.within_bounds && high.within_bounds;
    Ok(KappaRangeReport { n, q, low, high, zero_high, zero_low, ok })
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn spot_values_n1() {
        assert_eq!(kappa_p::<f64>(1, 2.0).unwrap(), 0.0);
        assert!((kappa_p::<f64>(1, 6.0).unwrap() + 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(kappa_p::<f64>(1, INF).unwrap(), 0.0);
        assert_eq!(kappa_pq::<f64>(1, 2.0, 2.0).unwrap(), 0.0);
        assert!((kappa_pq::<f64>(1, 6.0, 2.0).unwrap() + 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(kappa_pq::<f64>(1, INF, 2.0).unwrap(), 0.0);
        assert_eq!(kappa_threshold::<f64>(1), 6.0);
    }

    #[test]
    fn branch_continuity() {
        for n in 1..=3 {
            let t = kappa_threshold::<f64>(n);
            let (a, b) = kappa_p_branches(n, t);
            assert!((a - b).abs() < 1e-14, "n={n}");
            assert_eq!(kappa_branch::<f64>(n, t).unwrap(), Branch::Threshold);
        }
    }

    #[test]
    fn decomposition() {
        for n in 1..=3 {
            for &p in &[2.0, 2.5, kappa_threshold::<f64>(n), 7.0, 10.0, 100.0, INF] {
                for &q in &[2.0, 3.0, 4.0, 10.0, 1e6] {
                    let d = kappa_pq::<f64>(n, p, q).unwrap() - kappa_p::<f64>(n, p).unwrap() - s_q(q);
                    assert!(d.abs() < 1e-14, "n={n} p={p} q={q}");
                }
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(kappa_p::<f64>(1, 1.5).is_err());
        assert!(kappa_pq::<f64>(1, 3.0, 1.0).is_err());
        assert!(kappa_pq::<f64>(1, 3.0, INF).is_err());
        assert!(kappa_p::<f64>(0, 3.0).is_err());
    }

    #[test]
    fn range_n1_q2() {
        let r = kappa_range_check::<f64>(1, 2.0).unwrap();
        assert!(r.ok);
        // first branch in [1/3 - 1/2, 0]
        assert!(r.low.kappa_min >= -1.0 / 6.0 - 1e-12 && r.low.kappa_max <= 1e-12);
        assert!((r.low.lower_bound + 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(r.zero_high, Some(INF));
        assert_eq!(r.zero_low, Some(2.0));
    }

    #[test]
    fn range_n1_q3() {
        assert!((kappa_pq::<f64>(1, 2.0, 3.0).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        let r = kappa_range_check::<f64>(1, 3.0).unwrap();
        assert!(r.ok);
        // zero crossing on the high branch: 1/3 = 1/2 - 1/p
        let p = r.zero_high.unwrap();
        assert!((p - 6.0).abs() < 1e-12);
        assert!(kappa_pq::<f64>(1, p, 3.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn range_higher_dimensions() {
        for n in 1..=4 {
            for &q in &[2.0, 2.2, 3.0, 5.0, 50.0] {
                let r = kappa_range_check::<f64>(n, q).unwrap();
                assert!(r.ok, "n={n} q={q}");
                if let Some(p) = r.zero_high {
                    assert!(kappa_pq::<f64>(n, p, q).unwrap().abs() < 1e-12);
                }
            }
        }
    }
}
