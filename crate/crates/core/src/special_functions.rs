//! One-dimensional Hermite functions, Gauss-Hermite rules and multi-index
//! enumeration.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest Gauss-Hermite order accepted by [`gauss_hermite_rule`].
pub const MAX_RULE_ORDER: usize = 1024;

/// Element of `N_0^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Self {
        MultiIndex(entries)
    }

    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|nu| = sum of entries`.
    pub fn order(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn max_entry(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(v: Vec<usize>) -> Self {
        MultiIndex(v)
    }
}

impl<const N: usize> From<[usize; N]> for MultiIndex {
    fn from(v: [usize; N]) -> Self {
        MultiIndex(v.to_vec())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// All `nu` with `2|nu| + n = level`, in lexicographic order.
///
/// Empty when `level < n` or `level - n` is odd: such a level is not in the
/// spectrum.
pub fn enumerate_level(n: usize, level: usize) -> Vec<MultiIndex> {
    if n == 0 || level < n || (level - n) % 2 == 1 {
        return Vec::new();
    }
    let order = (level - n) / 2;
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    compositions(n, order, &mut current, &mut out);
    out
}

fn compositions(slots: usize, remaining: usize, current: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
    if slots == 1 {
        current.push(remaining);
        out.push(MultiIndex(current.clone()));
        current.pop();
        return;
    }
    for first in 0..=remaining {
        current.push(first);
        compositions(slots - 1, remaining - first, current, out);
        current.pop();
    }
}

/// Every multi-index of length `n` with all entries `<= cap`, lexicographic.
pub fn box_indices(n: usize, cap: usize) -> Vec<MultiIndex> {
    let side = cap + 1;
    let total = side.pow(n as u32);
    (0..total)
        .map(|mut k| {
            let mut e = vec![0; n];
            for slot in (0..n).rev() {
                e[slot] = k % side;
                k /= side;
            }
            MultiIndex(e)
        })
        .collect()
}

/// Runs the normalized three-term recurrence up to `k_max` while keeping the
/// mantissas bounded. `visit(k, mantissa, log_scale)` receives
/// `phi_k(x) = mantissa * exp(log_scale)`.
fn hermite_recurrence<T: Real>(k_max: usize, x: T, mut visit: impl FnMut(usize, T, T)) {
    let two = T::lit(2.0);
    let big = T::max_value().sqrt().sqrt();
    let ln_big = big.ln();
    let mut log_scale = -x * x / two;
    let mut prev = T::zero();
    let mut cur = T::PI().powf(T::lit(-0.25));
    visit(0, cur, log_scale);
    for k in 0..k_max {
        let kf = T::from_usize_lossy(k);
        let k1 = kf + T::one();
        let next = x * (two / k1).sqrt() * cur - (kf / k1).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > big {
            cur /= big;
            prev /= big;
            log_scale += ln_big;
        }
        visit(k + 1, cur, log_scale);
    }
}

/// `[phi_0(x), ..., phi_{k_max}(x)]` for the normalized Hermite functions
/// `phi_k(x) = (2^k k! sqrt(pi))^{-1/2} H_k(x) exp(-x^2/2)`.
///
/// Evaluated by the recurrence on `phi_k` itself, so nothing overflows even
/// where `H_k` alone would.
pub fn hermite_function_values<T: Real>(k_max: usize, x: T) -> Result<Vec<T>> {
    if !x.is_finite() {
        return Err(Error::InvalidInput(format!("hermite argument must be finite, got {x}")));
    }
    let mut out = Vec::with_capacity(k_max + 1);
    hermite_recurrence(k_max, x, |_, m, s| out.push(m * s.exp()));
    Ok(out)
}

/// Writes `phi_0(x)..phi_{k_max}(x)` into `out` (length `k_max + 1`) without
/// validation. Used in hot loops where `x` is known to be finite.
#[inline]
pub(crate) fn hermite_values_into<T: Real>(x: T, out: &mut [T]) {
    let k_max = out.len().saturating_sub(1);
    hermite_recurrence(k_max, x, |k, m, s| out[k] = m * s.exp());
}

/// Gauss-Hermite rule for the weight `exp(-x^2)` on the real line.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermiteRule<T> {
    order: usize,
    nodes: Vec<T>,
    weights: Vec<T>,
    scaled_weights: Vec<T>,
}

impl<T: Real> GaussHermiteRule<T> {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Ascending nodes, symmetric about zero.
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// Weights for `exp(-x^2)`. Outer weights of high order rules underflow to
    /// zero in floating point; use [`Self::scaled_weights`] in that regime.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `w_i * exp(x_i^2)`, the weights for integrating `g` directly
    /// (`int g ~ sum scaled_w_i g(x_i)`). Always representable.
    pub fn scaled_weights(&self) -> &[T] {
        &self.scaled_weights
    }

    /// `sum w_i f(x_i)`, approximating `int f(x) exp(-x^2) dx`.
    pub fn integrate(&self, f: impl Fn(T) -> T) -> T {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Builds the `m`-point Gauss-Hermite rule.
///
/// Nodes are the eigenvalues of the Jacobi matrix of the Hermite recurrence,
/// polished by Newton steps on `phi_m`. Weights use
/// `w_i exp(x_i^2) = 1 / (m phi_{m-1}(x_i)^2)`, evaluated with the scaled
/// recurrence so that neither factor overflows.
pub fn gauss_hermite_rule<T: Real>(m: usize) -> Result<GaussHermiteRule<T>> {
    if m == 0 || m > MAX_RULE_ORDER {
        return Err(Error::InvalidInput(format!(
            "Gauss-Hermite order must lie in 1..={MAX_RULE_ORDER}, got {m}"
        )));
    }
    let diag = vec![T::zero(); m];
    let off: Vec<T> = (1..m).map(|k| (T::from_usize_lossy(k) / T::lit(2.0)).sqrt()).collect();
    let mut nodes = symmetric_tridiagonal_eigenvalues(&diag, &off)?;
    nodes.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));

    let mf = T::from_usize_lossy(m);
    let sqrt_2m = (T::lit(2.0) * mf).sqrt();
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (prev, cur, _) = tail_pair(m, *x);
            let deriv = sqrt_2m * prev - *x * cur;
            if deriv == T::zero() {
                break;
            }
            *x -= cur / deriv;
        }
    }
    // exact symmetry
    for i in 0..m / 2 {
        let j = m - 1 - i;
        let a = (nodes[j] - nodes[i]) / T::lit(2.0);
        nodes[i] = -a;
        nodes[j] = a;
    }
    if m % 2 == 1 {
        nodes[m / 2] = T::zero();
    }

    let mut weights = Vec::with_capacity(m);
    let mut scaled_weights = Vec::with_capacity(m);
    for &x in &nodes {
        let (prev, _, log_scale) = tail_pair(m, x);
        let ln_scaled = -mf.ln() - T::lit(2.0) * (prev.abs().ln() + log_scale);
        scaled_weights.push(ln_scaled.exp());
        weights.push((ln_scaled - x * x).exp());
    }
    Ok(GaussHermiteRule { order: m, nodes, weights, scaled_weights })
}

/// `(phi_{m-1}, phi_m)` as mantissas sharing `exp(log_scale)`.
fn tail_pair<T: Real>(m: usize, x: T) -> (T, T, T) {
    let mut prev = T::zero();
    let mut cur = T::zero();
    let mut scale = T::zero();
    let mut last_scale = T::zero();
    hermite_recurrence(m, x, |k, v, s| {
        if k + 1 == m {
            prev = v;
            last_scale = s;
        }
        if k == m {
            cur = v;
            scale = s;
        }
    });
    // keep both mantissas on the final scale
    if scale != last_scale {
        prev *= (last_scale - scale).exp();
    }
    (prev, cur, scale)
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (`off[i]` couples rows `i` and `i + 1`), by implicit QL
/// with Wilkinson shifts.
pub fn symmetric_tridiagonal_eigenvalues<T: Real>(diag: &[T], off: &[T]) -> Result<Vec<T>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if off.len() + 1 != n {
        return Err(Error::InvalidInput(format!(
            "off-diagonal length {} does not match diagonal length {n}",
            off.len()
        )));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(T::zero());
    let two = T::lit(2.0);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::InvalidInput("tridiagonal QL iteration did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    // Independent oracle: physicists' Hermite polynomial by its own recurrence
    // followed by the closed normalization, fine for small k.
    fn phi_closed(k: usize, x: f64) -> f64 {
        let mut h0 = 1.0;
        let mut h1 = 2.0 * x;
        let h = match k {
            0 => h0,
            1 => h1,
            _ => {
                for j in 1..k {
                    let h2 = 2.0 * x * h1 - 2.0 * j as f64 * h0;
                    h0 = h1;
                    h1 = h2;
                }
                h1
            }
        };
        let fact: f64 = (1..=k).map(|j| j as f64).product();
        h * (-x * x / 2.0).exp() / (2f64.powi(k as i32) * fact * std::f64::consts::PI.sqrt()).sqrt()
    }

    #[test]
    fn hermite_examples() {
        let v = hermite_function_values(0, 0.0f64).unwrap();
        assert_abs_diff_eq!(v[0], 0.751_125_544_464_942_5, epsilon = 1e-15);
        let v = hermite_function_values(2, 0.0f64).unwrap();
        assert_eq!(v[1], 0.0);
        let expected = -1.0 / (2f64.sqrt() * std::f64::consts::PI.powf(0.25));
        assert_abs_diff_eq!(v[2], expected, epsilon = 1e-15);
        assert_abs_diff_eq!(v[2], -0.531_125_9, epsilon = 1e-7);
    }

    #[test]
    fn hermite_matches_closed_form() {
        for &x in &[-3.2, -0.7, 0.0, 0.4, 1.9, 5.5] {
            let v = hermite_function_values(15, x).unwrap();
            for (k, &val) in v.iter().enumerate() {
                assert_abs_diff_eq!(val, phi_closed(k, x), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn hermite_rejects_non_finite() {
        assert!(matches!(hermite_function_values(3, f64::NAN), Err(Error::InvalidInput(_))));
        assert!(hermite_function_values(3, f64::INFINITY).is_err());
    }

    #[test]
    fn hermite_bounded_up_to_order_200() {
        let mut x: f64 = -20.0;
        while x <= 20.0 {
            let v = hermite_function_values(200, x).unwrap();
            for val in v {
                assert!(val.is_finite() && val.abs() <= 1.0 + 1e-9, "x={x} val={val}");
            }
            x += 0.037;
        }
    }

    #[test]
    fn hermite_f32_agrees_with_f64() {
        for &x in &[-2.0f32, 0.3, 4.0, 14.0] {
            let a = hermite_function_values(30, x).unwrap();
            let b = hermite_function_values(30, x as f64).unwrap();
            for (p, q) in a.iter().zip(&b) {
                assert!((*p as f64 - q).abs() < 1e-5, "{p} vs {q}");
            }
        }
    }

    #[test]
    fn rule_small_orders() {
        let r = gauss_hermite_rule::<f64>(1).unwrap();
        assert_eq!(r.nodes(), &[0.0]);
        assert_abs_diff_eq!(r.weights()[0], std::f64::consts::PI.sqrt(), epsilon = 1e-14);

        let r = gauss_hermite_rule::<f64>(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(r.nodes()[0], -h, epsilon = 1e-15);
        assert_abs_diff_eq!(r.nodes()[1], h, epsilon = 1e-15);
        for w in r.weights() {
            assert_abs_diff_eq!(*w, std::f64::consts::PI.sqrt() / 2.0, epsilon = 1e-14);
        }

        let r = gauss_hermite_rule::<f64>(5).unwrap();
        let fourth = r.integrate(|x| x.powi(4));
        assert_abs_diff_eq!(fourth, 0.75 * std::f64::consts::PI.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn rule_order_out_of_range() {
        assert!(gauss_hermite_rule::<f64>(0).is_err());
        assert!(gauss_hermite_rule::<f64>(1025).is_err());
        assert!(gauss_hermite_rule::<f64>(1024).is_ok());
    }

    // int x^k e^{-x^2} dx = Gamma((k+1)/2) for even k, 0 for odd k.
    fn moment(k: usize) -> f64 {
        if k % 2 == 1 {
            return 0.0;
        }
        let mut g = std::f64::consts::PI.sqrt(); // Gamma(1/2)
        let mut a = 0.5;
        while a < (k as f64 + 1.0) / 2.0 - 1e-9 {
            g *= a;
            a += 1.0;
        }
        g
    }

    #[test]
    fn rule_is_exact_to_degree_2m_minus_1() {
        for &m in &[3usize, 8, 17, 30] {
            let r = gauss_hermite_rule::<f64>(m).unwrap();
            for k in 0..2 * m {
                let got = r.integrate(|x| x.powi(k as i32));
                // odd moments: compare against the even moment of the same size
                let scale = moment(k + (k % 2));
                assert!((got - moment(k)).abs() <= 1e-10 * scale, "m={m} k={k} got={got}");
            }
        }
    }

    #[test]
    fn rule_invariants_for_moderate_orders() {
        for &m in &[10usize, 64, 100, 200] {
            let r = gauss_hermite_rule::<f64>(m).unwrap();
            let sum: f64 = r.weights().iter().sum();
            assert_abs_diff_eq!(sum, std::f64::consts::PI.sqrt(), epsilon = 1e-12);
            for i in 0..m {
                assert_eq!(r.nodes()[i], -r.nodes()[m - 1 - i]);
                assert!(r.scaled_weights()[i] > 0.0);
            }
            if m <= 100 {
                assert!(r.weights().iter().all(|&w| w > 0.0));
            }
            assert!(r.nodes().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn large_rule_nodes_are_roots() {
        let r = gauss_hermite_rule::<f64>(1024).unwrap();
        assert!(r.scaled_weights().iter().all(|w| w.is_finite() && *w > 0.0));
        for &x in r.nodes().iter().step_by(97) {
            let (prev, cur, _) = tail_pair(1024, x);
            assert!(cur.abs() <= 1e-9 * prev.abs(), "x={x}");
        }
    }

    #[test]
    fn hermite_orthonormal_by_quadrature() {
        let r = gauss_hermite_rule::<f64>(64).unwrap();
        let tables: Vec<Vec<f64>> = r.nodes().iter().map(|&x| hermite_function_values(20, x).unwrap()).collect();
        for j in 0..=20 {
            for k in 0..=20 {
                let s: f64 = tables.iter().zip(r.scaled_weights()).map(|(t, w)| w * t[j] * t[k]).sum();
                let target = if j == k { 1.0 } else { 0.0 };
                assert!((s - target).abs() < 1e-10, "j={j} k={k} s={s}");
            }
        }
    }

    #[test]
    fn f32_rule() {
        let r = gauss_hermite_rule::<f32>(12).unwrap();
        let sum: f32 = r.weights().iter().sum();
        assert!((sum - std::f32::consts::PI.sqrt()).abs() < 1e-5);
    }

    #[test]
    fn tridiagonal_against_known_spectrum() {
        // 1-D Dirichlet Laplacian stencil: eigenvalues 2 - 2 cos(k pi / (n+1))
        let n = 12;
        let diag = vec![2.0; n];
        let off = vec![-1.0; n - 1];
        let mut ev = symmetric_tridiagonal_eigenvalues(&diag, &off).unwrap();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (k, v) in ev.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert_abs_diff_eq!(*v, exact, epsilon = 1e-13);
        }
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate_level(1, 5), vec![MultiIndex::from([2])]);
        assert_eq!(enumerate_level(2, 4), vec![MultiIndex::from([0, 1]), MultiIndex::from([1, 0])]);
        assert!(enumerate_level(1, 4).is_empty());
        assert!(enumerate_level(3, 1).is_empty());
    }

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn enumerate_cardinality_matches_binomial() {
        for n in 1..=4 {
            for level in 0..=41 {
                let got = enumerate_level(n, level);
                if level < n || (level - n) % 2 == 1 {
                    assert!(got.is_empty());
                    continue;
                }
                let order = (level - n) / 2;
                assert_eq!(got.len(), binomial(order + n - 1, n - 1), "n={n} level={level}");
                assert!(got.windows(2).all(|w| w[0] < w[1]));
                assert!(got.iter().all(|nu| nu.dim() == n && 2 * nu.order() + n == level));
            }
        }
    }

    #[test]
    fn box_indices_lexicographic() {
        let b = box_indices(2, 1);
        let want: Vec<MultiIndex> = vec![[0, 0].into(), [0, 1].into(), [1, 0].into(), [1, 1].into()];
        assert_eq!(b, want);
    }

    proptest! {
        #[test]
        fn recurrence_bounded(k in 0usize..=200, x in -20.0f64..20.0) {
            let v = hermite_function_values(k, x).unwrap();
            prop_assert!(v.iter().all(|t| t.abs() <= 1.0 + 1e-9));
        }
    }
}
