use std::collections::HashMap;

use num_complex::Complex;
use rayon::prelude::*;

use super::field::Truncation;
use super::grid::QuadratureGrid;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special_functions::{gauss_hermite_rule, hermite_values_into, GaussHermiteRule, MultiIndex};

/// Default Gauss-Hermite order for the defining integral.
pub const DEFAULT_QUAD_ORDER: usize = 200;

/// Default allocation cap for a basis table (4 GiB).
pub const DEFAULT_MEMORY_CAP: u64 = 4 << 30;

/// Tolerance on the grid norm of each stored function before a truncation
/// warning is attached.
pub const NORM_TOLERANCE: f64 = 2e-6;

/// Smallest rule order accepted for indices up to order `k`.
pub fn min_quad_order(k: usize) -> usize {
    2 * (k + 1)
}

/// Nodes whose contribution `W_i max|phi_a| max|phi_b|` falls below this are
/// skipped in the plane evaluation.
const NODE_CUTOFF: f64 = 1e-24;

/// Quadrature of the 1-D defining integral
/// `(2 pi)^{-1/2} int e^{i x xi} phi_a(xi + y/2) phi_b(xi - y/2) d xi`
/// for all `a <= a_max`, `b <= b_max` at one point. The Gaussian factor is
/// stripped into the scaled weights, leaving bounded Hermite functions.
fn plane_values<T: Real>(
    rule: &GaussHermiteRule<T>,
    a_max: usize,
    b_max: usize,
    x: T,
    y: T,
    out: &mut [Complex<T>],
) {
    let half_y = y / T::lit(2.0);
    let mut pa = vec![T::zero(); a_max + 1];
    let mut pb = vec![T::zero(); b_max + 1];
    out.iter_mut().for_each(|v| *v = Complex::default());
    for (&xi, &w) in rule.nodes().iter().zip(rule.scaled_weights()) {
        hermite_values_into(xi + half_y, &mut pa);
        hermite_values_into(xi - half_y, &mut pb);
        let c = Complex::from_polar(w, x * xi);
        for (a, &va) in pa.iter().enumerate() {
            let t = c * va;
            for (b, &vb) in pb.iter().enumerate() {
                out[a * (b_max + 1) + b] += t * vb;
            }
        }
    }
    let norm = T::TAU().sqrt().recip();
    out.iter_mut().for_each(|v| *v *= norm);
}

/// Evaluates `phi_{mu nu}(z)` at `z = (x, y)` in `R^{2n}` by Gauss-Hermite
/// quadrature of the defining integral, one coordinate at a time (the
/// integral factors over coordinates).
pub fn eval_special_hermite<T: Real>(
    mu: &MultiIndex,
    nu: &MultiIndex,
    z: &[T],
    quad_order: usize,
) -> Result<Complex<T>> {
    let n = mu.dim();
    if nu.dim() != n || z.len() != 2 * n {
        return Err(Error::InvalidInput(format!(
            "mu {mu}, nu {nu} and point of length {} are inconsistent",
            z.len()
        )));
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("evaluation point must be finite".into()));
    }
    let order = mu.order().max(nu.order());
    if quad_order < min_quad_order(order) {
        return Err(Error::QuadratureOrder { got: quad_order, min: min_quad_order(order), order });
    }
    let rule = gauss_hermite_rule::<T>(quad_order)?;
    let mut value = Complex::new(T::one(), T::zero());
    let mut buf = Vec::new();
    for j in 0..n {
        let (a, b) = (mu.entries()[j], nu.entries()[j]);
        buf.resize((a + 1) * (b + 1), Complex::default());
        plane_values(&rule, a, b, z[j], z[n + j], &mut buf);
        value *= buf[a * (b + 1) + b];
    }
    Ok(value)
}

/// 1-D special Hermite functions on the `N x N` plane grid for all
/// `a <= a_max`, `b <= b_max`. Layout: `[(a * (b_max+1) + b) * N*N + ix * N + iy]`.
fn plane_table<T: Real>(rule: &GaussHermiteRule<T>, a_max: usize, b_max: usize, axis: &[T]) -> Vec<Complex<T>> {
    let side = axis.len();
    let plane = side * side;
    let pairs = (a_max + 1) * (b_max + 1);
    let nodes = rule.nodes();
    let weights = rule.scaled_weights();
    let cutoff = T::lit(NODE_CUTOFF);
    let norm = T::TAU().sqrt().recip();

    // one column per y value: values for every x and (a, b)
    let columns: Vec<Vec<Complex<T>>> = axis
        .par_iter()
        .map(|&y| {
            let half_y = y / T::lit(2.0);
            // node products P[i][a*(b_max+1)+b] = W_i phi_a(xi+y/2) phi_b(xi-y/2)
            let mut active = Vec::new();
            let mut products: Vec<T> = Vec::new();
            let mut pa = vec![T::zero(); a_max + 1];
            let mut pb = vec![T::zero(); b_max + 1];
            for (i, (&xi, &w)) in nodes.iter().zip(weights).enumerate() {
                hermite_values_into(xi + half_y, &mut pa);
                hermite_values_into(xi - half_y, &mut pb);
                let ma = pa.iter().fold(T::zero(), |m, v| m.max(v.abs()));
                let mb = pb.iter().fold(T::zero(), |m, v| m.max(v.abs()));
                if w * ma * mb < cutoff {
                    continue;
                }
                active.push(i);
                for &va in &pa {
                    for &vb in &pb {
                        products.push(w * va * vb);
                    }
                }
            }
            let mut col = vec![Complex::default(); side * pairs];
            for (ix, &x) in axis.iter().enumerate() {
                let acc = &mut col[ix * pairs..(ix + 1) * pairs];
                for (slot, &i) in active.iter().enumerate() {
                    let (s, c) = (x * nodes[i]).sin_cos();
                    let row = &products[slot * pairs..(slot + 1) * pairs];
                    for (a, p) in acc.iter_mut().zip(row) {
                        a.re += c * *p;
                        a.im += s * *p;
                    }
                }
                acc.iter_mut().for_each(|v| *v *= norm);
            }
            col
        })
        .collect();

    let mut table = vec![Complex::default(); pairs * plane];
    for (iy, col) in columns.iter().enumerate() {
        for ix in 0..side {
            for p in 0..pairs {
                table[p * plane + ix * side + iy] = col[ix * pairs + p];
            }
        }
    }
    table
}

/// The special Hermite functions of a truncation sampled on a grid.
#[derive(Debug, Clone)]
pub struct BasisTable<T> {
    n: usize,
    truncation: Truncation,
    grid: QuadratureGrid<T>,
    quad_order: usize,
    index: Vec<(MultiIndex, MultiIndex)>,
    lookup: HashMap<(MultiIndex, MultiIndex), usize>,
    values: Vec<Complex<T>>,
    warnings: Vec<String>,
}

/// Bytes a basis table for this configuration would occupy.
pub fn estimate_basis_bytes<T>(n: usize, truncation: Truncation, grid_points: usize, axis_len: usize) -> u64 {
    let elem = std::mem::size_of::<Complex<T>>() as u64;
    let rows = truncation.count(n) as u64;
    let plane = ((truncation.mu_max + 1) * (truncation.nu_max + 1)) as u64 * (axis_len * axis_len) as u64;
    rows.saturating_mul(grid_points as u64).saturating_mul(elem).saturating_add(plane * elem)
}

/// [`build_basis_with_cap`] with [`DEFAULT_MEMORY_CAP`].
pub fn build_basis<T: Real>(
    n: usize,
    truncation: Truncation,
    grid: &QuadratureGrid<T>,
    quad_order: usize,
) -> Result<BasisTable<T>> {
    build_basis_with_cap(n, truncation, grid, quad_order, DEFAULT_MEMORY_CAP)
}

/// Samples every `phi_{mu nu}` of the truncation on the spatial grid.
///
/// Functions whose grid norm deviates from 1 by more than [`NORM_TOLERANCE`]
/// produce a warning (usually a grid radius too small for the indices).
pub fn build_basis_with_cap<T: Real>(
    n: usize,
    truncation: Truncation,
    grid: &QuadratureGrid<T>,
    quad_order: usize,
    memory_cap: u64,
) -> Result<BasisTable<T>> {
    if grid.n() != n {
        return Err(Error::InvalidInput(format!("grid dimension {} does not match n = {n}", grid.n())));
    }
    let order = n * truncation.mu_max.max(truncation.nu_max);
    if quad_order < min_quad_order(order) {
        return Err(Error::QuadratureOrder { got: quad_order, min: min_quad_order(order), order });
    }
    let needed = estimate_basis_bytes::<T>(n, truncation, grid.len(), grid.points_per_axis());
    if needed > memory_cap {
        return Err(Error::Resource { needed, cap: memory_cap });
    }

    let rule = gauss_hermite_rule::<T>(quad_order)?;
    let side = grid.points_per_axis();
    let plane = side * side;
    let b_count = truncation.nu_max + 1;
    let table = plane_table(&rule, truncation.mu_max, truncation.nu_max, grid.axis());

    let index = truncation.pairs(n);
    let points = grid.len();
    let mut values = vec![Complex::default(); index.len() * points];
    values.par_chunks_mut(points).zip(index.par_iter()).for_each(|(row, (mu, nu))| {
        let offsets: Vec<usize> =
            (0..n).map(|j| (mu.entries()[j] * b_count + nu.entries()[j]) * plane).collect();
        for (k, out) in row.iter_mut().enumerate() {
            let idx = grid.axis_indices(k);
            let mut v = Complex::new(T::one(), T::zero());
            for j in 0..n {
                v *= table[offsets[j] + idx[j] * side + idx[n + j]];
            }
            *out = v;
        }
    });

    let lookup = index.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let mut basis = BasisTable {
        n,
        truncation,
        grid: grid.clone(),
        quad_order,
        index,
        lookup,
        values,
        warnings: Vec::new(),
    };
    basis.check_norms();
    Ok(basis)
}

impl<T: Real> BasisTable<T> {
    /// Reassembles a table from stored parts (used by the cache reader).
    pub(crate) fn from_parts(
        n: usize,
        truncation: Truncation,
        grid: QuadratureGrid<T>,
        quad_order: usize,
        values: Vec<Complex<T>>,
    ) -> Result<Self> {
        let index = truncation.pairs(n);
        if values.len() != index.len() * grid.len() {
            return Err(Error::Format(format!(
                "basis data holds {} values, expected {}",
                values.len(),
                index.len() * grid.len()
            )));
        }
        let lookup = index.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let mut basis = BasisTable { n, truncation, grid, quad_order, index, lookup, values, warnings: Vec::new() };
        basis.check_norms();
        Ok(basis)
    }

    fn check_norms(&mut self) {
        let tol = T::lit(NORM_TOLERANCE);
        let mut worst: Option<(usize, T)> = None;
        for r in 0..self.index.len() {
            let dev = (self.grid_norm(r) - T::one()).abs();
            if dev > tol && worst.is_none_or(|(_, w)| dev > w) {
                worst = Some((r, dev));
            }
            if !self.row(r).iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
                self.warnings.push(format!("non-finite samples in {:?}", self.index[r]));
            }
        }
        if let Some((r, dev)) = worst {
            let (mu, nu) = &self.index[r];
            self.warnings.push(format!(
                "grid [-{R}, {R}] truncates the basis: grid norm of phi_{{{mu},{nu}}} deviates from 1 by {dev:e}",
                R = self.grid.radius()
            ));
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn grid(&self) -> &QuadratureGrid<T> {
        &self.grid
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn index(&self) -> &[(MultiIndex, MultiIndex)] {
        &self.index
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn row_of(&self, mu: &MultiIndex, nu: &MultiIndex) -> Option<usize> {
        self.lookup.get(&(mu.clone(), nu.clone())).copied()
    }

    /// Grid samples of the `r`-th stored function.
    pub fn row(&self, r: usize) -> &[Complex<T>] {
        let p = self.grid.len();
        &self.values[r * p..(r + 1) * p]
    }

    pub fn samples(&self, mu: &MultiIndex, nu: &MultiIndex) -> Option<&[Complex<T>]> {
        self.row_of(mu, nu).map(|r| self.row(r))
    }

    /// Weighted grid inner product `sum_k w_k f(z_k) conj(g(z_k))`.
    pub fn inner(&self, f: &[Complex<T>], g: &[Complex<T>]) -> Complex<T> {
        weighted_inner(self.grid.weights(), f, g)
    }

    pub fn grid_norm(&self, r: usize) -> T {
        self.inner(self.row(r), self.row(r)).re.sqrt()
    }

    /// Full Gram matrix of the stored functions, row-major.
    pub fn gram_matrix(&self) -> Vec<Complex<T>> {
        let m = self.len();
        let mut g = vec![Complex::default(); m * m];
        g.par_chunks_mut(m).enumerate().for_each(|(i, out)| {
            for j in i..m {
                out[j] = self.inner(self.row(i), self.row(j));
            }
        });
        for i in 0..m {
            for j in 0..i {
                g[i * m + j] = g[j * m + i].conj();
            }
        }
        g
    }

    /// `max_{ij} |G_ij - delta_ij|`.
    pub fn gram_max_deviation(&self) -> T {
        let m = self.len();
        self.gram_matrix()
            .iter()
            .enumerate()
            .map(|(k, g)| {
                let target = if k / m == k % m { Complex::new(T::one(), T::zero()) } else { Complex::default() };
                (*g - target).norm()
            })
            .fold(T::zero(), T::max)
    }
}

pub(crate) fn weighted_inner<T: Real>(w: &[T], f: &[Complex<T>], g: &[Complex<T>]) -> Complex<T> {
    let mut acc = Complex::default();
    for ((w, a), b) in w.iter().zip(f).zip(g) {
        acc += *a * b.conj() * *w;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // Gaussian closed form: phi_00(z) = (2 pi)^{-1/2} exp(-|z|^2/4)
    fn phi00_closed(x: f64, y: f64) -> f64 {
        (-(x * x + y * y) / 4.0).exp() / std::f64::consts::TAU.sqrt()
    }

    // Brute-force composite Simpson on [-10, 10] of the defining integral.
    fn simpson_oracle(a: usize, b: usize, x: f64, y: f64) -> Complex<f64> {
        let steps = 20_000;
        let h = 20.0 / steps as f64;
        let mut acc = Complex::new(0.0, 0.0);
        for k in 0..=steps {
            let xi = -10.0 + k as f64 * h;
            let w = if k == 0 || k == steps {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let pa = crate::hermite_function_values(a, xi + y / 2.0).unwrap()[a];
            let pb = crate::hermite_function_values(b, xi - y / 2.0).unwrap()[b];
            acc += Complex::from_polar(1.0, x * xi) * (w * pa * pb);
        }
        acc * (h / 3.0) / std::f64::consts::TAU.sqrt()
    }

    #[test]
    fn eval_examples() {
        let z0 = Complex::new(0.0, 0.0);
        let v = eval_special_hermite::<f64>(&[0].into(), &[0].into(), &[0.0, 0.0], 200).unwrap();
        assert_abs_diff_eq!(v.re, 0.398_942_280_401_432_7, epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, z0.im, epsilon = 1e-14);
        let v = eval_special_hermite::<f64>(&[0].into(), &[0].into(), &[2.0, 0.0], 200).unwrap();
        assert_abs_diff_eq!(v.re, phi00_closed(2.0, 0.0), epsilon = 1e-12);
        assert_abs_diff_eq!(v.re, 0.146_762_6, epsilon = 1e-7);

        let v = eval_special_hermite::<f64>(&[0].into(), &[1].into(), &[0.0, 0.0], 200).unwrap();
        let oracle = simpson_oracle(0, 1, 0.0, 0.0);
        assert!((v - oracle).norm() < 1e-8);
    }

    #[test]
    fn eval_matches_simpson_off_axis() {
        for &(a, b, x, y) in &[(2usize, 1usize, 0.7, -0.4), (0, 3, 1.5, 2.0), (4, 4, -2.2, 0.9)] {
            let v = eval_special_hermite::<f64>(&[a].into(), &[b].into(), &[x, y], 200).unwrap();
            assert!((v - simpson_oracle(a, b, x, y)).norm() < 1e-8, "({a},{b}) at ({x},{y})");
        }
    }

    #[test]
    fn gaussian_closed_form_on_grid_points() {
        for &(x, y) in &[(0.3, -1.1), (5.0, 4.0), (-9.5, 11.0), (12.0, 12.0)] {
            let v = eval_special_hermite::<f64>(&[0].into(), &[0].into(), &[x, y], 200).unwrap();
            assert!((v.re - phi00_closed(x, y)).abs() < 1e-13 && v.im.abs() < 1e-13, "({x},{y}) {v}");
        }
    }

    #[test]
    fn eval_rejects_low_order() {
        let err = eval_special_hermite::<f64>(&[5].into(), &[2].into(), &[0.0, 0.0], 8).unwrap_err();
        assert!(matches!(err, Error::QuadratureOrder { min: 12, .. }), "{err}");
    }

    #[test]
    fn conjugation_symmetry_with_parity_sign() {
        // phi_{nu mu}(x, y) = (-1)^{|mu|+|nu|} conj(phi_{mu nu}(x, y))
        for a in 0..=5usize {
            for b in 0..=5usize {
                for &(x, y) in &[(0.4, -1.3), (2.1, 0.8)] {
                    let p = eval_special_hermite::<f64>(&[a].into(), &[b].into(), &[x, y], 200).unwrap();
                    let q = eval_special_hermite::<f64>(&[b].into(), &[a].into(), &[x, y], 200).unwrap();
                    let sign = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
                    assert!((q - p.conj() * sign).norm() < 1e-8, "a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn two_dimensional_value_factors() {
        let z = [0.3, -0.2, 0.5, 1.0];
        let v = eval_special_hermite::<f64>(&[1, 0].into(), &[0, 2].into(), &z, 200).unwrap();
        let a = eval_special_hermite::<f64>(&[1].into(), &[0].into(), &[0.3, 0.5], 200).unwrap();
        let b = eval_special_hermite::<f64>(&[0].into(), &[2].into(), &[-0.2, 1.0], 200).unwrap();
        assert!((v - a * b).norm() < 1e-14);
    }

    #[test]
    fn single_function_basis_norm() {
        let grid = QuadratureGrid::<f64>::new(1, 12.0, 0.1, 1).unwrap();
        let basis = build_basis(1, Truncation::new(0, 0), &grid, 200).unwrap();
        assert_eq!(basis.len(), 1);
        assert!((basis.grid_norm(0) - 1.0).abs() < 2e-6);
        assert!(basis.warnings().is_empty());
    }

    #[test]
    fn small_grid_warns_about_truncation() {
        let grid = QuadratureGrid::<f64>::new(1, 2.0, 0.1, 1).unwrap();
        let basis = build_basis(1, Truncation::new(0, 0), &grid, 200).unwrap();
        // closed form: the square [-2,2]^2 holds (erf(sqrt(2)))^2 of the mass
        let mass = erf_oracle(2f64.sqrt()).powi(2);
        let norm = basis.grid_norm(0);
        assert!(norm < 0.96, "norm {norm}");
        // trapezoid error at the cut edges is O(h^2)
        assert!((norm - mass.sqrt()).abs() < 1e-3);
        assert_eq!(basis.warnings().len(), 1);
        assert!(basis.warnings()[0].contains("truncates"));
    }

    // erf by Simpson quadrature of its defining integral
    fn erf_oracle(x: f64) -> f64 {
        let steps = 2000;
        let h = x / steps as f64;
        let mut s = 0.0;
        for k in 0..=steps {
            let t = k as f64 * h;
            let w = if k == 0 || k == steps {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            s += w * (-t * t).exp();
        }
        s * h / 3.0 * 2.0 / std::f64::consts::PI.sqrt()
    }

    #[test]
    fn memory_cap_is_enforced() {
        let grid = QuadratureGrid::<f64>::new(1, 12.0, 0.1, 1).unwrap();
        let err = build_basis_with_cap(1, Truncation::new(10, 10), &grid, 200, 1 << 20).unwrap_err();
        assert!(matches!(err, Error::Resource { .. }));
    }

    #[test]
    fn table_matches_pointwise_evaluation() {
        let grid = QuadratureGrid::<f64>::new(1, 4.0, 0.5, 1).unwrap();
        let basis = build_basis(1, Truncation::new(2, 3), &grid, 200).unwrap();
        for (r, (mu, nu)) in basis.index().iter().enumerate() {
            for k in [0usize, 7, 40, 80] {
                let z = grid.point(k);
                let v = eval_special_hermite(mu, nu, &z, 200).unwrap();
                assert!((basis.row(r)[k] - v).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn two_dimensional_basis_is_orthonormal() {
        let grid = QuadratureGrid::<f64>::new(2, 8.0, 0.5, 1).unwrap();
        let basis = build_basis(2, Truncation::new(1, 1), &grid, 200).unwrap();
        assert_eq!(basis.len(), 16);
        assert!(basis.gram_max_deviation() < 1e-6, "{}", basis.gram_max_deviation());
    }

    #[test]
    fn f32_basis_is_nearly_orthonormal() {
        let grid = QuadratureGrid::<f32>::new(1, 10.0, 0.25, 1).unwrap();
        let basis = build_basis(1, Truncation::new(2, 2), &grid, 64).unwrap();
        assert!(basis.gram_max_deviation() < 1e-4);
    }
}
