use std::collections::BTreeMap;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special_functions::{box_indices, MultiIndex};

/// Per-coordinate caps on the `(mu, nu)` index set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Truncation {
    pub mu_max: usize,
    pub nu_max: usize,
}

impl Truncation {
    pub fn new(mu_max: usize, nu_max: usize) -> Self {
        Truncation { mu_max, nu_max }
    }

    pub fn contains(&self, mu: &MultiIndex, nu: &MultiIndex) -> bool {
        mu.max_entry() <= self.mu_max && nu.max_entry() <= self.nu_max
    }

    /// Number of `(mu, nu)` pairs in dimension `n`.
    pub fn count(&self, n: usize) -> usize {
        (self.mu_max + 1).pow(n as u32) * (self.nu_max + 1).pow(n as u32)
    }

    /// All pairs, lexicographic in `(mu, nu)`.
    pub fn pairs(&self, n: usize) -> Vec<(MultiIndex, MultiIndex)> {
        let mus = box_indices(n, self.mu_max);
        let nus = box_indices(n, self.nu_max);
        mus.iter().flat_map(|mu| nus.iter().map(move |nu| (mu.clone(), nu.clone()))).collect()
    }

    /// Highest Landau level reachable, `2 n nu_max + n`.
    pub fn max_level(&self, n: usize) -> usize {
        2 * n * self.nu_max + n
    }
}

/// Landau level `2|nu| + n` of the eigenfunctions `phi_{mu nu}`.
#[inline]
pub fn level_of(nu: &MultiIndex) -> usize {
    2 * nu.order() + nu.dim()
}

/// Function given by its special Hermite coefficients on a truncated index
/// set. Keys iterate in lexicographic `(mu, nu)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField<T> {
    n: usize,
    truncation: Truncation,
    coeffs: BTreeMap<(MultiIndex, MultiIndex), Complex<T>>,
}

impl<T: Real> SpectralField<T> {
    pub fn new(n: usize, truncation: Truncation) -> Self {
        SpectralField { n, truncation, coeffs: BTreeMap::new() }
    }

    /// Builds a field from `(mu, nu, coefficient)` triples.
    pub fn from_entries(
        n: usize,
        truncation: Truncation,
        entries: impl IntoIterator<Item = (MultiIndex, MultiIndex, Complex<T>)>,
    ) -> Result<Self> {
        let mut f = Self::new(n, truncation);
        for (mu, nu, c) in entries {
            f.insert(mu, nu, c)?;
        }
        Ok(f)
    }

    /// Field equal to a single eigenfunction `phi_{mu nu}`.
    pub fn basis_function(n: usize, truncation: Truncation, mu: MultiIndex, nu: MultiIndex) -> Result<Self> {
        Self::from_entries(n, truncation, [(mu, nu, Complex::new(T::one(), T::zero()))])
    }

    pub fn insert(&mut self, mu: MultiIndex, nu: MultiIndex, c: Complex<T>) -> Result<()> {
        if mu.dim() != self.n || nu.dim() != self.n {
            return Err(Error::InvalidInput(format!(
                "index pair ({mu}, {nu}) does not have dimension n = {}",
                self.n
            )));
        }
        if !self.truncation.contains(&mu, &nu) {
            return Err(Error::OutOfTruncation(format!(
                "({mu}, {nu}) exceeds caps mu_max = {}, nu_max = {}",
                self.truncation.mu_max, self.truncation.nu_max
            )));
        }
        self.coeffs.insert((mu, nu), c);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn get(&self, mu: &MultiIndex, nu: &MultiIndex) -> Option<Complex<T>> {
        // BTreeMap lookup needs an owned tuple key
        self.coeffs.get(&(mu.clone(), nu.clone())).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &MultiIndex, Complex<T>)> {
        self.coeffs.iter().map(|((mu, nu), c)| (mu, nu, *c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `L^2` norm by Parseval: `sqrt(sum |c|^2)`.
    pub fn l2_norm(&self) -> T {
        self.coeffs.values().map(|c| c.norm_sqr()).sum::<T>().sqrt()
    }

    /// Distinct Landau levels carrying a stored coefficient, ascending.
    pub fn levels(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.coeffs.keys().map(|(_, nu)| level_of(nu)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn max_level(&self) -> Option<usize> {
        self.coeffs.keys().map(|(_, nu)| level_of(nu)).max()
    }

    /// Applies `g(level, c)` to every coefficient.
    pub fn map_by_level(&self, g: impl Fn(usize, Complex<T>) -> Complex<T>) -> Self {
        let coeffs = self.coeffs.iter().map(|((mu, nu), c)| ((mu.clone(), nu.clone()), g(level_of(nu), *c))).collect();
        SpectralField { n: self.n, truncation: self.truncation, coeffs }
    }

    /// Keeps the coefficients for which `keep(level)` holds.
    pub fn filter_levels(&self, keep: impl Fn(usize) -> bool) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|((_, nu), _)| keep(level_of(nu)))
            .map(|(k, c)| (k.clone(), *c))
            .collect();
        SpectralField { n: self.n, truncation: self.truncation, coeffs }
    }

    /// `self + alpha * other`, over the union of keys.
    pub fn add_scaled(&self, alpha: Complex<T>, other: &Self) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::InvalidInput("fields of different dimension".into()));
        }
        let mut out = self.clone();
        for ((mu, nu), c) in &other.coeffs {
            if !self.truncation.contains(mu, nu) {
                return Err(Error::OutOfTruncation(format!("({mu}, {nu})")));
            }
            let e = out.coeffs.entry((mu.clone(), nu.clone())).or_default();
            *e += alpha * *c;
        }
        Ok(out)
    }

    /// Largest coefficient-wise difference over the union of keys.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for ((mu, nu), c) in &self.coeffs {
            let o = other.coeffs.get(&(mu.clone(), nu.clone())).copied().unwrap_or_default();
            worst = worst.max((*c - o).norm());
        }
        for (k, c) in &other.coeffs {
            if !self.coeffs.contains_key(k) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }
}
