//! Special Hermite eigenbasis on a tensor grid and the truncated
//! analysis/synthesis transforms.

mod basis;
mod field;
mod grid;

pub use basis::{
    build_basis, build_basis_with_cap, estimate_basis_bytes, eval_special_hermite, min_quad_order, BasisTable,
    DEFAULT_MEMORY_CAP, DEFAULT_QUAD_ORDER, NORM_TOLERANCE,
};
pub use field::{level_of, SpectralField, Truncation};
pub use grid::QuadratureGrid;

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;

const SYNTH_CHUNK: usize = 4096;

/// Hermite-Fourier coefficients `<f, phi_{mu nu}>` of grid samples, with the
/// basis function conjugated. Every basis index appears in the result.
pub fn analyze<T: Real>(samples: &[Complex<T>], basis: &BasisTable<T>) -> Result<SpectralField<T>> {
    if samples.len() != basis.grid().len() {
        return Err(Error::InvalidInput(format!(
            "sample array has {} entries, grid has {}",
            samples.len(),
            basis.grid().len()
        )));
    }
    let coeffs: Vec<Complex<T>> = (0..basis.len()).into_par_iter().map(|r| basis.inner(samples, basis.row(r))).collect();
    let mut field = SpectralField::new(basis.n(), basis.truncation());
    for ((mu, nu), c) in basis.index().iter().zip(coeffs) {
        field.insert(mu.clone(), nu.clone(), c)?;
    }
    Ok(field)
}

/// Grid samples of `sum c_{mu nu} phi_{mu nu}`.
///
/// Each output point accumulates the terms in the field's key order, so the
/// result does not depend on the worker count.
pub fn synthesize<T: Real>(field: &SpectralField<T>, basis: &BasisTable<T>) -> Result<Vec<Complex<T>>> {
    let mut rows = Vec::with_capacity(field.len());
    let mut missing = Vec::new();
    for (mu, nu, c) in field.iter() {
        match basis.row_of(mu, nu) {
            Some(r) => rows.push((r, c)),
            None => missing.push(format!("({mu}, {nu})")),
        }
    }
    if !missing.is_empty() {
        return Err(Error::OutOfTruncation(format!("not in basis: {}", missing.join(", "))));
    }
    let points = basis.grid().len();
    let mut out = vec![Complex::default(); points];
    out.par_chunks_mut(SYNTH_CHUNK).enumerate().for_each(|(chunk, dst)| {
        let start = chunk * SYNTH_CHUNK;
        for &(r, c) in &rows {
            let src = &basis.row(r)[start..start + dst.len()];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += c * *s;
            }
        }
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_functions::MultiIndex;
    use rand::{Rng, SeedableRng};
    use std::sync::OnceLock;

    fn basis_10() -> &'static BasisTable<f64> {
        static B: OnceLock<BasisTable<f64>> = OnceLock::new();
        B.get_or_init(|| {
            let grid = QuadratureGrid::new(1, 12.0, 0.1, 1).unwrap();
            build_basis(1, Truncation::new(10, 10), &grid, 200).unwrap()
        })
    }

    fn random_field(seed: u64) -> SpectralField<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let t = Truncation::new(10, 10);
        let mut f = SpectralField::new(1, t);
        for (mu, nu) in t.pairs(1) {
            // |coeff| <= 1
            let r: f64 = rng.random();
            let th: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            f.insert(mu, nu, Complex::from_polar(r, th)).unwrap();
        }
        f
    }

    #[test]
    fn analyze_basis_function() {
        let b = basis_10();
        let z = MultiIndex::from([0]);
        let f = analyze(b.samples(&z, &z).unwrap(), b).unwrap();
        for (mu, nu, c) in f.iter() {
            if mu == &z && nu == &z {
                assert!((c - Complex::new(1.0, 0.0)).norm() < 2e-6);
            } else {
                assert!(c.norm() < 1e-6);
            }
        }
    }

    #[test]
    fn analyze_gaussian() {
        let b = basis_10();
        let g = b.grid();
        let samples: Vec<Complex<f64>> = (0..g.len())
            .map(|k| {
                let p = g.point(k);
                Complex::new((-(p[0] * p[0] + p[1] * p[1]) / 4.0).exp(), 0.0)
            })
            .collect();
        let f = analyze(&samples, b).unwrap();
        let c = f.get(&[0].into(), &[0].into()).unwrap();
        assert!((c.re - std::f64::consts::TAU.sqrt()).abs() < 1e-6 && c.im.abs() < 1e-9);
        assert!((c.re - 2.506_628_3).abs() < 1e-6);
    }

    #[test]
    fn zero_in_zero_out() {
        let b = basis_10();
        let f = analyze(&vec![Complex::default(); b.grid().len()], b).unwrap();
        assert_eq!(f.len(), 121);
        assert!(f.iter().all(|(_, _, c)| c == Complex::default()));
        let empty = SpectralField::new(1, Truncation::new(10, 10));
        assert!(synthesize(&empty, b).unwrap().iter().all(|v| *v == Complex::default()));
    }

    #[test]
    fn shape_and_key_errors() {
        let b = basis_10();
        assert!(matches!(analyze(&[Complex::default(); 3], b), Err(Error::InvalidInput(_))));
        let mut f = SpectralField::new(1, Truncation::new(12, 12));
        f.insert([11].into(), [0].into(), Complex::new(1.0, 0.0)).unwrap();
        let err = synthesize(&f, b).unwrap_err();
        assert!(err.to_string().contains("((11), (0))"), "{err}");
    }

    #[test]
    fn synthesize_single_function() {
        let b = basis_10();
        let f = SpectralField::basis_function(1, Truncation::new(10, 10), [0].into(), [0].into()).unwrap();
        let s = synthesize(&f, b).unwrap();
        assert_eq!(s, b.samples(&[0].into(), &[0].into()).unwrap());
    }

    #[test]
    fn gram_is_identity() {
        assert!(basis_10().gram_max_deviation() < 1e-6);
    }

    #[test]
    fn round_trip_random_field() {
        let b = basis_10();
        let f = random_field(7);
        let back = analyze(&synthesize(&f, b).unwrap(), b).unwrap();
        assert!(f.max_abs_diff(&back) < 1e-6, "{}", f.max_abs_diff(&back));
    }

    #[test]
    fn parseval_on_truncated_span() {
        let b = basis_10();
        for seed in 0..3 {
            let f = random_field(seed);
            let s = synthesize(&f, b).unwrap();
            let grid_norm = b.inner(&s, &s).re.sqrt();
            assert!((grid_norm - f.l2_norm()).abs() < 1e-5 * f.l2_norm());
        }
    }

    #[test]
    fn analyze_is_linear() {
        let b = basis_10();
        let (f, g) = (synthesize(&random_field(1), b).unwrap(), synthesize(&random_field(2), b).unwrap());
        let (alpha, beta) = (Complex::new(0.3, -1.2), Complex::new(-2.0, 0.5));
        let combo: Vec<_> = f.iter().zip(&g).map(|(a, c)| alpha * a + beta * c).collect();
        let lhs = analyze(&combo, b).unwrap();
        let rhs = analyze(&f, b).unwrap().map_by_level(|_, c| c * alpha).add_scaled(beta, &analyze(&g, b).unwrap()).unwrap();
        let scale = rhs.l2_norm();
        assert!(lhs.max_abs_diff(&rhs) <= 1e-10 * scale);
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let b = basis_10();
        let f = random_field(3);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let a = one.install(|| synthesize(&f, b).unwrap());
        let c = three.install(|| synthesize(&f, b).unwrap());
        assert_eq!(a, c);
        let x = one.install(|| analyze(&a, b).unwrap());
        let y = three.install(|| analyze(&a, b).unwrap());
        assert_eq!(x, y);
    }
}
