//! Seeded random fields.
//!
//! Every record draws from its own ChaCha8 stream: the generator is seeded
//! from the run's 64-bit seed and the stream id selects an independent
//! counter sequence, so records can be produced in any order or on any
//! number of threads and still see identical numbers.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::scalar::Real;
use crate::special_hermite::{level_of, SpectralField, Truncation};

/// Stream id for the pair (level, trial).
pub fn stream_id(level: usize, trial: usize) -> u64 {
    ((level as u64) << 32) | (trial as u64 & 0xffff_ffff)
}

pub fn record_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex Gaussian: real and imaginary parts `N(0, 1/2)`.
pub fn complex_gaussian<T: Real, R: Rng>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Complex::new(T::lit(re * s), T::lit(im * s))
}

/// Independent complex Gaussian coefficients on every pair of the truncation.
pub fn random_field<T: Real, R: Rng>(n: usize, truncation: Truncation, rng: &mut R) -> SpectralField<T> {
    let mut f = SpectralField::new(n, truncation);
    for (mu, nu) in truncation.pairs(n) {
        f.insert(mu, nu, complex_gaussian(rng)).expect("pairs lie in truncation");
    }
    f
}

/// Complex Gaussian coefficients on the pairs of one Landau level.
pub fn random_level_field<T: Real, R: Rng>(
    n: usize,
    truncation: Truncation,
    level: usize,
    rng: &mut R,
) -> SpectralField<T> {
    let mut f = SpectralField::new(n, truncation);
    for (mu, nu) in truncation.pairs(n) {
        if level_of(&nu) == level {
            f.insert(mu, nu, complex_gaussian(rng)).expect("pairs lie in truncation");
        }
    }
    f
}
