//! Seeded random coefficient vectors for trials.
//!
//! Coefficients are drawn independently, uniform in [-1, 1] (real) or the
//! unit square (complex), then normalized to unit norm.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hermite_complex::ComplexCoeffs;
use crate::hermite_real::RealCoeffs;

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn random_real<R: Rng>(rng: &mut R, band: usize) -> RealCoeffs {
    let mut v: Vec<f64> = (0..=band).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    normalize(&mut v, |x| x * x, |x, s| x / s);
    RealCoeffs::from_vec(v).expect("band + 1 >= 1 entries")
}

pub fn random_complex<R: Rng>(rng: &mut R, band: usize) -> ComplexCoeffs {
    let mut v: Vec<Complex64> = (0..(band + 1) * (band + 1))
        .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
        .collect();
    normalize(&mut v, |z| z.norm_sqr(), |z, s| z / s);
    ComplexCoeffs::from_vec(band, v).expect("square layout")
}

fn normalize<T: Copy>(v: &mut [T], sq: impl Fn(T) -> f64, div: impl Fn(T, f64) -> T) {
    let norm = v.iter().map(|&x| sq(x)).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x = div(*x, norm);
        }
    }
}

/// Uniform draw from `[lo, hi]`; a degenerate range returns `lo`.
pub fn uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.gen_range(lo..=hi)
    } else {
        lo
    }
}
