//! Fixtures shared by the benchmarks.

use ringlab_core::DeterminingSequence;

/// A determining sequence with `alpha_1 = 1` and geometrically shrinking
/// higher terms, alternating in sign.
pub fn geometric_sequence(len: usize) -> DeterminingSequence {
    let alphas: Vec<f64> = (0..len).map(|k| (-0.3f64).powi(k as i32)).collect();
    DeterminingSequence::from_alphas(&alphas).expect("finite")
}
