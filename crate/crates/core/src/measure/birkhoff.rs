//! Monte-Carlo check of the ergodic averages: window averages along random
//! two-sided realisations grown from `a|a` against the cylinder measure.

use rayon::prelude::*;
use serde::Serialize;

use super::{build_induced, CylinderValue};
use crate::error::{Error, Result};
use crate::subst::{letters_to_string, Letter, Probabilities, RandomSubst};

/// A check passes when `|mean − expected| < BIRKHOFF_SIGMA · standard error`.
pub const BIRKHOFF_SIGMA: f64 = 4.0;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BirkhoffReport {
    pub word: String,
    pub window: usize,
    pub trials: usize,
    pub offset: i64,
    pub expected: f64,
    pub mean: f64,
    pub std_error: f64,
    pub deviation: f64,
    pub passed: bool,
}

/// Trial seeds are `seed, seed+1, …`; each trial owns its generator.
fn trial_seed(seed: u64, t: usize) -> u64 {
    seed.wrapping_add(t as u64)
}

/// `(1/N) Σ_{i=s}^{s+N−1} f(x_{[i, i+ℓ)})` for `trials` independent
/// realisations, positions relative to the seed boundary.
pub fn birkhoff_average<F>(
    probs: &Probabilities,
    seed: u64,
    word_len: usize,
    f: F,
    n: usize,
    trials: usize,
    offset: i64,
) -> Vec<f64>
where
    F: Fn(&[Letter]) -> f64 + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rs = RandomSubst::new(probs.clone(), trial_seed(seed, t));
            let left = (-offset).max(0) as usize;
            let right = (offset + n as i64 + word_len as i64).max(0) as usize;
            let patch = rs.two_sided_patch(left, right);
            let o = patch.origin().expect("two-sided patch") as i64;
            let letters = patch.letters();
            let start = (o + offset) as usize;
            let total: f64 = (start..start + n).map(|i| f(&letters[i..i + word_len])).sum();
            total / n as f64
        })
        .collect()
}

/// Empirical frequency of `w` against `μ_m(Z_k(w))`.
pub fn birkhoff_check(
    probs: &Probabilities,
    seed: u64,
    w: &[Letter],
    n: usize,
    trials: usize,
    offset: i64,
) -> Result<BirkhoffReport> {
    if w.is_empty() || n == 0 || trials < 2 {
        return Err(Error::InvalidParameter("need a nonempty word, N ≥ 1 and at least two trials".into()));
    }
    let sys = build_induced(probs, w.len())?;
    let expected = match sys.cylinder_measure(w)? {
        CylinderValue::Legal(x) => x,
        CylinderValue::Illegal => 0.0,
    };
    let target = w.to_vec();
    let samples = birkhoff_average(
        probs,
        seed,
        w.len(),
        |x| if x == target.as_slice() { 1.0 } else { 0.0 },
        n,
        trials,
        offset,
    );
    let t = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / t;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (t - 1.0);
    let std_error = (var / t).sqrt();
    let deviation = (mean - expected).abs();
    let passed = if std_error > 0.0 { deviation < BIRKHOFF_SIGMA * std_error } else { deviation < 1e-12 };
    Ok(BirkhoffReport {
        word: letters_to_string(w),
        window: n,
        trials,
        offset,
        expected,
        mean,
        std_error,
        deviation,
        passed,
    })
}
