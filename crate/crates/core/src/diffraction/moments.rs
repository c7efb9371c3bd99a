//! First and second moments of `X_n(k)` and the absolutely continuous density.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{phases_real, require_fibonacci, right_endpoint_sum, MAX_REAL_PHASE_EXPONENT};
use crate::error::{Error, Result};
use crate::ring::lambda;
use crate::subst::{Letter, Probabilities, RandomSubst, Word};

/// Series length used when no truncation is requested; the tail is then far
/// below `1e−8` for any bounded `Ψ`.
pub const DEFAULT_AC_TRUNCATION: usize = 80;

/// `E_0 = e_0`, `E_1 = e_1` and
/// `E_n = (p₁ + p₀e_{n−2})E_{n−1} + (p₀ + p₁e_{n−1})E_{n−2}`.
pub(crate) fn means_from_phases(e: &[Complex64], p0: f64, p1: f64) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = e.iter().take(2).copied().collect();
    for n in 2..e.len() {
        let next = (p1 + p0 * e[n - 2]) * out[n - 1] + (p0 + p1 * e[n - 1]) * out[n - 2];
        out.push(next);
    }
    out
}

/// `Ψ_n = ½|(1 − e_{n−2})E_{n−1} − (1 − e_{n−1})E_{n−2}|²`; zero for `n < 2`.
pub(crate) fn psi_from(e: &[Complex64], means: &[Complex64]) -> Vec<f64> {
    (0..means.len())
        .map(|n| {
            if n < 2 {
                0.0
            } else {
                let d = (1.0 - e[n - 2]) * means[n - 1] - (1.0 - e[n - 1]) * means[n - 2];
                0.5 * d.norm_sqr()
            }
        })
        .collect()
}

/// Mean sequence `E_j = E X_j(k)` for `j = 0..=n`.
#[derive(Clone, Debug, Serialize)]
pub struct MeanSequence {
    pub k: f64,
    /// `e_j = exp(−2πikλ^j)`.
    pub phases: Vec<Complex64>,
    pub values: Vec<Complex64>,
}

pub fn mean_recursion(k: f64, n: usize, probs: &Probabilities) -> Result<MeanSequence> {
    let (p0, p1) = require_fibonacci(probs)?;
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n ≥ 2, got {n}")));
    }
    let phases = phases_real(k, n)?;
    let values = means_from_phases(&phases, p0, p1);
    Ok(MeanSequence { k, phases, values })
}

/// Second moments and variances of `X_j(k)` for `j = 0..=n`.
///
/// Within a branch the two concatenated factors are independent and the
/// phase factor has modulus one, so the conditional variance is
/// `V_{n−1} + V_{n−2}`; the spread of the two branch means adds
/// `p₀p₁|μ₀ − μ₁|² = 2p₀p₁Ψ_n`. The variance is accumulated through this
/// recursion rather than as `E|X|² − |EX|²`, which would cancel
/// catastrophically near Bragg peaks.
#[derive(Clone, Debug, Serialize)]
pub struct VarianceSequence {
    pub k: f64,
    pub second_moment: Vec<f64>,
    pub variance: Vec<f64>,
    pub psi: Vec<f64>,
    /// `φ_j = V_j / λ^j`.
    pub phi: Vec<f64>,
}

pub fn variance_sequence(k: f64, n: usize, probs: &Probabilities) -> Result<VarianceSequence> {
    let (p0, p1) = require_fibonacci(probs)?;
    let mean = mean_recursion(k, n, probs)?;
    let psi = psi_from(&mean.phases, &mean.values);
    let mut variance = vec![0.0, 0.0];
    for j in 2..=n {
        variance.push(variance[j - 1] + variance[j - 2] + 2.0 * p0 * p1 * psi[j]);
    }
    let second_moment = variance.iter().zip(&mean.values).map(|(v, e)| v + e.norm_sqr()).collect();
    let lam = lambda(1);
    let phi = variance.iter().enumerate().map(|(j, v)| v / lam.powi(j as i32)).collect();
    Ok(VarianceSequence { k, second_moment, variance, psi, phi })
}

/// `φ(k) = (2p₀p₁λ/√5) Σ_{i=2}^{T} λ^{−i} Ψ_i(k)` on a grid.
#[derive(Clone, Debug, Serialize)]
pub struct AcDensity {
    pub probs: Vec<f64>,
    pub kgrid: Vec<f64>,
    pub phi: Vec<f64>,
    pub truncation: usize,
    pub prefactor: f64,
    /// Largest per-point tail estimate `prefactor · Ψ* · λ^{−T}/(λ−1)` with
    /// `Ψ*` the largest of the last five computed `Ψ_i` (a numerical, not a
    /// proven, bound on `Ψ`).
    pub tail_estimate: f64,
    /// `Ψ_i(k)` for `i = 0..=T`, per grid point.
    #[serde(skip)]
    pub psi: Vec<Vec<f64>>,
}

pub fn ac_density(kgrid: &[f64], truncation: usize, probs: &Probabilities) -> Result<AcDensity> {
    let (p0, p1) = require_fibonacci(probs)?;
    if !(3..=MAX_REAL_PHASE_EXPONENT).contains(&truncation) {
        return Err(Error::InvalidParameter(format!(
            "truncation must lie in 3..={MAX_REAL_PHASE_EXPONENT}, got {truncation}"
        )));
    }
    let lam = lambda(1);
    let prefactor = 2.0 * p0 * p1 * lam / 5f64.sqrt();
    let rows: Vec<(f64, f64, Vec<f64>)> = kgrid
        .par_iter()
        .map(|&k| {
            let e = phases_real(k, truncation).expect("truncation checked above");
            let psi = psi_from(&e, &means_from_phases(&e, p0, p1));
            let series: f64 = (2..=truncation).map(|i| psi[i] / lam.powi(i as i32)).sum();
            let recent = psi[truncation.saturating_sub(4).max(2)..].iter().copied().fold(0.0, f64::max);
            let tail = prefactor * recent / lam.powi(truncation as i32) / (lam - 1.0);
            (prefactor * series, tail, psi)
        })
        .collect();
    let tail_estimate = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let (phi, psi) = rows.into_iter().map(|(f, _, p)| (f, p)).unzip();
    Ok(AcDensity {
        probs: probs.as_slice().to_vec(),
        kgrid: kgrid.to_vec(),
        phi,
        truncation,
        prefactor,
        tail_estimate,
        psi,
    })
}

/// Sample statistics of `X_n(k)` over independent realisations.
#[derive(Clone, Debug, Serialize)]
pub struct MonteCarloMoments {
    pub k: f64,
    pub n: usize,
    pub samples: usize,
    pub mean: Complex64,
    /// Unbiased estimate of `E|X − EX|²`.
    pub variance: f64,
    /// Standard error of `variance`.
    pub variance_std_error: f64,
}

const MC_CHUNK: usize = 1000;

/// Monte-Carlo oracle for the moment recursions: realisations of `ζ^n(b)`
/// are drawn letter by letter (chunk `c` uses seed `seed + c`) and summed
/// over their right tile endpoints.
pub fn monte_carlo_moments(
    k: f64,
    n: usize,
    probs: &Probabilities,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloMoments> {
    require_fibonacci(probs)?;
    if samples < 2 {
        return Err(Error::InvalidParameter("need at least two samples".into()));
    }
    let start = Word::new(vec![Letter::B]);
    let chunks = samples.div_ceil(MC_CHUNK);
    let xs: Vec<Complex64> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rs = RandomSubst::new(probs.clone(), seed.wrapping_add(c as u64));
            let count = MC_CHUNK.min(samples - c * MC_CHUNK);
            let start = start.clone();
            (0..count)
                .map(move |_| right_endpoint_sum(rs.iterate(&start, n).letters(), k))
                .collect::<Vec<_>>()
        })
        .collect();
    let count = xs.len() as f64;
    let mean = xs.iter().sum::<Complex64>() / count;
    let dev2: Vec<f64> = xs.iter().map(|x| (x - mean).norm_sqr()).collect();
    let variance = dev2.iter().sum::<f64>() / (count - 1.0);
    // Var(s²) = (μ₄ − (N−3)/(N−1)·σ⁴)/N; keeps a non-zero error even for
    // two-point laws, where μ₄ = σ⁴ and the first-order term vanishes.
    let fourth = dev2.iter().map(|d| d * d).sum::<f64>() / count;
    let sigma4 = variance * variance;
    let variance_std_error = ((fourth - (count - 3.0) / (count - 1.0) * sigma4).max(0.0) / count).sqrt();
    Ok(MonteCarloMoments { k, n, samples, mean, variance, variance_std_error })
}
