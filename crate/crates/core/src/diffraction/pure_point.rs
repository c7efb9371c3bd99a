//! Bragg peaks on the Fourier module `Z[λ]/√5`, by the mean recursion and by
//! the iterated-function-system recursion for the Fourier transforms of the
//! internal-space densities `η_a`, `η_b`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::moments::means_from_phases;
use super::{require_fibonacci, unit};
use crate::error::{Error, Result};
use crate::ring::{lambda, lambda_conj, RingElt};
use crate::subst::Probabilities;

/// Cauchy tolerance over the last three iterates of `|E_n|²/L_n²`.
pub const PP_TOLERANCE: f64 = 1e-6;

/// The IFS recursion stops once `|k·ξ^n| < IFS_EPSILON`.
pub const IFS_EPSILON: f64 = 1e-8;

/// Default number of mean-recursion steps for a Bragg amplitude.
pub const DEFAULT_PP_STEPS: usize = 60;

/// `k = (p + qλ)/√5` together with its star image `k' = (p + qλ')/√5`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModulePoint {
    pub p: i128,
    pub q: i128,
    pub k: f64,
    pub k_star: f64,
}

impl ModulePoint {
    pub fn new(p: i128, q: i128) -> Self {
        let r = RingElt::new(p, q, 1);
        let s5 = 5f64.sqrt();
        ModulePoint { p, q, k: r.value() / s5, k_star: r.star() / s5 }
    }

    pub fn neg(&self) -> Self {
        ModulePoint::new(-self.p, -self.q)
    }

    /// `e_j = exp(−2πikλ^j) = exp(−2πik'λ'^j)` for `j = 0..=n`; exact
    /// because `kλ^j − k'λ'^j` is an integer.
    pub fn phases(&self, n: usize) -> Vec<Complex64> {
        let xi = lambda_conj(1);
        let mut t = self.k_star;
        (0..=n)
            .map(|_| {
                let z = unit(t);
                t *= xi;
                z
            })
            .collect()
    }
}

/// All module points with `|p|, |q| ≤ max_pq` and `|k| ≤ kmax`, sorted by `k`.
pub fn fourier_module_points(max_pq: i128, kmax: f64) -> Result<Vec<ModulePoint>> {
    if max_pq < 0 || kmax.is_nan() || kmax < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "module bounds must be non-negative, got max_pq = {max_pq}, kmax = {kmax}"
        )));
    }
    let mut out: Vec<ModulePoint> = (-max_pq..=max_pq)
        .flat_map(|p| (-max_pq..=max_pq).map(move |q| ModulePoint::new(p, q)))
        .filter(|pt| pt.k.abs() <= kmax)
        .collect();
    out.sort_by(|a, b| a.k.total_cmp(&b.k));
    Ok(out)
}

/// Bragg amplitude with its convergence report.
#[derive(Clone, Debug, Serialize)]
pub struct PurePointPeak {
    pub point: ModulePoint,
    pub amplitude: f64,
    pub steps: usize,
    /// Largest difference between consecutive values among the last three.
    pub cauchy: f64,
    pub converged: bool,
}

/// `|E_n(k)|² / λ^{2n}` at `n = steps`.
pub fn pp_amplitude(pt: &ModulePoint, steps: usize, probs: &Probabilities) -> Result<PurePointPeak> {
    let (p0, p1) = require_fibonacci(probs)?;
    if steps < 2 {
        return Err(Error::InvalidParameter(format!("need n ≥ 2, got {steps}")));
    }
    let means = means_from_phases(&pt.phases(steps), p0, p1);
    let lam = lambda(1);
    let values: Vec<f64> =
        means.iter().enumerate().map(|(j, e)| e.norm_sqr() / lam.powi(2 * j as i32)).collect();
    let tail = &values[steps - 2..];
    let cauchy = tail.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
    Ok(PurePointPeak {
        point: *pt,
        amplitude: values[steps],
        steps,
        cauchy,
        converged: cauchy <= PP_TOLERANCE,
    })
}

/// Bragg amplitudes on a list of module points.
#[derive(Clone, Debug, Serialize)]
pub struct PurePointTable {
    pub probs: Vec<f64>,
    pub steps: usize,
    pub peaks: Vec<PurePointPeak>,
}

pub fn pp_table(points: &[ModulePoint], steps: usize, probs: &Probabilities) -> Result<PurePointTable> {
    let peaks = points.par_iter().map(|pt| pp_amplitude(pt, steps, probs)).collect::<Result<Vec<_>>>()?;
    Ok(PurePointTable { probs: probs.as_slice().to_vec(), steps, peaks })
}

/// `(η̂_a(0), η̂_b(0)) = (1/√5, (λ−1)/√5)`, the right PF eigenvector of
/// `[[1, 1], [1, 0]]` normalised to the point density `λ/√5`.
pub fn eta_zero() -> [f64; 2] {
    let s5 = 5f64.sqrt();
    [1.0 / s5, (lambda(1) - 1.0) / s5]
}

/// Smallest `n ≥ 1` with `|κ·ξ^n| < eps`, `ξ = λ'`.
pub fn ifs_steps_for(kappa: f64, eps: f64) -> usize {
    let xi = lambda_conj(1).abs();
    let mut n = 1;
    let mut t = kappa.abs() * xi;
    while t >= eps {
        t *= xi;
        n += 1;
    }
    n
}

/// `(η̂_a(κ), η̂_b(κ)) = |ξ|^n ∏_{ℓ=1}^{n} (p₀A_ℓ(κ) + p₁B_ℓ(κ)) η̂(0)` with
/// `A_ℓ = [[e(κξ^{ℓ−1}), 1], [1, 0]]`, `B_ℓ = [[1, 1], [e(κξ^ℓ), 0]]` and
/// `e(t) = exp(−2πit)`; the tail `η̂(κξ^n)` is replaced by `η̂(0)`.
pub fn ifs_eta(kappa: f64, steps: usize, probs: &Probabilities) -> Result<[Complex64; 2]> {
    let (p0, p1) = require_fibonacci(probs)?;
    let xi = lambda_conj(1);
    let one = Complex64::new(1.0, 0.0);
    let mut prod = [[one, Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), one]];
    let mut t = kappa;
    for _ in 0..steps {
        let first = unit(t);
        t *= xi;
        let second = unit(t);
        let step = [[p0 * first + p1, one], [p0 + p1 * second, Complex64::new(0.0, 0.0)]];
        prod = [
            [
                prod[0][0] * step[0][0] + prod[0][1] * step[1][0],
                prod[0][0] * step[0][1] + prod[0][1] * step[1][1],
            ],
            [
                prod[1][0] * step[0][0] + prod[1][1] * step[1][0],
                prod[1][0] * step[0][1] + prod[1][1] * step[1][1],
            ],
        ];
    }
    let scale = xi.abs().powi(steps as i32);
    let [ea, eb] = eta_zero();
    Ok([(prod[0][0] * ea + prod[0][1] * eb) * scale, (prod[1][0] * ea + prod[1][1] * eb) * scale])
}

/// `|η̂_a(−k') + η̂_b(−k')|²`; `steps = None` picks the count from [`IFS_EPSILON`].
pub fn ifs_pp(pt: &ModulePoint, steps: Option<usize>, probs: &Probabilities) -> Result<f64> {
    let kappa = -pt.k_star;
    let n = steps.unwrap_or_else(|| ifs_steps_for(kappa, IFS_EPSILON));
    let [a, b] = ifs_eta(kappa, n, probs)?;
    Ok((a + b).norm_sqr())
}

/// Bragg amplitude of the deterministic Fibonacci model set: window of
/// length `λ`, density `λ/√5`, so `(λ²/5)·sinc²(πk'λ)`.
pub fn model_set_amplitude(pt: &ModulePoint) -> f64 {
    let lam = lambda(1);
    let x = std::f64::consts::PI * pt.k_star * lam;
    let sinc = if x == 0.0 { 1.0 } else { x.sin() / x };
    lam * lam / 5.0 * sinc * sinc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform() -> Probabilities {
        Probabilities::uniform(1)
    }

    #[test]
    fn module_points() {
        let pts = fourier_module_points(3, 3.0).unwrap();
        assert!(pts.iter().any(|p| p.p == 0 && p.q == 0 && p.k == 0.0));
        let one = ModulePoint::new(1, 0);
        assert!((one.k - 0.447_213_595_5).abs() < 1e-10);
        for pt in &pts {
            assert!(pts.iter().any(|o| o.p == -pt.p && o.q == -pt.q));
            assert!(pt.k.abs() <= 3.0);
        }
        assert!(pts.windows(2).all(|w| w[0].k <= w[1].k));
        assert!(fourier_module_points(-1, 1.0).is_err());
        // conjugate identity k − k' = q
        for pt in &pts {
            assert!((pt.k - pt.k_star - pt.q as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn eta_zero_is_eigenvector() {
        let [a, b] = eta_zero();
        let lam = lambda(1);
        assert!((a + b - lam / 5f64.sqrt()).abs() < 1e-15);
        assert!((a + b - lam * a).abs() < 1e-15);
        assert!((a - lam * b).abs() < 1e-15);
    }

    #[test]
    fn origin_amplitude_is_density_squared() {
        let lam = lambda(1);
        for probs in [uniform(), Probabilities::new(vec![0.0, 1.0]).unwrap()] {
            let pk = pp_amplitude(&ModulePoint::new(0, 0), DEFAULT_PP_STEPS, &probs).unwrap();
            assert!(pk.converged);
            assert!((pk.amplitude - lam * lam / 5.0).abs() < 1e-12);
            let ifs = ifs_pp(&ModulePoint::new(0, 0), None, &probs).unwrap();
            assert!((ifs - lam * lam / 5.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_routes_agree() {
        for probs in [vec![0.5, 0.5], vec![0.0, 1.0], vec![0.3, 0.7]] {
            let probs = Probabilities::new(probs).unwrap();
            for pt in fourier_module_points(4, 3.0).unwrap() {
                let rec = pp_amplitude(&pt, DEFAULT_PP_STEPS, &probs).unwrap();
                let ifs = ifs_pp(&pt, None, &probs).unwrap();
                assert!(rec.converged, "{pt:?}");
                assert!(
                    (rec.amplitude - ifs).abs() <= 1e-9 + 1e-6 * ifs,
                    "{pt:?}: {} vs {ifs}",
                    rec.amplitude
                );
            }
        }
    }

    #[test]
    fn known_values() {
        let pt = ModulePoint::new(1, 0);
        let a = pp_amplitude(&pt, DEFAULT_PP_STEPS, &uniform()).unwrap().amplitude;
        assert!((a - 0.015_195_2).abs() < 1e-6, "{a}");
        let det = Probabilities::new(vec![0.0, 1.0]).unwrap();
        let a = pp_amplitude(&pt, DEFAULT_PP_STEPS, &det).unwrap().amplitude;
        assert!((a - 0.059_023_4).abs() < 1e-6, "{a}");
        let a = pp_amplitude(&ModulePoint::new(1, 1), DEFAULT_PP_STEPS, &uniform()).unwrap().amplitude;
        assert!((a - 0.337_77).abs() < 1e-4, "{a}");
    }

    #[test]
    fn deterministic_matches_model_set() {
        for probs in [vec![0.0, 1.0], vec![1.0, 0.0]] {
            let probs = Probabilities::new(probs).unwrap();
            for pt in fourier_module_points(5, 3.0).unwrap() {
                let a = pp_amplitude(&pt, DEFAULT_PP_STEPS, &probs).unwrap().amplitude;
                assert!((a - model_set_amplitude(&pt)).abs() < 1e-9, "{pt:?}");
            }
        }
    }

    #[test]
    fn symmetric_under_negation() {
        let probs = Probabilities::new(vec![0.3, 0.7]).unwrap();
        for pt in fourier_module_points(4, 2.0).unwrap() {
            let a = pp_amplitude(&pt, DEFAULT_PP_STEPS, &probs).unwrap().amplitude;
            let b = pp_amplitude(&pt.neg(), DEFAULT_PP_STEPS, &probs).unwrap().amplitude;
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn generic_wavenumber_has_no_peak() {
        // with a non-module k the normalised mean decays
        let k = 2f64.sqrt() / 3.0;
        let m = super::super::mean_recursion(k, 60, &uniform()).unwrap();
        let lam = lambda(1);
        let amp = |n: usize| m.values[n].norm_sqr() / lam.powi(2 * n as i32);
        assert!(amp(60) < 1e-6, "{}", amp(60));
        assert!(amp(60) < amp(20));
    }

    #[test]
    fn ifs_step_count() {
        assert_eq!(ifs_steps_for(0.0, 1e-8), 1);
        let n = ifs_steps_for(10.0, 1e-8);
        let xi = lambda_conj(1).abs();
        assert!(10.0 * xi.powi(n as i32) < 1e-8);
        assert!(10.0 * xi.powi(n as i32 - 1) >= 1e-8);
    }
}
