//! Direct exponential sums over finite patches.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::unit;
use crate::error::{Error, Result};
use crate::geometry::{letter_length, ControlPointSet};
use crate::ring::lambda;
use crate::subst::Letter;

/// `Σ_x exp(−2πikx)` over the right endpoints of the tiles of `letters`,
/// laid out from 0 with `|a| = λ`, `|b| = 1`.
pub fn right_endpoint_sum(letters: &[Letter], k: f64) -> Complex64 {
    let lam = lambda(1);
    let (mut na, mut nb) = (0u64, 0u64);
    letters
        .iter()
        .map(|l| {
            match l {
                Letter::A => na += 1,
                Letter::B => nb += 1,
            }
            unit((k * (nb as f64 + na as f64 * lam)).fract())
        })
        .sum()
}

/// One point of the single-sample spectrum.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct SpectrumSample {
    pub k: f64,
    /// `|S(k)|² / L`, comparable with the continuous density.
    pub intensity: f64,
    /// `|S(k)|² / L²`, comparable with Bragg amplitudes.
    pub pp_estimate: f64,
}

/// `S(k) = Σ_x exp(−2πikx)` over the control points of a patch of physical
/// length `L`. Meant for patches of at least `10⁴` points.
pub fn empirical_spectrum(ps: &ControlPointSet, kgrid: &[f64]) -> Result<Vec<SpectrumSample>> {
    let (Some(first), Some(last)) = (ps.coords.first(), ps.coords.last()) else {
        return Err(Error::InvalidParameter("empty patch".into()));
    };
    let end = *last + letter_length(ps.m, *ps.letters.last().expect("same length as coords"));
    let length = (end - *first).value();
    let xs: Vec<f64> = ps.coords.iter().map(|c| (*c - *first).value()).collect();
    Ok(kgrid
        .par_iter()
        .map(|&k| {
            let s: Complex64 = xs.iter().map(|&x| unit((k * x).fract())).sum();
            let power = s.norm_sqr();
            SpectrumSample { k, intensity: power / length, pp_estimate: power / (length * length) }
        })
        .collect())
}
