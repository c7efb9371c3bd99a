//! Diffraction of the random Fibonacci (`m = 1`) family.
//!
//! `X_n(k) = Σ_x exp(−2πikx)` sums over the right endpoints of the tiles of a
//! random realisation of `ζ^n(b)` placed with its left end at 0 (`a` has
//! length `λ`, `b` length 1). Because `ζ^n(b)` is the concatenation of two
//! independent smaller realisations (`X_{n−2}` then `X_{n−1}` for rule 0,
//! the reverse for rule 1), mean and variance obey exact two-term
//! recursions. With `L_n = λ^n`:
//!
//! * pure point part: `γ̂({k}) = lim |E X_n(k)|² / L_n²` on the Fourier module
//!   `Z[λ]/√5`, independently reproduced by an iterated-function-system
//!   recursion ([`ifs_pp`]);
//! * absolutely continuous part: `φ(k) = lim V(X_n(k)) / L_n`.
//!
//! The phases `e_j = exp(−2πikλ^j)` are reduced modulo one before
//! exponentiation: exactly via the conjugate for module points, and in
//! double-double arithmetic from exact powers of `λ` for arbitrary `k`.

mod empirical;
mod moments;
mod pure_point;

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use serde::Serialize;

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::ring::{lambda_dd, RingElt};
use crate::subst::Probabilities;

pub use empirical::{empirical_spectrum, right_endpoint_sum, SpectrumSample};
pub use moments::{
    ac_density, mean_recursion, monte_carlo_moments, variance_sequence, AcDensity, MeanSequence,
    MonteCarloMoments, VarianceSequence, DEFAULT_AC_TRUNCATION,
};
pub use pure_point::{
    eta_zero, fourier_module_points, ifs_eta, ifs_pp, ifs_steps_for, model_set_amplitude, pp_amplitude,
    pp_table, ModulePoint, PurePointPeak, PurePointTable, DEFAULT_PP_STEPS, IFS_EPSILON, PP_TOLERANCE,
};

/// Largest exponent `j` for which `k·λ^j mod 1` is computed for a general
/// real `k`; beyond it double-double accuracy is no longer sufficient.
pub const MAX_REAL_PHASE_EXPONENT: usize = 100;

/// The only family covered here.
pub(crate) fn require_fibonacci(probs: &Probabilities) -> Result<(f64, f64)> {
    if probs.m() != 1 {
        return Err(Error::InvalidParameter(format!(
            "diffraction is implemented for m = 1 only, got m = {}",
            probs.m()
        )));
    }
    Ok((probs.get(0), probs.get(1)))
}

/// `exp(−2πi·t)` for a phase already reduced modulo one.
pub(crate) fn unit(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, -2.0 * PI * t)
}

/// `e_j = exp(−2πikλ^j)` for `j = 0..=n` and arbitrary real `k`.
pub fn phases_real(k: f64, n: usize) -> Result<Vec<Complex64>> {
    if n > MAX_REAL_PHASE_EXPONENT {
        return Err(Error::InvalidParameter(format!("phase exponent {n} exceeds {MAX_REAL_PHASE_EXPONENT}")));
    }
    let kd = DoubleDouble::from_f64(k);
    let lam = lambda_dd(1);
    let mut power = RingElt::one(1);
    let mut out = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        let t = kd
            .mul(DoubleDouble::from_i128(power.p))
            .add(kd.mul(DoubleDouble::from_i128(power.q)).mul(lam))
            .fract();
        out.push(unit(t));
        power = power * RingElt::lambda(1);
    }
    Ok(out)
}

/// Uniform grid `lo, lo+step, …` up to and including `hi` (within rounding).
pub fn uniform_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !step.is_finite() || step <= 0.0 || !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(Error::InvalidParameter(format!("bad grid [{lo}, {hi}] with step {step}")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|j| lo + j as f64 * step).collect())
}

/// JSON document combining both spectral parts.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumDocument {
    pub probs: Vec<f64>,
    pub point_density: f64,
    pub ac: Option<AcDensity>,
    pub pp: Option<PurePointTable>,
}

impl AcDensity {
    /// `k,phi` rows with a header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "k,phi")?;
        for (k, phi) in self.kgrid.iter().zip(&self.phi) {
            writeln!(out, "{k},{phi}")?;
        }
        Ok(())
    }
}

impl PurePointTable {
    /// `k,amplitude,p,q` rows with a header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "k,amplitude,p,q")?;
        for e in &self.peaks {
            writeln!(out, "{},{},{},{}", e.point.k, e.amplitude, e.point.p, e.point.q)?;
        }
        Ok(())
    }
}
