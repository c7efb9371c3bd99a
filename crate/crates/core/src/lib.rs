//! Random noble means substitutions.
//!
//! For each `m ≥ 1` the noble means family consists of the rules
//! `ζ_{m,i}: a ↦ a^i b a^{m−i}, b ↦ a` (`0 ≤ i ≤ m`). Their local random
//! mixture `ζ_m` picks rule `i` independently for each `a` with probability
//! `p_i`. This crate provides
//!
//! * [`ring`]: exact arithmetic in `Z[λ_m]` and the star map,
//! * [`subst`]: words, the deterministic and random rules, legal words,
//! * [`exact`]: exact words by concatenation and the topological entropy,
//! * [`measure`]: induced substitutions and Perron–Frobenius word frequencies,
//! * [`geometry`]: control-point sets, windows and internal-space lifts,
//! * [`diffraction`]: pure point and absolutely continuous spectrum for `m = 1`.

mod dd;
pub mod diffraction;
pub mod error;
pub mod exact;
pub mod geometry;
pub mod measure;
pub mod ring;
pub mod subst;

pub use error::{Error, Result};
pub use ring::{LatticePoint, RingElt};
pub use subst::{Letter, NmsRule, Probabilities, RandomSubst, Word};
