//! Exact arithmetic in the quadratic ring `Z[λ_m]`, where `λ_m` is the
//! positive root of `x² = m·x + 1`, together with the star map `λ_m ↦ λ'_m`
//! into internal space.
//!
//! Coefficients are `i128`. Control points of a word with `N` letters have
//! coefficients bounded by `N`, so realisations with billions of letters are
//! still far from overflow. Floating-point evaluation is always an explicit,
//! separate step (`value`, `star`).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::dd::DoubleDouble;
use crate::error::Error;

/// Inflation multiplier `λ_m = (m + √(m²+4)) / 2`.
pub fn lambda(m: u32) -> f64 {
    let m = m as f64;
    (m + (m * m + 4.0).sqrt()) / 2.0
}

/// Algebraic conjugate `λ'_m = (m − √(m²+4)) / 2 = −1/λ_m`.
pub fn lambda_conj(m: u32) -> f64 {
    -1.0 / lambda(m)
}

/// Discriminant `m² + 4` of the minimal polynomial.
pub fn discriminant(m: u32) -> i128 {
    let m = m as i128;
    m * m + 4
}

pub(crate) fn lambda_dd(m: u32) -> DoubleDouble {
    DoubleDouble::sqrt_u64(discriminant(m) as u64).add(DoubleDouble::from_f64(m as f64)).mul_f64(0.5)
}

pub(crate) fn lambda_conj_dd(m: u32) -> DoubleDouble {
    DoubleDouble::from_f64(m as f64).sub(DoubleDouble::sqrt_u64(discriminant(m) as u64)).mul_f64(0.5)
}

/// Sign of `u + v·√d` for integers `u, v` and non-square `d > 0`.
pub(crate) fn surd_sign(u: i128, v: i128, d: i128) -> Ordering {
    let su = u.cmp(&0);
    let sv = v.cmp(&0);
    if sv == Ordering::Equal {
        return su;
    }
    if su == Ordering::Equal || su == sv {
        return sv;
    }
    let u2 = u.checked_mul(u).expect("ring coefficient overflow");
    let v2d = v.checked_mul(v).and_then(|x| x.checked_mul(d)).expect("ring coefficient overflow");
    // Opposite signs: the larger magnitude wins.
    match u2.cmp(&v2d) {
        Ordering::Greater => su,
        Ordering::Less => sv,
        Ordering::Equal => unreachable!("d is not a perfect square"),
    }
}

/// An element `p + q·λ_m` of `Z[λ_m]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingElt {
    pub p: i128,
    pub q: i128,
    pub m: u32,
}

impl RingElt {
    pub const fn new(p: i128, q: i128, m: u32) -> Self {
        RingElt { p, q, m }
    }

    pub const fn zero(m: u32) -> Self {
        RingElt::new(0, 0, m)
    }

    pub const fn one(m: u32) -> Self {
        RingElt::new(1, 0, m)
    }

    /// The generator `λ_m` itself.
    pub const fn lambda(m: u32) -> Self {
        RingElt::new(0, 1, m)
    }

    pub fn is_zero(&self) -> bool {
        self.p == 0 && self.q == 0
    }

    fn check_family(&self, other: &RingElt) -> Result<(), Error> {
        if self.m == other.m {
            Ok(())
        } else {
            Err(Error::FamilyMismatch { left: self.m, right: other.m })
        }
    }

    pub fn checked_add(&self, other: &RingElt) -> Result<RingElt, Error> {
        self.check_family(other)?;
        Ok(RingElt::new(self.p + other.p, self.q + other.q, self.m))
    }

    pub fn checked_sub(&self, other: &RingElt) -> Result<RingElt, Error> {
        self.check_family(other)?;
        Ok(RingElt::new(self.p - other.p, self.q - other.q, self.m))
    }

    /// `(p₁+q₁λ)(p₂+q₂λ) = (p₁p₂ + q₁q₂) + (p₁q₂ + q₁p₂ + m·q₁q₂)λ`.
    pub fn checked_mul(&self, other: &RingElt) -> Result<RingElt, Error> {
        self.check_family(other)?;
        let m = self.m as i128;
        let qq = self.q * other.q;
        Ok(RingElt::new(self.p * other.p + qq, self.p * other.q + self.q * other.p + m * qq, self.m))
    }

    pub fn scale(&self, k: i128) -> RingElt {
        RingElt::new(self.p * k, self.q * k, self.m)
    }

    /// `self^n` by repeated squaring.
    pub fn pow(&self, mut n: u32) -> RingElt {
        let mut base = *self;
        let mut acc = RingElt::one(self.m);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }

    /// Algebraic conjugate as a ring element: `p + q·λ' = (p + m·q) − q·λ`.
    pub fn conjugate(&self) -> RingElt {
        RingElt::new(self.p + self.m as i128 * self.q, -self.q, self.m)
    }

    /// Physical-space position `p + q·λ_m` (lossy).
    pub fn value(&self) -> f64 {
        DoubleDouble::from_i128(self.q).mul(lambda_dd(self.m)).add(DoubleDouble::from_i128(self.p)).to_f64()
    }

    /// Internal-space position `p + q·λ'_m` (lossy). Evaluated in
    /// double-double so the cancellation between `p` and `q·λ'` for large
    /// coefficients does not eat the result.
    pub fn star(&self) -> f64 {
        DoubleDouble::from_i128(self.q)
            .mul(lambda_conj_dd(self.m))
            .add(DoubleDouble::from_i128(self.p))
            .to_f64()
    }

    /// Exact sign of `value()`.
    pub fn value_sign(&self) -> Ordering {
        let m = self.m as i128;
        surd_sign(2 * self.p + m * self.q, self.q, discriminant(self.m))
    }

    /// Exact sign of `star()`.
    pub fn star_sign(&self) -> Ordering {
        let m = self.m as i128;
        surd_sign(2 * self.p + m * self.q, -self.q, discriminant(self.m))
    }

    /// Exact comparison of `value()`.
    pub fn cmp_value(&self, other: &RingElt) -> Ordering {
        (*self - *other).value_sign()
    }

    /// Exact comparison of `star()`.
    pub fn cmp_star(&self, other: &RingElt) -> Ordering {
        (*self - *other).star_sign()
    }

    pub fn to_lattice_point(&self) -> LatticePoint {
        LatticePoint::from(*self)
    }
}

impl fmt::Display for RingElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}λ{}", self.p, self.q, self.m)
    }
}

impl Add for RingElt {
    type Output = RingElt;
    fn add(self, rhs: RingElt) -> RingElt {
        self.checked_add(&rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub for RingElt {
    type Output = RingElt;
    fn sub(self, rhs: RingElt) -> RingElt {
        self.checked_sub(&rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Mul for RingElt {
    type Output = RingElt;
    fn mul(self, rhs: RingElt) -> RingElt {
        self.checked_mul(&rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for RingElt {
    type Output = RingElt;
    fn neg(self) -> RingElt {
        RingElt::new(-self.p, -self.q, self.m)
    }
}

/// A point `(x, x')` of the lattice `L_m = {(x, x⋆) : x ∈ Z[λ_m]}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticePoint {
    pub physical: f64,
    pub internal: f64,
    pub source: RingElt,
}

impl From<RingElt> for LatticePoint {
    fn from(source: RingElt) -> Self {
        LatticePoint { physical: source.value(), internal: source.star(), source }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn add_examples() {
        let x = RingElt::new(1, 0, 1) + RingElt::new(0, 1, 1);
        assert_eq!(x, RingElt::new(1, 1, 1));
        let y = RingElt::new(7, -3, 2);
        assert_eq!(RingElt::zero(2) + y, y);
        // 1 + λ₁ = 1 + (1+√5)/2
        assert!((x.value() - (1.0 + (1.0 + 5f64.sqrt()) / 2.0)).abs() < 1e-12);
        assert!((x.value() - 2.6180).abs() < 1e-4);
    }

    #[test]
    fn family_mismatch_is_an_error() {
        let e = RingElt::one(1).checked_add(&RingElt::one(2)).unwrap_err();
        assert!(matches!(e, Error::FamilyMismatch { left: 1, right: 2 }));
        assert!(RingElt::one(3).checked_mul(&RingElt::one(1)).is_err());
    }

    #[test]
    fn minimal_polynomial() {
        let l1 = RingElt::lambda(1);
        assert_eq!(l1 * l1, RingElt::new(1, 1, 1));
        let l2 = RingElt::lambda(2);
        assert_eq!(l2 * l2, RingElt::new(1, 2, 2));
    }

    #[test]
    fn star_examples() {
        let s = RingElt::lambda(1).star();
        assert!((s - (1.0 - 5f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!((s + 0.6180).abs() < 1e-4);
        assert_eq!(RingElt::one(4).star(), 1.0);
        for m in 1..20 {
            assert!(lambda_conj(m).abs() < 1.0);
        }
    }

    #[test]
    fn star_of_powers_matches_conjugate_powers() {
        for m in 1..=4 {
            let l = RingElt::lambda(m);
            let lc = lambda_conj(m);
            let mut acc = RingElt::one(m);
            for n in 0..=12 {
                assert_eq!(acc, l.pow(n));
                let expect = lc.powi(n as i32);
                assert!((acc.star() - expect).abs() < 1e-12, "m={m} n={n}");
                acc = acc * l;
            }
        }
    }

    #[test]
    fn conjugate_pair_identities() {
        for m in 1..=30 {
            let (l, lc) = (lambda(m), lambda_conj(m));
            assert!((l * lc + 1.0).abs() < 1e-12);
            assert!((l + lc - m as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn powers_agree_with_float_powers() {
        for m in 1..=5 {
            let l = lambda(m);
            for n in 0..=30 {
                let exact = RingElt::lambda(m).pow(n).value();
                let float = l.powi(n as i32);
                assert!(((exact - float) / float).abs() < 1e-9, "m={m} n={n}");
            }
        }
    }

    #[test]
    fn exact_signs_on_grid() {
        for m in 1..=4 {
            for p in -6..=6 {
                for q in -6..=6 {
                    let x = RingElt::new(p, q, m);
                    let v = x.value();
                    let s = x.star();
                    if v.abs() > 1e-9 {
                        assert_eq!(x.value_sign(), v.partial_cmp(&0.0).unwrap());
                    }
                    if s.abs() > 1e-9 {
                        assert_eq!(x.star_sign(), s.partial_cmp(&0.0).unwrap());
                    }
                    if p == 0 && q == 0 {
                        assert_eq!(x.star_sign(), Ordering::Equal);
                    }
                }
            }
        }
    }

    #[test]
    fn star_is_accurate_for_large_coefficients() {
        // λ₁^60 = F59 + F60·λ; its star is λ'^60, about 3e-13.
        let x = RingElt::lambda(1).pow(60);
        let expect = lambda_conj(1).powi(60);
        assert!(((x.star() - expect) / expect).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn star_mul_homomorphism(p1 in -500i128..500, q1 in -500i128..500,
                                 p2 in -500i128..500, q2 in -500i128..500, m in 1u32..5) {
            let x = RingElt::new(p1, q1, m);
            let y = RingElt::new(p2, q2, m);
            let lhs = (x * y).star();
            let rhs = x.star() * y.star();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
            let lv = (x * y).value();
            prop_assert!((lv - x.value() * y.value()).abs() <= 1e-9 * (1.0 + lv.abs()));
            prop_assert!(((x + y).star() - (x.star() + y.star())).abs() <= 1e-9);
            prop_assert!(((x + y).value() - (x.value() + y.value())).abs() <= 1e-9);
            prop_assert_eq!((x * y).conjugate(), x.conjugate() * y.conjugate());
        }

        #[test]
        fn exact_star_order_matches_float(p in -10_000i128..10_000, q in -10_000i128..10_000, m in 1u32..4) {
            let x = RingElt::new(p, q, m);
            let s = x.star();
            if s.abs() > 1e-6 {
                prop_assert_eq!(x.star_sign(), s.partial_cmp(&0.0).unwrap());
            }
        }
    }
}
