//! Minimal double-double arithmetic (an unevaluated sum `hi + lo` of two
//! `f64`s, ~106 bits of mantissa). Used where a product of a moderately sized
//! integer with an irrational constant has to be reduced modulo one without
//! losing the fractional digits.

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    /// Exact conversion for |x| < 2^106; larger magnitudes lose low bits.
    pub fn from_i128(x: i128) -> Self {
        let hi = x as f64;
        let rest = x - hi as i128;
        let (hi, lo) = quick_two_sum(hi, rest as f64);
        DoubleDouble { hi, lo }
    }

    /// sqrt(n) to double-double accuracy (one Newton step on the f64 root).
    pub fn sqrt_u64(n: u64) -> Self {
        let s = (n as f64).sqrt();
        let residual = DoubleDouble::from_i128(n as i128).sub(DoubleDouble::from_f64(s).mul_f64(s));
        let corr = residual.hi / (2.0 * s);
        let (hi, lo) = quick_two_sum(s, corr);
        DoubleDouble { hi, lo }
    }

    pub fn add(self, other: Self) -> Self {
        let (s, e) = two_sum(self.hi, other.hi);
        let (t, f) = two_sum(self.lo, other.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }

    pub fn neg(self) -> Self {
        DoubleDouble { hi: -self.hi, lo: -self.lo }
    }

    pub fn sub(self, other: Self) -> Self {
        self.add(other.neg())
    }

    pub fn mul(self, other: Self) -> Self {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + (self.hi * other.lo + self.lo * other.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }

    /// Fractional part in [0, 1), rounded to f64.
    pub fn fract(self) -> f64 {
        let fl = self.hi.floor();
        let r = DoubleDouble { hi: self.hi - fl, lo: self.lo };
        let v = r.hi + r.lo;
        let v = v - v.floor();
        if v >= 1.0 {
            0.0
        } else {
            v
        }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt5_squares_back() {
        let s = DoubleDouble::sqrt_u64(5);
        let sq = s.mul(s);
        assert!((sq.hi - 5.0).abs() < 1e-15);
        assert!((sq.sub(DoubleDouble::from_f64(5.0))).to_f64().abs() < 1e-28);
    }

    #[test]
    fn fract_of_large_product_keeps_digits() {
        // 10^12 * sqrt(2) = 1414213562373.0950488016887...
        let s = DoubleDouble::sqrt_u64(2).mul_f64(1e12);
        assert!((s.fract() - 0.095_048_801_688_7).abs() < 1e-9);
    }

    #[test]
    fn i128_roundtrip() {
        let x: i128 = (1 << 80) + 12345;
        let d = DoubleDouble::from_i128(x);
        assert_eq!(d.hi as i128 + d.lo as i128, x);
    }
}
