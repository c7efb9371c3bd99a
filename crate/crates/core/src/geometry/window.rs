//! Internal-space windows. Endpoints are kept as `star(num) / den` with
//! `num ∈ Z[λ_m]` and `den > 0`, so membership of lattice points is decided
//! exactly, including on the boundary.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::RingElt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Endpoint {
    pub num: RingElt,
    pub den: i128,
}

impl Endpoint {
    pub fn new(num: RingElt, den: i128) -> Self {
        assert!(den > 0, "endpoint denominator must be positive");
        Endpoint { num, den }
    }

    pub fn value(&self) -> f64 {
        self.num.star() / self.den as f64
    }

    pub fn cmp_endpoint(&self, other: &Endpoint) -> Ordering {
        (self.num.scale(other.den) - other.num.scale(self.den)).star_sign()
    }

    /// Exact order of `star(x)` relative to this endpoint.
    pub fn cmp_point(&self, x: &RingElt) -> Ordering {
        (x.scale(self.den) - self.num).star_sign()
    }
}

/// Two-letter seed `left|right` selecting a singular window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Seed {
    AA,
    AB,
    BA,
}

impl std::str::FromStr for Seed {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a|a" | "aa" => Ok(Seed::AA),
            "a|b" | "ab" => Ok(Seed::AB),
            "b|a" | "ba" => Ok(Seed::BA),
            _ => Err(Error::InvalidParameter(format!("unknown seed {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowKind {
    Generic,
    /// `i = 0`
    SingularLeft,
    /// `i = m`
    SingularRight,
    Super,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub kind: WindowKind,
    pub m: u32,
    pub i: Option<u32>,
    pub seed: Option<Seed>,
    pub lo: Endpoint,
    pub hi: Endpoint,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Window {
    pub fn lo_value(&self) -> f64 {
        self.lo.value()
    }

    pub fn hi_value(&self) -> f64 {
        self.hi.value()
    }

    pub fn width(&self) -> f64 {
        self.hi_value() - self.lo_value()
    }

    /// Exact membership of `star(x)`, honouring open and closed ends.
    pub fn contains(&self, x: &RingElt) -> bool {
        let above = match self.lo.cmp_point(x) {
            Ordering::Greater => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Less => false,
        };
        let below = match self.hi.cmp_point(x) {
            Ordering::Less => true,
            Ordering::Equal => self.hi_closed,
            Ordering::Greater => false,
        };
        above && below
    }

    pub fn closure(&self) -> Window {
        Window { lo_closed: true, hi_closed: true, ..self.clone() }
    }

    /// Is `other` contained in the interior of `self` (strict at both ends)?
    pub fn strictly_contains(&self, other: &Window) -> bool {
        self.lo.cmp_endpoint(&other.lo) == Ordering::Less && other.hi.cmp_endpoint(&self.hi) == Ordering::Less
    }
}

/// `W_{m,i}`. Generic windows are `iτ_m + [λ'_m, 1]` with
/// `τ_m = −(λ'_m + 1)/m`; the singular ones (`i = 0, m`) are half-open and
/// depend on the legal two-letter seed.
pub fn window(m: u32, i: u32, seed: Option<Seed>) -> Result<Window> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    if i > m {
        return Err(Error::InvalidParameter(format!("window index {i} > m = {m}")));
    }
    let mi = m as i128;
    let ii = i as i128;
    // star((−i + (m−i)λ)/m) = iτ + λ',  star((m−i − iλ)/m) = iτ + 1
    let lo = Endpoint::new(RingElt::new(-ii, mi - ii, m), mi);
    let hi = Endpoint::new(RingElt::new(mi - ii, -ii, m), mi);
    let (kind, lo_closed, hi_closed) = if i == 0 {
        match seed {
            Some(Seed::AA) => (WindowKind::SingularLeft, true, false),
            Some(Seed::AB) => (WindowKind::SingularLeft, false, true),
            _ => return Err(Error::InvalidParameter("W_{m,0} needs seed a|a or a|b".into())),
        }
    } else if i == m {
        match seed {
            Some(Seed::AA) => (WindowKind::SingularRight, false, true),
            Some(Seed::BA) => (WindowKind::SingularRight, true, false),
            _ => return Err(Error::InvalidParameter("W_{m,m} needs seed a|a or b|a".into())),
        }
    } else {
        (WindowKind::Generic, true, true)
    };
    Ok(Window {
        kind,
        m,
        i: Some(i),
        seed: if kind == WindowKind::Generic { None } else { seed },
        lo,
        hi,
        lo_closed,
        hi_closed,
    })
}

/// `W_m = [λ'_m − 1, 1 − λ'_m]`.
pub fn super_window(m: u32) -> Window {
    Window {
        kind: WindowKind::Super,
        m,
        i: None,
        seed: None,
        lo: Endpoint::new(RingElt::new(-1, 1, m), 1),
        hi: Endpoint::new(RingElt::new(1, -1, m), 1),
        lo_closed: true,
        hi_closed: true,
    }
}

/// All windows `W_{m,i}` (singular ones for every admissible seed), closed up.
pub fn all_windows(m: u32) -> Vec<Window> {
    let mut out = Vec::new();
    for i in 0..=m {
        let seeds: &[Seed] = if i == 0 {
            &[Seed::AA, Seed::AB]
        } else if i == m {
            &[Seed::AA, Seed::BA]
        } else {
            &[Seed::AA]
        };
        for &s in seeds {
            out.push(window(m, i, Some(s)).expect("admissible seed"));
        }
    }
    out
}

/// Checks `⋃_i W_{m,i} ⊊ W_m` with strict inequalities at both ends.
pub fn union_strictly_inside_super(m: u32) -> bool {
    let sup = super_window(m);
    all_windows(m).iter().all(|w| sup.strictly_contains(&w.closure()))
}
