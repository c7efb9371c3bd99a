//! Geometric realisation of words inside the cut-and-project scheme
//! `(R, R, L_m)` with `L_m = {(x, x⋆) : x ∈ Z[λ_m]}`.
//!
//! Letter `a` is an interval of length `λ_m`, `b` one of length 1; the left
//! endpoints are the control points. Coordinates are exact ring elements.

mod window;

use std::collections::HashSet;
use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ring::{LatticePoint, RingElt};
use crate::subst::{Letter, Word};

pub use window::{
    all_windows, super_window, union_strictly_inside_super, window, Endpoint, Seed, Window, WindowKind,
};

/// Interval length of a letter as a ring element.
pub fn letter_length(m: u32, l: Letter) -> RingElt {
    match l {
        Letter::A => RingElt::lambda(m),
        Letter::B => RingElt::one(m),
    }
}

/// Streams `(coordinate, letter)` for the control points of `letters`, the
/// point at index `origin` sitting at 0.
pub fn control_points<'a>(
    letters: &'a [Letter],
    m: u32,
    origin: usize,
) -> impl Iterator<Item = (RingElt, Letter)> + 'a {
    let (na, nb) = letters[..origin.min(letters.len())].iter().fold((0i128, 0i128), |(a, b), l| match l {
        Letter::A => (a + 1, b),
        Letter::B => (a, b + 1),
    });
    let start = RingElt::new(-nb, -na, m);
    letters.iter().scan(start, move |pos, &l| {
        let here = *pos;
        *pos = here + letter_length(m, l);
        Some((here, l))
    })
}

/// A finite patch of control points.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlPointSet {
    pub m: u32,
    pub coords: Vec<RingElt>,
    pub letters: Vec<Letter>,
}

impl ControlPointSet {
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        self.coords.iter().map(|c| LatticePoint::from(*c))
    }

    /// `physical,internal,letter` rows with a header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "physical,internal,letter")?;
        for (c, l) in self.coords.iter().zip(&self.letters) {
            writeln!(out, "{},{},{}", c.value(), c.star(), l.as_char())?;
        }
        Ok(())
    }
}

/// Control points of `w` with the letter at `origin_at` placed at 0.
pub fn realize(w: &Word, m: u32, origin_at: usize) -> Result<ControlPointSet> {
    if origin_at > w.len() {
        return Err(Error::InvalidParameter(format!(
            "origin {origin_at} outside word of length {}",
            w.len()
        )));
    }
    let (coords, letters) = control_points(w.letters(), m, origin_at).unzip();
    Ok(ControlPointSet { m, coords, letters })
}

/// Realisation using the word's own origin marker (0 if it has none).
pub fn realize_word(w: &Word, m: u32) -> ControlPointSet {
    realize(w, m, w.origin().unwrap_or(0)).expect("origin marker lies inside the word")
}

/// Internal-space coordinates, tagged by letter.
pub fn lift(ps: &ControlPointSet) -> Vec<(f64, Letter)> {
    ps.coords.iter().zip(&ps.letters).map(|(c, &l)| (c.star(), l)).collect()
}

/// Indices of control points outside `w` (exact test).
pub fn window_violations(ps: &ControlPointSet, w: &Window) -> Vec<usize> {
    ps.coords.iter().enumerate().filter(|(_, c)| !w.contains(c)).map(|(i, _)| i).collect()
}

/// Finite-patch surrogate for the Meyer property.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct MeyerReport {
    pub points: usize,
    /// Smallest and largest gap between consecutive control points.
    pub min_gap: f64,
    pub max_gap: f64,
    /// Number of points used for the difference-set scan.
    pub scanned: usize,
    pub distinct_differences: usize,
    /// Smallest positive element of `Λ − Λ` on the scanned points.
    pub min_positive_difference: f64,
    /// Smallest distance between two distinct elements of `Λ − Λ`.
    pub difference_spacing: f64,
}

/// Gap bounds on the whole patch; difference set on its first `scan_cap` points.
pub fn meyer_check(ps: &ControlPointSet, scan_cap: usize) -> MeyerReport {
    let mut min_gap = f64::INFINITY;
    let mut max_gap: f64 = 0.0;
    for pair in ps.coords.windows(2) {
        let g = (pair[1] - pair[0]).value();
        min_gap = min_gap.min(g);
        max_gap = max_gap.max(g);
    }
    let scanned = ps.len().min(scan_cap);
    let head = &ps.coords[..scanned];
    let mut diffs: HashSet<RingElt> = HashSet::new();
    for (i, x) in head.iter().enumerate() {
        for y in &head[i + 1..] {
            let d = *y - *x;
            diffs.insert(d);
            diffs.insert(-d);
        }
    }
    if scanned > 0 {
        diffs.insert(RingElt::zero(ps.m));
    }
    let mut values: Vec<f64> = diffs.iter().map(|d| d.value()).collect();
    values.sort_by(f64::total_cmp);
    let min_positive_difference = values.iter().copied().find(|&v| v > 0.0).unwrap_or(f64::NAN);
    let difference_spacing = values.windows(2).map(|p| p[1] - p[0]).fold(f64::INFINITY, f64::min);
    MeyerReport {
        points: ps.len(),
        min_gap,
        max_gap,
        scanned,
        distinct_differences: values.len(),
        min_positive_difference,
        difference_spacing,
    }
}

/// Points of `L_m` and the windows behind the strip picture.
#[derive(Clone, Debug, Serialize)]
pub struct StripData {
    pub m: u32,
    /// `(p, q, x, x')` for `|p|, |q| ≤ bound`.
    pub lattice: Vec<(i128, i128, f64, f64)>,
    pub windows: Vec<Window>,
    pub super_window: Window,
}

pub fn strip_export(m: u32, bound: i128) -> StripData {
    let mut lattice = Vec::new();
    for p in -bound..=bound {
        for q in -bound..=bound {
            let x = RingElt::new(p, q, m);
            lattice.push((p, q, x.value(), x.star()));
        }
    }
    StripData { m, lattice, windows: all_windows(m), super_window: super_window(m) }
}

impl StripData {
    pub fn write_lattice_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "p,q,physical,internal")?;
        for (p, q, x, xs) in &self.lattice {
            writeln!(out, "{p},{q},{x},{xs}")?;
        }
        Ok(())
    }

    pub fn write_windows_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "kind,i,seed,lo,hi,lo_closed,hi_closed")?;
        for w in self.windows.iter().chain(std::iter::once(&self.super_window)) {
            writeln!(
                out,
                "{:?},{},{},{},{},{},{}",
                w.kind,
                w.i.map(|i| i.to_string()).unwrap_or_default(),
                w.seed.map(|s| format!("{s:?}")).unwrap_or_default(),
                w.lo_value(),
                w.hi_value(),
                w.lo_closed,
                w.hi_closed
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count_a: u64,
    pub count_b: u64,
}

/// Internal-space histogram split by letter.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Histogram {
    pub bins: Vec<HistogramBin>,
    /// Points falling outside `[lo, hi]`.
    pub outside: u64,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Self {
        let width = (hi - lo) / bins as f64;
        Histogram {
            bins: (0..bins)
                .map(|k| HistogramBin {
                    lo: lo + k as f64 * width,
                    hi: lo + (k + 1) as f64 * width,
                    count_a: 0,
                    count_b: 0,
                })
                .collect(),
            outside: 0,
        }
    }

    pub fn add(&mut self, x: f64, l: Letter) {
        let lo = self.bins[0].lo;
        let hi = self.bins[self.bins.len() - 1].hi;
        if !(lo..=hi).contains(&x) {
            self.outside += 1;
            return;
        }
        let n = self.bins.len();
        let k = (((x - lo) / (hi - lo)) * n as f64).floor() as usize;
        let bin = &mut self.bins[k.min(n - 1)];
        match l {
            Letter::A => bin.count_a += 1,
            Letter::B => bin.count_b += 1,
        }
    }

    pub fn total_a(&self) -> u64 {
        self.bins.iter().map(|b| b.count_a).sum()
    }

    pub fn total_b(&self) -> u64 {
        self.bins.iter().map(|b| b.count_b).sum()
    }

    pub fn total(&self) -> u64 {
        self.total_a() + self.total_b() + self.outside
    }

    pub fn a_fraction(&self) -> f64 {
        self.total_a() as f64 / (self.total_a() + self.total_b()) as f64
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "bin_lo,bin_hi,count_a,count_b")?;
        for b in &self.bins {
            writeln!(out, "{},{},{},{}", b.lo, b.hi, b.count_a, b.count_b)?;
        }
        Ok(())
    }
}

/// Streams the lift of `letters` into a histogram over the super window `W_m`.
pub fn histogram_export(letters: &[Letter], m: u32, origin: usize, bins: usize) -> Histogram {
    let sup = super_window(m);
    let mut h = Histogram::new(sup.lo_value(), sup.hi_value(), bins.max(1));
    for (c, l) in control_points(letters, m, origin) {
        h.add(c.star(), l);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::lambda;
    use crate::subst::{NmsRule, Probabilities, RandomSubst};

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn realize_small_words() {
        for m in 1..=3 {
            let ab = realize(&w("ab"), m, 0).unwrap();
            assert_eq!(ab.coords, vec![RingElt::zero(m), RingElt::lambda(m)]);
            let ba = realize(&w("ba"), m, 0).unwrap();
            assert_eq!(ba.coords, vec![RingElt::zero(m), RingElt::one(m)]);
        }
        let two = realize(&w("ab|ba"), 1, 2).unwrap();
        assert_eq!(two.coords[2], RingElt::zero(1));
        assert_eq!(two.coords[0], RingElt::new(-1, -1, 1));
        assert!(realize(&w("ab"), 1, 3).is_err());
    }

    #[test]
    fn gaps_are_exact() {
        let x = RandomSubst::new(Probabilities::uniform(2), 4).iterate(&w("b"), 9);
        let ps = realize(&x, 2, 0).unwrap();
        for (pair, l) in ps.coords.windows(2).zip(&ps.letters) {
            assert_eq!(pair[1] - pair[0], letter_length(2, *l));
        }
    }

    #[test]
    fn extent_scales_with_inflation() {
        // |ζ^n(b)| as an interval is λ^n exactly
        let mut rs = RandomSubst::new(Probabilities::uniform(1), 3);
        for n in 0..15u32 {
            let x = rs.iterate(&w("b"), n as usize);
            let ps = realize(&x, 1, 0).unwrap();
            let end = *ps.coords.last().unwrap() + letter_length(1, *ps.letters.last().unwrap());
            assert_eq!(end, RingElt::lambda(1).pow(n));
            assert!((end.value() / lambda(1).powi(n as i32) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_lift_inside_super_window() {
        for m in 1..=3 {
            let mut rs = RandomSubst::new(Probabilities::uniform(m), 17);
            let x = rs.iterate(&w("b"), 12);
            let ps = realize(&x, m, 0).unwrap();
            assert!(window_violations(&ps, &super_window(m)).is_empty(), "m={m}");
            let patch = rs.two_sided_patch(500, 500);
            let ps = realize_word(&patch, m);
            assert!(window_violations(&ps, &super_window(m)).is_empty(), "m={m} two-sided");
        }
        let lift0 = lift(&realize(&w("ab"), 1, 0).unwrap());
        assert_eq!(lift0[0].0, 0.0);
    }

    #[test]
    fn deterministic_patches_in_singular_windows() {
        for m in 1..=3 {
            let last = NmsRule::new(m, m).unwrap().iterate(&w("b"), 12);
            let ps = realize(&last, m, 0).unwrap();
            let wm = window(m, m, Some(Seed::AA)).unwrap().closure();
            assert!(window_violations(&ps, &wm).is_empty(), "m={m}, i=m");
            let first = NmsRule::new(m, 0).unwrap().iterate(&w("b"), 12);
            let ps = realize(&first, m, 0).unwrap();
            let w0 = window(m, 0, Some(Seed::AA)).unwrap().closure();
            assert!(window_violations(&ps, &w0).is_empty(), "m={m}, i=0");
        }
    }

    #[test]
    fn inflation_compatibility() {
        for m in 1..=3 {
            for i in 0..=m {
                let rule = NmsRule::new(m, i).unwrap();
                for s in ["a", "b", "ab", "abba", "aabab"] {
                    let x = w(s);
                    let direct = realize(&rule.apply(&x), m, 0).unwrap();
                    let base = realize(&x, m, 0).unwrap();
                    let mut inflated = Vec::new();
                    for (c, &l) in base.coords.iter().zip(&base.letters) {
                        let mut pos = *c * RingElt::lambda(m);
                        for img in rule.image(l) {
                            inflated.push((pos, img));
                            pos = pos + letter_length(m, img);
                        }
                    }
                    let (coords, letters): (Vec<_>, Vec<_>) = inflated.into_iter().unzip();
                    assert_eq!(direct.coords, coords);
                    assert_eq!(direct.letters, letters);
                }
            }
        }
    }

    #[test]
    fn meyer_surrogate() {
        let x = RandomSubst::new(Probabilities::uniform(1), 8).iterate(&w("b"), 16);
        let ps = realize(&x, 1, 0).unwrap();
        let r = meyer_check(&ps, 600);
        assert!((r.min_gap - 1.0).abs() < 1e-12);
        assert!((r.max_gap - lambda(1)).abs() < 1e-12);
        assert!((r.min_positive_difference - 1.0).abs() < 1e-12);
        // brute force over the same points, independent of the hash set
        let head: Vec<f64> = ps.coords[..r.scanned].iter().map(|c| c.value()).collect();
        let mut all: Vec<f64> = Vec::new();
        for a in &head {
            for b in &head {
                all.push(b - a);
            }
        }
        all.sort_by(f64::total_cmp);
        all.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        assert_eq!(all.len(), r.distinct_differences);
        assert!(r.difference_spacing > 0.1);
    }

    #[test]
    fn strip_and_histogram() {
        let s = strip_export(2, 5);
        assert_eq!(s.lattice.len(), 121);
        let mut buf = Vec::new();
        s.write_lattice_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("p,q,physical,internal\n"));
        let mut buf = Vec::new();
        s.write_windows_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1 + 4 + 1 + 1);

        let empty = histogram_export(&[], 1, 0, 10);
        assert_eq!(empty.total(), 0);
        assert_eq!(empty.bins.len(), 10);

        let x = RandomSubst::new(Probabilities::uniform(1), 2).iterate(&w("b"), 20);
        let h = histogram_export(x.letters(), 1, 0, 50);
        assert_eq!(h.outside, 0);
        assert_eq!(h.total() as usize, x.len());
        assert!((h.a_fraction() - 0.618).abs() < 0.01);
    }
}
