//! Induced substitution on legal `ℓ`-words and the frequency measure it defines.
//!
//! Convention: `matrix[u][v]` (row `u`, column `v`) is the expected number of
//! length-`ℓ` windows equal to `u` that start inside the image of the first
//! letter of `v`, read off a random image `ζ_m(v)`. Columns are sources, as in
//! `M_m = [[m, 1], [1, 0]]`, and for `ℓ = 1` the two coincide.
//!
//! Worked example for `m = 1`, `ζ_{1,1}` (`a ↦ ab`, `b ↦ a`), `ℓ = 2`:
//! `ζ(aa) = abab` has windows `ab`, `ba` at positions 0 and 1 (the image of
//! the first `a`); `ζ(ab) = aba` gives `ab`, `ba`; `ζ(ba) = aab` gives only
//! `aa`. Over the alphabet `(aa, ab, ba)` the columns are `(0,1,1)`,
//! `(0,1,1)` and `(1,0,0)`.
//!
//! The expectation is exact: the choices of the letters whose images reach
//! the last window are enumerated with their probabilities.

mod birkhoff;
mod pf;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::subst::{image_of_a, legal_words_for, LegalWordSet, Letter, Probabilities, DEFAULT_MAX_ROUNDS};

pub use birkhoff::{birkhoff_average, birkhoff_check, BirkhoffReport, BIRKHOFF_SIGMA};
pub use pf::{is_primitive, perron_right, PF_MAX_ITERATIONS, PF_TOLERANCE};

/// Induced random substitution data on `D_{m,ℓ}`.
#[derive(Clone, Debug)]
pub struct InducedSystem {
    pub m: u32,
    pub word_len: usize,
    pub alphabet: LegalWordSet,
    /// `matrix[u][v]`, indices into `alphabet`.
    pub matrix: Vec<Vec<f64>>,
    pub pf_value: f64,
    /// Right PF eigenvector, entries summing to 1.
    pub pf_right: Vec<f64>,
}

/// Value of the cylinder measure for a word of the right length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CylinderValue {
    Legal(f64),
    /// Not in the alphabet; the cylinder is empty.
    Illegal,
}

impl CylinderValue {
    pub fn value(self) -> f64 {
        match self {
            CylinderValue::Legal(x) => x,
            CylinderValue::Illegal => 0.0,
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct InducedExport {
    pub m: u32,
    pub word_len: usize,
    pub alphabet: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
    pub pf_value: f64,
    pub pf_right: Vec<f64>,
}

/// Calls `add(prefix, weight)` once per realisation branch of `ζ(v)`, with
/// the prefix just long enough to hold every `len`-window that starts inside
/// the image of `v`'s first letter.
fn column(m: u32, v: &[Letter], probs: &Probabilities, len: usize, mut add: impl FnMut(&[Letter], f64)) {
    let first_len = match v[0] {
        Letter::A => m as usize + 1,
        Letter::B => 1,
    };
    let need = first_len + len - 1;
    let images: Vec<Vec<Letter>> = (0..=m).map(|i| image_of_a(m, i)).collect();

    fn rec(
        v: &[Letter],
        images: &[Vec<Letter>],
        probs: &Probabilities,
        need: usize,
        buf: &mut Vec<Letter>,
        weight: f64,
        add: &mut dyn FnMut(&[Letter], f64),
    ) {
        if buf.len() >= need {
            add(&buf[..need], weight);
            return;
        }
        let (&first, rest) = v.split_first().expect("image of v covers the windows");
        match first {
            Letter::B => {
                buf.push(Letter::A);
                rec(rest, images, probs, need, buf, weight, add);
                buf.pop();
            }
            Letter::A => {
                for (i, img) in images.iter().enumerate() {
                    let p = probs.get(i);
                    if p == 0.0 {
                        continue;
                    }
                    let n = buf.len();
                    buf.extend_from_slice(img);
                    rec(rest, images, probs, need, buf, weight * p, add);
                    buf.truncate(n);
                }
            }
        }
    }
    let mut buf = Vec::with_capacity(need + m as usize + 1);
    rec(v, &images, probs, need, &mut buf, 1.0, &mut add);
}

/// Expected induced matrix over a given alphabet (no PF step).
///
/// An entry whose count is the same in every branch is stored as that
/// integer, so deterministic entries carry no rounding from `Σ p_i`.
pub fn induced_matrix(alphabet: &LegalWordSet, probs: &Probabilities) -> Vec<Vec<f64>> {
    let n = alphabet.len();
    let len = alphabet.word_len();
    let mut matrix = vec![vec![0.0; n]; n];
    for (j, v) in alphabet.iter().enumerate() {
        let mut branches: Vec<(f64, BTreeMap<usize, u32>)> = Vec::new();
        column(probs.m(), v.letters(), probs, len, |prefix, w| {
            let mut counts = BTreeMap::new();
            for u in prefix.windows(len) {
                let i = alphabet.index_of(u).expect("window of a legal word's image is legal");
                *counts.entry(i).or_insert(0) += 1;
            }
            branches.push((w, counts));
        });
        let rows: BTreeSet<usize> = branches.iter().flat_map(|(_, c)| c.keys().copied()).collect();
        for i in rows {
            let count = |c: &BTreeMap<usize, u32>| c.get(&i).copied().unwrap_or(0);
            let first = count(&branches[0].1);
            matrix[i][j] = if branches.iter().all(|(_, c)| count(c) == first) {
                first as f64
            } else {
                branches.iter().map(|(w, c)| w * count(c) as f64).sum()
            };
        }
    }
    matrix
}

/// Builds the induced system on the legal `ℓ`-words of `probs` and its PF data.
pub fn build_induced(probs: &Probabilities, word_len: usize) -> Result<InducedSystem> {
    let alphabet = legal_words_for(probs, word_len, DEFAULT_MAX_ROUNDS)?;
    let matrix = induced_matrix(&alphabet, probs);
    if !is_primitive(&matrix) {
        return Err(Error::NotPrimitive { dim: matrix.len(), matrix });
    }
    let (pf_value, pf_right) = perron_right(&matrix)?;
    Ok(InducedSystem { m: probs.m(), word_len, alphabet, matrix, pf_value, pf_right })
}

impl InducedSystem {
    /// `μ_m(Z_k(w))`, the same for every position `k`.
    pub fn cylinder_measure(&self, w: &[Letter]) -> Result<CylinderValue> {
        if w.len() != self.word_len {
            return Err(Error::WrongLength(crate::subst::letters_to_string(w)));
        }
        Ok(match self.alphabet.index_of(w) {
            Some(i) => CylinderValue::Legal(self.pf_right[i]),
            None => CylinderValue::Illegal,
        })
    }

    /// `(word, μ)` pairs in alphabet order.
    pub fn measure_table(&self) -> Vec<(String, f64)> {
        self.alphabet.as_strings().into_iter().zip(self.pf_right.iter().copied()).collect()
    }

    pub fn export(&self) -> InducedExport {
        InducedExport {
            m: self.m,
            word_len: self.word_len,
            alphabet: self.alphabet.as_strings(),
            matrix: self.matrix.clone(),
            pf_value: self.pf_value,
            pf_right: self.pf_right.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::lambda;
    use crate::subst::{for_each_image, substitution_matrix};

    fn w(s: &str) -> Vec<Letter> {
        s.chars().map(|c| Letter::from_char(c).unwrap()).collect()
    }

    #[test]
    fn level_one_is_substitution_matrix() {
        for m in 1..=4 {
            for probs in [
                Probabilities::uniform(m),
                Probabilities::deterministic(m, 0).unwrap(),
                Probabilities::deterministic(m, m).unwrap(),
            ] {
                let sys = build_induced(&probs, 1).unwrap();
                let mm = substitution_matrix(m);
                assert_eq!(sys.alphabet.as_strings(), vec!["a", "b"]);
                for i in 0..2 {
                    for j in 0..2 {
                        assert_eq!(sys.matrix[i][j], mm[i][j] as f64);
                    }
                }
                let l = lambda(m);
                assert!((sys.pf_value - l).abs() < 1e-9);
                assert!((sys.pf_right[0] - l / (l + 1.0)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn letter_frequencies_golden() {
        let sys = build_induced(&Probabilities::uniform(1), 1).unwrap();
        let a = sys.cylinder_measure(&w("a")).unwrap().value();
        let b = sys.cylinder_measure(&w("b")).unwrap().value();
        assert!((a - 0.6180339887).abs() < 1e-9);
        assert!((b - 0.3819660113).abs() < 1e-9);
        assert!((a + b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_level_two_matches_hand_built() {
        let sys = build_induced(&Probabilities::deterministic(1, 1).unwrap(), 2).unwrap();
        assert_eq!(sys.alphabet.as_strings(), vec!["aa", "ab", "ba"]);
        let expect = [[0.0, 0.0, 1.0], [1.0, 1.0, 0.0], [1.0, 1.0, 0.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(sys.matrix[i][j], expect[i][j]);
            }
        }
        let phi = lambda(1);
        assert!((sys.pf_value - phi).abs() < 1e-9);
    }

    #[test]
    fn pf_value_is_inflation_multiplier() {
        for m in 1..=3 {
            for len in 1..=3 {
                let sys = build_induced(&Probabilities::uniform(m), len).unwrap();
                assert!((sys.pf_value - lambda(m)).abs() < 1e-9, "m={m} ℓ={len}");
                assert!(sys.pf_right.iter().all(|&x| x > 0.0));
                assert!((sys.pf_right.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn marginals_are_consistent() {
        for (m, probs) in [
            (1, Probabilities::uniform(1)),
            (1, Probabilities::new(vec![0.2, 0.8]).unwrap()),
            (2, Probabilities::new(vec![0.5, 0.3, 0.2]).unwrap()),
        ] {
            for len in 1..=3 {
                let short = build_induced(&probs, len).unwrap();
                let long = build_induced(&probs, len + 1).unwrap();
                for u in short.alphabet.iter() {
                    let mu = short.cylinder_measure(u.letters()).unwrap().value();
                    let mut right = 0.0;
                    let mut left = 0.0;
                    for c in [Letter::A, Letter::B] {
                        let mut x = u.letters().to_vec();
                        x.push(c);
                        right += long.cylinder_measure(&x).unwrap().value();
                        let mut y = vec![c];
                        y.extend_from_slice(u.letters());
                        left += long.cylinder_measure(&y).unwrap().value();
                    }
                    assert!((right - mu).abs() < 1e-9, "m={m} ℓ={len} {u}");
                    assert!((left - mu).abs() < 1e-9, "m={m} ℓ={len} {u}");
                }
            }
        }
    }

    #[test]
    fn level_one_is_affine_in_probabilities() {
        let probs = Probabilities::new(vec![0.1, 0.6, 0.3]).unwrap();
        let mixed = build_induced(&probs, 1).unwrap().matrix;
        let mut combo = vec![vec![0.0; 2]; 2];
        for i in 0..=2 {
            let det = build_induced(&Probabilities::deterministic(2, i).unwrap(), 1).unwrap();
            for r in 0..2 {
                for c in 0..2 {
                    combo[r][c] += probs.get(i as usize) * det.matrix[r][c];
                }
            }
        }
        assert_eq!(mixed, combo);
    }

    #[test]
    fn prefix_enumeration_matches_full_branch_enumeration() {
        for (m, probs) in [
            (1, Probabilities::new(vec![0.35, 0.65]).unwrap()),
            (2, Probabilities::new(vec![0.5, 0.3, 0.2]).unwrap()),
        ] {
            for len in 2..=4 {
                let sys = build_induced(&probs, len).unwrap();
                let n = sys.alphabet.len();
                let mut full = vec![vec![0.0; n]; n];
                for (j, v) in sys.alphabet.iter().enumerate() {
                    let first_len = if v.letters()[0] == Letter::A { m as usize + 1 } else { 1 };
                    for_each_image(m, v.letters(), Some(&probs), |img, wt| {
                        for s in 0..first_len {
                            let i = sys.alphabet.index_of(&img[s..s + len]).unwrap();
                            full[i][j] += wt;
                        }
                    });
                }
                for i in 0..n {
                    for j in 0..n {
                        assert!((full[i][j] - sys.matrix[i][j]).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn illegal_and_wrong_length_words() {
        let sys = build_induced(&Probabilities::deterministic(1, 1).unwrap(), 2).unwrap();
        assert_eq!(sys.cylinder_measure(&w("bb")).unwrap(), CylinderValue::Illegal);
        assert!(sys.cylinder_measure(&w("a")).is_err());
        let random = build_induced(&Probabilities::uniform(1), 2).unwrap();
        match random.cylinder_measure(&w("bb")).unwrap() {
            CylinderValue::Legal(x) => assert!(x > 0.0),
            CylinderValue::Illegal => panic!("bb is legal in the random hull"),
        }
    }

    #[test]
    fn export_carries_alphabet_order() {
        let sys = build_induced(&Probabilities::uniform(1), 2).unwrap();
        let e = sys.export();
        assert_eq!(e.alphabet, vec!["aa", "ab", "ba", "bb"]);
        assert_eq!(e.matrix.len(), 4);
        assert_eq!(sys.measure_table().len(), 4);
    }
}
