//! Noble means substitution rules, their random local mixture, and legal words.

mod legal;
mod word;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use legal::{
    all_realisations, brute_force_legal_words, complexity, legal_words, legal_words_for,
    realisations_with_support, LegalWordSet, DEFAULT_MAX_ROUNDS, REALISATION_LIMIT,
};
pub use word::{letters_to_string, Letter, Word};

/// Tolerance on `Σ p_i = 1`.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-12;

/// A probability vector `(p_0, …, p_m)` over the rules `ζ_{m,0}, …, ζ_{m,m}`.
///
/// Entries must be non-negative and sum to one. The hull-level results assume
/// strict positivity; degenerate vectors are still accepted because they
/// reproduce the deterministic rules and serve as regression anchors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Probabilities(Vec<f64>);

impl Probabilities {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidProbabilities(format!(
                "need at least two entries (m >= 1), got {}",
                probs.len()
            )));
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidProbabilities(format!("entry {bad} is not a probability")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
            return Err(Error::InvalidProbabilities(format!("entries sum to {sum}, not 1")));
        }
        Ok(Probabilities(probs))
    }

    /// `p_i = 1/(m+1)` for all `i`.
    pub fn uniform(m: u32) -> Self {
        let n = m as usize + 1;
        Probabilities(vec![1.0 / n as f64; n])
    }

    /// All mass on the deterministic rule `ζ_{m,i}`.
    pub fn deterministic(m: u32, i: u32) -> Result<Self> {
        if i > m {
            return Err(Error::InvalidParameter(format!("rule index {i} > m = {m}")));
        }
        let mut v = vec![0.0; m as usize + 1];
        v[i as usize] = 1.0;
        Ok(Probabilities(v))
    }

    pub fn m(&self) -> u32 {
        (self.0.len() - 1) as u32
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.0.iter().all(|&p| p > 0.0)
    }

    /// Branch index for a uniform draw `u ∈ [0, 1)`: the smallest `i` with
    /// `u < p_0 + … + p_i`.
    pub fn branch_for(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (i, p) in self.0.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        // Rounding in the cumulative sum: fall back to the last non-null branch.
        self.0.iter().rposition(|&p| p > 0.0).unwrap_or(self.0.len() - 1)
    }
}

impl TryFrom<Vec<f64>> for Probabilities {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Probabilities::new(v)
    }
}

impl From<Probabilities> for Vec<f64> {
    fn from(p: Probabilities) -> Self {
        p.0
    }
}

/// Image of `a` under `ζ_{m,i}`: `a^i b a^{m−i}`.
pub fn image_of_a(m: u32, i: u32) -> Vec<Letter> {
    let mut v = vec![Letter::A; m as usize + 1];
    v[i as usize] = Letter::B;
    v
}

/// The deterministic noble means rule `ζ_{m,i}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NmsRule {
    m: u32,
    i: u32,
}

impl NmsRule {
    pub fn new(m: u32, i: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("m must be at least 1".into()));
        }
        if i > m {
            return Err(Error::InvalidParameter(format!("rule index {i} > m = {m}")));
        }
        Ok(NmsRule { m, i })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn i(&self) -> u32 {
        self.i
    }

    pub fn image(&self, letter: Letter) -> Vec<Letter> {
        match letter {
            Letter::A => image_of_a(self.m, self.i),
            Letter::B => vec![Letter::A],
        }
    }

    /// Substitution matrix `M_m = [[m, 1], [1, 0]]`; column `j` counts the
    /// letters in the image of letter `j`.
    pub fn matrix(&self) -> [[u64; 2]; 2] {
        substitution_matrix(self.m)
    }

    pub fn apply(&self, w: &Word) -> Word {
        let a_img = image_of_a(self.m, self.i);
        let mut out = Vec::with_capacity(w.count_a() * (self.m as usize + 1) + w.count_b());
        let mut origin = None;
        for (idx, &l) in w.letters().iter().enumerate() {
            if w.origin() == Some(idx) {
                origin = Some(out.len());
            }
            match l {
                Letter::A => out.extend_from_slice(&a_img),
                Letter::B => out.push(Letter::A),
            }
        }
        if w.origin() == Some(w.len()) {
            origin = Some(out.len());
        }
        let out = Word::new(out);
        match origin {
            Some(o) => out.with_origin(o),
            None => out,
        }
    }

    pub fn iterate(&self, seed: &Word, k: usize) -> Word {
        let mut w = seed.clone();
        for _ in 0..k {
            w = self.apply(&w);
        }
        w
    }
}

pub fn substitution_matrix(m: u32) -> [[u64; 2]; 2] {
    [[m as u64, 1], [1, 0]]
}

/// Calls `f(image, weight)` for every realisation of `ζ_m(letters)`, i.e.
/// every choice of rule for every `a`. With `probs`, `weight` is the
/// probability of that choice and zero-probability branches are skipped;
/// without, every weight is 1.
pub fn for_each_image<F>(m: u32, letters: &[Letter], probs: Option<&Probabilities>, mut f: F)
where
    F: FnMut(&[Letter], f64),
{
    let images: Vec<Vec<Letter>> = (0..=m).map(|i| image_of_a(m, i)).collect();
    let mut buf = Vec::with_capacity(letters.len() * (m as usize + 1));
    fn rec<F: FnMut(&[Letter], f64)>(
        letters: &[Letter],
        images: &[Vec<Letter>],
        probs: Option<&Probabilities>,
        buf: &mut Vec<Letter>,
        weight: f64,
        f: &mut F,
    ) {
        let Some((&first, rest)) = letters.split_first() else {
            f(buf, weight);
            return;
        };
        match first {
            Letter::B => {
                buf.push(Letter::A);
                rec(rest, images, probs, buf, weight, f);
                buf.pop();
            }
            Letter::A => {
                for (i, img) in images.iter().enumerate() {
                    let p = probs.map_or(1.0, |p| p.get(i));
                    if p == 0.0 {
                        continue;
                    }
                    let n = buf.len();
                    buf.extend_from_slice(img);
                    rec(rest, images, probs, buf, weight * p, f);
                    buf.truncate(n);
                }
            }
        }
    }
    rec(letters, &images, probs, &mut buf, 1.0, &mut f);
}

/// The random noble means substitution `ζ_m` together with its random source.
///
/// The generator is ChaCha8 seeded through `SeedableRng::seed_from_u64`.
/// Letters are visited left to right and every `a` consumes exactly one
/// `f64` draw (`Rng::gen::<f64>()`), mapped to a rule by
/// [`Probabilities::branch_for`]; `b` consumes nothing. Realisations are
/// therefore a pure function of `(probs, seed, input)`.
#[derive(Clone, Debug)]
pub struct RandomSubst {
    probs: Probabilities,
    rng: ChaCha8Rng,
}

impl RandomSubst {
    pub fn new(probs: Probabilities, seed: u64) -> Self {
        RandomSubst { probs, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn m(&self) -> u32 {
        self.probs.m()
    }

    pub fn probs(&self) -> &Probabilities {
        &self.probs
    }

    /// A new substitution with the same probabilities and an independent stream.
    pub fn fork(&self, seed: u64) -> Self {
        RandomSubst::new(self.probs.clone(), seed)
    }

    /// Draws a rule index for one `a`.
    pub fn draw_branch(&mut self) -> usize {
        let u: f64 = self.rng.gen();
        self.probs.branch_for(u)
    }

    /// One application of `ζ_m`, independently per letter.
    pub fn apply(&mut self, w: &Word) -> Word {
        let m = self.m();
        let images: Vec<Vec<Letter>> = (0..=m).map(|i| image_of_a(m, i)).collect();
        let mut out = Vec::with_capacity(w.count_a() * (m as usize + 1) + w.count_b());
        let mut origin = None;
        for (idx, &l) in w.letters().iter().enumerate() {
            if w.origin() == Some(idx) {
                origin = Some(out.len());
            }
            match l {
                Letter::A => {
                    let i = self.draw_branch();
                    out.extend_from_slice(&images[i]);
                }
                Letter::B => out.push(Letter::A),
            }
        }
        if w.origin() == Some(w.len()) {
            origin = Some(out.len());
        }
        let out = Word::new(out);
        match origin {
            Some(o) => out.with_origin(o),
            None => out,
        }
    }

    /// `k`-fold independent application; the origin marker is carried along.
    pub fn iterate(&mut self, seed: &Word, k: usize) -> Word {
        let mut w = seed.clone();
        for _ in 0..k {
            w = self.apply(&w);
        }
        w
    }

    /// Iterates the two-sided seed `a|a` until at least `left` letters lie
    /// left of the origin and `right` letters right of it.
    pub fn two_sided_patch(&mut self, left: usize, right: usize) -> Word {
        let mut w: Word = "a|a".parse().expect("valid seed");
        loop {
            let o = w.origin().expect("two-sided");
            if o >= left && w.len() - o >= right {
                return w;
            }
            w = self.apply(&w);
        }
    }

    /// Legal words of length `len`. Independent of the probabilities.
    pub fn legal_words(&self, len: usize, max_rounds: usize) -> Result<LegalWordSet> {
        legal_words(self.m(), len, max_rounds)
    }

    pub fn complexity(&self, len: usize) -> Result<usize> {
        complexity(self.m(), len)
    }
}
