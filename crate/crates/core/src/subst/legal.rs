//! Legal words `D_{m,ℓ}`: factors of some realisation of `ζ_m^k(b)`.
//!
//! The set is computed by window closure. Start from the length-`ℓ` factors
//! of all realisations of `ζ_m^K(b)`, where `K` is the first power whose
//! words have at least `ℓ` letters. Then repeatedly add every length-`ℓ`
//! factor of every realisation of `ζ_m(u)` for `u` already in the set, until
//! nothing new appears. Any factor of a longer realisation `ζ_m(R)` is covered
//! by the image of an `ℓ`-factor of `R`, so the fixed point is all of
//! `D_{m,ℓ}`. The construction never looks at probabilities.
//!
//! Cost grows like `|D_{m,ℓ}| · (m+1)^{#a}`; in practice `ℓ ≤ 20` for
//! `m = 1` and `ℓ ≤ 10` for `m ≤ 3` are comfortable.

use std::collections::{HashMap, HashSet};

use super::word::{letters_to_string, Letter, Word};
use super::{for_each_image, Probabilities};
use crate::error::{Error, Result};

/// Default cap on closure rounds.
pub const DEFAULT_MAX_ROUNDS: usize = 256;

/// Cap on the number of distinct realisations held while seeding the closure.
pub const REALISATION_LIMIT: usize = 5_000_000;

/// The legal words of one length, in lexicographic order (`a < b`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegalWordSet {
    m: u32,
    word_len: usize,
    words: Vec<Word>,
    index: HashMap<Vec<Letter>, usize>,
}

impl LegalWordSet {
    fn from_set(m: u32, word_len: usize, set: HashSet<Vec<Letter>>) -> Self {
        let mut raw: Vec<Vec<Letter>> = set.into_iter().collect();
        raw.sort();
        let index = raw.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let words = raw.into_iter().map(Word::new).collect();
        LegalWordSet { m, word_len, words, index }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Common length `ℓ` of the members.
    pub fn word_len(&self) -> usize {
        self.word_len
    }

    /// Number of legal words, `C_m(ℓ)`.
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn iter(&self) -> impl Iterator<Item = &Word> {
        self.words.iter()
    }

    pub fn contains(&self, w: &[Letter]) -> bool {
        self.index.contains_key(w)
    }

    /// Position of `w` in the ordered alphabet.
    pub fn index_of(&self, w: &[Letter]) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn as_strings(&self) -> Vec<String> {
        self.words.iter().map(|w| letters_to_string(w.letters())).collect()
    }
}

/// All distinct realisations of `ζ_m^k(seed)`, enumerated level by level.
pub fn all_realisations(m: u32, seed: &[Letter], k: usize, limit: usize) -> Result<HashSet<Vec<Letter>>> {
    realisations_with_support(m, seed, k, limit, None)
}

/// As [`all_realisations`], restricted to rules with non-zero probability.
pub fn realisations_with_support(
    m: u32,
    seed: &[Letter],
    k: usize,
    limit: usize,
    support: Option<&Probabilities>,
) -> Result<HashSet<Vec<Letter>>> {
    let mut level: HashSet<Vec<Letter>> = HashSet::from([seed.to_vec()]);
    for _ in 0..k {
        let bound: u128 = level
            .iter()
            .map(|w| {
                let a = w.iter().filter(|&&l| l == Letter::A).count() as u32;
                (m as u128 + 1).saturating_pow(a)
            })
            .max()
            .unwrap_or(1);
        // Distinct images of one word are distinct realisations.
        if bound > limit as u128 {
            return Err(Error::SizeLimit {
                what: "realisation set",
                lower_bound: bound,
                limit: limit as u128,
            });
        }
        let mut next = HashSet::new();
        for w in &level {
            for_each_image(m, w, support, |img, _| {
                next.insert(img.to_vec());
            });
            if next.len() > limit {
                return Err(Error::SizeLimit {
                    what: "realisation set",
                    lower_bound: next.len() as u128,
                    limit: limit as u128,
                });
            }
        }
        level = next;
    }
    Ok(level)
}

fn insert_windows(word: &[Letter], len: usize, into: &mut HashSet<Vec<Letter>>) {
    if word.len() >= len {
        for w in word.windows(len) {
            if !into.contains(w) {
                into.insert(w.to_vec());
            }
        }
    }
}

/// `D_{m,ℓ}` by window closure; fails if no fixed point within `max_rounds`.
pub fn legal_words(m: u32, len: usize, max_rounds: usize) -> Result<LegalWordSet> {
    closure(m, len, max_rounds, None)
}

/// Legal words of the substitution that only uses rules with `p_i > 0`.
/// Equals [`legal_words`] for strictly positive vectors; for a degenerate
/// vector it yields the language of the deterministic rule(s) in its support.
pub fn legal_words_for(probs: &Probabilities, len: usize, max_rounds: usize) -> Result<LegalWordSet> {
    let support = (!probs.is_strictly_positive()).then_some(probs);
    closure(probs.m(), len, max_rounds, support)
}

fn closure(m: u32, len: usize, max_rounds: usize, support: Option<&Probabilities>) -> Result<LegalWordSet> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    if len == 0 {
        return Err(Error::InvalidParameter("word length must be at least 1".into()));
    }
    // Smallest K with |ζ^K(b)| ≥ len; |ζ^0(b)| = |ζ^1(b)| = 1 and
    // |ζ^{k+1}(b)| = m·|ζ^k(b)| + |ζ^{k−1}(b)|.
    let (mut prev, mut cur, mut k) = (1usize, 1usize, 0usize);
    while cur < len {
        if k > 0 {
            (prev, cur) = (cur, m as usize * cur + prev);
        }
        k += 1;
    }
    let seeds = realisations_with_support(m, &[Letter::B], k, REALISATION_LIMIT, support)?;
    let mut set = HashSet::new();
    for s in &seeds {
        insert_windows(s, len, &mut set);
    }

    let mut frontier: Vec<Vec<Letter>> = set.iter().cloned().collect();
    for _ in 0..max_rounds {
        let mut fresh = HashSet::new();
        for u in &frontier {
            for_each_image(m, u, support, |img, _| {
                for w in img.windows(len) {
                    if !set.contains(w) && !fresh.contains(w) {
                        fresh.insert(w.to_vec());
                    }
                }
            });
        }
        if fresh.is_empty() {
            return Ok(LegalWordSet::from_set(m, len, set));
        }
        frontier = fresh.iter().cloned().collect();
        set.extend(fresh);
    }
    Err(Error::NotConverged { what: "legal word closure", limit: max_rounds })
}

/// Complexity `C_m(ℓ) = |D_{m,ℓ}|` by exact enumeration.
pub fn complexity(m: u32, len: usize) -> Result<usize> {
    legal_words(m, len, DEFAULT_MAX_ROUNDS).map(|s| s.len())
}

/// Length-`ℓ` factors of all realisations of `ζ_m^k(b)` for `k ≤ max_power`.
/// Exponential in `max_power`; only meant as an independent cross-check.
pub fn brute_force_legal_words(m: u32, len: usize, max_power: usize) -> Result<LegalWordSet> {
    let mut set = HashSet::new();
    let mut level: HashSet<Vec<Letter>> = HashSet::from([vec![Letter::B]]);
    for k in 0..=max_power {
        for w in &level {
            insert_windows(w, len, &mut set);
        }
        if k < max_power {
            let mut next = HashSet::new();
            for w in &level {
                for_each_image(m, w, None, |img, _| {
                    next.insert(img.to_vec());
                });
            }
            level = next;
        }
    }
    Ok(LegalWordSet::from_set(m, len, set))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subst::{NmsRule, Probabilities, RandomSubst};

    const BB: [Letter; 2] = [Letter::B, Letter::B];

    #[test]
    fn single_letters() {
        let d = legal_words(1, 1, DEFAULT_MAX_ROUNDS).unwrap();
        assert_eq!(d.as_strings(), vec!["a", "b"]);
        assert_eq!(complexity(1, 1).unwrap(), 2);
    }

    #[test]
    fn two_letter_words_m1() {
        let d = legal_words(1, 2, DEFAULT_MAX_ROUNDS).unwrap();
        assert_eq!(d.as_strings(), vec!["aa", "ab", "ba", "bb"]);
        assert_eq!(complexity(1, 2).unwrap(), 4);
    }

    #[test]
    fn bb_and_seed_are_legal_for_every_m() {
        for m in 1..=5 {
            let d = legal_words(m, 2, DEFAULT_MAX_ROUNDS).unwrap();
            assert!(d.contains(&BB), "m={m}");
            assert!(d.contains(&[Letter::A, Letter::A]), "m={m}");
        }
    }

    #[test]
    fn bb_never_occurs_deterministically() {
        let b: Word = "b".parse().unwrap();
        for m in 1..=3 {
            for i in 0..=m {
                let r = NmsRule::new(m, i).unwrap();
                let mut w = b.clone();
                for k in 0..=20 {
                    assert!(!w.contains(&BB), "ζ_{{{m},{i}}}^{k}(b)");
                    if w.len() > 200_000 {
                        break;
                    }
                    w = r.apply(&w);
                }
            }
        }
    }

    #[test]
    fn complexity_is_nondecreasing() {
        let mut last = 0;
        for len in 1..=10 {
            let c = complexity(1, len).unwrap();
            assert!(c >= last, "C(ℓ={len}) = {c} < {last}");
            last = c;
        }
        let mut last = 0;
        for len in 1..=6 {
            let c = complexity(2, len).unwrap();
            assert!(c >= last);
            last = c;
        }
    }

    #[test]
    fn closure_matches_brute_force() {
        for len in 1..=6 {
            let closure = legal_words(1, len, DEFAULT_MAX_ROUNDS).unwrap();
            let brute = brute_force_legal_words(1, len, 7).unwrap();
            assert_eq!(closure.as_strings(), brute.as_strings(), "m=1 ℓ={len}");
        }
        for len in 1..=4 {
            let closure = legal_words(2, len, DEFAULT_MAX_ROUNDS).unwrap();
            let brute = brute_force_legal_words(2, len, 4).unwrap();
            assert_eq!(closure.as_strings(), brute.as_strings(), "m=2 ℓ={len}");
        }
        for len in 1..=3 {
            let closure = legal_words(3, len, DEFAULT_MAX_ROUNDS).unwrap();
            let brute = brute_force_legal_words(3, len, 3).unwrap();
            assert_eq!(closure.as_strings(), brute.as_strings(), "m=3 ℓ={len}");
        }
    }

    #[test]
    fn factor_closed() {
        for m in 1..=2 {
            let long = legal_words(m, 6, DEFAULT_MAX_ROUNDS).unwrap();
            let short = legal_words(m, 4, DEFAULT_MAX_ROUNDS).unwrap();
            for w in long.iter() {
                for f in w.letters().windows(4) {
                    assert!(short.contains(f));
                }
            }
        }
    }

    #[test]
    fn independent_of_probabilities() {
        let a = RandomSubst::new(Probabilities::new(vec![0.1, 0.9]).unwrap(), 1);
        let b = RandomSubst::new(Probabilities::uniform(1), 2);
        assert_eq!(
            a.legal_words(7, DEFAULT_MAX_ROUNDS).unwrap(),
            b.legal_words(7, DEFAULT_MAX_ROUNDS).unwrap()
        );
    }

    #[test]
    fn random_realisations_only_show_legal_words() {
        let d = legal_words(1, 8, DEFAULT_MAX_ROUNDS).unwrap();
        let mut rs = RandomSubst::new(Probabilities::uniform(1), 99);
        let w = rs.iterate(&"b".parse().unwrap(), 18);
        for f in w.letters().windows(8) {
            assert!(d.contains(f));
        }
    }

    #[test]
    fn deterministic_support_has_no_bb() {
        let p = Probabilities::deterministic(1, 1).unwrap();
        let d = legal_words_for(&p, 2, DEFAULT_MAX_ROUNDS).unwrap();
        assert_eq!(d.as_strings(), vec!["aa", "ab", "ba"]);
        let full = legal_words_for(&Probabilities::uniform(1), 5, DEFAULT_MAX_ROUNDS).unwrap();
        assert_eq!(full, legal_words(1, 5, DEFAULT_MAX_ROUNDS).unwrap());
        // Sturmian: ℓ + 1 factors of length ℓ
        for len in 1..=8 {
            assert_eq!(legal_words_for(&p, len, DEFAULT_MAX_ROUNDS).unwrap().len(), len + 1);
        }
    }

    #[test]
    fn zero_round_budget_reports_non_convergence() {
        let e = legal_words(1, 5, 0).unwrap_err();
        assert!(matches!(e, Error::NotConverged { .. }));
    }

    #[test]
    fn realisations_of_small_powers() {
        let r = all_realisations(1, &[Letter::B], 2, 100).unwrap();
        let mut s: Vec<String> = r.iter().map(|w| letters_to_string(w)).collect();
        s.sort();
        assert_eq!(s, vec!["ab", "ba"]);
        assert!(matches!(all_realisations(1, &[Letter::B], 12, 10), Err(Error::SizeLimit { .. })));
    }
}
