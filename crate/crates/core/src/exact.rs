//! Exact RNMS words by the concatenation rule and the topological entropy.
//!
//! `G_{m,1} = {b}`, `G_{m,2} = {a}` and for `n ≥ 3`
//! `G_{m,n} = ⋃_i ∏_j G_{m, n−1−δ_ij}`: for each slot `i` the `(m+1)`-fold
//! concatenation with `G_{m,n−2}` in slot `i` and `G_{m,n−1}` elsewhere.
//! Sets are materialised and deduplicated; no counting formula is assumed.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ring::{lambda, lambda_conj};
use crate::subst::{all_realisations, letters_to_string, Letter, Word};

/// Default cap on `|G_{m,n}|`.
pub const EXACT_WORD_LIMIT: u128 = 5_000_000;

/// `ℓ_{m,n}`: `ℓ_{m,1} = ℓ_{m,2} = 1`, `ℓ_{m,n} = m·ℓ_{m,n−1} + ℓ_{m,n−2}`.
pub fn word_length(m: u32, n: usize) -> u128 {
    assert!(n >= 1, "generation starts at 1");
    let (mut prev, mut cur) = (1u128, 1u128);
    for _ in 2..n {
        let next = m as u128 * cur + prev;
        prev = cur;
        cur = next;
    }
    cur
}

#[derive(Clone, Debug)]
pub struct ExactWordSet {
    pub m: u32,
    pub n: usize,
    /// Common length `ℓ_{m,n}` of all members.
    pub length: usize,
    /// Members in lexicographic order.
    pub words: Vec<Word>,
    /// Sum of the branch sizes before deduplication; `raw_count − |G|`
    /// measures the overlap between branches.
    pub raw_count: u128,
}

/// Serialisable summary of an exact word set.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ExactRecord {
    pub m: u32,
    pub n: usize,
    pub length: usize,
    pub count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub words: Option<Vec<String>>,
}

impl ExactWordSet {
    pub fn count(&self) -> usize {
        self.words.len()
    }

    pub fn as_strings(&self) -> Vec<String> {
        self.words.iter().map(|w| letters_to_string(w.letters())).collect()
    }

    /// Words are listed only when there are at most `list_threshold` of them.
    pub fn record(&self, list_threshold: usize) -> ExactRecord {
        ExactRecord {
            m: self.m,
            n: self.n,
            length: self.length,
            count: self.count(),
            words: (self.count() <= list_threshold).then(|| self.as_strings()),
        }
    }
}

fn concat_branch(m: u32, i: usize, older: &[Vec<Letter>], newer: &[Vec<Letter>]) -> Vec<Vec<Letter>> {
    let mut acc: Vec<Vec<Letter>> = vec![Vec::new()];
    for j in 0..=m as usize {
        let factor = if j == i { older } else { newer };
        let mut next = Vec::with_capacity(acc.len() * factor.len());
        for prefix in &acc {
            for f in factor {
                let mut w = Vec::with_capacity(prefix.len() + f.len());
                w.extend_from_slice(prefix);
                w.extend_from_slice(f);
                next.push(w);
            }
        }
        acc = next;
    }
    acc
}

/// `G_{m,n}` with the default size cap.
pub fn exact_words(m: u32, n: usize) -> Result<ExactWordSet> {
    exact_words_with_limit(m, n, EXACT_WORD_LIMIT)
}

/// `G_{m,n}`, refusing to build sets whose guaranteed size exceeds `limit`.
///
/// A single branch concatenates fixed-length factors, so it is injective:
/// `|G_{m,n}| ≥ |G_{m,n−1}|^m · |G_{m,n−2}|`, which is the reported bound.
pub fn exact_words_with_limit(m: u32, n: usize, limit: u128) -> Result<ExactWordSet> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("generation n must be at least 1".into()));
    }
    let mut older: Vec<Vec<Letter>> = vec![vec![Letter::B]];
    let mut newer: Vec<Vec<Letter>> = vec![vec![Letter::A]];
    let mut raw_count = 1u128;
    if n == 1 {
        newer = older.clone();
    }
    for _ in 3..=n {
        let branch = (newer.len() as u128).saturating_pow(m).saturating_mul(older.len() as u128);
        if branch > limit {
            return Err(Error::SizeLimit { what: "exact word set", lower_bound: branch, limit });
        }
        raw_count = branch * (m as u128 + 1);
        let merged: HashSet<Vec<Letter>> = (0..=m as usize)
            .into_par_iter()
            .map(|i| concat_branch(m, i, &older, &newer))
            .flatten_iter()
            .collect();
        let mut merged: Vec<Vec<Letter>> = merged.into_iter().collect();
        merged.sort();
        older = std::mem::replace(&mut newer, merged);
    }
    let length = newer[0].len();
    debug_assert_eq!(length as u128, word_length(m, n));
    Ok(ExactWordSet { m, n, length, words: newer.into_iter().map(Word::new).collect(), raw_count })
}

/// Checks that the distinct realisations of `ζ_m^{n−1}(b)` are exactly `G_{m,n}`.
pub fn process_equality_check(m: u32, n: usize) -> Result<bool> {
    if n == 0 {
        return Err(Error::InvalidParameter("generation n must be at least 1".into()));
    }
    let exact = exact_words(m, n)?;
    let realised = all_realisations(m, &[Letter::B], n - 1, EXACT_WORD_LIMIT as usize)?;
    if realised.len() != exact.count() {
        return Ok(false);
    }
    Ok(exact.words.iter().all(|w| realised.contains(w.letters())))
}

/// Truncated entropy series with a certified tail bound.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct EntropyResult {
    pub m: u32,
    pub truncation: usize,
    /// Partial sum in nats per letter; a lower bound for `H_m`.
    pub value: f64,
    /// `H_m − value` lies in `[0, tail_bound]`.
    pub tail_bound: f64,
}

/// `H_m = (λ−1)/(1−λ') · Σ_{i≥2} ln(m(i−1)+1) / λ^i`, summed for `i ≤ truncation`.
///
/// Tail majorant: for `i > t`, `ln(m(i−1)+1) ≤ ln m + ln i` and, by concavity,
/// `ln i ≤ ln(t+1) + (i−t−1)/(t+1)`. With `r = 1/λ` this gives
/// `Σ_{i>t} ≤ r^{t+1} [ (ln m + ln(t+1))/(1−r) + r/((t+1)(1−r)²) ]`.
pub fn entropy_series(m: u32, truncation: usize) -> Result<EntropyResult> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    if truncation < 2 {
        return Err(Error::InvalidParameter("truncation must be at least 2".into()));
    }
    let l = lambda(m);
    let prefactor = (l - 1.0) / (1.0 - lambda_conj(m));
    let mf = m as f64;
    let r = 1.0 / l;
    let mut sum = 0.0;
    for i in 2..=truncation {
        sum += (mf * (i as f64 - 1.0) + 1.0).ln() * r.powi(i as i32);
    }
    let t1 = truncation as f64 + 1.0;
    let tail =
        r.powi(truncation as i32 + 1) * ((mf.ln() + t1.ln()) / (1.0 - r) + r / (t1 * (1.0 - r) * (1.0 - r)));
    Ok(EntropyResult { m, truncation, value: prefactor * sum, tail_bound: prefactor * tail })
}

/// `ln|G_{m,n}| / ℓ_{m,n}`.
pub fn entropy_empirical(m: u32, n: usize) -> Result<f64> {
    let g = exact_words(m, n)?;
    Ok((g.count() as f64).ln() / g.length as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(v: &[&str]) -> Vec<String> {
        let mut v: Vec<String> = v.iter().map(|s| s.to_string()).collect();
        v.sort();
        v
    }

    #[test]
    fn small_generations_m1() {
        assert_eq!(exact_words(1, 1).unwrap().as_strings(), sorted(&["b"]));
        assert_eq!(exact_words(1, 2).unwrap().as_strings(), sorted(&["a"]));
        assert_eq!(exact_words(1, 3).unwrap().as_strings(), sorted(&["ba", "ab"]));
        let g4 = exact_words(1, 4).unwrap();
        assert_eq!(g4.as_strings(), sorted(&["aab", "aba", "baa"]));
        assert_eq!(g4.length, 3);
        // branches {a}·G₃ and G₃·{a} share "aba"
        assert_eq!(g4.raw_count, 4);
    }

    #[test]
    fn lengths_follow_recursion() {
        for (m, max_n) in [(1, 7), (2, 5), (3, 4)] {
            for n in 1..=max_n {
                let g = exact_words(m, n).unwrap();
                assert_eq!(g.length as u128, word_length(m, n));
                if n >= 3 {
                    assert_eq!(word_length(m, n), m as u128 * word_length(m, n - 1) + word_length(m, n - 2));
                }
            }
        }
        assert_eq!(word_length(2, 3), 3);
        assert_eq!(word_length(2, 4), 7);
        assert_eq!(word_length(2, 5), 17);
    }

    #[test]
    fn letter_counts_are_deterministic() {
        for (m, max_n) in [(1, 7), (2, 5), (3, 4)] {
            // letter counts of ζ^{n−1}(b) through the substitution matrix
            let (mut a, mut b) = (0usize, 1usize);
            for n in 1..=max_n {
                let g = exact_words(m, n).unwrap();
                for w in &g.words {
                    assert_eq!((w.count_a(), w.count_b()), (a, b), "m={m} n={n}");
                }
                (a, b) = (m as usize * a + b, a);
            }
        }
    }

    #[test]
    fn exact_words_are_legal() {
        use crate::subst::{legal_words, DEFAULT_MAX_ROUNDS};
        for (m, n) in [(1, 6), (1, 7), (2, 4), (3, 3)] {
            let g = exact_words(m, n).unwrap();
            let d = legal_words(m, g.length, DEFAULT_MAX_ROUNDS).unwrap();
            for w in &g.words {
                assert!(d.contains(w.letters()));
            }
        }
    }

    #[test]
    fn process_equality() {
        assert!(process_equality_check(1, 2).unwrap());
        assert!(process_equality_check(1, 3).unwrap());
        for n in 1..=7 {
            assert!(process_equality_check(1, n).unwrap(), "m=1 n={n}");
        }
        for n in 1..=4 {
            assert!(process_equality_check(2, n).unwrap(), "m=2 n={n}");
        }
        assert!(process_equality_check(3, 4).unwrap());
    }

    #[test]
    fn size_limit_is_reported() {
        let e = exact_words_with_limit(1, 9, 2_000_000).unwrap_err();
        match e {
            Error::SizeLimit { lower_bound, .. } => assert_eq!(lower_bound, 10080 * 288),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn entropy_table_values() {
        for (m, h) in [(1, 0.44439), (2, 0.40855), (3, 0.37139), (4, 0.33862)] {
            let r = entropy_series(m, 60).unwrap();
            assert!((r.value - h).abs() < 1e-5, "m={m}: {}", r.value);
            assert!(r.tail_bound < 1e-8);
        }
    }

    #[test]
    fn entropy_decreases_in_m() {
        let vals: Vec<f64> = (1..=10).map(|m| entropy_series(m, 80).unwrap().value).collect();
        for w in vals.windows(2) {
            assert!(w[0] > w[1]);
        }
        assert!(vals[9] > 0.0);
    }

    #[test]
    fn tail_bound_is_certified() {
        for m in 1..=4 {
            let reference = entropy_series(m, 400).unwrap().value;
            let mut last = 0.0;
            for t in [2, 3, 5, 10, 20, 40] {
                let r = entropy_series(m, t).unwrap();
                assert!(r.value >= last);
                last = r.value;
                assert!(reference - r.value <= r.tail_bound + 1e-15, "m={m} t={t}");
                assert!(reference >= r.value);
            }
        }
        assert!(entropy_series(1, 1).is_err());
    }

    #[test]
    fn empirical_entropy() {
        assert_eq!(entropy_empirical(1, 1).unwrap(), 0.0);
        assert!((entropy_empirical(1, 4).unwrap() - 3f64.ln() / 3.0).abs() < 1e-15);
        let h1 = entropy_series(1, 60).unwrap().value;
        let mut last = f64::NEG_INFINITY;
        for n in 3..=8 {
            let e = entropy_empirical(1, n).unwrap();
            assert!(e > last && e < h1);
            last = e;
        }
    }

    #[test]
    fn record_hides_words_above_threshold() {
        let g = exact_words(1, 5).unwrap();
        assert_eq!(g.record(100).words.unwrap().len(), 8);
        assert!(g.record(3).words.is_none());
        assert_eq!(g.record(3).count, 8);
    }
}
