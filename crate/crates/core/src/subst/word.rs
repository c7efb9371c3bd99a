use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Letter {
    A,
    B,
}

impl Letter {
    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'a' => Some(Letter::A),
            'b' => Some(Letter::B),
            _ => None,
        }
    }
}

/// A finite word over `{a, b}`.
///
/// Two-sided approximants (images of a seed like `a|a`) carry an origin
/// marker: the index of the first letter right of the seed boundary.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    letters: Vec<Letter>,
    origin: Option<usize>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word { letters, origin: None }
    }

    /// `left | right` with the origin at the start of `right`.
    pub fn two_sided(left: &Word, right: &Word) -> Self {
        let mut letters = left.letters.clone();
        letters.extend_from_slice(&right.letters);
        Word { letters, origin: Some(left.len()) }
    }

    pub fn with_origin(mut self, origin: usize) -> Self {
        assert!(origin <= self.letters.len(), "origin outside word");
        self.origin = Some(origin);
        self
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.letters
    }

    pub fn origin(&self) -> Option<usize> {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn count_a(&self) -> usize {
        self.letters.iter().filter(|&&l| l == Letter::A).count()
    }

    pub fn count_b(&self) -> usize {
        self.len() - self.count_a()
    }

    /// Letter-count vector `(|w|_a, |w|_b)`.
    pub fn counts(&self) -> [u64; 2] {
        let a = self.count_a() as u64;
        [a, self.len() as u64 - a]
    }

    /// Does `sub` occur as a factor of this word?
    pub fn contains(&self, sub: &[Letter]) -> bool {
        sub.is_empty() || self.letters.windows(sub.len()).any(|w| w == sub)
    }

    /// Number of (possibly overlapping) occurrences of `sub`.
    pub fn occurrences(&self, sub: &[Letter]) -> usize {
        if sub.is_empty() {
            return self.len() + 1;
        }
        self.letters.windows(sub.len()).filter(|w| *w == sub).count()
    }

    pub fn factor(&self, start: usize, len: usize) -> Word {
        Word::new(self.letters[start..start + len].to_vec())
    }
}

impl From<Vec<Letter>> for Word {
    fn from(letters: Vec<Letter>) -> Self {
        Word::new(letters)
    }
}

impl From<&[Letter]> for Word {
    fn from(letters: &[Letter]) -> Self {
        Word::new(letters.to_vec())
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Parses `aab` or, with an origin marker, `ab|a`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut letters = Vec::with_capacity(s.len());
        let mut origin = None;
        for c in s.trim().chars() {
            if c == '|' {
                if origin.is_some() {
                    return Err(Error::InvalidParameter(format!("more than one '|' in {s:?}")));
                }
                origin = Some(letters.len());
            } else {
                let l = Letter::from_char(c)
                    .ok_or_else(|| Error::InvalidParameter(format!("letter {c:?} not in {{a, b}}")))?;
                letters.push(l);
            }
        }
        Ok(Word { letters, origin })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::with_capacity(self.len() + 1);
        for (idx, l) in self.letters.iter().enumerate() {
            if self.origin == Some(idx) {
                s.push('|');
            }
            s.push(l.as_char());
        }
        if self.origin == Some(self.len()) {
            s.push('|');
        }
        f.write_str(&s)
    }
}

/// Plain `a`/`b` rendering of a letter slice.
pub fn letters_to_string(letters: &[Letter]) -> String {
    letters.iter().map(|l| l.as_char()).collect()
}
