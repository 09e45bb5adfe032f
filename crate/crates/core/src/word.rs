//! Reduced mutation words naming vertices of the n-regular tree.
//!
//! Directions are stored 0-based; text forms (display, parsing) are 1-based
//! and comma separated, with `-` for the empty word.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn root() -> Self {
        Word(Vec::new())
    }

    /// Builds a word from 0-based directions, rejecting immediate repeats.
    pub fn new(directions: Vec<usize>) -> Result<Self> {
        let w = Word(directions);
        if w.is_reduced() {
            Ok(w)
        } else {
            Err(Error::UnreducedWord(w))
        }
    }

    /// Builds a word from 0-based directions, cancelling immediate repeats.
    pub fn reduced(directions: impl IntoIterator<Item = usize>) -> Self {
        let mut w = Word::root();
        for k in directions {
            w.push_reduced(k);
        }
        w
    }

    pub fn directions(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|p| p[0] != p[1])
    }

    /// Extends by `k`; a trailing `k` cancels instead.
    pub fn push_reduced(&mut self, k: usize) {
        if self.0.last() == Some(&k) {
            self.0.pop();
        } else {
            self.0.push(k);
        }
    }

    pub fn extended(&self, k: usize) -> Word {
        let mut w = self.clone();
        w.push_reduced(k);
        w
    }

    pub fn parent(&self) -> Option<Word> {
        if self.0.is_empty() {
            None
        } else {
            Some(Word(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    fn common_prefix(&self, other: &Word) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .take_while(|(a, b)| a == b)
            .count()
    }

    /// The reduced word leading from `self` to `other` in the tree.
    pub fn path_to(&self, other: &Word) -> Word {
        let lcp = self.common_prefix(other);
        let mut out: Vec<usize> = self.0[lcp..].iter().rev().copied().collect();
        out.extend_from_slice(&other.0[lcp..]);
        Word(out)
    }

    /// Tree distance between two reduced words.
    pub fn distance(&self, other: &Word) -> usize {
        let lcp = self.common_prefix(other);
        self.0.len() + other.0.len() - 2 * lcp
    }

    /// Rejects directions outside `0..n`.
    pub fn check_rank(&self, n: usize) -> Result<()> {
        match self.0.iter().find(|&&k| k >= n) {
            Some(&k) => Err(Error::DirectionOutOfRange { k, n }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("-");
        }
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", k + 1)?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Parses `1,2,1`; `-`, `root`, and the empty string denote the root.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "-" || s == "root" {
            return Ok(Word::root());
        }
        let mut dirs = Vec::new();
        for part in s.split(',') {
            let k: usize = part
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad direction {part:?} in word {s:?}")))?;
            if k == 0 {
                return Err(Error::Parse(format!(
                    "directions are 1-based, got 0 in {s:?}"
                )));
            }
            dirs.push(k - 1);
        }
        Word::new(dirs)
    }
}
