//! The tropical semifield `Trop(y_1, ..., y_m)`.
//!
//! Elements are Laurent monomials `y^a`, stored as exponent vectors. The
//! multiplication is addition of exponents and the auxiliary addition `⊕`
//! is the componentwise minimum. With `m = 0` the semifield is trivial.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TropMonomial(Vec<i64>);

impl TropMonomial {
    pub fn new(exponents: Vec<i64>) -> Self {
        TropMonomial(exponents)
    }

    /// The multiplicative identity `1` of `Trop(y_1..y_m)`.
    pub fn identity(m: usize) -> Self {
        TropMonomial(vec![0; m])
    }

    /// The generator `y_i` (0-based).
    pub fn generator(m: usize, i: usize) -> Self {
        let mut e = vec![0; m];
        e[i] = 1;
        TropMonomial(e)
    }

    pub fn exponents(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// `a ⊕ b`: componentwise minimum of exponents.
    pub fn trop_add(&self, other: &Self) -> Result<Self> {
        Error::check_len(self.len(), other.len())?;
        Ok(TropMonomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.min(b))
                .collect(),
        ))
    }

    /// `a · b^k` for any integer `k`; `k = -1` gives division.
    pub fn mul_pow(&self, other: &Self, k: i64) -> Result<Self> {
        Error::check_len(self.len(), other.len())?;
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| {
                b.checked_mul(k)
                    .and_then(|kb| a.checked_add(kb))
                    .ok_or(Error::Overflow("tropical exponent"))
            })
            .collect::<Result<Vec<_>>>()
            .map(TropMonomial)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_pow(other, 1)
    }

    pub fn inverse(&self) -> Result<Self> {
        TropMonomial::identity(self.len()).mul_pow(self, -1)
    }

    /// `1 ⊕ y`, the tropical denominator factor of an exchange relation.
    pub fn one_plus(&self) -> Self {
        TropMonomial(self.0.iter().map(|&e| e.min(0)).collect())
    }
}

impl fmt::Display for TropMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("]")
    }
}
