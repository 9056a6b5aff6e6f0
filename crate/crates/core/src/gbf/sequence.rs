use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A length-`L` sequence of `q`-th roots of unity stored as exponents.
///
/// Entry `i` is `omega^exponents[i]` with `omega = exp(2*pi*i/q)`, unless the
/// optional zero mask marks it as a literal zero (restricted sequences).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnimodularSequence {
    q: u32,
    exponents: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    zero_mask: Option<Vec<bool>>,
}

impl UnimodularSequence {
    pub fn new(q: u32, exponents: Vec<u32>) -> Result<Self> {
        Self::with_mask(q, exponents, None)
    }

    pub fn with_mask(q: u32, exponents: Vec<u32>, zero_mask: Option<Vec<bool>>) -> Result<Self> {
        super::check_modulus(q)?;
        if exponents.is_empty() {
            return Err(Error::EmptySequence);
        }
        if let Some((position, &exponent)) = exponents.iter().enumerate().find(|(_, &e)| e >= q) {
            return Err(Error::ExponentOutOfRange { position, exponent, q });
        }
        if let Some(mask) = &zero_mask {
            if mask.len() != exponents.len() {
                return Err(Error::LengthMismatch {
                    left: exponents.len(),
                    right: mask.len(),
                });
            }
        }
        Ok(Self {
            q,
            exponents,
            zero_mask,
        })
    }

    pub(crate) fn from_exponents_unchecked(q: u32, exponents: Vec<u32>, zero_mask: Option<Vec<bool>>) -> Self {
        debug_assert!(exponents.iter().all(|&e| e < q));
        Self {
            q,
            exponents,
            zero_mask,
        }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    /// Raw exponents; masked positions keep the exponent of the unrestricted sequence.
    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn zero_mask(&self) -> Option<&[bool]> {
        self.zero_mask.as_deref()
    }

    pub fn is_masked(&self, i: usize) -> bool {
        self.zero_mask.as_ref().is_some_and(|m| m[i])
    }

    /// Exponent at `i`, or `None` if the entry is a literal zero.
    pub fn exponent(&self, i: usize) -> Option<u32> {
        if self.is_masked(i) {
            None
        } else {
            self.exponents.get(i).copied()
        }
    }

    /// Number of nonzero entries.
    pub fn support_len(&self) -> usize {
        match &self.zero_mask {
            Some(mask) => mask.iter().filter(|&&z| !z).count(),
            None => self.len(),
        }
    }

    /// Complex value of entry `i`.
    pub fn value(&self, i: usize) -> (f64, f64) {
        match self.exponent(i) {
            None => (0.0, 0.0),
            Some(e) => {
                let angle = 2.0 * std::f64::consts::PI * e as f64 / self.q as f64;
                (angle.cos(), angle.sin())
            }
        }
    }

    /// Entries as `+1/-1`; `None` unless `q = 2` and unmasked.
    pub fn as_bipolar(&self) -> Option<Vec<i32>> {
        if self.q != 2 || self.zero_mask.is_some() {
            return None;
        }
        Some(self.exponents.iter().map(|&e| 1 - 2 * e as i32).collect())
    }

    /// Multiplies every entry by `omega^shift`.
    pub fn rotated(&self, shift: u32) -> Self {
        let q = self.q;
        Self {
            q,
            exponents: self.exponents.iter().map(|&e| (e + shift % q) % q).collect(),
            zero_mask: self.zero_mask.clone(),
        }
    }

    /// Consecutive block `[start, start + len)` as its own sequence.
    pub fn slice(&self, start: usize, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::EmptySequence);
        }
        if start + len > self.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: start + len,
            });
        }
        Ok(Self {
            q: self.q,
            exponents: self.exponents[start..start + len].to_vec(),
            zero_mask: self.zero_mask.as_ref().map(|m| m[start..start + len].to_vec()),
        })
    }
}
