//! Generalised Boolean functions over `Z_q` and their unimodular sequences.
//!
//! A [`Gbf`] is a multilinear polynomial in `m` binary variables with
//! coefficients in `Z_q`, stored sparsely as a map from variable-index sets to
//! nonzero coefficients. Index `j` of the associated sequence corresponds to
//! the assignment `x_b = (j >> b) & 1`, so `x0` is the fastest-toggling
//! variable.

pub(crate) mod graph;
mod sequence;
mod text;

pub use graph::{check_restricted_path_form, PathFormReport, PathFormViolation, QuadraticGraph};
pub use sequence::UnimodularSequence;

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Variable-index set of a monomial, ascending and duplicate free.
pub type Monomial = Vec<usize>;

/// Largest supported variable count (indices must fit in a `u64` mask).
pub const MAX_VARS: usize = 63;

/// A `Z_q`-valued multilinear polynomial over `m` binary variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Gbf {
    q: u32,
    m: usize,
    terms: BTreeMap<Monomial, u32>,
}

pub(crate) fn check_modulus(q: u32) -> Result<()> {
    if q < 2 || !q.is_multiple_of(2) {
        return Err(Error::InvalidModulus(q));
    }
    Ok(())
}

impl Gbf {
    /// The zero function.
    pub fn zero(q: u32, m: usize) -> Result<Self> {
        check_modulus(q)?;
        if m > MAX_VARS {
            return Err(Error::TooManyVariables(m));
        }
        Ok(Self {
            q,
            m,
            terms: BTreeMap::new(),
        })
    }

    /// Builds a function from `(variables, coefficient)` pairs.
    ///
    /// Variables inside a term may be given in any order; repeated terms are
    /// summed and coefficients reduced mod `q`.
    pub fn from_terms<I, V>(q: u32, m: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (V, u32)>,
        V: AsRef<[usize]>,
    {
        let mut f = Self::zero(q, m)?;
        for (vars, coeff) in terms {
            f.add_term(vars.as_ref(), coeff)?;
        }
        Ok(f)
    }

    /// Adds `coeff * prod(x_v)` to the function.
    pub fn add_term(&mut self, vars: &[usize], coeff: u32) -> Result<()> {
        let mut mono: Monomial = vars.to_vec();
        mono.sort_unstable();
        for w in mono.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateVariable(w[0]));
            }
        }
        if let Some(&v) = mono.iter().find(|&&v| v >= self.m) {
            return Err(Error::VariableOutOfRange { index: v, m: self.m });
        }
        self.accumulate(mono, coeff as u64);
        Ok(())
    }

    fn accumulate(&mut self, mono: Monomial, coeff: u64) {
        use std::collections::btree_map::Entry;
        let q = self.q as u64;
        let add = coeff % q;
        match self.terms.entry(mono) {
            Entry::Vacant(slot) => {
                if add != 0 {
                    slot.insert(add as u32);
                }
            }
            Entry::Occupied(mut slot) => {
                let sum = (*slot.get() as u64 + add) % q;
                if sum == 0 {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum as u32;
                }
            }
        }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Number of declared variables.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Nonzero terms in canonical (ascending index set) order.
    pub fn terms(&self) -> impl Iterator<Item = (&[usize], u32)> + '_ {
        self.terms.iter().map(|(k, &c)| (k.as_slice(), c))
    }

    pub fn coefficient(&self, vars: &[usize]) -> u32 {
        let mut mono = vars.to_vec();
        mono.sort_unstable();
        self.terms.get(&mono).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest monomial degree; 0 for constants and the zero function.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// Variables that occur in at least one term.
    pub fn support(&self) -> BTreeSet<usize> {
        self.terms.keys().flatten().copied().collect()
    }

    /// Same polynomial declared over `m` variables (`m` must not drop a used one).
    pub fn with_vars(&self, m: usize) -> Result<Self> {
        if m > MAX_VARS {
            return Err(Error::TooManyVariables(m));
        }
        if let Some(&v) = self.support().iter().next_back().filter(|&&v| v >= m) {
            return Err(Error::VariableOutOfRange { index: v, m });
        }
        Ok(Self {
            q: self.q,
            m,
            terms: self.terms.clone(),
        })
    }

    /// Multiplies every coefficient by `factor` mod `q`.
    pub fn scaled(&self, factor: u32) -> Self {
        let mut out = Self {
            q: self.q,
            m: self.m,
            terms: BTreeMap::new(),
        };
        for (mono, &c) in &self.terms {
            out.accumulate(mono.clone(), c as u64 * factor as u64);
        }
        out
    }

    /// Reinterprets a `Z_2` function in `Z_q` via multiplication by `q/2`,
    /// so that `omega^(value)` equals `(-1)^(original value)`.
    pub fn lift_binary(&self, q: u32) -> Result<Self> {
        check_modulus(q)?;
        if self.q != 2 {
            return Err(Error::InvalidParams(format!(
                "binary lift needs a Z_2 function, got q={}",
                self.q
            )));
        }
        let mut out = Self::zero(q, self.m)?;
        for mono in self.terms.keys() {
            out.accumulate(mono.clone(), (q / 2) as u64);
        }
        Ok(out)
    }

    /// Evaluates the function at a binary assignment of length `m`.
    pub fn evaluate(&self, x: &[u8]) -> Result<u32> {
        if x.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                found: x.len(),
            });
        }
        let q = self.q as u64;
        let mut acc = 0u64;
        for (mono, &c) in &self.terms {
            if mono.iter().all(|&v| x[v] != 0) {
                acc = (acc + c as u64) % q;
            }
        }
        Ok(acc as u32)
    }

    /// Evaluates at the assignment encoded by the bits of `index` (LSB = `x0`).
    pub fn evaluate_index(&self, index: u64) -> u32 {
        let q = self.q as u64;
        let mut acc = 0u64;
        for (mono, &c) in &self.terms {
            if mono.iter().all(|&v| (index >> v) & 1 == 1) {
                acc += c as u64;
            }
        }
        (acc % q) as u32
    }

    /// The sequence `(omega^f(0), ..., omega^f(2^m - 1))` stored as exponents.
    pub fn psi(&self) -> UnimodularSequence {
        let len = 1usize << self.m;
        let q = self.q;
        let masks: Vec<(u64, u32)> = self
            .terms
            .iter()
            .map(|(mono, &c)| (mono.iter().fold(0u64, |acc, &v| acc | (1 << v)), c))
            .collect();
        let exponents = (0..len as u64)
            .map(|j| {
                let s: u64 = masks
                    .iter()
                    .filter(|(mask, _)| j & mask == *mask)
                    .map(|&(_, c)| c as u64)
                    .sum();
                (s % q as u64) as u32
            })
            .collect();
        UnimodularSequence::from_exponents_unchecked(q, exponents, None)
    }

    /// Substitutes `x_{vars[b]} = values[b]`. The result keeps `m` variables;
    /// the substituted ones simply no longer occur.
    pub fn restrict(&self, vars: &[usize], values: &[u8]) -> Result<Self> {
        let fixed = self.fixed_assignment(vars, values)?;
        let mut out = Self {
            q: self.q,
            m: self.m,
            terms: BTreeMap::new(),
        };
        for (mono, &c) in &self.terms {
            let mut survives = true;
            let mut rest = Vec::with_capacity(mono.len());
            for &v in mono {
                match fixed.get(&v) {
                    Some(0) => {
                        survives = false;
                        break;
                    }
                    Some(_) => {}
                    None => rest.push(v),
                }
            }
            if survives {
                out.accumulate(rest, c as u64);
            }
        }
        Ok(out)
    }

    /// `psi` of the restriction: entries whose index bits disagree with
    /// `values` on `vars` are literal zeros (recorded in the zero mask).
    pub fn psi_restricted(&self, vars: &[usize], values: &[u8]) -> Result<UnimodularSequence> {
        let fixed = self.fixed_assignment(vars, values)?;
        let full = self.psi();
        if fixed.is_empty() {
            return Ok(full);
        }
        let mut care = 0u64;
        let mut want = 0u64;
        for (&v, &val) in &fixed {
            care |= 1 << v;
            if val != 0 {
                want |= 1 << v;
            }
        }
        let mask = (0..full.len() as u64).map(|j| j & care != want).collect();
        Ok(UnimodularSequence::from_exponents_unchecked(
            self.q,
            full.exponents().to_vec(),
            Some(mask),
        ))
    }

    fn fixed_assignment(&self, vars: &[usize], values: &[u8]) -> Result<BTreeMap<usize, u8>> {
        if vars.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: vars.len(),
                found: values.len(),
            });
        }
        let mut fixed = BTreeMap::new();
        for (&v, &val) in vars.iter().zip(values) {
            if v >= self.m {
                return Err(Error::VariableOutOfRange { index: v, m: self.m });
            }
            if fixed.insert(v, val & 1).is_some() {
                return Err(Error::DuplicateVariable(v));
            }
        }
        Ok(fixed)
    }

    /// Graph of the quadratic part; fails if any term has degree above 2.
    pub fn quadratic_graph(&self) -> Result<QuadraticGraph> {
        QuadraticGraph::of(self)
    }
}

impl Add for &Gbf {
    type Output = Result<Gbf>;

    /// Sum over the larger variable count; moduli must agree.
    fn add(self, rhs: &Gbf) -> Result<Gbf> {
        if self.q != rhs.q {
            return Err(Error::ModulusMismatch {
                left: self.q,
                right: rhs.q,
            });
        }
        let mut out = self.with_vars(self.m.max(rhs.m))?;
        for (mono, &c) in &rhs.terms {
            out.accumulate(mono.clone(), c as u64);
        }
        Ok(out)
    }
}

/// Binary expansion of `index` over `m` bits, LSB first.
pub fn binvec(index: u64, m: usize) -> Vec<u8> {
    (0..m).map(|b| ((index >> b) & 1) as u8).collect()
}
