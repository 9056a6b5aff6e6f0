use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{binvec, Gbf};
use crate::error::{Error, Result};

/// Graph of a quadratic form: one vertex per variable, one edge per nonzero
/// quadratic coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticGraph {
    pub vertices: BTreeSet<usize>,
    /// Edges as `(low, high)` index pairs.
    pub edges: BTreeSet<(usize, usize)>,
}

impl QuadraticGraph {
    /// Vertices are the variables in the function's support.
    pub(super) fn of(f: &Gbf) -> Result<Self> {
        let degree = f.degree();
        if degree > 2 {
            return Err(Error::DegreeTooHigh(degree));
        }
        let edges = f
            .terms()
            .filter(|(mono, _)| mono.len() == 2)
            .map(|(mono, _)| (mono[0], mono[1]))
            .collect();
        Ok(Self {
            vertices: f.support(),
            edges,
        })
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter_map(move |&(a, b)| {
            if a == v {
                Some(b)
            } else if b == v {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn degree_of(&self, v: usize) -> usize {
        self.neighbours(v).count()
    }

    /// Plain-text adjacency list, one `x<v>: x<a> x<b> ...` line per vertex.
    pub fn adjacency_list(&self) -> String {
        let mut out = String::new();
        for &v in &self.vertices {
            out.push_str(&format!("x{v}:"));
            let mut ns: Vec<usize> = self.neighbours(v).collect();
            ns.sort_unstable();
            for n in ns {
                out.push_str(&format!(" x{n}"));
            }
            out.push('\n');
        }
        out
    }
}

/// A restriction that did not reduce to the required path form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathFormViolation {
    /// Values assigned to the restricted variables, in the order given.
    pub assignment: Vec<u8>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathFormReport {
    pub valid: bool,
    /// Path vertices in traversal order `i_pi(0), ..., i_pi(m-k-1)`.
    pub path: Vec<usize>,
    pub gamma1: usize,
    pub gamma2: usize,
    pub violations: Vec<PathFormViolation>,
}

/// Checks that every restriction of `f` over the variables `restricted`
/// (the set `J`, `|J| = k - s`) is `q/2` times the path through
/// `I = Z_{m-s} \ J` in the order given by `perm`, plus affine terms.
///
/// Malformed parameters are errors; form violations go into the report.
pub fn check_restricted_path_form(
    f: &Gbf,
    m: usize,
    k: usize,
    s: usize,
    restricted: &[usize],
    perm: &[usize],
) -> Result<PathFormReport> {
    if f.m() != m {
        return Err(Error::InvalidParams(format!(
            "function declared over {} variables, expected m={m}",
            f.m()
        )));
    }
    let free = free_indices(m, k, s, restricted)?;
    check_permutation(perm, m - k)?;
    let path: Vec<usize> = perm.iter().map(|&p| free[p]).collect();
    let half = f.q() / 2;
    let expected_edges: BTreeSet<(usize, usize)> = path.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))).collect();

    let mut violations = Vec::new();
    for e in 0..1u64 << restricted.len() {
        let assignment = binvec(e, restricted.len());
        let r = f.restrict(restricted, &assignment)?;
        let degree = r.degree();
        if degree > 2 {
            violations.push(PathFormViolation {
                assignment,
                reason: format!("restriction has a degree-{degree} term"),
            });
            continue;
        }
        let mut problems = Vec::new();
        for (mono, c) in r.terms().filter(|(mono, _)| mono.len() == 2) {
            let edge = (mono[0], mono[1]);
            if !expected_edges.contains(&edge) {
                problems.push(format!("unexpected edge x{}x{} (coefficient {c})", edge.0, edge.1));
            } else if c != half {
                problems.push(format!(
                    "edge x{}x{} has coefficient {c}, expected {half}",
                    edge.0, edge.1
                ));
            }
        }
        for &(a, b) in &expected_edges {
            if r.coefficient(&[a, b]) == 0 {
                problems.push(format!("missing path edge x{a}x{b}"));
            }
        }
        if !problems.is_empty() {
            violations.push(PathFormViolation {
                assignment,
                reason: problems.join("; "),
            });
        }
    }

    Ok(PathFormReport {
        valid: violations.is_empty(),
        gamma1: path[0],
        gamma2: path[path.len() - 1],
        path,
        violations,
    })
}

/// `I = Z_{m-s} \ J` in ascending order, after checking the index constraints.
pub(crate) fn free_indices(m: usize, k: usize, s: usize, restricted: &[usize]) -> Result<Vec<usize>> {
    if !(s <= k && k + 2 <= m) {
        return Err(Error::InvalidParams(format!(
            "need 0 <= s <= k <= m-2, got m={m}, k={k}, s={s}"
        )));
    }
    if restricted.len() != k - s {
        return Err(Error::InvalidParams(format!(
            "J must have k-s = {} elements, got {}",
            k - s,
            restricted.len()
        )));
    }
    let mut seen = BTreeSet::new();
    for &j in restricted {
        if j >= m - s {
            return Err(Error::InvalidParams(format!(
                "J element {j} not in Z_(m-s) = 0..{}",
                m - s
            )));
        }
        if !seen.insert(j) {
            return Err(Error::DuplicateVariable(j));
        }
    }
    Ok((0..m - s).filter(|i| !seen.contains(i)).collect())
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::InvalidParams(format!(
            "permutation must have {n} entries, got {}",
            perm.len()
        )));
    }
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidParams(format!("{perm:?} is not a permutation of 0..{n}")));
        }
    }
    Ok(())
}
