//! Multiple ZCZ sequence sets from quadratic generalised Boolean functions.
//!
//! Variables `x0..x(m-1)` carry the function `f`, whose restrictions over `J`
//! are paths on `I = Z_(m-s) \ J` with `s` isolated vertices
//! `J_s = {m-s, ..., m-1}`. Variables `xm..x(m+k+1)` carry the seed function
//! `h`. Each set `t1` holds `2^(k+1)` sequences of length `2^(m+k+2)` with a
//! zero-correlation zone of `2^m`; sequences from different sets are
//! uncorrelated for shifts up to `2^(m-s) - 1`.
//!
//! Index bits `b_0..b_k` of a sequence form `t2`, bits `b_(k+1)..b_(k+s)`
//! form `t1`.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::{accf, ComplementaryCode, CorrelationValue};
use crate::error::{Error, Result};
use crate::gbf::graph::free_indices;
use crate::gbf::{binvec, check_restricted_path_form, Gbf, PathFormReport, UnimodularSequence};

/// Coefficients of the binary seed function
/// `h = sum c_r y_r y_0 + sum d_uv y_u y_v + sum e_a y_a + e'`
/// over local variables `y_0..y_(k+1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HCoefficients {
    /// `c_1..c_(k+1)`; the last must be 1.
    pub c: Vec<u8>,
    /// Pairs `(u, v)` with `1 <= u < v <= k` whose `d_uv` is 1.
    #[serde(default)]
    pub d: Vec<(usize, usize)>,
    /// `e_0..e_(k+1)`.
    pub e: Vec<u8>,
    #[serde(default)]
    pub e_const: u8,
}

impl HCoefficients {
    /// `c = (0, ..., 0, 1)`, everything else zero.
    pub fn minimal(k: usize) -> Self {
        let mut c = vec![0; k + 1];
        c[k] = 1;
        Self {
            c,
            d: Vec::new(),
            e: vec![0; k + 2],
            e_const: 0,
        }
    }

    pub fn random<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Self {
        let mut c: Vec<u8> = (0..=k).map(|_| rng.random_range(0..2)).collect();
        c[k] = 1;
        let d = (1..=k)
            .flat_map(|u| (u + 1..=k).map(move |v| (u, v)))
            .filter(|_| rng.random_bool(0.5))
            .collect();
        Self {
            c,
            d,
            e: (0..k + 2).map(|_| rng.random_range(0..2)).collect(),
            e_const: rng.random_range(0..2),
        }
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.c.len() != k + 1 {
            return bad(format!("h needs k+1 = {} c-coefficients, got {}", k + 1, self.c.len()));
        }
        if self.e.len() != k + 2 {
            return bad(format!("h needs k+2 = {} e-coefficients, got {}", k + 2, self.e.len()));
        }
        if self.c.iter().chain(&self.e).chain([&self.e_const]).any(|&b| b > 1) {
            return bad("h coefficients must be 0 or 1".into());
        }
        if self.c[k] != 1 {
            return bad(format!("c_{} must be nonzero", k + 1));
        }
        for &(u, v) in &self.d {
            if !(1 <= u && u < v && v <= k) {
                return bad(format!("d_({u},{v}) outside 1 <= u < v <= k = {k}"));
            }
        }
        Ok(())
    }

    /// `h` over `total_vars` binary variables with local `y_a` placed at `x_(offset + a)`.
    fn place(&self, k: usize, offset: usize, total_vars: usize) -> Result<Gbf> {
        self.validate(k)?;
        let mut h = Gbf::zero(2, total_vars)?;
        for (r, &c) in self.c.iter().enumerate() {
            h.add_term(&[offset + r + 1, offset], c as u32)?;
        }
        for &(u, v) in &self.d {
            h.add_term(&[offset + u, offset + v], 1)?;
        }
        for (a, &e) in self.e.iter().enumerate() {
            h.add_term(&[offset + a], e as u32)?;
        }
        h.add_term(&[], self.e_const as u32)?;
        Ok(h)
    }
}

/// The binary seed function over its own `k + 2` variables.
pub fn build_h(k: usize, coeffs: &HCoefficients) -> Result<Gbf> {
    coeffs.place(k, 0, k + 2)
}

/// `(q/2)` times the path through `I = Z_(m-s) \ J` in the order `perm`.
pub fn path_function(q: u32, m: usize, k: usize, s: usize, j: &[usize], perm: &[usize]) -> Result<Gbf> {
    let free = free_indices(m, k, s, j)?;
    crate::gbf::graph::check_permutation(perm, free.len())?;
    let mut f = Gbf::zero(q, m)?;
    for w in perm.windows(2) {
        f.add_term(&[free[w[0]], free[w[1]]], q / 2)?;
    }
    Ok(f)
}

/// Full parameter set of the construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ConstructionParams {
    pub q: u32,
    pub m: usize,
    pub k: usize,
    pub s: usize,
    /// `J = (j_0, ..., j_(k-s-1))`, ordered.
    pub j: Vec<usize>,
    /// Path order over `I`: the path visits `i_pi(0), ..., i_pi(m-k-1)`.
    pub pi: Vec<usize>,
    pub f: Gbf,
    pub h: HCoefficients,
}

#[derive(Deserialize)]
struct RawParams {
    q: u32,
    m: usize,
    k: usize,
    s: usize,
    j: Vec<usize>,
    pi: Vec<usize>,
    f: Gbf,
    h: HCoefficients,
}

impl TryFrom<RawParams> for ConstructionParams {
    type Error = Error;

    fn try_from(r: RawParams) -> Result<Self> {
        Self::new(r.q, r.m, r.k, r.s, r.j, r.pi, r.f, r.h)
    }
}

impl ConstructionParams {
    /// Validates all constraints, including the restricted path form of `f`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        q: u32,
        m: usize,
        k: usize,
        s: usize,
        j: Vec<usize>,
        pi: Vec<usize>,
        f: Gbf,
        h: HCoefficients,
    ) -> Result<Self> {
        let params = Self {
            q,
            m,
            k,
            s,
            j,
            pi,
            f,
            h,
        };
        params.check()?;
        Ok(params)
    }

    fn check(&self) -> Result<()> {
        crate::gbf::check_modulus(self.q)?;
        if self.f.q() != self.q {
            return Err(Error::InvalidParams(format!(
                "f is over Z_{}, construction is over Z_{}",
                self.f.q(),
                self.q
            )));
        }
        if self.m + self.k + 2 > 40 {
            return Err(Error::InvalidParams(format!(
                "sequence length 2^{} is too large",
                self.m + self.k + 2
            )));
        }
        self.h.validate(self.k)?;
        let report = self.path_form()?;
        if let Some(v) = report.violations.first() {
            return Err(Error::InvalidParams(format!(
                "f is not a path on I after restricting J={:?} to {:?}: {}",
                self.j, v.assignment, v.reason
            )));
        }
        Ok(())
    }

    /// Default `J = {0..k-s}`, identity path order, `f = (q/2)` times the path, minimal `h`.
    pub fn with_defaults(q: u32, m: usize, k: usize, s: usize) -> Result<Self> {
        if !(s <= k && k + 2 <= m) {
            return Err(Error::InvalidParams(format!(
                "need 0 <= s <= k <= m-2, got m={m}, k={k}, s={s}"
            )));
        }
        let j: Vec<usize> = (0..k - s).collect();
        let pi: Vec<usize> = (0..m - k).collect();
        let f = path_function(q, m, k, s, &j, &pi)?;
        Self::new(q, m, k, s, j, pi, f, HCoefficients::minimal(k))
    }

    /// Random valid parameters: random `J` (and its order), path order,
    /// affine terms, `J`-coupled quadratic terms of `f`, and random `h`.
    pub fn random<R: Rng + ?Sized>(q: u32, m: usize, k: usize, s: usize, rng: &mut R) -> Result<Self> {
        if !(s <= k && k + 2 <= m) {
            return Err(Error::InvalidParams(format!(
                "need 0 <= s <= k <= m-2, got m={m}, k={k}, s={s}"
            )));
        }
        let mut pool: Vec<usize> = (0..m - s).collect();
        pool.shuffle(rng);
        let j: Vec<usize> = pool[..k - s].to_vec();
        let mut pi: Vec<usize> = (0..m - k).collect();
        pi.shuffle(rng);
        let mut f = path_function(q, m, k, s, &j, &pi)?;
        f.add_term(&[], rng.random_range(0..q))?;
        for v in 0..m {
            f.add_term(&[v], rng.random_range(0..q))?;
        }
        for a in 0..m {
            for b in a + 1..m {
                if j.contains(&a) || j.contains(&b) {
                    f.add_term(&[a, b], rng.random_range(0..q))?;
                }
            }
        }
        Self::new(q, m, k, s, j, pi, f, HCoefficients::random(k, rng))
    }

    pub fn path_form(&self) -> Result<PathFormReport> {
        check_restricted_path_form(&self.f, self.m, self.k, self.s, &self.j, &self.pi)
    }

    /// `J` followed by `J_s`: `j_0, ..., j_(k-1)`.
    pub fn full_j(&self) -> Vec<usize> {
        self.j.iter().copied().chain(self.m - self.s..self.m).collect()
    }

    /// `I = Z_(m-s) \ J`, ascending.
    pub fn free(&self) -> Vec<usize> {
        free_indices(self.m, self.k, self.s, &self.j).expect("validated")
    }

    /// End vertices `(gamma1, gamma2) = (i_pi(0), i_pi(m-k-1))`.
    pub fn ends(&self) -> (usize, usize) {
        let free = self.free();
        (free[self.pi[0]], free[self.pi[self.pi.len() - 1]])
    }

    pub fn set_count(&self) -> usize {
        1 << self.s
    }

    pub fn set_size(&self) -> usize {
        1 << (self.k + 1)
    }

    pub fn sequence_len(&self) -> usize {
        1 << (self.m + self.k + 2)
    }

    /// Per-set zone `2^m`.
    pub fn zone(&self) -> usize {
        1 << self.m
    }

    /// Inter-set zone `2^(m-s) - 1`.
    pub fn cross_zone(&self) -> usize {
        (1 << (self.m - self.s)) - 1
    }

    /// Bits `b_0..b_(k+s)`: `t2` in the low `k+1`, `t1` in the high `s`.
    pub fn index_bits(&self, t1: usize, t2: usize) -> Vec<u8> {
        let mut b = binvec(t2 as u64, self.k + 1);
        b.extend(binvec(t1 as u64, self.s));
        b
    }

    fn check_indices(&self, t1: usize, t2: usize) -> Result<()> {
        if t1 >= self.set_count() || t2 >= self.set_size() {
            return Err(Error::InvalidParams(format!(
                "index (t1={t1}, t2={t2}) outside {} sets of {}",
                self.set_count(),
                self.set_size()
            )));
        }
        Ok(())
    }

    /// The seed function placed on `xm..x(m+k+1)` and lifted to `Z_q` by `q/2`.
    pub fn h_function(&self) -> Result<Gbf> {
        self.h.place(self.k, self.m, self.m + self.k + 2)?.lift_binary(self.q)
    }

    /// Row `row` of the complementary code `S^(t1, t2)`; row bits are
    /// `d_0..d_(k-1)` (low) and `d` (bit `k`).
    pub fn ccc_row_function(&self, t1: usize, t2: usize, row: usize) -> Result<Gbf> {
        self.check_indices(t1, t2)?;
        let (k, s) = (self.k, self.s);
        let b = self.index_bits(t1, t2);
        let d = binvec(row as u64, k + 1);
        let js = self.full_j();
        let (g1, g2) = self.ends();
        let mut g = Gbf::zero(2, self.m)?;
        for beta in 0..k {
            g.add_term(&[js[beta]], d[beta] as u32)?;
            g.add_term(&[js[beta]], b[beta] as u32)?;
        }
        g.add_term(&[g1], d[k] as u32)?;
        for beta in k - s..k {
            g.add_term(&[], (d[beta] * b[s + 1 + beta]) as u32)?;
        }
        g.add_term(&[g2], b[k] as u32)?;
        &self.f + &g.lift_binary(self.q)?
    }

    /// Generating function of sequence `t2` in set `t1`.
    pub fn sequence_function(&self, t1: usize, t2: usize) -> Result<Gbf> {
        self.check_indices(t1, t2)?;
        let (m, k, s) = (self.m, self.k, self.s);
        let n = m + k + 2;
        let b = self.index_bits(t1, t2);
        let js = self.full_j();
        let (g1, g2) = self.ends();
        let mut g = Gbf::zero(2, n)?;
        for beta in 0..k {
            g.add_term(&[m + beta, js[beta]], 1)?;
            g.add_term(&[js[beta]], b[beta] as u32)?;
        }
        for beta in k - s..k {
            g.add_term(&[m + beta], b[s + 1 + beta] as u32)?;
        }
        g.add_term(&[m + k, g1], 1)?;
        g.add_term(&[g2], b[k] as u32)?;
        let base = &self.f.with_vars(n)? + &self.h_function()?;
        &base? + &g.lift_binary(self.q)?
    }
}

/// The parameters of the worked example with `(q, m, k, s) = (2, 4, 2, 1)`:
/// `J = {0}`, `J_s = {3}`, `I = {1, 2}`,
/// `f = x0x1 + x0x2 + x0x3 + x1x2 + x1 + x2`, `h = x4x5 + x4x6 + x4x7 + x4`.
///
/// The path order is `(x2, x1)`, which attaches `x6` to `x2` and puts the
/// `b_2` term on `x1`, as in the published sequence sets.
pub fn example1() -> ConstructionParams {
    let f = Gbf::from_terms(
        2,
        4,
        [
            (vec![0, 1], 1),
            (vec![0, 2], 1),
            (vec![0, 3], 1),
            (vec![1, 2], 1),
            (vec![1], 1),
            (vec![2], 1),
        ],
    )
    .expect("static");
    let h = HCoefficients {
        c: vec![1, 1, 1],
        d: Vec::new(),
        e: vec![1, 0, 0, 0],
        e_const: 0,
    };
    ConstructionParams::new(2, 4, 2, 1, vec![0], vec![1, 0], f, h).expect("example parameters are valid")
}

/// `2^s` families of `2^(k+1)` complementary codes, indexed `[t1][t2]`, each
/// code having `2^(k+1)` rows of length `2^m`.
pub fn build_ccc_family(params: &ConstructionParams) -> Result<Vec<Vec<ComplementaryCode>>> {
    (0..params.set_count())
        .map(|t1| {
            (0..params.set_size())
                .map(|t2| {
                    let rows = (0..params.set_size())
                        .map(|row| Ok(params.ccc_row_function(t1, t2, row)?.psi()))
                        .collect::<Result<Vec<_>>>()?;
                    ComplementaryCode::new(rows)
                })
                .collect()
        })
        .collect()
}

/// `K` sequences declared as a `(K, Z, L)` ZCZ set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZczSequenceSet {
    pub sequences: Vec<UnimodularSequence>,
    pub z: usize,
}

impl ZczSequenceSet {
    pub fn k(&self) -> usize {
        self.sequences.len()
    }

    pub fn l(&self) -> usize {
        self.sequences.first().map_or(0, UnimodularSequence::len)
    }
}

/// `2^s` ZCZ sets with declared per-set zone `z` and inter-set zone `zc`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultipleZczFamily {
    pub params: ConstructionParams,
    /// `sets[t1][t2]`.
    pub sets: Vec<Vec<UnimodularSequence>>,
    pub z: usize,
    pub zc: usize,
}

impl MultipleZczFamily {
    pub fn sequence(&self, t1: usize, t2: usize) -> &UnimodularSequence {
        &self.sets[t1][t2]
    }

    pub fn set_count(&self) -> usize {
        self.sets.len()
    }

    pub fn set_size(&self) -> usize {
        self.sets.first().map_or(0, Vec::len)
    }

    pub fn sequence_len(&self) -> usize {
        self.params.sequence_len()
    }
}

/// Generates every sequence of every set. Members are built in parallel; the
/// result does not depend on the worker count.
pub fn build_multiple_zcz(params: &ConstructionParams) -> Result<MultipleZczFamily> {
    let size = params.set_size();
    let flat = (0..params.set_count() * size)
        .into_par_iter()
        .map(|idx| Ok(params.sequence_function(idx / size, idx % size)?.psi()))
        .collect::<Result<Vec<_>>>()?;
    let sets = flat.chunks(size).map(<[_]>::to_vec).collect();
    Ok(MultipleZczFamily {
        params: params.clone(),
        sets,
        z: params.zone(),
        zc: params.cross_zone(),
    })
}

/// All sequences of all sets as one set, declared with zone `2^(m-s) - 1`.
pub fn union_family(family: &MultipleZczFamily) -> ZczSequenceSet {
    ZczSequenceSet {
        sequences: family.sets.iter().flatten().cloned().collect(),
        z: family.zc,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftIdentityReport {
    pub k: usize,
    pub pass: bool,
    /// `(tau, sum)` for every `tau` where the signed sum is not zero.
    pub failures: Vec<(usize, i32)>,
}

/// Exhaustively checks
/// `(-1)^(h_t + h_(t+1)) + (-1)^(h_(t+2^(k+1)) + h_(t+1+2^(k+1))) = 0`
/// for `0 <= t < 2^(k+1)`, indices mod `2^(k+2)`.
pub fn check_h_shift_identity(h: &Gbf, k: usize) -> Result<ShiftIdentityReport> {
    if h.q() != 2 {
        return Err(Error::InvalidModulus(h.q()));
    }
    if h.m() != k + 2 {
        return Err(Error::DimensionMismatch {
            expected: k + 2,
            found: h.m(),
        });
    }
    let bits = h.psi();
    let bits = bits.exponents();
    let total = 1usize << (k + 2);
    let half = total / 2;
    let sign = |a: usize, b: usize| {
        if (bits[a % total] + bits[b % total]).is_multiple_of(2) {
            1
        } else {
            -1
        }
    };
    let failures: Vec<(usize, i32)> = (0..half)
        .map(|t| (t, sign(t, t + 1) + sign(t + half, t + 1 + half)))
        .filter(|&(_, v)| v != 0)
        .collect();
    Ok(ShiftIdentityReport {
        k,
        pass: failures.is_empty(),
        failures,
    })
}

/// The chunk structure of a family: chunk `c` (length `2^m`) of sequence
/// `(t1, t2)` is row `c mod 2^(k+1)` of `S^(t1, t2)` times `(-1)^(h_c)`.
#[derive(Debug, Clone)]
pub struct ChunkModel {
    ccc: Vec<Vec<ComplementaryCode>>,
    h_bits: Vec<u8>,
    chunk_len: usize,
    q: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChunkDecomposition {
    pub tau: usize,
    pub direct: CorrelationValue,
    pub decomposed: CorrelationValue,
    pub equal: bool,
}

impl ChunkModel {
    pub fn new(params: &ConstructionParams) -> Result<Self> {
        let h = build_h(params.k, &params.h)?;
        Ok(Self {
            ccc: build_ccc_family(params)?,
            h_bits: h.psi().exponents().iter().map(|&e| e as u8).collect(),
            chunk_len: params.zone(),
            q: params.q,
        })
    }

    pub fn chunk_len(&self) -> usize {
        self.chunk_len
    }

    /// The complementary codes `[t1][t2]` this model was built from.
    pub fn codes(&self) -> &[Vec<ComplementaryCode>] {
        &self.ccc
    }

    /// Expected chunk `c` of sequence `(t1, t2)`.
    pub fn expected_chunk(&self, t1: usize, t2: usize, c: usize) -> UnimodularSequence {
        let rows = self.ccc[t1][t2].rows();
        rows[c % rows.len()].rotated(self.h_bits[c] as u32 * (self.q / 2))
    }

    fn weight(&self, c: usize) -> i64 {
        let n = self.h_bits.len();
        if (self.h_bits[c % n] + self.h_bits[(c + 1) % n]).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Right-hand side of the chunk decomposition of
    /// `phi(z(t1, i), z(t1b, j))(tau)` for `0 <= tau <= 2^m`:
    /// `2 sum_c gamma(s_c, s'_c)(tau)
    ///  + sum_c [w_c + w_(c+l)] conj(gamma(s'_(c+1), s_c)(2^m - tau))`.
    pub fn decompose(&self, t1: usize, i: usize, t1b: usize, j: usize, tau: usize) -> Result<CorrelationValue> {
        if tau > self.chunk_len {
            return Err(Error::ShiftOutOfRange {
                shift: tau as i64,
                len: self.chunk_len,
            });
        }
        let a = self.ccc[t1][i].rows();
        let b = self.ccc[t1b][j].rows();
        let l = a.len();
        let mut total = CorrelationValue::ZERO;
        for c in 0..l {
            total = total + accf(&a[c], &b[c], tau as i64)?.scale(2);
            let w = self.weight(c) + self.weight(c + l);
            if w != 0 {
                let tail = accf(&b[(c + 1) % l], &a[c], (self.chunk_len - tau) as i64)?.conj();
                total = total + tail.scale(w);
            }
        }
        Ok(total)
    }

    /// Compares a directly computed periodic correlation of two sequences
    /// with the chunk decomposition.
    #[allow(clippy::too_many_arguments)]
    pub fn check(
        &self,
        za: &UnimodularSequence,
        zb: &UnimodularSequence,
        t1: usize,
        i: usize,
        t1b: usize,
        j: usize,
        tau: usize,
    ) -> Result<ChunkDecomposition> {
        let direct = crate::correlation::pccf_cyclic(za, zb, tau as i64)?;
        let decomposed = self.decompose(t1, i, t1b, j, tau)?;
        Ok(ChunkDecomposition {
            tau,
            direct,
            decomposed,
            equal: direct.matches(&decomposed),
        })
    }
}

/// Direct periodic correlation of `z(t1, i)` and `z(t1b, j)` at `tau`
/// against its chunk decomposition built from the complementary codes.
pub fn check_chunk_decomposition(
    family: &MultipleZczFamily,
    t1: usize,
    t1b: usize,
    i: usize,
    j: usize,
    tau: usize,
) -> Result<ChunkDecomposition> {
    let model = ChunkModel::new(&family.params)?;
    model.check(family.sequence(t1, i), family.sequence(t1b, j), t1, i, t1b, j, tau)
}
