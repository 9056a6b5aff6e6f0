//! Aperiodic and periodic correlation with exact arithmetic where possible,
//! plus certificates for complementary codes and zero-correlation zones.
//!
//! For `q` dividing 4 every product `a_i * conj(b_j)` is a power of `i`, so
//! correlations are Gaussian integers and zero tests are exact. Other moduli
//! fall back to complex doubles with an absolute tolerance of `1e-9 * L`.

use std::io::Write;
use std::ops::Add;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gbf::UnimodularSequence;

/// Relative zero tolerance for inexact moduli, multiplied by the length.
pub const APPROX_TOLERANCE: f64 = 1e-9;

/// Default cap on the number of entries in a dense spectrum.
pub const DEFAULT_SPECTRUM_CAP: usize = 1 << 22;

/// A correlation value: an exact Gaussian integer or a toleranced complex double.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CorrelationValue {
    Exact { re: i64, im: i64 },
    Approx { re: f64, im: f64, tol: f64 },
}

impl CorrelationValue {
    pub const ZERO: Self = Self::Exact { re: 0, im: 0 };

    pub fn is_zero(&self) -> bool {
        match *self {
            Self::Exact { re, im } => re == 0 && im == 0,
            Self::Approx { re, im, tol } => re.hypot(im) <= tol,
        }
    }

    pub fn conj(self) -> Self {
        match self {
            Self::Exact { re, im } => Self::Exact { re, im: -im },
            Self::Approx { re, im, tol } => Self::Approx { re, im: -im, tol },
        }
    }

    pub fn re(&self) -> f64 {
        match *self {
            Self::Exact { re, .. } => re as f64,
            Self::Approx { re, .. } => re,
        }
    }

    pub fn im(&self) -> f64 {
        match *self {
            Self::Exact { im, .. } => im as f64,
            Self::Approx { im, .. } => im,
        }
    }

    pub fn magnitude(&self) -> f64 {
        self.re().hypot(self.im())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Self::Exact { .. })
    }

    /// Multiplies by an integer weight.
    pub fn scale(self, w: i64) -> Self {
        match self {
            Self::Exact { re, im } => Self::Exact { re: re * w, im: im * w },
            Self::Approx { re, im, tol } => Self::Approx {
                re: re * w as f64,
                im: im * w as f64,
                tol: tol * (w.unsigned_abs() as f64).max(1.0),
            },
        }
    }

    /// Equality: exact when both sides are exact, otherwise within the larger tolerance.
    pub fn matches(&self, other: &Self) -> bool {
        match (*self, *other) {
            (Self::Exact { re: a, im: b }, Self::Exact { re: c, im: d }) => a == c && b == d,
            _ => {
                let tol = self.tolerance().max(other.tolerance());
                (self.re() - other.re()).hypot(self.im() - other.im()) <= tol
            }
        }
    }

    fn tolerance(&self) -> f64 {
        match *self {
            Self::Exact { .. } => 0.0,
            Self::Approx { tol, .. } => tol,
        }
    }

    pub(crate) fn csv_fields(&self) -> (String, String) {
        match *self {
            Self::Exact { re, im } => (re.to_string(), im.to_string()),
            Self::Approx { re, im, .. } => (format!("{re:e}"), format!("{im:e}")),
        }
    }
}

impl Add for CorrelationValue {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (Self::Exact { re: a, im: b }, Self::Exact { re: c, im: d }) => Self::Exact { re: a + c, im: b + d },
            _ => Self::Approx {
                re: self.re() + rhs.re(),
                im: self.im() + rhs.im(),
                tol: self.tolerance().max(rhs.tolerance()),
            },
        }
    }
}

impl std::iter::Sum for CorrelationValue {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, Add::add)
    }
}

fn check_pair(a: &UnimodularSequence, b: &UnimodularSequence) -> Result<()> {
    if a.q() != b.q() {
        return Err(Error::ModulusMismatch {
            left: a.q(),
            right: b.q(),
        });
    }
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// `sum_{i<n} a[a_off+i] * conj(b[b_off+i])` with bounds already checked.
fn lag_sum(a: &UnimodularSequence, a_off: usize, b: &UnimodularSequence, b_off: usize, n: usize) -> CorrelationValue {
    let q = a.q();
    let ea = &a.exponents()[a_off..a_off + n];
    let eb = &b.exponents()[b_off..b_off + n];
    let masked = a.zero_mask().is_some() || b.zero_mask().is_some();

    if 4 % q == 0 {
        // every product is i^(step * (ea - eb))
        let step = 4 / q;
        let mut counts = [0i64; 4];
        for i in 0..n {
            if masked && (a.is_masked(a_off + i) || b.is_masked(b_off + i)) {
                continue;
            }
            let d = (ea[i] + q - eb[i]) % q;
            counts[(d * step) as usize] += 1;
        }
        return CorrelationValue::Exact {
            re: counts[0] - counts[2],
            im: counts[1] - counts[3],
        };
    }

    let mut hist = vec![0u64; q as usize];
    for i in 0..n {
        if masked && (a.is_masked(a_off + i) || b.is_masked(b_off + i)) {
            continue;
        }
        let d = (ea[i] + q - eb[i]) % q;
        hist[d as usize] += 1;
    }
    let (mut re, mut im) = (0.0, 0.0);
    for (d, &count) in hist.iter().enumerate() {
        if count != 0 {
            let angle = 2.0 * std::f64::consts::PI * d as f64 / q as f64;
            re += count as f64 * angle.cos();
            im += count as f64 * angle.sin();
        }
    }
    CorrelationValue::Approx {
        re,
        im,
        tol: APPROX_TOLERANCE * a.len() as f64,
    }
}

/// Aperiodic cross-correlation at shift `u`, `-L <= u <= L` (zero at `|u| = L`).
pub fn accf(a: &UnimodularSequence, b: &UnimodularSequence, u: i64) -> Result<CorrelationValue> {
    check_pair(a, b)?;
    let len = a.len();
    if u.unsigned_abs() as usize > len {
        return Err(Error::ShiftOutOfRange { shift: u, len });
    }
    let shift = u.unsigned_abs() as usize;
    let n = len - shift;
    Ok(if u >= 0 {
        lag_sum(a, 0, b, shift, n)
    } else {
        lag_sum(a, shift, b, 0, n)
    })
}

/// Periodic cross-correlation at `0 <= u < L`, assembled from two aperiodic terms.
pub fn pccf(a: &UnimodularSequence, b: &UnimodularSequence, u: i64) -> Result<CorrelationValue> {
    check_pair(a, b)?;
    let len = a.len() as i64;
    if !(0..len).contains(&u) {
        return Err(Error::ShiftOutOfRange { shift: u, len: a.len() });
    }
    Ok(accf(a, b, u)? + accf(b, a, len - u)?.conj())
}

/// `pccf` for any integer shift, reduced mod `L`.
pub fn pccf_cyclic(a: &UnimodularSequence, b: &UnimodularSequence, u: i64) -> Result<CorrelationValue> {
    pccf(a, b, u.rem_euclid(a.len() as i64))
}

/// An `M x L` matrix of sequences whose rows are correlated pairwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplementaryCode {
    rows: Vec<UnimodularSequence>,
}

impl ComplementaryCode {
    pub fn new(rows: Vec<UnimodularSequence>) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptySequence)?;
        for r in &rows[1..] {
            check_pair(first, r)?;
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[UnimodularSequence] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn row_len(&self) -> usize {
        self.rows[0].len()
    }
}

/// Sum of row-wise aperiodic correlations of two equally shaped codes.
pub fn code_accf(c1: &ComplementaryCode, c2: &ComplementaryCode, u: i64) -> Result<CorrelationValue> {
    if c1.row_count() != c2.row_count() || c1.row_len() != c2.row_len() {
        return Err(Error::ShapeMismatch {
            left_rows: c1.row_count(),
            left_len: c1.row_len(),
            right_rows: c2.row_count(),
            right_len: c2.row_len(),
        });
    }
    c1.rows
        .iter()
        .zip(&c2.rows)
        .map(|(a, b)| accf(a, b, u))
        .sum::<Result<CorrelationValue>>()
}

/// One violating correlation: `phi(seq_i, seq_j)(shift)` (or the code-level
/// aperiodic analogue) should have been zero or the in-phase peak.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub i: usize,
    pub j: usize,
    pub shift: i64,
    pub value: CorrelationValue,
}

/// Per-pair summary of violations: the first violating shift and the largest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairViolation {
    pub i: usize,
    pub j: usize,
    pub first: Witness,
    pub worst: Witness,
    pub count: usize,
}

fn summarize(i: usize, j: usize, hits: Vec<Witness>) -> Option<PairViolation> {
    let first = hits.first()?.clone();
    let worst = hits
        .iter()
        .max_by(|a, b| a.value.magnitude().total_cmp(&b.value.magnitude()))
        .cloned()
        .unwrap_or_else(|| first.clone());
    Some(PairViolation {
        i,
        j,
        first,
        worst,
        count: hits.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CccReport {
    pub codes: usize,
    pub rows: usize,
    pub len: usize,
    /// `P = M`, the shape condition for the `(P, P, L)` label.
    pub square: bool,
    pub pass: bool,
    pub violations: Vec<Witness>,
}

impl CccReport {
    /// Passes the correlation conditions and has as many codes as rows.
    pub fn is_ccc(&self) -> bool {
        self.pass && self.square
    }
}

fn check_code_shapes(codes: &[ComplementaryCode]) -> Result<(usize, usize)> {
    let first = codes.first().ok_or(Error::EmptySequence)?;
    let shape = (first.row_count(), first.row_len());
    for c in codes {
        if (c.row_count(), c.row_len()) != shape {
            return Err(Error::ShapeMismatch {
                left_rows: shape.0,
                left_len: shape.1,
                right_rows: c.row_count(),
                right_len: c.row_len(),
            });
        }
    }
    Ok(shape)
}

/// Checks the complete-complementary conditions: code auto-correlation `L*M`
/// in phase and zero elsewhere, and zero code cross-correlation at every
/// shift `|u| < L`.
pub fn verify_ccc(codes: &[ComplementaryCode]) -> Result<CccReport> {
    let (rows, len) = check_code_shapes(codes)?;
    let peak = (len * rows) as i64;
    let n = codes.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
    let violations: Vec<Witness> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let mut out = Vec::new();
            for u in -(len as i64 - 1)..len as i64 {
                let value = code_accf(&codes[a], &codes[b], u).expect("shapes checked");
                let ok = if a == b && u == 0 {
                    value.matches(&CorrelationValue::Exact { re: peak, im: 0 })
                } else {
                    value.is_zero()
                };
                if !ok {
                    out.push(Witness {
                        i: a,
                        j: b,
                        shift: u,
                        value,
                    });
                }
            }
            out
        })
        .flatten()
        .collect();
    Ok(CccReport {
        codes: n,
        rows,
        len,
        square: n == rows,
        pass: violations.is_empty(),
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeZoneReport {
    pub width: usize,
    pub pass: bool,
    pub violations: Vec<Witness>,
}

/// Code-level aperiodic cross-correlation between every code of `left` and
/// every code of `right` must vanish for `|u| < width`.
pub fn verify_code_cross_zone(
    left: &[ComplementaryCode],
    right: &[ComplementaryCode],
    width: usize,
) -> Result<CodeZoneReport> {
    let mut all = left.to_vec();
    all.extend_from_slice(right);
    let (_, len) = check_code_shapes(&all)?;
    let reach = width.min(len) as i64;
    let pairs: Vec<(usize, usize)> = (0..left.len())
        .flat_map(|a| (0..right.len()).map(move |b| (a, b)))
        .collect();
    let violations: Vec<Witness> = pairs
        .par_iter()
        .map(|&(a, b)| {
            ((1 - reach)..reach)
                .filter_map(|u| {
                    let value = code_accf(&left[a], &right[b], u).expect("shapes checked");
                    (!value.is_zero()).then_some(Witness {
                        i: a,
                        j: b,
                        shift: u,
                        value,
                    })
                })
                .collect::<Vec<_>>()
        })
        .flatten()
        .collect();
    Ok(CodeZoneReport {
        width,
        pass: violations.is_empty(),
        violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimality {
    Optimal,
    NearOptimal,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoFormula {
    /// `K(Z+1)/L`
    General,
    /// `2KZ/L`
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerformanceParameter {
    pub rho: f64,
    pub formula: RhoFormula,
    pub class: Optimality,
    /// `rho > 1`, impossible for a genuine ZCZ set.
    pub bound_violated: bool,
}

/// Performance parameter of a `(K, Z, L)` ZCZ set and its optimality class.
///
/// Comparisons are done on integers, so `rho = 1` is detected exactly.
pub fn performance_parameter(k: usize, z: usize, l: usize, binary: bool) -> PerformanceParameter {
    let (k, z, l) = (k as u128, z as u128, l as u128);
    let (num, near, formula) = if binary {
        (2 * k * z, 2 * k * (z + 1), RhoFormula::Binary)
    } else {
        (k * (z + 1), k * (z + 2), RhoFormula::General)
    };
    let class = if num == l {
        Optimality::Optimal
    } else if near == l {
        Optimality::NearOptimal
    } else {
        Optimality::Neither
    };
    PerformanceParameter {
        rho: num as f64 / l as f64,
        formula,
        class,
        bound_violated: num > l,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZczCertificate {
    pub k: usize,
    pub z: usize,
    pub l: usize,
    pub pass: bool,
    pub violations: Vec<PairViolation>,
    pub performance: PerformanceParameter,
}

impl ZczCertificate {
    pub fn first_witness(&self) -> Option<&Witness> {
        self.violations.first().map(|v| &v.first)
    }
}

fn check_set(set: &[UnimodularSequence]) -> Result<()> {
    let first = set.first().ok_or(Error::EmptySequence)?;
    for s in &set[1..] {
        check_pair(first, s)?;
    }
    Ok(())
}

/// Violations of `phi(a, b)(u) = 0` for `u` in `[-zone, zone]`, skipping the
/// in-phase term when `auto` (where the peak `L` is required instead).
/// Negative shifts come from `phi(a,b)(-u) = conj(phi(b,a)(u))`.
fn zone_hits(
    a: &UnimodularSequence,
    b: &UnimodularSequence,
    i: usize,
    j: usize,
    zone: usize,
    auto: bool,
) -> Vec<Witness> {
    let len = a.len() as i64;
    let mut hits = Vec::new();
    let peak = CorrelationValue::Exact {
        re: a.support_len() as i64,
        im: 0,
    };
    let forward = pccf(a, b, 0).expect("checked");
    let in_phase_ok = if auto {
        forward.matches(&peak)
    } else {
        forward.is_zero()
    };
    if !in_phase_ok {
        hits.push(Witness {
            i,
            j,
            shift: 0,
            value: forward,
        });
    }
    for u in 1..=zone as i64 {
        let wrapped = u % len;
        let value = pccf(a, b, wrapped).expect("checked");
        let bad = if auto && wrapped == 0 {
            !value.matches(&peak)
        } else {
            !value.is_zero()
        };
        if bad {
            hits.push(Witness { i, j, shift: u, value });
        }
        if !auto {
            let back = pccf(b, a, wrapped).expect("checked").conj();
            if !back.is_zero() {
                hits.push(Witness {
                    i,
                    j,
                    shift: -u,
                    value: back,
                });
            }
        }
    }
    hits
}

/// Certifies that `set` is a `(K, Z, L)` ZCZ set: periodic auto-correlations
/// vanish for `1 <= |u| <= Z`, cross-correlations for `0 <= |u| <= Z`.
pub fn verify_zcz(set: &[UnimodularSequence], z: usize) -> Result<ZczCertificate> {
    check_set(set)?;
    let n = set.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let violations: Vec<PairViolation> = pairs
        .par_iter()
        .filter_map(|&(i, j)| summarize(i, j, zone_hits(&set[i], &set[j], i, j, z, i == j)))
        .collect();
    let l = set[0].len();
    Ok(ZczCertificate {
        k: n,
        z,
        l,
        pass: violations.is_empty(),
        violations,
        performance: performance_parameter(n, z, l, set[0].q() == 2),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterZoneReport {
    pub zc: usize,
    pub pass: bool,
    /// `i` indexes the first set, `j` the second.
    pub violations: Vec<PairViolation>,
}

/// Checks `phi(a_i, b_j)(u) = 0` for every cross pair and `0 <= |u| <= zc`.
pub fn verify_inter_zccz(
    set_a: &[UnimodularSequence],
    set_b: &[UnimodularSequence],
    zc: usize,
) -> Result<InterZoneReport> {
    check_set(set_a)?;
    check_set(set_b)?;
    check_pair(&set_a[0], &set_b[0])?;
    let pairs: Vec<(usize, usize)> = (0..set_a.len())
        .flat_map(|i| (0..set_b.len()).map(move |j| (i, j)))
        .collect();
    let violations: Vec<PairViolation> = pairs
        .par_iter()
        .filter_map(|&(i, j)| summarize(i, j, zone_hits(&set_a[i], &set_b[j], i, j, zc, false)))
        .collect();
    Ok(InterZoneReport {
        zc,
        pass: violations.is_empty(),
        violations,
    })
}

/// Inter-set report for the set pair `(a, b)`, `a < b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetPairReport {
    pub a: usize,
    pub b: usize,
    pub report: InterZoneReport,
}

/// Every certificate claimed for a multiple ZCZ family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyCertificate {
    pub sets: Vec<ZczCertificate>,
    pub inter: Vec<SetPairReport>,
    /// The union of all sets, certified with zone `zc`.
    pub union: ZczCertificate,
    pub pass: bool,
}

/// Certifies each set with zone `z`, each pair of sets with cross zone `zc`,
/// and the union of all sets as a ZCZ set with zone `zc`.
pub fn certify_family(sets: &[Vec<UnimodularSequence>], z: usize, zc: usize) -> Result<FamilyCertificate> {
    let certs = sets.iter().map(|s| verify_zcz(s, z)).collect::<Result<Vec<_>>>()?;
    let mut inter = Vec::new();
    for a in 0..sets.len() {
        for b in a + 1..sets.len() {
            inter.push(SetPairReport {
                a,
                b,
                report: verify_inter_zccz(&sets[a], &sets[b], zc)?,
            });
        }
    }
    let all: Vec<UnimodularSequence> = sets.iter().flatten().cloned().collect();
    let union = verify_zcz(&all, zc)?;
    let pass = certs.iter().all(|c| c.pass) && inter.iter().all(|p| p.report.pass) && union.pass;
    Ok(FamilyCertificate {
        sets: certs,
        inter,
        union,
        pass,
    })
}

/// Dense periodic correlation table over all ordered pairs and all shifts.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    n: usize,
    len: usize,
    values: Vec<CorrelationValue>,
}

impl Spectrum {
    pub fn sequences(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `phi(seq_i, seq_j)(u)` for `0 <= u < L`.
    pub fn get(&self, i: usize, j: usize, u: usize) -> CorrelationValue {
        self.values[(i * self.n + j) * self.len + u]
    }

    /// `phi(seq_i, seq_j)(u)` for any signed shift.
    pub fn get_signed(&self, i: usize, j: usize, u: i64) -> CorrelationValue {
        self.get(i, j, u.rem_euclid(self.len as i64) as usize)
    }

    /// Largest `|phi|` over the pairs accepted by `pairs` and `|u| <= zone`.
    pub fn max_in_zone(
        &self,
        zone: usize,
        mut pairs: impl FnMut(usize, usize) -> bool,
        skip_in_phase_auto: bool,
    ) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if !pairs(i, j) {
                    continue;
                }
                for u in -(zone as i64)..=zone as i64 {
                    if skip_in_phase_auto && i == j && u.rem_euclid(self.len as i64) == 0 {
                        continue;
                    }
                    worst = worst.max(self.get_signed(i, j, u).magnitude());
                }
            }
        }
        worst
    }

    /// CSV with header `pair_i,pair_j,shift,re,im`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "pair_i,pair_j,shift,re,im")?;
        for i in 0..self.n {
            for j in 0..self.n {
                for u in 0..self.len {
                    let (re, im) = self.get(i, j, u).csv_fields();
                    writeln!(w, "{i},{j},{u},{re},{im}")?;
                }
            }
        }
        Ok(())
    }
}

/// Computes the full spectrum, refusing if it would exceed `cap` entries.
pub fn correlation_spectrum(seqs: &[UnimodularSequence], cap: usize) -> Result<Spectrum> {
    check_set(seqs)?;
    let n = seqs.len();
    let len = seqs[0].len();
    let entries = n.saturating_mul(n).saturating_mul(len);
    if entries > cap {
        return Err(Error::SpectrumTooLarge { entries, cap });
    }
    let values: Vec<CorrelationValue> = (0..n * n)
        .into_par_iter()
        .flat_map_iter(|p| {
            let (i, j) = (p / n, p % n);
            (0..len).map(move |u| pccf(&seqs[i], &seqs[j], u as i64).expect("checked"))
        })
        .collect();
    Ok(Spectrum { n, len, values })
}
