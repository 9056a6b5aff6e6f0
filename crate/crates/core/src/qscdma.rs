//! Multi-cluster uplink quasi-synchronous CDMA over a constructed family.
//!
//! Cluster `c` uses set `c` of the family and user `u` of that cluster uses
//! sequence `u`. Each user sends BPSK data spread by its binary signature.
//! Delays are integer chips, drawn uniformly from `[0, max_delay_chips]` once
//! per user per iteration. Every bit window wraps around cyclically, so the
//! interference seen by a correlator is exactly a periodic cross-correlation.
//!
//! Per iteration the random streams depend only on `(seed, iteration)`. All
//! SNR points share one noise realisation per chip (common random numbers),
//! and counts are integer sums, so results are independent of thread count.

use std::io::Write;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::{build_multiple_zcz, example1, ConstructionParams, MultipleZczFamily};
use crate::error::{Error, Result};
use crate::export::{read_family, LoadedFamily};
use crate::gbf::UnimodularSequence;

const Z_95: f64 = 1.959_963_984_540_054;

/// Sets of signatures together with their certified zones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureFamily {
    pub sets: Vec<Vec<UnimodularSequence>>,
    pub z: usize,
    pub zc: usize,
}

impl From<MultipleZczFamily> for SignatureFamily {
    fn from(f: MultipleZczFamily) -> Self {
        Self {
            sets: f.sets,
            z: f.z,
            zc: f.zc,
        }
    }
}

impl From<LoadedFamily> for SignatureFamily {
    fn from(f: LoadedFamily) -> Self {
        Self {
            sets: f.sets,
            z: f.header.z,
            zc: f.header.zc,
        }
    }
}

/// Where a simulation takes its signatures from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilySource {
    /// Default-coefficient construction.
    Params {
        q: u32,
        m: usize,
        k: usize,
        s: usize,
    },
    Example1,
    /// A directory previously written by `construct`.
    Dir {
        path: PathBuf,
    },
}

impl FamilySource {
    pub fn resolve(&self) -> Result<SignatureFamily> {
        match self {
            Self::Params { q, m, k, s } => {
                Ok(build_multiple_zcz(&ConstructionParams::with_defaults(*q, *m, *k, *s)?)?.into())
            }
            Self::Example1 => Ok(build_multiple_zcz(&example1())?.into()),
            Self::Dir { path } => Ok(read_family(path)?.into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct UserId {
    pub cluster: usize,
    pub user: usize,
}

/// Signatures in global user order `cluster * users_per_cluster + user`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureAssignment {
    pub clusters: usize,
    pub users_per_cluster: usize,
    pub signatures: Vec<UnimodularSequence>,
}

impl SignatureAssignment {
    pub fn user_count(&self) -> usize {
        self.signatures.len()
    }

    pub fn index(&self, id: UserId) -> usize {
        id.cluster * self.users_per_cluster + id.user
    }

    pub fn id(&self, index: usize) -> UserId {
        UserId {
            cluster: index / self.users_per_cluster,
            user: index % self.users_per_cluster,
        }
    }

    pub fn sequence_len(&self) -> usize {
        self.signatures[0].len()
    }

    fn bipolar(&self) -> Result<Vec<Vec<i32>>> {
        self.signatures
            .iter()
            .map(|s| s.as_bipolar().ok_or(Error::NonBinarySignatures(s.q())))
            .collect()
    }
}

/// Cluster `c` gets set `c`; user `u` in it gets sequence `u`.
pub fn assign_signatures(
    family: &SignatureFamily,
    clusters: usize,
    users_per_cluster: usize,
) -> Result<SignatureAssignment> {
    if clusters == 0 || users_per_cluster == 0 {
        return Err(Error::InvalidParams("need at least one cluster and one user".into()));
    }
    if clusters > family.sets.len() {
        return Err(Error::CapacityExceeded(format!(
            "{clusters} clusters requested, family has {} sets",
            family.sets.len()
        )));
    }
    let set_size = family.sets.iter().map(Vec::len).min().unwrap_or(0);
    if users_per_cluster > set_size {
        return Err(Error::CapacityExceeded(format!(
            "{users_per_cluster} users per cluster requested, sets hold {set_size} sequences"
        )));
    }
    let signatures = family.sets[..clusters]
        .iter()
        .flat_map(|set| set[..users_per_cluster].iter().cloned())
        .collect();
    Ok(SignatureAssignment {
        clusters,
        users_per_cluster,
        signatures,
    })
}

/// How `snr_db` values are interpreted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SnrAxis {
    /// Eb/N0 with Eb = L chip energies.
    #[default]
    PerBit,
    /// Ec/N0 per chip; the per-bit value is L times larger.
    PerChip,
}

impl SnrAxis {
    pub fn label(self) -> &'static str {
        match self {
            Self::PerBit => "per-bit",
            Self::PerChip => "per-chip",
        }
    }

    /// Per-bit Eb/N0 in dB for a spreading length `len`.
    pub fn ebn0_db(self, snr_db: f64, len: usize) -> f64 {
        match self {
            Self::PerBit => snr_db,
            Self::PerChip => snr_db + 10.0 * (len as f64).log10(),
        }
    }

    /// Standard deviation of the real AWGN on each unit-energy chip.
    pub fn noise_sigma(self, snr_db: f64, len: usize) -> f64 {
        let n0 = 10f64.powf(-self.ebn0_db(snr_db, len) / 10.0) * len as f64;
        (n0 / 2.0).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub family: FamilySource,
    pub clusters: usize,
    pub users_per_cluster: usize,
    /// Users whose BER is reported; defaults to user 0 of every cluster.
    #[serde(default)]
    pub observed: Option<Vec<UserId>>,
    pub max_delay_chips: usize,
    pub snr_db: Vec<f64>,
    #[serde(default)]
    pub snr_axis: SnrAxis,
    #[serde(default)]
    pub noiseless: bool,
    pub bits_per_user: u64,
    pub iterations: u64,
    pub seed: u64,
}

impl SimulationConfig {
    pub fn observed_users(&self) -> Vec<UserId> {
        self.observed
            .clone()
            .unwrap_or_else(|| (0..self.clusters).map(|cluster| UserId { cluster, user: 0 }).collect())
    }

    fn validate(&self, len: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.snr_db.is_empty() {
            return bad("snr_db must list at least one point".into());
        }
        if self.snr_db.iter().any(|x| x.is_nan()) {
            return bad("snr_db contains NaN".into());
        }
        if self.bits_per_user == 0 || self.iterations == 0 {
            return bad("bits_per_user and iterations must be positive".into());
        }
        if self.max_delay_chips >= len {
            return bad(format!(
                "max_delay_chips {} must be below L = {len}",
                self.max_delay_chips
            ));
        }
        let observed = self.observed_users();
        if observed.is_empty() {
            return bad("no observed users".into());
        }
        if let Some(u) = observed
            .iter()
            .find(|u| u.cluster >= self.clusters || u.user >= self.users_per_cluster)
        {
            return bad(format!("observed user {u:?} is outside the topology"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerPoint {
    pub snr_db: f64,
    pub ebn0_db: f64,
    pub ber: f64,
    pub errors: u64,
    pub bits: u64,
    /// 95% Wilson score half-width.
    pub ci_halfwidth: f64,
    pub theoretical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerCurve {
    pub user: UserId,
    pub user_id: usize,
    pub points: Vec<BerPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub snr_axis: SnrAxis,
    pub sequence_len: usize,
    pub users: usize,
    pub max_delay_chips: usize,
    pub zc: usize,
    /// Delays are within the certified inter-set zone and the per-set zone.
    pub mai_free_expected: bool,
    pub curves: Vec<BerCurve>,
}

impl SimulationResult {
    /// `snr_db,user_id,ber,ci_halfwidth,bits,errors,snr_axis`, one row per user per point.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "snr_db,user_id,ber,ci_halfwidth,bits,errors,snr_axis")?;
        for curve in &self.curves {
            for p in &curve.points {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    p.snr_db,
                    curve.user_id,
                    p.ber,
                    p.ci_halfwidth,
                    p.bits,
                    p.errors,
                    self.snr_axis.label()
                )?;
            }
        }
        Ok(())
    }

    /// Errors and bits summed over all observed users at point `index`.
    pub fn pooled(&self, index: usize) -> (u64, u64) {
        self.curves.iter().fold((0, 0), |(e, n), c| {
            (e + c.points[index].errors, n + c.points[index].bits)
        })
    }
}

/// Q(√(2·Eb/N0)) for BPSK in AWGN.
pub fn theoretical_bpsk_ber(ebn0_db: f64) -> f64 {
    let gamma = 10f64.powf(ebn0_db / 10.0);
    0.5 * statrs::function::erf::erfc(gamma.sqrt())
}

/// Half-width of the 95% Wilson score interval for `errors` out of `bits`.
pub fn wilson_halfwidth(errors: u64, bits: u64) -> f64 {
    if bits == 0 {
        return 0.5;
    }
    let n = bits as f64;
    let p = errors as f64 / n;
    let z2 = Z_95 * Z_95;
    Z_95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt()
}

/// Pooled two-proportion z statistic and its two-sided p-value.
pub fn two_proportion_test(errors_a: u64, bits_a: u64, errors_b: u64, bits_b: u64) -> (f64, f64) {
    let (na, nb) = (bits_a as f64, bits_b as f64);
    let pooled = (errors_a + errors_b) as f64 / (na + nb);
    let se = (pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb)).sqrt();
    if se == 0.0 {
        let same = errors_a as f64 / na == errors_b as f64 / nb;
        return if same { (0.0, 1.0) } else { (f64::INFINITY, 0.0) };
    }
    let z = (errors_a as f64 / na - errors_b as f64 / nb) / se;
    (z, statrs::function::erf::erfc(z.abs() / std::f64::consts::SQRT_2))
}

/// Signatures rotated by their users' delays: `out[u][n] = c_u[(n - d_u) mod L]`.
fn delayed_chips(chips: &[Vec<i32>], delays: &[usize]) -> Vec<Vec<i32>> {
    chips
        .iter()
        .zip(delays)
        .map(|(c, &d)| {
            let len = c.len();
            (0..len).map(|n| c[(n + len - d % len) % len]).collect()
        })
        .collect()
}

fn superpose(delayed: &[Vec<i32>], bits: &[i32], received: &mut [i32]) {
    received.fill(0);
    for (chips, &b) in delayed.iter().zip(bits) {
        for (r, &c) in received.iter_mut().zip(chips) {
            *r += b * c;
        }
    }
}

fn correlate(received: &[i32], chips: &[i32]) -> i64 {
    received.iter().zip(chips).map(|(&r, &c)| i64::from(r * c)).sum()
}

/// Noise-free correlator output for user `observed` given every user's delay and data bit (±1).
pub fn noiseless_statistic(
    assignment: &SignatureAssignment,
    delays: &[usize],
    bits: &[i32],
    observed: usize,
) -> Result<i64> {
    let n = assignment.user_count();
    if delays.len() != n || bits.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: delays.len().min(bits.len()),
        });
    }
    let delayed = delayed_chips(&assignment.bipolar()?, delays);
    let mut received = vec![0; assignment.sequence_len()];
    superpose(&delayed, bits, &mut received);
    Ok(correlate(&received, &delayed[observed]))
}

/// Bit pattern under which some user's noise-free statistic is not `±L`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterferenceWitness {
    pub delays: Vec<usize>,
    pub bits: Vec<i32>,
    pub observed: UserId,
    pub statistic: i64,
    pub expected: i64,
}

/// Randomised search over data patterns for multiple-access interference at fixed delays.
pub fn find_interference_witness(
    assignment: &SignatureAssignment,
    delays: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Option<InterferenceWitness>> {
    let n = assignment.user_count();
    if delays.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: delays.len(),
        });
    }
    let delayed = delayed_chips(&assignment.bipolar()?, delays);
    let len = assignment.sequence_len() as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut received = vec![0; assignment.sequence_len()];
    for _ in 0..trials {
        let bits: Vec<i32> = (0..n).map(|_| if rng.random() { 1 } else { -1 }).collect();
        superpose(&delayed, &bits, &mut received);
        for (v, chips) in delayed.iter().enumerate() {
            let statistic = correlate(&received, chips);
            let expected = len * i64::from(bits[v]);
            if statistic != expected {
                return Ok(Some(InterferenceWitness {
                    delays: delays.to_vec(),
                    bits,
                    observed: assignment.id(v),
                    statistic,
                    expected,
                }));
            }
        }
    }
    Ok(None)
}

fn iteration_rng(seed: u64, iteration: u64, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(iteration.wrapping_mul(2).wrapping_add(purpose));
    rng
}

/// Error counts for one iteration, `[observed][snr]`.
fn run_iteration(
    chips: &[Vec<i32>],
    observed: &[usize],
    sigmas: &[f64],
    config: &SimulationConfig,
    iteration: u64,
) -> Vec<u64> {
    let mut data = iteration_rng(config.seed, iteration, 0);
    let mut noise = iteration_rng(config.seed, iteration, 1);
    let len = chips[0].len();
    let delays: Vec<usize> = (0..chips.len())
        .map(|_| data.random_range(0..=config.max_delay_chips))
        .collect();
    let delayed = delayed_chips(chips, &delays);
    let mut received = vec![0i32; len];
    let mut gauss = vec![0f64; len];
    let mut bits = vec![0i32; chips.len()];
    let mut errors = vec![0u64; observed.len() * sigmas.len()];
    for _ in 0..config.bits_per_user {
        for b in bits.iter_mut() {
            *b = if data.random() { 1 } else { -1 };
        }
        superpose(&delayed, &bits, &mut received);
        if !config.noiseless {
            for g in gauss.iter_mut() {
                *g = noise.sample(StandardNormal);
            }
        }
        for (o, &v) in observed.iter().enumerate() {
            let clean = correlate(&received, &delayed[v]) as f64;
            let projected: f64 = if config.noiseless {
                0.0
            } else {
                gauss.iter().zip(&delayed[v]).map(|(&g, &c)| g * f64::from(c)).sum()
            };
            for (i, &sigma) in sigmas.iter().enumerate() {
                let decided = if clean + sigma * projected >= 0.0 { 1 } else { -1 };
                if decided != bits[v] {
                    errors[o * sigmas.len() + i] += 1;
                }
            }
        }
    }
    errors
}

/// Monte-Carlo BER for every observed user at every SNR point.
pub fn simulate_ber(family: &SignatureFamily, config: &SimulationConfig) -> Result<SimulationResult> {
    let assignment = assign_signatures(family, config.clusters, config.users_per_cluster)?;
    let len = assignment.sequence_len();
    config.validate(len)?;
    let chips = assignment.bipolar()?;
    let observed_ids = config.observed_users();
    let observed: Vec<usize> = observed_ids.iter().map(|&u| assignment.index(u)).collect();
    let sigmas: Vec<f64> = config
        .snr_db
        .iter()
        .map(|&db| config.snr_axis.noise_sigma(db, len))
        .collect();

    let width = observed.len() * sigmas.len();
    let errors = (0..config.iterations)
        .into_par_iter()
        .map(|it| run_iteration(&chips, &observed, &sigmas, config, it))
        .reduce(
            || vec![0u64; width],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );

    let bits = config.bits_per_user * config.iterations;
    let curves = observed_ids
        .iter()
        .zip(&observed)
        .enumerate()
        .map(|(o, (&user, &user_id))| BerCurve {
            user,
            user_id,
            points: config
                .snr_db
                .iter()
                .enumerate()
                .map(|(i, &snr_db)| {
                    let e = errors[o * sigmas.len() + i];
                    let ebn0_db = config.snr_axis.ebn0_db(snr_db, len);
                    BerPoint {
                        snr_db,
                        ebn0_db,
                        ber: e as f64 / bits as f64,
                        errors: e,
                        bits,
                        ci_halfwidth: wilson_halfwidth(e, bits),
                        theoretical: theoretical_bpsk_ber(ebn0_db),
                    }
                })
                .collect(),
        })
        .collect();

    Ok(SimulationResult {
        snr_axis: config.snr_axis,
        sequence_len: len,
        users: assignment.user_count(),
        max_delay_chips: config.max_delay_chips,
        zc: family.zc,
        mai_free_expected: config.max_delay_chips <= family.zc.min(family.z),
        curves,
    })
}

/// Resolves the configured family and runs [`simulate_ber`].
pub fn run_simulation(config: &SimulationConfig) -> Result<SimulationResult> {
    simulate_ber(&config.family.resolve()?, config)
}
