use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context};
use rayon::prelude::*;
use serde::Serialize;
use zcz_core::construction::{ChunkDecomposition, ChunkModel, ShiftIdentityReport};
use zcz_core::export::{read_family, RunManifest, MANIFEST_FILE};
use zcz_core::{build_h, certify_family, check_h_shift_identity, ConstructionParams, FamilyCertificate};

use crate::{report, Outcome};

pub const CERTIFICATES_FILE: &str = "certificates.json";

#[derive(clap::Args)]
pub struct Args {
    /// Directory written by `construct`.
    dir: PathBuf,
    /// Claimed per-set zone; defaults to the value in the sequence headers.
    #[arg(long)]
    z: Option<usize>,
    /// Claimed inter-set zone; defaults to the value in the sequence headers.
    #[arg(long)]
    zc: Option<usize>,
    /// Also check the seed-function shift identity and the chunk decomposition
    /// of every cross-correlation for shifts up to Z (needs the manifest).
    #[arg(long)]
    deep: bool,
    /// Where to write the certificates; defaults to `<dir>/certificates.json`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct ChunkFailure {
    t1: usize,
    i: usize,
    t1b: usize,
    j: usize,
    check: ChunkDecomposition,
}

#[derive(Serialize)]
struct DeepReport {
    shift_identity: ShiftIdentityReport,
    chunk_checks: usize,
    chunk_failures: Vec<ChunkFailure>,
    pass: bool,
}

#[derive(Serialize)]
struct Certificates {
    z: usize,
    zc: usize,
    family: FamilyCertificate,
    /// Outputs whose digest no longer matches the manifest.
    stale_files: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    deep: Option<DeepReport>,
    pass: bool,
}

fn deep_checks(
    params: &ConstructionParams,
    sets: &[Vec<zcz_core::UnimodularSequence>],
    z: usize,
) -> anyhow::Result<DeepReport> {
    if sets.len() != params.set_count() || sets.iter().any(|s| s.len() != params.set_size()) {
        bail!("family shape does not match the manifest parameters");
    }
    let shift_identity = check_h_shift_identity(&build_h(params.k, &params.h)?, params.k)?;
    let model = ChunkModel::new(params)?;
    let len = sets[0][0].len();
    let quads: Vec<(usize, usize, usize, usize)> = (0..sets.len())
        .flat_map(|t1| (0..sets.len()).flat_map(move |t1b| (0..params.set_size()).map(move |i| (t1, t1b, i))))
        .flat_map(|(t1, t1b, i)| (0..params.set_size()).map(move |j| (t1, i, t1b, j)))
        .collect();
    let taus = z.min(len - 1) + 1;
    let results: Vec<Vec<ChunkFailure>> = quads
        .par_iter()
        .map(|&(t1, i, t1b, j)| {
            let mut bad = Vec::new();
            for tau in 0..taus {
                let check = model.check(&sets[t1][i], &sets[t1b][j], t1, i, t1b, j, tau)?;
                if !check.equal {
                    bad.push(ChunkFailure { t1, i, t1b, j, check });
                }
            }
            Ok(bad)
        })
        .collect::<zcz_core::Result<_>>()?;
    let chunk_failures: Vec<ChunkFailure> = results.into_iter().flatten().collect();
    let pass = shift_identity.pass && chunk_failures.is_empty();
    Ok(DeepReport {
        shift_identity,
        chunk_checks: quads.len() * taus,
        chunk_failures,
        pass,
    })
}

pub fn run(args: Args) -> anyhow::Result<Outcome> {
    let family = read_family(&args.dir).with_context(|| format!("reading family in {}", args.dir.display()))?;
    let z = args.z.unwrap_or(family.header.z);
    let zc = args.zc.unwrap_or(family.header.zc);
    let cert = certify_family(&family.sets, z, zc)?;

    let manifest = if args.dir.join(MANIFEST_FILE).exists() {
        Some(RunManifest::read(&args.dir)?)
    } else {
        None
    };
    let stale_files = match &manifest {
        Some(m) => m.stale_outputs(&args.dir)?,
        None => Vec::new(),
    };
    let deep = if args.deep {
        let Some(manifest) = &manifest else {
            bail!("--deep needs {}/{MANIFEST_FILE}", args.dir.display());
        };
        let params: ConstructionParams =
            serde_json::from_value(manifest.params.clone()).context("parameters recorded in manifest")?;
        Some(deep_checks(&params, &family.sets, z)?)
    } else {
        None
    };

    let pass = cert.pass && stale_files.is_empty() && deep.as_ref().is_none_or(|d| d.pass);
    report::print_family(&cert, zc);
    for f in &stale_files {
        println!("digest mismatch: {f}");
    }
    if let Some(d) = &deep {
        println!(
            "seed-function shift identity (k={}): {}",
            d.shift_identity.k,
            if d.shift_identity.pass { "pass" } else { "FAIL" }
        );
        println!(
            "chunk decomposition: {} checks, {} mismatches",
            d.chunk_checks,
            d.chunk_failures.len()
        );
    }
    report::print_result(pass);

    let certificates = Certificates {
        z,
        zc,
        family: cert,
        stale_files,
        deep,
        pass,
    };
    let path = args.out.unwrap_or_else(|| args.dir.join(CERTIFICATES_FILE));
    let mut text = serde_json::to_string_pretty(&certificates)?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(Outcome::from_pass(pass))
}
