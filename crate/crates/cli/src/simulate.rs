use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context};
use zcz_core::export::{file_digest, FileDigest, RunManifest, MANIFEST_FILE};
use zcz_core::qscdma::{run_simulation, FamilySource, SimulationConfig};

use crate::Outcome;

pub const CSV_FILE: &str = "ber.csv";
pub const SUMMARY_FILE: &str = "summary.json";

#[derive(clap::Args)]
pub struct Args {
    /// TOML configuration (topology, SNR points, scale, seed).
    config: PathBuf,
    /// Output directory for ber.csv, summary.json and manifest.json.
    #[arg(short, long)]
    out: PathBuf,
    /// Overwrite results already in the output directory.
    #[arg(long)]
    force: bool,
}

pub fn load_config(path: &std::path::Path) -> anyhow::Result<SimulationConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut config: SimulationConfig =
        toml::from_str(&text).with_context(|| format!("invalid simulation config {}", path.display()))?;
    if let FamilySource::Dir { path: dir } = &mut config.family {
        if dir.is_relative() {
            if let Some(base) = path.parent() {
                *dir = base.join(&*dir);
            }
        }
    }
    Ok(config)
}

pub fn run(args: Args) -> anyhow::Result<Outcome> {
    let config = load_config(&args.config)?;
    if args.out.join(MANIFEST_FILE).exists() && !args.force {
        bail!(
            "{} already holds results; pass --force to replace them",
            args.out.display()
        );
    }
    let result = run_simulation(&config)?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;

    let mut csv = BufWriter::new(File::create(args.out.join(CSV_FILE))?);
    result.write_csv(&mut csv)?;
    csv.flush()?;
    let mut summary = serde_json::to_string_pretty(&result)?;
    summary.push('\n');
    fs::write(args.out.join(SUMMARY_FILE), summary)?;

    let mut manifest = RunManifest::new("simulate", serde_json::to_value(&config)?);
    manifest.inputs.push(FileDigest {
        path: args.config.display().to_string(),
        sha256: file_digest(&args.config)?,
    });
    for f in [CSV_FILE, SUMMARY_FILE] {
        manifest.outputs.push(FileDigest::of(&args.out, f.as_ref())?);
    }
    manifest.write(&args.out)?;

    println!(
        "{} users, L={}, delays <= {} chips (Zc={}), SNR axis {}{}",
        result.users,
        result.sequence_len,
        result.max_delay_chips,
        result.zc,
        result.snr_axis.label(),
        if config.noiseless { ", noiseless" } else { "" }
    );
    println!(
        "{:>8} {:>8} {:>12} {:>12} {:>12}",
        "snr_db", "user", "ber", "ci95", "bpsk"
    );
    for curve in &result.curves {
        for p in &curve.points {
            println!(
                "{:>8} {:>8} {:>12.4e} {:>12.2e} {:>12.4e}",
                p.snr_db,
                format!("{}.{}", curve.user.cluster, curve.user.user),
                p.ber,
                p.ci_halfwidth,
                p.theoretical
            );
        }
    }
    Ok(Outcome::Pass)
}
