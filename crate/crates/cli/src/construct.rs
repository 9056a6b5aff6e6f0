use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use rayon::prelude::*;
use serde_json::json;
use zcz_core::export::{write_family, FileDigest, RunManifest, FAMILY_DIR, MANIFEST_FILE};
use zcz_core::{build_multiple_zcz, certify_family, example1, path_function, ConstructionParams, Gbf, HCoefficients};

use crate::{report, Outcome};

#[derive(clap::Args)]
pub struct Args {
    /// Alphabet size (even); defaults to 2.
    #[arg(short = 'q')]
    q: Option<u32>,
    #[arg(short = 'm')]
    m: Option<usize>,
    #[arg(short = 'k')]
    k: Option<usize>,
    #[arg(short = 's')]
    s: Option<usize>,
    /// The worked (q, m, k, s) = (2, 4, 2, 1) family with two sets.
    #[arg(long, conflicts_with_all = ["q", "m", "k", "s", "params", "from_manifest", "random_seed"])]
    example1: bool,
    /// Complete parameter set as JSON (as stored in a manifest).
    #[arg(long, conflicts_with_all = ["q", "m", "k", "s", "from_manifest", "random_seed"])]
    params: Option<PathBuf>,
    /// Reuse the parameters recorded in an earlier output directory.
    #[arg(long, conflicts_with_all = ["q", "m", "k", "s", "random_seed"])]
    from_manifest: Option<PathBuf>,
    /// Draw a random valid f, J, path order and h from this seed.
    #[arg(long)]
    random_seed: Option<u64>,
    /// f in text form: a `q=<q> m=<m>` header, then `<coeff> * x0*x1` lines.
    #[arg(long = "f", value_name = "FILE")]
    f_file: Option<PathBuf>,
    /// Restricted variables J, comma separated and ordered.
    #[arg(long = "j", value_delimiter = ',')]
    j: Option<Vec<usize>>,
    /// Path order over the free variables, as a permutation of 0..m-k.
    #[arg(long, value_delimiter = ',')]
    pi: Option<Vec<usize>>,
    /// Seed-function coefficients as JSON, e.g. '{"c":[0,1],"d":[],"e":[1,0,0]}'.
    #[arg(long)]
    h: Option<String>,
    /// Output directory.
    #[arg(short, long)]
    out: PathBuf,
    /// Replace an existing family in the output directory.
    #[arg(long)]
    force: bool,
}

fn base_params(args: &Args) -> anyhow::Result<ConstructionParams> {
    if args.example1 {
        return Ok(example1());
    }
    if let Some(path) = &args.params {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return serde_json::from_str(&text).with_context(|| format!("parameters in {}", path.display()));
    }
    if let Some(dir) = &args.from_manifest {
        let manifest = RunManifest::read(dir).with_context(|| format!("reading manifest in {}", dir.display()))?;
        if manifest.command != "construct" {
            bail!(
                "{} records a `{}` run, not `construct`",
                dir.display(),
                manifest.command
            );
        }
        return serde_json::from_value(manifest.params).context("parameters recorded in manifest");
    }
    let (Some(m), Some(k), Some(s)) = (args.m, args.k, args.s) else {
        bail!("give -m, -k and -s (or --example1, --params, --from-manifest)");
    };
    if s > k {
        bail!("s={s} exceeds k={k}: the construction needs 0 <= s <= k <= m-2");
    }
    if k + 2 > m {
        bail!("k={k} is too large for m={m}: the construction needs k <= m-2");
    }
    let q = args.q.unwrap_or(2);
    Ok(match args.random_seed {
        Some(seed) => {
            use rand::SeedableRng;
            ConstructionParams::random(q, m, k, s, &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed))?
        }
        None => ConstructionParams::with_defaults(q, m, k, s)?,
    })
}

pub fn resolve_params(args: &Args) -> anyhow::Result<ConstructionParams> {
    let base = base_params(args)?;
    if args.f_file.is_none() && args.j.is_none() && args.pi.is_none() && args.h.is_none() {
        return Ok(base);
    }
    let ConstructionParams {
        q,
        m,
        k,
        s,
        j,
        pi,
        f,
        h,
    } = base;
    let path_changed = args.j.is_some() || args.pi.is_some();
    let j = args.j.clone().unwrap_or(j);
    let pi = match (&args.pi, path_changed) {
        (Some(pi), _) => pi.clone(),
        (None, true) if pi.len() != m - k => (0..m - k).collect(),
        (None, _) => pi,
    };
    let f = match &args.f_file {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            text.parse::<Gbf>()
                .with_context(|| format!("parsing f from {}", path.display()))?
        }
        None if path_changed => path_function(q, m, k, s, &j, &pi)?,
        None => f,
    };
    let h = match &args.h {
        Some(json) => serde_json::from_str::<HCoefficients>(json).context("parsing --h")?,
        None => h,
    };
    Ok(ConstructionParams::new(q, m, k, s, j, pi, f, h)?)
}

fn prepare_out(out: &Path, force: bool) -> anyhow::Result<()> {
    if out.join(MANIFEST_FILE).exists() || out.join(FAMILY_DIR).exists() {
        if !force {
            bail!("{} already holds a family; pass --force to replace it", out.display());
        }
        let family = out.join(FAMILY_DIR);
        if family.exists() {
            fs::remove_dir_all(&family).with_context(|| format!("removing {}", family.display()))?;
        }
    }
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    Ok(())
}

pub fn run(args: Args) -> anyhow::Result<Outcome> {
    let params = resolve_params(&args)?;
    prepare_out(&args.out, args.force)?;
    let family = build_multiple_zcz(&params)?;
    let files = write_family(&args.out, &family)?;
    let cert = certify_family(&family.sets, family.z, family.zc)?;

    let mut manifest = RunManifest::new("construct", serde_json::to_value(&params)?);
    manifest.outputs = files
        .par_iter()
        .map(|f| FileDigest::of(&args.out, f))
        .collect::<Result<_, _>>()?;
    manifest.certificates = Some(json!({
        "z": family.z,
        "zc": family.zc,
        "family": cert,
    }));
    manifest.write(&args.out)?;

    println!(
        "(q, m, k, s) = ({}, {}, {}, {}) -> {}",
        params.q,
        params.m,
        params.k,
        params.s,
        args.out.display()
    );
    report::print_family(&cert, family.zc);
    report::print_result(cert.pass);
    Ok(Outcome::from_pass(cert.pass))
}
