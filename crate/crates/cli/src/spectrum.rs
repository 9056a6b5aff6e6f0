use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::Context;
use zcz_core::correlation::DEFAULT_SPECTRUM_CAP;
use zcz_core::export::read_family;
use zcz_core::{correlation_spectrum, UnimodularSequence};

use crate::Outcome;

#[derive(clap::Args)]
pub struct Args {
    /// Directory written by `construct`.
    dir: PathBuf,
    /// CSV destination; defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Refuse families whose spectrum has more entries (pairs x shifts).
    #[arg(long, default_value_t = DEFAULT_SPECTRUM_CAP)]
    max_entries: usize,
}

/// Rows are `pair_i,pair_j,shift,re,im` with sequences numbered set by set.
pub fn run(args: Args) -> anyhow::Result<Outcome> {
    let family = read_family(&args.dir).with_context(|| format!("reading family in {}", args.dir.display()))?;
    let seqs: Vec<UnimodularSequence> = family.sets.into_iter().flatten().collect();
    let spectrum = correlation_spectrum(&seqs, args.max_entries)?;
    match &args.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
            spectrum.write_csv(&mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = BufWriter::new(io::stdout().lock());
            match spectrum.write_csv(&mut w).and_then(|()| w.flush()) {
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => {}
                other => other?,
            }
        }
    }
    Ok(Outcome::Pass)
}
