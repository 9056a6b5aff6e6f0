//! On-disk family layout and run manifests.
//!
//! A family directory looks like
//!
//! ```text
//! <out>/manifest.json
//! <out>/family/<t1>/<t2>.seq
//! ```
//!
//! Each `.seq` file starts with the header line `q=<q> L=<L> Z=<Z> Zc=<Zc>`
//! followed by one exponent per line. Files are written in ascending
//! `(t1, t2)` order and are byte-identical across runs with the same
//! parameters.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::construction::MultipleZczFamily;
use crate::error::{Error, Result};
use crate::gbf::UnimodularSequence;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const FAMILY_DIR: &str = "family";

/// Header of a `.seq` file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeqHeader {
    pub q: u32,
    pub len: usize,
    pub z: usize,
    pub zc: usize,
}

/// Renders one sequence file.
pub fn format_seq(seq: &UnimodularSequence, z: usize, zc: usize) -> String {
    let mut out = String::with_capacity(seq.len() * 3 + 32);
    let _ = writeln!(out, "q={} L={} Z={z} Zc={zc}", seq.q(), seq.len());
    for e in seq.exponents() {
        let _ = writeln!(out, "{e}");
    }
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Parses a sequence file, checking the header against the body.
pub fn parse_seq(text: &str) -> Result<(SeqHeader, UnimodularSequence)> {
    let mut lines = text.lines();
    let header_line = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let mut fields = [None; 4];
    for field in header_line.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| parse_err(1, format!("expected key=value, got `{field}`")))?;
        let slot = match key {
            "q" => 0,
            "L" => 1,
            "Z" => 2,
            "Zc" => 3,
            other => return Err(parse_err(1, format!("unknown header key `{other}`"))),
        };
        fields[slot] = Some(
            value
                .parse::<usize>()
                .map_err(|e| parse_err(1, format!("{key}: {e}")))?,
        );
    }
    let [Some(q), Some(len), Some(z), Some(zc)] = fields else {
        return Err(parse_err(1, "header must be `q=<q> L=<L> Z=<Z> Zc=<Zc>`"));
    };
    let exponents = lines
        .enumerate()
        .map(|(i, l)| {
            l.trim()
                .parse::<u32>()
                .map_err(|e| parse_err(i + 2, format!("exponent: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if exponents.len() != len {
        return Err(parse_err(
            1,
            format!("header declares L={len}, found {} entries", exponents.len()),
        ));
    }
    let seq = UnimodularSequence::new(q as u32, exponents)?;
    Ok((
        SeqHeader {
            q: q as u32,
            len,
            z,
            zc,
        },
        seq,
    ))
}

/// Relative path of sequence `(t1, t2)` inside an output directory.
pub fn seq_path(t1: usize, t2: usize) -> PathBuf {
    Path::new(FAMILY_DIR).join(t1.to_string()).join(format!("{t2}.seq"))
}

/// Writes `family/<t1>/<t2>.seq` under `dir`; returns the relative paths written.
pub fn write_family(dir: &Path, family: &MultipleZczFamily) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (t1, set) in family.sets.iter().enumerate() {
        fs::create_dir_all(dir.join(FAMILY_DIR).join(t1.to_string()))?;
        for (t2, seq) in set.iter().enumerate() {
            let rel = seq_path(t1, t2);
            fs::write(dir.join(&rel), format_seq(seq, family.z, family.zc))?;
            written.push(rel);
        }
    }
    Ok(written)
}

/// Sequences read back from a family directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedFamily {
    pub header: SeqHeader,
    /// `sets[t1][t2]`.
    pub sets: Vec<Vec<UnimodularSequence>>,
    /// Relative paths in `(t1, t2)` order.
    pub files: Vec<PathBuf>,
}

fn numbered_entries(dir: &Path, suffix: &str) -> Result<Vec<(usize, PathBuf)>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        if let Some(stem) = name.strip_suffix(suffix) {
            if let Ok(n) = stem.parse::<usize>() {
                out.push((n, path));
            }
        }
    }
    out.sort();
    for (expected, (n, path)) in out.iter().enumerate() {
        if *n != expected {
            return Err(Error::Parse {
                line: 0,
                msg: format!("{}: expected index {expected}, found {n}", path.display()),
            });
        }
    }
    Ok(out)
}

/// Reads `family/` under `dir`. All headers must agree.
pub fn read_family(dir: &Path) -> Result<LoadedFamily> {
    let root = dir.join(FAMILY_DIR);
    let mut sets = Vec::new();
    let mut files = Vec::new();
    let mut header: Option<SeqHeader> = None;
    for (t1, set_dir) in numbered_entries(&root, "")? {
        let mut set = Vec::new();
        for (t2, path) in numbered_entries(&set_dir, ".seq")? {
            let text = fs::read_to_string(&path)?;
            let (h, seq) = parse_seq(&text).map_err(|e| match e {
                Error::Parse { line, msg } => Error::Parse {
                    line,
                    msg: format!("{}: {msg}", path.display()),
                },
                other => other,
            })?;
            match header {
                None => header = Some(h),
                Some(prev) if prev != h => {
                    return Err(Error::Parse {
                        line: 1,
                        msg: format!("{}: header {h:?} differs from {prev:?}", path.display()),
                    })
                }
                Some(_) => {}
            }
            set.push(seq);
            files.push(seq_path(t1, t2));
        }
        if set.is_empty() {
            return Err(Error::EmptySequence);
        }
        sets.push(set);
    }
    let header = header.ok_or(Error::EmptySequence)?;
    if sets.iter().any(|s| s.len() != sets[0].len()) {
        return Err(Error::InvalidParams("sets have different sizes".into()));
    }
    Ok(LoadedFamily { header, sets, files })
}

/// SHA-256 of a file's contents, hex encoded.
pub fn file_digest(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

impl FileDigest {
    /// Digest of `base/rel`, recorded under the relative path.
    pub fn of(base: &Path, rel: &Path) -> Result<Self> {
        Ok(Self {
            path: rel.to_string_lossy().replace('\\', "/"),
            sha256: file_digest(&base.join(rel))?,
        })
    }
}

/// Record of one tool invocation, written as `manifest.json` next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    /// Full parameter set of the run (construction parameters or simulation config).
    pub params: serde_json::Value,
    #[serde(default)]
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub created_unix: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificates: Option<serde_json::Value>,
}

impl RunManifest {
    pub fn new(command: impl Into<String>, params: serde_json::Value) -> Self {
        Self {
            command: command.into(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            params,
            inputs: Vec::new(),
            outputs: Vec::new(),
            created_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            certificates: None,
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(dir.join(MANIFEST_FILE), text)?;
        Ok(())
    }

    pub fn read(dir: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST_FILE))?)?)
    }

    /// Outputs whose current digest differs from the recorded one.
    pub fn stale_outputs(&self, dir: &Path) -> Result<Vec<String>> {
        let mut stale = Vec::new();
        for out in &self.outputs {
            let path = dir.join(&out.path);
            if !path.exists() || file_digest(&path)? != out.sha256 {
                stale.push(out.path.clone());
            }
        }
        Ok(stale)
    }
}
