//! Benchmark corpora: seeded random programs with rational spectra, the
//! curated worked examples, and their on-disk layout.
//!
//! A corpus directory holds `manifest.json` and one `<id>.json` per program.
//! Each program file is the JSON loop form plus an `id` and, optionally, the
//! expected ANT locus in bracket text over `u1..un`.

pub mod curated;
pub mod generate;

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loopfront::json::ProgramJson;
use crate::loopfront::LoopProgram;

pub use curated::curated;
pub use generate::{generate, GenConfig};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusEntry {
    pub id: String,
    pub program: LoopProgram,
    /// Bracket text over `u1..un`.
    pub expected_locus: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EntryJson {
    pub id: String,
    #[serde(flatten)]
    pub program: ProgramJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_locus: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub file: String,
    pub class: String,
    pub n: usize,
    pub m: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    /// `None` for hand-made corpora.
    pub seed: Option<u64>,
    pub classes: Vec<String>,
    pub n_range: [usize; 2],
    pub m_range: [usize; 2],
    pub count: usize,
    pub construction: String,
    pub entries: Vec<ManifestEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corpus {
    pub manifest: Manifest,
    pub entries: Vec<CorpusEntry>,
}

impl Corpus {
    /// Wraps hand-made entries with a manifest describing them.
    pub fn from_entries(construction: &str, entries: Vec<CorpusEntry>) -> Self {
        let manifest = manifest_for(None, construction, &entries);
        Corpus { manifest, entries }
    }
}

fn manifest_for(seed: Option<u64>, construction: &str, entries: &[CorpusEntry]) -> Manifest {
    let mut classes: Vec<String> = entries.iter().map(|e| e.program.class_tag.short().to_string()).collect();
    classes.sort();
    classes.dedup();
    let range = |f: &dyn Fn(&CorpusEntry) -> usize| {
        let lo = entries.iter().map(f).min().unwrap_or(0);
        let hi = entries.iter().map(f).max().unwrap_or(0);
        [lo, hi]
    };
    Manifest {
        seed,
        classes,
        n_range: range(&|e| e.program.n()),
        m_range: range(&|e| e.program.m()),
        count: entries.len(),
        construction: construction.to_string(),
        entries: entries
            .iter()
            .map(|e| ManifestEntry {
                id: e.id.clone(),
                file: format!("{}.json", e.id),
                class: e.program.class_tag.short().to_string(),
                n: e.program.n(),
                m: e.program.m(),
            })
            .collect(),
    }
}

pub fn entry_to_json(e: &CorpusEntry) -> EntryJson {
    EntryJson { id: e.id.clone(), program: ProgramJson::from_program(&e.program), expected_locus: e.expected_locus.clone() }
}

pub fn entry_from_json(j: EntryJson) -> Result<CorpusEntry> {
    Ok(CorpusEntry { id: j.id, program: j.program.into_program()?, expected_locus: j.expected_locus })
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io { path: path.display().to_string(), msg: e.to_string() }
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("corpus values serialize");
    s.push('\n');
    s
}

/// Writes `manifest.json` and one file per entry, creating `dir` if needed.
pub fn write_corpus(dir: &Path, corpus: &Corpus) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    for (e, m) in corpus.entries.iter().zip(&corpus.manifest.entries) {
        let path = dir.join(&m.file);
        fs::write(&path, pretty(&entry_to_json(e))).map_err(|err| io_err(&path, err))?;
    }
    let path = dir.join("manifest.json");
    fs::write(&path, pretty(&corpus.manifest)).map_err(|e| io_err(&path, e))
}

/// Reads a corpus directory. Without a manifest every `*.json` file is an
/// entry, in file-name order.
pub fn read_corpus(dir: &Path) -> Result<Corpus> {
    let manifest_path = dir.join("manifest.json");
    let files: Vec<String> = if manifest_path.exists() {
        let text = fs::read_to_string(&manifest_path).map_err(|e| io_err(&manifest_path, e))?;
        let m: Manifest = serde_json::from_str(&text).map_err(|e| io_err(&manifest_path, e))?;
        m.entries.into_iter().map(|e| e.file).collect()
    } else {
        let mut names: Vec<String> = fs::read_dir(dir)
            .map_err(|e| io_err(dir, e))?
            .filter_map(|d| d.ok())
            .map(|d| d.file_name().to_string_lossy().into_owned())
            .filter(|n| n.ends_with(".json"))
            .collect();
        names.sort();
        names
    };
    let mut entries = Vec::with_capacity(files.len());
    for f in files {
        let path = dir.join(&f);
        let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
        let j: EntryJson = serde_json::from_str(&text).map_err(|e| io_err(&path, e))?;
        entries.push(entry_from_json(j).map_err(|e| io_err(&path, e))?);
    }
    let manifest = if manifest_path.exists() {
        let text = fs::read_to_string(&manifest_path).map_err(|e| io_err(&manifest_path, e))?;
        serde_json::from_str(&text).map_err(|e| io_err(&manifest_path, e))?
    } else {
        manifest_for(None, "directory listing", &entries)
    };
    Ok(Corpus { manifest, entries })
}
