//! Text dataset formats: a CSV gallery file and a JSON-lines probe file.
//!
//! Gallery files are UTF-8, a `dim=D` header line, then one record per
//! reference still: `label,f_1,...,f_D`. Components are written with 17
//! significant digits, which round-trips every binary64 value exactly, so a
//! saved problem reloads to bit-identical recognition results.
//!
//! Probe files hold one JSON object per line: `{"label": "...", "frames":
//! [[...], ...]}` with `label` optional. JSON numbers use the shortest
//! representation that round-trips.
//!
//! Labels are arbitrary strings mapped to contiguous class ids in order of
//! first appearance; [`LabelTable`] keeps the mapping so predictions can be
//! reported under the original names.

use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::feature::{FeatureVector, ProbeSequence};
use crate::gallery::{ClassId, Gallery};

pub const FORMAT_VERSION: &str = "1";

/// Paths of one on-disk dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetFiles {
    pub gallery: PathBuf,
    pub probes: PathBuf,
    pub version: String,
}

impl DatasetFiles {
    pub fn new(gallery: impl Into<PathBuf>, probes: impl Into<PathBuf>) -> Self {
        Self {
            gallery: gallery.into(),
            probes: probes.into(),
            version: FORMAT_VERSION.to_string(),
        }
    }
}

/// Bidirectional map between label strings and contiguous class ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelTable {
    names: Vec<String>,
}

impl LabelTable {
    /// Table naming each class by its decimal index, for synthetic output.
    pub fn numeric(classes: usize) -> Self {
        Self {
            names: (0..classes).map(|c| c.to_string()).collect(),
        }
    }

    /// Id of an existing label, or the next id for a new one.
    pub fn intern(&mut self, name: &str) -> ClassId {
        if let Some(id) = self.id_of(name) {
            return id;
        }
        self.names.push(name.to_string());
        self.names.len() - 1
    }

    pub fn id_of(&self, name: &str) -> Option<ClassId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn name_of(&self, id: ClassId) -> Option<&str> {
        self.names.get(id).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// A parsed gallery file.
#[derive(Debug, Clone)]
pub struct LoadedGallery {
    pub gallery: Gallery,
    pub labels: LabelTable,
}

/// A parsed probe record; the true label, when present, is kept as written.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedProbe {
    pub sequence: ProbeSequence,
    pub label: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct ProbeRecord {
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    frames: Vec<Vec<f64>>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn load_gallery(path: &Path) -> Result<LoadedGallery> {
    let content = std::fs::read_to_string(path)?;
    if content.trim().is_empty() {
        return Err(Error::EmptyGallery);
    }
    let mut lines = content.lines().enumerate();
    let (_, header) = lines.next().expect("non-empty content has a first line");
    let dim: usize = header
        .trim_end_matches('\r')
        .strip_prefix("dim=")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| parse_err(1, format!("expected dim=D header, got {header:?}")))?;
    if dim < 2 {
        return Err(parse_err(1, format!("dim must be at least 2, got {dim}")));
    }

    let mut labels = LabelTable::default();
    let mut entries: Vec<(FeatureVector, ClassId)> = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        let row = raw.trim_end_matches('\r');
        if row.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != dim + 1 {
            return Err(parse_err(
                line,
                format!(
                    "expected a label and {dim} components, got {} fields",
                    fields.len()
                ),
            ));
        }
        let mut values = Vec::with_capacity(dim);
        for (i, field) in fields[1..].iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| {
                parse_err(line, format!("component {}: cannot parse {field:?}", i + 1))
            })?;
            values.push(v);
        }
        let vector =
            FeatureVector::new(values).map_err(|e| parse_err(line, e.to_string()))?;
        entries.push((vector, labels.intern(fields[0])));
    }
    let gallery = Gallery::new(entries)?;
    Ok(LoadedGallery { gallery, labels })
}

pub fn save_gallery(path: &Path, gallery: &Gallery, labels: &LabelTable) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "dim={}", gallery.dim())?;
    for (vector, class) in gallery.entries() {
        let name = labels.name_of(class).ok_or(Error::UnknownClass(class))?;
        write!(w, "{name}")?;
        for v in vector.values() {
            // 17 significant digits: exact binary64 round-trip.
            write!(w, ",{v:.16e}")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_probes(path: &Path) -> Result<Vec<LoadedProbe>> {
    let content = std::fs::read_to_string(path)?;
    let mut probes = Vec::new();
    for (idx, raw) in content.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let record: ProbeRecord =
            serde_json::from_str(raw).map_err(|e| parse_err(line, e.to_string()))?;
        let mut frames = Vec::with_capacity(record.frames.len());
        for values in record.frames {
            frames.push(FeatureVector::new(values).map_err(|e| parse_err(line, e.to_string()))?);
        }
        let sequence =
            ProbeSequence::new(frames).map_err(|e| parse_err(line, e.to_string()))?;
        probes.push(LoadedProbe {
            sequence,
            label: record.label,
        });
    }
    Ok(probes)
}

pub fn save_probes(path: &Path, probes: &[LoadedProbe]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for probe in probes {
        let record = ProbeRecord {
            label: probe.label.clone(),
            frames: probe
                .sequence
                .frames()
                .iter()
                .map(|f| f.values().to_vec())
                .collect(),
        };
        let json = serde_json::to_string(&record)
            .map_err(|e| Error::InvalidConfig(format!("cannot encode probe record: {e}")))?;
        writeln!(w, "{json}")?;
    }
    w.flush()?;
    Ok(())
}
