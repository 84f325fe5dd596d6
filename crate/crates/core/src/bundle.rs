//! On-disk container for per-layer target-token embeddings.
//!
//! Layout of a bundle directory:
//!
//! ```text
//! meta.json            format_version, model_id, num_layers, hidden_dim,
//!                      includes_embedding_layer, samples[]
//! layers/layer_NN.f32  raw little-endian f32, row-major, num_samples x hidden_dim
//! ```
//!
//! Layer files are numbered from `00` when the pre-block embedding output is
//! included and from `01` otherwise. The binary files carry no header; all
//! structure lives in `meta.json`.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::Construction;
use crate::error::BundleError;

pub const FORMAT_VERSION: u64 = 1;
pub const META_FILE: &str = "meta.json";
pub const LAYERS_DIR: &str = "layers";

/// Per-sample metadata stored in `meta.json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleSample {
    pub id: String,
    pub clean_text: String,
    pub construction: String,
    pub verb_category: String,
    /// Subword positions `[start, end)` of the target verb.
    pub subword_span: [usize; 2],
}

impl BundleSample {
    pub fn construction(&self) -> Option<Construction> {
        self.construction.parse().ok()
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    format_version: u64,
    model_id: String,
    num_layers: usize,
    hidden_dim: usize,
    includes_embedding_layer: bool,
    samples: Vec<BundleSample>,
}

/// Per-layer embedding matrices plus sample metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingBundle {
    pub model_id: String,
    pub hidden_dim: usize,
    pub includes_embedding_layer: bool,
    pub samples: Vec<BundleSample>,
    /// One row-major `samples.len() x hidden_dim` matrix per layer, in
    /// layer order.
    pub layers: Vec<Vec<f32>>,
}

impl EmbeddingBundle {
    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn num_samples(&self) -> usize {
        self.samples.len()
    }

    /// Index of the first stored layer: 0 with the embedding layer, else 1.
    pub fn first_layer(&self) -> usize {
        usize::from(!self.includes_embedding_layer)
    }

    /// Layer indices in storage order.
    pub fn layer_indices(&self) -> std::ops::Range<usize> {
        let first = self.first_layer();
        first..first + self.layers.len()
    }

    /// Matrix for a layer *index* (not storage position).
    pub fn layer(&self, index: usize) -> Option<&[f32]> {
        index
            .checked_sub(self.first_layer())
            .and_then(|pos| self.layers.get(pos))
            .map(Vec::as_slice)
    }

    /// Row `row` of layer `index`.
    pub fn vector(&self, index: usize, row: usize) -> Option<&[f32]> {
        let m = self.layer(index)?;
        m.get(row * self.hidden_dim..(row + 1) * self.hidden_dim)
    }

    /// Sub-bundle with only the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> EmbeddingBundle {
        let d = self.hidden_dim;
        let layers = self
            .layers
            .iter()
            .map(|m| {
                let mut out = Vec::with_capacity(rows.len() * d);
                for &r in rows {
                    out.extend_from_slice(&m[r * d..(r + 1) * d]);
                }
                out
            })
            .collect();
        EmbeddingBundle {
            model_id: self.model_id.clone(),
            hidden_dim: d,
            includes_embedding_layer: self.includes_embedding_layer,
            samples: rows.iter().map(|&r| self.samples[r].clone()).collect(),
            layers,
        }
    }
}

pub fn layer_file_name(index: usize) -> String {
    format!("layer_{index:02}.f32")
}

/// One broken invariant, with coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoLayers,
    ZeroHiddenDim,
    TooManyLayers {
        num_layers: usize,
    },
    EmptyModelId,
    LayerShape {
        layer: usize,
        expected: usize,
        actual: usize,
    },
    NonFinite {
        layer: usize,
        row: usize,
        col: usize,
        value: f32,
    },
    DuplicateId {
        id: String,
    },
    InvalidConstruction {
        row: usize,
        id: String,
        value: String,
    },
    CategoryMismatch {
        row: usize,
        id: String,
        construction: String,
        verb_category: String,
    },
    BadSpan {
        row: usize,
        id: String,
        start: usize,
        end: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoLayers => write!(f, "bundle has no layers"),
            Violation::ZeroHiddenDim => write!(f, "hidden_dim is 0"),
            Violation::TooManyLayers { num_layers } => {
                write!(f, "{num_layers} layers exceed the two-digit file numbering")
            }
            Violation::EmptyModelId => write!(f, "model_id is empty"),
            Violation::LayerShape { layer, expected, actual } => write!(
                f,
                "layer {layer}: {actual} values, expected {expected}"
            ),
            Violation::NonFinite { layer, row, col, value } => {
                write!(f, "layer {layer}, row {row}, col {col}: non-finite value {value}")
            }
            Violation::DuplicateId { id } => write!(f, "duplicate sample id `{id}`"),
            Violation::InvalidConstruction { row, id, value } => {
                write!(f, "row {row} (`{id}`): unknown construction `{value}`")
            }
            Violation::CategoryMismatch { row, id, construction, verb_category } => write!(
                f,
                "row {row} (`{id}`): construction `{construction}` is not in category `{verb_category}`"
            ),
            Violation::BadSpan { row, id, start, end } => {
                write!(f, "row {row} (`{id}`): empty or reversed subword span [{start}, {end})")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

/// Lists every violated invariant. Empty iff the bundle is valid.
pub fn validate_bundle(bundle: &EmbeddingBundle) -> ValidationReport {
    let mut violations = Vec::new();
    if bundle.model_id.is_empty() {
        violations.push(Violation::EmptyModelId);
    }
    if bundle.layers.is_empty() {
        violations.push(Violation::NoLayers);
    }
    if bundle.hidden_dim == 0 {
        violations.push(Violation::ZeroHiddenDim);
    }
    if bundle.layer_indices().end > 100 {
        violations.push(Violation::TooManyLayers {
            num_layers: bundle.num_layers(),
        });
    }

    let mut seen = HashSet::new();
    for (row, s) in bundle.samples.iter().enumerate() {
        if !seen.insert(s.id.as_str()) {
            violations.push(Violation::DuplicateId { id: s.id.clone() });
        }
        match s.construction() {
            None => violations.push(Violation::InvalidConstruction {
                row,
                id: s.id.clone(),
                value: s.construction.clone(),
            }),
            Some(c) if c.verb_category().as_str() != s.verb_category => {
                violations.push(Violation::CategoryMismatch {
                    row,
                    id: s.id.clone(),
                    construction: s.construction.clone(),
                    verb_category: s.verb_category.clone(),
                })
            }
            Some(_) => {}
        }
        let [start, end] = s.subword_span;
        if start >= end {
            violations.push(Violation::BadSpan {
                row,
                id: s.id.clone(),
                start,
                end,
            });
        }
    }

    let expected = bundle.num_samples() * bundle.hidden_dim;
    for (pos, m) in bundle.layers.iter().enumerate() {
        let layer = bundle.first_layer() + pos;
        if m.len() != expected {
            violations.push(Violation::LayerShape {
                layer,
                expected,
                actual: m.len(),
            });
            continue;
        }
        for (i, &v) in m.iter().enumerate() {
            if !v.is_finite() {
                violations.push(Violation::NonFinite {
                    layer,
                    row: i / bundle.hidden_dim,
                    col: i % bundle.hidden_dim,
                    value: v,
                });
            }
        }
    }
    ValidationReport { violations }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BundleError + '_ {
    move |source| BundleError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes a validated bundle to `path`, which must not exist yet. The
/// bundle is assembled in a sibling temporary directory and renamed into
/// place, so a failed write leaves nothing behind.
pub fn write_bundle(bundle: &EmbeddingBundle, path: &Path) -> Result<(), BundleError> {
    let report = validate_bundle(bundle);
    if !report.is_valid() {
        return Err(BundleError::Invalid(report));
    }
    if path.exists() {
        return Err(BundleError::AlreadyExists(path.to_path_buf()));
    }
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&parent).map_err(io_err(&parent))?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "bundle".into());
    let tmp = parent.join(format!(".{name}.tmp-{}", std::process::id()));
    if tmp.exists() {
        fs::remove_dir_all(&tmp).map_err(io_err(&tmp))?;
    }

    let result =
        write_contents(bundle, &tmp).and_then(|()| fs::rename(&tmp, path).map_err(io_err(path)));
    if result.is_err() {
        let _ = fs::remove_dir_all(&tmp);
    }
    result
}

fn write_contents(bundle: &EmbeddingBundle, dir: &Path) -> Result<(), BundleError> {
    let layers_dir = dir.join(LAYERS_DIR);
    fs::create_dir_all(&layers_dir).map_err(io_err(&layers_dir))?;

    let meta = Meta {
        format_version: FORMAT_VERSION,
        model_id: bundle.model_id.clone(),
        num_layers: bundle.num_layers(),
        hidden_dim: bundle.hidden_dim,
        includes_embedding_layer: bundle.includes_embedding_layer,
        samples: bundle.samples.clone(),
    };
    let meta_path = dir.join(META_FILE);
    let mut json = serde_json::to_string_pretty(&meta).map_err(|source| BundleError::Meta {
        path: meta_path.clone(),
        source,
    })?;
    json.push('\n');
    fs::write(&meta_path, json).map_err(io_err(&meta_path))?;

    for (index, m) in bundle.layer_indices().zip(&bundle.layers) {
        let p = layers_dir.join(layer_file_name(index));
        let mut bytes = Vec::with_capacity(m.len() * 4);
        for v in m {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        let mut f = fs::File::create(&p).map_err(io_err(&p))?;
        f.write_all(&bytes).map_err(io_err(&p))?;
        f.sync_all().map_err(io_err(&p))?;
    }
    Ok(())
}

/// Reads and validates a bundle directory.
pub fn read_bundle(path: &Path) -> Result<EmbeddingBundle, BundleError> {
    let meta_path = path.join(META_FILE);
    let text = fs::read_to_string(&meta_path).map_err(io_err(&meta_path))?;
    let meta: Meta = serde_json::from_str(&text).map_err(|source| BundleError::Meta {
        path: meta_path.clone(),
        source,
    })?;
    if meta.format_version != FORMAT_VERSION {
        return Err(BundleError::UnsupportedVersion(meta.format_version));
    }

    let rows = meta.samples.len();
    let cols = meta.hidden_dim;
    let expected = (rows as u64) * (cols as u64) * 4;
    let first = usize::from(!meta.includes_embedding_layer);
    let mut layers = Vec::with_capacity(meta.num_layers);
    for layer in first..first + meta.num_layers {
        let p = path.join(LAYERS_DIR).join(layer_file_name(layer));
        let len = match fs::metadata(&p) {
            Ok(m) => m.len(),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(BundleError::MissingLayer { layer, path: p })
            }
            Err(e) => return Err(io_err(&p)(e)),
        };
        if len != expected {
            return Err(BundleError::ShapeMismatch {
                layer,
                rows,
                cols,
                expected,
                actual: len,
            });
        }
        let bytes = fs::read(&p).map_err(io_err(&p))?;
        if bytes.len() as u64 != expected {
            return Err(BundleError::ShapeMismatch {
                layer,
                rows,
                cols,
                expected,
                actual: bytes.len() as u64,
            });
        }
        layers.push(
            bytes
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect(),
        );
    }

    let bundle = EmbeddingBundle {
        model_id: meta.model_id,
        hidden_dim: meta.hidden_dim,
        includes_embedding_layer: meta.includes_embedding_layer,
        samples: meta.samples,
        layers,
    };
    let report = validate_bundle(&bundle);
    if !report.is_valid() {
        return Err(BundleError::Invalid(report));
    }
    Ok(bundle)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(id: &str, c: Construction) -> BundleSample {
        BundleSample {
            id: id.into(),
            clean_text: format!("they {} {} now", c.verb_category(), c.particle()),
            construction: c.name().into(),
            verb_category: c.verb_category().as_str().into(),
            subword_span: [2, 3],
        }
    }

    fn tiny() -> EmbeddingBundle {
        EmbeddingBundle {
            model_id: "test-model".into(),
            hidden_dim: 3,
            includes_embedding_layer: false,
            samples: vec![
                sample("a", Construction::GiveUp),
                sample("b", Construction::AgreeOn),
            ],
            layers: vec![
                vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
                vec![-1.0, 0.5, 0.25, 7.0, 8.0, 9.0],
            ],
        }
    }

    #[test]
    fn writes_expected_layout() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("b");
        write_bundle(&tiny(), &p).unwrap();
        assert!(p.join("meta.json").is_file());
        assert_eq!(
            fs::metadata(p.join("layers/layer_01.f32")).unwrap().len(),
            24
        );
        assert_eq!(
            fs::metadata(p.join("layers/layer_02.f32")).unwrap().len(),
            24
        );
        assert!(!p.join("layers/layer_00.f32").exists());

        let meta: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(p.join("meta.json")).unwrap()).unwrap();
        assert_eq!(meta["format_version"], 1);
        assert_eq!(meta["num_layers"], 2);
        assert_eq!(meta["hidden_dim"], 3);
        assert_eq!(meta["includes_embedding_layer"], false);
        assert_eq!(
            meta["samples"][0]["subword_span"],
            serde_json::json!([2, 3])
        );

        let raw = fs::read(p.join("layers/layer_01.f32")).unwrap();
        assert_eq!(&raw[..4], &1.0f32.to_le_bytes());
        assert_eq!(read_bundle(&p).unwrap(), tiny());
    }

    #[test]
    fn embedding_layer_numbering_starts_at_zero() {
        let mut b = tiny();
        b.includes_embedding_layer = true;
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("b");
        write_bundle(&b, &p).unwrap();
        assert!(p.join("layers/layer_00.f32").is_file());
        assert!(p.join("layers/layer_01.f32").is_file());
        assert!(!p.join("layers/layer_02.f32").exists());
        let back = read_bundle(&p).unwrap();
        assert_eq!(back.layer_indices(), 0..2);
        assert_eq!(back.layer(0).unwrap()[0], 1.0);
    }

    #[test]
    fn nan_bundle_is_not_written() {
        let mut b = tiny();
        b.layers[1][4] = f32::NAN;
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("b");
        assert!(matches!(write_bundle(&b, &p), Err(BundleError::Invalid(_))));
        assert!(!p.exists());
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn refuses_to_overwrite() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            write_bundle(&tiny(), dir.path()),
            Err(BundleError::AlreadyExists(_))
        ));
    }

    #[test]
    fn validation_reports_coordinates() {
        assert!(validate_bundle(&tiny()).is_valid());

        let mut b = tiny();
        b.samples[1].id = "a".into();
        let r = validate_bundle(&b);
        assert_eq!(
            r.violations,
            vec![Violation::DuplicateId { id: "a".into() }]
        );

        let mut b = EmbeddingBundle {
            hidden_dim: 2,
            samples: (0..8)
                .map(|i| sample(&format!("s{i}"), Construction::ComeIn))
                .collect(),
            layers: vec![vec![0.0; 16]; 4],
            ..tiny()
        };
        b.layers[2][7 * 2] = f32::INFINITY;
        let r = validate_bundle(&b);
        assert_eq!(
            r.violations,
            vec![Violation::NonFinite {
                layer: 3,
                row: 7,
                col: 0,
                value: f32::INFINITY
            }]
        );
    }

    #[test]
    fn validation_catches_labels_and_shapes() {
        let mut b = tiny();
        b.samples[0].construction = "give_on".into();
        b.samples[1].verb_category = "come".into();
        b.samples[1].subword_span = [3, 3];
        b.layers[0].pop();
        let r = validate_bundle(&b);
        assert_eq!(r.violations.len(), 4);
        assert!(matches!(
            r.violations[0],
            Violation::InvalidConstruction { row: 0, .. }
        ));
        assert!(matches!(
            r.violations[1],
            Violation::CategoryMismatch { row: 1, .. }
        ));
        assert!(matches!(r.violations[2], Violation::BadSpan { row: 1, .. }));
        assert!(matches!(
            r.violations[3],
            Violation::LayerShape {
                layer: 1,
                expected: 6,
                actual: 5
            }
        ));
    }

    #[test]
    fn select_rows_reorders_everything() {
        let b = tiny().select_rows(&[1, 0]);
        assert_eq!(b.samples[0].id, "b");
        assert_eq!(b.layers[0], vec![4.0, 5.0, 6.0, 1.0, 2.0, 3.0]);
        assert_eq!(b.vector(2, 1).unwrap(), &[-1.0, 0.5, 0.25]);
    }
}
