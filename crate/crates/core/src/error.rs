use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("shape mismatch: expected {expected} elements, got {actual}")]
    Shape { expected: usize, actual: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix contains NaN or infinite entries")]
    NonFinite,
    #[error("eigenvalue iteration did not converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorpusError {
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("unknown construction `{verb} {particle}`")]
    UnknownConstruction { verb: String, particle: String },
    #[error("query file line {line}: {message}")]
    QueryFile { line: usize, message: String },
}

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed meta.json at {path}: {source}")]
    Meta {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("unsupported bundle format_version {0} (expected 1)")]
    UnsupportedVersion(u64),
    #[error("missing layer {layer}: {path} not found")]
    MissingLayer { layer: usize, path: PathBuf },
    #[error("layer {layer} has {actual} bytes, expected {expected} ({rows} x {cols} x 4)")]
    ShapeMismatch {
        layer: usize,
        rows: usize,
        cols: usize,
        expected: u64,
        actual: u64,
    },
    #[error("bundle failed validation:\n{0}")]
    Invalid(crate::bundle::ValidationReport),
    #[error("refusing to overwrite existing path {0}")]
    AlreadyExists(PathBuf),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("need at least {required} points, got {actual}")]
    TooFewPoints { required: usize, actual: usize },
    #[error("point cloud must have at least one dimension")]
    NoDimensions,
    #[error("{points} points but {labels} labels")]
    LabelCount { points: usize, labels: usize },
    #[error("need at least 2 classes, got {found}")]
    TooFewClasses { found: usize },
    #[error("class `{class}` has {size} member(s); at least 2 required")]
    DegenerateClass { class: String, size: usize },
    #[error("class `{0}` is empty")]
    EmptyClass(String),
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("inter-class distance needs two different classes, got `{0}` twice")]
    SameClass(String),
    #[error("point cloud contains NaN or infinite values")]
    NonFinite,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MdsError {
    #[error("need at least {required} points, got {actual}")]
    TooFewPoints { required: usize, actual: usize },
    #[error("distance matrix is not symmetric (max deviation {0:e})")]
    Asymmetric(f64),
    #[error("distance matrix has a negative entry at ({row}, {col})")]
    Negative { row: usize, col: usize },
    #[error("distance matrix has a nonzero diagonal at {0}")]
    NonzeroDiagonal(usize),
    #[error("input contains NaN or infinite values")]
    NonFinite,
    #[error("configuration shape {actual_rows}x{actual_cols} does not match {expected_rows}x{expected_cols}")]
    ShapeMismatch {
        expected_rows: usize,
        expected_cols: usize,
        actual_rows: usize,
        actual_cols: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("all distances are zero; the stress majorization update is undefined")]
    Degenerate,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("layer {layer} does not exist in the bundle (available {first}..={last})")]
    NoSuchLayer {
        layer: usize,
        first: usize,
        last: usize,
    },
    #[error("verb category `{0}` has no samples in the bundle")]
    MissingCategory(String),
    #[error("grouping `{grouping}` is degenerate: {detail}")]
    DegenerateGrouping { grouping: String, detail: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid bundle sample `{id}`: {message}")]
    Sample { id: String, message: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Mds(#[from] MdsError),
    #[error(transparent)]
    Report(#[from] ReportError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReportError {
    #[error("scatter plots need 2-D coordinates, got {0} column(s)")]
    NotTwoDimensional(usize),
    #[error("{points} points but {labels} labels")]
    LabelCount { points: usize, labels: usize },
    #[error("curves do not share a layer domain: `{first}` vs `{other}`")]
    MismatchedLayers { first: String, other: String },
}
