//! Layer-wise analysis of transformer embeddings for verb + particle
//! constructions (`give up`, `agree on`, `come back`, ...).
//!
//! [`corpus`] extracts and cleans concordance samples. An external extractor
//! turns them into an [`bundle::EmbeddingBundle`] of per-layer hidden
//! states. [`pipeline::run_analysis`] then measures class separability per
//! layer with [`geometry::gdv`] and projects layers to 2-D with [`mds`].
//! Results are written as CSV and as SVG from [`report`].

pub mod analysis;
pub mod bundle;
pub mod corpus;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod mds;
pub mod pipeline;
pub mod report;
pub mod selftest;
pub mod synthetic;

pub use analysis::{
    flag_outliers, per_layer_gdv, per_layer_mds, GdvCurve, GroupingMode, LayerProjection,
    MdsOptions, OutlierFlags,
};
pub use bundle::{read_bundle, validate_bundle, write_bundle, EmbeddingBundle, ValidationReport};
pub use corpus::{clean_sentence, Construction, Sample, VerbCategory};
pub use error::{
    AnalysisError, BundleError, CorpusError, GeometryError, LinalgError, MdsError, ReportError,
};
pub use geometry::{gdv, LabeledCloud, RescaledCloud, SeparabilityReport};
pub use linalg::Matrix;
pub use mds::{classical_mds, smacof, DistanceMatrix, MdsMethod, MdsResult};
pub use pipeline::{run_analysis, AnalyzeConfig, ReportFiles};
