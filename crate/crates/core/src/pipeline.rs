//! The full `analyze` run, rendered to in-memory report files.
//!
//! GDV curves and outlier flags cover every requested grouping. MDS
//! projections cover every layer once.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::analysis::{
    flag_lookup, flag_outliers, gdv_curves_csv, mds_csv, outliers_csv, per_layer_gdv,
    per_layer_mds, GroupingMode, MdsOptions, OutlierFlags, DEFAULT_OUTLIER_K,
};
use crate::bundle::EmbeddingBundle;
use crate::error::AnalysisError;
use crate::report::{emit_curve_svg, emit_scatter_svg, PlotSpec, PointLabel};

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeConfig {
    /// Duplicates are dropped, first occurrence wins.
    pub groupings: Vec<GroupingMode>,
    pub mds: MdsOptions,
    pub outlier_k: f64,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        Self {
            groupings: vec![GroupingMode::ByConstructionAll],
            mds: MdsOptions::default(),
            outlier_k: DEFAULT_OUTLIER_K,
        }
    }
}

/// Report file name to contents, in file name order.
pub type ReportFiles = BTreeMap<String, String>;

/// Replaces anything outside `[A-Za-z0-9._-]` so a model id like
/// `org/model` can be used in a file name.
pub fn sanitize_file_component(s: &str) -> String {
    let out: String = s
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect();
    if out.is_empty() || out.chars().all(|c| c == '.') {
        "model".into()
    } else {
        out
    }
}

pub fn mds_file_stem(layer: usize) -> String {
    format!("mds_layer_{layer:02}")
}

pub fn run_analysis(
    bundle: &EmbeddingBundle,
    config: &AnalyzeConfig,
) -> Result<ReportFiles, AnalysisError> {
    let mut groupings: Vec<GroupingMode> = Vec::new();
    for g in &config.groupings {
        if !groupings.contains(g) {
            groupings.push(*g);
        }
    }
    if groupings.is_empty() {
        return Err(AnalysisError::InvalidParameter(
            "at least one grouping is required".into(),
        ));
    }

    let mut files = ReportFiles::new();

    let curves = groupings
        .iter()
        .map(|&g| per_layer_gdv(bundle, g))
        .collect::<Result<Vec<_>, _>>()?;
    files.insert("gdv_curves.csv".into(), gdv_curves_csv(&curves));
    let curve_spec = PlotSpec::curve(format!("GDV across layers ({})", bundle.model_id));
    files.insert(
        format!(
            "gdv_curves_{}.svg",
            sanitize_file_component(&bundle.model_id)
        ),
        emit_curve_svg(&curves, &curve_spec)?,
    );

    let layers: Vec<usize> = bundle.layer_indices().collect();
    let pairs: Vec<(usize, GroupingMode)> = layers
        .iter()
        .flat_map(|&l| groupings.iter().map(move |&g| (l, g)))
        .collect();
    let flags = pairs
        .par_iter()
        .map(|&(l, g)| flag_outliers(bundle, l, g, config.outlier_k))
        .collect::<Result<Vec<OutlierFlags>, _>>()?;
    files.insert("outliers.csv".into(), outliers_csv(&flags));

    let projections = layers
        .par_iter()
        .map(|&l| per_layer_mds(bundle, l, &config.mds))
        .collect::<Result<Vec<_>, _>>()?;
    for p in &projections {
        // Scatter outlines follow the first requested grouping.
        let lookup = flags
            .iter()
            .find(|f| f.layer == p.layer && f.grouping == groupings[0])
            .map(flag_lookup)
            .unwrap_or_default();
        let labels: Vec<PointLabel> = p
            .sample_ids
            .iter()
            .zip(&p.constructions)
            .enumerate()
            .map(|(row, (id, &construction))| PointLabel {
                id: id.clone(),
                construction,
                flagged: lookup.get(&row).copied().unwrap_or(false),
            })
            .collect();
        let stem = mds_file_stem(p.layer);
        let spec = PlotSpec::scatter(format!(
            "{} layer {} ({} MDS)",
            bundle.model_id,
            p.layer,
            config.mds.method.as_str()
        ));
        files.insert(format!("{stem}.csv"), mds_csv(p));
        files.insert(
            format!("{stem}.svg"),
            emit_scatter_svg(&p.mds.coordinates, &labels, &spec)?,
        );
    }

    Ok(files)
}
