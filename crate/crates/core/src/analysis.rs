//! Per-layer experiments over an [`EmbeddingBundle`] and their CSV
//! serializations.
//!
//! Every experiment selects rows and labels through a [`GroupingMode`],
//! then works on one layer at a time.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::bundle::EmbeddingBundle;
use crate::corpus::{Construction, VerbCategory};
use crate::error::AnalysisError;
use crate::geometry::{gdv, rescale_half_zscore, LabeledCloud};
use crate::linalg::Matrix;
use crate::mds::{classical_mds, pairwise_distances, smacof_from_classical, MdsMethod, MdsResult};
use crate::report::format_float;

/// Default multiplier of the MAD in the outlier threshold.
pub const DEFAULT_OUTLIER_K: f64 = 3.5;

/// How samples are selected and labeled before computing separability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupingMode {
    /// All samples, labeled by construction.
    ByConstructionAll,
    /// Only one verb category's samples, labeled by construction.
    WithinCategory(VerbCategory),
    /// All samples, labeled by verb category.
    ByCategory,
}

impl GroupingMode {
    pub fn name(&self) -> String {
        match self {
            GroupingMode::ByConstructionAll => "all".into(),
            GroupingMode::WithinCategory(c) => format!("within_category:{c}"),
            GroupingMode::ByCategory => "by_category".into(),
        }
    }

    /// Parses one CLI grouping argument. `within_category:a,b` expands to
    /// one mode per listed category.
    pub fn parse_list(s: &str) -> Result<Vec<GroupingMode>, AnalysisError> {
        match s {
            "all" | "by_construction_all" => Ok(vec![GroupingMode::ByConstructionAll]),
            "by_category" => Ok(vec![GroupingMode::ByCategory]),
            _ => {
                let rest = s.strip_prefix("within_category:").ok_or_else(|| {
                    AnalysisError::InvalidParameter(format!("unknown grouping `{s}`"))
                })?;
                rest.split(',')
                    .map(|c| {
                        c.trim()
                            .parse::<VerbCategory>()
                            .map(GroupingMode::WithinCategory)
                            .map_err(|e| AnalysisError::InvalidParameter(e.to_string()))
                    })
                    .collect()
            }
        }
    }
}

impl fmt::Display for GroupingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for GroupingMode {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut modes = GroupingMode::parse_list(s)?;
        if modes.len() != 1 {
            return Err(AnalysisError::InvalidParameter(format!(
                "`{s}` names more than one grouping"
            )));
        }
        Ok(modes.remove(0))
    }
}

fn constructions(bundle: &EmbeddingBundle) -> Result<Vec<Construction>, AnalysisError> {
    bundle
        .samples
        .iter()
        .map(|s| {
            s.construction().ok_or_else(|| AnalysisError::Sample {
                id: s.id.clone(),
                message: format!("unknown construction `{}`", s.construction),
            })
        })
        .collect()
}

/// Selected rows and their class labels for a grouping. Fails unless there
/// are at least two classes, each with at least two members.
pub fn grouping_rows(
    bundle: &EmbeddingBundle,
    grouping: GroupingMode,
) -> Result<(Vec<usize>, Vec<String>), AnalysisError> {
    let cons = constructions(bundle)?;
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (i, c) in cons.iter().enumerate() {
        let label = match grouping {
            GroupingMode::ByConstructionAll => c.name(),
            GroupingMode::WithinCategory(cat) if c.verb_category() == cat => c.name(),
            GroupingMode::WithinCategory(_) => continue,
            GroupingMode::ByCategory => c.verb_category().as_str(),
        };
        rows.push(i);
        labels.push(label.to_owned());
    }
    if let GroupingMode::WithinCategory(cat) = grouping {
        if rows.is_empty() {
            return Err(AnalysisError::MissingCategory(cat.to_string()));
        }
    }

    let mut sizes: BTreeMap<&str, usize> = BTreeMap::new();
    for l in &labels {
        *sizes.entry(l.as_str()).or_default() += 1;
    }
    if sizes.len() < 2 {
        return Err(AnalysisError::DegenerateGrouping {
            grouping: grouping.name(),
            detail: format!("{} class(es) present, at least 2 required", sizes.len()),
        });
    }
    let small: Vec<String> = sizes
        .iter()
        .filter(|(_, &n)| n < 2)
        .map(|(l, n)| format!("{l} ({n})"))
        .collect();
    if !small.is_empty() {
        return Err(AnalysisError::DegenerateGrouping {
            grouping: grouping.name(),
            detail: format!("classes with fewer than 2 samples: {}", small.join(", ")),
        });
    }
    Ok((rows, labels))
}

fn layer_points(
    bundle: &EmbeddingBundle,
    layer: usize,
    rows: &[usize],
) -> Result<Matrix, AnalysisError> {
    let m = bundle
        .layer(layer)
        .ok_or_else(|| no_such_layer(bundle, layer))?;
    let d = bundle.hidden_dim;
    let mut data = Vec::with_capacity(rows.len() * d);
    for &r in rows {
        data.extend(m[r * d..(r + 1) * d].iter().map(|&v| f64::from(v)));
    }
    Ok(Matrix::from_row_major(rows.len(), d, data).expect("row-major size"))
}

fn no_such_layer(bundle: &EmbeddingBundle, layer: usize) -> AnalysisError {
    let r = bundle.layer_indices();
    AnalysisError::NoSuchLayer {
        layer,
        first: r.start,
        last: r.end.saturating_sub(1),
    }
}

/// GDV per layer for one grouping.
#[derive(Debug, Clone, PartialEq)]
pub struct GdvCurve {
    pub grouping: GroupingMode,
    pub model_id: String,
    pub values: BTreeMap<usize, f64>,
}

impl GdvCurve {
    /// Layer with the most negative GDV (first on ties).
    pub fn argmin(&self) -> Option<usize> {
        self.values
            .iter()
            .fold(None, |best: Option<(usize, f64)>, (&l, &v)| match best {
                Some((_, bv)) if bv <= v => best,
                _ => Some((l, v)),
            })
            .map(|(l, _)| l)
    }
}

pub fn per_layer_gdv(
    bundle: &EmbeddingBundle,
    grouping: GroupingMode,
) -> Result<GdvCurve, AnalysisError> {
    let (rows, labels) = grouping_rows(bundle, grouping)?;
    let layers: Vec<usize> = bundle.layer_indices().collect();
    let values = layers
        .par_iter()
        .map(|&layer| {
            let cloud = LabeledCloud::new(layer_points(bundle, layer, &rows)?, labels.clone())?;
            Ok((layer, gdv(&cloud)?.gdv))
        })
        .collect::<Result<BTreeMap<_, _>, AnalysisError>>()?;
    Ok(GdvCurve {
        grouping,
        model_id: bundle.model_id.clone(),
        values,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MdsOptions {
    pub method: MdsMethod,
    pub k: usize,
    /// Half-z-score each dimension before computing distances.
    pub rescale_input: bool,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for MdsOptions {
    fn default() -> Self {
        Self {
            method: MdsMethod::Classical,
            k: 2,
            rescale_input: false,
            max_iter: 300,
            tol: 1e-6,
        }
    }
}

/// MDS of one layer with per-point labels for coloring.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerProjection {
    pub layer: usize,
    pub mds: MdsResult,
    pub sample_ids: Vec<String>,
    pub constructions: Vec<Construction>,
}

pub fn per_layer_mds(
    bundle: &EmbeddingBundle,
    layer: usize,
    options: &MdsOptions,
) -> Result<LayerProjection, AnalysisError> {
    let cons = constructions(bundle)?;
    let rows: Vec<usize> = (0..bundle.num_samples()).collect();
    let mut points = layer_points(bundle, layer, &rows)?;
    if options.rescale_input {
        let labels = vec![String::new(); points.rows()];
        points = rescale_half_zscore(&LabeledCloud::new(points, labels)?)?.points;
    }
    let dist = pairwise_distances(&points)?;
    let mds = match options.method {
        MdsMethod::Classical => classical_mds(&dist, options.k)?,
        MdsMethod::Smacof => {
            smacof_from_classical(&dist, options.k, options.max_iter, options.tol)?
        }
    };
    Ok(LayerProjection {
        layer,
        mds,
        sample_ids: bundle.samples.iter().map(|s| s.id.clone()).collect(),
        constructions: cons,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutlierEntry {
    pub row: usize,
    pub sample_id: String,
    pub class: String,
    /// Euclidean distance to the class centroid.
    pub score: f64,
    pub flagged: bool,
}

/// Outlier scores of one layer under one grouping, in bundle row order.
#[derive(Debug, Clone, PartialEq)]
pub struct OutlierFlags {
    pub layer: usize,
    pub grouping: GroupingMode,
    pub k: f64,
    pub entries: Vec<OutlierEntry>,
}

impl OutlierFlags {
    pub fn flagged_ids(&self) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| e.flagged)
            .map(|e| e.sample_id.as_str())
            .collect()
    }
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Flags class members whose centroid distance exceeds
/// `median + k * MAD` of their class's centroid distances.
pub fn flag_outliers(
    bundle: &EmbeddingBundle,
    layer: usize,
    grouping: GroupingMode,
    k: f64,
) -> Result<OutlierFlags, AnalysisError> {
    if !(k.is_finite() && k >= 0.0) {
        return Err(AnalysisError::InvalidParameter(format!(
            "outlier k must be a finite nonnegative number, got {k}"
        )));
    }
    let (rows, labels) = grouping_rows(bundle, grouping)?;
    let points = layer_points(bundle, layer, &rows)?;
    let d = points.cols();

    let mut members: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        members.entry(l.as_str()).or_default().push(i);
    }

    let mut scores = vec![0.0; rows.len()];
    let mut flagged = vec![false; rows.len()];
    for idx in members.values() {
        let mut centroid = vec![0.0; d];
        for &i in idx {
            for (c, v) in centroid.iter_mut().zip(points.row(i)) {
                *c += v;
            }
        }
        let nf = idx.len() as f64;
        centroid.iter_mut().for_each(|c| *c /= nf);

        let dists: Vec<f64> = idx
            .iter()
            .map(|&i| crate::linalg::euclidean(points.row(i), &centroid))
            .collect();
        let mut sorted = dists.clone();
        sorted.sort_by(f64::total_cmp);
        let med = median(&sorted);
        let mut dev: Vec<f64> = dists.iter().map(|x| (x - med).abs()).collect();
        dev.sort_by(f64::total_cmp);
        let threshold = med + k * median(&dev);
        for (&i, &dist) in idx.iter().zip(&dists) {
            scores[i] = dist;
            flagged[i] = dist > threshold;
        }
    }

    let entries = rows
        .iter()
        .enumerate()
        .map(|(i, &row)| OutlierEntry {
            row,
            sample_id: bundle.samples[row].id.clone(),
            class: labels[i].clone(),
            score: scores[i],
            flagged: flagged[i],
        })
        .collect();
    Ok(OutlierFlags {
        layer,
        grouping,
        k,
        entries,
    })
}

/// `model_id,grouping,layer,gdv` rows, curves in the given order.
pub fn gdv_curves_csv(curves: &[GdvCurve]) -> String {
    let mut s = String::from("model_id,grouping,layer,gdv\n");
    for c in curves {
        for (layer, v) in &c.values {
            s.push_str(&format!(
                "{},{},{},{}\n",
                csv_field(&c.model_id),
                c.grouping.name(),
                layer,
                format_float(*v)
            ));
        }
    }
    s
}

/// `sample_id,construction,verb_category,x,y` rows for a 2-D projection.
pub fn mds_csv(p: &LayerProjection) -> String {
    let mut s = String::from("sample_id,construction,verb_category,x,y\n");
    let coords = &p.mds.coordinates;
    for (i, (id, c)) in p.sample_ids.iter().zip(&p.constructions).enumerate() {
        let x = coords[(i, 0)];
        let y = if coords.cols() > 1 {
            coords[(i, 1)]
        } else {
            0.0
        };
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            csv_field(id),
            c.name(),
            c.verb_category(),
            format_float(x),
            format_float(y)
        ));
    }
    s
}

/// `layer,grouping,sample_id,score,flagged` rows.
pub fn outliers_csv(flags: &[OutlierFlags]) -> String {
    let mut s = String::from("layer,grouping,sample_id,score,flagged\n");
    for f in flags {
        for e in &f.entries {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                f.layer,
                f.grouping.name(),
                csv_field(&e.sample_id),
                format_float(e.score),
                e.flagged
            ));
        }
    }
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// Per-sample flags as a lookup, for plotting.
pub fn flag_lookup(flags: &OutlierFlags) -> HashMap<usize, bool> {
    flags.entries.iter().map(|e| (e.row, e.flagged)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::BundleSample;

    fn bundle_1d(labels: &[Construction], layers: Vec<Vec<f32>>) -> EmbeddingBundle {
        EmbeddingBundle {
            model_id: "m".into(),
            hidden_dim: layers[0].len() / labels.len(),
            includes_embedding_layer: false,
            samples: labels
                .iter()
                .enumerate()
                .map(|(i, c)| BundleSample {
                    id: format!("s{i}"),
                    clean_text: String::new(),
                    construction: c.name().into(),
                    verb_category: c.verb_category().as_str().into(),
                    subword_span: [1, 2],
                })
                .collect(),
            layers,
        }
    }

    use Construction::*;

    #[test]
    fn two_layer_curve() {
        let b = bundle_1d(
            &[AgreeOn, AgreeOn, AgreeTo, AgreeTo],
            vec![vec![0.0, 1.0, 0.5, 1.5], vec![0.0, 1.0, 10.0, 11.0]],
        );
        let c = per_layer_gdv(&b, GroupingMode::ByConstructionAll).unwrap();
        assert!((c.values[&1] - 0.22361).abs() < 1e-4, "{}", c.values[&1]);
        assert!((c.values[&2] + 0.89553).abs() < 1e-4, "{}", c.values[&2]);
        assert_eq!(c.argmin(), Some(2));
        let w = per_layer_gdv(&b, GroupingMode::WithinCategory(VerbCategory::Agree)).unwrap();
        assert_eq!(w.values, c.values);
    }

    #[test]
    fn identical_layers_give_constant_curve() {
        let m = vec![0.0, 0.3, 2.0, 2.5, 7.0, 7.25];
        let b = bundle_1d(
            &[GiveUp, GiveUp, GiveIn, GiveIn, ComeIn, ComeIn],
            vec![m; 4],
        );
        let c = per_layer_gdv(&b, GroupingMode::ByConstructionAll).unwrap();
        let first = c.values[&1];
        assert!(c.values.values().all(|&v| v == first));
    }

    #[test]
    fn grouping_errors() {
        let b = bundle_1d(
            &[AgreeOn, AgreeOn, AgreeTo, ComeIn],
            vec![vec![0.0, 1.0, 2.0, 3.0]],
        );
        match per_layer_gdv(&b, GroupingMode::WithinCategory(VerbCategory::Give)) {
            Err(AnalysisError::MissingCategory(c)) => assert_eq!(c, "give"),
            other => panic!("{other:?}"),
        }
        match per_layer_gdv(&b, GroupingMode::ByConstructionAll) {
            Err(AnalysisError::DegenerateGrouping { detail, .. }) => {
                assert!(
                    detail.contains("agree_to (1)") && detail.contains("come_in (1)"),
                    "{detail}"
                )
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            per_layer_gdv(&b, GroupingMode::WithinCategory(VerbCategory::Come)),
            Err(AnalysisError::DegenerateGrouping { .. })
        ));
    }

    #[test]
    fn grouping_parsing() {
        assert_eq!(
            GroupingMode::parse_list("within_category:agree,come,give").unwrap(),
            vec![
                GroupingMode::WithinCategory(VerbCategory::Agree),
                GroupingMode::WithinCategory(VerbCategory::Come),
                GroupingMode::WithinCategory(VerbCategory::Give)
            ]
        );
        assert_eq!(
            "all".parse::<GroupingMode>().unwrap(),
            GroupingMode::ByConstructionAll
        );
        assert_eq!(
            "by_category".parse::<GroupingMode>().unwrap(),
            GroupingMode::ByCategory
        );
        assert!("within_category:take".parse::<GroupingMode>().is_err());
        assert!("sideways".parse::<GroupingMode>().is_err());
        for g in [
            GroupingMode::ByConstructionAll,
            GroupingMode::ByCategory,
            GroupingMode::WithinCategory(VerbCategory::Come),
        ] {
            assert_eq!(g.name().parse::<GroupingMode>().unwrap(), g);
        }
    }

    #[test]
    fn outlier_example() {
        let b = bundle_1d(
            &[GiveUp, GiveUp, GiveUp, GiveUp, GiveIn, GiveIn],
            vec![vec![0.0, 0.1, 0.2, 100.0, 5.0, 5.0]],
        );
        let f = flag_outliers(&b, 1, GroupingMode::ByConstructionAll, 3.5).unwrap();
        assert_eq!(f.flagged_ids(), vec!["s3"]);
        assert!((f.entries[3].score - 74.925).abs() < 1e-4);
        // Identical points in give_in: distances and MAD are 0, nothing flagged.
        assert!(!f.entries[4].flagged && !f.entries[5].flagged);

        // threshold = 25.025 + k * 0.1 passes the top score 74.925 once k > 499.
        let f = flag_outliers(&b, 1, GroupingMode::ByConstructionAll, 500.0).unwrap();
        assert!(f.flagged_ids().is_empty());
        assert!(flag_outliers(&b, 1, GroupingMode::ByConstructionAll, -1.0).is_err());
        assert!(matches!(
            flag_outliers(&b, 3, GroupingMode::ByConstructionAll, 3.5),
            Err(AnalysisError::NoSuchLayer {
                layer: 3,
                first: 1,
                last: 1
            })
        ));
    }

    #[test]
    fn mds_projection_labels() {
        let b = bundle_1d(&[GiveUp, GiveUp], vec![vec![0.0, 0.0, 3.0, 4.0]]);
        let p = per_layer_mds(&b, 1, &MdsOptions::default()).unwrap();
        assert_eq!(p.sample_ids, vec!["s0", "s1"]);
        assert!((p.mds.coordinates[(0, 0)].abs() - 2.5).abs() < 1e-12);
        assert!(p.mds.coordinates[(0, 1)].abs() < 1e-9);
        let csv = mds_csv(&p);
        assert!(csv.starts_with("sample_id,construction,verb_category,x,y\ns0,give_up,give,"));
    }

    #[test]
    fn csv_formats() {
        let curve = GdvCurve {
            grouping: GroupingMode::WithinCategory(VerbCategory::Give),
            model_id: "bert-base-uncased".into(),
            values: [(1, -0.305123456), (2, 0.0)].into_iter().collect(),
        };
        assert_eq!(
            gdv_curves_csv(&[curve]),
            "model_id,grouping,layer,gdv\n\
             bert-base-uncased,within_category:give,1,-0.305123\n\
             bert-base-uncased,within_category:give,2,0\n"
        );
        assert_eq!(csv_field("a,b"), "\"a,b\"");
    }
}
