//! Generalized Discrimination Value (GDV).
//!
//! Each dimension is z-scored with the population standard deviation and
//! halved, `s = (x - mean) / (2 * std)`. On the rescaled points the GDV is
//!
//! ```text
//! GDV = (1 / sqrt(D)) * [ mean_l intra(C_l) - mean_{l<m} inter(C_l, C_m) ]
//! ```
//!
//! where `intra` is the mean Euclidean distance over unordered pairs inside a
//! class and `inter` the mean over all cross pairs of two classes. Zero means
//! no separation; more negative means stronger separation.
//!
//! Every sum here is accumulated over *sorted* terms. The result therefore
//! depends only on the multiset of values, which makes the GDV bit-identical
//! under row shuffling and class renaming, not merely close.

use std::collections::BTreeMap;

use crate::error::GeometryError;
use crate::linalg::{euclidean, Matrix};

/// `N x D` points with one class label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCloud {
    points: Matrix,
    labels: Vec<String>,
}

impl LabeledCloud {
    pub fn new<S: Into<String>>(points: Matrix, labels: Vec<S>) -> Result<Self, GeometryError> {
        if labels.len() != points.rows() {
            return Err(GeometryError::LabelCount {
                points: points.rows(),
                labels: labels.len(),
            });
        }
        if points.cols() == 0 {
            return Err(GeometryError::NoDimensions);
        }
        if points.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        Ok(Self {
            points,
            labels: labels.into_iter().map(Into::into).collect(),
        })
    }

    /// Convenience constructor from row slices.
    pub fn from_rows<R: AsRef<[f64]>, S: Into<String>>(
        rows: &[R],
        labels: Vec<S>,
    ) -> Result<Self, GeometryError> {
        Self::new(Matrix::from_rows(rows)?, labels)
    }

    pub fn points(&self) -> &Matrix {
        &self.points
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.points.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dims(&self) -> usize {
        self.points.cols()
    }
}

/// Half-z-scored points plus the per-dimension statistics used.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledCloud {
    pub points: Matrix,
    pub labels: Vec<String>,
    pub means: Vec<f64>,
    /// Population standard deviations; 0 marks a constant dimension.
    pub std_devs: Vec<f64>,
}

impl RescaledCloud {
    /// Row indices per class, keyed by label.
    pub fn classes(&self) -> BTreeMap<&str, Vec<usize>> {
        let mut map: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, l) in self.labels.iter().enumerate() {
            map.entry(l.as_str()).or_default().push(i);
        }
        map
    }
}

fn sorted_sum(mut values: Vec<f64>) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    values.iter().sum()
}

/// `s = (x - mean) / (2 * std)` per dimension. Constant dimensions map to 0.
pub fn rescale_half_zscore(cloud: &LabeledCloud) -> Result<RescaledCloud, GeometryError> {
    let n = cloud.len();
    if n < 2 {
        return Err(GeometryError::TooFewPoints {
            required: 2,
            actual: n,
        });
    }
    let d = cloud.dims();
    let nf = n as f64;
    let mut out = Matrix::zeros(n, d);
    let mut means = Vec::with_capacity(d);
    let mut std_devs = Vec::with_capacity(d);

    for j in 0..d {
        let col = cloud.points.column(j);
        let constant = col.iter().all(|&v| v == col[0]);
        let mean = sorted_sum(col.clone()) / nf;
        if constant {
            means.push(col[0]);
            std_devs.push(0.0);
            continue;
        }
        let var = sorted_sum(col.iter().map(|&x| (x - mean) * (x - mean)).collect()) / nf;
        let sd = var.sqrt();
        for (i, &x) in col.iter().enumerate() {
            out[(i, j)] = 0.5 * (x - mean) / sd;
        }
        means.push(mean);
        std_devs.push(sd);
    }

    Ok(RescaledCloud {
        points: out,
        labels: cloud.labels.clone(),
        means,
        std_devs,
    })
}

fn members<'a>(rescaled: &'a RescaledCloud, class: &str) -> Vec<&'a [f64]> {
    rescaled
        .labels
        .iter()
        .enumerate()
        .filter(|(_, l)| *l == class)
        .map(|(i, _)| rescaled.points.row(i))
        .collect()
}

/// Mean distance over the unordered pairs of one class.
pub fn mean_intra_class(rescaled: &RescaledCloud, class: &str) -> Result<f64, GeometryError> {
    let pts = members(rescaled, class);
    if pts.len() < 2 {
        return Err(GeometryError::DegenerateClass {
            class: class.to_owned(),
            size: pts.len(),
        });
    }
    Ok(intra(&pts))
}

fn intra(pts: &[&[f64]]) -> f64 {
    let mut dists = Vec::with_capacity(pts.len() * (pts.len() - 1) / 2);
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            dists.push(euclidean(a, b));
        }
    }
    let pairs = dists.len() as f64;
    sorted_sum(dists) / pairs
}

/// Mean distance over all cross pairs of two distinct classes.
pub fn mean_inter_class(
    rescaled: &RescaledCloud,
    class_l: &str,
    class_m: &str,
) -> Result<f64, GeometryError> {
    if class_l == class_m {
        return Err(GeometryError::SameClass(class_l.to_owned()));
    }
    let a = members(rescaled, class_l);
    let b = members(rescaled, class_m);
    for (name, pts) in [(class_l, &a), (class_m, &b)] {
        if pts.is_empty() {
            return Err(GeometryError::EmptyClass(name.to_owned()));
        }
    }
    Ok(inter(&a, &b))
}

fn inter(a: &[&[f64]], b: &[&[f64]]) -> f64 {
    let mut dists = Vec::with_capacity(a.len() * b.len());
    for p in a {
        for q in b {
            dists.push(euclidean(p, q));
        }
    }
    let pairs = dists.len() as f64;
    sorted_sum(dists) / pairs
}

/// GDV with all intermediate class distances.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparabilityReport {
    /// Mean intra-class distance per class.
    pub intra: BTreeMap<String, f64>,
    /// Mean inter-class distance per class pair `(l, m)` with `l < m`.
    pub inter: BTreeMap<(String, String), f64>,
    pub dims: usize,
    pub gdv: f64,
}

pub fn gdv(cloud: &LabeledCloud) -> Result<SeparabilityReport, GeometryError> {
    let rescaled = rescale_half_zscore(cloud)?;
    let classes = rescaled.classes();
    if classes.len() < 2 {
        return Err(GeometryError::TooFewClasses {
            found: classes.len(),
        });
    }
    if let Some((name, rows)) = classes.iter().find(|(_, rows)| rows.len() < 2) {
        return Err(GeometryError::DegenerateClass {
            class: (*name).to_owned(),
            size: rows.len(),
        });
    }

    let grouped: Vec<(&str, Vec<&[f64]>)> = classes
        .iter()
        .map(|(name, rows)| {
            (
                *name,
                rows.iter().map(|&i| rescaled.points.row(i)).collect(),
            )
        })
        .collect();

    let mut intra_map = BTreeMap::new();
    for (name, pts) in &grouped {
        intra_map.insert((*name).to_owned(), intra(pts));
    }
    let mut inter_map = BTreeMap::new();
    for (i, (ln, lp)) in grouped.iter().enumerate() {
        for (mn, mp) in &grouped[i + 1..] {
            inter_map.insert(((*ln).to_owned(), (*mn).to_owned()), inter(lp, mp));
        }
    }

    let l = grouped.len() as f64;
    let mean_intra = sorted_sum(intra_map.values().copied().collect()) / l;
    let mean_inter = sorted_sum(inter_map.values().copied().collect()) * 2.0 / (l * (l - 1.0));
    let dims = cloud.dims();
    let gdv = (mean_intra - mean_inter) / (dims as f64).sqrt();

    Ok(SeparabilityReport {
        intra: intra_map,
        inter: inter_map,
        dims,
        gdv,
    })
}
