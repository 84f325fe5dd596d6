//! Embedded oracle checks with known answers, run by `vpc selftest`.

use crate::corpus::{clean_sentence, extract_concordance, Construction, DatasetSummary, Query};
use crate::geometry::{gdv, rescale_half_zscore, LabeledCloud};
use crate::linalg::Matrix;
use crate::mds::{classical_mds, pairwise_distances, smacof, DistanceMatrix};

/// A named computation with its expected value.
#[derive(Clone)]
pub struct Check {
    pub name: &'static str,
    pub expected: f64,
    pub tolerance: f64,
    pub compute: fn() -> Result<f64, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub expected: f64,
    pub tolerance: f64,
    pub actual: Result<f64, String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        matches!(self.actual, Ok(v) if (v - self.expected).abs() <= self.tolerance)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn bool_check(ok: bool) -> Result<f64, String> {
    Ok(if ok { 1.0 } else { 0.0 })
}

fn two_class_1d() -> Result<f64, String> {
    let c = LabeledCloud::from_rows(&[[0.0], [1.0], [10.0], [11.0]], vec!["A", "A", "B", "B"])
        .map_err(err)?;
    Ok(gdv(&c).map_err(err)?.gdv)
}

const SQUARE: [[f64; 2]; 4] = [[0.0, 0.0], [0.0, 1.0], [4.0, 0.0], [4.0, 1.0]];

fn square_2d() -> Result<f64, String> {
    let c = LabeledCloud::from_rows(&SQUARE, vec!["A", "A", "B", "B"]).map_err(err)?;
    Ok(gdv(&c).map_err(err)?.gdv)
}

fn square_scaled_delta() -> Result<f64, String> {
    let scaled: Vec<[f64; 2]> = SQUARE
        .iter()
        .map(|r| [r[0] * 1000.0 + 3.0, r[1] * 1000.0 - 7.0])
        .collect();
    let c = LabeledCloud::from_rows(&scaled, vec!["A", "A", "B", "B"]).map_err(err)?;
    Ok(gdv(&c).map_err(err)?.gdv - square_2d()?)
}

fn rescale_first() -> Result<f64, String> {
    let c = LabeledCloud::from_rows(&[[0.0], [1.0], [10.0], [11.0]], vec!["x"; 4]).map_err(err)?;
    Ok(rescale_half_zscore(&c).map_err(err)?.points[(0, 0)])
}

fn triangle() -> Result<DistanceMatrix, String> {
    DistanceMatrix::new(
        Matrix::from_rows(&[[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]]).map_err(err)?,
    )
    .map_err(err)
}

fn triangle_eig(i: usize) -> Result<f64, String> {
    Ok(classical_mds(&triangle()?, 2).map_err(err)?.eigenvalues[i])
}

fn collinear() -> Result<DistanceMatrix, String> {
    pairwise_distances(&Matrix::from_rows(&[[0.0], [1.0], [2.0], [3.0]]).map_err(err)?).map_err(err)
}

fn collinear_top() -> Result<f64, String> {
    Ok(classical_mds(&collinear()?, 1).map_err(err)?.eigenvalues[0])
}

fn smacof_collinear() -> Result<f64, String> {
    let init =
        Matrix::from_rows(&[[0.3, -1.0], [0.1, 0.7], [1.9, 0.2], [2.5, 1.4]]).map_err(err)?;
    let r = smacof(&collinear()?, &init, 5000, 1e-14).map_err(err)?;
    r.stress_trace
        .last()
        .copied()
        .ok_or_else(|| "empty trace".into())
}

fn window_before() -> Result<f64, String> {
    let mut toks: Vec<String> = (0..23).map(|i| format!("w{i}")).collect();
    toks[10] = "give".into();
    toks[11] = "up".into();
    let s = extract_concordance("t", &toks, &Query::base(Construction::GiveUp), 10).map_err(err)?;
    if s.len() != 1 {
        return Err(format!("expected one sample, got {}", s.len()));
    }
    Ok((s[0].context_before + s[0].context_after) as f64)
}

/// The built-in check table.
pub fn builtin_checks() -> Vec<Check> {
    vec![
        Check {
            name: "gdv_two_class_1d",
            expected: -0.89553,
            tolerance: 1e-4,
            compute: two_class_1d,
        },
        Check {
            name: "gdv_square_2d",
            expected: -0.14645,
            tolerance: 1e-4,
            compute: square_2d,
        },
        Check {
            name: "gdv_scale_shift_invariance",
            expected: 0.0,
            tolerance: 1e-9,
            compute: square_scaled_delta,
        },
        Check {
            name: "rescale_half_zscore",
            expected: -0.54727,
            tolerance: 1e-5,
            compute: rescale_first,
        },
        Check {
            name: "mds_triangle_eigenvalue_1",
            expected: 0.5,
            tolerance: 1e-9,
            compute: || triangle_eig(0),
        },
        Check {
            name: "mds_triangle_eigenvalue_2",
            expected: 0.5,
            tolerance: 1e-9,
            compute: || triangle_eig(1),
        },
        Check {
            name: "mds_triangle_eigenvalue_3",
            expected: 0.0,
            tolerance: 1e-9,
            compute: || triangle_eig(2),
        },
        Check {
            name: "mds_collinear_top_eigenvalue",
            expected: 5.0,
            tolerance: 1e-9,
            compute: collinear_top,
        },
        Check {
            name: "smacof_collinear_stress",
            expected: 0.0,
            tolerance: 1e-6,
            compute: smacof_collinear,
        },
        Check {
            name: "clean_punctuation_case",
            expected: 1.0,
            tolerance: 0.0,
            compute: || {
                bool_check(clean_sentence("The Minister, agreed!") == "the minister agreed")
            },
        },
        Check {
            name: "clean_whitespace",
            expected: 1.0,
            tolerance: 0.0,
            compute: || bool_check(clean_sentence("  give   UP  ") == "give up"),
        },
        Check {
            name: "clean_empty",
            expected: 1.0,
            tolerance: 0.0,
            compute: || bool_check(clean_sentence("").is_empty()),
        },
        Check {
            name: "concordance_window",
            expected: 20.0,
            tolerance: 0.0,
            compute: window_before,
        },
        Check {
            name: "reference_profile_total",
            expected: 1089.0,
            tolerance: 0.0,
            compute: || Ok(DatasetSummary::reference().total as f64),
        },
    ]
}

pub fn run_checks(checks: &[Check]) -> Vec<CheckOutcome> {
    checks
        .iter()
        .map(|c| CheckOutcome {
            name: c.name,
            expected: c.expected,
            tolerance: c.tolerance,
            actual: (c.compute)(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_checks_pass() {
        for o in run_checks(&builtin_checks()) {
            assert!(o.passed(), "{} failed: {:?}", o.name, o.actual);
        }
    }

    #[test]
    fn perturbed_constant_fails_by_name() {
        let mut checks = builtin_checks();
        let c = checks
            .iter_mut()
            .find(|c| c.name == "gdv_two_class_1d")
            .unwrap();
        c.expected += 0.01;
        let failed: Vec<_> = run_checks(&checks)
            .into_iter()
            .filter(|o| !o.passed())
            .map(|o| o.name)
            .collect();
        assert_eq!(failed, vec!["gdv_two_class_1d"]);
    }
}
