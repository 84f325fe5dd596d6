use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use vpc_core::analysis::{GroupingMode, MdsOptions};
use vpc_core::bundle::{layer_file_name, read_bundle, LAYERS_DIR, META_FILE};
use vpc_core::mds::MdsMethod;
use vpc_core::pipeline::{run_analysis, AnalyzeConfig};

use crate::exit::{CliError, CliResult};
use crate::output::{commit_file, prepare_out_dir};

pub const MANIFEST_FILE: &str = "run_manifest.json";

pub struct AnalyzeArgs {
    pub bundle: PathBuf,
    pub groupings: Vec<GroupingMode>,
    pub mds: MdsMethod,
    pub rescale_mds: bool,
    pub max_iter: usize,
    pub tol: f64,
    pub outlier_k: f64,
    pub expect_model: Option<String>,
    pub out: PathBuf,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    created_at: String,
    bundle: BundleInfo<'a>,
    config: ManifestConfig,
    outputs: Vec<&'a str>,
}

#[derive(Serialize)]
struct BundleInfo<'a> {
    path: String,
    sha256: String,
    model_id: &'a str,
    num_layers: usize,
    num_samples: usize,
    hidden_dim: usize,
}

#[derive(Serialize)]
struct ManifestConfig {
    groupings: Vec<String>,
    mds_method: &'static str,
    mds_dimensions: usize,
    mds_rescale_input: bool,
    smacof_max_iter: usize,
    smacof_tol: f64,
    outlier_k: f64,
}

/// SHA-256 over `meta.json` and the layer files, each preceded by its
/// relative path and byte length so file boundaries are unambiguous.
fn bundle_checksum(dir: &Path, layers: impl Iterator<Item = usize>) -> CliResult<String> {
    let mut files = vec![PathBuf::from(META_FILE)];
    files.extend(layers.map(|l| Path::new(LAYERS_DIR).join(layer_file_name(l))));
    let mut hasher = Sha256::new();
    for rel in files {
        let path = dir.join(&rel);
        let bytes = fs::read(&path).map_err(|e| CliError::io(&path, e))?;
        hasher.update(rel.to_string_lossy().as_bytes());
        hasher.update([0u8]);
        hasher.update((bytes.len() as u64).to_le_bytes());
        hasher.update(&bytes);
    }
    Ok(hex::encode(hasher.finalize()))
}

pub fn run(args: &AnalyzeArgs) -> CliResult<()> {
    if !args.bundle.is_dir() {
        return Err(CliError::io(
            &args.bundle,
            "bundle directory does not exist or is not a directory",
        ));
    }
    if !(args.outlier_k.is_finite() && args.outlier_k >= 0.0) {
        return Err(CliError::validation(format!(
            "--outlier-k must be a finite nonnegative number, got {}",
            args.outlier_k
        )));
    }
    if !(args.tol.is_finite() && args.tol > 0.0) || args.max_iter == 0 {
        return Err(CliError::validation(
            "--tol must be positive and --max-iter at least 1",
        ));
    }
    prepare_out_dir(&args.out)?;

    let bundle = read_bundle(&args.bundle).map_err(|e| {
        CliError::from(e).context(format!("reading bundle {}", args.bundle.display()))
    })?;
    if let Some(expected) = &args.expect_model {
        if &bundle.model_id != expected {
            return Err(CliError::validation(format!(
                "bundle model_id is `{}`, expected `{expected}`",
                bundle.model_id
            )));
        }
    }
    let checksum = bundle_checksum(&args.bundle, bundle.layer_indices())?;

    let config = AnalyzeConfig {
        groupings: args.groupings.clone(),
        mds: MdsOptions {
            method: args.mds,
            rescale_input: args.rescale_mds,
            max_iter: args.max_iter,
            tol: args.tol,
            ..MdsOptions::default()
        },
        outlier_k: args.outlier_k,
    };
    let files = run_analysis(&bundle, &config)?;
    for (name, contents) in &files {
        commit_file(&args.out, name, contents.as_bytes())?;
    }

    let mut groupings: Vec<String> = Vec::new();
    for g in &config.groupings {
        if !groupings.contains(&g.name()) {
            groupings.push(g.name());
        }
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        created_at: jiff::Timestamp::now().to_string(),
        bundle: BundleInfo {
            path: args.bundle.display().to_string(),
            sha256: checksum,
            model_id: &bundle.model_id,
            num_layers: bundle.num_layers(),
            num_samples: bundle.num_samples(),
            hidden_dim: bundle.hidden_dim,
        },
        config: ManifestConfig {
            groupings,
            mds_method: config.mds.method.as_str(),
            mds_dimensions: config.mds.k,
            mds_rescale_input: config.mds.rescale_input,
            smacof_max_iter: config.mds.max_iter,
            smacof_tol: config.mds.tol,
            outlier_k: config.outlier_k,
        },
        outputs: files.keys().map(String::as_str).collect(),
    };
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    commit_file(&args.out, MANIFEST_FILE, json.as_bytes())?;

    println!(
        "analyzed {} samples x {} layers of `{}`; {} report files in {}",
        bundle.num_samples(),
        bundle.num_layers(),
        bundle.model_id,
        files.len() + 1,
        args.out.display()
    );
    Ok(())
}
