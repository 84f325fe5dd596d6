use std::fs;
use std::path::{Path, PathBuf};

use vpc_core::corpus::{dataset_summary, extract_from_text, parse_queries, Construction, Query};

use crate::exit::{CliError, CliResult};
use crate::output::{commit_file, prepare_out_dir};

pub struct CorpusArgs {
    pub input: PathBuf,
    pub queries: Option<PathBuf>,
    pub window: usize,
    pub out: PathBuf,
}

/// Regular, non-hidden files directly inside `dir`, sorted by name.
fn document_paths(dir: &Path) -> CliResult<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Err(CliError::io(
            dir,
            "input directory does not exist or is not a directory",
        ));
    }
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
        let entry = entry.map_err(|e| CliError::io(dir, e))?;
        let path = entry.path();
        let hidden = entry.file_name().to_string_lossy().starts_with('.');
        if !hidden && path.is_file() {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

pub fn run(args: &CorpusArgs) -> CliResult<()> {
    let docs = document_paths(&args.input)?;
    let queries = match &args.queries {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            parse_queries(&text)
                .map_err(|e| CliError::from(e).context(format!("in {}", path.display())))?
        }
        None => Construction::ALL.into_iter().map(Query::base).collect(),
    };
    if queries.is_empty() {
        return Err(CliError::validation("the query file contains no queries"));
    }
    prepare_out_dir(&args.out)?;

    let mut samples = Vec::new();
    for path in &docs {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let doc_id = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        samples.extend(extract_from_text(&doc_id, &text, &queries, args.window)?);
    }

    let summary = dataset_summary(&samples);
    let mut json = serde_json::to_string_pretty(&samples).expect("samples serialize");
    json.push('\n');
    commit_file(&args.out, "samples.json", json.as_bytes())?;
    commit_file(&args.out, "summary.csv", summary.to_csv().as_bytes())?;
    println!(
        "{} samples from {} document(s) written to {}",
        summary.total,
        docs.len(),
        args.out.display()
    );
    Ok(())
}
