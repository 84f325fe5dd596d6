use std::fs;
use std::path::Path;

use crate::exit::{CliError, CliResult};

/// Creates `dir` if needed. Fails if it exists as something other than a
/// directory.
pub fn prepare_out_dir(dir: &Path) -> CliResult<()> {
    if dir.exists() && !dir.is_dir() {
        return Err(CliError::io(
            dir,
            "output path exists and is not a directory",
        ));
    }
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Writes through a temporary sibling and renames, so readers never see a
/// half-written file.
pub fn commit_file(dir: &Path, name: &str, contents: &[u8]) -> CliResult<()> {
    let tmp = dir.join(format!(".{name}.partial"));
    let dest = dir.join(name);
    fs::write(&tmp, contents).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, &dest).map_err(|e| CliError::io(&dest, e))
}
