use std::fs::File;
use std::path::Path;

use crate::error::{BenchError, Result};

pub fn create_file(path: &Path) -> Result<File> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    File::create(path).map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x:e}"))
}
