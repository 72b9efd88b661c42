use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// Nine fractional digits for everyday magnitudes, scientific otherwise.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0.000000000".to_owned();
    }
    let a = x.abs();
    if (1e-3..1e9).contains(&a) {
        format!("{x:.9}")
    } else {
        format!("{x:.8e}")
    }
}

/// CSV text with a header row and LF line endings.
pub fn csv<'a>(header: &str, rows: impl IntoIterator<Item = &'a [f64]>) -> String {
    let mut out = String::with_capacity(4096);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| num(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// `key=value` report lines.
pub fn report(entries: &[(&str, String)]) -> String {
    entries.iter().fold(String::new(), |mut s, (k, v)| {
        let _ = writeln!(s, "{k}={v}");
        s
    })
}

/// `<prefix><suffix>`, keeping the prefix's directory.
pub fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

/// Writes every file to a temporary sibling first, then renames them all.
pub fn write_all_atomic(files: &[(PathBuf, String)]) -> Result<(), CliError> {
    let werr = |path: &Path| {
        let path = path.to_owned();
        move |source| CliError::Write { path, source }
    };
    let mut staged = Vec::with_capacity(files.len());
    for (path, contents) in files {
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        std::fs::create_dir_all(dir).map_err(werr(path))?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(werr(path))?;
        tmp.write_all(contents.as_bytes()).map_err(werr(path))?;
        tmp.as_file().sync_all().map_err(werr(path))?;
        staged.push((tmp, path));
    }
    for (tmp, path) in staged {
        tmp.persist(path).map_err(|e| CliError::Write { path: path.clone(), source: e.error })?;
    }
    Ok(())
}
