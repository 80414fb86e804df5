//! On-disk catalogs of exceptional classes.
//!
//! ```text
//! # symcap catalog
//! format_version: 1
//! d_max: 7
//! max_parts: 8
//! 1: 1 1
//! 2: 1 1 1 1 1
//! #! 5: 3 3 1 1 1 1 1 1 1 1
//! ```
//!
//! One class per line as `d: m1 m2 ...`; lines starting with `#!` hold
//! solutions of the Diophantine system that failed the Cremona test. Other
//! `#` lines are comments. `max_parts` is a number or `unlimited`.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use symcap_core::cremona::ClassVector;
use symcap_core::diophantine::{Catalog, DiophantineError};

pub const FORMAT_VERSION: u32 = 1;

/// Overrides the cache directory.
pub const CACHE_DIR_ENV: &str = "SYMCAP_CACHE_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unsupported catalog format version {0}")]
    Version(u32),
    #[error(transparent)]
    Invalid(#[from] DiophantineError),
}

/// `$SYMCAP_CACHE_DIR`, else `$XDG_DATA_HOME/symcap`, else
/// `~/.local/share/symcap`.
pub fn default_cache_dir() -> Option<PathBuf> {
    if let Some(dir) = std::env::var_os(CACHE_DIR_ENV).filter(|v| !v.is_empty()) {
        return Some(PathBuf::from(dir));
    }
    if let Some(dir) = std::env::var_os("XDG_DATA_HOME").filter(|v| !v.is_empty()) {
        return Some(PathBuf::from(dir).join("symcap"));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".local/share/symcap"))
}

pub fn file_name(d_max: i64, max_parts: Option<usize>) -> String {
    let parts = max_parts.map_or_else(|| "all".to_string(), |k| k.to_string());
    format!("catalog-v{}-d{}-k{}.txt", FORMAT_VERSION, d_max, parts)
}

fn write_class(out: &mut String, prefix: &str, c: &ClassVector) {
    out.push_str(prefix);
    out.push_str(&c.degree().to_string());
    out.push(':');
    for m in c.multiplicities() {
        out.push(' ');
        out.push_str(&m.to_string());
    }
    out.push('\n');
}

pub fn serialize(catalog: &Catalog) -> String {
    let mut out = String::new();
    out.push_str("# symcap catalog\n");
    out.push_str(&format!("format_version: {}\n", FORMAT_VERSION));
    out.push_str(&format!("d_max: {}\n", catalog.d_max()));
    match catalog.max_parts() {
        Some(k) => out.push_str(&format!("max_parts: {}\n", k)),
        None => out.push_str("max_parts: unlimited\n"),
    }
    for c in catalog.classes() {
        write_class(&mut out, "", c);
    }
    for c in catalog.rejected() {
        write_class(&mut out, "#! ", c);
    }
    out
}

fn parse_class(body: &str, line: usize) -> Result<ClassVector, CacheError> {
    let bad = |message: &str| CacheError::Syntax { line, message: message.to_string() };
    let (d, rest) = body.split_once(':').ok_or_else(|| bad("expected 'd: m1 m2 ...'"))?;
    let d: i64 = d.trim().parse().map_err(|_| bad("bad degree"))?;
    let m = rest
        .split_whitespace()
        .map(|t| t.parse::<i64>().map_err(|_| bad("bad multiplicity")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ClassVector::new(d, m))
}

/// Parses and re-validates a catalog; every class is checked again.
pub fn deserialize(text: &str) -> Result<Catalog, CacheError> {
    let mut version = None;
    let mut d_max = None;
    let mut max_parts: Option<Option<usize>> = None;
    let mut classes = Vec::new();
    let mut rejected = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        let bad = |message: &str| CacheError::Syntax { line, message: message.to_string() };
        if t.is_empty() {
            continue;
        }
        if let Some(body) = t.strip_prefix("#!") {
            rejected.push(parse_class(body, line)?);
            continue;
        }
        if t.starts_with('#') {
            continue;
        }
        if let Some(v) = t.strip_prefix("format_version:") {
            let v: u32 = v.trim().parse().map_err(|_| bad("bad format_version"))?;
            if v != FORMAT_VERSION {
                return Err(CacheError::Version(v));
            }
            version = Some(v);
        } else if let Some(v) = t.strip_prefix("d_max:") {
            d_max = Some(v.trim().parse::<i64>().map_err(|_| bad("bad d_max"))?);
        } else if let Some(v) = t.strip_prefix("max_parts:") {
            let v = v.trim();
            max_parts = Some(if v == "unlimited" {
                None
            } else {
                Some(v.parse::<usize>().map_err(|_| bad("bad max_parts"))?)
            });
        } else {
            if version.is_none() || d_max.is_none() || max_parts.is_none() {
                return Err(bad("class before complete header"));
            }
            classes.push(parse_class(t, line)?);
        }
    }
    let header = |name: &str| CacheError::Syntax { line: 0, message: format!("missing {}", name) };
    version.ok_or_else(|| header("format_version"))?;
    let d_max = d_max.ok_or_else(|| header("d_max"))?;
    let max_parts = max_parts.ok_or_else(|| header("max_parts"))?;
    Ok(Catalog::from_parts(d_max, max_parts, classes, rejected)?)
}

pub fn load(path: &Path) -> Result<Catalog, CacheError> {
    deserialize(&fs::read_to_string(path)?)
}

/// Writes through a temporary file so readers never see a partial catalog.
pub fn store(path: &Path, catalog: &Catalog) -> Result<(), CacheError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(serialize(catalog).as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Where a catalog came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Loaded,
    Built,
}

/// Loads the cached catalog for `(d_max, max_parts)` or builds it with
/// `build` and tries to store it. Unreadable or stale files are rebuilt;
/// failure to write is reported through `warn` and otherwise ignored.
pub fn load_or_build(
    dir: Option<&Path>,
    d_max: i64,
    max_parts: Option<usize>,
    build: impl FnOnce() -> Result<Catalog, DiophantineError>,
    mut warn: impl FnMut(String),
) -> Result<(Catalog, Source), DiophantineError> {
    let path = dir.map(|d| d.join(file_name(d_max, max_parts)));
    if let Some(path) = path.as_deref().filter(|p| p.exists()) {
        match load(path) {
            Ok(c) if c.d_max() == d_max && c.max_parts() == max_parts => return Ok((c, Source::Loaded)),
            Ok(_) => warn(format!("{}: header does not match, rebuilding", path.display())),
            Err(e) => warn(format!("{}: {}, rebuilding", path.display(), e)),
        }
    }
    let catalog = build()?;
    if let Some(path) = path {
        if let Err(e) = store(&path, &catalog) {
            warn(format!("could not write {}: {}", path.display(), e));
        }
    }
    Ok((catalog, Source::Built))
}

#[cfg(test)]
mod tests {
    use super::*;
    use symcap_core::diophantine::build_catalog;

    #[test]
    fn round_trip() {
        let catalog = build_catalog(7, None).unwrap();
        assert!(!catalog.rejected().is_empty());
        let text = serialize(&catalog);
        assert_eq!(deserialize(&text).unwrap(), catalog);
        assert!(text.contains("\n6: 3 2 2 2 2 2 2 2\n"));
        assert!(text.contains("#! 5: 3 3 1 1 1 1 1 1 1 1\n"));
    }

    #[test]
    fn bad_files_are_rejected() {
        let good = serialize(&build_catalog(3, Some(8)).unwrap());
        assert!(matches!(deserialize(&good.replace("format_version: 1", "format_version: 9")), Err(CacheError::Version(9))));
        assert!(deserialize(&good.replace("2: 1 1 1 1 1", "2: 2 1")).is_err());
        assert!(deserialize("1: 1 1\n").is_err());
        assert!(deserialize(&good.replace("d_max: 3", "d_max: 1")).is_err());
    }
}
