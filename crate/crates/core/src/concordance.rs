//! Checks `docs/concordance.toml` against the source tree.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};

/// Anchors that must each have at least one entry.
pub const REQUIRED_ANCHORS: &[&str] = &[
    "triple-product",
    "jordan-identity",
    "operator-t",
    "operator-q",
    "bergman-operator",
    "tripotent",
    "strong-orthogonality",
    "odd-power",
    "trace-form",
    "positivity",
    "genus",
    "spectral-decomposition",
    "spectral-norm",
    "unit-ball",
    "functional-calculus",
    "product-spectrum",
    "ball-example",
    "polydisk-example",
    "projective-chart-example",
    "dual-polydisk-example",
    "bergman-kernel",
    "dual-kernel",
    "bergman-eigenvalues",
    "diastasis-hyp",
    "metric-origin",
    "diastatic-exponential-hyp",
    "diastasis-fs",
    "diastatic-exponential-fs",
    "geodesic-exponential",
    "duality-map",
    "duality-routes",
    "duality-pullback",
    "duality-composition",
    "kernel-transfer",
    "kahler-form",
    "quartic-asymptotics",
    "non-holomorphy",
    "sub-block",
];

pub const CONCORDANCE_PATH: &str = "docs/concordance.toml";
const CRATE_DIR: &str = "crates/core";

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConcordanceEntry {
    pub anchor: String,
    pub statement: String,
    pub code: String,
    pub test: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConcordanceFile {
    #[serde(default)]
    entry: Vec<ConcordanceEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Missing {
    pub anchor: String,
    pub reason: String,
}

pub fn parse_concordance(text: &str) -> Result<Vec<ConcordanceEntry>> {
    let file: ConcordanceFile =
        toml::from_str(text).map_err(|e| Error::Parse(format!("concordance: {e}")))?;
    Ok(file.entry)
}

fn rust_files(dir: &Path, out: &mut Vec<PathBuf>) {
    let Ok(entries) = fs::read_dir(dir) else {
        return;
    };
    let mut paths: Vec<PathBuf> = entries.filter_map(|e| e.ok().map(|e| e.path())).collect();
    paths.sort();
    for p in paths {
        if p.is_dir() {
            rust_files(&p, out);
        } else if p.extension().is_some_and(|e| e == "rs") {
            out.push(p);
        }
    }
}

fn defines(source: &str, item: &str) -> bool {
    ["fn", "struct", "enum", "const", "type", "trait"]
        .iter()
        .any(|kw| {
            source.match_indices(&format!("{kw} {item}")).any(|(i, m)| {
                let next = source[i + m.len()..].chars().next();
                !next.is_some_and(|c| c.is_alphanumeric() || c == '_')
            })
        })
}

/// Entries checked against already loaded sources.
pub fn check_entries(
    entries: &[ConcordanceEntry],
    src_file: impl Fn(&str) -> Option<String>,
    all_sources: &[String],
) -> Vec<Missing> {
    let mut missing = Vec::new();
    let present: BTreeSet<&str> = entries.iter().map(|e| e.anchor.as_str()).collect();
    for anchor in REQUIRED_ANCHORS {
        if !present.contains(anchor) {
            missing.push(Missing {
                anchor: anchor.to_string(),
                reason: "missing".into(),
            });
        }
    }
    for e in entries {
        let code_ok = e
            .code
            .split_once("::")
            .and_then(|(module, item)| src_file(module).map(|s| defines(&s, item)))
            .unwrap_or(false);
        if !code_ok {
            missing.push(Missing {
                anchor: e.anchor.clone(),
                reason: format!("unknown code unit `{}`", e.code),
            });
        }
        let tested = !e.test.is_empty() && all_sources.iter().any(|s| defines(s, &e.test));
        if !tested {
            missing.push(Missing {
                anchor: e.anchor.clone(),
                reason: "untested".into(),
            });
        }
    }
    missing
}

/// Missing or broken anchors for the repository rooted at `root`; empty
/// when the concordance is complete.
pub fn check_concordance(root: &Path) -> Result<Vec<Missing>> {
    let path = root.join(CONCORDANCE_PATH);
    let text = fs::read_to_string(&path)
        .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    let entries = parse_concordance(&text)?;
    let crate_dir = root.join(CRATE_DIR);
    let mut files = Vec::new();
    rust_files(&crate_dir.join("src"), &mut files);
    rust_files(&crate_dir.join("tests"), &mut files);
    let sources: Vec<String> = files
        .iter()
        .filter_map(|p| fs::read_to_string(p).ok())
        .collect();
    let src_dir = crate_dir.join("src");
    Ok(check_entries(
        &entries,
        |module| fs::read_to_string(src_dir.join(format!("{module}.rs"))).ok(),
        &sources,
    ))
}
