use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::SweepConfig;
use crate::error::Result;

/// Header plus pre-formatted cells; floats are written with 17 significant
/// digits so the file round-trips exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in std::iter::once(&self.header).chain(&self.rows) {
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Serialize)]
struct Meta<'a> {
    tool: &'static str,
    version: &'static str,
    rows: usize,
    columns: &'a [String],
    config: &'a SweepConfig,
}

/// Path of the JSON sidecar written next to `csv`.
pub fn meta_path(csv: &Path) -> PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Writes `<out>` (CSV) and `<out>.meta.json`. Neither contains timestamps or
/// host details, so identical configs give identical bytes.
pub fn write_outputs(table: &Table, cfg: &SweepConfig, out: &Path) -> Result<PathBuf> {
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::File::create(out)?.write_all(table.to_csv().as_bytes())?;
    let meta = Meta {
        tool: "wmdistill",
        version: env!("CARGO_PKG_VERSION"),
        rows: table.rows.len(),
        columns: &table.header,
        config: cfg,
    };
    let path = meta_path(out);
    let mut json = serde_json::to_string_pretty(&meta)?;
    json.push('\n');
    fs::write(&path, json)?;
    Ok(path)
}
