//! CSV tables, the JSON summary and the timing log.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

/// One CSV cell. Floats use 17 significant digits.
pub enum Cell {
    F(f64),
    OptF(Option<f64>),
    I(i64),
    U(usize),
    B(bool),
    S(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}
impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        Cell::OptF(v)
    }
}
impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::I(v as i64)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::U(v)
    }
}
impl From<u8> for Cell {
    fn from(v: u8) -> Self {
        Cell::I(v as i64)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::B(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(v) => fmt_f64(*v),
            Cell::OptF(Some(v)) => fmt_f64(*v),
            Cell::OptF(None) => String::new(),
            Cell::I(v) => v.to_string(),
            Cell::U(v) => v.to_string(),
            Cell::B(v) => v.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

#[macro_export]
macro_rules! row {
    ($($v:expr),* $(,)?) => { vec![$($crate::output::Cell::from($v)),*] };
}

pub struct Table {
    pub name: String,
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, header: &[&'static str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width of {}", self.name);
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(Cell::render).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Contents of `<command>_summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub command: String,
    pub checks: Vec<Check>,
    /// Partial failures (e.g. one `eps` whose fold was not found).
    pub failures: Vec<String>,
    /// Command-specific results.
    pub results: serde_json::Value,
    pub files: Vec<String>,
    pub pass: bool,
}

/// Collects tables, checks and timings of one command run.
pub struct Report {
    pub command: String,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    pub failures: Vec<String>,
    pub results: serde_json::Map<String, serde_json::Value>,
    timings: Vec<(String, f64)>,
    clock: Instant,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            tables: Vec::new(),
            checks: Vec::new(),
            failures: Vec::new(),
            results: serde_json::Map::new(),
            timings: Vec::new(),
            clock: Instant::now(),
        }
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn result(&mut self, key: &str, v: impl Serialize) {
        let v = serde_json::to_value(v).expect("result serializes");
        self.results.insert(key.to_string(), v);
    }

    /// Records the time since the previous lap.
    pub fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        self.timings.push((
            stage.to_string(),
            now.duration_since(self.clock).as_secs_f64(),
        ));
        self.clock = now;
    }

    pub fn pass(&self) -> bool {
        self.failures.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    /// Writes every table, the summary and the timing log into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Summary> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        let stem = self.command.replace('-', "_");
        let mut files = Vec::new();
        for t in &self.tables {
            let name = format!("{}.csv", t.name);
            write_file(&dir.join(&name), &t.render())?;
            files.push(name);
        }
        let summary = Summary {
            command: self.command.clone(),
            checks: self.checks.clone(),
            failures: self.failures.clone(),
            results: serde_json::Value::Object(self.results.clone()),
            files,
            pass: self.pass(),
        };
        let mut json = serde_json::to_string_pretty(&summary)?;
        json.push('\n');
        write_file(&dir.join(format!("{stem}_summary.json")), &json)?;
        let mut log = String::new();
        for (stage, secs) in &self.timings {
            let _ = writeln!(log, "{stage}\t{secs:.3} s");
        }
        write_file(&dir.join(format!("{stem}_timings.log")), &log)?;
        Ok(summary)
    }
}

fn write_file(path: &PathBuf, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}
