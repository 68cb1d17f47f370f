//! CSV and summary writers. Numbers carry 17 significant digits and the
//! header names the program version, so identical runs give identical files.

use anyhow::{Context, Result};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const VERSION_TAG: &str = concat!("kvnlab ", env!("CARGO_PKG_VERSION"));

pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Flag(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
    }
}

pub fn format_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn render(cell: &Cell) -> String {
    match cell {
        Cell::Num(v) => format_num(*v),
        Cell::Int(i) => i.to_string(),
        Cell::Flag(b) => b.to_string(),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
    }
}

pub struct Check {
    pub name: String,
    pub pass: bool,
    pub residual: f64,
}

pub struct Report {
    dir: PathBuf,
    command: String,
    notes: Vec<String>,
    checks: Vec<Check>,
}

impl Report {
    pub fn new(dir: &Path, command: &str) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), command: command.into(), notes: Vec::new(), checks: Vec::new() })
    }

    pub fn csv(&self, file: &str, columns: &[&str], rows: Vec<Vec<Cell>>) -> Result<()> {
        let mut text = format!("# {VERSION_TAG} {}\n{}\n", self.command, columns.join(","));
        for row in rows {
            let line: Vec<String> = row.iter().map(render).collect();
            text.push_str(&line.join(","));
            text.push('\n');
        }
        let path = self.dir.join(file);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    /// Record a residual against a tolerance.
    pub fn check(&mut self, name: impl Into<String>, residual: f64, tol: f64) {
        self.checks.push(Check { name: name.into(), pass: residual <= tol, residual });
    }

    /// Record a pass/fail outcome with an arbitrary measured value.
    pub fn outcome(&mut self, name: impl Into<String>, pass: bool, measured: f64) {
        self.checks.push(Check { name: name.into(), pass, residual: measured });
    }

    /// Writes `summary.txt`, echoes it and returns whether every check passed.
    pub fn finish(self) -> Result<bool> {
        let mut text = format!("# {VERSION_TAG} {}\n", self.command);
        for n in &self.notes {
            let _ = writeln!(text, "# {n}");
        }
        for c in &self.checks {
            let _ = writeln!(text, "{} {} residual={}", if c.pass { "PASS" } else { "FAIL" }, c.name, format_num(c.residual));
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        let all = passed == self.checks.len();
        let _ = writeln!(text, "overall {} ({passed}/{})", if all { "PASS" } else { "FAIL" }, self.checks.len());
        let path = self.dir.join("summary.txt");
        std::fs::write(&path, &text).with_context(|| format!("writing {}", path.display()))?;
        print!("{text}");
        Ok(all)
    }
}
