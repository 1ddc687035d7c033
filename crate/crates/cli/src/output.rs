//! Output-directory plumbing: CSV, plot data, and the manifest.
//!
//! Every numeric value is written with 17 significant digits through
//! [`format_float`], so rerunning an experiment with the same seed
//! produces byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use switchdyn::analysis::{format_float, PowerLawFit, SweepResult};

use crate::CliError;

/// One experiment's output directory.
pub struct OutDir {
    path: PathBuf,
}

impl OutDir {
    /// Creates the directory (and parents) if needed.
    pub fn create(path: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(path).map_err(|e| {
            CliError::Runtime(format!(
                "cannot create output directory {}: {e}",
                path.display()
            ))
        })?;
        Ok(Self {
            path: path.to_path_buf(),
        })
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<(), CliError> {
        let file = self.path.join(name);
        fs::write(&file, contents)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", file.display())))?;
        Ok(())
    }

    pub fn write_csv(&self, name: &str, sweep: &SweepResult) -> Result<(), CliError> {
        self.write(name, &sweep.to_csv())
    }
}

/// Whitespace-delimited plot rows, no header.
pub fn plot_data(rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format_float(*v)).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

/// Accumulates labelled power-law fits into `fit.csv`.
pub struct FitTable {
    header: String,
    lines: Vec<String>,
}

impl FitTable {
    pub fn new() -> Self {
        Self {
            header: "label,slope,log_intercept,r_squared,n_points,f_min,f_max".into(),
            lines: Vec::new(),
        }
    }

    /// Table with a leading numeric `cv` column, used by the CV sweep.
    pub fn with_cv_column() -> Self {
        Self {
            header: "label,cv,slope,log_intercept,r_squared,n_points,f_min,f_max".into(),
            lines: Vec::new(),
        }
    }

    pub fn push(&mut self, label: &str, fit: &PowerLawFit) {
        self.lines.push(format!(
            "{label},{},{},{},{},{},{}",
            format_float(fit.slope),
            format_float(fit.log_intercept),
            format_float(fit.r_squared),
            fit.n_points,
            format_float(fit.f_range.0),
            format_float(fit.f_range.1),
        ));
    }

    pub fn push_cv(&mut self, label: &str, cv: f64, fit: Option<&PowerLawFit>) {
        match fit {
            Some(fit) => self.lines.push(format!(
                "{label},{},{},{},{},{},{},{}",
                format_float(cv),
                format_float(fit.slope),
                format_float(fit.log_intercept),
                format_float(fit.r_squared),
                fit.n_points,
                format_float(fit.f_range.0),
                format_float(fit.f_range.1),
            )),
            // No fit possible (too few feasible points): explicit NaNs.
            None => self.lines.push(format!(
                "{label},{},NaN,NaN,NaN,0,NaN,NaN",
                format_float(cv)
            )),
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::with_capacity(64 * (self.lines.len() + 1));
        out.push_str(&self.header);
        out.push('\n');
        for line in &self.lines {
            out.push_str(line);
            out.push('\n');
        }
        out
    }
}

/// The manifest: `key = value` lines recording the experiment name, tool
/// version, seed, and every experiment parameter (flag names match keys
/// one to one). Derived results are recorded with a `derived_` prefix and
/// are not needed for a rerun. The output directory is deliberately not
/// recorded, so reruns into different directories stay byte-identical.
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(experiment: &str, seed: u64) -> Self {
        let mut m = Self {
            entries: Vec::new(),
        };
        m.set("experiment", experiment);
        m.set("version", env!("CARGO_PKG_VERSION"));
        m.set("seed", seed.to_string());
        m
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.push((key.to_string(), value.into()));
    }

    pub fn set_float(&mut self, key: &str, value: f64) {
        self.set(key, format_float(value));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.entries {
            writeln!(out, "{key} = {value}").expect("string write");
        }
        out
    }
}
