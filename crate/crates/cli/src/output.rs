//! Report structures and file output.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use graphpde::comparison::{PositivityReport, ResidualCertificate};
use graphpde::dynamics::Classification;
use graphpde::graph::{GraphFunction, ValidationReport, WeightedGraph};
use graphpde::series::TimeSeries;
use graphpde::spectral::{EigenSystem, SpectrumKind};
use graphpde::suite::SuiteReport;
use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub program: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub graph: Option<String>,
    pub config: Option<String>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub kind: SpectrumKind,
    pub vertices: Vec<String>,
    pub eigenvalues: Vec<f64>,
    /// eigenfunctions[j][k] is the j-th eigenfunction at `vertices[k]`.
    pub eigenfunctions: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<&'static str>,
}

impl SpectrumReport {
    pub fn new(graph: &WeightedGraph, es: &EigenSystem, vertices: &[usize]) -> Self {
        let note = match es.kind() {
            SpectrumKind::Neumann => Some("boundary values extended by the zero-flux condition"),
            SpectrumKind::Dirichlet => Some("boundary values are zero"),
            SpectrumKind::Full => None,
        };
        Self {
            kind: es.kind(),
            vertices: vertices.iter().map(|&x| graph.id(x).to_string()).collect(),
            eigenvalues: es.eigenvalues().to_vec(),
            eigenfunctions: es
                .eigenfunctions()
                .iter()
                .map(|phi| vertices.iter().map(|&x| phi[x]).collect())
                .collect(),
            note,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictEntry {
    pub name: String,
    pub certificate: ResidualCertificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positivity: Option<PositivityReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainSummary {
    pub lower_decrease: f64,
    pub upper_increase: f64,
    pub crossing: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SteadyReport {
    pub vertices: Vec<String>,
    pub minimal: GraphFunction,
    pub maximal: GraphFunction,
    pub iterations: usize,
    pub shift: f64,
    pub gap: f64,
    pub unique: bool,
    pub residual_minimal: f64,
    pub residual_maximal: f64,
    pub boundary_residual: f64,
    pub coercivity_margin: Option<f64>,
    pub chains: ChainSummary,
    pub warnings: Vec<String>,
}

/// The JSON report; the first four keys are always present.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub meta: Meta,
    pub spectrum: Option<Vec<SpectrumReport>>,
    pub verdicts: Vec<VerdictEntry>,
    pub classification: Vec<Classification>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<ValidationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steady: Option<SteadyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suites: Option<Vec<SuiteReport>>,
}

impl Report {
    pub fn new(meta: Meta) -> Self {
        Self {
            meta,
            spectrum: None,
            verdicts: Vec::new(),
            classification: Vec::new(),
            validation: None,
            steady: None,
            suites: None,
        }
    }
}

/// Output directory; files are written atomically through a temporary file
/// in the same directory.
pub struct OutDir {
    dir: PathBuf,
}

impl OutDir {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let io = |source| CliError::Io {
            path: path.display().to_string(),
            source,
        };
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(io)?;
        tmp.write_all(contents.as_bytes()).map_err(io)?;
        tmp.as_file().sync_all().map_err(io)?;
        tmp.persist(&path).map_err(|e| io(e.error))?;
        Ok(path)
    }

    pub fn write_report(&self, name: &str, report: &Report) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(report).map_err(|e| CliError::Failed(e.to_string()))?;
        text.push('\n');
        self.write(name, &text)
    }
}

/// Two-column `t value` blocks, one per vertex, separated by two blank lines
/// so gnuplot addresses each with `index`.
pub fn plot_blocks(series: &TimeSeries, ids: &[String], vertices: &[usize]) -> String {
    let mut out = String::new();
    for (k, &x) in vertices.iter().enumerate() {
        if k > 0 {
            out.push_str("\n\n");
        }
        let _ = writeln!(out, "# {}", ids[x]);
        for (t, s) in series.times().iter().zip(series.states()) {
            let _ = writeln!(out, "{t:.16e} {:.16e}", s[x]);
        }
    }
    out
}

/// Fixed 17-significant-digit rendering for terminal output.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plot_blocks_are_separated_per_vertex() {
        let s = TimeSeries::new(
            vec![0.0, 1.0],
            vec![GraphFunction::new(vec![1.0, 2.0]), GraphFunction::new(vec![3.0, 4.0])],
        )
        .unwrap();
        let ids = vec!["a".to_string(), "b".to_string()];
        let text = plot_blocks(&s, &ids, &[0, 1]);
        let blocks: Vec<&str> = text.split("\n\n\n").collect();
        assert_eq!(blocks.len(), 2);
        assert!(blocks[1].starts_with("# b\n0.0000000000000000e0 2.0000000000000000e0"));
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let out = OutDir::create(dir.path()).unwrap();
        out.write("f.txt", "one").unwrap();
        let p = out.write("f.txt", "two").unwrap();
        assert_eq!(std::fs::read_to_string(p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
