use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use steklov::eigensolver::Spectrum;
use steklov::io::write_json;
use steklov::Result;

/// Solver metadata of the run; `None` fields were not fixed by the command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct SolverMeta {
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub p: Option<u32>,
    pub tol: Option<f64>,
    pub rank_deficiency: Option<usize>,
}

impl SolverMeta {
    pub fn from_spectrum(s: &Spectrum) -> Self {
        SolverMeta { n: Some(s.n), p: s.p, tol: Some(s.tol), rank_deficiency: Some(s.rank_deficiency) }
    }
}

/// Provenance written next to every output file as `<file>.manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub version: String,
    pub threads: usize,
    pub wall_time_s: f64,
    pub solver: SolverMeta,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn sidecar(path: &Path) -> PathBuf {
        let mut name = path.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        path.with_file_name(name)
    }
}

/// Collects what a manifest needs while a command runs.
pub struct ManifestBuilder {
    command: String,
    parameters: serde_json::Value,
    start: Instant,
}

impl ManifestBuilder {
    pub fn new<P: Serialize>(command: &str, params: &P) -> Self {
        ManifestBuilder {
            command: command.to_string(),
            parameters: serde_json::to_value(params).unwrap_or(serde_json::Value::Null),
            start: Instant::now(),
        }
    }

    /// Writes the manifest beside each output.
    pub fn finish(self, solver: SolverMeta, outputs: &[&Path]) -> Result<()> {
        let manifest = RunManifest {
            command: self.command,
            parameters: self.parameters,
            version: steklov::VERSION.to_string(),
            threads: rayon::current_num_threads(),
            wall_time_s: self.start.elapsed().as_secs_f64(),
            solver,
            outputs: outputs.iter().map(|p| p.to_path_buf()).collect(),
        };
        for out in outputs {
            write_json(&RunManifest::sidecar(out), &manifest)?;
        }
        Ok(())
    }
}
