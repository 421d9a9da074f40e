use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// Written next to every output file so a run can be repeated exactly.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub version: &'static str,
    /// Every command-line option as parsed, defaults included.
    pub arguments: Value,
    /// The game actually played (β, η after overrides), when there is one.
    pub game: Option<Value>,
    pub backend: String,
    pub seeds: Vec<u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub wall_clock_seconds: f64,
}

pub struct ManifestBuilder {
    started: Instant,
    manifest: RunManifest,
}

impl ManifestBuilder {
    pub fn new(subcommand: &str, arguments: Value) -> Self {
        Self {
            started: Instant::now(),
            manifest: RunManifest {
                subcommand: subcommand.to_string(),
                version: env!("CARGO_PKG_VERSION"),
                arguments,
                game: None,
                backend: String::new(),
                seeds: Vec::new(),
                inputs: Vec::new(),
                outputs: Vec::new(),
                wall_clock_seconds: 0.0,
            },
        }
    }

    pub fn game(&mut self, game: Value) {
        self.manifest.game = Some(game);
    }

    pub fn backend(&mut self, backend: &str) {
        self.manifest.backend = backend.to_string();
    }

    pub fn seeds(&mut self, seeds: &[u64]) {
        self.manifest.seeds = seeds.to_vec();
    }

    pub fn input(&mut self, path: &Path) {
        self.manifest.inputs.push(path.to_path_buf());
    }

    pub fn output(&mut self, path: &Path) {
        self.manifest.outputs.push(path.to_path_buf());
    }

    /// Writes the manifest to `path`.
    pub fn finish(mut self, path: &Path) -> CliResult<()> {
        self.manifest.wall_clock_seconds = self.started.elapsed().as_secs_f64();
        let text = serde_json::to_string_pretty(&self.manifest)
            .map_err(|e| CliError::internal(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| CliError::write(path, e))
    }
}

/// `out.json` → `out.json.manifest.json`.
pub fn manifest_path_for(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    output.with_file_name(name)
}
